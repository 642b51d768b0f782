//! Sample quadratic forms from the two generic families, evaluate them
//! exactly, and round-trip through the JSON schema.
//!
//! Run with: `cargo run --example sample_forms`

use torus_spectral::quadform::{GenericSampler, QuadForm, SamplerFamily};

fn main() {
    // diagonal forms with coefficients uniform in [1,2]
    let mut rect = GenericSampler::new(7, SamplerFamily::Rectangular, 3);
    println!("three diagonal (rectangular-torus) samples:");
    for _ in 0..3 {
        let form = rect.sample();
        let diag: Vec<String> = (0..3)
            .map(|i| format!("{:.6}", form.coeff_f64(i, i)))
            .collect();
        println!("  β = diag({})", diag.join(", "));
    }

    // near-identity symmetric forms with off-diagonals in ±1/(10d²)
    let mut full = GenericSampler::new(7, SamplerFamily::Full, 3);
    let form = full.sample();
    println!("\none full-symmetric sample (d = 3, off-diagonal box ±1/90):");
    for i in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|j| format!("{:+.6}", form.coeff_f64(i, j)))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    println!("  within the generic coefficient box: {}", form.in_generic_box());

    // exact evaluation: rationals in, rationals out
    let n = [2i64, -1, 3];
    let value = form.eval(&n).unwrap();
    println!("\nQ({n:?}) = {value} (exact rational)");
    println!("Q({n:?}) ≈ {:.12} (float image)", form.eval_f64(&n));

    // the JSON schema carries exact decimal strings
    let json = form.to_json();
    let back = QuadForm::from_json(&json).unwrap();
    assert_eq!(form.eval(&n).unwrap(), back.eval(&n).unwrap());
    println!("\nJSON round-trip preserves coefficients exactly:");
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
}
