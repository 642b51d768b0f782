//! Exact lattice counts in ellipsoidal balls and thin shells: the counting
//! function N(λ), the volume error P(λ), and the shell projector norm,
//! computed three independent ways.
//!
//! Run with: `cargo run --example shell_counts`

use torus_spectral::lattice::{
    count_result, enumerate_shell, projector_l1linf, shell_count, shell_count_direct, ShellQuery,
};
use torus_spectral::quadform::{GenericSampler, QuadForm, SamplerFamily};
use torus_spectral::util::rational_from_f64;
use torus_spectral::CutoffSpec;

fn main() {
    // counts approach Vol(B₁)λ^d; the residual is the error term P(λ)
    let form = QuadForm::identity(2);
    println!("unit circle counts (d = 2):");
    println!("{:>8} {:>12} {:>14} {:>12}", "λ", "N(λ)", "πλ²", "P(λ)");
    for lam in [10.0, 50.0, 100.0, 250.0, 500.0] {
        let r = count_result(&form, &rational_from_f64(lam)).unwrap();
        println!(
            "{lam:>8} {:>12} {:>14.2} {:>12.2}",
            r.count, r.leading, r.error_term
        );
    }

    // a generic sampled form: the three shell counts agree exactly
    let form = GenericSampler::new(3, SamplerFamily::Full, 3).form_at(0);
    let lambda = rational_from_f64(25.0);
    let delta = rational_from_f64(0.125);
    let q = ShellQuery::new(&form, lambda, delta).unwrap();
    let by_difference = shell_count(&q).unwrap();
    let by_direct = shell_count_direct(&q).unwrap();
    let by_listing = enumerate_shell(&q).unwrap().len() as u128;
    println!("\ngeneric d=3 shell at λ=25, δ=1/8:");
    println!("  N(λ+δ) − N(λ−δ)   = {by_difference}");
    println!("  one-pass window    = {by_direct}");
    println!("  enumerated points  = {by_listing}");
    assert!(by_difference == by_direct && by_direct == by_listing);

    // the projector norm: indicator cutoff reproduces the count, the
    // smooth plateau lands between the half-width and full-width counts
    let indicator = projector_l1linf(&q, &CutoffSpec::indicator()).unwrap();
    let smooth = projector_l1linf(&q, &CutoffSpec::smooth()).unwrap();
    let half = ShellQuery::new(&q.form, q.lambda.clone(), &q.delta / rational_from_f64(2.0))
        .map(|hq| shell_count(&hq).unwrap())
        .unwrap();
    println!("\nprojector norm L¹→L∞:");
    println!("  indicator χ: {indicator}");
    println!("  smooth χ:    {smooth:.4}  (sandwich: [{half}, {by_difference}])");
}
