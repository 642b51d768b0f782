//! Weyl-sum magnitudes along a time scan, with major/minor arc
//! classification and the rational-approximation bound at each time.
//!
//! Run with: `cargo run --example weyl_arcs`

use torus_spectral::quadform::QuadForm;
use torus_spectral::weyl::{
    classify_arc, dirichlet_approx, dispersive_bound, kernel_1d, kernel_full, weyl_bound_rhs,
    ArcLabel, WeylParams,
};
use torus_spectral::CutoffSpec;

fn main() {
    let n = 128u64;
    let c0 = 0.125;
    let eps = 0.1;
    let phi = CutoffSpec::smooth();

    println!("one-dimensional kernel along t ∈ (1/N, 1], N = {n}:");
    println!(
        "{:>9} {:>8} {:>14} {:>12} {:>12} {:>7}",
        "t", "arc", "approx", "|K¹(t,0)|", "rhs", "ratio"
    );
    for j in 1..=24 {
        let t = j as f64 / 24.0;
        let label = classify_arc(t, n, c0).unwrap();
        let approx = dirichlet_approx(t, n);
        let k = kernel_1d(n, t, 0.0, &phi).norm();
        let rhs = weyl_bound_rhs(n, &approx, eps);
        println!(
            "{t:>9.4} {:>8} {:>14} {k:>12.2} {rhs:>12.2} {:>7.3}",
            label.kind_str(),
            format!("{}/{}", approx.a, approx.q),
            k / rhs
        );
        if let ArcLabel::Major { big_q, a, q } = label {
            assert!((t - a as f64 / q as f64).abs() <= 1.0 / (n as f64 * big_q as f64));
        }
    }

    // short-time dispersive envelope for the full kernel
    let form = QuadForm::identity(2);
    let p = WeylParams::new(32, phi, &form).unwrap();
    println!("\nshort-time envelope, d = 2, N = 32 (x = 0):");
    println!("{:>12} {:>12} {:>12} {:>7}", "t", "|K_N|", "envelope", "ratio");
    for mult in [0.0, 0.2, 0.5, 1.0] {
        let t = mult / (10.0 * 32.0);
        let k = kernel_full(&p, t, &[0.0, 0.0]).unwrap().norm();
        let env = dispersive_bound(32, t, 0.0, 2);
        println!("{t:>12.6} {k:>12.1} {env:>12.1} {:>7.3}", k / env);
    }
}
