//! Every bound evaluator at a glance: regime reports across a (λ, δ) grid,
//! and the exact agreement between the moment-method bound and its
//! illustrative special cases.
//!
//! Run with: `cargo run --example bound_regimes`

use torus_spectral::bounds::{
    regime_report, moment_method_special_case, moment_method_bound, BoundParams, PExp,
};

fn main() {
    let d = 3usize;
    println!("best applicable bounds, d = {d}, p = ∞:");
    println!(
        "{:>8} {:>10} {:>28} {:>28}",
        "λ", "δ", "best L2→Lp", "best L1→L∞"
    );
    for lambda in [100.0, 1000.0] {
        for delta in [1e-1, 1e-3, 1e-5, 1e-7] {
            let bp = BoundParams::new(d, PExp::Infinity, lambda, delta, 0.01).unwrap();
            let rep = regime_report(&bp);
            println!(
                "{lambda:>8} {delta:>10.0e} {:>28} {:>28}",
                rep.best_l2lp.unwrap_or_default(),
                rep.best_l1linf.unwrap_or_default()
            );
        }
    }

    // at b = d+1-a the moment-method bound collapses to the special case
    println!("\nmoment-method bound vs its special case (log-scale match):");
    println!("{:>4} {:>4} {:>10} {:>14} {:>14}", "d", "a", "δ", "sharp", "blunt");
    for (dd, a) in [(3usize, 1i64), (3, 2), (4, 2), (5, 3)] {
        let lambda = 500.0f64;
        let delta = lambda.powf(-(a as f64) + 0.5);
        let b = dd + 1 - a as usize;
        let sharp = moment_method_bound(dd, b, lambda, delta, 0.01);
        let (blunt, ok) = moment_method_special_case(dd, a, lambda, delta, 0.01);
        assert!(ok && (sharp.ln() - blunt.ln()).abs() < 1e-12);
        println!("{dd:>4} {a:>4} {delta:>10.2e} {sharp:>14.4e} {blunt:>14.4e}");
    }

    // a full report at one parameter point
    let bp = BoundParams::new(3, PExp::Infinity, 1000.0, 1e-4, 0.01).unwrap();
    let rep = regime_report(&bp);
    println!("\nfull report at d=3, p=∞, λ=1000, δ=1e-4:");
    for e in &rep.entries {
        println!(
            "  {:<28} {:<12} {:>12.4e}",
            e.name,
            if e.applicable { "applicable" } else { "—" },
            e.value
        );
    }
}
