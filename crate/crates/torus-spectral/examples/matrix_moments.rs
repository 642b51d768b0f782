//! The matrix-counting moment machinery: exact counts of matrices with
//! prescribed dyadic subdeterminants, Monte Carlo shell-norm moments, and
//! the maximisation procedure that turns the dyadic search into a closed
//! form.
//!
//! Run with: `cargo run --release --example matrix_moments`

use torus_spectral::count::{
    build_p, mathcal_f_grid_max, maximized_bound, maximized_bound_from, moment_lhs,
    moment_rhs_dyadic_max, shell_norm_quantiles, z_count, MatrixCountQuery,
};
use torus_spectral::quadform::SamplerFamily;

fn main() {
    // the augmented matrix and a small exact count
    let p = build_p(&[vec![2, 3], vec![1, 4]], 8).unwrap();
    println!("P(M) for M = [[2,3],[1,4]], λ₀ = 8:");
    for row in &p.p {
        println!("  {row:?}");
    }
    let q = MatrixCountQuery::new(2, 2, 8, vec![8, 4], vec![64, 16]).unwrap();
    println!(
        "\nZ_{{2,2}}(μ=(8,4), L=(64,16)) = {} matrices",
        z_count(&q).unwrap()
    );

    // moment integral vs the dyadic maximum
    let (d, b, lambda0, delta) = (2usize, 2usize, 32u64, 1.0 / 32.0);
    let lhs = moment_lhs(d, b, lambda0, delta, SamplerFamily::Rectangular, 4000, 9).unwrap();
    let (rhs, arg) = moment_rhs_dyadic_max(d, b, lambda0, delta).unwrap();
    let logs = (lambda0 as f64).ln().powi((b * d + d) as i32);
    println!("\nmoment experiment (d={d}, b={b}, λ₀={lambda0}, δ=1/32):");
    println!("  lhs  = {:.3} ± {:.3}   (Monte Carlo, 4000 samples)", lhs.value, lhs.stderr);
    println!("  rhs  = {rhs:.3}  attained at d'={} μ={:?} L={:?} (Z = {})", arg.d_eff, arg.mu, arg.l, arg.z);
    println!("  lhs ≤ C (log λ₀)^{} rhs with C = {:.4}", b * d + d, lhs.value / (logs * rhs));

    // the maximisation procedure: grid brute force vs the closed form
    println!("\nmaximisation consistency over the restricted grids:");
    println!(
        "{:>4} {:>4} {:>8} {:>14} {:>14}",
        "d", "b", "δ", "grid max", "closed form"
    );
    for (dd, bb) in [(1usize, 2usize), (2, 3), (3, 4)] {
        for delta in [1e-2, 1e-4] {
            let grid = mathcal_f_grid_max(dd, bb, 1000.0, delta).unwrap();
            let closed = maximized_bound_from(dd, bb, 1000.0, delta, 1);
            println!("{dd:>4} {bb:>4} {delta:>8} {grid:>14.6e} {closed:>14.6e}");
            assert!((grid.ln() - closed.ln()).abs() < 1e-9);
        }
    }
    println!(
        "\nfull closed form at (d,b) = (2,3), λ=1000, δ=1e-3: {:.6e}",
        maximized_bound(2, 3, 1000.0, 1e-3)
    );

    // the distribution of the norm itself over coefficient samples, the
    // observable replacing an almost-sure statement
    let qs = shell_norm_quantiles(2, 32, 1.0 / 32.0, SamplerFamily::Rectangular, 2000, 1).unwrap();
    println!(
        "\nnorm quantiles at λ = 32, δ = 1/32 over {} coefficient draws:",
        qs.samples
    );
    println!(
        "  median {}  p90 {}  p99 {}  max {}",
        qs.median, qs.p90, qs.p99, qs.max
    );
}
