//! The subdeterminant toolkit: D_k/σ_k profiles, prefix-maximising column
//! rearrangement, the admissible-extension box cover, constrained basis
//! reduction and the slice volume bound with its Monte Carlo check.
//!
//! Run with: `cargo run --example subdet_toolkit`

use nalgebra::DMatrix;
use torus_spectral::subdet::{
    basis_reduction, box_cover_check, max_subdet_f64, max_subdet_prefix, permute_columns,
    rearrange_columns, rearrange_constant, voli_bound, voli_measure_mc, SBoxQuery, SubdetProfile,
};

fn main() {
    let m = vec![
        vec![2i64, -7, 1, 0, 5, -3],
        vec![0, 4, -2, 6, 1, 1],
        vec![3, 0, 8, -1, -4, 2],
        vec![1, 2, -5, 0, 3, -6],
    ];
    let fm = DMatrix::from_fn(4, 6, |r, c| m[r][c] as f64);

    let prof = SubdetProfile::of_int(&m).unwrap();
    println!("profile of a 4×6 integer matrix:");
    println!("{:>3} {:>12} {:>12} {:>12}", "k", "D_k", "σ_k", "σ_1..σ_k");
    let mut prod = 1.0;
    for k in 1..=4 {
        prod *= prof.sigma[k - 1];
        println!(
            "{k:>3} {:>12} {:>12.3} {:>12.3}",
            prof.d_exact.as_ref().unwrap()[k - 1],
            prof.sigma[k - 1],
            prod
        );
    }
    println!("two-scale band holds: {}", prof.corollary_band_ok());

    // rearrange so every prefix carries a near-maximal subdeterminant
    let perm = rearrange_columns(&fm).unwrap();
    let pm = permute_columns(&fm, &perm);
    println!("\ncolumn order {perm:?} (guarantee constant 1/{:.0}):", 1.0 / rearrange_constant(4, 6));
    for k in 1..=4 {
        let prefix = max_subdet_prefix(&pm, k, k).unwrap();
        let full = max_subdet_f64(&fm, k).unwrap();
        println!("  k={k}: D_k^(k) / D_k = {:.3}", prefix / full);
    }

    // the admissible-extension set S(M,R) sits inside its τ-box
    let small = DMatrix::from_row_slice(3, 2, &[4.0, 0.0, 0.0, 2.0, 1.0, 0.5]);
    let q = SBoxQuery::new(small.clone(), 4.0, 2.0).unwrap();
    let report = box_cover_check(&q, 6000, 12.0, 1).unwrap();
    println!(
        "\nbox cover of S(M,R): {} members among {} samples, {} violations, max |y|/τ = {:.3}",
        report.members, report.trials, report.violations, report.max_ratio
    );

    // constrained basis reduction
    let v = vec![vec![1.0, 0.2, 0.0], vec![0.0, 1.0, -0.3], vec![0.4, 0.0, 1.0]];
    let w = basis_reduction(&v, &[0.5, 2.0, 8.0], &[3.0, 1.0, 10.0]).unwrap();
    println!("\nreduced basis for the constrained body:");
    for (i, wi) in w.iter().enumerate() {
        println!(
            "  w_{} = [{}]",
            i + 1,
            wi.iter().map(|x| format!("{x:+.3}")).collect::<Vec<_>>().join(", ")
        );
    }

    // slice volume bound against a Monte Carlo measurement
    let mu = [2.0, 1.0];
    let r = 2.0 * max_subdet_f64(&small, 2).unwrap();
    let bound = voli_bound(&small, r, 2.0, &mu, 3.0, 0.05).unwrap();
    let measured = voli_measure_mc(&q, &mu, 3.0, 40_000, 9).unwrap();
    println!("\nslice volume: measured ≈ {measured:.3}, bound = {bound:.3}");
}
