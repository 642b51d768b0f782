//! The acceptance suite: thirteen numbered checks covering counting
//! identities, volume asymptotics, Weyl-sum estimates, the subdeterminant
//! toolkit and the moment machinery, each with its tolerance pinned in
//! code. `fast` reduces sample counts where a check is Monte Carlo; `full`
//! runs the complete parameter grid.
//!
//! Checks marked *soft* report a fitted trend (growth exponents, logged
//! constants) and never fail the suite; everything else is a hard gate.

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::count;
use crate::cutoff::CutoffSpec;
use crate::error::Error;
use crate::lattice::{self, ShellQuery};
use crate::quadform::{GenericSampler, QuadForm, SamplerFamily};
use crate::subdet;
use crate::util::{ls_slope, rational_from_f64, rng_at};
use crate::weyl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Soft checks report trends and constants; they do not gate the suite.
    pub soft: bool,
    pub details: String,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub results: Vec<CriterionResult>,
    pub all_passed: bool,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn print_lines(&self) {
        for r in &self.results {
            let status = match (r.passed, r.soft) {
                (true, false) => "PASS",
                (false, false) => "FAIL",
                (true, true) => "PASS (soft)",
                (false, true) => "INFO (soft)",
            };
            println!(
                "criterion {:2}: {:<4} [{} ms] {} — {}",
                r.id, status, r.elapsed_ms, r.name, r.details
            );
        }
        println!(
            "acceptance suite ({:?}): {} in {} ms",
            self.level,
            if self.all_passed { "PASS" } else { "FAIL" },
            self.elapsed_ms
        );
    }
}

/// Run the full suite in order.
pub fn run_all(level: VerifyLevel) -> Result<VerifyReport, Error> {
    let start = std::time::Instant::now();
    let results = vec![
        c01_counting_identity(level)?,
        c02_leading_volume(level)?,
        c03_error_term_scale(level)?,
        c04_weyl_bound(level)?,
        c05_arc_partition(level)?,
        c06_sqrt_cancellation_trend(level)?,
        c07_sigma_d_correspondence(level)?,
        c08_column_rearrangement(level)?,
        c09_voli_volume(level)?,
        c10_moment_inequality(level)?,
        c11_maximization_consistency(level)?,
        c12_moment_method_consistency(level)?,
        c13_empirical_vs_conjecture(level)?,
    ];
    let all_passed = results.iter().all(|r| r.passed || r.soft);
    Ok(VerifyReport {
        level,
        results,
        all_passed,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

pub fn run_one(id: u8, level: VerifyLevel) -> Result<CriterionResult, Error> {
    match id {
        1 => c01_counting_identity(level),
        2 => c02_leading_volume(level),
        3 => c03_error_term_scale(level),
        4 => c04_weyl_bound(level),
        5 => c05_arc_partition(level),
        6 => c06_sqrt_cancellation_trend(level),
        7 => c07_sigma_d_correspondence(level),
        8 => c08_column_rearrangement(level),
        9 => c09_voli_volume(level),
        10 => c10_moment_inequality(level),
        11 => c11_maximization_consistency(level),
        12 => c12_moment_method_consistency(level),
        13 => c13_empirical_vs_conjecture(level),
        _ => Err(Error::OutOfRange(format!("no criterion {id}"))),
    }
}

fn finish(
    id: u8,
    name: &str,
    soft: bool,
    passed: bool,
    details: String,
    start: std::time::Instant,
) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        passed,
        soft,
        details,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Shell count agrees with the difference of ball counts and with direct
/// enumeration, exactly, across random forms and windows.
pub fn c01_counting_identity(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let triples: u64 = match level {
        VerifyLevel::Fast => 50,
        VerifyLevel::Full => 200,
    };
    let failures: Vec<String> = (0..triples)
        .into_par_iter()
        .map(|i| -> Result<Option<String>, Error> {
            let mut rng = rng_at(101, 1, i);
            let d = if i % 2 == 0 { 2 } else { 3 };
            let family = if i % 4 < 2 {
                SamplerFamily::Rectangular
            } else {
                SamplerFamily::Full
            };
            let form = GenericSampler::new(2024, family, d).form_at(i);
            let lam_f = 5.0 + 495.0 * rng.gen::<f64>();
            let del_f = 0.05 + 0.45 * rng.gen::<f64>();
            let lambda = rational_from_f64(lam_f);
            let delta = rational_from_f64(del_f);
            let outer = lattice::count_points(&form, &(&lambda + &delta))?;
            let inner = lattice::count_points(&form, &(&lambda - &delta))?;
            let q = ShellQuery::new(&form, lambda, delta)?;
            let direct = lattice::shell_count_direct(&q)?;
            let enumerated = lattice::for_each_shell_point(&q, |_, _| {})? as u128;
            if outer - inner != direct || direct != enumerated {
                return Ok(Some(format!(
                    "triple {i}: d={d} λ={lam_f:.3} δ={del_f:.3}: {} vs {direct} vs {enumerated}",
                    outer - inner
                )));
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let passed = failures.is_empty();
    let details = if passed {
        format!("{triples} random (form, λ, δ) triples, three counts identical")
    } else {
        failures.join("; ")
    };
    Ok(finish(1, "counting identity", false, passed, details, start))
}

/// Ball counts match the ellipsoid volume to first order.
pub fn c02_leading_volume(_level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let d2 = QuadForm::identity(2);
    let n2 = lattice::count_points(&d2, &rational_from_f64(500.0))? as f64;
    let ratio2 = n2 / 500.0f64.powi(2);
    let err2 = (ratio2 - std::f64::consts::PI).abs();

    let d3 = QuadForm::identity(3);
    let n3 = lattice::count_points(&d3, &rational_from_f64(100.0))? as f64;
    let lead3 = 4.0 / 3.0 * std::f64::consts::PI * 100.0f64.powi(3);
    let err3 = (n3 - lead3).abs() / lead3;

    let passed = err2 < 0.01 && err3 < 0.02;
    let details = format!(
        "d=2 λ=500: N/λ² = {ratio2:.6} (|Δπ| = {err2:.2e} < 0.01); \
         d=3 λ=100: rel err = {err3:.2e} < 0.02"
    );
    Ok(finish(2, "leading-order volume", false, passed, details, start))
}

/// Fitted growth of the lattice-count error for generic diagonal forms in
/// dimension 4 (soft band around the square-root scale).
pub fn c03_error_term_scale(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let (n_forms, lambdas): (u64, Vec<f64>) = match level {
        VerifyLevel::Fast => (8, vec![20.0, 40.0, 60.0]),
        VerifyLevel::Full => (20, vec![20.0, 30.0, 40.0, 50.0, 60.0]),
    };
    let mut mean_abs_p = Vec::new();
    for &lam in &lambdas {
        let sum: f64 = (0..n_forms)
            .into_par_iter()
            .map(|i| -> Result<f64, Error> {
                let form = GenericSampler::new(77, SamplerFamily::Rectangular, 4).form_at(i);
                Ok(lattice::error_term(&form, &rational_from_f64(lam))?.abs())
            })
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        mean_abs_p.push(sum / n_forms as f64);
    }
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = mean_abs_p.iter().map(|p| p.max(1e-9).ln()).collect();
    let slope = ls_slope(&xs, &ys);
    let passed = slope.is_finite() && slope <= 2.5;
    let details = format!(
        "d=4, {n_forms} generic diagonal forms: fitted |P(λ)| ~ λ^{slope:.2} \
         (soft band: exponent ≤ 2.5; square-root scale is 2)"
    );
    Ok(finish(3, "generic error-term scale", true, passed, details, start))
}

/// One-dimensional Weyl sums at rational times obey the `N^{1+ε}/√q`
/// envelope with a global constant.
pub fn c04_weyl_bound(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let (q_max, ns): (u64, Vec<u64>) = match level {
        VerifyLevel::Fast => (32, vec![64, 256]),
        VerifyLevel::Full => (64, vec![64, 128, 256, 512]),
    };
    let phi = CutoffSpec::smooth();
    let fracs: Vec<(i64, u64)> = (1..=q_max)
        .flat_map(|q| {
            (1..=q)
                .filter(move |a| num_integer::gcd(*a, q) == 1)
                .map(move |a| (a as i64, q))
        })
        .collect();
    let worst = ns
        .par_iter()
        .map(|&n| {
            let mut w: f64 = 0.0;
            for &(a, q) in &fracs {
                let t = a as f64 / q as f64;
                let mut kmax: f64 = 0.0;
                for j in 0..16 {
                    let y = j as f64 / 16.0;
                    kmax = kmax.max(weyl::kernel_1d(n, t, y, &phi).norm());
                }
                w = w.max(kmax * (q as f64).sqrt() / (n as f64).powf(1.1));
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    let passed = worst <= 10.0;
    let details = format!(
        "max |K⁽¹⁾(a/q)|·√q/N^1.1 = {worst:.3} over {} fractions × {:?} (≤ 10)",
        fracs.len(),
        ns
    );
    Ok(finish(4, "Weyl bound at rational times", false, passed, details, start))
}

/// The arc decomposition is a partition with pairwise-disjoint major
/// intervals (exact fraction check).
pub fn c05_arc_partition(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let samples: u64 = match level {
        VerifyLevel::Fast => 20_000,
        VerifyLevel::Full => 100_000,
    };
    let n = 256u64;
    let c0 = 0.125;
    let nf = n as f64;
    let mut counts = [0u64; 3];
    for i in 0..samples {
        let t = 1.0 / nf + (i as f64 + 0.5) * (1.0 - 1.0 / nf) / samples as f64;
        let label = weyl::classify_arc(t, n, c0)?;
        match label {
            weyl::ArcLabel::Lambda0 => counts[0] += 1,
            weyl::ArcLabel::Major { big_q, a, q } => {
                counts[1] += 1;
                let ok = a != 0
                    && big_q / 2 <= q
                    && q < big_q
                    && (big_q as f64) < c0 * nf
                    && num_integer::gcd(a.unsigned_abs(), q) == 1
                    && (t - a as f64 / q as f64).abs() <= 1.0 / (nf * big_q as f64);
                if !ok {
                    return Ok(finish(
                        5,
                        "arc partition",
                        false,
                        false,
                        format!("invalid major label at t={t}: Q={big_q} a={a} q={q}"),
                        start,
                    ));
                }
            }
            weyl::ArcLabel::Minor => counts[2] += 1,
        }
    }
    // exact pairwise disjointness of the major intervals
    use num_bigint::BigInt;
    use num_traits::Signed;
    let c0n = (c0 * nf) as i64;
    let mut fracs: Vec<(i64, i64)> = Vec::new();
    for q in 1..=c0n {
        if crate::util::dyadic_bucket(q as u64) as i64 >= c0n {
            continue;
        }
        for a in 1..=q {
            if num_integer::gcd(a as u64, q as u64) == 1 {
                fracs.push((a, q));
            }
        }
    }
    let rat = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
    let mut disjoint = true;
    for i in 0..fracs.len() {
        for j in i + 1..fracs.len() {
            let (a1, q1) = fracs[i];
            let (a2, q2) = fracs[j];
            if a1 * q2 == a2 * q1 {
                continue;
            }
            let gap = (rat(a1, q1) - rat(a2, q2)).abs();
            let w1 = rat(1, n as i64 * crate::util::dyadic_bucket(q1 as u64) as i64);
            let w2 = rat(1, n as i64 * crate::util::dyadic_bucket(q2 as u64) as i64);
            if gap <= &w1 + &w2 {
                disjoint = false;
            }
        }
    }
    let passed = disjoint && counts.iter().sum::<u64>() == samples;
    let details = format!(
        "{samples} times: {} major / {} minor / {} near-zero; \
         {} major fractions pairwise disjoint (exact): {disjoint}",
        counts[1],
        counts[2],
        counts[0],
        fracs.len()
    );
    Ok(finish(5, "arc partition", false, passed, details, start))
}

/// Growth of the time-averaged sup-norm proxy stays near the square-root
/// cancellation scale `N^{d/2}` for d = 2.
pub fn c06_sqrt_cancellation_trend(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let (n_forms, t_samples): (u64, usize) = match level {
        VerifyLevel::Fast => (8, 256),
        VerifyLevel::Full => (30, 512),
    };
    let ns = [16u64, 32, 64, 128];
    let phi = CutoffSpec::smooth();
    let mut means = Vec::new();
    for &n in &ns {
        let total: f64 = (0..n_forms)
            .into_par_iter()
            .map(|i| -> Result<f64, Error> {
                let form = GenericSampler::new(5150, SamplerFamily::Rectangular, 2).form_at(i);
                let p = weyl::WeylParams::new(n, phi, &form)?;
                weyl::time_average_sup(&p, 1.0, t_samples, weyl::SupProxyMode::Upper)
            })
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        means.push(total / n_forms as f64);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let slope = ls_slope(&xs, &ys);
    let passed = (0.8..=1.6).contains(&slope);
    let details = format!(
        "d=2, {n_forms} forms, N ∈ {ns:?}: averaged upper proxy ~ N^{slope:.3} \
         (band [0.8, 1.6] around d/2 = 1); means {means:?}"
    );
    Ok(finish(6, "square-root cancellation trend", false, passed, details, start))
}

/// Subdeterminants and singular values stay within the explicit binomial
/// band, and the exact integer path matches the floating path.
pub fn c07_sigma_d_correspondence(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let per_shape: u64 = match level {
        VerifyLevel::Fast => 100,
        VerifyLevel::Full => 1000,
    };
    let shapes: Vec<(usize, usize)> = (2..=6usize)
        .flat_map(|p| (p..=8usize).map(move |q| (p, q)))
        .collect();
    let failures: Vec<String> = shapes
        .par_iter()
        .map(|&(p, q)| -> Result<Option<String>, Error> {
            for i in 0..per_shape {
                let mut rng = rng_at(31337, (p * 100 + q) as u64, i);
                let m: Vec<Vec<i64>> = (0..p)
                    .map(|_| (0..q).map(|_| rng.gen_range(-9..=9)).collect())
                    .collect();
                let prof = subdet::SubdetProfile::of_int(&m)?;
                if !prof.corollary_band_ok() {
                    return Ok(Some(format!("band violated at ({p},{q}) #{i}")));
                }
                let fm = nalgebra::DMatrix::from_fn(p, q, |r, c| m[r][c] as f64);
                for k in 1..=p.min(q) {
                    let float = subdet::max_subdet_f64(&fm, k)?;
                    let exact = prof.d[k - 1];
                    if (float - exact).abs() > 1e-6 * exact.max(1.0) {
                        return Ok(Some(format!(
                            "paths disagree at ({p},{q}) #{i} k={k}: {float} vs {exact}"
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let passed = failures.is_empty();
    let details = if passed {
        format!(
            "{} shapes × {per_shape} matrices: binomial band holds, exact/float agree to 1e-6",
            shapes.len()
        )
    } else {
        failures.join("; ")
    };
    Ok(finish(7, "σ/D correspondence", false, passed, details, start))
}

/// Greedy column rearrangement achieves the guaranteed prefix constant,
/// and stays within it of the best order found exhaustively.
pub fn c08_column_rearrangement(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let (n_mats, n_exhaustive): (u64, u64) = match level {
        VerifyLevel::Fast => (200, 20),
        VerifyLevel::Full => (1000, 100),
    };
    let (p, q) = (4usize, 6usize);
    let c = subdet::rearrange_constant(p, q); // 1/360
    let failures: Vec<String> = (0..n_mats)
        .into_par_iter()
        .map(|i| -> Result<Option<String>, Error> {
            let mut rng = rng_at(808, 0, i);
            let m: Vec<Vec<i64>> = (0..p)
                .map(|_| (0..q).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let fm = nalgebra::DMatrix::from_fn(p, q, |r, c| m[r][c] as f64);
            let perm = subdet::rearrange_columns(&fm)?;
            let pm = subdet::permute_columns_int(&m, &perm);
            for k in 1..=p {
                let dk = subdet::max_subdet_int(&m, k)? as f64;
                let prefix = subdet::max_subdet_prefix_int(&pm, k, k)? as f64;
                if prefix < c * dk - 1e-9 {
                    return Ok(Some(format!(
                        "matrix #{i} k={k}: prefix {prefix} < c·D_k = {}",
                        c * dk
                    )));
                }
            }
            if i < n_exhaustive {
                // exhaustive search over all 720 column orders
                let mut best = vec![0i128; p];
                let mut order = [0usize, 1, 2, 3, 4, 5];
                permute_all(&mut order, &mut |perm: &[usize]| {
                    let cand = subdet::permute_columns_int(&m, perm);
                    for k in 1..=p {
                        best[k - 1] =
                            best[k - 1].max(subdet::max_subdet_prefix_int(&cand, k, k).unwrap());
                    }
                });
                for k in 1..=p {
                    let prefix = subdet::max_subdet_prefix_int(&pm, k, k)? as f64;
                    if prefix < c * best[k - 1] as f64 - 1e-9 {
                        return Ok(Some(format!(
                            "matrix #{i} k={k}: greedy {prefix} not within c of best {}",
                            best[k - 1]
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let passed = failures.is_empty();
    let details = if passed {
        format!(
            "{n_mats} random 4×6 matrices: prefix ≥ D_k/360 for all k; \
             {n_exhaustive} verified against all 720 orders"
        )
    } else {
        failures.join("; ")
    };
    Ok(finish(8, "column rearrangement", false, passed, details, start))
}

/// Heap's algorithm: visit every permutation of `items`.
fn permute_all(items: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Monte Carlo measure of the rescaled admissible-extension slice stays
/// within a fixed multiple of its subdeterminant bound.
pub fn c09_voli_volume(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let (n_mats, mc_samples): (u64, u64) = match level {
        VerifyLevel::Fast => (25, 10_000),
        VerifyLevel::Full => (100, 100_000),
    };
    let eps_pivot = 0.05;
    let results: Vec<Option<String>> = (0..n_mats)
        .into_par_iter()
        .map(|i| -> Result<Option<String>, Error> {
            // sample 3×2 integer matrices until the last-row pivot holds
            let mut chosen = None;
            for attempt in 0..200u64 {
                let mut rng = rng_at(909, i, attempt);
                let m: Vec<Vec<i64>> = (0..3)
                    .map(|_| (0..2).map(|_| rng.gen_range(-5..=5)).collect())
                    .collect();
                let fm = nalgebra::DMatrix::from_fn(3, 2, |r, c| m[r][c] as f64);
                let sigma = subdet::singular_values(&fm);
                if fm[(2, 0)] > eps_pivot * sigma[0] && sigma[1] > 0.3 {
                    chosen = Some(fm);
                    break;
                }
            }
            let Some(fm) = chosen else {
                return Ok(Some(format!("matrix #{i}: no admissible sample")));
            };
            let d2 = subdet::max_subdet_f64(&fm, 2)?;
            let r = 2.0 * d2.max(0.5);
            let q = subdet::SBoxQuery::new(fm.clone(), r, 2.0)?;
            let mu = [2.0, 1.0];
            let measure = subdet::voli_measure_mc(&q, &mu, 3.0, mc_samples, 7000 + i)?;
            let bound = subdet::voli_bound(&fm, r, 2.0, &mu, 3.0, eps_pivot)?;
            if measure > 50.0 * bound {
                return Ok(Some(format!(
                    "matrix #{i}: measure {measure:.2} > 50 × bound {bound:.2}"
                )));
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failures: Vec<String> = results.into_iter().flatten().collect();
    let passed = failures.is_empty();
    let details = if passed {
        format!("{n_mats} pivot-admissible 3×2 matrices, {mc_samples} MC samples each: 0 violations")
    } else {
        failures.join("; ")
    };
    Ok(finish(9, "volume bound for admissible slices", false, passed, details, start))
}

/// Monte Carlo moments stay below the dyadic maximum with one global
/// constant across all parameter cells.
pub fn c10_moment_inequality(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let samples: u64 = match level {
        VerifyLevel::Fast => 2000,
        VerifyLevel::Full => 10_000,
    };
    let mut worst: f64 = 0.0;
    let mut worst_cell = String::new();
    for d in [1usize, 2] {
        for b in [1usize, 2] {
            for lambda0 in [16u64, 32] {
                for delta in [1.0 / 16.0, 1.0 / 64.0] {
                    let lhs = count::moment_lhs(
                        d,
                        b,
                        lambda0,
                        delta,
                        SamplerFamily::Rectangular,
                        samples,
                        4242,
                    )?;
                    let (rhs, _arg) = count::moment_rhs_dyadic_max(d, b, lambda0, delta)?;
                    let logs = (lambda0 as f64).ln().powi((b * d + d) as i32);
                    let c = lhs.value / (logs * rhs);
                    if c > worst {
                        worst = c;
                        worst_cell = format!("d={d} b={b} λ₀={lambda0} δ={delta}");
                    }
                }
            }
        }
    }
    let passed = worst <= 100.0;
    let details = format!(
        "16 cells × {samples} samples: global constant C = {worst:.3} (≤ 100), worst at {worst_cell}"
    );
    Ok(finish(10, "moment inequality", false, passed, details, start))
}

/// Brute-force grid maximisation of the product formula reproduces the
/// closed-form dyadic maximum.
pub fn c11_maximization_consistency(_level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let mut worst: f64 = 0.0;
    let mut cells = 0u32;
    for d in 1..=3usize {
        for b in 1..=4usize {
            for lambda0 in [100.0f64, 1000.0] {
                for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
                    let grid = count::mathcal_f_grid_max(d, b, lambda0, delta)?;
                    let closed = count::maximized_bound_from(d, b, lambda0, delta, 1);
                    worst = worst.max((grid.ln() - closed.ln()).abs());
                    cells += 1;
                }
            }
        }
    }
    let passed = worst <= 1e-9;
    let details = format!(
        "{cells} cells: max |log grid − log closed-form| = {worst:.2e} (≤ 1e-9; \
         the formal b₂ = 0 term is excluded, no grid level realises it)"
    );
    Ok(finish(11, "maximization-procedure consistency", false, passed, details, start))
}

/// The moment-method bound at `b = d+1-a` reproduces the illustrative
/// special case exactly.
pub fn c12_moment_method_consistency(_level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let mut worst: f64 = 0.0;
    let mut cells = 0u32;
    for d in 2..=5usize {
        let a_min = (d as i64 - 1).div_euclid(2);
        for a in a_min..d as i64 {
            if a < 1 {
                continue;
            }
            let b = d + 1 - a as usize;
            for lambda in [100.0f64, 1000.0] {
                for t in [0.25, 0.5, 0.75] {
                    let delta = lambda.powf(-(a as f64) + t);
                    let sharp = bounds::moment_method_bound(d, b, lambda, delta, 0.01);
                    let (blunt, ok) = bounds::moment_method_special_case(d, a, lambda, delta, 0.01);
                    if !ok {
                        return Ok(finish(
                            12,
                            "moment-method consistency",
                            false,
                            false,
                            format!("window violated at d={d} a={a} λ={lambda} δ={delta}"),
                            start,
                        ));
                    }
                    worst = worst.max((sharp.ln() - blunt.ln()).abs());
                    cells += 1;
                }
            }
        }
    }
    let passed = worst <= 1e-12;
    let details =
        format!("{cells} grid points: max log-scale disagreement {worst:.2e} (≤ 1e-12)");
    Ok(finish(12, "moment-method consistency", false, passed, details, start))
}

/// Measured indicator norms for generic forms stay under the conjectured
/// envelope with a fixed constant, for at least 95% of samples.
pub fn c13_empirical_vs_conjecture(level: VerifyLevel) -> Result<CriterionResult, Error> {
    let start = std::time::Instant::now();
    let n_forms: u64 = match level {
        VerifyLevel::Fast => 15,
        VerifyLevel::Full => 50,
    };
    let outcomes: Vec<(bool, String)> = (0..n_forms)
        .into_par_iter()
        .map(|i| -> Result<(bool, String), Error> {
            let mut rng = rng_at(1313, 0, i);
            let family = if i % 2 == 0 {
                SamplerFamily::Rectangular
            } else {
                SamplerFamily::Full
            };
            let form = GenericSampler::new(99, family, 2).form_at(i);
            let lam_f = 100.0 + 1900.0 * rng.gen::<f64>();
            let del_f = lam_f.powf(-0.5);
            let q = ShellQuery::new(
                &form,
                rational_from_f64(lam_f),
                rational_from_f64(del_f),
            )?;
            let norm = lattice::shell_count(&q)? as f64;
            let envelope =
                20.0 * bounds::conjecture_generic_l1linf(2, lam_f, del_f, 0.01);
            let ok = norm <= envelope;
            let info = format!(
                "form {i} ({family:?}): λ={lam_f:.1} norm={norm} envelope={envelope:.1} β₁₁={}",
                form.coeff_f64(0, 0)
            );
            Ok((ok, info))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hits = outcomes.iter().filter(|(ok, _)| *ok).count();
    let rate = hits as f64 / n_forms as f64;
    let outliers: Vec<&String> = outcomes
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, s)| s)
        .collect();
    let passed = rate >= 0.95;
    let details = format!(
        "{hits}/{n_forms} sampled forms under 20·(1 + δλ^{{1.01}}); outliers: {}",
        if outliers.is_empty() {
            "none".to_string()
        } else {
            outliers
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(" | ")
        }
    );
    Ok(finish(13, "measured norm vs conjectured envelope", false, passed, details, start))
}
