//! Counting matrices with prescribed dyadic subdeterminants, and the
//! moment experiments built on those counts.
//!
//! The augmented matrix `P(M)` of a nonnegative integer matrix `M ∈ Z^{d×b}`
//! has the entrywise squares of `M` in its first `d` rows and the constant
//! row `λ₀²` at the bottom. `Z_{d,b}(μ, L)` counts the `M` whose entries
//! sit in the dyadic boxes `m_ij/μ_i ∈ [1/2, 1]` and whose augmented
//! subdeterminants satisfy `D_k(P(M))/(L_1…L_k) ∈ [1/2, 1]` for every `k`
//! up to `min(b, d+1)`.
//!
//! The moment side integrates the `b`-th power of the quadratic-window
//! shell norm over diagonal coefficients in `[1,2]^d` and `λ ∈ [λ₀/2, λ₀]`;
//! the dyadic side takes a maximum of `λ₀ Π_{L_i>δλ₀}(δλ₀/L_i) Z_{d,b}`
//! over admissible tuples. The closed-form outcome of maximising the
//! resulting product formula over the restricted grids
//! `L ∈ {δλ₀, 1, λ₀²}`, `μ ∈ {1, λ₀}` is
//! `max_{b₂} δ^{b₂} λ₀^{-b₂² + (b+d)b₂ + 1 - b}`, exposed by
//! [`maximized_bound`].

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use crate::cutoff::{CutoffKind, CutoffSpec};
use crate::error::Error;
use crate::lattice;
use crate::quadform::{QuadForm, SamplerFamily};
use crate::subdet::max_subdet_exact;
use crate::util::{rational_from_f64, rng_at};

/// A nonnegative integer matrix together with its squared augmentation.
#[derive(Debug, Clone)]
pub struct AugmentedMatrix {
    pub m: Vec<Vec<i64>>,
    pub lambda0: i64,
    /// `(d+1)×b`: rows `1..d` are entrywise squares of `m`, the last row
    /// is constant `λ₀²`.
    pub p: Vec<Vec<i128>>,
}

/// `P(M)`: entrywise squares over a constant `λ₀²` row.
pub fn build_p(m: &[Vec<i64>], lambda0: i64) -> Result<AugmentedMatrix, Error> {
    if lambda0 < 1 {
        return Err(Error::invalid("lambda0 must be a positive integer"));
    }
    let b = m.first().map(|r| r.len()).unwrap_or(0);
    for row in m {
        if row.len() != b {
            return Err(Error::invalid("ragged matrix"));
        }
        if row.iter().any(|&x| x < 0) {
            return Err(Error::invalid("entries must be nonnegative"));
        }
    }
    let mut p: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| (x as i128) * (x as i128)).collect())
        .collect();
    p.push(vec![(lambda0 as i128) * (lambda0 as i128); b]);
    Ok(AugmentedMatrix {
        m: m.to_vec(),
        lambda0,
        p,
    })
}

/// Parameters of a matrix count: dyadic entry sizes `μ` (nonincreasing,
/// between 1 and `λ₀`) and dyadic subdeterminant levels `L` (nonincreasing,
/// each zero or a power of two, one per `k ≤ min(b, d+1)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixCountQuery {
    pub d: usize,
    pub b: usize,
    pub lambda0: i64,
    pub mu: Vec<u64>,
    pub l: Vec<u64>,
}

impl MatrixCountQuery {
    pub fn new(d: usize, b: usize, lambda0: i64, mu: Vec<u64>, l: Vec<u64>) -> Result<Self, Error> {
        if b < 1 || lambda0 < 1 {
            return Err(Error::invalid("need b >= 1 and lambda0 >= 1"));
        }
        if mu.len() != d {
            return Err(Error::invalid(format!("mu must have d = {d} entries")));
        }
        if mu
            .iter()
            .any(|&m| !m.is_power_of_two() || m as i64 > lambda0)
        {
            return Err(Error::invalid("each mu_i must be a power of two <= lambda0"));
        }
        if mu.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("mu must be nonincreasing"));
        }
        let expected_l = b.min(d + 1);
        if l.len() != expected_l {
            return Err(Error::invalid(format!(
                "L must have min(b, d+1) = {expected_l} entries"
            )));
        }
        if l.iter().any(|&v| v != 0 && !v.is_power_of_two()) {
            return Err(Error::invalid("each L_k must be zero or a power of two"));
        }
        if l.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("L must be nonincreasing"));
        }
        Ok(MatrixCountQuery { d, b, lambda0, mu, l })
    }
}

/// Does `value/level ∈ [1/2, 1]` in exact integers, with `level = 0`
/// matched only by `value = 0`?
fn dyadic_match(value: i128, level: i128) -> bool {
    if level == 0 {
        value == 0
    } else {
        2 * value >= level && value <= level
    }
}

/// Exact count of matrices with the prescribed dyadic boxes and augmented
/// subdeterminants. Enumeration proceeds column by column; a prefix whose
/// `D_k` already exceeds the allowed level is pruned (appending columns
/// can only grow a maximal subdeterminant).
pub fn z_count(q: &MatrixCountQuery) -> Result<u128, Error> {
    let d = q.d;
    let b = q.b;
    let kmax = b.min(d + 1);
    // column value ranges
    let ranges: Vec<Vec<i64>> = q
        .mu
        .iter()
        .map(|&mu| ((mu as i64 + 1) / 2..=mu as i64).collect())
        .collect();
    let per_col: u128 = ranges.iter().map(|r| r.len() as u128).product();
    let total = per_col.saturating_pow(b as u32);
    let budget = crate::enumeration_budget() as u128;
    if total > budget {
        return Err(Error::BudgetExceeded {
            needed: total.min(u64::MAX as u128) as u64,
            budget: budget as u64,
        });
    }
    let levels: Vec<i128> = {
        let mut acc = 1i128;
        let mut out = Vec::with_capacity(q.l.len());
        for &v in &q.l {
            acc = acc
                .checked_mul(v as i128)
                .ok_or_else(|| Error::invalid("dyadic level product overflows"))?;
            out.push(acc);
        }
        out
    };
    // column ordering is immaterial: the count is over full matrices
    let mut p = vec![vec![0i128; b]; d + 1];
    let lam2 = (q.lambda0 as i128) * (q.lambda0 as i128);
    for j in 0..b {
        p[d][j] = lam2;
    }

    fn rec(
        col: usize,
        b: usize,
        d: usize,
        kmax: usize,
        ranges: &[Vec<i64>],
        levels: &[i128],
        p: &mut Vec<Vec<i128>>,
        count: &mut u128,
    ) -> Result<(), Error> {
        if col == b {
            // full matrix: verify both sides of every dyadic condition
            let prefix: Vec<Vec<i128>> = p.to_vec();
            for k in 1..=kmax {
                let dk = max_subdet_exact(&prefix, k)?;
                if !dyadic_match(dk, levels[k - 1]) {
                    return Ok(());
                }
            }
            *count += 1;
            return Ok(());
        }
        let mut stack = vec![0usize; d];
        let mut level = 0usize;
        loop {
            if level == d {
                // upper-side prune on the filled prefix
                let prefix: Vec<Vec<i128>> =
                    p.iter().map(|row| row[..=col].to_vec()).collect();
                let mut ok = true;
                for k in 1..=kmax.min(col + 1) {
                    if max_subdet_exact(&prefix, k)? > levels[k - 1] {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    rec(col + 1, b, d, kmax, ranges, levels, p, count)?;
                }
                // backtrack to advance the deepest coordinate
                level -= 1;
                stack[level] += 1;
            }
            loop {
                if stack[level] < ranges[level].len() {
                    let v = ranges[level][stack[level]];
                    p[level][col] = (v as i128) * (v as i128);
                    level += 1;
                    if level < d {
                        stack[level] = 0;
                    }
                    break;
                }
                if level == 0 {
                    return Ok(());
                }
                level -= 1;
                stack[level] += 1;
            }
        }
    }

    let mut count = 0u128;
    if d == 0 {
        // only the empty matrix; conditions reduce to D_k of the λ₀² row
        let prefix = vec![vec![lam2; b]];
        let mut ok = true;
        for k in 1..=kmax {
            let dk = max_subdet_exact(&prefix, k)?;
            if !dyadic_match(dk, levels[k - 1]) {
                ok = false;
            }
        }
        return Ok(if ok { 1 } else { 0 });
    }
    rec(0, b, d, kmax, &ranges, &levels, &mut p, &mut count)?;
    Ok(count)
}

/// Shell norm in the quadratic window: `Σ_m χ((Q(m) − λ²)/(δλ))`. With the
/// indicator cutoff this is the exact count of `λ² − δλ ≤ Q(m) < λ² + δλ`.
pub fn sharp_norm(
    form: &QuadForm,
    lambda: &BigRational,
    delta: &BigRational,
    cutoff: &CutoffSpec,
) -> Result<f64, Error> {
    let lam2 = lambda * lambda;
    let w = delta * lambda;
    let lo = &lam2 - &w;
    let hi = &lam2 + &w;
    match cutoff.kind {
        CutoffKind::Indicator => {
            let hi_count = lattice::count_below_sq(form, &hi)?;
            let lo_count = lattice::count_below_sq(form, &lo)?;
            Ok((hi_count - lo_count) as f64)
        }
        CutoffKind::SmoothPlateau => {
            let lam2_f = lam2.to_f64().unwrap();
            let w_f = w.to_f64().unwrap();
            let mut sum = 0.0;
            lattice::for_each_in_q_window(form, &lo, &hi, |_, qf| {
                sum += cutoff.eval((qf - lam2_f) / w_f);
            })?;
            Ok(sum)
        }
    }
}

use num_traits::ToPrimitive;

/// Monte Carlo estimate of a shell-norm moment.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub b: usize,
    pub delta: f64,
    pub lambda0: f64,
}

/// Monte Carlo estimate of
/// `∫_{[1,2]^d} ∫_{λ₀/2}^{λ₀} (shell norm)^b dλ dβ'`,
/// sampling diagonal coefficients uniformly (the full family keeps one
/// fixed off-diagonal draw and varies the diagonal). The indicator norm is
/// used throughout; the region volume `λ₀/2` scales the sample mean.
pub fn moment_lhs(
    d: usize,
    b: usize,
    lambda0: u64,
    delta: f64,
    family: SamplerFamily,
    samples: u64,
    seed: u64,
) -> Result<MomentEstimate, Error> {
    if samples < 1 {
        return Err(Error::invalid("need at least one sample"));
    }
    let delta_rat = rational_from_f64(delta);
    // one fixed off-diagonal draw for the full family
    let offdiag = match family {
        SamplerFamily::Rectangular => None,
        SamplerFamily::Full => {
            let mut rng = rng_at(seed, 0x0FFD, 0);
            let hw = 1.0 / (10.0 * (d * d) as f64);
            let mut h = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in i + 1..d {
                    let v = (2.0 * rng.gen::<f64>() - 1.0) * hw;
                    h[i][j] = v;
                    h[j][i] = v;
                }
            }
            Some(h)
        }
    };
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64, Error> {
            let mut rng = rng_at(seed, 0x307E, i);
            let mut coeffs = vec![vec![0.0; d]; d];
            for r in 0..d {
                coeffs[r][r] = 1.0 + rng.gen::<f64>();
            }
            if let Some(h) = &offdiag {
                for r in 0..d {
                    for c in 0..d {
                        if r != c {
                            coeffs[r][c] = h[r][c];
                        }
                    }
                }
            }
            let form = QuadForm::from_f64_matrix(&coeffs)?;
            let lam = lambda0 as f64 * (0.5 + 0.5 * rng.gen::<f64>());
            let norm = sharp_norm(
                &form,
                &rational_from_f64(lam),
                &delta_rat,
                &CutoffSpec::indicator(),
            )?;
            Ok(norm.powi(b as i32))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let region = lambda0 as f64 / 2.0;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n.max(2.0);
    Ok(MomentEstimate {
        value: mean * region,
        stderr: (var / n).sqrt() * region,
        samples,
        b,
        delta,
        lambda0: lambda0 as f64,
    })
}

/// Empirical quantiles of the indicator shell norm over coefficient
/// samples (λ fixed at `λ₀`). This is the observable standing in for an
/// almost-sure statement: instead of transferring the moment bound to a
/// full-measure set of coefficients, the distribution of the norm itself
/// is reported.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormQuantiles {
    pub samples: u64,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

/// Sample `‖P_{λ₀,δ}‖` (indicator cutoff, quadratic window) over random
/// coefficients from the chosen family and report its quantiles.
pub fn shell_norm_quantiles(
    d: usize,
    lambda0: u64,
    delta: f64,
    family: SamplerFamily,
    samples: u64,
    seed: u64,
) -> Result<NormQuantiles, Error> {
    if samples < 1 {
        return Err(Error::invalid("need at least one sample"));
    }
    let delta_rat = rational_from_f64(delta);
    let lam_rat = rational_from_f64(lambda0 as f64);
    let mut values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64, Error> {
            let form = crate::quadform::GenericSampler::new(seed, family, d).form_at(i);
            sharp_norm(&form, &lam_rat, &delta_rat, &CutoffSpec::indicator())
        })
        .collect::<Result<Vec<_>, _>>()?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let at = |q: f64| values[((values.len() - 1) as f64 * q).round() as usize];
    Ok(NormQuantiles {
        samples,
        median: at(0.5),
        p90: at(0.9),
        p99: at(0.99),
        max: *values.last().unwrap(),
    })
}

/// The tuple attaining the dyadic maximum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RhsArgmax {
    pub d_eff: usize,
    pub mu: Vec<u64>,
    pub l: Vec<u64>,
    pub z: u128,
}

fn nonincreasing_tuples(values: &[u64], len: usize) -> Vec<Vec<u64>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    'outer: loop {
        let tuple: Vec<u64> = cur.iter().map(|&i| values[i]).collect();
        if tuple.windows(2).all(|w| w[0] >= w[1]) {
            out.push(tuple);
        }
        for i in (0..len).rev() {
            cur[i] += 1;
            if cur[i] < values.len() {
                continue 'outer;
            }
            cur[i] = 0;
        }
        break;
    }
    out
}

/// Exhaustive search of `λ₀ · Π_{L_i > δλ₀} (δλ₀/L_i) · Z_{d',b}(μ, L)`
/// over dyadic tuples, including the dimension drops `d' < d` that stand
/// in for vanishing `μ_i`. Returns the maximum and its attaining tuple.
pub fn moment_rhs_dyadic_max(
    d: usize,
    b: usize,
    lambda0: u64,
    delta: f64,
) -> Result<(f64, RhsArgmax), Error> {
    let lam2 = (lambda0 as i64) * (lambda0 as i64);
    let dl = delta * lambda0 as f64;
    // L_1 stays within a dyadic step of λ₀²; deeper levels range over all
    // dyadic scales up to 2λ₀², plus the exact-zero level
    let l1_choices: Vec<u64> = [lam2 as u64 / 2, lam2 as u64, 2 * lam2 as u64]
        .into_iter()
        .filter(|&v| v >= 1)
        .collect();
    let mut l_scale: Vec<u64> = vec![0];
    let mut v = 1u64;
    while v <= 2 * lam2 as u64 {
        l_scale.push(v);
        v *= 2;
    }
    let mut mu_scale: Vec<u64> = Vec::new();
    let mut m = 1u64;
    while m <= lambda0 {
        mu_scale.push(m);
        m *= 2;
    }

    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let mut tuples = 0u64;
    for d_eff in 0..=d {
        let kmax = b.min(d_eff + 1);
        let mu_tuples = nonincreasing_tuples(&mu_scale, d_eff);
        let tail_tuples = nonincreasing_tuples(&l_scale, kmax - 1);
        for mu in &mu_tuples {
            for l1 in &l1_choices {
                for tail in &tail_tuples {
                    if tail.first().is_some_and(|&t| t > *l1) {
                        continue;
                    }
                    tuples += 1;
                    if tuples > 100_000 {
                        return Err(Error::BudgetExceeded {
                            needed: tuples,
                            budget: 100_000,
                        });
                    }
                    let mut l = vec![*l1];
                    l.extend_from_slice(tail);
                    let q = MatrixCountQuery::new(d_eff, b, lambda0 as i64, mu.clone(), l.clone())?;
                    let z = z_count(&q)?;
                    if z == 0 {
                        continue;
                    }
                    let mut val = lambda0 as f64 * z as f64;
                    for &li in &l {
                        if li as f64 > dl {
                            val *= dl / li as f64;
                        }
                    }
                    if val > best {
                        best = val;
                        arg = Some(RhsArgmax {
                            d_eff,
                            mu: mu.clone(),
                            l,
                            z,
                        });
                    }
                }
            }
        }
    }
    let arg = arg.unwrap_or(RhsArgmax {
        d_eff: 0,
        mu: vec![],
        l: vec![],
        z: 0,
    });
    Ok((best.max(0.0), arg))
}

/// `max_{b2_min ≤ b₂ ≤ min(b,d+1)} δ^{b₂} λ₀^{-b₂² + (b+d)b₂ + 1 - b}`.
///
/// The `b₂ = 0` term `λ₀^{1-b}` is a formal relaxation: no grid assignment
/// realises it because the first dyadic level is pinned near `λ₀²`,
/// forcing `b₂ ≥ 1`. Callers comparing against grid maxima should use
/// `b2_min = 1` via [`maximized_bound_from`].
pub fn maximized_bound(d: usize, b: usize, lambda0: f64, delta: f64) -> f64 {
    maximized_bound_from(d, b, lambda0, delta, 0)
}

/// Same maximum restricted to `b₂ ≥ b2_min`.
pub fn maximized_bound_from(d: usize, b: usize, lambda0: f64, delta: f64, b2_min: usize) -> f64 {
    let top = b.min(d + 1);
    let mut best = f64::NEG_INFINITY;
    for b2 in b2_min..=top {
        let b2f = b2 as f64;
        let expo = -b2f * b2f + (b + d) as f64 * b2f + 1.0 - b as f64;
        best = best.max(delta.powf(b2f) * lambda0.powf(expo));
    }
    best
}

/// The product formula maximised by the dyadic search:
///
/// ```text
/// F = λ₀ · Π_{L_i > δλ₀} (δλ₀/L_i) · Π_i μ_i
///       · Π_{k=1}^{min(b-1,d)}   Π_{i∈I_k} μ_i · [cap_i/μ_i² if μ_i² > cap_i],
///         cap_i = max(L_{σ_k(i)+1}, L_{k+1})
///       · Π_{k=min(b,d+1)}^{b-1} Π_{i∈I_k} μ_i · [L_{σ_k(i)+1}/μ_i² if exceeded]
/// ```
///
/// with `L_j = 0` beyond the provided vector and empty products equal to 1.
/// `i_sets[k-1]` lists the indices (1-based) of `I_k`, and `sigmas[k-1]`
/// their images under the injection `σ_k`.
pub fn mathcal_f(
    l: &[f64],
    mu: &[f64],
    i_sets: &[Vec<usize>],
    sigmas: &[Vec<usize>],
    d: usize,
    b: usize,
    lambda0: f64,
    delta: f64,
) -> Result<f64, Error> {
    if mu.len() != d {
        return Err(Error::invalid("mu must have d entries"));
    }
    if l.len() != b.min(d + 1) {
        return Err(Error::invalid("L must have min(b, d+1) entries"));
    }
    if i_sets.len() != b - 1 || sigmas.len() != b - 1 {
        return Err(Error::invalid("need b-1 index sets and injections"));
    }
    let l_at = |j: usize| -> f64 {
        if j >= 1 && j <= l.len() {
            l[j - 1]
        } else {
            0.0
        }
    };
    let dl = delta * lambda0;
    let mut v = lambda0;
    for i in 1..=b.min(d + 1) {
        if l_at(i) > dl {
            v *= dl / l_at(i);
        }
    }
    for &m in mu {
        v *= m;
    }
    for k in 1..=b - 1 {
        let iset = &i_sets[k - 1];
        let sigma = &sigmas[k - 1];
        if sigma.len() != iset.len() {
            return Err(Error::invalid("sigma_k must match I_k in length"));
        }
        let mut seen = vec![false; d + 1];
        for &img in sigma {
            if img < 1 || img > d || seen[img] {
                return Err(Error::invalid("sigma_k must inject into 1..=d"));
            }
            seen[img] = true;
        }
        for (&i, &img) in iset.iter().zip(sigma) {
            if i < 1 || i > d {
                return Err(Error::invalid("I_k indices must lie in 1..=d"));
            }
            let mui = mu[i - 1];
            v *= mui;
            let cap = if k <= (b - 1).min(d) {
                l_at(img + 1).max(l_at(k + 1))
            } else {
                l_at(img + 1)
            };
            if mui * mui > cap {
                v *= cap / (mui * mui);
            }
        }
    }
    Ok(v)
}

/// Brute-force maximum of [`mathcal_f`] over the restricted grids
/// `L_1 = λ₀²`, `L_i ∈ {δλ₀, 1, λ₀²}` nonincreasing, `μ_i ∈ {1, λ₀}`
/// nonincreasing, and all `(I_k, σ_k)`. The per-`k` factors are
/// independent once `(L, μ)` is fixed, so each is maximised separately;
/// this equals the full product maximum.
pub fn mathcal_f_grid_max(d: usize, b: usize, lambda0: f64, delta: f64) -> Result<f64, Error> {
    let lam2 = lambda0 * lambda0;
    let dl = delta * lambda0;
    let kmax = b.min(d + 1);
    let l_values = [dl, 1.0, lam2];
    // all nonincreasing L with L_1 = λ₀²
    let mut l_tuples: Vec<Vec<f64>> = vec![vec![lam2]];
    for _ in 1..kmax {
        let mut next = Vec::new();
        for t in &l_tuples {
            for &v in &l_values {
                if v <= *t.last().unwrap() {
                    let mut t2 = t.clone();
                    t2.push(v);
                    next.push(t2);
                }
            }
        }
        l_tuples = next;
    }
    // nonincreasing μ ∈ {1, λ₀}^d: λ₀ repeated j times then ones
    let mu_tuples: Vec<Vec<f64>> = (0..=d)
        .map(|j| {
            (0..d)
                .map(|i| if i < j { lambda0 } else { 1.0 })
                .collect()
        })
        .collect();

    // arrangements (I, σ) of every size over 1..=d
    let mut arrangements: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![], vec![])];
    {
        let mut frontier = arrangements.clone();
        for _ in 0..d {
            let mut next = Vec::new();
            for (iset, sigma) in &frontier {
                let last = iset.last().copied().unwrap_or(0);
                for i in last + 1..=d {
                    for img in 1..=d {
                        if !sigma.contains(&img) {
                            let mut i2 = iset.clone();
                            let mut s2 = sigma.clone();
                            i2.push(i);
                            s2.push(img);
                            next.push((i2, s2));
                        }
                    }
                }
            }
            arrangements.extend(next.iter().cloned());
            frontier = next;
        }
    }

    let mut best = f64::NEG_INFINITY;
    for l in &l_tuples {
        let l_at = |j: usize| -> f64 {
            if j >= 1 && j <= l.len() {
                l[j - 1]
            } else {
                0.0
            }
        };
        for mu in &mu_tuples {
            let mut base = lambda0;
            for i in 1..=kmax {
                if l_at(i) > dl {
                    base *= dl / l_at(i);
                }
            }
            for &m in mu {
                base *= m;
            }
            for k in 1..=b - 1 {
                let mut k_best = 1.0f64; // empty I_k
                for (iset, sigma) in &arrangements {
                    let mut f = 1.0;
                    for (&i, &img) in iset.iter().zip(sigma) {
                        let mui = mu[i - 1];
                        f *= mui;
                        let cap = if k <= (b - 1).min(d) {
                            l_at(img + 1).max(l_at(k + 1))
                        } else {
                            l_at(img + 1)
                        };
                        if mui * mui > cap {
                            f *= cap / (mui * mui);
                        }
                    }
                    k_best = k_best.max(f);
                }
                base *= k_best;
            }
            best = best.max(base);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn build_p_examples() {
        let p = build_p(&[vec![1]], 2).unwrap();
        assert_eq!(p.p, vec![vec![1], vec![4]]);

        let p = build_p(&[vec![2, 3]], 3).unwrap();
        assert_eq!(p.p, vec![vec![4, 9], vec![9, 9]]);

        assert!(build_p(&[vec![-1]], 2).is_err());
    }

    #[test]
    fn d1_of_augmented_matrix_is_lambda0_squared() {
        // entries never exceed λ₀, so the λ₀² row dominates
        let p = build_p(&[vec![3, 7], vec![1, 5]], 8).unwrap();
        let d1 = max_subdet_exact(&p.p, 1).unwrap();
        assert_eq!(d1, 64);
    }

    #[test]
    fn z_count_one_by_one_example() {
        // m in {1,2}: D_1 = max(m², 16) = 16, so both qualify at L = 16
        let q = MatrixCountQuery::new(1, 1, 4, vec![2], vec![16]).unwrap();
        assert_eq!(z_count(&q).unwrap(), 2);
    }

    #[test]
    fn z_count_impossible_level() {
        // D_1 is pinned near λ₀² = 16, far above L_1 = 1
        let q = MatrixCountQuery::new(1, 1, 4, vec![2], vec![1]).unwrap();
        assert_eq!(z_count(&q).unwrap(), 0);
    }

    #[test]
    fn z_count_loose_conditions_give_raw_box_count() {
        // with b = 1 the only condition pins D_1 = λ₀², so every matrix in
        // the dyadic box qualifies
        for (d, mu) in [(1usize, vec![8u64]), (2, vec![8, 4]), (3, vec![4, 2, 2])] {
            let lam2 = 64;
            let q = MatrixCountQuery::new(d, 1, 8, mu.clone(), vec![lam2]).unwrap();
            let expect: u128 = mu.iter().map(|&m| (m / 2 + 1) as u128).product();
            assert_eq!(z_count(&q).unwrap(), expect, "d={d}");
        }
    }

    #[test]
    fn z_count_matches_reversed_enumeration_oracle() {
        // independent re-count with the entry odometer run in the opposite
        // order over a full materialisation
        fn oracle(q: &MatrixCountQuery) -> u128 {
            let d = q.d;
            let b = q.b;
            let kmax = b.min(d + 1);
            let ranges: Vec<Vec<i64>> = q
                .mu
                .iter()
                .map(|&mu| ((mu as i64 + 1) / 2..=mu as i64).rev().collect())
                .collect();
            let mut idx = vec![0usize; d * b];
            let mut count = 0u128;
            'outer: loop {
                let m: Vec<Vec<i64>> = (0..d)
                    .map(|r| (0..b).map(|c| ranges[r][idx[r * b + c]]).collect())
                    .collect();
                let p = build_p(&m, q.lambda0).unwrap();
                let mut ok = true;
                let mut lev = 1i128;
                for k in 1..=kmax {
                    lev = lev.saturating_mul(q.l[k - 1] as i128);
                    let dk = max_subdet_exact(&p.p, k).unwrap();
                    if !dyadic_match(dk, lev) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    count += 1;
                }
                for slot in (0..d * b).rev() {
                    idx[slot] += 1;
                    if idx[slot] < ranges[slot / b].len() {
                        continue 'outer;
                    }
                    idx[slot] = 0;
                }
                return count;
            }
        }
        let q = MatrixCountQuery::new(2, 2, 8, vec![8, 4], vec![64, 16]).unwrap();
        let fast = z_count(&q).unwrap();
        assert_eq!(fast, oracle(&q));
        assert!(fast > 0, "feasible tuple should have matches");

        let q2 = MatrixCountQuery::new(2, 2, 8, vec![4, 2], vec![64, 4]).unwrap();
        assert_eq!(z_count(&q2).unwrap(), oracle(&q2));
    }

    #[test]
    fn z_count_dimension_zero() {
        // d = 0 leaves the single empty matrix; P is the row (16, 16)
        let q = MatrixCountQuery::new(0, 2, 4, vec![], vec![16]).unwrap();
        assert_eq!(z_count(&q).unwrap(), 1);
        let q = MatrixCountQuery::new(0, 2, 4, vec![], vec![64]).unwrap();
        assert_eq!(z_count(&q).unwrap(), 0);
    }

    #[test]
    fn sharp_norm_indicator_example() {
        // |m|² ∈ [24, 26) leaves exactly the 12 representations of 25
        let form = QuadForm::identity(2);
        let v = sharp_norm(&form, &rat("5"), &rat("0.2"), &CutoffSpec::indicator()).unwrap();
        assert_eq!(v, 12.0);
    }

    #[test]
    fn sharp_norm_monotone_in_delta() {
        let form = QuadForm::identity(2);
        let mut prev = 0.0;
        for ds in ["0.1", "0.2", "0.4", "0.8"] {
            let v = sharp_norm(&form, &rat("5"), &rat(ds), &CutoffSpec::indicator()).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sharp_norm_smooth_bounded_by_indicator() {
        let form = QuadForm::identity(2);
        let ind = sharp_norm(&form, &rat("5"), &rat("0.3"), &CutoffSpec::indicator()).unwrap();
        let smo = sharp_norm(&form, &rat("5"), &rat("0.3"), &CutoffSpec::smooth()).unwrap();
        assert!(smo <= ind + 1e-12);
    }

    #[test]
    fn moment_lhs_deterministic_and_converging() {
        let a = moment_lhs(2, 2, 32, 1.0 / 32.0, SamplerFamily::Rectangular, 400, 7).unwrap();
        let b = moment_lhs(2, 2, 32, 1.0 / 32.0, SamplerFamily::Rectangular, 400, 7).unwrap();
        assert_eq!(a.value, b.value, "same seed, same estimate");
        assert_eq!(a.stderr, b.stderr);

        let big = moment_lhs(2, 2, 32, 1.0 / 32.0, SamplerFamily::Rectangular, 1600, 7).unwrap();
        assert!(
            big.stderr <= 0.75 * a.stderr,
            "stderr shrinks with samples: {} vs {}",
            big.stderr,
            a.stderr
        );
    }

    #[test]
    fn moment_lhs_b1_matches_quadrature_d1() {
        // direct tensor quadrature over (β, λ) for d = 1, b = 1
        let lambda0 = 16u64;
        let delta = 0.25;
        let mc = moment_lhs(1, 1, lambda0, delta, SamplerFamily::Rectangular, 6000, 3).unwrap();
        let grid = 240;
        let mut acc = 0.0;
        for i in 0..grid {
            let beta = 1.0 + (i as f64 + 0.5) / grid as f64;
            let form = QuadForm::from_f64_matrix(&[vec![beta]]).unwrap();
            for j in 0..grid {
                let lam = lambda0 as f64 * (0.5 + 0.5 * (j as f64 + 0.5) / grid as f64);
                acc += sharp_norm(
                    &form,
                    &rational_from_f64(lam),
                    &rational_from_f64(delta),
                    &CutoffSpec::indicator(),
                )
                .unwrap();
            }
        }
        let quad = acc / (grid * grid) as f64 * (lambda0 as f64 / 2.0);
        assert!(
            (mc.value - quad).abs() <= 4.0 * mc.stderr + 0.05 * quad + 0.02,
            "mc {} ± {} vs quadrature {}",
            mc.value,
            mc.stderr,
            quad
        );
    }

    #[test]
    fn norm_quantiles_are_ordered_and_deterministic() {
        let q1 = shell_norm_quantiles(2, 32, 0.05, SamplerFamily::Rectangular, 300, 5).unwrap();
        let q2 = shell_norm_quantiles(2, 32, 0.05, SamplerFamily::Rectangular, 300, 5).unwrap();
        assert_eq!(q1.median, q2.median);
        assert!(q1.median <= q1.p90 && q1.p90 <= q1.p99 && q1.p99 <= q1.max);
        assert!(q1.max > 0.0);
    }

    #[test]
    fn rhs_dyadic_max_is_a_maximum() {
        let (best, arg) = moment_rhs_dyadic_max(1, 1, 8, 0.125).unwrap();
        assert!(best.is_finite() && best > 0.0);
        assert!(arg.z > 0);
        // any single evaluation is dominated
        let q = MatrixCountQuery::new(1, 1, 8, vec![8], vec![64]).unwrap();
        let z = z_count(&q).unwrap();
        let dl = 0.125 * 8.0;
        let mut single = 8.0 * z as f64;
        if 64.0 > dl {
            single *= dl / 64.0;
        }
        assert!(best >= single - 1e-12);
    }

    #[test]
    fn maximized_bound_terms() {
        // d=2, b=3, λ₀=100, δ=0.01: max over b₂ ∈ {0..3}
        let (d, b, lam, del) = (2usize, 3usize, 100.0f64, 0.01f64);
        let mut expect = f64::NEG_INFINITY;
        for b2 in 0..=3 {
            let e = -(b2 as f64) * (b2 as f64) + 5.0 * b2 as f64 - 2.0;
            expect = expect.max(del.powi(b2) * lam.powf(e));
        }
        assert!((maximized_bound(d, b, lam, del) - expect).abs() <= 1e-12 * expect);

        // b₂ = 0 term is λ₀^{1-b}
        assert!(maximized_bound(2, 1, 100.0, 1e-9) >= 1.0);

        // monotone nondecreasing in δ
        let mut prev = 0.0;
        for i in 1..=20 {
            let v = maximized_bound(2, 3, 50.0, i as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mathcal_f_empty_sets() {
        // all I_k empty and every L_i at most δλ₀: F = λ₀ Π μ_i
        let v = mathcal_f(
            &[0.5, 0.5, 0.5],
            &[4.0, 2.0],
            &[vec![], vec![]],
            &[vec![], vec![]],
            2,
            3,
            10.0,
            0.25,
        )
        .unwrap();
        assert!((v - 10.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn mathcal_f_single_set_with_cap() {
        // one active index with μ² above the cap picks up cap/μ²
        let lam = 10.0;
        let l = [lam * lam, 4.0];
        let mu = [8.0, 1.0];
        let v = mathcal_f(&l, &mu, &[vec![1]], &[vec![1]], 2, 2, lam, 0.001).unwrap();
        // base: λ₀ (δλ₀/L₁)(δλ₀/L₂) μ₁μ₂ = 10·(0.01/100)(0.01/4)·8
        // k=1 factor: μ₁ · max(L₂, L₂)/μ₁² = 8 · 4/64
        let base = 10.0 * (0.01 / 100.0) * (0.01 / 4.0) * 8.0;
        let factor = 8.0 * (4.0 / 64.0);
        assert!((v - base * factor).abs() <= 1e-15 * v.abs().max(1.0));
    }

    #[test]
    fn mathcal_f_validates_injections() {
        assert!(mathcal_f(&[1.0], &[1.0], &[vec![1]], &[vec![2]], 1, 2, 4.0, 0.1).is_err());
        assert!(mathcal_f(&[1.0], &[1.0], &[vec![1]], &[vec![]], 1, 2, 4.0, 0.1).is_err());
    }

    #[test]
    fn grid_max_factoring_matches_full_odometer() {
        // validate the per-k factoring against a full joint enumeration
        fn full_odometer_max(d: usize, b: usize, lambda0: f64, delta: f64) -> f64 {
            let lam2 = lambda0 * lambda0;
            let dl = delta * lambda0;
            let kmax = b.min(d + 1);
            let mut l_tuples: Vec<Vec<f64>> = vec![vec![lam2]];
            for _ in 1..kmax {
                let mut next = Vec::new();
                for t in &l_tuples {
                    for &v in &[dl, 1.0, lam2] {
                        if v <= *t.last().unwrap() {
                            let mut t2 = t.clone();
                            t2.push(v);
                            next.push(t2);
                        }
                    }
                }
                l_tuples = next;
            }
            let mu_tuples: Vec<Vec<f64>> = (0..=d)
                .map(|j| (0..d).map(|i| if i < j { lambda0 } else { 1.0 }).collect())
                .collect();
            let mut arrangements: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![], vec![])];
            {
                let mut frontier = arrangements.clone();
                for _ in 0..d {
                    let mut next = Vec::new();
                    for (iset, sigma) in &frontier {
                        let last = iset.last().copied().unwrap_or(0);
                        for i in last + 1..=d {
                            for img in 1..=d {
                                if !sigma.contains(&img) {
                                    let mut i2 = iset.clone();
                                    let mut s2 = sigma.clone();
                                    i2.push(i);
                                    s2.push(img);
                                    next.push((i2, s2));
                                }
                            }
                        }
                    }
                    arrangements.extend(next.iter().cloned());
                    frontier = next;
                }
            }
            let mut best = f64::NEG_INFINITY;
            let mut choice = vec![0usize; b - 1];
            for l in &l_tuples {
                for mu in &mu_tuples {
                    choice.iter_mut().for_each(|c| *c = 0);
                    'joint: loop {
                        let i_sets: Vec<Vec<usize>> =
                            choice.iter().map(|&c| arrangements[c].0.clone()).collect();
                        let sigmas: Vec<Vec<usize>> =
                            choice.iter().map(|&c| arrangements[c].1.clone()).collect();
                        let f =
                            mathcal_f(l, mu, &i_sets, &sigmas, d, b, lambda0, delta).unwrap();
                        best = best.max(f);
                        for slot in (0..b - 1).rev() {
                            choice[slot] += 1;
                            if choice[slot] < arrangements.len() {
                                continue 'joint;
                            }
                            choice[slot] = 0;
                        }
                        break;
                    }
                }
            }
            best
        }
        for (d, b) in [(1usize, 2usize), (2, 2), (2, 3)] {
            for delta in [0.1, 0.001] {
                let fast = mathcal_f_grid_max(d, b, 50.0, delta).unwrap();
                let slow = full_odometer_max(d, b, 50.0, delta);
                assert!(
                    ((fast.ln() - slow.ln()).abs()) < 1e-12,
                    "d={d} b={b} δ={delta}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn grid_max_reproduces_closed_form() {
        for d in 1..=3usize {
            for b in 1..=4usize {
                for lam in [100.0, 1000.0] {
                    for delta in [0.1, 0.01, 0.001, 0.0001] {
                        let grid = mathcal_f_grid_max(d, b, lam, delta).unwrap();
                        let closed = maximized_bound_from(d, b, lam, delta, 1);
                        assert!(
                            (grid.ln() - closed.ln()).abs() <= 1e-9,
                            "d={d} b={b} λ={lam} δ={delta}: grid {grid} closed {closed}"
                        );
                    }
                }
            }
        }
    }
}
