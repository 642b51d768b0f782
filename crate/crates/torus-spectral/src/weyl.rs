//! Truncated Weyl sums, Dirichlet approximation and the major/minor arc
//! decomposition of time.
//!
//! The central objects are the smoothly truncated sums
//!
//! ```text
//! K_N(t, x)    = Σ_{k ∈ Z^d} e^{-2πi (x·k + t Q(k))} φ(k_1/N) … φ(k_d/N)
//! K⁽¹⁾_N(t, y) = Σ_{k ∈ Z}   e^{ 2πi (y k + k² t)}   φ(k/N)
//! ```
//!
//! with φ an even plateau cutoff (1 on `[-1/2,1/2]`, supported in `[-1,1]`).
//! For diagonal forms `K_N(t,x) = conj(Π_i K⁽¹⁾_N(β_i t, x_i))`.
//!
//! Times are classified by the quality of their rational approximations:
//! `Λ₀` captures `|t| ≤ 1/N`, the major layer `Λ_Q` (dyadic `Q`) captures
//! `|t − a/q| ≤ 1/(NQ)` for a reduced fraction with `a ≠ 0` and
//! `Q/2 ≤ q < Q`, and the minor arcs are everything else.

use num_complex::Complex64;
use num_integer::Integer;

use crate::cutoff::CutoffSpec;
use crate::error::Error;
use crate::quadform::{FormKind, QuadForm};
use crate::util::dyadic_bucket;

/// Parameters for Weyl-sum evaluation: a dyadic truncation `N ≥ 2`, the
/// coordinate cutoff φ, and the quadratic form in the phase.
#[derive(Debug, Clone)]
pub struct WeylParams<'a> {
    pub n: u64,
    pub phi: CutoffSpec,
    pub form: &'a QuadForm,
}

impl<'a> WeylParams<'a> {
    pub fn new(n: u64, phi: CutoffSpec, form: &'a QuadForm) -> Result<Self, Error> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "N must be a power of two >= 2, got {n}"
            )));
        }
        Ok(WeylParams { n, phi, form })
    }
}

/// Classification of a time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcLabel {
    /// `|t| ≤ 1/N`.
    Lambda0,
    /// `|t − a/q| ≤ 1/(N Q)` with `gcd(a,q) = 1`, `a ≠ 0`, `Q/2 ≤ q < Q`
    /// and `Q < c₀ N`.
    Major { big_q: u64, a: i64, q: u64 },
    /// The complement of the major arcs.
    Minor,
}

impl ArcLabel {
    pub fn kind_str(&self) -> &'static str {
        match self {
            ArcLabel::Lambda0 => "lambda0",
            ArcLabel::Major { .. } => "major",
            ArcLabel::Minor => "minor",
        }
    }
}

/// A reduced rational approximation `a/q` of a time `t`, with `q ≤ N` and
/// `|t − a/q| ≤ 1/(qN)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    pub err: f64,
}

fn phase(u: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * u.fract()).sin_cos();
    Complex64::new(c, s)
}

/// One-dimensional truncated Weyl sum `Σ_{|k|≤N} e^{2πi(yk + k²t)} φ(k/N)`.
pub fn kernel_1d(n: u64, t: f64, y: f64, phi: &CutoffSpec) -> Complex64 {
    let nn = n as i64;
    let nf = n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -nn..=nn {
        let w = phi.eval(k as f64 / nf);
        if w == 0.0 {
            continue;
        }
        let kf = k as f64;
        acc += w * phase(y * kf + kf * kf * t);
    }
    acc
}

/// Full Weyl sum by direct summation over `[-N, N]^d`.
pub fn kernel_full_direct(p: &WeylParams, t: f64, x: &[f64]) -> Result<Complex64, Error> {
    let d = p.form.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let side = 2 * p.n + 1;
    let needed = side.checked_pow(d as u32).unwrap_or(u64::MAX);
    let budget = crate::enumeration_budget();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let nn = p.n as i64;
    let nf = p.n as f64;
    let mut k = vec![-nn; d];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for i in 0..d {
            w *= p.phi.eval(k[i] as f64 / nf);
            if w == 0.0 {
                break;
            }
        }
        if w != 0.0 {
            let mut lin = 0.0;
            for i in 0..d {
                lin += x[i] * k[i] as f64;
            }
            let q = p.form.eval_f64(&k);
            acc += w * phase(-(lin + t * q));
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(acc);
            }
            k[i] += 1;
            if k[i] <= nn {
                break;
            }
            k[i] = -nn;
            i += 1;
        }
    }
}

/// Full Weyl sum; diagonal forms factor into a product of one-dimensional
/// kernels, other forms fall back to direct summation.
pub fn kernel_full(p: &WeylParams, t: f64, x: &[f64]) -> Result<Complex64, Error> {
    let d = p.form.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    if p.form.kind() == FormKind::Diagonal {
        let mut acc = Complex64::new(1.0, 0.0);
        for i in 0..d {
            acc *= kernel_1d(p.n, p.form.coeff_f64(i, i) * t, x[i], &p.phi).conj();
        }
        return Ok(acc);
    }
    kernel_full_direct(p, t, x)
}

/// Continued-fraction convergents `a/q` of `t` with `q ≤ max_q`, in order
/// of increasing denominator. The first entry is `floor(t)/1`.
pub fn convergents(t: f64, max_q: u64) -> Vec<(i64, u64)> {
    let mut res = Vec::new();
    // convention: h_{-2}/k_{-2} = 0/1, h_{-1}/k_{-1} = 1/0
    let (mut hm2, mut hm1) = (0i128, 1i128);
    let (mut km2, mut km1) = (1i128, 0i128);
    let mut x = t;
    for _ in 0..64 {
        let af = x.floor();
        if !af.is_finite() || af.abs() > 1e15 {
            break;
        }
        let a = af as i128;
        let h = a * hm1 + hm2;
        let k = a * km1 + km2;
        if k > max_q as i128 {
            break;
        }
        res.push((h as i64, k as u64));
        let frac = x - af;
        hm2 = hm1;
        hm1 = h;
        km2 = km1;
        km1 = k;
        if frac <= f64::EPSILON * x.abs().max(1.0) {
            break; // terminated: the floating value is exactly rational
        }
        x = 1.0 / frac;
    }
    res
}

/// Best Dirichlet approximation: the largest-denominator convergent with
/// `q ≤ N`, which satisfies `|t − a/q| ≤ 1/(qN)`.
pub fn dirichlet_approx(t: f64, n: u64) -> RationalApprox {
    let cs = convergents(t, n);
    let (a, q) = *cs.last().expect("floor(t)/1 always qualifies");
    RationalApprox {
        a,
        q,
        err: (t - a as f64 / q as f64).abs(),
    }
}

/// Arc classification of a time. `c0` must be a power of two with
/// `c0 ≤ 1/4`; major arcs use dyadic buckets `Q < c0·N`, which keeps
/// distinct major intervals pairwise disjoint.
///
/// All convergents of `t` are examined, not just the best one: a time can
/// sit inside the narrow interval of a low-denominator fraction while its
/// best approximation with `q ≤ N` has a far larger denominator.
pub fn classify_arc(t: f64, n: u64, c0: f64) -> Result<ArcLabel, Error> {
    if !(c0 > 0.0 && c0 <= 0.25 && c0.log2().fract() == 0.0) {
        return Err(Error::invalid(format!(
            "c0 must be a power of two <= 1/4, got {c0}"
        )));
    }
    let nf = n as f64;
    if t.abs() <= 1.0 / nf {
        return Ok(ArcLabel::Lambda0);
    }
    for (a, q) in convergents(t, n) {
        if a == 0 {
            continue;
        }
        let big_q = dyadic_bucket(q);
        if (big_q as f64) < c0 * nf && (t - a as f64 / q as f64).abs() <= 1.0 / (nf * big_q as f64)
        {
            return Ok(ArcLabel::Major { big_q, a, q });
        }
    }
    Ok(ArcLabel::Minor)
}

/// Indicator of the dyadic layer `Λ_Q`: is there a reduced fraction `a/q`
/// with `a ≠ 0`, `Q/2 ≤ q < Q` and `|u − a/q| ≤ 1/(NQ)`?
pub fn lambda_q_indicator(u: f64, n: u64, big_q: u64) -> bool {
    let width = 1.0 / (n as f64 * big_q as f64);
    let mut q = (big_q / 2).max(1);
    while q < big_q {
        // the window is narrower than 1/(2q), so only the nearest fraction
        // with this denominator can qualify
        let a = (u * q as f64).round();
        if a != 0.0 && a.abs() < 9e15 {
            let ai = a as i64;
            if (u - a / q as f64).abs() <= width && ai.unsigned_abs().gcd(&q) == 1 {
                return true;
            }
        }
        q += 1;
    }
    false
}

/// Right-hand side of the Weyl bound: `N^{1+ε} / (√q (1 + N |t−a/q|^{1/2}))`.
pub fn weyl_bound_rhs(n: u64, approx: &RationalApprox, eps: f64) -> f64 {
    let nf = n as f64;
    nf.powf(1.0 + eps) / ((approx.q as f64).sqrt() * (1.0 + nf * approx.err.sqrt()))
}

/// Short-time dispersive envelope `(N/(|t|N + 1/N))^{d/2}` with the
/// polynomial surrogate `(1 + r)^{-2d}` standing in for the
/// super-polynomially decaying spatial factor, `r = |x|/(|t|N + 1/N)`.
pub fn dispersive_bound(n: u64, t: f64, x_norm: f64, d: usize) -> f64 {
    let nf = n as f64;
    let s = t.abs() * nf + 1.0 / nf;
    (nf / s).powf(d as f64 / 2.0) * (1.0 + x_norm / s).powi(-(2 * d as i32))
}

/// Grid lower bound for `‖K_N(t,·)‖_{L∞}`: the maximum of `|K_N|` over the
/// uniform grid `x ∈ (j/grid)_{0≤j<grid}^d` on the torus.
pub fn sup_norm_lower(p: &WeylParams, t: f64, grid_per_dim: usize) -> Result<f64, Error> {
    if grid_per_dim < 2 {
        return Err(Error::invalid("grid_per_dim must be at least 2"));
    }
    let d = p.form.dim();
    let cells = (grid_per_dim as u64)
        .checked_pow(d as u32)
        .unwrap_or(u64::MAX);
    let budget = crate::enumeration_budget();
    if cells.saturating_mul(2 * p.n + 1) > budget {
        return Err(Error::BudgetExceeded {
            needed: cells,
            budget,
        });
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut best: f64 = 0.0;
    loop {
        for i in 0..d {
            x[i] = idx[i] as f64 / grid_per_dim as f64;
        }
        best = best.max(kernel_full(p, t, &x)?.norm());
        let mut i = 0;
        loop {
            if i == d {
                return Ok(best);
            }
            idx[i] += 1;
            if idx[i] < grid_per_dim {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Weyl-differencing sum `Σ_{|n|_∞ ≤ 2N} Π_i min(1/‖t·Q_i(n)‖, N)` with
/// `Q_i(n) = Σ_j β_ij n_j` and `‖·‖` the distance to the nearest integer.
/// The sum bounds the *squared* sup norm up to an absolute constant; its
/// square root is the sup-norm-scale proxy used by [`time_average_sup`].
pub fn sup_norm_upper_weyl_diff(p: &WeylParams, t: f64) -> Result<f64, Error> {
    let d = p.form.dim();
    let nf = p.n as f64;
    let nn = 2 * p.n as i64;
    let min_factor = |u: f64| -> f64 {
        let dist = (u - u.round()).abs();
        if dist <= 1.0 / nf {
            nf
        } else {
            1.0 / dist
        }
    };
    if p.form.kind() == FormKind::Diagonal {
        // Q_i(n) = β_i n_i, so the sum factorises over coordinates
        let mut prod = 1.0;
        for i in 0..d {
            let beta = p.form.coeff_f64(i, i);
            let mut s = 0.0;
            for k in -nn..=nn {
                s += min_factor(t * beta * k as f64);
            }
            prod *= s;
        }
        return Ok(prod);
    }
    let side = (2 * nn + 1) as u64;
    let needed = side.checked_pow(d as u32).unwrap_or(u64::MAX);
    let budget = crate::enumeration_budget();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut k = vec![-nn; d];
    let mut total = 0.0;
    loop {
        let mut prod = 1.0;
        for i in 0..d {
            let mut qi = 0.0;
            for j in 0..d {
                qi += p.form.coeff_f64(i, j) * k[j] as f64;
            }
            prod *= min_factor(t * qi);
        }
        total += prod;
        let mut i = 0;
        loop {
            if i == d {
                return Ok(total);
            }
            k[i] += 1;
            if k[i] <= nn {
                break;
            }
            k[i] = -nn;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupProxyMode {
    /// Grid maximum of `|K_N|` (a certified lower bound for the sup norm).
    Lower,
    /// Square root of the Weyl-differencing sum (an upper proxy).
    Upper,
}

/// Trapezoid estimate of `(1/T) ∫_{1/N}^{T} proxy(t) dt` on a uniform grid.
pub fn time_average_sup(
    p: &WeylParams,
    t_end: f64,
    t_samples: usize,
    mode: SupProxyMode,
) -> Result<f64, Error> {
    let t0 = 1.0 / p.n as f64;
    if t_end <= t0 {
        return Err(Error::invalid("T must exceed 1/N"));
    }
    if t_samples < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    let h = (t_end - t0) / (t_samples - 1) as f64;
    let mut acc = 0.0;
    for j in 0..t_samples {
        let t = t0 + h * j as f64;
        let w = if j == 0 || j == t_samples - 1 { 0.5 } else { 1.0 };
        let v = match mode {
            SupProxyMode::Lower => sup_norm_lower(p, t, 16)?,
            SupProxyMode::Upper => sup_norm_upper_weyl_diff(p, t)?.sqrt(),
        };
        acc += w * v;
    }
    Ok(acc * h / t_end)
}

/// Midpoint estimate of the measure of
/// `{t ∈ [0,T] : β_i t ∈ Λ_{Q_i} for every i}`. An empty list of layers
/// imposes no condition, so the measure is `T`.
pub fn arc_measure_product(
    betas: &[f64],
    qs: &[u64],
    n: u64,
    t_end: f64,
    t_samples: usize,
) -> Result<f64, Error> {
    if betas.len() != qs.len() {
        return Err(Error::DimensionMismatch {
            expected: betas.len(),
            got: qs.len(),
        });
    }
    for &q in qs {
        if !q.is_power_of_two() || q > n {
            return Err(Error::invalid("each Q must be a power of two <= N"));
        }
    }
    if qs.is_empty() {
        return Ok(t_end);
    }
    if t_samples == 0 {
        return Err(Error::invalid("need at least 1 sample"));
    }
    let h = t_end / t_samples as f64;
    let mut hits = 0u64;
    for j in 0..t_samples {
        let t = (j as f64 + 0.5) * h;
        if betas
            .iter()
            .zip(qs)
            .all(|(&b, &q)| lambda_q_indicator(b * t, n, q))
        {
            hits += 1;
        }
    }
    Ok(hits as f64 * h)
}

/// Midpoint estimate of `∫_{-1}^{1} min(1/‖λh + A‖, N) dh`, the averaging
/// integral behind the generic-tori square-root cancellation argument. It
/// is `O(log N)` for `λ ≥ 1` and `O(log N / λ)` for `λ ≤ 1`.
pub fn nearest_int_min_average(lambda: f64, shift: f64, n: u64, samples: usize) -> f64 {
    let nf = n as f64;
    let h = 2.0 / samples as f64;
    let mut acc = 0.0;
    for j in 0..samples {
        let u = -1.0 + (j as f64 + 0.5) * h;
        let v = lambda * u + shift;
        let dist = (v - v.round()).abs();
        acc += if dist <= 1.0 / nf { nf } else { 1.0 / dist };
    }
    acc * h
}
