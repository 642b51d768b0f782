//! Exact counting and enumeration of lattice points in ellipsoidal balls
//! and thin shells.
//!
//! The counting function `N(λ)` is the number of `n ∈ Z^d` with
//! `Q(n) < λ²` (strict). Shells use the half-open convention
//! `λ−δ ≤ sqrt(Q(n)) < λ+δ`, so that
//! `shell_count(λ,δ) = N(λ+δ) − N(λ−δ)` holds as an exact identity for
//! every input, including rational forms with boundary ties.
//!
//! Enumeration is organised column by column: the first `d−1` coordinates
//! are driven by intervals derived from a triangular factorisation of the
//! form, and the last coordinate is resolved as an integer window of a
//! one-variable quadratic. Window endpoints are located with floating
//! arithmetic and certified by the margin rule: any candidate whose
//! floating value lies within `2e-9·λ²` of the bound is re-checked in
//! exact rational arithmetic. Floating errors here are several orders of
//! magnitude below the margin, so counts are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::cutoff::{CutoffKind, CutoffSpec};
use crate::error::Error;
use crate::quadform::QuadForm;

/// Parameters of a thin-shell query: `0 < δ < λ`.
#[derive(Debug, Clone)]
pub struct ShellQuery<'a> {
    pub form: &'a QuadForm,
    pub lambda: BigRational,
    pub delta: BigRational,
}

impl<'a> ShellQuery<'a> {
    pub fn new(form: &'a QuadForm, lambda: BigRational, delta: BigRational) -> Result<Self, Error> {
        if !lambda.is_positive() {
            return Err(Error::invalid("lambda must be positive"));
        }
        if !delta.is_positive() || delta >= lambda {
            return Err(Error::invalid("delta must satisfy 0 < delta < lambda"));
        }
        Ok(ShellQuery {
            form,
            lambda,
            delta,
        })
    }

    fn inner_sq(&self) -> BigRational {
        let r = &self.lambda - &self.delta;
        &r * &r
    }

    fn outer_sq(&self) -> BigRational {
        let r = &self.lambda + &self.delta;
        &r * &r
    }
}

/// Result of a ball count with its volume comparison.
#[derive(Debug, Clone)]
pub struct CountResult {
    pub count: u128,
    /// `Vol(B₁) λ^d`.
    pub leading: f64,
    /// `count − leading`.
    pub error_term: f64,
    /// Coordinate columns examined by the enumeration.
    pub points_enumerated: u64,
}

// ---------------------------------------------------------------------------
// enumeration engine
// ---------------------------------------------------------------------------

/// Lower-triangular `G` with `Q(n) = Σ_i (Σ_{j≤i} G_ij n_j)²`, obtained by
/// eliminating variables from the last one upwards. Row `i` of the sum
/// depends only on `n_0..n_i`, so scanning coordinates in natural order
/// yields lexicographically sorted points with the last coordinate
/// innermost.
fn lower_square_factor(form: &QuadForm) -> Vec<f64> {
    let d = form.dim();
    let mut m: Vec<f64> = (0..d * d)
        .map(|k| form.coeff_f64(k / d, k % d))
        .collect();
    let mut g = vec![0.0; d * d];
    for i in (0..d).rev() {
        let p = m[i * d + i];
        debug_assert!(p > 0.0, "positive definite by construction");
        let s = p.sqrt();
        g[i * d + i] = s;
        for j in 0..i {
            g[i * d + j] = m[i * d + j] / s;
        }
        for r in 0..i {
            for c in 0..i {
                m[r * d + c] -= m[i * d + r] * m[i * d + c] / p;
            }
        }
    }
    g
}

struct ExactBound {
    /// `bound.numer * form.int_den`; `Q(n) < bound` iff
    /// `eval_scaled(n) * bound.denom < this`.
    rhs: BigInt,
    den: BigInt,
    value_f: f64,
    margin: f64,
}

impl ExactBound {
    fn new(form: &QuadForm, bound: &BigRational) -> Self {
        let value_f = bound.to_f64().unwrap();
        ExactBound {
            rhs: bound.numer() * form.int_den(),
            den: bound.denom().clone(),
            value_f,
            margin: 2e-9 * value_f.abs().max(1.0),
        }
    }
}

struct ShellScan<'a> {
    form: &'a QuadForm,
    d: usize,
    g: Vec<f64>,
    hi: ExactBound,
    lo: Option<ExactBound>,
    slack: f64,
    budget: u64,
    columns: u64,
    exact_checks: u64,
}

/// Integer window of one enumeration column, inclusive.
type Window = (i64, i64);

impl<'a> ShellScan<'a> {
    fn new(form: &'a QuadForm, lo_sq: Option<&BigRational>, hi_sq: &BigRational) -> Self {
        let hi = ExactBound::new(form, hi_sq);
        let slack = 1e-9 * hi.value_f.abs().max(1.0);
        ShellScan {
            form,
            d: form.dim(),
            g: lower_square_factor(form),
            hi,
            lo: lo_sq.map(|b| ExactBound::new(form, b)),
            slack,
            budget: crate::enumeration_budget(),
            columns: 0,
            exact_checks: 0,
        }
    }

    /// Certified strict test `Q(n) < bound`.
    fn point_below(&mut self, n: &[i64], which_lo: bool) -> bool {
        let b = if which_lo {
            self.lo.as_ref().unwrap()
        } else {
            &self.hi
        };
        let qf = self.form.eval_f64(n);
        if (qf - b.value_f).abs() > b.margin {
            return qf < b.value_f;
        }
        self.exact_checks += 1;
        let b = if which_lo {
            self.lo.as_ref().unwrap()
        } else {
            &self.hi
        };
        self.form.eval_scaled(n) * &b.den < b.rhs
    }

    /// Exact integer window `{k : Q(n with last = k) < bound}` for the fixed
    /// prefix in `n[..d-1]`. Float roots give candidates; endpoints are then
    /// walked with the certified predicate.
    fn refine_window(&mut self, n: &mut Vec<i64>, which_lo: bool) -> Option<Window> {
        let d = self.d;
        let bound_f = if which_lo {
            self.lo.as_ref().unwrap().value_f
        } else {
            self.hi.value_f
        };
        let last = d - 1;
        let a = self.form.coeff_f64(last, last);
        let mut b = 0.0;
        for j in 0..last {
            b += self.form.coeff_f64(last, j) * n[j] as f64;
        }
        b *= 2.0;
        let mut c = 0.0;
        for i in 0..last {
            let ni = n[i] as f64;
            if ni == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..last {
                row += self.form.coeff_f64(i, j) * n[j] as f64;
            }
            c += ni * row;
        }

        let center = -b / (2.0 * a);
        let disc = b * b - 4.0 * a * (c - bound_f);
        if disc < -4.0 * a * self.slack {
            return None; // minimum exceeds the bound by more than the margin
        }
        let r = if disc > 0.0 { disc.sqrt() / (2.0 * a) } else { 0.0 };
        let wlo = (center - r).floor() as i64 - 8;
        let whi = (center + r).ceil() as i64 + 8;
        let mut lo = ((center - r).ceil() as i64).clamp(wlo, whi);
        let mut hi = ((center + r).floor() as i64).clamp(wlo, whi);

        n.push(0);
        let idx = d - 1;
        macro_rules! inside {
            ($k:expr) => {{
                n[idx] = $k;
                let v = self.point_below(n, which_lo);
                v
            }};
        }
        if inside!(lo) {
            while lo > wlo && inside!(lo - 1) {
                lo -= 1;
            }
        } else {
            loop {
                lo += 1;
                if lo > whi {
                    n.pop();
                    return None;
                }
                if inside!(lo) {
                    break;
                }
            }
        }
        if hi < lo {
            hi = lo;
        }
        if inside!(hi) {
            while hi < whi && inside!(hi + 1) {
                hi += 1;
            }
        } else {
            while hi > lo && !inside!(hi) {
                hi -= 1;
            }
            if hi == lo && !inside!(hi) {
                n.pop();
                return None;
            }
        }
        debug_assert!(lo == wlo || !inside!(lo - 1));
        debug_assert!(hi == whi || !inside!(hi + 1));
        n.pop();
        Some((lo, hi))
    }

    /// Drive the recursion; `on_column` receives the fixed prefix, the inner
    /// (forbidden) window when a lower bound is active, and the outer window.
    fn run(
        &mut self,
        on_column: &mut dyn FnMut(&mut Vec<i64>, Option<Window>, Window),
    ) -> Result<(), Error> {
        let d = self.d;
        let mut n: Vec<i64> = Vec::with_capacity(d);
        let mut offsets = vec![0.0; d];
        self.recurse(0, 0.0, &mut n, &mut offsets, on_column)
    }

    fn recurse(
        &mut self,
        level: usize,
        partial: f64,
        n: &mut Vec<i64>,
        offsets: &mut Vec<f64>,
        on_column: &mut dyn FnMut(&mut Vec<i64>, Option<Window>, Window),
    ) -> Result<(), Error> {
        let d = self.d;
        if level == d - 1 {
            self.columns += 1;
            if self.columns > self.budget {
                return Err(Error::BudgetExceeded {
                    needed: self.columns,
                    budget: self.budget,
                });
            }
            if let Some(outer) = self.refine_window(n, false) {
                let inner = if self.lo.is_some() {
                    self.refine_window(n, true)
                } else {
                    None
                };
                on_column(n, inner, outer);
            }
            return Ok(());
        }
        let gii = self.g[level * d + level];
        let ci = offsets[level];
        let rem = self.hi.value_f + self.slack - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let half = rem.sqrt();
        let lo = ((-half - ci) / gii).floor() as i64 - 1;
        let hi = ((half - ci) / gii).ceil() as i64 + 1;
        for k in lo..=hi {
            let t = gii * k as f64 + ci;
            let term = t * t;
            if term > rem {
                continue;
            }
            n.push(k);
            // accumulate the triangular offsets for deeper rows
            let mut saved = Vec::with_capacity(d - level - 1);
            for row in level + 1..d {
                saved.push(offsets[row]);
                offsets[row] += self.g[row * d + level] * k as f64;
            }
            let res = self.recurse(level + 1, partial + term, n, offsets, on_column);
            for (row, s) in (level + 1..d).zip(saved) {
                offsets[row] = s;
            }
            n.pop();
            res?;
        }
        Ok(())
    }
}

fn window_len(w: Window) -> u128 {
    (w.1 - w.0 + 1) as u128
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Count of `{n ∈ Z^d : Q(n) < bound}` for a rational squared radius.
pub fn count_below_sq(form: &QuadForm, bound: &BigRational) -> Result<u128, Error> {
    if !bound.is_positive() {
        return Ok(0);
    }
    let mut scan = ShellScan::new(form, None, bound);
    let mut total: u128 = 0;
    scan.run(&mut |_n, _inner, outer| {
        total += window_len(outer);
    })?;
    Ok(total)
}

/// `N(λ)`: number of lattice points with `Q(n) < λ²`.
pub fn count_points(form: &QuadForm, lambda: &BigRational) -> Result<u128, Error> {
    if !lambda.is_positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    count_below_sq(form, &(lambda * lambda))
}

/// `N(λ)` together with the volume term and the error `P(λ)`.
pub fn count_result(form: &QuadForm, lambda: &BigRational) -> Result<CountResult, Error> {
    if !lambda.is_positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    let bound = lambda * lambda;
    let mut scan = ShellScan::new(form, None, &bound);
    let mut total: u128 = 0;
    scan.run(&mut |_n, _inner, outer| {
        total += window_len(outer);
    })?;
    let lf = lambda.to_f64().unwrap();
    let leading = form.unit_ball_volume() * lf.powi(form.dim() as i32);
    Ok(CountResult {
        count: total,
        leading,
        error_term: total as f64 - leading,
        points_enumerated: scan.columns,
    })
}

/// `P(λ) = N(λ) − Vol(B₁) λ^d`.
pub fn error_term(form: &QuadForm, lambda: &BigRational) -> Result<f64, Error> {
    Ok(count_result(form, lambda)?.error_term)
}

/// Shell count as the difference of two ball counts,
/// `N(λ+δ) − N(λ−δ)`.
pub fn shell_count(q: &ShellQuery) -> Result<u128, Error> {
    let hi = count_below_sq(q.form, &q.outer_sq())?;
    let lo = count_below_sq(q.form, &q.inner_sq())?;
    Ok(hi - lo)
}

/// Shell count by a single pass that resolves, for every coordinate column,
/// the outer window minus the inner window. Must agree with [`shell_count`].
pub fn shell_count_direct(q: &ShellQuery) -> Result<u128, Error> {
    let inner_sq = q.inner_sq();
    let outer_sq = q.outer_sq();
    let mut scan = ShellScan::new(q.form, Some(&inner_sq), &outer_sq);
    let mut total: u128 = 0;
    scan.run(&mut |_n, inner, outer| {
        total += window_len(outer);
        if let Some(w) = inner {
            total -= window_len(w);
        }
    })?;
    Ok(total)
}

/// Visit every shell point `λ−δ ≤ sqrt(Q(n)) < λ+δ` exactly once, in
/// lexicographic order. The callback receives the point and the floating
/// value of `Q(n)`. Returns the number of points visited.
pub fn for_each_shell_point(
    q: &ShellQuery,
    mut f: impl FnMut(&[i64], f64),
) -> Result<u64, Error> {
    let inner_sq = q.inner_sq();
    let outer_sq = q.outer_sq();
    let mut scan = ShellScan::new(q.form, Some(&inner_sq), &outer_sq);
    let mut visited = 0u64;
    let form = q.form;
    scan.run(&mut |n, inner, outer| {
        let mut visit = |k: i64, n: &mut Vec<i64>| {
            n.push(k);
            f(n, form.eval_f64(n));
            n.pop();
            visited += 1;
        };
        match inner {
            None => {
                for k in outer.0..=outer.1 {
                    visit(k, n);
                }
            }
            Some(iw) => {
                for k in outer.0..iw.0 {
                    visit(k, n);
                }
                for k in iw.1 + 1..=outer.1 {
                    visit(k, n);
                }
            }
        }
    })?;
    Ok(visited)
}

/// Materialised shell enumeration (lexicographic order).
pub fn enumerate_shell(q: &ShellQuery) -> Result<Vec<Vec<i64>>, Error> {
    let mut pts = Vec::new();
    for_each_shell_point(q, |n, _| pts.push(n.to_vec()))?;
    Ok(pts)
}

/// Visit every point with `lo ≤ Q(n) < hi` (a window on the value of the
/// form itself rather than on its square root), in lexicographic order.
pub fn for_each_in_q_window(
    form: &QuadForm,
    lo: &BigRational,
    hi: &BigRational,
    mut f: impl FnMut(&[i64], f64),
) -> Result<u64, Error> {
    if hi <= lo || !hi.is_positive() {
        return Ok(0);
    }
    let lo_opt = if lo.is_positive() { Some(lo) } else { None };
    let mut scan = ShellScan::new(form, lo_opt, hi);
    let mut visited = 0u64;
    scan.run(&mut |n, inner, outer| {
        let mut visit = |k: i64, n: &mut Vec<i64>| {
            n.push(k);
            f(n, form.eval_f64(n));
            n.pop();
            visited += 1;
        };
        match inner {
            None => {
                for k in outer.0..=outer.1 {
                    visit(k, n);
                }
            }
            Some(iw) => {
                for k in outer.0..iw.0 {
                    visit(k, n);
                }
                for k in iw.1 + 1..=outer.1 {
                    visit(k, n);
                }
            }
        }
    })?;
    Ok(visited)
}

/// Kernel of the shell projector at the origin,
/// `Σ_n χ((sqrt(Q(n)) − λ)/δ)`, which is its `L¹→L∞` norm. With the
/// indicator cutoff this equals [`shell_count`] exactly; with the smooth
/// plateau it is sandwiched between the counts at `δ/2` and `δ`.
pub fn projector_l1linf(q: &ShellQuery, cutoff: &CutoffSpec) -> Result<f64, Error> {
    match cutoff.kind {
        CutoffKind::Indicator => Ok(shell_count(q)? as f64),
        CutoffKind::SmoothPlateau => {
            let lf = q.lambda.to_f64().unwrap();
            let df = q.delta.to_f64().unwrap();
            let mut sum = 0.0;
            for_each_shell_point(q, |_, qf| {
                sum += cutoff.eval((qf.max(0.0).sqrt() - lf) / df);
            })?;
            Ok(sum)
        }
    }
}
