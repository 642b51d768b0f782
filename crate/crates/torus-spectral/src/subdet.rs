//! Maximal subdeterminants, singular values and the constructive geometry
//! built on them: column rearrangement with near-maximal prefixes,
//! membership in the admissible-extension set `S(M,R)`, its box cover,
//! neighbourhood volume bounds and constrained basis reduction.
//!
//! `D_k(M)` denotes the maximum absolute value of a `k×k` subdeterminant
//! of `M`, with `D_0 = 1`, and `D_k^{(ℓ)}` the same restricted to the
//! first `ℓ` columns. Exact integer paths enumerate minors with
//! fraction-free elimination; floating paths mirror them and agree to
//! rounding on small-integer inputs. Singular values come from a dense
//! SVD; the two scales are linked by
//! `D_k ≤ binom(p,k) binom(q,k) σ_1…σ_k` and conversely, which every
//! profile here can check with its explicit binomial constants.

use nalgebra::DMatrix;
use rand::Rng;
use std::collections::HashMap;

use crate::error::Error;
use crate::util::rng_at;

// ---------------------------------------------------------------------------
// minor enumeration
// ---------------------------------------------------------------------------

/// Shape cap for minor enumeration: `min(p,q) ≤ 8`, `max(p,q) ≤ 10`.
fn check_shape(p: usize, q: usize) -> Result<(), Error> {
    if p.min(q) > 8 || p.max(q) > 10 {
        return Err(Error::BudgetExceeded {
            needed: (p * q) as u64,
            budget: 80,
        });
    }
    Ok(())
}

/// Visit all k-subsets of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Determinant of a small float matrix by LU with partial pivoting.
fn det_f64(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for r in 0..n {
        let mut piv = r;
        for i in r + 1..n {
            if a[i * n + r].abs() > a[piv * n + r].abs() {
                piv = i;
            }
        }
        if a[piv * n + r] == 0.0 {
            return 0.0;
        }
        if piv != r {
            for c in 0..n {
                a.swap(r * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[r * n + r];
        det *= p;
        for i in r + 1..n {
            let f = a[i * n + r] / p;
            for c in r..n {
                a[i * n + c] -= f * a[r * n + c];
            }
        }
    }
    det
}

/// Exact determinant of a small integer matrix, fraction-free elimination.
fn det_exact(a: &mut [i128], n: usize) -> Result<i128, Error> {
    if n == 0 {
        return Ok(1);
    }
    let overflow = || Error::invalid("integer determinant overflow");
    let mut sign = 1i128;
    let mut prev = 1i128;
    for r in 0..n - 1 {
        if a[r * n + r] == 0 {
            match (r + 1..n).find(|&s| a[s * n + r] != 0) {
                None => return Ok(0),
                Some(s) => {
                    for c in 0..n {
                        a.swap(r * n + c, s * n + c);
                    }
                    sign = -sign;
                }
            }
        }
        let pivot = a[r * n + r];
        for i in r + 1..n {
            for j in r + 1..n {
                let x = pivot.checked_mul(a[i * n + j]).ok_or_else(overflow)?;
                let y = a[i * n + r].checked_mul(a[r * n + j]).ok_or_else(overflow)?;
                a[i * n + j] = x.checked_sub(y).ok_or_else(overflow)? / prev;
            }
            a[i * n + r] = 0;
        }
        prev = pivot;
    }
    Ok(sign * a[n * n - 1])
}

/// `D_k` of a float matrix: maximum `|det|` over all `k×k` minors.
pub fn max_subdet_f64(m: &DMatrix<f64>, k: usize) -> Result<f64, Error> {
    let (p, q) = m.shape();
    check_shape(p, q)?;
    if k > p.min(q) {
        return Err(Error::OutOfRange(format!("k={k} exceeds min(p,q)={}", p.min(q))));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut best: f64 = 0.0;
    let mut sub = vec![0.0; k * k];
    for_each_combination(p, k, |rows| {
        for_each_combination(q, k, |cols| {
            for (ri, &r) in rows.iter().enumerate() {
                for (ci, &c) in cols.iter().enumerate() {
                    sub[ri * k + ci] = m[(r, c)];
                }
            }
            best = best.max(det_f64(&mut sub, k).abs());
        });
    });
    Ok(best)
}

/// `D_k` of an integer matrix, exact.
pub fn max_subdet_int(m: &[Vec<i64>], k: usize) -> Result<i128, Error> {
    let entries: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    max_subdet_exact(&entries, k)
}

/// `D_k` over `i128` entries, exact.
pub fn max_subdet_exact(m: &[Vec<i128>], k: usize) -> Result<i128, Error> {
    let p = m.len();
    let q = if p == 0 { 0 } else { m[0].len() };
    check_shape(p, q)?;
    if k > p.min(q) {
        return Err(Error::OutOfRange(format!("k={k} exceeds min(p,q)={}", p.min(q))));
    }
    if k == 0 {
        return Ok(1);
    }
    let mut best: i128 = 0;
    let mut sub = vec![0i128; k * k];
    let mut err = None;
    for_each_combination(p, k, |rows| {
        for_each_combination(q, k, |cols| {
            if err.is_some() {
                return;
            }
            for (ri, &r) in rows.iter().enumerate() {
                for (ci, &c) in cols.iter().enumerate() {
                    sub[ri * k + ci] = m[r][c];
                }
            }
            match det_exact(&mut sub, k) {
                Ok(d) => best = best.max(d.abs()),
                Err(e) => err = Some(e),
            }
        });
    });
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// `D_k` of the first `ℓ` columns.
pub fn max_subdet_prefix(m: &DMatrix<f64>, k: usize, l: usize) -> Result<f64, Error> {
    let (p, q) = m.shape();
    if l > q {
        return Err(Error::OutOfRange(format!("prefix {l} exceeds {q} columns")));
    }
    if k > p.min(l) {
        return Err(Error::OutOfRange(format!("k={k} exceeds min(p,ℓ)={}", p.min(l))));
    }
    max_subdet_f64(&m.columns(0, l).into_owned(), k)
}

/// `D_k` of the first `ℓ` columns of an integer matrix, exact.
pub fn max_subdet_prefix_int(m: &[Vec<i64>], k: usize, l: usize) -> Result<i128, Error> {
    let prefix: Vec<Vec<i64>> = m.iter().map(|row| row[..l].to_vec()).collect();
    max_subdet_int(&prefix, k)
}

// ---------------------------------------------------------------------------
// singular values
// ---------------------------------------------------------------------------

/// SVD with singular values sorted nonincreasing and `U`, `Vᵀ` permuted
/// consistently.
fn svd_sorted(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let sorted: Vec<f64> = idx.iter().map(|&i| s[i]).collect();
    let u2 = DMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, idx[c])]);
    let vt2 = DMatrix::from_fn(vt.nrows(), vt.ncols(), |r, c| vt[(idx[r], c)]);
    (u2, sorted, vt2)
}

/// Singular values `σ_1 ≥ … ≥ σ_m ≥ 0`.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// The `(D_k)` and `(σ_k)` scales of a matrix side by side.
#[derive(Debug, Clone)]
pub struct SubdetProfile {
    pub rows: usize,
    pub cols: usize,
    /// `D_1..D_m` as floats (`D_0 = 1` is implicit).
    pub d: Vec<f64>,
    /// Exact values when the matrix is integral.
    pub d_exact: Option<Vec<i128>>,
    /// `σ_1 ≥ … ≥ σ_m`.
    pub sigma: Vec<f64>,
}

impl SubdetProfile {
    pub fn of_f64(m: &DMatrix<f64>) -> Result<Self, Error> {
        let (p, q) = m.shape();
        let mm = p.min(q);
        let d = (1..=mm)
            .map(|k| max_subdet_f64(m, k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubdetProfile {
            rows: p,
            cols: q,
            d,
            d_exact: None,
            sigma: singular_values(m),
        })
    }

    pub fn of_int(m: &[Vec<i64>]) -> Result<Self, Error> {
        let p = m.len();
        let q = if p == 0 { 0 } else { m[0].len() };
        let mm = p.min(q);
        let d_exact = (1..=mm)
            .map(|k| max_subdet_int(m, k))
            .collect::<Result<Vec<_>, _>>()?;
        let dm = DMatrix::from_fn(p, q, |r, c| m[r][c] as f64);
        Ok(SubdetProfile {
            rows: p,
            cols: q,
            d: d_exact.iter().map(|&x| x as f64).collect(),
            d_exact: Some(d_exact),
            sigma: singular_values(&dm),
        })
    }

    /// Explicit-constant comparison of the two scales:
    /// `1/B ≤ D_k / (σ_1…σ_k) ≤ B` with `B = binom(p,k) binom(q,k)`,
    /// checked for every `k` (vacuously when both sides vanish).
    pub fn corollary_band_ok(&self) -> bool {
        let mut sig_prod = 1.0;
        // relative slack for SVD rounding on both sides
        let tol = 1e-9;
        for k in 1..=self.d.len() {
            sig_prod *= self.sigma[k - 1];
            let b = binom(self.rows, k) * binom(self.cols, k);
            let dk = self.d[k - 1];
            if dk > b * sig_prod * (1.0 + tol) + 1e-12 {
                return false;
            }
            if sig_prod > b * dk * (1.0 + tol) + 1e-12 {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// column rearrangement
// ---------------------------------------------------------------------------

/// The prefix guarantee constant `c(p,q) = 1/(m! · binom(q,m))`,
/// `m = min(p,q)`: the rearranged matrix satisfies
/// `D_k^{(ℓ)}(Mπ) ≥ c(p,q) D_k(M)` for all `k ≤ ℓ`.
pub fn rearrange_constant(p: usize, q: usize) -> f64 {
    let m = p.min(q);
    let mut fact = 1.0;
    for i in 2..=m {
        fact *= i as f64;
    }
    1.0 / (fact * binom(q, m))
}

/// Column order with near-maximal prefix subdeterminants. Works on the
/// SVD-reduced matrix `Σ Vᵀ`, then repeatedly selects, for positions
/// `m, m−1, …, 1`, the free column with the largest Laplace-expansion
/// score `|A_{s,j}| · D_{s−1}(first s−1 rows, remaining columns)`.
/// Ties go to the lowest original index.
///
/// Returns the permutation as `perm[position] = original column`.
pub fn rearrange_columns(m: &DMatrix<f64>) -> Result<Vec<usize>, Error> {
    let (p, q) = m.shape();
    check_shape(p, q)?;
    let mm = p.min(q);
    let (_, s, vt) = svd_sorted(m);
    // reduced matrix: rows σ_i · (row i of Vᵀ)
    let a = DMatrix::from_fn(mm, q, |r, c| s[r] * vt[(r, c)]);

    let mut free: Vec<usize> = (0..q).collect();
    let mut perm = vec![usize::MAX; q];
    for s_pos in (1..=mm).rev() {
        let mut best_j = 0usize;
        let mut best = (-1.0f64, -1.0f64);
        for (slot, &j) in free.iter().enumerate() {
            let others: Vec<usize> = free
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != slot)
                .map(|(_, &c)| c)
                .collect();
            let rest = DMatrix::from_fn(s_pos - 1, others.len(), |r, c| a[(r, others[c])]);
            let d_rest = max_subdet_f64(&rest, s_pos - 1)?;
            let score = a[(s_pos - 1, j)].abs() * d_rest;
            // ties (notably rank-deficient rows with all-zero scores) are
            // broken towards keeping the remaining columns as strong as
            // possible, then towards the lowest original index
            if score > best.0 || (score == best.0 && d_rest > best.1) {
                best = (score, d_rest);
                best_j = slot;
            }
        }
        perm[s_pos - 1] = free.remove(best_j);
    }
    // leftover columns keep their original order
    for (k, j) in free.into_iter().enumerate() {
        perm[mm + k] = j;
    }
    Ok(perm)
}

/// Apply a column permutation: column `j` of the result is column
/// `perm[j]` of `m`.
pub fn permute_columns(m: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, perm[c])])
}

pub fn permute_columns_int(m: &[Vec<i64>], perm: &[usize]) -> Vec<Vec<i64>> {
    m.iter()
        .map(|row| perm.iter().map(|&j| row[j]).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// the admissible-extension set S(M, R)
// ---------------------------------------------------------------------------

/// Membership query for the set of columns `x` whose adjunction keeps
/// every `D_j` within the factor `C` and pushes `D_{k+1}` at most to `R`.
#[derive(Debug, Clone)]
pub struct SBoxQuery {
    pub m: DMatrix<f64>,
    pub r: f64,
    pub c: f64,
}

impl SBoxQuery {
    pub fn new(m: DMatrix<f64>, r: f64, c: f64) -> Result<Self, Error> {
        if c < 1.0 {
            return Err(Error::invalid("C must be at least 1"));
        }
        if r < 0.0 {
            return Err(Error::invalid("R must be nonnegative"));
        }
        Ok(SBoxQuery { m, r, c })
    }
}

/// Floating-zero threshold for a `j×j` minor of `m`: a small multiple of
/// the Hadamard scale (product of the `j` largest column norms).
fn minor_noise_floor(m: &DMatrix<f64>, j: usize) -> f64 {
    let mut norms: Vec<f64> = (0..m.ncols()).map(|c| m.column(c).norm()).collect();
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    1e-9 * norms.iter().take(j).product::<f64>().max(1e-300)
}

/// Is `x ∈ S(M,R)`: `D_j(M|x) ≤ C·D_j(M)` for `1 ≤ j ≤ min(p,k)`, and
/// `D_{k+1}(M|x) ≤ R` when `p ≥ k+1`. Comparisons carry a Hadamard-scaled
/// noise floor so that exact-zero conditions (such as `R = 0`) remain
/// decidable in floating arithmetic.
pub fn s_membership(q: &SBoxQuery, x: &[f64]) -> Result<bool, Error> {
    let (p, k) = q.m.shape();
    if x.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: x.len(),
        });
    }
    let mut ext = DMatrix::zeros(p, k + 1);
    ext.view_mut((0, 0), (p, k)).copy_from(&q.m);
    for i in 0..p {
        ext[(i, k)] = x[i];
    }
    for j in 1..=p.min(k) {
        let lhs = max_subdet_f64(&ext, j)?;
        let rhs = q.c * max_subdet_f64(&q.m, j)?;
        if lhs > rhs + minor_noise_floor(&ext, j) {
            return Ok(false);
        }
    }
    if p > k {
        let lhs = max_subdet_f64(&ext, k + 1)?;
        if lhs > q.r + minor_noise_floor(&ext, k + 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The box half-widths `τ`: `τ_i = σ_i(M)` for `i ≤ k` and
/// `min(σ_k, R/D_k)` for `i > k`, with the convention `0⁻¹·0 = 0`.
pub fn tau_profile(m: &DMatrix<f64>, r: f64, k: usize) -> Result<Vec<f64>, Error> {
    let (p, cols) = m.shape();
    if k != cols {
        return Err(Error::invalid(format!(
            "k = {k} must equal the number of columns {cols}"
        )));
    }
    let sigma = singular_values(m);
    let dk = max_subdet_f64(m, k.min(p.min(cols)))?;
    let sk = if k <= sigma.len() { sigma[k - 1] } else { 0.0 };
    let ratio = if dk > 0.0 {
        r / dk
    } else if r == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let tail = sk.min(ratio);
    let mut tau = Vec::with_capacity(p);
    for i in 1..=p {
        if i <= k.min(sigma.len()) {
            tau.push(sigma[i - 1]);
        } else {
            tau.push(tail);
        }
    }
    Ok(tau)
}

/// Extend a thin `p×m` orthonormal column set to a full `p×p` basis.
fn complete_orthonormal(u: &DMatrix<f64>) -> DMatrix<f64> {
    let p = u.nrows();
    let m = u.ncols();
    let mut cols: Vec<nalgebra::DVector<f64>> = (0..m).map(|j| u.column(j).into_owned()).collect();
    let mut e = 0usize;
    while cols.len() < p && e < p {
        let mut v = nalgebra::DVector::zeros(p);
        v[e] = 1.0;
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        // second pass for numerical orthogonality
        for c in &cols {
            let proj = c.dot(&v);
            v -= c * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
        e += 1;
    }
    DMatrix::from_fn(p, p, |r, c| cols[c][r])
}

/// Result of a Monte Carlo cover check of `S(M,R)` by the `τ`-box.
#[derive(Debug, Clone)]
pub struct BoxCoverReport {
    pub trials: u64,
    pub members: u64,
    pub violations: u64,
    /// Largest observed `|y_i| / (margin τ_i)` over members (finite τ).
    pub max_ratio: f64,
    /// Largest `|y_i|` over members in directions with `τ_i = 0`.
    pub max_null_coord: f64,
}

/// Sample candidate columns from an enlarged `τ`-box and check that every
/// member of `S(M,R)` found lies inside the `margin`-scaled box.
pub fn box_cover_check(
    q: &SBoxQuery,
    trials: u64,
    margin: f64,
    seed: u64,
) -> Result<BoxCoverReport, Error> {
    let (p, k) = q.m.shape();
    let (u_thin, sigma, _) = svd_sorted(&q.m);
    let u_full = complete_orthonormal(&u_thin);
    let tau = tau_profile(&q.m, q.r, k)?;
    let scale = sigma.first().copied().unwrap_or(1.0).max(1e-9);
    let null_tol = 1e-6 * scale;

    let mut report = BoxCoverReport {
        trials,
        members: 0,
        violations: 0,
        max_ratio: 0.0,
        max_null_coord: 0.0,
    };
    for trial in 0..trials {
        let mut rng = rng_at(seed, 0x5B0C, trial);
        // rotate through sampling scales: small factors land inside S and
        // exercise the cover, large ones probe the enlarged shells
        let factor = [0.5, 1.0, 2.0, 2.0 * margin][(trial % 4) as usize];
        let mut y = vec![0.0; p];
        for (i, yi) in y.iter_mut().enumerate() {
            if tau[i] == 0.0 && trial % 2 == 0 {
                continue; // probe the exact slice of vanished directions
            }
            let w = factor * tau[i].max(0.02 * null_tol);
            *yi = (2.0 * rng.gen::<f64>() - 1.0) * w;
        }
        let mut x = vec![0.0; p];
        for i in 0..p {
            for (j, yj) in y.iter().enumerate() {
                x[i] += u_full[(i, j)] * yj;
            }
        }
        if s_membership(q, &x)? {
            report.members += 1;
            let mut violated = false;
            for i in 0..p {
                if tau[i] > 0.0 && tau[i].is_finite() {
                    let ratio = y[i].abs() / (margin * tau[i]);
                    report.max_ratio = report.max_ratio.max(ratio);
                    if ratio > 1.0 {
                        violated = true;
                    }
                } else if tau[i] == 0.0 {
                    report.max_null_coord = report.max_null_coord.max(y[i].abs());
                    if y[i].abs() > null_tol {
                        violated = true;
                    }
                }
            }
            if violated {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// volume bounds
// ---------------------------------------------------------------------------

/// Squared distance from `z` to the zonotope `X·[-1,1]^d`, by projected
/// coordinate descent on the convex program `min |z − Xt|²`.
fn dist2_to_zonotope(x: &DMatrix<f64>, z: &[f64]) -> f64 {
    let d = x.ncols();
    let p = x.nrows();
    let norms2: Vec<f64> = (0..d).map(|j| x.column(j).norm_squared()).collect();
    let mut t = vec![0.0; d];
    let mut resid: Vec<f64> = z.to_vec();
    let mut prev = f64::INFINITY;
    for _ in 0..200 {
        for j in 0..d {
            if norms2[j] == 0.0 {
                continue;
            }
            let mut g = 0.0;
            for i in 0..p {
                g += x[(i, j)] * resid[i];
            }
            let step = (t[j] + g / norms2[j]).clamp(-1.0, 1.0) - t[j];
            if step != 0.0 {
                t[j] += step;
                for i in 0..p {
                    resid[i] -= step * x[(i, j)];
                }
            }
        }
        let cur: f64 = resid.iter().map(|v| v * v).sum();
        if prev - cur < 1e-13 * cur.max(1.0) {
            return cur;
        }
        prev = cur;
    }
    resid.iter().map(|v| v * v).sum()
}

/// Monte Carlo volume of `{X t + w : |t_i| ≤ 1, |w|₂ ≤ 1}` next to its
/// subdeterminant bound `1 + Σ_k D_k(X)`. Returns `(volume, bound)`.
pub fn neighborhood_volume_bound(
    x: &DMatrix<f64>,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64), Error> {
    let d = x.ncols();
    if x.nrows() != d {
        return Err(Error::invalid("X must be square"));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut bound = 1.0;
    for k in 1..=d {
        bound += max_subdet_f64(x, k)?;
    }
    // axis-aligned bounding box of the body
    let half: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|j| x[(i, j)].abs()).sum::<f64>() + 1.0)
        .collect();
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut hits = 0u64;
    let mut z = vec![0.0; d];
    for trial in 0..trials {
        let mut rng = rng_at(seed, 0x701D, trial);
        for (zi, h) in z.iter_mut().zip(&half) {
            *zi = (2.0 * rng.gen::<f64>() - 1.0) * h;
        }
        if dist2_to_zonotope(x, &z) <= 1.0 + 1e-12 {
            hits += 1;
        }
    }
    Ok((box_vol * hits as f64 / trials as f64, bound))
}

/// Constrained basis reduction: given independent vectors `v_i`, weights
/// `Y_i` and coordinate caps `Z_j`, build `w_i` whose parallelepiped
/// covers `{Σ y_i v_i : |y_i| ≤ Y_i, |coordinate_j| ≤ Z_j}` while each
/// `|w_i[j]|` stays within a constant of `min(Y_i |v_i|, Z_j)`.
pub fn basis_reduction(
    v: &[Vec<f64>],
    y: &[f64],
    z: &[f64],
) -> Result<Vec<Vec<f64>>, Error> {
    let d = v.len();
    if d == 0 || y.len() != d || z.len() != d {
        return Err(Error::invalid("need d vectors, d weights and d caps"));
    }
    for vi in v {
        if vi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: vi.len(),
            });
        }
    }
    if y.iter().chain(z).any(|&w| !(w > 0.0)) {
        return Err(Error::invalid("weights and caps must be positive"));
    }
    // sort by Y_i |v_i| nondecreasing; the i-th output then pairs with the
    // i-th largest reciprocal singular value
    let mut order: Vec<usize> = (0..d).collect();
    let weight = |i: usize| y[i] * v[i].iter().map(|a| a * a).sum::<f64>().sqrt();
    order.sort_by(|&a, &b| weight(a).partial_cmp(&weight(b)).unwrap());

    let ymat = DMatrix::from_fn(d, d, |r, c| y[order[c]] * v[order[c]][r]);
    let y_inv = ymat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("basis vectors are linearly dependent".into()))?;
    let mut stacked = DMatrix::zeros(2 * d, d);
    stacked.view_mut((0, 0), (d, d)).copy_from(&y_inv);
    for j in 0..d {
        stacked[(d + j, j)] = 1.0 / z[j];
    }
    let (_, s, vt) = svd_sorted(&stacked);
    if s.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::Singular("degenerate constraint matrix".into()));
    }
    // |stacked·x| ≤ 1 on the constrained body, so it is covered by the
    // columns of Vᵀ⁻¹ Σ⁻¹ = Vᵀᵀ Σ⁻¹ scaled by a dimensional constant
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            out[order[i]][j] = vt[(i, j)] / s[i];
        }
    }
    Ok(out)
}

/// Volume bound for the image of the admissible set under entrywise
/// rescaling: `1 + Σ_k D_k(W̃)` where
/// `W̃_ij = min(τ_{i+1}, μ_j²)/μ_j` is the extremal entry matrix.
/// The prescribed last coordinate `a` and the membership constant `c`
/// shift and scale the set but do not enter the bound formula.
pub fn voli_bound(
    m: &DMatrix<f64>,
    r: f64,
    _c: f64,
    mu: &[f64],
    _a: f64,
    eps_pivot: f64,
) -> Result<f64, Error> {
    let (p, k) = m.shape();
    if mu.len() != p - 1 {
        return Err(Error::invalid(format!(
            "mu must have p-1 = {} entries, got {}",
            p - 1,
            mu.len()
        )));
    }
    if mu.windows(2).any(|w| w[0] < w[1]) || mu.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::invalid("mu must be positive and nonincreasing"));
    }
    let sigma1 = singular_values(m).first().copied().unwrap_or(0.0);
    let pivot = m[(p - 1, 0)];
    if !(pivot > eps_pivot * sigma1) {
        return Err(Error::PivotTooSmall {
            value: pivot,
            threshold: eps_pivot * sigma1,
        });
    }
    let tau = tau_profile(m, r, k)?;
    let n = p - 1;
    let w = DMatrix::from_fn(n, n, |i, j| tau[i + 1].min(mu[j] * mu[j]) / mu[j]);
    let mut bound = 1.0;
    for kk in 1..=n {
        bound += max_subdet_f64(&w, kk)?;
    }
    Ok(bound)
}

/// Monte Carlo measure of
/// `{(x_1/μ_1, …, x_{p-1}/μ_{p-1}) + w : x ∈ S(M,R), x_p = a,
///   |x_i| ∈ [μ_i²/C, C μ_i²], |w| ≤ 1}`
/// by sampling admissible columns and covering their images with unit
/// balls. Used to check [`voli_bound`] empirically.
pub fn voli_measure_mc(
    q: &SBoxQuery,
    mu: &[f64],
    a: f64,
    trials: u64,
    seed: u64,
) -> Result<f64, Error> {
    let (p, _k) = q.m.shape();
    if mu.len() != p - 1 {
        return Err(Error::invalid("mu must have p-1 entries"));
    }
    // phase 1: collect members of the constrained slice
    let mut points: Vec<Vec<f64>> = Vec::new();
    let attempts = (trials / 4).clamp(2000, 40_000);
    for trial in 0..attempts {
        let mut rng = rng_at(seed, 0x111E, trial);
        let mut x = vec![0.0; p];
        for i in 0..p - 1 {
            let lo = mu[i] * mu[i] / q.c;
            let hi = q.c * mu[i] * mu[i];
            let mag = lo + (hi - lo) * rng.gen::<f64>();
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            x[i] = sign * mag;
        }
        x[p - 1] = a;
        if s_membership(q, &x)? {
            points.push((0..p - 1).map(|i| x[i] / mu[i]).collect());
        }
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    // phase 2: volume of the union of unit balls around the images,
    // using a unit-cell spatial hash for the distance queries
    let n = p - 1;
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (idx, pt) in points.iter().enumerate() {
        let key: Vec<i64> = pt.iter().map(|&c| c.floor() as i64).collect();
        cells.entry(key).or_default().push(idx);
    }
    let half: Vec<f64> = (0..n).map(|i| q.c * mu[i] + 1.0).collect();
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut hits = 0u64;
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for o in &offsets {
            for s in -1..=1i64 {
                let mut w = o.clone();
                w.push(s);
                next.push(w);
            }
        }
        offsets = next;
    }
    for trial in 0..trials {
        let mut rng = rng_at(seed, 0x111F, trial);
        let z: Vec<f64> = half
            .iter()
            .map(|&h| (2.0 * rng.gen::<f64>() - 1.0) * h)
            .collect();
        let base: Vec<i64> = z.iter().map(|&c| c.floor() as i64).collect();
        let mut inside = false;
        'cells: for off in &offsets {
            let key: Vec<i64> = base.iter().zip(off).map(|(b, o)| b + o).collect();
            if let Some(list) = cells.get(&key) {
                for &idx in list {
                    let d2: f64 = points[idx]
                        .iter()
                        .zip(&z)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 <= 1.0 {
                        inside = true;
                        break 'cells;
                    }
                }
            }
        }
        if inside {
            hits += 1;
        }
    }
    Ok(box_vol * hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(rows: &[&[f64]]) -> DMatrix<f64> {
        let p = rows.len();
        let q = rows[0].len();
        DMatrix::from_fn(p, q, |r, c| rows[r][c])
    }

    fn random_int_matrix(p: usize, q: usize, lim: i64, seed: u64, idx: u64) -> Vec<Vec<i64>> {
        let mut rng = rng_at(seed, 0x314, idx);
        (0..p)
            .map(|_| (0..q).map(|_| rng.gen_range(-lim..=lim)).collect())
            .collect()
    }

    fn to_dm(m: &[Vec<i64>]) -> DMatrix<f64> {
        DMatrix::from_fn(m.len(), m[0].len(), |r, c| m[r][c] as f64)
    }

    /// Independent oracle: recursive Laplace expansion over column subsets.
    fn minor_scan_oracle(m: &[Vec<i64>], k: usize) -> i128 {
        fn det_laplace(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> i128 {
            if rows.is_empty() {
                return 1;
            }
            let r = rows[0];
            let rest: Vec<usize> = rows[1..].to_vec();
            let mut acc = 0i128;
            for (pos, &c) in cols.iter().enumerate() {
                let sub: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != pos)
                    .map(|(_, &cc)| cc)
                    .collect();
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                acc += sign * m[r][c] as i128 * det_laplace(m, &rest, &sub);
            }
            acc
        }
        let p = m.len();
        let q = m[0].len();
        let mut best = 0i128;
        for_each_combination(p, k, |rows| {
            for_each_combination(q, k, |cols| {
                best = best.max(det_laplace(m, rows, cols).abs());
            });
        });
        best
    }

    #[test]
    fn max_subdet_basics() {
        let id3 = dm(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(max_subdet_f64(&id3, 2).unwrap(), 1.0);
        assert_eq!(max_subdet_f64(&id3, 0).unwrap(), 1.0);

        let diag = dm(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(max_subdet_f64(&diag, 2).unwrap(), 6.0);

        assert!(max_subdet_f64(&id3, 4).is_err());
    }

    #[test]
    fn exact_matches_minor_scan_oracle() {
        for idx in 0..12 {
            let m = random_int_matrix(4, 6, 6, 99, idx);
            for k in 1..=4 {
                assert_eq!(
                    max_subdet_int(&m, k).unwrap(),
                    minor_scan_oracle(&m, k),
                    "k={k} m={m:?}"
                );
            }
        }
    }

    #[test]
    fn exact_and_float_paths_agree() {
        for idx in 0..10 {
            let m = random_int_matrix(5, 5, 9, 7, idx);
            let f = to_dm(&m);
            for k in 1..=5 {
                let exact = max_subdet_int(&m, k).unwrap() as f64;
                let float = max_subdet_f64(&f, k).unwrap();
                assert!((exact - float).abs() <= 1e-6 * exact.max(1.0));
            }
        }
    }

    #[test]
    fn prefix_subdets() {
        let m = dm(&[&[0.0, 5.0, 1.0], &[1.0, 0.0, 2.0]]);
        assert_eq!(max_subdet_prefix(&m, 1, 1).unwrap(), 1.0);
        assert_eq!(max_subdet_prefix(&m, 1, 3).unwrap(), max_subdet_f64(&m, 1).unwrap());
        assert_eq!(max_subdet_prefix(&m, 2, 2).unwrap(), 5.0);
        assert!(max_subdet_prefix(&m, 2, 1).is_err());
        // nondecreasing in the prefix length
        let mut prev = 0.0;
        for l in 1..=3 {
            let v = max_subdet_prefix(&m, 1, l).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn singular_value_examples() {
        let s = singular_values(&dm(&[&[5.0, 0.0], &[0.0, 3.0]]));
        assert!((s[0] - 5.0).abs() < 1e-10 && (s[1] - 3.0).abs() < 1e-10);

        // rank-one outer product: (‖u‖‖v‖, 0)
        let u = [2.0, -1.0, 2.0];
        let v = [1.0, 3.0];
        let m = DMatrix::from_fn(3, 2, |r, c| u[r] * v[c]);
        let s = singular_values(&m);
        let expect = (u.iter().map(|x| x * x).sum::<f64>()
            * v.iter().map(|x| x * x).sum::<f64>())
        .sqrt();
        assert!((s[0] - expect).abs() < 1e-9);
        assert!(s[1].abs() < 1e-9);
    }

    fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_at(seed, 0x0F0F, 0);
        let g = DMatrix::from_fn(d, d, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let qr = g.qr();
        qr.q()
    }

    #[test]
    fn orthogonal_invariance() {
        for idx in 0..6 {
            let m = to_dm(&random_int_matrix(4, 5, 5, 21, idx));
            let u = random_orthogonal(4, idx);
            let um = &u * &m;
            let s1 = singular_values(&m);
            let s2 = singular_values(&um);
            for (a, b) in s1.iter().zip(&s2) {
                assert!((a - b).abs() <= 1e-9 * a.max(1.0), "σ invariance");
            }
            for k in 1..=4usize {
                let dk_um = max_subdet_f64(&um, k).unwrap();
                let dk_m = max_subdet_f64(&m, k).unwrap();
                let c = binom(4, k);
                assert!(dk_um <= c * dk_m * (1.0 + 1e-9), "Cauchy-Binet bound");
                assert!(dk_m <= c * dk_um * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn corollary_band_holds_on_random_matrices() {
        for (p, q) in [(2, 2), (3, 4), (4, 6), (5, 5), (6, 8)] {
            for idx in 0..40 {
                let m = random_int_matrix(p, q, 7, 1234, (p * 100 + q) as u64 * 1000 + idx);
                let prof = SubdetProfile::of_int(&m).unwrap();
                assert!(prof.corollary_band_ok(), "({p},{q}) idx={idx}");
            }
        }
    }

    #[test]
    fn rearrange_identity_like_matrix_is_trivial() {
        let m = dm(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]]);
        let perm = rearrange_columns(&m).unwrap();
        assert_eq!(perm, vec![0, 1, 2]);
    }

    #[test]
    fn rearrange_forced_swap() {
        let m = dm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let perm = rearrange_columns(&m).unwrap();
        let pm = permute_columns(&m, &perm);
        assert!(max_subdet_prefix(&pm, 1, 1).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn rearrange_postcondition_random() {
        let c = rearrange_constant(4, 6);
        assert!((c - 1.0 / 360.0).abs() < 1e-15);
        for idx in 0..60 {
            let m = random_int_matrix(4, 6, 5, 555, idx);
            let f = to_dm(&m);
            let perm = rearrange_columns(&f).unwrap();
            let pm = permute_columns_int(&m, &perm);
            for k in 1..=4usize {
                let dk = max_subdet_int(&m, k).unwrap();
                let prefix = max_subdet_prefix_int(&pm, k, k).unwrap();
                assert!(
                    prefix as f64 >= c * dk as f64 - 1e-9,
                    "idx={idx} k={k}: prefix {prefix} vs c*D_k = {}",
                    c * dk as f64
                );
            }
        }
    }

    #[test]
    fn rearrange_all_small_shapes() {
        for (p, q) in [(2, 2), (2, 4), (3, 3), (3, 5), (4, 4), (5, 5)] {
            for idx in 0..25 {
                let m = random_int_matrix(p, q, 3, 777, (p * 10 + q) as u64 * 100 + idx);
                let f = to_dm(&m);
                let perm = rearrange_columns(&f).unwrap();
                let pm = permute_columns_int(&m, &perm);
                let c = rearrange_constant(p, q);
                for k in 1..=p.min(q) {
                    let dk = max_subdet_int(&m, k).unwrap() as f64;
                    let prefix = max_subdet_prefix_int(&pm, k, k).unwrap() as f64;
                    assert!(
                        prefix >= c * dk - 1e-9,
                        "({p},{q}) idx={idx} k={k}: prefix={prefix} c*dk={} m={m:?} perm={perm:?}",
                        c * dk
                    );
                }
            }
        }
    }

    #[test]
    fn s_membership_examples() {
        // zero column never leaves S
        let m = dm(&[&[2.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let q = SBoxQuery::new(m.clone(), 1.0, 2.0).unwrap();
        assert!(s_membership(&q, &[0.0, 0.0, 0.0]).unwrap());

        // duplicating the first column keeps minors within C = 2
        let x: Vec<f64> = (0..3).map(|i| m[(i, 0)]).collect();
        assert!(s_membership(&q, &x).unwrap());

        // appending an orthogonal unit vector to e1 violates R = 0
        let m = dm(&[&[1.0], &[0.0]]);
        let q = SBoxQuery::new(m, 0.0, 2.0).unwrap();
        assert!(!s_membership(&q, &[0.0, 1.0]).unwrap());
    }

    #[test]
    fn tau_profile_examples() {
        let m = dm(&[&[4.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]);
        // D_2 = 8
        let tau = tau_profile(&m, 4.0, 2).unwrap();
        assert!((tau[0] - 4.0).abs() < 1e-12);
        assert!((tau[1] - 2.0).abs() < 1e-12);
        assert!((tau[2] - 0.5).abs() < 1e-12);

        let huge = tau_profile(&m, 1e9, 2).unwrap();
        assert!((huge[2] - 2.0).abs() < 1e-12, "min saturates at σ_k");

        let zero = tau_profile(&m, 0.0, 2).unwrap();
        assert_eq!(zero[2], 0.0);
    }

    #[test]
    fn box_cover_diagonal_matrix() {
        let m = dm(&[&[4.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]);
        let q = SBoxQuery::new(m, 4.0, 2.0).unwrap();
        // margin at the guarantee scale C·(k+1)!
        let margin = 2.0 * 6.0;
        let rep = box_cover_check(&q, 4000, margin, 42).unwrap();
        assert!(rep.members > 0, "sampler found members");
        assert_eq!(rep.violations, 0, "max ratio {}", rep.max_ratio);
    }

    #[test]
    fn box_cover_r_zero_kills_extra_directions() {
        let m = dm(&[&[3.0, 0.0], &[0.0, 1.5], &[0.0, 0.0]]);
        let q = SBoxQuery::new(m, 0.0, 2.0).unwrap();
        let rep = box_cover_check(&q, 4000, 12.0, 7).unwrap();
        assert!(rep.members > 0);
        assert_eq!(rep.violations, 0);
        assert!(rep.max_null_coord <= 1e-6 * 3.0);
    }

    #[test]
    fn box_cover_random_matrices() {
        for idx in 0..6 {
            let m = to_dm(&random_int_matrix(3, 2, 4, 31, idx));
            let q = SBoxQuery::new(m, 6.0, 2.0).unwrap();
            let rep = box_cover_check(&q, 3000, 12.0, idx).unwrap();
            assert_eq!(rep.violations, 0, "idx={idx} ratio={}", rep.max_ratio);
        }
    }

    #[test]
    fn neighborhood_volume_degenerate() {
        // X = 0: the body is the unit ball, bound = 1
        let x = DMatrix::zeros(2, 2);
        let (vol, bound) = neighborhood_volume_bound(&x, 40_000, 5).unwrap();
        assert_eq!(bound, 1.0);
        assert!((vol - std::f64::consts::PI).abs() < 0.15, "vol={vol}");
    }

    #[test]
    fn neighborhood_volume_identity_and_slab() {
        let x = DMatrix::identity(2, 2);
        let (vol, bound) = neighborhood_volume_bound(&x, 60_000, 6).unwrap();
        let exact = 4.0 + 8.0 + std::f64::consts::PI; // square ⊕ disk
        assert!((vol - exact).abs() < 0.4, "vol={vol} exact={exact}");
        assert_eq!(bound, 3.0);
        assert!(vol <= 6.0 * bound);

        // diag(10, 0): segment of length 20 thickened by the unit disk
        let x = dm(&[&[10.0, 0.0], &[0.0, 0.0]]);
        let (vol, bound) = neighborhood_volume_bound(&x, 60_000, 7).unwrap();
        let exact = 40.0 + std::f64::consts::PI;
        assert!((vol - exact).abs() < 1.5, "vol={vol} exact={exact}");
        assert_eq!(bound, 11.0);
    }

    #[test]
    fn basis_reduction_standard_basis() {
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = basis_reduction(&v, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        for wi in &w {
            for &c in wi {
                assert!(c.abs() <= 2.0, "entries stay O(min(Y|v|,Z))");
            }
        }
    }

    #[test]
    fn basis_reduction_entry_bounds_and_cover() {
        let mut worst_entry: f64 = 0.0;
        let mut worst_cover: f64 = 0.0;
        for idx in 0..8 {
            let mut rng = rng_at(61, 2, idx);
            let d = 3;
            let v: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
            let det = det_f64(
                &mut v.iter().flatten().cloned().collect::<Vec<f64>>(),
                d,
            );
            if det.abs() < 1e-3 {
                continue;
            }
            let y = [0.5, 2.0, 7.0];
            let z = [3.0, 1.0, 10.0];
            let w = basis_reduction(&v, &y, &z).unwrap();
            // entry bounds |w_i[j]| <= C min(Y_i |v_i|, Z_j)
            for i in 0..d {
                let vnorm = v[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                for j in 0..d {
                    let cap = (y[i] * vnorm).min(z[j]);
                    worst_entry = worst_entry.max(w[i][j].abs() / cap);
                }
            }
            // cover: sampled points of the constrained body expand with
            // bounded coefficients in the w-basis
            let wmat = DMatrix::from_fn(d, d, |r, c| w[c][r]);
            let winv = wmat.try_inverse().unwrap();
            for s in 0..200u64 {
                let mut r2 = rng_at(61, 3, idx * 1000 + s);
                let ys: Vec<f64> = y.iter().map(|&yi| (2.0 * r2.gen::<f64>() - 1.0) * yi).collect();
                let mut pt = vec![0.0; d];
                for i in 0..d {
                    for j in 0..d {
                        pt[j] += ys[i] * v[i][j];
                    }
                }
                if pt.iter().zip(&z).any(|(&c, &cap)| c.abs() > cap) {
                    continue;
                }
                let coeffs = &winv * DMatrix::from_column_slice(d, 1, &pt);
                for i in 0..d {
                    worst_cover = worst_cover.max(coeffs[(i, 0)].abs());
                }
            }
        }
        println!("basis reduction: entry constant {worst_entry:.3}, cover constant {worst_cover:.3}");
        assert!(worst_entry <= 4.0);
        assert!(worst_cover <= 4.0);
    }

    #[test]
    fn basis_reduction_z_inactive() {
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let y = [2.0, 3.0];
        let w = basis_reduction(&v, &y, &[1e12, 1e12]).unwrap();
        for (i, wi) in w.iter().enumerate() {
            let norm = wi.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(norm <= 4.0 * y[i], "Z caps inactive: |w_i| ~ Y_i|v_i|");
        }
    }

    #[test]
    fn basis_reduction_singular_input() {
        let v = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(
            basis_reduction(&v, &[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn voli_bound_cases() {
        // rank-one matrix: every τ beyond the first vanishes, bound = 1
        let m = dm(&[&[2.0, 4.0], &[0.0, 0.0], &[1.0, 2.0]]);
        let b = voli_bound(&m, 0.0, 2.0, &[2.0, 1.0], 5.0, 0.05).unwrap();
        assert!((b - 1.0).abs() < 1e-9, "b={b}");

        // caps dominate: μ_j² ≥ τ_{i+1} everywhere, so W̃_ij = τ_{i+1}/μ_j
        let m = dm(&[&[4.0, 0.0], &[0.0, 2.0], &[1.0, 0.5]]);
        let tau = tau_profile(&m, 1e6, 2).unwrap();
        let mu = [4.0, 2.0];
        let b = voli_bound(&m, 1e6, 2.0, &mu, 3.0, 0.05).unwrap();
        let w = dm(&[
            &[tau[1] / 4.0, tau[1] / 2.0],
            &[tau[2] / 4.0, tau[2] / 2.0],
        ]);
        let expect = 1.0
            + max_subdet_f64(&w, 1).unwrap()
            + max_subdet_f64(&w, 2).unwrap();
        assert!((b - expect).abs() <= 1e-9 * expect);

        // pivot precondition
        let m = dm(&[&[4.0, 0.0], &[0.0, 2.0], &[1e-9, 0.0]]);
        assert!(matches!(
            voli_bound(&m, 1.0, 2.0, &[1.0, 1.0], 1.0, 0.05),
            Err(Error::PivotTooSmall { .. })
        ));
    }

    #[test]
    fn voli_measure_within_bound() {
        for idx in 0..4 {
            let mut m = random_int_matrix(3, 2, 5, 91, idx);
            m[2][0] = 7; // sturdy last-row pivot
            let f = to_dm(&m);
            if singular_values(&f)[1] < 0.5 {
                continue;
            }
            let r = 2.0 * max_subdet_f64(&f, 2).unwrap();
            let q = SBoxQuery::new(f.clone(), r, 2.0).unwrap();
            let mu = [2.0, 1.0];
            let measure = voli_measure_mc(&q, &mu, 3.0, 20_000, idx).unwrap();
            let bound = voli_bound(&f, r, 2.0, &mu, 3.0, 0.05).unwrap();
            assert!(
                measure <= 50.0 * bound,
                "idx={idx}: measure {measure} vs bound {bound}"
            );
        }
    }
}
