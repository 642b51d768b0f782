//! Positive-definite quadratic forms on `Z^d` with exact rational
//! coefficients, plus deterministic samplers for the two generic families:
//! diagonal forms with coefficients in `[1,2]`, and near-identity symmetric
//! forms with off-diagonal entries bounded by `1/(10 d²)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::util::{parse_rational, rational_from_f64, rational_to_string, rng_at};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Diagonal,
    FullSymmetric,
}

/// A positive-definite quadratic form `Q(n) = Σ β_ij n_i n_j` with exact
/// rational coefficients. A floating Cholesky factor is cached for
/// enumeration bounds; it is never used for exact membership decisions.
#[derive(Debug, Clone)]
pub struct QuadForm {
    dim: usize,
    kind: FormKind,
    /// Full symmetric matrix, row major, exact.
    coeffs: Vec<BigRational>,
    /// Integerised coefficients: `coeffs[i][j] = int_coeffs[i][j] / int_den`.
    int_coeffs: Vec<BigInt>,
    int_den: BigInt,
    /// Float image of the coefficients.
    coeffs_f64: Vec<f64>,
    /// Lower-triangular `L` with `L Lᵀ ≈ coeffs`, row major.
    chol: Vec<f64>,
}

impl QuadForm {
    /// Build a form from a full symmetric coefficient matrix. Fails if the
    /// matrix is not symmetric or not positive definite (the definiteness
    /// check runs in exact rational arithmetic).
    pub fn new(coeffs: Vec<Vec<BigRational>>) -> Result<Self, Error> {
        let dim = coeffs.len();
        if dim == 0 {
            return Err(Error::invalid("empty coefficient matrix"));
        }
        for row in &coeffs {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        for i in 0..dim {
            for j in 0..i {
                if coeffs[i][j] != coeffs[j][i] {
                    return Err(Error::invalid(format!(
                        "coefficients not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        exact_positive_definite(&coeffs)?;
        let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || coeffs[i][j].is_zero()));
        let kind = if diagonal {
            FormKind::Diagonal
        } else {
            FormKind::FullSymmetric
        };
        let flat: Vec<BigRational> = coeffs.into_iter().flatten().collect();

        let mut int_den = BigInt::one();
        for c in &flat {
            int_den = num_integer::lcm(int_den, c.denom().clone());
        }
        let int_coeffs: Vec<BigInt> = flat
            .iter()
            .map(|c| c.numer() * (&int_den / c.denom()))
            .collect();
        let coeffs_f64: Vec<f64> = flat.iter().map(|c| c.to_f64().unwrap()).collect();
        if coeffs_f64.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("coefficients exceed the f64 range"));
        }
        let chol = float_cholesky(&coeffs_f64, dim)?;
        Ok(QuadForm {
            dim,
            kind,
            coeffs: flat,
            int_coeffs,
            int_den,
            coeffs_f64,
            chol,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(vec![BigRational::one(); dim]).expect("identity is positive definite")
    }

    pub fn diagonal(diag: Vec<BigRational>) -> Result<Self, Error> {
        let d = diag.len();
        let mut coeffs = vec![vec![BigRational::zero(); d]; d];
        for (i, b) in diag.into_iter().enumerate() {
            coeffs[i][i] = b;
        }
        Self::new(coeffs)
    }

    /// Convenience constructor from float entries (promoted exactly).
    pub fn from_f64_matrix(m: &[Vec<f64>]) -> Result<Self, Error> {
        Self::new(
            m.iter()
                .map(|row| row.iter().map(|&x| rational_from_f64(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigRational {
        &self.coeffs[i * self.dim + j]
    }

    pub fn coeff_f64(&self, i: usize, j: usize) -> f64 {
        self.coeffs_f64[i * self.dim + j]
    }

    /// Lower-triangular Cholesky factor `L` (row major, `d×d`) with
    /// `L Lᵀ ≈ coeffs`. Used only to bound enumeration ranges.
    pub fn cholesky(&self) -> &[f64] {
        &self.chol
    }

    /// Exact evaluation `Q(n) = Σ β_ij n_i n_j`.
    pub fn eval(&self, n: &[i64]) -> Result<BigRational, Error> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: n.len(),
            });
        }
        Ok(BigRational::new(self.eval_scaled(n), self.int_den.clone()))
    }

    /// Exact numerator of `Q(n)` over the common denominator `int_den`.
    pub(crate) fn eval_scaled(&self, n: &[i64]) -> BigInt {
        let d = self.dim;
        let mut acc = BigInt::zero();
        for i in 0..d {
            for j in 0..d {
                if n[i] != 0 && n[j] != 0 {
                    acc += &self.int_coeffs[i * d + j] * BigInt::from(n[i] as i128 * n[j] as i128);
                }
            }
        }
        acc
    }

    pub(crate) fn int_den(&self) -> &BigInt {
        &self.int_den
    }

    /// Floating evaluation, used as a prefilter before exact confirmation.
    pub fn eval_f64(&self, n: &[i64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            let ni = n[i] as f64;
            if ni == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..d {
                row += self.coeffs_f64[i * d + j] * n[j] as f64;
            }
            acc += ni * row;
        }
        acc
    }

    /// Determinant of the coefficient matrix, exact.
    pub fn det(&self) -> BigRational {
        let d = self.dim;
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| self.coeffs[i * d + j].clone()).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..d {
            let pivot_row = (k..d).find(|&r| !m[r][k].is_zero());
            let Some(p) = pivot_row else {
                return BigRational::zero();
            };
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            let pivot = m[k][k].clone();
            det *= &pivot;
            for r in k + 1..d {
                let factor = &m[r][k] / &pivot;
                for c in k..d {
                    let sub = &factor * &m[k][c];
                    m[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Volume of the unit ball `{Q < 1}`: `ω_d / sqrt(det β)`.
    pub fn unit_ball_volume(&self) -> f64 {
        euclidean_ball_volume(self.dim) / self.det().to_f64().unwrap().sqrt()
    }

    /// Check the generic-family coefficient boxes: diagonal entries in
    /// `[1,2]`, off-diagonal magnitudes at most `1/(10 d²)`.
    pub fn in_generic_box(&self) -> bool {
        let d = self.dim;
        let one = BigRational::one();
        let two = &one + &one;
        let half_width = BigRational::new(BigInt::one(), BigInt::from(10 * (d * d) as i64));
        for i in 0..d {
            let c = self.coeff(i, i);
            if c < &one || c > &two {
                return false;
            }
            for j in 0..d {
                if i != j && self.coeff(i, j).abs() > half_width {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.dim;
        let rows: Vec<Vec<String>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| rational_to_string(self.coeff(i, j)))
                    .collect()
            })
            .collect();
        serde_json::json!({
            "dim": d,
            "kind": match self.kind {
                FormKind::Diagonal => "diagonal",
                FormKind::FullSymmetric => "full-symmetric",
            },
            "coeffs": rows,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, Error> {
        let dim = v
            .get("dim")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("missing \"dim\"".into()))? as usize;
        let coeffs_v = v
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("missing \"coeffs\"".into()))?;
        if coeffs_v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coeffs_v.len(),
            });
        }
        let mut rows = Vec::with_capacity(dim);
        for row_v in coeffs_v {
            let row_v = row_v
                .as_array()
                .ok_or_else(|| Error::Parse("coeff rows must be arrays".into()))?;
            let mut row = Vec::with_capacity(dim);
            for cell in row_v {
                let r = match cell {
                    serde_json::Value::String(s) => parse_rational(s)?,
                    serde_json::Value::Number(n) => {
                        if let Some(i) = n.as_i64() {
                            BigRational::from_integer(BigInt::from(i))
                        } else {
                            rational_from_f64(n.as_f64().unwrap())
                        }
                    }
                    _ => return Err(Error::Parse("coeff entries must be numbers/strings".into())),
                };
                row.push(r);
            }
            rows.push(row);
        }
        Self::new(rows)
    }
}

/// Exact positive-definiteness via fraction-free `LDLᵀ` pivots.
fn exact_positive_definite(coeffs: &[Vec<BigRational>]) -> Result<(), Error> {
    let d = coeffs.len();
    let mut m: Vec<Vec<BigRational>> = coeffs.to_vec();
    for k in 0..d {
        let pivot = m[k][k].clone();
        if !pivot.is_positive() {
            return Err(Error::NotPositiveDefinite {
                index: k,
                pivot: pivot.to_f64().unwrap_or(f64::NEG_INFINITY),
            });
        }
        for r in k + 1..d {
            let factor = &m[r][k] / &pivot;
            for c in k..d {
                let sub = &factor * &m[k][c];
                m[r][c] -= sub;
            }
        }
    }
    Ok(())
}

/// Dense floating Cholesky, `L Lᵀ = A`, lower triangular row-major.
fn float_cholesky(a: &[f64], d: usize) -> Result<Vec<f64>, Error> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Ok(l)
}

/// Volume of the Euclidean unit ball in dimension `d`.
pub fn euclidean_ball_volume(d: usize) -> f64 {
    // ω_d = π^{d/2} / Γ(d/2 + 1), via the half-integer recurrence.
    let mut v = 1.0; // d = 0
    if d >= 1 {
        let mut prev = 2.0; // d = 1
        if d == 1 {
            return prev;
        }
        for k in 2..=d {
            let next = 2.0 * std::f64::consts::PI * v / k as f64;
            v = prev;
            prev = next;
        }
        return prev;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerFamily {
    /// Diagonal forms with each coefficient uniform in `[1,2]`.
    Rectangular,
    /// Identity plus a symmetric perturbation with entries uniform in
    /// `[-1/(10 d²), 1/(10 d²)]` (diagonal entries stay in `[1,2]`).
    Full,
}

/// Deterministic stream of generic forms. The `index`-th form depends only
/// on `(seed, family, dim, index)`, so streams are reproducible regardless
/// of evaluation order.
#[derive(Debug, Clone)]
pub struct GenericSampler {
    pub seed: u64,
    pub family: SamplerFamily,
    pub dim: usize,
    next_index: u64,
}

impl GenericSampler {
    pub fn new(seed: u64, family: SamplerFamily, dim: usize) -> Self {
        GenericSampler {
            seed,
            family,
            dim,
            next_index: 0,
        }
    }

    /// The form at a given stream position.
    pub fn form_at(&self, index: u64) -> QuadForm {
        let stream = match self.family {
            SamplerFamily::Rectangular => 0xA11CE,
            SamplerFamily::Full => 0xB0B,
        };
        let mut rng = rng_at(self.seed, stream ^ (self.dim as u64) << 32, index);
        let d = self.dim;
        match self.family {
            SamplerFamily::Rectangular => {
                let diag: Vec<BigRational> = (0..d)
                    .map(|_| rational_from_f64(1.0 + rng.gen::<f64>()))
                    .collect();
                QuadForm::diagonal(diag).expect("diagonal entries in [1,2]")
            }
            SamplerFamily::Full => {
                let half_width_exact =
                    BigRational::new(BigInt::one(), BigInt::from(10 * (d * d) as i64));
                // largest float not exceeding the exact box half-width
                let mut hw = 1.0 / (10.0 * (d * d) as f64);
                if rational_from_f64(hw) > half_width_exact {
                    hw = f64::from_bits(hw.to_bits() - 1);
                }
                let mut coeffs = vec![vec![BigRational::zero(); d]; d];
                for i in 0..d {
                    coeffs[i][i] = rational_from_f64(1.0 + rng.gen::<f64>());
                }
                for i in 0..d {
                    for j in i + 1..d {
                        let h = (2.0 * rng.gen::<f64>() - 1.0) * hw;
                        let h = h.clamp(-hw, hw);
                        let r = rational_from_f64(h);
                        coeffs[i][j] = r.clone();
                        coeffs[j][i] = r;
                    }
                }
                QuadForm::new(coeffs).expect("diagonally dominant perturbation")
            }
        }
    }

    /// Next form in the stream.
    pub fn sample(&mut self) -> QuadForm {
        let f = self.form_at(self.next_index);
        self.next_index += 1;
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn eval_identity_examples() {
        let q = QuadForm::identity(2);
        assert_eq!(q.eval(&[0, 0]).unwrap(), BigRational::zero());
        assert_eq!(q.eval(&[1, 1]).unwrap(), BigRational::from_i64(2).unwrap());
    }

    #[test]
    fn eval_diagonal_example() {
        // 3/2 * 4 + 2 * 1 = 8
        let q = QuadForm::diagonal(vec![rat(3, 2), rat(2, 1)]).unwrap();
        assert_eq!(q.eval(&[2, 1]).unwrap(), BigRational::from_i64(8).unwrap());
    }

    #[test]
    fn eval_dimension_mismatch() {
        let q = QuadForm::identity(2);
        assert!(matches!(
            q.eval(&[1, 2, 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eval_is_even() {
        let mut s = GenericSampler::new(3, SamplerFamily::Full, 3);
        let q = s.sample();
        for n in [[1, -2, 3], [0, 5, -1], [7, 7, 7]] {
            let neg: Vec<i64> = n.iter().map(|x| -x).collect();
            assert_eq!(q.eval(&n).unwrap(), q.eval(&neg).unwrap());
        }
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let q = QuadForm::identity(3);
        let l = q.cholesky();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((l[i * 3 + j] - expect).abs() < 1e-15);
            }
        }
        let q = QuadForm::diagonal(vec![rat(4, 1), rat(9, 1)]).unwrap();
        let l = q.cholesky();
        assert!((l[0] - 2.0).abs() < 1e-15);
        assert!((l[3] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_reconstructs_random_form() {
        let q = GenericSampler::new(11, SamplerFamily::Full, 3).form_at(0);
        let l = q.cholesky();
        let d = q.dim();
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += l[i * d + k] * l[j * d + k];
                }
                assert!(
                    (s - q.coeff_f64(i, j)).abs() <= 1e-12,
                    "LLᵀ mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn not_positive_definite_rejected() {
        let err = QuadForm::diagonal(vec![rat(1, 1), rat(-1, 1)]);
        assert!(matches!(err, Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn sampler_families_respect_boxes() {
        let q = GenericSampler::new(0, SamplerFamily::Rectangular, 2).form_at(0);
        assert_eq!(q.kind(), FormKind::Diagonal);
        assert!(q.in_generic_box());

        let q = GenericSampler::new(0, SamplerFamily::Full, 3).form_at(0);
        assert!(q.in_generic_box());
        let bound = rat(1, 90);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(q.coeff(i, j).abs() <= bound);
                }
            }
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = GenericSampler::new(42, SamplerFamily::Full, 4).form_at(7);
        let b = GenericSampler::new(42, SamplerFamily::Full, 4).form_at(7);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.coeff(i, j), b.coeff(i, j));
            }
        }
    }

    #[test]
    fn sampled_forms_dominate_09_norm() {
        // diagonal dominance gives Q(n) >= 0.9 |n|² on both families
        for family in [SamplerFamily::Rectangular, SamplerFamily::Full] {
            let mut s = GenericSampler::new(5, family, 3);
            for _ in 0..5 {
                let q = s.sample();
                for n in [[1i64, 0, 0], [2, -3, 1], [5, 5, -5]] {
                    let norm2: i64 = n.iter().map(|x| x * x).sum();
                    let lhs = q.eval(&n).unwrap();
                    let rhs = rat(9 * norm2, 10);
                    assert!(lhs >= rhs, "Q(n) >= 0.9|n|² violated");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let q = GenericSampler::new(9, SamplerFamily::Full, 2).form_at(3);
        let v = q.to_json();
        let q2 = QuadForm::from_json(&v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(q.coeff(i, j), q2.coeff(i, j));
            }
        }
        assert_eq!(q.kind(), q2.kind());
    }

    #[test]
    fn ball_volumes() {
        assert!((euclidean_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((euclidean_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!((euclidean_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
        let q = QuadForm::diagonal(vec![rat(4, 1), rat(1, 1)]).unwrap();
        assert!((q.unit_ball_volume() - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }
}
