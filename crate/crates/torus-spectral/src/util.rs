//! Small shared helpers: exact rational/decimal conversion, deterministic
//! counter-based RNG construction, and fixed-format float printing.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

/// Exact rational value of an `f64` (every finite float is a dyadic rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parse a decimal string ("1.5", "-0.25", "3"), scientific notation
/// ("2e-4", read exactly as 2/10⁴), or a fraction ("3/2") into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some(pos) = s.find(['e', 'E']) {
        let mantissa = parse_rational(&s[..pos])?;
        let exp: i32 = s[pos + 1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        let pow = BigInt::from(10u32).pow(exp.unsigned_abs());
        let scale = if exp >= 0 {
            BigRational::from_integer(pow)
        } else {
            BigRational::new(BigInt::one(), pow)
        };
        return Ok(mantissa * scale);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("empty number {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad digits in {s:?}")))?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(BigInt::from(sign) * n, den))
}

/// Render a rational exactly: finite decimal when the reduced denominator
/// is of the form 2^a 5^b, otherwise "p/q".
pub fn rational_to_string(r: &BigRational) -> String {
    let mut den = r.denom().clone();
    if den.sign() == Sign::Minus {
        den = -den;
    }
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    // scale to 10^k with k = max(twos, fives)
    let k = twos.max(fives);
    let scale = BigInt::from(2).pow(k - twos.min(k)) * BigInt::from(5).pow(k - fives.min(k));
    let scaled = r.numer() * &scale;
    let neg = scaled.sign() == Sign::Minus;
    let digits = scaled.abs().to_string();
    let s = if k == 0 {
        digits
    } else {
        let k = k as usize;
        let padded = if digits.len() <= k {
            format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - k);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

/// Fixed 17-significant-digit formatting for floats in emitted artifacts,
/// so reruns are byte-identical.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    format!("{x:.16e}")
}

/// SplitMix64 step, used to key per-index generators.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic generator keyed by `(seed, stream, index)`. Two calls with
/// the same key yield identical generators, independent of call order, so
/// sampling loops can be parallelised without changing results.
pub fn rng_at(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(stream ^ splitmix64(index)));
    ChaCha8Rng::seed_from_u64(key)
}

/// Least-squares slope of `y` against `x` (used for log-log exponent fits).
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

/// Largest power of two `<= x` (x >= 1).
pub fn dyadic_floor(x: f64) -> u64 {
    debug_assert!(x >= 1.0);
    1u64 << (x.log2().floor() as u32).min(62)
}

/// Dyadic bucket of a positive integer `q`: the unique power of two `Q`
/// with `Q/2 <= q < Q`.
pub fn dyadic_bucket(q: u64) -> u64 {
    debug_assert!(q >= 1);
    let mut quo = 1u64;
    while quo <= q {
        quo <<= 1;
    }
    quo
}
