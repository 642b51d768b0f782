//! Even cutoff functions on the line: either a sharp indicator window or a
//! `C²` plateau built from smoothstep transitions.
//!
//! Every cutoff χ here takes values between 0 and 1, with χ(x) = 1 for
//! |x| ≤ 1/2 and χ(x) = 0 for |x| ≥ 1 (for the indicator the outer
//! boundary is treated half-open, see [`CutoffSpec::eval`]).

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffKind {
    Indicator,
    SmoothPlateau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    /// Transition polynomial degree for the smooth plateau; 5 gives `C²`
    /// joins, 7 gives `C³`. Ignored for the indicator.
    pub degree: u32,
}

impl CutoffSpec {
    pub fn indicator() -> Self {
        CutoffSpec {
            kind: CutoffKind::Indicator,
            degree: 0,
        }
    }

    pub fn smooth() -> Self {
        CutoffSpec {
            kind: CutoffKind::SmoothPlateau,
            degree: 5,
        }
    }

    pub fn smooth_with_degree(degree: u32) -> Result<Self, Error> {
        if degree != 5 && degree != 7 {
            return Err(Error::invalid(format!(
                "plateau transition degree must be 5 or 7, got {degree}"
            )));
        }
        Ok(CutoffSpec {
            kind: CutoffKind::SmoothPlateau,
            degree,
        })
    }

    /// Evaluate the cutoff. The indicator uses the half-open convention
    /// `1` on `[-1, 1)` so that lattice sums against it agree exactly with
    /// the difference of two strict counting functions.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            CutoffKind::Indicator => {
                if (-1.0..1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffKind::SmoothPlateau => {
                let a = x.abs();
                if a <= 0.5 {
                    1.0
                } else if a >= 1.0 {
                    0.0
                } else {
                    let s = 2.0 * a - 1.0; // transition variable in (0,1)
                    1.0 - smoothstep(s, self.degree)
                }
            }
        }
    }
}

/// Monotone polynomial ramp from 0 to 1 on [0,1] with vanishing derivatives
/// at both ends (two vanishing derivatives for degree 5, three for 7).
fn smoothstep(s: f64, degree: u32) -> f64 {
    match degree {
        5 => s * s * s * (10.0 + s * (-15.0 + 6.0 * s)),
        7 => s * s * s * s * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s))),
        _ => unreachable!("validated at construction"),
    }
}
