//! Exact lattice-shell counting, Weyl-sum evaluation and subdeterminant
//! machinery for positive-definite quadratic forms on tori.
//!
//! The crate is organised around six subsystems:
//!
//! * [`quadform`] — exact quadratic forms on `Z^d` and the two generic
//!   sampling families (diagonal forms with coefficients in `[1,2]`, and
//!   near-identity symmetric forms with small off-diagonal entries).
//! * [`lattice`] — exact counts `N(λ)` of lattice points in ellipsoidal
//!   balls, thin-shell counts `N(λ+δ) − N(λ−δ)`, the volume error term
//!   `P(λ)`, and the `L¹→L∞` projector norm as a lattice sum.
//! * [`weyl`] — truncated Weyl sums `K_N` and their one-dimensional
//!   factors, Dirichlet approximation, major/minor arc classification,
//!   and the dispersive / Weyl-differencing bound proxies.
//! * [`subdet`] — maximal `k×k` subdeterminants `D_k`, singular values,
//!   column rearrangement, membership in the set `S(M,R)` of admissible
//!   extension columns, and the associated volume bounds.
//! * [`count`] — the squared-entry matrix `P(M)`, exact counts
//!   `Z_{d,b}(μ,L)` of matrices with prescribed dyadic subdeterminants,
//!   Monte Carlo moment estimates and the dyadic maximisation machinery.
//! * [`bounds`] — closed-form evaluators and regime classifiers for the
//!   projector-norm bounds and conjectured envelopes.
//!
//! Everything is deterministic: all randomness flows from explicit seeds
//! through counter-based generators, and exact integer reductions are
//! independent of evaluation order. Run `cargo run --example` for a tour,
//! or use the `torus-spectral` binary for the command-line interface.

pub mod bounds;
pub mod count;
pub mod cutoff;
pub mod error;
pub mod lattice;
pub mod quadform;
pub mod subdet;
pub mod util;
pub mod verify;
pub mod weyl;

pub use cutoff::CutoffSpec;
pub use error::Error;
pub use quadform::{FormKind, GenericSampler, QuadForm, SamplerFamily};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Default cap on enumeration work (lattice columns, matrices, minors).
/// Override with the `TORUS_SPECTRAL_BUDGET` environment variable.
pub fn enumeration_budget() -> u64 {
    std::env::var("TORUS_SPECTRAL_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000_000)
}
