//! Closed-form evaluators and regime classifiers for the projector-norm
//! bounds: the Euclidean envelope, the unit-width compact-manifold bound,
//! the conjectured envelopes for arbitrary and generic tori, the
//! harmonic-analysis admissibility window, the geometry-of-numbers family,
//! and the decoupling bound at the critical exponent.
//!
//! Everything here is a pure function of `(d, p, λ, δ, ε)`. The Lebesgue
//! exponent may be infinite; all `1/p` terms then evaluate to zero.
//!
//! Only statement values are computed. The machinery that produces them —
//! the short-time/long-time operator splitting, the `TT*` duality step and
//! the interpolation between the critical exponent and `p = ∞` — is not
//! implemented as operators; its output is captured by the closed forms
//! below and probed empirically by the lattice and Weyl subsystems.

use serde::Serialize;

use crate::count::maximized_bound;
use crate::error::Error;

/// Lebesgue exponent in `[2, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExp {
    Finite(f64),
    Infinity,
}

impl PExp {
    pub fn parse(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(PExp::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
        PExp::new(v)
    }

    pub fn new(v: f64) -> Result<Self, Error> {
        if !(v >= 2.0) {
            return Err(Error::invalid("p must lie in [2, ∞]"));
        }
        Ok(if v.is_infinite() {
            PExp::Infinity
        } else {
            PExp::Finite(v)
        })
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn inv(&self) -> f64 {
        match self {
            PExp::Finite(v) => 1.0 / v,
            PExp::Infinity => 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PExp::Infinity)
    }
}

impl std::fmt::Display for PExp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PExp::Finite(v) => write!(f, "{v}"),
            PExp::Infinity => write!(f, "inf"),
        }
    }
}

/// Parameters of a bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct BoundParams {
    pub d: usize,
    pub p: PExp,
    pub lambda: f64,
    pub delta: f64,
    pub eps: f64,
}

impl BoundParams {
    pub fn new(d: usize, p: PExp, lambda: f64, delta: f64, eps: f64) -> Result<Self, Error> {
        if d < 2 {
            return Err(Error::invalid("d must be at least 2"));
        }
        if !(lambda >= 1.0) {
            return Err(Error::invalid("lambda must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0,1)"));
        }
        if !(eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        Ok(BoundParams {
            d,
            p,
            lambda,
            delta,
            eps,
        })
    }

    /// The critical exponent `2(d+1)/(d-1)`.
    pub fn p_st(&self) -> f64 {
        2.0 * (self.d as f64 + 1.0) / (self.d as f64 - 1.0)
    }

    /// `σ(p) = d - 1 - 2d/p`.
    pub fn sigma(&self) -> f64 {
        self.d as f64 - 1.0 - 2.0 * self.d as f64 * self.p.inv()
    }

    fn above_critical(&self) -> bool {
        match self.p {
            PExp::Infinity => true,
            PExp::Finite(v) => v >= self.p_st(),
        }
    }
}

/// Euclidean two-branch envelope:
/// `λ^{σ(p)/2} δ^{1/2}` above the critical exponent,
/// `λ^{(d-1)/2 (1/2-1/p)} δ^{(d+1)/2 (1/2-1/p)}` below.
pub fn stein_tomas(bp: &BoundParams) -> f64 {
    let half_gap = 0.5 - bp.p.inv();
    if bp.above_critical() {
        bp.lambda.powf(bp.sigma() / 2.0) * bp.delta.sqrt()
    } else {
        bp.lambda.powf((bp.d as f64 - 1.0) / 2.0 * half_gap)
            * bp.delta.powf((bp.d as f64 + 1.0) / 2.0 * half_gap)
    }
}

/// Unit-width bound on compact manifolds: drop the `δ` factors.
pub fn sogge(bp: &BoundParams) -> f64 {
    let half_gap = 0.5 - bp.p.inv();
    if bp.above_critical() {
        bp.lambda.powf(bp.sigma() / 2.0)
    } else {
        bp.lambda.powf((bp.d as f64 - 1.0) / 2.0 * half_gap)
    }
}

/// The conjectured three-term envelope
/// `1 + (λδ)^{(d-1)/2 (1/2-1/p)} + λ^{(d-1)/2 - d/p} δ^{1/2}`.
fn conjecture_value(bp: &BoundParams) -> f64 {
    let half_gap = 0.5 - bp.p.inv();
    let d = bp.d as f64;
    1.0 + (bp.lambda * bp.delta).powf((d - 1.0) / 2.0 * half_gap)
        + bp.lambda.powf((d - 1.0) / 2.0 - d * bp.p.inv()) * bp.delta.sqrt()
}

/// Envelope for arbitrary tori; valid for `δ > λ^{-1}`.
pub fn conjecture_arbitrary(bp: &BoundParams) -> (f64, bool) {
    (conjecture_value(bp), bp.delta > 1.0 / bp.lambda)
}

/// Envelope for generic tori; the validity window widens to
/// `δ > λ^{1-d+ε}`.
pub fn conjecture_generic(bp: &BoundParams) -> (f64, bool) {
    (
        conjecture_value(bp),
        bp.delta > bp.lambda.powf(1.0 - bp.d as f64 + bp.eps),
    )
}

/// `L¹→L∞` specialisation of the generic envelope: `1 + δ λ^{d-1+ε}`.
pub fn conjecture_generic_l1linf(d: usize, lambda: f64, delta: f64, eps: f64) -> f64 {
    1.0 + delta * lambda.powf(d as f64 - 1.0 + eps)
}

/// Admissibility window of the harmonic-analysis result: requires
/// `p > p_ST` and either
/// `δ > max(λ^{-1}, λ^{(p/(p-2))[1 - d/2 + (1/p)(d²-d-2)/(d-1)] + ε})` or
/// `λ^{1 - d/2 + (1/p) d(d-3)/(d-1) + ε} < δ < λ^{-1}`.
pub fn generic_window_applicable(bp: &BoundParams) -> bool {
    let d = bp.d as f64;
    match bp.p {
        PExp::Finite(v) if v <= bp.p_st() => return false,
        _ => {}
    }
    let inv_p = bp.p.inv();
    // p/(p-2) = 1/(1 - 2/p)
    let amplify = 1.0 / (1.0 - 2.0 * inv_p);
    let e1 = amplify * (1.0 - d / 2.0 + inv_p * (d * d - d - 2.0) / (d - 1.0)) + bp.eps;
    let first = bp.delta > (1.0 / bp.lambda).max(bp.lambda.powf(e1));
    let e2 = 1.0 - d / 2.0 + inv_p * d * (d - 3.0) / (d - 1.0) + bp.eps;
    let second = bp.lambda.powf(e2) < bp.delta && bp.delta < 1.0 / bp.lambda;
    first || second
}

/// Value proved inside the admissibility window: the third conjecture term
/// `λ^{(d-1)/2 - d/p} δ^{1/2}`.
pub fn generic_window_value(bp: &BoundParams) -> f64 {
    let d = bp.d as f64;
    bp.lambda.powf((d - 1.0) / 2.0 - d * bp.p.inv()) * bp.delta.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallDeltaVariant {
    /// `δ < λ^{1-2d-ε}`: the projector norm is bounded by a constant.
    VerySmall,
    /// integer `a ∈ [d, 2d]`, `λ^{-a} ≤ δ ≤ λ^{1-a}`:
    /// `δ^{1-(a+1)/(d+a+1)} λ^{d-1+(a+1)/(d+a+1)+ε}`.
    Edge,
    /// integer `a ∈ [(d-1)/2, d)`, same window:
    /// `δ^{1-1/(d+1-a)} λ^{d-1+1/(d+1-a)+ε}`.
    Main,
}

/// `L¹→L∞` bounds in the small-`δ` regimes. Returns the bound value and
/// whether the variant's hypotheses hold at these parameters.
pub fn small_delta_value(
    d: usize,
    a: i64,
    lambda: f64,
    delta: f64,
    eps: f64,
    variant: SmallDeltaVariant,
) -> (f64, bool) {
    let df = d as f64;
    let af = a as f64;
    let in_window =
        lambda.powf(-af) <= delta && delta <= lambda.powf(1.0 - af) && a >= 0;
    match variant {
        SmallDeltaVariant::VerySmall => {
            let ok = delta < lambda.powf(1.0 - 2.0 * df - eps);
            (1.0, ok)
        }
        SmallDeltaVariant::Edge => {
            let frac = (af + 1.0) / (df + af + 1.0);
            let value = delta.powf(1.0 - frac) * lambda.powf(df - 1.0 + frac + eps);
            let ok = a >= d as i64 && a <= 2 * d as i64 && in_window;
            (value, ok)
        }
        SmallDeltaVariant::Main => {
            let frac = 1.0 / (df + 1.0 - af);
            let value = delta.powf(1.0 - frac) * lambda.powf(df - 1.0 + frac + eps);
            let ok = 2 * a >= d as i64 - 1 && a < d as i64 && in_window;
            (value, ok)
        }
    }
}

/// The moment-method bound
/// `δ^{-1/b} λ^ε [max_{b₂ ≤ min(b,d+1)} δ^{b₂} λ^{-b₂²+(b+d)b₂+1-b}]^{1/b}`.
pub fn moment_method_bound(d: usize, b: usize, lambda: f64, delta: f64, eps: f64) -> f64 {
    let inner = maximized_bound(d, b, lambda, delta);
    delta.powf(-1.0 / b as f64) * lambda.powf(eps) * inner.powf(1.0 / b as f64)
}

/// The two illustrative special cases of the moment-method bound, branched
/// on `a < d` versus `a ≥ d`; valid for `λ^{-a} ≤ δ ≤ λ^{1-a}`.
pub fn moment_method_special_case(d: usize, a: i64, lambda: f64, delta: f64, eps: f64) -> (f64, bool) {
    let df = d as f64;
    let af = a as f64;
    let applicable = lambda.powf(-af) <= delta && delta <= lambda.powf(1.0 - af);
    let value = if a < d as i64 {
        let frac = 1.0 / (df + 1.0 - af);
        delta.powf(1.0 - frac) * lambda.powf(df - 1.0 + frac + eps)
    } else {
        let frac = (1.0 + af) / (df + 1.0 + af);
        delta.powf(1.0 - frac) * lambda.powf(df - 1.0 + frac + eps)
    };
    (value, applicable)
}

/// Decoupling bound at the critical exponent: `(1 + λδ)^{1/p_ST}`.
pub fn decoupling_pst(bp: &BoundParams) -> f64 {
    (1.0 + bp.lambda * bp.delta).powf(1.0 / bp.p_st())
}

/// One row of a regime report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub applicable: bool,
    pub value: f64,
    pub condition: String,
}

/// Evaluation of every bound at one parameter point, with the minimum
/// applicable value singled out per operator norm.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub d: usize,
    pub p: String,
    pub lambda: f64,
    pub delta: f64,
    pub eps: f64,
    pub entries: Vec<BoundEntry>,
    pub best_l2lp: Option<String>,
    pub best_l1linf: Option<String>,
}

/// Evaluate all bounds with their applicability predicates. `L²→L^p`
/// entries and (for `p = ∞`) `L¹→L∞` entries are tracked separately; the
/// minimum applicable bound of each group is reported by name.
pub fn regime_report(bp: &BoundParams) -> RegimeReport {
    let mut entries = Vec::new();
    let mut l2 = Vec::new();

    let st = stein_tomas(bp);
    entries.push(BoundEntry {
        name: "euclidean-envelope".into(),
        applicable: true,
        value: st,
        condition: "L2->Lp reference scale (all p)".into(),
    });
    l2.push(("euclidean-envelope".to_string(), st));

    let sg = sogge(bp);
    entries.push(BoundEntry {
        name: "unit-width".into(),
        applicable: true,
        value: sg,
        condition: "L2->Lp, delta = 1 scale".into(),
    });
    l2.push(("unit-width".to_string(), sg));

    let (ca, ca_ok) = conjecture_arbitrary(bp);
    entries.push(BoundEntry {
        name: "conjecture-arbitrary".into(),
        applicable: ca_ok,
        value: ca,
        condition: "L2->Lp, conjectural, delta > 1/lambda".into(),
    });
    if ca_ok {
        l2.push(("conjecture-arbitrary".to_string(), ca));
    }

    let (cg, cg_ok) = conjecture_generic(bp);
    entries.push(BoundEntry {
        name: "conjecture-generic".into(),
        applicable: cg_ok,
        value: cg,
        condition: "L2->Lp, conjectural, delta > lambda^{1-d+eps}".into(),
    });
    if cg_ok {
        l2.push(("conjecture-generic".to_string(), cg));
    }

    let dec = decoupling_pst(bp);
    let at_critical = match bp.p {
        PExp::Finite(v) => (v - bp.p_st()).abs() < 1e-12,
        PExp::Infinity => false,
    };
    entries.push(BoundEntry {
        name: "decoupling-critical".into(),
        applicable: at_critical,
        value: dec,
        condition: "L2->L^{p_ST} only".into(),
    });
    if at_critical {
        l2.push(("decoupling-critical".to_string(), dec));
    }

    let t12_ok = generic_window_applicable(bp);
    let t12 = generic_window_value(bp);
    entries.push(BoundEntry {
        name: "generic-window".into(),
        applicable: t12_ok,
        value: t12,
        condition: "L2->Lp, generic tori, admissible (p, lambda, delta)".into(),
    });
    if t12_ok {
        l2.push(("generic-window".to_string(), t12));
    }

    let mut l1 = Vec::new();
    if bp.p.is_infinite() {
        let (v, ok) = small_delta_value(bp.d, 0, bp.lambda, bp.delta, bp.eps, SmallDeltaVariant::VerySmall);
        entries.push(BoundEntry {
            name: "tiny-delta-constant".into(),
            applicable: ok,
            value: v,
            condition: "L1->Linf, delta < lambda^{1-2d-eps}".into(),
        });
        if ok {
            l1.push(("tiny-delta-constant".to_string(), v));
        }

        for a in 0..=(2 * bp.d as i64) {
            for (variant, tag) in [
                (SmallDeltaVariant::Main, "small-delta-main"),
                (SmallDeltaVariant::Edge, "small-delta-edge"),
            ] {
                let (v, ok) = small_delta_value(bp.d, a, bp.lambda, bp.delta, bp.eps, variant);
                if ok {
                    let name = format!("{tag}(a={a})");
                    entries.push(BoundEntry {
                        name: name.clone(),
                        applicable: true,
                        value: v,
                        condition: format!("L1->Linf, lambda^-{a} <= delta <= lambda^{}", 1 - a),
                    });
                    l1.push((name, v));
                }
            }
        }
        let mut best_sharp: Option<(usize, f64)> = None;
        for b in 1..=(2 * bp.d + 2) {
            let v = moment_method_bound(bp.d, b, bp.lambda, bp.delta, bp.eps);
            if best_sharp.is_none_or(|(_, bv)| v < bv) {
                best_sharp = Some((b, v));
            }
        }
        if let Some((b, v)) = best_sharp {
            let name = format!("moment-method(b={b})");
            entries.push(BoundEntry {
                name: name.clone(),
                applicable: true,
                value: v,
                condition: "L1->Linf, generic tori, best moment order".into(),
            });
            l1.push((name, v));
        }

        let cl = conjecture_generic_l1linf(bp.d, bp.lambda, bp.delta, bp.eps);
        entries.push(BoundEntry {
            name: "conjecture-generic-l1linf".into(),
            applicable: cg_ok,
            value: cl,
            condition: "L1->Linf specialisation of the generic envelope".into(),
        });
        if cg_ok {
            l1.push(("conjecture-generic-l1linf".to_string(), cl));
        }
    }

    let pick_min = |v: &[(String, f64)]| -> Option<String> {
        v.iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(n, _)| n.clone())
    };
    RegimeReport {
        d: bp.d,
        p: bp.p.to_string(),
        lambda: bp.lambda,
        delta: bp.delta,
        eps: bp.eps,
        best_l2lp: pick_min(&l2),
        best_l1linf: pick_min(&l1),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(d: usize, p: PExp, lambda: f64, delta: f64) -> BoundParams {
        BoundParams::new(d, p, lambda, delta, 0.01).unwrap()
    }

    #[test]
    fn critical_exponent_and_sigma() {
        let b = bp(3, PExp::Infinity, 100.0, 0.1);
        assert!((b.p_st() - 4.0).abs() < 1e-15);
        assert!((b.sigma() - 2.0).abs() < 1e-15);
        let b = bp(2, PExp::Finite(6.0), 100.0, 0.1);
        assert!((b.p_st() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn stein_tomas_branches() {
        // p = 2: all exponents vanish
        let b = bp(3, PExp::Finite(2.0), 50.0, 0.2);
        assert_eq!(stein_tomas(&b), 1.0);
        assert_eq!(sogge(&b), 1.0);

        // p = ∞, d = 3: λ^{σ/2} δ^{1/2} = λ δ^{1/2}
        let b = bp(3, PExp::Infinity, 50.0, 0.25);
        assert!((stein_tomas(&b) - 50.0 * 0.5).abs() < 1e-12);

        // p = ∞, d = 2: unit-width value λ^{1/2}
        let b = bp(2, PExp::Infinity, 49.0, 0.25);
        assert!((sogge(&b) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn branch_continuity_at_critical_exponent() {
        for d in 2..=5usize {
            let pst = 2.0 * (d as f64 + 1.0) / (d as f64 - 1.0);
            for (lam, del) in [(100.0, 0.3), (1e4, 1e-3)] {
                let lo = bp(d, PExp::Finite(pst - 1e-9), lam, del);
                let hi = bp(d, PExp::Finite(pst + 1e-9), lam, del);
                assert!(
                    (stein_tomas(&lo) - stein_tomas(&hi)).abs()
                        <= 1e-6 * stein_tomas(&hi).abs(),
                    "d={d}"
                );
                assert!((sogge(&lo) - sogge(&hi)).abs() <= 1e-6 * sogge(&hi).abs());
            }
        }
    }

    #[test]
    fn conjecture_values_and_windows() {
        let b = bp(3, PExp::Infinity, 100.0, 0.1);
        let (v, ok) = conjecture_arbitrary(&b);
        // terms: 1 + (λδ)^{1/2} + λ δ^{1/2}
        let expect = 1.0 + 10.0f64.sqrt() + 100.0 * 0.1f64.sqrt();
        assert!((v - expect).abs() < 1e-12);
        assert!(ok);

        let (vg, okg) = conjecture_generic(&b);
        assert_eq!(v, vg, "same envelope, different window");
        assert!(okg, "0.1 > 100^{{-2+eps}}");

        // between the two windows: λ^{1-d+ε} ≈ 1.05e-4 < δ < 1/λ = 1e-2
        let tight = bp(3, PExp::Infinity, 100.0, 5e-4);
        assert!(!conjecture_arbitrary(&tight).1);
        assert!(conjecture_generic(&tight).1);

        // p = 2 collapses towards a constant
        let at2 = bp(3, PExp::Finite(2.0), 100.0, 0.1);
        let (v2, _) = conjecture_arbitrary(&at2);
        assert!(v2 <= 3.0);
    }

    #[test]
    fn generic_window_examples() {
        // d=3, p→∞: exponent gate becomes δ > max(1/λ, λ^{-1/2+ε})
        let lam: f64 = 1000.0;
        let yes = bp(3, PExp::Infinity, lam, 0.2);
        assert!(generic_window_applicable(&yes));
        let frontier = lam.powf(-0.5 + 0.01);
        let no = bp(3, PExp::Infinity, lam, frontier * 0.5);
        assert!(!generic_window_applicable(&no), "below the first window");

        // below the critical exponent the result is vacuous
        let sub = bp(3, PExp::Finite(3.9), lam, 0.2);
        assert!(!generic_window_applicable(&sub));

        // second window (nonempty once d ≥ 5 at p = ∞): between
        // λ^{1-d/2+ε} and λ^{-1}
        let d = 5usize;
        let e2 = 1.0 - d as f64 / 2.0 + 0.01;
        let mid = lam.powf(e2) * 3.0;
        assert!(mid < 1.0 / lam);
        let two = bp(d, PExp::Infinity, lam, mid);
        assert!(generic_window_applicable(&two));
        // the gap point δ = λ^{-1} exactly is covered by neither window
        let gap = BoundParams::new(d, PExp::Infinity, lam, 1.0 / lam, 0.01).unwrap();
        assert!(!generic_window_applicable(&gap));
    }

    #[test]
    fn small_delta_variants() {
        // very small delta: bounded by a constant
        let (v, ok) = small_delta_value(2, 0, 1e6, 1e-20, 0.01, SmallDeltaVariant::VerySmall);
        assert_eq!(v, 1.0);
        assert!(ok, "1e-20 < (1e6)^{{-3-eps}}");

        // a = d makes the main variant trivial: value λ^{d+ε}
        let d = 3usize;
        let lam: f64 = 50.0;
        let delta = lam.powf(1.0 - d as f64); // inside the window for a = d-1.. d
        let (v_main_at_d, ok_main_at_d) =
            small_delta_value(d, d as i64, lam, delta, 0.01, SmallDeltaVariant::Main);
        assert!(!ok_main_at_d, "main variant requires a < d");
        assert!((v_main_at_d - lam.powf(d as f64 + 0.01)).abs() <= 1e-9 * v_main_at_d);

        // edge at a = d beats the trivial main value
        let (v_edge, ok_edge) = small_delta_value(d, d as i64, lam, delta, 0.01, SmallDeltaVariant::Edge);
        assert!(ok_edge);
        assert!(v_edge < v_main_at_d);
    }

    #[test]
    fn special_case_matches_small_delta_family() {
        let (d, lam, eps) = (3usize, 200.0f64, 0.01);
        for a in 0..=(2 * d as i64) {
            let delta = lam.powf(-(a as f64) + 0.5); // inside the window
            let (blunt, ok) = moment_method_special_case(d, a, lam, delta, eps);
            assert!(ok);
            if a < d as i64 {
                let (main, _) = small_delta_value(d, a, lam, delta, eps, SmallDeltaVariant::Main);
                assert!((blunt - main).abs() <= 1e-12 * main);
            } else {
                let (edge, _) = small_delta_value(d, a, lam, delta, eps, SmallDeltaVariant::Edge);
                assert!((blunt - edge).abs() <= 1e-12 * edge);
            }
        }
        // outside the window the flag drops
        let (_, ok) = moment_method_special_case(3, 2, 200.0, 0.9, 0.01);
        assert!(!ok);
    }

    #[test]
    fn moment_method_bound_reproduces_blunt_exponents() {
        // with b = d+1-a and δ in the window, the inner maximum is attained
        // at b₂ = b and the two bounds agree exactly
        for d in 2..=5usize {
            for a in (d as i64 - 1) / 2..d as i64 {
                let b = d + 1 - a as usize;
                for lam in [100.0f64, 1000.0] {
                    for t in [0.25, 0.5, 0.75] {
                        let delta = lam.powf(-(a as f64) + t); // λ^{-a} .. λ^{1-a}
                        let sharp = moment_method_bound(d, b, lam, delta, 0.01);
                        let (blunt, ok) = moment_method_special_case(d, a, lam, delta, 0.01);
                        assert!(ok);
                        assert!(
                            (sharp.ln() - blunt.ln()).abs() <= 1e-12,
                            "d={d} a={a} λ={lam} δ={delta}: {sharp} vs {blunt}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn evaluators_monotone_in_lambda() {
        let deltas = [0.5, 0.1, 0.01];
        for &delta in &deltas {
            let mut prev_st = 0.0;
            let mut prev_sg = 0.0;
            for i in 1..=30 {
                let lam = 10.0 * i as f64;
                let b = bp(3, PExp::Infinity, lam, delta);
                let st = stein_tomas(&b);
                let sg = sogge(&b);
                assert!(st >= prev_st && sg >= prev_sg);
                prev_st = st;
                prev_sg = sg;
            }
        }
    }

    #[test]
    fn regime_report_shape() {
        let b = bp(3, PExp::Infinity, 1000.0, 1e-4);
        let rep = regime_report(&b);
        assert!(rep.entries.len() >= 6);
        assert!(rep.best_l2lp.is_some());
        assert!(rep.best_l1linf.is_some());
        for e in &rep.entries {
            assert!(e.value.is_finite());
            assert!(!e.condition.is_empty());
        }
        // deterministic serialisation
        let j1 = serde_json::to_string(&rep).unwrap();
        let j2 = serde_json::to_string(&regime_report(&b)).unwrap();
        assert_eq!(j1, j2);

        // p = 2: the applicable norms collapse to the constant scale
        let b2 = bp(3, PExp::Finite(2.0), 1000.0, 1e-4);
        let rep2 = regime_report(&b2);
        let st = rep2
            .entries
            .iter()
            .find(|e| e.name == "euclidean-envelope")
            .unwrap();
        assert_eq!(st.value, 1.0);
        assert!(rep2.best_l1linf.is_none(), "finite p has no L1->Linf rows");
    }
}
