//! The two candidate velocity fields
//!
//! ```text
//! sinh θ = (P·P − S·S) / (2 P·S)
//! W⁺ =  e^{θ} P + S
//! W⁻ = −e^{−θ} P + S
//! ```
//!
//! and the rule that picks whichever one is timelike. `W⁺·W⁻ = 0` holds
//! identically, so they are never both timelike, but they can both be
//! spacelike. That happens exactly when P and S span a spacelike 2-plane,
//! and the selection then has no answer. Those points are reported, never
//! repaired.

use core::fmt;

use crate::error::{Error, Result};
use crate::minkowski::{
    causal_class, causal_margin, inner, plane_class, plane_margin, CausalClass, FourVector,
    PlaneClass,
};
use crate::wavefield::{PolarGradients, Superposition};

/// Relative tolerances used throughout the pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Causal classification of vectors and planes.
    pub class_tol: f64,
    /// `2|P·S| ≤ ortho_tol·(|P|² + |S|²)` counts as orthogonal.
    pub ortho_tol: f64,
    /// `|ψ| ≤ node_tol·Σ|cᵢ|` counts as a node.
    pub node_tol: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        class_tol: 1e-9,
        ortho_tol: 1e-9,
        node_tol: 1e-12,
    };

    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if !ok(self.class_tol) {
            return Err(Error::InvalidConfig(
                "class tolerance must be positive and finite",
            ));
        }
        if !ok(self.ortho_tol) {
            return Err(Error::InvalidConfig(
                "ortho tolerance must be positive and finite",
            ));
        }
        if !ok(self.node_tol) {
            return Err(Error::InvalidConfig(
                "node tolerance must be positive and finite",
            ));
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}

/// Outcome of the "take whichever W is timelike" rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    PlusTimelike,
    MinusTimelike,
    /// Neither candidate is timelike: the rule is ill-defined.
    BothSpacelike,
    /// At least one candidate is null within tolerance.
    Boundary,
    /// `P·S = 0`, where θ does not exist.
    OrthogonalDegenerate,
}

impl Selection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Selection::PlusTimelike => "PlusTimelike",
            Selection::MinusTimelike => "MinusTimelike",
            Selection::BothSpacelike => "BothSpacelike",
            Selection::Boundary => "Boundary",
            Selection::OrthogonalDegenerate => "OrthogonalDegenerate",
        }
    }

    pub fn is_timelike(&self) -> bool {
        matches!(self, Selection::PlusTimelike | Selection::MinusTimelike)
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Asinh in the logarithmic form `sign(u)·ln(|u| + √(u²+1))`, written with
/// `log1p` so that small arguments keep full precision and large ones do
/// not overflow `u²`.
pub fn asinh_log(u: f64) -> f64 {
    let a = libm::fabs(u);
    let r = if a > 1e150 {
        libm::log(a) + core::f64::consts::LN_2
    } else {
        libm::log1p(a + a * a / (1.0 + libm::sqrt(1.0 + a * a)))
    };
    libm::copysign(r, u)
}

/// `2|P·S| / (|P|² + |S|²)` with Euclidean component norms, in `[0, 1]`.
///
/// Bounded above by `|P·S| / (|P||S|)`, and also small when one of the two
/// gradients is negligible next to the other (the single-plane-wave limit,
/// where `P → 0`). Zero if both vanish.
pub fn orthogonality_ratio(p: &FourVector, s: &FourVector) -> f64 {
    let denom = p.square_sum() + s.square_sum();
    if denom == 0.0 {
        0.0
    } else {
        2.0 * libm::fabs(inner(p, s)) / denom
    }
}

/// θ = asinh((P·P − S·S) / (2P·S)).
pub fn theta(p: &FourVector, s: &FourVector, ortho_tol: f64) -> Result<f64> {
    let ratio = orthogonality_ratio(p, s);
    if ratio <= ortho_tol {
        return Err(Error::OrthogonalDegenerate { ratio });
    }
    let u = (inner(p, p) - inner(s, s)) / (2.0 * inner(p, s));
    if !u.is_finite() {
        return Err(Error::Overflow { theta: u });
    }
    Ok(asinh_log(u))
}

/// `(e^{θ}P + S, −e^{−θ}P + S)`.
pub fn w_fields(p: &FourVector, s: &FourVector, th: f64) -> Result<(FourVector, FourVector)> {
    let up = libm::exp(th);
    let down = libm::exp(-th);
    if !up.is_finite() || !down.is_finite() {
        return Err(Error::Overflow { theta: th });
    }
    let w_plus = up * *p + *s;
    let w_minus = -(down * *p) + *s;
    if !w_plus.is_finite() || !w_minus.is_finite() {
        return Err(Error::Overflow { theta: th });
    }
    Ok((w_plus, w_minus))
}

/// Selection table. `(Timelike, Timelike)` is impossible for orthogonal
/// vectors and comes back as [`Error::BothTimelike`].
pub fn select(class_plus: CausalClass, class_minus: CausalClass) -> Result<Selection> {
    use CausalClass::*;
    match (class_plus, class_minus) {
        (Timelike, Timelike) => Err(Error::BothTimelike),
        (Null, _) | (_, Null) => Ok(Selection::Boundary),
        (Timelike, Spacelike) => Ok(Selection::PlusTimelike),
        (Spacelike, Timelike) => Ok(Selection::MinusTimelike),
        (Spacelike, Spacelike) => Ok(Selection::BothSpacelike),
    }
}

/// Everything derived from one `(P, S)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairAnalysis {
    pub theta: f64,
    pub w_plus: FourVector,
    pub w_minus: FourVector,
    pub class_plus: CausalClass,
    pub class_minus: CausalClass,
    pub selection: Selection,
    pub plane: PlaneClass,
    /// Scale-free Gram determinant of (P, S), see [`plane_margin`].
    pub plane_margin: f64,
    /// False only when the selection and the Gram criterion clearly disagree:
    /// `BothSpacelike` on a Lorentzian plane, or a timelike pick on a
    /// spacelike plane.
    pub consistent: bool,
}

impl PairAnalysis {
    /// Smallest relative distance of the three verdicts (W⁺ class, W⁻ class,
    /// plane class) from their decision boundaries.
    pub fn margin(&self) -> f64 {
        let a = libm::fabs(causal_margin(&self.w_plus));
        let b = libm::fabs(causal_margin(&self.w_minus));
        a.min(b).min(libm::fabs(self.plane_margin))
    }

    pub fn w_plus_sq(&self) -> f64 {
        inner(&self.w_plus, &self.w_plus)
    }

    pub fn w_minus_sq(&self) -> f64 {
        inner(&self.w_minus, &self.w_minus)
    }

    /// The timelike candidate, if the selection named one.
    pub fn selected_w(&self) -> Option<FourVector> {
        match self.selection {
            Selection::PlusTimelike => Some(self.w_plus),
            Selection::MinusTimelike => Some(self.w_minus),
            _ => None,
        }
    }
}

fn consistent_with_plane(selection: Selection, plane: PlaneClass) -> bool {
    !matches!(
        (selection, plane),
        (Selection::BothSpacelike, PlaneClass::LorentzianPlane)
            | (Selection::PlusTimelike, PlaneClass::SpacelikePlane)
            | (Selection::MinusTimelike, PlaneClass::SpacelikePlane)
    )
}

/// θ, W±, their classes, the selection, and the Gram cross-check for one pair.
pub fn analyze_pair(p: &FourVector, s: &FourVector, tols: &Tolerances) -> Result<PairAnalysis> {
    let th = theta(p, s, tols.ortho_tol)?;
    let (w_plus, w_minus) = w_fields(p, s, th)?;
    let class_plus = causal_class(&w_plus, tols.class_tol);
    let class_minus = causal_class(&w_minus, tols.class_tol);
    let selection = select(class_plus, class_minus)?;
    let plane = plane_class(p, s, tols.class_tol);
    Ok(PairAnalysis {
        theta: th,
        w_plus,
        w_minus,
        class_plus,
        class_minus,
        selection,
        plane,
        plane_margin: plane_margin(p, s),
        consistent: consistent_with_plane(selection, plane),
    })
}

/// Full analysis at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HdnPoint {
    /// Event, contravariant.
    pub x: FourVector,
    pub polar: PolarGradients,
    pub pair: PairAnalysis,
}

impl HdnPoint {
    pub fn selection(&self) -> Selection {
        self.pair.selection
    }
}

/// ψ → (P, S) → θ → W± → classes → selection at `x`.
pub fn analyze_point(w: &Superposition, x: &FourVector, tols: &Tolerances) -> Result<HdnPoint> {
    let polar = w.polar_gradients(x, tols.node_tol)?;
    let pair = analyze_pair(&polar.p, &polar.s, tols)?;
    Ok(HdnPoint { x: *x, polar, pair })
}

/// Flat verdict used for tallies and scan maps: every selection plus the
/// failure modes that prevent one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    PlusTimelike,
    MinusTimelike,
    BothSpacelike,
    Boundary,
    OrthogonalDegenerate,
    Node,
    Overflow,
    /// Should never occur; kept so that totals are conserved and the
    /// violation is visible.
    BothTimelike,
}

impl Verdict {
    pub const ALL: [Verdict; 8] = [
        Verdict::PlusTimelike,
        Verdict::MinusTimelike,
        Verdict::BothSpacelike,
        Verdict::Boundary,
        Verdict::OrthogonalDegenerate,
        Verdict::Node,
        Verdict::Overflow,
        Verdict::BothTimelike,
    ];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::PlusTimelike => "PlusTimelike",
            Verdict::MinusTimelike => "MinusTimelike",
            Verdict::BothSpacelike => "BothSpacelike",
            Verdict::Boundary => "Boundary",
            Verdict::OrthogonalDegenerate => "OrthogonalDegenerate",
            Verdict::Node => "Node",
            Verdict::Overflow => "Overflow",
            Verdict::BothTimelike => "BothTimelike",
        }
    }

    /// Maps an analysis outcome onto a verdict. Errors that are not
    /// point-level outcomes (configuration errors) have no verdict.
    pub fn from_outcome<T>(
        outcome: &Result<T>,
        selection: impl FnOnce(&T) -> Selection,
    ) -> Option<Verdict> {
        match outcome {
            Ok(v) => Some(selection(v).into()),
            Err(Error::Node { .. }) => Some(Verdict::Node),
            Err(Error::OrthogonalDegenerate { .. }) => Some(Verdict::OrthogonalDegenerate),
            Err(Error::Overflow { .. }) => Some(Verdict::Overflow),
            Err(Error::BothTimelike) => Some(Verdict::BothTimelike),
            Err(_) => None,
        }
    }
}

impl From<Selection> for Verdict {
    fn from(s: Selection) -> Verdict {
        match s {
            Selection::PlusTimelike => Verdict::PlusTimelike,
            Selection::MinusTimelike => Verdict::MinusTimelike,
            Selection::BothSpacelike => Verdict::BothSpacelike,
            Selection::Boundary => Verdict::Boundary,
            Selection::OrthogonalDegenerate => Verdict::OrthogonalDegenerate,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict for a single point; never fails.
pub fn point_verdict(w: &Superposition, x: &FourVector, tols: &Tolerances) -> Verdict {
    let outcome = analyze_point(w, x, tols);
    Verdict::from_outcome(&outcome, |p| p.selection()).unwrap_or(Verdict::Overflow)
}

/// Verdict for a bare `(P, S)` pair; never fails.
pub fn pair_verdict(p: &FourVector, s: &FourVector, tols: &Tolerances) -> Verdict {
    let outcome = analyze_pair(p, s, tols);
    Verdict::from_outcome(&outcome, |a| a.selection).unwrap_or(Verdict::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    use crate::wavefield::PlaneWaveMode;

    fn counterexample_ps() -> (FourVector, FourVector) {
        let gamma = 3.0 - 1.0 / libm::sqrt(3.0);
        let alpha = libm::sqrt(26.0) / gamma;
        let beta = alpha / libm::sqrt(3.0);
        (
            FourVector::new(0.0, alpha, -alpha, 0.0),
            FourVector::new(0.0, -beta, 0.0, 0.0),
        )
    }

    #[test]
    fn theta_at_counterexample() {
        let (p, s) = counterexample_ps();
        let th = theta(&p, &s, 1e-9).unwrap();
        // argument simplifies to −5/(2√3)
        assert_relative_eq!(
            th,
            libm::asinh(-5.0 * libm::sqrt(3.0) / 6.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(th, -1.1629377, max_relative = 1e-7);
    }

    #[test]
    fn theta_simple_cases() {
        // P·P = S·S
        let p = FourVector::new(2.0, 1.0, 0.0, 0.0);
        let s = FourVector::new(2.0, 0.0, 1.0, 0.0);
        assert_eq!(theta(&p, &s, 1e-9).unwrap(), 0.0);
        // asinh(3/4) = ln 2
        let p = FourVector::new(2.0, 0.0, 0.0, 0.0);
        let s = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(
            theta(&p, &s, 1e-9).unwrap(),
            core::f64::consts::LN_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn theta_orthogonal_is_degenerate() {
        let p = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let s = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            theta(&p, &s, 1e-9),
            Err(Error::OrthogonalDegenerate { .. })
        ));
        assert!(matches!(
            theta(&FourVector::ZERO, &s, 1e-9),
            Err(Error::OrthogonalDegenerate { .. })
        ));
    }

    #[test]
    fn asinh_log_matches_libm() {
        for u in [
            0.0,
            1e-300,
            1e-12,
            1e-5,
            0.3,
            1.0,
            7.5,
            1e8,
            1e149,
            1e151,
            1e300,
            f64::MAX,
        ] {
            for v in [u, -u] {
                let expected = libm::asinh(v);
                let got = asinh_log(v);
                assert!(
                    libm::fabs(got - expected) <= 1e-15 * libm::fabs(expected).max(1e-300),
                    "{v}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn w_fields_at_counterexample() {
        let (p, s) = counterexample_ps();
        let th = theta(&p, &s, 1e-9).unwrap();
        let (wp, wm) = w_fields(&p, &s, th).unwrap();
        let expect_p = [0.0, -0.5572977, -0.6578678, 0.0];
        let expect_m = [0.0, -7.9488606, 6.7336952, 0.0];
        for mu in 0..4 {
            assert!(libm::fabs(wp[mu] - expect_p[mu]) < 1e-6, "W+ {wp}");
            assert!(libm::fabs(wm[mu] - expect_m[mu]) < 1e-6, "W- {wm}");
        }
        assert!(libm::fabs(inner(&wp, &wm)) < 1e-12 * wp.euclidean_norm() * wm.euclidean_norm());
    }

    #[test]
    fn w_fields_at_zero_theta() {
        let p = FourVector::new(0.3, 1.0, -2.0, 0.5);
        let s = FourVector::new(1.5, 0.1, 0.0, -0.7);
        let (wp, wm) = w_fields(&p, &s, 0.0).unwrap();
        assert_eq!(wp, p + s);
        assert_eq!(wm, -p + s);
    }

    #[test]
    fn w_fields_overflow_is_reported() {
        let p = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            w_fields(&p, &p, 710.0),
            Err(Error::Overflow { .. })
        ));
        assert!(matches!(
            w_fields(&p, &p, -710.0),
            Err(Error::Overflow { .. })
        ));
        assert!(w_fields(&p, &p, 700.0).is_ok());
    }

    #[test]
    fn selection_table() {
        use CausalClass::*;
        assert_eq!(select(Timelike, Spacelike), Ok(Selection::PlusTimelike));
        assert_eq!(select(Spacelike, Timelike), Ok(Selection::MinusTimelike));
        assert_eq!(select(Spacelike, Spacelike), Ok(Selection::BothSpacelike));
        assert_eq!(select(Null, Spacelike), Ok(Selection::Boundary));
        assert_eq!(select(Timelike, Null), Ok(Selection::Boundary));
        assert_eq!(select(Null, Null), Ok(Selection::Boundary));
        assert_eq!(select(Timelike, Timelike), Err(Error::BothTimelike));
    }

    #[test]
    fn counterexample_origin_is_both_spacelike() {
        let w = Superposition::paper_counterexample(1.0).unwrap();
        let pt = analyze_point(&w, &FourVector::ZERO, &Tolerances::DEFAULT).unwrap();
        assert_eq!(pt.pair.class_plus, CausalClass::Spacelike);
        assert_eq!(pt.pair.class_minus, CausalClass::Spacelike);
        assert_eq!(pt.selection(), Selection::BothSpacelike);
        assert_eq!(pt.pair.plane, PlaneClass::SpacelikePlane);
        assert!(pt.pair.consistent);
    }

    #[test]
    fn single_mode_is_orthogonal_degenerate() {
        let mode = PlaneWaveMode::on_shell(1.0, [0.4, 0.0, -0.3], Complex64::new(0.5, 2.0));
        let w = Superposition::new(1.0, alloc::vec![mode]).unwrap();
        let x = FourVector::new(0.7, -1.0, 3.0, 0.2);
        assert!(matches!(
            analyze_point(&w, &x, &Tolerances::DEFAULT),
            Err(Error::OrthogonalDegenerate { .. })
        ));
        assert_eq!(
            point_verdict(&w, &x, &Tolerances::DEFAULT),
            Verdict::OrthogonalDegenerate
        );
    }

    #[test]
    fn verdict_indices_are_dense() {
        for (i, v) in Verdict::ALL.iter().enumerate() {
            assert_eq!(v.index(), i);
        }
    }
}
