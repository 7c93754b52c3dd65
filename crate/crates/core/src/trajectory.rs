//! Integral curves of the selected velocity field.
//!
//! Curves are parametrized by proper time: the timelike W is raised,
//! normalized to `u·u = 1` and oriented so that `u⁰ > 0`. Integration is
//! classic fixed-step RK4 and stops at the first step whose stage points
//! leave the region where the selection rule gives a unique answer.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::hdn::{analyze_point, Selection, Tolerances, Verdict};
use crate::minkowski::{inner, raise, FourVector};
use crate::wavefield::Superposition;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryConfig {
    /// Proper-time step, units of 1/m.
    pub step: f64,
    pub max_steps: usize,
    pub tols: Tolerances,
}

impl TrajectoryConfig {
    pub fn new(step: f64, max_steps: usize) -> Self {
        TrajectoryConfig {
            step,
            max_steps,
            tols: Tolerances::DEFAULT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig("step must be positive and finite"));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1"));
        }
        self.tols.validate()
    }

    /// Steps with `step·m > 1` are accepted but resolve the field poorly.
    pub fn step_is_coarse(&self, mass: f64) -> bool {
        self.step * mass > 1.0
    }
}

/// Unit tangent at a point together with the W it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    /// Contravariant, `u·u = 1`, `u⁰ > 0`.
    pub u: FourVector,
    /// The selected W, covariant and unnormalized.
    pub w: FourVector,
    pub selection: Selection,
}

/// Future-pointing unit tangent along the timelike W at `x`.
///
/// Fails with [`Error::IllDefinedVelocity`] when the selection is not
/// `PlusTimelike` or `MinusTimelike`, and passes node, degeneracy and
/// overflow errors through.
pub fn velocity(w: &Superposition, x: &FourVector, tols: &Tolerances) -> Result<Tangent> {
    let point = analyze_point(w, x, tols)?;
    let selection = point.selection();
    let w_sel = point
        .pair
        .selected_w()
        .ok_or(Error::IllDefinedVelocity(selection))?;
    let norm = libm::sqrt(inner(&w_sel, &w_sel));
    let mut u = raise(&w_sel).scale(1.0 / norm);
    if u[0] < 0.0 {
        u = -u;
    }
    Ok(Tangent {
        u,
        w: w_sel,
        selection,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    /// Event, contravariant.
    pub x: FourVector,
    pub tangent: Tangent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    MaxSteps,
    EnteredBothSpacelike,
    EnteredOrthogonalDegenerate,
    HitNode,
    /// One of the W fields became null within tolerance.
    HitBoundary,
    Overflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::MaxSteps => "MaxSteps",
            Termination::EnteredBothSpacelike => "EnteredBothSpacelike",
            Termination::EnteredOrthogonalDegenerate => "EnteredOrthogonalDegenerate",
            Termination::HitNode => "HitNode",
            Termination::HitBoundary => "HitBoundary",
            Termination::Overflow => "Overflow",
        }
    }

    fn from_error(err: Error) -> Result<Termination> {
        match err {
            Error::IllDefinedVelocity(Selection::BothSpacelike) => {
                Ok(Termination::EnteredBothSpacelike)
            }
            Error::IllDefinedVelocity(Selection::OrthogonalDegenerate)
            | Error::OrthogonalDegenerate { .. } => Ok(Termination::EnteredOrthogonalDegenerate),
            Error::IllDefinedVelocity(_) => Ok(Termination::HitBoundary),
            Error::Node { .. } => Ok(Termination::HitNode),
            Error::Overflow { .. } => Ok(Termination::Overflow),
            other => Err(other),
        }
    }

    /// The point verdict that produces this termination, if any.
    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            Termination::MaxSteps => None,
            Termination::EnteredBothSpacelike => Some(Verdict::BothSpacelike),
            Termination::EnteredOrthogonalDegenerate => Some(Verdict::OrthogonalDegenerate),
            Termination::HitNode => Some(Verdict::Node),
            Termination::HitBoundary => Some(Verdict::Boundary),
            Termination::Overflow => Some(Verdict::Overflow),
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryResult {
    pub points: Vec<TrajectoryPoint>,
    pub termination: Termination,
    /// The stage point whose analysis ended the run, when it did not run
    /// out of steps.
    pub failed_at: Option<FourVector>,
}

impl TrajectoryResult {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points
            .last()
            .expect("a trajectory always holds its start point")
    }
}

/// RK4 on `dx/dτ = u(x)` with a fixed proper-time step.
///
/// A step is rejected as a whole when any stage point, or the new end point,
/// has no unique timelike W; the result then ends at the last accepted point.
pub fn integrate(
    w: &Superposition,
    x0: &FourVector,
    cfg: &TrajectoryConfig,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    let tols = &cfg.tols;
    let h = cfg.step;
    let start = velocity(w, x0, tols)?;

    let mut points = Vec::with_capacity(cfg.max_steps.saturating_add(1).min(1 << 20));
    points.push(TrajectoryPoint {
        tau: 0.0,
        x: *x0,
        tangent: start,
    });

    let mut x = *x0;
    let mut k1 = start.u;
    for n in 1..=cfg.max_steps {
        let stage = |y: FourVector| velocity(w, &y, tols).map(|t| t.u).map_err(|e| (e, y));
        let step = || -> core::result::Result<(FourVector, Tangent), (Error, FourVector)> {
            let k2 = stage(x + (0.5 * h) * k1)?;
            let k3 = stage(x + (0.5 * h) * k2)?;
            let k4 = stage(x + h * k3)?;
            let next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let tangent = velocity(w, &next, tols).map_err(|e| (e, next))?;
            Ok((next, tangent))
        };
        match step() {
            Ok((next, tangent)) => {
                x = next;
                k1 = tangent.u;
                points.push(TrajectoryPoint {
                    tau: n as f64 * h,
                    x,
                    tangent,
                });
            }
            Err((err, at)) => {
                return Ok(TrajectoryResult {
                    points,
                    termination: Termination::from_error(err)?,
                    failed_at: Some(at),
                });
            }
        }
    }
    Ok(TrajectoryResult {
        points,
        termination: Termination::MaxSteps,
        failed_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_complex::Complex64;

    use crate::wavefield::PlaneWaveMode;

    fn two_mode() -> Superposition {
        let m = 1.0;
        Superposition::new(
            m,
            vec![
                PlaneWaveMode::new(FourVector::new(m, 0.0, 0.0, 0.0), Complex64::new(1.0, 0.0)),
                PlaneWaveMode::new(
                    FourVector::new(libm::sqrt(2.0) * m, m, 0.0, 0.0),
                    Complex64::new(0.5, 0.0),
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let w = two_mode();
        let x0 = FourVector::new(0.0, 0.3, 0.0, 0.0);
        assert!(matches!(
            integrate(&w, &x0, &TrajectoryConfig::new(0.1, 0)),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            integrate(&w, &x0, &TrajectoryConfig::new(0.0, 5)),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            integrate(&w, &x0, &TrajectoryConfig::new(f64::NAN, 5)),
            Err(Error::InvalidConfig(_))
        ));
        assert!(TrajectoryConfig::new(2.0, 1).step_is_coarse(1.0));
        assert!(!TrajectoryConfig::new(0.5, 1).step_is_coarse(1.0));
    }

    #[test]
    fn single_step_records_two_points() {
        let w = two_mode();
        let x0 = FourVector::new(0.0, 0.3, 0.0, 0.0);
        let r = integrate(&w, &x0, &TrajectoryConfig::new(0.1, 1)).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.termination, Termination::MaxSteps);
        assert_eq!(r.points[0].x, x0);
        assert_eq!(r.points[1].tau, 0.1);
    }

    #[test]
    fn ill_defined_start_is_an_error() {
        let w = Superposition::paper_counterexample(1.0).unwrap();
        assert_eq!(
            integrate(&w, &FourVector::ZERO, &TrajectoryConfig::new(0.01, 10)),
            Err(Error::IllDefinedVelocity(Selection::BothSpacelike))
        );
        assert_eq!(
            velocity(&w, &FourVector::ZERO, &Tolerances::DEFAULT),
            Err(Error::IllDefinedVelocity(Selection::BothSpacelike))
        );
    }

    #[test]
    fn velocity_ignores_global_amplitude() {
        let w = two_mode();
        let scaled = w.scaled(Complex64::new(-2.5, 0.75)).unwrap();
        let x = FourVector::new(0.2, -0.4, 1.0, 0.0);
        let a = velocity(&w, &x, &Tolerances::DEFAULT).unwrap();
        let b = velocity(&scaled, &x, &Tolerances::DEFAULT).unwrap();
        for mu in 0..4 {
            assert!(libm::fabs(a.u[mu] - b.u[mu]) < 1e-13);
        }
        assert_eq!(a.selection, b.selection);
    }

    #[test]
    fn termination_maps_errors() {
        assert_eq!(
            Termination::from_error(Error::IllDefinedVelocity(Selection::Boundary)),
            Ok(Termination::HitBoundary)
        );
        assert_eq!(
            Termination::from_error(Error::Node {
                psi_abs: 0.0,
                threshold: 0.0
            }),
            Ok(Termination::HitNode)
        );
        assert_eq!(
            Termination::from_error(Error::BothTimelike),
            Err(Error::BothTimelike)
        );
    }
}
