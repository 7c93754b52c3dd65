//! Bohm-type velocity fields for Klein–Gordon wave functions.
//!
//! A wave function `ψ = e^{P + iS}` built from positive-energy plane waves
//! yields two candidate velocity fields W⁺ and W⁻. The trajectory rule
//! takes whichever is timelike. This crate evaluates the fields, classifies
//! them, integrates the resulting curves where the rule is defined, and
//! measures how much of space-time (or of `(P, S)` space) is left without
//! an answer because both candidates are spacelike.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod hdn;
pub mod measure;
pub mod minkowski;
pub mod trajectory;
pub mod wavefield;

pub use error::{Error, ModeDefect, Result};
pub use hdn::{
    analyze_pair, analyze_point, select, theta, w_fields, HdnPoint, PairAnalysis, Selection,
    Tolerances, Verdict,
};
pub use measure::{FractionEstimate, Lattice, Region, Sampling, ScanCell, Tally};
pub use minkowski::{causal_class, inner, plane_class, raise, CausalClass, FourVector, PlaneClass};
pub use num_complex::Complex64;
pub use trajectory::{
    integrate, velocity, Tangent, Termination, TrajectoryConfig, TrajectoryPoint, TrajectoryResult,
};
pub use wavefield::{PlaneWaveMode, PolarGradients, Superposition};
