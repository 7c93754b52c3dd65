use core::fmt;

use crate::hdn::Selection;

/// Why a plane-wave mode was refused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeDefect {
    /// `|k·k − m²|` exceeded the on-shell tolerance; carries the residual.
    OffShell(f64),
    /// `k₀ ≤ 0`.
    NegativeEnergy,
    ZeroAmplitude,
    NonFinite,
}

impl fmt::Display for ModeDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeDefect::OffShell(r) => write!(f, "off the mass shell (|k·k - m²| = {r:e})"),
            ModeDefect::NegativeEnergy => f.write_str("k0 must be positive"),
            ModeDefect::ZeroAmplitude => f.write_str("amplitude is zero"),
            ModeDefect::NonFinite => f.write_str("non-finite component"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Error {
    InvalidMass(f64),
    EmptySuperposition,
    InvalidMode {
        index: usize,
        defect: ModeDefect,
    },
    /// `|ψ|` at or below the nodal threshold; the polar form is undefined.
    Node {
        psi_abs: f64,
        threshold: f64,
    },
    /// `P·S` vanishes within tolerance, so θ is undefined.
    OrthogonalDegenerate {
        ratio: f64,
    },
    /// `e^{|θ|}` or a product with it is not representable.
    Overflow {
        theta: f64,
    },
    /// Both W fields classified timelike. Orthogonal vectors cannot both be
    /// timelike, so this means the tolerances are inconsistent.
    BothTimelike,
    /// No unique timelike W at the point.
    IllDefinedVelocity(Selection),
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMass(m) => write!(f, "mass must be positive and finite, got {m}"),
            Error::EmptySuperposition => f.write_str("superposition needs at least one mode"),
            Error::InvalidMode { index, defect } => write!(f, "mode {index}: {defect}"),
            Error::Node { psi_abs, threshold } => write!(
                f,
                "wave function vanishes here (|psi| = {psi_abs:e} <= {threshold:e})"
            ),
            Error::OrthogonalDegenerate { ratio } => write!(
                f,
                "P and S are orthogonal within tolerance (2|P·S|/(|P|²+|S|²) = {ratio:e})"
            ),
            Error::Overflow { theta } => write!(f, "e^|theta| overflows (theta = {theta})"),
            Error::BothTimelike => {
                f.write_str("internal inconsistency: W+ and W- both classified timelike")
            }
            Error::IllDefinedVelocity(sel) => {
                write!(f, "no unique timelike W field here (selection {sel})")
            }
            Error::InvalidConfig(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
