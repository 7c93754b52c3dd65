//! Minkowski-space linear algebra in signature (+,−,−,−).
//!
//! Vectors are stored with the index down (covariant components), so the
//! quadratic form on stored components is `a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃`.
//! Event coordinates `x^μ` reuse the same container with the index up; the
//! caller keeps track of which one it holds.

use core::fmt;
use core::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

/// A real four-component vector on Minkowski space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub const fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        FourVector([c0, c1, c2, c3])
    }

    pub const fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Sum of squared components. Used as the scale against which relative
    /// tolerances are measured.
    pub fn square_sum(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    /// Euclidean length of the stored components.
    pub fn euclidean_norm(&self) -> f64 {
        libm::sqrt(self.square_sum())
    }

    /// Plain component-wise dot product, no metric.
    pub fn euclidean_dot(&self, other: &FourVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::new(
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        )
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        *self = *self + rhs;
    }
}

impl Sub for FourVector {
    type Output = FourVector;

    fn sub(self, rhs: FourVector) -> FourVector {
        self + (-rhs)
    }
}

impl Neg for FourVector {
    type Output = FourVector;

    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;

    fn mul(self, rhs: FourVector) -> FourVector {
        rhs.scale(self)
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// Minkowski inner product `a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃`.
pub fn inner(a: &FourVector, b: &FourVector) -> f64 {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Raises (or lowers) the index with the flat metric.
pub fn raise(v: &FourVector) -> FourVector {
    FourVector::new(v.0[0], -v.0[1], -v.0[2], -v.0[3])
}

/// Causal character of a single vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CausalClass {
    Timelike,
    Spacelike,
    Null,
}

impl CausalClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CausalClass::Timelike => "Timelike",
            CausalClass::Spacelike => "Spacelike",
            CausalClass::Null => "Null",
        }
    }
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative size of `v·v` against the component scale, in `[-1, 1]`.
///
/// Zero for the zero vector. `causal_class` compares this against its
/// tolerance, so callers can ask how far a verdict sits from the light cone.
pub fn causal_margin(v: &FourVector) -> f64 {
    let scale = v.square_sum();
    if scale == 0.0 {
        0.0
    } else {
        inner(v, v) / scale
    }
}

/// Classifies `v` by the sign of `v·v` with a tolerance relative to the
/// component-square sum. The zero vector is `Null`.
pub fn causal_class(v: &FourVector, tol: f64) -> CausalClass {
    let q = inner(v, v);
    let bound = tol * v.square_sum();
    if q > bound {
        CausalClass::Timelike
    } else if q < -bound {
        CausalClass::Spacelike
    } else {
        CausalClass::Null
    }
}

/// Causal character of the 2-plane spanned by two vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaneClass {
    /// Induced form negative definite: a frame exists where both spanning
    /// vectors have vanishing time component.
    SpacelikePlane,
    /// Induced form indefinite: the plane contains a timelike direction.
    LorentzianPlane,
    /// Null plane, rank-deficient span, or a verdict inside the tolerance.
    DegeneratePlane,
}

impl PlaneClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlaneClass::SpacelikePlane => "SpacelikePlane",
            PlaneClass::LorentzianPlane => "LorentzianPlane",
            PlaneClass::DegeneratePlane => "DegeneratePlane",
        }
    }
}

impl fmt::Display for PlaneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gram matrix `[[a·a, a·b], [a·b, b·b]]` in the Minkowski form.
pub fn gram(a: &FourVector, b: &FourVector) -> [[f64; 2]; 2] {
    let ab = inner(a, b);
    [[inner(a, a), ab], [ab, inner(b, b)]]
}

/// `det G / (|a|²|b|²)`, the scale-free Gram determinant. Zero when either
/// vector vanishes.
pub fn plane_margin(a: &FourVector, b: &FourVector) -> f64 {
    let scale = a.square_sum() * b.square_sum();
    if scale == 0.0 {
        return 0.0;
    }
    let [[aa, ab], [_, bb]] = gram(a, b);
    (aa * bb - ab * ab) / scale
}

/// Classifies span{a, b} from the sign of its Gram determinant.
///
/// The determinant threshold is `tol·|a|²|b|²`, which has the same degree
/// as `det G`, so the verdict does not depend on units.
pub fn plane_class(a: &FourVector, b: &FourVector, tol: f64) -> PlaneClass {
    let margin = plane_margin(a, b);
    let aa = inner(a, a);
    if margin > tol && aa < 0.0 {
        PlaneClass::SpacelikePlane
    } else if margin < -tol {
        PlaneClass::LorentzianPlane
    } else {
        PlaneClass::DegeneratePlane
    }
}
