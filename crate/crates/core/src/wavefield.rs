//! Finite superpositions of positive-energy Klein–Gordon plane waves,
//! `ψ(x) = Σ cᵢ exp(i k⁽ⁱ⁾_μ x^μ)`, and the gradient fields of the polar
//! form `ψ = e^{P + iS}`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, ModeDefect, Result};
use crate::minkowski::{inner, FourVector};

/// Relative on-shell tolerance applied when a mode joins a superposition.
pub const SHELL_TOL: f64 = 1e-12;

/// One plane wave: covariant wave covector and complex amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWaveMode {
    pub k: FourVector,
    pub c: Complex64,
}

impl PlaneWaveMode {
    pub fn new(k: FourVector, c: Complex64) -> Self {
        PlaneWaveMode { k, c }
    }

    /// Puts the spatial wave vector on the positive-energy mass shell,
    /// `k₀ = √(m² + |k|²)`.
    pub fn on_shell(mass: f64, spatial: [f64; 3], c: Complex64) -> Self {
        let [k1, k2, k3] = spatial;
        let k0 = libm::sqrt(mass * mass + k1 * k1 + k2 * k2 + k3 * k3);
        PlaneWaveMode::new(FourVector::new(k0, k1, k2, k3), c)
    }

    fn check(&self, mass: f64) -> core::result::Result<(), ModeDefect> {
        if !self.k.is_finite() || !self.c.re.is_finite() || !self.c.im.is_finite() {
            return Err(ModeDefect::NonFinite);
        }
        if self.k[0] <= 0.0 {
            return Err(ModeDefect::NegativeEnergy);
        }
        let residual = libm::fabs(inner(&self.k, &self.k) - mass * mass);
        if residual > SHELL_TOL * mass * mass {
            return Err(ModeDefect::OffShell(residual));
        }
        if self.c.re == 0.0 && self.c.im == 0.0 {
            return Err(ModeDefect::ZeroAmplitude);
        }
        Ok(())
    }

    #[inline]
    fn phase_factor(&self, x: &FourVector) -> Complex64 {
        // k_μ x^μ: covariant against contravariant, no metric
        Complex64::cis(self.k.euclidean_dot(x))
    }
}

/// A validated superposition of on-shell, positive-energy modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition {
    mass: f64,
    modes: Vec<PlaneWaveMode>,
}

impl Superposition {
    pub fn new(mass: f64, modes: Vec<PlaneWaveMode>) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidMass(mass));
        }
        if modes.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        for (index, mode) in modes.iter().enumerate() {
            mode.check(mass)
                .map_err(|defect| Error::InvalidMode { index, defect })?;
        }
        Ok(Superposition { mass, modes })
    }

    /// The three-mode wave function whose gradients at the origin span a
    /// spacelike 2-plane:
    /// `k⁽¹⁾ = (m,0,0,0)`, `k⁽²⁾ = (√27m, √26m, 0, 0)`, `k⁽³⁾ = (√27m, 0, √26m, 0)`
    /// with amplitudes `3`, `−1/√3 − i`, `i`.
    pub fn paper_counterexample(mass: f64) -> Result<Self> {
        let r27 = libm::sqrt(27.0) * mass;
        let r26 = libm::sqrt(26.0) * mass;
        let modes = alloc::vec![
            PlaneWaveMode::new(
                FourVector::new(mass, 0.0, 0.0, 0.0),
                Complex64::new(3.0, 0.0)
            ),
            PlaneWaveMode::new(
                FourVector::new(r27, r26, 0.0, 0.0),
                Complex64::new(-1.0 / libm::sqrt(3.0), -1.0),
            ),
            PlaneWaveMode::new(
                FourVector::new(r27, 0.0, r26, 0.0),
                Complex64::new(0.0, 1.0)
            ),
        ];
        Superposition::new(mass, modes)
    }

    /// Draws `n_modes` modes with spatial wave-vector components from
    /// `N(0, k_scale²)` and amplitudes from a standard complex normal.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        mass: f64,
        n_modes: usize,
        k_scale: f64,
    ) -> Result<Self> {
        let modes = (0..n_modes)
            .map(|_| {
                let mut normal = || -> f64 { StandardNormal.sample(rng) };
                let spatial = [k_scale * normal(), k_scale * normal(), k_scale * normal()];
                let c = Complex64::new(normal(), normal());
                PlaneWaveMode::on_shell(mass, spatial, c)
            })
            .collect();
        Superposition::new(mass, modes)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn modes(&self) -> &[PlaneWaveMode] {
        &self.modes
    }

    /// Σ|cᵢ|, the largest value |ψ| can reach.
    pub fn amplitude_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.c.norm()).sum()
    }

    /// Concatenates the mode lists of two superpositions of equal mass.
    pub fn concat(&self, other: &Superposition) -> Result<Superposition> {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        Superposition::new(self.mass, modes)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Superposition> {
        let modes = self
            .modes
            .iter()
            .map(|m| PlaneWaveMode::new(m.k, m.c * factor))
            .collect();
        Superposition::new(self.mass, modes)
    }

    /// ψ(x) for contravariant event coordinates `x`.
    pub fn evaluate(&self, x: &FourVector) -> Complex64 {
        self.modes.iter().map(|m| m.c * m.phase_factor(x)).sum()
    }

    /// Analytic ∂_μψ(x) = Σ i cᵢ k⁽ⁱ⁾_μ e^{ik⁽ⁱ⁾·x}.
    pub fn gradient(&self, x: &FourVector) -> [Complex64; 4] {
        self.value_and_gradient(x).1
    }

    /// ψ and ∂_μψ from one pass over the modes.
    pub fn value_and_gradient(&self, x: &FourVector) -> (Complex64, [Complex64; 4]) {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut grad = [Complex64::new(0.0, 0.0); 4];
        for mode in &self.modes {
            let term = mode.c * mode.phase_factor(x);
            psi += term;
            let i_term = Complex64::new(-term.im, term.re);
            for (g, k) in grad.iter_mut().zip(mode.k.0.iter()) {
                *g += i_term * *k;
            }
        }
        (psi, grad)
    }

    /// □ψ = ∂^μ∂_μψ = −Σ cᵢ (k⁽ⁱ⁾·k⁽ⁱ⁾) e^{ik⁽ⁱ⁾·x}. Equals −m²ψ for on-shell modes.
    pub fn dalembertian(&self, x: &FourVector) -> Complex64 {
        self.modes
            .iter()
            .map(|m| m.c * m.phase_factor(x) * (-inner(&m.k, &m.k)))
            .sum()
    }

    /// ψ with `P_μ = Re(∂_μψ/ψ)` and `S_μ = Im(∂_μψ/ψ)`.
    ///
    /// Fails with [`Error::Node`] when `|ψ| ≤ node_tol · Σ|cᵢ|`.
    pub fn polar_gradients(&self, x: &FourVector, node_tol: f64) -> Result<PolarGradients> {
        let (psi, grad) = self.value_and_gradient(x);
        let psi_abs = psi.norm();
        let threshold = node_tol * self.amplitude_bound();
        if !(psi_abs > threshold) {
            return Err(Error::Node { psi_abs, threshold });
        }
        let inv = psi.inv();
        let log_grad = grad.map(|g| g * inv);
        Ok(PolarGradients {
            psi,
            p: FourVector(log_grad.map(|z| z.re)),
            s: FourVector(log_grad.map(|z| z.im)),
        })
    }
}

/// Value of ψ and the gradients of its log-amplitude `P` and phase `S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGradients {
    pub psi: Complex64,
    pub p: FourVector,
    pub s: FourVector,
}
