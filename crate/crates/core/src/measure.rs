//! Volume fractions of the selection verdicts.
//!
//! Two reference measures are supported: the uniform measure on an
//! axis-aligned box of space-time, and an isotropic normal measure on the
//! eight-dimensional space of `(P, S)` pairs. Sampling is split into fixed
//! chunks; chunk `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `c`, so any partition of the chunks over workers tallies identically.

use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::hdn::{analyze_point, pair_verdict, point_verdict, Tolerances, Verdict};
use crate::minkowski::FourVector;
use crate::wavefield::Superposition;

/// Samples per chunk.
pub const CHUNK_LEN: u64 = 4096;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Axis-aligned box in contravariant event coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    lo: FourVector,
    hi: FourVector,
}

impl Region {
    pub fn new(lo: FourVector, hi: FourVector) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidConfig("region corners must be finite"));
        }
        if (0..4).any(|i| !(lo[i] < hi[i])) {
            return Err(Error::InvalidConfig(
                "region needs lo < hi in every component",
            ));
        }
        Ok(Region { lo, hi })
    }

    /// `[-half, half]⁴`.
    pub fn centered_cube(half: f64) -> Result<Self> {
        Region::new(
            FourVector::new(-half, -half, -half, -half),
            FourVector::new(half, half, half, half),
        )
    }

    pub fn lo(&self) -> FourVector {
        self.lo
    }

    pub fn hi(&self) -> FourVector {
        self.hi
    }

    pub fn volume(&self) -> f64 {
        (0..4).map(|i| self.hi[i] - self.lo[i]).product()
    }

    /// Maps a point of the unit cube onto the box.
    pub fn at(&self, unit: [f64; 4]) -> FourVector {
        let mut c = [0.0; 4];
        for i in 0..4 {
            c[i] = self.lo[i] + unit[i] * (self.hi[i] - self.lo[i]);
        }
        FourVector(c)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FourVector {
        self.at([rng.random(), rng.random(), rng.random(), rng.random()])
    }
}

/// Counts per [`Verdict`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    counts: [u64; Verdict::ALL.len()],
}

impl Tally {
    pub fn record(&mut self, v: Verdict) {
        self.counts[v.index()] += 1;
    }

    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
    }

    pub fn count(&self, v: Verdict) -> u64 {
        self.counts[v.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

impl FromIterator<Verdict> for Tally {
    fn from_iter<I: IntoIterator<Item = Verdict>>(iter: I) -> Self {
        let mut t = Tally::default();
        for v in iter {
            t.record(v);
        }
        t
    }
}

/// Wilson score interval for `k` successes in `n` trials at normal
/// quantile `z`. Both ends lie in `[0, 1]`; the lower end is exactly 0
/// when `k = 0`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f));
    let lo = if k == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if k == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Which reference measure produced an estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampling {
    /// Uniform on a space-time box.
    SpaceTime(Region),
    /// Each of the 8 components of (P, S) drawn from `N(0, sigma²)`.
    PairSpace { sigma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionEstimate {
    pub tally: Tally,
    pub seed: u64,
    pub sampling: Sampling,
}

impl FractionEstimate {
    pub fn total(&self) -> u64 {
        self.tally.total()
    }

    pub fn fraction(&self, v: Verdict) -> f64 {
        let n = self.total();
        if n == 0 {
            0.0
        } else {
            self.tally.count(v) as f64 / n as f64
        }
    }

    /// Binomial standard error `√(p(1−p)/n)` of [`fraction`](Self::fraction).
    pub fn standard_error(&self, v: Verdict) -> f64 {
        let n = self.total() as f64;
        let p = self.fraction(v);
        libm::sqrt(p * (1.0 - p) / n)
    }

    pub fn wilson_95(&self, v: Verdict) -> (f64, f64) {
        wilson_interval(self.tally.count(v), self.total(), Z_95)
    }
}

/// Number of chunks covering `n` samples.
pub fn chunk_count(n: u64) -> u64 {
    n.div_ceil(CHUNK_LEN)
}

/// Samples in chunk `chunk` of an `n`-sample run.
pub fn chunk_len(n: u64, chunk: u64) -> u64 {
    let start = chunk * CHUNK_LEN;
    n.saturating_sub(start).min(CHUNK_LEN)
}

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1"));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig("sigma must be positive and finite"));
    }
    Ok(())
}

/// The space-time points of one chunk.
pub fn spacetime_chunk_points(region: &Region, seed: u64, chunk: u64, len: u64) -> Vec<FourVector> {
    let mut rng = chunk_rng(seed, chunk);
    (0..len).map(|_| region.sample(&mut rng)).collect()
}

/// Tally of one space-time chunk.
pub fn spacetime_chunk(
    w: &Superposition,
    region: &Region,
    seed: u64,
    chunk: u64,
    len: u64,
    tols: &Tolerances,
) -> Tally {
    let mut rng = chunk_rng(seed, chunk);
    (0..len)
        .map(|_| point_verdict(w, &region.sample(&mut rng), tols))
        .collect()
}

/// Uniform Monte Carlo estimate of the verdict fractions over `region`.
///
/// Chunks are processed serially; a parallel driver can call
/// [`spacetime_chunk`] directly and merge in chunk order.
pub fn estimate_spacetime_fraction(
    w: &Superposition,
    region: &Region,
    n: u64,
    seed: u64,
    tols: &Tolerances,
) -> Result<FractionEstimate> {
    check_n(n)?;
    tols.validate()?;
    let mut tally = Tally::default();
    for c in 0..chunk_count(n) {
        tally.merge(&spacetime_chunk(w, region, seed, c, chunk_len(n, c), tols));
    }
    Ok(FractionEstimate {
        tally,
        seed,
        sampling: Sampling::SpaceTime(*region),
    })
}

/// The `(P, S)` pairs of one chunk.
pub fn pair_chunk_samples(
    sigma: f64,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Vec<(FourVector, FourVector)> {
    let normal = Normal::new(0.0, sigma).expect("sigma validated by caller");
    let mut rng = chunk_rng(seed, chunk);
    let mut draw = || {
        FourVector::new(
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
        )
    };
    (0..len)
        .map(|_| {
            let p = draw();
            let s = draw();
            (p, s)
        })
        .collect()
}

/// Tally of one pair-space chunk.
pub fn pair_chunk(sigma: f64, seed: u64, chunk: u64, len: u64, tols: &Tolerances) -> Tally {
    pair_chunk_samples(sigma, seed, chunk, len)
        .iter()
        .map(|(p, s)| pair_verdict(p, s, tols))
        .collect()
}

/// Verdict fractions over the 8-dimensional pair space under an isotropic
/// normal measure of scale `sigma`.
pub fn sample_pair_space(
    n: u64,
    seed: u64,
    sigma: f64,
    tols: &Tolerances,
) -> Result<FractionEstimate> {
    check_n(n)?;
    check_sigma(sigma)?;
    tols.validate()?;
    let mut tally = Tally::default();
    for c in 0..chunk_count(n) {
        tally.merge(&pair_chunk(sigma, seed, c, chunk_len(n, c), tols));
    }
    Ok(FractionEstimate {
        tally,
        seed,
        sampling: Sampling::PairSpace { sigma },
    })
}

/// Regular lattice of cell centers over a region.
///
/// Cell `(i₀, i₁, i₂, i₃)` sits at `lo + (i + ½)(hi − lo)/n` per axis; the
/// flat index runs with the last axis fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    region: Region,
    resolution: [usize; 4],
}

impl Lattice {
    pub fn new(region: Region, resolution: [usize; 4]) -> Result<Self> {
        if resolution.contains(&0) {
            return Err(Error::InvalidConfig(
                "resolution must be at least 1 on every axis",
            ));
        }
        if resolution
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .is_none()
        {
            return Err(Error::InvalidConfig("lattice too large"));
        }
        Ok(Lattice { region, resolution })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn resolution(&self) -> [usize; 4] {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 4] {
        let mut rest = flat;
        let mut idx = [0; 4];
        for axis in (0..4).rev() {
            idx[axis] = rest % self.resolution[axis];
            rest /= self.resolution[axis];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> FourVector {
        let idx = self.multi_index(flat);
        let mut unit = [0.0; 4];
        for axis in 0..4 {
            unit[axis] = (idx[axis] as f64 + 0.5) / self.resolution[axis] as f64;
        }
        self.region.at(unit)
    }
}

/// One lattice cell of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCell {
    pub x: FourVector,
    pub verdict: Verdict,
    /// Present whenever θ could be formed.
    pub theta: Option<f64>,
    pub w_plus_sq: Option<f64>,
    pub w_minus_sq: Option<f64>,
}

fn scan_cell(w: &Superposition, x: FourVector, tols: &Tolerances) -> ScanCell {
    match analyze_point(w, &x, tols) {
        Ok(pt) => ScanCell {
            x,
            verdict: pt.selection().into(),
            theta: Some(pt.pair.theta),
            w_plus_sq: Some(pt.pair.w_plus_sq()),
            w_minus_sq: Some(pt.pair.w_minus_sq()),
        },
        Err(err) => ScanCell {
            x,
            verdict: Verdict::from_outcome::<()>(&Err(err), |_| unreachable!())
                .unwrap_or(Verdict::Overflow),
            theta: None,
            w_plus_sq: None,
            w_minus_sq: None,
        },
    }
}

/// Scans the cells with flat indices in `range`. Concatenating the scans of
/// consecutive ranges equals the scan of their union.
pub fn grid_scan_range(
    w: &Superposition,
    lattice: &Lattice,
    range: Range<usize>,
    tols: &Tolerances,
) -> Vec<ScanCell> {
    range
        .map(|i| scan_cell(w, lattice.point(i), tols))
        .collect()
}

pub fn grid_scan(w: &Superposition, lattice: &Lattice, tols: &Tolerances) -> Vec<ScanCell> {
    grid_scan_range(w, lattice, 0..lattice.len(), tols)
}

pub fn scan_tally(cells: &[ScanCell]) -> Tally {
    cells.iter().map(|c| c.verdict).collect()
}

/// Lower estimate of the radius of a Euclidean ball around `center` that
/// lies entirely in the `BothSpacelike` set.
///
/// Along each of `n_directions` random directions (plus the 8 coordinate
/// directions) the first exit is bracketed by marching out in steps of
/// `r_max / 64` and then refined by bisection. Returns the smallest exit
/// radius, `0` if `center` itself is not `BothSpacelike`, and `r_max` if no
/// exit was seen.
pub fn open_set_radius(
    w: &Superposition,
    center: &FourVector,
    r_max: f64,
    n_directions: usize,
    seed: u64,
    tols: &Tolerances,
) -> f64 {
    let inside = |x: &FourVector| point_verdict(w, x, tols) == Verdict::BothSpacelike;
    if !inside(center) {
        return 0.0;
    }
    let mut directions = Vec::with_capacity(n_directions + 8);
    for axis in 0..4 {
        for sign in [1.0, -1.0] {
            let mut d = [0.0; 4];
            d[axis] = sign;
            directions.push(FourVector(d));
        }
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = chunk_rng(seed, 0);
    while directions.len() < n_directions + 8 {
        let d = FourVector::new(
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
        );
        let len = d.euclidean_norm();
        if len > 1e-12 {
            directions.push(d.scale(1.0 / len));
        }
    }

    const MARCH: usize = 64;
    let dr = r_max / MARCH as f64;
    let mut best = r_max;
    for d in &directions {
        let at = |r: f64| *center + d.scale(r);
        let exit = (1..=MARCH)
            .map(|i| i as f64 * dr)
            .find(|&r| !inside(&at(r)));
        if let Some(mut hi) = exit {
            let mut lo = hi - dr;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if inside(&at(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.min(lo);
        }
    }
    best
}
