//! Rayon drivers over the chunked core routines. Chunk results are merged
//! in chunk order, so the output does not depend on the thread count.

use kg_bohm_core::measure::{
    self, chunk_count, chunk_len, grid_scan_range, pair_chunk, spacetime_chunk, FractionEstimate,
    Lattice, Region, Sampling, ScanCell, Tally,
};
use kg_bohm_core::{Superposition, Tolerances};
use rayon::prelude::*;

/// Lattice cells handed to one rayon task.
pub const SCAN_CHUNK: usize = 4096;

fn check_n(n: u64) -> kg_bohm_core::Result<()> {
    if n == 0 {
        return Err(kg_bohm_core::Error::InvalidConfig(
            "sample count must be at least 1",
        ));
    }
    Ok(())
}

fn merge_in_order(parts: Vec<Tally>) -> Tally {
    parts.iter().fold(Tally::default(), |mut acc, t| {
        acc.merge(t);
        acc
    })
}

pub fn estimate_spacetime_fraction(
    w: &Superposition,
    region: &Region,
    n: u64,
    seed: u64,
    tols: &Tolerances,
) -> kg_bohm_core::Result<FractionEstimate> {
    check_n(n)?;
    // remaining validation shared with the serial path; one sample is cheap
    measure::estimate_spacetime_fraction(w, region, 1, seed, tols)?;
    let parts: Vec<Tally> = (0..chunk_count(n))
        .into_par_iter()
        .map(|c| spacetime_chunk(w, region, seed, c, chunk_len(n, c), tols))
        .collect();
    Ok(FractionEstimate {
        tally: merge_in_order(parts),
        seed,
        sampling: Sampling::SpaceTime(*region),
    })
}

pub fn sample_pair_space(
    n: u64,
    seed: u64,
    sigma: f64,
    tols: &Tolerances,
) -> kg_bohm_core::Result<FractionEstimate> {
    check_n(n)?;
    measure::sample_pair_space(1, seed, sigma, tols)?;
    let parts: Vec<Tally> = (0..chunk_count(n))
        .into_par_iter()
        .map(|c| pair_chunk(sigma, seed, c, chunk_len(n, c), tols))
        .collect();
    Ok(FractionEstimate {
        tally: merge_in_order(parts),
        seed,
        sampling: Sampling::PairSpace { sigma },
    })
}

pub fn grid_scan(w: &Superposition, lattice: &Lattice, tols: &Tolerances) -> Vec<ScanCell> {
    let len = lattice.len();
    let chunks: Vec<Vec<ScanCell>> = (0..len.div_ceil(SCAN_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * SCAN_CHUNK;
            grid_scan_range(w, lattice, start..(start + SCAN_CHUNK).min(len), tols)
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
