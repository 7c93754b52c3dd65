//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kg_bohm_core::{FourVector, Tolerances};

#[derive(Debug, Parser)]
#[command(
    name = "kg-bohm",
    version,
    about = "Velocity fields W± for Klein-Gordon wave functions: verification, classification, scans, trajectories and measure estimates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalOpts {
    /// Relative tolerance for causal classification of W± and of span{P, S}.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.class_tol, value_parser = positive_f64, allow_negative_numbers = true)]
    pub class_tol: f64,
    /// Points with 2|P·S| ≤ ortho-tol·(|P|² + |S|²) are reported as orthogonal-degenerate.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.ortho_tol, value_parser = positive_f64, allow_negative_numbers = true)]
    pub ortho_tol: f64,
    /// Points with |ψ| ≤ node-tol·Σ|c| are treated as nodes.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.node_tol, value_parser = positive_f64, allow_negative_numbers = true)]
    pub node_tol: f64,
    /// Worker threads for scan, measure and sample-pairs. Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

impl GlobalOpts {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            class_tol: self.class_tol,
            ortho_tol: self.ortho_tol,
            node_tol: self.node_tol,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the three-mode counterexample at the origin against its closed form.
    Verify {
        #[arg(long, default_value_t = 1.0, value_parser = positive_f64, allow_negative_numbers = true)]
        mass: f64,
    },
    /// Analyze a single event and print the result as JSON.
    Classify {
        /// Config file, or `paper-counterexample`.
        #[arg(long)]
        config: String,
        /// Event as four comma-separated reals.
        #[arg(long, value_parser = four_vector, allow_hyphen_values = true)]
        x: FourVector,
    },
    /// Classify every cell center of a lattice and write CSV.
    Scan {
        #[arg(long)]
        config: String,
        #[command(flatten)]
        region: RegionArgs,
        /// Cells per axis: one integer, or four comma-separated integers.
        #[arg(long, value_parser = resolution)]
        resolution: [usize; 4],
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the selected velocity field with RK4 and write CSV.
    Trajectory {
        #[arg(long)]
        config: String,
        #[arg(long, value_parser = four_vector, allow_hyphen_values = true)]
        x0: FourVector,
        /// Proper-time step in units of 1/m.
        #[arg(long, default_value_t = 0.01, value_parser = positive_f64, allow_negative_numbers = true)]
        step: f64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        max_steps: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo fraction of a space-time box per verdict.
    Measure {
        #[arg(long)]
        config: String,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo fraction of isotropic-normal (P, S) pairs per verdict.
    SamplePairs {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, value_parser = positive_f64, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Args)]
pub struct RegionArgs {
    /// Lower corner of the box.
    #[arg(long, default_value = "-0.5,-0.5,-0.5,-0.5", value_parser = four_vector, allow_hyphen_values = true)]
    pub lo: FourVector,
    /// Upper corner of the box.
    #[arg(long, default_value = "0.5,0.5,0.5,0.5", value_parser = four_vector, allow_hyphen_values = true)]
    pub hi: FourVector,
}

pub fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

pub fn four_vector(s: &str) -> Result<FourVector, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected four comma-separated reals, got {} value(s)",
            parts.len()
        ));
    }
    let mut c = [0.0; 4];
    for (slot, part) in c.iter_mut().zip(&parts) {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a number", part.trim()))?;
        if !v.is_finite() {
            return Err(format!("component {v} is not finite"));
        }
        *slot = v;
    }
    Ok(FourVector(c))
}

pub fn resolution(s: &str) -> Result<[usize; 4], String> {
    let parse = |p: &str| -> Result<usize, String> {
        match p.trim().parse::<usize>() {
            Ok(0) => Err("cell counts must be at least 1".to_string()),
            Ok(v) => Ok(v),
            Err(_) => Err(format!("`{}` is not a positive integer", p.trim())),
        }
    };
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [one] => Ok([parse(one)?; 4]),
        [a, b, c, d] => Ok([parse(a)?, parse(b)?, parse(c)?, parse(d)?]),
        _ => Err("expected one integer or four comma-separated integers".to_string()),
    }
}
