//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use kg_bohm_core::measure::{Lattice, Region};
use kg_bohm_core::{
    analyze_point, integrate, CausalClass, FourVector, PlaneClass, Selection, Superposition,
    Tolerances, TrajectoryConfig, Verdict,
};
use serde_json::{json, Value};

use crate::cli::{Cli, Command, RegionArgs};
use crate::config::{self, WaveConfig};
use crate::manifest::{self, ConfigRecord, RunManifest};
use crate::output::{self, vec_json};
use crate::{parallel, Error};

/// Relative tolerance of the `verify` comparison.
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// `verify` ran but a check failed.
    Mismatch,
}

pub fn run(
    cli: &Cli,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    match cli.global.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.into())
                .build()?;
            pool.install(|| dispatch(cli, stdout, stderr))
        }
        None => dispatch(cli, stdout, stderr),
    }
}

fn dispatch(
    cli: &Cli,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let tols = cli.global.tolerances();
    match &cli.command {
        Command::Verify { mass } => verify(*mass, &tols, stdout),
        Command::Classify { config, x } => classify(config, x, &tols, stdout),
        Command::Scan {
            config,
            region,
            resolution,
            out,
        } => scan(config, region, *resolution, out, &tols, stderr),
        Command::Trajectory {
            config,
            x0,
            step,
            max_steps,
            out,
        } => trajectory(config, x0, *step, *max_steps as usize, out, &tols, stderr),
        Command::Measure {
            config,
            region,
            n,
            seed,
            out,
        } => measure(config, region, *n, *seed, out.as_deref(), &tols, stdout),
        Command::SamplePairs {
            n,
            seed,
            sigma,
            out,
        } => sample_pairs(*n, *seed, *sigma, out.as_deref(), &tols, stdout),
    }
}

fn stdout_json(stdout: &mut (dyn Write + Send), value: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(Error::Json)?;
    writeln!(stdout, "{text}").map_err(|e| Error::Io("stdout".into(), e))
}

fn emit_json(
    out: Option<&Path>,
    stdout: &mut (dyn Write + Send),
    value: &Value,
) -> Result<(), Error> {
    match out {
        Some(path) => manifest::write_json(path, value),
        None => stdout_json(stdout, value),
    }
}

fn load(source: &str) -> Result<(Superposition, ConfigRecord), Error> {
    let w = config::load(source)?;
    let record = ConfigRecord {
        source: source.to_string(),
        wave: WaveConfig::from_superposition(&w),
    };
    Ok((w, record))
}

fn region(args: &RegionArgs) -> Result<Region, Error> {
    Region::new(args.lo, args.hi).map_err(|_| Error::InvalidArgument {
        flag: "--lo/--hi",
        reason: format!(
            "need lo < hi in every component, got lo = {} and hi = {}",
            args.lo, args.hi
        ),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(path.display().to_string(), e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), Error> {
    w.flush()
        .map_err(|e| Error::Io(path.display().to_string(), e))
}

/// Largest componentwise deviation, relative to the largest expected component.
fn relative_deviation(got: &FourVector, expected: &FourVector) -> f64 {
    let scale = expected
        .components()
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    let dev = (*got - *expected)
        .components()
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    dev / scale
}

pub fn verify(
    mass: f64,
    tols: &Tolerances,
    stdout: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let w = Superposition::paper_counterexample(mass).map_err(Error::Compute)?;
    let gamma = 3.0 - 1.0 / 3f64.sqrt();
    let alpha = 26f64.sqrt() * mass / gamma;
    let beta = alpha / 3f64.sqrt();
    let p_expected = FourVector::new(0.0, alpha, -alpha, 0.0);
    let s_expected = FourVector::new(0.0, -beta, 0.0, 0.0);
    let theta_expected = (-5.0 * 3f64.sqrt() / 6.0).asinh();

    let point = analyze_point(&w, &FourVector::ZERO, tols).map_err(Error::Compute)?;
    let pair = &point.pair;
    let p_dev = relative_deviation(&point.polar.p, &p_expected);
    let s_dev = relative_deviation(&point.polar.s, &s_expected);
    let theta_dev = (pair.theta - theta_expected).abs() / theta_expected.abs();
    let checks = [
        ("P", p_dev <= VERIFY_TOL, json!(p_dev)),
        ("S", s_dev <= VERIFY_TOL, json!(s_dev)),
        ("theta", theta_dev <= VERIFY_TOL, json!(theta_dev)),
        (
            "W+ spacelike",
            pair.class_plus == CausalClass::Spacelike,
            json!(pair.class_plus.as_str()),
        ),
        (
            "W- spacelike",
            pair.class_minus == CausalClass::Spacelike,
            json!(pair.class_minus.as_str()),
        ),
        (
            "selection",
            pair.selection == Selection::BothSpacelike,
            json!(pair.selection.as_str()),
        ),
        (
            "plane",
            pair.plane == PlaneClass::SpacelikePlane,
            json!(pair.plane.as_str()),
        ),
    ];
    let pass = checks.iter().all(|(_, ok, _)| *ok);
    let report = json!({
        "mass": mass,
        "alpha": alpha,
        "beta": beta,
        "p": vec_json(&point.polar.p),
        "p_expected": vec_json(&p_expected),
        "s": vec_json(&point.polar.s),
        "s_expected": vec_json(&s_expected),
        "theta": pair.theta,
        "theta_expected": theta_expected,
        "w_plus": vec_json(&pair.w_plus),
        "w_minus": vec_json(&pair.w_minus),
        "class_plus": pair.class_plus.as_str(),
        "class_minus": pair.class_minus.as_str(),
        "selection": pair.selection.as_str(),
        "plane": pair.plane.as_str(),
        "tolerance": VERIFY_TOL,
        "checks": checks
            .iter()
            .map(|(name, ok, value)| json!({ "name": name, "pass": ok, "value": value }))
            .collect::<Vec<_>>(),
        "pass": pass,
        "manifest": RunManifest::new("verify", *tols, json!({ "mass": mass })).to_value(),
    });
    stdout_json(stdout, &report)?;
    Ok(if pass {
        Status::Success
    } else {
        Status::Mismatch
    })
}

pub fn classify(
    source: &str,
    x: &FourVector,
    tols: &Tolerances,
    stdout: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let (w, record) = load(source)?;
    let mut report = match analyze_point(&w, x, tols) {
        Ok(point) => output::point_json(&point),
        Err(kg_bohm_core::Error::OrthogonalDegenerate { ratio }) => {
            let polar = w
                .polar_gradients(x, tols.node_tol)
                .map_err(Error::Compute)?;
            output::orthogonal_point_json(x, polar.psi, &polar.p, &polar.s, ratio, tols)
        }
        Err(e) => return Err(Error::Compute(e)),
    };
    let mut m = RunManifest::new("classify", *tols, json!({ "x": vec_json(x) }));
    m.config = Some(record);
    report["manifest"] = m.to_value();
    stdout_json(stdout, &report)?;
    Ok(Status::Success)
}

pub fn scan(
    source: &str,
    region_args: &RegionArgs,
    resolution: [usize; 4],
    out: &Path,
    tols: &Tolerances,
    stderr: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let (w, record) = load(source)?;
    let lattice =
        Lattice::new(region(region_args)?, resolution).map_err(|e| Error::InvalidArgument {
            flag: "--resolution",
            reason: e.to_string(),
        })?;
    let cells = parallel::grid_scan(&w, &lattice, tols);
    let mut file = create(out)?;
    output::write_scan_csv(&mut file, &cells)?;
    finish(file, out)?;

    let tally = kg_bohm_core::measure::scan_tally(&cells);
    let mut m = RunManifest::new(
        "scan",
        *tols,
        json!({
            "lo": vec_json(&region_args.lo),
            "hi": vec_json(&region_args.hi),
            "resolution": resolution,
            "lattice": "cell-centers",
        }),
    );
    m.config = Some(record);
    m.outputs.push(out.display().to_string());
    manifest::write_sidecar(out, &m)?;
    let _ = writeln!(
        stderr,
        "scanned {} cells, {} BothSpacelike",
        tally.total(),
        tally.count(Verdict::BothSpacelike)
    );
    Ok(Status::Success)
}

pub fn trajectory(
    source: &str,
    x0: &FourVector,
    step: f64,
    max_steps: usize,
    out: &Path,
    tols: &Tolerances,
    stderr: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let (w, record) = load(source)?;
    let cfg = TrajectoryConfig {
        step,
        max_steps,
        tols: *tols,
    };
    if cfg.step_is_coarse(w.mass()) {
        let _ = writeln!(
            stderr,
            "warning: --step {step} exceeds 1/m = {}; the field is poorly resolved",
            1.0 / w.mass()
        );
    }
    let result = match integrate(&w, x0, &cfg) {
        Ok(r) => r,
        Err(e) => {
            let verdict = match e {
                kg_bohm_core::Error::IllDefinedVelocity(sel) => Some(Verdict::from(sel)),
                ref other => Verdict::from_outcome::<()>(&Err(*other), |_| Selection::Boundary),
            };
            return Err(match verdict {
                Some(v) => {
                    let _ = writeln!(stderr, "verdict at x0: {v}");
                    Error::IllDefinedStart(v)
                }
                None => Error::Compute(e),
            });
        }
    };
    let mut file = create(out)?;
    output::write_trajectory_csv(&mut file, &result)?;
    finish(file, out)?;

    let mut m = RunManifest::new(
        "trajectory",
        *tols,
        json!({ "x0": vec_json(x0), "step": step, "max_steps": max_steps }),
    );
    m.config = Some(record);
    m.outputs.push(out.display().to_string());
    manifest::write_sidecar(out, &m)?;
    let _ = writeln!(
        stderr,
        "{} steps, termination: {}",
        result.points.len() - 1,
        result.termination
    );
    Ok(Status::Success)
}

pub fn measure(
    source: &str,
    region_args: &RegionArgs,
    n: u64,
    seed: u64,
    out: Option<&Path>,
    tols: &Tolerances,
    stdout: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let (w, record) = load(source)?;
    let region = region(region_args)?;
    let est = parallel::estimate_spacetime_fraction(&w, &region, n, seed, tols)
        .map_err(Error::Compute)?;
    let mut report = output::estimate_json(&est, tols);
    let mut m = RunManifest::new(
        "measure",
        *tols,
        json!({ "lo": vec_json(&region_args.lo), "hi": vec_json(&region_args.hi), "n": n }),
    );
    m.config = Some(record);
    m.seed = Some(seed);
    m.outputs.extend(out.map(|p| p.display().to_string()));
    report["manifest"] = m.to_value();
    emit_json(out, stdout, &report)?;
    Ok(Status::Success)
}

pub fn sample_pairs(
    n: u64,
    seed: u64,
    sigma: f64,
    out: Option<&Path>,
    tols: &Tolerances,
    stdout: &mut (dyn Write + Send),
) -> Result<Status, Error> {
    let est = parallel::sample_pair_space(n, seed, sigma, tols).map_err(Error::Compute)?;
    let mut report = output::estimate_json(&est, tols);
    let mut m = RunManifest::new("sample-pairs", *tols, json!({ "n": n, "sigma": sigma }));
    m.seed = Some(seed);
    m.outputs.extend(out.map(|p| p.display().to_string()));
    report["manifest"] = m.to_value();
    emit_json(out, stdout, &report)?;
    Ok(Status::Success)
}
