//! Command-line front end: `analyze`, `scan`, `sample`, `verify`.
//!
//! Exit codes: 0 ok, 1 property failure, 2 usage or parse error, 3 invalid
//! state.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::absolute::{ball_distance, decide_aus3, AbsoluteError};
use crate::families::{self, Family, FamilyError, Grid};
use crate::numlin::RealMatrix3;
use crate::states::{from_bloch, spectrum_report, to_bloch, validate, BlochForm, DensityMatrix, StateError};
use crate::steering::{f2_max, f3_max};
use crate::telep_chsh::aux_criteria;
use crate::unitary::{aus3_volume_estimate, SamplingError, SeededGenerator};
use crate::verify::{corrupted_bloch_y_sign, Battery};
use crate::witness::{activation_witness, WitnessError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_STATE: i32 = 3;

/// Significant digits for every number written by the CLI.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("property check failed")]
    PropertyFailure,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::PropertyFailure => EXIT_PROPERTY,
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::InvalidState(_) => EXIT_INVALID_STATE,
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::InvalidState(e.to_string())
    }
}

impl From<AbsoluteError> for CliError {
    fn from(e: AbsoluteError) -> Self {
        CliError::InvalidState(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::InvalidGrid(_) => CliError::Usage(e.to_string()),
            _ => CliError::InvalidState(e.to_string()),
        }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::State(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "abs-steer", version, about = "Absolute steering analysis of two-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Werner,
    Gisin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    PauliYSign,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report for one state file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curve of f3_global_max − 1 along a one-parameter family.
    Scan {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        /// Gisin angle θ ∈ (0, π/2).
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the AUS3 volume fraction.
    Sample {
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery.
    Verify {
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Negative control: run the battery against a deliberately broken
        /// convention.
        #[arg(long, value_enum, hide = true)]
        fault_inject: Option<FaultArg>,
    },
}

/// Parse arguments, run, print diagnostics, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("abs-steer: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Analyze { input, out } => {
            let text = fs::read_to_string(input).map_err(|source| CliError::Io {
                path: input.clone(),
                source,
            })?;
            let report = cmd_analyze(&text, &input.display().to_string())?;
            emit(out.as_deref(), &report)
        }
        Command::Scan {
            family,
            from,
            to,
            step,
            theta,
            out,
        } => {
            let family = match family {
                FamilyArg::Werner => Family::Werner,
                FamilyArg::Gisin => Family::Gisin { theta: *theta },
            };
            let curve = cmd_scan(family, *from, *to, *step)?;
            emit(out.as_deref(), &curve)
        }
        Command::Sample { samples, seed, out } => {
            let report = cmd_sample(*samples, *seed)?;
            emit(out.as_deref(), &report)
        }
        Command::Verify {
            trials,
            seed,
            out,
            fault_inject,
        } => {
            let (report, ok) = cmd_verify(*trials, *seed, *fault_inject)?;
            emit(out.as_deref(), &report)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::PropertyFailure)
            }
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Format with [`SIG_DIGITS`] significant digits. Values below `1e-14` in
/// magnitude are printed as `0`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-14 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..12).contains(&exp) {
        return format!("{:.*e}", SIG_DIGITS - 1, x);
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_mat3(m: &RealMatrix3) -> String {
    let rows: Vec<String> = m.0.iter().map(|r| fmt_vec(r)).collect();
    format!("[{}]", rows.join(", "))
}

/// One state per file, tagged by `format`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    /// Rows of `[re, im]` pairs.
    Matrix { matrix: [[[f64; 2]; 4]; 4] },
    Bloch {
        a: [f64; 3],
        b: [f64; 3],
        t: [[f64; 3]; 3],
    },
    /// `werner {p}`, `gisin {lambda, theta}`, `xstate {v1..v6}`.
    Family {
        family: String,
        parameters: BTreeMap<String, f64>,
    },
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn format_tag(&self) -> &'static str {
        match self {
            StateFile::Matrix { .. } => "matrix",
            StateFile::Bloch { .. } => "bloch",
            StateFile::Family { .. } => "family",
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix, CliError> {
        match self {
            StateFile::Matrix { matrix } => {
                let mut m = crate::numlin::ComplexMatrix4::zeros();
                for i in 0..4 {
                    for j in 0..4 {
                        m.0[i][j] = num_complex::Complex64::new(matrix[i][j][0], matrix[i][j][1]);
                    }
                }
                Ok(validate(&m)?)
            }
            StateFile::Bloch { a, b, t } => Ok(from_bloch(&BlochForm {
                a: *a,
                b: *b,
                t: RealMatrix3(*t),
            })?),
            StateFile::Family { family, parameters } => family_state(family, parameters),
        }
    }
}

fn family_state(family: &str, params: &BTreeMap<String, f64>) -> Result<DensityMatrix, CliError> {
    let expect = |names: &[&str]| -> Result<Vec<f64>, CliError> {
        for k in params.keys() {
            if !names.contains(&k.as_str()) {
                return Err(CliError::Parse(format!("unknown parameter `{k}` for {family}")));
            }
        }
        names
            .iter()
            .map(|n| {
                params
                    .get(*n)
                    .copied()
                    .ok_or_else(|| CliError::Parse(format!("missing parameter `{n}` for {family}")))
            })
            .collect()
    };
    let state = match family {
        "werner" => families::werner(expect(&["p"])?[0])?,
        "gisin" => {
            let v = expect(&["lambda", "theta"])?;
            families::gisin(v[0], v[1])?
        }
        "xstate" => {
            let v = expect(&["v1", "v2", "v3", "v4", "v5", "v6"])?;
            families::x_state([v[0], v[1], v[2], v[3], v[4], v[5]])?
        }
        other => return Err(CliError::Parse(format!("unknown family `{other}`"))),
    };
    Ok(state)
}

/// Render the analysis report for a state file's contents.
pub fn cmd_analyze(text: &str, source: &str) -> Result<String, CliError> {
    let file = StateFile::parse(text)?;
    let rho = file.to_state()?;
    let bloch = to_bloch(&rho);
    let spec = spectrum_report(&rho)?;
    let verdict = decide_aus3(&rho)?;
    let f2 = f2_max(&rho);
    let f3 = f3_max(&rho);
    let aux = aux_criteria(&rho);

    let mut r = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(r, "{k} = {v}");
    };
    kv("input.source", source.to_string());
    kv("input.format", file.format_tag().to_string());
    if let StateFile::Family { family, parameters } = &file {
        kv("input.family", family.clone());
        for (name, value) in parameters {
            kv(&format!("input.parameters.{name}"), fmt_num(*value));
        }
    }
    kv("bloch.a", fmt_vec(&bloch.a));
    kv("bloch.b", fmt_vec(&bloch.b));
    kv("bloch.t", fmt_mat3(&bloch.t));
    kv("spectrum.eigenvalues", fmt_vec(&spec.eigenvalues));
    kv("spectrum.purity", fmt_num(verdict.purity));
    kv("spectrum.pairwise_sum", fmt_num(spec.pairwise_sum));
    kv("steering.f2_max", fmt_num(f2.value));
    kv("steering.f3_max", fmt_num(f3.value));
    kv("absolute.f3_global_max", fmt_num(verdict.f3_global_max));
    kv("absolute.spectrum_lhs", fmt_num(verdict.spectrum_lhs));
    kv("absolute.bloch_sum", fmt_num(verdict.bloch_sum));
    kv("absolute.ball_distance", fmt_num(ball_distance(&rho)));
    kv("teleportation.n", fmt_num(aux.n));
    kv("chsh.m", fmt_num(aux.m));
    kv("verdict.unsteerable_as_given", (!f3.violated).to_string());
    kv("verdict.in_aus3", verdict.in_aus3.to_string());
    kv("verdict.teleportation_useful", aux.teleportation_useful().to_string());
    kv("verdict.chsh_local", (!aux.violates_chsh()).to_string());
    match activation_witness(&rho) {
        Ok(w) => {
            kv("witness.activatable", "true".to_string());
            kv("witness.expectation", fmt_num(w.expectation(&rho)));
        }
        Err(WitnessError::NotActivatable { .. }) => kv("witness.activatable", "false".to_string()),
        Err(e) => return Err(CliError::InvalidState(e.to_string())),
    }
    Ok(r)
}

/// Curve file: `#` metadata header, a column header, one row per grid point,
/// and a trailing `# threshold=` line.
pub fn cmd_scan(family: Family, from: f64, to: f64, step: f64) -> Result<String, CliError> {
    let grid = Grid::new(from, to, step)?;
    let scan = families::scan_family(family, grid)?;
    let mut out = String::new();
    let theta = match family {
        Family::Gisin { theta } => format!(" theta={}", fmt_num(theta)),
        Family::Werner => String::new(),
    };
    let _ = writeln!(
        out,
        "# family={}{theta} parameter={} from={} to={} step={} points={}",
        family.name(),
        family.parameter_name(),
        fmt_num(from),
        fmt_num(to),
        fmt_num(step),
        scan.points.len()
    );
    let _ = writeln!(out, "{},f3_global_max_minus_1,in_aus3", family.parameter_name());
    for p in &scan.points {
        let _ = writeln!(out, "{},{},{}", fmt_num(p.parameter), fmt_num(p.excess()), p.verdict.in_aus3);
    }
    let threshold = scan.threshold.map_or_else(|| "none".to_string(), fmt_num);
    let _ = writeln!(out, "# threshold={threshold}");
    Ok(out)
}

/// Parsed curve file.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub metadata: BTreeMap<String, String>,
    pub parameter_name: String,
    pub rows: Vec<(f64, f64, bool)>,
    pub threshold: Option<f64>,
}

pub fn parse_curve(text: &str) -> Result<Curve, CliError> {
    let bad = |msg: String| CliError::Parse(msg);
    let mut lines = text.lines();
    let meta_line = lines.next().ok_or_else(|| bad("empty curve file".into()))?;
    let meta_body = meta_line
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing metadata header".into()))?;
    let metadata: BTreeMap<String, String> = meta_body
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let header = lines.next().ok_or_else(|| bad("missing column header".into()))?;
    let parameter_name = header
        .split(',')
        .next()
        .ok_or_else(|| bad("bad column header".into()))?
        .to_string();
    let mut rows = Vec::new();
    let mut threshold = None;
    for line in lines {
        if let Some(t) = line.strip_prefix("# threshold=") {
            threshold = match t {
                "none" => None,
                v => Some(v.parse().map_err(|_| bad(format!("bad threshold `{v}`")))?),
            };
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(bad(format!("bad row `{line}`")));
        }
        let x = cols[0].parse().map_err(|_| bad(format!("bad number `{}`", cols[0])))?;
        let y = cols[1].parse().map_err(|_| bad(format!("bad number `{}`", cols[1])))?;
        let z = cols[2].parse().map_err(|_| bad(format!("bad flag `{}`", cols[2])))?;
        rows.push((x, y, z));
    }
    Ok(Curve {
        metadata,
        parameter_name,
        rows,
        threshold,
    })
}

pub fn cmd_sample(samples: usize, seed: u64) -> Result<String, CliError> {
    let mut g = SeededGenerator::new(seed, 0);
    let v = aus3_volume_estimate(samples, &mut g)?;
    let mut r = String::new();
    let _ = writeln!(r, "measure = hilbert-schmidt");
    let _ = writeln!(r, "seed = {seed}");
    let _ = writeln!(r, "samples = {}", v.samples);
    let _ = writeln!(r, "inside = {}", v.inside);
    let _ = writeln!(r, "fraction = {}", fmt_num(v.fraction));
    let _ = writeln!(r, "stderr = {}", fmt_num(v.stderr));
    Ok(r)
}

/// Returns the report and whether every property passed.
pub fn cmd_verify(trials: usize, seed: u64, fault: Option<FaultArg>) -> Result<(String, bool), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut battery = Battery::new(trials, seed);
    if let Some(FaultArg::PauliYSign) = fault {
        battery.bloch = corrupted_bloch_y_sign;
    }
    let results = battery.run()?;
    let mut r = String::new();
    let _ = writeln!(r, "# trials={trials} seed={seed}");
    for p in &results {
        let _ = writeln!(r, "{p}");
    }
    let ok = results.iter().all(|p| p.passed);
    let _ = writeln!(r, "{}", if ok { "ALL PASS" } else { "FAILED" });
    Ok((r, ok))
}
