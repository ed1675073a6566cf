use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mgcert",
    version,
    about = "Two-grid and multigrid convergence bounds for dense SPD problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-grid bounds for one setup.
    #[command(args_override_self = true)]
    Analyze(RunArgs),
    /// Multilevel certificate for a Poisson hierarchy.
    #[command(args_override_self = true)]
    MgCertify(RunArgs),
    /// Bounds as the coarse solver `B_c = omega I` grows.
    #[command(args_override_self = true)]
    SweepOmega(RunArgs),
    /// Block two-by-two example over a grid of C.B.S. constants.
    #[command(args_override_self = true)]
    SweepAlpha(RunArgs),
    /// Seeded randomized invariant suite.
    #[command(args_override_self = true)]
    Verify(RunArgs),
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Analyze(a)
            | Command::MgCertify(a)
            | Command::SweepOmega(a)
            | Command::SweepAlpha(a)
            | Command::Verify(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Lap1d,
    Lap2d,
    Files,
    AlphaExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmootherChoice {
    Jacobi,
    GaussSeidel,
    /// `blkdiag(A_ff, A_cc)`; alpha-example only.
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoarsestChoice {
    Exact,
    Shift,
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Coarse solver of a two-grid setup.
#[derive(Debug, Clone, PartialEq)]
pub enum BcChoice {
    /// `B_c = A_c`.
    Exact,
    /// `B_c = P_0^T A P_0`, the coarse block of `A`; alpha-example only.
    Embedded,
    ScaledIdentity(f64),
    File(PathBuf),
}

impl FromStr for BcChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "exact" => Ok(BcChoice::Exact),
            None if s == "embedded" => Ok(BcChoice::Embedded),
            Some(("scaled-identity", w)) => {
                let w: f64 = w
                    .parse()
                    .map_err(|e| format!("bad scaled-identity factor `{w}`: {e}"))?;
                if w > 0.0 && w.is_finite() {
                    Ok(BcChoice::ScaledIdentity(w))
                } else {
                    Err(format!("scaled-identity factor must be positive, got {w}"))
                }
            }
            Some(("file", path)) if !path.is_empty() => Ok(BcChoice::File(path.into())),
            _ => Err(format!(
                "expected exact, embedded, scaled-identity:<omega> or file:<path>, got `{s}`"
            )),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// key=value file; its settings come before, and are overridden by, the command line.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ProblemKind::Lap1d)]
    pub problem: ProblemKind,
    /// Unknowns of the 1D Laplacian (odd).
    #[arg(long, default_value_t = 15)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub nx: usize,
    #[arg(long, default_value_t = 7)]
    pub ny: usize,
    /// Fine matrix file for `--problem files`.
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Prolongation file for `--problem files`.
    #[arg(long)]
    pub p: Option<PathBuf>,
    /// Coarse solver file; same as `--bc file:<path>`.
    #[arg(long)]
    pub bc_file: Option<PathBuf>,
    /// exact | embedded | scaled-identity:<omega> | file:<path>
    #[arg(long)]
    pub bc: Option<BcChoice>,

    #[arg(long, value_enum, default_value_t = SmootherChoice::Jacobi)]
    pub smoother: SmootherChoice,
    /// Jacobi weight.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub omega: f64,

    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// Cycle index: 1 for V-cycle, 2 for W-cycle.
    #[arg(long, default_value_t = 1)]
    pub gamma: usize,
    #[arg(long, value_enum, default_value_t = CoarsestChoice::Exact)]
    pub coarsest: CoarsestChoice,
    /// Shift for `--coarsest shift`.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Factor for `--coarsest scale`, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub n_f: usize,
    #[arg(long, default_value_t = 2)]
    pub n_c: usize,

    /// Comma-separated sweep points.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Evaluate sweep points in parallel; output order is unchanged.
    #[arg(long)]
    pub parallel: bool,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const FLAGS: &[&str] = &["parallel"];

/// Splices the settings of `--config <file>` in right after the subcommand.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, arg) in args.iter().enumerate() {
        let Some(s) = arg.to_str() else { continue };
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if s == "--config" {
            let p = args.get(i + 1).ok_or("--config needs a path")?;
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut extra = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), no + 1))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(format!(
                "{}:{}: nested config files are not supported",
                path.display(),
                no + 1
            ));
        }
        if FLAGS.contains(&key.as_str()) {
            match value {
                "true" => extra.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(format!("{}:{}: `{key}` takes true or false", path.display(), no + 1)),
            }
        } else {
            extra.push(OsString::from(format!("--{key}")));
            extra.push(OsString::from(value));
        }
    }
    let at = 2.min(args.len());
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
