//! `mlat`: JSON in, JSON out front end for the lattice solvers.
//!
//! Exit codes: 0 success, 2 schema or parse error, 3 invalid input,
//! 4 cap or budget exceeded, 5 iteration or restart budget exhausted,
//! 6 missing exact data.

mod dispatch;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "mlat", version, about = "Lattice problems in general norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Accuracy parameter, a rational such as `1/10`.
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    /// Seed for randomized steps; required whenever one runs.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of lattice points per enumeration.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Use all cores for per-translate work.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Shortest nonzero vectors in the body's norm.
    Svp(Common),
    /// Closest vectors to the instance target.
    Cvp(Common),
    /// Lattice points within the instance distance of the target.
    Enum(Common),
    /// Lattice points in a centred ellipsoid around the target.
    EnumEllipsoid(Common),
    /// Shortest vectors for a Euclidean or ellipsoidal norm.
    SvpL2(Common),
    /// Closest vectors for a Euclidean or ellipsoidal norm.
    CvpL2(Common),
    /// Certified M-ellipsoid with primal and dual coverings.
    Mell(Common),
    /// Covering of the body by translates of a parallelepiped tiling.
    Cover {
        #[command(flatten)]
        common: Common,
        /// Covering budget parameter; the translate cap is ceil((√(8πe)·H)ⁿ).
        #[arg(long, default_value_t = 13.0 * std::f64::consts::E)]
        h: f64,
        /// Tile with this multiple of the unit ball instead of the body's
        /// analytic ellipsoid.
        #[arg(long)]
        ball_radius: Option<String>,
    },
    /// Integer feasibility of the body.
    Ip {
        #[command(flatten)]
        common: Common,
        /// Flatness bound: `safe` or `rudelson` (experimental).
        #[arg(long, default_value = "safe")]
        fbound: String,
        #[arg(long, default_value_t = 100_000)]
        max_nodes: usize,
    },
    /// Regenerate the golden fixtures into a directory.
    Oracle {
        /// Target directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, out, code) = dispatch::run(&cli.command);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
