use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "mqv", version, about = "Multiplicative quiver varieties: graphs, roots, checks and Deligne-Simpson experiments")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Residual tolerance overriding the per-check default.
    #[arg(long, global = true, value_parser = positive_float)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    /// Also append the machine lines to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Rational,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("tolerance must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect graph documents.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Root combinatorics of the dimension vector and parameters in a document.
    #[command(subcommand)]
    Roots(RootsCmd),
    /// Randomised checks of the matrix identities.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Deligne-Simpson criterion and numerical search.
    #[command(subcommand)]
    Ds(DsCmd),
    /// Wild character variety data read off a supernova document.
    Readings { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Nodes, colours, Cartan matrix and supernova structure.
    Info { file: PathBuf },
    /// The full quiver after attaching legs, as a document.
    Build { file: PathBuf },
    /// The fission graph of the irregular type in the document.
    Fission { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum RootsCmd {
    /// Root type of `d` and the positive roots with entries up to `bound`.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Reflection of `(q, d)` at a node (name or 0-based index).
    Reflect { file: PathBuf, node: String },
    /// Roots `0 < a < d` with `(a, a) <= 2` and `q^a = 1`.
    Generic { file: PathBuf },
    /// `2 - (d, d)`.
    Dim { file: PathBuf },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Analytic,
    Fd,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Gauss {
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    Twoform {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Derivative::Both)]
        derivative: Derivative,
    },
    Tame2stokes {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    Legs {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    Jordan {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    Splay {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    Triangle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Interval,
    Triangle,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Budget {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
}

#[derive(Subcommand, Debug)]
pub enum DsCmd {
    Criterion { file: PathBuf },
    Search {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
        /// Write the witness representation here when one is found.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Criterion against search on instance files or on a built-in family.
    Crossval {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<Family>,
        /// Largest total dimension in the built-in family.
        #[arg(long, default_value_t = 3)]
        max_total: i64,
        #[command(flatten)]
        budget: Budget,
    },
}

/// Why a command did not succeed.
pub enum Failure {
    Check,
    Input(String),
}

impl From<multiquiver::Error> for Failure {
    fn from(e: multiquiver::Error) -> Self {
        match e {
            multiquiver::Error::Counterexample(_) => {
                eprintln!("error: {e}");
                Failure::Check
            }
            e => Failure::Input(e.to_string()),
        }
    }
}

/// Collects machine lines so they can be mirrored to `--output`.
#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn human(&self, text: &str) {
        for line in text.lines() {
            println!("# {line}");
        }
    }

    pub fn machine(&mut self, line: String) {
        println!("{line}");
        self.lines.push(line);
    }

    fn flush_to(&self, path: &Path) -> std::io::Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut report = Report::default();
    let outcome = match &cli.command {
        Command::Graph(c) => commands::graph(c, &mut report),
        Command::Roots(c) => commands::roots(c, &mut report),
        Command::Verify(c) => commands::verify(c, &cli.config, &mut report),
        Command::Ds(c) => commands::ds(c, &cli.config, &mut report),
        Command::Readings { file } => commands::readings(file, &mut report),
    };
    if let Some(path) = &cli.config.output {
        if let Err(e) = report.flush_to(path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
