use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "stabgw",
    version,
    about = "Exact GW, Chern class, lattice and norm-ball computations for stabilized symplectic manifolds"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gromov-Witten invariants of S² and its powers.
    #[command(subcommand)]
    Gw(GwCmd),
    /// First Chern classes, Pontryagin numbers, signatures.
    #[command(subcommand)]
    Chern(ChernCmd),
    /// Isometry orbits of classes in an intersection lattice.
    #[command(subcommand)]
    Orbit(OrbitCmd),
    /// Unit balls of norms Σ|ℓᵢ(x)|.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Named end-to-end runs.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CapArg {
    Point,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum GwCmd {
    /// One invariant GW_{g,n,d}(α₁,…,αₙ) of S².
    Sphere {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        degree: i64,
        /// Comma separated classes in Z[h]/(h²), e.g. "1,h,2*h+1".
        #[arg(long)]
        insertions: String,
        #[arg(long, value_enum, default_value_t = CapArg::Point)]
        cap: CapArg,
        /// Also report the first canonical rewrite step.
        #[arg(long)]
        trace: bool,
    },
    /// 2^g table over g = 0..=max-genus.
    Table {
        #[arg(long, default_value_t = 12)]
        max_genus: u32,
    },
    /// Invariant of (S²)ᵏ with one degree per factor.
    Product {
        #[arg(long)]
        genus: u32,
        /// Comma separated, one per factor.
        #[arg(long)]
        degrees: String,
        /// Comma separated classes in h1, …, hk.
        #[arg(long)]
        insertions: String,
    },
    /// Unstable (g, n) through two extra divisor insertions.
    Lift {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        degree: i64,
        /// Comma separated; may be empty.
        #[arg(long, default_value = "")]
        insertions: String,
        #[arg(long, default_value = "h")]
        beta: String,
    },
    /// Integer feasibility of an equation script.
    Solve {
        /// Script file; `-e` lines are appended.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(short = 'e', long = "equation")]
        equations: Vec<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ManifoldArgs {
    /// Ring preset, e.g. S2xS2, E1, "#3CP2#19CP2bar".
    #[arg(long)]
    pub preset: Option<String>,
    /// First Chern class as a class expression.
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<i64>,
    /// JSON manifold description; overrides the other flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ChernCmd {
    /// c₁ of X × Y.
    Stabilize {
        #[command(flatten)]
        manifold: ManifoldArgs,
        /// cp<k>, s2^<k>, sigma<g>^<k> or t2; repeat for several factors.
        #[arg(long = "by", required = true)]
        stabilizers: Vec<String>,
    },
    /// Coefficient of PD[Σᵏ] in p₁(X × Σᵏ).
    P1 {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Signature of a fibre sum, e.g. "T4 + 5*E1".
    FibreSum {
        #[arg(long)]
        summands: String,
    },
    /// (divisibility, |c₁²|, characteristic).
    Fingerprint {
        #[command(flatten)]
        manifold: ManifoldArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrbitCmd {
    /// Obstruction, then a bounded witness search if it is silent.
    Check {
        /// Ring preset supplying the lattice.
        #[arg(long, conflicts_with = "gram")]
        preset: Option<String>,
        /// Gram matrix, rows separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        gram: Option<String>,
        /// Coordinates "1,-2" or, with a preset, a class expression.
        #[arg(long, allow_hyphen_values = true)]
        v0: String,
        #[arg(long, allow_hyphen_values = true)]
        v1: String,
        #[arg(long)]
        bound: Option<i64>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct NormArgs {
    /// borromean or l1:<n>.
    #[arg(long, conflicts_with = "generators")]
    pub preset: Option<String>,
    /// Functionals, rows separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    pub generators: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// Facets of the unit ball with their polygons and Euler classes.
    Facets {
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Is there a norm-preserving lattice map taking one facet to another?
    FaceOrbit {
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long)]
        f0: usize,
        #[arg(long)]
        f1: usize,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum PipelineCmd {
    /// Fibre sums T⁴ + (n+3)·E(1) and their stabilizations.
    Smith {
        #[arg(long)]
        n: u32,
    },
    /// Parity contradiction and the (a, b) classification on S²×S².
    Lemma57,
    /// Exhaustive box check of the stabilized isomorphism constraints.
    Prop22 {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 2)]
        bound: i64,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Random lattices: the obstruction is never contradicted by a witness.
    Soundness {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// All rewrite orders agree with the canonical evaluation.
    Confluence {
        #[arg(long, default_value_t = 5)]
        max_genus: u32,
        #[arg(long, default_value_t = 6)]
        max_points: u32,
        #[arg(long, default_value_t = 4)]
        max_degree: i64,
        #[arg(long, default_value_t = 3)]
        random_runs: usize,
    },
}

impl Command {
    fn label(&self) -> String {
        let debug = match self {
            Command::Gw(c) => format!("gw {c:?}"),
            Command::Chern(c) => format!("chern {c:?}"),
            Command::Orbit(c) => format!("orbit {c:?}"),
            Command::Polytope(c) => format!("polytope {c:?}"),
            Command::Pipeline(c) => format!("pipeline {c:?}"),
        };
        // "gw Sphere { .. }" -> "gw sphere"
        let mut words = debug.split_whitespace();
        let verb = words.next().unwrap_or_default();
        let sub: String = words
            .next()
            .unwrap_or_default()
            .trim_end_matches(|c: char| !c.is_alphanumeric())
            .chars()
            .enumerate()
            .flat_map(|(i, c)| {
                let lower = c.to_ascii_lowercase();
                if c.is_uppercase() && i > 0 {
                    vec!['-', lower]
                } else {
                    vec![lower]
                }
            })
            .collect();
        format!("{verb} {sub}")
    }
}

// a closed pipe downstream is not an error worth reporting
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            emit(&output::usage_error(msg.trim()));
            return ExitCode::from(2);
        }
    };
    let label = cli.command.label();
    match commands::run(&cli) {
        Ok(result) => {
            emit(&output::render(&label, cli.format, result));
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&output::error(&label, &e));
            ExitCode::from(1)
        }
    }
}
