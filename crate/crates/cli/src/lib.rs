//! The `grd` command line. `run` parses argv, executes one subcommand and
//! returns the process exit code: 0 when every check passes, 1 when one
//! fails, 2 on input errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use grd_core::deaconu::{Graph, LocalSystem};
use grd_core::experiments::{self, BundleSpec, GrowthMode, RdTestConfig, SystemSpec};
use grd_core::growth::GrowthTable;
use grd_core::report::to_csv;
use grd_core::{CheckReport, Error};

#[derive(Parser, Debug)]
#[command(name = "grd", version, about = "Rapid-decay experiments on étale groupoids and Fell bundles")]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, env = "GRD_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads (0 = one per core). Output never depends on this.
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball counts and growth classification.
    Growth {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum, default_value_t = Mode::Fiber)]
        mode: Mode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// RD ratios and the norm inequalities on one fixture.
    Rdtest {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Growth class of the path groupoid of a graph read from JSON.
    ClassifyGraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        #[arg(long, default_value_t = 1)]
        unit_sample: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reduction map checks and the Steinberg sign determination.
    ReduceCheck {
        #[arg(long, default_value_t = 30)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        steinberg_radius: usize,
        #[arg(long, default_value_t = 6)]
        steinberg_depth: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Negative type, Schoenberg kernels, multiplier bounds, decay and
    /// local approximation.
    Multiplier {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Optional CSV of the decay trace `(t, error, bound)`.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Groupoid, length-function and bundle axioms on a fixture.
    Axioms {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        bundle: BundleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemKind {
    FullShift,
    Af,
    Graph,
    Pair,
    Cyclic,
    Symmetric,
    Integer,
    Free,
}

#[derive(Args, Debug)]
struct SystemArgs {
    #[arg(long, value_enum)]
    system: SystemKind,
    /// Alphabet size of the full shift.
    #[arg(long, default_value_t = 2)]
    arity: u32,
    /// Size parameter for pair, cyclic and symmetric fixtures.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Rank of the free group.
    #[arg(long, default_value_t = 2)]
    rank: u32,
    /// Truncation index of the AF chain.
    #[arg(long, default_value_t = 16)]
    af_depth: usize,
    /// Graph JSON for `--system graph`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    #[arg(long, default_value_t = 2)]
    unit_sample: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BundleKind {
    Trivial,
    Twisted,
    Action,
}

#[derive(Args, Debug)]
struct BundleArgs {
    #[arg(long, value_enum, default_value_t = BundleKind::Trivial)]
    bundle: BundleKind,
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Fiber,
    Kernel,
    Preimage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the extension of `--out`, else JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or(match self.out.as_deref().and_then(Path::extension) {
            Some(e) if e == "csv" => Format::Csv,
            _ => Format::Json,
        })
    }
}

fn read_graph(path: &Path) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Graph::from_json(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

impl SystemArgs {
    fn spec(&self) -> Result<SystemSpec, Error> {
        Ok(match self.system {
            SystemKind::FullShift => {
                LocalSystem::full_shift(self.arity)?;
                SystemSpec::FullShift { d: self.arity }
            }
            SystemKind::Af => SystemSpec::Af { k: self.af_depth },
            SystemKind::Graph => {
                let path = self.input.as_deref().ok_or_else(|| Error::Input("--system graph needs --input".into()))?;
                SystemSpec::Graph(read_graph(path)?)
            }
            SystemKind::Pair => SystemSpec::Pair { n: self.n },
            SystemKind::Cyclic => SystemSpec::Cyclic { n: self.n },
            SystemKind::Symmetric => SystemSpec::Symmetric { n: self.n },
            SystemKind::Integer => SystemSpec::Integer { radius: self.radius },
            SystemKind::Free => SystemSpec::FreeBall {
                rank: self.rank,
                radius: self.radius,
            },
        })
    }
}

impl BundleArgs {
    fn spec(&self) -> BundleSpec {
        match self.bundle {
            BundleKind::Trivial => BundleSpec::Trivial { dim: self.dim },
            BundleKind::Twisted => BundleSpec::Twisted,
            BundleKind::Action => BundleSpec::Action { dim: self.dim },
        }
    }
}

fn emit(rep: &CheckReport, table: Option<&GrowthTable>, out: &OutArgs) -> Result<(), Error> {
    let text = match (out.format(), table) {
        (Format::Json, _) => rep.to_json(),
        (Format::Csv, Some(t)) => t.to_csv()?,
        (Format::Csv, None) => to_csv(&rep.rows)?,
    };
    match &out.out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!(
                "{}: {} ({} rows, {} failing) -> {}",
                rep.command,
                if rep.passed() { "pass" } else { "fail" },
                rep.rows.len(),
                rep.failures().count(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<bool, Error> {
    let seed = cli.seed;
    let (rep, table, out) = match &cli.command {
        Command::Growth { system, mode, out } => {
            let mode = match mode {
                Mode::Fiber => GrowthMode::Fiber,
                Mode::Kernel => GrowthMode::Kernel,
                Mode::Preimage => GrowthMode::Preimage,
            };
            let (rep, table, _) = experiments::growth_report(&system.spec()?, mode, system.radius, system.unit_sample)?;
            (rep, Some(table), out)
        }
        Command::ClassifyGraph {
            input,
            radius,
            unit_sample,
            out,
        } => {
            let spec = SystemSpec::Graph(read_graph(input)?);
            let (mut rep, table, _) = experiments::growth_report(&spec, GrowthMode::Fiber, *radius, *unit_sample)?;
            rep.command = "classify-graph".into();
            (rep, Some(table), out)
        }
        Command::Rdtest {
            system,
            bundle,
            p,
            samples,
            out,
        } => {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::Input(format!("p must be a nonnegative number, got {p}")));
            }
            let cfg = RdTestConfig {
                system: system.spec()?,
                bundle: bundle.spec(),
                p: *p,
                samples: *samples,
                seed,
                radius: system.radius,
                unit_sample: system.unit_sample,
            };
            (experiments::rdtest(&cfg)?, None, out)
        }
        Command::ReduceCheck {
            samples,
            radius,
            depth,
            steinberg_radius,
            steinberg_depth,
            out,
        } => {
            let mut rep = CheckReport::new("reduce-check");
            rep.seed = seed;
            rep.absorb("reduction", experiments::reduction_suite(seed, *samples, *radius, *depth)?);
            let st = experiments::steinberg_suite(*steinberg_radius, *steinberg_depth)?;
            if let Some(s) = st.params.get("valid_signs") {
                rep.param("valid_signs", s);
            }
            rep.absorb("steinberg", st);
            rep.sort();
            (rep, None, out)
        }
        Command::Multiplier { samples, trace, out } => {
            let (rep, rows) = experiments::multiplier_suite(seed, *samples)?;
            if let Some(path) = trace {
                std::fs::write(path, to_csv(&rows)?)?;
            }
            (rep, None, out)
        }
        Command::Axioms { system, bundle, out } => (
            experiments::axioms_report(&system.spec()?, bundle.spec(), system.radius, system.unit_sample, seed)?,
            None,
            out,
        ),
    };
    emit(&rep, table.as_ref(), out)?;
    Ok(rep.passed())
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} workers: {e}", cli.workers);
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
