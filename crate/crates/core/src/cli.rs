//! Command-line front end. Exit codes: 0 success, 2 invalid input or
//! arguments, 3 when a technique's precondition does not hold.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::evaluation::evaluate;
use crate::io::{self, Dataset, RankedFile, TruthFile};
use crate::localize::{detect, localize, LocalizeOptions};
use crate::metrics::Metric;
use crate::model::PartialConfiguration;
use crate::ranking::{Aggregation, Normalization, RankingConfig};
use crate::testkit::{generate_system, BugSpec, GeneratorSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "varfl",
    version,
    about = "Variability fault localization for product lines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank suspicious statements.
    Localize(LocalizeArgs),
    /// Detect suspicious partial configurations.
    Spcs(SpcsArgs),
    /// Score a ranked list against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic case.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub products: PathBuf,
    #[arg(long)]
    pub spectra: PathBuf,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        Dataset::load(&self.system, &self.products, &self.spectra)
    }

    fn manifest_inputs(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("system".to_owned(), self.system.display().to_string()),
            ("products".to_owned(), self.products.display().to_string()),
            ("spectra".to_owned(), self.spectra.display().to_string()),
        ])
    }
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// varcop, sbfl, ssbfl or fb.
    #[arg(long, default_value = "varcop")]
    pub technique: String,
    #[arg(long, default_value = "op2")]
    pub metric: String,
    #[arg(long, default_value_t = 0.5)]
    pub weight: f64,
    /// mean, geometric, max, min or median.
    #[arg(long, default_value = "mean")]
    pub agg: String,
    /// minmax or none.
    #[arg(long, default_value = "minmax")]
    pub norm: String,
    #[arg(short = 'K', long = "max-interaction", default_value_t = 7)]
    pub max_interaction: usize,
    #[arg(long)]
    pub include_forward: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl LocalizeArgs {
    pub fn options(&self) -> Result<LocalizeOptions> {
        let opts = LocalizeOptions {
            technique: self.technique.parse()?,
            ranking: RankingConfig {
                metric: self.metric.parse::<Metric>()?,
                weight: self.weight,
                aggregation: self.agg.parse::<Aggregation>()?,
                normalization: self.norm.parse::<Normalization>()?,
            },
            max_interaction: self.max_interaction,
            include_forward: self.include_forward,
        };
        opts.validate()?;
        Ok(opts)
    }
}

#[derive(Debug, Args)]
pub struct SpcsArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[arg(short = 'K', long = "max-interaction", default_value_t = 7)]
    pub max_interaction: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ranked list written by `localize`.
    #[arg(long)]
    pub ranked: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// System file used to check the ground-truth ids.
    #[arg(long)]
    pub system: PathBuf,
    /// JSON report; a table is printed to stdout either way.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Total features, the mandatory base included.
    #[arg(long, default_value_t = 5)]
    pub features: usize,
    #[arg(long, default_value_t = 20)]
    pub statements: usize,
    #[arg(long, default_value_t = 0.15)]
    pub density: f64,
    #[arg(long, default_value_t = 8)]
    pub products: usize,
    #[arg(long, default_value_t = 4)]
    pub tests: usize,
    /// Size of the random buggy partial configuration.
    #[arg(long, default_value_t = 2)]
    pub pc_size: usize,
    /// Fixed buggy partial configuration as JSON, e.g. '{"F1":true}'.
    #[arg(long)]
    pub pc: Option<String>,
    /// Directory to write the case into.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, serde::Serialize)]
struct GenManifest {
    seed: u64,
    features: usize,
    statements: usize,
    density: f64,
    products: usize,
    tests: usize,
    buggy_pc: PartialConfiguration,
    tool_version: String,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_localize(args: &LocalizeArgs) -> Result<()> {
    let opts = args.options()?;
    let dataset = args.inputs.load()?;
    let out = localize(&dataset, &opts)?;
    let file = out.to_file(opts.manifest(args.inputs.manifest_inputs()));
    emit(args.output.as_deref(), &io::to_json_string(&file))
}

fn cmd_spcs(args: &SpcsArgs) -> Result<()> {
    let dataset = args.inputs.load()?;
    let spcs = detect(&dataset, args.max_interaction)?;
    emit(args.output.as_deref(), &io::to_json_string(&spcs))
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let ranked: RankedFile = io::read_json(&args.ranked)?;
    let system = io::read_json::<io::SystemFile>(&args.system)?.into_system()?;
    let truth = io::ground_truth(&system, io::read_json::<TruthFile>(&args.truth)?)?;
    let report = evaluate(&ranked.to_ranked_list(), &truth);
    if let Some(path) = &args.output {
        io::write_json(path, &report)?;
    }
    print!("{}", report.to_table());
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let bug = match &args.pc {
        Some(text) => BugSpec::Fixed(io::parse_json("--pc", text)?),
        None => BugSpec::Random {
            pc_size: args.pc_size,
        },
    };
    let spec = GeneratorSpec {
        n_features: args.features,
        n_statements: args.statements,
        edge_density: args.density,
        n_products: args.products,
        tests_per_product: args.tests,
        seed: args.seed,
        bug,
    };
    let case = generate_system(&spec)?;
    let dir = &args.output;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let (system, products, spectra) = case.dataset.to_files();
    io::write_json(&dir.join("system.json"), &system)?;
    io::write_json(&dir.join("products.json"), &products)?;
    io::write_json(&dir.join("spectra.json"), &spectra)?;
    io::write_json(
        &dir.join("truth.json"),
        &TruthFile {
            buggy: case.truth.buggy().iter().cloned().collect(),
        },
    )?;
    io::write_json(
        &dir.join("manifest.json"),
        &GenManifest {
            seed: args.seed,
            features: args.features,
            statements: args.statements,
            density: args.density,
            products: args.products,
            tests: args.tests,
            buggy_pc: case.buggy_pc,
            tool_version: io::TOOL_VERSION.to_owned(),
        },
    )
}

/// Runs a parsed command and maps errors to exit codes.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Localize(a) => cmd_localize(a),
        Command::Spcs(a) => cmd_spcs(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_precondition() {
        EXIT_PRECONDITION
    } else {
        EXIT_INVALID
    }
}

/// Parses `std::env::args` and runs. Usage errors exit with 2.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            }
        }
    }
}
