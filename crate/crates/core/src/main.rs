//! Command-line front end for the analysis pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use heavytail::distributions::DistributionSpec;
use heavytail::error::Error;
use heavytail::ingest::{self, ColumnSchema};
use heavytail::maxent::{self, EntropyKind, MaxEntProblem};
use heavytail::report::{self, AnalysisConfig};

/// Exit code for unusable input (missing/empty/badly-shaped files).
const EXIT_INPUT: u8 = 3;
/// Exit code for computation failures (fits, solvers, tests).
const EXIT_COMPUTE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Heavy-tail analysis of procurement-style transaction data",
    after_help = "Exit codes: 0 success, 2 usage error, 3 input error, 4 computation error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a record file and write the report and
    /// plot-ready TSV tables.
    Analyze(AnalyzeArgs),
    /// Draw a synthetic sample from a reference distribution.
    Simulate(SimulateArgs),
    /// Solve a constrained maximum-entropy problem on a level grid.
    Maxent(MaxentArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input file: delimiter-separated with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Exclude entities whose aggregated total falls below this floor.
    #[arg(long, default_value_t = 2_000_000.0)]
    floor: f64,
    /// Tail cutoff in standardized units.
    #[arg(long, default_value_t = 1.0)]
    cutoff: f64,
    /// Bootstrap replicate count.
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    /// Ranks entering the Zipf regression.
    #[arg(long = "top-k", default_value_t = 100)]
    top_k: usize,
    /// Seed for the bootstrap replicate streams.
    #[arg(long)]
    seed: u64,
    /// Re-estimate the exponent on each bootstrap replicate.
    #[arg(long)]
    refit: bool,
    /// Directory for the report and plot files.
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    /// Also write per-series replicate KS statistics, one per line.
    #[arg(long = "dump-replicates")]
    dump_replicates: bool,
    /// Also write per-series Lorenz curves as TSV.
    #[arg(long = "dump-lorenz")]
    dump_lorenz: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Family {
    Exponential,
    Pareto,
    QExponential,
}

#[derive(Args)]
struct SimulateArgs {
    /// Distribution family to draw from.
    #[arg(long, value_enum)]
    family: Family,
    /// Power-law exponent (pareto).
    #[arg(long)]
    alpha: Option<f64>,
    /// Rate (exponential).
    #[arg(long)]
    beta: Option<f64>,
    /// Entropic index in (1, 2) (q-exponential).
    #[arg(long)]
    q: Option<f64>,
    /// Scale (q-exponential).
    #[arg(long)]
    scale: Option<f64>,
    /// Support lower bound.
    #[arg(long = "x-min", default_value_t = 1.0)]
    x_min: f64,
    /// Number of values to draw.
    #[arg(long)]
    n: usize,
    /// Generator seed.
    #[arg(long)]
    seed: u64,
    /// Output file, one value per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EntropyArg {
    Shannon,
    Tsallis,
}

#[derive(Args)]
struct MaxentArgs {
    /// Explicit comma-separated level grid, e.g. "1,2,4,8".
    #[arg(long, conflicts_with = "levels_log")]
    levels: Option<String>,
    /// Logarithmic level grid as "min,max,count".
    #[arg(long = "levels-log")]
    levels_log: Option<String>,
    /// Target mean (must lie strictly between the smallest and largest level).
    #[arg(long)]
    target: f64,
    /// Entropy functional to maximize.
    #[arg(long, value_enum)]
    entropy: EntropyArg,
    /// Entropic index (tsallis only; positive, not 1).
    #[arg(long)]
    q: Option<f64>,
    /// Write the solution document (JSON) here.
    #[arg(long)]
    out: PathBuf,
    /// Also write the probability vector as level/probability TSV.
    #[arg(long = "probs-out")]
    probs_out: Option<PathBuf>,
    /// Also draw this many synthetic values from the solution.
    #[arg(long = "sample-n")]
    sample_n: Option<usize>,
    /// Seed for the synthetic draw.
    #[arg(long = "sample-seed", default_value_t = 0)]
    sample_seed: u64,
    /// Output file for the synthetic draw, one value per line.
    #[arg(long = "sample-out")]
    sample_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Maxent(args) => cmd_maxent(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_input_error() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_COMPUTE)
            }
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let schema = ColumnSchema {
        delimiter: args.delimiter as u8,
        ..ColumnSchema::default()
    };
    let file = fs::File::open(&args.input)?;
    let parsed = ingest::parse_records(file, &schema)?;
    if parsed.records.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} contains no usable records",
            args.input.display()
        )));
    }

    let config = AnalysisConfig {
        floor: args.floor,
        cutoff: args.cutoff,
        replicates: args.replicates,
        top_k: args.top_k,
        refit: args.refit,
    };

    // Compute everything before touching the output directory so a failed
    // series never leaves partial outputs behind.
    let output = report::run_analysis(&parsed.records, parsed.skipped.len(), &config, args.seed)?;

    fs::create_dir_all(&args.out_dir)?;
    write_text(
        &args.out_dir.join("report.json"),
        &format!("{}\n", serde_json::to_string_pretty(&output.report)?),
    )?;
    for plot in &output.plots {
        write_text(&args.out_dir.join(&plot.name), &plot.to_tsv())?;
    }
    if args.dump_replicates {
        for (name, block) in [
            ("bidders", &output.report.bidders),
            ("revenues", &output.report.revenues),
            ("spendings", &output.report.spendings),
        ] {
            write_text(
                &args.out_dir.join(format!("replicates_{name}.txt")),
                &report::sample_lines(&block.bootstrap.replicate_ks),
            )?;
        }
    }
    if args.dump_lorenz {
        for (kind, curve) in &output.lorenz_curves {
            write_text(
                &args.out_dir.join(format!("lorenz_{kind}.tsv")),
                &report::lorenz_tsv(curve),
            )?;
        }
    }

    for block in [
        &output.report.bidders,
        &output.report.revenues,
        &output.report.spendings,
    ] {
        let fit = &block.fits[0];
        eprintln!(
            "{}: n = {}, exponent = {:.4}, bootstrap p = {:.4}, gini = {:.4}",
            block.kind, block.n, fit.exponent, block.bootstrap.p_value, block.gini
        );
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    let spec = match args.family {
        Family::Pareto => DistributionSpec::pareto(require(args.alpha, "--alpha")?, args.x_min)?,
        Family::Exponential => {
            DistributionSpec::exponential(require(args.beta, "--beta")?, args.x_min)?
        }
        Family::QExponential => DistributionSpec::q_exponential(
            require(args.q, "--q")?,
            require(args.scale, "--scale")?,
            args.x_min,
        )?,
    };
    let sample = spec.sample(args.n, args.seed)?;
    write_text(&args.out, &report::sample_lines(sample.values()))?;
    Ok(())
}

fn cmd_maxent(args: MaxentArgs) -> Result<(), Error> {
    let levels = match (&args.levels, &args.levels_log) {
        (Some(spec), None) => parse_levels(spec)?,
        (None, Some(spec)) => parse_log_levels(spec)?,
        _ => {
            return Err(Error::Config(
                "exactly one of --levels or --levels-log is required".into(),
            ))
        }
    };
    let entropy = match args.entropy {
        EntropyArg::Shannon => EntropyKind::Shannon,
        EntropyArg::Tsallis => EntropyKind::Tsallis {
            q: require(args.q, "--q")?,
        },
    };
    let problem = MaxEntProblem::new(levels, args.target, entropy)?;
    let solution = maxent::solve(&problem)?;

    write_text(
        &args.out,
        &format!("{}\n", serde_json::to_string_pretty(&solution)?),
    )?;
    if let Some(path) = &args.probs_out {
        let mut tsv = String::from("level\tprobability\n");
        for (m, p) in solution.levels.iter().zip(&solution.probabilities) {
            tsv.push_str(&format!("{m}\t{p}\n"));
        }
        write_text(path, &tsv)?;
    }
    if let Some(n) = args.sample_n {
        let path = args.sample_out.as_ref().ok_or_else(|| {
            Error::Config("--sample-n needs --sample-out".into())
        })?;
        let sample = maxent::generate_synthetic(&solution, n, args.sample_seed)?;
        write_text(path, &report::sample_lines(sample.values()))?;
    }
    eprintln!(
        "kappa = {:.6}, lambda = {:.6}, achieved mean = {:.6}, entropy = {:.6}",
        solution.kappa, solution.lambda, solution.achieved_mean, solution.entropy_value
    );
    Ok(())
}

fn require(value: Option<f64>, flag: &str) -> Result<f64, Error> {
    value.ok_or_else(|| Error::Config(format!("{flag} is required for this family")))
}

fn parse_levels(spec: &str) -> Result<Vec<f64>, Error> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad level value {s:?}")))
        })
        .collect()
}

fn parse_log_levels(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(
            "--levels-log expects \"min,max,count\"".into(),
        ));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad min {:?}", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad max {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad count {:?}", parts[2])))?;
    MaxEntProblem::log_levels(min, max, count)
}

fn write_text(path: &Path, content: &str) -> Result<(), Error> {
    fs::write(path, content)?;
    Ok(())
}
