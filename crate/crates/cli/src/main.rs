use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quantgs::arrowlab::{dist_tr3, gcw, ngcw, nt, GswfIia};
use quantgs::harness::{
    check_instance, load_gswf, load_scf, metrics_report, reduce_report, run_suite, to_csv,
    to_json, GswfSpec, Instance, Suite, SuiteConfig, SuiteReport,
};
use quantgs::report::{within_budget, MetricRecord, MetricReport, Mode};
use quantgs::scfzoo::{zoo_make, RuleSpec, ScfTable};
use quantgs::Error;

const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "quantgs", version, about = "Manipulation and Condorcet-paradox quantities for social choice functions")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-SCF or per-GSWF metrics.
    Metrics(MetricsArgs),
    /// Build the IIA GSWF of an SCF on three alternatives and check the
    /// reduction chain.
    Reduce(ReduceArgs),
    /// Run a named verification suite, or replay one instance.
    Verify(VerifyArgs),
    /// Write a rule as an SCF3 table or a GSWF file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Dims {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
}

#[derive(Args)]
struct Sampling {
    /// Enumerate every profile; fails when over the exact budget.
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Sampling {
    fn mode(&self, m: usize, n: usize) -> Mode {
        match (self.exact, self.samples) {
            (true, _) => Mode::Exact,
            (false, Some(samples)) => Mode::Sampled { samples, seed: self.seed },
            (false, None) => Mode::auto(m, n, DEFAULT_SAMPLES, self.seed),
        }
    }
}

#[derive(Args)]
struct MetricsArgs {
    /// Zoo rule name or SCF3 file.
    #[arg(long, conflicts_with = "g", required_unless_present = "g")]
    scf: Option<String>,
    /// GSWF name or GSWF file.
    #[arg(long)]
    g: Option<String>,
    #[command(flatten)]
    dims: Dims,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    scf: String,
    #[command(flatten)]
    dims: Dims,
    #[arg(long, default_value_t = 0)]
    tie_voter: usize,
    /// Where to write the GSWF file.
    #[arg(long)]
    gswf_out: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Restrict the corpus to this voter count.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo samples where enumeration is out of budget.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    /// Re-run one serialized instance, as printed for a counterexample.
    #[arg(long)]
    replay: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenArgs {
    /// Zoo rule name, or `random` for a seeded random table.
    #[arg(long, conflicts_with = "g", required_unless_present = "g")]
    scf: Option<String>,
    /// GSWF name.
    #[arg(long)]
    g: Option<String>,
    #[command(flatten)]
    dims: Dims,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

/// Usage, input or I/O problems; exit status 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure(format!("{e} (--samples N)")),
            e => Failure(e.to_string()),
        }
    }
}

fn emit(output: &Output, text: String) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(output: &Output, reports: &[MetricReport]) -> Result<String, Failure> {
    let records: Vec<MetricRecord> = reports.iter().map(MetricReport::record).collect();
    Ok(match output.format {
        Format::Json => to_json(&records)? + "\n",
        Format::Csv => to_csv(&records),
    })
}

fn gswf_metrics(g: &GswfIia, mode: Mode) -> Result<Vec<MetricReport>, Failure> {
    let mut out = vec![ngcw(g, mode)?, gcw(g, mode)?];
    if g.m() == 3 {
        out.push(nt(g, mode)?);
        if within_budget(3, g.n()) {
            out.push(dist_tr3(g)?.0);
        }
    }
    for (p, t) in g.tables().iter().enumerate() {
        out.push(MetricReport::exact("table_ones", vec![p], t.ones() as u128, 1u128 << g.n()));
    }
    out.push(MetricReport::exact("neutral", vec![], g.is_neutral() as u128, 1));
    Ok(out)
}

fn metrics(args: MetricsArgs) -> Result<(), Failure> {
    let Dims { n, m } = args.dims;
    let mode = args.sampling.mode(m, n);
    let reports = match (&args.scf, &args.g) {
        (Some(source), _) => metrics_report(&load_scf(source, n, m)?, mode)?,
        (None, Some(source)) => gswf_metrics(&load_gswf(source, m, n)?, mode)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    emit(&args.output, render(&args.output, &reports)?)
}

fn reduce(args: ReduceArgs) -> Result<bool, Failure> {
    let f = load_scf(&args.scf, args.dims.n, args.dims.m)?;
    let out = reduce_report(&f, args.tie_voter)?;
    out.gswf.write(&args.gswf_out)?;
    emit(&args.output, render(&args.output, &out.records)?)?;
    if !out.chain.holds {
        eprintln!(
            "reduction chain violated: eps1={} eps2={} nt={} sum_nab={} dist_tr3={}",
            out.chain.eps1,
            out.chain.eps2,
            out.chain.nt,
            out.chain.sum_nab(),
            out.chain.dist_tr3
        );
    }
    Ok(out.chain.holds)
}

fn suite_text(output: &Output, r: &SuiteReport) -> Result<String, Failure> {
    Ok(match output.format {
        Format::Json => {
            serde_json::to_string_pretty(r).map_err(|e| Failure(e.to_string()))? + "\n"
        }
        Format::Csv => {
            let ce = r
                .counterexample
                .as_ref()
                .map(|c| format!("\"{}\"", c.to_string().replace('"', "\"\"")))
                .unwrap_or_default();
            format!(
                "suite,instances,passed,holds,wall_ms,counterexample\n{},{},{},{},{},{}\n",
                r.suite,
                r.instances,
                r.passed,
                r.holds(),
                r.wall_ms,
                ce
            )
        }
    })
}

fn verify(args: VerifyArgs) -> Result<bool, Failure> {
    let suite: Suite = args.suite.parse()?;
    if args.trials == 0 {
        return Err(Failure("--trials must be at least 1".into()));
    }
    let report = match &args.replay {
        Some(json) => {
            let inst: Instance = json.parse()?;
            let start = std::time::Instant::now();
            let ok = check_instance(suite, &inst)?;
            SuiteReport {
                suite: suite.name().to_string(),
                instances: 1,
                passed: ok as u64,
                counterexample: if ok { None } else { Some(inst) },
                wall_ms: start.elapsed().as_millis() as u64,
            }
        }
        None => {
            let cfg = SuiteConfig {
                trials: args.trials,
                seed: args.seed,
                n: args.n,
                samples: args.samples,
            };
            run_suite(suite, &cfg)?
        }
    };
    emit(&args.output, suite_text(&args.output, &report)?)?;
    if let Some(c) = &report.counterexample {
        eprintln!("counterexample; reproduce with:");
        eprintln!("  quantgs verify --suite {} --replay '{}'", suite.name(), c);
    }
    Ok(report.holds())
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let Dims { n, m } = args.dims;
    match (&args.scf, &args.g) {
        (Some(name), _) => {
            let spec = if name.trim() == "random" {
                let seed = args
                    .seed
                    .ok_or_else(|| Failure("`--scf random` needs --seed".into()))?;
                RuleSpec::RandomTable(seed)
            } else {
                name.parse()?
            };
            ScfTable::materialize(&zoo_make(&spec, n, m)?)?.write(&args.out)?;
        }
        (None, Some(name)) => {
            let name = match (name.trim(), args.seed) {
                ("random", Some(seed)) => format!("random({seed})"),
                ("random_odd", Some(seed)) => format!("random_odd({seed})"),
                (other, _) => other.to_string(),
            };
            GswfSpec::parse(&name, m, n)?.build()?.write(&args.out)?;
        }
        (None, None) => unreachable!("clap requires one source"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure(e.to_string()))?;
    }
    match cli.command {
        Command::Metrics(a) => metrics(a).map(|_| true),
        Command::Reduce(a) => reduce(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
