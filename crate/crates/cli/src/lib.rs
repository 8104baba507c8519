//! Command-line driver: ingest, rank, analyze and export.
//!
//! Every option can also be supplied through a `PATENTFLOW_*` environment
//! variable; explicit flags take precedence over the environment, which
//! takes precedence over built-in defaults.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use patentflow::testkit::{generate_synthetic_dataset, SyntheticSpec};
use patentflow::{
    class_inflow_series, crossover_year, excluded_flow_pipeline, pagerank, pagerank_sweep,
    patent_inflow_breakdown, top_table, write_flow_csv, write_scores_tsv, ClassFlowSeries,
    DanglingMode, Error, FlowMetric, PageRankParams, PageRankResult, PatentDataset, DAMPING_SWEEP,
};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "patentflow",
    version,
    about = "PageRank and class-flow analysis of patent citation networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank patents at one damping value.
    Rank(RankArgs),
    /// Rank patents at several damping values.
    Sweep(SweepArgs),
    /// Per-class, per-year inflow into a target class.
    Flow(FlowArgs),
    /// Inflow series after removing an assignee's citation neighborhood.
    ExcludeFlow(ExcludeFlowArgs),
    /// Inflow breakdown for a single patent.
    Patent(PatentArgs),
    /// Generate a synthetic dataset from a JSON spec.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Citation edges, `citing<TAB>cited` per line.
    #[arg(long, env = "PATENTFLOW_CITATIONS")]
    pub citations: PathBuf,
    /// Patent metadata, `id<TAB>class<TAB>year<TAB>assignee` per line.
    #[arg(long, env = "PATENTFLOW_PATENTS")]
    pub patents: PathBuf,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, env = "PATENTFLOW_EPSILON", default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, env = "PATENTFLOW_MAX_ITERS", default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, env = "PATENTFLOW_DANGLING_MODE", default_value_t = DanglingMode::UniformAll)]
    pub dangling_mode: DanglingMode,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "PATENTFLOW_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, env = "PATENTFLOW_OUT", default_value = ".")]
    pub out: PathBuf,
}

impl EngineArgs {
    fn params(&self, damping: f64) -> PageRankParams {
        PageRankParams {
            damping,
            epsilon: self.epsilon,
            max_iterations: self.max_iters,
            dangling_mode: self.dangling_mode,
        }
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, env = "PATENTFLOW_DAMPING", default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, env = "PATENTFLOW_TOP", default_value_t = 20)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(
        long,
        env = "PATENTFLOW_DAMPING_LIST",
        value_delimiter = ',',
        default_values_t = DAMPING_SWEEP
    )]
    pub damping_list: Vec<f64>,
    /// Damping value that orders the top table; 0.5 when listed, else the
    /// first value.
    #[arg(long, env = "PATENTFLOW_DAMPING")]
    pub damping: Option<f64>,
    #[arg(long, env = "PATENTFLOW_TOP", default_value_t = 20)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, env = "PATENTFLOW_DAMPING", default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, env = "PATENTFLOW_TARGET_CLASS")]
    pub target_class: String,
    /// Restrict output to one metric; both are written otherwise.
    #[arg(long, env = "PATENTFLOW_METRIC")]
    pub metric: Option<FlowMetric>,
    /// Two source classes `A,B`; reports the year B overtakes A.
    #[arg(long, env = "PATENTFLOW_CROSSOVER")]
    pub crossover: Option<ClassPair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPair(pub String, pub String);

impl FromStr for ClassPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(',') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() && !b.contains(',') => {
                Ok(ClassPair(a.trim().to_owned(), b.trim().to_owned()))
            }
            _ => Err(format!("expected two classes as A,B, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExcludeFlowArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, env = "PATENTFLOW_EXCLUDE_ASSIGNEE")]
    pub exclude_assignee: String,
}

#[derive(Debug, Args)]
pub struct PatentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, env = "PATENTFLOW_DAMPING", default_value_t = 0.5)]
    pub damping: f64,
    /// External patent id.
    #[arg(long)]
    pub patent: String,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// JSON file describing the synthetic dataset.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, env = "PATENTFLOW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "PATENTFLOW_OUT", default_value = ".")]
    pub out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on a domain or I/O error, 2 on a usage
/// error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let outcome = match cli.command.threads() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::InvalidParams(format!("thread pool: {e}"))),
        },
        None => execute(&cli.command),
    };
    match outcome {
        Ok(()) => {
            // Kept out of the summary file so outputs stay byte-identical.
            eprintln!(
                "{}",
                json!({ "wall_time_secs": started.elapsed().as_secs_f64() })
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

impl Command {
    fn threads(&self) -> Option<usize> {
        match self {
            Command::Rank(a) => a.engine.threads,
            Command::Sweep(a) => a.engine.threads,
            Command::Flow(a) => a.engine.threads,
            Command::ExcludeFlow(a) => a.flow.engine.threads,
            Command::Patent(a) => a.engine.threads,
            Command::Gen(_) => None,
        }
    }
}

fn execute(command: &Command) -> patentflow::Result<()> {
    match command {
        Command::Rank(a) => rank(a),
        Command::Sweep(a) => sweep(a),
        Command::Flow(a) => flow(a),
        Command::ExcludeFlow(a) => exclude_flow(a),
        Command::Patent(a) => patent(a),
        Command::Gen(a) => generate(a),
    }
}

fn load(input: &InputArgs) -> patentflow::Result<PatentDataset> {
    let citations = open(&input.citations)?;
    let patents = open(&input.patents)?;
    let ds = PatentDataset::from_readers(citations, patents)?;
    print_build_report(&ds);
    Ok(ds)
}

fn open(path: &Path) -> io::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn print_build_report(ds: &PatentDataset) {
    eprintln!(
        "{}",
        serde_json::to_string(ds.report()).expect("report serializes")
    );
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> io::Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

fn warn_unconverged(r: &PageRankResult) {
    if !r.converged {
        eprintln!(
            "warning: d={} stopped after {} iterations with delta {:e}",
            r.damping(),
            r.iterations,
            r.final_delta
        );
    }
}

fn write_rankings(
    ds: &PatentDataset,
    results: &[PageRankResult],
    principal: f64,
    top: usize,
    out: &Path,
) -> patentflow::Result<()> {
    for r in results {
        warn_unconverged(r);
        let mut w = create(out, &format!("scores_d{}.tsv", r.damping()))?;
        write_scores_tsv(&mut w, ds, r)?;
        w.flush()?;
    }
    let table = top_table(ds, results, top, principal, true)?;
    let text = table.to_text();
    print!("{text}");
    create(out, "top.txt")?.write_all(text.as_bytes())?;
    let mut csv = create(out, "top.csv")?;
    table.write_csv(&mut csv)?;
    csv.flush()?;
    Ok(())
}

fn rank(a: &RankArgs) -> patentflow::Result<()> {
    let ds = load(&a.input)?;
    let result = pagerank(ds.graph(), &a.engine.params(a.damping))?;
    write_rankings(
        &ds,
        std::slice::from_ref(&result),
        a.damping,
        a.top,
        &a.engine.out,
    )?;
    write_json(
        &a.engine.out,
        "summary.json",
        &json!({ "command": "rank", "nodes": ds.node_count(), "runs": [result] }),
    )?;
    Ok(())
}

fn sweep(a: &SweepArgs) -> patentflow::Result<()> {
    let ds = load(&a.input)?;
    if a.damping_list.is_empty() {
        return Err(Error::InvalidParams("empty damping list".into()));
    }
    let principal = a.damping.unwrap_or_else(|| {
        if a.damping_list.contains(&0.5) {
            0.5
        } else {
            a.damping_list[0]
        }
    });
    let results = pagerank_sweep(ds.graph(), &a.damping_list, &a.engine.params(principal))?;
    write_rankings(&ds, &results, principal, a.top, &a.engine.out)?;
    for r in &results {
        eprintln!("d={}: {} iterations", r.damping(), r.iterations);
    }
    write_json(
        &a.engine.out,
        "summary.json",
        &json!({ "command": "sweep", "nodes": ds.node_count(), "runs": results }),
    )?;
    Ok(())
}

fn metrics(choice: Option<FlowMetric>) -> Vec<FlowMetric> {
    match choice {
        Some(m) => vec![m],
        None => FlowMetric::ALL.to_vec(),
    }
}

fn crossover_report(series: &[ClassFlowSeries], classes: Option<&ClassPair>) -> Value {
    let Some(ClassPair(a, b)) = classes else {
        return Value::Null;
    };
    let years: serde_json::Map<String, Value> = series
        .iter()
        .map(|s| {
            let year = crossover_year(s, a, b);
            let shown = year.map_or_else(|| "none".to_owned(), |y| y.to_string());
            println!("{} crossover {a} -> {b}: {shown}", s.metric);
            (s.metric.to_string(), json!(year))
        })
        .collect();
    json!({ "class_a": a, "class_b": b, "year": years })
}

fn flow(a: &FlowArgs) -> patentflow::Result<()> {
    let ds = load(&a.input)?;
    let result = pagerank(ds.graph(), &a.engine.params(a.damping))?;
    warn_unconverged(&result);
    let series = metrics(a.metric)
        .into_iter()
        .map(|m| class_inflow_series(&ds, &result, &a.target_class, m))
        .collect::<patentflow::Result<Vec<_>>>()?;
    if !series[0].target_present {
        eprintln!("warning: no patent has class {}", a.target_class);
    }
    let mut w = create(&a.engine.out, "flow.csv")?;
    write_flow_csv(&mut w, &series)?;
    w.flush()?;
    write_json(
        &a.engine.out,
        "summary.json",
        &json!({
            "command": "flow",
            "target_class": a.target_class,
            "nodes": ds.node_count(),
            "runs": [result],
            "crossover": crossover_report(&series, a.crossover.as_ref()),
        }),
    )?;
    Ok(())
}

fn exclude_flow(a: &ExcludeFlowArgs) -> patentflow::Result<()> {
    let f = &a.flow;
    let ds = load(&f.input)?;
    let params = f.engine.params(f.damping);
    let mut series = Vec::new();
    let mut exclusion = Value::Null;
    let mut runs = Vec::new();
    let mut reduced_nodes = 0;
    // The exclusion set and reduced ranking do not depend on the metric, so
    // only the first pass reports them.
    for metric in metrics(f.metric) {
        let outcome =
            excluded_flow_pipeline(&ds, &a.exclude_assignee, &f.target_class, metric, &params)?;
        if runs.is_empty() {
            warn_unconverged(&outcome.ranks);
            exclusion = outcome.exclusion.report_json();
            reduced_nodes = outcome.reduced.node_count();
            runs.push(outcome.ranks);
        }
        series.push(outcome.series);
    }
    let mut w = create(&f.engine.out, "exclude_flow.csv")?;
    write_flow_csv(&mut w, &series)?;
    w.flush()?;
    write_json(&f.engine.out, "exclusion.json", &exclusion)?;
    write_json(
        &f.engine.out,
        "summary.json",
        &json!({
            "command": "exclude-flow",
            "target_class": f.target_class,
            "nodes": ds.node_count(),
            "reduced_nodes": reduced_nodes,
            "runs": runs,
            "crossover": crossover_report(&series, f.crossover.as_ref()),
        }),
    )?;
    Ok(())
}

fn patent(a: &PatentArgs) -> patentflow::Result<()> {
    let ds = load(&a.input)?;
    let node = ds
        .node(&a.patent)
        .ok_or_else(|| Error::UnknownPatent(a.patent.clone()))?;
    let result = pagerank(ds.graph(), &a.engine.params(a.damping))?;
    warn_unconverged(&result);
    let doc = patent_inflow_breakdown(&ds, &result, node)?.to_json(&ds, &result);
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    write_json(&a.engine.out, "patent.json", &doc)?;
    Ok(())
}

fn generate(a: &GenArgs) -> patentflow::Result<()> {
    let text = fs::read_to_string(&a.spec)?;
    let spec: SyntheticSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidSpec(format!("{}: {e}", a.spec.display())))?;
    let ds = generate_synthetic_dataset(&spec, a.seed)?;
    print_build_report(&ds);
    let mut w = create(&a.out, "citations.tsv")?;
    ds.write_citations(&mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "patents.tsv")?;
    ds.write_metadata(&mut w)?;
    w.flush()?;
    Ok(())
}
