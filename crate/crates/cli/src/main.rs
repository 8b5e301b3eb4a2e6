use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sentnet::components::SubjectSummary;
use sentnet::config::Config;
use sentnet::graph;
use sentnet::ingest;
use sentnet::pipeline::{self, RunOptions};
use sentnet::report;
use sentnet::stats::CorrelationReport;
use sentnet::synth;
use sentnet::{Error, ErrorClass};

#[derive(Parser)]
#[command(
    name = "sentnet",
    version,
    about = "Conversation structure vs. sentiment across query groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixture tree to per-subject tables, scatter data and DOT graphs.
    Analyze(AnalyzeArgs),
    /// Subject tables to per-group correlation reports.
    Correlate(CorrelateArgs),
    /// Correlation reports to the pairwise comparison matrix.
    Compare(CompareArgs),
    /// analyze, correlate and compare in one go.
    Run(RunArgs),
    /// Generate a synthetic fixture tree for every configured subject.
    Synth(SynthArgs),
    /// Export a single iteration's graph or a group's scatter data.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to `output` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict to these groups (repeatable).
    #[arg(long = "group")]
    groups: Vec<String>,
    #[arg(long, value_name = "BOOL")]
    include_isolates: Option<bool>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TableSource {
    /// Directory holding `<group>.csv` subject tables (or a `subjects/` dir).
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Use the bundled published tables.
    #[arg(long)]
    bundled: bool,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    source: TableSource,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "group")]
    groups: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// `correlations.json`, or a directory containing it.
    #[arg(long, required_unless_present = "bundled", conflicts_with = "bundled")]
    correlations: Option<PathBuf>,
    /// Correlate the bundled published tables first.
    #[arg(long)]
    bundled: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "group")]
    groups: Vec<String>,
    /// Sample size used for every group instead of its own n.
    #[arg(long)]
    n_override: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "group")]
    groups: Vec<String>,
    #[arg(long, value_name = "BOOL")]
    include_isolates: Option<bool>,
    #[arg(long)]
    n_override: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    config: PathBuf,
    /// Fixture root; defaults to `fixtures` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum ExportCommand {
    /// Conversation graph of one fixture file.
    Graph {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[arg(long, value_name = "BOOL", default_value_t = true, action = clap::ArgAction::Set)]
        include_isolates: bool,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `(subject, beta, alpha)` points for every table.
    Scatter {
        #[command(flatten)]
        source: TableSource,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "group")]
        groups: Vec<String>,
    },
}

fn load_config(path: &Path, include_isolates: Option<bool>) -> Result<Config, Error> {
    let mut config = Config::load(path)?;
    if let Some(v) = include_isolates {
        config.include_isolates = v;
    }
    Ok(config)
}

fn load_tables(source: &TableSource, groups: &[String]) -> Result<Vec<(String, Vec<SubjectSummary>)>, Error> {
    let tables = match &source.tables {
        Some(dir) => report::read_subject_tables(dir)?,
        None => pipeline::bundled_tables(),
    };
    filter_groups(tables, groups, |(g, _)| g)
}

fn filter_groups<T>(items: Vec<T>, groups: &[String], name: impl Fn(&T) -> &str) -> Result<Vec<T>, Error> {
    if let Some(missing) = groups.iter().find(|g| !items.iter().any(|i| name(i) == g.as_str())) {
        return Err(sentnet::config::ConfigError::Invalid(format!("unknown group {missing:?}")).into());
    }
    Ok(items
        .into_iter()
        .filter(|i| groups.is_empty() || groups.iter().any(|g| g == name(i)))
        .collect())
}

/// Writes to stdout, quietly stopping if the reader has gone away.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_correlations(rows: &[CorrelationReport]) {
    let mut s = String::from("group,n,r,p_two_sided\n");
    for c in rows {
        s += &format!("{},{},{:.4},{:.4}\n", c.group, c.n, c.r, c.p_two_sided);
    }
    emit(&s);
}

fn print_comparisons(rows: &[sentnet::stats::ComparisonReport]) {
    let mut s = String::from("group_a,group_b,z_score,p_value,zou_low,zou_high\n");
    for c in rows {
        s += &format!(
            "{},{},{:.4},{:.4},{:.4},{:.4}\n",
            c.group_a, c.group_b, c.z_score, c.p_two_sided, c.zou_low, c.zou_high
        );
    }
    emit(&s);
}

fn analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let config = load_config(&args.config, args.include_isolates)?;
    let out = args.out.unwrap_or_else(|| config.output.clone());
    let opts = RunOptions {
        groups: args.groups,
        threads: args.threads,
    };
    let analyses = pipeline::stage_analyze(&config, &opts, &out)?;
    let subjects: usize = analyses.iter().map(|g| g.subjects.len()).sum();
    emit(&format!(
        "analyzed {subjects} subjects in {} groups into {}\n",
        analyses.len(),
        out.display()
    ));
    Ok(())
}

fn correlate(args: CorrelateArgs) -> Result<(), Error> {
    let tables = load_tables(&args.source, &args.groups)?;
    let results = pipeline::stage_correlate(tables, &args.out)?;
    let rows: Vec<CorrelationReport> = results.into_iter().map(|r| r.correlation).collect();
    print_correlations(&rows);
    Ok(())
}

fn compare(args: CompareArgs) -> Result<(), Error> {
    let correlations = match &args.correlations {
        Some(path) => report::read_correlations(path)?,
        None => pipeline::bundled_tables()
            .into_iter()
            .map(|(g, rows)| pipeline::correlate_group(&g, &rows))
            .collect::<Result<_, _>>()?,
    };
    let correlations = filter_groups(correlations, &args.groups, |c| &c.group)?;
    let confidence = args.confidence.unwrap_or(0.95);
    let rows = pipeline::stage_compare(&correlations, args.n_override, confidence, &args.out)?;
    print_comparisons(&rows);
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let config = load_config(&args.config, args.include_isolates)?;
    let out = args.out.unwrap_or_else(|| config.output.clone());
    if out.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    let opts = RunOptions {
        groups: args.groups,
        threads: args.threads,
    };
    let (results, graphs) = pipeline::run_pipeline_with_graphs(&config, &opts)?;
    let correlations: Vec<CorrelationReport> = results.iter().map(|r| r.correlation.clone()).collect();
    let confidence = args.confidence.unwrap_or(config.confidence);
    let comparisons = if correlations.len() >= 2 {
        pipeline::compare_groups(&correlations, args.n_override, confidence)?
    } else {
        Vec::new()
    };
    report::render_reports(&out, &results, &comparisons, &graphs)?;
    print_correlations(&correlations);
    if !comparisons.is_empty() {
        print_comparisons(&comparisons);
    }
    Ok(())
}

fn synth_cmd(args: SynthArgs) -> Result<(), Error> {
    let mut config = Config::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let root = args.out.unwrap_or_else(|| config.fixtures.clone());
    if root.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    let lex = config.load_lexicon()?;
    let plans = synth::write_fixture_tree(&config, &root, &lex)?;
    let plan_path = root.join("plan.json");
    let json = serde_json::to_string_pretty(&plans).map_err(|e| Error::Serialize(e.to_string()))?;
    std::fs::write(&plan_path, json + "\n").map_err(|e| Error::io(&plan_path, e))?;
    emit(&format!(
        "wrote {} subjects x {} iterations under {}\n",
        plans.len(),
        config.iterations,
        root.display()
    ));
    Ok(())
}

fn export(cmd: ExportCommand) -> Result<(), Error> {
    match cmd {
        ExportCommand::Graph {
            fixture,
            format,
            include_isolates,
            out,
        } => {
            let statuses = ingest::read_statuses(&fixture)?;
            let g = graph::build_graph(&statuses, &graph::all_kinds(), include_isolates);
            let text = match format {
                GraphFormat::Dot => g.to_dot(),
                GraphFormat::Json => g.to_json() + "\n",
            };
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?,
                None => emit(&text),
            }
        }
        ExportCommand::Scatter { source, out, groups } => {
            if out.as_os_str().is_empty() {
                return Err(Error::EmptyOutDir);
            }
            for (group, rows) in load_tables(&source, &groups)? {
                report::write_scatter(&out, &group, &rows)?;
            }
        }
    }
    Ok(())
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Numeric => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Correlate(a) => correlate(a),
        Command::Compare(a) => compare(a),
        Command::Run(a) => run(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Export(c) => export(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
