use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::debug;
use polis::config::{RunConfig, CONFIG_ENV};
use polis::ingest::{write_corpus, CorpusFormat};
use polis::pipeline::{run_all, Export, LabelFilter, Pipeline, PlotKind};

#[derive(Parser, Debug)]
#[command(name = "polis", version, about = "Lexicon, turbulence, network and complexity analysis of dated policy corpora")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// INI-style key = value file; flags override it
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Corpus file(s), JSONL or CSV; repeat or comma-separate
    #[arg(long, global = true, value_delimiter = ',')]
    input: Vec<PathBuf>,
    /// Corpus format (default: from file extension)
    #[arg(long, global = true)]
    format: Option<String>,
    /// Inclusive year range A:B
    #[arg(long, global = true)]
    years: Option<String>,
    /// Single year (same as --years Y:Y)
    #[arg(long, global = true, conflicts_with = "years")]
    year: Option<i32>,
    /// Term lexicon file (default: built-in PII lexicon)
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Negation lexicon file (default: built-in)
    #[arg(long, global = true)]
    negation: Option<PathBuf>,
    /// full | pii
    #[arg(long, global = true)]
    denominator: Option<String>,
    /// single | phrase
    #[arg(long = "match", global = true)]
    match_mode: Option<String>,
    /// Treat negation entries ending in '*' as prefixes
    #[arg(long, global = true)]
    wildcard_negation: bool,
    /// Disparity filter significance level
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Base seed for sampling and model fits (default 42)
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Policies sampled per year for model fits
    #[arg(long, global = true)]
    sample: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv | json | tsv | graphml | svg
    #[arg(long, global = true)]
    export: Option<String>,
    /// Score communities on the unweighted graph
    #[arg(long, global = true)]
    unweighted_q: bool,
    /// Minimum corpus count for words in the complexity model
    #[arg(long, global = true)]
    min_count: Option<String>,
    /// Skip malformed records instead of aborting
    #[arg(long, global = true)]
    skip_bad: bool,
    /// Community detection restarts
    #[arg(long, global = true)]
    runs: Option<String>,
    /// Rising/falling window in years (default 7)
    #[arg(long, global = true)]
    window_years: Option<String>,
    /// Growth factor for a rising term (default 10)
    #[arg(long, global = true)]
    factor: Option<String>,
    /// Year-over-year decline that marks a falling term (default 0.15)
    #[arg(long, global = true)]
    drop: Option<String>,
    /// Minimum span for a stable term (default 20)
    #[arg(long, global = true)]
    span_years: Option<String>,
    /// Relative change allowed for a stable term (default 0.02)
    #[arg(long, global = true)]
    tolerance: Option<String>,
    /// Minimum count for a rising term (default 100)
    #[arg(long, global = true)]
    min_support: Option<String>,
    /// Count an emergent term must reach (default 20)
    #[arg(long, global = true)]
    min_count_emerge: Option<String>,
    /// endpoint | spread
    #[arg(long, global = true)]
    stability: Option<String>,
    /// Record stage timings in the run report
    #[arg(long, global = true)]
    timings: bool,
    /// More logging (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clean the corpus and write per-year token stores
    Ingest,
    /// Per-year corpus summary, full and lexicon-filtered
    Stats,
    /// Relative frequency series for lexicon terms
    Freq {
        /// Terms or group names (health, insights); default all
        #[arg(long, value_delimiter = ',')]
        terms: Vec<String>,
    },
    /// Rising / falling / stable / emergent term labels
    Turbulence {
        /// all | rise | fall | stable | emerge
        #[arg(long, default_value = "all")]
        mode: String,
    },
    /// Co-occurrence network metrics, backbones and graph files
    Cooc,
    /// Topic report and yearly topic prevalence
    Topics,
    /// Per-year MDL, TDL and compression factor
    Complexity,
    /// SVG line charts
    Plot {
        /// freq | complexity | prevalence | degree
        #[arg(long, default_value = "freq")]
        kind: String,
        #[arg(long, value_delimiter = ',')]
        terms: Vec<String>,
        #[arg(long)]
        log_y: bool,
    },
    /// Every stage in order
    All,
    /// Write the synthetic mini corpus
    Synth {
        /// Destination file (.jsonl or .csv)
        #[arg(long)]
        output: PathBuf,
    },
}

/// A bad flag value or missing argument rather than bad data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T: std::str::FromStr<Err = String>>(value: &str) -> anyhow::Result<T> {
    value.parse().map_err(|e: String| Usage(e).into())
}

fn build_config(o: &Opts) -> anyhow::Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => RunConfig::default(),
    };
    let mut set = |key: &str, value: &str| -> anyhow::Result<()> {
        cfg.set(key, value).map_err(|e| Usage(e.to_string()).into())
    };
    let strings = [
        ("format", &o.format),
        ("years", &o.years),
        ("denominator", &o.denominator),
        ("match", &o.match_mode),
        ("alpha", &o.alpha),
        ("seed", &o.seed),
        ("sample", &o.sample),
        ("min-count", &o.min_count),
        ("runs", &o.runs),
        ("window-years", &o.window_years),
        ("factor", &o.factor),
        ("drop", &o.drop),
        ("span-years", &o.span_years),
        ("tolerance", &o.tolerance),
        ("min-support", &o.min_support),
        ("min-count-emerge", &o.min_count_emerge),
        ("stability", &o.stability),
    ];
    for (key, value) in strings {
        if let Some(v) = value {
            set(key, v)?;
        }
    }
    if let Some(y) = o.year {
        set("years", &format!("{y}:{y}"))?;
    }
    for (key, on) in [
        ("wildcard-negation", o.wildcard_negation),
        ("unweighted-q", o.unweighted_q),
        ("skip-bad", o.skip_bad),
        ("timings", o.timings),
    ] {
        if on {
            set(key, "true")?;
        }
    }
    if !o.input.is_empty() {
        cfg.inputs = o.input.clone();
    }
    if let Some(p) = &o.lexicon {
        cfg.lexicon = Some(p.clone());
    }
    if let Some(p) = &o.negation {
        cfg.negation = Some(p.clone());
    }
    if let Some(p) = &o.out {
        cfg.out = p.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = build_config(&cli.opts)?;
    let export: Option<Export> = cli.opts.export.as_deref().map(usage).transpose()?;
    debug!("config: {cfg:?}");
    if let Command::Synth { output } = &cli.command {
        let corpus = polis::synth::mini_corpus(cfg.seed);
        write_corpus(output, &corpus, CorpusFormat::from_path(output))?;
        println!("{}", output.display());
        return Ok(());
    }
    if cfg.inputs.is_empty() {
        return Err(Usage("no input corpus given (--input)".into()).into());
    }
    let out = cfg.out.clone();
    let report = match cli.command {
        Command::All => run_all(cfg)?,
        command => {
            let mut p = Pipeline::load(cfg)?;
            let name = match command {
                Command::Ingest => {
                    p.ingest()?;
                    "ingest"
                }
                Command::Stats => {
                    p.stats(export.unwrap_or_default())?;
                    "stats"
                }
                Command::Freq { terms } => {
                    p.freq(&terms, export.unwrap_or_default())?;
                    "freq"
                }
                Command::Turbulence { mode } => {
                    let filter: LabelFilter = usage(&mode)?;
                    p.turbulence(filter, export.unwrap_or_default())?;
                    "turbulence"
                }
                Command::Cooc => {
                    p.cooc(export.unwrap_or(Export::Tsv))?;
                    "cooc"
                }
                Command::Topics => {
                    p.topics()?;
                    "topics"
                }
                Command::Complexity => {
                    p.complexity(export.unwrap_or_default())?;
                    "complexity"
                }
                Command::Plot { kind, terms, log_y } => {
                    let kind: PlotKind = usage(&kind)?;
                    p.plot(kind, &terms, log_y)?;
                    "plot"
                }
                Command::All | Command::Synth { .. } => unreachable!("handled above"),
            };
            p.finish(name)?
        }
    };
    for o in &report.outputs {
        println!("{}", out.join(o).display());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<polis::Error>() {
        Some(polis::Error::InvalidArgument(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
