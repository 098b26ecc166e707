use std::fs::File;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use termcoder_core::evaluation::{load_corpus, run_benchmark, EvalReport};
use termcoder_core::{Coder, EncodingResult, EngineConfig};

use termcoder::review::{read_log, replay, ReviewLog};
use termcoder::server::{router, AppState};

/// Codes adverse-reaction narratives against a terminology.
#[derive(Parser, Debug)]
#[command(author, version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode one description
    Encode(EncodeArgs),
    /// Score the engine against a gold corpus
    Bench(BenchArgs),
    /// List the pseudo terms installed by the configuration
    Lexicon(EngineArgs),
    /// Run the HTTP service
    Serve(ServeArgs),
    /// Print the validated terms per case from a review log
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Terminology CSV
    #[arg(long, env = "TERMCODER_DICT")]
    dict: PathBuf,
    /// Engine TOML configuration
    #[arg(long, env = "TERMCODER_CONFIG")]
    config: Option<PathBuf>,
    /// Stop-word list, one word per line
    #[arg(long)]
    stop_words: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Description to encode
    #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
    text: Option<String>,
    /// Read the description from standard input
    #[arg(long)]
    stdin: bool,
    #[arg(long)]
    max_terms: Option<usize>,
    /// Print winners as a JSON array (default)
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Print winners as an aligned table
    #[arg(long)]
    table: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Gold corpus, one JSON case per line
    #[arg(long)]
    corpus: PathBuf,
    /// Directory receiving report.csv and report.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, env = "TERMCODER_HOST", default_value = "127.0.0.1")]
    host: String,
    #[arg(long, env = "TERMCODER_PORT", default_value_t = 8080)]
    port: u16,
    /// Append-only JSON-lines log of review decisions
    #[arg(long, env = "TERMCODER_REVIEW_LOG", default_value = "review_log.jsonl")]
    review_log: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode(args) => encode(args),
        Command::Bench(args) => bench(args),
        Command::Lexicon(args) => lexicon(args),
        Command::Serve(args) => serve(args),
        Command::Replay { log } => {
            let file =
                File::open(&log).with_context(|| format!("cannot open {}", log.display()))?;
            let cases = replay(&read_log(file)?);
            println!("{}", serde_json::to_string_pretty(&cases)?);
            Ok(())
        }
    }
}

fn engine_config(args: &EngineArgs) -> Result<EngineConfig> {
    let mut config = match &args.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    if let Some(path) = &args.stop_words {
        config.stop_words = Some(path.clone());
    }
    Ok(config)
}

fn load_coder(dict: &Path, config: EngineConfig) -> Result<Coder> {
    Coder::load(dict, config).with_context(|| format!("cannot load dictionary {}", dict.display()))
}

fn encode(args: EncodeArgs) -> Result<()> {
    let mut config = engine_config(&args.engine)?;
    if let Some(n) = args.max_terms {
        config.max_terms = n;
    }
    let coder = load_coder(&args.engine.dict, config)?;
    let text = match args.text {
        Some(text) => text,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let result = coder.encode(&text);
    for &(start, end) in &result.negation_spans {
        let cue: String = text.chars().skip(start).take(end - start).collect();
        eprintln!("warning: negation cue {cue:?} at chars {start}..{end}");
    }
    let mut out = io::stdout().lock();
    if args.table {
        write_table(&mut out, &result)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &result.winners)?;
        writeln!(out)?;
    }
    Ok(())
}

fn write_table(out: &mut impl Write, result: &EncodingResult) -> io::Result<()> {
    let header = [
        "llt_id", "llt_text", "pt_id", "pt_text", "c1", "c2", "c3", "c4", "voters", "via",
    ];
    let rows: Vec<Vec<String>> = result
        .winners
        .iter()
        .map(|w| {
            let voters: Vec<String> = w.voters.iter().map(usize::to_string).collect();
            vec![
                w.llt_id.clone(),
                w.llt_text.clone(),
                w.pt_id.clone(),
                w.pt_text.clone(),
                format!("{:.2}", w.weights.c1_coverage),
                w.weights.c2_stem_flag.to_string(),
                format!("{:.2}", w.weights.c3_pair_distance),
                format!("{:.2}", w.weights.c4_density),
                voters.join(","),
                w.via_synonym
                    .as_ref()
                    .map_or(String::new(), |s| s.pseudo_text.clone()),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in &rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let coder = load_coder(&args.engine.dict, engine_config(&args.engine)?)?;
    let corpus = load_corpus(&args.corpus)?;
    if corpus.is_empty() {
        bail!("corpus {} has no cases", args.corpus.display());
    }
    let report = run_benchmark(&corpus, &coder)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    report.write_files(&args.out)?;
    print_summary(&report);
    Ok(())
}

fn print_summary(report: &EvalReport) {
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.1}"));
    println!(
        "{:<6} {:>7} {:>5} {:>5} {:>5} {:>8} {:>8}",
        "class", "reports", "tp", "fp", "fn", "recall", "precision"
    );
    for row in report.classes.iter().chain([&report.overall]) {
        println!(
            "{:<6} {:>7} {:>5} {:>5} {:>5} {:>8} {:>8}",
            row.label,
            row.reports,
            row.tp,
            row.fp,
            row.fn_,
            pct(row.recall_pct),
            pct(row.precision_pct)
        );
    }
    if !report.excluded.is_empty() {
        println!("excluded: {}", report.excluded.join(", "));
    }
    for e in &report.errors {
        eprintln!("warning: case {}: {}", e.case_id, e.message);
    }
}

fn lexicon(args: EngineArgs) -> Result<()> {
    let coder = load_coder(&args.dict, engine_config(&args)?)?;
    let terminology = coder.terminology();
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["pseudo_text", "target_llt_id", "target_llt_text"])?;
    for (_, entry) in terminology.entries() {
        if let Some(target) = entry.pseudo_of {
            let official = terminology.entry(target);
            out.write_record([&entry.llt_text, &official.llt_id, &official.llt_text])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    let config = engine_config(&args.engine)?;
    let review_log = ReviewLog::open(&args.review_log)?;
    let state = Arc::new(AppState::new(review_log));
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("invalid address {}:{}", args.host, args.port))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        // the API answers 503 until the dictionary is in memory
        let loader = tokio::task::spawn_blocking({
            let state = state.clone();
            let dict = args.engine.dict.clone();
            move || -> Result<()> {
                let coder = load_coder(&dict, config)?;
                eprintln!("dictionary ready: {} terms", coder.terminology().len());
                state.set_coder(coder);
                Ok(())
            }
        });
        let server = tokio::spawn(async move { axum::serve(listener, router(state)).await });
        loader.await??;
        server.await?.context("server failed")
    })
}
