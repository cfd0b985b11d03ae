//! The `qdmr-dg` command line. Kept in the library so that tests can drive
//! it in-process; the binary only forwards its arguments to [`run`].

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::align::align;
use crate::config::{ConfigError, ConfigFile, Settings, WeightsSection, LEXICON_ENV};
use crate::convert::qdmr_to_lf;
use crate::graph::{augment_question, greedy_decode, ilp_decode, validate_dg, DecodeContext, DecodeStatus};
use crate::io::{
    read_examples, read_jsonl_file, write_jsonl_file, AlignmentRecord, CorpusExample, DgRecord, IoError,
    LfRecord, RoundTripRecord, TensorRecord,
};
use crate::model::{LogicalForm, Qdmr, Question};
use crate::normalize::lf_em;
use crate::pipeline::{dg_to_lf, qdmr_to_dg, roundtrip_with, PipelineError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qdmr-dg", version, about = "QDMR decompositions, logical forms and dependency graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Lexicon file, or a directory holding lexicon.json.
    #[arg(long, global = true, env = LEXICON_ENV)]
    pub lexicon: Option<PathBuf>,
    /// Worker threads for per-example work; output order never changes.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Accepted for compatibility; every computation is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report per-example failures as JSON lines on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert decompositions to logical forms.
    Qdmr2lf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Print a failure count per error kind.
        #[arg(long)]
        report_failures: bool,
    },
    /// Score predicted logical forms against gold ones.
    Lfem {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Print one verdict per gold example.
        #[arg(long)]
        per_example: bool,
    },
    /// Align question tokens to decomposition tokens.
    Align {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// TOML file with any of min, unique, seq, exact, reference.
        #[arg(long)]
        weights_config: Option<PathBuf>,
    },
    /// Convert decompositions to dependency graphs.
    Qdmr2dg {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        k_dum: Option<usize>,
        #[arg(long)]
        k_dup: Option<usize>,
    },
    /// Decode dependency graphs into logical forms.
    Dg2lf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Dg2lfMode::Soft)]
        mode: Dg2lfMode,
    },
    /// Turn arc probabilities into dependency graphs.
    Decode {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = DecodeMethod::Ilp)]
        method: DecodeMethod,
        #[arg(long)]
        time_limit_ms: Option<u64>,
    },
    /// Decomposition to graph and back, checked against the direct conversion.
    Roundtrip {
        #[arg(long)]
        input: PathBuf,
        /// Print failures per pipeline stage.
        #[arg(long)]
        stats: bool,
        /// Write one record per example.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        k_dum: Option<usize>,
        #[arg(long)]
        k_dup: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dg2lfMode {
    /// Decode whatever structure is there.
    Soft,
    /// Refuse graphs that break a validity rule.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecodeMethod {
    Greedy,
    Ilp,
}

/// An error that stops the whole run.
#[derive(Debug, thiserror::Error)]
pub enum Fatal {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// One example that could not be processed.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub id: String,
    pub stage: String,
    pub error: String,
}

impl Failure {
    fn new(id: &str, stage: &str, error: impl ToString) -> Self {
        Self {
            id: id.to_string(),
            stage: stage.to_string(),
            error: error.to_string(),
        }
    }

    fn from_pipeline(id: &str, e: &PipelineError) -> Self {
        Self::new(id, e.stage(), e)
    }
}

struct Context {
    settings: Settings,
    json_errors: bool,
    pool: rayon::ThreadPool,
}

impl Context {
    /// Maps `f` over `items` on the pool; results keep input order.
    fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    fn report(&self, failures: &[Failure]) {
        let stderr = std::io::stderr();
        let mut err = stderr.lock();
        for f in failures {
            if self.json_errors {
                let _ = writeln!(err, "{}", serde_json::to_string(f).expect("failure serializes"));
            } else {
                let _ = writeln!(err, "{}: {} failed: {}", f.id, f.stage, f.error);
            }
        }
    }

    fn finish(&self, failures: &[Failure]) -> i32 {
        self.report(failures);
        if failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_PARTIAL
        }
    }
}

/// Parses arguments and runs one subcommand, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
        }
    };
    let json_errors = cli.global.json_errors;
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            if json_errors {
                let f = Failure::new("", "fatal", &e);
                eprintln!("{}", serde_json::to_string(&f).expect("failure serializes"));
            } else {
                eprintln!("error: {e}");
            }
            EXIT_FATAL
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32, Fatal> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let settings = Settings::resolve(&file, cli.global.lexicon.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs.max(1))
        .build()
        .map_err(|e| Fatal::Threads(e.to_string()))?;
    let mut ctx = Context {
        settings,
        json_errors: cli.global.json_errors,
        pool,
    };
    match cli.command {
        Command::Qdmr2lf {
            input,
            output,
            report_failures,
        } => qdmr2lf(&ctx, &input, &output, report_failures),
        Command::Lfem { pred, gold, per_example } => lfem(&ctx, &pred, &gold, per_example),
        Command::Align {
            input,
            output,
            weights_config,
        } => {
            if let Some(p) = weights_config {
                let text = std::fs::read_to_string(&p).map_err(|source| IoError::File {
                    path: p.display().to_string(),
                    source,
                })?;
                let w: WeightsSection = toml::from_str(&text).map_err(|e| ConfigError::Syntax {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                w.apply(&mut ctx.settings.pipeline.align.weights);
            }
            align_cmd(&ctx, &input, &output)
        }
        Command::Qdmr2dg {
            input,
            output,
            k_dum,
            k_dup,
        } => {
            override_k(&mut ctx.settings, k_dum, k_dup);
            qdmr2dg(&ctx, &input, &output)
        }
        Command::Dg2lf { input, output, mode } => dg2lf(&ctx, &input, &output, mode),
        Command::Decode {
            probs,
            output,
            method,
            time_limit_ms,
        } => {
            if let Some(ms) = time_limit_ms {
                ctx.settings.decode.time_limit_ms = ms;
            }
            decode(&ctx, &probs, &output, method)
        }
        Command::Roundtrip {
            input,
            stats,
            output,
            k_dum,
            k_dup,
        } => {
            override_k(&mut ctx.settings, k_dum, k_dup);
            roundtrip_cmd(&ctx, &input, stats, output.as_deref())
        }
    }
}

fn override_k(settings: &mut Settings, k_dum: Option<usize>, k_dup: Option<usize>) {
    if let Some(k) = k_dum {
        settings.pipeline.k_dum = k;
    }
    if let Some(k) = k_dup {
        settings.pipeline.k_dup = k;
    }
}

fn percent(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

fn parse_qdmr(ex: &CorpusExample) -> Result<Qdmr, Failure> {
    Qdmr::parse(&ex.decomposition).map_err(|e| Failure::new(&ex.id, "qdmr", e))
}

fn split<T>(results: Vec<Result<T, Failure>>) -> (Vec<T>, Vec<Failure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(f) => failed.push(f),
        }
    }
    (ok, failed)
}

fn failure_kind(f: &Failure) -> String {
    let kind = f.error.split([':', '(']).next().unwrap_or("").trim();
    format!("{}: {}", f.stage, kind)
}

fn qdmr2lf(ctx: &Context, input: &Path, output: &Path, report: bool) -> Result<i32, Fatal> {
    let examples = read_examples(input)?;
    let lex = &ctx.settings.lexicon;
    let results = ctx.map(&examples, |ex| {
        let qdmr = parse_qdmr(ex)?;
        let lf = qdmr_to_lf(&qdmr, lex).map_err(|e| Failure::new(&ex.id, "conversion", e))?;
        Ok(LfRecord::new(&ex.id, &lf))
    });
    let (records, failures) = split(results);
    write_jsonl_file(output, &records)?;
    println!(
        "converted {}/{} ({:.2}%)",
        records.len(),
        examples.len(),
        percent(records.len(), examples.len())
    );
    if report {
        let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
        for f in &failures {
            *kinds.entry(failure_kind(f)).or_default() += 1;
        }
        for (kind, count) in kinds {
            println!("  {count:>6}  {kind}");
        }
    }
    Ok(ctx.finish(&failures))
}

fn lfem(ctx: &Context, pred: &Path, gold: &Path, per_example: bool) -> Result<i32, Fatal> {
    let preds: Vec<LfRecord> = read_jsonl_file(pred)?;
    let golds: Vec<LfRecord> = read_jsonl_file(gold)?;
    let by_id: HashMap<&str, &LfRecord> = preds.iter().map(|r| (r.id.as_str(), r)).collect();
    let lex = &ctx.settings.lexicon;
    let results = ctx.map(&golds, |g| -> Result<bool, Failure> {
        let gold = g.to_lf().map_err(|e| Failure::new(&g.id, "gold", e))?;
        let Some(p) = by_id.get(g.id.as_str()) else {
            return Ok(false);
        };
        // An unreadable prediction simply scores zero.
        Ok(p.to_lf().is_ok_and(|p: LogicalForm| lf_em(&p, &gold, lex)))
    });
    let mut failures = Vec::new();
    let mut hits = 0;
    let mut out = std::io::stdout().lock();
    for (g, r) in golds.iter().zip(results) {
        let verdict = match r {
            Ok(true) => {
                hits += 1;
                "match"
            }
            Ok(false) => "miss",
            Err(f) => {
                failures.push(f);
                "error"
            }
        };
        if per_example {
            let _ = writeln!(out, "{}\t{verdict}", g.id);
        }
    }
    let total = golds.len();
    let score = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    let _ = writeln!(out, "LF-EM {score:.3} ({hits}/{total})");
    Ok(ctx.finish(&failures))
}

fn align_cmd(ctx: &Context, input: &Path, output: &Path) -> Result<i32, Fatal> {
    let examples = read_examples(input)?;
    let s = &ctx.settings;
    let results = ctx.map(&examples, |ex| {
        let qdmr = parse_qdmr(ex)?;
        let question = Question::parse(&ex.question).map_err(|e| Failure::new(&ex.id, "question", e))?;
        let aug = augment_question(&question, &s.lexicon, s.pipeline.k_dum, s.pipeline.k_dup);
        let tokens = &aug.tokens[..aug.alignable_len()];
        let out = align(tokens, &qdmr, &s.lexicon, &s.pipeline.align).map_err(|e| Failure::new(&ex.id, "alignment", e))?;
        Ok(AlignmentRecord::new(&ex.id, tokens, &out))
    });
    let (records, failures) = split(results);
    write_jsonl_file(output, &records)?;
    let suboptimal = records.iter().filter(|r| !r.optimal).count();
    println!("aligned {}/{} ({suboptimal} stopped at the time limit)", records.len(), examples.len());
    Ok(ctx.finish(&failures))
}

fn qdmr2dg(ctx: &Context, input: &Path, output: &Path) -> Result<i32, Fatal> {
    let examples = read_examples(input)?;
    let s = &ctx.settings;
    let results = ctx.map(&examples, |ex| {
        let qdmr = parse_qdmr(ex)?;
        let art = qdmr_to_dg(&ex.question, &qdmr, &s.lexicon, &s.pipeline).map_err(|e| Failure::from_pipeline(&ex.id, &e))?;
        Ok(DgRecord::new(&ex.id, &art.aug, &art.dg))
    });
    let (records, failures) = split(results);
    write_jsonl_file(output, &records)?;
    println!(
        "converted {}/{} ({:.2}%)",
        records.len(),
        examples.len(),
        percent(records.len(), examples.len())
    );
    Ok(ctx.finish(&failures))
}

fn dg2lf(ctx: &Context, input: &Path, output: &Path, mode: Dg2lfMode) -> Result<i32, Fatal> {
    let graphs: Vec<DgRecord> = read_jsonl_file(input)?;
    let s = &ctx.settings;
    let results = ctx.map(&graphs, |r| {
        let aug = r.augmented().map_err(|e| Failure::new(&r.id, "input", e))?;
        let dg = r.graph();
        if mode == Dg2lfMode::Strict {
            let dctx = DecodeContext::with_combinations(aug.clone(), &s.lexicon, s.combinations.clone());
            let violations = validate_dg(&dg, &dctx);
            if let Some(first) = violations.first() {
                return Err(Failure::new(
                    &r.id,
                    "validity",
                    format!("{} rule(s) broken, first: {first}", violations.len()),
                ));
            }
        }
        let lf = dg_to_lf(&dg, &aug).map_err(|e| Failure::new(&r.id, "decoding", e))?;
        Ok(LfRecord::new(&r.id, &lf))
    });
    let (records, failures) = split(results);
    write_jsonl_file(output, &records)?;
    println!(
        "decoded {}/{} ({:.2}%)",
        records.len(),
        graphs.len(),
        percent(records.len(), graphs.len())
    );
    Ok(ctx.finish(&failures))
}

fn decode(ctx: &Context, probs: &Path, output: &Path, method: DecodeMethod) -> Result<i32, Fatal> {
    let tensors: Vec<TensorRecord> = read_jsonl_file(probs)?;
    let s = &ctx.settings;
    let results = ctx.map(&tensors, |r| {
        let tensor = r.tensor().map_err(|e| Failure::new(&r.id, "input", e))?;
        let rec = DgRecord {
            id: r.id.clone(),
            n: r.n,
            tokens: r.tokens.clone(),
            edges: Vec::new(),
            status: None,
        };
        let aug = rec.augmented().map_err(|e| Failure::new(&r.id, "input", e))?;
        match method {
            DecodeMethod::Greedy => Ok(DgRecord::new(&r.id, &aug, &greedy_decode(&tensor))),
            DecodeMethod::Ilp => {
                let dctx = DecodeContext::with_combinations(aug.clone(), &s.lexicon, s.combinations.clone());
                let out = ilp_decode(&tensor, &dctx, &s.decode).map_err(|e| Failure::new(&r.id, "decoding", e))?;
                Ok(DgRecord::new(&r.id, &aug, &out.dg).with_status(out.status))
            }
        }
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => {
                // The empty fallback graph is still written so that output
                // lines stay aligned with the input, but it is a failure.
                if rec.status == Some(DecodeStatus::Fallback) {
                    failures.push(Failure::new(&rec.id, "decoding", "no valid graph found within the time limit"));
                }
                records.push(rec);
            }
            Err(f) => failures.push(f),
        }
    }
    write_jsonl_file(output, &records)?;
    let count = |st| records.iter().filter(|r| r.status == Some(st)).count();
    match method {
        DecodeMethod::Greedy => println!("decoded {}/{} greedily", records.len(), tensors.len()),
        DecodeMethod::Ilp => println!(
            "decoded {}/{}: {} optimal, {} timeout, {} fallback",
            records.len(),
            tensors.len(),
            count(DecodeStatus::Optimal),
            count(DecodeStatus::Timeout),
            count(DecodeStatus::Fallback)
        ),
    }
    Ok(ctx.finish(&failures))
}

fn roundtrip_cmd(ctx: &Context, input: &Path, stats: bool, output: Option<&Path>) -> Result<i32, Fatal> {
    let examples = read_examples(input)?;
    let s = &ctx.settings;
    let results: Vec<RoundTripRecord> = ctx.map(&examples, |ex| {
        let mut rec = RoundTripRecord {
            id: ex.id.clone(),
            matches: false,
            lf: Vec::new(),
            decoded: Vec::new(),
            stage: None,
            error: None,
        };
        let qdmr = match parse_qdmr(ex) {
            Ok(q) => q,
            Err(f) => {
                rec.stage = Some(f.stage);
                rec.error = Some(f.error);
                return rec;
            }
        };
        match roundtrip_with(&ex.question, &qdmr, &s.lexicon, &s.pipeline, &s.combinations) {
            Ok(rt) => {
                rec.matches = rt.matches;
                rec.lf = rt.artifacts.lf.render();
                rec.decoded = rt.decoded.render();
                if !rt.matches {
                    rec.stage = Some("match".into());
                    rec.error = Some("decoded form differs from the converted one".into());
                }
            }
            Err(e) => {
                rec.stage = Some(e.stage().into());
                rec.error = Some(e.to_string());
            }
        }
        rec
    });
    if let Some(p) = output {
        write_jsonl_file(p, &results)?;
    }
    let hits = results.iter().filter(|r| r.matches).count();
    println!(
        "round trip {hits}/{} ({:.2}%)",
        results.len(),
        percent(hits, results.len())
    );
    if stats {
        let mut stages: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &results {
            if let Some(st) = &r.stage {
                *stages.entry(st.as_str()).or_default() += 1;
            }
        }
        for (stage, count) in stages {
            println!("  {count:>6}  {stage} ({:.2}%)", percent(count, results.len()));
        }
    }
    let failures: Vec<Failure> = results
        .iter()
        .filter(|r| !r.matches)
        .map(|r| {
            Failure::new(
                &r.id,
                r.stage.as_deref().unwrap_or("match"),
                r.error.as_deref().unwrap_or(""),
            )
        })
        .collect();
    Ok(ctx.finish(&failures))
}
