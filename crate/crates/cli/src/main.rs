//! `hashfind`: encode embeddings into binary hash codes, index them, query by
//! Hamming distance and score retrieval quality.
//!
//! Exit status: 0 on success, 1 on runtime or data errors, 2 on usage errors.

mod args;
mod output;

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hashfind_core::embedding::{read_binary, read_csv, write_binary, write_csv};
use hashfind_core::index::{read_index, write_index, INDEX_MAGIC};
use hashfind_core::{
    encode_set, evaluate, generate_synthetic, sweep, Depth, EmbeddingFormat, EmbeddingSet,
    HashIndex, LoadOptions, SynthParams, ThresholdPercentile, DEFAULT_K,
};

use output::write_to;

#[derive(Parser, Debug)]
#[command(
    name = "hashfind",
    version,
    about = "Binary hash retrieval over embedding vectors"
)]
struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "HASHFIND_THREADS", default_value_t = 0)]
    threads: usize,

    /// Accept embedding components outside [0, 1].
    #[arg(long, global = true)]
    no_range_check: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a labelled synthetic embedding set.
    Synth(SynthArgs),
    /// Binarize embeddings into hash codes.
    Encode(EncodeArgs),
    /// Encode embeddings and write an index file.
    Build(BuildArgs),
    /// Rank index entries for every query embedding.
    Query(QueryArgs),
    /// Score queries against a reference set (mean average precision).
    Eval(EvalArgs),
    /// Evaluate over a list of encoding percentiles.
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EmbeddingOut {
    Csv,
    Binary,
}

impl From<EmbeddingOut> for EmbeddingFormat {
    fn from(f: EmbeddingOut) -> Self {
        match f {
            EmbeddingOut::Csv => EmbeddingFormat::Csv,
            EmbeddingOut::Binary => EmbeddingFormat::Binary,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CodesOut {
    /// `id,label,code` rows, bit 0 first.
    Csv,
    /// Fingerprinted index file.
    Index,
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 4, value_parser = args::positive)]
    classes: usize,
    #[arg(long, default_value_t = 50, value_parser = args::positive)]
    per_class: usize,
    #[arg(long, default_value_t = 8, value_parser = args::positive)]
    dim: usize,
    #[arg(long, default_value_t = 6.0, value_parser = args::non_negative)]
    separation: f64,
    #[arg(long, default_value_t = 0.2, value_parser = args::non_negative)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Extra records per class drawn from the same classes and written to
    /// `--queries-out`.
    #[arg(long, requires = "queries_out", value_parser = args::positive)]
    holdout: Option<usize>,
    #[arg(long, requires = "holdout")]
    queries_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: EmbeddingOut,
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct EncodeArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Threshold percentile in [0, 100].
    #[arg(short = 'q', long = "percentile", default_value = "50", value_parser = args::percentile)]
    q: ThresholdPercentile,
    #[arg(long, value_enum, default_value = "csv")]
    format: CodesOut,
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct BuildArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short = 'q', long = "percentile", default_value = "50", value_parser = args::percentile)]
    q: ThresholdPercentile,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    /// Query embeddings, encoded at the index's percentile.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long, default_value_t = DEFAULT_K, value_parser = args::positive)]
    k: usize,
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct EvalArgs {
    /// Reference embeddings or an index file.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Encoding percentile; defaults to 50, or to the index's own value.
    #[arg(short = 'q', long = "percentile", value_parser = args::percentile)]
    q: Option<ThresholdPercentile>,
    /// `full` or a cutoff k.
    #[arg(long, default_value = "full", value_parser = args::depth)]
    depth: Depth,
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
    /// Also write `query_id,label,ap,gtp` rows here.
    #[arg(long)]
    per_query: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Comma list and/or inclusive `start:stop:step` ranges.
    #[arg(long, default_value = "0:100:1", value_parser = args::percentile_list)]
    percentiles: args::PercentileList,
    #[arg(long, default_value = "full", value_parser = args::depth)]
    depth: Depth,
    /// `percentile,map` rows.
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
    /// Also write the full report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

struct Ctx {
    load: LoadOptions,
}

impl Ctx {
    fn embeddings(&self, path: &Path) -> Result<EmbeddingSet> {
        let format =
            EmbeddingFormat::detect(path).with_context(|| format!("opening {}", path.display()))?;
        let file = File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let set = match format {
            EmbeddingFormat::Csv => read_csv(reader, &self.load),
            EmbeddingFormat::Binary => read_binary(reader, &self.load),
        };
        set.with_context(|| format!("reading embeddings from {}", path.display()))
    }
}

fn is_index_file(path: &Path) -> Result<bool> {
    let mut head = [0u8; 4];
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut filled = 0;
    while filled < 4 {
        match file.read(&mut head[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled == 4 && head == INDEX_MAGIC)
}

fn load_index(path: &Path) -> Result<HashIndex> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_index(std::io::BufReader::new(file))
        .with_context(|| format!("reading index {}", path.display()))
}

fn synth(a: SynthArgs) -> Result<()> {
    let params = SynthParams {
        num_classes: a.classes,
        per_class: a.per_class + a.holdout.unwrap_or(0),
        dim: a.dim,
        separation: a.separation,
        noise: a.noise,
        seed: a.seed,
    };
    let data = generate_synthetic(&params)?;
    let (refs, held) = data.split_holdout(a.holdout.unwrap_or(0));
    let save = |set: &EmbeddingSet, path: &Path| {
        write_to(path, |w| {
            match EmbeddingFormat::from(a.format) {
                EmbeddingFormat::Csv => write_csv(set, w)?,
                EmbeddingFormat::Binary => write_binary(set, w)?,
            }
            Ok(())
        })
    };
    save(&refs, &a.out)?;
    if let Some(path) = &a.queries_out {
        save(&held, path)?;
    }
    Ok(())
}

fn encode(ctx: &Ctx, a: EncodeArgs) -> Result<()> {
    let codes = encode_set(&ctx.embeddings(&a.input)?, a.q)?;
    match a.format {
        CodesOut::Csv => write_to(&a.out, |w| Ok(codes.write_csv(w)?)),
        CodesOut::Index => {
            let index = HashIndex::build(codes)?;
            write_to(&a.out, |w| Ok(write_index(&index, w)?))
        }
    }
}

fn build(ctx: &Ctx, a: BuildArgs) -> Result<()> {
    let index = HashIndex::build(encode_set(&ctx.embeddings(&a.input)?, a.q)?)?;
    write_to(&a.out, |w| Ok(write_index(&index, w)?))?;
    eprintln!(
        "indexed {} codes of {} bits at q={} (fingerprint {})",
        index.len(),
        index.code_length(),
        index.percentile(),
        index.fingerprint()
    );
    Ok(())
}

fn query(ctx: &Ctx, a: QueryArgs) -> Result<()> {
    let index = load_index(&a.index)?;
    let queries = ctx.embeddings(&a.input)?;
    if queries.dim() != index.code_length() {
        bail!(
            "dimension mismatch: query embeddings have dimension {} but the index holds {}-bit codes",
            queries.dim(),
            index.code_length()
        );
    }
    let results = index.batch_query(&encode_set(&queries, index.percentile())?, a.k)?;
    write_to(&a.out, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "query_id",
            "rank",
            "reference_id",
            "reference_label",
            "distance",
        ])?;
        for r in &results {
            for (rank, hit) in r.hits.iter().enumerate() {
                out.write_record([
                    r.query_id.as_str(),
                    &(rank + 1).to_string(),
                    &hit.reference_id,
                    &hit.reference_label,
                    &hit.distance.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    })
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<()> {
    let index = if is_index_file(&a.reference)? {
        let index = load_index(&a.reference)?;
        if let Some(q) = a.q.filter(|q| *q != index.percentile()) {
            bail!(
                "index {} was encoded at q={}, but q={q} was requested",
                a.reference.display(),
                index.percentile()
            );
        }
        index
    } else {
        let q = a.q.unwrap_or_default();
        HashIndex::build(encode_set(&ctx.embeddings(&a.reference)?, q)?)?
    };
    let queries = ctx.embeddings(&a.queries)?;
    let report = evaluate(&index, &queries, a.depth)?;
    if !report.excluded.is_empty() {
        eprintln!(
            "warning: {} queries have no reference of their class and were excluded",
            report.excluded.len()
        );
    }
    write_to(&a.out, |w| Ok(report.write_json(w)?))?;
    if let Some(path) = &a.per_query {
        write_to(path, |w| Ok(report.write_per_query_csv(w)?))?;
    }
    eprintln!(
        "mAP {:.6} over {} queries (q={}, depth={})",
        report.map, report.n_queries_scored, report.percentile, report.depth
    );
    Ok(())
}

fn run_sweep(ctx: &Ctx, a: SweepArgs) -> Result<()> {
    let refs = ctx.embeddings(&a.reference)?;
    let queries = ctx.embeddings(&a.queries)?;
    let report = sweep(&refs, &queries, &a.percentiles.0, a.depth)?;
    write_to(&a.out, |w| Ok(report.write_csv(w)?))?;
    if let Some(path) = &a.json {
        write_to(path, |w| Ok(report.write_json(w)?))?;
    }
    let argmax: Vec<String> = report.argmax.iter().map(|q| q.to_string()).collect();
    eprintln!(
        "max mAP {:.6} at q in {{{}}}",
        report.max_map,
        argmax.join(", ")
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let ctx = Ctx {
        load: LoadOptions {
            sigmoid_range: !cli.no_range_check,
            ..LoadOptions::default()
        },
    };
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Encode(a) => encode(&ctx, a),
        Command::Build(a) => build(&ctx, a),
        Command::Query(a) => query(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Sweep(a) => run_sweep(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hashfind: error: {e:#}");
            ExitCode::from(1)
        }
    }
}
