//! The `ncdtree` command line: preprocess MIDI, build distance matrices,
//! search for trees, regenerate the benchmark experiments, and emit
//! ground-truth corpora.
//!
//! Every run writes a `manifest.json` recording the inputs, seeds, and
//! configuration; a single-worker run is reproducible from its manifest
//! alone (the trace's wall-clock column aside). All randomness flows from
//! one `--seed` flag through derived per-component seeds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::compressor::{Compressor, CompressorId};
use crate::distance::{build_matrix, CorpusItem, DistanceMatrix};
use crate::midi::player_piano_stream;
use crate::scoring::{mst_baseline, PenaltyConfig, DEFAULT_PENALTY_WEIGHT};
use crate::search::{parallel_search, CheckpointConfig, SearchConfig, SearchOutcome, StopReason};
use crate::synthgen::{
    default_tag_specs, filetype_of, make_filetype_corpus, make_planted_instance, make_tag_corpus,
    TagLibrary,
};
use crate::tree::TernaryTree;
use crate::util::derive_seed;

#[derive(Parser)]
#[command(
    name = "ncdtree",
    version,
    about = "Compression-based clustering into quartet trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert MIDI files to player-piano streams (.pp)
    Preprocess(PreprocessArgs),
    /// Build a pairwise distance matrix from a corpus directory
    Matrix(MatrixArgs),
    /// Hill-climb a tree for a distance matrix file
    Search(SearchArgs),
    /// Run a named benchmark experiment end to end and check its outcome
    Reproduce(ReproduceArgs),
    /// Generate ground-truth corpora (tags, planted, filetypes)
    Gen(GenArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// MIDI files to convert
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory for the .pp outputs
    #[arg(long, default_value = "pp-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MatrixArgs {
    /// Directory of corpus files (every regular file is one item)
    corpus_dir: Option<PathBuf>,
    /// Output matrix file
    #[arg(long, short, default_value = "matrix.dist")]
    out: PathBuf,
    /// Codec id, e.g. `bzip2`, `gzip:level=6`, `store`,
    /// `external:command=bzip2 -9 -c`
    #[arg(long, default_value = "brotli")]
    compressor: String,
    /// Generate the planted-tree matrix instead of compressing a corpus
    #[arg(long)]
    planted: bool,
    /// Leaf count for --planted
    #[arg(long, default_value_t = 18)]
    n: usize,
    /// Seed for --planted
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    /// Distance matrix file (format: n, labels, lower triangle)
    matrix: PathBuf,
    /// Output directory (best.nwk, best.dot, trace.csv, manifest.json)
    #[arg(long, short, default_value = "search-out")]
    out_dir: PathBuf,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel climbers; 1 is fully deterministic
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Orphan-leaf penalty weight; 0 disables the penalty
    #[arg(long, default_value_t = DEFAULT_PENALTY_WEIGHT)]
    penalty: f64,
    /// Consecutive rejected mutations before stopping (default: sized by n)
    #[arg(long)]
    plateau: Option<u64>,
    /// Hard cap on candidate evaluations
    #[arg(long)]
    max_evals: Option<u64>,
    /// Also emit the minimum-spanning-tree baseline as mst.dot
    #[arg(long)]
    mst: bool,
    /// Label map file (lines of `old<TAB>new` or `old=new`) for pretty names
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Write a checkpoint of the incumbent every N evaluations
    #[arg(long)]
    checkpoint_every: Option<u64>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// One of: planted, tags, filetypes
    experiment: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Where to put the run artifacts
    #[arg(long, default_value = "reproduce-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// One of: tags, planted, filetypes
    what: String,
    #[arg(long, default_value = "gen-out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leaf count for planted instances
    #[arg(long, default_value_t = 18)]
    n: usize,
}

/// Entry point for the binary.
pub fn run() -> Result<()> {
    run_from(std::env::args_os())
}

/// Testable entry point taking explicit arguments.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    match cli.command {
        Command::Preprocess(args) => cmd_preprocess(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Search(args) => cmd_search(args),
        Command::Reproduce(args) => cmd_reproduce(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

#[derive(serde::Serialize)]
struct RunManifest {
    command: String,
    corpus_source: String,
    compressor: Option<String>,
    seed: Option<u64>,
    search: Option<SearchManifest>,
    outputs: Vec<String>,
    started: String,
    finished: String,
    version: String,
}

#[derive(serde::Serialize)]
struct SearchManifest {
    seed: u64,
    workers: usize,
    plateau_limit: Option<u64>,
    max_evals: Option<u64>,
    penalty_weight: f64,
    penalty_enabled: bool,
}

struct ManifestBuilder {
    command: String,
    corpus_source: String,
    compressor: Option<String>,
    seed: Option<u64>,
    search: Option<SearchManifest>,
    outputs: Vec<String>,
    started: chrono::DateTime<chrono::Utc>,
}

impl ManifestBuilder {
    fn new(command: &str, corpus_source: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            corpus_source: corpus_source.to_string(),
            compressor: None,
            seed: None,
            search: None,
            outputs: Vec::new(),
            started: chrono::Utc::now(),
        }
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    fn write(self, path: &Path) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            corpus_source: self.corpus_source,
            compressor: self.compressor,
            seed: self.seed,
            search: self.search,
            outputs: self.outputs,
            started: self.started.to_rfc3339(),
            finished: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        fs::write(path, serde_json::to_string_pretty(&manifest)?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut manifest = ManifestBuilder::new("preprocess", "midi files");
    let mut failures = Vec::new();
    let mut processed = 0usize;
    for input in &args.inputs {
        let result = (|| -> Result<PathBuf> {
            let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
            let stream = player_piano_stream(&bytes)
                .with_context(|| format!("preprocessing {}", input.display()))?;
            let stem = input
                .file_stem()
                .context("input has no file name")?
                .to_string_lossy()
                .to_string();
            let out = args.out_dir.join(format!("{stem}.pp"));
            fs::write(&out, &stream.bytes)
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(out)
        })();
        match result {
            Ok(out) => {
                processed += 1;
                manifest.output(&out);
                println!("{} -> {}", input.display(), out.display());
            }
            Err(e) => {
                eprintln!("FAILED {}: {e:#}", input.display());
                failures.push(input.display().to_string());
            }
        }
    }
    println!(
        "preprocessed {processed} of {} file(s){}",
        args.inputs.len(),
        if failures.is_empty() {
            String::new()
        } else {
            format!("; {} failed: {}", failures.len(), failures.join(", "))
        }
    );
    manifest.write(&args.out_dir.join("manifest.json"))?;
    if processed == 0 {
        bail!("all inputs failed to preprocess");
    }
    Ok(())
}

fn read_corpus_dir(dir: &Path) -> Result<Vec<CorpusItem>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            // Skip this toolkit's own metadata and hidden files; gen and
            // preprocess drop a manifest.json next to their outputs.
            p.is_file()
                && p.file_name()
                    .map(|n| n != "manifest.json" && !n.to_string_lossy().starts_with('.'))
                    .unwrap_or(false)
        })
        .collect();
    entries.sort();
    let mut corpus = Vec::with_capacity(entries.len());
    for path in entries {
        let label = path
            .file_name()
            .context("file has no name")?
            .to_string_lossy()
            .to_string();
        let data = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        corpus.push(CorpusItem::new(label, data));
    }
    Ok(corpus)
}

fn cmd_matrix(args: MatrixArgs) -> Result<()> {
    let (matrix, source, compressor_used): (DistanceMatrix, String, Option<String>) =
        if args.planted {
            let instance = make_planted_instance(args.n, args.seed)?;
            (
                instance.matrix,
                format!("planted n={} seed={}", args.n, args.seed),
                None,
            )
        } else {
            let dir = args
                .corpus_dir
                .as_ref()
                .context("either a corpus directory or --planted is required")?;
            let corpus = read_corpus_dir(dir)?;
            if corpus.len() < 4 {
                bail!(
                    "corpus has {} file(s); at least 4 are needed for tree search",
                    corpus.len()
                );
            }
            let id: CompressorId = args
                .compressor
                .parse()
                .with_context(|| format!("parsing compressor id `{}`", args.compressor))?;
            let compressor = Compressor::from_id(&id)?.with_cache();
            let matrix = build_matrix(&corpus, &compressor)?;
            (matrix, dir.display().to_string(), Some(id.to_string()))
        };
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&args.out, matrix.to_text())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} items -> {}", matrix.len(), args.out.display());
    let mut manifest = ManifestBuilder::new("matrix", &source);
    manifest.compressor = compressor_used;
    manifest.seed = args.planted.then_some(args.seed);
    manifest.output(&args.out);
    manifest.write(&args.out.with_extension("manifest.json"))?;
    Ok(())
}

fn read_label_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (from, to) = line
            .split_once('\t')
            .or_else(|| line.split_once('='))
            .with_context(|| format!("label map line {}: expected `old\\tnew` or `old=new`", i + 1))?;
        map.insert(from.trim().to_string(), to.trim().to_string());
    }
    Ok(map)
}

fn search_config(args: &SearchArgs) -> SearchConfig {
    let mut cfg = SearchConfig::new(args.seed);
    cfg.workers = args.workers;
    cfg.plateau_limit = args.plateau;
    cfg.max_evals = args.max_evals;
    cfg.penalty = if args.penalty > 0.0 {
        PenaltyConfig {
            enabled: true,
            weight: args.penalty,
        }
    } else {
        PenaltyConfig::disabled()
    };
    cfg
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    let body = fs::read_to_string(&args.matrix)
        .with_context(|| format!("reading {}", args.matrix.display()))?;
    let mut matrix = DistanceMatrix::from_text(&body)?;
    if let Some(map_path) = &args.labels {
        let map = read_label_map(map_path)?;
        let renamed: Vec<String> = matrix
            .labels()
            .iter()
            .map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone()))
            .collect();
        let n = matrix.len();
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = matrix.get(i, j);
            }
        }
        matrix = DistanceMatrix::from_rows(renamed, rows)
            .context("label map produced duplicate labels")?;
    }
    fs::create_dir_all(&args.out_dir)?;
    let mut cfg = search_config(&args);
    if let Some(every) = args.checkpoint_every {
        cfg.checkpoint = Some(CheckpointConfig {
            path: args.out_dir.join("checkpoint.txt"),
            every_evals: every,
        });
    }
    let started = Instant::now();
    let outcome = parallel_search(&matrix, &cfg)?;
    report_outcome(&outcome, started);

    let nwk_path = args.out_dir.join("best.nwk");
    let dot_path = args.out_dir.join("best.dot");
    let trace_path = args.out_dir.join("trace.csv");
    fs::write(&nwk_path, format!("{}\n", outcome.tree.to_newick()))?;
    fs::write(&dot_path, outcome.tree.to_dot())?;
    fs::write(&trace_path, outcome.trace.to_csv())?;
    let mut manifest = ManifestBuilder::new("search", &args.matrix.display().to_string());
    manifest.seed = Some(args.seed);
    manifest.search = Some(SearchManifest {
        seed: args.seed,
        workers: args.workers,
        plateau_limit: args.plateau,
        max_evals: args.max_evals,
        penalty_weight: cfg.penalty.weight,
        penalty_enabled: cfg.penalty.enabled,
    });
    manifest.output(&nwk_path);
    manifest.output(&dot_path);
    manifest.output(&trace_path);
    if args.mst {
        let mst = mst_baseline(&matrix);
        let mst_path = args.out_dir.join("mst.dot");
        fs::write(&mst_path, mst.to_dot())?;
        println!("mst weight = {:.6} -> {}", mst.total_weight, mst_path.display());
        manifest.output(&mst_path);
    }
    manifest.write(&args.out_dir.join("manifest.json"))?;
    Ok(())
}

fn report_outcome(outcome: &SearchOutcome, started: Instant) {
    println!("s = {:.6}", outcome.score.s);
    println!("penalty = {:.6}", outcome.score.penalty);
    println!("s_effective = {:.6}", outcome.score.s_effective);
    let stop = match outcome.stop {
        StopReason::Optimal => "optimal",
        StopReason::Plateau => "plateau",
        StopReason::MaxEvals => "max-evals",
        StopReason::Degenerate => "degenerate",
    };
    println!(
        "evaluations = {} stop = {stop} elapsed = {:.2}s",
        outcome.evaluations,
        started.elapsed().as_secs_f64()
    );
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    let mut cfg = SearchConfig::new(derive_seed(args.seed, 1));
    cfg.workers = args.workers;
    let checks = match args.experiment.as_str() {
        "planted" => {
            // Clean consistent data: the orphan-leaf penalty would steer the
            // climb away from the exact source tree, whose s advantage over
            // near-misses is far smaller than one penalty step.
            cfg.penalty = PenaltyConfig::disabled();
            reproduce_planted(&args, cfg)?
        }
        "tags" => reproduce_tags(&args, cfg)?,
        "filetypes" => reproduce_filetypes(&args, cfg)?,
        other => bail!("unknown experiment `{other}` (expected planted, tags, or filetypes)"),
    };
    let mut failed = 0;
    for (name, pass, detail) in &checks {
        println!("{} {name}: {detail}", if *pass { "PASS" } else { "FAIL" });
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        bail!("{failed} check(s) failed");
    }
    Ok(())
}

type Check = (String, bool, String);

fn write_run_outputs(out_dir: &Path, outcome: &SearchOutcome) -> Result<()> {
    fs::write(out_dir.join("best.nwk"), format!("{}\n", outcome.tree.to_newick()))?;
    fs::write(out_dir.join("best.dot"), outcome.tree.to_dot())?;
    fs::write(out_dir.join("trace.csv"), outcome.trace.to_csv())?;
    Ok(())
}

fn reproduce_planted(args: &ReproduceArgs, cfg: SearchConfig) -> Result<Vec<Check>> {
    let instance = make_planted_instance(18, args.seed)?;
    fs::write(args.out_dir.join("planted.dist"), instance.matrix.to_text())?;
    fs::write(
        args.out_dir.join("source.nwk"),
        format!("{}\n", instance.source.to_newick()),
    )?;
    let started = Instant::now();
    let outcome = parallel_search(&instance.matrix, &cfg)?;
    report_outcome(&outcome, started);
    write_run_outputs(&args.out_dir, &outcome)?;
    let elapsed = started.elapsed().as_secs_f64();
    let isomorphic = outcome.tree.is_isomorphic(&instance.source)?;
    Ok(vec![
        (
            "planted s = 1".into(),
            outcome.score.s == 1.0,
            format!("s = {:.6}", outcome.score.s),
        ),
        (
            "planted tree recovered".into(),
            isomorphic,
            format!("isomorphic = {isomorphic}"),
        ),
        (
            "planted under ten minutes".into(),
            elapsed < 600.0,
            format!("{elapsed:.2}s"),
        ),
    ])
}

fn tags_of(label: &str) -> Vec<char> {
    label.chars().collect()
}

fn shared_tags(a: &str, b: &str) -> usize {
    tags_of(a)
        .iter()
        .filter(|c| tags_of(b).contains(c))
        .count()
}

/// Fraction of leaves that (sharing at least `min_shared` tags with some
/// other file) have a tree sibling sharing at least one tag.
fn sibling_tag_fraction(tree: &TernaryTree, min_shared: usize) -> (f64, usize) {
    let labels = tree.labels();
    let eligible: Vec<usize> = (0..labels.len())
        .filter(|&i| {
            (0..labels.len())
                .any(|j| j != i && shared_tags(&labels[i], &labels[j]) >= min_shared)
        })
        .collect();
    let mut good = 0usize;
    for &leaf in &eligible {
        let parent = tree.neighbors(leaf)[0];
        let has_kindred_sibling = tree
            .neighbors(parent)
            .iter()
            .any(|&w| w != leaf && tree.is_leaf(w) && shared_tags(&labels[leaf], &labels[w]) >= 1);
        if has_kindred_sibling {
            good += 1;
        }
    }
    if eligible.is_empty() {
        (1.0, 0)
    } else {
        (good as f64 / eligible.len() as f64, eligible.len())
    }
}

fn reproduce_tags(args: &ReproduceArgs, cfg: SearchConfig) -> Result<Vec<Check>> {
    let library = TagLibrary::new(args.seed);
    let files = make_tag_corpus(&default_tag_specs(), &library, derive_seed(args.seed, 2))?;
    let corpus: Vec<CorpusItem> = files.into_iter().map(|f| f.item).collect();
    let compressor = Compressor::from_id(&CompressorId::default())?.with_cache();
    println!("compressing {} tagged files...", corpus.len());
    let matrix = build_matrix(&corpus, &compressor)?;
    fs::write(args.out_dir.join("tags.dist"), matrix.to_text())?;
    let started = Instant::now();
    let outcome = parallel_search(&matrix, &cfg)?;
    report_outcome(&outcome, started);
    write_run_outputs(&args.out_dir, &outcome)?;
    let (fraction, eligible) = sibling_tag_fraction(&outcome.tree, 2);
    Ok(vec![
        (
            "tags s >= 0.85".into(),
            outcome.score.s >= 0.85,
            format!("s = {:.6}", outcome.score.s),
        ),
        (
            "tag siblings >= 75%".into(),
            fraction >= 0.75,
            format!("{:.0}% of {eligible} eligible leaves", fraction * 100.0),
        ),
    ])
}

/// For every leaf: its nearest other leaf by tree path length, ties broken
/// by matrix distance.
fn nearest_tree_neighbors(tree: &TernaryTree, matrix: &DistanceMatrix) -> Vec<(usize, usize)> {
    let labels = tree.labels();
    let lengths = tree.leaf_path_lengths();
    (0..labels.len())
        .map(|i| {
            let mi = matrix.index_of(&labels[i]).expect("label in matrix");
            let best = (0..labels.len())
                .filter(|&j| j != i)
                .min_by(|&a, &b| {
                    let ma = matrix.index_of(&labels[a]).expect("label");
                    let mb = matrix.index_of(&labels[b]).expect("label");
                    lengths[i][a]
                        .cmp(&lengths[i][b])
                        .then(matrix.get(mi, ma).total_cmp(&matrix.get(mi, mb)))
                })
                .expect("at least two leaves");
            (i, best)
        })
        .collect()
}

fn reproduce_filetypes(args: &ReproduceArgs, cfg: SearchConfig) -> Result<Vec<Check>> {
    let corpus = make_filetype_corpus(args.seed);
    let compressor = Compressor::from_id(&CompressorId::default())?.with_cache();
    println!("compressing {} files of 4 kinds...", corpus.len());
    let matrix = build_matrix(&corpus, &compressor)?;
    fs::write(args.out_dir.join("filetypes.dist"), matrix.to_text())?;
    let started = Instant::now();
    let outcome = parallel_search(&matrix, &cfg)?;
    report_outcome(&outcome, started);
    write_run_outputs(&args.out_dir, &outcome)?;
    let labels = outcome.tree.labels();
    let matches = nearest_tree_neighbors(&outcome.tree, &matrix)
        .into_iter()
        .filter(|&(i, j)| filetype_of(&labels[i]) == filetype_of(&labels[j]))
        .count();
    Ok(vec![
        (
            "filetype neighbors >= 14/16".into(),
            matches >= 14,
            format!("{matches}/16 leaves' nearest neighbor has the same kind, s = {:.6}", outcome.score.s),
        ),
    ])
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    match args.what.as_str() {
        "tags" => {
            let library = TagLibrary::new(args.seed);
            let files = make_tag_corpus(&default_tag_specs(), &library, derive_seed(args.seed, 2))?;
            let mut listing = Vec::new();
            for f in &files {
                let name = format!("{}.bin", f.item.label);
                fs::write(args.out_dir.join(&name), &f.item.data)?;
                listing.push(serde_json::json!({
                    "label": f.item.label,
                    "file": name,
                    "tags": f.tags.iter().collect::<String>(),
                    "placements": f.placements.len(),
                }));
            }
            let manifest = serde_json::json!({
                "kind": "tags",
                "seed": args.seed,
                "tag_bytes": crate::synthgen::TAG_SIZE,
                "file_bytes": crate::synthgen::TAG_FILE_SIZE,
                "pattern": "default: four families of nested tag subsets; pass custom specs through the library API to change it",
                "files": listing,
            });
            fs::write(
                args.out_dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest)?,
            )?;
            println!("wrote {} tagged files to {}", files.len(), args.out_dir.display());
        }
        "planted" => {
            let instance = make_planted_instance(args.n, args.seed)?;
            fs::write(args.out_dir.join("planted.dist"), instance.matrix.to_text())?;
            fs::write(
                args.out_dir.join("source.nwk"),
                format!("{}\n", instance.source.to_newick()),
            )?;
            fs::write(args.out_dir.join("source.dot"), instance.source.to_dot())?;
            let manifest = serde_json::json!({
                "kind": "planted",
                "seed": args.seed,
                "n": args.n,
                "matrix": "planted.dist",
                "source_tree": ["source.nwk", "source.dot"],
                "metric": "d(a,b) = (path_edges(a,b) + 1) / n, 0 on the diagonal",
            });
            fs::write(
                args.out_dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest)?,
            )?;
            println!("wrote planted instance (n = {}) to {}", args.n, args.out_dir.display());
        }
        "filetypes" => {
            let corpus = make_filetype_corpus(args.seed);
            let mut listing = Vec::new();
            for item in &corpus {
                let name = format!("{}.bin", item.label);
                fs::write(args.out_dir.join(&name), &item.data)?;
                listing.push(serde_json::json!({
                    "label": item.label,
                    "file": name,
                    "kind": filetype_of(&item.label),
                }));
            }
            let manifest = serde_json::json!({
                "kind": "filetypes",
                "seed": args.seed,
                "files": listing,
            });
            fs::write(
                args.out_dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest)?,
            )?;
            println!("wrote {} files to {}", corpus.len(), args.out_dir.display());
        }
        other => bail!("unknown generator `{other}` (expected tags, planted, or filetypes)"),
    }
    Ok(())
}
