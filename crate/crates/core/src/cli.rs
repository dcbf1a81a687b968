//! Command-line pipeline: `train`, `predict`, `rules`, `synth` and `report`.
//!
//! Exit status is 0 on success, 1 on a runtime error and 2 when the
//! configuration or input schema is invalid.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granulation::{granulate_table, GranuleCounts, DEFAULT_GRANULES};
use crate::posterior::predictive_accuracy;
use crate::predictive::{
    emit_report, predict_distribution, query_file_name, write_prediction, Query, ReportSummary,
};
use crate::sampler::{chain_diagnostics, run_chain, Chain, ChainConfig, ChainRecord};
use crate::seed;
use crate::synth::{generate, SynthSpec};
use crate::table::{
    clean_table, load_table, validate_schema, AttributeSpec, CleanReport, ConsistencyPredicate,
    InformationTable, LoadOptions,
};

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

pub const DEFAULT_BINS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Granules {
    Uniform(usize),
    PerAttribute(Vec<usize>),
}

impl Default for Granules {
    fn default() -> Self {
        Granules::Uniform(DEFAULT_GRANULES)
    }
}

/// A training run. Relative paths are resolved against the directory of the
/// config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    pub decision_column: String,
    #[serde(default)]
    pub missing_token: Option<String>,
    #[serde(default)]
    pub id_column: Option<String>,
    pub attributes: Vec<AttributeSpec>,
    #[serde(default)]
    pub predicates: Vec<ConsistencyPredicate>,
    /// Names accepted by [`ConsistencyPredicate::builtin`].
    #[serde(default)]
    pub builtin_predicates: Vec<String>,
    #[serde(default)]
    pub granules: Granules,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.data = base.join(&config.data);
        config.output_dir = base.join(&config.output_dir);
        Ok(config)
    }

    pub fn granule_counts(&self) -> GranuleCounts {
        match &self.granules {
            Granules::Uniform(k) => GranuleCounts::uniform(self.attributes.len(), *k),
            Granules::PerAttribute(ks) => GranuleCounts::per_attribute(ks.clone()),
        }
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            missing_token: self.missing_token.clone(),
            id_column: self.id_column.clone(),
            ..LoadOptions::new(self.decision_column.clone())
        }
    }

    /// Declared predicates followed by the requested built-ins.
    pub fn cleaning_predicates(&self) -> Result<Vec<ConsistencyPredicate>> {
        let mut all = self.predicates.clone();
        for name in &self.builtin_predicates {
            let p = ConsistencyPredicate::builtin(name)
                .ok_or_else(|| Error::Config(format!("unknown built-in predicate `{name}`")))?;
            all.push(p);
        }
        Ok(all)
    }

    pub fn validate(&self) -> Result<()> {
        validate_schema(&self.attributes)?;
        InformationTable::new(self.attributes.clone(), self.decision_column.clone())?;
        for p in self.cleaning_predicates()? {
            p.check(&self.attributes)?;
        }
        self.granule_counts().validate(&self.attributes)?;
        self.chain.validate()?;
        if self.bins < 1 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        Ok(())
    }
}

/// Flag values that take precedence over the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub retain: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Granules per attribute, applied to every attribute.
    #[arg(long)]
    pub k: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.chain.seed = seed;
        }
        if let Some(retain) = self.retain {
            config.chain.retain = retain;
        }
        if let Some(burn_in) = self.burn_in {
            config.chain.burn_in = burn_in;
        }
        if let Some(lambda) = self.lambda {
            config.chain.posterior.lambda = lambda;
        }
        if let Some(k) = self.k {
            config.granules = Granules::Uniform(k);
        }
    }
}

/// A chain together with the cleaning it was trained under, so that query
/// files can be cleaned the same way.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainArtifact {
    pub chain: Chain,
    pub cleaning: Vec<ConsistencyPredicate>,
    pub missing_token: Option<String>,
    pub clean_report: CleanReport,
}

#[derive(Serialize)]
struct ArtifactOut<'a> {
    cleaning: &'a [ConsistencyPredicate],
    missing_token: &'a Option<String>,
    clean_report: &'a CleanReport,
    chain: &'a Chain,
}

#[derive(Deserialize)]
struct ArtifactIn {
    #[serde(default)]
    cleaning: Vec<ConsistencyPredicate>,
    #[serde(default)]
    missing_token: Option<String>,
    #[serde(default)]
    clean_report: CleanReport,
    chain: ChainRecord,
}

impl ChainArtifact {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ArtifactOut {
            cleaning: &self.cleaning,
            missing_token: &self.missing_token,
            clean_report: &self.clean_report,
            chain: &self.chain,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: ArtifactIn = serde_json::from_str(text)?;
        Ok(ChainArtifact {
            chain: record.chain.into_chain()?,
            cleaning: record.cleaning,
            missing_token: record.missing_token,
            clean_report: record.clean_report,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub struct TrainedRun {
    pub clean_report: CleanReport,
    pub cleaning: Vec<ConsistencyPredicate>,
    pub chains: Vec<Chain>,
}

/// Seed of replica `index` out of `n_chains`; a single chain uses `seed` itself.
pub fn replica_seed(seed: u64, index: usize, n_chains: usize) -> u64 {
    if n_chains == 1 {
        seed
    } else {
        seed::derive(seed, ((index as u64) << 8) | seed::stream::REPLICA)
    }
}

/// Load, clean and sample `n_chains` independent chains concurrently.
pub fn train(config: &RunConfig, n_chains: usize) -> Result<TrainedRun> {
    config.validate()?;
    if n_chains < 1 {
        return Err(Error::Config("at least one chain is required".into()));
    }
    let file = File::open(&config.data).map_err(|e| Error::io(&config.data, e))?;
    let raw = load_table(
        BufReader::new(file),
        &config.attributes,
        &config.load_options(),
    )?;
    let cleaning = config.cleaning_predicates()?;
    let (table, clean_report) = clean_table(&raw, &cleaning)?;
    if table.is_empty() {
        return Err(Error::Domain(format!(
            "no rows left after cleaning ({} missing, {} inconsistent)",
            clean_report.removed_missing, clean_report.removed_inconsistent
        )));
    }
    let counts = config.granule_counts();
    let chains = thread::scope(|scope| {
        let handles: Vec<_> = (0..n_chains)
            .map(|i| {
                let mut chain_config = config.chain.clone();
                chain_config.seed = replica_seed(config.chain.seed, i, n_chains);
                let (table, counts) = (&table, &counts);
                scope.spawn(move || run_chain(table, counts, &chain_config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TrainedRun {
        clean_report,
        cleaning,
        chains,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes `trace.csv`, `chain.json`, `diagnostics.json`, `hist_rules.csv` and
/// `hist_accuracy.csv` into `dir`.
pub fn write_chain_outputs(artifact: &ChainArtifact, dir: &Path, bins: usize) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    artifact
        .chain
        .write_trace(create(&dir.join("trace.csv"))?)?;
    let json_path = dir.join("chain.json");
    fs::write(&json_path, artifact.to_json()?).map_err(|e| Error::io(&json_path, e))?;
    let diagnostics = chain_diagnostics(&artifact.chain, bins)?;
    write_json(&diagnostics, &dir.join("diagnostics.json"))?;
    diagnostics
        .rule_count_histogram
        .write_csv(create(&dir.join("hist_rules.csv"))?)?;
    diagnostics
        .accuracy_histogram
        .write_csv(create(&dir.join("hist_accuracy.csv"))?)?;
    Ok(())
}

/// Writes into a staging directory inside `out` and moves the results into
/// place only if `write` succeeds.
fn staged(out: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let existed = out.exists();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    let result = write(&staging).and_then(|()| {
        let entries = fs::read_dir(&staging).map_err(|e| Error::io(&staging, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&staging, e))?;
            let target = out.join(entry.file_name());
            if target.is_dir() {
                fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
            }
            fs::rename(entry.path(), &target).map_err(|e| Error::io(&target, e))?;
        }
        Ok(())
    });
    let _ = fs::remove_dir_all(&staging);
    if result.is_err() && !existed {
        let _ = fs::remove_dir_all(out);
    }
    result
}

/// Trains and writes every output under `config.output_dir`; nothing is left
/// behind on failure.
pub fn cmd_train(config: &RunConfig, n_chains: usize) -> Result<TrainedRun> {
    config.validate()?;
    let run = train(config, n_chains)?;
    staged(&config.output_dir, |dir| {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&run.clean_report, &dir.join("clean_report.json"))?;
        for (i, chain) in run.chains.iter().enumerate() {
            let artifact = ChainArtifact {
                chain: chain.clone(),
                cleaning: run.cleaning.clone(),
                missing_token: config.missing_token.clone(),
                clean_report: run.clean_report.clone(),
            };
            let chain_dir = if n_chains == 1 {
                dir.to_path_buf()
            } else {
                dir.join(format!("chain_{i}"))
            };
            write_chain_outputs(&artifact, &chain_dir, config.bins)?;
        }
        Ok(())
    })?;
    Ok(run)
}

/// A query file read against a chain's schema.
pub struct QueryBatch {
    pub queries: Vec<Query>,
    /// Present when the file carries the decision column.
    pub labeled: Option<InformationTable>,
    pub removed: usize,
}

/// Reads queries for `artifact`. Rows that are incomplete, out of range or
/// flagged by the training predicates are dropped. An empty file yields an
/// empty batch.
pub fn load_queries(artifact: &ChainArtifact, path: &Path) -> Result<QueryBatch> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Ok(QueryBatch {
            queries: Vec::new(),
            labeled: None,
            removed: 0,
        });
    }
    let chain = &artifact.chain;
    let header: Vec<String> = csv::Reader::from_reader(text.as_bytes())
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    for attr in &chain.schema {
        if !header.contains(&attr.name) {
            return Err(Error::Schema(format!(
                "query file {} lacks attribute column `{}` required by the chain",
                path.display(),
                attr.name
            )));
        }
    }
    let has_labels = header.contains(&chain.decision_name);
    let options = LoadOptions {
        missing_token: artifact.missing_token.clone(),
        id_column: header.iter().any(|h| h == "id").then(|| "id".to_string()),
        decision_optional: true,
        ..LoadOptions::new(chain.decision_name.clone())
    };
    let raw = load_table(text.as_bytes(), &chain.schema, &options)?;
    let (table, removed) = if has_labels {
        let (table, report) = clean_table(&raw, &artifact.cleaning)?;
        (table, report.removed_missing + report.removed_inconsistent)
    } else {
        let keep: Vec<usize> = (0..raw.len())
            .filter(|&i| match raw.row_values(i) {
                Some(v) => chain.schema.iter().zip(&v).all(|(a, &x)| a.contains(x)),
                None => false,
            })
            .collect();
        (raw.select(&keep), raw.len() - keep.len())
    };
    let queries = (0..table.len())
        .map(|i| {
            Query::new(
                table.object_ids()[i].clone(),
                table.row_values(i).unwrap_or_default(),
            )
        })
        .collect();
    Ok(QueryBatch {
        queries,
        labeled: has_labels.then_some(table),
        removed,
    })
}

/// Mean over retained models of each model's accuracy on `table`.
pub fn mean_model_accuracy(chain: &Chain, table: &InformationTable) -> Result<f64> {
    let mut total = 0.0;
    for m in &chain.retained {
        let gt = granulate_table(table, &m.granulization)?;
        total += predictive_accuracy(&m.rules, &gt)?;
    }
    Ok(total / chain.retained.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionSummary {
    pub queries: usize,
    pub removed: usize,
    pub chain_mean_accuracy: f64,
    /// Mean per-model accuracy on the query rows, when they carry labels.
    pub mean_model_accuracy: Option<f64>,
}

/// Distinct file names for the batch, suffixing repeated ids with their position.
fn prediction_files(queries: &[Query]) -> Vec<String> {
    let mut used = HashSet::new();
    queries
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut name = query_file_name(&q.id);
            if !used.insert(name.clone()) {
                name = query_file_name(&format!("{}_{}", q.id, i + 1));
                used.insert(name.clone());
            }
            name
        })
        .collect()
}

pub fn cmd_predict(
    chain_path: &Path,
    queries_path: &Path,
    out: &Path,
    bins: usize,
) -> Result<PredictionSummary> {
    if bins < 1 {
        return Err(Error::Config("bins must be at least 1".into()));
    }
    let artifact = ChainArtifact::load(chain_path)?;
    let batch = load_queries(&artifact, queries_path)?;
    if batch.queries.is_empty() {
        warn!("{}: no queries to predict", queries_path.display());
    }
    if batch.removed > 0 {
        warn!(
            "{} query rows dropped as incomplete or inconsistent",
            batch.removed
        );
    }
    let chain = &artifact.chain;
    let files = prediction_files(&batch.queries);
    let summary = PredictionSummary {
        queries: batch.queries.len(),
        removed: batch.removed,
        chain_mean_accuracy: chain.mean_accuracy(),
        mean_model_accuracy: batch
            .labeled
            .as_ref()
            .filter(|t| !t.is_empty())
            .map(|t| mean_model_accuracy(chain, t))
            .transpose()?,
    };
    staged(out, |dir| {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut table = csv::Writer::from_writer(create(&dir.join("predictions.csv"))?);
        table.write_record(["id", "mean", "coverage", "abstentions", "file"])?;
        for (query, file) in batch.queries.iter().zip(&files) {
            let dist = predict_distribution(chain, query, bins)?;
            write_prediction(&dist, &dir.join(file))?;
            table.write_record([
                query.id.clone(),
                dist.mean.to_string(),
                dist.coverage.to_string(),
                dist.abstentions().to_string(),
                file.clone(),
            ])?;
            if dist.no_support() {
                warn!("query {}: no retained model has a matching rule", query.id);
            }
        }
        table.flush().map_err(|e| Error::io(dir, e))?;
        write_json(&summary, &dir.join("predictions_summary.json"))
    })?;
    Ok(summary)
}

/// The MAP model's rules with a one-line header.
pub fn map_rules_text(chain: &Chain) -> Result<String> {
    let index = chain
        .map_index()
        .ok_or_else(|| Error::Domain("chain has no retained models".into()))?;
    let m = &chain.retained[index];
    Ok(format!(
        "MAP model: retained index {index}, log posterior {}, accuracy {}\n{}",
        m.log_posterior,
        m.accuracy,
        m.rules.render(&m.granulization, &chain.decision_name)
    ))
}

/// The MAP rules, also saved to `out` when given.
pub fn cmd_rules(chain_path: &Path, out: Option<&Path>) -> Result<String> {
    let artifact = ChainArtifact::load(chain_path)?;
    let text = map_rules_text(&artifact.chain)?;
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    }
    Ok(text)
}

/// Writes the table to `out` and the ground truth next to it; returns the
/// row count and the ground-truth path.
pub fn cmd_synth(
    spec_path: &Path,
    out: &Path,
    truth: Option<&Path>,
    seed: Option<u64>,
) -> Result<(usize, PathBuf)> {
    let text = fs::read_to_string(spec_path).map_err(|e| Error::io(spec_path, e))?;
    let mut spec: SynthSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", spec_path.display())))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let (table, ground_truth) = generate(&spec)?;
    let truth_path = truth
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.with_extension("truth.json"));
    let mut writer = create(out)?;
    table.write_csv(&mut writer)?;
    writer.flush().map_err(|e| Error::io(out, e))?;
    write_json(&ground_truth, &truth_path)?;
    Ok((table.len(), truth_path))
}

pub fn cmd_report(
    chain_path: &Path,
    queries: Option<&Path>,
    out: &Path,
    bins: usize,
) -> Result<ReportSummary> {
    if bins < 1 {
        return Err(Error::Config("bins must be at least 1".into()));
    }
    let artifact = ChainArtifact::load(chain_path)?;
    let batch = match queries {
        Some(path) => load_queries(&artifact, path)?.queries,
        None => Vec::new(),
    };
    emit_report(&artifact.chain, &batch, out, bins)
}

#[derive(Parser, Debug)]
#[command(
    name = "bayes-rough",
    version,
    about = "Bayesian rough set classifiers sampled by MCMC"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a chain of rough set models from a decision table.
    Train {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Independent chains to run concurrently.
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Posterior predictive plausibility for each row of a query file.
    Predict {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
    /// Print the rules of the highest-posterior retained model.
    Rules {
        #[arg(long)]
        chain: PathBuf,
        /// Save to a file instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic decision table with planted structure.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth JSON; defaults to the output path with `.truth.json`.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// MAP rules, chain histograms and optional query predictions in one directory.
    Report {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Train {
            config,
            out,
            chains,
            overrides,
        } => {
            let mut run = RunConfig::from_path(&config)?;
            overrides.apply(&mut run);
            if let Some(out) = out {
                run.output_dir = out;
            }
            info!("training with {chains} chain(s)");
            let trained = cmd_train(&run, chains)?;
            let report = &trained.clean_report;
            println!(
                "rows: {} read, {} missing, {} inconsistent, {} used",
                report.total_in,
                report.removed_missing,
                report.removed_inconsistent,
                report.remaining
            );
            for (i, chain) in trained.chains.iter().enumerate() {
                println!(
                    "chain {i}: retained {}, mean accuracy {:.5}, mean rule count {:.2}, acceptance rate {:.4}",
                    chain.len(),
                    chain.mean_accuracy(),
                    chain.mean_rule_count(),
                    chain.acceptance_rate()
                );
            }
            println!("outputs written to {}", run.output_dir.display());
        }
        Command::Predict {
            chain,
            queries,
            out,
            bins,
        } => {
            let summary = cmd_predict(&chain, &queries, &out, bins)?;
            println!(
                "{} queries predicted into {}",
                summary.queries,
                out.display()
            );
            if let Some(acc) = summary.mean_model_accuracy {
                println!(
                    "mean model accuracy on labeled queries {acc:.5} (chain mean accuracy {:.5})",
                    summary.chain_mean_accuracy
                );
            }
        }
        Command::Rules { chain, out } => {
            let text = cmd_rules(&chain, out.as_deref())?;
            match out {
                Some(path) => println!("rules written to {}", path.display()),
                None => print!("{text}"),
            }
        }
        Command::Synth {
            spec,
            out,
            truth,
            seed,
        } => {
            let (rows, truth_path) = cmd_synth(&spec, &out, truth.as_deref(), seed)?;
            println!(
                "{rows} rows written to {}, ground truth in {}",
                out.display(),
                truth_path.display()
            );
        }
        Command::Report {
            chain,
            queries,
            out,
            bins,
        } => {
            let summary = cmd_report(&chain, queries.as_deref(), &out, bins)?;
            println!(
                "report for {} retained models written to {} (MAP index {}, {} rules)",
                summary.retained,
                out.display(),
                summary.map_index,
                summary.map_rule_count
            );
        }
    }
    Ok(())
}

pub fn exit_code(error: &Error) -> u8 {
    if error.is_validation() {
        EXIT_INVALID
    } else {
        EXIT_RUNTIME
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(Cli::parse())
}
