//! Batch commands behind the `engage` binary.
//!
//! Every option can come from a plain `key = value` file (`--config`), from
//! a dedicated flag, or from `--set key=value`; later sources win in that
//! order. Each `cmd_*` function returns the text meant for stdout and writes
//! its files atomically.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::features::{self, back_transform, PipelineConfig, ReferenceDate};
use crate::gbt::GbtParams;
use crate::metrics::{self, order_of};
use crate::multioutput::{self, write_atomic, ModelError};
use crate::synth::{self, SynthConfig};
use crate::tabular::{self, ColumnMap, FeatureRecord, RawTable, TabularError};
use crate::tuning::{self, HalvingConfig, ParamSpace};

/// Everything a command may need, after merging all option sources.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub trial_log: Option<PathBuf>,
    pub seed: u64,
    /// Fraction of cleaned rows used for training.
    pub split: f64,
    pub refit: bool,
    pub columns: ColumnMap,
    pub pipeline: PipelineConfig,
    /// `seed` here is replaced by the run seed unless `gbt.seed` is set.
    pub gbt: GbtParams,
    pub gbt_seed: Option<u64>,
    pub space: ParamSpace,
    pub halving: HalvingConfig,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            model: None,
            report: None,
            output: None,
            trial_log: None,
            seed: 42,
            split: 0.8,
            refit: false,
            columns: ColumnMap::default(),
            pipeline: PipelineConfig::default(),
            gbt: GbtParams::default(),
            gbt_seed: None,
            space: ParamSpace::default(),
            halving: HalvingConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn parse_day(key: &str, value: &str) -> Result<NaiveDate> {
    tabular::parse_date(value).ok_or_else(|| Error::Config(format!("{key}: bad date {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_range(key: &str, value: &str) -> Result<tuning::LogUniform> {
    let (lo, hi) = value
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("{key}: expected lo,hi")))?;
    Ok(tuning::LogUniform {
        lo: parse(key, lo.trim())?,
        hi: parse(key, hi.trim())?,
    })
}

fn nonempty_path(key: &str, value: &str) -> Result<Option<PathBuf>> {
    if value.is_empty() {
        return Err(Error::Config(format!("{key}: empty path")));
    }
    Ok(Some(PathBuf::from(value)))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if let Some(field) = key.strip_prefix("column.") {
            return Ok(self.columns.remap(field, value)?);
        }
        match key {
            "input" => self.input = nonempty_path(key, value)?,
            "model" => self.model = nonempty_path(key, value)?,
            "report" => self.report = nonempty_path(key, value)?,
            "output" => self.output = nonempty_path(key, value)?,
            "trial_log" => self.trial_log = nonempty_path(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "split" => self.split = parse(key, value)?,
            "refit" => self.refit = parse_bool(key, value)?,
            "drop_log_clr" => self.pipeline.drop_log_clr = parse_bool(key, value)?,
            "clip_quantile" => self.pipeline.clip_quantile = parse(key, value)?,
            "reference_date" => {
                self.pipeline.reference_date = match value {
                    "latest" => ReferenceDate::LatestInData,
                    d => ReferenceDate::Fixed(parse_day(key, d)?),
                }
            }
            "gbt.learning_rate" => self.gbt.learning_rate = parse(key, value)?,
            "gbt.max_iter" => self.gbt.max_iter = parse(key, value)?,
            "gbt.max_leaf_nodes" => self.gbt.max_leaf_nodes = parse(key, value)?,
            "gbt.min_samples_leaf" => self.gbt.min_samples_leaf = parse(key, value)?,
            "gbt.l2_regularization" => self.gbt.l2_regularization = parse(key, value)?,
            "gbt.max_bins" => self.gbt.max_bins = parse(key, value)?,
            "gbt.early_stopping" => self.gbt.early_stopping = parse_bool(key, value)?,
            "gbt.validation_fraction" => self.gbt.validation_fraction = parse(key, value)?,
            "gbt.n_iter_no_change" => self.gbt.n_iter_no_change = parse(key, value)?,
            "gbt.tol" => self.gbt.tol = parse(key, value)?,
            "gbt.seed" => self.gbt_seed = Some(parse(key, value)?),
            "space.learning_rate" => self.space.learning_rate = parse_range(key, value)?,
            "space.l2_regularization" => self.space.l2_regularization = parse_range(key, value)?,
            "space.max_leaf_nodes" => self.space.max_leaf_nodes = parse_list(key, value)?,
            "space.min_samples_leaf" => self.space.min_samples_leaf = parse_list(key, value)?,
            "space.max_bins" => self.space.max_bins = parse(key, value)?,
            "halving.n_candidates" => self.halving.n_candidates = parse(key, value)?,
            "halving.factor" => self.halving.factor = parse(key, value)?,
            "halving.min_resource" => self.halving.min_resource = parse(key, value)?,
            "halving.max_resource" => self.halving.max_resource = parse(key, value)?,
            "halving.cv_folds" => self.halving.cv_folds = parse(key, value)?,
            "synth.n_rows" => self.synth.n_rows = parse(key, value)?,
            "synth.like_noise_sd" => self.synth.like_noise_sd = parse(key, value)?,
            "synth.comment_noise_sd" => self.synth.comment_noise_sd = parse(key, value)?,
            "synth.start_date" => self.synth.date_range.0 = parse_day(key, value)?,
            "synth.end_date" => self.synth.date_range.1 = parse_day(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::Config(format!("split must be in (0, 1), got {}", self.split)));
        }
        self.pipeline.validate()?;
        Ok(())
    }

    /// Booster parameters with the effective seed.
    pub fn gbt_params(&self) -> GbtParams {
        GbtParams {
            seed: self.gbt_seed.unwrap_or(self.seed),
            ..self.gbt.clone()
        }
    }

    fn require<'a>(&self, path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("--{flag} is required")))
    }
}

/// Sorted train and test positions from a seeded shuffle. The training side
/// gets `round(n * fraction)` rows, clamped so both sides are non-empty.
pub fn train_test_split(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 rows to split, got {n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn load_clean(config: &RunConfig) -> Result<(RawTable, serde_json::Value)> {
    let input = config.require(&config.input, "input")?;
    let raw = tabular::load_csv(input, &config.columns)?;
    let clean = tabular::clean(&raw)?;
    let counts = json!({
        "rows_parsed": raw.len() + raw.dropped,
        "rows_dropped_blank": raw.dropped,
        "rows_dropped_nonpositive": raw.len() - clean.len(),
        "rows_clean": clean.len(),
    });
    Ok((clean, counts))
}

struct Split {
    train: RawTable,
    test: RawTable,
    /// Pipeline configuration with the reference date pinned on all rows.
    pipeline: PipelineConfig,
    meta: serde_json::Value,
}

fn split_clean(config: &RunConfig) -> Result<Split> {
    config.validate()?;
    let (clean, counts) = load_clean(config)?;
    let (tr, te) = train_test_split(clean.len(), config.split, config.seed)?;
    let meta = json!({
        "rows": counts,
        "n_train": tr.len(),
        "n_test": te.len(),
        "split_fraction": config.split,
        "seed": config.seed,
        "reference_date_from": "all cleaned rows",
        "fit_on_training_split_only": ["clip thresholds", "bin edges", "trees"],
    });
    Ok(Split {
        train: clean.select(&tr),
        test: clean.select(&te),
        pipeline: config.pipeline.pinned_to(&clean),
        meta,
    })
}

/// Loads and cleans the input, writes the cleaned table, and summarizes the
/// split and the preprocessing state fitted on its training side.
pub fn cmd_prepare(config: &RunConfig) -> Result<String> {
    let split = split_clean(config)?;
    let (_, state) = features::fit_design(&split.train, &split.pipeline)?;
    if let Some(out) = &config.output {
        let mut all = split.train.clone();
        all.records.extend(split.test.records.iter().cloned());
        all.source_row_indices.extend(&split.test.source_row_indices);
        let order = {
            let mut o: Vec<usize> = (0..all.len()).collect();
            o.sort_by_key(|&i| all.source_row_indices[i]);
            o
        };
        let mut buf = Vec::new();
        tabular::write_csv(&all.select(&order), &mut buf, &config.columns)?;
        write_atomic(out, &buf)?;
    }
    let summary = json!({ "metadata": split.meta, "pipeline": state, "feature_order": state.feature_order() });
    if let Some(report) = &config.report {
        write_json(report, &summary)?;
    }
    Ok(format!("{}\n", serde_json::to_string_pretty(&summary)?))
}

/// Fits on the training split, evaluates on the test split, and writes the
/// model and the report.
pub fn cmd_train(config: &RunConfig) -> Result<String> {
    let model_path = config.require(&config.model, "model")?;
    let split = split_clean(config)?;
    let params = config.gbt_params();
    let (train, state) = features::fit_design(&split.train, &split.pipeline)?;
    let test = features::transform_design(&split.test, &state)?;
    let model = multioutput::fit_multi(&train.x, &train.y, &params, &state)?;
    let report = metrics::evaluate(&model, &test)?;
    multioutput::save(&model, model_path)?;
    if let Some(path) = &config.report {
        write_json(
            path,
            &json!({
                "metrics": report,
                "metadata": split.meta,
                "params": params,
                "trees": { "cr": model.model_cr.trees.len(), "lr": model.model_lr.trees.len() },
            }),
        )?;
    }
    Ok(report.to_table())
}

/// Successive-halving search on the training split. With `refit`, also fits
/// the best parameters on the whole training split, saves that model and
/// evaluates it on the test split.
pub fn cmd_tune(config: &RunConfig) -> Result<String> {
    let out = config.require(&config.output, "output")?;
    if config.refit {
        config.require(&config.model, "model")?;
    }
    let split = split_clean(config)?;
    let base = config.gbt_params();
    let (train, state) = features::fit_design(&split.train, &split.pipeline)?;
    let halving = HalvingConfig {
        seed: config.seed,
        ..config.halving.clone()
    };
    let result = tuning::halving_search(&train, &config.space, &halving, &base)?;

    write_json(
        out,
        &json!({
            "best_params": result.best_params,
            "best_candidate": result.best_candidate,
            "best_score": result.best_score,
            "schedule": result.schedule,
            "metadata": split.meta,
        }),
    )?;
    let log_path = config
        .trial_log
        .clone()
        .unwrap_or_else(|| out.with_extension("trials.jsonl"));
    write_atomic(&log_path, result.trial_log_jsonl().as_bytes())?;

    let mut text = format!(
        "best candidate {} (neg-MAE {:.4}) after {} rungs, {} trials\n",
        result.best_candidate,
        result.best_score,
        result.schedule.len(),
        result.trial_log.len()
    );
    if config.refit {
        let test = features::transform_design(&split.test, &state)?;
        let model = multioutput::fit_multi(&train.x, &train.y, &result.best_params, &state)?;
        let report = metrics::evaluate(&model, &test)?;
        multioutput::save(&model, config.require(&config.model, "model")?)?;
        if let Some(path) = &config.report {
            write_json(
                path,
                &json!({ "metrics": report, "metadata": split.meta, "params": result.best_params }),
            )?;
        }
        text.push_str(&report.to_table());
    }
    Ok(text)
}

/// Scores a saved model on a labeled file, rebuilding features with the
/// model's own pipeline state.
pub fn cmd_evaluate(config: &RunConfig) -> Result<String> {
    let model = multioutput::load(config.require(&config.model, "model")?)?;
    let (clean, counts) = load_clean(config)?;
    let design = features::transform_design(&clean, &model.pipeline)?;
    let report = metrics::evaluate(&model, &design)?;
    if let Some(path) = &config.report {
        write_json(path, &json!({ "metrics": report, "metadata": { "rows": counts } }))?;
    }
    Ok(report.to_table())
}

fn schema_error(e: TabularError) -> Error {
    match e {
        TabularError::MissingColumn(c) => {
            ModelError::SchemaError(format!("input lacks column {c:?} required by the model")).into()
        }
        other => other.into(),
    }
}

/// Count predictions for every usable row. Rows with zero views, or zero
/// likes when the model uses `log_clr`, are skipped and reported.
pub fn cmd_predict(config: &RunConfig) -> Result<String> {
    let model = multioutput::load(config.require(&config.model, "model")?)?;
    let out = config.require(&config.output, "output")?;
    let input = config.require(&config.input, "input")?;
    let need_counts = !model.pipeline.config.drop_log_clr;
    let table = tabular::load_feature_csv(input, &config.columns, need_counts).map_err(schema_error)?;
    let (mut rows, mut skipped) = (Vec::<&FeatureRecord>::new(), Vec::new());
    for (r, &row) in table.records.iter().zip(&table.source_row_indices) {
        if r.views < 1 || (need_counts && r.likes.unwrap_or(0) < 1) {
            skipped.push(row);
        } else {
            rows.push(r);
        }
    }
    let records: Vec<FeatureRecord> = rows.into_iter().cloned().collect();
    let x = features::transform_features(&records, &model.pipeline)?;
    let pred = model.predict(&x)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["track_id", "predicted_comments", "predicted_likes", "order_comments", "order_likes"])?;
    for (i, r) in records.iter().enumerate() {
        let c = back_transform(pred.get(i, 0), pred.get(i, 1), r.views);
        w.write_record([
            r.track_id.clone().unwrap_or_default(),
            c.comments.to_string(),
            c.likes.to_string(),
            order_of(c.comments)?.to_string(),
            order_of(c.likes)?.to_string(),
        ])?;
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(out, &buf)?;

    let mut text = format!("wrote {} predictions to {}\n", records.len(), out.display());
    if !skipped.is_empty() {
        text.push_str(&format!(
            "skipped {} rows with zero views or likes (data rows {:?})\n",
            skipped.len(),
            skipped
        ));
    }
    if table.dropped > 0 {
        text.push_str(&format!("dropped {} rows with blank cells\n", table.dropped));
    }
    Ok(text)
}

/// Writes a synthetic table in the configured column schema.
pub fn cmd_synth(config: &RunConfig) -> Result<String> {
    let out = config.require(&config.output, "output")?;
    let synth = SynthConfig {
        seed: config.seed,
        ..config.synth.clone()
    };
    let table = synth::generate(&synth).map_err(|e| Error::Config(e.to_string()))?;
    let mut buf = Vec::new();
    tabular::write_csv(&table, &mut buf, &config.columns)?;
    write_atomic(out, &buf)?;
    Ok(format!("wrote {} rows to {}\n", table.len(), out.display()))
}

#[derive(Debug, Parser)]
#[command(name = "engage", version, about = "Engagement prediction from emotional and temporal song features")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean the input and summarize the split and fitted preprocessing.
    Prepare(CommonArgs),
    /// Fit on the training split and evaluate on the test split.
    Train(CommonArgs),
    /// Successive-halving search over booster parameters.
    Tune(CommonArgs),
    /// Score a saved model on a labeled file.
    Evaluate(CommonArgs),
    /// Write count predictions for an input file.
    Predict(CommonArgs),
    /// Write a synthetic dataset.
    Synth(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Cleaned CSV, best-params JSON, predictions CSV or synthetic CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub trial_log: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training fraction of the cleaned rows.
    #[arg(long)]
    pub split: Option<f64>,
    /// File of `key = value` lines, applied before any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub drop_log_clr: bool,
    /// After tuning, fit and save a model with the best parameters.
    #[arg(long)]
    pub refit: bool,
    /// Number of synthetic rows.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Any config key, e.g. `--set gbt.max_iter=300`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("input", path(&self.input)),
            ("model", path(&self.model)),
            ("report", path(&self.report)),
            ("output", path(&self.output)),
            ("trial_log", path(&self.trial_log)),
            ("seed", self.seed.map(|v| v.to_string())),
            ("split", self.split.map(|v| v.to_string())),
            ("drop_log_clr", self.drop_log_clr.then(|| "true".to_string())),
            ("refit", self.refit.then(|| "true".to_string())),
            ("synth.n_rows", self.rows.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            c.set(k.trim(), v)?;
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn dispatch(command: &Command) -> Result<String> {
    let (args, f): (&CommonArgs, fn(&RunConfig) -> Result<String>) = match command {
        Command::Prepare(a) => (a, cmd_prepare),
        Command::Train(a) => (a, cmd_train),
        Command::Tune(a) => (a, cmd_tune),
        Command::Evaluate(a) => (a, cmd_evaluate),
        Command::Predict(a) => (a, cmd_predict),
        Command::Synth(a) => (a, cmd_synth),
    };
    f(&args.resolve()?)
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 on success, 1 on a pipeline or data error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\ninput = data.csv\nseed=7\n\ngbt.max_iter = 300\ncolumn.Views = Plays\nreference_date = 2024-01-31\n",
        )
        .unwrap();
        assert_eq!(c.input, Some(PathBuf::from("data.csv")));
        assert_eq!(c.seed, 7);
        assert_eq!(c.gbt.max_iter, 300);
        assert_eq!(c.columns.views, "Plays");
        assert_eq!(
            c.pipeline.reference_date,
            ReferenceDate::Fixed(NaiveDate::from_ymd_opt(2024, 1, 31).unwrap())
        );
        assert_eq!(c.gbt_params().seed, 7);
        c.set("gbt.seed", "3").unwrap();
        assert_eq!(c.gbt_params().seed, 3);
        c.set("space.max_leaf_nodes", "8, 16").unwrap();
        assert_eq!(c.space.max_leaf_nodes, vec![8, 16]);
    }

    #[test]
    fn config_errors() {
        let mut c = RunConfig::default();
        assert!(matches!(c.set("nope", "1"), Err(Error::Config(_))));
        assert!(matches!(c.set("seed", "x"), Err(Error::Config(_))));
        assert!(matches!(c.set("input", ""), Err(Error::Config(_))));
        assert!(c.apply_text("no equals sign").is_err());
        assert!(c.set("column.Bogus", "x").is_err());
        c.split = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "seed = 1\nsplit = 0.7\n").unwrap();
        let cli = Cli::try_parse_from([
            "engage",
            "train",
            "--config",
            p.to_str().unwrap(),
            "--seed",
            "9",
            "--set",
            "split=0.6",
            "--drop-log-clr",
        ])
        .unwrap();
        let Command::Train(a) = cli.command else { panic!() };
        let c = a.resolve().unwrap();
        assert_eq!((c.seed, c.split, c.pipeline.drop_log_clr), (9, 0.6, true));
    }

    #[test]
    fn split_is_seeded_sorted_and_disjoint() {
        let (tr, te) = train_test_split(10, 0.8, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        assert!(tr.windows(2).all(|w| w[0] < w[1]));
        let mut all = [tr.clone(), te.clone()].concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(train_test_split(10, 0.8, 1).unwrap(), (tr, te));
        assert_eq!(train_test_split(3, 0.99, 0).unwrap().1.len(), 1);
        assert!(train_test_split(1, 0.5, 0).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["engage", "bogus"]), 2);
        assert_eq!(run(["engage", "train", "--seed", "x"]), 2);
    }

    #[test]
    fn missing_required_path_is_a_pipeline_error() {
        assert_eq!(run(["engage", "train"]), 1);
    }
}
