//! Successive-halving random search over booster parameters.
//!
//! Every candidate starts on the smallest budget of boosting iterations; each
//! rung keeps the best `1/factor` of the candidates and multiplies the budget
//! by `factor`. Candidates are scored by k-fold negative MAE on the counts
//! scale, averaged over both targets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{back_transform, DesignMatrices};
use crate::gbt::GbtParams;
use crate::metrics;
use crate::multioutput::{fit_targets, ModelError};

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot make {folds} folds from {rows} rows")]
    TooFewRows { rows: usize, folds: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
}

type Result<T> = std::result::Result<T, TuningError>;

/// Range sampled uniformly in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogUniform {
    pub lo: f64,
    pub hi: f64,
}

impl LogUniform {
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (a + (b - a) * rng.random::<f64>()).exp()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(TuningError::InvalidConfig(format!("{name}: need 0 < lo <= hi")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub learning_rate: LogUniform,
    pub max_leaf_nodes: Vec<usize>,
    pub min_samples_leaf: Vec<usize>,
    pub l2_regularization: LogUniform,
    pub max_bins: usize,
}

impl Default for ParamSpace {
    fn default() -> Self {
        Self {
            learning_rate: LogUniform { lo: 0.01, hi: 0.3 },
            max_leaf_nodes: vec![15, 31, 63, 127],
            min_samples_leaf: vec![5, 10, 20, 50],
            l2_regularization: LogUniform { lo: 1e-4, hi: 10.0 },
            max_bins: 255,
        }
    }
}

impl ParamSpace {
    pub fn validate(&self) -> Result<()> {
        self.learning_rate.validate("learning_rate")?;
        self.l2_regularization.validate("l2_regularization")?;
        if self.max_leaf_nodes.is_empty() || self.min_samples_leaf.is_empty() {
            return Err(TuningError::InvalidConfig("empty choice list".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingConfig {
    pub n_candidates: usize,
    pub factor: usize,
    pub min_resource: usize,
    pub max_resource: usize,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for HalvingConfig {
    fn default() -> Self {
        Self {
            n_candidates: 64,
            factor: 3,
            min_resource: 27,
            max_resource: 729,
            cv_folds: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rung {
    pub n_candidates: usize,
    pub resource: usize,
}

impl HalvingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TuningError::InvalidConfig(m.into()));
        if self.factor < 2 {
            return bad("factor must be >= 2");
        }
        if self.min_resource < 1 || self.min_resource > self.max_resource {
            return bad("need 1 <= min_resource <= max_resource");
        }
        if self.cv_folds < 2 {
            return bad("cv_folds must be >= 2");
        }
        if self.n_candidates < self.factor {
            return bad("n_candidates must be >= factor");
        }
        Ok(())
    }

    /// Rung sizes and budgets: `n_{r+1} = floor(n_r / factor)` and
    /// `resource_{r+1} = min(resource_r * factor, max_resource)`. Rungs stop
    /// when the budget would pass `max_resource` or fewer than `factor`
    /// candidates remain to be halved.
    pub fn schedule(&self) -> Vec<Rung> {
        let mut by_resource = 1;
        let mut r = self.min_resource;
        while r.saturating_mul(self.factor) <= self.max_resource {
            r *= self.factor;
            by_resource += 1;
        }
        let mut by_candidates = 1;
        let mut c = self.n_candidates;
        while c >= self.factor {
            c /= self.factor;
            by_candidates += 1;
        }
        let mut rungs = Vec::new();
        let (mut n, mut resource) = (self.n_candidates, self.min_resource);
        for _ in 0..by_resource.min(by_candidates) {
            rungs.push(Rung { n_candidates: n, resource });
            n /= self.factor;
            resource = (resource * self.factor).min(self.max_resource);
        }
        rungs
    }
}

/// Draws `n` candidates; fields not in the space keep `base` values.
pub fn sample_candidates(space: &ParamSpace, n: usize, seed: u64, base: &GbtParams) -> Vec<GbtParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let learning_rate = space.learning_rate.sample(&mut rng);
            let max_leaf_nodes = space.max_leaf_nodes[rng.random_range(0..space.max_leaf_nodes.len())];
            let min_samples_leaf = space.min_samples_leaf[rng.random_range(0..space.min_samples_leaf.len())];
            let l2_regularization = space.l2_regularization.sample(&mut rng);
            GbtParams {
                learning_rate,
                max_leaf_nodes,
                min_samples_leaf,
                l2_regularization,
                max_bins: space.max_bins,
                ..base.clone()
            }
        })
        .collect()
}

/// Seeded shuffle cut into `k` folds; the first `n % k` folds get one extra
/// row. Indices within a fold are sorted.
pub fn kfold_split(n_rows: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(TuningError::InvalidConfig("need at least 2 folds".into()));
    }
    if k > n_rows {
        return Err(TuningError::TooFewRows { rows: n_rows, folds: k });
    }
    let mut idx: Vec<usize> = (0..n_rows).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n_rows / k, n_rows % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = idx[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

/// Negative mean over folds of the two targets' mean count MAE, training
/// each fold with `max_iter = resource` and early stopping off.
pub fn cv_score(candidate: &GbtParams, design: &DesignMatrices, folds: &[Vec<usize>], resource: usize) -> Result<f64> {
    let params = GbtParams {
        max_iter: resource,
        early_stopping: false,
        ..candidate.clone()
    };
    let mut total = 0.0;
    for fold in folds {
        let mut in_fold = vec![false; design.len()];
        for &i in fold {
            in_fold[i] = true;
        }
        let train: Vec<usize> = (0..design.len()).filter(|&i| !in_fold[i]).collect();
        let tr = design.select(&train);
        let te = design.select(fold);
        let [m_cr, m_lr] = fit_targets(&tr.x, &tr.y, &params)?;
        let p_cr = m_cr.predict(&te.x).map_err(|source| ModelError::Target { target: "log_cr", source })?;
        let p_lr = m_lr.predict(&te.x).map_err(|source| ModelError::Target { target: "log_lr", source })?;
        let (mut pc, mut pl) = (Vec::with_capacity(fold.len()), Vec::with_capacity(fold.len()));
        for ((a, b), &v) in p_cr.iter().zip(&p_lr).zip(&te.views) {
            let c = back_transform(*a, *b, v);
            pc.push(c.comments);
            pl.push(c.likes);
        }
        let tc: Vec<f64> = te.true_counts.iter().map(|t| t[0] as f64).collect();
        let tl: Vec<f64> = te.true_counts.iter().map(|t| t[1] as f64).collect();
        total += 0.5 * (metrics::mae(&pc, &tc)? + metrics::mae(&pl, &tl)?);
    }
    Ok(-total / folds.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub rung: usize,
    pub candidate: usize,
    pub resource: usize,
    /// `-inf` for a failed fit (serialized as `null`).
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Winning candidate with `max_iter` set to the final budget and early
    /// stopping restored from the base parameters.
    pub best_params: GbtParams,
    pub best_candidate: usize,
    pub best_score: f64,
    pub candidates: Vec<GbtParams>,
    pub trial_log: Vec<Trial>,
    pub schedule: Vec<Rung>,
}

impl SearchResult {
    /// One JSON object per evaluated (rung, candidate) pair.
    pub fn trial_log_jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.trial_log {
            let line = serde_json::json!({
                "rung": t.rung,
                "candidate": t.candidate,
                "resource": t.resource,
                "score": if t.score.is_finite() { serde_json::json!(t.score) } else { serde_json::Value::Null },
                "params": &self.candidates[t.candidate],
                "error": t.error,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// Sorts by score descending, then candidate index ascending.
fn rank(scored: &mut [(usize, f64)]) {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

pub fn halving_search(
    design: &DesignMatrices,
    space: &ParamSpace,
    config: &HalvingConfig,
    base: &GbtParams,
) -> Result<SearchResult> {
    space.validate()?;
    config.validate()?;
    let base = GbtParams {
        seed: config.seed,
        ..base.clone()
    };
    let candidates = sample_candidates(space, config.n_candidates, config.seed, &base);
    let folds = kfold_split(design.len(), config.cv_folds, config.seed)?;
    let schedule = config.schedule();

    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    let mut trial_log = Vec::new();
    let mut last: Vec<(usize, f64)> = Vec::new();
    for (r, rung) in schedule.iter().enumerate() {
        debug_assert_eq!(alive.len(), rung.n_candidates);
        let outcomes: Vec<(usize, f64, Option<String>)> = alive
            .par_iter()
            .map(|&c| match cv_score(&candidates[c], design, &folds, rung.resource) {
                Ok(s) if s.is_nan() => (c, f64::NEG_INFINITY, Some("NaN score".into())),
                Ok(s) => (c, s, None),
                Err(e) => (c, f64::NEG_INFINITY, Some(e.to_string())),
            })
            .collect();
        let mut scored = Vec::with_capacity(outcomes.len());
        for (c, score, error) in outcomes {
            trial_log.push(Trial {
                rung: r,
                candidate: c,
                resource: rung.resource,
                score,
                error,
            });
            scored.push((c, score));
        }
        rank(&mut scored);
        if let Some(next) = schedule.get(r + 1) {
            alive = scored[..next.n_candidates].iter().map(|&(c, _)| c).collect();
            alive.sort_unstable();
        }
        last = scored;
    }

    let (best_candidate, best_score) = last[0];
    let final_resource = schedule.last().expect("at least one rung").resource;
    Ok(SearchResult {
        best_params: GbtParams {
            max_iter: final_resource,
            ..candidates[best_candidate].clone()
        },
        best_candidate,
        best_score,
        candidates,
        trial_log,
        schedule,
    })
}
