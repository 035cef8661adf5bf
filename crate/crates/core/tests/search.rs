use engagement::features::{DesignMatrices, fit_design, PipelineConfig};
use engagement::gbt::GbtParams;
use engagement::synth::{generate, SynthConfig};
use engagement::tabular::clean;
use engagement::tuning::{cv_score, halving_search, kfold_split, HalvingConfig, LogUniform, ParamSpace};
use engagement::Matrix;

/// Two groups with exact integer counts at 1000 views: comments 10 or 20,
/// likes 100 or 200, set by a single binary feature.
fn step_design(n: usize) -> DesignMatrices {
    let group: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % 5 % 2).collect();
    let x = Matrix::from_vec(n, 1, group.iter().map(|&g| g as f64).collect());
    let mut y = Matrix::zeros(n, 2);
    let mut true_counts = Vec::new();
    for (i, &g) in group.iter().enumerate() {
        let (c, l) = (10 * (g as u64 + 1), 100 * (g as u64 + 1));
        y.set(i, 0, (c as f64 / 1000.0).ln_1p());
        y.set(i, 1, (l as f64 / 1000.0).ln_1p());
        true_counts.push([c, l]);
    }
    DesignMatrices {
        x,
        y,
        views: vec![1000; n],
        true_counts,
        track_ids: vec![None; n],
    }
}

fn synth_design(seed: u64, n_rows: usize) -> DesignMatrices {
    let t = clean(&generate(&SynthConfig { seed, n_rows, ..Default::default() }).unwrap()).unwrap();
    fit_design(&t, &PipelineConfig::default()).unwrap().0
}

fn candidate(learning_rate: f64) -> GbtParams {
    GbtParams {
        learning_rate,
        min_samples_leaf: 2,
        ..Default::default()
    }
}

#[test]
fn perfect_fit_scores_near_zero() {
    let d = step_design(100);
    let folds = kfold_split(100, 5, 0).unwrap();
    let s = cv_score(&candidate(0.3), &d, &folds, 100).unwrap();
    assert!(s <= 0.0 && s > -1e-6, "{s}");
}

#[test]
fn slower_learning_rate_scores_worse_at_tiny_budget() {
    let d = step_design(100);
    let folds = kfold_split(100, 5, 0).unwrap();
    let slow = cv_score(&candidate(0.01), &d, &folds, 1).unwrap();
    let fast = cv_score(&candidate(0.3), &d, &folds, 1).unwrap();
    assert!(slow < fast, "{slow} vs {fast}");
    assert_eq!(slow, cv_score(&candidate(0.01), &d, &folds, 1).unwrap());
}

fn small_config(n_candidates: usize) -> HalvingConfig {
    HalvingConfig {
        n_candidates,
        factor: 3,
        min_resource: 5,
        max_resource: 45,
        cv_folds: 3,
        seed: 42,
    }
}

#[test]
fn identical_candidates_keep_lowest_indices() {
    let space = ParamSpace {
        learning_rate: LogUniform { lo: 0.1, hi: 0.1 },
        max_leaf_nodes: vec![15],
        min_samples_leaf: vec![5],
        l2_regularization: LogUniform { lo: 1.0, hi: 1.0 },
        max_bins: 255,
    };
    let res = halving_search(&synth_design(3, 120), &space, &small_config(9), &GbtParams::default()).unwrap();
    let rung = |r: usize| -> Vec<usize> { res.trial_log.iter().filter(|t| t.rung == r).map(|t| t.candidate).collect() };
    assert_eq!(rung(1), vec![0, 1, 2]);
    assert_eq!(rung(2), vec![0]);
    assert_eq!(res.best_candidate, 0);
    assert_eq!(res.best_params.max_iter, 45);
    assert!(res.best_params.early_stopping);
}

#[test]
fn search_improves_on_median_first_rung_and_is_deterministic() {
    let d = synth_design(42, 200);
    let res = halving_search(&d, &ParamSpace::default(), &small_config(9), &GbtParams::default()).unwrap();
    let mut first: Vec<f64> = res.trial_log.iter().filter(|t| t.rung == 0).map(|t| t.score).collect();
    first.sort_by(f64::total_cmp);
    let median = first[first.len() / 2];
    assert!(res.best_score >= median, "{} vs median {median}", res.best_score);
    let again = halving_search(&d, &ParamSpace::default(), &small_config(9), &GbtParams::default()).unwrap();
    assert_eq!(res, again);
    assert_eq!(res.trial_log_jsonl().lines().count(), 9 + 3 + 1);
}

#[test]
fn failed_candidates_are_logged_not_dropped() {
    let space = ParamSpace {
        max_bins: 1,
        ..Default::default()
    };
    let res = halving_search(&synth_design(1, 60), &space, &small_config(9), &GbtParams::default()).unwrap();
    assert_eq!(res.trial_log.len(), 13);
    assert!(res.trial_log.iter().all(|t| t.score == f64::NEG_INFINITY && t.error.is_some()));
    assert_eq!(res.best_candidate, 0);
    let line: serde_json::Value = serde_json::from_str(res.trial_log_jsonl().lines().next().unwrap()).unwrap();
    assert!(line["score"].is_null());
    assert!(line["error"].as_str().unwrap().contains("max_bins"));
}
