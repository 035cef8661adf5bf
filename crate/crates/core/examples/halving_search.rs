//! Successive-halving search on a synthetic table, printing the realized
//! schedule and the top of each rung.
//!
//!     cargo run --release --example halving_search

use engagement::features::{fit_design, PipelineConfig};
use engagement::gbt::GbtParams;
use engagement::synth::{generate, SynthConfig};
use engagement::tabular::clean;
use engagement::tuning::{halving_search, HalvingConfig, ParamSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = clean(&generate(&SynthConfig::default())?)?;
    let (design, _) = fit_design(&table, &PipelineConfig::default())?;
    let config = HalvingConfig {
        n_candidates: 27,
        factor: 3,
        min_resource: 10,
        max_resource: 270,
        cv_folds: 5,
        seed: 42,
    };
    let result = halving_search(&design, &ParamSpace::default(), &config, &GbtParams::default())?;

    for (r, rung) in result.schedule.iter().enumerate() {
        let mut trials: Vec<_> = result.trial_log.iter().filter(|t| t.rung == r).collect();
        trials.sort_by(|a, b| b.score.total_cmp(&a.score));
        let top: Vec<String> = trials.iter().take(3).map(|t| format!("#{} {:.2}", t.candidate, t.score)).collect();
        println!(
            "rung {r}: {:>2} candidates at {:>3} iterations; best {}",
            rung.n_candidates,
            rung.resource,
            top.join(", ")
        );
    }
    let p = &result.best_params;
    println!(
        "best #{}: neg-MAE {:.3}, learning_rate {:.4}, max_leaf_nodes {}, min_samples_leaf {}, l2 {:.4}",
        result.best_candidate, result.best_score, p.learning_rate, p.max_leaf_nodes, p.min_samples_leaf, p.l2_regularization
    );
    Ok(())
}
