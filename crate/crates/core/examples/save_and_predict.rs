//! Train, save to JSON, reload, and predict counts for new rows that carry
//! no likes or comments (the model is trained without `log_clr`).
//!
//!     cargo run --release --example save_and_predict

use engagement::features::{back_transform, fit_design, transform_features, PipelineConfig};
use engagement::gbt::GbtParams;
use engagement::metrics::order_of;
use engagement::multioutput::{fit_multi, load, save};
use engagement::synth::{generate, SynthConfig};
use engagement::tabular::{clean, FeatureRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = clean(&generate(&SynthConfig::default())?)?;
    let config = PipelineConfig {
        drop_log_clr: true,
        ..Default::default()
    };
    let (design, state) = fit_design(&table, &config)?;
    let model = fit_multi(&design.x, &design.y, &GbtParams::default(), &state)?;

    let path = std::env::temp_dir().join("engagement-example-model.json");
    save(&model, &path)?;
    let reloaded = load(&path)?;
    assert_eq!(reloaded, model);
    println!("saved and reloaded {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    let fresh = generate(&SynthConfig { seed: 7, n_rows: 10, ..Default::default() })?;
    let records: Vec<FeatureRecord> = fresh
        .records
        .iter()
        .map(|r| FeatureRecord {
            likes: None,
            comments: None,
            ..FeatureRecord::from(r)
        })
        .collect();
    let x = transform_features(&records, &reloaded.pipeline)?;
    let pred = reloaded.predict(&x)?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "views", "comments", "true", "likes", "true");
    for (i, r) in fresh.records.iter().enumerate() {
        let c = back_transform(pred.get(i, 0), pred.get(i, 1), r.views);
        println!(
            "{:>10} {:>10.0} {:>10} {:>10.0} {:>10}   decades {}/{}",
            r.views,
            c.comments,
            r.comments,
            c.likes,
            r.likes,
            order_of(c.likes)?,
            order_of(r.likes as f64)?
        );
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
