//! Generate the default synthetic table, split 80/20, fit both boosters on
//! the training rows and print the test-set metric table.
//!
//!     cargo run --release --example train_and_evaluate -- [seed] [max_iter] [--drop-log-clr]

use engagement::cli::train_test_split;
use engagement::features::{fit_design, transform_design, PipelineConfig};
use engagement::gbt::GbtParams;
use engagement::metrics::evaluate;
use engagement::multioutput::fit_multi;
use engagement::synth::{generate, SynthConfig};
use engagement::tabular::clean;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let drop_log_clr = args.iter().any(|a| a == "--drop-log-clr");
    let mut nums = args.iter().filter_map(|a| a.parse::<u64>().ok());
    let seed = nums.next().unwrap_or(42);
    let max_iter = nums.next().unwrap_or(300) as usize;

    let table = clean(&generate(&SynthConfig { seed, ..Default::default() })?)?;
    let (tr, te) = train_test_split(table.len(), 0.8, seed)?;
    let pipeline = PipelineConfig { drop_log_clr, ..Default::default() }.pinned_to(&table);
    let (train, state) = fit_design(&table.select(&tr), &pipeline)?;
    let test = transform_design(&table.select(&te), &state)?;

    let params = GbtParams { max_iter, seed, ..Default::default() };
    let model = fit_multi(&train.x, &train.y, &params, &state)?;
    println!(
        "{} train / {} test rows, {} features, trees: cr {} lr {}",
        train.len(),
        test.len(),
        model.feature_order.len(),
        model.model_cr.trees.len(),
        model.model_lr.trees.len()
    );
    print!("{}", evaluate(&model, &test)?.to_table());
    Ok(())
}
