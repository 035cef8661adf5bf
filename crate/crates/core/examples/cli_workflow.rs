//! Drive the batch commands from code: synth, train, evaluate, predict.
//!
//!     cargo run --release --example cli_workflow

use engagement::cli::{cmd_evaluate, cmd_predict, cmd_synth, cmd_train, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("engagement-cli-example");
    std::fs::create_dir_all(&dir)?;
    let data = dir.join("songs.csv");
    let model = dir.join("model.json");

    let mut c = RunConfig::default();
    c.set("output", data.to_str().unwrap())?;
    print!("{}", cmd_synth(&c)?);

    let mut c = RunConfig::default();
    c.apply_text(&format!(
        "input = {}\nmodel = {}\nreport = {}\ngbt.max_iter = 300\n",
        data.display(),
        model.display(),
        dir.join("report.json").display()
    ))?;
    println!("train (test split):");
    print!("{}", cmd_train(&c)?);

    println!("evaluate (all rows):");
    print!("{}", cmd_evaluate(&c)?);

    c.set("output", dir.join("predictions.csv").to_str().unwrap())?;
    print!("{}", cmd_predict(&c)?);
    println!("files in {}", dir.display());
    Ok(())
}
