//! Write a synthetic song table in the default CSV schema and summarize it.
//!
//!     cargo run --example synth_dataset -- songs.csv [seed]

use std::fs::File;

use engagement::synth::{generate, SynthConfig, COMMENT_COEFS, LIKE_COEFS};
use engagement::tabular::{write_csv, ColumnMap, EMOTION_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "songs.csv".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    let table = generate(&SynthConfig { seed, ..Default::default() })?;
    write_csv(&table, File::create(&path)?, &ColumnMap::default())?;

    let mut views: Vec<u64> = table.records.iter().map(|r| r.views).collect();
    views.sort_unstable();
    let zero_comments = table.records.iter().filter(|r| r.comments == 0).count();
    println!("wrote {} rows to {path}", table.len());
    println!(
        "views: min {} median {} max {}",
        views[0],
        views[views.len() / 2],
        views[views.len() - 1]
    );
    println!("rows with zero comments: {zero_comments}");
    println!("{:<12} {:>8} {:>8}", "emotion", "like", "comment");
    for (i, name) in EMOTION_NAMES.iter().enumerate() {
        println!("{name:<12} {:>8.2} {:>8.2}", LIKE_COEFS[i], COMMENT_COEFS[i]);
    }
    Ok(())
}
