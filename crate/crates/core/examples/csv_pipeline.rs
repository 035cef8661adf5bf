//! Read a CSV whose headers differ from the default schema, clean it, and
//! build the design matrices.
//!
//!     cargo run --example csv_pipeline

use engagement::features::fit_design;
use engagement::features::PipelineConfig;
use engagement::tabular::{clean, read_csv, ColumnMap};

const DATA: &str = "\
song,released,plays,Likes,Comments Number,Valence,Arousal,Tension,Atmospheric,Happy,Dark,Sad,Angry,Sensual,Sentimental
Blue Hour,2023-04-01,120000,5400,210,0.7,0.4,0.2,0.6,0.8,0.1,0.1,0.0,0.3,0.5
Night Drive,20230815,9800,400,,0.3,0.8,0.7,0.5,0.2,0.7,0.3,0.4,0.6,0.2
Low Tide,2022-11-20,450000,12000,800,0.5,0.5,0.4,0.7,0.5,0.3,0.4,0.1,0.2,0.6
Static,2024-01-09,0,0,0,0.1,0.9,0.9,0.2,0.1,0.9,0.6,0.8,0.1,0.1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut schema = ColumnMap::default();
    schema.remap("Track", "song")?;
    schema.remap("Upload date", "released")?;
    schema.remap("Views", "plays")?;

    let raw = read_csv(DATA.as_bytes(), &schema)?;
    println!("parsed {} rows, {} dropped for blank cells", raw.len(), raw.dropped);
    let table = clean(&raw)?;
    println!("{} rows after removing zero views or likes", table.len());

    let (design, state) = fit_design(&table, &PipelineConfig::default())?;
    println!("reference date {}, clip thresholds {:?}", state.reference_date, state.clip_thresholds);
    let order = state.feature_order();
    for (i, row) in design.x.iter_rows().enumerate() {
        let derived: Vec<String> = order[10..].iter().zip(&row[10..]).map(|(n, v)| format!("{n}={v:.3}")).collect();
        println!(
            "{:<12} {}  y=[{:.5}, {:.5}]",
            design.track_ids[i].as_deref().unwrap_or("?"),
            derived.join(" "),
            design.y.get(i, 0),
            design.y.get(i, 1)
        );
    }
    Ok(())
}
