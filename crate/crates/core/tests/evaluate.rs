use chrono::NaiveDate;
use engagement::features::{fit_design, PipelineConfig};
use engagement::gbt::GbtParams;
use engagement::metrics::evaluate;
use engagement::multioutput::fit_multi;
use engagement::tabular::{RawRecord, RawTable, N_EMOTIONS};

fn table(rows: &[(u64, u64, u64)]) -> RawTable {
    let day = NaiveDate::from_ymd_opt(2022, 3, 1).unwrap();
    RawTable {
        records: rows
            .iter()
            .enumerate()
            .map(|(i, &(views, likes, comments))| RawRecord {
                track_id: Some(format!("r{i}")),
                upload_date: day,
                views,
                likes,
                comments,
                emotions: [0.1 * i as f64; N_EMOTIONS],
            })
            .collect(),
        source_row_indices: (1..=rows.len()).collect(),
        dropped: 0,
    }
}

#[test]
fn baseline_only_model_matches_hand_computed_metrics() {
    // Expected values from a 40-digit recomputation: the baseline is the mean
    // log1p ratio, back-transformed with each row's views.
    let t = table(&[(1000, 100, 10), (500, 20, 3), (80, 8, 1), (2000, 50, 30)]);
    let config = PipelineConfig {
        clip_quantile: 1.0,
        ..Default::default()
    };
    let (design, state) = fit_design(&t, &config).unwrap();
    let params = GbtParams {
        learning_rate: 0.0,
        max_iter: 1,
        early_stopping: false,
        min_samples_leaf: 1,
        ..Default::default()
    };
    let model = fit_multi(&design.x, &design.y, &params, &state).unwrap();
    let r = evaluate(&model, &design).unwrap();
    assert!((r.comments.r2 - 0.857_520_467_775_858_5).abs() < 1e-12, "{}", r.comments.r2);
    assert!((r.comments.mae - 2.923_917_784_988_839).abs() < 1e-12);
    assert!((r.likes.r2 - -0.581_509_073_639_377_6).abs() < 1e-12, "{}", r.likes.r2);
    assert!((r.likes.mae - 32.824_090_598_742_9).abs() < 1e-11);
}

#[test]
fn perfect_model_on_its_training_rows() {
    // Distinct feature rows, no clipping: enough leaves reproduce every row.
    let t = table(&[(1000, 100, 10), (500, 20, 3), (80, 8, 1), (2000, 50, 30), (300, 30, 0)]);
    let config = PipelineConfig {
        clip_quantile: 1.0,
        ..Default::default()
    };
    let (design, state) = fit_design(&t, &config).unwrap();
    let params = GbtParams {
        learning_rate: 1.0,
        max_iter: 1,
        max_leaf_nodes: 8,
        min_samples_leaf: 1,
        early_stopping: false,
        ..Default::default()
    };
    let model = fit_multi(&design.x, &design.y, &params, &state).unwrap();
    let r = evaluate(&model, &design).unwrap();
    for m in [r.comments, r.likes] {
        assert!((m.r2 - 1.0).abs() < 1e-12 && m.mae < 1e-9, "{m:?}");
        assert_eq!(m.oom_accuracy, 1.0);
    }
}
