//! Feature discretization into at most 255 bins per feature.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

/// Rows used to place bin edges; larger inputs are subsampled.
pub const BIN_SUBSAMPLE: usize = 50_000;

/// Per-feature ascending thresholds. Value `v` falls in bin `i` iff
/// `thresholds[i - 1] < v <= thresholds[i]`; values above the last
/// threshold fall in the last bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinMapper {
    thresholds: Vec<Vec<f64>>,
}

impl BinMapper {
    pub fn from_thresholds(thresholds: Vec<Vec<f64>>) -> Self {
        Self { thresholds }
    }

    pub fn n_features(&self) -> usize {
        self.thresholds.len()
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.thresholds[feature].len() + 1
    }

    pub fn thresholds(&self, feature: usize) -> &[f64] {
        &self.thresholds[feature]
    }

    pub fn bin_of(&self, feature: usize, value: f64) -> u8 {
        self.thresholds[feature].partition_point(|&t| t < value) as u8
    }

    /// Checks that thresholds are finite, strictly increasing and fit in a `u8` bin index.
    pub(crate) fn check(&self) -> Result<(), String> {
        for (f, th) in self.thresholds.iter().enumerate() {
            if th.len() > 254 {
                return Err(format!("feature {f}: {} thresholds exceed 254", th.len()));
            }
            if th.iter().any(|t| !t.is_finite()) || th.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("feature {f}: thresholds not strictly increasing"));
            }
        }
        Ok(())
    }
}

/// Column-major bin indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMatrix {
    n_rows: usize,
    columns: Vec<Vec<u8>>,
    n_bins: Vec<usize>,
}

impl BinnedMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, feature: usize) -> &[u8] {
        &self.columns[feature]
    }

    pub fn get(&self, row: usize, feature: usize) -> u8 {
        self.columns[feature][row]
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.n_bins[feature]
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) * 0.5;
    // Adjacent floats can round up to `b`, which would merge the two values.
    if m >= b {
        a
    } else {
        m
    }
}

fn feature_thresholds(mut values: Vec<f64>, max_bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut distinct = values.clone();
    distinct.dedup();
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| midpoint(w[0], w[1])).collect();
    }
    // Cut after every n/max_bins sorted rows; cuts inside a run of equal
    // values are skipped, as are cuts that would repeat a threshold.
    let n = values.len();
    let mut out: Vec<f64> = Vec::with_capacity(max_bins - 1);
    for k in 1..max_bins {
        let pos = k * n / max_bins;
        if pos == 0 || pos >= n {
            continue;
        }
        let (a, b) = (values[pos - 1], values[pos]);
        if a == b {
            continue;
        }
        let t = midpoint(a, b);
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

/// Places bin edges per feature. Features with at most `max_bins` distinct
/// values get one bin per distinct value; others are cut at quantiles of a
/// seeded subsample of at most [`BIN_SUBSAMPLE`] rows.
pub fn fit_bins(x: &Matrix, max_bins: usize, seed: u64) -> BinMapper {
    assert!((2..=255).contains(&max_bins), "max_bins must be in [2, 255]");
    let rows: Vec<usize> = if x.rows() > BIN_SUBSAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = index::sample(&mut rng, x.rows(), BIN_SUBSAMPLE).into_vec();
        r.sort_unstable();
        r
    } else {
        (0..x.rows()).collect()
    };
    let thresholds = (0..x.cols())
        .map(|f| feature_thresholds(rows.iter().map(|&r| x.get(r, f)).collect(), max_bins))
        .collect();
    BinMapper { thresholds }
}

/// Maps raw values to bins. Panics if the column count differs from the mapper.
pub fn apply_bins(x: &Matrix, mapper: &BinMapper) -> BinnedMatrix {
    assert_eq!(x.cols(), mapper.n_features(), "column count mismatch");
    let columns = (0..x.cols())
        .map(|f| (0..x.rows()).map(|r| mapper.bin_of(f, x.get(r, f))).collect())
        .collect();
    BinnedMatrix {
        n_rows: x.rows(),
        columns,
        n_bins: (0..x.cols()).map(|f| mapper.n_bins(f)).collect(),
    }
}
