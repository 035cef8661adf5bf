use std::ops::{AddAssign, Sub};

use rayon::prelude::*;

use super::binning::BinnedMatrix;

/// Rows above which per-feature histograms are built on the rayon pool.
const PARALLEL_ROWS: usize = 4096;

/// Gradient/hessian sums and row count.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BinStats {
    pub g: f64,
    pub h: f64,
    pub count: u64,
}

impl AddAssign for BinStats {
    fn add_assign(&mut self, o: Self) {
        self.g += o.g;
        self.h += o.h;
        self.count += o.count;
    }
}

impl Sub for BinStats {
    type Output = BinStats;
    fn sub(self, o: Self) -> Self {
        BinStats {
            g: self.g - o.g,
            h: self.h - o.h,
            count: self.count - o.count,
        }
    }
}

impl BinStats {
    pub fn of_rows(rows: &[u32], g: &[f64], h: &[f64]) -> Self {
        let mut s = BinStats::default();
        for &r in rows {
            let r = r as usize;
            s.g += g[r];
            s.h += h[r];
            s.count += 1;
        }
        s
    }
}

/// One histogram per feature, over that feature's bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub features: Vec<Vec<BinStats>>,
}

fn feature_histogram(col: &[u8], n_bins: usize, rows: &[u32], g: &[f64], h: &[f64]) -> Vec<BinStats> {
    let mut bins = vec![BinStats::default(); n_bins];
    for &r in rows {
        let r = r as usize;
        let b = &mut bins[col[r] as usize];
        b.g += g[r];
        b.h += h[r];
        b.count += 1;
    }
    bins
}

impl Histogram {
    pub fn build(binned: &BinnedMatrix, rows: &[u32], g: &[f64], h: &[f64]) -> Self {
        let one = |f: usize| feature_histogram(binned.column(f), binned.n_bins(f), rows, g, h);
        let features = if rows.len() >= PARALLEL_ROWS {
            (0..binned.n_features()).into_par_iter().map(one).collect()
        } else {
            (0..binned.n_features()).map(one).collect()
        };
        Self { features }
    }

    /// `self - other`, bin by bin.
    pub fn subtract(&self, other: &Histogram) -> Histogram {
        let features = self
            .features
            .iter()
            .zip(&other.features)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x - y).collect())
            .collect();
        Histogram { features }
    }

    /// Largest disagreement measured relative to `max(1, |g|)`; counts must match exactly.
    pub fn max_deviation(&self, other: &Histogram) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.features.iter().zip(&other.features) {
            for (x, y) in a.iter().zip(b) {
                if x.count != y.count {
                    return f64::INFINITY;
                }
                let scale = 1f64.max(x.g.abs()).max(x.h.abs());
                worst = worst.max((x.g - y.g).abs() / scale).max((x.h - y.h).abs() / scale);
            }
        }
        worst
    }
}
