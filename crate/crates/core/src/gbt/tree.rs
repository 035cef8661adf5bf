//! Regression trees grown leaf-wise (best-first) from gradient histograms.

use serde::{Deserialize, Serialize};

use super::binning::{BinMapper, BinnedMatrix};
use super::histogram::{BinStats, Histogram};

/// Relative slack below which a split gain counts as zero.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    /// Rows with `bin(x[feature]) <= bin`, equivalently `x[feature] <= threshold`, go left.
    Split {
        feature: usize,
        bin: u8,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { leaf: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn single_leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { leaf: value }],
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Index of the leaf reached by a row, given a bin lookup per feature.
    pub fn leaf_index(&self, bin: impl Fn(usize) -> u8) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    bin: b,
                    left,
                    right,
                    ..
                } => i = if bin(feature) <= b { left } else { right },
            }
        }
    }

    pub fn predict_bins(&self, bin: impl Fn(usize) -> u8) -> f64 {
        match self.nodes[self.leaf_index(bin)] {
            Node::Leaf { leaf } => leaf,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Routes on the stored numeric thresholds instead of bins.
    pub fn predict_raw(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { leaf } => return leaf,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Structural checks for trees read from disk: children point forward and
    /// in range, each node has at most one parent, splits agree with the mapper.
    pub(crate) fn check(&self, mapper: &BinMapper) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        let mut parents = vec![0u8; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            match *n {
                Node::Leaf { leaf } if !leaf.is_finite() => return Err(format!("node {i}: non-finite leaf")),
                Node::Leaf { .. } => {}
                Node::Split {
                    feature,
                    bin,
                    threshold,
                    left,
                    right,
                } => {
                    if feature >= mapper.n_features() {
                        return Err(format!("node {i}: feature {feature} out of range"));
                    }
                    let th = mapper.thresholds(feature);
                    if bin as usize >= th.len() || th[bin as usize].to_bits() != threshold.to_bits() {
                        return Err(format!("node {i}: bin {bin} does not match the bin mapper"));
                    }
                    for c in [left, right] {
                        if c <= i || c >= self.nodes.len() {
                            return Err(format!("node {i}: child {c} out of order"));
                        }
                        parents[c] += 1;
                    }
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err("nodes do not form a single tree".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_leaf_nodes: usize,
    pub min_samples_leaf: usize,
    pub l2_regularization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitInfo {
    pub feature: usize,
    pub bin: u8,
    pub gain: f64,
    pub left: BinStats,
    pub right: BinStats,
}

/// How child histograms are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistogramMode {
    /// Build every histogram from its rows.
    Direct,
    /// Build the smaller child, derive the larger as parent minus sibling.
    #[default]
    Subtraction,
    /// Subtraction, checked against direct construction (panics on a
    /// deviation above 1e-12).
    Verified,
}

pub fn leaf_value(stats: BinStats, l2: f64) -> f64 {
    // + 0.0 turns -0.0 into 0.0
    -stats.g / (stats.h + l2) + 0.0
}

fn score(g: f64, h: f64, l2: f64) -> f64 {
    g * g / (h + l2)
}

/// Best split over all features and bins, maximizing
/// `0.5 * (G_L²/(H_L+λ) + G_R²/(H_R+λ) - G_P²/(H_P+λ))` with both sides
/// holding at least `min_samples_leaf` rows. Ties go to the lowest feature,
/// then the lowest bin. Returns `None` unless the best gain is positive.
pub fn find_best_split(hist: &Histogram, parent: BinStats, params: &TreeParams) -> Option<SplitInfo> {
    let l2 = params.l2_regularization;
    let msl = params.min_samples_leaf as u64;
    if parent.count < 2 * msl {
        return None;
    }
    let parent_score = score(parent.g, parent.h, l2);
    let mut best: Option<SplitInfo> = None;
    for (feature, bins) in hist.features.iter().enumerate() {
        let mut left = BinStats::default();
        for (bin, &stats) in bins.iter().enumerate().take(bins.len().saturating_sub(1)) {
            left += stats;
            if left.count < msl {
                continue;
            }
            let right = parent - left;
            if right.count < msl {
                break;
            }
            let (sl, sr) = (score(left.g, left.h, l2), score(right.g, right.h, l2));
            let gain = 0.5 * (sl + sr - parent_score);
            if gain <= GAIN_EPS * (sl + sr + parent_score) {
                continue;
            }
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitInfo {
                    feature,
                    bin: bin as u8,
                    gain,
                    left,
                    right,
                });
            }
        }
    }
    best
}

struct Frontier {
    node: usize,
    rows: Vec<u32>,
    hist: Histogram,
    split: Option<SplitInfo>,
}

/// A grown tree plus the training rows that landed in each leaf.
pub struct GrownTree {
    pub tree: Tree,
    pub leaves: Vec<(usize, Vec<u32>)>,
}

/// Leaf-wise growth: repeatedly split the frontier leaf with the largest
/// positive gain (earliest-created on ties) until `max_leaf_nodes` leaves
/// exist or no leaf can be split.
pub fn grow_tree(
    binned: &BinnedMatrix,
    rows: Vec<u32>,
    g: &[f64],
    h: &[f64],
    params: &TreeParams,
    mode: HistogramMode,
) -> GrownTree {
    let l2 = params.l2_regularization;
    let stats = BinStats::of_rows(&rows, g, h);
    let hist = Histogram::build(binned, &rows, g, h);
    let split = find_best_split(&hist, stats, params);
    let mut nodes = vec![Node::Leaf {
        leaf: leaf_value(stats, l2),
    }];
    let mut frontier = vec![Frontier {
        node: 0,
        rows,
        hist,
        split,
    }];
    let mut n_leaves = 1;

    while n_leaves < params.max_leaf_nodes {
        let mut pick: Option<(usize, f64)> = None;
        for (i, f) in frontier.iter().enumerate() {
            if let Some(s) = f.split {
                if pick.is_none_or(|(_, g)| s.gain > g) {
                    pick = Some((i, s.gain));
                }
            }
        }
        let Some((i, _)) = pick else { break };
        let parent = frontier.remove(i);
        let split = parent.split.expect("picked a splittable leaf");
        let col = binned.column(split.feature);
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            parent.rows.iter().partition(|&&r| col[r as usize] <= split.bin);

        let left_stats = BinStats::of_rows(&left_rows, g, h);
        let right_stats = BinStats::of_rows(&right_rows, g, h);
        let (left_hist, right_hist) = child_histograms(binned, &parent.hist, &left_rows, &right_rows, g, h, mode);

        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf {
            leaf: leaf_value(left_stats, l2),
        });
        nodes.push(Node::Leaf {
            leaf: leaf_value(right_stats, l2),
        });
        nodes[parent.node] = Node::Split {
            feature: split.feature,
            bin: split.bin,
            threshold: f64::NAN, // filled in by the caller, who owns the mapper
            left,
            right,
        };
        for (node, rows, stats, hist) in [
            (left, left_rows, left_stats, left_hist),
            (right, right_rows, right_stats, right_hist),
        ] {
            let split = find_best_split(&hist, stats, params);
            frontier.push(Frontier {
                node,
                rows,
                hist,
                split,
            });
        }
        n_leaves += 1;
    }

    GrownTree {
        tree: Tree { nodes },
        leaves: frontier.into_iter().map(|f| (f.node, f.rows)).collect(),
    }
}

fn child_histograms(
    binned: &BinnedMatrix,
    parent: &Histogram,
    left: &[u32],
    right: &[u32],
    g: &[f64],
    h: &[f64],
    mode: HistogramMode,
) -> (Histogram, Histogram) {
    if mode == HistogramMode::Direct {
        return (Histogram::build(binned, left, g, h), Histogram::build(binned, right, g, h));
    }
    let left_smaller = left.len() <= right.len();
    let (small_rows, large_rows) = if left_smaller { (left, right) } else { (right, left) };
    let small = Histogram::build(binned, small_rows, g, h);
    let large = parent.subtract(&small);
    if mode == HistogramMode::Verified {
        let direct = Histogram::build(binned, large_rows, g, h);
        let dev = large.max_deviation(&direct);
        assert!(dev <= 1e-12, "histogram subtraction deviates from direct build by {dev:e}");
    }
    if left_smaller {
        (small, large)
    } else {
        (large, small)
    }
}

/// Writes numeric thresholds into split nodes.
pub(crate) fn attach_thresholds(tree: &mut Tree, mapper: &BinMapper) {
    for n in &mut tree.nodes {
        if let Node::Split {
            feature,
            bin,
            threshold,
            ..
        } = n
        {
            *threshold = mapper.thresholds(*feature)[*bin as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbt::binning::{apply_bins, fit_bins};
    use crate::matrix::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(max_leaf_nodes: usize, min_samples_leaf: usize) -> TreeParams {
        TreeParams {
            max_leaf_nodes,
            min_samples_leaf,
            l2_regularization: 0.0,
        }
    }

    fn grow(x: &Matrix, g: &[f64], p: &TreeParams) -> (Tree, BinMapper) {
        let mapper = fit_bins(x, 255, 0);
        let binned = apply_bins(x, &mapper);
        let h = vec![1.0; g.len()];
        let rows = (0..x.rows() as u32).collect();
        let mut t = grow_tree(&binned, rows, g, &h, p, HistogramMode::Verified).tree;
        attach_thresholds(&mut t, &mapper);
        (t, mapper)
    }

    #[test]
    fn equal_gradients_give_one_leaf() {
        let x = Matrix::from_vec(6, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let (t, _) = grow(&x, &[0.3; 6], &params(31, 1));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.nodes[0], Node::Leaf { leaf: -0.3 });
    }

    #[test]
    fn separable_gradients_split_once() {
        let x = Matrix::from_vec(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let (t, _) = grow(&x, &[-1.0, -1.0, 1.0, 1.0], &params(31, 1));
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(
            t.nodes[0],
            Node::Split {
                feature: 0,
                bin: 1,
                threshold: 2.5,
                left: 1,
                right: 2
            }
        );
        assert_eq!(t.nodes[1], Node::Leaf { leaf: 1.0 });
        assert_eq!(t.nodes[2], Node::Leaf { leaf: -1.0 });
    }

    #[test]
    fn identical_gain_prefers_lowest_feature() {
        let x = Matrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]]);
        let (t, _) = grow(&x, &[-1.0, -1.0, 1.0, 1.0], &params(2, 1));
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn min_samples_leaf_binds() {
        let x = Matrix::from_vec(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let (t, _) = grow(&x, &[-1.0, -1.0, 1.0, 1.0], &params(31, 4));
        assert_eq!(t.nodes.len(), 1);
        let hist = Histogram {
            features: vec![vec![
                BinStats { g: -1.0, h: 1.0, count: 1 },
                BinStats { g: 1.0, h: 1.0, count: 1 },
            ]],
        };
        let parent = BinStats { g: 0.0, h: 2.0, count: 2 };
        assert!(find_best_split(&hist, parent, &params(4, 2)).is_none());
        assert!(find_best_split(&hist, parent, &params(4, 1)).is_some());
    }

    #[test]
    fn leaf_count_respects_cap_and_thresholds_route_like_bins() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<[f64; 3]> = (0..200).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let x = Matrix::from_rows(&rows);
        let g: Vec<f64> = (0..200).map(|_| rng.random::<f64>() - 0.5).collect();
        let (t, mapper) = grow(&x, &g, &params(7, 5));
        assert!(t.n_leaves() <= 7);
        t.check(&mapper).unwrap();
        for r in x.iter_rows() {
            let by_bins = t.predict_bins(|f| mapper.bin_of(f, r[f]));
            assert_eq!(by_bins.to_bits(), t.predict_raw(r).to_bits());
        }
    }

    /// Exhaustive search over every (feature, bin) pair, recomputing both
    /// sides from scratch.
    fn brute_force_split(binned: &BinnedMatrix, g: &[f64], msl: usize) -> Option<(usize, u8, f64)> {
        let n = binned.n_rows();
        let total: f64 = g.iter().sum();
        let mut best: Option<(usize, u8, f64)> = None;
        for f in 0..binned.n_features() {
            for b in 0..binned.n_bins(f) {
                let left: Vec<usize> = (0..n).filter(|&r| binned.get(r, f) <= b as u8).collect();
                let nl = left.len();
                if nl < msl || n - nl < msl {
                    continue;
                }
                let gl: f64 = left.iter().map(|&r| g[r]).sum();
                let gr: f64 = (0..n).filter(|&r| binned.get(r, f) > b as u8).map(|r| g[r]).sum();
                let gain = 0.5 * (gl * gl / nl as f64 + gr * gr / (n - nl) as f64 - total * total / n as f64);
                if gain > 1e-9 && best.is_none_or(|(_, _, bg)| gain > bg + 1e-12) {
                    best = Some((f, b as u8, gain));
                }
            }
        }
        best
    }

    #[test]
    fn root_split_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [16usize, 32] {
            for _ in 0..50 {
                let d = rng.random_range(1..=3);
                let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(0..10) as f64).collect();
                let x = Matrix::from_vec(n, d, data);
                let g: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let mapper = fit_bins(&x, 255, 0);
                let binned = apply_bins(&x, &mapper);
                let h = vec![1.0; n];
                let rows: Vec<u32> = (0..n as u32).collect();
                let hist = Histogram::build(&binned, &rows, &g, &h);
                let found = find_best_split(&hist, BinStats::of_rows(&rows, &g, &h), &params(2, 1));
                let expected = brute_force_split(&binned, &g, 1);
                match (found, expected) {
                    (Some(s), Some((f, b, gain))) => {
                        assert_eq!((s.feature, s.bin), (f, b));
                        assert!((s.gain - gain).abs() < 1e-9);
                    }
                    (None, None) => {}
                    other => panic!("mismatch {other:?}"),
                }
            }
        }
    }

    #[test]
    fn subtraction_and_direct_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<[f64; 2]> = (0..300).map(|_| [rng.random(), rng.random_range(0..5) as f64]).collect();
        let x = Matrix::from_rows(&rows);
        let g: Vec<f64> = (0..300).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let h = vec![1.0; 300];
        let mapper = fit_bins(&x, 32, 0);
        let binned = apply_bins(&x, &mapper);
        let p = params(15, 3);
        let all: Vec<u32> = (0..300).collect();
        let a = grow_tree(&binned, all.clone(), &g, &h, &p, HistogramMode::Direct).tree;
        let b = grow_tree(&binned, all, &g, &h, &p, HistogramMode::Verified).tree;
        let structure = |t: &Tree| {
            t.nodes
                .iter()
                .map(|n| match *n {
                    Node::Split { feature, bin, .. } => Some((feature, bin)),
                    Node::Leaf { .. } => None,
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(structure(&a), structure(&b));
    }
}
