//! Partition quality: overlap with a ground truth, modularity and the
//! normalized negative log-likelihood of a fitted degree-corrected block model.

use log::warn;
use pathfinding::prelude::{kuhn_munkres, Matrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// Above this size the non-edge term of the likelihood is aggregated by class.
pub const EXACT_LIKELIHOOD_LIMIT: usize = 5_000;

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

fn class_count(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |&m| m + 1)
}

/// Relabels classes `0..k′` in order of first appearance, dropping empty ones.
pub fn compact_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; class_count(labels)];
    let mut next = 0;
    let out = labels
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect();
    (out, next)
}

/// `k × k` table, rows indexed by `a`, columns by `b`.
pub fn confusion_matrix(a: &[usize], b: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    check_len(a.len(), b.len())?;
    let mut table = vec![vec![0usize; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        for l in [x, y] {
            if l >= k {
                return Err(Error::LabelOutOfRange { label: l, k });
            }
        }
        table[x][y] += 1;
    }
    Ok(table)
}

/// Fraction of nodes on which the labelings agree after the best relabeling.
pub fn best_agreement(labels_hat: &[usize], labels_true: &[usize], k: usize) -> Result<f64> {
    let table = confusion_matrix(labels_hat, labels_true, k)?;
    if labels_hat.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let weights = Matrix::from_rows(
        table.iter().map(|row| row.iter().map(|&c| c as i64).collect::<Vec<_>>()),
    )
    .expect("square table");
    let (matched, _) = kuhn_munkres(&weights);
    Ok(matched as f64 / labels_hat.len() as f64)
}

/// `(f* − 1/k) / (1 − 1/k)` with `f*` the best agreement fraction.
pub fn overlap(labels_hat: &[usize], labels_true: &[usize], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("overlap needs k ≥ 2, got {k}")));
    }
    let f = best_agreement(labels_hat, labels_true, k)?;
    let chance = 1.0 / k as f64;
    Ok((f - chance) / (1.0 - chance))
}

/// Newman–Girvan modularity in `O(m + n)`.
pub fn modularity(g: &SparseGraph, labels: &[usize]) -> Result<f64> {
    check_len(g.n(), labels.len())?;
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let k = class_count(labels);
    let mut inside = vec![0usize; k];
    let mut degree_sum = vec![0usize; k];
    for i in 0..g.n() {
        let li = labels[i];
        degree_sum[li] += g.degree(i);
        inside[li] += g.neighbors(i).iter().filter(|&&j| labels[j] == li).count();
    }
    let two_m = 2.0 * g.m() as f64;
    Ok((0..k)
        .map(|c| inside[c] as f64 / two_m - (degree_sum[c] as f64 / two_m).powi(2))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonEdgeSum {
    /// Exact up to [`EXACT_LIKELIHOOD_LIMIT`] nodes, aggregated above.
    #[default]
    Auto,
    Exact,
    Aggregated,
}

#[derive(Debug, Clone, Serialize)]
pub struct Likelihood {
    /// `−(1/2|E|) log P(A | ℓ, θ̂, Ĉ)`.
    pub value: f64,
    pub exact: bool,
    /// Size of the first neglected term of the expansion (0 when exact).
    pub error_bound: f64,
    /// Non-edge pairs whose fitted probability reached 1.
    pub clipped: usize,
    /// Edges whose fitted probability exceeded 1.
    pub clipped_edges: usize,
}

/// Fitted block model: `P_ij = θ̂_i θ̂_j Ĉ_{ℓ_i ℓ_j} / n` with `θ̂ = d / d̄` and
/// `Ĉ_ab = n Σ_{i∈a, j∈b} A_ij / (Σ_{i∈a} θ̂_i Σ_{j∈b} θ̂_j)`.
struct Fit {
    theta: Vec<f64>,
    /// `Ĉ_ab / n`, so that `P_ij = θ̂_i θ̂_j w_ab`.
    w: Vec<Vec<f64>>,
}

impl Fit {
    fn new(g: &SparseGraph, labels: &[usize], k: usize) -> Result<Self> {
        let n = g.n();
        let d = g.degrees_f64();
        let mean = d.iter().sum::<f64>() / n as f64;
        let theta: Vec<f64> = d.iter().map(|di| di / mean).collect();
        let mut sizes = vec![0usize; k];
        let mut mass = vec![0.0; k];
        let mut edges = vec![vec![0.0; k]; k];
        for i in 0..n {
            let a = labels[i];
            sizes[a] += 1;
            mass[a] += theta[i];
            for &j in g.neighbors(i) {
                edges[a][labels[j]] += 1.0;
            }
        }
        if let Some(a) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyClass(a));
        }
        let mut w = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in 0..k {
                let denom = mass[a] * mass[b];
                if denom <= 0.0 {
                    return Err(Error::DegenerateAffinity(a, b));
                }
                w[a][b] = edges[a][b] / denom;
            }
        }
        Ok(Self { theta, w })
    }

    fn p(&self, labels: &[usize], i: usize, j: usize) -> f64 {
        self.theta[i] * self.theta[j] * self.w[labels[i]][labels[j]]
    }
}

/// `ln(1 − x)`, with `x ≥ 1` mapped to the log of the smallest positive double.
fn log_complement(x: f64) -> (f64, bool) {
    if x >= 1.0 {
        (f64::MIN_POSITIVE.ln(), true)
    } else {
        ((-x).ln_1p(), false)
    }
}

/// Normalized negative log-likelihood, non-edge pairs taken unordered.
pub fn dcsbm_log_likelihood(g: &SparseGraph, labels: &[usize]) -> Result<f64> {
    Ok(dcsbm_log_likelihood_with(g, labels, NonEdgeSum::Auto)?.value)
}

pub fn dcsbm_log_likelihood_with(
    g: &SparseGraph,
    labels: &[usize],
    method: NonEdgeSum,
) -> Result<Likelihood> {
    check_len(g.n(), labels.len())?;
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let n = g.n();
    let k = class_count(labels);
    let fit = Fit::new(g, labels, k)?;

    let exact = match method {
        NonEdgeSum::Auto => n <= EXACT_LIKELIHOOD_LIMIT,
        NonEdgeSum::Exact => true,
        NonEdgeSum::Aggregated => false,
    };

    // Edge term, and the non-edge summand evaluated on edges so it can be
    // subtracted from an all-pairs total computed the same way.
    let mut edge_term = 0.0;
    let mut edge_complement = 0.0;
    let mut clipped_on_edges = 0;
    let mut clipped_edges = 0;
    for (i, j) in g.to_edge_list() {
        let p = fit.p(labels, i, j);
        if p > 1.0 {
            clipped_edges += 1;
        }
        edge_term += p.min(1.0).ln();
        let (lc, clipped) = log_complement(p);
        if exact {
            edge_complement += lc;
            clipped_on_edges += clipped as usize;
        } else {
            edge_complement += -p - 0.5 * p * p;
        }
    }
    let (all_pairs, clipped_all, error_bound) = if exact {
        let (sum, clipped) = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut s = 0.0;
                let mut c = 0usize;
                for j in i + 1..n {
                    let (lc, cl) = log_complement(fit.p(labels, i, j));
                    s += lc;
                    c += cl as usize;
                }
                (s, c)
            })
            .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        (sum, clipped, 0.0)
    } else {
        let (sum, third) = aggregated_pairs(&fit, labels, k);
        (sum, 0, third)
    };
    let clipped = clipped_all - clipped_on_edges;
    if clipped > 0 {
        warn!("{clipped} non-edge pairs have fitted probability ≥ 1; clipped");
    }
    if clipped_edges > 0 {
        warn!("{clipped_edges} edges have fitted probability > 1; clipped to 1");
    }
    let non_edge = all_pairs - edge_complement;
    let two_m = 2.0 * g.m() as f64;
    Ok(Likelihood {
        value: -(edge_term + non_edge) / two_m,
        exact,
        error_bound: error_bound / two_m,
        clipped,
        clipped_edges,
    })
}

/// `Σ_{i<j} ln(1 − P_ij) ≈ −Σ P_ij − ½ Σ P_ij²`, from per-class power sums of
/// `θ̂`. Also returns `⅓ Σ P_ij³`, the leading neglected term.
fn aggregated_pairs(fit: &Fit, labels: &[usize], k: usize) -> (f64, f64) {
    let mut sums = vec![[0.0f64; 6]; k];
    for (i, &t) in fit.theta.iter().enumerate() {
        let s = &mut sums[labels[i]];
        let mut pw = 1.0;
        for e in 0..6 {
            pw *= t;
            s[e] += pw;
        }
    }
    // Σ_{i<j} P^q = ½ (Σ_{a,b} w_ab^q S_a^(q) S_b^(q) − Σ_a w_aa^q S_a^(2q)).
    let power_sum = |q: usize| {
        let mut full = 0.0;
        let mut diag = 0.0;
        for a in 0..k {
            for b in 0..k {
                full += fit.w[a][b].powi(q as i32) * sums[a][q - 1] * sums[b][q - 1];
            }
            diag += fit.w[a][a].powi(q as i32) * sums[a][2 * q - 1];
        }
        0.5 * (full - diag)
    };
    let (p1, p2, p3) = (power_sum(1), power_sum(2), power_sum(3));
    (-p1 - 0.5 * p2, p3 / 3.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreBundle {
    pub overlap: Option<f64>,
    pub modularity: f64,
    pub neg_log_likelihood: f64,
    pub k_used: usize,
}

/// All scores for one partition. Empty classes are dropped before fitting
/// the likelihood.
pub fn score_partition(
    g: &SparseGraph,
    labels: &[usize],
    truth: Option<&[usize]>,
) -> Result<ScoreBundle> {
    let (compact, k_used) = compact_labels(labels);
    let overlap = match truth {
        Some(t) => {
            let k = class_count(labels).max(class_count(t)).max(2);
            Some(overlap(labels, t, k)?)
        }
        None => None,
    };
    Ok(ScoreBundle {
        overlap,
        modularity: modularity(g, labels)?,
        neg_log_likelihood: dcsbm_log_likelihood(g, &compact)?,
        k_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgePolicy;

    fn two_cliques(m: usize) -> SparseGraph {
        let mut edges = Vec::new();
        for base in [0, m] {
            for i in 0..m {
                for j in i + 1..m {
                    edges.push((base + i, base + j));
                }
            }
        }
        SparseGraph::from_edge_list(&edges, None, EdgePolicy::Strict).unwrap()
    }

    #[test]
    fn overlap_basics() {
        let a = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(overlap(&a, &a, 3).unwrap(), 1.0);
        let flipped: Vec<usize> = [0, 1, 1, 0].to_vec();
        let orig: Vec<usize> = [1, 0, 0, 1].to_vec();
        assert_eq!(overlap(&flipped, &orig, 2).unwrap(), 1.0);
        assert!(matches!(overlap(&[0, 3], &[0, 1], 2), Err(Error::LabelOutOfRange { .. })));
        assert!(matches!(overlap(&[0], &[0, 1], 2), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn modularity_of_single_class_is_zero() {
        let g = two_cliques(5);
        assert!(modularity(&g, &vec![0; 10]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn modularity_of_two_cliques() {
        let g = two_cliques(5);
        let labels: Vec<usize> = (0..10).map(|i| i / 5).collect();
        assert!((modularity(&g, &labels).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn true_split_is_more_likely_than_merged() {
        let mut edges: Vec<(usize, usize)> = two_cliques(6).to_edge_list();
        edges.push((0, 6));
        let g = SparseGraph::from_edge_list(&edges, None, EdgePolicy::Strict).unwrap();
        let truth: Vec<usize> = (0..12).map(|i| i / 6).collect();
        let merged = vec![0; 12];
        assert!(dcsbm_log_likelihood(&g, &truth).unwrap() < dcsbm_log_likelihood(&g, &merged).unwrap());
    }

    #[test]
    fn likelihood_rejects_empty_class() {
        let g = two_cliques(4);
        let labels = vec![0, 0, 0, 0, 2, 2, 2, 2];
        assert!(matches!(dcsbm_log_likelihood(&g, &labels), Err(Error::EmptyClass(1))));
    }

    #[test]
    fn compact_drops_gaps() {
        assert_eq!(compact_labels(&[4, 4, 1, 7]), (vec![0, 0, 1, 2], 3));
    }
}
