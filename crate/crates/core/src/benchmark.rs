//! Overlap sweeps on synthetic graphs along the hardness axis `α`, and
//! side-by-side runs of all methods on a given graph.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{run_method, Method};
use crate::clustering::ClusterOptions;
use crate::error::{Error, Result};
use crate::generators::{planted_partition, sample_dcsbm, ThetaSpec};
use crate::graph::SparseGraph;
use crate::scoring::{dcsbm_log_likelihood, modularity, overlap};

/// `points` evenly spaced values from `lo` to `hi`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub n: usize,
    pub k: usize,
    /// Mean degree, held fixed along the sweep.
    pub c: f64,
    pub theta: ThetaSpec,
    /// Grid of `α / α_c`.
    pub alpha_ratios: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub options: ClusterOptions,
}

/// One point of the sweep, with the block-model parameters it maps to.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub alpha_ratio: f64,
    pub alpha: f64,
    pub c_in: f64,
    pub c_out: f64,
}

impl SweepSpec {
    /// Maps `α / α_c` to `(c_in, c_out)`: with `k` equal classes the informative
    /// eigenvalue is `ν = c − c_out = α √c / 2`.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        if self.k < 2 {
            return Err(Error::InvalidParameter("a sweep needs k ≥ 2".into()));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("mean degree must be positive, got {}", self.c)));
        }
        self.theta.validate()?;
        let alpha_c = 2.0 / self.theta.phi().sqrt();
        let k = self.k as f64;
        self.alpha_ratios
            .iter()
            .enumerate()
            .map(|(index, &ratio)| {
                let alpha = ratio * alpha_c;
                let c_out = self.c - alpha * self.c.sqrt() / 2.0;
                let c_in = k * self.c - (k - 1.0) * c_out;
                if !(ratio >= 0.0 && c_out > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "α/α_c = {ratio} gives c_out = {c_out}; must be positive"
                    )));
                }
                Ok(SweepPoint { index, alpha_ratio: ratio, alpha, c_in, c_out })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub method: String,
    pub point: usize,
    pub alpha_ratio: f64,
    pub alpha: f64,
    pub c_out: f64,
    pub seed: u64,
    pub overlap: f64,
    pub modularity: f64,
    pub neg_log_likelihood: f64,
    pub seconds: f64,
    /// Empty on success.
    pub error: String,
}

/// Graph seed for a sweep cell, so every method sees the same graph.
fn cell_seed(seed: u64, point: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (point as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

struct Scored {
    overlap: f64,
    modularity: f64,
    nll: f64,
    seconds: f64,
    error: String,
}

fn score_method(method: Method, g: &SparseGraph, k: usize, truth: Option<&[usize]>, opts: &ClusterOptions) -> Scored {
    let t = Instant::now();
    let res = run_method(method, g, k, opts).and_then(|r| {
        let ov = match truth {
            Some(t) => overlap(&r.labels, t, k)?,
            None => f64::NAN,
        };
        let q = modularity(g, &r.labels)?;
        let nll = dcsbm_log_likelihood(g, &r.labels).unwrap_or(f64::NAN);
        Ok((ov, q, nll))
    });
    let seconds = t.elapsed().as_secs_f64();
    match res {
        Ok((overlap, modularity, nll)) => Scored { overlap, modularity, nll, seconds, error: String::new() },
        Err(e) => Scored {
            overlap: f64::NAN,
            modularity: f64::NAN,
            nll: f64::NAN,
            seconds,
            error: e.to_string(),
        },
    }
}

/// Runs every method on every (point, seed) cell. Rows come out ordered by
/// point, seed, then method, whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    let cells: Vec<(SweepPoint, u64)> =
        points.iter().flat_map(|&p| spec.seeds.iter().map(move |&s| (p, s))).collect();
    let rows: Vec<Result<Vec<SweepRow>>> = cells
        .par_iter()
        .map(|&(pt, seed)| {
            let params = planted_partition(spec.n, spec.k, pt.c_in, pt.c_out)?.with_theta(spec.theta.clone());
            let lg = sample_dcsbm(&params, cell_seed(seed, pt.index))?;
            let opts = ClusterOptions { seed, ..spec.options.clone() };
            Ok(spec
                .methods
                .iter()
                .map(|&m| {
                    let s = score_method(m, &lg.graph, spec.k, Some(&lg.labels), &opts);
                    SweepRow {
                        method: m.name().to_string(),
                        point: pt.index,
                        alpha_ratio: pt.alpha_ratio,
                        alpha: pt.alpha,
                        c_out: pt.c_out,
                        seed,
                        overlap: s.overlap,
                        modularity: s.modularity,
                        neg_log_likelihood: s.nll,
                        seconds: s.seconds,
                        error: s.error,
                    }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub point: usize,
    pub alpha_ratio: f64,
    pub alpha: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_overlap: f64,
    /// Sample standard deviation (0 for a single run).
    pub sd_overlap: f64,
    pub mean_modularity: f64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per (method, point) mean and standard deviation over successful seeds,
/// in first-appearance order.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in rows {
        let key = (r.method.clone(), r.point);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort_by(|a, b| a.1.cmp(&b.1));
    keys.into_iter()
        .map(|(method, point)| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.method == method && r.point == point).collect();
            let ok: Vec<&&SweepRow> = group.iter().filter(|r| r.error.is_empty()).collect();
            let (mean_overlap, sd_overlap) = mean_sd(&ok.iter().map(|r| r.overlap).collect::<Vec<_>>());
            let (mean_modularity, _) = mean_sd(&ok.iter().map(|r| r.modularity).collect::<Vec<_>>());
            SummaryRow {
                method,
                point,
                alpha_ratio: group[0].alpha_ratio,
                alpha: group[0].alpha,
                runs: group.len(),
                failures: group.len() - ok.len(),
                mean_overlap,
                sd_overlap,
                mean_modularity,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphRow {
    pub method: String,
    pub dataset: String,
    pub k: usize,
    pub overlap: f64,
    pub modularity: f64,
    pub neg_log_likelihood: f64,
    pub seconds: f64,
    pub error: String,
}

/// All methods on one graph with `k` given; overlap needs `truth`.
pub fn run_on_graph(
    g: &SparseGraph,
    dataset: &str,
    k: usize,
    truth: Option<&[usize]>,
    methods: &[Method],
    opts: &ClusterOptions,
) -> Vec<GraphRow> {
    methods
        .par_iter()
        .map(|&m| {
            let s = score_method(m, g, k, truth, opts);
            GraphRow {
                method: m.name().to_string(),
                dataset: dataset.to_string(),
                k,
                overlap: s.overlap,
                modularity: s.modularity,
                neg_log_likelihood: s.nll,
                seconds: s.seconds,
                error: s.error,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::detectability;

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(0.3, 1.7, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.3);
        assert_eq!(g[6], 1.7);
    }

    #[test]
    fn points_hit_the_requested_alpha() {
        let spec = SweepSpec {
            n: 100,
            k: 2,
            c: 5.0,
            theta: ThetaSpec::Constant,
            alpha_ratios: vec![0.5, 2.0],
            seeds: vec![0],
            methods: Method::standard(),
            options: ClusterOptions::default(),
        };
        for p in spec.points().unwrap() {
            let params = planted_partition(100, 2, p.c_in, p.c_out).unwrap();
            let ms = detectability(&params);
            assert!((ms.c - 5.0).abs() < 1e-12);
            assert!((ms.alpha / ms.alpha_c - p.alpha_ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn small_sweep_has_one_row_per_cell() {
        let spec = SweepSpec {
            n: 300,
            k: 2,
            c: 8.0,
            theta: ThetaSpec::Constant,
            alpha_ratios: linspace(1.0, 2.0, 2),
            seeds: vec![1, 2],
            methods: Method::standard(),
            options: ClusterOptions { restarts: 3, ..Default::default() },
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 6 * 2 * 2);
        assert!(rows.iter().filter(|r| r.error.is_empty()).all(|r| (-0.1..=1.0).contains(&r.overlap)));
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 6 * 2);
    }
}
