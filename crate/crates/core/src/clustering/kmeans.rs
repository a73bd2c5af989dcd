//! k-means++ seeding followed by Lloyd iterations, over several restarts.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { restarts: 10, iters: 30, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub inertia: f64,
    pub centers: Vec<Vec<f64>>,
    /// Restart that produced the result.
    pub restart: usize,
    /// Inertia after each assignment step of the kept restart.
    pub history: Vec<f64>,
}

/// Row-major copy of the points.
struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    fn new(x: &DMatrix<f64>) -> Self {
        let (n, dim) = x.shape();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            data.extend(x.row(i).iter());
        }
        Self { data, dim }
    }

    fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index and squared distance of the nearest center; ties go to the lowest index.
fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = dist2(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn distinct_rows(pts: &Points) -> usize {
    let mut seen = HashSet::new();
    for i in 0..pts.len() {
        let key: Vec<u64> = pts.row(i).iter().map(|v| (v + 0.0).to_bits()).collect();
        seen.insert(key);
    }
    seen.len()
}

fn plus_plus(pts: &Points, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = pts.len();
    let mut centers = vec![pts.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|i| dist2(pts.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = n - 1;
        for (i, &w) in d2.iter().enumerate() {
            if w > 0.0 && target < w {
                pick = i;
                break;
            }
            target -= w;
        }
        if d2[pick] == 0.0 {
            // Rounding ran past the end; take the last point still uncovered.
            pick = d2.iter().rposition(|&w| w > 0.0).expect("fewer distinct points than k");
        }
        let c = pts.row(pick).to_vec();
        for (i, w) in d2.iter_mut().enumerate() {
            *w = w.min(dist2(pts.row(i), &c));
        }
        centers.push(c);
    }
    centers
}

fn lloyd(pts: &Points, k: usize, iters: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64, Vec<Vec<f64>>, Vec<f64>) {
    let n = pts.len();
    let dim = pts.dim;
    let mut centers = plus_plus(pts, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    let mut history = Vec::new();
    for it in 0..=iters {
        let mut changed = false;
        for i in 0..n {
            let (c, d) = nearest(pts.row(i), &centers);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
            dist[i] = d;
        }
        history.push(dist.iter().sum());
        if !changed || it == iters {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, v) in sums[labels[i]].iter_mut().zip(pts.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        // Empty clusters take the point farthest from its center.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[labels[i]] > 1)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                    .expect("some cluster has two points");
                counts[labels[far]] -= 1;
                counts[c] = 1;
                labels[far] = c;
                dist[far] = 0.0;
                centers[c] = pts.row(far).to_vec();
            }
        }
    }
    let inertia = *history.last().expect("at least one assignment");
    (labels, inertia, centers, history)
}

/// Best of `restarts` runs by inertia (ties: lowest restart index). Restart
/// `r` uses the ChaCha stream `r` of `seed`, so results do not depend on
/// scheduling.
pub fn kmeans(x: &DMatrix<f64>, k: usize, opts: &KMeansOptions) -> Result<KMeansResult> {
    let pts = Points::new(x);
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} for {n} points")));
    }
    let distinct = distinct_rows(&pts);
    if distinct < k {
        return Err(Error::TooFewDistinctPoints { k, distinct });
    }
    let runs: Vec<_> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            lloyd(&pts, k, opts.iters, &mut rng)
        })
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = r;
        }
    }
    let (labels, inertia, centers, history) = runs.into_iter().nth(best).expect("non-empty");
    Ok(KMeansResult { labels, inertia, centers, restart: best, history })
}
