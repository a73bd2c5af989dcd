//! Degree-corrected stochastic block model sampling.
//!
//! An unordered pair `i < j` is an edge with probability
//! `min(θ_i θ_j C[ℓ_i][ℓ_j] / n, 1)`. The degree propensities `θ` are
//! normalized to unit mean.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedAliasIndex, Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// Below this size edges are drawn pair by pair.
pub const EXACT_SAMPLING_LIMIT: usize = 2_000;

const AFFINITY_ATTEMPTS: usize = 1_000;

/// Distribution of the raw degree propensities, before unit-mean normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThetaSpec {
    Constant,
    /// `U(low, high)^exponent`.
    PowerUniform { low: f64, high: f64, exponent: f64 },
}

impl ThetaSpec {
    /// `E[U^q]` for `U ~ U(low, high)`.
    fn uniform_moment(low: f64, high: f64, q: f64) -> f64 {
        (high.powf(q + 1.0) - low.powf(q + 1.0)) / ((q + 1.0) * (high - low))
    }

    /// Second moment `Φ = E[θ²]` of the normalized propensities.
    pub fn phi(&self) -> f64 {
        match *self {
            ThetaSpec::Constant => 1.0,
            ThetaSpec::PowerUniform { low, high, exponent } => {
                let m1 = Self::uniform_moment(low, high, exponent);
                let m2 = Self::uniform_moment(low, high, 2.0 * exponent);
                m2 / (m1 * m1)
            }
        }
    }

    fn sample_raw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ThetaSpec::Constant => 1.0,
            ThetaSpec::PowerUniform { low, high, exponent } => {
                rng.random_range(low..high).powf(exponent)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ThetaSpec::Constant => Ok(()),
            ThetaSpec::PowerUniform { low, high, exponent } => {
                if !(low > 0.0 && high > low && exponent.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "power-uniform needs 0 < low < high, got ({low}, {high}, {exponent})"
                    )));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Constant => write!(f, "constant"),
            ThetaSpec::PowerUniform { low, high, exponent } => {
                write!(f, "power-uniform({low},{high},{exponent})")
            }
        }
    }
}

impl FromStr for ThetaSpec {
    type Err = Error;

    /// Accepts `constant` or `power-uniform(a,b,exponent)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "constant" {
            return Ok(ThetaSpec::Constant);
        }
        let bad = || Error::InvalidParameter(format!("unrecognized theta spec '{s}'"));
        let inner = s
            .strip_prefix("power-uniform(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let nums: Vec<f64> = inner
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [low, high, exponent] = nums[..] else { return Err(bad()) };
        let spec = ThetaSpec::PowerUniform { low, high, exponent };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcSbmParams {
    pub n: usize,
    /// Symmetric `k × k` affinity matrix `C`.
    pub affinity: Vec<Vec<f64>>,
    /// Class proportions `π`.
    pub pi: Vec<f64>,
    pub theta: ThetaSpec,
    /// Nominal off-diagonal affinity, used for the hardness axis `α`.
    pub c_out: f64,
}

impl DcSbmParams {
    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn with_theta(mut self, theta: ThetaSpec) -> Self {
        self.theta = theta;
        self
    }

    /// Expected degree of class `p` when `E[θ] = 1`: `(C Π 𝟙)_p`.
    pub fn class_degrees(&self) -> Vec<f64> {
        self.affinity
            .iter()
            .map(|row| row.iter().zip(&self.pi).map(|(c, p)| c * p).sum())
            .collect()
    }

    /// Mean degree `c = πᵀ C π`.
    pub fn mean_degree(&self) -> f64 {
        self.class_degrees().iter().zip(&self.pi).map(|(d, p)| d * p).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if self.n == 0 || k == 0 {
            return Err(Error::InvalidParameter("n and k must be positive".into()));
        }
        if self.affinity.len() != k || self.affinity.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParameter("affinity must be k × k".into()));
        }
        for p in 0..k {
            for q in 0..k {
                let c = self.affinity[p][q];
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "affinity entries must be positive, C[{p}][{q}] = {c}"
                    )));
                }
                if (c - self.affinity[q][p]).abs() > 1e-12 * c.abs().max(1.0) {
                    return Err(Error::InvalidParameter("affinity must be symmetric".into()));
                }
            }
        }
        if self.pi.iter().any(|&p| !(p > 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("class proportions must be positive and sum to 1".into()));
        }
        self.theta.validate()
    }

    /// Class sizes `round(n π_p)`, with the rounding remainder given to the
    /// largest class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> =
            self.pi.iter().map(|p| (self.n as f64 * p).round() as usize).collect();
        let largest = (0..sizes.len())
            .fold(0, |best, i| if self.pi[i] > self.pi[best] { i } else { best });
        let total: usize = sizes.iter().sum();
        if total > self.n {
            sizes[largest] -= total - self.n;
        } else {
            sizes[largest] += self.n - total;
        }
        sizes
    }
}

/// `C = [[c_in, c_out], [c_out, c_in]]` with equal class sizes.
pub fn two_class_symmetric(n: usize, c_in: f64, c_out: f64) -> Result<DcSbmParams> {
    planted_partition(n, 2, c_in, c_out)
}

/// `k` equal classes, `c_in` on the diagonal of `C` and `c_out` elsewhere.
pub fn planted_partition(n: usize, k: usize, c_in: f64, c_out: f64) -> Result<DcSbmParams> {
    if !(c_in > 0.0 && c_out > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "affinities must be positive, got c_in = {c_in}, c_out = {c_out}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let affinity = (0..k)
        .map(|p| (0..k).map(|q| if p == q { c_in } else { c_out }).collect())
        .collect();
    let params = DcSbmParams {
        n,
        affinity,
        pi: vec![1.0 / k as f64; k],
        theta: ThetaSpec::Constant,
        c_out,
    };
    params.validate()?;
    Ok(params)
}

/// Random affinity with equal class sizes; see [`random_affinity_with_pi`].
pub fn random_affinity(n: usize, k: usize, c: f64, c_out: f64, seed: u64) -> Result<DcSbmParams> {
    random_affinity_with_pi(n, vec![1.0 / k as f64; k], c, c_out, seed)
}

/// Off-diagonal entries drawn from a normal with mean `c_out` and variance
/// `c_out / k`, floored at `1e-3 c_out`; the diagonal is then solved so every
/// row of `C Π` sums to `c`. Draws with a non-positive diagonal are rejected.
pub fn random_affinity_with_pi(
    n: usize,
    pi: Vec<f64>,
    c: f64,
    c_out: f64,
    seed: u64,
) -> Result<DcSbmParams> {
    let k = pi.len();
    if k < 2 || !(c > c_out && c_out > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need k ≥ 2 and c > c_out > 0, got k = {k}, c = {c}, c_out = {c_out}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(c_out, (c_out / k as f64).sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let floor = 1e-3 * c_out;
    for _ in 0..AFFINITY_ATTEMPTS {
        let mut a = vec![vec![0.0; k]; k];
        for p in 0..k {
            for q in p + 1..k {
                let v = normal.sample(&mut rng).max(floor);
                a[p][q] = v;
                a[q][p] = v;
            }
        }
        let mut ok = true;
        for p in 0..k {
            let off: f64 = (0..k).filter(|&q| q != p).map(|q| a[p][q] * pi[q]).sum();
            a[p][p] = (c - off) / pi[p];
            ok &= a[p][p] > 0.0;
        }
        if ok {
            let params = DcSbmParams { n, affinity: a, pi: pi.clone(), theta: ThetaSpec::Constant, c_out };
            params.validate()?;
            return Ok(params);
        }
    }
    Err(Error::InfeasibleAffinity(AFFINITY_ATTEMPTS))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpectrum {
    /// Eigenvalues of `C Π`, descending.
    pub nu: Vec<f64>,
    pub c: f64,
    pub phi: f64,
    /// Nominal hardness `2 (c − c_out) / √c`.
    pub alpha: f64,
    /// Threshold `2 / √Φ`.
    pub alpha_c: f64,
    /// `c / ν_p`, infinite where `ν_p ≤ 0`.
    pub zeta_theoretical: Vec<f64>,
}

/// Eigenvalues of `C Π` through the symmetric similarity `Π^½ C Π^½`.
pub fn detectability(params: &DcSbmParams) -> ModelSpectrum {
    let k = params.k();
    let sq: Vec<f64> = params.pi.iter().map(|p| p.sqrt()).collect();
    let m = DMatrix::from_fn(k, k, |p, q| sq[p] * params.affinity[p][q] * sq[q]);
    let mut nu: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
    nu.sort_by(|a, b| b.total_cmp(a));
    let c = params.mean_degree();
    let phi = params.theta.phi();
    let zeta_theoretical =
        nu.iter().map(|&v| if v > 0.0 { c / v } else { f64::INFINITY }).collect();
    ModelSpectrum {
        alpha: 2.0 * (c - params.c_out) / c.sqrt(),
        alpha_c: 2.0 / phi.sqrt(),
        nu,
        c,
        phi,
        zeta_theoretical,
    }
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: SparseGraph,
    pub labels: Vec<usize>,
    pub theta: Vec<f64>,
}

/// Draws one graph. The same seed always yields the same graph.
pub fn sample_dcsbm(params: &DcSbmParams, seed: u64) -> Result<LabeledGraph> {
    params.validate()?;
    let n = params.n;
    let k = params.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut labels: Vec<usize> = params
        .class_sizes()
        .iter()
        .enumerate()
        .flat_map(|(p, &s)| std::iter::repeat_n(p, s))
        .collect();
    labels.shuffle(&mut rng);

    let mut theta: Vec<f64> = (0..n).map(|_| params.theta.sample_raw(&mut rng)).collect();
    let mean = theta.iter().sum::<f64>() / n as f64;
    theta.iter_mut().for_each(|t| *t /= mean);

    let mut pairs = Vec::new();
    if n < EXACT_SAMPLING_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                let p = theta[i] * theta[j] * params.affinity[labels[i]][labels[j]] / n as f64;
                if rng.random::<f64>() < p.min(1.0) {
                    pairs.push((i, j));
                }
            }
        }
    } else {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        let samplers: Vec<WeightedAliasIndex<f64>> = members
            .iter()
            .map(|m| {
                WeightedAliasIndex::new(m.iter().map(|&i| theta[i]).collect())
                    .map_err(|e| Error::InvalidParameter(e.to_string()))
            })
            .collect::<Result<_>>()?;
        let totals: Vec<f64> =
            members.iter().map(|m| m.iter().map(|&i| theta[i]).sum()).collect();
        for a in 0..k {
            for b in a..k {
                // Ordered draws within a class visit each unordered pair twice.
                let lambda = if a == b {
                    params.affinity[a][a] * totals[a] * totals[a] / (2.0 * n as f64)
                } else {
                    params.affinity[a][b] * totals[a] * totals[b] / n as f64
                };
                if lambda <= 0.0 {
                    continue;
                }
                let count = Poisson::new(lambda)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?
                    .sample(&mut rng) as usize;
                pairs.reserve(count);
                for _ in 0..count {
                    let i = members[a][samplers[a].sample(&mut rng)];
                    let j = members[b][samplers[b].sample(&mut rng)];
                    if i != j {
                        pairs.push((i.min(j), i.max(j)));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
    }
    Ok(LabeledGraph { graph: SparseGraph::from_canonical_pairs(n, &pairs), labels, theta })
}

/// Uniform-ish random `d`-regular simple graph by incremental stub pairing,
/// restarting when the pairing gets stuck.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<SparseGraph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("no {d}-regular graph on {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..1_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, d)).collect();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        let mut pairs = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut placed = false;
            for _ in 0..100 * stubs.len() {
                let a = rng.random_range(0..stubs.len());
                let b = rng.random_range(0..stubs.len());
                let (u, v) = (stubs[a], stubs[b]);
                if a == b || u == v || adjacency[u].contains(&v) {
                    continue;
                }
                adjacency[u].push(v);
                adjacency[v].push(u);
                pairs.push((u.min(v), u.max(v)));
                let (hi, lo) = (a.max(b), a.min(b));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'attempt;
            }
        }
        pairs.sort_unstable();
        return Ok(SparseGraph::from_canonical_pairs(n, &pairs));
    }
    Err(Error::InvalidParameter(format!("failed to pair stubs for {d}-regular graph on {n} nodes")))
}
