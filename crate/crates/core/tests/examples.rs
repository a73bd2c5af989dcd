//! Worked examples across modules, each checked against an independent
//! computation or a published value.

mod common;

use std::fs::File;
use std::io::BufReader;

use bethe_core::baselines::{cluster_with, BaselineMethod, Method};
use bethe_core::benchmark::{run_sweep, summarize, SweepSpec};
use bethe_core::clustering::kmeans::{kmeans, KMeansOptions};
use bethe_core::clustering::{algorithm2, build_embedding, ClusterOptions};
use bethe_core::estimation::{compute_zeta, estimate_k, zeta_from_b, ZetaOptions};
use bethe_core::generators::{
    detectability, planted_partition, random_affinity, random_regular, sample_dcsbm, two_class_symmetric,
    ThetaSpec,
};
use bethe_core::graph::{graph_stats, largest_component, UNMAPPED};
use bethe_core::io::read_edge_list;
use bethe_core::scoring::{modularity, overlap};
use bethe_core::spectral::{
    bethe_hessian, extreme_eigs, real_top_eigs_b, reg_sym_laplacian, smallest_eigs, spectral_radius_b,
    SolverOptions, Which,
};
use bethe_core::{EdgePolicy, SparseGraph};
use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn karate() -> SparseGraph {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate.txt");
    read_edge_list(BufReader::new(File::open(path).unwrap()), EdgePolicy::Strict).unwrap().graph
}

fn pu() -> ThetaSpec {
    ThetaSpec::PowerUniform { low: 3.0, high: 10.0, exponent: 3.0 }
}

fn giant_with_labels(g: &SparseGraph, labels: &[usize]) -> (SparseGraph, Vec<usize>) {
    let (giant, map) = largest_component(g).unwrap();
    let mut out = vec![0; giant.n()];
    for (old, &new) in map.iter().enumerate() {
        if new != UNMAPPED {
            out[new] = labels[old];
        }
    }
    (giant, out)
}

#[test]
fn karate_degree_moments() {
    let s = graph_stats(&karate()).unwrap();
    assert!((s.c_hat - 4.59).abs() < 0.01, "{}", s.c_hat);
    assert!((s.phi_hat - 1.7).abs() < 0.05, "{}", s.phi_hat);
}

#[test]
fn giant_component_above_percolation() {
    let params = planted_partition(10_000, 2, 3.0, 1.0).unwrap().with_theta(pu());
    let g = sample_dcsbm(&params, 3).unwrap().graph;
    let (giant, _) = largest_component(&g).unwrap();
    assert!(giant.n() as f64 > 0.5 * g.n() as f64);
}

#[test]
fn sampled_degrees_match_the_model() {
    let params = two_class_symmetric(10_000, 8.0, 2.0).unwrap().with_theta(pu());
    let lg = sample_dcsbm(&params, 5).unwrap();
    let n = lg.graph.n();
    for class in 0..2 {
        let d: Vec<f64> = (0..n).filter(|&i| lg.labels[i] == class).map(|i| lg.graph.degree(i) as f64).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        let se = (var / d.len() as f64).sqrt();
        // the block sampler's expected degree is c up to the 1/n self-pair term
        assert!((mean - 5.0).abs() < 3.0 * se + 5.0 / n as f64, "class {class}: {mean} ± {se}");
    }
    // Φ̂ = cΦ̂ / ĉ against E[θ²] of the very θ the sampler drew
    let mc_phi = lg.theta.iter().map(|t| t * t).sum::<f64>() / n as f64;
    let s = graph_stats(&lg.graph).unwrap();
    let phi = s.cphi_hat / s.c_hat;
    assert!((phi - mc_phi).abs() / mc_phi < 0.05, "Φ̂ = {phi}, E[θ²] = {mc_phi}");
}

#[test]
fn random_affinity_perron_value() {
    let params = random_affinity(1000, 5, 5.0, 1.0, 7).unwrap();
    let k = params.k();
    let cpi = DMatrix::from_fn(k, k, |p, q| params.affinity[p][q] * params.pi[q]);
    let nu1 = cpi.complex_eigenvalues().iter().map(|z| z.re).fold(f64::MIN, f64::max);
    assert!((nu1 - 5.0).abs() < 1e-8, "{nu1}");
    assert!((detectability(&params).nu[0] - 5.0).abs() < 1e-8);
}

#[test]
fn triangle_bethe_hessian_spectrum() {
    let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], None, EdgePolicy::Strict).unwrap();
    let ev = sorted_eigenvalues(dense_bethe_hessian(&dense_adjacency(&g), 2.0));
    for (a, b) in ev.iter().zip([1.0, 7.0, 7.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let op = bethe_hessian(&g, 2.0);
    let ours = sorted_eigenvalues(bethe_core::spectral::LinearOperator::to_dense(&op));
    assert_eq!(ours.len(), 3);
    for (a, b) in ours.iter().zip(&ev) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn solvers_agree_with_dense_eigensolves() {
    let params = planted_partition(400, 3, 10.0, 2.0).unwrap().with_theta(pu());
    let g = sample_dcsbm(&params, 17).unwrap().graph;
    let a = dense_adjacency(&g);
    let d = dense_degrees(&a);

    let h = smallest_eigs(&bethe_hessian(&g, 1.9), 4, 1e-12).unwrap();
    let dense = sorted_eigenvalues(dense_bethe_hessian(&a, 1.9));
    for (x, y) in h.values.iter().zip(&dense) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }

    let tau = 3.0;
    let l = DMatrix::from_fn(g.n(), g.n(), |i, j| a[(i, j)] / ((d[i] + tau) * (d[j] + tau)).sqrt());
    let dense = sorted_eigenvalues(l);
    let top = extreme_eigs(&reg_sym_laplacian(&g, tau), 4, Which::Largest, &SolverOptions::with_tol(1e-12), None).unwrap();
    for (x, y) in top.values.iter().zip(dense.iter().rev()) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
}

#[test]
fn regular_graph_laplacian_top_pair() {
    let g = random_regular(300, 4, 1).unwrap();
    let top = extreme_eigs(&reg_sym_laplacian(&g, 0.0), 1, Which::Largest, &SolverOptions::with_tol(1e-12), None).unwrap();
    assert!((top.values[0] - 1.0).abs() < 1e-10);
    let x = top.vectors.column(0);
    let mean = x.sum() / x.len() as f64;
    assert!(x.iter().all(|v| (v - mean).abs() < 1e-8));
}

#[test]
fn real_outliers_of_b_match_dense_companion() {
    let params = planted_partition(300, 2, 12.0, 2.0).unwrap();
    let (g, _) = largest_component(&sample_dcsbm(&params, 2).unwrap().graph).unwrap();
    let spec = real_top_eigs_b(&g, 2, 1e-12).unwrap();
    let mut real: Vec<f64> = dense_companion(&dense_adjacency(&g))
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-8)
        .map(|z| z.re)
        .collect();
    real.sort_by(|a, b| b.total_cmp(a));
    for (x, y) in spec.values.iter().zip(&real) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
    let rho = spectral_radius_b(&g, 1e-12).unwrap();
    assert!((rho - real[0]).abs() < 1e-6);
}

#[test]
fn two_class_outliers_near_model_values() {
    let params = two_class_symmetric(10_000, 8.0, 2.0).unwrap();
    let (g, _) = largest_component(&sample_dcsbm(&params, 4).unwrap().graph).unwrap();
    let spec = real_top_eigs_b(&g, 2, 1e-10).unwrap();
    // cΦ = 5 and ν_2Φ = 3 for constant θ
    assert!((spec.values[0] - 5.0).abs() / 5.0 < 0.05, "{:?}", spec.values);
    assert!((spec.values[1] - 3.0).abs() / 3.0 < 0.05, "{:?}", spec.values);
    let r = random_regular(2000, 5, 3).unwrap();
    assert!((real_top_eigs_b(&r, 1, 1e-10).unwrap().values[0] - 4.0).abs() < 1e-6);
}

#[test]
fn estimate_k_well_above_threshold() {
    // α = 2(c − c_out)/√c = 3 α_c = 6 at c = 20, θ ≡ 1
    let c: f64 = 20.0;
    let c_out = c - 3.0 * c.sqrt();
    let params = two_class_symmetric(10_000, 2.0 * c - c_out, c_out).unwrap();
    assert!((detectability(&params).alpha - 6.0).abs() < 1e-12);
    let (g, _) = largest_component(&sample_dcsbm(&params, 8).unwrap().graph).unwrap();
    assert_eq!(estimate_k(&g, 1e-10).unwrap().k_hat, 2);
}

#[test]
fn b_based_zeta_close_on_block_models() {
    let params = planted_partition(5000, 3, 16.0, 2.0).unwrap().with_theta(pu());
    let (g, _) = largest_component(&sample_dcsbm(&params, 12).unwrap().graph).unwrap();
    let z = compute_zeta(&g, 3, &ZetaOptions::default()).unwrap();
    let zb = zeta_from_b(&g, 3, z.rho, 1e-10).unwrap();
    for p in 1..3 {
        assert!((z.zeta[p] - zb[p]).abs() / z.zeta[p] < 0.05, "{:?} vs {:?}", z.zeta, zb);
    }
}

#[test]
fn embedding_signs_follow_classes_on_hubs() {
    let params = two_class_symmetric(10_000, 9.0, 1.0).unwrap().with_theta(pu());
    let lg = sample_dcsbm(&params, 21).unwrap();
    let (g, truth) = giant_with_labels(&lg.graph, &lg.labels);
    let z = compute_zeta(&g, 2, &ZetaOptions::default()).unwrap();
    let emb = build_embedding(&z, 1e-6).unwrap();
    let mut by_degree: Vec<usize> = (0..g.n()).collect();
    by_degree.sort_by_key(|&i| std::cmp::Reverse(g.degree(i)));
    let hubs = &by_degree[..g.n() / 10];
    let agree = hubs.iter().filter(|&&i| (emb.x[(i, 1)] > 0.0) == (truth[i] == 0)).count() as f64 / hubs.len() as f64;
    assert!(agree.max(1.0 - agree) >= 0.9, "{agree}");
}

#[test]
fn kmeans_matches_exhaustive_assignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let n = rng.random_range(4..=12);
        let x = DMatrix::from_fn(n, 2, |i, _| {
            let centre = if i % 2 == 0 { -1.5 } else { 1.5 };
            let z: f64 = StandardNormal.sample(&mut rng);
            centre + z
        });
        let best = (1u32..(1 << n) - 1)
            .map(|mask| {
                let mut cost = 0.0;
                for side in [0, 1] {
                    let rows: Vec<usize> = (0..n).filter(|&i| (mask >> i & 1) == side).collect();
                    for c in 0..2 {
                        let mean = rows.iter().map(|&i| x[(i, c)]).sum::<f64>() / rows.len() as f64;
                        cost += rows.iter().map(|&i| (x[(i, c)] - mean).powi(2)).sum::<f64>();
                    }
                }
                cost
            })
            .fold(f64::INFINITY, f64::min);
        let res = kmeans(&x, 2, &KMeansOptions { seed: trial, ..KMeansOptions::default() }).unwrap();
        assert!((res.inertia - best).abs() <= 1e-9 * best.max(1.0), "trial {trial}: {} vs {best}", res.inertia);
    }
}

#[test]
fn algorithm2_recovers_easy_two_class_model() {
    let c: f64 = 10.0;
    let phi = pu().phi();
    let alpha = 3.0 * 2.0 / phi.sqrt();
    let c_out = c - alpha * c.sqrt() / 2.0;
    let params = two_class_symmetric(20_000, 2.0 * c - c_out, c_out).unwrap().with_theta(pu());
    let lg = sample_dcsbm(&params, 1).unwrap();
    let res = algorithm2(&lg.graph, &ClusterOptions { k: Some(2), ..Default::default() }).unwrap();
    let ov = overlap(&res.labels, &lg.labels, 2).unwrap();
    assert!(ov >= 0.7, "{ov}");
}

#[test]
fn karate_regularized_laplacian_baseline() {
    let g = karate();
    let res = cluster_with(BaselineMethod::RegSymLaplacian, &g, 2, &ClusterOptions::default()).unwrap();
    let q = modularity(&g, &res.labels).unwrap();
    assert!((q - 0.37).abs() <= 0.01, "{q}");
}

#[test]
fn fixed_bethe_hessian_beats_adjacency_near_threshold() {
    let spec = SweepSpec {
        n: 5000,
        k: 2,
        c: 5.0,
        theta: pu(),
        alpha_ratios: vec![1.5],
        seeds: (0..3).collect(),
        methods: vec![Method::Baseline(BaselineMethod::BetheHessianFixed), Method::Baseline(BaselineMethod::Adjacency)],
        options: ClusterOptions::default(),
    };
    let rows = run_sweep(&spec).unwrap();
    assert!(rows.iter().all(|r| r.error.is_empty() && (-0.1..=1.0).contains(&r.overlap)));
    let s = summarize(&rows);
    let mean = |m: &str| s.iter().find(|r| r.method == m).unwrap().mean_overlap;
    assert!(mean("bethe-hessian-fixed") > mean("adjacency"), "{s:?}");
}

#[test]
fn independent_labels_have_no_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a: Vec<usize> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
    let b: Vec<usize> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
    assert!(overlap(&a, &b, 2).unwrap().abs() < 0.05);
    let flipped: Vec<usize> = a.iter().map(|l| 1 - l).collect();
    assert_eq!(overlap(&a, &flipped, 2).unwrap(), 1.0);
}
