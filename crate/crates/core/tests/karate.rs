use std::fs::File;
use std::io::BufReader;

use bethe_core::clustering::{algorithm2, ClusterOptions};
use bethe_core::io::{read_edge_list, read_labels};
use bethe_core::scoring::{dcsbm_log_likelihood, modularity, overlap};
use bethe_core::EdgePolicy;

fn karate() -> bethe_core::io::EdgeListFile {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate.txt");
    read_edge_list(BufReader::new(File::open(path).unwrap()), EdgePolicy::Strict).unwrap()
}

#[test]
fn karate_fixture_shape() {
    let f = karate();
    assert_eq!(f.graph.n(), 34);
    assert_eq!(f.graph.m(), 78);
}

#[test]
fn club_split_scores() {
    let f = karate();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate_clubs.txt");
    let clubs = read_labels(BufReader::new(File::open(path).unwrap())).unwrap().align(&f).unwrap();
    // numpy reference values on the same split
    assert!((modularity(&f.graph, &clubs).unwrap() - 0.3582).abs() < 1e-4);
    assert!((dcsbm_log_likelihood(&f.graph, &clubs).unwrap() - 0.8735).abs() < 1e-4);
}

#[test]
fn algorithm2_on_karate() {
    let f = karate();
    let res = algorithm2(&f.graph, &ClusterOptions { k: Some(2), ..Default::default() }).unwrap();
    let q = modularity(&f.graph, &res.labels).unwrap();
    let ll = dcsbm_log_likelihood(&f.graph, &res.labels).unwrap();
    println!("Q = {q}, L = {ll}, zeta = {:?}", res.zeta.zeta);
    assert!((q - 0.37).abs() <= 0.01);
    assert!((ll - 0.86).abs() <= 0.01);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate_clubs.txt");
    let clubs = read_labels(BufReader::new(File::open(path).unwrap())).unwrap().align(&f).unwrap();
    println!("overlap with clubs {}", overlap(&res.labels, &clubs, 2).unwrap());
}
