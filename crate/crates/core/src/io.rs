//! Plain-text edge lists and label files.
//!
//! Edge lists hold one edge per line as two whitespace-separated
//! non-negative integers. Lines starting with `#` or `%` are comments.
//! Node ids may be sparse; they are relabeled densely in ascending order.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Cleanup, EdgePolicy, SparseGraph};

#[derive(Debug, Clone)]
pub struct EdgeListFile {
    pub graph: SparseGraph,
    /// `original_ids[i]` is the id of dense node `i` in the input.
    pub original_ids: Vec<u64>,
    pub cleanup: Cleanup,
}

impl EdgeListFile {
    /// Dense index of an original id, if present.
    pub fn dense_index(&self, original: u64) -> Option<usize> {
        self.original_ids.binary_search(&original).ok()
    }
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#') || t.starts_with('%')
}

pub fn parse_edge_pairs<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if is_comment(&line) {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::MalformedEdge {
                line: idx + 1,
                reason: format!("missing {what} endpoint"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::MalformedEdge {
                line: idx + 1,
                reason: format!("'{tok}' is not a non-negative integer"),
            })
        };
        let a = next("first")?;
        let b = next("second")?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

pub fn read_edge_list<R: BufRead>(reader: R, policy: EdgePolicy) -> Result<EdgeListFile> {
    let raw = parse_edge_pairs(reader)?;
    let ids: BTreeSet<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    let original_ids: Vec<u64> = ids.into_iter().collect();
    let dense = |x: u64| original_ids.binary_search(&x).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (dense(a), dense(b))).collect();
    let (graph, cleanup) =
        SparseGraph::from_edge_list_with_cleanup(&edges, Some(original_ids.len()), policy)?;
    Ok(EdgeListFile { graph, original_ids, cleanup })
}

pub fn write_edge_list<W: Write>(g: &SparseGraph, mut w: W) -> Result<()> {
    for (a, b) in g.to_edge_list() {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

/// Label files come in two flavours: one integer per line (positional) or
/// `node_id label` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelFile {
    Positional(Vec<usize>),
    Keyed(Vec<(u64, usize)>),
}

pub fn read_labels<R: BufRead>(reader: R) -> Result<LabelFile> {
    let mut positional = Vec::new();
    let mut keyed = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if is_comment(&line) {
            continue;
        }
        let bad = |tok: &str| Error::MalformedEdge {
            line: idx + 1,
            reason: format!("'{tok}' is not a non-negative integer label"),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [l] => positional.push(l.parse::<usize>().map_err(|_| bad(l))?),
            [id, l] => keyed.push((
                id.parse::<u64>().map_err(|_| bad(id))?,
                l.parse::<usize>().map_err(|_| bad(l))?,
            )),
            _ => {
                return Err(Error::MalformedEdge {
                    line: idx + 1,
                    reason: "expected `label` or `node_id label`".into(),
                })
            }
        }
    }
    match (positional.is_empty(), keyed.is_empty()) {
        (_, true) => Ok(LabelFile::Positional(positional)),
        (true, false) => Ok(LabelFile::Keyed(keyed)),
        (false, false) => Err(Error::MalformedEdge {
            line: 0,
            reason: "label file mixes positional and keyed lines".into(),
        }),
    }
}

impl LabelFile {
    /// Labels for the dense nodes of `file`. Positional files are indexed by
    /// original id.
    pub fn align(&self, file: &EdgeListFile) -> Result<Vec<usize>> {
        let n = file.graph.n();
        match self {
            LabelFile::Positional(labels) => file
                .original_ids
                .iter()
                .map(|&id| {
                    labels.get(id as usize).copied().ok_or(Error::IndexOutOfRange {
                        index: id as usize,
                        n: labels.len(),
                    })
                })
                .collect(),
            LabelFile::Keyed(pairs) => {
                let mut out = vec![None; n];
                for &(id, l) in pairs {
                    if let Some(i) = file.dense_index(id) {
                        out[i] = Some(l);
                    }
                }
                out.iter()
                    .enumerate()
                    .map(|(i, l)| {
                        l.ok_or(Error::MalformedEdge {
                            line: 0,
                            reason: format!("no label for node {}", file.original_ids[i]),
                        })
                    })
                    .collect()
            }
        }
    }
}

pub fn write_positional_labels<W: Write>(labels: &[usize], mut w: W) -> Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

pub fn write_keyed_labels<W: Write>(ids: &[u64], labels: &[usize], mut w: W) -> Result<()> {
    for (id, l) in ids.iter().zip(labels) {
        writeln!(w, "{id} {l}")?;
    }
    Ok(())
}
