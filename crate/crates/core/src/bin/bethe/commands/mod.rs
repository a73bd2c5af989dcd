pub mod benchmark;
pub mod cluster;
pub mod generate;
pub mod score;
pub mod spectrum;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use bethe_core::io::{read_edge_list, read_labels, EdgeListFile};
use bethe_core::{EdgePolicy, Error, Result};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn other<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_graph(path: &Path, lenient: bool) -> Result<EdgeListFile> {
    let policy = if lenient { EdgePolicy::Lenient } else { EdgePolicy::Strict };
    read_edge_list(open(path)?, policy)
}

/// Labels aligned with the dense nodes of `file`.
pub fn load_labels(path: &Path, file: &EdgeListFile) -> Result<Vec<usize>> {
    read_labels(open(path)?)?.align(file)
}

/// Pretty JSON to `path`, or to stdout when absent.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            serde_json::to_writer_pretty(&mut w, value).map_err(other)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            serde_json::to_writer_pretty(&mut w, value).map_err(other)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn write_csv<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r).map_err(other)?;
    }
    w.flush()?;
    Ok(())
}
