//! Triple files: UTF-8, `head<TAB>relation<TAB>tail`, LF endings, no header.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kg::{Triple, TripleStore};

/// Writes triples in the order given.
pub fn write_triples<W: Write>(mut w: W, triples: &[Triple]) -> std::io::Result<()> {
    for t in triples {
        writeln!(w, "{}\t{}\t{}", t.head, t.relation, t.tail)?;
    }
    w.flush()
}

pub fn read_triples<R: Read>(r: R, context: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            context: context.into(),
            line: line_no,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [head, relation, tail] = fields.as_slice() else {
            return Err(Error::Parse {
                context: context.into(),
                line: line_no,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        out.push(Triple::new(*head, *relation, *tail));
    }
    Ok(out)
}

/// Writes the store sorted lexicographically so files are stable.
pub fn export_triples(store: &TripleStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_triples(BufWriter::new(file), &store.sorted_triples()).map_err(|e| Error::io(path, e))
}

pub fn import_triples(path: impl AsRef<Path>) -> Result<TripleStore> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let triples = read_triples(file, &path.display().to_string())?;
    TripleStore::from_triples(&triples)
}
