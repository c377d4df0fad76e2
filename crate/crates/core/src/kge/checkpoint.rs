//! Binary layout, all integers little-endian:
//!
//! ```text
//! magic  b"RKGE"          4 bytes
//! version u32
//! scorer  u8             0 = TransE, 1 = ComplEx
//! k       u32
//! n_ent   u32, then n_ent × (u32 length, UTF-8 name)
//! n_rel   u32, then n_rel × (u32 length, UTF-8 name)
//! config  u32 length, JSON TrainConfig
//! entity vectors   n_ent × width × f64
//! relation vectors n_rel × width × f64
//! ```
//!
//! `width` is k for TransE and 2k for ComplEx, whose vectors interleave
//! `(re, im)` per component.

use std::path::Path;

use super::{EmbeddingTable, Scorer, TrainConfig};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"RKGE";
pub const CHECKPOINT_VERSION: u32 = 1;

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    put_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

pub fn encode(table: &EmbeddingTable, cfg: &TrainConfig) -> Vec<u8> {
    let mut buf = Vec::with_capacity(64 + 8 * (table.entities.len() + table.relations.len()));
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    put_u32(&mut buf, CHECKPOINT_VERSION);
    buf.push(table.scorer().tag());
    put_u32(&mut buf, table.k() as u32);
    for names in [table.entity_names(), table.relation_names()] {
        put_u32(&mut buf, names.len() as u32);
        for n in names {
            put_str(&mut buf, n);
        }
    }
    put_str(&mut buf, &serde_json::to_string(cfg).expect("config serializes"));
    for x in table.entities.iter().chain(&table.relations) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Checkpoint("name is not UTF-8".into()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

pub fn decode(data: &[u8]) -> Result<(EmbeddingTable, TrainConfig)> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4).ok() != Some(CHECKPOINT_MAGIC.as_slice()) {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version}, expected {CHECKPOINT_VERSION}"
        )));
    }
    let tag = r.take(1)?[0];
    let scorer = Scorer::from_tag(tag).ok_or_else(|| Error::Checkpoint(format!("unknown scorer tag {tag}")))?;
    let k = r.u32()? as usize;
    let mut tables = Vec::with_capacity(2);
    for _ in 0..2 {
        let n = r.u32()? as usize;
        let names = (0..n).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
        tables.push(names);
    }
    let relation_names = tables.pop().expect("two tables");
    let entity_names = tables.pop().expect("two tables");
    let cfg: TrainConfig = serde_json::from_str(&r.string()?)
        .map_err(|e| Error::Checkpoint(format!("bad config record: {e}")))?;
    let w = scorer.width(k);
    let entities = r.f64s(entity_names.len() * w)?;
    let relations = r.f64s(relation_names.len() * w)?;
    if r.pos != data.len() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", data.len() - r.pos)));
    }
    let table = EmbeddingTable::from_parts(scorer, k, entity_names, relation_names, entities, relations)
        .map_err(|e| Error::Checkpoint(e.to_string()))?;
    Ok((table, cfg))
}

pub fn save_checkpoint(table: &EmbeddingTable, cfg: &TrainConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(table, cfg)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(EmbeddingTable, TrainConfig)> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&data)
}
