use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default chunk size in whitespace tokens.
pub const DEFAULT_CHUNK_TOKENS: usize = 384;

/// Token and byte span of a chunk inside its document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRef {
    pub first_token: usize,
    pub byte_start: usize,
    pub byte_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: String,
    pub text: String,
    pub tokens: usize,
    pub source: SourceRef,
}

pub fn chunk_id(i: usize) -> String {
    format!("chunk-{i:04}")
}

/// Splits on whitespace tokens. Each chunk runs from the start of its first
/// token (the document start for the first chunk) to the start of the next
/// chunk, so concatenating chunk texts gives back the document.
pub fn chunk_corpus(doc: &str, size: usize) -> Result<Vec<Chunk>> {
    if size == 0 {
        return Err(Error::InvalidInput("chunk size must be at least 1".into()));
    }
    let starts: Vec<usize> = doc
        .char_indices()
        .filter(|&(i, c)| !c.is_whitespace() && doc[..i].chars().next_back().is_none_or(char::is_whitespace))
        .map(|(i, _)| i)
        .collect();
    if starts.is_empty() {
        return Err(Error::InvalidInput("cannot chunk an empty document".into()));
    }
    let groups: Vec<&[usize]> = starts.chunks(size).collect();
    let mut out = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter().enumerate() {
        let byte_start = if i == 0 { 0 } else { g[0] };
        let byte_end = groups.get(i + 1).map_or(doc.len(), |next| next[0]);
        out.push(Chunk {
            id: chunk_id(i),
            text: doc[byte_start..byte_end].to_string(),
            tokens: g.len(),
            source: SourceRef {
                first_token: i * size,
                byte_start,
                byte_end,
            },
        });
    }
    Ok(out)
}
