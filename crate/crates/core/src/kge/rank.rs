use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{CorruptSide, EmbeddingTable};
use crate::error::Result;
use crate::kg::{EntityId, IdTriple, Triple};

/// Filtered ranks. Ties take the average rank `1 + greater + equal/2`; the
/// optimistic (`1 + greater`) and pessimistic (`1 + greater + equal`) ranks
/// are kept alongside. With `CorruptSide::Both` each test triple contributes a
/// head rank then a tail rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub mrr: f64,
    pub mean_rank: f64,
    pub hits_at_1: f64,
    pub hits_at_3: f64,
    pub hits_at_10: f64,
    pub ranks: Vec<f64>,
    pub optimistic_ranks: Vec<usize>,
    pub pessimistic_ranks: Vec<usize>,
}

impl RankReport {
    fn from_ranks(triples: Vec<(usize, usize)>) -> Self {
        let n = triples.len().max(1) as f64;
        let ranks: Vec<f64> = triples
            .iter()
            .map(|&(g, e)| 1.0 + g as f64 + e as f64 / 2.0)
            .collect();
        let hits = |k: f64| ranks.iter().filter(|r| **r <= k).count() as f64 / n;
        Self {
            mrr: ranks.iter().map(|r| 1.0 / r).sum::<f64>() / n,
            mean_rank: ranks.iter().sum::<f64>() / n,
            hits_at_1: hits(1.0),
            hits_at_3: hits(3.0),
            hits_at_10: hits(10.0),
            optimistic_ranks: triples.iter().map(|&(g, _)| 1 + g).collect(),
            pessimistic_ranks: triples.iter().map(|&(g, e)| 1 + g + e).collect(),
            ranks,
        }
    }

    pub fn optimistic_mrr(&self) -> f64 {
        mean_reciprocal(&self.optimistic_ranks)
    }

    pub fn pessimistic_mrr(&self) -> f64 {
        mean_reciprocal(&self.pessimistic_ranks)
    }
}

fn mean_reciprocal(r: &[usize]) -> f64 {
    r.iter().map(|&x| 1.0 / x as f64).sum::<f64>() / r.len().max(1) as f64
}

/// `(greater, equal)` counts among filtered corruptions on one side.
fn side_counts(
    table: &EmbeddingTable,
    t: &IdTriple,
    head_side: bool,
    filter: &HashSet<IdTriple>,
) -> (usize, usize) {
    let target = table.score_ids(t);
    let mut greater = 0;
    let mut equal = 0;
    for e in 0..table.num_entities() as u32 {
        let e = EntityId(e);
        let c = if head_side {
            IdTriple { head: e, ..*t }
        } else {
            IdTriple { tail: e, ..*t }
        };
        if c == *t || filter.contains(&c) {
            continue;
        }
        let s = table.score_ids(&c);
        if s > target {
            greater += 1;
        } else if s == target {
            equal += 1;
        }
    }
    (greater, equal)
}

/// Parallel over chunks of `chunk` test triples; results do not depend on
/// the chunk size.
pub fn evaluate_ranks_ids(
    table: &EmbeddingTable,
    test: &[IdTriple],
    filter: &HashSet<IdTriple>,
    side: CorruptSide,
    chunk: usize,
) -> RankReport {
    let sides: &[bool] = match side {
        CorruptSide::Head => &[true],
        CorruptSide::Tail => &[false],
        CorruptSide::Both => &[true, false],
    };
    let counts: Vec<(usize, usize)> = test
        .par_chunks(chunk.max(1))
        .flat_map_iter(|c| {
            c.iter()
                .flat_map(|t| sides.iter().map(move |&s| side_counts(table, t, s, filter)))
                .collect::<Vec<_>>()
        })
        .collect();
    RankReport::from_ranks(counts)
}

/// `known` is the filter set of true triples; triples over symbols the table
/// has never seen are ignored in it.
pub fn evaluate_ranks(
    table: &EmbeddingTable,
    test: &[Triple],
    known: &[Triple],
    side: CorruptSide,
) -> Result<RankReport> {
    let ids = test.iter().map(|t| table.to_ids(t)).collect::<Result<Vec<_>>>()?;
    let filter: HashSet<IdTriple> = known.iter().filter_map(|t| table.to_ids(t).ok()).collect();
    Ok(evaluate_ranks_ids(table, &ids, &filter, side, 100))
}
