use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Chunk;
use crate::error::{Error, Result};

pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Produces embedding vectors of a fixed dimension.
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>>;
}

pub(crate) fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Signed feature hashing of lower-cased alphanumeric words and word
/// bigrams. Platform independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashingEmbedder {
    pub dim: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        Self { dim: 256 }
    }
}

impl HashingEmbedder {
    fn one(&self, text: &str) -> Result<Vec<f64>> {
        let words: Vec<String> = text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        if words.is_empty() {
            return Err(Error::InvalidInput(format!("nothing to embed in {text:?}")));
        }
        let mut v = vec![0.0; self.dim];
        let mut add = |feature: &str| {
            let h = fnv1a(feature.as_bytes());
            let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
            v[(h % self.dim as u64) as usize] += sign;
        };
        for w in &words {
            add(w);
        }
        for pair in words.windows(2) {
            add(&format!("{} {}", pair[0], pair[1]));
        }
        // All features can cancel in tiny dimensions.
        if v.iter().all(|x| *x == 0.0) {
            v[0] = 1.0;
        }
        normalize(v)
    }
}

impl Embedder for HashingEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        texts.iter().map(|t| self.one(t)).collect()
    }
}

/// In-memory exact-search store of unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorStore {
    ids: Vec<String>,
    texts: Vec<String>,
    dim: usize,
    vectors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieved {
    pub id: String,
    pub text: String,
    pub similarity: f64,
}

impl VectorStore {
    /// Vectors are normalized on insertion.
    pub fn from_vectors(ids: Vec<String>, texts: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != vectors.len() || ids.len() != texts.len() {
            return Err(Error::InvalidInput("ids, texts and vectors differ in length".into()));
        }
        let dim = vectors.first().map_or(0, Vec::len);
        if dim == 0 && !vectors.is_empty() {
            return Err(Error::InvalidInput("zero-dimensional vectors".into()));
        }
        let mut flat = Vec::with_capacity(dim * vectors.len());
        for (id, v) in ids.iter().zip(vectors) {
            if v.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "vector `{id}` has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            flat.extend(normalize(v)?);
        }
        Ok(Self {
            ids,
            texts,
            dim,
            vectors: flat,
        })
    }

    pub fn build(chunks: &[Chunk], embedder: &dyn Embedder) -> Result<Self> {
        let texts: Vec<&str> = chunks.iter().map(|c| c.text.as_str()).collect();
        let vectors = embedder.embed(&texts)?;
        Self::from_vectors(
            chunks.iter().map(|c| c.id.clone()).collect(),
            chunks.iter().map(|c| c.text.clone()).collect(),
            vectors,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_unit(&self) -> bool {
        (0..self.len()).all(|i| {
            let n = self.vector(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            (n - 1.0).abs() <= UNIT_TOLERANCE
        })
    }
}

/// Exact top-`k` by cosine similarity, descending, ties by ascending id.
pub fn retrieve(store: &VectorStore, query: &[f64], k: usize) -> Result<Vec<Retrieved>> {
    if query.len() != store.dim() {
        return Err(Error::InvalidInput(format!(
            "query dimension {} does not match store dimension {}",
            query.len(),
            store.dim()
        )));
    }
    let q = normalize(query.to_vec())?;
    let mut sims: Vec<(usize, f64)> = (0..store.len())
        .into_par_iter()
        .map(|i| {
            let dot: f64 = store.vector(i).iter().zip(&q).map(|(a, b)| a * b).sum();
            (i, dot.clamp(-1.0, 1.0))
        })
        .collect();
    sims.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| store.ids[a.0].cmp(&store.ids[b.0])));
    sims.truncate(k);
    Ok(sims
        .into_iter()
        .map(|(i, similarity)| Retrieved {
            id: store.ids[i].clone(),
            text: store.texts[i].clone(),
            similarity,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_store(n: usize, dim: usize, seed: u64) -> (VectorStore, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let ids = (0..n).map(|i| format!("c{i:03}")).collect();
        let texts = vec![String::new(); n];
        (VectorStore::from_vectors(ids, texts, vs.clone()).unwrap(), vs)
    }

    fn brute_cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn matches_exhaustive_sort() {
        let (store, raw) = random_store(50, 16, 3);
        let query: Vec<f64> = raw[7].iter().map(|x| x + 0.3).collect();
        let got: Vec<String> = retrieve(&store, &query, 5).unwrap().into_iter().map(|r| r.id).collect();
        let mut all: Vec<(String, f64)> = raw
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("c{i:03}"), brute_cosine(v, &query)))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let want: Vec<String> = all.into_iter().take(5).map(|x| x.0).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn self_query_ranks_first() {
        let (store, raw) = random_store(20, 8, 4);
        let r = retrieve(&store, &raw[11], 1).unwrap();
        assert_eq!(r[0].id, "c011");
        assert!((r[0].similarity - 1.0).abs() < 1e-9);
        assert!(store.is_unit());
    }

    #[test]
    fn k_beyond_size_and_ties() {
        let ids = vec!["b".to_string(), "a".to_string()];
        let store = VectorStore::from_vectors(ids, vec![String::new(); 2], vec![vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let r = retrieve(&store, &[1.0, 0.0], 10).unwrap();
        assert_eq!(r.iter().map(|x| x.id.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn dimension_mismatch() {
        let (store, _) = random_store(3, 4, 0);
        assert!(retrieve(&store, &[1.0, 0.0], 1).is_err());
        assert!(VectorStore::from_vectors(
            vec!["x".into(), "y".into()],
            vec![String::new(); 2],
            vec![vec![1.0], vec![1.0, 2.0]]
        )
        .is_err());
    }

    #[test]
    fn hashing_embedder_is_stable_and_unit() {
        let e = HashingEmbedder { dim: 64 };
        let v = e.embed(&["The pedestrian is near the curb", "the PEDESTRIAN is near the curb!"]).unwrap();
        assert_eq!(v[0], v[1]);
        assert!((v[0].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(e.embed(&["  ,; "]).is_err());
        // FNV-1a reference value.
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn cosine_bounded() {
        let (store, _) = random_store(30, 5, 9);
        let q = [0.3, -0.2, 0.9, 0.0, 0.1];
        for r in retrieve(&store, &q, 30).unwrap() {
            assert!((-1.0..=1.0).contains(&r.similarity));
        }
    }
}
