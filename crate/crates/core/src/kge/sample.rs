use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::CorruptSide;
use crate::error::{Error, Result};
use crate::kg::{EntityId, IdTriple, Triple, TripleStore};

fn replace(t: &IdTriple, head_side: bool, e: EntityId) -> IdTriple {
    if head_side {
        IdTriple { head: e, ..*t }
    } else {
        IdTriple { tail: e, ..*t }
    }
}

/// `n` distinct corruptions of `t`, uniform over the valid candidates: each
/// replaces exactly the head or the tail with another entity and is not a
/// known triple. Rejection sampling first, enumeration when the valid pool is
/// sparse.
pub fn corrupt_ids<R: Rng + ?Sized, F: Fn(&IdTriple) -> bool>(
    t: &IdTriple,
    n: usize,
    num_entities: usize,
    side: CorruptSide,
    is_known: F,
    rng: &mut R,
) -> Result<Vec<IdTriple>> {
    let valid = |c: &IdTriple| c != t && !is_known(c);
    let pick_side = |rng: &mut R| match side {
        CorruptSide::Head => true,
        CorruptSide::Tail => false,
        CorruptSide::Both => rng.random_bool(0.5),
    };
    let mut out = Vec::with_capacity(n);
    let mut seen = HashSet::with_capacity(n);
    let budget = 64 + 20 * n;
    for _ in 0..budget {
        if out.len() == n {
            return Ok(out);
        }
        let head_side = pick_side(rng);
        let e = EntityId(rng.random_range(0..num_entities as u32));
        let c = replace(t, head_side, e);
        if valid(&c) && seen.insert(c) {
            out.push(c);
        }
    }
    if out.len() == n {
        return Ok(out);
    }
    let sides: &[bool] = match side {
        CorruptSide::Head => &[true],
        CorruptSide::Tail => &[false],
        CorruptSide::Both => &[true, false],
    };
    let pool: Vec<IdTriple> = sides
        .iter()
        .flat_map(|&s| (0..num_entities as u32).map(move |e| replace(t, s, EntityId(e))))
        .filter(|c| valid(c))
        .collect();
    if pool.len() < n {
        return Err(Error::CorruptionPool {
            requested: n,
            available: pool.len(),
        });
    }
    let rest: Vec<IdTriple> = pool.into_iter().filter(|c| !seen.contains(c)).collect();
    out.extend(rest.choose_multiple(rng, n - out.len()).copied());
    Ok(out)
}

/// Head-or-tail corruptions of a named triple, filtered against `store`.
pub fn corrupt<R: Rng + ?Sized>(
    t: &Triple,
    store: &TripleStore,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Triple>> {
    if n == 0 {
        return Err(Error::InvalidInput("corruption count must be at least 1".into()));
    }
    let ids = store.to_ids(t)?;
    let out = corrupt_ids(
        &ids,
        n,
        store.entity_names().len(),
        CorruptSide::Both,
        |c| store.contains_ids(c),
        rng,
    )?;
    Ok(out.iter().map(|c| store.resolve(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    #[test]
    fn two_entities_single_corruption() {
        // <a,R,b> can only become <a,R,a> or <b,R,b>; make one of them known.
        let store = TripleStore::from_triples(&[Triple::new("a", "R", "b"), Triple::new("b", "R", "b")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = corrupt(&Triple::new("a", "R", "b"), &store, 1, &mut rng).unwrap();
        assert_eq!(c, [Triple::new("a", "R", "a")]);
        let err = corrupt(&Triple::new("a", "R", "b"), &store, 2, &mut rng).unwrap_err();
        assert!(matches!(err, Error::CorruptionPool { requested: 2, available: 1 }));
    }

    #[test]
    fn corruptions_are_distinct_valid_and_one_sided() {
        let triples: Vec<Triple> = (0..10)
            .map(|i| Triple::new(format!("e{i}"), "R", format!("e{}", (i + 1) % 10)))
            .collect();
        let store = TripleStore::from_triples(&triples).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in &triples {
            let c = corrupt(t, &store, 15, &mut rng).unwrap();
            let set: HashSet<_> = c.iter().collect();
            assert_eq!(set.len(), 15);
            for x in &c {
                assert_ne!(x, t);
                assert!(!store.contains(x));
                let diffs = usize::from(x.head != t.head) + usize::from(x.tail != t.tail);
                assert_eq!(diffs, 1);
                assert_eq!(x.relation, t.relation);
            }
        }
    }

    #[test]
    fn draws_are_uniform_over_candidates() {
        let triples: Vec<Triple> = (0..6)
            .map(|i| Triple::new(format!("e{i}"), "R", format!("e{}", (i + 2) % 6)))
            .collect();
        let store = TripleStore::from_triples(&triples).unwrap();
        let t = &triples[0];
        // Oracle: enumerate every head/tail replacement not in the store.
        let mut candidates = HashSet::new();
        for e in store.entity_names() {
            for c in [Triple::new(e, "R", &t.tail), Triple::new(&t.head, "R", e)] {
                if !store.contains(&c) {
                    candidates.insert(c);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 10_000;
        let mut counts: HashMap<Triple, usize> = HashMap::new();
        for _ in 0..draws {
            let c = corrupt(t, &store, 1, &mut rng).unwrap().remove(0);
            assert!(candidates.contains(&c));
            *counts.entry(c).or_default() += 1;
        }
        let expected = draws as f64 / candidates.len() as f64;
        let chi2: f64 = candidates
            .iter()
            .map(|c| {
                let o = *counts.get(c).unwrap_or(&0) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        let dof = (candidates.len() - 1) as f64;
        let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.999);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
    }

    #[test]
    fn enumeration_fallback_is_exact() {
        // Dense store: only a few candidates survive filtering.
        let names = ["a", "b", "c"];
        let mut triples = Vec::new();
        for h in names {
            for t in names {
                if !(h == "a" && t == "c") && !(h == "c" && t == "b") {
                    triples.push(Triple::new(h, "R", t));
                }
            }
        }
        let store = TripleStore::from_triples(&triples).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // <a,R,b>: tail -> c gives <a,R,c>; head -> c gives <c,R,b>.
        let c: HashSet<Triple> = corrupt(&Triple::new("a", "R", "b"), &store, 2, &mut rng)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(
            c,
            HashSet::from([Triple::new("a", "R", "c"), Triple::new("c", "R", "b")])
        );
    }
}
