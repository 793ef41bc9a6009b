use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;

use super::class::{Class, Literal};
use super::enumerate::{check_budget, par_census, DEFAULT_ENUM_BUDGET};
use super::function::{FunctionKey, KeyCache, MAX_KEY_VARS};
use super::structure::Structure;
use crate::combinatorics::count_classes;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasEntry {
    /// Minimal number of leaves.
    pub size: usize,
    /// A minimal class; `None` for the constants, which need no leaf.
    pub witness: Option<Class>,
}

/// Minimal tree sizes of every function realized up to `exhausted_up_to`.
#[derive(Debug, Clone)]
pub struct ComplexityAtlas {
    entries: HashMap<FunctionKey, AtlasEntry>,
    exhausted_up_to: usize,
}

impl ComplexityAtlas {
    pub fn get(&self, key: &FunctionKey) -> Option<&AtlasEntry> {
        self.entries.get(key)
    }

    /// `L(f)`.
    pub fn complexity(&self, key: &FunctionKey) -> Option<usize> {
        self.get(key).map(|e| e.size)
    }

    /// `L(f) - E(f)`.
    pub fn multiplicity(&self, key: &FunctionKey) -> Option<usize> {
        self.complexity(key).map(|l| l - key.essential())
    }

    pub fn exhausted_up_to(&self) -> usize {
        self.exhausted_up_to
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by `(L, key)`.
    pub fn sorted(&self) -> Vec<(FunctionKey, &AtlasEntry)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, e)| (*k, e)).collect();
        v.sort_by_key(|a| (a.1.size, a.0));
        v
    }
}

fn key_of(cache: &mut KeyCache, s: &Structure, l: &[Literal]) -> FunctionKey {
    cache.key_of_class(&Class::from_canonical(s.clone(), l.to_vec())).expect("at most 6 blocks")
}

/// Exhaustive atlas over sizes `1..=max_size` with the default budget.
pub fn build_atlas(max_size: usize) -> Result<ComplexityAtlas> {
    build_atlas_with_budget(max_size, DEFAULT_ENUM_BUDGET)
}

pub fn build_atlas_with_budget(max_size: usize, budget: usize) -> Result<ComplexityAtlas> {
    check_budget(max_size, budget)?;
    let mut entries = HashMap::new();
    for key in [FunctionKey::TRUE, FunctionKey::FALSE] {
        entries.insert(key, AtlasEntry { size: 0, witness: None });
    }
    for n in 1..=max_size {
        // 7 blocks on 7 leaves is read-once with 7 essential variables
        let k = n.min(MAX_KEY_VARS);
        // rayon keeps chunk order in `reduce`, so witnesses are the first
        // minimal class in enumeration order
        let found: BTreeMap<FunctionKey, Class> = par_census(
            n,
            k,
            || (KeyCache::new(), BTreeMap::new()),
            |(cache, seen), s, l| {
                let key = key_of(cache, s, l);
                seen.entry(key).or_insert_with(|| Class::from_canonical(s.clone(), l.to_vec()));
            },
            |mut a, b| {
                for (k, v) in b.1 {
                    a.1.entry(k).or_insert(v);
                }
                a
            },
        )?
        .1;
        for (key, witness) in found {
            entries.entry(key).or_insert(AtlasEntry {
                size: n,
                witness: Some(witness),
            });
        }
    }
    Ok(ComplexityAtlas {
        entries,
        exhausted_up_to: max_size,
    })
}

/// Number of classes of size `n` over at most `k` blocks computing each
/// function.
pub fn key_census(n: usize, k: usize, budget: usize) -> Result<HashMap<FunctionKey, u64>> {
    check_budget(n, budget)?;
    par_census(
        n,
        k,
        || (KeyCache::new(), HashMap::new()),
        |(cache, counts), s, l| {
            *counts.entry(key_of(cache, s, l)).or_insert(0u64) += 1;
        },
        |mut a, b| {
            for (k, v) in b.1 {
                *a.1.entry(k).or_insert(0) += v;
            }
            a
        },
    )
    .map(|r| r.1)
}

/// Exact `P_n<f>` by enumeration.
pub fn class_probability_exact(n: usize, k: usize, key: &FunctionKey) -> Result<BigRational> {
    class_probability_exact_with_budget(n, k, key, DEFAULT_ENUM_BUDGET)
}

pub fn class_probability_exact_with_budget(
    n: usize,
    k: usize,
    key: &FunctionKey,
    budget: usize,
) -> Result<BigRational> {
    check_budget(n, budget)?;
    let hits = par_census(
        n,
        k,
        || (KeyCache::new(), 0u64),
        |(cache, c), s, l| {
            if key_of(cache, s, l) == *key {
                *c += 1;
            }
        },
        |a, b| (a.0, a.1 + b.1),
    )?
    .1;
    let total = count_classes(n as u64, k as u64)?;
    Ok(BigRational::new(BigUint::from(hits).into(), total.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn key(s: &str) -> FunctionKey {
        super::super::function::class_key(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn small_atlas() {
        let atlas = build_atlas(4).unwrap();
        assert_eq!(atlas.complexity(&FunctionKey::TRUE), Some(0));
        assert_eq!(atlas.complexity(&FunctionKey::FALSE), Some(0));
        assert!(atlas.get(&FunctionKey::TRUE).unwrap().witness.is_none());
        assert_eq!(atlas.complexity(&FunctionKey::PROJECTION), Some(1));
        let and = key("(1:+ & 2:+)");
        assert_eq!(atlas.complexity(&and), Some(2));
        assert_eq!(atlas.multiplicity(&and), Some(0));
        let xor = key("((1:+ & 2:-) | (1:- & 2:+))");
        assert_eq!(atlas.complexity(&xor), Some(4));
        assert_eq!(atlas.multiplicity(&xor), Some(2));
        for (k, e) in atlas.sorted() {
            assert!(k.essential() <= e.size);
            if let Some(w) = &e.witness {
                assert_eq!(w.size(), e.size);
                assert_eq!(super::super::function::class_key(w).unwrap(), k);
            }
        }
        assert!(build_atlas(7).is_err());
    }

    #[test]
    fn exact_probabilities() {
        let p = class_probability_exact(2, 2, &FunctionKey::TRUE).unwrap();
        assert_eq!(p, BigRational::new(1.into(), 6.into()));
        let p = class_probability_exact(2, 2, &FunctionKey::FALSE).unwrap();
        assert_eq!(p, BigRational::new(1.into(), 6.into()));
        assert!(class_probability_exact(1, 1, &FunctionKey::PROJECTION).unwrap().is_one());
        assert!(class_probability_exact(8, 2, &FunctionKey::TRUE).is_err());
        for n in 1..=4usize {
            let census = key_census(n, n, DEFAULT_ENUM_BUDGET).unwrap();
            let total: u64 = census.values().sum();
            let sum = census
                .keys()
                .map(|k| class_probability_exact(n, n, k).unwrap())
                .fold(BigRational::zero(), |a, b| a + b);
            assert!(sum.is_one());
            assert_eq!(
                BigUint::from(total),
                count_classes(n as u64, n as u64).unwrap()
            );
        }
    }
}
