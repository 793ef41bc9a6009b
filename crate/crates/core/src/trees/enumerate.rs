use rayon::prelude::*;

use super::class::{Class, Literal};
use super::structure::{all_structures, Structure};
use crate::error::{domain, Error, Result};

/// Default largest size enumerated exhaustively.
pub const DEFAULT_ENUM_BUDGET: usize = 6;
/// Largest size accepted when the budget is raised explicitly.
pub const MAX_ENUM_BUDGET: usize = 7;

pub fn check_budget(n: usize, budget: usize) -> Result<()> {
    if n > budget.min(MAX_ENUM_BUDGET) {
        return Err(Error::Capacity(format!(
            "size {n} exceeds the enumeration budget {}",
            budget.min(MAX_ENUM_BUDGET)
        )));
    }
    Ok(())
}

/// Restricted-growth strings of length `n` with at most `k` blocks, in
/// lexicographic order.
pub fn partitions(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut rgs = vec![0u32; n];
    fn rec(i: usize, max: u32, k: usize, rgs: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        let top = (max + 1).min(k as u32 - 1);
        for b in 0..=top {
            rgs[i] = b;
            rec(i + 1, max.max(b), k, rgs, out);
        }
    }
    if n > 0 && k > 0 {
        rec(1, 0, k, &mut rgs, &mut out);
    }
    out
}

/// All canonical leaf labellings of `n` leaves over at most `k` blocks:
/// partitions in lexicographic order, then signs of the non-first
/// occurrences in binary counting order (leaf order, least significant
/// first).
pub fn labellings(n: usize, k: usize) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for rgs in partitions(n, k) {
        let mut first = vec![true; n];
        let mut seen = 0u32;
        for (i, &b) in rgs.iter().enumerate() {
            first[i] = b == seen;
            if b == seen {
                seen += 1;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !first[i]).collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut lits: Vec<Literal> = rgs.iter().map(|&b| Literal::pos(b)).collect();
            for (bit, &i) in free.iter().enumerate() {
                lits[i].negated = mask >> bit & 1 == 1;
            }
            out.push(lits);
        }
    }
    out
}

fn check_args(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return domain("need n >= 1 and k >= 1");
    }
    if k > n {
        return domain(format!("k ({k}) exceeds n ({n})"));
    }
    Ok(())
}

/// Every canonical class of size `n` over at most `k` blocks, structure
/// major.
pub fn enumerate_classes(n: usize, k: usize) -> Result<impl Iterator<Item = Class>> {
    check_args(n, k)?;
    let labels = labellings(n, k);
    Ok(all_structures(n)
        .into_iter()
        .flat_map(move |s| {
            let labels = labels.clone();
            labels.into_iter().map(move |l| Class::from_canonical(s.clone(), l))
        }))
}

/// Visits every class without materializing it.
pub fn for_each_class(n: usize, k: usize, mut f: impl FnMut(&Structure, &[Literal])) -> Result<()> {
    check_args(n, k)?;
    let labels = labellings(n, k);
    for s in all_structures(n) {
        for l in &labels {
            f(&s, l);
        }
    }
    Ok(())
}

/// Order-independent parallel fold over all classes, chunked by structure.
pub fn par_census<T, I, F, R>(n: usize, k: usize, init: I, fold: F, reduce: R) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &Structure, &[Literal]) + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    check_args(n, k)?;
    let labels = labellings(n, k);
    let structures = all_structures(n);
    Ok(structures
        .par_iter()
        .fold(&init, |mut acc, s| {
            for l in &labels {
                fold(&mut acc, s, l);
            }
            acc
        })
        .reduce(&init, &reduce))
}
