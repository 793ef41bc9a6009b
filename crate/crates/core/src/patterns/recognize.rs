use num_bigint::BigUint;

use super::lang::PatternLang;
use crate::error::{Error, Result};
use crate::trees::{eval_words, par_census, Class, Connective, Literal, Node, Structure};

/// Leaf ordinals joined to `root` by paths whose internal nodes all carry
/// `conn` (the pattern leaves of `S` for `Or`, of its dual for `And`).
pub(crate) fn path_leaves(s: &Structure, root: usize, conn: Connective) -> Vec<usize> {
    let base = s.first_leaf_index(root);
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        match s.nodes()[i] {
            Node::Leaf => out.push(s.first_leaf_index(i) - base),
            Node::Internal { conn: c, right } if c == conn => {
                stack.push(right as usize);
                stack.push(i + 1);
            }
            Node::Internal { .. } => {}
        }
    }
    out
}

fn has_complementary(lits: impl Iterator<Item = Literal>) -> bool {
    let mut seen: Vec<Literal> = lits.collect();
    seen.sort_unstable();
    seen.dedup();
    seen.windows(2).any(|w| w[0].block == w[1].block)
}

/// Whether some block occurs with both signs on `conn`-only paths from `root`.
pub(crate) fn simple_constant_at(s: &Structure, leaves: &[Literal], root: usize, conn: Connective) -> bool {
    let base = s.first_leaf_index(root);
    has_complementary(path_leaves(s, root, conn).into_iter().map(|l| leaves[base + l]))
}

pub fn is_simple_tautology(c: &Class) -> bool {
    simple_constant_at(c.structure(), c.leaves(), 0, Connective::Or)
}

pub fn is_simple_contradiction(c: &Class) -> bool {
    simple_constant_at(c.structure(), c.leaves(), 0, Connective::And)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimpleX {
    TypeT,
    TypeX,
    None,
}

impl std::fmt::Display for SimpleX {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimpleX::TypeT => "typeT",
            SimpleX::TypeX => "typeX",
            SimpleX::None => "none",
        })
    }
}

/// A single leaf joined at the root to a constant (type T) or to a subtree
/// absorbing it (type X). Type T is reported when both apply.
pub fn classify_simple_x(c: &Class) -> SimpleX {
    classify_simple_x_raw(c.structure(), c.leaves())
}

pub(crate) fn classify_simple_x_raw(s: &Structure, leaves: &[Literal]) -> SimpleX {
    let Some((conn, l, r)) = s.children(0) else {
        return SimpleX::None;
    };
    let mut found = SimpleX::None;
    for (leaf, sib) in [(l, r), (r, l)] {
        if !matches!(s.nodes()[leaf], Node::Leaf) {
            continue;
        }
        if simple_constant_at(s, leaves, sib, conn.dual()) {
            return SimpleX::TypeT;
        }
        let lit = leaves[s.first_leaf_index(leaf)];
        let base = s.first_leaf_index(sib);
        if path_leaves(s, sib, conn.dual()).into_iter().any(|i| leaves[base + i] == lit) {
            found = SimpleX::TypeX;
        }
    }
    found
}

pub fn repetitions(lang: &PatternLang, c: &Class) -> Result<usize> {
    repetitions_raw(lang, c.structure(), c.leaves())
}

pub(crate) fn repetitions_raw(lang: &PatternLang, s: &Structure, leaves: &[Literal]) -> Result<usize> {
    let d = lang.decompose(s)?;
    let mut blocks: Vec<u32> = d.pattern_leaves.iter().map(|&(i, _)| leaves[i].block).collect();
    let total = blocks.len();
    blocks.sort_unstable();
    blocks.dedup();
    Ok(total - blocks.len())
}

/// Pattern leaves labelled from `gamma` plus repetitions.
pub fn restrictions(lang: &PatternLang, c: &Class, gamma: &[u32]) -> Result<usize> {
    let d = lang.decompose(c.structure())?;
    let in_gamma = d
        .pattern_leaves
        .iter()
        .filter(|&&(i, _)| gamma.contains(&c.leaves()[i].block))
        .count();
    Ok(in_gamma + repetitions(lang, c)?)
}

/// Number of classes of size `n` over at most `k` blocks with exactly `r`
/// repetitions, for every `r` (index = `r`).
pub fn repetition_distribution(n: usize, k: usize, lang: &PatternLang) -> Result<Vec<BigUint>> {
    // decompositions depend only on the structure; check once up front
    for s in crate::trees::all_structures(n) {
        lang.decompose(&s)?;
    }
    let counts = par_census(
        n,
        k,
        || vec![0u64; n],
        |acc, s, l| {
            let r = repetitions_raw(lang, s, l).expect("checked above");
            acc[r] += 1;
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// `(T_r, T_{>=r})`: classes with exactly / at least `r` repetitions.
pub fn census(n: usize, k: usize, lang: &PatternLang, r: usize) -> Result<(BigUint, BigUint)> {
    let dist = repetition_distribution(n, k, lang)?;
    let zero = BigUint::from(0u32);
    let exact = dist.get(r).cloned().unwrap_or_else(|| zero.clone());
    let ge = dist.iter().skip(r).fold(zero, |a, b| a + b);
    Ok((exact, ge))
}

/// CSV rows `n,k,lang,r,count_exact,count_ge,total` for `r` in `rs`.
pub fn census_csv(n: usize, k: usize, lang: &PatternLang, rs: &[usize]) -> Result<String> {
    let dist = repetition_distribution(n, k, lang)?;
    let total: BigUint = dist.iter().sum();
    let mut out = String::from("n,k,lang,r,count_exact,count_ge,total\n");
    for &r in rs {
        let exact = dist.get(r).cloned().unwrap_or_default();
        let ge: BigUint = dist.iter().skip(r).sum();
        out.push_str(&format!("{n},{k},{lang},{r},{exact},{ge},{total}\n"));
    }
    Ok(out)
}

/// Tautologies of size `n` over at most `k` blocks with no repetition in
/// `lang`. Needs `k <= 6`.
pub fn tautologies_without_repetition(n: usize, k: usize, lang: &PatternLang) -> Result<Vec<Class>> {
    if k > 6 {
        return Err(Error::Capacity(format!("tautology check needs k <= 6 (got {k})")));
    }
    for s in crate::trees::all_structures(n) {
        lang.decompose(&s)?;
    }
    par_census(
        n,
        k,
        Vec::new,
        |acc, s, l| {
            if eval_words(s, l, |b| PROJECTIONS[b as usize]) == u64::MAX
                && repetitions_raw(lang, s, l).expect("checked above") == 0
            {
                acc.push(Class::from_canonical(s.clone(), l.to_vec()));
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// Block `b` as a word over all 64 assignments of six variables.
const PROJECTIONS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

/// Number of simple-tautology classes of size `n` over at most `k` blocks.
pub fn st_count_exact(n: usize, k: usize) -> Result<BigUint> {
    let c = par_census(
        n,
        k,
        || 0u64,
        |acc, s, l| *acc += simple_constant_at(s, l, 0, Connective::Or) as u64,
        |a, b| a + b,
    )?;
    Ok(BigUint::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::count_classes;
    use crate::patterns::{Production, Role};
    use crate::trees::{enumerate_classes, truth_table};

    const FIG1_LEFT: &str = "(((1:+ | (1:- | 2:+)) | 3:+) | (4:+ & 1:+))";
    const NESTED_TAUT: &str = "((1:+ & 2:+) | ((3:+ | 1:-) | 1:+))";

    fn cls(s: &str) -> Class {
        s.parse().unwrap()
    }

    #[test]
    fn figure_counts() {
        let c = cls(FIG1_LEFT);
        let n = PatternLang::n();
        assert_eq!(repetitions(&n, &c).unwrap(), 1);
        assert_eq!(restrictions(&n, &c, &[1]).unwrap(), 2);
        assert_eq!(repetitions(&n, &cls("((1:+ | 1:+) | 1:+)")).unwrap(), 2);
        assert_eq!(restrictions(&n, &cls("((1:+ | 2:+) | 1:+)"), &[1]).unwrap(), 2);
        assert_eq!(restrictions(&n, &cls("((1:+ | 2:+) | 3:+)"), &[]).unwrap(), 0);
        assert_eq!(repetitions(&n, &cls("((1:+ & 1:+) & 1:+)")).unwrap(), 0);
    }

    #[test]
    fn simple_constants() {
        assert!(is_simple_tautology(&cls("(1:+ | 1:-)")));
        assert!(is_simple_tautology(&cls(NESTED_TAUT)));
        assert!(!is_simple_tautology(&cls("(1:+ & 1:-)")));
        assert!(is_simple_contradiction(&cls("(1:+ & 1:-)")));
        assert!(!is_simple_contradiction(&cls("(1:+ | 1:-)")));
        assert!(is_simple_contradiction(&cls(NESTED_TAUT).dual()));
        assert!(!is_simple_tautology(&Class::single()));
    }

    #[test]
    fn simple_x_shapes() {
        assert_eq!(classify_simple_x(&cls("(1:+ & (2:+ | 2:-))")), SimpleX::TypeT);
        assert_eq!(classify_simple_x(&cls("(1:+ | (1:+ & 2:+))")), SimpleX::TypeX);
        assert_eq!(classify_simple_x(&cls("((1:+ | 2:+) & 1:+)")), SimpleX::TypeX);
        assert_eq!(classify_simple_x(&cls("(1:+ | 2:+)")), SimpleX::None);
        assert_eq!(classify_simple_x(&cls("(1:+ | (1:- & 2:+))")), SimpleX::None);
        assert_eq!(classify_simple_x(&Class::single()), SimpleX::None);
    }

    #[test]
    fn simple_x_hand_counts() {
        let tally = |n, k| {
            let (mut t, mut x) = (0, 0);
            for c in enumerate_classes(n, k).unwrap() {
                match classify_simple_x(&c) {
                    SimpleX::TypeT => t += 1,
                    SimpleX::TypeX => x += 1,
                    SimpleX::None => {}
                }
            }
            (t, x)
        };
        assert_eq!(tally(2, 2), (0, 2));
        assert_eq!(tally(3, 3), (12, 12));
    }

    #[test]
    fn recognizers_are_sound() {
        for n in 1..=5 {
            for c in enumerate_classes(n, n).unwrap() {
                let t = truth_table(&c).unwrap();
                if is_simple_tautology(&c) {
                    assert!(t.is_all(true), "{c}");
                }
                if is_simple_contradiction(&c) {
                    assert!(t.is_all(false), "{c}");
                }
                let v = t.essential_vars();
                match classify_simple_x(&c) {
                    SimpleX::None => {}
                    _ => assert_eq!(v.len(), 1, "{c}"),
                }
            }
        }
    }

    #[test]
    fn census_examples() {
        let n = PatternLang::n();
        assert_eq!(census(2, 2, &n, 1).unwrap().0, BigUint::from(2u32));
        for (nn, k) in [(3, 2), (4, 4)] {
            let total = count_classes(nn as u64, k as u64).unwrap();
            assert_eq!(census(nn, k, &n, 0).unwrap().1, total);
            let dist = repetition_distribution(nn, k, &n).unwrap();
            assert_eq!(dist.iter().sum::<BigUint>(), total);
        }
        let csv = census_csv(2, 2, &n, &[0, 1]).unwrap();
        assert_eq!(csv.lines().nth(2), Some("2,2,N,1,2,2,6"));
    }

    #[test]
    fn st_counts() {
        assert_eq!(st_count_exact(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(st_count_exact(1, 1).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn placeholder_side_symmetric() {
        use Role::*;
        let left = PatternLang::grammar(
            "N'",
            vec![
                Production { conn: Connective::Or, left: Recurse, right: Recurse },
                Production { conn: Connective::And, left: Placeholder, right: Recurse },
            ],
        );
        for n in 1..=5 {
            assert_eq!(
                repetition_distribution(n, n, &left).unwrap(),
                repetition_distribution(n, n, &PatternLang::n()).unwrap()
            );
        }
    }

    #[test]
    fn parallel_exception_scan_agrees() {
        let nn = PatternLang::n_pow(2).unwrap();
        for n in 1..=5 {
            assert!(tautologies_without_repetition(n, n, &nn).unwrap().is_empty());
        }
        // the or at the root of x or not x leaves no pattern leaves under S~
        let none = tautologies_without_repetition(2, 2, &PatternLang::s_dual()).unwrap();
        assert_eq!(none.len(), 1);
        assert!(tautologies_without_repetition(7, 7, &nn).is_err());
    }

    #[test]
    fn tautologies_have_nested_repetition() {
        let nn = PatternLang::n_pow(2).unwrap();
        for n in 1..=5 {
            for c in enumerate_classes(n, n).unwrap() {
                if truth_table(&c).unwrap().is_all(true) {
                    assert!(repetitions(&nn, &c).unwrap() >= 1, "{c}");
                }
            }
        }
    }
}
