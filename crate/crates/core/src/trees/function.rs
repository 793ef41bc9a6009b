//! Truth tables and canonical keys of Boolean functions up to renaming and
//! negation of variables.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::class::{eval_words, Class};
use crate::error::{Error, Result};

pub const DEFAULT_TABLE_CAP: usize = 20;
/// Keys are stored in one `u64`, so at most 6 essential variables.
pub const MAX_KEY_VARS: usize = 6;

/// Value of variable `j < 6` across the 64 assignments of one word.
pub(crate) const PROJ: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn width_mask(vars: usize) -> u64 {
    if vars >= 6 {
        !0
    } else {
        (1u64 << (1 << vars)) - 1
    }
}

/// Truth table over `vars` variables; bit `a` is the value at the assignment
/// whose variable `j` is bit `j` of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    vars: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(vars: usize, f: impl Fn(usize) -> bool) -> Result<TruthTable> {
        if vars > DEFAULT_TABLE_CAP {
            return Err(Error::Capacity(format!("{vars} variables exceed the table cap")));
        }
        let total = 1usize << vars;
        let mut words = vec![0u64; total.div_ceil(64)];
        for a in 0..total {
            if f(a) {
                words[a / 64] |= 1 << (a % 64);
            }
        }
        Ok(TruthTable { vars, words })
    }

    /// Table of a small function given as one word.
    pub fn from_word(vars: usize, bits: u64) -> TruthTable {
        assert!(vars <= 6);
        TruthTable {
            vars,
            words: vec![bits & width_mask(vars)],
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, a: usize) -> bool {
        self.words[a / 64] >> (a % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        1 << self.vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_all(&self, value: bool) -> bool {
        let m = width_mask(self.vars);
        self.words.iter().all(|&w| if value { w & m == m } else { w & m == 0 })
    }

    pub fn is_essential(&self, j: usize) -> bool {
        if j < 6 {
            let s = 1 << j;
            let m = !PROJ[j] & width_mask(self.vars);
            self.words.iter().any(|&w| (w ^ (w >> s)) & m != 0)
        } else {
            let stride = 1 << (j - 6);
            (0..self.words.len())
                .filter(|w| w & stride == 0)
                .any(|w| self.words[w] != self.words[w | stride])
        }
    }

    pub fn essential_vars(&self) -> Vec<usize> {
        (0..self.vars).filter(|&j| self.is_essential(j)).collect()
    }

    /// Restriction to the listed variables; every other variable is set to 0.
    pub fn project(&self, keep: &[usize]) -> TruthTable {
        TruthTable::from_fn(keep.len(), |a| {
            let mut full = 0usize;
            for (i, &j) in keep.iter().enumerate() {
                full |= (a >> i & 1) << j;
            }
            self.get(full)
        })
        .expect("projection is no wider than its source")
    }
}

/// Truth table of a class over its blocks.
pub fn truth_table(c: &Class) -> Result<TruthTable> {
    truth_table_with_cap(c, DEFAULT_TABLE_CAP)
}

pub fn truth_table_with_cap(c: &Class, cap: usize) -> Result<TruthTable> {
    let vars = c.block_count();
    if vars > cap.min(DEFAULT_TABLE_CAP) {
        return Err(Error::Capacity(format!(
            "class has {vars} blocks, table cap is {cap}"
        )));
    }
    let nwords = (1usize << vars).div_ceil(64);
    let mut words = Vec::with_capacity(nwords);
    for w in 0..nwords {
        let bits = eval_words(c.structure(), c.leaves(), |b| {
            let b = b as usize;
            if b < 6 {
                PROJ[b]
            } else if (w >> (b - 6)) & 1 == 1 {
                !0
            } else {
                0
            }
        });
        words.push(bits & width_mask(vars));
    }
    Ok(TruthTable { vars, words })
}

/// Canonical key of a function: essential-variable count and the
/// lexicographically least table over all renamings and negations of the
/// essential variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FunctionKey {
    essential: u8,
    bits: u64,
}

impl FunctionKey {
    pub const TRUE: FunctionKey = FunctionKey { essential: 0, bits: 1 };
    pub const FALSE: FunctionKey = FunctionKey { essential: 0, bits: 0 };
    pub const PROJECTION: FunctionKey = FunctionKey {
        essential: 1,
        bits: 0b10,
    };

    pub fn essential(&self) -> usize {
        self.essential as usize
    }

    /// Canonical table over the essential variables.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn table(&self) -> TruthTable {
        TruthTable::from_word(self.essential(), self.bits)
    }

    fn lex(&self) -> u64 {
        lex_value(self.bits, self.essential())
    }
}

impl Ord for FunctionKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.essential, self.lex()).cmp(&(other.essential, other.lex()))
    }
}

impl PartialOrd for FunctionKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FunctionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((1usize << self.essential) / 4).max(1);
        write!(f, "E{}:{:0width$x}", self.essential, self.bits, width = digits)
    }
}

impl FromStr for FunctionKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<FunctionKey> {
        let bad = || Error::Parse(format!("bad function key `{s}`"));
        let rest = s.strip_prefix('E').ok_or_else(bad)?;
        let (e, hex) = rest.split_once(':').ok_or_else(bad)?;
        let e: usize = e.parse().map_err(|_| bad())?;
        if e > MAX_KEY_VARS {
            return Err(bad());
        }
        let bits = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
        let key = canonical_small(bits & width_mask(e), e);
        if key.bits != bits || key.essential() != e {
            return Err(Error::Parse(format!("`{s}` is not a canonical key")));
        }
        Ok(key)
    }
}

/// Integer whose order is the lexicographic order of the table read from
/// assignment 0 upwards.
fn lex_value(bits: u64, vars: usize) -> u64 {
    bits.reverse_bits() >> (64 - (1u32 << vars))
}

fn flip_var(t: u64, j: usize, vars: usize) -> u64 {
    let s = 1 << j;
    let m = !PROJ[j] & width_mask(vars);
    ((t & m) << s) | ((t >> s) & m)
}

fn swap_adjacent(t: u64, j: usize) -> u64 {
    // positions with var j = 1, var j+1 = 0 trade places with var j = 0, var j+1 = 1
    let a = PROJ[j] & !PROJ[j + 1];
    let d = 1 << j;
    (t & !(a | (a << d))) | ((t & a) << d) | ((t >> d) & a)
}

/// Adjacent transpositions visiting every permutation of `m` items
/// (Steinhaus-Johnson-Trotter).
fn sjt_swaps(m: usize) -> &'static [usize] {
    static TABLE: OnceLock<Vec<Vec<usize>>> = OnceLock::new();
    &TABLE.get_or_init(|| (0..=MAX_KEY_VARS).map(sjt).collect())[m]
}

fn sjt(m: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut dir: Vec<i8> = vec![-1; m];
    let mut swaps = Vec::new();
    loop {
        let mut mobile: Option<usize> = None;
        for i in 0..m {
            let j = i as isize + dir[perm[i]] as isize;
            if j >= 0 && (j as usize) < m && perm[j as usize] < perm[i]
                && mobile.is_none_or(|b| perm[i] > perm[b]) {
                    mobile = Some(i);
                }
        }
        let Some(i) = mobile else { break };
        let x = perm[i];
        let j = (i as isize + dir[x] as isize) as usize;
        perm.swap(i, j);
        swaps.push(i.min(j));
        for y in (x + 1)..m {
            dir[y] = -dir[y];
        }
    }
    swaps
}

/// Key of a table whose variables are all essential.
fn canonical_small(bits: u64, vars: usize) -> FunctionKey {
    let mut t = bits & width_mask(vars);
    let mut best = lex_value(t, vars);
    let mut best_bits = t;
    let mut consider = |t: u64| {
        let v = lex_value(t, vars);
        if v < best {
            best = v;
            best_bits = t;
        }
    };
    let sweep = |t: &mut u64, consider: &mut dyn FnMut(u64)| {
        for g in 1u32..(1 << vars) {
            *t = flip_var(*t, g.trailing_zeros() as usize, vars);
            consider(*t);
        }
    };
    sweep(&mut t, &mut consider);
    for &j in sjt_swaps(vars) {
        t = swap_adjacent(t, j);
        consider(t);
        sweep(&mut t, &mut consider);
    }
    FunctionKey {
        essential: vars as u8,
        bits: best_bits,
    }
}

/// Drops inessential variables and canonicalizes.
pub fn function_key(t: &TruthTable) -> Result<FunctionKey> {
    function_key_with_cap(t, MAX_KEY_VARS)
}

pub fn function_key_with_cap(t: &TruthTable, cap: usize) -> Result<FunctionKey> {
    let ess = t.essential_vars();
    if ess.len() > cap.min(MAX_KEY_VARS) {
        return Err(Error::Capacity(format!(
            "{} essential variables exceed the canonicalization cap {}",
            ess.len(),
            cap.min(MAX_KEY_VARS)
        )));
    }
    let p = t.project(&ess);
    Ok(canonical_small(p.words[0], ess.len()))
}

/// Memoized keys of small tables (at most 6 variables).
#[derive(Debug, Default, Clone)]
pub struct KeyCache {
    memo: HashMap<(u8, u64), FunctionKey>,
}

impl KeyCache {
    pub fn new() -> KeyCache {
        KeyCache::default()
    }

    pub fn key_of_word(&mut self, vars: usize, bits: u64) -> FunctionKey {
        let bits = bits & width_mask(vars);
        if let Some(k) = self.memo.get(&(vars as u8, bits)) {
            return *k;
        }
        let key = function_key(&TruthTable::from_word(vars, bits)).expect("at most 6 variables");
        self.memo.insert((vars as u8, bits), key);
        key
    }

    /// Key of a class with at most 6 blocks.
    pub fn key_of_class(&mut self, c: &Class) -> Result<FunctionKey> {
        let vars = c.block_count();
        if vars > MAX_KEY_VARS {
            return function_key(&truth_table(c)?);
        }
        let bits = eval_words(c.structure(), c.leaves(), |b| PROJ[b as usize]);
        Ok(self.key_of_word(vars, bits))
    }
}

/// Key of the class, with the default caps.
pub fn class_key(c: &Class) -> Result<FunctionKey> {
    function_key(&truth_table(c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(s: &str) -> FunctionKey {
        class_key(&s.parse().unwrap()).unwrap()
    }

    /// Orbit minimum by brute force over explicit variable maps.
    fn orbit_min(t: &TruthTable) -> u64 {
        let m = t.vars();
        let mut perms = vec![vec![]];
        for _ in 0..m {
            perms = perms
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    let used = p.clone();
                    (0..m).filter(move |x| !used.contains(x)).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        let mut best = u64::MAX;
        for p in &perms {
            for flips in 0..(1usize << m) {
                let mut bits = 0u64;
                for a in 0..(1usize << m) {
                    let mut src = 0;
                    for j in 0..m {
                        src |= ((a >> p[j] & 1) ^ (flips >> j & 1)) << j;
                    }
                    if t.get(src) {
                        bits |= 1 << a;
                    }
                }
                best = best.min(lex_value(bits, m));
            }
        }
        best
    }

    #[test]
    fn tables() {
        let t = truth_table(&"(1:+ | 1:-)".parse().unwrap()).unwrap();
        assert_eq!(t.vars(), 1);
        assert!(t.is_all(true));
        let t = truth_table(&"(1:+ & 2:+)".parse().unwrap()).unwrap();
        assert_eq!((0..4).map(|a| t.get(a)).collect::<Vec<_>>(), [false, false, false, true]);
        let fig = truth_table(&"(((1:+ | (1:- | 2:+)) | 3:+) | (4:+ & 1:+))".parse().unwrap()).unwrap();
        assert!(fig.is_all(true));
    }

    #[test]
    fn keys() {
        assert_eq!(key("1:-"), FunctionKey::PROJECTION);
        assert_eq!(key("(1:+ | 1:-)"), FunctionKey::TRUE);
        assert_eq!(key("(1:+ & 1:-)"), FunctionKey::FALSE);
        assert_eq!(key("(1:+ & 1:+)"), FunctionKey::PROJECTION);
        // x and y versus not-x or not-y: complements, not renamings
        let a = TruthTable::from_word(2, 0b1000);
        let b = TruthTable::from_word(2, 0b0111);
        assert_ne!(function_key(&a).unwrap(), function_key(&b).unwrap());
        let c = TruthTable::from_word(2, 0b0010); // x and not y
        assert_eq!(function_key(&a).unwrap(), function_key(&c).unwrap());
        assert_eq!(key("(1:+ & 2:+)").essential(), 2);
        assert_eq!(key("((1:+ & 2:+) | 3:+)").essential(), 3);
        assert_eq!(key("(1:+ | (2:+ & 2:-))"), FunctionKey::PROJECTION);
    }

    #[test]
    fn wide_tables() {
        let c: Class = "((((((((1:+ & 2:+) | 3:+) & 4:+) | 5:+) & 6:+) | 7:+) & 8:+) & (1:+ | 1:-))"
            .parse()
            .unwrap();
        let t = truth_table(&c).unwrap();
        assert_eq!(t.vars(), 8);
        assert_eq!(t.essential_vars().len(), 8);
        assert!(function_key(&t).is_err());
        assert!(function_key_with_cap(&t, 3).is_err());
        let c: Class = "((1:+ & 2:+) | (3:+ & (4:+ | (5:+ & (6:+ | (7:+ & 7:-))))))".parse().unwrap();
        let t = truth_table(&c).unwrap();
        assert_eq!(t.essential_vars(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(function_key(&t).unwrap().essential(), 6);
    }

    #[test]
    fn key_text_roundtrip() {
        for s in ["1:+", "(1:+ & 2:+)", "((1:+ & 2:+) | (3:+ & 1:-))"] {
            let k = key(s);
            assert_eq!(k.to_string().parse::<FunctionKey>().unwrap(), k);
        }
        assert!("E2:7".parse::<FunctionKey>().is_err());
        assert!("x".parse::<FunctionKey>().is_err());
    }

    #[test]
    fn sjt_visits_everything() {
        for m in 0..=5usize {
            assert_eq!(sjt(m).len() + 1, (1..=m).product::<usize>().max(1));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn key_matches_orbit_minimum(vars in 0usize..=4, bits in any::<u64>()) {
            let t = TruthTable::from_word(vars, bits);
            let ess = t.essential_vars();
            let p = t.project(&ess);
            let k = function_key(&t).unwrap();
            prop_assert_eq!(lex_value(k.bits(), k.essential()), orbit_min(&p));
        }

        #[test]
        fn key_is_invariant_under_relabelling(bits in any::<u64>(), j in 0usize..4, flip in 0usize..4) {
            let t = TruthTable::from_word(4, bits);
            let moved = TruthTable::from_word(4, flip_var(swap_adjacent(t.words()[0], j.min(2)), flip, 4));
            prop_assert_eq!(function_key(&t).unwrap(), function_key(&moved).unwrap());
        }
    }
}
