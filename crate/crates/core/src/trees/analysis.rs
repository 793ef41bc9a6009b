//! Semantic predicates on classes too wide for truth tables: random
//! simulation first, exact search only when simulation is inconclusive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::class::Class;
use super::function::{function_key, truth_table, FunctionKey, KeyCache, TruthTable, MAX_KEY_VARS};
use super::sat::{solve, Formula, SatOutcome};
use super::structure::{Connective, Node};

pub const DEFAULT_SAT_BUDGET: u64 = 200_000;
/// Classes with at most this many blocks are decided by full truth tables.
const TABLE_LIMIT: usize = 12;
/// 64-assignment words per simulation round.
const SIM_WORDS: usize = 4;
/// Simulation rounds before falling back to exact search.
const SIM_ROUNDS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// The search budget ran out.
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// Reusable state for deciding predicates on many classes.
pub struct Analyzer {
    budget: u64,
    rng: ChaCha8Rng,
    vars: Vec<[u64; SIM_WORDS]>,
    vals: Vec<[u64; SIM_WORDS]>,
    cache: KeyCache,
    scratch: Scratch,
    memo: Option<Memo>,
}

/// Buffers reused across calls.
#[derive(Default)]
struct Scratch {
    obs: Vec<Words>,
    stamp: Vec<usize>,
    dirty: Vec<usize>,
    saved: Vec<(usize, Words)>,
    positions: Vec<Vec<usize>>,
    score: Vec<u32>,
    order: Vec<usize>,
    parents: Vec<usize>,
    occ: Vec<u32>,
    essential: Vec<bool>,
    signs: Vec<u8>,
    /// `(node, leaf ordinal)` stack.
    walk: Vec<(usize, usize)>,
}

/// Verdicts already reached for the most recent class, so that several
/// predicates on one class share their work.
struct Memo {
    class: Class,
    satisfiable: Option<Verdict>,
    is_true: Option<Verdict>,
    /// [`simple_constant`] for `And` and `Or`.
    simple: [Option<bool>; 2],
    /// `(limit, result)` of the last essential-variable search.
    proven: Option<(usize, Option<Vec<u32>>)>,
}

/// Essential-variable searches use at least this limit so that the result
/// serves keys of up to this many variables.
const MEMO_LIMIT: usize = 2;

type Words = [u64; SIM_WORDS];

fn lit_words(x: Words, negated: bool) -> Words {
    if negated {
        x.map(|w| !w)
    } else {
        x
    }
}

/// Mask of the lanes `j >= t`.
fn lanes_from(t: usize) -> Words {
    std::array::from_fn(|w| match t.saturating_sub(64 * w) {
        0 => !0,
        d if d >= 64 => 0,
        d => !0 << d,
    })
}

fn apply_words(conn: Connective, a: Words, b: Words) -> Words {
    std::array::from_fn(|w| conn.apply(a[w], b[w]))
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer::new(DEFAULT_SAT_BUDGET)
    }
}

impl Analyzer {
    pub fn new(budget: u64) -> Analyzer {
        Analyzer {
            budget,
            rng: ChaCha8Rng::seed_from_u64(0x5eed),
            vars: Vec::new(),
            vals: Vec::new(),
            cache: KeyCache::new(),
            scratch: Scratch::default(),
            memo: None,
        }
    }

    fn memo(&mut self, c: &Class) -> &mut Memo {
        if self.memo.as_ref().is_none_or(|m| m.class != *c) {
            self.memo = Some(Memo {
                class: c.clone(),
                satisfiable: None,
                is_true: None,
                simple: [None; 2],
                proven: None,
            });
        }
        self.memo.as_mut().unwrap()
    }

    /// The memo of the class passed to the last [`Analyzer::memo`] call.
    fn current(&mut self) -> &mut Memo {
        self.memo.as_mut().expect("memo set for this class")
    }

    fn simple_constant(&mut self, c: &Class, conn: Connective) -> bool {
        let slot = (conn == Connective::Or) as usize;
        if let Some(b) = self.current().simple[slot] {
            return b;
        }
        let mut sc = std::mem::take(&mut self.scratch);
        let b = simple_constant(c, conn, &mut sc);
        self.scratch = sc;
        self.current().simple[slot] = Some(b);
        b
    }

    /// Random simulation of `SIM_WORDS * 64` assignments; fills `vals` with
    /// every node value and returns `(any true, any false)` at the root.
    fn simulate(&mut self, c: &Class) -> (bool, bool) {
        let m = c.block_count();
        self.vars.resize(m, [0; SIM_WORDS]);
        for x in self.vars.iter_mut() {
            *x = self.rng.gen();
        }
        self.evaluate_all(c);
        let root = self.vals[0];
        (root.iter().any(|&w| w != 0), root.iter().any(|&w| w != !0))
    }

    /// Like [`Analyzer::simulate`] with each variable true with probability
    /// drawn from `{1/8, 1/4, 3/4, 7/8}`.
    fn simulate_biased(&mut self, c: &Class) {
        let m = c.block_count();
        self.vars.resize(m, [0; SIM_WORDS]);
        for x in self.vars.iter_mut() {
            let (a, b, d): (Words, Words, Words) = (self.rng.gen(), self.rng.gen(), self.rng.gen());
            *x = match self.rng.gen_range(0..4) {
                0 => std::array::from_fn(|w| a[w] & b[w] & d[w]),
                1 => std::array::from_fn(|w| a[w] & b[w]),
                2 => std::array::from_fn(|w| a[w] | b[w]),
                _ => std::array::from_fn(|w| a[w] | b[w] | d[w]),
            };
        }
        self.evaluate_all(c);
    }

    fn evaluate_all(&mut self, c: &Class) {
        let nodes = c.structure().nodes();
        let leaves = c.leaves();
        self.vals.resize(nodes.len(), [0; SIM_WORDS]);
        let mut leaf = leaves.len();
        for i in (0..nodes.len()).rev() {
            self.vals[i] = match nodes[i] {
                Node::Leaf => {
                    leaf -= 1;
                    let l = leaves[leaf];
                    lit_words(self.vars[l.block as usize], l.negated)
                }
                Node::Internal { conn, right } => apply_words(conn, self.vals[i + 1], self.vals[right as usize]),
            };
        }
    }

    fn root_words(&self) -> Words {
        self.vals[0]
    }

    pub fn satisfiable(&mut self, c: &Class) -> Verdict {
        if let Some(v) = self.memo(c).satisfiable {
            return v;
        }
        let v = self.satisfiable_uncached(c);
        self.current().satisfiable = Some(v);
        v
    }

    fn satisfiable_uncached(&mut self, c: &Class) -> Verdict {
        if self.simple_constant(c, Connective::And) {
            return Verdict::No;
        }
        if self.simulate(c).0 {
            return Verdict::Yes;
        }
        match solve(&Formula::from_class(c, false), self.budget) {
            SatOutcome::Sat(_) => Verdict::Yes,
            SatOutcome::Unsat => Verdict::No,
            SatOutcome::Unknown => Verdict::Unknown,
        }
    }

    pub fn is_true(&mut self, c: &Class) -> Verdict {
        if let Some(v) = self.memo(c).is_true {
            return v;
        }
        let v = self.is_true_uncached(c);
        self.current().is_true = Some(v);
        v
    }

    fn is_true_uncached(&mut self, c: &Class) -> Verdict {
        if self.simple_constant(c, Connective::Or) {
            return Verdict::Yes;
        }
        if self.simulate(c).1 {
            return Verdict::No;
        }
        match solve(&Formula::from_class(c, true), self.budget) {
            SatOutcome::Sat(_) => Verdict::No,
            SatOutcome::Unsat => Verdict::Yes,
            SatOutcome::Unknown => Verdict::Unknown,
        }
    }

    pub fn is_false(&mut self, c: &Class) -> Verdict {
        match self.satisfiable(c) {
            Verdict::Yes => Verdict::No,
            Verdict::No => Verdict::Yes,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    /// Whether the class computes a function with the given key.
    pub fn matches_key(&mut self, c: &Class, key: &FunctionKey) -> Verdict {
        if *key == FunctionKey::TRUE {
            return self.is_true(c);
        }
        if *key == FunctionKey::FALSE {
            return self.is_false(c);
        }
        self.memo(c);
        if self.simple_constant(c, Connective::Or) || self.simple_constant(c, Connective::And) {
            return Verdict::No;
        }
        let m = c.block_count();
        if m <= MAX_KEY_VARS {
            return Verdict::from_bool(self.cache.key_of_class(c).ok() == Some(*key));
        }
        if m <= TABLE_LIMIT {
            let t = truth_table(c).expect("within the table cap");
            let ess = t.essential_vars();
            if ess.len() != key.essential() {
                return Verdict::No;
            }
            return Verdict::from_bool(function_key(&t).ok() == Some(*key));
        }
        let e = key.essential();
        let cached = match &self.current().proven {
            Some((limit, r)) if *limit >= e => Some(r.clone()),
            _ => None,
        };
        let found = match cached {
            Some(r) => r,
            None => {
                let limit = e.max(MEMO_LIMIT);
                let r = self.proven_essential(c, limit);
                self.current().proven = Some((limit, r.clone()));
                r
            }
        };
        let Some(mut proven) = found.filter(|p| p.len() <= e) else {
            return Verdict::No;
        };
        match self.exact_support(c, &mut proven, e) {
            Support::TooMany => Verdict::No,
            Support::Unknown => Verdict::Unknown,
            Support::Table(t) => Verdict::from_bool(function_key(&t).ok() == Some(*key)),
        }
    }

    /// Variables shown essential by simulation, or `None` once more than
    /// `limit` are found.
    fn proven_essential(&mut self, c: &Class, limit: usize) -> Option<Vec<u32>> {
        let mut sc = std::mem::take(&mut self.scratch);
        let r = self.proven_essential_with(c, limit, &mut sc);
        self.scratch = sc;
        r
    }

    fn proven_essential_with(&mut self, c: &Class, limit: usize, sc: &mut Scratch) -> Option<Vec<u32>> {
        let m = c.block_count();
        let nodes = c.structure().nodes();
        let leaves = c.leaves();
        sc.occ.clear();
        sc.occ.resize(m, 0);
        sc.positions.resize(m.max(sc.positions.len()), Vec::new());
        sc.positions[..m].iter_mut().for_each(Vec::clear);
        sc.parents.clear();
        sc.parents.resize(nodes.len(), 0);
        let mut leaf = 0;
        for (i, n) in nodes.iter().enumerate() {
            match *n {
                Node::Leaf => {
                    let b = leaves[leaf].block as usize;
                    sc.occ[b] += 1;
                    sc.positions[b].push(i);
                    leaf += 1;
                }
                Node::Internal { right, .. } => {
                    sc.parents[i + 1] = i;
                    sc.parents[right as usize] = i;
                }
            }
        }
        sc.order.clear();
        sc.order.extend(0..m);
        sc.score.clear();
        sc.score.resize(m, 0);
        sc.essential.clear();
        sc.essential.resize(m, false);
        sc.obs.resize(nodes.len(), [0; SIM_WORDS]);
        sc.stamp.clear();
        sc.stamp.resize(nodes.len(), usize::MAX);
        let mut count = 0;
        for round in 0..SIM_ROUNDS {
            if round == 0 {
                self.simulate(c);
            } else {
                self.simulate_biased(c);
            }
            let base = self.root_words();

            // observability of every leaf; for single-occurrence blocks it
            // proves essentiality, for the others it ranks flip candidates
            sc.obs[0] = [!0; SIM_WORDS];
            sc.score.iter_mut().for_each(|x| *x = 0);
            let mut leaf = 0;
            for i in 0..nodes.len() {
                match nodes[i] {
                    Node::Internal { conn, right } => {
                        let (l, r) = (i + 1, right as usize);
                        let (vl, vr) = (self.vals[l], self.vals[r]);
                        let o = sc.obs[i];
                        let (sl, sr) = match conn {
                            Connective::And => (vr, vl),
                            Connective::Or => (vr.map(|w| !w), vl.map(|w| !w)),
                        };
                        sc.obs[l] = std::array::from_fn(|w| o[w] & sl[w]);
                        sc.obs[r] = std::array::from_fn(|w| o[w] & sr[w]);
                    }
                    Node::Leaf => {
                        let b = leaves[leaf].block as usize;
                        leaf += 1;
                        let seen: u32 = sc.obs[i].iter().map(|w| w.count_ones()).sum();
                        if sc.occ[b] == 1 && !sc.essential[b] && seen != 0 {
                            sc.essential[b] = true;
                            count += 1;
                            if count > limit {
                                return None;
                            }
                        }
                        sc.score[b] += seen;
                    }
                }
            }
            let score = &sc.score;
            sc.order.sort_by_key(|&b| std::cmp::Reverse(score[b]));

            // flip tests for the rest, most observable first, re-evaluating
            // only the ancestors of the flipped leaves
            for oi in 0..m {
                let b = sc.order[oi];
                // a block no single occurrence of which was observable
                // rarely flips the root; exact search settles the rest
                if sc.essential[b] || sc.occ[b] == 1 || sc.score[b] == 0 {
                    continue;
                }
                let tag = round * m + b;
                sc.dirty.clear();
                for &p in &sc.positions[b] {
                    let mut i = p;
                    while i != 0 {
                        i = sc.parents[i];
                        if sc.stamp[i] == tag {
                            break;
                        }
                        sc.stamp[i] = tag;
                        sc.dirty.push(i);
                    }
                }
                // children come after parents in preorder
                sc.dirty.sort_unstable_by(|x, y| y.cmp(x));
                sc.saved.clear();
                for &p in &sc.positions[b] {
                    sc.saved.push((p, self.vals[p]));
                    self.vals[p] = self.vals[p].map(|w| !w);
                }
                for &i in &sc.dirty {
                    sc.saved.push((i, self.vals[i]));
                    if let Node::Internal { conn, right } = nodes[i] {
                        self.vals[i] = apply_words(conn, self.vals[i + 1], self.vals[right as usize]);
                    }
                }
                let changed = self.vals[0] != base;
                for &(i, v) in sc.saved.iter().rev() {
                    self.vals[i] = v;
                }
                if changed {
                    sc.essential[b] = true;
                    count += 1;
                    if count > limit {
                        return None;
                    }
                }
            }
        }
        Some((0..m as u32).filter(|&b| sc.essential[b as usize]).collect())
    }

    /// Completes `proven` to the full support of the function, proving
    /// every added variable essential.
    fn exact_support(&mut self, c: &Class, proven: &mut Vec<u32>, limit: usize) -> Support {
        let m = c.block_count();
        'outer: loop {
            if proven.len() > limit {
                return Support::TooMany;
            }
            let mut values = Vec::with_capacity(1 << proven.len());
            for a in 0..(1usize << proven.len()) {
                // random completions of the fixed variables
                self.vars.resize(m, [0; SIM_WORDS]);
                for x in self.vars.iter_mut() {
                    *x = self.rng.gen();
                }
                for (i, &v) in proven.iter().enumerate() {
                    self.vars[v as usize] = [if a >> i & 1 == 1 { !0 } else { 0 }; SIM_WORDS];
                }
                self.evaluate_all(c);
                let root = self.root_words();
                let lane = |want: bool| -> Option<usize> {
                    (0..SIM_WORDS * 64).find(|&j| (root[j / 64] >> (j % 64) & 1 == 1) == want)
                };
                let start = self.lane_assignment(lane(true).or(lane(false)).expect("some lane"));
                let value = lane(true).is_some();
                if let (Some(j1), Some(j0)) = (lane(true), lane(false)) {
                    let (x, y) = (self.lane_assignment(j1), self.lane_assignment(j0));
                    proven.push(self.witness_var(c, &x, &y));
                    continue 'outer;
                }
                // looks constant: search for an assignment with the other value
                let mut fixed = vec![None; m];
                for (i, &v) in proven.iter().enumerate() {
                    fixed[v as usize] = Some(a >> i & 1 == 1);
                }
                let g = Formula::from_class_restricted(c, value, &fixed);
                match solve(&g, self.budget) {
                    SatOutcome::Unknown => return Support::Unknown,
                    SatOutcome::Unsat => values.push(value),
                    SatOutcome::Sat(model) => {
                        let mut other = start.clone();
                        for (v, b) in model {
                            other[v as usize] = b;
                        }
                        proven.push(self.witness_var(c, &start, &other));
                        continue 'outer;
                    }
                }
            }
            return Support::Table(
                TruthTable::from_fn(proven.len(), |a| values[a]).expect("at most 6 variables"),
            );
        }
    }

    /// Variable values of one simulation lane.
    fn lane_assignment(&self, j: usize) -> Vec<bool> {
        self.vars.iter().map(|x| x[j / 64] >> (j % 64) & 1 == 1).collect()
    }

    /// Walks from `from` to `to` one differing variable at a time and
    /// returns the first variable whose change flips the class value; the
    /// two assignments must give different values.
    fn witness_var(&mut self, c: &Class, from: &[bool], to: &[bool]) -> u32 {
        let diff: Vec<usize> = (0..from.len()).filter(|&v| from[v] != to[v]).collect();
        let lanes = SIM_WORDS * 64;
        let mut cur = from.to_vec();
        // lane j holds `cur` with the next j differing variables switched
        for chunk in diff.chunks(lanes - 1) {
            for (v, x) in self.vars.iter_mut().enumerate() {
                *x = [if cur[v] { !0 } else { 0 }; SIM_WORDS];
            }
            for (t, &v) in chunk.iter().enumerate() {
                let from_lane = lanes_from(t + 1);
                for (x, f) in self.vars[v].iter_mut().zip(from_lane) {
                    *x ^= f;
                }
            }
            self.evaluate_all(c);
            let root = self.root_words();
            let bit = |j: usize| root[j / 64] >> (j % 64) & 1 == 1;
            if let Some(t) = (1..=chunk.len()).find(|&j| bit(j) != bit(j - 1)) {
                return chunk[t - 1] as u32;
            }
            for &v in chunk {
                cur[v] = to[v];
            }
        }
        unreachable!("the endpoints give different values")
    }
}

/// Some block occurs with both signs on `conn`-only paths from the root,
/// making the class constant.
fn simple_constant(c: &Class, conn: Connective, sc: &mut Scratch) -> bool {
    let nodes = c.structure().nodes();
    let leaves = c.leaves();
    // bit 0: seen positive, bit 1: seen negated
    sc.signs.clear();
    sc.signs.resize(c.block_count(), 0);
    sc.walk.clear();
    sc.walk.push((0, 0));
    while let Some((i, ord)) = sc.walk.pop() {
        match nodes[i] {
            Node::Leaf => {
                let l = leaves[ord];
                let s = &mut sc.signs[l.block as usize];
                *s |= 1 << l.negated as u8;
                if *s == 3 {
                    return true;
                }
            }
            Node::Internal { conn: k, right } if k == conn => {
                let right = right as usize;
                sc.walk.push((right, ord + (right - i) / 2));
                sc.walk.push((i + 1, ord));
            }
            Node::Internal { .. } => {}
        }
    }
    false
}

enum Support {
    Table(TruthTable),
    TooMany,
    Unknown,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate::enumerate_classes;
    use crate::trees::function::class_key;

    #[test]
    fn agrees_with_tables_on_small_classes() {
        let mut a = Analyzer::default();
        for c in enumerate_classes(4, 4).unwrap() {
            let t = truth_table(&c).unwrap();
            assert_eq!(a.is_true(&c), Verdict::from_bool(t.is_all(true)));
            assert_eq!(a.is_false(&c), Verdict::from_bool(t.is_all(false)));
            assert_eq!(a.satisfiable(&c), Verdict::from_bool(!t.is_all(false)));
        }
    }

    #[test]
    fn wide_classes_use_the_exact_path() {
        // x1 absorbs a wide read-once subtree: projection on 14 blocks
        let mut wide = String::from("14:+");
        for b in (2..=13).rev() {
            wide = format!("({b}:+ {} {wide})", if b % 2 == 0 { '&' } else { '|' });
        }
        let absorbed: Class = format!("(1:+ | (1:+ & {wide}))").parse().unwrap();
        assert_eq!(absorbed.block_count(), 14);
        let mut a = Analyzer::default();
        assert_eq!(a.matches_key(&absorbed, &FunctionKey::PROJECTION), Verdict::Yes);
        let and = class_key(&"(1:+ & 2:+)".parse().unwrap()).unwrap();
        assert_eq!(a.matches_key(&absorbed, &and), Verdict::No);

        let pair: Class = format!("((1:+ & 2:+) | ((1:+ & 2:+) & {wide}))").parse().unwrap();
        assert_eq!(a.matches_key(&pair, &and), Verdict::Yes);
        assert_eq!(a.matches_key(&pair, &FunctionKey::PROJECTION), Verdict::No);

        let taut: Class = format!("((1:+ | 1:-) | {wide})").parse().unwrap();
        assert_eq!(a.is_true(&taut), Verdict::Yes);
        assert_eq!(a.matches_key(&taut, &FunctionKey::TRUE), Verdict::Yes);
        let plain: Class = wide.parse().unwrap();
        assert_eq!(a.matches_key(&plain, &FunctionKey::PROJECTION), Verdict::No);
    }

    #[test]
    fn hidden_dependence_needs_search() {
        // 2 is essential only on a tiny fraction of assignments
        let mut deep = String::from("2:+");
        for b in 3..=22 {
            deep = format!("({b}:+ & {deep})");
        }
        let c: Class = format!("(1:+ | {deep})").parse().unwrap();
        let mut a = Analyzer::default();
        assert_eq!(a.matches_key(&c, &FunctionKey::PROJECTION), Verdict::No);
        let mut deep_taut = String::from("(2:+ | 2:-)");
        for b in 3..=22 {
            deep_taut = format!("({b}:+ & {deep_taut})");
        }
        let c: Class = format!("(1:+ | ({deep_taut} & 1:-))").parse().unwrap();
        // x1 | (all of 3..22 & not x1) depends on 3..22 as well
        assert_eq!(a.matches_key(&c, &FunctionKey::PROJECTION), Verdict::No);
    }
}
