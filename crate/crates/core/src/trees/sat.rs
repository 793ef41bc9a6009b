//! Satisfiability of and/or trees in negation normal form.
//!
//! The search splits disjunctions into independent branches, propagates
//! literal conjuncts, splits conjunctions into variable-disjoint
//! components and only branches on a variable when none of that applies.

use super::class::{Class, Literal};
use super::structure::{Connective, Node};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Lit { var: u32, negated: bool },
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

/// Result of a budgeted search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    /// A model; unlisted variables are free.
    Sat(Vec<(u32, bool)>),
    Unsat,
    /// The branch budget ran out.
    Unknown,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }
}

fn join(conn: Connective, parts: Vec<Formula>) -> Formula {
    let (absorbing, neutral) = match conn {
        Connective::And => (false, true),
        Connective::Or => (true, false),
    };
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            Formula::Const(b) if b == absorbing => return Formula::Const(absorbing),
            Formula::Const(_) => {}
            Formula::And(ch) if conn == Connective::And => out.extend(ch),
            Formula::Or(ch) if conn == Connective::Or => out.extend(ch),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Formula::Const(neutral),
        1 => out.pop().unwrap(),
        _ => match conn {
            Connective::And => Formula::And(out),
            Connective::Or => Formula::Or(out),
        },
    }
}

impl Formula {
    /// Flattened formula of a class; `negate` builds the negation instead.
    pub fn from_class(c: &Class, negate: bool) -> Formula {
        Formula::from_class_restricted(c, negate, &[])
    }

    /// [`Formula::from_class`] followed by [`Formula::restrict`], in one pass.
    pub fn from_class_restricted(c: &Class, negate: bool, assignment: &[Option<bool>]) -> Formula {
        let nodes = c.structure().nodes();
        let leaves = c.leaves();
        // `(node, ordinal of its first leaf)`
        fn go(nodes: &[Node], leaves: &[Literal], i: usize, ord: usize, negate: bool, a: &[Option<bool>]) -> Formula {
            let Node::Internal { conn, .. } = nodes[i] else {
                let l = leaves[ord];
                return match a.get(l.block as usize).copied().flatten() {
                    Some(v) => Formula::Const(v ^ l.negated ^ negate),
                    None => Formula::Lit {
                        var: l.block,
                        negated: l.negated ^ negate,
                    },
                };
            };
            // gather the maximal same-connective subtree as one conjunction
            // or disjunction
            let mut parts = Vec::new();
            let mut stack = vec![(i, ord)];
            while let Some((j, o)) = stack.pop() {
                match nodes[j] {
                    Node::Internal { conn: k, right } if k == conn => {
                        let right = right as usize;
                        stack.push((right, o + (right - j) / 2));
                        stack.push((j + 1, o));
                    }
                    _ => parts.push(go(nodes, leaves, j, o, negate, a)),
                }
            }
            join(if negate { conn.dual() } else { conn }, parts)
        }
        go(nodes, leaves, 0, 0, negate, assignment)
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(!b),
            Formula::Lit { var, negated } => Formula::Lit {
                var: *var,
                negated: !negated,
            },
            Formula::And(ch) => Formula::Or(ch.iter().map(Formula::negate).collect()),
            Formula::Or(ch) => Formula::And(ch.iter().map(Formula::negate).collect()),
        }
    }

    /// Substitutes the assigned variables and folds constants.
    pub fn restrict(&self, assignment: &[Option<bool>]) -> Formula {
        match self {
            Formula::Const(_) => self.clone(),
            Formula::Lit { var, negated } => match assignment.get(*var as usize).copied().flatten() {
                Some(v) => Formula::Const(v ^ negated),
                None => self.clone(),
            },
            Formula::And(ch) => join(Connective::And, ch.iter().map(|c| c.restrict(assignment)).collect()),
            Formula::Or(ch) => join(Connective::Or, ch.iter().map(|c| c.restrict(assignment)).collect()),
        }
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Lit { var, negated } => assignment[*var as usize] ^ negated,
            Formula::And(ch) => ch.iter().all(|c| c.evaluate(assignment)),
            Formula::Or(ch) => ch.iter().any(|c| c.evaluate(assignment)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Const(_) => {}
            Formula::Lit { var, .. } => out.push(*var),
            Formula::And(ch) | Formula::Or(ch) => ch.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    fn max_var(&self) -> Option<u32> {
        let mut v = Vec::new();
        self.collect_vars(&mut v);
        v.into_iter().max()
    }
}

struct Search {
    budget: u64,
    scratch: Vec<Option<bool>>,
    /// Per variable, the last conjunct seen with it during component search.
    owner: Vec<usize>,
}

impl Search {
    fn assign(&mut self, pairs: &[(u32, bool)], ch: &[&Formula]) -> Formula {
        for &(v, b) in pairs {
            self.scratch[v as usize] = Some(b);
        }
        let g = join(Connective::And, ch.iter().map(|c| c.restrict(&self.scratch)).collect());
        for &(v, _) in pairs {
            self.scratch[v as usize] = None;
        }
        g
    }

    fn solve(&mut self, f: &Formula) -> SatOutcome {
        match f {
            Formula::Const(true) => SatOutcome::Sat(Vec::new()),
            Formula::Const(false) => SatOutcome::Unsat,
            Formula::Lit { var, negated } => SatOutcome::Sat(vec![(*var, !negated)]),
            Formula::Or(ch) => {
                let mut unknown = false;
                for c in ch {
                    match self.solve(c) {
                        SatOutcome::Sat(m) => return SatOutcome::Sat(m),
                        SatOutcome::Unknown => unknown = true,
                        SatOutcome::Unsat => {}
                    }
                }
                if unknown {
                    SatOutcome::Unknown
                } else {
                    SatOutcome::Unsat
                }
            }
            Formula::And(ch) => self.solve_and(&ch.iter().collect::<Vec<_>>()),
        }
    }

    /// Solves the conjunction of `ch`.
    fn solve_and(&mut self, ch: &[&Formula]) -> SatOutcome {
        let mut units: Vec<(u32, bool)> = Vec::new();
        for c in ch {
            if let Formula::Lit { var, negated } = c {
                let val = !negated;
                if units.iter().any(|&(v, b)| v == *var && b != val) {
                    return SatOutcome::Unsat;
                }
                units.push((*var, val));
            }
        }
        if !units.is_empty() {
            let g = self.assign(&units, ch);
            return match self.solve(&g) {
                SatOutcome::Sat(mut m) => {
                    m.extend(units);
                    SatOutcome::Sat(m)
                }
                other => other,
            };
        }

        let comps = self.components(ch);
        if comps.len() > 1 {
            let mut model = Vec::new();
            for comp in comps {
                let part: Vec<&Formula> = comp.into_iter().map(|i| ch[i]).collect();
                let out = match part.as_slice() {
                    [one] => self.solve(one),
                    _ => self.solve_and(&part),
                };
                match out {
                    SatOutcome::Sat(m) => model.extend(m),
                    other => return other,
                }
            }
            return SatOutcome::Sat(model);
        }

        let v = most_frequent_var(ch);
        let mut unknown = false;
        for val in [true, false] {
            if self.budget == 0 {
                return SatOutcome::Unknown;
            }
            self.budget -= 1;
            let g = self.assign(&[(v, val)], ch);
            match self.solve(&g) {
                SatOutcome::Sat(mut m) => {
                    m.push((v, val));
                    return SatOutcome::Sat(m);
                }
                SatOutcome::Unknown => unknown = true,
                SatOutcome::Unsat => {}
            }
        }
        if unknown {
            SatOutcome::Unknown
        } else {
            SatOutcome::Unsat
        }
    }

    /// Groups conjuncts that share variables.
    fn components(&mut self, ch: &[&Formula]) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..ch.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut vars = Vec::new();
        for (i, c) in ch.iter().enumerate() {
            vars.clear();
            c.collect_vars(&mut vars);
            for &v in &vars {
                let j = self.owner[v as usize];
                if j != usize::MAX {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                self.owner[v as usize] = i;
            }
        }
        for c in ch {
            vars.clear();
            c.collect_vars(&mut vars);
            for &v in &vars {
                self.owner[v as usize] = usize::MAX;
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; ch.len()];
        for i in 0..ch.len() {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        groups
    }
}

fn most_frequent_var(ch: &[&Formula]) -> u32 {
    let mut vars = Vec::new();
    for c in ch {
        c.collect_vars(&mut vars);
    }
    vars.sort_unstable();
    let mut best = (0usize, vars[0]);
    let mut i = 0;
    while i < vars.len() {
        let mut j = i;
        while j < vars.len() && vars[j] == vars[i] {
            j += 1;
        }
        if j - i > best.0 {
            best = (j - i, vars[i]);
        }
        i = j;
    }
    best.1
}

/// Budgeted satisfiability; `budget` bounds the number of branchings.
pub fn solve(f: &Formula, budget: u64) -> SatOutcome {
    let n = f.max_var().map_or(0, |v| v as usize + 1);
    let mut s = Search {
        budget,
        scratch: vec![None; n],
        owner: vec![usize::MAX; n],
    };
    s.solve(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate::enumerate_classes;

    fn brute_sat(c: &Class) -> bool {
        let m = c.block_count();
        (0..1usize << m).any(|a| {
            let asg: Vec<bool> = (0..m).map(|j| a >> j & 1 == 1).collect();
            c.evaluate(&asg).unwrap()
        })
    }

    #[test]
    fn agrees_with_brute_force() {
        for n in 1..=5 {
            for c in enumerate_classes(n, n).unwrap() {
                let f = Formula::from_class(&c, false);
                let out = solve(&f, 10_000);
                assert_eq!(out.is_sat(), brute_sat(&c), "{c}");
                if let SatOutcome::Sat(m) = out {
                    let mut asg = vec![false; c.block_count()];
                    for (v, b) in m {
                        asg[v as usize] = b;
                    }
                    assert!(c.evaluate(&asg).unwrap(), "bad model for {c}");
                }
                let neg = Formula::from_class(&c, true);
                assert_eq!(neg, f.negate());
            }
        }
    }

    #[test]
    fn restricted_build_matches_restrict() {
        for c in enumerate_classes(4, 3).unwrap() {
            for a in 0..27usize {
                let asg: Vec<Option<bool>> = (0..3)
                    .map(|j| match a / 3usize.pow(j) % 3 {
                        0 => None,
                        1 => Some(false),
                        _ => Some(true),
                    })
                    .collect();
                for neg in [false, true] {
                    let f = Formula::from_class(&c, neg).restrict(&asg);
                    assert_eq!(Formula::from_class_restricted(&c, neg, &asg), f, "{c} {asg:?}");
                }
            }
        }
    }

    #[test]
    fn structured_cases() {
        let c: Class = "((1:+ | 2:+) & ((1:- | 2:+) & ((1:+ | 2:-) & (1:- | 2:-))))".parse().unwrap();
        assert_eq!(solve(&Formula::from_class(&c, false), 100), SatOutcome::Unsat);
        assert_eq!(solve(&Formula::from_class(&c, false), 0), SatOutcome::Unknown);
        let c: Class = "((1:+ & 1:-) | (2:+ & 3:+))".parse().unwrap();
        assert!(solve(&Formula::from_class(&c, false), 0).is_sat());
    }
}
