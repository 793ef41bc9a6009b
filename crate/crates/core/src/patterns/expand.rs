use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::recognize::{path_leaves, simple_constant_at};
use crate::error::{Error, Result};
use crate::trees::{all_structures, Class, Connective, Literal, Node, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    /// Expansion tree is a simple tautology under `and` (or a simple
    /// contradiction under `or`).
    T,
    /// Expansion tree shares a literal with the expanded subtree so that it
    /// is absorbed: under `or`, a leaf on an and-only path of `t_e` that sits
    /// on an or-only path of `s`; under `and`, the dual.
    X,
}

impl FromStr for ExpansionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExpansionKind> {
        match s {
            "T" | "t" => Ok(ExpansionKind::T),
            "X" | "x" => Ok(ExpansionKind::X),
            _ => Err(Error::Unknown { kind: "expansion kind", name: s.into() }),
        }
    }
}

impl fmt::Display for ExpansionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionKind::T => "T",
            ExpansionKind::X => "X",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// One expansion: the subtree of `base` at `site` becomes `s conn t_e`
/// (`side = Right`) or `t_e conn s` (`side = Left`). Blocks of the
/// expansion tree below `base.block_count()` are base variables; higher ones
/// are fresh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionSpec {
    pub base: Class,
    pub site: usize,
    pub side: Side,
    pub kind: ExpansionKind,
    pub conn: Connective,
    pub expansion_structure: Structure,
    pub expansion_leaves: Vec<Literal>,
}

impl ExpansionSpec {
    pub fn assemble(&self) -> Result<Class> {
        let (s, l) = graft(
            self.base.structure(),
            self.base.leaves(),
            self.site,
            self.side,
            self.conn,
            &self.expansion_structure,
            &self.expansion_leaves,
        );
        Class::new(s, l)
    }

    /// Whether the expansion tree meets the condition of its kind.
    pub fn is_valid(&self) -> bool {
        let sub = self.base.structure().subtree(self.site);
        let start = self.base.structure().first_leaf_index(self.site);
        let s_leaves = &self.base.leaves()[start..start + sub.size()];
        qualifies(self.kind, self.conn, &sub, s_leaves, &self.expansion_structure, &self.expansion_leaves)
    }
}

fn graft(
    base: &Structure,
    leaves: &[Literal],
    site: usize,
    side: Side,
    conn: Connective,
    te: &Structure,
    te_leaves: &[Literal],
) -> (Structure, Vec<Literal>) {
    let shift = te.nodes().len() as u32 + 1;
    let end = base.subtree_end(site);
    let bump = |n: &Node, limit: usize| match *n {
        Node::Internal { conn, right } if right as usize >= limit => Node::Internal { conn, right: right + shift },
        other => other,
    };
    let mut nodes: Vec<Node> = base.nodes()[..site].iter().map(|n| bump(n, site + 1)).collect();
    let sub = &base.nodes()[site..end];
    let moved = |off: u32| {
        sub.iter().map(move |n| match *n {
            Node::Internal { conn, right } => Node::Internal { conn, right: right - site as u32 + off },
            Node::Leaf => Node::Leaf,
        })
    };
    let te_moved = |off: u32| {
        te.nodes().iter().map(move |n| match *n {
            Node::Internal { conn, right } => Node::Internal { conn, right: right + off },
            Node::Leaf => Node::Leaf,
        })
    };
    let s0 = site as u32 + 1;
    let first = base.first_leaf_index(site);
    let last = first + base.size_at(site);
    let mut lab = leaves[..first].to_vec();
    match side {
        Side::Right => {
            nodes.push(Node::Internal { conn, right: s0 + sub.len() as u32 });
            nodes.extend(moved(s0));
            nodes.extend(te_moved(s0 + sub.len() as u32));
            lab.extend_from_slice(&leaves[first..last]);
            lab.extend_from_slice(te_leaves);
        }
        Side::Left => {
            nodes.push(Node::Internal { conn, right: s0 + te.nodes().len() as u32 });
            nodes.extend(te_moved(s0));
            nodes.extend(moved(s0 + te.nodes().len() as u32));
            lab.extend_from_slice(te_leaves);
            lab.extend_from_slice(&leaves[first..last]);
        }
    }
    nodes.extend(base.nodes()[end..].iter().map(|n| bump(n, end)));
    lab.extend_from_slice(&leaves[last..]);
    (Structure::from_nodes_unchecked(nodes), lab)
}

fn qualifies(
    kind: ExpansionKind,
    conn: Connective,
    s: &Structure,
    s_leaves: &[Literal],
    te: &Structure,
    te_leaves: &[Literal],
) -> bool {
    match kind {
        // and-joined tautology or or-joined contradiction
        ExpansionKind::T => simple_constant_at(te, te_leaves, 0, conn.dual()),
        ExpansionKind::X => {
            let absorbing: Vec<Literal> = path_leaves(s, 0, conn).into_iter().map(|i| s_leaves[i]).collect();
            path_leaves(te, 0, conn.dual()).into_iter().any(|i| absorbing.contains(&te_leaves[i]))
        }
    }
}

/// Removes the internal node `w` of `c`, keeping the child opposite `side`.
fn contract(s: &Structure, leaves: &[Literal], w: usize, side: Side) -> Option<Class> {
    let (_, l, r) = s.children(w)?;
    let (keep, drop) = match side {
        Side::Left => (r, l),
        Side::Right => (l, r),
    };
    let end = s.subtree_end(w);
    let dl = s.subtree_end(drop) - drop;
    // old position -> new position; `w` and the kept root both land on `w`
    let pos = |i: usize| {
        if i <= w {
            i
        } else if i >= end || drop < keep {
            i - 1 - dl
        } else {
            i - 1
        }
    };
    let mut nodes = Vec::with_capacity(s.nodes().len() - dl - 1);
    for (i, n) in s.nodes().iter().enumerate() {
        if i == w || (drop..drop + dl).contains(&i) {
            continue;
        }
        nodes.push(match *n {
            Node::Internal { conn, right } => Node::Internal { conn, right: pos(right as usize) as u32 },
            Node::Leaf => Node::Leaf,
        });
    }
    let first = s.first_leaf_index(drop);
    let dl = s.size_at(drop);
    let mut lab = leaves[..first].to_vec();
    lab.extend_from_slice(&leaves[first + dl..]);
    Class::new(Structure::from_nodes_unchecked(nodes), lab).ok()
}

/// First `(node, side)` in preorder at which `c` decomposes as an expansion
/// of `base` of the given kind.
fn first_witness(c: &Class, base: &Class, kind: ExpansionKind) -> Option<(usize, Side)> {
    let s = c.structure();
    for w in 0..s.nodes().len() {
        let Some((conn, l, r)) = s.children(w) else { continue };
        for (side, te_root, s_root) in [(Side::Left, l, r), (Side::Right, r, l)] {
            if s.size_at(te_root) + base.size() != c.size() {
                continue;
            }
            let sub = s.subtree(s_root);
            let sf = s.first_leaf_index(s_root);
            let te = s.subtree(te_root);
            let tf = s.first_leaf_index(te_root);
            let ok = qualifies(
                kind,
                conn,
                &sub,
                &c.leaves()[sf..sf + sub.size()],
                &te,
                &c.leaves()[tf..tf + te.size()],
            );
            if ok && contract(s, c.leaves(), w, side).as_ref() == Some(base) {
                return Some((w, side));
            }
        }
    }
    None
}

/// Labellings of `m` leaves over the `b` base blocks (either sign) plus
/// fresh blocks in canonical order, with at most `k` blocks overall.
fn expansion_labellings(m: usize, b: usize, k: usize) -> Vec<Vec<Literal>> {
    fn go(acc: &mut Vec<Literal>, m: usize, b: u32, fresh: u32, k: u32, out: &mut Vec<Vec<Literal>>) {
        if acc.len() == m {
            out.push(acc.clone());
            return;
        }
        for blk in 0..b + fresh {
            for neg in [false, true] {
                acc.push(Literal { block: blk, negated: neg });
                go(acc, m, b, fresh, k, out);
                acc.pop();
            }
        }
        if b + fresh < k {
            acc.push(Literal::pos(b + fresh));
            go(acc, m, b, fresh + 1, k, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(m), m, b as u32, 0, k as u32, &mut out);
    out
}

/// Calls `f` once per distinct class of size `target_n` obtained from `base`
/// by one expansion of `kind`, with the spec of its first witness.
pub fn for_each_expansion(
    base: &Class,
    kind: ExpansionKind,
    target_n: usize,
    k: usize,
    f: impl Fn(&ExpansionSpec, &Class) + Sync,
) -> Result<()> {
    if base.block_count() > k {
        return Err(Error::Domain(format!(
            "base uses {} blocks, more than k={k}",
            base.block_count()
        )));
    }
    if target_n <= base.size() {
        return Ok(());
    }
    let m = target_n - base.size();
    let labels = expansion_labellings(m, base.block_count(), k);
    let shapes = all_structures(m);
    let mut jobs = Vec::new();
    for site in 0..base.structure().nodes().len() {
        for side in [Side::Left, Side::Right] {
            for conn in [Connective::And, Connective::Or] {
                for sh in 0..shapes.len() {
                    jobs.push((site, side, conn, sh));
                }
            }
        }
    }
    jobs.par_iter().for_each(|&(site, side, conn, sh)| {
        let bs = base.structure();
        let sub = bs.subtree(site);
        let first = bs.first_leaf_index(site);
        let s_leaves = &base.leaves()[first..first + sub.size()];
        let te = &shapes[sh];
        for l in &labels {
            if !qualifies(kind, conn, &sub, s_leaves, te, l) {
                continue;
            }
            let (st, lab) = graft(bs, base.leaves(), site, side, conn, te, l);
            let c = Class::new(st, lab).expect("grafted tree is valid");
            if first_witness(&c, base, kind) != Some((site, side)) {
                continue;
            }
            let spec = ExpansionSpec {
                base: base.clone(),
                site,
                side,
                kind,
                conn,
                expansion_structure: te.clone(),
                expansion_leaves: l.clone(),
            };
            f(&spec, &c);
        }
    });
    Ok(())
}

/// Distinct expansions of `base`, sorted by their printed form.
pub fn generate_expansions(base: &Class, kind: ExpansionKind, target_n: usize, k: usize) -> Result<Vec<Class>> {
    let out = std::sync::Mutex::new(Vec::new());
    for_each_expansion(base, kind, target_n, k, |_, c| out.lock().unwrap().push(c.clone()))?;
    let mut v = out.into_inner().unwrap();
    v.sort_by_cached_key(|c| c.to_string());
    Ok(v)
}
