use std::fmt;
use std::str::FromStr;

use super::structure::{Connective, Node, Structure};
use crate::error::{domain, Error, Result};

/// A leaf label: a variable block (0-based) and a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub block: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(block: u32) -> Literal {
        Literal { block, negated: false }
    }

    pub fn neg(block: u32) -> Literal {
        Literal { block, negated: true }
    }

    pub fn complement(self) -> Literal {
        Literal {
            block: self.block,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.block + 1, if self.negated { '-' } else { '+' })
    }
}

/// Canonical representative of an equivalence class of and/or trees.
///
/// Blocks are numbered in order of first occurrence (left to right) and the
/// first occurrence of every block is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Class {
    structure: Structure,
    leaves: Vec<Literal>,
}

/// Rewrites a labelling into canonical form in place.
pub fn canonicalize_labels(leaves: &mut [Literal]) {
    let mut map: Vec<Option<(u32, bool)>> = Vec::new();
    let mut next = 0;
    for lit in leaves.iter_mut() {
        let b = lit.block as usize;
        if b >= map.len() {
            map.resize(b + 1, None);
        }
        let (id, flip) = *map[b].get_or_insert_with(|| {
            next += 1;
            (next - 1, lit.negated)
        });
        *lit = Literal {
            block: id,
            negated: lit.negated ^ flip,
        };
    }
}

pub fn is_canonical_labels(leaves: &[Literal]) -> bool {
    let mut seen = 0u32;
    for lit in leaves {
        if lit.block == seen {
            if lit.negated {
                return false;
            }
            seen += 1;
        } else if lit.block > seen {
            return false;
        }
    }
    true
}

impl Class {
    /// Builds the class of an arbitrary labelled tree.
    pub fn new(structure: Structure, mut leaves: Vec<Literal>) -> Result<Class> {
        if leaves.len() != structure.size() {
            return domain(format!(
                "{} labels for a structure with {} leaves",
                leaves.len(),
                structure.size()
            ));
        }
        canonicalize_labels(&mut leaves);
        Ok(Class { structure, leaves })
    }

    pub(crate) fn from_canonical(structure: Structure, leaves: Vec<Literal>) -> Class {
        debug_assert!(is_canonical_labels(&leaves));
        debug_assert_eq!(structure.size(), leaves.len());
        Class { structure, leaves }
    }

    pub fn single() -> Class {
        Class::from_canonical(Structure::leaf(), vec![Literal::pos(0)])
    }

    /// `left conn right` with disjoint variables on the two sides.
    pub fn join(conn: Connective, left: &Class, right: &Class) -> Class {
        let offset = left.block_count() as u32;
        let mut leaves = left.leaves.clone();
        leaves.extend(right.leaves.iter().map(|l| Literal {
            block: l.block + offset,
            negated: l.negated,
        }));
        let mut c = Class {
            structure: Structure::join(conn, &left.structure, &right.structure),
            leaves,
        };
        canonicalize_labels(&mut c.leaves);
        c
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn leaves(&self) -> &[Literal] {
        &self.leaves
    }

    pub fn size(&self) -> usize {
        self.leaves.len()
    }

    pub fn block_count(&self) -> usize {
        self.leaves.iter().map(|l| l.block + 1).max().unwrap_or(0) as usize
    }

    /// Number of leaves labelled by each block.
    pub fn occurrences(&self) -> Vec<u32> {
        let mut occ = vec![0u32; self.block_count()];
        for l in &self.leaves {
            occ[l.block as usize] += 1;
        }
        occ
    }

    /// Swaps every connective. Together with flipping every polarity (which
    /// the canonical form absorbs) this is the duality involution.
    pub fn dual(&self) -> Class {
        Class {
            structure: self.structure.dual(),
            leaves: self.leaves.clone(),
        }
    }

    /// Evaluates under one value per block.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.block_count() {
            return domain(format!(
                "assignment has {} values for {} blocks",
                assignment.len(),
                self.block_count()
            ));
        }
        let v = eval_words(&self.structure, &self.leaves, |b| {
            if assignment[b as usize] {
                !0
            } else {
                0
            }
        });
        Ok(v & 1 == 1)
    }
}

/// Bit-parallel evaluation: `var(b)` gives the 64 sample values of block `b`.
pub fn eval_words(structure: &Structure, leaves: &[Literal], var: impl Fn(u32) -> u64) -> u64 {
    let nodes = structure.nodes();
    let mut val = vec![0u64; nodes.len()];
    eval_into(nodes, leaves, &var, &mut val);
    val[0]
}

/// Fills `val` with the value of every node.
pub(crate) fn eval_into(nodes: &[Node], leaves: &[Literal], var: &impl Fn(u32) -> u64, val: &mut [u64]) {
    let mut leaf = leaves.len();
    for i in (0..nodes.len()).rev() {
        val[i] = match nodes[i] {
            Node::Leaf => {
                leaf -= 1;
                let l = leaves[leaf];
                let x = var(l.block);
                if l.negated {
                    !x
                } else {
                    x
                }
            }
            Node::Internal { conn, right } => conn.apply(val[i + 1], val[right as usize]),
        };
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.structure;
        let ords = s.leaf_ordinals();
        fn go(
            s: &Structure,
            ords: &[Option<usize>],
            leaves: &[Literal],
            i: usize,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            match s.children(i) {
                None => write!(f, "{}", leaves[ords[i].unwrap()]),
                Some((c, l, r)) => {
                    write!(f, "(")?;
                    go(s, ords, leaves, l, f)?;
                    write!(f, " {} ", c.symbol())?;
                    go(s, ords, leaves, r, f)?;
                    write!(f, ")")
                }
            }
        }
        go(s, &ords, &self.leaves, 0, f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::Parse(format!("{what} at byte {}", self.pos)))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected `{}`", c as char))
        }
    }

    fn tree(&mut self, nodes: &mut Vec<Node>, leaves: &mut Vec<Literal>) -> Result<()> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let me = nodes.len();
                nodes.push(Node::Leaf);
                self.tree(nodes, leaves)?;
                self.skip_ws();
                let conn = match self.src.get(self.pos) {
                    Some(b'&') => Connective::And,
                    Some(b'|') => Connective::Or,
                    _ => return self.err("expected `&` or `|`"),
                };
                self.pos += 1;
                let right = nodes.len() as u32;
                self.tree(nodes, leaves)?;
                self.expect(b')')?;
                nodes[me] = Node::Internal { conn, right };
                Ok(())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let id: u32 = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse("block id out of range".into()))?;
                if id == 0 {
                    return self.err("block ids start at 1");
                }
                self.expect(b':')?;
                let negated = match self.src.get(self.pos) {
                    Some(b'+') => false,
                    Some(b'-') => true,
                    _ => return self.err("expected `+` or `-`"),
                };
                self.pos += 1;
                nodes.push(Node::Leaf);
                leaves.push(Literal { block: id - 1, negated });
                Ok(())
            }
            _ => self.err("expected `(` or a literal"),
        }
    }
}

/// Parses a labelled tree and returns its class. Non-canonical labellings
/// are accepted and canonicalized.
impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Class> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let mut nodes = Vec::new();
        let mut leaves = Vec::new();
        p.tree(&mut nodes, &mut leaves)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("trailing input");
        }
        Class::new(Structure::from_nodes_unchecked(nodes), leaves)
    }
}
