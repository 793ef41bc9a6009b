use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn dual(self) -> Connective {
        match self {
            Connective::And => Connective::Or,
            Connective::Or => Connective::And,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Connective::And => '&',
            Connective::Or => '|',
        }
    }

    #[inline]
    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            Connective::And => a & b,
            Connective::Or => a | b,
        }
    }
}

/// A node of a tree stored in preorder. The left child of an internal node
/// at position `i` is at `i + 1`; `right` is the position of the right child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf,
    Internal { conn: Connective, right: u32 },
}

/// A plane binary tree with connective-labelled internal nodes and
/// unlabelled leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    nodes: Vec<Node>,
}

impl Structure {
    pub fn leaf() -> Structure {
        Structure {
            nodes: vec![Node::Leaf],
        }
    }

    pub fn join(conn: Connective, left: &Structure, right: &Structure) -> Structure {
        let mut nodes = Vec::with_capacity(1 + left.nodes.len() + right.nodes.len());
        let off = 1 + left.nodes.len() as u32;
        nodes.push(Node::Internal { conn, right: off });
        let shifted = |nodes: &[Node], by: u32| -> Vec<Node> {
            nodes
                .iter()
                .map(|n| match *n {
                    Node::Internal { conn, right } => Node::Internal {
                        conn,
                        right: right + by,
                    },
                    Node::Leaf => Node::Leaf,
                })
                .collect()
        };
        nodes.extend(shifted(&left.nodes, 1));
        nodes.extend(shifted(&right.nodes, off));
        Structure { nodes }
    }

    /// Validates a preorder node array.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Structure> {
        if nodes.is_empty() {
            return Err(Error::Parse("empty structure".into()));
        }
        fn check(nodes: &[Node], i: usize) -> Option<usize> {
            match *nodes.get(i)? {
                Node::Leaf => Some(i + 1),
                Node::Internal { right, .. } => {
                    let end = check(nodes, i + 1)?;
                    (end == right as usize).then_some(())?;
                    check(nodes, end)
                }
            }
        }
        match check(&nodes, 0) {
            Some(end) if end == nodes.len() => Ok(Structure { nodes }),
            _ => Err(Error::Parse("malformed preorder node array".into())),
        }
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Structure {
        Structure { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        self.nodes.len().div_ceil(2)
    }

    pub fn root_connective(&self) -> Option<Connective> {
        match self.nodes[0] {
            Node::Leaf => None,
            Node::Internal { conn, .. } => Some(conn),
        }
    }

    /// `(connective, left, right)` positions of an internal node.
    pub fn children(&self, i: usize) -> Option<(Connective, usize, usize)> {
        match self.nodes[i] {
            Node::Leaf => None,
            Node::Internal { conn, right } => Some((conn, i + 1, right as usize)),
        }
    }

    /// One past the last preorder position of the subtree rooted at `i`.
    pub fn subtree_end(&self, mut i: usize) -> usize {
        while let Node::Internal { right, .. } = self.nodes[i] {
            i = right as usize;
        }
        i + 1
    }

    /// Left-to-right index of the first leaf of the subtree at `i`.
    pub fn first_leaf_index(&self, i: usize) -> usize {
        // every internal node before `i` in preorder precedes one more leaf
        let internals = self.nodes[..i]
            .iter()
            .filter(|n| matches!(n, Node::Internal { .. }))
            .count();
        i - internals
    }

    /// Number of leaves of the subtree at `i`.
    pub fn size_at(&self, i: usize) -> usize {
        (self.subtree_end(i) - i).div_ceil(2)
    }

    /// Leaf ordinal of every position (`None` for internal nodes).
    pub fn leaf_ordinals(&self) -> Vec<Option<usize>> {
        let mut k = 0;
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Leaf => {
                    k += 1;
                    Some(k - 1)
                }
                Node::Internal { .. } => None,
            })
            .collect()
    }

    /// Copy of the subtree rooted at position `i`.
    pub fn subtree(&self, i: usize) -> Structure {
        let end = self.subtree_end(i);
        let nodes = self.nodes[i..end]
            .iter()
            .map(|n| match *n {
                Node::Internal { conn, right } => Node::Internal {
                    conn,
                    right: right - i as u32,
                },
                Node::Leaf => Node::Leaf,
            })
            .collect();
        Structure { nodes }
    }

    pub fn split(&self) -> Option<(Connective, Structure, Structure)> {
        let (conn, l, r) = self.children(0)?;
        Some((conn, self.subtree(l), self.subtree(r)))
    }

    /// Swaps every connective.
    pub fn dual(&self) -> Structure {
        Structure {
            nodes: self
                .nodes
                .iter()
                .map(|n| match *n {
                    Node::Internal { conn, right } => Node::Internal {
                        conn: conn.dual(),
                        right,
                    },
                    Node::Leaf => Node::Leaf,
                })
                .collect(),
        }
    }

    /// Depth of every node; the root has depth 0.
    pub fn depths(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if let Node::Internal { right, .. } = self.nodes[i] {
                d[i + 1] = d[i] + 1;
                d[right as usize] = d[i] + 1;
            }
        }
        d
    }

    /// Parent position of every node (`usize::MAX` for the root).
    pub fn parents(&self) -> Vec<usize> {
        let mut p = vec![usize::MAX; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if let Node::Internal { right, .. } = self.nodes[i] {
                p[i + 1] = i;
                p[right as usize] = i;
            }
        }
        p
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(s: &Structure, i: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match s.children(i) {
                None => write!(f, "*"),
                Some((c, l, r)) => {
                    write!(f, "(")?;
                    go(s, l, f)?;
                    write!(f, " {} ", c.symbol())?;
                    go(s, r, f)?;
                    write!(f, ")")
                }
            }
        }
        go(self, 0, f)
    }
}

/// All structures of size `n` in a fixed recursive order: root connective
/// (`And` before `Or`), then left size, then left and right structures.
pub fn all_structures(n: usize) -> Vec<Structure> {
    let mut table: Vec<Vec<Structure>> = vec![Vec::new(), vec![Structure::leaf()]];
    for m in 2..=n {
        let mut out = Vec::new();
        for conn in [Connective::And, Connective::Or] {
            for i in 1..m {
                for l in &table[i] {
                    for r in &table[m - i] {
                        out.push(Structure::join(conn, l, r));
                    }
                }
            }
        }
        table.push(out);
    }
    if n == 0 {
        Vec::new()
    } else {
        table.swap_remove(n)
    }
}

/// Streams [`all_structures`].
pub fn enumerate_structures(n: usize) -> impl Iterator<Item = Structure> {
    all_structures(n).into_iter()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let want = [0usize, 1, 2, 8, 40, 224, 1344];
        for n in 1..=6 {
            assert_eq!(enumerate_structures(n).count(), want[n], "n={n}");
        }
    }

    #[test]
    fn order_and_shape() {
        let s2 = all_structures(2);
        assert_eq!(s2[0].root_connective(), Some(Connective::And));
        assert_eq!(s2[1].root_connective(), Some(Connective::Or));
        let s3 = all_structures(3);
        assert_eq!(s3[0].to_string(), "(* & (* & *))");
        for s in &s3 {
            assert_eq!(s.size(), 3);
            assert_eq!(Structure::from_nodes(s.nodes().to_vec()).unwrap(), *s);
        }
        assert!(Structure::from_nodes(vec![Node::Internal { conn: Connective::And, right: 2 }, Node::Leaf]).is_err());
    }

    #[test]
    fn subtree_helpers() {
        let s = all_structures(5).into_iter().nth(17).unwrap();
        let (_, l, r) = s.split().unwrap();
        assert_eq!(l.size() + r.size(), 5);
        assert_eq!(s.subtree_end(0), s.nodes().len());
        let ords = s.leaf_ordinals();
        for (i, o) in ords.iter().enumerate() {
            if let Some(o) = o {
                assert_eq!(s.first_leaf_index(i), *o);
            }
        }
        assert_eq!(s.dual().dual(), s);
    }
}
