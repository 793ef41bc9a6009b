use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trees::{Connective, Structure};

/// What a child of a production is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Recurse,
    Placeholder,
}

/// `conn(left, right)`; the single pattern leaf production is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Production {
    pub conn: Connective,
    pub left: Role,
    pub right: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grammar {
    pub name: String,
    pub productions: Vec<Production>,
}

/// A pattern language: a grammar, a composition `outer[inner]` (placeholders
/// of the outer language are filled by patterns of the inner one), or a
/// union whose pattern leaves are those of either side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternLang {
    Grammar(Grammar),
    Compose(Box<PatternLang>, Box<PatternLang>),
    Union(Box<PatternLang>, Box<PatternLang>),
}

/// Pattern leaves (leaf ordinal, level) and placeholder roots (node
/// positions) of one tree. Levels start at 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub pattern_leaves: Vec<(usize, u32)>,
    pub placeholders: Vec<usize>,
}

impl Decomposition {
    pub fn leaf_set(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pattern_leaves.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v
    }
}

fn prod(conn: Connective, left: Role, right: Role) -> Production {
    Production { conn, left, right }
}

impl PatternLang {
    pub fn grammar(name: &str, productions: Vec<Production>) -> PatternLang {
        PatternLang::Grammar(Grammar {
            name: name.to_string(),
            productions,
        })
    }

    /// `• | N or N | N and □`.
    pub fn n() -> PatternLang {
        use Role::*;
        PatternLang::grammar(
            "N",
            vec![
                prod(Connective::Or, Recurse, Recurse),
                prod(Connective::And, Recurse, Placeholder),
            ],
        )
    }

    /// Connective dual of [`PatternLang::n`].
    pub fn p() -> PatternLang {
        PatternLang::n().dual("P")
    }

    /// `• | S or S | □ and □`: leaves joined to the root by or-only paths.
    pub fn s() -> PatternLang {
        use Role::*;
        PatternLang::grammar(
            "S",
            vec![
                prod(Connective::Or, Recurse, Recurse),
                prod(Connective::And, Placeholder, Placeholder),
            ],
        )
    }

    /// Dual of [`PatternLang::s`]: and-only paths.
    pub fn s_dual() -> PatternLang {
        PatternLang::s().dual("S~")
    }

    /// `N[N[...[N]]]` with `j` levels.
    pub fn n_pow(j: u32) -> Result<PatternLang> {
        if j == 0 {
            return Err(Error::Domain("N_pow needs j >= 1".into()));
        }
        Ok((1..j).fold(PatternLang::n(), |acc, _| PatternLang::n().compose(acc)))
    }

    pub fn n_oplus_p() -> PatternLang {
        PatternLang::Union(Box::new(PatternLang::n()), Box::new(PatternLang::p()))
    }

    pub fn compose(self, inner: PatternLang) -> PatternLang {
        PatternLang::Compose(Box::new(self), Box::new(inner))
    }

    pub fn union(self, other: PatternLang) -> PatternLang {
        PatternLang::Union(Box::new(self), Box::new(other))
    }

    /// Swaps the connectives of every production.
    pub fn dual(&self, name: &str) -> PatternLang {
        match self {
            PatternLang::Grammar(g) => PatternLang::Grammar(Grammar {
                name: name.to_string(),
                productions: g
                    .productions
                    .iter()
                    .map(|p| Production {
                        conn: p.conn.dual(),
                        ..*p
                    })
                    .collect(),
            }),
            PatternLang::Compose(a, b) => a.dual(name).compose(b.dual(name)),
            PatternLang::Union(a, b) => a.dual(name).union(b.dual(name)),
        }
    }

    /// Number of levels contributed to composed languages.
    pub fn depth(&self) -> u32 {
        match self {
            PatternLang::Grammar(_) | PatternLang::Union(..) => 1,
            PatternLang::Compose(a, b) => a.depth() + b.depth(),
        }
    }

    /// Built-in language by name: `N`, `P`, `S`, `N_pow(j)`, `N_oplus_P`,
    /// or a composition `A[B]` of those.
    pub fn builtin(name: &str) -> Result<PatternLang> {
        name.parse()
    }

    pub fn decompose(&self, s: &Structure) -> Result<Decomposition> {
        self.decompose_at(s, 0)
    }

    /// Decomposition of the subtree rooted at node `root`.
    pub fn decompose_at(&self, s: &Structure, root: usize) -> Result<Decomposition> {
        let ords = s.leaf_ordinals();
        let mut out = Decomposition::default();
        self.decompose_into(s, &ords, root, 0, &mut out)?;
        Ok(out)
    }

    fn decompose_into(
        &self,
        s: &Structure,
        ords: &[Option<usize>],
        root: usize,
        level: u32,
        out: &mut Decomposition,
    ) -> Result<()> {
        match self {
            PatternLang::Grammar(g) => {
                let mut stack = vec![root];
                while let Some(i) = stack.pop() {
                    let Some((conn, l, r)) = s.children(i) else {
                        out.pattern_leaves.push((ords[i].unwrap(), level + 1));
                        continue;
                    };
                    let mut matching = g.productions.iter().filter(|p| p.conn == conn);
                    let p = matching.next().ok_or_else(|| Error::Ambiguous {
                        lang: g.name.clone(),
                        detail: format!("no production for `{}` at node {i}", conn.symbol()),
                    })?;
                    if matching.next().is_some() {
                        return Err(Error::Ambiguous {
                            lang: g.name.clone(),
                            detail: format!("two productions for `{}` at node {i}", conn.symbol()),
                        });
                    }
                    // right pushed first so leaves come out left to right
                    for (child, role) in [(r, p.right), (l, p.left)] {
                        match role {
                            Role::Recurse => stack.push(child),
                            Role::Placeholder => out.placeholders.push(child),
                        }
                    }
                }
                out.placeholders.sort_unstable();
                Ok(())
            }
            PatternLang::Compose(a, b) => {
                let mut outer = Decomposition::default();
                a.decompose_into(s, ords, root, level, &mut outer)?;
                out.pattern_leaves.extend(outer.pattern_leaves);
                for p in outer.placeholders {
                    b.decompose_into(s, ords, p, level + a.depth(), out)?;
                }
                out.placeholders.sort_unstable();
                Ok(())
            }
            PatternLang::Union(a, b) => {
                let mut da = Decomposition::default();
                let mut db = Decomposition::default();
                a.decompose_into(s, ords, root, level, &mut da)?;
                b.decompose_into(s, ords, root, level, &mut db)?;
                let mut leaves: Vec<usize> = da
                    .pattern_leaves
                    .iter()
                    .chain(&db.pattern_leaves)
                    .map(|p| p.0)
                    .collect();
                leaves.sort_unstable();
                leaves.dedup();
                out.pattern_leaves.extend(leaves.into_iter().map(|l| (l, level + 1)));
                // leaves under both an a-placeholder and a b-placeholder
                for &pa in &da.placeholders {
                    let ea = s.subtree_end(pa);
                    for &pb in &db.placeholders {
                        let eb = s.subtree_end(pb);
                        if pa <= pb && eb <= ea {
                            out.placeholders.push(pb);
                        } else if pb < pa && ea <= eb {
                            out.placeholders.push(pa);
                        }
                    }
                }
                out.placeholders.sort_unstable();
                out.placeholders.dedup();
                Ok(())
            }
        }
    }
}

impl fmt::Display for PatternLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternLang::Grammar(g) => write!(f, "{}", g.name),
            PatternLang::Compose(a, b) => write!(f, "{a}[{b}]"),
            PatternLang::Union(a, b) if **a == PatternLang::n() && **b == PatternLang::p() => {
                write!(f, "N_oplus_P")
            }
            PatternLang::Union(a, b) => write!(f, "({a}+{b})"),
        }
    }
}

impl FromStr for PatternLang {
    type Err = Error;

    fn from_str(s: &str) -> Result<PatternLang> {
        let s = s.trim();
        if let Some(open) = s.find('[') {
            let inner = s[open + 1..]
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("unbalanced `[` in `{s}`")))?;
            let outer: PatternLang = s[..open].parse()?;
            return Ok(outer.compose(inner.parse()?));
        }
        if let Some(j) = s.strip_prefix("N_pow(").and_then(|r| r.strip_suffix(')')) {
            let j: u32 = j
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            return PatternLang::n_pow(j);
        }
        match s {
            "N" => Ok(PatternLang::n()),
            "P" => Ok(PatternLang::p()),
            "S" => Ok(PatternLang::s()),
            "N_oplus_P" => Ok(PatternLang::n_oplus_p()),
            _ => Err(Error::Unknown {
                kind: "pattern language",
                name: s.to_string(),
            }),
        }
    }
}
