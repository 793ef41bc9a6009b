use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::patterns::{classify_simple_x, is_simple_tautology, repetitions, PatternLang, SimpleX};
use crate::trees::{class_key, Analyzer, Class, FunctionKey, Verdict};

/// A predicate on classes whose probability is estimated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Satisfiable,
    IsTrue,
    IsFalse,
    IsSimpleTautology,
    IsSimpleX,
    MatchesKey(FunctionKey),
    HasRepetitions(PatternLang, usize),
}

impl Event {
    /// `None` when the decision procedure ran out of budget.
    pub fn test(&self, c: &Class, analyzer: &mut Analyzer) -> Result<Option<bool>> {
        let v = match self {
            Event::Satisfiable => analyzer.satisfiable(c),
            Event::IsTrue => analyzer.is_true(c),
            Event::IsFalse => analyzer.is_false(c),
            Event::MatchesKey(k) => analyzer.matches_key(c, k),
            Event::IsSimpleTautology => return Ok(Some(is_simple_tautology(c))),
            Event::IsSimpleX => return Ok(Some(classify_simple_x(c) != SimpleX::None)),
            Event::HasRepetitions(lang, r) => return Ok(Some(repetitions(lang, c)? >= *r)),
        };
        Ok(match v {
            Verdict::Yes => Some(true),
            Verdict::No => Some(false),
            Verdict::Unknown => None,
        })
    }

    /// Parses a comma-separated list; commas inside parentheses or brackets
    /// do not split.
    pub fn parse_list(s: &str) -> Result<Vec<Event>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    out.push(s[start..i].parse()?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !s[start..].trim().is_empty() {
            out.push(s[start..].parse()?);
        }
        Ok(out)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Satisfiable => write!(f, "satisfiable"),
            Event::IsTrue => write!(f, "is_true"),
            Event::IsFalse => write!(f, "is_false"),
            Event::IsSimpleTautology => write!(f, "is_simple_tautology"),
            Event::IsSimpleX => write!(f, "is_simple_x"),
            Event::MatchesKey(k) => write!(f, "matches_key({k})"),
            Event::HasRepetitions(l, r) => write!(f, "has_repetitions({l};{r})"),
        }
    }
}

fn args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

impl FromStr for Event {
    type Err = Error;

    /// `matches_key` takes a key (`E2:8`) or a class (`(1:+ & 2:+)`);
    /// `has_repetitions` takes `lang;r` or `lang,r`.
    fn from_str(s: &str) -> Result<Event> {
        let s = s.trim();
        if let Some(a) = args(s, "matches_key") {
            let a = a.trim();
            let key = match a.parse::<FunctionKey>() {
                Ok(k) => k,
                Err(_) => {
                    let c: Class = a
                        .parse()
                        .map_err(|_| Error::Parse(format!("`{a}` is neither a function key nor a class")))?;
                    class_key(&c)?
                }
            };
            return Ok(Event::MatchesKey(key));
        }
        if let Some(a) = args(s, "has_repetitions") {
            let cut = a
                .rfind([';', ','])
                .ok_or_else(|| Error::Parse(format!("has_repetitions needs `lang;r`, got `{a}`")))?;
            let lang: PatternLang = a[..cut].parse()?;
            let r = a[cut + 1..]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad repetition count in `{s}`")))?;
            return Ok(Event::HasRepetitions(lang, r));
        }
        match s {
            "satisfiable" => Ok(Event::Satisfiable),
            "is_true" => Ok(Event::IsTrue),
            "is_false" => Ok(Event::IsFalse),
            "is_simple_tautology" => Ok(Event::IsSimpleTautology),
            "is_simple_x" => Ok(Event::IsSimpleX),
            _ => Err(Error::Unknown { kind: "event", name: s.to_string() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in [
            "satisfiable",
            "is_true",
            "is_false",
            "is_simple_tautology",
            "is_simple_x",
            "matches_key(E1:2)",
            "has_repetitions(N[N];1)",
        ] {
            let e: Event = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        let e: Event = "matches_key((1:+ & 2:+))".parse().unwrap();
        assert_eq!(e, Event::MatchesKey(class_key(&"(1:+ & 2:+)".parse().unwrap()).unwrap()));
        assert!("nope".parse::<Event>().is_err());
        let list = Event::parse_list("is_true, has_repetitions(N,2),matches_key(E1:2)").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(list[1], Event::HasRepetitions(PatternLang::n(), 2));
    }

    #[test]
    fn tests_on_small_classes() {
        let mut a = Analyzer::default();
        let c: Class = "(1:+ & 1:-)".parse().unwrap();
        assert_eq!(Event::Satisfiable.test(&c, &mut a).unwrap(), Some(false));
        assert_eq!(Event::IsFalse.test(&c, &mut a).unwrap(), Some(true));
        let x: Event = "matches_key(E1:2)".parse().unwrap();
        assert_eq!(x.test(&"(1:+ | (1:+ & 2:+))".parse().unwrap(), &mut a).unwrap(), Some(true));
    }
}
