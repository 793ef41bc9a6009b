//! `--config FILE`: `key=value` lines supplying defaults for long flags.
//!
//! Precedence, highest first: command line, environment, config file,
//! built-in default. The key `command` names the subcommand when the command
//! line has none.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use super::{Cli, ENV_ENUM_BUDGET, ENV_EXACT_CUTOFF, ENV_EXACT_WORK};
use crate::error::{Error, Result};

const ENV_BACKED: [(&str, &str); 3] = [
    ("exact-cutoff", ENV_EXACT_CUTOFF),
    ("exact-work", ENV_EXACT_WORK),
    ("enum-budget", ENV_ENUM_BUDGET),
];

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped and
/// `_` in keys reads as `-`.
pub fn parse_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("config file {}: {e}", path.display())))?;
    parse_text(&text)
}

fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value, got `{line}`", i + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn given(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter().skip(1).any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&format!("{flag}="))
    })
}

/// `args` with the entries of the config file spliced in right after the
/// subcommand name, skipping keys given on the command line or by the
/// environment.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let entries = parse_file(Path::new(&path))?;
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let position = args
        .iter()
        .skip(1)
        .position(|a| names.iter().any(|n| a.to_string_lossy() == n.as_str()))
        .map(|p| p + 2);
    let mut command = None;
    let mut extra = Vec::new();
    for (k, v) in entries {
        if k == "command" {
            command = Some(v);
            continue;
        }
        if k == "config" || given(&args, &k) {
            continue;
        }
        if ENV_BACKED.iter().any(|(f, e)| *f == k && std::env::var_os(e).is_some()) {
            continue;
        }
        extra.push(OsString::from(format!("--{k}={v}")));
    }
    let mut args = args;
    match (position, command) {
        (Some(p), _) => {
            args.splice(p..p, extra);
        }
        (None, Some(c)) => {
            args.push(c.into());
            args.extend(extra);
        }
        (None, None) => {}
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parsing() {
        let e = parse_text("# c\n\nn = 3\nenum_budget=5\n").unwrap();
        assert_eq!(e, [("n".into(), "3".into()), ("enum-budget".into(), "5".into())]);
        assert!(parse_text("oops").is_err());
    }

    #[test]
    fn splice_and_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "n=3\nk=2\ncommand=count\n").unwrap();
        let p = path.to_str().unwrap();
        let merged = merge(os(&["andor", "--config", p, "count", "--k", "1"])).unwrap();
        assert_eq!(merged, os(&["andor", "--config", p, "count", "--n=3", "--k", "1"]));
        let merged = merge(os(&["andor", "--config", p])).unwrap();
        assert_eq!(merged, os(&["andor", "--config", p, "count", "--n=3", "--k=2"]));
        assert!(merge(os(&["andor", "--config", "/no/such/file", "count"])).is_err());
    }
}
