//! Optional `--config` file: `key = value` lines with the long flag names.
//!
//! Entries are spliced into the argument list right after the subcommand,
//! ahead of the user's own flags; since every flag overrides itself, the
//! command line wins.

use std::fs;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 9] = [
    "gen",
    "lz",
    "typical",
    "ec",
    "coarse-ec",
    "khat",
    "sweep-theorem1",
    "scan-max-coarse",
    "selftest",
];

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Flag arguments for the lines of a config file.
pub fn parse(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", i + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key == "config" {
            bail!("config line {}: bad key {key:?}", i + 1);
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading --config {path}"))?;
    let extra = parse(&text).with_context(|| format!("in --config {path}"))?;
    let at = argv
        .iter()
        .skip(1)
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or(argv.len(), |p| p + 2);
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
