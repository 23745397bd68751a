//! Config files: TOML tables flattened into command-line flags.
//!
//! A key `k` in table `t` becomes `--k`, except `kind`, `path`, `size` and `format`,
//! which become `--t` (so `[ideal] kind = "density-zero"` is `--ideal density-zero`),
//! and `[ideal] threshold`, which becomes `--density-threshold`. A table named after a
//! subcommand applies only to that subcommand. Flags given on the command line win.

use std::path::Path;

use crate::error::{Error, Result};

/// One flag with its values (repeated flags for arrays, none for `true`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigFlag {
    pub section: Option<String>,
    pub flag: String,
    pub values: Vec<String>,
}

fn scalar(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => {
            return Err(Error::InvalidParam(format!(
                "config value {other} must be a string, number or boolean"
            )))
        }
    })
}

fn flag_name(section: Option<&str>, key: &str) -> String {
    match (section, key) {
        (Some(t), "kind" | "path" | "size" | "format") => t.replace('_', "-"),
        (Some("ideal"), "threshold") => "density-threshold".into(),
        (_, k) => k.replace('_', "-"),
    }
}

fn push(
    out: &mut Vec<ConfigFlag>,
    section: Option<&str>,
    key: &str,
    v: &toml::Value,
) -> Result<()> {
    let flag = flag_name(section, key);
    let values = match v {
        toml::Value::Boolean(false) => return Ok(()),
        toml::Value::Boolean(true) => Vec::new(),
        toml::Value::Array(items) => items.iter().map(scalar).collect::<Result<_>>()?,
        toml::Value::Table(_) => {
            return Err(Error::InvalidParam(format!(
                "config table nested too deep at `{key}`"
            )))
        }
        other => vec![scalar(other)?],
    };
    out.push(ConfigFlag {
        section: section.map(str::to_string),
        flag,
        values,
    });
    Ok(())
}

/// Flattens config text into flags, tables and keys in sorted order.
pub fn parse_config(text: &str) -> Result<Vec<ConfigFlag>> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::InvalidParam(format!("config: {}", e.message())))?;
    let mut out = Vec::new();
    for (key, v) in &table {
        match v {
            toml::Value::Table(inner) => {
                for (k, w) in inner {
                    push(&mut out, Some(key), k, w)?;
                }
            }
            _ => push(&mut out, None, key, v)?,
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<ConfigFlag>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Inserts config flags after the subcommand token of `argv`.
///
/// `known(cmd, flag)` tells whether a subcommand accepts a flag. Flags present in `argv`,
/// flags the subcommand lacks, and tables for other subcommands are skipped; a flag no
/// subcommand accepts is an error.
pub fn merge_args(
    argv: &[String],
    flags: &[ConfigFlag],
    subcommands: &[&str],
    known: impl Fn(&str, &str) -> bool,
) -> Result<Vec<String>> {
    let Some(pos) = argv
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
    else {
        return Ok(argv.to_vec());
    };
    let pos = pos + 1;
    let cmd = argv[pos].as_str();
    let given = |flag: &str| {
        let long = format!("--{flag}");
        let eq = format!("--{flag}=");
        argv[pos + 1..]
            .iter()
            .any(|a| *a == long || a.starts_with(&eq))
    };
    let mut inserted = Vec::new();
    for f in flags {
        if let Some(s) = &f.section {
            if subcommands.contains(&s.as_str()) && s != cmd {
                continue;
            }
        }
        if !subcommands.iter().any(|c| known(c, &f.flag)) {
            return Err(Error::InvalidParam(format!(
                "config key `{}` matches no flag",
                f.flag
            )));
        }
        if !known(cmd, &f.flag) || given(&f.flag) {
            continue;
        }
        if f.values.is_empty() {
            inserted.push(format!("--{}", f.flag));
        }
        for v in &f.values {
            inserted.push(format!("--{}={v}", f.flag));
        }
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(inserted);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn flattens_tables() {
        let flags = parse_config(
            "[group]\nkind = \"cyclic\"\norder = 12\n[ideal]\nkind = \"density-zero\"\nlengths = [64, 256]\nthreshold = 0.02\n[pack]\nexact = true\n",
        )
        .unwrap();
        let names: Vec<_> = flags.iter().map(|f| f.flag.as_str()).collect();
        assert_eq!(
            names,
            [
                "group",
                "order",
                "ideal",
                "lengths",
                "density-threshold",
                "exact"
            ]
        );
        assert_eq!(flags[3].values, ["64", "256"]);
        assert!(flags[5].values.is_empty());
    }

    #[test]
    fn command_line_wins() {
        let flags = parse_config("n = 3\nwindow = 100\n").unwrap();
        let known = |_: &str, f: &str| f == "n" || f == "window";
        let out = merge_args(&args("ip pack --n 2"), &flags, &["pack"], known).unwrap();
        assert_eq!(out, args("ip pack --window=100 --n 2"));
    }

    #[test]
    fn foreign_tables_and_flags() {
        let flags = parse_config("[small]\nm = 2\n[pack]\nexact = true\n").unwrap();
        let known = |c: &str, f: &str| (c, f) == ("small", "m") || (c, f) == ("pack", "exact");
        let out = merge_args(&args("ip small"), &flags, &["pack", "small"], known).unwrap();
        assert_eq!(out, args("ip small --m=2"));
        let bogus = parse_config("frobnicate = 1\n").unwrap();
        assert!(merge_args(&args("ip small"), &bogus, &["pack", "small"], known).is_err());
    }

    #[test]
    fn bad_toml() {
        assert!(parse_config("[x\n").is_err());
        assert!(parse_config("a = { b = { c = 1 } }\n").is_err());
    }
}
