#![allow(dead_code)]

use std::path::{Path, PathBuf};

use koszul_cli::{Command, Format, RunConfig};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// One corpus line: the raw arguments and the parsed configuration.
pub struct Invocation {
    pub args: Vec<String>,
    pub cfg: RunConfig,
}

pub fn command_named(s: &str) -> Command {
    *Command::ALL.iter().find(|c| c.name() == s).unwrap_or_else(|| panic!("unknown command {s}"))
}

pub fn corpus() -> Vec<Invocation> {
    let text = std::fs::read_to_string(corpus_dir().join("commands.txt")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let words: Vec<&str> = l.split_whitespace().collect();
            let mut cfg = RunConfig::new(command_named(words[0]), corpus_dir().join(words[1]));
            let mut args = vec![words[0].to_string(), corpus_dir().join(words[1]).display().to_string()];
            let mut it = words[2..].chunks(2);
            for pair in &mut it {
                let (flag, value) = (pair[0], pair[1]);
                match flag {
                    "--module" => cfg.module = Some(value.into()),
                    "--complex" => cfg.complex = Some(value.into()),
                    "--window" => cfg.window = Some(value.parse().unwrap()),
                    "--index" => cfg.index = Some(value.parse().unwrap()),
                    _ => panic!("unexpected flag {flag}"),
                }
                args.push(format!("{flag}={value}"));
            }
            cfg.format = Format::Table;
            Invocation { args, cfg }
        })
        .collect()
}
