//! Flat `key = value` configuration files.
//!
//! A line `key = value` becomes the flag `--key value`; `key = true` becomes a
//! bare `--key` and `key = false` is dropped. Lines of the form `# key = value`
//! are read the same way, so the header block of an output CSV can be fed back
//! as a configuration. Reading stops at the first line that is neither blank,
//! a comment, nor an assignment (the column row of a CSV).

use std::ffi::OsString;
use std::path::Path;

use crate::CliError;

/// Keys written to output headers that are not flags.
const INFORMATIONAL: &[&str] = &["tool"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let (body, comment) = match line.strip_prefix('#') {
            Some(rest) => (rest.trim(), true),
            None => (line, false),
        };
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            if comment {
                continue;
            }
            break;
        };
        let key = k.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            if comment {
                continue;
            }
            return Err(CliError::Usage(format!("config line {}: malformed key {key:?}", no + 1)));
        }
        out.push(Entry { key: key.to_string(), value: v.trim().to_string() });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<Entry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

/// Flags for the entries, checking a `command` entry against `subcommand`.
pub fn to_flags(entries: &[Entry], subcommand: &str) -> Result<Vec<OsString>, CliError> {
    let mut flags = Vec::new();
    for e in entries {
        if INFORMATIONAL.contains(&e.key.as_str()) || e.key == "config" {
            continue;
        }
        if e.key == "command" {
            if e.value != subcommand {
                return Err(CliError::Usage(format!("config is for `{}`, not `{subcommand}`", e.value)));
            }
            continue;
        }
        match e.value.as_str() {
            "true" => flags.push(format!("--{}", e.key).into()),
            "false" => {}
            v => {
                flags.push(format!("--{}", e.key).into());
                flags.push(v.into());
            }
        }
    }
    Ok(flags)
}

/// Insert the configuration flags right after the subcommand so that any flag
/// given on the command line overrides them.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(argv);
    };
    let path: OsString = match argv[pos].to_string_lossy().strip_prefix("--config=") {
        Some(p) => p.into(),
        None => argv.get(pos + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a file".into()))?,
    };
    let Some(sub) = argv.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(argv);
    };
    let flags = to_flags(&load(Path::new(&path))?, &sub)?;
    let mut out = Vec::with_capacity(argv.len() + flags.len());
    out.extend_from_slice(&argv[..2]);
    out.extend(flags);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}
