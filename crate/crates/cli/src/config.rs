//! `key = value` run files whose keys are long flag names.

use std::path::Path;

use crate::error::{CliError, Result};

/// Parses run-file text into `--key value` pairs; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() || k == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Replaces `--config FILE` in `args` by the file's flags, placed right after
/// the subcommand so that explicit flags override them.
pub fn expand_args(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let mut args = args;
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err(CliError::Usage("--config needs a file".into()));
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let flags: Vec<String> = parse(&text)?
        .into_iter()
        .flat_map(|(k, v)| [format!("--{k}"), v])
        .collect();
    let at = args
        .iter()
        .position(|a| subcommands.contains(&a.as_str()))
        .map_or(args.len(), |i| i + 1);
    args.splice(at..at, flags);
    Ok(args)
}
