//! Merging a JSON config file into the argument vector.
//!
//! Config entries become `--key=value` tokens placed ahead of the user's own
//! flags; every subcommand overrides repeated flags, so the command line wins.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

/// Removes `--config` from `argv` and splices the file's entries back in.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let (mut rest, path) = take_config(argv)?;
    let Some(path) = path else {
        return Ok(rest);
    };
    let flags = flags_from_file(&path)?;
    // after the program name, the subcommand chain and any leading positionals
    let at = rest
        .iter()
        .skip(1)
        .position(|a| a.starts_with('-'))
        .map_or(rest.len(), |p| p + 1);
    rest.splice(at..at, flags);
    Ok(rest)
}

fn take_config(argv: Vec<String>) -> Result<(Vec<String>, Option<PathBuf>), CliError> {
    let mut out = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--" {
            out.push(arg);
            out.extend(it.by_ref());
            break;
        }
        if arg == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            out.push(arg);
        }
    }
    Ok((out, path))
}

fn flags_from_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Core(loynes::Error::Io(e)))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Core(loynes::Error::Format {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    })?;
    let object = match value {
        Value::Object(mut map) => match map.remove("parameters") {
            Some(Value::Object(params)) => params,
            Some(_) => {
                return Err(CliError::Usage(format!(
                    "{}: `parameters` must be an object",
                    path.display()
                )))
            }
            None => map,
        },
        _ => {
            return Err(CliError::Usage(format!(
                "{}: config must be a JSON object",
                path.display()
            )))
        }
    };
    let mut flags = Vec::new();
    for (key, value) in object {
        let flag = if key == "B" {
            "--B".to_string()
        } else {
            format!("--{}", key.replace('_', "-"))
        };
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(flag),
            Value::Array(items) => {
                if items.is_empty() {
                    continue;
                }
                let joined = items
                    .iter()
                    .map(|v| scalar(&key, v))
                    .collect::<Result<Vec<_>, _>>()?
                    .join(",");
                flags.push(format!("{flag}={joined}"));
            }
            v => flags.push(format!("{flag}={}", scalar(&key, &v)?)),
        }
    }
    Ok(flags)
}

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(CliError::Usage(format!(
            "config key `{key}`: unsupported value {v}"
        ))),
    }
}
