//! TOML config files. Each key mirrors a long flag; values become extra
//! arguments unless the flag is already on the command line.

use std::fs;

/// `argv` with the config file's settings appended.
pub fn inject(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let table: toml::Table = text.parse().map_err(|e| format!("bad config {path}: {e}"))?;
    let mut out = argv;
    let mut extra = Vec::new();
    for (key, value) in &table {
        let flag = format!("--{}", key.replace('_', "-"));
        if key == "command" {
            continue;
        }
        if out.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => extra.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                extra.push(flag);
                extra.push(parts.join(","));
            }
            other => {
                extra.push(flag);
                extra.push(scalar(other)?);
            }
        }
    }
    if let Some(cmd) = table.get("command") {
        let cmd = cmd.as_str().ok_or("config key `command` must be a string")?;
        if !has_subcommand(&out) {
            let words: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            out.splice(1..1, words);
        }
    }
    out.extend(extra);
    Ok(out)
}

fn scalar(v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(format!("unsupported config value {other}")),
    }
}

fn config_path(argv: &[String]) -> Result<Option<String>, String> {
    for (k, a) in argv.iter().enumerate() {
        if a == "--config" {
            return argv.get(k + 1).cloned().map(Some).ok_or_else(|| "--config needs a path".to_string());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

const SUBCOMMANDS: [&str; 8] = ["cycles", "trstar", "sigma-rs", "verify", "identities", "ortho", "span", "help"];

fn has_subcommand(argv: &[String]) -> bool {
    argv.iter().skip(1).any(|a| SUBCOMMANDS.contains(&a.as_str()))
}
