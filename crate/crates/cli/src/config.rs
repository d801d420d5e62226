use anyhow::{Context, Result};

use ciftn_core::sim::parse_key_values;

/// Splices `key=value` pairs from a `--config` file into `argv` right after
/// the subcommand, ahead of the user's own flags so that those win.
pub fn expand_args(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let injected: Vec<String> = parse_key_values(&text)?
        .into_iter()
        .map(|(k, v)| format!("--{}={v}", k.replace('_', "-")))
        .collect();
    Ok(splice(argv, injected))
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
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

fn splice(argv: Vec<String>, injected: Vec<String>) -> Vec<String> {
    // The subcommand is the first token that is neither a flag nor the value of --config.
    let mut pos = None;
    let mut skip_next = false;
    for (i, a) in argv.iter().enumerate().skip(1) {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--config" {
            skip_next = true;
            continue;
        }
        if !a.starts_with('-') {
            pos = Some(i + 1);
            break;
        }
    }
    let Some(pos) = pos else { return argv };
    let mut out = argv;
    out.splice(pos..pos, injected);
    out
}
