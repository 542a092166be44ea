//! Scenario configuration assembled from a TOML file, preset flags and
//! `key=value` overrides on dotted config keys.

use std::path::Path;

use endophy::montecarlo::{Sampling, Scenario, ScenarioConfig};
use toml::{Table, Value};

use crate::args::Common;
use crate::Failure;

/// Dotted paths of every leaf in `table`.
pub fn leaf_keys(table: &Table) -> Vec<String> {
    let mut out = Vec::new();
    fn walk(prefix: &str, t: &Table, out: &mut Vec<String>) {
        for (k, v) in t {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(inner) => walk(&key, inner, out),
                _ => out.push(key),
            }
        }
    }
    walk("", table, &mut out);
    out.sort();
    out
}

fn parse_value(raw: &str) -> Value {
    // Anything TOML can read as a scalar or array keeps its type; the rest is a string.
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies `key=value` to `table`, rejecting keys that are not leaves.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<(), Failure> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    let valid = leaf_keys(table);
    if !valid.iter().any(|k| k == key) {
        return Err(Failure::Usage(format!(
            "unknown config key `{key}`; valid keys: {}",
            valid.join(", ")
        )));
    }
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut t = table;
    for p in parts {
        t = t.get_mut(p).and_then(Value::as_table_mut).expect("validated path");
    }
    t.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

fn to_table(cfg: &ScenarioConfig) -> Table {
    Table::try_from(cfg).expect("scenario config serializes to a table")
}

fn from_table(t: Table) -> Result<ScenarioConfig, Failure> {
    t.try_into()
        .map_err(|e: toml::de::Error| Failure::Usage(format!("invalid configuration: {}", e.message())))
}

/// Resolves the scenario configuration for a verb.
pub fn resolve(c: &Common) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => read_file(path)?,
        None => ScenarioConfig::default(),
    };
    if c.scenario.is_some() || c.sampling.is_some() {
        let scenario: Scenario = match &c.scenario {
            Some(s) => s.parse().map_err(|e: endophy::Error| Failure::Usage(e.to_string()))?,
            None => cfg.scenario,
        };
        let sampling: Sampling = match &c.sampling {
            Some(s) => s.parse().map_err(|e: endophy::Error| Failure::Usage(e.to_string()))?,
            None => cfg.sampling,
        };
        if c.config.is_some() {
            cfg.scenario = scenario;
            cfg.sampling = sampling;
        } else {
            cfg = ScenarioConfig::preset(scenario, sampling);
        }
    }
    if let Some(r) = c.reps {
        cfg.reps = r;
    }
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if let Some(t) = c.theta {
        cfg.theta = t;
    }
    if !c.overrides.is_empty() {
        let mut t = to_table(&cfg);
        for o in &c.overrides {
            apply_override(&mut t, o)?;
        }
        cfg = from_table(t)?;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn read_file(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let t: Table = toml::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {} is not valid TOML: {}", path.display(), e.message())))?;
    from_table(t)
}
