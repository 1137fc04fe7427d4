//! Flat `key = value` experiment files.
//!
//! ```text
//! # comment
//! model = 7:0:0.501, 5:0:0.5
//! n_values = 300
//! sigma2_values = 1
//! methods = lse_joint, seq_lse, seq_alse
//! replications = 500
//! base_seed = 2024
//! oracle_init = false
//! record_timing = false
//! output_path = out/4c-3
//! ```
//!
//! Lists are comma separated. Keys not present keep the value of the base
//! configuration they are applied to.

use std::path::PathBuf;
use std::str::FromStr;

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::signal::{ChirpComponent, ChirpModel};

/// Parses `a_re:a_im:beta[,a_re:a_im:beta…]`.
pub fn parse_components(text: &str) -> Result<ChirpModel> {
    let mut comps = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("component `{item}` is not a_re:a_im:beta")));
        }
        let v = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| Error::Parse(format!("`{p}` in `{item}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        comps.push(ChirpComponent::new(v[0], v[1], v[2]));
    }
    if comps.is_empty() {
        return Err(Error::Parse("no components given".into()));
    }
    ChirpModel::new(comps)
}

pub fn format_components(model: &ChirpModel) -> String {
    model
        .components()
        .iter()
        .map(|c| format!("{}:{}:{}", c.a_re, c.a_im, c.beta))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::Parse(format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::Parse(format!("{key}: cannot parse `{value}`")))
}

/// Applies the assignments in `text` on top of `base`.
pub fn apply_config(mut cfg: ExperimentConfig, text: &str) -> Result<ExperimentConfig> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "model" => cfg.model = parse_components(value)?,
            "n_values" => cfg.n_values = parse_list(key, value)?,
            "sigma2_values" => cfg.sigma2_values = parse_list(key, value)?,
            "methods" => cfg.methods = parse_list::<Method>(key, value)?,
            "replications" => cfg.replications = parse_one(key, value)?,
            "base_seed" => cfg.base_seed = parse_one(key, value)?,
            "oracle_init" => cfg.oracle_init = parse_one(key, value)?,
            "record_timing" => cfg.record_timing = parse_one(key, value)?,
            "output_path" => cfg.output_path = Some(PathBuf::from(value)),
            other => return Err(Error::Parse(format!("line {}: unknown key `{other}`", lineno + 1))),
        }
    }
    Ok(cfg)
}

/// Parses a complete configuration; `model` is required.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg = apply_config(ExperimentConfig::default(), text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Renders `cfg` in the same grammar; `parse_config` reads it back unchanged.
pub fn to_config_text(cfg: &ExperimentConfig) -> String {
    let join = |v: Vec<String>| v.join(",");
    let mut out = String::new();
    out.push_str(&format!("model = {}\n", format_components(&cfg.model)));
    out.push_str(&format!("n_values = {}\n", join(cfg.n_values.iter().map(|n| n.to_string()).collect())));
    out.push_str(&format!(
        "sigma2_values = {}\n",
        join(cfg.sigma2_values.iter().map(|s| s.to_string()).collect())
    ));
    out.push_str(&format!("methods = {}\n", join(cfg.methods.iter().map(|m| m.to_string()).collect())));
    out.push_str(&format!("replications = {}\n", cfg.replications));
    out.push_str(&format!("base_seed = {}\n", cfg.base_seed));
    out.push_str(&format!("oracle_init = {}\n", cfg.oracle_init));
    out.push_str(&format!("record_timing = {}\n", cfg.record_timing));
    if let Some(p) = &cfg.output_path {
        out.push_str(&format!("output_path = {}\n", p.display()));
    }
    out
}
