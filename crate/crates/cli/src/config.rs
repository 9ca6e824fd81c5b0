//! `key=value` run configuration files and their merge with flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sense_spectra::{PartOfSpeech, TrainConfig};

use crate::UsageError;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!(UsageError(format!("config line {}: expected key=value", n + 1)));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_kv(&text)
}

/// Training flags; `None` falls back to the config file, then defaults.
#[derive(Debug, Default, Clone)]
pub struct TrainFlags {
    pub pos: Option<PartOfSpeech>,
    pub dim: Option<usize>,
    pub steps: Option<u64>,
    pub lr: Option<f64>,
    pub t: Option<usize>,
    pub seed: Option<u64>,
    pub init_scale: Option<f64>,
    pub subset: Option<String>,
    pub log_interval: Option<u64>,
    pub checkpoint_interval: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub pos: PartOfSpeech,
    pub subset: Option<String>,
    pub config: TrainConfig,
}

impl TrainSettings {
    /// Resolved values as manifest entries.
    pub fn entries(&self) -> BTreeMap<String, String> {
        let c = &self.config;
        let mut m = BTreeMap::new();
        m.insert("pos".into(), self.pos.tag().to_string());
        m.insert("subset".into(), self.subset.clone().unwrap_or_default());
        m.insert("dim".into(), c.dim.to_string());
        m.insert("t".into(), c.t_per_strategy.to_string());
        m.insert("steps".into(), c.steps.to_string());
        m.insert("lr".into(), c.learning_rate.to_string());
        m.insert("beta1".into(), c.adam_beta1.to_string());
        m.insert("beta2".into(), c.adam_beta2.to_string());
        m.insert("epsilon".into(), c.adam_epsilon.to_string());
        m.insert("init_scale".into(), c.init_scale.to_string());
        m.insert("seed".into(), c.seed.to_string());
        m.insert("log_interval".into(), c.log_interval.to_string());
        m.insert("checkpoint_interval".into(), c.checkpoint_interval.to_string());
        m
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| UsageError(format!("config key {key}: cannot parse {value:?}")).into())
}

pub fn parse_pos(value: &str) -> Result<PartOfSpeech> {
    PartOfSpeech::from_tag(value).ok_or_else(|| UsageError(format!("unknown part of speech {value:?}")).into())
}

pub fn resolve_train(flags: &TrainFlags, file: &BTreeMap<String, String>) -> Result<TrainSettings> {
    let mut config = TrainConfig::default();
    let mut pos = PartOfSpeech::Noun;
    let mut subset = None;
    for (key, value) in file {
        match key.as_str() {
            "pos" => pos = parse_pos(value)?,
            "subset" => subset = (!value.is_empty()).then(|| value.clone()),
            "dim" => config.dim = parse_value(key, value)?,
            "t" => config.t_per_strategy = parse_value(key, value)?,
            "steps" => config.steps = parse_value(key, value)?,
            "lr" => config.learning_rate = parse_value(key, value)?,
            "beta1" => config.adam_beta1 = parse_value(key, value)?,
            "beta2" => config.adam_beta2 = parse_value(key, value)?,
            "epsilon" => config.adam_epsilon = parse_value(key, value)?,
            "init_scale" => config.init_scale = parse_value(key, value)?,
            "seed" => config.seed = parse_value(key, value)?,
            "log_interval" => config.log_interval = parse_value(key, value)?,
            "checkpoint_interval" => config.checkpoint_interval = parse_value(key, value)?,
            other => bail!(UsageError(format!("unknown config key {other:?}"))),
        }
    }
    if let Some(v) = flags.pos {
        pos = v;
    }
    if let Some(v) = &flags.subset {
        subset = Some(v.clone());
    }
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = flags.$flag { config.$field = v; })*
        };
    }
    apply!(dim => dim, steps => steps, lr => learning_rate, t => t_per_strategy, seed => seed,
        init_scale => init_scale, log_interval => log_interval, checkpoint_interval => checkpoint_interval);
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(TrainSettings { pos, subset, config })
}
