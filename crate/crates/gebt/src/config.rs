//! Flat `key=value` run configuration.

use std::fs;
use std::path::Path;

use gebt_core::{Criterion, DetectorConfig, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, GebtError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub lr_weights: f64,
    pub lr_graph: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub seed: u64,
    pub lambda_reg: f64,
    pub p_g: f64,
    pub p_w: f64,
    pub eta: f64,
    pub queue_len: usize,
    #[serde(serialize_with = "criterion_name", deserialize_with = "criterion_from_name")]
    pub criterion: Criterion,
    pub warmup_skip: usize,
    pub backward_factor: f64,
    pub reinit_joint_weights: bool,
    pub per_layer_weight_mask: bool,
    pub freeze_degrees: bool,
    pub normalize_features: bool,
    pub bytes_per_value: u64,
}

fn criterion_name<S: serde::Serializer>(c: &Criterion, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.as_str())
}

fn criterion_from_name<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Criterion, D::Error> {
    let s = String::deserialize(d)?;
    Criterion::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown criterion {s:?}")))
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let d = DetectorConfig::default();
        Self {
            hidden: t.hidden,
            epochs: t.epochs,
            lr_weights: t.lr_weights,
            lr_graph: t.lr_graph,
            weight_decay: t.weight_decay,
            dropout: t.dropout,
            seed: t.seed,
            lambda_reg: t.lambda_reg,
            p_g: 0.0,
            p_w: 0.0,
            eta: d.eta,
            queue_len: d.queue_len,
            criterion: d.criterion,
            warmup_skip: d.warmup_skip,
            backward_factor: 2.0,
            reinit_joint_weights: false,
            per_layer_weight_mask: false,
            freeze_degrees: false,
            normalize_features: true,
            bytes_per_value: 4,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| GebtError::Config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "hidden",
        "epochs",
        "lr_weights",
        "lr_graph",
        "weight_decay",
        "dropout",
        "seed",
        "lambda_reg",
        "p_g",
        "p_w",
        "eta",
        "queue_len",
        "criterion",
        "warmup_skip",
        "backward_factor",
        "reinit_joint_weights",
        "per_layer_weight_mask",
        "freeze_degrees",
        "normalize_features",
        "bytes_per_value",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "hidden" => self.hidden = parse(key, v)?,
            "epochs" => self.epochs = parse(key, v)?,
            "lr_weights" => self.lr_weights = parse(key, v)?,
            "lr_graph" => self.lr_graph = parse(key, v)?,
            "weight_decay" => self.weight_decay = parse(key, v)?,
            "dropout" => self.dropout = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "lambda_reg" => self.lambda_reg = parse(key, v)?,
            "p_g" => self.p_g = parse(key, v)?,
            "p_w" => self.p_w = parse(key, v)?,
            "eta" => self.eta = parse(key, v)?,
            "queue_len" => self.queue_len = parse(key, v)?,
            "criterion" => {
                self.criterion = Criterion::parse(v)
                    .ok_or_else(|| GebtError::Config(format!("criterion: expected graph|network|sum, got {v:?}")))?
            }
            "warmup_skip" => self.warmup_skip = parse(key, v)?,
            "backward_factor" => self.backward_factor = parse(key, v)?,
            "reinit_joint_weights" => self.reinit_joint_weights = parse(key, v)?,
            "per_layer_weight_mask" => self.per_layer_weight_mask = parse(key, v)?,
            "freeze_degrees" => self.freeze_degrees = parse(key, v)?,
            "normalize_features" => self.normalize_features = parse(key, v)?,
            "bytes_per_value" => self.bytes_per_value = parse(key, v)?,
            _ => return Err(GebtError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| GebtError::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::default();
        cfg.apply_text(&fs::read_to_string(path).map_err(io_at(path))?)?;
        Ok(cfg)
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            hidden: self.hidden,
            epochs: self.epochs,
            lr_weights: self.lr_weights,
            lr_graph: self.lr_graph,
            weight_decay: self.weight_decay,
            dropout: self.dropout,
            seed: self.seed,
            lambda_reg: self.lambda_reg,
        }
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            queue_len: self.queue_len,
            eta: self.eta,
            criterion: self.criterion,
            warmup_skip: self.warmup_skip,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train().validate().map_err(|e| GebtError::Config(e.to_string()))?;
        for (name, p) in [("p_g", self.p_g), ("p_w", self.p_w)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GebtError::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.queue_len == 0 {
            return Err(GebtError::Config("queue_len must be at least 1".into()));
        }
        if !self.eta.is_finite() {
            return Err(GebtError::Config("eta must be finite".into()));
        }
        if !(self.backward_factor.is_finite() && self.backward_factor >= 0.0) {
            return Err(GebtError::Config("backward_factor must be a finite nonnegative number".into()));
        }
        Ok(())
    }
}
