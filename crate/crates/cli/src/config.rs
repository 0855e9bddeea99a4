//! Flat `key = value` run configuration with layered resolution.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use awwsvm::optimizers::{OptimizerParams, StepSchedule};
use awwsvm::{preset, NoiseMode, OptimizerKind, TrainConfig64, WeightMode};

use crate::error::CliError;

/// Every key a configuration file may set, with its default and meaning.
/// Optimizer-dependent defaults (`alpha0`, `tau`, `mu`, `lambda`, `eps_h`,
/// `inner_iters`, `batch_size`) are filled from the chosen optimizer and
/// the optional dataset preset.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("data", "", "training file in LIBSVM format"),
    ("test_data", "", "evaluation file; when empty the training file is split"),
    ("split", "0.2", "held-out fraction when no evaluation file is given"),
    ("preset", "", "dataset name whose step budget and batch size seed the defaults"),
    ("optimizer", "sgd", "sgd | obfgs | onaq"),
    ("adaptive", "false", "enable the adaptive weighting loop"),
    ("weight_mode", "regularizer", "regularizer | hinge"),
    ("noise_mode", "signed-side", "signed-side | raw-dot"),
    ("sigma", "1", "width of the Gaussian weight term"),
    ("c", "1", "regularization constant"),
    ("alpha0", "*", "initial step size"),
    ("tau", "*", "step decay offset (obfgs)"),
    ("mu", "*", "momentum (onaq)"),
    ("lambda", "*", "curvature damping"),
    ("eps_h", "*", "initial inverse-Hessian scale"),
    ("outer_iters", "10", "weight-update rounds"),
    ("inner_iters", "*", "optimizer steps per round"),
    ("batch_size", "*", "minibatch size"),
    ("fit_bias", "true", "learn an intercept"),
    ("seed", "0", "random seed for splitting and sampling"),
    ("jobs", "1", "worker threads for sweeps"),
    ("out", "out", "output directory (falls back to AWWSVM_OUT)"),
    ("verbose", "false", "per-iteration progress and weight trace"),
];

pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

pub fn is_known_key(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

/// Ordered string map; later layers overwrite earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer(pub BTreeMap<String, String>);

impl Layer {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(normalize_key(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn merged(&self, over: &Layer) -> Layer {
        let mut out = self.clone();
        out.0.extend(over.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    /// `key = value` lines in key order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Parses `key = value` lines; `#` starts a comment. `extra` lists keys
/// accepted in addition to [`KEYS`].
pub fn parse_layer(text: &str, origin: &str, extra: &[&str]) -> Result<Layer, CliError> {
    let mut layer = Layer::default();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::usage(format!("{origin}:{}: expected `key = value`", no + 1)));
        };
        let key = normalize_key(k);
        if !is_known_key(&key) && !extra.contains(&key.as_str()) {
            return Err(CliError::usage(format!("{origin}:{}: unknown key `{key}`", no + 1)));
        }
        layer.set(&key, v.trim());
    }
    Ok(layer)
}

fn default_layer(kind: OptimizerKind, preset_name: Option<&str>) -> Result<Layer, CliError> {
    let cfg: TrainConfig64 = match preset_name {
        Some(name) => preset(name)
            .ok_or_else(|| CliError::usage(format!("unknown preset `{name}`")))?
            .config(kind, false),
        None => TrainConfig64::new(kind, false),
    };
    let mut layer = Layer::default();
    for (k, v, _) in KEYS {
        if *v != "*" {
            layer.set(k, *v);
        }
    }
    let p = cfg.params;
    layer.set("alpha0", p.schedule.alpha0.to_string());
    layer.set("tau", p.schedule.tau.to_string());
    layer.set("mu", p.mu.to_string());
    layer.set("lambda", p.lambda.to_string());
    layer.set("eps_h", p.eps_h.to_string());
    layer.set("inner_iters", cfg.inner_iters.to_string());
    layer.set("batch_size", cfg.batch_size.to_string());
    layer.set("outer_iters", cfg.outer_iters.to_string());
    Ok(layer)
}

/// Fills every key: built-in defaults (shaped by the optimizer and preset
/// named in `overrides`) under `overrides`, with `AWWSVM_OUT` standing in
/// for an unset `out`.
pub fn resolve(overrides: &Layer) -> Result<Layer, CliError> {
    let kind: OptimizerKind = parse_value(overrides, "optimizer", "sgd")?;
    let preset_name = overrides.get("preset").filter(|s| !s.is_empty());
    let mut defaults = default_layer(kind, preset_name)?;
    if let Ok(dir) = std::env::var("AWWSVM_OUT") {
        if !dir.is_empty() {
            defaults.set("out", dir);
        }
    }
    Ok(defaults.merged(overrides))
}

fn parse_value<T: FromStr>(layer: &Layer, key: &str, default: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    let raw = layer.get(key).unwrap_or(default);
    raw.parse()
        .map_err(|e| CliError::usage(format!("invalid value `{raw}` for `{key}`: {e}")))
}

fn parse_bool(layer: &Layer, key: &str) -> Result<bool, CliError> {
    match layer.get(key).unwrap_or("false").to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" | "" => Ok(false),
        other => Err(CliError::usage(format!("invalid value `{other}` for `{key}`: expected true or false"))),
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub test_data: Option<PathBuf>,
    pub split: f64,
    pub train: TrainConfig64,
    pub jobs: usize,
    pub out: PathBuf,
    pub verbose: bool,
    /// The complete key set this run was built from.
    pub resolved: Layer,
}

impl RunConfig {
    pub fn from_layer(layer: Layer) -> Result<Self, CliError> {
        let path = |k: &str| layer.get(k).filter(|s| !s.is_empty()).map(PathBuf::from);
        let kind: OptimizerKind = parse_value(&layer, "optimizer", "sgd")?;
        let alpha0: f64 = parse_value(&layer, "alpha0", "")?;
        let tau: f64 = parse_value(&layer, "tau", "")?;
        let schedule = match kind {
            OptimizerKind::Sgd => StepSchedule::constant(alpha0),
            OptimizerKind::Obfgs => StepSchedule::tau_decay(alpha0, tau),
            OptimizerKind::Onaq => StepSchedule { tau, ..StepSchedule::sqrt_decay(alpha0) },
        };
        let mut train = TrainConfig64::new(kind, parse_bool(&layer, "adaptive")?);
        train.params = OptimizerParams {
            schedule,
            mu: parse_value(&layer, "mu", "")?,
            lambda: parse_value(&layer, "lambda", "")?,
            eps_h: parse_value(&layer, "eps_h", "")?,
        };
        train.objective.weight_mode = parse_value::<WeightMode>(&layer, "weight_mode", "regularizer")?;
        train.objective.c = parse_value(&layer, "c", "1")?;
        train.objective.fit_bias = parse_bool(&layer, "fit_bias")?;
        train.noise_mode = parse_value::<NoiseMode>(&layer, "noise_mode", "signed-side")?;
        train.sigma = parse_value(&layer, "sigma", "1")?;
        train.outer_iters = parse_value(&layer, "outer_iters", "")?;
        train.inner_iters = parse_value(&layer, "inner_iters", "")?;
        train.batch_size = parse_value(&layer, "batch_size", "")?;
        train.seed = parse_value(&layer, "seed", "0")?;
        train.validate().map_err(|e| CliError::usage(e.to_string()))?;

        let split: f64 = parse_value(&layer, "split", "0.2")?;
        if !(split > 0.0 && split < 1.0) {
            return Err(CliError::usage(format!("split must lie in (0, 1), got {split}")));
        }
        let jobs: usize = parse_value(&layer, "jobs", "1")?;
        Ok(Self {
            data: path("data"),
            test_data: path("test_data"),
            split,
            jobs: jobs.max(1),
            out: path("out").unwrap_or_else(|| PathBuf::from("out")),
            verbose: parse_bool(&layer, "verbose")?,
            train,
            resolved: layer,
        })
    }
}

/// Help text listing every key and its default.
pub fn describe_keys() -> String {
    let mut s = String::from("configuration keys (file `key = value`, flag `--key`):\n");
    for (k, v, doc) in KEYS {
        let shown = if *v == "*" { "optimizer default" } else if v.is_empty() { "unset" } else { v };
        let _ = writeln!(s, "  {k:<12} {doc} [default: {shown}]");
    }
    s
}
