//! `experiment`: a manifest-driven sweep over datasets, methods and seeds.

use std::fmt::Write as _;
use std::path::Path;

use awwsvm::trainer::describe;
use awwsvm::{run_experiment, ExperimentDataset, Method, OptimizerKind, TrainConfig64};

use crate::config::{parse_layer, resolve, Layer, RunConfig, KEYS};
use crate::error::{read_file, write_file, CliError, CliResult};
use crate::train::load_pair;

pub const MANIFEST_HELP: &str = "\
manifest format:
  # global keys apply to every dataset
  seeds = 0,1,2,3,4
  methods = sgd,aw+sgd,obfgs,aw+obfgs,onaq,aw+onaq
  c = 0.001

  [dataset mushroom]
  data = data/mushroom.train
  test_data = data/mushroom.test
  preset = mushroom

Relative paths are resolved against the manifest's directory. Precedence,
lowest first: built-in and preset defaults, global keys, dataset section,
command-line flags. Outputs: results.csv, summary.txt, configs.csv,
resolved-manifest.conf and, when any run fails, failures.csv.";

const ALL_METHODS: [&str; 6] = ["sgd", "aw+sgd", "obfgs", "aw+obfgs", "onaq", "aw+onaq"];
const PATH_KEYS: [&str; 2] = ["data", "test_data"];

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub global: Layer,
    pub seeds: Vec<u64>,
    pub methods: Vec<String>,
    /// `(name, section keys)` in file order.
    pub datasets: Vec<(String, Layer)>,
}

pub fn parse_method(name: &str) -> CliResult<(OptimizerKind, bool)> {
    let (adaptive, base) = match name.strip_prefix("aw+") {
        Some(rest) => (true, rest),
        None => (false, name),
    };
    let kind = base
        .parse::<OptimizerKind>()
        .map_err(|e| CliError::usage(format!("unknown method `{name}`: {e}")))?;
    Ok((kind, adaptive))
}

fn parse_list<T>(raw: &str, item: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

pub fn parse_seeds(raw: &str) -> CliResult<Vec<u64>> {
    parse_list(raw, |s| s.parse().map_err(|_| CliError::usage(format!("invalid seed `{s}`"))))
}

pub fn parse_methods(raw: &str) -> CliResult<Vec<String>> {
    parse_list(raw, |s| {
        let s = s.to_ascii_lowercase();
        parse_method(&s)?;
        Ok(s)
    })
}

/// Parses the manifest text. Relative data paths are joined onto `base`.
pub fn parse_manifest(text: &str, origin: &str, base: &Path) -> CliResult<Manifest> {
    let mut chunks: Vec<(Option<String>, String)> = vec![(None, String::new())];
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(header) = line.strip_prefix('[') {
            let inner = header
                .strip_suffix(']')
                .ok_or_else(|| CliError::usage(format!("{origin}:{}: unterminated section header", no + 1)))?;
            let name = match inner.trim().split_once(char::is_whitespace) {
                Some(("dataset", name)) if !name.trim().is_empty() => name.trim().to_string(),
                _ => {
                    return Err(CliError::usage(format!(
                        "{origin}:{}: expected `[dataset NAME]`, got `[{inner}]`",
                        no + 1
                    )))
                }
            };
            if chunks.iter().any(|(n, _)| n.as_deref() == Some(name.as_str())) {
                return Err(CliError::usage(format!("{origin}:{}: duplicate dataset `{name}`", no + 1)));
            }
            chunks.push((Some(name), String::new()));
        } else {
            let body = &mut chunks.last_mut().expect("never empty").1;
            body.push_str(line);
            body.push('\n');
        }
    }

    let absolutize = |layer: &mut Layer| {
        for key in PATH_KEYS {
            if let Some(p) = layer.get(key).filter(|p| !p.is_empty()) {
                let joined = base.join(p);
                layer.set(key, joined.to_string_lossy().into_owned());
            }
        }
    };

    let mut global = Layer::default();
    let mut datasets = Vec::new();
    for (name, body) in chunks {
        match name {
            None => global = parse_layer(&body, origin, &["seeds", "methods"])?,
            Some(name) => {
                let mut layer = parse_layer(&body, &format!("{origin} [dataset {name}]"), &[])?;
                absolutize(&mut layer);
                datasets.push((name, layer));
            }
        }
    }
    absolutize(&mut global);
    let seeds = parse_seeds(global.0.remove("seeds").as_deref().unwrap_or("0"))?;
    let methods = match global.0.remove("methods") {
        Some(raw) => parse_methods(&raw)?,
        None => ALL_METHODS.iter().map(|s| s.to_string()).collect(),
    };
    Ok(Manifest {
        global,
        seeds,
        methods,
        datasets,
    })
}

impl Manifest {
    /// Manifest text that reproduces this sweep with every key spelled out.
    pub fn to_text(&self, resolved: &[(String, Layer)]) -> String {
        let mut s = String::new();
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "seeds = {}", seeds.join(","));
        let _ = writeln!(s, "methods = {}", self.methods.join(","));
        for (name, layer) in resolved {
            let mut layer = layer.clone();
            layer.0.remove("optimizer");
            layer.0.remove("adaptive");
            let _ = write!(s, "\n[dataset {name}]\n{}", layer.to_text());
        }
        s
    }
}

/// Explicit keys plus every default that does not depend on the optimizer.
fn spelled_out(explicit: &Layer, resolved: &Layer) -> Layer {
    let mut out = explicit.clone();
    for (k, default, _) in KEYS {
        if *default != "*" {
            if let Some(v) = resolved.get(k) {
                out.set(k, v);
            }
        }
    }
    out
}

fn method_config(section: &Layer, method: &str) -> CliResult<RunConfig> {
    let (kind, adaptive) = parse_method(method)?;
    let mut layer = section.clone();
    layer.set("optimizer", kind.name());
    layer.set("adaptive", adaptive.to_string());
    RunConfig::from_layer(resolve(&layer)?)
}

pub fn run(manifest_path: &Path, flags: &Layer, seeds: Option<&str>, methods: Option<&str>) -> CliResult<()> {
    let text = read_file(manifest_path)?;
    let dir = manifest_path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let base = std::path::absolute(dir).map_err(|e| CliError::io(dir, e))?;
    let mut manifest = parse_manifest(&text, &manifest_path.display().to_string(), &base)?;
    if let Some(raw) = seeds {
        manifest.seeds = parse_seeds(raw)?;
    }
    if let Some(raw) = methods {
        manifest.methods = parse_methods(raw)?;
    }
    let mut flags = flags.clone();
    for key in ["optimizer", "adaptive"] {
        if flags.0.remove(key).is_some() {
            return Err(CliError::usage(format!("`{key}` is chosen per method in an experiment; use --methods")));
        }
    }

    let top = RunConfig::from_layer(resolve(&manifest.global.merged(&flags))?)?;
    let (jobs, out, verbose) = (top.jobs, top.out.clone(), top.verbose);

    let methods: Vec<Method<f64>> = manifest
        .methods
        .iter()
        .map(|m| {
            let (kind, adaptive) = parse_method(m)?;
            Ok(Method {
                name: m.clone(),
                config: TrainConfig64::new(kind, adaptive),
            })
        })
        .collect::<CliResult<_>>()?;

    let mut datasets = Vec::new();
    let mut resolved_sections = Vec::new();
    let mut configs = String::from("dataset,method,settings\n");
    for (name, section) in &manifest.datasets {
        let layer = manifest.global.merged(section).merged(&flags);
        let data_cfg = RunConfig::from_layer(resolve(&layer)?)?;
        let (tr, te) = load_pair(&data_cfg)?;
        if verbose {
            eprintln!("{name}: train {} samples, eval {} samples, dim {}", tr.len(), te.len(), tr.dim());
        }
        let mut ds = ExperimentDataset::new(name.clone(), tr, te);
        for m in &manifest.methods {
            let cfg = method_config(&layer, m)?;
            let _ = writeln!(configs, "{name},{m},\"{}\"", describe(&cfg.train));
            ds.overrides.insert(m.clone(), cfg.train);
        }
        resolved_sections.push((name.clone(), spelled_out(&layer, &data_cfg.resolved)));
        datasets.push(ds);
    }

    let results = run_experiment(&datasets, &methods, &manifest.seeds, jobs)
        .map_err(|e| CliError::failed(format!("experiment failed: {e}")))?;

    write_file(&out.join("results.csv"), &results.to_csv())?;
    write_file(&out.join("summary.txt"), &results.summary_table())?;
    write_file(&out.join("configs.csv"), &configs)?;
    write_file(&out.join("resolved-manifest.conf"), &manifest.to_text(&resolved_sections))?;
    print!("{}", results.summary_table());

    let failures: Vec<_> = results.failures().collect();
    if failures.is_empty() {
        return Ok(());
    }
    let mut csv = String::from("dataset,method,seed,error\n");
    for (cell, err) in &failures {
        let msg = err.to_string().replace('"', "'");
        let _ = writeln!(csv, "{},{},{},\"{msg}\"", cell.dataset, cell.method, cell.seed);
        eprintln!("failed: {} {} seed={}: {msg}", cell.dataset, cell.method, cell.seed);
    }
    write_file(&out.join("failures.csv"), &csv)?;
    Err(CliError::failed(format!(
        "{} of {} runs failed; see {}",
        failures.len(),
        results.cells.len(),
        out.join("failures.csv").display()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "\
seeds = 3, 4
methods = sgd, AW+ONAQ
c = 0.01   # shared

[dataset one]
data = a.libsvm
batch-size = 8

[dataset two]
data = /abs/b.libsvm
c = 0.5
";

    #[test]
    fn parses_sections_and_globals() {
        let m = parse_manifest(TEXT, "m", Path::new("/base")).unwrap();
        assert_eq!(m.seeds, vec![3, 4]);
        assert_eq!(m.methods, vec!["sgd", "aw+onaq"]);
        assert_eq!(m.global.get("c"), Some("0.01"));
        assert_eq!(m.datasets.len(), 2);
        assert_eq!(m.datasets[0].1.get("data"), Some("/base/a.libsvm"));
        assert_eq!(m.datasets[0].1.get("batch_size"), Some("8"));
        assert_eq!(m.datasets[1].1.get("data"), Some("/abs/b.libsvm"));
    }

    #[test]
    fn section_overrides_global() {
        let m = parse_manifest(TEXT, "m", Path::new("/base")).unwrap();
        let layer = m.global.merged(&m.datasets[1].1);
        let cfg = method_config(&layer, "aw+obfgs").unwrap();
        assert_eq!(cfg.train.objective.c, 0.5);
        assert!(cfg.train.adaptive);
        assert_eq!(cfg.train.optimizer, OptimizerKind::Obfgs);
        let cfg = method_config(&m.global.merged(&m.datasets[0].1), "sgd").unwrap();
        assert_eq!(cfg.train.objective.c, 0.01);
    }

    #[test]
    fn rejects_malformed() {
        let base = Path::new(".");
        assert!(parse_manifest("[dataset]\n", "m", base).is_err());
        assert!(parse_manifest("[other x]\n", "m", base).is_err());
        assert!(parse_manifest("[dataset a]\n[dataset a]\n", "m", base).is_err());
        assert!(parse_manifest("methods = adam\n", "m", base).is_err());
        assert!(parse_manifest("seeds = x\n", "m", base).is_err());
        assert!(parse_manifest("[dataset a]\nseeds = 1\n", "m", base).is_err());
    }

    #[test]
    fn empty_manifest_defaults() {
        let m = parse_manifest("", "m", Path::new(".")).unwrap();
        assert_eq!(m.seeds, vec![0]);
        assert_eq!(m.methods.len(), 6);
        assert!(m.datasets.is_empty());
    }
}
