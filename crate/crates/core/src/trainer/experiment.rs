//! Parallel sweeps over (dataset, method, seed) with deterministic output order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{train, IterationRecord, TrainConfig, TrainHistory};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::EvalReport;
use crate::optimizers::OptimizerKind;
use crate::scalar::Scalar;

pub const RESULTS_CSV_HEADER: &str =
    "dataset,method,seed,outer_iter,accuracy,precision,recall,specificity,f1,gmean,train_loss,n_noise";

/// `sgd`, `obfgs`, `onaq`, or the same prefixed with `aw+`.
pub fn method_name(kind: OptimizerKind, adaptive: bool) -> String {
    if adaptive {
        format!("aw+{}", kind.name())
    } else {
        kind.name().to_string()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentDataset<T> {
    pub name: String,
    pub train: Dataset<T>,
    pub test: Dataset<T>,
    /// Per-method configurations replacing [`Method::config`] for this dataset.
    pub overrides: BTreeMap<String, TrainConfig<T>>,
}

impl<T> ExperimentDataset<T> {
    pub fn new(name: impl Into<String>, train: Dataset<T>, test: Dataset<T>) -> Self {
        Self {
            name: name.into(),
            train,
            test,
            overrides: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Method<T> {
    pub name: String,
    pub config: TrainConfig<T>,
}

impl<T: Scalar> Method<T> {
    pub fn new(config: TrainConfig<T>) -> Self {
        Self {
            name: config.method_name(),
            config,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellResult<T> {
    pub dataset: String,
    pub method: String,
    pub seed: u64,
    pub outcome: Result<(TrainHistory<T>, EvalReport)>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults<T> {
    /// Ordered by dataset, then method, then seed, as given.
    pub cells: Vec<CellResult<T>>,
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
}

/// Mean over successful seeds of one (dataset, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub method: String,
    pub runs: usize,
    pub accuracy: f64,
    pub gmean: f64,
    pub f1: f64,
}

pub(super) fn csv_row<T: Scalar>(dataset: &str, method: &str, seed: u64, tag: &str, r: &IterationRecord<T>) -> String {
    format!(
        "{dataset},{method},{seed},{tag},{},{},{}\n",
        r.eval.csv_fields(),
        r.train_loss,
        r.n_noise
    )
}

/// Trains every (dataset, method, seed) combination on at most `jobs`
/// threads. The seed in each configuration is replaced by the sweep seed.
pub fn run_experiment<T: Scalar>(
    datasets: &[ExperimentDataset<T>],
    methods: &[Method<T>],
    seeds: &[u64],
    jobs: usize,
) -> Result<ExperimentResults<T>> {
    let mut jobs_list = Vec::new();
    for di in 0..datasets.len() {
        for mi in 0..methods.len() {
            for &seed in seeds {
                jobs_list.push((di, mi, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let cells = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|&(di, mi, seed)| {
                let d = &datasets[di];
                let m = &methods[mi];
                let mut cfg = d.overrides.get(&m.name).cloned().unwrap_or_else(|| m.config.clone());
                cfg.seed = seed;
                let outcome = train(&d.train, &d.test, &cfg).map(|out| {
                    let last = out.history.last().map(|r| r.eval).unwrap_or_else(|| {
                        crate::metrics::evaluate(&out.model, &d.test)
                    });
                    (out.history, last)
                });
                CellResult {
                    dataset: d.name.clone(),
                    method: m.name.clone(),
                    seed,
                    outcome,
                }
            })
            .collect()
    });
    Ok(ExperimentResults {
        cells,
        datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        methods: methods.iter().map(|m| m.name.clone()).collect(),
    })
}

impl<T: Scalar> ExperimentResults<T> {
    pub fn failures(&self) -> impl Iterator<Item = (&CellResult<T>, &Error)> {
        self.cells.iter().filter_map(|c| c.outcome.as_ref().err().map(|e| (c, e)))
    }

    /// One row per outer iteration and a `final` row per successful run.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(RESULTS_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let Ok((history, _)) = &c.outcome else { continue };
            for r in &history.records {
                out.push_str(&csv_row(&c.dataset, &c.method, c.seed, &r.outer_iter.to_string(), r));
            }
            if let Some(last) = history.last() {
                out.push_str(&csv_row(&c.dataset, &c.method, c.seed, "final", last));
            }
        }
        out
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for d in &self.datasets {
            for m in &self.methods {
                let finals: Vec<&EvalReport> = self
                    .cells
                    .iter()
                    .filter(|c| &c.dataset == d && &c.method == m)
                    .filter_map(|c| c.outcome.as_ref().ok().map(|(_, r)| r))
                    .collect();
                let n = finals.len();
                let mean = |f: fn(&EvalReport) -> f64| {
                    if n == 0 {
                        f64::NAN
                    } else {
                        finals.iter().map(|r| f(r)).sum::<f64>() / n as f64
                    }
                };
                rows.push(SummaryRow {
                    dataset: d.clone(),
                    method: m.clone(),
                    runs: n,
                    accuracy: mean(|r| r.accuracy),
                    gmean: mean(|r| r.gmean),
                    f1: mean(|r| r.f1),
                });
            }
        }
        rows
    }

    /// Datasets × methods matrix of mean final accuracy.
    pub fn accuracy_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.methods.len();
        self.summary().chunks(k.max(1)).map(|c| c.iter().map(|r| r.accuracy).collect()).collect()
    }

    /// Plain-text table of mean accuracy; the best entry of each row is starred.
    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<12}", "dataset");
        for m in &self.methods {
            out.push_str(&format!(" {m:>11}"));
        }
        out.push('\n');
        for (d, row) in self.datasets.iter().zip(self.accuracy_matrix()) {
            let best = row.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
            out.push_str(&format!("{d:<12}"));
            for v in row {
                let mark = if v == best { "*" } else { " " };
                out.push_str(&format!(" {:>10.4}{mark}", v));
            }
            out.push('\n');
        }
        out
    }
}
