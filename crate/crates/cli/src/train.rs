use std::path::Path;

use awwsvm::trainer::describe;
use awwsvm::{parse_libsvm_with, train_with_observer, Dataset64, EvalReport, LabelMap, TrainEvent};

use crate::config::{resolve, Layer, RunConfig};
use crate::error::{read_file, write_file, CliError, CliResult};

/// Reads a LIBSVM file. `label_map` pins the label encoding of an
/// evaluation file to that of its training file.
pub fn load_dataset(path: &Path, label_map: Option<LabelMap>) -> CliResult<Dataset64> {
    let text = read_file(path)?;
    parse_libsvm_with(&text, label_map).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Training and evaluation sets for one run: the evaluation file when
/// given, otherwise a stratified split of the training file.
pub fn load_pair(cfg: &RunConfig) -> CliResult<(Dataset64, Dataset64)> {
    let data = cfg
        .data
        .as_deref()
        .ok_or_else(|| CliError::usage("no training data: pass --data or set `data`"))?;
    let full = load_dataset(data, None)?;
    match cfg.test_data.as_deref() {
        Some(test) => {
            let test = load_dataset(test, Some(full.label_map()))?;
            let dim = full.dim().max(test.dim());
            let widen = |d: Dataset64| d.with_dim(dim).map_err(|e| CliError::usage(e.to_string()));
            Ok((widen(full)?, widen(test)?))
        }
        None => full
            .split(cfg.split, cfg.train.seed)
            .map_err(|e| CliError::usage(format!("{}: {e}", data.display()))),
    }
}

pub fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into())
}

pub fn format_report(r: &EvalReport) -> String {
    let c = r.confusion;
    format!(
        "accuracy    {:.4}\nprecision   {:.4}\nrecall      {:.4}\nspecificity {:.4}\nf1          {:.4}\ngmean       {:.4}\nconfusion   tp={} fn={} fp={} tn={}\n",
        r.accuracy, r.precision, r.recall, r.specificity, r.f1, r.gmean, c.tp, c.fn_, c.fp, c.tn
    )
}

pub fn run(overrides: &Layer) -> CliResult<()> {
    let cfg = RunConfig::from_layer(resolve(overrides)?)?;
    let (tr, te) = load_pair(&cfg)?;
    let name = cfg.data.as_deref().map(dataset_name).unwrap_or_default();
    let method = cfg.train.method_name();
    if cfg.verbose {
        eprintln!("{}", describe(&cfg.train));
        eprintln!("train {} samples ({} positive), eval {} samples, dim {}", tr.len(), tr.n_pos(), te.len(), tr.dim());
    }
    let verbose = cfg.verbose;
    let outcome = train_with_observer(&tr, &te, &cfg.train, |ev| {
        if let TrainEvent::Outer { record, weights } = ev {
            if verbose {
                eprintln!(
                    "round {:>3}  acc {:.4}  gmean {:.4}  loss {:.6}  active {}  eliminated {}",
                    record.outer_iter,
                    record.eval.accuracy,
                    record.eval.gmean,
                    record.train_loss,
                    weights.n_active(),
                    record.n_noise
                );
            }
        }
    })
    .map_err(|e| CliError::failed(format!("training failed: {e}")))?;

    let out = &cfg.out;
    write_file(&out.join("model.txt"), &outcome.model.to_text())?;
    write_file(&out.join("history.csv"), &outcome.history.to_csv(&name, &method, cfg.train.seed))?;
    write_file(&out.join("resolved-config.conf"), &cfg.resolved.to_text())?;
    if verbose {
        write_file(&out.join("weight_trace.csv"), &outcome.history.weight_trace_csv())?;
    }

    let report = outcome
        .history
        .last()
        .map(|r| r.eval)
        .unwrap_or_else(|| awwsvm::evaluate(&outcome.model, &te));
    println!("{name} {method} seed={}", cfg.train.seed);
    print!("{}", format_report(&report));
    println!("eliminated  {}", outcome.weights.n_eliminated());
    println!("outputs     {}", out.display());
    Ok(())
}
