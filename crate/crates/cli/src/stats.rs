//! `stats`: Friedman test and Nemenyi critical difference over a results CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use awwsvm::stats::{q_alpha_005, significance_from_mean_ranks};
use awwsvm::{friedman, nemenyi_cd, rank_rows, FriedmanResult, RankTable};
use clap::Args;

use crate::error::{read_file, write_file, CliError, CliResult};

const METRICS: [&str; 6] = ["accuracy", "precision", "recall", "specificity", "f1", "gmean"];

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Results CSV written by `experiment`.
    pub results: PathBuf,
    /// Column to rank on: accuracy, precision, recall, specificity, f1 or gmean.
    #[arg(long, default_value = "accuracy")]
    pub metric: String,
    /// Critical value replacing the built-in alpha = 0.05 table.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, env = "AWWSVM_OUT", default_value = "out")]
    pub out: PathBuf,
}

/// Mean of `metric` over seeds from the `final` rows, as a datasets ×
/// methods matrix in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

fn index_of(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

pub fn read_scores(text: &str, metric: &str, origin: &str) -> CliResult<ScoreMatrix> {
    if !METRICS.contains(&metric) {
        return Err(CliError::usage(format!("unknown metric `{metric}`; expected one of {}", METRICS.join(", "))));
    }
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::usage(format!("{origin}: empty file")))?
        .split(',')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::usage(format!("{origin}: missing column `{name}`")))
    };
    let (cd, cm, ci, cv) = (col("dataset")?, col("method")?, col("outer_iter")?, col(metric)?);

    let mut datasets = Vec::new();
    let mut methods = Vec::new();
    let mut sums: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (no, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(CliError::usage(format!(
                "{origin}:{}: expected {} fields, found {}",
                no + 2,
                header.len(),
                fields.len()
            )));
        }
        if fields[ci] != "final" {
            continue;
        }
        let v: f64 = fields[cv]
            .parse()
            .map_err(|_| CliError::usage(format!("{origin}:{}: bad {metric} value `{}`", no + 2, fields[cv])))?;
        let (d, m) = (index_of(&mut datasets, fields[cd]), index_of(&mut methods, fields[cm]));
        match sums.iter_mut().find(|(a, b, _, _)| (*a, *b) == (d, m)) {
            Some(cell) => {
                cell.2 += v;
                cell.3 += 1;
            }
            None => sums.push((d, m, v, 1)),
        }
    }
    if datasets.len() < 2 || methods.len() < 2 {
        return Err(CliError::usage(format!(
            "{origin}: need at least 2 datasets and 2 methods with final rows, found {} and {}",
            datasets.len(),
            methods.len()
        )));
    }
    let mut values = vec![vec![f64::NAN; methods.len()]; datasets.len()];
    for (d, m, s, n) in sums {
        values[d][m] = s / n as f64;
    }
    for (d, row) in values.iter().enumerate() {
        if let Some(m) = row.iter().position(|v| v.is_nan()) {
            return Err(CliError::usage(format!(
                "{origin}: no final result for dataset `{}`, method `{}`",
                datasets[d], methods[m]
            )));
        }
    }
    Ok(ScoreMatrix {
        datasets,
        methods,
        values,
    })
}

#[derive(Debug, Clone)]
pub struct StatsReport {
    pub scores: ScoreMatrix,
    pub ranks: RankTable,
    pub friedman: FriedmanResult,
    pub q: f64,
    pub cd: f64,
    pub significant: Vec<Vec<bool>>,
}

pub fn analyse(scores: ScoreMatrix, q: Option<f64>) -> CliResult<StatsReport> {
    let k = scores.methods.len();
    let q = match q {
        Some(q) => q,
        None => q_alpha_005(k).ok_or_else(|| {
            CliError::usage(format!("no tabulated critical value for {k} methods; pass --q"))
        })?,
    };
    let ranks = rank_rows(&scores.values, true).map_err(|e| CliError::usage(e.to_string()))?;
    let cd = nemenyi_cd(k, scores.datasets.len(), q).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(StatsReport {
        friedman: friedman(&ranks),
        significant: significance_from_mean_ranks(&ranks.mean_ranks, cd),
        scores,
        ranks,
        q,
        cd,
    })
}

impl StatsReport {
    pub fn text(&self, metric: &str) -> String {
        let s = &self.scores;
        let mut out = format!(
            "{} datasets, {} methods, metric {metric}\n\nmean ranks (1 = best):\n",
            s.datasets.len(),
            s.methods.len()
        );
        for (m, r) in s.methods.iter().zip(&self.ranks.mean_ranks) {
            let _ = writeln!(out, "  {m:<12} {r:.4}");
        }
        let f = &self.friedman;
        let _ = writeln!(out, "\nfriedman chi2 = {:.4}, dof = {}, p = {:.4e}", f.chi2, f.dof, f.p_value);
        let _ = writeln!(out, "nemenyi CD = {:.4} (q = {:.3})\n", self.cd, self.q);
        let _ = writeln!(out, "pairwise differences exceeding CD (* = significant):");
        let width = s.methods.iter().map(String::len).max().unwrap_or(0).max(8);
        let _ = write!(out, "  {:<width$}", "");
        for m in &s.methods {
            let _ = write!(out, " {m:>width$}");
        }
        out.push('\n');
        for (i, a) in s.methods.iter().enumerate() {
            let _ = write!(out, "  {a:<width$}");
            for j in 0..s.methods.len() {
                let cell = if i == j {
                    "-"
                } else if self.significant[i][j] {
                    "*"
                } else {
                    "."
                };
                let _ = write!(out, " {cell:>width$}");
            }
            out.push('\n');
        }
        out
    }

    pub fn ranks_csv(&self) -> String {
        let mut out = format!("dataset,{}\n", self.scores.methods.join(","));
        for (d, row) in self.scores.datasets.iter().zip(&self.ranks.ranks) {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{d},{}", cells.join(","));
        }
        let means: Vec<String> = self.ranks.mean_ranks.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "mean,{}", means.join(","));
        out
    }

    pub fn significance_csv(&self) -> String {
        let m = &self.scores.methods;
        let r = &self.ranks.mean_ranks;
        let mut out = String::from("method_a,method_b,rank_difference,significant\n");
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let _ = writeln!(out, "{},{},{},{}", m[i], m[j], (r[i] - r[j]).abs(), self.significant[i][j]);
            }
        }
        out
    }

    /// Methods sorted by mean rank, each with the CD interval around it.
    pub fn cd_diagram_csv(&self) -> String {
        let mut order: Vec<usize> = (0..self.scores.methods.len()).collect();
        order.sort_by(|&a, &b| self.ranks.mean_ranks[a].total_cmp(&self.ranks.mean_ranks[b]));
        let mut out = String::from("method,mean_rank,critical_difference\n");
        for i in order {
            let _ = writeln!(out, "{},{},{}", self.scores.methods[i], self.ranks.mean_ranks[i], self.cd);
        }
        out
    }
}

pub fn run(args: &StatsArgs) -> CliResult<()> {
    let text = read_file(&args.results)?;
    let scores = read_scores(&text, &args.metric, &args.results.display().to_string())?;
    let report = analyse(scores, args.q)?;
    let body = report.text(&args.metric);
    let out = &args.out;
    write_file(&out.join("stats-report.txt"), &body)?;
    write_file(&out.join("ranks.csv"), &report.ranks_csv())?;
    write_file(&out.join("significance.csv"), &report.significance_csv())?;
    write_file(&out.join("cd-diagram.csv"), &report.cd_diagram_csv())?;
    let mut conf = format!("results = {}\nmetric = {}\nq = {}\n", args.results.display(), args.metric, report.q);
    let _ = writeln!(conf, "out = {}", out.display());
    write_file(&out.join("stats.conf"), &conf)?;
    print!("{body}");
    Ok(())
}
