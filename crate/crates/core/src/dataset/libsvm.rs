//! LIBSVM / SVMlight text ingestion.
//!
//! ```text
//! +1 1:0.5 3:2.0   # comment
//! -1 2:1.0
//! ```
//!
//! Accepted raw labels are `-1`, `0`, `1`, `+1` and `2`. When two distinct
//! labels are observed the numerically larger one becomes `+1`.

use crate::dataset::{Dataset, LabelMap, Sample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const ALLOWED_LABELS: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];

/// Parses LIBSVM text, inferring the label mapping from the observed labels.
pub fn parse_libsvm<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    parse_libsvm_with(text, None)
}

/// Parses LIBSVM text. With `Some(map)` every label must belong to that
/// mapping (use this to read a test file with its training file's mapping).
pub fn parse_libsvm_with<T: Scalar>(text: &str, label_map: Option<LabelMap>) -> Result<Dataset<T>> {
    let mut rows: Vec<(usize, f64, Vec<(u32, T)>)> = Vec::new();
    let mut seen: Vec<f64> = Vec::new();

    for (n, raw_line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid label `{label_tok}`"),
        })?;
        if !ALLOWED_LABELS.contains(&label) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unsupported label `{label_tok}` (expected -1, 0, 1, +1 or 2)"),
            });
        }
        if !seen.contains(&label) {
            if seen.len() == 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("more than two distinct labels (third label `{label_tok}`)"),
                });
            }
            seen.push(label);
        }

        let mut feats = Vec::new();
        let mut prev = 0u32;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("malformed feature token `{tok}`"),
            })?;
            let idx: u32 = idx_s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid feature index `{idx_s}`"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "feature indices start at 1".into(),
                });
            }
            if idx <= prev {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-ascending feature index {idx} after {prev}"),
                });
            }
            let val: T = val_s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid feature value `{val_s}`"),
            })?;
            feats.push((idx, val));
            prev = idx;
        }
        rows.push((line_no, label, feats));
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let map = label_map.unwrap_or_else(|| infer_map(&seen));
    let samples = rows
        .into_iter()
        .map(|(line, raw, feats)| {
            let label = map.map(raw).ok_or_else(|| Error::Parse {
                line,
                msg: format!("label {raw} is not part of the mapping {map}"),
            })?;
            Ok(Sample { features: feats, label })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples, map)
}

fn infer_map(seen: &[f64]) -> LabelMap {
    match *seen {
        [a, b] => LabelMap {
            negative: a.min(b),
            positive: a.max(b),
        },
        // one observed label: assume its conventional partner
        [a] if a == 0.0 => LabelMap { negative: 0.0, positive: 1.0 },
        [a] if a == 2.0 => LabelMap { negative: 1.0, positive: 2.0 },
        _ => LabelMap::STANDARD,
    }
}
