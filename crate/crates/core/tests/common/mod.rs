#![allow(dead_code)]

use std::path::PathBuf;

use awwsvm::{parse_libsvm, Dataset64, Sample64, TrainConfig64, WeightMode};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// `None` when the file is not present.
pub fn load(name: &str) -> Option<Dataset64> {
    let text = std::fs::read_to_string(data_dir().join(name)).ok()?;
    Some(parse_libsvm(&text).unwrap_or_else(|e| panic!("{name}: {e}")))
}

/// Objective settings used by every experimental comparison: loss-side
/// weighting with a light penalty.
pub fn experiment_profile(cfg: &mut TrainConfig64) {
    cfg.objective.weight_mode = WeightMode::Hinge;
    cfg.objective.c = 1e-3;
}

pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Weighted objective evaluated directly on dense vectors; `w` carries the
/// bias in its last slot when `fit_bias` holds.
pub fn dense_loss(w: &[f64], xs: &[Vec<f64>], ys: &[f64], alphas: &[f64], c: f64, hinge_mode: bool, fit_bias: bool) -> f64 {
    let wsq: f64 = w.iter().map(|v| v * v).sum();
    let mut total = 0.0;
    for ((x, &y), &a) in xs.iter().zip(ys).zip(alphas) {
        let mut f: f64 = x.iter().zip(w).map(|(xi, wi)| xi * wi).sum();
        if fit_bias {
            f += w[w.len() - 1];
        }
        let hinge = (1.0 - y * f).max(0.0);
        total += if hinge_mode {
            0.5 * c * wsq + a * hinge
        } else {
            0.5 * a * c * wsq + hinge
        };
    }
    total / xs.len() as f64
}

/// Lower-triangular Cholesky factor, `None` if a pivot is not positive.
pub fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

pub fn dense_sample(x: &[f64], positive: bool) -> Sample64 {
    Sample64::from_dense(x, awwsvm::Label::from_sign(positive))
}
