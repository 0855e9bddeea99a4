//! Dense inverse-Hessian approximation and its BFGS rank-two update.

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn scaled_identity(n: usize, scale: T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = scale;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| scalar::dot(self.row(i), x)).collect()
    }

    /// Largest `|H_ij − H_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Relative curvature floor: pairs with `yᵀs <= 1e-10 ‖s‖‖y‖` are rejected.
pub const CURVATURE_FLOOR: f64 = 1e-10;

/// Whether `(s, y)` passes the curvature guard.
pub fn curvature_ok<T: Scalar>(s: &[T], y: &[T]) -> bool {
    let ys = scalar::dot(y, s);
    ys.is_finite() && ys > T::lit(CURVATURE_FLOOR) * scalar::norm2(s) * scalar::norm2(y)
}

/// `H' = (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/(yᵀs)`.
///
/// The caller must ensure the curvature guard holds.
pub fn bfgs_inverse_update<T: Scalar>(h: &DenseMatrix<T>, s: &[T], y: &[T]) -> Result<DenseMatrix<T>> {
    let mut out = h.clone();
    bfgs_inverse_update_in_place(&mut out, s, y)?;
    Ok(out)
}

/// In-place form of [`bfgs_inverse_update`].
///
/// Expanded as `H − ρ(s uᵀ + u sᵀ) + (ρ² yᵀu + ρ) s sᵀ` with `u = H y`,
/// which equals the product form for symmetric `H`.
pub fn bfgs_inverse_update_in_place<T: Scalar>(h: &mut DenseMatrix<T>, s: &[T], y: &[T]) -> Result<()> {
    let n = h.n;
    if s.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.len().min(y.len()),
        });
    }
    if !curvature_ok(s, y) {
        return Err(Error::InvalidParameter("curvature condition yᵀs > 0 violated".into()));
    }
    let rho = T::one() / scalar::dot(y, s);
    let u = h.mul_vec(y);
    let coef = rho * rho * scalar::dot(y, &u) + rho;
    for i in 0..n {
        let row = &mut h.data[i * n..(i + 1) * n];
        let (si, ui) = (s[i], u[i]);
        for j in 0..n {
            row[j] += coef * si * s[j] - rho * (si * u[j] + ui * s[j]);
        }
    }
    // keep exact symmetry against rounding drift
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (h.data[i * n + j] + h.data[j * n + i]) / T::lit(2.0);
            h.data[i * n + j] = avg;
            h.data[j * n + i] = avg;
        }
    }
    Ok(())
}
