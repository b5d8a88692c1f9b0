use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k × D`, orthonormal rows, largest-variance direction first.
    pub components: Matrix,
    /// Sample-covariance eigenvalues (divisor `N − 1`), non-increasing.
    pub explained_variance: Vec<f64>,
}

/// Sample covariance of `x` with divisor `N − 1`, and the column means.
pub fn covariance(x: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    if x.rows() < 2 {
        return Err(Error::InvalidArgument(format!(
            "covariance needs at least 2 rows, got {}",
            x.rows()
        )));
    }
    let mean = x.column_means();
    let centered = center(x, &mean);
    let mut cov = centered.t_matmul(&centered)?;
    cov.scale(1.0 / (x.rows() - 1) as f64);
    Ok((cov, mean))
}

fn center(x: &Matrix, mean: &[f64]) -> Matrix {
    let mut c = x.clone();
    for r in 0..c.rows() {
        for (v, m) in c.row_mut(r).iter_mut().zip(mean) {
            *v -= m;
        }
    }
    c
}

/// Top-`k` principal directions. Each component's largest-magnitude entry is
/// made positive (first such entry on ties), so the result is unique.
pub fn pca_fit(x: &Matrix, k: usize) -> Result<PcaModel> {
    let (n, d) = x.shape();
    if k == 0 || n < 2 || k > (n - 1).min(d) {
        return Err(Error::InvalidArgument(format!(
            "pca k={k} must lie in 1..=min(N-1, D) = {} for a {n}x{d} matrix",
            n.saturating_sub(1).min(d)
        )));
    }
    let (cov, mean) = covariance(x)?;
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, cov.as_slice()));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Matrix::zeros(k, d);
    let mut explained_variance = Vec::with_capacity(k);
    for (row, &idx) in order.iter().take(k).enumerate() {
        let v = eig.eigenvectors.column(idx);
        let mut pivot = 0;
        for j in 1..d {
            if v[j].abs() > v[pivot].abs() {
                pivot = j;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            components.set(row, j, sign * v[j]);
        }
        explained_variance.push(eig.eigenvalues[idx].max(0.0));
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.rows()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `(x − mean) · componentsᵀ`
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.dim() {
            return Err(Error::shape("pca transform input columns", self.dim(), x.cols()));
        }
        center(x, &self.mean).matmul_t(&self.components)
    }

    /// `codes · components + mean`
    pub fn inverse(&self, codes: &Matrix) -> Result<Matrix> {
        if codes.cols() != self.k() {
            return Err(Error::shape("pca inverse code columns", self.k(), codes.cols()));
        }
        let mut out = codes.matmul(&self.components)?;
        for r in 0..out.rows() {
            for (v, m) in out.row_mut(r).iter_mut().zip(&self.mean) {
                *v += m;
            }
        }
        Ok(out)
    }

    /// Mean over rows of the squared distance between `x` and its projection.
    pub fn reconstruction_error(&self, x: &Matrix) -> Result<f64> {
        let back = self.inverse(&self.transform(x)?)?;
        Ok(squared_error(x, &back) / x.rows().max(1) as f64)
    }
}

pub(crate) fn squared_error(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(p, q)| (p - q) * (p - q)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_data_recovers_direction() {
        let dir = [0.6, -0.8, 0.0];
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let t = i as f64 - 9.5;
                vec![1.0 + t * dir[0], 2.0 + t * dir[1], 3.0]
            })
            .collect();
        let m = pca_fit(&Matrix::from_rows(&rows).unwrap(), 1).unwrap();
        let cos: f64 = m.components.row(0).iter().zip(dir).map(|(a, b)| a * b).sum();
        assert!(cos.abs() > 0.999);
        // sign convention: largest-magnitude entry is -0.8 in `dir`, so flipped
        assert!(m.components.get(0, 1) > 0.0);
    }

    #[test]
    fn mean_maps_to_origin() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 1.0], [0.0, 0.0], [2.0, 5.0]]).unwrap();
        let m = pca_fit(&x, 2).unwrap();
        let z = m.transform(&Matrix::from_rows(std::slice::from_ref(&m.mean)).unwrap()).unwrap();
        assert!(z.as_slice().iter().all(|v| v.abs() < 1e-12));
        let back = m.inverse(&m.transform(&x).unwrap()).unwrap();
        assert!(squared_error(&back, &x) < 1e-16);
    }

    #[test]
    fn k_bounds() {
        let x = Matrix::zeros(3, 5);
        assert!(pca_fit(&x, 0).is_err());
        assert!(pca_fit(&x, 3).is_err());
        assert!(pca_fit(&Matrix::zeros(10, 2), 3).is_err());
    }
}
