use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::{Form, FrameVector};
use crate::scalar::{Point, Scalar};

/// A generalized metric given by a symmetric tensor `g` (components
/// `g(e_i, e_j)` in the frame dual to the coframe) and a 2-form `b`.
#[derive(Clone, Debug)]
pub struct GeneralizedMetric {
    pub g: Vec<Vec<Scalar>>,
    pub b: Form,
}

impl GeneralizedMetric {
    pub fn new(g: Vec<Vec<Scalar>>, b: Form) -> Result<Self> {
        let n = b.coframe().dim();
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!("metric must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(Error::Config(format!("metric not symmetric at ({i},{j})")));
                }
            }
        }
        if !b.is_zero() && b.degree() != Some(2) {
            return Err(Error::Degree("b must be a 2-form".into()));
        }
        Ok(GeneralizedMetric { g, b })
    }

    /// `B_ij = b(e_i, e_j)` as symbolic entries.
    pub fn b_matrix(&self) -> Result<Vec<Vec<Scalar>>> {
        let cf = self.b.coframe();
        let n = cf.dim();
        (0..n)
            .map(|i| {
                let bi = self.b.contract(&FrameVector::unit(cf, i))?;
                (0..n).map(|j| Ok(bi.contract(&FrameVector::unit(cf, j))?.coeff(0).re)).collect()
            })
            .collect()
    }

    /// Numeric `(G, B)` at `p`.
    pub fn at(&self, p: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.g.len();
        let bm = self.b_matrix()?;
        let mut g = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.g[i][j].eval(p)?;
                b[(i, j)] = bm[i][j].eval(p)?;
            }
        }
        Ok((g, b))
    }

    pub fn positive_at(&self, p: &Point) -> Result<bool> {
        let (g, _) = self.at(p)?;
        Ok(g.symmetric_eigen().eigenvalues.iter().all(|&x| x > 0.0))
    }
}

/// Columns spanning `C± = {X + b(X,·) ± g(X,·)}`.
pub fn c_pm(g: &DMatrix<f64>, b: &DMatrix<f64>, sign: f64) -> DMatrix<f64> {
    let n = g.nrows();
    let mut out = DMatrix::zeros(2 * n, n);
    out.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
    out.view_mut((n, 0), (n, n)).copy_from(&(b + g * sign).transpose());
    out
}

/// `𝒢` as `+1` on `C₊` and `-1` on `C₋`.
pub fn metric_endomorphism(g: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.clone().cholesky().is_none() {
        return Err(Error::Degenerate("metric is not positive definite".into()));
    }
    let plus = c_pm(g, b, 1.0);
    let minus = c_pm(g, b, -1.0);
    let mut basis = DMatrix::zeros(2 * n, 2 * n);
    basis.view_mut((0, 0), (2 * n, n)).copy_from(&plus);
    basis.view_mut((0, n), (2 * n, n)).copy_from(&minus);
    let mut eig = DMatrix::identity(2 * n, 2 * n);
    for i in n..2 * n {
        eig[(i, i)] = -1.0;
    }
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::Degenerate("C₊ and C₋ are not complementary".into()))?;
    Ok(&basis * eig * inv)
}

/// Recovers `(g, b)` from a basis of `C₊` written as columns `[P; Q]`.
pub fn gb_from_cplus(c_plus: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = c_plus.ncols();
    if c_plus.nrows() != 2 * n {
        return Err(Error::Config("C₊ basis must be 2n x n".into()));
    }
    let p = c_plus.view((0, 0), (n, n)).into_owned();
    let q = c_plus.view((n, 0), (n, n)).into_owned();
    let pinv = p.try_inverse().ok_or_else(|| Error::Degenerate("C₊ is not a graph over T".into()))?;
    let a = q * pinv;
    let g = (&a + a.transpose()) * 0.5;
    let b = (a.transpose() - &a) * 0.5;
    Ok((g, b))
}
