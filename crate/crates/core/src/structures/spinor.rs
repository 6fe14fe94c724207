use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bundle::BundleChart;
use crate::error::{Error, Result};
use crate::exterior::{exp_form, mukai_top, Form};
use crate::linalg::{c, lstsq, nullspace, CMat, CVec};
use crate::pointwise::{action_on, clifford_matrix, degree, monomial, mukai_value, wedge_matrix};
use crate::scalar::{CScalar, Point};

/// The data `(B, ω, Ω)` of a spinor `e^{B+iω} ∧ Ω`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub b: Form,
    pub omega: Form,
    pub big_omega: Form,
}

/// A complex form expected to be pure, optionally with its decomposition.
#[derive(Clone, Debug)]
pub struct PureSpinor {
    pub rho: Form,
    pub hint: Option<Decomposition>,
}

/// Relative threshold below which a form component counts as zero.
pub const COMPONENT_TOL: f64 = 1e-10;

impl PureSpinor {
    pub fn new(rho: Form) -> Self {
        PureSpinor { rho, hint: None }
    }

    /// `e^{B + iω} ∧ Ω` for real 2-forms `B`, `ω`.
    pub fn from_data(b: Form, omega: Form, big_omega: Form) -> Result<Self> {
        let cf = b.coframe().clone();
        let exponent = &b + &omega.scale(&CScalar::i());
        let rho = exp_form(&exponent, cf.dim())?.wedge(&big_omega)?;
        Ok(PureSpinor { rho, hint: Some(Decomposition { b, omega, big_omega }) })
    }

    pub fn dim(&self) -> usize {
        self.rho.coframe().dim()
    }

    pub fn at(&self, p: &Point) -> Result<CVec> {
        self.rho.eval(p)
    }

    /// Mukai pairing `(ρ, ρ̄)` as a scalar.
    pub fn mukai_norm(&self) -> Result<CScalar> {
        mukai_top(&self.rho, &self.rho.conj())
    }
}

fn nonzero_at(rho: &CVec) -> Result<f64> {
    let top = rho.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if top == 0.0 {
        return Err(Error::Degenerate("spinor vanishes at the point".into()));
    }
    Ok(top)
}

/// Annihilator `L = {v : v·ρ = 0}` at a point, as columns in `(X, ξ)` coordinates.
pub fn annihilator(n: usize, rho: &CVec) -> Result<CMat> {
    nonzero_at(rho)?;
    Ok(nullspace(&action_on(n, rho)))
}

/// Degree of the lowest nonzero homogeneous component.
pub fn spinor_type(rho: &CVec) -> Result<usize> {
    let top = nonzero_at(rho)?;
    Ok(rho
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > COMPONENT_TOL * top)
        .map(|(m, _)| degree(m))
        .min()
        .expect("some component is nonzero"))
}

/// `(ρ, ρ̄)` at a point, relative to `|ρ|²`.
pub fn relative_mukai_norm(n: usize, rho: &CVec) -> f64 {
    let r2 = rho.norm_squared();
    if r2 == 0.0 {
        return 0.0;
    }
    mukai_value(n, rho, &rho.map(|z| z.conj())).norm() / r2
}

/// Result of the pointwise integrability solve `d_H ρ = v·ρ`.
#[derive(Clone, Debug)]
pub struct Integrability {
    /// Least-squares witness `v` at each sampled point.
    pub witnesses: Vec<CVec>,
    /// Largest residual `|v·ρ - d_H ρ|` over the samples.
    pub residual: f64,
}

impl Integrability {
    pub fn integrable(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

pub fn check_integrable(rho: &Form, ch: &BundleChart, points: &[Point]) -> Result<Integrability> {
    let n = rho.coframe().dim();
    let drho = ch.d_h(rho)?;
    let mut witnesses = Vec::with_capacity(points.len());
    let mut residual: f64 = 0.0;
    for p in points {
        let a = action_on(n, &rho.eval(p)?);
        let (v, r) = lstsq(&a, &drho.eval(p)?);
        residual = residual.max(r);
        witnesses.push(v);
    }
    Ok(Integrability { witnesses, residual })
}

/// The spaces `U^{m-k} = ∧^k L̄ · ρ` for `k = 0..=2m` (`2m = n` generators),
/// each returned as a matrix whose columns span it.
pub fn uk_spaces(n: usize, rho: &CVec) -> Result<Vec<CMat>> {
    let l = annihilator(n, rho)?;
    if l.ncols() != n {
        return Err(Error::Degenerate(format!("annihilator has dimension {} instead of {n}", l.ncols())));
    }
    let lbar: Vec<CMat> = (0..n).map(|i| clifford_matrix(n, &l.column(i).map(|z| z.conj()))).collect();
    let mut spaces = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut cols = Vec::new();
        for subset in 0u64..(1 << n) {
            if subset.count_ones() as usize != k {
                continue;
            }
            let mut v = rho.clone();
            for i in crate::exterior::bits(subset) {
                v = &lbar[i] * v;
            }
            cols.push(v);
        }
        spaces.push(CMat::from_columns(&cols));
    }
    Ok(spaces)
}

/// Matrix of `ι_P` for the bivector `P = Σ_{i<j} P_ij ∂_i ∧ ∂_j`, with
/// `ι_{∂_i∧∂_j} = i_{∂_j} i_{∂_i}`.
fn bivector_contraction(n: usize, p: &DMatrix<f64>) -> CMat {
    let units: Vec<CMat> = (0..n)
        .map(|i| {
            let mut v = CVec::zeros(2 * n);
            v[i] = c(1.0);
            clifford_matrix(n, &v)
        })
        .collect();
    let mut out = CMat::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in i + 1..n {
            if p[(i, j)] != 0.0 {
                out += (&units[j] * &units[i]) * c(p[(i, j)]);
            }
        }
    }
    out
}

fn exp_nilpotent(a: &CMat) -> CMat {
    let dim = a.nrows();
    let mut out = CMat::identity(dim, dim);
    let mut term = CMat::identity(dim, dim);
    for k in 1..=dim {
        term = &term * a / c(k as f64);
        if term.iter().all(|z| z.norm() == 0.0) {
            break;
        }
        out += &term;
    }
    out
}

/// The spaces `e^{iω} e^{-ι_P/2i} ∧^k T*` for a symplectic form with matrix
/// `W_ij = ω(e_i, e_j)` and `P = -W⁻¹`, indexed like [`uk_spaces`].
pub fn symplectic_uk(w: &DMatrix<f64>) -> Result<Vec<CMat>> {
    let n = w.nrows();
    let winv = w.clone().try_inverse().ok_or_else(|| Error::Degenerate("ω is degenerate".into()))?;
    let p = -winv;
    let mut omega = CVec::zeros(1 << n);
    for i in 0..n {
        for j in i + 1..n {
            omega[(1usize << i) | (1usize << j)] = c(w[(i, j)]);
        }
    }
    let e_iomega = exp_nilpotent(&(wedge_matrix(n, &omega) * Complex64::i()));
    let e_p = exp_nilpotent(&(bivector_contraction(n, &p) / Complex64::new(0.0, -2.0)));
    let op = e_iomega * e_p;
    Ok((0..=n)
        .map(|k| {
            let cols: Vec<CVec> =
                (0..1usize << n).filter(|&m| degree(m) == k).map(|m| &op * monomial(n, m as u64)).collect();
            CMat::from_columns(&cols)
        })
        .collect())
}
