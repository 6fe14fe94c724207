//! Dense complex linear algebra at a point: rank, nullspaces, spans and
//! least squares with a threshold relative to the largest singular value.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative singular-value threshold used for every rank decision.
pub const RANK_TOL: f64 = 1e-8;

/// Full SVD `a = U diag(s) Vᴴ` with singular values in decreasing order.
struct Svd {
    u: CMat,
    s: Vec<f64>,
    v: CMat,
}

fn to_faer(a: &CMat) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: MatRef<'_, Complex64>) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Svd { u: CMat::identity(m, m), s: Vec::new(), v: CMat::identity(n, n) };
    }
    let f = to_faer(a).svd().expect("SVD converges for finite input");
    let s = f.S().column_vector().iter().map(|z| z.re).collect();
    Svd { u: from_faer(f.U()), s, v: from_faer(f.V()) }
}

fn singular_values(a: &CMat) -> Vec<f64> {
    svd(a).s
}

pub fn rank(a: &CMat) -> usize {
    let s = singular_values(a);
    let top = s.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > RANK_TOL * top).count()
}

/// Orthonormal basis (as columns) of the kernel of `a`.
pub fn nullspace(a: &CMat) -> CMat {
    let n = a.ncols();
    let top = singular_values(a).into_iter().fold(0.0, f64::max);
    if top == 0.0 {
        return CMat::identity(n, n);
    }
    let d = svd(a);
    let cols: Vec<CVec> =
        (0..n).filter(|&i| d.s.get(i).is_none_or(|&x| x <= RANK_TOL * top)).map(|i| d.v.column(i).into_owned()).collect();
    if cols.is_empty() {
        CMat::zeros(n, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthonormal basis (as columns) of the column span of `a`.
pub fn orth(a: &CMat) -> CMat {
    if a.ncols() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let d = svd(a);
    let top = d.s.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<CVec> = (0..d.s.len())
        .filter(|&i| top > 0.0 && d.s[i] > RANK_TOL * top)
        .map(|i| d.u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        CMat::zeros(a.nrows(), 0)
    } else {
        CMat::from_columns(&cols)
    }
}

pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Dimension of the intersection of two column spans.
pub fn intersection_dim(a: &CMat, b: &CMat) -> usize {
    rank(a) + rank(b) - rank(&hcat(a, b))
}

/// Relative distance of `x` from the span of the columns of `basis`.
pub fn membership_defect(basis: &CMat, x: &CVec) -> f64 {
    let norm = x.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let q = orth(basis);
    let proj = &q * (q.adjoint() * x);
    (x - proj).norm() / norm
}

/// Largest relative membership defect of the columns of `a` in span(`basis`).
pub fn span_defect(basis: &CMat, a: &CMat) -> f64 {
    a.column_iter().map(|c| membership_defect(basis, &c.into_owned())).fold(0.0, f64::max)
}

/// Least-squares solution of `a x = b` and the residual norm `|a x - b|`.
pub fn lstsq(a: &CMat, b: &CVec) -> (CVec, f64) {
    if a.ncols() == 0 {
        return (CVec::zeros(0), b.norm());
    }
    let d = svd(a);
    let top = d.s.iter().cloned().fold(0.0, f64::max);
    // x = V Σ⁺ Uᴴ b with small singular values dropped.
    let ub = d.u.adjoint() * b;
    let mut coeffs = CVec::zeros(a.ncols());
    for (k, &sv) in d.s.iter().enumerate() {
        if sv > RANK_TOL * top {
            coeffs[k] = ub[k] / sv;
        }
    }
    let x = &d.v * coeffs;
    let r = (a * &x - b).norm();
    (x, r)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMat {
    a.map(c)
}

/// Eigenvalue signs of a Hermitian matrix: (positive, negative, zero).
pub fn signature(a: &CMat) -> (usize, usize, usize) {
    let h = (a + a.adjoint()).scale(0.5);
    let eig: Vec<f64> = if h.nrows() == 0 {
        Vec::new()
    } else {
        let e = to_faer(&h).self_adjoint_eigen(Side::Lower).expect("Hermitian eigensolver converges");
        e.S().column_vector().iter().map(|z| z.re).collect()
    };
    let top = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let thr = RANK_TOL * top.max(f64::MIN_POSITIVE);
    let pos = eig.iter().filter(|&&x| x > thr).count();
    let neg = eig.iter().filter(|&&x| x < -thr).count();
    (pos, neg, a.nrows() - pos - neg)
}
