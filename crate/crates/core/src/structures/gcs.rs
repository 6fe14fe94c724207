use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spinor::annihilator;
use crate::error::{Error, Result};
use crate::linalg::{hcat, rank, CMat, CVec};

/// Real matrix of the generalized complex structure with `+i`-eigenspace
/// `L = Ann(ρ)`, in `(X, ξ)` coordinates.
pub fn gcs_endomorphism(n: usize, rho: &CVec) -> Result<DMatrix<f64>> {
    let l = annihilator(n, rho)?;
    let lbar = l.map(|z| z.conj());
    let basis = hcat(&l, &lbar);
    if l.ncols() != n || rank(&basis) != 2 * n {
        return Err(Error::Degenerate("L ∩ L̄ ≠ 0: spinor is not of generalized complex type".into()));
    }
    let mut eig = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        eig[(i, i)] = Complex64::i();
        eig[(n + i, n + i)] = -Complex64::i();
    }
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::Degenerate("eigenbasis not invertible".into()))?;
    let j = &basis * eig * inv;
    let imag = j.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if imag > 1e-8 * (1.0 + j.norm()) {
        return Err(Error::Degenerate(format!("generalized complex structure not real (imaginary part {imag:e})")));
    }
    Ok(j.map(|z| z.re))
}

/// Transverse intersection test `L ∩ L̄ = 0`.
pub fn is_nondegenerate(n: usize, rho: &CVec) -> Result<bool> {
    let l = annihilator(n, rho)?;
    Ok(l.ncols() == n && rank(&hcat(&l, &l.map(|z| z.conj()))) == 2 * n)
}

/// Kind of generalized complex structure, by type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Symplectic,
    Complex,
    /// Neither extreme: the type lies strictly between 0 and half the dimension.
    Intermediate,
}

impl StructureKind {
    pub fn of_type(spinor_type: usize, n: usize) -> Self {
        if spinor_type == 0 {
            StructureKind::Symplectic
        } else if 2 * spinor_type == n {
            StructureKind::Complex
        } else {
            StructureKind::Intermediate
        }
    }
}

/// Position of the torus fibers relative to a complex or symplectic structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberKind {
    /// `I(TF) = TF`.
    Complex,
    /// `TF ∩ I(TF) = 0`.
    Real,
    /// `ω|_F` nondegenerate.
    Symplectic,
    /// `ω|_F = 0`.
    Lagrangian,
    Mixed,
}

/// Classifies the fiber directions `fibers` (frame indices) against the
/// structure `J` of the given kind. The complex structure is the negative of
/// the vector block of `J`, and `ω` is recovered from its upper-right block,
/// both unaffected by B-field transforms.
pub fn fiber_geometry(j: &DMatrix<f64>, fibers: &[usize], kind: StructureKind) -> Result<FiberKind> {
    let n = j.nrows() / 2;
    let k = fibers.len();
    let unit = |i: usize| nalgebra::DVector::<f64>::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
    match kind {
        StructureKind::Complex => {
            let i_mat = -j.view((0, 0), (n, n)).into_owned();
            let mut cols: Vec<nalgebra::DVector<f64>> = fibers.iter().map(|&f| unit(f)).collect();
            cols.extend(fibers.iter().map(|&f| &i_mat * unit(f)));
            let r = crate::linalg::rank(&crate::linalg::to_complex(&DMatrix::from_columns(&cols)));
            Ok(if r == k {
                FiberKind::Complex
            } else if r == 2 * k {
                FiberKind::Real
            } else {
                FiberKind::Mixed
            })
        }
        StructureKind::Symplectic => {
            let tr = j.view((0, n), (n, n)).into_owned();
            let inv = tr.try_inverse().ok_or_else(|| Error::Degenerate("J is not of symplectic type".into()))?;
            let w = (-inv).transpose();
            let wf = DMatrix::from_fn(k, k, |a, b| w[(fibers[a], fibers[b])]);
            let scale = w.abs().max();
            let r = crate::linalg::rank(&crate::linalg::to_complex(&wf));
            Ok(if wf.abs().max() <= 1e-10 * scale {
                FiberKind::Lagrangian
            } else if r == k {
                FiberKind::Symplectic
            } else {
                FiberKind::Mixed
            })
        }
        StructureKind::Intermediate => Ok(FiberKind::Mixed),
    }
}
