use std::sync::Arc;

use crate::bundle::{build_dual_chart, BundleChart, CorrespondenceChart};
use crate::courant::Section;
use crate::error::{Error, Result};
use crate::exterior::{exp_form, fiber_integrate, sup_norm, Coframe, Form, FrameVector};
use crate::linalg::CMat;
use crate::scalar::{CScalar, Point};

/// Default tolerance for validating a pair on construction.
pub const PAIR_TOL: f64 = 1e-9;

/// A T-dual pair `(M, H)`, `(M̃, H̃)` with correspondence 2-form `F`.
#[derive(Clone, Debug)]
pub struct DualityPair {
    corr: CorrespondenceChart,
}

/// Determinant by cofactor expansion (small symbolic matrices).
pub(crate) fn det(m: &[Vec<CScalar>]) -> CScalar {
    match m.len() {
        0 => CScalar::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = CScalar::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<CScalar>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Solves `m k = r` symbolically by Cramer's rule.
pub(crate) fn cramer(m: &[Vec<CScalar>], r: &[CScalar]) -> Vec<CScalar> {
    let d = det(m);
    (0..m.len())
        .map(|j| {
            let mj: Vec<Vec<CScalar>> = m
                .iter()
                .zip(r)
                .map(|(row, ri)| row.iter().enumerate().map(|(c, x)| if c == j { ri.clone() } else { x.clone() }).collect())
                .collect();
            det(&mj).div(&d)
        })
        .collect()
}

impl DualityPair {
    /// Wraps a correspondence after checking `p*H - p̃*H̃ = dF` and the
    /// invertibility of the fiber block of `F` at sampled points.
    pub fn new(corr: CorrespondenceChart, seed: u64) -> Result<Self> {
        let points = corr.m().sample(seed, 16)?;
        let rep = corr.validate(&points)?;
        if rep.df_residual > PAIR_TOL {
            return Err(Error::Degenerate(format!("dF identity fails with residual {:e}", rep.df_residual)));
        }
        if !rep.nondegenerate {
            return Err(Error::Degenerate("fiber block of F is singular".into()));
        }
        Ok(DualityPair { corr })
    }

    /// The T-dual of `ch` constructed from the splitting of its flux.
    pub fn from_chart(ch: &BundleChart) -> Result<Self> {
        let (_, corr) = build_dual_chart(ch)?;
        DualityPair::new(corr, 0)
    }

    pub fn corr(&self) -> &CorrespondenceChart {
        &self.corr
    }

    pub fn m(&self) -> &BundleChart {
        self.corr.m()
    }

    pub fn mt(&self) -> &BundleChart {
        self.corr.mt()
    }

    pub fn f(&self) -> &Form {
        self.corr.f()
    }

    /// The pair read from `M̃` to `M` (with `-F`).
    pub fn reversed(&self) -> Result<Self> {
        Ok(DualityPair { corr: self.corr.reversed()? })
    }

    /// `τ(ρ) = ∫_{T^k} e^F ∧ p*ρ`.
    pub fn tau(&self, rho: &Form) -> Result<Form> {
        if rho.coframe() != self.m().coframe() {
            return Err(Error::CoframeMismatch("τ expects a form on M".into()));
        }
        let cf = self.corr.coframe();
        let integrand = exp_form(self.f(), cf.dim())?.wedge(&self.corr.pull_m(rho)?)?;
        fiber_integrate(&integrand, self.m().fiber_tag()).transfer(self.mt().coframe())
    }

    /// τ in the opposite direction, using `e^{-F}` and the fibers of `M̃`.
    pub fn tau_reverse(&self, rho: &Form) -> Result<Form> {
        self.reversed()?.tau(rho)
    }

    /// Constant `s` with `τ_reverse ∘ τ = s · id`, read off from `τ_reverse(τ(1))`.
    pub fn roundtrip_sign(&self) -> Result<i32> {
        let one = Form::one(self.m().coframe());
        let back = self.tau_reverse(&self.tau(&one)?)?;
        let p = self.m().sample(0, 1)?;
        let v = back.coeff(0).eval(&p[0])?;
        if (v.re.abs() - 1.0).abs() > 1e-9 || v.im.abs() > 1e-9 {
            return Err(Error::Degenerate(format!("τ round trip of 1 gave {v}")));
        }
        Ok(if v.re > 0.0 { 1 } else { -1 })
    }

    /// The lift `X̂ = X + Σ k_j ∂_{θ̃_j}` on the correspondence space fixed
    /// by `ξ(∂_{θ_i}) = F(X̂, ∂_{θ_i})`.
    pub fn lift(&self, v: &Section) -> Result<FrameVector> {
        let cf = self.corr.coframe();
        let x = v.x.transfer(cf)?;
        let xi = v.xi.transfer(cf)?;
        let (fib, dual) = self.corr.fiber_indices();
        let blk = self.corr.fiber_block()?;
        let ixf = self.f().contract(&x)?;
        let rhs: Vec<CScalar> = fib
            .iter()
            .map(|&i| {
                let e = FrameVector::unit(cf, i);
                Ok(&ixf.contract(&e)?.coeff(0) - &xi.contract(&e)?.coeff(0))
            })
            .collect::<Result<_>>()?;
        let k = cramer(&blk, &rhs);
        let mut xhat = x;
        for (&j, kj) in dual.iter().zip(&k) {
            xhat.set(j, xhat.comp(j) + kj);
        }
        Ok(xhat)
    }

    /// `φ(X + ξ) = p̃_*X̂ + p*ξ - i_{X̂}F`.
    pub fn phi(&self, v: &Section) -> Result<Section> {
        if v.coframe() != self.m().coframe() {
            return Err(Error::CoframeMismatch("φ expects a section on M".into()));
        }
        let xhat = self.lift(v)?;
        let xi = v.xi.transfer(self.corr.coframe())?;
        let form = &xi - &self.f().contract(&xhat)?;
        // The θ-legs vanish by the choice of lift.
        let fib = self.corr.coframe().tag_mask(self.m().fiber_tag());
        let form = form.filter(|m| m & fib == 0);
        Section::new(xhat.project(self.mt().coframe()), form.transfer(self.mt().coframe())?)
    }

    /// Residual of `τ(v·ρ) = φ(v)·τ(ρ)`.
    pub fn compat_residual(&self, v: &Section, rho: &Form, points: &[Point]) -> Result<f64> {
        let lhs = self.tau(&v.act(rho)?)?;
        let rhs = self.phi(v)?.act(&self.tau(rho)?)?;
        sup_norm(&(&lhs - &rhs), points)
    }

    /// Residual of `d_{H̃} τ(ρ) = τ(d_H ρ)`.
    pub fn intertwining_residual(&self, rho: &Form, points: &[Point]) -> Result<f64> {
        let lhs = self.mt().d_h(&self.tau(rho)?)?;
        let rhs = self.tau(&self.m().d_h(rho)?)?;
        sup_norm(&(&lhs - &rhs), points)
    }

    /// Matrix of φ at `p` in the bases `(∂_i, e^i)` of both sides.
    pub fn phi_matrix(&self, p: &Point) -> Result<CMat> {
        let cf = self.m().coframe();
        let n = cf.dim();
        let nt = self.mt().coframe().dim();
        let mut out = CMat::zeros(2 * nt, 2 * n);
        for i in 0..2 * n {
            let v = basis_section(cf, i);
            out.set_column(i, &self.phi(&v)?.eval(p)?);
        }
        Ok(out)
    }

    /// Matrix of τ at `p` on the monomial bases of both sides.
    pub fn tau_matrix(&self, p: &Point) -> Result<CMat> {
        let cf = self.m().coframe();
        let n = cf.dim();
        let nt = self.mt().coframe().dim();
        let mut out = CMat::zeros(1 << nt, 1 << n);
        for m in 0..(1u64 << n) {
            let img = self.tau(&Form::monomial(cf, m, CScalar::one()))?;
            out.set_column(m as usize, &img.eval(p)?);
        }
        Ok(out)
    }
}

/// The `i`-th constant section of the frame `(∂_1..∂_N, e^1..e^N)`.
pub fn basis_section(cf: &Arc<Coframe>, i: usize) -> Section {
    let n = cf.dim();
    if i < n {
        Section::vector(FrameVector::unit(cf, i))
    } else {
        Section::covector(Form::monomial(cf, 1 << (i - n), CScalar::one())).expect("1-form")
    }
}

