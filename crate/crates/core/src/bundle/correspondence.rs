use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::Rational64;

use super::chart::{BundleChart, Chart};
use crate::error::{Error, Result};
use crate::exterior::{sup_norm, Coframe, Form, FrameVector, Generator, Tag};
use crate::scalar::{CScalar, Point};

/// Fiber product `M ×_B M̃` of two bundle charts over a shared base, with
/// the invariant 2-form `F`.
#[derive(Clone, Debug)]
pub struct CorrespondenceChart {
    m: BundleChart,
    mt: BundleChart,
    total: Chart,
    f: Form,
}

/// Residuals and flags for the defining conditions of a T-dual pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairReport {
    /// `max |p*H - p̃*H̃ - dF|` over the sampled points.
    pub df_residual: f64,
    pub nondegenerate: bool,
    /// Smallest `|det F_ij|` seen on the samples.
    pub min_abs_det: f64,
    /// `Some` only when the fiber block has constant entries.
    pub unimodular: Option<bool>,
}

impl PairReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.df_residual <= tol && self.nondegenerate && self.unimodular != Some(false)
    }
}

/// Name of the generator dual to `name` (`theta` ↔ `theta~`).
pub fn dual_name(name: &str) -> String {
    match name.strip_suffix('~') {
        Some(base) => base.to_string(),
        None => format!("{name}~"),
    }
}

fn dual_tag(tag: Tag) -> Tag {
    match tag {
        Tag::Fiber => Tag::DualFiber,
        _ => Tag::Fiber,
    }
}

impl CorrespondenceChart {
    pub fn new(m: BundleChart, mt: BundleChart, f: Form) -> Result<Self> {
        if m.domain() != mt.domain() {
            return Err(Error::Config("T-dual charts must share the base domain".into()));
        }
        if m.fiber_tag() == mt.fiber_tag() {
            return Err(Error::Config("the two charts must use distinct fiber tags".into()));
        }
        let cf_m = m.coframe();
        let cf_t = mt.coframe();
        let mut gens: Vec<Generator> = m.base_indices().iter().map(|&i| cf_m.gen(i).clone()).collect();
        gens.extend(m.fiber_indices().iter().map(|&i| cf_m.gen(i).clone()));
        gens.extend(mt.fiber_indices().iter().map(|&i| cf_t.gen(i).clone()));
        let cf = Coframe::new(gens)?;
        let mut dgen = Vec::with_capacity(cf.dim());
        for g in cf.gens() {
            let dg = if let Some(i) = cf_m.index(&g.name) {
                m.chart().dgen(i).transfer(&cf)?
            } else {
                let i = cf_t.require(&g.name)?;
                mt.chart().dgen(i).transfer(&cf)?
            };
            dgen.push(dg);
        }
        let total = Chart::new(cf.clone(), m.domain().clone(), dgen)?;
        let f = f.transfer(&cf)?;
        if !f.is_zero() && f.degree() != Some(2) {
            return Err(Error::Degree("F must be a 2-form".into()));
        }
        Ok(CorrespondenceChart { m, mt, total, f })
    }

    pub fn m(&self) -> &BundleChart {
        &self.m
    }

    pub fn mt(&self) -> &BundleChart {
        &self.mt
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        self.total.coframe()
    }

    pub fn f(&self) -> &Form {
        &self.f
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    pub fn with_f(&self, f: Form) -> Result<Self> {
        CorrespondenceChart::new(self.m.clone(), self.mt.clone(), f)
    }

    /// The same correspondence read from the other side, with `-F`.
    pub fn reversed(&self) -> Result<Self> {
        CorrespondenceChart::new(self.mt.clone(), self.m.clone(), -&self.f)
    }

    /// Indices in the total coframe of the fibers of `M` and of `M̃`.
    pub fn fiber_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let cf = self.coframe();
        (cf.indices_with(self.m.fiber_tag()), cf.indices_with(self.mt.fiber_tag()))
    }

    /// `F_ij = F(∂_{θ_i}, ∂_{θ̃_j})` with `β(X,Y) = i_Y i_X β`.
    pub fn fiber_block(&self) -> Result<Vec<Vec<CScalar>>> {
        let cf = self.coframe();
        let (a, b) = self.fiber_indices();
        a.iter()
            .map(|&i| {
                let fi = self.f.contract(&FrameVector::unit(cf, i))?;
                b.iter().map(|&j| Ok(fi.contract(&FrameVector::unit(cf, j))?.coeff(0))).collect()
            })
            .collect()
    }

    pub fn fiber_block_at(&self, p: &Point) -> Result<DMatrix<f64>> {
        let blk = self.fiber_block()?;
        let k = blk.len();
        let mut out = DMatrix::zeros(k, k);
        for (i, row) in blk.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out[(i, j)] = c.eval(p)?.re;
            }
        }
        Ok(out)
    }

    /// Pullback `p*ρ` of a form on `M`.
    pub fn pull_m(&self, rho: &Form) -> Result<Form> {
        rho.transfer(self.coframe())
    }

    /// Pullback `p̃*ρ` of a form on `M̃`.
    pub fn pull_mt(&self, rho: &Form) -> Result<Form> {
        rho.transfer(self.coframe())
    }

    /// `p*H - p̃*H̃ - dF`, which vanishes for a T-dual pair.
    pub fn df_defect(&self) -> Result<Form> {
        let lhs = &self.pull_m(self.m.flux())? - &self.pull_mt(self.mt.flux())?;
        Ok(&lhs - &self.total.d(&self.f)?)
    }

    pub fn validate(&self, points: &[Point]) -> Result<PairReport> {
        let df_residual = sup_norm(&self.df_defect()?, points)?;
        let mut min_abs_det = f64::INFINITY;
        for p in points {
            let blk = self.fiber_block_at(p)?;
            let scale = blk.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            let det = blk.determinant().abs();
            min_abs_det = min_abs_det.min(det / scale.powi(blk.nrows() as i32));
        }
        let nondegenerate = min_abs_det > 1e-10;
        let blk = self.fiber_block()?;
        let constants: Option<Vec<Vec<Rational64>>> = blk
            .iter()
            .map(|row| row.iter().map(|c| if c.is_real() { c.re.as_const() } else { None }).collect())
            .collect();
        let unimodular = constants.map(|rows| {
            let integer = rows.iter().flatten().all(|r| r.is_integer());
            let mut m = DMatrix::zeros(rows.len(), rows.len());
            for (i, row) in rows.iter().enumerate() {
                for (j, r) in row.iter().enumerate() {
                    m[(i, j)] = *r.numer() as f64 / *r.denom() as f64;
                }
            }
            integer && (m.determinant().abs() - 1.0).abs() < 1e-12
        });
        Ok(PairReport { df_residual, nondegenerate, min_abs_det, unimodular })
    }
}

/// Constructs the T-dual chart `M̃` with curvature `c̃` and flux
/// `H̃ = Σ c_i ∧ θ̃_i + h`, together with the correspondence carrying
/// `F = -Σ θ_i ∧ θ̃_i`.
pub fn build_dual_chart(ch: &BundleChart) -> Result<(BundleChart, CorrespondenceChart)> {
    let (ct, h) = ch.split_flux()?;
    let cf = ch.coframe();
    let fibers = ch.fiber_indices();
    let names: Vec<String> = fibers.iter().map(|&i| dual_name(&cf.gen(i).name)).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let tcf = BundleChart::make_coframe(ch.domain(), dual_tag(ch.fiber_tag()), &name_refs)?;
    let curvature: Vec<Form> = ct.iter().map(|c| c.transfer(&tcf)).collect::<Result<_>>()?;
    let mut flux = h.transfer(&tcf)?;
    for (j, n) in names.iter().enumerate() {
        let c = ch.curvature(j).transfer(&tcf)?;
        flux = &flux + &c.wedge(&Form::gen(&tcf, n)?)?;
    }
    let dual = BundleChart::new(&format!("{}~", ch.name), tcf, ch.domain().clone(), curvature, flux)?;
    let placeholder = Form::zero(ch.coframe());
    let corr = CorrespondenceChart::new(ch.clone(), dual.clone(), placeholder)?;
    let mut f = Form::zero(corr.coframe());
    for (&i, n) in fibers.iter().zip(&names) {
        let th = Form::gen(corr.coframe(), &cf.gen(i).name)?;
        let tt = Form::gen(corr.coframe(), n)?;
        f = &f - &th.wedge(&tt)?;
    }
    let corr = corr.with_f(f)?;
    Ok((dual, corr))
}
