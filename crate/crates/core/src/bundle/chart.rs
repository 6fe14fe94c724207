use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{bits, sup_norm, Coframe, Form, FrameVector, Generator, Tag};
use crate::scalar::{rng, CScalar, Domain, Point};

/// A coframe together with the exterior derivatives of its generators.
///
/// Coefficients are functions of the base variables only, so `d` follows
/// from `d(coeff) = Σ ∂_a(coeff) dx^a` and the structure equations stored
/// in `dgen`.
#[derive(Clone, Debug)]
pub struct Chart {
    cf: Arc<Coframe>,
    domain: Domain,
    dgen: Vec<Form>,
}

impl Chart {
    pub fn new(cf: Arc<Coframe>, domain: Domain, dgen: Vec<Form>) -> Result<Self> {
        if dgen.len() != cf.dim() {
            return Err(Error::Config("one structure equation per generator is required".into()));
        }
        for (g, dg) in cf.gens().iter().zip(&dgen) {
            if dg.coframe() != &cf {
                return Err(Error::CoframeMismatch(format!("structure equation of {}", g.name)));
            }
            if !dg.is_zero() && dg.degree() != Some(2) {
                return Err(Error::Degree(format!("d{} must be a 2-form", g.name)));
            }
            if g.tag == Tag::Base && !dg.is_zero() {
                return Err(Error::Config(format!("base generator {} must be closed", g.name)));
            }
        }
        let vars = cf.base_vars();
        if vars != domain.vars {
            return Err(Error::Config(format!("domain variables {:?} do not match coframe {:?}", domain.vars, vars)));
        }
        Ok(Chart { cf, domain, dgen })
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        &self.cf
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dgen(&self, i: usize) -> &Form {
        &self.dgen[i]
    }

    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<Point>> {
        self.domain.sample(&mut rng(seed), n)
    }

    /// Exterior derivative of an invariant form.
    pub fn d(&self, rho: &Form) -> Result<Form> {
        if rho.coframe() != &self.cf {
            return Err(Error::CoframeMismatch("form and chart use different coframes".into()));
        }
        let mut out = Form::zero(&self.cf);
        for (m, c) in rho.terms() {
            for g in self.cf.gens() {
                let Some(var) = &g.var else { continue };
                let dc = c.diff(var);
                if dc.is_zero() {
                    continue;
                }
                let i = self.cf.index(&g.name).expect("generator of own coframe");
                let s = crate::exterior::wedge_sign(1 << i, *m);
                if s != 0 {
                    out.add_term((1 << i) | m, if s > 0 { dc } else { -&dc });
                }
            }
            for (pos, i) in bits(*m).enumerate() {
                if self.dgen[i].is_zero() {
                    continue;
                }
                let rest = Form::monomial(&self.cf, m & !(1 << i), c.clone());
                let term = self.dgen[i].wedge(&rest)?;
                out = if pos % 2 == 0 { &out + &term } else { &out - &term };
            }
        }
        Ok(out)
    }

    /// Derivative of a function along an invariant vector field: only the
    /// base components differentiate.
    pub fn apply_vector(&self, x: &FrameVector, f: &CScalar) -> CScalar {
        let mut out = CScalar::zero();
        for (i, g) in self.cf.gens().iter().enumerate() {
            if let Some(var) = &g.var {
                let xi = x.comp(i);
                if !xi.is_zero() {
                    out = &out + &(xi * &f.diff(var));
                }
            }
        }
        out
    }

    /// Lie bracket of invariant vector fields in the frame dual to the
    /// coframe: `[X,Y]^k = X(Y^k) - Y(X^k) - de^k(X,Y)`.
    pub fn lie_bracket(&self, x: &FrameVector, y: &FrameVector) -> Result<FrameVector> {
        let mut comps = Vec::with_capacity(self.cf.dim());
        for k in 0..self.cf.dim() {
            let deriv = &self.apply_vector(x, y.comp(k)) - &self.apply_vector(y, x.comp(k));
            let curv = self.dgen[k].contract(x)?.contract(y)?.coeff(0);
            comps.push(&deriv - &curv);
        }
        FrameVector::new(&self.cf, comps)
    }
}

/// Local model of a principal torus bundle with connection and flux.
#[derive(Clone, Debug)]
pub struct BundleChart {
    pub name: String,
    chart: Chart,
    fiber_tag: Tag,
    flux: Form,
}

/// Residuals of the chart invariants over sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartReport {
    pub dh: f64,
    pub zero_holonomy: f64,
    pub curvature_closed: f64,
    pub curvature_basic: bool,
}

impl ChartReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.dh <= tol && self.zero_holonomy <= tol && self.curvature_closed <= tol && self.curvature_basic
    }
}

impl BundleChart {
    /// Coframe `dx^a` (one per domain variable) followed by the fiber generators.
    pub fn make_coframe(domain: &Domain, fiber_tag: Tag, fibers: &[&str]) -> Result<Arc<Coframe>> {
        if fiber_tag == Tag::Base {
            return Err(Error::Config("fiber generators cannot carry the base tag".into()));
        }
        let mut gens: Vec<Generator> = domain.vars.iter().map(|v| Generator::base(v)).collect();
        gens.extend(fibers.iter().map(|f| Generator { name: f.to_string(), tag: fiber_tag, var: None }));
        Coframe::new(gens)
    }

    /// `curvature[i]` is `dθ_i`; both curvature and flux live on `cf`.
    pub fn new(name: &str, cf: Arc<Coframe>, domain: Domain, curvature: Vec<Form>, flux: Form) -> Result<Self> {
        let fibers: Vec<usize> = (0..cf.dim()).filter(|&i| cf.gen(i).tag != Tag::Base).collect();
        let fiber_tag = fibers.first().map(|&i| cf.gen(i).tag).unwrap_or(Tag::Fiber);
        if fibers.iter().any(|&i| cf.gen(i).tag != fiber_tag) {
            return Err(Error::Config("a bundle chart carries a single kind of fiber generator".into()));
        }
        if curvature.len() != fibers.len() {
            return Err(Error::Config(format!("{} curvature forms for {} fibers", curvature.len(), fibers.len())));
        }
        if flux.coframe() != &cf {
            return Err(Error::CoframeMismatch("flux".into()));
        }
        if !flux.is_zero() && flux.degree() != Some(3) {
            return Err(Error::Degree("flux must be a 3-form".into()));
        }
        let mut dgen: Vec<Form> = (0..cf.dim()).map(|_| Form::zero(&cf)).collect();
        for (&i, c) in fibers.iter().zip(curvature) {
            dgen[i] = c;
        }
        let chart = Chart::new(cf, domain, dgen)?;
        Ok(BundleChart { name: name.to_string(), chart, fiber_tag, flux })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        self.chart.coframe()
    }

    pub fn domain(&self) -> &Domain {
        self.chart.domain()
    }

    pub fn fiber_tag(&self) -> Tag {
        self.fiber_tag
    }

    pub fn fiber_indices(&self) -> Vec<usize> {
        self.coframe().indices_with(self.fiber_tag)
    }

    pub fn base_indices(&self) -> Vec<usize> {
        self.coframe().indices_with(Tag::Base)
    }

    pub fn rank(&self) -> usize {
        self.fiber_indices().len()
    }

    pub fn base_dim(&self) -> usize {
        self.base_indices().len()
    }

    pub fn flux(&self) -> &Form {
        &self.flux
    }

    /// Curvature `c_i = dθ_i` of the `i`-th fiber.
    pub fn curvature(&self, i: usize) -> &Form {
        self.chart.dgen(self.fiber_indices()[i])
    }

    pub fn with_flux(&self, flux: Form) -> Result<Self> {
        let curv = (0..self.rank()).map(|i| self.curvature(i).clone()).collect();
        BundleChart::new(&self.name, self.coframe().clone(), self.domain().clone(), curv, flux)
    }

    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<Point>> {
        self.chart.sample(seed, n)
    }

    pub fn d(&self, rho: &Form) -> Result<Form> {
        self.chart.d(rho)
    }

    /// Twisted differential `d_H ρ = dρ + H ∧ ρ`.
    pub fn d_h(&self, rho: &Form) -> Result<Form> {
        Ok(&self.d(rho)? + &self.flux.wedge(rho)?)
    }

    /// Terms of the flux with two or more fiber legs.
    pub fn holonomy_part(&self) -> Form {
        let fib = self.coframe().tag_mask(self.fiber_tag);
        self.flux.filter(|m| (m & fib).count_ones() >= 2)
    }

    /// Splits `H = Σ c̃_i ∧ θ_i + h` with basic `c̃_i` and `h`.
    pub fn split_flux(&self) -> Result<(Vec<Form>, Form)> {
        let bad = self.holonomy_part();
        if !bad.is_zero() {
            return Err(Error::ZeroHolonomy(format!("flux has terms {bad} with two fiber legs")));
        }
        let cf = self.coframe();
        let fibers = self.fiber_indices();
        let mut ct: Vec<Form> = fibers.iter().map(|_| Form::zero(cf)).collect();
        let mut h = Form::zero(cf);
        for (m, c) in self.flux.terms() {
            match fibers.iter().position(|&i| m & (1 << i) != 0) {
                None => h.add_term(*m, c.clone()),
                Some(j) => {
                    let bit = 1u64 << fibers[j];
                    let s = crate::exterior::wedge_sign(m & !bit, bit);
                    ct[j].add_term(m & !bit, if s > 0 { c.clone() } else { -c });
                }
            }
        }
        Ok((ct, h))
    }

    pub fn validate(&self, points: &[Point]) -> Result<ChartReport> {
        let dh = sup_norm(&self.d(&self.flux)?, points)?;
        let zero_holonomy = sup_norm(&self.holonomy_part(), points)?;
        let mut curvature_closed: f64 = 0.0;
        let mut curvature_basic = true;
        for i in 0..self.rank() {
            let c = self.curvature(i);
            curvature_closed = curvature_closed.max(sup_norm(&self.d(c)?, points)?);
            curvature_basic &= c.avoids(&[Tag::Fiber, Tag::DualFiber]);
        }
        Ok(ChartReport { dh, zero_holonomy, curvature_closed, curvature_basic })
    }
}
