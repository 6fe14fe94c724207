use std::sync::Arc;

use nalgebra::DMatrix;

use super::pair::DualityPair;
use crate::courant::Section;
use crate::error::{Error, Result};
use crate::exterior::{fiber_integrate, Coframe, Form, FrameVector, Tag};
use crate::linalg::{rank, span_defect, CMat};
use crate::scalar::{CScalar, Point, Scalar};
use crate::structures::{spinor_type, uk_spaces, GeneralizedMetric, PureSpinor, COMPONENT_TOL};

/// Gauss-Jordan elimination for `a x = b` over symbolic scalars, pivoting on
/// constant entries whenever possible so that simple pivots stay simple.
fn solve_symbolic(mut a: Vec<Vec<Scalar>>, mut b: Vec<Vec<Scalar>>) -> Result<Vec<Vec<Scalar>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a[r][col].as_const().is_some_and(|c| c != 0.into()))
            .or_else(|| (col..n).find(|&r| !a[r][col].is_zero()))
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        b[col] = b[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            a[r] = a[r].iter().zip(&a[col]).map(|(x, y)| x - &(&factor * y)).collect();
            b[r] = b[r].iter().zip(&b[col]).map(|(x, y)| x - &(&factor * y)).collect();
        }
    }
    Ok(b)
}

fn real_part(c: &CScalar) -> Result<Scalar> {
    if !c.is_real() {
        return Err(Error::Degenerate(format!("expected a real coefficient, got {c}")));
    }
    Ok(c.re.clone())
}

/// `Σ_{i<j} m_ij e^i ∧ e^j` for an antisymmetric matrix of scalars.
fn two_form(cf: &Arc<Coframe>, m: &[Vec<Scalar>]) -> Form {
    let mut out = Form::zero(cf);
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            out.add_term((1 << i) | (1 << j), CScalar::real(m[i][j].clone()));
        }
    }
    out
}

/// `τ(ρ)` as a pure spinor on `M̃`.
pub fn transport_spinor(pair: &DualityPair, rho: &PureSpinor) -> Result<PureSpinor> {
    Ok(PureSpinor::new(pair.tau(&rho.rho)?))
}

/// Residual of `τ(v·ρ) = φ(v)·τ(ρ)` at the given points.
pub fn transport_section_compat(pair: &DualityPair, v: &Section, rho: &Form, points: &[Point]) -> Result<f64> {
    pair.compat_residual(v, rho, points)
}

/// The generalized metric on `M̃` whose `C₊` is `φ(C₊)`.
pub fn transport_metric(pair: &DualityPair, m: &GeneralizedMetric) -> Result<GeneralizedMetric> {
    let cf = pair.m().coframe();
    if m.b.coframe() != cf {
        return Err(Error::CoframeMismatch("metric must live on M".into()));
    }
    let tcf = pair.mt().coframe();
    let n = cf.dim();
    let bm = m.b_matrix()?;
    // Columns of P (vectors) and Q (forms) are φ of the graph basis e_i + (b+g)(e_i, ·).
    let mut pt = Vec::with_capacity(n);
    let mut qt = Vec::with_capacity(n);
    for i in 0..n {
        let mut xi = Form::zero(cf);
        for j in 0..n {
            xi.add_term(1 << j, CScalar::real(&bm[i][j] + &m.g[i][j]));
        }
        let image = pair.phi(&Section::new(FrameVector::unit(cf, i), xi)?)?;
        pt.push(image.x.comps().iter().map(real_part).collect::<Result<Vec<_>>>()?);
        qt.push((0..tcf.dim()).map(|l| real_part(&image.xi.coeff(1 << l))).collect::<Result<Vec<_>>>()?);
    }
    // P^T X = Q^T with X = (Q P^{-1})^T = B̃ + G̃.
    let x = solve_symbolic(pt, qt).map_err(|e| Error::Degenerate(format!("φ(C₊) is not a graph: {e}")))?;
    let half = Scalar::ratio(1, 2);
    let nt = tcf.dim();
    let g: Vec<Vec<Scalar>> = (0..nt)
        .map(|i| {
            (0..nt)
                .map(|j| if i == j { x[i][i].clone() } else { &half * &(&x[i][j] + &x[j][i]) })
                .collect()
        })
        .collect();
    let b: Vec<Vec<Scalar>> = (0..nt).map(|i| (0..nt).map(|j| &half * &(&x[i][j] - &x[j][i])).collect()).collect();
    GeneralizedMetric::new(g, two_form(tcf, &b))
}

/// An invariant metric and 2-form on a circle bundle split along a connection:
/// `g(∂θ,∂θ) = g0`, `g(X,∂θ) = g1(X)`, `g(X,Y) = g2(X,Y)`,
/// `b(X,∂θ) = b1(X)`, `b(X,Y) = b2(X,Y)` for horizontal `X, Y`.
#[derive(Clone, Debug)]
pub struct CircleMetric {
    pub g0: Scalar,
    pub g1: Vec<Scalar>,
    pub g2: Vec<Vec<Scalar>>,
    pub b1: Vec<Scalar>,
    pub b2: Vec<Vec<Scalar>>,
}

fn circle_fiber(cf: &Arc<Coframe>) -> Result<(usize, Vec<usize>)> {
    let base = cf.indices_with(Tag::Base);
    let fibers: Vec<usize> = (0..cf.dim()).filter(|i| !base.contains(i)).collect();
    match fibers.as_slice() {
        [f] => Ok((*f, base)),
        _ => Err(Error::Config(format!("expected a circle bundle, found {} fibers", fibers.len()))),
    }
}

impl CircleMetric {
    pub fn from_metric(m: &GeneralizedMetric) -> Result<Self> {
        let (f, base) = circle_fiber(m.b.coframe())?;
        let bm = m.b_matrix()?;
        Ok(CircleMetric {
            g0: m.g[f][f].clone(),
            g1: base.iter().map(|&a| m.g[a][f].clone()).collect(),
            g2: base.iter().map(|&a| base.iter().map(|&c| m.g[a][c].clone()).collect()).collect(),
            b1: base.iter().map(|&a| bm[a][f].clone()).collect(),
            b2: base.iter().map(|&a| base.iter().map(|&c| bm[a][c].clone()).collect()).collect(),
        })
    }

    pub fn to_metric(&self, cf: &Arc<Coframe>) -> Result<GeneralizedMetric> {
        let (f, base) = circle_fiber(cf)?;
        let n = cf.dim();
        if base.len() != self.g1.len() {
            return Err(Error::CoframeMismatch("base dimension differs".into()));
        }
        let mut g = vec![vec![Scalar::zero(); n]; n];
        let mut b = vec![vec![Scalar::zero(); n]; n];
        g[f][f] = self.g0.clone();
        for (ia, &a) in base.iter().enumerate() {
            g[a][f] = self.g1[ia].clone();
            g[f][a] = self.g1[ia].clone();
            b[a][f] = self.b1[ia].clone();
            b[f][a] = -&self.b1[ia];
            for (ic, &c) in base.iter().enumerate() {
                g[a][c] = self.g2[ia][ic].clone();
                b[a][c] = self.b2[ia][ic].clone();
            }
        }
        GeneralizedMetric::new(g, two_form(cf, &b))
    }
}

/// Closed-form dual of circle-bundle metric data.
pub fn buscher(d: &CircleMetric) -> Result<CircleMetric> {
    if d.g0.is_zero() {
        return Err(Error::Degenerate("fiber metric coefficient g0 vanishes".into()));
    }
    let inv = d.g0.recip();
    let k = d.g1.len();
    let scaled = |v: &[Scalar], s: &Scalar| -> Vec<Scalar> { v.iter().map(|x| x * s).collect() };
    let neg_inv = -&inv;
    Ok(CircleMetric {
        g0: inv.clone(),
        g1: scaled(&d.b1, &neg_inv),
        g2: (0..k)
            .map(|a| {
                (0..k)
                    .map(|c| {
                        let corr = &(&d.b1[a] * &d.b1[c]) - &(&d.g1[a] * &d.g1[c]);
                        &d.g2[a][c] + &(&corr * &inv)
                    })
                    .collect()
            })
            .collect(),
        b1: scaled(&d.g1, &neg_inv),
        b2: (0..k)
            .map(|a| {
                (0..k)
                    .map(|c| {
                        let wedge = &(&d.g1[a] * &d.b1[c]) - &(&d.g1[c] * &d.b1[a]);
                        &d.b2[a][c] + &(&wedge * &inv)
                    })
                    .collect()
            })
            .collect(),
    })
}

/// Outcome of the type-change computation at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualType {
    /// Smallest `j` with `∫ (F + B + iω)^j ∧ Ω ≠ 0` at the point.
    pub j: usize,
    pub source_type: usize,
    pub rank: usize,
    pub dual_type: usize,
}

/// Type of `τ(ρ)` at `p` read off from the decomposition `e^{B+iω} ∧ Ω` of `ρ`.
pub fn dual_type(rho: &PureSpinor, pair: &DualityPair, p: &Point) -> Result<DualType> {
    let hint = rho.hint.as_ref().ok_or_else(|| Error::Config("dual_type needs a spinor built from (B, ω, Ω)".into()))?;
    let corr = pair.corr();
    let cf = corr.coframe();
    let exponent = &(pair.f() + &corr.pull_m(&hint.b)?) + &corr.pull_m(&hint.omega)?.scale(&CScalar::i());
    let omega = corr.pull_m(&hint.big_omega)?;
    let source_type = omega
        .degree()
        .ok_or_else(|| Error::Degree("Ω must be homogeneous".into()))?;
    let tag = pair.m().fiber_tag();
    let mut values = Vec::new();
    let mut power = Form::one(cf);
    for j in 0..=cf.dim() / 2 {
        if j > 0 {
            power = power.wedge(&exponent)?.scale_real(&Scalar::ratio(1, j as i64));
        }
        let integrated = fiber_integrate(&power.wedge(&omega)?, tag);
        let v = integrated.eval(p)?;
        values.push(v.iter().fold(0.0f64, |m, z| m.max(z.norm())));
    }
    let top = values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::Degenerate("every fiber integral vanishes: pair is degenerate".into()));
    }
    let j = values.iter().position(|&v| v > COMPONENT_TOL * top).expect("top is attained");
    let k = pair.m().rank();
    let dual = (source_type + 2 * j)
        .checked_sub(k)
        .ok_or_else(|| Error::Degree("negative dual type".into()))?;
    Ok(DualType { j, source_type, rank: k, dual_type: dual })
}

/// Checks `dual_type` against `spinor_type(τ(ρ))` at `p`.
pub fn dual_type_consistent(rho: &PureSpinor, pair: &DualityPair, p: &Point) -> Result<bool> {
    let dt = dual_type(rho, pair, p)?;
    Ok(spinor_type(&pair.tau(&rho.rho)?.eval(p)?)? == dt.dual_type)
}

/// Largest membership defect of `τ(U^k_M)` in `U^k_{M̃}` at `p`, over all `k`;
/// a dimension mismatch counts as defect 1.
pub fn transport_uk(rho: &Form, pair: &DualityPair, p: &Point) -> Result<f64> {
    let n = pair.m().coframe().dim();
    let nt = pair.mt().coframe().dim();
    let source = uk_spaces(n, &rho.eval(p)?)?;
    let target = uk_spaces(nt, &pair.tau(rho)?.eval(p)?)?;
    let t = pair.tau_matrix(p)?;
    let mut worst: f64 = 0.0;
    for (u, ut) in source.iter().zip(&target) {
        let image: CMat = &t * u;
        if rank(&image) != rank(ut) {
            return Ok(1.0);
        }
        worst = worst.max(span_defect(ut, &image));
    }
    Ok(worst)
}

/// Sign of the orientation induced by a complex structure: `det(v₁, Iv₁, v₂, Iv₂, ...)`
/// for a complex basis chosen greedily from the standard basis.
pub fn complex_orientation(i: &DMatrix<f64>) -> Result<f64> {
    let n = i.nrows();
    if n % 2 != 0 || (i * i + DMatrix::<f64>::identity(n, n)).abs().max() > 1e-8 * (1.0 + i.abs().max().powi(2)) {
        return Err(Error::Degenerate("not a complex structure".into()));
    }
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    for k in 0..n {
        let v = nalgebra::DVector::<f64>::from_fn(n, |r, _| if r == k { 1.0 } else { 0.0 });
        let iv = i * &v;
        let mut trial = cols.clone();
        trial.push(v);
        trial.push(iv);
        let m = DMatrix::from_columns(&trial);
        if m.clone().svd(false, false).singular_values.iter().all(|&s| s > 1e-10) {
            cols = trial;
        }
        if cols.len() == n {
            break;
        }
    }
    Ok(DMatrix::from_columns(&cols).determinant().signum())
}

/// `Ĩ±` on `T M̃` at `p`, from a complex structure `I±` on `T M` compatible with
/// `g`, for a circle pair whose connection `θ` is the metric connection.
/// The matrices act on frame components; `side` is `+1` or `-1`.
pub fn transport_bihermitian(
    pair: &DualityPair,
    m: &GeneralizedMetric,
    i_pm: &DMatrix<f64>,
    p: &Point,
    side: i32,
) -> Result<DMatrix<f64>> {
    let cf = pair.m().coframe();
    let tcf = pair.mt().coframe();
    let (f, base) = circle_fiber(cf)?;
    let (ft, base_t) = circle_fiber(tcf)?;
    let (g, b) = m.at(p)?;
    let n = cf.dim();
    let scale = g.abs().max();
    if base.iter().any(|&a| g[(a, f)].abs() > 1e-10 * scale) {
        return Err(Error::Config("θ is not the metric connection: g(∂θ, horizontal) ≠ 0".into()));
    }
    if (i_pm.transpose() * &g * i_pm - &g).abs().max() > 1e-9 * scale {
        return Err(Error::Config("I is not compatible with g".into()));
    }
    let s = match side {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(Error::Config("side must be +1 or -1".into())),
    };
    let g0 = g[(f, f)];
    // Index of each M-frame slot in the M̃ frame: base by name, fiber to fiber.
    let slot = |i: usize| -> Result<usize> {
        if i == f {
            return Ok(ft);
        }
        tcf.index(&cf.gen(i).name)
            .filter(|j| base_t.contains(j))
            .ok_or_else(|| Error::CoframeMismatch(format!("{} missing on M̃", cf.gen(i).name)))
    };
    // T(V) = V + b1(V)∂θ̃ for V ⊥ ∂θ.
    let t_horizontal = |v: &nalgebra::DVector<f64>| -> Result<nalgebra::DVector<f64>> {
        let mut out = nalgebra::DVector::zeros(n);
        let mut b1 = 0.0;
        for &a in &base {
            out[slot(a)?] = v[a];
            b1 += v[a] * b[(a, f)];
        }
        out[ft] = b1;
        Ok(out)
    };
    let dtheta = nalgebra::DVector::<f64>::from_fn(n, |r, _| if r == f { 1.0 } else { 0.0 });
    let i_dtheta = i_pm * &dtheta;
    // V± = g-orthogonal complement of span{∂θ, I∂θ}.
    let span = DMatrix::from_columns(&[dtheta.clone(), i_dtheta.clone()]);
    let constraints = span.transpose() * &g;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    // Pad to square so the SVD returns every right singular vector.
    let mut full = DMatrix::<f64>::zeros(n, n);
    full.view_mut((0, 0), (2, n)).copy_from(&constraints);
    let svd_full = full.svd(false, true);
    let vt_full = svd_full.v_t.expect("V^T");
    for r in 0..n {
        if svd_full.singular_values[r] > 1e-10 * scale {
            continue;
        }
        let v: nalgebra::DVector<f64> = vt_full.row(r).transpose();
        src.push(t_horizontal(&v)?);
        dst.push(t_horizontal(&(i_pm * &v))?);
    }
    if src.len() != n - 2 {
        return Err(Error::Degenerate("∂θ and I∂θ are not independent".into()));
    }
    let dtheta_t = nalgebra::DVector::<f64>::from_fn(n, |r, _| if r == ft { 1.0 } else { 0.0 });
    let t_i_dtheta = t_horizontal(&i_dtheta)?;
    src.push(dtheta_t.clone());
    dst.push(&t_i_dtheta * (s / g0));
    src.push(t_i_dtheta);
    dst.push(&dtheta_t * (-s * g0));
    let s_mat = DMatrix::from_columns(&src);
    let d_mat = DMatrix::from_columns(&dst);
    let inv = s_mat.try_inverse().ok_or_else(|| Error::Degenerate("transported basis is singular".into()))?;
    Ok(d_mat * inv)
}
