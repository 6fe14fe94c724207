//! Concrete charts, spinors and metrics used by the scenarios: Hopf bundles,
//! the two-sphere, Hopf surfaces, the Gibbons–Hawking ansatz, a rank-two pair
//! with mixed correspondence form, and the four-torus type-change table.

use crate::bundle::{BundleChart, ChartConfig, CorrespondenceChart};
use crate::duality::DualityPair;
use crate::error::{Error, Result};
use crate::exterior::{parse_form, Form, Tag};
use crate::scalar::{parse_scalar, CScalar, Scalar};
use crate::structures::{FiberKind, GeneralizedMetric, PureSpinor, StructureKind};

const CHARTS: &[(&str, &str)] = &[
    ("hopf3", include_str!("../scenarios/charts/hopf3.toml")),
    ("hopf3-selfdual", include_str!("../scenarios/charts/hopf3-selfdual.toml")),
    ("hopf4", include_str!("../scenarios/charts/hopf4.toml")),
    ("s2", include_str!("../scenarios/charts/s2.toml")),
    ("hopf-surface", include_str!("../scenarios/charts/hopf-surface.toml")),
    ("gibbons-hawking", include_str!("../scenarios/charts/gibbons-hawking.toml")),
    ("torus4", include_str!("../scenarios/charts/torus4.toml")),
    ("bunke-schick", include_str!("../scenarios/charts/bunke-schick.toml")),
];

pub fn chart_names() -> Vec<&'static str> {
    CHARTS.iter().map(|(n, _)| *n).collect()
}

/// Source text of a built-in chart configuration.
pub fn chart_source(name: &str) -> Result<&'static str> {
    CHARTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Config(format!("no built-in chart {name:?}")))
}

pub fn chart(name: &str) -> Result<BundleChart> {
    ChartConfig::from_toml(chart_source(name)?)?.build()
}

fn form(ch: &BundleChart, src: &str) -> Result<Form> {
    parse_form(ch.coframe(), src)
}

fn scalar(src: &str) -> Result<Scalar> {
    parse_scalar(src)
}

/// The T-dual of a chart built from the splitting of its flux.
pub fn dual_pair(ch: &BundleChart) -> Result<DualityPair> {
    DualityPair::from_chart(ch)
}

/// `e^{B+iω}` with `B = b(t) dt∧θ`, `ω = w(t) dt∧θ` on the two-sphere chart.
pub fn s2_spinor(ch: &BundleChart, b: &Scalar, w: &Scalar) -> Result<PureSpinor> {
    PureSpinor::from_data(
        form(ch, &format!("(form (term {b} dt theta))"))?,
        form(ch, &format!("(form (term {w} dt theta))"))?,
        Form::one(ch.coframe()),
    )
}

/// Round metric `(1-t²)θ² + dt²/(1-t²)` with `b = 0`.
pub fn round_s2_metric(ch: &BundleChart) -> Result<GeneralizedMetric> {
    let g0 = scalar("(- 1 (^ t 2))")?;
    let g2 = g0.recip();
    GeneralizedMetric::new(vec![vec![g2, Scalar::zero()], vec![Scalar::zero(), g0]], Form::zero(ch.coframe()))
}

/// An invariant generalized metric on the Hopf chart for which `θ` is the
/// metric connection: `g = dt²/(1-t²) + (1-t²)ds² + (1+t²/2)θ²`,
/// `b = (t/2) ds∧θ + t dt∧ds`.
pub fn hopf3_metric(ch: &BundleChart) -> Result<GeneralizedMetric> {
    let z = Scalar::zero;
    let g = vec![
        vec![scalar("(/ 1 (- 1 (^ t 2)))")?, z(), z()],
        vec![z(), scalar("(- 1 (^ t 2))")?, z()],
        vec![z(), z(), scalar("(+ 1 (* 1/2 (^ t 2)))")?],
    ];
    GeneralizedMetric::new(g, form(ch, "(form (term (* 1/2 t) ds theta) (term t dt ds))")?)
}

/// Complex structure on `S³×S¹` with `Ω = (du + iθ)∧(dt + i(1-t²)ds)`.
pub fn hopf4_complex(ch: &BundleChart) -> Result<PureSpinor> {
    let omega = form(ch, "(form (term 1 du) (term (complex 0 1) theta))")?
        .wedge(&form(ch, "(form (term 1 dt) (term (complex 0 (- 1 (^ t 2))) ds))")?)?;
    PureSpinor::from_data(Form::zero(ch.coframe()), Form::zero(ch.coframe()), omega)
}

/// Closed invariant symplectic form `dt∧θ + du∧ds` on the `S³×S¹` chart.
pub fn hopf4_symplectic(ch: &BundleChart) -> Result<PureSpinor> {
    PureSpinor::from_data(
        Form::zero(ch.coframe()),
        form(ch, "(form (term 1 dt theta) (term 1 du ds))")?,
        Form::one(ch.coframe()),
    )
}

/// Nondegenerate but non-closed `ω = (1+t²) du∧θ + dt∧ds`.
pub fn hopf4_nonintegrable(ch: &BundleChart) -> Result<PureSpinor> {
    PureSpinor::from_data(
        Form::zero(ch.coframe()),
        form(ch, "(form (term (+ 1 (^ t 2)) du theta) (term 1 dt ds))")?,
        Form::one(ch.coframe()),
    )
}

/// Holomorphic volume form `e₁∧e₂` of the Hopf surface with multipliers
/// `(e^{α₁}, e^{α₂})`, where `e₁ = α₁θ₁ + 2πiθ₂` and
/// `e₂ = du + u(α₂θ₁ + i(dv + 2πθ₂))`.
pub fn hopf_surface_spinor(ch: &BundleChart, alpha1: &Scalar, alpha2: &Scalar) -> Result<PureSpinor> {
    let e1 = form(ch, &format!("(form (term {alpha1} theta1) (term (complex 0 (* 2 pi)) theta2))"))?;
    let e2 = form(
        ch,
        &format!("(form (term 1 du) (term (* {alpha2} u) theta1) (term (complex 0 u) dv) (term (complex 0 (* 2 pi u)) theta2))"),
    )?;
    PureSpinor::from_data(Form::zero(ch.coframe()), Form::zero(ch.coframe()), e1.wedge(&e2)?)
}

/// Non-closed symplectic form `(1+u²) dv∧θ₁ + du∧θ₂` on the Hopf surface chart.
pub fn hopf_surface_nonintegrable(ch: &BundleChart) -> Result<PureSpinor> {
    PureSpinor::from_data(
        Form::zero(ch.coframe()),
        form(ch, "(form (term (+ 1 (^ u 2)) dv theta1) (term 1 du theta2))")?,
        Form::one(ch.coframe()),
    )
}

/// Data of the Gibbons–Hawking example with `V = 1 + 1/(2r)`.
#[derive(Clone, Debug)]
pub struct GibbonsHawking {
    pub chart: BundleChart,
    pub v: Scalar,
    /// `b₁` with `db₁ = *dV` (Euclidean star on the base).
    pub b1: Form,
    /// Closed basic 2-form.
    pub b2: Form,
    /// `g = V(dx² + θ²)`, `b = b₁∧θ + b₂`.
    pub metric: GeneralizedMetric,
}

pub const GH_R: &str = "(sqrt (+ (^ x1 2) (^ x2 2) (^ x3 2)))";

pub fn gibbons_hawking() -> Result<GibbonsHawking> {
    let ch = chart("gibbons-hawking")?;
    let v = scalar(&format!("(+ 1 (/ 1 (* 2 {GH_R})))"))?;
    // Dirac monopole potential of charge 1/2 in the form -(1/2)(1 - x3/r) dφ.
    let coef = format!("(* -1/2 (- 1 (/ x3 {GH_R})) (/ 1 (+ (^ x1 2) (^ x2 2))))");
    let b1 = form(&ch, &format!("(form (term (* {coef} x1) dx2) (term (* -1 {coef} x2) dx1))"))?;
    let b2 = form(&ch, "(form (term x3 dx1 dx2) (term x1 dx3 dx2))")?;
    let theta = Form::gen(ch.coframe(), "theta")?;
    let b = &b1.wedge(&theta)? + &b2;
    let n = ch.coframe().dim();
    let g = (0..n).map(|i| (0..n).map(|j| if i == j { v.clone() } else { Scalar::zero() }).collect()).collect();
    let metric = GeneralizedMetric::new(g, b)?;
    Ok(GibbonsHawking { chart: ch, v, b1, b2, metric })
}

/// Rank-two pair with curvatures `c₁ = dx∧dy`, `c₂ = dy∧dz`, no flux on `M`,
/// dual curvatures `(c₁, -c₂)`, dual flux `c₁∧θ̃₂ + c₂∧θ̃₁`, and
/// `F = -(θ₁∧θ̃₂ + θ₂∧θ̃₁ + θ₁∧θ₂)`.
pub fn bunke_schick() -> Result<DualityPair> {
    let m = chart("bunke-schick")?;
    let tcf = BundleChart::make_coframe(m.domain(), Tag::DualFiber, &["theta1~", "theta2~"])?;
    let curvature = vec![parse_form(&tcf, "(form (term 1 dx dy))")?, parse_form(&tcf, "(form (term -1 dy dz))")?];
    let flux = parse_form(&tcf, "(form (term 1 dx dy theta2~) (term 1 dy dz theta1~))")?;
    let mt = BundleChart::new("bunke-schick~", tcf, m.domain().clone(), curvature, flux)?;
    let placeholder = Form::zero(m.coframe());
    let corr = CorrespondenceChart::new(m, mt, placeholder)?;
    let f = parse_form(corr.coframe(), "(form (term -1 theta1 theta2~) (term -1 theta2 theta1~) (term -1 theta1 theta2))")?;
    DualityPair::new(corr.with_f(f)?, 0)
}

/// A row of the type-change table on the four-torus.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub label: &'static str,
    pub spinor: PureSpinor,
    pub source: (StructureKind, FiberKind),
    pub dual: (StructureKind, FiberKind),
    /// Column entries of the published table, reproduced verbatim; their
    /// meaning is not defined alongside the table.
    pub l: &'static str,
    pub r: &'static str,
}

pub fn table1_rows(ch: &BundleChart) -> Result<Vec<TableRow>> {
    let zero = Form::zero(ch.coframe());
    let one = Form::one(ch.coframe());
    let cx = |src: &str| -> Result<PureSpinor> { PureSpinor::from_data(zero.clone(), zero.clone(), form(ch, src)?) };
    let sp = |src: &str| -> Result<PureSpinor> { PureSpinor::from_data(zero.clone(), form(ch, src)?, one.clone()) };
    let dz = form(ch, "(form (term 1 dx1) (term (complex 0 1) dx2))")?;
    let complex_fibers = PureSpinor::from_data(
        zero.clone(),
        zero.clone(),
        dz.wedge(&form(ch, "(form (term 1 theta1) (term (complex 0 1) theta2))")?)?,
    )?;
    let real_fibers = cx("(form (term 1 dx1) (term (complex 0 1) theta1))")?;
    let real_fibers = PureSpinor::from_data(
        zero.clone(),
        zero.clone(),
        real_fibers.rho.wedge(&form(ch, "(form (term 1 dx2) (term (complex 0 1) theta2))")?)?,
    )?;
    use FiberKind as Fk;
    use StructureKind as Sk;
    Ok(vec![
        TableRow {
            label: "complex / complex fibers",
            spinor: complex_fibers,
            source: (Sk::Complex, Fk::Complex),
            dual: (Sk::Complex, Fk::Complex),
            l: "n/2",
            r: "0",
        },
        TableRow {
            label: "complex / real fibers",
            spinor: real_fibers,
            source: (Sk::Complex, Fk::Real),
            dual: (Sk::Symplectic, Fk::Lagrangian),
            l: "n",
            r: "0",
        },
        TableRow {
            label: "symplectic / symplectic fibers",
            spinor: sp("(form (term 1 dx1 dx2) (term 1 theta1 theta2))")?,
            source: (Sk::Symplectic, Fk::Symplectic),
            dual: (Sk::Symplectic, Fk::Symplectic),
            l: "0",
            r: "n",
        },
        TableRow {
            label: "symplectic / Lagrangian fibers",
            spinor: sp("(form (term 1 dx1 theta1) (term 1 dx2 theta2))")?,
            source: (Sk::Symplectic, Fk::Lagrangian),
            dual: (Sk::Complex, Fk::Real),
            l: "0",
            r: "0",
        },
    ])
}

/// Non-closed symplectic form `(1+x₁²) dx₂∧θ₂ + dx₁∧θ₁` on the four-torus.
pub fn torus4_nonintegrable(ch: &BundleChart) -> Result<PureSpinor> {
    PureSpinor::from_data(
        Form::zero(ch.coframe()),
        form(ch, "(form (term (+ 1 (^ x1 2)) dx2 theta2) (term 1 dx1 theta1))")?,
        Form::one(ch.coframe()),
    )
}

/// `e^{B}∧e^{iω}` on the four-torus with the non-closed `B = x₁ dx₂∧θ₁`.
pub fn torus4_nonclosed_b(ch: &BundleChart) -> Result<PureSpinor> {
    PureSpinor::from_data(
        form(ch, "(form (term x1 dx2 theta1))")?,
        form(ch, "(form (term 1 dx1 dx2) (term 1 theta1 theta2))")?,
        Form::one(ch.coframe()),
    )
}

/// A closed B-field transform of the complex structure on `S³×S¹`.
pub fn hopf4_complex_b(ch: &BundleChart) -> Result<PureSpinor> {
    let base = hopf4_complex(ch)?;
    let hint = base.hint.expect("built from data");
    PureSpinor::from_data(form(ch, "(form (term (sin u) du dt) (term 1/3 dt theta))")?, hint.omega, hint.big_omega)
}

/// Convenience: complex scalar from real and imaginary source text.
pub fn cscalar(re: &str, im: &str) -> Result<CScalar> {
    Ok(CScalar::new(scalar(re)?, scalar(im)?))
}
