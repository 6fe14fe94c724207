use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Report, ScenarioConfig};
use crate::bundle::BundleChart;
use crate::courant::{courant_bracket, pairing, Section};
use crate::duality::{
    buscher, complex_orientation, dual_type, transport_bihermitian, transport_metric, transport_uk, CircleMetric,
    DualityPair,
};
use crate::error::{Error, Result};
use crate::exterior::{mukai_top, parse_form, parse_vector, exp_form, sup_norm, Form};
use crate::linalg::{span_defect, to_complex};
use crate::models;
use crate::random;
use crate::reduction::{
    check_fourier_mukai, check_pairing_constant, check_transversal, duality_lift, duality_via_reduction,
    exact_by_dimension, pairing_matrix, reduce_pointwise, reduction_with_scaled_f, transversality_with,
    LiftedActionPoint,
};
use crate::scalar::{equal_numeric, parse_scalar, rng, CScalar, Point, Scalar};
use crate::structures::{
    c_pm, check_integrable, fiber_geometry, gb_from_cplus, gcs_endomorphism, spinor_type, GeneralizedMetric,
    PureSpinor, StructureKind,
};

const TAU_CONVENTION: &str = "τ(ρ) = ∫ e^F ∧ p*ρ over the fibers of M";
const CIRCLE_F: &str = "F = -θ∧θ̃";

const A_HOPF: &str = "Hopf fibration";
const A_LIE: &str = "compact Lie groups: S³ = SU(2)";
const A_COURANT: &str = "Courant algebroid isomorphism";
const A_INTERTWINE: &str = "twisted cohomology intertwining";
const A_CIRCLE: &str = "circle bundle Courant isomorphism";
const A_BUSCHER: &str = "Buscher rules";
const A_BIHERMITIAN: &str = "bi-Hermitian transport";
const A_INTEGRABLE: &str = "integrability transport";
const A_TYPE: &str = "type change";
const A_TABLE: &str = "type change table on T⁴";
const A_UK: &str = "U^k filtration transport";
const A_S2: &str = "symplectic two-sphere";
const A_HOPF_SURFACE: &str = "Hopf surfaces";
const A_GH: &str = "Gibbons-Hawking";
const A_RANK2: &str = "rank-two pair with mixed F";
const A_REDUCTION: &str = "T-duality as reduction";
const A_FM: &str = "generalized Fourier-Mukai transform";

fn param_usize(cfg: &ScenarioConfig, key: &str, default: usize) -> Result<usize> {
    match cfg.params.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| Error::Config(format!("parameter {key} = {v:?} is not a count"))),
    }
}

fn param_scalar(cfg: &ScenarioConfig, key: &str) -> Result<Scalar> {
    parse_scalar(cfg.param(key)?)
}

fn points(cfg: &ScenarioConfig, ch: &BundleChart, salt: u64) -> Result<Vec<Point>> {
    ch.sample(cfg.seed.wrapping_add(salt), param_usize(cfg, "points", 8)?)
}

fn rng_for(cfg: &ScenarioConfig, salt: u64) -> ChaCha8Rng {
    rng(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

fn sup_c(c: &CScalar, pts: &[Point]) -> Result<f64> {
    pts.iter().try_fold(0.0f64, |m, p| Ok(m.max(c.eval(p)?.norm())))
}

fn sup_section(s: &Section, pts: &[Point]) -> Result<f64> {
    pts.iter().try_fold(0.0f64, |m, p| Ok(m.max(s.eval(p)?.norm())))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.abs().max()
    }
}

/// Largest coefficient difference between two circle-bundle data sets.
fn circle_defect(a: &CircleMetric, b: &CircleMetric, pts: &[Point]) -> Result<f64> {
    let mut pairs = vec![(&a.g0, &b.g0)];
    pairs.extend(a.g1.iter().zip(&b.g1));
    pairs.extend(a.b1.iter().zip(&b.b1));
    for (ra, rb) in a.g2.iter().zip(&b.g2).chain(a.b2.iter().zip(&b.b2)) {
        pairs.extend(ra.iter().zip(rb));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let d = x - y;
        for p in pts {
            worst = worst.max(d.eval(p)?.abs());
        }
    }
    Ok(worst)
}

/// Coefficientwise `equal_numeric` on circle-bundle data.
fn circle_equal(a: &CircleMetric, b: &CircleMetric, ch: &BundleChart, tol: f64, seed: u64) -> Result<bool> {
    let d = ch.domain();
    let mut pairs = vec![(&a.g0, &b.g0)];
    pairs.extend(a.g1.iter().zip(&b.g1));
    pairs.extend(a.b1.iter().zip(&b.b1));
    for (ra, rb) in a.g2.iter().zip(&b.g2).chain(a.b2.iter().zip(&b.b2)) {
        pairs.extend(ra.iter().zip(rb));
    }
    for (k, (x, y)) in pairs.into_iter().enumerate() {
        if !equal_numeric(x, y, d, crate::scalar::DEFAULT_SAMPLES, tol, seed.wrapping_add(k as u64))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Transport theorem checks shared by every pair: validation, intertwining,
/// compatibility with φ, orthogonality, brackets and the τ round trip.
fn pair_suite(rep: &mut Report, cfg: &ScenarioConfig, pair: &DualityPair, label: &str) -> Result<()> {
    let pts = points(cfg, pair.m(), 1)?;
    let v = pair.corr().validate(&pts)?;
    rep.residual(&format!("{label}.pair.df"), A_INTERTWINE, v.df_residual, cfg.tol(1e-9)).note("p*H - p̃*H̃ = dF");
    rep.flag(&format!("{label}.pair.nondegenerate"), A_INTERTWINE, v.nondegenerate);

    let cf = pair.m().coframe();
    let degrees: Vec<usize> = (0..=cf.dim()).collect();
    let mut r = rng_for(cfg, 2);
    let (mut inter, mut compat) = (0.0f64, 0.0f64);
    for _ in 0..cfg.samples {
        let rho = random::form(&mut r, cf, &degrees, 0.4, true);
        let v = random::section(&mut r, cf, true);
        inter = inter.max(pair.intertwining_residual(&rho, &pts)?);
        compat = compat.max(pair.compat_residual(&v, &rho, &pts)?);
    }
    rep.residual(&format!("{label}.tau.intertwining"), A_INTERTWINE, inter, cfg.tol(1e-8))
        .note(TAU_CONVENTION)
        .note("d_H ρ = dρ + H∧ρ");
    rep.residual(&format!("{label}.tau.compat"), A_COURANT, compat, cfg.tol(1e-8)).note("τ(v·ρ) = φ(v)·τ(ρ)");

    let n_pairs = param_usize(cfg, "section_pairs", 2 * cfg.samples)?;
    let (mut orth, mut bracket) = (0.0f64, 0.0f64);
    for _ in 0..n_pairs {
        let v = random::section(&mut r, cf, false);
        let w = random::section(&mut r, cf, false);
        let (pv, pw) = (pair.phi(&v)?, pair.phi(&w)?);
        orth = orth.max(sup_c(&(&pairing(&pv, &pw)? - &pairing(&v, &w)?), &pts)?);
        let lhs = pair.phi(&courant_bracket(&v, &w, pair.m())?)?;
        let rhs = courant_bracket(&pv, &pw, pair.mt())?;
        bracket = bracket.max(sup_section(&lhs.sub(&rhs)?, &pts)?);
    }
    rep.residual(&format!("{label}.phi.orthogonal"), A_COURANT, orth, cfg.tol(1e-9))
        .note("⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X))");
    rep.residual(&format!("{label}.phi.bracket"), A_COURANT, bracket, cfg.tol(1e-8))
        .note("flux term of the bracket is -i_Y i_X H");

    let s = pair.roundtrip_sign()?;
    let mut back: f64 = 0.0;
    for _ in 0..4 {
        let rho = random::form(&mut r, cf, &degrees, 0.5, true);
        let there = pair.tau_reverse(&pair.tau(&rho)?)?.transfer(cf)?;
        back = back.max(sup_norm(&(&there - &rho.scale(&CScalar::from(s as i64))), &pts)?);
    }
    rep.residual(&format!("{label}.tau.roundtrip"), A_INTERTWINE, back, cfg.tol(1e-9))
        .note(&format!("τ⁻ ∘ τ = {s:+}·id with τ⁻ built from -F"));
    Ok(())
}

/// `X + f∂θ + ξ + gθ ↦ X + g∂θ̃ + ξ + fθ̃` with symbolic coefficients, compared
/// as expression trees.
fn circle_formula(rep: &mut Report, pair: &DualityPair, label: &str) -> Result<()> {
    let cf = pair.m().coframe();
    let tcf = pair.mt().coframe();
    let v = Section::new(
        parse_vector(cf, "(vector (comp x1 dt) (comp x2 ds) (comp f theta))")?,
        parse_form(cf, "(form (term a1 dt) (term a2 ds) (term g theta))")?,
    )?;
    let want = Section::new(
        parse_vector(tcf, "(vector (comp x1 dt) (comp x2 ds) (comp g theta~))")?,
        parse_form(tcf, "(form (term a1 dt) (term a2 ds) (term f theta~))")?,
    )?;
    let got = pair.phi(&v)?;
    rep.flag(&format!("{label}.phi.circle_formula"), A_CIRCLE, got == want)
        .note(CIRCLE_F)
        .note("structural equality of expression trees");
    Ok(())
}

fn dual_flux_checks(rep: &mut Report, pair: &DualityPair, label: &str, curvature: &str, anchor: &str) -> Result<()> {
    let tcf = pair.mt().coframe();
    let c = parse_form(tcf, curvature)?;
    rep.flag(&format!("{label}.dual.curvature"), anchor, *pair.mt().curvature(0) == c)
        .note(&format!("expected c̃ = {c}"));
    let h = parse_form(tcf, "(form (term 1 dt ds theta~))")?;
    rep.flag(&format!("{label}.dual.flux"), anchor, *pair.mt().flux() == h).note("expected H̃ = σ∧θ̃, σ = dt∧ds");
    Ok(())
}

/// `|d_H̃ τ(ρ) - v·τ(ρ)|` minimized over `v`, for each spinor, plus the source residual.
fn integrability(
    rep: &mut Report,
    pair: &DualityPair,
    pts: &[Point],
    cases: &[(&str, &PureSpinor)],
    tol: f64,
    integrable: bool,
) -> Result<()> {
    for (name, rho) in cases {
        let src = check_integrable(&rho.rho, pair.m(), pts)?;
        let dst = check_integrable(&pair.tau(&rho.rho)?, pair.mt(), pts)?;
        if integrable {
            rep.residual(&format!("{name}.source_integrable"), A_INTEGRABLE, src.residual, tol);
            rep.residual(&format!("{name}.dual_integrable"), A_INTEGRABLE, dst.residual, tol)
                .note("least-squares residual of d_H̃ ρ̃ = v·ρ̃");
        } else {
            rep.exceeds(&format!("{name}.source_nonintegrable"), A_INTEGRABLE, src.residual, 1e-4);
            rep.exceeds(&format!("{name}.dual_nonintegrable"), A_INTEGRABLE, dst.residual, 1e-4)
                .note("passes when the residual stays above the threshold");
        }
    }
    Ok(())
}

fn uk_check(rep: &mut Report, pair: &DualityPair, pts: &[Point], name: &str, rho: &Form, tol: f64) -> Result<()> {
    let mut worst: f64 = 0.0;
    for p in pts {
        worst = worst.max(transport_uk(rho, pair, p)?);
    }
    rep.residual(name, A_UK, worst, tol).note("largest defect of τ(U^k) ⊂ Ũ^k over all k; 1 on a rank mismatch");
    Ok(())
}

/// `e^{B+iω} ∧ Ω` with random `B`, `ω` and `Ω` a product of random 1-forms.
pub(crate) fn random_spinor(r: &mut ChaCha8Rng, ch: &BundleChart, p: &Point) -> Result<PureSpinor> {
    let cf = ch.coframe();
    loop {
        let b = random::form(r, cf, &[2], 0.5, false);
        let w = random::form(r, cf, &[2], 0.5, false);
        let k = r.gen_range(0..=cf.dim() / 2);
        let mut omega = Form::one(cf);
        for _ in 0..k {
            omega = omega.wedge(&random::form(r, cf, &[1], 0.8, true))?;
        }
        if omega.eval(p)?.norm() > 1e-6 {
            return PureSpinor::from_data(b, w, omega);
        }
    }
}

fn random_types(rep: &mut Report, cfg: &ScenarioConfig, pair: &DualityPair, label: &str) -> Result<()> {
    let pts = points(cfg, pair.m(), 3)?;
    let mut r = rng_for(cfg, 4);
    let mut mismatches = 0usize;
    for _ in 0..cfg.samples {
        let rho = random_spinor(&mut r, pair.m(), &pts[0])?;
        let img = pair.tau(&rho.rho)?;
        for p in &pts {
            let dt = dual_type(&rho, pair, p)?;
            if spinor_type(&img.eval(p)?)? != dt.dual_type {
                mismatches += 1;
            }
        }
    }
    rep.flag(&format!("{label}.types.random"), A_TYPE, mismatches == 0)
        .note("dual type = type(Ω) + 2j - k against the lowest degree of τ(ρ)")
        .note(&format!("{mismatches} mismatches over {} spinors", cfg.samples));
    Ok(())
}

/// A `g`-orthogonal complex structure `g^{-1/2} R J₀ Rᵀ g^{1/2}`.
fn compatible_complex_structure(g: &DMatrix<f64>, angle: f64) -> DMatrix<f64> {
    let n = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let inv_sqrt = sqrt.clone().try_inverse().expect("metric is positive");
    let mut j0 = DMatrix::zeros(n, n);
    for k in (0..n).step_by(2) {
        j0[(k + 1, k)] = 1.0;
        j0[(k, k + 1)] = -1.0;
    }
    let mut rot = DMatrix::identity(n, n);
    let (c, s) = (angle.cos(), angle.sin());
    rot[(1, 1)] = c;
    rot[(1, 2)] = -s;
    rot[(2, 1)] = s;
    rot[(2, 2)] = c;
    &inv_sqrt * &rot * j0 * rot.transpose() * sqrt
}

fn hopf4_metric(ch: &BundleChart) -> Result<GeneralizedMetric> {
    let z = Scalar::zero;
    let g = vec![
        vec![parse_scalar("(/ 1 (- 1 (^ t 2)))")?, z(), z(), z()],
        vec![z(), parse_scalar("(- 1 (^ t 2))")?, z(), z()],
        vec![z(), z(), parse_scalar("(+ 2 (sin u))")?, z()],
        vec![z(), z(), z(), parse_scalar("(+ 1 (* 1/2 (^ t 2)))")?],
    ];
    let b = parse_form(ch.coframe(), "(form (term (* 1/2 t) ds theta) (term (cos u) du theta) (term t dt ds))")?;
    GeneralizedMetric::new(g, b)
}

fn metric_checks(rep: &mut Report, cfg: &ScenarioConfig, pair: &DualityPair, m: &GeneralizedMetric) -> Result<()> {
    let ch = pair.m();
    let pts = points(cfg, ch, 5)?;
    let dual = transport_metric(pair, m)?;
    let got = CircleMetric::from_metric(&dual)?;
    let src = CircleMetric::from_metric(m)?;
    let want = buscher(&src)?;
    rep.residual("metric.buscher", A_BUSCHER, circle_defect(&got, &want, &pts)?, cfg.tol(1e-9))
        .note("g̃0 = 1/g0, g̃1 = -b1/g0, b̃1 = -g1/g0");
    rep.flag("metric.g0_inverse", A_BUSCHER, got.g0 == src.g0.recip()).note("structural equality g̃0 = 1/g0");
    // Independent route: push C₊ through the matrix of φ and read off (g̃, b̃).
    let mut worst: f64 = 0.0;
    for p in &pts {
        let (g, b) = m.at(p)?;
        let phi = pair.phi_matrix(p)?.map(|z| z.re);
        let (gt, bt) = gb_from_cplus(&(&phi * c_pm(&g, &b, 1.0)))?;
        let (gd, bd) = dual.at(p)?;
        worst = worst.max(max_abs(&(&gt - &gd))).max(max_abs(&(&bt - &bd)));
        let minus = to_complex(&(&phi * c_pm(&g, &b, -1.0)));
        worst = worst.max(span_defect(&to_complex(&c_pm(&gd, &bd, -1.0)), &minus));
    }
    rep.residual("metric.graph_oracle", A_BUSCHER, worst, cfg.tol(1e-9)).note("C± = graph of b ± g");
    Ok(())
}

fn bihermitian_checks(rep: &mut Report, cfg: &ScenarioConfig, pair: &DualityPair, m: &GeneralizedMetric) -> Result<()> {
    let ch = pair.m();
    let n = ch.coframe().dim();
    let (gt_metric, mut worst, mut orient_ok) = (transport_metric(pair, m)?, 0.0f64, true);
    for (k, p) in points(cfg, ch, 6)?.iter().enumerate() {
        let (g, b) = m.at(p)?;
        let i_m = compatible_complex_structure(&g, 0.3 + k as f64);
        let phi = pair.phi_matrix(p)?.map(|z| z.re);
        let (gt, _) = gt_metric.at(p)?;
        let src = complex_orientation(&i_m)?;
        for side in [1, -1] {
            let image = &phi * c_pm(&g, &b, side as f64);
            let proj = image.view((0, 0), (n, n)).into_owned();
            let inv = proj.clone().try_inverse().ok_or_else(|| Error::Singular("projection of φ(C±)".into()))?;
            let oracle = &proj * &i_m * inv;
            let got = transport_bihermitian(pair, m, &i_m, p, side)?;
            worst = worst
                .max(max_abs(&(&got - &oracle)))
                .max(max_abs(&(&got * &got + DMatrix::identity(n, n))))
                .max(max_abs(&(got.transpose() * &gt * &got - &gt)));
            orient_ok &= complex_orientation(&got)? == side as f64 * src;
        }
    }
    rep.residual("bihermitian.transport", A_BIHERMITIAN, worst, cfg.tol(1e-9))
        .note("Ĩ± compared with π φ(C±) I± (π φ(C±))⁻¹")
        .note("Ĩ±(∂θ̃) carries the factor ±g0");
    rep.flag("bihermitian.orientation", A_BIHERMITIAN, orient_ok).note("Ĩ₊ keeps the orientation of I₊, Ĩ₋ reverses it");
    Ok(())
}

pub fn s3_hopf(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let ch = models::chart("hopf3")?;
    let pair = models::dual_pair(&ch)?;
    dual_flux_checks(&mut rep, &pair, "hopf3", "(form)", A_HOPF)?;
    pair_suite(&mut rep, cfg, &pair, "hopf3")?;
    circle_formula(&mut rep, &pair, "hopf3")?;
    metric_checks(&mut rep, cfg, &pair, &models::hopf3_metric(&ch)?)?;

    let ch4 = models::chart("hopf4")?;
    let pair4 = models::dual_pair(&ch4)?;
    pair_suite(&mut rep, cfg, &pair4, "hopf4")?;
    bihermitian_checks(&mut rep, cfg, &pair4, &hopf4_metric(&ch4)?)?;
    let pts = points(cfg, &ch4, 7)?;
    let (cx, sp, cxb) = (models::hopf4_complex(&ch4)?, models::hopf4_symplectic(&ch4)?, models::hopf4_complex_b(&ch4)?);
    integrability(
        &mut rep,
        &pair4,
        &pts,
        &[("hopf4.complex", &cx), ("hopf4.symplectic", &sp), ("hopf4.complex_b", &cxb)],
        cfg.tol(1e-8),
        true,
    )?;
    integrability(&mut rep, &pair4, &pts, &[("hopf4.nonclosed", &models::hopf4_nonintegrable(&ch4)?)], 0.0, false)?;
    for (name, rho) in [("hopf4.complex", &cx), ("hopf4.symplectic", &sp), ("hopf4.complex_b", &cxb)] {
        uk_check(&mut rep, &pair4, &pts, &format!("{name}.uk"), &rho.rho, cfg.tol(1e-8))?;
    }
    random_types(&mut rep, cfg, &pair4, "hopf4")?;
    Ok(rep)
}

pub fn s3_selfdual(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let ch = models::chart("hopf3-selfdual")?;
    let pair = models::dual_pair(&ch)?;
    dual_flux_checks(&mut rep, &pair, "selfdual", "(form (term 1 dt ds))", A_LIE)?;
    let renamed = |f: &Form| parse_form(pair.mt().coframe(), &f.to_string().replace("theta", "theta~"));
    let same = *pair.mt().flux() == renamed(ch.flux())? && *pair.mt().curvature(0) == renamed(ch.curvature(0))?;
    rep.flag("selfdual.same_data", A_LIE, same).note("(c̃, H̃) equals (c, H) after renaming θ to θ̃");
    pair_suite(&mut rep, cfg, &pair, "selfdual")?;
    circle_formula(&mut rep, &pair, "selfdual")?;
    Ok(rep)
}

/// `log|z|` along `t ∈ [a, b]` for the holomorphic coordinate of a dual spinor
/// `c_θ̃ θ̃ + c_t dt`, namely `∫ Re(i c_t / c_θ̃) dt`.
pub fn annulus_log_radius(rho_t: &Form, a: f64, b: f64) -> Result<f64> {
    let ct = rho_t.coeff_of(&["dt"])?;
    let cth = rho_t.coeff_of(&["theta~"])?;
    let integrand = |t: f64| -> f64 {
        let p = Point::from_pairs([("t", t)]);
        match (ct.eval(&p), cth.eval(&p)) {
            (Ok(x), Ok(y)) => (num_complex::Complex64::i() * x / y).re,
            _ => f64::NAN,
        }
    };
    let out = quadrature::integrate(integrand, a, b, 1e-12);
    if !out.integral.is_finite() {
        return Err(Error::Sampling("radius integrand is not finite on the interval".into()));
    }
    Ok(out.integral)
}

pub fn s2_annulus(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let ch = models::chart("s2")?;
    let pair = models::dual_pair(&ch)?;
    let tcf = pair.mt().coframe();
    let (b, w) = (param_scalar(cfg, "b")?, param_scalar(cfg, "w")?);
    let rho = models::s2_spinor(&ch, &b, &w)?;
    let img = pair.tau(&rho.rho)?;
    let want = parse_form(tcf, &format!("(form (term 1 theta~) (term (complex {b} {w}) dt))"))?;
    rep.flag("s2.dual_spinor", A_S2, img == want)
        .note("ρ = e^{B+iω}, B = b dt∧θ, ω = w dt∧θ")
        .note("expected τ(ρ) = θ̃ + (b + iw) dt, structural equality");

    let pts = points(cfg, &ch, 1)?;
    let mut types_ok = true;
    for p in &pts {
        types_ok &= spinor_type(&img.eval(p)?)? == 1 && dual_type(&rho, &pair, p)?.dual_type == 1;
    }
    rep.flag("s2.dual_type", A_S2, types_ok).note("type 1 on a 2-dimensional M̃: a complex structure");
    integrability(&mut rep, &pair, &pts, &[("s2.symplectic", &rho)], cfg.tol(1e-8), true)?;
    uk_check(&mut rep, &pair, &pts, "s2.uk", &rho.rho, cfg.tol(1e-8))?;

    // Radius of the annulus from the dual complex structure, against the symplectic area.
    let log_r = annulus_log_radius(&img, -1.0, 1.0)?;
    let w_of = |t: f64| w.eval(&Point::from_pairs([("t", t)])).unwrap_or(f64::NAN);
    let area = 2.0 * std::f64::consts::PI * quadrature::integrate(w_of, -1.0, 1.0, 1e-12).integral;
    let radius = log_r.exp();
    let expected = (-area / (2.0 * std::f64::consts::PI)).exp();
    rep.residual("s2.annulus_radius", A_S2, (radius - expected).abs(), cfg.tol(1e-6))
        .note("inner radius 1 at t = -1; outer radius |z| at t = 1")
        .note("the fiber has length 2π, so the exponent is the area of ω divided by 2π");
    if let Some(closed) = cfg.params.get("log_radius") {
        let closed = parse_scalar(closed)?.eval(&Point::new())?;
        rep.residual("s2.annulus_closed_form", A_S2, (log_r - closed).abs(), cfg.tol(1e-6))
            .note(&format!("closed form log r = {closed}"));
    }

    let dual = transport_metric(&pair, &models::round_s2_metric(&ch)?)?;
    let inv = parse_scalar("(- 1 (^ t 2))")?.recip();
    let (it, ith) = (tcf.require("dt")?, tcf.require("theta~")?);
    let metric_ok = dual.g[it][it] == inv && dual.g[ith][ith] == inv && dual.g[it][ith].is_zero() && dual.b.is_zero();
    rep.flag("s2.dual_metric", A_S2, metric_ok).note("expected ds̃² = (dθ̃² + dt²)/(1 - t²), b̃ = 0, structurally");
    pair_suite(&mut rep, cfg, &pair, "s2")?;
    Ok(rep)
}

pub fn hopf_surface(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let ch = models::chart("hopf-surface")?;
    let pair = models::dual_pair(&ch)?;
    let (a1, a2) = (param_scalar(cfg, "alpha1")?, param_scalar(cfg, "alpha2")?);
    let generic = models::hopf_surface_spinor(&ch, &a1, &a2)?;
    let diagonal = models::hopf_surface_spinor(&ch, &a1, &a1)?;
    let pts = points(cfg, &ch, 1)?;

    integrability(
        &mut rep,
        &pair,
        &pts,
        &[("hopf_surface.generic", &generic), ("hopf_surface.diagonal", &diagonal)],
        cfg.tol(1e-8),
        true,
    )?;
    integrability(&mut rep, &pair, &pts, &[("hopf_surface.nonclosed", &models::hopf_surface_nonintegrable(&ch)?)], 0.0, false)?;

    let (mut generic_ok, mut consistent) = (true, true);
    let img = pair.tau(&generic.rho)?;
    for p in &pts {
        let dt = dual_type(&generic, &pair, p)?;
        generic_ok &= dt.source_type == 2 && dt.j == 0 && dt.dual_type == 0;
        consistent &= spinor_type(&img.eval(p)?)? == dt.dual_type;
    }
    rep.flag("hopf_surface.generic_symplectic", A_HOPF_SURFACE, generic_ok)
        .note("α₁ ≠ α₂: j = 0 and dual type 0 at every sampled fiber");
    rep.flag("hopf_surface.type_consistent", A_TYPE, consistent);

    // u = 0 lies outside the chart; the family is continued there by evaluation.
    let mut axis_ok = true;
    for p in &pts {
        let mut q = p.clone();
        q.set("u", 0.0);
        let dt = dual_type(&generic, &pair, &q)?;
        axis_ok &= dt.j == 1 && dt.dual_type == 2 && spinor_type(&img.eval(&q)?)? == 2;
    }
    rep.flag("hopf_surface.jump_at_axis", A_HOPF_SURFACE, axis_ok)
        .note("continued to u = 0, j becomes 1 and the dual type jumps to 2");
    let img_d = pair.tau(&diagonal.rho)?;
    let mut diag_ok = true;
    for p in &pts {
        let dt = dual_type(&diagonal, &pair, p)?;
        diag_ok &= dt.j == 1 && dt.dual_type == 2 && spinor_type(&img_d.eval(p)?)? == 2;
    }
    rep.flag("hopf_surface.jump_at_equal_multipliers", A_HOPF_SURFACE, diag_ok)
        .note("α₁ = α₂ gives j = 1 and dual type 2 on every fiber");
    random_types(&mut rep, cfg, &pair, "hopf_surface")?;
    pair_suite(&mut rep, cfg, &pair, "hopf_surface")?;

    table_checks(&mut rep, cfg)?;

    let bs = models::bunke_schick()?;
    pair_suite(&mut rep, cfg, &bs, "bunke_schick")?;
    if let Some(c) = rep.checks.iter_mut().find(|c| c.name == "bunke_schick.tau.intertwining") {
        c.anchor = A_RANK2.to_string();
        c.note("F = -(θ₁∧θ̃₂ + θ₂∧θ̃₁ + θ₁∧θ₂), dual curvatures (c₁, -c₂)");
    }
    Ok(rep)
}

fn table_checks(rep: &mut Report, cfg: &ScenarioConfig) -> Result<()> {
    let ch = models::chart("torus4")?;
    let pair = models::dual_pair(&ch)?;
    let pts = points(cfg, &ch, 8)?;
    let n = ch.coframe().dim();
    let fibers = ch.fiber_indices();
    let fibers_t = pair.mt().fiber_indices();
    let rows = models::table1_rows(&ch)?;
    for (k, row) in rows.iter().enumerate() {
        let img = pair.tau(&row.spinor.rho)?;
        let mut ok = true;
        for p in &pts {
            let dt = dual_type(&row.spinor, &pair, p)?;
            let src_rho = row.spinor.at(p)?;
            let dst_rho = img.eval(p)?;
            let src_kind = StructureKind::of_type(spinor_type(&src_rho)?, n);
            let dst_kind = StructureKind::of_type(spinor_type(&dst_rho)?, n);
            ok &= spinor_type(&dst_rho)? == dt.dual_type;
            ok &= (src_kind, fiber_geometry(&gcs_endomorphism(n, &src_rho)?, &fibers, src_kind)?) == row.source;
            ok &= (dst_kind, fiber_geometry(&gcs_endomorphism(n, &dst_rho)?, &fibers_t, dst_kind)?) == row.dual;
        }
        rep.flag(&format!("table.row{}", k + 1), A_TABLE, ok)
            .note(row.label)
            .note(&format!("l = {}, r = {} reproduced verbatim; their meaning is not defined", row.l, row.r));
    }
    let integrable: Vec<(String, &PureSpinor)> =
        rows.iter().enumerate().map(|(k, r)| (format!("torus4.row{}", k + 1), &r.spinor)).collect();
    let cases: Vec<(&str, &PureSpinor)> = integrable.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    integrability(rep, &pair, &pts, &cases, cfg.tol(1e-8), true)?;
    let (bad1, bad2) = (models::torus4_nonintegrable(&ch)?, models::torus4_nonclosed_b(&ch)?);
    integrability(rep, &pair, &pts, &[("torus4.nonclosed_omega", &bad1), ("torus4.nonclosed_b", &bad2)], 0.0, false)?;
    random_types(rep, cfg, &pair, "torus4")?;
    Ok(())
}

fn star_dv(gh: &models::GibbonsHawking) -> Result<Form> {
    let cf = gh.chart.coframe();
    let dv = |x: &str| CScalar::real(gh.v.diff(x));
    [("x1", ["dx2", "dx3"]), ("x2", ["dx3", "dx1"]), ("x3", ["dx1", "dx2"])]
        .iter()
        .try_fold(Form::zero(cf), |acc, (x, legs)| Ok(&acc + &Form::wedge_of(cf, legs, dv(x))?))
}

pub fn gibbons_hawking(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let gh = models::gibbons_hawking()?;
    let ch = &gh.chart;
    let pts = points(cfg, ch, 1)?;
    let lap = Scalar::sum(["x1", "x2", "x3"].map(|x| gh.v.diff(x).diff(x)));
    let harm = pts.iter().try_fold(0.0f64, |m, p| Ok::<_, Error>(m.max(lap.eval(p)?.abs())))?;
    rep.residual("gh.harmonic", A_GH, harm, cfg.tol(1e-8)).note("V = 1 + 1/(2r)");
    let mono = sup_norm(&(&ch.d(&gh.b1)? - &star_dv(&gh)?), &pts)?;
    rep.residual("gh.monopole", A_GH, mono, cfg.tol(1e-8))
        .note("db₁ = *dV with *dx1 = dx2∧dx3 and cyclic");
    rep.residual("gh.b2_closed", A_GH, sup_norm(&ch.d(&gh.b2)?, &pts)?, cfg.tol(1e-9));

    let pair = models::dual_pair(ch)?;
    let dual = transport_metric(&pair, &gh.metric)?;
    let tcf = pair.mt().coframe();
    let cf = ch.coframe();
    let xs = ["dx1", "dx2", "dx3"];
    let ft = tcf.require("theta~")?;
    let (mut gdef, mut bdef) = (0.0f64, 0.0f64);
    for p in &pts {
        let v = gh.v.eval(p)?;
        let b1: Vec<f64> = xs.iter().map(|x| Ok(gh.b1.coeff_of(&[x])?.eval(p)?.re)).collect::<Result<_>>()?;
        let (g, b) = dual.at(p)?;
        let (_, b_src) = gh.metric.at(p)?;
        gdef = gdef.max((g[(ft, ft)] - 1.0 / v).abs());
        for a in 0..3 {
            let ia = tcf.require(xs[a])?;
            gdef = gdef.max((g[(ia, ft)] + b1[a] / v).abs());
            bdef = bdef.max(b[(ia, ft)].abs());
            for c in 0..3 {
                let ic = tcf.require(xs[c])?;
                let flat = if a == c { v } else { 0.0 };
                gdef = gdef.max((g[(ia, ic)] - flat - b1[a] * b1[c] / v).abs());
                bdef = bdef.max((b[(ia, ic)] - b_src[(cf.require(xs[a])?, cf.require(xs[c])?)]).abs());
            }
        }
    }
    rep.residual("gh.dual_metric", A_GH, gdef, cfg.tol(1e-9)).note("expected g̃ = V dx² + V⁻¹(θ̃ - b₁)²");
    rep.residual("gh.dual_b", A_GH, bdef, cfg.tol(1e-9)).note("expected b̃ = b₂, a closed B-field");

    // Hyperkähler triple ω_i = (θ̃ - b₁)∧dx_i + V dx_j∧dx_k on M̃.
    let eta = &Form::gen(tcf, "theta~")? - &gh.b1.transfer(tcf)?;
    let vc = CScalar::real(gh.v.clone());
    let omegas: Vec<Form> = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .iter()
        .map(|&(i, j, k)| Ok(&eta.wedge(&Form::gen(tcf, xs[i])?)? + &Form::wedge_of(tcf, &[xs[j], xs[k]], vc.clone())?))
        .collect::<Result<_>>()?;
    let mut closed: f64 = 0.0;
    for w in &omegas {
        closed = closed.max(sup_norm(&pair.mt().d(w)?, &pts)?);
    }
    rep.residual("gh.hyperkahler_closed", A_GH, closed, cfg.tol(1e-8));
    let vol = omegas[0].wedge(&omegas[0])?;
    let mut triple: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { vol.clone() } else { Form::zero(tcf) };
            triple = triple.max(sup_norm(&(&omegas[i].wedge(&omegas[j])? - &want), &pts)?);
        }
    }
    // ω₁²/2 is the Riemannian volume form of g̃, whose density is sqrt(det g̃) = V.
    for p in &pts {
        let (g, _) = dual.at(p)?;
        let top = vol.eval(p)?.iter().fold(0.0f64, |m, z| m.max(z.norm())) / 2.0;
        triple = triple.max((top - g.determinant().sqrt()).abs());
    }
    rep.residual("gh.hyperkahler_triple", A_GH, triple, cfg.tol(1e-8))
        .note("ω_i∧ω_j = 2δ_ij vol_g̃");

    let bt = gh.b2.transfer(tcf)?;
    let rho1 = exp_form(&(&bt + &omegas[0].scale(&CScalar::i())), 4)?;
    let rho2 = exp_form(&bt, 4)?.wedge(&(&omegas[1] + &omegas[2].scale(&CScalar::i())))?;
    let lhs = mukai_top(&rho1, &rho1.conj())?;
    let rhs = mukai_top(&rho2, &rho2.conj())?;
    rep.residual("gh.calabi_yau_norms", A_GH, sup_c(&(&lhs - &rhs), &pts)?, cfg.tol(1e-8))
        .note("(ρ₁, ρ̄₁) = (ρ₂, ρ̄₂) for ρ₁ = e^{b̃+iω₁}, ρ₂ = e^{b̃}(ω₂ + iω₃)");
    let dclosed = sup_norm(&pair.mt().d_h(&rho1)?, &pts)?.max(sup_norm(&pair.mt().d_h(&rho2)?, &pts)?);
    rep.residual("gh.calabi_yau_closed", A_GH, dclosed, cfg.tol(1e-8));
    pair_suite(&mut rep, cfg, &pair, "gh")?;
    Ok(rep)
}

/// Random invariant metric data on a circle bundle with `g0 = 2 + s²`.
pub fn random_circle_metric(r: &mut ChaCha8Rng, ch: &BundleChart) -> Result<GeneralizedMetric> {
    let vars = ch.coframe().base_vars();
    let k = vars.len();
    let mut s = || random::scalar(r, &vars);
    let g1: Vec<Scalar> = (0..k).map(|_| s()).collect();
    let b1: Vec<Scalar> = (0..k).map(|_| s()).collect();
    let mut g2 = vec![vec![Scalar::zero(); k]; k];
    let mut b2 = vec![vec![Scalar::zero(); k]; k];
    for a in 0..k {
        for c in a..k {
            g2[a][c] = s();
            g2[c][a] = g2[a][c].clone();
            if c > a {
                b2[a][c] = s();
                b2[c][a] = -&b2[a][c];
            }
        }
    }
    let root = s();
    let g0 = &Scalar::int(2) + &(&root * &root);
    CircleMetric { g0, g1, g2, b1, b2 }.to_metric(ch.coframe())
}

pub fn buscher_random(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let ch = models::chart(cfg.chart.as_deref().unwrap_or("hopf3"))?;
    let pair = models::dual_pair(&ch)?;
    let mut r = rng_for(cfg, 1);
    let tol = cfg.tol(1e-9);
    let (mut agree, mut structural, mut involution) = (0usize, 0usize, 0usize);
    for case in 0..cfg.samples {
        let m = random_circle_metric(&mut r, &ch)?;
        let src = CircleMetric::from_metric(&m)?;
        let got = CircleMetric::from_metric(&transport_metric(&pair, &m)?)?;
        let want = buscher(&src)?;
        agree += circle_equal(&got, &want, &ch, tol, cfg.seed.wrapping_add(case as u64))? as usize;
        structural += (got.g0 == src.g0.recip()) as usize;
        involution += circle_equal(&buscher(&want)?, &src, &ch, tol, cfg.seed.wrapping_add(case as u64))? as usize;
    }
    let n = cfg.samples;
    rep.flag("buscher.transport_agrees", A_BUSCHER, agree == n)
        .note(&format!("{agree}/{n} instances agree coefficientwise under equal_numeric at {tol:e}"));
    rep.flag("buscher.g0_inverse", A_BUSCHER, structural == n)
        .note(&format!("{structural}/{n} instances give g̃0 = 1/g0 as an expression"));
    rep.flag("buscher.involution", A_BUSCHER, involution == n)
        .note(&format!("{involution}/{n} instances return to themselves"));
    Ok(rep)
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-1.0..1.0))
}

const REDUCTION_CHARTS: &[&str] = &["hopf3", "hopf3-selfdual", "hopf4", "s2", "torus4", "hopf-surface", "gibbons-hawking"];

pub fn reduction_suite(cfg: &ScenarioConfig) -> Result<Report> {
    let mut rep = Report::new(&cfg.name, cfg.seed, cfg.samples, cfg.tol);
    let tol = cfg.tol(1e-9);
    let mut pairs: Vec<(String, DualityPair)> = REDUCTION_CHARTS
        .iter()
        .map(|&n| Ok((n.to_string(), models::dual_pair(&models::chart(n)?)?)))
        .collect::<Result<_>>()?;
    pairs.push(("bunke-schick".into(), models::bunke_schick()?));
    for (name, pair) in &pairs {
        let pts = pair.m().sample(cfg.seed, cfg.samples)?;
        let (mut iso, mut phi_def, mut sig_ok, mut transversal) = (0.0f64, 0.0f64, true, true);
        for p in &pts {
            let (rep_p, phi) = duality_via_reduction(pair, p)?;
            iso = iso.max(rep_p.defect_m).max(rep_p.defect_mt).max(rep_p.k_isotropy).max(rep_p.kt_isotropy);
            phi_def = phi_def.max(phi);
            let k = rep_p.signature.0;
            sig_ok &= rep_p.signature == (k, k, 0) && rep_p.k_perp_dim == 2 * rep_p.m_dim;
            let t = check_transversal(pair, p)?;
            transversal &= t.transversal && t.fiber_block_nondegenerate;
        }
        rep.residual(&format!("reduction.{name}.isometry"), A_REDUCTION, iso, tol)
            .note("Ψ(t) = ∂θ + i_∂θ F, Ψ(t̃) = ∂θ̃; defects of 𝒦^⊥/𝒦 → T⊕T* of M and of M̃");
        rep.residual(&format!("reduction.{name}.phi"), A_REDUCTION, phi_def, tol)
            .note("the composite of the two reductions reproduces φ");
        rep.flag(&format!("reduction.{name}.signature"), A_REDUCTION, sig_ok);
        rep.flag(&format!("reduction.{name}.transversal"), A_FM, transversal);
        let (k, kt) = duality_lift(pair)?;
        let all: Vec<Section> = k.into_iter().chain(kt).collect();
        rep.flag(&format!("reduction.{name}.pairing_constant"), A_REDUCTION, check_pairing_constant(&all, &pts, 1e-12)?);
    }
    let bs = &pairs.last().expect("bunke-schick is pushed").1;
    let p0 = &bs.m().sample(cfg.seed, 1)?[0];
    rep.flag("reduction.bunke-schick.scaled_f", A_REDUCTION, reduction_with_scaled_f(bs, p0, 2.5)?.passes(tol))
        .note("non-unimodular F still realizes a reduction");

    // Exactness of the reduced space against isotropy of the action.
    let mut r = rng_for(cfg, 1);
    let mut agree = 0usize;
    let mut seen = [0usize; 2];
    for case in 0..cfg.samples {
        let n = 4;
        let m = 1 + case % 3;
        let x = random_matrix(&mut r, n, m);
        let xi = if r.gen_bool(0.5) {
            let s = random_matrix(&mut r, n, n);
            (&s - s.transpose()) * &x
        } else {
            random_matrix(&mut r, n, m)
        };
        let mut g = DMatrix::zeros(2 * n, m);
        g.view_mut((0, 0), (n, m)).copy_from(&x);
        g.view_mut((n, 0), (n, m)).copy_from(&xi);
        let isotropic = max_abs(&(g.transpose() * pairing_matrix(n) * &g)) < 1e-10;
        seen[isotropic as usize] += 1;
        let a = LiftedActionPoint::new(n, g)?;
        let red = reduce_pointwise(&a)?;
        agree += (red.exact == isotropic && red.exact == exact_by_dimension(&a, &red)) as usize;
    }
    rep.flag("reduction.exact_iff_isotropic", A_REDUCTION, agree == cfg.samples)
        .note(&format!("{agree}/{} actions; {} isotropic, {} not", cfg.samples, seen[1], seen[0]));

    // Transversality of τ_F against invertibility of the fiber block, random F.
    let mut t_agree = 0usize;
    let dim = bs.corr().coframe().dim();
    let (fib, dual) = bs.corr().fiber_indices();
    for _ in 0..cfg.samples {
        let a = random_matrix(&mut r, dim, dim);
        let mut f = &a - a.transpose();
        if r.gen_bool(0.5) {
            // A rank-one fiber block makes both sides of the criterion fail.
            let (u, v) = (random_matrix(&mut r, fib.len(), 1), random_matrix(&mut r, 1, dual.len()));
            let low = &u * &v;
            for (i, &fi) in fib.iter().enumerate() {
                for (j, &dj) in dual.iter().enumerate() {
                    f[(fi, dj)] = low[(i, j)];
                    f[(dj, fi)] = -low[(i, j)];
                }
            }
        }
        let t = transversality_with(bs, &f)?;
        t_agree += (t.transversal == t.fiber_block_nondegenerate) as usize;
    }
    rep.flag("reduction.transversal_iff_fiber_block", A_FM, t_agree == cfg.samples);

    fourier_mukai_checks(&mut rep, cfg, &mut r)?;
    Ok(rep)
}

fn fourier_mukai_checks(rep: &mut Report, cfg: &ScenarioConfig, r: &mut ChaCha8Rng) -> Result<()> {
    let ch = models::chart("hopf4")?;
    let pair = models::dual_pair(&ch)?;
    let cf = ch.coframe();
    let tcf = pair.mt().coframe();
    let tol = cfg.tol(1e-8);
    let base = [models::hopf4_complex(&ch)?, models::hopf4_symplectic(&ch)?];
    let pts = ch.sample(cfg.seed.wrapping_add(11), cfg.samples)?;
    let (mut pos, mut neg, mut agree) = (0usize, 0usize, 0usize);
    let mut worst_pos: f64 = 0.0;
    for (case, p) in pts.iter().enumerate() {
        let b = random::form(r, cf, &[2], 0.5, false);
        let rho = exp_form(&b, 4)?.wedge(&base[case % 2].rho)?;
        let rho_t = pair.tau(&rho)?;
        let good = check_fourier_mukai(&rho, &rho_t, &pair, p)?;
        worst_pos = worst_pos.max(good.submanifold_defect).max(good.conjugation_defect);
        pos += (good.by_submanifold(tol) && good.by_conjugation(tol)) as usize;
        agree += (good.by_submanifold(tol) == good.by_conjugation(tol)) as usize;
        let mut bt = random::form(r, tcf, &[2], 0.7, false);
        if bt.is_zero() {
            bt = parse_form(tcf, "(form (term 1 dt ds))")?;
        }
        let bad = check_fourier_mukai(&rho, &exp_form(&bt, 4)?.wedge(&rho_t)?, &pair, p)?;
        neg += (!bad.by_submanifold(tol) && !bad.by_conjugation(tol)) as usize;
        agree += (bad.by_submanifold(tol) == bad.by_conjugation(tol)) as usize;
    }
    let n = pts.len();
    rep.residual("fourier_mukai.positive", A_FM, worst_pos, tol)
        .note(&format!("{pos}/{n} transported pairs accepted by both routes"));
    rep.flag("fourier_mukai.negative", A_FM, neg == n)
        .note(&format!("{neg}/{n} pairs with an extra B̃-field rejected by both routes"));
    rep.flag("fourier_mukai.routes_agree", A_FM, agree == 2 * n)
        .note("τ_F invariant under (𝒥, c𝒥̃c⁻¹) iff 𝒥̃ = φ𝒥φ⁻¹, c = diag(1, -1)");
    Ok(())
}
