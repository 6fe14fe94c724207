use nalgebra::DMatrix;

use super::*;
use crate::courant::{courant_bracket, pairing, Section};
use crate::exterior::{parse_form, parse_vector, sup_norm, Form};
use crate::linalg::CMat;
use crate::models;
use crate::random;
use crate::scalar::{equal_numeric, parse_scalar, rng, CScalar, Point, Scalar};
use crate::structures::{c_pm, spinor_type, GeneralizedMetric};

fn hopf3() -> DualityPair {
    models::dual_pair(&models::chart("hopf3").unwrap()).unwrap()
}

fn hopf3_selfdual() -> DualityPair {
    models::dual_pair(&models::chart("hopf3-selfdual").unwrap()).unwrap()
}

fn hopf4() -> DualityPair {
    models::dual_pair(&models::chart("hopf4").unwrap()).unwrap()
}

fn real(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.abs().max()
}

#[test]
fn circle_phi_swaps_fiber_vector_and_connection_form() {
    let pair = hopf3();
    let cf = pair.m().coframe();
    let tcf = pair.mt().coframe();
    let v = Section::new(
        parse_vector(cf, "(vector (comp (* 2 t) dt) (comp (sin t) ds) (comp (+ 1 (^ t 2)) theta))").unwrap(),
        parse_form(cf, "(form (term (cos t) dt) (term 3 ds) (term (* -1 t) theta))").unwrap(),
    )
    .unwrap();
    let expected = Section::new(
        parse_vector(tcf, "(vector (comp (* 2 t) dt) (comp (sin t) ds) (comp (* -1 t) theta~))").unwrap(),
        parse_form(tcf, "(form (term (cos t) dt) (term 3 ds) (term (+ 1 (^ t 2)) theta~))").unwrap(),
    )
    .unwrap();
    let got = pair.phi(&v).unwrap();
    let pts = pair.mt().sample(1, 8).unwrap();
    let diff = got.sub(&expected.transfer(got.coframe()).unwrap()).unwrap();
    for p in &pts {
        assert!(diff.eval(p).unwrap().norm() < 1e-12);
    }
}

#[test]
fn phi_is_identity_on_basic_sections() {
    for pair in [hopf3(), hopf4(), models::bunke_schick().unwrap()] {
        let cf = pair.m().coframe();
        let mut r = rng(3);
        let mut v = random::section(&mut r, cf, true);
        for i in pair.m().fiber_indices() {
            v.x.set(i, CScalar::zero());
        }
        v.xi = v.xi.filter(|m| m & cf.tag_mask(pair.m().fiber_tag()) == 0);
        let img = pair.phi(&v).unwrap();
        let back = v.transfer(img.coframe()).unwrap();
        let pts = pair.mt().sample(2, 8).unwrap();
        for p in &pts {
            assert!(img.sub(&back).unwrap().eval(p).unwrap().norm() < 1e-10);
        }
    }
}

#[test]
fn phi_is_orthogonal_and_preserves_brackets() {
    for pair in [hopf3(), hopf3_selfdual(), hopf4(), models::bunke_schick().unwrap()] {
        let cf = pair.m().coframe();
        let pts = pair.m().sample(5, 6).unwrap();
        let mut r = rng(11);
        for _ in 0..3 {
            let v = random::section(&mut r, cf, false);
            let w = random::section(&mut r, cf, false);
            let (pv, pw) = (pair.phi(&v).unwrap(), pair.phi(&w).unwrap());
            let pair_diff = &pairing(&pv, &pw).unwrap() - &pairing(&v, &w).unwrap();
            let lhs = pair.phi(&courant_bracket(&v, &w, pair.m()).unwrap()).unwrap();
            let rhs = courant_bracket(&pv, &pw, pair.mt()).unwrap();
            let diff = lhs.sub(&rhs).unwrap();
            for p in &pts {
                assert!(pair_diff.eval(p).unwrap().norm() < 1e-9);
                assert!(diff.eval(p).unwrap().norm() < 1e-8, "bracket defect {}", diff.eval(p).unwrap().norm());
            }
        }
    }
}

#[test]
fn tau_is_compatible_with_phi_and_intertwines_twisted_differentials() {
    for pair in [hopf3(), hopf3_selfdual(), hopf4(), models::bunke_schick().unwrap()] {
        let cf = pair.m().coframe();
        let pts = pair.m().sample(7, 6).unwrap();
        let mut r = rng(19);
        for _ in 0..3 {
            let rho = random::form(&mut r, cf, &(0..=cf.dim()).collect::<Vec<_>>(), 0.4, true);
            let v = random::section(&mut r, cf, true);
            assert!(pair.compat_residual(&v, &rho, &pts).unwrap() < 1e-8);
            assert!(pair.intertwining_residual(&rho, &pts).unwrap() < 1e-8);
        }
    }
}

#[test]
fn tau_round_trip_is_a_constant_multiple_of_identity() {
    for pair in [hopf3(), hopf4(), models::bunke_schick().unwrap()] {
        let cf = pair.m().coframe();
        let s = pair.roundtrip_sign().unwrap();
        let pts = pair.m().sample(9, 4).unwrap();
        let mut r = rng(23);
        let rho = random::form(&mut r, cf, &(0..=cf.dim()).collect::<Vec<_>>(), 0.5, true);
        let back = pair.tau_reverse(&pair.tau(&rho).unwrap()).unwrap();
        let diff = &back.transfer(cf).unwrap() - &rho.scale(&CScalar::from(s as i64));
        assert!(sup_norm(&diff, &pts).unwrap() < 1e-9);
    }
}

#[test]
fn tau_of_circle_generators() {
    let pair = hopf3();
    let cf = pair.m().coframe();
    let tcf = pair.mt().coframe();
    let pts = pair.mt().sample(0, 4).unwrap();
    let one = pair.tau(&Form::one(cf)).unwrap();
    assert!(sup_norm(&(&one - &Form::gen(tcf, "theta~").unwrap()), &pts).unwrap() < 1e-12);
    let theta = pair.tau(&Form::gen(cf, "theta").unwrap()).unwrap();
    assert!(sup_norm(&(&theta - &Form::one(tcf)), &pts).unwrap() < 1e-12);
}

#[test]
fn s2_spinor_transforms_to_one_form_plus_two_form() {
    let ch = models::chart("s2").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let b = parse_scalar("(^ t 3)").unwrap();
    let w = parse_scalar("(+ 1 (^ t 2))").unwrap();
    let rho = models::s2_spinor(&ch, &b, &w).unwrap();
    let img = pair.tau(&rho.rho).unwrap();
    let tcf = pair.mt().coframe();
    let expected = parse_form(tcf, "(form (term 1 theta~) (term (complex (^ t 3) (+ 1 (^ t 2))) dt))").unwrap();
    let pts = pair.mt().sample(1, 8).unwrap();
    assert!(sup_norm(&(&img - &expected), &pts).unwrap() < 1e-12, "τ(ρ) = {img}");
}

#[test]
fn transported_hopf_metric_matches_closed_form_dual() {
    let ch = models::chart("hopf3").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let m = models::hopf3_metric(&ch).unwrap();
    let got = CircleMetric::from_metric(&transport_metric(&pair, &m).unwrap()).unwrap();
    let want = buscher(&CircleMetric::from_metric(&m).unwrap()).unwrap();
    let d = ch.domain();
    assert!(equal_numeric(&got.g0, &want.g0, d, 16, 1e-10, 0).unwrap());
    // g̃(∂θ̃, ∂θ̃) = 1/g(∂θ, ∂θ) holds as an identity of expressions.
    assert_eq!(got.g0, m.g[2][2].recip());
    for a in 0..2 {
        assert!(equal_numeric(&got.g1[a], &want.g1[a], d, 16, 1e-10, 1).unwrap());
        assert!(equal_numeric(&got.b1[a], &want.b1[a], d, 16, 1e-10, 2).unwrap());
        for c in 0..2 {
            assert!(equal_numeric(&got.g2[a][c], &want.g2[a][c], d, 16, 1e-10, 3).unwrap());
            assert!(equal_numeric(&got.b2[a][c], &want.b2[a][c], d, 16, 1e-10, 4).unwrap());
        }
    }
}

#[test]
fn transported_metric_agrees_with_generalized_metric_oracle() {
    // Independent route: map C₊ numerically with the matrix of φ and read off
    // (g̃, b̃) from the graph.
    let ch = models::chart("hopf3").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let m = models::hopf3_metric(&ch).unwrap();
    let dual = transport_metric(&pair, &m).unwrap();
    for p in ch.sample(4, 6).unwrap() {
        let (g, b) = m.at(&p).unwrap();
        let phi = real(&pair.phi_matrix(&p).unwrap());
        let (gt, bt) = crate::structures::gb_from_cplus(&(&phi * c_pm(&g, &b, 1.0))).unwrap();
        let (gd, bd) = dual.at(&p).unwrap();
        assert!(max_abs(&(&gt - &gd)) < 1e-10);
        assert!(max_abs(&(&bt - &bd)) < 1e-10);
        let minus = &phi * c_pm(&g, &b, -1.0);
        let graph = c_pm(&gd, &bd, -1.0);
        assert!(crate::linalg::span_defect(&crate::linalg::to_complex(&graph), &crate::linalg::to_complex(&minus)) < 1e-10);
    }
}

#[test]
fn buscher_is_an_involution() {
    let ch = models::chart("hopf3").unwrap();
    let d = ch.domain();
    let sym = |a: &str, b: &str, c: &str| -> Vec<Vec<Scalar>> {
        let (a, b, c) = (parse_scalar(a).unwrap(), parse_scalar(b).unwrap(), parse_scalar(c).unwrap());
        vec![vec![a, b.clone()], vec![b, c]]
    };
    let data = CircleMetric {
        g0: parse_scalar("(+ 2 (sin t))").unwrap(),
        g1: vec![parse_scalar("(* 1/3 t)").unwrap(), parse_scalar("(cos s)").unwrap()],
        g2: sym("(+ 3 (^ t 2))", "(* 1/4 s)", "(+ 4 (cos t))"),
        b1: vec![parse_scalar("(* t s)").unwrap(), parse_scalar("-1/2").unwrap()],
        b2: {
            let f = parse_scalar("(+ t (^ s 2))").unwrap();
            vec![vec![Scalar::zero(), f.clone()], vec![-&f, Scalar::zero()]]
        },
    };
    let twice = buscher(&buscher(&data).unwrap()).unwrap();
    assert!(equal_numeric(&twice.g0, &data.g0, d, 12, 1e-10, 0).unwrap());
    for a in 0..2 {
        assert!(equal_numeric(&twice.g1[a], &data.g1[a], d, 12, 1e-10, 1).unwrap());
        assert!(equal_numeric(&twice.b1[a], &data.b1[a], d, 12, 1e-10, 2).unwrap());
        for c in 0..2 {
            assert!(equal_numeric(&twice.g2[a][c], &data.g2[a][c], d, 12, 1e-10, 3).unwrap());
            assert!(equal_numeric(&twice.b2[a][c], &data.b2[a][c], d, 12, 1e-10, 4).unwrap());
        }
    }
}

#[test]
fn round_sphere_dualizes_to_inverted_fiber_metric() {
    let ch = models::chart("s2").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let dual = transport_metric(&pair, &models::round_s2_metric(&ch).unwrap()).unwrap();
    let d = ch.domain();
    let g0 = parse_scalar("(/ 1 (- 1 (^ t 2)))").unwrap();
    assert!(equal_numeric(&dual.g[0][0], &g0, d, 12, 1e-10, 0).unwrap());
    assert!(equal_numeric(&dual.g[1][1], &g0, d, 12, 1e-10, 1).unwrap());
    assert!(dual.b.is_zero() || sup_norm(&dual.b, &ch.sample(0, 8).unwrap()).unwrap() < 1e-12);
}

#[test]
fn gibbons_hawking_potential_is_harmonic_monopole() {
    let gh = models::gibbons_hawking().unwrap();
    let ch = &gh.chart;
    let cf = ch.coframe();
    let dv = |x: &str| CScalar::real(gh.v.diff(x));
    // *dV with *dx1 = dx2∧dx3, *dx2 = dx3∧dx1, *dx3 = dx1∧dx2.
    let star = [("x1", ["dx2", "dx3"]), ("x2", ["dx3", "dx1"]), ("x3", ["dx1", "dx2"])]
        .iter()
        .fold(Form::zero(cf), |acc, (x, legs)| &acc + &Form::wedge_of(cf, legs, dv(x)).unwrap());
    let pts = ch.sample(3, 12).unwrap();
    assert!(sup_norm(&(&ch.d(&gh.b1).unwrap() - &star), &pts).unwrap() < 1e-9);
    assert!(sup_norm(&ch.d(&gh.b2).unwrap(), &pts).unwrap() < 1e-12);
    let lap = Scalar::sum(["x1", "x2", "x3"].map(|x| gh.v.diff(x).diff(x)));
    for p in &pts {
        assert!(lap.eval(p).unwrap().abs() < 1e-8);
    }
}

#[test]
fn gibbons_hawking_dual_is_the_ansatz_metric() {
    let gh = models::gibbons_hawking().unwrap();
    let pair = models::dual_pair(&gh.chart).unwrap();
    let dual = transport_metric(&pair, &gh.metric).unwrap();
    let tcf = pair.mt().coframe();
    let ft = tcf.index("theta~").unwrap();
    let pts = gh.chart.sample(6, 8).unwrap();
    for p in &pts {
        let v = gh.v.eval(p).unwrap();
        let b1: Vec<f64> = ["dx1", "dx2", "dx3"].iter().map(|x| gh.b1.coeff_of(&[x]).unwrap().eval(p).unwrap().re).collect();
        let (g, b) = dual.at(p).unwrap();
        let (_, b_src) = gh.metric.at(p).unwrap();
        for a in 0..3 {
            let ia = tcf.index(["dx1", "dx2", "dx3"][a]).unwrap();
            assert!((g[(ia, ft)] + b1[a] / v).abs() < 1e-10);
            assert!(b[(ia, ft)].abs() < 1e-10);
            for c in 0..3 {
                let ic = tcf.index(["dx1", "dx2", "dx3"][c]).unwrap();
                let flat = if a == c { v } else { 0.0 };
                assert!((g[(ia, ic)] - flat - b1[a] * b1[c] / v).abs() < 1e-10);
                let ja = gh.metric.b.coframe().index(["dx1", "dx2", "dx3"][a]).unwrap();
                let jc = gh.metric.b.coframe().index(["dx1", "dx2", "dx3"][c]).unwrap();
                assert!((b[(ia, ic)] - b_src[(ja, jc)]).abs() < 1e-10);
            }
        }
        assert!((g[(ft, ft)] - 1.0 / v).abs() < 1e-10);
    }
}

#[test]
fn dual_type_on_circle_bundles() {
    let ch = models::chart("hopf4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let p = &ch.sample(2, 1).unwrap()[0];
    // Ω has a fiber leg: type drops by one.
    let cx = dual_type(&models::hopf4_complex(&ch).unwrap(), &pair, p).unwrap();
    assert_eq!((cx.source_type, cx.j, cx.dual_type), (2, 0, 1));
    // Symplectic: the fiber leg comes from ω, type rises by one.
    let sp = dual_type(&models::hopf4_symplectic(&ch).unwrap(), &pair, p).unwrap();
    assert_eq!((sp.source_type, sp.j, sp.dual_type), (0, 1, 1));
    for rho in [models::hopf4_complex(&ch).unwrap(), models::hopf4_symplectic(&ch).unwrap(), models::hopf4_complex_b(&ch).unwrap()] {
        for q in ch.sample(8, 4).unwrap() {
            assert!(dual_type_consistent(&rho, &pair, &q).unwrap());
        }
    }
}

#[test]
fn torus_table_types() {
    let ch = models::chart("torus4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let p = &ch.sample(1, 1).unwrap()[0];
    let expected = [(2, 2), (2, 0), (0, 0), (0, 2)];
    for (row, (src, dst)) in models::table1_rows(&ch).unwrap().iter().zip(expected) {
        let dt = dual_type(&row.spinor, &pair, p).unwrap();
        assert_eq!((dt.source_type, dt.dual_type), (src, dst), "{}", row.label);
        assert_eq!(spinor_type(&pair.tau(&row.spinor.rho).unwrap().eval(p).unwrap()).unwrap(), dst);
    }
}

#[test]
fn hopf_surface_dual_type_jumps_on_special_loci() {
    let ch = models::chart("hopf-surface").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let a1 = parse_scalar("1/2").unwrap();
    let a2 = parse_scalar("3/2").unwrap();
    let generic = models::hopf_surface_spinor(&ch, &a1, &a2).unwrap();
    let p = Point::from_pairs([("u", 0.4), ("v", 1.0)]);
    let dt = dual_type(&generic, &pair, &p).unwrap();
    assert_eq!((dt.j, dt.dual_type), (0, 0));
    let axis = Point::from_pairs([("u", 0.0), ("v", 1.0)]);
    assert_eq!(dual_type(&generic, &pair, &axis).unwrap().dual_type, 2);
    let diagonal = models::hopf_surface_spinor(&ch, &a1, &a1).unwrap();
    let dd = dual_type(&diagonal, &pair, &p).unwrap();
    assert_eq!((dd.j, dd.dual_type), (1, 2));
    assert!(dual_type_consistent(&diagonal, &pair, &p).unwrap());
    assert!(dual_type_consistent(&generic, &pair, &p).unwrap());
}

#[test]
fn transport_preserves_the_uk_filtration() {
    let ch = models::chart("hopf4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    for rho in [models::hopf4_complex(&ch).unwrap(), models::hopf4_symplectic(&ch).unwrap()] {
        for p in ch.sample(3, 3).unwrap() {
            assert!(transport_uk(&rho.rho, &pair, &p).unwrap() < 1e-8);
        }
    }
    let s2 = models::chart("s2").unwrap();
    let pair = models::dual_pair(&s2).unwrap();
    let rho = models::s2_spinor(&s2, &parse_scalar("t").unwrap(), &parse_scalar("(+ 2 t)").unwrap()).unwrap();
    for p in s2.sample(3, 3).unwrap() {
        assert!(transport_uk(&rho.rho, &pair, &p).unwrap() < 1e-8);
    }
}

/// A `g`-orthogonal complex structure on `T M` at `p`: `g^{-1/2} R J₀ Rᵀ g^{1/2}`.
fn compatible_complex_structure(g: &DMatrix<f64>, angle: f64) -> DMatrix<f64> {
    let n = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let inv_sqrt = sqrt.clone().try_inverse().unwrap();
    let mut j0 = DMatrix::zeros(n, n);
    for k in (0..n).step_by(2) {
        j0[(k + 1, k)] = 1.0;
        j0[(k, k + 1)] = -1.0;
    }
    let mut r = DMatrix::identity(n, n);
    let (c, s) = (angle.cos(), angle.sin());
    // Rotate in the (1, 2) plane so I∂θ is not a coordinate direction.
    r[(1, 1)] = c;
    r[(1, 2)] = -s;
    r[(2, 1)] = s;
    r[(2, 2)] = c;
    &inv_sqrt * &r * j0 * r.transpose() * sqrt
}

fn hopf4_metric(ch: &crate::bundle::BundleChart) -> GeneralizedMetric {
    let z = Scalar::zero;
    let g = vec![
        vec![parse_scalar("(/ 1 (- 1 (^ t 2)))").unwrap(), z(), z(), z()],
        vec![z(), parse_scalar("(- 1 (^ t 2))").unwrap(), z(), z()],
        vec![z(), z(), parse_scalar("(+ 2 (sin u))").unwrap(), z()],
        vec![z(), z(), z(), parse_scalar("(+ 1 (* 1/2 (^ t 2)))").unwrap()],
    ];
    let b = parse_form(ch.coframe(), "(form (term (* 1/2 t) ds theta) (term (cos u) du theta) (term t dt ds))").unwrap();
    GeneralizedMetric::new(g, b).unwrap()
}

#[test]
fn bihermitian_transport_matches_graph_oracle() {
    let ch = models::chart("hopf4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let m = hopf4_metric(&ch);
    let n = 4;
    for (k, p) in ch.sample(12, 4).unwrap().iter().enumerate() {
        let (g, b) = m.at(p).unwrap();
        let i_m = compatible_complex_structure(&g, 0.3 + k as f64);
        let phi = real(&pair.phi_matrix(p).unwrap());
        let mut orient = Vec::new();
        for side in [1, -1] {
            let c = c_pm(&g, &b, side as f64);
            let image = &phi * &c;
            let proj = image.view((0, 0), (n, n)).into_owned();
            let oracle = &proj * &i_m * proj.clone().try_inverse().unwrap();
            let got = transport_bihermitian(&pair, &m, &i_m, p, side).unwrap();
            assert!(max_abs(&(&got - &oracle)) < 1e-9, "side {side}: {got} vs {oracle}");
            assert!(max_abs(&(&got * &got + DMatrix::identity(n, n))) < 1e-9);
            let (gt, _) = transport_metric(&pair, &m).unwrap().at(p).unwrap();
            assert!(max_abs(&(got.transpose() * &gt * &got - &gt)) < 1e-9);
            orient.push(complex_orientation(&got).unwrap());
        }
        let src = complex_orientation(&i_m).unwrap();
        assert_eq!(orient[0], src);
        assert_eq!(orient[1], -src);
    }
}

#[test]
fn bihermitian_transport_rejects_incompatible_input() {
    let ch = models::chart("hopf4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let m = hopf4_metric(&ch);
    let p = &ch.sample(0, 1).unwrap()[0];
    let mut bad = DMatrix::zeros(4, 4);
    bad[(1, 0)] = 2.0;
    bad[(0, 1)] = -0.5;
    bad[(3, 2)] = 1.0;
    bad[(2, 3)] = -1.0;
    assert!(transport_bihermitian(&pair, &m, &bad, p, 1).is_err());
    let (g, _) = m.at(p).unwrap();
    let i_m = compatible_complex_structure(&g, 0.1);
    assert!(transport_bihermitian(&pair, &m, &i_m, p, 2).is_err());
}

#[test]
fn transported_spinor_keeps_integrability() {
    let ch = models::chart("hopf4").unwrap();
    let pair = models::dual_pair(&ch).unwrap();
    let pts = ch.sample(1, 6).unwrap();
    for rho in [models::hopf4_complex(&ch).unwrap(), models::hopf4_symplectic(&ch).unwrap()] {
        let img = transport_spinor(&pair, &rho).unwrap();
        let src = crate::structures::check_integrable(&rho.rho, pair.m(), &pts).unwrap();
        let dst = crate::structures::check_integrable(&img.rho, pair.mt(), &pts).unwrap();
        assert!(src.integrable(1e-9) && dst.integrable(1e-9), "{} {}", src.residual, dst.residual);
    }
    let bad = models::hopf4_nonintegrable(&ch).unwrap();
    let img = transport_spinor(&pair, &bad).unwrap();
    assert!(!crate::structures::check_integrable(&img.rho, pair.mt(), &pts).unwrap().integrable(1e-6));
}
