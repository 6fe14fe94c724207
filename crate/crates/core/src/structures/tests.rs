use nalgebra::DMatrix;
use num_complex::Complex64;

use super::*;
use crate::bundle::BundleChart;
use crate::exterior::{parse_form, Form, Tag};
use crate::linalg::{c, hcat, rank, span_defect, to_complex, CMat, CVec};
use crate::pointwise::{action_on, pair, pairing_matrix};
use crate::scalar::{Domain, Point};

fn flat(vars: &[&str]) -> BundleChart {
    let spec: Vec<(&str, f64, f64)> = vars.iter().map(|v| (*v, -1.0, 1.0)).collect();
    let dom = Domain::new(&spec).unwrap();
    let cf = BundleChart::make_coframe(&dom, Tag::Fiber, &[]).unwrap();
    BundleChart::new("flat", cf.clone(), dom, vec![], Form::zero(&cf)).unwrap()
}

fn origin() -> Point {
    Point::from_pairs([("x", 0.3), ("y", -0.2), ("z", 0.4), ("w", 0.1)])
}

fn symplectic(ch: &BundleChart, omega: &str) -> PureSpinor {
    let cf = ch.coframe();
    PureSpinor::from_data(Form::zero(cf), parse_form(cf, omega).unwrap(), Form::one(cf)).unwrap()
}

fn is_isotropic(l: &CMat) -> bool {
    let g = l.transpose() * pairing_matrix(l.nrows() / 2) * l;
    g.iter().all(|z| z.norm() < 1e-10)
}

#[test]
fn symplectic_annihilator_is_graph_of_minus_i_omega() {
    let ch = flat(&["x", "y"]);
    let rho = symplectic(&ch, "(form (term 1 dx dy))").at(&origin()).unwrap();
    let l = annihilator(2, &rho).unwrap();
    assert_eq!(l.ncols(), 2);
    assert!(is_isotropic(&l));
    // i_X(dx∧dy) = X^x dy - X^y dx, so -iω(X) = i X^y dx - i X^x dy.
    for col in l.column_iter() {
        let (xx, xy) = (col[0], col[1]);
        let expected = [Complex64::i() * xy, -Complex64::i() * xx];
        assert!((col[2] - expected[0]).norm() < 1e-12 && (col[3] - expected[1]).norm() < 1e-12);
    }
    assert_eq!(spinor_type(&rho).unwrap(), 0);
}

#[test]
fn complex_annihilator_and_type() {
    let ch = flat(&["x", "y"]);
    let dz = parse_form(ch.coframe(), "(form (term 1 dx) (term (complex 0 1) dy))").unwrap();
    let rho = dz.eval(&origin()).unwrap();
    let l = annihilator(2, &rho).unwrap();
    let expected = CMat::from_columns(&[
        CVec::from_vec(vec![c(0.5), Complex64::new(0.0, 0.5), c(0.0), c(0.0)]),
        CVec::from_vec(vec![c(0.0), c(0.0), c(1.0), Complex64::i()]),
    ]);
    assert!(span_defect(&l, &expected) < 1e-12);
    assert!(span_defect(&expected, &l) < 1e-12);
    assert_eq!(spinor_type(&rho).unwrap(), 1);
    let ch4 = flat(&["x", "y", "z", "w"]);
    let top = parse_form(ch4.coframe(), "(form (term 1 dx) (term (complex 0 1) dy))")
        .unwrap()
        .wedge(&parse_form(ch4.coframe(), "(form (term 1 dz) (term (complex 0 1) dw))").unwrap())
        .unwrap();
    assert_eq!(spinor_type(&top.eval(&origin()).unwrap()).unwrap(), 2);
}

#[test]
fn gcs_of_symplectic_form() {
    let ch = flat(&["x", "y", "z", "w"]);
    let sp = symplectic(&ch, "(form (term 2 dx dy) (term 1 dx dw) (term 3 dz dw))");
    let rho = sp.at(&origin()).unwrap();
    let j = gcs_endomorphism(4, &rho).unwrap();
    let w = DMatrix::from_row_slice(4, 4, &[0., 2., 0., 1., -2., 0., 0., 0., 0., 0., 0., 3., -1., 0., -3., 0.]);
    let omega_map = w.transpose();
    let inv = omega_map.clone().try_inverse().unwrap();
    let mut expected = DMatrix::zeros(8, 8);
    expected.view_mut((0, 4), (4, 4)).copy_from(&(-inv));
    expected.view_mut((4, 0), (4, 4)).copy_from(&omega_map);
    assert!((&j - &expected).abs().max() < 1e-10);
    assert!((&j * &j + DMatrix::<f64>::identity(8, 8)).abs().max() < 1e-10);
    let g = pairing_matrix(4).map(|z| z.re);
    assert!((j.transpose() * &g * &j - g).abs().max() < 1e-10);
}

#[test]
fn gcs_of_complex_structure() {
    let ch = flat(&["x", "y"]);
    let dz = parse_form(ch.coframe(), "(form (term 1 dx) (term (complex 0 1) dy))").unwrap();
    let j = gcs_endomorphism(2, &dz.eval(&origin()).unwrap()).unwrap();
    let i = DMatrix::from_row_slice(2, 2, &[0., -1., 1., 0.]);
    let mut expected = DMatrix::zeros(4, 4);
    expected.view_mut((0, 0), (2, 2)).copy_from(&(-&i));
    expected.view_mut((2, 2), (2, 2)).copy_from(&i.transpose());
    assert!((&j - &expected).abs().max() < 1e-12);
}

#[test]
fn degenerate_spinor_rejected() {
    let ch = flat(&["x", "y"]);
    let dx = parse_form(ch.coframe(), "(form (term 1 dx))").unwrap().eval(&origin()).unwrap();
    assert!(!is_nondegenerate(2, &dx).unwrap());
    assert!(gcs_endomorphism(2, &dx).is_err());
    assert!(relative_mukai_norm(2, &dx) < 1e-14);
    assert!(annihilator(2, &CVec::zeros(4)).is_err());
}

#[test]
fn integrability_of_closed_and_nonclosed_symplectic_forms() {
    let ch = flat(&["x", "y", "z", "w"]);
    let pts = ch.sample(3, 16).unwrap();
    let good = symplectic(&ch, "(form (term 1 dx dy) (term 1 dz dw))");
    let res = check_integrable(&good.rho, &ch, &pts).unwrap();
    assert!(res.integrable(1e-12));
    assert!(res.witnesses.iter().all(|v| v.norm() < 1e-12));
    let bad = symplectic(&ch, "(form (term (+ 1 (^ z 2)) dx dy) (term 1 dz dw))");
    assert!(!check_integrable(&bad.rho, &ch, &pts).unwrap().integrable(1e-6));
    let dz = parse_form(ch.coframe(), "(form (term 1 dx) (term (complex 0 1) dy))").unwrap();
    let dz2 = dz.wedge(&parse_form(ch.coframe(), "(form (term 1 dz) (term (complex 0 1) dw))").unwrap()).unwrap();
    assert!(check_integrable(&dz2, &ch, &pts).unwrap().integrable(1e-12));
}

#[test]
fn uk_decomposition_exhausts_forms() {
    let ch = flat(&["x", "y", "z", "w"]);
    let sp = PureSpinor::from_data(
        parse_form(ch.coframe(), "(form (term x dx dz))").unwrap(),
        parse_form(ch.coframe(), "(form (term 1 dy dw))").unwrap(),
        parse_form(ch.coframe(), "(form (term 1 dx) (term (complex 0 1) dz))").unwrap(),
    )
    .unwrap();
    let rho = sp.at(&origin()).unwrap();
    assert_eq!(spinor_type(&rho).unwrap(), 1);
    let spaces = uk_spaces(4, &rho).unwrap();
    let ranks: Vec<usize> = spaces.iter().map(rank).collect();
    assert_eq!(ranks, vec![1, 4, 6, 4, 1]);
    let all = spaces.iter().skip(1).fold(spaces[0].clone(), |acc, s| hcat(&acc, s));
    assert_eq!(rank(&all), 16);
    assert!(span_defect(&spaces[0], &CMat::from_columns(&[rho])) < 1e-12);
}

#[test]
fn symplectic_uk_matches_spanning_construction() {
    let ch = flat(&["x", "y", "z", "w"]);
    let sp = symplectic(&ch, "(form (term 2 dx dy) (term 1 dx dw) (term 3 dz dw))");
    let rho = sp.at(&origin()).unwrap();
    let spanned = uk_spaces(4, &rho).unwrap();
    let w = DMatrix::from_row_slice(4, 4, &[0., 2., 0., 1., -2., 0., 0., 0., 0., 0., 0., 3., -1., 0., -3., 0.]);
    let formula = symplectic_uk(&w).unwrap();
    for (a, b) in spanned.iter().zip(&formula) {
        assert!(span_defect(a, b) < 1e-10);
        assert!(span_defect(b, a) < 1e-10);
    }
    // In two dimensions the bottom space is spanned by i + dx∧dy.
    let w2 = DMatrix::from_row_slice(2, 2, &[0., 1., -1., 0.]);
    let bottom = &symplectic_uk(&w2).unwrap()[2];
    let expected = CVec::from_vec(vec![Complex64::i(), c(0.0), c(0.0), c(1.0)]);
    assert!(span_defect(bottom, &CMat::from_columns(&[expected])) < 1e-12);
}

#[test]
fn pure_spinor_mukai_norm_nonzero() {
    let ch = flat(&["x", "y"]);
    let sp = symplectic(&ch, "(form (term 1 dx dy))");
    let v = sp.mukai_norm().unwrap().eval(&origin()).unwrap();
    // (e^{iω}, e^{-iω}) = -2iω in top degree.
    assert!((v - Complex64::new(0.0, -2.0)).norm() < 1e-14);
}

#[test]
fn metric_endomorphism_identity_metric() {
    let g = DMatrix::<f64>::identity(3, 3);
    let b = DMatrix::zeros(3, 3);
    let gm = metric_endomorphism(&g, &b).unwrap();
    let mut expected = DMatrix::zeros(6, 6);
    expected.view_mut((0, 3), (3, 3)).copy_from(&g);
    expected.view_mut((3, 0), (3, 3)).copy_from(&g);
    assert!((gm - expected).abs().max() < 1e-14);
}

fn closed_form_metric(g: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let gi = g.clone().try_inverse().unwrap();
    let bm = b.transpose();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&(-&gi * &bm));
    out.view_mut((0, n), (n, n)).copy_from(&gi);
    out.view_mut((n, 0), (n, n)).copy_from(&(g - &bm * &gi * &bm));
    out.view_mut((n, n), (n, n)).copy_from(&(&bm * &gi));
    out
}

#[test]
fn metric_endomorphism_general_and_round_trip() {
    let mut rng = crate::scalar::rng(11);
    use rand::Rng;
    for _ in 0..20 {
        let a = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let g = &a * a.transpose() + DMatrix::identity(4, 4) * 0.5;
        let r = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let b = &r - r.transpose();
        let gm = metric_endomorphism(&g, &b).unwrap();
        assert!((&gm - closed_form_metric(&g, &b)).abs().max() < 1e-10);
        assert!((&gm * &gm - DMatrix::<f64>::identity(8, 8)).abs().max() < 1e-10);
        let pm = pairing_matrix(4).map(|z| z.re);
        let v = nalgebra::DVector::<f64>::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
        assert!((v.transpose() * &pm * &gm * &v)[(0, 0)] > 0.0);
        let (g2, b2) = gb_from_cplus(&c_pm(&g, &b, 1.0)).unwrap();
        assert!((g2 - &g).abs().max() < 1e-12 && (b2 - &b).abs().max() < 1e-12);
        let plus = to_complex(&c_pm(&g, &b, 1.0));
        for col in plus.column_iter() {
            assert!(pair(&col.into_owned(), &col.into_owned()).re > 0.0);
        }
    }
    assert!(metric_endomorphism(&DMatrix::zeros(2, 2), &DMatrix::zeros(2, 2)).is_err());
}

#[test]
fn generalized_metric_from_forms() {
    let ch = flat(&["x", "y"]);
    let cf = ch.coframe();
    let x = crate::scalar::Scalar::var("x");
    let one = crate::scalar::Scalar::one();
    let zero = crate::scalar::Scalar::zero();
    let m = GeneralizedMetric::new(
        vec![vec![&one + &(&x * &x), zero.clone()], vec![zero.clone(), one.clone()]],
        parse_form(cf, "(form (term x dx dy))").unwrap(),
    )
    .unwrap();
    let (g, b) = m.at(&origin()).unwrap();
    assert!((g[(0, 0)] - 1.09).abs() < 1e-14);
    assert!((b[(0, 1)] - 0.3).abs() < 1e-14 && (b[(1, 0)] + 0.3).abs() < 1e-14);
    assert!(m.positive_at(&origin()).unwrap());
    assert!(GeneralizedMetric::new(vec![vec![one.clone(), x.clone()], vec![zero.clone(), one]], Form::zero(cf)).is_err());
}

#[test]
fn point_frame_pairing_has_split_signature() {
    let ch = flat(&["x", "y", "z"]);
    let f = PointFrame::new(&ch, &origin()).unwrap();
    assert_eq!(crate::linalg::signature(&f.pairing), (3, 3, 0));
    let rho = CVec::from_fn(8, |i, _| c(i as f64 + 1.0));
    let v = CVec::from_fn(6, |i, _| c(0.5 - i as f64));
    assert!((f.action(&v) * &rho - action_on(3, &rho) * &v).norm() < 1e-12);
}
