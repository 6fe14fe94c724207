//! Randomized invariants of the algebra, the duality maps and the reports.

use proptest::prelude::*;

use tduality::bundle::{build_dual_chart, BundleChart};
use tduality::courant::{derivation_residual, pairing};
use tduality::duality::{buscher, transport_metric, CircleMetric};
use tduality::exterior::{parse_form, sup_norm, Form, FrameVector, Tag};
use tduality::linalg::{signature, to_complex, CMat};
use tduality::reduction::{reduce_pointwise, LiftedActionPoint};
use tduality::scalar::{equal_numeric, rng, Domain, Point};
use tduality::scenario::{self, random_circle_metric, Flags};
use tduality::structures::{annihilator, gcs_endomorphism, is_nondegenerate, spinor_type, PureSpinor};
use tduality::{models, random};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn hopf4() -> BundleChart {
    models::chart("hopf4").unwrap()
}

fn homogeneous(r: &mut rand_chacha::ChaCha8Rng, ch: &BundleChart, k: usize) -> Form {
    random::form(r, ch.coframe(), &[k], 0.6, true)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn derivative_matches_central_difference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = vec!["t".to_string(), "s".to_string()];
        let e = random::scalar(&mut r, &vars);
        let d = e.diff("t");
        let dom = Domain::new(&[("t", -0.9, 0.9), ("s", 0.1, 6.2)]).unwrap();
        let h = 1e-6;
        for p in dom.sample(&mut r, 16).unwrap() {
            let t = p.get("t").unwrap();
            let shifted = |dt: f64| {
                let mut q = p.clone();
                q.set("t", t + dt);
                e.eval(&q).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let exact = d.eval(&p).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{e}: {fd} vs {exact}");
        }
    }

    #[test]
    fn equal_numeric_is_reflexive_and_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = vec!["t".to_string()];
        let (a, b) = (random::scalar(&mut r, &vars), random::scalar(&mut r, &vars));
        let dom = Domain::new(&[("t", -1.0, 1.0)]).unwrap();
        prop_assert!(equal_numeric(&a, &a, &dom, 16, 1e-12, seed).unwrap());
        prop_assert_eq!(
            equal_numeric(&a, &b, &dom, 16, 1e-9, seed).unwrap(),
            equal_numeric(&b, &a, &dom, 16, 1e-9, seed).unwrap()
        );
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative(seed in any::<u64>(), ka in 0usize..3, kb in 0usize..3) {
        let ch = hopf4();
        let mut r = rng(seed);
        let (a, b, c) = (homogeneous(&mut r, &ch, ka), homogeneous(&mut r, &ch, kb), homogeneous(&mut r, &ch, 1));
        let pts = ch.sample(seed, 4).unwrap();
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(sup_norm(&(&left - &right), &pts).unwrap() < 1e-9);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let swapped = if (ka * kb) % 2 == 0 { ba } else { -&ba };
        prop_assert!(sup_norm(&(&ab - &swapped), &pts).unwrap() < 1e-9);
    }

    #[test]
    fn contraction_is_an_antiderivation(seed in any::<u64>(), ka in 0usize..4) {
        let ch = hopf4();
        let mut r = rng(seed);
        let (a, b) = (homogeneous(&mut r, &ch, ka), homogeneous(&mut r, &ch, 2));
        let x = random::vector(&mut r, ch.coframe(), true);
        let lhs = a.wedge(&b).unwrap().contract(&x).unwrap();
        let first = a.contract(&x).unwrap().wedge(&b).unwrap();
        let second = a.wedge(&b.contract(&x).unwrap()).unwrap();
        let rhs = if ka % 2 == 0 { &first + &second } else { &first - &second };
        prop_assert!(sup_norm(&(&lhs - &rhs), &ch.sample(seed, 4).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn dual_of_dual_returns_the_chart(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dom = Domain::new(&[("t", -0.9, 0.9), ("s", 0.1, 6.2)]).unwrap();
        let cf = BundleChart::make_coframe(&dom, Tag::Fiber, &["theta"]).unwrap();
        let vars = cf.base_vars();
        let c = parse_form(&cf, &format!("(form (term {} dt ds))", random::scalar(&mut r, &vars))).unwrap();
        let h = parse_form(&cf, &format!("(form (term {} dt ds theta))", random::scalar(&mut r, &vars))).unwrap();
        let ch = BundleChart::new("random", cf, dom, vec![c], h).unwrap();
        let (ct, basic) = ch.split_flux().unwrap();
        let theta = Form::gen(ch.coframe(), "theta").unwrap();
        prop_assert_eq!(&(&ct[0].wedge(&theta).unwrap() + &basic), ch.flux());
        let (dual, _) = build_dual_chart(&ch).unwrap();
        let (back, _) = build_dual_chart(&dual).unwrap();
        prop_assert_eq!(back.curvature(0).to_string(), ch.curvature(0).to_string());
        prop_assert_eq!(back.flux().to_string(), ch.flux().to_string());
    }

    #[test]
    fn bracket_is_a_derivation_of_the_pairing(seed in any::<u64>()) {
        let ch = models::chart("hopf3-selfdual").unwrap();
        let mut r = rng(seed);
        let cf = ch.coframe();
        let (v, w1, w2) = (random::section(&mut r, cf, true), random::section(&mut r, cf, true), random::section(&mut r, cf, true));
        prop_assert!(derivation_residual(&v, &w1, &w2, &ch, &ch.sample(seed, 4).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn pure_spinor_invariants(seed in any::<u64>()) {
        let ch = hopf4();
        let mut r = rng(seed);
        let cf = ch.coframe();
        let n = cf.dim();
        let p = &ch.sample(seed, 1).unwrap()[0];
        let b = random::form(&mut r, cf, &[2], 0.5, false);
        let w = random::form(&mut r, cf, &[2], 0.5, false);
        let k = (seed % 3) as usize;
        let mut omega = Form::one(cf);
        for _ in 0..k {
            omega = omega.wedge(&random::form(&mut r, cf, &[1], 0.9, true)).unwrap();
        }
        prop_assume!(omega.eval(p).unwrap().norm() > 1e-6);
        let rho = PureSpinor::from_data(b, w, omega).unwrap().at(p).unwrap();
        let l = annihilator(n, &rho).unwrap();
        prop_assert_eq!(l.ncols(), n);
        let pm = to_complex(&tduality::reduction::pairing_matrix(n));
        prop_assert!((l.transpose() * &pm * &l).norm() < 1e-9);
        let mukai = tduality::pointwise::mukai_value(n, &rho, &rho.map(|z| z.conj()));
        let lbar = l.map(|z| z.conj());
        let both: CMat = tduality::linalg::hcat(&l, &lbar);
        let transversal = tduality::linalg::rank(&both) == 2 * n;
        prop_assert_eq!(transversal, mukai.norm() > 1e-9 * rho.norm_squared());
        prop_assert_eq!(is_nondegenerate(n, &rho).unwrap(), transversal);
        if transversal {
            prop_assert_eq!(spinor_type(&rho).unwrap(), k);
            let j = gcs_endomorphism(n, &rho).unwrap();
            let id = nalgebra::DMatrix::<f64>::identity(2 * n, 2 * n);
            // Near-degenerate spinors give large J, so both identities are compared at the scale |J|².
            let scale = 1.0 + j.norm_squared();
            prop_assert!((&j * &j + &id).abs().max() < 1e-13 * scale);
            let q = tduality::reduction::pairing_matrix(n);
            prop_assert!((j.transpose() * &q * &j - &q).abs().max() < 1e-13 * scale);
        }
    }

    #[test]
    fn phi_is_orthogonal_and_tau_inverts(seed in any::<u64>()) {
        let ch = hopf4();
        let pair = models::dual_pair(&ch).unwrap();
        let mut r = rng(seed);
        let cf = ch.coframe();
        let pts = ch.sample(seed, 4).unwrap();
        let (v, w) = (random::section(&mut r, cf, true), random::section(&mut r, cf, true));
        let defect = &pairing(&pair.phi(&v).unwrap(), &pair.phi(&w).unwrap()).unwrap() - &pairing(&v, &w).unwrap();
        for p in &pts {
            prop_assert!(defect.eval(p).unwrap().norm() <= 1e-9);
        }
        let rho = random::form(&mut r, cf, &(0..=4).collect::<Vec<_>>(), 0.4, true);
        let s = pair.roundtrip_sign().unwrap();
        let back = pair.tau_reverse(&pair.tau(&rho).unwrap()).unwrap().transfer(cf).unwrap();
        prop_assert!(sup_norm(&(&back - &rho.scale(&(s as i64).into())), &pts).unwrap() < 1e-9);
    }

    #[test]
    fn transported_metric_is_the_closed_form_dual(seed in any::<u64>()) {
        let ch = models::chart("hopf3").unwrap();
        let pair = models::dual_pair(&ch).unwrap();
        let m = random_circle_metric(&mut rng(seed), &ch).unwrap();
        let got = CircleMetric::from_metric(&transport_metric(&pair, &m).unwrap()).unwrap();
        let want = buscher(&CircleMetric::from_metric(&m).unwrap()).unwrap();
        let d = ch.domain();
        prop_assert!(equal_numeric(&got.g0, &want.g0, d, 8, 1e-9, seed).unwrap());
        for a in 0..2 {
            prop_assert!(equal_numeric(&got.g1[a], &want.g1[a], d, 8, 1e-9, seed).unwrap());
            prop_assert!(equal_numeric(&got.b1[a], &want.b1[a], d, 8, 1e-9, seed).unwrap());
            for c in 0..2 {
                prop_assert!(equal_numeric(&got.g2[a][c], &want.g2[a][c], d, 8, 1e-9, seed).unwrap());
                prop_assert!(equal_numeric(&got.b2[a][c], &want.b2[a][c], d, 8, 1e-9, seed).unwrap());
            }
        }
    }

    #[test]
    fn reduced_pairing_ignores_the_basis(entries in prop::collection::vec(-1.0f64..1.0, 16), mix in prop::collection::vec(-1.0f64..1.0, 4)) {
        let g = nalgebra::DMatrix::from_vec(8, 2, entries);
        let a = LiftedActionPoint::new(4, g.clone()).unwrap();
        prop_assume!(a.independent());
        let m = nalgebra::DMatrix::from_vec(2, 2, mix) + nalgebra::DMatrix::identity(2, 2) * 3.0;
        let b = LiftedActionPoint::new(4, &g * m).unwrap();
        let (ra, rb) = (reduce_pointwise(&a).unwrap(), reduce_pointwise(&b).unwrap());
        prop_assert_eq!(ra.dim(), rb.dim());
        prop_assert_eq!(ra.signature, rb.signature);
        prop_assert_eq!(signature(&to_complex(&ra.induced_pairing)), ra.signature);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn reports_are_deterministic(seed in 0u64..1000) {
        let flags = Flags { seed: Some(seed), samples: Some(3), ..Flags::default() };
        for name in ["s2-annulus", "buscher-random"] {
            let a = scenario::run(name, &flags).unwrap().to_json_lines();
            let b = scenario::run(name, &flags).unwrap().to_json_lines();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn basis_vectors_contract_to_one() {
    let ch = hopf4();
    let cf = ch.coframe();
    for i in 0..cf.dim() {
        let e = Form::monomial(cf, 1 << i, 1.into());
        let c = e.contract(&FrameVector::unit(cf, i)).unwrap().coeff(0);
        assert_eq!(c.eval(&Point::new()).unwrap().re, 1.0);
    }
}
