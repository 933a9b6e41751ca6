use super::*;
use crate::bergman::{build_numerical_kernel, BergmanMetricField, QuadratureSpec};
use crate::finsler::ExplicitFamily;
use crate::kahler::models;
use crate::point::c;

fn bergman_model(d: &DomainSpec) -> Arc<dyn FinslerMetricModel> {
    Arc::new(HermitianModel::new(Arc::new(BergmanMetricField::closed_form(d).unwrap())))
}

fn explicit(d: &DomainSpec) -> Arc<dyn FinslerMetricModel> {
    Arc::new(ExplicitFamily::new(1.0, 0.5, d.clone()).unwrap())
}

fn ball_config() -> EquivalenceConfig {
    EquivalenceConfig { c: 0.3, k: 0.8, a: 4.0 / 3.0, b: 4.0 / 3.0, c1: 4.0 / 3.0 }
}

#[test]
fn config_constants_and_windows() {
    let cfg = ball_config();
    assert!((cfg.c2() - (4.0 / 3.0) / (0.8 / 0.3 - 4.0 / 3.0)).abs() < 1e-15);
    assert!((cfg.c3() - (4.0 / 3.0) / (4.0 / 0.3 - 4.0 / 3.0)).abs() < 1e-15);
    assert!(cfg.check_sandwich_window().is_ok());
    for bad in [0.0, -1.0, 0.61, 5.0] {
        let e = EquivalenceConfig { c: bad, ..cfg }.check_sandwich_window().unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("T6.4")), "{e}");
    }
    assert!(EquivalenceConfig { c: 2.9, ..cfg }.check_caratheodory_window().is_ok());
    assert!(matches!(EquivalenceConfig { c: 3.0, ..cfg }.check_caratheodory_window(), Err(Error::Config(_))));
}

#[test]
fn measured_windows() {
    let d = DomainSpec::unit_ball(2);
    let w = measure_curvature_window(explicit(&d).as_ref(), &d, 200, 1).unwrap();
    assert!(w.is_negative() && w.b() > 0.0);
    let wb = measure_curvature_window(bergman_model(&d).as_ref(), &d, 200, 1).unwrap();
    assert!((wb.a() - 4.0 / 3.0).abs() < 1e-6 && (wb.b() - 4.0 / 3.0).abs() < 1e-6);
    let flat = HermitianModel::flat(&d);
    let wf = measure_curvature_window(&flat, &d, 50, 1).unwrap();
    assert!(!wf.is_negative());
    assert!(matches!(wf.require_negative("flat"), Err(Error::Precondition(_))));
    assert!(matches!(measure_curvature_window(&flat, &d, 0, 1), Err(Error::Input(_))));
    // Same seed, same window.
    assert_eq!(wb, measure_curvature_window(bergman_model(&d).as_ref(), &d, 200, 1).unwrap());
}

#[test]
fn disk_bergman_is_twice_the_kahler_sectional() {
    // The Kähler module reports Sec = -1 on the disk; here the same metric reads -2.
    let d = DomainSpec::unit_disk();
    let w = measure_curvature_window(bergman_model(&d).as_ref(), &d, 20, 4).unwrap();
    assert!((w.a() - 2.0).abs() < 1e-6 && (w.b() - 2.0).abs() < 1e-6);
}

#[test]
fn h_at_origin_and_homogeneity() {
    let d = DomainSpec::unit_ball(2);
    let cfg = ball_config();
    let h = build_h(explicit(&d), bergman_model(&d), &cfg).unwrap();
    let z = CPoint::zeros(2);
    let v = CTangent::new(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    assert!((h.eval(&z, &v).unwrap() - (cfg.c + 3.0)).abs() < 1e-12);
    let z = CPoint::new(vec![c(0.2, -0.1), c(0.3, 0.4)]);
    let lam = c(-1.3, 0.7);
    let lhs = h.eval(&z, &v.scale(lam)).unwrap();
    let rhs = lam.norm_sqr() * h.eval(&z, &v).unwrap();
    assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    assert!(matches!(build_h(explicit(&d), bergman_model(&d), &EquivalenceConfig { c: 1.0, ..cfg }), Err(Error::Config(_))));
}

#[test]
fn tiny_c_collapses_to_bergman() {
    let d = DomainSpec::unit_ball(2);
    let cfg = EquivalenceConfig { c: 1e-9, ..ball_config() };
    let gb = bergman_model(&d);
    let h = build_h(explicit(&d), gb.clone(), &cfg).unwrap();
    let r = verify_sandwich(&h, gb.as_ref(), &cfg, 50, 2).unwrap();
    assert!(r.ratio_max.value - 1.0 < 1e-7 && r.lower.passed() && r.min_excess >= -1e-12);
}

#[test]
fn sandwich_lower_side_is_exact() {
    for d in [DomainSpec::unit_ball(2), DomainSpec::polydisk(vec![1.0, 1.0]).unwrap()] {
        let r = sandwich_suite(explicit(&d), bergman_model(&d), &d, 0.5, 200, 9).unwrap();
        assert!(r.lower.passed() && r.min_excess >= -1e-12, "{r:?}");
        // C G > 0 at every sample, so the ratio exceeds one strictly.
        assert!(r.ratio_min.value > 1.0);
        assert_eq!(r.config.c, 0.5 * r.config.k / r.config.b);
    }
}

#[test]
fn sandwich_upper_constant_collapses_on_the_ball() {
    // With measured B = C1 = 4/3 and C = K/(2B), C2 = C1/B = 1, which no H = C G + g_B
    // with G > 0 can meet.
    let d = DomainSpec::unit_ball(2);
    let r = sandwich_suite(explicit(&d), bergman_model(&d), &d, 0.5, 200, 9).unwrap();
    assert!((r.c2 - 1.0).abs() < 1e-6);
    assert_eq!(r.upper, Verdict::Fail);
}

#[test]
fn sandwich_is_deterministic() {
    let d = DomainSpec::polydisk(vec![1.0, 1.0]).unwrap();
    let a = sandwich_suite(explicit(&d), bergman_model(&d), &d, 0.5, 100, 5).unwrap();
    let b = sandwich_suite(explicit(&d), bergman_model(&d), &d, 0.5, 100, 5).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn oversized_c_rejected_before_sampling() {
    let d = DomainSpec::unit_ball(2);
    let cfg = EquivalenceConfig { c: 10.0, ..ball_config() };
    let gb = bergman_model(&d);
    let h = SumModel::new(vec![(10.0, explicit(&d)), (1.0, gb.clone())]);
    assert!(matches!(verify_sandwich(&h, gb.as_ref(), &cfg, 0, 1), Err(Error::Config(_))));
}

#[test]
fn schwarz_examples() {
    let disk = DomainSpec::unit_disk();
    let p = HermitianModel::poincare();
    let r = schwarz_check(&disk, &p, 4.0, &p, 4.0, 100, 1, 1e-8).unwrap();
    assert!((r.max_ratio.value - 1.0).abs() < 1e-12 && r.verdict.passed());

    let ball = DomainSpec::unit_ball(2);
    let gb = bergman_model(&ball);
    let kob = InvariantSquared::kobayashi(ball.clone());
    let r = schwarz_check(&ball, gb.as_ref(), 4.0 / 3.0, &kob, 4.0, 200, 1, 1e-8).unwrap();
    assert!((r.max_ratio.value - 1.0).abs() < 1e-8, "{r:?}");
    assert!(r.verdict.passed());

    let g = explicit(&ball);
    let k2 = measure_curvature_window(g.as_ref(), &ball, 300, 8).unwrap().b();
    let r = schwarz_check(&ball, gb.as_ref(), 4.0 / 3.0, g.as_ref(), k2, 300, 1, 1e-8).unwrap();
    assert!(r.verdict.passed(), "{r:?}");

    assert!(matches!(schwarz_check(&disk, &p, 4.0, &p, 0.0, 10, 1, 1e-8), Err(Error::Input(_))));
}

#[test]
fn kobayashi_squared_has_curvature_minus_four() {
    let ball = DomainSpec::unit_ball(2);
    let kob = InvariantSquared::kobayashi(ball.clone());
    for (z, v) in point_vector_pairs(&ball, 5, 0.7, 3) {
        let k = hsc_chern_finsler(&kob, &z, &v).unwrap();
        assert!((k + 4.0).abs() < 1e-3, "{k}");
    }
}

#[test]
fn completeness_of_the_disk() {
    let disk = DomainSpec::unit_disk();
    let eps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let gb = bergman_model(&disk);
    let r = completeness_probe(gb.as_ref(), &disk, &[CTangent::new(vec![c(1.0, 0.0)])], &eps).unwrap();
    let ray = &r.rays[0];
    for (e, l) in ray.epsilons.iter().zip(&ray.lengths) {
        let exact = 2f64.sqrt() * (1.0 - e).atanh();
        assert!((l - exact).abs() < 1e-9 * exact, "{l} vs {exact}");
    }
    assert!((ray.slope / (0.5 * 2f64.sqrt()) - 1.0).abs() < 0.02);
    assert!(r.divergent && r.min_r_squared > 0.99 && r.warnings.is_empty());

    let flat = HermitianModel::flat(&disk);
    let r = completeness_probe(&flat, &disk, &[CTangent::new(vec![c(0.0, 1.0)])], &eps).unwrap();
    assert!(!r.divergent);
    assert!(r.rays[0].lengths.iter().all(|l| *l < 1.0));
}

#[test]
fn completeness_of_h_on_the_ball() {
    let d = DomainSpec::unit_ball(2);
    let h = build_h(explicit(&d), bergman_model(&d), &ball_config()).unwrap();
    let eps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let dirs = vec![
        CTangent::new(vec![c(1.0, 0.0), c(0.0, 0.0)]),
        CTangent::new(vec![c(0.3, 0.4), c(-0.5, 0.2)]),
    ];
    let r = completeness_probe(&h, &d, &dirs, &eps).unwrap();
    assert!(r.divergent && r.min_slope > 0.0 && r.min_r_squared > 0.99, "{r:?}");
    assert!(matches!(completeness_probe(&h, &d, &dirs, &[1e-3, 1e-2]), Err(Error::Input(_))));
}

#[test]
fn ball_kobayashi_is_a_bergman_multiple() {
    for n in 1..=3 {
        let d = DomainSpec::unit_ball(n);
        let h = Arc::new(BergmanMetricField::closed_form(&d).unwrap());
        let r = kobayashi_kahler_equivalence(&d, h, 60, SAMPLE_GAUGE, 2, 1e-6).unwrap();
        let target = 1.0 / (n + 1) as f64;
        assert!(r.verdict.passed(), "{r:?}");
        assert!((r.lower_ratio.as_ref().unwrap().value - target).abs() < 1e-6);
        assert!((r.upper_ratio.as_ref().unwrap().value - target).abs() < 1e-6);
    }
    let disk = DomainSpec::unit_disk();
    let r = kobayashi_kahler_equivalence(&disk, Arc::new(models::poincare_disk()), 60, SAMPLE_GAUGE, 2, 1e-10).unwrap();
    assert!(r.verdict.passed());
    assert!((r.upper_ratio.unwrap().value - 1.0).abs() < 1e-10);
}

#[test]
fn kobayashi_kahler_flat_is_a_precondition_violation() {
    let d = DomainSpec::unit_ball(2);
    let mut f = models::flat(2);
    f.set_domain(Some(d.clone()));
    let r = kobayashi_kahler_equivalence(&d, Arc::new(f), 20, SAMPLE_GAUGE, 2, 1e-6).unwrap();
    assert_eq!(r.verdict, Verdict::PreconditionViolation);
}

#[test]
fn kobayashi_kahler_on_an_ellipsoid() {
    let d = DomainSpec::ellipsoid(vec![1.0, 1.2]).unwrap();
    let kernel = build_numerical_kernel(&d, 24, QuadratureSpec::for_degree(24)).unwrap();
    let h = Arc::new(BergmanMetricField::new(kernel));
    let r = kobayashi_kahler_equivalence(&d, h, 40, 0.6, 3, 1e-6).unwrap();
    assert!(r.verdict.passed(), "{r:?}");
}

#[test]
fn caratheodory_comparison_on_the_ball() {
    let d = DomainSpec::unit_ball(2);
    let h = || Arc::new(BergmanMetricField::closed_form(&d).unwrap()) as Arc<dyn KahlerMetricField>;
    // H = (C/3 + 1) g_B and C3 = C/(3 - C): the upper side holds iff C^2 + 3C >= 9.
    let r = caratheodory_h_check(&d, h(), 2.5, 100, 1, 1e-8).unwrap();
    assert!((r.ratio_max.value - (2.5 / 3.0 + 1.0)).abs() < 1e-9);
    assert!((r.c3 - 2.5 / 0.5).abs() < 1e-6);
    assert!(r.verdict().passed());
    let r = caratheodory_h_check(&d, h(), 1.0, 100, 1, 1e-8).unwrap();
    assert!(r.lower.passed());
    assert_eq!(r.upper, Verdict::Fail);
    assert!(matches!(caratheodory_h_check(&d, h(), 3.5, 10, 1, 1e-8), Err(Error::Config(_))));
    let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    assert!(matches!(caratheodory_h_check(&e, h(), 1.0, 10, 1, 1e-8), Err(Error::UnsupportedDomain(_))));
}

#[test]
fn caratheodory_comparison_on_the_disk() {
    let d = DomainSpec::unit_disk();
    for (cc, pass) in [(0.8, true), (0.5, false)] {
        let r = caratheodory_h_check(&d, Arc::new(models::poincare_disk()), cc, 50, 1, 1e-8).unwrap();
        assert!((r.c3 - cc / (1.0 - cc)).abs() < 1e-6);
        assert_eq!(r.verdict().passed(), pass);
    }
}

#[test]
fn distance_comparison_examples() {
    let disk = DomainSpec::unit_disk();
    let pairs = vec![
        (CPoint::new(vec![c(0.0, 0.0)]), CPoint::new(vec![c(0.7, 0.0)])),
        (CPoint::new(vec![c(-0.3, 0.0)]), CPoint::new(vec![c(0.5, 0.0)])),
        (CPoint::new(vec![c(0.1, 0.2)]), CPoint::new(vec![c(-0.4, 0.5)])),
    ];
    let r = distance_comparison_check(&disk, &HermitianModel::poincare(), 4.0, &pairs, 1e-9).unwrap();
    for p in &r.pairs[..2] {
        assert!((p.ratio - 1.0).abs() < 1e-9 && p.verdict.passed(), "{p:?}");
    }
    // Off a diameter the segment is longer than the geodesic, so nothing is certified.
    assert!(r.pairs[2].ratio < 1.0);
    assert_eq!(r.pairs[2].verdict, Verdict::Inconclusive);
    assert_eq!(r.verdict, Verdict::Inconclusive);

    let ball = DomainSpec::unit_ball(2);
    let pairs = vec![(CPoint::zeros(2), CPoint::new(vec![c(0.3, 0.1), c(-0.2, 0.5)]))];
    let r = distance_comparison_check(&ball, bergman_model(&ball).as_ref(), 4.0 / 3.0, &pairs, 1e-9).unwrap();
    assert!((r.pairs[0].ratio - 1.0).abs() < 1e-9 && r.verdict.passed());

    let poly = DomainSpec::polydisk(vec![1.0, 1.0]).unwrap();
    let pairs = vec![(CPoint::zeros(2), CPoint::new(vec![c(0.3, 0.0), c(0.1, 0.0)]))];
    let r = distance_comparison_check(&poly, bergman_model(&poly).as_ref(), 1.0, &pairs, 1e-9).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
}
