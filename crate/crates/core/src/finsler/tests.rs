use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::kahler::models::{ball_bergman, conformal_exp};
use crate::kahler::{hsc as kahler_hsc, KahlerMetricField};
use crate::point::c;

fn family(a: f64, b: f64) -> ExplicitFamily {
    ExplicitFamily::new(a, b, DomainSpec::unit_ball(2)).unwrap()
}

#[test]
fn eval_examples() {
    let g = family(1.0, 1.0);
    let v = CTangent::new(vec![c(0.3, 0.4), c(-1.0, 0.2)]);
    assert!((g.eval(&CPoint::zeros(2), &v).unwrap() - v.norm_sqr()).abs() < 1e-15);
    let z = CPoint::from_real(&[0.5, 0.0]);
    let e = g.eval(&z, &CTangent::basis(2, 0)).unwrap();
    assert!((e - 0.5f64.exp()).abs() < 1e-15, "{e}");
    let two = g.eval(&z, &v.scale_re(2.0)).unwrap();
    assert!((two - 4.0 * g.eval(&z, &v).unwrap()).abs() < 1e-14 * two);
    assert!(matches!(g.eval(&CPoint::from_real(&[1.0, 0.5]), &v), Err(Error::Domain(_))));
}

#[test]
fn levi_identity_at_origin_and_slit_rejection() {
    for (a, b) in [(1.0, 0.5), (2.0, 0.9), (0.3, 0.0)] {
        let g = family(a, b);
        let v = CTangent::new(vec![c(0.3, 0.4), c(-1.0, 0.2)]);
        let l = levi_matrix(&g, &CPoint::zeros(2), &v).unwrap();
        assert!((l.entries.clone() - DMatrix::identity(2, 2)).norm() < 1e-14);
    }
    let g = family(1.0, 0.5);
    assert!(matches!(levi_matrix(&g, &CPoint::zeros(2), &CTangent::zeros(2)), Err(Error::SlitBundle(_))));
}

#[test]
fn hermitian_levi_is_vector_independent() {
    let g = family(1.3, 0.0);
    let z = CPoint::new(vec![c(0.2, -0.1), c(0.4, 0.3)]);
    let l1 = levi_matrix(&g, &z, &CTangent::new(vec![c(1.0, 0.0), c(0.5, 0.5)])).unwrap();
    let l2 = levi_matrix(&g, &z, &CTangent::new(vec![c(-0.2, 3.0), c(0.0, 0.1)])).unwrap();
    let expect = DMatrix::<C64>::identity(2, 2) * C64::new((1.3 * z.norm_sqr()).exp(), 0.0);
    assert!((l1.entries.clone() - &expect).norm() < 1e-13);
    assert!((l2.entries - expect).norm() < 1e-13);
}

#[test]
fn closed_form_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = DomainSpec::unit_ball(3);
    let g = ExplicitFamily::new(1.0, 0.5, d.clone()).unwrap();
    for _ in 0..20 {
        let z = d.sample_interior(&mut rng, 0.95);
        let v = d.sample_direction(&mut rng).scale(c(0.7, -1.1));
        let exact = g.derivatives(&z, &v).unwrap();
        let fd = fd_derivatives(|a, b| g.eval_unchecked(a, b), &z, &v);
        let r = exact.max_rel_diff(&fd);
        assert!(r < 1e-6, "rel diff {r}");
    }
}

#[test]
fn hermitian_model_derivatives_match_finite_differences() {
    let field: Arc<dyn KahlerMetricField> = Arc::new(ball_bergman(2, 1.0));
    let m = HermitianModel::new(field);
    let z = CPoint::new(vec![c(0.2, -0.1), c(0.4, 0.3)]);
    let v = CTangent::new(vec![c(1.0, 0.2), c(-0.5, 0.5)]);
    let exact = m.derivatives(&z, &v).unwrap();
    let fd = fd_derivatives(|a, b| m.eval_unchecked(a, b), &z, &v);
    assert!(exact.max_rel_diff(&fd) < 1e-6);
}

#[test]
fn poincare_curvature_is_minus_four() {
    let p = HermitianModel::poincare();
    for z in [c(0.0, 0.0), c(0.5, 0.1), c(-0.3, -0.7)] {
        let z = CPoint::new(vec![z]);
        let v = CTangent::new(vec![c(0.3, 2.0)]);
        let k = hsc_chern_finsler(&p, &z, &v).unwrap();
        assert!((k + 4.0).abs() < 1e-12, "{k}");
        let kd = hsc_disc_lower(&p, &z, &v, 1).unwrap();
        assert!((kd + 4.0).abs() < 1e-6, "{kd}");
    }
}

#[test]
fn flat_disc_curvature_vanishes() {
    let d = DomainSpec::unit_ball(2);
    let f = HermitianModel::flat(&d);
    let z = CPoint::new(vec![c(0.1, 0.2), c(0.0, 0.3)]);
    let v = CTangent::new(vec![c(1.0, 0.0), c(0.0, 1.0)]);
    assert!(hsc_disc_lower(&f, &z, &v, 1).unwrap().abs() < 1e-9);
    assert!(hsc_chern_finsler(&f, &z, &v).unwrap().abs() < 1e-12);
}

#[test]
fn hermitian_explicit_curvature_at_origin() {
    let g = family(1.0, 0.0);
    let k = hsc_chern_finsler(&g, &CPoint::zeros(2), &CTangent::basis(2, 0)).unwrap();
    assert!((k + 2.0).abs() < 1e-12, "{k}");
}

#[test]
fn hermitian_reduction_matches_kahler_module() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = DomainSpec::unit_ball(2);
    let a = 1.7;
    let g = ExplicitFamily::new(a, 0.0, d.clone()).unwrap();
    let h = conformal_exp(2, a, Some(d.clone()));
    for _ in 0..20 {
        let z = d.sample_interior(&mut rng, 0.95);
        let v = d.sample_direction(&mut rng);
        let k1 = hsc_chern_finsler(&g, &z, &v).unwrap();
        let k2 = 2.0 * kahler_hsc(&h, &z, &v).unwrap();
        assert!((k1 - k2).abs() < 1e-10, "{k1} {k2}");
        // closed form -2a e^{-a t}
        assert!((k1 + 2.0 * a * (-a * z.norm_sqr()).exp()).abs() < 1e-10);
    }
}

#[test]
fn curvature_scale_invariance() {
    let g = family(1.0, 0.5);
    let z = CPoint::new(vec![c(0.3, -0.2), c(0.1, 0.5)]);
    let v = CTangent::new(vec![c(0.4, 0.1), c(-0.6, 0.9)]);
    let k1 = hsc_chern_finsler(&g, &z, &v).unwrap();
    let k2 = hsc_chern_finsler(&g, &z, &v.scale(c(-3.0, 0.25))).unwrap();
    assert!((k1 - k2).abs() < 1e-8 * k1.abs().max(1.0));
}

#[test]
fn polynomial_discs_reach_chern_finsler_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = DomainSpec::unit_ball(2);
    let g = ExplicitFamily::new(1.0, 0.5, d.clone()).unwrap();
    for _ in 0..4 {
        let z = d.sample_interior(&mut rng, 0.8);
        let v = d.sample_direction(&mut rng);
        let k = hsc_chern_finsler(&g, &z, &v).unwrap();
        let lin = hsc_disc_lower(&g, &z, &v, 1).unwrap();
        let quad = hsc_disc_lower(&g, &z, &v, 2).unwrap();
        assert!(lin <= k + 1e-6 && quad <= k + 1e-6, "{lin} {quad} {k}");
        assert!(quad >= lin);
        assert!((quad - k).abs() < 1e-5 * k.abs().max(1.0), "{quad} vs {k}");
    }
}

#[test]
fn window_violation_reports_without_panicking() {
    let g = family(1.0, 2.0);
    assert!(!g.in_window());
    let r = strong_pseudoconvexity_check(&g, g.host(), 200, 1, 1e-12).unwrap();
    assert!(r.min_eigenvalue.is_finite());
}

#[test]
fn pseudoconvexity_examples() {
    let g = family(1.0, 0.0);
    let r = strong_pseudoconvexity_check(&g, g.host(), 50, 2, 1e-12).unwrap();
    assert!(r.pass && (r.min_eigenvalue - 1.0).abs() < 1e-14 && r.worst_point.is_zero());
    let f = HermitianModel::flat(&DomainSpec::unit_ball(2));
    let r = strong_pseudoconvexity_check(&f, &DomainSpec::unit_ball(2), 50, 2, 1e-12).unwrap();
    assert!((r.min_eigenvalue - 1.0).abs() < 1e-14);
}
