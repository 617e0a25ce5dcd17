use std::f64::consts::PI;

use cqg_core::fields::{continuity_residual, hje_residual, integrate_trajectory, TrajectoryStatus, Units};
use cqg_core::geometry::{gauge_transform, GaugeFunction, WeylFrame};
use cqg_core::numerics::{tensor_quadrature, RandomStream};
use cqg_core::spin_states::{
    action_spin_up, d_down, d_up, product_wave, single_wave, singlet_angular_density, SpinorEnvelope,
};
use cqg_core::{EulerTriple, FiniteDiff, GyrationScale, MetricChart, QuadratureSpec, TwoParticleAngles, WaveField};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fd() -> FiniteDiff {
    FiniteDiff::default()
}

#[test]
fn haar_integrals() {
    let q = QuadratureSpec::normalized_haar(8, 8, 8).unwrap();
    let z = |p: &[f64]| EulerTriple::from_coords(p);
    let up = tensor_quadrature(|p| d_up(&z(p)).norm_sqr(), &q).unwrap();
    let down = tensor_quadrature(|p| d_down(&z(p)).norm_sqr(), &q).unwrap();
    let cross_re = tensor_quadrature(|p| (d_up(&z(p)) * d_down(&z(p)).conj()).re, &q).unwrap();
    let cross_im = tensor_quadrature(|p| (d_up(&z(p)) * d_down(&z(p)).conj()).im, &q).unwrap();
    assert!((up - 0.5).abs() < 1e-12 && (down - 0.5).abs() < 1e-12);
    assert!(cross_re.abs() < 1e-12 && cross_im.abs() < 1e-12);

    let pair = QuadratureSpec::normalized_haar_pair(6, 6, 6).unwrap();
    let singlet = tensor_quadrature(
        |p| singlet_angular_density(&TwoParticleAngles::new(z(&p[..3]), z(&p[3..]))),
        &pair,
    )
    .unwrap();
    assert!((singlet - 0.25).abs() < 1e-12, "{singlet}");
}

#[test]
fn product_action_gradient_is_additive() {
    let a = GyrationScale::new(1.1).unwrap();
    let (ka, kb) = ([0.3, 0.0, -0.4], [0.1, 0.5, 0.2]);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let prod = product_wave(a, SpinorEnvelope::plane_wave(ka, one, zero), SpinorEnvelope::plane_wave(kb, zero, one));
    let left = single_wave(a, SpinorEnvelope::plane_wave(ka, one, zero));
    let right = single_wave(a, SpinorEnvelope::plane_wave(kb, zero, one));
    let units = Units::default();
    for stream in 0..20 {
        let u = RandomStream::new(5, stream).random_uniform(12);
        let point = |v: &[f64]| vec![v[0], v[1], v[2], 2.0 * PI * v[3], 0.3 + 2.5 * v[4], 4.0 * PI * v[5]];
        let (qa, qb) = (point(&u[..6]), point(&u[6..]));
        let q: Vec<f64> = qa.iter().chain(&qb).copied().collect();
        let g = prod.action(0.0).gradient(&q, &fd(), prod.chart().ranges(), &units).unwrap();
        let ga = left.action(0.0).gradient(&qa, &fd(), left.chart().ranges(), &units).unwrap();
        let gb = right.action(0.0).gradient(&qb, &fd(), right.chart().ranges(), &units).unwrap();
        for (x, y) in g.iter().zip(ga.iter().chain(&gb)) {
            assert!((x - y).abs() < 1e-9, "{x} {y}");
        }
    }
}

#[test]
fn spin_up_action_matches_wave_phase() {
    let units = Units::default();
    let psi = single_wave(GyrationScale::default(), SpinorEnvelope::constant(c(1.0, 0.0), c(0.0, 0.0)));
    let q = [0.0, 0.0, 0.0, 0.7, 1.3, 2.1];
    let g = psi.action(0.0).gradient(&q, &fd(), psi.chart().ranges(), &units).unwrap();
    let z = EulerTriple::from_coords(&q[3..]);
    let h = 1e-6;
    let shifted = EulerTriple::new(z.alpha + h, z.beta, z.gamma).unwrap();
    let ds = (action_spin_up(&shifted, 0.0, 1.0).unwrap() - action_spin_up(&z, 0.0, 1.0).unwrap()) / h;
    assert!((g[3] - ds).abs() < 1e-6 && (g[3] - 0.5).abs() < 1e-9);
}

#[test]
fn residuals_transform_with_the_gauge() {
    let chart = MetricChart::flat(4);
    let psi = WaveField::new(chart.clone(), |q, _| {
        Complex64::from_polar(1.2 + 0.3 * (q[0] - q[2]).sin(), 0.4 * q[1] + 0.2 * q[3] * q[0])
    });
    let rho = psi.density(0.0);
    let frame = WeylFrame::from_density(chart.clone(), rho.clone(), fd());
    let lambda = GaugeFunction::random_smooth(17, 3, 4);
    let q = [0.2, -0.4, 0.6, 0.1];
    let b = gauge_transform(&rho, &psi, &frame, &lambda, &[q.to_vec()], &fd()).unwrap();
    let l = lambda.value(&q).unwrap();
    let units = Units::default();
    let hje0 = hje_residual(&chart, &rho, &psi.action(0.0), &q, &fd(), &units).unwrap();
    let hje1 = hje_residual(&b.chart, &b.rho, &b.psi.action(0.0), &q, &fd(), &units).unwrap();
    assert!((hje1 - hje0 / l).abs() < 1e-6, "{hje0} {hje1}");
    let c0 = continuity_residual(&chart, &rho, &psi.action(0.0), &q, &fd(), &units).unwrap();
    let c1 = continuity_residual(&b.chart, &b.rho, &b.psi.action(0.0), &q, &fd(), &units).unwrap();
    assert!(c0.abs() > 1e-3);
    assert!((c1 - c0 / (l * l)).abs() < 1e-6, "{c0} {c1}");
}

#[test]
fn spin_up_trajectory_winds_at_constant_rate() {
    let a = 1.3;
    let psi = single_wave(GyrationScale::new(a).unwrap(), SpinorEnvelope::constant(c(1.0, 0.0), c(0.0, 0.0)));
    let beta = 1.1f64;
    let q0 = [0.0, 0.0, 0.0, 0.2, beta, 0.5];
    let (steps, dt) = (40, 0.05);
    let path = integrate_trajectory(psi.chart(), &psi.action(0.0), &q0, steps, dt, &fd(), &Units::default()).unwrap();
    assert_eq!(path.status, TrajectoryStatus::Complete);
    let rate = 1.0 / (2.0 * a * a * (1.0 + beta.cos()));
    let end = path.points.last().unwrap();
    let alpha = (0.2 + rate * steps as f64 * dt).rem_euclid(2.0 * PI);
    assert!((end[3] - alpha).abs() < 1e-8 && (end[4] - beta).abs() < 1e-10);
    assert!(end[..3].iter().all(|x| x.abs() < 1e-12));
}
