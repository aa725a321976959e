//! End-to-end geodesic integration on the moduli space: translation
//! invariance for one vortex, and the right-angle scattering of two vortices
//! through a head-on collision, crossing both chart transitions.

use num_complex::Complex64;
use vortexlab::moduli::{
    integrate_geodesic, Chart, GeodesicOptions, ModuliOptions, TangentBasis,
};
use vortexlab::TorusGrid;

#[test]
fn single_vortex_geodesic_is_a_straight_line() {
    // The one-vortex moduli space is the torus with (a multiple of) the flat
    // metric, so geodesics are straight lines traversed at constant speed.
    let g = TorusGrid::new(32, 32, 8.0, 8.0).unwrap();
    let z0 = Complex64::new(4.0, 4.0);
    let v0 = Complex64::new(0.3, 0.1);
    let opts = GeodesicOptions {
        dtau: 0.25,
        ..Default::default()
    };
    let points = integrate_geodesic(&g, &[z0], &[v0], 1.0, &opts).unwrap();
    let last = points.last().unwrap();
    let expect = z0 + v0;
    assert!(
        (last.zeros[0] - expect).norm() < 1e-3,
        "endpoint {} vs straight-line {}",
        last.zeros[0],
        expect
    );
    let speed0 = (points[0].u_dot[0].powi(2) + points[0].u_dot[1].powi(2)).sqrt();
    let speed1 = (last.u_dot[0].powi(2) + last.u_dot[1].powi(2)).sqrt();
    assert!(
        (speed1 / speed0 - 1.0).abs() < 1e-4,
        "speed drifted {speed0} -> {speed1}"
    );
}

#[test]
fn head_on_collision_scatters_at_right_angles() {
    // Two vortices approaching head-on along x pass through coincidence and
    // separate along y. In the polynomial-coefficient chart this is just a
    // straight line through the origin; in position terms it is the famous
    // 90-degree scattering. The trajectory crosses into the coefficient
    // chart near the collision and back out afterwards.
    let g = TorusGrid::new(48, 48, 10.0, 10.0).unwrap();
    let z1 = Complex64::new(3.5, 5.0);
    let z2 = Complex64::new(6.5, 5.0);
    let v = 0.7;
    let opts = GeodesicOptions {
        dtau: 0.2,
        ..Default::default()
    };
    let points = integrate_geodesic(
        &g,
        &[z1, z2],
        &[Complex64::new(v, 0.0), Complex64::new(-v, 0.0)],
        4.0,
        &opts,
    )
    .unwrap();

    // The coefficient chart must actually have been visited.
    assert!(
        points.iter().any(|p| p.chart == Chart::Coefficients),
        "trajectory never entered the coefficient chart"
    );
    assert!(
        points.last().unwrap().chart == Chart::Positions,
        "trajectory should leave the coefficient chart after separating"
    );

    // Center of mass is conserved by the reflection symmetries.
    for p in &points {
        let com = 0.5 * (p.zeros[0] + p.zeros[1]);
        assert!(
            (com - Complex64::new(5.0, 5.0)).norm() < 0.02,
            "center of mass drifted to {com} at tau {}",
            p.tau
        );
    }

    // Incoming: along the x axis (the collision happens near tau = 1.3).
    for p in points.iter().filter(|p| p.tau < 1.0) {
        assert!(
            (p.zeros[0].im - 5.0).abs() < 0.02 && (p.zeros[1].im - 5.0).abs() < 0.02,
            "incoming leg should stay on the x axis, got {:?} at tau {}",
            p.zeros,
            p.tau
        );
    }

    // Outgoing: along the y axis, well separated.
    let last = points.last().unwrap();
    let sep = (last.zeros[0] - last.zeros[1]).norm();
    assert!(
        sep > 1.0,
        "vortices failed to separate after the collision (sep {sep})"
    );
    for z in &last.zeros {
        assert!(
            (z.re - 5.0).abs() < 0.1,
            "outgoing motion should be along y, final zeros {:?}",
            last.zeros
        );
        assert!(
            (z.im - 5.0).abs() > 0.5,
            "outgoing zeros should have left the collision point, got {:?}",
            last.zeros
        );
    }

    // Geodesic energy 1/2 udot^T g udot is conserved (chart-independent).
    let energy = |p: &vortexlab::moduli::GeodesicPoint| -> f64 {
        let basis =
            TangentBasis::compute(&g, p.chart, &p.u, &ModuliOptions::default()).unwrap();
        let metric = basis.metric();
        let mut e = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                e += 0.5 * metric[(a, b)] * p.u_dot[a] * p.u_dot[b];
            }
        }
        e
    };
    let e0 = energy(&points[0]);
    let e1 = energy(points.last().unwrap());
    assert!(
        (e1 / e0 - 1.0).abs() < 0.01,
        "geodesic energy drifted {e0} -> {e1}"
    );
}
