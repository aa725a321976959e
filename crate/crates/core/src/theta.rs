//! Jacobi theta function and the singular carrier section.
//!
//! A holomorphic section of the degree-`d` bundle with prescribed zeros
//! `z_1..z_d` is assembled from the odd theta function
//!
//! ```text
//! theta_1(w | tau) = 2 Sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) w),
//! q = exp(i pi tau),  tau = i ly/lx,
//! ```
//!
//! which vanishes simply at the lattice `w = pi Z + pi tau Z`. The carrier is
//!
//! ```text
//! Phi_sing(z) = Prod_k theta_1(pi (z - z_k)/lx)
//!               * exp( i pi d z/lx - pi d y^2/(lx ly) + rho_c y - i phi_c y/ly ),
//! rho_c = pi d/lx + 2 pi Y/(lx ly),   phi_c = pi d + 2 pi X/lx,
//! (X, Y) = (Re, Im) of Sum_k z_k,
//! ```
//!
//! which is exactly periodic in x and picks up exactly the transition factor
//! `exp(-2 pi i d x/lx)` across the y seam -- the constants `rho_c, phi_c`
//! cancel the moduli-dependent part of the theta quasi-periodicity. Because
//! the non-holomorphic exponent depends on y alone (and at most quadratically),
//! the connection that annihilates `Phi_sing` under the anti-holomorphic
//! covariant derivative is *constant plus the reference slope*:
//!
//! ```text
//! a1_sing = (2 pi d/area) y - rho_c,      a2_sing = phi_c / ly .
//! ```
//!
//! No theta derivatives are ever needed. All downstream vortex solving reduces
//! to a scalar equation for `v` with `|Phi_sing|^2` as coefficient data.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::par;

/// Theta-function evaluator for the rectangular modulus `tau = i ly/lx`.
#[derive(Debug, Clone)]
pub(crate) struct Theta {
    /// `Im tau = ly/lx`.
    tau_im: f64,
    /// Nome `q = exp(-pi ly/lx)`.
    q: f64,
}

impl Theta {
    pub(crate) fn new(lx: f64, ly: f64) -> Self {
        let tau_im = ly / lx;
        Self {
            tau_im,
            q: (-PI * tau_im).exp(),
        }
    }

    /// `theta_1(w)` for arbitrary complex `w`, reduced to the fundamental cell
    /// `|Re w| <= pi/2`, `|Im w| <= pi Im(tau)/2` before summing, so the series
    /// needs only a handful of terms at any argument.
    ///
    /// Quasi-periodicity used for the reduction:
    /// `theta_1(w + pi) = -theta_1(w)`,
    /// `theta_1(w + n pi tau) = (-1)^n q^{-n^2} exp(-2 i n w) theta_1(w)`.
    pub(crate) fn theta1(&self, w: Complex64) -> Complex64 {
        let m = (w.re / PI).round();
        let w1 = Complex64::new(w.re - m * PI, w.im);
        let n = (w1.im / (PI * self.tau_im)).round();
        let w0 = Complex64::new(w1.re, w1.im - n * PI * self.tau_im);

        // theta_1(w) = (-1)^{m+n} q^{-n^2} exp(-2 i n w0) theta_1(w0)
        let mut series = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for k in 0..24u32 {
            let e = (k as f64 + 0.5) * (k as f64 + 0.5);
            let coeff = self.q.powf(e);
            let term = sign * coeff * ((2.0 * k as f64 + 1.0) * w0).sin();
            series += term;
            if coeff < 1e-20 {
                break;
            }
            sign = -sign;
        }
        series *= 2.0;

        let mut pref = Complex64::new(1.0, 0.0);
        if n != 0.0 {
            pref = self.q.powf(-n * n) * (Complex64::new(0.0, -2.0 * n) * w0).exp();
            if (n as i64) % 2 != 0 {
                pref = -pref;
            }
        }
        if (m as i64) % 2 != 0 {
            pref = -pref;
        }
        pref * series
    }
}

/// The singular carrier: values of `Phi_sing` on the grid (normalized to unit
/// sup so downstream exponentials stay tame) and the constant parts of its
/// annihilating connection.
#[derive(Debug, Clone)]
pub(crate) struct Carrier {
    /// `|Phi_sing|` sup-normalized section values.
    pub phi: Vec<Complex64>,
    /// `a1_sing(y) = slope * y + a1_const`.
    pub a1_slope: f64,
    pub a1_const: f64,
    /// `a2_sing` is constant.
    pub a2_const: f64,
}

/// Evaluate the carrier for zeros `zs` (lifted representatives in the plane;
/// only their images on the torus matter up to an irrelevant constant gauge
/// phase).
pub(crate) fn carrier(grid: &TorusGrid, zs: &[Complex64]) -> Result<Carrier> {
    if zs.is_empty() {
        return Err(Error::Domain("carrier needs at least one zero".into()));
    }
    for z in zs {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain("zero positions must be finite".into()));
        }
    }
    let d = zs.len() as f64;
    let (lx, ly) = (grid.lx(), grid.ly());
    let sum: Complex64 = zs.iter().sum();
    let (xx, yy) = (sum.re, sum.im);
    let rho_c = PI * d / lx + 2.0 * PI * yy / (lx * ly);
    let phi_c = PI * d + 2.0 * PI * xx / lx;

    let theta = Theta::new(lx, ly);
    let mut phi = vec![Complex64::new(0.0, 0.0); grid.len()];
    let nx = grid.nx();
    par::for_each_row(&mut phi, nx, |j, row| {
        let y = grid.y(j);
        // exp(i pi d z/lx) = exp(i pi d x/lx) exp(-pi d y/lx): split the
        // exponent into its y-only magnitude and the phase.
        let mag = (-PI * d * y / lx - PI * d * y * y / (lx * ly) + rho_c * y).exp();
        let phase_y = -phi_c * y / ly;
        for (i, v) in row.iter_mut().enumerate() {
            let x = grid.x(i);
            let z = Complex64::new(x, y);
            let mut p = Complex64::new(1.0, 0.0);
            for zk in zs {
                p *= theta.theta1(PI * (z - zk) / lx);
            }
            *v = p * Complex64::from_polar(mag, PI * d * x / lx + phase_y);
        }
    });

    // Sup-normalize.
    let sup = crate::field::sup_c(&phi);
    if !(sup > 0.0) {
        return Err(Error::Inconsistency(
            "carrier section vanished identically".into(),
        ));
    }
    let inv = 1.0 / sup;
    par::for_each_row(&mut phi, nx, |_j, row| {
        for v in row.iter_mut() {
            *v *= inv;
        }
    });

    Ok(Carrier {
        phi,
        a1_slope: 2.0 * PI * d / grid.area(),
        a1_const: -rho_c,
        a2_const: phi_c / ly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_is_odd_and_vanishes_at_origin() {
        let t = Theta::new(3.0, 4.0);
        for w in [
            Complex64::new(0.3, 0.2),
            Complex64::new(-1.2, 2.9),
            Complex64::new(5.0, -3.3),
        ] {
            let a = t.theta1(w);
            let b = t.theta1(-w);
            assert!((a + b).norm() < 1e-12 * a.norm().max(1.0));
        }
        assert!(t.theta1(Complex64::new(0.0, 0.0)).norm() < 1e-15);
        // simple zero: theta(eps) ~ eps * theta'(0)
        let eps = 1e-6;
        let v = t.theta1(Complex64::new(eps, 0.0));
        assert!(v.norm() > 0.1 * eps && v.norm() < 10.0 * eps);
    }

    #[test]
    fn theta_quasi_periodicity() {
        let t = Theta::new(2.0, 3.0);
        let tau = Complex64::new(0.0, 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let w = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let base = t.theta1(w);
            // theta(w + pi) = -theta(w)
            let shifted = t.theta1(w + PI);
            assert!((shifted + base).norm() < 1e-11 * base.norm().max(1.0));
            // theta(w + pi tau) = -q^{-1} exp(-2 i w) theta(w)
            let shifted2 = t.theta1(w + PI * tau);
            let expect = -(1.0 / t.q) * (Complex64::new(0.0, -2.0) * w).exp() * base;
            assert!(
                (shifted2 - expect).norm() < 1e-10 * expect.norm().max(1.0),
                "{shifted2} vs {expect}"
            );
        }
    }

    #[test]
    fn carrier_satisfies_the_section_cocycle() {
        // Evaluate the analytic formula at shifted arguments and check the
        // seam factors: periodic in x, transition exp(-2 pi i d x / lx) in y.
        let grid = TorusGrid::new(16, 16, 5.0, 4.0).unwrap();
        let zs = [
            Complex64::new(1.3, 0.7),
            Complex64::new(3.9, 2.2),
            Complex64::new(2.0, 3.8),
        ];
        let d = zs.len() as f64;
        let (lx, ly) = (grid.lx(), grid.ly());
        let sum: Complex64 = zs.iter().sum();
        let rho_c = PI * d / lx + 2.0 * PI * sum.im / (lx * ly);
        let phi_c = PI * d + 2.0 * PI * sum.re / lx;
        let theta = Theta::new(lx, ly);
        let eval = |x: f64, y: f64| -> Complex64 {
            let z = Complex64::new(x, y);
            let mut p = Complex64::new(1.0, 0.0);
            for zk in &zs {
                p *= theta.theta1(PI * (z - zk) / lx);
            }
            let expo = Complex64::new(0.0, PI * d / lx) * z
                + Complex64::new(
                    -PI * d * y * y / (lx * ly) + rho_c * y,
                    -phi_c * y / ly,
                );
            p * expo.exp()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            let x = rng.gen_range(0.0..lx);
            let y = rng.gen_range(0.0..ly);
            let base = eval(x, y);
            let px = eval(x + lx, y);
            assert!((px - base).norm() < 1e-9 * base.norm().max(1e-6), "x seam");
            let py = eval(x, y + ly);
            let expect = Complex64::cis(-2.0 * PI * d * x / lx) * base;
            assert!(
                (py - expect).norm() < 1e-9 * base.norm().max(1e-6),
                "y seam: {py} vs {expect}"
            );
        }
    }

    #[test]
    fn carrier_grid_values_match_formula_structure() {
        let grid = TorusGrid::new(32, 32, 6.0, 6.0).unwrap();
        let zs = [Complex64::new(2.0, 3.0), Complex64::new(4.0, 2.0)];
        let c = carrier(&grid, &zs).unwrap();
        // sup-normalized
        let sup = crate::field::sup_c(&c.phi);
        assert!((sup - 1.0).abs() < 1e-12);
        // vanishes at the prescribed zeros (they sit off-grid here, so check
        // smallness in the nearest cells)
        for zk in &zs {
            let i = (zk.re / grid.hx()).round() as usize % grid.nx();
            let j = (zk.im / grid.hy()).round() as usize % grid.ny();
            assert!(c.phi[grid.idx(i, j)].norm() < 0.2);
        }
        // connection constants are finite and the slope matches 2 pi d / area
        assert!((c.a1_slope - 2.0 * PI * 2.0 / grid.area()).abs() < 1e-14);
        assert!(c.a1_const.is_finite() && c.a2_const.is_finite());
    }
}
