//! Vortex statics: solving the first-order equations at prescribed zeros.
//!
//! Writing `Phi = Phi_sing exp(v/2)` with the theta-function carrier
//! `Phi_sing` (see `theta`), both first-order equations collapse to one real
//! scalar PDE for the periodic function `v`:
//!
//! ```text
//! Delta v = rho e^v - 1 + 4 pi d / area,       rho = |Phi_sing|^2,
//! ```
//!
//! solvable iff the Bradlow bound `area > 4 pi d` holds (integrate both
//! sides). The connection comes along for free,
//! `a = a_sing + (-(1/2) d_2 v, (1/2) d_1 v)`, so the reconstructed pair
//! satisfies the first Bogomolny equation identically and the second up to
//! the Newton residual. The solver is damped Newton with a spectrally
//! preconditioned CG linear solve; quadratic convergence takes it to sup
//! residuals near round-off in a handful of iterations, and warm starts from
//! a neighboring moduli point cut that further.
//!
//! The inverse problem -- reading zeros off a field configuration -- is done
//! by winding-number counting of `arg Phi` around grid plaquettes (with the
//! bundle transition factor inserted across the y seam), refined to sub-grid
//! accuracy by a bilinear model of the cell, which needs no derivative
//! arrays. The total winding equals the degree exactly, by telescoping.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::GaugePair;
use crate::grid::TorusGrid;
use crate::par;
use crate::spectral;
use crate::theta;

/// Options for [`solve_vortex`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Sup-norm target for the scalar-equation residual.
    pub tol: f64,
    pub max_newton: usize,
    pub cg_tol: f64,
    pub cg_max: usize,
    /// Warm start for `v` (e.g. from a neighboring moduli point).
    pub v_init: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_newton: 40,
            cg_tol: 1e-12,
            cg_max: 1000,
            v_init: None,
        }
    }
}

/// A solved vortex configuration.
#[derive(Debug, Clone)]
pub struct VortexSolution {
    pub fields: GaugePair,
    /// The scalar potential `v` (useful as a warm start for nearby moduli).
    pub v: Vec<f64>,
    /// The requested zeros (lifted representatives, as passed in).
    pub zeros: Vec<Complex64>,
    /// Final sup-norm of the scalar-equation residual.
    pub residual_sup: f64,
    /// Newton iterations spent.
    pub newton_iters: usize,
}

/// Solve the vortex equations with zeros at `zeros` (with multiplicity;
/// coincident entries are allowed). `zeros.len()` fixes the bundle degree.
pub fn solve_vortex(
    grid: &TorusGrid,
    zeros: &[Complex64],
    opts: &SolveOptions,
) -> Result<VortexSolution> {
    let d = zeros.len();
    if d == 0 {
        // Sym^0 is a point: the vacuum.
        return Ok(VortexSolution {
            fields: GaugePair::vacuum(grid.clone()),
            v: vec![0.0; grid.len()],
            zeros: Vec::new(),
            residual_sup: 0.0,
            newton_iters: 0,
        });
    }
    let slack = grid.area() - 4.0 * PI * d as f64;
    if slack <= 0.0 {
        return Err(Error::Infeasible(format!(
            "Bradlow bound violated: area {} <= 4 pi d = {}; no degree-{} solution exists",
            grid.area(),
            4.0 * PI * d as f64,
            d
        )));
    }
    let h = grid.hx().max(grid.hy());
    if h > 0.7 {
        return Err(Error::Resolution(format!(
            "grid spacing {h:.3} cannot resolve the unit-size vortex core"
        )));
    }
    if let Some(v0) = &opts.v_init {
        if v0.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: v0.len(),
            });
        }
    }

    let carrier = theta::carrier(grid, zeros)?;
    let nx = grid.nx();
    let n = grid.len();
    let rho: Vec<f64> = carrier.phi.iter().map(|z| z.norm_sqr()).collect();
    let b = 1.0 - 4.0 * PI * d as f64 / grid.area();

    let mut v = opts.v_init.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut history = Vec::new();
    let mut newton_iters = 0;
    let mut residual_sup = f64::INFINITY;
    let mut converged = false;

    for _ in 0..opts.max_newton {
        let lap = spectral::laplacian_real(grid, &v)?;
        let mut w = vec![0.0; n];
        let mut res = vec![0.0; n];
        par::for_each_row(&mut w, nx, |j, row| {
            let base = j * nx;
            for (i, wi) in row.iter_mut().enumerate() {
                *wi = rho[base + i] * v[base + i].exp();
            }
        });
        par::for_each_row(&mut res, nx, |j, row| {
            let base = j * nx;
            for (i, ri) in row.iter_mut().enumerate() {
                let m = base + i;
                *ri = lap[m] - w[m] + b;
            }
        });
        residual_sup = crate::field::sup_r(&res);
        history.push(residual_sup);
        if !residual_sup.is_finite() {
            return Err(Error::Convergence {
                context: "vortex Newton iteration (residual not finite)".into(),
                history,
            });
        }
        if residual_sup <= opts.tol {
            converged = true;
            break;
        }
        newton_iters += 1;
        let mut step =
            spectral::varcoef_helmholtz_cg(grid, &w, &res, opts.cg_tol, opts.cg_max, "vortex Newton step")?;
        let ssup = crate::field::sup_r(&step);
        if ssup > 3.0 {
            let damp = 3.0 / ssup;
            par::for_each_row(&mut step, nx, |_j, row| {
                for s in row.iter_mut() {
                    *s *= damp;
                }
            });
        }
        par::for_each_row_with(&mut v, &step, nx, |_j, row, src| {
            for (vi, si) in row.iter_mut().zip(src) {
                *vi += si;
            }
        });
    }
    if !converged {
        return Err(Error::Convergence {
            context: format!("vortex Newton did not reach tol {}", opts.tol),
            history,
        });
    }

    // Reconstruct the fields.
    let d1v = spectral::dx_real(grid, &v)?;
    let d2v = spectral::dy_real(grid, &v)?;
    let mut a1 = vec![0.0; n];
    let mut a2 = vec![0.0; n];
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    par::for_each_row(&mut a1, nx, |j, row| {
        let base = j * nx;
        let lin = carrier.a1_slope * grid.y(j) + carrier.a1_const;
        for (i, ai) in row.iter_mut().enumerate() {
            *ai = lin - 0.5 * d2v[base + i];
        }
    });
    par::for_each_row(&mut a2, nx, |j, row| {
        let base = j * nx;
        for (i, ai) in row.iter_mut().enumerate() {
            *ai = carrier.a2_const + 0.5 * d1v[base + i];
        }
    });
    par::for_each_row(&mut phi, nx, |j, row| {
        let base = j * nx;
        for (i, pi) in row.iter_mut().enumerate() {
            let m = base + i;
            *pi = carrier.phi[m] * (0.5 * v[m]).exp();
        }
    });
    let fields = GaugePair::new(grid.clone(), d as i32, a1, a2, phi)?;
    Ok(VortexSolution {
        fields,
        v,
        zeros: zeros.to_vec(),
        residual_sup,
        newton_iters,
    })
}

// ---------------------------------------------------------------------------
// zero location
// ---------------------------------------------------------------------------

/// Locate the zeros of the Higgs field by plaquette winding numbers,
/// returning one entry per unit of vorticity (a double zero appears twice).
/// Positions are refined below grid resolution with a bilinear cell model.
/// Fails with [`Error::Inconsistency`] if the windings do not add up to the
/// bundle degree (e.g. the configuration is nowhere near the moduli space).
pub fn locate_zeros(pair: &GaugePair) -> Result<Vec<Complex64>> {
    let grid = pair.grid();
    let d = pair.degree();
    let phi = pair.phi();
    let (nx, ny) = (grid.nx(), grid.ny());
    let sup = crate::field::sup_c(phi);
    if !(sup > 0.0) {
        return Err(Error::Inconsistency(
            "cannot locate zeros of an identically vanishing field".into(),
        ));
    }

    // Logical (bundle-frame) value at possibly out-of-range indices.
    let val = |i: isize, j: isize| -> Complex64 {
        let iw = grid.wrap_x(i);
        let (jw, q) = grid.wrap_y(j);
        let v = phi[jw * nx + iw];
        if q == 0 {
            v
        } else {
            let angle = -2.0 * PI * d as f64 * q as f64 * iw as f64 / nx as f64;
            Complex64::cis(angle) * v
        }
    };

    let node_tol = 1e-10 * sup;
    let mut consumed = vec![false; nx * ny];
    let mut found: Vec<(Complex64, i64)> = Vec::new();

    // Pass 1: zeros sitting (numerically) on grid nodes; wind around the
    // surrounding ring instead of through the vanishing corner.
    for j in 0..ny {
        for i in 0..nx {
            if phi[j * nx + i].norm() >= node_tol {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let ring = [
                (ii + 1, jj),
                (ii + 1, jj + 1),
                (ii, jj + 1),
                (ii - 1, jj + 1),
                (ii - 1, jj),
                (ii - 1, jj - 1),
                (ii, jj - 1),
                (ii + 1, jj - 1),
            ];
            let mut total = 0.0;
            for k in 0..ring.len() {
                let a = val(ring[k].0, ring[k].1);
                let b = val(ring[(k + 1) % ring.len()].0, ring[(k + 1) % ring.len()].1);
                if a.norm() < node_tol || b.norm() < node_tol {
                    return Err(Error::Inconsistency(
                        "clustered field zeros on adjacent grid nodes; refine the grid".into(),
                    ));
                }
                total += (b * a.conj()).arg();
            }
            let m = (total / (2.0 * PI)).round() as i64;
            if m <= 0 {
                return Err(Error::Inconsistency(format!(
                    "grid-node zero at ({}, {}) has non-positive winding {}",
                    grid.x(i),
                    grid.y(j),
                    m
                )));
            }
            found.push((Complex64::new(grid.x(i), grid.y(j)), m));
            // The four plaquettes cornered at this node are accounted for.
            for (pi, pj) in [
                (ii - 1, jj - 1),
                (ii, jj - 1),
                (ii - 1, jj),
                (ii, jj),
            ] {
                let pw = grid.wrap_x(pi);
                let (qw, _) = grid.wrap_y(pj);
                consumed[qw * nx + pw] = true;
            }
        }
    }

    // Pass 2: plaquette windings.
    for j in 0..ny {
        for i in 0..nx {
            if consumed[j * nx + i] {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let corners = [(ii, jj), (ii + 1, jj), (ii + 1, jj + 1), (ii, jj + 1)];
            let vals: Vec<Complex64> = corners.iter().map(|&(a, b)| val(a, b)).collect();
            let mut total = 0.0;
            for k in 0..4 {
                total += (vals[(k + 1) % 4] * vals[k].conj()).arg();
            }
            let m = (total / (2.0 * PI)).round() as i64;
            if m == 0 {
                continue;
            }
            if m < 0 {
                return Err(Error::Inconsistency(format!(
                    "negative winding {} in cell ({}, {}); configuration is not vortex-like",
                    m, i, j
                )));
            }
            let center = Complex64::new(grid.x(i) + 0.5 * grid.hx(), grid.y(j) + 0.5 * grid.hy());
            let pos = if m == 1 {
                refine_bilinear(&vals, grid, i, j).unwrap_or(center)
            } else {
                center
            };
            for _ in 0..m {
                found.push((pos, 1));
            }
        }
    }

    let total: i64 = found.iter().map(|&(_, m)| m).sum();
    if total != d as i64 {
        return Err(Error::Inconsistency(format!(
            "windings sum to {} but the bundle degree is {}",
            total, d
        )));
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(d as usize);
    for (z, m) in found {
        for _ in 0..m {
            out.push(z);
        }
    }
    out.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
    Ok(out)
}

/// Newton on the bilinear interpolant of one cell; `vals` are the four corner
/// values in ccw order `(0,0), (1,0), (1,1), (0,1)`.
fn refine_bilinear(
    vals: &[Complex64],
    grid: &TorusGrid,
    i: usize,
    j: usize,
) -> Option<Complex64> {
    let (v00, v10, v11, v01) = (vals[0], vals[1], vals[2], vals[3]);
    let f = |s: f64, t: f64| -> Complex64 {
        v00 * (1.0 - s) * (1.0 - t) + v10 * s * (1.0 - t) + v01 * (1.0 - s) * t + v11 * s * t
    };
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..30 {
        let fv = f(s, t);
        let fs = (v10 - v00) * (1.0 - t) + (v11 - v01) * t;
        let ft = (v01 - v00) * (1.0 - s) + (v11 - v10) * s;
        // Solve the real 2x2 system [Re fs, Re ft; Im fs, Im ft] (ds, dt) = -f.
        let det = fs.re * ft.im - fs.im * ft.re;
        if det.abs() < 1e-30 {
            return None;
        }
        let ds = (-fv.re * ft.im + fv.im * ft.re) / det;
        let dt = (-fs.re * fv.im + fs.im * fv.re) / det;
        s += ds;
        t += dt;
        if !s.is_finite() || !t.is_finite() {
            return None;
        }
        if ds.abs() < 1e-13 && dt.abs() < 1e-13 {
            break;
        }
    }
    // Keep strictly inside the (closed) cell; a zero marginally outside means
    // the winding really belongs to a neighbor, but the center fallback is
    // still the honest answer then.
    if !(-0.25..=1.25).contains(&s) || !(-0.25..=1.25).contains(&t) {
        return None;
    }
    let s = s.clamp(0.0, 1.0);
    let t = t.clamp(0.0, 1.0);
    Some(Complex64::new(
        grid.x(i) + s * grid.hx(),
        grid.y(j) + t * grid.hy(),
    ))
}

// ---------------------------------------------------------------------------
// moduli <-> polynomial charts and matching
// ---------------------------------------------------------------------------

/// Coefficients `[c_{d-1}, ..., c_0]` of the monic polynomial
/// `Prod (z - z_k) = z^d + c_{d-1} z^{d-1} + ... + c_0` (leading 1 omitted).
pub fn moduli_to_polynomial(zeros: &[Complex64]) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)]; // ascending, poly[k] = coeff of z^k
    for z in zeros {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, &pk) in poly.iter().enumerate() {
            next[k + 1] += pk;
            next[k] -= z * pk;
        }
        poly = next;
    }
    let d = zeros.len();
    let mut out: Vec<Complex64> = poly[..d].to_vec();
    out.reverse();
    out
}

/// Roots of the monic polynomial with coefficients `[c_{d-1}, ..., c_0]`
/// (inverse of [`moduli_to_polynomial`], up to ordering). Quadratics use the
/// cancellation-safe formula; higher degrees use deterministic
/// Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len();
    match d {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-coeffs[0]]),
        2 => {
            let (b, c) = (coeffs[0], coeffs[1]);
            let disc = (b * b - 4.0 * c).sqrt();
            // Choose the sign that avoids cancellation in b + s*disc.
            let s = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (b + s * disc);
            if q.norm() > 0.0 {
                Ok(vec![q, c / q])
            } else {
                // b ~ 0 and c ~ 0: double root at -b/2.
                Ok(vec![-0.5 * b, -0.5 * b])
            }
        }
        _ => {
            let scale = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let seed = Complex64::new(0.4, 0.9);
            let mut roots: Vec<Complex64> = (0..d)
                .map(|k| scale * seed.powu(k as u32 + 1))
                .collect();
            let eval = |z: Complex64| -> Complex64 {
                let mut p = Complex64::new(1.0, 0.0);
                for c in coeffs {
                    p = p * z + c;
                }
                p
            };
            for _ in 0..500 {
                let mut max_move = 0.0f64;
                for k in 0..d {
                    let zk = roots[k];
                    let mut denom = Complex64::new(1.0, 0.0);
                    for (j, &zj) in roots.iter().enumerate() {
                        if j != k {
                            denom *= zk - zj;
                        }
                    }
                    if denom.norm() < 1e-300 {
                        // Perturb coincident iterates deterministically.
                        roots[k] += Complex64::new(1e-8 * scale, 1e-8 * scale);
                        max_move = f64::MAX;
                        continue;
                    }
                    let step = eval(zk) / denom;
                    roots[k] = zk - step;
                    max_move = max_move.max(step.norm());
                }
                if max_move < 1e-13 * scale {
                    return Ok(roots);
                }
            }
            Err(Error::Convergence {
                context: format!("root finding for degree {d} polynomial"),
                history: vec![],
            })
        }
    }
}

/// Distance between two points of the torus (flat metric, shortest
/// representative).
pub fn torus_dist(grid: &TorusGrid, a: Complex64, b: Complex64) -> f64 {
    let dx = (a.re - b.re).rem_euclid(grid.lx());
    let dx = dx.min(grid.lx() - dx);
    let dy = (a.im - b.im).rem_euclid(grid.ly());
    let dy = dy.min(grid.ly() - dy);
    dx.hypot(dy)
}

/// Best matching between two unordered zero sets of equal size: the minimum
/// over pairings of the largest pairwise torus distance. Sizes up to 8.
pub fn match_zero_sets(grid: &TorusGrid, a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    Ok(best_matching(grid, a, b)?.1)
}

/// The optimal pairing behind [`match_zero_sets`]: returns the permutation
/// `p` minimizing the largest `torus_dist(a[i], b[p[i]])`, and that distance.
pub(crate) fn best_matching(
    grid: &TorusGrid,
    a: &[Complex64],
    b: &[Complex64],
) -> Result<(Vec<usize>, f64)> {
    Ok(best_two_matchings(grid, a, b)?.0)
}

/// Best and runner-up pairings between two unordered zero sets, minimizing
/// the largest pairwise torus distance. The runner-up (`None` for fewer than
/// two points) is what a crossing detector compares against: when its cost
/// comes close to the optimum, the labeling is genuinely ambiguous.
pub(crate) fn best_two_matchings(
    grid: &TorusGrid,
    a: &[Complex64],
    b: &[Complex64],
) -> Result<((Vec<usize>, f64), Option<(Vec<usize>, f64)>)> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            got: b.len(),
        });
    }
    let d = a.len();
    if d > 8 {
        return Err(Error::Domain(format!(
            "zero-set matching supports up to 8 points, got {d}"
        )));
    }
    if d == 0 {
        return Ok(((Vec::new(), 0.0), None));
    }
    let mut perm: Vec<usize> = (0..d).collect();
    let mut best: (Vec<usize>, f64) = (perm.clone(), f64::INFINITY);
    let mut second: Option<(Vec<usize>, f64)> = None;
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; d];
    let eval = |p: &[usize], best: &mut (Vec<usize>, f64), second: &mut Option<(Vec<usize>, f64)>| {
        let worst = p
            .iter()
            .enumerate()
            .map(|(i, &j)| torus_dist(grid, a[i], b[j]))
            .fold(0.0, f64::max);
        if worst < best.1 {
            if best.1.is_finite() {
                *second = Some(best.clone());
            }
            best.0.clone_from_slice(p);
            best.1 = worst;
        } else if second.as_ref().is_none_or(|s| worst < s.1) {
            *second = Some((p.to_vec(), worst));
        }
    };
    eval(&perm, &mut best, &mut second);
    let mut i = 0;
    while i < d {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            eval(&perm, &mut best, &mut second);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok((best, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_chart_round_trips() {
        // Frozen pairs.
        let c = moduli_to_polynomial(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!((c[0] - Complex64::new(0.0, 0.0)).norm() < 1e-15);
        assert!((c[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let c = moduli_to_polynomial(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0)]);
        assert!((c[0] - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert!((c[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        // Round trip through the root finder, degree 3 and 4.
        for zs in [
            vec![
                Complex64::new(0.3, -1.2),
                Complex64::new(-0.8, 0.4),
                Complex64::new(1.9, 0.1),
            ],
            vec![
                Complex64::new(1.0, 1.0),
                Complex64::new(-1.0, 0.5),
                Complex64::new(0.0, -1.5),
                Complex64::new(2.0, 0.0),
            ],
        ] {
            let c = moduli_to_polynomial(&zs);
            let mut r = polynomial_roots(&c).unwrap();
            let mut z = zs.clone();
            let key = |w: &Complex64| (w.re, w.im);
            r.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            z.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (a, b) in r.iter().zip(&z) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn quadratic_roots_avoid_cancellation() {
        // Roots of widely different magnitude.
        let zs = [Complex64::new(1e-8, 0.0), Complex64::new(1e8, 0.0)];
        let c = moduli_to_polynomial(&zs);
        let r = polynomial_roots(&c).unwrap();
        let small = r.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!((small / 1e-8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn torus_distance_wraps() {
        let g = TorusGrid::new(16, 16, 10.0, 8.0).unwrap();
        let a = Complex64::new(0.5, 0.5);
        let b = Complex64::new(9.5, 7.5);
        assert!((torus_dist(&g, a, b) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(torus_dist(&g, a, a) == 0.0);
    }

    #[test]
    fn unit_vortex_solves_and_saturates_energy() {
        let g = TorusGrid::new(64, 64, 8.0, 8.0).unwrap();
        let zs = [Complex64::new(4.7, 3.3)];
        let sol = solve_vortex(&g, &zs, &SolveOptions::default()).unwrap();
        assert!(sol.residual_sup <= 1e-11, "residual {}", sol.residual_sup);
        let u = sol.fields.potential_energy().unwrap();
        assert!((u - PI).abs() < 1e-6, "energy {u} should be pi");
        let nu = sol.fields.vortex_number().unwrap();
        assert!((nu - 1.0).abs() < 1e-11);
        assert!(sol.fields.bogomolny_residual().unwrap().sup() < 1e-6);
        assert!(sol.fields.el_residual().unwrap().sup() < 1e-5);
        let zeros = locate_zeros(&sol.fields).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!(
            torus_dist(&g, zeros[0], zs[0]) < 0.5 * g.hx(),
            "located {} vs requested {}",
            zeros[0],
            zs[0]
        );
    }

    #[test]
    fn two_vortices_locate_and_warm_start() {
        let g = TorusGrid::new(64, 64, 10.0, 10.0).unwrap();
        let zs = [Complex64::new(3.0, 5.1), Complex64::new(7.2, 4.9)];
        let sol = solve_vortex(&g, &zs, &SolveOptions::default()).unwrap();
        let u = sol.fields.potential_energy().unwrap();
        assert!((u - 2.0 * PI).abs() < 1e-6, "energy {u}");
        let zeros = locate_zeros(&sol.fields).unwrap();
        assert_eq!(zeros.len(), 2);
        assert!(match_zero_sets(&g, &zeros, &zs).unwrap() < 0.5 * g.hx());

        // Warm start from a shifted configuration converges in fewer steps.
        let zs2 = [Complex64::new(3.1, 5.1), Complex64::new(7.2, 4.9)];
        let warm = solve_vortex(
            &g,
            &zs2,
            &SolveOptions {
                v_init: Some(sol.v.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(warm.newton_iters <= sol.newton_iters);
    }

    #[test]
    fn coincident_pair_reports_double_zero() {
        let g = TorusGrid::new(64, 64, 10.0, 10.0).unwrap();
        let z = Complex64::new(5.0 + 0.5 * g.hx(), 5.0 + 0.5 * g.hy());
        let sol = solve_vortex(&g, &[z, z], &SolveOptions::default()).unwrap();
        let zeros = locate_zeros(&sol.fields).unwrap();
        assert_eq!(zeros.len(), 2);
        for w in &zeros {
            assert!(torus_dist(&g, *w, z) < 1.5 * g.hx());
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        // Bradlow violation: area 16 < 8 pi.
        let g = TorusGrid::new(32, 32, 4.0, 4.0).unwrap();
        let zs = [Complex64::new(1.0, 1.0), Complex64::new(3.0, 3.0)];
        match solve_vortex(&g, &zs, &SolveOptions::default()) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
        // Unresolvable core.
        let g = TorusGrid::new(16, 16, 40.0, 40.0).unwrap();
        match solve_vortex(&g, &[Complex64::new(20.0, 20.0)], &SolveOptions::default()) {
            Err(Error::Resolution(_)) => {}
            other => panic!("expected Resolution error, got {other:?}"),
        }
    }

    #[test]
    fn vacuum_degree_zero() {
        let g = TorusGrid::new(32, 32, 6.0, 6.0).unwrap();
        let sol = solve_vortex(&g, &[], &SolveOptions::default()).unwrap();
        assert!(sol.fields.potential_energy().unwrap() < 1e-13);
        assert!(locate_zeros(&sol.fields).unwrap().is_empty());
    }
}
