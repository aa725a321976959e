//! Fourier collocation on the torus.
//!
//! Every first-order derivative in the library is spectral: a field sampled on
//! the uniform grid is transformed, multiplied by `i k` (with the Nyquist bin
//! folded to zero so that differentiating real data returns real data), and
//! transformed back. Two properties of this discretization carry the whole
//! energy bookkeeping of the crate:
//!
//! * the derivative matrices are *exactly* skew-adjoint in the grid inner
//!   product, so discrete summation by parts holds to round-off and the
//!   variational residuals computed in `field` are the exact gradient of the
//!   discrete energy;
//! * the mean of any derivative vanishes to round-off, so flux quantization
//!   (total magnetic flux = 2 pi x degree) is exact on the grid.
//!
//! Sections of a degree-`d` line bundle are stored as plain arrays of values
//! on the fundamental domain. They are periodic in x and Bloch-periodic in y:
//! continuing past the y seam multiplies the value by the transition function
//! `exp(-2 pi i d x / lx)`. The y-derivative of such a section factors the
//! column at `x = x_i` as `phi(j) = mu(j) psi(j)` with the unit phase
//! `mu(j) = exp(i theta_i j / ny)`, `theta_i = -2 pi d i / nx`, where `psi` is
//! honestly periodic; differentiation acts on `psi`-modes by
//! `i (k_s + theta_i / ly)`. Since `mu` is a unit-modulus diagonal, the twisted
//! derivative inherits exact skew-adjointness.
//!
//! The x-component of a connection in temporal gauge is not periodic either:
//! on a degree-`d` bundle its logical continuation gains `2 pi d / lx` per trip
//! around the y cycle. [`dy_shifted`] differentiates such fields by splitting
//! off the linear-in-y part, whose derivative `jump / ly` is known exactly.
//!
//! Elliptic solves (`-Delta + c` with constant or variable coefficient) run in
//! mode space; the variable-coefficient case is a preconditioned conjugate
//! gradient with the constant-coefficient inverse as preconditioner. The
//! discrete Laplacian used there is the *square of the first-order operators*
//! (Nyquist folded), so constraint projections are consistent with the
//! divergence they are meant to cancel.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::par;

// ---------------------------------------------------------------------------
// plan and phase-table caches
// ---------------------------------------------------------------------------

static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Bloch phase tables `mu[i*ny + j] = exp(-2 pi i d (i j) / (nx ny))`, cached
/// per `(nx, ny, degree)` so hot loops pay only a complex multiply.
static PHASES: OnceLock<Mutex<HashMap<(usize, usize, i32), Arc<Vec<Complex64>>>>> =
    OnceLock::new();

fn bloch_table(nx: usize, ny: usize, degree: i32) -> Arc<Vec<Complex64>> {
    let cache = PHASES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((nx, ny, degree))
        .or_insert_with(|| {
            let mut table = vec![Complex64::new(1.0, 0.0); nx * ny];
            for i in 0..nx {
                let theta = -2.0 * PI * degree as f64 * i as f64 / nx as f64;
                for j in 0..ny {
                    table[i * ny + j] = Complex64::cis(theta * j as f64 / ny as f64);
                }
            }
            Arc::new(table)
        })
        .clone()
}

/// Angular wavenumbers `2 pi m~ / l` in FFT bin order, with the symmetric fold
/// `m~ in (-n/2, n/2)` and the Nyquist bin mapped to zero.
fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let mut k = vec![0.0; n];
    for (m, km) in k.iter_mut().enumerate() {
        let folded = if 2 * m < n {
            m as f64
        } else if 2 * m == n {
            0.0
        } else {
            m as f64 - n as f64
        };
        *km = 2.0 * PI * folded / l;
    }
    k
}

fn check_len<T>(grid: &TorusGrid, data: &[T]) -> Result<()> {
    if data.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            got: data.len(),
        });
    }
    Ok(())
}

/// `src[r*ncols + c] -> dst[c*nrows + r]`.
fn transpose<T: Copy + Send + Sync>(src: &[T], ncols: usize, nrows: usize, dst: &mut [T]) {
    debug_assert_eq!(src.len(), ncols * nrows);
    debug_assert_eq!(dst.len(), src.len());
    par::for_each_row(dst, nrows, |c, drow| {
        for (r, v) in drow.iter_mut().enumerate() {
            *v = src[r * ncols + c];
        }
    });
}

// ---------------------------------------------------------------------------
// first derivatives
// ---------------------------------------------------------------------------

/// Spectral x-derivative of a complex field (sections are plain periodic in x,
/// so this is exact for any bundle degree).
pub fn dx(grid: &TorusGrid, data: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid, data)?;
    let nx = grid.nx();
    let k = wavenumbers(nx, grid.lx());
    let fwd = plan(nx, true);
    let inv = plan(nx, false);
    let scale = 1.0 / nx as f64;
    let mut out = data.to_vec();
    par::for_each_row(&mut out, nx, |_j, row| {
        fwd.process(row);
        for (m, v) in row.iter_mut().enumerate() {
            let ks = k[m] * scale;
            *v = Complex64::new(-v.im * ks, v.re * ks);
        }
        inv.process(row);
    });
    Ok(out)
}

/// Spectral y-derivative of a section of the degree-`degree` bundle
/// (`degree = 0` is the plain periodic derivative).
pub fn dy_twisted(grid: &TorusGrid, data: &[Complex64], degree: i32) -> Result<Vec<Complex64>> {
    check_len(grid, data)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let k = wavenumbers(ny, grid.ly());
    let fwd = plan(ny, true);
    let inv = plan(ny, false);
    let scale = 1.0 / ny as f64;
    let ly = grid.ly();
    let mu = if degree != 0 {
        Some(bloch_table(nx, ny, degree))
    } else {
        None
    };

    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, nx, ny, &mut t);
    par::for_each_row(&mut t, ny, |i, col| {
        let theta = -2.0 * PI * degree as f64 * i as f64 / nx as f64;
        let shift = theta / ly;
        if let Some(mu) = &mu {
            let phases = &mu[i * ny..(i + 1) * ny];
            for (v, p) in col.iter_mut().zip(phases) {
                *v *= p.conj();
            }
        }
        fwd.process(col);
        for (s, v) in col.iter_mut().enumerate() {
            let ks = (k[s] + shift) * scale;
            *v = Complex64::new(-v.im * ks, v.re * ks);
        }
        inv.process(col);
        if let Some(mu) = &mu {
            let phases = &mu[i * ny..(i + 1) * ny];
            for (v, p) in col.iter_mut().zip(phases) {
                *v *= p;
            }
        }
    });
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(&t, ny, nx, &mut out);
    Ok(out)
}

/// x-derivative of a real periodic field.
pub fn dx_real(grid: &TorusGrid, data: &[f64]) -> Result<Vec<f64>> {
    let c: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(dx(grid, &c)?.iter().map(|z| z.re).collect())
}

/// y-derivative of a real periodic field.
pub fn dy_real(grid: &TorusGrid, data: &[f64]) -> Result<Vec<f64>> {
    let c: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(dy_twisted(grid, &c, 0)?.iter().map(|z| z.re).collect())
}

/// y-derivative of a real field whose logical continuation gains the constant
/// `jump` on each trip around the y cycle (the x-component of a degree-`d`
/// connection has `jump = 2 pi d / lx`). The periodic remainder is
/// differentiated spectrally and the linear part contributes `jump / ly`
/// exactly.
pub fn dy_shifted(grid: &TorusGrid, data: &[f64], jump: f64) -> Result<Vec<f64>> {
    check_len(grid, data)?;
    if jump == 0.0 {
        return dy_real(grid, data);
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut p = data.to_vec();
    par::for_each_row(&mut p, nx, |j, row| {
        let lin = jump * j as f64 / ny as f64;
        for v in row.iter_mut() {
            *v -= lin;
        }
    });
    let mut dp = dy_real(grid, &p)?;
    let slope = jump / grid.ly();
    par::for_each_row(&mut dp, nx, |_j, row| {
        for v in row.iter_mut() {
            *v += slope;
        }
    });
    Ok(dp)
}

// ---------------------------------------------------------------------------
// 2-D transforms and elliptic solves
// ---------------------------------------------------------------------------

/// Unnormalized 2-D transform; output layout `[m*ny + s]` (x-mode major).
fn fft2_forward(grid: &TorusGrid, src: &[Complex64]) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let fx = plan(nx, true);
    let fy = plan(ny, true);
    let mut buf = src.to_vec();
    par::for_each_row(&mut buf, nx, |_j, row| fx.process(row));
    let mut t = vec![Complex64::new(0.0, 0.0); src.len()];
    transpose(&buf, nx, ny, &mut t);
    par::for_each_row(&mut t, ny, |_m, col| fy.process(col));
    t
}

/// Inverse of [`fft2_forward`], including the `1/(nx ny)` normalization.
fn fft2_inverse(grid: &TorusGrid, mut modes: Vec<Complex64>) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let ix = plan(nx, false);
    let iy = plan(ny, false);
    par::for_each_row(&mut modes, ny, |_m, col| iy.process(col));
    let mut out = vec![Complex64::new(0.0, 0.0); modes.len()];
    transpose(&modes, ny, nx, &mut out);
    let scale = 1.0 / (nx * ny) as f64;
    par::for_each_row(&mut out, nx, |_j, row| {
        ix.process(row);
        for v in row.iter_mut() {
            *v *= scale;
        }
    });
    out
}

/// Laplacian of a real periodic field, computed with the folded symbol
/// `-(kx^2 + ky^2)` so that it equals `dx(dx .) + dy(dy .)` exactly.
pub fn laplacian_real(grid: &TorusGrid, data: &[f64]) -> Result<Vec<f64>> {
    check_len(grid, data)?;
    let kx = wavenumbers(grid.nx(), grid.lx());
    let ky = wavenumbers(grid.ny(), grid.ly());
    let src: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut modes = fft2_forward(grid, &src);
    par::for_each_row(&mut modes, grid.ny(), |m, row| {
        let kx2 = kx[m] * kx[m];
        for (s, v) in row.iter_mut().enumerate() {
            *v *= -(kx2 + ky[s] * ky[s]);
        }
    });
    Ok(fft2_inverse(grid, modes).iter().map(|z| z.re).collect())
}

/// Solve `(-Delta + c) u = rhs` for real periodic `u`, `c >= 0`.
///
/// With `c = 0` the operator annihilates the mean and (because the first-order
/// symbol folds Nyquist to zero) the three checkerboard Nyquist modes; those
/// components of `rhs` are projected away and the returned solution contains
/// none of them.
pub fn helmholtz_solve(grid: &TorusGrid, rhs: &[f64], c: f64) -> Result<Vec<f64>> {
    check_len(grid, rhs)?;
    if !c.is_finite() || c < 0.0 {
        return Err(Error::Domain(format!(
            "helmholtz shift must be finite and non-negative, got {c}"
        )));
    }
    let kx = wavenumbers(grid.nx(), grid.lx());
    let ky = wavenumbers(grid.ny(), grid.ly());
    let src: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut modes = fft2_forward(grid, &src);
    par::for_each_row(&mut modes, grid.ny(), |m, row| {
        let kx2 = kx[m] * kx[m];
        for (s, v) in row.iter_mut().enumerate() {
            let denom = kx2 + ky[s] * ky[s] + c;
            if denom == 0.0 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v /= denom;
            }
        }
    });
    Ok(fft2_inverse(grid, modes).iter().map(|z| z.re).collect())
}

/// Deterministic grid inner product (row partials folded in row order).
pub(crate) fn dot_real(grid: &TorusGrid, a: &[f64], b: &[f64]) -> f64 {
    let nx = grid.nx();
    par::sum_over_rows(grid.ny(), |j| {
        let ra = &a[j * nx..(j + 1) * nx];
        let rb = &b[j * nx..(j + 1) * nx];
        ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>()
    })
}

fn l2_norm(grid: &TorusGrid, a: &[f64]) -> f64 {
    dot_real(grid, a, a).sqrt()
}

/// Solve `(-Delta + w(x)) u = rhs` with pointwise `w >= 0` by preconditioned
/// conjugate gradients; the preconditioner is `(-Delta + mean w)^{-1}` applied
/// in mode space. `tol` is relative to `||rhs||_2`. If `w` vanishes
/// identically the system degenerates to a Poisson solve and is handled
/// directly.
pub fn varcoef_helmholtz_cg(
    grid: &TorusGrid,
    w: &[f64],
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
    context: &str,
) -> Result<Vec<f64>> {
    check_len(grid, w)?;
    check_len(grid, rhs)?;
    let n = grid.len();
    let wbar = w.iter().sum::<f64>() / n as f64;
    if wbar <= 1e-12 {
        return helmholtz_solve(grid, rhs, 0.0);
    }
    let rhs_norm = l2_norm(grid, rhs);
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * rhs_norm;

    let kx = wavenumbers(grid.nx(), grid.lx());
    let ky = wavenumbers(grid.ny(), grid.ly());
    let apply_a = |u: &[f64]| -> Vec<f64> {
        let src: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut modes = fft2_forward(grid, &src);
        par::for_each_row(&mut modes, grid.ny(), |m, row| {
            let kx2 = kx[m] * kx[m];
            for (s, v) in row.iter_mut().enumerate() {
                *v *= kx2 + ky[s] * ky[s];
            }
        });
        let mut out: Vec<f64> = fft2_inverse(grid, modes).iter().map(|z| z.re).collect();
        par::for_each_row_with(&mut out, u, grid.nx(), |j, row, src| {
            let base = j * grid.nx();
            for (i, v) in row.iter_mut().enumerate() {
                *v += w[base + i] * src[i];
            }
        });
        out
    };

    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z = helmholtz_solve(grid, &r, wbar)?;
    let mut p = z.clone();
    let mut rz = dot_real(grid, &r, &z);
    let mut history = Vec::new();

    for _ in 0..max_iter {
        let ap = apply_a(&p);
        let pap = dot_real(grid, &p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Conditioning(format!(
                "{context}: CG curvature {pap} is not positive"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = l2_norm(grid, &r);
        history.push(rn);
        if rn <= target {
            return Ok(x);
        }
        z = helmholtz_solve(grid, &r, wbar)?;
        let rz_next = dot_real(grid, &r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let tail = history.split_off(history.len().saturating_sub(12));
    Err(Error::Convergence {
        context: context.to_string(),
        history: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TorusGrid {
        TorusGrid::new(32, 16, 2.3, 1.7).unwrap()
    }

    fn max_abs_c(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn max_abs_r(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn dx_reproduces_plane_wave() {
        let g = grid();
        let kx = 2.0 * PI * 3.0 / g.lx();
        let ky = 2.0 * PI * 2.0 / g.ly();
        let mut u = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut expect = u.clone();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let z = Complex64::cis(kx * g.x(i) + ky * g.y(j));
                u[g.idx(i, j)] = z;
                expect[g.idx(i, j)] = Complex64::new(0.0, kx) * z;
            }
        }
        let d = dx(&g, &u).unwrap();
        assert!(max_abs_c(&d, &expect) < 1e-12);
    }

    #[test]
    fn dy_reproduces_plane_wave() {
        let g = grid();
        let kx = 2.0 * PI * 5.0 / g.lx();
        let ky = 2.0 * PI * 4.0 / g.ly();
        let mut u = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut expect = u.clone();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let z = Complex64::cis(kx * g.x(i) + ky * g.y(j));
                u[g.idx(i, j)] = z;
                expect[g.idx(i, j)] = Complex64::new(0.0, ky) * z;
            }
        }
        let d = dy_twisted(&g, &u, 0).unwrap();
        assert!(max_abs_c(&d, &expect) < 1e-12);
    }

    #[test]
    fn twisted_modes_are_exact_eigenfunctions() {
        // A column-wise Bloch mode mu_i(j) exp(i k_s y) is differentiated to
        // i (k_s + theta_i / ly) times itself, to round-off.
        let g = TorusGrid::new(32, 32, 3.0, 5.0).unwrap();
        let degree = 3;
        let s = 4;
        let ks = 2.0 * PI * s as f64 / g.ly();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let amp: Vec<Complex64> = (0..g.nx())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut u = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut expect = u.clone();
        for i in 0..g.nx() {
            let theta = -2.0 * PI * degree as f64 * i as f64 / g.nx() as f64;
            for j in 0..g.ny() {
                let mu = Complex64::cis(theta * j as f64 / g.ny() as f64);
                let val = amp[i] * mu * Complex64::cis(ks * g.y(j));
                u[g.idx(i, j)] = val;
                expect[g.idx(i, j)] = Complex64::new(0.0, ks + theta / g.ly()) * val;
            }
        }
        let d = dy_twisted(&g, &u, degree).unwrap();
        assert!(max_abs_c(&d, &expect) < 1e-12);
    }

    #[test]
    fn derivatives_are_skew_adjoint() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut rand_field = || -> Vec<Complex64> {
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let u = rand_field();
        let v = rand_field();
        let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let skew_dx = inner(&u, &dx(&g, &v).unwrap()) + inner(&dx(&g, &u).unwrap(), &v);
        assert!(skew_dx.norm() < 1e-12 * g.len() as f64);
        for degree in [0, 2] {
            let skew_dy = inner(&u, &dy_twisted(&g, &v, degree).unwrap())
                + inner(&dy_twisted(&g, &u, degree).unwrap(), &v);
            assert!(skew_dy.norm() < 1e-12 * g.len() as f64);
        }
    }

    #[test]
    fn derivative_means_vanish() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<Complex64> = (0..g.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let sx: Complex64 = dx(&g, &u).unwrap().iter().sum();
        let sy: Complex64 = dy_twisted(&g, &u, 0).unwrap().iter().sum();
        assert!(sx.norm() < 1e-11);
        assert!(sy.norm() < 1e-11);
    }

    #[test]
    fn shifted_derivative_handles_seam_jump() {
        let g = grid();
        let jump = 2.0 * PI * 3.0 / g.lx();
        let mut u = vec![0.0; g.len()];
        let mut expect = vec![0.0; g.len()];
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let (x, y) = (g.x(i), g.y(j));
                let wob = (2.0 * PI * y / g.ly() + 0.3).sin() * (1.0 + 0.2 * (2.0 * PI * x / g.lx()).cos());
                u[g.idx(i, j)] = jump * j as f64 / g.ny() as f64 + wob;
                expect[g.idx(i, j)] = jump / g.ly()
                    + (2.0 * PI / g.ly())
                        * (2.0 * PI * y / g.ly() + 0.3).cos()
                        * (1.0 + 0.2 * (2.0 * PI * x / g.lx()).cos());
            }
        }
        let d = dy_shifted(&g, &u, jump).unwrap();
        assert!(max_abs_r(&d, &expect) < 1e-11);
    }

    fn smooth_real(g: &TorusGrid, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for mx in -3i32..=3 {
            for my in -3i32..=3 {
                modes.push((mx, my, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI)));
            }
        }
        let mut u = vec![0.0; g.len()];
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let (x, y) = (g.x(i), g.y(j));
                u[g.idx(i, j)] = modes
                    .iter()
                    .map(|&(mx, my, a, ph)| {
                        a * (2.0 * PI * (mx as f64 * x / g.lx() + my as f64 * y / g.ly()) + ph)
                            .cos()
                    })
                    .sum();
            }
        }
        u
    }

    #[test]
    fn helmholtz_solve_round_trips() {
        let g = grid();
        let u = smooth_real(&g, 11);
        let c = 0.37;
        let lap = laplacian_real(&g, &u).unwrap();
        let rhs: Vec<f64> = u.iter().zip(&lap).map(|(ui, li)| -li + c * ui).collect();
        let sol = helmholtz_solve(&g, &rhs, c).unwrap();
        assert!(max_abs_r(&sol, &u) < 1e-10);
    }

    #[test]
    fn poisson_solve_round_trips_zero_mean() {
        let g = grid();
        let mut u = smooth_real(&g, 5);
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        for v in u.iter_mut() {
            *v -= mean;
        }
        let lap = laplacian_real(&g, &u).unwrap();
        let rhs: Vec<f64> = lap.iter().map(|l| -l).collect();
        let sol = helmholtz_solve(&g, &rhs, 0.0).unwrap();
        assert!(max_abs_r(&sol, &u) < 1e-10);
    }

    #[test]
    fn helmholtz_rejects_bad_input() {
        let g = grid();
        assert!(helmholtz_solve(&g, &vec![0.0; 3], 1.0).is_err());
        assert!(helmholtz_solve(&g, &vec![0.0; g.len()], -1.0).is_err());
        assert!(helmholtz_solve(&g, &vec![0.0; g.len()], f64::NAN).is_err());
    }

    #[test]
    fn variable_coefficient_cg_matches_manufactured_solution() {
        let g = grid();
        let u = smooth_real(&g, 21);
        let mut w = vec![0.0; g.len()];
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                w[g.idx(i, j)] = 1.0
                    + 0.8
                        * (2.0 * PI * g.x(i) / g.lx()).cos()
                        * (2.0 * PI * g.y(j) / g.ly()).sin();
            }
        }
        let lap = laplacian_real(&g, &u).unwrap();
        let rhs: Vec<f64> = (0..g.len()).map(|n| -lap[n] + w[n] * u[n]).collect();
        let sol = varcoef_helmholtz_cg(&g, &w, &rhs, 1e-12, 400, "test").unwrap();
        assert!(max_abs_r(&sol, &u) < 1e-9);
    }

    #[test]
    fn variable_coefficient_cg_degenerates_to_poisson() {
        let g = grid();
        let mut u = smooth_real(&g, 8);
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        for v in u.iter_mut() {
            *v -= mean;
        }
        let lap = laplacian_real(&g, &u).unwrap();
        let rhs: Vec<f64> = lap.iter().map(|l| -l).collect();
        let w = vec![0.0; g.len()];
        let sol = varcoef_helmholtz_cg(&g, &w, &rhs, 1e-12, 400, "test").unwrap();
        assert!(max_abs_r(&sol, &u) < 1e-10);
    }
}
