//! The metric that slow vortex motion sees on the moduli space.
//!
//! Restricting the field-theory kinetic energy `T` to motions tangent to the
//! space of vortex solutions induces a Riemannian metric on `Sym^d(T^2)`:
//! for a curve of solutions `m(tau)`, the physical velocity is the moduli
//! derivative of the fields *with gauge motion removed*, i.e. projected onto
//! the Gauss constraint (see [`crate::dynamics`]), and
//!
//! ```text
//! g_ab = < t_a , t_b >_{L^2},        T = 1/2 udot^T g(u) udot.
//! ```
//!
//! Basis tangents `t_a` are computed by centered difference quotients of the
//! vortex solver along each chart coordinate, at stencil widths `delta` and
//! `delta/2` combined by Richardson extrapolation (`(4 t_{d/2} - t_d)/3`,
//! leaving an O(delta^4) bias), then Gauss-projected. A general tangent is
//! the exact linear combination of the basis, so the induced quadratic form
//! is consistent with the Gram matrix to round-off by construction.
//!
//! Two coordinate charts cover the situations the lab meets. `Positions`
//! uses the zeros themselves, ordered, as coordinates; it degenerates where
//! zeros collide (the symmetric product is smooth there, the labeling is
//! not). `Coefficients` uses the monic-polynomial coefficients of the zero
//! divisor, the chart in which right-angle scattering of two colliding
//! vortices is literally a straight line through the origin. The geodesic
//! integrator switches charts with hysteresis at core-scale separations
//! (position velocities diverge like an inverse square root of the time to
//! impact, so the switch happens *before* the step that would straddle the
//! collision, with a velocity lookahead). Christoffel symbols come from
//! Richardson difference quotients of the metric, and the trajectory is
//! advanced by classical RK4.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::par;
use crate::vortex::{
    best_matching, moduli_to_polynomial, polynomial_roots, solve_vortex, torus_dist, SolveOptions,
    VortexSolution,
};

/// Local coordinates on the moduli space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `(x_1, y_1, ..., x_d, y_d)`: the zeros, in a fixed order.
    Positions,
    /// Real and imaginary parts of the monic divisor polynomial
    /// coefficients, `(Re c_{d-1}, Im c_{d-1}, ..., Re c_0, Im c_0)`.
    Coefficients,
}

/// Options for tangent-basis and metric computations.
#[derive(Debug, Clone)]
pub struct ModuliOptions {
    pub solve: SolveOptions,
    /// Difference-stencil half-width in chart coordinates; defaults to
    /// `2 max(hx, hy)`.
    pub delta: Option<f64>,
    /// Smallest metric eigenvalue must be at least this fraction of the mean
    /// eigenvalue, or geodesic integration refuses to continue.
    pub min_eig_frac: f64,
}

impl Default for ModuliOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            delta: None,
            min_eig_frac: 1e-6,
        }
    }
}

/// A moduli tangent vector realized as Gauss-constrained field velocities.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub a1_dot: Vec<f64>,
    pub a2_dot: Vec<f64>,
    pub phi_dot: Vec<Complex64>,
}

impl Tangent {
    fn zero(n: usize) -> Self {
        Self {
            a1_dot: vec![0.0; n],
            a2_dot: vec![0.0; n],
            phi_dot: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// `self += c * other`.
    fn axpy(&mut self, c: f64, other: &Tangent, nx: usize) {
        par::for_each_row_with(&mut self.a1_dot, &other.a1_dot, nx, |_j, row, src| {
            for (v, s) in row.iter_mut().zip(src) {
                *v += c * s;
            }
        });
        par::for_each_row_with(&mut self.a2_dot, &other.a2_dot, nx, |_j, row, src| {
            for (v, s) in row.iter_mut().zip(src) {
                *v += c * s;
            }
        });
        par::for_each_row_with(&mut self.phi_dot, &other.phi_dot, nx, |_j, row, src| {
            for (v, s) in row.iter_mut().zip(src) {
                *v += c * s;
            }
        });
    }
}

/// L2 inner product of two tangents (deterministic reduction).
fn inner(grid: &TorusGrid, a: &Tangent, b: &Tangent) -> f64 {
    let nx = grid.nx();
    let sum = par::sum_over_rows(grid.ny(), |j| {
        let base = j * nx;
        let mut acc = 0.0;
        for i in 0..nx {
            let m = base + i;
            acc += a.a1_dot[m] * b.a1_dot[m]
                + a.a2_dot[m] * b.a2_dot[m]
                + (a.phi_dot[m] * b.phi_dot[m].conj()).re;
        }
        acc
    });
    sum * grid.cell()
}

// ---------------------------------------------------------------------------
// charts
// ---------------------------------------------------------------------------

/// Zeros described by chart coordinates `u` (length `2d`).
pub fn chart_zeros(chart: Chart, u: &[f64]) -> Result<Vec<Complex64>> {
    if u.len() % 2 != 0 || u.is_empty() {
        return Err(Error::Domain(format!(
            "chart coordinates must have positive even length, got {}",
            u.len()
        )));
    }
    let pack: Vec<Complex64> = u
        .chunks(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    match chart {
        Chart::Positions => Ok(pack),
        Chart::Coefficients => polynomial_roots(&pack),
    }
}

/// Chart coordinates of a zero set (the inverse of [`chart_zeros`]; for
/// `Positions` the given order is kept).
pub fn zero_coords(chart: Chart, zeros: &[Complex64]) -> Vec<f64> {
    let pack = match chart {
        Chart::Positions => zeros.to_vec(),
        Chart::Coefficients => moduli_to_polynomial(zeros),
    };
    let mut u = Vec::with_capacity(2 * pack.len());
    for z in pack {
        u.push(z.re);
        u.push(z.im);
    }
    u
}

/// Real Jacobian of the transition `Positions -> Coefficients` at `zeros`:
/// rows indexed like coefficient coordinates, columns like position
/// coordinates. The map is holomorphic in each zero with
/// `dc_m/dz_k = -[X^m] Prod_{j != k} (X - z_j)`, so each 2x2 real block is a
/// similarity `[[re, -im], [im, re]]`.
pub fn coeff_jacobian(zeros: &[Complex64]) -> DMatrix<f64> {
    let d = zeros.len();
    let mut jac = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        // Monic product over the other zeros, ascending coefficients.
        let mut q = vec![Complex64::new(1.0, 0.0)];
        for (j, z) in zeros.iter().enumerate() {
            if j == k {
                continue;
            }
            let mut next = vec![Complex64::new(0.0, 0.0); q.len() + 1];
            for (m, &qm) in q.iter().enumerate() {
                next[m + 1] += qm;
                next[m] -= z * qm;
            }
            q = next;
        }
        // Coefficient coordinate row r corresponds to c_{d-1-r} in the
        // descending convention of `moduli_to_polynomial`.
        for r in 0..d {
            let w = -q[d - 1 - r];
            jac[(2 * r, 2 * k)] = w.re;
            jac[(2 * r, 2 * k + 1)] = -w.im;
            jac[(2 * r + 1, 2 * k)] = w.im;
            jac[(2 * r + 1, 2 * k + 1)] = w.re;
        }
    }
    jac
}

// ---------------------------------------------------------------------------
// tangent basis and metric
// ---------------------------------------------------------------------------

/// The 2d gauge-projected basis tangents at one moduli point, with the base
/// solution they perturb.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    grid: TorusGrid,
    chart: Chart,
    u: Vec<f64>,
    base: VortexSolution,
    tangents: Vec<Tangent>,
}

impl TangentBasis {
    /// Convenience: basis in the `Positions` chart at the given zeros.
    pub fn at_zeros(
        grid: &TorusGrid,
        zeros: &[Complex64],
        opts: &ModuliOptions,
    ) -> Result<Self> {
        Self::compute(grid, Chart::Positions, &zero_coords(Chart::Positions, zeros), opts)
    }

    /// Compute the basis at chart coordinates `u`.
    pub fn compute(
        grid: &TorusGrid,
        chart: Chart,
        u: &[f64],
        opts: &ModuliOptions,
    ) -> Result<Self> {
        let dim = u.len();
        if dim % 2 != 0 || dim == 0 {
            return Err(Error::Domain(format!(
                "moduli coordinates must have positive even length, got {dim}"
            )));
        }
        let delta = opts.delta.unwrap_or(2.0 * grid.hx().max(grid.hy()));
        if !(delta > 0.0) {
            return Err(Error::Domain("stencil width must be positive".into()));
        }
        let base_zeros = chart_zeros(chart, u)?;
        let base = solve_vortex(grid, &base_zeros, &opts.solve)?;
        let warm = SolveOptions {
            v_init: Some(base.v.clone()),
            ..opts.solve.clone()
        };
        let nx = grid.nx();
        let n = grid.len();

        let solve_at = |a: usize, shift: f64| -> Result<VortexSolution> {
            let mut u2 = u.to_vec();
            u2[a] += shift;
            let zs = chart_zeros(chart, &u2)?;
            solve_vortex(grid, &zs, &warm)
        };

        let mut tangents = Vec::with_capacity(dim);
        for a in 0..dim {
            let p1 = solve_at(a, delta)?;
            let m1 = solve_at(a, -delta)?;
            let p2 = solve_at(a, 0.5 * delta)?;
            let m2 = solve_at(a, -0.5 * delta)?;
            // Richardson: (4 D_{delta/2} - D_delta) / 3.
            let c_half = 4.0 / (3.0 * delta);
            let c_full = -1.0 / (3.0 * 2.0 * delta);
            let mut t = Tangent::zero(n);
            for (sol, sign, c) in [
                (&p2, 1.0, c_half),
                (&m2, -1.0, c_half),
                (&p1, 1.0, c_full),
                (&m1, -1.0, c_full),
            ] {
                let w = sign * c;
                par::for_each_row_with(&mut t.a1_dot, sol.fields.a1(), nx, |_j, row, src| {
                    for (v, s) in row.iter_mut().zip(src) {
                        *v += w * s;
                    }
                });
                par::for_each_row_with(&mut t.a2_dot, sol.fields.a2(), nx, |_j, row, src| {
                    for (v, s) in row.iter_mut().zip(src) {
                        *v += w * s;
                    }
                });
                par::for_each_row_with(&mut t.phi_dot, sol.fields.phi(), nx, |_j, row, src| {
                    for (v, s) in row.iter_mut().zip(src) {
                        *v += w * s;
                    }
                });
            }
            dynamics::project_velocities(
                &base.fields,
                &mut t.a1_dot,
                &mut t.a2_dot,
                &mut t.phi_dot,
            )?;
            tangents.push(t);
        }
        Ok(Self {
            grid: grid.clone(),
            chart,
            u: u.to_vec(),
            base,
            tangents,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.u
    }

    pub fn base(&self) -> &VortexSolution {
        &self.base
    }

    pub fn basis_tangent(&self, a: usize) -> &Tangent {
        &self.tangents[a]
    }

    /// The tangent for a chart velocity `dir` — exactly linear in `dir`, so
    /// kinetic energies of scaled velocities scale exactly quadratically.
    pub fn tangent(&self, dir: &[f64]) -> Result<Tangent> {
        if dir.len() != self.tangents.len() {
            return Err(Error::Shape {
                expected: self.tangents.len(),
                got: dir.len(),
            });
        }
        let mut t = Tangent::zero(self.grid.len());
        for (c, basis) in dir.iter().zip(&self.tangents) {
            t.axpy(*c, basis, self.grid.nx());
        }
        Ok(t)
    }

    /// The induced metric: the Gram matrix of the basis tangents.
    pub fn metric(&self) -> DMatrix<f64> {
        let dim = self.tangents.len();
        let mut g = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in a..dim {
                let v = inner(&self.grid, &self.tangents[a], &self.tangents[b]);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }
}

/// Convenience: the moduli metric in the `Positions` chart at `zeros`.
pub fn moduli_metric(
    grid: &TorusGrid,
    zeros: &[Complex64],
    opts: &ModuliOptions,
) -> Result<DMatrix<f64>> {
    Ok(TangentBasis::at_zeros(grid, zeros, opts)?.metric())
}

// ---------------------------------------------------------------------------
// geodesics
// ---------------------------------------------------------------------------

/// Options for [`integrate_geodesic`].
#[derive(Debug, Clone)]
pub struct GeodesicOptions {
    /// RK4 step in geodesic time.
    pub dtau: f64,
    /// Enter the coefficient chart when the closest pair of zeros comes
    /// nearer than this. The threshold is physical, not a grid quantity:
    /// the labeled-positions chart degenerates (and position velocities
    /// diverge like an inverse square root) once zeros overlap at the unit
    /// core scale, regardless of resolution.
    pub switch_in: f64,
    /// Leave the coefficient chart again beyond this separation; keep it
    /// comfortably above `switch_in` so the charts do not chatter.
    pub switch_out: f64,
    pub moduli: ModuliOptions,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            dtau: 0.05,
            switch_in: 1.5,
            switch_out: 2.5,
            moduli: ModuliOptions::default(),
        }
    }
}

/// One sample of a geodesic trajectory.
#[derive(Debug, Clone)]
pub struct GeodesicPoint {
    pub tau: f64,
    /// Zeros ordered continuously along the trajectory (lifted to the plane,
    /// not wrapped into the fundamental cell).
    pub zeros: Vec<Complex64>,
    pub chart: Chart,
    pub u: Vec<f64>,
    pub u_dot: Vec<f64>,
}

struct MetricCache<'a> {
    grid: &'a TorusGrid,
    opts: &'a ModuliOptions,
    warm: Option<Vec<f64>>,
}

impl<'a> MetricCache<'a> {
    fn basis(&mut self, chart: Chart, u: &[f64]) -> Result<TangentBasis> {
        let mut opts = self.opts.clone();
        opts.solve.v_init = self.warm.clone();
        let basis = TangentBasis::compute(self.grid, chart, u, &opts)?;
        self.warm = Some(basis.base().v.clone());
        Ok(basis)
    }

    fn metric(&mut self, chart: Chart, u: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.basis(chart, u)?.metric())
    }

    /// Geodesic acceleration `uddot^c = -Gamma^c_ab udot^a udot^b`, with the
    /// Christoffel symbols assembled from Richardson difference quotients of
    /// the metric.
    fn acceleration(&mut self, chart: Chart, u: &[f64], udot: &[f64]) -> Result<Vec<f64>> {
        let dim = u.len();
        let delta = self
            .opts
            .delta
            .unwrap_or(2.0 * self.grid.hx().max(self.grid.hy()));
        let mut dg: Vec<DMatrix<f64>> = Vec::with_capacity(dim);
        for c in 0..dim {
            let eval = |cache: &mut Self, s: f64| -> Result<DMatrix<f64>> {
                let mut u2 = u.to_vec();
                u2[c] += s;
                cache.metric(chart, &u2)
            };
            let gp = eval(self, delta)?;
            let gm = eval(self, -delta)?;
            let gp2 = eval(self, 0.5 * delta)?;
            let gm2 = eval(self, -0.5 * delta)?;
            let d_full = (gp - gm) / (2.0 * delta);
            let d_half = (gp2 - gm2) / delta;
            dg.push((d_half * 4.0 - d_full) / 3.0);
        }
        let g = self.metric(chart, u)?;
        let eig = g.clone().symmetric_eigen().eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = eig.iter().sum::<f64>() / dim as f64;
        if !(min > self.opts.min_eig_frac * mean) {
            return Err(Error::Conditioning(format!(
                "moduli metric near-degenerate: min eigenvalue {min:.3e} vs mean {mean:.3e}"
            )));
        }
        // A_e = sum_ab (2 d_a g_eb - d_e g_ab) udot^a udot^b.
        let mut a_vec = DMatrix::zeros(dim, 1);
        for e in 0..dim {
            let mut acc = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    acc += (2.0 * dg[a][(e, b)] - dg[e][(a, b)]) * udot[a] * udot[b];
                }
            }
            a_vec[(e, 0)] = acc;
        }
        let chol = g
            .cholesky()
            .ok_or_else(|| Error::Conditioning("moduli metric not positive definite".into()))?;
        let uddot = chol.solve(&a_vec) * (-0.5);
        Ok(uddot.column(0).iter().cloned().collect())
    }
}

/// Integrate the geodesic starting at `zeros0` with zero velocities `vel0`
/// (complex, one per zero) up to `tau_end`, sampling every step. Charts are
/// switched automatically when zeros approach or separate.
pub fn integrate_geodesic(
    grid: &TorusGrid,
    zeros0: &[Complex64],
    vel0: &[Complex64],
    tau_end: f64,
    opts: &GeodesicOptions,
) -> Result<Vec<GeodesicPoint>> {
    let d = zeros0.len();
    if d == 0 || vel0.len() != d {
        return Err(Error::Shape {
            expected: d.max(1),
            got: vel0.len(),
        });
    }
    if !(tau_end > 0.0) || !(opts.dtau > 0.0) {
        return Err(Error::Domain(
            "geodesic needs positive tau_end and dtau".into(),
        ));
    }
    if !(opts.switch_in > 0.0 && opts.switch_out > opts.switch_in) {
        return Err(Error::Domain(
            "chart hysteresis needs 0 < switch_in < switch_out".into(),
        ));
    }
    let switch_in = opts.switch_in;
    let switch_out = opts.switch_out;

    let mut zeros = zeros0.to_vec();
    let mut udot_z: Vec<f64> = Vec::with_capacity(2 * d);
    for v in vel0 {
        udot_z.push(v.re);
        udot_z.push(v.im);
    }
    let mut chart = if d >= 2 && min_separation(grid, &zeros) < switch_in {
        Chart::Coefficients
    } else {
        Chart::Positions
    };
    let (mut u, mut udot) = match chart {
        Chart::Positions => (zero_coords(Chart::Positions, &zeros), udot_z),
        Chart::Coefficients => {
            let jac = coeff_jacobian(&zeros);
            let v = DMatrix::from_column_slice(2 * d, 1, &udot_z);
            let w = &jac * v;
            (
                zero_coords(Chart::Coefficients, &zeros),
                w.column(0).iter().cloned().collect(),
            )
        }
    };

    let mut cache = MetricCache {
        grid,
        opts: &opts.moduli,
        warm: None,
    };

    let n_steps = (tau_end / opts.dtau).ceil().max(1.0) as usize;
    let dtau = tau_end / n_steps as f64;
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push(GeodesicPoint {
        tau: 0.0,
        zeros: zeros.clone(),
        chart,
        u: u.clone(),
        u_dot: udot.clone(),
    });

    for step in 1..=n_steps {
        // Positions -> Coefficients must happen *before* the step that would
        // straddle a collision: position velocities diverge like an inverse
        // square root of the time to impact, so a fixed RK4 step entering the
        // overlap region produces garbage rather than a clean error. A short
        // velocity lookahead (how far the closest pair can close within one
        // step) triggers the switch early enough.
        if d >= 2 && chart == Chart::Positions {
            let sep = min_separation(grid, &zeros);
            let relspeed = closing_speed(&zeros, &udot, grid);
            // The factor 1.5 covers the growth of the closing speed during
            // the step itself.
            if sep < switch_in + 1.5 * relspeed * dtau {
                let jac = coeff_jacobian(&zeros);
                let v = DMatrix::from_column_slice(2 * d, 1, &udot);
                udot = (&jac * v).column(0).iter().cloned().collect();
                u = zero_coords(Chart::Coefficients, &zeros);
                chart = Chart::Coefficients;
            }
        }
        let prev_scale = udot.iter().fold(0.0f64, |m, x| m.max(x.abs()));

        // Classical RK4 on (u, udot).
        let k1v = udot.clone();
        let k1a = cache.acceleration(chart, &u, &udot)?;
        let u2 = add_scaled(&u, &k1v, 0.5 * dtau);
        let v2 = add_scaled(&udot, &k1a, 0.5 * dtau);
        let k2v = v2.clone();
        let k2a = cache.acceleration(chart, &u2, &v2)?;
        let u3 = add_scaled(&u, &k2v, 0.5 * dtau);
        let v3 = add_scaled(&udot, &k2a, 0.5 * dtau);
        let k3v = v3.clone();
        let k3a = cache.acceleration(chart, &u3, &v3)?;
        let u4 = add_scaled(&u, &k3v, dtau);
        let v4 = add_scaled(&udot, &k3a, dtau);
        let k4v = v4.clone();
        let k4a = cache.acceleration(chart, &u4, &v4)?;
        for i in 0..u.len() {
            u[i] += dtau / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            udot[i] += dtau / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
        }

        let new_scale = udot.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !new_scale.is_finite() || new_scale > 100.0 * prev_scale.max(1.0) {
            return Err(Error::Inconsistency(
                "geodesic velocity blew up within one step; \
                 an unresolved collision slipped past the chart switch"
                    .into(),
            ));
        }

        // Continuously ordered zeros for output.
        let new_zeros = chart_zeros(chart, &u)?;
        zeros = match chart {
            Chart::Positions => new_zeros,
            Chart::Coefficients => {
                let (perm, _) = best_matching(grid, &zeros, &new_zeros)?;
                perm.iter().map(|&j| new_zeros[j]).collect()
            }
        };
        points.push(GeodesicPoint {
            tau: step as f64 * dtau,
            zeros: zeros.clone(),
            chart,
            u: u.clone(),
            u_dot: udot.clone(),
        });

        // Hysteresis back out: once the zeros are well separated the labeled
        // chart is non-degenerate again and cheaper to reason about.
        if d >= 2 && chart == Chart::Coefficients {
            let sep = min_separation(grid, &zeros);
            if sep > switch_out {
                let jac = coeff_jacobian(&zeros);
                let v = DMatrix::from_column_slice(2 * d, 1, &udot);
                let lu = jac.lu();
                let back = lu.solve(&v).ok_or_else(|| {
                    Error::Conditioning("chart transition Jacobian is singular".into())
                })?;
                udot = back.column(0).iter().cloned().collect();
                u = zero_coords(Chart::Positions, &zeros);
                chart = Chart::Positions;
            }
        }
    }
    Ok(points)
}

/// Largest closing speed among the closest pairs: the current relative speed
/// of the pair of zeros with minimal separation, taken from position-chart
/// velocities. Used for the lookahead that triggers the chart switch.
fn closing_speed(zeros: &[Complex64], udot: &[f64], grid: &TorusGrid) -> f64 {
    let mut best_sep = f64::INFINITY;
    let mut speed = 0.0;
    for i in 0..zeros.len() {
        for j in i + 1..zeros.len() {
            let sep = torus_dist(grid, zeros[i], zeros[j]);
            let dvx = udot[2 * i] - udot[2 * j];
            let dvy = udot[2 * i + 1] - udot[2 * j + 1];
            let rel = (dvx * dvx + dvy * dvy).sqrt();
            if sep < best_sep {
                best_sep = sep;
                speed = rel;
            }
        }
    }
    speed
}

fn add_scaled(a: &[f64], b: &[f64], c: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub(crate) fn min_separation(grid: &TorusGrid, zeros: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..zeros.len() {
        for j in i + 1..zeros.len() {
            best = best.min(torus_dist(grid, zeros[i], zeros[j]));
        }
    }
    best
}
