//! Second-order field dynamics in temporal gauge.
//!
//! In the gauge `a_0 = 0` the Lagrangian is `T - U` with
//!
//! ```text
//! T = 1/2 Int [ (da_1/dt)^2 + (da_2/dt)^2 + |dPhi/dt|^2 ],
//! ```
//!
//! so the equations of motion are literally `(d/dt)^2 x = -grad U(x)` for
//! the configuration `x = (a_1, a_2, Phi)`, with the gradient already
//! implemented as [`GaugePair::el_residual`]:
//!
//! ```text
//! d^2 a_1/dt^2 = -d_2 f - Im(conj(Phi) D_1 Phi)
//! d^2 a_2/dt^2 = +d_1 f - Im(conj(Phi) D_2 Phi)
//! d^2 Phi/dt^2 = (D_1 D_1 + D_2 D_2) Phi + 1/2 (1 - |Phi|^2) Phi
//! ```
//!
//! Fixing the gauge does not use up the freedom of time-independent gauge
//! transformations, whose Noether charge is the Gauss functional
//! `G = d_1 (da_1/dt) + d_2 (da_2/dt) + Im(conj(Phi) dPhi/dt)`: it is
//! conserved by the flow, and physical initial data must have `G = 0`.
//! [`project_constraint`] enforces that by an infinitesimal gauge motion of
//! the velocities, solving `(-Lap + |Phi|^2) chi = G` and shifting
//! `da_j/dt += d_j chi`, `dPhi/dt -= i chi Phi`.
//!
//! Time stepping is velocity Verlet (kick-drift-kick), symplectic and
//! second-order: energy errors oscillate at O(dt^2) instead of drifting.
//! The wave part of the system propagates at unit speed, so steps are
//! rejected beyond the stability bound of the highest spectral mode: the
//! discrete wave operator reaches frequencies `omega_max = pi sqrt(1/hx^2 +
//! 1/hy^2)`, and Verlet is stable only for `dt < 2 / omega_max` (about
//! `0.45 h` on a square grid — tighter than the `h/sqrt(2)` rule of thumb
//! for second-order differences, because spectral derivatives keep the full
//! strength of the top of the band).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::GaugePair;
use crate::grid::TorusGrid;
use crate::par;
use crate::spectral;

/// A point of the field-theory phase space: a configuration plus velocities,
/// tagged with the evolution time.
#[derive(Debug, Clone)]
pub struct DynState {
    pub fields: GaugePair,
    pub a1_dot: Vec<f64>,
    pub a2_dot: Vec<f64>,
    pub phi_dot: Vec<Complex64>,
    pub t: f64,
}

impl DynState {
    /// Bundle fields and velocities; shapes must agree with the grid.
    pub fn new(
        fields: GaugePair,
        a1_dot: Vec<f64>,
        a2_dot: Vec<f64>,
        phi_dot: Vec<Complex64>,
    ) -> Result<Self> {
        let n = fields.grid().len();
        for len in [a1_dot.len(), a2_dot.len(), phi_dot.len()] {
            if len != n {
                return Err(Error::Shape {
                    expected: n,
                    got: len,
                });
            }
        }
        Ok(Self {
            fields,
            a1_dot,
            a2_dot,
            phi_dot,
            t: 0.0,
        })
    }

    /// A configuration at rest.
    pub fn at_rest(fields: GaugePair) -> Self {
        let n = fields.grid().len();
        Self {
            fields,
            a1_dot: vec![0.0; n],
            a2_dot: vec![0.0; n],
            phi_dot: vec![Complex64::new(0.0, 0.0); n],
            t: 0.0,
        }
    }

    /// Kinetic energy `1/2 Int (da_1/dt)^2 + (da_2/dt)^2 + |dPhi/dt|^2`.
    pub fn kinetic_energy(&self) -> f64 {
        let grid = self.fields.grid();
        let nx = grid.nx();
        let sum = par::sum_over_rows(grid.ny(), |j| {
            let base = j * nx;
            let mut acc = 0.0;
            for i in 0..nx {
                let m = base + i;
                acc += self.a1_dot[m] * self.a1_dot[m]
                    + self.a2_dot[m] * self.a2_dot[m]
                    + self.phi_dot[m].norm_sqr();
            }
            acc
        });
        0.5 * sum * grid.cell()
    }

    /// The Gauss constraint field
    /// `G = d_1 (da_1/dt) + d_2 (da_2/dt) + Im(conj(Phi) dPhi/dt)`.
    pub fn gauss_residual(&self) -> Result<Vec<f64>> {
        let grid = self.fields.grid();
        let nx = grid.nx();
        let d1 = spectral::dx_real(grid, &self.a1_dot)?;
        let d2 = spectral::dy_real(grid, &self.a2_dot)?;
        let phi = self.fields.phi();
        let mut g = vec![0.0; grid.len()];
        par::for_each_row(&mut g, nx, |j, row| {
            let base = j * nx;
            for (i, gi) in row.iter_mut().enumerate() {
                let m = base + i;
                *gi = d1[m] + d2[m] + (phi[m].conj() * self.phi_dot[m]).im;
            }
        });
        Ok(g)
    }

    /// Sup norm of the Gauss constraint.
    pub fn gauss_sup(&self) -> Result<f64> {
        Ok(crate::field::sup_r(&self.gauss_residual()?))
    }

    /// Kinetic, potential, total energy and constraint defect in one bundle.
    pub fn energy_report(&self) -> Result<EnergyReport> {
        let kinetic = self.kinetic_energy();
        let potential = self.fields.potential_energy()?;
        Ok(EnergyReport {
            t: self.t,
            kinetic,
            potential,
            total: kinetic + potential,
            gauss_sup: self.gauss_sup()?,
        })
    }
}

/// Scalar observables of a [`DynState`].
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    pub t: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    pub gauss_sup: f64,
}

/// Project the velocities onto the Gauss constraint surface by an
/// infinitesimal time-independent gauge transformation. One variable
/// coefficient elliptic solve; the fields themselves are untouched.
pub fn project_constraint(state: &mut DynState) -> Result<()> {
    let fields = state.fields.clone();
    project_velocities(
        &fields,
        &mut state.a1_dot,
        &mut state.a2_dot,
        &mut state.phi_dot,
    )
}

/// The projection underlying [`project_constraint`], on a bare velocity
/// triple: shift by the gauge motion of `chi` solving
/// `(-Lap + |Phi|^2) chi = G` so that the Gauss functional of the result
/// vanishes. Also used to strip gauge motion out of moduli-space tangents.
pub(crate) fn project_velocities(
    fields: &GaugePair,
    a1_dot: &mut [f64],
    a2_dot: &mut [f64],
    phi_dot: &mut [Complex64],
) -> Result<()> {
    let grid = fields.grid();
    let nx = grid.nx();
    let phi = fields.phi();
    let d1 = spectral::dx_real(grid, a1_dot)?;
    let d2 = spectral::dy_real(grid, a2_dot)?;
    let mut g = vec![0.0; grid.len()];
    par::for_each_row(&mut g, nx, |j, row| {
        let base = j * nx;
        for (i, gi) in row.iter_mut().enumerate() {
            let m = base + i;
            *gi = d1[m] + d2[m] + (phi[m].conj() * phi_dot[m]).im;
        }
    });
    let mut w = vec![0.0; grid.len()];
    par::for_each_row_with(&mut w, phi, nx, |_j, row, src| {
        for (wi, p) in row.iter_mut().zip(src) {
            *wi = p.norm_sqr();
        }
    });
    let chi = spectral::varcoef_helmholtz_cg(grid, &w, &g, 1e-13, 2000, "Gauss projection")?;
    let d1chi = spectral::dx_real(grid, &chi)?;
    let d2chi = spectral::dy_real(grid, &chi)?;
    par::for_each_row_with(a1_dot, &d1chi, nx, |_j, row, src| {
        for (v, d) in row.iter_mut().zip(src) {
            *v += d;
        }
    });
    par::for_each_row_with(a2_dot, &d2chi, nx, |_j, row, src| {
        for (v, d) in row.iter_mut().zip(src) {
            *v += d;
        }
    });
    par::for_each_row_with(phi_dot, &chi, nx, |j, row, src| {
        let base = j * nx;
        for (i, (v, c)) in row.iter_mut().zip(src).enumerate() {
            *v -= Complex64::new(0.0, *c) * phi[base + i];
        }
    });
    Ok(())
}

/// Minus the energy gradient, i.e. the accelerations of all three fields.
fn accelerations(fields: &GaugePair) -> Result<(Vec<f64>, Vec<f64>, Vec<Complex64>)> {
    let res = fields.el_residual()?;
    let crate::field::ElResidual {
        mut r_phi,
        mut r_a1,
        mut r_a2,
    } = res;
    let nx = fields.grid().nx();
    par::for_each_row(&mut r_a1, nx, |_j, row| {
        for v in row.iter_mut() {
            *v = -*v;
        }
    });
    par::for_each_row(&mut r_a2, nx, |_j, row| {
        for v in row.iter_mut() {
            *v = -*v;
        }
    });
    par::for_each_row(&mut r_phi, nx, |_j, row| {
        for v in row.iter_mut() {
            *v = -2.0 * *v;
        }
    });
    Ok((r_a1, r_a2, r_phi))
}

fn check_bounded(state: &DynState) -> bool {
    let sup_phi = crate::field::sup_c(state.fields.phi());
    let ok = sup_phi.is_finite()
        && sup_phi < 10.0
        && crate::field::sup_r(state.fields.a1()).is_finite()
        && crate::field::sup_r(state.fields.a2()).is_finite()
        && crate::field::sup_c(&state.phi_dot).is_finite();
    ok
}

/// Evolve by `n_steps` velocity-Verlet steps of size `dt`.
pub fn evolve(state: DynState, dt: f64, n_steps: usize) -> Result<DynState> {
    evolve_sampled(state, dt, n_steps, usize::MAX, |_| Ok(()))
}

/// Largest stable Verlet step: `2 / omega_max` for the top of the spectral
/// band, `omega_max = pi sqrt(1/hx^2 + 1/hy^2)`.
pub fn stability_limit(grid: &TorusGrid) -> f64 {
    let wmax = std::f64::consts::PI
        * (1.0 / (grid.hx() * grid.hx()) + 1.0 / (grid.hy() * grid.hy())).sqrt();
    2.0 / wmax
}

/// Evolve and hand every `sample_every`-th state (and the final one) to the
/// observer. The observer can abort the run by returning an error.
pub fn evolve_sampled<F>(
    mut state: DynState,
    dt: f64,
    n_steps: usize,
    sample_every: usize,
    mut observe: F,
) -> Result<DynState>
where
    F: FnMut(&DynState) -> Result<()>,
{
    let grid = state.fields.grid().clone();
    let limit = stability_limit(&grid);
    if !(dt > 0.0) || dt >= limit {
        return Err(Error::Cfl { dt, limit });
    }
    if sample_every == 0 {
        return Err(Error::Domain("sample_every must be positive".into()));
    }
    let nx = grid.nx();
    let (mut acc1, mut acc2, mut accp) = accelerations(&state.fields)?;
    for step in 1..=n_steps {
        {
            let (a1, a2, phi) = state.fields.parts_mut();
            par::for_each_row(a1, nx, |j, row| {
                let base = j * nx;
                for (i, v) in row.iter_mut().enumerate() {
                    let m = base + i;
                    *v += dt * state.a1_dot[m] + 0.5 * dt * dt * acc1[m];
                }
            });
            par::for_each_row(a2, nx, |j, row| {
                let base = j * nx;
                for (i, v) in row.iter_mut().enumerate() {
                    let m = base + i;
                    *v += dt * state.a2_dot[m] + 0.5 * dt * dt * acc2[m];
                }
            });
            par::for_each_row(phi, nx, |j, row| {
                let base = j * nx;
                for (i, v) in row.iter_mut().enumerate() {
                    let m = base + i;
                    *v += dt * state.phi_dot[m] + 0.5 * dt * dt * accp[m];
                }
            });
        }
        let t_new = state.t + dt;
        if !check_bounded(&state) {
            // Detection triggers at sup|Phi| >= 10, well before any value
            // can overflow within a CFL-limited step, so the mid-step state
            // we hand back is still finite (unless the caller's own initial
            // data was not).
            state.t = t_new;
            return Err(diverged(state, t_new));
        }
        let (n1, n2, np) = accelerations(&state.fields)?;
        par::for_each_row(&mut state.a1_dot, nx, |j, row| {
            let base = j * nx;
            for (i, v) in row.iter_mut().enumerate() {
                let m = base + i;
                *v += 0.5 * dt * (acc1[m] + n1[m]);
            }
        });
        par::for_each_row(&mut state.a2_dot, nx, |j, row| {
            let base = j * nx;
            for (i, v) in row.iter_mut().enumerate() {
                let m = base + i;
                *v += 0.5 * dt * (acc2[m] + n2[m]);
            }
        });
        par::for_each_row(&mut state.phi_dot, nx, |j, row| {
            let base = j * nx;
            for (i, v) in row.iter_mut().enumerate() {
                let m = base + i;
                *v += 0.5 * dt * (accp[m] + np[m]);
            }
        });
        (acc1, acc2, accp) = (n1, n2, np);
        state.t = t_new;
        if step % sample_every == 0 || step == n_steps {
            observe(&state)?;
        }
    }
    Ok(state)
}

fn diverged(state: DynState, t: f64) -> Error {
    Error::Diverged {
        t,
        last_good: Box::new(state),
    }
}
