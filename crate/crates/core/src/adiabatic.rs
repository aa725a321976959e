//! Slow vortex motion against moduli-space geodesics.
//!
//! A dynamical solution whose initial velocity is `eps` times a moduli
//! tangent carries kinetic energy `eps^2 * (1/2 v^T g v)` and, for small
//! `eps`, its zeros shadow the geodesic of the moduli metric `g` through the
//! same initial data. In the slow time `tau = eps * t` the comparison is
//! `eps`-independent: this module prepares such states, tracks the zeros of
//! an evolution, and measures the sup-deviation between the rescaled PDE
//! trajectory and the geodesic over a list of `eps` values, so the approach
//! to the adiabatic limit becomes a convergence table.
//!
//! Deviations are measured in the chart the geodesic reference is currently
//! using: matched position distance while the zeros are well separated, the
//! Euclidean distance of monic-polynomial coefficients near a collision
//! (where labels lose meaning). A small window of slow time around the
//! collision is reported separately from the headline supremum, since both
//! trajectories pass through a chart boundary there.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{evolve_sampled, project_constraint, DynState};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::moduli::{
    integrate_geodesic, min_separation, zero_coords, Chart, GeodesicOptions, GeodesicPoint,
    ModuliOptions, TangentBasis,
};
use crate::vortex::{best_matching, best_two_matchings, locate_zeros};

/// A static vortex configuration endowed with a slow initial velocity.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub state: DynState,
    /// Moduli metric at the initial point, in the positions chart.
    pub metric: DMatrix<f64>,
    /// `1/2 v^T g v` for the unscaled moduli velocity; the prepared state
    /// carries kinetic energy `eps^2` times this.
    pub moduli_energy: f64,
}

/// Static fields at `zeros` plus velocities `eps` times the moduli tangent
/// of `velocity` (one complex rate per zero), Gauss-projected. The kinetic
/// energy of the result is `eps^2 * moduli_energy` up to solver tolerances,
/// because the tangent map is exactly linear.
pub fn prepare_adiabatic_state(
    grid: &TorusGrid,
    zeros: &[Complex64],
    velocity: &[Complex64],
    eps: f64,
    opts: &ModuliOptions,
) -> Result<PreparedState> {
    let basis = TangentBasis::at_zeros(grid, zeros, opts)?;
    prepared_from_basis(&basis, velocity, eps)
}

fn prepared_from_basis(
    basis: &TangentBasis,
    velocity: &[Complex64],
    eps: f64,
) -> Result<PreparedState> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!(
            "adiabatic eps must be finite and nonnegative, got {eps}"
        )));
    }
    let dim = basis.coords().len();
    if 2 * velocity.len() != dim {
        return Err(Error::Shape {
            expected: dim / 2,
            got: velocity.len(),
        });
    }
    let dir: Vec<f64> = velocity.iter().flat_map(|v| [v.re, v.im]).collect();
    let tangent = basis.tangent(&dir)?;
    let metric = basis.metric();
    let mut quad = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            quad += metric[(a, b)] * dir[a] * dir[b];
        }
    }

    let scale = |v: Vec<f64>| v.into_iter().map(|x| eps * x).collect::<Vec<f64>>();
    let phi_dot: Vec<Complex64> = tangent.phi_dot.iter().map(|z| eps * z).collect();
    let mut state = DynState::new(
        basis.base().fields.clone(),
        scale(tangent.a1_dot),
        scale(tangent.a2_dot),
        phi_dot,
    )?;
    // The tangents are individually Gauss-projected and the projection is
    // linear, so this is idempotent; applying it once more costs one cheap
    // solve and keeps the guarantee local.
    project_constraint(&mut state)?;
    Ok(PreparedState {
        state,
        metric,
        moduli_energy: 0.5 * quad,
    })
}

/// A labeled zero trajectory read off a field evolution.
#[derive(Debug, Clone)]
pub struct ZeroTrajectory {
    /// `(t, zeros)` per sample, labels matched consecutively.
    pub samples: Vec<(f64, Vec<Complex64>)>,
    /// Samples at which the matching was ambiguous (zeros crossing).
    pub crossings: Vec<CrossingEvent>,
}

/// One ambiguous labeling event: the two lowest-cost continuations of the
/// previous sample's labels.
#[derive(Debug, Clone)]
pub struct CrossingEvent {
    pub t: f64,
    pub branches: [Vec<Complex64>; 2],
}

/// Incremental zero tracker behind [`zero_trajectory`]: pushes samples,
/// keeps labels continuous by minimal matched displacement, and flags the
/// samples where the runner-up matching costs less than twice the optimum —
/// there the displacement is comparable to the separation and the labels
/// are a convention, not data.
#[derive(Debug, Default)]
pub(crate) struct ZeroTracker {
    samples: Vec<(f64, Vec<Complex64>)>,
    crossings: Vec<CrossingEvent>,
}

impl ZeroTracker {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push_state(&mut self, state: &DynState) -> Result<()> {
        let zeros = locate_zeros(&state.fields)?;
        self.push_zeros(state.fields.grid(), state.t, zeros)
    }

    pub(crate) fn push_zeros(
        &mut self,
        grid: &TorusGrid,
        t: f64,
        zeros: Vec<Complex64>,
    ) -> Result<()> {
        let ordered = match self.samples.last() {
            None => zeros,
            Some((_, prev)) => {
                let (best, second) = best_two_matchings(grid, prev, &zeros)?;
                let ordered: Vec<Complex64> = best.0.iter().map(|&j| zeros[j]).collect();
                if let Some((alt_perm, alt_cost)) = second {
                    if alt_cost < 2.0 * best.1 {
                        let alt: Vec<Complex64> = alt_perm.iter().map(|&j| zeros[j]).collect();
                        self.crossings.push(CrossingEvent {
                            t,
                            branches: [ordered.clone(), alt],
                        });
                    }
                }
                ordered
            }
        };
        self.samples.push((t, ordered));
        Ok(())
    }

    pub(crate) fn last_zeros(&self) -> Option<&[Complex64]> {
        self.samples.last().map(|(_, z)| z.as_slice())
    }

    pub(crate) fn finish(self) -> ZeroTrajectory {
        ZeroTrajectory {
            samples: self.samples,
            crossings: self.crossings,
        }
    }
}

/// Zeros along a run of snapshots, labels matched between consecutive
/// samples by minimal matched displacement on the torus. Crossing events
/// (ambiguous matchings) are flagged with both branches.
pub fn zero_trajectory(states: &[DynState]) -> Result<ZeroTrajectory> {
    let mut tracker = ZeroTracker::new();
    for s in states {
        tracker.push_state(s)?;
    }
    Ok(tracker.finish())
}

/// Options for [`adiabatic_compare`].
#[derive(Debug, Clone)]
pub struct AdiabaticOptions {
    /// Geodesic reference: `geo.dtau` doubles as the slow-time sampling step
    /// of the PDE runs, so both trajectories are compared on the same grid
    /// of slow times.
    pub geo: GeodesicOptions,
    /// Grid for the metric/geodesic side; defaults to the PDE grid. Must
    /// span the same torus.
    pub metric_grid: Option<TorusGrid>,
    /// PDE step as a fraction of the stability limit `min(h)/sqrt(2)`.
    pub cfl_frac: f64,
    /// Half-width, in slow time, of the separately-reported window around
    /// the geodesic's closest approach.
    pub collision_window: f64,
}

impl Default for AdiabaticOptions {
    fn default() -> Self {
        Self {
            geo: GeodesicOptions::default(),
            metric_grid: None,
            cfl_frac: 0.8,
            collision_window: 0.05,
        }
    }
}

/// One PDE run of the comparison.
#[derive(Debug, Clone)]
pub struct AdiabaticRun {
    pub eps: f64,
    /// Zeros along the run, in PDE time.
    pub trajectory: ZeroTrajectory,
    /// `(tau, deviation)` against the geodesic, in the geodesic's chart.
    pub deviations: Vec<(f64, f64)>,
    /// `(tau, kinetic energy)` along the run.
    pub kinetic: Vec<(f64, f64)>,
    /// Sup of deviations outside the collision window; NaN for failed runs.
    pub sup_deviation: f64,
    /// Sup of deviations inside the collision window, if it was entered.
    pub collision_deviation: Option<f64>,
    /// Populated when the run aborted; the partial report retains the rest.
    pub failure: Option<String>,
}

/// The convergence table of the adiabatic comparison.
#[derive(Debug, Clone)]
pub struct AdiabaticReport {
    pub eps: Vec<f64>,
    /// Headline sup-deviation per `eps` (collision window excluded).
    pub deviations: Vec<f64>,
    /// `deviations[i] / deviations[i+1]`: > 1 means the next, slower run
    /// tracked the geodesic better.
    pub ratios: Vec<f64>,
    /// Slow time of the geodesic's closest approach, when it comes nearer
    /// than the chart-switch distance.
    pub collision_tau: Option<f64>,
    pub geodesic: Vec<GeodesicPoint>,
    pub runs: Vec<AdiabaticRun>,
}

/// For each `eps` in the (strictly decreasing) list: prepare the state at
/// `eps` times the moduli velocity, evolve to `t = tau_end / eps`, read the
/// zeros at the geodesic's slow-time samples, and take the sup-deviation
/// from the geodesic in the geodesic's active chart. A failed sub-run marks
/// its slot and leaves the rest of the report intact.
pub fn adiabatic_compare(
    pde_grid: &TorusGrid,
    zeros0: &[Complex64],
    velocity0: &[Complex64],
    eps_list: &[f64],
    tau_end: f64,
    opts: &AdiabaticOptions,
) -> Result<AdiabaticReport> {
    if eps_list.is_empty() {
        return Err(Error::Domain("adiabatic eps list is empty".into()));
    }
    for pair in eps_list.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::Domain(
                "adiabatic eps list must be strictly decreasing".into(),
            ));
        }
    }
    if !(eps_list[eps_list.len() - 1] > 0.0) || !(tau_end > 0.0) {
        return Err(Error::Domain(
            "adiabatic comparison needs eps > 0 and tau_end > 0".into(),
        ));
    }

    let metric_grid = match &opts.metric_grid {
        Some(g) => {
            if (g.lx() - pde_grid.lx()).abs() > 1e-12 || (g.ly() - pde_grid.ly()).abs() > 1e-12 {
                return Err(Error::Domain(
                    "metric grid must span the same torus as the PDE grid".into(),
                ));
            }
            g.clone()
        }
        None => pde_grid.clone(),
    };

    let geodesic = integrate_geodesic(&metric_grid, zeros0, velocity0, tau_end, &opts.geo)?;
    let n_geo = geodesic.len() - 1;
    let dtau = tau_end / n_geo as f64;

    let collision_tau = if zeros0.len() >= 2 {
        let (mut tau_c, mut sep_min) = (0.0, f64::INFINITY);
        for p in &geodesic {
            let sep = min_separation(pde_grid, &p.zeros);
            if sep < sep_min {
                sep_min = sep;
                tau_c = p.tau;
            }
        }
        (sep_min < opts.geo.switch_in).then_some(tau_c)
    } else {
        None
    };

    // The tangent basis on the PDE grid does not depend on eps; build it
    // once and share it across the runs.
    let basis = TangentBasis::at_zeros(pde_grid, zeros0, &opts.geo.moduli)?;

    let mut runs = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        match run_one(
            pde_grid,
            &basis,
            velocity0,
            eps,
            &geodesic,
            dtau,
            collision_tau,
            opts,
        ) {
            Ok(run) => runs.push(run),
            Err(e) => runs.push(AdiabaticRun {
                eps,
                trajectory: ZeroTrajectory {
                    samples: Vec::new(),
                    crossings: Vec::new(),
                },
                deviations: Vec::new(),
                kinetic: Vec::new(),
                sup_deviation: f64::NAN,
                collision_deviation: None,
                failure: Some(e.to_string()),
            }),
        }
    }

    let deviations: Vec<f64> = runs.iter().map(|r| r.sup_deviation).collect();
    let ratios: Vec<f64> = deviations
        .windows(2)
        .map(|w| w[0] / w[1])
        .collect();
    Ok(AdiabaticReport {
        eps: eps_list.to_vec(),
        deviations,
        ratios,
        collision_tau,
        geodesic,
        runs,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    pde_grid: &TorusGrid,
    basis: &TangentBasis,
    velocity0: &[Complex64],
    eps: f64,
    geodesic: &[GeodesicPoint],
    dtau: f64,
    collision_tau: Option<f64>,
    opts: &AdiabaticOptions,
) -> Result<AdiabaticRun> {
    let prep = prepared_from_basis(basis, velocity0, eps)?;
    let n_geo = geodesic.len() - 1;

    // One slow sample per geodesic point, sub-stepped to the stability
    // target so the samples land exactly on tau_k = k * dtau.
    let dt_target = opts.cfl_frac * crate::dynamics::stability_limit(pde_grid);
    let dt_slow = dtau / eps;
    let n_sub = (dt_slow / dt_target).ceil().max(1.0) as usize;
    let dt = dt_slow / n_sub as f64;

    let mut tracker = ZeroTracker::new();
    let mut deviations: Vec<(f64, f64)> = Vec::with_capacity(n_geo + 1);
    let mut kinetic: Vec<(f64, f64)> = Vec::with_capacity(n_geo + 1);

    tracker.push_state(&prep.state)?;
    deviations.push((
        0.0,
        chart_deviation(pde_grid, &geodesic[0], tracker.last_zeros().unwrap())?,
    ));
    kinetic.push((0.0, prep.state.kinetic_energy()));

    let mut k = 0usize;
    evolve_sampled(prep.state, dt, n_sub * n_geo, n_sub, |s| {
        k += 1;
        let tau = k as f64 * dtau;
        tracker.push_state(s)?;
        deviations.push((
            tau,
            chart_deviation(pde_grid, &geodesic[k], tracker.last_zeros().unwrap())?,
        ));
        kinetic.push((tau, s.kinetic_energy()));
        Ok(())
    })
    .map(drop)?;

    let in_window = |tau: f64| {
        collision_tau.is_some_and(|tc| (tau - tc).abs() < opts.collision_window)
    };
    let mut sup = 0.0f64;
    let mut coll: Option<f64> = None;
    for &(tau, dev) in &deviations {
        if in_window(tau) {
            let c = coll.get_or_insert(0.0);
            *c = c.max(dev);
        } else {
            sup = sup.max(dev);
        }
    }

    Ok(AdiabaticRun {
        eps,
        trajectory: tracker.finish(),
        deviations,
        kinetic,
        sup_deviation: sup,
        collision_deviation: coll,
        failure: None,
    })
}

/// Distance between a PDE zero multiset and a geodesic point, in the chart
/// the geodesic currently uses: matched sup position distance, or Euclidean
/// distance of polynomial coefficients (labels are meaningless there).
fn chart_deviation(
    grid: &TorusGrid,
    reference: &GeodesicPoint,
    zeros: &[Complex64],
) -> Result<f64> {
    match reference.chart {
        Chart::Positions => Ok(best_matching(grid, &reference.zeros, zeros)?.1),
        Chart::Coefficients => {
            let (perm, _) = best_matching(grid, &reference.zeros, zeros)?;
            // Lift each located zero to the lattice representative nearest
            // its geodesic partner, so the coefficients are built from the
            // same branch of the covering as the reference's coordinates.
            let lifted: Vec<Complex64> = reference
                .zeros
                .iter()
                .zip(perm.iter())
                .map(|(&gz, &j)| nearest_lift(grid, zeros[j], gz))
                .collect();
            let u = zero_coords(Chart::Coefficients, &lifted);
            let dist2: f64 = u
                .iter()
                .zip(&reference.u)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Ok(dist2.sqrt())
        }
    }
}

/// The lattice translate of `z` nearest to `target`.
fn nearest_lift(grid: &TorusGrid, z: Complex64, target: Complex64) -> Complex64 {
    let re = z.re + grid.lx() * ((target.re - z.re) / grid.lx()).round();
    let im = z.im + grid.ly() * ((target.im - z.im) / grid.ly()).round();
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex::{solve_vortex, torus_dist, SolveOptions};

    #[test]
    fn prepared_kinetic_energy_scales_quadratically() {
        let g = TorusGrid::new(32, 32, 10.0, 10.0).unwrap();
        let zeros = [Complex64::new(3.5, 5.0), Complex64::new(6.5, 5.0)];
        let vel = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let opts = ModuliOptions::default();

        let p2 = prepare_adiabatic_state(&g, &zeros, &vel, 0.2, &opts).unwrap();
        let p1 = prepare_adiabatic_state(&g, &zeros, &vel, 0.1, &opts).unwrap();
        let t2 = p2.state.kinetic_energy();
        let t1 = p1.state.kinetic_energy();
        assert!(t2 > 0.0);
        assert!(
            (t2 / t1 - 4.0).abs() < 1e-3,
            "kinetic ratio {} should be 4",
            t2 / t1
        );
        // T = eps^2 * (1/2 v^T g v) because the tangent map is linear and
        // the metric is the Gram matrix of the same tangents.
        let expect = 0.2 * 0.2 * p2.moduli_energy;
        assert!(
            (t2 / expect - 1.0).abs() < 1e-4,
            "kinetic {t2} vs metric quadratic {expect}"
        );
    }

    #[test]
    fn zero_eps_is_static_with_zero_kinetic_energy() {
        let g = TorusGrid::new(24, 24, 8.0, 8.0).unwrap();
        let zeros = [Complex64::new(4.0, 4.0)];
        let vel = [Complex64::new(1.0, 0.5)];
        let p = prepare_adiabatic_state(&g, &zeros, &vel, 0.0, &ModuliOptions::default()).unwrap();
        assert_eq!(p.state.kinetic_energy(), 0.0);
        assert!(p.moduli_energy > 0.0);
    }

    #[test]
    fn static_run_has_constant_trajectory() {
        let g = TorusGrid::new(24, 24, 8.0, 8.0).unwrap();
        let zeros = [Complex64::new(3.0, 5.0)];
        let sol = solve_vortex(&g, &zeros, &SolveOptions::default()).unwrap();
        let state = DynState::at_rest(sol.fields);
        let mut states = vec![state.clone()];
        evolve_sampled(state, 0.05, 40, 10, |s| {
            states.push(s.clone());
            Ok(())
        })
        .unwrap();
        let tr = zero_trajectory(&states).unwrap();
        assert_eq!(tr.samples.len(), 5);
        assert!(tr.crossings.is_empty());
        let z0 = tr.samples[0].1[0];
        for (_, zs) in &tr.samples {
            assert!(torus_dist(&g, zs[0], z0) < 1e-6, "zero moved to {}", zs[0]);
        }
    }

    #[test]
    fn tracker_flags_ambiguous_crossing() {
        let g = TorusGrid::new(16, 16, 10.0, 10.0).unwrap();
        let mut tracker = ZeroTracker::new();
        tracker
            .push_zeros(&g, 0.0, vec![Complex64::new(4.0, 5.0), Complex64::new(6.0, 5.0)])
            .unwrap();
        // Small clean step: labels unambiguous.
        tracker
            .push_zeros(&g, 1.0, vec![Complex64::new(4.2, 5.0), Complex64::new(6.0, 5.0)])
            .unwrap();
        assert!(tracker.crossings.is_empty());
        // Both candidates jump by about the separation: ambiguous.
        tracker
            .push_zeros(&g, 2.0, vec![Complex64::new(5.1, 5.0), Complex64::new(4.9, 5.0)])
            .unwrap();
        assert_eq!(tracker.crossings.len(), 1);
        let ev = &tracker.crossings[0];
        assert!((ev.t - 2.0).abs() == 0.0);
        assert!(ev.branches[0] != ev.branches[1]);
    }

    #[test]
    fn eps_list_must_decrease() {
        let g = TorusGrid::new(16, 16, 10.0, 10.0).unwrap();
        let zeros = [Complex64::new(5.0, 5.0)];
        let vel = [Complex64::new(1.0, 0.0)];
        let err = adiabatic_compare(&g, &zeros, &vel, &[0.1, 0.2], 1.0, &AdiabaticOptions::default());
        assert!(err.is_err());
        let err = adiabatic_compare(&g, &zeros, &vel, &[], 1.0, &AdiabaticOptions::default());
        assert!(err.is_err());
    }
}
