//! One function per subcommand, split into two phases. `prepare` reads every
//! configuration key it recognizes and reports problems through the
//! [`Cfg`] violation channel, so a broken run lists all of its mistakes at
//! once instead of dying on the first. It hands back a closure that does the
//! actual work; the caller only invokes it once the configuration is clean.
//!
//! All numeric output goes through [`Table`], which formats every cell the
//! same way; two runs with the same configuration and seed produce
//! byte-identical data files.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vortexlab::vortex::locate_zeros;
use vortexlab::{
    adiabatic_compare, build_spin_rep, clifford_product, dirac_clifford, dirac_dbar,
    evolve_sampled, export_field_csv, integrate_geodesic, localization_scan, moduli_metric,
    project_constraint, quadratic_map, read_snapshot, rho, sigma_pm, solve_vortex,
    stability_limit, volume_element, write_fields, write_state, zero_trajectory, AdiabaticOptions,
    Chart, CliffordElement, DynState, Form, GeodesicOptions, Half, KahlerTorus, ModuliOptions,
    SolveOptions, SpinRep, SpinorField, SwConnection, Table, TorusGrid,
};

use crate::config::Cfg;
use crate::manifest::Manifest;

/// A fully configured run, ready to execute into an output directory.
pub type Job = Box<dyn FnOnce(&Path, &mut Manifest) -> anyhow::Result<()>>;

/// Read the configuration for `name` and build its job. `None` means the
/// configuration was unusable; the violations recorded in `cfg` say why.
pub fn prepare(name: &str, cfg: &Cfg, seed: u64) -> Option<Job> {
    match name {
        "solve-vortex" => solve_vortex_job(cfg),
        "evolve" => evolve_job(cfg),
        "metric" => metric_job(cfg),
        "geodesic" => geodesic_job(cfg),
        "adiabatic-compare" => adiabatic_job(cfg),
        "clifford-check" => clifford_job(cfg, seed),
        "dirac-check" => dirac_job(cfg, seed),
        "sw-scan" => sw_scan_job(cfg),
        other => {
            cfg.violation(format!("unknown command {other:?}"));
            None
        }
    }
}

// ---------------------------------------------------------------------------
// shared configuration readers

fn grid_from(cfg: &Cfg, n_default: usize, l_default: f64) -> Option<TorusGrid> {
    let nx = cfg.usize("grid.nx", n_default);
    let ny = cfg.usize("grid.ny", nx);
    let lx = cfg.f64("grid.lx", l_default);
    let ly = cfg.f64("grid.ly", lx);
    match TorusGrid::new(nx, ny, lx, ly) {
        Ok(g) => Some(g),
        Err(e) => {
            cfg.violation(format!("grid: {e}"));
            None
        }
    }
}

/// Zeros either inline (`zeros = 1+2i; -0.5`) or from a file with one entry
/// per line (`zeros_file = moduli.txt`). Absent means none: degree zero.
fn zeros_from(cfg: &Cfg) -> Option<Vec<Complex64>> {
    let inline = cfg.complex_list("zeros");
    let file = cfg.path("zeros_file");
    match (inline, file) {
        (Some(_), Some(_)) => {
            cfg.violation("zeros and zeros_file are mutually exclusive");
            None
        }
        (Some(zs), None) => Some(zs),
        (None, Some(p)) => {
            let text = match fs::read_to_string(&p) {
                Ok(t) => t,
                Err(e) => {
                    cfg.violation(format!("zeros_file {}: {e}", p.display()));
                    return None;
                }
            };
            match vortexlab::parse_moduli(&text) {
                Ok(zs) => Some(zs),
                Err(e) => {
                    cfg.violation(format!("zeros_file {}: {e}", p.display()));
                    None
                }
            }
        }
        (None, None) => Some(Vec::new()),
    }
}

fn solve_opts_from(cfg: &Cfg) -> SolveOptions {
    let d = SolveOptions::default();
    SolveOptions {
        tol: cfg.f64("solve.tol", d.tol),
        max_newton: cfg.usize("solve.max_newton", d.max_newton),
        cg_tol: cfg.f64("solve.cg_tol", d.cg_tol),
        cg_max: cfg.usize("solve.cg_max", d.cg_max),
        v_init: None,
    }
}

fn moduli_opts_from(cfg: &Cfg) -> ModuliOptions {
    let d = ModuliOptions::default();
    // delta = 0 means "choose from the grid spacing", the library default.
    let delta = cfg.f64("moduli.delta", 0.0);
    ModuliOptions {
        solve: solve_opts_from(cfg),
        delta: (delta > 0.0).then_some(delta),
        min_eig_frac: cfg.f64("moduli.min_eig_frac", d.min_eig_frac),
    }
}

fn geodesic_opts_from(cfg: &Cfg) -> GeodesicOptions {
    let d = GeodesicOptions::default();
    GeodesicOptions {
        dtau: cfg.f64("geodesic.dtau", d.dtau),
        switch_in: cfg.f64("geodesic.switch_in", d.switch_in),
        switch_out: cfg.f64("geodesic.switch_out", d.switch_out),
        moduli: moduli_opts_from(cfg),
    }
}

/// The static solver's feasibility conditions, surfaced as configuration
/// violations so they are reported together with everything else.
fn check_solvable(cfg: &Cfg, grid: &TorusGrid, zeros: &[Complex64]) {
    let bound = 4.0 * PI * zeros.len() as f64;
    if zeros.is_empty() {
        return;
    }
    if grid.area() <= bound {
        cfg.violation(format!(
            "torus area {:.4} does not exceed the bound {:.4} required for {} zeros",
            grid.area(),
            bound,
            zeros.len()
        ));
    }
    let spacing = grid.hx().max(grid.hy());
    if spacing > 0.7 {
        cfg.violation(format!(
            "grid spacing {spacing:.4} exceeds 0.7 and cannot resolve a vortex core"
        ));
    }
}

fn velocity_from(cfg: &Cfg, zeros: Option<&[Complex64]>) -> Option<Vec<Complex64>> {
    let vel = match cfg.complex_list("velocity") {
        Some(v) => v,
        None => {
            cfg.violation("velocity is required (a semicolon-separated complex list)");
            return None;
        }
    };
    if let Some(zs) = zeros {
        if vel.len() != zs.len() {
            cfg.violation(format!(
                "velocity has {} entries but there are {} zeros",
                vel.len(),
                zs.len()
            ));
            return None;
        }
    }
    Some(vel)
}

fn mat_sup(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// solve-vortex

fn solve_vortex_job(cfg: &Cfg) -> Option<Job> {
    let opts = solve_opts_from(cfg);
    let grid = grid_from(cfg, 64, 8.0);
    let zeros = zeros_from(cfg);
    let (grid, zeros) = (grid?, zeros?);
    check_solvable(cfg, &grid, &zeros);
    Some(Box::new(move |out, man| {
        let sol = man.time("solve", || solve_vortex(&grid, &zeros, &opts))?;
        let energy = sol.fields.potential_energy()?;
        let flux = sol.fields.vortex_number()?;
        let degree = sol.fields.degree();

        write_fields(&out.join("solution.glsn"), &sol.fields, 0.0)?;
        man.output("solution.glsn");
        export_field_csv(&out.join("field.csv"), &sol.fields)?;
        man.output("field.csv");

        let mut summary = Table::create(
            &out.join("summary.csv"),
            &["degree", "energy", "flux", "residual_sup", "newton_iters"],
        )?;
        summary.row(&[
            degree as f64,
            energy,
            flux,
            sol.residual_sup,
            sol.newton_iters as f64,
        ])?;
        summary.finish()?;
        man.output("summary.csv");

        let mut ztab = Table::create(&out.join("zeros.csv"), &["re", "im"])?;
        if degree > 0 {
            for z in locate_zeros(&sol.fields)? {
                ztab.row(&[z.re, z.im])?;
            }
        }
        ztab.finish()?;
        man.output("zeros.csv");

        man.note("degree", degree);
        man.note("energy", format!("{energy:.12e}"));
        man.note("residual_sup", format!("{:.3e}", sol.residual_sup));
        man.note("newton_iters", sol.newton_iters);
        println!(
            "[solve-vortex] degree {degree}: energy {energy:.9}, residual {:.3e} after {} Newton steps",
            sol.residual_sup, sol.newton_iters
        );
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// evolve

enum Start {
    File(PathBuf),
    Fresh(TorusGrid, Vec<Complex64>, SolveOptions),
}

fn evolve_job(cfg: &Cfg) -> Option<Job> {
    let t_end = cfg.f64("t_end", 4.0);
    let dt_cfg = cfg.f64("dt", 0.0); // 0 = pick from the stability limit
    let cfl_frac = cfg.f64("cfl_frac", 0.4);
    let sample_every = cfg.usize("sample_every", 10);
    let snapshot_every = cfg.usize("snapshot_every", 0);
    let project = cfg.bool("project", true);
    if !(t_end > 0.0) {
        cfg.violation("t_end must be positive");
    }
    if sample_every == 0 {
        cfg.violation("sample_every must be at least 1");
    }
    if dt_cfg == 0.0 && !(cfl_frac > 0.0 && cfl_frac < 1.0) {
        cfg.violation("cfl_frac must lie strictly between 0 and 1");
    }

    let start = if let Some(p) = cfg.path("initial") {
        for key in [
            "grid.nx",
            "grid.ny",
            "grid.lx",
            "grid.ly",
            "zeros",
            "zeros_file",
            "solve.tol",
            "solve.max_newton",
            "solve.cg_tol",
            "solve.cg_max",
        ] {
            cfg.forbid(key, "is ignored when `initial` is set");
        }
        Start::File(p)
    } else {
        let opts = solve_opts_from(cfg);
        let grid = grid_from(cfg, 64, 8.0);
        let zeros = zeros_from(cfg);
        let (grid, zeros) = (grid?, zeros?);
        check_solvable(cfg, &grid, &zeros);
        Start::Fresh(grid, zeros, opts)
    };

    Some(Box::new(move |out, man| {
        let mut state = match start {
            Start::File(p) => {
                let snap =
                    read_snapshot(&p).with_context(|| format!("reading {}", p.display()))?;
                if snap.velocities.is_some() {
                    snap.into_state()?
                } else {
                    snap.into_state_at_rest()
                }
            }
            Start::Fresh(grid, zeros, opts) => {
                let sol = man.time("solve", || solve_vortex(&grid, &zeros, &opts))?;
                DynState::at_rest(sol.fields)
            }
        };
        let grid = state.fields.grid().clone();
        let degree = state.fields.degree();
        let limit = stability_limit(&grid);
        let dt = if dt_cfg > 0.0 { dt_cfg } else { cfl_frac * limit };
        let n_steps = (t_end / dt).ceil() as usize;
        if project {
            project_constraint(&mut state)?;
        }

        let track = degree > 0;
        let mut energies: Vec<[f64; 5]> = Vec::new();
        let mut collected: Vec<DynState> = Vec::new();
        let mut snapshots: Vec<String> = Vec::new();
        let mut samples = 0usize;
        let mut record = |s: &DynState| -> vortexlab::Result<()> {
            let er = s.energy_report()?;
            energies.push([er.t, er.kinetic, er.potential, er.total, er.gauss_sup]);
            if track {
                collected.push(s.clone());
            }
            if samples > 0 && snapshot_every > 0 && samples % snapshot_every == 0 {
                let name = format!("state_{:06}.glsn", samples);
                write_state(&out.join(&name), s)?;
                snapshots.push(name);
            }
            samples += 1;
            Ok(())
        };
        record(&state)?;
        let final_state = man.time("evolve", || {
            evolve_sampled(state, dt, n_steps, sample_every, |s| record(s))
        })?;
        drop(record);

        write_state(&out.join("state.glsn"), &final_state)?;

        let mut columns = vec![
            "t".to_string(),
            "kinetic".to_string(),
            "potential".to_string(),
            "total".to_string(),
            "gauss_sup".to_string(),
        ];
        for k in 1..=degree.max(0) {
            columns.push(format!("z{k}_re"));
            columns.push(format!("z{k}_im"));
        }
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut trace = Table::create(&out.join("trace.csv"), &names)?;
        let traj = if track {
            Some(zero_trajectory(&collected)?)
        } else {
            None
        };
        for (i, e) in energies.iter().enumerate() {
            let mut row = e.to_vec();
            if let Some(tr) = &traj {
                for z in &tr.samples[i].1 {
                    row.push(z.re);
                    row.push(z.im);
                }
            }
            trace.row(&row)?;
        }
        trace.finish()?;
        man.output("trace.csv");
        for name in snapshots {
            man.output(name);
        }
        man.output("state.glsn");

        let e0 = energies.first().map(|e| e[3]).unwrap_or(0.0);
        let drift = energies
            .iter()
            .map(|e| (e[3] - e0).abs())
            .fold(0.0, f64::max);
        let gauss = energies.iter().map(|e| e[4]).fold(0.0, f64::max);
        man.note("dt", format!("{dt:.6e}"));
        man.note("steps", n_steps);
        man.note("energy_drift", format!("{drift:.3e}"));
        man.note("gauss_sup", format!("{gauss:.3e}"));
        if let Some(tr) = &traj {
            man.note("zero_label_crossings", tr.crossings.len());
        }
        println!(
            "[evolve] {} steps at dt {dt:.4e} to t {:.4}: energy drift {drift:.3e}, constraint sup {gauss:.3e}",
            n_steps, final_state.t
        );
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// metric

fn metric_job(cfg: &Cfg) -> Option<Job> {
    let opts = moduli_opts_from(cfg);
    let grid = grid_from(cfg, 64, 8.0);
    let zeros = zeros_from(cfg);
    let (grid, zeros) = (grid?, zeros?);
    if zeros.is_empty() {
        cfg.violation("zeros must be nonempty; the vacuum has no moduli");
        return None;
    }
    check_solvable(cfg, &grid, &zeros);
    Some(Box::new(move |out, man| {
        let g = man.time("metric", || moduli_metric(&grid, &zeros, &opts))?;
        let dim = g.nrows();
        let columns: Vec<String> = (1..=dim).map(|j| format!("c{j}")).collect();
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut table = Table::create(&out.join("metric.csv"), &names)?;
        for i in 0..dim {
            let row: Vec<f64> = (0..dim).map(|j| g[(i, j)]).collect();
            table.row(&row)?;
        }
        table.finish()?;
        man.output("metric.csv");

        let mut asym = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                asym = asym.max((g[(i, j)] - g[(j, i)]).abs());
            }
        }
        let trace: f64 = (0..dim).map(|i| g[(i, i)]).sum();
        man.note("dimension", dim);
        man.note("trace", format!("{trace:.12e}"));
        man.note("asymmetry_sup", format!("{asym:.3e}"));
        println!(
            "[metric] {} zeros: {dim}x{dim} matrix, trace {trace:.9}, asymmetry {asym:.3e}",
            zeros.len()
        );
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// geodesic

fn geodesic_job(cfg: &Cfg) -> Option<Job> {
    let opts = geodesic_opts_from(cfg);
    let tau_end = cfg.f64("tau_end", 1.0);
    let write_every = cfg.usize("write_every", 1);
    if !(tau_end > 0.0) {
        cfg.violation("tau_end must be positive");
    }
    if write_every == 0 {
        cfg.violation("write_every must be at least 1");
    }
    let grid = grid_from(cfg, 64, 8.0);
    let zeros = zeros_from(cfg);
    let vel = velocity_from(cfg, zeros.as_deref());
    let (grid, zeros) = (grid?, zeros?);
    if zeros.is_empty() {
        cfg.violation("zeros must be nonempty; the vacuum has no moduli");
        return None;
    }
    let vel = vel?;
    check_solvable(cfg, &grid, &zeros);
    Some(Box::new(move |out, man| {
        let path = man.time("integrate", || {
            integrate_geodesic(&grid, &zeros, &vel, tau_end, &opts)
        })?;
        let degree = zeros.len();
        let mut columns = vec!["tau".to_string(), "chart".to_string()];
        for k in 1..=degree {
            columns.push(format!("z{k}_re"));
            columns.push(format!("z{k}_im"));
        }
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut table = Table::create(&out.join("geodesic.csv"), &names)?;
        let last = path.len().saturating_sub(1);
        for (i, p) in path.iter().enumerate() {
            if i % write_every != 0 && i != last {
                continue;
            }
            let chart = match p.chart {
                Chart::Positions => 0.0,
                Chart::Coefficients => 1.0,
            };
            let mut row = vec![p.tau, chart];
            for z in &p.zeros {
                row.push(z.re);
                row.push(z.im);
            }
            table.row(&row)?;
        }
        table.finish()?;
        man.output("geodesic.csv");

        let switches = path
            .windows(2)
            .filter(|w| w[0].chart != w[1].chart)
            .count();
        man.note("points", path.len());
        man.note("chart_switches", switches);
        if let Some(p) = path.last() {
            let ends: Vec<String> = p
                .zeros
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            man.note("final_zeros", ends.join("; "));
        }
        println!(
            "[geodesic] {} samples to tau {tau_end}: {} chart switches",
            path.len(),
            switches
        );
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// adiabatic-compare

fn adiabatic_job(cfg: &Cfg) -> Option<Job> {
    let tau_end = cfg.f64("tau_end", 1.0);
    if !(tau_end > 0.0) {
        cfg.violation("tau_end must be positive");
    }
    let eps = cfg.f64_list("eps").unwrap_or_else(|| vec![0.2, 0.1, 0.05]);
    if eps.is_empty() {
        cfg.violation("eps must list at least one value");
    }
    for &e in &eps {
        if !(e > 0.0 && e.is_finite()) {
            cfg.violation(format!("eps entry {e} must be positive and finite"));
        }
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        cfg.violation("eps must be strictly decreasing");
    }
    let mut opts = AdiabaticOptions {
        geo: geodesic_opts_from(cfg),
        metric_grid: None,
        cfl_frac: cfg.f64("cfl_frac", 0.8),
        collision_window: cfg.f64("collision_window", 0.05),
    };
    let grid = grid_from(cfg, 64, 8.0);
    if let Some(n) = cfg.f64_list("metric_grid") {
        match n.as_slice() {
            &[nx] if nx > 0.0 && nx.fract() == 0.0 => {
                if let Some(g) = &grid {
                    match TorusGrid::new(nx as usize, nx as usize, g.lx(), g.ly()) {
                        Ok(mg) => opts.metric_grid = Some(mg),
                        Err(e) => cfg.violation(format!("metric_grid: {e}")),
                    }
                }
            }
            _ => cfg.violation("metric_grid must be a single positive integer point count"),
        }
    }
    let zeros = zeros_from(cfg);
    let vel = velocity_from(cfg, zeros.as_deref());
    let (grid, zeros) = (grid?, zeros?);
    if zeros.is_empty() {
        cfg.violation("zeros must be nonempty; the vacuum has no moduli");
        return None;
    }
    let vel = vel?;
    check_solvable(cfg, &grid, &zeros);
    Some(Box::new(move |out, man| {
        let report = man.time("compare", || {
            adiabatic_compare(&grid, &zeros, &vel, &eps, tau_end, &opts)
        })?;
        let mut table = Table::create(&out.join("compare.csv"), &["eps", "deviation", "ratio"])?;
        for (i, (&e, &dev)) in report.eps.iter().zip(&report.deviations).enumerate() {
            let ratio = report.ratios.get(i).copied().unwrap_or(f64::NAN);
            table.row(&[e, dev, ratio])?;
        }
        table.finish()?;
        man.output("compare.csv");

        for (i, run) in report.runs.iter().enumerate() {
            man.note(
                &format!("deviation_eps_{}", report.eps[i]),
                format!("{:.6e}", run.sup_deviation),
            );
        }
        if let Some(tau) = report.collision_tau {
            man.note("collision_tau", format!("{tau:.4}"));
        }
        let ratios: Vec<String> = report.ratios.iter().map(|r| format!("{r:.3}")).collect();
        man.note("ratios", ratios.join(", "));
        println!(
            "[adiabatic-compare] deviations {:?} at eps {:?}; successive ratios [{}]",
            report
                .deviations
                .iter()
                .map(|d| format!("{d:.4e}"))
                .collect::<Vec<_>>(),
            report.eps,
            ratios.join(", ")
        );
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// clifford-check

fn clifford_job(cfg: &Cfg, seed: u64) -> Option<Job> {
    let m_max = cfg.usize("m_max", 3);
    let samples = cfg.usize("samples", 20);
    let tol = cfg.f64("tol", 1e-12);
    if m_max == 0 || m_max > 5 {
        cfg.violation("m_max must lie between 1 and 5");
    }
    if !(tol > 0.0) {
        cfg.violation("tol must be positive");
    }
    Some(Box::new(move |out, man| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = Table::create(&out.join("checks.csv"), &["check", "defect", "tol"])?;
        let mut failures: Vec<String> = Vec::new();
        let mut check = |table: &mut Table, label: String, defect: f64| -> anyhow::Result<()> {
            table.labeled_row(&label, &[defect, tol])?;
            let ok = defect.is_finite() && defect <= tol;
            println!(
                "[clifford-check] {label}: {} ({defect:.3e})",
                if ok { "ok" } else { "FAIL" }
            );
            if !ok {
                failures.push(label);
            }
            Ok(())
        };

        for m in 1..=m_max {
            let n = 2 * m as u32;
            let rep = build_spin_rep(m)?;
            check(
                &mut table,
                format!("anticommutators_m{m}"),
                anticommutator_defect(&rep)?,
            )?;
            check(
                &mut table,
                format!("blade_multiplicativity_m{m}"),
                blade_multiplicativity_defect(&rep, n)?,
            )?;
            check(
                &mut table,
                format!("random_multiplicativity_m{m}"),
                random_multiplicativity_defect(&rep, n, samples, &mut rng)?,
            )?;
            check(
                &mut table,
                format!("volume_grading_m{m}"),
                volume_defect(&rep, n)?,
            )?;
        }
        if m_max >= 2 {
            let rep = build_spin_rep(2)?;
            check(
                &mut table,
                "duality_split_m2".to_string(),
                duality_defect(&rep, samples, &mut rng)?,
            )?;
            check(
                &mut table,
                "spinor_square_m2".to_string(),
                spinor_square_defect(&rep, samples, &mut rng)?,
            )?;
        }
        table.finish()?;
        man.output("checks.csv");
        man.note("failures", failures.len());
        if !failures.is_empty() {
            bail!("{} identity check(s) failed: {}", failures.len(), failures.join(", "));
        }
        Ok(())
    }))
}

fn anticommutator_defect(rep: &SpinRep) -> anyhow::Result<f64> {
    let dim = rep.dim();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let mut defect = 0.0f64;
    for i in 1..=rep.n() {
        for j in i..=rep.n() {
            let gi = rep.gamma(i);
            let gj = rep.gamma(j);
            let mut anti = gi * gj + gj * gi;
            if i == j {
                anti += id.scale(2.0);
            }
            defect = defect.max(mat_sup(&anti));
        }
    }
    Ok(defect)
}

/// Exhaustive over basis-blade pairs: the matrix of the algebra product must
/// equal the product of the matrices.
fn blade_multiplicativity_defect(rep: &SpinRep, n: u32) -> anyhow::Result<f64> {
    let mut defect = 0.0f64;
    let masks = 1u32 << n;
    for a in 0..masks {
        let ea = CliffordElement::basis_blade(n, a)?;
        let ga = rep.gamma_element(&ea)?;
        for b in 0..masks {
            let eb = CliffordElement::basis_blade(n, b)?;
            let prod = clifford_product(&ea, &eb)?;
            let lhs = rep.gamma_element(&prod)?;
            defect = defect.max(mat_sup(&(lhs - &ga * rep.gamma_element(&eb)?)));
        }
    }
    Ok(defect)
}

fn random_element(n: u32, rng: &mut ChaCha8Rng) -> anyhow::Result<CliffordElement> {
    let masks = 1u32 << n;
    let scale = 1.0 / masks as f64;
    let mut acc = CliffordElement::zero(n)?;
    for mask in 0..masks {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        acc = acc.add(&CliffordElement::basis_blade(n, mask)?.scale(c * scale))?;
    }
    Ok(acc)
}

fn random_multiplicativity_defect(
    rep: &SpinRep,
    n: u32,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<f64> {
    let mut defect = 0.0f64;
    for _ in 0..samples {
        let x = random_element(n, rng)?;
        let y = random_element(n, rng)?;
        let lhs = rep.gamma_element(&clifford_product(&x, &y)?)?;
        let rhs = rep.gamma_element(&x)? * rep.gamma_element(&y)?;
        defect = defect.max(mat_sup(&(lhs - rhs)));
    }
    Ok(defect)
}

/// The volume element anticommutes with every generator (odd element, even
/// dimension) and its represented square matches the algebra square.
fn volume_defect(rep: &SpinRep, n: u32) -> anyhow::Result<f64> {
    let omega = volume_element(n)?;
    let gw = rep.gamma_element(&omega)?;
    let mut defect = 0.0f64;
    for i in 1..=rep.n() {
        let gi = rep.gamma(i);
        defect = defect.max(mat_sup(&(&gw * gi + gi * &gw)));
    }
    let sq = clifford_product(&omega, &omega)?;
    defect = defect.max(mat_sup(&(&gw * &gw - rep.gamma_element(&sq)?)));
    Ok(defect)
}

fn random_two_form(rng: &mut ChaCha8Rng) -> anyhow::Result<Form> {
    let mut f = Form::zero(4, 2)?;
    for i in 1..=4u32 {
        for j in i + 1..=4 {
            let c = Complex64::new(0.0, rng.gen_range(-3.0..3.0));
            f = f.add(&Form::from_indices(4, &[i, j], c)?)?;
        }
    }
    Ok(f)
}

/// A two-form splits into dual halves that sum back, each half acts only on
/// its own semi-spinor bundle, and `sigma` reconstructs it from that action.
fn duality_defect(rep: &SpinRep, samples: usize, rng: &mut ChaCha8Rng) -> anyhow::Result<f64> {
    let minus_one = Complex64::new(-1.0, 0.0);
    let mut defect = 0.0f64;
    for _ in 0..samples {
        let f = random_two_form(rng)?;
        let sd = f.selfdual_part()?;
        let asd = f.antiselfdual_part()?;
        defect = defect.max(sd.add(&asd)?.add(&f.scale(minus_one))?.sup());
        defect = defect.max(mat_sup(&rep.restrict(&rho(&sd, rep)?, Half::Minus)));
        defect = defect.max(mat_sup(&rep.restrict(&rho(&asd, rep)?, Half::Plus)));
        for (half, part) in [(Half::Plus, &sd), (Half::Minus, &asd)] {
            let endo = rep.restrict(&rho(part, rep)?, half);
            let back = sigma_pm(rep, &endo, half)?;
            defect = defect.max(back.add(&part.scale(minus_one))?.sup());
        }
    }
    Ok(defect)
}

/// The traceless spinor square is an imaginary selfdual form, quadratic in
/// the spinor, and round-trips through `sigma`.
fn spinor_square_defect(rep: &SpinRep, samples: usize, rng: &mut ChaCha8Rng) -> anyhow::Result<f64> {
    let mut defect = 0.0f64;
    for _ in 0..samples {
        let phi = [
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ];
        let q = quadratic_map(rep, &phi)?;
        let eta = sigma_pm(rep, &q, Half::Plus)?;
        defect = defect.max(eta.antiselfdual_part()?.sup());
        let re_sup = eta
            .terms()
            .map(|(_, c)| c.re.abs())
            .fold(0.0f64, f64::max);
        defect = defect.max(re_sup);
        let phi2: Vec<Complex64> = phi.iter().map(|z| 2.0 * z).collect();
        let eta2 = sigma_pm(rep, &quadratic_map(rep, &phi2)?, Half::Plus)?;
        defect = defect.max(eta2.add(&eta.scale(Complex64::new(-4.0, 0.0)))?.sup());
        let back = rep.restrict(&rho(&eta, rep)?, Half::Plus);
        defect = defect.max(mat_sup(&(back - q)));
    }
    Ok(defect)
}

// ---------------------------------------------------------------------------
// dirac-check

fn dirac_job(cfg: &Cfg, seed: u64) -> Option<Job> {
    let sizes = cfg
        .f64_list("sizes")
        .unwrap_or_else(|| vec![8.0, 16.0, 32.0]);
    let min_ratio = cfg.f64("min_ratio", 3.5);
    let mut ns: Vec<usize> = Vec::new();
    for s in &sizes {
        if s.fract() != 0.0 || *s < 2.0 || (*s as usize) % 2 != 0 {
            cfg.violation(format!("sizes entry {s} must be an even integer of at least 2"));
        } else {
            ns.push(*s as usize);
        }
    }
    if ns.len() < 2 {
        cfg.violation("sizes must list at least two point counts");
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        cfg.violation("sizes must be strictly increasing");
    }
    if !(min_ratio > 0.0) {
        cfg.violation("min_ratio must be positive");
    }
    Some(Box::new(move |out, man| {
        let rep = build_spin_rep(2)?;
        let mut errs: Vec<f64> = Vec::new();
        let mut table = Table::create(&out.join("ladder.csv"), &["n", "sup_diff"])?;
        for &n in &ns {
            let grid = KahlerTorus::square_factors(n, 2.0 * PI, n, 2.0 * PI)?;
            let (conn, psi) = random_band_limited(&grid, seed);
            let err = man.time(&format!("n{n}"), || -> vortexlab::Result<f64> {
                let spectral = dirac_dbar(&grid, &conn, &psi)?;
                let centered = dirac_clifford(&grid, &conn, &rep, &psi)?;
                Ok(spectral.sup_diff(&centered))
            })?;
            table.row(&[n as f64, err])?;
            errs.push(err);
        }
        table.finish()?;
        man.output("ladder.csv");

        let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
        let pretty: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
        man.note("ratios", pretty.join(", "));
        println!(
            "[dirac-check] assembly differences {:?}; refinement ratios [{}]",
            errs.iter().map(|e| format!("{e:.4e}")).collect::<Vec<_>>(),
            pretty.join(", ")
        );
        if errs.last().copied().unwrap_or(0.0) < 1e-13 {
            bail!("assembly difference collapsed to round-off; the ladder measures nothing");
        }
        if let Some(bad) = ratios.iter().find(|r| !(**r >= min_ratio)) {
            bail!("refinement ratio {bad:.3} falls short of the required {min_ratio}");
        }
        Ok(())
    }))
}

/// Random trigonometric polynomial with modes up to one on an `n`-point
/// circle of circumference `l`, tabulated at the grid points.
fn trig_table(rng: &mut ChaCha8Rng, n: usize, l: f64) -> Vec<Complex64> {
    let coeffs: Vec<(f64, Complex64)> = (-1i32..=1)
        .map(|k| {
            (
                k as f64,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    (0..n)
        .map(|i| {
            let x = l * i as f64 / n as f64;
            coeffs
                .iter()
                .map(|&(k, a)| a * Complex64::cis(2.0 * PI * k * x / l))
                .sum()
        })
        .collect()
}

/// Band-limited spinor (sum of two rank-one separable products) and a
/// similarly band-limited real connection. Seeding per grid with the same
/// seed tabulates one fixed smooth field on every ladder rung.
fn random_band_limited(grid: &KahlerTorus, seed: u64) -> (SwConnection, SpinorField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n1x, n1y) = (grid.f1().nx(), grid.f1().ny());
    let (n2x, n2y) = (grid.f2().nx(), grid.f2().ny());
    let n2 = grid.f2().len();
    let mut psi = SpinorField::zero(grid);
    for comp in psi.c.iter_mut() {
        for _ in 0..2 {
            let tx = trig_table(&mut rng, n1x, grid.f1().lx());
            let ty = trig_table(&mut rng, n1y, grid.f1().ly());
            let tu = trig_table(&mut rng, n2x, grid.f2().lx());
            let tv = trig_table(&mut rng, n2y, grid.f2().ly());
            for p1 in 0..grid.f1().len() {
                let w1 = tx[p1 % n1x] * ty[p1 / n1x];
                for p2 in 0..n2 {
                    comp[p1 * n2 + p2] += w1 * tu[p2 % n2x] * tv[p2 / n2x];
                }
            }
        }
    }
    let mut a: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    for comp in a.iter_mut() {
        let tx = trig_table(&mut rng, n1x, grid.f1().lx());
        let tu = trig_table(&mut rng, n2x, grid.f2().lx());
        for p1 in 0..grid.f1().len() {
            let w1 = 0.3 * tx[p1 % n1x].re;
            for p2 in 0..n2 {
                comp[p1 * n2 + p2] = w1 * tu[p2 % n2x].re;
            }
        }
    }
    let conn = SwConnection::new(grid, 0, a).expect("shapes match the grid by construction");
    (conn, psi)
}

// ---------------------------------------------------------------------------
// sw-scan

fn sw_scan_job(cfg: &Cfg) -> Option<Job> {
    let n1 = cfg.usize("grid.n1", 4);
    let l1 = cfg.f64("grid.l1", 2.0);
    let n2 = cfg.usize("grid.n2", 96);
    let l2 = cfg.f64("grid.l2", 4.0);
    let solve = solve_opts_from(cfg);
    let lambdas = cfg.f64_list("lambda").unwrap_or_else(|| vec![4.0, 8.0]);
    if lambdas.is_empty() {
        cfg.violation("lambda must list at least one value");
    }
    for &l in &lambdas {
        if !(l >= 1.0 && l.is_finite()) {
            cfg.violation(format!("lambda entry {l} must be at least 1"));
        }
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        cfg.violation("lambda must be strictly increasing");
    }
    let grid = match KahlerTorus::square_factors(n1, l1, n2, l2) {
        Ok(g) => Some(g),
        Err(e) => {
            cfg.violation(format!("grid: {e}"));
            None
        }
    };
    let zeros = zeros_from(cfg);
    let (grid, zeros) = (grid?, zeros?);
    if let (false, Some(&lmin), Some(&lmax)) = (zeros.is_empty(), lambdas.first(), lambdas.last())
    {
        let area = grid.f2().area() * lmin;
        let bound = 4.0 * PI * zeros.len() as f64;
        if area <= bound {
            cfg.violation(format!(
                "scaled area {area:.4} at lambda {lmin} does not exceed the bound {bound:.4} for {} zeros",
                zeros.len()
            ));
        }
        let spacing = (grid.f2().hx().max(grid.f2().hy())) * lmax.sqrt();
        if spacing > 0.7 {
            cfg.violation(format!(
                "scaled grid spacing {spacing:.4} at lambda {lmax} exceeds 0.7; raise grid.n2"
            ));
        }
    }
    Some(Box::new(move |out, man| {
        let samples = man.time("scan", || localization_scan(&grid, &zeros, &lambdas, &solve))?;
        let mut table = Table::create(
            &out.join("scan.csv"),
            &["lambda", "r1", "r2_sup", "r2_mean", "r3", "beta_sup", "radius"],
        )?;
        for s in &samples {
            table.row(&[s.lambda, s.r1, s.r2_sup, s.r2_mean, s.r3, s.beta_sup, s.radius])?;
        }
        table.finish()?;
        man.output("scan.csv");

        for s in &samples {
            println!(
                "[sw-scan] lambda {:>8.2}: r1 {:.3e}, r2_mean {:.3e}, r3 {:.3e}, core radius {:.4}",
                s.lambda, s.r1, s.r2_mean, s.r3, s.radius
            );
        }
        if let (Some(first), Some(last)) = (samples.first(), samples.last()) {
            man.note("r1_sup", format!("{:.3e}", samples.iter().map(|s| s.r1).fold(0.0, f64::max)));
            if first.radius > 0.0 && last.radius > 0.0 {
                man.note(
                    "radius_shrink",
                    format!("{:.4}", last.radius / first.radius),
                );
            }
        }
        Ok(())
    }))
}
