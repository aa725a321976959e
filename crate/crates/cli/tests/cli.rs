//! End-to-end runs of the compiled binary: output files, exit codes, and
//! byte-level reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortexlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn second_line(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let line = text.lines().nth(1).expect("a data row");
    line.split(',').map(|c| c.parse().unwrap()).collect()
}

#[test]
fn vacuum_solve_writes_a_zero_energy_snapshot() {
    let dir = tempdir().unwrap();
    let out = run(
        dir.path(),
        &["solve-vortex", "--out", "run", "grid.nx=16", "grid.lx=6.0"],
    );
    assert_ok(&out);
    let row = second_line(&dir.path().join("run/summary.csv"));
    assert_eq!(row[0], 0.0, "degree");
    assert!(row[1].abs() < 1e-12, "energy {}", row[1]);
    assert!(row[2].abs() < 1e-12, "flux {}", row[2]);
    let snap = vortexlab::read_snapshot(&dir.path().join("run/solution.glsn")).unwrap();
    assert_eq!(snap.fields.degree(), 0);
    let manifest = fs::read_to_string(dir.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("status = ok"));
    assert!(manifest.contains("grid.nx = 16"));
}

#[test]
fn one_vortex_solve_reports_its_flux_and_zero() {
    let dir = tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "solve-vortex",
            "--out",
            "run",
            "zeros=2+2i",
            "grid.nx=32",
            "grid.ny=32",
        ],
    );
    assert_ok(&out);
    let row = second_line(&dir.path().join("run/summary.csv"));
    assert_eq!(row[0], 1.0, "degree");
    assert!((row[1] - std::f64::consts::PI).abs() < 1e-3, "energy {}", row[1]);
    assert!((row[2] - 1.0).abs() < 1e-9, "flux {}", row[2]);
    let zero = second_line(&dir.path().join("run/zeros.csv"));
    assert!((zero[0] - 2.0).abs() < 1e-6 && (zero[1] - 2.0).abs() < 1e-6);
}

#[test]
fn evolve_restarts_from_a_written_snapshot() {
    let dir = tempdir().unwrap();
    assert_ok(&run(
        dir.path(),
        &["solve-vortex", "--out", "solve", "grid.nx=16", "grid.lx=6.0"],
    ));
    let out = run(
        dir.path(),
        &[
            "evolve",
            "--out",
            "ev",
            "initial=solve/solution.glsn",
            "t_end=0.5",
            "sample_every=4",
        ],
    );
    assert_ok(&out);
    let trace = fs::read_to_string(dir.path().join("ev/trace.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().collect();
    assert_eq!(rows[0], "t,kinetic,potential,total,gauss_sup");
    assert!(rows.len() > 2);
    let last: Vec<f64> = rows.last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!(last[3].abs() < 1e-12, "vacuum stays at zero energy: {last:?}");
    let snap = vortexlab::read_snapshot(&dir.path().join("ev/state.glsn")).unwrap();
    assert!(snap.velocities.is_some());
    assert!(snap.t > 0.4);
}

#[test]
fn checks_are_byte_reproducible_for_a_fixed_seed() {
    let dir = tempdir().unwrap();
    for name in ["a", "b"] {
        assert_ok(&run(
            dir.path(),
            &[
                "clifford-check",
                "--seed",
                "11",
                "--out",
                name,
                "m_max=2",
                "samples=5",
            ],
        ));
    }
    let a = fs::read(dir.path().join("a/checks.csv")).unwrap();
    let b = fs::read(dir.path().join("b/checks.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn a_broken_configuration_lists_every_problem_and_runs_nothing() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "eps = 0.1, 0.2\ntau_end = -1\n[grid]\nnx = 48\n").unwrap();
    let out = run(
        dir.path(),
        &[
            "adiabatic-compare",
            "--config",
            "bad.cfg",
            "--out",
            "run",
            "zeros=2+2i",
            "velocity=0.1",
            "mystery=3",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("eps must be strictly decreasing"), "{err}");
    assert!(err.contains("tau_end must be positive"), "{err}");
    assert!(err.contains("mystery"), "{err}");
    assert!(!dir.path().join("run/compare.csv").exists());
    assert!(!dir.path().join("run/manifest.txt").exists());
}

#[test]
fn overrides_beat_the_configuration_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "[grid]\nnx = 16\nlx = 6.0\n").unwrap();
    let out = run(
        dir.path(),
        &[
            "solve-vortex",
            "--config",
            "run.cfg",
            "--out",
            "run",
            "grid.nx=20",
        ],
    );
    assert_ok(&out);
    let snap = vortexlab::read_snapshot(&dir.path().join("run/solution.glsn")).unwrap();
    assert_eq!(snap.fields.grid().nx(), 20);
}

#[test]
fn failed_identity_checks_exit_nonzero_but_leave_the_report() {
    let dir = tempdir().unwrap();
    // An impossible tolerance turns the round-off defects into failures.
    let out = run(
        dir.path(),
        &["clifford-check", "--out", "run", "m_max=1", "tol=1e-30"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("run/checks.csv").exists());
    let manifest = fs::read_to_string(dir.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("status = failed"), "{manifest}");
}
