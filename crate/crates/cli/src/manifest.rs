//! Run manifest: a plain-text record of what a command ran, with which
//! configuration, how long the phases took, and which files it produced.
//!
//! Timings are wall-clock and vary run to run; everything else is
//! deterministic for a fixed configuration and seed, and the data files
//! listed under `[outputs]` are byte-reproducible.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

pub struct Manifest {
    command: &'static str,
    seed: u64,
    status: String,
    config: Vec<(String, String)>,
    timings: Vec<(String, f64)>,
    outputs: Vec<String>,
    notes: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            seed,
            status: "ok".to_string(),
            config: Vec::new(),
            timings: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set_config(&mut self, pairs: Vec<(String, String)>) {
        self.config = pairs;
    }

    pub fn set_status(&mut self, status: impl Into<String>) {
        self.status = status.into();
    }

    /// Run `f`, recording its wall-clock duration under `label`.
    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let value = f();
        self.timings
            .push((label.to_string(), start.elapsed().as_secs_f64()));
        value
    }

    /// Record a produced file (path relative to the output directory).
    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut text = String::new();
        let _ = writeln!(text, "command = {}", self.command);
        let _ = writeln!(text, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "seed = {}", self.seed);
        let _ = writeln!(text, "status = {}", self.status);
        if !self.config.is_empty() {
            let _ = writeln!(text, "\n[config]");
            for (k, v) in &self.config {
                let _ = writeln!(text, "{k} = {v}");
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(text, "\n[notes]");
            for (k, v) in &self.notes {
                let _ = writeln!(text, "{k} = {v}");
            }
        }
        if !self.timings.is_empty() {
            let _ = writeln!(text, "\n[timings]");
            for (k, s) in &self.timings {
                let _ = writeln!(text, "{k} = {s:.3}s");
            }
        }
        if !self.outputs.is_empty() {
            let _ = writeln!(text, "\n[outputs]");
            for name in &self.outputs {
                let _ = writeln!(text, "{name}");
            }
        }
        fs::write(dir.join("manifest.txt"), text)
    }
}
