//! Flat key = value configuration with sections.
//!
//! The file format is line-oriented: `[section]` headers prefix subsequent
//! keys as `section.key`, `#` starts a comment, everything else is
//! `key = value`. Command-line overrides use the same dotted keys
//! (`grid.nx=128`). Readers never abort on the first problem; every
//! violation is collected and reported in one pass, together with any keys
//! no reader asked for (almost always a typo).

use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub struct Cfg {
    map: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
    errors: RefCell<Vec<String>>,
}

impl Cfg {
    /// Parse file text (may be empty) and apply `key=value` overrides.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self, Vec<String>> {
        let mut map = BTreeMap::new();
        let mut errors = Vec::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                match name.strip_suffix(']') {
                    Some(name) if !name.trim().is_empty() => {
                        section = name.trim().to_string();
                    }
                    _ => errors.push(format!("line {}: malformed section header", lineno + 1)),
                }
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => {
                    let key = if section.is_empty() {
                        k.trim().to_string()
                    } else {
                        format!("{section}.{}", k.trim())
                    };
                    map.insert(key, v.trim().to_string());
                }
                _ => errors.push(format!(
                    "line {}: expected `key = value`, got {:?}",
                    lineno + 1,
                    line
                )),
            }
        }
        for ov in overrides {
            match ov.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => {
                    map.insert(k.trim().to_string(), v.trim().to_string());
                }
                _ => errors.push(format!("override {ov:?}: expected `key=value`")),
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self {
            map,
            used: RefCell::new(BTreeSet::new()),
            errors: RefCell::new(Vec::new()),
        })
    }

    pub fn violation(&self, msg: impl Into<String>) {
        self.errors.borrow_mut().push(msg.into());
    }

    /// Flag `key` as out of place (consuming it, so it is not also reported
    /// as unknown) when the configuration sets it.
    pub fn forbid(&self, key: &str, why: &str) {
        if self.raw(key).is_some() {
            self.violation(format!("{key} {why}"));
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn f64(&self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.violation(format!("{key}: {s:?} is not a number"));
                default
            }),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.violation(format!("{key}: {s:?} is not a nonnegative integer"));
                default
            }),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> bool {
        match self.raw(key) {
            None => default,
            Some("true") | Some("1") | Some("yes") => true,
            Some("false") | Some("0") | Some("no") => false,
            Some(s) => {
                self.violation(format!("{key}: {s:?} is not a boolean"));
                default
            }
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    /// Comma- or semicolon-separated list of numbers.
    pub fn f64_list(&self, key: &str) -> Option<Vec<f64>> {
        let s = self.raw(key)?;
        let mut out = Vec::new();
        for tok in s.split([',', ';']).map(str::trim).filter(|t| !t.is_empty()) {
            match tok.parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.violation(format!("{key}: {tok:?} is not a number"));
                    return Some(out);
                }
            }
        }
        Some(out)
    }

    /// Semicolon-separated list of complex numbers (`x+yi` forms).
    pub fn complex_list(&self, key: &str) -> Option<Vec<Complex64>> {
        let s = self.raw(key)?.to_string();
        let joined = s.split(';').collect::<Vec<_>>().join("\n");
        match vortexlab::parse_moduli(&joined) {
            Ok(zs) => Some(zs),
            Err(e) => {
                self.violation(format!("{key}: {e}"));
                Some(Vec::new())
            }
        }
    }

    /// Sorted `(key, value)` pairs of everything that was configured.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// All collected violations plus any keys nothing consumed.
    pub fn finish(self) -> Vec<String> {
        let mut errors = self.errors.into_inner();
        let used = self.used.into_inner();
        for key in self.map.keys() {
            if !used.contains(key) {
                errors.push(format!("unknown key {key:?}"));
            }
        }
        errors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_prefix_keys_and_overrides_win() {
        let text = "\
top = 1
[grid]
nx = 64   # points
ly = 8.0
";
        let cfg = Cfg::load(text, &["grid.nx=128".into()]).unwrap();
        assert_eq!(cfg.f64("top", 0.0), 1.0);
        assert_eq!(cfg.usize("grid.nx", 0), 128);
        assert_eq!(cfg.f64("grid.ly", 0.0), 8.0);
        assert_eq!(cfg.usize("grid.ny", 32), 32);
        assert!(cfg.finish().is_empty());
    }

    #[test]
    fn every_violation_is_reported() {
        let cfg = Cfg::load("a = x\nb = 2\nmystery = 3\n", &[]).unwrap();
        let _ = cfg.f64("a", 0.0);
        let _ = cfg.f64("b", 0.0);
        cfg.violation("b must be odd");
        let errors = cfg.finish();
        assert_eq!(errors.len(), 3, "{errors:?}");
        assert!(errors.iter().any(|e| e.contains("a:")));
        assert!(errors.iter().any(|e| e.contains("b must be odd")));
        assert!(errors.iter().any(|e| e.contains("mystery")));
    }

    #[test]
    fn malformed_lines_fail_the_load() {
        assert!(Cfg::load("just words\n", &[]).is_err());
        assert!(Cfg::load("[unclosed\n", &[]).is_err());
        assert!(Cfg::load("", &["notakv".into()]).is_err());
    }

    #[test]
    fn lists_parse_both_separators() {
        let cfg = Cfg::load("eps = 0.2, 0.1; 0.05\nzs = 1+2i; -1\n", &[]).unwrap();
        assert_eq!(cfg.f64_list("eps").unwrap(), vec![0.2, 0.1, 0.05]);
        let zs = cfg.complex_list("zs").unwrap();
        assert_eq!(zs, vec![Complex64::new(1.0, 2.0), Complex64::new(-1.0, 0.0)]);
        assert!(cfg.finish().is_empty());
    }
}
