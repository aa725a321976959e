//! Snapshot container and table export.
//!
//! Field snapshots use a little-endian binary layout ("GLSN"):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "GLSN"
//!      4     4  format version (u32, currently 1)
//!      8     4  nx (u32)
//!     12     4  ny (u32)
//!     16     8  lx (f64)
//!     24     8  ly (f64)
//!     32     4  bundle degree (i32)
//!     36     4  flags (u32; bit 0 = velocities present)
//!     40     8  time (f64)
//!     48     -  row-major f64 arrays: a1[n], a2[n], phi re/im interleaved
//!               [2n]; with velocities: a1_dot[n], a2_dot[n], phi_dot[2n]
//! ```
//!
//! Tables are plain CSV with a header row; every numeric cell is printed as
//! lower-exponent scientific with twelve fractional digits, so a given
//! sequence of rows always produces identical bytes. Moduli lists are read
//! from text, one complex number per line, in the forms `x`, `yi`, `x+yi`,
//! or `x+iy` (signs and exponents as usual; `#` starts a comment).

use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dynamics::DynState;
use crate::error::{Error, Result};
use crate::field::GaugePair;
use crate::grid::TorusGrid;

const MAGIC: [u8; 4] = *b"GLSN";
const VERSION: u32 = 1;
const HAS_VELOCITIES: u32 = 1;

/// In-memory form of a snapshot file: fields, optional velocities, time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub fields: GaugePair,
    /// `(a1_dot, a2_dot, phi_dot)` when the file carried them.
    pub velocities: Option<(Vec<f64>, Vec<f64>, Vec<Complex64>)>,
    pub t: f64,
}

impl Snapshot {
    /// Reassemble a dynamical state; errors when the file carried no
    /// velocities (use [`Snapshot::into_state_at_rest`] to start one).
    pub fn into_state(self) -> Result<DynState> {
        let (a1_dot, a2_dot, phi_dot) = self.velocities.ok_or_else(|| {
            Error::Inconsistency("snapshot carries no velocities".into())
        })?;
        let mut state = DynState::new(self.fields, a1_dot, a2_dot, phi_dot)?;
        state.t = self.t;
        Ok(state)
    }

    /// Reassemble as a state at rest, discarding any stored velocities.
    pub fn into_state_at_rest(self) -> DynState {
        let mut state = DynState::at_rest(self.fields);
        state.t = self.t;
        state
    }
}

fn push_f64s(buf: &mut Vec<u8>, vals: &[f64]) {
    for v in vals {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

fn push_c64s(buf: &mut Vec<u8>, vals: &[Complex64]) {
    for v in vals {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
}

fn encode(fields: &GaugePair, vel: Option<(&[f64], &[f64], &[Complex64])>, t: f64) -> Vec<u8> {
    let grid = fields.grid();
    let n = grid.len();
    let body = if vel.is_some() { 8 * n * 8 } else { 4 * n * 8 };
    let mut buf = Vec::with_capacity(48 + body);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.lx().to_le_bytes());
    buf.extend_from_slice(&grid.ly().to_le_bytes());
    buf.extend_from_slice(&fields.degree().to_le_bytes());
    let flags = if vel.is_some() { HAS_VELOCITIES } else { 0 };
    buf.extend_from_slice(&flags.to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    push_f64s(&mut buf, fields.a1());
    push_f64s(&mut buf, fields.a2());
    push_c64s(&mut buf, fields.phi());
    if let Some((a1d, a2d, pd)) = vel {
        push_f64s(&mut buf, a1d);
        push_f64s(&mut buf, a2d);
        push_c64s(&mut buf, pd);
    }
    buf
}

/// Write static fields (no velocity block) at the given time stamp.
pub fn write_fields(path: &Path, fields: &GaugePair, t: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(fields, None, t))?;
    w.flush()?;
    Ok(())
}

/// Write a full dynamical state including velocities.
pub fn write_state(path: &Path, state: &DynState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(
        &state.fields,
        Some((&state.a1_dot, &state.a2_dot, &state.phi_dot)),
        state.t,
    ))?;
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Inconsistency(format!(
                "snapshot truncated: wanted {} bytes at offset {}, file has {}",
                n,
                self.pos,
                self.buf.len()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(8 * n)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn c64s(&mut self, n: usize) -> Result<Vec<Complex64>> {
        let raw = self.take(16 * n)?;
        Ok(raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect())
    }
}

/// Read a snapshot file back, validating magic, version, and array sizes.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut raw = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut raw)?;
    let mut c = Cursor { buf: &raw, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Inconsistency(
            "not a field snapshot (bad magic)".into(),
        ));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Inconsistency(format!(
            "snapshot format version {version} not supported (expected {VERSION})"
        )));
    }
    let nx = c.u32()? as usize;
    let ny = c.u32()? as usize;
    let lx = c.f64()?;
    let ly = c.f64()?;
    let degree = c.i32()?;
    let flags = c.u32()?;
    let t = c.f64()?;
    let grid = TorusGrid::new(nx, ny, lx, ly)?;
    let n = grid.len();
    let a1 = c.f64s(n)?;
    let a2 = c.f64s(n)?;
    let phi = c.c64s(n)?;
    let velocities = if flags & HAS_VELOCITIES != 0 {
        Some((c.f64s(n)?, c.f64s(n)?, c.c64s(n)?))
    } else {
        None
    };
    if c.pos != raw.len() {
        return Err(Error::Inconsistency(format!(
            "snapshot has {} trailing bytes",
            raw.len() - c.pos
        )));
    }
    let fields = GaugePair::new(grid, degree, a1, a2, phi)?;
    Ok(Snapshot {
        fields,
        velocities,
        t,
    })
}

/// CSV table with a fixed column set and deterministic float formatting.
pub struct Table {
    w: BufWriter<File>,
}

impl Table {
    /// Create the file and write the header row.
    pub fn create(path: &Path, columns: &[&str]) -> Result<Self> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{}", columns.join(","))?;
        Ok(Self { w })
    }

    /// Append one row; cells are printed as `{:.12e}`.
    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        let mut line = String::with_capacity(values.len() * 20);
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.12e}"));
        }
        writeln!(self.w, "{line}")?;
        Ok(())
    }

    /// Append a row whose first cell is a label (must not contain commas).
    pub fn labeled_row(&mut self, label: &str, values: &[f64]) -> Result<()> {
        debug_assert!(!label.contains(','));
        write!(self.w, "{label}")?;
        for v in values {
            write!(self.w, ",{v:.12e}")?;
        }
        writeln!(self.w)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// Export plot-ready columns `x, y, abs_phi, flux` where `flux` is the
/// magnetic flux density (positive total flux for positive degree).
pub fn export_field_csv(path: &Path, fields: &GaugePair) -> Result<()> {
    let grid = fields.grid();
    let f = fields.curvature()?;
    let mut table = Table::create(path, &["x", "y", "abs_phi", "flux"])?;
    let nx = grid.nx();
    for (idx, (phi, fv)) in fields.phi().iter().zip(&f).enumerate() {
        let (i, j) = (idx % nx, idx / nx);
        table.row(&[grid.x(i), grid.y(j), phi.norm(), -fv])?;
    }
    table.finish()
}

/// Parse one complex number in the forms accepted by moduli lists.
fn parse_complex(s: &str) -> Option<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    // Split into real and imaginary summands at the last +/- that is not an
    // exponent sign and not leading.
    let bytes = t.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(k) => (&t[..k], &t[k..]),
        None => {
            // Single summand: imaginary iff it mentions i.
            if t.contains('i') {
                ("", t.as_str())
            } else {
                (t.as_str(), "")
            }
        }
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().ok()?
    };
    let im = if im_part.is_empty() {
        0.0
    } else {
        let stripped = im_part.replacen('i', "", 1);
        if !im_part.contains('i') || stripped.contains('i') {
            return None;
        }
        match stripped.as_str() {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        }
    };
    // A pure-real split with an i in the "real" part is malformed.
    if re_part.contains('i') {
        return None;
    }
    Some(Complex64::new(re, im))
}

/// Read a moduli list: one complex number per line, `#` comments and blank
/// lines ignored.
pub fn parse_moduli(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match parse_complex(body) {
            Some(z) => out.push(z),
            None => {
                return Err(Error::Domain(format!(
                    "line {}: cannot parse {:?} as a complex number",
                    lineno + 1,
                    body
                )))
            }
        }
    }
    Ok(out)
}
