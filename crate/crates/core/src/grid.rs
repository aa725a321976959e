//! Uniform discretization of a flat 2-torus `R^2 / (lx Z x ly Z)`.
//!
//! Grid points sit at `(i*hx, j*hy)` with `hx = lx/nx`, `hy = ly/ny`; arrays
//! over the grid are stored row-major with the x index fastest, so entry
//! `(i, j)` lives at `j*nx + i` and each contiguous block of `nx` values is one
//! horizontal line `y = j*hy`. Both sides must be even (the spectral kernels
//! fold the Nyquist bin symmetrically) and at least [`TorusGrid::MIN_SIDE`].

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl TorusGrid {
    /// Smallest admitted side; coarser grids cannot hold a vortex core.
    pub const MIN_SIDE: usize = 16;

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < Self::MIN_SIDE || ny < Self::MIN_SIDE {
            return Err(Error::Domain(format!(
                "grid sides must be at least {}, got {}x{}",
                Self::MIN_SIDE,
                nx,
                ny
            )));
        }
        if nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Domain(format!(
                "grid sides must be even, got {}x{}",
                nx, ny
            )));
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::Domain(format!(
                    "period {} must be positive and finite, got {}",
                    name, l
                )));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square torus `side x side` points on an `l x l` fundamental domain.
    pub fn square(side: usize, l: f64) -> Result<Self> {
        Self::new(side, side, l, l)
    }

    /// Constructor without the core-resolution minimum, for factors of a
    /// product manifold whose fields need not resolve a vortex core (they
    /// may be constant, or probe only the spectral calculus). Spectral
    /// kernels work from two points per side up.
    pub(crate) fn coarse(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Domain(format!(
                "factor sides must be even and at least 2, got {}x{}",
                nx, ny
            )));
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::Domain(format!(
                    "period {} must be positive and finite, got {}",
                    name, l
                )));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }
    #[inline]
    pub fn lx(&self) -> f64 {
        self.lx
    }
    #[inline]
    pub fn ly(&self) -> f64 {
        self.ly
    }
    #[inline]
    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    #[inline]
    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    #[inline]
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
    /// Number of grid points `nx * ny`.
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Cell area `hx * hy`, the quadrature weight of every grid point.
    #[inline]
    pub fn cell(&self) -> f64 {
        self.hx() * self.hy()
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.hy()
    }

    /// Flat index of grid point `(i, j)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Inverse of [`idx`](Self::idx): `(i, j)` of a flat index.
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        debug_assert!(idx < self.len());
        (idx % self.nx, idx / self.nx)
    }

    /// Wrap a signed x index into `[0, nx)`.
    #[inline]
    pub fn wrap_x(&self, i: isize) -> usize {
        i.rem_euclid(self.nx as isize) as usize
    }

    /// Wrap a signed y index into `[0, ny)`, returning the wrapped index and
    /// the number of times the y cycle was crossed (positive when `j >= ny`).
    ///
    /// The crossing count is what twisted sections need: each crossing
    /// multiplies the value by one factor of the transition function.
    #[inline]
    pub fn wrap_y(&self, j: isize) -> (usize, i64) {
        let ny = self.ny as isize;
        (j.rem_euclid(ny) as usize, j.div_euclid(ny) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_validates() {
        assert!(TorusGrid::new(16, 16, 1.0, 2.0).is_ok());
        assert!(TorusGrid::new(15, 16, 1.0, 2.0).is_err());
        assert!(TorusGrid::new(16, 8, 1.0, 2.0).is_err());
        assert!(TorusGrid::new(18, 16, 0.0, 2.0).is_err());
        assert!(TorusGrid::new(18, 16, 1.0, -3.0).is_err());
        assert!(TorusGrid::new(18, 16, 1.0, f64::NAN).is_err());
        assert!(TorusGrid::new(17, 17, 1.0, 1.0).is_err());
    }

    #[test]
    fn geometry_accessors() {
        let g = TorusGrid::new(32, 16, 8.0, 4.0).unwrap();
        assert_eq!(g.hx(), 0.25);
        assert_eq!(g.hy(), 0.25);
        assert_eq!(g.area(), 32.0);
        assert_eq!(g.len(), 512);
        assert_eq!(g.idx(3, 2), 2 * 32 + 3);
        assert_eq!(g.coords(g.idx(31, 15)), (31, 15));
        assert_eq!(g.x(4), 1.0);
        assert_eq!(g.y(4), 1.0);
    }

    #[test]
    fn wrapping() {
        let g = TorusGrid::new(16, 16, 1.0, 1.0).unwrap();
        assert_eq!(g.wrap_x(-1), 15);
        assert_eq!(g.wrap_x(16), 0);
        assert_eq!(g.wrap_y(-1), (15, -1));
        assert_eq!(g.wrap_y(16), (0, 1));
        assert_eq!(g.wrap_y(35), (3, 2));
        assert_eq!(g.wrap_y(5), (5, 0));
    }
}
