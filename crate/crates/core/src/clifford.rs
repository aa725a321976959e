//! The Clifford algebra Cl(n), its canonical spin representation, and the
//! two-form calculus that feeds the four-dimensional Dirac operators.
//!
//! Cl(n) is generated over the reals by an orthonormal frame e_1..e_n with
//!
//! ```text
//! e_i^2 = -1,    e_i e_j + e_j e_i = 0  (i != j),
//! ```
//!
//! so the products e_I over sorted index subsets I form a basis of
//! dimension 2^n. Elements here carry complex coefficients (the
//! complexified algebra); the real algebra is the obvious restriction.
//!
//! For n = 2m the spin representation is realized on the fermionic Fock
//! space W = Lambda^{0,*}(C^m) with basis w_S indexed by subsets S of the m
//! complex directions: creation wedges a factor in, annihilation contracts
//! one out, and the complex structure pairs the real directions as
//! z_k = x_{2k-1} - i x_{2k}, giving
//!
//! ```text
//! Gamma(e_{2k-1}) = c_k^+ - c_k,    Gamma(e_{2k}) = -i (c_k^+ + c_k).
//! ```
//!
//! Each Gamma(e_i) is then skew-Hermitian with square -Id, the volume
//! element omega = e_1 e_2 .. e_{2m} acts on w_S as i^m (-1)^{|S|}, and the
//! semi-spinor halves W+ / W- are exactly the even / odd exterior degrees.
//! Clifford multiplication by any vector interchanges the halves.
//!
//! Two-forms enter through the alternation map (on an orthonormal frame it
//! just turns a wedge of distinct basis covectors into the Clifford product
//! of the same indices) followed by Gamma; in dimension four the Hodge star
//! splits the two-forms into selfdual and anti-selfdual halves, the
//! imaginary selfdual forms act as Hermitian traceless endomorphisms of W+
//! while annihilating W-, and sigma+/sigma- invert that action. Those
//! isomorphisms, together with the traceless Hermitian square of a positive
//! spinor, are the algebraic core of the curvature equation in the
//! Seiberg-Witten system.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest frame dimension the subset masks support; m <= 6 keeps the spin
/// representation at most 64-dimensional.
pub const MAX_N: u32 = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::Domain(format!(
            "Clifford dimension n must be in 1..={MAX_N}, got {n}"
        )));
    }
    Ok(())
}

/// An element of the complexified Clifford algebra Cl(n): complex
/// coefficients on the basis products `e_I`, `I` a sorted index subset
/// stored as a bitmask (bit `i` = generator `e_{i+1}` present).
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    n: u32,
    coeffs: BTreeMap<u32, Complex64>,
}

impl CliffordElement {
    pub fn zero(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn scalar(n: u32, c: Complex64) -> Result<Self> {
        let mut x = Self::zero(n)?;
        x.accumulate(0, c);
        Ok(x)
    }

    pub fn one(n: u32) -> Result<Self> {
        Self::scalar(n, ONE)
    }

    /// The generator `e_i`, `i` in `1..=n`.
    pub fn basis_vector(n: u32, i: u32) -> Result<Self> {
        check_n(n)?;
        if i == 0 || i > n {
            return Err(Error::Domain(format!(
                "generator index {i} out of range 1..={n}"
            )));
        }
        let mut x = Self::zero(n)?;
        x.accumulate(1 << (i - 1), ONE);
        Ok(x)
    }

    /// The basis product `e_I` for the subset bitmask `mask`.
    pub fn basis_blade(n: u32, mask: u32) -> Result<Self> {
        check_n(n)?;
        if mask >= (1 << n) {
            return Err(Error::Domain(format!(
                "subset mask {mask:#x} out of range for n = {n}"
            )));
        }
        let mut x = Self::zero(n)?;
        x.accumulate(mask, ONE);
        Ok(x)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.coeffs.get(&mask).copied().unwrap_or(ZERO)
    }

    /// Nonzero terms, sorted by basis mask.
    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    fn accumulate(&mut self, mask: u32, c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Domain(format!(
                "Clifford dimensions differ: {} vs {}",
                self.n, other.n
            )));
        }
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self {
            n: self.n,
            coeffs: BTreeMap::new(),
        };
        for (m, x) in self.terms() {
            out.accumulate(m, c * x);
        }
        out
    }

    /// Largest coefficient magnitude — the sup norm over the basis.
    pub fn sup(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Sign of `e_I * e_J` relative to `e_{I xor J}`: one transposition per
/// pair of indices `i in I`, `j in J` with `i > j` to interleave the
/// factors, one factor `-1` per common index that squares away.
fn product_sign(i_mask: u32, j_mask: u32) -> f64 {
    let mut swaps = 0u32;
    let mut j = j_mask;
    while j != 0 {
        let bit = j.trailing_zeros();
        swaps += (i_mask >> (bit + 1)).count_ones();
        j &= j - 1;
    }
    let squares = (i_mask & j_mask).count_ones();
    if (swaps + squares) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The product of Cl(n), reduced to the sorted basis by the defining
/// relations. Associative and bilinear.
pub fn clifford_product(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    if a.n != b.n {
        return Err(Error::Domain(format!(
            "Clifford dimensions differ: {} vs {}",
            a.n, b.n
        )));
    }
    let mut out = CliffordElement::zero(a.n)?;
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            out.accumulate(ma ^ mb, ca * cb * product_sign(ma, mb));
        }
    }
    Ok(out)
}

/// The volume element `omega = e_1 e_2 .. e_n` for even `n`; its square is
/// `(-1)^{n/2}`.
pub fn volume_element(n: u32) -> Result<CliffordElement> {
    check_n(n)?;
    if n % 2 != 0 {
        return Err(Error::Domain(format!(
            "volume element wants even dimension, got {n}"
        )));
    }
    CliffordElement::basis_blade(n, (1 << n) - 1)
}

/// Which semi-spinor half of the representation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Plus,
    Minus,
}

/// The canonical spin representation of Cl(2m) on `W = Lambda^{0,*}(C^m)`,
/// dimension `2^m`, basis `w_S` indexed by subset bitmasks of the complex
/// directions. `W+` is the even exterior degree, `W-` the odd.
#[derive(Debug, Clone)]
pub struct SpinRep {
    m: usize,
    gamma: Vec<DMatrix<Complex64>>,
}

/// Fermionic sign for inserting or removing direction `k` of subset `s`.
fn car_sign(s: u32, k: u32) -> f64 {
    if (s & ((1 << k) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Build the canonical representation for `n = 2m`, `1 <= m <= 6`.
pub fn build_spin_rep(m: usize) -> Result<SpinRep> {
    if m == 0 || 2 * m as u32 > MAX_N {
        return Err(Error::Domain(format!(
            "spin representation wants 1 <= m <= {}, got {m}",
            MAX_N / 2
        )));
    }
    let dim = 1usize << m;
    let mut gamma = Vec::with_capacity(2 * m);
    for k in 0..m as u32 {
        // Creation and annihilation of direction k as dim x dim matrices.
        let mut create = DMatrix::<Complex64>::zeros(dim, dim);
        let mut destroy = DMatrix::<Complex64>::zeros(dim, dim);
        for s in 0..dim as u32 {
            let sign = car_sign(s, k);
            if s & (1 << k) == 0 {
                create[((s | (1 << k)) as usize, s as usize)] = Complex64::new(sign, 0.0);
            } else {
                destroy[((s & !(1 << k)) as usize, s as usize)] = Complex64::new(sign, 0.0);
            }
        }
        let minus_i = Complex64::new(0.0, -1.0);
        gamma.push(&create - &destroy);
        gamma.push((&create + &destroy).map(|x| minus_i * x));
    }
    Ok(SpinRep { m, gamma })
}

impl SpinRep {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        2 * self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    /// `Gamma(e_i)`, `i` in `1..=2m`.
    pub fn gamma(&self, i: usize) -> &DMatrix<Complex64> {
        &self.gamma[i - 1]
    }

    pub fn gammas(&self) -> &[DMatrix<Complex64>] {
        &self.gamma
    }

    /// `Gamma(v)` for a real vector `v` in `R^{2m}`.
    pub fn gamma_vector(&self, v: &[f64]) -> Result<DMatrix<Complex64>> {
        if v.len() != 2 * self.m {
            return Err(Error::Shape {
                expected: 2 * self.m,
                got: v.len(),
            });
        }
        let mut out = DMatrix::<Complex64>::zeros(self.dim(), self.dim());
        for (c, g) in v.iter().zip(&self.gamma) {
            out += g.map(|x| Complex64::new(*c, 0.0) * x);
        }
        Ok(out)
    }

    /// The representation matrix of a full algebra element.
    pub fn gamma_element(&self, x: &CliffordElement) -> Result<DMatrix<Complex64>> {
        if x.n() as usize != 2 * self.m {
            return Err(Error::Domain(format!(
                "element lives in Cl({}) but the representation is of Cl({})",
                x.n(),
                2 * self.m
            )));
        }
        let dim = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for (mask, c) in x.terms() {
            let mut blade = DMatrix::<Complex64>::identity(dim, dim);
            for i in 0..2 * self.m as u32 {
                if mask & (1 << i) != 0 {
                    blade = &blade * &self.gamma[i as usize];
                }
            }
            out += blade.map(|x| c * x);
        }
        Ok(out)
    }

    /// Basis indices (subset masks) of a semi-spinor half: even exterior
    /// degree for `Plus`, odd for `Minus`.
    pub fn half_indices(&self, half: Half) -> Vec<usize> {
        let want = match half {
            Half::Plus => 0,
            Half::Minus => 1,
        };
        (0..self.dim())
            .filter(|s| s.count_ones() % 2 == want)
            .collect()
    }

    /// Restrict a full `2^m`-dimensional endomorphism to one half
    /// (rows and columns of that half's basis).
    pub fn restrict(&self, matrix: &DMatrix<Complex64>, half: Half) -> DMatrix<Complex64> {
        let idx = self.half_indices(half);
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| matrix[(idx[r], idx[c])])
    }
}

/// The projectors onto the semi-spinor halves,
/// `P_pm = (Id pm (-i)^m Gamma(omega)) / 2`; `P+` fixes the even exterior
/// degrees, where `Gamma(omega)` has eigenvalue `i^m`.
pub fn semi_spinor_projectors(rep: &SpinRep) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let omega = volume_element(2 * rep.m as u32)?;
    let gw = rep.gamma_element(&omega)?;
    let phase = Complex64::new(0.0, -1.0).powu(rep.m as u32);
    let id = DMatrix::<Complex64>::identity(rep.dim(), rep.dim());
    let half = Complex64::new(0.5, 0.0);
    let plus = (&id + &gw.map(|x| phase * x)).map(|x| half * x);
    let minus = (&id - &gw.map(|x| phase * x)).map(|x| half * x);
    Ok((plus, minus))
}

/// A k-form over R^n with complex coefficients on the orthonormal frame:
/// antisymmetry is normalized away at construction, so coefficients live on
/// sorted index subsets (same bitmask encoding as the algebra).
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: u32,
    degree: u32,
    coeffs: BTreeMap<u32, Complex64>,
}

impl Form {
    pub fn zero(n: u32, degree: u32) -> Result<Self> {
        check_n(n)?;
        if degree > n {
            return Err(Error::Domain(format!(
                "form degree {degree} exceeds dimension {n}"
            )));
        }
        Ok(Self {
            n,
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    /// `c * e_{i_1} ^ .. ^ e_{i_k}` for 1-based indices in any order; the
    /// permutation sign is folded into the stored coefficient, and a
    /// repeated index makes the zero form.
    pub fn from_indices(n: u32, indices: &[u32], c: Complex64) -> Result<Self> {
        check_n(n)?;
        let mut form = Self::zero(n, indices.len() as u32)?;
        let mut mask = 0u32;
        let mut sign = 1.0;
        for (pos, &i) in indices.iter().enumerate() {
            if i == 0 || i > n {
                return Err(Error::Domain(format!(
                    "form index {i} out of range 1..={n}"
                )));
            }
            let bit = 1 << (i - 1);
            if mask & bit != 0 {
                return Ok(form); // repeated factor: zero
            }
            // Count inversions against the earlier indices.
            for &j in &indices[..pos] {
                if j > i {
                    sign = -sign;
                }
            }
            mask |= bit;
        }
        form.accumulate(mask, Complex64::new(sign, 0.0) * c);
        Ok(form)
    }

    fn accumulate(&mut self, mask: u32, c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&mask);
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.coeffs.get(&mask).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.degree != other.degree {
            return Err(Error::Domain(
                "form addition needs matching dimension and degree".into(),
            ));
        }
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self {
            n: self.n,
            degree: self.degree,
            coeffs: BTreeMap::new(),
        };
        for (m, x) in self.terms() {
            out.accumulate(m, c * x);
        }
        out
    }

    pub fn sup(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_imaginary(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.re.abs() <= tol)
    }

    /// Euclidean Hodge star on the orthonormal frame: `*e_I = sgn e_{I^c}`
    /// with the sign of the permutation `(I, I^c)` of `(1..n)`.
    pub fn hodge_star(&self) -> Form {
        let full = (1u32 << self.n) - 1;
        let mut out = Form {
            n: self.n,
            degree: self.n - self.degree,
            coeffs: BTreeMap::new(),
        };
        for (mask, c) in self.terms() {
            let comp = full & !mask;
            // Inversions of the concatenation (sorted I, sorted I^c): for
            // each index in I^c, the indices of I above it each contribute
            // one transposition.
            let mut swaps = 0u32;
            let mut rest = comp;
            while rest != 0 {
                let bit = rest.trailing_zeros();
                swaps += (mask >> (bit + 1)).count_ones();
                rest &= rest - 1;
            }
            let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
            out.accumulate(comp, Complex64::new(sign, 0.0) * c);
        }
        out
    }

    /// Selfdual part `(eta + *eta)/2`; two-forms in dimension four only.
    pub fn selfdual_part(&self) -> Result<Form> {
        self.dual_part(1.0)
    }

    /// Anti-selfdual part `(eta - *eta)/2`.
    pub fn antiselfdual_part(&self) -> Result<Form> {
        self.dual_part(-1.0)
    }

    fn dual_part(&self, s: f64) -> Result<Form> {
        if self.n != 4 || self.degree != 2 {
            return Err(Error::Domain(
                "duality split wants 2-forms in dimension 4".into(),
            ));
        }
        let star = self.hodge_star();
        let half = Complex64::new(0.5, 0.0);
        self.scale(half).add(&star.scale(Complex64::new(0.5 * s, 0.0)))
    }
}

/// The alternation map into the algebra: a wedge of distinct orthonormal
/// covectors becomes the Clifford product of the same indices, so on this
/// basis it is a relabeling.
pub fn alt_map(form: &Form) -> Result<CliffordElement> {
    let mut out = CliffordElement::zero(form.n)?;
    for (mask, c) in form.terms() {
        out.accumulate(mask, c);
    }
    Ok(out)
}

/// Clifford multiplication by a form: `rho = Gamma compose Alt`. Real
/// two-forms act skew-Hermitianly on the halves, imaginary two-forms
/// Hermitianly, both tracelessly.
pub fn rho(form: &Form, rep: &SpinRep) -> Result<DMatrix<Complex64>> {
    rep.gamma_element(&alt_map(form)?)
}

/// Basis of (anti-)selfdual two-forms in dimension four, real coefficients.
fn dual_basis(half: Half) -> [Form; 3] {
    let s = match half {
        Half::Plus => 1.0,
        Half::Minus => -1.0,
    };
    let pair = |a: &[u32], b: &[u32], sb: f64| {
        Form::from_indices(4, a, ONE)
            .and_then(|f| {
                f.add(&Form::from_indices(4, b, Complex64::new(sb, 0.0)).unwrap())
            })
            .unwrap()
    };
    [
        pair(&[1, 2], &[3, 4], s),
        pair(&[1, 3], &[2, 4], -s),
        pair(&[1, 4], &[2, 3], s),
    ]
}

/// Invert Clifford multiplication on a semi-spinor half in dimension four:
/// the unique imaginary selfdual (`Plus`) or anti-selfdual (`Minus`)
/// two-form whose `rho` restricts to the given traceless Hermitian
/// endomorphism of that half.
pub fn sigma_pm(rep: &SpinRep, endo: &DMatrix<Complex64>, half: Half) -> Result<Form> {
    if rep.m != 2 {
        return Err(Error::Domain(
            "sigma maps are specific to dimension four (m = 2)".into(),
        ));
    }
    if endo.nrows() != 2 || endo.ncols() != 2 {
        return Err(Error::Shape {
            expected: 2,
            got: endo.nrows().max(endo.ncols()),
        });
    }
    let herm_defect = (endo - endo.adjoint()).map(|x| x.norm()).max();
    let trace = (endo[(0, 0)] + endo[(1, 1)]).norm();
    if herm_defect > 1e-10 || trace > 1e-10 {
        return Err(Error::Domain(format!(
            "sigma wants a traceless Hermitian endomorphism \
             (Hermitian defect {herm_defect:.2e}, trace {trace:.2e})"
        )));
    }

    // Solve for real x in eta = i sum_a x_a eta_a over the dual basis:
    // each rho(i eta_a) restricted to the half is Hermitian traceless, so
    // three real parameters (diagonal, real and imaginary off-diagonal)
    // match the three unknowns.
    let i = Complex64::new(0.0, 1.0);
    let basis = dual_basis(half);
    let mut cols = [Vector3::zeros(); 3];
    for (a, eta) in basis.iter().enumerate() {
        let m = rep.restrict(&rho(&eta.scale(i), rep)?, half);
        cols[a] = Vector3::new(m[(0, 0)].re, m[(0, 1)].re, m[(0, 1)].im);
    }
    let a = Matrix3::from_columns(&cols);
    let b = Vector3::new(endo[(0, 0)].re, endo[(0, 1)].re, endo[(0, 1)].im);
    let x = a.lu().solve(&b).ok_or_else(|| {
        Error::Conditioning("selfdual basis images are degenerate".into())
    })?;

    let mut out = Form::zero(4, 2)?;
    for (a, eta) in basis.iter().enumerate() {
        out = out.add(&eta.scale(i * Complex64::new(x[a], 0.0)))?;
    }
    Ok(out)
}

/// The traceless Hermitian square of a positive spinor in dimension four:
/// `(Phi otimes Phi^*)_0 = Phi Phi^* - |Phi|^2/2 Id` on `W+`, with
/// eigenvalues `pm |Phi|^2 / 2`.
pub fn quadratic_map(rep: &SpinRep, phi: &[Complex64]) -> Result<DMatrix<Complex64>> {
    if rep.m != 2 {
        return Err(Error::Domain(
            "the spinor square is used in dimension four (m = 2)".into(),
        ));
    }
    if phi.len() != 2 {
        return Err(Error::Shape {
            expected: 2,
            got: phi.len(),
        });
    }
    let norm2 = phi[0].norm_sqr() + phi[1].norm_sqr();
    let mut out = DMatrix::<Complex64>::zeros(2, 2);
    for r in 0..2 {
        for c in 0..2 {
            out[(r, c)] = phi[r] * phi[c].conj();
        }
        out[(r, r)] -= Complex64::new(0.5 * norm2, 0.0);
    }
    Ok(out)
}
