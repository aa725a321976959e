//! Numerical laboratory for critically coupled abelian Higgs vortices on flat
//! 2-tori, together with the Clifford-algebra and Seiberg-Witten layers that
//! reinterpret them on product 4-tori.
//!
//! # The model
//!
//! The fields are a U(1) connection `A = i a` (with `a_1, a_2` real) and a
//! section `Phi` of a degree-`d` hermitian line bundle over the torus
//! `R^2 / (lx Z x ly Z)`. At critical coupling the static energy is
//!
//! ```text
//! U = 1/2 Int [ f^2 + |D_1 Phi|^2 + |D_2 Phi|^2 + 1/4 (1 - |Phi|^2)^2 ]
//! ```
//!
//! with `F_12 = i f`, `D_j = d_j + i a_j`. Finite energy forces quantized flux
//! `(i/2 pi) Int F_12 = d`, and the Bogomolny rearrangement bounds `U >= pi d`
//! with equality exactly on solutions of the first-order vortex equations.
//! The moduli space of those solutions is the `d`-fold symmetric product of
//! the torus, coordinatized by the `d` zeros of `Phi`; slow vortex motion is
//! geodesic motion in the metric that the field-theory kinetic energy induces
//! on the moduli space, and the crate can check that statement end to end:
//! solve the vortex equations, assemble the metric, integrate geodesics, run
//! the full second-order field dynamics, and compare.
//!
//! # Conventions
//!
//! A section of the degree-`d` bundle is stored as its values on the uniform
//! grid; it is periodic in x and acquires the transition factor
//! `exp(-2 pi i d x / lx)` across the y seam. The connection component `a_1`
//! gains `2 pi d / lx` across that seam, `a_2` is periodic, and the reference
//! connection `a_1 = (2 pi d / area) y`, `a_2 = 0` has constant curvature
//! `f = -2 pi d / area`. All derivatives are Fourier collocation
//! ([`spectral`]), so discrete flux quantization and discrete summation by
//! parts hold to round-off; the variational residuals are the exact gradients
//! of the discrete energy.

pub mod adiabatic;
pub mod clifford;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod moduli;
#[cfg(feature = "oracle")]
pub mod oracle;
mod par;
pub mod spectral;
pub mod sw;
mod theta;
pub mod vortex;

pub use adiabatic::{
    adiabatic_compare, prepare_adiabatic_state, zero_trajectory, AdiabaticOptions,
    AdiabaticReport, AdiabaticRun, CrossingEvent, PreparedState, ZeroTrajectory,
};
pub use clifford::{
    alt_map, build_spin_rep, clifford_product, quadratic_map, rho, semi_spinor_projectors,
    sigma_pm, volume_element, CliffordElement, Form, Half, SpinRep,
};
pub use dynamics::{
    evolve, evolve_sampled, project_constraint, stability_limit, DynState, EnergyReport,
};
pub use error::{Error, Result};
pub use field::{BogomolnyResidual, ElResidual, GaugePair};
pub use grid::TorusGrid;
pub use io::{export_field_csv, parse_moduli, read_snapshot, write_fields, write_state, Snapshot, Table};
pub use moduli::{
    integrate_geodesic, moduli_metric, Chart, GeodesicOptions, GeodesicPoint, ModuliOptions,
    TangentBasis,
};
pub use sw::{
    dirac_clifford, dirac_dbar, localization_scan, sw_lambda_residual, validate_chern,
    vortex_lift, KahlerTorus, LocalizationSample, SpinorField, SwConnection, SwFields,
    SwResidual,
};
pub use vortex::{solve_vortex, SolveOptions, VortexSolution};

#[doc(hidden)]
pub use par::set_force_sequential;
