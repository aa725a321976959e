use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Numerical routines never panic on bad user data; they return one of these
/// variants with enough context to diagnose the failure.
#[derive(Debug, Error)]
pub enum Error {
    /// An array's length does not match the grid it is claimed to live on.
    #[error("array length {got} does not match grid size {expected}")]
    Shape { expected: usize, got: usize },

    /// A parameter is outside its mathematical domain (non-positive length,
    /// NaN, odd grid side, ...).
    #[error("invalid parameter: {0}")]
    Domain(String),

    /// The requested configuration admits no solution (e.g. the Bradlow bound
    /// `area > 4*pi*d` is violated, so no degree-d vortex exists).
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    /// An iterative solver ran out of iterations. `history` holds the tail of
    /// the residual norms so the stagnation pattern is visible.
    #[error("no convergence in {context}; residual tail {history:?}")]
    Convergence { context: String, history: Vec<f64> },

    /// Requested time step violates the stability bound of the leapfrog
    /// integrator.
    #[error("time step {dt} exceeds stability limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    /// The field evolution blew up; `last_good` is the final state whose
    /// fields were still finite and bounded, for post-mortem inspection.
    #[error("evolution diverged at t = {t}")]
    Diverged {
        t: f64,
        last_good: Box<crate::dynamics::DynState>,
    },

    /// A linear system is too ill-conditioned to trust (near-degenerate
    /// moduli-space metric, singular chart Jacobian, ...).
    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    /// The grid cannot resolve the requested structure (vortex core thinner
    /// than a few cells, Bloch phases beyond the Nyquist band, ...).
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// Internally inconsistent data: zero count disagrees with the bundle
    /// degree, charts disagree beyond tolerance, and so on.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
