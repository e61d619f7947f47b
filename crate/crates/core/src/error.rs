use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} outside weight window [0, {t0}]")]
    TimeOutOfRange { t: f64, t0: f64 },

    #[error(
        "window of half-width {half_width} around site {center} exceeds lattice extent {extent}"
    )]
    WindowExceedsLattice {
        center: i64,
        half_width: i64,
        extent: usize,
    },

    #[error("numerical abort at step {step}: {reason}")]
    NumericalAbort { step: usize, reason: String },

    #[error("quadrature for F_{n}({t}) did not converge to {tol:e} (last change {change:e})")]
    QuadratureNoConvergence {
        t: f64,
        n: i64,
        tol: f64,
        change: f64,
    },

    #[error("kernel half-width {half_width} too small at t = {t}: tail mass {tail_mass:e}")]
    InsufficientHalfWidth {
        t: f64,
        half_width: usize,
        tail_mass: f64,
    },

    #[error("stationary phase needs |n| <= t/2 and t >= 20, got n = {n}, t = {t}")]
    OutsideStationaryRegime { t: f64, n: i64 },

    #[error("probe window [{lo}, {hi}] violates the box margin (box [{box_lo}, {box_hi}])")]
    ProbeWindow {
        lo: f64,
        hi: f64,
        box_lo: f64,
        box_hi: f64,
    },

    #[error("CFL violation: dt = {dt} exceeds grid spacing h = {h}")]
    Cfl { dt: f64, h: f64 },

    #[error("Picard iteration is not contracting after {iterations} iterations (difference {difference:e}); use a smaller T")]
    PicardDiverged { iterations: usize, difference: f64 },

    #[error("Newton iteration diverged at n = {n} (eps grew twice in a row); use a smaller T or amplitude")]
    NewtonDiverged { n: usize },

    #[error("linearized solve unstable at t = {t}: norm {norm:e} exceeds bound {bound:e}")]
    LinearizedUnstable { t: f64, norm: f64, bound: f64 },

    #[error("majorant norm overflows: r * k_max = {exponent}; use a smaller radius")]
    MajorantOverflow { exponent: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
