use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid points must be a power of two >= 8, got {0}")]
    BadPointCount(usize),
    #[error("grid extent must be positive, got {0}")]
    BadExtent(f64),
    #[error("supported dimensions are 1 and 2, got {0}")]
    BadDimension(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected a {expected} field, got a {got} field")]
    SpaceMismatch { expected: &'static str, got: &'static str },
    #[error("L^r norm requires r >= 2, got {0}")]
    BadLebesgueExponent(f64),
    #[error("grid under-resolves oscillations: need spectral band {needed:.3e}, have {available:.3e} ({context})")]
    ResolutionRule { needed: f64, available: f64, context: String },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("focus time must be positive, got {0}")]
    BadFocusTime(f64),
    #[error("harmonic focus time must lie in (0, pi), got {0}")]
    FocusTimeOutOfRange(f64),
    #[error("duplicate focus (t={t}, x={x:?}) in datum list")]
    DuplicateFocus { t: f64, x: Vec<f64> },
    #[error("dispersive profile undefined at t = 0")]
    ZeroTime,
    #[error("time {t} is on the wrong side of the focus t_j = {t_focus} for a {side} approximant")]
    WrongSideOfFocus { t: f64, t_focus: f64, side: &'static str },
    #[error("time {t} is within the invalid floor {floor} of the focus t_j = {t_focus}")]
    TooCloseToFocus { t: f64, t_focus: f64, floor: f64 },
    #[error("time step {dt} exceeds the bound {bound} (= {c} * eps); pass `allow_large_dt` to override")]
    TimeStepTooLarge { dt: f64, bound: f64, c: f64 },
    #[error("solver aborted at t = {t}: {reason}")]
    SolverAbort { t: f64, reason: String },
    #[error("mass-in-window monitor tripped at t = {t}: fraction outside central window {outside:.3e} > {tol:.3e}")]
    WindowMonitor { t: f64, outside: f64, tol: f64 },
    #[error("snapshot stride too coarse near t = {t_peak}: spacing {spacing:.3e} > {needed:.3e}; re-run with finer sampling")]
    StrideTooCoarse { t_peak: f64, spacing: f64, needed: f64 },
    #[error("no feasible exponent tuple for n = {n}, sigma = {sigma}: {reason}")]
    ExponentInfeasible { n: usize, sigma: f64, reason: String },
    #[error("sigma = {sigma} violates sigma > 2/n = {bound} (short-range scattering requirement)")]
    SigmaTooSmall { sigma: f64, bound: f64 },
    #[error("Wigner transform produced imaginary residue {residue:.3e} above tolerance (aliasing)")]
    WignerAliasing { residue: f64 },
    #[error("tube width {width:.3e} is below the grid cell diagonal {diag:.3e}")]
    DegenerateTubeWidth { width: f64, diag: f64 },
    #[error("line parameter t = {0} outside [0, pi) for harmonic tube")]
    BadTubeTime(f64),
    #[error("scattering horizon doubling did not converge: gap {gap:.3e} > tolerance {tol:.3e}")]
    ScatteringNotConverged { gap: f64, tol: f64 },
    #[error("profile fails the decay check: relative tail {tail:.3e} at the window edge exceeds {tol:.3e}")]
    ProfileTail { tail: f64, tol: f64 },
    #[error("trajectory has no snapshot at t = {0}")]
    SnapshotMissing(f64),
    #[error("trajectories have mismatched time grids")]
    TimeGridMismatch,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("not enough samples in the fit window ({0} found, need >= {1})")]
    FitWindowTooSmall(usize, usize),
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    ConfigInvalid(Vec<String>),
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("snapshot file corrupt: {0}")]
    SnapshotFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
