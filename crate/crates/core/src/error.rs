use crate::eos::PhaseTag;

/// Which loop of the nested iteration an error surfaced in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopLevel {
    Outer,
    FreeBoundary,
    Picard,
}

impl std::fmt::Display for LoopLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoopLevel::Outer => write!(f, "outer transport loop"),
            LoopLevel::FreeBoundary => write!(f, "free-boundary loop"),
            LoopLevel::Picard => write!(f, "inner Picard loop"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("entropy must be positive, got {0}")]
    NonPositiveEntropy(f64),

    #[error("cavitated state: B0 - |q|^2/2 = {margin:.3e} is below the admissibility floor {floor:.3e}")]
    CavitatedState { margin: f64, floor: f64 },

    #[error("axial flow degenerate: {value:.3e} <= floor {floor:.3e}")]
    DegenerateAxialFlow { value: f64, floor: f64 },

    #[error("interface value f({x}) = {f} leaves (1/4, 3/4)")]
    DegenerateInterface { x: f64, f: f64 },

    #[error("interface curve invariant violated: {0}")]
    InvalidInterface(String),

    #[error("axial extents do not overlap: source [0, {src}], target [0, {dst}]")]
    ExtentMismatch { src: f64, dst: f64 },

    #[error("Picard iteration diverged after {iterations} sweeps (last change {last_change:.3e})")]
    PicardDiverged { iterations: usize, last_change: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),

    #[error("interior grid node at r = 0 (axis must be a boundary)")]
    AxisSingularity,

    #[error("stream-function value {value:.6e} outside entrance column range [{lo:.6e}, {hi:.6e}]")]
    FluxOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("matched interface speed non-positive: Y = {0:.3e}")]
    NegativeMatchedSpeed(f64),

    #[error("free-boundary update radicand non-positive at x = {x}: {radicand:.3e}")]
    NegativeRadicand { x: f64, radicand: f64 },

    #[error("updated interface escapes (1/4, 3/4) at x = {x}: f = {f}")]
    InterfaceEscape { x: f64, f: f64 },

    #[error("outer transport iteration did not converge in {iterations} sweeps; change history {history:?}")]
    OuterDiverged { iterations: usize, history: Vec<f64> },

    #[error("free-boundary iteration did not converge in {iterations} sweeps; change history {history:?}")]
    FreeBoundaryDiverged { iterations: usize, history: Vec<f64> },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input file {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("in {level}{}, iteration {iteration}: {source}", phase.map(|p| format!(" ({p} phase)")).unwrap_or_default())]
    InLoop {
        level: LoopLevel,
        phase: Option<PhaseTag>,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Wrap an error with the loop level and phase it surfaced in.
    pub fn in_loop(self, level: LoopLevel, phase: Option<PhaseTag>, iteration: usize) -> Self {
        Error::InLoop {
            level,
            phase,
            iteration,
            source: Box::new(self),
        }
    }

    /// Process exit code used by the CLI: 2 config, 3 divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } => 2,
            Error::Io { .. } => 4,
            Error::InLoop { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
