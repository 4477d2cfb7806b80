use thiserror::Error;

/// Failure classes, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Geometry,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart point ({u}, {v}) lies outside the declared domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("degenerate chart at ({u}, {v}): |∂u × ∂v| = {cross_norm:e}")]
    DegenerateChart { u: f64, v: f64, cross_norm: f64 },
    #[error("singular metric at ({u}, {v}): det g = {det:e}")]
    SingularMetric { u: f64, v: f64, det: f64 },
    #[error("irregular curve: ds/dt = {speed:e} at t = {t}")]
    IrregularCurve { t: f64, speed: f64 },
    #[error("curvature {kappa:e} below threshold at s = {s}; Frenet normal undefined")]
    VanishingCurvature { s: f64, kappa: f64 },
    #[error("geodesic left the chart domain at q = {q}")]
    LeftChartDomain { q: f64 },
    #[error("geodesic energy drift {drift:e} exceeds 1e-6; step too large")]
    StepTooLarge { drift: f64 },
    #[error("order fit failed: {reason}")]
    FitFailed { reason: String },
    #[error("rotation axis is zero but angle {angle} is not")]
    ZeroAxis { angle: f64 },
    #[error("adaptive integration could not meet tolerance {tol:e}")]
    ToleranceNotMet { tol: f64 },
    #[error("zero-length segment")]
    ZeroLengthSegment,
    #[error("operation requires a closed curve")]
    NotClosed,
    #[error("region not resolved: boundary cells cover {fraction:.4} of the region")]
    RegionNotResolved { fraction: f64 },
    #[error("grid too coarse: {reason}")]
    GridTooCoarse { reason: String },
    #[error("unknown catalog curve `{0}`")]
    UnknownCurve(String),
    #[error("region seed does not lie on the B side of the boundary curve")]
    OrientationMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            OutOfDomain { .. }
            | DegenerateChart { .. }
            | SingularMetric { .. }
            | IrregularCurve { .. }
            | VanishingCurvature { .. }
            | LeftChartDomain { .. }
            | NotClosed
            | OrientationMismatch
            | RegionNotResolved { .. } => ErrorClass::Geometry,
            StepTooLarge { .. }
            | FitFailed { .. }
            | ToleranceNotMet { .. }
            | GridTooCoarse { .. }
            | ZeroAxis { .. }
            | ZeroLengthSegment => ErrorClass::Numerical,
            UnknownCurve(_) | InvalidInput(_) => ErrorClass::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
