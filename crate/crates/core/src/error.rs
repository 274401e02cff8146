use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("magnitude out of range")]
    MagnitudeOutOfRange,

    #[error("trust radius exceeded: |z|*cutoff = {required} > trust radius {trust}")]
    TrustRadiusExceeded { required: f64, trust: f64 },

    #[error("series not trusted at radius {radius}")]
    SeriesNotTrusted { radius: f64 },

    #[error("degenerate head: domination constant undefined")]
    DegenerateHead,

    #[error("scan not converged (stopped at k = {cap})")]
    ScanNotConverged { cap: u64 },

    #[error("target value attained near contour (|f - c| = {modulus:e} < {guard:e})")]
    TargetNearContour { modulus: f64, guard: f64 },

    #[error("no certified target")]
    NoCertifiedTarget,

    #[error("boundary-ambiguous enumeration: solution at distance {distance:e} from the circle")]
    BoundaryAmbiguous { distance: f64 },

    #[error("no counterpart defined for example '{0}'")]
    NoCounterpart(String),

    #[error("malformed series file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
