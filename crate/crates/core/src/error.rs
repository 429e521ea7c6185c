use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized (norm^2 = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("matrix is not unitary (|u^dagger u - I| = {defect:e})")]
    NonUnitary { defect: f64 },

    #[error("basis is not orthonormal (|<b0|b1>| = {overlap:e})")]
    NonOrthonormalBasis { overlap: f64 },

    #[error("post-selected state is orthogonal to the preparation (|<post|pre>| = {overlap:e}); weak value undefined")]
    OrthogonalPostselection { overlap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: sigma = {sigma_mm} mm needs pixel <= {max_pixel_mm} mm")]
    GridTooCoarse { sigma_mm: f64, max_pixel_mm: f64 },

    #[error("grid too small: 6 sigma = {required_mm} mm exceeds extent {extent_mm} mm")]
    GridTooSmall { required_mm: f64, extent_mm: f64 },

    #[error("field is in {actual} space, operation requires {expected} space")]
    WrongSpace {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("phase ramp for delta = {delta_mm} mm aliases on this grid (limit {limit_mm} mm)")]
    AliasingRisk { delta_mm: f64, limit_mm: f64 },

    #[error("shift {delta_mm} mm exceeds a quarter of the grid extent ({limit_mm} mm)")]
    ShiftTooLarge { delta_mm: f64, limit_mm: f64 },

    #[error("image has no intensity")]
    EmptyImage,

    #[error("xy mean does not change sign over the record range")]
    NoSignChange,

    #[error("xy mean has no interior minimum over the record range")]
    NoInteriorExtremum,

    #[error("at delta = {delta_mm} mm: {source}")]
    Engine {
        delta_mm: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed {format} data: {reason}")]
    Format {
        format: &'static str,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
