use thiserror::Error;

/// Errors from geometry validation, profile synthesis, far-field evaluation,
/// and the optimizer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{field}: {constraint} (got {value})")]
    InvalidParameter {
        field: &'static str,
        constraint: &'static str,
        value: String,
    },

    #[error("phase level {level} outside [1, {num_levels}]")]
    LevelOutOfRange { level: u32, num_levels: u32 },

    #[error("{what}: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        what: &'static str,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("beam list is empty")]
    NoBeams,

    #[error(
        "beam {index} at (theta {theta_deg} deg, phi {phi_deg} deg): \
         wanted disk lies entirely off the grid"
    )]
    BeamOffGrid {
        index: usize,
        theta_deg: f64,
        phi_deg: f64,
    },

    #[error("mask region `{region}` is empty over this grid")]
    EmptyMask { region: String },

    #[error("evaluation grid has {expected} points but the masks cover {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("invalid stage schedule: {0}")]
    InvalidSchedule(String),

    #[error("iteration {iteration} outside schedule range [1, {last}]")]
    IterationOutOfRange { iteration: usize, last: usize },

    #[error("knowledge mode `{mode}` requires a knowledge profile")]
    KnowledgeMissing { mode: &'static str },

    #[error("objective evaluation failed for particle {particle}: {source}")]
    Objective {
        particle: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
