//! Phase-only pattern synthesis for quantized reflectarrays.
//!
//! The crate models a planar array whose elements apply one of 2^K discrete
//! reflection phases. It synthesizes multi-beam phase profiles by
//! superposing quantized single-beam compensations, evaluates far-field
//! power patterns on an angular grid, and sharpens profiles with an integer
//! particle swarm optimizer that minimizes the sidelobe level relative to
//! the weakest intended beam.
//!
//! Everything is deterministic under a fixed seed: evaluation and reduction
//! orders are pinned, and each particle draws from its own RNG stream, so
//! results do not depend on thread count.
//!
//! # Example
//!
//! ```
//! use risynth::{
//!     build_masks, multi_beam_profile, AngularGrid, ArrayGeometry, BeamSpec,
//!     PatternEvaluator,
//! };
//!
//! let geometry = ArrayGeometry::new(8, 8, 0.021, 3.5e9, 0.7, 2)?;
//! let beams = [BeamSpec::new(45.0, 30.0)?, BeamSpec::new(45.0, 110.0)?];
//! let profile = multi_beam_profile(&geometry, &beams)?;
//!
//! let grid = AngularGrid::default();
//! let masks = build_masks(&grid, &beams, 10.0)?;
//! let evaluator = PatternEvaluator::new(&geometry, &grid);
//! let suppression = evaluator.suppression(&profile, &masks)?;
//! assert!(suppression.is_finite());
//! # Ok::<(), risynth::Error>(())
//! ```

pub mod error;
pub mod farfield;
pub mod geometry;
pub mod profile;
pub mod pso;

pub use error::{Error, Result};
pub use farfield::{
    build_masks, compute_pattern, optical_path_difference, sll_objective, FarFieldPattern, MaskSet,
    PatternEvaluator, DB_FLOOR,
};
pub use geometry::{
    level_to_phase, phase_to_level, AngularGrid, ArrayGeometry, BeamSpec, SPEED_OF_LIGHT,
};
pub use profile::{
    multi_beam_profile, single_beam_compensation, single_beam_profile, PhaseProfile,
};
pub use pso::{
    init_swarm, run, sample_discard_mask, step, BoundMode, Knowledge, OptimizationResult,
    PsoConfig, StageParams, StageSchedule, SwarmState,
};
