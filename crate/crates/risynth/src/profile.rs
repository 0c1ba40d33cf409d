//! Quantized reflection-phase profiles.
//!
//! A profile assigns every element one phase level. Single-beam profiles
//! cancel the spatial phase accumulated toward a target direction, so the
//! reflected field adds coherently there. Multi-beam profiles average the
//! single-beam quantized phases and re-quantize the mean.
//!
//! The mean is computed through the integer sum of (2l - 1) terms, which is
//! exact, so superposition is invariant under beam reordering down to the
//! bit level.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::farfield::optical_path_difference;
use crate::geometry::{level_phase_unchecked, quantize_phase, ArrayGeometry, BeamSpec};

/// Per-element phase levels for one array, row-major with the y index
/// fastest: element (ix, iy) lives at `levels[ix * cols + iy]`.
///
/// Levels are 1-based and every entry lies in [1, 2^K]; `new` enforces this,
/// so downstream code can convert without rechecking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseProfile {
    rows: usize,
    cols: usize,
    resolution_bits: u32,
    levels: Vec<u32>,
}

impl PhaseProfile {
    pub fn new(rows: usize, cols: usize, resolution_bits: u32, levels: Vec<u32>) -> Result<Self> {
        if !(1..=crate::geometry::MAX_RESOLUTION_BITS).contains(&resolution_bits) {
            return Err(Error::InvalidParameter {
                field: "resolution_bits",
                constraint: "must lie in [1, 16]",
                value: resolution_bits.to_string(),
            });
        }
        if levels.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "phase profile",
                expected_rows: rows,
                expected_cols: cols,
                rows: levels.len(),
                cols: 1,
            });
        }
        let num_levels = 1u32 << resolution_bits;
        for &l in &levels {
            if l < 1 || l > num_levels {
                return Err(Error::LevelOutOfRange {
                    level: l,
                    num_levels,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            resolution_bits,
            levels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn resolution_bits(&self) -> u32 {
        self.resolution_bits
    }

    pub fn num_levels(&self) -> u32 {
        1u32 << self.resolution_bits
    }

    /// Row-major level storage, `rows * cols` entries.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, ix: usize, iy: usize) -> u32 {
        self.levels[ix * self.cols + iy]
    }

    /// Represented phases in radians, same layout as `levels`.
    pub fn phases(&self) -> Vec<f64> {
        let num_levels = self.num_levels();
        self.levels
            .iter()
            .map(|&l| level_phase_unchecked(l, num_levels))
            .collect()
    }
}

/// Unquantized compensation phases for one target beam, row-major, radians
/// in [0, 2 * pi).
///
/// Element (x, y) reflects with phase -k * (x * u + y * v) so the path delay
/// toward (theta, phi) is cancelled and the contributions align there.
pub fn single_beam_compensation(geometry: &ArrayGeometry, beam: BeamSpec) -> Vec<f64> {
    let k = geometry.wavenumber();
    optical_path_difference(geometry, beam.theta_deg, beam.phi_deg)
        .into_iter()
        .map(|opd| (-k * opd).rem_euclid(TAU))
        .collect()
}

/// Quantized single-beam profile at the geometry's phase resolution.
pub fn single_beam_profile(geometry: &ArrayGeometry, beam: BeamSpec) -> PhaseProfile {
    let num_levels = geometry.num_levels();
    let levels = single_beam_compensation(geometry, beam)
        .into_iter()
        .map(|p| quantize_phase(p, num_levels))
        .collect();
    PhaseProfile {
        rows: geometry.rows,
        cols: geometry.cols,
        resolution_bits: geometry.resolution_bits,
        levels,
    }
}

/// Profile that reflects toward every direction in `beams` at once.
///
/// Each beam is quantized on its own first; the per-element mean of the
/// quantized phases is then re-quantized. Summing the odd integers 2l - 1
/// keeps the mean exact, so the result does not depend on beam order. With a
/// single beam the result equals `single_beam_profile` level for level.
pub fn multi_beam_profile(geometry: &ArrayGeometry, beams: &[BeamSpec]) -> Result<PhaseProfile> {
    if beams.is_empty() {
        return Err(Error::NoBeams);
    }
    let num_levels = geometry.num_levels();
    let mut odd_sums = vec![0u64; geometry.num_elements()];
    for &beam in beams {
        let single = single_beam_profile(geometry, beam);
        for (sum, &level) in odd_sums.iter_mut().zip(&single.levels) {
            *sum += u64::from(2 * level - 1);
        }
    }
    let scale = PI / (num_levels as f64 * beams.len() as f64);
    let levels = odd_sums
        .into_iter()
        .map(|s| quantize_phase(s as f64 * scale, num_levels))
        .collect();
    Ok(PhaseProfile {
        rows: geometry.rows,
        cols: geometry.cols,
        resolution_bits: geometry.resolution_bits,
        levels,
    })
}

// ── tests ───────────────────────────────────────────────────────────────────
