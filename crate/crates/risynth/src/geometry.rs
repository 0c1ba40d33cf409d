//! Array geometry, quantized phase levels, beam targets, and the angular grid.
//!
//! Conventions shared by the whole crate:
//!
//! - the array lies in the z = 0 plane with the corner element at the origin;
//!   element (ix, iy) sits at (ix * spacing, iy * spacing), 0-based
//! - angles cross public boundaries in degrees and are converted to radians
//!   internally; theta is measured from boresight in [-90, 90], phi from the
//!   x axis in [0, 360)
//! - a K-bit element holds one of 2^K phase levels; level l represents the
//!   phase (2l - 1) * pi / 2^K, so the levels are centered in equal bins of
//!   width 2 * pi / 2^K

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Free-space speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest supported phase resolution; 2^16 levels is already far beyond
/// practical hardware and keeps the per-level phasor table small.
pub const MAX_RESOLUTION_BITS: u32 = 16;

// ── array geometry ──────────────────────────────────────────────────────────

/// Physical description of a rectangular reflectarray with uniform element
/// spacing and identical element amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    /// Element count along x.
    pub rows: usize,
    /// Element count along y.
    pub cols: usize,
    /// Center-to-center element spacing, meters.
    pub spacing_m: f64,
    /// Operating frequency, Hz.
    pub frequency_hz: f64,
    /// Per-element reflection amplitude, in (0, 1].
    pub amplitude: f64,
    /// Phase resolution in bits; each element holds one of 2^K levels.
    pub resolution_bits: u32,
}

impl ArrayGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing_m: f64,
        frequency_hz: f64,
        amplitude: f64,
        resolution_bits: u32,
    ) -> Result<Self> {
        if rows == 0 {
            return err_param("rows", "must be at least 1", rows);
        }
        if cols == 0 {
            return err_param("cols", "must be at least 1", cols);
        }
        if !(spacing_m.is_finite() && spacing_m > 0.0) {
            return err_param("spacing_m", "must be finite and positive", spacing_m);
        }
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return err_param("frequency_hz", "must be finite and positive", frequency_hz);
        }
        if !(amplitude.is_finite() && amplitude > 0.0 && amplitude <= 1.0) {
            return err_param("amplitude", "must lie in (0, 1]", amplitude);
        }
        if !(1..=MAX_RESOLUTION_BITS).contains(&resolution_bits) {
            return err_param("resolution_bits", "must lie in [1, 16]", resolution_bits);
        }
        Ok(Self {
            rows,
            cols,
            spacing_m,
            frequency_hz,
            amplitude,
            resolution_bits,
        })
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Free-space wavenumber k = 2 * pi / lambda, rad/m.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength()
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Number of representable phase levels, 2^K.
    pub fn num_levels(&self) -> u32 {
        1u32 << self.resolution_bits
    }

    /// In-plane position of element (ix, iy), meters, 0-based indices.
    pub fn element_position(&self, ix: usize, iy: usize) -> (f64, f64) {
        (ix as f64 * self.spacing_m, iy as f64 * self.spacing_m)
    }
}

fn err_param<T>(field: &'static str, constraint: &'static str, value: impl ToString) -> Result<T> {
    Err(Error::InvalidParameter {
        field,
        constraint,
        value: value.to_string(),
    })
}

// ── beam targets ────────────────────────────────────────────────────────────

/// One desired reflection direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl BeamSpec {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        if !(theta_deg.is_finite() && (-90.0..=90.0).contains(&theta_deg)) {
            return err_param("theta_deg", "must lie in [-90, 90]", theta_deg);
        }
        if !(phi_deg.is_finite() && (0.0..360.0).contains(&phi_deg)) {
            return err_param("phi_deg", "must lie in [0, 360)", phi_deg);
        }
        Ok(Self { theta_deg, phi_deg })
    }
}

// ── angular grid ────────────────────────────────────────────────────────────

/// Regular (theta, phi) evaluation grid, degrees. Samples are strictly
/// increasing with uniform spacing `step_deg` on both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    pub step_deg: f64,
}

impl AngularGrid {
    pub fn new(theta_deg: Vec<f64>, phi_deg: Vec<f64>, step_deg: f64) -> Result<Self> {
        if !(step_deg.is_finite() && step_deg > 0.0) {
            return err_param("step_deg", "must be finite and positive", step_deg);
        }
        check_axis("theta_deg", &theta_deg, step_deg, -90.0..=90.0)?;
        check_axis("phi_deg", &phi_deg, step_deg, 0.0..360.0)?;
        Ok(Self {
            theta_deg,
            phi_deg,
            step_deg,
        })
    }

    /// Build a grid from ranges. The theta stop is inclusive, the phi stop is
    /// exclusive (phi wraps, so [0, 360) covers the circle once). Both spans
    /// must be whole multiples of `step_deg`.
    pub fn uniform(
        theta_start: f64,
        theta_stop: f64,
        phi_start: f64,
        phi_stop: f64,
        step_deg: f64,
    ) -> Result<Self> {
        let n_theta = span_steps("theta", theta_start, theta_stop, step_deg)? + 1;
        let n_phi = span_steps("phi", phi_start, phi_stop, step_deg)?;
        if n_phi == 0 {
            return err_param("phi", "range must contain at least one sample", phi_stop);
        }
        let theta = (0..n_theta)
            .map(|i| theta_start + i as f64 * step_deg)
            .collect();
        let phi = (0..n_phi)
            .map(|j| phi_start + j as f64 * step_deg)
            .collect();
        Self::new(theta, phi, step_deg)
    }

    pub fn num_points(&self) -> usize {
        self.theta_deg.len() * self.phi_deg.len()
    }

    /// Row-major index of grid point (theta index, phi index).
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.phi_deg.len() + j
    }
}

impl Default for AngularGrid {
    /// 1-degree grid over the front hemisphere: theta in [-90, 90] inclusive,
    /// phi in [0, 180) (181 x 180 points).
    fn default() -> Self {
        Self::uniform(-90.0, 90.0, 0.0, 180.0, 1.0).expect("default grid ranges are valid")
    }
}

fn check_axis(
    field: &'static str,
    samples: &[f64],
    step: f64,
    range: impl std::ops::RangeBounds<f64>,
) -> Result<()> {
    if samples.is_empty() {
        return err_param(field, "must contain at least one sample", "[]");
    }
    for &s in samples {
        if !(s.is_finite() && range.contains(&s)) {
            return err_param(field, "samples must be finite and within range", s);
        }
    }
    for pair in samples.windows(2) {
        let d = pair[1] - pair[0];
        if d <= 0.0 || (d - step).abs() > 1e-9 {
            return err_param(
                field,
                "samples must increase by exactly the declared step",
                d,
            );
        }
    }
    Ok(())
}

fn span_steps(field: &'static str, start: f64, stop: f64, step: f64) -> Result<usize> {
    if !(start.is_finite() && stop.is_finite() && stop >= start) {
        return err_param(field, "range must be finite with stop >= start", stop);
    }
    let span = (stop - start) / step;
    let n = span.round();
    if (span - n).abs() > 1e-9 {
        return err_param(field, "range must be a whole multiple of the step", span);
    }
    Ok(n as usize)
}

// ── quantized phase levels ──────────────────────────────────────────────────

fn check_bits(resolution_bits: u32) -> Result<u32> {
    if !(1..=MAX_RESOLUTION_BITS).contains(&resolution_bits) {
        err_param("resolution_bits", "must lie in [1, 16]", resolution_bits)
    } else {
        Ok(1u32 << resolution_bits)
    }
}

/// Phase represented by `level` at K-bit resolution: (2l - 1) * pi / 2^K
/// radians. Levels are 1-based; K = 2 maps levels 1..=4 onto 45, 135, 225,
/// and 315 degrees.
pub fn level_to_phase(level: u32, resolution_bits: u32) -> Result<f64> {
    let num_levels = check_bits(resolution_bits)?;
    if level < 1 || level > num_levels {
        return Err(Error::LevelOutOfRange { level, num_levels });
    }
    Ok(level_phase_unchecked(level, num_levels))
}

#[inline]
pub(crate) fn level_phase_unchecked(level: u32, num_levels: u32) -> f64 {
    (2 * level - 1) as f64 * PI / num_levels as f64
}

/// Nearest representable level for an arbitrary phase, by circular distance.
/// Exact midpoints resolve to the smaller level.
pub fn phase_to_level(phase_rad: f64, resolution_bits: u32) -> Result<u32> {
    let num_levels = check_bits(resolution_bits)?;
    if !phase_rad.is_finite() {
        return err_param("phase_rad", "must be finite", phase_rad);
    }
    Ok(quantize_phase(phase_rad, num_levels))
}

/// `phase_to_level` without the argument checks; `phase_rad` must be finite
/// and `num_levels` a supported power of two.
pub(crate) fn quantize_phase(phase_rad: f64, num_levels: u32) -> u32 {
    let reduced = phase_rad.rem_euclid(TAU);
    let mut best = 1u32;
    let mut best_dist = f64::INFINITY;
    for level in 1..=num_levels {
        let d = circular_distance(reduced, level_phase_unchecked(level, num_levels));
        if d < best_dist {
            best = level;
            best_dist = d;
        }
    }
    best
}

/// Shorter arc between two angles already reduced to [0, 2 * pi].
fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

// ── tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(rad: f64) -> f64 {
        rad.to_degrees()
    }

    #[test]
    fn two_bit_levels_map_to_diagonal_phases() {
        let got: Vec<f64> = (1..=4)
            .map(|l| deg(level_to_phase(l, 2).unwrap()))
            .collect();
        for (g, want) in got.iter().zip([45.0, 135.0, 225.0, 315.0]) {
            assert!((g - want).abs() < 1e-12, "got {g}, want {want}");
        }
    }

    #[test]
    fn one_bit_level_two_is_270_degrees() {
        let p = level_to_phase(2, 1).unwrap();
        assert!((deg(p) - 270.0).abs() < 1e-12, "got {} deg", deg(p));
    }

    #[test]
    fn level_bounds_are_enforced() {
        assert!(matches!(
            level_to_phase(0, 2),
            Err(Error::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            level_to_phase(5, 2),
            Err(Error::LevelOutOfRange { .. })
        ));
        assert!(level_to_phase(1, 0).is_err());
        assert!(level_to_phase(1, 17).is_err());
    }

    #[test]
    fn round_trip_is_exact_for_every_level() {
        for bits in 1..=3u32 {
            for level in 1..=(1u32 << bits) {
                let phase = level_to_phase(level, bits).unwrap();
                assert_eq!(
                    phase_to_level(phase, bits).unwrap(),
                    level,
                    "bits {bits} level {level}"
                );
            }
        }
    }

    #[test]
    fn hundred_degrees_quantizes_to_level_two() {
        assert_eq!(phase_to_level(100f64.to_radians(), 2).unwrap(), 2);
    }

    #[test]
    fn zero_phase_ties_toward_level_one() {
        // 0 deg is equidistant from 45 and 315
        assert_eq!(phase_to_level(0.0, 2).unwrap(), 1);
    }

    #[test]
    fn exact_midpoint_ties_toward_smaller_level() {
        // 90 deg is equidistant from 45 and 135
        assert_eq!(phase_to_level(std::f64::consts::FRAC_PI_2, 2).unwrap(), 1);
    }

    #[test]
    fn negative_phase_wraps_before_quantizing() {
        assert_eq!(phase_to_level(-std::f64::consts::FRAC_PI_4, 2).unwrap(), 4);
    }

    #[test]
    fn quantization_error_is_bounded_by_half_bin() {
        for bits in [1u32, 2, 3] {
            let num_levels = 1u32 << bits;
            let half_bin = PI / num_levels as f64;
            for i in 0..720 {
                let phase = i as f64 * (TAU / 720.0) - TAU;
                let level = phase_to_level(phase, bits).unwrap();
                let back = level_to_phase(level, bits).unwrap();
                let err = circular_distance(phase.rem_euclid(TAU), back);
                assert!(
                    err <= half_bin + 1e-12,
                    "bits {bits} phase {phase}: err {err} > {half_bin}"
                );
            }
        }
    }

    #[test]
    fn non_finite_phase_is_rejected() {
        assert!(phase_to_level(f64::NAN, 2).is_err());
        assert!(phase_to_level(f64::INFINITY, 2).is_err());
    }

    #[test]
    fn geometry_validation_names_the_field() {
        let e = ArrayGeometry::new(0, 30, 0.021, 3.5e9, 0.7, 2).unwrap_err();
        assert!(e.to_string().contains("rows"), "{e}");
        let e = ArrayGeometry::new(30, 30, 0.021, 3.5e9, 1.5, 2).unwrap_err();
        assert!(e.to_string().contains("amplitude"), "{e}");
        let e = ArrayGeometry::new(30, 30, -1.0, 3.5e9, 0.7, 2).unwrap_err();
        assert!(e.to_string().contains("spacing_m"), "{e}");
        let e = ArrayGeometry::new(30, 30, 0.021, 3.5e9, 0.7, 0).unwrap_err();
        assert!(e.to_string().contains("resolution_bits"), "{e}");
    }

    #[test]
    fn reference_geometry_is_near_quarter_wavelength() {
        let g = ArrayGeometry::new(30, 30, 0.021, 3.5e9, 0.7, 2).unwrap();
        assert!((g.wavelength() - 0.0856550).abs() < 1e-6);
        assert!((g.spacing_m / g.wavelength() - 0.2452).abs() < 1e-3);
        assert_eq!(g.num_elements(), 900);
        assert_eq!(g.num_levels(), 4);
        let (x, y) = g.element_position(2, 5);
        assert!((x - 0.042).abs() < 1e-12 && (y - 0.105).abs() < 1e-12);
    }

    #[test]
    fn default_grid_is_one_degree_hemisphere() {
        let g = AngularGrid::default();
        assert_eq!(g.theta_deg.len(), 181);
        assert_eq!(g.phi_deg.len(), 180);
        assert_eq!(g.num_points(), 32_580);
        assert_eq!(g.theta_deg[0], -90.0);
        assert_eq!(*g.theta_deg.last().unwrap(), 90.0);
        assert_eq!(g.phi_deg[0], 0.0);
        assert_eq!(*g.phi_deg.last().unwrap(), 179.0);
    }

    #[test]
    fn misaligned_grid_range_is_rejected() {
        assert!(AngularGrid::uniform(-90.0, 90.0, 0.0, 180.5, 1.0).is_err());
        assert!(AngularGrid::uniform(-90.0, 89.3, 0.0, 180.0, 1.0).is_err());
    }

    #[test]
    fn single_phi_column_grid_is_valid() {
        let g = AngularGrid::uniform(-90.0, 90.0, 90.0, 91.0, 1.0).unwrap();
        assert_eq!(g.phi_deg, vec![90.0]);
        assert_eq!(g.num_points(), 181);
    }

    #[test]
    fn beam_spec_bounds() {
        assert!(BeamSpec::new(45.0, 30.0).is_ok());
        assert!(BeamSpec::new(95.0, 30.0).is_err());
        assert!(BeamSpec::new(45.0, 360.0).is_err());
        assert!(BeamSpec::new(f64::NAN, 0.0).is_err());
    }
}
