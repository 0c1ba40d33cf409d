//! Artifact formats: pattern, profile, and convergence CSVs plus the
//! optional PNG heatmap. The CSVs are the canonical outputs; every writer
//! is deterministic so fixed-seed runs reproduce files byte for byte.

use crate::HarnessError;
use risynth::{FarFieldPattern, PhaseProfile};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// `theta_deg,phi_deg,magnitude_db` rows, row-major over theta then phi,
/// six decimal places.
pub fn pattern_csv(pattern: &FarFieldPattern) -> String {
    let mut out = String::with_capacity(pattern.num_points() * 32);
    out.push_str("theta_deg,phi_deg,magnitude_db\n");
    for (i, &theta) in pattern.theta_deg.iter().enumerate() {
        for (j, &phi) in pattern.phi_deg.iter().enumerate() {
            let _ = writeln!(out, "{theta:.6},{phi:.6},{:.6}", pattern.db_at(i, j));
        }
    }
    out
}

/// M rows by N integer columns, comma separated, no header.
pub fn profile_csv(profile: &PhaseProfile) -> String {
    let mut out = String::with_capacity(profile.rows() * profile.cols() * 2);
    for ix in 0..profile.rows() {
        for iy in 0..profile.cols() {
            if iy > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", profile.level(ix, iy));
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`profile_csv`]; the level count comes from the caller since
/// the file stores only the integers.
pub fn parse_profile_csv(text: &str, resolution_bits: u32) -> Result<PhaseProfile, HarnessError> {
    let mut levels = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<u32> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<u32>().map_err(|e| {
                    HarnessError::Config(format!(
                        "profile line {}: bad level {cell:?}: {e}",
                        line_no + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(HarnessError::Config(format!(
                    "profile line {}: expected {c} columns, found {}",
                    line_no + 1,
                    row.len()
                )));
            }
            Some(_) => {}
        }
        levels.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| HarnessError::Config("profile file is empty".into()))?;
    PhaseProfile::new(rows, cols, resolution_bits, levels).map_err(HarnessError::config)
}

/// One row per iteration, full-precision values so the summary's
/// post-suppression round-trips exactly.
pub fn convergence_csv(suppression: &[f64], fitness: &[f64]) -> String {
    let mut out = String::from("iteration,global_best_suppression_db,fitness_sum_db\n");
    for (t, (s, f)) in suppression.iter().zip(fitness).enumerate() {
        let _ = writeln!(out, "{},{s},{f}", t + 1);
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text)
        .map_err(|e| HarnessError::Runtime(format!("writing {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("reading {}: {e}", path.display())))
}

/// Grayscale PNG over the fixed -40..0 dB scale: one pixel per grid point,
/// theta down the image, phi across, darker is weaker.
pub fn write_heatmap(path: &Path, pattern: &FarFieldPattern) -> Result<(), HarnessError> {
    let width = pattern.phi_deg.len() as u32;
    let height = pattern.theta_deg.len() as u32;
    let mut img = image::GrayImage::new(width, height);
    for (i, row) in img.rows_mut().enumerate() {
        for (j, px) in row.enumerate() {
            let db = pattern.db_at(i, j).clamp(-40.0, 0.0);
            px.0 = [((db + 40.0) / 40.0 * 255.0).round() as u8];
        }
    }
    img.save(path)
        .map_err(|e| HarnessError::Runtime(format!("writing {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use risynth::{compute_pattern, AngularGrid, ArrayGeometry};

    fn profile() -> PhaseProfile {
        PhaseProfile::new(2, 3, 2, vec![1, 2, 3, 4, 1, 2]).unwrap()
    }

    #[test]
    fn profile_round_trips_through_csv() {
        let p = profile();
        let text = profile_csv(&p);
        assert_eq!(text, "1,2,3\n4,1,2\n");
        let back = parse_profile_csv(&text, 2).unwrap();
        assert_eq!(back.levels(), p.levels());
        assert_eq!((back.rows(), back.cols()), (2, 3));
    }

    #[test]
    fn ragged_profiles_are_rejected_with_the_line() {
        let err = parse_profile_csv("1,2\n3\n", 2).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn out_of_range_levels_are_rejected() {
        let err = parse_profile_csv("1,5\n", 2).unwrap_err();
        assert!(matches!(err, HarnessError::Config(_)));
    }

    #[test]
    fn pattern_csv_is_row_major_with_header() {
        let g = ArrayGeometry::new(1, 1, 0.021, 3.5e9, 0.7, 2).unwrap();
        let grid = AngularGrid::uniform(-1.0, 1.0, 0.0, 2.0, 1.0).unwrap();
        let p = PhaseProfile::new(1, 1, 2, vec![1]).unwrap();
        let pattern = compute_pattern(&g, &p, &grid).unwrap();
        let text = pattern_csv(&pattern);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta_deg,phi_deg,magnitude_db");
        assert_eq!(lines[1], "-1.000000,0.000000,0.000000");
        assert_eq!(lines[2], "-1.000000,1.000000,0.000000");
        assert_eq!(lines[3], "0.000000,0.000000,0.000000");
        assert_eq!(lines.len(), 1 + 3 * 2);
    }

    #[test]
    fn convergence_csv_has_one_row_per_iteration() {
        let text = convergence_csv(&[1.5, -0.25], &[10.0, 8.0]);
        assert_eq!(
            text,
            "iteration,global_best_suppression_db,fitness_sum_db\n1,1.5,10\n2,-0.25,8\n"
        );
    }
}
