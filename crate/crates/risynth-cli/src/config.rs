//! Experiment configuration: a TOML document with dotted sections, every
//! field optional, defaults reproducing the reference two-beam scenario
//! (30x30 array, 21 mm spacing, 3.5 GHz, 2-bit, beams at (45,30) and
//! (45,110), R = 10, 100 particles, 100 iterations, full knowledge).
//!
//! Unknown keys are rejected so typos cannot silently fall back to
//! defaults. Parse errors carry the line and column from the TOML parser.

use crate::HarnessError;
use risynth::{
    build_masks, AngularGrid, ArrayGeometry, BeamSpec, BoundMode, Knowledge, MaskSet, PsoConfig,
    StageParams, StageSchedule,
};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryBlock,
    pub beams: Vec<BeamEntry>,
    pub grid: GridBlock,
    pub mask_radius_deg: f64,
    pub pso: PsoBlock,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryBlock::default(),
            beams: vec![
                BeamEntry {
                    theta_deg: 45.0,
                    phi_deg: 30.0,
                },
                BeamEntry {
                    theta_deg: 45.0,
                    phi_deg: 110.0,
                },
            ],
            grid: GridBlock::default(),
            mask_radius_deg: 10.0,
            pso: PsoBlock::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryBlock {
    pub rows: usize,
    pub cols: usize,
    pub spacing_mm: f64,
    pub frequency_ghz: f64,
    pub amplitude: f64,
    pub resolution_bits: u32,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        Self {
            rows: 30,
            cols: 30,
            spacing_mm: 21.0,
            frequency_ghz: 3.5,
            amplitude: 0.7,
            resolution_bits: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamEntry {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub theta_start_deg: f64,
    pub theta_stop_deg: f64,
    pub phi_start_deg: f64,
    /// Exclusive, matching the grid type's half-open phi axis.
    pub phi_stop_deg: f64,
    pub step_deg: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            theta_start_deg: -90.0,
            theta_stop_deg: 90.0,
            phi_start_deg: 0.0,
            phi_stop_deg: 180.0,
            step_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnowledgeChoice {
    Zero,
    Partial,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundChoice {
    Clamp,
    Wrap,
}

/// One stage of a schedule override; all five coefficients are required.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageEntry {
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoBlock {
    pub particles: usize,
    pub iterations: usize,
    pub knowledge: KnowledgeChoice,
    pub seed: u64,
    pub bound_mode: BoundChoice,
    /// Schedule override; omitted means the built-in four-stage plan.
    pub stages: Option<Vec<StageEntry>>,
    /// Last iteration of each override stage; defaults to an equal split.
    pub stage_ends: Option<Vec<usize>>,
}

impl Default for PsoBlock {
    fn default() -> Self {
        Self {
            particles: 100,
            iterations: 100,
            knowledge: KnowledgeChoice::Full,
            seed: 0,
            bound_mode: BoundChoice::Clamp,
            stages: None,
            stage_ends: None,
        }
    }
}

impl ExperimentConfig {
    pub fn geometry(&self) -> Result<ArrayGeometry, HarnessError> {
        let g = &self.geometry;
        ArrayGeometry::new(
            g.rows,
            g.cols,
            g.spacing_mm * 1e-3,
            g.frequency_ghz * 1e9,
            g.amplitude,
            g.resolution_bits,
        )
        .map_err(HarnessError::config)
    }

    pub fn beams(&self) -> Result<Vec<BeamSpec>, HarnessError> {
        self.beams
            .iter()
            .map(|b| BeamSpec::new(b.theta_deg, b.phi_deg).map_err(HarnessError::config))
            .collect()
    }

    pub fn grid(&self) -> Result<AngularGrid, HarnessError> {
        let g = &self.grid;
        AngularGrid::uniform(
            g.theta_start_deg,
            g.theta_stop_deg,
            g.phi_start_deg,
            g.phi_stop_deg,
            g.step_deg,
        )
        .map_err(HarnessError::config)
    }

    pub fn masks(&self, grid: &AngularGrid, beams: &[BeamSpec]) -> Result<MaskSet, HarnessError> {
        build_masks(grid, beams, self.mask_radius_deg).map_err(HarnessError::config)
    }

    pub fn pso(&self, seed_override: Option<u64>) -> Result<PsoConfig, HarnessError> {
        let p = &self.pso;
        let knowledge = match p.knowledge {
            KnowledgeChoice::Zero => Knowledge::Zero,
            KnowledgeChoice::Partial => Knowledge::Partial,
            KnowledgeChoice::Full => Knowledge::Full,
        };
        let seed = seed_override.unwrap_or(p.seed);
        let mut config = PsoConfig::new(p.particles, p.iterations, knowledge, seed)
            .map_err(HarnessError::config)?;
        if p.bound_mode == BoundChoice::Wrap {
            config.bound_mode = BoundMode::Wrap;
        }
        match (&p.stages, &p.stage_ends) {
            (None, None) => {}
            (None, Some(_)) => {
                return Err(HarnessError::Config(
                    "pso.stage_ends requires pso.stages".into(),
                ));
            }
            (Some(stages), ends) => {
                let params: Vec<StageParams> = stages
                    .iter()
                    .map(|s| StageParams {
                        d1: s.d1,
                        d2: s.d2,
                        c1: s.c1,
                        c2: s.c2,
                        w: s.w,
                    })
                    .collect();
                let ends = match ends {
                    Some(e) => e.clone(),
                    None => equal_split(p.iterations, params.len()),
                };
                config.schedule = StageSchedule::new(params, ends).map_err(HarnessError::config)?;
                config.validate().map_err(HarnessError::config)?;
            }
        }
        Ok(config)
    }
}

/// Last iterations of `n` stages dividing `iterations` as evenly as
/// possible, later stages absorbing the remainder's complement.
fn equal_split(iterations: usize, n: usize) -> Vec<usize> {
    (1..=n).map(|i| (iterations * i).div_ceil(n)).collect()
}

/// Parses and fully validates a configuration document. Every block is
/// resolved once so field errors surface here rather than mid-run.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let grid = config.grid()?;
    let beams = config.beams()?;
    config.geometry()?;
    config.masks(&grid, &beams)?;
    config.pso(None)?;
    Ok(config)
}
