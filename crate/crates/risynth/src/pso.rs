//! Integer particle swarm optimizer over phase-level matrices.
//!
//! Positions are whole level matrices, velocities stay real but clamped to
//! [-1, 1], and each move rounds back onto the integer lattice. Two devices
//! make that rounding workable:
//!
//! - a per-component discard mask zeroes the cognitive or social pull with a
//!   stage-dependent probability, so individual components take steps large
//!   enough to survive rounding instead of averaging out
//! - "knowledge" seeds particles at the multi-beam superposition profile,
//!   which starts the search near a decent optimum instead of noise
//!
//! Coefficients follow a four-stage schedule that moves from near-random
//! exploration to pure exploitation. The objective is the sidelobe
//! suppression metric; smaller is better throughout.
//!
//! Every particle owns one counter-based RNG stream derived from the master
//! seed, draws happen in particle order before objective evaluations, and
//! best-position reductions run in particle index order, so a run is
//! bit-reproducible for a given seed no matter how many threads evaluate
//! the objective.

use std::time::Instant;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farfield::{MaskSet, PatternEvaluator};
use crate::geometry::{AngularGrid, ArrayGeometry, BeamSpec};
use crate::profile::{multi_beam_profile, PhaseProfile};

// ── stage schedule ──────────────────────────────────────────────────────────

/// Coefficients in force during one schedule stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageParams {
    /// Probability that a cognitive velocity component is discarded.
    pub d1: f64,
    /// Probability that a social velocity component is discarded.
    pub d2: f64,
    /// Cognitive acceleration coefficient.
    pub c1: f64,
    /// Social acceleration coefficient.
    pub c2: f64,
    /// Inertia weight.
    pub w: f64,
}

impl StageParams {
    fn validate(&self) -> Result<()> {
        let probability = |name: &str, p: f64| {
            if p.is_finite() && (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidSchedule(format!(
                    "{name} = {p} outside [0, 1]"
                )))
            }
        };
        let coefficient = |name: &str, c: f64| {
            if c.is_finite() && c >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSchedule(format!("{name} = {c} must be >= 0")))
            }
        };
        probability("d1", self.d1)?;
        probability("d2", self.d2)?;
        coefficient("c1", self.c1)?;
        coefficient("c2", self.c2)?;
        coefficient("w", self.w)
    }
}

/// Piecewise-constant coefficient plan over iterations 1..=T.
///
/// Stage i is in force for iterations in (ends[i-1], ends[i]]; consecutive
/// equal ends leave a stage empty, which happens when T is smaller than the
/// stage count.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSchedule {
    stages: Vec<StageParams>,
    ends: Vec<usize>,
}

impl StageSchedule {
    pub fn new(stages: Vec<StageParams>, ends: Vec<usize>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidSchedule("no stages".into()));
        }
        if stages.len() != ends.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} stages but {} boundaries",
                stages.len(),
                ends.len()
            )));
        }
        for stage in &stages {
            stage.validate()?;
        }
        if ends[0] < 1 {
            return Err(Error::InvalidSchedule(
                "first stage must end at >= 1".into(),
            ));
        }
        for pair in ends.windows(2) {
            if pair[1] < pair[0] {
                return Err(Error::InvalidSchedule(format!(
                    "stage ends must not decrease ({} after {})",
                    pair[1], pair[0]
                )));
            }
        }
        Ok(Self { stages, ends })
    }

    /// The default four-stage plan scaled to `iterations`: near-random
    /// search, cognitive-leaning search, then two exploitation stages.
    /// Boundaries split the run into equal quarters, rounding the first
    /// stages up when the count is not divisible by four.
    pub fn four_stage(iterations: usize) -> Result<Self> {
        if iterations < 1 {
            return Err(Error::InvalidSchedule(
                "schedule needs at least one iteration".into(),
            ));
        }
        let stages = vec![
            StageParams {
                d1: 0.8,
                d2: 0.8,
                c1: 1.0,
                c2: 1.0,
                w: 0.6,
            },
            StageParams {
                d1: 0.4,
                d2: 0.6,
                c1: 1.2,
                c2: 0.8,
                w: 0.4,
            },
            StageParams {
                d1: 0.2,
                d2: 0.2,
                c1: 1.0,
                c2: 1.0,
                w: 0.2,
            },
            StageParams {
                d1: 0.0,
                d2: 0.0,
                c1: 0.9,
                c2: 1.1,
                w: 0.0,
            },
        ];
        let ends = (1..=4).map(|i| (iterations * i).div_ceil(4)).collect();
        Self::new(stages, ends)
    }

    /// Last iteration the schedule covers (T).
    pub fn last_iteration(&self) -> usize {
        *self.ends.last().expect("schedule is never empty")
    }

    pub fn stages(&self) -> &[StageParams] {
        &self.stages
    }

    pub fn ends(&self) -> &[usize] {
        &self.ends
    }

    /// Coefficients in force at a 1-based iteration.
    pub fn stage_params(&self, iteration: usize) -> Result<&StageParams> {
        if iteration < 1 || iteration > self.last_iteration() {
            return Err(Error::IterationOutOfRange {
                iteration,
                last: self.last_iteration(),
            });
        }
        let stage = self
            .ends
            .iter()
            .position(|&end| end >= iteration)
            .expect("iteration <= last end");
        Ok(&self.stages[stage])
    }
}

// ── configuration ───────────────────────────────────────────────────────────

/// How particles are seeded from the superposition profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Knowledge {
    /// All positions random.
    Zero,
    /// The first particle starts at the profile; the rest are random.
    Partial,
    /// Every particle starts at the profile; diversity comes from the
    /// random velocities and discard masks.
    Full,
}

/// What happens to a rounded position that leaves [1, 2^K].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Saturate at the range ends (default).
    Clamp,
    /// Wrap modulo the level count; phase is cyclic, so level 2^K + 1
    /// means level 1.
    Wrap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub particles: usize,
    pub iterations: usize,
    pub knowledge: Knowledge,
    pub schedule: StageSchedule,
    pub seed: u64,
    pub bound_mode: BoundMode,
}

impl PsoConfig {
    /// Config with the default four-stage schedule and clamped positions.
    pub fn new(
        particles: usize,
        iterations: usize,
        knowledge: Knowledge,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            particles,
            iterations,
            knowledge,
            schedule: StageSchedule::four_stage(iterations.max(1))?,
            seed,
            bound_mode: BoundMode::Clamp,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(Error::InvalidParameter {
                field: "particles",
                constraint: "must be at least 1",
                value: self.particles.to_string(),
            });
        }
        if self.iterations < 1 {
            return Err(Error::InvalidParameter {
                field: "iterations",
                constraint: "must be at least 1",
                value: self.iterations.to_string(),
            });
        }
        if self.schedule.last_iteration() != self.iterations {
            return Err(Error::InvalidSchedule(format!(
                "schedule covers [1, {}] but the run has {} iterations",
                self.schedule.last_iteration(),
                self.iterations
            )));
        }
        Ok(())
    }
}

// ── swarm state ─────────────────────────────────────────────────────────────

#[derive(Debug)]
struct Particle {
    position: Vec<u32>,
    velocity: Vec<f64>,
    best_position: Vec<u32>,
    best_value: f64,
    value: f64,
    rng: ChaCha8Rng,
}

/// Positions, velocities, and bests of the whole swarm after `iteration`
/// completed steps.
#[derive(Debug)]
pub struct SwarmState {
    particles: Vec<Particle>,
    best_position: Vec<u32>,
    best_value: f64,
    iteration: usize,
    num_levels: u32,
    bound_mode: BoundMode,
}

impl SwarmState {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn num_particles(&self) -> usize {
        self.particles.len()
    }

    pub fn best_value(&self) -> f64 {
        self.best_value
    }

    pub fn best_position(&self) -> &[u32] {
        &self.best_position
    }

    pub fn position(&self, particle: usize) -> &[u32] {
        &self.particles[particle].position
    }

    pub fn velocity(&self, particle: usize) -> &[f64] {
        &self.particles[particle].velocity
    }

    pub fn personal_best_value(&self, particle: usize) -> f64 {
        self.particles[particle].best_value
    }

    pub fn personal_best_position(&self, particle: usize) -> &[u32] {
        &self.particles[particle].best_position
    }

    /// Objective value of the particle's current position.
    pub fn particle_value(&self, particle: usize) -> f64 {
        self.particles[particle].value
    }

    /// Sum of all particles' current objective values, in particle order.
    pub fn fitness_sum(&self) -> f64 {
        self.particles.iter().map(|p| p.value).sum()
    }

    /// Evaluate results in particle order: first error aborts before any
    /// best is touched, then personal bests then the global best update,
    /// each requiring strict improvement.
    fn apply_evaluations(&mut self, outcomes: Vec<Result<f64>>) -> Result<()> {
        let mut values = Vec::with_capacity(outcomes.len());
        for (idx, outcome) in outcomes.into_iter().enumerate() {
            values.push(outcome.map_err(|e| Error::Objective {
                particle: idx,
                source: Box::new(e),
            })?);
        }
        for (particle, value) in self.particles.iter_mut().zip(values) {
            particle.value = value;
            if value < particle.best_value {
                particle.best_value = value;
                particle.best_position.copy_from_slice(&particle.position);
            }
        }
        for particle in &self.particles {
            if particle.best_value < self.best_value {
                self.best_value = particle.best_value;
                self.best_position.clear();
                self.best_position
                    .extend_from_slice(&particle.best_position);
            }
        }
        Ok(())
    }
}

// ── initialization ──────────────────────────────────────────────────────────

/// Build and evaluate the initial swarm.
///
/// Every particle gets velocities uniform in (-1, 1). Positions are uniform
/// random levels, except that `Partial` knowledge replaces the first
/// particle's position with the knowledge profile and `Full` replaces all of
/// them. Personal and global bests come from evaluating these positions.
pub fn init_swarm<F>(
    config: &PsoConfig,
    geometry: &ArrayGeometry,
    knowledge_profile: Option<&PhaseProfile>,
    objective: F,
) -> Result<SwarmState>
where
    F: Fn(&[u32]) -> Result<f64> + Sync,
{
    config.validate()?;
    let seeded_levels = match (config.knowledge, knowledge_profile) {
        (Knowledge::Zero, _) => None,
        (Knowledge::Partial, None) => return Err(Error::KnowledgeMissing { mode: "partial" }),
        (Knowledge::Full, None) => return Err(Error::KnowledgeMissing { mode: "full" }),
        (_, Some(profile)) => {
            if profile.rows() != geometry.rows || profile.cols() != geometry.cols {
                return Err(Error::DimensionMismatch {
                    what: "knowledge profile",
                    expected_rows: geometry.rows,
                    expected_cols: geometry.cols,
                    rows: profile.rows(),
                    cols: profile.cols(),
                });
            }
            if profile.resolution_bits() != geometry.resolution_bits {
                return Err(Error::InvalidParameter {
                    field: "resolution_bits",
                    constraint: "knowledge profile resolution must match the geometry",
                    value: profile.resolution_bits().to_string(),
                });
            }
            Some(profile.levels())
        }
    };

    let n = geometry.num_elements();
    let num_levels = geometry.num_levels();
    let mut particles = Vec::with_capacity(config.particles);
    for p in 0..config.particles {
        // Stream 0 is reserved for swarm-level draws; particles start at 1.
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(p as u64 + 1);
        let mut velocity = Vec::with_capacity(n);
        for _ in 0..n {
            let r: f64 = rng.sample(Open01);
            velocity.push(2.0 * r - 1.0);
        }
        let seeded = match config.knowledge {
            Knowledge::Zero => false,
            Knowledge::Partial => p == 0,
            Knowledge::Full => true,
        };
        let position: Vec<u32> = match (seeded, seeded_levels) {
            (true, Some(levels)) => levels.to_vec(),
            _ => (0..n)
                .map(|_| {
                    let r: f64 = rng.sample(Open01);
                    let level = (num_levels as f64 * r + 0.5).round() as u32;
                    level.min(num_levels)
                })
                .collect(),
        };
        particles.push(Particle {
            best_position: position.clone(),
            position,
            velocity,
            best_value: f64::INFINITY,
            value: f64::INFINITY,
            rng,
        });
    }

    let outcomes: Vec<Result<f64>> = particles
        .par_iter()
        .map(|particle| objective(&particle.position))
        .collect();
    let mut state = SwarmState {
        particles,
        best_position: Vec::new(),
        best_value: f64::INFINITY,
        iteration: 0,
        num_levels,
        bound_mode: config.bound_mode,
    };
    state.apply_evaluations(outcomes)?;
    Ok(state)
}

// ── one iteration ───────────────────────────────────────────────────────────

/// 1 with probability `1 - discard_rate`, else 0: one entry of a discard
/// mask.
pub fn sample_discard_mask(rng: &mut impl Rng, discard_rate: f64) -> f64 {
    if rng.random::<f64>() < discard_rate {
        0.0
    } else {
        1.0
    }
}

/// Velocity component after inertia plus masked pulls toward the personal
/// and global bests, clamped to [-1, 1].
/// `pull1` and `pull2` are the fully weighted cognitive and social
/// coefficients c1*r1*m1 and c2*r2*m2.
fn velocity_component(w: f64, v: f64, pull1: f64, pull2: f64, pm: f64, gm: f64, x: f64) -> f64 {
    let vel = w * v + pull1 * (pm - x) + pull2 * (gm - x);
    vel.clamp(-1.0, 1.0)
}

fn bound_position(rounded: f64, num_levels: u32, mode: BoundMode) -> u32 {
    let top = f64::from(num_levels);
    let bounded = match mode {
        BoundMode::Clamp => rounded.clamp(1.0, top),
        BoundMode::Wrap => (rounded - 1.0).rem_euclid(top) + 1.0,
    };
    bounded as u32
}

/// Advance the swarm one iteration under the given stage coefficients.
///
/// Per particle, in particle order: draw the scalars r1 and r2, then per
/// component one cognitive and one social discard mask; update the velocity,
/// round the moved position back onto [1, 2^K]. Objective evaluations may
/// then run in parallel; bests update sequentially afterwards.
pub fn step<F>(state: &mut SwarmState, params: &StageParams, objective: F) -> Result<()>
where
    F: Fn(&[u32]) -> Result<f64> + Sync,
{
    params.validate()?;
    let num_levels = state.num_levels;
    let bound_mode = state.bound_mode;
    let gbest = state.best_position.clone();
    for particle in &mut state.particles {
        let r1: f64 = particle.rng.sample(Open01);
        let r2: f64 = particle.rng.sample(Open01);
        for (e, &gm) in gbest.iter().enumerate() {
            let x = f64::from(particle.position[e]);
            let m1 = sample_discard_mask(&mut particle.rng, params.d1);
            let m2 = sample_discard_mask(&mut particle.rng, params.d2);
            let v = velocity_component(
                params.w,
                particle.velocity[e],
                params.c1 * r1 * m1,
                params.c2 * r2 * m2,
                f64::from(particle.best_position[e]),
                f64::from(gm),
                x,
            );
            particle.velocity[e] = v;
            particle.position[e] = bound_position((x + v).round(), num_levels, bound_mode);
        }
    }
    let outcomes: Vec<Result<f64>> = state
        .particles
        .par_iter()
        .map(|particle| objective(&particle.position))
        .collect();
    state.apply_evaluations(outcomes)?;
    state.iteration += 1;
    Ok(())
}

// ── full run ────────────────────────────────────────────────────────────────

/// Everything a finished optimization reports.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_profile: PhaseProfile,
    /// Final suppression of the best profile, dB.
    pub best_value: f64,
    /// Global best after each iteration; non-increasing, length T.
    pub suppression_history: Vec<f64>,
    /// Sum of all particles' objective values after each iteration,
    /// length T.
    pub fitness_history: Vec<f64>,
    pub wall_time_s: f64,
    /// Number of objective evaluations, including initialization.
    pub evaluations: usize,
}

/// Run the optimizer against the sidelobe suppression objective.
///
/// Builds the evaluator for the geometry and grid, computes the
/// superposition profile when knowledge seeding asks for it, then performs
/// `init_swarm` plus T steps under the config's schedule. The masks must
/// have been built on the same grid.
pub fn run(
    config: &PsoConfig,
    geometry: &ArrayGeometry,
    beams: &[BeamSpec],
    grid: &AngularGrid,
    masks: &MaskSet,
) -> Result<OptimizationResult> {
    config.validate()?;
    let start = Instant::now();
    let evaluator = PatternEvaluator::new(geometry, grid);
    let knowledge = match config.knowledge {
        Knowledge::Zero => None,
        Knowledge::Partial | Knowledge::Full => Some(multi_beam_profile(geometry, beams)?),
    };
    let objective = |levels: &[u32]| evaluator.suppression_levels(levels, masks);
    let mut state = init_swarm(config, geometry, knowledge.as_ref(), objective)?;
    let mut suppression_history = Vec::with_capacity(config.iterations);
    let mut fitness_history = Vec::with_capacity(config.iterations);
    for t in 1..=config.iterations {
        let params = config.schedule.stage_params(t)?;
        step(&mut state, params, objective)?;
        suppression_history.push(state.best_value());
        fitness_history.push(state.fitness_sum());
    }
    let best_profile = PhaseProfile::new(
        geometry.rows,
        geometry.cols,
        geometry.resolution_bits,
        state.best_position().to_vec(),
    )?;
    Ok(OptimizationResult {
        best_profile,
        best_value: state.best_value(),
        suppression_history,
        fitness_history,
        wall_time_s: start.elapsed().as_secs_f64(),
        evaluations: config.particles * (config.iterations + 1),
    })
}

// ── tests ───────────────────────────────────────────────────────────────────
