//! Experiment orchestration: resolves a configuration into library types,
//! runs the superposition baseline and the optimizer, and writes the
//! artifact bundle. Single threaded by design; parallelism lives inside
//! the library's objective evaluations.

use crate::artifacts::{convergence_csv, pattern_csv, profile_csv, write_heatmap, write_text};
use crate::config::ExperimentConfig;
use crate::HarnessError;
use risynth::{
    multi_beam_profile, AngularGrid, ArrayGeometry, BeamSpec, BoundMode, Knowledge, MaskSet,
    OptimizationResult, PatternEvaluator, PsoConfig,
};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub emit_heatmap: bool,
    pub quiet: bool,
}

/// Configuration lowered to validated library types.
pub struct ResolvedExperiment {
    pub geometry: ArrayGeometry,
    pub beams: Vec<BeamSpec>,
    pub grid: AngularGrid,
    pub masks: MaskSet,
    pub pso: PsoConfig,
    pub mask_radius_deg: f64,
    pub output_dir: PathBuf,
}

pub fn resolve(
    config: &ExperimentConfig,
    options: &RunOptions,
) -> Result<ResolvedExperiment, HarnessError> {
    let geometry = config.geometry()?;
    let beams = config.beams()?;
    let grid = config.grid()?;
    let masks = config.masks(&grid, &beams)?;
    let pso = config.pso(options.seed)?;
    Ok(ResolvedExperiment {
        geometry,
        beams,
        grid,
        masks,
        pso,
        mask_radius_deg: config.mask_radius_deg,
        output_dir: options
            .out
            .clone()
            .unwrap_or_else(|| config.output_dir.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub elements: usize,
    pub individuals: usize,
    pub optimization_time_minutes: f64,
    pub efficiency: f64,
}

/// Elements times individuals per optimization minute.
pub fn efficiency(
    elements: usize,
    individuals: usize,
    minutes: f64,
) -> Result<EfficiencyReport, HarnessError> {
    if !(minutes.is_finite() && minutes > 0.0) {
        return Err(HarnessError::Runtime(format!(
            "optimization time must be positive, got {minutes} minutes"
        )));
    }
    Ok(EfficiencyReport {
        elements,
        individuals,
        optimization_time_minutes: minutes,
        efficiency: elements as f64 * individuals as f64 / minutes,
    })
}

pub struct RunReport {
    pub pre_suppression_db: f64,
    pub post_suppression_db: f64,
    pub result: OptimizationResult,
    pub efficiency: EfficiencyReport,
    pub output_dir: PathBuf,
}

pub fn run_experiment(
    config: &ExperimentConfig,
    options: &RunOptions,
) -> Result<RunReport, HarnessError> {
    let exp = resolve(config, options)?;
    fs::create_dir_all(&exp.output_dir).map_err(|e| {
        HarnessError::Runtime(format!("creating {}: {e}", exp.output_dir.display()))
    })?;

    let evaluator = PatternEvaluator::new(&exp.geometry, &exp.grid);
    let baseline = multi_beam_profile(&exp.geometry, &exp.beams).map_err(HarnessError::runtime)?;
    let pre_pattern = evaluator
        .pattern(&baseline)
        .map_err(HarnessError::runtime)?;
    let pre_suppression = evaluator
        .suppression(&baseline, &exp.masks)
        .map_err(HarnessError::runtime)?;

    let result = risynth::run(&exp.pso, &exp.geometry, &exp.beams, &exp.grid, &exp.masks)
        .map_err(HarnessError::runtime)?;
    let post_pattern = evaluator
        .pattern(&result.best_profile)
        .map_err(HarnessError::runtime)?;

    let report = efficiency(
        exp.geometry.num_elements(),
        exp.pso.particles,
        result.wall_time_s / 60.0,
    )?;

    let dir = &exp.output_dir;
    write_text(&dir.join("pre_profile.csv"), &profile_csv(&baseline))?;
    write_text(&dir.join("pre_pattern.csv"), &pattern_csv(&pre_pattern))?;
    write_text(
        &dir.join("post_profile.csv"),
        &profile_csv(&result.best_profile),
    )?;
    write_text(&dir.join("post_pattern.csv"), &pattern_csv(&post_pattern))?;
    write_text(
        &dir.join("convergence.csv"),
        &convergence_csv(&result.suppression_history, &result.fitness_history),
    )?;
    let summary = summary_text(&exp, pre_suppression, &result, &report);
    write_text(&dir.join("summary.txt"), &summary)?;
    if options.emit_heatmap {
        write_heatmap(&dir.join("pre_pattern.png"), &pre_pattern)?;
        write_heatmap(&dir.join("post_pattern.png"), &post_pattern)?;
    }

    if !options.quiet {
        println!("pre-optimization suppression:  {pre_suppression:+.4} dB");
        println!(
            "post-optimization suppression: {:+.4} dB ({} evaluations, {:.1} s)",
            result.best_value, result.evaluations, result.wall_time_s
        );
        println!("artifacts: {}", dir.display());
    }

    Ok(RunReport {
        pre_suppression_db: pre_suppression,
        post_suppression_db: result.best_value,
        result,
        efficiency: report,
        output_dir: exp.output_dir,
    })
}

/// Key-value summary. Everything except the wall-time block and the two
/// time-derived efficiency fields is reproducible under a fixed seed.
fn summary_text(
    exp: &ResolvedExperiment,
    pre_suppression: f64,
    result: &OptimizationResult,
    report: &EfficiencyReport,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "pre_suppression_db={pre_suppression}");
    let _ = writeln!(s, "post_suppression_db={}", result.best_value);
    let _ = writeln!(s, "improvement_db={}", pre_suppression - result.best_value);
    let _ = writeln!(s, "evaluations={}", result.evaluations);
    let _ = writeln!(s, "seed={}", exp.pso.seed);
    let _ = writeln!(s, "wall_time_s={}", result.wall_time_s);
    let _ = writeln!(s, "wall_time_min={}", result.wall_time_s / 60.0);
    let _ = writeln!(s, "efficiency_elements={}", report.elements);
    let _ = writeln!(s, "efficiency_individuals={}", report.individuals);
    let _ = writeln!(s, "efficiency_minutes={}", report.optimization_time_minutes);
    let _ = writeln!(s, "efficiency_value={}", report.efficiency);

    let g = &exp.geometry;
    let _ = writeln!(s, "config.geometry.rows={}", g.rows);
    let _ = writeln!(s, "config.geometry.cols={}", g.cols);
    let _ = writeln!(s, "config.geometry.spacing_mm={}", g.spacing_m * 1e3);
    let _ = writeln!(s, "config.geometry.frequency_ghz={}", g.frequency_hz / 1e9);
    let _ = writeln!(s, "config.geometry.amplitude={}", g.amplitude);
    let _ = writeln!(s, "config.geometry.resolution_bits={}", g.resolution_bits);
    for (i, b) in exp.beams.iter().enumerate() {
        let _ = writeln!(s, "config.beams.{i}.theta_deg={}", b.theta_deg);
        let _ = writeln!(s, "config.beams.{i}.phi_deg={}", b.phi_deg);
    }
    let grid = &exp.grid;
    let _ = writeln!(s, "config.grid.theta_start_deg={}", grid.theta_deg[0]);
    let _ = writeln!(
        s,
        "config.grid.theta_stop_deg={}",
        grid.theta_deg[grid.theta_deg.len() - 1]
    );
    let _ = writeln!(s, "config.grid.phi_start_deg={}", grid.phi_deg[0]);
    let _ = writeln!(
        s,
        "config.grid.phi_last_deg={}",
        grid.phi_deg[grid.phi_deg.len() - 1]
    );
    let _ = writeln!(s, "config.grid.step_deg={}", grid.step_deg);
    let _ = writeln!(s, "config.mask_radius_deg={}", exp.mask_radius_deg);
    let p = &exp.pso;
    let _ = writeln!(s, "config.pso.particles={}", p.particles);
    let _ = writeln!(s, "config.pso.iterations={}", p.iterations);
    let knowledge = match p.knowledge {
        Knowledge::Zero => "zero",
        Knowledge::Partial => "partial",
        Knowledge::Full => "full",
    };
    let _ = writeln!(s, "config.pso.knowledge={knowledge}");
    let _ = writeln!(s, "config.pso.seed={}", p.seed);
    let bound = match p.bound_mode {
        BoundMode::Clamp => "clamp",
        BoundMode::Wrap => "wrap",
    };
    let _ = writeln!(s, "config.pso.bound_mode={bound}");
    for (i, st) in p.schedule.stages().iter().enumerate() {
        let _ = writeln!(s, "config.pso.stages.{i}.d1={}", st.d1);
        let _ = writeln!(s, "config.pso.stages.{i}.d2={}", st.d2);
        let _ = writeln!(s, "config.pso.stages.{i}.c1={}", st.c1);
        let _ = writeln!(s, "config.pso.stages.{i}.c2={}", st.c2);
        let _ = writeln!(s, "config.pso.stages.{i}.w={}", st.w);
    }
    let ends: Vec<String> = p.schedule.ends().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(s, "config.pso.stage_ends={}", ends.join(","));
    let _ = writeln!(s, "config.output_dir={}", exp.output_dir.display());
    s
}

pub struct SweepReport {
    pub seeds: Vec<u64>,
    pub pre_suppression_db: f64,
    pub post_median_db: f64,
    pub post_iqr_db: f64,
    pub improvement_median_db: f64,
    pub improvement_iqr_db: f64,
    pub per_seed_post_db: Vec<f64>,
    pub output_dir: PathBuf,
}

/// Runs the experiment once per seed into `seed-<n>/` subdirectories and
/// reports median and interquartile range of the suppression.
pub fn run_sweep(
    config: &ExperimentConfig,
    seeds: &[u64],
    options: &RunOptions,
) -> Result<SweepReport, HarnessError> {
    if seeds.is_empty() {
        return Err(HarnessError::Config("sweep needs at least one seed".into()));
    }
    let base_dir = options
        .out
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    let mut pre = 0.0;
    let mut posts = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let run_options = RunOptions {
            seed: Some(seed),
            out: Some(base_dir.join(format!("seed-{seed}"))),
            emit_heatmap: options.emit_heatmap,
            quiet: true,
        };
        let report = run_experiment(config, &run_options)?;
        pre = report.pre_suppression_db;
        posts.push(report.post_suppression_db);
        if !options.quiet {
            println!(
                "seed {seed}: {:+.4} dB -> {:+.4} dB",
                report.pre_suppression_db, report.post_suppression_db
            );
        }
    }
    let improvements: Vec<f64> = posts.iter().map(|&p| pre - p).collect();
    let report = SweepReport {
        seeds: seeds.to_vec(),
        pre_suppression_db: pre,
        post_median_db: quantile(&posts, 0.5),
        post_iqr_db: quantile(&posts, 0.75) - quantile(&posts, 0.25),
        improvement_median_db: quantile(&improvements, 0.5),
        improvement_iqr_db: quantile(&improvements, 0.75) - quantile(&improvements, 0.25),
        per_seed_post_db: posts,
        output_dir: base_dir.clone(),
    };

    let mut s = String::new();
    let seed_list: Vec<String> = seeds.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(s, "seeds={}", seed_list.join(","));
    let _ = writeln!(s, "pre_suppression_db={}", report.pre_suppression_db);
    let _ = writeln!(s, "post_suppression_db.median={}", report.post_median_db);
    let _ = writeln!(s, "post_suppression_db.iqr={}", report.post_iqr_db);
    let _ = writeln!(s, "improvement_db.median={}", report.improvement_median_db);
    let _ = writeln!(s, "improvement_db.iqr={}", report.improvement_iqr_db);
    for (seed, post) in seeds.iter().zip(&report.per_seed_post_db) {
        let _ = writeln!(s, "per_seed.{seed}.post_suppression_db={post}");
    }
    fs::create_dir_all(&base_dir)
        .map_err(|e| HarnessError::Runtime(format!("creating {}: {e}", base_dir.display())))?;
    write_text(&base_dir.join("sweep_summary.txt"), &s)?;

    if !options.quiet {
        println!(
            "median post suppression {:+.4} dB (IQR {:.4}), median improvement {:+.4} dB",
            report.post_median_db, report.post_iqr_db, report.improvement_median_db
        );
    }
    Ok(report)
}

/// Linear-interpolation quantile of unsorted data (the common "type 7").
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// Re-evaluates a saved profile under a configuration's geometry and grid.
pub fn evaluate_profile(
    config: &ExperimentConfig,
    profile_text: &str,
    options: &RunOptions,
) -> Result<(f64, PathBuf), HarnessError> {
    let exp = resolve(config, options)?;
    let profile = crate::artifacts::parse_profile_csv(profile_text, exp.geometry.resolution_bits)?;
    let evaluator = PatternEvaluator::new(&exp.geometry, &exp.grid);
    let pattern = evaluator.pattern(&profile).map_err(HarnessError::config)?;
    let suppression = evaluator
        .suppression(&profile, &exp.masks)
        .map_err(HarnessError::config)?;
    fs::create_dir_all(&exp.output_dir).map_err(|e| {
        HarnessError::Runtime(format!("creating {}: {e}", exp.output_dir.display()))
    })?;
    write_text(&exp.output_dir.join("pattern.csv"), &pattern_csv(&pattern))?;
    if options.emit_heatmap {
        write_heatmap(&exp.output_dir.join("pattern.png"), &pattern)?;
    }
    if !options.quiet {
        println!("suppression: {suppression:+.4} dB");
        println!("artifacts: {}", exp.output_dir.display());
    }
    Ok((suppression, exp.output_dir))
}
