//! Optimizes the reference two-beam scenario and prints a short report.
//!
//! Usage: `cargo run --release --example two_beam [iterations] [seed]`

use risynth::{
    build_masks, multi_beam_profile, run, AngularGrid, ArrayGeometry, BeamSpec, Knowledge,
    PatternEvaluator, PsoConfig,
};

fn main() -> risynth::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(100, |a| a.parse().expect("iterations"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let geometry = ArrayGeometry::new(30, 30, 0.021, 3.5e9, 0.7, 2)?;
    let beams = [BeamSpec::new(45.0, 30.0)?, BeamSpec::new(45.0, 110.0)?];
    let grid = AngularGrid::default();
    let masks = build_masks(&grid, &beams, 10.0)?;

    let evaluator = PatternEvaluator::new(&geometry, &grid);
    let baseline = evaluator.suppression(&multi_beam_profile(&geometry, &beams)?, &masks)?;
    println!("superposition suppression: {baseline:+.4} dB");

    let config = PsoConfig::new(100, iterations, Knowledge::Full, seed)?;
    let result = run(&config, &geometry, &beams, &grid, &masks)?;
    println!(
        "optimized suppression:     {:+.4} dB after {} evaluations in {:.1} s",
        result.best_value, result.evaluations, result.wall_time_s
    );
    Ok(())
}
