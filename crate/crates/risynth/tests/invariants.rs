//! Property and statistical tests for the contracts the library promises:
//! quantization error bounds, mask partitioning, superposition symmetry,
//! objective range, swarm bounds, and the randomized pieces of the
//! optimizer (discard masks, position initialization).

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use risynth::{
    build_masks, init_swarm, level_to_phase, multi_beam_profile, sample_discard_mask, step,
    AngularGrid, ArrayGeometry, BeamSpec, BoundMode, Knowledge, PatternEvaluator, PsoConfig,
    StageParams, DB_FLOOR,
};
use std::f64::consts::TAU;

fn geometry(rows: usize, cols: usize, bits: u32) -> ArrayGeometry {
    ArrayGeometry::new(rows, cols, 0.021, 3.5e9, 0.7, bits).unwrap()
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    d.min(TAU - d)
}

proptest! {
    /// Snapping to the nearest level can never be off by more than half the
    /// bin width pi / 2^(K-1) / 2 = pi / 2^K.
    #[test]
    fn quantization_error_is_at_most_half_a_bin(
        phase in -20.0f64..20.0,
        bits in 1u32..=8,
    ) {
        let level = risynth::phase_to_level(phase, bits).unwrap();
        let snapped = level_to_phase(level, bits).unwrap();
        let half_bin = std::f64::consts::PI / f64::from(1u32 << bits);
        prop_assert!(circular_distance(phase.rem_euclid(TAU), snapped) <= half_bin + 1e-12);
    }

    /// Beam order cannot matter: the superposed profile is built from a sum.
    #[test]
    fn superposed_profile_ignores_beam_order(
        angles in prop::collection::vec((-80.0f64..80.0, 0.0f64..359.0), 1..4),
        rotate_by in 0usize..4,
    ) {
        let g = geometry(5, 5, 2);
        let beams: Vec<BeamSpec> = angles
            .iter()
            .map(|&(t, p)| BeamSpec::new(t, p).unwrap())
            .collect();
        let mut rotated = beams.clone();
        rotated.rotate_left(rotate_by % beams.len());
        let a = multi_beam_profile(&g, &beams).unwrap();
        let b = multi_beam_profile(&g, &rotated).unwrap();
        prop_assert_eq!(a.levels(), b.levels());
    }

    /// Beam disks and the sidelobe region together cover each grid point
    /// exactly once, with overlapping disks deduplicated.
    #[test]
    fn mask_regions_partition_the_grid(
        step_deg in prop::sample::select(vec![2.0f64, 3.0, 5.0, 6.0]),
        beam_picks in prop::collection::vec((0usize..20, 0usize..15), 1..3),
    ) {
        let grid = AngularGrid::uniform(-60.0, 60.0, 0.0, 120.0, step_deg).unwrap();
        let beams: Vec<BeamSpec> = beam_picks
            .iter()
            .map(|&(i, j)| {
                let ti = i.min(grid.theta_deg.len() - 1);
                let pj = j.min(grid.phi_deg.len() - 1);
                BeamSpec::new(grid.theta_deg[ti], grid.phi_deg[pj]).unwrap()
            })
            .collect();
        let masks = build_masks(&grid, &beams, 10.0).unwrap();
        let mut seen = vec![0u32; grid.num_points()];
        for region in masks.beam_regions() {
            for &p in region {
                seen[p as usize] += 1;
            }
        }
        for &p in masks.sidelobe_region() {
            seen[p as usize] += 1;
        }
        // A point inside two disks appears in both beam regions but never
        // in the sidelobe region.
        for (p, &count) in seen.iter().enumerate() {
            prop_assert!(count >= 1, "point {p} uncovered");
            if masks.sidelobe_region().contains(&(p as u32)) {
                prop_assert_eq!(count, 1, "sidelobe point {} double-counted", p);
            }
        }
        let disk_points: std::collections::HashSet<u32> = masks
            .beam_regions()
            .iter()
            .flatten()
            .copied()
            .collect();
        prop_assert_eq!(
            disk_points.len() + masks.sidelobe_region().len(),
            grid.num_points()
        );
    }

    /// Both pattern maxima are positive, so the difference of two floored
    /// dB values stays inside [DB_FLOOR, -DB_FLOOR].
    #[test]
    fn objective_values_stay_in_the_floored_range(
        levels in prop::collection::vec(1u32..=4, 16),
        seed_beam in 0usize..4,
    ) {
        let g = geometry(4, 4, 2);
        let grid = AngularGrid::uniform(-90.0, 90.0, 0.0, 180.0, 10.0).unwrap();
        let beams = [BeamSpec::new(-30.0 + 20.0 * seed_beam as f64, 40.0).unwrap()];
        let masks = build_masks(&grid, &beams, 15.0).unwrap();
        let value = PatternEvaluator::new(&g, &grid)
            .suppression_levels(&levels, &masks)
            .unwrap();
        prop_assert!(value.is_finite());
        prop_assert!((DB_FLOOR..=-DB_FLOOR).contains(&value));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// After any number of steps under any valid stage, every position is a
    /// valid level and every velocity lies in [-1, 1].
    #[test]
    fn swarm_respects_position_and_velocity_bounds(
        seed in any::<u64>(),
        particles in 1usize..4,
        d1 in 0.0f64..=1.0,
        d2 in 0.0f64..=1.0,
        c1 in 0.0f64..2.0,
        c2 in 0.0f64..2.0,
        w in 0.0f64..1.0,
        wrap in any::<bool>(),
    ) {
        let g = geometry(3, 3, 2);
        let mut config = PsoConfig::new(particles, 3, Knowledge::Zero, seed).unwrap();
        config.bound_mode = if wrap { BoundMode::Wrap } else { BoundMode::Clamp };
        let objective = |levels: &[u32]| Ok(levels.iter().map(|&l| f64::from(l)).sum());
        let mut state = init_swarm(&config, &g, None, objective).unwrap();
        let params = StageParams { d1, d2, c1, c2, w };
        let mut previous_best = state.best_value();
        for _ in 0..3 {
            step(&mut state, &params, objective).unwrap();
            prop_assert!(state.best_value() <= previous_best);
            previous_best = state.best_value();
            for p in 0..state.num_particles() {
                for &x in state.position(p) {
                    prop_assert!((1..=4).contains(&x));
                }
                for &v in state.velocity(p) {
                    prop_assert!((-1.0..=1.0).contains(&v));
                }
            }
        }
    }

    /// Discarding every cognitive and social pull with zero inertia leaves
    /// nothing to move the swarm: positions and bests are a fixed point.
    #[test]
    fn full_discard_zero_inertia_freezes_the_swarm(seed in any::<u64>()) {
        let g = geometry(3, 2, 2);
        let config = PsoConfig::new(3, 2, Knowledge::Zero, seed).unwrap();
        let objective = |levels: &[u32]| Ok(levels.iter().map(|&l| f64::from(l)).sum());
        let mut state = init_swarm(&config, &g, None, objective).unwrap();
        let before: Vec<Vec<u32>> = (0..3).map(|p| state.position(p).to_vec()).collect();
        let best_before = state.best_value();
        let frozen = StageParams { d1: 1.0, d2: 1.0, c1: 1.0, c2: 1.0, w: 0.0 };
        for _ in 0..2 {
            step(&mut state, &frozen, objective).unwrap();
        }
        for (p, original) in before.iter().enumerate() {
            prop_assert_eq!(state.position(p), original.as_slice());
        }
        prop_assert_eq!(state.best_value(), best_before);
    }
}

/// The discard mask is Bernoulli: the observed zero fraction over 200k
/// draws must sit within three binomial standard deviations of the rate.
#[test]
fn discard_mask_zero_fraction_tracks_the_rate() {
    let n = 200_000u32;
    for (i, rate) in [0.2f64, 0.5, 0.8].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD15C + i as u64);
        let zeros = (0..n)
            .filter(|_| sample_discard_mask(&mut rng, rate) == 0.0)
            .count() as f64;
        let sigma = (f64::from(n) * rate * (1.0 - rate)).sqrt();
        let deviation = (zeros - f64::from(n) * rate).abs();
        assert!(
            deviation <= 3.0 * sigma,
            "rate {rate}: {zeros} zeros, {deviation:.1} > 3 sigma ({:.1})",
            3.0 * sigma
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert_eq!(sample_discard_mask(&mut rng, 0.0), 1.0);
    assert_eq!(sample_discard_mask(&mut rng, 1.0), 0.0);
}

/// Zero-knowledge initialization draws levels uniformly. With a million
/// entries a chi-square over 4 levels (3 degrees of freedom) stays under
/// the 0.001 critical value.
#[test]
fn zero_knowledge_initial_positions_are_uniform_over_levels() {
    let g = geometry(100, 100, 2);
    let config = PsoConfig::new(100, 1, Knowledge::Zero, 424242).unwrap();
    let objective = |_: &[u32]| Ok(0.0);
    let state = init_swarm(&config, &g, None, objective).unwrap();
    let mut counts = [0u64; 4];
    for p in 0..state.num_particles() {
        for &x in state.position(p) {
            counts[(x - 1) as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    assert_eq!(total, 1_000_000);
    let expected = total as f64 / 4.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    assert!(chi2 < 16.27, "chi-square {chi2:.2}, counts {counts:?}");
}

/// A phase exactly between two levels must snap to the smaller one. With
/// 2 bits the levels sit at pi/4, 3pi/4, 5pi/4, 7pi/4, so pi/2 is
/// equidistant from levels 1 and 2.
#[test]
fn quantization_ties_resolve_to_the_smaller_level() {
    let level = risynth::phase_to_level(std::f64::consts::FRAC_PI_2, 2).unwrap();
    assert_eq!(level, 1);
}
