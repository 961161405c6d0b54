//! Frozen seeded suites shared by the experiment driver and the acceptance
//! tests.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cancellation::CancellationDecomposition;
use crate::composition::{normalize_split, StandardComposition};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::interval::Interval;
use crate::random::{random_decomposition, random_standard_composition};

/// Longest composition in the UBDL suite.
pub const UBDL_MAX_STAGES: usize = 20;

/// Split cap used to normalize suite compositions.
pub const NORMALIZE_CAP: f64 = core::f64::consts::LN_2;

#[derive(Clone, Debug)]
pub struct UbdlCase {
    pub composition: StandardComposition,
    pub sub: Interval,
}

/// Normalized compositions of `1..=20` stages with a random inner interval.
pub fn ubdl_suite(seed: u64, count: usize, grid: &GridSpec) -> Result<Vec<UbdlCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=UBDL_MAX_STAGES);
            let scale = rng.gen_range(0.02..0.5);
            let raw = random_standard_composition(&mut rng, m, scale)?;
            let composition = normalize_split(&raw, NORMALIZE_CAP, grid)?;
            let outer = composition.domain();
            let b = outer.denormalize(rng.gen_range(0.02..0.6));
            let c = b + (outer.hi() - b) * rng.gen_range(0.05..0.95);
            Ok(UbdlCase {
                composition,
                sub: Interval::new(b, c)?,
            })
        })
        .collect()
}

/// Random decompositions with `1..=12` stages, mixed-sign displacements and
/// nontrivial `g`s on odd cases.
pub fn cancellation_suite(seed: u64, count: usize) -> Result<Vec<CancellationDecomposition>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let m = rng.gen_range(1..=12);
            let deltas: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let g_scale = if k % 2 == 1 { rng.gen_range(0.01..0.3) } else { 0.0 };
            random_decomposition(&mut rng, &deltas, g_scale)
        })
        .collect()
}

/// `m` stages with displacements `+delta, -delta, ...` and identity `g`s.
pub fn alternating_decomposition(seed: u64, m: usize, delta: f64) -> Result<CancellationDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deltas: Vec<f64> = (0..m).map(|i| if i % 2 == 0 { delta } else { -delta }).collect();
    random_decomposition(&mut rng, &deltas, 0.0)
}
