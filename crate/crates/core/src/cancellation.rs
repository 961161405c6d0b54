//! Decompositions `f = s_m o h_m o g_m o ... o s_1 o h_1 o g_1` with
//! linear-fractional `h_i`, and the bound `|P(f) - S_m| <= D~ + 2 Delta`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::map::{MapDescriptor, CHAIN_TOLERANCE};

/// Slack allowed for grid sup estimates in the bound checks.
pub const GAP_TOLERANCE: f64 = 1e-6;

/// One stage: first `g`, then the linear-fractional `h`, then `sigma`.
#[derive(Clone, Debug)]
pub struct CancellationStage {
    pub sigma: MapDescriptor,
    pub h: MapDescriptor,
    pub g: MapDescriptor,
}

#[derive(Clone, Debug)]
pub struct CancellationDecomposition {
    stages: Vec<CancellationStage>,
    deltas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CancellationReport {
    pub d_tilde: f64,
    pub delta: f64,
    /// `sup |P(f) - S_m|` on the guarded grid.
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
    /// Gap of the composition with every `g` removed.
    pub gap_reduced: f64,
    pub reduced_pass: bool,
    /// `sup |P(f) - P(s_m) ... P(s_1)|` with `s_i = sigma_i o h_i`.
    pub reduction_residual: f64,
    pub reduction_pass: bool,
    pub grid: GridSpec,
}

impl CancellationDecomposition {
    /// Validates chaining and that every `h` is linear-fractional.
    pub fn new(stages: Vec<CancellationStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("a decomposition needs at least one stage"));
        }
        let mut deltas = Vec::with_capacity(stages.len());
        let mut prev = None;
        for (i, s) in stages.iter().enumerate() {
            let delta = s
                .h
                .lf_shift()
                .ok_or(Error::InvalidParameter("h stages must be linear-fractional"))?;
            if let Some(p) = prev {
                if !s.g.domain().matches(&p, CHAIN_TOLERANCE) {
                    return Err(Error::DomainMismatch { stage: 3 * i });
                }
            }
            if !s.g.image().matches(&s.h.domain(), CHAIN_TOLERANCE) {
                return Err(Error::DomainMismatch { stage: 3 * i + 1 });
            }
            if !s.h.image().matches(&s.sigma.domain(), CHAIN_TOLERANCE) {
                return Err(Error::DomainMismatch { stage: 3 * i + 2 });
            }
            deltas.push(delta);
            prev = Some(s.sigma.image());
        }
        Ok(Self { stages, deltas })
    }

    pub fn stages(&self) -> &[CancellationStage] {
        &self.stages
    }

    /// `delta_i`, the translation of each `P(h_i)`.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn m(&self) -> usize {
        self.stages.len()
    }

    /// The full map as one descriptor.
    pub fn descriptor(&self) -> MapDescriptor {
        let maps: Vec<MapDescriptor> = self
            .stages
            .iter()
            .flat_map(|s| [s.g.clone(), s.h.clone(), s.sigma.clone()])
            .collect();
        MapDescriptor::compose(maps).unwrap_or_else(|_| unreachable!("chaining was validated"))
    }

    /// The map with every `g` removed; each `h` keeps its normalized form.
    pub fn reduced_descriptor(&self) -> Result<MapDescriptor> {
        let mut maps = Vec::with_capacity(2 * self.stages.len());
        for s in &self.stages {
            maps.push(s.h.with_intervals(s.g.domain(), s.h.image())?);
            maps.push(s.sigma.clone());
        }
        MapDescriptor::compose(maps)
    }

    /// Largest deviation of `P(h_i) - id` from `delta_i` on the grid.
    pub fn translation_defect(&self, grid: &GridSpec) -> f64 {
        self.stages
            .iter()
            .zip(&self.deltas)
            .map(|(s, d)| grid.sup_abs(|y| s.h.displacement(y) - d).value)
            .fold(0.0, f64::max)
    }
}

/// `D~ = sum of D(g_i)`.
pub fn d_tilde(d: &CancellationDecomposition, grid: &GridSpec) -> f64 {
    d.stages.iter().map(|s| s.g.distortion_norm(grid).value).sum()
}

/// `max_j |delta_1 + ... + delta_j|`.
pub fn delta_max_of(deltas: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut best: f64 = 0.0;
    for d in deltas {
        sum += d;
        best = best.max(sum.abs());
    }
    best
}

pub fn delta_max(d: &CancellationDecomposition) -> f64 {
    delta_max_of(&d.deltas)
}

/// `S_m(y) = P(sigma_m) ... P(sigma_1)(y)`.
pub fn sigma_composition(d: &CancellationDecomposition, y: f64) -> f64 {
    d.stages.iter().fold(y, |z, s| s.sigma.poincare_model(z))
}

/// Measures the gap and checks both the full and the reduced bound.
pub fn cancellation_verify(d: &CancellationDecomposition, grid: &GridSpec) -> Result<CancellationReport> {
    let dt = d_tilde(d, grid);
    let delta = delta_max(d);
    let f = d.descriptor();
    let gap = grid.sup_abs(|y| f.poincare_model(y) - sigma_composition(d, y)).value;
    let reduced = d.reduced_descriptor()?;
    let gap_reduced = grid
        .sup_abs(|y| reduced.poincare_model(y) - sigma_composition(d, y))
        .value;
    let staged_s = |y: f64| {
        d.stages
            .iter()
            .fold(y, |z, s| s.sigma.poincare_model(s.h.poincare_model(z)))
    };
    let residual = grid.sup_abs(|y| f.poincare_model(y) - staged_s(y)).value;
    let bound = dt + 2.0 * delta;
    Ok(CancellationReport {
        d_tilde: dt,
        delta,
        gap,
        bound,
        pass: gap <= bound + GAP_TOLERANCE,
        gap_reduced,
        reduced_pass: gap_reduced <= 2.0 * delta + GAP_TOLERANCE,
        reduction_residual: residual,
        reduction_pass: residual <= dt + GAP_TOLERANCE,
        grid: *grid,
    })
}
