//! Pure singularity experiments on critical circle maps: approximate maps,
//! the cancellation decomposition of a chain, densities and decay fits.

pub mod approximate;
pub mod density;
pub mod fit;

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cancellation::{cancellation_verify, d_tilde, delta_max, GAP_TOLERANCE};
use crate::circle::chain::{build_chain, ChainOfIntervals};
use crate::circle::lift::CircleLift;
use crate::circle::neighborhood::{coarseness, symmetric_neighborhood, SymmetricNeighborhood};
use crate::circle::partition::{dynamical_partition, ElementKind};
use crate::circle::rotation::ContinuedFraction;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub use approximate::{
    approximate, chain_coarseness, delta_circle, h_prescription, inverse_decomposition, main_theorem_gap, ApproximateMap,
};
pub use density::{density_profile, nonlinearity_split, DensityProfile, NonlinearitySplit};
pub use fit::{strictly_decreasing, DecayFit, DecayModel};

/// Default residual allowed in decay fits, in units of `ln y`.
pub const DEFAULT_FIT_RESIDUAL: f64 = 0.5;

/// The chain of lengthy elements `1..q_kappa - 1` of `D_kappa`: the first
/// lengthy element not adjacent to `0` and its `q_kappa - 2` images.
pub fn standard_chain(f: &Arc<dyn CircleLift>, cf: &ContinuedFraction, kappa: usize) -> Result<ChainOfIntervals> {
    let d = dynamical_partition(f.as_ref(), cf, kappa)?;
    let q = cf.q[kappa] as usize;
    if q < 2 {
        return Err(Error::InvalidParameter("the partition order is too small for a chain"));
    }
    let seed = d
        .elements
        .iter()
        .find(|e| e.kind == ElementKind::Lengthy && e.orbit_index == 1)
        .map(|e| e.interval)
        .ok_or(Error::InvalidParameter("the partition order is too small for a chain"))?;
    build_chain(f, &seed, q - 2, true)
}

/// Density partition order used for a `(kappa, lambda)` cell.
pub fn default_density_order(kappa: usize, lambda: usize) -> usize {
    (lambda + kappa) / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureSingularityRow {
    pub kappa: usize,
    pub lambda: usize,
    pub j: usize,
    pub m: usize,
    /// Smallest fineness order measured on the chain intervals.
    pub chain_fineness: usize,
    pub kept: usize,
    pub delta: f64,
    pub d_tilde: f64,
    /// `sup |P(f^m) - P(phi)|`.
    pub gap: f64,
    /// `sup |P(f^{-m}) - S_m|`, the quantity the cancellation bound controls.
    pub gap_inverse: f64,
    pub bound: f64,
    /// Both gaps within `D~ + 2 Delta`.
    pub bound_pass: bool,
    pub chain_coarseness: f64,
    pub e_chi: f64,
    pub v_j: f64,
    pub l1_density_dev: f64,
    pub n_split: Option<NonlinearitySplit>,
}

/// One `(kappa, lambda)` cell of the pure singularity experiment.
pub fn pure_singularity_row(
    f: &Arc<dyn CircleLift>,
    cf: &ContinuedFraction,
    u: &SymmetricNeighborhood,
    kappa: usize,
    grid: &GridSpec,
) -> Result<PureSingularityRow> {
    let lambda = u.lambda;
    if kappa <= lambda {
        return Err(Error::KappaNotAboveLambda);
    }
    let chain = standard_chain(f, cf, kappa)?;
    let approx = approximate(f.as_ref(), &chain, &u.interval)?;
    let gap = main_theorem_gap(&approx, grid);
    let decomposition = inverse_decomposition(&approx)?;
    let report = cancellation_verify(&decomposition, grid)?;
    let j = default_density_order(kappa, lambda);
    let (e_chi, v_j, l1, n_split) = if lambda < j && j < kappa {
        let d = dynamical_partition(f.as_ref(), cf, j)?;
        let p = density_profile(&approx, &d)?;
        let split = nonlinearity_split(f.as_ref(), &approx, &p);
        (p.mean, p.v_j, p.l1_deviation, Some(split))
    } else {
        (f64::NAN, f64::NAN, f64::NAN, None)
    };
    Ok(PureSingularityRow {
        kappa,
        lambda,
        j,
        m: chain.m(),
        chain_fineness: chain.fineness(f.as_ref(), cf)?,
        kept: approx.kept_count(),
        delta: delta_max(&decomposition),
        d_tilde: d_tilde(&decomposition, grid),
        gap,
        gap_inverse: report.gap,
        bound: report.bound,
        bound_pass: gap.max(report.gap) <= report.bound + GAP_TOLERANCE,
        chain_coarseness: chain_coarseness(&approx),
        e_chi,
        v_j,
        l1_density_dev: l1,
        n_split,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureSingularityReport {
    pub rows: Vec<PureSingularityRow>,
    pub neighborhood: SymmetricNeighborhood,
    /// `None` when the column is identically zero.
    pub gap_fit: Option<DecayFit>,
    pub d_tilde_fit: Option<DecayFit>,
    pub delta_fit: Option<DecayFit>,
    pub gap_decreasing: bool,
    pub d_tilde_decreasing: bool,
    pub delta_decreasing: bool,
    pub bounds_hold: bool,
}

fn column_fit(xs: &[f64], ys: &[f64], model: DecayModel) -> Result<Option<DecayFit>> {
    if ys.iter().all(|&y| y.abs() <= GAP_TOLERANCE) {
        return Ok(None);
    }
    DecayFit::fit(xs, ys, model).map(Some)
}

/// Rows for every `kappa` with a shared neighborhood of fineness `lambda`.
pub fn pure_singularity_report(
    f: &Arc<dyn CircleLift>,
    cf: &ContinuedFraction,
    lambda: usize,
    kappas: &[usize],
    grid: &GridSpec,
) -> Result<PureSingularityReport> {
    let u = symmetric_neighborhood(f.as_ref(), cf, lambda)?;
    let rows = kappas
        .iter()
        .map(|&k| pure_singularity_row(f, cf, &u, k, grid))
        .collect::<Result<Vec<_>>>()?;
    assemble_report(u, rows)
}

/// Fits and monotonicity flags over precomputed rows.
pub fn assemble_report(u: SymmetricNeighborhood, rows: Vec<PureSingularityRow>) -> Result<PureSingularityReport> {
    let xs: Vec<f64> = rows.iter().map(|r| (r.kappa - r.lambda) as f64).collect();
    let col = |g: fn(&PureSingularityRow) -> f64| rows.iter().map(g).collect::<Vec<f64>>();
    let (gaps, dts, deltas) = (col(|r| r.gap), col(|r| r.d_tilde), col(|r| r.delta));
    let flat = |v: &[f64]| v.iter().all(|&y| y.abs() <= GAP_TOLERANCE);
    Ok(PureSingularityReport {
        gap_fit: column_fit(&xs, &gaps, DecayModel::ExponentialSqrt)?,
        d_tilde_fit: column_fit(&xs, &dts, DecayModel::Exponential)?,
        delta_fit: column_fit(&xs, &deltas, DecayModel::ExponentialSqrt)?,
        gap_decreasing: flat(&gaps) || strictly_decreasing(&gaps),
        d_tilde_decreasing: flat(&dts) || strictly_decreasing(&dts),
        delta_decreasing: flat(&deltas) || strictly_decreasing(&deltas),
        bounds_hold: rows.iter().all(|r| r.bound_pass),
        neighborhood: u,
        rows,
    })
}

impl PureSingularityReport {
    /// Decreasing columns, fits with `K2 < 1` and the bound on every row.
    pub fn passes(&self, max_residual: f64) -> bool {
        let fit_ok = |f: &Option<DecayFit>| f.as_ref().is_none_or(|f| f.passes(max_residual));
        self.gap_decreasing
            && self.d_tilde_decreasing
            && self.delta_decreasing
            && self.bounds_hold
            && fit_ok(&self.gap_fit)
            && fit_ok(&self.d_tilde_fit)
            && fit_ok(&self.delta_fit)
    }
}

/// `c_j(U)` for `j = lambda + offset`.
pub fn coarseness_profile(
    f: &dyn CircleLift,
    cf: &ContinuedFraction,
    u: &SymmetricNeighborhood,
    offsets: &[usize],
) -> Result<Vec<(usize, f64)>> {
    offsets
        .iter()
        .map(|&o| {
            let j = u.lambda + o;
            let d = dynamical_partition(f, cf, j)?;
            Ok((j, coarseness(&d, &[u.interval])))
        })
        .collect()
}

/// L1 density deviation of one chain against `D_j` for each admissible `j`.
pub fn density_decay(
    f: &Arc<dyn CircleLift>,
    cf: &ContinuedFraction,
    u: &SymmetricNeighborhood,
    kappa: usize,
) -> Result<Vec<(usize, DensityProfile)>> {
    let chain = standard_chain(f, cf, kappa)?;
    let approx = approximate(f.as_ref(), &chain, &u.interval)?;
    (u.lambda + 1..kappa)
        .map(|j| {
            let d = dynamical_partition(f.as_ref(), cf, j)?;
            Ok((j, density_profile(&approx, &d)?))
        })
        .collect()
}
