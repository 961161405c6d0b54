//! The four experiment commands.

use std::sync::Arc;

use rayon::prelude::*;

use poincare::cancellation::{cancellation_verify, delta_max, CancellationDecomposition, CancellationStage};
use poincare::circle::{
    dynamical_partition, find_parameter, golden_prefix, rotation_number, symmetric_neighborhood, Arnold, CircleLift,
    ContinuedFraction, Rigid,
};
use poincare::composition::{composition_norms, required_q, ubdl_verify, Stage, StandardComposition};
use poincare::error::Error;
use poincare::experiments::{assemble_report, pure_singularity_row, DecayFit};
use poincare::interval::Interval;
use poincare::map::MapDescriptor;
use poincare::suites::{alternating_decomposition, cancellation_suite, ubdl_suite, UbdlCase};

use crate::config::{ConfigError, Family, RunConfig, Suite, DEPTH_CAP};
use crate::output::{Cell, Provenance, Table};

/// Golden mean rotation number.
pub const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Parameter bracket for tuning the Arnold map to the golden mean.
pub const ARNOLD_BRACKET: (f64, f64) = (0.55, 0.65);

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("refused: {0}")]
    Refused(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] Error),
}

impl CommandError {
    /// 2 for configuration errors, 3 for accuracy refusals.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Numeric(Error::KappaNotAboveLambda) => 2,
            CommandError::Refused(_) | CommandError::Numeric(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Ubdl,
    Cancel,
    Puresing,
    Partition,
}

#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    /// False when a bound or decay check failed.
    pub pass: bool,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, CommandError> {
    let outcome = match command {
        Command::Ubdl => cmd_ubdl(config)?,
        Command::Cancel => cmd_cancel(config)?,
        Command::Puresing => cmd_puresing(config)?,
        Command::Partition => cmd_partition(config)?,
    };
    let p = Provenance {
        grid: config.grid_points,
        eps_guard: config.eps_guard,
        seed: config.seed,
    };
    Ok(Outcome {
        table: outcome.table.with_provenance(&p),
        pass: outcome.pass,
    })
}

fn identity_composition(m: usize) -> Result<StandardComposition, Error> {
    let u = Interval::unit();
    StandardComposition::new(
        (0..m.max(1))
            .map(|_| Stage {
                h: MapDescriptor::identity(u),
                sigma: MapDescriptor::identity(u),
            })
            .collect(),
    )
}

fn identity_decomposition(m: usize) -> Result<CancellationDecomposition, Error> {
    let u = Interval::unit();
    let stages = (0..m.max(1))
        .map(|_| {
            Ok(CancellationStage {
                sigma: MapDescriptor::identity(u),
                h: MapDescriptor::linear_fractional(u, u, 0.0)?,
                g: MapDescriptor::identity(u),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    CancellationDecomposition::new(stages)
}

pub fn cmd_ubdl(c: &RunConfig) -> Result<Outcome, CommandError> {
    let grid = c.grid();
    let cases = match c.suite {
        Suite::Random => ubdl_suite(c.seed, c.count, &grid)?,
        Suite::Identity => (0..c.count)
            .map(|k| {
                let b = 0.05 + 0.4 * (k as f64 + 0.5) / c.count as f64;
                Ok(UbdlCase {
                    composition: identity_composition(c.stages)?,
                    sub: Interval::new(b, b + 0.5)?,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?,
        Suite::Alternating => return Err(ConfigError::Invalid("the ubdl command has no alternating suite".into()).into()),
    };
    let reports = cases
        .par_iter()
        .enumerate()
        .map(|(k, case)| {
            let norms = composition_norms(&case.composition, c.d1_samples, c.seed.wrapping_add(k as u64), &grid);
            ubdl_verify(&case.composition, &case.sub, c.q, &norms, &grid)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "case",
        "m",
        "b",
        "c",
        "d1",
        "d2",
        "log_cr",
        "measured",
        "bound_technical",
        "bound_simplified",
        "q",
        "required_q",
        "pass",
    ]);
    for (k, (case, r)) in cases.iter().zip(&reports).enumerate() {
        t.push(vec![
            k.into(),
            case.composition.m().into(),
            case.sub.lo().into(),
            case.sub.hi().into(),
            r.d1.into(),
            r.d2.into(),
            r.cross_ratio_term.into(),
            r.measured.into(),
            r.bound_technical.into(),
            r.bound_simplified.into(),
            r.q_used.into(),
            required_q(r, &case.composition.domain(), &case.sub).into(),
            r.pass.into(),
        ]);
    }
    Ok(Outcome {
        pass: reports.iter().all(|r| r.pass),
        table: t,
    })
}

pub fn cmd_cancel(c: &RunConfig) -> Result<Outcome, CommandError> {
    let grid = c.grid();
    let cases = match c.suite {
        Suite::Random => cancellation_suite(c.seed, c.count)?,
        Suite::Identity => (0..c.count)
            .map(|_| identity_decomposition(c.stages))
            .collect::<Result<Vec<_>, Error>>()?,
        Suite::Alternating => (0..c.count)
            .map(|k| alternating_decomposition(c.seed.wrapping_add(k as u64), c.stages, c.delta))
            .collect::<Result<Vec<_>, Error>>()?,
    };
    let reports = cases
        .par_iter()
        .map(|d| cancellation_verify(d, &grid))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "case",
        "m",
        "d_tilde",
        "delta",
        "sum_abs_delta",
        "gap",
        "bound",
        "pass",
        "gap_reduced",
        "reduction_residual",
    ]);
    for (k, (d, r)) in cases.iter().zip(&reports).enumerate() {
        t.push(vec![
            k.into(),
            d.m().into(),
            r.d_tilde.into(),
            delta_max(d).into(),
            d.deltas().iter().map(|x| x.abs()).sum::<f64>().into(),
            r.gap.into(),
            r.bound.into(),
            r.pass.into(),
            r.gap_reduced.into(),
            r.reduction_residual.into(),
        ]);
    }
    Ok(Outcome {
        pass: reports.iter().all(|r| r.pass && r.reduced_pass && r.reduction_pass),
        table: t,
    })
}

/// The configured circle map with its continued fraction.
pub fn circle_map(c: &RunConfig) -> Result<(Arc<dyn CircleLift>, ContinuedFraction), CommandError> {
    let f: Arc<dyn CircleLift> = match (c.family, c.omega) {
        (Family::Rigid, w) => Arc::new(Rigid {
            omega: w.unwrap_or(GOLDEN),
        }),
        (Family::Arnold, Some(w)) => Arc::new(Arnold { omega: w }),
        (Family::Arnold, None) => {
            let (lo, hi) = ARNOLD_BRACKET;
            let w = find_parameter(|w| Arnold { omega: w }, lo, hi, 0, &golden_prefix(c.depth))?;
            Arc::new(Arnold { omega: w })
        }
    };
    let cf = rotation_number(f.as_ref(), c.depth)?.cf;
    Ok((f, cf))
}

fn refuse_depth(c: &RunConfig, order: usize) -> Result<(), CommandError> {
    if order > DEPTH_CAP && !c.acknowledge_depth {
        return Err(CommandError::Refused(format!(
            "partition order {order} exceeds {DEPTH_CAP}; set acknowledge_depth=true"
        )));
    }
    Ok(())
}

fn fit_cells(fit: &Option<DecayFit>) -> [Cell; 3] {
    match fit {
        Some(f) => [f.k1.into(), f.k2.into(), f.residual.into()],
        None => [f64::NAN.into(), f64::NAN.into(), f64::NAN.into()],
    }
}

pub fn cmd_puresing(c: &RunConfig) -> Result<Outcome, CommandError> {
    if c.kappa_min <= c.lambda {
        return Err(Error::KappaNotAboveLambda.into());
    }
    refuse_depth(c, c.kappa_max)?;
    let grid = c.grid();
    let (f, cf) = circle_map(c)?;
    let u = symmetric_neighborhood(f.as_ref(), &cf, c.lambda)?;
    let rows = (c.kappa_min..=c.kappa_max)
        .into_par_iter()
        .map(|k| pure_singularity_row(&f, &cf, &u, k, &grid))
        .collect::<Result<Vec<_>, Error>>()?;
    let report = assemble_report(u, rows)?;
    let mut t = Table::new(&[
        "kappa",
        "lambda",
        "j",
        "m",
        "kept",
        "delta",
        "d_tilde",
        "gap",
        "gap_inverse",
        "bound",
        "bound_pass",
        "E_chi",
        "v_j",
        "L1_density_dev",
        "n_total",
        "n_oscillation",
        "n_mean",
        "chain_coarseness",
        "fit_K1",
        "fit_K2",
        "residual",
    ]);
    let [k1, k2, res] = fit_cells(&report.gap_fit);
    for r in &report.rows {
        let (nt, no, nm) = r
            .n_split
            .map_or((f64::NAN, f64::NAN, f64::NAN), |s| (s.total, s.oscillation, s.mean_term));
        t.push(vec![
            r.kappa.into(),
            r.lambda.into(),
            r.j.into(),
            r.m.into(),
            r.kept.into(),
            r.delta.into(),
            r.d_tilde.into(),
            r.gap.into(),
            r.gap_inverse.into(),
            r.bound.into(),
            r.bound_pass.into(),
            r.e_chi.into(),
            r.v_j.into(),
            r.l1_density_dev.into(),
            nt.into(),
            no.into(),
            nm.into(),
            r.chain_coarseness.into(),
            k1.clone(),
            k2.clone(),
            res.clone(),
        ]);
    }
    Ok(Outcome {
        pass: report.passes(c.max_fit_residual),
        table: t,
    })
}

pub fn cmd_partition(c: &RunConfig) -> Result<Outcome, CommandError> {
    refuse_depth(c, c.k)?;
    let (f, cf) = circle_map(c)?;
    let d = dynamical_partition(f.as_ref(), &cf, c.k)?;
    let mut t = Table::new(&["k", "index", "kind", "orbit_index", "lo", "hi", "length"]);
    for (i, e) in d.sorted().iter().enumerate() {
        t.push(vec![
            c.k.into(),
            i.into(),
            e.kind.as_str().into(),
            e.orbit_index.into(),
            e.interval.lo().into(),
            e.interval.hi().into(),
            e.interval.length().into(),
        ]);
    }
    // footer: total length with the tiling defect in the length column
    t.push(vec![
        c.k.into(),
        d.elements.len().into(),
        "tiling_defect".into(),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
        d.tiling_defect.into(),
    ]);
    Ok(Outcome { pass: true, table: t })
}
