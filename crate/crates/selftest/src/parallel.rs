//! Rayon drivers over grids and seeds.
//!
//! Each grid point (or seed) is solved independently and results are
//! collected in index order, so output does not depend on the thread count.

use rayon::prelude::*;

use selftest_core::bell::GeneralBellExpression;
use selftest_core::moment::MomentMatrixStructure;
use selftest_core::sdp::SdpSettings;
use selftest_core::seesaw::{best_run, seesaw_run, SeesawConfig, SeesawRun};
use selftest_core::swap::{BellConstraintMode, FidelityCurve, FidelityPoint, FidelityProblem, SwapTarget};
use selftest_core::synth::{synthesize, ScanPoint, SynthesisOptions};
use selftest_core::Result;

pub fn scan(grid: &[f64], opts: SynthesisOptions) -> Result<Vec<ScanPoint>> {
    grid.par_iter().map(|&phi| synthesize(phi, opts).map(|r| ScanPoint::from(&r))).collect()
}

pub fn seesaw(g: &GeneralBellExpression, cfg: &SeesawConfig) -> Result<SeesawRun> {
    cfg.validate()?;
    let runs = (0..cfg.num_seeds).into_par_iter().map(|i| seesaw_run(g, cfg, i)).collect::<Result<Vec<_>>>()?;
    Ok(best_run(runs).expect("at least one seed"))
}

/// Cold-started points: the constraint analysis is shared, iterates are not.
pub fn curve(
    target: &SwapTarget,
    grid: &[f64],
    structure: &MomentMatrixStructure,
    mode: BellConstraintMode,
    settings: &SdpSettings,
) -> Result<FidelityCurve> {
    let problem = FidelityProblem::new(target, structure, mode)?;
    let rows = grid
        .par_iter()
        .map(|&q| problem.clone().solve(q, settings, None).map(|(p, _)| p))
        .collect::<Result<Vec<FidelityPoint>>>()?;
    Ok(FidelityCurve::new(target, structure, mode, rows))
}
