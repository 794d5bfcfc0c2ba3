//! Refinement studies: rerun an experiment with dx and dt halved per level
//! and report observed convergence orders for the final-time field and for
//! the energy-identity residual.

use crate::diagnostics::diagnose_run;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::harness::{energy_residual_per_time, ExperimentSpec};
use crate::solver::{run, stable_dt, SolverConfig};

/// Per-level measurements plus the observed orders extracted from them.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub n_points: Vec<usize>,
    pub dt: Vec<f64>,
    /// ‖φ_{ℓ+1} − φ_ℓ‖_{L²} at the final time, fine level restricted to the
    /// coarse nodes; length = levels.
    pub final_diffs: Vec<f64>,
    /// Per-unit-time energy residual at each level; length = levels + 1.
    pub energy_residuals: Vec<f64>,
    pub observed_order_phi: Option<f64>,
    pub observed_order_residual: Option<f64>,
}

impl ConvergenceTable {
    /// Strict decrease of both difference and residual series.
    pub fn monotone(&self) -> bool {
        self.final_diffs.windows(2).all(|w| w[1] < w[0])
            && self.energy_residuals.windows(2).all(|w| w[1] < w[0])
    }

    pub fn render(&self) -> String {
        let mut out = String::from("level,n_points,dt,final_diff,energy_residual_per_time\n");
        for i in 0..self.n_points.len() {
            let diff = if i < self.final_diffs.len() {
                self.final_diffs[i].to_string()
            } else {
                String::from("-")
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i, self.n_points[i], self.dt[i], diff, self.energy_residuals[i]
            ));
        }
        out.push_str(&format!(
            "# observed_order_phi={}\n# observed_order_residual={}\n",
            self.observed_order_phi
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into()),
            self.observed_order_residual
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into()),
        ));
        out
    }
}

/// Run `levels + 1` simulations, halving dx and dt each level while keeping
/// the snapshot cadence (so the snapshot gap halves too), with the initial
/// field regenerated per grid by `initial`.
pub fn refinement_study_with(
    base: &SolverConfig,
    levels: usize,
    initial: impl Fn(&Grid1D) -> Vec<f64>,
) -> Result<ConvergenceTable> {
    if levels < 2 {
        return Err(Error::contract(format!(
            "refinement study needs levels >= 2, got {levels}"
        )));
    }
    let mut configs = Vec::with_capacity(levels + 1);
    let mut config = base.clone();
    for _ in 0..=levels {
        configs.push(config.clone());
        config.grid = config.grid.refined();
        config.dt *= 0.5;
    }
    // Halving dx can move a level from the convection-limited regime into
    // the stiffness-limited one, where dt must shrink faster than 2x per
    // level. Pull the whole dt chain down so every level respects its own
    // stability bound.
    let base_dt = configs
        .iter()
        .enumerate()
        .map(|(level, cfg)| stable_dt(cfg) * (1 << level) as f64)
        .fold(base.dt, f64::min);
    for (level, cfg) in configs.iter_mut().enumerate() {
        cfg.dt = base_dt / (1 << level) as f64;
    }

    let mut finals: Vec<Vec<f64>> = Vec::with_capacity(levels + 1);
    let mut residuals = Vec::with_capacity(levels + 1);
    for cfg in &configs {
        let phi0 = initial(&cfg.grid);
        let record = run(cfg, phi0, Vec::new())?;
        let state = record
            .final_state
            .as_ref()
            .ok_or_else(|| Error::invariant("refinement level blew up"))?;
        finals.push(state.phi.clone());
        let reports = diagnose_run(cfg, &record.snapshots)?;
        residuals.push(energy_residual_per_time(&reports));
    }

    let mut final_diffs = Vec::with_capacity(levels);
    for level in 0..levels {
        let coarse_grid = &configs[level].grid;
        let coarse = &finals[level];
        let fine = &finals[level + 1];
        let diff: Vec<f64> = (0..coarse.len())
            .map(|i| fine[2 * i] - coarse[i])
            .collect();
        final_diffs.push(coarse_grid.l2_norm(&diff));
    }

    let observed_order_phi = order_from_pair(&final_diffs);
    let observed_order_residual = order_from_pair(&residuals);

    Ok(ConvergenceTable {
        n_points: configs.iter().map(|c| c.grid.len()).collect(),
        dt: configs.iter().map(|c| c.dt).collect(),
        final_diffs,
        energy_residuals: residuals,
        observed_order_phi,
        observed_order_residual,
    })
}

/// Observed order from the last pair of a decreasing series.
fn order_from_pair(series: &[f64]) -> Option<f64> {
    let n = series.len();
    if n < 2 || series[n - 1] <= 0.0 || series[n - 2] <= 0.0 {
        return None;
    }
    Some((series[n - 2] / series[n - 1]).log2())
}

/// Refinement study for a configured experiment, using its initial profile.
pub fn refinement_study(spec: &ExperimentSpec, levels: usize) -> Result<ConvergenceTable> {
    let profile = spec.clone();
    refinement_study_with(&spec.config, levels, move |grid| {
        let mut level_spec = profile.clone();
        level_spec.config.grid = grid.clone();
        level_spec
            .initial_phi()
            .expect("initial profile valid on refined grid")
    })
}
