//! Method-of-lines integration of the deviation equation.
//!
//! The unknown is the deviation φ = u − U_r, which vanishes in both far
//! fields; the domain is truncated to [-L, L] and every stencil treats
//! values beyond the boundary as zero. Each evaluation of φ_t inverts the
//! operator I − α∂x² (tridiagonal, strictly diagonally dominant), which
//! caps the fourth-order stiffness at second-order severity and keeps
//! classical explicit RK4 stable at convection-scale time steps.

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::grid::Grid1D;
use crate::waves::{ApproxRarefaction, PdeCoeffs, WaveJet};

/// Safety factor applied to the explicit stability bound.
pub const DT_SAFETY: f64 = 0.5;

/// Fraction of max|φ| above which boundary values count as leakage.
pub const LEAK_RELATIVE_THRESHOLD: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Difference operators
// ---------------------------------------------------------------------------

/// Second-order central difference of the given order (1..4) with zero
/// ghost values outside the domain (far-field φ = 0 convention).
pub fn central_derivative(grid: &Grid1D, field: &[f64], order: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&order) {
        return Err(Error::contract(format!(
            "derivative order must be 1..4, got {order}"
        )));
    }
    let n = field.len();
    if n != grid.len() {
        return Err(Error::contract("field length does not match grid"));
    }
    if n < 2 * order + 1 {
        return Err(Error::contract(format!(
            "grid too small for order-{order} stencil"
        )));
    }
    let dx = grid.dx();
    let at = |i: isize| -> f64 {
        if i < 0 || i >= n as isize {
            0.0
        } else {
            field[i as usize]
        }
    };
    let mut out = vec![0.0; n];
    match order {
        1 => {
            let c = 1.0 / (2.0 * dx);
            for i in 0..n as isize {
                out[i as usize] = c * (at(i + 1) - at(i - 1));
            }
        }
        2 => {
            let c = 1.0 / (dx * dx);
            for i in 0..n as isize {
                out[i as usize] = c * (at(i + 1) - 2.0 * at(i) + at(i - 1));
            }
        }
        3 => {
            let c = 1.0 / (2.0 * dx * dx * dx);
            for i in 0..n as isize {
                out[i as usize] =
                    c * (at(i + 2) - 2.0 * at(i + 1) + 2.0 * at(i - 1) - at(i - 2));
            }
        }
        4 => {
            let c = 1.0 / (dx * dx * dx * dx);
            for i in 0..n as isize {
                out[i as usize] = c
                    * (at(i + 2) - 4.0 * at(i + 1) + 6.0 * at(i) - 4.0 * at(i - 1) + at(i - 2));
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Solve (I − α·D2) y = rhs with the module's D2 stencil (ghost values zero)
/// by the Thomas algorithm. The matrix is strictly diagonally dominant for
/// α > 0, so no pivoting is needed and the solve is exact up to round-off.
pub fn helmholtz_solve(grid: &Grid1D, alpha: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::contract("helmholtz solve requires alpha > 0"));
    }
    let n = rhs.len();
    if n != grid.len() {
        return Err(Error::contract("rhs length does not match grid"));
    }
    let r = alpha / (grid.dx() * grid.dx());
    let diag = 1.0 + 2.0 * r;
    let off = -r;

    // Thomas forward sweep with constant bands.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    c_prime[0] = off / diag;
    d_prime[0] = rhs[0] / diag;
    for i in 1..n {
        let m = diag - off * c_prime[i - 1];
        c_prime[i] = off / m;
        d_prime[i] = (rhs[i] - off * d_prime[i - 1]) / m;
    }
    let mut y = vec![0.0; n];
    y[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        y[i] = d_prime[i] - c_prime[i] * y[i + 1];
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// Configuration and state
// ---------------------------------------------------------------------------

/// Full description of one simulation: PDE coefficients, flux, far fields,
/// fan steepness, grid, and time-stepping controls.
///
/// Coefficient sign conventions select the equation variant:
/// γ > 0, δ = 0 is the fourth-order-dissipative model; γ > 0, δ ≠ 0 adds
/// the third-order dispersive term; γ = δ = 0 is the plain BBM-Burgers
/// equation. γ = 0 with δ ≠ 0 is rejected.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub coeffs: PdeCoeffs,
    pub flux: FluxModel,
    pub u_minus: f64,
    pub u_plus: f64,
    pub eps: f64,
    pub grid: Grid1D,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.coeffs;
        if !(c.alpha > 0.0) || !(c.beta > 0.0) {
            return Err(Error::contract("alpha and beta must be positive"));
        }
        if c.gamma < 0.0 {
            return Err(Error::contract("gamma must be non-negative"));
        }
        if c.gamma == 0.0 && c.delta != 0.0 {
            return Err(Error::contract(
                "gamma = 0 with delta != 0 selects no supported equation variant",
            ));
        }
        if self.u_minus > self.u_plus {
            return Err(Error::contract("far fields must satisfy u_minus <= u_plus"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::contract("eps must be positive"));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return Err(Error::contract("dt and t_end must be positive"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::contract("snapshot_every must be at least 1"));
        }
        Ok(())
    }

    /// The smooth approximate rarefaction this configuration relaxes toward.
    pub fn rarefaction(&self) -> Result<ApproxRarefaction> {
        ApproxRarefaction::new(self.flux.clone(), self.u_minus, self.u_plus, self.eps)
    }

    /// Deviation initial data φ₀ = u₀ − U_r(0, ·) for a given u₀ profile.
    pub fn initial_phi_from_u0(&self, u0: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let ar = self.rarefaction()?;
        self.grid
            .nodes()
            .map(|x| Ok(u0(x) - ar.evaluate(0.0, x)?.value))
            .collect()
    }
}

/// Explicit-stability bound for the Helmholtz-preconditioned operator:
///
/// dt ≤ C_safe · min( dx / max|f′|, dx²·(1 + α·k²)/(β + γ·k²) ),  k = π/dx.
///
/// The inversion of I − α∂x² makes the β and γ terms behave like second
/// order at high wavenumber, so only the convection bound is dx-linear.
pub fn stable_dt(config: &SolverConfig) -> f64 {
    let dx = config.grid.dx();
    let k = std::f64::consts::PI / dx;
    let k2 = k * k;
    let max_speed = config.flux.max_speed();
    let convection = if max_speed > 0.0 {
        dx / max_speed
    } else {
        f64::INFINITY
    };
    let diffusion =
        dx * dx * (1.0 + config.coeffs.alpha * k2) / (config.coeffs.beta + config.coeffs.gamma * k2);
    DT_SAFETY * convection.min(diffusion)
}

/// Pointwise data of the smooth wave on the grid at a fixed time, cached so
/// one characteristic solve per node serves all four RK stages' needs.
#[derive(Debug, Clone)]
pub struct UrTable {
    pub t: f64,
    pub u: Vec<f64>,
    pub dx1: Vec<f64>,
    pub dx2: Vec<f64>,
    pub dx3: Vec<f64>,
    pub dx4: Vec<f64>,
    pub dt: Vec<f64>,
    /// Forcing F(U_r) at each node for the configured coefficients.
    pub forcing: Vec<f64>,
}

impl UrTable {
    pub fn build(config: &SolverConfig, ar: &ApproxRarefaction, t: f64) -> Result<UrTable> {
        let n = config.grid.len();
        let mut table = UrTable {
            t,
            u: vec![0.0; n],
            dx1: vec![0.0; n],
            dx2: vec![0.0; n],
            dx3: vec![0.0; n],
            dx4: vec![0.0; n],
            dt: vec![0.0; n],
            forcing: vec![0.0; n],
        };
        if ar.is_constant() {
            table.u.fill(ar.u_minus());
            return Ok(table);
        }
        for (i, x) in config.grid.nodes().enumerate() {
            let jet: WaveJet = ar.evaluate(t, x)?;
            table.u[i] = jet.value;
            table.dx1[i] = jet.dx[0];
            table.dx2[i] = jet.dx[1];
            table.dx3[i] = jet.dx[2];
            table.dx4[i] = jet.dx[3];
            table.dt[i] = jet.dt;
            table.forcing[i] = ar.forcing_from_jet(&config.coeffs, &jet);
        }
        Ok(table)
    }
}

/// Deviation field at one time level together with its cached wave table.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub ur: UrTable,
}

impl FieldState {
    pub fn new(config: &SolverConfig, ar: &ApproxRarefaction, t: f64, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != config.grid.len() {
            return Err(Error::contract("phi length does not match grid"));
        }
        let ur = UrTable::build(config, ar, t)?;
        Ok(FieldState { t, phi, ur })
    }
}

// ---------------------------------------------------------------------------
// Right-hand side and time stepping
// ---------------------------------------------------------------------------

/// φ_t for the deviation equation, with the wave data supplied explicitly:
///
/// φ_t = (I − αD2)⁻¹ [ −D1( f(φ+U_r) − f(U_r) ) + βD2φ − δD3φ − γD4φ + F(U_r) ].
fn rhs_with_table(
    config: &SolverConfig,
    table: &UrTable,
    phi: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    let grid = &config.grid;
    let n = grid.len();
    let c = &config.coeffs;

    // Nonlinear flux difference g = f(phi + U_r) - f(U_r).
    let mut g = vec![0.0; n];
    for i in 0..n {
        let u = table.u[i];
        g[i] = config.flux.eval(phi[i] + u, 0)? - config.flux.eval(u, 0)?;
    }
    let d1g = central_derivative(grid, &g, 1)?;
    let d2 = central_derivative(grid, phi, 2)?;
    let d3 = if c.delta != 0.0 {
        central_derivative(grid, phi, 3)?
    } else {
        Vec::new()
    };
    let d4 = if c.gamma != 0.0 {
        central_derivative(grid, phi, 4)?
    } else {
        Vec::new()
    };

    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let mut v = -d1g[i] + c.beta * d2[i] + table.forcing[i];
        if c.delta != 0.0 {
            v -= c.delta * d3[i];
        }
        if c.gamma != 0.0 {
            v -= c.gamma * d4[i];
        }
        rhs[i] = v;
    }
    let phi_t = helmholtz_solve(grid, c.alpha, &rhs)?;
    if let Some(node) = phi_t.iter().position(|v| !v.is_finite()) {
        return Err(Error::BlowUp { t, node });
    }
    Ok(phi_t)
}

/// φ_t evaluated from a state's own cached wave table.
pub fn deviation_rhs(config: &SolverConfig, state: &FieldState) -> Result<Vec<f64>> {
    rhs_with_table(config, &state.ur, &state.phi, state.t)
}

/// One classical RK4 step of length dt; the returned state carries the
/// re-cached wave table at t + dt. The half-step table is shared by the two
/// middle stages.
pub fn step_rk4(
    config: &SolverConfig,
    ar: &ApproxRarefaction,
    state: &FieldState,
    dt: f64,
) -> Result<FieldState> {
    let n = state.phi.len();
    let t = state.t;

    let table_half = UrTable::build(config, ar, t + 0.5 * dt)?;
    let table_full = UrTable::build(config, ar, t + dt)?;

    let k1 = rhs_with_table(config, &state.ur, &state.phi, t)?;
    let mut stage = vec![0.0; n];

    for i in 0..n {
        stage[i] = state.phi[i] + 0.5 * dt * k1[i];
    }
    let k2 = rhs_with_table(config, &table_half, &stage, t + 0.5 * dt)?;

    for i in 0..n {
        stage[i] = state.phi[i] + 0.5 * dt * k2[i];
    }
    let k3 = rhs_with_table(config, &table_half, &stage, t + 0.5 * dt)?;

    for i in 0..n {
        stage[i] = state.phi[i] + dt * k3[i];
    }
    let k4 = rhs_with_table(config, &table_full, &stage, t + dt)?;

    let mut phi = vec![0.0; n];
    for i in 0..n {
        phi[i] = state.phi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if let Some(node) = phi.iter().position(|v| !v.is_finite()) {
        return Err(Error::BlowUp { t: t + dt, node });
    }
    Ok(FieldState {
        t: t + dt,
        phi,
        ur: table_full,
    })
}

// ---------------------------------------------------------------------------
// Simulation driver
// ---------------------------------------------------------------------------

/// Stored snapshot: time and deviation field (wave data is re-derived by the
/// diagnostics, keeping snapshots small).
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub phi: Vec<f64>,
}

/// Fired when |φ| in the outer 5% of nodes on either side exceeds the
/// relative leak threshold.
#[derive(Debug, Clone)]
pub struct LeakWarning {
    pub t: f64,
    pub boundary_max: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Completed,
    BlowUp { t: f64, node: usize },
}

#[derive(Debug)]
pub struct SimulationRecord {
    pub snapshots: Vec<Snapshot>,
    pub final_state: Option<FieldState>,
    pub outcome: RunOutcome,
    pub leak_warnings: Vec<LeakWarning>,
}

impl SimulationRecord {
    pub fn completed(&self) -> bool {
        matches!(self.outcome, RunOutcome::Completed)
    }
}

/// Observers are invoked at every stored snapshot (including t = 0 and the
/// final time).
pub type Observer<'a> = &'a mut dyn FnMut(&FieldState);

/// Step from t = 0 to t_end with the configured fixed dt (a shorter final
/// step is taken if t_end is not a multiple). Snapshots are stored every
/// `snapshot_every` steps; a blow-up aborts with the partial record.
pub fn run(
    config: &SolverConfig,
    initial_phi: Vec<f64>,
    mut observers: Vec<Observer<'_>>,
) -> Result<SimulationRecord> {
    config.validate()?;
    if initial_phi.len() != config.grid.len() {
        return Err(Error::contract("initial phi length does not match grid"));
    }
    let ar = config.rarefaction()?;
    let mut state = FieldState::new(config, &ar, 0.0, initial_phi)?;

    let mut snapshots = Vec::new();
    let mut leak_warnings = Vec::new();
    let record_snapshot = |state: &FieldState,
                               snapshots: &mut Vec<Snapshot>,
                               leaks: &mut Vec<LeakWarning>,
                               observers: &mut Vec<Observer<'_>>| {
        snapshots.push(Snapshot {
            t: state.t,
            phi: state.phi.clone(),
        });
        if let Some(w) = boundary_leak(&config.grid, state) {
            leaks.push(w);
        }
        for obs in observers.iter_mut() {
            obs(state);
        }
    };

    record_snapshot(&state, &mut snapshots, &mut leak_warnings, &mut observers);

    let mut step_index: usize = 0;
    while state.t < config.t_end - 1e-12 * config.t_end {
        let dt = config.dt.min(config.t_end - state.t);
        match step_rk4(config, &ar, &state, dt) {
            Ok(next) => state = next,
            Err(Error::BlowUp { t, node }) => {
                return Ok(SimulationRecord {
                    snapshots,
                    final_state: None,
                    outcome: RunOutcome::BlowUp { t, node },
                    leak_warnings,
                });
            }
            Err(e) => return Err(e),
        }
        step_index += 1;
        let at_end = state.t >= config.t_end - 1e-12 * config.t_end;
        if step_index.is_multiple_of(config.snapshot_every) || at_end {
            record_snapshot(&state, &mut snapshots, &mut leak_warnings, &mut observers);
        }
    }

    Ok(SimulationRecord {
        snapshots,
        final_state: Some(state),
        outcome: RunOutcome::Completed,
        leak_warnings,
    })
}

/// Leak check: outermost 5% of nodes on each side against the relative
/// threshold tied to the current field maximum.
fn boundary_leak(grid: &Grid1D, state: &FieldState) -> Option<LeakWarning> {
    let n = grid.len();
    let edge = (n / 20).max(1);
    let max_abs = grid.sup_norm(&state.phi);
    if max_abs == 0.0 {
        return None;
    }
    let mut boundary_max = 0.0_f64;
    for i in 0..edge {
        boundary_max = boundary_max
            .max(state.phi[i].abs())
            .max(state.phi[n - 1 - i].abs());
    }
    let threshold = LEAK_RELATIVE_THRESHOLD * max_abs;
    if boundary_max > threshold {
        Some(LeakWarning {
            t: state.t,
            boundary_max,
            threshold,
        })
    } else {
        None
    }
}
