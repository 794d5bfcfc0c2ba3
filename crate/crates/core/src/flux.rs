//! Convex flux models with exact high-order derivatives.
//!
//! Fluxes are restricted to polynomial families so that derivatives up to
//! order 5 are evaluated exactly (Horner on the differentiated coefficient
//! list) rather than by numerical differentiation. The characteristic speed
//! λ = f′ is strictly increasing on the working interval whenever f″ > 0
//! there, so its inverse is computed by bracketed Newton iteration.

use crate::error::{Error, Result};

/// Highest derivative order the model guarantees.
pub const MAX_DERIV_ORDER: usize = 5;

/// Number of sample points used for the convexity check at construction.
const CONVEXITY_SAMPLES: usize = 2001;

/// Default tolerance for inverting the characteristic speed.
pub const DEFAULT_INV_TOL: f64 = 1e-12;

/// Iteration cap for the safeguarded Newton solve in [`FluxModel::invert_speed`].
/// Bisection alone closes the working-interval bracket well past f64
/// resolution within this budget, so hitting the cap means a genuine bug.
const NEWTON_MAX_ITER: usize = 60;

/// Polynomial flux f(u) together with the working interval on which
/// convexity has been verified. The working interval also serves as the
/// search bracket when inverting λ = f′.
#[derive(Debug, Clone)]
pub struct FluxModel {
    /// Coefficients in ascending powers: f(u) = Σ coeffs[k]·u^k.
    coeffs: Vec<f64>,
    lo: f64,
    hi: f64,
    convex: bool,
}

impl FluxModel {
    /// Burgers flux f(u) = u²/2 on the given working interval.
    pub fn burgers(interval: (f64, f64)) -> Result<Self> {
        Self::polynomial(vec![0.0, 0.0, 0.5], interval)
    }

    /// Quartic flux f(u) = u⁴/4 + u²/2 on the given working interval.
    pub fn quartic(interval: (f64, f64)) -> Result<Self> {
        Self::polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.25], interval)
    }

    /// Custom polynomial flux from ascending-power coefficients.
    ///
    /// Fails unless f″ > 0 at every sample of the working interval.
    pub fn polynomial(coeffs: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::contract(format!(
                "working interval [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::contract("flux coefficients must be finite and non-empty"));
        }
        let model = FluxModel {
            coeffs,
            lo,
            hi,
            convex: true,
        };
        for i in 0..CONVEXITY_SAMPLES {
            let u = lo + (hi - lo) * i as f64 / (CONVEXITY_SAMPLES - 1) as f64;
            if poly_deriv(&model.coeffs, u, 2) <= 0.0 {
                return Err(Error::contract(format!(
                    "flux is not convex on the working interval: f''({u}) <= 0"
                )));
            }
        }
        Ok(model)
    }

    /// The identically-zero flux, used by the linear diagnostic problems
    /// (pure BBM damping, no convection). Exempt from the convexity check;
    /// it cannot be used to build a rarefaction fan.
    pub fn zero(interval: (f64, f64)) -> Self {
        FluxModel {
            coeffs: vec![0.0],
            lo: interval.0,
            hi: interval.1,
            convex: false,
        }
    }

    pub fn working_interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Whether the convexity check was performed and passed.
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// d^order f / du^order at `u`, exact for the polynomial representation.
    pub fn eval(&self, u: f64, order: usize) -> Result<f64> {
        if order > MAX_DERIV_ORDER {
            return Err(Error::contract(format!(
                "derivative order {order} unsupported (max {MAX_DERIV_ORDER})"
            )));
        }
        Ok(poly_deriv(&self.coeffs, u, order))
    }

    /// Characteristic speed λ(u) = f′(u).
    pub fn speed(&self, u: f64) -> f64 {
        poly_deriv(&self.coeffs, u, 1)
    }

    /// Invert λ = f′ on the working interval: returns u with |f′(u) − v| ≤ tol.
    ///
    /// Safeguarded Newton: the iterate is bisected back whenever it leaves
    /// the current bracket, so monotonicity of f′ guarantees convergence.
    pub fn invert_speed(&self, v: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::contract("invert_speed requires tol > 0"));
        }
        let (mut a, mut b) = (self.lo, self.hi);
        let fa = self.speed(a) - v;
        let fb = self.speed(b) - v;
        if fa > 0.0 || fb < 0.0 {
            return Err(Error::OutOfRange {
                value: v,
                lo: self.speed(a),
                hi: self.speed(b),
            });
        }
        let mut u = 0.5 * (a + b);
        let mut residual = self.speed(u) - v;
        // rtsafe-style safeguard: bisect unless the Newton step stays in the
        // bracket and at least halves the previous step.
        let mut step_old = b - a;
        for _ in 0..NEWTON_MAX_ITER {
            if residual.abs() <= tol {
                return Ok(u);
            }
            if residual > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let slope = poly_deriv(&self.coeffs, u, 2);
            let newton = u - residual / slope;
            let step = (residual / slope).abs();
            u = if newton > a && newton < b && 2.0 * step <= step_old {
                step_old = step;
                newton
            } else {
                step_old = 0.5 * (b - a);
                0.5 * (a + b)
            };
            residual = self.speed(u) - v;
        }
        if residual.abs() <= tol {
            return Ok(u);
        }
        Err(Error::NonConvergence {
            what: "characteristic speed inversion",
            residual,
        })
    }

    /// max |f′| over the working interval, sampled at the convexity resolution.
    pub fn max_speed(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..CONVEXITY_SAMPLES {
            let u = self.lo + (self.hi - self.lo) * i as f64 / (CONVEXITY_SAMPLES - 1) as f64;
            m = m.max(self.speed(u).abs());
        }
        m
    }
}

/// Evaluate the `order`-th derivative of a polynomial given by ascending
/// coefficients, via Horner on the differentiated coefficient list.
fn poly_deriv(coeffs: &[f64], u: f64, order: usize) -> f64 {
    if order >= coeffs.len() {
        return 0.0;
    }
    let n = coeffs.len();
    let mut acc = 0.0;
    // coefficient of u^(k-order) is coeffs[k] * k!/(k-order)!
    for k in (order..n).rev() {
        let mut fall = 1.0;
        for j in 0..order {
            fall *= (k - j) as f64;
        }
        acc = acc * u + coeffs[k] * fall;
    }
    acc
}
