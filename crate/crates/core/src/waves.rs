//! Rarefaction fans and their smooth approximations.
//!
//! The exact fan connects far-field states u₋ < u₊ through the self-similar
//! profile (f′)⁻¹(x/t). Because it is only Lipschitz at the fan edges, the
//! solver works against a smooth surrogate instead: the inviscid Burgers
//! equation is solved exactly by characteristics from an arctan-like initial
//! step, and the surrogate is obtained by mapping that solution back through
//! (f′)⁻¹. All spatial derivatives up to order four (and the time derivative)
//! come out of chain-rule differentiation of the implicit characteristic
//! relation; no numerical differentiation is involved.

use crate::error::{Error, Result};
use crate::flux::FluxModel;

/// Absolute residual floor for characteristic solves.
pub const CHAR_TOL: f64 = 1e-13;

/// Iteration cap for the characteristic Newton solve.
const CHAR_MAX_ITER: usize = 200;

// ---------------------------------------------------------------------------
// Exact fan
// ---------------------------------------------------------------------------

/// Exact rarefaction fan u_r(x/t) connecting u₋ to u₊ (three-branch profile).
///
/// Requires t > 0 and u₋ ≤ u₊. Equal far fields give the constant state.
pub fn exact_fan(flux: &FluxModel, u_minus: f64, u_plus: f64, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("exact fan needs t > 0, got {t}")));
    }
    if u_minus > u_plus {
        return Err(Error::contract("exact fan requires u_minus <= u_plus"));
    }
    let lam_minus = flux.speed(u_minus);
    let lam_plus = flux.speed(u_plus);
    let xi = x / t;
    if xi <= lam_minus {
        Ok(u_minus)
    } else if xi >= lam_plus {
        Ok(u_plus)
    } else {
        flux.invert_speed(xi, CHAR_TOL)
    }
}

/// First and second x-derivatives of the exact fan.
///
/// Inside the fan, differentiating f′(u) = x/t gives
/// ∂x u = 1/(f″(u) t) and ∂x² u = −f‴(u)/(f″(u)³ t²); both vanish outside.
/// At the fan edges the interior one-sided values are returned, which keeps
/// the operation total even though the classical derivative jumps there.
pub fn exact_fan_derivs(
    flux: &FluxModel,
    u_minus: f64,
    u_plus: f64,
    t: f64,
    x: f64,
) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("exact fan needs t > 0, got {t}")));
    }
    if u_minus > u_plus {
        return Err(Error::contract("exact fan requires u_minus <= u_plus"));
    }
    let lam_minus = flux.speed(u_minus);
    let lam_plus = flux.speed(u_plus);
    let xi = x / t;
    if xi < lam_minus || xi > lam_plus || u_minus == u_plus {
        return Ok((0.0, 0.0));
    }
    let u = flux.invert_speed(xi.clamp(lam_minus, lam_plus), CHAR_TOL)?;
    let f2 = flux.eval(u, 2)?;
    let f3 = flux.eval(u, 3)?;
    let du = 1.0 / (f2 * t);
    let d2u = -f3 / (f2 * f2 * f2 * t * t);
    Ok((du, d2u))
}

// ---------------------------------------------------------------------------
// Smooth Burgers layer
// ---------------------------------------------------------------------------

/// Value and derivatives of a smooth wave at one space-time point:
/// spatial derivatives up to order four plus the time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveJet {
    pub value: f64,
    /// dx[k-1] = ∂x^k at the point, k = 1..4.
    pub dx: [f64; 4],
    pub dt: f64,
}

impl WaveJet {
    pub fn constant(value: f64) -> Self {
        WaveJet {
            value,
            dx: [0.0; 4],
            dt: 0.0,
        }
    }
}

/// Parameters of the smoothed step that seeds the Burgers layer:
/// far fields w₋ ≤ w₊, steepness ε > 0, tail exponent q > 1/2, and the
/// normalization K_q with K_q·∫₀^∞ (1+y²)^{−q} dy = 1.
#[derive(Debug, Clone)]
pub struct SmoothFanParams {
    w_minus: f64,
    w_plus: f64,
    eps: f64,
    q: f64,
    k_q: f64,
}

impl SmoothFanParams {
    pub fn new(w_minus: f64, w_plus: f64, eps: f64, q: f64) -> Result<Self> {
        if w_minus > w_plus {
            return Err(Error::contract("smooth fan requires w_minus <= w_plus"));
        }
        if !(eps > 0.0) {
            return Err(Error::contract("smooth fan requires eps > 0"));
        }
        if !(q > 0.5) {
            return Err(Error::contract("smooth fan requires q > 1/2"));
        }
        let k_q = if q == 1.0 {
            2.0 / std::f64::consts::PI
        } else {
            1.0 / half_line_integral(q)
        };
        Ok(SmoothFanParams {
            w_minus,
            w_plus,
            eps,
            q,
            k_q,
        })
    }

    pub fn w_minus(&self) -> f64 {
        self.w_minus
    }

    pub fn w_plus(&self) -> f64 {
        self.w_plus
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn k_q(&self) -> f64 {
        self.k_q
    }

    /// Half step height (w₊ − w₋)/2.
    pub fn half_jump(&self) -> f64 {
        0.5 * (self.w_plus - self.w_minus)
    }

    /// max(|w₋|, |w₊|), the amplitude scale of the time-derivative envelope.
    pub fn amplitude(&self) -> f64 {
        self.w_minus.abs().max(self.w_plus.abs())
    }

    /// Initial profile w₀ and its derivatives up to order 4.
    ///
    /// Order 0 has a closed arctan form at q = 1 and falls back to adaptive
    /// quadrature of the normalized kernel otherwise; orders ≥ 1 are
    /// closed-form for every q.
    pub fn initial_profile(&self, x: f64, order: usize) -> Result<f64> {
        if order > 4 {
            return Err(Error::contract(format!(
                "initial profile derivative order {order} unsupported (max 4)"
            )));
        }
        let mid = 0.5 * (self.w_minus + self.w_plus);
        let jump = self.half_jump();
        let s = self.eps * x;
        if order == 0 {
            let integral = if self.q == 1.0 {
                s.atan()
            } else {
                kernel_antiderivative(self.q, s)
            };
            return Ok(mid + jump * self.k_q * integral);
        }
        let g = kernel_deriv(self.q, s, order - 1);
        Ok(jump * self.k_q * self.eps.powi(order as i32) * g)
    }

    /// Solve the characteristic relation x = x₀ + w₀(x₀)·t for the foot
    /// point x₀. The map is strictly increasing in x₀ (w₀ is monotone and
    /// t ≥ 0), so a bracketed Newton iteration always converges.
    pub fn characteristic_foot(&self, t: f64, x: f64, tol: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::contract("characteristic solve requires t >= 0"));
        }
        if !(tol > 0.0) {
            return Err(Error::contract("characteristic solve requires tol > 0"));
        }
        // w0 ranges over (w_minus, w_plus), so the foot point is bracketed by
        // the extreme translations, padded by one unit for strict enclosure.
        let mut a = x - self.w_plus * t - 1.0;
        let mut b = x - self.w_minus * t + 1.0;
        let mut y = x - 0.5 * (self.w_minus + self.w_plus) * t;
        let mut residual = self.char_residual(t, x, y)?;
        // Newton with an rtsafe-style safeguard: bisect whenever the Newton
        // step leaves the bracket or fails to halve the previous step, so the
        // bracket provably shrinks (plain in-bracket Newton can cycle between
        // the two flat tails of w0 without converging).
        let mut step_old = b - a;
        for _ in 0..CHAR_MAX_ITER {
            if residual.abs() <= tol {
                return Ok(y);
            }
            if residual > 0.0 {
                b = y;
            } else {
                a = y;
            }
            let slope = 1.0 + self.initial_profile(y, 1)? * t;
            let newton = y - residual / slope;
            let step = (residual / slope).abs();
            y = if newton > a && newton < b && 2.0 * step <= step_old {
                step_old = step;
                newton
            } else {
                step_old = 0.5 * (b - a);
                0.5 * (a + b)
            };
            residual = self.char_residual(t, x, y)?;
        }
        if residual.abs() <= tol {
            return Ok(y);
        }
        Err(Error::NonConvergence {
            what: "characteristic foot point",
            residual,
        })
    }

    /// Residual of the characteristic relation, x₀ + w₀(x₀)t − x, grouped to
    /// avoid cancellation when |x| is large.
    pub fn char_residual(&self, t: f64, x: f64, x0: f64) -> Result<f64> {
        Ok((x0 - x) + self.initial_profile(x0, 0)? * t)
    }

    /// Tolerance used by the jet evaluators: the absolute floor relaxed in
    /// proportion to |x| so far-field evaluations stay representable.
    fn char_tol(&self, x: f64) -> f64 {
        CHAR_TOL.max(1e-15 * x.abs())
    }

    /// Smooth Burgers solution w(t, x) with spatial derivatives up to order
    /// four and the time derivative.
    ///
    /// Writing a_k = w₀^(k)(x₀) and J = 1 + a₁t, implicit differentiation of
    /// the characteristic relation gives the foot-point derivatives
    /// s₁ = 1/J, s₂ = −t a₂ s₁³, s₃ = −t a₃ s₁⁴ + 3t² a₂² s₁⁵,
    /// s₄ = −t a₄ s₁⁵ + 10 t² a₂ a₃ s₁⁶ − 15 t³ a₂³ s₁⁷,
    /// and the chain rule assembles ∂x^k w from them. The time derivative is
    /// the transport identity ∂t w = −w ∂x w.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<WaveJet> {
        let x0 = self.characteristic_foot(t, x, self.char_tol(x))?;
        let a0 = self.initial_profile(x0, 0)?;
        let a1 = self.initial_profile(x0, 1)?;
        let a2 = self.initial_profile(x0, 2)?;
        let a3 = self.initial_profile(x0, 3)?;
        let a4 = self.initial_profile(x0, 4)?;

        let j = 1.0 + a1 * t;
        let s1 = 1.0 / j;
        let s1_2 = s1 * s1;
        let s1_3 = s1_2 * s1;
        let s2 = -t * a2 * s1_3;
        let s3 = -t * a3 * s1_2 * s1_2 + 3.0 * t * t * a2 * a2 * s1_2 * s1_3;
        let s4 = -t * a4 * s1_2 * s1_3 + 10.0 * t * t * a2 * a3 * s1_3 * s1_3
            - 15.0 * t * t * t * a2 * a2 * a2 * s1_3 * s1_3 * s1;

        let w1 = a1 * s1;
        let w2 = a2 * s1_2 + a1 * s2;
        let w3 = a3 * s1_3 + 3.0 * a2 * s1 * s2 + a1 * s3;
        let w4 = a4 * s1_2 * s1_2
            + 6.0 * a3 * s1_2 * s2
            + 3.0 * a2 * s2 * s2
            + 4.0 * a2 * s1 * s3
            + a1 * s4;

        Ok(WaveJet {
            value: a0,
            dx: [w1, w2, w3, w4],
            dt: -a0 * w1,
        })
    }
}

// ---------------------------------------------------------------------------
// Approximate rarefaction U_r = (f')^{-1}(w)
// ---------------------------------------------------------------------------

/// PDE coefficients (α, β, γ, δ) shared by the solver and the forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Smooth approximate rarefaction obtained by pushing the Burgers layer
/// through the inverse characteristic speed. The layer far fields are the
/// speeds λ± = f′(u±), so U_r tends to u± as x → ±∞.
#[derive(Debug, Clone)]
pub struct ApproxRarefaction {
    flux: FluxModel,
    params: SmoothFanParams,
    u_minus: f64,
    u_plus: f64,
}

impl ApproxRarefaction {
    /// Build with q = 1 (the only exponent for which the C⁴ regularity of
    /// the mapped wave is available).
    pub fn new(flux: FluxModel, u_minus: f64, u_plus: f64, eps: f64) -> Result<Self> {
        if u_minus > u_plus {
            return Err(Error::contract(
                "approximate rarefaction requires u_minus <= u_plus",
            ));
        }
        if u_minus < u_plus && !flux.is_convex() {
            return Err(Error::contract(
                "a rarefaction fan needs a convexity-checked flux",
            ));
        }
        let lam_minus = flux.speed(u_minus);
        let lam_plus = flux.speed(u_plus);
        let params = SmoothFanParams::new(lam_minus, lam_plus, eps, 1.0)?;
        Ok(ApproxRarefaction {
            flux,
            params,
            u_minus,
            u_plus,
        })
    }

    pub fn flux(&self) -> &FluxModel {
        &self.flux
    }

    pub fn params(&self) -> &SmoothFanParams {
        &self.params
    }

    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    pub fn is_constant(&self) -> bool {
        self.u_minus == self.u_plus
    }

    /// U_r and its derivatives at (t, x).
    ///
    /// With λ(U) = w, repeated differentiation of f′(U) = w solves for the
    /// U-derivatives order by order (b_k = f^(k+1)(U)):
    /// U₁ = w₁/b₁, U₂ = (w₂ − b₂U₁²)/b₁, and so on through order four.
    /// The time derivative is the conservation-law identity ∂t U = −w·∂x U.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<WaveJet> {
        if t < 0.0 {
            return Err(Error::contract("approximate rarefaction requires t >= 0"));
        }
        if self.is_constant() {
            return Ok(WaveJet::constant(self.u_minus));
        }
        let w = self.params.evaluate(t, x)?;
        let speed_tol = CHAR_TOL.max(1e-15 * w.value.abs());
        let u = self.flux.invert_speed(w.value, speed_tol)?;
        let b1 = self.flux.eval(u, 2)?;
        let b2 = self.flux.eval(u, 3)?;
        let b3 = self.flux.eval(u, 4)?;
        let b4 = self.flux.eval(u, 5)?;

        let [w1, w2, w3, w4] = w.dx;
        let u1 = w1 / b1;
        let u2 = (w2 - b2 * u1 * u1) / b1;
        let u3 = (w3 - b3 * u1 * u1 * u1 - 3.0 * b2 * u1 * u2) / b1;
        let u4 = (w4
            - b4 * u1 * u1 * u1 * u1
            - 6.0 * b3 * u1 * u1 * u2
            - 3.0 * b2 * u2 * u2
            - 4.0 * b2 * u1 * u3)
            / b1;

        Ok(WaveJet {
            value: u,
            dx: [u1, u2, u3, u4],
            dt: -w.value * u1,
        })
    }

    /// Residual of the smooth wave in the full PDE:
    /// F(U_r) = α ∂t∂x²U_r + β ∂x²U_r − δ ∂x³U_r − γ ∂x⁴U_r,
    /// where ∂t∂x²U_r = −∂x³ f(U_r) is expanded by the chain rule.
    pub fn forcing(&self, coeffs: &PdeCoeffs, t: f64, x: f64) -> Result<f64> {
        let jet = self.evaluate(t, x)?;
        Ok(self.forcing_from_jet(coeffs, &jet))
    }

    /// Same as [`Self::forcing`] but reusing an already-computed jet.
    pub fn forcing_from_jet(&self, coeffs: &PdeCoeffs, jet: &WaveJet) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let u = jet.value;
        let [u1, u2, u3, u4] = jet.dx;
        let f1 = self.flux.speed(u);
        let f2 = poly2(&self.flux, u);
        let f3 = poly3(&self.flux, u);
        // ∂x³ f(U) = f‴U₁³ + 3f″U₁U₂ + f′U₃
        let dxxx_flux = f3 * u1 * u1 * u1 + 3.0 * f2 * u1 * u2 + f1 * u3;
        coeffs.alpha * (-dxxx_flux) + coeffs.beta * u2 - coeffs.delta * u3 - coeffs.gamma * u4
    }
}

fn poly2(flux: &FluxModel, u: f64) -> f64 {
    flux.eval(u, 2).expect("order 2 always valid")
}

fn poly3(flux: &FluxModel, u: f64) -> f64 {
    flux.eval(u, 3).expect("order 3 always valid")
}

// ---------------------------------------------------------------------------
// Decay envelopes
// ---------------------------------------------------------------------------

/// Which r-th-power L^r quantity an envelope bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// ‖∂x w‖_{L^r}^r
    DxW,
    /// ‖∂t w‖_{L^r}^r
    DtW,
    /// ‖∂x² w‖_{L^r}^r
    Dx2W,
    /// ‖∂x³ w‖_{L^r}^r
    Dx3W,
    /// ‖∂x⁴ w‖_{L^r}^r
    Dx4W,
    /// ‖∂x U_r‖_{L^r}^r (q = 1 only)
    DxUr,
    /// ‖∂x² U_r‖_{L^r}^r (q = 1 only)
    Dx2Ur,
    /// ‖∂x³ U_r‖_{L^r}^r (q = 1 only)
    Dx3Ur,
    /// ‖∂x⁴ U_r‖_{L^r}^r (q = 1 only)
    Dx4Ur,
}

impl EnvelopeKind {
    fn is_ur(self) -> bool {
        matches!(
            self,
            EnvelopeKind::DxUr | EnvelopeKind::Dx2Ur | EnvelopeKind::Dx3Ur | EnvelopeKind::Dx4Ur
        )
    }
}

/// Decay envelope for the chosen derivative norm: the bracketed min{...}
/// factor of the corresponding bound, without the unknown constant in front.
///
/// The Burgers-layer envelopes accept any q > 1/2; the U_r envelopes are
/// only stated for q = 1 and reject other exponents. r must be finite and
/// at least 1 (the r-th-power form is meaningless at r = ∞).
pub fn decay_envelope(
    params: &SmoothFanParams,
    t: f64,
    kind: EnvelopeKind,
    r: f64,
) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::contract(format!(
            "envelope requires finite r >= 1, got {r}"
        )));
    }
    if t < 0.0 {
        return Err(Error::contract("envelope requires t >= 0"));
    }
    if kind.is_ur() && params.q() != 1.0 {
        return Err(Error::contract(
            "U_r envelopes are only defined for q = 1",
        ));
    }
    let eps = params.eps();
    let q = params.q();
    let wj = params.half_jump();
    let tau = 1.0 + t;
    let env = match kind {
        EnvelopeKind::DxW => (eps.powf(r - 1.0) * wj.powf(r)).min(wj * tau.powf(1.0 - r)),
        EnvelopeKind::DtW => {
            let amp = params.amplitude().powf(r);
            amp * (eps.powf(r - 1.0) * wj.powf(r)).min(wj * tau.powf(1.0 - r))
        }
        EnvelopeKind::Dx2W => {
            let steep = eps.powf(2.0 * r - 1.0) * wj.powf(r);
            let decay = eps.powf((r - 1.0) * (1.0 - 0.5 / q))
                * wj.powf(-(r - 1.0) / (2.0 * q))
                * tau.powf(-r - (r - 1.0) / (2.0 * q));
            steep.min(decay)
        }
        EnvelopeKind::Dx3W => {
            let steep = eps.powf(3.0 * r - 1.0) * wj.powf(r);
            steep.min(third_derivative_tail(tau, eps, wj, q, r))
        }
        EnvelopeKind::Dx4W => {
            let steep = eps.powf(4.0 * r - 1.0) * wj.powf(r);
            steep.min(fourth_derivative_tail(tau, eps, wj, q, r))
        }
        EnvelopeKind::DxUr => eps.powf(r - 1.0).min(tau.powf(1.0 - r)),
        EnvelopeKind::Dx2Ur => {
            (eps.powf(2.0 * r - 1.0)).min(eps.powf(0.5 * (r - 1.0)) * tau.powf(-0.5 * (3.0 * r - 1.0)))
        }
        EnvelopeKind::Dx3Ur => (eps.powf(3.0 * r - 1.0)).min(eps.powf(r - 1.0) * tau.powf(1.0 - 2.0 * r)),
        EnvelopeKind::Dx4Ur => {
            let expo = (1.5 * r + 1.0).min(2.5 * r - 1.0);
            (eps.powf(4.0 * r - 1.0)).min(eps.powf(0.5 * (3.0 * r - 2.0)) * tau.powf(-expo))
        }
    };
    Ok(env)
}

/// Large-time branch of the third-derivative layer bound, evaluated at the
/// shifted time τ = 1 + t.
fn third_derivative_tail(tau: f64, eps: f64, wj: f64, q: f64, r: f64) -> f64 {
    eps.powf(3.0 * r) * wj.powf(r) * (1.0 + eps * wj * tau).powf(1.0 - 4.0 * r)
        + eps.powf(2.0 * (r - 1.0) * (1.0 - 0.5 / q))
            * wj.powf(-(r - 1.0) / q)
            * tau.powf(-1.0 - (r - 1.0) * (1.0 + 1.0 / q))
        + eps.powf((2.0 * r - 1.0) * (1.0 - 0.5 / q))
            * wj.powf(-(2.0 * r - 1.0) / (2.0 * q))
            * tau.powf(-r - (2.0 * r - 1.0) / (2.0 * q))
}

/// Large-time branch of the fourth-derivative layer bound at τ = 1 + t.
fn fourth_derivative_tail(tau: f64, eps: f64, wj: f64, q: f64, r: f64) -> f64 {
    eps.powf(3.0 * r) * wj.powf(r) * (1.0 + eps * wj * tau).powf(1.0 - 5.0 * r)
        + eps.powf((3.0 * r - 2.0) * (1.0 - 0.5 / q))
            * wj.powf(-(3.0 * r - 2.0) / (2.0 * q))
            * tau.powf(-r * (1.0 + 1.5 / q) + 1.0 / q)
        + eps.powf((3.0 * r - 1.0) * (1.0 - 0.5 / q))
            * wj.powf(-(3.0 * r - 1.0) / (2.0 * q))
            * tau.powf(-r - (3.0 * r - 1.0) / (2.0 * q))
}

// ---------------------------------------------------------------------------
// Kernel quadrature for general q
// ---------------------------------------------------------------------------

/// ∫₀^∞ (1+y²)^{−q} dy via the substitution y = tan θ, which turns the
/// improper integral into ∫₀^{π/2} cos^{2q−2}θ dθ.
fn half_line_integral(q: f64) -> f64 {
    adaptive_simpson(
        &|theta: f64| theta.cos().powf(2.0 * q - 2.0),
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-13,
        48,
    )
}

/// ∫₀^X (1+y²)^{−q} dy for any X (odd in X), by the same substitution.
fn kernel_antiderivative(q: f64, x: f64) -> f64 {
    let upper = x.abs().atan();
    let val = adaptive_simpson(
        &|theta: f64| theta.cos().powf(2.0 * q - 2.0),
        0.0,
        upper,
        1e-13,
        48,
    );
    val.copysign(x)
}

/// Derivatives of g(s) = (1+s²)^{−q}, orders 0..3, closed form.
fn kernel_deriv(q: f64, s: f64, order: usize) -> f64 {
    let p = 1.0 + s * s;
    match order {
        0 => p.powf(-q),
        1 => -2.0 * q * s * p.powf(-q - 1.0),
        2 => -2.0 * q * p.powf(-q - 1.0) + 4.0 * q * (q + 1.0) * s * s * p.powf(-q - 2.0),
        3 => {
            12.0 * q * (q + 1.0) * s * p.powf(-q - 2.0)
                - 8.0 * q * (q + 1.0) * (q + 2.0) * s * s * s * p.powf(-q - 3.0)
        }
        _ => unreachable!("kernel derivatives only needed through order 3"),
    }
}

/// Plain recursive adaptive Simpson quadrature.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson_step(f, a, c, fa, fc, fd, left, 0.5 * tol, depth - 1)
            + simpson_step(f, c, b, fc, fb, fe, right, 0.5 * tol, depth - 1)
    }
}
