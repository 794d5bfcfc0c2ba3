//! Finite-difference oracles and a seeded generator for the test suites.
//!
//! These exist so that every analytic derivative in the crate can be checked
//! against an approximation built purely from order-0 evaluations. They are
//! compiled into the library (not `#[cfg(test)]`) because the integration
//! and acceptance suites use them too; nothing in the solver path calls them.

/// Central-difference stencils of second-order accuracy for derivative
/// orders 1..4, improved by two Richardson extrapolation steps
/// (h, h/2, h/4), giving O(h⁶) truncation.
pub fn richardson_derivative(f: &dyn Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    let d0 = central_stencil(f, x, order, h);
    let d1 = central_stencil(f, x, order, 0.5 * h);
    let d2 = central_stencil(f, x, order, 0.25 * h);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r1 - r0) / 15.0
}

/// Base step and absolute noise floor for the oracle at each derivative
/// order. The finest stencil uses h/4, so f64 round-off is amplified by
/// roughly 4^order · 16ε/h^order; the steps below balance that against the
/// O(h⁶) truncation, and the floor is what remains. Comparisons should use
/// |got − oracle| ≤ rtol·|oracle| + atol.
pub fn oracle_step_and_floor(order: usize) -> (f64, f64) {
    match order {
        1 => (1e-3, 1e-10),
        2 => (2e-2, 1e-10),
        3 => (6e-2, 2e-9),
        4 => (1.2e-1, 1e-8),
        _ => panic!("unsupported oracle order {order}"),
    }
}

fn central_stencil(f: &dyn Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => panic!("unsupported stencil order {order}"),
    }
}

/// Richardson-extrapolated time derivative with a step that respects t >= 0.
pub fn fd_time_derivative(f: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-3_f64.min(0.5 * t.max(1e-3));
    richardson_derivative(f, t, 1, h)
}

/// Minimal 64-bit linear congruential generator (MMIX constants) so test
/// sampling is reproducible without external crates.
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_on_polynomial_is_near_exact() {
        let f = |x: f64| x.powi(5);
        assert!((richardson_derivative(&f, 1.3, 1, 1e-3) - 5.0 * 1.3f64.powi(4)).abs() < 1e-9);
        assert!((richardson_derivative(&f, 1.3, 2, 1e-2) - 20.0 * 1.3f64.powi(3)).abs() < 1e-8);
        assert!((richardson_derivative(&f, 1.3, 3, 1e-2) - 60.0 * 1.3f64.powi(2)).abs() < 1e-6);
        assert!((richardson_derivative(&f, 1.3, 4, 2e-2) - 120.0 * 1.3).abs() < 1e-5);
    }

    #[test]
    fn lcg_is_deterministic() {
        let mut a = Lcg::new(42);
        let mut b = Lcg::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let v = Lcg::new(7).next_f64();
        assert!((0.0..1.0).contains(&v));
    }
}
