//! Uniform grid on a symmetric truncation [-L, L] of the line, plus the
//! trapezoid quadrature helpers every norm in the crate is built on.

use crate::error::{Error, Result};

/// Uniform grid with nodes x_i = -L + i·dx, i = 0..n-1, dx = 2L/(n-1).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    half_length: f64,
    n_points: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::contract(format!(
                "grid half-length must be positive and finite, got {half_length}"
            )));
        }
        if n_points < 16 {
            return Err(Error::contract(format!(
                "grid needs at least 16 points, got {n_points}"
            )));
        }
        let dx = 2.0 * half_length / (n_points - 1) as f64;
        Ok(Grid1D {
            half_length,
            n_points,
            dx,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    /// Grid refined by halving dx (node set is a superset of the original).
    pub fn refined(&self) -> Grid1D {
        Grid1D::new(self.half_length, 2 * (self.n_points - 1) + 1)
            .expect("refinement preserves validity")
    }

    /// Trapezoid-rule integral of nodal values over [-L, L].
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().sum();
        self.dx * (0.5 * values[0] + interior + 0.5 * values[n - 1])
    }

    /// Trapezoid-rule L² norm of nodal values.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        self.l2_norm_sq(values).sqrt()
    }

    /// Trapezoid-rule squared L² norm.
    pub fn l2_norm_sq(&self, values: &[f64]) -> f64 {
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().map(|v| v * v).sum();
        self.dx * (0.5 * values[0] * values[0] + interior + 0.5 * values[n - 1] * values[n - 1])
    }

    /// Trapezoid-rule ∫ |v|^r dx.
    pub fn lr_norm_pow(&self, values: &[f64], r: f64) -> f64 {
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().map(|v| v.abs().powf(r)).sum();
        self.dx
            * (0.5 * values[0].abs().powf(r) + interior + 0.5 * values[n - 1].abs().powf(r))
    }

    /// Grid maximum of |v|.
    pub fn sup_norm(&self, values: &[f64]) -> f64 {
        values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_span_the_interval() {
        let g = Grid1D::new(50.0, 101).unwrap();
        assert_eq!(g.node(0), -50.0);
        assert!((g.node(100) - 50.0).abs() < 1e-12);
        assert!((g.dx() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(0.0, 100).is_err());
        assert!(Grid1D::new(10.0, 15).is_err());
    }

    #[test]
    fn constant_l2_norm() {
        let g = Grid1D::new(20.0, 4001).unwrap();
        let v = vec![3.0; g.len()];
        // ||c||_{L^2([-L,L])} = c * sqrt(2L)
        assert!((g.l2_norm(&v) - 3.0 * 40.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_l2_norm_matches_analytic() {
        let g = Grid1D::new(20.0, 4001).unwrap();
        let v: Vec<f64> = g.nodes().map(|x| (-x * x).exp()).collect();
        let expect = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((g.l2_norm(&v) - expect).abs() < 1e-6);
    }

    #[test]
    fn refinement_nests_nodes() {
        let g = Grid1D::new(5.0, 17).unwrap();
        let f = g.refined();
        assert_eq!(f.len(), 33);
        for i in 0..g.len() {
            assert!((f.node(2 * i) - g.node(i)).abs() < 1e-14);
        }
    }
}
