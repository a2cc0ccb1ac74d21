//! Gauss-Legendre quadrature on the reference interval `[-1, 1]`.

use crate::mesh::Element;

/// A Gauss-Legendre rule; `k` points integrate polynomials of degree
/// `2k - 1` exactly.
#[derive(Clone, Debug)]
pub struct QuadRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial `P_k` and its derivative at `x`, via the three-term
/// recurrence and `(x^2 - 1) P_k' = k (x P_k - P_{k-1})`.
fn legendre_with_deriv(k: usize, x: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let mut pm = 1.0;
    let mut p = x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * p - jf * pm) / (jf + 1.0);
        pm = p;
        p = next;
    }
    let dp = k as f64 * (x * p - pm) / (x * x - 1.0);
    (p, dp)
}

impl QuadRule {
    /// Rule with `k >= 1` points. Nodes are the roots of `P_k`, found by
    /// Newton iteration from the Chebyshev-like initial guesses; symmetry is
    /// enforced by mirroring the first half.
    pub fn gauss_legendre(k: usize) -> Self {
        assert!(k >= 1, "quadrature rule needs at least one point");
        let mut points = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for i in 1..=k.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (k as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(k, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            if k % 2 == 1 && i == k.div_ceil(2) {
                x = 0.0;
            }
            let (_, dp) = legendre_with_deriv(k, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Initial guesses run from the right end; store ascending.
            points[k - i] = x;
            weights[k - i] = w;
            points[i - 1] = -x;
            weights[i - 1] = w;
        }
        QuadRule { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nodes on the reference interval, ascending.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical nodes and weights for an element.
    pub fn mapped(&self, elem: &Element) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = elem.midpoint();
        let half = 0.5 * elem.h();
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&xi, &w)| (mid + half * xi, half * w))
    }

    /// Integral of `f` over an element.
    pub fn integrate(&self, elem: &Element, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(elem).map(|(x, w)| w * f(x)).sum()
    }
}
