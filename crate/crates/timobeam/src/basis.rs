//! Element-local polynomial bases.
//!
//! Trial and test bases are L2-orthonormalized Legendre polynomials mapped to
//! the element, so the element mass matrix of either is the identity for any
//! element size. The Hermite kind holds the four cubic shape functions that
//! interpolate values and first derivatives at the element endpoints.

use crate::error::{Error, Result};
use crate::mesh::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Field basis for the discontinuous trial unknowns.
    Trial,
    /// Enriched basis for the broken test space.
    Test,
    /// Cubic Hermite shape functions, ordered (value-left, derivative-left,
    /// value-right, derivative-right). Derivative shapes scale with the
    /// element size so that the interpolated derivative is physical.
    Hermite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyBasis {
    kind: BasisKind,
    degree: usize,
}

/// Values and first two derivatives of `P_0 ... P_degree` at `xi`.
fn legendre_all(degree: usize, xi: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = degree + 1;
    let mut p = vec![0.0; m];
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    p[0] = 1.0;
    if degree >= 1 {
        p[1] = xi;
        d1[1] = 1.0;
    }
    for k in 1..degree {
        let kf = k as f64;
        let a = (2.0 * kf + 1.0) / (kf + 1.0);
        let b = kf / (kf + 1.0);
        p[k + 1] = a * xi * p[k] - b * p[k - 1];
        d1[k + 1] = a * (p[k] + xi * d1[k]) - b * d1[k - 1];
        d2[k + 1] = a * (2.0 * d1[k] + xi * d2[k]) - b * d2[k - 1];
    }
    (p, d1, d2)
}

impl PolyBasis {
    pub fn trial(degree: usize) -> Self {
        PolyBasis {
            kind: BasisKind::Trial,
            degree,
        }
    }

    pub fn test(degree: usize) -> Self {
        PolyBasis {
            kind: BasisKind::Test,
            degree,
        }
    }

    pub fn hermite() -> Self {
        PolyBasis {
            kind: BasisKind::Hermite,
            degree: 3,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of shape functions.
    pub fn len(&self) -> usize {
        match self.kind {
            BasisKind::Hermite => 4,
            _ => self.degree + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All shape functions (or their first or second derivatives) at `x`.
    pub fn eval(&self, elem: &Element, x: f64, deriv: usize) -> Result<Vec<f64>> {
        assert!(deriv <= 2, "only derivatives up to order 2 are provided");
        if !elem.contains(x) {
            return Err(Error::PointOutsideElement {
                x,
                a: elem.a,
                b: elem.b,
            });
        }
        let h = elem.h();
        match self.kind {
            BasisKind::Trial | BasisKind::Test => {
                let xi = (2.0 * x - elem.a - elem.b) / h;
                let (p, d1, d2) = legendre_all(self.degree, xi);
                let chain = 2.0 / h;
                let vals = match deriv {
                    0 => p,
                    1 => d1,
                    _ => d2,
                };
                Ok(vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let scale = ((2.0 * k as f64 + 1.0) / h).sqrt();
                        scale * chain.powi(deriv as i32) * v
                    })
                    .collect())
            }
            BasisKind::Hermite => {
                let s = (x - elem.a) / h;
                let vals = match deriv {
                    0 => vec![
                        1.0 - 3.0 * s * s + 2.0 * s * s * s,
                        h * (s - 2.0 * s * s + s * s * s),
                        3.0 * s * s - 2.0 * s * s * s,
                        h * (s * s * s - s * s),
                    ],
                    1 => vec![
                        (6.0 * s * s - 6.0 * s) / h,
                        1.0 - 4.0 * s + 3.0 * s * s,
                        (6.0 * s - 6.0 * s * s) / h,
                        3.0 * s * s - 2.0 * s,
                    ],
                    _ => vec![
                        (12.0 * s - 6.0) / (h * h),
                        (6.0 * s - 4.0) / h,
                        (6.0 - 12.0 * s) / (h * h),
                        (6.0 * s - 2.0) / h,
                    ],
                };
                Ok(vals)
            }
        }
    }

    /// Value of the linear combination `sum_k coeffs[k] * phi_k` at `x`.
    pub fn eval_combination(
        &self,
        elem: &Element,
        coeffs: &[f64],
        x: f64,
        deriv: usize,
    ) -> Result<f64> {
        debug_assert_eq!(coeffs.len(), self.len());
        let vals = self.eval(elem, x, deriv)?;
        Ok(vals.iter().zip(coeffs).map(|(v, c)| v * c).sum())
    }
}
