//! Closed-form solutions of the beam system for the built-in sine load, used
//! as the error oracle, plus elementwise L2 projection.
//!
//! For `f(x) = sin(pi x)` the moment is a sine plus a linear polynomial and
//! the deflection is a sine plus a cubic. The four polynomial constants come
//! from a 4x4 solve of the boundary-condition rows, so every supported
//! combination of end conditions and every thickness reuses one code path.

use crate::basis::PolyBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::QuadRule;
use crate::trace::{BoundaryCondition, EndCondition, Thickness};
use nalgebra::{DVector, Matrix4, Vector4};
use std::f64::consts::PI;

/// Exact solution pair `(u, M)` of
/// `-M'' = f`, `M - t^2 M'' + u'' = 0` for `f(x) = amplitude * sin(pi x)`:
///
/// ```text
/// M(x) = amplitude * sin(pi x) / pi^2 + c1 x + c2
/// u(x) = amplitude * (t^2 / pi^2 + 1 / pi^4) * sin(pi x)
///        - c1 x^3 / 6 - c2 x^2 / 2 + c3 x + c4
/// ```
#[derive(Clone, Copy, Debug)]
pub struct ExactSolution {
    bc: BoundaryCondition,
    t: Thickness,
    amplitude: f64,
    c: [f64; 4],
}

impl ExactSolution {
    /// Solution for the built-in load `f(x) = sin(pi x)`.
    pub fn sin_load(bc: BoundaryCondition, t: Thickness) -> Result<Self> {
        Self::with_amplitude(bc, t, 1.0)
    }

    /// Solution for `f = 0`, which is identically zero for every supported
    /// boundary condition.
    pub fn zero_load(bc: BoundaryCondition, t: Thickness) -> Self {
        ExactSolution {
            bc,
            t,
            amplitude: 0.0,
            c: [0.0; 4],
        }
    }

    fn with_amplitude(bc: BoundaryCondition, t: Thickness, amplitude: f64) -> Result<Self> {
        let t2 = t.squared();
        // Particular parts evaluated at an endpoint.
        let pu = |x: f64| amplitude * (t2 / (PI * PI) + 1.0 / PI.powi(4)) * (PI * x).sin();
        let pup = |x: f64| amplitude * (t2 / PI + 1.0 / PI.powi(3)) * (PI * x).cos();
        let pm = |x: f64| amplitude * (PI * x).sin() / (PI * PI);
        let pmp = |x: f64| amplitude * (PI * x).cos() / PI;

        // Rows of the 4x4 system in the constants (c1, c2, c3, c4).
        let u_row = |x: f64| (Vector4::new(-x * x * x / 6.0, -x * x / 2.0, x, 1.0), -pu(x));
        let up_row = |x: f64| (Vector4::new(-x * x / 2.0, -x, 1.0, 0.0), -pup(x));
        let m_row = |x: f64| (Vector4::new(x, 1.0, 0.0, 0.0), -pm(x));
        let mp_row = |x: f64| (Vector4::new(1.0, 0.0, 0.0, 0.0), -pmp(x));

        let mut rows = Vec::with_capacity(4);
        for (end, x) in [(bc.left(), 0.0), (bc.right(), 1.0)] {
            match end {
                EndCondition::Clamped => {
                    rows.push(u_row(x));
                    // u' - t^2 M' = 0.
                    let (ru, bu) = up_row(x);
                    let (rm, bm) = mp_row(x);
                    rows.push((ru - t2 * rm, bu - t2 * bm));
                }
                EndCondition::Supported => {
                    rows.push(u_row(x));
                    rows.push(m_row(x));
                }
                EndCondition::Free => {
                    rows.push(m_row(x));
                    rows.push(mp_row(x));
                }
            }
        }
        let a = Matrix4::from_rows(&[
            rows[0].0.transpose(),
            rows[1].0.transpose(),
            rows[2].0.transpose(),
            rows[3].0.transpose(),
        ]);
        let b = Vector4::new(rows[0].1, rows[1].1, rows[2].1, rows[3].1);
        let c = a.lu().solve(&b).ok_or(Error::SingularBoundarySystem)?;
        Ok(ExactSolution {
            bc,
            t,
            amplitude,
            c: [c[0], c[1], c[2], c[3]],
        })
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn thickness(&self) -> Thickness {
        self.t
    }

    /// The polynomial constants `(c1, c2, c3, c4)`.
    pub fn constants(&self) -> [f64; 4] {
        self.c
    }

    /// Load this solution corresponds to.
    pub fn load(&self, x: f64) -> f64 {
        self.amplitude * (PI * x).sin()
    }

    pub fn u(&self, x: f64) -> f64 {
        let t2 = self.t.squared();
        self.amplitude * (t2 / (PI * PI) + 1.0 / PI.powi(4)) * (PI * x).sin()
            - self.c[0] * x * x * x / 6.0
            - self.c[1] * x * x / 2.0
            + self.c[2] * x
            + self.c[3]
    }

    pub fn u_prime(&self, x: f64) -> f64 {
        let t2 = self.t.squared();
        self.amplitude * (t2 / PI + 1.0 / PI.powi(3)) * (PI * x).cos()
            - self.c[0] * x * x / 2.0
            - self.c[1] * x
            + self.c[2]
    }

    pub fn u_second(&self, x: f64) -> f64 {
        let t2 = self.t.squared();
        -self.amplitude * (t2 + 1.0 / (PI * PI)) * (PI * x).sin() - self.c[0] * x - self.c[1]
    }

    pub fn m(&self, x: f64) -> f64 {
        self.amplitude * (PI * x).sin() / (PI * PI) + self.c[0] * x + self.c[1]
    }

    pub fn m_prime(&self, x: f64) -> f64 {
        self.amplitude * (PI * x).cos() / PI + self.c[0]
    }

    pub fn m_second(&self, x: f64) -> f64 {
        -self.amplitude * (PI * x).sin()
    }

    /// Nodal trace vector (u, u', M, M') of the exact solution at the mesh
    /// nodes.
    pub fn nodal_trace(&self, mesh: &Mesh) -> DVector<f64> {
        let mut nodal = DVector::zeros(4 * mesh.num_nodes());
        for (v, &x) in mesh.nodes().iter().enumerate() {
            nodal[4 * v] = self.u(x);
            nodal[4 * v + 1] = self.u_prime(x);
            nodal[4 * v + 2] = self.m(x);
            nodal[4 * v + 3] = self.m_prime(x);
        }
        nodal
    }
}

/// Elementwise L2-orthogonal projection of `g` onto piecewise polynomials of
/// degree `p`, returned as per-element coefficient vectors in the orthonormal
/// trial basis. Exactness is limited by the quadrature rule.
pub fn l2_project(
    g: impl Fn(f64) -> f64,
    mesh: &Mesh,
    p: usize,
    rule: &QuadRule,
) -> Vec<DVector<f64>> {
    let basis = PolyBasis::trial(p);
    mesh.elements()
        .map(|elem| {
            DVector::from_fn(basis.len(), |k, _| {
                rule.integrate(&elem, |x| g(x) * basis.eval(&elem, x, 0).unwrap()[k])
            })
        })
        .collect()
}
