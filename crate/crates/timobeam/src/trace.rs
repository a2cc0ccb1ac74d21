//! Trace unknowns at mesh nodes: boundary-condition elimination, the duality
//! pairing with broken test functions, and the discrete trace norm.
//!
//! Each node carries four nodal components, ordered (u, u', M, M'). Essential
//! boundary conditions remove or couple components at the two end nodes, so
//! the constrained trace space always has dimension `4 n` on an `n`-element
//! mesh. The coupling at a clamped end ties the deflection derivative to the
//! moment derivative through the squared thickness.

use crate::basis::PolyBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use nalgebra::{DVector, Matrix4};
use std::fmt;
use std::str::FromStr;

/// Number of nodal trace components per node.
pub const NODE_COMPS: usize = 4;

/// Condition imposed at one end of the beam.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndCondition {
    /// `u = 0` and `u' - t^2 M' = 0`.
    Clamped,
    /// `u = 0` and `M = 0`.
    Supported,
    /// `M = 0` and `M' = 0`.
    Free,
}

/// Supported combinations of end conditions, named left-to-right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    ClampedClamped,
    ClampedSupported,
    ClampedFree,
    SupportedSupported,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 4] = [
        BoundaryCondition::ClampedClamped,
        BoundaryCondition::ClampedSupported,
        BoundaryCondition::ClampedFree,
        BoundaryCondition::SupportedSupported,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            BoundaryCondition::ClampedClamped => "cc",
            BoundaryCondition::ClampedSupported => "cs",
            BoundaryCondition::ClampedFree => "cf",
            BoundaryCondition::SupportedSupported => "ss",
        }
    }

    pub fn left(&self) -> EndCondition {
        match self {
            BoundaryCondition::SupportedSupported => EndCondition::Supported,
            _ => EndCondition::Clamped,
        }
    }

    pub fn right(&self) -> EndCondition {
        match self {
            BoundaryCondition::ClampedClamped => EndCondition::Clamped,
            BoundaryCondition::ClampedSupported | BoundaryCondition::SupportedSupported => {
                EndCondition::Supported
            }
            BoundaryCondition::ClampedFree => EndCondition::Free,
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cc" => Ok(BoundaryCondition::ClampedClamped),
            "cs" => Ok(BoundaryCondition::ClampedSupported),
            "cf" => Ok(BoundaryCondition::ClampedFree),
            "ss" => Ok(BoundaryCondition::SupportedSupported),
            other => Err(Error::UnknownBoundaryCondition(other.to_string())),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Thickness parameter, restricted to `[0, 1]`. Zero selects the
/// Euler-Bernoulli limit.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Thickness(f64);

impl Thickness {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidThickness(t));
        }
        Ok(Thickness(t))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn squared(&self) -> f64 {
        self.0 * self.0
    }
}

impl fmt::Display for Thickness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Map from the `4 (n + 1)` nodal trace components to the `4 n` free
/// coefficients after boundary-condition elimination.
///
/// Each nodal component expands as a short linear combination of free
/// coefficients; the combination is empty for components pinned to zero. All
/// couplings are node-local.
#[derive(Clone, Debug)]
pub struct TraceDofMap {
    bc: BoundaryCondition,
    t: Thickness,
    num_elements: usize,
    rows: Vec<Vec<(usize, f64)>>,
    free_offset: Vec<usize>,
}

impl TraceDofMap {
    pub fn build(mesh: &Mesh, bc: BoundaryCondition, t: Thickness) -> Self {
        let n = mesh.num_elements();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(NODE_COMPS * (n + 1));
        let mut free_offset = Vec::with_capacity(n + 2);
        let mut next_free = 0;
        for node in 0..=n {
            free_offset.push(next_free);
            let end = if node == 0 {
                Some(bc.left())
            } else if node == n {
                Some(bc.right())
            } else {
                None
            };
            // Rows for the components (u, u', M, M') of this node.
            match end {
                None => {
                    for k in 0..NODE_COMPS {
                        rows.push(vec![(next_free + k, 1.0)]);
                    }
                    next_free += 4;
                }
                Some(EndCondition::Clamped) => {
                    // Free coefficients: (M, M'); u is pinned and u' couples
                    // to M' through t^2, vanishing in the thin limit.
                    rows.push(vec![]);
                    if t.squared() > 0.0 {
                        rows.push(vec![(next_free + 1, t.squared())]);
                    } else {
                        rows.push(vec![]);
                    }
                    rows.push(vec![(next_free, 1.0)]);
                    rows.push(vec![(next_free + 1, 1.0)]);
                    next_free += 2;
                }
                Some(EndCondition::Supported) => {
                    // Free coefficients: (u', M').
                    rows.push(vec![]);
                    rows.push(vec![(next_free, 1.0)]);
                    rows.push(vec![]);
                    rows.push(vec![(next_free + 1, 1.0)]);
                    next_free += 2;
                }
                Some(EndCondition::Free) => {
                    // Free coefficients: (u, u').
                    rows.push(vec![(next_free, 1.0)]);
                    rows.push(vec![(next_free + 1, 1.0)]);
                    rows.push(vec![]);
                    rows.push(vec![]);
                    next_free += 2;
                }
            }
        }
        free_offset.push(next_free);
        debug_assert_eq!(next_free, 4 * n);
        TraceDofMap {
            bc,
            t,
            num_elements: n,
            rows,
            free_offset,
        }
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn thickness(&self) -> Thickness {
        self.t
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    /// Dimension of the free trace space, always `4 n`.
    pub fn num_free(&self) -> usize {
        4 * self.num_elements
    }

    /// Number of raw nodal components, `4 (n + 1)`.
    pub fn num_nodal(&self) -> usize {
        NODE_COMPS * (self.num_elements + 1)
    }

    /// Expansion of nodal component `4 * node + comp` in free coefficients.
    pub fn row(&self, nodal: usize) -> &[(usize, f64)] {
        &self.rows[nodal]
    }

    /// First free coefficient owned by `node`.
    pub fn free_offset(&self, node: usize) -> usize {
        self.free_offset[node]
    }

    /// Number of free coefficients owned by `node`.
    pub fn free_count(&self, node: usize) -> usize {
        self.free_offset[node + 1] - self.free_offset[node]
    }

    /// Expand free coefficients to the full nodal vector.
    pub fn expand(&self, free: &DVector<f64>) -> DVector<f64> {
        assert_eq!(free.len(), self.num_free());
        let mut nodal = DVector::zeros(self.num_nodal());
        for (i, row) in self.rows.iter().enumerate() {
            nodal[i] = row.iter().map(|&(j, c)| c * free[j]).sum();
        }
        nodal
    }
}

/// A trace unknown, stored both as free coefficients and as the expanded
/// nodal vector (`nodal = expand(free)` for solver-produced vectors).
#[derive(Clone, Debug)]
pub struct TraceVector {
    pub free: DVector<f64>,
    pub nodal: DVector<f64>,
}

impl TraceVector {
    pub fn from_free(map: &TraceDofMap, free: DVector<f64>) -> Self {
        let nodal = map.expand(&free);
        TraceVector { free, nodal }
    }
}

/// Mass matrix of the cubic Hermite element in the ordering
/// (value-left, value-right, derivative-left, derivative-right).
pub fn hermite_mass(h: f64) -> Matrix4<f64> {
    let s = h / 420.0;
    Matrix4::new(
        156.0 * s,
        54.0 * s,
        22.0 * h * s,
        -13.0 * h * s,
        54.0 * s,
        156.0 * s,
        13.0 * h * s,
        -22.0 * h * s,
        22.0 * h * s,
        13.0 * h * s,
        4.0 * h * h * s,
        -3.0 * h * h * s,
        -13.0 * h * s,
        -22.0 * h * s,
        -3.0 * h * h * s,
        4.0 * h * h * s,
    )
}

/// Second-derivative (bending) stiffness matrix of the cubic Hermite element,
/// same ordering as [`hermite_mass`].
pub fn hermite_stiffness(h: f64) -> Matrix4<f64> {
    let s = 2.0 / (h * h * h);
    Matrix4::new(
        6.0 * s,
        -6.0 * s,
        3.0 * h * s,
        3.0 * h * s,
        -6.0 * s,
        6.0 * s,
        -3.0 * h * s,
        -3.0 * h * s,
        3.0 * h * s,
        -3.0 * h * s,
        2.0 * h * h * s,
        h * h * s,
        3.0 * h * s,
        -3.0 * h * s,
        h * h * s,
        2.0 * h * h * s,
    )
}

/// Contributions of the `u` components and the `M` components to the discrete
/// trace norm of a nodal vector: elementwise quadratic forms with the Hermite
/// mass plus bending stiffness matrix.
pub fn trace_norm_parts(mesh: &Mesh, nodal: &DVector<f64>) -> (f64, f64) {
    assert_eq!(nodal.len(), NODE_COMPS * mesh.num_nodes());
    let mut su = 0.0;
    let mut sm = 0.0;
    for (j, elem) in mesh.elements().enumerate() {
        let norm = hermite_mass(elem.h()) + hermite_stiffness(elem.h());
        let l = NODE_COMPS * j;
        let r = NODE_COMPS * (j + 1);
        let vu = nalgebra::Vector4::new(nodal[l], nodal[r], nodal[l + 1], nodal[r + 1]);
        let vm = nalgebra::Vector4::new(nodal[l + 2], nodal[r + 2], nodal[l + 3], nodal[r + 3]);
        su += vu.dot(&(norm * vu));
        sm += vm.dot(&(norm * vm));
    }
    (su.max(0.0).sqrt(), sm.max(0.0).sqrt())
}

/// Discrete norm of a nodal trace vector.
pub fn trace_norm(mesh: &Mesh, nodal: &DVector<f64>) -> f64 {
    let (su, sm) = trace_norm_parts(mesh, nodal);
    su.hypot(sm)
}

/// Duality pairing of a nodal trace vector with a broken test pair `(z, W)`
/// given by per-element coefficient vectors in `test_basis`.
///
/// The pairing sums, over elements, endpoint products of the trace components
/// against test values and derivatives; the thickness enters through the
/// combinations `z' - t^2 W'` and `u' - t^2 M'`.
pub fn pairing(
    mesh: &Mesh,
    t: Thickness,
    nodal: &DVector<f64>,
    z_coeffs: &[DVector<f64>],
    w_coeffs: &[DVector<f64>],
    test_basis: &PolyBasis,
) -> Result<f64> {
    assert_eq!(nodal.len(), NODE_COMPS * mesh.num_nodes());
    assert_eq!(z_coeffs.len(), mesh.num_elements());
    assert_eq!(w_coeffs.len(), mesh.num_elements());
    let t2 = t.squared();
    let mut total = 0.0;
    for (j, elem) in mesh.elements().enumerate() {
        let z = z_coeffs[j].as_slice();
        let w = w_coeffs[j].as_slice();
        let z_a = test_basis.eval_combination(&elem, z, elem.a, 0)?;
        let zp_a = test_basis.eval_combination(&elem, z, elem.a, 1)?;
        let z_b = test_basis.eval_combination(&elem, z, elem.b, 0)?;
        let zp_b = test_basis.eval_combination(&elem, z, elem.b, 1)?;
        let w_a = test_basis.eval_combination(&elem, w, elem.a, 0)?;
        let wp_a = test_basis.eval_combination(&elem, w, elem.a, 1)?;
        let w_b = test_basis.eval_combination(&elem, w, elem.b, 0)?;
        let wp_b = test_basis.eval_combination(&elem, w, elem.b, 1)?;

        let l = NODE_COMPS * j;
        let r = NODE_COMPS * (j + 1);
        let (u_l, up_l, m_l, mp_l) = (nodal[l], nodal[l + 1], nodal[l + 2], nodal[l + 3]);
        let (u_r, up_r, m_r, mp_r) = (nodal[r], nodal[r + 1], nodal[r + 2], nodal[r + 3]);

        total += -(u_r * wp_b - u_l * wp_a);
        total += mp_r * z_b - mp_l * z_a;
        total += -(m_r * (zp_b - t2 * wp_b) - m_l * (zp_a - t2 * wp_a));
        total += (up_r - t2 * mp_r) * w_b - (up_l - t2 * mp_l) * w_a;
    }
    Ok(total)
}
