//! Partitions of the unit interval.

use crate::error::{Error, Result};

/// A single closed element `[a, b]` of a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element {
    pub a: f64,
    pub b: f64,
}

impl Element {
    /// Element length.
    pub fn h(&self) -> f64 {
        self.b - self.a
    }

    /// Midpoint of the element.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Whether `x` lies in the closed element, with a slack of a few ulps so
    /// that mapped quadrature points and endpoint evaluations never fail.
    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.h());
        x >= self.a - tol && x <= self.b + tol
    }
}

/// An ordered partition `0 = x_0 < x_1 < ... < x_n = 1` of the unit interval.
///
/// Node positions are the single source of truth; elements and their sizes
/// are derived views.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh with `n` elements.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("element count must be positive".into()));
        }
        let nodes = (0..=n).map(|j| j as f64 / n as f64).collect();
        Ok(Mesh { nodes })
    }

    /// Mesh from an explicit strictly increasing node list spanning `[0, 1]`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidMesh("nodes must span [0, 1]".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMesh(
                "nodes must be strictly increasing".into(),
            ));
        }
        Ok(Mesh { nodes })
    }

    /// New mesh with every element split at its midpoint.
    pub fn refine_uniform(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        Mesh { nodes }
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// The `j`-th element `[x_j, x_{j+1}]`.
    pub fn element(&self, j: usize) -> Element {
        Element {
            a: self.nodes[j],
            b: self.nodes[j + 1],
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.nodes.windows(2).map(|w| Element { a: w[0], b: w[1] })
    }

    /// Largest element size.
    pub fn max_h(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_nodes() {
        let m = Mesh::uniform(1).unwrap();
        assert_eq!(m.nodes(), &[0.0, 1.0]);
        let m = Mesh::uniform(2).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.5, 1.0]);
        let m = Mesh::uniform(4).unwrap();
        assert_eq!(m.num_elements(), 4);
        for e in m.elements() {
            assert_relative_eq!(e.h(), 0.25, max_relative = 1e-15);
        }
    }

    #[test]
    fn uniform_rejects_zero_elements() {
        assert!(matches!(Mesh::uniform(0), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn from_nodes_validates() {
        assert!(Mesh::from_nodes(vec![0.0, 0.4, 1.0]).is_ok());
        assert!(Mesh::from_nodes(vec![0.0]).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.9]).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Mesh::from_nodes(vec![0.1, 0.5, 1.0]).is_err());
    }

    #[test]
    fn refinement_splits_midpoints() {
        let m = Mesh::from_nodes(vec![0.0, 1.0]).unwrap().refine_uniform();
        assert_eq!(m.nodes(), &[0.0, 0.5, 1.0]);
        let m = m.refine_uniform();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);

        let m = Mesh::from_nodes(vec![0.0, 0.4, 1.0])
            .unwrap()
            .refine_uniform();
        assert_eq!(m.nodes(), &[0.0, 0.2, 0.4, 0.7, 1.0]);
    }

    #[test]
    fn refinement_halves_max_h() {
        // Dyadic meshes halve exactly; others only up to rounding.
        let m = Mesh::uniform(4).unwrap();
        assert_eq!(m.refine_uniform().max_h(), 0.5 * m.max_h());
        let m = Mesh::uniform(5).unwrap();
        assert_relative_eq!(m.refine_uniform().max_h(), 0.1, max_relative = 1e-14);
    }

    #[test]
    fn element_contains_endpoints() {
        let e = Element { a: 0.25, b: 0.5 };
        assert!(e.contains(0.25));
        assert!(e.contains(0.5));
        assert!(e.contains(0.3));
        assert!(!e.contains(0.2));
        assert!(!e.contains(0.51));
        assert_relative_eq!(e.midpoint(), 0.375);
    }
}
