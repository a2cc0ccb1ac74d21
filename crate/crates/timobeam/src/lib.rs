//! Locking-free DPG solver for the scaled Timoshenko beam bending model on
//! the unit interval.
//!
//! The model couples the transverse deflection `u` and the bending moment `M`
//! through `-M'' = f` and `M - t^2 M'' + u'' = 0`, where the thickness
//! parameter `t` ranges over `[0, 1]`; `t = 0` is the Euler-Bernoulli limit.
//! The discretization is an ultraweak Petrov-Galerkin method: field unknowns
//! are discontinuous piecewise polynomials, interelement continuity is carried
//! by nodal trace unknowns, and optimal test functions are realized implicitly
//! by solving element-local normal equations in a broken `H^2 x H^2` test
//! space. Accuracy is uniform in `t`, so thin-beam locking does not occur.

pub mod analysis;
pub mod band;
pub mod basis;
pub mod dpg;
pub mod error;
pub mod exact;
pub mod mesh;
pub mod quadrature;
pub mod trace;

pub use analysis::{compute_errors, estimate_rate, ConvergenceRecord, ErrorField, RateEstimate};
pub use band::{BandCholesky, SymBandMatrix};
pub use basis::{BasisKind, PolyBasis};
pub use dpg::{assemble_and_solve, DpgSolution, DpgSystem, ElementSystem};
pub use error::{Error, Result};
pub use exact::{l2_project, ExactSolution};
pub use mesh::{Element, Mesh};
pub use quadrature::QuadRule;
pub use trace::{
    trace_norm, trace_norm_parts, BoundaryCondition, EndCondition, Thickness, TraceDofMap,
    TraceVector,
};
