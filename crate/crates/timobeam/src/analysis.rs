//! Error measurement against the exact solution and convergence-rate
//! estimation.

use crate::basis::PolyBasis;
use crate::dpg::DpgSolution;
use crate::error::{Error, Result};
use crate::exact::{l2_project, ExactSolution};
use crate::mesh::Mesh;
use crate::quadrature::QuadRule;
use crate::trace::trace_norm_parts;

/// Extra quadrature points beyond the trial degree for error integrals, so
/// the measured errors are limited by the discretization, not the rule.
pub const ERROR_QUAD_EXTRA: usize = 8;

/// One row of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub n: usize,
    pub dofs: usize,
    pub h: f64,
    /// L2 errors of the discrete fields.
    pub err_u: f64,
    pub err_m: f64,
    /// L2 best-approximation errors (distance to the elementwise projection).
    pub proj_u: f64,
    pub proj_m: f64,
    /// Discrete trace-norm errors of the nodal unknowns.
    pub trace_u: f64,
    pub trace_m: f64,
    /// Residual estimator reported by the solver.
    pub residual: f64,
}

/// Selector for the error columns a rate can be estimated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorField {
    ErrU,
    ErrM,
    ProjU,
    ProjM,
    TraceU,
    TraceM,
    Residual,
}

impl ErrorField {
    pub const ALL: [ErrorField; 7] = [
        ErrorField::ErrU,
        ErrorField::ErrM,
        ErrorField::ProjU,
        ErrorField::ProjM,
        ErrorField::TraceU,
        ErrorField::TraceM,
        ErrorField::Residual,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ErrorField::ErrU => "err_u",
            ErrorField::ErrM => "err_M",
            ErrorField::ProjU => "proj_u",
            ErrorField::ProjM => "proj_M",
            ErrorField::TraceU => "trace_u",
            ErrorField::TraceM => "trace_M",
            ErrorField::Residual => "residual",
        }
    }

    pub fn value(&self, r: &ConvergenceRecord) -> f64 {
        match self {
            ErrorField::ErrU => r.err_u,
            ErrorField::ErrM => r.err_m,
            ErrorField::ProjU => r.proj_u,
            ErrorField::ProjM => r.proj_m,
            ErrorField::TraceU => r.trace_u,
            ErrorField::TraceM => r.trace_m,
            ErrorField::Residual => r.residual,
        }
    }
}

/// L2 errors of the discrete fields and of the elementwise projections:
/// `(err_u, err_m, proj_u, proj_m)`.
pub fn field_errors(
    sol: &DpgSolution,
    exact: &ExactSolution,
    mesh: &Mesh,
    rule: &QuadRule,
) -> (f64, f64, f64, f64) {
    let basis = PolyBasis::trial(sol.degree);
    let pu = l2_project(|x| exact.u(x), mesh, sol.degree, rule);
    let pm = l2_project(|x| exact.m(x), mesh, sol.degree, rule);
    let mut sums = [0.0f64; 4];
    for (j, elem) in mesh.elements().enumerate() {
        let sq = |coeffs: &[f64], g: &dyn Fn(f64) -> f64| {
            rule.integrate(&elem, |x| {
                let d = g(x) - basis.eval_combination(&elem, coeffs, x, 0).unwrap();
                d * d
            })
        };
        sums[0] += sq(sol.u_coeffs[j].as_slice(), &|x| exact.u(x));
        sums[1] += sq(sol.m_coeffs[j].as_slice(), &|x| exact.m(x));
        sums[2] += sq(pu[j].as_slice(), &|x| exact.u(x));
        sums[3] += sq(pm[j].as_slice(), &|x| exact.m(x));
    }
    (
        sums[0].sqrt(),
        sums[1].sqrt(),
        sums[2].sqrt(),
        sums[3].sqrt(),
    )
}

/// All error measures of a solved level, bundled as one study record.
pub fn compute_errors(
    sol: &DpgSolution,
    exact: &ExactSolution,
    mesh: &Mesh,
    level: usize,
) -> ConvergenceRecord {
    let rule = QuadRule::gauss_legendre(sol.degree + ERROR_QUAD_EXTRA);
    let (err_u, err_m, proj_u, proj_m) = field_errors(sol, exact, mesh, &rule);
    let diff = exact.nodal_trace(mesh) - &sol.trace.nodal;
    let (trace_u, trace_m) = trace_norm_parts(mesh, &diff);
    ConvergenceRecord {
        level,
        n: mesh.num_elements(),
        dofs: sol.num_dofs(),
        h: mesh.max_h(),
        err_u,
        err_m,
        proj_u,
        proj_m,
        trace_u,
        trace_m,
        residual: sol.residual,
    }
}

/// Outcome of a rate fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateEstimate {
    /// Least-squares slope of `log error` against `log h`.
    Slope(f64),
    /// Some level hit exactly zero error, so the data carries no rate.
    Exact,
}

/// Least-squares convergence rate of one error field over a study.
pub fn estimate_rate(records: &[ConvergenceRecord], field: ErrorField) -> Result<RateEstimate> {
    if records.len() < 2 {
        return Err(Error::NotEnoughRecords);
    }
    if records.iter().any(|r| field.value(r) == 0.0) {
        return Ok(RateEstimate::Exact);
    }
    let lx: Vec<f64> = records.iter().map(|r| r.h.ln()).collect();
    let ly: Vec<f64> = records.iter().map(|r| field.value(r).ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::NotEnoughRecords);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(RateEstimate::Slope(sxy / sxx))
}
