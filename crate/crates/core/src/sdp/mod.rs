//! Hermitian semidefinite programs: modelling, realification, solving and
//! certification.

pub mod certify;
pub mod conic;
pub mod ir;
pub mod realify;

use std::collections::BTreeMap;

use serde::Serialize;

pub use certify::{certify, CertifyReport, CertifyTolerances};
pub use ir::{AffineMatrixExpr, LinearMap, SdpProblem, VarId};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use conic::{solve_conic, ConicOptions, ConicStatus};

/// Environment variable overriding the relative duality-gap tolerance.
pub const SOLVER_TOL_ENV: &str = "CAPBOUND_SOLVER_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unbounded,
    SolverError,
}

impl SolveStatus {
    pub fn is_solved(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl SolveOptions {
    pub fn strict() -> Self {
        SolveOptions { feas_tol: 1e-9, gap_tol: 1e-9, max_iter: 100 }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        let mut o = Self::strict();
        if let Some(t) = std::env::var(SOLVER_TOL_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if t.is_finite() && t > 0.0 {
                o.gap_tol = t;
            }
        }
        o
    }
}

/// Real dual multipliers of the realified problem.
#[derive(Clone, Debug, Default)]
pub struct DualVectors {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Variable values by name.
    pub assignments: BTreeMap<String, ComplexMatrix>,
    /// Variable values by declaration order.
    pub values: Vec<ComplexMatrix>,
    pub max_feas_residual: f64,
    /// `|primal − dual| / max(1, |primal|)`
    pub gap: f64,
    pub iterations: usize,
    pub dual: DualVectors,
}

impl SdpSolution {
    pub fn value(&self, v: VarId) -> &ComplexMatrix {
        &self.values[v.index()]
    }

    /// Scalar variable value.
    pub fn scalar(&self, v: VarId) -> f64 {
        self.values[v.index()][(0, 0)].re
    }

    /// Replaces the value of a variable (keeps both views in sync).
    pub fn set_value(&mut self, p: &SdpProblem, v: VarId, m: ComplexMatrix) {
        self.assignments.insert(p.variables[v.index()].name.clone(), m.clone());
        self.values[v.index()] = m;
    }

    fn unsolved(p: &SdpProblem, status: SolveStatus, iterations: usize) -> Self {
        let values = p.zero_assignment();
        SdpSolution {
            status,
            primal_value: f64::NAN,
            dual_value: f64::NAN,
            assignments: named(p, &values),
            values,
            max_feas_residual: f64::INFINITY,
            gap: f64::INFINITY,
            iterations,
            dual: DualVectors::default(),
        }
    }
}

fn named(p: &SdpProblem, values: &[ComplexMatrix]) -> BTreeMap<String, ComplexMatrix> {
    p.variables.iter().zip(values).map(|(v, m)| (v.name.clone(), m.clone())).collect()
}

pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &SolveOptions::default())
}

pub fn solve_with(p: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    let rp = realify::realify(p)?;
    if rp.eq_inconsistency > realify::inconsistency_tol() {
        return Ok(SdpSolution::unsolved(p, SolveStatus::Infeasible, 0));
    }
    let copts = ConicOptions {
        feas_tol: opts.feas_tol,
        gap_tol: opts.gap_tol,
        max_iter: opts.max_iter,
        ..ConicOptions::default()
    };
    let sol = solve_conic(&rp.conic, &copts);
    let status = match sol.status {
        ConicStatus::Optimal => SolveStatus::Optimal,
        ConicStatus::NearOptimal => SolveStatus::NearOptimal,
        ConicStatus::Infeasible => SolveStatus::Infeasible,
        ConicStatus::Unbounded => SolveStatus::Unbounded,
        ConicStatus::Failed => SolveStatus::SolverError,
    };
    if !status.is_solved() {
        return Ok(SdpSolution::unsolved(p, status, sol.iterations));
    }
    let values = rp.assignments(p, &sol.x);
    let primal_value = sol.primal_value + rp.objective_constant;
    let dual_value = sol.dual_value + rp.objective_constant;
    let residuals = certify::constraint_residuals(p, &values)?;
    Ok(SdpSolution {
        status,
        primal_value,
        dual_value,
        assignments: named(p, &values),
        values,
        max_feas_residual: residuals.worst(),
        gap: (primal_value - dual_value).abs() / primal_value.abs().max(1.0),
        iterations: sol.iterations,
        dual: DualVectors { y: sol.y, z: sol.z },
    })
}

/// Solves and insists on a usable answer.
pub fn solve_checked(p: &SdpProblem, what: &str) -> Result<SdpSolution> {
    let sol = solve(p)?;
    if !sol.status.is_solved() {
        return Err(Error::SolverFailure { status: format!("{:?}", sol.status), detail: what.to_string() });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::random::{random_state, seeded};

    #[test]
    fn eigenvalue_epigraph() {
        let mut p = SdpProblem::new();
        let t = p.scalar("t");
        let d = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let expr = AffineMatrixExpr::var(t)
            .map(LinearMap::KronLeft(ComplexMatrix::identity(2)))
            .unwrap()
            .sub(AffineMatrixExpr::constant(&d))
            .unwrap();
        p.add_psd("epigraph", expr).unwrap();
        p.minimize_scalar(t).unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_value - 2.0).abs() < 1e-8);
        assert!((sol.scalar(t) - 2.0).abs() < 1e-7);
    }

    #[test]
    fn trace_of_dominating_operator() {
        let mut rng = seeded(3);
        for d in [2, 3] {
            let rho = random_state(d, &mut rng);
            let mut p = SdpProblem::new();
            let s = p.hermitian("S", d);
            p.add_psd("S-rho", AffineMatrixExpr::var(s).sub(AffineMatrixExpr::constant(&rho)).unwrap()).unwrap();
            p.minimize_trace(s).unwrap();
            let sol = solve(&p).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            assert!((sol.primal_value - 1.0).abs() < 1e-8);
            assert!(sol.primal_value >= sol.dual_value - 1e-7);
            assert!(certify(&p, &sol, &CertifyTolerances::default()).unwrap().passed);
        }
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let mut p = SdpProblem::new();
        let t = p.scalar("t");
        let one = ComplexMatrix::identity(1);
        p.add_eq("a", AffineMatrixExpr::var(t).sub(AffineMatrixExpr::constant(&one)).unwrap()).unwrap();
        p.add_eq("b", AffineMatrixExpr::var(t).sub(AffineMatrixExpr::constant(&one.scale(2.0))).unwrap()).unwrap();
        p.minimize_scalar(t).unwrap();
        assert_eq!(solve(&p).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_and_infeasible_statuses() {
        let mut p = SdpProblem::new();
        let t = p.scalar("t");
        p.minimize_scalar(t).unwrap();
        p.add_psd("upper", AffineMatrixExpr::constant(&ComplexMatrix::identity(1)).sub(t.into()).unwrap()).unwrap();
        assert_eq!(solve(&p).unwrap().status, SolveStatus::Unbounded);

        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 2);
        p.add_psd("X", x.into()).unwrap();
        p.add_eq("trace", AffineMatrixExpr::var(x).map(LinearMap::InnerProduct(ComplexMatrix::identity(2))).unwrap()
            .plus_constant(&ComplexMatrix::identity(1)).unwrap()).unwrap();
        p.minimize_trace(x).unwrap();
        assert_eq!(solve(&p).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn solve_is_deterministic() {
        let mut rng = seeded(8);
        let rho = random_state(3, &mut rng);
        let build = || {
            let mut p = SdpProblem::new();
            let s = p.hermitian("S", 3);
            p.add_psd("S", s.into()).unwrap();
            p.add_psd("S-rho", AffineMatrixExpr::var(s).sub(AffineMatrixExpr::constant(&rho.scale(2.0))).unwrap())
                .unwrap();
            p.minimize_term(s, rho.clone()).unwrap();
            p
        };
        let a = solve(&build()).unwrap();
        let b = solve(&build()).unwrap();
        assert_eq!(a.primal_value.to_bits(), b.primal_value.to_bits());
    }
}
