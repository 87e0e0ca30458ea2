//! Independent re-evaluation of a returned solution.

use serde::Serialize;

use super::conic::{smat, ConeKind};
use super::ir::{CMat, SdpProblem};
use super::realify::realify;
use super::SdpSolution;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyTolerances {
    /// Relative primal/dual feasibility violation.
    pub feasibility: f64,
    /// `|objective − dual| / max(1, |objective|)`
    pub gap: f64,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        CertifyTolerances { feasibility: 1e-8, gap: 1e-7 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Residuals {
    /// `(constraint, relative negative part of λ_min)`
    pub psd: Vec<(String, f64)>,
    /// `(constraint, relative max-abs entry)`
    pub eq: Vec<(String, f64)>,
}

impl Residuals {
    pub fn worst(&self) -> f64 {
        self.psd.iter().chain(&self.eq).map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn worst_named(&self) -> Option<&(String, f64)> {
        self.psd.iter().chain(&self.eq).max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub passed: bool,
    pub objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal: Residuals,
    pub worst_primal: f64,
    /// Relative violation of stationarity `c + Aᵀy + Gᵀz = 0`.
    pub dual_stationarity: f64,
    /// Relative negative part of the dual cone slack.
    pub dual_cone: f64,
    pub failures: Vec<String>,
}

fn scale_of(terms: &[CMat], constant: Option<&CMat>) -> f64 {
    terms
        .iter()
        .chain(constant)
        .flat_map(|m| m.iter().map(|z| z.norm()))
        .fold(1.0, f64::max)
}

/// Worst constraint violations at `values`, each relative to `max(1, scale)`
/// where `scale` is the largest entry among the evaluated pieces.
pub fn constraint_residuals(p: &SdpProblem, values: &[ComplexMatrix]) -> Result<Residuals> {
    let mut out = Residuals::default();
    let pieces = |expr: &super::ir::AffineMatrixExpr| -> Result<(CMat, f64)> {
        let parts: Vec<CMat> = expr
            .terms()
            .iter()
            .map(|t| super::ir::AffineMatrixExpr::apply_term(t, values[t.var.index()].as_dmatrix()))
            .collect::<Result<_>>()?;
        let scale = scale_of(&parts, expr.constant_part());
        Ok((expr.evaluate(values)?, scale))
    };
    for con in &p.psd {
        let (m, scale) = pieces(&con.expr)?;
        let h = ComplexMatrix::from_dmatrix(m)?.hermitian_part();
        let lmin = h.min_eigenvalue()?;
        out.psd.push((con.name.clone(), (-lmin).max(0.0) / scale));
    }
    for con in &p.eq {
        let (m, scale) = pieces(&con.expr)?;
        let worst = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        out.eq.push((con.name.clone(), worst / scale));
    }
    Ok(out)
}

/// Re-checks primal feasibility and objective on the complex problem, and
/// dual feasibility on the realified problem, then compares the recomputed
/// objectives.
pub fn certify(p: &SdpProblem, s: &SdpSolution, tol: &CertifyTolerances) -> Result<CertifyReport> {
    if !s.status.is_solved() {
        return Err(Error::Precondition(format!("cannot certify a solution with status {:?}", s.status)));
    }
    let values: Vec<ComplexMatrix> = p
        .variables
        .iter()
        .map(|v| {
            s.assignments
                .get(&v.name)
                .cloned()
                .ok_or_else(|| Error::MalformedProblem(format!("no assignment for {}", v.name)))
        })
        .collect::<Result<_>>()?;
    let primal = constraint_residuals(p, &values)?;
    let worst_primal = primal.worst();
    let objective = p.objective_value(&values);

    let rp = realify(p)?;
    let cp = &rp.conic;
    let (y, z) = (&s.dual.y, &s.dual.z);
    if y.len() != cp.a.nrows() || z.len() != cp.cone_dim() {
        return Err(Error::MalformedProblem("dual vectors do not match the problem".into()));
    }
    let mut station = cp.gt_mul(z);
    for (j, st) in station.iter_mut().enumerate() {
        *st += cp.c[j] + (0..cp.a.nrows()).map(|i| cp.a[(i, j)] * y[i]).sum::<f64>();
    }
    let c_scale = cp.c.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let dual_stationarity = station.iter().map(|v| v.abs()).fold(0.0, f64::max) / c_scale;
    let mut dual_cone: f64 = 0.0;
    let mut off = 0;
    let mut hz = 0.0;
    for cone in &cp.cones {
        let len = cone.kind.vec_len();
        let zb = &z[off..off + len];
        let zmax = zb.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let lmin = match cone.kind {
            ConeKind::NonNeg(_) => zb.iter().copied().fold(f64::INFINITY, f64::min),
            ConeKind::Psd(m) => smat(zb, m).symmetric_eigenvalues().min(),
        };
        dual_cone = dual_cone.max((-lmin).max(0.0) / zmax);
        hz += cone.h.iter().zip(zb).map(|(a, b)| a * b).sum::<f64>();
        off += len;
    }
    let by: f64 = cp.b.iter().zip(y).map(|(a, b)| a * b).sum();
    let dual_objective = -by - hz + rp.objective_constant;
    let gap = (objective - dual_objective).abs() / objective.abs().max(1.0);

    let mut failures = Vec::new();
    if let Some((name, r)) = primal.worst_named() {
        if *r > tol.feasibility {
            failures.push(format!("constraint {name} violated by {r:.3e}"));
        }
    }
    if dual_stationarity > tol.feasibility {
        failures.push(format!("dual stationarity residual {dual_stationarity:.3e}"));
    }
    if dual_cone > tol.feasibility {
        failures.push(format!("dual cone violation {dual_cone:.3e}"));
    }
    if !(gap <= tol.gap) {
        failures.push(format!("duality gap {gap:.3e}"));
    }
    Ok(CertifyReport {
        passed: failures.is_empty(),
        objective,
        dual_objective,
        gap,
        primal,
        worst_primal,
        dual_stationarity,
        dual_cone,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gamma_operator;
    use crate::sdp::{solve, AffineMatrixExpr, LinearMap, SolveStatus};
    use num_complex::Complex64;

    fn toy() -> (SdpProblem, super::super::VarId) {
        // max fidelity-type objective: min −Re Tr[Φ X] s.t. 0 ⪯ X ⪯ 1, Tr X = 1
        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 4);
        p.add_psd("X", x.into()).unwrap();
        p.add_psd("1-X", AffineMatrixExpr::constant(&ComplexMatrix::identity(4)).sub(x.into()).unwrap()).unwrap();
        let tr = AffineMatrixExpr::var(x)
            .map(LinearMap::InnerProduct(ComplexMatrix::identity(4)))
            .unwrap()
            .sub(AffineMatrixExpr::constant(&ComplexMatrix::identity(1)))
            .unwrap();
        p.add_eq("trace", tr).unwrap();
        p.minimize_term(x, gamma_operator(2).scale(-0.5)).unwrap();
        (p, x)
    }

    #[test]
    fn toy_problem_certifies() {
        let (p, _) = toy();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_value + 1.0).abs() < 1e-8);
        let rep = certify(&p, &sol, &CertifyTolerances::default()).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!(rep.worst_primal < 1e-9);
        assert!(rep.gap < 1e-9);
    }

    #[test]
    fn perturbation_is_caught() {
        let (p, x) = toy();
        let mut sol = solve(&p).unwrap();
        let mut m = sol.value(x).clone();
        m[(0, 0)] += Complex64::new(1e-3, 0.0);
        sol.set_value(&p, x, m);
        let rep = certify(&p, &sol, &CertifyTolerances::default()).unwrap();
        assert!(!rep.passed);
        assert!(rep.primal.eq[0].1 > 1e-4);
    }

    #[test]
    fn unsolved_is_not_certifiable() {
        let mut p = SdpProblem::new();
        let t = p.scalar("t");
        p.minimize_scalar(t).unwrap();
        p.add_psd("upper", AffineMatrixExpr::constant(&ComplexMatrix::identity(1)).sub(t.into()).unwrap()).unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
        assert!(matches!(certify(&p, &sol, &CertifyTolerances::default()), Err(Error::Precondition(_))));
    }
}
