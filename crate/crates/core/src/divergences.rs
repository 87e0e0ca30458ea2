//! Spectral evaluation of quantum relative entropies and their Rényi
//! variants, all in bits.
//!
//! Limits of the form `σ + εI, ε → 0⁺` are taken exactly by restricting to
//! the support of `σ`. When the limit only sees `σ^{+p}` the restriction is
//! the compression of `ρ`; when it sees `σ^{-p}` and `α < 1` it is the Schur
//! complement of `ρ` onto that support (the short of `ρ`).

use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianEigen, SUPPORT_TOL};
use crate::sdp::{self, AffineMatrixExpr, LinearMap, SdpProblem, SdpSolution, VarId};

/// Relative size of the part of `ρ` outside `supp(σ)` that still counts as
/// inside.
pub const SUPPORT_LEAK_TOL: f64 = 1e-8;
/// Slack on "is a state" checks.
const STATE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    RelativeEntropy,
    Sandwiched,
    Geometric,
    BelavkinStaszewski,
    HypothesisTesting,
    Max,
}

/// A divergence in bits; `value == None` is `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceValue {
    pub kind: DivergenceKind,
    #[serde(serialize_with = "ser_bits")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

fn ser_bits<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("inf"),
    }
}

impl DivergenceValue {
    fn new(kind: DivergenceKind, value: Option<f64>) -> Self {
        DivergenceValue { kind, value, alpha: None, epsilon: None }
    }

    fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }

    pub fn finite(&self) -> Option<f64> {
        self.value
    }

    /// `f64::INFINITY` for the infinite case; for comparisons only.
    pub fn as_f64(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    /// Finite value or a [`Error::SupportViolation`].
    pub fn require_finite(&self) -> Result<f64> {
        self.value.ok_or_else(|| Error::SupportViolation(format!("{:?} divergence is infinite", self.kind)))
    }
}

impl fmt::Display for DivergenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v:.10e}"),
            None => write!(f, "inf"),
        }
    }
}

fn check_psd(m: &ComplexMatrix, what: &str) -> Result<HermitianEigen> {
    let e = m.eig_hermitian()?;
    let scale = e.spectral_radius().max(1.0);
    if e.values.first().is_some_and(|&v| v < -STATE_TOL * scale) {
        return Err(Error::InvalidParameter(format!("{what} is not positive semidefinite (λ_min = {:.3e})", e.values[0])));
    }
    Ok(e)
}

fn check_pair(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<(HermitianEigen, HermitianEigen)> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok((check_psd(rho, "ρ")?, check_psd(sigma, "σ")?))
}

/// `ρ` seen from the support of `σ`, in `σ`'s eigenbasis.
struct OnSupport {
    /// Positive eigenvalues of `σ`.
    s: Vec<f64>,
    /// `V†ρV`
    compressed: ComplexMatrix,
    /// `ρ₁₁ − ρ₁₂ ρ₂₂⁺ ρ₂₁`
    shorted: ComplexMatrix,
    contained: bool,
}

fn on_support(rho: &ComplexMatrix, rho_eig: &HermitianEigen, sigma_eig: &HermitianEigen) -> OnSupport {
    let n = rho.dim();
    let thr = sigma_eig.support_threshold(SUPPORT_TOL);
    let inside: Vec<usize> = (0..n).filter(|&k| sigma_eig.values[k] > thr).collect();
    let outside: Vec<usize> = (0..n).filter(|&k| sigma_eig.values[k] <= thr).collect();
    let u = sigma_eig.vectors.as_dmatrix();
    let cols = |idx: &[usize]| DMatrix::from_fn(n, idx.len(), |i, j| u[(i, idx[j])]);
    let (v, w) = (cols(&inside), cols(&outside));
    let r = rho.as_dmatrix();
    let r11 = v.adjoint() * r * &v;
    let r12 = v.adjoint() * r * &w;
    let r22 = w.adjoint() * r * &w;
    let rho_norm = rho_eig.spectral_radius();
    let compressed = ComplexMatrix::from_dmatrix(r11.clone()).expect("square").hermitian_part();
    let r22h = ComplexMatrix::from_dmatrix(r22).expect("square").hermitian_part();
    let e22 = r22h.eig_hermitian().expect("hermitian by construction");
    let leak = e22.spectral_radius();
    let contained = leak <= SUPPORT_LEAK_TOL * rho_norm.max(f64::MIN_POSITIVE);
    let shorted = if contained || inside.is_empty() {
        compressed.clone()
    } else {
        let cut = SUPPORT_TOL * rho_norm;
        let w22: Vec<f64> = e22.values.iter().map(|&x| if x > cut { 1.0 / x } else { 0.0 }).collect();
        let pinv = e22.reconstruct_with(&w22);
        let corr = &r12 * pinv.as_dmatrix() * r12.adjoint();
        ComplexMatrix::from_dmatrix(r11 - corr).expect("square").hermitian_part()
    };
    OnSupport { s: inside.iter().map(|&k| sigma_eig.values[k]).collect(), compressed, shorted, contained }
}

/// `diag(a) · m · diag(a)`
fn diag_sandwich(m: &ComplexMatrix, a: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.dim(), |i, j| m[(i, j)] * (a[i] * a[j]))
}

/// `Σ_k x_k^α` over the positive spectrum.
fn trace_power(m: &ComplexMatrix, alpha: f64) -> Result<f64> {
    let e = m.eig_hermitian()?;
    let thr = e.support_threshold(SUPPORT_TOL);
    Ok(e.values.iter().filter(|&&x| x > thr).map(|x| x.powf(alpha)).sum())
}

fn renyi_from_q(kind: DivergenceKind, q: f64, alpha: f64) -> DivergenceValue {
    let v = if q > 0.0 { Some(q.log2() / (alpha - 1.0)) } else { None };
    DivergenceValue::new(kind, v).with_alpha(alpha)
}

/// Umegaki relative entropy `Tr[ρ(log₂ρ − log₂σ)]`.
pub fn rel_ent(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<DivergenceValue> {
    let (re, se) = check_pair(rho, sigma)?;
    let sup = on_support(rho, &re, &se);
    if !sup.contained {
        return Ok(DivergenceValue::new(DivergenceKind::RelativeEntropy, None));
    }
    let thr = re.support_threshold(SUPPORT_TOL);
    let neg_entropy: f64 = re.values.iter().filter(|&&x| x > thr).map(|x| x * x.log2()).sum();
    let cross: f64 = sup.s.iter().enumerate().map(|(k, s)| sup.compressed[(k, k)].re * s.log2()).sum();
    Ok(DivergenceValue::new(DivergenceKind::RelativeEntropy, Some(neg_entropy - cross)))
}

/// Sandwiched Rényi relative entropy, `α ∈ [1/2, 1) ∪ (1, ∞)`.
pub fn sandwiched_renyi(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<DivergenceValue> {
    if !(alpha >= 0.5 && alpha != 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("sandwiched Rényi order {alpha} outside [1/2,1)∪(1,∞)")));
    }
    let (re, se) = check_pair(rho, sigma)?;
    let sup = on_support(rho, &re, &se);
    if alpha > 1.0 && !sup.contained {
        return Ok(DivergenceValue::new(DivergenceKind::Sandwiched, None).with_alpha(alpha));
    }
    let p = (1.0 - alpha) / (2.0 * alpha);
    let sp: Vec<f64> = sup.s.iter().map(|s| s.powf(p)).collect();
    let q = trace_power(&diag_sandwich(&sup.compressed, &sp), alpha)?;
    Ok(renyi_from_q(DivergenceKind::Sandwiched, q, alpha))
}

/// `(σ^{-1/2} ρ̃ σ^{-1/2}, s)` on the support, with `ρ̃` the appropriate
/// restriction for order `alpha`.
fn geometric_core(sup: &OnSupport, alpha: f64) -> ComplexMatrix {
    let inv_sqrt: Vec<f64> = sup.s.iter().map(|s| 1.0 / s.sqrt()).collect();
    let r = if alpha < 1.0 { &sup.shorted } else { &sup.compressed };
    diag_sandwich(r, &inv_sqrt)
}

/// `Tr[σ f(σ^{-1/2} ρ σ^{-1/2})]` on the support.
fn sigma_weighted(sup: &OnSupport, m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<f64> {
    let fm = linalg::mat_fn(m, f, SUPPORT_TOL)?;
    Ok(sup.s.iter().enumerate().map(|(k, s)| s * fm[(k, k)].re).sum())
}

/// Geometric Rényi relative entropy, `α ∈ (0, 1) ∪ (1, 2]`.
pub fn geo_renyi(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<DivergenceValue> {
    if !(alpha > 0.0 && alpha != 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidParameter(format!("geometric Rényi order {alpha} outside (0,1)∪(1,2]")));
    }
    geo_renyi_any(rho, sigma, alpha)
}

/// [`geo_renyi`] without the data-processing range restriction on `α`.
pub fn geo_renyi_any(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<DivergenceValue> {
    if !(alpha > 0.0 && alpha != 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("geometric Rényi order {alpha} must be positive and ≠ 1")));
    }
    let (re, se) = check_pair(rho, sigma)?;
    let sup = on_support(rho, &re, &se);
    if alpha > 1.0 && !sup.contained {
        return Ok(DivergenceValue::new(DivergenceKind::Geometric, None).with_alpha(alpha));
    }
    if sup.s.is_empty() {
        return Ok(renyi_from_q(DivergenceKind::Geometric, 0.0, alpha));
    }
    let m = geometric_core(&sup, alpha);
    let q = sigma_weighted(&sup, &m, |x| if x > 0.0 { x.powf(alpha) } else { 0.0 })?;
    Ok(renyi_from_q(DivergenceKind::Geometric, q, alpha))
}

/// Belavkin–Staszewski relative entropy `Tr[ρ log₂(ρ^{1/2} σ^{-1} ρ^{1/2})]`.
pub fn bs_rel_ent(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<DivergenceValue> {
    let (re, se) = check_pair(rho, sigma)?;
    let sup = on_support(rho, &re, &se);
    if !sup.contained {
        return Ok(DivergenceValue::new(DivergenceKind::BelavkinStaszewski, None));
    }
    let sqrt_rho = re.apply(|x| x.max(0.0).sqrt(), SUPPORT_TOL)?;
    let sigma_pinv = se.apply(|x| 1.0 / x, SUPPORT_TOL)?;
    let inner = sigma_pinv.congruence(&sqrt_rho);
    let log_inner = linalg::mat_fn(&inner, |x| if x > 0.0 { x.log2() } else { f64::NAN }, SUPPORT_TOL)?;
    Ok(DivergenceValue::new(DivergenceKind::BelavkinStaszewski, Some(rho.inner_re(&log_inner))))
}

/// Max-relative entropy `log₂ min{λ : ρ ⪯ λσ}`.
pub fn max_rel_ent(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<DivergenceValue> {
    let (re, se) = check_pair(rho, sigma)?;
    let sup = on_support(rho, &re, &se);
    if !sup.contained {
        return Ok(DivergenceValue::new(DivergenceKind::Max, None));
    }
    let m = geometric_core(&sup, 2.0);
    let lmax = m.max_eigenvalue()?;
    let v = if lmax > 0.0 { Some(lmax.log2()) } else { None };
    Ok(DivergenceValue::new(DivergenceKind::Max, v))
}

/// `υ̂(ρ,σ) = 2^{D̂_{3/2}/2} + 2^{−D̂_{1/2}/2} + 1`; requires `supp ρ ⊆ supp σ`.
pub fn nu_hat(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let (re, se) = check_pair(rho, sigma)?;
    if !on_support(rho, &re, &se).contained {
        return Err(Error::SupportViolation("υ̂ needs supp(ρ) ⊆ supp(σ)".into()));
    }
    let d32 = geo_renyi(rho, sigma, 1.5)?.require_finite()?;
    let d12 = geo_renyi(rho, sigma, 0.5)?.require_finite()?;
    Ok((0.5 * d32).exp2() + (-0.5 * d12).exp2() + 1.0)
}

/// The test SDP `min Tr[Λσ]` s.t. `Tr[Λρ] ≥ 1 − ε`, `0 ⪯ Λ ⪯ I`.
pub fn hypothesis_testing_problem(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    epsilon: f64,
) -> Result<(SdpProblem, VarId)> {
    let n = rho.dim();
    let mut p = SdpProblem::new();
    let lam = p.hermitian("Lambda", n);
    p.add_psd("Lambda", lam.into())?;
    p.add_psd("I-Lambda", AffineMatrixExpr::constant(&ComplexMatrix::identity(n)).sub(lam.into())?)?;
    let type_one = AffineMatrixExpr::var(lam)
        .map(LinearMap::InnerProduct(rho.clone()))?
        .sub(AffineMatrixExpr::constant(&ComplexMatrix::from_diag(&[1.0 - epsilon])))?;
    p.add_psd("type-I", type_one)?;
    p.minimize_term(lam, sigma.clone())?;
    Ok((p, lam))
}

/// Outcome of [`hypothesis_testing_detailed`]; `solve` is present only when
/// an SDP was actually solved.
#[derive(Clone, Debug)]
pub struct HypothesisTest {
    pub value: DivergenceValue,
    /// Optimal type-II error `Tr[Λσ]`.
    pub optimum: f64,
    pub solve: Option<(SdpProblem, SdpSolution)>,
}

/// Hypothesis-testing relative entropy `−log₂ min Tr[Λσ]`, in the convention
/// where `D_H^ε(ρ‖ρ) = −log₂(1 − ε)`.
pub fn hypothesis_testing(rho: &ComplexMatrix, sigma: &ComplexMatrix, epsilon: f64) -> Result<DivergenceValue> {
    Ok(hypothesis_testing_detailed(rho, sigma, epsilon)?.value)
}

pub fn hypothesis_testing_detailed(rho: &ComplexMatrix, sigma: &ComplexMatrix, epsilon: f64) -> Result<HypothesisTest> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside [0,1]")));
    }
    let (re, _) = check_pair(rho, sigma)?;
    if (rho.tr() - 1.0).abs() > STATE_TOL {
        return Err(Error::Precondition(format!("ρ must have unit trace, got {}", rho.tr())));
    }
    let mk = |value: Option<f64>, optimum: f64, solve| HypothesisTest {
        value: DivergenceValue { kind: DivergenceKind::HypothesisTesting, value, alpha: None, epsilon: Some(epsilon) },
        optimum,
        solve,
    };
    // Λ = Π_{ker σ} already meets the type-I constraint when ρ leaks enough.
    let ker_sigma = &ComplexMatrix::identity(rho.dim()) - &linalg::support_projector(sigma, SUPPORT_TOL)?;
    if epsilon == 1.0 || rho.inner_re(&ker_sigma) >= 1.0 - epsilon - STATE_TOL {
        return Ok(mk(None, 0.0, None));
    }
    if epsilon == 0.0 {
        // Tr[Λρ] = 1 with Λ ⪯ I forces Λ = Π_ρ + Λ'' with Λ'' on ker ρ, and
        // Λ'' = 0 is optimal.
        let pi_rho = re.apply(|_| 1.0, SUPPORT_TOL)?;
        let opt = sigma.inner_re(&pi_rho);
        return Ok(mk(Some(-opt.log2()), opt, None));
    }
    let (p, _) = hypothesis_testing_problem(rho, sigma, epsilon)?;
    let sol = sdp::solve_checked(&p, "hypothesis testing")?;
    let opt = sol.primal_value;
    if opt <= 0.0 {
        return Err(Error::SolverFailure {
            status: format!("{:?}", sol.status),
            detail: format!("non-positive type-II error {opt:.3e}"),
        });
    }
    Ok(mk(Some(-opt.log2()), opt, Some((p, sol))))
}

/// Diagonal real matrix helper used across tests and examples.
pub fn diag_state(p: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diag(p)
}
