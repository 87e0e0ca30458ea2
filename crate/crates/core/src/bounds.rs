//! The β measure, the geometric Rényi channel divergence at dyadic orders and
//! the Υ-information, each as a single SDP; plus numeric checks of the
//! comparator-test and error-exponent inequalities.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channels::{apply, ChoiOperator};
use crate::divergences::geo_renyi;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, trace_norm, ComplexMatrix, SystemShape, ONE, SUPPORT_TOL};
use crate::sdp::ir::CMat;
use crate::sdp::{
    certify, solve, AffineMatrixExpr, CertifyReport, CertifyTolerances, LinearMap, SdpProblem, SdpSolution,
    SolveStatus, VarId,
};
use crate::symmetry::{check_bicovariant, covariance_constraints, invariant_basis, SymmetryGroup};

pub const DEFAULT_ELL: u32 = 4;
pub const MAX_ELL: u32 = 10;
/// Slack allowed on `β(M) ≤ 1` when a map is used as a comparator.
pub const BETA_FEASIBLE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Beta,
    CBeta,
    UpsilonGeo,
    GeoChannelDiv,
    #[serde(rename = "d_h")]
    DH,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Beta => "beta",
            Measure::CBeta => "c_beta",
            Measure::UpsilonGeo => "upsilon_geo",
            Measure::GeoChannelDiv => "geo_channel_div",
            Measure::DH => "d_h",
        }
    }
}

/// The solved problem behind a bound, kept for re-certification and for
/// extracting optimal points.
#[derive(Clone, Debug)]
pub struct Witness {
    pub problem: SdpProblem,
    pub solution: SdpSolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundResult {
    pub measure: Measure,
    /// The bound in bits: `log₂ β` for β and C_β, the divergence otherwise.
    pub value_bits: f64,
    /// The SDP optimum before the logarithmic transform.
    pub raw_value: f64,
    pub alpha: Option<f64>,
    pub ell: Option<u32>,
    pub channel_desc: String,
    pub gap: f64,
    pub status: SolveStatus,
    pub wall_ms: u64,
    pub certified: bool,
    #[serde(skip)]
    pub certificate: Option<CertifyReport>,
    #[serde(skip)]
    pub witness: Option<Box<Witness>>,
}

impl BoundResult {
    pub fn with_desc(mut self, desc: impl Into<String>) -> Self {
        self.channel_desc = desc.into();
        self
    }

    pub fn require_solved(self) -> Result<Self> {
        if !self.status.is_solved() {
            return Err(Error::SolverFailure {
                status: format!("{:?}", self.status),
                detail: format!("{} of {}", self.measure.name(), self.channel_desc),
            });
        }
        Ok(self)
    }

    /// Optimal value of a named SDP variable.
    pub fn variable(&self, name: &str) -> Option<&ComplexMatrix> {
        self.witness.as_ref()?.solution.assignments.get(name)
    }
}

fn alpha_of(ell: u32) -> f64 {
    1.0 + 0.5_f64.powi(ell as i32)
}

fn check_ell(ell: u32) -> Result<()> {
    if !(1..=MAX_ELL).contains(&ell) {
        return Err(Error::InvalidParameter(format!("ell must lie in [1, {MAX_ELL}], got {ell}")));
    }
    Ok(())
}

fn describe_legs(c: &ChoiOperator) -> String {
    let legs: Vec<String> = c.legs().iter().map(|l| format!("{}:{}", l.label, l.dim)).collect();
    format!("choi({})", legs.join(","))
}

struct Pending {
    measure: Measure,
    ell: Option<u32>,
    desc: String,
    start: Instant,
}

impl Pending {
    fn new(measure: Measure, ell: Option<u32>, choi: &ChoiOperator) -> Self {
        Pending { measure, ell, desc: describe_legs(choi), start: Instant::now() }
    }

    fn unsolved(self, status: SolveStatus, raw: f64, bits: f64) -> BoundResult {
        BoundResult {
            measure: self.measure,
            value_bits: bits,
            raw_value: raw,
            alpha: self.ell.map(alpha_of),
            ell: self.ell,
            channel_desc: self.desc,
            gap: f64::NAN,
            status,
            wall_ms: self.start.elapsed().as_millis() as u64,
            certified: false,
            certificate: None,
            witness: None,
        }
    }

    /// Solves, certifies and maps the optimum `raw` to bits.
    fn finish(self, problem: SdpProblem, to_bits: impl Fn(f64) -> f64) -> Result<BoundResult> {
        let solution = solve(&problem)?;
        if !solution.status.is_solved() {
            return Ok(self.unsolved(solution.status, f64::NAN, f64::NAN));
        }
        let report = certify(&problem, &solution, &CertifyTolerances::default())?;
        let raw = report.objective;
        Ok(BoundResult {
            measure: self.measure,
            value_bits: to_bits(raw),
            raw_value: raw,
            alpha: self.ell.map(alpha_of),
            ell: self.ell,
            channel_desc: self.desc,
            gap: report.gap,
            status: solution.status,
            wall_ms: self.start.elapsed().as_millis() as u64,
            certified: report.passed,
            certificate: Some(report),
            witness: Some(Box::new(Witness { problem, solution })),
        })
    }
}

fn hermitian_var(p: &mut SdpProblem, name: &str, dim: usize, span: Option<&[ComplexMatrix]>) -> Result<VarId> {
    match span {
        Some(b) => p.hermitian_in_span(name, dim, b.to_vec()),
        None => Ok(p.hermitian(name, dim)),
    }
}

fn bipartite_shape(dims: [usize; 4]) -> Result<SystemShape> {
    SystemShape::new(dims.to_vec())
}

/// Right-hand side of the β objective constraint.
enum BetaLevel {
    Epigraph(VarId),
    One,
}

/// The four constraint families of β for the Choi expression `gamma` in
/// canonical leg order, with `(1/d_A)·Tr_{AA′B′}[S] ⪯ level·I_B`.
fn add_beta_constraints(
    p: &mut SdpProblem,
    gamma: &AffineMatrixExpr,
    dims: [usize; 4],
    level: BetaLevel,
    span: Option<&[ComplexMatrix]>,
) -> Result<(VarId, VarId)> {
    let [da, _, db, _] = dims;
    let shape = bipartite_shape(dims)?;
    let n = shape.total();
    let s = hermitian_var(p, "S", n, span)?;
    let v = hermitian_var(p, "V", n, span)?;
    let sv = AffineMatrixExpr::var(s);
    let vv = AffineMatrixExpr::var(v);
    p.add_psd("S+V", sv.clone().add(vv.clone())?)?;
    p.add_psd("S-V", sv.clone().sub(vv.clone())?)?;
    let ppt = LinearMap::PartialTranspose { shape: shape.clone(), systems: vec![2, 3] };
    p.add_psd("T_BB'(V+G)", vv.clone().add(gamma.clone())?.map(ppt.clone())?)?;
    p.add_psd("T_BB'(V-G)", vv.sub(gamma.clone())?.map(ppt)?)?;
    let marginal = sv
        .clone()
        .map(LinearMap::PartialTrace { shape: shape.clone(), traced: vec![0, 1, 3] })?
        .scale(1.0 / da as f64);
    let cap = match level {
        BetaLevel::Epigraph(lam) => AffineMatrixExpr::var(lam).map(LinearMap::KronLeft(ComplexMatrix::identity(db)))?,
        BetaLevel::One => AffineMatrixExpr::constant(&ComplexMatrix::identity(db)),
    };
    p.add_psd("beta-level", cap.sub(marginal)?)?;
    let pi_a = ComplexMatrix::identity(da).scale(1.0 / da as f64);
    let lhs = sv.clone().map(LinearMap::PartialTrace { shape: shape.clone(), traced: vec![1] })?;
    let rhs = sv.map(LinearMap::PartialTrace { shape, traced: vec![0, 1] })?.map(LinearMap::KronLeft(pi_a))?;
    p.add_eq("non-signaling", lhs.sub(rhs)?)?;
    Ok((s, v))
}

/// β of a bipartite map (a point-to-point map is viewed with trivial `A′`, `B`).
/// The Choi operator only needs to be Hermitian.
pub fn beta(choi: &ChoiOperator) -> Result<BoundResult> {
    let pending = Pending::new(Measure::Beta, None, choi);
    let b = choi.to_bipartite()?;
    let dims = b.bipartite_dims()?;
    let mut p = SdpProblem::new();
    let lam = p.scalar("lambda");
    add_beta_constraints(&mut p, &AffineMatrixExpr::constant(b.matrix()), dims, BetaLevel::Epigraph(lam), None)?;
    p.minimize_scalar(lam)?;
    pending.finish(p, f64::log2)
}

/// `C_β = log₂ β`, reported under its own measure name.
pub fn c_beta(choi: &ChoiOperator) -> Result<BoundResult> {
    let mut r = beta(choi)?;
    r.measure = Measure::CBeta;
    Ok(r)
}

/// β of a point-to-point map: min Tr[S] s.t. `T_{B′}(V ± Γ) ⪰ 0`, `I_A ⊗ S ± V ⪰ 0`.
pub fn beta_p2p(choi: &ChoiOperator) -> Result<BoundResult> {
    if !choi.is_point_to_point() {
        return Err(Error::LegMismatch(format!("beta_p2p needs legs (in, out), got {:?}", choi.labels())));
    }
    let pending = Pending::new(Measure::Beta, None, choi);
    let (din, dout) = (choi.legs()[0].dim, choi.legs()[1].dim);
    let shape = choi.shape();
    let gamma = AffineMatrixExpr::constant(choi.matrix());
    let mut p = SdpProblem::new();
    let s = p.hermitian("S", dout);
    let v = p.hermitian("V", din * dout);
    let is = AffineMatrixExpr::var(s).map(LinearMap::KronLeft(ComplexMatrix::identity(din)))?;
    let vv = AffineMatrixExpr::var(v);
    let pt = LinearMap::PartialTranspose { shape, systems: vec![1] };
    p.add_psd("T_B'(V+G)", vv.clone().add(gamma.clone())?.map(pt.clone())?)?;
    p.add_psd("T_B'(V-G)", vv.clone().sub(gamma)?.map(pt)?)?;
    p.add_psd("IxS+V", is.clone().add(vv.clone())?)?;
    p.add_psd("IxS-V", is.sub(vv)?)?;
    p.minimize_trace(s)?;
    pending.finish(p, f64::log2)
}

/// Facial reduction of `Γ^N` onto its support: `Γ^N = V ρ V†`.
struct Support {
    v: CMat,
    rho: ComplexMatrix,
}

fn support_of(gn: &ComplexMatrix) -> Result<Support> {
    let eig = eig_hermitian(gn)?;
    let r = eig.rank(SUPPORT_TOL);
    if r == 0 {
        return Err(Error::InvalidParameter("the channel's Choi operator is zero".into()));
    }
    if r == gn.dim() {
        return Ok(Support { v: CMat::identity(r, r), rho: gn.clone() });
    }
    let v = eig.support_basis(SUPPORT_TOL);
    let rho = ComplexMatrix::from_dmatrix(v.adjoint() * gn.as_dmatrix() * &v)?.hermitian_part();
    Ok(Support { v, rho })
}

/// Square `[[0, X], [X†, 0]]` with `X` of size `q × r`.
fn off_diagonal(x: &CMat) -> Result<ComplexMatrix> {
    let (q, r) = (x.nrows(), x.ncols());
    let mut m = CMat::zeros(q + r, q + r);
    m.view_mut((0, q), (q, r)).copy_from(x);
    m.view_mut((q, 0), (r, q)).copy_from(&x.adjoint());
    ComplexMatrix::from_dmatrix(m)
}

fn corner(x: &ComplexMatrix, q: usize) -> Result<ComplexMatrix> {
    let r = x.dim();
    let mut m = CMat::zeros(q + r, q + r);
    m.view_mut((q, q), (r, r)).copy_from(x.as_dmatrix());
    ComplexMatrix::from_dmatrix(m)
}

struct ChainSpans {
    w: Vec<ComplexMatrix>,
    links: Vec<ComplexMatrix>,
}

/// The geometric-mean chain bounding `Γ^N (Γ^M #_{1−t} Γ^N)⁻¹ Γ^N ⪯ W` with
/// `t = 2^{−ℓ}`. `head` is the (possibly compressed) `Γ^M` block and `link`
/// maps the support of `Γ^N` into its space.
fn add_chain(
    p: &mut SdpProblem,
    head: AffineMatrixExpr,
    link: &CMat,
    sup: &Support,
    ell: u32,
    spans: Option<&ChainSpans>,
) -> Result<VarId> {
    let q = head.dim();
    let r = sup.rho.dim();
    let n = sup.v.nrows();
    let mut links = Vec::with_capacity(ell as usize);
    for i in 1..=ell {
        links.push(hermitian_var(p, &format!("N{i}"), r, spans.map(|s| s.links.as_slice()))?);
    }
    let blocks = vec![q, r];
    let first = head
        .map(LinearMap::BlockEmbed { blocks: blocks.clone(), row: 0, col: 0 })?
        .add(
            AffineMatrixExpr::var(links[0])
                .map(LinearMap::LeftMul(link.clone()))?
                .map(LinearMap::BlockEmbed { blocks, row: 0, col: 1 })?,
        )?
        .plus_constant(&corner(&sup.rho, q)?)?;
    p.add_psd("chain-1", first)?;
    let pair = vec![r, r];
    for i in 1..links.len() {
        let block = AffineMatrixExpr::var(links[i - 1])
            .map(LinearMap::BlockEmbed { blocks: pair.clone(), row: 0, col: 0 })?
            .add(AffineMatrixExpr::var(links[i]).map(LinearMap::BlockEmbed { blocks: pair.clone(), row: 0, col: 1 })?)?
            .plus_constant(&corner(&sup.rho, r)?)?;
        p.add_psd(&format!("chain-{}", i + 1), block)?;
    }
    let w = hermitian_var(p, "W", n, spans.map(|s| s.w.as_slice()))?;
    let tail = vec![n, r];
    let last = AffineMatrixExpr::var(w)
        .map(LinearMap::BlockEmbed { blocks: tail.clone(), row: 0, col: 0 })?
        .add(AffineMatrixExpr::var(links[links.len() - 1]).map(LinearMap::BlockEmbed { blocks: tail, row: 1, col: 1 })?)?
        .plus_constant(&off_diagonal(&(&sup.v * sup.rho.as_dmatrix()))?)?;
    p.add_psd("chain-W", last)?;
    Ok(w)
}

/// `Tr_out[W] ⪯ y·I_in`, minimizing `y`.
fn add_norm_objective(p: &mut SdpProblem, w: VarId, choi: &ChoiOperator) -> Result<()> {
    let y = p.scalar("y");
    let marginal =
        AffineMatrixExpr::var(w).map(LinearMap::PartialTrace { shape: choi.shape(), traced: choi.output_legs() })?;
    let cap = AffineMatrixExpr::var(y).map(LinearMap::KronLeft(ComplexMatrix::identity(choi.input_dim())))?;
    p.add_psd("y-level", cap.sub(marginal)?)?;
    p.minimize_scalar(y)
}

fn same_layout(a: &ChoiOperator, b: &ChoiOperator) -> bool {
    a.legs().len() == b.legs().len() && a.legs().iter().zip(b.legs()).all(|(x, y)| x.dim == y.dim && x.role == y.role)
}

/// `D̂_α(N‖M)` in bits for `α = 1 + 2^{−ℓ}`: `2^ℓ·log₂ min y`. When the
/// support of `Γ^N` leaves that of `Γ^M` the divergence is infinite and the
/// result reports status infeasible with value `+∞` without solving.
pub fn geo_channel_div(n: &ChoiOperator, m: &ChoiOperator, ell: u32) -> Result<BoundResult> {
    check_ell(ell)?;
    if !same_layout(n, m) {
        return Err(Error::LegMismatch(format!("legs {:?} and {:?} differ", n.labels(), m.labels())));
    }
    let pending = Pending::new(Measure::GeoChannelDiv, Some(ell), n);
    let sup = support_of(n.matrix())?;
    let meig = eig_hermitian(m.matrix())?;
    if meig.values.iter().any(|&v| v < -SUPPORT_TOL * meig.spectral_radius().max(1.0)) {
        return Err(Error::InvalidParameter("the comparison map must be completely positive".into()));
    }
    let u = meig.support_basis(SUPPORT_TOL);
    let leak = &sup.v - &u * (u.adjoint() * &sup.v);
    if leak.iter().any(|z| z.norm() > 1e-7) {
        return Ok(pending.unsolved(SolveStatus::Infeasible, f64::INFINITY, f64::INFINITY));
    }
    let head = ComplexMatrix::from_dmatrix(u.adjoint() * m.matrix().as_dmatrix() * &u)?.hermitian_part();
    let link = u.adjoint() * &sup.v;
    let mut p = SdpProblem::new();
    let w = add_chain(&mut p, AffineMatrixExpr::constant(&head), &link, &sup, ell, None)?;
    add_norm_objective(&mut p, w, n)?;
    let scale = 2f64.powi(ell as i32);
    pending.finish(p, move |y| scale * y.log2())
}

/// How symmetry enters an Υ̂ computation.
enum Reduction<'a> {
    None,
    /// All variables restricted to the group's invariant operators.
    Span(&'a SymmetryGroup),
    /// `Γ^M = twirl(Γ^M)` imposed as explicit equalities.
    Equalities(&'a SymmetryGroup),
    /// Fixed maximally entangled input; trace objective.
    FixedInput(&'a SymmetryGroup),
}

fn upsilon_impl(n: &ChoiOperator, ell: u32, red: Reduction) -> Result<BoundResult> {
    check_ell(ell)?;
    let pending = Pending::new(Measure::UpsilonGeo, Some(ell), n);
    let b = n.to_bipartite()?;
    let dims = b.bipartite_dims()?;
    let dim = b.matrix().dim();
    let sup = support_of(b.matrix())?;
    let group = match &red {
        Reduction::None => None,
        Reduction::Span(g) | Reduction::Equalities(g) | Reduction::FixedInput(g) => Some(*g),
    };
    if let Some(g) = group {
        if !check_bicovariant(&b, g)? {
            return Err(Error::SymmetryViolation("channel is not bicovariant under the given group".into()));
        }
    }
    if let Reduction::FixedInput(g) = &red {
        if !g.input_is_one_design() {
            return Err(Error::SymmetryViolation(
                "a fixed maximally entangled input needs a one-design on the inputs".into(),
            ));
        }
    }
    let spans = match &red {
        Reduction::Span(g) | Reduction::FixedInput(g) => {
            let acts = g.choi_actions();
            let reduced: Vec<ComplexMatrix> = acts
                .iter()
                .map(|a| ComplexMatrix::from_dmatrix(sup.v.adjoint() * a.as_dmatrix() * &sup.v))
                .collect::<Result<_>>()?;
            Some(ChainSpans { w: invariant_basis(&acts, dim)?, links: invariant_basis(&reduced, sup.rho.dim())? })
        }
        _ => None,
    };
    let mut p = SdpProblem::new();
    let gm = hermitian_var(&mut p, "GammaM", dim, spans.as_ref().map(|s| s.w.as_slice()))?;
    p.add_psd("GammaM", AffineMatrixExpr::var(gm))?;
    if let Reduction::Equalities(g) = &red {
        for (k, e) in covariance_constraints(gm, &g.choi_actions())?.into_iter().enumerate() {
            p.add_eq(&format!("covariance-{k}"), e)?;
        }
    }
    add_beta_constraints(
        &mut p,
        &AffineMatrixExpr::var(gm),
        dims,
        BetaLevel::One,
        spans.as_ref().map(|s| s.w.as_slice()),
    )?;
    let w = add_chain(&mut p, AffineMatrixExpr::var(gm), &sup.v, &sup, ell, spans.as_ref())?;
    let scale = 2f64.powi(ell as i32);
    if let Reduction::FixedInput(_) = red {
        let d_in = b.input_dim() as f64;
        p.minimize_term(w, ComplexMatrix::identity(dim).scale(1.0 / d_in))?;
    } else {
        add_norm_objective(&mut p, w, &b)?;
    }
    pending.finish(p, move |y| scale * y.log2())
}

/// `Υ̂_α(N) = min_{M CP, β(M) ≤ 1} D̂_α(N‖M)` for `α = 1 + 2^{−ℓ}`, as one SDP.
pub fn upsilon_geo(n: &ChoiOperator, ell: u32) -> Result<BoundResult> {
    upsilon_impl(n, ell, Reduction::None)
}

/// [`upsilon_geo`] with every variable restricted to operators invariant
/// under the group; exact for channels bicovariant under it.
pub fn upsilon_geo_covariant(n: &ChoiOperator, ell: u32, g: &SymmetryGroup) -> Result<BoundResult> {
    upsilon_impl(n, ell, Reduction::Span(g))
}

/// [`upsilon_geo`] with covariance of `Γ^M` imposed through explicit
/// equality constraints.
pub fn upsilon_geo_constrained(n: &ChoiOperator, ell: u32, g: &SymmetryGroup) -> Result<BoundResult> {
    upsilon_impl(n, ell, Reduction::Equalities(g))
}

/// Υ̂_α for a channel bicovariant under a group acting as a one-design on
/// the inputs: the divergence between the normalized Choi states of `N` and
/// a covariant `M`, minimized over `M`.
pub fn upsilon_geo_symmetric(n: &ChoiOperator, ell: u32, g: &SymmetryGroup) -> Result<BoundResult> {
    upsilon_impl(n, ell, Reduction::FixedInput(g))
}

/// `Σ_i |i⟩⟨i| ⊗ |i⟩⟨i|`
pub fn comparator_projector(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d);
    for i in 0..d {
        m[(i * d + i, i * d + i)] = ONE;
    }
    m
}

/// `(1/d) Σ_i |ii⟩⟨ii|`
pub fn classically_correlated(d: usize) -> ComplexMatrix {
    comparator_projector(d).scale(1.0 / d as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparatorReport {
    pub beta: f64,
    pub success_probability: f64,
    pub bound: f64,
    pub holds: bool,
}

fn as_square_p2p(m: &ChoiOperator, d: usize) -> Result<ChoiOperator> {
    let p = m.to_point_to_point()?;
    if p.legs()[0].dim != d || p.legs()[1].dim != d {
        return Err(Error::LegMismatch(format!("expected a map on dimension {d}, got legs {:?}", m.labels())));
    }
    Ok(p)
}

/// `Tr[Π M(Φ̄)] ≤ 1/d` for a map with `β(M) ≤ 1`.
pub fn comparator_bound_check(m: &ChoiOperator, d: usize) -> Result<ComparatorReport> {
    let m = as_square_p2p(m, d)?;
    let b = beta_p2p(&m)?.require_solved()?;
    if b.raw_value > 1.0 + BETA_FEASIBLE_TOL {
        return Err(Error::Precondition(format!("beta(M) = {} exceeds 1", b.raw_value)));
    }
    let shape = SystemShape::new(vec![d, d])?;
    let out = apply(&m, &classically_correlated(d), &shape)?;
    let success_probability = comparator_projector(d).inner_re(&out);
    let bound = 1.0 / d as f64;
    Ok(ComparatorReport {
        beta: b.raw_value,
        success_probability,
        bound,
        holds: success_probability <= bound + BETA_FEASIBLE_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrBoundEntry {
    pub comparator: String,
    pub ell: u32,
    pub divergence: f64,
    pub penalty: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrBoundReport {
    pub epsilon: f64,
    pub log_d: f64,
    pub skipped: bool,
    pub entries: Vec<ErrBoundEntry>,
    pub holds: bool,
}

/// The three comparison maps of [`err_bound_check`]: the replacer to `π`,
/// the completely dephasing channel rescaled to `β = 1`, and their even
/// mixture.
pub fn canonical_comparators(d: usize) -> Result<Vec<(String, ChoiOperator)>> {
    let pi = ComplexMatrix::identity(d * d).scale(1.0 / d as f64);
    let replacer = ChoiOperator::point_to_point(pi, d, d)?;
    let dephasing = ChoiOperator::point_to_point(comparator_projector(d), d, d)?;
    let b = beta_p2p(&dephasing)?.require_solved()?.raw_value;
    let scaled = dephasing.scale(1.0 / b);
    let mix = replacer.with_matrix(&replacer.matrix().scale(0.5) + &scaled.matrix().scale(0.5))?;
    Ok(vec![
        ("replacer".to_string(), replacer),
        ("dephasing/beta".to_string(), scaled),
        ("mixture".to_string(), mix),
    ])
}

/// One-sided check of `log₂ d ≤ D̂_α(N(Φ̄)‖M(Φ̄)) + α/(α−1)·log₂(1/(1−ε))`
/// with `ε = ½‖N(Φ̄) − Φ̄‖₁`, for `ℓ ∈ {2, 4}` and the canonical comparators.
pub fn err_bound_check(n: &ChoiOperator, d: usize) -> Result<ErrBoundReport> {
    let n = as_square_p2p(n, d)?;
    if !n.is_cptp()? {
        return Err(Error::InvalidParameter("err_bound_check needs a channel".into()));
    }
    let shape = SystemShape::new(vec![d, d])?;
    let phi = classically_correlated(d);
    let out = apply(&n, &phi, &shape)?;
    let epsilon = (0.5 * trace_norm(&(&out - &phi))?).clamp(0.0, 1.0);
    let log_d = (d as f64).log2();
    if epsilon >= 1.0 - 1e-12 {
        return Ok(ErrBoundReport { epsilon, log_d, skipped: true, entries: vec![], holds: true });
    }
    let mut entries = Vec::new();
    for (name, m) in canonical_comparators(d)? {
        let sigma = apply(&m, &phi, &shape)?;
        for ell in [2u32, 4] {
            let alpha = alpha_of(ell);
            let divergence = geo_renyi(&out, &sigma, alpha)?.as_f64();
            let penalty = alpha / (alpha - 1.0) * (1.0 / (1.0 - epsilon)).log2();
            let rhs = divergence + penalty;
            entries.push(ErrBoundEntry { comparator: name.clone(), ell, divergence, penalty, rhs, holds: log_d <= rhs + 1e-9 });
        }
    }
    let holds = entries.iter().all(|e| e.holds);
    Ok(ErrBoundReport { epsilon, log_d, skipped: false, entries, holds })
}

/// `σ^{1/2} (σ^{−1/2} ρ σ^{−1/2})^s σ^{1/2}` for invertible `σ`.
pub fn weighted_geometric_mean(sigma: &ComplexMatrix, rho: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let e = eig_hermitian(sigma)?;
    if e.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::SupportViolation("sigma must be positive definite".into()));
    }
    let half = e.apply(f64::sqrt, 0.0)?;
    let inv_half = e.apply(|x| 1.0 / x.sqrt(), 0.0)?;
    let inner = (&(&inv_half * rho) * &inv_half).hermitian_part();
    let powered = inner.eig_hermitian()?.apply(|x| x.max(0.0).powf(s), 0.0)?;
    Ok((&(&half * &powered) * &half).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make, ChannelFamily};
    use crate::divergences::geo_renyi;
    use crate::random::{random_state, seeded};

    fn fam(f: ChannelFamily) -> ChoiOperator {
        make(&f).unwrap()
    }

    fn assert_certified(r: &BoundResult) {
        assert!(r.status.is_solved(), "{:?}", r.status);
        assert!(r.certified, "{:?}", r.certificate.as_ref().map(|c| &c.failures));
    }

    #[test]
    fn beta_closed_forms() {
        for (f, want) in [
            (ChannelFamily::ClassicalFeedback { d: 2 }, 1.0),
            (ChannelFamily::Swap { d: 2 }, 4.0),
            (ChannelFamily::Identity { d: 2 }, 2.0),
            (ChannelFamily::Replacer { d: 3 }, 1.0),
        ] {
            let r = beta(&fam(f.clone())).unwrap();
            assert_certified(&r);
            assert!((r.raw_value - want).abs() < 1e-6, "{}: {}", f.describe(), r.raw_value);
            assert!((r.value_bits - want.log2()).abs() < 1e-6);
        }
    }

    #[test]
    fn beta_p2p_closed_forms() {
        for d in [2, 3] {
            let r = beta_p2p(&fam(ChannelFamily::Identity { d })).unwrap();
            assert_certified(&r);
            assert!((r.raw_value - d as f64).abs() < 1e-6);
        }
        let r = beta_p2p(&fam(ChannelFamily::Replacer { d: 2 })).unwrap();
        assert!((r.raw_value - 1.0).abs() < 1e-6);
        assert!(beta_p2p(&fam(ChannelFamily::Swap { d: 2 })).is_err());
    }

    #[test]
    fn geometric_mean_chain_identity() {
        // ρ G_{1−t}(σ,ρ)⁻¹ ρ = G_{1+t}(σ,ρ), the step that closes the chain
        let mut rng = seeded(21);
        for _ in 0..5 {
            let rho = random_state(3, &mut rng);
            let sigma = random_state(3, &mut rng);
            for t in [1.0, 0.5, 0.25] {
                let lower = weighted_geometric_mean(&sigma, &rho, 1.0 - t).unwrap();
                let upper = weighted_geometric_mean(&sigma, &rho, 1.0 + t).unwrap();
                let inv = if t == 1.0 {
                    sigma.eig_hermitian().unwrap().apply(|x| 1.0 / x, 0.0).unwrap()
                } else {
                    lower.eig_hermitian().unwrap().apply(|x| 1.0 / x, 0.0).unwrap()
                };
                let lhs = &(&rho * &inv) * &rho;
                assert!(lhs.max_abs_diff(&upper) < 1e-9 * upper.max_abs().max(1.0), "t = {t}");
            }
        }
    }

    fn state_choi(rho: &ComplexMatrix) -> ChoiOperator {
        ChoiOperator::point_to_point(rho.clone(), 1, rho.dim()).unwrap()
    }

    #[test]
    fn state_pairs_match_spectral_formula() {
        let mut rng = seeded(22);
        for ell in [1, 2, 4] {
            let rho = random_state(2, &mut rng);
            let sigma = random_state(2, &mut rng);
            let r = geo_channel_div(&state_choi(&rho), &state_choi(&sigma), ell).unwrap();
            assert_certified(&r);
            let want = geo_renyi(&rho, &sigma, alpha_of(ell)).unwrap().as_f64();
            assert!((r.value_bits - want).abs() < 1e-5, "ell {ell}: {} vs {want}", r.value_bits);
        }
    }

    #[test]
    fn channel_divergence_to_itself_vanishes() {
        for f in [ChannelFamily::Depolarizing { d: 2, p: 0.3 }, ChannelFamily::Identity { d: 2 }] {
            let c = fam(f);
            let r = geo_channel_div(&c, &c, 3).unwrap();
            assert_certified(&r);
            assert!(r.value_bits.abs() < 1e-6, "{}", r.value_bits);
        }
    }

    #[test]
    fn support_violation_is_reported() {
        let n = fam(ChannelFamily::Identity { d: 2 });
        let m = crate::channels::unitary_channel(&crate::symmetry::heisenberg_weyl(2, 1, 0));
        let r = geo_channel_div(&n, &m, 2).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.value_bits.is_infinite());
        assert!(geo_channel_div(&n, &m, 0).is_err());
        assert!(geo_channel_div(&n, &m, 11).is_err());
    }

    #[test]
    fn comparator_examples() {
        let pi = ComplexMatrix::identity(4).scale(0.5);
        let replacer = ChoiOperator::point_to_point(pi, 2, 2).unwrap();
        let rep = comparator_bound_check(&replacer, 2).unwrap();
        assert!((rep.success_probability - 0.5).abs() < 1e-12 && rep.holds);
        let half_id = fam(ChannelFamily::Identity { d: 2 }).scale(0.5);
        let rep = comparator_bound_check(&half_id, 2).unwrap();
        assert!(rep.success_probability <= 0.5 + 1e-7 && rep.holds);
        let full_id = fam(ChannelFamily::Identity { d: 2 });
        assert!(matches!(comparator_bound_check(&full_id, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn err_bound_examples() {
        let id = err_bound_check(&fam(ChannelFamily::Identity { d: 2 }), 2).unwrap();
        assert!(id.epsilon.abs() < 1e-12 && id.holds && !id.skipped);
        assert!(id.entries.iter().all(|e| e.rhs >= 1.0 - 1e-9));
        let dep = err_bound_check(&fam(ChannelFamily::Depolarizing { d: 2, p: 0.2 }), 2).unwrap();
        assert!((dep.epsilon - 0.2 * (1.0 - 0.5)).abs() < 1e-12);
        assert!(dep.holds);
    }

    #[test]
    fn symmetric_reduction_preconditions() {
        let swap = fam(ChannelFamily::PartialSwap { d: 2, p: 0.5 });
        let pauli = SymmetryGroup::pauli_bicovariance(2).unwrap();
        assert!(matches!(upsilon_geo_symmetric(&swap, 2, &pauli), Err(Error::SymmetryViolation(_))));
        let uu = SymmetryGroup::uu_design(2).unwrap();
        assert!(matches!(upsilon_geo_symmetric(&swap, 2, &uu), Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn noisy_cnot_endpoints() {
        let g = SymmetryGroup::pauli_bicovariance(2).unwrap();
        let r0 = upsilon_geo_symmetric(&fam(ChannelFamily::NoisyCnot { d: 2, p: 0.0 }), 4, &g).unwrap();
        assert_certified(&r0);
        assert!((r0.value_bits - 1.0).abs() < 1e-5, "{}", r0.value_bits);
        let r1 = upsilon_geo_symmetric(&fam(ChannelFamily::NoisyCnot { d: 2, p: 1.0 }), 4, &g).unwrap();
        assert!(r1.value_bits.abs() < 1e-5);
    }
}
