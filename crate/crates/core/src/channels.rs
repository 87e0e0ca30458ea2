//! Choi operators of channels and completely positive maps.
//!
//! The Choi operator of `N` is `Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)` with the input copy
//! placed on the input legs. Bipartite maps use the leg order
//! `(A:in, A′:out, B:in, B′:out)`; point-to-point maps use `(A:in, B′:out)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, gamma_operator, kron, partial_trace, partial_transpose, permute_systems, swap_operator, ComplexMatrix,
    SystemShape, ONE, ZERO,
};

/// PSD and trace-preservation tolerance for constructed Choi operators.
pub const CHOI_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    In,
    Out,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(String, usize, Role)", into = "(String, usize, Role)")]
pub struct Leg {
    pub label: String,
    pub dim: usize,
    pub role: Role,
}

impl From<(String, usize, Role)> for Leg {
    fn from((label, dim, role): (String, usize, Role)) -> Self {
        Leg { label, dim, role }
    }
}

impl From<Leg> for (String, usize, Role) {
    fn from(l: Leg) -> Self {
        (l.label, l.dim, l.role)
    }
}

impl Leg {
    pub fn new(label: &str, dim: usize, role: Role) -> Self {
        Leg { label: label.to_string(), dim, role }
    }
}

fn canonical_legs(da: usize, dap: usize, db: usize, dbp: usize) -> Vec<Leg> {
    vec![
        Leg::new("A", da, Role::In),
        Leg::new("A'", dap, Role::Out),
        Leg::new("B", db, Role::In),
        Leg::new("B'", dbp, Role::Out),
    ]
}

fn p2p_legs(din: usize, dout: usize) -> Vec<Leg> {
    vec![Leg::new("A", din, Role::In), Leg::new("B'", dout, Role::Out)]
}

/// A Hermitian operator tagged with its channel legs.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator {
    matrix: ComplexMatrix,
    legs: Vec<Leg>,
}

impl ChoiOperator {
    pub fn new(matrix: ComplexMatrix, legs: Vec<Leg>) -> Result<Self> {
        if legs.iter().any(|l| l.dim == 0) {
            return Err(Error::LegMismatch("leg dimensions must be positive".into()));
        }
        let total: usize = legs.iter().map(|l| l.dim).product();
        if total != matrix.dim() {
            return Err(Error::DimensionMismatch { expected: total, found: matrix.dim() });
        }
        matrix.check_hermitian()?;
        Ok(Self { matrix, legs })
    }

    /// Bipartite operator in canonical leg order.
    pub fn bipartite(matrix: ComplexMatrix, da: usize, dap: usize, db: usize, dbp: usize) -> Result<Self> {
        Self::new(matrix, canonical_legs(da, dap, db, dbp))
    }

    pub fn point_to_point(matrix: ComplexMatrix, din: usize, dout: usize) -> Result<Self> {
        Self::new(matrix, p2p_legs(din, dout))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn shape(&self) -> SystemShape {
        SystemShape::new(self.legs.iter().map(|l| l.dim).collect()).expect("positive leg dims")
    }

    fn legs_with(&self, role: Role) -> Vec<usize> {
        (0..self.legs.len()).filter(|&k| self.legs[k].role == role).collect()
    }

    pub fn input_legs(&self) -> Vec<usize> {
        self.legs_with(Role::In)
    }

    pub fn output_legs(&self) -> Vec<usize> {
        self.legs_with(Role::Out)
    }

    pub fn input_dim(&self) -> usize {
        self.input_legs().iter().map(|&k| self.legs[k].dim).product()
    }

    pub fn output_dim(&self) -> usize {
        self.output_legs().iter().map(|&k| self.legs[k].dim).product()
    }

    pub fn is_canonical_bipartite(&self) -> bool {
        self.legs.len() == 4
            && [Role::In, Role::Out, Role::In, Role::Out].iter().zip(&self.legs).all(|(r, l)| *r == l.role)
    }

    pub fn is_point_to_point(&self) -> bool {
        self.legs.len() == 2 && self.legs[0].role == Role::In && self.legs[1].role == Role::Out
    }

    /// Canonical bipartite view; a point-to-point map gets trivial `A′` and `B` legs.
    pub fn to_bipartite(&self) -> Result<ChoiOperator> {
        if self.is_canonical_bipartite() {
            return Ok(self.clone());
        }
        if self.is_point_to_point() {
            let mut legs = canonical_legs(self.legs[0].dim, 1, 1, self.legs[1].dim);
            legs[0].label = self.legs[0].label.clone();
            legs[3].label = self.legs[1].label.clone();
            return Ok(ChoiOperator { matrix: self.matrix.clone(), legs });
        }
        Err(Error::LegMismatch(format!("cannot view legs {:?} as (A, A', B, B')", self.labels())))
    }

    /// Point-to-point view: all inputs merged into one leg, all outputs into another.
    pub fn to_point_to_point(&self) -> Result<ChoiOperator> {
        let (m, din, dout) = self.io_matrix()?;
        Ok(ChoiOperator { matrix: m, legs: p2p_legs(din, dout) })
    }

    /// Dimensions `(d_A, d_A′, d_B, d_B′)` of the canonical bipartite view.
    pub fn bipartite_dims(&self) -> Result<[usize; 4]> {
        let b = self.to_bipartite()?;
        Ok([b.legs[0].dim, b.legs[1].dim, b.legs[2].dim, b.legs[3].dim])
    }

    pub fn labels(&self) -> Vec<&str> {
        self.legs.iter().map(|l| l.label.as_str()).collect()
    }

    pub fn scale(&self, s: f64) -> ChoiOperator {
        ChoiOperator { matrix: self.matrix.scale(s), legs: self.legs.clone() }
    }

    pub fn with_matrix(&self, matrix: ComplexMatrix) -> Result<ChoiOperator> {
        ChoiOperator::new(matrix, self.legs.clone())
    }

    /// The matrix reordered to (all inputs, all outputs), with those total dims.
    pub fn io_matrix(&self) -> Result<(ComplexMatrix, usize, usize)> {
        let ins = self.input_legs();
        let outs = self.output_legs();
        let perm: Vec<usize> = ins.iter().chain(outs.iter()).copied().collect();
        let m = permute_systems(&self.matrix, &self.shape(), &perm)?;
        Ok((m, self.input_dim(), self.output_dim()))
    }

    /// Inverse of [`io_matrix`](Self::io_matrix) for the given leg layout.
    fn from_io_matrix(io: &ComplexMatrix, legs: Vec<Leg>) -> Result<ChoiOperator> {
        let ins: Vec<usize> = (0..legs.len()).filter(|&k| legs[k].role == Role::In).collect();
        let outs: Vec<usize> = (0..legs.len()).filter(|&k| legs[k].role == Role::Out).collect();
        let perm: Vec<usize> = ins.iter().chain(outs.iter()).copied().collect();
        let io_shape = SystemShape::new(perm.iter().map(|&k| legs[k].dim).collect())?;
        let m = permute_systems(io, &io_shape, &linalg::inverse_permutation(&perm))?;
        ChoiOperator::new(m, legs)
    }

    pub fn is_cp(&self) -> Result<bool> {
        self.matrix.is_psd(CHOI_TOL)
    }

    pub fn is_tp(&self) -> Result<bool> {
        let reduced = partial_trace(&self.matrix, &self.shape(), &self.output_legs())?;
        Ok(reduced.max_abs_diff(&ComplexMatrix::identity(reduced.dim())) <= CHOI_TOL)
    }

    pub fn is_cptp(&self) -> Result<bool> {
        Ok(self.is_cp()? && self.is_tp()?)
    }
}

/// Choi operator of `X ↦ Σ_k K_k X K_k†` with `out_dim × in_dim` Kraus operators.
pub fn choi_from_kraus(kraus: &[DMatrix<Complex64>], in_dim: usize, out_dim: usize) -> Result<ChoiOperator> {
    let io = io_choi_from_kraus(kraus, in_dim, out_dim)?;
    ChoiOperator::point_to_point(io, in_dim, out_dim)
}

fn io_choi_from_kraus(kraus: &[DMatrix<Complex64>], in_dim: usize, out_dim: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(in_dim * out_dim);
    for k in kraus {
        if k.nrows() != out_dim {
            return Err(Error::DimensionMismatch { expected: out_dim, found: k.nrows() });
        }
        if k.ncols() != in_dim {
            return Err(Error::DimensionMismatch { expected: in_dim, found: k.ncols() });
        }
        // Vectorized Kraus operator Σ_i |i⟩ ⊗ K|i⟩.
        let mut v = vec![ZERO; in_dim * out_dim];
        for i in 0..in_dim {
            for o in 0..out_dim {
                v[i * out_dim + o] = k[(o, i)];
            }
        }
        m += &ComplexMatrix::projector(&v);
    }
    Ok(m)
}

/// Choi operator of a bipartite map `AB → A′B′` given by Kraus operators on
/// `A ⊗ B → A′ ⊗ B′`.
pub fn bipartite_choi_from_kraus(
    kraus: &[DMatrix<Complex64>],
    da: usize,
    db: usize,
    dap: usize,
    dbp: usize,
) -> Result<ChoiOperator> {
    let io = io_choi_from_kraus(kraus, da * db, dap * dbp)?;
    ChoiOperator::from_io_matrix(&io, canonical_legs(da, dap, db, dbp))
}

/// Applies the map to the trailing subsystems of `state` whose dimensions
/// multiply to the map's input dimension; the outputs replace them.
pub fn apply(choi: &ChoiOperator, state: &ComplexMatrix, state_shape: &SystemShape) -> Result<ComplexMatrix> {
    if state_shape.total() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state_shape.total(), found: state.dim() });
    }
    state.check_hermitian()?;
    let (gamma, din, dout) = choi.io_matrix()?;
    let dims = state_shape.dims();
    let mut tail = 1;
    let mut k = dims.len();
    while tail < din && k > 0 {
        k -= 1;
        tail *= dims[k];
    }
    if tail != din {
        return Err(Error::DimensionMismatch { expected: din, found: tail });
    }
    let ds = state.dim() / din;
    let mut out = ComplexMatrix::zeros(ds * dout);
    for s in 0..ds {
        for sp in 0..ds {
            for i in 0..din {
                for ip in 0..din {
                    let r = state[(s * din + i, sp * din + ip)];
                    if r == ZERO {
                        continue;
                    }
                    for o in 0..dout {
                        for op in 0..dout {
                            out[(s * dout + o, sp * dout + op)] += r * gamma[(i * dout + o, ip * dout + op)];
                        }
                    }
                }
            }
        }
    }
    Ok(out.hermitian_part())
}

/// Applies Kraus operators directly; an independent route to [`apply`] for
/// maps acting on the whole state.
pub fn apply_kraus(kraus: &[DMatrix<Complex64>], state: &ComplexMatrix) -> ComplexMatrix {
    let mut out = DMatrix::<Complex64>::zeros(kraus[0].nrows(), kraus[0].nrows());
    for k in kraus {
        out += k * state.as_dmatrix() * k.adjoint();
    }
    ComplexMatrix::from_dmatrix(out).expect("square").hermitian_part()
}

/// Choi operator of `second ∘ first`. The output legs of `first` are matched
/// in order with the input legs of `second`; the result keeps the input legs
/// of `first` and puts the output legs of `second` in the output positions.
pub fn compose_serial(first: &ChoiOperator, second: &ChoiOperator) -> Result<ChoiOperator> {
    let outs = first.output_legs();
    let ins = second.input_legs();
    if outs.len() != ins.len() || outs.iter().zip(&ins).any(|(&o, &i)| first.legs[o].dim != second.legs[i].dim) {
        return Err(Error::LegMismatch(format!(
            "outputs {:?} of the first map do not match inputs {:?} of the second",
            outs.iter().map(|&k| first.legs[k].dim).collect::<Vec<_>>(),
            ins.iter().map(|&k| second.legs[k].dim).collect::<Vec<_>>()
        )));
    }
    let (g1, d_in, d_mid) = first.io_matrix()?;
    let (g2, _, d_out) = second.io_matrix()?;
    let mut io = ComplexMatrix::zeros(d_in * d_out);
    for i in 0..d_in {
        for ip in 0..d_in {
            for b in 0..d_mid {
                for bp in 0..d_mid {
                    let n = g1[(i * d_mid + b, ip * d_mid + bp)];
                    if n == ZERO {
                        continue;
                    }
                    for c in 0..d_out {
                        for cp in 0..d_out {
                            io[(i * d_out + c, ip * d_out + cp)] += n * g2[(b * d_out + c, bp * d_out + cp)];
                        }
                    }
                }
            }
        }
    }
    let second_outs = second.output_legs();
    let mut legs = first.legs.clone();
    for (slot, &k) in outs.iter().zip(&second_outs) {
        legs[*slot] = second.legs[k].clone();
    }
    if outs.len() != second_outs.len() {
        return Err(Error::LegMismatch("output leg counts differ".into()));
    }
    ChoiOperator::from_io_matrix(&io.hermitian_part(), legs)
}

/// `E_{A→A′} ⊗ F_{B→B′}` as a bipartite map.
pub fn tensor_local(alice: &ChoiOperator, bob: &ChoiOperator) -> Result<ChoiOperator> {
    if !alice.is_point_to_point() || !bob.is_point_to_point() {
        return Err(Error::LegMismatch("tensor_local expects point-to-point maps".into()));
    }
    ChoiOperator::bipartite(
        kron(&alice.matrix, &bob.matrix),
        alice.legs[0].dim,
        alice.legs[1].dim,
        bob.legs[0].dim,
        bob.legs[1].dim,
    )
}

/// Parallel composition of two bipartite maps with Alice's and Bob's legs merged:
/// `A = A₁A₂`, `A′ = A₁′A₂′`, and likewise for Bob.
pub fn tensor_parallel(first: &ChoiOperator, second: &ChoiOperator) -> Result<ChoiOperator> {
    let f = first.to_bipartite()?;
    let s = second.to_bipartite()?;
    let fd = f.bipartite_dims()?;
    let sd = s.bipartite_dims()?;
    let mut dims = fd.to_vec();
    dims.extend_from_slice(&sd);
    let shape = SystemShape::new(dims)?;
    let m = permute_systems(&kron(&f.matrix, &s.matrix), &shape, &[0, 4, 1, 5, 2, 6, 3, 7])?;
    ChoiOperator::bipartite(m, fd[0] * sd[0], fd[1] * sd[1], fd[2] * sd[2], fd[3] * sd[3])
}

/// The point-to-point map `A → B′` obtained by feeding `bob_input` into `B`
/// and discarding `A′`.
pub fn alice_to_bob_map(choi: &ChoiOperator, bob_input: &ComplexMatrix) -> Result<ChoiOperator> {
    let b = choi.to_bipartite()?;
    let [da, dap, db, dbp] = b.bipartite_dims()?;
    if bob_input.dim() != db {
        return Err(Error::DimensionMismatch { expected: db, found: bob_input.dim() });
    }
    let prepare = ChoiOperator::point_to_point(bob_input.clone(), 1, db)?;
    let pre = tensor_local(&identity_channel(da), &prepare)?;
    let discard = ChoiOperator::point_to_point(ComplexMatrix::identity(dap), dap, 1)?;
    let post = tensor_local(&discard, &identity_channel(dbp))?;
    compose_serial(&compose_serial(&pre, &b)?, &post)?.to_point_to_point()
}

/// Whether Bob's output is independent of Alice's input:
/// `Tr_{A′}[Γ] = π_A ⊗ Tr_{AA′}[Γ]`.
pub fn is_nonsignaling_a_to_b(choi: &ChoiOperator) -> Result<bool> {
    let b = choi.to_bipartite()?;
    let shape = b.shape();
    let da = shape.dims()[0];
    let lhs = partial_trace(&b.matrix, &shape, &[1])?;
    let marg = partial_trace(&b.matrix, &shape, &[0, 1])?;
    let rhs = kron(&ComplexMatrix::identity(da).scale(1.0 / da as f64), &marg);
    Ok(lhs.max_abs_diff(&rhs) <= CHOI_TOL)
}

/// Whether `T_{BB′}(Γ) ⪰ 0` within tolerance.
pub fn is_cpptp(choi: &ChoiOperator) -> Result<bool> {
    let b = choi.to_bipartite()?;
    partial_transpose(&b.matrix, &b.shape(), &[2, 3])?.is_psd(CHOI_TOL)
}

/// Row-major real/imaginary parts of a rectangular matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

fn default_dephasing_p() -> f64 {
    1.0
}

/// Named channel constructors; the JSON form is tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelFamily {
    Identity { d: usize },
    Depolarizing { d: usize, p: f64 },
    Erasure { d: usize, p: f64 },
    PartialSwap { d: usize, p: f64 },
    NoisyCnot { d: usize, p: f64 },
    ClassicalFeedback { d: usize },
    Swap { d: usize },
    Dephasing { d: usize, #[serde(default = "default_dephasing_p")] p: f64 },
    Replacer { d: usize },
    FromKraus { in_dim: usize, out_dim: usize, kraus: Vec<MatrixSpec> },
    FromChoi { legs: Vec<Leg>, matrix_re: Vec<f64>, matrix_im: Vec<f64> },
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Identity { .. } => "identity",
            ChannelFamily::Depolarizing { .. } => "depolarizing",
            ChannelFamily::Erasure { .. } => "erasure",
            ChannelFamily::PartialSwap { .. } => "partial_swap",
            ChannelFamily::NoisyCnot { .. } => "noisy_cnot",
            ChannelFamily::ClassicalFeedback { .. } => "classical_feedback",
            ChannelFamily::Swap { .. } => "swap",
            ChannelFamily::Dephasing { .. } => "dephasing",
            ChannelFamily::Replacer { .. } => "replacer",
            ChannelFamily::FromKraus { .. } => "from_kraus",
            ChannelFamily::FromChoi { .. } => "from_choi",
        }
    }

    /// The family's real parameter, if it has one.
    pub fn parameter(&self) -> Option<f64> {
        match self {
            ChannelFamily::Depolarizing { p, .. }
            | ChannelFamily::Erasure { p, .. }
            | ChannelFamily::PartialSwap { p, .. }
            | ChannelFamily::NoisyCnot { p, .. }
            | ChannelFamily::Dephasing { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// Copy with the real parameter replaced.
    pub fn with_parameter(&self, value: f64) -> Result<ChannelFamily> {
        let mut f = self.clone();
        match &mut f {
            ChannelFamily::Depolarizing { p, .. }
            | ChannelFamily::Erasure { p, .. }
            | ChannelFamily::PartialSwap { p, .. }
            | ChannelFamily::NoisyCnot { p, .. }
            | ChannelFamily::Dephasing { p, .. } => *p = value,
            _ => return Err(Error::InvalidParameter(format!("channel kind {} has no parameter", self.name()))),
        }
        Ok(f)
    }

    /// Short human-readable description, e.g. `partial_swap(d=2,p=0.35)`.
    pub fn describe(&self) -> String {
        match self {
            ChannelFamily::FromKraus { in_dim, out_dim, kraus } => {
                format!("from_kraus(in={in_dim},out={out_dim},k={})", kraus.len())
            }
            ChannelFamily::FromChoi { legs, .. } => {
                let dims: Vec<String> = legs.iter().map(|l| format!("{}:{}", l.label, l.dim)).collect();
                format!("from_choi({})", dims.join(","))
            }
            other => {
                let d = match other {
                    ChannelFamily::Identity { d }
                    | ChannelFamily::Depolarizing { d, .. }
                    | ChannelFamily::Erasure { d, .. }
                    | ChannelFamily::PartialSwap { d, .. }
                    | ChannelFamily::NoisyCnot { d, .. }
                    | ChannelFamily::ClassicalFeedback { d }
                    | ChannelFamily::Swap { d }
                    | ChannelFamily::Dephasing { d, .. }
                    | ChannelFamily::Replacer { d } => *d,
                    _ => unreachable!(),
                };
                match other.parameter() {
                    Some(p) => format!("{}(d={d},p={p})", other.name()),
                    None => format!("{}(d={d})", other.name()),
                }
            }
        }
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension d must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("parameter p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<Complex64> {
    m.as_dmatrix().clone()
}

/// `Σ_i |i⟩⟨i| ⊗ X(i)` with `X(i)|j⟩ = |i ⊕ j⟩`.
pub fn cnot_unitary(d: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            u[(i * d + (i + j) % d, i * d + j)] = ONE;
        }
    }
    u
}

/// `√(1−p)·I + i√p·SWAP`.
pub fn partial_swap_unitary(d: usize, p: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(d * d).scale((1.0 - p).sqrt());
    &id + &swap_operator(d).scale_c(Complex64::new(0.0, p.sqrt()))
}

pub fn identity_channel(d: usize) -> ChoiOperator {
    ChoiOperator::point_to_point(gamma_operator(d), d, d).expect("valid")
}

/// Choi operator of `X ↦ Tr[X]·σ`.
pub fn replacer_channel(din: usize, sigma: &ComplexMatrix) -> Result<ChoiOperator> {
    ChoiOperator::point_to_point(kron(&ComplexMatrix::identity(din), sigma), din, sigma.dim())
}

pub fn unitary_channel(u: &ComplexMatrix) -> ChoiOperator {
    choi_from_kraus(&[to_dmatrix(u)], u.dim(), u.dim()).expect("square unitary")
}

/// Bipartite unitary channel on `A ⊗ B` with `d_A = d_B = d`.
pub fn bipartite_unitary_channel(u: &ComplexMatrix, d: usize) -> Result<ChoiOperator> {
    bipartite_choi_from_kraus(&[to_dmatrix(u)], d, d, d, d)
}

/// Kraus operators of the `d`-dimensional depolarizing channel built from the
/// `d²` Heisenberg–Weyl operators.
pub fn depolarizing_kraus(d: usize, p: f64) -> Vec<DMatrix<Complex64>> {
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let w = if a == 0 && b == 0 { 1.0 - p + p / (d * d) as f64 } else { p / (d * d) as f64 };
            let mut k = DMatrix::<Complex64>::zeros(d, d);
            for j in 0..d {
                k[((j + a) % d, j)] = omega.powu((b * j) as u32) * w.sqrt();
            }
            out.push(k);
        }
    }
    out
}

pub fn make(family: &ChannelFamily) -> Result<ChoiOperator> {
    match family {
        ChannelFamily::Identity { d } => {
            check_d(*d)?;
            Ok(identity_channel(*d))
        }
        ChannelFamily::Depolarizing { d, p } => {
            check_d(*d)?;
            check_p(*p)?;
            let pi_term = ComplexMatrix::identity(d * d).scale(p / *d as f64);
            let m = &gamma_operator(*d).scale(1.0 - p) + &pi_term;
            ChoiOperator::point_to_point(m, *d, *d)
        }
        ChannelFamily::Erasure { d, p } => {
            check_d(*d)?;
            check_p(*p)?;
            let (d, e) = (*d, *d);
            let mut kraus = Vec::with_capacity(d + 1);
            let mut embed = DMatrix::<Complex64>::zeros(d + 1, d);
            for i in 0..d {
                embed[(i, i)] = Complex64::new((1.0 - p).sqrt(), 0.0);
            }
            kraus.push(embed);
            for i in 0..d {
                let mut k = DMatrix::<Complex64>::zeros(d + 1, d);
                k[(e, i)] = Complex64::new(p.sqrt(), 0.0);
                kraus.push(k);
            }
            choi_from_kraus(&kraus, d, d + 1)
        }
        ChannelFamily::PartialSwap { d, p } => {
            check_d(*d)?;
            check_p(*p)?;
            bipartite_unitary_channel(&partial_swap_unitary(*d, *p), *d)
        }
        ChannelFamily::Swap { d } => {
            check_d(*d)?;
            bipartite_unitary_channel(&swap_operator(*d), *d)
        }
        ChannelFamily::NoisyCnot { d, p } => {
            check_d(*d)?;
            check_p(*p)?;
            let cnot = bipartite_unitary_channel(&cnot_unitary(*d), *d)?;
            let n = cnot.matrix().dim();
            let replacer = ComplexMatrix::identity(n).scale(1.0 / (d * d) as f64);
            cnot.with_matrix(&cnot.matrix().scale(1.0 - p) + &replacer.scale(*p))
        }
        ChannelFamily::ClassicalFeedback { d } => {
            check_d(*d)?;
            // Γ = Σ_i |i⟩⟨i|_{A′} ⊗ |i⟩⟨i|_B with A and B′ trivial.
            let mut m = ComplexMatrix::zeros(d * d);
            for i in 0..*d {
                m[(i * d + i, i * d + i)] = ONE;
            }
            ChoiOperator::bipartite(m, 1, *d, *d, 1)
        }
        ChannelFamily::Dephasing { d, p } => {
            check_d(*d)?;
            check_p(*p)?;
            // Off-diagonal coherences |ii⟩⟨jj| are damped by 1 − p.
            let mut m = gamma_operator(*d);
            for i in 0..*d {
                for j in 0..*d {
                    if i != j {
                        m[(i * d + i, j * d + j)] *= 1.0 - p;
                    }
                }
            }
            ChoiOperator::point_to_point(m, *d, *d)
        }
        ChannelFamily::Replacer { d } => {
            check_d(*d)?;
            replacer_channel(*d, &ComplexMatrix::identity(*d).scale(1.0 / *d as f64))
        }
        ChannelFamily::FromKraus { in_dim, out_dim, kraus } => {
            let n = in_dim * out_dim;
            let mut ks = Vec::with_capacity(kraus.len());
            for spec in kraus {
                if spec.re.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: spec.re.len() });
                }
                let im = if spec.im.is_empty() { vec![0.0; n] } else { spec.im.clone() };
                if im.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: im.len() });
                }
                ks.push(DMatrix::from_fn(*out_dim, *in_dim, |r, c| {
                    Complex64::new(spec.re[r * in_dim + c], im[r * in_dim + c])
                }));
            }
            choi_from_kraus(&ks, *in_dim, *out_dim)
        }
        ChannelFamily::FromChoi { legs, matrix_re, matrix_im } => {
            let dim: usize = legs.iter().map(|l| l.dim).product();
            let m = ComplexMatrix::from_row_major(dim, matrix_re, matrix_im)?;
            ChoiOperator::new(m, legs.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_kraus, random_state, seeded};

    fn dm(m: &ComplexMatrix) -> DMatrix<Complex64> {
        m.as_dmatrix().clone()
    }

    fn diag_proj(d: usize, i: usize) -> DMatrix<Complex64> {
        dm(&ComplexMatrix::unit(d, i, i))
    }

    #[test]
    fn kraus_examples() {
        let id = choi_from_kraus(&[DMatrix::identity(2, 2)], 2, 2).unwrap();
        assert_eq!(*id.matrix(), gamma_operator(2));
        let deph = choi_from_kraus(&[diag_proj(2, 0), diag_proj(2, 1)], 2, 2).unwrap();
        assert_eq!(*deph.matrix(), ComplexMatrix::from_diag(&[1.0, 0.0, 0.0, 1.0]));
        assert!(choi_from_kraus(&[DMatrix::identity(3, 2)], 2, 2).is_err());
    }

    #[test]
    fn depolarizing_matches_pauli_kraus() {
        for p in [0.0, 0.3, 1.0] {
            let direct = make(&ChannelFamily::Depolarizing { d: 2, p }).unwrap();
            let x = ComplexMatrix::from_real_fn(2, |i, j| if i != j { 1.0 } else { 0.0 });
            let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
            let y = (&x * &z).scale_c(Complex64::new(0.0, 1.0));
            let w0 = (1.0 - 3.0 * p / 4.0).sqrt();
            let w = (p / 4.0).sqrt();
            let ks = [ComplexMatrix::identity(2).scale(w0), x.scale(w), y.scale(w), z.scale(w)];
            let via = choi_from_kraus(&ks.iter().map(dm).collect::<Vec<_>>(), 2, 2).unwrap();
            assert!(direct.matrix().max_abs_diff(via.matrix()) < 1e-14);
            let hw = choi_from_kraus(&depolarizing_kraus(2, p), 2, 2).unwrap();
            assert!(direct.matrix().max_abs_diff(hw.matrix()) < 1e-14);
        }
        let d3 = make(&ChannelFamily::Depolarizing { d: 3, p: 0.4 }).unwrap();
        let hw = choi_from_kraus(&depolarizing_kraus(3, 0.4), 3, 3).unwrap();
        assert!(d3.matrix().max_abs_diff(hw.matrix()) < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let mut rng = seeded(21);
        let rho = random_state(2, &mut rng);
        let shape = SystemShape::new(vec![2]).unwrap();
        let id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        assert!(apply(&id, &rho, &shape).unwrap().max_abs_diff(&rho) < 1e-15);
        let dep = make(&ChannelFamily::Depolarizing { d: 2, p: 1.0 }).unwrap();
        let out = apply(&dep, &rho, &shape).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn apply_matches_kraus_route() {
        let mut rng = seeded(22);
        for _ in 0..10 {
            let ks = random_kraus(2, 3, 3, &mut rng);
            let ch = choi_from_kraus(&ks, 2, 3).unwrap();
            let rho = random_state(2, &mut rng);
            let a = apply(&ch, &rho, &SystemShape::new(vec![2]).unwrap()).unwrap();
            assert!(a.max_abs_diff(&apply_kraus(&ks, &rho)) < 1e-10);
            // On half of a bipartite state the untouched factor is the leading one.
            let rho2 = random_state(4, &mut rng);
            let full: Vec<DMatrix<Complex64>> =
                ks.iter().map(|k| DMatrix::<Complex64>::identity(2, 2).kronecker(k)).collect();
            let b = apply(&ch, &rho2, &SystemShape::new(vec![2, 2]).unwrap()).unwrap();
            assert!(b.max_abs_diff(&apply_kraus(&full, &rho2)) < 1e-10);
        }
    }

    #[test]
    fn identity_apply_is_identity_on_many_states() {
        let mut rng = seeded(23);
        let id = make(&ChannelFamily::Identity { d: 3 }).unwrap();
        let shape = SystemShape::new(vec![3]).unwrap();
        for _ in 0..100 {
            let rho = random_state(3, &mut rng);
            assert!(apply(&id, &rho, &shape).unwrap().max_abs_diff(&rho) < 1e-14);
        }
    }

    #[test]
    fn compose_examples() {
        let mut rng = seeded(24);
        let n = choi_from_kraus(&random_kraus(2, 2, 2, &mut rng), 2, 2).unwrap();
        let id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        assert!(compose_serial(&n, &id).unwrap().matrix().max_abs_diff(n.matrix()) < 1e-14);
        assert!(compose_serial(&id, &n).unwrap().matrix().max_abs_diff(n.matrix()) < 1e-14);
        let deph = make(&ChannelFamily::Dephasing { d: 2, p: 1.0 }).unwrap();
        assert!(compose_serial(&deph, &deph).unwrap().matrix().max_abs_diff(deph.matrix()) < 1e-15);
        let k1 = random_kraus(2, 3, 2, &mut rng);
        let k2 = random_kraus(3, 2, 2, &mut rng);
        let prod: Vec<DMatrix<Complex64>> = k2.iter().flat_map(|b| k1.iter().map(move |a| b * a)).collect();
        let oracle = choi_from_kraus(&prod, 2, 2).unwrap();
        let composed =
            compose_serial(&choi_from_kraus(&k1, 2, 3).unwrap(), &choi_from_kraus(&k2, 3, 2).unwrap()).unwrap();
        assert!(composed.matrix().max_abs_diff(oracle.matrix()) < 1e-10);
        assert!(compose_serial(&id, &make(&ChannelFamily::Identity { d: 3 }).unwrap()).is_err());
    }

    #[test]
    fn compose_bipartite_matches_kraus_product() {
        let mut rng = seeded(25);
        let k1 = random_kraus(4, 4, 2, &mut rng);
        let k2 = random_kraus(4, 4, 2, &mut rng);
        let prod: Vec<DMatrix<Complex64>> = k2.iter().flat_map(|b| k1.iter().map(move |a| b * a)).collect();
        let oracle = bipartite_choi_from_kraus(&prod, 2, 2, 2, 2).unwrap();
        let c = compose_serial(
            &bipartite_choi_from_kraus(&k1, 2, 2, 2, 2).unwrap(),
            &bipartite_choi_from_kraus(&k2, 2, 2, 2, 2).unwrap(),
        )
        .unwrap();
        assert!(c.is_canonical_bipartite());
        assert!(c.matrix().max_abs_diff(oracle.matrix()) < 1e-10);
    }

    #[test]
    fn tensor_local_examples() {
        let id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        let t = tensor_local(&id, &id).unwrap();
        assert_eq!(*t.matrix(), kron(&gamma_operator(2), &gamma_operator(2)));
        let rep = make(&ChannelFamily::Replacer { d: 2 }).unwrap();
        let rr = tensor_local(&rep, &rep).unwrap();
        let cnot1 = make(&ChannelFamily::NoisyCnot { d: 2, p: 1.0 }).unwrap();
        assert!(rr.matrix().max_abs_diff(cnot1.matrix()) < 1e-15);
        let dd = tensor_local(
            &make(&ChannelFamily::Depolarizing { d: 2, p: 0.3 }).unwrap(),
            &make(&ChannelFamily::Dephasing { d: 3, p: 0.5 }).unwrap(),
        )
        .unwrap();
        assert!(dd.is_tp().unwrap() && dd.is_cp().unwrap());
    }

    #[test]
    fn family_endpoints() {
        let id2 = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        let ps0 = make(&ChannelFamily::PartialSwap { d: 2, p: 0.0 }).unwrap();
        assert!(ps0.matrix().max_abs_diff(tensor_local(&id2, &id2).unwrap().matrix()) < 1e-15);
        let dep0 = make(&ChannelFamily::Depolarizing { d: 2, p: 0.0 }).unwrap();
        assert_eq!(dep0.matrix(), id2.matrix());
        let ps1 = make(&ChannelFamily::PartialSwap { d: 2, p: 1.0 }).unwrap();
        let swap = make(&ChannelFamily::Swap { d: 2 }).unwrap();
        assert!(ps1.matrix().max_abs_diff(swap.matrix()) < 1e-15);
    }

    #[test]
    fn constructors_are_cptp() {
        let families = [
            ChannelFamily::Identity { d: 3 },
            ChannelFamily::Depolarizing { d: 3, p: 0.25 },
            ChannelFamily::Erasure { d: 2, p: 0.4 },
            ChannelFamily::PartialSwap { d: 2, p: 0.35 },
            ChannelFamily::PartialSwap { d: 3, p: 0.7 },
            ChannelFamily::NoisyCnot { d: 2, p: 0.2 },
            ChannelFamily::NoisyCnot { d: 3, p: 0.6 },
            ChannelFamily::ClassicalFeedback { d: 3 },
            ChannelFamily::Swap { d: 2 },
            ChannelFamily::Dephasing { d: 3, p: 0.5 },
            ChannelFamily::Replacer { d: 2 },
        ];
        for f in &families {
            let c = make(f).unwrap();
            assert!(c.is_cp().unwrap(), "{f:?} not CP");
            assert!(c.is_tp().unwrap(), "{f:?} not TP");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(make(&ChannelFamily::Depolarizing { d: 2, p: 1.5 }).is_err());
        assert!(make(&ChannelFamily::NoisyCnot { d: 1, p: 0.5 }).is_err());
        assert!(make(&ChannelFamily::Erasure { d: 2, p: -0.1 }).is_err());
    }

    #[test]
    fn erasure_flags_last_basis_vector() {
        let e = make(&ChannelFamily::Erasure { d: 2, p: 1.0 }).unwrap();
        let out = apply(&e, &ComplexMatrix::unit(2, 0, 0), &SystemShape::new(vec![2]).unwrap()).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::unit(3, 2, 2)) < 1e-15);
    }

    #[test]
    fn dephasing_partial_strength() {
        let d = make(&ChannelFamily::Dephasing { d: 2, p: 0.5 }).unwrap();
        let plus = ComplexMatrix::from_real_fn(2, |_, _| 0.5);
        let out = apply(&d, &plus, &SystemShape::new(vec![2]).unwrap()).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::from_real_fn(2, |i, j| if i == j { 0.5 } else { 0.25 })) < 1e-15);
    }

    #[test]
    fn signaling_and_ppt_predicates() {
        let fb = make(&ChannelFamily::ClassicalFeedback { d: 2 }).unwrap();
        assert!(is_nonsignaling_a_to_b(&fb).unwrap());
        assert!(is_cpptp(&fb).unwrap());
        let mut rng = seeded(26);
        let e = choi_from_kraus(&random_kraus(2, 2, 2, &mut rng), 2, 2).unwrap();
        let f = choi_from_kraus(&random_kraus(2, 3, 2, &mut rng), 2, 3).unwrap();
        assert!(is_nonsignaling_a_to_b(&tensor_local(&e, &f).unwrap()).unwrap());
        let id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        assert!(is_cpptp(&tensor_local(&id, &id).unwrap()).unwrap());
        let swap = make(&ChannelFamily::Swap { d: 2 }).unwrap();
        assert!(!is_nonsignaling_a_to_b(&swap).unwrap());
        assert!(!is_cpptp(&swap).unwrap());
        let swap_pt = partial_transpose(swap.matrix(), &swap.shape(), &[2, 3]).unwrap();
        assert!(swap_pt.min_eigenvalue().unwrap() < -0.5);
    }

    #[test]
    fn partial_swap_choi_is_rank_one() {
        for p in [0.1, 0.5, 0.9] {
            let c = make(&ChannelFamily::PartialSwap { d: 2, p }).unwrap();
            let ev = c.matrix().eigenvalues().unwrap();
            assert!((ev[15] - 4.0).abs() < 1e-9);
            assert!(ev[..15].iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn channel_json_round_trip() {
        let f: ChannelFamily = serde_json::from_str(r#"{"kind":"partial_swap","d":2,"p":0.35}"#).unwrap();
        assert_eq!(f, ChannelFamily::PartialSwap { d: 2, p: 0.35 });
        let deph: ChannelFamily = serde_json::from_str(r#"{"kind":"dephasing","d":2}"#).unwrap();
        assert_eq!(deph, ChannelFamily::Dephasing { d: 2, p: 1.0 });
        let id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        let (re, im) = id.matrix().to_row_major();
        let json = serde_json::json!({
            "kind": "from_choi",
            "legs": [["A", 2, "in"], ["B'", 2, "out"]],
            "matrix_re": re, "matrix_im": im,
        });
        let g: ChannelFamily = serde_json::from_value(json).unwrap();
        assert_eq!(make(&g).unwrap(), id);
        assert_eq!(serde_json::to_value(&g).unwrap()["legs"][1], serde_json::json!(["B'", 2, "out"]));
    }

    #[test]
    fn parallel_with_identity_legs() {
        let cnot = make(&ChannelFamily::NoisyCnot { d: 2, p: 0.3 }).unwrap();
        let alice_id = ChoiOperator::bipartite(gamma_operator(2), 2, 2, 1, 1).unwrap();
        let wide = tensor_parallel(&cnot, &alice_id).unwrap();
        assert_eq!(wide.bipartite_dims().unwrap(), [4, 4, 2, 2]);
        assert!(wide.is_cptp().unwrap());
        let p2p_id = make(&ChannelFamily::Identity { d: 2 }).unwrap();
        assert_eq!(tensor_parallel(&cnot, &p2p_id).unwrap().bipartite_dims().unwrap(), [4, 2, 2, 4]);
    }
}
