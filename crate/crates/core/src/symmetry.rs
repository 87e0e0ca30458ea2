//! Group symmetries of channels: bicovariance, Choi twirling, Werner states
//! and invariant subspaces used to shrink SDPs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::ChoiOperator;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, kron, kron_all, swap_operator, ComplexMatrix, ONE, ZERO};
use crate::sdp::{AffineMatrixExpr, LinearMap, VarId};

/// Tolerance for unitarity of group elements.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for the bicovariance test on Choi operators.
pub const COVARIANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    UuDesign,
    PauliBicovariance,
    Custom,
}

/// One group element acting as `N ∘ (U_A ⊗ V_B)` on inputs and
/// `(W_{A′} ⊗ Y_{B′}) ∘ N` on outputs.
#[derive(Clone, Debug)]
pub struct BiUnitary {
    pub u_a: ComplexMatrix,
    pub v_b: ComplexMatrix,
    pub w_ap: ComplexMatrix,
    pub y_bp: ComplexMatrix,
}

impl BiUnitary {
    fn dims(&self) -> [usize; 4] {
        [self.u_a.dim(), self.w_ap.dim(), self.v_b.dim(), self.y_bp.dim()]
    }

    /// `Ū_A ⊗ W_{A′} ⊗ V̄_B ⊗ Y_{B′}` in canonical leg order: a map is
    /// bicovariant iff its Choi operator commutes with this unitary.
    pub fn choi_action(&self) -> ComplexMatrix {
        kron_all([&self.u_a.conj(), &self.w_ap, &self.v_b.conj(), &self.y_bp])
    }

    /// `U_A ⊗ V_B` on the joint input.
    pub fn input_action(&self) -> ComplexMatrix {
        kron(&self.u_a, &self.v_b)
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    pub kind: GroupKind,
    pub elements: Vec<BiUnitary>,
}

fn is_unitary(u: &ComplexMatrix) -> bool {
    (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.dim())) <= UNITARY_TOL
}

/// Heisenberg–Weyl operator `X^a Z^b` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩`.
pub fn heisenberg_weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let mut m = ComplexMatrix::zeros(d);
    for j in 0..d {
        m[((j + a) % d, j)] = omega.powu(((b * j) % d) as u32);
    }
    m
}

/// Representative with its first non-negligible entry real and positive.
fn fix_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let z = u.as_dmatrix().iter().copied().find(|z| z.norm() > 1e-8).unwrap_or(ONE);
    u.scale_c(z.conj() / z.norm())
}

/// The 24 single-qubit Clifford unitaries modulo phase, generated from H and S.
pub fn clifford_group() -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real_fn(2, |i, j| if i == 1 && j == 1 { -s } else { s });
    let ph = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => Complex64::new(0.0, 1.0),
        _ => ZERO,
    });
    let mut found = vec![ComplexMatrix::identity(2)];
    let mut frontier = found.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for gen in [&h, &ph] {
                let c = fix_phase(&(gen * g));
                if !found.iter().any(|f| f.max_abs_diff(&c) < 1e-9) {
                    found.push(c.clone());
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    found
}

impl SymmetryGroup {
    pub fn new(kind: GroupKind, elements: Vec<BiUnitary>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidParameter("a symmetry group needs at least one element".into()))?
            .dims();
        for e in &elements {
            if e.dims() != first {
                return Err(Error::LegMismatch(format!("group element dims {:?} differ from {:?}", e.dims(), first)));
            }
            for u in [&e.u_a, &e.v_b, &e.w_ap, &e.y_bp] {
                if !is_unitary(u) {
                    return Err(Error::InvalidParameter("group element is not unitary".into()));
                }
            }
        }
        Ok(SymmetryGroup { kind, elements })
    }

    /// `U ⊗ U` on inputs and outputs of a two-qubit bipartite channel, with
    /// `U` ranging over the single-qubit Clifford group.
    pub fn uu_design(d: usize) -> Result<Self> {
        if d != 2 {
            return Err(Error::Unsupported(format!("uu_design is available for d = 2 only, got {d}")));
        }
        let elements = clifford_group()
            .into_iter()
            .map(|u| BiUnitary { u_a: u.clone(), v_b: u.clone(), w_ap: u.clone(), y_bp: u })
            .collect();
        Self::new(GroupKind::UuDesign, elements)
    }

    /// The generalized-Pauli bicovariance of the CNOT `|i,j⟩ ↦ |i, i+j⟩`:
    /// inputs `X^a Z^b ⊗ X^c Z^e`, outputs `X^a Z^{b−e} ⊗ X^{a+c} Z^e`.
    pub fn pauli_bicovariance(d: usize) -> Result<Self> {
        let hw = |a: usize, b: usize| heisenberg_weyl(d, a % d, b % d);
        let mut elements = Vec::with_capacity(d.pow(4));
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        elements.push(BiUnitary {
                            u_a: hw(a, b),
                            v_b: hw(c, e),
                            w_ap: hw(a, b + d - e),
                            y_bp: hw(a + c, e),
                        });
                    }
                }
            }
        }
        Self::new(GroupKind::PauliBicovariance, elements)
    }

    /// Independent generalized Paulis on each side, mapped to themselves:
    /// the symmetry of local product channels such as `id ⊗ id`.
    pub fn local_pauli(d: usize) -> Result<Self> {
        let mut elements = Vec::with_capacity(d.pow(4));
        for a in 0..d * d {
            for c in 0..d * d {
                let u = heisenberg_weyl(d, a / d, a % d);
                let v = heisenberg_weyl(d, c / d, c % d);
                elements.push(BiUnitary { u_a: u.clone(), v_b: v.clone(), w_ap: u, y_bp: v });
            }
        }
        Self::new(GroupKind::Custom, elements)
    }

    /// Covariance `N(P ρ P†) = P N(ρ) P†` of a point-to-point channel, with
    /// `P` ranging over the generalized Paulis.
    pub fn pauli_covariance(d: usize) -> Result<Self> {
        let one = ComplexMatrix::identity(1);
        let elements = (0..d * d)
            .map(|k| {
                let p = heisenberg_weyl(d, k / d, k % d);
                BiUnitary { u_a: p.clone(), v_b: one.clone(), w_ap: one.clone(), y_bp: p }
            })
            .collect();
        Self::new(GroupKind::Custom, elements)
    }

    /// Dimensions `(d_A, d_A′, d_B, d_B′)` the group acts on.
    pub fn dims(&self) -> [usize; 4] {
        self.elements[0].dims()
    }

    fn check_dims(&self, choi: &ChoiOperator) -> Result<()> {
        let dims = choi.bipartite_dims()?;
        if dims != self.dims() {
            return Err(Error::LegMismatch(format!("group acts on dims {:?}, operator has {:?}", self.dims(), dims)));
        }
        Ok(())
    }

    /// The unitaries whose conjugation twirls a Choi operator.
    pub fn choi_actions(&self) -> Vec<ComplexMatrix> {
        self.elements.iter().map(BiUnitary::choi_action).collect()
    }

    /// Whether the input representation is a unitary one-design, i.e. its
    /// average sends every input state to the maximally mixed one.
    pub fn input_is_one_design(&self) -> bool {
        let reps: Vec<ComplexMatrix> = self.elements.iter().map(BiUnitary::input_action).collect();
        let d = reps[0].dim();
        let target = ComplexMatrix::identity(d).scale(1.0 / d as f64);
        (0..d).all(|i| {
            let ei = ComplexMatrix::unit(d, i, i);
            twirl_with(&reps, &ei).max_abs_diff(&target) <= COVARIANCE_TOL
        }) && {
            // off-diagonal units must average to zero as well
            (0..d).all(|i| (0..d).all(|j| i == j || twirl_with(&reps, &ComplexMatrix::unit(d, i, j)).max_abs() <= COVARIANCE_TOL))
        }
    }
}

/// `(1/|G|) Σ_g G_g X G_g†`
pub fn twirl_with(actions: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(x.dim());
    for g in actions {
        acc += &x.congruence(g);
    }
    acc.scale(1.0 / actions.len() as f64)
}

/// True iff `N ∘ (U_A ⊗ V_B) = (W_{A′} ⊗ Y_{B′}) ∘ N` for every element.
pub fn check_bicovariant(n: &ChoiOperator, g: &SymmetryGroup) -> Result<bool> {
    g.check_dims(n)?;
    let m = n.to_bipartite()?;
    Ok(g.choi_actions().iter().all(|a| m.matrix().congruence(a).max_abs_diff(m.matrix()) <= COVARIANCE_TOL))
}

pub fn twirl_choi(m: &ChoiOperator, g: &SymmetryGroup) -> Result<ChoiOperator> {
    g.check_dims(m)?;
    let b = m.to_bipartite()?;
    m.with_matrix(twirl_with(&g.choi_actions(), b.matrix()).hermitian_part())
}

fn fixed_space_split(actions: &[ComplexMatrix], dim: usize) -> Result<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
    for a in actions {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
        }
    }
    let basis = hermitian_basis(dim);
    let n = basis.len();
    let images: Vec<ComplexMatrix> = basis.iter().map(|b| twirl_with(actions, b)).collect();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            p[(i, j)] = basis[i].inner_re(&images[j]);
        }
    }
    let p = (&p + p.transpose()) * 0.5;
    let eig = SymmetricEigen::new(p);
    let combine = |k: usize| {
        let mut m = ComplexMatrix::zeros(dim);
        for (i, b) in basis.iter().enumerate() {
            let c = eig.eigenvectors[(i, k)];
            if c.abs() > 1e-15 {
                m += &b.scale(c);
            }
        }
        m.hermitian_part()
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (mut fixed, mut moving) = (Vec::new(), Vec::new());
    for k in order {
        if eig.eigenvalues[k] > 0.5 {
            fixed.push(combine(k));
        } else {
            moving.push(combine(k));
        }
    }
    Ok((fixed, moving))
}

/// Orthonormal Hermitian basis of `{X : G X G† = X for all G}`.
pub fn invariant_basis(actions: &[ComplexMatrix], dim: usize) -> Result<Vec<ComplexMatrix>> {
    Ok(fixed_space_split(actions, dim)?.0)
}

/// Linear equalities `Tr[B_k X] = 0`, one for each direction `B_k` of the
/// orthogonal complement of the fixed subspace, forcing `X = twirl(X)`.
pub fn covariance_constraints(var: VarId, actions: &[ComplexMatrix]) -> Result<Vec<AffineMatrixExpr>> {
    let (_, moving) = fixed_space_split(actions, var.dim())?;
    moving.into_iter().map(|b| AffineMatrixExpr::var(var).map(LinearMap::InnerProduct(b))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    pub q: f64,
    pub d: usize,
}

/// `(I ± SWAP)/2`
pub fn symmetric_projectors(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let id = ComplexMatrix::identity(d * d);
    let f = swap_operator(d);
    ((&id + &f).scale(0.5), (&id - &f).scale(0.5))
}

/// `(1−q)·2/(d(d+1))·Π⁺ + q·2/(d(d−1))·Π⁻`
pub fn werner_state(p: WernerParams) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&p.q) {
        return Err(Error::InvalidParameter(format!("Werner parameter q must lie in [0, 1], got {}", p.q)));
    }
    if p.d < 2 {
        return Err(Error::InvalidParameter(format!("Werner states need d ≥ 2, got {}", p.d)));
    }
    let d = p.d as f64;
    let (plus, minus) = symmetric_projectors(p.d);
    Ok(&plus.scale((1.0 - p.q) * 2.0 / (d * (d + 1.0))) + &minus.scale(p.q * 2.0 / (d * (d - 1.0))))
}

/// Average of `(U ⊗ U) ρ (U ⊗ U)†` over the qubit Clifford group.
pub fn twirl_uu(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    let actions: Vec<ComplexMatrix> = clifford_group().iter().map(|u| kron(u, u)).collect();
    Ok(twirl_with(&actions, rho))
}
