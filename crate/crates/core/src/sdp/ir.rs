//! Declarative SDPs over complex Hermitian matrix variables.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SystemShape};

pub type CMat = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub(crate) index: usize,
    pub(crate) dim: usize,
}

impl VarId {
    pub fn index(self) -> usize {
        self.index
    }

    pub fn dim(self) -> usize {
        self.dim
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Hermitian,
    Scalar,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub dim: usize,
    pub kind: VarKind,
    /// Real-linear span the variable is restricted to; `None` means all
    /// Hermitian matrices of the given dimension.
    pub basis: Option<Vec<ComplexMatrix>>,
}

impl Variable {
    pub fn n_coords(&self) -> usize {
        match &self.basis {
            Some(b) => b.len(),
            None => self.dim * self.dim,
        }
    }

    /// Matrix at real coordinates `x`.
    pub fn assemble(&self, x: &[f64]) -> ComplexMatrix {
        match &self.basis {
            Some(basis) => {
                let mut m = ComplexMatrix::zeros(self.dim);
                for (xi, b) in x.iter().zip(basis) {
                    if *xi != 0.0 {
                        m += &b.scale(*xi);
                    }
                }
                m
            }
            None => from_hermitian_coordinates(self.dim, x),
        }
    }

    /// Basis matrix of coordinate `k`.
    pub fn basis_element(&self, k: usize) -> ComplexMatrix {
        match &self.basis {
            Some(b) => b[k].clone(),
            None => hermitian_basis_element(self.dim, k),
        }
    }
}

/// Element `k` of [`linalg::hermitian_basis`] without building the whole list.
fn hermitian_basis_element(dim: usize, k: usize) -> ComplexMatrix {
    if k < dim {
        return ComplexMatrix::unit(dim, k, k);
    }
    let mut idx = dim;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for p in 0..dim {
        for q in (p + 1)..dim {
            if idx == k || idx + 1 == k {
                let mut m = ComplexMatrix::zeros(dim);
                if idx == k {
                    m[(p, q)] = Complex64::new(s, 0.0);
                    m[(q, p)] = Complex64::new(s, 0.0);
                } else {
                    m[(p, q)] = Complex64::new(0.0, s);
                    m[(q, p)] = Complex64::new(0.0, -s);
                }
                return m;
            }
            idx += 2;
        }
    }
    panic!("basis index {k} out of range for dimension {dim}");
}

fn from_hermitian_coordinates(dim: usize, x: &[f64]) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(dim);
    for p in 0..dim {
        m[(p, p)] = Complex64::new(x[p], 0.0);
    }
    let mut k = dim;
    for p in 0..dim {
        for q in (p + 1)..dim {
            let z = Complex64::new(x[k] * s, x[k + 1] * s);
            m[(p, q)] = z;
            m[(q, p)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Real-linear maps applied to matrix-valued terms, in order.
#[derive(Clone, Debug)]
pub enum LinearMap {
    /// `X ↦ L X L†` (`L` may be rectangular).
    Congruence(CMat),
    /// `X ↦ L X`
    LeftMul(CMat),
    /// `X ↦ X R`
    RightMul(CMat),
    /// `X ↦ C ⊗ X`
    KronLeft(ComplexMatrix),
    /// `X ↦ X ⊗ C`
    KronRight(ComplexMatrix),
    PartialTrace { shape: SystemShape, traced: Vec<usize> },
    PartialTranspose { shape: SystemShape, systems: Vec<usize> },
    Permute { shape: SystemShape, perm: Vec<usize> },
    Scale(f64),
    /// Places `X` in block `(row, col)` of a block matrix with the given block
    /// sizes, and `X†` in block `(col, row)` when they differ.
    BlockEmbed { blocks: Vec<usize>, row: usize, col: usize },
    /// `X ↦ [Tr(K X)]` as a `1 × 1` matrix.
    InnerProduct(ComplexMatrix),
}

fn square(m: &CMat, what: &str) -> Result<ComplexMatrix> {
    ComplexMatrix::from_dmatrix(m.clone())
        .map_err(|_| Error::MalformedProblem(format!("{what} needs a square operand, got {}x{}", m.nrows(), m.ncols())))
}

impl LinearMap {
    pub fn output_shape(&self, rows: usize, cols: usize) -> Result<(usize, usize)> {
        let need_square = |what: &str, n: usize| -> Result<()> {
            if rows != cols || rows != n {
                return Err(Error::MalformedProblem(format!("{what} expects {n}x{n}, got {rows}x{cols}")));
            }
            Ok(())
        };
        match self {
            LinearMap::Congruence(l) => {
                if l.ncols() != rows || rows != cols {
                    return Err(Error::MalformedProblem(format!(
                        "congruence by {}x{} on {rows}x{cols}",
                        l.nrows(),
                        l.ncols()
                    )));
                }
                Ok((l.nrows(), l.nrows()))
            }
            LinearMap::LeftMul(l) => {
                if l.ncols() != rows {
                    return Err(Error::MalformedProblem(format!("left multiply {}x{} on {rows}x{cols}", l.nrows(), l.ncols())));
                }
                Ok((l.nrows(), cols))
            }
            LinearMap::RightMul(r) => {
                if r.nrows() != cols {
                    return Err(Error::MalformedProblem(format!("right multiply {}x{} on {rows}x{cols}", r.nrows(), r.ncols())));
                }
                Ok((rows, r.ncols()))
            }
            LinearMap::KronLeft(c) | LinearMap::KronRight(c) => Ok((rows * c.dim(), cols * c.dim())),
            LinearMap::PartialTrace { shape, traced } => {
                need_square("partial trace", shape.total())?;
                let kept = shape.total() / shape.sub_total(traced);
                Ok((kept, kept))
            }
            LinearMap::PartialTranspose { shape, .. } | LinearMap::Permute { shape, .. } => {
                need_square("subsystem map", shape.total())?;
                Ok((rows, cols))
            }
            LinearMap::Scale(_) => Ok((rows, cols)),
            LinearMap::BlockEmbed { blocks, row, col } => {
                if *row >= blocks.len() || *col >= blocks.len() || blocks[*row] != rows || blocks[*col] != cols {
                    return Err(Error::MalformedProblem(format!(
                        "block embed of {rows}x{cols} at ({row},{col}) in blocks {blocks:?}"
                    )));
                }
                let n: usize = blocks.iter().sum();
                Ok((n, n))
            }
            LinearMap::InnerProduct(k) => {
                need_square("inner product", k.dim())?;
                Ok((1, 1))
            }
        }
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        Ok(match self {
            LinearMap::Congruence(l) => l * x * l.adjoint(),
            LinearMap::LeftMul(l) => l * x,
            LinearMap::RightMul(r) => x * r,
            LinearMap::KronLeft(c) => c.as_dmatrix().kronecker(x),
            LinearMap::KronRight(c) => x.kronecker(c.as_dmatrix()),
            LinearMap::PartialTrace { shape, traced } => {
                linalg::partial_trace(&square(x, "partial trace")?, shape, traced)?.into_dmatrix()
            }
            LinearMap::PartialTranspose { shape, systems } => {
                linalg::partial_transpose(&square(x, "partial transpose")?, shape, systems)?.into_dmatrix()
            }
            LinearMap::Permute { shape, perm } => {
                linalg::permute_systems(&square(x, "permute")?, shape, perm)?.into_dmatrix()
            }
            LinearMap::Scale(s) => x * Complex64::new(*s, 0.0),
            LinearMap::BlockEmbed { blocks, row, col } => {
                let n: usize = blocks.iter().sum();
                let off = |k: usize| blocks[..k].iter().sum::<usize>();
                let (r0, c0) = (off(*row), off(*col));
                let mut out = CMat::zeros(n, n);
                out.view_mut((r0, c0), (x.nrows(), x.ncols())).copy_from(x);
                if row != col {
                    out.view_mut((c0, r0), (x.ncols(), x.nrows())).copy_from(&x.adjoint());
                }
                out
            }
            LinearMap::InnerProduct(k) => CMat::from_element(1, 1, (k.as_dmatrix() * x).trace()),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub var: VarId,
    pub maps: Vec<LinearMap>,
}

/// `Σ_t maps_t(X_t) + constant`, a possibly rectangular matrix expression.
#[derive(Clone, Debug)]
pub struct AffineMatrixExpr {
    rows: usize,
    cols: usize,
    terms: Vec<Term>,
    constant: Option<CMat>,
}

impl From<VarId> for AffineMatrixExpr {
    fn from(v: VarId) -> Self {
        AffineMatrixExpr { rows: v.dim, cols: v.dim, terms: vec![Term { var: v, maps: vec![] }], constant: None }
    }
}

impl AffineMatrixExpr {
    pub fn var(v: VarId) -> Self {
        v.into()
    }

    pub fn constant(c: &ComplexMatrix) -> Self {
        AffineMatrixExpr { rows: c.dim(), cols: c.dim(), terms: vec![], constant: Some(c.as_dmatrix().clone()) }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        AffineMatrixExpr { rows, cols, terms: vec![], constant: None }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant_part(&self) -> Option<&CMat> {
        self.constant.as_ref()
    }

    /// Applies `map` to every term and to the constant.
    pub fn map(mut self, map: LinearMap) -> Result<Self> {
        let (r, c) = map.output_shape(self.rows, self.cols)?;
        if let Some(k) = &self.constant {
            self.constant = Some(map.apply(k)?);
        }
        for t in &mut self.terms {
            t.maps.push(map.clone());
        }
        self.rows = r;
        self.cols = c;
        Ok(self)
    }

    pub fn scale(self, s: f64) -> Self {
        self.map(LinearMap::Scale(s)).expect("scaling preserves shape")
    }

    pub fn add(mut self, other: AffineMatrixExpr) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::MalformedProblem(format!(
                "adding {:?} and {:?} expressions",
                self.shape(),
                other.shape()
            )));
        }
        self.terms.extend(other.terms);
        self.constant = match (self.constant, other.constant) {
            (Some(a), Some(b)) => Some(a + b),
            (a, b) => a.or(b),
        };
        Ok(self)
    }

    pub fn sub(self, other: AffineMatrixExpr) -> Result<Self> {
        self.add(other.scale(-1.0))
    }

    pub fn plus_constant(self, c: &ComplexMatrix) -> Result<Self> {
        self.add(AffineMatrixExpr::constant(c))
    }

    /// Evaluates the linear part on a single term's variable value.
    pub fn apply_term(term: &Term, value: &CMat) -> Result<CMat> {
        let mut x = value.clone();
        for m in &term.maps {
            x = m.apply(&x)?;
        }
        Ok(x)
    }

    /// Value at the given variable assignments (indexed by variable).
    pub fn evaluate(&self, values: &[ComplexMatrix]) -> Result<CMat> {
        let mut out = self.constant.clone().unwrap_or_else(|| CMat::zeros(self.rows, self.cols));
        for t in &self.terms {
            out += Self::apply_term(t, values[t.var.index].as_dmatrix())?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    pub expr: AffineMatrixExpr,
}

/// `Σ Re Tr[C_k X_k] + constant`, minimized.
#[derive(Clone, Debug, Default)]
pub struct Objective {
    pub terms: Vec<(VarId, ComplexMatrix)>,
    pub constant: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    pub variables: Vec<Variable>,
    pub psd: Vec<Constraint>,
    pub eq: Vec<Constraint>,
    pub objective: Objective,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hermitian(&mut self, name: &str, dim: usize) -> VarId {
        self.push_var(Variable { name: name.into(), dim, kind: VarKind::Hermitian, basis: None })
    }

    /// Hermitian variable restricted to the real span of `basis`.
    pub fn hermitian_in_span(&mut self, name: &str, dim: usize, basis: Vec<ComplexMatrix>) -> Result<VarId> {
        for b in &basis {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
            }
            b.check_hermitian()?;
        }
        Ok(self.push_var(Variable { name: name.into(), dim, kind: VarKind::Hermitian, basis: Some(basis) }))
    }

    pub fn scalar(&mut self, name: &str) -> VarId {
        self.push_var(Variable { name: name.into(), dim: 1, kind: VarKind::Scalar, basis: None })
    }

    fn push_var(&mut self, v: Variable) -> VarId {
        let id = VarId { index: self.variables.len(), dim: v.dim };
        self.variables.push(v);
        id
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.index]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(|index| VarId { index, dim: self.variables[index].dim })
    }

    fn check_expr(&self, expr: &AffineMatrixExpr, what: &str) -> Result<()> {
        if expr.rows != expr.cols {
            return Err(Error::MalformedProblem(format!("{what}: expression is {}x{}", expr.rows, expr.cols)));
        }
        for t in &expr.terms {
            if t.var.index >= self.variables.len() || self.variables[t.var.index].dim != t.var.dim {
                return Err(Error::MalformedProblem(format!("{what}: undeclared variable {}", t.var.index)));
            }
        }
        Ok(())
    }

    /// `expr ⪰ 0`
    pub fn add_psd(&mut self, name: &str, expr: AffineMatrixExpr) -> Result<()> {
        self.check_expr(&expr, name)?;
        self.psd.push(Constraint { name: name.into(), expr });
        Ok(())
    }

    /// `expr = 0`
    pub fn add_eq(&mut self, name: &str, expr: AffineMatrixExpr) -> Result<()> {
        self.check_expr(&expr, name)?;
        self.eq.push(Constraint { name: name.into(), expr });
        Ok(())
    }

    /// Adds `Re Tr[c · X]` to the objective.
    pub fn minimize_term(&mut self, var: VarId, c: ComplexMatrix) -> Result<()> {
        if c.dim() != var.dim {
            return Err(Error::DimensionMismatch { expected: var.dim, found: c.dim() });
        }
        c.check_hermitian()?;
        self.objective.terms.push((var, c));
        Ok(())
    }

    /// Adds the scalar variable itself to the objective.
    pub fn minimize_scalar(&mut self, var: VarId) -> Result<()> {
        self.minimize_term(var, ComplexMatrix::identity(1))
    }

    /// Adds `Tr[X]` to the objective.
    pub fn minimize_trace(&mut self, var: VarId) -> Result<()> {
        self.minimize_term(var, ComplexMatrix::identity(var.dim))
    }

    pub fn n_coords(&self) -> usize {
        self.variables.iter().map(Variable::n_coords).sum()
    }

    pub fn objective_value(&self, values: &[ComplexMatrix]) -> f64 {
        self.objective.constant
            + self.objective.terms.iter().map(|(v, c)| c.inner_re(&values[v.index])).sum::<f64>()
    }

    /// A zero assignment of the right shapes.
    pub fn zero_assignment(&self) -> Vec<ComplexMatrix> {
        self.variables.iter().map(|v| ComplexMatrix::zeros(v.dim)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};

    #[test]
    fn basis_elements_match_linalg() {
        let full = linalg::hermitian_basis(4);
        for (k, b) in full.iter().enumerate() {
            assert_eq!(&hermitian_basis_element(4, k), b);
        }
        let mut rng = seeded(31);
        let h = random_hermitian(4, &mut rng);
        let x = linalg::hermitian_coordinates(&h);
        assert!(from_hermitian_coordinates(4, &x).max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn expression_evaluation_follows_map_order() {
        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 2);
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let c = ComplexMatrix::from_diag(&[1.0, 3.0]);
        let e = AffineMatrixExpr::var(x)
            .map(LinearMap::KronLeft(c.clone()))
            .unwrap()
            .map(LinearMap::PartialTrace { shape, traced: vec![0] })
            .unwrap()
            .scale(0.5);
        let mut rng = seeded(32);
        let v = random_hermitian(2, &mut rng);
        let out = e.evaluate(&[v.clone()]).unwrap();
        let expected = v.scale(2.0);
        assert!(ComplexMatrix::from_dmatrix(out).unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn block_embed_places_adjoint() {
        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 2);
        let l = CMat::from_row_slice(3, 2, &[ONE_, linalg::ZERO, linalg::ZERO, ONE_, ONE_, ONE_]);
        let e = AffineMatrixExpr::var(x)
            .map(LinearMap::LeftMul(l.clone()))
            .unwrap()
            .map(LinearMap::BlockEmbed { blocks: vec![3, 2], row: 0, col: 1 })
            .unwrap();
        assert_eq!(e.shape(), (5, 5));
        let v = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let out = e.evaluate(&[v.clone()]).unwrap();
        let lx = &l * v.as_dmatrix();
        assert_eq!(out.view((0, 3), (3, 2)).into_owned(), lx);
        assert_eq!(out.view((3, 0), (2, 3)).into_owned(), lx.adjoint());
        assert!(ComplexMatrix::from_dmatrix(out).unwrap().is_hermitian());
    }

    const ONE_: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn shape_errors_are_reported() {
        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 2);
        let y = p.hermitian("Y", 3);
        assert!(AffineMatrixExpr::var(x).add(AffineMatrixExpr::var(y)).is_err());
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        assert!(AffineMatrixExpr::var(x).map(LinearMap::PartialTrace { shape, traced: vec![0] }).is_err());
    }
}
