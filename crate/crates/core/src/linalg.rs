//! Dense complex linear algebra over tensor-product index structure.
//!
//! Subsystems are listed left to right. The digit of factor `k` in a global
//! row or column index strides by the product of the dimensions of the
//! factors to its right (row-major), so `kron(a, b)` places `a` on factor 0.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues within this fraction of the largest magnitude are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemShape {
    dims: Vec<usize>,
}

/// Spectral decomposition `m = U diag(values) U†`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimension must be positive, got {d}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Dimension of the product of the listed subsystems.
    pub fn sub_total(&self, systems: &[usize]) -> usize {
        systems.iter().map(|&k| self.dims[k]).product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn check_indices(&self, systems: &[usize]) -> Result<()> {
        for &k in systems {
            if k >= self.dims.len() {
                return Err(Error::SubsystemOutOfRange { index: k, count: self.dims.len() });
            }
        }
        Ok(())
    }

    /// Global-index offsets of every multi-index over `systems` (in the order given),
    /// enumerated row-major in that order.
    fn offsets(&self, systems: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &k in systems {
            let mut next = Vec::with_capacity(out.len() * self.dims[k]);
            for &base in &out {
                for i in 0..self.dims[k] {
                    next.push(base + i * strides[k]);
                }
            }
            out = next;
        }
        out
    }

    fn complement(&self, systems: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|k| !systems.contains(k)).collect()
    }

    pub fn without(&self, systems: &[usize]) -> SystemShape {
        SystemShape { dims: self.complement(systems).iter().map(|&k| self.dims[k]).collect() }
    }

    pub fn permuted(&self, perm: &[usize]) -> SystemShape {
        SystemShape { dims: perm.iter().map(|&k| self.dims[k]).collect() }
    }
}

impl From<&[usize]> for SystemShape {
    fn from(dims: &[usize]) -> Self {
        SystemShape::new(dims.to_vec()).expect("positive subsystem dimensions")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { data: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { data: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { data: DMatrix::from_fn(dim, dim, f) }
    }

    pub fn from_real_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(dim, |i, j| Complex64::new(f(i, j), 0.0))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_row_major(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        let n2 = dim * dim;
        if re.len() != n2 {
            return Err(Error::DimensionMismatch { expected: n2, found: re.len() });
        }
        if im.len() != n2 {
            return Err(Error::DimensionMismatch { expected: n2, found: im.len() });
        }
        Ok(Self::from_fn(dim, |i, j| Complex64::new(re[i * dim + j], im[i * dim + j])))
    }

    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.nrows(), found: data.ncols() });
        }
        Ok(Self { data })
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, |i, j| v[i] * v[j].conj())
    }

    /// `|i⟩⟨j|` in dimension `dim`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn to_row_major(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(self.data[(i, j)].re);
                im.push(self.data[(i, j)].im);
            }
        }
        (re, im)
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn conj(&self) -> Self {
        Self { data: self.data.map(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Real part of the trace.
    pub fn tr(&self) -> f64 {
        self.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: self.data.map(|z| z * s) }
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        Self { data: self.data.map(|z| z * s) }
    }

    /// `Re Tr[self · other]`
    pub fn inner_re(&self, other: &ComplexMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.data[(i, j)];
                let b = other.data[(j, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            Err(Error::NotHermitian { max_deviation: dev })
        } else {
            Ok(())
        }
    }

    /// `(M + M†)/2`. Only for products that are Hermitian in exact arithmetic.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| (self.data[(i, j)] + self.data[(j, i)].conj()) * 0.5)
    }

    /// `a · m · a†`, Hermitian by construction when `m` is.
    pub fn congruence(&self, a: &ComplexMatrix) -> Self {
        let data = &a.data * &self.data * a.data.adjoint();
        Self { data }.hermitian_part()
    }

    /// Rectangular congruence `v · m · v†` for `v` with `m.dim()` columns.
    pub fn congruence_rect(&self, v: &DMatrix<Complex64>) -> Self {
        let data = v * &self.data * v.adjoint();
        Self { data }.hermitian_part()
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        kron(self, other)
    }

    pub fn eig_hermitian(&self) -> Result<HermitianEigen> {
        eig_hermitian(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(self)?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or(0.0))
    }

    /// PSD within `tol` times the identity.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.data[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.data[idx]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data + &rhs.data }
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: self.data + rhs.data }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.data += &rhs.data;
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data - &rhs.data }
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: self.data - rhs.data }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data * &rhs.data }
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: self.data * rhs.data }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -&self.data }
    }
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix { data: a.data.kronecker(&b.data) }
}

/// Tensor product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors.into_iter().fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

fn check_shape(m: &ComplexMatrix, shape: &SystemShape) -> Result<()> {
    if shape.total() != m.dim() {
        return Err(Error::DimensionMismatch { expected: shape.total(), found: m.dim() });
    }
    Ok(())
}

fn dedup_sorted(systems: &[usize]) -> Vec<usize> {
    let mut s = systems.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Traces out the listed subsystems; the remaining ones keep their order.
pub fn partial_trace(m: &ComplexMatrix, shape: &SystemShape, traced: &[usize]) -> Result<ComplexMatrix> {
    check_shape(m, shape)?;
    shape.check_indices(traced)?;
    let traced = dedup_sorted(traced);
    let kept = shape.complement(&traced);
    let kept_off = shape.offsets(&kept);
    let traced_off = shape.offsets(&traced);
    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m.data[(ra + t, cb + t)];
            }
            out.data[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Applies the transpose map on each listed subsystem.
pub fn partial_transpose(
    m: &ComplexMatrix,
    shape: &SystemShape,
    transposed: &[usize],
) -> Result<ComplexMatrix> {
    check_shape(m, shape)?;
    shape.check_indices(transposed)?;
    let transposed = dedup_sorted(transposed);
    let kept = shape.complement(&transposed);
    let kept_off = shape.offsets(&kept);
    let t_off = shape.offsets(&transposed);
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for &ka in &kept_off {
        for &kb in &kept_off {
            for &ta in &t_off {
                for &tb in &t_off {
                    out.data[(ka + ta, kb + tb)] = m.data[(ka + tb, kb + ta)];
                }
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: output factor `j` is input factor `perm[j]`.
pub fn permute_systems(m: &ComplexMatrix, shape: &SystemShape, perm: &[usize]) -> Result<ComplexMatrix> {
    check_shape(m, shape)?;
    let map = permutation_index_map(shape, perm)?;
    let n = m.dim();
    Ok(ComplexMatrix::from_fn(n, |i, j| m.data[(map[i], map[j])]))
}

/// For each global index of the permuted space, the corresponding index of the
/// original space.
pub fn permutation_index_map(shape: &SystemShape, perm: &[usize]) -> Result<Vec<usize>> {
    let k = shape.len();
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    // offsets() enumerates the listed systems row-major in the listed order,
    // which is exactly the index order of the permuted space.
    Ok(shape.offsets(perm))
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (j, &p) in perm.iter().enumerate() {
        inv[p] = j;
    }
    inv
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.check_hermitian()?;
    let n = m.dim();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0) });
    }
    let eig = SymmetricEigen::new(m.data.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

impl HermitianEigen {
    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Eigenvalues at or below this magnitude are treated as zero.
    pub fn support_threshold(&self, support_tol: f64) -> f64 {
        support_tol * self.spectral_radius()
    }

    /// `U diag(g) U†` for per-eigenvalue weights.
    pub fn reconstruct_with(&self, weights: &[f64]) -> ComplexMatrix {
        let u = &self.vectors.data;
        let n = u.nrows();
        let mut scaled = u.clone();
        for j in 0..n {
            let w = weights[j];
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        ComplexMatrix { data: scaled * u.adjoint() }.hermitian_part()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(&self.values)
    }

    /// Applies `f` to the spectrum; eigenvalues within the support threshold map to 0.
    pub fn apply(&self, f: impl Fn(f64) -> f64, support_tol: f64) -> Result<ComplexMatrix> {
        let thr = self.support_threshold(support_tol);
        let mut weights = Vec::with_capacity(self.values.len());
        for &v in &self.values {
            if v.abs() <= thr {
                weights.push(0.0);
            } else {
                let fv = f(v);
                if !fv.is_finite() {
                    return Err(Error::FunctionUndefined { eigenvalue: v });
                }
                weights.push(fv);
            }
        }
        Ok(self.reconstruct_with(&weights))
    }

    /// Orthonormal basis (as columns) of the eigenspaces above the support threshold.
    pub fn support_basis(&self, support_tol: f64) -> DMatrix<Complex64> {
        let thr = self.support_threshold(support_tol);
        let cols: Vec<usize> = (0..self.values.len()).filter(|&k| self.values[k].abs() > thr).collect();
        let n = self.values.len();
        DMatrix::from_fn(n, cols.len(), |i, j| self.vectors.data[(i, cols[j])])
    }

    pub fn rank(&self, support_tol: f64) -> usize {
        let thr = self.support_threshold(support_tol);
        self.values.iter().filter(|v| v.abs() > thr).count()
    }
}

/// Spectral matrix function with support projection.
pub fn mat_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64, support_tol: f64) -> Result<ComplexMatrix> {
    eig_hermitian(m)?.apply(f, support_tol)
}

/// Operator norm of a Hermitian matrix (largest eigenvalue magnitude).
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.spectral_radius())
}

/// Trace norm of a Hermitian matrix (sum of eigenvalue magnitudes).
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|v| v.abs()).sum())
}

/// Projector onto the support of a Hermitian matrix.
pub fn support_projector(m: &ComplexMatrix, support_tol: f64) -> Result<ComplexMatrix> {
    mat_fn(m, |_| 1.0, support_tol)
}

/// Whether `supp(a) ⊆ supp(b)` for PSD `a`, `b`.
pub fn support_contained(a: &ComplexMatrix, b: &ComplexMatrix, support_tol: f64) -> Result<bool> {
    let pb = support_projector(b, support_tol)?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let outside = &ComplexMatrix::identity(b.dim()) - &pb;
    let leak = a.congruence(&outside);
    Ok(leak.max_abs() <= 1e-8 * scale)
}

/// Unnormalized maximally entangled vector `Σ_i |i⟩|i⟩`.
pub fn gamma_vector(d: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = ONE;
    }
    v
}

/// `|Γ⟩⟨Γ|` on two `d`-dimensional systems.
pub fn gamma_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::projector(&gamma_vector(d))
}

/// Swap operator `Σ |i⟩⟨j| ⊗ |j⟩⟨i|`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = ONE;
        }
    }
    s
}

/// Orthonormal (Hilbert–Schmidt) basis of `dim × dim` Hermitian matrices:
/// diagonal units, then `(E_pq + E_qp)/√2` and `i(E_pq − E_qp)/√2` for `p < q`.
pub fn hermitian_basis(dim: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(dim * dim);
    for p in 0..dim {
        basis.push(ComplexMatrix::unit(dim, p, p));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for p in 0..dim {
        for q in (p + 1)..dim {
            let mut re = ComplexMatrix::zeros(dim);
            re[(p, q)] = Complex64::new(s, 0.0);
            re[(q, p)] = Complex64::new(s, 0.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(dim);
            im[(p, q)] = Complex64::new(0.0, s);
            im[(q, p)] = Complex64::new(0.0, -s);
            basis.push(im);
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coordinates(m: &ComplexMatrix) -> Vec<f64> {
    let dim = m.dim();
    let s = std::f64::consts::SQRT_2;
    let mut x = Vec::with_capacity(dim * dim);
    for p in 0..dim {
        x.push(m[(p, p)].re);
    }
    for p in 0..dim {
        for q in (p + 1)..dim {
            x.push(s * m[(p, q)].re);
            x.push(s * m[(p, q)].im);
        }
    }
    x
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, seeded};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn trace_of_kron_factorizes(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let mut rng = seeded(seed);
            let x = random_matrix(da, &mut rng);
            let y = random_matrix(db, &mut rng);
            let shape = SystemShape::new(vec![da, db]).unwrap();
            let t = partial_trace(&kron(&x, &y), &shape, &[1]).unwrap();
            prop_assert!(t.max_abs_diff(&x.scale_c(y.trace())) < 1e-12);
        }

        #[test]
        fn partial_transpose_preserves_hermiticity_and_trace(seed in any::<u64>(), sys in 0usize..3) {
            let mut rng = seeded(seed);
            let shape = SystemShape::new(vec![2, 3, 2]).unwrap();
            let h = random_hermitian(12, &mut rng);
            let t = partial_transpose(&h, &shape, &[sys]).unwrap();
            prop_assert!(t.is_hermitian());
            prop_assert!((t.trace() - h.trace()).norm() < 1e-12);
            let back = partial_transpose(&t, &shape, &[sys]).unwrap();
            prop_assert_eq!(back, h);
        }
    }
}
