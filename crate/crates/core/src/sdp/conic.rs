//! Real conic programs over nonnegative orthants and PSD cones, solved by a
//! primal-dual interior-point method on the homogeneous self-dual embedding
//! with Nesterov–Todd scaling and Mehrotra correction.
//!
//! Primal: `min cᵀx  s.t.  Gx + s = h,  Ax = b,  s ∈ K`.
//! Dual:   `max −hᵀz − bᵀy  s.t.  Gᵀz + Aᵀy + c = 0,  z ∈ K`.
//! PSD cone vectors use `svec`: the lower triangle, column-major, with
//! off-diagonal entries scaled by √2 so that the dot product is the trace
//! inner product.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    /// `R^k_+`
    NonNeg(usize),
    /// Real symmetric `m × m` matrices, stored as `svec` of length `m(m+1)/2`.
    Psd(usize),
}

impl ConeKind {
    pub fn vec_len(self) -> usize {
        match self {
            ConeKind::NonNeg(k) => k,
            ConeKind::Psd(m) => m * (m + 1) / 2,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            ConeKind::NonNeg(k) => k,
            ConeKind::Psd(m) => m,
        }
    }
}

/// One column of a cone's `G` block: variable index and nonzero vector entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCol {
    pub col: usize,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeBlock {
    pub kind: ConeKind,
    pub g_cols: Vec<SparseCol>,
    pub h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeProblem {
    pub n: usize,
    pub c: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub cones: Vec<ConeBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unbounded,
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub infeas_tol: f64,
    pub max_iter: usize,
    pub near_feas_tol: f64,
    pub near_gap_tol: f64,
}

impl Default for ConicOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            gap_tol: 1e-9,
            infeas_tol: 1e-8,
            max_iter: 100,
            near_feas_tol: 1e-6,
            near_gap_tol: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicSolution {
    pub status: ConicStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub s: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

pub fn svec(mat: &DMatrix<f64>) -> Vec<f64> {
    let m = mat.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(m * (m + 1) / 2);
    for j in 0..m {
        for i in j..m {
            v.push(if i == j { mat[(i, j)] } else { s2 * 0.5 * (mat[(i, j)] + mat[(j, i)]) });
        }
    }
    v
}

pub fn smat(v: &[f64], m: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut mat = DMatrix::zeros(m, m);
    let mut k = 0;
    for j in 0..m {
        for i in j..m {
            if i == j {
                mat[(i, i)] = v[k];
            } else {
                mat[(i, j)] = v[k] * s;
                mat[(j, i)] = v[k] * s;
            }
            k += 1;
        }
    }
    mat
}

fn svec_pos(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    j * m - j * j.saturating_sub(1) / 2 + (i - j)
}

/// `(row, col)` of each `svec` position for an `m × m` matrix.
fn svec_coords(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for j in 0..m {
        for i in j..m {
            out.push((i, j));
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Per-cone Nesterov–Todd scaling.
enum Scaling {
    /// `w = √(s/z)`, `λ = √(sz)`.
    NonNeg { w: Vec<f64>, lambda: Vec<f64> },
    /// `Rᵀ Z R = R⁻¹ S R⁻ᵀ = diag(λ)`.
    Psd { r: DMatrix<f64>, rinv: DMatrix<f64>, pinv: DMatrix<f64>, lambda: Vec<f64> },
}

struct Layout {
    offsets: Vec<usize>,
    total: usize,
    degree: usize,
    coords: Vec<Option<Vec<(usize, usize)>>>,
}

impl Layout {
    fn new(p: &ConeProblem) -> Self {
        let mut offsets = Vec::with_capacity(p.cones.len());
        let mut total = 0;
        let mut degree = 0;
        let mut coords = Vec::with_capacity(p.cones.len());
        for cone in &p.cones {
            offsets.push(total);
            total += cone.kind.vec_len();
            degree += cone.kind.degree();
            coords.push(match cone.kind {
                ConeKind::Psd(m) => Some(svec_coords(m)),
                ConeKind::NonNeg(_) => None,
            });
        }
        Layout { offsets, total, degree, coords }
    }

    fn slice<'a>(&self, v: &'a [f64], k: usize, kind: ConeKind) -> &'a [f64] {
        &v[self.offsets[k]..self.offsets[k] + kind.vec_len()]
    }
}

impl ConeProblem {
    pub fn cone_dim(&self) -> usize {
        self.cones.iter().map(|c| c.kind.vec_len()).sum()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.c.len() != self.n {
            return Err(format!("c has length {} but n = {}", self.c.len(), self.n));
        }
        if self.a.ncols() != self.n && self.a.nrows() > 0 {
            return Err(format!("A has {} columns but n = {}", self.a.ncols(), self.n));
        }
        if self.a.nrows() != self.b.len() {
            return Err(format!("A has {} rows but b has length {}", self.a.nrows(), self.b.len()));
        }
        for (k, cone) in self.cones.iter().enumerate() {
            let len = cone.kind.vec_len();
            if cone.h.len() != len {
                return Err(format!("cone {k}: h has length {} expected {len}", cone.h.len()));
            }
            for col in &cone.g_cols {
                if col.col >= self.n || col.entries.iter().any(|&(i, _)| i >= len) {
                    return Err(format!("cone {k}: column {} out of range", col.col));
                }
            }
        }
        Ok(())
    }

    /// `Gx`, concatenated over cones.
    pub fn g_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cone_dim());
        for cone in &self.cones {
            let mut v = vec![0.0; cone.kind.vec_len()];
            for col in &cone.g_cols {
                let xc = x[col.col];
                if xc != 0.0 {
                    for &(i, g) in &col.entries {
                        v[i] += g * xc;
                    }
                }
            }
            out.extend(v);
        }
        out
    }

    /// `Gᵀz`.
    pub fn gt_mul(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let mut off = 0;
        for cone in &self.cones {
            for col in &cone.g_cols {
                let mut acc = 0.0;
                for &(i, g) in &col.entries {
                    acc += g * z[off + i];
                }
                out[col.col] += acc;
            }
            off += cone.kind.vec_len();
        }
        out
    }

    fn h_vec(&self) -> Vec<f64> {
        self.cones.iter().flat_map(|c| c.h.iter().copied()).collect()
    }

    fn a_mul(&self, x: &[f64]) -> Vec<f64> {
        if self.a.nrows() == 0 {
            return vec![];
        }
        (&self.a * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    fn at_mul(&self, y: &[f64]) -> Vec<f64> {
        if self.a.nrows() == 0 {
            return vec![0.0; self.n];
        }
        (self.a.transpose() * DVector::from_column_slice(y)).as_slice().to_vec()
    }
}

/// Step to the boundary: the largest `α ≤ cap` keeping `e + α·d ∈ K` after
/// normalizing by `λ`, for scaled directions.
fn max_step_scaled(scalings: &[Scaling], layout: &Layout, p: &ConeProblem, ds: &[f64], cap: f64) -> f64 {
    let mut alpha = cap;
    for (k, (cone, sc)) in p.cones.iter().zip(scalings).enumerate() {
        let d = layout.slice(ds, k, cone.kind);
        match sc {
            Scaling::NonNeg { lambda, .. } => {
                for (di, li) in d.iter().zip(lambda) {
                    if *di < 0.0 {
                        alpha = alpha.min(-li / di);
                    }
                }
            }
            Scaling::Psd { lambda, .. } => {
                let m = lambda.len();
                let mut dm = smat(d, m);
                for i in 0..m {
                    for j in 0..m {
                        dm[(i, j)] /= (lambda[i] * lambda[j]).sqrt();
                    }
                }
                let ev = dm.symmetric_eigenvalues();
                let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
                if min < 0.0 {
                    alpha = alpha.min(-1.0 / min);
                }
            }
        }
    }
    alpha
}

/// Jordan product `u ∘ v` in scaled coordinates.
fn jordan(p: &ConeProblem, layout: &Layout, u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total];
    for (k, cone) in p.cones.iter().enumerate() {
        let o = layout.offsets[k];
        match cone.kind {
            ConeKind::NonNeg(len) => {
                for i in 0..len {
                    out[o + i] = u[o + i] * v[o + i];
                }
            }
            ConeKind::Psd(m) => {
                let um = smat(layout.slice(u, k, cone.kind), m);
                let vm = smat(layout.slice(v, k, cone.kind), m);
                let prod = &um * &vm;
                let sym = (&prod + prod.transpose()) * 0.5;
                out[o..o + cone.kind.vec_len()].copy_from_slice(&svec(&sym));
            }
        }
    }
    out
}

/// `λ ⦸ d`: solves `λ ∘ x = d`.
fn jordan_div(p: &ConeProblem, layout: &Layout, scalings: &[Scaling], d: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total];
    for (k, (cone, sc)) in p.cones.iter().zip(scalings).enumerate() {
        let o = layout.offsets[k];
        match sc {
            Scaling::NonNeg { lambda, .. } => {
                for i in 0..lambda.len() {
                    out[o + i] = d[o + i] / lambda[i];
                }
            }
            Scaling::Psd { lambda, .. } => {
                let coords = layout.coords[k].as_ref().expect("psd coords");
                for (idx, &(i, j)) in coords.iter().enumerate() {
                    out[o + idx] = 2.0 * d[o + idx] / (lambda[i] + lambda[j]);
                }
                let _ = cone;
            }
        }
    }
    out
}

fn lambda_vec(p: &ConeProblem, layout: &Layout, scalings: &[Scaling]) -> Vec<f64> {
    let mut out = vec![0.0; layout.total];
    for (k, sc) in scalings.iter().enumerate() {
        let o = layout.offsets[k];
        match sc {
            Scaling::NonNeg { lambda, .. } => out[o..o + lambda.len()].copy_from_slice(lambda),
            Scaling::Psd { lambda, .. } => {
                let m = lambda.len();
                for (i, l) in lambda.iter().enumerate() {
                    out[o + svec_pos(m, i, i)] = *l;
                }
            }
        }
    }
    let _ = p;
    out
}

fn identity_vec(p: &ConeProblem, layout: &Layout) -> Vec<f64> {
    let mut e = vec![0.0; layout.total];
    for (k, cone) in p.cones.iter().enumerate() {
        let o = layout.offsets[k];
        match cone.kind {
            ConeKind::NonNeg(len) => e[o..o + len].iter_mut().for_each(|v| *v = 1.0),
            ConeKind::Psd(m) => {
                for i in 0..m {
                    e[o + svec_pos(m, i, i)] = 1.0;
                }
            }
        }
    }
    e
}

/// Smallest `t` with `v + t·e ∈ K` boundary, i.e. minus the minimal "eigenvalue".
fn min_cone_eig(p: &ConeProblem, layout: &Layout, v: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for (k, cone) in p.cones.iter().enumerate() {
        let s = layout.slice(v, k, cone.kind);
        match cone.kind {
            ConeKind::NonNeg(_) => s.iter().for_each(|x| min = min.min(*x)),
            ConeKind::Psd(m) => {
                let ev = smat(s, m).symmetric_eigenvalues();
                ev.iter().for_each(|x| min = min.min(*x));
            }
        }
    }
    min
}

impl Scaling {
    fn compute(kind: ConeKind, s: &[f64], z: &[f64]) -> Option<Scaling> {
        match kind {
            ConeKind::NonNeg(_) => {
                if s.iter().chain(z).any(|v| *v <= 0.0 || !v.is_finite()) {
                    return None;
                }
                let w = s.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect();
                let lambda = s.iter().zip(z).map(|(a, b)| (a * b).sqrt()).collect();
                Some(Scaling::NonNeg { w, lambda })
            }
            ConeKind::Psd(m) => {
                let sm = smat(s, m);
                let zm = smat(z, m);
                let ls = sm.cholesky()?.l();
                let lz = zm.cholesky()?.l();
                let svd = (lz.transpose() * &ls).svd(true, true);
                let u_t = svd.v_t?;
                let v = u_t.transpose();
                let sig = svd.singular_values;
                if sig.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
                    return None;
                }
                let mut sig_mhalf = DMatrix::zeros(m, m);
                let mut sig_half = DMatrix::zeros(m, m);
                for i in 0..m {
                    sig_mhalf[(i, i)] = 1.0 / sig[i].sqrt();
                    sig_half[(i, i)] = sig[i].sqrt();
                }
                let r = &ls * &v * &sig_mhalf;
                let ls_inv = ls.clone().try_inverse()?;
                let rinv = &sig_half * v.transpose() * ls_inv;
                let pinv = rinv.transpose() * &rinv;
                Some(Scaling::Psd { r, rinv, pinv, lambda: sig.iter().copied().collect() })
            }
        }
    }

    /// `W v` (scaling a dual-side vector).
    fn w_apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::NonNeg { w, .. } => v.iter().zip(w).map(|(a, b)| a * b).collect(),
            Scaling::Psd { r, lambda, .. } => {
                let m = lambda.len();
                svec(&(r.transpose() * smat(v, m) * r))
            }
        }
    }

    /// `Wᵀ v`
    fn wt_apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::NonNeg { w, .. } => v.iter().zip(w).map(|(a, b)| a * b).collect(),
            Scaling::Psd { r, lambda, .. } => {
                let m = lambda.len();
                svec(&(r * smat(v, m) * r.transpose()))
            }
        }
    }

    /// `Q⁻¹ v = (WᵀW)⁻¹ v`
    fn qinv_apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::NonNeg { w, .. } => v.iter().zip(w).map(|(a, b)| a / (b * b)).collect(),
            Scaling::Psd { pinv, lambda, .. } => {
                let m = lambda.len();
                svec(&(pinv * smat(v, m) * pinv))
            }
        }
    }

    /// `Q v`
    fn q_apply(&self, v: &[f64]) -> Vec<f64> {
        self.wt_apply(&self.w_apply(v))
    }
}

fn per_cone(p: &ConeProblem, layout: &Layout, v: &[f64], f: impl Fn(usize, &[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(layout.total);
    for (k, cone) in p.cones.iter().enumerate() {
        out.extend(f(k, layout.slice(v, k, cone.kind)));
    }
    out
}

/// Factorization of the reduced KKT system for fixed scaling.
struct KktFactor {
    chol_m: MFactor,
    chol_s: Option<faer::linalg::solvers::Llt<f64>>,
    minv_at: Mat<f64>,
}

/// Factor of `M = GᵀQ⁻¹G + AᵀA`: Cholesky of `M` itself, or the triangular
/// factor from a QR of `[W⁻ᵀG; A]`, which avoids squaring the conditioning.
enum MFactor {
    Llt(faer::linalg::solvers::Llt<f64>),
    Qr(Mat<f64>),
}

impl MFactor {
    fn solve(&self, rhs: &Mat<f64>) -> Mat<f64> {
        match self {
            MFactor::Llt(l) => l.solve(rhs),
            MFactor::Qr(r) => {
                let mut x = rhs.clone();
                faer::linalg::triangular_solve::solve_lower_triangular_in_place(
                    r.transpose(),
                    x.as_mut(),
                    faer::Par::Seq,
                );
                faer::linalg::triangular_solve::solve_upper_triangular_in_place(r.as_ref(), x.as_mut(), faer::Par::Seq);
                x
            }
        }
    }
}

/// Stacked `[W⁻ᵀG; A; δI]` whose Gram matrix is `M` (plus a tiny shift).
fn scaled_stack(p: &ConeProblem, layout: &Layout, scalings: &[Scaling]) -> Mat<f64> {
    let n = p.n;
    let pe = p.a.nrows();
    let mut b = Mat::<f64>::zeros(layout.total + pe + n, n);
    for (k, (cone, sc)) in p.cones.iter().zip(scalings).enumerate() {
        let off = layout.offsets[k];
        match sc {
            Scaling::NonNeg { w, .. } => {
                for col in &cone.g_cols {
                    for &(i, g) in &col.entries {
                        b[(off + i, col.col)] += g / w[i];
                    }
                }
            }
            Scaling::Psd { rinv, lambda, .. } => {
                let m = lambda.len();
                let q = cone.kind.vec_len();
                for col in &cone.g_cols {
                    let mut gv = vec![0.0; q];
                    for &(idx, g) in &col.entries {
                        gv[idx] = g;
                    }
                    let t = svec(&(rinv * smat(&gv, m) * rinv.transpose()));
                    for (i, v) in t.into_iter().enumerate() {
                        b[(off + i, col.col)] += v;
                    }
                }
            }
        }
    }
    for i in 0..pe {
        for j in 0..n {
            b[(layout.total + i, j)] = p.a[(i, j)];
        }
    }
    let scale = (0..n)
        .map(|j| (0..layout.total + pe).map(|i| b[(i, j)] * b[(i, j)]).sum::<f64>())
        .fold(1e-300, f64::max);
    let delta = (1e-15 * scale).sqrt();
    for j in 0..n {
        b[(layout.total + pe + j, j)] = delta;
    }
    b
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

const KKT_REFINE_STEPS: usize = 20;
/// Relative KKT residual above which the QR factor replaces the Cholesky one.
const KKT_QR_FALLBACK: f64 = 1e-8;

fn llt_with_reg(m: &Mat<f64>) -> Option<faer::linalg::solvers::Llt<f64>> {
    if let Ok(l) = m.llt(Side::Lower) {
        return Some(l);
    }
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(1e-300, f64::max);
    let mut delta = 1e-13 * scale;
    for _ in 0..8 {
        let mut reg = m.clone();
        for i in 0..n {
            reg[(i, i)] += delta;
        }
        if let Ok(l) = reg.llt(Side::Lower) {
            return Some(l);
        }
        delta *= 100.0;
    }
    None
}

/// `Gᵀ Q⁻¹ G` assembled cone by cone.
fn build_h(p: &ConeProblem, layout: &Layout, scalings: &[Scaling]) -> Mat<f64> {
    let n = p.n;
    let mut h = Mat::<f64>::zeros(n, n);
    for (k, (cone, sc)) in p.cones.iter().zip(scalings).enumerate() {
        match sc {
            Scaling::NonNeg { w, .. } => {
                // rows of G for this cone
                let len = cone.kind.vec_len();
                let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); len];
                for col in &cone.g_cols {
                    for &(i, g) in &col.entries {
                        rows[i].push((col.col, g));
                    }
                }
                for (i, row) in rows.iter().enumerate() {
                    let d = 1.0 / (w[i] * w[i]);
                    for &(a, ga) in row {
                        for &(b, gb) in row {
                            h[(a, b)] += d * ga * gb;
                        }
                    }
                }
            }
            Scaling::Psd { pinv, lambda, .. } => {
                let m = lambda.len();
                let coords = layout.coords[k].as_ref().expect("psd coords");
                let ncols = cone.g_cols.len();
                // T_i = P⁻¹ G_i P⁻¹ in svec form, one column per G column.
                let q = cone.kind.vec_len();
                let mut tmat = DMatrix::<f64>::zeros(q, ncols);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for (ci, col) in cone.g_cols.iter().enumerate() {
                    let nnz = col.entries.len();
                    if 2 * nnz < m {
                        // Σ over entries of rank-one/two updates p_a p_bᵀ.
                        let mut t = DMatrix::<f64>::zeros(m, m);
                        for &(idx, g) in &col.entries {
                            let (a, b) = coords[idx];
                            if a == b {
                                for j in 0..m {
                                    let pj = pinv[(a, j)] * g;
                                    for i in j..m {
                                        t[(i, j)] += pinv[(i, a)] * pj;
                                    }
                                }
                            } else {
                                let gs = g * s;
                                for j in 0..m {
                                    let pa = pinv[(a, j)] * gs;
                                    let pb = pinv[(b, j)] * gs;
                                    for i in j..m {
                                        t[(i, j)] += pinv[(i, a)] * pb + pinv[(i, b)] * pa;
                                    }
                                }
                            }
                        }
                        for (idx, &(i, j)) in coords.iter().enumerate() {
                            tmat[(idx, ci)] = if i == j { t[(i, j)] } else { std::f64::consts::SQRT_2 * t[(i, j)] };
                        }
                    } else {
                        let mut gv = vec![0.0; q];
                        for &(idx, g) in &col.entries {
                            gv[idx] = g;
                        }
                        let t = pinv * smat(&gv, m) * pinv;
                        let tv = svec(&t);
                        for idx in 0..q {
                            tmat[(idx, ci)] = tv[idx];
                        }
                    }
                }
                // H_block[i][j] = ⟨G_i, T_j⟩
                for (ci, coli) in cone.g_cols.iter().enumerate() {
                    for (cj, colj) in cone.g_cols.iter().enumerate() {
                        let mut acc = 0.0;
                        for &(idx, g) in &coli.entries {
                            acc += g * tmat[(idx, cj)];
                        }
                        h[(coli.col, colj.col)] += acc;
                    }
                    let _ = ci;
                }
            }
        }
    }
    // symmetrize against round-off
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

impl KktFactor {
    fn new(p: &ConeProblem, h: &Mat<f64>) -> Option<KktFactor> {
        let pe = p.a.nrows();
        let mut m = h.clone();
        if pe > 0 {
            let a = to_faer(&p.a);
            let ata = a.transpose() * &a;
            m += &ata;
        }
        // Free variables that appear in no cone and no equality make M singular;
        // the regularized factorization plus refinement handles near-singularity.
        Self::with_m(p, MFactor::Llt(llt_with_reg(&m)?))
    }

    fn from_qr(p: &ConeProblem, layout: &Layout, scalings: &[Scaling]) -> Option<KktFactor> {
        let stack = scaled_stack(p, layout, scalings);
        let qr = stack.qr();
        let r = qr.thin_R().to_owned();
        if (0..p.n).any(|i| r[(i, i)] == 0.0 || !r[(i, i)].is_finite()) {
            return None;
        }
        Self::with_m(p, MFactor::Qr(r))
    }

    fn with_m(p: &ConeProblem, chol_m: MFactor) -> Option<KktFactor> {
        let pe = p.a.nrows();
        let (minv_at, chol_s) = if pe > 0 {
            let at = to_faer(&p.a.transpose());
            let minv_at = chol_m.solve(&at);
            let a = to_faer(&p.a);
            let s = &a * &minv_at;
            let s = Mat::from_fn(pe, pe, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
            (minv_at, Some(llt_with_reg(&s)?))
        } else {
            (Mat::zeros(p.n, 0), None)
        };
        Some(KktFactor { chol_m, chol_s, minv_at })
    }
}

struct Kkt<'a> {
    p: &'a ConeProblem,
    layout: &'a Layout,
    scalings: &'a [Scaling],
    factor: KktFactor,
}

impl Kkt<'_> {
    fn qinv(&self, v: &[f64]) -> Vec<f64> {
        per_cone(self.p, self.layout, v, |k, s| self.scalings[k].qinv_apply(s))
    }

    fn q(&self, v: &[f64]) -> Vec<f64> {
        per_cone(self.p, self.layout, v, |k, s| self.scalings[k].q_apply(s))
    }

    fn solve_reduced(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.p.n;
        let mut rhsx = r1.to_vec();
        axpy(1.0, &self.p.gt_mul(&self.qinv(r3)), &mut rhsx);
        if !r2.is_empty() {
            axpy(1.0, &self.p.at_mul(r2), &mut rhsx);
        }
        let rx = Mat::from_fn(n, 1, |i, _| rhsx[i]);
        let minv_rx = self.factor.chol_m.solve(&rx);
        let dx: Vec<f64>;
        let dy: Vec<f64>;
        if let Some(chol_s) = &self.factor.chol_s {
            let a_minv_rx = self.p.a_mul(&(0..n).map(|i| minv_rx[(i, 0)]).collect::<Vec<_>>());
            let pe = r2.len();
            let rs = Mat::from_fn(pe, 1, |i, _| a_minv_rx[i] - r2[i]);
            // M = H + AᵀA absorbs A dx = r2, so the solve yields dy − r2.
            let y = chol_s.solve(&rs);
            dy = (0..pe).map(|i| y[(i, 0)] + r2[i]).collect();
            let corr = &self.factor.minv_at * &y;
            dx = (0..n).map(|i| minv_rx[(i, 0)] - corr[(i, 0)]).collect();
        } else {
            dy = vec![];
            dx = (0..n).map(|i| minv_rx[(i, 0)]).collect();
        }
        let mut gdx = self.p.g_mul(&dx);
        axpy(-1.0, r3, &mut gdx);
        let dz = self.qinv(&gdx);
        (dx, dy, dz)
    }

    /// Residual of the full system `[0 Aᵀ Gᵀ; A 0 0; G 0 −Q]`.
    fn residual(&self, sol: &(Vec<f64>, Vec<f64>, Vec<f64>), r: (&[f64], &[f64], &[f64])) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (dx, dy, dz) = sol;
        let mut e1 = r.0.to_vec();
        axpy(-1.0, &self.p.gt_mul(dz), &mut e1);
        if !dy.is_empty() {
            axpy(-1.0, &self.p.at_mul(dy), &mut e1);
        }
        let mut e2 = r.1.to_vec();
        if !e2.is_empty() {
            axpy(-1.0, &self.p.a_mul(dx), &mut e2);
        }
        let mut e3 = r.2.to_vec();
        axpy(-1.0, &self.p.g_mul(dx), &mut e3);
        axpy(1.0, &self.q(dz), &mut e3);
        (e1, e2, e3)
    }

    fn solve(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        self.solve_checked(r1, r2, r3).0
    }

    /// Solution with iterative refinement, and its relative residual.
    fn solve_checked(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> ((Vec<f64>, Vec<f64>, Vec<f64>), f64) {
        let mut sol = self.solve_reduced(r1, r2, r3);
        let scale = 1.0 + norm(r1) + norm(r2) + norm(r3);
        let mut err = f64::INFINITY;
        for _ in 0..KKT_REFINE_STEPS {
            let (e1, e2, e3) = self.residual(&sol, (r1, r2, r3));
            let next = norm(&e1) + norm(&e2) + norm(&e3);
            if next <= 1e-14 * scale || next > 0.9 * err {
                break;
            }
            err = next;
            let (cx, cy, cz) = self.solve_reduced(&e1, &e2, &e3);
            let trial = (
                sol.0.iter().zip(&cx).map(|(a, b)| a + b).collect::<Vec<_>>(),
                sol.1.iter().zip(&cy).map(|(a, b)| a + b).collect::<Vec<_>>(),
                sol.2.iter().zip(&cz).map(|(a, b)| a + b).collect::<Vec<_>>(),
            );
            let (t1, t2, t3) = self.residual(&trial, (r1, r2, r3));
            if norm(&t1) + norm(&t2) + norm(&t3) >= err {
                break;
            }
            sol = trial;
        }
        let (e1, e2, e3) = self.residual(&sol, (r1, r2, r3));
        let rel = (norm(&e1) + norm(&e2) + norm(&e3)) / scale;
        (sol, rel)
    }
}

#[derive(Clone)]
struct Iterate {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    s: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Metrics {
    pres: f64,
    dres: f64,
    pcost: f64,
    dcost: f64,
    rel_gap: f64,
}

fn metrics(p: &ConeProblem, h: &[f64], it: &Iterate, nb: f64, nh: f64, nc: f64) -> Metrics {
    let t = it.tau;
    let x: Vec<f64> = it.x.iter().map(|v| v / t).collect();
    let y: Vec<f64> = it.y.iter().map(|v| v / t).collect();
    let z: Vec<f64> = it.z.iter().map(|v| v / t).collect();
    let s: Vec<f64> = it.s.iter().map(|v| v / t).collect();
    let mut ry = p.a_mul(&x);
    axpy(-1.0, &p.b, &mut ry);
    let mut rz = p.g_mul(&x);
    axpy(1.0, &s, &mut rz);
    axpy(-1.0, h, &mut rz);
    let mut rx = p.gt_mul(&z);
    axpy(1.0, &p.at_mul(&y), &mut rx);
    axpy(1.0, &p.c, &mut rx);
    let pres = (norm(&ry) / nb).max(norm(&rz) / nh);
    let dres = norm(&rx) / nc;
    let pcost = dot(&p.c, &x);
    let dcost = -dot(&p.b, &y) - dot(h, &z);
    let gap = dot(&s, &z).abs().max((pcost - dcost).abs());
    let rel_gap = gap / pcost.abs().min(dcost.abs()).max(1.0);
    Metrics { pres, dres, pcost, dcost, rel_gap }
}

fn finish(status: ConicStatus, it: &Iterate, m: &Metrics, iterations: usize) -> ConicSolution {
    let t = it.tau;
    ConicSolution {
        status,
        x: it.x.iter().map(|v| v / t).collect(),
        y: it.y.iter().map(|v| v / t).collect(),
        z: it.z.iter().map(|v| v / t).collect(),
        s: it.s.iter().map(|v| v / t).collect(),
        primal_value: m.pcost,
        dual_value: m.dcost,
        primal_residual: m.pres,
        dual_residual: m.dres,
        iterations,
    }
}

fn certificate(status: ConicStatus, it: &Iterate, iterations: usize) -> ConicSolution {
    ConicSolution {
        status,
        x: it.x.clone(),
        y: it.y.clone(),
        z: it.z.clone(),
        s: it.s.clone(),
        primal_value: f64::NAN,
        dual_value: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations,
    }
}

fn compute_scalings(p: &ConeProblem, layout: &Layout, s: &[f64], z: &[f64]) -> Option<Vec<Scaling>> {
    p.cones
        .iter()
        .enumerate()
        .map(|(k, cone)| Scaling::compute(cone.kind, layout.slice(s, k, cone.kind), layout.slice(z, k, cone.kind)))
        .collect()
}

fn unit_scalings(p: &ConeProblem) -> Vec<Scaling> {
    p.cones
        .iter()
        .map(|cone| match cone.kind {
            ConeKind::NonNeg(len) => Scaling::NonNeg { w: vec![1.0; len], lambda: vec![1.0; len] },
            ConeKind::Psd(m) => Scaling::Psd {
                r: DMatrix::identity(m, m),
                rinv: DMatrix::identity(m, m),
                pinv: DMatrix::identity(m, m),
                lambda: vec![1.0; m],
            },
        })
        .collect()
}

pub fn solve_conic(p: &ConeProblem, opts: &ConicOptions) -> ConicSolution {
    let layout = Layout::new(p);
    let n = p.n;
    let pe = p.b.len();
    let h = p.h_vec();
    let nb = norm(&p.b).max(1.0);
    let nh = norm(&h).max(1.0);
    let nc = norm(&p.c).max(1.0);
    let e = identity_vec(p, &layout);
    let deg = layout.degree as f64;

    let empty = Iterate { x: vec![0.0; n], y: vec![0.0; pe], z: e.clone(), s: e.clone(), tau: 1.0, kappa: 1.0 };
    let fail = |it: &Iterate, iters| {
        let m = metrics(p, &h, it, nb, nh, nc);
        finish(ConicStatus::Failed, it, &m, iters)
    };

    // Starting point from the W = I system, shifted into the cone interior.
    let unit = unit_scalings(p);
    let hmat = build_h(p, &layout, &unit);
    let Some(factor) = KktFactor::new(p, &hmat) else {
        return fail(&empty, 0);
    };
    let kkt = Kkt { p, layout: &layout, scalings: &unit, factor };
    let zero_n = vec![0.0; n];
    let zero_p = vec![0.0; pe];
    let zero_k = vec![0.0; layout.total];
    let (x0, _, sneg) = kkt.solve(&zero_n, &p.b, &h);
    let neg_c: Vec<f64> = p.c.iter().map(|v| -v).collect();
    let (_, y0, z0) = kkt.solve(&neg_c, &zero_p, &zero_k);
    let mut s0: Vec<f64> = sneg.iter().map(|v| -v).collect();
    let mut z0 = z0;
    let shift = |v: &mut Vec<f64>| {
        let min = min_cone_eig(p, &layout, v);
        if min <= 0.0 || !min.is_finite() {
            let t = if min.is_finite() { 1.0 - min } else { 1.0 };
            if !min.is_finite() {
                v.iter_mut().for_each(|x| *x = 0.0);
            }
            axpy(t, &e, v);
        }
    };
    shift(&mut s0);
    shift(&mut z0);
    let mut it = Iterate { x: x0, y: y0, z: z0, s: s0, tau: 1.0, kappa: 1.0 };
    // Late iterations can lose accuracy to ill-conditioning; a stall falls
    // back to the best iterate seen.
    let mut best: Option<(f64, Iterate)> = None;
    let stalled = |it: &Iterate, best: &Option<(f64, Iterate)>, iter| match best {
        Some((merit, b)) if *merit < merit_of(&metrics(p, &h, it, nb, nh, nc)) => {
            stalled(p, &h, b, nb, nh, nc, opts, iter)
        }
        _ => stalled(p, &h, it, nb, nh, nc, opts, iter),
    };

    for iter in 0..opts.max_iter {
        let m = metrics(p, &h, &it, nb, nh, nc);
        let merit = merit_of(&m);
        if best.as_ref().is_none_or(|(b, _)| merit < *b) {
            best = Some((merit, it.clone()));
        } else if let Some((b, _)) = &best {
            if *b <= opts.near_gap_tol.min(opts.near_feas_tol) && merit > 100.0 * b {
                return stalled(&it, &best, iter);
            }
        }
        if m.pres <= opts.feas_tol && m.dres <= opts.feas_tol && m.rel_gap <= opts.gap_tol {
            return finish(ConicStatus::Optimal, &it, &m, iter);
        }
        // Infeasibility certificates from the unnormalized iterate.
        let by_hz = dot(&p.b, &it.y) + dot(&h, &it.z);
        if by_hz < 0.0 {
            let mut r = p.gt_mul(&it.z);
            axpy(1.0, &p.at_mul(&it.y), &mut r);
            if norm(&r) / (-by_hz) * (nc / nc.max(1.0)) <= opts.infeas_tol && it.tau < it.kappa {
                return certificate(ConicStatus::Infeasible, &it, iter);
            }
        }
        let cx = dot(&p.c, &it.x);
        if cx < 0.0 {
            let ax = p.a_mul(&it.x);
            let mut gs = p.g_mul(&it.x);
            axpy(1.0, &it.s, &mut gs);
            let r = norm(&ax).max(norm(&gs));
            if r / (-cx) <= opts.infeas_tol && it.tau < it.kappa {
                return certificate(ConicStatus::Unbounded, &it, iter);
            }
        }

        let Some(scalings) = compute_scalings(p, &layout, &it.s, &it.z) else {
            return stalled(&it, &best, iter);
        };
        let hmat = build_h(p, &layout, &scalings);
        let Some(factor) = KktFactor::new(p, &hmat) else {
            return stalled(&it, &best, iter);
        };
        let mut kkt = Kkt { p, layout: &layout, scalings: &scalings, factor };
        let neg_c: Vec<f64> = p.c.iter().map(|v| -v).collect();
        let (mut u1, kkt_err) = kkt.solve_checked(&neg_c, &p.b, &h);
        if kkt_err > KKT_QR_FALLBACK {
            if let Some(factor) = KktFactor::from_qr(p, &layout, &scalings) {
                let retry = Kkt { p, layout: &layout, scalings: &scalings, factor };
                let (u, err) = retry.solve_checked(&neg_c, &p.b, &h);
                if err < kkt_err {
                    kkt = retry;
                    u1 = u;
                }
            }
        }
        let lambda = lambda_vec(p, &layout, &scalings);
        let mu = (dot(&it.s, &it.z) + it.tau * it.kappa) / (deg + 1.0);

        // Residuals of the embedding.
        let mut r1 = p.gt_mul(&it.z);
        axpy(1.0, &p.at_mul(&it.y), &mut r1);
        axpy(it.tau, &p.c, &mut r1);
        let mut r2: Vec<f64> = p.b.iter().map(|v| v * it.tau).collect();
        axpy(-1.0, &p.a_mul(&it.x), &mut r2);
        let mut r3: Vec<f64> = h.iter().map(|v| v * it.tau).collect();
        axpy(-1.0, &p.g_mul(&it.x), &mut r3);
        axpy(-1.0, &it.s, &mut r3);
        let r4 = -dot(&p.c, &it.x) - dot(&p.b, &it.y) - dot(&h, &it.z) - it.kappa;

        let denom_base = -dot(&p.c, &u1.0) - dot(&p.b, &u1.1) - dot(&h, &u1.2);

        let direction = |eta: f64, ds: &[f64], dkappa: f64| {
            let w_ds = per_cone(p, &layout, &jordan_div(p, &layout, &scalings, ds), |k, v| scalings[k].wt_apply(v));
            let rhs1: Vec<f64> = r1.iter().map(|v| -eta * v).collect();
            let rhs2: Vec<f64> = r2.iter().map(|v| eta * v).collect();
            let mut rhs3: Vec<f64> = r3.iter().map(|v| eta * v).collect();
            axpy(-1.0, &w_ds, &mut rhs3);
            let u2 = kkt.solve(&rhs1, &rhs2, &rhs3);
            let num = -eta * r4 + dot(&p.c, &u2.0) + dot(&p.b, &u2.1) + dot(&h, &u2.2) + dkappa / it.tau;
            let dtau = num / (it.kappa / it.tau + denom_base);
            let mut dx = u2.0;
            axpy(dtau, &u1.0, &mut dx);
            let mut dy = u2.1;
            axpy(dtau, &u1.1, &mut dy);
            let mut dz = u2.2;
            axpy(dtau, &u1.2, &mut dz);
            // Scaled directions: Δz̃ = WΔz, Δs̃ = λ⦸d_s − Δz̃.
            let dz_s = per_cone(p, &layout, &dz, |k, v| scalings[k].w_apply(v));
            let mut ds_s = jordan_div(p, &layout, &scalings, ds);
            axpy(-1.0, &dz_s, &mut ds_s);
            let dsv = per_cone(p, &layout, &ds_s, |k, v| scalings[k].wt_apply(v));
            let dk = (dkappa - it.kappa * dtau) / it.tau;
            (dx, dy, dz, dsv, dtau, dk, ds_s, dz_s)
        };

        let step_len = |ds_s: &[f64], dz_s: &[f64], dtau: f64, dk: f64, cap: f64| {
            let mut a = max_step_scaled(&scalings, &layout, p, ds_s, cap);
            a = a.min(max_step_scaled(&scalings, &layout, p, dz_s, cap));
            if dtau < 0.0 {
                a = a.min(-it.tau / dtau);
            }
            if dk < 0.0 {
                a = a.min(-it.kappa / dk);
            }
            a
        };

        // Predictor.
        let lam_sq = jordan(p, &layout, &lambda, &lambda);
        let ds_aff: Vec<f64> = lam_sq.iter().map(|v| -v).collect();
        let dk_aff = -it.tau * it.kappa;
        let aff = direction(1.0, &ds_aff, dk_aff);
        let alpha_aff = step_len(&aff.6, &aff.7, aff.4, aff.5, 1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let cross = jordan(p, &layout, &aff.6, &aff.7);
        let mut ds_cc = ds_aff.clone();
        axpy(sigma * mu, &e, &mut ds_cc);
        axpy(-1.0, &cross, &mut ds_cc);
        let dk_cc = dk_aff + sigma * mu - aff.4 * aff.5;
        let (dx, dy, dz, dsv, dtau, dk, ds_s, dz_s) = direction(1.0 - sigma, &ds_cc, dk_cc);
        let alpha = (0.99 * step_len(&ds_s, &dz_s, dtau, dk, 1.0 / 0.99)).min(1.0);
        if !(alpha.is_finite()) || alpha < 1e-10 {
            return stalled(&it, &best, iter);
        }

        axpy(alpha, &dx, &mut it.x);
        axpy(alpha, &dy, &mut it.y);
        axpy(alpha, &dz, &mut it.z);
        axpy(alpha, &dsv, &mut it.s);
        it.tau += alpha * dtau;
        it.kappa += alpha * dk;
        if !(it.tau > 0.0 && it.kappa > 0.0) || it.x.iter().any(|v| !v.is_finite()) {
            return match &best {
                Some((_, b)) => stalled(b, &best, iter + 1),
                None => fail(&it, iter + 1),
            };
        }
    }
    stalled(&it, &best, opts.max_iter)
}

fn merit_of(m: &Metrics) -> f64 {
    m.pres.max(m.dres).max(m.rel_gap)
}

#[allow(clippy::too_many_arguments)]
fn stalled(
    p: &ConeProblem,
    h: &[f64],
    it: &Iterate,
    nb: f64,
    nh: f64,
    nc: f64,
    opts: &ConicOptions,
    iter: usize,
) -> ConicSolution {
    let m = metrics(p, h, it, nb, nh, nc);
    if m.pres <= opts.feas_tol && m.dres <= opts.feas_tol && m.rel_gap <= opts.gap_tol {
        return finish(ConicStatus::Optimal, it, &m, iter);
    }
    let near = m.pres <= opts.near_feas_tol && m.dres <= opts.near_feas_tol && m.rel_gap <= opts.near_gap_tol;
    finish(if near { ConicStatus::NearOptimal } else { ConicStatus::Failed }, it, &m, iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psd_block(m: usize, h: DMatrix<f64>, cols: Vec<(usize, DMatrix<f64>)>) -> ConeBlock {
        ConeBlock {
            kind: ConeKind::Psd(m),
            h: svec(&h),
            g_cols: cols
                .into_iter()
                .map(|(c, g)| SparseCol {
                    col: c,
                    entries: svec(&g).into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn svec_round_trip_and_inner_product() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, 0.0, -1.0, 2.0, 1.5, 0.0, 1.5, -3.0]);
        assert!((smat(&svec(&a), 3) - &a).abs().max() < 1e-14);
        let tr = (&a * &b).trace();
        assert!((dot(&svec(&a), &svec(&b)) - tr).abs() < 1e-12);
        for i in 0..3 {
            for j in 0..=i {
                assert_eq!(svec_coords(3)[svec_pos(3, i, j)], (i, j));
            }
        }
    }

    #[test]
    fn linear_program() {
        // min x0 + 2 x1  s.t. x0 + x1 = 1, x ≥ 0  →  1 at (1, 0)
        let p = ConeProblem {
            n: 2,
            c: vec![1.0, 2.0],
            a: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            b: vec![1.0],
            cones: vec![ConeBlock {
                kind: ConeKind::NonNeg(2),
                h: vec![0.0, 0.0],
                g_cols: vec![
                    SparseCol { col: 0, entries: vec![(0, -1.0)] },
                    SparseCol { col: 1, entries: vec![(1, -1.0)] },
                ],
            }],
        };
        let sol = solve_conic(&p, &ConicOptions::default());
        assert_eq!(sol.status, ConicStatus::Optimal);
        assert!((sol.primal_value - 1.0).abs() < 1e-8);
        assert!((sol.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn eigenvalue_epigraph() {
        // min t  s.t. t I − diag(1, 2) ⪰ 0
        let p = ConeProblem {
            n: 1,
            c: vec![1.0],
            a: DMatrix::zeros(0, 1),
            b: vec![],
            cones: vec![psd_block(
                2,
                -DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
                vec![(0, -DMatrix::identity(2, 2))],
            )],
        };
        let sol = solve_conic(&p, &ConicOptions::default());
        assert_eq!(sol.status, ConicStatus::Optimal);
        assert!((sol.primal_value - 2.0).abs() < 1e-8, "{}", sol.primal_value);
        assert!((sol.dual_value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_lp_detected() {
        // x ≥ 1 and x ≤ 0
        let p = ConeProblem {
            n: 1,
            c: vec![0.0],
            a: DMatrix::zeros(0, 1),
            b: vec![],
            cones: vec![ConeBlock {
                kind: ConeKind::NonNeg(2),
                h: vec![-1.0, 0.0],
                g_cols: vec![SparseCol { col: 0, entries: vec![(0, -1.0), (1, 1.0)] }],
            }],
        };
        assert_eq!(solve_conic(&p, &ConicOptions::default()).status, ConicStatus::Infeasible);
    }

    #[test]
    fn unbounded_lp_detected() {
        // min −x  s.t. x ≥ 0
        let p = ConeProblem {
            n: 1,
            c: vec![-1.0],
            a: DMatrix::zeros(0, 1),
            b: vec![],
            cones: vec![ConeBlock {
                kind: ConeKind::NonNeg(1),
                h: vec![0.0],
                g_cols: vec![SparseCol { col: 0, entries: vec![(0, -1.0)] }],
            }],
        };
        assert_eq!(solve_conic(&p, &ConicOptions::default()).status, ConicStatus::Unbounded);
    }
}
