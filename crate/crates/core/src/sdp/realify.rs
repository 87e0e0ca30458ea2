//! Complex Hermitian SDP → real conic program.
//!
//! Each Hermitian variable is expanded in an orthonormal Hermitian basis (or
//! its declared basis), so variable coordinates are real. A Hermitian PSD
//! expression `X = X_R + iX_I` of dimension `d > 1` becomes the real block
//! `[[X_R, −X_I], [X_I, X_R]]` of dimension `2d`; dimension-1 expressions are
//! nonnegativity constraints. Objective coefficients are taken directly as
//! `Re Tr[C B_k]` in these coordinates, so no rescaling is involved.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde_json::json;

use super::conic::{svec, ConeBlock, ConeKind, ConeProblem, SparseCol};
use super::ir::{AffineMatrixExpr, CMat, SdpProblem};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Relative size below which realified coefficients are dropped.
const DROP_TOL: f64 = 1e-15;
/// Relative singular-value cutoff for redundant equality rows.
const EQ_RANK_TOL: f64 = 1e-10;
/// Tolerance on the consistency of redundant equality rows.
const EQ_CONSISTENCY_TOL: f64 = 1e-9;

/// `[[Re M, −Im M], [Im M, Re M]]`
pub fn realify_matrix(m: &ComplexMatrix) -> DMatrix<f64> {
    realify_cmat(m.as_dmatrix())
}

fn realify_cmat(m: &CMat) -> DMatrix<f64> {
    let n = m.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    r
}

/// Inverse of [`realify_matrix`], averaging the redundant copies.
pub fn derealify_matrix(r: &DMatrix<f64>) -> Result<ComplexMatrix> {
    if r.nrows() != r.ncols() || r.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: r.ncols(), found: r.nrows() });
    }
    let n = r.nrows() / 2;
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        let re = 0.5 * (r[(i, j)] + r[(i + n, j + n)]);
        let im = 0.5 * (r[(i + n, j)] - r[(i, j + n)]);
        num_complex::Complex64::new(re, im)
    }))
}

/// Real conic form of an [`SdpProblem`] plus what is needed to map back.
#[derive(Clone, Debug)]
pub struct RealProblem {
    pub conic: ConeProblem,
    pub var_offsets: Vec<usize>,
    pub objective_constant: f64,
    pub eq_rows_raw: usize,
    pub eq_rank: usize,
    /// Largest violation of redundant equality rows (nonzero means inconsistent).
    pub eq_inconsistency: f64,
}

impl RealProblem {
    pub fn assignments(&self, p: &SdpProblem, x: &[f64]) -> Vec<ComplexMatrix> {
        p.variables
            .iter()
            .enumerate()
            .map(|(k, v)| v.assemble(&x[self.var_offsets[k]..self.var_offsets[k] + v.n_coords()]))
            .collect()
    }
}

/// Linear part of `expr` per global coordinate, plus the constant.
fn expand(p: &SdpProblem, offsets: &[usize], expr: &AffineMatrixExpr) -> Result<(BTreeMap<usize, CMat>, CMat)> {
    let (rows, cols) = expr.shape();
    let mut cols_map: BTreeMap<usize, CMat> = BTreeMap::new();
    for term in expr.terms() {
        let var = &p.variables[term.var.index()];
        for k in 0..var.n_coords() {
            let b = var.basis_element(k);
            let e = AffineMatrixExpr::apply_term(term, b.as_dmatrix())?;
            let col = offsets[term.var.index()] + k;
            match cols_map.get_mut(&col) {
                Some(acc) => *acc += e,
                None => {
                    cols_map.insert(col, e);
                }
            }
        }
    }
    let constant = expr.constant_part().cloned().unwrap_or_else(|| CMat::zeros(rows, cols));
    Ok((cols_map, constant))
}

fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(name: &str, m: &CMat, scale: f64) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > 1e-9 * scale.max(1.0) {
        return Err(Error::MalformedProblem(format!(
            "constraint {name} is not Hermitian-valued (deviation {dev:.2e})"
        )));
    }
    Ok(())
}

fn cmat_max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn realify(p: &SdpProblem) -> Result<RealProblem> {
    let mut offsets = Vec::with_capacity(p.variables.len());
    let mut n = 0;
    for v in &p.variables {
        offsets.push(n);
        n += v.n_coords();
    }

    let mut c = vec![0.0; n];
    for (var, cm) in &p.objective.terms {
        let v = &p.variables[var.index()];
        for k in 0..v.n_coords() {
            c[offsets[var.index()] + k] += cm.inner_re(&v.basis_element(k));
        }
    }

    let mut cones = Vec::with_capacity(p.psd.len());
    for con in &p.psd {
        let (cols, constant) = expand(p, &offsets, &con.expr)?;
        let d = con.expr.dim();
        let scale = cols.values().map(cmat_max_abs).fold(cmat_max_abs(&constant), f64::max);
        check_hermitian(&con.name, &constant, scale)?;
        for e in cols.values() {
            check_hermitian(&con.name, e, scale)?;
        }
        let drop = DROP_TOL * scale.max(1.0);
        if d == 1 {
            let g_cols = cols
                .iter()
                .filter(|(_, e)| e[(0, 0)].re.abs() > drop)
                .map(|(&col, e)| SparseCol { col, entries: vec![(0, -e[(0, 0)].re)] })
                .collect();
            cones.push(ConeBlock { kind: ConeKind::NonNeg(1), g_cols, h: vec![constant[(0, 0)].re] });
        } else {
            let g_cols = cols
                .iter()
                .map(|(&col, e)| {
                    let v = svec(&realify_cmat(e));
                    SparseCol {
                        col,
                        entries: v.into_iter().enumerate().filter(|(_, x)| x.abs() > drop).map(|(i, x)| (i, -x)).collect(),
                    }
                })
                .filter(|sc| !sc.entries.is_empty())
                .collect();
            cones.push(ConeBlock { kind: ConeKind::Psd(2 * d), g_cols, h: svec(&realify_cmat(&constant)) });
        }
    }

    // Equalities in Hermitian coordinates, then reduced to independent rows.
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for con in &p.eq {
        let (cols, constant) = expand(p, &offsets, &con.expr)?;
        let d = con.expr.dim();
        let scale = cols.values().map(cmat_max_abs).fold(cmat_max_abs(&constant), f64::max);
        check_hermitian(&con.name, &constant, scale)?;
        let base = rows.len();
        let to_coords = |m: &CMat| linalg::hermitian_coordinates(&ComplexMatrix::from_dmatrix(m.clone()).expect("square"));
        rows.extend((0..d * d).map(|_| Vec::new()));
        rhs.extend(to_coords(&constant).into_iter().map(|v| -v));
        for (&col, e) in &cols {
            check_hermitian(&con.name, e, scale)?;
            for (i, v) in to_coords(e).into_iter().enumerate() {
                if v.abs() > DROP_TOL * scale.max(1.0) {
                    rows[base + i].push((col, v));
                }
            }
        }
    }
    let eq_rows_raw = rows.len();
    let (a, b, eq_inconsistency) = reduce_equalities(&rows, &rhs, n);
    let eq_rank = a.nrows();

    let conic = ConeProblem { n, c, a, b, cones };
    conic.validate().map_err(Error::MalformedProblem)?;
    Ok(RealProblem {
        conic,
        var_offsets: offsets,
        objective_constant: p.objective.constant,
        eq_rows_raw,
        eq_rank,
        eq_inconsistency,
    })
}

/// Orthonormal-row basis of the equality system via SVD.
fn reduce_equalities(rows: &[Vec<(usize, f64)>], rhs: &[f64], n: usize) -> (DMatrix<f64>, Vec<f64>, f64) {
    let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].is_empty()).collect();
    // Empty rows must have zero right-hand side.
    let mut inconsistency: f64 = (0..rows.len()).filter(|&i| rows[i].is_empty()).map(|i| rhs[i].abs()).fold(0.0, f64::max);
    if nonzero.is_empty() {
        return (DMatrix::zeros(0, n), vec![], inconsistency);
    }
    let m = nonzero.len();
    let mut a = DMatrix::<f64>::zeros(m, n);
    let mut b = Vec::with_capacity(m);
    for (r, &i) in nonzero.iter().enumerate() {
        for &(col, v) in &rows[i] {
            a[(r, col)] += v;
        }
        b.push(rhs[i]);
    }
    // Work with Aᵀ so the SVD is of a tall matrix.
    let svd = a.transpose().svd(true, true);
    let (Some(u), Some(vt)) = (svd.u, svd.v_t) else {
        return (a, b, inconsistency);
    };
    let sig = svd.singular_values;
    let smax = sig.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sig.len()).filter(|&k| sig[k] > EQ_RANK_TOL * smax).collect();
    // Aᵀ = U Σ Vᵀ ⇒ A = V Σ Uᵀ; rows of Uᵀ restricted to kept directions are orthonormal.
    let r = keep.len();
    let mut a_red = DMatrix::<f64>::zeros(r, n);
    let mut b_red = vec![0.0; r];
    let bv = nalgebra::DVector::from_vec(b.clone());
    let mut proj = nalgebra::DVector::<f64>::zeros(m);
    for (row, &k) in keep.iter().enumerate() {
        for j in 0..n {
            a_red[(row, j)] = u[(j, k)];
        }
        let vk = vt.row(k).transpose();
        let coef = vk.dot(&bv);
        b_red[row] = coef / sig[k];
        proj += vk * coef;
    }
    let resid = (&bv - proj).amax();
    inconsistency = inconsistency.max(resid / bv.amax().max(1.0));
    (a_red, b_red, inconsistency)
}

pub(crate) fn inconsistency_tol() -> f64 {
    EQ_CONSISTENCY_TOL
}

/// Self-describing summary of a problem for debugging with external tools.
/// Not a stable format.
pub fn dump_json(p: &SdpProblem) -> Result<serde_json::Value> {
    let rp = realify(p)?;
    let vars: Vec<_> = p
        .variables
        .iter()
        .enumerate()
        .map(|(k, v)| {
            json!({
                "name": v.name, "dim": v.dim, "kind": v.kind,
                "coords": v.n_coords(), "offset": rp.var_offsets[k],
                "restricted": v.basis.is_some(),
            })
        })
        .collect();
    let blocks: Vec<_> = rp
        .conic
        .cones
        .iter()
        .zip(&p.psd)
        .map(|(cone, con)| {
            let (kind, size) = match cone.kind {
                ConeKind::NonNeg(k) => ("nonneg", k),
                ConeKind::Psd(m) => ("psd", m),
            };
            json!({
                "name": con.name, "kind": kind, "size": size,
                "h": cone.h,
                "g": cone.g_cols.iter().map(|c| json!({"col": c.col, "entries": c.entries})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let a_rows: Vec<Vec<f64>> = (0..rp.conic.a.nrows()).map(|i| rp.conic.a.row(i).iter().copied().collect()).collect();
    Ok(json!({
        "variables": vars,
        "objective": {"c": rp.conic.c, "constant": rp.objective_constant},
        "blocks": blocks,
        "equalities": {"raw_rows": rp.eq_rows_raw, "rank": rp.eq_rank, "a": a_rows, "b": rp.conic.b},
        "convention": "s = h - G x in cone; svec is column-major lower triangle with sqrt(2) off-diagonal scaling",
    }))
}
