//! Seeded random states, unitaries and channels for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{bipartite_choi_from_kraus, choi_from_kraus, ChoiOperator};
use crate::linalg::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Square matrix with i.i.d. complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(ginibre(n, n, rng)).expect("square")
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, rng).hermitian_part()
}

/// Normalized complex Gaussian vector (Haar-random pure state).
pub fn random_pure_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::projector(&random_pure_vector(n, rng))
}

/// Full-rank density matrix from the Hilbert–Schmidt ensemble.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_state_rank(n, n, rng)
}

/// Density matrix `GG†/Tr[GG†]` with `G` an `n × rank` Ginibre matrix.
pub fn random_state_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rank, rng);
    let m = ComplexMatrix::from_dmatrix(&g * g.adjoint()).expect("square").hermitian_part();
    let t = m.tr();
    m.scale(1.0 / t)
}

/// Matrix with orthonormal columns spanning a Haar-random `cols`-dim subspace of `C^rows`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    assert!(cols <= rows);
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phases of R's diagonal so the distribution is Haar.
    let mut out = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            out[(i, j)] *= phase;
        }
    }
    out
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(random_isometry(n, n, rng)).expect("square")
}

/// Kraus operators (`dout × din`) of a random channel with `n_kraus` operators,
/// obtained from a Haar-random Stinespring isometry.
pub fn random_kraus<R: Rng + ?Sized>(
    din: usize,
    dout: usize,
    n_kraus: usize,
    rng: &mut R,
) -> Vec<DMatrix<Complex64>> {
    let v = random_isometry(dout * n_kraus, din, rng);
    (0..n_kraus).map(|k| v.rows(k * dout, dout).into_owned()).collect()
}

/// Random channel `A → B′` with `n_kraus` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(din: usize, dout: usize, n_kraus: usize, rng: &mut R) -> ChoiOperator {
    choi_from_kraus(&random_kraus(din, dout, n_kraus, rng), din, dout).expect("consistent dimensions")
}

/// Random bipartite channel with dimensions `(d_A, d_A′, d_B, d_B′)`.
pub fn random_bipartite_channel<R: Rng + ?Sized>(dims: [usize; 4], n_kraus: usize, rng: &mut R) -> ChoiOperator {
    let [da, dap, db, dbp] = dims;
    let kraus = random_kraus(da * db, dap * dbp, n_kraus, rng);
    bipartite_choi_from_kraus(&kraus, da, db, dap, dbp).expect("consistent dimensions")
}
