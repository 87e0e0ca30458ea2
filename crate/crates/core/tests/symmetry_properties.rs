use capbound::bounds::beta;
use capbound::channels::*;
use capbound::linalg::{kron, partial_trace};
use capbound::random::*;
use capbound::sdp::{certify, solve, AffineMatrixExpr, CertifyTolerances, LinearMap, SdpProblem};
use capbound::symmetry::*;
use capbound::ComplexMatrix;
use proptest::prelude::*;

const SEED: u64 = 0x5EED_0002;

#[test]
fn uu_twirl_of_random_states_is_werner() {
    let mut rng = seeded(SEED);
    let (_, minus) = symmetric_projectors(2);
    for _ in 0..30 {
        let rho = random_state(4, &mut rng);
        let q = minus.inner_re(&rho);
        let w = werner_state(WernerParams { q, d: 2 }).unwrap();
        assert!(twirl_uu(&rho).unwrap().max_abs_diff(&w) < 1e-9);
    }
}

#[test]
fn twirls_are_idempotent_projections() {
    let mut rng = seeded(SEED + 1);
    let groups = [SymmetryGroup::pauli_bicovariance(2).unwrap(), SymmetryGroup::uu_design(2).unwrap()];
    for k in 0..20 {
        let g = &groups[k % 2];
        let x = random_hermitian(16, &mut rng);
        let once = twirl_with(&g.choi_actions(), &x);
        let twice = twirl_with(&g.choi_actions(), &once);
        assert!(once.max_abs_diff(&twice) < 1e-9);
        // self-adjoint: ⟨y, T(x)⟩ = ⟨T(y), x⟩
        let y = random_hermitian(16, &mut rng);
        let lhs = y.inner_re(&once);
        let rhs = twirl_with(&g.choi_actions(), &y).inner_re(&x);
        assert!((lhs - rhs).abs() < 1e-9);
    }
}

#[test]
fn bicovariance_examples() {
    let pauli = SymmetryGroup::pauli_bicovariance(2).unwrap();
    let local = SymmetryGroup::local_pauli(2).unwrap();
    let uu = SymmetryGroup::uu_design(2).unwrap();
    let cnot = make(&ChannelFamily::NoisyCnot { d: 2, p: 0.4 }).unwrap();
    let swap = make(&ChannelFamily::PartialSwap { d: 2, p: 0.5 }).unwrap();
    let idid = tensor_local(&identity_channel(2), &identity_channel(2)).unwrap();
    assert!(check_bicovariant(&cnot, &pauli).unwrap());
    assert!(!check_bicovariant(&swap, &local).unwrap());
    assert!(check_bicovariant(&swap, &uu).unwrap());
    assert!(check_bicovariant(&idid, &local).unwrap());
    assert!(!check_bicovariant(&cnot, &uu).unwrap());
    let dep = make(&ChannelFamily::Depolarizing { d: 2, p: 0.3 }).unwrap();
    assert!(check_bicovariant(&dep, &SymmetryGroup::pauli_covariance(2).unwrap()).unwrap());
}

#[test]
fn twirl_commutes_with_tracing_outputs() {
    let mut rng = seeded(SEED + 2);
    for g in [SymmetryGroup::pauli_bicovariance(2).unwrap(), SymmetryGroup::uu_design(2).unwrap()] {
        let inputs: Vec<ComplexMatrix> = g.elements.iter().map(|e| e.input_action()).collect();
        for _ in 0..5 {
            let m = random_bipartite_channel([2, 2, 2, 2], 3, &mut rng);
            let shape = m.shape();
            let lhs = partial_trace(twirl_choi(&m, &g).unwrap().matrix(), &shape, &[1, 3]).unwrap();
            let rhs = twirl_with(&inputs, &partial_trace(m.matrix(), &shape, &[1, 3]).unwrap());
            assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        }
    }
}

#[test]
fn twirling_does_not_increase_beta() {
    // β is convex and invariant under local unitaries, so averaging over the
    // group cannot raise it
    let mut rng = seeded(SEED + 3);
    let g = SymmetryGroup::pauli_bicovariance(2).unwrap();
    for _ in 0..3 {
        let m = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let t = twirl_choi(&m, &g).unwrap();
        assert!(t.is_cptp().unwrap());
        let (b, bt) = (beta(&m).unwrap().raw_value, beta(&t).unwrap().raw_value);
        assert!(bt <= b + 1e-6, "{bt} > {b}");
    }
}

#[test]
fn covariance_constraints_match_commutant_oracle() {
    // min Tr[C X] over U⊗U-invariant states X = a Π₊/3 + b Π₋
    let mut rng = seeded(SEED + 4);
    let actions: Vec<ComplexMatrix> = clifford_group().iter().map(|u| kron(u, u)).collect();
    let (plus, minus) = symmetric_projectors(2);
    for _ in 0..5 {
        let c = random_hermitian(4, &mut rng);
        let mut p = SdpProblem::new();
        let x = p.hermitian("X", 4);
        p.add_psd("X", AffineMatrixExpr::var(x)).unwrap();
        let tr = AffineMatrixExpr::var(x)
            .map(LinearMap::InnerProduct(ComplexMatrix::identity(4)))
            .unwrap()
            .plus_constant(&ComplexMatrix::identity(1).scale(-1.0))
            .unwrap();
        p.add_eq("trace", tr).unwrap();
        for (k, e) in covariance_constraints(x, &actions).unwrap().into_iter().enumerate() {
            p.add_eq(&format!("cov{k}"), e).unwrap();
        }
        p.minimize_term(x, c.clone()).unwrap();
        let s = solve(&p).unwrap();
        assert!(certify(&p, &s, &CertifyTolerances::default()).unwrap().passed);
        let oracle = (plus.inner_re(&c) / 3.0).min(minus.inner_re(&c));
        assert!((s.primal_value - oracle).abs() < 1e-7, "{} vs {oracle}", s.primal_value);
        let xv = &s.assignments["X"];
        assert!(twirl_uu(xv).unwrap().max_abs_diff(xv) < 1e-7);
    }
}

#[test]
fn invariant_span_has_expected_dimension() {
    // commutant of {Ū ⊗ U ⊗ V̄ ⊗ V} for local Paulis: products of Pauli pairs
    let local = SymmetryGroup::local_pauli(2).unwrap();
    let basis = invariant_basis(&local.choi_actions(), 16).unwrap();
    assert_eq!(basis.len(), 16);
    let uu = SymmetryGroup::uu_design(2).unwrap();
    let werner = invariant_basis(&uu.elements.iter().map(|e| e.input_action()).collect::<Vec<_>>(), 4).unwrap();
    assert_eq!(werner.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn werner_family_is_a_state(q in 0.0f64..=1.0) {
        let w = werner_state(WernerParams { q, d: 2 }).unwrap();
        prop_assert!((w.tr() - 1.0).abs() < 1e-12);
        prop_assert!(w.is_psd(1e-12).unwrap());
        let (_, minus) = symmetric_projectors(2);
        prop_assert!((minus.inner_re(&w) - q).abs() < 1e-12);
    }

    #[test]
    fn twirled_channels_stay_channels(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        for g in [SymmetryGroup::pauli_bicovariance(2).unwrap(), SymmetryGroup::uu_design(2).unwrap()] {
            let t = twirl_choi(&m, &g).unwrap();
            prop_assert!(t.is_cptp().unwrap());
            prop_assert!(check_bicovariant(&t, &g).unwrap());
        }
    }
}
