//! Seeded property suites shared by the test targets and the `verify`
//! command. Each property runs a number of random instances and reports the
//! worst violation it saw.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::bounds::{beta, beta_p2p, c_beta, comparator_bound_check, upsilon_geo, BoundResult};
use crate::channels::{
    apply, apply_kraus, compose_serial, identity_channel, is_cpptp, is_nonsignaling_a_to_b, make, tensor_local,
    tensor_parallel, unitary_channel, ChannelFamily, ChoiOperator,
};
use crate::divergences::{
    bs_rel_ent, geo_renyi, hypothesis_testing, max_rel_ent, nu_hat, rel_ent, sandwiched_renyi,
};
use crate::error::{Error, Result};
use crate::linalg::{
    kron, partial_trace, partial_transpose, permute_systems, trace_norm, ComplexMatrix, SystemShape,
};
use crate::random::{
    random_bipartite_channel, random_channel, random_hermitian, random_kraus, random_state, random_unitary, seeded,
    SeededRng,
};
use crate::sdp::{certify, solve, AffineMatrixExpr, CertifyTolerances, LinearMap, SdpProblem};
use crate::symmetry::{
    check_bicovariant, symmetric_projectors, twirl_choi, twirl_uu, twirl_with, werner_state, SymmetryGroup,
    WernerParams,
};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Linalg,
    Channels,
    Divergences,
    Sdp,
    Bounds,
    Symmetry,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Linalg, Suite::Channels, Suite::Divergences, Suite::Sdp, Suite::Bounds, Suite::Symmetry];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Linalg => "linalg",
            Suite::Channels => "channels",
            Suite::Divergences => "divergences",
            Suite::Sdp => "sdp",
            Suite::Bounds => "bounds",
            Suite::Symmetry => "symmetry",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub instances: usize,
    /// Largest violation observed (positive means the property failed by that much).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: {} instances, worst {:.3e} (tol {:.0e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.instances,
            self.worst,
            self.tolerance,
            if self.detail.is_empty() { String::new() } else { format!("; {}", self.detail) }
        )
    }
}

/// Accumulates violations of one property.
pub struct Check {
    suite: &'static str,
    name: &'static str,
    tol: f64,
    instances: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Check {
    pub fn new(suite: &'static str, name: &'static str, tol: f64) -> Self {
        Check { suite, name, tol, instances: 0, worst: f64::NEG_INFINITY, notes: Vec::new() }
    }

    /// Records one instance; `violation ≤ tol` passes.
    pub fn record(&mut self, violation: f64, what: impl FnOnce() -> String) {
        self.instances += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.tol && self.notes.len() < 3 {
            self.notes.push(what());
        }
        self.worst = self.worst.max(v);
    }

    /// A failure that is not a numeric violation (error, uncertified solve).
    pub fn fail(&mut self, what: String) {
        self.record(f64::INFINITY, || what);
    }

    pub fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            suite: self.suite,
            name: self.name,
            passed: self.instances > 0 && self.worst <= self.tol,
            instances: self.instances,
            worst: self.worst.max(0.0),
            tolerance: self.tol,
            detail: self.notes.join("; "),
        }
    }
}

/// Stream for one property, independent of the order properties run in.
fn rng_for(seed: u64, name: &str) -> SeededRng {
    let h = name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
    seeded(seed ^ h)
}

pub fn run(suite: Suite, seed: u64) -> Vec<PropertyOutcome> {
    match suite {
        Suite::Linalg => linalg_suite(seed),
        Suite::Channels => channels_suite(seed),
        Suite::Divergences => divergences_suite(seed),
        Suite::Sdp => sdp_suite(seed),
        Suite::Bounds => bounds_suite(seed),
        Suite::Symmetry => symmetry_suite(seed),
        Suite::All => Suite::EACH.iter().flat_map(|s| run(*s, seed)).collect(),
    }
}

fn linalg_suite(seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();

    let mut c = Check::new("linalg", "partial_trace_of_product", 1e-12);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let shape = SystemShape::new(vec![2, 3]).unwrap();
        let r = partial_trace(&kron(&a, &b), &shape, &[1]).unwrap();
        c.record(r.max_abs_diff(&a.scale(b.tr())), || "Tr_B[a ⊗ b] ≠ a·Tr b".into());
    }
    out.push(c.finish());

    let mut c = Check::new("linalg", "partial_transpose_is_involution", 0.0);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let m = random_hermitian(8, &mut rng);
        let shape = SystemShape::new(vec![2, 2, 2]).unwrap();
        let twice = partial_transpose(&partial_transpose(&m, &shape, &[0, 2]).unwrap(), &shape, &[0, 2]).unwrap();
        c.record(twice.max_abs_diff(&m), || "T∘T ≠ id".into());
    }
    out.push(c.finish());

    let mut c = Check::new("linalg", "permutation_round_trip", 0.0);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let m = random_hermitian(12, &mut rng);
        let shape = SystemShape::new(vec![2, 3, 2]).unwrap();
        let p = permute_systems(&m, &shape, &[2, 0, 1]).unwrap();
        let back = permute_systems(&p, &shape.permuted(&[2, 0, 1]), &[1, 2, 0]).unwrap();
        c.record(back.max_abs_diff(&m), || "permutation did not invert".into());
    }
    out.push(c.finish());

    let mut c = Check::new("linalg", "eigen_reconstruction", 1e-12);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let m = random_hermitian(5, &mut rng);
        let e = m.eig_hermitian().unwrap();
        c.record(e.reconstruct().max_abs_diff(&m) / m.max_abs().max(1.0), || "U diag U† ≠ M".into());
        c.record(m.tr().abs() - trace_norm(&m).unwrap(), || "|Tr M| > ‖M‖₁".into());
    }
    out.push(c.finish());
    out
}

fn channels_suite(seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();

    let mut c = Check::new("channels", "random_channels_are_cptp", 0.0);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let n = random_bipartite_channel([2, 2, 2, 2], 3, &mut rng);
        c.record(if n.is_cptp().unwrap() { 0.0 } else { 1.0 }, || "random channel not CPTP".into());
    }
    out.push(c.finish());

    let mut c = Check::new("channels", "choi_apply_matches_kraus", 1e-12);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let k = random_kraus(2, 3, 2, &mut rng);
        let choi = crate::channels::choi_from_kraus(&k, 2, 3).unwrap();
        let rho = random_state(2, &mut rng);
        let shape = SystemShape::new(vec![2]).unwrap();
        c.record(apply(&choi, &rho, &shape).unwrap().max_abs_diff(&apply_kraus(&k, &rho)), || {
            "Choi and Kraus routes differ".into()
        });
    }
    out.push(c.finish());

    let mut c = Check::new("channels", "serial_composition_matches_sequential_action", 1e-12);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let k1 = random_kraus(2, 3, 2, &mut rng);
        let k2 = random_kraus(3, 2, 2, &mut rng);
        let c1 = crate::channels::choi_from_kraus(&k1, 2, 3).unwrap();
        let c2 = crate::channels::choi_from_kraus(&k2, 3, 2).unwrap();
        let both = compose_serial(&c1, &c2).unwrap();
        let rho = random_state(2, &mut rng);
        let shape = SystemShape::new(vec![2]).unwrap();
        let direct = apply_kraus(&k2, &apply_kraus(&k1, &rho));
        c.record(apply(&both, &rho, &shape).unwrap().max_abs_diff(&direct), || "composition mismatch".into());
    }
    out.push(c.finish());

    let mut c = Check::new("channels", "local_channels_are_ppt_and_nonsignaling", 0.0);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let n = tensor_local(&random_channel(2, 2, 2, &mut rng), &random_channel(2, 2, 2, &mut rng)).unwrap();
        let ok = is_nonsignaling_a_to_b(&n).unwrap() && is_cpptp(&n).unwrap();
        c.record(if ok { 0.0 } else { 1.0 }, || "local channel failed PPT/NS".into());
    }
    out.push(c.finish());
    out
}

fn divergences_suite(seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();

    let mut c = Check::new("divergences", "data_processing", 1e-8);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let rho = random_state(3, &mut rng);
        let sigma = random_state(3, &mut rng);
        let k = random_kraus(3, 2, 2, &mut rng);
        let (nr, ns) = (apply_kraus(&k, &rho), apply_kraus(&k, &sigma));
        let pairs = [
            (rel_ent(&rho, &sigma).unwrap(), rel_ent(&nr, &ns).unwrap()),
            (bs_rel_ent(&rho, &sigma).unwrap(), bs_rel_ent(&nr, &ns).unwrap()),
            (geo_renyi(&rho, &sigma, 1.5).unwrap(), geo_renyi(&nr, &ns, 1.5).unwrap()),
            (sandwiched_renyi(&rho, &sigma, 2.0).unwrap(), sandwiched_renyi(&nr, &ns, 2.0).unwrap()),
            (max_rel_ent(&rho, &sigma).unwrap(), max_rel_ent(&nr, &ns).unwrap()),
        ];
        for (before, after) in pairs {
            c.record(after.as_f64() - before.as_f64(), || format!("{:?} increased", before.kind));
        }
    }
    out.push(c.finish());

    let mut c = Check::new("divergences", "monotone_in_alpha", 1e-10);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let rho = random_state(2, &mut rng);
        let sigma = random_state(2, &mut rng);
        let g: Vec<f64> = [0.5, 0.9, 1.25, 1.5, 2.0].iter().map(|&a| geo_renyi(&rho, &sigma, a).unwrap().as_f64()).collect();
        for w in g.windows(2) {
            c.record(w[0] - w[1], || "geometric Rényi decreased in α".into());
        }
        let s = sandwiched_renyi(&rho, &sigma, 1.5).unwrap().as_f64();
        c.record(s - g[3], || "sandwiched above geometric".into());
    }
    out.push(c.finish());

    let mut c = Check::new("divergences", "uniform_continuity_bound", 1e-10);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..20 {
        let rho = random_state(2, &mut rng);
        let sigma = random_state(2, &mut rng);
        let nu = nu_hat(&rho, &sigma).unwrap();
        c.record(3.0 - nu, || "ν̂ < 3".into());
        let bs = bs_rel_ent(&rho, &sigma).unwrap().as_f64();
        for k in 4..=8 {
            let delta = 0.5_f64.powi(k);
            if delta >= 3f64.ln() / (4.0 * nu.ln()) {
                continue;
            }
            let lhs = geo_renyi(&rho, &sigma, 1.0 + delta).unwrap().as_f64();
            c.record(lhs - bs - 4.0 * delta * nu.log2().powi(2), || "uniform bound violated".into());
        }
    }
    out.push(c.finish());

    let mut c = Check::new("divergences", "hypothesis_testing_on_identical_states", 1e-7);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..5 {
        let rho = random_state(2, &mut rng);
        for eps in [0.0, 0.1, 0.5] {
            match hypothesis_testing(&rho, &rho, eps) {
                Ok(v) => c.record((v.as_f64() + (1.0 - eps).log2()).abs(), || format!("D_H^{eps}(ρ‖ρ) off")),
                Err(e) => c.fail(e.to_string()),
            }
        }
    }
    out.push(c.finish());
    out
}

fn sdp_suite(seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();
    let mut c = Check::new("sdp", "max_eigenvalue_epigraph_certifies", 1e-7);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..10 {
        let m = random_hermitian(3, &mut rng);
        let mut p = SdpProblem::new();
        let t = p.scalar("t");
        let expr = AffineMatrixExpr::var(t)
            .map(LinearMap::KronLeft(ComplexMatrix::identity(3)))
            .and_then(|e| e.sub(AffineMatrixExpr::constant(&m)));
        if let Err(e) = expr.and_then(|e| p.add_psd("epigraph", e)).and_then(|_| p.minimize_scalar(t)) {
            c.fail(e.to_string());
            continue;
        }
        match solve(&p).and_then(|s| certify(&p, &s, &CertifyTolerances::default()).map(|r| (s, r))) {
            Ok((s, r)) if r.passed => {
                c.record((s.primal_value - m.max_eigenvalue().unwrap()).abs(), || "λ_max mismatch".into())
            }
            Ok((_, r)) => c.fail(r.failures.join(", ")),
            Err(e) => c.fail(e.to_string()),
        }
    }
    out.push(c.finish());
    out
}

fn trivial() -> ChoiOperator {
    ChoiOperator::point_to_point(ComplexMatrix::identity(1), 1, 1).expect("1x1")
}

fn solved(c: &mut Check, r: Result<BoundResult>) -> Option<f64> {
    match r {
        Ok(b) if b.status.is_solved() && b.certified => Some(b.raw_value),
        Ok(b) => {
            let why = b.certificate.map(|x| x.failures.join(", ")).unwrap_or_default();
            c.fail(format!("{:?} {why}", b.status));
            None
        }
        Err(e) => {
            c.fail(e.to_string());
            None
        }
    }
}

/// `β(N) ≥ 1` for channels.
pub fn beta_nonnegative(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_nonnegative", 1e-7);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let ch = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        if let Some(b) = solved(&mut c, beta(&ch)) {
            c.record(1.0 - b, || format!("β = {b}"));
        }
    }
    c.finish()
}

/// `β(id ⊗ N) = β(N)` for identity legs appended on Alice's or Bob's side.
pub fn beta_stability(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_stability", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for k in 0..n {
        let ch = random_bipartite_channel([2, 1, 1, 2], 2, &mut rng);
        let extra = if k % 2 == 0 {
            tensor_local(&identity_channel(2), &trivial())
        } else {
            tensor_local(&trivial(), &identity_channel(2))
        }
        .unwrap();
        let big = tensor_parallel(&extra, &ch).unwrap();
        if let (Some(a), Some(b)) = (solved(&mut c, beta(&ch)), solved(&mut c, beta(&big))) {
            c.record((a - b).abs(), || format!("β(N) = {a}, β(id⊗N) = {b}"));
        }
    }
    c.finish()
}

/// `β(M₂∘M₁) ≤ β(M₂)·β(M₁)`
pub fn beta_subadditive(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_subadditive_under_composition", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let m1 = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let m2 = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let both = compose_serial(&m1, &m2).unwrap();
        let vals = (solved(&mut c, beta(&m1)), solved(&mut c, beta(&m2)), solved(&mut c, beta(&both)));
        if let (Some(a), Some(b), Some(ab)) = vals {
            c.record(ab / (a * b) - 1.0, || format!("β(M₂∘M₁) = {ab} > {a}·{b}"));
        }
    }
    c.finish()
}

fn sandwich(n: &ChoiOperator, pre: &ChoiOperator, post: &ChoiOperator) -> ChoiOperator {
    compose_serial(&compose_serial(pre, n).unwrap(), post).unwrap()
}

/// `β((W⊗Y)∘N∘(K⊗L)) ≤ β(N)` for local channels.
pub fn beta_local_data_processing(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_local_data_processing", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let ch = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let mut loc = || random_channel(2, 2, 2, &mut rng);
        let pre = tensor_local(&loc(), &loc()).unwrap();
        let post = tensor_local(&loc(), &loc()).unwrap();
        let processed = sandwich(&ch, &pre, &post);
        if let (Some(a), Some(b)) = (solved(&mut c, beta(&ch)), solved(&mut c, beta(&processed))) {
            c.record(b - a, || format!("β increased from {a} to {b}"));
        }
    }
    c.finish()
}

/// `β` is unchanged by local unitaries before and after.
pub fn beta_local_unitary_invariance(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_local_unitary_invariance", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let ch = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let mut u = || unitary_channel(&random_unitary(2, &mut rng));
        let pre = tensor_local(&u(), &u()).unwrap();
        let post = tensor_local(&u(), &u()).unwrap();
        let rotated = sandwich(&ch, &pre, &post);
        if let (Some(a), Some(b)) = (solved(&mut c, beta(&ch)), solved(&mut c, beta(&rotated))) {
            c.record((b - a).abs(), || format!("β changed from {a} to {b}"));
        }
    }
    c.finish()
}

/// `β(λM₁ + (1−λ)M₀) ≤ λβ(M₁) + (1−λ)β(M₀)`
pub fn beta_convexity(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_convexity", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let m0 = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let m1 = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let lam: f64 = rng.random_range(0.0..1.0);
        let mix = m0.with_matrix(&m1.matrix().scale(lam) + &m0.matrix().scale(1.0 - lam)).unwrap();
        let vals = (solved(&mut c, beta(&m0)), solved(&mut c, beta(&m1)), solved(&mut c, beta(&mix)));
        if let (Some(b0), Some(b1), Some(bm)) = vals {
            c.record(bm - (lam * b1 + (1.0 - lam) * b0), || format!("β(mix) = {bm} above the chord"));
        }
    }
    c.finish()
}

/// The point-to-point SDP agrees with the bipartite one on trivial legs.
pub fn beta_p2p_agreement(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "beta_p2p_matches_bipartite", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for k in 0..n {
        let dout = 2 + k % 2;
        let ch = random_channel(2, dout, 2, &mut rng);
        if let (Some(a), Some(b)) = (solved(&mut c, beta_p2p(&ch)), solved(&mut c, beta(&ch))) {
            c.record((a - b).abs(), || format!("p2p {a} vs bipartite {b}"));
        }
    }
    c.finish()
}

/// `Υ̂_α ≤ C_β` and `Υ̂_{1+2^{−ℓ}}` non-increasing in `ℓ`.
pub fn upsilon_ordering(seed: u64, n: usize, ells: &[u32]) -> PropertyOutcome {
    let mut c = Check::new("bounds", "upsilon_below_c_beta_and_monotone_in_ell", 1e-6);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let ch = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let Some(cb) = solved(&mut c, c_beta(&ch)).map(f64::log2) else { continue };
        let mut last = f64::INFINITY;
        for &ell in ells {
            let r = upsilon_geo(&ch, ell);
            let bits = match &r {
                Ok(b) => b.value_bits,
                Err(_) => f64::NAN,
            };
            if solved(&mut c, r).is_none() {
                continue;
            }
            c.record(bits - cb, || format!("Υ̂ (ℓ={ell}) = {bits} above C_β = {cb}"));
            c.record(bits - last, || format!("Υ̂ increased at ℓ={ell}"));
            last = bits;
        }
    }
    c.finish()
}

/// `Tr[Π M(Φ̄)] ≤ 1/d` for normalized `M = N/β(N)` harvested from random channels.
pub fn comparator_on_normalized_maps(seed: u64, n: usize) -> PropertyOutcome {
    let mut c = Check::new("bounds", "comparator_bound", 1e-7);
    let mut rng = rng_for(seed, c.name);
    for _ in 0..n {
        let ch = random_channel(2, 2, 2, &mut rng);
        let Some(b) = solved(&mut c, beta_p2p(&ch)) else { continue };
        match comparator_bound_check(&ch.scale(1.0 / b), 2) {
            Ok(r) => c.record(r.success_probability - r.bound, || format!("success {}", r.success_probability)),
            Err(e) => c.fail(e.to_string()),
        }
    }
    c.finish()
}

fn bounds_suite(seed: u64) -> Vec<PropertyOutcome> {
    vec![
        beta_nonnegative(seed, 30),
        beta_stability(seed, 20),
        beta_subadditive(seed, 20),
        beta_local_data_processing(seed, 20),
        beta_local_unitary_invariance(seed, 20),
        beta_convexity(seed, 20),
        beta_p2p_agreement(seed, 20),
        comparator_on_normalized_maps(seed, 20),
        upsilon_ordering(seed, 3, &[1, 2, 4]),
    ]
}

fn symmetry_suite(seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();
    let pauli = SymmetryGroup::pauli_bicovariance(2).unwrap();
    let uu = SymmetryGroup::uu_design(2).unwrap();

    let mut c = Check::new("symmetry", "twirl_is_idempotent", 1e-9);
    let mut rng = rng_for(seed, c.name);
    for k in 0..20 {
        let g = if k % 2 == 0 { &pauli } else { &uu };
        let m = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let once = twirl_choi(&m, g).unwrap();
        let twice = twirl_choi(&once, g).unwrap();
        c.record(once.matrix().max_abs_diff(twice.matrix()), || "twirl∘twirl ≠ twirl".into());
        c.record((once.matrix().tr() - m.matrix().tr()).abs(), || "trace changed".into());
        c.record(if once.is_cptp().unwrap() { 0.0 } else { 1.0 }, || "twirl broke CPTP".into());
    }
    out.push(c.finish());

    let mut c = Check::new("symmetry", "uu_twirl_lands_on_werner_family", 1e-9);
    let mut rng = rng_for(seed, c.name);
    let (_, minus) = symmetric_projectors(2);
    for _ in 0..30 {
        let rho = random_state(4, &mut rng);
        let q = minus.inner_re(&rho).clamp(0.0, 1.0);
        let w = werner_state(WernerParams { q, d: 2 }).unwrap();
        c.record(twirl_uu(&rho).unwrap().max_abs_diff(&w), || format!("q = {q}"));
    }
    out.push(c.finish());

    let mut c = Check::new("symmetry", "twirl_commutes_with_output_trace", 1e-9);
    let mut rng = rng_for(seed, c.name);
    for k in 0..20 {
        let g = if k % 2 == 0 { &pauli } else { &uu };
        let m = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        let shape = m.shape();
        let lhs = partial_trace(twirl_choi(&m, g).unwrap().matrix(), &shape, &[1, 3]).unwrap();
        let inputs: Vec<ComplexMatrix> = g.elements.iter().map(|e| kron(&e.u_a.conj(), &e.v_b.conj())).collect();
        let rhs = twirl_with(&inputs, &partial_trace(m.matrix(), &shape, &[1, 3]).unwrap());
        c.record(lhs.max_abs_diff(&rhs), || "Tr_out∘twirl ≠ twirl∘Tr_out".into());
    }
    out.push(c.finish());

    let mut c = Check::new("symmetry", "bicovariance_examples", 0.0);
    let local = SymmetryGroup::local_pauli(2).unwrap();
    let cases = [
        (make(&ChannelFamily::NoisyCnot { d: 2, p: 0.3 }).unwrap(), &pauli, true, "noisy_cnot/pauli"),
        (make(&ChannelFamily::PartialSwap { d: 2, p: 0.5 }).unwrap(), &local, false, "partial_swap/local"),
        (make(&ChannelFamily::PartialSwap { d: 2, p: 0.5 }).unwrap(), &uu, true, "partial_swap/uu"),
        (tensor_local(&identity_channel(2), &identity_channel(2)).unwrap(), &local, true, "id⊗id/local"),
        (tensor_local(&identity_channel(2), &identity_channel(2)).unwrap(), &uu, true, "id⊗id/uu"),
    ];
    for (n, g, want, name) in cases {
        let got = check_bicovariant(&n, g).unwrap();
        c.record(if got == want { 0.0 } else { 1.0 }, || format!("{name}: expected {want}"));
    }
    out.push(c.finish());
    out
}
