//! End-to-end acceptance criteria, one PASS/FAIL line each; exits nonzero
//! if any criterion fails.

use std::time::{Duration, Instant};

use capbound::bounds::*;
use capbound::channels::*;
use capbound::divergences::*;
use capbound::linalg::kron;
use capbound::random::*;
use capbound::verify::{self, PropertyOutcome, DEFAULT_SEED};
use capbound::ComplexMatrix;
use capbound_cli::sweep::{binary_entropy, csv_string, holevo_rows, run_sweep, Row};
use capbound_cli::{evaluate, Preset};

/// Solve bookkeeping for the certification criterion.
#[derive(Default)]
struct Hygiene {
    solves: usize,
    uncertified: Vec<String>,
}

impl Hygiene {
    fn take(&mut self, what: &str, r: capbound::Result<BoundResult>) -> Option<BoundResult> {
        self.solves += 1;
        match r {
            Ok(b) if b.status.is_solved() && b.certified => Some(b),
            Ok(b) => {
                self.uncertified.push(format!("{what}: {:?}", b.status));
                None
            }
            Err(e) => {
                self.uncertified.push(format!("{what}: {e}"));
                None
            }
        }
    }

    fn rows(&mut self, what: &str, rows: &[Row]) {
        for r in rows {
            self.solves += 1;
            if !r.solved() {
                self.uncertified.push(format!("{what} at {}: {}", r.param, r.status));
            }
        }
    }
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn alpha(ell: u32) -> f64 {
    1.0 + 0.5_f64.powi(ell as i32)
}

fn within_time(v: Verdict, took: Duration, limit_s: u64) -> Verdict {
    if took.as_secs_f64() <= limit_s as f64 {
        v
    } else {
        verdict(false, format!("{}; runtime {:.0} s over {limit_s} s", v.detail, took.as_secs_f64()))
    }
}

/// β-feasible maps harvested for the comparator criterion.
type Harvest = Vec<(String, ChoiOperator, usize)>;

fn harvest(out: &mut Harvest, label: &str, choi: &ChoiOperator, beta_raw: f64) {
    let normalized = choi.scale(1.0 / beta_raw);
    if choi.is_point_to_point() {
        let d = choi.input_dim();
        if d == choi.output_dim() {
            out.push((label.into(), normalized, d));
        }
        return;
    }
    let [da, _, db, dbp] = choi.bipartite_dims().expect("bipartite");
    if da == dbp {
        let tau = ComplexMatrix::identity(db).scale(1.0 / db as f64);
        let m = alice_to_bob_map(&normalized, &tau).expect("alice → bob restriction");
        out.push((format!("{label} A→B"), m, da));
    }
}

fn criterion_1(h: &mut Hygiene, maps: &mut Harvest) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut misses = Vec::new();
    let mut check = |h: &mut Hygiene, label: String, choi: ChoiOperator, expected: f64| {
        if let Some(r) = h.take(&label, c_beta(&choi)) {
            let err = (r.value_bits - expected).abs();
            worst = worst.max(err);
            if err > 1e-6 {
                misses.push(format!("{label}: {} vs {expected}", r.value_bits));
            }
            harvest(maps, &label, &choi, r.raw_value);
        }
    };
    for d in 2..=4 {
        check(h, format!("feedback d={d}"), make(&ChannelFamily::ClassicalFeedback { d }).unwrap(), 0.0);
    }
    check(h, "swap d=2".into(), make(&ChannelFamily::Swap { d: 2 }).unwrap(), 2.0);
    for d in 2..=3 {
        check(h, format!("identity d={d}"), make(&ChannelFamily::Identity { d }).unwrap(), (d as f64).log2());
    }
    // 20 local pairs with every leg in {2, 3}, Choi dimension at most 36
    let mut dims: Vec<[usize; 4]> = vec![[2, 2, 2, 2]; 8];
    for k in 0..8 {
        let mut d = [2, 2, 2, 2];
        d[k % 4] = 3;
        dims.push(d);
    }
    dims.extend([[3, 3, 2, 2], [2, 2, 3, 3], [3, 2, 2, 3], [2, 3, 3, 2]]);
    let mut rng = seeded(DEFAULT_SEED ^ 1);
    for (k, d) in dims.iter().enumerate() {
        let e = random_channel(d[0], d[1], rng_kraus(&mut rng), &mut rng);
        let f = random_channel(d[2], d[3], rng_kraus(&mut rng), &mut rng);
        check(h, format!("local pair {k} {d:?}"), tensor_local(&e, &f).unwrap(), 0.0);
    }
    let unsolved = h.uncertified.len();
    verdict(
        misses.is_empty() && unsolved == 0,
        format!("26 closed-form values, worst error {worst:.2e} bits{}", list(&misses)),
    )
}

fn rng_kraus(rng: &mut SeededRng) -> usize {
    use rand::Rng;
    rng.random_range(2..=3)
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; {}", items.join("; "))
    }
}

fn outcomes_verdict(outcomes: &[PropertyOutcome]) -> Verdict {
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.to_string()).collect();
    let summary: Vec<String> = outcomes.iter().map(|o| format!("{} ×{}", o.name, o.instances)).collect();
    verdict(failed.is_empty(), format!("{}{}", summary.join(", "), list(&failed)))
}

fn criterion_2() -> Vec<PropertyOutcome> {
    let s = DEFAULT_SEED;
    vec![
        verify::beta_nonnegative(s, 20),
        verify::beta_stability(s, 20),
        verify::beta_subadditive(s, 20),
        verify::beta_convexity(s, 20),
        verify::beta_local_data_processing(s, 20),
        verify::beta_local_unitary_invariance(s, 20),
    ]
}

fn state_choi(rho: &ComplexMatrix) -> ChoiOperator {
    ChoiOperator::point_to_point(rho.clone(), 1, rho.dim()).unwrap()
}

fn criterion_3(h: &mut Hygiene) -> Verdict {
    let mut rng = seeded(DEFAULT_SEED ^ 3);
    let mut worst: f64 = 0.0;
    for k in 0..70 {
        let d = if k < 50 { 2 } else { 3 };
        let rho = random_state(d, &mut rng);
        let sigma = random_state(d, &mut rng);
        for ell in [1, 2, 4] {
            let oracle = geo_renyi(&rho, &sigma, alpha(ell)).unwrap().as_f64();
            match h.take("state pair", geo_channel_div(&state_choi(&rho), &state_choi(&sigma), ell)) {
                Some(r) => worst = worst.max((r.value_bits - oracle).abs()),
                None => worst = f64::INFINITY,
            }
        }
    }
    verdict(worst <= 1e-5, format!("210 solves, worst |SDP − spectral| = {worst:.2e}"))
}

/// Output of `id ⊗ N` on `Σ K_{ri}|r⟩|i⟩`, i.e. `(K ⊗ I) Γ (K ⊗ I)†`.
fn output_on(choi: &ChoiOperator, k: &ComplexMatrix) -> ComplexMatrix {
    choi.matrix().congruence(&kron(k, &ComplexMatrix::identity(choi.output_dim())))
}

fn random_pure_input(d: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let v = random_pure_vector(d * d, rng);
    let mut k = ComplexMatrix::zeros(d);
    for r in 0..d {
        for i in 0..d {
            k[(r, i)] = v[r * d + i];
        }
    }
    k
}

fn criterion_4(h: &mut Hygiene) -> Verdict {
    use rand::Rng;
    let mut rng = seeded(DEFAULT_SEED ^ 4);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..10 {
        let ell = [1, 2, 4][k % 3];
        let n = random_channel(2, 2, rng.random_range(1..=4), &mut rng);
        // full Kraus rank keeps supp Γ_N ⊆ supp Γ_M; every other map is not normalized
        let mut m = random_channel(2, 2, 4, &mut rng);
        if k % 2 == 1 {
            m = m.scale(rng.random_range(0.5..2.0));
        }
        let Some(r) = h.take("channel pair", geo_channel_div(&n, &m, ell)) else {
            return verdict(false, format!("pair {k}: {}", h.uncertified.last().map(String::as_str).unwrap_or("")));
        };
        for _ in 0..200 {
            let kin = random_pure_input(2, &mut rng);
            let v = geo_renyi(&output_on(&n, &kin), &output_on(&m, &kin), alpha(ell)).unwrap().as_f64();
            worst = worst.max(v - r.value_bits);
        }
    }
    verdict(worst <= 1e-5, format!("10 pairs × 200 inputs, max (input value − SDP) = {worst:.2e}"))
}

fn monotone_violation(rows: &[Row], increasing: bool) -> f64 {
    rows.windows(2)
        .map(|w| if increasing { w[0].value_bits - w[1].value_bits } else { w[1].value_bits - w[0].value_bits })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sweep(h: &mut Hygiene, p: Preset) -> Vec<Row> {
    let rows = run_sweep(&p.config(), false).expect("preset config is valid");
    h.rows(p.name(), &rows);
    rows
}

fn criterion_5(rows: &[Row], took: Duration) -> Verdict {
    let (v0, v1) = (rows[0].value_bits, rows[rows.len() - 1].value_bits);
    let worst_step = monotone_violation(rows, true);
    let ok = rows.len() == 41 && v0 <= 1e-3 && (v1 - 2.0).abs() <= 1e-3 && worst_step <= 1e-4;
    within_time(
        verdict(ok, format!("{} points, value(0) = {v0:.2e}, value(1) = {v1:.6}, worst decrease {worst_step:.2e}", rows.len())),
        took,
        600,
    )
}

fn criterion_6(h: &mut Hygiene, rows: &[Row]) -> Verdict {
    let (v0, v1) = (rows[0].value_bits, rows[rows.len() - 1].value_bits);
    let worst_step = monotone_violation(rows, false);
    let mut worst_agree: f64 = 0.0;
    for i in [0, 10, 20, 30, 40] {
        let family = ChannelFamily::NoisyCnot { d: 2, p: rows[i].param };
        let general = capbound_cli::Request { measure: capbound_cli::Measure::UpsilonGeo, ell: 4, symmetric: false };
        match h.take("noisy cnot general", evaluate(&family, &general)) {
            Some(r) => worst_agree = worst_agree.max((r.value_bits - rows[i].value_bits).abs()),
            None => worst_agree = f64::INFINITY,
        }
    }
    let ok = rows.len() == 41 && (v0 - 1.0).abs() <= 1e-3 && v1 <= 1e-3 && worst_step <= 1e-4 && worst_agree <= 1e-5;
    verdict(
        ok,
        format!(
            "value(0) = {v0:.6}, value(1) = {v1:.2e}, worst increase {worst_step:.2e}, symmetric vs general {worst_agree:.2e}"
        ),
    )
}

fn criterion_7(rows: &[Row]) -> Verdict {
    let lower = holevo_rows(&Preset::Fig6.config().grid);
    let v0 = rows[0].value_bits;
    let margin = rows
        .iter()
        .zip(&lower)
        .map(|(u, l)| {
            debug_assert_eq!(u.param, l.param);
            debug_assert!((l.value_bits - (1.0 - binary_entropy(l.param / 2.0))).abs() < 1e-15);
            u.value_bits - l.value_bits
        })
        .fold(f64::INFINITY, f64::min);
    let ok = (v0 - 1.0).abs() <= 1e-3 && margin >= -1e-4;
    verdict(ok, format!("value(0) = {v0:.6}, min (Υ̂ − (1 − h₂(p/2))) = {margin:.2e}"))
}

fn criterion_9(h: &mut Hygiene, maps: &mut Harvest) -> Verdict {
    // the criterion-2 distribution: random bipartite channels on qubits
    let mut rng = seeded(DEFAULT_SEED ^ 9);
    for k in 0..20 {
        let ch = random_bipartite_channel([2, 2, 2, 2], 2, &mut rng);
        if let Some(r) = h.take("random bipartite β", beta(&ch)) {
            harvest(maps, &format!("random bipartite {k}"), &ch, r.raw_value);
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for (label, m, d) in maps.iter() {
        match comparator_bound_check(m, *d) {
            Ok(rep) => worst = worst.max(rep.success_probability - rep.bound),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    let p2p = verify::comparator_on_normalized_maps(DEFAULT_SEED, 20);
    if !p2p.passed {
        failures.push(p2p.to_string());
    }
    worst = worst.max(p2p.worst);
    verdict(
        failures.is_empty() && worst <= 1e-7,
        format!("{} harvested maps + {} point-to-point maps, max Tr[ΠM(Φ̄)] − 1/d = {worst:.2e}{}", maps.len(), p2p.instances, list(&failures)),
    )
}

/// `min Σλq` over `0 ≤ λ ≤ 1`, `Σλp ≥ 1 − ε` by enumerating LP vertices: a
/// vertex has every coordinate in {0, 1} except at most one.
fn lp_hypothesis_test(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let n = p.len();
    let target = 1.0 - eps;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let on = |i: usize| mask & (1 << i) != 0;
        let (pp, qq): (f64, f64) = (0..n).filter(|&i| on(i)).fold((0.0, 0.0), |a, i| (a.0 + p[i], a.1 + q[i]));
        if pp >= target - 1e-15 {
            best = best.min(qq);
        }
        for j in (0..n).filter(|&j| !on(j) && p[j] > 0.0) {
            let lam = (target - pp) / p[j];
            if (0.0..=1.0).contains(&lam) {
                best = best.min(qq + lam * q[j]);
            }
        }
    }
    -best.log2()
}

fn criterion_10() -> Verdict {
    use rand::Rng;
    let mut rng = seeded(DEFAULT_SEED ^ 10);
    let mut worst: f64 = 0.0;
    for k in 0..6 {
        let rho = random_state(2 + k % 2, &mut rng);
        for eps in [0.0, 0.1, 0.5] {
            let v = hypothesis_testing(&rho, &rho, eps).unwrap().as_f64();
            worst = worst.max((v + (1.0 - eps).log2()).abs());
        }
    }
    for k in 0..20 {
        let n = 2 + k % 3;
        let draw = |rng: &mut SeededRng| {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        for eps in [0.0, 0.05, 0.2, 0.5] {
            let v = hypothesis_testing(&diag_state(&p), &diag_state(&q), eps).unwrap().as_f64();
            worst = worst.max((v - lp_hypothesis_test(&p, &q, eps)).abs());
        }
    }
    verdict(worst <= 1e-7, format!("18 self-pair + 80 commuting values, worst error {worst:.2e}"))
}

fn criterion_11() -> Verdict {
    let mut rng = seeded(DEFAULT_SEED ^ 11);
    let (mut min_nu, mut uniform, mut increase) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut close, mut worst_gap) = (0, 0.0_f64);
    for _ in 0..50 {
        let rho = random_state(2, &mut rng);
        let sigma = random_state(2, &mut rng);
        let nu = nu_hat(&rho, &sigma).unwrap();
        min_nu = min_nu.min(nu);
        let bs = bs_rel_ent(&rho, &sigma).unwrap().as_f64();
        let mut last = f64::INFINITY;
        for ell in 4..=12 {
            let delta = 0.5_f64.powi(ell);
            let v = geo_renyi(&rho, &sigma, 1.0 + delta).unwrap().as_f64();
            uniform = uniform.max(v - bs - 4.0 * delta * nu.log2().powi(2));
            increase = increase.max(v - last);
            last = v;
        }
        worst_gap = worst_gap.max(last - bs);
        if last - bs < 1e-3 {
            close += 1;
        }
    }
    let ok = min_nu >= 3.0 && uniform <= 1e-12 && increase <= 1e-12 && close == 50;
    verdict(
        ok,
        format!(
            "min υ̂ = {min_nu:.4}, uniform-bound slack {uniform:.2e}, max increase in ℓ {increase:.2e}, \
             ℓ=12 gap < 1e-3 on {close}/50 pairs (worst {worst_gap:.3e})"
        ),
    )
}

fn main() {
    let mut h = Hygiene::default();
    let mut maps = Harvest::new();
    let mut results: Vec<(u32, &str, Verdict, Duration)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let took = t.elapsed();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {} [{:.1} s]", v.detail, took.as_secs_f64());
        results.push((id, name, v, took));
    };

    run(1, "beta closed forms", &mut || {
        let t = Instant::now();
        let v = criterion_1(&mut h, &mut maps);
        within_time(v, t.elapsed(), 120)
    });
    let mut c2 = Vec::new();
    run(2, "beta property suite", &mut || {
        let t = Instant::now();
        c2 = criterion_2();
        within_time(outcomes_verdict(&c2), t.elapsed(), 600)
    });
    run(3, "geometric Renyi SDP vs spectral oracle", &mut || {
        let t = Instant::now();
        let v = criterion_3(&mut h);
        within_time(v, t.elapsed(), 300)
    });
    run(4, "channel divergence soundness", &mut || criterion_4(&mut h));
    let mut fig4 = Vec::new();
    run(5, "partial swap sweep", &mut || {
        let t = Instant::now();
        fig4 = sweep(&mut h, Preset::Fig4);
        criterion_5(&fig4, t.elapsed())
    });
    let mut fig5 = Vec::new();
    run(6, "noisy CNOT sweep", &mut || {
        fig5 = sweep(&mut h, Preset::Fig5);
        criterion_6(&mut h, &fig5)
    });
    let mut fig6 = Vec::new();
    run(7, "depolarizing sweep vs Holevo curve", &mut || {
        fig6 = sweep(&mut h, Preset::Fig6);
        criterion_7(&fig6)
    });
    let mut c8 = None;
    run(8, "upsilon below C_beta and monotone in ell", &mut || {
        let o = verify::upsilon_ordering(DEFAULT_SEED, 20, &[1, 2, 4]);
        let v = verdict(o.passed, o.to_string());
        c8 = Some(o);
        v
    });
    run(9, "comparator bound on harvested maps", &mut || criterion_9(&mut h, &mut maps));
    run(10, "hypothesis testing divergence", &mut criterion_10);
    run(11, "geometric Renyi convergence numerics", &mut criterion_11);
    run(12, "certified solves and byte-stable sweeps", &mut || {
        let mut unstable = Vec::new();
        for (p, first) in [(Preset::Fig4, &fig4), (Preset::Fig5, &fig5), (Preset::Fig6, &fig6)] {
            let again = run_sweep(&p.config(), false).expect("preset config is valid");
            if csv_string(&again) != csv_string(first) {
                unstable.push(p.name().to_string());
            }
        }
        // the verify helpers count an uncertified solve as a failure
        let verified = c2.iter().chain(c8.as_ref()).all(|o| o.passed);
        let ok = h.uncertified.is_empty() && verified && unstable.is_empty();
        verdict(
            ok,
            format!(
                "{} direct solves with {} uncertified, criteria 2 and 8 suites {}, sweeps {}{}{}",
                h.solves,
                h.uncertified.len(),
                if verified { "all certified" } else { "reported failures" },
                if unstable.is_empty() { "byte-stable" } else { "NOT byte-stable" },
                list(&h.uncertified),
                list(&unstable)
            ),
        )
    });

    let passed = results.iter().filter(|r| r.2.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed < results.len() {
        std::process::exit(1);
    }
}
