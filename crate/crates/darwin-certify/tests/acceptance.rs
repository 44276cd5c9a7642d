//! Acceptance suite: one test per acceptance criterion, each printing a
//! single PASS line when its assertions hold (run with `--nocapture` to see
//! them). Tolerances and runtime budgets are pinned in the assertions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::path::PathBuf;
use std::time::Instant;

use darwin_certify::bounds::{
    agreement_lower_bound, distinguishability_bound, projective_bound, Verdict,
};
use darwin_certify::channels::{make_broadcast, simulate_finite_env, BroadcastSpec, FiniteEnvSpec};
use darwin_certify::contextuality::{contextuality_distance_bound, diamond_distance};
use darwin_certify::discrimination::{
    agreement_probability, eta, helstrom_two, p_guess, DiscriminationInstance,
};
use darwin_certify::pipeline::{self, RunConfig, SweepParameter};
use darwin_certify::qmath::{eigh, trace_norm, CMatrix, DensityMatrix, HermitianMatrix, Povm, C64};
use darwin_certify::scenario::Scenario;
use darwin_certify::simplex::{caratheodory_witness, statistical_distance, StateFamily};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn load_scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).expect("bundled scenario loads")
}

fn random_density(dim: usize, rng: &mut StdRng) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let gram = g.matmul(&g.adjoint());
    DensityMatrix::from_cmatrix(gram.scale_re(1.0 / gram.trace().re)).unwrap()
}

fn random_simplex(k: usize, rng: &mut StdRng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

fn random_povm(dim: usize, outcomes: usize, rng: &mut StdRng) -> Povm {
    let mut gs: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = CMatrix::from_fn(dim, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            g.matmul(&g.adjoint())
        })
        .collect();
    let total = gs.iter().fold(CMatrix::zeros(dim), |acc, g| acc.add(g));
    let isq = darwin_certify::qmath::pinv_sqrt(&total, 1e-12);
    for g in gs.iter_mut() {
        *g = isq.matmul(g).matmul(&isq).symmetrize();
    }
    Povm::measurement(
        gs.into_iter()
            .map(|g| HermitianMatrix::new(g).unwrap())
            .collect(),
    )
    .unwrap()
}

fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
    let m = CMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new((1.0 + z) / 2.0, 0.0),
        (1, 1) => C64::new((1.0 - z) / 2.0, 0.0),
        (0, 1) => C64::new(x / 2.0, -y / 2.0),
        _ => C64::new(x / 2.0, y / 2.0),
    });
    DensityMatrix::from_cmatrix(m).unwrap()
}

#[test]
fn criterion_01_projective_cutoff_values() {
    let start = Instant::now();
    for d in 2..=6 {
        let cutoff = distinguishability_bound(&Povm::computational(d), 1e-8).unwrap();
        assert!(cutoff.converged, "d={d}: gap {}", cutoff.gap);
        let expect = projective_bound(d);
        assert!(
            (cutoff.p_hat - expect).abs() <= 1e-6,
            "d={d}: p_hat {} vs {expect}",
            cutoff.p_hat
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime budget exceeded: {elapsed:?}"
    );
    println!(
        "[criterion 1] PASS: projective cut-off matches 1 - 1/(2d) for d = 2..6 within 1e-6 ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_theorem_pipeline_on_perfect_broadcast() {
    let start = Instant::now();
    let scenario = load_scenario("perfect_broadcast_qubit_t3.json");
    let report = pipeline::certify(&scenario, &RunConfig::default(), None).unwrap();

    assert_eq!(report.bobs.len(), 3);
    for bob in &report.bobs {
        assert!(
            (bob.eta - 1.0).abs() <= 1e-9,
            "bob {}: eta {}",
            bob.index,
            bob.eta
        );
        assert!(bob.independence.independent);
        let model = bob.model.as_ref().expect("model built for every observer");
        assert!(
            model.reproduction_max_residual <= 1e-10,
            "bob {}: residual {}",
            bob.index,
            model.reproduction_max_residual
        );
        assert!(model.reproduction_checked >= 20 * 5);
        assert_eq!(model.context_failures, 0);
    }
    assert!(
        (report.cutoff.p_hat - 0.75).abs() <= 1e-9,
        "p_hat {}",
        report.cutoff.p_hat
    );
    assert_eq!(report.verdict, Verdict::Emerged);

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime budget exceeded: {elapsed:?}"
    );
    println!(
        "[criterion 2] PASS: perfect qubit broadcast t=3 certifies EMERGED with eta=1, p_hat=0.75, residuals <= 1e-10 ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_03_noise_sweep() {
    let start = Instant::now();
    let scenario = load_scenario("noisy_broadcast_qubit.json");
    let table = pipeline::sweep(
        &scenario,
        &RunConfig::default(),
        SweepParameter::Noise,
        0.0,
        1.0,
        50,
        None,
    )
    .unwrap();
    assert_eq!(table.rows.len(), 50);
    for pair in table.rows.windows(2) {
        assert!(
            pair[1].eta <= pair[0].eta + 1e-6,
            "eta not monotone at value {}",
            pair[1].value
        );
    }
    let crossing = table.crossing.expect("eta crosses p_hat inside the grid");
    assert!(
        crossing.0 < 0.5 && crossing.1 > 0.45,
        "crossing bracket {crossing:?} does not straddle 0.5"
    );
    for row in &table.rows {
        assert!((row.p_hat - 0.75).abs() <= 1e-6);
        if row.value < 1.0 - 1e-12 {
            assert!(row.independent, "independence lost at noise {}", row.value);
        } else {
            assert!(!row.independent, "independence must fail at noise 1");
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime budget exceeded: {elapsed:?}"
    );
    println!(
        "[criterion 3] PASS: 50-point noise sweep monotone, crossing bracket {:?} at p_hat = 0.75, independence fails only at noise 1 ({} ms)",
        crossing,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_04_discrimination_oracles() {
    let mut rng = StdRng::seed_from_u64(0xD15C);
    // 200 commuting instances against the classical maximum-likelihood value.
    for trial in 0..200 {
        let dim = rng.gen_range(2..=4);
        let k = rng.gen_range(2..=4);
        let priors = random_simplex(k, &mut rng);
        let states: Vec<DensityMatrix> = (0..k)
            .map(|_| {
                let diag = random_simplex(dim, &mut rng);
                DensityMatrix::from_cmatrix(CMatrix::from_fn(dim, |i, j| {
                    if i == j {
                        C64::new(diag[i], 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }))
                .unwrap()
            })
            .collect();
        let mut oracle = 0.0;
        for x in 0..dim {
            oracle += (0..k)
                .map(|kk| priors[kk] * states[kk].matrix()[(x, x)].re)
                .fold(0.0, f64::max);
        }
        let inst = DiscriminationInstance::new(priors, states).unwrap();
        let res = p_guess(&inst, 1e-9);
        assert!(
            (res.value - oracle).abs() <= 1e-6,
            "trial {trial}: solver {} vs classical {oracle}",
            res.value
        );
    }
    // 100 two-state instances against the closed trace-norm formula.
    for trial in 0..100 {
        let dim = rng.gen_range(2..=4);
        let p0 = rng.gen_range(0.05..0.95);
        let r0 = random_density(dim, &mut rng);
        let r1 = random_density(dim, &mut rng);
        let expect = helstrom_two(p0, &r0, 1.0 - p0, &r1).unwrap();
        let inst = DiscriminationInstance::new(vec![p0, 1.0 - p0], vec![r0, r1]).unwrap();
        let res = p_guess(&inst, 1e-10);
        assert!(
            (res.value - expect).abs() <= 1e-8,
            "trial {trial}: solver {} vs closed form {expect}",
            res.value
        );
    }
    println!(
        "[criterion 4] PASS: 200 commuting instances within 1e-6 of classical ML, 100 two-state instances within 1e-8 of the trace-norm formula"
    );
}

#[test]
fn criterion_05_caratheodory_suite() {
    let mut rng = StdRng::seed_from_u64(0xCA7A);
    for trial in 0..100 {
        // Affinely dependent 4-state qubit family: three random states plus a
        // strictly convex combination of them.
        let base: Vec<DensityMatrix> = (0..3)
            .map(|_| {
                bloch(
                    rng.gen_range(-0.55..0.55),
                    rng.gen_range(-0.55..0.55),
                    rng.gen_range(-0.55..0.55),
                )
            })
            .collect();
        let w = random_simplex(3, &mut rng);
        let mut fourth = CMatrix::zeros(2);
        for (wi, st) in w.iter().zip(&base) {
            fourth = fourth.add(&st.matrix().scale_re(*wi));
        }
        let mut states = base;
        states.push(DensityMatrix::from_cmatrix(fourth).unwrap());
        let family = StateFamily::new(states).unwrap();

        let p = random_simplex(4, &mut rng);
        let mut target = CMatrix::zeros(2);
        for (pi, st) in p.iter().zip(family.states()) {
            target = target.add(&st.matrix().scale_re(*pi));
        }
        let target = DensityMatrix::from_cmatrix(target).unwrap();

        let witness = caratheodory_witness(&family, &target, 1e-8)
            .unwrap()
            .unwrap_or_else(|| panic!("trial {trial}: no witness for a dependent family"));
        assert!(witness.contains(&0.0), "trial {trial}: no exact zero");
        assert!(witness.iter().all(|q| *q >= 0.0));
        assert!((witness.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let mut recon = CMatrix::zeros(2);
        for (qi, st) in witness.iter().zip(family.states()) {
            recon = recon.add(&st.matrix().scale_re(*qi));
        }
        let err = trace_norm(&recon.sub(target.matrix()));
        assert!(err <= 1e-8, "trial {trial}: reconstruction error {err}");

        let d = statistical_distance(&p, &witness).unwrap();
        let pmin = p.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(d >= pmin - 1e-10, "trial {trial}: D = {d} < min p = {pmin}");

        // Four more interior decompositions per family: 500 (p, q) pairs in
        // total, every one satisfying the distance inequality.
        for _ in 0..4 {
            let p2 = random_simplex(4, &mut rng);
            let mut t2 = CMatrix::zeros(2);
            for (pi, st) in p2.iter().zip(family.states()) {
                t2 = t2.add(&st.matrix().scale_re(*pi));
            }
            let t2 = DensityMatrix::from_cmatrix(t2).unwrap();
            let w2 = caratheodory_witness(&family, &t2, 1e-8)
                .unwrap()
                .expect("dependent family always yields a witness");
            let d2 = statistical_distance(&p2, &w2).unwrap();
            let pmin2 = p2.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                d2 >= pmin2 - 1e-10,
                "trial {trial}: D = {d2} < min p = {pmin2}"
            );
        }
    }
    println!(
        "[criterion 5] PASS: 100 dependent families yield exact-zero witnesses (error <= 1e-8); D(p,q) >= min_k p_k on all 500 decomposition pairs"
    );
}

#[test]
fn criterion_06_agreement_bound_across_sweep() {
    for t in [1usize, 2, 3] {
        for i in 0..50 {
            let noise = i as f64 / 49.0;
            let chan = make_broadcast(&BroadcastSpec::symmetric(2, t, noise)).unwrap();
            // All observers are symmetric; solve one and reuse its POVM.
            let bob = chan.reduce_to_bob(&vec![2; t], 0).unwrap();
            let eta_res = eta(&bob, 1e-8).unwrap();
            let povms = vec![eta_res.worst_povm.clone(); t];
            let agreement = agreement_probability(&chan, &vec![2; t], &povms).unwrap();
            let bound = agreement_lower_bound(t, eta_res.lower);
            if bound > 0.0 {
                assert!(
                    agreement >= bound - 1e-6,
                    "t={t} noise={noise}: agreement {agreement} < bound {bound}"
                );
            }
        }
    }
    println!(
        "[criterion 6] PASS: agreement probability clears 1 - 6t(1-eta)^(1/4) - 1e-6 wherever nonvacuous, for t = 1,2,3 over 50 noise points"
    );
}

#[test]
fn criterion_07_diamond_norm_reference_points() {
    // Identity vs completely depolarizing on a qubit: exactly 3/2.
    let mut id = CMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            id[(i * 2 + i, j * 2 + j)] = C64::new(0.5, 0.0);
        }
    }
    let identity = darwin_certify::channels::ChoiMatrix::new(id, 2, 2).unwrap();
    let depol =
        darwin_certify::channels::ChoiMatrix::new(CMatrix::identity(4).scale_re(0.25), 2, 2)
            .unwrap();
    let r = diamond_distance(&identity, &depol, 1e-5).unwrap();
    assert!(r.converged, "bracket gap {}", r.gap);
    assert!((r.value - 1.5).abs() <= 1e-4, "value {}", r.value);
    assert!(r.lower <= 1.5 + 1e-9 && r.upper >= 1.5 - 1e-9);

    let same = diamond_distance(&identity, &identity, 1e-9).unwrap();
    assert!(same.value.abs() <= 1e-9);
    println!(
        "[criterion 7] PASS: ||id - depolarizing||_diamond = 1.5 within 1e-4 with certified bracket [{:.6}, {:.6}]; self-distance <= 1e-9",
        r.lower, r.upper
    );
}

#[test]
fn criterion_08_l1_bound_chain_for_finite_environments() {
    let ideal = make_broadcast(&BroadcastSpec::symmetric(2, 1, 0.0)).unwrap();
    let preparations = vec![
        DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap(),
        DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap(),
        DensityMatrix::basis_state(2, 0),
        DensityMatrix::maximally_mixed(2),
    ];
    let mut rng = StdRng::seed_from_u64(8);
    let measurements = vec![
        Povm::computational(2),
        random_povm(2, 3, &mut rng),
        random_povm(2, 2, &mut rng),
    ];
    for n in [1usize, 2, 4] {
        for angle in [0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
            let spec = FiniteEnvSpec::uniform(n, vec![0], angle);
            let choi = simulate_finite_env(&spec).unwrap();
            let dev =
                contextuality_distance_bound(&choi, &ideal, &measurements, &preparations, 1e-7)
                    .unwrap();
            assert!(
                dev.observed_l1 <= dev.bound + 1e-8,
                "N={n} angle={angle}: observed {} > bound {}",
                dev.observed_l1,
                dev.bound
            );
            if (angle - FRAC_PI_2).abs() < 1e-12 {
                assert!(
                    dev.bound <= 1e-9,
                    "N={n}: bound {} at full coupling",
                    dev.bound
                );
                assert!(dev.observed_l1 <= 1e-9);
            }
        }
    }
    println!(
        "[criterion 8] PASS: observed l1 deviation <= (C/d_A)*diamond + 1e-8 across the finite-environment family; both sides <= 1e-9 at full coupling"
    );
}

#[test]
fn criterion_09_ssb_corollary_path() {
    let scenario = load_scenario("ssb_qubit.json");
    let report = pipeline::ssb(&scenario, &RunConfig::default(), None).unwrap();
    assert!(report.is_ssb, "violations: {:?}", report.violations);
    assert_eq!(report.verdict, Verdict::Emerged);
    let p_hat = report.p_hat.unwrap();
    assert!((p_hat - 0.75).abs() <= 1e-12, "closed-form p_hat {p_hat}");
    let solver = report.p_hat_solver.unwrap();
    assert!((solver - 0.75).abs() <= 1e-6, "solver p_hat {solver}");
    assert_eq!(report.bobs.len(), 3, "system copy plus two observers");
    for bob in &report.bobs {
        assert!(
            (bob.eta - 1.0).abs() <= 1e-9,
            "bob {}: eta {}",
            bob.index,
            bob.eta
        );
        assert!(
            bob.reproduction_max_residual <= 1e-10,
            "bob {}: residual {}",
            bob.index,
            bob.reproduction_max_residual
        );
    }

    let noisy = load_scenario("ssb_qubit_noisy.json");
    let noisy_report = pipeline::ssb(&noisy, &RunConfig::default(), None).unwrap();
    assert!(!noisy_report.is_ssb);
    assert!(noisy_report
        .violations
        .iter()
        .any(|v| v.contains("share support")));
    println!(
        "[criterion 9] PASS: spectrum-broadcast scenario certifies EMERGED at p_hat = 0.75 with models for system and environment observers; noisy variant rejected"
    );
}

#[test]
fn criterion_10_property_suites() {
    let mut rng = StdRng::seed_from_u64(0xFEED);
    let random_hermitian = |dim: usize, rng: &mut StdRng| {
        CMatrix::from_fn(dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .symmetrize()
    };

    // Trace-norm lemma: sqrt(Tr|A|^2) <= Tr|A|.
    for _ in 0..500 {
        let dim = rng.gen_range(2..=6);
        let a = random_hermitian(dim, &mut rng);
        assert!(a.frobenius_norm() <= trace_norm(&a) + 1e-10);
    }
    // Hölder with l = s = 2.
    for _ in 0..500 {
        let dim = rng.gen_range(2..=6);
        let a = random_hermitian(dim, &mut rng);
        let b = random_hermitian(dim, &mut rng);
        assert!(a.hs_inner(&b).norm() <= a.frobenius_norm() * b.frobenius_norm() + 1e-10);
    }
    // POVM response normalization: Σ_b Tr[F_b σ] = 1 for every state.
    for _ in 0..500 {
        let dim = rng.gen_range(2..=6);
        let povm = random_povm(dim, rng.gen_range(2..=5), &mut rng);
        let sigma = random_density(dim, &mut rng);
        let total: f64 = povm.outcome_distribution(&sigma).iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "normalization {total}");
    }
    // Partial trace preserves the trace.
    for _ in 0..500 {
        let d1 = rng.gen_range(2..=3);
        let d2 = rng.gen_range(2..=2);
        let rho = random_density(d1 * d2, &mut rng);
        let reduced = rho.partial_trace(&[d1, d2], &[0]).unwrap();
        assert!((reduced.hermitian().trace() - 1.0).abs() <= 1e-10);
        assert!(eigh(reduced.matrix()).values[0] >= -1e-10);
    }
    println!(
        "[criterion 10] PASS: 500-case property suites (trace-norm lemma, Hölder, response normalization, partial-trace preservation) with zero failures"
    );
}
