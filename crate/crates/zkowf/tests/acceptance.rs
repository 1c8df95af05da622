//! End-to-end checks of the library's headline inequalities. Each test
//! covers one claim, prints a single pass/fail line with its runtime, and
//! enforces the runtime budget it was designed for.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num::{BigInt, One, Signed, Zero};

use zkowf::candidates::{
    cr_candidate, nizk_candidate, pc_candidate, pc_hybrid, rv_candidate, CrContext, HybridKind,
    ReductionParams,
};
use zkowf::dist::{
    hoeffding_tail, BitString, FiniteDistribution, Probability, Rat, SeededRng,
};
use zkowf::inverters::{measure_deviation_exact, Inverter};
use zkowf::protocol::{measure_error_profile_nizk, measure_error_profile_pc};
use zkowf::reductions::{
    b_value_sampled, cr_reduce, nizk_accept_exact, pc_accept_exact, pc_reduce, rv_reduce,
};
use zkowf::zoo::{
    cycle4, cycle4_relabeled, dial_instances, make_dial_nizk, make_dial_nizk_noisy, make_dial_pc,
    make_graph_iso, path4, DialProfile,
};

fn prob(num: u64, den: u64) -> Probability {
    Probability::new(Rat::new(BigInt::from(num), BigInt::from(den))).unwrap()
}

fn sigma(n: u64) -> f64 {
    0.5 / (n as f64).sqrt()
}

/// Print the one-line verdict and enforce the check plus its time budget.
fn conclude(name: &str, started: Instant, budget: Duration, ok: bool) {
    let elapsed = started.elapsed();
    let within = elapsed <= budget;
    println!(
        "{} ({:.1}s) {name}",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "{name}: claim failed");
    assert!(within, "{name}: took {elapsed:?}, budget {budget:?}");
}

#[test]
fn dial_profiles_measure_requested_errors_exactly() {
    let started = Instant::now();
    let mut rng = SeededRng::new(0xacc1);
    let mut ok = true;
    for trial in 0..50u64 {
        let m = 1 + rng.below(12) as u32;
        let lz = rng.below(7) as u32;
        let den = 1u64 << m;
        let c_num = rng.below(den + 1);
        let s_num = rng.below(den - c_num + 1);
        let z_num = rng.below((1u64 << lz) + 1);
        let profile = DialProfile::new(
            prob(c_num, den),
            prob(s_num, den),
            prob(z_num, 1u64 << lz),
            m,
            lz,
            0x100 + trial,
        )
        .unwrap();
        let spec = make_dial_nizk(&profile, 2, 4).unwrap();
        let (yes, w, no) = dial_instances(2);
        let measured = measure_error_profile_nizk(&spec, &yes, &w, &no).unwrap();
        ok &= measured.completeness == profile.eps_c
            && measured.soundness == profile.eps_s
            && measured.zk == profile.eps_z;
    }
    conclude(
        "50 dyadic dial profiles measure exactly as requested",
        started,
        Duration::from_secs(60),
        ok,
    );
}

#[test]
fn noninteractive_reduction_acceptance_is_exact_on_both_arms() {
    let started = Instant::now();
    let profile = DialProfile::new(prob(1, 16), prob(1, 8), prob(1, 4), 4, 2, 7).unwrap();
    let spec = make_dial_nizk(&profile, 4, 8).unwrap();
    let (yes, _, no) = dial_instances(4);

    let cand = nizk_candidate(&spec, &yes).unwrap();
    let inv = Inverter::canonical(&cand.func).unwrap();
    let yes_acc = nizk_accept_exact(&cand, &inv).unwrap();

    let cand = nizk_candidate(&spec, &no).unwrap();
    let inv = Inverter::canonical(&cand.func).unwrap();
    let no_acc = nizk_accept_exact(&cand, &inv).unwrap();

    // 1 - eps_c - eps_z = 11/16; the canonical oracle never fails, so the
    // yes arm meets the bound with the exact value 15/16.
    let ok = yes_acc.rat() >= &Rat::new(BigInt::from(11), BigInt::from(16))
        && no_acc.rat() <= &Rat::new(BigInt::one(), BigInt::from(8));
    conclude(
        "non-interactive reduction: yes >= 11/16 and no <= 1/8, exactly",
        started,
        Duration::from_secs(10),
        ok,
    );
}

#[test]
fn public_coin_reduction_meets_its_bound_on_graph_isomorphism() {
    let started = Instant::now();
    let n: u64 = 100_000;
    let p = 8.0f64;
    let k = 2.0f64;
    let mut rng = SeededRng::new(0xacc3);

    let yes_proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
    let cand = pc_candidate(&yes_proto.spec, &yes_proto.instance).unwrap();
    let inv = Inverter::distributional(&cand.func).unwrap();
    let hits = (0..n).filter(|_| pc_reduce(&cand, &inv, &mut rng).unwrap()).count();
    let yes_acc = hits as f64 / n as f64;
    // eps_c = eps_z = 0 here, so the bound is 1 - k/p - 3 sigma.
    let yes_ok = yes_acc >= 1.0 - k / p - 3.0 * sigma(n);

    let no_proto = make_graph_iso(&cycle4(), &path4()).unwrap();
    let cand = pc_candidate(&no_proto.spec, &no_proto.instance).unwrap();
    let inv = Inverter::distributional(&cand.func).unwrap();
    let hits = (0..n).filter(|_| pc_reduce(&cand, &inv, &mut rng).unwrap()).count();
    let no_acc = hits as f64 / n as f64;
    // Exhaustive best-prover value on a non-isomorphic pair is one half.
    let no_ok = no_acc <= 0.5 + 3.0 * sigma(n);

    conclude(
        "public-coin reduction on graphs: yes >= 0.75 - slack, no <= 0.5 + slack",
        started,
        Duration::from_secs(300),
        yes_ok && no_ok,
    );
}

#[test]
fn hybrid_ladder_inequalities_hold_exactly() {
    let started = Instant::now();
    let mut ok = true;

    // Dialed two-round protocol: each ladder step moves by at most the
    // simulation or completeness error.
    let profile = DialProfile::new(prob(1, 16), prob(1, 8), prob(1, 4), 4, 2, 7).unwrap();
    let spec = make_dial_pc(&profile, 4, &[2, 2], &[3, 3]).unwrap();
    let (yes, w, _) = dial_instances(4);
    let cand = pc_candidate(&spec, &yes).unwrap();
    let inv = Inverter::distributional(&cand.func).unwrap();
    for i in 1..=2usize {
        let si = pc_hybrid(&cand, &w, &inv, HybridKind::SI(i)).unwrap();
        let pi = pc_hybrid(&cand, &w, &inv, HybridKind::PI(i)).unwrap();
        let mi = pc_hybrid(&cand, &w, &inv, HybridKind::MI(i)).unwrap();
        ok &= si.stat_distance(&pi).unwrap() <= profile.eps_z;
        ok &= mi.stat_distance(&pi).unwrap() <= profile.eps_z;
    }
    let dp = pc_hybrid(&cand, &w, &inv, HybridKind::PFull).unwrap();
    let pk = pc_hybrid(&cand, &w, &inv, HybridKind::PI(2)).unwrap();
    ok &= dp.stat_distance(&pk).unwrap() <= profile.eps_c;

    // Prover-first graph protocol: the first mixed and honest hybrids
    // coincide identically.
    let proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
    let w = proto.witness.unwrap();
    let cand = pc_candidate(&proto.spec, &proto.instance).unwrap();
    let inv = Inverter::distributional(&cand.func).unwrap();
    let m1 = pc_hybrid(&cand, &w, &inv, HybridKind::MI(1)).unwrap();
    let p1 = pc_hybrid(&cand, &w, &inv, HybridKind::PI(1)).unwrap();
    ok &= m1.stat_distance(&p1).unwrap().rat().is_zero();

    conclude(
        "hybrid ladder: steps within eps_z / eps_c, first mixed step exactly zero",
        started,
        Duration::from_secs(120),
        ok,
    );
}

/// The shared setup for the estimate-sweep claims: graph isomorphism on 4
/// vertices with a conditional level-1 oracle.
fn sweep_setup() -> (Arc<zkowf::protocol::PublicCoinSpec>, BitString, ReductionParams, Vec<Arc<Inverter>>)
{
    let proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
    let params = ReductionParams::custom(4, 16, prob(1, 4));
    let top = Arc::new(
        Inverter::canonical(
            &cr_candidate(CrContext::new(&proto.spec, &proto.instance, &params, 2, vec![]).unwrap())
                .unwrap()
                .func,
        )
        .unwrap(),
    );
    let level1 = cr_candidate(
        CrContext::new(&proto.spec, &proto.instance, &params, 1, vec![top.clone()]).unwrap(),
    )
    .unwrap();
    let cond = Arc::new(Inverter::conditional(Arc::new(level1), 4096).unwrap());
    (proto.spec, proto.instance, params, vec![cond, top])
}

#[test]
fn estimate_sweep_value_tracks_reduction_acceptance() {
    let started = Instant::now();
    let n: u64 = 10_000;
    let (spec, x, params, inverters) = sweep_setup();
    let mut rng = SeededRng::new(0xacc5);

    let b = b_value_sampled(&spec, &x, &params, &inverters, n, &mut rng).unwrap();
    let hits = (0..n).filter(|_| cr_reduce(&spec, &x, &params, &inverters, &mut rng).unwrap()).count();
    let acc = hits as f64 / n as f64;

    let k = spec.rounds as f64;
    let tau = params.tau.to_f64();
    let gap = (b.value.to_f64() - acc).abs();
    let allowance = 2.0 * (k - 1.0) * tau
        + hoeffding_tail(params.tau.rat(), params.q)
        + 3.0 * (2.0f64).sqrt() * sigma(n);
    conclude(
        "estimate-sweep value within the tracking allowance of the acceptance rate",
        started,
        Duration::from_secs(600),
        gap <= allowance,
    );
}

#[test]
fn estimate_sweep_value_meets_the_error_budget() {
    let started = Instant::now();
    let n: u64 = 10_000;
    let (spec, x, params, inverters) = sweep_setup();
    let mut rng = SeededRng::new(0xacc6);

    let b = b_value_sampled(&spec, &x, &params, &inverters, n, &mut rng).unwrap();

    // Oracle failure allowance: the conditional oracle's sampled failure
    // rate plus its radius; the top oracle is exact.
    let level1 = cr_candidate(
        CrContext::new(&spec, &x, &params, 1, inverters[1..].to_vec()).unwrap(),
    )
    .unwrap();
    let probes = 400u64;
    let misses = (0..probes)
        .filter(|_| {
            let r = level1.func.domain.sample(&mut rng);
            let y = level1.func.eval(&r);
            !matches!(inverters[0].answer(&y, &mut rng), Some(c) if level1.func.eval(&c) == y)
        })
        .count();
    let deviation = misses as f64 / probes as f64 + 3.0 * sigma(probes);

    let yes_profile = {
        let proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
        let no = make_graph_iso(&cycle4(), &path4()).unwrap();
        measure_error_profile_pc(
            &proto.spec,
            &proto.instance,
            &proto.witness.unwrap(),
            &no.instance,
        )
        .unwrap()
    };

    let k = spec.rounds as f64;
    let hoe = (k - 1.0) * hoeffding_tail(params.tau.rat(), params.q);
    let bound = 1.0
        - yes_profile.completeness.to_f64()
        - k * yes_profile.zk.to_f64()
        - k * (1.0 / params.p as f64 + deviation)
        - hoe
        - 3.0 * sigma(n);
    println!(
        "  terms: value={:.6} eps_c={} eps_z={} inversion={:.6} hoeffding={:.6} sampling={:.6} bound={:.6}",
        b.value.to_f64(),
        yes_profile.completeness.to_f64(),
        k * yes_profile.zk.to_f64(),
        k * (1.0 / params.p as f64 + deviation),
        hoe,
        3.0 * sigma(n),
        bound,
    );
    conclude(
        "estimate-sweep value at least one minus the reported error budget",
        started,
        Duration::from_secs(600),
        b.value.to_f64() >= bound,
    );
}

#[test]
fn randomized_verifier_reduction_meets_its_bounds() {
    let started = Instant::now();
    let n: u64 = 10_000;
    let q: u64 = 64;
    let p: u64 = 4;
    let tau = prob(1, p);
    // A quarter flip rate on a two-bit verifier coin (threshold one of
    // four outcomes).
    let profile = DialProfile::new(prob(1, 16), prob(1, 8), prob(1, 4), 4, 2, 7).unwrap();
    let spec = make_dial_nizk_noisy(&profile, 4, 8, 2, 1).unwrap();
    let (yes, w, no) = dial_instances(4);
    let measured = measure_error_profile_nizk(&spec, &yes, &w, &no).unwrap();
    let mut rng = SeededRng::new(0xacc7);

    let cand = Arc::new(rv_candidate(&spec, &yes, q).unwrap());
    let inv = Inverter::coin_counting(cand.clone()).unwrap();
    let hits = (0..n).filter(|_| rv_reduce(&cand, &inv, &tau, &mut rng).unwrap()).count();
    let yes_acc = hits as f64 / n as f64;
    let yes_bound = 1.0
        - measured.completeness.to_f64()
        - measured.zk.to_f64()
        - 3.0 / p as f64
        - hoeffding_tail(tau.rat(), q)
        - 3.0 * sigma(n);

    let cand = Arc::new(rv_candidate(&spec, &no, q).unwrap());
    let inv = Inverter::coin_counting(cand.clone()).unwrap();
    let hits = (0..n).filter(|_| rv_reduce(&cand, &inv, &tau, &mut rng).unwrap()).count();
    let no_acc = hits as f64 / n as f64;
    let no_bound = measured.soundness.to_f64() + 3.0 * sigma(n);

    println!("  yes {yes_acc:.4} >= {yes_bound:.4}; no {no_acc:.4} <= {no_bound:.4}");
    conclude(
        "randomized-verifier reduction: yes above and no below the measured bounds",
        started,
        Duration::from_secs(300),
        yes_acc >= yes_bound && no_acc <= no_bound,
    );
}

#[test]
fn exact_distribution_and_concentration_properties_hold() {
    let started = Instant::now();
    let mut rng = SeededRng::new(0xacc8);
    let mut ok = true;

    // Triangle inequality and data processing on 1000 random triples,
    // exact, zero tolerance.
    let random_dist = |rng: &mut SeededRng| -> FiniteDistribution<u32> {
        loop {
            let weights: Vec<(u32, Rat)> = (0..6)
                .map(|i| (i, Rat::new(BigInt::from(rng.below(9)), BigInt::one())))
                .collect();
            if weights.iter().any(|(_, w)| w.is_positive()) {
                return FiniteDistribution::normalised("pt", weights).unwrap();
            }
        }
    };
    for _ in 0..1000 {
        let (a, b, c) = (random_dist(&mut rng), random_dist(&mut rng), random_dist(&mut rng));
        let ab = a.stat_distance(&b).unwrap();
        let ac = a.stat_distance(&c).unwrap();
        let cb = c.stat_distance(&b).unwrap();
        ok &= ab.rat() <= &(ac.rat() + cb.rat());
        let modulus = 1 + rng.below(5) as u32;
        let fa = a.push_forward("mod", |v| v % modulus);
        let fb = b.push_forward("mod", |v| v % modulus);
        ok &= fa.stat_distance(&fb).unwrap().rat() <= ab.rat();
    }

    // The distributional oracle has exactly zero deviation on both
    // candidate shapes.
    let profile = DialProfile::new(prob(1, 16), prob(1, 8), prob(1, 4), 4, 2, 7).unwrap();
    let (yes, _, no) = dial_instances(4);
    let nizk = nizk_candidate(&make_dial_nizk(&profile, 4, 8).unwrap(), &yes).unwrap();
    let inv = Inverter::distributional(&nizk.func).unwrap();
    ok &= measure_deviation_exact(&nizk.func, &inv).unwrap().deviation.rat().is_zero();
    let gi = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
    let pc = pc_candidate(&gi.spec, &gi.instance).unwrap();
    let inv = Inverter::distributional(&pc.func).unwrap();
    ok &= measure_deviation_exact(&pc.func, &inv).unwrap().deviation.rat().is_zero();

    // Concentration: the empirical tail of a fair-coin mean stays below
    // the stated bound on three (tau, q) settings.
    for (tn, td, q) in [(1u64, 4u64, 16u64), (1, 4, 64), (1, 8, 64)] {
        let tau = Rat::new(BigInt::from(tn), BigInt::from(td));
        let bound = hoeffding_tail(&tau, q);
        let reps = 4000u64;
        let tail = (0..reps)
            .filter(|_| {
                let heads = (0..q).filter(|_| rng.below(2) == 1).count();
                let dev = (heads as f64 / q as f64 - 0.5).abs();
                dev >= tn as f64 / td as f64
            })
            .count() as f64
            / reps as f64;
        ok &= tail <= bound;
    }

    // Soundness ceiling: exact no-arm acceptance never exceeds the
    // measured soundness error, for either table oracle, anywhere in the
    // protocol zoo.
    let spec = make_dial_nizk(&profile, 4, 8).unwrap();
    let cand = nizk_candidate(&spec, &no).unwrap();
    for inv in [
        Inverter::canonical(&cand.func).unwrap(),
        Inverter::distributional(&cand.func).unwrap(),
    ] {
        ok &= nizk_accept_exact(&cand, &inv).unwrap() <= profile.eps_s;
    }
    let pc_spec = make_dial_pc(&profile, 4, &[2, 2], &[3, 3]).unwrap();
    let cand = pc_candidate(&pc_spec, &no).unwrap();
    for inv in [
        Inverter::canonical(&cand.func).unwrap(),
        Inverter::distributional(&cand.func).unwrap(),
    ] {
        ok &= pc_accept_exact(&cand, &inv).unwrap() <= profile.eps_s;
    }
    let gi_no = make_graph_iso(&cycle4(), &path4()).unwrap();
    let cand = pc_candidate(&gi_no.spec, &gi_no.instance).unwrap();
    let half = prob(1, 2);
    for inv in [
        Inverter::canonical(&cand.func).unwrap(),
        Inverter::distributional(&cand.func).unwrap(),
    ] {
        ok &= pc_accept_exact(&cand, &inv).unwrap() <= half;
    }

    conclude(
        "metric, inversion, concentration, and soundness-ceiling properties all hold",
        started,
        Duration::from_secs(300),
        ok,
    );
}
