//! Preimage oracles for candidate functions, and the machinery that
//! measures how far an oracle is from a perfect distributional inverter.
//!
//! An inverter answers images `y` of a candidate `f` with elements of
//! `f^{-1}(y)` (or `None`). The quality notion is distributional: compare
//! the joint law of `(r, f(r))` on uniform `r` against `(A(f(r)), f(r))`,
//! in total variation. Implemented oracles:
//!
//! * *canonical* — deterministic, returns the least preimage in domain
//!   order; its joint law is maximally skewed, useful as a stress case.
//! * *distributional* — returns a uniformly random preimage; its joint law
//!   matches the ideal one exactly (deviation 0).
//! * *noisy* — wraps another oracle and, with a fixed probability, replaces
//!   the answer by a fresh uniform domain element; dials the deviation.
//! * *conditional* — for the recursive constant-round candidates, whose
//!   domains are far too large to tabulate: restricts to inputs whose
//!   simulated prefix matches the target and rejection-samples the
//!   remaining blocks, so a successful answer is exactly uniform over the
//!   preimage set.
//! * *coin-counting* — for the randomized-verifier candidates: weights each
//!   simulator input by the number of coin vectors reproducing the target
//!   estimate and samples a preimage exactly, without tabulating the coin
//!   blocks.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::candidates::{CandidateFunction, CrCandidate, RvCandidate};
use crate::dist::{
    BitString, CoinSpace, Coins, FiniteDistribution, Outcome, Probability, Rat, SeededRng, Sym,
};
use crate::{Error, Result, ENUM_BUDGET};
use num::{BigInt, BigUint, One, Zero};

/// Oracle-randomness block width used by randomized inverters when they
/// appear inside a derandomized candidate domain.
pub const DEFAULT_RD_LEN: u32 = 32;

/// Encoding label of inverter-answer distributions.
const ANSWER_ENC: &str = "inv.answer";

/// What flavour of oracle this is.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InverterKind {
    Canonical,
    Distributional,
    Noisy,
    Conditional,
    CoinCounting,
}

impl std::fmt::Display for InverterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InverterKind::Canonical => "canonical",
            InverterKind::Distributional => "distributional",
            InverterKind::Noisy => "noisy",
            InverterKind::Conditional => "conditional",
            InverterKind::CoinCounting => "coin-counting",
        };
        f.write_str(s)
    }
}

enum Imp {
    Table {
        preimages: BTreeMap<Outcome, Vec<Coins>>,
        pick_least: bool,
    },
    Noisy {
        base: Arc<Inverter>,
        delta: Probability,
        domain: CoinSpace,
    },
    Conditional {
        cand: Arc<CrCandidate>,
        by_prefix: BTreeMap<Vec<BitString>, Vec<Coins>>,
        retry_cap: u64,
    },
    CoinCounting {
        cand: Arc<RvCandidate>,
        /// crs -> simulator inputs with that crs, each with its
        /// accepting-coin count.
        by_crs: BTreeMap<BitString, Vec<(Coins, u64)>>,
    },
}

/// A preimage oracle for one candidate function.
pub struct Inverter {
    kind: InverterKind,
    rd_len: u32,
    imp: Imp,
}

impl Inverter {
    pub fn kind(&self) -> InverterKind {
        self.kind
    }

    /// Randomness-block width a derandomized candidate must budget for
    /// each call of this oracle (0 for deterministic oracles).
    pub fn rd_len(&self) -> u32 {
        self.rd_len
    }

    /// Deterministic oracle over a full preimage table: the least preimage
    /// in mixed-radix domain order, or `None` off the image.
    pub fn canonical(func: &CandidateFunction) -> Result<Self> {
        Ok(Inverter {
            kind: InverterKind::Canonical,
            rd_len: 0,
            imp: Imp::Table { preimages: tabulate(func)?, pick_least: true },
        })
    }

    /// Perfect distributional oracle over a full preimage table: a
    /// uniformly random preimage, or `None` off the image.
    pub fn distributional(func: &CandidateFunction) -> Result<Self> {
        Ok(Inverter {
            kind: InverterKind::Distributional,
            rd_len: DEFAULT_RD_LEN,
            imp: Imp::Table { preimages: tabulate(func)?, pick_least: false },
        })
    }

    /// With probability `delta`, answer with a fresh uniform domain element
    /// instead of the base oracle's answer.
    pub fn noisy(base: Arc<Inverter>, domain: &CoinSpace, delta: Probability) -> Self {
        Inverter {
            kind: InverterKind::Noisy,
            rd_len: DEFAULT_RD_LEN,
            imp: Imp::Noisy { base, delta, domain: domain.clone() },
        }
    }

    /// Oracle for a recursive constant-round candidate at level `i < k`:
    /// tabulates only the simulator inputs by their transcript prefix, then
    /// rejection-samples the coin and randomness blocks. Every attempt
    /// draws the full input fresh, so conditioned on success the answer is
    /// exactly uniform over the target's preimages; `None` after
    /// `retry_cap` failed attempts.
    pub fn conditional(cand: Arc<CrCandidate>, retry_cap: u64) -> Result<Self> {
        let spec = &cand.ctx.spec;
        if cand.ctx.level == spec.rounds {
            return Err(Error::Unsupported(
                "last level has no estimate block; use a table oracle".into(),
            ));
        }
        let i = cand.ctx.level;
        let mut by_prefix: BTreeMap<Vec<BitString>, Vec<Coins>> = BTreeMap::new();
        for rho in spec.sim_space.enumerate()? {
            let t = (spec.simulator)(&cand.ctx.x, &rho);
            by_prefix.entry(t.msgs()[..2 * i - 1].to_vec()).or_default().push(rho);
        }
        Ok(Inverter {
            kind: InverterKind::Conditional,
            rd_len: DEFAULT_RD_LEN,
            imp: Imp::Conditional { cand, by_prefix, retry_cap },
        })
    }

    /// Exact distributional oracle for a randomized-verifier candidate.
    /// For a target `(crs, c/q)` it weights each simulator input `rho`
    /// with matching crs by `A^c (2^v - A)^(q-c)` — the number of coin
    /// vectors under which `rho` maps to the target, where `A` counts
    /// `rho`'s accepting verifier coins — samples `rho` proportionally, and
    /// fills the coin blocks uniformly subject to the hit pattern.
    pub fn coin_counting(cand: Arc<RvCandidate>) -> Result<Self> {
        let spec = &cand.spec;
        let v = spec.verifier_coin_len;
        let mut by_crs: BTreeMap<BitString, Vec<(Coins, u64)>> = BTreeMap::new();
        for rho in spec.sim_space.enumerate()? {
            let (crs, proof) = (spec.simulator)(&cand.x, &rho);
            let accepts = (0..1u64 << v)
                .filter(|&s| {
                    (spec.verifier)(&cand.x, &crs, &proof, &BitString::new(v, s).unwrap())
                })
                .count() as u64;
            by_crs.entry(crs).or_default().push((rho, accepts));
        }
        Ok(Inverter {
            kind: InverterKind::CoinCounting,
            rd_len: DEFAULT_RD_LEN,
            imp: Imp::CoinCounting { cand, by_crs },
        })
    }

    /// Answer an inversion query with fresh randomness from `rng`.
    pub fn answer(&self, y: &Outcome, rng: &mut SeededRng) -> Option<Coins> {
        match &self.imp {
            Imp::Table { preimages, pick_least } => {
                let list = preimages.get(y)?;
                if *pick_least {
                    Some(list[0].clone())
                } else {
                    Some(list[rng.below(list.len() as u64) as usize].clone())
                }
            }
            Imp::Noisy { base, delta, domain } => {
                if rng.bernoulli(delta) {
                    Some(domain.sample(rng))
                } else {
                    base.answer(y, rng)
                }
            }
            Imp::Conditional { cand, by_prefix, retry_cap } => {
                let prefix = outcome_prefix(y)?;
                let rhos = by_prefix.get(&prefix)?;
                let ns = cand.ctx.spec.sim_space.components().len();
                let block_cards = &cand.func.domain.components()[ns..];
                for _ in 0..*retry_cap {
                    let mut coins = rhos[rng.below(rhos.len() as u64) as usize].0.clone();
                    coins.extend(block_cards.iter().map(|&card| rng.below(card)));
                    let coins = Coins(coins);
                    if &cand.func.eval(&coins) == y {
                        return Some(coins);
                    }
                }
                None
            }
            Imp::CoinCounting { cand, by_crs } => {
                let (crs, hits) = rv_target(cand, y)?;
                let entries = by_crs.get(&crs)?;
                let spec = &cand.spec;
                let v = spec.verifier_coin_len;
                let q = cand.q;
                let coin_card = 1u64 << v;
                let weights: Vec<BigUint> = entries
                    .iter()
                    .map(|(_, a)| {
                        BigUint::from(*a).pow(hits as u32)
                            * BigUint::from(coin_card - *a).pow((q - hits) as u32)
                    })
                    .collect();
                let total: BigUint = weights.iter().sum();
                if total.is_zero() {
                    return None;
                }
                let mut draw = rng.big_below(&total);
                let mut idx = 0;
                for (j, w) in weights.iter().enumerate() {
                    if &draw < w {
                        idx = j;
                        break;
                    }
                    draw -= w;
                }
                let (rho, _) = &entries[idx];
                let (crs2, proof) = (spec.simulator)(&cand.x, rho);
                debug_assert_eq!(crs2, crs);
                let accepting: Vec<u64> = (0..coin_card)
                    .filter(|&s| {
                        (spec.verifier)(&cand.x, &crs, &proof, &BitString::new(v, s).unwrap())
                    })
                    .collect();
                let rejecting: Vec<u64> =
                    (0..coin_card).filter(|s| !accepting.contains(s)).collect();
                // Uniform size-`hits` subset of the q block positions.
                let mut slots: Vec<usize> = (0..q as usize).collect();
                for j in 0..hits as usize {
                    let pick = j + rng.below(q - j as u64) as usize;
                    slots.swap(j, pick);
                }
                let hit_set: std::collections::BTreeSet<usize> =
                    slots[..hits as usize].iter().copied().collect();
                let mut coins = rho.0.clone();
                for j in 0..q as usize {
                    let pool = if hit_set.contains(&j) { &accepting } else { &rejecting };
                    coins.push(pool[rng.below(pool.len() as u64) as usize]);
                }
                Some(Coins(coins))
            }
        }
    }

    /// Exact answer distribution for a fixed query, where the oracle's
    /// support is small enough to write down.
    pub fn answer_dist(&self, y: &Outcome) -> Result<FiniteDistribution<Option<Coins>>> {
        match &self.imp {
            Imp::Table { preimages, pick_least } => match preimages.get(y) {
                None => Ok(FiniteDistribution::point(ANSWER_ENC, None)),
                Some(list) if *pick_least => {
                    Ok(FiniteDistribution::point(ANSWER_ENC, Some(list[0].clone())))
                }
                Some(list) => FiniteDistribution::uniform_over(
                    ANSWER_ENC,
                    list.iter().cloned().map(Some),
                ),
            },
            Imp::Noisy { base, delta, domain } => {
                let inner = base.answer_dist(y)?;
                let d = delta.rat().clone();
                let keep = Rat::one() - &d;
                let card = Rat::new(BigInt::one(), BigInt::from(domain.size()));
                let mut weights: Vec<(Option<Coins>, Rat)> = inner
                    .iter()
                    .map(|(t, m)| (t.clone(), m * &keep))
                    .collect();
                weights.extend(domain.enumerate()?.map(|c| (Some(c), &d * &card)));
                FiniteDistribution::from_weights(ANSWER_ENC, weights)
            }
            Imp::Conditional { .. } | Imp::CoinCounting { .. } => Err(Error::Unsupported(
                format!("{} oracle answers have unenumerable support", self.kind),
            )),
        }
    }
}

fn tabulate(func: &CandidateFunction) -> Result<BTreeMap<Outcome, Vec<Coins>>> {
    let mut preimages: BTreeMap<Outcome, Vec<Coins>> = BTreeMap::new();
    for coins in func.domain.enumerate()? {
        let y = func.eval(&coins);
        preimages.entry(y).or_default().push(coins);
    }
    // Enumeration order is mixed-radix order, so list heads are least.
    Ok(preimages)
}

/// Bit-string prefix of an outcome whose last symbol is the estimate.
fn outcome_prefix(y: &Outcome) -> Option<Vec<BitString>> {
    let (last, msgs) = y.0.split_last()?;
    if !matches!(last, Sym::Grid { .. }) {
        return None;
    }
    msgs.iter()
        .map(|s| match s {
            Sym::Bits(b) => Some(*b),
            Sym::Grid { .. } => None,
        })
        .collect()
}

/// Decode a randomized-verifier target `(crs, c/q)` into `(crs, c)` on the
/// candidate's own grid; `None` if the shape or grid does not match.
fn rv_target(cand: &RvCandidate, y: &Outcome) -> Option<(BitString, u64)> {
    if y.0.len() != 2 {
        return None;
    }
    let crs = match y.0[0] {
        Sym::Bits(b) if b.len() == cand.spec.crs_len => b,
        _ => None?,
    };
    let (num, den) = match y.0[1] {
        Sym::Grid { num, den } => (num, den),
        _ => None?,
    };
    if cand.q % den != 0 {
        return None;
    }
    Some((crs, num * (cand.q / den)))
}

// ---------------------------------------------------------------------------
// Deviation measurement
// ---------------------------------------------------------------------------

/// How a deviation figure was obtained.
#[derive(Clone, Debug)]
pub enum DeviationMethod {
    /// Exact total variation between the two joint laws.
    Exact,
    /// Empirical total variation between two sample sets, with a
    /// high-probability error radius.
    MonteCarlo { trials: u64, radius: f64 },
}

/// Quality report for an oracle on a candidate: how often it answers with
/// a true preimage, and how far the joint law `(answer, image)` is from
/// the ideal `(input, image)`.
#[derive(Clone, Debug)]
pub struct DeviationReport {
    pub success_rate: Probability,
    pub deviation: Probability,
    pub method: DeviationMethod,
}

/// Exact deviation: enumerates the domain, pushes forward to the two joint
/// laws, and takes total variation. Requires the oracle to support exact
/// answer distributions.
pub fn measure_deviation_exact(func: &CandidateFunction, inv: &Inverter) -> Result<DeviationReport> {
    let enc = format!("dev/{}", func.out_encoding);
    let uniform = func.domain.uniform("domain")?;
    let ideal: FiniteDistribution<(Option<Coins>, Outcome)> =
        uniform.push_forward(&enc, |r| (Some(r.clone()), func.eval(r)));
    let actual = uniform.push_forward_kernel(&enc, |r| {
        let y = func.eval(r);
        Ok(inv
            .answer_dist(&y)?
            .push_forward(&enc, move |ans| (ans.clone(), y.clone())))
    })?;
    let deviation = ideal.stat_distance(&actual)?;
    let success = actual.expectation(|(ans, y)| match ans {
        Some(r) if &func.eval(r) == y => Rat::one(),
        _ => Rat::zero(),
    });
    Ok(DeviationReport {
        success_rate: Probability::new(success)?,
        deviation,
        method: DeviationMethod::Exact,
    })
}

/// Sampled deviation: draws `trials` points from each joint law and takes
/// the total variation of the two empirical measures. The radius bounds the
/// estimation error at confidence about 97.5% via the support-size term
/// `sqrt(S/N)/2` plus a `sqrt(ln 40 / 2N)` fluctuation term, where `S` is
/// the union support observed.
pub fn measure_deviation_sampled(
    func: &CandidateFunction,
    inv: &Inverter,
    trials: u64,
    rng: &mut SeededRng,
) -> Result<DeviationReport> {
    let enc = format!("dev/{}", func.out_encoding);
    let mut ideal_counts: BTreeMap<(Option<Coins>, Outcome), u64> = BTreeMap::new();
    let mut actual_counts: BTreeMap<(Option<Coins>, Outcome), u64> = BTreeMap::new();
    let mut successes: u64 = 0;
    let mut inv_rng = rng.child("deviation.oracle");
    for _ in 0..trials {
        let r = func.domain.sample(rng);
        let y = func.eval(&r);
        *ideal_counts.entry((Some(r), y)).or_insert(0) += 1;

        let r2 = func.domain.sample(rng);
        let y2 = func.eval(&r2);
        let ans = inv.answer(&y2, &mut inv_rng);
        if matches!(&ans, Some(c) if func.eval(c) == y2) {
            successes += 1;
        }
        *actual_counts.entry((ans, y2)).or_insert(0) += 1;
    }
    let n = Rat::from_integer(BigInt::from(trials));
    let to_dist = |counts: BTreeMap<(Option<Coins>, Outcome), u64>| {
        FiniteDistribution::from_weights(
            &enc,
            counts
                .into_iter()
                .map(|(t, c)| (t, Rat::from_integer(BigInt::from(c)) / &n)),
        )
    };
    let ideal = to_dist(ideal_counts)?;
    let actual = to_dist(actual_counts)?;
    let support = ideal
        .support()
        .chain(actual.support())
        .collect::<std::collections::BTreeSet<_>>()
        .len() as f64;
    let nt = trials as f64;
    let radius = 0.5 * (support / nt).sqrt() + ((40f64).ln() / (2.0 * nt)).sqrt();
    Ok(DeviationReport {
        success_rate: Probability::new(Rat::new(BigInt::from(successes), BigInt::from(trials)))?,
        deviation: ideal.stat_distance(&actual)?,
        method: DeviationMethod::MonteCarlo { trials, radius },
    })
}

/// Guard used by table constructions before enumerating a domain.
pub fn check_enumerable(domain: &CoinSpace) -> Result<()> {
    let n = domain.size();
    if n > ENUM_BUDGET {
        return Err(Error::Budget { required: n, cap: ENUM_BUDGET });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::{
        cr_candidate, nizk_candidate, rv_candidate, CrContext, ReductionParams,
    };
    use crate::dist::SeededRng;
    use crate::zoo::{
        cycle4, cycle4_relabeled, dial_instances, make_dial_nizk, make_dial_nizk_noisy,
        make_graph_iso, DialProfile,
    };
    use num::One;

    fn prob(num: u64, den: u64) -> Probability {
        Probability::new(Rat::new(BigInt::from(num), BigInt::from(den))).unwrap()
    }

    fn dial_cand() -> crate::candidates::NizkCandidate {
        let p = DialProfile::new(prob(1, 16), prob(1, 8), prob(1, 4), 4, 2, 0xd1a1).unwrap();
        let spec = make_dial_nizk(&p, 4, 8).unwrap();
        let (yes, _, _) = dial_instances(4);
        nizk_candidate(&spec, &yes).unwrap()
    }

    #[test]
    fn distributional_oracles_have_zero_deviation_and_full_success() {
        let cand = dial_cand();
        let inv = Inverter::distributional(&cand.func).unwrap();
        let report = measure_deviation_exact(&cand.func, &inv).unwrap();
        assert!(report.deviation.rat().is_zero());
        assert!(report.success_rate.rat().is_one());
    }

    #[test]
    fn canonical_oracles_invert_but_skew_the_joint_law() {
        let cand = dial_cand();
        let inv = Inverter::canonical(&cand.func).unwrap();
        let report = measure_deviation_exact(&cand.func, &inv).unwrap();
        assert!(report.success_rate.rat().is_one());
        // Fibres with more than one preimage exist, so the least-preimage
        // rule must skew the joint law.
        assert!(!report.deviation.rat().is_zero());
    }

    #[test]
    fn noise_increases_deviation_monotonically() {
        let cand = dial_cand();
        let base = Arc::new(Inverter::distributional(&cand.func).unwrap());
        let mut last = Rat::zero();
        for (n, d) in [(0u64, 1u64), (1, 8), (1, 2), (7, 8)] {
            let noisy = Inverter::noisy(Arc::clone(&base), &cand.func.domain, prob(n, d));
            let report = measure_deviation_exact(&cand.func, &noisy).unwrap();
            assert!(report.deviation.rat() >= &last, "deviation dropped at delta {n}/{d}");
            last = report.deviation.rat().clone();
        }
    }

    #[test]
    fn sampled_deviation_of_a_perfect_oracle_stays_within_its_radius() {
        let cand = dial_cand();
        let inv = Inverter::distributional(&cand.func).unwrap();
        let mut rng = SeededRng::new(7);
        let report = measure_deviation_sampled(&cand.func, &inv, 4000, &mut rng).unwrap();
        let DeviationMethod::MonteCarlo { radius, .. } = report.method else {
            panic!("sampled measurement must report a radius");
        };
        assert!(report.deviation.to_f64() <= radius);
        assert!(report.success_rate.rat().is_one());
    }

    #[test]
    fn coin_counting_answers_are_uniform_over_the_true_preimages() {
        // Small enough to tabulate the whole randomized-verifier domain:
        // 2-bit CRS, 2 coin blocks of 2 bits.
        let p = DialProfile::new(prob(1, 4), prob(1, 4), prob(1, 2), 2, 1, 0x5eed).unwrap();
        let spec = make_dial_nizk_noisy(&p, 4, 8, 2, 1).unwrap();
        let (yes, _, _) = dial_instances(4);
        let cand = Arc::new(rv_candidate(&spec, &yes, 2).unwrap());
        let inv = Inverter::coin_counting(Arc::clone(&cand)).unwrap();

        // Pick a mid-grid target with a non-trivial preimage set.
        let mut rng = SeededRng::new(11);
        let target = cand
            .func
            .image_distribution()
            .unwrap()
            .support()
            .find(|o| matches!(o.0[1], Sym::Grid { num: 1, den: 2 }))
            .unwrap()
            .clone();
        let preimages: Vec<Coins> = cand
            .func
            .domain
            .enumerate()
            .unwrap()
            .filter(|c| cand.func.eval(c) == target)
            .collect();
        assert!(preimages.len() > 1);

        let trials = 6000usize;
        let mut counts: BTreeMap<Coins, u64> = BTreeMap::new();
        for _ in 0..trials {
            let ans = inv.answer(&target, &mut rng).expect("target is in the image");
            assert_eq!(cand.func.eval(&ans), target, "answers must be true preimages");
            *counts.entry(ans).or_insert(0) += 1;
        }
        // Empirical law vs the exact uniform law over the preimage set.
        let emp = FiniteDistribution::from_weights(
            "pre",
            counts
                .into_iter()
                .map(|(c, k)| (c, Rat::new(BigInt::from(k), BigInt::from(trials)))),
        )
        .unwrap();
        let uni = FiniteDistribution::uniform_over("pre", preimages).unwrap();
        let tv = emp.stat_distance(&uni).unwrap().to_f64();
        assert!(tv < 0.15, "empirical distance {tv} too large");
    }

    #[test]
    fn conditional_answers_are_true_preimages_and_misses_are_none() {
        let proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
        let params = ReductionParams::analysis_defaults(1, 4).unwrap();
        let ctx2 = CrContext::new(&proto.spec, &proto.instance, &params, 2, vec![]).unwrap();
        let inv2 = Arc::new(Inverter::canonical(&cr_candidate(ctx2).unwrap().func).unwrap());
        let ctx1 =
            CrContext::new(&proto.spec, &proto.instance, &params, 1, vec![inv2]).unwrap();
        let cand1 = Arc::new(cr_candidate(ctx1).unwrap());
        let inv1 = Inverter::conditional(Arc::clone(&cand1), 512).unwrap();

        let mut rng = SeededRng::new(3);
        for _ in 0..16 {
            let coins = cand1.func.domain.sample(&mut rng);
            let y = cand1.func.eval(&coins);
            let ans = inv1.answer(&y, &mut rng).expect("sampled images invert quickly here");
            assert_eq!(cand1.func.eval(&ans), y);
        }
        // A target whose estimate never occurs is answered with None.
        let coins = cand1.func.domain.sample(&mut rng);
        let mut off = cand1.func.eval(&coins);
        *off.0.last_mut().unwrap() = Sym::grid(1, 3).unwrap();
        assert!(inv1.answer(&off, &mut rng).is_none());
    }
}
