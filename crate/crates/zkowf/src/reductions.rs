//! The reductions that turn a preimage oracle into a convincing prover or
//! a language decider.
//!
//! * [`nizk_reduce`] — sample a uniform reference string `r`, ask the
//!   oracle for a preimage of `(r, 1)`, and accept iff the answer really
//!   maps to `(r, 1)`.
//! * [`PcTilde`] / [`pc_reduce`] — the stand-in prover for a public-coin
//!   protocol: in round `i` it asks the oracle for coins whose simulated
//!   transcript extends the current prefix with an accepting flag, and
//!   replays the simulated round-`i` message.
//! * [`cr_b`] / [`cr_reduce`] / [`b_value_sampled`] — the recursive
//!   estimate-search machinery for constant-round protocols: each level
//!   sweeps its estimate grid from the top, asks the oracle to invert
//!   `(prefix, a)`, re-estimates the success rate of the next level with
//!   fresh samples, and keeps the first answer whose re-estimate lands
//!   within `tau` of the target.
//! * [`rv_b`] / [`rv_reduce`] — the same sweep for a non-interactive system
//!   with a randomized verifier, where the estimate averages the verifier's
//!   private coin.
//! * [`one_sided_decider`] — wraps any of the reductions into a decider
//!   with one-sided error: a self-test round first checks that the oracle
//!   inverts a random image, and any failure is reported as "accept".

use std::sync::Arc;

use crate::candidates::{
    cr_candidate, extend_with_inverter, prefix_outcome, CandidateFunction, CrContext,
    NizkCandidate, PcCandidate, ReductionParams, RvCandidate,
};
use crate::dist::{
    BitString, CoinSpace, Coins, Estimate, FiniteDistribution, Probability, Rat, SeededRng, Sym,
};
use crate::protocol::{run_protocol, ProverStrategy, PublicCoinSpec, Transcript};
use crate::{Error, Result};
use num::{BigInt, One, Signed, Zero};

// ---------------------------------------------------------------------------
// Non-interactive reduction
// ---------------------------------------------------------------------------

/// One randomized run of the non-interactive reduction.
pub fn nizk_reduce(cand: &NizkCandidate, inv: &crate::inverters::Inverter, rng: &mut SeededRng) -> bool {
    let r = rng.bits(cand.spec.crs_len);
    let target = crate::dist::Outcome::new(vec![Sym::Bits(r), Sym::bit(true)]);
    match inv.answer(&target, rng) {
        Some(rho) => cand.func.eval(&rho) == target,
        None => false,
    }
}

/// Exact acceptance probability of the non-interactive reduction.
pub fn nizk_accept_exact(
    cand: &NizkCandidate,
    inv: &crate::inverters::Inverter,
) -> Result<Probability> {
    let crs_space = CoinSpace::bits(cand.spec.crs_len);
    let dist = crs_space.uniform("crs")?.push_forward_kernel("nizk.reduce", |c| {
        let r = c.bit_component(0, cand.spec.crs_len);
        let target = crate::dist::Outcome::new(vec![Sym::Bits(r), Sym::bit(true)]);
        Ok(inv.answer_dist(&target)?.push_forward("nizk.reduce", move |ans| match ans {
            Some(rho) => cand.func.eval(rho) == target,
            None => false,
        }))
    })?;
    Probability::new(dist.expectation(|a| if *a { Rat::one() } else { Rat::zero() }))
}

// ---------------------------------------------------------------------------
// Public-coin reduction
// ---------------------------------------------------------------------------

/// The oracle-driven prover for public-coin protocols. Counts the rounds in
/// which the oracle returned nothing and a zero-coins simulation was used
/// instead.
pub struct PcTilde<'a> {
    pub cand: &'a PcCandidate,
    pub inv: &'a crate::inverters::Inverter,
    pub fallbacks: u64,
}

impl<'a> PcTilde<'a> {
    pub fn new(cand: &'a PcCandidate, inv: &'a crate::inverters::Inverter) -> Self {
        PcTilde { cand, inv, fallbacks: 0 }
    }
}

impl ProverStrategy for PcTilde<'_> {
    fn next_message(
        &mut self,
        x: &BitString,
        prefix: &Transcript,
        round: usize,
        rng: &mut SeededRng,
    ) -> Result<BitString> {
        let spec = &self.cand.spec;
        let target = prefix_outcome(prefix.msgs(), Sym::bit(true));
        let rho = match self.inv.answer(&target, rng) {
            Some(coins) => Coins(coins.0[1..].to_vec()),
            None => {
                self.fallbacks += 1;
                Coins(vec![0; spec.sim_space.components().len()])
            }
        };
        Ok(*(spec.simulator)(x, &rho).msg(2 * round + 1))
    }
}

/// One randomized run of the public-coin reduction: the verifier's verdict
/// against the oracle-driven prover.
pub fn pc_reduce(
    cand: &PcCandidate,
    inv: &crate::inverters::Inverter,
    rng: &mut SeededRng,
) -> Result<bool> {
    let mut tilde = PcTilde::new(cand, inv);
    let (_, accepted) = run_protocol(&cand.spec, &cand.x, &mut tilde, rng)?;
    Ok(accepted)
}

/// Exact acceptance probability of the public-coin reduction.
pub fn pc_accept_exact(cand: &PcCandidate, inv: &crate::inverters::Inverter) -> Result<Probability> {
    let k = cand.spec.rounds;
    let start = FiniteDistribution::point("pc.partial", Transcript::new());
    let full = extend_with_inverter(cand, inv, start, 2 * k)?;
    Probability::new(full.expectation(|t| {
        if cand.spec.verify(&cand.x, t) {
            Rat::one()
        } else {
            Rat::zero()
        }
    }))
}

// ---------------------------------------------------------------------------
// Constant-round estimate search
// ---------------------------------------------------------------------------

/// One probe of the estimate sweep.
#[derive(Clone, Debug)]
pub struct SearchRecord {
    /// Target numerator on the level's search grid.
    pub a: u64,
    /// Search-grid denominator.
    pub grid: u64,
    /// Whether the oracle answered with a true preimage of `(prefix, a)`.
    pub inverted: bool,
    /// The fresh re-estimate, when one was computed.
    pub est: Option<Rat>,
    /// Whether the re-estimate landed within `tau` of the target.
    pub accepted: bool,
}

/// The full sweep at one level: grid values probed in strictly decreasing
/// order; at most the final record is accepted.
#[derive(Clone, Debug, Default)]
pub struct EstimateSearchTrace {
    pub records: Vec<SearchRecord>,
}

impl EstimateSearchTrace {
    /// Structural sanity of a sweep: strictly decreasing targets, at most
    /// one acceptance, and only in last position.
    pub fn well_formed(&self) -> bool {
        self.records.windows(2).all(|w| w[0].a > w[1].a)
            && self
                .records
                .iter()
                .enumerate()
                .all(|(j, r)| !r.accepted || j + 1 == self.records.len())
    }
}

/// The value/message pair a level of the recursive search returns.
#[derive(Clone, Debug)]
pub struct CrOutput {
    /// First output: the accepted grid value, or 0 on exhaustion.
    pub value: Rat,
    /// Second output: the round's prover message, when one was found.
    pub pi: Option<BitString>,
    pub trace: EstimateSearchTrace,
}

/// The level-`i` search: given a transcript prefix ending in the round-`i`
/// coin, find a prover message whose freshly re-estimated continuation
/// value matches an inverted target. The last level degenerates to a single
/// inversion of the accepting image.
pub fn cr_b(
    ctx: &CrContext,
    a_i: &Arc<crate::inverters::Inverter>,
    prefix: &Transcript,
    rng: &mut SeededRng,
) -> Result<CrOutput> {
    let spec = &ctx.spec;
    let k = spec.rounds;
    let i = ctx.level;
    if prefix.len() != 2 * i - 1 {
        return Err(Error::Contract(format!(
            "level {i} expects a {}-message prefix, got {}",
            2 * i - 1,
            prefix.len()
        )));
    }
    let cand = cr_candidate(ctx.clone())?;

    if i == k {
        let target = prefix_outcome(prefix.msgs(), Sym::bit(true));
        let record = |inverted: bool| EstimateSearchTrace {
            records: vec![SearchRecord { a: 1, grid: 1, inverted, est: None, accepted: inverted }],
        };
        if let Some(rho) = a_i.answer(&target, rng) {
            if cand.func.eval(&rho) == target {
                let pi = *(spec.simulator)(&ctx.x, &rho).msg(2 * k - 1);
                return Ok(CrOutput { value: Rat::one(), pi: Some(pi), trace: record(true) });
            }
        }
        return Ok(CrOutput { value: Rat::zero(), pi: None, trace: record(false) });
    }

    let grid = ctx.search_grid()?;
    let tau = ctx.params.tau.rat();
    let q = ctx.params.q;
    let next_coin_len = spec.coin_lens[i];
    let (child_inv, child_ctx) = ctx.child()?;
    let mut trace = EstimateSearchTrace::default();
    for a in (1..=grid).rev() {
        let target = prefix_outcome(prefix.msgs(), Sym::grid(a, grid)?);
        let goal = Rat::new(BigInt::from(a), BigInt::from(grid));
        let ans = a_i.answer(&target, rng);
        let inverted = matches!(&ans, Some(c) if cand.func.eval(c) == target);
        if !inverted {
            trace.records.push(SearchRecord { a, grid, inverted: false, est: None, accepted: false });
            continue;
        }
        let coins = ans.unwrap();
        let ns = spec.sim_space.components().len();
        let rho = Coins(coins.0[..ns].to_vec());
        let pi = *(spec.simulator)(&ctx.x, &rho).msg(2 * i - 1);
        // Fresh re-estimate of the continuation value behind pi.
        let mut ext = prefix.clone();
        ext.push(pi);
        let mut sum = Rat::zero();
        for _ in 0..q {
            let mut next = ext.clone();
            next.push(rng.bits(next_coin_len));
            sum += cr_b(&child_ctx, &child_inv, &next, rng)?.value;
        }
        let est = sum / Rat::from_integer(BigInt::from(q));
        let accepted = (&est - &goal).abs() < *tau;
        trace.records.push(SearchRecord { a, grid, inverted: true, est: Some(est), accepted });
        if accepted {
            return Ok(CrOutput { value: goal, pi: Some(pi), trace });
        }
    }
    Ok(CrOutput { value: Rat::zero(), pi: None, trace })
}

/// The oracle-driven prover for the recursive search: round `i` replays the
/// message found by the level-`i` sweep, or an all-zero message when the
/// sweep exhausts its grid.
pub struct CrTilde<'a> {
    pub spec: &'a Arc<PublicCoinSpec>,
    pub params: &'a ReductionParams,
    /// Oracles for levels `1, .., k`.
    pub inverters: &'a [Arc<crate::inverters::Inverter>],
    pub fallbacks: u64,
}

impl ProverStrategy for CrTilde<'_> {
    fn next_message(
        &mut self,
        x: &BitString,
        prefix: &Transcript,
        round: usize,
        rng: &mut SeededRng,
    ) -> Result<BitString> {
        let i = round + 1;
        let ctx =
            CrContext::new(self.spec, x, self.params, i, self.inverters[i..].to_vec())?;
        let out = cr_b(&ctx, &self.inverters[i - 1], prefix, rng)?;
        Ok(out.pi.unwrap_or_else(|| {
            self.fallbacks += 1;
            BitString::new(self.spec.proof_lens[round], 0).unwrap()
        }))
    }
}

/// One randomized run of the constant-round reduction: the verifier's
/// verdict against the recursive-search prover.
pub fn cr_reduce(
    spec: &Arc<PublicCoinSpec>,
    x: &BitString,
    params: &ReductionParams,
    inverters: &[Arc<crate::inverters::Inverter>],
    rng: &mut SeededRng,
) -> Result<bool> {
    if inverters.len() != spec.rounds {
        return Err(Error::Contract(format!(
            "{} oracles supplied for {} rounds",
            inverters.len(),
            spec.rounds
        )));
    }
    let mut tilde = CrTilde { spec, params, inverters, fallbacks: 0 };
    let (_, accepted) = run_protocol(spec, x, &mut tilde, rng)?;
    Ok(accepted)
}

/// Monte-Carlo estimate of the top-level search value
/// `E over the first coin of the level-1 sweep's first output`.
pub fn b_value_sampled(
    spec: &Arc<PublicCoinSpec>,
    x: &BitString,
    params: &ReductionParams,
    inverters: &[Arc<crate::inverters::Inverter>],
    trials: u64,
    rng: &mut SeededRng,
) -> Result<Estimate> {
    if inverters.len() != spec.rounds {
        return Err(Error::Contract(format!(
            "{} oracles supplied for {} rounds",
            inverters.len(),
            spec.rounds
        )));
    }
    let ctx = CrContext::new(spec, x, params, 1, inverters[1..].to_vec())?;
    let mut sum = Rat::zero();
    for _ in 0..trials {
        let mut prefix = Transcript::new();
        prefix.push(rng.bits(spec.coin_lens[0]));
        sum += cr_b(&ctx, &inverters[0], &prefix, rng)?.value;
    }
    Estimate::new(sum / Rat::from_integer(BigInt::from(trials)), trials)
}

// ---------------------------------------------------------------------------
// Randomized-verifier reduction
// ---------------------------------------------------------------------------

/// The estimate sweep for a non-interactive system with a randomized
/// verifier: probe targets `q/q, .., 1/q`, and accept an inverted proof
/// whose freshly re-estimated acceptance rate lands within `tau`.
pub fn rv_b(
    cand: &RvCandidate,
    inv: &crate::inverters::Inverter,
    r: &BitString,
    tau: &Probability,
    rng: &mut SeededRng,
) -> Result<(Option<BitString>, EstimateSearchTrace)> {
    let spec = &cand.spec;
    let q = cand.q;
    let v = spec.verifier_coin_len;
    let ns = spec.sim_space.components().len();
    let mut trace = EstimateSearchTrace::default();
    for a in (1..=q).rev() {
        let target = crate::dist::Outcome::new(vec![Sym::Bits(*r), Sym::grid(a, q)?]);
        let goal = Rat::new(BigInt::from(a), BigInt::from(q));
        let ans = inv.answer(&target, rng);
        let inverted = matches!(&ans, Some(c) if cand.func.eval(c) == target);
        if !inverted {
            trace.records.push(SearchRecord { a, grid: q, inverted: false, est: None, accepted: false });
            continue;
        }
        let rho = Coins(ans.unwrap().0[..ns].to_vec());
        let (crs, proof) = (spec.simulator)(&cand.x, &rho);
        debug_assert_eq!(crs, *r);
        let hits = (0..q)
            .filter(|_| (spec.verifier)(&cand.x, &crs, &proof, &rng.bits(v)))
            .count();
        let est = Rat::new(BigInt::from(hits), BigInt::from(q));
        let accepted = (&est - &goal).abs() < *tau.rat();
        trace.records.push(SearchRecord { a, grid: q, inverted: true, est: Some(est), accepted });
        if accepted {
            return Ok((Some(proof), trace));
        }
    }
    Ok((None, trace))
}

/// One randomized run of the randomized-verifier reduction: sample a
/// reference string, search for a proof, and let the verifier judge it on a
/// fresh private coin; an exhausted search rejects.
pub fn rv_reduce(
    cand: &RvCandidate,
    inv: &crate::inverters::Inverter,
    tau: &Probability,
    rng: &mut SeededRng,
) -> Result<bool> {
    let spec = &cand.spec;
    let r = rng.bits(spec.crs_len);
    let (proof, _) = rv_b(cand, inv, &r, tau, rng)?;
    match proof {
        Some(p) => Ok((spec.verifier)(&cand.x, &r, &p, &rng.bits(spec.verifier_coin_len))),
        None => Ok(false),
    }
}

// ---------------------------------------------------------------------------
// One-sided deciders
// ---------------------------------------------------------------------------

/// Wrap a reduction into a one-sided decider. For each `(candidate,
/// oracle)` pair, evaluate the candidate on fresh uniform coins and ask the
/// oracle to invert the image; if any answer fails to reproduce the image,
/// output `true` immediately. Otherwise output the reduction's verdict.
///
/// With perfect oracles the self-test always passes, so a no-instance is
/// accepted with at most the reduction's no-side probability; on broken
/// oracles the decider defaults to accepting.
pub fn one_sided_decider(
    checks: &[(&CandidateFunction, &Arc<crate::inverters::Inverter>)],
    mut reduce: impl FnMut(&mut SeededRng) -> Result<bool>,
    rng: &mut SeededRng,
) -> Result<bool> {
    for (func, inv) in checks {
        let r = func.domain.sample(rng);
        let y = func.eval(&r);
        let ok = matches!(inv.answer(&y, rng), Some(c) if func.eval(&c) == y);
        if !ok {
            return Ok(true);
        }
    }
    reduce(rng)
}
