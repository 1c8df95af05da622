//! Proof systems as explicit finite objects.
//!
//! Two shapes are supported:
//!
//! * [`NizkSpec`] — a non-interactive argument in the common-reference-string
//!   model: a uniform CRS `r`, a single proof `pi`, a verifier that is
//!   deterministic (or consumes a short private coin), and a simulator that
//!   maps its own coins to a `(r, pi)` pair.
//! * [`PublicCoinSpec`] — a `k`-round public-coin interactive proof whose
//!   messages alternate verifier coins `r_i` and prover messages `pi_i`.
//!   Protocols where the prover speaks first are modelled with an empty
//!   zeroth coin, so a transcript always has `2k` slots.
//!
//! All three error parameters are *measured*, never trusted: completeness by
//! exact enumeration of honest coins, soundness by an exhaustive
//! best-prover search, and zero-knowledge as the exact total-variation
//! distance between the simulated and honest view distributions.

use std::sync::Arc;

use crate::dist::{
    BitString, CoinSpace, Coins, FiniteDistribution, Probability, Rat, SeededRng,
};
use crate::{Error, Result, ENUM_BUDGET};
use num::{BigInt, One, Zero};

/// Widest prover message the exhaustive best-prover search will enumerate.
pub const MAX_SEARCH_PROOF_BITS: u32 = 16;

/// The measured `(completeness error, soundness error, zero-knowledge
/// error)` triple of a proof system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ErrorProfile {
    /// `1 - Pr[honest run accepts]` on the designated yes-instance.
    pub completeness: Probability,
    /// Best cheating-prover acceptance probability on the designated
    /// no-instance.
    pub soundness: Probability,
    /// Total-variation distance between simulated and honest views on the
    /// yes-instance.
    pub zk: Probability,
}

// ---------------------------------------------------------------------------
// Non-interactive specs
// ---------------------------------------------------------------------------

type MembershipFn = dyn Fn(&BitString) -> bool + Send + Sync;
type RelationFn = dyn Fn(&BitString, &BitString) -> bool + Send + Sync;
type NizkProverFn = dyn Fn(&BitString, &BitString, &BitString) -> BitString + Send + Sync;
type NizkVerifierFn = dyn Fn(&BitString, &BitString, &BitString, &BitString) -> bool + Send + Sync;
type NizkSimulatorFn = dyn Fn(&BitString, &Coins) -> (BitString, BitString) + Send + Sync;

/// A non-interactive proof system with a uniform common reference string.
pub struct NizkSpec {
    /// Instance length in bits.
    pub instance_len: u32,
    /// CRS length `m`; the CRS is uniform over `{0,1}^m`.
    pub crs_len: u32,
    /// Proof length in bits.
    pub proof_len: u32,
    /// Length of the verifier's private coin; `0` means the verifier is
    /// deterministic.
    pub verifier_coin_len: u32,
    /// Simulator coin space (not necessarily a power of two).
    pub sim_space: CoinSpace,
    /// Language membership predicate (ground truth, used to pick arms).
    pub membership: Arc<MembershipFn>,
    /// Witness relation.
    pub relation: Arc<RelationFn>,
    /// Honest prover: `(x, w, crs) -> proof`.
    pub prover: Arc<NizkProverFn>,
    /// Verifier: `(x, crs, proof, coin) -> accept` where `coin` is the
    /// empty string when `verifier_coin_len == 0`.
    pub verifier: Arc<NizkVerifierFn>,
    /// Simulator: coins to a `(crs, proof)` pair.
    pub simulator: Arc<NizkSimulatorFn>,
}

impl NizkSpec {
    /// The verifier's verdict, averaged exactly over its private coin.
    pub fn verify_prob(&self, x: &BitString, crs: &BitString, proof: &BitString) -> Rat {
        if self.verifier_coin_len == 0 {
            let a = (self.verifier)(x, crs, proof, &BitString::empty());
            return if a { Rat::one() } else { Rat::zero() };
        }
        let total = 1u64 << self.verifier_coin_len;
        let hits = (0..total)
            .filter(|&v| {
                (self.verifier)(x, crs, proof, &BitString::new(self.verifier_coin_len, v).unwrap())
            })
            .count();
        Rat::new(BigInt::from(hits), BigInt::from(total))
    }

    fn crs_space(&self) -> CoinSpace {
        CoinSpace::bits(self.crs_len)
    }

    /// Encoding label for `(crs, proof)` view outcomes.
    pub fn view_encoding(&self) -> String {
        format!("nizk.view/m{}/p{}", self.crs_len, self.proof_len)
    }
}

/// One honest execution of a NIZK.
pub struct NizkRun {
    pub crs: BitString,
    pub proof: BitString,
    pub verifier_coin: BitString,
    pub accepted: bool,
}

/// Sample a CRS, run the honest prover and the verifier once.
pub fn run_nizk(spec: &NizkSpec, x: &BitString, w: &BitString, rng: &mut SeededRng) -> Result<NizkRun> {
    if !(spec.relation)(x, w) {
        return Err(Error::Contract("witness does not satisfy the relation".into()));
    }
    let crs = rng.bits(spec.crs_len);
    let proof = (spec.prover)(x, w, &crs);
    let verifier_coin = rng.bits(spec.verifier_coin_len);
    let accepted = (spec.verifier)(x, &crs, &proof, &verifier_coin);
    Ok(NizkRun { crs, proof, verifier_coin, accepted })
}

/// Exact distribution of the honest view `(crs, proof)` on a yes-instance.
pub fn nizk_view_distribution(
    spec: &NizkSpec,
    x: &BitString,
    w: &BitString,
) -> Result<FiniteDistribution<(BitString, BitString)>> {
    if !(spec.relation)(x, w) {
        return Err(Error::Contract("witness does not satisfy the relation".into()));
    }
    let space = spec.crs_space();
    let mass = Rat::new(BigInt::one(), BigInt::from(space.size()));
    let dist = FiniteDistribution::from_weights(
        &spec.view_encoding(),
        space.enumerate()?.map(|c| {
            let crs = c.bit_component(0, spec.crs_len);
            ((crs, (spec.prover)(x, w, &crs)), mass.clone())
        }),
    );
    dist
}

/// Exact distribution of the simulated view `(crs, proof)`.
pub fn nizk_sim_distribution(
    spec: &NizkSpec,
    x: &BitString,
) -> Result<FiniteDistribution<(BitString, BitString)>> {
    let mass = Rat::new(BigInt::one(), BigInt::from(spec.sim_space.size()));
    FiniteDistribution::from_weights(
        &spec.view_encoding(),
        spec.sim_space.enumerate()?.map(|rho| ((spec.simulator)(x, &rho), mass.clone())),
    )
}

/// Exact honest acceptance probability on `(x, w)`.
pub fn nizk_completeness(spec: &NizkSpec, x: &BitString, w: &BitString) -> Result<Probability> {
    let view = nizk_view_distribution(spec, x, w)?;
    Probability::new(view.expectation(|(crs, proof)| spec.verify_prob(x, crs, proof)))
}

/// Exhaustive best-prover acceptance probability on a no-instance: the CRS
/// is averaged, the proof is maximised per CRS.
pub fn nizk_best_prover_value(spec: &NizkSpec, x: &BitString) -> Result<Probability> {
    if spec.proof_len > MAX_SEARCH_PROOF_BITS {
        return Err(Error::Budget {
            required: 1u128 << spec.proof_len,
            cap: 1u128 << MAX_SEARCH_PROOF_BITS,
        });
    }
    let m = 1u64 << spec.crs_len;
    let mut total = Rat::zero();
    for r in 0..m {
        let crs = BitString::new(spec.crs_len, r).unwrap();
        let mut best = Rat::zero();
        for p in 0..1u64 << spec.proof_len {
            let proof = BitString::new(spec.proof_len, p).unwrap();
            let v = spec.verify_prob(x, &crs, &proof);
            if v > best {
                best = v;
            }
            if best.is_one() {
                break;
            }
        }
        total += best;
    }
    Probability::new(total / Rat::from_integer(BigInt::from(m)))
}

/// Measure the full error profile of a NIZK on a designated
/// yes-instance/witness pair and no-instance.
pub fn measure_error_profile_nizk(
    spec: &NizkSpec,
    x_yes: &BitString,
    w: &BitString,
    x_no: &BitString,
) -> Result<ErrorProfile> {
    if (spec.membership)(x_no) {
        return Err(Error::Contract("designated no-instance is in the language".into()));
    }
    let completeness =
        Probability::new(Rat::one() - nizk_completeness(spec, x_yes, w)?.into_rat())?;
    let soundness = nizk_best_prover_value(spec, x_no)?;
    let zk = nizk_sim_distribution(spec, x_yes)?
        .stat_distance(&nizk_view_distribution(spec, x_yes, w)?)?;
    Ok(ErrorProfile { completeness, soundness, zk })
}

// ---------------------------------------------------------------------------
// Public-coin interactive specs
// ---------------------------------------------------------------------------

/// An alternating transcript `r_1, pi_1, .., r_k, pi_k` (a prefix thereof).
///
/// Message `2i` (0-based) is the round-`(i+1)` verifier coin and message
/// `2i + 1` the round-`(i+1)` prover message. Prover-first protocols carry
/// an empty `r_1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Transcript {
    msgs: Vec<BitString>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn from_msgs(msgs: Vec<BitString>) -> Self {
        Transcript { msgs }
    }

    pub fn len(&self) -> usize {
        self.msgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.msgs.is_empty()
    }

    pub fn msg(&self, i: usize) -> &BitString {
        &self.msgs[i]
    }

    pub fn msgs(&self) -> &[BitString] {
        &self.msgs
    }

    pub fn push(&mut self, m: BitString) {
        self.msgs.push(m);
    }

    /// The first `j` messages.
    pub fn prefix(&self, j: usize) -> Transcript {
        Transcript { msgs: self.msgs[..j].to_vec() }
    }
}

type PcProverFn =
    dyn Fn(&BitString, &BitString, &Transcript, &Coins, usize) -> BitString + Send + Sync;
type PcVerifierFn = dyn Fn(&BitString, &Transcript) -> bool + Send + Sync;
type PcSimulatorFn = dyn Fn(&BitString, &Coins) -> Transcript + Send + Sync;

/// A `k`-round public-coin proof system with a deterministic verifier.
pub struct PublicCoinSpec {
    /// Instance length in bits.
    pub instance_len: u32,
    /// Number of rounds `k` (coin/message pairs).
    pub rounds: usize,
    /// Number of non-trivial messages: `2k`, or `2k - 1` when the prover
    /// speaks first (`coin_lens[0] == 0`).
    pub messages: usize,
    /// Verifier coin lengths per round.
    pub coin_lens: Vec<u32>,
    /// Prover message lengths per round.
    pub proof_lens: Vec<u32>,
    /// Simulator coin space.
    pub sim_space: CoinSpace,
    /// Honest-prover coin space, sampled once before round 1 and visible to
    /// the prover in every round.
    pub prover_space: CoinSpace,
    pub membership: Arc<MembershipFn>,
    pub relation: Arc<RelationFn>,
    /// Honest prover: `(x, w, prefix, coins, round)` to the round's message;
    /// `prefix` holds the first `2 * round` messages (rounds count from 0).
    pub prover: Arc<PcProverFn>,
    /// Deterministic verifier over a full transcript.
    pub verifier: Arc<PcVerifierFn>,
    /// Simulator: coins to a full transcript.
    pub simulator: Arc<PcSimulatorFn>,
}

impl PublicCoinSpec {
    /// Internal consistency of the declared schedule.
    pub fn validate(&self) -> Result<()> {
        let k = self.rounds;
        if self.coin_lens.len() != k || self.proof_lens.len() != k {
            return Err(Error::Schedule("coin/proof length vectors must have k entries".into()));
        }
        let prover_first = self.coin_lens[0] == 0;
        let expect = if prover_first { 2 * k - 1 } else { 2 * k };
        if self.messages != expect {
            return Err(Error::Schedule(format!(
                "declared {} messages, schedule implies {expect}",
                self.messages
            )));
        }
        if self.coin_lens.iter().skip(1).any(|&l| l == 0) {
            return Err(Error::Schedule("only the first verifier coin may be empty".into()));
        }
        Ok(())
    }

    /// Check that a transcript prefix conforms to the schedule.
    pub fn check_prefix(&self, t: &Transcript) -> Result<()> {
        if t.len() > 2 * self.rounds {
            return Err(Error::Schedule(format!("{} messages exceed 2k", t.len())));
        }
        for (j, m) in t.msgs().iter().enumerate() {
            let want = if j % 2 == 0 { self.coin_lens[j / 2] } else { self.proof_lens[j / 2] };
            if m.len() != want {
                return Err(Error::Schedule(format!(
                    "message {j} has {} bits, schedule says {want}",
                    m.len()
                )));
            }
        }
        Ok(())
    }

    /// Coin space of the verifier's round coins.
    pub fn coin_space(&self) -> CoinSpace {
        CoinSpace::new(self.coin_lens.iter().map(|&l| 1u64 << l).collect()).unwrap()
    }

    /// Encoding label for full-transcript distributions.
    pub fn view_encoding(&self) -> String {
        format!("pc.view/k{}/c{:?}/p{:?}", self.rounds, self.coin_lens, self.proof_lens)
    }

    pub fn verify(&self, x: &BitString, t: &Transcript) -> bool {
        (self.verifier)(x, t)
    }
}

/// The simulated transcript truncated to its first `j` messages
/// (the simulator's projection to an individual message is `j = i` minus
/// its predecessor).
pub fn sim_project(spec: &PublicCoinSpec, x: &BitString, rho: &Coins, j: usize) -> Transcript {
    (spec.simulator)(x, rho).prefix(j)
}

/// An interactive prover: asked for the round-`i` message given the current
/// prefix (which ends with the round-`i` coin).
pub trait ProverStrategy {
    fn next_message(
        &mut self,
        x: &BitString,
        prefix: &Transcript,
        round: usize,
        rng: &mut SeededRng,
    ) -> Result<BitString>;
}

/// Run a public-coin protocol against an arbitrary prover strategy.
pub fn run_protocol(
    spec: &PublicCoinSpec,
    x: &BitString,
    strategy: &mut dyn ProverStrategy,
    rng: &mut SeededRng,
) -> Result<(Transcript, bool)> {
    let mut t = Transcript::new();
    for round in 0..spec.rounds {
        t.push(rng.bits(spec.coin_lens[round]));
        let msg = strategy.next_message(x, &t, round, rng)?;
        if msg.len() != spec.proof_lens[round] {
            return Err(Error::Schedule(format!(
                "strategy sent {} bits in round {round}, schedule says {}",
                msg.len(),
                spec.proof_lens[round]
            )));
        }
        t.push(msg);
    }
    let accept = spec.verify(x, &t);
    Ok((t, accept))
}

/// Run the honest prover (sampling its declared coin space).
pub fn run_protocol_honest(
    spec: &PublicCoinSpec,
    x: &BitString,
    w: &BitString,
    rng: &mut SeededRng,
) -> Result<(Transcript, bool)> {
    if !(spec.relation)(x, w) {
        return Err(Error::Contract("witness does not satisfy the relation".into()));
    }
    let coins = spec.prover_space.sample(rng);
    let mut t = Transcript::new();
    for round in 0..spec.rounds {
        t.push(rng.bits(spec.coin_lens[round]));
        let msg = (spec.prover)(x, w, &t, &coins, round);
        t.push(msg);
    }
    let accept = spec.verify(x, &t);
    Ok((t, accept))
}

/// Exact honest-view transcript distribution on `(x, w)`.
pub fn pc_view_distribution(
    spec: &PublicCoinSpec,
    x: &BitString,
    w: &BitString,
) -> Result<FiniteDistribution<Transcript>> {
    if !(spec.relation)(x, w) {
        return Err(Error::Contract("witness does not satisfy the relation".into()));
    }
    let coins = spec.coin_space();
    let joint = spec.prover_space.concat(&coins);
    let n = joint.size();
    if n > ENUM_BUDGET {
        return Err(Error::Budget { required: n, cap: ENUM_BUDGET });
    }
    let mass = Rat::new(BigInt::one(), BigInt::from(n));
    let pk = spec.prover_space.components().len();
    let dist = FiniteDistribution::from_weights(
        &spec.view_encoding(),
        joint.enumerate()?.map(|c| {
            let pcoins = Coins(c.0[..pk].to_vec());
            let mut t = Transcript::new();
            for round in 0..spec.rounds {
                t.push(BitString::new(spec.coin_lens[round], c.0[pk + round]).unwrap());
                t.push((spec.prover)(x, w, &t, &pcoins, round));
            }
            (t, mass.clone())
        }),
    );
    dist
}

/// Exact simulated transcript distribution.
pub fn pc_sim_distribution(
    spec: &PublicCoinSpec,
    x: &BitString,
) -> Result<FiniteDistribution<Transcript>> {
    let mass = Rat::new(BigInt::one(), BigInt::from(spec.sim_space.size()));
    FiniteDistribution::from_weights(
        &spec.view_encoding(),
        spec.sim_space.enumerate()?.map(|rho| ((spec.simulator)(x, &rho), mass.clone())),
    )
}

/// Exact honest acceptance probability.
pub fn pc_completeness(spec: &PublicCoinSpec, x: &BitString, w: &BitString) -> Result<Probability> {
    let view = pc_view_distribution(spec, x, w)?;
    Probability::new(view.expectation(|t| {
        if spec.verify(x, t) {
            Rat::one()
        } else {
            Rat::zero()
        }
    }))
}

/// Exhaustive best-prover value of the public-coin game on `x`: coins are
/// averaged, prover messages are maximised, round by round.
pub fn pc_best_prover_value(spec: &PublicCoinSpec, x: &BitString) -> Result<Probability> {
    if let Some(&l) = spec.proof_lens.iter().find(|&&l| l > MAX_SEARCH_PROOF_BITS) {
        return Err(Error::Budget { required: 1u128 << l, cap: 1u128 << MAX_SEARCH_PROOF_BITS });
    }
    let tree: u128 = spec
        .coin_lens
        .iter()
        .zip(&spec.proof_lens)
        .map(|(&c, &p)| (1u128 << c) * (1u128 << p))
        .product();
    if tree > ENUM_BUDGET {
        return Err(Error::Budget { required: tree, cap: ENUM_BUDGET });
    }

    fn go(spec: &PublicCoinSpec, x: &BitString, t: &mut Transcript, round: usize) -> Rat {
        if round == spec.rounds {
            return if spec.verify(x, t) { Rat::one() } else { Rat::zero() };
        }
        let coins = 1u64 << spec.coin_lens[round];
        let mut sum = Rat::zero();
        for r in 0..coins {
            t.push(BitString::new(spec.coin_lens[round], r).unwrap());
            let mut best = Rat::zero();
            for p in 0..1u64 << spec.proof_lens[round] {
                t.push(BitString::new(spec.proof_lens[round], p).unwrap());
                let v = go(spec, x, t, round + 1);
                t.msgs.pop();
                if v > best {
                    best = v;
                }
                if best.is_one() {
                    break;
                }
            }
            t.msgs.pop();
            sum += best;
        }
        sum / Rat::from_integer(BigInt::from(coins))
    }

    Probability::new(go(spec, x, &mut Transcript::new(), 0))
}

/// Measure the full error profile of a public-coin proof system.
pub fn measure_error_profile_pc(
    spec: &PublicCoinSpec,
    x_yes: &BitString,
    w: &BitString,
    x_no: &BitString,
) -> Result<ErrorProfile> {
    if (spec.membership)(x_no) {
        return Err(Error::Contract("designated no-instance is in the language".into()));
    }
    let completeness =
        Probability::new(Rat::one() - pc_completeness(spec, x_yes, w)?.into_rat())?;
    let soundness = pc_best_prover_value(spec, x_no)?;
    let zk =
        pc_sim_distribution(spec, x_yes)?.stat_distance(&pc_view_distribution(spec, x_yes, w)?)?;
    Ok(ErrorProfile { completeness, soundness, zk })
}
