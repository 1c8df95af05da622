//! One-way-function candidates built from protocol simulators.
//!
//! Each candidate evaluates the simulator on explicit coins, runs the
//! verifier on the simulated transcript, and exposes some prefix of the
//! transcript together with either the verdict, a constant flag, or an
//! empirical acceptance estimate:
//!
//! * [`nizk_candidate`] — `rho -> (crs, verdict)` for a non-interactive
//!   system with a deterministic verifier.
//! * [`pc_candidate`] — `(i, rho) -> (r_1, pi_1, .., r_i, flag-or-verdict)`
//!   for a public-coin system: level `i < k` exposes the coin prefix with a
//!   constant `1`, level `k` exposes the verifier's verdict.
//! * [`cr_candidate`] — the recursive constant-round construction: level
//!   `k` equals the public-coin level `k`; level `i < k` additionally takes
//!   `q` candidate next-coins and `q` oracle-randomness blocks and exposes
//!   an empirical estimate of how often the next level's inversion attempt
//!   succeeds.
//! * [`rv_candidate`] — the randomized-verifier variant:
//!   `(rho, sigma_1..sigma_q) -> (crs, est)` where `est` averages the
//!   verifier's coin.
//! * [`lift_candidate`] — prepends the instance: `(x, r) -> (x, f_x(r))`.
//!
//! The module also computes, exactly, the hybrid distributions used to
//! analyse the reductions (simulated/honest/inverter-completed transcript
//! distributions and the interpolating ladder between them).

use std::sync::Arc;

use crate::dist::{
    BitString, CoinSpace, Coins, FiniteDistribution, Outcome, Probability, Rat, SeededRng, Sym,
};
use crate::inverters::Inverter;
use crate::protocol::{NizkSpec, PublicCoinSpec, Transcript};
use crate::{Error, Result};
use num::{BigInt, One, ToPrimitive, Zero};

/// Finest estimate-search grid any level is allowed to use.
pub const MAX_SEARCH_GRID: u64 = 1 << 20;

/// The `(p, q, tau)` knobs of the estimate-search machinery: inversion
/// quality `1/p`, per-level sample count `q`, and estimate-acceptance
/// tolerance `tau`.
#[derive(Clone, Debug)]
pub struct ReductionParams {
    pub p: u64,
    pub q: u64,
    pub tau: Probability,
}

impl ReductionParams {
    /// The analysis' own setting: `q = n * p^2`, `tau = 1/p`.
    pub fn analysis_defaults(n: u64, p: u64) -> Result<Self> {
        Ok(ReductionParams {
            p,
            q: n * p * p,
            tau: Probability::new(Rat::new(BigInt::one(), BigInt::from(p)))?,
        })
    }

    /// Free-form setting.
    pub fn custom(p: u64, q: u64, tau: Probability) -> Self {
        ReductionParams { p, q, tau }
    }
}

/// A concrete candidate function: an enumerable coin domain and a
/// deterministic evaluation map into canonical outcomes.
pub struct CandidateFunction {
    /// Human-readable construction label (`nizk`, `pc`, `cr-level-i`, `rv`,
    /// `lifted`).
    pub label: String,
    pub domain: CoinSpace,
    /// Encoding label of output distributions.
    pub out_encoding: String,
    eval: Arc<dyn Fn(&Coins) -> Outcome + Send + Sync>,
}

impl CandidateFunction {
    pub fn new(
        label: String,
        domain: CoinSpace,
        out_encoding: String,
        eval: Arc<dyn Fn(&Coins) -> Outcome + Send + Sync>,
    ) -> Self {
        CandidateFunction { label, domain, out_encoding, eval }
    }

    pub fn eval(&self, coins: &Coins) -> Outcome {
        debug_assert!(self.domain.contains(coins), "coins outside the declared domain");
        (self.eval)(coins)
    }

    /// Exact output distribution on uniform input.
    pub fn image_distribution(&self) -> Result<FiniteDistribution<Outcome>> {
        self.domain
            .uniform("domain")?
            .push_forward(&self.out_encoding, |c| self.eval(c))
            .pipe_ok()
    }
}

// Small helper so `push_forward` chains read naturally above.
trait PipeOk: Sized {
    fn pipe_ok(self) -> Result<Self> {
        Ok(self)
    }
}
impl<T: Ord + Clone> PipeOk for FiniteDistribution<T> {}

/// Turn transcript messages into outcome symbols.
pub fn transcript_syms(msgs: &[BitString]) -> Vec<Sym> {
    msgs.iter().map(|m| Sym::Bits(*m)).collect()
}

/// Outcome made of a transcript prefix plus one trailing symbol.
pub fn prefix_outcome(msgs: &[BitString], last: Sym) -> Outcome {
    let mut syms = transcript_syms(msgs);
    syms.push(last);
    Outcome::new(syms)
}

// ---------------------------------------------------------------------------
// NIZK candidate
// ---------------------------------------------------------------------------

/// A NIZK candidate bundled with what is needed to check preimages.
pub struct NizkCandidate {
    pub func: Arc<CandidateFunction>,
    pub spec: Arc<NizkSpec>,
    pub x: BitString,
}

/// `f_x(rho)`: simulate `(crs, proof)`, run the verifier, output
/// `(crs, verdict)`.
pub fn nizk_candidate(spec: &Arc<NizkSpec>, x: &BitString) -> Result<NizkCandidate> {
    if spec.verifier_coin_len != 0 {
        return Err(Error::Unsupported(
            "candidate for a randomized verifier: use rv_candidate".into(),
        ));
    }
    let out_encoding = format!("nizk.f/m{}", spec.crs_len);
    let eval = {
        let spec = Arc::clone(spec);
        let x = *x;
        move |rho: &Coins| {
            let (crs, proof) = (spec.simulator)(&x, rho);
            let a = (spec.verifier)(&x, &crs, &proof, &BitString::empty());
            Outcome::new(vec![Sym::Bits(crs), Sym::bit(a)])
        }
    };
    Ok(NizkCandidate {
        func: Arc::new(CandidateFunction::new(
            "nizk".into(),
            spec.sim_space.clone(),
            out_encoding,
            Arc::new(eval),
        )),
        spec: Arc::clone(spec),
        x: *x,
    })
}

// ---------------------------------------------------------------------------
// Public-coin candidate
// ---------------------------------------------------------------------------

/// A public-coin candidate bundled with its spec and instance.
pub struct PcCandidate {
    pub func: Arc<CandidateFunction>,
    pub spec: Arc<PublicCoinSpec>,
    pub x: BitString,
}

/// The level-`i` output of the public-coin candidate on simulator coins:
/// the first `2i - 1` simulated messages plus the verdict (level `k`) or a
/// constant `1` (level `i < k`).
pub fn pc_level_output(spec: &PublicCoinSpec, x: &BitString, level: usize, rho: &Coins) -> Outcome {
    let t = (spec.simulator)(x, rho);
    let last = if level == spec.rounds {
        Sym::bit(spec.verify(x, &t))
    } else {
        Sym::bit(true)
    };
    prefix_outcome(&t.msgs()[..2 * level - 1], last)
}

/// `f_x(i, rho)` over the joint domain `[k] x simulator coins`.
pub fn pc_candidate(spec: &Arc<PublicCoinSpec>, x: &BitString) -> Result<PcCandidate> {
    let domain = CoinSpace::new(vec![spec.rounds as u64])?.concat(&spec.sim_space);
    let out_encoding = format!("pc.f/{}", spec.view_encoding());
    let eval = {
        let spec = Arc::clone(spec);
        let x = *x;
        move |coins: &Coins| {
            let level = coins.0[0] as usize + 1;
            let rho = Coins(coins.0[1..].to_vec());
            pc_level_output(&spec, &x, level, &rho)
        }
    };
    Ok(PcCandidate {
        func: Arc::new(CandidateFunction::new(
            "pc".into(),
            domain,
            out_encoding,
            Arc::new(eval),
        )),
        spec: Arc::clone(spec),
        x: *x,
    })
}

// ---------------------------------------------------------------------------
// Constant-round recursive candidate
// ---------------------------------------------------------------------------

/// Everything the level-`i` recursive machinery needs: the protocol, the
/// instance, the estimate parameters, and the inverters for the levels
/// *below* `i` (`below[j]` inverts level `i + 1 + j`).
#[derive(Clone)]
pub struct CrContext {
    pub spec: Arc<PublicCoinSpec>,
    pub x: BitString,
    pub params: ReductionParams,
    /// 1-based level `i`.
    pub level: usize,
    /// Inverters for levels `i+1, .., k`.
    pub below: Vec<Arc<Inverter>>,
}

impl CrContext {
    pub fn new(
        spec: &Arc<PublicCoinSpec>,
        x: &BitString,
        params: &ReductionParams,
        level: usize,
        below: Vec<Arc<Inverter>>,
    ) -> Result<Self> {
        let k = spec.rounds;
        if level == 0 || level > k {
            return Err(Error::OutOfRange(format!("level {level} outside 1..={k}")));
        }
        if below.len() != k - level {
            return Err(Error::Contract(format!(
                "level {level} of {k} needs {} oracles below, got {}",
                k - level,
                below.len()
            )));
        }
        Ok(CrContext { spec: Arc::clone(spec), x: *x, params: params.clone(), level, below })
    }

    /// The estimate-search grid denominator `q^(k - level)` for this level.
    pub fn search_grid(&self) -> Result<u64> {
        let mut g: u64 = 1;
        for _ in self.level..self.spec.rounds {
            g = g
                .checked_mul(self.params.q)
                .filter(|&v| v <= MAX_SEARCH_GRID)
                .ok_or(Error::Budget { required: u128::MAX, cap: MAX_SEARCH_GRID as u128 })?;
        }
        Ok(g)
    }

    /// Context one level down (for the recursive estimate).
    pub fn child(&self) -> Result<(Arc<Inverter>, CrContext)> {
        let inv = self.below.first().cloned().ok_or_else(|| {
            Error::Contract("no oracle below the last level".into())
        })?;
        let ctx = CrContext {
            spec: Arc::clone(&self.spec),
            x: self.x,
            params: self.params.clone(),
            level: self.level + 1,
            below: self.below[1..].to_vec(),
        };
        Ok((inv, ctx))
    }
}

/// A constant-round candidate bundled with its context.
pub struct CrCandidate {
    pub func: Arc<CandidateFunction>,
    pub ctx: Arc<CrContext>,
}

impl CrCandidate {
    /// How the level-`i < k` domain splits: simulator components, then `q`
    /// next-coin components, then `q` oracle-randomness components.
    pub fn sim_components(&self) -> usize {
        self.ctx.spec.sim_space.components().len()
    }
}

/// Level-`k` candidate: exactly the public-coin level `k`. Level `i < k`:
/// the input carries `q` candidate next coins and `q` oracle-randomness
/// blocks; the output exposes the simulated prefix through `r_i` plus the
/// empirical success rate of the next level's inversion attempt over the
/// `q` blocks.
pub fn cr_candidate(ctx: CrContext) -> Result<CrCandidate> {
    let spec = Arc::clone(&ctx.spec);
    let k = spec.rounds;
    let i = ctx.level;
    let x = ctx.x;
    let out_encoding = format!("cr.f/{}/i{}", spec.view_encoding(), i);

    if i == k {
        let eval = {
            let spec = Arc::clone(&spec);
            move |rho: &Coins| pc_level_output(&spec, &x, k, rho)
        };
        return Ok(CrCandidate {
            func: Arc::new(CandidateFunction::new(
                format!("cr-level-{i}"),
                spec.sim_space.clone(),
                out_encoding,
                Arc::new(eval),
            )),
            ctx: Arc::new(ctx),
        });
    }

    let q = ctx.params.q;
    let next_coin_len = spec.coin_lens[i]; // round i+1, 0-based index i
    let rd_len = ctx.below[0].rd_len();
    let mut comps = spec.sim_space.components().to_vec();
    comps.extend(std::iter::repeat_n(1u64 << next_coin_len, q as usize));
    comps.extend(std::iter::repeat_n(1u64 << rd_len, q as usize));
    let domain = CoinSpace::new(comps)?;

    let ctx = Arc::new(ctx);
    let eval = {
        let ctx = Arc::clone(&ctx);
        let spec = Arc::clone(&spec);
        move |coins: &Coins| {
            let ns = spec.sim_space.components().len();
            let rho = Coins(coins.0[..ns].to_vec());
            let t = (spec.simulator)(&x, &rho);
            let mut hits = Rat::zero();
            for j in 0..q as usize {
                let sigma = BitString::new(next_coin_len, coins.0[ns + j]).unwrap();
                let rd = coins.0[ns + q as usize + j];
                // The block seeds all randomness of the next level's
                // inversion attempt, making est a deterministic function of
                // the input.
                let mut rng = SeededRng::new(rd).child("cr.block");
                let mut prefix = t.prefix(2 * i);
                prefix.push(sigma);
                let (inv, child) = ctx.child().expect("level < k has a child");
                let b = crate::reductions::cr_b(&child, &inv, &prefix, &mut rng)
                    .expect("estimate blocks stay within their budgets");
                hits += b.value;
            }
            let est = hits / Rat::from_integer(BigInt::from(q));
            let est_sym = Sym::grid(
                est.numer().to_u64().expect("estimate numerator fits"),
                est.denom().to_u64().expect("estimate denominator fits"),
            )
            .expect("estimates lie in [0,1]");
            prefix_outcome(&t.msgs()[..2 * i - 1], est_sym)
        }
    };
    Ok(CrCandidate {
        func: Arc::new(CandidateFunction::new(
            format!("cr-level-{i}"),
            domain,
            out_encoding,
            Arc::new(eval),
        )),
        ctx,
    })
}

// ---------------------------------------------------------------------------
// Randomized-verifier candidate
// ---------------------------------------------------------------------------

/// A randomized-verifier candidate bundled with its spec and instance.
pub struct RvCandidate {
    pub func: Arc<CandidateFunction>,
    pub spec: Arc<NizkSpec>,
    pub x: BitString,
    pub q: u64,
}

/// `f_x(rho; sigma_1..sigma_q)`: simulate `(crs, proof)` and expose
/// `(crs, est)` where `est` is the fraction of the `q` supplied verifier
/// coins that accept.
pub fn rv_candidate(spec: &Arc<NizkSpec>, x: &BitString, q: u64) -> Result<RvCandidate> {
    if spec.verifier_coin_len == 0 {
        return Err(Error::Unsupported(
            "deterministic verifier: use nizk_candidate".into(),
        ));
    }
    let v = spec.verifier_coin_len;
    let mut comps = spec.sim_space.components().to_vec();
    comps.extend(std::iter::repeat_n(1u64 << v, q as usize));
    let domain = CoinSpace::new(comps)?;
    let out_encoding = format!("rv.f/m{}/q{}", spec.crs_len, q);
    let ns = spec.sim_space.components().len();
    let eval = {
        let spec = Arc::clone(spec);
        let x = *x;
        move |coins: &Coins| {
            let rho = Coins(coins.0[..ns].to_vec());
            let (crs, proof) = (spec.simulator)(&x, &rho);
            let hits = (0..q as usize)
                .filter(|&j| {
                    let sigma = BitString::new(v, coins.0[ns + j]).unwrap();
                    (spec.verifier)(&x, &crs, &proof, &sigma)
                })
                .count() as u64;
            Outcome::new(vec![Sym::Bits(crs), Sym::grid(hits, q).unwrap()])
        }
    };
    Ok(RvCandidate {
        func: Arc::new(CandidateFunction::new(
            "rv".into(),
            domain,
            out_encoding,
            Arc::new(eval),
        )),
        spec: Arc::clone(spec),
        x: *x,
        q,
    })
}

// ---------------------------------------------------------------------------
// Lifted candidate
// ---------------------------------------------------------------------------

/// `f(x, r) = (x, f_x(r))` over an explicit instance family; the instance
/// index is a uniform domain component and is copied into the output.
pub fn lift_candidate(family: &[(BitString, Arc<CandidateFunction>)]) -> Result<CandidateFunction> {
    let (first_x, first_f) =
        family.first().ok_or_else(|| Error::Contract("empty candidate family".into()))?;
    if family.iter().any(|(_, f)| f.domain != first_f.domain) {
        return Err(Error::Contract("family members must share a domain shape".into()));
    }
    if family.iter().any(|(x, _)| x.len() != first_x.len()) {
        return Err(Error::Contract("family instances must share a length".into()));
    }
    let domain = CoinSpace::new(vec![family.len() as u64])?.concat(&first_f.domain);
    let out_encoding = format!("lifted/{}", first_f.out_encoding);
    let members: Vec<(BitString, Arc<CandidateFunction>)> = family.to_vec();
    let eval = move |coins: &Coins| {
        let (x, f) = &members[coins.0[0] as usize];
        let inner = f.eval(&Coins(coins.0[1..].to_vec()));
        let mut syms = vec![Sym::Bits(*x)];
        syms.extend(inner.0);
        Outcome::new(syms)
    };
    Ok(CandidateFunction::new("lifted".into(), domain, out_encoding, Arc::new(eval)))
}

// ---------------------------------------------------------------------------
// Hybrid distributions
// ---------------------------------------------------------------------------

/// The hybrid distributions of the reduction analyses. All public-coin
/// hybrids share the outcome shape `(r_1, pi_1, .., r_k, last)` with the
/// final prover message dropped.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HybridKind {
    /// Simulated transcript plus the verifier's verdict.
    S,
    /// Honest transcript plus the verifier's verdict (NIZK naming).
    P,
    /// The reduction's own trial distribution: inverter-completed rounds
    /// with a trailing constant 1.
    I,
    /// Simulated prefix through round `i - 1`, inverter-completed tail,
    /// trailing 1.
    SI(usize),
    /// Honest prefix through round `i - 1`, inverter-completed tail,
    /// trailing 1.
    PI(usize),
    /// Simulated prefix through the round-`i` coin, inverter-completed
    /// tail, trailing 1.
    MI(usize),
    /// Honest transcript plus verdict (public-coin naming).
    PFull,
}

/// Exact NIZK hybrids over `(crs, last)`.
pub fn nizk_hybrid(
    spec: &Arc<NizkSpec>,
    x: &BitString,
    w: &BitString,
    kind: HybridKind,
) -> Result<FiniteDistribution<Outcome>> {
    if spec.verifier_coin_len != 0 {
        return Err(Error::Unsupported("hybrids require a deterministic verifier".into()));
    }
    let enc = format!("nizk.hyb/m{}", spec.crs_len);
    let pair_outcome = |crs: &BitString, proof: &BitString| {
        let a = (spec.verifier)(x, crs, proof, &BitString::empty());
        Outcome::new(vec![Sym::Bits(*crs), Sym::bit(a)])
    };
    match kind {
        HybridKind::S => Ok(crate::protocol::nizk_sim_distribution(spec, x)?
            .push_forward(&enc, |(crs, proof)| pair_outcome(crs, proof))),
        HybridKind::P | HybridKind::PFull => {
            Ok(crate::protocol::nizk_view_distribution(spec, x, w)?
                .push_forward(&enc, |(crs, proof)| pair_outcome(crs, proof)))
        }
        HybridKind::I => Ok(CoinSpace::bits(spec.crs_len).uniform("crs")?.push_forward(
            &enc,
            |c| {
                Outcome::new(vec![
                    Sym::Bits(c.bit_component(0, spec.crs_len)),
                    Sym::bit(true),
                ])
            },
        )),
        _ => Err(Error::Unsupported("ladder hybrids are public-coin only".into())),
    }
}

/// Exact public-coin hybrids over `(r_1, pi_1, .., r_k, last)`.
///
/// The inverter completes prover rounds exactly as the reduction's prover
/// does: query the level-`i` image `(prefix, 1)`, re-simulate on the
/// answered coins and project the round's message; a failed inversion falls
/// back to the all-zero-coins simulation.
pub fn pc_hybrid(
    cand: &PcCandidate,
    w: &BitString,
    inverter: &Inverter,
    kind: HybridKind,
) -> Result<FiniteDistribution<Outcome>> {
    let spec = &cand.spec;
    let x = &cand.x;
    let k = spec.rounds;
    let enc = format!("pc.hyb/{}", spec.view_encoding());

    let finish = |t: &Transcript, last: Sym| prefix_outcome(&t.msgs()[..2 * k - 1], last);

    // Full-transcript kinds.
    match kind {
        HybridKind::S => {
            return Ok(crate::protocol::pc_sim_distribution(spec, x)?
                .push_forward(&enc, |t| finish(t, Sym::bit(spec.verify(x, t)))));
        }
        HybridKind::P | HybridKind::PFull => {
            return Ok(crate::protocol::pc_view_distribution(spec, x, w)?
                .push_forward(&enc, |t| finish(t, Sym::bit(spec.verify(x, t)))));
        }
        _ => {}
    }

    // Ladder kinds: build a partial-transcript distribution, then extend
    // with uniform coins and inverter-completed prover messages up to the
    // final coin r_k.
    let start: FiniteDistribution<Transcript> = match kind {
        HybridKind::I => FiniteDistribution::point("pc.partial", Transcript::new()),
        HybridKind::SI(i) => {
            check_level(i, k)?;
            crate::protocol::pc_sim_distribution(spec, x)?
                .push_forward("pc.partial", |t| t.prefix(2 * (i - 1)))
        }
        HybridKind::PI(i) => {
            check_level(i, k)?;
            crate::protocol::pc_view_distribution(spec, x, w)?
                .push_forward("pc.partial", |t| t.prefix(2 * (i - 1)))
        }
        HybridKind::MI(i) => {
            check_level(i, k)?;
            crate::protocol::pc_sim_distribution(spec, x)?
                .push_forward("pc.partial", |t| t.prefix(2 * i - 1))
        }
        _ => unreachable!("full-transcript kinds handled above"),
    };

    let cur = extend_with_inverter(cand, inverter, start, 2 * k - 1)?;
    Ok(cur.push_forward(&enc, |t| finish(t, Sym::bit(true))))
}

/// Extend an exact partial-transcript distribution to `target_len` messages:
/// uniform kernels for verifier coins, inverter-completed kernels for prover
/// messages (query the accepting level image, re-simulate on the answered
/// coins; failed inversions fall back to the all-zero-coins simulation).
pub(crate) fn extend_with_inverter(
    cand: &PcCandidate,
    inverter: &Inverter,
    start: FiniteDistribution<Transcript>,
    target_len: usize,
) -> Result<FiniteDistribution<Transcript>> {
    let spec = &cand.spec;
    let x = &cand.x;
    let mut cur = start;
    loop {
        let len = cur.support().next().map(|t| t.len()).unwrap_or(0);
        debug_assert!(cur.support().all(|t| t.len() == len), "ragged transcript prefix");
        if len >= target_len {
            break;
        }
        if len % 2 == 0 {
            // Next verifier coin.
            let round = len / 2;
            let coin_len = spec.coin_lens[round];
            cur = cur.push_forward_kernel("pc.partial", |t| {
                CoinSpace::bits(coin_len).uniform("coin")?.push_forward("pc.partial", |c| {
                    let mut t2 = t.clone();
                    t2.push(c.bit_component(0, coin_len));
                    t2
                })
                .pipe_ok()
            })?;
        } else {
            // Inverter-completed prover message for round (len+1)/2.
            let round = (len + 1) / 2;
            cur = cur.push_forward_kernel("pc.partial", |t| {
                let target = prefix_outcome(t.msgs(), Sym::bit(true));
                inverter.answer_dist(&target)?.push_forward("pc.partial", |ans| {
                    let rho = match ans {
                        Some(coins) => Coins(coins.0[1..].to_vec()),
                        None => Coins(vec![0; spec.sim_space.components().len()]),
                    };
                    let pi = *(spec.simulator)(x, &rho).msg(2 * round - 1);
                    let mut t2 = t.clone();
                    t2.push(pi);
                    t2
                })
                .pipe_ok()
            })?;
        }
    }
    Ok(cur)
}

fn check_level(i: usize, k: usize) -> Result<()> {
    if i == 0 || i > k {
        return Err(Error::OutOfRange(format!("hybrid level {i} outside 1..={k}")));
    }
    Ok(())
}
