//! Concrete protocol families.
//!
//! * The **dial family**: toy proof systems for the language "first instance
//!   bit is 1" whose completeness, soundness and zero-knowledge errors can
//!   each be set to an arbitrary dyadic value. The CRS integer range is
//!   partitioned into a completeness-failure region, a free-accept region
//!   and an honest region; proofs are keyed tags so that soundness outside
//!   the free region is impossible and zero-knowledge error is injected by
//!   corrupting the simulated tag with exactly the requested probability.
//!   The dial verifier consults language membership directly — these are
//!   measurement instruments, not cryptography.
//! * The **graph-isomorphism sigma protocol**: the classic 2-round
//!   prover-first protocol (commit to a relabeling, answer a 1-bit
//!   challenge with the connecting permutation) with a perfect simulator,
//!   on graphs of at most 8 vertices.

use std::sync::Arc;

use crate::dist::{splitmix64, BitString, CoinSpace, Probability, Rat};
use crate::protocol::{NizkSpec, PublicCoinSpec, Transcript};
use crate::{Error, Result};
use num::ToPrimitive;

// ---------------------------------------------------------------------------
// Dial profiles
// ---------------------------------------------------------------------------

/// A requested `(eps_c, eps_s, eps_z)` triple for the dial family, together
/// with the CRS length `m`, the number of simulator-corruption coin bits,
/// and the tag key.
///
/// `eps_c` and `eps_s` must be multiples of `2^-m` with `eps_c + eps_s <= 1`
/// (the two CRS regions must fit disjointly); `eps_z` must be a multiple of
/// `2^-sim_corrupt_len`.
#[derive(Clone, Debug)]
pub struct DialProfile {
    pub eps_c: Probability,
    pub eps_s: Probability,
    pub eps_z: Probability,
    pub crs_len: u32,
    pub sim_corrupt_len: u32,
    pub tag_seed: u64,
}

fn scaled_threshold(p: &Probability, log_den: u32, what: &str) -> Result<u64> {
    let scaled = p.rat() * Rat::from_integer(num::BigInt::from(1u128 << log_den));
    if !scaled.is_integer() {
        return Err(Error::OutOfRange(format!(
            "{what} = {} is not a multiple of 2^-{log_den}",
            p
        )));
    }
    scaled.to_integer().to_u64().ok_or_else(|| Error::OutOfRange(format!("{what} threshold overflow")))
}

impl DialProfile {
    pub fn new(
        eps_c: Probability,
        eps_s: Probability,
        eps_z: Probability,
        crs_len: u32,
        sim_corrupt_len: u32,
        tag_seed: u64,
    ) -> Result<Self> {
        let p = DialProfile { eps_c, eps_s, eps_z, crs_len, sim_corrupt_len, tag_seed };
        if p.eps_c.rat() + p.eps_s.rat() > Rat::from_integer(1.into()) {
            return Err(Error::OutOfRange("eps_c + eps_s exceeds 1".into()));
        }
        // Validate grid membership by computing the region thresholds.
        p.completeness_threshold()?;
        p.soundness_width()?;
        p.corruption_threshold()?;
        Ok(p)
    }

    /// CRS integers below this value make the honest verifier reject.
    pub fn completeness_threshold(&self) -> Result<u64> {
        scaled_threshold(&self.eps_c, self.crs_len, "eps_c")
    }

    /// Width of the free-accept region that sits directly above the
    /// completeness-failure region.
    pub fn soundness_width(&self) -> Result<u64> {
        scaled_threshold(&self.eps_s, self.crs_len, "eps_s")
    }

    /// Simulator corruption coins below this value flip the tag.
    pub fn corruption_threshold(&self) -> Result<u64> {
        scaled_threshold(&self.eps_z, self.sim_corrupt_len, "eps_z")
    }
}

/// Keyed tag: a short pseudorandom fingerprint of `(domain, x, payload)`.
/// Purely a fixture — fast, deterministic, and with no security claim.
fn prf_tag(seed: u64, domain: u64, x: &BitString, payload: u64, out_len: u32) -> BitString {
    let mut h = splitmix64(seed ^ 0x7a6b_6f77_6621_0001);
    h = splitmix64(h ^ domain);
    h = splitmix64(h ^ ((x.len() as u64) << 56) ^ x.value());
    h = splitmix64(h ^ payload);
    BitString::new(out_len, if out_len == 0 { 0 } else { h >> (64 - out_len) }).unwrap()
}

/// Membership for the dial language: the leading instance bit is 1.
fn dial_member(x: &BitString) -> bool {
    x.len() > 0 && x.bit(0)
}

/// Build a dial NIZK whose measured profile equals the request exactly.
///
/// The verifier's rule: on `x` in the language accept iff the proof equals
/// the tag of `(x, crs)` and the CRS lies above the completeness-failure
/// region; outside the language accept (any proof) iff the CRS lies in the
/// free-accept region. The simulator samples a uniform CRS from its first
/// coin and corrupts the tag's low bit when its second coin is below the
/// corruption threshold.
pub fn make_dial_nizk(
    profile: &DialProfile,
    instance_len: u32,
    proof_len: u32,
) -> Result<Arc<NizkSpec>> {
    make_dial_nizk_inner(profile, instance_len, proof_len, 0, 0)
}

/// Dial NIZK with a randomized verifier: after the deterministic rule, the
/// verdict is flipped when the verifier's private coin (of `flip_coin_len`
/// bits) falls below `flip_threshold`, i.e. with probability
/// `flip_threshold / 2^flip_coin_len`.
pub fn make_dial_nizk_noisy(
    profile: &DialProfile,
    instance_len: u32,
    proof_len: u32,
    flip_coin_len: u32,
    flip_threshold: u64,
) -> Result<Arc<NizkSpec>> {
    if flip_coin_len == 0 || flip_threshold as u128 > 1u128 << flip_coin_len {
        return Err(Error::OutOfRange("flip threshold outside the coin range".into()));
    }
    make_dial_nizk_inner(profile, instance_len, proof_len, flip_coin_len, flip_threshold)
}

fn make_dial_nizk_inner(
    profile: &DialProfile,
    instance_len: u32,
    proof_len: u32,
    flip_coin_len: u32,
    flip_threshold: u64,
) -> Result<Arc<NizkSpec>> {
    if proof_len == 0 || proof_len > 16 {
        return Err(Error::OutOfRange("dial proof length must be in 1..=16".into()));
    }
    let thr_c = profile.completeness_threshold()?;
    let width_s = profile.soundness_width()?;
    let thr_corrupt = profile.corruption_threshold()?;
    let seed = profile.tag_seed;
    let m = profile.crs_len;

    let verifier = {
        move |x: &BitString, crs: &BitString, proof: &BitString, coin: &BitString| {
            let base = if dial_member(x) {
                proof == &prf_tag(seed, 1, x, crs.value(), proof_len) && crs.value() >= thr_c
            } else {
                crs.value() >= thr_c && crs.value() < thr_c + width_s
            };
            let flip = flip_coin_len > 0 && coin.value() < flip_threshold;
            base ^ flip
        }
    };
    let prover = move |x: &BitString, _w: &BitString, crs: &BitString| {
        prf_tag(seed, 1, x, crs.value(), proof_len)
    };
    let simulator = move |x: &BitString, rho: &crate::dist::Coins| {
        let crs = BitString::new(m, rho.0[0]).unwrap();
        let mut proof = prf_tag(seed, 1, x, crs.value(), proof_len);
        if rho.0[1] < thr_corrupt {
            proof = proof.flip_low_bit().unwrap();
        }
        (crs, proof)
    };

    Ok(Arc::new(NizkSpec {
        instance_len,
        crs_len: m,
        proof_len,
        verifier_coin_len: flip_coin_len,
        sim_space: CoinSpace::new(vec![1u64 << m, 1u64 << profile.sim_corrupt_len])?,
        membership: Arc::new(dial_member),
        relation: Arc::new(|x, w| dial_member(x) && x == w),
        prover: Arc::new(prover),
        verifier: Arc::new(verifier),
        simulator: Arc::new(simulator),
    }))
}

/// Build a `k`-round public-coin dial protocol. The round coin lengths must
/// sum to the profile's CRS length; the verifier applies the dial rule to
/// the concatenated coins, and honest round-`i` messages are tags of the
/// coin prefix. The simulator corrupts the *first* prover message with
/// probability exactly `eps_z`.
pub fn make_dial_pc(
    profile: &DialProfile,
    instance_len: u32,
    coin_lens: &[u32],
    proof_lens: &[u32],
) -> Result<Arc<PublicCoinSpec>> {
    let k = coin_lens.len();
    if k == 0 || proof_lens.len() != k {
        return Err(Error::Schedule("need matching, non-empty coin/proof length lists".into()));
    }
    if coin_lens.iter().any(|&l| l == 0) {
        return Err(Error::Schedule("dial public-coin rounds all carry coins".into()));
    }
    if coin_lens.iter().sum::<u32>() != profile.crs_len {
        return Err(Error::Schedule("round coin lengths must sum to the CRS length".into()));
    }
    if proof_lens.iter().any(|&l| l == 0 || l > 16) {
        return Err(Error::OutOfRange("dial proof lengths must be in 1..=16".into()));
    }
    let thr_c = profile.completeness_threshold()?;
    let width_s = profile.soundness_width()?;
    let thr_corrupt = profile.corruption_threshold()?;
    let seed = profile.tag_seed;
    let coin_lens_v = coin_lens.to_vec();
    let proof_lens_v = proof_lens.to_vec();

    // The coins of a transcript prefix, concatenated big-endian.
    let concat_coins = |t: &Transcript, upto: usize| -> BitString {
        let mut acc = BitString::empty();
        for i in 0..upto {
            acc = acc.concat(t.msg(2 * i)).unwrap();
        }
        acc
    };

    let verifier = {
        let coin_lens = coin_lens_v.clone();
        let proof_lens = proof_lens_v.clone();
        move |x: &BitString, t: &Transcript| {
            if t.len() != 2 * coin_lens.len() {
                return false;
            }
            let mut acc = BitString::empty();
            let mut tags_ok = true;
            for i in 0..coin_lens.len() {
                acc = acc.concat(t.msg(2 * i)).unwrap();
                tags_ok &= t.msg(2 * i + 1)
                    == &prf_tag(seed, 2 + i as u64, x, acc.value(), proof_lens[i]);
            }
            if dial_member(x) {
                tags_ok && acc.value() >= thr_c
            } else {
                acc.value() >= thr_c && acc.value() < thr_c + width_s
            }
        }
    };
    let prover = {
        let proof_lens = proof_lens_v.clone();
        move |x: &BitString, _w: &BitString, t: &Transcript, _c: &crate::dist::Coins, round: usize| {
            let acc = concat_coins(t, round + 1);
            prf_tag(seed, 2 + round as u64, x, acc.value(), proof_lens[round])
        }
    };
    let simulator = {
        let coin_lens = coin_lens_v.clone();
        let proof_lens = proof_lens_v.clone();
        move |x: &BitString, rho: &crate::dist::Coins| {
            let mut rest = BitString::new(coin_lens.iter().sum(), rho.0[0]).unwrap();
            let mut t = Transcript::new();
            let mut acc = BitString::empty();
            for i in 0..coin_lens.len() {
                let (r, tail) = rest.split(coin_lens[i]).unwrap();
                rest = tail;
                acc = acc.concat(&r).unwrap();
                let mut tag = prf_tag(seed, 2 + i as u64, x, acc.value(), proof_lens[i]);
                if i == 0 && rho.0[1] < thr_corrupt {
                    tag = tag.flip_low_bit().unwrap();
                }
                t.push(r);
                t.push(tag);
            }
            t
        }
    };

    let spec = Arc::new(PublicCoinSpec {
        instance_len,
        rounds: k,
        messages: 2 * k,
        coin_lens: coin_lens_v,
        proof_lens: proof_lens_v,
        sim_space: CoinSpace::new(vec![1u64 << profile.crs_len, 1u64 << profile.sim_corrupt_len])?,
        prover_space: CoinSpace::new(vec![1])?,
        membership: Arc::new(dial_member),
        relation: Arc::new(|x, w| dial_member(x) && x == w),
        prover: Arc::new(prover),
        verifier: Arc::new(verifier),
        simulator: Arc::new(simulator),
    });
    spec.validate()?;
    Ok(spec)
}

/// Canonical yes-instance / witness / no-instance triple for the dial
/// language at a given instance length.
pub fn dial_instances(instance_len: u32) -> (BitString, BitString, BitString) {
    assert!(instance_len >= 1);
    let yes = BitString::new(instance_len, 1u64 << (instance_len - 1)).unwrap();
    (yes, yes, BitString::new(instance_len, 0).unwrap())
}

// ---------------------------------------------------------------------------
// Graphs and permutations
// ---------------------------------------------------------------------------

const FACTORIAL: [u64; 9] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320];

/// A simple undirected graph on at most 8 vertices, stored as the bitset of
/// its edges over unordered pairs `(u, v)`, `u < v`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    adj: u64,
}

fn pair_index(n: usize, u: usize, v: usize) -> u32 {
    debug_assert!(u < v && v < n);
    (u * n - u * (u + 1) / 2 + (v - u - 1)) as u32
}

impl Graph {
    pub const MAX_VERTICES: usize = 8;

    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > Self::MAX_VERTICES {
            return Err(Error::OutOfRange(format!("graph order {n} outside 1..=8")));
        }
        let mut g = Graph { n, adj: 0 };
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::OutOfRange(format!("bad edge ({u}, {v}) on {n} vertices")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            g.adj |= 1 << pair_index(n, a, b);
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u32 {
        self.adj.count_ones()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.adj >> pair_index(self.n, a, b) & 1 == 1
    }

    /// Number of pair slots, i.e. the edge-bitset width `n(n-1)/2`.
    pub fn pair_bits(n: usize) -> u32 {
        (n * (n - 1) / 2) as u32
    }

    /// The edge bitset as a message: pair `(u, v)` occupies bit `pair_index`
    /// counted from the low end.
    pub fn to_bits(&self) -> BitString {
        BitString::new(Self::pair_bits(self.n), self.adj).unwrap()
    }

    pub fn from_bits(n: usize, bits: &BitString) -> Result<Self> {
        if bits.len() != Self::pair_bits(n) {
            return Err(Error::OutOfRange("edge bitset has the wrong width".into()));
        }
        Ok(Graph { n, adj: bits.value() })
    }

    /// The image graph under a vertex permutation: `perm(g)` has the edge
    /// `(perm[u], perm[v])` exactly when `g` has `(u, v)`.
    pub fn apply_perm(&self, perm: &[usize]) -> Graph {
        let mut out = Graph { n: self.n, adj: 0 };
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                    out.adj |= 1 << pair_index(self.n, a, b);
                }
            }
        }
        out
    }

    /// Search for an isomorphism mapping `self` onto `other`.
    pub fn isomorphism_to(&self, other: &Graph) -> Option<Vec<usize>> {
        if self.n != other.n || self.edge_count() != other.edge_count() {
            return None;
        }
        (0..FACTORIAL[self.n])
            .map(|ix| perm_unrank(self.n, ix))
            .find(|p| &self.apply_perm(p) == other)
    }
}

/// Number of bits needed to address all permutations of `n` vertices.
pub fn perm_bits(n: usize) -> u32 {
    64 - (FACTORIAL[n] - 1).leading_zeros()
}

/// Permutation with the given Lehmer rank (canonical order on `S_n`).
pub fn perm_unrank(n: usize, mut ix: u64) -> Vec<usize> {
    debug_assert!(ix < FACTORIAL[n]);
    let mut avail: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = FACTORIAL[n - 1 - i];
        let d = (ix / f) as usize;
        ix %= f;
        out.push(avail.remove(d));
    }
    out
}

/// Lehmer rank of a permutation; inverse of [`perm_unrank`].
pub fn perm_rank(perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut avail: Vec<usize> = (0..n).collect();
    let mut ix = 0u64;
    for (i, &p) in perm.iter().enumerate() {
        let d = avail.iter().position(|&a| a == p).unwrap();
        ix += d as u64 * FACTORIAL[n - 1 - i];
        avail.remove(d);
    }
    ix
}

/// Compose permutations: `(a . b)[v] = a[b[v]]` (apply `b` first).
pub fn perm_compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&v| a[v]).collect()
}

// ---------------------------------------------------------------------------
// Graph-isomorphism sigma protocol
// ---------------------------------------------------------------------------

/// A graph-isomorphism proof system instantiated for graphs of a fixed
/// order, together with the encoded instance for a specific pair and the
/// witness permutation when the pair is isomorphic.
pub struct GraphIsoProtocol {
    pub spec: Arc<PublicCoinSpec>,
    pub instance: BitString,
    pub witness: Option<BitString>,
}

/// Encode a pair of graphs as an instance: `g0`'s edge bits (high), then
/// `g1`'s (low).
pub fn graph_pair_instance(g0: &Graph, g1: &Graph) -> BitString {
    g0.to_bits().concat(&g1.to_bits()).unwrap()
}

fn decode_pair(n: usize, x: &BitString) -> Option<(Graph, Graph)> {
    let e = Graph::pair_bits(n);
    if x.len() != 2 * e {
        return None;
    }
    let (hi, lo) = x.split(e).unwrap();
    Some((Graph::from_bits(n, &hi).unwrap(), Graph::from_bits(n, &lo).unwrap()))
}

/// Build the graph-isomorphism sigma protocol for the order of the given
/// pair.
///
/// Schedule (prover speaks first, so the zeroth coin is empty):
/// the prover commits to `H`, a uniformly relabeled copy of `g1`; the
/// verifier sends a challenge bit `b`; the prover answers with a
/// permutation mapping `g_b` onto `H`. The simulator draws `(b, tau)`
/// uniformly and outputs `(tau(g_b), b, tau)` — on isomorphic pairs this
/// reproduces the honest view exactly. Permutation messages are sent as
/// Lehmer ranks; ranks at or beyond `n!` are rejected by the verifier.
pub fn make_graph_iso(g0: &Graph, g1: &Graph) -> Result<GraphIsoProtocol> {
    if g0.order() != g1.order() {
        return Err(Error::OutOfRange("graph pair must share an order".into()));
    }
    let n = g0.order();
    let e = Graph::pair_bits(n);
    let pbits = perm_bits(n);
    let nfact = FACTORIAL[n];

    let membership = move |x: &BitString| {
        decode_pair(n, x).is_some_and(|(a, b)| a.isomorphism_to(&b).is_some())
    };
    let relation = move |x: &BitString, w: &BitString| {
        if w.len() != pbits || w.value() >= nfact {
            return false;
        }
        decode_pair(n, x)
            .is_some_and(|(a, b)| a.apply_perm(&perm_unrank(n, w.value())) == b)
    };
    let prover = move |x: &BitString, w: &BitString, t: &Transcript, coins: &crate::dist::Coins, round: usize| {
        let (_, g1) = decode_pair(n, x).expect("instance checked by relation");
        let tau = perm_unrank(n, coins.0[0]);
        match round {
            0 => g1.apply_perm(&tau).to_bits(),
            1 => {
                let b = t.msg(2).value();
                let answer = if b == 1 {
                    tau
                } else {
                    // tau . phi maps g0 via phi onto g1, then onto H.
                    let phi = perm_unrank(n, w.value());
                    perm_compose(&tau, &phi)
                };
                BitString::new(pbits, perm_rank(&answer)).unwrap()
            }
            _ => unreachable!("two rounds"),
        }
    };
    let verifier = move |x: &BitString, t: &Transcript| {
        if t.len() != 4 {
            return false;
        }
        let Some((g0, g1)) = decode_pair(n, x) else { return false };
        let h = match Graph::from_bits(n, t.msg(1)) {
            Ok(h) => h,
            Err(_) => return false,
        };
        let b = t.msg(2).value();
        let sigma_ix = t.msg(3).value();
        if sigma_ix >= nfact {
            return false;
        }
        let sigma = perm_unrank(n, sigma_ix);
        let target = if b == 1 { g1 } else { g0 };
        target.apply_perm(&sigma) == h
    };
    let simulator = move |x: &BitString, rho: &crate::dist::Coins| {
        let (g0, g1) = decode_pair(n, x).expect("simulator runs on well-formed instances");
        let b = rho.0[0];
        let tau = perm_unrank(n, rho.0[1]);
        let src = if b == 1 { g1 } else { g0 };
        Transcript::from_msgs(vec![
            BitString::empty(),
            src.apply_perm(&tau).to_bits(),
            BitString::new(1, b).unwrap(),
            BitString::new(pbits, perm_rank(&tau)).unwrap(),
        ])
    };

    let spec = Arc::new(PublicCoinSpec {
        instance_len: 2 * e,
        rounds: 2,
        messages: 3,
        coin_lens: vec![0, 1],
        proof_lens: vec![e, pbits],
        sim_space: CoinSpace::new(vec![2, nfact])?,
        prover_space: CoinSpace::new(vec![nfact])?,
        membership: Arc::new(membership),
        relation: Arc::new(relation),
        prover: Arc::new(prover),
        verifier: Arc::new(verifier),
        simulator: Arc::new(simulator),
    });
    spec.validate()?;

    let instance = graph_pair_instance(g0, g1);
    let witness = g0
        .isomorphism_to(g1)
        .map(|p| BitString::new(pbits, perm_rank(&p)).unwrap());
    Ok(GraphIsoProtocol { spec, instance, witness })
}

// ---------------------------------------------------------------------------
// Graph file format
// ---------------------------------------------------------------------------

/// Parse a two-graph file.
///
/// Format: UTF-8 text; `#` starts a comment; each graph begins with
/// `n <count>` followed by `e <u> <v>` lines (0-based endpoints, `u != v`);
/// a line consisting of `--` separates the two graphs.
pub fn parse_graph_pair(text: &str) -> Result<(Graph, Graph)> {
    let mut graphs: Vec<(Option<usize>, Vec<(usize, usize)>)> = vec![(None, Vec::new())];
    for (ix, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        let err = |msg: String| Error::Parse { line: ix + 1, msg };
        if line.is_empty() {
            continue;
        }
        if line == "--" {
            graphs.push((None, Vec::new()));
            continue;
        }
        let mut parts = line.split_whitespace();
        let cur = graphs.last_mut().unwrap();
        match parts.next() {
            Some("n") => {
                let n = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| err("expected `n <count>`".into()))?;
                if cur.0.replace(n).is_some() {
                    return Err(err("duplicate `n` line".into()));
                }
            }
            Some("e") => {
                let mut num = || {
                    parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err("expected `e <u> <v>`".into()))
                };
                let u = num()?;
                let v = num()?;
                cur.1.push((u, v));
            }
            _ => return Err(err(format!("unrecognised directive `{line}`"))),
        }
    }
    if graphs.len() != 2 {
        return Err(Error::Parse { line: 0, msg: format!("expected 2 graphs, found {}", graphs.len()) });
    }
    let build = |(n, edges): &(Option<usize>, Vec<(usize, usize)>)| -> Result<Graph> {
        let n = n.ok_or(Error::Parse { line: 0, msg: "graph missing `n` line".into() })?;
        Graph::new(n, edges)
    };
    Ok((build(&graphs[0])?, build(&graphs[1])?))
}

/// Load a two-graph file from disk.
pub fn load_graph_pair(path: &std::path::Path) -> Result<(Graph, Graph)> {
    parse_graph_pair(&std::fs::read_to_string(path)?)
}

/// The 4-cycle `0-1-2-3-0`.
pub fn cycle4() -> Graph {
    Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
}

/// A relabeled 4-cycle (`0-2-1-3-0`), isomorphic to [`cycle4`].
pub fn cycle4_relabeled() -> Graph {
    Graph::new(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap()
}

/// The path `0-1-2-3`, not isomorphic to a 4-cycle.
pub fn path4() -> Graph {
    Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Probability;
    use crate::protocol::{
        measure_error_profile_nizk, measure_error_profile_pc, nizk_sim_distribution,
    };
    use num::{BigInt, One, Zero};

    fn prob(num: u64, den: u64) -> Probability {
        Probability::new(Rat::new(BigInt::from(num), BigInt::from(den))).unwrap()
    }

    fn profile(c: (u64, u64), s: (u64, u64), z: (u64, u64), m: u32, lz: u32) -> DialProfile {
        DialProfile::new(prob(c.0, c.1), prob(s.0, s.1), prob(z.0, z.1), m, lz, 0xd1a1).unwrap()
    }

    #[test]
    fn dial_nizk_measures_exactly_what_was_requested() {
        for (c, s, z, m, lz) in [
            ((1, 16), (1, 8), (1, 4), 4, 2),
            ((0, 1), (1, 2), (0, 1), 3, 1),
            ((3, 8), (5, 8), (7, 8), 5, 3),
        ] {
            let p = profile(c, s, z, m, lz);
            let spec = make_dial_nizk(&p, 4, 8).unwrap();
            let (yes, w, no) = dial_instances(4);
            let measured = measure_error_profile_nizk(&spec, &yes, &w, &no).unwrap();
            assert_eq!(measured.completeness, p.eps_c);
            assert_eq!(measured.soundness, p.eps_s);
            assert_eq!(measured.zk, p.eps_z);
        }
    }

    #[test]
    fn simulated_runs_reject_with_the_composed_probability() {
        // A simulated transcript is rejected when the CRS falls in the
        // completeness-failure region or the tag was corrupted; the regions
        // are independent, so Pr[reject] = eps_c + eps_z * (1 - eps_c).
        let p = profile((1, 16), (1, 8), (1, 4), 4, 2);
        let spec = make_dial_nizk(&p, 4, 8).unwrap();
        let (yes, _, _) = dial_instances(4);
        let sim = nizk_sim_distribution(&spec, &yes).unwrap();
        let reject = sim.expectation(|(crs, proof)| {
            if (spec.verifier)(&yes, crs, proof, &BitString::empty()) {
                Rat::zero()
            } else {
                Rat::one()
            }
        });
        let (c, z) = (p.eps_c.rat(), p.eps_z.rat());
        assert_eq!(reject, c + z * (Rat::one() - c));
    }

    #[test]
    fn noisy_dial_flips_the_verdict_with_the_requested_rate() {
        // 2-bit verifier coin, threshold 1: flip probability exactly 1/4.
        let p = profile((1, 16), (1, 8), (1, 4), 4, 2);
        let spec = make_dial_nizk_noisy(&p, 4, 8, 2, 1).unwrap();
        let (yes, w, _) = dial_instances(4);
        let comp = crate::protocol::nizk_completeness(&spec, &yes, &w).unwrap();
        // (1 - eps_c)(3/4) + eps_c(1/4) = 3/4 - eps_c/2.
        let expect = Rat::new(BigInt::from(3), BigInt::from(4))
            - p.eps_c.rat() / Rat::from_integer(BigInt::from(2));
        assert_eq!(comp.rat(), &expect);
    }

    #[test]
    fn dial_public_coin_measures_exactly_what_was_requested() {
        let p = profile((1, 16), (1, 8), (1, 4), 4, 2);
        let spec = make_dial_pc(&p, 4, &[2, 2], &[3, 3]).unwrap();
        let (yes, w, no) = dial_instances(4);
        let measured = measure_error_profile_pc(&spec, &yes, &w, &no).unwrap();
        assert_eq!(measured.completeness, p.eps_c);
        assert_eq!(measured.soundness, p.eps_s);
        assert_eq!(measured.zk, p.eps_z);
    }

    #[test]
    fn dial_profile_rejects_off_grid_and_overfull_requests() {
        assert!(DialProfile::new(prob(1, 3), prob(0, 1), prob(0, 1), 4, 2, 0).is_err());
        assert!(DialProfile::new(prob(3, 4), prob(1, 2), prob(0, 1), 4, 2, 0).is_err());
        assert!(DialProfile::new(prob(0, 1), prob(0, 1), prob(1, 8), 4, 2, 0).is_err());
    }

    #[test]
    fn graph_iso_profile_is_perfect_on_isomorphic_pairs() {
        let proto = make_graph_iso(&cycle4(), &cycle4_relabeled()).unwrap();
        let w = proto.witness.expect("the pairs are isomorphic");
        let no_inst = graph_pair_instance(&cycle4(), &path4());
        let measured =
            measure_error_profile_pc(&proto.spec, &proto.instance, &w, &no_inst).unwrap();
        assert!(measured.completeness.rat().is_zero());
        assert_eq!(measured.soundness.rat(), &Rat::new(BigInt::one(), BigInt::from(2)));
        assert!(measured.zk.rat().is_zero());
        // The regime the analysis needs: eps_c + eps_s + (t - 1) eps_z < 1.
        let t = proto.spec.messages as u64;
        let sum = measured.completeness.rat()
            + measured.soundness.rat()
            + Rat::from_integer(BigInt::from(t - 1)) * measured.zk.rat();
        assert!(sum < Rat::one());
    }

    #[test]
    fn permutation_ranks_roundtrip() {
        for n in 1..=5usize {
            for ix in 0..FACTORIAL[n] {
                let p = perm_unrank(n, ix);
                assert_eq!(perm_rank(&p), ix);
            }
        }
    }

    #[test]
    fn composition_matches_sequential_relabeling() {
        let g = path4();
        let a = perm_unrank(4, 17);
        let b = perm_unrank(4, 5);
        assert_eq!(g.apply_perm(&b).apply_perm(&a), g.apply_perm(&perm_compose(&a, &b)));
    }

    #[test]
    fn graph_files_parse_and_reject_malformed_input() {
        let text = "# two squares\nn 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\n--\nn 4\ne 0 2\ne 2 1\ne 1 3\ne 3 0\n";
        let (g0, g1) = parse_graph_pair(text).unwrap();
        assert_eq!(g0, cycle4());
        assert_eq!(g1, cycle4_relabeled());
        assert!(parse_graph_pair("n 4\ne 0 1\n").is_err()); // one graph
        assert!(parse_graph_pair("n 4\nx 1\n--\nn 4\n").is_err()); // bad directive
        assert!(parse_graph_pair("n 4\ne 0 9\n--\nn 4\n").is_err()); // bad endpoint
    }

    #[test]
    fn fixture_pairs_have_the_advertised_isomorphism_status() {
        assert!(cycle4().isomorphism_to(&cycle4_relabeled()).is_some());
        assert!(cycle4().isomorphism_to(&path4()).is_none());
        assert_eq!(cycle4().edge_count(), 4);
        assert_eq!(path4().edge_count(), 3);
    }
}
