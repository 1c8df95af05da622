//! Exact finite probability.
//!
//! Every distribution in this crate is a finitely supported map from
//! outcomes to arbitrary-precision rational masses that sum to exactly 1.
//! Total-variation distance, push-forwards and kernel composition are all
//! computed symbolically; nothing here rounds. Floating point appears only
//! in [`hoeffding_tail`], which summarises a concentration bound, and in
//! report output.
//!
//! Randomness is supplied by [`SeededRng`], a fixed counter-based generator
//! with hierarchical stream derivation: a 64-bit master seed plus a path of
//! labels determines a stream key, and each 64-bit block is a pure function
//! of (key, counter). Identical seeds and paths give identical draws on
//! every platform and regardless of how work is scheduled across threads.

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, ENUM_BUDGET};

/// Arbitrary-precision rational, the mass type for everything exact.
pub type Rat = BigRational;

/// Build a rational from a (numerator, denominator) pair of machine ints.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a rational literal: `a/b`, a decimal integer, or `0.x` is not
/// accepted — configs use fractions so that every bound stays exact.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse { line: 0, msg: format!("bad integer `{s}`") })
    };
    match text.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Parse { line: 0, msg: format!("zero denominator in `{text}`") });
            }
            Ok(Rat::new(parse_int(a)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(text)?)),
    }
}

/// Render a rational as `a/b` (or `a` when integral), the inverse of
/// [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational that is known to lie in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Probability(Rat);

impl Probability {
    pub fn zero() -> Self {
        Probability(Rat::zero())
    }

    pub fn one() -> Self {
        Probability(Rat::one())
    }

    /// Wrap a rational, rejecting anything outside `[0, 1]`.
    pub fn new(r: Rat) -> Result<Self> {
        if r.is_negative() || r > Rat::one() {
            return Err(Error::OutOfRange(format!("probability {} outside [0,1]", format_rat(&r))));
        }
        Ok(Probability(r))
    }

    /// Dyadic probability `num / 2^log_den`.
    pub fn dyadic(num: u64, log_den: u32) -> Result<Self> {
        Self::new(Rat::new(BigInt::from(num), BigInt::from(1u128 << log_den.min(127))))
    }

    pub fn rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rat(&self.0))
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rat(&self.0))
    }
}

/// A bit string with an explicit length (0 to 63 bits) interpreted as the
/// big-endian binary expansion of `value`.
///
/// The empty string (`len == 0`) is a legal message; prover-first protocols
/// use it as the zeroth verifier coin.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: u32,
    value: u64,
}

impl BitString {
    pub const MAX_LEN: u32 = 63;

    pub fn new(len: u32, value: u64) -> Result<Self> {
        if len > Self::MAX_LEN {
            return Err(Error::OutOfRange(format!("bit-string length {len} > {}", Self::MAX_LEN)));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::OutOfRange(format!("value {value} does not fit in {len} bits")));
        }
        Ok(BitString { len, value })
    }

    pub fn empty() -> Self {
        BitString { len: 0, value: 0 }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The big-endian integer interpretation.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit `i`, counting from the most significant end (`i = 0` is the
    /// leading bit).
    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.len, "bit index out of range");
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    /// Concatenation `self || other` (big-endian: `self` supplies the high
    /// bits).
    pub fn concat(&self, other: &BitString) -> Result<Self> {
        BitString::new(self.len + other.len, (self.value << other.len) | other.value)
    }

    /// Split into a prefix of `head_len` bits and the remaining suffix.
    pub fn split(&self, head_len: u32) -> Result<(Self, Self)> {
        if head_len > self.len {
            return Err(Error::OutOfRange(format!(
                "cannot split {head_len} bits off a {}-bit string",
                self.len
            )));
        }
        let tail_len = self.len - head_len;
        let head = BitString { len: head_len, value: self.value >> tail_len };
        let tail = BitString {
            len: tail_len,
            value: self.value & if tail_len == 64 { u64::MAX } else { (1u64 << tail_len) - 1 },
        };
        Ok((head, tail))
    }

    /// The same string with its lowest-order bit flipped.
    pub fn flip_low_bit(&self) -> Result<Self> {
        if self.len == 0 {
            return Err(Error::OutOfRange("cannot flip a bit of the empty string".into()));
        }
        Ok(BitString { len: self.len, value: self.value ^ 1 })
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "ε");
        }
        for i in 0..self.len {
            write!(f, "{}", if self.bit(i) { 1 } else { 0 })?;
        }
        Ok(())
    }
}

/// One component of a canonical outcome: either a bit string or a rational
/// grid point `num/den` in lowest terms (used for empirical estimates that
/// appear in a function's output).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sym {
    Bits(BitString),
    Grid { num: u64, den: u64 },
}

impl Sym {
    /// A grid point, reduced to lowest terms so that equality of symbols is
    /// equality of values (estimates on a coarse grid embed into any finer
    /// grid they also lie on).
    pub fn grid(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::OutOfRange("grid denominator 0".into()));
        }
        if num > den {
            return Err(Error::OutOfRange(format!("grid value {num}/{den} outside [0,1]")));
        }
        let g = num.gcd(&den);
        Ok(Sym::Grid { num: num / g, den: den / g })
    }

    pub fn bit(b: bool) -> Self {
        Sym::Bits(BitString { len: 1, value: b as u64 })
    }
}

/// A canonical protocol-level outcome: a tuple of symbols.
///
/// Outcomes of different shapes are simply distinct values; the canonical
/// byte encoding below is injective, so structural equality coincides with
/// equality of encodings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Outcome(pub Vec<Sym>);

impl Outcome {
    pub fn new(syms: Vec<Sym>) -> Self {
        Outcome(syms)
    }

    pub fn push(&mut self, s: Sym) {
        self.0.push(s);
    }

    /// Canonical length-prefixed byte encoding: each symbol is tagged and
    /// fixed-width, and the tuple is prefixed with its arity.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.0.len() * 17);
        out.extend_from_slice(&(self.0.len() as u32).to_be_bytes());
        for s in &self.0 {
            match s {
                Sym::Bits(b) => {
                    out.push(0x01);
                    out.push(b.len() as u8);
                    out.extend_from_slice(&b.value().to_be_bytes());
                }
                Sym::Grid { num, den } => {
                    out.push(0x02);
                    out.extend_from_slice(&num.to_be_bytes());
                    out.extend_from_slice(&den.to_be_bytes());
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Deterministic counter-based random generator with hierarchical streams.
///
/// A stream is identified by a 256-bit key derived via SHA-256 from the
/// master seed and the path of [`SeededRng::child`] labels that led to it.
/// Block `i` of a stream mixes the key words with the counter through four
/// rounds of the splitmix64 finaliser. Draws are exact: `below(n)` rejects
/// out-of-range blocks rather than taking a biased remainder, and
/// `bernoulli(p)` compares an exact uniform integer against `p`'s
/// numerator.
#[derive(Clone, Debug)]
pub struct SeededRng {
    key: [u64; 4],
    counter: u64,
}

impl SeededRng {
    /// Root stream for a 64-bit master seed.
    pub fn new(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"zkowf/stream/v1");
        h.update(seed.to_be_bytes());
        Self::from_digest(h)
    }

    /// Derive an independent child stream named by `label`. Children of
    /// distinct labels (or of distinct parents) never share blocks.
    pub fn child(&self, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"zkowf/child/v1");
        for w in self.key {
            h.update(w.to_be_bytes());
        }
        h.update(label.as_bytes());
        Self::from_digest(h)
    }

    /// Numeric variant of [`child`](Self::child), convenient for per-trial
    /// streams.
    pub fn child_u64(&self, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"zkowf/child-ix/v1");
        for w in self.key {
            h.update(w.to_be_bytes());
        }
        h.update(index.to_be_bytes());
        Self::from_digest(h)
    }

    fn from_digest(h: Sha256) -> Self {
        let d = h.finalize();
        let mut key = [0u64; 4];
        for (i, k) in key.iter_mut().enumerate() {
            *k = u64::from_be_bytes(d[8 * i..8 * i + 8].try_into().unwrap());
        }
        SeededRng { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        let mut x = c;
        for w in self.key {
            x = splitmix64(x ^ w);
        }
        x
    }

    /// A uniform bit string of the given length.
    pub fn bits(&mut self, len: u32) -> BitString {
        assert!(len <= BitString::MAX_LEN);
        let v = if len == 0 { 0 } else { self.next_u64() >> (64 - len) };
        BitString { len, value: v }
    }

    /// Exact uniform draw from `{0, .., n-1}` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        if n == 1 {
            return 0;
        }
        // Accept blocks below the largest multiple of n to avoid modulo bias.
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Exact uniform draw from `{0, .., n-1}` for big `n`.
    pub fn big_below(&mut self, n: &BigUint) -> BigUint {
        assert!(!n.is_zero());
        if let Some(small) = n.to_u64() {
            return BigUint::from(self.below(small));
        }
        let bits = n.bits();
        let words = bits.div_ceil(64) as usize;
        let top_shift = (64 * words as u64 - bits) as u32;
        loop {
            let mut limbs = vec![0u64; words];
            for l in limbs.iter_mut() {
                *l = self.next_u64();
            }
            limbs[words - 1] >>= top_shift; // keep the draw within one extra bit of n
            let x = BigUint::new(limbs.iter().flat_map(|l| [(*l & 0xffff_ffff) as u32, (*l >> 32) as u32]).collect());
            if &x < n {
                return x;
            }
        }
    }

    /// Exact Bernoulli draw with rational success probability.
    pub fn bernoulli(&mut self, p: &Probability) -> bool {
        let den = p.rat().denom().to_biguint().expect("probability denominators are positive");
        let num = p.rat().numer().to_biguint().expect("probabilities are non-negative");
        self.big_below(&den) < num
    }
}

// ---------------------------------------------------------------------------
// Coin spaces
// ---------------------------------------------------------------------------

/// A finite product of coin components; component `j` ranges over
/// `{0, .., card_j - 1}`.
///
/// Bit-string coins are components of cardinality `2^len`, but components of
/// arbitrary cardinality are allowed so that, e.g., a simulator can draw a
/// uniformly random permutation without rounding its coin space to a power
/// of two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoinSpace(Vec<u64>);

/// A point of a [`CoinSpace`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Coins(pub Vec<u64>);

impl CoinSpace {
    pub fn new(cards: Vec<u64>) -> Result<Self> {
        if cards.iter().any(|&c| c == 0) {
            return Err(Error::OutOfRange("coin component of cardinality 0".into()));
        }
        Ok(CoinSpace(cards))
    }

    /// A single component of `2^len` values.
    pub fn bits(len: u32) -> Self {
        assert!(len <= BitString::MAX_LEN);
        CoinSpace(vec![1u64 << len])
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn concat(&self, other: &CoinSpace) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        CoinSpace(v)
    }

    /// Total number of coin assignments.
    pub fn size(&self) -> u128 {
        self.0.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    pub fn contains(&self, c: &Coins) -> bool {
        c.0.len() == self.0.len() && c.0.iter().zip(&self.0).all(|(&v, &card)| v < card)
    }

    /// Mixed-radix rank of a coin assignment; the canonical (lexicographic)
    /// order on the space.
    pub fn index_of(&self, c: &Coins) -> u128 {
        debug_assert!(self.contains(c));
        self.0.iter().zip(&c.0).fold(0u128, |acc, (&card, &v)| acc * card as u128 + v as u128)
    }

    pub fn from_index(&self, mut ix: u128) -> Coins {
        let mut v = vec![0u64; self.0.len()];
        for (slot, &card) in v.iter_mut().zip(&self.0).rev() {
            *slot = (ix % card as u128) as u64;
            ix /= card as u128;
        }
        debug_assert_eq!(ix, 0);
        Coins(v)
    }

    /// Enumerate the space in canonical order. Fails if the space exceeds
    /// the enumeration budget.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = Coins> + '_> {
        let n = self.size();
        if n > ENUM_BUDGET {
            return Err(Error::Budget { required: n, cap: ENUM_BUDGET });
        }
        Ok((0..n).map(|ix| self.from_index(ix)))
    }

    /// Exact uniform sample.
    pub fn sample(&self, rng: &mut SeededRng) -> Coins {
        Coins(self.0.iter().map(|&card| rng.below(card)).collect())
    }

    /// The uniform distribution over the space.
    pub fn uniform(&self, encoding: &str) -> Result<FiniteDistribution<Coins>> {
        let n = self.size();
        if n > ENUM_BUDGET {
            return Err(Error::Budget { required: n, cap: ENUM_BUDGET });
        }
        let mass = Rat::new(BigInt::one(), BigInt::from(n));
        FiniteDistribution::from_weights(encoding, self.enumerate()?.map(|c| (c, mass.clone())))
    }
}

impl Coins {
    /// Interpret component `j` as a bit string of the given length.
    pub fn bit_component(&self, j: usize, len: u32) -> BitString {
        BitString::new(len, self.0[j]).expect("component exceeds declared bit length")
    }
}

// ---------------------------------------------------------------------------
// Finite distributions
// ---------------------------------------------------------------------------

/// A finitely supported probability distribution with exact rational masses.
///
/// Every distribution carries an `encoding` label naming the outcome space
/// it lives over; operations that compare or mix two distributions insist
/// the labels agree, which catches accidental comparisons of, say, a
/// transcript distribution against a CRS distribution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteDistribution<T: Ord + Clone> {
    encoding: String,
    mass: BTreeMap<T, Rat>,
}

impl<T: Ord + Clone> FiniteDistribution<T> {
    /// Build from weights; zero-mass entries are dropped, masses must be
    /// non-negative and sum to exactly 1.
    pub fn from_weights(
        encoding: &str,
        weights: impl IntoIterator<Item = (T, Rat)>,
    ) -> Result<Self> {
        let mut mass: BTreeMap<T, Rat> = BTreeMap::new();
        let mut total = Rat::zero();
        for (t, w) in weights {
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative mass {}",
                    format_rat(&w)
                )));
            }
            if w.is_zero() {
                continue;
            }
            total += &w;
            *mass.entry(t).or_insert_with(Rat::zero) += w;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {}, not 1",
                format_rat(&total)
            )));
        }
        Ok(FiniteDistribution { encoding: encoding.to_string(), mass })
    }

    /// Normalise non-negative weights with positive total to a distribution.
    pub fn normalised(
        encoding: &str,
        weights: impl IntoIterator<Item = (T, Rat)>,
    ) -> Result<Self> {
        let raw: Vec<(T, Rat)> = weights.into_iter().collect();
        let total: Rat = raw.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_positive() {
            return Err(Error::InvalidDistribution("total weight not positive".into()));
        }
        Self::from_weights(encoding, raw.into_iter().map(|(t, w)| (t, w / &total)))
    }

    /// The point mass at `t`.
    pub fn point(encoding: &str, t: T) -> Self {
        let mut mass = BTreeMap::new();
        mass.insert(t, Rat::one());
        FiniteDistribution { encoding: encoding.to_string(), mass }
    }

    /// Uniform over a non-empty list (repeats accumulate mass).
    pub fn uniform_over(encoding: &str, items: impl IntoIterator<Item = T>) -> Result<Self> {
        let items: Vec<T> = items.into_iter().collect();
        if items.is_empty() {
            return Err(Error::InvalidDistribution("uniform over empty set".into()));
        }
        let w = Rat::new(BigInt::one(), BigInt::from(items.len()));
        Self::from_weights(encoding, items.into_iter().map(|t| (t, w.clone())))
    }

    pub fn encoding(&self) -> &str {
        &self.encoding
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.mass.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rat)> {
        self.mass.iter()
    }

    /// Mass of a single outcome (zero off the support).
    pub fn mass_of(&self, t: &T) -> Rat {
        self.mass.get(t).cloned().unwrap_or_else(Rat::zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.encoding != other.encoding {
            return Err(Error::EncodingMismatch {
                left: self.encoding.clone(),
                right: other.encoding.clone(),
            });
        }
        Ok(())
    }

    /// Exact total-variation (statistical) distance
    /// `(1/2) * sum_u |P(u) - Q(u)|`.
    pub fn stat_distance(&self, other: &Self) -> Result<Probability> {
        self.check_compatible(other)?;
        let mut acc = Rat::zero();
        for (t, p) in &self.mass {
            acc += (p - other.mass_of(t)).abs();
        }
        for (t, q) in &other.mass {
            if !self.mass.contains_key(t) {
                acc += q.abs();
            }
        }
        Probability::new(acc / rat(2, 1))
    }

    /// Push-forward along a deterministic map.
    pub fn push_forward<U: Ord + Clone>(
        &self,
        encoding: &str,
        f: impl Fn(&T) -> U,
    ) -> FiniteDistribution<U> {
        let mut mass: BTreeMap<U, Rat> = BTreeMap::new();
        for (t, p) in &self.mass {
            *mass.entry(f(t)).or_insert_with(Rat::zero) += p;
        }
        FiniteDistribution { encoding: encoding.to_string(), mass }
    }

    /// Push-forward along a randomized map (kernel composition): `f(t)` is
    /// the conditional distribution of the image given `t`.
    pub fn push_forward_kernel<U: Ord + Clone>(
        &self,
        encoding: &str,
        f: impl Fn(&T) -> Result<FiniteDistribution<U>>,
    ) -> Result<FiniteDistribution<U>> {
        let mut mass: BTreeMap<U, Rat> = BTreeMap::new();
        for (t, p) in &self.mass {
            let cond = f(t)?;
            for (u, q) in &cond.mass {
                *mass.entry(u.clone()).or_insert_with(Rat::zero) += p * q;
            }
            if mass.len() as u128 > ENUM_BUDGET {
                return Err(Error::Budget { required: mass.len() as u128, cap: ENUM_BUDGET });
            }
        }
        Ok(FiniteDistribution { encoding: encoding.to_string(), mass })
    }

    /// Exact expectation of a rational-valued statistic.
    pub fn expectation(&self, f: impl Fn(&T) -> Rat) -> Rat {
        self.mass.iter().map(|(t, p)| f(t) * p).sum()
    }

    /// Exact sample: draws a uniform integer below the common denominator
    /// and walks the cumulative numerators.
    pub fn sample(&self, rng: &mut SeededRng) -> &T {
        let den = self
            .mass
            .values()
            .fold(BigUint::one(), |acc, m| acc.lcm(&m.denom().to_biguint().unwrap()));
        let draw = rng.big_below(&den);
        let mut acc = BigUint::zero();
        for (t, m) in &self.mass {
            let scaled = m.numer().to_biguint().unwrap() * (&den / m.denom().to_biguint().unwrap());
            acc += scaled;
            if draw < acc {
                return t;
            }
        }
        unreachable!("masses sum to 1")
    }
}

// ---------------------------------------------------------------------------
// Estimates and tail bounds
// ---------------------------------------------------------------------------

/// An empirical mean: an exact rational value in `[0, 1]` together with the
/// number of samples that produced it. Averages of `q` draws that each lie
/// on a grid with denominator `g` land on the grid with denominator `q * g`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Estimate {
    pub value: Probability,
    pub samples: u64,
}

impl Estimate {
    /// Wrap an exact mean of `samples` draws; rejects values outside `[0, 1]`.
    pub fn new(value: Rat, samples: u64) -> Result<Self> {
        Ok(Estimate { value: Probability::new(value)?, samples })
    }

    /// The estimate as a canonical outcome symbol (reduced grid point).
    pub fn to_sym(&self) -> Result<Sym> {
        let num = self.value.rat().numer().to_u64().ok_or_else(|| {
            Error::OutOfRange("estimate numerator exceeds symbol range".into())
        })?;
        let den = self.value.rat().denom().to_u64().ok_or_else(|| {
            Error::OutOfRange("estimate denominator exceeds symbol range".into())
        })?;
        Sym::grid(num, den)
    }
}

/// Average `q` draws of a `[0, 1]`-valued sampler, exactly.
///
/// Returns [`Error::Contract`] if the sampler ever steps outside `[0, 1]`.
pub fn empirical_mean(
    q: u64,
    rng: &mut SeededRng,
    mut sampler: impl FnMut(&mut SeededRng) -> Rat,
) -> Result<Estimate> {
    assert!(q > 0, "empirical mean needs at least one sample");
    let mut sum = Rat::zero();
    for _ in 0..q {
        let v = sampler(rng);
        if v.is_negative() || v > Rat::one() {
            return Err(Error::Contract(format!(
                "sampler returned {} outside [0,1]",
                format_rat(&v)
            )));
        }
        sum += v;
    }
    Ok(Estimate { value: Probability::new(sum / Rat::from_integer(BigInt::from(q)))?, samples: q })
}

/// Two-sided Hoeffding tail bound for the deviation of an empirical mean of
/// `q` bounded draws: `Pr[|mean - E| > tau] <= 2 * exp(-2 * tau^2 * q)`.
///
/// The bound is reported as-is; it exceeds 1 for small `tau * sqrt(q)`.
pub fn hoeffding_tail(tau: &Rat, q: u64) -> f64 {
    let t = tau.to_f64().unwrap_or(0.0);
    2.0 * (-2.0 * t * t * q as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(encoding: &str, pairs: &[(u64, (i64, i64))]) -> FiniteDistribution<u64> {
        FiniteDistribution::from_weights(
            encoding,
            pairs.iter().map(|&(t, (n, d))| (t, rat(n, d))),
        )
        .unwrap()
    }

    #[test]
    fn stat_distance_matches_hand_computed_values() {
        // Identical distributions are at distance 0.
        let d = dist("t", &[(0, (1, 2)), (1, (1, 2))]);
        assert_eq!(d.stat_distance(&d).unwrap(), Probability::zero());
        // Disjoint point masses are at distance 1.
        let a = FiniteDistribution::point("t", 0u64);
        let b = FiniteDistribution::point("t", 1u64);
        assert_eq!(a.stat_distance(&b).unwrap(), Probability::one());
        // Classic quarter-shift example: (3/4, 1/4) vs (1/4, 3/4) -> 1/2.
        let p = dist("t", &[(0, (3, 4)), (1, (1, 4))]);
        let q = dist("t", &[(0, (1, 4)), (1, (3, 4))]);
        assert_eq!(p.stat_distance(&q).unwrap().rat(), &rat(1, 2));
    }

    #[test]
    fn stat_distance_rejects_mismatched_encodings() {
        let a = FiniteDistribution::point("left", 0u64);
        let b = FiniteDistribution::point("right", 0u64);
        assert!(matches!(a.stat_distance(&b), Err(Error::EncodingMismatch { .. })));
    }

    #[test]
    fn distribution_constructor_enforces_total_mass() {
        let bad = FiniteDistribution::from_weights("t", [(0u64, rat(1, 2))]);
        assert!(matches!(bad, Err(Error::InvalidDistribution(_))));
        let neg = FiniteDistribution::from_weights("t", [(0u64, rat(-1, 2)), (1, rat(3, 2))]);
        assert!(matches!(neg, Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn push_forward_merges_fibres() {
        let d = dist("t", &[(0, (1, 4)), (1, (1, 4)), (2, (1, 2))]);
        let img = d.push_forward("parity", |t| t % 2);
        assert_eq!(img.mass_of(&0), rat(3, 4));
        assert_eq!(img.mass_of(&1), rat(1, 4));
    }

    #[test]
    fn kernel_composition_is_exact() {
        // Uniform bit, then flip with probability 1/4: Pr[1] = 1/2 exactly.
        let d = dist("t", &[(0, (1, 2)), (1, (1, 2))]);
        let out = d
            .push_forward_kernel("t", |&t| {
                FiniteDistribution::from_weights(
                    "t",
                    [(t, rat(3, 4)), (1 - t, rat(1, 4))],
                )
            })
            .unwrap();
        assert_eq!(out.mass_of(&1), rat(1, 2));
    }

    #[test]
    fn sampling_follows_exact_masses() {
        let d = dist("t", &[(0, (1, 8)), (1, (7, 8))]);
        let mut rng = SeededRng::new(7);
        let n = 8192;
        let ones = (0..n).filter(|_| *d.sample(&mut rng) == 1).count();
        // Hoeffding: deviation above 1/16 of the mean has mass ~2e-57.
        assert!((ones as f64 / n as f64 - 0.875).abs() < 0.0625);
    }

    #[test]
    fn seeded_rng_is_deterministic_and_streams_are_independent() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        assert_eq!(a.next_u64(), b.next_u64());
        let mut c1 = SeededRng::new(42).child("x");
        let mut c2 = SeededRng::new(42).child("y");
        assert_ne!(c1.next_u64(), c2.next_u64());
        // Child streams are insensitive to how much the parent has drawn.
        let mut parent = SeededRng::new(42);
        parent.next_u64();
        let mut c3 = parent.child("x");
        let mut c4 = SeededRng::new(42).child("x");
        assert_eq!(c3.next_u64(), c4.next_u64());
    }

    #[test]
    fn rejection_sampling_is_unbiased_over_small_ranges() {
        let mut rng = SeededRng::new(3);
        let mut counts = [0u32; 3];
        for _ in 0..9000 {
            counts[rng.below(3) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 3000.0).abs() < 300.0);
        }
    }

    #[test]
    fn coin_space_roundtrips_indices() {
        let space = CoinSpace::new(vec![3, 2, 5]).unwrap();
        assert_eq!(space.size(), 30);
        for ix in 0..30u128 {
            let c = space.from_index(ix);
            assert!(space.contains(&c));
            assert_eq!(space.index_of(&c), ix);
        }
    }

    #[test]
    fn empirical_mean_stays_on_the_sample_grid() {
        let mut rng = SeededRng::new(1);
        // Constant-1 sampler: mean is exactly 1.
        let e = empirical_mean(64, &mut rng, |_| Rat::one()).unwrap();
        assert_eq!(e.value, Probability::one());
        // A 0/1 sampler lands on the grid with denominator q.
        let e = empirical_mean(64, &mut rng, |r| Rat::from_integer(BigInt::from(r.below(2)))).unwrap();
        assert!((e.value.rat() * rat(64, 1)).is_integer());
    }

    #[test]
    fn empirical_mean_rejects_out_of_range_samplers() {
        let mut rng = SeededRng::new(1);
        let e = empirical_mean(4, &mut rng, |_| rat(3, 2));
        assert!(matches!(e, Err(Error::Contract(_))));
    }

    #[test]
    fn hoeffding_tail_reference_values() {
        // tau = 0 gives the vacuous bound 2.
        assert_eq!(hoeffding_tail(&rat(0, 1), 100), 2.0);
        // tau = 1/8, q = 1024: 2 * exp(-32).
        let v = hoeffding_tail(&rat(1, 8), 1024);
        assert!((v - 2.0 * (-32.0f64).exp()).abs() < 1e-18);
        // tau = 1/8, q = 64: 2 * exp(-2) ~ 0.2707.
        let v = hoeffding_tail(&rat(1, 8), 64);
        assert!((v - 0.270_670_566_473_225_4).abs() < 1e-12);
    }

    #[test]
    fn grid_symbols_reduce_to_lowest_terms() {
        assert_eq!(Sym::grid(8, 16).unwrap(), Sym::grid(1, 2).unwrap());
        assert_eq!(Sym::grid(0, 7).unwrap(), Sym::grid(0, 3).unwrap());
        assert!(Sym::grid(5, 4).is_err());
    }

    #[test]
    fn bitstring_concat_and_split_are_inverse() {
        let a = BitString::new(3, 0b101).unwrap();
        let b = BitString::new(2, 0b01).unwrap();
        let c = a.concat(&b).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.value(), 0b10101);
        let (h, t) = c.split(3).unwrap();
        assert_eq!((h, t), (a, b));
    }

    #[test]
    fn rational_literals_roundtrip() {
        for s in ["1/16", "0", "3", "7/8"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_err());
    }
}

/// Convenience alias used across modules for shared closures.
pub type DynPredicate = Arc<dyn Fn(&BitString) -> bool + Send + Sync>;
