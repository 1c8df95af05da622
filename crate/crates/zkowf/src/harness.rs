//! Experiment harness: text configs, experiment runners, bound checks, and
//! bit-stable reports.
//!
//! A config is a list of `key = value` lines with `#` comments; parsing is
//! lossless, so a config can be echoed back byte for byte. Every experiment
//! is a pure function of `(config, seed)`: all randomness flows through one
//! seeded generator, and results can be archived under a content address
//! derived from exactly those two inputs.
//!
//! The runners never trust requested error parameters: each experiment
//! re-measures the protocol it builds (exact completeness, exhaustive
//! soundness, exact simulation distance) and derives its acceptance bounds
//! from the measured figures. A result's verdict is `bound-violated` only
//! when a claim fails by more than the reported sampling radius.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::candidates::{
    cr_candidate, nizk_candidate, pc_candidate, rv_candidate, CrCandidate, CrContext,
    NizkCandidate, PcCandidate, ReductionParams, RvCandidate,
};
use crate::dist::{
    hoeffding_tail, parse_rat, BitString, Probability, Rat, SeededRng, Sym,
};
use crate::inverters::{DeviationMethod, Inverter};
use crate::protocol::{
    measure_error_profile_nizk, measure_error_profile_pc, nizk_best_prover_value,
    pc_best_prover_value, ErrorProfile, NizkSpec, PublicCoinSpec,
};
use crate::reductions::{
    b_value_sampled, cr_reduce, nizk_accept_exact, nizk_reduce, one_sided_decider,
    pc_accept_exact, pc_reduce, rv_reduce,
};
use crate::zoo::{
    dial_instances, graph_pair_instance, load_graph_pair, make_dial_nizk, make_dial_nizk_noisy,
    make_dial_pc, make_graph_iso, DialProfile,
};
use crate::{Error, Result};
use num::{BigInt, One, ToPrimitive, Zero};

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

/// One line of a config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigEntry {
    Pair { key: String, value: String },
    Comment(String),
    Blank,
}

/// An ordered `key = value` document. Parsing keeps comments and blank
/// lines, so [`ExperimentConfig::to_text`] reproduces the input exactly.
#[derive(Clone, Debug, Default)]
pub struct ExperimentConfig {
    entries: Vec<ConfigEntry>,
    /// Directory that relative file references resolve against.
    base: Option<PathBuf>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || ".-_".contains(c))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (ix, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() {
                entries.push(ConfigEntry::Blank);
            } else if let Some(rest) = line.trim_start().strip_prefix('#') {
                entries.push(ConfigEntry::Comment(rest.to_string()));
            } else if let Some((key, value)) = line.split_once('=') {
                let key = key.trim().to_string();
                if !valid_key(&key) {
                    return Err(Error::Parse { line: ix + 1, msg: format!("bad key `{key}`") });
                }
                entries.push(ConfigEntry::Pair { key, value: value.trim().to_string() });
            } else {
                return Err(Error::Parse {
                    line: ix + 1,
                    msg: "expected `key = value`, a comment, or a blank line".into(),
                });
            }
        }
        Ok(ExperimentConfig { entries, base: None })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// The document, byte for byte as parsed (modulo `set` edits).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            match e {
                ConfigEntry::Pair { key, value } => {
                    let _ = writeln!(out, "{key} = {value}");
                }
                ConfigEntry::Comment(c) => {
                    let _ = writeln!(out, "#{c}");
                }
                ConfigEntry::Blank => out.push('\n'),
            }
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find_map(|e| match e {
            ConfigEntry::Pair { key: k, value } if k == key => Some(value.as_str()),
            _ => None,
        })
    }

    /// Replace the last binding of `key`, or append one.
    pub fn set(&mut self, key: &str, value: &str) {
        for e in self.entries.iter_mut().rev() {
            if let ConfigEntry::Pair { key: k, value: v } = e {
                if k == key {
                    *v = value.to_string();
                    return;
                }
            }
        }
        self.entries.push(ConfigEntry::Pair { key: key.to_string(), value: value.to_string() });
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing key `{key}`") })
    }

    pub fn rat(&self, key: &str) -> Result<Rat> {
        parse_rat(self.require(key)?)
    }

    pub fn prob(&self, key: &str) -> Result<Probability> {
        Probability::new(self.rat(key)?)
    }

    pub fn u64_(&self, key: &str) -> Result<u64> {
        self.require(key)?
            .parse()
            .map_err(|_| Error::Parse { line: 0, msg: format!("`{key}` is not an integer") })
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            Some(_) => self.u64_(key),
            None => Ok(default),
        }
    }

    pub fn u32_(&self, key: &str) -> Result<u32> {
        Ok(self.u64_(key)? as u32)
    }

    fn u32_list(&self, key: &str) -> Result<Vec<u32>> {
        self.require(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse { line: 0, msg: format!("bad list in `{key}`") })
            })
            .collect()
    }

    fn path(&self, key: &str) -> Result<PathBuf> {
        let p = PathBuf::from(self.require(key)?);
        Ok(match (&self.base, p.is_relative()) {
            (Some(base), true) => base.join(p),
            _ => p,
        })
    }

    pub fn mode(&self) -> Result<Mode> {
        match self.get("mode").unwrap_or("sampled") {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            other => Err(Error::Parse { line: 0, msg: format!("unknown mode `{other}`") }),
        }
    }

    pub fn trials(&self) -> Result<u64> {
        self.u64_or("trials.n", 10_000)
    }
}

/// Whether an experiment computes probabilities exactly or by sampling.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Exact,
    Sampled,
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// How a checked quantity relates to its bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    AtMost,
    AtLeast,
    Equals,
}

/// One claim checked by an experiment. For exact checks the rational
/// strings are authoritative and the floats are renderings; for sampled
/// checks the bound already includes the sampling radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub direction: Direction,
    pub exact: bool,
    pub holds: bool,
    pub value_exact: Option<String>,
    pub bound_exact: Option<String>,
}

impl BoundCheck {
    fn exact(name: &str, value: &Rat, bound: &Rat, direction: Direction) -> Self {
        let holds = match direction {
            Direction::AtMost => value <= bound,
            Direction::AtLeast => value >= bound,
            Direction::Equals => value == bound,
        };
        BoundCheck {
            name: name.to_string(),
            value: value.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
            direction,
            exact: true,
            holds,
            value_exact: Some(crate::dist::format_rat(value)),
            bound_exact: Some(crate::dist::format_rat(bound)),
        }
    }

    fn sampled(name: &str, value: f64, bound: f64, direction: Direction) -> Self {
        let holds = match direction {
            Direction::AtMost => value <= bound,
            Direction::AtLeast => value >= bound,
            Direction::Equals => value == bound,
        };
        BoundCheck {
            name: name.to_string(),
            value,
            bound,
            direction,
            exact: false,
            holds,
            value_exact: None,
            bound_exact: None,
        }
    }
}

/// Measured protocol errors, rendered for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileReport {
    pub completeness: String,
    pub soundness: String,
    pub zk: String,
    pub completeness_f64: f64,
    pub soundness_f64: f64,
    pub zk_f64: f64,
}

impl ProfileReport {
    fn from(p: &ErrorProfile) -> Self {
        ProfileReport {
            completeness: format!("{}", p.completeness),
            soundness: format!("{}", p.soundness),
            zk: format!("{}", p.zk),
            completeness_f64: p.completeness.to_f64(),
            soundness_f64: p.soundness.to_f64(),
            zk_f64: p.zk.to_f64(),
        }
    }
}

/// Overall outcome of an experiment.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundHolds,
    BoundViolated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::BoundHolds => "bound-holds",
            Verdict::BoundViolated => "bound-violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Everything an experiment reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub verdict: Verdict,
    pub seed: u64,
    pub bounds: Vec<BoundCheck>,
    pub profile: Option<ProfileReport>,
    /// Free-form `(name, value)` terms backing the bound arithmetic.
    pub details: Vec<(String, String)>,
    pub config: String,
}

fn verdict_of(bounds: &[BoundCheck]) -> Verdict {
    if bounds.is_empty() {
        Verdict::Inconclusive
    } else if bounds.iter().all(|b| b.holds) {
        Verdict::BoundHolds
    } else {
        Verdict::BoundViolated
    }
}

/// Content address of a `(config, seed)` pair: 16 hex digits of a SHA-256.
pub fn content_address(config_text: &str, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(config_text.as_bytes());
    h.update(seed.to_le_bytes());
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Archive a result under its content address inside `out_dir`; returns the
/// directory written.
pub fn archive_result(out_dir: &Path, result: &ExperimentResult) -> Result<PathBuf> {
    let dir = out_dir.join(content_address(&result.config, result.seed));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("result.json"), emit_report(result, ReportFormat::Json)?)?;
    std::fs::write(dir.join("config.cfg"), &result.config)?;
    Ok(dir)
}

/// Output shape of [`emit_report`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(Error::Parse { line: 0, msg: format!("unknown format `{other}`") }),
        }
    }
}

/// Render a result. JSON is the archival format; CSV has one row per bound
/// check; the table is for terminals. All three are deterministic functions
/// of the result.
pub fn emit_report(result: &ExperimentResult, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(result)
                .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut out = String::from("check,value,bound,direction,exact,holds\n");
            for b in &result.bounds {
                let dir = match b.direction {
                    Direction::AtMost => "at-most",
                    Direction::AtLeast => "at-least",
                    Direction::Equals => "equals",
                };
                let _ = writeln!(
                    out,
                    "{},{:.9},{:.9},{},{},{}",
                    b.name, b.value, b.bound, dir, b.exact, b.holds
                );
            }
            Ok(out)
        }
        ReportFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "experiment: {}", result.experiment);
            let _ = writeln!(out, "verdict:    {}", result.verdict);
            let _ = writeln!(out, "seed:       {}", result.seed);
            if let Some(p) = &result.profile {
                let _ = writeln!(
                    out,
                    "profile:    eps_c = {}  eps_s = {}  eps_z = {}",
                    p.completeness, p.soundness, p.zk
                );
            }
            if !result.bounds.is_empty() {
                let _ = writeln!(out, "{:<44} {:>12} {:>12}  ok", "check", "value", "bound");
                for b in &result.bounds {
                    let rel = match b.direction {
                        Direction::AtMost => "<=",
                        Direction::AtLeast => ">=",
                        Direction::Equals => "==",
                    };
                    let _ = writeln!(
                        out,
                        "{:<44} {:>12.6} {rel} {:>9.6}  {}",
                        b.name,
                        b.value,
                        b.bound,
                        if b.holds { "yes" } else { "NO" }
                    );
                }
            }
            for (k, v) in &result.details {
                let _ = writeln!(out, "  {k} = {v}");
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Protocol construction from configs
// ---------------------------------------------------------------------------

enum Proto {
    Nizk { spec: Arc<NizkSpec>, yes: BitString, w: BitString, no: BitString },
    Pc { spec: Arc<PublicCoinSpec>, yes: Option<(BitString, BitString)>, no: Option<BitString> },
}

fn build_dial_profile(cfg: &ExperimentConfig) -> Result<DialProfile> {
    DialProfile::new(
        cfg.prob("protocol.eps_c")?,
        cfg.prob("protocol.eps_s")?,
        cfg.prob("protocol.eps_z")?,
        cfg.u32_("protocol.crs_len")?,
        cfg.u32_("protocol.sim_corrupt_len")?,
        cfg.u64_or("protocol.tag_seed", 0xd1a1)?,
    )
}

fn build_protocol(cfg: &ExperimentConfig) -> Result<Proto> {
    let kind = cfg.require("protocol.kind")?;
    match kind {
        "dial-nizk" | "dial-nizk-noisy" => {
            let profile = build_dial_profile(cfg)?;
            let instance_len = cfg.u64_or("protocol.instance_len", 4)? as u32;
            let proof_len = cfg.u64_or("protocol.proof_len", 8)? as u32;
            let spec = if kind == "dial-nizk" {
                make_dial_nizk(&profile, instance_len, proof_len)?
            } else {
                make_dial_nizk_noisy(
                    &profile,
                    instance_len,
                    proof_len,
                    cfg.u32_("protocol.flip_coin_len")?,
                    cfg.u64_("protocol.flip_threshold")?,
                )?
            };
            let (yes, w, no) = dial_instances(instance_len);
            Ok(Proto::Nizk { spec, yes, w, no })
        }
        "dial-pc" => {
            let profile = build_dial_profile(cfg)?;
            let spec = make_dial_pc(
                &profile,
                cfg.u64_or("protocol.instance_len", 4)? as u32,
                &cfg.u32_list("protocol.coin_lens")?,
                &cfg.u32_list("protocol.proof_lens")?,
            )?;
            let (yes, w, no) = dial_instances(spec.instance_len);
            Ok(Proto::Pc { spec, yes: Some((yes, w)), no: Some(no) })
        }
        "graph-iso" => {
            let (g0, g1) = load_graph_pair(&cfg.path("protocol.graphs")?)?;
            let proto = make_graph_iso(&g0, &g1)?;
            let yes = proto.witness.as_ref().map(|w| (proto.instance, *w));
            let mut no = if proto.witness.is_none() { Some(proto.instance) } else { None };
            if cfg.get("protocol.graphs_no").is_some() {
                let (h0, h1) = load_graph_pair(&cfg.path("protocol.graphs_no")?)?;
                if h0.order() != g0.order() {
                    return Err(Error::Contract("graph pairs must share an order".into()));
                }
                no = Some(graph_pair_instance(&h0, &h1));
            }
            Ok(Proto::Pc { spec: proto.spec, yes, no })
        }
        other => Err(Error::Parse { line: 0, msg: format!("unknown protocol kind `{other}`") }),
    }
}

/// Which arm of the language an experiment runs on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Arm {
    Yes,
    No,
}

fn arm(cfg: &ExperimentConfig) -> Result<Arm> {
    match cfg.get("instance.arm").unwrap_or("yes") {
        "yes" => Ok(Arm::Yes),
        "no" => Ok(Arm::No),
        other => Err(Error::Parse { line: 0, msg: format!("unknown arm `{other}`") }),
    }
}

fn params(cfg: &ExperimentConfig) -> Result<ReductionParams> {
    let p = cfg.u64_or("params.p", 8)?;
    let q = cfg.u64_or("params.q", 16)?;
    let tau = match cfg.get("params.tau") {
        Some(_) => cfg.prob("params.tau")?,
        None => Probability::new(Rat::new(BigInt::one(), BigInt::from(p)))?,
    };
    Ok(ReductionParams::custom(p, q, tau))
}

// Conservative standard deviation of a [0,1] sample mean.
fn sigma(n: u64) -> f64 {
    0.5 / (n as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Candidates and inverters from configs
// ---------------------------------------------------------------------------

enum Candidate {
    Nizk(NizkCandidate),
    Pc(PcCandidate),
    Rv(Arc<RvCandidate>),
}

impl Candidate {
    fn func(&self) -> &Arc<crate::candidates::CandidateFunction> {
        match self {
            Candidate::Nizk(c) => &c.func,
            Candidate::Pc(c) => &c.func,
            Candidate::Rv(c) => &c.func,
        }
    }
}

fn build_candidate(cfg: &ExperimentConfig, proto: &Proto, which: Arm) -> Result<Candidate> {
    match proto {
        Proto::Nizk { spec, yes, no, .. } => {
            let x = if which == Arm::Yes { yes } else { no };
            if spec.verifier_coin_len > 0 {
                Ok(Candidate::Rv(Arc::new(rv_candidate(spec, x, params(cfg)?.q)?)))
            } else {
                Ok(Candidate::Nizk(nizk_candidate(spec, x)?))
            }
        }
        Proto::Pc { spec, yes, no } => {
            let x = match which {
                Arm::Yes => {
                    &yes.as_ref()
                        .ok_or_else(|| Error::Contract("no yes-instance available".into()))?
                        .0
                }
                Arm::No => {
                    no.as_ref().ok_or_else(|| Error::Contract("no no-instance available".into()))?
                }
            };
            Ok(Candidate::Pc(pc_candidate(spec, x)?))
        }
    }
}

/// Build a table-style oracle (canonical / distributional / noisy) for a
/// candidate function.
fn build_table_inverter(
    cfg: &ExperimentConfig,
    func: &crate::candidates::CandidateFunction,
) -> Result<Arc<Inverter>> {
    let kind = cfg.get("inverter.kind").unwrap_or("distributional");
    let base = |name: &str| -> Result<Arc<Inverter>> {
        match name {
            "canonical" => Ok(Arc::new(Inverter::canonical(func)?)),
            "distributional" => Ok(Arc::new(Inverter::distributional(func)?)),
            other => {
                Err(Error::Parse { line: 0, msg: format!("unknown inverter kind `{other}`") })
            }
        }
    };
    match kind {
        "noisy" => {
            let inner = base(cfg.get("inverter.base").unwrap_or("distributional"))?;
            Ok(Arc::new(Inverter::noisy(inner, &func.domain, cfg.prob("inverter.delta")?)))
        }
        other => base(other),
    }
}

/// The recursive-oracle stack for a public-coin protocol: one oracle per
/// level, level 1 conditional (unless the protocol has a single round),
/// deeper levels table oracles over the level candidates.
struct CrStack {
    params: ReductionParams,
    inverters: Vec<Arc<Inverter>>,
    level1: Option<Arc<CrCandidate>>,
}

fn build_cr_stack(
    cfg: &ExperimentConfig,
    spec: &Arc<PublicCoinSpec>,
    x: &BitString,
) -> Result<CrStack> {
    let params = params(cfg)?;
    let k = spec.rounds;
    let table_kind = cfg.get("inverter.base").unwrap_or("canonical");
    let retry_cap = cfg.u64_or("inverter.retry_cap", 4096)?;
    let mut inverters: Vec<Arc<Inverter>> = Vec::new();
    let mut level1 = None;
    // Build bottom-up: level i needs the oracles below it.
    for i in (1..=k).rev() {
        let ctx = CrContext::new(spec, x, &params, i, inverters.clone())?;
        let cand = Arc::new(cr_candidate(ctx)?);
        let inv = if i == 1 && k > 1 {
            level1 = Some(Arc::clone(&cand));
            Arc::new(Inverter::conditional(Arc::clone(&cand), retry_cap)?)
        } else {
            match table_kind {
                "canonical" => Arc::new(Inverter::canonical(&cand.func)?),
                "distributional" => Arc::new(Inverter::distributional(&cand.func)?),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown table oracle `{other}`"),
                    })
                }
            }
        };
        inverters.insert(0, inv);
    }
    Ok(CrStack { params, inverters, level1 })
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

/// Run the experiment a config describes. Every probability in the result
/// is either exact or carries its sampling radius inside the bound.
pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentResult> {
    let kind = cfg.require("experiment.kind")?;
    let mut rng = SeededRng::new(seed).child("experiment");
    let mut result = match kind {
        "measure" => run_measure(cfg)?,
        "construct" => run_construct(cfg, &mut rng)?,
        "invert" => run_invert(cfg, &mut rng)?,
        "reduce" => run_reduce(cfg, &mut rng)?,
        "decide" => run_decide(cfg, &mut rng)?,
        other => {
            return Err(Error::Parse { line: 0, msg: format!("unknown experiment `{other}`") })
        }
    };
    result.seed = seed;
    result.config = cfg.to_text();
    Ok(result)
}

fn empty_result(kind: &str) -> ExperimentResult {
    ExperimentResult {
        experiment: kind.to_string(),
        verdict: Verdict::Inconclusive,
        seed: 0,
        bounds: Vec::new(),
        profile: None,
        details: Vec::new(),
        config: String::new(),
    }
}

fn measure_profile(proto: &Proto) -> Result<ErrorProfile> {
    match proto {
        Proto::Nizk { spec, yes, w, no } => measure_error_profile_nizk(spec, yes, w, no),
        Proto::Pc { spec, yes, no } => {
            let (x, w) =
                yes.as_ref().ok_or_else(|| Error::Contract("no yes-instance to measure".into()))?;
            let n = no.as_ref().ok_or_else(|| Error::Contract("no no-instance to measure".into()))?;
            measure_error_profile_pc(spec, x, w, n)
        }
    }
}

/// Exhaustive soundness on the no-instance only (the piece a no-arm bound
/// needs when no yes-instance exists).
fn measure_soundness(proto: &Proto) -> Result<Probability> {
    match proto {
        Proto::Nizk { spec, no, .. } => nizk_best_prover_value(spec, no),
        Proto::Pc { spec, no, .. } => {
            let n = no.as_ref().ok_or_else(|| Error::Contract("no no-instance".into()))?;
            pc_best_prover_value(spec, n)
        }
    }
}

fn run_measure(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let proto = build_protocol(cfg)?;
    let profile = measure_profile(&proto)?;
    let mut res = empty_result("measure");
    res.profile = Some(ProfileReport::from(&profile));

    match cfg.require("protocol.kind")? {
        "dial-nizk" | "dial-nizk-noisy" | "dial-pc" => {
            // The dial family must measure exactly what was requested. For
            // a randomized verifier, the requested dial errors compose with
            // the flip rate.
            let (rc, rs, rz) = (
                cfg.rat("protocol.eps_c")?,
                cfg.rat("protocol.eps_s")?,
                cfg.rat("protocol.eps_z")?,
            );
            let (ec, es) = if cfg.require("protocol.kind")? == "dial-nizk-noisy" {
                let flip = Rat::new(
                    BigInt::from(cfg.u64_("protocol.flip_threshold")?),
                    BigInt::from(1u64 << cfg.u32_("protocol.flip_coin_len")?),
                );
                let keep = Rat::one() - &flip;
                // Honest rejection flips; best-prover acceptance flips too.
                (&rc * &keep + (Rat::one() - &rc) * &flip, &rs * &keep + (Rat::one() - &rs) * &flip)
            } else {
                (rc, rs)
            };
            res.bounds.push(BoundCheck::exact(
                "measured-eps-c-equals-request",
                profile.completeness.rat(),
                &ec,
                Direction::Equals,
            ));
            res.bounds.push(BoundCheck::exact(
                "measured-eps-s-equals-request",
                profile.soundness.rat(),
                &es,
                Direction::Equals,
            ));
            res.bounds.push(BoundCheck::exact(
                "measured-eps-z-equals-request",
                profile.zk.rat(),
                &rz,
                Direction::Equals,
            ));
        }
        _ => {
            // The analysable regime: errors leave room below 1.
            let t = match &proto {
                Proto::Pc { spec, .. } => spec.messages as u64,
                Proto::Nizk { .. } => 2,
            };
            let sum = profile.completeness.rat()
                + profile.soundness.rat()
                + Rat::from_integer(BigInt::from(t - 1)) * profile.zk.rat();
            res.bounds.push(BoundCheck::exact(
                "error-budget-below-one",
                &sum,
                &Rat::one(),
                Direction::AtMost,
            ));
        }
    }
    res.verdict = verdict_of(&res.bounds);
    Ok(res)
}

fn run_construct(cfg: &ExperimentConfig, rng: &mut SeededRng) -> Result<ExperimentResult> {
    let proto = build_protocol(cfg)?;
    let cand = build_candidate(cfg, &proto, arm(cfg)?)?;
    let func = cand.func();
    let mut res = empty_result("construct");
    res.details.push(("label".into(), func.label.clone()));
    res.details.push(("domain-size".into(), func.domain.size().to_string()));

    // Shape check: enumerate if affordable, otherwise sample.
    let q_grid = match &cand {
        Candidate::Rv(c) => Some(c.q),
        _ => None,
    };
    let inputs: Vec<crate::dist::Coins> = if func.domain.size() <= 1u128 << 14 {
        func.domain.enumerate()?.collect()
    } else {
        (0..cfg.trials()?.min(4096)).map(|_| func.domain.sample(rng)).collect()
    };
    let total = inputs.len() as u64;
    let ok = inputs
        .iter()
        .filter(|c| {
            let out = func.eval(c);
            match out.0.last() {
                Some(Sym::Bits(b)) => b.len() == 1,
                Some(Sym::Grid { den, .. }) => q_grid.map_or(true, |q| q % den == 0),
                None => false,
            }
        })
        .count() as u64;
    res.bounds.push(BoundCheck::exact(
        "outputs-end-with-verdict-or-grid-estimate",
        &Rat::new(BigInt::from(ok), BigInt::from(total)),
        &Rat::one(),
        Direction::Equals,
    ));
    res.verdict = verdict_of(&res.bounds);
    Ok(res)
}

fn run_invert(cfg: &ExperimentConfig, rng: &mut SeededRng) -> Result<ExperimentResult> {
    let proto = build_protocol(cfg)?;
    let cand = build_candidate(cfg, &proto, arm(cfg)?)?;
    let mut res = empty_result("invert");
    let kind = cfg.get("inverter.kind").unwrap_or("distributional");

    // Structured oracles (conditional / coin-counting) are checked by
    // sampling: success and answer consistency. Table oracles support the
    // exact joint-law measurement.
    match (kind, &cand) {
        ("coin-counting", Candidate::Rv(rv)) => {
            let inv = Inverter::coin_counting(Arc::clone(rv))?;
            sampled_consistency(&mut res, cand.func(), &inv, cfg.trials()?, rng);
        }
        ("conditional", Candidate::Pc(pc)) => {
            let stack = build_cr_stack(cfg, &pc.spec, &pc.x)?;
            let cand1 = stack
                .level1
                .ok_or_else(|| Error::Contract("conditional oracle needs 2+ rounds".into()))?;
            let inv = &stack.inverters[0];
            sampled_consistency(&mut res, &cand1.func, inv, cfg.trials()?, rng);
        }
        _ => {
            let inv = build_table_inverter(cfg, cand.func())?;
            let report = match cfg.mode()? {
                Mode::Exact => crate::inverters::measure_deviation_exact(cand.func(), &inv)?,
                Mode::Sampled => crate::inverters::measure_deviation_sampled(
                    cand.func(),
                    &inv,
                    cfg.trials()?,
                    rng,
                )?,
            };
            let (dev, rad) = match report.method {
                DeviationMethod::Exact => (report.deviation.rat().clone(), None),
                DeviationMethod::MonteCarlo { radius, .. } => {
                    (report.deviation.rat().clone(), Some(radius))
                }
            };
            res.details.push(("success-rate".into(), format!("{}", report.success_rate)));
            res.details.push(("deviation".into(), crate::dist::format_rat(&dev)));
            match (kind, rad) {
                ("distributional", None) => {
                    res.bounds.push(BoundCheck::exact(
                        "distributional-deviation-is-zero",
                        &dev,
                        &Rat::zero(),
                        Direction::Equals,
                    ));
                    res.bounds.push(BoundCheck::exact(
                        "inversion-always-succeeds",
                        report.success_rate.rat(),
                        &Rat::one(),
                        Direction::Equals,
                    ));
                }
                ("canonical", None) => {
                    res.bounds.push(BoundCheck::exact(
                        "inversion-always-succeeds",
                        report.success_rate.rat(),
                        &Rat::one(),
                        Direction::Equals,
                    ));
                }
                ("noisy", None) => {
                    res.bounds.push(BoundCheck::exact(
                        "deviation-at-most-noise-rate",
                        &dev,
                        cfg.prob("inverter.delta")?.rat(),
                        Direction::AtMost,
                    ));
                }
                (_, Some(radius)) => {
                    res.details.push(("radius".into(), format!("{radius}")));
                    let exact =
                        crate::inverters::measure_deviation_exact(cand.func(), &inv)?.deviation;
                    res.bounds.push(BoundCheck::sampled(
                        "sampled-deviation-within-radius-of-exact",
                        (dev.to_f64().unwrap_or(f64::NAN) - exact.to_f64()).abs(),
                        radius,
                        Direction::AtMost,
                    ));
                }
                _ => {}
            }
        }
    }
    res.verdict = verdict_of(&res.bounds);
    Ok(res)
}

/// Sampled check for oracles without enumerable answer laws: every answer
/// must be a true preimage, and the success rate is reported.
fn sampled_consistency(
    res: &mut ExperimentResult,
    func: &crate::candidates::CandidateFunction,
    inv: &Inverter,
    trials: u64,
    rng: &mut SeededRng,
) {
    let mut some = 0u64;
    let mut consistent = 0u64;
    for _ in 0..trials {
        let r = func.domain.sample(rng);
        let y = func.eval(&r);
        if let Some(ans) = inv.answer(&y, rng) {
            some += 1;
            if func.eval(&ans) == y {
                consistent += 1;
            }
        }
    }
    res.details.push(("success-rate".into(), format!("{some}/{trials}")));
    res.bounds.push(BoundCheck::exact(
        "answers-are-true-preimages",
        &Rat::new(BigInt::from(consistent), BigInt::from(some.max(1))),
        &Rat::one(),
        Direction::Equals,
    ));
    res.bounds.push(BoundCheck::sampled(
        "inversion-success-rate",
        some as f64 / trials as f64,
        1.0 - 3.0 * sigma(trials),
        Direction::AtLeast,
    ));
}

/// Failure allowance of an oracle: exact `1 - success` where the answer law
/// is enumerable, otherwise a sampled failure rate on fresh images. A
/// successful structured answer is uniform over the preimage set by
/// construction, so failures are the only deviation source.
fn oracle_failure_term(
    func: &crate::candidates::CandidateFunction,
    inv: &Inverter,
    trials: u64,
    rng: &mut SeededRng,
) -> Result<(f64, String)> {
    match crate::inverters::measure_deviation_exact(func, inv) {
        Ok(report) => Ok((report.deviation.to_f64(), "exact-deviation".into())),
        Err(Error::Unsupported(_)) => {
            let misses = (0..trials)
                .filter(|_| {
                    let r = func.domain.sample(rng);
                    let y = func.eval(&r);
                    !matches!(inv.answer(&y, rng), Some(c) if func.eval(&c) == y)
                })
                .count();
            Ok((misses as f64 / trials as f64 + 3.0 * sigma(trials), "sampled-failure-rate".into()))
        }
        Err(e) => Err(e),
    }
}

fn run_reduce(cfg: &ExperimentConfig, rng: &mut SeededRng) -> Result<ExperimentResult> {
    let proto = build_protocol(cfg)?;
    let which = arm(cfg)?;
    let mode = cfg.mode()?;
    let trials = cfg.trials()?;
    let params = params(cfg)?;
    let mut res = empty_result("reduce");

    let style = match (&proto, cfg.get("experiment.reduction").unwrap_or("direct")) {
        (Proto::Nizk { spec, .. }, _) if spec.verifier_coin_len > 0 => "rv",
        (Proto::Nizk { .. }, _) => "nizk",
        (Proto::Pc { .. }, "recursive") => "cr",
        (Proto::Pc { .. }, _) => "pc",
    };
    res.details.push(("style".into(), style.into()));

    // Measured figures the bounds need.
    let profile_yes = || -> Result<ErrorProfile> { measure_profile(&proto) };

    match style {
        "nizk" => {
            let cand = match build_candidate(cfg, &proto, which)? {
                Candidate::Nizk(c) => c,
                _ => unreachable!("style selection"),
            };
            let inv = build_table_inverter(cfg, &cand.func)?;
            let (value, slack) = match mode {
                Mode::Exact => (nizk_accept_exact(&cand, &inv)?.to_f64(), 0.0),
                Mode::Sampled => {
                    let hits = (0..trials).filter(|_| nizk_reduce(&cand, &inv, rng)).count();
                    (hits as f64 / trials as f64, 3.0 * sigma(trials))
                }
            };
            match which {
                Arm::Yes => {
                    let p = profile_yes()?;
                    res.profile = Some(ProfileReport::from(&p));
                    let failure =
                        1.0 - crate::inverters::measure_deviation_exact(&cand.func, &inv)?
                            .success_rate
                            .to_f64();
                    let bound =
                        1.0 - p.completeness.to_f64() - p.zk.to_f64() - failure - slack;
                    res.details.push(("oracle-failure".into(), format!("{failure}")));
                    res.bounds.push(BoundCheck::sampled(
                        "yes-acceptance-at-least-one-minus-errors",
                        value,
                        bound,
                        Direction::AtLeast,
                    ));
                }
                Arm::No => {
                    let es = measure_soundness(&proto)?;
                    res.bounds.push(BoundCheck::sampled(
                        "no-acceptance-at-most-soundness",
                        value,
                        es.to_f64() + slack,
                        Direction::AtMost,
                    ));
                }
            }
        }
        "pc" => {
            let cand = match build_candidate(cfg, &proto, which)? {
                Candidate::Pc(c) => c,
                _ => unreachable!("style selection"),
            };
            let inv = build_table_inverter(cfg, &cand.func)?;
            let (value, slack) = match mode {
                Mode::Exact => (pc_accept_exact(&cand, &inv)?.to_f64(), 0.0),
                Mode::Sampled => {
                    let hits =
                        (0..trials).filter(|_| pc_reduce(&cand, &inv, rng).unwrap_or(false)).count();
                    (hits as f64 / trials as f64, 3.0 * sigma(trials))
                }
            };
            let k = cand.spec.rounds as f64;
            match which {
                Arm::Yes => {
                    let p = profile_yes()?;
                    res.profile = Some(ProfileReport::from(&p));
                    let bound = 1.0
                        - p.completeness.to_f64()
                        - k * p.zk.to_f64()
                        - k / params.p as f64
                        - slack;
                    res.bounds.push(BoundCheck::sampled(
                        "yes-acceptance-at-least-one-minus-errors",
                        value,
                        bound,
                        Direction::AtLeast,
                    ));
                }
                Arm::No => {
                    let es = measure_soundness(&proto)?;
                    res.bounds.push(BoundCheck::sampled(
                        "no-acceptance-at-most-soundness",
                        value,
                        es.to_f64() + slack,
                        Direction::AtMost,
                    ));
                }
            }
        }
        "cr" => {
            let (spec, x) = match &proto {
                Proto::Pc { spec, yes, no } => {
                    let x = match which {
                        Arm::Yes => {
                            yes.as_ref()
                                .ok_or_else(|| Error::Contract("no yes-instance".into()))?
                                .0
                        }
                        Arm::No => {
                            *no.as_ref().ok_or_else(|| Error::Contract("no no-instance".into()))?
                        }
                    };
                    (Arc::clone(spec), x)
                }
                _ => unreachable!("style selection"),
            };
            let stack = build_cr_stack(cfg, &spec, &x)?;
            let k = spec.rounds as f64;
            let tau = stack.params.tau.to_f64();
            let q = stack.params.q;

            let b = b_value_sampled(&spec, &x, &stack.params, &stack.inverters, trials, rng)?;
            let b_val = b.value.to_f64();
            let hits = (0..trials)
                .filter(|_| cr_reduce(&spec, &x, &stack.params, &stack.inverters, rng).unwrap_or(false))
                .count();
            let acc = hits as f64 / trials as f64;
            let s = (2.0f64).sqrt() * sigma(trials) * 3.0;
            res.details.push(("search-value".into(), format!("{b_val}")));
            res.details.push(("acceptance".into(), format!("{acc}")));
            res.details.push(("tau".into(), format!("{tau}")));
            res.details.push(("hoeffding-tail".into(), format!("{}", hoeffding_tail(stack.params.tau.rat(), q))));

            // The search value tracks the reduction's acceptance.
            res.bounds.push(BoundCheck::sampled(
                "search-value-tracks-acceptance",
                (b_val - acc).abs(),
                2.0 * (k - 1.0) * tau + hoeffding_tail(stack.params.tau.rat(), q) + s,
                Direction::AtMost,
            ));
            match which {
                Arm::Yes => {
                    let p = profile_yes()?;
                    res.profile = Some(ProfileReport::from(&p));
                    // Oracle failure allowance per level.
                    let mut worst = 0.0f64;
                    let mut src = String::new();
                    for (i, inv) in stack.inverters.iter().enumerate() {
                        let ctx = CrContext::new(
                            &spec,
                            &x,
                            &stack.params,
                            i + 1,
                            stack.inverters[i + 1..].to_vec(),
                        )?;
                        let cand = cr_candidate(ctx)?;
                        let (term, how) =
                            oracle_failure_term(&cand.func, inv, trials.min(512), rng)?;
                        let _ = write!(src, "level-{} {how} {term:.6}; ", i + 1);
                        worst = worst.max(term);
                    }
                    res.details.push(("oracle-terms".into(), src));
                    let hoe = (k - 1.0) * hoeffding_tail(stack.params.tau.rat(), q);
                    let bound = 1.0
                        - p.completeness.to_f64()
                        - k * p.zk.to_f64()
                        - k * (1.0 / stack.params.p as f64 + worst)
                        - hoe
                        - 3.0 * sigma(trials);
                    res.details.push(("eps-c-term".into(), format!("{}", p.completeness.to_f64())));
                    res.details.push(("eps-z-term".into(), format!("{}", k * p.zk.to_f64())));
                    res.details
                        .push(("inversion-term".into(), format!("{}", k * (1.0 / stack.params.p as f64 + worst))));
                    res.details.push(("hoeffding-term".into(), format!("{hoe}")));
                    res.details.push(("sampling-term".into(), format!("{}", 3.0 * sigma(trials))));
                    res.bounds.push(BoundCheck::sampled(
                        "search-value-at-least-one-minus-errors",
                        b_val,
                        bound,
                        Direction::AtLeast,
                    ));
                }
                Arm::No => {
                    let es = measure_soundness(&proto)?;
                    res.bounds.push(BoundCheck::sampled(
                        "no-acceptance-at-most-soundness",
                        acc,
                        es.to_f64()
                            + 2.0 * (k - 1.0) * tau
                            + (k - 1.0) * hoeffding_tail(stack.params.tau.rat(), q)
                            + 3.0 * sigma(trials),
                        Direction::AtMost,
                    ));
                }
            }
        }
        "rv" => {
            let cand = match build_candidate(cfg, &proto, which)? {
                Candidate::Rv(c) => c,
                _ => unreachable!("style selection"),
            };
            let inv = Inverter::coin_counting(Arc::clone(&cand))?;
            let tau = params.tau.clone();
            let hits = (0..trials)
                .filter(|_| rv_reduce(&cand, &inv, &tau, rng).unwrap_or(false))
                .count();
            let value = hits as f64 / trials as f64;
            let slack = 3.0 * sigma(trials);
            match which {
                Arm::Yes => {
                    let p = profile_yes()?;
                    res.profile = Some(ProfileReport::from(&p));
                    let hoe = hoeffding_tail(tau.rat(), cand.q);
                    let bound = 1.0
                        - p.completeness.to_f64()
                        - p.zk.to_f64()
                        - 3.0 / params.p as f64
                        - hoe
                        - slack;
                    res.details.push(("hoeffding-term".into(), format!("{hoe}")));
                    res.details.push(("sampling-term".into(), format!("{slack}")));
                    res.details.push(("eps-c-term".into(), format!("{}", p.completeness.to_f64())));
                    res.details.push(("eps-z-term".into(), format!("{}", p.zk.to_f64())));
                    res.bounds.push(BoundCheck::sampled(
                        "yes-acceptance-at-least-one-minus-errors",
                        value,
                        bound,
                        Direction::AtLeast,
                    ));
                }
                Arm::No => {
                    let es = measure_soundness(&proto)?;
                    res.bounds.push(BoundCheck::sampled(
                        "no-acceptance-at-most-soundness",
                        value,
                        es.to_f64() + slack,
                        Direction::AtMost,
                    ));
                }
            }
        }
        _ => unreachable!(),
    }
    res.verdict = verdict_of(&res.bounds);
    Ok(res)
}

fn run_decide(cfg: &ExperimentConfig, rng: &mut SeededRng) -> Result<ExperimentResult> {
    let proto = build_protocol(cfg)?;
    let which = arm(cfg)?;
    let trials = cfg.trials()?;
    let params = params(cfg)?;
    let mut res = empty_result("decide");

    // The decider self-tests its oracle on a fresh image before running the
    // reduction; implemented for the non-interactive and direct public-coin
    // styles.
    let (accepts, k_oracles): (u64, f64) = match build_candidate(cfg, &proto, which)? {
        Candidate::Nizk(cand) => {
            let inv = build_table_inverter(cfg, &cand.func)?;
            let hits = (0..trials)
                .filter(|_| {
                    one_sided_decider(
                        &[(cand.func.as_ref(), &inv)],
                        |r| Ok(nizk_reduce(&cand, &inv, r)),
                        rng,
                    )
                    .unwrap_or(true)
                })
                .count() as u64;
            (hits, 1.0)
        }
        Candidate::Pc(cand) => {
            let inv = build_table_inverter(cfg, &cand.func)?;
            let hits = (0..trials)
                .filter(|_| {
                    one_sided_decider(
                        &[(cand.func.as_ref(), &inv)],
                        |r| pc_reduce(&cand, &inv, r),
                        rng,
                    )
                    .unwrap_or(true)
                })
                .count() as u64;
            (hits, 1.0)
        }
        Candidate::Rv(_) => {
            return Err(Error::Unsupported(
                "decide is implemented for deterministic-verifier styles".into(),
            ))
        }
    };
    let value = accepts as f64 / trials as f64;
    let slack = 3.0 * sigma(trials);
    match which {
        Arm::Yes => {
            let p = measure_profile(&proto)?;
            res.profile = Some(ProfileReport::from(&p));
            let k = match &proto {
                Proto::Pc { spec, .. } => spec.rounds as f64,
                _ => 1.0,
            };
            // Self-test failures only push the verdict toward accepting, so
            // the reduction's yes-side bound carries over.
            let bound = 1.0
                - p.completeness.to_f64()
                - k * p.zk.to_f64()
                - k / params.p as f64
                - slack;
            res.bounds.push(BoundCheck::sampled(
                "yes-acceptance-at-least-one-minus-errors",
                value,
                bound,
                Direction::AtLeast,
            ));
        }
        Arm::No => {
            let es = measure_soundness(&proto)?;
            res.bounds.push(BoundCheck::sampled(
                "no-acceptance-at-most-soundness-plus-selftest",
                value,
                es.to_f64() + 2.0 * k_oracles / params.p as f64 + slack,
                Direction::AtMost,
            ));
        }
    }
    res.verdict = verdict_of(&res.bounds);
    Ok(res)
}
