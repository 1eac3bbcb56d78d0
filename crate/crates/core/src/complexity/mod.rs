//! Two-part code lengths and effective complexity under the ensemble family.
//!
//! `K̂(x)` is the shortest two-part description of `x`: an ensemble's
//! serialization followed by a Shannon code for `x` under it. Effective
//! complexity is the shortest ensemble description among ensembles for which
//! `x` is typical and whose total information stays within a budget of
//! `K̂(x)`; coarse effective complexity folds the budget into the objective.
//!
//! Searches are exact over a finite family whose grids live in [`Config`].
//! Every minimum is broken by (description length, total information,
//! serialization), so the chosen witness is unique.

mod experiments;
mod family;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::bits::BitString;
use crate::ensembles::{self, Ensemble, StringStats, Tag};
use crate::error::{Error, Result};
use crate::lz78;
use crate::rational::{self, parse_rational};
use crate::typical_sets::DEFAULT_N_MAX;
use crate::Rational;

pub use experiments::{
    max_coarse_scan, sweep_scheme_constant, theorem1_sweep, MaxCoarseScan, SweepAggregate, SweepOutput,
    SweepParams, SweepRow,
};

use family::{key_cmp, serialization_cmp, Entry, Family, Member};

/// Slack applied toward acceptance when comparing a total information with
/// the budget `K̂(x) + Δ`.
pub const BUDGET_SLACK: f64 = 1e-9;

/// Default largest dyadic precision in the family.
pub const DEFAULT_M_MAX: u32 = 6;

/// `⌈v⌉` for a code length, forgiving rounding noise just above an integer.
#[inline]
pub fn ceil_bits(v: f64) -> u64 {
    let c = (v - BUDGET_SLACK).ceil();
    if c <= 0.0 {
        0
    } else {
        c as u64
    }
}

/// `total <= K̂ + Δ`, with the shared slack.
#[inline]
pub fn within_budget(total: f64, khat: u64, big_delta: f64) -> bool {
    total <= khat as f64 + big_delta + BUDGET_SLACK
}

/// Default rate grid: `k/64` for `1 <= k <= 64` and `k/8` for `9 <= k <= 16`.
pub fn default_r_grid() -> Vec<Rational> {
    let mut grid: Vec<Rational> = (1..=64).map(|k| Rational::new(k, 64)).collect();
    grid.extend((9..=16).map(|k| Rational::new(k, 8)));
    grid
}

/// Grids and limits of the candidate family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    /// Largest length for which typical sets are enumerated.
    pub n_max: usize,
    /// Largest dyadic precision for i.i.d. and Markov members.
    pub m_max: u32,
    #[serde(serialize_with = "serialize_grid")]
    pub r_grid: Vec<Rational>,
}

fn serialize_grid<S: Serializer>(grid: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_grid(grid))
}

/// Grid as comma-separated `a/b` values.
pub fn format_grid(grid: &[Rational]) -> String {
    grid.iter().map(rational::format).collect::<Vec<_>>().join(",")
}

/// Parses a comma-separated list of rationals; sorted and deduplicated.
pub fn parse_grid(s: &str) -> Result<Vec<Rational>> {
    let mut grid = s
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>>>()?;
    if grid.iter().any(|r| *r.numer() == 0) {
        return Err(Error::Domain("grid rates must be positive".into()));
    }
    grid.sort();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::Parse("empty rate grid".into()));
    }
    Ok(grid)
}

impl Default for Config {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            m_max: DEFAULT_M_MAX,
            r_grid: default_r_grid(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 || self.m_max > 16 {
            return Err(Error::Domain(format!("m_max must be in 1..=16, got {}", self.m_max)));
        }
        if self.n_max > 30 {
            return Err(Error::Domain(format!("n_max must be at most 30, got {}", self.n_max)));
        }
        if self.r_grid.is_empty() || self.r_grid.iter().any(|r| *r.numer() == 0) {
            return Err(Error::Domain("rate grid must be non-empty and positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact entropies everywhere; needs `n <= n_max`.
    Exact,
    /// Uniform-typical entropies replaced by `r n`; any `n`.
    Upper,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Upper => "upper",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "upper" => Ok(Mode::Upper),
            other => Err(Error::Parse(format!("unknown mode {other:?} (expected exact or upper)"))),
        }
    }
}

/// The tolerance `Δ`: a fixed number of bits, or `ε n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Bits(f64),
    PerSymbol(Rational),
}

impl Tolerance {
    pub fn bits_for(&self, n: u64) -> f64 {
        match self {
            Tolerance::Bits(b) => *b,
            Tolerance::PerSymbol(eps) => rational::to_f64(eps) * n as f64,
        }
    }
}

/// Restriction of the minimisation domain by tag and parameter ranges.
///
/// Ranges apply only to tags that carry the parameter: `m` to the dyadic
/// tags, `r` to the uniform-typical tag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraint {
    pub tags: Option<Vec<Tag>>,
    pub m_range: Option<(u32, u32)>,
    pub r_range: Option<(Rational, Rational)>,
}

impl Constraint {
    fn admits(&self, member: &Member) -> bool {
        if let Some(tags) = &self.tags {
            if !tags.contains(&member.tag()) {
                return false;
            }
        }
        match member {
            Member::Exact(Ensemble::IidQuantized { m, .. } | Ensemble::MarkovQuantized { m, .. }) => {
                self.m_range.is_none_or(|(lo, hi)| (lo..=hi).contains(m))
            }
            Member::Exact(Ensemble::UniformTypical { spec, .. }) | Member::Surrogate(spec) => {
                self.r_range.is_none_or(|(lo, hi)| lo <= spec.r() && spec.r() <= hi)
            }
            _ => true,
        }
    }

    /// Whether `e` satisfies the constraint.
    pub fn admits_ensemble(&self, e: &Ensemble) -> bool {
        self.admits(&Member::Exact(e.clone()))
    }
}

/// Text form: `;`-separated `tags=a,b`, `m=lo..hi`, `r=lo..hi`.
impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Constraint::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("constraint item {part:?} is not key=value")))?;
            let range = |v: &str| -> Result<(String, String)> {
                let (lo, hi) = v
                    .split_once("..")
                    .ok_or_else(|| Error::Parse(format!("range {v:?} must be lo..hi")))?;
                Ok((lo.trim().to_string(), hi.trim().to_string()))
            };
            match key.trim() {
                "tags" => {
                    c.tags = Some(value.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?);
                }
                "m" => {
                    let (lo, hi) = range(value)?;
                    let p = |t: &str| t.parse::<u32>().map_err(|e| Error::Parse(format!("bad m bound {t:?}: {e}")));
                    c.m_range = Some((p(&lo)?, p(&hi)?));
                }
                "r" => {
                    let (lo, hi) = range(value)?;
                    c.r_range = Some((parse_rational(&lo)?, parse_rational(&hi)?));
                }
                other => return Err(Error::Parse(format!("unknown constraint key {other:?}"))),
            }
        }
        Ok(c)
    }
}

/// Parameters of an effective-complexity query.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityQuery {
    pub delta: f64,
    pub tolerance: Tolerance,
    pub constraint: Option<Constraint>,
    pub mode: Mode,
}

impl ComplexityQuery {
    pub fn new(delta: f64, tolerance: Tolerance, mode: Mode) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("delta must be finite and >= 0, got {delta}")));
        }
        match tolerance {
            Tolerance::Bits(b) if !(b >= 0.0 && b.is_finite()) => {
                return Err(Error::Domain(format!("Delta must be finite and >= 0, got {b}")));
            }
            Tolerance::PerSymbol(eps) if *eps.numer() == 0 => {
                return Err(Error::Domain("eps must be positive".into()));
            }
            _ => {}
        }
        Ok(Self {
            delta,
            tolerance,
            constraint: None,
            mode,
        })
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraint = Some(c);
        self
    }
}

/// A minimising ensemble as reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub tag: Tag,
    pub params: String,
    pub desc_len: u64,
    /// Entropy, or the bound `r n` when `entropy_is_bound`.
    pub entropy: f64,
    pub entropy_is_bound: bool,
    pub serialization: BitString,
}

impl Witness {
    fn of(member: &Member, entropy: f64) -> Self {
        Self {
            tag: member.tag(),
            params: member.params(),
            desc_len: member.desc_len(),
            entropy,
            entropy_is_bound: matches!(member, Member::Surrogate(_)),
            serialization: member.serialization(),
        }
    }

    /// Reconstructs the ensemble from its serialization.
    pub fn ensemble(&self) -> Result<Ensemble> {
        ensembles::decode_ensemble(&self.serialization)
    }
}

/// Per-string results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub n: u64,
    pub lz_len: u64,
    pub khat: u64,
    pub khat_witness: Witness,
    /// `None` when the minimisation domain is empty.
    pub ec: Option<u64>,
    pub ec_is_upper_bound: bool,
    pub ec_witness: Option<Witness>,
    pub coarse_ec: f64,
    pub coarse_witness: Witness,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub mode: Mode,
    pub config: Config,
}

/// Everything about one string that the searches share: counts, LZ78 code
/// length, the family table for its length and `K̂`.
pub struct Analyzer<'a> {
    x: &'a BitString,
    stats: StringStats,
    lz_len: u64,
    mode: Mode,
    family: Arc<Family>,
    singletons: [Entry; 2],
    khat: u64,
    khat_member: Member,
}

impl<'a> Analyzer<'a> {
    pub fn new(x: &'a BitString, mode: Mode, config: &Config) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Domain("string must be non-empty".into()));
        }
        config.validate()?;
        let n = x.len() as u64;
        if mode == Mode::Exact && x.len() > config.n_max {
            return Err(Error::ResourceBound(format!(
                "exact mode needs n <= n_max = {}, got n = {n}; use upper mode",
                config.n_max
            )));
        }
        let lz_len = lz78::code_len(x)?;
        let stats = StringStats::of(x);
        let family = Family::get(n, mode, config);
        let singletons = [
            Entry::new(Member::Exact(Ensemble::SingletonRaw { x: x.clone() }), 0.0),
            Entry::new(Member::Exact(Ensemble::SingletonLz { x: x.clone(), lz_len }), 0.0),
        ];
        let mut a = Self {
            x,
            stats,
            lz_len,
            mode,
            family,
            singletons,
            khat: 0,
            khat_member: Member::Exact(Ensemble::UniformAll { n }),
        };
        let (khat, member) = a.compute_khat();
        a.khat = khat;
        a.khat_member = member;
        Ok(a)
    }

    pub fn n(&self) -> u64 {
        self.stats.n
    }

    pub fn lz_len(&self) -> u64 {
        self.lz_len
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn khat(&self) -> u64 {
        self.khat
    }

    pub fn khat_witness(&self) -> Witness {
        let entropy = match &self.khat_member {
            Member::Exact(e) => e.entropy(),
            Member::Surrogate(spec) => rational::to_f64(&spec.r()) * self.n() as f64,
        };
        Witness::of(&self.khat_member, entropy)
    }

    /// Cheapest singleton description length, `min(D_raw, D_LZ)`.
    pub fn singleton_desc_len(&self) -> u64 {
        self.singletons[0].desc_len.min(self.singletons[1].desc_len)
    }

    /// Ties in the two-part length go to the smaller serialization.
    fn compute_khat(&self) -> (u64, Member) {
        let n = self.n();
        let stats = &self.stats;
        let mut best: Option<(u64, Member)> = None;
        let mut offer = |total: u64, member: &dyn Fn() -> Member| {
            let better = match &best {
                None => true,
                Some((bt, bm)) => match total.cmp(bt) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => serialization_cmp(&member(), bm) == Ordering::Less,
                },
            };
            if better {
                best = Some((total, member()));
            }
        };

        for s in &self.singletons {
            offer(s.desc_len, &|| s.member.clone());
        }
        let all = Ensemble::UniformAll { n };
        offer(all.desc_len() + ceil_bits(n as f64), &|| Member::Exact(all.clone()));

        for (spec, card) in &self.family.typical {
            if !spec.admits_len(self.lz_len) {
                continue;
            }
            let d = ensembles::uniform_typical_desc_len(spec);
            match card {
                Some(c) => {
                    let e = Ensemble::UniformTypical { spec: *spec, cardinality: *c };
                    offer(d + ceil_bits((*c as f64).log2()), &|| Member::Exact(e.clone()));
                }
                None => offer(d + rational::ceil_mul(&spec.r(), n), &|| Member::Surrogate(*spec)),
            }
        }

        for m in 1..=self.family.m_max {
            let full = 1u64 << m;
            let d = Ensemble::IidQuantized { n, m, a: 1 }.desc_len();
            for a in 1..full {
                let bits = ceil_bits(ensembles::iid_neg_log2(stats, m, a));
                offer(d + bits, &|| Member::Exact(Ensemble::IidQuantized { n, m, a }));
            }
        }

        // The Markov code length is (init + row0) + row1 with each term
        // depending on one parameter; rounding is monotone, so the minimum
        // and its lexicographically first argument follow coordinate-wise.
        for m in 1..=self.family.m_max {
            let full = 1u64 << m;
            let d = Ensemble::MarkovQuantized { n, m, a0: 1, a1: 1, init: 1 }.desc_len();
            let init_t: Vec<f64> = (1..full).map(|s| ensembles::markov_init_term(stats, m, s)).collect();
            let row0_t: Vec<f64> = (1..full).map(|a| ensembles::markov_row0_term(stats, m, a)).collect();
            let row1_t: Vec<f64> = (1..full).map(|a| ensembles::markov_row1_term(stats, m, a)).collect();
            let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
            let (mi, m0, m1) = (min(&init_t), min(&row0_t), min(&row1_t));
            let v = ceil_bits((mi + m0) + m1);
            let a0 = row0_t.iter().position(|&t| ceil_bits((mi + t) + m1) == v).expect("minimum attained");
            let t0 = row0_t[a0];
            let a1 = row1_t.iter().position(|&t| ceil_bits((mi + t0) + t) == v).expect("minimum attained");
            let t1 = row1_t[a1];
            let s = init_t.iter().position(|&t| ceil_bits((t + t0) + t1) == v).expect("minimum attained");
            let e = Ensemble::MarkovQuantized {
                n,
                m,
                a0: a0 as u64 + 1,
                a1: a1 as u64 + 1,
                init: s as u64 + 1,
            };
            offer(d + v, &|| Member::Exact(e.clone()));
        }

        let (total, member) = best.expect("singletons always apply");
        (total, member)
    }

    #[inline]
    fn in_domain(&self, e: &Entry, delta: f64) -> bool {
        e.member
            .neg_log2_prob(self.x, &self.stats, self.lz_len, e.entropy)
            .is_some_and(|nlp| ensembles::typical(nlp, e.entropy, delta))
    }

    /// Effective complexity with tolerance `big_delta` bits, optionally
    /// constrained. `None` means the domain is empty.
    pub fn ec(&self, delta: f64, big_delta: f64, constraint: Option<&Constraint>) -> Option<(u64, Witness)> {
        let admits = |e: &Entry| constraint.is_none_or(|c| c.admits(&e.member));
        let limit = self.khat as f64 + big_delta + BUDGET_SLACK;
        let mut best: Option<&Entry> = None;
        for e in &self.family.entries {
            if e.desc_len as f64 > limit {
                break;
            }
            if within_budget(e.total, self.khat, big_delta) && admits(e) && self.in_domain(e, delta) {
                best = Some(e);
                break;
            }
        }
        for s in &self.singletons {
            if within_budget(s.total, self.khat, big_delta) && admits(s) && self.in_domain(s, delta) {
                let better = best.is_none_or(|b| {
                    key_cmp((&s.member, s.desc_len, s.total), (&b.member, b.desc_len, b.total)) == Ordering::Less
                });
                if better {
                    best = Some(s);
                }
            }
        }
        best.map(|e| (e.desc_len, Witness::of(&e.member, e.entropy)))
    }

    /// Coarse effective complexity: `min 2 D(E) + H(E)` over typical members,
    /// minus `K̂(x)`.
    pub fn coarse(&self, delta: f64) -> (f64, Witness) {
        let objective = |e: &Entry| (2 * e.desc_len) as f64 + e.entropy;
        let cmp = |a: &Entry, oa: f64, b: &Entry, ob: f64| {
            oa.total_cmp(&ob)
                .then(a.desc_len.cmp(&b.desc_len))
                .then_with(|| serialization_cmp(&a.member, &b.member))
        };
        let mut best: Option<(&Entry, f64)> = None;
        let singletons = self.singletons.iter().map(|e| (e, false));
        for (e, sorted) in singletons.chain(self.family.entries.iter().map(|e| (e, true))) {
            if let Some((_, bo)) = best {
                // the family is sorted by description length, and the
                // objective is at least 2 D
                if sorted && (2 * e.desc_len) as f64 > bo {
                    break;
                }
            }
            if !self.in_domain(e, delta) {
                continue;
            }
            let o = objective(e);
            if best.is_none_or(|(b, bo)| cmp(e, o, b, bo) == Ordering::Less) {
                best = Some((e, o));
            }
        }
        let (e, o) = best.expect("uniform-all is typical for every string");
        (o - self.khat as f64, Witness::of(&e.member, e.entropy))
    }

    /// Full report for a query.
    pub fn report(&self, q: &ComplexityQuery, config: &Config) -> ComplexityReport {
        let big_delta = q.tolerance.bits_for(self.n());
        let ec = self.ec(q.delta, big_delta, q.constraint.as_ref());
        let (coarse_ec, coarse_witness) = self.coarse(q.delta);
        ComplexityReport {
            n: self.n(),
            lz_len: self.lz_len,
            khat: self.khat,
            khat_witness: self.khat_witness(),
            ec: ec.as_ref().map(|(v, _)| *v),
            ec_is_upper_bound: self.mode == Mode::Upper,
            ec_witness: ec.map(|(_, w)| w),
            coarse_ec,
            coarse_witness,
            delta: q.delta,
            big_delta,
            mode: self.mode,
            config: config.clone(),
        }
    }
}

/// `K̂(x)` and its witness.
pub fn khat(x: &BitString, mode: Mode, config: &Config) -> Result<(u64, Witness)> {
    let a = Analyzer::new(x, mode, config)?;
    Ok((a.khat(), a.khat_witness()))
}

/// Effective complexity report for `x`.
pub fn ec(x: &BitString, q: &ComplexityQuery, config: &Config) -> Result<ComplexityReport> {
    let a = Analyzer::new(x, q.mode, config)?;
    Ok(a.report(q, config))
}

/// Coarse effective complexity and its witness.
pub fn coarse_ec(x: &BitString, delta: f64, mode: Mode, config: &Config) -> Result<(f64, Witness)> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be finite and >= 0, got {delta}")));
    }
    Ok(Analyzer::new(x, mode, config)?.coarse(delta))
}
