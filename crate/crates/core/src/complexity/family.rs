//! Precomputed candidate tables.
//!
//! Everything in the candidate family except the two singletons depends only
//! on `n` (and, for uniform-typical members, on whether the string lies in
//! the set). A [`Family`] holds those members with their description length
//! and entropy, sorted by the minimisation key, and is shared between all
//! strings of the same length.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bits::BitString;
use crate::ensembles::{self, Ensemble, StringStats, Tag};
use crate::rational;
use crate::typical_sets::{LzHistogram, TypicalSetSpec};

use super::{Config, Mode};

/// A candidate ensemble. In upper mode, uniform-typical candidates are kept
/// symbolic: their entropy is replaced by the bound `r n`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Member {
    Exact(Ensemble),
    Surrogate(TypicalSetSpec),
}

impl Member {
    pub(crate) fn desc_len(&self) -> u64 {
        match self {
            Member::Exact(e) => e.desc_len(),
            Member::Surrogate(spec) => ensembles::uniform_typical_desc_len(spec),
        }
    }

    pub(crate) fn serialization(&self) -> BitString {
        match self {
            Member::Exact(e) => e.serialize(),
            Member::Surrogate(spec) => ensembles::uniform_typical_serialization(spec),
        }
    }

    pub(crate) fn tag(&self) -> Tag {
        match self {
            Member::Exact(e) => e.tag(),
            Member::Surrogate(_) => Tag::UniformTypical,
        }
    }

    pub(crate) fn params(&self) -> String {
        match self {
            Member::Exact(e) => e.params(),
            Member::Surrogate(spec) => {
                format!("r={},n={}", rational::format(&spec.r()), spec.n())
            }
        }
    }

    /// `-log2 E(x)` under the member (for surrogates: `r n` on the support).
    #[inline]
    pub(crate) fn neg_log2_prob(&self, x: &BitString, stats: &StringStats, lz_len: u64, entropy: f64) -> Option<f64> {
        match self {
            Member::Exact(e) => e.neg_log2_prob_with(x, stats, lz_len),
            Member::Surrogate(spec) => spec.admits_len(lz_len).then_some(entropy),
        }
    }
}

/// Order of serializations, with a shortcut for dyadic members of equal
/// length and precision whose payloads are fixed-width fields.
pub(crate) fn serialization_cmp(a: &Member, b: &Member) -> Ordering {
    use Ensemble::*;
    match (a, b) {
        (
            Member::Exact(MarkovQuantized { n, m, a0, a1, init }),
            Member::Exact(MarkovQuantized { n: n2, m: m2, a0: b0, a1: b1, init: binit }),
        ) if n == n2 && m == m2 => (a0, a1, init).cmp(&(b0, b1, binit)),
        (Member::Exact(IidQuantized { n, m, a }), Member::Exact(IidQuantized { n: n2, m: m2, a: b })) if n == n2 && m == m2 => {
            a.cmp(b)
        }
        _ => a.serialization().cmp(&b.serialization()),
    }
}

/// Minimisation key shared by every search: description length, then total
/// information, then serialization.
pub(crate) fn key_cmp(a: (&Member, u64, f64), b: (&Member, u64, f64)) -> Ordering {
    a.1.cmp(&b.1)
        .then_with(|| a.2.total_cmp(&b.2))
        .then_with(|| serialization_cmp(a.0, b.0))
}

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub member: Member,
    pub desc_len: u64,
    pub entropy: f64,
    /// `entropy + desc_len`, evaluated in that order.
    pub total: f64,
}

impl Entry {
    pub(crate) fn new(member: Member, entropy: f64) -> Self {
        let desc_len = member.desc_len();
        Self {
            member,
            desc_len,
            entropy,
            total: entropy + desc_len as f64,
        }
    }
}

#[derive(Debug)]
pub(crate) struct Family {
    /// Every string-independent member, sorted by [`key_cmp`].
    pub entries: Vec<Entry>,
    /// Grid specs with exact cardinalities when `n <= n_max`.
    pub typical: Vec<(TypicalSetSpec, Option<u64>)>,
    pub m_max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct FamilyKey {
    n: u64,
    mode: Mode,
    n_max: usize,
    m_max: u32,
    grid: Vec<(u64, u64)>,
}

impl Family {
    pub(crate) fn get(n: u64, mode: Mode, config: &Config) -> Arc<Family> {
        static CACHE: OnceLock<Mutex<HashMap<FamilyKey, Arc<Family>>>> = OnceLock::new();
        let key = FamilyKey {
            n,
            mode,
            n_max: config.n_max,
            m_max: config.m_max,
            grid: config.r_grid.iter().map(|r| (*r.numer(), *r.denom())).collect(),
        };
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.lock().expect("family cache poisoned").get(&key) {
            return Arc::clone(f);
        }
        let built = Arc::new(Self::build(n, mode, config));
        let mut guard = cache.lock().expect("family cache poisoned");
        // keep the table small: large-n families are only reused within a sweep
        if guard.len() > 64 {
            guard.clear();
        }
        guard.entry(key).or_insert(built).clone()
    }

    fn build(n: u64, mode: Mode, config: &Config) -> Family {
        let hist = (n as usize <= config.n_max).then(|| LzHistogram::for_length(n as usize));
        let typical: Vec<(TypicalSetSpec, Option<u64>)> = config
            .r_grid
            .iter()
            .map(|r| {
                let spec = TypicalSetSpec::new(*r, n).expect("grid rates are positive");
                (spec, hist.as_ref().map(|h| h.count_below(&spec)))
            })
            .collect();

        let mut entries = Vec::new();
        let all = Ensemble::uniform_all(n).expect("n >= 1");
        entries.push(Entry::new(Member::Exact(all.clone()), all.entropy()));
        for (spec, card) in &typical {
            match mode {
                Mode::Upper => {
                    let bound = rational::to_f64(&spec.r()) * n as f64;
                    entries.push(Entry::new(Member::Surrogate(*spec), bound));
                }
                Mode::Exact => {
                    let card = card.expect("exact families require n <= n_max");
                    if let Ok(e) = Ensemble::uniform_typical_counted(*spec, card) {
                        let h = e.entropy();
                        entries.push(Entry::new(Member::Exact(e), h));
                    }
                }
            }
        }
        for m in 1..=config.m_max {
            let full = 1u64 << m;
            for a in 1..full {
                let e = Ensemble::iid(n, m, a).expect("valid dyadic parameters");
                let h = e.entropy();
                entries.push(Entry::new(Member::Exact(e), h));
            }
        }
        for m in 1..=config.m_max {
            let full = 1u64 << m;
            for a0 in 1..full {
                for a1 in 1..full {
                    for init in 1..full {
                        let e = Ensemble::markov(n, m, a0, a1, init).expect("valid dyadic parameters");
                        let h = e.entropy();
                        entries.push(Entry::new(Member::Exact(e), h));
                    }
                }
            }
        }
        entries.sort_by(|a, b| {
            key_cmp(
                (&a.member, a.desc_len, a.total),
                (&b.member, b.desc_len, b.total),
            )
        });
        Family {
            entries,
            typical,
            m_max: config.m_max,
        }
    }
}
