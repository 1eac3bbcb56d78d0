//! Reference implementation of `K̂`, effective complexity and coarse
//! effective complexity, written straight from the definitions.
//!
//! Every candidate is materialised as an [`Ensemble`] and every minimum is a
//! linear scan; typical-set cardinalities are counted by parsing all strings
//! of the length. Nothing is cached or pruned. Meant for small `n` only, as
//! a cross-check of [`crate::complexity`].

use std::cmp::Ordering;

use crate::bits::BitString;
use crate::complexity::{ceil_bits, within_budget, Config};
use crate::ensembles::{self, Ensemble};
use crate::error::{Error, Result};
use crate::lz78;
use crate::typical_sets::TypicalSetSpec;

/// Largest `n` the oracle accepts.
pub const ORACLE_MAX_N: usize = 12;

struct Candidate {
    e: Ensemble,
    desc_len: u64,
    entropy: f64,
    total: f64,
    nlp: Option<f64>,
}

/// All candidates for one string.
pub struct Naive {
    x: BitString,
    candidates: Vec<Candidate>,
    khat: (u64, Ensemble),
}

fn cmp_serialization(a: &Ensemble, b: &Ensemble) -> Ordering {
    a.serialize().cmp(&b.serialize())
}

impl Naive {
    pub fn new(x: &BitString, config: &Config) -> Result<Self> {
        let n = x.len();
        if n == 0 || n > ORACLE_MAX_N {
            return Err(Error::ResourceBound(format!("oracle handles 1 <= n <= {ORACLE_MAX_N}")));
        }
        let mut family = vec![
            Ensemble::singleton_raw(x.clone())?,
            Ensemble::singleton_lz(x.clone())?,
            Ensemble::uniform_all(n as u64)?,
        ];
        let lengths: Vec<u64> = (0..1u64 << n)
            .map(|v| lz78::code_len(&BitString::from_u64(v, n)))
            .collect::<Result<_>>()?;
        for r in &config.r_grid {
            let count = lengths
                .iter()
                .filter(|&&l| (l as u128) * (*r.denom() as u128) < (*r.numer() as u128) * n as u128)
                .count() as u64;
            if count > 0 {
                family.push(Ensemble::uniform_typical_counted(TypicalSetSpec::new(*r, n as u64)?, count)?);
            }
        }
        for m in 1..=config.m_max {
            for a in 1..1u64 << m {
                family.push(Ensemble::iid(n as u64, m, a)?);
            }
        }
        for m in 1..=config.m_max {
            for a0 in 1..1u64 << m {
                for a1 in 1..1u64 << m {
                    for init in 1..1u64 << m {
                        family.push(Ensemble::markov(n as u64, m, a0, a1, init)?);
                    }
                }
            }
        }
        let candidates: Vec<Candidate> = family
            .into_iter()
            .map(|e| Candidate {
                desc_len: e.desc_len(),
                entropy: e.entropy(),
                total: e.total_info(),
                nlp: e.neg_log2_prob(x),
                e,
            })
            .collect();
        let khat = Self::minimum_two_part(&candidates);
        Ok(Self {
            x: x.clone(),
            candidates,
            khat,
        })
    }

    pub fn x(&self) -> &BitString {
        &self.x
    }

    /// Minimum of `D(E) + ⌈-log2 E(x)⌉`; ties to the smaller serialization.
    pub fn khat(&self) -> (u64, Ensemble) {
        self.khat.clone()
    }

    fn minimum_two_part(candidates: &[Candidate]) -> (u64, Ensemble) {
        let mut best: Option<(u64, &Ensemble)> = None;
        for c in candidates {
            let Some(nlp) = c.nlp else { continue };
            let v = c.desc_len + ceil_bits(nlp);
            let better = match best {
                None => true,
                Some((bv, be)) => v < bv || (v == bv && cmp_serialization(&c.e, be) == Ordering::Less),
            };
            if better {
                best = Some((v, &c.e));
            }
        }
        let (v, e) = best.expect("the raw singleton always applies");
        (v, e.clone())
    }

    fn typical(c: &Candidate, delta: f64) -> bool {
        c.nlp.is_some_and(|nlp| ensembles::typical(nlp, c.entropy, delta))
    }

    /// Effective complexity; `None` for an empty domain.
    pub fn ec(&self, delta: f64, big_delta: f64) -> Option<(u64, Ensemble)> {
        let k = self.khat.0;
        let mut best: Option<&Candidate> = None;
        for c in &self.candidates {
            if !Self::typical(c, delta) || !within_budget(c.total, k, big_delta) {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => c
                    .desc_len
                    .cmp(&b.desc_len)
                    .then(c.total.total_cmp(&b.total))
                    .then_with(|| cmp_serialization(&c.e, &b.e))
                    == Ordering::Less,
            };
            if better {
                best = Some(c);
            }
        }
        best.map(|c| (c.desc_len, c.e.clone()))
    }

    /// Coarse effective complexity.
    pub fn coarse(&self, delta: f64) -> (f64, Ensemble) {
        let k = self.khat.0;
        let mut best: Option<(f64, &Candidate)> = None;
        for c in &self.candidates {
            if !Self::typical(c, delta) {
                continue;
            }
            let o = (2 * c.desc_len) as f64 + c.entropy;
            let better = match best {
                None => true,
                Some((bo, b)) => o
                    .total_cmp(&bo)
                    .then(c.desc_len.cmp(&b.desc_len))
                    .then_with(|| cmp_serialization(&c.e, &b.e))
                    == Ordering::Less,
            };
            if better {
                best = Some((o, c));
            }
        }
        let (o, c) = best.expect("uniform-all is always typical");
        (o - k as f64, c.e.clone())
    }
}
