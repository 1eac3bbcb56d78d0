//! Universally typical sets built from the LZ78 code length:
//! `T(r, n) = { x in {0,1}^n : code_len(x) < r n }`.
//!
//! Small `n` is handled exactly by a depth-first walk over all `2^n` strings
//! that extends the LZ78 parse one bit at a time and undoes dictionary
//! insertions on backtrack, so shared prefixes are parsed once.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{domain, Error, Result};
use crate::lz78::{self, index_width};
use crate::processes::{stream_seed, ProcessModel};
use crate::rational;
use crate::Rational;

/// Largest block length enumerated exhaustively by default.
pub const DEFAULT_N_MAX: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypicalSetSpec {
    r: Rational,
    n: u64,
}

impl TypicalSetSpec {
    pub fn new(r: Rational, n: u64) -> Result<Self> {
        if *r.numer() == 0 {
            return Err(domain("typical-set rate r must be positive"));
        }
        if n == 0 {
            return Err(domain("typical-set block length n must be at least 1"));
        }
        // Ratio::new reduces; a raw ratio may not be
        Ok(Self {
            r: Rational::new(*r.numer(), *r.denom()),
            n,
        })
    }

    pub fn r(&self) -> Rational {
        self.r
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Whether an LZ78 code length lies strictly below `r n`, compared
    /// exactly as `len * b < a * n` for `r = a/b`.
    #[inline]
    pub fn admits_len(&self, lz_len: u64) -> bool {
        (lz_len as u128) * (*self.r.denom() as u128) < (*self.r.numer() as u128) * (self.n as u128)
    }

    pub fn contains(&self, x: &BitString) -> Result<bool> {
        if x.len() as u64 != self.n {
            return Err(domain(format!(
                "string of length {} tested against T(r, {})",
                x.len(),
                self.n
            )));
        }
        Ok(self.admits_len(lz78::code_len(x)?))
    }

    fn check_limit(&self, n_max: usize) -> Result<()> {
        if self.n > n_max as u64 {
            return Err(Error::ResourceBound(format!(
                "exhaustive enumeration at n = {} exceeds n_max = {n_max}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn enumerate(&self) -> Result<Vec<BitString>> {
        self.enumerate_with_limit(DEFAULT_N_MAX)
    }

    /// All members in lexicographic order.
    pub fn enumerate_with_limit(&self, n_max: usize) -> Result<Vec<BitString>> {
        self.check_limit(n_max)?;
        let n = self.n as usize;
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(n);
        walk(n, &mut |code_len, bits: &[bool]| {
            if self.admits_len(code_len) {
                out.push(BitString::from_bits(bits.to_vec()));
            }
        }, &mut prefix);
        Ok(out)
    }

    pub fn cardinality(&self) -> Result<u64> {
        self.cardinality_with_limit(DEFAULT_N_MAX)
    }

    pub fn cardinality_with_limit(&self, n_max: usize) -> Result<u64> {
        self.check_limit(n_max)?;
        Ok(LzHistogram::for_length(self.n as usize).count_below(self))
    }

    /// Fraction of `samples` independent paths of `model` (stream `i` seeded
    /// with `stream_seed(seed, i)`) that fall in the set.
    pub fn empirical_prob(&self, model: &ProcessModel, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(domain("empirical probability needs at least one sample"));
        }
        let hits = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let x = model.sample(self.n as usize, stream_seed(seed, i))?;
                Ok(self.admits_len(lz78::code_len(&x)?) as usize)
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum::<usize>();
        Ok(hits as f64 / samples as f64)
    }

    /// `2^{r n}` as a float, for reporting.
    pub fn size_bound(&self) -> f64 {
        (rational::to_f64(&self.r) * self.n as f64).exp2()
    }
}

impl fmt::Display for TypicalSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T(r={}, n={})", rational::format(&self.r), self.n)
    }
}

/// Calls `visit(code_len, bits)` for every `x` in `{0,1}^n` in lexicographic
/// order.
fn walk(n: usize, visit: &mut dyn FnMut(u64, &[bool]), prefix: &mut Vec<bool>) {
    let mut trie: Vec<[u32; 2]> = Vec::with_capacity(n + 1);
    trie.push([0, 0]);
    #[allow(clippy::too_many_arguments)]
    fn go(
        depth: usize,
        n: usize,
        node: u32,
        complete: u64,
        cost: u64,
        trie: &mut Vec<[u32; 2]>,
        prefix: &mut Vec<bool>,
        visit: &mut dyn FnMut(u64, &[bool]),
    ) {
        if depth == n {
            let total = if node != 0 {
                cost + index_width(complete + 1)
            } else {
                cost
            };
            visit(total, prefix);
            return;
        }
        for b in [false, true] {
            prefix.push(b);
            let child = trie[node as usize][b as usize];
            if child != 0 {
                go(depth + 1, n, child, complete, cost, trie, prefix, visit);
            } else {
                let id = trie.len() as u32;
                trie[node as usize][b as usize] = id;
                trie.push([0, 0]);
                let c = complete + 1;
                go(depth + 1, n, 0, c, cost + index_width(c) + 1, trie, prefix, visit);
                trie.pop();
                trie[node as usize][b as usize] = 0;
            }
            prefix.pop();
        }
    }
    go(0, n, 0, 0, 0, &mut trie, prefix, visit);
}

/// Number of strings of length `n` at each LZ78 code length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzHistogram {
    n: usize,
    counts: Vec<u64>,
}

impl LzHistogram {
    pub fn build(n: usize) -> Self {
        let mut counts = Vec::new();
        let mut prefix = Vec::with_capacity(n);
        walk(n, &mut |len, _| {
            let len = len as usize;
            if counts.len() <= len {
                counts.resize(len + 1, 0);
            }
            counts[len] += 1;
        }, &mut prefix);
        Self { n, counts }
    }

    /// Shared, lazily built histogram for length `n`.
    pub fn for_length(n: usize) -> Arc<LzHistogram> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LzHistogram>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(h) = cache.lock().expect("histogram cache poisoned").get(&n) {
            return Arc::clone(h);
        }
        let built = Arc::new(Self::build(n));
        cache
            .lock()
            .expect("histogram cache poisoned")
            .entry(n)
            .or_insert(built)
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `counts()[l]` strings have code length exactly `l`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count_below(&self, spec: &TypicalSetSpec) -> u64 {
        debug_assert_eq!(spec.n as usize, self.n);
        self.counts
            .iter()
            .enumerate()
            .take_while(|(len, _)| spec.admits_len(*len as u64))
            .map(|(_, c)| c)
            .sum()
    }

    /// `sum_x 2^{-code_len(x)}` scaled by `2^scale`, exactly.
    pub fn kraft_sum_scaled(&self, scale: u32) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(len, &c)| {
                assert!(len as u32 <= scale, "scale too small for code length {len}");
                (c as u128) << (scale - len as u32)
            })
            .sum()
    }
}
