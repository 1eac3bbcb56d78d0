//! Exhaustive small-n invariant checks.
//!
//! Each suite returns how many cases it checked and the first few failing
//! cases. The integer codec is injected so that a deliberately broken codec
//! can be shown to fail.

use std::time::Instant;

use rand_core::RngCore;
use rand_xoshiro::SplitMix64;
use rand_core::SeedableRng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::codec;
use crate::complexity::{Analyzer, Config, Mode};
use crate::error::Result;
use crate::lz78;
use crate::oracle::Naive;
use crate::typical_sets::{LzHistogram, TypicalSetSpec};
use crate::Rational;

const KEPT_FAILURES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: u64,
    pub failed: u64,
    /// First few failing cases.
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failed: 0,
            failures: Vec::new(),
            seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    fn check(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(case());
            }
        }
    }

    fn absorb(&mut self, checked: u64, failures: Vec<String>) {
        self.checked += checked;
        self.failed += failures.len() as u64;
        self.failures
            .extend(failures.into_iter().take(KEPT_FAILURES.saturating_sub(self.failures.len())));
    }

    /// `name: PASS (checked)` or `name: FAIL (failed/checked) first case`.
    pub fn line(&self) -> String {
        if self.passed() {
            format!("{}: PASS ({} checks, {:.1}s)", self.name, self.checked, self.seconds)
        } else {
            format!(
                "{}: FAIL ({} of {} checks failed, {:.1}s) first: {}",
                self.name,
                self.failed,
                self.checked,
                self.seconds,
                self.failures.first().map(String::as_str).unwrap_or("no cases checked")
            )
        }
    }
}

fn timed(name: &'static str, f: impl FnOnce(&mut SuiteResult)) -> SuiteResult {
    let start = Instant::now();
    let mut r = SuiteResult::new(name);
    f(&mut r);
    r.seconds = start.elapsed().as_secs_f64();
    r
}

/// The integer code under test.
#[derive(Clone, Copy)]
pub struct NatCodec {
    pub encode: fn(u64) -> BitString,
    pub decode: fn(&BitString) -> Result<(u64, usize)>,
}

impl Default for NatCodec {
    fn default() -> Self {
        Self {
            encode: |n| codec::encode_nat(n).expect("n >= 1"),
            decode: codec::decode_nat,
        }
    }
}

/// Round trip, length formula and prefix-freeness of the integer code.
pub fn codec_suite(c: NatCodec, limit: u64) -> SuiteResult {
    timed("codec round trip", |r| {
        let mut words = Vec::with_capacity(limit as usize);
        for n in 1..=limit {
            let w = (c.encode)(n);
            let back = (c.decode)(&w);
            r.check(matches!(back, Ok((v, used)) if v == n && used == w.len()), || {
                format!("n={n} encoded {w} decoded {back:?}")
            });
            let fl = n.ilog2() as u64;
            let expected = fl + 2 * (fl + 1).ilog2() as u64 + 1;
            r.check(w.len() as u64 == expected, || format!("n={n} length {} expected {expected}", w.len()));
            words.push(w);
        }
        // a prefix of a word sorts immediately before some word it prefixes
        words.sort();
        for pair in words.windows(2) {
            r.check(!pair[0].is_prefix_of(&pair[1]), || format!("{} is a prefix of {}", pair[0], pair[1]));
        }
    })
}

/// `sum 2^-|code(n)| <= 1` over `1..=limit`, exactly.
pub fn codec_kraft_suite(c: NatCodec, limit: u64) -> SuiteResult {
    timed("codec kraft", |r| {
        let scale = 96u32;
        let mut sum: u128 = 0;
        for n in 1..=limit {
            let len = (c.encode)(n).len() as u32;
            r.check(len <= scale, || format!("n={n} codeword longer than {scale} bits"));
            sum += 1u128 << (scale - len.min(scale));
        }
        r.check(sum <= 1u128 << scale, || format!("kraft sum {sum} exceeds 2^{scale}"));
    })
}

/// Exhaustive Kraft inequality for LZ78 code lengths, per string and via the
/// histogram.
pub fn lz_kraft_suite(max_n: usize) -> SuiteResult {
    timed("lz78 kraft", |r| {
        for n in 1..=max_n {
            let scale = 64u32;
            let direct: u128 = (0..1u64 << n)
                .into_par_iter()
                .map(|v| {
                    let l = lz78::code_len(&BitString::from_u64(v, n)).expect("non-empty");
                    1u128 << (scale - (l as u32).min(scale))
                })
                .sum();
            r.check(direct <= 1u128 << scale, || format!("n={n} direct kraft sum exceeds 1"));
            let hist = LzHistogram::build(n).kraft_sum_scaled(scale);
            r.check(hist == direct, || format!("n={n} histogram kraft {hist} vs direct {direct}"));
        }
    })
}

/// `decode(encode(x)) == x` for every string up to `max_n`, plus random
/// strings with lengths spread log-uniformly up to `2^max_log2`.
pub fn lz_round_trip_suite(max_n: usize, random: usize, max_log2: u32, seed: u64) -> SuiteResult {
    timed("lz78 round trip", |r| {
        for n in 1..=max_n {
            let failures: Vec<String> = (0..1u64 << n)
                .into_par_iter()
                .filter_map(|v| {
                    let x = BitString::from_u64(v, n);
                    let ok = lz78::encode(&x)
                        .and_then(|b| {
                            let len_ok = b.len() as u64 == codec::nat_len(n as u64) + lz78::code_len(&x)?;
                            Ok(len_ok && lz78::decode(&b)? == x)
                        })
                        .unwrap_or(false);
                    (!ok).then(|| format!("x={x}"))
                })
                .collect();
            r.absorb(1 << n, failures);
        }
        let failures: Vec<String> = (0..random as u64)
            .into_par_iter()
            .filter_map(|i| {
                let x = random_string(crate::processes::stream_seed(seed, i), max_log2);
                let ok = lz78::encode(&x).and_then(|b| lz78::decode(&b)).map(|y| y == x).unwrap_or(false);
                (!ok).then(|| format!("random string {i} of length {}", x.len()))
            })
            .collect();
        r.absorb(random as u64, failures);
    })
}

/// A random string: length `2^u` for `u` uniform in `[0, max_log2]`, bits
/// i.i.d. with a bias drawn from a short list.
pub fn random_string(seed: u64, max_log2: u32) -> BitString {
    const BIASES: [u64; 5] = [2, 8, 16, 32, 54];
    let mut rng = SplitMix64::seed_from_u64(seed);
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let len = ((u * max_log2 as f64).exp2() as usize).clamp(1, 1 << max_log2);
    let p = BIASES[(rng.next_u64() % BIASES.len() as u64) as usize];
    (0..len).map(|_| rng.next_u64() % 64 < p).collect()
}

/// `|T(r, n)| <= 2^{rn}` for `r = k/8`, `1 <= k <= 16`.
pub fn typical_bound_suite(max_n: usize) -> SuiteResult {
    timed("typical set size bound", |r| {
        for n in 1..=max_n {
            let hist = LzHistogram::build(n);
            for k in 1..=16u64 {
                let spec = TypicalSetSpec::new(Rational::new(k, 8), n as u64).expect("positive");
                let card = hist.count_below(&spec);
                // card <= 2^{kn/8}  <=>  card^8 <= 2^{kn}; card^8 may not fit,
                // so compare bit lengths first
                let ok = if card == 0 {
                    true
                } else {
                    let bits = 64 - card.leading_zeros() as u64; // 2^{bits-1} <= card < 2^bits
                    let kn = k * n as u64;
                    if 8 * bits <= kn {
                        true
                    } else if 8 * (bits - 1) > kn {
                        false
                    } else {
                        (card as f64).log2() * 8.0 <= kn as f64
                    }
                };
                r.check(ok, || format!("n={n} r={k}/8 cardinality {card}"));
            }
        }
    })
}

/// `T(r, n)` grows with `r`: membership at `r` implies membership at any
/// larger grid rate.
pub fn typical_monotone_suite(max_n: usize) -> SuiteResult {
    timed("typical set monotone in r", |r| {
        let grid: Vec<Rational> = (1..=16).map(|k| Rational::new(k, 8)).collect();
        for n in 1..=max_n {
            let failures: Vec<String> = (0..1u64 << n)
                .into_par_iter()
                .filter_map(|v| {
                    let x = BitString::from_u64(v, n);
                    let l = lz78::code_len(&x).expect("non-empty");
                    let member: Vec<bool> = grid
                        .iter()
                        .map(|q| TypicalSetSpec::new(*q, n as u64).expect("positive").admits_len(l))
                        .collect();
                    member
                        .windows(2)
                        .any(|w| w[0] && !w[1])
                        .then(|| format!("x={x} leaves the set as r grows"))
                })
                .collect();
            r.absorb(1 << n, failures);
        }
    })
}

pub const EC_DELTAS: [f64; 3] = [0.0, 0.25, 1.0];

/// `Δ` grid `0, 2, ..., 32`.
pub fn tolerance_grid() -> Vec<f64> {
    (0..=16).map(|i| 2.0 * i as f64).collect()
}

/// Anti-monotonicity of `ec` in `Δ` and `δ`, `coarse <= Δ + ec`, witness
/// validity, and upper mode bounding exact mode, for every string up to
/// `max_n`.
pub fn ec_invariants_suite(max_n: usize, config: &Config) -> SuiteResult {
    timed("effective complexity invariants", |r| {
        let tolerances = tolerance_grid();
        for n in 1..=max_n {
            let results: Vec<(u64, Vec<String>)> = (0..1u64 << n)
                .into_par_iter()
                .map(|v| ec_invariants_for(&BitString::from_u64(v, n), &tolerances, config))
                .collect();
            for (checked, failures) in results {
                r.absorb(checked, failures);
            }
        }
    })
}

fn ec_invariants_for(x: &BitString, tolerances: &[f64], config: &Config) -> (u64, Vec<String>) {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    let mut check = |ok: bool, case: &dyn Fn() -> String| {
        checked += 1;
        if !ok {
            failures.push(case());
        }
    };
    let exact = match Analyzer::new(x, Mode::Exact, config) {
        Ok(a) => a,
        Err(e) => return (1, vec![format!("x={x}: {e}")]),
    };
    let upper = Analyzer::new(x, Mode::Upper, config).expect("upper mode accepts every length");
    check(exact.khat() == upper.khat(), &|| format!("x={x} khat differs between modes"));

    // values[d][t]
    let values: Vec<Vec<Option<u64>>> = EC_DELTAS
        .iter()
        .map(|&d| {
            tolerances
                .iter()
                .map(|&t| {
                    let res = exact.ec(d, t, None);
                    if let Some((v, w)) = &res {
                        let valid = w.ensemble().is_ok_and(|e| {
                            e.desc_len() == *v
                                && e.prob(x) > 0.0
                                && e.is_delta_typical(x, d)
                                && crate::complexity::within_budget(e.total_info(), exact.khat(), t)
                        });
                        check(valid, &|| format!("x={x} delta={d} Delta={t} witness {} fails re-check", w.params));
                    }
                    res.map(|(v, _)| v)
                })
                .collect()
        })
        .collect();
    let coarse: Vec<f64> = EC_DELTAS.iter().map(|&d| exact.coarse(d).0).collect();

    for (di, &d) in EC_DELTAS.iter().enumerate() {
        for ti in 0..tolerances.len() {
            let v = values[di][ti];
            if ti + 1 < tolerances.len() {
                let next = values[di][ti + 1];
                let ok = match (v, next) {
                    (Some(a), Some(b)) => a >= b,
                    (Some(_), None) => false,
                    _ => true,
                };
                check(ok, &|| format!("x={x} delta={d}: ec not anti-monotone in Delta at {}", tolerances[ti]));
            }
            if di + 1 < EC_DELTAS.len() {
                let wider = values[di + 1][ti];
                let ok = match (v, wider) {
                    (Some(a), Some(b)) => a >= b,
                    (Some(_), None) => false,
                    _ => true,
                };
                check(ok, &|| format!("x={x} Delta={}: ec not anti-monotone in delta at {d}", tolerances[ti]));
            }
            if let Some(v) = v {
                let ok = coarse[di] <= tolerances[ti] + v as f64 + crate::complexity::BUDGET_SLACK;
                check(ok, &|| {
                    format!("x={x} delta={d} Delta={}: coarse {} > Delta + ec {v}", tolerances[ti], coarse[di])
                });
            }
        }
        for (ti, &t) in tolerances.iter().enumerate() {
            let ok = match (values[di][ti], upper.ec(d, t, None)) {
                (Some(a), Some((b, _))) => b >= a,
                (None, Some(_)) => false,
                _ => true,
            };
            check(ok, &|| format!("x={x} delta={d} Delta={t}: upper ec below exact"));
        }
        check(upper.coarse(d).0 >= coarse[di], &|| format!("x={x} delta={d}: upper coarse below exact"));
    }
    (checked, failures)
}

/// Agreement with the naive transcription on every string up to `max_n`:
/// values and witness serializations must match exactly.
pub fn oracle_suite(max_n: usize, config: &Config) -> SuiteResult {
    timed("oracle equivalence", |r| {
        let tolerances = tolerance_grid();
        for n in 1..=max_n {
            let results: Vec<(u64, Vec<String>)> = (0..1u64 << n)
                .into_par_iter()
                .map(|v| oracle_for(&BitString::from_u64(v, n), &tolerances, config))
                .collect();
            for (checked, failures) in results {
                r.absorb(checked, failures);
            }
        }
    })
}

fn oracle_for(x: &BitString, tolerances: &[f64], config: &Config) -> (u64, Vec<String>) {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    let (naive, fast) = match (Naive::new(x, config), Analyzer::new(x, Mode::Exact, config)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return (1, vec![format!("x={x}: {e}")]),
    };
    let mut check = |ok: bool, case: String| {
        checked += 1;
        if !ok {
            failures.push(case);
        }
    };
    let (nk, ne) = naive.khat();
    let kw = fast.khat_witness();
    check(
        nk == fast.khat() && ne.serialize() == kw.serialization,
        format!("x={x} khat naive {nk} [{ne}] fast {} [{}]", fast.khat(), kw.params),
    );
    for &d in &EC_DELTAS {
        for &t in tolerances {
            let a = naive.ec(d, t);
            let b = fast.ec(d, t, None);
            let same = match (&a, &b) {
                (None, None) => true,
                (Some((va, ea)), Some((vb, wb))) => va == vb && ea.serialize() == wb.serialization,
                _ => false,
            };
            check(
                same,
                format!(
                    "x={x} delta={d} Delta={t} ec naive {:?} fast {:?}",
                    a.map(|(v, e)| format!("{v} {e}")),
                    b.map(|(v, w)| format!("{v} {}", w.params))
                ),
            );
        }
        let (ca, ea) = naive.coarse(d);
        let (cb, wb) = fast.coarse(d);
        check(
            ca.to_bits() == cb.to_bits() && ea.serialize() == wb.serialization,
            format!("x={x} delta={d} coarse naive {ca} [{ea}] fast {cb} [{}]", wb.params),
        );
    }
    (checked, failures)
}

/// Sizes for [`run_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub codec_limit: u64,
    pub lz_max_n: usize,
    pub random_strings: usize,
    pub random_max_log2: u32,
    pub typical_max_n: usize,
    pub monotone_max_n: usize,
    pub ec_max_n: usize,
    pub oracle_max_n: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            codec_limit: 1 << 16,
            lz_max_n: 16,
            random_strings: 10_000,
            random_max_log2: 20,
            typical_max_n: 18,
            monotone_max_n: 16,
            ec_max_n: 10,
            oracle_max_n: 8,
            seed: 1,
        }
    }
}

impl Options {
    /// Smaller sizes, for quick runs.
    pub fn quick() -> Self {
        Self {
            codec_limit: 1 << 12,
            lz_max_n: 12,
            random_strings: 200,
            random_max_log2: 14,
            typical_max_n: 12,
            monotone_max_n: 10,
            ec_max_n: 6,
            oracle_max_n: 5,
            seed: 1,
        }
    }
}

/// Runs every suite in order, calling `progress` after each one.
pub fn run_all(opts: &Options, config: &Config, mut progress: impl FnMut(&SuiteResult)) -> Vec<SuiteResult> {
    type Suite<'a> = Box<dyn FnOnce() -> SuiteResult + 'a>;
    let suites: Vec<Suite> = vec![
        Box::new(|| codec_suite(NatCodec::default(), opts.codec_limit)),
        Box::new(|| codec_kraft_suite(NatCodec::default(), opts.codec_limit)),
        Box::new(|| lz_kraft_suite(opts.lz_max_n)),
        Box::new(|| lz_round_trip_suite(opts.lz_max_n, opts.random_strings, opts.random_max_log2, opts.seed)),
        Box::new(|| typical_bound_suite(opts.typical_max_n)),
        Box::new(|| typical_monotone_suite(opts.monotone_max_n)),
        Box::new(|| ec_invariants_suite(opts.ec_max_n, config)),
        Box::new(|| oracle_suite(opts.oracle_max_n, config)),
    ];
    suites
        .into_iter()
        .map(|s| {
            let r = s();
            progress(&r);
            r
        })
        .collect()
}
