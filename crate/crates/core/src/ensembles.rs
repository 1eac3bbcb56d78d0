//! A fixed, finitely parameterised family of computable ensembles.
//!
//! Each ensemble is a distribution on strings of a single length `n` with an
//! exactly computable Shannon entropy and an explicit prefix-free
//! serialization. The serialization length is the ensemble's description
//! length `D(E)`, used wherever an algorithmic description length of the
//! ensemble is needed.
//!
//! Layout of a serialization: a 3-bit tag, then
//!
//! | tag | ensemble          | payload                                   |
//! |-----|-------------------|-------------------------------------------|
//! | 000 | singleton, raw    | `delta(n)`, the `n` bits of `x`           |
//! | 001 | singleton, LZ78   | `delta(n)`, LZ78 phrase stream of `x`     |
//! | 010 | uniform on all    | `delta(n)`                                |
//! | 011 | uniform on T(r,n) | `delta(n)`, `delta(a) delta(b)` for `r`   |
//! | 100 | i.i.d. dyadic     | `delta(n)`, `delta(m)`, `a` in `m` bits   |
//! | 101 | Markov dyadic     | `delta(n)`, `delta(m)`, `a0`, `a1`, `s` in `m` bits each |
//!
//! Dyadic parameters are `a / 2^m` with `0 < a < 2^m`: the i.i.d. ensemble
//! emits 1 with probability `a/2^m`; the Markov ensemble flips `0 -> 1` with
//! probability `a0/2^m`, `1 -> 0` with probability `a1/2^m`, and starts in
//! state 1 with probability `s/2^m`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::{BitReader, BitString};
use crate::codec::{self, nat_len};
use crate::error::{decode, domain, Error, Result};
use crate::lz78;
use crate::processes::binary_entropy;
use crate::rational::{self, parse_rational};
use crate::typical_sets::{TypicalSetSpec, DEFAULT_N_MAX};
use crate::Rational;

/// Bits spent on the tag of every serialization.
pub const TAG_BITS: u64 = 3;

/// Absolute slack, in bits, applied toward acceptance in the typicality test.
pub const TYPICALITY_SLACK: f64 = 1e-9;

/// Largest dyadic precision `m` accepted.
pub const MAX_PRECISION: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    SingletonRaw,
    SingletonLz,
    UniformAll,
    UniformTypical,
    IidQuantized,
    MarkovQuantized,
}

impl Tag {
    pub const ALL: [Tag; 6] = [
        Tag::SingletonRaw,
        Tag::SingletonLz,
        Tag::UniformAll,
        Tag::UniformTypical,
        Tag::IidQuantized,
        Tag::MarkovQuantized,
    ];

    pub fn code(self) -> u64 {
        self as u64
    }

    pub fn from_code(code: u64) -> Option<Tag> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::SingletonRaw => "singleton-raw",
            Tag::SingletonLz => "singleton-lz",
            Tag::UniformAll => "uniform-all",
            Tag::UniformTypical => "uniform-typ",
            Tag::IidQuantized => "iid",
            Tag::MarkovQuantized => "markov-q",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tag> {
        Tag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown ensemble tag {s:?}")))
    }
}

/// Counts that determine the probability of a string under every i.i.d. and
/// Markov member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StringStats {
    pub n: u64,
    pub ones: u64,
    pub first: bool,
    /// `transitions[s][t]`: positions `i` with `x_i = s`, `x_{i+1} = t`.
    pub transitions: [[u64; 2]; 2],
}

impl StringStats {
    pub fn of(x: &BitString) -> Self {
        let bits = x.bits();
        let mut transitions = [[0u64; 2]; 2];
        for w in bits.windows(2) {
            transitions[w[0] as usize][w[1] as usize] += 1;
        }
        Self {
            n: bits.len() as u64,
            ones: x.count_ones() as u64,
            first: bits.first().copied().unwrap_or(false),
            transitions,
        }
    }

    pub fn zeros(&self) -> u64 {
        self.n - self.ones
    }
}

/// `-log2(a / 2^m)`.
#[inline]
pub fn dyadic_cost(m: u32, a: u64) -> f64 {
    m as f64 - (a as f64).log2()
}

/// `-log2` of an i.i.d. dyadic probability of a string with the given counts.
#[inline]
pub fn iid_neg_log2(stats: &StringStats, m: u32, a: u64) -> f64 {
    let full = 1u64 << m;
    stats.ones as f64 * dyadic_cost(m, a) + stats.zeros() as f64 * dyadic_cost(m, full - a)
}

/// Contribution of the initial symbol to the Markov code length.
#[inline]
pub fn markov_init_term(stats: &StringStats, m: u32, s: u64) -> f64 {
    if stats.first {
        dyadic_cost(m, s)
    } else {
        dyadic_cost(m, (1u64 << m) - s)
    }
}

/// Contribution of transitions leaving state 0.
#[inline]
pub fn markov_row0_term(stats: &StringStats, m: u32, a0: u64) -> f64 {
    let t = &stats.transitions[0];
    t[0] as f64 * dyadic_cost(m, (1u64 << m) - a0) + t[1] as f64 * dyadic_cost(m, a0)
}

/// Contribution of transitions leaving state 1.
#[inline]
pub fn markov_row1_term(stats: &StringStats, m: u32, a1: u64) -> f64 {
    let t = &stats.transitions[1];
    t[0] as f64 * dyadic_cost(m, a1) + t[1] as f64 * dyadic_cost(m, (1u64 << m) - a1)
}

/// Full Markov code length; summed as `(init + row0) + row1`.
#[inline]
pub fn markov_neg_log2(stats: &StringStats, m: u32, a0: u64, a1: u64, s: u64) -> f64 {
    markov_init_term(stats, m, s) + markov_row0_term(stats, m, a0) + markov_row1_term(stats, m, a1)
}

/// Entropy of `n` steps of a two-state chain with flip probabilities `p`
/// (0 -> 1) and `q` (1 -> 0) started in state 1 with probability `s`.
///
/// Chain rule: `H = h(s) + sum_{t=1}^{n-1} [(1 - q_t) h(p) + q_t h(q)]`
/// with `q_t = P(X_t = 1)`. The marginal recursion `q_{t+1} = p + q_t (1 -
/// p - q)` is summed in closed form as a geometric series.
pub fn markov_entropy(n: u64, p: f64, q: f64, s: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let steps = (n - 1) as f64;
    let (hp, hq) = (binary_entropy(p), binary_entropy(q));
    let pi1 = p / (p + q);
    let lambda = 1.0 - p - q;
    // sum_{k=0}^{n-2} lambda^k
    let geometric = if n < 2 {
        0.0
    } else {
        (1.0 - lambda.powf(steps)) / (p + q)
    };
    let mass_in_one = steps * pi1 + (s - pi1) * geometric;
    binary_entropy(s) + steps * hp + (hq - hp) * mass_in_one
}

fn check_dyadic(m: u32, a: u64, what: &str) -> Result<()> {
    if m == 0 || m > MAX_PRECISION {
        return Err(Error::Model(format!("precision m = {m} outside 1..={MAX_PRECISION}")));
    }
    if a == 0 || a >= 1u64 << m {
        return Err(Error::Model(format!("{what} = {a} outside 1..2^{m}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ensemble {
    SingletonRaw { x: BitString },
    SingletonLz { x: BitString, lz_len: u64 },
    UniformAll { n: u64 },
    UniformTypical { spec: TypicalSetSpec, cardinality: u64 },
    IidQuantized { n: u64, m: u32, a: u64 },
    MarkovQuantized { n: u64, m: u32, a0: u64, a1: u64, init: u64 },
}

impl Ensemble {
    pub fn singleton_raw(x: BitString) -> Result<Self> {
        if x.is_empty() {
            return Err(domain("singleton ensembles need a non-empty string"));
        }
        Ok(Ensemble::SingletonRaw { x })
    }

    pub fn singleton_lz(x: BitString) -> Result<Self> {
        let lz_len = lz78::code_len(&x)?;
        Ok(Ensemble::SingletonLz { x, lz_len })
    }

    pub fn uniform_all(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("ensemble length must be at least 1"));
        }
        Ok(Ensemble::UniformAll { n })
    }

    pub fn uniform_typical(r: Rational, n: u64) -> Result<Self> {
        Self::uniform_typical_with_limit(TypicalSetSpec::new(r, n)?, DEFAULT_N_MAX)
    }

    /// Uniform distribution on `T(r, n)`; the set must be non-empty and
    /// small enough to count exhaustively.
    pub fn uniform_typical_with_limit(spec: TypicalSetSpec, n_max: usize) -> Result<Self> {
        let cardinality = spec.cardinality_with_limit(n_max)?;
        Self::uniform_typical_counted(spec, cardinality)
    }

    /// As [`Ensemble::uniform_typical_with_limit`] with a cardinality already
    /// obtained from [`crate::typical_sets::LzHistogram`].
    pub fn uniform_typical_counted(spec: TypicalSetSpec, cardinality: u64) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::Model(format!("{spec} is empty")));
        }
        Ok(Ensemble::UniformTypical { spec, cardinality })
    }

    pub fn iid(n: u64, m: u32, a: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("ensemble length must be at least 1"));
        }
        check_dyadic(m, a, "a")?;
        Ok(Ensemble::IidQuantized { n, m, a })
    }

    pub fn markov(n: u64, m: u32, a0: u64, a1: u64, init: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("ensemble length must be at least 1"));
        }
        check_dyadic(m, a0, "a0")?;
        check_dyadic(m, a1, "a1")?;
        check_dyadic(m, init, "init")?;
        Ok(Ensemble::MarkovQuantized { n, m, a0, a1, init })
    }

    pub fn tag(&self) -> Tag {
        match self {
            Ensemble::SingletonRaw { .. } => Tag::SingletonRaw,
            Ensemble::SingletonLz { .. } => Tag::SingletonLz,
            Ensemble::UniformAll { .. } => Tag::UniformAll,
            Ensemble::UniformTypical { .. } => Tag::UniformTypical,
            Ensemble::IidQuantized { .. } => Tag::IidQuantized,
            Ensemble::MarkovQuantized { .. } => Tag::MarkovQuantized,
        }
    }

    /// Length of every string in the support.
    pub fn n(&self) -> u64 {
        match self {
            Ensemble::SingletonRaw { x } | Ensemble::SingletonLz { x, .. } => x.len() as u64,
            Ensemble::UniformAll { n }
            | Ensemble::IidQuantized { n, .. }
            | Ensemble::MarkovQuantized { n, .. } => *n,
            Ensemble::UniformTypical { spec, .. } => spec.n(),
        }
    }

    pub fn desc_len(&self) -> u64 {
        if let Ensemble::UniformTypical { spec, .. } = self {
            return uniform_typical_desc_len(spec);
        }
        let n = self.n();
        TAG_BITS
            + nat_len(n)
            + match self {
                Ensemble::SingletonRaw { .. } => n,
                Ensemble::SingletonLz { lz_len, .. } => *lz_len,
                Ensemble::UniformAll { .. } => 0,
                Ensemble::UniformTypical { .. } => unreachable!(),
                Ensemble::IidQuantized { m, .. } => nat_len(*m as u64) + *m as u64,
                Ensemble::MarkovQuantized { m, .. } => nat_len(*m as u64) + 3 * *m as u64,
            }
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        match self {
            Ensemble::SingletonRaw { .. } | Ensemble::SingletonLz { .. } => 0.0,
            Ensemble::UniformAll { n } => *n as f64,
            Ensemble::UniformTypical { cardinality, .. } => (*cardinality as f64).log2(),
            Ensemble::IidQuantized { n, m, a } => {
                *n as f64 * binary_entropy(*a as f64 / (1u64 << m) as f64)
            }
            Ensemble::MarkovQuantized { n, m, a0, a1, init } => {
                let scale = (1u64 << m) as f64;
                markov_entropy(*n, *a0 as f64 / scale, *a1 as f64 / scale, *init as f64 / scale)
            }
        }
    }

    /// `H(E) + D(E)`.
    pub fn total_info(&self) -> f64 {
        self.entropy() + self.desc_len() as f64
    }

    /// `-log2 E(x)`, or `None` when `x` lies outside the support.
    pub fn neg_log2_prob(&self, x: &BitString) -> Option<f64> {
        if x.len() as u64 != self.n() {
            return None;
        }
        let stats = StringStats::of(x);
        match self {
            Ensemble::UniformTypical { .. } => {
                let lz = lz78::code_len(x).ok()?;
                self.neg_log2_prob_with(x, &stats, lz)
            }
            _ => self.neg_log2_prob_with(x, &stats, 0),
        }
    }

    /// As [`Ensemble::neg_log2_prob`] with precomputed counts and LZ78 code
    /// length of `x` (the latter is only consulted for uniform-typical
    /// ensembles).
    pub fn neg_log2_prob_with(&self, x: &BitString, stats: &StringStats, lz_len: u64) -> Option<f64> {
        if stats.n != self.n() {
            return None;
        }
        match self {
            Ensemble::SingletonRaw { x: y } | Ensemble::SingletonLz { x: y, .. } => {
                (x == y).then_some(0.0)
            }
            Ensemble::UniformAll { n } => Some(*n as f64),
            Ensemble::UniformTypical { spec, cardinality } => spec
                .admits_len(lz_len)
                .then(|| (*cardinality as f64).log2()),
            Ensemble::IidQuantized { m, a, .. } => Some(iid_neg_log2(stats, *m, *a)),
            Ensemble::MarkovQuantized { m, a0, a1, init, .. } => {
                Some(markov_neg_log2(stats, *m, *a0, *a1, *init))
            }
        }
    }

    /// `E(x)`. Uniform and singleton values are exact; dyadic ensembles are
    /// evaluated as `2^{-(-log2 E(x))}`.
    pub fn prob(&self, x: &BitString) -> f64 {
        match self {
            Ensemble::UniformTypical { spec, cardinality } => {
                if x.len() as u64 == spec.n() && spec.contains(x).unwrap_or(false) {
                    1.0 / *cardinality as f64
                } else {
                    0.0
                }
            }
            Ensemble::UniformAll { n } if x.len() as u64 == *n => (-(*n as f64)).exp2(),
            _ => self.neg_log2_prob(x).map_or(0.0, |l| (-l).exp2()),
        }
    }

    /// `-log2 E(x) <= H(E) (1 + delta)`, false outside the support.
    pub fn is_delta_typical(&self, x: &BitString, delta: f64) -> bool {
        self.neg_log2_prob(x)
            .is_some_and(|l| typical(l, self.entropy(), delta))
    }

    pub fn serialize(&self) -> BitString {
        let mut out = BitString::with_capacity(self.desc_len() as usize);
        out.push_u64(self.tag().code(), TAG_BITS as usize);
        match self {
            Ensemble::SingletonRaw { x } => {
                codec::write_nat(&mut out, x.len() as u64);
                out.extend_from(x);
            }
            Ensemble::SingletonLz { x, .. } => {
                out.extend_from(&lz78::encode(x).expect("non-empty by construction"));
            }
            Ensemble::UniformAll { n } => codec::write_nat(&mut out, *n),
            Ensemble::UniformTypical { spec, .. } => return uniform_typical_serialization(spec),
            Ensemble::IidQuantized { n, m, a } => {
                codec::write_nat(&mut out, *n);
                codec::write_nat(&mut out, *m as u64);
                out.push_u64(*a, *m as usize);
            }
            Ensemble::MarkovQuantized { n, m, a0, a1, init } => {
                codec::write_nat(&mut out, *n);
                codec::write_nat(&mut out, *m as u64);
                for v in [a0, a1, init] {
                    out.push_u64(*v, *m as usize);
                }
            }
        }
        debug_assert_eq!(out.len() as u64, self.desc_len());
        out
    }

    /// Parameter part of the text form, e.g. `r=1/2,n=16`.
    pub fn params(&self) -> String {
        match self {
            Ensemble::SingletonRaw { x } | Ensemble::SingletonLz { x, .. } => format!("x={x}"),
            Ensemble::UniformAll { n } => format!("n={n}"),
            Ensemble::UniformTypical { spec, .. } => {
                format!("r={},n={}", rational::format(&spec.r()), spec.n())
            }
            Ensemble::IidQuantized { n, m, a } => format!("n={n},m={m},a={a}"),
            Ensemble::MarkovQuantized { n, m, a0, a1, init } => {
                format!("n={n},m={m},a0={a0},a1={a1},init={init}")
            }
        }
    }
}

/// Description length of the uniform distribution on `T(r, n)`, defined
/// whether or not the set is empty (the serialization depends only on
/// `(r, n)`).
pub fn uniform_typical_desc_len(spec: &TypicalSetSpec) -> u64 {
    TAG_BITS + nat_len(spec.n()) + codec::rational_len(&spec.r())
}

/// Serialization of the uniform distribution on `T(r, n)`.
pub fn uniform_typical_serialization(spec: &TypicalSetSpec) -> BitString {
    let mut out = BitString::from_u64(Tag::UniformTypical.code(), TAG_BITS as usize);
    codec::write_nat(&mut out, spec.n());
    out.extend_from(&codec::encode_rational(&spec.r()).expect("positive, reduced"));
    out
}

/// The typicality comparison shared by every caller.
#[inline]
pub fn typical(neg_log2_prob: f64, entropy: f64, delta: f64) -> bool {
    neg_log2_prob <= entropy * (1.0 + delta) + TYPICALITY_SLACK
}

/// Decodes a complete serialization; trailing bits are an error.
pub fn decode_ensemble(b: &BitString) -> Result<Ensemble> {
    let (e, used) = decode_ensemble_prefix(b, DEFAULT_N_MAX)?;
    if used != b.len() {
        return Err(decode(format!("{} trailing bits after ensemble", b.len() - used)));
    }
    Ok(e)
}

/// Decodes one serialization from the front of `b`, returning the ensemble
/// and the bits consumed. Uniform-typical ensembles are recounted, which
/// requires `n <= n_max`.
pub fn decode_ensemble_prefix(b: &BitString, n_max: usize) -> Result<(Ensemble, usize)> {
    let mut r = BitReader::new(b);
    let code = r.read_u64(TAG_BITS as usize)?;
    let tag = Tag::from_code(code).ok_or_else(|| decode(format!("unknown ensemble tag {code:03b}")))?;
    let model = |e: Error| match e {
        Error::Model(msg) | Error::Domain(msg) => Error::Decode(msg),
        other => other,
    };
    let e = match tag {
        Tag::SingletonRaw => {
            let n = codec::read_nat(&mut r)?;
            let x = r.read_bits(n as usize)?;
            Ensemble::singleton_raw(x).map_err(model)?
        }
        Tag::SingletonLz => Ensemble::singleton_lz(lz78::read_encoded(&mut r)?).map_err(model)?,
        Tag::UniformAll => Ensemble::uniform_all(codec::read_nat(&mut r)?).map_err(model)?,
        Tag::UniformTypical => {
            let n = codec::read_nat(&mut r)?;
            let q = codec::read_rational(&mut r)?;
            let spec = TypicalSetSpec::new(q, n).map_err(model)?;
            Ensemble::uniform_typical_with_limit(spec, n_max).map_err(model)?
        }
        Tag::IidQuantized => {
            let n = codec::read_nat(&mut r)?;
            let m = read_precision(&mut r)?;
            let a = r.read_u64(m as usize)?;
            Ensemble::iid(n, m, a).map_err(model)?
        }
        Tag::MarkovQuantized => {
            let n = codec::read_nat(&mut r)?;
            let m = read_precision(&mut r)?;
            let a0 = r.read_u64(m as usize)?;
            let a1 = r.read_u64(m as usize)?;
            let init = r.read_u64(m as usize)?;
            Ensemble::markov(n, m, a0, a1, init).map_err(model)?
        }
    };
    Ok((e, r.position()))
}

fn read_precision(r: &mut BitReader<'_>) -> Result<u32> {
    let m = codec::read_nat(r)?;
    if m > MAX_PRECISION as u64 {
        return Err(decode(format!("precision m = {m} exceeds {MAX_PRECISION}")));
    }
    Ok(m as u32)
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag(), self.params())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    /// Text forms such as `uniform-all:n=8`, `uniform-typ:r=1/2,n=16`,
    /// `iid:n=16,m=4,a=5`, `markov-q:n=16,m=3,a0=1,a1=2,init=4`,
    /// `singleton-lz:x=0110`.
    fn from_str(s: &str) -> Result<Ensemble> {
        let (tag, params) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("ensemble {s:?} lacks '<tag>:'")))?;
        let tag: Tag = tag.parse()?;
        let mut kv = Vec::new();
        for part in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            kv.push((k.trim(), v.trim()));
        }
        let get = |key: &str| -> Result<&str> {
            kv.iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("{tag} needs {key}")))
        };
        let num = |key: &str| -> Result<u64> {
            get(key)?
                .parse()
                .map_err(|_| Error::Parse(format!("{key} must be a non-negative integer")))
        };
        let precision = || -> Result<u32> {
            u32::try_from(num("m")?).map_err(|_| Error::Parse("m out of range".into()))
        };
        match tag {
            Tag::SingletonRaw => Ensemble::singleton_raw(get("x")?.parse()?),
            Tag::SingletonLz => Ensemble::singleton_lz(get("x")?.parse()?),
            Tag::UniformAll => Ensemble::uniform_all(num("n")?),
            Tag::UniformTypical => Ensemble::uniform_typical(parse_rational(get("r")?)?, num("n")?),
            Tag::IidQuantized => Ensemble::iid(num("n")?, precision()?, num("a")?),
            Tag::MarkovQuantized => Ensemble::markov(
                num("n")?,
                precision()?,
                num("a0")?,
                num("a1")?,
                num("init")?,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
        (0..1u64 << n).map(move |v| BitString::from_u64(v, n))
    }

    #[test]
    fn probabilities() {
        let u = Ensemble::uniform_all(3).unwrap();
        assert_eq!(u.prob(&bits("101")), 0.125);
        assert_eq!(u.prob(&bits("10")), 0.0);
        let s = Ensemble::singleton_raw(bits("01")).unwrap();
        assert_eq!(s.prob(&bits("01")), 1.0);
        assert_eq!(s.prob(&bits("10")), 0.0);
        let t = Ensemble::uniform_typical(Rational::new(2, 1), 1).unwrap();
        assert_eq!(t.prob(&bits("0")), 0.5);
    }

    #[test]
    fn entropies() {
        assert_eq!(Ensemble::uniform_all(8).unwrap().entropy(), 8.0);
        assert_eq!(Ensemble::singleton_lz(bits("0110")).unwrap().entropy(), 0.0);
        assert_eq!(Ensemble::iid(10, 1, 1).unwrap().entropy(), 10.0);
    }

    #[test]
    fn description_lengths() {
        assert_eq!(Ensemble::uniform_all(8).unwrap().desc_len(), 11);
        // T(1/2, 8) is empty, but its description length is still defined
        let spec = TypicalSetSpec::new(Rational::new(1, 2), 8).unwrap();
        assert_eq!(uniform_typical_desc_len(&spec), 16);
        assert_eq!(uniform_typical_serialization(&spec).len(), 16);
        let t = Ensemble::uniform_typical(Rational::new(5, 4), 8).unwrap();
        assert_eq!(t.desc_len(), 3 + 8 + 5 + 5);
        assert_eq!(Ensemble::singleton_raw(bits("0110")).unwrap().desc_len(), 12);
    }

    #[test]
    fn total_information() {
        assert_eq!(Ensemble::uniform_all(8).unwrap().total_info(), 19.0);
        assert_eq!(Ensemble::singleton_raw(bits("0110")).unwrap().total_info(), 12.0);
        let t = Ensemble::uniform_typical(Rational::new(2, 1), 1).unwrap();
        assert_eq!(t.desc_len(), 9);
        assert_eq!(t.total_info(), 10.0);
    }

    #[test]
    fn typicality() {
        let t = Ensemble::uniform_typical(Rational::new(1, 1), 10).unwrap();
        for x in t_members(&t) {
            assert!(t.is_delta_typical(&x, 0.0));
        }
        let s = Ensemble::singleton_raw(bits("0110")).unwrap();
        assert!(s.is_delta_typical(&bits("0110"), 0.0));
        assert!(!s.is_delta_typical(&bits("0111"), 5.0));
        let iid = Ensemble::iid(4, 2, 1).unwrap();
        assert!(!iid.is_delta_typical(&bits("1111"), 0.0));
        assert!(iid.is_delta_typical(&bits("0000"), 0.0));
    }

    fn t_members(e: &Ensemble) -> Vec<BitString> {
        match e {
            Ensemble::UniformTypical { spec, .. } => spec.enumerate().unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn serialization_round_trips() {
        for text in [
            "uniform-all:n=8",
            "iid:n=4,m=3,a=2",
            "uniform-typ:r=5/4,n=16",
            "markov-q:n=9,m=3,a0=1,a1=6,init=4",
            "singleton-raw:x=0110",
            "singleton-lz:x=1011010100010",
        ] {
            let e: Ensemble = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
            let ser = e.serialize();
            assert_eq!(ser.len() as u64, e.desc_len());
            assert_eq!(decode_ensemble(&ser).unwrap(), e);
            let mut padded = ser.clone();
            padded.extend_from(&bits("10110"));
            assert_eq!(decode_ensemble_prefix(&padded, DEFAULT_N_MAX).unwrap(), (e, ser.len()));
        }
    }

    #[test]
    fn decode_rejects_malformed() {
        assert!(decode_ensemble(&bits("110")).is_err());
        assert!(decode_ensemble(&bits("01000")).is_err()); // uniform-all, truncated delta
        // iid with a = 0
        let mut b = BitString::from_u64(Tag::IidQuantized.code(), 3);
        codec::write_nat(&mut b, 4);
        codec::write_nat(&mut b, 2);
        b.push_u64(0, 2);
        assert!(matches!(decode_ensemble(&b), Err(Error::Decode(_))));
        // uniform-typ over an empty set
        let mut b = BitString::from_u64(Tag::UniformTypical.code(), 3);
        codec::write_nat(&mut b, 2);
        b.extend_from(&codec::encode_rational(&Rational::new(1, 2)).unwrap());
        assert!(matches!(decode_ensemble(&b), Err(Error::Decode(_))));
    }

    #[test]
    fn constructors_validate() {
        assert!(Ensemble::iid(4, 2, 4).is_err());
        assert!(Ensemble::iid(4, 0, 1).is_err());
        assert!(Ensemble::markov(4, 2, 1, 1, 0).is_err());
        assert!(Ensemble::uniform_typical(Rational::new(1, 2), 2).is_err());
        assert!(Ensemble::uniform_all(0).is_err());
        assert!(Ensemble::singleton_raw(BitString::new()).is_err());
    }

    #[test]
    fn code_lengths_match_direct_products() {
        let e = Ensemble::markov(6, 3, 3, 5, 2).unwrap();
        let (p, q, s) = (3.0 / 8.0, 5.0 / 8.0, 2.0 / 8.0);
        for x in all_strings(6) {
            let b = x.bits();
            let mut pr: f64 = if b[0] { s } else { 1.0 - s };
            for w in b.windows(2) {
                pr *= match (w[0], w[1]) {
                    (false, false) => 1.0 - p,
                    (false, true) => p,
                    (true, false) => q,
                    (true, true) => 1.0 - q,
                };
            }
            assert!((e.neg_log2_prob(&x).unwrap() + pr.log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_entropy_matches_explicit_recursion() {
        for &(n, p, q, s) in &[(1u64, 0.3, 0.6, 0.2), (50, 0.125, 0.875, 0.5), (300, 0.01, 0.02, 0.99)] {
            let mut h = binary_entropy(s);
            let mut q_t = s;
            for _ in 1..n {
                h += (1.0 - q_t) * binary_entropy(p) + q_t * binary_entropy(q);
                q_t = p + q_t * (1.0 - p - q);
            }
            assert!((markov_entropy(n, p, q, s) - h).abs() < 1e-9 * n as f64, "n={n}");
        }
    }
}
