//! Stationary binary processes: i.i.d. Bernoulli, stationary first-order
//! Markov chains, and finite mixtures of those (the non-ergodic case).
//!
//! Sampling uses SplitMix64 seeded explicitly; every path is a pure function
//! of `(model, n, seed)`.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rational::{self, parse_rational, to_f64};
use crate::Rational;

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Seed for the `stream`-th independent generator derived from `seed`:
/// the `stream`-th output of SplitMix64 started at `seed`.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
    SplitMix64::seed_from_u64(seed.wrapping_add(stream.wrapping_mul(GAMMA))).next_u64()
}

/// Uniform draw in `[0, 1)` with 53 bits of resolution.
#[inline]
fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A row-stochastic 2x2 matrix; `rows[s][t]` is the probability of moving
/// from state `s` to state `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: [[Rational; 2]; 2],
}

impl TransitionMatrix {
    pub fn new(rows: [[Rational; 2]; 2]) -> Result<Self> {
        for (s, row) in rows.iter().enumerate() {
            if row[0] + row[1] != Rational::from_integer(1) {
                return Err(Error::Model(format!("transition row {s} does not sum to 1")));
            }
        }
        Ok(Self { rows })
    }

    /// Chain with `P(0->1) = p01`, `P(1->0) = p10`.
    pub fn from_flips(p01: Rational, p10: Rational) -> Result<Self> {
        let one = Rational::from_integer(1);
        if p01 > one || p10 > one {
            return Err(Error::Model("flip probabilities must lie in [0, 1]".into()));
        }
        Ok(Self {
            rows: [[one - p01, p01], [p10, one - p10]],
        })
    }

    pub fn p01(&self) -> Rational {
        self.rows[0][1]
    }

    pub fn p10(&self) -> Rational {
        self.rows[1][0]
    }

    pub fn rows(&self) -> &[[Rational; 2]; 2] {
        &self.rows
    }

    pub fn as_f64(&self) -> [[f64; 2]; 2] {
        [
            [to_f64(&self.rows[0][0]), to_f64(&self.rows[0][1])],
            [to_f64(&self.rows[1][0]), to_f64(&self.rows[1][1])],
        ]
    }
}

/// Stationary distribution `pi` with `pi T = pi` of an irreducible chain.
pub fn stationary_dist(t: &TransitionMatrix) -> Result<[f64; 2]> {
    let zero = Rational::from_integer(0);
    if t.p01() == zero {
        return Err(Error::Model(
            "reducible chain: state 0 is absorbing".into(),
        ));
    }
    if t.p10() == zero {
        return Err(Error::Model(
            "reducible chain: state 1 is absorbing".into(),
        ));
    }
    let total = t.p01() + t.p10();
    let pi0 = to_f64(&(t.p10() / total));
    let pi = [pi0, 1.0 - pi0];
    let m = t.as_f64();
    for col in 0..2 {
        let moved = pi[0] * m[0][col] + pi[1] * m[1][col];
        debug_assert!((moved - pi[col]).abs() <= 1e-12);
    }
    Ok(pi)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    Bernoulli { p: Rational },
    /// Stationary chain started from its stationary distribution.
    Markov { transition: TransitionMatrix },
    /// Weighted ergodic components; weights are positive and sum to 1.
    Mixture { components: Vec<(Rational, ProcessModel)> },
}

/// A validated stationary process model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessModel {
    kind: ModelKind,
}

impl ProcessModel {
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p > Rational::from_integer(1) {
            return Err(Error::Model(format!("Bernoulli p = {} exceeds 1", rational::format(&p))));
        }
        Ok(Self {
            kind: ModelKind::Bernoulli { p },
        })
    }

    pub fn markov(transition: TransitionMatrix) -> Result<Self> {
        stationary_dist(&transition)?;
        Ok(Self {
            kind: ModelKind::Markov { transition },
        })
    }

    /// Symmetric chain flipping state with probability `flip`.
    pub fn markov_symmetric(flip: Rational) -> Result<Self> {
        Self::markov(TransitionMatrix::from_flips(flip, flip)?)
    }

    pub fn mixture(components: Vec<(Rational, ProcessModel)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Model("mixture needs at least one component".into()));
        }
        let mut total = Rational::from_integer(0);
        for (w, c) in &components {
            if *w == Rational::from_integer(0) {
                return Err(Error::Model("mixture weights must be positive".into()));
            }
            total += *w;
            match &c.kind {
                ModelKind::Bernoulli { .. } => {}
                ModelKind::Markov { transition } => {
                    let one = Rational::from_integer(1);
                    if transition.p01() == one && transition.p10() == one {
                        return Err(Error::Model(
                            "mixture components must be aperiodic; the alternating chain is periodic".into(),
                        ));
                    }
                }
                ModelKind::Mixture { .. } => {
                    return Err(Error::Model("mixture components must be ergodic, not mixtures".into()));
                }
            }
        }
        if total != Rational::from_integer(1) {
            return Err(Error::Model(format!(
                "mixture weights sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(Self {
            kind: ModelKind::Mixture { components },
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Ergodic decomposition: the model itself with weight 1 for ergodic
    /// models, the component list for mixtures.
    pub fn components(&self) -> Vec<(Rational, ProcessModel)> {
        match &self.kind {
            ModelKind::Mixture { components } => components.clone(),
            _ => vec![(Rational::from_integer(1), self.clone())],
        }
    }

    /// Entropy rate in bits per symbol. Affine over mixture components.
    pub fn entropy_rate(&self) -> f64 {
        match &self.kind {
            ModelKind::Bernoulli { p } => binary_entropy(to_f64(p)),
            ModelKind::Markov { transition } => {
                let pi = stationary_dist(transition).expect("validated at construction");
                let m = transition.as_f64();
                pi[0] * binary_entropy(m[0][1]) + pi[1] * binary_entropy(m[1][0])
            }
            ModelKind::Mixture { components } => components
                .iter()
                .map(|(w, c)| to_f64(w) * c.entropy_rate())
                .sum(),
        }
    }

    /// `P([x])` for the first `len(x)` symbols.
    pub fn block_prob(&self, x: &BitString) -> f64 {
        match &self.kind {
            ModelKind::Bernoulli { p } => {
                let p = to_f64(p);
                x.bits()
                    .iter()
                    .fold(1.0, |acc, &b| acc * if b { p } else { 1.0 - p })
            }
            ModelKind::Markov { transition } => {
                let Some(first) = x.get(0) else { return 1.0 };
                let pi = stationary_dist(transition).expect("validated at construction");
                let m = transition.as_f64();
                x.bits()
                    .windows(2)
                    .fold(pi[first as usize], |acc, w| {
                        acc * m[w[0] as usize][w[1] as usize]
                    })
            }
            ModelKind::Mixture { components } => components
                .iter()
                .map(|(w, c)| to_f64(w) * c.block_prob(x))
                .sum(),
        }
    }

    /// A sample path of length `n` together with the index of the ergodic
    /// component that generated it (always 0 for ergodic models).
    pub fn sample_path(&self, n: usize, seed: u64) -> Result<(usize, BitString)> {
        if n == 0 {
            return Err(Error::Domain("sample length must be at least 1".into()));
        }
        let mut rng = SplitMix64::seed_from_u64(seed);
        let (idx, component) = match &self.kind {
            ModelKind::Mixture { components } => {
                let u = unit(&mut rng);
                let mut acc = 0.0;
                let mut chosen = components.len() - 1;
                for (i, (w, _)) in components.iter().enumerate() {
                    acc += to_f64(w);
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                (chosen, &components[chosen].1)
            }
            _ => (0, self),
        };
        Ok((idx, component.sample_ergodic(n, &mut rng)))
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<BitString> {
        self.sample_path(n, seed).map(|(_, x)| x)
    }

    fn sample_ergodic(&self, n: usize, rng: &mut SplitMix64) -> BitString {
        let mut out = Vec::with_capacity(n);
        match &self.kind {
            ModelKind::Bernoulli { p } => {
                let p = to_f64(p);
                out.extend((0..n).map(|_| unit(rng) < p));
            }
            ModelKind::Markov { transition } => {
                let pi = stationary_dist(transition).expect("validated at construction");
                let m = transition.as_f64();
                let mut state = unit(rng) < pi[1];
                out.push(state);
                for _ in 1..n {
                    let flip = if state { m[1][0] } else { m[0][1] };
                    if unit(rng) < flip {
                        state = !state;
                    }
                    out.push(state);
                }
            }
            ModelKind::Mixture { .. } => unreachable!("mixture components are ergodic"),
        }
        BitString::from_bits(out)
    }

    /// Parses the key/value document form:
    ///
    /// ```text
    /// variant = markov
    /// row0 = 4/5 1/5
    /// row1 = 3/5 2/5
    /// ```
    ///
    /// Recognised keys: `variant` (bernoulli, markov, mixture), `p`, `flip`,
    /// `p01`, `p10`, `row0`, `row1`, and repeated `component = <w> <model>`
    /// lines where `<model>` is in the compact one-line form. `#` starts a
    /// comment.
    pub fn from_document(text: &str) -> Result<Self> {
        let mut variant = None;
        let mut keys: Vec<(String, String)> = Vec::new();
        let mut components = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "variant" => variant = Some(v.to_string()),
                "component" => {
                    let (w, m) = v.split_once(char::is_whitespace).ok_or_else(|| {
                        Error::Parse(format!("component needs '<weight> <model>', got {v:?}"))
                    })?;
                    components.push((parse_rational(w)?, m.trim().parse::<ProcessModel>()?));
                }
                _ => keys.push((k.to_string(), v.to_string())),
            }
        }
        let variant = variant.ok_or_else(|| Error::Parse("model document lacks 'variant'".into()))?;
        match variant.as_str() {
            "mixture" => {
                if !keys.is_empty() {
                    return Err(Error::Parse(format!("unexpected key {:?} for mixture", keys[0].0)));
                }
                Self::mixture(components)
            }
            "bernoulli" | "markov" => {
                if !components.is_empty() {
                    return Err(Error::Parse("components are only valid for mixtures".into()));
                }
                let params: Vec<String> = keys.iter().map(|(k, v)| format!("{k}={v}")).collect();
                parse_compact(&variant, &params.join(","))
            }
            other => Err(Error::Parse(format!("unknown model variant {other:?}"))),
        }
    }
}

fn parse_params(params: &str) -> Result<Vec<(&str, &str)>> {
    params
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn parse_row(s: &str) -> Result<[Rational; 2]> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("transition row needs two entries, got {s:?}")));
    }
    Ok([parse_rational(parts[0])?, parse_rational(parts[1])?])
}

fn parse_compact(variant: &str, params: &str) -> Result<ProcessModel> {
    let kv = parse_params(params)?;
    let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    for (k, _) in &kv {
        let known: &[&str] = match variant {
            "bernoulli" => &["p"],
            "markov" => &["flip", "p01", "p10", "row0", "row1"],
            _ => &[],
        };
        if !known.contains(k) {
            return Err(Error::Parse(format!("unknown key {k:?} for {variant}")));
        }
    }
    match variant {
        "bernoulli" => {
            let p = get("p").ok_or_else(|| Error::Parse("bernoulli needs p".into()))?;
            ProcessModel::bernoulli(parse_rational(p)?)
        }
        "markov" => {
            if let Some(flip) = get("flip") {
                return ProcessModel::markov_symmetric(parse_rational(flip)?);
            }
            if let (Some(r0), Some(r1)) = (get("row0"), get("row1")) {
                return ProcessModel::markov(TransitionMatrix::new([parse_row(r0)?, parse_row(r1)?])?);
            }
            match (get("p01"), get("p10")) {
                (Some(a), Some(b)) => ProcessModel::markov(TransitionMatrix::from_flips(
                    parse_rational(a)?,
                    parse_rational(b)?,
                )?),
                _ => Err(Error::Parse("markov needs flip, p01+p10, or row0+row1".into())),
            }
        }
        other => Err(Error::Parse(format!("unknown model variant {other:?}"))),
    }
}

impl FromStr for ProcessModel {
    type Err = Error;

    /// Compact one-line forms: `bernoulli:p=1/2`, `markov:flip=1/10`,
    /// `markov:p01=1/5,p10=3/5`, `mixture:1/2*bernoulli:p=1/10|1/2*bernoulli:p=1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (variant, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("model spec {s:?} lacks '<variant>:'")))?;
        if variant == "mixture" {
            let components = rest
                .split('|')
                .map(|part| {
                    let (w, m) = part.split_once('*').ok_or_else(|| {
                        Error::Parse(format!("mixture component {part:?} needs '<weight>*<model>'"))
                    })?;
                    Ok((parse_rational(w)?, m.parse::<ProcessModel>()?))
                })
                .collect::<Result<Vec<_>>>()?;
            return ProcessModel::mixture(components);
        }
        parse_compact(variant, rest)
    }
}

impl fmt::Display for ProcessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Bernoulli { p } => write!(f, "bernoulli:p={}", rational::format(p)),
            ModelKind::Markov { transition } => write!(
                f,
                "markov:p01={},p10={}",
                rational::format(&transition.p01()),
                rational::format(&transition.p10())
            ),
            ModelKind::Mixture { components } => {
                write!(f, "mixture:")?;
                for (i, (w, c)) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{}*{c}", rational::format(w))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn degenerate_samples() {
        let one = ProcessModel::bernoulli(q(1, 1)).unwrap();
        let zero = ProcessModel::bernoulli(q(0, 1)).unwrap();
        for seed in [0, 1, 99] {
            assert_eq!(one.sample(5, seed).unwrap().to_string(), "11111");
            assert_eq!(zero.sample(3, seed).unwrap().to_string(), "000");
        }
        assert!(one.sample(0, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let m: ProcessModel = "mixture:1/2*bernoulli:p=1/10|1/2*markov:flip=1/3".parse().unwrap();
        assert_eq!(m.sample_path(200, 42).unwrap(), m.sample_path(200, 42).unwrap());
        assert_ne!(m.sample(200, 42).unwrap(), m.sample(200, 43).unwrap());
    }

    #[test]
    fn entropy_rates() {
        assert_eq!(ProcessModel::bernoulli(q(1, 2)).unwrap().entropy_rate(), 1.0);
        let m = ProcessModel::markov_symmetric(q(1, 10)).unwrap();
        assert!((m.entropy_rate() - 0.468_995_593_589_281).abs() < 1e-12);
        let mix: ProcessModel = "mixture:1/2*bernoulli:p=0|1/2*bernoulli:p=1".parse().unwrap();
        assert_eq!(mix.entropy_rate(), 0.0);
    }

    #[test]
    fn stationary_distributions() {
        let sym = TransitionMatrix::from_flips(q(1, 10), q(1, 10)).unwrap();
        assert_eq!(stationary_dist(&sym).unwrap(), [0.5, 0.5]);
        let t = TransitionMatrix::from_flips(q(1, 5), q(3, 5)).unwrap();
        let pi = stationary_dist(&t).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-15 && (pi[1] - 0.25).abs() < 1e-15);
        let id = TransitionMatrix::new([[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]]).unwrap();
        let err = stationary_dist(&id).unwrap_err().to_string();
        assert!(err.contains("state 0"), "{err}");
        let half = TransitionMatrix::from_flips(q(1, 2), q(0, 1)).unwrap();
        assert!(stationary_dist(&half).unwrap_err().to_string().contains("state 1"));
    }

    #[test]
    fn block_probabilities() {
        let b = ProcessModel::bernoulli(q(1, 4)).unwrap();
        assert_eq!(b.block_prob(&bits("11")), 1.0 / 16.0);
        let u = ProcessModel::bernoulli(q(1, 2)).unwrap();
        assert_eq!(u.block_prob(&bits("0110101")), 2f64.powi(-7));
        let mix: ProcessModel = "mixture:1/2*bernoulli:p=0|1/2*bernoulli:p=1".parse().unwrap();
        assert_eq!(mix.block_prob(&bits("00")), 0.5);
    }

    #[test]
    fn decomposition() {
        let b = ProcessModel::bernoulli(q(3, 10)).unwrap();
        assert_eq!(b.components(), vec![(q(1, 1), b.clone())]);
        let mix: ProcessModel = "mixture:1/3*bernoulli:p=1/10|2/3*bernoulli:p=1/2".parse().unwrap();
        let comps = mix.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps.iter().map(|(w, _)| *w).sum::<Rational>(), q(1, 1));
    }

    #[test]
    fn validation() {
        assert!("mixture:1/2*bernoulli:p=1/10|1/3*bernoulli:p=1/2".parse::<ProcessModel>().is_err());
        assert!("mixture:1/2*markov:flip=1|1/2*bernoulli:p=1/2".parse::<ProcessModel>().is_err());
        assert!("bernoulli:p=3/2".parse::<ProcessModel>().is_err());
        assert!("markov:flip=0".parse::<ProcessModel>().is_err());
        assert!("bernoulli:q=1/2".parse::<ProcessModel>().is_err());
        assert!("gauss:p=1/2".parse::<ProcessModel>().is_err());
    }

    #[test]
    fn text_forms_round_trip() {
        for s in [
            "bernoulli:p=3/10",
            "markov:p01=1/5,p10=3/5",
            "mixture:1/2*bernoulli:p=1/10|1/2*bernoulli:p=1/2",
        ] {
            let m: ProcessModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        let doc = "variant = markov\nrow0 = 4/5 1/5\nrow1 = 3/5 2/5 # comment\n";
        assert_eq!(
            ProcessModel::from_document(doc).unwrap().to_string(),
            "markov:p01=1/5,p10=3/5"
        );
        let doc = "variant = mixture\ncomponent = 1/2 bernoulli:p=1/10\ncomponent = 1/2 markov:flip=1/10\n";
        assert_eq!(ProcessModel::from_document(doc).unwrap().components().len(), 2);
    }
}
