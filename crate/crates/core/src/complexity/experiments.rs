//! Exhaustive small-n scans and process sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitString;
use crate::codec;
use crate::ensembles::{self, TAG_BITS};
use crate::error::{Error, Result};
use crate::processes::{stream_seed, ProcessModel};
use crate::rational;
use crate::typical_sets::TypicalSetSpec;
use crate::Rational;

use super::{Analyzer, Config, Mode};

/// Largest length accepted by [`max_coarse_scan`].
pub const MAX_SCAN_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxCoarseScan {
    pub n: usize,
    pub delta: f64,
    pub max: f64,
    /// Lexicographically first maximiser.
    pub argmax: BitString,
    /// `(value, count)` sorted by value; counts sum to `2^n`.
    pub histogram: Vec<(f64, u64)>,
    /// `2 D(uniform-all) - 2 log2 n`.
    pub c_uniform: f64,
    /// Twice the largest singleton overhead `min(D_raw, D_LZ) - K̂(x)` over
    /// strings with `K̂(x) <= n/2 + log2 n`; zero when there are none.
    pub c_singleton: f64,
    pub c_scheme: f64,
    /// `n/2 + log2 n + c_scheme`.
    pub bound: f64,
    pub violations: u64,
}

/// Exact coarse effective complexity of every string of length `n`.
///
/// The scheme constant follows the two-case argument: strings with large
/// `K̂` are covered by the uniform distribution on all strings, the rest by
/// their cheapest singleton.
pub fn max_coarse_scan(n: usize, delta: f64, config: &Config) -> Result<MaxCoarseScan> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if n > MAX_SCAN_N || n > config.n_max {
        return Err(Error::ResourceBound(format!(
            "max-coarse scan is exhaustive; n must be <= {}",
            MAX_SCAN_N.min(config.n_max)
        )));
    }
    let log_n = (n as f64).log2();
    let threshold = n as f64 / 2.0 + log_n;
    // (coarse value, singleton overhead for small-K̂ strings)
    let rows: Vec<(f64, Option<i64>)> = (0..1u64 << n)
        .into_par_iter()
        .map(|v| {
            let x = BitString::from_u64(v, n);
            let a = Analyzer::new(&x, Mode::Exact, config)?;
            let small = a.khat() as f64 <= threshold;
            let overhead = small.then(|| a.singleton_desc_len() as i64 - a.khat() as i64);
            Ok((a.coarse(delta).0, overhead))
        })
        .collect::<Result<_>>()?;

    let mut max = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    for (v, (c, _)) in rows.iter().enumerate() {
        if *c > max {
            max = *c;
            argmax = v as u64;
        }
    }
    let mut values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    values.sort_by(f64::total_cmp);
    let mut histogram: Vec<(f64, u64)> = Vec::new();
    for v in values {
        match histogram.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => histogram.push((v, 1)),
        }
    }

    let d_all = TAG_BITS + codec::nat_len(n as u64);
    let c_uniform = 2.0 * d_all as f64 - 2.0 * log_n;
    let c_singleton = 2.0 * rows.iter().filter_map(|r| r.1).max().unwrap_or(0).max(0) as f64;
    let c_scheme = c_uniform.max(c_singleton);
    let bound = threshold + c_scheme;
    let violations = rows.iter().filter(|r| r.0 > bound + super::BUDGET_SLACK).count() as u64;
    Ok(MaxCoarseScan {
        n,
        delta,
        max,
        argmax: BitString::from_u64(argmax, n),
        histogram,
        c_uniform,
        c_singleton,
        c_scheme,
        bound,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub eps: Rational,
    pub delta: f64,
    pub n_list: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
}

/// One sampled string of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub sample: usize,
    pub seed: u64,
    pub component: usize,
    pub lz_len: u64,
    pub khat: u64,
    pub ec: Option<u64>,
    pub coarse_ec: f64,
    pub witness_tag: Option<String>,
    pub witness_params: Option<String>,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    /// Smallest grid rate at or above the component's entropy rate.
    pub r_star: String,
    /// `D(E_{r*,n}) + r* n <= K̂ + eps n`, compared exactly.
    pub budget_satisfied: bool,
    pub in_typical_set: bool,
}

/// Per-length summary of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAggregate {
    pub n: u64,
    pub samples: usize,
    pub fraction_budget_satisfied: f64,
    pub fraction_in_typical_set: f64,
    pub median_khat: u64,
    /// `None` when at least half of the domains were empty.
    pub median_ec_upper: Option<u64>,
    /// `|delta(n)| + |enc(r*)| + 3`, maximised over components.
    pub reference: u64,
    /// `log2 n + 2 log2 log2 n + c_scheme`.
    pub bound: f64,
    pub c_scheme: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
    pub c_scheme: u64,
}

/// Constant `C` with `D(uniform-typ(r, n)) <= log2 n + 2 log2 log2 n + C`
/// for every `n >= 2` and every `r` in the grid.
///
/// Uses `|delta(n)| <= log2 n + 2 log2 log2 n + 3` for `n >= 2`.
pub fn sweep_scheme_constant(config: &Config) -> u64 {
    let widest = config.r_grid.iter().map(codec::rational_len).max().unwrap_or(0);
    TAG_BITS + 3 + widest
}

fn r_star(config: &Config, h: f64) -> Result<Rational> {
    config
        .r_grid
        .iter()
        .copied()
        .find(|r| rational::to_f64(r) >= h)
        .ok_or_else(|| Error::Domain(format!("no grid rate reaches entropy rate {h}")))
}

/// Lower median; `None` sorts last.
fn lower_median<T: Ord + Copy>(mut v: Vec<T>) -> T {
    v.sort();
    v[(v.len() - 1) / 2]
}

/// Samples `samples` strings per length and checks whether the uniform
/// distribution on the typical set at the first grid rate not below the
/// generating component's entropy rate fits the budget `K̂ + eps n`.
///
/// Cell `(i, s)` (length index, sample) uses seed
/// `stream_seed(stream_seed(seed, i), s)`; rows come out ordered by
/// `(n, sample)` whatever the thread count.
pub fn theorem1_sweep(model: &ProcessModel, params: &SweepParams, config: &Config) -> Result<SweepOutput> {
    if *params.eps.numer() == 0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if params.samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    if params.n_list.is_empty() || params.n_list.windows(2).any(|w| w[0] >= w[1]) || params.n_list[0] == 0 {
        return Err(Error::Domain("n list must be positive and strictly ascending".into()));
    }
    if !(params.delta >= 0.0 && params.delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be finite and >= 0, got {}", params.delta)));
    }
    config.validate()?;
    let comps = model.components();
    let stars = comps
        .iter()
        .map(|(_, c)| r_star(config, c.entropy_rate()))
        .collect::<Result<Vec<_>>>()?;
    let c_scheme = sweep_scheme_constant(config);
    let eps = params.eps;

    let cells: Vec<(usize, usize)> = (0..params.n_list.len())
        .flat_map(|i| (0..params.samples).map(move |s| (i, s)))
        .collect();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(i, s)| -> Result<SweepRow> {
            let n = params.n_list[i];
            let seed = stream_seed(stream_seed(params.seed, i as u64), s as u64);
            let (component, x) = model.sample_path(n as usize, seed)?;
            let a = Analyzer::new(&x, Mode::Upper, config)?;
            let big_delta = rational::to_f64(&eps) * n as f64;
            let ec = a.ec(params.delta, big_delta, None);
            let (coarse_ec, _) = a.coarse(params.delta);
            let r = stars[component];
            let spec = TypicalSetSpec::new(r, n)?;
            // D + (ra/rb) n <= K + (ea/eb) n, scaled by rb * eb
            let d = ensembles::uniform_typical_desc_len(&spec) as u128;
            let (ra, rb) = (*r.numer() as u128, *r.denom() as u128);
            let (ea, eb) = (*eps.numer() as u128, *eps.denom() as u128);
            let lhs = d * rb * eb + ra * n as u128 * eb;
            let rhs = a.khat() as u128 * rb * eb + ea * n as u128 * rb;
            Ok(SweepRow {
                n,
                sample: s,
                seed,
                component,
                lz_len: a.lz_len(),
                khat: a.khat(),
                ec: ec.as_ref().map(|(v, _)| *v),
                coarse_ec,
                witness_tag: ec.as_ref().map(|(_, w)| w.tag.name().to_string()),
                witness_params: ec.as_ref().map(|(_, w)| w.params.clone()),
                delta: params.delta,
                big_delta,
                r_star: rational::format(&r),
                budget_satisfied: lhs <= rhs,
                in_typical_set: spec.admits_len(a.lz_len()),
            })
        })
        .collect::<Result<_>>()?;

    let aggregates = params
        .n_list
        .iter()
        .map(|&n| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
            let k = group.len() as f64;
            let ecs: Vec<(bool, u64)> = group
                .iter()
                .map(|r| match r.ec {
                    Some(v) => (false, v),
                    None => (true, u64::MAX),
                })
                .collect();
            let (empty, med) = lower_median(ecs);
            let reference = stars
                .iter()
                .map(|r| codec::nat_len(n) + codec::rational_len(r) + 3)
                .max()
                .unwrap_or(0);
            let log_n = (n as f64).log2();
            let loglog = if n >= 2 { log_n.log2().max(0.0) } else { 0.0 };
            SweepAggregate {
                n,
                samples: group.len(),
                fraction_budget_satisfied: group.iter().filter(|r| r.budget_satisfied).count() as f64 / k,
                fraction_in_typical_set: group.iter().filter(|r| r.in_typical_set).count() as f64 / k,
                median_khat: lower_median(group.iter().map(|r| r.khat).collect()),
                median_ec_upper: (!empty).then_some(med),
                reference,
                bound: log_n + 2.0 * loglog + c_scheme as f64,
                c_scheme,
            }
        })
        .collect();
    Ok(SweepOutput {
        rows,
        aggregates,
        c_scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_constant_for_default_grid() {
        // widest grid rate is 63/64: |delta(63)| + |delta(64)| = 10 + 11
        assert_eq!(sweep_scheme_constant(&Config::default()), 27);
    }

    #[test]
    fn scheme_constant_bounds_desc_len() {
        let cfg = Config::default();
        let c = sweep_scheme_constant(&cfg) as f64;
        for n in [2u64, 3, 4, 7, 8, 100, 1 << 12, 1 << 18, 1 << 30] {
            let l = (n as f64).log2();
            for r in &cfg.r_grid {
                let d = ensembles::uniform_typical_desc_len(&TypicalSetSpec::new(*r, n).unwrap()) as f64;
                assert!(d <= l + 2.0 * l.log2().max(0.0) + c + 1e-9, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn scan_of_length_one_is_symmetric() {
        let s = max_coarse_scan(1, 0.0, &Config::default()).unwrap();
        assert_eq!(s.histogram.len(), 1);
        assert_eq!(s.histogram[0].1, 2);
        assert_eq!(s.argmax.to_string(), "0");
    }

    #[test]
    fn scan_histogram_counts_everything() {
        let s = max_coarse_scan(6, 0.25, &Config::default()).unwrap();
        assert_eq!(s.histogram.iter().map(|h| h.1).sum::<u64>(), 64);
        assert_eq!(s.violations, 0);
    }

    #[test]
    fn scan_rejects_large_n() {
        assert!(matches!(max_coarse_scan(17, 0.0, &Config::default()), Err(Error::ResourceBound(_))));
    }

    #[test]
    fn sweep_rows_are_ordered_and_reproducible() {
        let model: ProcessModel = "bernoulli:p=1/2".parse().unwrap();
        let p = SweepParams {
            eps: Rational::new(1, 10),
            delta: 0.25,
            n_list: vec![64, 256],
            samples: 3,
            seed: 9,
        };
        let a = theorem1_sweep(&model, &p, &Config::default()).unwrap();
        let b = theorem1_sweep(&model, &p, &Config::default()).unwrap();
        assert_eq!(a, b);
        let order: Vec<(u64, usize)> = a.rows.iter().map(|r| (r.n, r.sample)).collect();
        assert_eq!(order, vec![(64, 0), (64, 1), (64, 2), (256, 0), (256, 1), (256, 2)]);
        assert_eq!(a.aggregates.len(), 2);
    }
}
