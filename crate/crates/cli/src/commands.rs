use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ecx_core::complexity::{self, Analyzer, SweepParams, SweepRow, Tolerance};
use ecx_core::processes::stream_seed;
use ecx_core::rational::{self, to_f64};
use ecx_core::selftest::{self, Options};
use ecx_core::typical_sets::TypicalSetSpec;
use ecx_core::{lz78, BitString, ComplexityQuery, Config, Mode, ProcessModel, Rational};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Cli, Command, FamilyArgs, Format, ModelArgs};
use crate::output::{self, write_rows, Bits};
use crate::UsageError;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn family_config(a: &FamilyArgs) -> Result<Config> {
    let mut c = Config {
        n_max: a.n_max,
        m_max: a.m_max,
        ..Config::default()
    };
    if let Some(g) = &a.r_grid {
        c.r_grid = complexity::parse_grid(g).context("--r-grid")?;
    }
    c.validate()?;
    Ok(c)
}

fn resolve_model(m: &ModelArgs) -> Result<Option<ProcessModel>> {
    if let Some(p) = &m.model_file {
        let text = fs::read_to_string(p).with_context(|| format!("reading --model-file {}", p.display()))?;
        let model = ProcessModel::from_document(&text)
            .map_err(|e| usage(format!("--model-file {}: {e}", p.display())))?;
        return Ok(Some(model));
    }
    Ok(m.model.clone())
}

fn require_model(m: &ModelArgs) -> Result<ProcessModel> {
    resolve_model(m)?.ok_or_else(|| usage("--model or --model-file is required"))
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| usage("--seed is required when sampling from --model"))
}

fn require_lengths(n: &[u64]) -> Result<()> {
    if n.is_empty() {
        return Err(usage("--n is required when sampling from --model"));
    }
    if n.contains(&0) {
        return Err(usage("--n values must be positive"));
    }
    Ok(())
}

fn cell_seed(seed: u64, length_index: usize, sample: usize) -> u64 {
    stream_seed(stream_seed(seed, length_index as u64), sample as u64)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn power_of_two(r: &Rational, n: u64) -> String {
    let e = *r * Rational::from_integer(n);
    if *e.denom() == 1 {
        format!("2^{}", e.numer())
    } else {
        format!("2^({})", rational::format(&e))
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let config = family_config(&cli.family)?;
    let mut out = output::sink(cli.output.as_deref())?;
    let f = cli.format;
    match cli.command {
        Command::Gen {
            model,
            n,
            seed,
            count,
            hex,
        } => gen(&mut *out, f, &require_model(&model)?, n, seed, count, hex)?,
        Command::Lz {
            x,
            decode,
            encode,
            model,
            n_list,
            samples,
            seed,
            summary,
        } => {
            if let Some(b) = decode {
                #[derive(Serialize)]
                struct Row {
                    n: usize,
                    x: String,
                }
                let x = lz78::decode(&b)?;
                write_rows(&mut *out, f, &[Row { n: x.len(), x: x.to_string() }])?;
            } else if let Some(x) = x {
                lz_single(&mut *out, f, &x, encode)?;
            } else {
                let model = require_model(&model)?;
                require_lengths(&n_list)?;
                lz_sampled(&mut *out, f, &model, &n_list, samples, require_seed(seed)?, summary)?;
            }
        }
        Command::Typical {
            r,
            n_list,
            model,
            samples,
            seed,
            list,
        } => {
            let model = resolve_model(&model)?;
            let seed = if model.is_some() { Some(require_seed(seed)?) } else { None };
            typical(&mut *out, f, &config, &r, &n_list, model.as_ref(), samples, seed, list)?;
        }
        Command::Khat { x, mode } => {
            #[derive(Serialize)]
            struct Row {
                n: u64,
                lz_len: u64,
                khat: u64,
                mode: Mode,
                witness_tag: &'static str,
                witness_params: String,
                witness_bits: String,
            }
            let rows = x
                .iter()
                .map(|x| {
                    let a = Analyzer::new(x, mode, &config)?;
                    let w = a.khat_witness();
                    Ok(Row {
                        n: a.n(),
                        lz_len: a.lz_len(),
                        khat: a.khat(),
                        mode,
                        witness_tag: w.tag.name(),
                        witness_params: w.params,
                        witness_bits: w.serialization.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_rows(&mut *out, f, &rows)?;
        }
        Command::Ec {
            x,
            model,
            n_list,
            samples,
            seed,
            delta,
            big_delta,
            eps,
            mode,
            constraint,
        } => {
            let tolerance = match (big_delta, eps) {
                (Some(d), None) => Tolerance::Bits(to_f64(&d)),
                (None, Some(e)) => Tolerance::PerSymbol(e),
                _ => return Err(usage("exactly one of --Delta and --eps is required")),
            };
            let mut q = ComplexityQuery::new(to_f64(&delta), tolerance, mode)?;
            if let Some(c) = constraint {
                q = q.with_constraint(c);
            }
            let strings: Vec<(usize, Option<u64>, BitString)> = match x {
                Some(x) => vec![(0, None, x)],
                None => {
                    let model = require_model(&model)?;
                    require_lengths(&n_list)?;
                    let seed = require_seed(seed)?;
                    let mut v = Vec::new();
                    for (i, &n) in n_list.iter().enumerate() {
                        for s in 0..samples {
                            let cs = cell_seed(seed, i, s);
                            v.push((s, Some(cs), model.sample(n as usize, cs)?));
                        }
                    }
                    v
                }
            };
            let rows = strings
                .par_iter()
                .map(|(s, seed, x)| report_row(x, *s, *seed, &q, &config))
                .collect::<Result<Vec<_>>>()?;
            write_rows(&mut *out, f, &rows)?;
        }
        Command::CoarseEc { x, delta, mode } => {
            #[derive(Serialize)]
            struct Row {
                n: u64,
                lz_len: u64,
                khat: u64,
                coarse_ec: f64,
                mode: Mode,
                witness_tag: &'static str,
                witness_params: String,
                delta: f64,
            }
            let d = to_f64(&delta);
            let rows = x
                .iter()
                .map(|x| {
                    let a = Analyzer::new(x, mode, &config)?;
                    let (c, w) = a.coarse(d);
                    Ok(Row {
                        n: a.n(),
                        lz_len: a.lz_len(),
                        khat: a.khat(),
                        coarse_ec: c,
                        mode,
                        witness_tag: w.tag.name(),
                        witness_params: w.params,
                        delta: d,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_rows(&mut *out, f, &rows)?;
        }
        Command::SweepTheorem1 {
            model,
            eps,
            delta,
            n_list,
            samples,
            seed,
            rows,
        } => {
            let model = require_model(&model)?;
            let params = SweepParams {
                eps,
                delta: to_f64(&delta),
                n_list,
                samples,
                seed,
            };
            let res = complexity::theorem1_sweep(&model, &params, &config)?;
            #[derive(Serialize)]
            struct Agg {
                n: u64,
                samples: usize,
                fraction_budget_satisfied: f64,
                fraction_in_typical_set: f64,
                median_khat: u64,
                median_ec_upper: Bits,
                reference: u64,
                bound: f64,
                c_scheme: u64,
            }
            let aggs: Vec<Agg> = res
                .aggregates
                .iter()
                .map(|a| Agg {
                    n: a.n,
                    samples: a.samples,
                    fraction_budget_satisfied: a.fraction_budget_satisfied,
                    fraction_in_typical_set: a.fraction_in_typical_set,
                    median_khat: a.median_khat,
                    median_ec_upper: Bits(a.median_ec_upper),
                    reference: a.reference,
                    bound: a.bound,
                    c_scheme: a.c_scheme,
                })
                .collect();
            write_rows(&mut *out, f, &aggs)?;
            if let Some(p) = rows {
                let per: Vec<SweepReportRow> = res.rows.iter().map(SweepReportRow::from).collect();
                let mut w = output::sink(Some(Path::new(&p)))?;
                write_rows(&mut *w, f, &per)?;
            }
        }
        Command::ScanMaxCoarse {
            n_list,
            delta,
            histogram,
        } => {
            let d = to_f64(&delta);
            let scans = n_list
                .iter()
                .map(|&n| complexity::max_coarse_scan(n, d, &config))
                .collect::<ecx_core::Result<Vec<_>>>()?;
            if histogram {
                #[derive(Serialize)]
                struct Row {
                    n: usize,
                    value: f64,
                    count: u64,
                }
                let rows: Vec<Row> = scans
                    .iter()
                    .flat_map(|s| s.histogram.iter().map(|&(value, count)| Row { n: s.n, value, count }))
                    .collect();
                write_rows(&mut *out, f, &rows)?;
            } else {
                #[derive(Serialize)]
                struct Row {
                    n: usize,
                    delta: f64,
                    strings: u64,
                    max: f64,
                    argmax: String,
                    c_uniform: f64,
                    c_singleton: f64,
                    c_scheme: f64,
                    bound: f64,
                    violations: u64,
                }
                let rows: Vec<Row> = scans
                    .iter()
                    .map(|s| Row {
                        n: s.n,
                        delta: s.delta,
                        strings: s.histogram.iter().map(|h| h.1).sum(),
                        max: s.max,
                        argmax: s.argmax.to_string(),
                        c_uniform: s.c_uniform,
                        c_singleton: s.c_singleton,
                        c_scheme: s.c_scheme,
                        bound: s.bound,
                        violations: s.violations,
                    })
                    .collect();
                write_rows(&mut *out, f, &rows)?;
            }
        }
        Command::Selftest { quick, seed } => {
            let mut opts = if quick { Options::quick() } else { Options::default() };
            opts.seed = seed;
            let results = selftest::run_all(&opts, &config, |r| {
                let _ = writeln!(out, "{}", r.line());
                let _ = out.flush();
            });
            let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
            for r in &failed {
                for case in &r.failures {
                    writeln!(out, "  {}: {case}", r.name)?;
                }
            }
            let passed = results.len() - failed.len();
            writeln!(out, "{passed}/{} suites passed", results.len())?;
            out.flush()?;
            if !failed.is_empty() {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

fn gen(out: &mut dyn Write, f: Format, model: &ProcessModel, n: usize, seed: u64, count: usize, hex: bool) -> Result<()> {
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    #[derive(Serialize)]
    struct Row {
        sample: usize,
        seed: u64,
        component: usize,
        n: usize,
        bits: String,
    }
    let rows = (0..count)
        .into_par_iter()
        .map(|s| {
            let cs = stream_seed(seed, s as u64);
            let (component, x) = model.sample_path(n, cs)?;
            Ok(Row {
                sample: s,
                seed: cs,
                component,
                n,
                bits: if hex { format!("hex:{}:{}", x.len(), x.to_hex()) } else { x.to_string() },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(out, f, &rows)
}

fn lz_single(out: &mut dyn Write, f: Format, x: &BitString, encode: bool) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        phrases: usize,
        lz_len: u64,
        rate: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        encoding: Option<String>,
    }
    let p = lz78::parse(x)?;
    let lz_len = p.code_len();
    let encoding = if encode { Some(lz78::encode(x)?.to_string()) } else { None };
    write_rows(
        out,
        f,
        &[Row {
            n: x.len(),
            phrases: p.phrases.len(),
            lz_len,
            rate: lz_len as f64 / x.len() as f64,
            encoding,
        }],
    )
}

fn lz_sampled(
    out: &mut dyn Write,
    f: Format,
    model: &ProcessModel,
    n_list: &[u64],
    samples: usize,
    seed: u64,
    summary: bool,
) -> Result<()> {
    #[derive(Serialize, Clone)]
    struct Row {
        n: u64,
        sample: usize,
        seed: u64,
        component: usize,
        lz_len: u64,
        rate: f64,
        entropy_rate: f64,
        nearest_component: usize,
    }
    let rates: Vec<f64> = model.components().iter().map(|(_, c)| c.entropy_rate()).collect();
    let cells: Vec<(usize, usize)> = (0..n_list.len()).flat_map(|i| (0..samples).map(move |s| (i, s))).collect();
    let rows = cells
        .par_iter()
        .map(|&(i, s)| {
            let n = n_list[i];
            let cs = cell_seed(seed, i, s);
            let (component, x) = model.sample_path(n as usize, cs)?;
            let lz_len = lz78::code_len(&x)?;
            let rate = lz_len as f64 / n as f64;
            let mut nearest = 0;
            for (k, h) in rates.iter().enumerate() {
                if (rate - h).abs() < (rate - rates[nearest]).abs() {
                    nearest = k;
                }
            }
            Ok(Row {
                n,
                sample: s,
                seed: cs,
                component,
                lz_len,
                rate,
                entropy_rate: rates[component],
                nearest_component: nearest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !summary {
        return write_rows(out, f, &rows);
    }
    #[derive(Serialize)]
    struct Summary {
        n: u64,
        samples: usize,
        median_rate: f64,
        median_abs_error: f64,
        classification_accuracy: f64,
    }
    let sums: Vec<Summary> = n_list
        .iter()
        .map(|&n| {
            let g: Vec<&Row> = rows.iter().filter(|r| r.n == n).collect();
            Summary {
                n,
                samples: g.len(),
                median_rate: median(g.iter().map(|r| r.rate).collect()),
                median_abs_error: median(g.iter().map(|r| (r.rate - r.entropy_rate).abs()).collect()),
                classification_accuracy: g.iter().filter(|r| r.nearest_component == r.component).count() as f64
                    / g.len() as f64,
            }
        })
        .collect();
    write_rows(out, f, &sums)
}

#[allow(clippy::too_many_arguments)]
fn typical(
    out: &mut dyn Write,
    f: Format,
    config: &Config,
    rates: &[Rational],
    n_list: &[u64],
    model: Option<&ProcessModel>,
    samples: usize,
    seed: Option<u64>,
    list: bool,
) -> Result<()> {
    if list {
        #[derive(Serialize)]
        struct Row {
            r: String,
            n: u64,
            x: String,
        }
        let mut rows = Vec::new();
        for r in rates {
            for &n in n_list {
                let spec = TypicalSetSpec::new(*r, n)?;
                for x in spec.enumerate_with_limit(config.n_max)? {
                    rows.push(Row {
                        r: rational::format(r),
                        n,
                        x: x.to_string(),
                    });
                }
            }
        }
        if rows.is_empty() && f == Format::Csv {
            writeln!(out, "r,n,x")?;
            out.flush()?;
            return Ok(());
        }
        return write_rows(out, f, &rows);
    }
    #[derive(Serialize)]
    struct Row {
        r: String,
        n: u64,
        #[serde(rename = "cardinality-or-estimate")]
        value: String,
        bound: String,
        method: &'static str,
    }
    let mut rows = Vec::new();
    for r in rates {
        for &n in n_list {
            let spec = TypicalSetSpec::new(*r, n)?;
            let (value, method) = match (model, seed) {
                (Some(m), Some(seed)) => (spec.empirical_prob(m, samples, seed)?.to_string(), "empirical-prob"),
                _ => (spec.cardinality_with_limit(config.n_max)?.to_string(), "exact"),
            };
            rows.push(Row {
                r: rational::format(r),
                n,
                value,
                bound: power_of_two(r, n),
                method,
            });
        }
    }
    write_rows(out, f, &rows)
}

/// Report row; columns up to `Delta` are the fixed report schema.
#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub n: u64,
    pub sample: usize,
    pub seed: Option<u64>,
    pub lz_len: u64,
    pub khat: u64,
    pub ec: Bits,
    pub ec_mode: Mode,
    pub coarse_ec: f64,
    pub witness_tag: String,
    pub witness_params: String,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
}

fn report_row(x: &BitString, sample: usize, seed: Option<u64>, q: &ComplexityQuery, config: &Config) -> Result<ReportRow> {
    let a = Analyzer::new(x, q.mode, config)?;
    let r = a.report(q, config);
    Ok(ReportRow {
        n: r.n,
        sample,
        seed,
        lz_len: r.lz_len,
        khat: r.khat,
        ec: Bits(r.ec),
        ec_mode: r.mode,
        coarse_ec: r.coarse_ec,
        witness_tag: r.ec_witness.as_ref().map(|w| w.tag.name().to_string()).unwrap_or_default(),
        witness_params: r.ec_witness.map(|w| w.params).unwrap_or_default(),
        delta: r.delta,
        big_delta: r.big_delta,
    })
}

#[derive(Debug, Serialize)]
struct SweepReportRow {
    n: u64,
    sample: usize,
    seed: u64,
    lz_len: u64,
    khat: u64,
    ec: Bits,
    ec_mode: Mode,
    coarse_ec: f64,
    witness_tag: String,
    witness_params: String,
    delta: f64,
    #[serde(rename = "Delta")]
    big_delta: f64,
    component: usize,
    r_star: String,
    budget_satisfied: bool,
    in_typical_set: bool,
}

impl From<&SweepRow> for SweepReportRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            n: r.n,
            sample: r.sample,
            seed: r.seed,
            lz_len: r.lz_len,
            khat: r.khat,
            ec: Bits(r.ec),
            ec_mode: Mode::Upper,
            coarse_ec: r.coarse_ec,
            witness_tag: r.witness_tag.clone().unwrap_or_default(),
            witness_params: r.witness_params.clone().unwrap_or_default(),
            delta: r.delta,
            big_delta: r.big_delta,
            component: r.component,
            r_star: r.r_star.clone(),
            budget_satisfied: r.budget_satisfied,
            in_typical_set: r.in_typical_set,
        }
    }
}
