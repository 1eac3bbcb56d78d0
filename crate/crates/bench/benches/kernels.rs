use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ecx_bench::markov_string;
use ecx_core::complexity::{Analyzer, Config};
use ecx_core::typical_sets::LzHistogram;
use ecx_core::{lz78, Mode};

fn lz(c: &mut Criterion) {
    let mut g = c.benchmark_group("lz78");
    for log2 in [12u32, 16, 20] {
        let n = 1usize << log2;
        let x = markov_string(n, 1);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("code_len", n), &x, |b, x| b.iter(|| lz78::code_len(x).unwrap()));
        g.bench_with_input(BenchmarkId::new("encode", n), &x, |b, x| b.iter(|| lz78::encode(x).unwrap()));
    }
    g.finish();
}

fn histogram(c: &mut Criterion) {
    let mut g = c.benchmark_group("histogram");
    g.sample_size(10);
    for n in [12usize, 16] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| LzHistogram::build(n)));
    }
    g.finish();
}

fn analyzer(c: &mut Criterion) {
    let config = Config::default();
    let mut g = c.benchmark_group("analyzer");
    g.sample_size(20);
    for (n, mode) in [(16usize, Mode::Exact), (4096, Mode::Upper), (65536, Mode::Upper)] {
        let x = markov_string(n, 2);
        // warm the family cache so the loop measures the search only
        Analyzer::new(&x, mode, &config).unwrap();
        g.bench_with_input(BenchmarkId::new(format!("{mode}"), n), &x, |b, x| {
            b.iter(|| {
                let a = Analyzer::new(x, mode, &config).unwrap();
                (a.khat(), a.ec(0.25, n as f64 / 10.0, None), a.coarse(0.25))
            })
        });
    }
    g.finish();
}

criterion_group!(benches, lz, histogram, analyzer);
criterion_main!(benches);
