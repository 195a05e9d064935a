use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linrel::{block, generator, schur, InstanceSpec, Tolerances};

fn instance(n: usize) -> generator::Instance {
    let k = n / 2;
    let spec = InstanceSpec::new(n, k, k.saturating_sub(1), (n - k) / 2, 11);
    generator::generate(&spec, &Tolerances::default()).unwrap()
}

fn bench_analyze(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("analyze");
    for n in [2, 4, 8] {
        let inst = instance(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| block::analyze(&inst.a, &inst.s, &tol).unwrap())
        });
    }
    group.finish();
}

fn bench_schur(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("schur_complement");
    for n in [2, 4, 8] {
        let inst = instance(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| schur::schur_complement(&inst.a, &inst.s, &tol).unwrap())
        });
    }
    group.finish();
}

fn bench_pekarev(c: &mut Criterion) {
    let tol = Tolerances::default();
    let inst = instance(8);
    let rep = block::analyze(&inst.a, &inst.s, &tol).unwrap();
    c.bench_function("pekarev_8", |b| {
        b.iter(|| schur::pekarev_from_blocks(&rep, &tol).unwrap())
    });
}

criterion_group!(benches, bench_analyze, bench_schur, bench_pekarev);
criterion_main!(benches);
