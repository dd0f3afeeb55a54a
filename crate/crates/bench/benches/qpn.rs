use criterion::{criterion_group, criterion_main, Criterion};
use qpn_core::scenarios::{HE_OX_TEMP, HE_OX_TEMP_PROBE};
use qpn_core::{
    find_counterexample, influence_sign, mlrp_check, propagate, satisfies_qpn,
    shuttle_distribution, shuttle_qpn, table1_fixture, two_node_qpn, Claim, Mode, Sign,
};
use std::hint::black_box;

fn dependence(c: &mut Criterion) {
    let table = table1_fixture();
    c.bench_function("influence_sign table1", |b| {
        b.iter(|| influence_sign(black_box(&table), "Y", "X", &[]).unwrap())
    });
    c.bench_function("mlrp_check table1", |b| {
        b.iter(|| mlrp_check(black_box(&table), "X", "Y").unwrap())
    });
}

fn shuttle(c: &mut Criterion) {
    let qpn = shuttle_qpn();
    let table = shuttle_distribution(0.05).unwrap();
    c.bench_function("propagate shuttle", |b| {
        b.iter(|| propagate(black_box(&qpn), HE_OX_TEMP_PROBE, Sign::Plus, Mode::Sound).unwrap())
    });
    c.bench_function("satisfies_qpn shuttle", |b| {
        b.iter(|| satisfies_qpn(black_box(&table), &qpn).unwrap())
    });
    c.bench_function("influence_sign shuttle probe->temp", |b| {
        b.iter(|| influence_sign(black_box(&table), HE_OX_TEMP_PROBE, HE_OX_TEMP, &[]).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let qpn = two_node_qpn(2);
    let claim: Claim = "Y->X:+".parse().unwrap();
    let mut group = c.benchmark_group("counterexample");
    group.sample_size(10);
    group.bench_function("binary 10k trials", |b| {
        b.iter(|| find_counterexample(black_box(&qpn), &claim, 42, 10_000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dependence, shuttle, search);
criterion_main!(benches);
