use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shortcuts_bench::fixture;
use shortcuts_core::construct::{build_shortcut, ConstructorConfig, Method};
use shortcuts_core::decomp::compress_cliquesum;
use shortcuts_core::harness::Family;

fn constructors(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_shortcut");
    group.sample_size(10);
    let cases = [
        (Family::Grid, vec![("k", 16)], Method::Treewidth),
        (Family::Grid, vec![("k", 32)], Method::Treewidth),
        (Family::RandomPlanar, vec![("n", 1000)], Method::Treewidth),
        (Family::ApexedPlanar, vec![("k", 16), ("apices", 2)], Method::Apex),
        (Family::PlanarWithVortex, vec![("k", 16)], Method::Auto),
        (Family::CliquesumChain, vec![("bags", 512)], Method::Cliquesum),
        (Family::CliquesumTree, vec![("bags", 512)], Method::Cliquesum),
    ];
    for (family, params, method) in cases {
        let f = fixture(family, &params);
        let cfg = ConstructorConfig { method, ..ConstructorConfig::default() };
        let inst = &f.instance;
        group.bench_function(BenchmarkId::new(method.name(), &f.label), |b| {
            b.iter(|| build_shortcut(&inst.graph, inst.decomposition.as_ref(), &f.tree, &inst.parts, &cfg).unwrap())
        });
    }
    group.finish();
}

fn compression(c: &mut Criterion) {
    let mut group = c.benchmark_group("compress_cliquesum");
    for bags in [256, 1024, 4096] {
        let f = fixture(Family::CliquesumChain, &[("bags", bags)]);
        let cs = f.instance.decomposition.unwrap();
        group.bench_function(BenchmarkId::from_parameter(bags), |b| b.iter(|| compress_cliquesum(&cs)));
    }
    group.finish();
}

criterion_group!(benches, constructors, compression);
criterion_main!(benches);
