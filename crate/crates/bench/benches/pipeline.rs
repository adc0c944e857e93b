use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thrg_bench::{er_graph, growing_graph};
use thrg_core::decompose::{
    binarize, enumerate_maximal_cliques, prune_cnf, static_tree_decomposition,
    temporal_tree_decomposition,
};
use thrg_core::generate::{generate_exact_with_table, SizeWeightTable};
use thrg_core::grammar::{extract_rules, GrammarMeta};
use thrg_core::metrics::{hop_distance_cdf, orbit_counts};

fn bench_decomposition(c: &mut Criterion) {
    let g = growing_graph(120, 3, 10, 7);
    c.bench_function("temporal_tree_decomposition n=120", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            temporal_tree_decomposition(&g, &mut rng).unwrap()
        })
    });
    let full = g.full_graph();
    c.bench_function("static_min_fill n=120", |b| {
        b.iter(|| static_tree_decomposition(&full).unwrap())
    });
}

fn bench_cliques(c: &mut Criterion) {
    let g = er_graph(60, 0.2, 3);
    c.bench_function("maximal_cliques er(60,0.2)", |b| {
        b.iter(|| enumerate_maximal_cliques(&g))
    });
}

fn bench_generation(c: &mut Criterion) {
    let g = growing_graph(100, 2, 8, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let td = binarize(prune_cnf(
        temporal_tree_decomposition(&g, &mut rng).unwrap(),
    ));
    let grammar = extract_rules(&td, 0, GrammarMeta::default()).unwrap();
    let n = g.vertex_count();
    c.bench_function("size_weight_table n=100", |b| {
        b.iter(|| SizeWeightTable::build(&grammar, n).unwrap())
    });
    let table = SizeWeightTable::build(&grammar, n).unwrap();
    c.bench_function("generate_exact n=100", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            generate_exact_with_table(&grammar, &table, n, &mut rng).unwrap()
        })
    });
}

fn bench_metrics(c: &mut Criterion) {
    let g = er_graph(100, 0.1, 9);
    c.bench_function("orbit_counts er(100,0.1)", |b| b.iter(|| orbit_counts(&g)));
    c.bench_function("hop_cdf er(100,0.1)", |b| {
        b.iter(|| hop_distance_cdf(&g).unwrap())
    });
}

criterion_group!(
    benches,
    bench_decomposition,
    bench_cliques,
    bench_generation,
    bench_metrics
);
criterion_main!(benches);
