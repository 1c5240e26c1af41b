use std::collections::BTreeSet;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ordtree::{ad_extend, back_and_forth, dp, homogenize, ADFamily, IsoOptions, SeededShuffle};
use ordtree_bench::{coloured_tree, terms};

fn rank(c: &mut Criterion) {
    let corpus = terms(1000);
    c.bench_function("dp/1000 terms", |b| {
        b.iter(|| corpus.iter().map(|t| dp(black_box(t), None).is_ok() as usize).sum::<usize>())
    });
}

fn games(c: &mut Criterion) {
    let (t, colouring) = coloured_tree(3, 4, 11);
    c.bench_function("homogenize/complete 3^4", |b| b.iter(|| homogenize(black_box(&t), &colouring)));
}

fn iso(c: &mut Criterion) {
    let palette: BTreeSet<u32> = [0, 1, 2].into();
    let a = SeededShuffle::new(palette.clone(), 1, 4095);
    let b = SeededShuffle::new(palette, 2, 4095);
    let opts = IsoOptions::rounds(100);
    c.bench_function("back_and_forth/100 rounds", |bch| bch.iter(|| back_and_forth(&a, &b, &opts)));
}

fn families(c: &mut Criterion) {
    let f = ADFamily::branches(6, 1 << 20).expect("valid family");
    let order: Vec<usize> = (0..f.sets.len()).collect();
    c.bench_function("ad_extend/64 branches", |b| b.iter(|| ad_extend(black_box(&f), &order, 64)));
}

criterion_group!(benches, rank, games, iso, families);
criterion_main!(benches);
