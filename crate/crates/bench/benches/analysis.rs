use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlpabs_bench::{chain, DIFF, DIFF_SAMPLES};
use nlpabs_core::oracle::TransitionSystem;
use nlpabs_core::{
    analyze, parse_program, solve_rounds, EquationSystem, Groundness, Limits, ProgramGraph, Samples, SemanticsKind,
    SolverOptions,
};

fn graph(c: &mut Criterion) {
    let program = parse_program(DIFF).unwrap();
    c.bench_function("graph/diff", |b| b.iter(|| ProgramGraph::build(black_box(&program))));
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for n in [1, 4, 16] {
        let g = ProgramGraph::build(&parse_program(&chain(n)).unwrap());
        for kind in [SemanticsKind::Flat, SemanticsKind::Diamond] {
            group.bench_with_input(BenchmarkId::new(kind.to_string(), n), &g, |b, g| {
                b.iter(|| analyze(&Groundness, g, kind, SolverOptions::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn rounds(c: &mut Criterion) {
    let g = ProgramGraph::build(&parse_program(&chain(16)).unwrap());
    let ann = nlpabs_core::annotations(&Groundness, g.program()).unwrap();
    let sys = EquationSystem::build(SemanticsKind::Flat, &g, &Groundness, &ann).unwrap();
    let mut group = c.benchmark_group("rounds");
    for parallel in [false, true] {
        group.bench_with_input(BenchmarkId::from_parameter(parallel), &parallel, |b, &p| {
            b.iter(|| solve_rounds(&sys, &Groundness, p).unwrap())
        });
    }
    group.finish();
}

fn explore(c: &mut Criterion) {
    let g = ProgramGraph::build(&parse_program(DIFF).unwrap());
    let samples = Samples::parse(DIFF_SAMPLES, g.program()).unwrap();
    c.bench_function("explore/diff", |b| {
        b.iter(|| TransitionSystem::new(&g).explore(black_box(&samples), Limits::default()))
    });
}

criterion_group!(benches, graph, solve, rounds, explore);
criterion_main!(benches);
