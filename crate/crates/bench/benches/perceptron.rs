use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qperceptron::clustering::cluster;
use qperceptron::linops::{eig_extrema, Operator};
use qperceptron::{classify, train, EncodingScheme, FeatureVector, Label, NormalizationMode, RandomSource, StateVector};

fn dataset(arity: usize, n: usize, rng: &mut RandomSource) -> Vec<FeatureVector> {
    (0..n)
        .map(|k| {
            let f = (0..arity).map(|_| rng.uniform()).collect();
            FeatureVector::labeled(f, if k % 2 == 0 { Label::Minus } else { Label::Plus })
        })
        .collect()
}

fn bench_train(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_qubit");
    let mut rng = RandomSource::new(1);
    for arity in [2, 4, 6, 8] {
        let data = dataset(arity, 32, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(1 << arity), &data, |b, data| {
            b.iter(|| train(black_box(data), EncodingScheme::Qubit, NormalizationMode::Rescale).unwrap())
        });
    }
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    let mut rng = RandomSource::new(2);
    for arity in [2, 4, 6, 8] {
        let data = dataset(arity, 32, &mut rng);
        let model = train(&data, EncodingScheme::Qubit, NormalizationMode::Rescale).unwrap();
        let state = EncodingScheme::Qubit.encode(&data[0]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(1 << arity), &state, |b, s| {
            b.iter(|| classify(&model, black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_extrema");
    let mut rng = RandomSource::new(3);
    for dim in [4usize, 16, 64, 256] {
        let mut op = Operator::zeros(dim);
        for _ in 0..8 {
            let amps: Vec<f64> = (0..dim).map(|_| rng.uniform() - 0.5).collect();
            op.add_projector(&StateVector::from_real(&amps).unwrap()).unwrap();
        }
        group.bench_with_input(BenchmarkId::from_parameter(dim), &op, |b, op| b.iter(|| eig_extrema(black_box(op)).unwrap()));
    }
    group.finish();
}

fn bench_cluster(c: &mut Criterion) {
    let mut group = c.benchmark_group("cluster");
    let mut rng = RandomSource::new(4);
    for n in [16usize, 64, 256] {
        let states: Vec<StateVector> = (0..n)
            .map(|_| StateVector::from_real(&(0..8).map(|_| rng.uniform() + 0.01).collect::<Vec<_>>()).unwrap())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &states, |b, s| b.iter(|| cluster(black_box(s)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_train, bench_classify, bench_eig, bench_cluster);
criterion_main!(benches);
