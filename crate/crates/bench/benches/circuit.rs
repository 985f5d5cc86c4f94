use criterion::{black_box, criterion_group, criterion_main, Criterion};

use spinorbit_core::circuitfile::{parse_circuit, serialize_circuit};
use spinorbit_core::optics::{ensemble_density, mdms_circuit, run_circuit, SourceProbabilities};
use spinorbit_core::profile::{intensity_map, GridConfig};
use spinorbit_core::states::rank3;

const FIG1: &str = include_str!("../../../circuits/fig1.circuit");

fn bench(c: &mut Criterion) {
    let circuit = mdms_circuit(
        std::f64::consts::FRAC_PI_8,
        0.0,
        0.5,
        0.4,
        SourceProbabilities::default(),
    )
    .unwrap();
    c.bench_function("run preparation circuit", |b| {
        b.iter(|| ensemble_density(&run_circuit(black_box(&circuit)).unwrap()).unwrap())
    });
    c.bench_function("parse circuit file", |b| {
        b.iter(|| parse_circuit(black_box(FIG1)).unwrap())
    });
    c.bench_function("serialize circuit", |b| {
        b.iter(|| serialize_circuit(black_box(&circuit)))
    });

    let rho = rank3(0.25, 0.3).unwrap();
    let grid = GridConfig::default();
    c.bench_function("intensity map 256x256", |b| {
        b.iter(|| intensity_map(black_box(&rho), &grid).unwrap())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
