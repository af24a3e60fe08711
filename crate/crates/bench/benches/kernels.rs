//! Benchmarks for the hot kernels: the dense Hermitian eigensolver, the
//! closed-form torus spectra, and the variable-metric operator assembly.
//!
//! Run with `cargo bench -p dirac-bench`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirac_core::clifford::build_rep;
use dirac_core::fourier::SparseTable;
use dirac_core::frames::InnerProduct;
use dirac_core::linalg::{eigvals_hermitian, CMatrix, HermitianMatrix, RMatrix, C64};
use dirac_core::metric::MetricField;
use dirac_core::qtorus::{qt_spectrum, TorusTripleSpec};
use dirac_core::riemann::{assemble_dirac, SpinStructure};

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let m = CMatrix::from_shape_fn((n, n), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianMatrix::symmetrized(m).0
}

fn one_cosine_metric(r: usize) -> MetricField {
    let g = MetricField::flat(2, r).unwrap();
    let mut t = SparseTable::new(2).unwrap();
    t.insert_real_pair([1, 0], C64::new(0.2, 0.0)).unwrap();
    let zero = SparseTable::new(2).unwrap();
    g.add_scaled(&[t, zero.clone(), zero], 1.0).unwrap()
}

fn bench_eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigvals_hermitian");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &n in &[200usize, 600, 1200] {
        let m = random_hermitian(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| eigvals_hermitian(m).unwrap())
        });
    }
    group.finish();
}

fn bench_qt_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("qt_spectrum");
    group.sample_size(20);
    let h = RMatrix::from_shape_vec((2, 2), vec![1.3, 0.2, 0.2, 0.9]).unwrap();
    for &n in &[16usize, 32] {
        let spec =
            TorusTripleSpec::new(InnerProduct::new(h.clone()).unwrap(), n, 1.0, None).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| {
            b.iter(|| qt_spectrum(spec, None).unwrap())
        });
    }
    group.finish();
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_dirac");
    group.sample_size(10);
    let g = one_cosine_metric(64);
    let rep = build_rep(2, 1, None).unwrap();
    for &n in &[6usize, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| assemble_dirac(&g, n, &rep, SpinStructure::Periodic).unwrap())
        });
    }
    group.finish();
}

fn bench_spectrum_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly_plus_spectrum");
    group.sample_size(10);
    let g = one_cosine_metric(64);
    let rep = build_rep(2, 1, None).unwrap();
    group.bench_function("n_trunc=8", |b| {
        b.iter(|| {
            assemble_dirac(&g, 8, &rep, SpinStructure::Periodic)
                .unwrap()
                .spectrum(None)
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_eigensolver,
    bench_qt_spectrum,
    bench_assembly,
    bench_spectrum_pipeline
);
criterion_main!(benches);
