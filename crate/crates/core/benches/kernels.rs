//! Parallel-vs-sequential comparison of the hot kernels. Every group runs the
//! same operation twice: once with the rayon path (default) and once with the
//! sequential fallback forced, so the speedup is visible directly in the
//! criterion report.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortexlab::{set_force_sequential, spectral, TorusGrid};

fn random_complex(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn random_real(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn bench_paths<F: FnMut()>(c: &mut Criterion, group: &str, mut run: F) {
    let mut g = c.benchmark_group(group);
    for &seq in &[false, true] {
        let label = if seq { "sequential" } else { "parallel" };
        g.bench_with_input(BenchmarkId::from_parameter(label), &seq, |b, &seq| {
            set_force_sequential(seq);
            b.iter(&mut run);
            set_force_sequential(false);
        });
    }
    g.finish();
}

fn spectral_kernels(c: &mut Criterion) {
    let grid = TorusGrid::new(256, 256, 10.0, 10.0).unwrap();
    let phi = random_complex(grid.len(), 1);
    let re = random_real(grid.len(), 2);

    let g = grid.clone();
    let p = phi.clone();
    bench_paths(c, "dx_complex_256", move || {
        let _ = spectral::dx(&g, &p).unwrap();
    });

    let g = grid.clone();
    let p = phi.clone();
    bench_paths(c, "dy_twisted_256_d2", move || {
        let _ = spectral::dy_twisted(&g, &p, 2).unwrap();
    });

    let g = grid.clone();
    let r = re.clone();
    bench_paths(c, "laplacian_256", move || {
        let _ = spectral::laplacian_real(&g, &r).unwrap();
    });

    let g = grid.clone();
    let r = re.clone();
    bench_paths(c, "helmholtz_solve_256", move || {
        let _ = spectral::helmholtz_solve(&g, &r, 1.0).unwrap();
    });
}

criterion_group!(benches, spectral_kernels);
criterion_main!(benches);
