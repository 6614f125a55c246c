//! Benchmarks of the hot paths: structured-resolvent evaluation, the
//! Hermitian eigensolver behind PSD checks, pencil transfer functions,
//! sample-based reconstruction, and the tuple functional calculus.

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use polyreal::pencil::build_pencil_from_herglotz_rep;
use polyreal::realize::{realize_schur_from_samples, DecompositionSample};
use polyreal::verify::{
    self, disk_points, eval_schur_on_tuple, halfplane_points, TupleKind,
};
use polyreal::{linalg, ComplexMatrix, Tolerances};
use std::hint::black_box;

fn tols() -> Tolerances {
    Tolerances::default()
}

fn bench_hermitian_eig(c: &mut Criterion) {
    let tol = tols();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        let step = |s: &mut u64| {
            *s ^= *s << 13;
            *s ^= *s >> 7;
            *s ^= *s << 17;
            (*s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        Complex64::new(step(&mut state), step(&mut state))
    };
    let g = ComplexMatrix::from_fn(32, 32, |_, _| next());
    let m = g.hermitian_part();
    c.bench_function("hermitian_eig_32", |b| {
        b.iter(|| linalg::hermitian_eig(black_box(&m), &tol).unwrap())
    });
}

fn bench_eval_sweep(c: &mut Criterion) {
    let tol = tols();
    let col = verify::random_schur_gr(2, 8, 2, 11, &tol).unwrap();
    let pts = disk_points(2, 50, 0);
    c.bench_function("schur_eval_sweep_n8_d2_50pts", |b| {
        b.iter(|| {
            for z in &pts {
                black_box(col.eval(z, &tol).unwrap());
            }
        })
    });
}

fn bench_pencil_transfer(c: &mut Criterion) {
    let tol = tols();
    let rep = verify::random_herglotz_rep(3, 8, 2, 13, 1, &tol).unwrap();
    let pen = build_pencil_from_herglotz_rep(&rep, &tol).unwrap();
    let pts = halfplane_points(3, 50, 0);
    c.bench_function("pencil_transfer_n8_d3_50pts", |b| {
        b.iter(|| {
            for w in &pts {
                black_box(pen.transfer(w, &tol).unwrap());
            }
        })
    });
}

fn bench_realize(c: &mut Criterion) {
    let tol = tols();
    let col = verify::random_schur_gr(2, 4, 2, 17, &tol).unwrap();
    let sizes: Vec<usize> = (0..col.dec().d())
        .map(|k| {
            (0..col.state_dim())
                .filter(|&i| col.dec().part(k).get(i, i).re > 0.5)
                .count()
        })
        .collect();
    let samples: Vec<DecompositionSample> = disk_points(2, 12, 3)
        .iter()
        .map(|z| {
            let h = col.defect_factor(z, &tol).unwrap();
            let mut factors = Vec::new();
            let mut r0 = 0;
            for &sz in &sizes {
                factors.push(h.submatrix(r0, 0, sz, h.cols()));
                r0 += sz;
            }
            DecompositionSample {
                point: z.clone(),
                value: col.eval(z, &tol).unwrap(),
                factors,
            }
        })
        .collect();
    c.bench_function("lurking_realize_n4_d2_q2_12samples", |b| {
        b.iter(|| black_box(realize_schur_from_samples(&samples, &tol).unwrap()))
    });
}

fn bench_tuple_calculus(c: &mut Criterion) {
    let tol = tols();
    let col = verify::random_schur_gr(2, 3, 2, 19, &tol).unwrap();
    let tuple = verify::random_commuting_tuple(2, 4, TupleKind::StrictContraction, 0.3, 23, &tol)
        .unwrap();
    c.bench_function("tuple_eval_n3_m4_d2", |b| {
        b.iter(|| black_box(eval_schur_on_tuple(&col, &tuple, &tol).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_hermitian_eig,
    bench_eval_sweep,
    bench_pencil_transfer,
    bench_realize,
    bench_tuple_calculus
);
criterion_main!(benches);
