use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::PI;
use std::hint::black_box;
use timobeam::*;

fn bench_assemble_and_solve(c: &mut Criterion) {
    let bc = BoundaryCondition::ClampedFree;
    let t = Thickness::new(1.0).unwrap();
    let mut group = c.benchmark_group("assemble_and_solve");
    for &n in &[16usize, 64, 256] {
        for &p in &[0usize, 2] {
            let mesh = Mesh::uniform(n).unwrap();
            group.bench_with_input(
                BenchmarkId::from_parameter(format!("n{n}_p{p}")),
                &(mesh, p),
                |b, (mesh, p)| {
                    b.iter(|| {
                        let sol =
                            assemble_and_solve(black_box(mesh), bc, t, *p, |x| (PI * x).sin())
                                .unwrap();
                        black_box(sol.residual)
                    })
                },
            );
        }
    }
    group.finish();
}

fn bench_element_system(c: &mut Criterion) {
    let bc = BoundaryCondition::ClampedFree;
    let t = Thickness::new(1e-3).unwrap();
    let mesh = Mesh::uniform(64).unwrap();
    c.bench_function("element_systems_n64_p2", |b| {
        b.iter(|| {
            let sys = DpgSystem::new(black_box(&mesh), bc, t, 2, |x| (PI * x).sin()).unwrap();
            black_box(sys.num_dofs())
        })
    });
}

fn bench_trace_norm(c: &mut Criterion) {
    let bc = BoundaryCondition::ClampedFree;
    let t = Thickness::new(0.0).unwrap();
    let mesh = Mesh::uniform(256).unwrap();
    let exact = ExactSolution::sin_load(bc, t).unwrap();
    let nodal = exact.nodal_trace(&mesh);
    c.bench_function("trace_norm_n256", |b| {
        b.iter(|| black_box(trace_norm(black_box(&mesh), &nodal)))
    });
}

criterion_group!(
    benches,
    bench_assemble_and_solve,
    bench_element_system,
    bench_trace_norm
);
criterion_main!(benches);
