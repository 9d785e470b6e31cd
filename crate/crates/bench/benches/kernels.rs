use criterion::{black_box, criterion_group, criterion_main, Criterion};
use torushaar::expansion::{haar_forward, haar_inverse};
use torushaar::norms::{bmo_norm, product_bmo_norm};
use torushaar::para::{paraproduct, product_reconstruction};
use torushaar_bench::{bench_expansion, bench_signal};

fn transforms(c: &mut Criterion) {
    let sig = bench_signal(2, 6, 1);
    c.bench_function("haar_forward N=2 J=6", |b| {
        b.iter(|| haar_forward(black_box(&sig)))
    });
    let exp = haar_forward(&sig);
    c.bench_function("haar_inverse N=2 J=6", |b| {
        b.iter(|| haar_inverse(black_box(&exp)))
    });
}

fn norms(c: &mut Criterion) {
    let exp = bench_expansion(2, 3, 2);
    c.bench_function("product_bmo_norm N=2 J=3", |b| {
        b.iter(|| product_bmo_norm(black_box(&exp)))
    });
    let sig = bench_signal(2, 4, 3);
    c.bench_function("bmo_norm N=2 J=4", |b| b.iter(|| bmo_norm(black_box(&sig))));
}

fn paraproducts(c: &mut Criterion) {
    let phi = bench_expansion(2, 4, 4);
    let f = bench_expansion(2, 4, 5);
    c.bench_function("paraproduct N=2 J=4", |b| {
        b.iter(|| paraproduct(black_box(&phi), black_box(&f)).unwrap())
    });
    let phi3 = bench_expansion(2, 3, 6);
    let f3 = bench_expansion(2, 3, 7);
    c.bench_function("nine_term_reconstruction N=2 J=3", |b| {
        b.iter(|| product_reconstruction(black_box(&phi3), black_box(&f3)).unwrap())
    });
}

criterion_group!(benches, transforms, norms, paraproducts);
criterion_main!(benches);
