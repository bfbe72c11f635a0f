use criterion::{criterion_group, criterion_main, Criterion};
use tilekit_core::Field;

fn field_init(c: &mut Criterion) {
    c.bench_function("field_init_n8", |b| b.iter(|| Field::new(8).unwrap()));
}

criterion_group!(benches, field_init);
criterion_main!(benches);
