use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fqx::calculus::{compose, invert};
use fqx::fqop::{builtin, clear_builtin_cache, Builtin};
use fqx::invariance::{check, parse_property_set, PropertySpec};
use fqx::linsolve::fiber_dimensions;
use fqx::{BasisTag, OperationKind};

fn algebra(c: &mut Criterion) {
    let osy = builtin(Builtin::OSy, 4, BasisTag::Mixed).unwrap();
    let (a, b) = (osy.series_element(0), osy.series_element(1));
    c.bench_function("multiply order-4 series", |bench| bench.iter(|| black_box(&a).mul(black_box(&b)).unwrap()));
    let id = builtin(Builtin::Id, 4, BasisTag::Mixed).unwrap().add(&osy).unwrap();
    c.bench_function("transform order-4 operation", |bench| {
        bench.iter(|| black_box(&id).transform(BasisTag::Circular))
    });
}

fn calculus(c: &mut Criterion) {
    let osy = builtin(Builtin::OSy, 3, BasisTag::Mixed).unwrap();
    c.bench_function("compose OSy with itself at order 3", |bench| {
        bench.iter(|| compose(black_box(&osy), black_box(&osy)).unwrap())
    });
    let fsy = builtin(Builtin::FSy, 3, BasisTag::Mixed).unwrap();
    let id = builtin(Builtin::Id, 3, BasisTag::Mixed).unwrap();
    let psi = id.add(&fsy.sub(&osy).unwrap()).unwrap();
    c.bench_function("invert at order 3", |bench| bench.iter(|| invert(black_box(&psi)).unwrap()));
    c.bench_function("check naturality of OSy at order 3", |bench| {
        bench.iter(|| check(black_box(&osy), &PropertySpec::Natural).unwrap())
    });
}

fn builtins(c: &mut Criterion) {
    c.bench_function("build OSy at order 4", |bench| {
        bench.iter(|| {
            clear_builtin_cache();
            builtin(Builtin::OSy, 4, BasisTag::Mixed).unwrap()
        })
    });
}

fn fiber(c: &mut Criterion) {
    let specs = parse_property_set("Nat+vC+Opp+O2+CP").unwrap();
    let mut g = c.benchmark_group("fiber table");
    g.sample_size(10);
    for order in [3, 4] {
        g.bench_function(format!("base system to order {order}"), |bench| {
            bench.iter(|| fiber_dimensions(black_box(&specs), OperationKind::Vectorial, order).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, algebra, calculus, builtins, fiber);
criterion_main!(benches);
