use criterion::{black_box, criterion_group, criterion_main, Criterion};

use molly_bench::{example_roles, wide_role};
use molly_core::compiler::compile;
use molly_core::interpreter::{exec, honest_env, HonestMode};
use molly_core::semantics::{reflect_valuation, role_transcript_valid};

fn bench_compile(c: &mut Criterion) {
    let roles = example_roles();
    c.bench_function("compile example roles", |b| {
        b.iter(|| {
            for (_, role) in &roles {
                black_box(compile(role).unwrap());
            }
        });
    });

    let wide = wide_role(12);
    c.bench_function("saturate wide pair role", |b| {
        b.iter(|| black_box(compile(&wide).unwrap()));
    });
}

fn bench_execution(c: &mut Criterion) {
    let role = example_roles()
        .into_iter()
        .find(|(n, _)| *n == "encrsym")
        .unwrap()
        .1;
    let proc = compile(&role).unwrap();
    let env = honest_env(&role, HonestMode::SharedEncryption, 1);
    c.bench_function("exec honest run", |b| {
        b.iter(|| black_box(exec(&proc, &mut env.clone()).unwrap()));
    });

    c.bench_function("exec and reflect", |b| {
        b.iter(|| {
            let (store, tr) = exec(&proc, &mut env.clone()).unwrap();
            let tau = reflect_valuation(&proc, &store);
            black_box(role_transcript_valid(&role, &tr, &tau))
        });
    });
}

criterion_group!(benches, bench_compile, bench_execution);
criterion_main!(benches);
