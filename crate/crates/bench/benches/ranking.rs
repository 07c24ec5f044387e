use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use grouprank_bench::movielens_sized;
use grouprank_core::{auc, cr_rank, gr_rank, inject_spammers, CrConfig, SpamScenario, SpamType};

fn scenario(seed: u64) -> SpamScenario {
    SpamScenario {
        spam_type: SpamType::Malicious,
        spammers: 50,
        degree: 84,
        seed,
    }
}

fn bench_ranking(c: &mut Criterion) {
    let matrix = movielens_sized();
    let injected = inject_spammers(&matrix, &scenario(1)).unwrap();

    c.bench_function("gr_rank/943x1682", |b| b.iter(|| gr_rank(&injected.matrix)));
    c.bench_function("cr_rank/943x1682", |b| {
        b.iter(|| cr_rank(&injected.matrix, &CrConfig::default()).unwrap())
    });
    c.bench_function("inject_spammers/d50_k84", |b| {
        b.iter_batched(
            || scenario(2),
            |s| inject_spammers(&matrix, &s).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let reps = gr_rank(&injected.matrix);
    c.bench_function("auc/943", |b| b.iter(|| auc(&reps, &injected.spammers)));
}

criterion_group!(benches, bench_ranking);
criterion_main!(benches);
