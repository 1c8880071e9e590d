use criterion::{criterion_group, criterion_main, Criterion};
use sgia_core::instances;
use sgia_core::value::{evaluate_policy, monte_carlo_value};
use sgia_core::verifier::{cross_check_propositions, verify_ppme_direct, VerifyOptions};

fn exact_evaluation(c: &mut Criterion) {
    let inst = instances::reference_random(0);
    c.bench_function("evaluate_policy reference", |b| {
        b.iter(|| {
            evaluate_policy(&inst.game, &inst.family, &inst.scheme, &inst.profile).unwrap()
        })
    });
}

fn direct_verification(c: &mut Criterion) {
    let inst = instances::state_guess_markov();
    c.bench_function("verify_ppme_direct state-guess-markov", |b| {
        b.iter(|| {
            verify_ppme_direct(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                VerifyOptions::default(),
            )
            .unwrap()
        })
    });
}

fn both_program_routes(c: &mut Criterion) {
    let inst = instances::reference_random(1);
    c.bench_function("cross_check_propositions reference", |b| {
        b.iter(|| {
            cross_check_propositions(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                VerifyOptions::default(),
            )
            .unwrap()
        })
    });
}

fn simulation(c: &mut Criterion) {
    let inst = instances::reference_random(2);
    c.bench_function("monte_carlo_value 1000 episodes", |b| {
        b.iter(|| {
            monte_carlo_value(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                0,
                1_000,
                50,
                0,
            )
        })
    });
}

criterion_group!(
    benches,
    exact_evaluation,
    direct_verification,
    both_program_routes,
    simulation
);
criterion_main!(benches);
