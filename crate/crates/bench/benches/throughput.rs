use criterion::{criterion_group, criterion_main, Criterion};
use stagmix_bench::{fresh_world, scripted_action};
use stagmix_core::abstract_sim::{
    estimate_policy_payoff, simulate_sampling_histogram, HistogramConfig, SamplingPolicy,
};
use stagmix_core::agents::RowingType;
use stagmix_core::analytic::{total_payoff, AnalyticParams, AnalyticPolicy};
use stagmix_core::boatrace::{EnvConfig, PLAYERS};
use stagmix_core::metrics::{schelling_episode, AssociationMatrix};
use stagmix_core::PayoffMatrix;
use std::hint::black_box;

fn analytic(c: &mut Criterion) {
    let m = PayoffMatrix::reference();
    c.bench_function("analytic/228-point grid", |b| {
        b.iter(|| {
            let mut sum = 0.0;
            for policy in AnalyticPolicy::ALL {
                for k in [2, 8] {
                    for i in 1..=19 {
                        let params = AnalyticParams::new(k, i as f64 * 0.05, m).unwrap();
                        sum += total_payoff(policy, &params).unwrap().value;
                    }
                }
            }
            black_box(sum)
        })
    });
    c.bench_function("metrics/discrimination index", |b| {
        b.iter(|| black_box(AssociationMatrix::new(black_box([[12, 3], [7, 30]]))).discrimination_index())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let m = PayoffMatrix::reference();
    let mut group = c.benchmark_group("monte-carlo");
    group.sample_size(10);
    group.bench_function("VR k=8 rho=0.5, 10k trials", |b| {
        b.iter(|| estimate_policy_payoff(AnalyticPolicy::VisualReciprocator, 0.5, 8, &m, 10_000, 1).unwrap())
    });
    group.bench_function("random sampler histogram, 1k sims", |b| {
        b.iter(|| simulate_sampling_histogram(&HistogramConfig::new(SamplingPolicy::UniformRandom, 1000, 1, 50, 1)))
    });
    group.finish();
}

fn environment(c: &mut Criterion) {
    c.bench_function("boatrace/300 scripted steps", |b| {
        b.iter(|| {
            let mut world = fresh_world(3);
            for t in 0..300 {
                let actions: [_; PLAYERS] = std::array::from_fn(|i| scripted_action(i, t));
                world.step(&actions).unwrap();
            }
            black_box(world.t)
        })
    });
    let mut group = c.benchmark_group("boatrace");
    group.sample_size(10);
    let env = EnvConfig::default();
    group.bench_function("8-race bot episode", |b| {
        b.iter(|| schelling_episode(&env, 3, RowingType::Paddler, 11).unwrap())
    });
    group.finish();
}

criterion_group!(benches, analytic, monte_carlo, environment);
criterion_main!(benches);
