//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use common::{flail_move_rate, seat, seated_world, step_with};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stagmix_core::abstract_sim::{
    estimate_policy_payoff, simulate_sampling_histogram, DiscriminationHistogram, HistogramConfig, SamplingPolicy,
};
use stagmix_core::agents::{make_controllers, AwareFidelity, BotSpec, PartnerChoiceMode, RowingType};
use stagmix_core::analytic::{reciprocator_dominates, total_payoff, AnalyticParams, AnalyticPolicy};
use stagmix_core::boatrace::{run_episode, Action, EnvConfig, EpisodeLog, Event, FlailRule, PLAYERS};
use stagmix_core::harness::{self, data_body, ExperimentConfig, DEFAULT_MASTER_SEED};
use stagmix_core::metrics::{
    aggregate, build_community, curve_crossings, evaluate_focal, focal_episode_log, roster_entries, schelling_diagram,
    schelling_roster, AssociationMatrix, RaceFilter,
};
use stagmix_core::rng::{derive_seed, derive_seed_path};
use stagmix_core::{Color, PayoffMatrix};
use std::process::ExitCode;
use std::time::Instant;

type Verdict = Result<String, String>;

const TRIALS: u64 = 100_000;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_grid() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ExperimentConfig { output_dir: dir.path().to_owned(), ..ExperimentConfig::default() };
    let start = Instant::now();
    let report = harness::oracle_check(&config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let text = std::fs::read_to_string(&report.files[0]).map_err(|e| e.to_string())?;
    let body = data_body(&text);
    let mut rows = 0;
    let mut failing = Vec::new();
    let mut max_z: f64 = 0.0;
    for line in body.lines().skip(1) {
        rows += 1;
        let cols: Vec<&str> = line.split(',').collect();
        let z: f64 = cols[6].parse().map_err(|_| format!("bad z in `{line}`"))?;
        max_z = max_z.max(z.abs());
        if cols[7] != "true" {
            failing.push(format!("{}/k={}/rho={} z={}", cols[0], cols[1], cols[2], cols[6]));
        }
    }
    let detail = format!(
        "{}/{rows} points within 3 SE at {TRIALS} trials (max |z| {max_z:.2}; {secs:.1} s, target < 120 s){}",
        rows - failing.len(),
        if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
    );
    check(report.passed && rows == 228 && failing.is_empty(), detail)
}

fn within(mean: f64, se: f64, target: f64) -> bool {
    if se == 0.0 {
        (mean - target).abs() <= 1e-9
    } else {
        ((mean - target) / se).abs() <= 3.0
    }
}

fn payoff_ladder() -> Verdict {
    let m = PayoffMatrix::reference();
    // VR at k = 8: 3 - (1/8) * (1 - 2^-8) * 3 = 2.62646...
    let expected: [(u32, [f64; 4]); 2] =
        [(2, [1.5, 1.875, 2.25, 3.0]), (8, [1.5, 3.0 - 3.0 * (1.0 - 1.0 / 256.0) / 8.0, 2.8125, 3.0])];
    let mut problems = Vec::new();
    let mut values = Vec::new();
    for (k, want) in expected {
        let params = AnalyticParams::new(k, 0.5, m).unwrap();
        let mut got = Vec::new();
        for (i, policy) in AnalyticPolicy::LADDER.into_iter().enumerate() {
            let per = total_payoff(policy, &params).unwrap().value / k as f64;
            if (per - want[i]).abs() > 1e-12 {
                problems.push(format!("{policy} k={k}: {per} != {}", want[i]));
            }
            let est = estimate_policy_payoff(
                policy,
                0.5,
                k,
                &m,
                TRIALS,
                derive_seed_path(DEFAULT_MASTER_SEED, &[2, k as u64, i as u64]),
            )
            .unwrap();
            if !within(est.mean, est.std_error, per * k as f64) {
                problems.push(format!("{policy} k={k}: MC {} +- {} vs {}", est.mean, est.std_error, per * k as f64));
            }
            got.push(per);
        }
        if !got.windows(2).all(|w| w[0] < w[1]) {
            problems.push(format!("k={k}: ordering VU < VR < AR < O violated"));
        }
        values.push(format!("k={k}: {}", got.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" < ")));
    }
    check(
        problems.is_empty(),
        format!(
            "{}{}",
            values.join("; "),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn cooperation_threshold() -> Verdict {
    let m = PayoffMatrix::reference();
    let k = 8;
    let rhos: Vec<f64> = (25..=45).map(|i| i as f64 / 100.0).collect();
    let mut diffs = Vec::new();
    for (i, &rho) in rhos.iter().enumerate() {
        let seed = |p: u64| derive_seed_path(DEFAULT_MASTER_SEED, &[3, p, i as u64]);
        let uc = estimate_policy_payoff(AnalyticPolicy::UnconditionalCooperate, rho, k, &m, TRIALS, seed(0)).unwrap();
        let ud = estimate_policy_payoff(AnalyticPolicy::UnconditionalDefect, rho, k, &m, TRIALS, seed(1)).unwrap();
        diffs.push(uc.mean - ud.mean);
    }
    let changes: Vec<usize> = (1..diffs.len()).filter(|&i| (diffs[i - 1] < 0.0) != (diffs[i] < 0.0)).collect();
    if changes.len() != 1 {
        return Err(format!("expected one sign change of UC - UD over rho in [0.25, 0.45], found {}", changes.len()));
    }
    let i = changes[0];
    let (r0, r1, d0, d1) = (rhos[i - 1], rhos[i], diffs[i - 1], diffs[i]);
    let star = r0 + (r1 - r0) * d0 / (d0 - d1);
    let stakes = m.stakes().unwrap();
    check(
        (star - 1.0 / 3.0).abs() <= 0.02 && d0 < 0.0,
        format!(
            "UC/UD crossover at rho* = {star:.4} (1/3 +- 0.02; stakes {stakes}, odds rho/(1-rho) = {:.4})",
            star / (1.0 - star)
        ),
    )
}

fn dominance() -> Verdict {
    let m = PayoffMatrix::reference();
    let mut problems = Vec::new();
    if reciprocator_dominates(8, 0.5, 0.5) != Ok(true) {
        problems.push("predicate(k=8, 0.5, 0.5) is not true".to_owned());
    }
    if reciprocator_dominates(1, 0.5, 0.5) != Ok(false) {
        problems.push("predicate(k=1, 0.5, 0.5) is not false".to_owned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(DEFAULT_MASTER_SEED, 4));
    let mut agree = 0;
    let mut min_margin = f64::INFINITY;
    for i in 0..20u64 {
        let k = rng.random_range(1..=12u32);
        let rho = (rng.random_range(0.05..0.95f64) * 100.0).round() / 100.0;
        let rho_prime = (rng.random_range(0.0..0.9f64) * 100.0).round() / 100.0;
        let verdict = reciprocator_dominates(k, rho, rho_prime).unwrap();
        let vr = estimate_policy_payoff(
            AnalyticPolicy::VisualReciprocator,
            rho,
            k,
            &m,
            TRIALS,
            derive_seed_path(DEFAULT_MASTER_SEED, &[4, i, 0]),
        )
        .unwrap();
        let uc = estimate_policy_payoff(
            AnalyticPolicy::UnconditionalCooperate,
            rho_prime,
            k,
            &m,
            TRIALS,
            derive_seed_path(DEFAULT_MASTER_SEED, &[4, i, 1]),
        )
        .unwrap();
        let diff = vr.mean - uc.mean;
        let se = (vr.std_error.powi(2) + uc.std_error.powi(2)).sqrt();
        min_margin = min_margin.min(diff.abs() / se);
        if (diff > 0.0) == verdict {
            agree += 1;
        } else {
            problems.push(format!(
                "k={k} rho={rho} rho'={rho_prime}: predicate {verdict}, MC VR - UC = {diff:.4} +- {se:.4}"
            ));
        }
    }
    check(
        problems.is_empty(),
        format!(
            "predicate true at (8, .5, .5), false at (1, .5, .5); MC agrees on {agree}/20 random points (smallest margin {min_margin:.1} SE){}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn index_properties() -> Verdict {
    let canon = [
        AssociationMatrix::new([[5, 5], [0, 0]]).discrimination_index(),
        AssociationMatrix::new([[5, 0], [5, 0]]).discrimination_index(),
        AssociationMatrix::new([[10, 0], [0, 10]]).discrimination_index(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(DEFAULT_MASTER_SEED, 5));
    let n = 1_000_000;
    let mut bad = 0u64;
    for _ in 0..n {
        let mut c = [[0u64; 2]; 2];
        for row in &mut c {
            for x in row.iter_mut() {
                *x = rng.random_range(0..=400);
            }
        }
        let m = AssociationMatrix::new(c);
        let d = m.discrimination_index();
        let ok = d % 2 == 0
            && d.unsigned_abs() <= 2 * m.max_entry()
            && m.swap_rows().discrimination_index() == d
            && m.swap_columns().discrimination_index() == d;
        bad += (!ok) as u64;
    }
    check(
        bad == 0 && canon == [10, -10, 0],
        format!("{n} random matrices: {bad} violations of even / |D| <= 2 max / swap invariance; canonical {canon:?}"),
    )
}

fn interval(h: &DiscriminationHistogram) -> String {
    format!("[{}, {}]", h.lower, h.upper)
}

fn sampler_histograms() -> Verdict {
    let hist = |sampler, races, episodes, stream| {
        simulate_sampling_histogram(&HistogramConfig::new(
            sampler,
            10_000,
            races,
            episodes,
            derive_seed_path(DEFAULT_MASTER_SEED, &[6, stream]),
        ))
    };
    let random = hist(SamplingPolicy::UniformRandom, 1, 50, 0);
    let color = hist(SamplingPolicy::Visual(Color::Purple), 1, 50, 1);
    let coop = hist(SamplingPolicy::Omniscient, 1, 50, 2);
    // The reported intervals are the 2.5% and 97.5% quantiles written as
    // endpoints, so the random interval may touch -10 and 10.
    let ok = random.lower >= -10.0
        && random.upper <= 10.0
        && color.lower > 0.0
        && coop.upper < 0.0
        && color.lower > random.upper
        && coop.upper < random.lower;
    let long = [
        hist(SamplingPolicy::UniformRandom, 8, 50, 3),
        hist(SamplingPolicy::Visual(Color::Purple), 8, 50, 4),
        hist(SamplingPolicy::Omniscient, 8, 50, 5),
    ];
    check(
        ok,
        format!(
            "10000 samples at 50 episodes x 1 race, 95% quantile intervals: random {} ({:.1}% of samples strictly inside (-10, 10)), color-only {}, cooperator-only {}; reported only, 50 x 8: random {}, color-only {}, cooperator-only {}",
            interval(&random),
            100.0 * random.fraction_strictly_within(-10, 10),
            interval(&color),
            interval(&coop),
            interval(&long[0]),
            interval(&long[1]),
            interval(&long[2])
        ),
    )
}

fn bot_log(specs: &[BotSpec], races: u32, seed: u64) -> EpisodeLog {
    let config = EnvConfig::with_races(races, derive_seed(seed, 1));
    let mut controllers = make_controllers(specs, AwareFidelity::Privileged, derive_seed(seed, 2));
    run_episode(&config, &roster_entries(specs), &mut controllers).unwrap()
}

fn physics() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;

    // (a) synchronized paddling crosses W rows in 3W steps.
    let config = EnvConfig::default();
    let w = config.map().crossing_distance() as u64;
    let mut state = seated_world(&config, &[(0, seat(1, 0)), (1, seat(1, 1))]);
    let start = state.t;
    let mut steps = None;
    while state.phase().race == 0 {
        let ready =
            |id: usize| if state.players[id].paddle_cooldown_remaining == 0 { Action::Paddle } else { Action::Noop };
        let actions = [(0, ready(0)), (1, ready(1))];
        let out = step_with(&mut state, &actions);
        if out.events.iter().any(|e| matches!(e, Event::RaceFinished { boat: 1, .. })) {
            steps = Some(out.t - start + 1);
            break;
        }
    }
    ok &= steps == Some(3 * w);
    parts.push(format!("(a) W={w} crossed in {steps:?} steps"));

    // (b) flail-only motion frequency.
    for (rule, p) in [(FlailRule::Independent, 1.0 - 0.9f64 * 0.9), (FlailRule::CappedAt010, 0.1)] {
        let (moves, n) = flail_move_rate(rule, TRIALS);
        let rate = moves as f64 / n as f64;
        let z = (rate - p) / (p * (1.0 - p) / n as f64).sqrt();
        ok &= z.abs() <= 3.0;
        parts.push(format!("(b) {rule:?}: {rate:.4} vs {p:.2} over {n} boat-steps (z {z:.2})"));
    }

    // (c) every mismatch penalty is -0.5 on a player with a paddle pending.
    let community = build_community(5).unwrap();
    let focal = BotSpec::new(RowingType::Reciprocal, Color::Teal, PartnerChoiceMode::RandomBoat);
    let (mut penalties, mut wrong) = (0, 0);
    for seed in 0..20 {
        let log = focal_episode_log(focal, &community, &EnvConfig::default(), AwareFidelity::Privileged, seed).unwrap();
        let mut apples = vec![[0.0f64; PLAYERS]; log.steps.len()];
        let mut penalized = vec![[0.0f64; PLAYERS]; log.steps.len()];
        for (t, e) in log.events() {
            match *e {
                Event::AppleEaten { player, .. } => apples[t as usize][player] += 1.0,
                Event::PenaltyApplied { player, amount, .. } => {
                    penalties += 1;
                    penalized[t as usize][player] += amount;
                    let t = t as usize;
                    let paddled = (t.saturating_sub(2)..=t).any(|s| log.steps[s].actions[player] == Action::Paddle);
                    let flailed = (0..PLAYERS).any(|q| q != player && log.steps[t].actions[q] == Action::Flail);
                    wrong += (amount != -0.5 || !paddled || !flailed) as u32;
                }
                _ => {}
            }
        }
        for (t, s) in log.steps.iter().enumerate() {
            for p in 0..PLAYERS {
                wrong += (s.rewards[p] != apples[t][p] + penalized[t][p]) as u32;
            }
        }
    }
    ok &= penalties > 0 && wrong == 0;
    parts.push(format!("(c) {penalties} penalties, {wrong} not -0.5 on a pending paddler"));

    // (d) episode length k * 300.
    let mut lengths = Vec::new();
    for races in [1u32, 2, 3, 8] {
        let log = bot_log(&schelling_roster(3, RowingType::Paddler, races as u64), races, 100 + races as u64);
        ok &= log.steps.len() == races as usize * 300;
        lengths.push(format!("{races}->{}", log.steps.len()));
    }
    parts.push(format!("(d) lengths {}", lengths.join(" ")));

    // (e) byte-identical logs.
    let specs = schelling_roster(2, RowingType::Flailer, 9);
    let same = bot_log(&specs, 8, 9).to_ndjson() == bot_log(&specs, 8, 9).to_ndjson();
    let differs = bot_log(&specs, 8, 9).to_ndjson() != bot_log(&specs, 8, 10).to_ndjson();
    ok &= same && differs;
    parts.push(format!("(e) same seed identical: {same}, other seed differs: {differs}"));

    check(ok, parts.join("; "))
}

fn schelling() -> Verdict {
    let start = Instant::now();
    let points = schelling_diagram(&EnvConfig::default(), 50, DEFAULT_MASTER_SEED).map_err(|e| e.to_string())?;
    let crossings = curve_crossings(&points);
    let x0 = &points[0];
    let x5 = &points[5];
    let curve = |f: &dyn Fn(&stagmix_core::metrics::SchellingPoint) -> f64| {
        points.iter().map(|p| format!("{:.0}", f(p))).collect::<Vec<_>>().join(" ")
    };
    check(
        crossings == 1 && x0.flailer.mean > x0.paddler.mean && x5.paddler.mean > x5.flailer.mean,
        format!(
            "{crossings} crossing(s); paddler means x=0..5: {}; flailer: {} (50 episodes/point, {:.0} s)",
            curve(&|p| p.paddler.mean),
            curve(&|p| p.flailer.mean),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn policy_realization() -> Verdict {
    let community = build_community(5).unwrap();
    let env = EnvConfig::default();
    let omni = BotSpec::new(RowingType::Reciprocal, Color::Purple, PartnerChoiceMode::Omniscient);
    let visual =
        BotSpec::new(RowingType::Paddler, Color::Purple, PartnerChoiceMode::VisualUnconditional(Color::Purple));
    let run =
        |focal| evaluate_focal(focal, &community, &env, AwareFidelity::Privileged, 50, DEFAULT_MASTER_SEED).unwrap();
    let o = run(omni);
    let v = run(visual);
    let d_omni = aggregate(&o, RaceFilter::All).discrimination_index();
    let d_visual = aggregate(&v, RaceFilter::All).discrimination_index();
    let later: u32 = o.iter().map(|e| e.penalties_from_race(1)).sum();
    check(
        d_omni < 0 && later == 0 && d_visual > 0,
        format!("omniscient D = {d_omni}, penalties from race 2 on = {later}; visual-unconditional(purple) D = {d_visual} (50 episodes, bias-0 community)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("closed forms vs Monte Carlo oracle", oracle_grid),
        ("payoff ladder at rho = 0.5", payoff_ladder),
        ("cooperation threshold", cooperation_threshold),
        ("reciprocator dominance", dominance),
        ("discrimination index properties", index_properties),
        ("sampler histograms", sampler_histograms),
        ("environment physics", physics),
        ("Schelling diagram", schelling),
        ("policy realization in the environment", policy_realization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
