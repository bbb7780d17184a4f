//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use aggmia::accountant::{composition_deltas, expected_attack_accuracy};
use aggmia::attack::model::{clt_two_threshold_model, model_accuracy, per_cell_error_rates, ScoreModel};
use aggmia::eval::game::accuracy_from_records;
use aggmia::eval::sweep::{sweep_shadow_count_prepared, write_roc_csv, write_rows_csv};
use aggmia::eval::{
    analytic_accuracy, gap_report, roc_from_scores, run_game, sweep_positive_observations, AttackKind, AttackerKind,
    GameConfig, GameData, MetaConfig, TargetObservations,
};
use aggmia::mlp::{approximation_error_sweep, Features, MlpModel, StepRule};
use aggmia::trace::generate_synthetic_traces;
use aggmia::{rng, MechanismSpec, TraceDataset};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn laplace() -> MechanismSpec {
    MechanismSpec::laplace(0.5, 1).unwrap()
}

/// δ = 1/(2m) for aggregates of m = 1999 traces.
fn gaussian() -> MechanismSpec {
    MechanismSpec::gaussian(0.5, 1.0 / 3998.0, 1).unwrap()
}

fn population(sites: usize, epochs: usize, rate: f64, n: usize, seed: u64) -> TraceDataset {
    generate_synthetic_traces(sites, epochs, &vec![rate; sites * epochs], n, seed).unwrap()
}

fn game(mech: MechanismSpec, n_traces: usize, trials: usize, shadows: usize, seed: u64) -> GameConfig {
    GameConfig {
        shadow_count: shadows,
        target_seed: rng::derive_seed(seed, rng::domain::TARGET),
        dataset_seed: rng::derive_seed(seed, rng::domain::TRIAL),
        ..GameConfig::new(AttackerKind::Informed, mech, n_traces, trials)
    }
}

fn per_cell_rates() -> Outcome {
    let mech = laplace();
    let (a, b) = per_cell_error_rates(&mech, 0.5);
    let exact = 0.5 * (-0.25f64).exp();
    let mut g = rng::seeded(1);
    let n = 1_000_000;
    let (mut fp, mut fn_) = (0usize, 0usize);
    for _ in 0..n {
        if mech.sample_noise(&mut g) > 0.5 {
            fp += 1;
        }
        if 1.0 + mech.sample_noise(&mut g) < 0.5 {
            fn_ += 1;
        }
    }
    let (ma, mb) = (fp as f64 / n as f64, fn_ as f64 / n as f64);
    let pass = (a - 0.38940).abs() <= 1e-5
        && (b - 0.38940).abs() <= 1e-5
        && (a - exact).abs() < 1e-12
        && (ma - a).abs() <= 3e-3
        && (mb - b).abs() <= 3e-3;
    outcome(pass, format!("alpha'={a:.5} beta'={b:.5} mc=({ma:.4}, {mb:.4})"))
}

fn accountant() -> Outcome {
    let one = composition_deltas(0.5, 0.01, 1).unwrap();
    let identity = one.len() == 1 && one[0].epsilon_total == 0.5 && (one[0].delta_total - 0.01).abs() < 1e-15;
    let two = composition_deltas(0.5, 0.0, 2).unwrap();
    let d1 = two[1].delta_total;
    let oracle = ((1.0f64).exp() - 1.0) / (1.0 + 0.5f64.exp()).powi(2);
    let acc: Vec<f64> = (1..=200).map(|k| expected_attack_accuracy(&laplace(), k).unwrap()).collect();
    let monotone = acc.windows(2).all(|w| w[1] >= w[0]);
    let pass = identity
        && (d1 - 0.24492).abs() <= 1e-5
        && (d1 - oracle).abs() < 1e-12
        && (acc[0] - 0.62246).abs() <= 1e-5
        && monotone;
    outcome(pass, format!("delta_1={d1:.5} acc(1)={:.5} monotone={monotone}", acc[0]))
}

const ORDERING_GRID: [usize; 4] = [30, 60, 90, 120];

/// Analytic and Monte-Carlo accuracies of both metric attacks on the grid.
fn ordering(mech: MechanismSpec, two_wins: bool) -> Outcome {
    let pop = population(2, 120, 0.05, 400, 11);
    let cfg = game(mech, 100, 100_000, 10_000, 12);
    let base = GameData::from_dataset(&pop, &GameConfig {
        target_observations: TargetObservations::Count(0),
        ..cfg.clone()
    })
    .unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in ORDERING_GRID {
        let data = base.with_synthetic_target(k, 1).unwrap();
        let cfg_k = GameConfig {
            target_observations: TargetObservations::Count(k),
            ..cfg.clone()
        };
        let out = run_game(&cfg_k, &data).unwrap();
        let mut analytic = [0.0; 2];
        for (i, attack) in [AttackKind::OneThreshold, AttackKind::TwoThreshold].into_iter().enumerate() {
            analytic[i] = analytic_accuracy(AttackerKind::Informed, attack, &mech, &data.target).unwrap();
            let mc = out.run(attack).unwrap().accuracy();
            pass &= (mc - analytic[i]).abs() <= 0.01;
            parts.push(format!("k={k} {attack}: {:.4}/{mc:.4}", analytic[i]));
        }
        pass &= if two_wins { analytic[1] >= analytic[0] } else { analytic[0] >= analytic[1] };
    }
    outcome(pass, format!("analytic/mc {}", parts.join(", ")))
}

fn clt_validity() -> Outcome {
    let mut worst: f64 = 0.0;
    for mech in [laplace(), gaussian()] {
        let (a, b) = per_cell_error_rates(&mech, 0.5);
        for k in 30..=200 {
            let exact = model_accuracy(&ScoreModel::BinomialPair {
                n: k,
                nonmember_p: a,
                member_p: 1.0 - b,
            })
            .unwrap()
            .accuracy;
            let clt = model_accuracy(&clt_two_threshold_model(k, a, b).unwrap()).unwrap().accuracy;
            worst = worst.max((exact - clt).abs());
        }
    }
    outcome(worst <= 0.01, format!("max |binomial - clt| over k=30..200 = {worst:.5}"))
}

fn encodings() -> Outcome {
    let grid = [1.0, 5.0, 20.0, 100.0];
    let rules = [
        StepRule::OneThreshold { n_in: 10, threshold: 5.0 },
        StepRule::TwoThreshold {
            per_cell: vec![0.5, 0.3, 0.7, 0.5, 0.4, 0.6, 0.5, 0.5],
            threshold: 4.0,
        },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, rule) in ["one", "two"].into_iter().zip(&rules) {
        let top = approximation_error_sweep(rule, &[100.0], &[100.0], 10_000, 0.05, 21).unwrap();
        let agreement = 1.0 - top[0].disagreement_rate;
        let rows = approximation_error_sweep(rule, &grid, &grid, 10_000, 0.05, 22).unwrap();
        let d = |ai: usize, bi: usize| rows[ai * 4 + bi].disagreement_rate;
        let along_b = (0..4).all(|ai| (1..4).all(|bi| d(ai, bi) <= d(ai, bi - 1) + 1e-3));
        let along_a = (0..4).all(|bi| (1..4).all(|ai| d(ai, bi) <= d(ai - 1, bi) + 1e-3));
        pass &= agreement >= 0.999 && along_a && along_b;
        parts.push(format!("{name}: agreement={agreement:.4} monotone_a={along_a} monotone_b={along_b}"));
    }
    outcome(pass, parts.join(", "))
}

fn gradient_check() -> (bool, f64) {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for seed in 0..5u64 {
        let mut g = rng::seeded(100 + seed);
        let (n_in, rows) = (6, 40);
        let values: Vec<Vec<f64>> = (0..rows).map(|_| (0..n_in).map(|_| g.random_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<f64> = (0..rows).map(|_| f64::from(g.random_range(0..2u8))).collect();
        let data = Features::from_rows(&values, labels).unwrap();
        let m = MlpModel::random(n_in, 5, seed).unwrap();
        let (_, grad) = m.loss_and_gradient(&data).unwrap();
        let base: Vec<f64> = m.params().collect();
        let h = 1e-5;
        for (k, an) in grad.iter().enumerate() {
            let mut p = m.clone();
            let mut q = base.clone();
            q[k] += h;
            p.set_params(&q).unwrap();
            let up = p.loss_and_gradient(&data).unwrap().0;
            q[k] -= 2.0 * h;
            p.set_params(&q).unwrap();
            let down = p.loss_and_gradient(&data).unwrap().0;
            let fd = (up - down) / (2.0 * h);
            let abs = (fd - an).abs();
            let rel = abs / fd.abs().max(an.abs()).max(1e-12);
            worst = worst.max(rel);
            pass &= rel < 1e-4 || abs < 1e-10;
        }
    }
    (pass, worst)
}

fn meta_classifier() -> Outcome {
    let (grad_ok, worst) = gradient_check();
    let pop = population(2, 30, 0.1, 200, 31);
    let mut wins = 0;
    let mut parts = Vec::new();
    for seed in 0..5u64 {
        let cfg = GameConfig {
            attacks: vec![AttackKind::MetaClassifier],
            target_observations: TargetObservations::Count(20),
            meta: MetaConfig::adam(0.01, 20, 256),
            ..game(laplace(), 50, 10_000, 2_000, 1_000 + seed)
        };
        let data = GameData::from_dataset(&pop, &cfg).unwrap();
        let analytic =
            analytic_accuracy(AttackerKind::Informed, AttackKind::OneThreshold, &cfg.mechanism, &data.target).unwrap();
        let rows = sweep_shadow_count_prepared(&cfg, &data, &[2_000, 100_000]).unwrap();
        let (small, large) = (rows[0].accuracy, rows[1].accuracy);
        let ok = (small - analytic).abs() <= 0.02 && large >= analytic + 0.01;
        wins += usize::from(ok);
        parts.push(format!("{small:.4}/{large:.4}{}", if ok { "" } else { "(x)" }));
    }
    outcome(
        grad_ok && wins >= 4,
        format!(
            "grad rel err={worst:.2e}; analytic one-threshold=0.7854; m=2000/m=1e5 per seed: {} ({wins}/5)",
            parts.join(" ")
        ),
    )
}

fn gap() -> Outcome {
    let pop = population(2, 120, 0.05, 400, 41);
    let cfg = game(laplace(), 100, 10_000, 10_000, 42);
    let grid: Vec<usize> = (1..=12).map(|i| i * 10).collect();
    let rows = gap_report(&cfg, &pop, &grid).unwrap();
    let below = rows.iter().all(|r| r.empirical_accuracy <= r.expected_bound);
    let at60 = |a: AttackKind| rows.iter().find(|r| r.k == 60 && r.attack == a).unwrap().gap;
    let (one, two) = (at60(AttackKind::OneThreshold), at60(AttackKind::TwoThreshold));
    outcome(
        below && one > two,
        format!("all below bound={below}; gap at k=60: one={one:.4} two={two:.4}"),
    )
}

fn sweep_bytes(pop: &TraceDataset, cfg: &GameConfig) -> (Vec<u8>, Vec<u8>) {
    let rows = sweep_positive_observations(cfg, pop, &[10, 30]).unwrap();
    let mut rows_csv = Vec::new();
    write_rows_csv(&mut rows_csv, "k", &rows).unwrap();
    let data = GameData::from_dataset(pop, cfg).unwrap();
    let out = run_game(cfg, &data).unwrap();
    let curves: Vec<_> = out.runs.iter().map(|r| (r.attack, r.roc().unwrap())).collect();
    let mut roc_csv = Vec::new();
    write_roc_csv(&mut roc_csv, &curves).unwrap();
    (rows_csv, roc_csv)
}

fn mann_whitney(member: &[f64], nonmember: &[f64]) -> f64 {
    let mut u = 0.0;
    for &a in member {
        for &b in nonmember {
            u += if a > b {
                1.0
            } else if a == b {
                0.5
            } else {
                0.0
            };
        }
    }
    u / (member.len() * nonmember.len()) as f64
}

fn metrics() -> Outcome {
    let mut g = rng::seeded(51);
    let mut auc_err: f64 = 0.0;
    for _ in 0..20 {
        let m: Vec<f64> = (0..400).map(|_| g.random_range(0..25) as f64).collect();
        let n: Vec<f64> = (0..300).map(|_| g.random_range(-5..20) as f64).collect();
        auc_err = auc_err.max((roc_from_scores(&m, &n).unwrap().auc - mann_whitney(&m, &n)).abs());
    }
    let pop = population(2, 40, 0.05, 200, 52);
    let cfg = GameConfig {
        target_observations: TargetObservations::Count(25),
        attacks: vec![AttackKind::OneThreshold, AttackKind::TwoThreshold, AttackKind::Reference],
        ..game(laplace(), 50, 2_000, 1_000, 53)
    };
    let data = GameData::from_dataset(&pop, &cfg).unwrap();
    let out = run_game(&cfg, &data).unwrap();
    let mut bookkeeping = true;
    for run in &out.runs {
        bookkeeping &= run.confusion().balanced_identity_holds();
        bookkeeping &= (accuracy_from_records(&run.records) - run.accuracy()).abs() < 1e-12;
        let member: Vec<f64> = run.records.iter().filter(|r| r.bit == 1).map(|r| r.score).collect();
        let nonmember: Vec<f64> = run.records.iter().filter(|r| r.bit == 0).map(|r| r.score).collect();
        auc_err = auc_err.max((run.roc().unwrap().auc - mann_whitney(&member, &nonmember)).abs());
    }
    let first = sweep_bytes(&pop, &cfg);
    let mut identical = first == sweep_bytes(&pop, &cfg);
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        identical &= first == single.install(|| sweep_bytes(&pop, &cfg));
    }
    outcome(
        auc_err <= 1e-9 && bookkeeping && identical,
        format!("max |auc - mann_whitney|={auc_err:.1e} bookkeeping exact={bookkeeping} csv identical={identical}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("per-cell error rates", Duration::from_secs(5), per_cell_rates),
        ("composition accountant", Duration::from_secs(5), accountant),
        ("laplace ordering", Duration::from_secs(120), || ordering(laplace(), true)),
        ("gaussian ordering", Duration::from_secs(120), || ordering(gaussian(), false)),
        ("clt validity", Duration::from_secs(30), clt_validity),
        ("step-rule encodings", Duration::from_secs(30), encodings),
        ("meta-classifier training", Duration::from_secs(900), meta_classifier),
        ("gap to composition bound", Duration::from_secs(600), gap),
        ("metrics correctness", Duration::from_secs(120), metrics),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} [{}] {name}: {} ({:.1}s{})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64(),
            if in_time { String::new() } else { format!(" over {}s budget", budget.as_secs()) }
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
