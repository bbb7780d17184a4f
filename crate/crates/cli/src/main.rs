//! `aggmia` command-line front end.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aggmia::accountant::expected_accuracy_bound;
use aggmia::config::ExperimentConfig;
use aggmia::eval::game::Calibrated;
use aggmia::eval::sweep::{write_gap_csv, write_json, write_roc_csv, write_rows_csv, sweep_shadow_count_prepared};
use aggmia::eval::{
    analytic_accuracy, calibrate, gap_report, run_game, sweep_positive_observations, AttackKind, AttackerKind,
    GameConfig, GameData, ResultRow,
};
use aggmia::mlp::{weight_report, MlpModel};
use aggmia::trace::write_traces_csv;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "aggmia", version, about = "Membership-inference audits of DP location aggregates")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config. A fresh seed is drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic trace population as trace CSV.
    Generate {
        #[command(flatten)]
        run: RunArgs,
        /// Output file (default: <out-dir>/traces.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play the membership game and report accuracy, AUC and ROC.
    Attack {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sweep positive observations (`sweep.k_grid`) and shadow counts (`sweep.m_grid`).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Expected attack accuracy under optimal composition for k = 1..=k_max.
    Bound {
        #[arg(long, value_parser = non_negative)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0, value_parser = probability)]
        delta: f64,
        #[arg(long)]
        k_max: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Summarise the weights of an exported meta-classifier.
    InspectWeights {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Train the meta-classifier on shadow data and export it as JSON.
    TrainMeta {
        #[command(flatten)]
        run: RunArgs,
    },
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite non-negative number, got {s}"))
    }
}

fn probability(s: &str) -> std::result::Result<f64, String> {
    let v = non_negative(s)?;
    if v < 1.0 {
        Ok(v)
    } else {
        Err(format!("expected a value in [0, 1), got {s}"))
    }
}

/// Output files are rendered in memory and written only once every step has
/// succeeded.
#[derive(Default)]
struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.0.push((path, bytes));
    }

    fn commit(self) -> Result<()> {
        for (path, bytes) in self.0 {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

struct Loaded {
    cfg: ExperimentConfig,
    seed: u64,
    out_dir: PathBuf,
}

fn load(run: &RunArgs) -> Result<Loaded> {
    let cfg = ExperimentConfig::load(&run.config).with_context(|| format!("loading {}", run.config.display()))?;
    let seed = match run.seed.or(cfg.seed) {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            println!("seed={s}");
            s
        }
    };
    let out_dir = run
        .out_dir
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Loaded { cfg, seed, out_dir })
}

fn render(f: impl FnOnce(&mut Vec<u8>) -> aggmia::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn prepare(l: &Loaded) -> Result<(GameConfig, GameData)> {
    let game = l.cfg.game_config(l.seed);
    let population = l.cfg.load_population(l.seed)?;
    let data = GameData::from_dataset(&population, &game)?;
    Ok((game, data))
}

fn cmd_generate(run: &RunArgs, out: Option<PathBuf>) -> Result<()> {
    let l = load(run)?;
    let dataset = l.cfg.load_population(l.seed)?;
    let (sites, epochs) = dataset.dims();
    println!(
        "n={} L={} E={} mean_density={:.6}",
        dataset.len(),
        sites,
        epochs,
        dataset.mean_density()
    );
    let path = out.unwrap_or_else(|| l.out_dir.join("traces.csv"));
    let mut outputs = Outputs::default();
    outputs.add(path, render(|w| write_traces_csv(w, &dataset))?);
    outputs.commit()
}

fn cmd_attack(run: &RunArgs) -> Result<()> {
    let l = load(run)?;
    let (game, data) = prepare(&l)?;
    let outcome = run_game(&game, &data)?;
    let k = data.target.count_ones();
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut curves = Vec::new();
    for r in &outcome.runs {
        let s = r.summary();
        let analytic = analytic_accuracy(game.attacker, r.attack, &game.mechanism, &data.target);
        let mut line = format!("{:<16} accuracy={:.3} auc={:.3}", r.attack.to_string(), s.accuracy, s.auc);
        if let Some(a) = analytic {
            line.push_str(&format!(" analytic={a:.3}"));
        }
        println!("{line}");
        rows.push(ResultRow::from_run(k, &game, r));
        summaries.push(json!({ "summary": s, "threshold": finite(r.threshold), "analytic": analytic }));
        if let Some(c) = r.roc() {
            curves.push((r.attack, c));
        }
    }
    let report = json!({
        "seed": l.seed,
        "positive_observations": k,
        "attacker": game.attacker,
        "mechanism": game.mechanism,
        "attacks": summaries,
    });
    let mut outputs = Outputs::default();
    outputs.add(l.out_dir.join("results.csv"), render(|w| write_rows_csv(w, "k", &rows))?);
    outputs.add(l.out_dir.join("results.json"), render(|w| write_json(w, &report))?);
    outputs.add(l.out_dir.join("roc.csv"), render(|w| write_roc_csv(w, &curves))?);
    outputs.commit()
}

fn finite(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn cmd_sweep(run: &RunArgs) -> Result<()> {
    let l = load(run)?;
    let sweep = l.cfg.sweep.clone();
    if sweep.k_grid.is_none() && sweep.m_grid.is_none() {
        bail!("config field `sweep`: give `k_grid`, `m_grid` or both");
    }
    let game = l.cfg.game_config(l.seed);
    let population = l.cfg.load_population(l.seed)?;
    let mut outputs = Outputs::default();
    if let Some(k_grid) = &sweep.k_grid {
        let rows = sweep_positive_observations(&game, &population, k_grid)?;
        print_rows("k", &rows);
        outputs.add(l.out_dir.join("sweep_k.csv"), render(|w| write_rows_csv(w, "k", &rows))?);
        if game.attacker == AttackerKind::Informed {
            let gaps = gap_report(&game, &population, k_grid)?;
            outputs.add(l.out_dir.join("gap.csv"), render(|w| write_gap_csv(w, &gaps))?);
        }
    }
    if let Some(m_grid) = &sweep.m_grid {
        let data = GameData::from_dataset(&population, &game)?;
        let rows = sweep_shadow_count_prepared(&game, &data, m_grid)?;
        print_rows("m", &rows);
        outputs.add(l.out_dir.join("sweep_m.csv"), render(|w| write_rows_csv(w, "m", &rows))?);
    }
    outputs.commit()
}

fn print_rows(key: &str, rows: &[ResultRow]) {
    for r in rows {
        println!("{key}={:<6} {:<16} accuracy={:.3} auc={:.3}", r.key, r.attack.to_string(), r.accuracy, r.auc);
    }
}

fn cmd_bound(epsilon: f64, delta: f64, k_max: usize, out_dir: &Path) -> Result<()> {
    if k_max == 0 {
        bail!("--k-max must be at least 1");
    }
    let mut table = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        table.push((k, expected_accuracy_bound(epsilon, delta, k)?));
    }
    let mut csv = String::from("k,expected_accuracy\n");
    println!("k\texpected_accuracy");
    for (k, acc) in &table {
        println!("{k}\t{acc:.5}");
        csv.push_str(&format!("{k},{acc:.8}\n"));
    }
    let mut outputs = Outputs::default();
    outputs.add(out_dir.join("bound.csv"), csv.into_bytes());
    outputs.commit()
}

fn cmd_inspect_weights(model: &Path, out_dir: &Path) -> Result<()> {
    let text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let model = MlpModel::from_json(&text).with_context(|| format!("parsing {}", model.display()))?;
    let report = weight_report(&model);
    let bytes = render(|w| write_json(w, &report))?;
    std::io::stdout().write_all(&bytes)?;
    let mut outputs = Outputs::default();
    outputs.add(out_dir.join("weight_report.json"), bytes);
    outputs.commit()
}

fn cmd_train_meta(run: &RunArgs) -> Result<()> {
    let l = load(run)?;
    let (mut game, data) = prepare(&l)?;
    game.attacks = vec![AttackKind::MetaClassifier];
    let calibrated = calibrate(&game, &data, game.shadow_count)?;
    let Some(Calibrated::MetaClassifier { model }) = calibrated.into_iter().next() else {
        bail!("calibration produced no meta-classifier");
    };
    let report = weight_report(&model);
    println!(
        "trained meta-classifier: inputs={} hidden={} first_layer_cv={}",
        model.n_in(),
        model.n_hidden(),
        report.first_layer_cv.map_or("inf".to_string(), |v| format!("{v:.4}"))
    );
    let mut outputs = Outputs::default();
    outputs.add(l.out_dir.join("meta_model.json"), model.to_json()?.into_bytes());
    outputs.add(l.out_dir.join("weight_report.json"), render(|w| write_json(w, &report))?);
    outputs.commit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::Generate { run, out } => cmd_generate(run, out.clone()),
        Command::Attack { run } => cmd_attack(run),
        Command::Sweep { run } => cmd_sweep(run),
        Command::Bound {
            epsilon,
            delta,
            k_max,
            out_dir,
        } => cmd_bound(*epsilon, *delta, *k_max, out_dir),
        Command::InspectWeights { model, out_dir } => cmd_inspect_weights(model, out_dir),
        Command::TrainMeta { run } => cmd_train_meta(run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
