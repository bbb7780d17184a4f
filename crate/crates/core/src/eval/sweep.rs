//! Parameter sweeps and result tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::game::{calibrate, run_prepared, AttackKind, AttackRun, AttackerKind, GameConfig, GameData, TargetObservations};
use super::metrics::RocCurve;
use crate::accountant::expected_attack_accuracy;
use crate::mechanism::MechanismFamily;
use crate::trace::TraceDataset;
use crate::{Error, Result};

/// One `(parameter, attack)` result. `key` is the swept value: the number of
/// positive observations or the shadow count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub key: usize,
    pub attack: AttackKind,
    pub attacker: AttackerKind,
    pub mechanism: MechanismFamily,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub auc: f64,
}

impl ResultRow {
    pub fn from_run(key: usize, cfg: &GameConfig, run: &AttackRun) -> Self {
        let s = run.summary();
        Self {
            key,
            attack: run.attack,
            attacker: cfg.attacker,
            mechanism: cfg.mechanism.family(),
            accuracy: s.accuracy,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
            auc: s.auc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub k: usize,
    pub attack: AttackKind,
    pub expected_bound: f64,
    pub empirical_accuracy: f64,
    pub gap: f64,
}

fn with_count(cfg: &GameConfig, k: usize) -> GameConfig {
    GameConfig {
        target_observations: TargetObservations::Count(k),
        ..cfg.clone()
    }
}

fn prepared(cfg: &GameConfig, population: &TraceDataset) -> Result<GameData> {
    GameData::from_dataset(population, &with_count(cfg, 0))
}

/// Replay the game with a synthetic target of every size in `k_grid`. Data
/// preparation and trial seeds are shared across the grid.
pub fn sweep_positive_observations(
    cfg: &GameConfig,
    population: &TraceDataset,
    k_grid: &[usize],
) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let base = prepared(cfg, population)?;
    let mut rows = Vec::new();
    for &k in k_grid {
        let data = base.with_synthetic_target(k, cfg.mechanism.clip_bound())?;
        let cfg_k = with_count(cfg, k);
        let out = super::game::run_game(&cfg_k, &data)?;
        rows.extend(out.runs.iter().map(|r| ResultRow::from_run(k, &cfg_k, r)));
    }
    Ok(rows)
}

/// Recalibrate every attack on each shadow count in `m_grid` and evaluate on
/// the same trials.
pub fn sweep_shadow_count(cfg: &GameConfig, population: &TraceDataset, m_grid: &[usize]) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let data = GameData::from_dataset(population, cfg)?;
    sweep_shadow_count_prepared(cfg, &data, m_grid)
}

pub fn sweep_shadow_count_prepared(cfg: &GameConfig, data: &GameData, m_grid: &[usize]) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &m in m_grid {
        if m < 2 {
            return Err(Error::config("m_grid", "shadow counts must be at least 2"));
        }
        let attacks = calibrate(cfg, data, m)?;
        let out = run_prepared(cfg, data, &attacks)?;
        rows.extend(out.runs.iter().map(|r| ResultRow::from_run(m, cfg, r)));
    }
    Ok(rows)
}

/// Empirical accuracy of each attack against the composition bound for an
/// informed attacker.
pub fn gap_report(cfg: &GameConfig, population: &TraceDataset, k_grid: &[usize]) -> Result<Vec<GapRow>> {
    if cfg.attacker != AttackerKind::Informed {
        return Err(Error::config("attacker", "the gap report needs an informed attacker"));
    }
    let rows = sweep_positive_observations(cfg, population, k_grid)?;
    rows.into_iter()
        .map(|r| {
            let bound = if r.key == 0 {
                0.5
            } else {
                expected_attack_accuracy(&cfg.mechanism, r.key)?
            };
            Ok(GapRow {
                k: r.key,
                attack: r.attack,
                expected_bound: bound,
                empirical_accuracy: r.accuracy,
                gap: bound - r.accuracy,
            })
        })
        .collect()
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

/// CSV with header `<key_name>,attack,attacker,mechanism,accuracy,ci_low,ci_high,auc`.
pub fn write_rows_csv<W: Write>(w: W, key_name: &str, rows: &[ResultRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([key_name, "attack", "attacker", "mechanism", "accuracy", "ci_low", "ci_high", "auc"])?;
    for r in rows {
        out.write_record([
            r.key.to_string(),
            r.attack.to_string(),
            r.attacker.to_string(),
            r.mechanism.to_string(),
            f6(r.accuracy),
            f6(r.ci_low),
            f6(r.ci_high),
            f6(r.auc),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_gap_csv<W: Write>(w: W, rows: &[GapRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "attack", "expected_bound", "empirical_accuracy", "gap"])?;
    for r in rows {
        out.write_record([
            r.k.to_string(),
            r.attack.to_string(),
            f6(r.expected_bound),
            f6(r.empirical_accuracy),
            f6(r.gap),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// ROC points of several attacks as `attack,fpr,tpr`.
pub fn write_roc_csv<W: Write>(w: W, curves: &[(AttackKind, RocCurve)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["attack", "fpr", "tpr"])?;
    for (attack, curve) in curves {
        for &(fpr, tpr) in &curve.points {
            out.write_record([attack.to_string(), format!("{fpr:.8}"), format!("{tpr:.8}")])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
