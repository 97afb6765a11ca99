//! Multi-seed replications and parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, SimConfig};
use crate::engine::{run_episode, RunSummary};
use crate::error::{ConfigError, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: 0.0, std: 0.0, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, n }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std / (self.n as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub equilibrium_at: Option<u64>,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub algorithm: Algorithm,
    pub n_users: usize,
    pub n_uavs: usize,
    pub steps: u64,
    /// Sorted by seed.
    pub per_seed: Vec<SeedRecord>,
    /// Keyed by [`RunSummary::METRICS`] names.
    pub aggregate: BTreeMap<String, Stat>,
}

impl ReplicationSummary {
    pub fn stat(&self, metric: &str) -> Option<Stat> {
        self.aggregate.get(metric).copied()
    }
}

fn map_seeds<F>(seeds: &[u64], f: F) -> Result<Vec<SeedRecord>, SimError>
where
    F: Fn(u64) -> Result<SeedRecord, SimError> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(|&s| f(s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(|&s| f(s)).collect()
    }
}

/// Runs `cfg` once per seed and aggregates the run summaries. Records are
/// ordered by seed before aggregation, so the result does not depend on the
/// order of `seeds`.
pub fn run_replications(cfg: &SimConfig, seeds: &[u64]) -> Result<ReplicationSummary, SimError> {
    if seeds.is_empty() {
        return Err(ConfigError::Invalid("at least one seed is required".into()).into());
    }
    cfg.validate()?;
    let mut per_seed = map_seeds(seeds, |seed| {
        let res = run_episode(cfg, seed)?;
        Ok(SeedRecord { seed, equilibrium_at: res.equilibrium_at, summary: res.summary })
    })?;
    per_seed.sort_by_key(|r| r.seed);

    let aggregate = RunSummary::METRICS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let values: Vec<f64> = per_seed.iter().map(|r| r.summary.values()[i]).collect();
            (name.to_string(), Stat::of(&values))
        })
        .collect();

    Ok(ReplicationSummary {
        algorithm: cfg.run.algorithm,
        n_users: cfg.scenario.n_users,
        n_uavs: cfg.scenario.n_uavs,
        steps: cfg.run.steps,
        per_seed,
        aggregate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Users,
    Uavs,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Users => "users",
            SweepAxis::Uavs => "uavs",
        }
    }

    pub fn apply(self, cfg: &mut SimConfig, value: usize) {
        match self {
            SweepAxis::Users => cfg.scenario.n_users = value,
            SweepAxis::Uavs => {
                cfg.scenario.n_uavs = value;
                cfg.mobility.initial_positions = None;
            }
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "users" => Ok(SweepAxis::Users),
            "uavs" => Ok(SweepAxis::Uavs),
            other => Err(ConfigError::Invalid(format!("unknown sweep axis '{other}'"))),
        }
    }
}

/// One aggregate cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub algorithm: Algorithm,
    pub axis: SweepAxis,
    pub value: usize,
    pub summary: ReplicationSummary,
}

/// Long-format row: one metric of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: String,
    pub axis: String,
    pub value: usize,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n_seeds: usize,
}

/// Replicates every (algorithm, axis value) pair of the template.
pub fn sweep(
    template: &SimConfig,
    axis: SweepAxis,
    values: &[usize],
    algorithms: &[Algorithm],
) -> Result<Vec<SweepCell>, SimError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid("sweep needs at least one axis value".into()).into());
    }
    if algorithms.is_empty() {
        return Err(ConfigError::Invalid("sweep needs at least one algorithm".into()).into());
    }
    let mut cells = Vec::with_capacity(values.len() * algorithms.len());
    for &algorithm in algorithms {
        for &value in values {
            let mut cfg = template.clone();
            cfg.run.algorithm = algorithm;
            axis.apply(&mut cfg, value);
            let summary = run_replications(&cfg, &template.run.seeds)?;
            cells.push(SweepCell { algorithm, axis, value, summary });
        }
    }
    Ok(cells)
}

/// Flattens sweep cells into plot-ready long format.
pub fn long_format(cells: &[SweepCell]) -> Vec<SweepRow> {
    cells
        .iter()
        .flat_map(|cell| {
            cell.summary.aggregate.iter().map(move |(metric, stat)| SweepRow {
                algorithm: cell.algorithm.name().to_string(),
                axis: cell.axis.name().to_string(),
                value: cell.value,
                metric: metric.clone(),
                mean: stat.mean,
                std: stat.std,
                n_seeds: stat.n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.scenario.n_users = 30;
        cfg.scenario.n_uavs = 2;
        cfg.run.steps = 20;
        cfg
    }

    #[test]
    fn stat_basics() {
        let s = Stat::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert_eq!(s.n, 3);
        assert_eq!(Stat::of(&[4.0]).std, 0.0);
    }

    #[test]
    fn one_seed_equals_the_run() {
        let cfg = tiny();
        let rep = run_replications(&cfg, &[11]).unwrap();
        let run = run_episode(&cfg, 11).unwrap();
        assert_eq!(rep.per_seed.len(), 1);
        for (i, name) in RunSummary::METRICS.iter().enumerate() {
            assert_eq!(rep.stat(name).unwrap().mean, run.summary.values()[i]);
        }
    }

    #[test]
    fn seed_order_does_not_matter() {
        let cfg = tiny();
        let a = run_replications(&cfg, &[1, 2, 3]).unwrap();
        let b = run_replications(&cfg, &[3, 1, 2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_seed.len(), 3);
    }

    #[test]
    fn sweep_shapes() {
        let mut cfg = tiny();
        cfg.run.seeds = vec![1, 2];
        let cells = sweep(&cfg, SweepAxis::Uavs, &[1, 2], &[Algorithm::Learning, Algorithm::Random]).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(long_format(&cells).len(), 4 * RunSummary::METRICS.len());
        assert!(sweep(&cfg, SweepAxis::Users, &[10], &[]).is_err());
        assert!(sweep(&cfg, SweepAxis::Users, &[], &[Algorithm::Learning]).is_err());
    }
}
