//! Result files: per-run time series (CSV), summaries (JSON) and the
//! reproducibility manifest (TOML).
//!
//! Time-series column order:
//! `t, mean_throughput_per_bs, total_throughput, mean_rate_per_user,
//! total_dropped, mean_dropped_per_bs, satisfied_uavs, mean_utility`, then
//! for each base station `b` (0 is terrestrial) `throughput_bs{b},
//! load_bs{b}, associated_bs{b}, dropped_bs{b}`, then for each UAV `u`
//! `x_uav{u}, y_uav{u}, h_uav{u}`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::SimConfig;
use crate::engine::RunResult;
use crate::error::SimError;
use crate::experiment::SweepRow;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const SWEEP_FILE: &str = "sweep.csv";

pub fn timeseries_header(n_bs: usize, n_uavs: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "t",
        "mean_throughput_per_bs",
        "total_throughput",
        "mean_rate_per_user",
        "total_dropped",
        "mean_dropped_per_bs",
        "satisfied_uavs",
        "mean_utility",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for b in 0..n_bs {
        h.push(format!("throughput_bs{b}"));
        h.push(format!("load_bs{b}"));
        h.push(format!("associated_bs{b}"));
        h.push(format!("dropped_bs{b}"));
    }
    for u in 0..n_uavs {
        h.push(format!("x_uav{u}"));
        h.push(format!("y_uav{u}"));
        h.push(format!("h_uav{u}"));
    }
    h
}

pub fn write_timeseries<W: Write>(result: &RunResult, out: W) -> Result<(), SimError> {
    let n_bs = result.rows.first().map_or(0, |r| r.bs_throughput.len());
    let n_uavs = result.initial_positions.len();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(timeseries_header(n_bs, n_uavs))?;
    for (row, positions) in result.rows.iter().zip(&result.trajectory) {
        let mut rec = vec![
            row.t.to_string(),
            row.mean_throughput_per_bs().to_string(),
            row.total_throughput().to_string(),
            row.mean_rate_per_user().to_string(),
            row.total_dropped().to_string(),
            row.mean_dropped_per_bs().to_string(),
            row.satisfied_uavs.to_string(),
            row.mean_utility.to_string(),
        ];
        for b in 0..n_bs {
            rec.push(row.bs_throughput[b].to_string());
            rec.push(row.bs_load[b].to_string());
            rec.push(row.bs_associated[b].to_string());
            rec.push(row.bs_dropped[b].to_string());
        }
        for p in positions {
            rec.push(p.x.to_string());
            rec.push(p.y.to_string());
            rec.push(p.h.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<(), SimError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    generator: &'a str,
    version: &'a str,
    command: &'a str,
    seeds: &'a [u64],
    config: &'a SimConfig,
}

pub fn manifest_string(cfg: &SimConfig, command: &str, seeds: &[u64]) -> Result<String, SimError> {
    Ok(toml::to_string(&Manifest {
        generator: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seeds,
        config: cfg,
    })?)
}

pub fn write_manifest(dir: &Path, cfg: &SimConfig, command: &str, seeds: &[u64]) -> Result<(), SimError> {
    fs::write(dir.join(MANIFEST_FILE), manifest_string(cfg, command, seeds)?)?;
    Ok(())
}

/// Writes the time series, the run summary and the manifest of one run.
pub fn write_run(dir: &Path, cfg: &SimConfig, result: &RunResult) -> Result<(), SimError> {
    fs::create_dir_all(dir)?;
    write_timeseries(result, fs::File::create(dir.join(TIMESERIES_FILE))?)?;

    #[derive(Serialize)]
    struct RunFile<'a> {
        algorithm: String,
        seed: u64,
        steps: usize,
        equilibrium_at: Option<u64>,
        summary: &'a crate::engine::RunSummary,
        initial_positions: &'a [crate::geometry::Position3D],
        final_positions: &'a [crate::geometry::Position3D],
    }
    write_json(
        &RunFile {
            algorithm: result.algorithm.name().to_string(),
            seed: result.seed,
            steps: result.rows.len(),
            equilibrium_at: result.equilibrium_at,
            summary: &result.summary,
            initial_positions: &result.initial_positions,
            final_positions: &result.final_positions,
        },
        fs::File::create(dir.join(SUMMARY_FILE))?,
    )?;
    write_manifest(dir, cfg, "run", &[result.seed])
}
