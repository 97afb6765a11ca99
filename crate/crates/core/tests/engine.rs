use std::fs;
use std::process::Command;

use uavsim_core::network::ChannelMode;
use uavsim_core::output::{self, MANIFEST_FILE, SUMMARY_FILE, SWEEP_FILE, TIMESERIES_FILE};
use uavsim_core::{game, run_episode, Algorithm, Episode, SimConfig, SimError};

fn small(algorithm: Algorithm) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.scenario.n_users = 60;
    cfg.scenario.n_uavs = 4;
    cfg.run.steps = 150;
    cfg.run.algorithm = algorithm;
    cfg
}

#[test]
fn replay_from_a_snapshot_matches() {
    let cfg = small(Algorithm::Learning);
    let mut a = Episode::new(&cfg, 3).unwrap();
    for _ in 0..40 {
        a.step().unwrap();
    }
    let mut b = a.clone();
    while !a.is_finished() {
        assert_eq!(a.step().unwrap(), b.step().unwrap());
    }
    assert_eq!(a.uav_positions(), b.uav_positions());
}

#[test]
fn throughput_never_exceeds_demand() {
    for algorithm in Algorithm::ALL {
        let cfg = small(algorithm);
        let demand = cfg.scenario.n_users as f64 * cfg.radio.demand_bps;
        let res = run_episode(&cfg, 8).unwrap();
        for row in &res.rows {
            assert!(row.total_throughput() <= demand * (1.0 + 1e-12));
            let served = row.user_rate.iter().filter(|r| **r > 0.0).count();
            assert_eq!(served + row.total_dropped(), cfg.scenario.n_users);
            assert_eq!(row.bs_associated.iter().sum::<usize>(), cfg.scenario.n_users);
        }
    }
}

#[test]
fn baselines_never_move() {
    for algorithm in [Algorithm::Strategic, Algorithm::RandomFixed, Algorithm::Random] {
        let res = run_episode(&small(algorithm), 2).unwrap();
        assert!(res.trajectory.iter().all(|p| *p == res.initial_positions));
        assert_eq!(res.final_positions, res.initial_positions);
        assert_eq!(res.equilibrium_at, None);
    }
}

#[test]
fn fixed_altitude_baseline_flies_at_the_fixed_altitude() {
    let cfg = small(Algorithm::RandomFixed);
    let res = run_episode(&cfg, 2).unwrap();
    assert!(res.initial_positions.iter().all(|p| p.h == cfg.baselines.fixed_altitude));
}

#[test]
fn strategic_placement_ignores_the_seed() {
    let cfg = small(Algorithm::Strategic);
    let a = run_episode(&cfg, 1).unwrap();
    let b = run_episode(&cfg, 2).unwrap();
    assert_eq!(a.initial_positions, b.initial_positions);
}

#[test]
fn equilibrium_holds_positions() {
    let mut cfg = small(Algorithm::Learning);
    cfg.run.steps = 400;
    let mut ep = Episode::new(&cfg, 11).unwrap();
    while !ep.is_finished() {
        let was_equilibrium = game::is_satisfaction_equilibrium(&ep.agents) && ep.time() > 0;
        let before = ep.uav_positions();
        ep.step().unwrap();
        if was_equilibrium {
            assert_eq!(before, ep.uav_positions());
        }
    }
}

#[test]
fn bernoulli_mode_is_seeded() {
    let mut cfg = small(Algorithm::Learning);
    cfg.run.channel_mode = ChannelMode::Bernoulli;
    let a = run_episode(&cfg, 5).unwrap();
    let b = run_episode(&cfg, 5).unwrap();
    assert_eq!(a.rows, b.rows);
    cfg.run.channel_mode = ChannelMode::Expected;
    let c = run_episode(&cfg, 5).unwrap();
    assert_ne!(a.rows, c.rows);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small(Algorithm::Learning);
    cfg.scenario.region_radius = -1.0;
    assert!(matches!(run_episode(&cfg, 1), Err(SimError::Config(_))));

    let mut cfg = small(Algorithm::Learning);
    cfg.mobility.h_min = 400.0;
    assert!(run_episode(&cfg, 1).is_err());

    assert!(SimConfig::from_toml_str("[scenario]\nn_users = 5\nbogus = 1\n").is_err());
    assert!(SimConfig::from_toml_str("[run]\nalgorithm = \"teleport\"\n").is_err());
}

#[test]
fn run_files_are_written_and_reproducible() {
    let cfg = small(Algorithm::Learning);
    let res = run_episode(&cfg, 4).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    output::write_run(a.path(), &cfg, &res).unwrap();
    output::write_run(b.path(), &cfg, &run_episode(&cfg, 4).unwrap()).unwrap();
    for name in [TIMESERIES_FILE, SUMMARY_FILE, MANIFEST_FILE] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert!(!x.is_empty(), "{name} is empty");
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name} differs");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["seed"], 4);
    assert_eq!(summary["steps"], 150);
}

fn uavsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_uavsim")).args(args).output().unwrap()
}

#[test]
fn cli_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = uavsim(&["run", "--users", "30", "--uavs", "2", "--steps", "20", "--seed", "3", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
    assert_eq!(csv.lines().count(), 21);
    let manifest: toml::Value = toml::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["command"].as_str(), Some("run"));
}

#[test]
fn cli_config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let res = uavsim(&["config"]);
    assert!(res.status.success());
    let path = dir.path().join("cfg.toml");
    fs::write(&path, &res.stdout).unwrap();
    assert_eq!(SimConfig::from_file(&path).unwrap(), SimConfig::default());

    let out = dir.path().join("rep");
    let res = uavsim(&[
        "replicate", "--config", path.to_str().unwrap(), "--algo", "random", "--users", "20",
        "--uavs", "2", "--steps", "10", "--seeds", "1,2,3", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["per_seed"].as_array().unwrap().len(), 3);
    assert_eq!(summary["algorithm"], "random");
}

#[test]
fn cli_sweep_writes_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let res = uavsim(&[
        "sweep", "--axis", "users", "--values", "10,20", "--algos", "learning,random-fixed",
        "--uavs", "2", "--steps", "10", "--seeds", "1,2", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join(SWEEP_FILE)).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers, vec!["algorithm", "axis", "value", "metric", "mean", "std", "n_seeds"]);
    assert_eq!(reader.records().count(), 2 * 2 * 6);
}

#[test]
fn cli_rejects_bad_input() {
    assert!(!uavsim(&["run", "--algo", "teleport"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[scenario]\nregion_radius = 0\n").unwrap();
    assert!(!uavsim(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]).status.success());
}
