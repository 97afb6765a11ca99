//! Browser bindings for the placement simulator.
//!
//! Three operations are exported: LoS-probability and path-loss curves for
//! the channel explorer, the candidate grid used by the benchmark schemes,
//! and a full episode run returning everything the page needs to draw the
//! deployment map and KPI traces.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use uavsim_core::channel::{self, Condition, EnvironmentParams, RadioProfile};
use uavsim_core::geometry::{self, HexRegion, Position3D};
use uavsim_core::{Algorithm, Episode, SimConfig};

/// LoS probability at `n` evenly spaced horizontal distances in `[0, r_max]`
/// for a transmitter at `h_b` and a receiver at 1.5 m.
#[wasm_bindgen]
pub fn los_curve(alpha: f64, beta: f64, gamma: f64, h_b: f64, r_max: f64, n: usize) -> Vec<f64> {
    let env = EnvironmentParams { alpha, beta, gamma };
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let r = r_max * i as f64 / (n - 1) as f64;
            channel::los_probability(&env, h_b, 1.5, r).unwrap_or(f64::NAN)
        })
        .collect()
}

/// Expected path loss in dB (LoS/NLoS mixture of linear gains) from a UAV
/// at `h_b` to a ground user, at `n` horizontal distances in `[0, r_max]`.
/// `terrestrial` switches to the terrestrial radio profile.
#[wasm_bindgen]
pub fn path_loss_curve(
    alpha: f64,
    beta: f64,
    gamma: f64,
    h_b: f64,
    r_max: f64,
    n: usize,
    terrestrial: bool,
) -> Vec<f64> {
    let env = EnvironmentParams { alpha, beta, gamma };
    let profile = if terrestrial { RadioProfile::terrestrial(2e9) } else { RadioProfile::uav(2e9) };
    let bs = Position3D::new(0.0, 0.0, h_b);
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let user = Position3D::new(r_max * i as f64 / (n - 1) as f64, 0.0, 1.5);
            channel::link_budget(&env, &profile, &bs, &user)
                .map(|lb| -channel::linear_to_db(lb.expected_gain))
                .unwrap_or(f64::NAN)
        })
        .collect()
}

/// LoS-only path loss in dB for the same sweep, for comparison.
#[wasm_bindgen]
pub fn los_path_loss_curve(h_b: f64, r_max: f64, n: usize, terrestrial: bool) -> Vec<f64> {
    let profile = if terrestrial { RadioProfile::terrestrial(2e9) } else { RadioProfile::uav(2e9) };
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let r = r_max * i as f64 / (n - 1) as f64;
            let d = r.hypot(h_b - 1.5);
            channel::path_loss_db(&profile, Condition::Los, d, h_b).unwrap_or(f64::NAN)
        })
        .collect()
}

/// Candidate grid as a flat `[x0, y0, x1, y1, ...]` array; empty when the
/// count is not reachable.
#[wasm_bindgen]
pub fn candidate_grid(radius: f64, count: usize) -> Vec<f64> {
    HexRegion::centered(radius)
        .ok()
        .and_then(|r| geometry::hex_candidate_grid(&r, count).ok())
        .map(|pts| pts.into_iter().flat_map(|(x, y)| [x, y]).collect())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct DemoRequest {
    pub algorithm: String,
    pub users: usize,
    pub uavs: usize,
    pub steps: u64,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for DemoRequest {
    fn default() -> Self {
        let env = EnvironmentParams::default();
        Self {
            algorithm: "learning".into(),
            users: 100,
            uavs: 8,
            steps: 500,
            seed: 1,
            alpha: env.alpha,
            beta: env.beta,
            gamma: env.gamma,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoResponse {
    pub ok: bool,
    pub error: Option<String>,
    pub radius: f64,
    pub terrestrial: Option<Position3D>,
    pub users: Vec<[f64; 2]>,
    /// Serving base station per user at the last step; -1 when dropped.
    pub serving: Vec<i64>,
    pub initial_uavs: Vec<Position3D>,
    pub final_uavs: Vec<Position3D>,
    /// UAV positions every `trace_stride` steps.
    pub trace: Vec<Vec<Position3D>>,
    pub trace_stride: u64,
    pub throughput_per_bs: Vec<f64>,
    pub dropped_per_bs: Vec<f64>,
    pub satisfied: Vec<usize>,
    pub equilibrium_at: Option<u64>,
}

impl DemoResponse {
    fn failure(msg: String) -> Self {
        Self {
            ok: false,
            error: Some(msg),
            radius: 0.0,
            terrestrial: None,
            users: Vec::new(),
            serving: Vec::new(),
            initial_uavs: Vec::new(),
            final_uavs: Vec::new(),
            trace: Vec::new(),
            trace_stride: 1,
            throughput_per_bs: Vec::new(),
            dropped_per_bs: Vec::new(),
            satisfied: Vec::new(),
            equilibrium_at: None,
        }
    }
}

/// Runs one episode described by a JSON [`DemoRequest`] and returns a JSON
/// [`DemoResponse`]. Errors are reported in the response, never thrown.
#[wasm_bindgen]
pub fn simulate(request_json: &str) -> String {
    let response = serde_json::from_str::<DemoRequest>(request_json)
        .map_err(|e| e.to_string())
        .and_then(|req| simulate_request(&req))
        .unwrap_or_else(DemoResponse::failure);
    serde_json::to_string(&response).expect("response serializes")
}

pub fn simulate_request(req: &DemoRequest) -> Result<DemoResponse, String> {
    let mut cfg = SimConfig::default();
    cfg.run.algorithm = req.algorithm.parse::<Algorithm>().map_err(|e| e.to_string())?;
    cfg.scenario.n_users = req.users;
    cfg.scenario.n_uavs = req.uavs;
    cfg.run.steps = req.steps;
    cfg.run.seeds = vec![req.seed];
    cfg.environment = EnvironmentParams { alpha: req.alpha, beta: req.beta, gamma: req.gamma };
    cfg.validate().map_err(|e| e.to_string())?;

    let mut episode = Episode::new(&cfg, req.seed).map_err(|e| e.to_string())?;
    let users: Vec<[f64; 2]> =
        episode.network.users.iter().map(|u| [u.position.x, u.position.y]).collect();
    let terrestrial = episode.network.base_stations[0].position;

    let stride = (req.steps / 200).max(1);
    let initial_uavs = episode.uav_positions();
    let mut trace = vec![initial_uavs.clone()];
    let mut throughput_per_bs = Vec::new();
    let mut dropped_per_bs = Vec::new();
    let mut satisfied = Vec::new();
    while !episode.is_finished() {
        let row = episode.step().map_err(|e| e.to_string())?;
        throughput_per_bs.push(row.mean_throughput_per_bs());
        dropped_per_bs.push(row.mean_dropped_per_bs());
        satisfied.push(row.satisfied_uavs);
        if episode.time() % stride == 0 {
            trace.push(episode.uav_positions());
        }
    }
    let serving = episode
        .network
        .users
        .iter()
        .map(|u| match (u.serving_bs, u.dropped) {
            (Some(b), false) => b as i64,
            _ => -1,
        })
        .collect();

    Ok(DemoResponse {
        ok: true,
        error: None,
        radius: cfg.scenario.region_radius,
        terrestrial: Some(terrestrial),
        users,
        serving,
        final_uavs: episode.uav_positions(),
        initial_uavs,
        trace,
        trace_stride: stride,
        throughput_per_bs,
        dropped_per_bs,
        satisfied,
        equilibrium_at: episode.equilibrium_at(),
    })
}
