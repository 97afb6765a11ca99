//! Time-stepped episode execution.
//!
//! Per timestep, in order:
//!  1. UAV strategy selection and movement (learning only),
//!  2. load-estimate update,
//!  3. load-aware association,
//!  4. rate computation and capacity enforcement,
//!  5. utility, satisfaction, policy update and threshold adaptation
//!     (learning only),
//!  6. metrics.
//!
//! Baseline UAVs are placed once before the first step and never move.

use serde::{Deserialize, Serialize};

use rand_chacha::ChaCha8Rng;

use crate::baselines::{self, CandidateSet};
use crate::channel::{self, dbm_to_watts};
use crate::config::{Algorithm, SimConfig};
use crate::error::SimError;
use crate::game::{self, GameWeights, ThresholdAdaptation, UavAgent};
use crate::geometry::{self, AltitudeBounds, HexRegion, Position3D, StepSizes};
use crate::network::{self, BaseStation, BsKind, ChannelMode, MetricsRow, NetworkState, UserTerminal};
use crate::rng::{self, Stream};

/// Index of the terrestrial BS in the base station list; UAVs follow it.
pub const TERRESTRIAL_BS: usize = 0;

/// One running simulation. Cloning it snapshots the full state including
/// random streams, so a clone steps identically to the original.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    algorithm: Algorithm,
    seed: u64,
    region: HexRegion,
    bounds: AltitudeBounds,
    steps: StepSizes,
    weights: GameWeights,
    adaptation: ThresholdAdaptation,
    channel_mode: ChannelMode,
    load_rate: network::LoadLearningRate,
    horizon: u64,
    pub network: NetworkState,
    pub agents: Vec<UavAgent>,
    agent_rngs: Vec<ChaCha8Rng>,
    channel_rng: ChaCha8Rng,
    t: u64,
    equilibrium_at: Option<u64>,
}

impl Episode {
    pub fn new(cfg: &SimConfig, seed: u64) -> Result<Self, SimError> {
        cfg.validate()?;
        let region = cfg.region()?;
        let bounds = cfg.altitude_bounds()?;
        let s = &cfg.scenario;
        let radio = &cfg.radio;

        let mut user_rng = rng::stream(seed, Stream::UserPlacement);
        let users: Vec<UserTerminal> =
            geometry::sample_uniform_users(&region, s.n_users, s.user_altitude, &mut user_rng)
                .into_iter()
                .enumerate()
                .map(|(k, p)| UserTerminal::new(k, p, radio.demand_bps))
                .collect();

        let uav_positions = initial_uav_positions(cfg, seed, &region, &bounds)?;

        let terrestrial_profile = radio.terrestrial.at_frequency(radio.carrier_frequency_hz);
        let uav_profile = radio.uav.at_frequency(radio.carrier_frequency_hz);
        let mut bss = vec![BaseStation::new(
            TERRESTRIAL_BS,
            BsKind::Terrestrial,
            Position3D::new(region.center.0, region.center.1, s.terrestrial_altitude),
            dbm_to_watts(radio.terrestrial_tx_dbm),
            terrestrial_profile,
        )];
        for (u, p) in uav_positions.into_iter().enumerate() {
            bss.push(BaseStation::new(
                u + 1,
                BsKind::Uav,
                p,
                dbm_to_watts(radio.uav_tx_dbm),
                uav_profile,
            ));
        }
        let noise = channel::noise_power(radio.bandwidth_hz, radio.noise_psd_dbm_hz);
        let network = NetworkState::new(bss, users, cfg.environment, radio.bandwidth_hz, noise)?;

        let agents = (0..s.n_uavs)
            .map(|u| UavAgent::new(u + 1, cfg.initial_threshold(), cfg.game.learning_rate))
            .collect();
        let agent_rngs = (0..s.n_uavs).map(|u| rng::stream(seed, Stream::Agent(u))).collect();

        Ok(Self {
            algorithm: cfg.run.algorithm,
            seed,
            region,
            bounds,
            steps: cfg.step_sizes(),
            weights: cfg.game_weights(),
            adaptation: cfg.threshold_adaptation(),
            channel_mode: cfg.run.channel_mode,
            load_rate: radio.load_estimate,
            horizon: cfg.run.steps,
            network,
            agents,
            agent_rngs,
            channel_rng: rng::stream(seed, Stream::Channel),
            t: 0,
            equilibrium_at: None,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Last completed timestep (0 before the first step).
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.horizon
    }

    pub fn region(&self) -> &HexRegion {
        &self.region
    }

    pub fn altitude_bounds(&self) -> &AltitudeBounds {
        &self.bounds
    }

    pub fn weights(&self) -> &GameWeights {
        &self.weights
    }

    pub fn equilibrium_at(&self) -> Option<u64> {
        self.equilibrium_at
    }

    pub fn uav_positions(&self) -> Vec<Position3D> {
        self.network.base_stations[TERRESTRIAL_BS + 1..]
            .iter()
            .map(|b| b.position)
            .collect()
    }

    /// Current collision activation of every UAV.
    pub fn activations(&self) -> Vec<u8> {
        game::activations(&self.uav_positions(), self.weights.d_min)
    }

    /// Advances one timestep and returns its metrics.
    pub fn step(&mut self) -> Result<MetricsRow, SimError> {
        self.t += 1;
        let t = self.t;
        let learning = self.algorithm == Algorithm::Learning;

        if learning {
            self.move_uavs()?;
        }
        if self.channel_mode == ChannelMode::Bernoulli {
            self.network.redraw_received(&mut self.channel_rng);
        }
        self.network.update_load_estimates(t, &self.load_rate);
        self.network.associate();
        self.network.serve()?;

        if learning {
            self.play(t);
        }

        let mut row = network::collect_metrics(&self.network, t);
        row.satisfied_uavs = self.agents.iter().filter(|a| a.satisfied).count();
        row.mean_utility = if learning && !self.agents.is_empty() {
            self.agents.iter().map(|a| a.last_utility).sum::<f64>() / self.agents.len() as f64
        } else {
            0.0
        };
        Ok(row)
    }

    fn move_uavs(&mut self) -> Result<(), SimError> {
        for (agent, rng) in self.agents.iter_mut().zip(&mut self.agent_rngs) {
            // A satisfied UAV keeps its strategy and holds its position.
            if agent.satisfied {
                continue;
            }
            let strategy = game::select_strategy(agent, rng);
            agent.last_strategy = strategy;
            let from = self.network.base_stations[agent.bs_id].position;
            let to = geometry::apply_strategy(from, strategy, self.steps, &self.region, &self.bounds);
            self.network.move_bs(agent.bs_id, to)?;
        }
        Ok(())
    }

    fn play(&mut self, t: u64) {
        let activations = self.activations();
        for (agent, &gamma) in self.agents.iter_mut().zip(&activations) {
            let served = self.network.served_rate_sum(agent.bs_id);
            let f = game::utility(served, gamma, &self.weights);
            let satisfied = game::satisfaction_indicator(agent, f);
            let q = game::q_factor(f, agent.threshold, self.weights.f_max);
            let step = agent.learning_rate.at(t) * q;
            game::update_policy(&mut agent.policy, agent.last_strategy, satisfied, step);
            game::adapt_threshold(agent, &self.adaptation);
        }
        if self.equilibrium_at.is_none() && game::is_satisfaction_equilibrium(&self.agents) {
            self.equilibrium_at = Some(t);
        }
    }
}

fn initial_uav_positions(
    cfg: &SimConfig,
    seed: u64,
    region: &HexRegion,
    bounds: &AltitudeBounds,
) -> Result<Vec<Position3D>, SimError> {
    let n = cfg.scenario.n_uavs;
    let b = &cfg.baselines;
    let positions = match cfg.run.algorithm {
        Algorithm::Learning => match &cfg.mobility.initial_positions {
            Some(fixed) => fixed.clone(),
            None => {
                let mut rng = rng::stream(seed, Stream::UavInit);
                (0..n)
                    .map(|_| {
                        let (x, y) = region.sample_xy(&mut rng);
                        let h = rand::Rng::gen_range(&mut rng, bounds.h_min..=bounds.h_max);
                        Position3D::new(x, y, h)
                    })
                    .collect()
            }
        },
        Algorithm::Strategic => {
            let candidates = CandidateSet::build(
                region,
                bounds,
                b.horizontal_candidates,
                b.altitude_levels,
                b.fixed_altitude,
            )?;
            let terrestrial = Position3D::new(
                region.center.0,
                region.center.1,
                cfg.scenario.terrestrial_altitude,
            );
            baselines::place_strategic_all(&candidates, &[terrestrial], n)
        }
        Algorithm::RandomFixed => {
            let mut rng = rng::stream(seed, Stream::BaselinePlacement);
            (0..n)
                .map(|_| baselines::place_random_fixed(region, b.fixed_altitude, &mut rng))
                .collect()
        }
        Algorithm::Random => {
            let candidates = CandidateSet::build(
                region,
                bounds,
                b.horizontal_candidates,
                b.altitude_levels,
                b.fixed_altitude,
            )?;
            let mut rng = rng::stream(seed, Stream::BaselinePlacement);
            (0..n).map(|_| baselines::place_random(&candidates, &mut rng)).collect()
        }
    };
    Ok(positions)
}

/// Scalar KPIs averaged over the trailing part of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mean_throughput_per_bs: f64,
    pub mean_rate_per_user: f64,
    pub mean_dropped_per_bs: f64,
    pub mean_total_dropped: f64,
    pub mean_satisfied_uavs: f64,
    pub mean_utility: f64,
}

impl RunSummary {
    pub const METRICS: [&'static str; 6] = [
        "mean_throughput_per_bs",
        "mean_rate_per_user",
        "mean_dropped_per_bs",
        "mean_total_dropped",
        "mean_satisfied_uavs",
        "mean_utility",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.mean_throughput_per_bs,
            self.mean_rate_per_user,
            self.mean_dropped_per_bs,
            self.mean_total_dropped,
            self.mean_satisfied_uavs,
            self.mean_utility,
        ]
    }

    /// Averages over the last `ceil(tail * rows.len())` rows (at least one).
    pub fn from_rows(rows: &[MetricsRow], tail: f64) -> Self {
        if rows.is_empty() {
            return Self {
                mean_throughput_per_bs: 0.0,
                mean_rate_per_user: 0.0,
                mean_dropped_per_bs: 0.0,
                mean_total_dropped: 0.0,
                mean_satisfied_uavs: 0.0,
                mean_utility: 0.0,
            };
        }
        let n = ((rows.len() as f64 * tail).ceil() as usize).clamp(1, rows.len());
        let window = &rows[rows.len() - n..];
        let avg = |f: &dyn Fn(&MetricsRow) -> f64| window.iter().map(f).sum::<f64>() / n as f64;
        Self {
            mean_throughput_per_bs: avg(&|r| r.mean_throughput_per_bs()),
            mean_rate_per_user: avg(&|r| r.mean_rate_per_user()),
            mean_dropped_per_bs: avg(&|r| r.mean_dropped_per_bs()),
            mean_total_dropped: avg(&|r| r.total_dropped() as f64),
            mean_satisfied_uavs: avg(&|r| r.satisfied_uavs as f64),
            mean_utility: avg(&|r| r.mean_utility),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    /// UAV positions after each timestep, parallel to `rows`.
    pub trajectory: Vec<Vec<Position3D>>,
    pub initial_positions: Vec<Position3D>,
    pub final_positions: Vec<Position3D>,
    pub equilibrium_at: Option<u64>,
    pub summary: RunSummary,
}

/// Runs one full episode of `cfg` under `seed`.
pub fn run_episode(cfg: &SimConfig, seed: u64) -> Result<RunResult, SimError> {
    let mut episode = Episode::new(cfg, seed)?;
    let initial_positions = episode.uav_positions();
    let mut rows = Vec::with_capacity(cfg.run.steps as usize);
    let mut trajectory = Vec::with_capacity(cfg.run.steps as usize);
    while !episode.is_finished() {
        rows.push(episode.step()?);
        trajectory.push(episode.uav_positions());
    }
    let summary = RunSummary::from_rows(&rows, cfg.run.summary_tail);
    Ok(RunResult {
        algorithm: episode.algorithm(),
        seed,
        final_positions: episode.uav_positions(),
        initial_positions,
        equilibrium_at: episode.equilibrium_at(),
        rows,
        trajectory,
        summary,
    })
}
