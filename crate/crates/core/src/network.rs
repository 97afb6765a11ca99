//! Base stations, users, load bookkeeping and load-aware association.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{self, EnvironmentParams, LinkBudget, RadioProfile};
use crate::error::NetworkError;
use crate::geometry::Position3D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsKind {
    Terrestrial,
    Uav,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub kind: BsKind,
    pub position: Position3D,
    /// Transmit power in watts.
    pub tx_power: f64,
    pub profile: RadioProfile,
    /// Load after capacity enforcement, in `[0, 1]`.
    pub load: f64,
    /// Load before enforcement; may exceed one.
    pub offered_load: f64,
    pub load_estimate: f64,
}

impl BaseStation {
    pub fn new(
        id: usize,
        kind: BsKind,
        position: Position3D,
        tx_power: f64,
        profile: RadioProfile,
    ) -> Self {
        Self {
            id,
            kind,
            position,
            tx_power,
            profile,
            load: 0.0,
            offered_load: 0.0,
            load_estimate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub id: usize,
    pub position: Position3D,
    /// Traffic influx rate in bit/s.
    pub demand: f64,
    pub serving_bs: Option<usize>,
    pub dropped: bool,
}

impl UserTerminal {
    pub fn new(id: usize, position: Position3D, demand: f64) -> Self {
        Self { id, position, demand, serving_bs: None, dropped: false }
    }
}

/// Fraction of time needed to carry `demand` at `rate`.
pub fn time_fraction(demand: f64, rate: f64) -> f64 {
    demand / rate
}

/// Sum of per-user time fractions. `served` pairs each user's demand with
/// the rate its base station offers it.
pub fn bs_load(served: &[(usize, f64, f64)]) -> Result<f64, NetworkError> {
    served.iter().try_fold(0.0, |acc, &(user, demand, rate)| {
        if rate <= 0.0 && demand > 0.0 {
            Err(NetworkError::ZeroRate { user, demand })
        } else {
            Ok(acc + time_fraction(demand, rate))
        }
    })
}

/// Decaying learning rate `η(t) = t^(-exponent)` for the load estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadLearningRate {
    pub exponent: f64,
}

impl Default for LoadLearningRate {
    fn default() -> Self {
        Self { exponent: 0.9 }
    }
}

impl LoadLearningRate {
    pub fn at(&self, t: u64) -> f64 {
        (t.max(1) as f64).powf(-self.exponent)
    }
}

/// Exponential smoothing of the previous load into the broadcast estimate.
pub fn smooth_load(eta: f64, previous_load: f64, previous_estimate: f64) -> f64 {
    eta * previous_load + (1.0 - eta) * previous_estimate
}

/// Advances `bs.load_estimate` to timestep `t` using the load of `t - 1`.
pub fn update_load_estimate(bs: &mut BaseStation, t: u64, rate: &LoadLearningRate) -> f64 {
    bs.load_estimate = smooth_load(rate.at(t), bs.load, bs.load_estimate);
    bs.load_estimate
}

/// Association score `p_b g_{b,k} (1 - ρ̂_b)`.
pub fn association_score(received: f64, load_estimate: f64) -> f64 {
    received * (1.0 - load_estimate)
}

/// Serving base station for each user. `received[b][k]` is the power from
/// base station `b` at user `k`. Ties go to the lowest base station index.
pub fn associate_users(received: &[Vec<f64>], load_estimates: &[f64]) -> Vec<usize> {
    let n_users = received.first().map_or(0, Vec::len);
    (0..n_users)
        .map(|k| {
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (b, row) in received.iter().enumerate() {
                let score = association_score(row[k], load_estimates[b]);
                if score > best_score {
                    best = b;
                    best_score = score;
                }
            }
            best
        })
        .collect()
}

/// Drops users, largest time fraction first, until the residual load is at
/// most one. Takes `(user_id, fraction)` pairs; returns the dropped ids and
/// the residual load.
pub fn enforce_capacity(fractions: &[(usize, f64)]) -> (Vec<usize>, f64) {
    let mut order: Vec<(usize, f64)> = fractions.to_vec();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut residual: f64 = fractions.iter().map(|f| f.1).sum();
    let mut dropped = Vec::new();
    for (user, fraction) in order {
        if residual <= 1.0 + 1e-12 {
            break;
        }
        residual -= fraction;
        dropped.push(user);
    }
    (dropped, residual.max(0.0))
}

/// Per-timestep network KPIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub t: u64,
    /// Served demand per base station, bit/s.
    pub bs_throughput: Vec<f64>,
    pub bs_load: Vec<f64>,
    pub bs_associated: Vec<usize>,
    pub bs_dropped: Vec<usize>,
    /// Shannon rate from the serving base station; zero when dropped.
    pub user_rate: Vec<f64>,
    pub satisfied_uavs: usize,
    pub mean_utility: f64,
}

impl MetricsRow {
    pub fn mean_throughput_per_bs(&self) -> f64 {
        mean(&self.bs_throughput)
    }

    pub fn mean_rate_per_user(&self) -> f64 {
        mean(&self.user_rate)
    }

    pub fn total_dropped(&self) -> usize {
        self.bs_dropped.iter().sum()
    }

    pub fn mean_dropped_per_bs(&self) -> f64 {
        if self.bs_dropped.is_empty() {
            0.0
        } else {
            self.total_dropped() as f64 / self.bs_dropped.len() as f64
        }
    }

    pub fn total_throughput(&self) -> f64 {
        self.bs_throughput.iter().sum()
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// How the LoS/NLoS state enters the channel gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Mixture of the LoS and NLoS gains weighted by the LoS probability.
    #[default]
    Expected,
    /// Independent LoS draw per link, redrawn every timestep.
    Bernoulli,
}

/// Full radio state of the network at one timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub base_stations: Vec<BaseStation>,
    pub users: Vec<UserTerminal>,
    pub env: EnvironmentParams,
    pub bandwidth: f64,
    pub noise: f64,
    /// `budgets[b][k]`.
    budgets: Vec<Vec<LinkBudget>>,
    /// `received[b][k]`, watts.
    received: Vec<Vec<f64>>,
    user_rate: Vec<f64>,
    dropped_per_bs: Vec<Vec<usize>>,
}

impl NetworkState {
    pub fn new(
        base_stations: Vec<BaseStation>,
        users: Vec<UserTerminal>,
        env: EnvironmentParams,
        bandwidth: f64,
        noise: f64,
    ) -> Result<Self, NetworkError> {
        let n_bs = base_stations.len();
        let n_users = users.len();
        let mut state = Self {
            base_stations,
            users,
            env,
            bandwidth,
            noise,
            budgets: vec![Vec::with_capacity(n_users); n_bs],
            received: vec![vec![0.0; n_users]; n_bs],
            user_rate: vec![0.0; n_users],
            dropped_per_bs: vec![Vec::new(); n_bs],
        };
        for b in 0..n_bs {
            state.refresh_links(b)?;
        }
        Ok(state)
    }

    /// Recomputes link budgets and expected received powers for one BS.
    pub fn refresh_links(&mut self, b: usize) -> Result<(), NetworkError> {
        let bs = &self.base_stations[b];
        let budgets = self
            .users
            .iter()
            .map(|u| channel::link_budget(&self.env, &bs.profile, &bs.position, &u.position))
            .collect::<Result<Vec<_>, _>>()?;
        self.received[b] = budgets.iter().map(|lb| bs.tx_power * lb.expected_gain).collect();
        self.budgets[b] = budgets;
        Ok(())
    }

    pub fn move_bs(&mut self, b: usize, to: Position3D) -> Result<(), NetworkError> {
        if self.base_stations[b].position != to {
            self.base_stations[b].position = to;
            self.refresh_links(b)?;
        }
        Ok(())
    }

    /// Replaces every received power with a fresh LoS/NLoS realization.
    pub fn redraw_received<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for (b, bs) in self.base_stations.iter().enumerate() {
            for (k, lb) in self.budgets[b].iter().enumerate() {
                self.received[b][k] = bs.tx_power * lb.sample_gain(rng);
            }
        }
    }

    pub fn budget(&self, b: usize, k: usize) -> &LinkBudget {
        &self.budgets[b][k]
    }

    pub fn received(&self) -> &[Vec<f64>] {
        &self.received
    }

    pub fn update_load_estimates(&mut self, t: u64, rate: &LoadLearningRate) {
        for bs in &mut self.base_stations {
            update_load_estimate(bs, t, rate);
        }
    }

    pub fn associate(&mut self) {
        let estimates: Vec<f64> = self.base_stations.iter().map(|b| b.load_estimate).collect();
        let assignment = associate_users(&self.received, &estimates);
        for (user, b) in self.users.iter_mut().zip(assignment) {
            user.serving_bs = Some(b);
            user.dropped = false;
        }
    }

    /// Rates, loads and capacity enforcement for the current association.
    pub fn serve(&mut self) -> Result<(), NetworkError> {
        let n_bs = self.base_stations.len();
        let mut fractions: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_bs];
        let mut column = vec![0.0; n_bs];
        for (k, user) in self.users.iter().enumerate() {
            let Some(b) = user.serving_bs else {
                self.user_rate[k] = 0.0;
                continue;
            };
            for (slot, row) in column.iter_mut().zip(&self.received) {
                *slot = row[k];
            }
            let gamma = channel::sinr(&column, b, self.noise);
            let rate = channel::achievable_rate(gamma, self.bandwidth);
            if rate <= 0.0 {
                return Err(NetworkError::ZeroRate { user: user.id, demand: user.demand });
            }
            self.user_rate[k] = rate;
            fractions[b].push((k, time_fraction(user.demand, rate)));
        }
        for (b, fr) in fractions.iter().enumerate() {
            let offered: f64 = fr.iter().map(|f| f.1).sum();
            let (dropped, residual) = enforce_capacity(fr);
            for &k in &dropped {
                self.users[k].dropped = true;
                self.user_rate[k] = 0.0;
            }
            let bs = &mut self.base_stations[b];
            bs.offered_load = offered;
            bs.load = residual.clamp(0.0, 1.0);
            self.dropped_per_bs[b] = dropped;
        }
        Ok(())
    }

    /// Rate currently delivered to user `k` (zero if dropped).
    pub fn user_rate(&self, k: usize) -> f64 {
        self.user_rate[k]
    }

    /// Sum of delivered Shannon rates over the non-dropped users of `b`.
    pub fn served_rate_sum(&self, b: usize) -> f64 {
        self.users
            .iter()
            .enumerate()
            .filter(|(_, u)| u.serving_bs == Some(b) && !u.dropped)
            .map(|(k, _)| self.user_rate[k])
            .sum()
    }

    pub fn dropped_users(&self, b: usize) -> &[usize] {
        &self.dropped_per_bs[b]
    }
}

/// KPIs of `state` after association and enforcement at timestep `t`.
/// Game-side fields are left at zero.
pub fn collect_metrics(state: &NetworkState, t: u64) -> MetricsRow {
    let n_bs = state.base_stations.len();
    let mut bs_throughput = vec![0.0; n_bs];
    let mut bs_associated = vec![0; n_bs];
    for user in &state.users {
        if let Some(b) = user.serving_bs {
            bs_associated[b] += 1;
            if !user.dropped {
                bs_throughput[b] += user.demand;
            }
        }
    }
    MetricsRow {
        t,
        bs_throughput,
        bs_load: state.base_stations.iter().map(|b| b.load).collect(),
        bs_associated,
        bs_dropped: (0..n_bs).map(|b| state.dropped_users(b).len()).collect(),
        user_rate: state.user_rate.clone(),
        satisfied_uavs: 0,
        mean_utility: 0.0,
    }
}
