//! Experiment configuration.
//!
//! Read from a TOML file whose sections mirror [`SimConfig`]; every field
//! has a default, so an empty file is a valid configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{EnvironmentParams, RadioProfileSpec};
use crate::error::ConfigError;
use crate::game::{GameWeights, PolicyLearningRate, ThresholdAdaptation};
use crate::geometry::{AltitudeBounds, HexRegion, Position3D, StepSizes};
use crate::network::{ChannelMode, LoadLearningRate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Learning,
    Strategic,
    RandomFixed,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Learning,
        Algorithm::Strategic,
        Algorithm::RandomFixed,
        Algorithm::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Learning => "learning",
            Algorithm::Strategic => "strategic",
            Algorithm::RandomFixed => "random_fixed",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "learning" => Ok(Algorithm::Learning),
            "strategic" => Ok(Algorithm::Strategic),
            "random_fixed" | "random_fixed_altitude" => Ok(Algorithm::RandomFixed),
            "random" => Ok(Algorithm::Random),
            other => Err(ConfigError::Invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub region_radius: f64,
    pub n_users: usize,
    pub n_uavs: usize,
    pub user_altitude: f64,
    pub terrestrial_altitude: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            region_radius: 250.0,
            n_users: 210,
            n_uavs: 8,
            user_altitude: 1.5,
            terrestrial_altitude: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Number of timesteps.
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub channel_mode: ChannelMode,
    /// Trailing fraction of the horizon averaged into the run summary.
    pub summary_tail: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Learning,
            steps: 2000,
            seeds: (1..=20).collect(),
            channel_mode: ChannelMode::Expected,
            summary_tail: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    /// Per-user traffic influx rate, bit/s.
    pub demand_bps: f64,
    pub terrestrial_tx_dbm: f64,
    pub uav_tx_dbm: f64,
    pub load_estimate: LoadLearningRate,
    pub terrestrial: RadioProfileSpec,
    pub uav: RadioProfileSpec,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: 2e9,
            bandwidth_hz: 10e6,
            noise_psd_dbm_hz: -174.0,
            demand_bps: 1.8e6,
            terrestrial_tx_dbm: 46.0,
            uav_tx_dbm: 24.0,
            load_estimate: LoadLearningRate::default(),
            terrestrial: RadioProfileSpec::terrestrial(),
            uav: RadioProfileSpec::uav(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub phi: f64,
    pub varphi: f64,
    /// Rate-sum normalizer in bit/s; defaults to total offered demand.
    pub norm: Option<f64>,
    /// Defaults to `phi`.
    pub f_max: Option<f64>,
    pub d_min: f64,
    pub learning_rate: PolicyLearningRate,
    /// Initial satisfaction threshold; defaults to `threshold_fraction * f_max`.
    pub threshold: Option<f64>,
    pub threshold_fraction: f64,
    pub adapt_window: u32,
    pub adapt_decay: f64,
    /// Lowest threshold adaptation may reach; defaults to
    /// `floor_fraction * f_max`.
    pub threshold_floor: Option<f64>,
    pub floor_fraction: f64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            phi: 1.0,
            varphi: 1.0,
            norm: None,
            f_max: None,
            d_min: 10.0,
            learning_rate: PolicyLearningRate::default(),
            threshold: None,
            threshold_fraction: 0.5,
            adapt_window: 100,
            adapt_decay: 0.9,
            threshold_floor: None,
            floor_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub step_xy: f64,
    pub step_h: f64,
    /// Fixed starting positions for the learning UAVs; random when absent.
    pub initial_positions: Option<Vec<Position3D>>,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        let steps = StepSizes::default();
        Self {
            h_min: 22.5,
            h_max: 300.0,
            step_xy: steps.xy,
            step_h: steps.h,
            initial_positions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub horizontal_candidates: usize,
    pub altitude_levels: usize,
    pub fixed_altitude: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { horizontal_candidates: 79, altitude_levels: 28, fixed_altitude: 100.0 }
    }
}

/// Complete, self-describing experiment parameterization.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub run: RunConfig,
    pub radio: RadioConfig,
    pub environment: EnvironmentParams,
    pub game: GameConfig,
    pub mobility: MobilityConfig,
    pub baselines: BaselineConfig,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("SimConfig always serializes")
    }

    pub fn region(&self) -> Result<HexRegion, ConfigError> {
        Ok(HexRegion::centered(self.scenario.region_radius)?)
    }

    pub fn altitude_bounds(&self) -> Result<AltitudeBounds, ConfigError> {
        Ok(AltitudeBounds::new(self.mobility.h_min, self.mobility.h_max)?)
    }

    pub fn step_sizes(&self) -> StepSizes {
        StepSizes { xy: self.mobility.step_xy, h: self.mobility.step_h }
    }

    pub fn f_max(&self) -> f64 {
        self.game.f_max.unwrap_or(self.game.phi)
    }

    pub fn game_weights(&self) -> GameWeights {
        let total_demand = self.scenario.n_users as f64 * self.radio.demand_bps;
        let norm = self.game.norm.unwrap_or(if total_demand > 0.0 {
            total_demand
        } else {
            self.radio.demand_bps
        });
        GameWeights {
            phi: self.game.phi,
            varphi: self.game.varphi,
            norm,
            f_max: self.f_max(),
            d_min: self.game.d_min,
        }
    }

    pub fn initial_threshold(&self) -> f64 {
        self.game.threshold.unwrap_or(self.game.threshold_fraction * self.f_max())
    }

    pub fn threshold_adaptation(&self) -> ThresholdAdaptation {
        ThresholdAdaptation {
            window: self.game.adapt_window,
            decay: self.game.adapt_decay,
            floor: self
                .game
                .threshold_floor
                .unwrap_or(self.game.floor_fraction * self.f_max()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        let region = self.region()?;
        let bounds = self.altitude_bounds()?;
        if !(s.user_altitude >= 0.0 && s.user_altitude < s.terrestrial_altitude) {
            return Err(invalid("user altitude must be non-negative and below the terrestrial BS"));
        }
        if s.user_altitude >= bounds.h_min {
            return Err(invalid("users must be below the lowest UAV altitude"));
        }
        let r = &self.run;
        if r.steps < 1 {
            return Err(invalid("steps must be at least 1"));
        }
        if r.seeds.is_empty() {
            return Err(invalid("at least one seed is required"));
        }
        if !(r.summary_tail > 0.0 && r.summary_tail <= 1.0) {
            return Err(invalid("summary_tail must lie in (0, 1]"));
        }
        let radio = &self.radio;
        for (name, v) in [
            ("carrier_frequency_hz", radio.carrier_frequency_hz),
            ("bandwidth_hz", radio.bandwidth_hz),
            ("demand_bps", radio.demand_bps),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive")));
            }
        }
        if !(radio.load_estimate.exponent >= 0.0) {
            return Err(invalid("load estimate exponent must be non-negative"));
        }
        if !self.environment.is_valid() {
            return Err(invalid("environment requires alpha in (0, 1], beta > 0, gamma > 0"));
        }
        for (kind, spec, altitudes) in [
            ("terrestrial", &radio.terrestrial, vec![s.terrestrial_altitude]),
            ("uav", &radio.uav, vec![bounds.h_min, bounds.h_max]),
        ] {
            for h in altitudes {
                for rule in [spec.exponent_los, spec.exponent_nlos] {
                    rule.checked_eval(h)
                        .map_err(|e| invalid(format!("{kind} radio profile: {e}")))?;
                }
            }
        }
        let g = &self.game;
        let w = self.game_weights();
        if !(w.phi > 0.0 && w.varphi >= 0.0 && w.norm > 0.0 && w.f_max > 0.0 && w.d_min >= 0.0) {
            return Err(invalid("game weights require phi > 0, varphi >= 0, norm > 0, f_max > 0"));
        }
        let mu = match g.learning_rate {
            PolicyLearningRate::Constant { value } => value,
            PolicyLearningRate::Decaying { value, exponent } => {
                if exponent < 0.0 {
                    return Err(invalid("learning rate exponent must be non-negative"));
                }
                value
            }
        };
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid("policy learning rate must lie in [0, 1]"));
        }
        if !(g.adapt_decay > 0.0 && g.adapt_decay < 1.0) {
            return Err(invalid("adapt_decay must lie in (0, 1)"));
        }
        if g.adapt_window == 0 {
            return Err(invalid("adapt_window must be at least 1"));
        }
        let m = &self.mobility;
        if !(m.step_xy > 0.0 && m.step_h > 0.0) {
            return Err(invalid("step sizes must be positive"));
        }
        if let Some(init) = &m.initial_positions {
            if init.len() != s.n_uavs {
                return Err(invalid(format!(
                    "{} initial positions given for {} UAVs",
                    init.len(),
                    s.n_uavs
                )));
            }
            if let Some(p) = init.iter().find(|p| !region.contains(p) || !bounds.contains(p.h)) {
                return Err(invalid(format!("initial position {p:?} is infeasible")));
            }
        }
        let b = &self.baselines;
        if b.horizontal_candidates == 0 || b.altitude_levels == 0 {
            return Err(invalid("baseline candidate counts must be positive"));
        }
        if !bounds.contains(b.fixed_altitude) {
            return Err(invalid("baseline fixed altitude is outside the altitude bounds"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.scenario.region_radius, 250.0);
        assert_eq!(cfg.radio.demand_bps, 1.8e6);
        assert_eq!(cfg.radio.load_estimate.exponent, 0.9);
        assert_eq!(cfg.game.d_min, 10.0);
        assert_eq!(cfg.mobility.h_min, 22.5);
        assert_eq!(cfg.mobility.h_max, 300.0);
        let w = cfg.game_weights();
        assert!((w.norm - 210.0 * 1.8e6).abs() < 1e-3);
        assert_eq!(w.f_max, 1.0);
        assert_eq!(cfg.initial_threshold(), 0.5);
        assert_eq!(cfg.threshold_adaptation().floor, 0.05);
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(SimConfig::from_toml_str("").unwrap(), SimConfig::default());
    }

    #[test]
    fn partial_file_overrides() {
        let cfg = SimConfig::from_toml_str(
            "[scenario]\nn_users = 30\n[run]\nalgorithm = \"random_fixed\"\nseeds = [7]\n\
             [game.learning_rate]\nkind = \"decaying\"\nvalue = 0.5\nexponent = 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario.n_users, 30);
        assert_eq!(cfg.scenario.n_uavs, 8);
        assert_eq!(cfg.run.algorithm, Algorithm::RandomFixed);
        assert_eq!(cfg.run.seeds, vec![7]);
        assert_eq!(cfg.game.learning_rate, PolicyLearningRate::Decaying { value: 0.5, exponent: 0.5 });
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = SimConfig::default();
        cfg.game.norm = Some(1e8);
        cfg.mobility.initial_positions = Some(vec![Position3D::new(0.0, 0.0, 100.0); 8]);
        let back = SimConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SimConfig::from_toml_str("[run]\nsteps = 0").is_err());
        assert!(SimConfig::from_toml_str("[run]\nseeds = []").is_err());
        assert!(SimConfig::from_toml_str("[scenario]\nregion_radius = -1.0").is_err());
        assert!(SimConfig::from_toml_str("[game]\nadapt_decay = 1.5").is_err());
        assert!(SimConfig::from_toml_str("[mobility]\nh_min = 400.0").is_err());
        assert!(SimConfig::from_toml_str("[bogus]\nx = 1").is_err());
        assert!(SimConfig::from_toml_str("[environment]\nalpha = 2.0").is_err());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("random-fixed".parse::<Algorithm>().unwrap(), Algorithm::RandomFixed);
        assert!("greedy".parse::<Algorithm>().is_err());
    }
}
