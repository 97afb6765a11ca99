//! Air-to-ground and terrestrial propagation.
//!
//! Everything inside this module works in linear watts and linear gains;
//! dB values only appear in the inputs (reference losses, powers, noise
//! density) and in [`path_loss_db`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::geometry::Position3D;

/// Statistical built-up environment parameters of the LoS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentParams {
    /// Ratio of built-up land area to total land area.
    pub alpha: f64,
    /// Mean number of buildings per km².
    pub beta: f64,
    /// Building height scale in meters.
    pub gamma: f64,
}

impl Default for EnvironmentParams {
    /// Urban environment.
    fn default() -> Self {
        Self { alpha: 0.3, beta: 500.0, gamma: 15.0 }
    }
}

impl EnvironmentParams {
    pub fn is_valid(&self) -> bool {
        self.alpha > 0.0 && self.alpha <= 1.0 && self.beta > 0.0 && self.gamma > 0.0
    }
}

/// Probability that the link between a transmitter at `h_b` and a receiver
/// at `h_k`, separated horizontally by `r`, is line of sight.
///
/// Product over the buildings crossed by the ground projection of the
/// link; each factor is the probability that building `n` is lower than the
/// ray at its position. Zero buildings gives probability one.
pub fn los_probability(
    env: &EnvironmentParams,
    h_b: f64,
    h_k: f64,
    r: f64,
) -> Result<f64, ChannelError> {
    if h_b <= h_k {
        return Err(ChannelError::TransmitterNotElevated { h_b, h_k });
    }
    let last = (r * (env.alpha * env.beta).sqrt() / 1000.0 - 1.0).floor();
    if last < 0.0 {
        return Ok(1.0);
    }
    let two_gamma_sq = 2.0 * env.gamma * env.gamma;
    let dh = h_b - h_k;
    let mut p = 1.0;
    for n in 0..=(last as u64) {
        let n = n as f64;
        let ray = h_b - (n + 0.5) * dh / (n + 1.0);
        p *= 1.0 - (-(ray * ray) / two_gamma_sq).exp();
        if p == 0.0 {
            break;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Los,
    Nlos,
}

/// Path loss exponent, either fixed or affine in `log10` of the transmitter
/// altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentRule {
    Constant { value: f64 },
    LogAltitude { intercept: f64, slope: f64 },
}

impl ExponentRule {
    pub fn eval(&self, altitude: f64) -> f64 {
        match *self {
            ExponentRule::Constant { value } => value,
            ExponentRule::LogAltitude { intercept, slope } => intercept + slope * altitude.log10(),
        }
    }

    pub fn checked_eval(&self, altitude: f64) -> Result<f64, ChannelError> {
        let exponent = self.eval(altitude);
        if exponent > 1.0 && exponent <= 8.0 {
            Ok(exponent)
        } else {
            Err(ChannelError::ExponentOutOfRange { exponent, altitude })
        }
    }
}

/// Reference losses are expressed as `base + 20 log10(f_c / 1 GHz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioProfileSpec {
    pub ref_loss_los_base_db: f64,
    pub ref_loss_nlos_base_db: f64,
    pub exponent_los: ExponentRule,
    pub exponent_nlos: ExponentRule,
}

impl RadioProfileSpec {
    pub fn terrestrial() -> Self {
        Self {
            ref_loss_los_base_db: 28.0,
            ref_loss_nlos_base_db: 13.54,
            exponent_los: ExponentRule::Constant { value: 2.2 },
            exponent_nlos: ExponentRule::Constant { value: 3.9 },
        }
    }

    pub fn uav() -> Self {
        Self {
            ref_loss_los_base_db: 30.9,
            ref_loss_nlos_base_db: 32.4,
            exponent_los: ExponentRule::LogAltitude { intercept: 2.225, slope: -0.05 },
            exponent_nlos: ExponentRule::LogAltitude { intercept: 4.32, slope: -0.76 },
        }
    }

    pub fn at_frequency(&self, carrier_hz: f64) -> RadioProfile {
        let f_term = 20.0 * (carrier_hz / 1e9).log10();
        RadioProfile {
            ref_loss_los_db: self.ref_loss_los_base_db + f_term,
            ref_loss_nlos_db: self.ref_loss_nlos_base_db + f_term,
            exponent_los: self.exponent_los,
            exponent_nlos: self.exponent_nlos,
        }
    }
}

/// Reference losses (already including the carrier frequency) and exponent
/// rules for one kind of base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioProfile {
    pub ref_loss_los_db: f64,
    pub ref_loss_nlos_db: f64,
    pub exponent_los: ExponentRule,
    pub exponent_nlos: ExponentRule,
}

impl RadioProfile {
    pub fn terrestrial(carrier_hz: f64) -> Self {
        RadioProfileSpec::terrestrial().at_frequency(carrier_hz)
    }

    pub fn uav(carrier_hz: f64) -> Self {
        RadioProfileSpec::uav().at_frequency(carrier_hz)
    }

    fn parts(&self, condition: Condition) -> (f64, &ExponentRule) {
        match condition {
            Condition::Los => (self.ref_loss_los_db, &self.exponent_los),
            Condition::Nlos => (self.ref_loss_nlos_db, &self.exponent_nlos),
        }
    }
}

/// `A + 10 δ(h_b) log10(d)` in dB.
pub fn path_loss_db(
    profile: &RadioProfile,
    condition: Condition,
    d: f64,
    h_b: f64,
) -> Result<f64, ChannelError> {
    if !(d > 0.0) {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    let (reference, rule) = profile.parts(condition);
    let exponent = rule.checked_eval(h_b)?;
    Ok(reference + 10.0 * exponent * d.log10())
}

/// Per-link propagation summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub pr_los: f64,
    pub loss_los_db: f64,
    pub loss_nlos_db: f64,
    /// LoS/NLoS mixture of the linear channel gains.
    pub expected_gain: f64,
}

impl LinkBudget {
    pub fn from_parts(pr_los: f64, loss_los_db: f64, loss_nlos_db: f64) -> Self {
        let expected_gain =
            pr_los * db_to_linear(-loss_los_db) + (1.0 - pr_los) * db_to_linear(-loss_nlos_db);
        Self { pr_los, loss_los_db, loss_nlos_db, expected_gain }
    }

    pub fn gain(&self, condition: Condition) -> f64 {
        match condition {
            Condition::Los => db_to_linear(-self.loss_los_db),
            Condition::Nlos => db_to_linear(-self.loss_nlos_db),
        }
    }

    /// Draws a LoS/NLoS realization and returns its linear gain.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let los = rng.gen::<f64>() < self.pr_los;
        self.gain(if los { Condition::Los } else { Condition::Nlos })
    }
}

/// Link budget between a base station at `bs` and a user at `user`.
pub fn link_budget(
    env: &EnvironmentParams,
    profile: &RadioProfile,
    bs: &Position3D,
    user: &Position3D,
) -> Result<LinkBudget, ChannelError> {
    let r = bs.horizontal_distance(user);
    let d = bs.distance(user);
    let pr_los = los_probability(env, bs.h, user.h, r)?;
    let loss_los = path_loss_db(profile, Condition::Los, d, bs.h)?;
    let loss_nlos = path_loss_db(profile, Condition::Nlos, d, bs.h)?;
    Ok(LinkBudget::from_parts(pr_los, loss_los, loss_nlos))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Thermal noise power in watts over `bandwidth_hz` for a density in dBm/Hz.
pub fn noise_power(bandwidth_hz: f64, psd_dbm_per_hz: f64) -> f64 {
    dbm_to_watts(psd_dbm_per_hz + linear_to_db(bandwidth_hz))
}

/// SINR at a user given the received power (watts) from every base station
/// and the index of the serving one.
pub fn sinr(received: &[f64], serving: usize, sigma2: f64) -> f64 {
    let interference: f64 = received
        .iter()
        .enumerate()
        .filter(|&(b, _)| b != serving)
        .map(|(_, p)| p)
        .sum();
    received[serving] / (interference + sigma2)
}

/// Shannon rate in bit/s.
pub fn achievable_rate(sinr: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FC: f64 = 2e9;

    fn urban() -> EnvironmentParams {
        EnvironmentParams::default()
    }

    #[test]
    fn los_examples() {
        assert_eq!(los_probability(&urban(), 100.0, 1.5, 0.0).unwrap(), 1.0);
        let single = los_probability(&urban(), 100.0, 1.5, 100.0).unwrap();
        let by_hand = 1.0 - (-(50.75f64 * 50.75) / 450.0).exp();
        assert!((single - by_hand).abs() < 1e-15);
        assert!((single - 0.996731657234963).abs() < 1e-6);
        // Frozen from an arbitrary-precision evaluation of the product.
        let twelve = los_probability(&urban(), 100.0, 1.5, 1000.0).unwrap();
        let oracle = 5.43806700065062e-9;
        assert!(((twelve - oracle) / oracle).abs() < 1e-9, "{twelve}");
        let terrestrial = los_probability(&urban(), 25.0, 1.5, 300.0).unwrap();
        assert!((terrestrial - 0.002321414390067808).abs() < 1e-12);
    }

    #[test]
    fn los_rejects_ground_transmitter() {
        assert!(los_probability(&urban(), 1.5, 1.5, 10.0).is_err());
        assert!(los_probability(&urban(), 1.0, 1.5, 10.0).is_err());
    }

    #[test]
    fn path_loss_examples() {
        let uav = RadioProfile::uav(FC);
        assert!((uav.ref_loss_los_db - 36.9206).abs() < 1e-4);
        let l = path_loss_db(&uav, Condition::Los, 100.0, 100.0).unwrap();
        assert!((l - 79.42059991327962).abs() < 1e-9);

        let ter = RadioProfile::terrestrial(FC);
        let l = path_loss_db(&ter, Condition::Los, 200.0, 25.0).unwrap();
        assert!((l - 84.64325981788721).abs() < 1e-9);

        assert_eq!(path_loss_db(&ter, Condition::Nlos, 1.0, 25.0).unwrap(), ter.ref_loss_nlos_db);
        assert!(path_loss_db(&ter, Condition::Los, 0.0, 25.0).is_err());
    }

    #[test]
    fn exponent_range_check() {
        let rule = ExponentRule::Constant { value: 0.5 };
        assert!(rule.checked_eval(10.0).is_err());
        let uav = RadioProfileSpec::uav();
        for h in [22.5, 100.0, 300.0] {
            assert!(uav.exponent_los.checked_eval(h).is_ok());
            assert!(uav.exponent_nlos.checked_eval(h).is_ok());
        }
    }

    #[test]
    fn link_budget_mixture() {
        let lb = LinkBudget::from_parts(1.0, 80.0, 100.0);
        assert_eq!(lb.expected_gain, db_to_linear(-80.0));
        let lb = LinkBudget::from_parts(0.5, 80.0, 100.0);
        assert!((lb.expected_gain - 5.05e-9).abs() < 1e-21);

        let bs = Position3D::new(0.0, 0.0, 25.0);
        let user = Position3D::new(0.0, 0.0, 1.5);
        let lb = link_budget(&urban(), &RadioProfile::terrestrial(FC), &bs, &user).unwrap();
        assert_eq!(lb.pr_los, 1.0);
        assert!(lb.expected_gain > 0.0 && lb.expected_gain <= 1.0);
    }

    #[test]
    fn noise_examples() {
        let n = noise_power(10e6, -174.0);
        assert!((watts_to_dbm(n) + 104.0).abs() < 1e-9);
        assert!((n - 3.981e-14).abs() < 1e-17);
        assert!((watts_to_dbm(noise_power(1.0, -174.0)) + 174.0).abs() < 1e-9);
        let diff = watts_to_dbm(noise_power(20e6, -174.0)) - watts_to_dbm(noise_power(10e6, -174.0));
        assert!((diff - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn sinr_examples() {
        let sigma2 = dbm_to_watts(-104.0);
        let rx = dbm_to_watts(24.0 - 79.4206);
        let s = sinr(&[rx], 0, sigma2);
        assert!((linear_to_db(s) - 48.5794).abs() < 1e-9);

        let s = sinr(&[1e-9, 1e-9], 0, 1e-30);
        assert!((s - 1.0).abs() < 1e-12);

        let alone = sinr(&[rx], 0, sigma2);
        let with_interferer = sinr(&[rx, rx * 1e-3], 0, sigma2);
        assert!(with_interferer < alone);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(achievable_rate(1.0, 10e6), 10e6);
        assert_eq!(achievable_rate(0.0, 10e6), 0.0);
        assert_eq!(achievable_rate(3.0, 10e6), 20e6);
    }
}
