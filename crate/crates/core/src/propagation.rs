//! SINR computation, correlated log-normal shadowing, random frequency-band
//! assignment, and hearability extraction for devices in one sampled
//! network realization.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::pointprocess::{quantile_radius, sample_ppp, PointSet, PppConfig};
use crate::rng::trial_rng;
use crate::Result;

/// All physical parameters of one experiment point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NetworkScenario {
    /// Base station density (per unit area).
    pub bs_density: f64,
    /// Mobile device density (per unit area).
    pub md_density: f64,
    /// Path loss exponent, must exceed 2 for finite interference.
    pub pathloss_exponent: f64,
    /// Detection threshold, linear ratio.
    pub sinr_threshold: f64,
    /// Transmit power.
    pub tx_power: f64,
    /// Receiver noise power. The default configuration is
    /// interference-limited (zero noise), which makes results scale-free in
    /// the base station density.
    pub noise_power: f64,
    /// Log-normal shadowing standard deviation in dB; zero disables
    /// shadowing entirely.
    pub shadowing_sigma_db: f64,
    /// Correlation of the dB shadowing gains observed at two devices from
    /// the same base station, in [0, 1].
    pub shadowing_correlation: f64,
    /// Number of frequency bands; each base station transmits on one
    /// uniformly random band and interference acts per band.
    pub reuse_factor: u32,
    /// Minimum anchor support of the positioning method: 2 for ranging,
    /// 3 for range differences.
    pub ell: u32,
    /// Distance clamp guarding against a device coinciding with a base
    /// station; 0 selects the default `1e-9 / sqrt(bs_density)`.
    pub min_distance: f64,
}

impl Default for NetworkScenario {
    /// Reference cellular configuration: density of a 500 m intersite
    /// hexagonal layout, 10 devices per cell, pathloss exponent 4,
    /// -12 dB threshold, interference-limited, range differences.
    fn default() -> Self {
        let lambda0 = 2.0 / (3.0f64.sqrt() * 500.0 * 500.0);
        NetworkScenario {
            bs_density: lambda0,
            md_density: 10.0 * lambda0,
            pathloss_exponent: 4.0,
            sinr_threshold: beta_from_db(-12.0),
            tx_power: 1.0,
            noise_power: 0.0,
            shadowing_sigma_db: 0.0,
            shadowing_correlation: 0.5,
            reuse_factor: 1,
            ell: 3,
            min_distance: 0.0,
        }
    }
}

impl NetworkScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.bs_density > 0.0 && self.bs_density.is_finite()) {
            return Err(Error::config(format!("bs_density must be positive, got {}", self.bs_density)));
        }
        if !(self.md_density > 0.0 && self.md_density.is_finite()) {
            return Err(Error::config(format!("md_density must be positive, got {}", self.md_density)));
        }
        if !(self.pathloss_exponent > 2.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::config(format!(
                "pathloss exponent must exceed 2, got {}",
                self.pathloss_exponent
            )));
        }
        if !(self.sinr_threshold > 0.0 && self.sinr_threshold.is_finite()) {
            return Err(Error::config(format!(
                "sinr threshold must be positive, got {}",
                self.sinr_threshold
            )));
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return Err(Error::config(format!("tx power must be positive, got {}", self.tx_power)));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::config(format!(
                "noise power must be non-negative, got {}",
                self.noise_power
            )));
        }
        if !(self.shadowing_sigma_db >= 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(Error::config(format!(
                "shadowing sigma must be non-negative, got {}",
                self.shadowing_sigma_db
            )));
        }
        if !(0.0..=1.0).contains(&self.shadowing_correlation) {
            return Err(Error::config(format!(
                "shadowing correlation must be in [0, 1], got {}",
                self.shadowing_correlation
            )));
        }
        if self.reuse_factor == 0 {
            return Err(Error::config("reuse factor must be at least 1".to_string()));
        }
        if self.ell == 0 {
            return Err(Error::config("ell must be at least 1".to_string()));
        }
        if !(self.min_distance >= 0.0 && self.min_distance.is_finite()) {
            return Err(Error::config(format!(
                "min distance must be non-negative, got {}",
                self.min_distance
            )));
        }
        Ok(())
    }

    /// Effective distance clamp.
    pub fn distance_clamp(&self) -> f64 {
        if self.min_distance > 0.0 {
            self.min_distance
        } else {
            1e-9 / self.bs_density.sqrt()
        }
    }

    pub fn sinr_threshold_db(&self) -> f64 {
        10.0 * self.sinr_threshold.log10()
    }
}

/// dB-to-linear conversion for SINR thresholds.
pub fn beta_from_db(db: f64) -> f64 {
    10.0f64.powf(db / 10.0)
}

/// Radius beyond which the expected interference power of excluded base
/// stations is below 0.1% of the expected in-window interference (measured
/// from the median nearest-station distance outward) for the given pathloss
/// exponent.
pub fn interference_guard_radius(density: f64, alpha: f64) -> f64 {
    let median_nn = (LN_2 / (PI * density)).sqrt();
    let eps = 1e-3_f64;
    median_nn * ((1.0 + eps) / eps).powf(1.0 / (alpha - 2.0))
}

/// Window radius around a single device that covers both the
/// `ell + 5`-th ordered distance tail (at mass 1e-9) and the interference
/// guard, for the per-band density.
pub fn base_window_radius(scen: &NetworkScenario) -> Result<f64> {
    scen.validate()?;
    let per_band = scen.bs_density / f64::from(scen.reuse_factor);
    let tail_radius = quantile_radius(scen.ell + 5, per_band, 1e-9);
    let guard = interference_guard_radius(per_band, scen.pathloss_exponent);
    Ok(tail_radius.max(guard))
}

/// Simulation window for two devices separated by `device_separation`:
/// centered between them, [`base_window_radius`] plus half the separation.
pub fn simulation_window(scen: &NetworkScenario, device_separation: f64) -> Result<PppConfig> {
    if !(device_separation >= 0.0 && device_separation.is_finite()) {
        return Err(Error::config(format!("device separation must be non-negative, got {device_separation}")));
    }
    let radius = base_window_radius(scen)? + device_separation / 2.0;
    PppConfig::new(scen.bs_density, radius, [device_separation / 2.0, 0.0])
}

/// One sampled world: base station locations, band labels, shadowing fields
/// and device positions. Immutable once constructed.
///
/// The dB shadowing gain from base station `g` to device `h` is
/// `sigma_s * (sqrt(rho) * shadow_common[g] + sqrt(1 - rho) * shadow_private[h][g])`,
/// which gives dB-gain correlation exactly `rho` between two devices
/// observing the same station. Shadowing across distinct stations is
/// independent. The shadow vectors are left empty when shadowing is
/// disabled.
#[derive(Debug, Clone)]
pub struct Realization {
    pub bs: PointSet,
    pub band_labels: Vec<u16>,
    pub shadow_common: Vec<f64>,
    pub shadow_private: Vec<Vec<f64>>,
    pub device_positions: Vec<[f64; 2]>,
}

impl Realization {
    /// Samples a realization with device `u` at the origin and `v` at
    /// `(device_separation, 0)`, using the default simulation window.
    pub fn generate(scen: &NetworkScenario, device_separation: f64, seed: u64) -> Result<Realization> {
        let window = simulation_window(scen, device_separation)?;
        let mut rng = trial_rng(seed, 0);
        Self::generate_in_window(scen, device_separation, &window, &mut rng)
    }

    /// Sampling body on an explicit window and stream; used by the Monte
    /// Carlo drivers which manage per-trial streams themselves.
    pub fn generate_in_window<R: Rng>(
        scen: &NetworkScenario,
        device_separation: f64,
        window: &PppConfig,
        rng: &mut R,
    ) -> Result<Realization> {
        let point_seed: u64 = rng.gen();
        let bs = sample_ppp(window, point_seed)?;
        let n = bs.points.len();
        let band_labels = if scen.reuse_factor > 1 {
            (0..n).map(|_| rng.gen_range(0..scen.reuse_factor) as u16).collect()
        } else {
            vec![0; n]
        };
        let (shadow_common, shadow_private) = if scen.shadowing_sigma_db > 0.0 {
            let common = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let private = (0..2)
                .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
                .collect();
            (common, private)
        } else {
            (Vec::new(), vec![Vec::new(), Vec::new()])
        };
        Ok(Realization {
            bs,
            band_labels,
            shadow_common,
            shadow_private,
            device_positions: vec![[0.0, 0.0], [device_separation, 0.0]],
        })
    }

    pub fn bs_count(&self) -> usize {
        self.bs.points.len()
    }

    /// Linear shadowing gain from base station `bs` to device `device`.
    pub fn shadow_gain(&self, scen: &NetworkScenario, bs: usize, device: usize) -> f64 {
        if scen.shadowing_sigma_db == 0.0 {
            return 1.0;
        }
        let rho = scen.shadowing_correlation;
        let z = rho.sqrt() * self.shadow_common[bs] + (1.0 - rho).sqrt() * self.shadow_private[device][bs];
        let db = scen.shadowing_sigma_db * z;
        (db * std::f64::consts::LN_10 / 10.0).exp()
    }
}

/// Per-device hearability summary: hearable-station count, the `ell`
/// strongest stations (by decreasing SINR, ties broken by lower index), and
/// the full SINR ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct HearabilityProfile {
    pub device_id: usize,
    pub hearable_count: usize,
    pub strongest_set: Vec<usize>,
    /// `(bs index, linear SINR)` sorted by decreasing SINR.
    pub per_bs_sinr: Vec<(usize, f64)>,
}

/// All per-station SINRs at one device, sorted by decreasing SINR with ties
/// broken by station index. With several bands, each station's SINR counts
/// interference from its own band only.
pub fn device_sinrs(real: &Realization, scen: &NetworkScenario, device: usize) -> Vec<(usize, f64)> {
    device_sinrs_impl(real, scen, device, scen.reuse_factor > 1)
}

/// Per-station SINRs with band labels ignored: every station interferes
/// with every other. Used for paired comparisons of a reuse scenario with
/// its universal-reuse counterpart on the same realization.
pub fn device_sinrs_universal(real: &Realization, scen: &NetworkScenario, device: usize) -> Vec<(usize, f64)> {
    device_sinrs_impl(real, scen, device, false)
}

fn device_sinrs_impl(
    real: &Realization,
    scen: &NetworkScenario,
    device: usize,
    per_band: bool,
) -> Vec<(usize, f64)> {
    let values = device_sinr_values(real, scen, device, per_band);
    let mut sinrs: Vec<(usize, f64)> = values.into_iter().enumerate().collect();
    sinrs.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    sinrs
}

/// Received powers of all stations at one device, plus the per-band totals.
fn received_powers(real: &Realization, scen: &NetworkScenario, device: usize) -> (Vec<f64>, Vec<f64>) {
    let pos = real.device_positions[device];
    let n = real.bs_count();
    let clamp2 = scen.distance_clamp() * scen.distance_clamp();
    let alpha_half = scen.pathloss_exponent / 2.0;
    let fast_alpha4 = scen.pathloss_exponent == 4.0;

    let shadowed = scen.shadowing_sigma_db > 0.0;
    let ln_scale = scen.shadowing_sigma_db * std::f64::consts::LN_10 / 10.0;
    let w_common = scen.shadowing_correlation.sqrt();
    let w_private = (1.0 - scen.shadowing_correlation).sqrt();

    let mut received = Vec::with_capacity(n);
    let mut band_total = vec![0.0f64; scen.reuse_factor as usize];
    for (i, p) in real.bs.points.iter().enumerate() {
        let dx = p[0] - pos[0];
        let dy = p[1] - pos[1];
        let r2 = (dx * dx + dy * dy).max(clamp2);
        let pathloss = if fast_alpha4 { 1.0 / (r2 * r2) } else { r2.powf(-alpha_half) };
        let gain = if shadowed {
            (ln_scale * (w_common * real.shadow_common[i] + w_private * real.shadow_private[device][i])).exp()
        } else {
            1.0
        };
        let power = scen.tx_power * gain * pathloss;
        received.push(power);
        band_total[real.band_labels[i] as usize] += power;
    }
    (received, band_total)
}

/// Per-station SINRs of one device under both interference models at once:
/// per-band (the scenario's reuse factor) and universal (every station
/// interferes). Shares the received-power pass between the two views.
pub(crate) fn device_sinr_values_paired(
    real: &Realization,
    scen: &NetworkScenario,
    device: usize,
) -> (Vec<f64>, Vec<f64>) {
    let (received, band_total) = received_powers(real, scen, device);
    let grand_total: f64 = band_total.iter().sum();
    let reuse = received
        .iter()
        .enumerate()
        .map(|(i, &s)| s / (band_total[real.band_labels[i] as usize] - s + scen.noise_power))
        .collect();
    let universal = received.iter().map(|&s| s / (grand_total - s + scen.noise_power)).collect();
    (reuse, universal)
}

/// Per-station SINRs in station-index order (unsorted). Hot path for the
/// Monte Carlo drivers, which only need threshold counts and small
/// selections rather than a full ranking.
pub(crate) fn device_sinr_values(
    real: &Realization,
    scen: &NetworkScenario,
    device: usize,
    per_band: bool,
) -> Vec<f64> {
    let (mut received, band_total) = received_powers(real, scen, device);
    let grand_total: f64 = band_total.iter().sum();
    for (i, s) in received.iter_mut().enumerate() {
        let interference =
            if per_band { band_total[real.band_labels[i] as usize] - *s } else { grand_total - *s };
        *s /= interference + scen.noise_power;
    }
    received
}

/// SINR of the link from one base station to one device (by index into the
/// realization's device list).
pub fn sinr(bs: usize, device: usize, real: &Realization, scen: &NetworkScenario) -> f64 {
    let pos = real.device_positions[device];
    let clamp2 = scen.distance_clamp() * scen.distance_clamp();
    let alpha_half = scen.pathloss_exponent / 2.0;
    let power = |i: usize| {
        let p = real.bs.points[i];
        let dx = p[0] - pos[0];
        let dy = p[1] - pos[1];
        let r2 = (dx * dx + dy * dy).max(clamp2);
        scen.tx_power * real.shadow_gain(scen, i, device) * r2.powf(-alpha_half)
    };
    let band = real.band_labels[bs];
    let signal = power(bs);
    let interference: f64 = (0..real.bs_count())
        .filter(|&i| i != bs && real.band_labels[i] == band)
        .map(power)
        .sum();
    signal / (interference + scen.noise_power)
}

/// Hearability profile of one device: stations at or above the threshold
/// count as hearable (summed over bands when several are in use).
pub fn hearability_profile(device: usize, real: &Realization, scen: &NetworkScenario) -> HearabilityProfile {
    let sinrs = device_sinrs(real, scen, device);
    let hearable_count = sinrs.partition_point(|&(_, s)| s >= scen.sinr_threshold);
    let strongest_set: Vec<usize> =
        sinrs.iter().take(scen.ell as usize).map(|&(i, _)| i).collect();
    HearabilityProfile { device_id: device, hearable_count, strongest_set, per_bs_sinr: sinrs }
}

/// Generates one shared realization with `u` at the origin and `v` a
/// distance `d` away and returns both devices' profiles. The devices see
/// the same stations and band labels; their shadowing is correlated per the
/// realization's common/private decomposition.
pub fn joint_profiles(
    d: f64,
    real_seed: u64,
    scen: &NetworkScenario,
) -> Result<(HearabilityProfile, HearabilityProfile)> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::domain(format!("separation must be non-negative, got {d}")));
    }
    let real = Realization::generate(scen, d, real_seed)?;
    Ok((hearability_profile(0, &real, scen), hearability_profile(1, &real, scen)))
}
