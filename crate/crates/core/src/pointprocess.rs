//! Homogeneous Poisson point process sampling on disk windows, plus the
//! ordered-distance densities that parameterize the analytic integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::Error;
use crate::rng::trial_rng;
use crate::Result;

/// Guard on the expected point count of one realization.
pub const MAX_EXPECTED_POINTS: f64 = 1e8;

/// A disk sampling window with a target point density.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PppConfig {
    /// Points per unit area.
    pub density: f64,
    /// Disk radius.
    pub window_radius: f64,
    /// Disk center.
    pub center: [f64; 2],
}

impl PppConfig {
    pub fn new(density: f64, window_radius: f64, center: [f64; 2]) -> Result<Self> {
        let cfg = PppConfig { density, window_radius, center };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::config(format!("density must be positive and finite, got {}", self.density)));
        }
        if !(self.window_radius.is_finite() && self.window_radius > 0.0) {
            return Err(Error::config(format!(
                "window radius must be positive and finite, got {}",
                self.window_radius
            )));
        }
        if !(self.center[0].is_finite() && self.center[1].is_finite()) {
            return Err(Error::config("window center must be finite".to_string()));
        }
        let expected = self.expected_count();
        if !(expected <= MAX_EXPECTED_POINTS) {
            return Err(Error::config(format!(
                "expected point count {expected:.3e} exceeds the {MAX_EXPECTED_POINTS:.0e} guard"
            )));
        }
        Ok(())
    }

    pub fn expected_count(&self) -> f64 {
        self.density * PI * self.window_radius * self.window_radius
    }
}

/// One sampled realization of the process inside its window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<[f64; 2]>,
    pub generating_seed: u64,
    pub window: PppConfig,
}

/// Samples a homogeneous PPP on the disk window. Deterministic in
/// `(cfg, seed)`: the point count is Poisson with mean `density * area` and,
/// conditioned on the count, points are i.i.d. uniform on the disk.
pub fn sample_ppp(cfg: &PppConfig, seed: u64) -> Result<PointSet> {
    cfg.validate()?;
    let mut rng = trial_rng(seed, 0);
    Ok(sample_ppp_with_rng(cfg, seed, &mut rng))
}

/// Sampling body, reusable by callers that manage their own stream (e.g. a
/// network realization drawing several dependent fields from one trial
/// stream). The config must already be validated.
pub(crate) fn sample_ppp_with_rng<R: Rng>(cfg: &PppConfig, seed_label: u64, rng: &mut R) -> PointSet {
    let mean = cfg.expected_count();
    let count = Poisson::new(mean).expect("validated mean").sample(rng) as usize;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let radius = cfg.window_radius * rng.gen::<f64>().sqrt();
        let angle = 2.0 * PI * rng.gen::<f64>();
        points.push([cfg.center[0] + radius * angle.cos(), cfg.center[1] + radius * angle.sin()]);
    }
    PointSet { points, generating_seed: seed_label, window: *cfg }
}

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(1025);
        t.push(0.0);
        for n in 1..=1024usize {
            t.push(t[n - 1] + (n as f64).ln());
        }
        t
    })
}

/// `ln(n!)` for the small orders used by the ordered-distance densities.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    let table = ln_factorial_table();
    assert!((n as usize) < table.len(), "order {n} out of supported range");
    table[n as usize]
}

/// Density of the distance from a point of the plane to the `k`-th nearest
/// point of a PPP with the given density:
/// `exp(-rho pi d^2) * 2 (rho pi d^2)^k / (d (k-1)!)`, zero at `d = 0`.
pub fn kth_neighbor_distance_pdf(d: f64, k: u32, density: f64) -> f64 {
    assert!(k >= 1, "neighbor order must be at least 1");
    assert!(density > 0.0 && density.is_finite(), "density must be positive");
    assert!(d >= 0.0, "distance must be non-negative");
    if d == 0.0 {
        return 0.0;
    }
    let m = density * PI * d * d;
    if m == 0.0 {
        return 0.0;
    }
    (2.0 / d) * (f64::from(k) * m.ln() - m - ln_factorial(k - 1)).exp()
}

/// Density of the distance from a device to the `ell`-th closest base
/// station. The same functional form as [`kth_neighbor_distance_pdf`] with
/// `(k, density) = (ell, bs_density)`; kept as a named operation because it
/// parameterizes the set-overlap integrands.
pub fn kth_ordered_bs_distance_pdf(r: f64, ell: u32, density: f64) -> f64 {
    kth_neighbor_distance_pdf(r, ell, density)
}

/// Survival `P(R_ell > radius)` of the `ell`-th ordered distance: the
/// probability that a disk of the given radius holds at most `ell - 1`
/// points.
pub fn ordered_distance_survival(radius: f64, ell: u32, density: f64) -> f64 {
    let m = density * PI * radius * radius;
    let mut total = 0.0;
    for j in 0..ell {
        let ln_term = if m == 0.0 && j == 0 { 0.0 } else { f64::from(j) * m.ln() - m - ln_factorial(j) };
        total += ln_term.exp();
    }
    total.min(1.0)
}

/// Smallest radius `R` with `P(R_ell > R) <= tail_mass`, by bisection on the
/// Erlang-type count survival. Used to truncate infinite radial integrals
/// and to size simulation windows.
pub fn quantile_radius(ell: u32, density: f64, tail_mass: f64) -> f64 {
    assert!(ell >= 1, "order must be at least 1");
    assert!(density > 0.0 && density.is_finite(), "density must be positive");
    assert!(tail_mass > 0.0 && tail_mass < 1.0, "tail mass must be in (0, 1)");
    let mut hi = (1.0 / (PI * density)).sqrt();
    let mut expansions = 0;
    while ordered_distance_survival(hi, ell, density) > tail_mass {
        hi *= 2.0;
        expansions += 1;
        assert!(expansions < 200, "quantile bracket failed to expand");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ordered_distance_survival(mid, ell, density) > tail_mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}
