//! Analytic probabilities: quadrature evaluation of the set-overlap
//! integrals (same/different closest-station sets for two separated
//! devices) and the localizability combination formulas, with controlled
//! numerical error.
//!
//! Hearability probabilities enter through [`HearabilityPmf`] values which
//! by default come from the Monte Carlo estimators in [`mc`]; the
//! [`HearabilityProvider`] trait is the injection point for externally
//! supplied closed forms.

pub mod mc;

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::Error;
use crate::geometry::{intersection_area, lune_area, phi_range_unchecked, CirclePair};
use crate::pointprocess::{kth_neighbor_distance_pdf, kth_ordered_bs_distance_pdf, quantile_radius};
use crate::propagation::NetworkScenario;
use crate::quad::{integrate, EvalBudget};
use crate::Result;

/// Tolerances and budgets for the adaptive quadratures.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureSpec {
    pub rel_tolerance: f64,
    pub abs_tolerance: f64,
    pub max_evaluations: usize,
    /// Mass of the ordered-distance tail dropped when an infinite radial
    /// integral is truncated; added to the reported error bound.
    pub truncation_tail_mass: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tolerance: 1e-6,
            abs_tolerance: 1e-9,
            max_evaluations: 20_000_000,
            truncation_tail_mass: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.abs_tolerance > 0.0) {
            return Err(Error::config("quadrature tolerances must be positive".to_string()));
        }
        if self.max_evaluations < 1_000 {
            return Err(Error::config(format!(
                "max_evaluations must be at least 1000, got {}",
                self.max_evaluations
            )));
        }
        if !(self.truncation_tail_mass > 0.0 && self.truncation_tail_mass < 1.0) {
            return Err(Error::config("truncation tail mass must be in (0, 1)".to_string()));
        }
        Ok(())
    }
}

/// How a probability value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EstimateMethod {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

/// A probability with provenance: a quadrature error bound or a Monte Carlo
/// confidence half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: EstimateMethod,
    pub detail: String,
}

impl ProbabilityEstimate {
    /// Clamps the value into [0, 1] and keeps the bound non-negative, so the
    /// interval `value +- error_bound` always intersects [0, 1].
    pub fn new(value: f64, error_bound: f64, method: EstimateMethod, detail: impl Into<String>) -> Self {
        ProbabilityEstimate {
            value: value.clamp(0.0, 1.0),
            error_bound: error_bound.max(0.0),
            method,
            detail: detail.into(),
        }
    }

    pub fn exact(value: f64, detail: impl Into<String>) -> Self {
        Self::new(value, 0.0, EstimateMethod::ClosedForm, detail)
    }

    /// Complement probability with the same error bound.
    pub fn complement(&self, detail: impl Into<String>) -> Self {
        Self::new(1.0 - self.value, self.error_bound, self.method, detail)
    }
}

/// Where a hearability pmf came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PmfSource {
    MonteCarlo,
    ExternalPlugin,
}

/// Distribution of the number of hearable base stations at a device,
/// stored as explicit probabilities on `0..=n_max` plus an explicit tail
/// mass for counts beyond the stored support.
#[derive(Debug, Clone, PartialEq)]
pub struct HearabilityPmf {
    probs: Vec<f64>,
    tail_mass: f64,
    source: PmfSource,
    sample_count: Option<u64>,
}

impl HearabilityPmf {
    pub fn from_probs(probs: Vec<f64>, tail_mass: f64, source: PmfSource) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) || !(tail_mass >= 0.0) {
            return Err(Error::config("pmf probabilities must be non-negative and finite".to_string()));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::config(format!("pmf must sum to 1 within 1e-6, got {total}")));
        }
        Ok(HearabilityPmf { probs, tail_mass, source, sample_count: None })
    }

    /// Builds an empirical pmf from per-count trial totals. The stored
    /// support is cut where the cumulative probability reaches `1 - 1e-6`;
    /// the remainder becomes the explicit tail mass.
    pub fn from_counts(counts: &[u64], trials: u64, source: PmfSource) -> Result<Self> {
        if trials == 0 {
            return Err(Error::config("pmf requires at least one trial".to_string()));
        }
        let total: u64 = counts.iter().sum();
        if total != trials {
            return Err(Error::config(format!("counts sum to {total}, expected {trials} trials")));
        }
        let mut probs = Vec::with_capacity(counts.len());
        let mut cumulative = 0.0;
        let mut cut = counts.len();
        for (n, &c) in counts.iter().enumerate() {
            cumulative += c as f64 / trials as f64;
            if cumulative >= 1.0 - 1e-6 {
                cut = n + 1;
                break;
            }
        }
        for &c in &counts[..cut] {
            probs.push(c as f64 / trials as f64);
        }
        let tail_mass = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        Ok(HearabilityPmf { probs, tail_mass, source, sample_count: Some(trials) })
    }

    /// Degenerate pmf concentrated on a single count.
    pub fn point_mass(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        HearabilityPmf { probs, tail_mass: 0.0, source: PmfSource::ExternalPlugin, sample_count: None }
    }

    /// `P(N = n)`.
    pub fn p_eq(&self, n: u32) -> f64 {
        self.probs.get(n as usize).copied().unwrap_or(0.0)
    }

    /// `P(N >= n)`, including the stored tail mass.
    pub fn p_geq(&self, n: u32) -> f64 {
        let from = n as usize;
        let sum: f64 = if from < self.probs.len() { self.probs[from..].iter().sum() } else { 0.0 };
        (sum + self.tail_mass).min(1.0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn source(&self) -> PmfSource {
        self.source
    }

    pub fn sample_count(&self) -> Option<u64> {
        self.sample_count
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Standard error of an empirical probability derived from this pmf,
    /// zero for plugin-provided pmfs.
    fn se(&self, p: f64) -> f64 {
        match self.sample_count {
            Some(n) if n > 0 => (p * (1.0 - p) / n as f64).sqrt(),
            _ => 0.0,
        }
    }

    fn method(&self) -> EstimateMethod {
        match self.source {
            PmfSource::MonteCarlo => EstimateMethod::MonteCarlo,
            PmfSource::ExternalPlugin => EstimateMethod::ClosedForm,
        }
    }
}

/// Injection point for hearability distributions: the default provider is
/// the Monte Carlo estimator, and externally supplied closed forms can be
/// plugged in behind the same interface.
pub trait HearabilityProvider {
    fn hearability_pmf(&self, scen: &NetworkScenario) -> Result<HearabilityPmf>;
}

fn check_set_args(d: f64, lambda: f64, spec: &QuadratureSpec) -> Result<()> {
    spec.validate()?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::domain(format!("separation must be non-negative, got {d}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("density must be positive, got {lambda}")));
    }
    Ok(())
}

/// Distance from the second device to a point at radius `r`, angle `theta`
/// from the first device.
fn other_device_distance(r: f64, d: f64, theta: f64) -> f64 {
    (r * r + d * d - 2.0 * r * d * theta.cos()).max(0.0).sqrt().max(f64::MIN_POSITIVE)
}

/// Integrand core shared by the same-farthest-station probability: the
/// fraction of the first device's disk covered by the intersection, raised
/// to the number of interior stations, times the void probability of the
/// second device's exclusive region.
fn same_shared_kernel(r: f64, theta: f64, d: f64, ell: u32, lambda: f64) -> f64 {
    let rbar = other_device_distance(r, d, theta);
    let disk = PI * r * r;
    let ratio = intersection_area(CirclePair { r_u: r, r_v: rbar, d }) / disk;
    let exclusive = lune_area(CirclePair { r_u: rbar, r_v: r, d });
    kth_ordered_bs_distance_pdf(r, ell, lambda) / PI
        * ratio.powi(ell as i32 - 1)
        * (-lambda * exclusive).exp()
}

struct NestedFailure {
    failed: Cell<bool>,
}

impl NestedFailure {
    fn new() -> Self {
        NestedFailure { failed: Cell::new(false) }
    }

    /// Unwraps an inner quadrature inside an outer integrand, falling back
    /// to the partial value and flagging the failure for the caller.
    fn value(&self, r: Result<crate::quad::QuadResult>) -> f64 {
        match r {
            Ok(q) => q.value,
            Err(Error::Numerical { value, .. }) => {
                self.failed.set(true);
                value
            }
            Err(_) => {
                self.failed.set(true);
                0.0
            }
        }
    }
}

fn numerical_error(value: f64, error_bound: f64) -> Error {
    Error::Numerical {
        message: "quadrature did not converge within the evaluation budget".into(),
        value,
        error_bound,
    }
}

/// Probability that two devices separated by `d` have the same set of `ell`
/// closest base stations *and* the same `ell`-th closest one. Double
/// integral over the `ell`-th ordered distance and its angle, truncated at
/// the ordered-distance quantile.
pub fn p_same_set_shared_lth(d: f64, ell: u32, lambda: f64, spec: &QuadratureSpec) -> Result<ProbabilityEstimate> {
    check_set_args(d, lambda, spec)?;
    if ell < 1 {
        return Err(Error::domain("ell must be at least 1".to_string()));
    }
    let r_max = quantile_radius(ell, lambda, spec.truncation_tail_mass);
    let budget = EvalBudget::new(spec.max_evaluations);
    let inner = NestedFailure::new();
    let outer = integrate(
        |r| {
            inner.value(integrate(
                |theta| same_shared_kernel(r, theta, d, ell, lambda),
                0.0,
                PI,
                spec.rel_tolerance / 10.0,
                spec.abs_tolerance / 10.0,
                &budget,
            ))
        },
        0.0,
        r_max,
        spec.rel_tolerance,
        spec.abs_tolerance,
        &budget,
    );
    let detail = format!("shared-farthest overlap integral, d={d}, ell={ell}, lambda={lambda}");
    match outer {
        Ok(q) if !inner.failed.get() => Ok(ProbabilityEstimate::new(
            q.value,
            q.error + spec.truncation_tail_mass,
            EstimateMethod::Quadrature,
            detail,
        )),
        Ok(q) => Err(numerical_error(q.value, q.error + spec.truncation_tail_mass)),
        Err(Error::Numerical { value, error_bound, .. }) => {
            Err(numerical_error(value, error_bound + spec.truncation_tail_mass))
        }
        Err(e) => Err(e),
    }
}

/// Probability that two devices separated by `d` have the same set of `ell`
/// closest base stations while *differing* in their `ell`-th closest one.
/// Triple integral; the event is empty for `ell = 1` or coincident devices.
pub fn p_same_set_distinct_lth(d: f64, ell: u32, lambda: f64, spec: &QuadratureSpec) -> Result<ProbabilityEstimate> {
    check_set_args(d, lambda, spec)?;
    if ell < 1 {
        return Err(Error::domain("ell must be at least 1".to_string()));
    }
    let detail = format!("distinct-farthest overlap integral, d={d}, ell={ell}, lambda={lambda}");
    if ell == 1 || d == 0.0 {
        return Ok(ProbabilityEstimate::exact(0.0, detail));
    }
    let r_max = quantile_radius(ell, lambda, spec.truncation_tail_mass);
    let budget = EvalBudget::new(spec.max_evaluations);
    let failure = NestedFailure::new();
    let prefactor = f64::from(ell) - 1.0;
    let outer = integrate(
        |r| {
            let disk = PI * r * r;
            let pdf_scale = prefactor / PI * kth_ordered_bs_distance_pdf(r, ell, lambda) / disk;
            if pdf_scale == 0.0 {
                return 0.0;
            }
            let theta_integral = failure.value(integrate(
                |theta| {
                    let x_lo = other_device_distance(r, d, theta);
                    let x_hi = d + r;
                    if x_lo >= x_hi {
                        return 0.0;
                    }
                    failure.value(integrate(
                        |x| {
                            let ratio = intersection_area(CirclePair { r_u: r, r_v: x, d }) / disk;
                            let exclusive = lune_area(CirclePair { r_u: x, r_v: r, d });
                            ratio.powi(ell as i32 - 2)
                                * (-lambda * exclusive).exp()
                                * phi_range_unchecked(d, r, x)
                                * x
                        },
                        x_lo,
                        x_hi,
                        spec.rel_tolerance / 30.0,
                        spec.abs_tolerance / 30.0,
                        &budget,
                    ))
                },
                0.0,
                PI,
                spec.rel_tolerance / 10.0,
                spec.abs_tolerance / 10.0,
                &budget,
            ));
            pdf_scale * theta_integral
        },
        0.0,
        r_max,
        spec.rel_tolerance,
        spec.abs_tolerance,
        &budget,
    );
    match outer {
        Ok(q) if !failure.failed.get() => Ok(ProbabilityEstimate::new(
            q.value,
            q.error + spec.truncation_tail_mass,
            EstimateMethod::Quadrature,
            detail,
        )),
        Ok(q) => Err(numerical_error(q.value, q.error + spec.truncation_tail_mass)),
        Err(Error::Numerical { value, error_bound, .. }) => {
            Err(numerical_error(value, error_bound + spec.truncation_tail_mass))
        }
        Err(e) => Err(e),
    }
}

/// Probability that two devices separated by `d` share the same set of
/// `ell` closest base stations: sum of the shared- and distinct-farthest
/// contributions.
pub fn p_same_closest_set(d: f64, ell: u32, lambda: f64, spec: &QuadratureSpec) -> Result<ProbabilityEstimate> {
    let shared = p_same_set_shared_lth(d, ell, lambda, spec)?;
    let distinct = p_same_set_distinct_lth(d, ell, lambda, spec)?;
    Ok(ProbabilityEstimate::new(
        shared.value + distinct.value,
        shared.error_bound + distinct.error_bound,
        EstimateMethod::Quadrature,
        format!("same closest-set probability, d={d}, ell={ell}, lambda={lambda}"),
    ))
}

/// Probability that the two devices' closest-`ell` sets differ, i.e. that
/// collaboration between two devices each hearing exactly `ell` stations
/// yields at least `ell + 1` unique stations.
pub fn p_diff_closest_set(d: f64, ell: u32, lambda: f64, spec: &QuadratureSpec) -> Result<ProbabilityEstimate> {
    Ok(p_same_closest_set(d, ell, lambda, spec)?
        .complement(format!("different closest-set probability, d={d}, ell={ell}, lambda={lambda}")))
}

/// Deconditions the same-closest-set probability over a separation density
/// on the given support. The density must integrate to one over the
/// support; any mass outside it should be accounted in `extra_tail`.
pub fn p_same_closest_set_deconditioned<F>(
    separation_density: F,
    support: (f64, f64),
    extra_tail: f64,
    ell: u32,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<ProbabilityEstimate>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    let inner_spec = QuadratureSpec {
        rel_tolerance: spec.rel_tolerance / 10.0,
        abs_tolerance: spec.abs_tolerance / 10.0,
        ..*spec
    };
    let budget = EvalBudget::new(spec.max_evaluations);
    let failure = Cell::new(false);
    let worst_inner = Cell::new(0.0f64);
    let outer = integrate(
        |y| {
            let w = separation_density(y);
            if w == 0.0 {
                return 0.0;
            }
            match p_same_closest_set(y, ell, lambda, &inner_spec) {
                Ok(p) => {
                    worst_inner.set(worst_inner.get().max(p.error_bound));
                    w * p.value
                }
                Err(Error::Numerical { value, .. }) => {
                    failure.set(true);
                    w * value
                }
                Err(_) => {
                    failure.set(true);
                    0.0
                }
            }
        },
        support.0,
        support.1,
        spec.rel_tolerance,
        spec.abs_tolerance,
        &budget,
    );
    match outer {
        Ok(q) if !failure.get() => Ok(ProbabilityEstimate::new(
            q.value,
            q.error + worst_inner.get() + extra_tail,
            EstimateMethod::Quadrature,
            "same closest-set probability deconditioned over a separation density",
        )),
        Ok(q) => Err(numerical_error(q.value, q.error + worst_inner.get() + extra_tail)),
        Err(Error::Numerical { value, error_bound, .. }) => {
            Err(numerical_error(value, error_bound + extra_tail))
        }
        Err(e) => Err(e),
    }
}

/// Probability that a device and its `k`-th closest neighboring device
/// share the same set of `ell` closest base stations: the fixed-separation
/// probability averaged over the `k`-th neighbor distance.
pub fn p_same_closest_set_kth_neighbor(
    k: u32,
    ell: u32,
    lambda: f64,
    nu: f64,
    spec: &QuadratureSpec,
) -> Result<ProbabilityEstimate> {
    if k < 1 {
        return Err(Error::domain("neighbor order must be at least 1".to_string()));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::domain(format!("device density must be positive, got {nu}")));
    }
    check_set_args(0.0, lambda, spec)?;
    let y_max = quantile_radius(k, nu, spec.truncation_tail_mass);
    let mut est = p_same_closest_set_deconditioned(
        |y| kth_neighbor_distance_pdf(y, k, nu),
        (0.0, y_max),
        spec.truncation_tail_mass,
        ell,
        lambda,
        spec,
    )?;
    est.detail = format!("same closest-set probability against neighbor {k}, ell={ell}, lambda={lambda}, nu={nu}");
    Ok(est)
}

/// Complement of [`p_same_closest_set_kth_neighbor`]: the probability that
/// collaboration with the `k`-th neighbor adds at least one unique station
/// when both devices hear exactly `ell`.
pub fn p_diff_closest_set_kth_neighbor(
    k: u32,
    ell: u32,
    lambda: f64,
    nu: f64,
    spec: &QuadratureSpec,
) -> Result<ProbabilityEstimate> {
    Ok(p_same_closest_set_kth_neighbor(k, ell, lambda, nu, spec)?
        .complement(format!("different closest-set probability against neighbor {k}")))
}

/// Noncollaborative unique localizability: the tail probability of hearing
/// at least `ell + 1` stations.
pub fn p_loc_noncollab(hear_u: &HearabilityPmf, ell: u32) -> ProbabilityEstimate {
    let p = hear_u.p_geq(ell + 1);
    ProbabilityEstimate::new(p, 3.0 * hear_u.se(p), hear_u.method(), format!("tail P(N >= {})", ell + 1))
}

/// Collaborative unique localizability without shadowing: the
/// noncollaborative tail plus the boundary term where the device hears
/// exactly `ell`, the collaborator hears at least `ell`, and their
/// closest-station sets differ. Assumes independent hearability across the
/// two devices given different sets.
pub fn p_loc_collab_noshadow(
    hear_u: &HearabilityPmf,
    hear_v: &HearabilityPmf,
    p_diff_set: &ProbabilityEstimate,
    ell: u32,
) -> ProbabilityEstimate {
    let base = hear_u.p_geq(ell + 1);
    let eq_u = hear_u.p_eq(ell);
    let geq_v = hear_v.p_geq(ell);
    let value = base + eq_u * geq_v * p_diff_set.value;
    let error = 3.0 * hear_u.se(base)
        + 3.0 * hear_u.se(eq_u) * geq_v * p_diff_set.value
        + eq_u * 3.0 * hear_v.se(geq_v) * p_diff_set.value
        + eq_u * geq_v * p_diff_set.error_bound;
    ProbabilityEstimate::new(
        value,
        error,
        hear_u.method(),
        format!("P(N_u >= {0}) + P(N_u = {1}) P(N_v >= {1}) P(sets differ)", ell + 1, ell),
    )
}

/// Collaborative unique localizability under shadowing: same combination
/// with the set-difference probability replaced by 1, reflecting that
/// shadowing decorrelates the two devices' strongest sets.
pub fn p_loc_collab_shadow(hear_u: &HearabilityPmf, hear_v: &HearabilityPmf, ell: u32) -> ProbabilityEstimate {
    let certain_diff = ProbabilityEstimate::exact(1.0, "sets assumed different under shadowing");
    let mut est = p_loc_collab_noshadow(hear_u, hear_v, &certain_diff, ell);
    est.detail = format!("P(N_u >= {0}) + P(N_u = {1}) P(N_v >= {1})", ell + 1, ell);
    est
}

/// Localizability pair under random frequency reuse.
#[derive(Debug, Clone, PartialEq)]
pub struct ReuseLocalizability {
    pub noncollaborative: ProbabilityEstimate,
    pub collaborative: ProbabilityEstimate,
}

/// Collaborative and noncollaborative unique localizability for the
/// frequency-reuse regime. The pmfs must already describe the per-band
/// interference model with counts summed over bands.
pub fn p_loc_reuse(hear_u_bands: &HearabilityPmf, hear_v_bands: &HearabilityPmf, ell: u32) -> ReuseLocalizability {
    ReuseLocalizability {
        noncollaborative: p_loc_noncollab(hear_u_bands, ell),
        collaborative: p_loc_collab_shadow(hear_u_bands, hear_v_bands, ell),
    }
}
