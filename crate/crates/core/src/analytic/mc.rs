//! Monte Carlo ground truth: geometric closest-set classification and
//! SINR-based joint hearability/localizability estimation.
//!
//! Trials are keyed by `(master_seed, trial_index)` streams and reduced with
//! integer counters, so every estimate is reproducible bit-for-bit across
//! thread counts.

use rayon::prelude::*;

use crate::analytic::{EstimateMethod, HearabilityPmf, HearabilityProvider, PmfSource, ProbabilityEstimate};
use crate::error::Error;
use crate::pointprocess::{quantile_radius, sample_ppp_with_rng, PppConfig};
use crate::propagation::{base_window_radius, NetworkScenario, Realization};
use crate::rigidity::device_localizable;
use crate::rng::trial_rng;
use crate::Result;

/// Plain binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_se(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    (p * (1.0 - p) / n).sqrt()
}

/// Conservative 3-sigma Monte Carlo error bound: the Wilson score interval
/// half-width plus its center offset, so `rate +- bound` always covers the
/// Wilson interval.
fn mc_error_bound(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let z = 3.0;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    (center - p).abs() + half
}

fn mc_estimate(successes: u64, trials: u64, detail: impl Into<String>) -> ProbabilityEstimate {
    let value = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    ProbabilityEstimate::new(value, mc_error_bound(successes, trials), EstimateMethod::MonteCarlo, detail)
}

/// Outcome counters of the geometric closest-set classification.
#[derive(Debug, Clone, Copy, Default)]
pub struct SetClassificationCounts {
    pub trials: u64,
    /// Same closest-`ell` set, and the `ell`-th closest station coincides.
    pub same_set_shared_lth: u64,
    /// Same closest-`ell` set with different `ell`-th closest stations.
    pub same_set_distinct_lth: u64,
    /// Trials where the window held fewer than `ell` stations (tail mass of
    /// the window rule; expected to be essentially zero).
    pub skipped: u64,
}

impl SetClassificationCounts {
    fn merge(mut self, o: Self) -> Self {
        self.trials += o.trials;
        self.same_set_shared_lth += o.same_set_shared_lth;
        self.same_set_distinct_lth += o.same_set_distinct_lth;
        self.skipped += o.skipped;
        self
    }

    pub fn p_same_set_shared(&self) -> ProbabilityEstimate {
        mc_estimate(self.same_set_shared_lth, self.trials, "mc same-set, shared farthest")
    }

    pub fn p_same_set_distinct(&self) -> ProbabilityEstimate {
        mc_estimate(self.same_set_distinct_lth, self.trials, "mc same-set, distinct farthest")
    }

    pub fn p_same_set(&self) -> ProbabilityEstimate {
        mc_estimate(self.same_set_shared_lth + self.same_set_distinct_lth, self.trials, "mc same-set")
    }

    pub fn p_diff_set(&self) -> ProbabilityEstimate {
        self.p_same_set().complement("mc different-set")
    }
}

/// Indices of the `k` nearest points in increasing-distance order, by
/// insertion into a small sorted buffer. Ties broken by lower index.
fn nearest_k(dist2: impl Iterator<Item = f64>, k: usize) -> Vec<(f64, u32)> {
    let mut best: Vec<(f64, u32)> = Vec::with_capacity(k + 1);
    for (i, d2) in dist2.enumerate() {
        if best.len() == k && d2 >= best[k - 1].0 {
            continue;
        }
        let pos = best.partition_point(|&(bd, _)| bd <= d2);
        best.insert(pos, (d2, i as u32));
        if best.len() > k {
            best.pop();
        }
    }
    best
}

fn sorted_ids(prefix: &[(f64, u32)]) -> Vec<u32> {
    let mut ids: Vec<u32> = prefix.iter().map(|&(_, i)| i).collect();
    ids.sort_unstable();
    ids
}

fn classify_points(points: &[[f64; 2]], d: f64, ell: usize) -> Option<(bool, bool)> {
    if points.len() < ell {
        return None;
    }
    let du = nearest_k(points.iter().map(|p| p[0] * p[0] + p[1] * p[1]), ell);
    let dv = nearest_k(
        points.iter().map(|p| {
            let dx = p[0] - d;
            dx * dx + p[1] * p[1]
        }),
        ell,
    );
    let same_set = sorted_ids(&du) == sorted_ids(&dv);
    if !same_set {
        return Some((false, false));
    }
    let same_farthest = du[ell - 1].1 == dv[ell - 1].1;
    Some((same_farthest, !same_farthest))
}

/// Classifies the closest-`ell` base station sets of two devices separated
/// by `d` over sampled realizations of the station process. Serves as the
/// independent ground truth for the set-overlap quadratures.
pub fn mc_set_classification(
    lambda: f64,
    d: f64,
    ell: u32,
    trials: u64,
    master_seed: u64,
) -> Result<SetClassificationCounts> {
    if trials == 0 {
        return Err(Error::config("set classification needs at least one trial".to_string()));
    }
    if ell == 0 {
        return Err(Error::domain("ell must be at least 1".to_string()));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::domain(format!("separation must be non-negative, got {d}")));
    }
    let radius = quantile_radius(ell + 5, lambda, 1e-9) + d / 2.0;
    let window = PppConfig::new(lambda, radius, [d / 2.0, 0.0])?;
    let counts = (0..trials)
        .into_par_iter()
        .fold(SetClassificationCounts::default, |mut c, t| {
            let mut rng = trial_rng(master_seed, t);
            let pts = sample_ppp_with_rng(&window, master_seed, &mut rng);
            c.trials += 1;
            match classify_points(&pts.points, d, ell as usize) {
                Some((shared, distinct)) => {
                    c.same_set_shared_lth += u64::from(shared);
                    c.same_set_distinct_lth += u64::from(distinct);
                }
                None => c.skipped += 1,
            }
            c
        })
        .reduce(SetClassificationCounts::default, SetClassificationCounts::merge);
    Ok(counts)
}

/// Same classification with the second device placed at the `k`-th nearest
/// neighbor distance, sampled per trial from the device process of density
/// `nu`.
pub fn mc_set_classification_kth_neighbor(
    lambda: f64,
    nu: f64,
    k: u32,
    ell: u32,
    trials: u64,
    master_seed: u64,
) -> Result<SetClassificationCounts> {
    if trials == 0 {
        return Err(Error::config("set classification needs at least one trial".to_string()));
    }
    if k == 0 || ell == 0 {
        return Err(Error::domain("orders must be at least 1".to_string()));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::domain(format!("device density must be positive, got {nu}")));
    }
    let base_radius = quantile_radius(ell + 5, lambda, 1e-9);
    // Validate the worst-case window once; per-trial windows are smaller.
    let d_cap = quantile_radius(k, nu, 1e-12);
    PppConfig::new(lambda, base_radius + d_cap / 2.0, [0.0, 0.0])?;
    let counts = (0..trials)
        .into_par_iter()
        .fold(SetClassificationCounts::default, |mut c, t| {
            let mut rng = trial_rng(master_seed, t);
            let d = sample_kth_neighbor_distance(&mut rng, k, nu).min(d_cap);
            let window = PppConfig {
                density: lambda,
                window_radius: base_radius + d / 2.0,
                center: [d / 2.0, 0.0],
            };
            let pts = sample_ppp_with_rng(&window, master_seed, &mut rng);
            c.trials += 1;
            match classify_points(&pts.points, d, ell as usize) {
                Some((shared, distinct)) => {
                    c.same_set_shared_lth += u64::from(shared);
                    c.same_set_distinct_lth += u64::from(distinct);
                }
                None => c.skipped += 1,
            }
            c
        })
        .reduce(SetClassificationCounts::default, SetClassificationCounts::merge);
    Ok(counts)
}

/// Draws the distance to the `k`-th nearest neighbor: `nu pi D^2` is
/// Erlang(`k`), i.e. a sum of `k` standard exponentials.
fn sample_kth_neighbor_distance<R: rand::Rng>(rng: &mut R, k: u32, nu: f64) -> f64 {
    let mut m = 0.0;
    for _ in 0..k {
        m += rng.sample::<f64, _>(rand_distr::Exp1);
    }
    (m / (nu * std::f64::consts::PI)).sqrt()
}

/// How the collaborator is placed relative to the device under study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    /// Fixed separation.
    Fixed(f64),
    /// Distance to the `k`-th nearest device of the device process.
    KthNeighbor(u32),
}

#[derive(Debug, Clone, Default)]
struct BetaCounts {
    hist_u: Vec<u64>,
    hist_v: Vec<u64>,
    loc_noncollab: u64,
    loc_collab: u64,
    /// Trials with equal strongest sets where `N_u = ell` and
    /// `N_v = ell + k` for `k` in `1..=3`.
    count_gap: [u64; 3],
}

impl BetaCounts {
    fn bump_hist(hist: &mut Vec<u64>, n: usize) {
        if hist.len() <= n {
            hist.resize(n + 1, 0);
        }
        hist[n] += 1;
    }

    fn merge(mut self, o: BetaCounts) -> BetaCounts {
        if self.hist_u.len() < o.hist_u.len() {
            self.hist_u.resize(o.hist_u.len(), 0);
        }
        for (i, v) in o.hist_u.iter().enumerate() {
            self.hist_u[i] += v;
        }
        if self.hist_v.len() < o.hist_v.len() {
            self.hist_v.resize(o.hist_v.len(), 0);
        }
        for (i, v) in o.hist_v.iter().enumerate() {
            self.hist_v[i] += v;
        }
        self.loc_noncollab += o.loc_noncollab;
        self.loc_collab += o.loc_collab;
        for i in 0..3 {
            self.count_gap[i] += o.count_gap[i];
        }
        self
    }
}

#[derive(Debug, Clone)]
struct SweepCounts {
    per_beta: Vec<BetaCounts>,
    diff_set: u64,
    same_set: u64,
    trials: u64,
}

impl SweepCounts {
    fn new(betas: usize) -> Self {
        SweepCounts { per_beta: vec![BetaCounts::default(); betas], diff_set: 0, same_set: 0, trials: 0 }
    }

    fn merge(mut self, o: SweepCounts) -> SweepCounts {
        self.per_beta = self
            .per_beta
            .into_iter()
            .zip(o.per_beta)
            .map(|(a, b)| a.merge(b))
            .collect();
        self.diff_set += o.diff_set;
        self.same_set += o.same_set;
        self.trials += o.trials;
        self
    }
}

/// Joint hearability and localizability estimates at one SINR threshold.
#[derive(Debug, Clone)]
pub struct JointHearabilityMc {
    pub beta_linear: f64,
    pub hear_u: HearabilityPmf,
    pub hear_v: HearabilityPmf,
    /// Exact-truth noncollaborative rate: `N_u >= ell + 1` per trial.
    pub p_loc_noncollab: ProbabilityEstimate,
    /// Exact-truth collaborative rate: the device-localizability predicate
    /// evaluated on the realized hearable sets per trial.
    pub p_loc_collab: ProbabilityEstimate,
    /// Rate of the two devices' strongest-`ell` sets differing
    /// (threshold-independent).
    pub p_diff_set: ProbabilityEstimate,
    /// `P(N_u = ell, N_v = ell + k | equal strongest sets)` for `k = 1..=3`,
    /// the diagnostic for the dropped joint term.
    pub same_set_count_gap: Vec<(u32, ProbabilityEstimate)>,
    pub trials: u64,
}

/// Evaluates hearability and localizability over sampled realizations for a
/// whole grid of SINR thresholds at once: the per-station SINRs of a
/// realization do not depend on the threshold, so all grid points share the
/// same trials.
pub fn mc_joint_sweep(
    scen: &NetworkScenario,
    separation: Separation,
    beta_grid: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<JointHearabilityMc>> {
    scen.validate()?;
    if trials == 0 {
        return Err(Error::config("joint sweep needs at least one trial".to_string()));
    }
    if beta_grid.is_empty() {
        return Err(Error::config("beta grid must be non-empty".to_string()));
    }
    if beta_grid.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::config("beta grid must be positive linear ratios".to_string()));
    }
    if beta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("beta grid must be strictly ascending".to_string()));
    }
    let base_radius = base_window_radius(scen)?;
    let d_cap = match separation {
        Separation::Fixed(d) => {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::domain(format!("separation must be non-negative, got {d}")));
            }
            d
        }
        Separation::KthNeighbor(k) => {
            if k == 0 {
                return Err(Error::domain("neighbor order must be at least 1".to_string()));
            }
            quantile_radius(k, scen.md_density, 1e-12)
        }
    };
    // Worst-case window must satisfy the expected-count guard.
    PppConfig::new(scen.bs_density, base_radius + d_cap / 2.0, [0.0, 0.0])?;

    let ell = scen.ell;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || SweepCounts::new(beta_grid.len()),
            |mut c, t| {
                let mut rng = trial_rng(master_seed, t);
                let d = match separation {
                    Separation::Fixed(d) => d,
                    Separation::KthNeighbor(k) => {
                        sample_kth_neighbor_distance(&mut rng, k, scen.md_density).min(d_cap)
                    }
                };
                let window = PppConfig {
                    density: scen.bs_density,
                    window_radius: base_radius + d / 2.0,
                    center: [d / 2.0, 0.0],
                };
                let real = Realization::generate_in_window(scen, d, &window, &mut rng)
                    .expect("window validated");
                let per_band = scen.reuse_factor > 1;
                let vu = crate::propagation::device_sinr_values(&real, scen, 0, per_band);
                let vv = crate::propagation::device_sinr_values(&real, scen, 1, per_band);
                record_trial(&mut c, &vu, &vv, beta_grid, ell);
                c
            },
        )
        .reduce(|| SweepCounts::new(beta_grid.len()), SweepCounts::merge);

    assemble_sweep(counts, beta_grid, trials)
}

/// Indices of the `k` highest values, ordered by decreasing value with ties
/// broken by lower index.
fn top_k_ids(values: &[f64], k: usize) -> Vec<usize> {
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (i, &s) in values.iter().enumerate() {
        if best.len() == k && s <= best[k - 1].0 {
            continue;
        }
        let pos = best.partition_point(|&(b, _)| b >= s);
        best.insert(pos, (s, i));
        if best.len() > k {
            best.pop();
        }
    }
    best.into_iter().map(|(_, i)| i).collect()
}

/// `out[i] = #values >= betas[i]` for an ascending threshold grid, via one
/// bucketing pass and a suffix sum.
fn counts_per_grid(values: &[f64], betas: &[f64], buckets: &mut Vec<u32>, out: &mut Vec<u32>) {
    buckets.clear();
    buckets.resize(betas.len() + 1, 0);
    for &v in values {
        let idx = betas.partition_point(|&b| b <= v);
        buckets[idx] += 1;
    }
    out.clear();
    out.resize(betas.len(), 0);
    let mut acc = 0u32;
    for i in (0..betas.len()).rev() {
        acc += buckets[i + 1];
        out[i] = acc;
    }
}

/// Records one realization into the sweep counters. `vu`/`vv` are the
/// per-station SINRs of the two devices in station-index order.
fn record_trial(c: &mut SweepCounts, vu: &[f64], vv: &[f64], beta_grid: &[f64], ell: u32) {
    c.trials += 1;
    let l = ell as usize;
    let mut top_u = top_k_ids(vu, l);
    let mut top_v = top_k_ids(vv, l);
    top_u.sort_unstable();
    top_v.sort_unstable();
    let same_set = top_u == top_v;
    if same_set {
        c.same_set += 1;
    } else {
        c.diff_set += 1;
    }
    let mut buckets = Vec::new();
    let mut n_u_at = Vec::new();
    let mut n_v_at = Vec::new();
    counts_per_grid(vu, beta_grid, &mut buckets, &mut n_u_at);
    counts_per_grid(vv, beta_grid, &mut buckets, &mut n_v_at);
    for (bi, &beta) in beta_grid.iter().enumerate() {
        let n_u = n_u_at[bi] as usize;
        let n_v = n_v_at[bi] as usize;
        let bc = &mut c.per_beta[bi];
        BetaCounts::bump_hist(&mut bc.hist_u, n_u);
        BetaCounts::bump_hist(&mut bc.hist_v, n_v);
        if n_u >= l + 1 {
            bc.loc_noncollab += 1;
        }
        let unique = if n_u == l && n_v >= l {
            // Stations hearable at v but not at u; same index space, so the
            // union size needs no id sets.
            let extra = vu.iter().zip(vv).filter(|&(&u, &v)| v >= beta && u < beta).count();
            n_u + extra
        } else {
            n_u + n_v
        };
        if device_localizable(ell, n_u, n_v, unique, true) {
            bc.loc_collab += 1;
        }
        if same_set && n_u == l && n_v > l && n_v - l <= 3 {
            bc.count_gap[n_v - l - 1] += 1;
        }
    }
}

fn assemble_sweep(counts: SweepCounts, beta_grid: &[f64], trials: u64) -> Result<Vec<JointHearabilityMc>> {
    let diff_set = mc_estimate(counts.diff_set, trials, "mc strongest-set difference rate");
    beta_grid
        .iter()
        .zip(counts.per_beta)
        .map(|(&beta, bc)| {
            let hear_u = HearabilityPmf::from_counts(&bc.hist_u, trials, PmfSource::MonteCarlo)?;
            let hear_v = HearabilityPmf::from_counts(&bc.hist_v, trials, PmfSource::MonteCarlo)?;
            let same_set_count_gap = (1u32..=3)
                .map(|k| {
                    let est = mc_estimate(
                        bc.count_gap[k as usize - 1],
                        counts.same_set,
                        format!("conditional count-gap rate at k={k}"),
                    );
                    (k, est)
                })
                .collect();
            Ok(JointHearabilityMc {
                beta_linear: beta,
                hear_u,
                hear_v,
                p_loc_noncollab: mc_estimate(bc.loc_noncollab, trials, "mc noncollaborative localizability"),
                p_loc_collab: mc_estimate(bc.loc_collab, trials, "mc collaborative localizability"),
                p_diff_set: diff_set.clone(),
                same_set_count_gap,
                trials,
            })
        })
        .collect()
}

/// Marginal and joint hearability at the scenario's own threshold for two
/// devices separated by `device_sep`: pmfs for both devices, exact-truth
/// localizability rates, the set-difference rate and the count-gap
/// diagnostics.
pub fn mc_hearability_pmf(
    scen: &NetworkScenario,
    device_sep: f64,
    trials: u64,
    master_seed: u64,
) -> Result<JointHearabilityMc> {
    let mut v = mc_joint_sweep(scen, Separation::Fixed(device_sep), &[scen.sinr_threshold], trials, master_seed)?;
    Ok(v.remove(0))
}

/// Paired evaluation of a frequency-reuse scenario and its universal-reuse
/// counterpart on the *same* realizations (positions, shadowing and band
/// labels shared). Per-band interference is a subset of the universal
/// interference, so per-station SINRs under reuse dominate their universal
/// counterparts trial by trial.
#[derive(Debug, Clone)]
pub struct PairedReuseSweep {
    /// Evaluated with per-band interference (the scenario's reuse factor).
    pub reuse: Vec<JointHearabilityMc>,
    /// Evaluated with every station interfering (universal reuse).
    pub universal: Vec<JointHearabilityMc>,
}

pub fn mc_reuse_paired_sweep(
    scen: &NetworkScenario,
    device_sep: f64,
    beta_grid: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<PairedReuseSweep> {
    scen.validate()?;
    if scen.reuse_factor < 2 {
        return Err(Error::config("paired reuse sweep needs a reuse factor of at least 2".to_string()));
    }
    if trials == 0 {
        return Err(Error::config("paired sweep needs at least one trial".to_string()));
    }
    if beta_grid.is_empty() || beta_grid.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::config("beta grid must be non-empty positive linear ratios".to_string()));
    }
    if beta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("beta grid must be strictly ascending".to_string()));
    }
    let base_radius = base_window_radius(scen)?;
    let window = PppConfig::new(scen.bs_density, base_radius + device_sep / 2.0, [device_sep / 2.0, 0.0])?;
    let ell = scen.ell;

    let (reuse_counts, universal_counts) = (0..trials)
        .into_par_iter()
        .fold(
            || (SweepCounts::new(beta_grid.len()), SweepCounts::new(beta_grid.len())),
            |(mut cr, mut cu), t| {
                let mut rng = trial_rng(master_seed, t);
                let real = Realization::generate_in_window(scen, device_sep, &window, &mut rng)
                    .expect("window validated");
                let (vu_r, vu_u) = crate::propagation::device_sinr_values_paired(&real, scen, 0);
                let (vv_r, vv_u) = crate::propagation::device_sinr_values_paired(&real, scen, 1);
                record_trial(&mut cr, &vu_r, &vv_r, beta_grid, ell);
                record_trial(&mut cu, &vu_u, &vv_u, beta_grid, ell);
                (cr, cu)
            },
        )
        .reduce(
            || (SweepCounts::new(beta_grid.len()), SweepCounts::new(beta_grid.len())),
            |(ar, au), (br, bu)| (ar.merge(br), au.merge(bu)),
        );

    Ok(PairedReuseSweep {
        reuse: assemble_sweep(reuse_counts, beta_grid, trials)?,
        universal: assemble_sweep(universal_counts, beta_grid, trials)?,
    })
}

/// Default hearability provider: estimates the pmf by Monte Carlo at the
/// scenario's own threshold.
#[derive(Debug, Clone, Copy)]
pub struct McHearabilityProvider {
    pub trials: u64,
    pub master_seed: u64,
}

impl HearabilityProvider for McHearabilityProvider {
    fn hearability_pmf(&self, scen: &NetworkScenario) -> Result<HearabilityPmf> {
        Ok(mc_hearability_pmf(scen, 0.0, self.trials, self.master_seed)?.hear_u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::beta_from_db;

    #[test]
    fn zero_trials_is_a_config_error() {
        assert!(mc_set_classification(1.0, 0.5, 2, 0, 1).is_err());
        let scen = NetworkScenario::default();
        assert!(mc_hearability_pmf(&scen, 100.0, 0, 1).is_err());
    }

    #[test]
    fn nearest_k_selects_and_orders() {
        let d2 = [5.0, 1.0, 4.0, 0.5, 9.0, 0.5];
        let got = nearest_k(d2.iter().copied(), 3);
        let ids: Vec<u32> = got.iter().map(|&(_, i)| i).collect();
        assert_eq!(ids, vec![3, 5, 1]);
    }

    #[test]
    fn top_k_breaks_ties_by_lower_index() {
        let v = [0.5, 2.0, 2.0, 9.0, 0.1];
        assert_eq!(top_k_ids(&v, 3), vec![3, 1, 2]);
        assert_eq!(top_k_ids(&v, 1), vec![3]);
        assert_eq!(top_k_ids(&v[..2], 5), vec![1, 0]);
    }

    #[test]
    fn grid_counts_match_direct_scan() {
        let values = [0.05, 0.2, 0.7, 0.2, 1.5, 0.01];
        let betas = [0.1, 0.2, 0.5, 1.0];
        let mut buckets = Vec::new();
        let mut out = Vec::new();
        counts_per_grid(&values, &betas, &mut buckets, &mut out);
        for (i, &b) in betas.iter().enumerate() {
            let direct = values.iter().filter(|&&v| v >= b).count() as u32;
            assert_eq!(out[i], direct, "mismatch at beta {b}");
        }
    }

    #[test]
    fn coincident_devices_always_share_sets() {
        let counts = mc_set_classification(1.0, 0.0, 2, 2_000, 7).unwrap();
        assert_eq!(counts.same_set_shared_lth, counts.trials - counts.skipped);
        assert_eq!(counts.same_set_distinct_lth, 0);
    }

    #[test]
    fn classification_is_deterministic_across_thread_counts() {
        let a = mc_set_classification(1.0, 0.4, 2, 5_000, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_set_classification(1.0, 0.4, 2, 5_000, 42).unwrap());
        assert_eq!(a.same_set_shared_lth, b.same_set_shared_lth);
        assert_eq!(a.same_set_distinct_lth, b.same_set_distinct_lth);
    }

    #[test]
    fn infinite_threshold_gives_point_mass_at_zero() {
        let scen =
            NetworkScenario { sinr_threshold: 1e12, bs_density: 1e-4, ..NetworkScenario::default() };
        let est = mc_hearability_pmf(&scen, 50.0, 500, 3).unwrap();
        assert_eq!(est.hear_u.p_eq(0), 1.0);
        assert_eq!(est.p_loc_noncollab.value, 0.0);
        assert_eq!(est.p_loc_collab.value, 0.0);
    }

    #[test]
    fn collaboration_never_hurts_per_trial() {
        let scen = NetworkScenario {
            bs_density: 1e-4,
            sinr_threshold: beta_from_db(-10.0),
            ell: 2,
            ..NetworkScenario::default()
        };
        let est = mc_hearability_pmf(&scen, 60.0, 2_000, 11).unwrap();
        assert!(est.p_loc_collab.value >= est.p_loc_noncollab.value);
    }

    #[test]
    fn kth_neighbor_distance_sampler_matches_mean() {
        // E[D_1] = 1 / (2 sqrt(nu)); check within a loose band.
        let mut rng = trial_rng(5, 0);
        let nu = 0.7;
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| sample_kth_neighbor_distance(&mut rng, 1, nu)).sum::<f64>() / n as f64;
        let expected = 0.5 / nu.sqrt();
        assert!((mean - expected).abs() < 0.02 * expected, "mean {mean} vs {expected}");
    }
}
