//! Seeded statistical validation of the samplers and the propagation model:
//! distributional tests against closed forms and a straight-line SINR
//! reimplementation.

use locprob::pointprocess::{kth_neighbor_distance_pdf, sample_ppp, PppConfig};
use locprob::propagation::{
    base_window_radius, beta_from_db, device_sinrs, hearability_profile, sinr, NetworkScenario,
    Realization,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail p-value of a chi-square statistic.
fn chi2_pvalue(stat: f64, dof: f64) -> f64 {
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Asymptotic Kolmogorov-Smirnov p-value.
fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let x = d * (sqrt_n + 0.12 + 0.11 / sqrt_n);
    let mut q = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        q += 2.0 * (-1.0f64).powi(j as i32 - 1) * (-2.0 * j * j * x * x).exp();
    }
    q.clamp(0.0, 1.0)
}

#[test]
fn point_counts_are_poisson() {
    // Chi-square goodness of fit of the realization counts against the
    // Poisson law, merging tail bins to keep expected counts above 5.
    let cfg = PppConfig::new(0.5, 4.0, [0.0, 0.0]).unwrap();
    let mean = cfg.expected_count();
    let runs = 10_000u64;
    let mut hist = vec![0u64; 100];
    for seed in 0..runs {
        let n = sample_ppp(&cfg, seed).unwrap().points.len();
        hist[n.min(hist.len() - 1)] += 1;
    }
    let pmf = |k: usize| {
        let k = k as f64;
        (k * mean.ln() - mean - (1..=(k as u64)).map(|i| (i as f64).ln()).sum::<f64>()).exp()
    };
    let mut stat = 0.0;
    let mut dof: f64 = -1.0;
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for k in 0..hist.len() {
        acc_obs += hist[k] as f64;
        acc_exp += runs as f64 * pmf(k);
        if acc_exp >= 5.0 {
            stat += (acc_obs - acc_exp).powi(2) / acc_exp;
            dof += 1.0;
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    let tail_exp = runs as f64 - (0..hist.len()).map(|k| runs as f64 * pmf(k)).sum::<f64>() + acc_exp;
    if tail_exp >= 5.0 {
        stat += (acc_obs - tail_exp).powi(2) / tail_exp;
        dof += 1.0;
    }
    let p = chi2_pvalue(stat, dof);
    assert!(p > 0.01, "Poisson count chi-square p = {p} (stat {stat}, dof {dof})");
}

#[test]
fn nearest_neighbor_distances_match_density() {
    // KS test of sampled nearest-neighbor distances against the closed-form
    // CDF 1 - exp(-nu pi d^2) at nu = 1.
    let nu = 1.0;
    let cfg = PppConfig::new(nu, 4.0, [0.0, 0.0]).unwrap();
    let n = 100_000;
    let mut dists = Vec::with_capacity(n);
    let mut seed = 0u64;
    while dists.len() < n {
        let pts = sample_ppp(&cfg, seed).unwrap();
        seed += 1;
        if let Some(min2) = pts
            .points
            .iter()
            .map(|p| p[0] * p[0] + p[1] * p[1])
            .min_by(|a, b| a.total_cmp(b))
        {
            let d = min2.sqrt();
            // Condition away censored draws (nearest point outside the
            // window): P(R_1 > 4) = 3e-22, so this never triggers.
            if d < cfg.window_radius {
                dists.push(d);
            }
        }
    }
    dists.sort_unstable_by(|a, b| a.total_cmp(b));
    let cdf = |d: f64| 1.0 - (-nu * std::f64::consts::PI * d * d).exp();
    let mut ks: f64 = 0.0;
    for (i, &d) in dists.iter().enumerate() {
        let f = cdf(d);
        let lo = i as f64 / n as f64;
        let hi = (i + 1) as f64 / n as f64;
        ks = ks.max((f - lo).abs()).max((hi - f).abs());
    }
    let p = ks_pvalue(ks, n);
    assert!(p > 0.01, "KS p = {p} (D = {ks})");
    // Spot check of the pdf at the empirical mode region.
    assert!(kth_neighbor_distance_pdf(0.4, 1, nu) > 0.0);
}

#[test]
fn ripley_k_matches_complete_spatial_randomness() {
    // Brute-force pair counting with border correction: anchor points are
    // restricted to an inner disk so every candidate disk fits the window.
    let cfg = PppConfig::new(2.0, 20.0, [0.0, 0.0]).unwrap();
    let t_max = cfg.window_radius / 4.0;
    let mut sum_k = vec![0.0f64; 4];
    let ts: Vec<f64> = (1..=4).map(|i| t_max * i as f64 / 4.0).collect();
    let mut total_anchors = 0u64;
    let runs = 40;
    for seed in 0..runs {
        let pts = sample_ppp(&cfg, seed).unwrap();
        let inner = cfg.window_radius - t_max;
        for (i, a) in pts.points.iter().enumerate() {
            if a[0] * a[0] + a[1] * a[1] > inner * inner {
                continue;
            }
            total_anchors += 1;
            for (j, b) in pts.points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                for (ti, &t) in ts.iter().enumerate() {
                    if d2 <= t * t {
                        sum_k[ti] += 1.0;
                    }
                }
            }
        }
    }
    for (ti, &t) in ts.iter().enumerate() {
        let k_hat = sum_k[ti] / (total_anchors as f64 * cfg.density);
        let expected = std::f64::consts::PI * t * t;
        let rel = (k_hat - expected).abs() / expected;
        assert!(rel < 0.05, "K({t}) = {k_hat}, expected {expected} (rel {rel})");
    }
}

#[test]
fn sampler_is_identical_across_threads() {
    let cfg = PppConfig::new(0.3, 15.0, [1.0, 2.0]).unwrap();
    let base = sample_ppp(&cfg, 31).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let cfg = cfg;
            std::thread::spawn(move || sample_ppp(&cfg, 31).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), base);
    }
}

#[test]
fn shadowing_correlation_matches_target() {
    let rho = 0.5;
    let scen = NetworkScenario {
        bs_density: 1e-4,
        shadowing_sigma_db: 8.0,
        shadowing_correlation: rho,
        ..NetworkScenario::default()
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut seed = 0;
    while xs.len() < 120_000 {
        let real = Realization::generate(&scen, 50.0, seed).unwrap();
        seed += 1;
        for bs in 0..real.bs_count() {
            xs.push(real.shadow_gain(&scen, bs, 0).ln());
            ys.push(real.shadow_gain(&scen, bs, 1).ln());
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
    }
    let corr = cov / (vx.sqrt() * vy.sqrt());
    assert!(
        (corr - rho).abs() < 0.01,
        "sample correlation {corr} deviates from {rho} over {} draws",
        xs.len()
    );
}

#[test]
fn band_assignment_thins_to_per_band_poisson() {
    // With K bands, each band's station process must be a PPP of density
    // lambda / K: chi-square on the per-band counts plus a uniformity check
    // of the label proportions.
    let scen = NetworkScenario {
        bs_density: 1e-4,
        reuse_factor: 3,
        ..NetworkScenario::default()
    };
    let runs = 2_000u64;
    let window = locprob::propagation::simulation_window(&scen, 0.0).unwrap();
    let per_band_mean = window.expected_count() / 3.0;
    let mut band_counts: Vec<Vec<f64>> = vec![Vec::new(); 3];
    for seed in 0..runs {
        let real = Realization::generate(&scen, 0.0, seed).unwrap();
        let mut counts = [0u64; 3];
        for &b in &real.band_labels {
            counts[b as usize] += 1;
        }
        for b in 0..3 {
            band_counts[b].push(counts[b] as f64);
        }
    }
    for b in 0..3 {
        let mean: f64 = band_counts[b].iter().sum::<f64>() / runs as f64;
        let var: f64 =
            band_counts[b].iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
        // Poisson: mean == variance; both near the thinned expectation.
        let se_mean = (per_band_mean / runs as f64).sqrt();
        assert!(
            (mean - per_band_mean).abs() < 4.0 * se_mean,
            "band {b} mean {mean} vs {per_band_mean}"
        );
        let ratio = var / mean;
        assert!((ratio - 1.0).abs() < 0.08, "band {b} variance/mean ratio {ratio}");
    }
}

/// Straight-line SINR reimplementation: no shared helpers with the library.
fn sinr_reference(
    real: &Realization,
    scen: &NetworkScenario,
    bs: usize,
    device: usize,
) -> f64 {
    let pos = real.device_positions[device];
    let gain_db = |g: usize, h: usize| -> f64 {
        if scen.shadowing_sigma_db == 0.0 {
            return 0.0;
        }
        scen.shadowing_sigma_db
            * (scen.shadowing_correlation.sqrt() * real.shadow_common[g]
                + (1.0 - scen.shadowing_correlation).sqrt() * real.shadow_private[h][g])
    };
    let power = |g: usize| -> f64 {
        let dx = real.bs.points[g][0] - pos[0];
        let dy = real.bs.points[g][1] - pos[1];
        let dist = (dx * dx + dy * dy).sqrt().max(scen.distance_clamp());
        scen.tx_power * 10f64.powf(gain_db(g, device) / 10.0) * dist.powf(-scen.pathloss_exponent)
    };
    let mut interference = 0.0;
    for g in 0..real.bs_count() {
        if g != bs && real.band_labels[g] == real.band_labels[bs] {
            interference += power(g);
        }
    }
    power(bs) / (interference + scen.noise_power)
}

#[test]
fn sinr_matches_straight_line_reference() {
    let scen = NetworkScenario {
        bs_density: 1e-4,
        noise_power: 1e-9,
        shadowing_sigma_db: 6.0,
        shadowing_correlation: 0.5,
        reuse_factor: 3,
        ell: 3,
        sinr_threshold: beta_from_db(-10.0),
        ..NetworkScenario::default()
    };
    // A window sized for roughly a hundred stations.
    let window = PppConfig::new(scen.bs_density, 560.0, [20.0, 0.0]).unwrap();
    let mut rng = locprob::rng::trial_rng(2024, 0);
    let real = Realization::generate_in_window(&scen, 40.0, &window, &mut rng).unwrap();
    assert!(real.bs_count() > 60, "want a substantial realization, got {}", real.bs_count());
    for device in 0..2 {
        let ranked = device_sinrs(&real, &scen, device);
        for &(bs, v) in &ranked {
            let reference = sinr_reference(&real, &scen, bs, device);
            let rel = (v - reference).abs() / reference.max(f64::MIN_POSITIVE);
            assert!(rel < 1e-12, "bs {bs} device {device}: {v} vs {reference} (rel {rel})");
            let direct = sinr(bs, device, &real, &scen);
            let rel = (direct - reference).abs() / reference.max(f64::MIN_POSITIVE);
            assert!(rel < 1e-12, "direct sinr mismatch at bs {bs}");
        }
        // Ranking really is by decreasing SINR.
        for w in ranked.windows(2) {
            assert!(w[0].1 >= w[1].1);
        }
    }
}

#[test]
fn hearability_profile_consistent_with_window_rules() {
    let scen = NetworkScenario { bs_density: 1e-4, ell: 2, ..NetworkScenario::default() };
    assert!(base_window_radius(&scen).unwrap() > 0.0);
    let (u, v) = locprob::propagation::joint_profiles(80.0, 9, &scen).unwrap();
    for p in [&u, &v] {
        assert_eq!(p.strongest_set.len(), 2);
        assert!(p.hearable_count <= p.per_bs_sinr.len());
        let recount = p.per_bs_sinr.iter().filter(|&&(_, s)| s >= scen.sinr_threshold).count();
        assert_eq!(recount, p.hearable_count);
    }
    let profile = hearability_profile(0, &Realization::generate(&scen, 80.0, 9).unwrap(), &scen);
    assert_eq!(profile.device_id, 0);
}
