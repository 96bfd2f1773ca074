use locprob::analytic::mc::mc_reuse_paired_sweep;
use locprob::analytic::p_loc_reuse;
use locprob::propagation::{beta_from_db, NetworkScenario};

fn crossing(betas_db: &[f64], vals: &[f64]) -> Option<f64> {
    for w in betas_db.windows(2).zip(vals.windows(2)) {
        let ((b0, b1), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        if (v0 - 0.5) * (v1 - 0.5) <= 0.0 && v0 != v1 {
            return Some(b0 + (0.5 - v0) / (v1 - v0) * (b1 - b0));
        }
    }
    None
}

fn main() {
    let lambda0 = 2.0 / (3.0f64.sqrt() * 500.0 * 500.0);
    let trials = 100_000;
    let betas_db: Vec<f64> = (0..=56).map(|i| -20.0 + 0.5 * i as f64).collect();
    let betas: Vec<f64> = betas_db.iter().map(|&db| beta_from_db(db)).collect();
    let scen = NetworkScenario {
        bs_density: lambda0,
        shadowing_sigma_db: 8.0,
        shadowing_correlation: 0.5,
        reuse_factor: 3,
        ell: 3,
        ..NetworkScenario::default()
    };
    let paired = mc_reuse_paired_sweep(&scen, 10.0, &betas, trials, 99).unwrap();
    let nc_truth: Vec<f64> = paired.reuse.iter().map(|p| p.p_loc_noncollab.value).collect();
    let c_truth: Vec<f64> = paired.reuse.iter().map(|p| p.p_loc_collab.value).collect();
    let nc_formula: Vec<f64> = paired.reuse.iter().map(|p| p_loc_reuse(&p.hear_u, &p.hear_v, 3).noncollaborative.value).collect();
    let c_formula: Vec<f64> = paired.reuse.iter().map(|p| p_loc_reuse(&p.hear_u, &p.hear_v, 3).collaborative.value).collect();
    println!("truth:   nc50 {:?} c50 {:?}", crossing(&betas_db, &nc_truth), crossing(&betas_db, &c_truth));
    println!("formula: nc50 {:?} c50 {:?}", crossing(&betas_db, &nc_formula), crossing(&betas_db, &c_formula));
    for i in (24..=40).step_by(4) {
        println!(
            "  beta {:>5.1}: truth nc {:.3} c {:.3} | formula c {:.3} (diff {:+.3})",
            betas_db[i], nc_truth[i], c_truth[i], c_formula[i], c_formula[i] - c_truth[i]
        );
    }
}
