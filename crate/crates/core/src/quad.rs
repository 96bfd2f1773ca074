//! Adaptive one-dimensional quadrature (Gauss-Kronrod 7-15).
//!
//! The multidimensional integrals in [`crate::analytic`] are evaluated as
//! nested one-dimensional integrals; adaptivity localizes refinement around
//! the mild kinks the integrands have where an inner integration interval
//! opens up. Panels are refined worst-error-first and the final value is
//! accumulated in interval order, so results are bit-stable for a given
//! integrand.

use std::cell::Cell;
use std::collections::BinaryHeap;

use crate::error::Error;
use crate::Result;

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Classic QUADPACK dqk15 constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_7,
    0.949_107_912_342_758_524_526_189_7,
    0.864_864_423_359_769_072_789_712_8,
    0.741_531_185_599_394_439_863_864_8,
    0.586_087_235_467_691_130_294_144_8,
    0.405_845_151_377_397_166_906_606_4,
    0.207_784_955_007_898_467_600_689_4,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_0,
    0.063_092_092_629_978_553_290_700_7,
    0.104_790_010_322_250_183_839_876_3,
    0.140_653_259_715_525_918_745_189_6,
    0.169_004_726_639_267_902_826_583_4,
    0.190_350_578_064_785_409_913_256_4,
    0.204_432_940_075_298_892_414_161_6,
    0.209_482_141_084_727_828_012_999_2,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_4,
    0.279_705_391_489_276_667_901_467_8,
    0.381_830_050_505_118_944_950_369_8,
    0.417_959_183_673_469_387_755_102_0,
];

/// Shared evaluation budget for (possibly nested) quadratures.
#[derive(Debug)]
pub struct EvalBudget {
    remaining: Cell<usize>,
}

impl EvalBudget {
    pub fn new(max_evaluations: usize) -> Self {
        EvalBudget { remaining: Cell::new(max_evaluations) }
    }

    /// Takes `n` evaluations from the budget; false when exhausted.
    fn take(&self, n: usize) -> bool {
        let left = self.remaining.get();
        if left < n {
            return false;
        }
        self.remaining.set(left - n);
        true
    }

    pub fn remaining(&self) -> usize {
        self.remaining.get()
    }
}

/// Value, error estimate and evaluation count of one integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap by error; NaN-free by construction.
        self.error.total_cmp(&other.error).then(self.a.total_cmp(&other.a))
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fsum = f(c - x) + f(c + x);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    let value = kronrod * h;
    // Standard QUADPACK error heuristic.
    let err = ((kronrod - gauss) * h).abs();
    let splittable = (b - a).abs() > 1e-14 * (a.abs() + b.abs() + 1.0);
    Panel { a, b, value, error: err, splittable }
}

/// Adaptively integrates `f` over `[a, b]` to the requested tolerances.
///
/// Returns `Error::Numerical` with the partial estimate when the evaluation
/// budget is exhausted before `total_error <= max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    budget: &EvalBudget,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if !(a < b) {
        return Err(Error::domain(format!("bad integration interval [{a}, {b}]")));
    }
    let start_budget = budget.remaining();
    if !budget.take(15) {
        return Err(Error::Numerical {
            message: "quadrature evaluation budget exhausted".into(),
            value: 0.0,
            error_bound: f64::INFINITY,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&mut f, a, b));
    let mut frozen: Vec<Panel> = Vec::new();
    let mut frozen_error = 0.0;

    loop {
        let total_value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + frozen.iter().map(|p| p.value).sum::<f64>();
        let total_error: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
        let target = abs_tol.max(rel_tol * total_value.abs());
        if total_error <= target || heap.is_empty() {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.extend(frozen);
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            let error = panels.iter().map(|p| p.error).sum();
            return Ok(QuadResult { value, error, evaluations: start_budget - budget.remaining() });
        }
        let worst = heap.pop().expect("non-empty");
        if !worst.splittable || !budget.take(30) {
            if !worst.splittable {
                frozen_error += worst.error;
                frozen.push(worst);
                continue;
            }
            // Budget exhausted: report the partial estimate.
            heap.push(worst);
            let value: f64 =
                heap.iter().map(|p| p.value).sum::<f64>() + frozen.iter().map(|p| p.value).sum::<f64>();
            let error = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
            return Err(Error::Numerical {
                message: "quadrature did not converge within the evaluation budget".into(),
                value,
                error_bound: error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gk15(&mut f, worst.a, mid));
        heap.push(gk15(&mut f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn quick(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> QuadResult {
        integrate(f, a, b, 1e-10, 1e-12, &EvalBudget::new(1_000_000)).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = quick(|x| 3.0 * x * x, 0.0, 2.0);
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let r = quick(|x| (10.0 * x).sin(), 0.0, PI);
        assert_relative_eq!(r.value, (1.0 - (10.0 * PI).cos()) / 10.0, epsilon = 1e-10);

        let r = quick(|x| (-(x * x) / 2.0).exp(), -8.0, 8.0);
        assert_relative_eq!(r.value, (2.0 * PI).sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn sqrt_endpoint_converges() {
        let r = quick(|x| x.sqrt(), 0.0, 1.0);
        assert_relative_eq!(r.value, 2.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn error_estimate_is_honest() {
        let r = quick(|x| (5.0 * x).cos() * x.exp(), 0.0, 3.0);
        let exact = (3.0f64.exp() * ((15.0f64).cos() + 5.0 * (15.0f64).sin()) - 1.0) / 26.0;
        assert!((r.value - exact).abs() <= r.error.max(1e-12) * 50.0 + 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let tight = EvalBudget::new(45);
        let err = integrate(|x| 1.0 / (1e-6 + x * x), 0.0, 1.0, 1e-14, 1e-16, &tight);
        match err {
            Err(Error::Numerical { value, error_bound, .. }) => {
                assert!(value.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|_| 1.0, 2.0, 2.0, 1e-6, 1e-9, &EvalBudget::new(100)).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
