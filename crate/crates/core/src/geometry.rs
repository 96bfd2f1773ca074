//! Exact planar geometry primitives for the set-overlap integrands: lune
//! area, circle-intersection area, and the arc-angle helper `phi_range`.
//!
//! Everything here is dimensionless; "length units" are a documentation
//! convention only, since all downstream results depend on density-scaled
//! ratios.

use std::f64::consts::PI;

use crate::error::Error;
use crate::Result;

/// Two circles: radius `r_u` around one center, radius `r_v` around another,
/// centers separated by `d`. Constructed through [`CirclePair::new`], which
/// enforces finite, strictly positive radii and a non-negative separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePair {
    pub(crate) r_u: f64,
    pub(crate) r_v: f64,
    pub(crate) d: f64,
}

/// Mutual position of the two circles. A pure function of `(r_u, r_v, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlap {
    /// `d >= r_u + r_v`: interiors share no point.
    Disjoint,
    /// `d <= |r_u - r_v|`: the smaller circle lies inside the larger.
    Contained,
    /// Anything else: the boundaries cross in two points.
    Partial,
}

impl CirclePair {
    pub fn new(r_u: f64, r_v: f64, d: f64) -> Result<Self> {
        if !(r_u.is_finite() && r_v.is_finite() && d.is_finite()) {
            return Err(Error::domain(format!(
                "circle pair must be finite, got r_u={r_u}, r_v={r_v}, d={d}"
            )));
        }
        if r_u <= 0.0 || r_v <= 0.0 {
            return Err(Error::domain(format!(
                "radii must be strictly positive, got r_u={r_u}, r_v={r_v}"
            )));
        }
        if d < 0.0 {
            return Err(Error::domain(format!("separation must be non-negative, got d={d}")));
        }
        Ok(CirclePair { r_u, r_v, d })
    }

    pub fn overlap(&self) -> Overlap {
        if self.d >= self.r_u + self.r_v {
            Overlap::Disjoint
        } else if self.d <= (self.r_u - self.r_v).abs() {
            Overlap::Contained
        } else {
            Overlap::Partial
        }
    }

    /// The pair with the roles of the two circles swapped.
    pub fn swapped(&self) -> CirclePair {
        CirclePair { r_u: self.r_v, r_v: self.r_u, d: self.d }
    }

    pub fn r_u(&self) -> f64 {
        self.r_u
    }

    pub fn r_v(&self) -> f64 {
        self.r_v
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// Principal-branch inverse secant, `asec(x) = acos(1/x)` with range [0, pi].
///
/// Valid for `|x| >= 1`; the reciprocal is clamped into [-1, 1] to absorb
/// floating-point drift when the closed form is evaluated right at a regime
/// boundary. `x = +-inf` maps to `pi/2`, which is the correct limit.
fn asec(x: f64) -> f64 {
    (1.0 / x).clamp(-1.0, 1.0).acos()
}

/// Area of the part of the `r_u`-circle lying outside the `r_v`-circle.
///
/// The partial-overlap branch is the closed form with one square-root term
/// and two inverse-secant terms; the degenerate regimes (disjoint,
/// containment) are handled by explicit case analysis because the
/// square-root term is imaginary outside partial overlap.
pub fn lune_area(p: CirclePair) -> f64 {
    let CirclePair { r_u, r_v, d } = p;
    match p.overlap() {
        Overlap::Disjoint => PI * r_u * r_u,
        Overlap::Contained => {
            if r_u <= r_v {
                0.0
            } else {
                PI * (r_u * r_u - r_v * r_v)
            }
        }
        Overlap::Partial => {
            let root = (r_u + r_v + d) * (r_v + d - r_u) * (d + r_u - r_v) * (r_u + r_v - d);
            // Non-negative in the partial regime; guard rounding at the edges.
            let sqrt_term = 0.5 * root.max(0.0).sqrt();
            let term_u = r_u * r_u * asec(2.0 * d * r_u / (r_v * r_v - r_u * r_u - d * d));
            let term_v = r_v * r_v * asec(2.0 * d * r_v / (r_v * r_v + d * d - r_u * r_u));
            (sqrt_term + term_u - term_v).clamp(0.0, PI * r_u * r_u)
        }
    }
}

/// Area of the intersection of the two circles: `pi r_u^2 - lune_area`.
/// Symmetric in `(r_u, r_v)`.
pub fn intersection_area(p: CirclePair) -> f64 {
    PI * p.r_u * p.r_u - lune_area(p)
}

/// Arc angle, in radians, of the perimeter of a circle of radius `x`
/// (centered at distance `d` from the reference point) that lies inside the
/// circle of radius `r` around the reference point:
/// `2 acos((d^2 + x^2 - r^2) / (2 d x))`.
///
/// The circles must actually intersect: `|d - x| <= r <= d + x`, up to a
/// small relative tolerance that absorbs floating-point drift at the
/// integration limits where the configuration is tangent.
pub fn phi_range(d: f64, r: f64, x: f64) -> Result<f64> {
    if !(d > 0.0 && r > 0.0 && x > 0.0) || !(d.is_finite() && r.is_finite() && x.is_finite()) {
        return Err(Error::domain(format!(
            "phi_range needs positive finite lengths, got d={d}, r={r}, x={x}"
        )));
    }
    let arg = (d * d + x * x - r * r) / (2.0 * d * x);
    let tol = 1e-9;
    if arg > 1.0 + tol || arg < -1.0 - tol {
        return Err(Error::domain(format!(
            "circles do not intersect: d={d}, r={r}, x={x} (cos argument {arg})"
        )));
    }
    Ok(2.0 * arg.clamp(-1.0, 1.0).acos())
}

/// [`phi_range`] without the intersection check, for integrands whose
/// integration limits guarantee a valid configuration by construction.
pub(crate) fn phi_range_unchecked(d: f64, r: f64, x: f64) -> f64 {
    let arg = (d * d + x * x - r * r) / (2.0 * d * x);
    2.0 * arg.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::circle_intersection_area_ref;
    use approx::assert_relative_eq;

    #[test]
    fn lune_disjoint_is_full_circle() {
        let p = CirclePair::new(1.0, 1.0, 3.0).unwrap();
        assert_eq!(p.overlap(), Overlap::Disjoint);
        assert_relative_eq!(lune_area(p), PI, max_relative = 1e-14);
    }

    #[test]
    fn lune_contained_is_zero_or_annulus() {
        let inside = CirclePair::new(1.0, 2.0, 0.0).unwrap();
        assert_eq!(inside.overlap(), Overlap::Contained);
        assert_eq!(lune_area(inside), 0.0);

        let around = CirclePair::new(2.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(lune_area(around), PI * (4.0 - 1.0), max_relative = 1e-14);
    }

    #[test]
    fn lune_partial_matches_independent_oracle() {
        // Unit circles at unit separation: intersection is
        // 2 acos(1/2) - (1/2) sqrt(3), lune is pi minus that.
        let p = CirclePair::new(1.0, 1.0, 1.0).unwrap();
        let expected_intersection = 2.0 * (0.5f64).acos() - 0.5 * 3.0f64.sqrt();
        assert_relative_eq!(intersection_area(p), expected_intersection, max_relative = 1e-12);
        assert_relative_eq!(lune_area(p), PI - expected_intersection, max_relative = 1e-12);
        assert_relative_eq!(lune_area(p), 1.913_222_954_981_037, max_relative = 1e-12);
        assert_relative_eq!(
            intersection_area(p),
            circle_intersection_area_ref(1.0, 1.0, 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_area(CirclePair::new(1.0, 1.0, 3.0).unwrap()), 0.0);
        assert_relative_eq!(
            intersection_area(CirclePair::new(1.0, 2.0, 0.0).unwrap()),
            PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            intersection_area(CirclePair::new(1.0, 1.0, 1.0).unwrap()),
            1.228_369_698_608_757,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(CirclePair::new(0.0, 1.0, 1.0).is_err());
        assert!(CirclePair::new(1.0, -1.0, 1.0).is_err());
        assert!(CirclePair::new(1.0, 1.0, -0.5).is_err());
        assert!(CirclePair::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(CirclePair::new(1.0, f64::INFINITY, 1.0).is_err());
    }

    /// Measures the angular extent of the perimeter of the circle of radius
    /// `x` around `(d, 0)` lying inside the circle of radius `r` around the
    /// origin, by scanning for boundary crossings and bisecting each one.
    /// Independent of the closed form under test.
    fn measured_arc_angle(d: f64, r: f64, x: f64) -> f64 {
        let inside = |phi: f64| {
            let px = d + x * phi.cos();
            let py = x * phi.sin();
            px * px + py * py <= r * r
        };
        let n = 200_000;
        let step = 2.0 * PI / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let (mut a, mut b) = (i as f64 * step, (i + 1) as f64 * step);
            let (ia, ib) = (inside(a), inside(b));
            if ia && ib {
                total += step;
            } else if ia != ib {
                // Bisect the crossing, then add the inside part.
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if inside(mid) == ia {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                let cross = 0.5 * (a + b);
                total += if ia { cross - i as f64 * step } else { (i + 1) as f64 * step - cross };
            }
        }
        total
    }

    #[test]
    fn phi_range_examples() {
        // Equilateral configuration.
        assert_relative_eq!(phi_range(1.0, 1.0, 1.0).unwrap(), 2.0 * PI / 3.0, max_relative = 1e-14);
        // Internally tangent.
        assert_relative_eq!(phi_range(2.0, 1.0, 1.0).unwrap(), 0.0, epsilon = 1e-7);
        // Generic configuration against the measured arc.
        let got = phi_range(1.0, 1.2, 0.5).unwrap();
        assert_relative_eq!(got, measured_arc_angle(1.0, 1.2, 0.5), max_relative = 1e-9);
        assert_relative_eq!(got, 3.523_92, max_relative = 1e-5);
    }

    #[test]
    fn phi_range_matches_measured_arc_on_grid() {
        for &(d, r, x) in
            &[(1.0, 0.8, 0.5), (2.0, 1.5, 1.0), (0.7, 1.0, 0.4), (1.0, 1.0, 1.9), (3.0, 2.2, 1.4)]
        {
            let got = phi_range(d, r, x).unwrap();
            assert_relative_eq!(got, measured_arc_angle(d, r, x), max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn phi_range_rejects_non_intersecting() {
        assert!(phi_range(5.0, 1.0, 1.0).is_err());
        assert!(phi_range(1.0, 10.0, 0.5).is_err());
        assert!(phi_range(0.0, 1.0, 1.0).is_err());
    }
}
