//! Plane primitives used by construction procedures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Decision tolerance: degeneracy and branch discrimination.
pub const TOL_BRANCH: f64 = 1e-6;
/// Assertion tolerance.
pub const TOL_CHECK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub x: f64,
    pub y: f64,
}

impl GeoPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        GeoPoint { x, y }
    }

    pub fn sub(self, o: GeoPoint) -> GeoPoint {
        GeoPoint::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: GeoPoint) -> GeoPoint {
        GeoPoint::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, k: f64) -> GeoPoint {
        GeoPoint::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: GeoPoint) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: GeoPoint) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: GeoPoint) -> f64 {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate input")]
    DegenerateInput,
    #[error("no intersection")]
    NoIntersection,
    #[error("concentric coincident circles")]
    ConcentricCoincident,
}

/// Which of two intersection points to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

pub fn midpoint(p: GeoPoint, q: GeoPoint) -> GeoPoint {
    GeoPoint::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)
}

/// `p + t·(q−p)`.
pub fn towards(p: GeoPoint, q: GeoPoint, t: f64) -> GeoPoint {
    GeoPoint::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}

/// The point on ray a→b beyond b at distance `d` from b.
pub fn extend(a: GeoPoint, b: GeoPoint, d: f64) -> Result<GeoPoint, GeomError> {
    let v = b.sub(a);
    let n = v.norm();
    if n <= TOL_BRANCH || d <= 0.0 {
        return Err(GeomError::DegenerateInput);
    }
    Ok(b.add(v.scale(d / n)))
}

/// Intersection of circle (c1, |c1−t1|) with circle (c2, |c2−t2|).
/// `First` lies left of c1→c2.
pub fn circle_circle(
    c1: GeoPoint,
    t1: GeoPoint,
    c2: GeoPoint,
    t2: GeoPoint,
    which: Which,
) -> Result<GeoPoint, GeomError> {
    circle_circle_r(c1, c1.dist(t1), c2, c2.dist(t2), which)
}

pub fn circle_circle_r(c1: GeoPoint, r1: f64, c2: GeoPoint, r2: f64, which: Which) -> Result<GeoPoint, GeomError> {
    let v = c2.sub(c1);
    let d = v.norm();
    if d <= TOL_BRANCH {
        return Err(if (r1 - r2).abs() <= TOL_BRANCH {
            GeomError::ConcentricCoincident
        } else {
            GeomError::NoIntersection
        });
    }
    if d > r1 + r2 + TOL_BRANCH || d < (r1 - r2).abs() - TOL_BRANCH {
        return Err(GeomError::NoIntersection);
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = v.scale(1.0 / d);
    let base = c1.add(u.scale(a));
    let left = GeoPoint::new(-u.y, u.x);
    Ok(match which {
        Which::First => base.add(left.scale(h)),
        Which::Second => base.sub(left.scale(h)),
    })
}

/// Intersection of line p q with circle (c, r). `First` is the one farther
/// along p→q.
pub fn line_circle(p: GeoPoint, q: GeoPoint, c: GeoPoint, r: f64, which: Which) -> Result<GeoPoint, GeomError> {
    let v = q.sub(p);
    let n = v.norm();
    if n <= TOL_BRANCH {
        return Err(GeomError::DegenerateInput);
    }
    let u = v.scale(1.0 / n);
    let foot = p.add(u.scale(c.sub(p).dot(u)));
    let h2 = r * r - foot.dist(c).powi(2);
    if h2 < -TOL_BRANCH * (1.0 + r * r) {
        return Err(GeomError::NoIntersection);
    }
    let h = h2.max(0.0).sqrt();
    Ok(match which {
        Which::First => foot.add(u.scale(h)),
        Which::Second => foot.sub(u.scale(h)),
    })
}

pub fn line_line(p1: GeoPoint, q1: GeoPoint, p2: GeoPoint, q2: GeoPoint) -> Result<GeoPoint, GeomError> {
    let (v, w) = (q1.sub(p1), q2.sub(p2));
    if v.norm() <= TOL_BRANCH || w.norm() <= TOL_BRANCH {
        return Err(GeomError::DegenerateInput);
    }
    let den = v.cross(w);
    if den.abs() <= TOL_BRANCH * v.norm() * w.norm() {
        return Err(GeomError::NoIntersection);
    }
    let t = p2.sub(p1).cross(w) / den;
    Ok(p1.add(v.scale(t)))
}

/// Signed doubled area of (a, b, c).
pub fn area2(a: GeoPoint, b: GeoPoint, c: GeoPoint) -> f64 {
    b.sub(a).cross(c.sub(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt() -> impl Strategy<Value = GeoPoint> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| GeoPoint::new(x, y))
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(midpoint(GeoPoint::new(2., 5.), GeoPoint::new(4., 11.)), GeoPoint::new(3., 8.));
        assert_eq!(midpoint(GeoPoint::new(0., 0.), GeoPoint::new(0., 0.)), GeoPoint::new(0., 0.));
        let m = midpoint(GeoPoint::new(8., 2.), GeoPoint::new(27.6, 9.));
        assert!(m.dist(GeoPoint::new(17.8, 5.5)) < 1e-12);
    }

    #[test]
    fn towards_examples() {
        let (p, q) = (GeoPoint::new(8., 2.), GeoPoint::new(22., 7.));
        assert!(towards(p, q, 0.7).dist(GeoPoint::new(17.8, 5.5)) < 1e-12);
        assert_eq!(towards(p, q, 0.0), p);
        assert_eq!(towards(p, q, 1.0), q);
    }

    #[test]
    fn extend_examples() {
        let w = extend(GeoPoint::new(0., 0.), GeoPoint::new(1., 0.), 1.0).unwrap();
        assert_eq!(w, GeoPoint::new(2., 0.));
        let (a, b) = (GeoPoint::new(8., 2.), GeoPoint::new(17.8, 5.5));
        assert!(extend(a, b, a.dist(b)).unwrap().dist(GeoPoint::new(27.6, 9.)) < 1e-12);
        assert_eq!(extend(a, a, 1.0), Err(GeomError::DegenerateInput));
    }

    #[test]
    fn circle_circle_examples() {
        let (o, t) = (GeoPoint::new(0., 0.), GeoPoint::new(2., 0.));
        let s3 = 3f64.sqrt();
        let f = circle_circle(o, t, t, o, Which::First).unwrap();
        let s = circle_circle(o, t, t, o, Which::Second).unwrap();
        assert!(f.dist(GeoPoint::new(1., s3)) < 1e-12);
        assert!(s.dist(GeoPoint::new(1., -s3)) < 1e-12);
        let r = circle_circle(o, GeoPoint::new(1., 0.), GeoPoint::new(3., 0.), GeoPoint::new(4., 0.), Which::First);
        assert_eq!(r, Err(GeomError::NoIntersection));
        assert_eq!(circle_circle(o, t, o, t, Which::First), Err(GeomError::ConcentricCoincident));
    }

    #[test]
    fn line_intersections() {
        let x = line_line(
            GeoPoint::new(0., 0.),
            GeoPoint::new(2., 2.),
            GeoPoint::new(0., 2.),
            GeoPoint::new(2., 0.),
        )
        .unwrap();
        assert!(x.dist(GeoPoint::new(1., 1.)) < 1e-12);
        let (p, q, c) = (GeoPoint::new(-5., 0.), GeoPoint::new(0., 0.), GeoPoint::new(1., 0.));
        assert!(line_circle(p, q, c, 2.0, Which::First).unwrap().dist(GeoPoint::new(3., 0.)) < 1e-12);
        assert!(line_circle(p, q, c, 2.0, Which::Second).unwrap().dist(GeoPoint::new(-1., 0.)) < 1e-12);
        assert_eq!(line_circle(p, q, GeoPoint::new(0., 5.), 1.0, Which::First), Err(GeomError::NoIntersection));
    }

    proptest! {
        #[test]
        fn midpoint_is_equidistant_and_collinear(p in pt(), q in pt()) {
            let m = midpoint(p, q);
            prop_assert!((m.dist(p) - m.dist(q)).abs() <= TOL_CHECK * (1.0 + p.dist(q)));
            prop_assert!(area2(p, m, q).abs() / 2.0 <= TOL_CHECK * p.dist(q).powi(2).max(1.0));
        }

        #[test]
        fn extend_is_strictly_beyond(a in pt(), b in pt(), d in 0.01..40.0f64) {
            prop_assume!(a.dist(b) > 0.1);
            let w = extend(a, b, d).unwrap();
            prop_assert!((b.dist(w) - d).abs() <= TOL_CHECK * (1.0 + d));
            prop_assert!(b.sub(a).cross(w.sub(a)).abs() <= TOL_CHECK * b.dist(a) * w.dist(a) * 10.0);
            prop_assert!(b.sub(a).dot(w.sub(b)) > 0.0);
        }

        #[test]
        fn circle_points_lie_on_both(c1 in pt(), c2 in pt(), k1 in 0.55..3.0f64, k2 in 0.55..3.0f64) {
            let d = c1.dist(c2);
            prop_assume!(d > 0.1);
            let (r1, r2) = (k1 * d, k2 * d);
            prop_assume!(r1 + r2 > d * 1.01 && (r1 - r2).abs() < d * 0.99);
            let f = circle_circle_r(c1, r1, c2, r2, Which::First).unwrap();
            let s = circle_circle_r(c1, r1, c2, r2, Which::Second).unwrap();
            for x in [f, s] {
                let tol = TOL_CHECK * (1.0 + r1 + r2) * 10.0;
                prop_assert!((x.dist(c1) - r1).abs() <= tol);
                prop_assert!((x.dist(c2) - r2).abs() <= tol);
            }
            prop_assert!(c2.sub(c1).cross(f.sub(c1)) > 0.0);
            prop_assert!(c2.sub(c1).cross(s.sub(c1)) < 0.0);
        }
    }
}
