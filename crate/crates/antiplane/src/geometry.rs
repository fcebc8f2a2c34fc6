//! Small 2D vector type and convex-set distance helpers.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Rotation by +60 degrees.
    pub fn rot60(self) -> Vec2 {
        let (c, s) = (0.5, 3f64.sqrt() / 2.0);
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Distance from a point to a closed segment.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Collinear overlaps are caught by the distance fallback returning 0.
    false
}

/// Distance between two closed segments.
pub fn segment_segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn point_in_convex_hull(p: Vec2, hull: &[Vec2]) -> bool {
    match hull.len() {
        0 => false,
        1 => (p - hull[0]).norm() == 0.0,
        2 => point_segment_distance(p, hull[0], hull[1]) == 0.0,
        _ => {
            let mut sign = 0.0f64;
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                let c = (b - a).cross(p - a);
                if c != 0.0 {
                    if sign == 0.0 {
                        sign = c.signum();
                    } else if sign != c.signum() {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Euclidean distance between the convex hulls of two point sets
/// (each with 1 to 3 points: a site, a bond or a filled cell).
pub fn convex_distance(a: &[Vec2], b: &[Vec2]) -> f64 {
    // Overlap tests.
    for &p in a {
        if point_in_convex_hull(p, b) {
            return 0.0;
        }
    }
    for &p in b {
        if point_in_convex_hull(p, a) {
            return 0.0;
        }
    }
    let edges = |set: &[Vec2]| -> Vec<(Vec2, Vec2)> {
        match set.len() {
            0 | 1 => vec![],
            2 => vec![(set[0], set[1])],
            n => (0..n).map(|i| (set[i], set[(i + 1) % n])).collect(),
        }
    };
    for (p, q) in edges(a) {
        for (r, s) in edges(b) {
            if segments_intersect(p, q, r, s) {
                return 0.0;
            }
        }
    }
    // Disjoint convex sets: the minimum is attained vertex-to-edge or
    // vertex-to-vertex.
    let mut best = f64::INFINITY;
    for &p in a {
        for &q in b {
            best = best.min((p - q).norm());
        }
        for (r, s) in edges(b) {
            best = best.min(point_segment_distance(p, r, s));
        }
    }
    for &q in b {
        for (r, s) in edges(a) {
            best = best.min(point_segment_distance(q, r, s));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_segment_basics() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(2.0, 0.0);
        assert_eq!(point_segment_distance(Vec2::new(1.0, 1.0), a, b), 1.0);
        assert_eq!(point_segment_distance(Vec2::new(-1.0, 0.0), a, b), 1.0);
        assert_eq!(point_segment_distance(Vec2::new(3.0, 0.0), a, b), 1.0);
    }

    #[test]
    fn convex_distance_triangles() {
        let t1 = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, 0.8),
        ];
        let t2 = [
            Vec2::new(3.0, 0.0),
            Vec2::new(4.0, 0.0),
            Vec2::new(3.5, 0.8),
        ];
        assert!((convex_distance(&t1, &t2) - 2.0).abs() < 1e-14);
        assert_eq!(convex_distance(&t1, &t1), 0.0);
    }

    #[test]
    fn convex_distance_overlapping() {
        let t1 = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 2.0),
        ];
        let inner = [Vec2::new(1.0, 0.5)];
        assert_eq!(convex_distance(&t1, &inner), 0.0);
    }

    #[test]
    fn rot60_is_sixth_root() {
        let v = Vec2::new(1.0, 0.0);
        let mut w = v;
        for _ in 0..6 {
            w = w.rot60();
        }
        assert!((w - v).norm() < 1e-14);
    }
}
