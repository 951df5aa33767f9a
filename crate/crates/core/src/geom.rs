//! Small plane-geometry helpers over `[f64; 2]`.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Rotation by `angle` counter-clockwise.
#[inline]
pub fn rotate(a: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c * a[0] - s * a[1], s * a[0] + c * a[1]]
}

/// Distance from `p` to the closed segment `[a, b]`, and the segment
/// parameter of the closest point.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> (f64, f64) {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let s = if len2 == 0.0 { 0.0 } else { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) };
    (dist(p, lerp(a, b, s)), s)
}

/// Axis-aligned rectangle `[min[0], max[0]] × [min[1], max[1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    /// The square `[-h, h]²`.
    pub fn square(h: f64) -> Self {
        Rect { min: [-h, -h], max: [h, h] }
    }

    pub fn centered(center: Point, half: f64) -> Self {
        Rect { min: [center[0] - half, center[1] - half], max: [center[0] + half, center[1] + half] }
    }

    pub fn is_valid(&self) -> bool {
        self.min.iter().chain(&self.max).all(|v| v.is_finite())
            && self.min[0] < self.max[0]
            && self.min[1] < self.max[1]
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    /// Signed distance-like function: negative inside, positive outside,
    /// zero on the boundary (max-norm distance to the boundary).
    pub fn signed_exit(&self, p: Point) -> f64 {
        let dx = (self.min[0] - p[0]).max(p[0] - self.max[0]);
        let dy = (self.min[1] - p[1]).max(p[1] - self.max[1]);
        dx.max(dy)
    }

    pub fn center(&self) -> Point {
        [(self.min[0] + self.max[0]) / 2.0, (self.min[1] + self.max[1]) / 2.0]
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    /// Node `(i, j)` of an `n × n` grid including the boundary.
    pub fn grid_point(&self, n: usize, i: usize, j: usize) -> Point {
        let t = |k: usize| if n <= 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
        [self.min[0] + t(i) * self.width(), self.min[1] + t(j) * self.height()]
    }
}

/// A region used for exit detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { center: Point, radius: f64 },
    Box { rect: Rect },
}

impl Region {
    /// Negative strictly inside, zero on the boundary, positive outside.
    pub fn level(&self, p: Point) -> f64 {
        match self {
            Region::Ball { center, radius } => dist(p, *center) - radius,
            Region::Box { rect } => rect.signed_exit(p),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.level(p) <= 0.0
    }
}
