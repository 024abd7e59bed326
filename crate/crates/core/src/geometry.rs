use serde::{Deserialize, Serialize};

/// A point in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Linear interpolation: `self + s * (other - self)`.
    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(self.x + s * (other.x - self.x), self.y + s * (other.y - self.y))
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

/// Closed disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist_sq(self.center) <= self.radius * self.radius
    }
}

/// Segment thickened by `radius` (rectangle with semicircular caps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub from: Point,
    pub to: Point,
    pub radius: f64,
}

impl Capsule {
    pub fn new(from: Point, to: Point, radius: f64) -> Self {
        Self { from, to, radius }
    }

    pub fn contains(&self, p: Point) -> bool {
        segment_dist_sq(p, self.from, self.to) <= self.radius * self.radius
    }
}

/// Squared distance from `p` to the segment `a..b`.
pub fn segment_dist_sq(p: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let len_sq = abx * abx + aby * aby;
    if len_sq == 0.0 {
        return p.dist_sq(a);
    }
    let s = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq).clamp(0.0, 1.0);
    p.dist_sq(a.lerp(b, s))
}

/// Position of `p` along the axis `a -> b` (0 at `a`, 1 at `b`) and its
/// perpendicular distance from the infinite line through both.
pub fn axis_coords(p: Point, a: Point, b: Point) -> (f64, f64) {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let len_sq = abx * abx + aby * aby;
    let s = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq;
    let lateral = ((p.x - a.x) * aby - (p.y - a.y) * abx).abs() / len_sq.sqrt();
    (s, lateral)
}
