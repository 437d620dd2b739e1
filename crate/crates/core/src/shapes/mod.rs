//! Shape contours: construction, normalization onto the reference domain,
//! arc-length resampling, augmentation and the brute-force signed distance.

mod generate;
mod raster;

pub use generate::{generate_shape, ShapeKind};
pub use raster::{extract_contour, pixel_to_domain, rasterize, RasterImage};

use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};
use crate::geometry::{self, Point};

/// Maximum point radius after [`normalize_contour`].
pub const NORMALIZED_RADIUS: f64 = 0.7;

/// Minimum number of samples a contour needs before it is handed to the
/// solvers.
pub const MIN_SOLVER_POINTS: usize = 16;

/// Closed polyline; the last point connects back to the first.
///
/// Construction only requires a non-degenerate polygon (three or more finite
/// points, no repeated consecutive point). The stricter sampling requirement
/// used by the solvers is checked by [`Contour::check_solver_ready`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Contour {
    points: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Contour {
    type Error = PfsdmError;
    fn try_from(points: Vec<Point>) -> Result<Self> {
        Contour::new(points)
    }
}

impl From<Contour> for Vec<Point> {
    fn from(c: Contour) -> Self {
        c.points
    }
}

impl Contour {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(PfsdmError::InvalidContour(format!(
                "a closed contour needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(PfsdmError::InvalidContour(format!("point {i} is not finite")));
        }
        let n = points.len();
        for i in 0..n {
            if points[i] == points[(i + 1) % n] {
                return Err(PfsdmError::InvalidContour(format!(
                    "points {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        Self::new(xy.iter().map(|&p| p.into()).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        geometry::signed_area(&self.points)
    }

    pub fn perimeter(&self) -> f64 {
        geometry::perimeter(&self.points)
    }

    pub fn centroid(&self) -> Option<Point> {
        geometry::area_centroid(&self.points)
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// True when every point lies strictly inside `(-1, 1)^2`.
    pub fn inside_domain(&self) -> bool {
        self.points.iter().all(|p| p.x.abs() < 1.0 && p.y.abs() < 1.0)
    }

    pub fn contains(&self, q: Point) -> bool {
        geometry::contains_even_odd(&self.points, q)
    }

    /// Checks the sampling and domain requirements of the PDE and deformation
    /// solvers.
    pub fn check_solver_ready(&self) -> Result<()> {
        if self.len() < MIN_SOLVER_POINTS {
            return Err(PfsdmError::InvalidContour(format!(
                "solvers need at least {MIN_SOLVER_POINTS} contour points, got {}",
                self.len()
            )));
        }
        if !self.inside_domain() {
            return Err(PfsdmError::OutOfDomain(
                "contour is not strictly inside (-1,1)^2".into(),
            ));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(Point) -> Point) -> Vec<Point> {
        self.points.iter().map(|&p| f(p)).collect()
    }
}

/// Translates the area centroid to the origin, scales the maximum radius to
/// [`NORMALIZED_RADIUS`] and forces counterclockwise order.
pub fn normalize_contour(c: &Contour) -> Result<Contour> {
    let centroid = c
        .centroid()
        .ok_or_else(|| PfsdmError::DegenerateShape("contour encloses zero area".into()))?;
    let shifted = c.map(|p| p - centroid);
    let rmax = shifted.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if rmax <= 0.0 || !rmax.is_finite() {
        return Err(PfsdmError::DegenerateShape("zero extent".into()));
    }
    let s = NORMALIZED_RADIUS / rmax;
    let mut points: Vec<Point> = shifted.into_iter().map(|p| p * s).collect();
    if geometry::signed_area(&points) < 0.0 {
        points.reverse();
    }
    Contour::new(points)
}

/// Resamples `c` to `m` points equally spaced in arc length.
///
/// The first output point is the input vertex with the lexicographically
/// smallest `(y, x)`, which makes the result independent of where the input
/// polyline started.
pub fn resample_contour(c: &Contour, m: usize) -> Result<Contour> {
    if m < MIN_SOLVER_POINTS {
        return Err(PfsdmError::InvalidContour(format!(
            "resampling needs at least {MIN_SOLVER_POINTS} points, got {m}"
        )));
    }
    let pts = c.points();
    let n = pts.len();
    let start = (0..n)
        .min_by(|&i, &j| {
            let (a, b) = (pts[i], pts[j]);
            a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x))
        })
        .unwrap_or(0);
    let ring: Vec<Point> = (0..n).map(|k| pts[(start + k) % n]).collect();
    let seg_len: Vec<f64> = (0..n).map(|k| ring[k].distance(ring[(k + 1) % n])).collect();
    let total: f64 = seg_len.iter().sum();
    let step = total / m as f64;

    let mut out = Vec::with_capacity(m);
    out.push(ring[0]);
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    for k in 1..m {
        let target = step * k as f64;
        while seg + 1 < n && seg_start + seg_len[seg] < target {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let t = ((target - seg_start) / seg_len[seg]).clamp(0.0, 1.0);
        let a = ring[seg];
        let b = ring[(seg + 1) % n];
        out.push(a + (b - a) * t);
    }
    Contour::new(out)
}

/// Rigid-plus-scale augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    /// Counterclockwise rotation about the origin, radians.
    pub rotation: f64,
    pub translation: (f64, f64),
    pub scale: f64,
    /// Mirror across the x-axis before rotating.
    pub reflect: bool,
    /// Seed the parameters were drawn with.
    pub seed: u64,
}

impl AugmentParams {
    pub fn identity() -> Self {
        Self {
            rotation: 0.0,
            translation: (0.0, 0.0),
            scale: 1.0,
            reflect: false,
            seed: 0,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let p = if self.reflect { Point::new(p.x, -p.y) } else { p };
        let p = p.rotated(self.rotation) * self.scale;
        p + Point::new(self.translation.0, self.translation.1)
    }
}

/// Applies reflection, rotation, scaling and translation, in that order.
pub fn augment(c: &Contour, params: &AugmentParams) -> Result<Contour> {
    if !(params.scale > 0.0) || !params.scale.is_finite() {
        return Err(PfsdmError::InvalidConfig(format!(
            "augmentation scale must be positive, got {}",
            params.scale
        )));
    }
    let mut points = c.map(|p| params.apply(p));
    if params.reflect {
        // Mirroring flips orientation; keep the winding of the input.
        points.reverse();
        let last = points.pop().expect("non-empty");
        points.insert(0, last);
    }
    if let Some(p) = points.iter().find(|p| p.x.abs() >= 1.0 || p.y.abs() >= 1.0) {
        return Err(PfsdmError::OutOfDomain(format!(
            "augmented point ({}, {}) escapes the domain",
            p.x, p.y
        )));
    }
    Contour::new(points)
}

/// Brute-force signed distance from `q` to the contour polygon: the minimum
/// segment distance, negative inside (even-odd rule) and positive outside.
pub fn signed_distance_oracle(q: Point, c: &Contour) -> f64 {
    let pts = c.points();
    let n = pts.len();
    let d = (0..n)
        .map(|i| geometry::segment_distance(q, pts[i], pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min);
    if d > 0.0 && c.contains(q) {
        -d
    } else {
        d
    }
}
