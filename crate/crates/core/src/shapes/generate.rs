use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{normalize_contour, Contour};
use crate::error::{PfsdmError, Result};
use crate::geometry::Point;
use crate::rng::SeededStream;

/// The five synthetic test families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Star,
    Ellipse,
    Circle,
    RoundedSquare,
    Folded,
}

impl ShapeKind {
    /// Canonical order S1..S5.
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Star,
        ShapeKind::Ellipse,
        ShapeKind::Circle,
        ShapeKind::RoundedSquare,
        ShapeKind::Folded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Star => "star",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Circle => "circle",
            ShapeKind::RoundedSquare => "rounded_square",
            ShapeKind::Folded => "folded",
        }
    }

    /// Class label `S1`..`S5`.
    pub fn label(self) -> &'static str {
        match self {
            ShapeKind::Star => "S1",
            ShapeKind::Ellipse => "S2",
            ShapeKind::Circle => "S3",
            ShapeKind::RoundedSquare => "S4",
            ShapeKind::Folded => "S5",
        }
    }

    fn point(self, t: f64) -> Point {
        let polar = |r: f64| Point::new(r * t.cos(), r * t.sin());
        match self {
            ShapeKind::Circle => polar(1.0),
            ShapeKind::Star => polar(1.0 + 0.35 * (5.0 * t).cos()),
            ShapeKind::Ellipse => Point::new(2.0 * t.cos(), 0.45 * t.sin()),
            ShapeKind::RoundedSquare => {
                // superellipse |x|^6 + |y|^6 = 1 in polar form
                let (s, c) = t.sin_cos();
                polar((c.abs().powi(6) + s.abs().powi(6)).powf(-1.0 / 6.0))
            }
            ShapeKind::Folded => {
                polar(1.0 + 0.25 * (3.0 * t).cos() + 0.15 * (2.0 * t + 0.8).sin())
            }
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = PfsdmError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "star" | "s1" => Ok(ShapeKind::Star),
            "ellipse" | "s2" => Ok(ShapeKind::Ellipse),
            "circle" | "s3" => Ok(ShapeKind::Circle),
            "rounded_square" | "s4" => Ok(ShapeKind::RoundedSquare),
            "folded" | "s5" => Ok(ShapeKind::Folded),
            _ => Err(PfsdmError::InvalidKind(s.to_string())),
        }
    }
}

/// Samples `m` points of the named family at uniform parameter steps and
/// normalizes the result.
///
/// Seed 0 starts sampling at parameter 0. Any other seed shifts the sampling
/// phase by a random fraction of one step, which moves the samples along the
/// curve without changing the shape.
pub fn generate_shape(kind: ShapeKind, m: usize, seed: u64) -> Result<Contour> {
    if m < 64 {
        return Err(PfsdmError::InvalidConfig(format!(
            "shape generation needs at least 64 points, got {m}"
        )));
    }
    let step = TAU / m as f64;
    let phase = if seed == 0 {
        0.0
    } else {
        SeededStream::new(seed).unit() * step
    };
    let points = (0..m).map(|k| kind.point(phase + step * k as f64)).collect();
    normalize_contour(&Contour::new(points)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("rounded-square".parse::<ShapeKind>().unwrap(), ShapeKind::RoundedSquare);
        assert_eq!("S1".parse::<ShapeKind>().unwrap(), ShapeKind::Star);
        assert!(matches!("blob".parse::<ShapeKind>(), Err(PfsdmError::InvalidKind(_))));
        for k in ShapeKind::ALL {
            assert_eq!(k.name().parse::<ShapeKind>().unwrap(), k);
        }
    }

    #[test]
    fn circle_radius() {
        let c = generate_shape(ShapeKind::Circle, 256, 0).unwrap();
        assert_eq!(c.len(), 256);
        for p in c.points() {
            assert!((p.norm() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn star_has_five_lobes() {
        let c = generate_shape(ShapeKind::Star, 256, 0).unwrap();
        // radius samples are ordered by angle since the star is star-shaped
        let r: Vec<f64> = c.points().iter().map(|p| p.norm()).collect();
        let n = r.len();
        let maxima = (0..n)
            .filter(|&i| {
                let d_prev = r[i] - r[(i + n - 1) % n];
                let d_next = r[(i + 1) % n] - r[i];
                d_prev > 0.0 && d_next <= 0.0
            })
            .count();
        assert_eq!(maxima, 5);
    }

    #[test]
    fn rounded_square_fourfold_symmetry() {
        let c = generate_shape(ShapeKind::RoundedSquare, 256, 0).unwrap();
        for p in c.points() {
            let q = p.rotated(std::f64::consts::FRAC_PI_2);
            let best = c.points().iter().map(|s| s.distance(q)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "{best}");
        }
    }

    #[test]
    fn all_kinds_normalized_and_deterministic() {
        for k in ShapeKind::ALL {
            let a = generate_shape(k, 128, 3).unwrap();
            let b = generate_shape(k, 128, 3).unwrap();
            assert_eq!(a, b);
            let c = a.centroid().unwrap();
            assert!(c.norm() < 1e-12);
            assert!((a.max_radius() - 0.7).abs() < 1e-12);
            assert!(a.is_counterclockwise());
            assert_ne!(a, generate_shape(k, 128, 4).unwrap());
        }
    }

    #[test]
    fn too_few_points() {
        assert!(generate_shape(ShapeKind::Circle, 32, 0).is_err());
    }
}
