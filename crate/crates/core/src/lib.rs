//! Push-forward signed distance morphometric (PF-SDM).
//!
//! The pipeline turns a closed contour into a polynomial solution of the
//! viscous Eikonal equation, pulls that field back onto the unit disk with a
//! polynomial deformation map, and compares shapes through the angular
//! moments of the pulled-back field's curvature.
//!
//! ```text
//! Contour --solve_eikonal--> SdfModel --fit_deformation--> PfSdfField
//!         --angular_moments--> MomentCurves --distance_matrix--> DistanceMatrix
//! ```

pub mod analysis;
pub mod eikonal;
pub mod error;
pub mod geometry;
pub mod io;
pub mod moments;
pub mod polybasis;
pub mod pushforward;
pub mod rng;
pub mod shapes;

pub use error::{ErrorClass, PfsdmError, Result};
pub use geometry::Point;
