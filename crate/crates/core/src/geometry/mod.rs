//! Planar polygon kernel.
//!
//! Coordinates are meters in a projected plane. Boolean operations run on an
//! integer grid (see [`SnapGrid`]); everything else works on `f64` directly.

mod area;
mod buffer;
mod contains;
pub mod estimate;
mod noding;
mod overlay;
mod snap;
mod validate;

use thiserror::Error;

use crate::projection::PlanePoint;
use crate::spatial_index::Rect;

pub use area::{multipolygon_area, polygon_area, ring_area};
pub use buffer::{buffer_disc, disc_area_factor, DiscSpec};
pub use contains::{contains, contains_even_odd, contains_on_grid, contains_winding};
pub use overlay::{boolean_op, union_all};
pub use validate::validate_multipolygon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ring has {distinct} distinct vertices, at least 3 are required")]
    DegenerateRing { distinct: usize },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("buffer radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("disc needs at least 3 segments, got {0}")]
    BadSegments(usize),
    #[error("snap grid resolution must be positive and finite, got {0}")]
    BadGrid(f64),
    #[error("coordinate {0} is not finite or exceeds the snap grid range")]
    CoordinateOutOfRange(f64),
    #[error("overlay failed to produce a consistent arrangement: {0}")]
    Topology(String),
}

/// Closed ring of vertices; the closing vertex is implicit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ring {
    pub vertices: Vec<PlanePoint>,
}

impl Ring {
    /// Wraps `vertices`, dropping an explicit closing vertex if present.
    pub fn new(mut vertices: Vec<PlanePoint>) -> Self {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Ring { vertices }
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Self {
        Ring::new(coords.iter().map(|&(x, y)| PlanePoint::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segments `(v[i], v[i+1])` including the closing one.
    pub fn edges(&self) -> impl Iterator<Item = (PlanePoint, PlanePoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> Ring {
        let mut v = self.vertices.clone();
        v.reverse();
        Ring { vertices: v }
    }

    pub fn bbox(&self) -> Option<Rect> {
        Rect::bounding(&self.vertices)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Ring {
        Ring {
            vertices: self
                .vertices
                .iter()
                .map(|p| PlanePoint::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon {
    pub exterior: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(exterior: Ring, holes: Vec<Ring>) -> Self {
        Polygon { exterior, holes }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    pub fn bbox(&self) -> Option<Rect> {
        self.exterior.bbox()
    }

    /// Re-winds the exterior counterclockwise and every hole clockwise.
    pub fn oriented(&self) -> Polygon {
        let orient = |r: &Ring, ccw: bool| match ring_area(r) {
            Ok(a) if (a > 0.0) != ccw => r.reversed(),
            _ => r.clone(),
        };
        Polygon {
            exterior: orient(&self.exterior, true),
            holes: self.holes.iter().map(|h| orient(h, false)).collect(),
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            exterior: self.exterior.translated(dx, dy),
            holes: self.holes.iter().map(|h| h.translated(dx, dy)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiPolygon {
    pub parts: Vec<Polygon>,
}

impl MultiPolygon {
    pub fn new(parts: Vec<Polygon>) -> Self {
        MultiPolygon { parts }
    }

    pub fn empty() -> Self {
        MultiPolygon { parts: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn bbox(&self) -> Option<Rect> {
        self.parts
            .iter()
            .filter_map(Polygon::bbox)
            .reduce(|a, b| a.union(&b))
    }

    pub fn oriented(&self) -> MultiPolygon {
        MultiPolygon {
            parts: self.parts.iter().map(Polygon::oriented).collect(),
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> MultiPolygon {
        MultiPolygon {
            parts: self.parts.iter().map(|p| p.translated(dx, dy)).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.parts
            .iter()
            .flat_map(Polygon::rings)
            .map(Ring::len)
            .sum()
    }
}

impl From<Polygon> for MultiPolygon {
    fn from(p: Polygon) -> Self {
        MultiPolygon { parts: vec![p] }
    }
}

/// Coordinate quantum applied before boolean operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapGrid {
    resolution: f64,
}

pub const DEFAULT_SNAP_RESOLUTION_M: f64 = 0.001;

impl SnapGrid {
    pub fn new(resolution: f64) -> Result<Self, GeometryError> {
        if resolution.is_finite() && resolution > 0.0 {
            Ok(SnapGrid { resolution })
        } else {
            Err(GeometryError::BadGrid(resolution))
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }
}

impl Default for SnapGrid {
    fn default() -> Self {
        SnapGrid {
            resolution: DEFAULT_SNAP_RESOLUTION_M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BooleanOp {
    Union,
    Intersection,
    Difference,
}
