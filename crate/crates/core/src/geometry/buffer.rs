use std::f64::consts::PI;

use super::{GeometryError, Polygon, Ring};
use crate::projection::PlanePoint;

/// Discretization of a buffer disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscSpec {
    pub segments: usize,
    /// Scale the vertex radius so the polygon area equals `pi * r^2`.
    pub area_correction: bool,
}

impl Default for DiscSpec {
    fn default() -> Self {
        DiscSpec {
            segments: 64,
            area_correction: true,
        }
    }
}

/// Area of a regular `segments`-gon inscribed in a unit-area circle.
pub fn disc_area_factor(segments: usize) -> f64 {
    let n = segments as f64;
    n / (2.0 * PI) * (2.0 * PI / n).sin()
}

/// Regular polygon approximating the disc of `radius` around `center`,
/// counterclockwise, first vertex due east of the center.
pub fn buffer_disc(
    center: PlanePoint,
    radius: f64,
    spec: &DiscSpec,
) -> Result<Polygon, GeometryError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(GeometryError::BadRadius(radius));
    }
    if spec.segments < 3 {
        return Err(GeometryError::BadSegments(spec.segments));
    }
    let vertex_radius = if spec.area_correction {
        radius / disc_area_factor(spec.segments).sqrt()
    } else {
        radius
    };
    let step = 2.0 * PI / spec.segments as f64;
    let vertices = (0..spec.segments)
        .map(|k| {
            let (s, c) = (k as f64 * step).sin_cos();
            PlanePoint::new(center.x + vertex_radius * c, center.y + vertex_radius * s)
        })
        .collect();
    Ok(Polygon::new(Ring { vertices }, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ring_area;
    use crate::projection::METERS_PER_MILE;

    #[test]
    fn corrected_mile_disc_has_exact_area() {
        let p = buffer_disc(
            PlanePoint::new(12.5, -7.0),
            METERS_PER_MILE,
            &DiscSpec::default(),
        )
        .unwrap();
        let area = ring_area(&p.exterior).unwrap();
        let expected = PI * METERS_PER_MILE * METERS_PER_MILE;
        assert!(((area - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn uncorrected_disc_matches_regular_polygon_formula() {
        let r = 100.0;
        let spec = DiscSpec {
            segments: 64,
            area_correction: false,
        };
        let area = ring_area(
            &buffer_disc(PlanePoint::default(), r, &spec)
                .unwrap()
                .exterior,
        )
        .unwrap();
        let expected = PI * r * r * disc_area_factor(64);
        assert!(((area - expected) / expected).abs() < 1e-12);
        assert!((disc_area_factor(64) - 0.99840).abs() < 1e-5);
    }

    #[test]
    fn corrected_square() {
        let spec = DiscSpec {
            segments: 4,
            area_correction: true,
        };
        let p = buffer_disc(PlanePoint::default(), 2.0, &spec).unwrap();
        assert_eq!(p.exterior.len(), 4);
        let area = ring_area(&p.exterior).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        let c = PlanePoint::default();
        assert_eq!(
            buffer_disc(c, 0.0, &DiscSpec::default()),
            Err(GeometryError::BadRadius(0.0))
        );
        assert!(matches!(
            buffer_disc(c, f64::NAN, &DiscSpec::default()),
            Err(GeometryError::BadRadius(_))
        ));
        let spec = DiscSpec {
            segments: 2,
            area_correction: true,
        };
        assert_eq!(
            buffer_disc(c, 1.0, &spec),
            Err(GeometryError::BadSegments(2))
        );
    }
}
