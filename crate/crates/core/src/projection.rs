//! Geographic to planar conversion on the authalic sphere.
//!
//! Buffering and area work happen in a projected plane measured in meters.
//! The default plane is a spherical Lambert azimuthal equal-area projection,
//! which keeps area ratios exact enough for areal apportionment. A local
//! equirectangular plane is available for small study areas and tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{MultiPolygon, Polygon, Ring};
use thiserror::Error;

/// Radius of the sphere with the same surface area as the WGS84 ellipsoid.
pub const AUTHALIC_RADIUS_M: f64 = 6_371_007.181;

/// International mile.
pub const METERS_PER_MILE: f64 = 1609.344;

/// Below this value of `1 + cos(c)` a point is treated as the antipode of the
/// projection center.
const ANTIPODE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("invalid geographic point (lon {lon}, lat {lat})")]
    InvalidPoint { lon: f64, lat: f64 },
    #[error("invalid projection: {0}")]
    InvalidSpec(String),
    #[error("point (lon {lon}, lat {lat}) is antipodal to the projection center")]
    AntipodalPoint { lon: f64, lat: f64 },
    #[error("planar point ({x}, {y}) is outside the projection domain")]
    OutOfDomain { x: f64, y: f64 },
}

/// WGS84 longitude/latitude in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self, ProjectionError> {
        let p = GeoPoint { lon, lat };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(ProjectionError::InvalidPoint { lon, lat })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lon.is_finite()
            && self.lat.is_finite()
            && (-180.0..=180.0).contains(&self.lon)
            && (-90.0..=90.0).contains(&self.lat)
    }
}

/// A point in a projected plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Great-circle distance in meters on the authalic sphere (haversine form).
pub fn geodesic_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlam = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlam / 2.0).sin().powi(2);
    2.0 * AUTHALIC_RADIUS_M * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionKind {
    /// Lambert azimuthal equal-area, spherical form.
    Laea,
    /// Equirectangular plane with the standard parallel through the center.
    LocalEquirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub kind: ProjectionKind,
    pub center: GeoPoint,
    pub sphere_radius: f64,
}

fn wrap_radians(mut lam: f64) -> f64 {
    if !(-PI..=PI).contains(&lam) {
        lam = (lam + PI).rem_euclid(2.0 * PI) - PI;
    }
    lam
}

impl ProjectionSpec {
    pub fn new(
        kind: ProjectionKind,
        center: GeoPoint,
        sphere_radius: f64,
    ) -> Result<Self, ProjectionError> {
        if !center.is_valid() {
            return Err(ProjectionError::InvalidPoint {
                lon: center.lon,
                lat: center.lat,
            });
        }
        if !(sphere_radius.is_finite() && sphere_radius > 0.0) {
            return Err(ProjectionError::InvalidSpec(format!(
                "sphere radius must be positive, got {sphere_radius}"
            )));
        }
        if kind == ProjectionKind::LocalEquirect && center.lat.abs() >= 90.0 {
            return Err(ProjectionError::InvalidSpec(
                "equirectangular center cannot be a pole".into(),
            ));
        }
        Ok(ProjectionSpec {
            kind,
            center,
            sphere_radius,
        })
    }

    pub fn laea(center: GeoPoint) -> Result<Self, ProjectionError> {
        Self::new(ProjectionKind::Laea, center, AUTHALIC_RADIUS_M)
    }

    pub fn local_equirect(center: GeoPoint) -> Result<Self, ProjectionError> {
        Self::new(ProjectionKind::LocalEquirect, center, AUTHALIC_RADIUS_M)
    }

    /// LAEA centered on the middle of the bounding box of `points`.
    /// Returns `None` when the iterator is empty.
    pub fn laea_for_extent<I>(points: I) -> Option<Result<Self, ProjectionError>>
    where
        I: IntoIterator<Item = GeoPoint>,
    {
        let mut bounds: Option<(f64, f64, f64, f64)> = None;
        for p in points {
            bounds = Some(match bounds {
                None => (p.lon, p.lat, p.lon, p.lat),
                Some((a, b, c, d)) => (a.min(p.lon), b.min(p.lat), c.max(p.lon), d.max(p.lat)),
            });
        }
        let (min_lon, min_lat, max_lon, max_lat) = bounds?;
        Some(
            GeoPoint::new((min_lon + max_lon) / 2.0, (min_lat + max_lat) / 2.0)
                .and_then(Self::laea),
        )
    }

    pub fn project(&self, p: GeoPoint) -> Result<PlanePoint, ProjectionError> {
        if !p.is_valid() {
            return Err(ProjectionError::InvalidPoint {
                lon: p.lon,
                lat: p.lat,
            });
        }
        let r = self.sphere_radius;
        let phi0 = self.center.lat.to_radians();
        let phi = p.lat.to_radians();
        let dlam = wrap_radians((p.lon - self.center.lon).to_radians());
        match self.kind {
            ProjectionKind::Laea => {
                let (sin_phi, cos_phi) = phi.sin_cos();
                let (sin_phi0, cos_phi0) = phi0.sin_cos();
                let cos_dlam = dlam.cos();
                let one_plus_cos_c = 1.0 + sin_phi0 * sin_phi + cos_phi0 * cos_phi * cos_dlam;
                if one_plus_cos_c <= ANTIPODE_EPS {
                    return Err(ProjectionError::AntipodalPoint {
                        lon: p.lon,
                        lat: p.lat,
                    });
                }
                let k = (2.0 / one_plus_cos_c).sqrt();
                Ok(PlanePoint {
                    x: r * k * cos_phi * dlam.sin(),
                    y: r * k * (cos_phi0 * sin_phi - sin_phi0 * cos_phi * cos_dlam),
                })
            }
            ProjectionKind::LocalEquirect => Ok(PlanePoint {
                x: r * dlam * phi0.cos(),
                y: r * (phi - phi0),
            }),
        }
    }

    pub fn inverse(&self, p: PlanePoint) -> Result<GeoPoint, ProjectionError> {
        let out_of_domain = || ProjectionError::OutOfDomain { x: p.x, y: p.y };
        if !p.is_finite() {
            return Err(out_of_domain());
        }
        if p.x == 0.0 && p.y == 0.0 {
            return Ok(self.center);
        }
        let r = self.sphere_radius;
        let phi0 = self.center.lat.to_radians();
        let lam0 = self.center.lon.to_radians();
        let (phi, lam) = match self.kind {
            ProjectionKind::Laea => {
                let rho = p.x.hypot(p.y);
                let half_chord = rho / (2.0 * r);
                if half_chord > 1.0 {
                    return Err(out_of_domain());
                }
                let c = 2.0 * half_chord.asin();
                let (sin_c, cos_c) = c.sin_cos();
                let (sin_phi0, cos_phi0) = phi0.sin_cos();
                let phi = (cos_c * sin_phi0 + p.y * sin_c * cos_phi0 / rho)
                    .clamp(-1.0, 1.0)
                    .asin();
                let lam =
                    lam0 + (p.x * sin_c).atan2(rho * cos_phi0 * cos_c - p.y * sin_phi0 * sin_c);
                (phi, lam)
            }
            ProjectionKind::LocalEquirect => {
                let phi = phi0 + p.y / r;
                let dlam = p.x / (r * phi0.cos());
                if phi.abs() > PI / 2.0 || dlam.abs() > PI {
                    return Err(out_of_domain());
                }
                (phi, lam0 + dlam)
            }
        };
        let lon = wrap_radians(lam).to_degrees().clamp(-180.0, 180.0);
        let lat = phi.to_degrees().clamp(-90.0, 90.0);
        Ok(GeoPoint { lon, lat })
    }
}

/// Polygon in geographic coordinates: an exterior ring and holes, each an
/// implicitly closed vertex list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeoPolygon {
    pub exterior: Vec<GeoPoint>,
    pub holes: Vec<Vec<GeoPoint>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeoMultiPolygon {
    pub parts: Vec<GeoPolygon>,
}

impl GeoMultiPolygon {
    pub fn points(&self) -> impl Iterator<Item = GeoPoint> + '_ {
        self.parts
            .iter()
            .flat_map(|p| p.exterior.iter().chain(p.holes.iter().flatten()))
            .copied()
    }

    /// Projects every vertex; ring structure is kept as is.
    pub fn project(&self, spec: &ProjectionSpec) -> Result<MultiPolygon, ProjectionError> {
        let ring = |r: &[GeoPoint]| -> Result<Ring, ProjectionError> {
            Ok(Ring::new(
                r.iter()
                    .map(|p| spec.project(*p))
                    .collect::<Result<_, _>>()?,
            ))
        };
        let parts = self
            .parts
            .iter()
            .map(|p| {
                Ok(Polygon::new(
                    ring(&p.exterior)?,
                    p.holes.iter().map(|h| ring(h)).collect::<Result<_, _>>()?,
                ))
            })
            .collect::<Result<_, ProjectionError>>()?;
        Ok(MultiPolygon::new(parts))
    }
}
