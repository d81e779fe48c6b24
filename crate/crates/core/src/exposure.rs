//! Flooded-facility detection, exposure zones and areal apportionment.
//!
//! A facility is flooded when its great-circle distance to the nearest
//! flood point is at most `flood_buffer` (inclusive). Zones are unions of
//! area-corrected discs around flooded facilities in an equal-area plane,
//! one per radius, so they nest. Each tract's threatened population is its
//! total population times the share of its area inside the zone.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    boolean_op, buffer_disc, multipolygon_area, union_all, BooleanOp, DiscSpec, GeometryError,
    MultiPolygon, SnapGrid,
};
use crate::ingest::{Facility, FacilityKind, FloodScenario, Tract};
use crate::projection::{
    geodesic_distance, GeoPoint, PlanePoint, ProjectionError, ProjectionSpec, METERS_PER_MILE,
};
use crate::spatial_index::{RTree, Rect};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExposureError {
    #[error("invalid exposure configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("tract {geoid}: {source}")]
    Tract {
        geoid: String,
        source: GeometryError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureConfig {
    /// Detection distance around flood points, meters.
    pub flood_buffer: f64,
    /// Zone radii, meters, strictly increasing.
    pub radii: Vec<f64>,
    pub disc_segments: usize,
    pub area_correction: bool,
    pub snap_resolution: f64,
    /// A tract counts as "within" a zone when its covered area share
    /// exceeds this value.
    pub inclusion_threshold: f64,
}

impl Default for ExposureConfig {
    fn default() -> Self {
        ExposureConfig {
            flood_buffer: 0.1 * METERS_PER_MILE,
            radii: vec![
                METERS_PER_MILE,
                3.0 * METERS_PER_MILE,
                5.0 * METERS_PER_MILE,
            ],
            disc_segments: 64,
            area_correction: true,
            snap_resolution: crate::geometry::DEFAULT_SNAP_RESOLUTION_M,
            inclusion_threshold: 0.0,
        }
    }
}

impl ExposureConfig {
    pub fn validate(&self) -> Result<(), ExposureError> {
        let bad = |m: String| Err(ExposureError::Config(m));
        if !(self.flood_buffer.is_finite() && self.flood_buffer > 0.0) {
            return bad(format!(
                "flood_buffer must be positive, got {}",
                self.flood_buffer
            ));
        }
        if self.radii.is_empty() {
            return bad("radii must not be empty".into());
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad(format!("radii must be positive, got {:?}", self.radii));
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "radii must be strictly increasing, got {:?}",
                self.radii
            ));
        }
        if self.disc_segments < 3 {
            return bad(format!(
                "disc_segments must be at least 3, got {}",
                self.disc_segments
            ));
        }
        if !(0.0..1.0).contains(&self.inclusion_threshold) {
            return bad(format!(
                "inclusion_threshold must be in [0, 1), got {}",
                self.inclusion_threshold
            ));
        }
        SnapGrid::new(self.snap_resolution)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<SnapGrid, ExposureError> {
        Ok(SnapGrid::new(self.snap_resolution)?)
    }

    pub fn disc(&self) -> DiscSpec {
        DiscSpec {
            segments: self.disc_segments,
            area_correction: self.area_correction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodedFacility {
    pub facility: Facility,
    /// Great-circle distance to the nearest flood point, meters.
    pub min_distance_to_flood: f64,
}

/// Facilities within `cfg.flood_buffer` of any flood point, sorted by id.
///
/// Flood points are indexed in an equal-area plane centered on their
/// extent. Planar distances there are at least the spherical distance
/// times `cos(c / 2)`, where `c` is the largest angular distance from the
/// center, so a planar search radius of `buffer / cos(c / 2)` cannot miss a
/// candidate. Candidates are then decided by the great-circle distance.
pub fn detect_flooded(
    facilities: &[Facility],
    scenario: &FloodScenario,
    cfg: &ExposureConfig,
) -> Result<Vec<FloodedFacility>, ExposureError> {
    let buffer = cfg.flood_buffer;
    let Some(spec) = ProjectionSpec::laea_for_extent(scenario.points.iter().map(|p| p.location))
    else {
        return Ok(Vec::new());
    };
    let spec = spec?;
    let r = spec.sphere_radius;
    let angle = |p: GeoPoint| geodesic_distance(spec.center, p) / r;
    let flood_reach = scenario
        .points
        .iter()
        .map(|p| angle(p.location))
        .fold(0.0, f64::max);
    let buffer_angle = buffer / r;
    // Facilities farther than this from the center cannot be within the buffer.
    let reach = flood_reach + buffer_angle;
    let candidates: Vec<&Facility> = facilities
        .iter()
        .filter(|f| angle(f.location) <= reach * (1.0 + 1e-9) + 1e-12)
        .collect();

    let flooded: Vec<FloodedFacility> = if reach >= 0.6 * std::f64::consts::PI {
        // Planar prefilter is not useful at this extent.
        candidates
            .par_iter()
            .filter_map(|f| {
                let d = scenario
                    .points
                    .iter()
                    .map(|p| geodesic_distance(f.location, p.location))
                    .fold(f64::INFINITY, f64::min);
                (d <= buffer).then(|| FloodedFacility {
                    facility: (*f).clone(),
                    min_distance_to_flood: d,
                })
            })
            .collect()
    } else {
        let projected: Vec<PlanePoint> = scenario
            .points
            .iter()
            .map(|p| spec.project(p.location))
            .collect::<Result<_, _>>()?;
        let tree = RTree::bulk_build(
            projected
                .iter()
                .enumerate()
                .map(|(i, p)| (Rect::from_point(*p), i))
                .collect(),
        );
        let search = buffer / (reach / 2.0).cos() * (1.0 + 1e-9) + 1e-6;
        candidates
            .par_iter()
            .map(|f| -> Result<Option<FloodedFacility>, ExposureError> {
                let q = spec.project(f.location)?;
                let d = tree
                    .within_distance(q, search)
                    .into_iter()
                    .map(|i| geodesic_distance(f.location, scenario.points[i].location))
                    .fold(f64::INFINITY, f64::min);
                Ok((d <= buffer).then(|| FloodedFacility {
                    facility: (*f).clone(),
                    min_distance_to_flood: d,
                }))
            })
            .filter_map(Result::transpose)
            .collect::<Result<_, _>>()?
    };
    let mut flooded = flooded;
    flooded.sort_by(|a, b| a.facility.id.cmp(&b.facility.id));
    Ok(flooded)
}

/// Union of discs of `radius` around `centers`; empty for no centers.
pub fn build_zone(
    centers: &[PlanePoint],
    radius: f64,
    cfg: &ExposureConfig,
) -> Result<MultiPolygon, ExposureError> {
    let disc = cfg.disc();
    let discs = centers
        .iter()
        .map(|c| buffer_disc(*c, radius, &disc))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(union_all(&discs, cfg.grid()?)?)
}

/// Tract geometry in the analysis plane, normalized on the snap grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedTract {
    pub geoid: String,
    pub geometry: MultiPolygon,
    pub total_pop: f64,
    /// Area of the snapped geometry, square meters.
    pub area: f64,
}

impl ProjectedTract {
    /// Snaps and normalizes `geometry`; the area is taken from the
    /// normalized form so clipped areas never exceed it.
    pub fn new(
        geoid: &str,
        geometry: &MultiPolygon,
        total_pop: f64,
        grid: SnapGrid,
    ) -> Result<Self, ExposureError> {
        let tract_err = |source| ExposureError::Tract {
            geoid: geoid.to_string(),
            source,
        };
        let geometry = boolean_op(geometry, &MultiPolygon::empty(), BooleanOp::Union, grid)
            .map_err(tract_err)?;
        let area = multipolygon_area(&geometry).map_err(tract_err)?;
        if area <= 0.0 {
            return Err(tract_err(GeometryError::InvalidTopology(
                "tract has zero area after snapping".into(),
            )));
        }
        Ok(ProjectedTract {
            geoid: geoid.to_string(),
            geometry,
            total_pop,
            area,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Apportioned {
    pub area_in_zone: f64,
    pub threatened_pop: f64,
}

/// `threatened = total_pop * area(tract ∩ zone) / area(tract)`.
pub fn apportion(
    tract: &ProjectedTract,
    zone: &MultiPolygon,
    cfg: &ExposureConfig,
) -> Result<Apportioned, ExposureError> {
    if zone.is_empty() {
        return Ok(Apportioned {
            area_in_zone: 0.0,
            threatened_pop: 0.0,
        });
    }
    let tract_err = |source| ExposureError::Tract {
        geoid: tract.geoid.clone(),
        source,
    };
    let clipped = boolean_op(&tract.geometry, zone, BooleanOp::Intersection, cfg.grid()?)
        .map_err(tract_err)?;
    let area_in_zone = multipolygon_area(&clipped)
        .map_err(tract_err)?
        .min(tract.area);
    let share = area_in_zone / tract.area;
    Ok(Apportioned {
        area_in_zone,
        threatened_pop: tract.total_pop * share,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusExposure {
    pub radius: f64,
    pub area_in_zone: f64,
    pub threatened_pop: f64,
    /// Threatened over total population; 0 for an unpopulated tract.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractExposure {
    pub geoid: String,
    pub total_pop: f64,
    pub tract_area: f64,
    /// One entry per configured radius, in ascending radius order.
    pub per_radius: Vec<RadiusExposure>,
}

impl TractExposure {
    /// Covered share of the tract area at radius index `k`.
    pub fn area_share(&self, k: usize) -> f64 {
        self.per_radius[k].area_in_zone / self.tract_area
    }
}

/// Zones for every radius and the exposure of every tract, in the plane.
/// Tracts come back sorted by geoid.
pub fn compute_exposures(
    tracts: &[ProjectedTract],
    centers: &[PlanePoint],
    cfg: &ExposureConfig,
) -> Result<(Vec<MultiPolygon>, Vec<TractExposure>), ExposureError> {
    cfg.validate()?;
    let zones = cfg
        .radii
        .iter()
        .map(|&r| build_zone(centers, r, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let mut order: Vec<&ProjectedTract> = tracts.iter().collect();
    order.sort_by(|a, b| a.geoid.cmp(&b.geoid));
    let index = RTree::bulk_build(
        order
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.geometry.bbox().map(|b| (b, i)))
            .collect(),
    );

    let mut per_tract: Vec<Vec<RadiusExposure>> =
        vec![Vec::with_capacity(zones.len()); order.len()];
    for (&radius, zone) in cfg.radii.iter().zip(&zones) {
        let mut hit = vec![false; order.len()];
        for part in &zone.parts {
            if let Some(b) = part.bbox() {
                for i in index.query_range(&b) {
                    hit[i] = true;
                }
            }
        }
        let results: Vec<Apportioned> = order
            .par_iter()
            .zip(hit.par_iter())
            .map(|(t, &h)| {
                if h {
                    apportion(t, zone, cfg)
                } else {
                    Ok(Apportioned {
                        area_in_zone: 0.0,
                        threatened_pop: 0.0,
                    })
                }
            })
            .collect::<Result<_, _>>()?;
        for ((slot, t), a) in per_tract.iter_mut().zip(&order).zip(results) {
            let ratio = if t.total_pop > 0.0 {
                a.threatened_pop / t.total_pop
            } else {
                0.0
            };
            slot.push(RadiusExposure {
                radius,
                area_in_zone: a.area_in_zone,
                threatened_pop: a.threatened_pop,
                ratio,
            });
        }
    }
    let exposures = order
        .iter()
        .zip(per_tract)
        .map(|(t, per_radius)| TractExposure {
            geoid: t.geoid.clone(),
            total_pop: t.total_pop,
            tract_area: t.area,
            per_radius,
        })
        .collect();
    Ok((zones, exposures))
}

/// Tracts projected into one equal-area plane centered on their extent.
#[derive(Debug, Clone)]
pub struct Study {
    pub projection: ProjectionSpec,
    pub tracts: Vec<ProjectedTract>,
}

impl Study {
    pub fn new(tracts: &[Tract], cfg: &ExposureConfig) -> Result<Self, ExposureError> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let projection =
            ProjectionSpec::laea_for_extent(tracts.iter().flat_map(|t| t.geometry.points()))
                .unwrap_or_else(|| ProjectionSpec::laea(GeoPoint { lon: 0.0, lat: 0.0 }))?;
        let tracts = tracts
            .par_iter()
            .map(|t| {
                let plane = t.geometry.project(&projection)?;
                ProjectedTract::new(&t.geoid, &plane, t.total_pop, grid)
            })
            .collect::<Result<_, ExposureError>>()?;
        Ok(Study { projection, tracts })
    }

    pub fn run(
        &self,
        facilities: &[Facility],
        scenario: &FloodScenario,
        cfg: &ExposureConfig,
    ) -> Result<ScenarioResult, ExposureError> {
        let flooded = detect_flooded(facilities, scenario, cfg)?;
        let centers = flooded
            .iter()
            .map(|f| self.projection.project(f.facility.location))
            .collect::<Result<Vec<_>, _>>()?;
        let (zones, exposures) = compute_exposures(&self.tracts, &centers, cfg)?;
        let mut counts_by_kind: BTreeMap<FacilityKind, usize> =
            FacilityKind::ALL.iter().map(|k| (*k, 0)).collect();
        for f in &flooded {
            *counts_by_kind.entry(f.facility.kind).or_default() += 1;
        }
        Ok(ScenarioResult {
            label: scenario.label.clone(),
            radii: cfg.radii.clone(),
            projection: self.projection,
            flooded,
            zones,
            exposures,
            counts_by_kind,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub label: String,
    pub radii: Vec<f64>,
    /// Plane in which `zones` are expressed.
    pub projection: ProjectionSpec,
    pub flooded: Vec<FloodedFacility>,
    pub zones: Vec<MultiPolygon>,
    /// Sorted by geoid.
    pub exposures: Vec<TractExposure>,
    pub counts_by_kind: BTreeMap<FacilityKind, usize>,
}

impl ScenarioResult {
    /// Sum of threatened population at radius index `k`.
    pub fn total_threatened(&self, k: usize) -> f64 {
        self.exposures
            .iter()
            .map(|e| e.per_radius[k].threatened_pop)
            .sum()
    }

    pub fn exposure(&self, geoid: &str) -> Option<&TractExposure> {
        self.exposures
            .binary_search_by(|e| e.geoid.as_str().cmp(geoid))
            .ok()
            .map(|i| &self.exposures[i])
    }
}

pub fn run_scenario(
    facilities: &[Facility],
    tracts: &[Tract],
    scenario: &FloodScenario,
    cfg: &ExposureConfig,
) -> Result<ScenarioResult, ExposureError> {
    Study::new(tracts, cfg)?.run(facilities, scenario, cfg)
}
