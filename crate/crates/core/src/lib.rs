//! Flood exposure analysis: which facilities a coastal flood reaches, which
//! census tracts lie within fixed distances of them, how many people those
//! tracts hold, and how the affected population differs between scenarios.

pub mod equity;
pub mod exposure;
pub mod geometry;
pub mod ingest;
pub mod projection;
pub mod spatial_index;

pub use equity::{
    disparity_summary, increase_profile, radar_normalize, scenario_delta, DisparitySummary,
    EquityError, IndicatorVector, RadarTable, ScenarioDelta, TractDelta, Weighting,
};
pub use exposure::{
    apportion, build_zone, compute_exposures, detect_flooded, run_scenario, ExposureConfig,
    ExposureError, FloodedFacility, ProjectedTract, ScenarioResult, Study, TractExposure,
};
pub use geometry::{GeometryError, MultiPolygon, Polygon, Ring, SnapGrid};
pub use ingest::{Facility, FacilityKind, FloodPoint, FloodScenario, IngestError, Tract};
pub use projection::{GeoPoint, PlanePoint, ProjectionSpec};
pub use spatial_index::{RTree, Rect};
