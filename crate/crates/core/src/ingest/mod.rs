//! Readers and writers for the three input families: facility points,
//! flood-map points with depth, and census tracts with socioeconomic
//! attributes.
//!
//! Every error names the file and the row (CSV, 1-based, header excluded) or
//! feature (GeoJSON, 1-based) it comes from.

mod facilities;
mod flood;
mod tracts;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::projection::{GeoMultiPolygon, GeoPoint};

pub use facilities::{read_facilities, read_facilities_from, scan_facilities, write_facilities};
pub use flood::{
    read_flood_scenario, read_flood_scenario_from, scan_flood_points, write_flood_scenario,
};
pub use tracts::{
    feature_collection, geometry_to_geojson, read_tracts, read_tracts_from, scan_tracts,
    tracts_to_geojson, write_tracts,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: row {row}, column {column}: {reason}", path.display())]
    Schema {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },
    #[error("{}: row {row}: duplicate id {id:?}", path.display())]
    DuplicateId {
        path: PathBuf,
        row: usize,
        id: String,
    },
    #[error("{}: feature {feature} ({geoid}): coordinate ({lon}, {lat}) out of range", path.display())]
    CoordinateOutOfRange {
        path: PathBuf,
        feature: usize,
        geoid: String,
        lon: f64,
        lat: f64,
    },
    #[error("{}: row {row}, column depth_m: negative depth {depth}", path.display())]
    NegativeDepth {
        path: PathBuf,
        row: usize,
        depth: f64,
    },
    #[error("{}: feature {feature} ({geoid}), column geometry: {reason}", path.display())]
    InvalidGeometry {
        path: PathBuf,
        feature: usize,
        geoid: String,
        reason: String,
    },
    #[error("{}: feature {feature} ({geoid}), column {field}: {value} is outside [0, 1]", path.display())]
    ProportionOutOfRange {
        path: PathBuf,
        feature: usize,
        geoid: String,
        field: String,
        value: f64,
    },
}

impl IngestError {
    /// True for content problems, false for I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, IngestError::Io { .. })
    }
}

/// Records that parsed and the row-level errors met while reading a file.
#[derive(Debug)]
pub struct Scan<T> {
    pub items: Vec<T>,
    pub errors: Vec<IngestError>,
}

impl<T> Default for Scan<T> {
    fn default() -> Self {
        Scan {
            items: Vec::new(),
            errors: Vec::new(),
        }
    }
}

impl<T> Scan<T> {
    /// Rows seen, valid or not.
    pub fn rows(&self) -> usize {
        self.items.len() + self.errors.len()
    }

    /// I/O failures always abort; content errors abort only when `strict`.
    fn push(&mut self, parsed: Result<T, IngestError>, strict: bool) -> Result<(), IngestError> {
        match parsed {
            Ok(item) => self.items.push(item),
            Err(e) if strict || !e.is_validation() => return Err(e),
            Err(e) => self.errors.push(e),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FacilityKind {
    #[serde(rename = "TRI")]
    Tri,
    #[serde(rename = "NPL")]
    Npl,
    #[serde(rename = "INDUSTRIAL")]
    Industrial,
}

impl FacilityKind {
    pub const ALL: [FacilityKind; 3] = [
        FacilityKind::Tri,
        FacilityKind::Npl,
        FacilityKind::Industrial,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FacilityKind::Tri => "TRI",
            FacilityKind::Npl => "NPL",
            FacilityKind::Industrial => "INDUSTRIAL",
        }
    }
}

impl fmt::Display for FacilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FacilityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FacilityKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown facility kind {s:?}, expected TRI, NPL or INDUSTRIAL"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub id: String,
    pub name: String,
    pub kind: FacilityKind,
    pub location: GeoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloodPoint {
    pub location: GeoPoint,
    pub depth_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodScenario {
    pub label: String,
    pub points: Vec<FloodPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tract {
    pub geoid: String,
    pub geometry: GeoMultiPolygon,
    pub total_pop: f64,
    pub per_capita_income: f64,
    pub p_minority: f64,
    pub p_poverty: f64,
    pub p_unemployed: f64,
    pub p_no_diploma: f64,
}

/// Parses a float cell, naming the row and column on failure.
fn parse_f64(
    path: &std::path::Path,
    row: usize,
    column: &str,
    raw: &str,
) -> Result<f64, IngestError> {
    let v: f64 = raw.trim().parse().map_err(|_| IngestError::Schema {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        reason: format!("expected a number, got {raw:?}"),
    })?;
    if !v.is_finite() {
        return Err(IngestError::Schema {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            reason: format!("value {raw:?} is not finite"),
        });
    }
    Ok(v)
}

/// Column positions for the required header names.
fn column_indices(
    path: &std::path::Path,
    headers: &csv::StringRecord,
    required: &[&str],
) -> Result<Vec<usize>, IngestError> {
    required
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| IngestError::Schema {
                    path: path.to_path_buf(),
                    row: 0,
                    column: name.to_string(),
                    reason: "missing column in header".into(),
                })
        })
        .collect()
}

/// Longitude and latitude cells checked against geographic bounds.
fn parse_location(
    path: &std::path::Path,
    row: usize,
    lon_raw: &str,
    lat_raw: &str,
) -> Result<GeoPoint, IngestError> {
    let lon = parse_f64(path, row, "lon", lon_raw)?;
    let lat = parse_f64(path, row, "lat", lat_raw)?;
    let out_of_range = |column: &str, v: f64, bound: f64| IngestError::Schema {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        reason: format!("coordinate {v} is outside [-{bound}, {bound}]"),
    };
    if !(-180.0..=180.0).contains(&lon) {
        return Err(out_of_range("lon", lon, 180.0));
    }
    if !(-90.0..=90.0).contains(&lat) {
        return Err(out_of_range("lat", lat, 90.0));
    }
    Ok(GeoPoint { lon, lat })
}

fn csv_reader<R: std::io::Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn open(path: &std::path::Path) -> Result<std::fs::File, IngestError> {
    std::fs::File::open(path).map_err(|source| io_error(path, source))
}

fn csv_error(path: &std::path::Path, row: usize, e: csv::Error) -> IngestError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => IngestError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        }
    } else {
        IngestError::Schema {
            path: path.to_path_buf(),
            row,
            column: "*".into(),
            reason: e.to_string(),
        }
    }
}

fn io_error(path: &std::path::Path, source: std::io::Error) -> IngestError {
    IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}
