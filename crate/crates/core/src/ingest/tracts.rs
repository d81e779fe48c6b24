use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{io_error, open, IngestError, Scan, Tract};
use crate::geometry::{validate_multipolygon, SnapGrid};
use crate::projection::{GeoMultiPolygon, GeoPoint, GeoPolygon, ProjectionSpec};

const PROPORTIONS: [&str; 4] = ["p_minority", "p_poverty", "p_unemployed", "p_no_diploma"];

/// Reads a GeoJSON FeatureCollection of tracts. Rings are re-wound so
/// exteriors run counterclockwise and holes clockwise.
pub fn read_tracts(path: &Path) -> Result<Vec<Tract>, IngestError> {
    read_tracts_from(open(path)?, path)
}

pub fn read_tracts_from<R: Read>(reader: R, path: &Path) -> Result<Vec<Tract>, IngestError> {
    scan(reader, path, true).map(|s| s.items)
}

/// Reads every feature, collecting feature-level errors instead of stopping
/// at the first. I/O and document-level problems are still returned as `Err`.
pub fn scan_tracts(path: &Path) -> Result<Scan<Tract>, IngestError> {
    scan(open(path)?, path, false)
}

fn scan<R: Read>(mut reader: R, path: &Path, strict: bool) -> Result<Scan<Tract>, IngestError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| io_error(path, e))?;
    let schema = |row: usize, column: &str, reason: String| IngestError::Schema {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        reason,
    };
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| schema(0, "*", format!("not valid JSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(schema(0, "type", "expected a FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| schema(0, "features", "missing features array".into()))?;

    let mut seen = HashSet::new();
    let mut out = Scan::default();
    for (i, feature) in features.iter().enumerate() {
        let row = i + 1;
        let parsed = (|| {
            let props = feature
                .get("properties")
                .and_then(Value::as_object)
                .ok_or_else(|| schema(row, "properties", "missing properties object".into()))?;
            let geoid = match props.get("GEOID") {
                Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
                Some(Value::Number(n)) if n.is_u64() => n.to_string(),
                _ => return Err(schema(row, "GEOID", "missing or empty GEOID".into())),
            };
            let number = |field: &str| -> Result<f64, IngestError> {
                props
                    .get(field)
                    .and_then(Value::as_f64)
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        schema(
                            row,
                            field,
                            format!("missing or non-numeric value for tract {geoid}"),
                        )
                    })
            };
            let total_pop = number("total_pop")?;
            let per_capita_income = number("per_capita_income")?;
            for (field, v) in [
                ("total_pop", total_pop),
                ("per_capita_income", per_capita_income),
            ] {
                if v < 0.0 {
                    return Err(schema(
                        row,
                        field,
                        format!("negative value {v} for tract {geoid}"),
                    ));
                }
            }
            let mut p = [0.0; 4];
            for (k, field) in PROPORTIONS.iter().enumerate() {
                p[k] = number(field)?;
                if !(0.0..=1.0).contains(&p[k]) {
                    return Err(IngestError::ProportionOutOfRange {
                        path: path.to_path_buf(),
                        feature: row,
                        geoid,
                        field: field.to_string(),
                        value: p[k],
                    });
                }
            }
            let invalid = |reason: String| IngestError::InvalidGeometry {
                path: path.to_path_buf(),
                feature: row,
                geoid: geoid.clone(),
                reason,
            };
            let geometry = parse_geometry(feature.get("geometry")).map_err(|e| match e {
                GeomIssue::Invalid(reason) => invalid(reason),
                GeomIssue::OutOfRange(lon, lat) => IngestError::CoordinateOutOfRange {
                    path: path.to_path_buf(),
                    feature: row,
                    geoid: geoid.clone(),
                    lon,
                    lat,
                },
            })?;
            check_planar_validity(&geometry).map_err(invalid)?;
            if !seen.insert(geoid.clone()) {
                return Err(IngestError::DuplicateId {
                    path: path.to_path_buf(),
                    row,
                    id: geoid,
                });
            }
            Ok(Tract {
                geoid,
                geometry,
                total_pop,
                per_capita_income,
                p_minority: p[0],
                p_poverty: p[1],
                p_unemployed: p[2],
                p_no_diploma: p[3],
            })
        })();
        out.push(parsed, strict)?;
    }
    Ok(out)
}

enum GeomIssue {
    Invalid(String),
    OutOfRange(f64, f64),
}

fn parse_geometry(g: Option<&Value>) -> Result<GeoMultiPolygon, GeomIssue> {
    let g = g
        .and_then(Value::as_object)
        .ok_or_else(|| GeomIssue::Invalid("missing geometry".into()))?;
    let coords = g
        .get("coordinates")
        .ok_or_else(|| GeomIssue::Invalid("missing coordinates".into()))?;
    let polygons: Vec<&Value> = match g.get("type").and_then(Value::as_str) {
        Some("Polygon") => vec![coords],
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or_else(|| GeomIssue::Invalid("coordinates must be an array".into()))?
            .iter()
            .collect(),
        other => {
            return Err(GeomIssue::Invalid(format!(
                "unsupported geometry type {other:?}"
            )))
        }
    };
    let mut parts = Vec::with_capacity(polygons.len());
    for poly in polygons {
        let rings = poly
            .as_array()
            .ok_or_else(|| GeomIssue::Invalid("polygon must be an array of rings".into()))?;
        let mut rings = rings
            .iter()
            .map(parse_ring)
            .collect::<Result<Vec<_>, _>>()?
            .into_iter();
        let exterior = rings
            .next()
            .ok_or_else(|| GeomIssue::Invalid("polygon without rings".into()))?;
        let holes: Vec<Vec<GeoPoint>> = rings.collect();
        let ext_area = signed_area(&exterior);
        let mut net = ext_area.abs();
        for h in &holes {
            net -= signed_area(h).abs();
        }
        if net <= 0.0 {
            return Err(GeomIssue::Invalid("polygon has zero area".into()));
        }
        parts.push(GeoPolygon {
            exterior: wound(exterior, true),
            holes: holes.into_iter().map(|h| wound(h, false)).collect(),
        });
    }
    if parts.is_empty() {
        return Err(GeomIssue::Invalid("geometry has no polygons".into()));
    }
    Ok(GeoMultiPolygon { parts })
}

fn parse_ring(v: &Value) -> Result<Vec<GeoPoint>, GeomIssue> {
    let positions = v
        .as_array()
        .ok_or_else(|| GeomIssue::Invalid("ring must be an array of positions".into()))?;
    let mut ring: Vec<GeoPoint> = Vec::with_capacity(positions.len());
    for pos in positions {
        let xy = pos
            .as_array()
            .filter(|a| a.len() >= 2)
            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
            .ok_or_else(|| GeomIssue::Invalid("position must hold two numbers".into()))?;
        let p = GeoPoint {
            lon: xy.0,
            lat: xy.1,
        };
        if !p.is_valid() {
            return Err(GeomIssue::OutOfRange(xy.0, xy.1));
        }
        if ring.last() != Some(&p) {
            ring.push(p);
        }
    }
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    let mut distinct: Vec<(u64, u64)> = ring
        .iter()
        .map(|p| (p.lon.to_bits(), p.lat.to_bits()))
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(GeomIssue::Invalid(format!(
            "ring has {} distinct vertices",
            distinct.len()
        )));
    }
    if signed_area(&ring) == 0.0 {
        return Err(GeomIssue::Invalid("ring has zero area".into()));
    }
    Ok(ring)
}

/// Shoelace area in degree units; the sign gives the orientation.
fn signed_area(ring: &[GeoPoint]) -> f64 {
    let o = ring[0];
    let n = ring.len();
    let mut s = 0.0;
    for i in 1..n - 1 {
        let (a, b) = (ring[i], ring[i + 1]);
        s += (a.lon - o.lon) * (b.lat - o.lat) - (b.lon - o.lon) * (a.lat - o.lat);
    }
    s / 2.0
}

fn wound(mut ring: Vec<GeoPoint>, ccw: bool) -> Vec<GeoPoint> {
    if (signed_area(&ring) > 0.0) != ccw {
        ring.reverse();
    }
    ring
}

/// Runs the planar validity check in an equal-area plane centered on the
/// geometry itself.
fn check_planar_validity(g: &GeoMultiPolygon) -> Result<(), String> {
    let spec = ProjectionSpec::laea_for_extent(g.points())
        .expect("validated geometry has vertices")
        .map_err(|e| e.to_string())?;
    let plane = g.project(&spec).map_err(|e| e.to_string())?;
    validate_multipolygon(&plane, SnapGrid::default()).map_err(|e| e.to_string())
}

/// GeoJSON geometry object: `Polygon` for one part, `MultiPolygon` otherwise.
/// Rings are written closed.
pub fn geometry_to_geojson(g: &GeoMultiPolygon) -> Value {
    let ring = |r: &[GeoPoint]| -> Value {
        let mut pts: Vec<Value> = r.iter().map(|p| json!([p.lon, p.lat])).collect();
        if let Some(first) = pts.first().cloned() {
            pts.push(first);
        }
        Value::Array(pts)
    };
    let polygon = |p: &GeoPolygon| -> Value {
        Value::Array(
            std::iter::once(&p.exterior)
                .chain(p.holes.iter())
                .map(|r| ring(r))
                .collect(),
        )
    };
    if g.parts.len() == 1 {
        json!({ "type": "Polygon", "coordinates": polygon(&g.parts[0]) })
    } else {
        json!({ "type": "MultiPolygon", "coordinates": g.parts.iter().map(polygon).collect::<Vec<_>>() })
    }
}

fn feature(geometry: &GeoMultiPolygon, properties: Map<String, Value>) -> Value {
    json!({ "type": "Feature", "properties": properties, "geometry": geometry_to_geojson(geometry) })
}

/// FeatureCollection with one feature per tract and the given properties.
pub fn feature_collection<'a, I>(features: I) -> Value
where
    I: IntoIterator<Item = (&'a GeoMultiPolygon, Map<String, Value>)>,
{
    let features: Vec<Value> = features.into_iter().map(|(g, p)| feature(g, p)).collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn tracts_to_geojson(tracts: &[Tract]) -> Value {
    feature_collection(tracts.iter().map(|t| {
        let mut props = Map::new();
        props.insert("GEOID".into(), json!(t.geoid));
        props.insert("total_pop".into(), json!(t.total_pop));
        props.insert("per_capita_income".into(), json!(t.per_capita_income));
        props.insert("p_minority".into(), json!(t.p_minority));
        props.insert("p_poverty".into(), json!(t.p_poverty));
        props.insert("p_unemployed".into(), json!(t.p_unemployed));
        props.insert("p_no_diploma".into(), json!(t.p_no_diploma));
        (&t.geometry, props)
    }))
}

pub fn write_tracts<W: Write>(mut writer: W, tracts: &[Tract]) -> std::io::Result<()> {
    serde_json::to_writer(&mut writer, &tracts_to_geojson(tracts))?;
    writer.write_all(b"\n")
}
