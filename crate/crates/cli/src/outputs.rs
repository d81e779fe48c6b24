//! Report builders. Everything is rendered in memory with fixed decimal
//! places (6 for areas and distances, 3 for people, ratios and indicator
//! values) so the bytes do not depend on thread count or platform.

use std::collections::HashMap;

use flood_exposure::equity::{radius_label, DisparitySummary, IndicatorVector, RadarTable};
use flood_exposure::ingest::{feature_collection, Tract};
use flood_exposure::{
    disparity_summary, increase_profile, radar_normalize, EquityError, ScenarioDelta,
    ScenarioResult, Weighting,
};
use serde_json::{json, Map, Value};

pub const AREA_DIGITS: usize = 6;
pub const COUNT_DIGITS: usize = 3;

/// Number of bins for the increase-ratio histogram over (0, 1].
pub const HISTOGRAM_BINS: usize = 10;

/// `x` with exactly `digits` decimals; a rounded-away negative zero prints
/// as plain zero.
pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// JSON number holding `x` rounded to `digits` decimals.
fn num(x: f64, digits: usize) -> Value {
    let rounded: f64 = fixed(x, digits).parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Column suffix for a radius: `1mi`, `2.5mi`.
pub fn radius_suffix(radius: f64) -> String {
    radius_label(radius)
        .trim_start_matches("WITHIN_")
        .to_ascii_lowercase()
}

fn csv_bytes(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    out.push(b'\n');
    out
}

pub fn exposure_header(radii: &[f64]) -> Vec<String> {
    let mut h = vec![
        "geoid".to_string(),
        "total_pop".into(),
        "tract_area_m2".into(),
    ];
    for &r in radii {
        let s = radius_suffix(r);
        h.extend([
            format!("area_in_zone_m2_{s}"),
            format!("threatened_pop_{s}"),
            format!("ratio_{s}"),
        ]);
    }
    h
}

pub fn exposure_csv(result: &ScenarioResult) -> Vec<u8> {
    csv_bytes(
        exposure_header(&result.radii),
        result.exposures.iter().map(|e| {
            let mut row = vec![
                e.geoid.clone(),
                fixed(e.total_pop, COUNT_DIGITS),
                fixed(e.tract_area, AREA_DIGITS),
            ];
            for r in &e.per_radius {
                row.extend([
                    fixed(r.area_in_zone, AREA_DIGITS),
                    fixed(r.threatened_pop, COUNT_DIGITS),
                    fixed(r.ratio, COUNT_DIGITS),
                ]);
            }
            row
        }),
    )
}

fn by_geoid(tracts: &[Tract]) -> HashMap<&str, &Tract> {
    tracts.iter().map(|t| (t.geoid.as_str(), t)).collect()
}

pub fn exposure_geojson(result: &ScenarioResult, tracts: &[Tract]) -> Vec<u8> {
    let lookup = by_geoid(tracts);
    let header = exposure_header(&result.radii);
    let features = result.exposures.iter().filter_map(|e| {
        let t = lookup.get(e.geoid.as_str())?;
        let mut values = vec![
            num(e.total_pop, COUNT_DIGITS),
            num(e.tract_area, AREA_DIGITS),
        ];
        for r in &e.per_radius {
            values.extend([
                num(r.area_in_zone, AREA_DIGITS),
                num(r.threatened_pop, COUNT_DIGITS),
                num(r.ratio, COUNT_DIGITS),
            ]);
        }
        let mut props = Map::new();
        props.insert("GEOID".into(), json!(e.geoid));
        props.extend(header[1..].iter().cloned().zip(values));
        Some((&t.geometry, props))
    });
    json_bytes(&feature_collection(features))
}

pub fn flooded_csv(result: &ScenarioResult) -> Vec<u8> {
    csv_bytes(
        vec!["id".into(), "kind".into(), "min_distance_m".into()],
        result.flooded.iter().map(|f| {
            vec![
                f.facility.id.clone(),
                f.facility.kind.to_string(),
                fixed(f.min_distance_to_flood, AREA_DIGITS),
            ]
        }),
    )
}

fn indicators_json(v: &IndicatorVector) -> Value {
    let map: Map<String, Value> = IndicatorVector::NAMES
        .iter()
        .zip(v.to_array())
        .map(|(n, x)| (n.to_string(), num(x, COUNT_DIGITS)))
        .collect();
    Value::Object(map)
}

fn disparity_json(s: &DisparitySummary) -> Value {
    let columns: Vec<Value> = s
        .columns
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "radius_m": c.radius.map(|r| num(r, AREA_DIGITS)),
                "members": c.members,
                "means": c.means.as_ref().map(indicators_json),
            })
        })
        .collect();
    json!({
        "inclusion_threshold": s.threshold,
        "weighting": s.weighting,
        "columns": columns,
    })
}

/// Radar block, or `null` when fewer than two columns have members.
fn radar_json(s: &DisparitySummary) -> Result<Value, EquityError> {
    match radar_normalize(s) {
        Ok(RadarTable { columns, series }) => Ok(json!({
            "columns": columns,
            "series": series
                .iter()
                .map(|r| json!({
                    "indicator": r.indicator,
                    "values": r.values.iter().map(|v| num(*v, COUNT_DIGITS)).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>(),
        })),
        Err(EquityError::TooFewColumns(_)) => Ok(Value::Null),
        Err(e) => Err(e),
    }
}

fn counts_json(result: &ScenarioResult) -> Value {
    let counts: Map<String, Value> = result
        .counts_by_kind
        .iter()
        .map(|(k, n)| (k.to_string(), json!(n)))
        .collect();
    json!({ "total": result.flooded.len(), "by_kind": counts })
}

pub fn run_summary(
    result: &ScenarioResult,
    tracts: &[Tract],
    threshold: f64,
    weighting: Weighting,
    charts: bool,
) -> Result<Vec<u8>, EquityError> {
    let summary = disparity_summary(tracts, result, threshold, weighting)?;
    let totals: Vec<Value> = result
        .radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            json!({
                "label": radius_label(r),
                "radius_m": num(r, AREA_DIGITS),
                "threatened_pop": num(result.total_threatened(k), COUNT_DIGITS),
                "tracts_within": result.exposures.iter().filter(|e| e.area_share(k) > threshold).count(),
            })
        })
        .collect();
    let mut doc = json!({
        "label": result.label,
        "flooded_facilities": counts_json(result),
        "totals": totals,
        "disparity": disparity_json(&summary),
    });
    if charts {
        doc["charts"] = json!({ "radar": radar_json(&summary)? });
    }
    Ok(json_bytes(&doc))
}

pub fn delta_header(radii: &[f64]) -> Vec<String> {
    let mut h = vec!["geoid".to_string()];
    for &r in radii {
        let s = radius_suffix(r);
        h.extend([format!("increase_{s}"), format!("increase_ratio_{s}")]);
    }
    h
}

pub fn delta_csv(delta: &ScenarioDelta) -> Vec<u8> {
    csv_bytes(
        delta_header(&delta.radii),
        delta.tracts.iter().map(|t| {
            let mut row = vec![t.geoid.clone()];
            for r in &t.per_radius {
                row.extend([
                    fixed(r.increase, COUNT_DIGITS),
                    fixed(r.increase_ratio, COUNT_DIGITS),
                ]);
            }
            row
        }),
    )
}

pub fn delta_geojson(delta: &ScenarioDelta, tracts: &[Tract]) -> Vec<u8> {
    let lookup = by_geoid(tracts);
    let header = delta_header(&delta.radii);
    let features = delta.tracts.iter().filter_map(|d| {
        let t = lookup.get(d.geoid.as_str())?;
        let mut props = Map::new();
        props.insert("GEOID".into(), json!(d.geoid));
        let values = d.per_radius.iter().flat_map(|r| {
            [
                num(r.increase, COUNT_DIGITS),
                num(r.increase_ratio, COUNT_DIGITS),
            ]
        });
        props.extend(header[1..].iter().cloned().zip(values));
        Some((&t.geometry, props))
    });
    json_bytes(&feature_collection(features))
}

/// Counts of tracts whose threatened share grew, binned by increase ratio
/// over (0, 1]; the last bin is closed.
pub fn increase_histogram(delta: &ScenarioDelta, k: usize) -> Vec<usize> {
    let mut bins = vec![0; HISTOGRAM_BINS];
    for t in &delta.tracts {
        let ratio = t.per_radius[k].increase_ratio;
        if ratio > 0.0 {
            let i = ((ratio * HISTOGRAM_BINS as f64).ceil() as usize).clamp(1, HISTOGRAM_BINS) - 1;
            bins[i] += 1;
        }
    }
    bins
}

pub fn compare_summary(
    tracts: &[Tract],
    current: &ScenarioResult,
    future: &ScenarioResult,
    delta: &ScenarioDelta,
    threshold: f64,
    weighting: Weighting,
    charts: bool,
) -> Result<Vec<u8>, EquityError> {
    let current_summary = disparity_summary(tracts, current, threshold, weighting)?;
    let future_summary = disparity_summary(tracts, future, threshold, weighting)?;
    let totals: Vec<Value> = delta
        .totals
        .iter()
        .map(|t| {
            json!({
                "label": radius_label(t.radius),
                "radius_m": num(t.radius, AREA_DIGITS),
                "current": num(t.current, COUNT_DIGITS),
                "future": num(t.future, COUNT_DIGITS),
                "increase": num(t.increase, COUNT_DIGITS),
                "percent_increase": t.percent_increase.map(|p| num(p, COUNT_DIGITS)),
            })
        })
        .collect();
    let profiles = delta
        .radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let means = match increase_profile(tracts, delta, k) {
                Ok(v) => indicators_json(&v),
                Err(EquityError::EmptySelection { .. }) => Value::Null,
                Err(e) => return Err(e),
            };
            let members = delta.tracts.iter().filter(|t| t.per_radius[k].increase > 0.0).count();
            Ok(json!({ "label": radius_label(r), "radius_m": num(r, AREA_DIGITS), "members": members, "means": means }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut doc = json!({
        "current_label": delta.current_label,
        "future_label": delta.future_label,
        "flooded_facilities": { "current": counts_json(current), "future": counts_json(future) },
        "totals": totals,
        "increase_profile": profiles,
        "disparity": { "current": disparity_json(&current_summary), "future": disparity_json(&future_summary) },
    });
    if charts {
        let width = 1.0 / HISTOGRAM_BINS as f64;
        let edges: Vec<Value> = (0..=HISTOGRAM_BINS)
            .map(|i| num(i as f64 * width, COUNT_DIGITS))
            .collect();
        let histograms: Vec<Value> = delta
            .radii
            .iter()
            .enumerate()
            .map(|(k, &r)| json!({ "label": radius_label(r), "counts": increase_histogram(delta, k) }))
            .collect();
        doc["charts"] = json!({
            "radar": { "current": radar_json(&current_summary)?, "future": radar_json(&future_summary)? },
            "increase_ratio_histogram": { "bin_edges": edges, "series": histograms },
        });
    }
    Ok(json_bytes(&doc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(1.23456789, 6), "1.234568");
        assert_eq!(fixed(-0.0001, 3), "0.000");
        assert_eq!(fixed(-0.0, 3), "0.000");
        assert_eq!(fixed(-0.5, 3), "-0.500");
        assert_eq!(fixed(2.0, 0), "2");
    }

    #[test]
    fn suffixes() {
        assert_eq!(radius_suffix(1609.344), "1mi");
        assert_eq!(radius_suffix(2.5 * 1609.344), "2.5mi");
        assert_eq!(
            exposure_header(&[1609.344])[3..],
            ["area_in_zone_m2_1mi", "threatened_pop_1mi", "ratio_1mi"]
        );
    }

    #[test]
    fn rounded_json_numbers() {
        assert_eq!(num(0.12349, 3), json!(0.123));
        assert_eq!(num(-1e-9, 3), json!(0.0));
    }
}
