//! Disparity statistics over tract subsets, radar normalization and
//! scenario comparison.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exposure::ScenarioResult;
use crate::ingest::Tract;
use crate::projection::METERS_PER_MILE;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquityError {
    #[error("scenario results cover different tracts or radii: {0}")]
    TractSetMismatch(String),
    #[error("no tract has an increase at radius {radius} m")]
    EmptySelection { radius: f64 },
    #[error("radar normalization needs at least two populated columns, got {0}")]
    TooFewColumns(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorVector {
    pub per_capita_income: f64,
    pub p_minority: f64,
    pub p_poverty: f64,
    pub p_unemployed: f64,
    pub p_no_diploma: f64,
}

impl IndicatorVector {
    pub const NAMES: [&'static str; 5] = [
        "per_capita_income",
        "p_minority",
        "p_poverty",
        "p_unemployed",
        "p_no_diploma",
    ];

    pub fn of(t: &Tract) -> Self {
        IndicatorVector {
            per_capita_income: t.per_capita_income,
            p_minority: t.p_minority,
            p_poverty: t.p_poverty,
            p_unemployed: t.p_unemployed,
            p_no_diploma: t.p_no_diploma,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [
            self.per_capita_income,
            self.p_minority,
            self.p_poverty,
            self.p_unemployed,
            self.p_no_diploma,
        ]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        IndicatorVector {
            per_capita_income: a[0],
            p_minority: a[1],
            p_poverty: a[2],
            p_unemployed: a[3],
            p_no_diploma: a[4],
        }
    }
}

/// Weighted mean of indicator vectors, `None` for an empty selection or zero
/// total weight. Accumulates deviations from the first vector so identical
/// inputs give back exactly that vector.
fn mean_vector<'a, I: IntoIterator<Item = (&'a Tract, f64)>>(items: I) -> Option<IndicatorVector> {
    let mut it = items.into_iter().peekable();
    let base = IndicatorVector::of(it.peek()?.0).to_array();
    let mut acc = [0.0; 5];
    let mut total = 0.0;
    for (t, w) in it {
        let v = IndicatorVector::of(t).to_array();
        for k in 0..5 {
            acc[k] += w * (v[k] - base[k]);
        }
        total += w;
    }
    if total <= 0.0 {
        return None;
    }
    Some(IndicatorVector::from_array(std::array::from_fn(|k| {
        base[k] + acc[k] / total
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Plain mean over tracts.
    Unweighted,
    /// Mean weighted by tract total population.
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityColumn {
    pub label: String,
    /// `None` for the all-tracts column.
    pub radius: Option<f64>,
    pub members: usize,
    /// `None` when the column has no member tracts.
    pub means: Option<IndicatorVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparitySummary {
    pub threshold: f64,
    pub weighting: Weighting,
    pub columns: Vec<DisparityColumn>,
}

/// Column label for a radius: `WITHIN_1MI`, `WITHIN_2.5MI`, ...
pub fn radius_label(radius: f64) -> String {
    let miles = radius / METERS_PER_MILE;
    if (miles - miles.round()).abs() < 1e-9 {
        format!("WITHIN_{}MI", miles.round() as i64)
    } else {
        let s = format!("{miles:.3}");
        format!("WITHIN_{}MI", s.trim_end_matches('0'))
    }
}

fn tract_lookup(tracts: &[Tract]) -> HashMap<&str, &Tract> {
    tracts.iter().map(|t| (t.geoid.as_str(), t)).collect()
}

/// Indicator means over all tracts and over the tracts whose covered area
/// share exceeds `threshold` at each radius.
pub fn disparity_summary(
    tracts: &[Tract],
    result: &ScenarioResult,
    threshold: f64,
    weighting: Weighting,
) -> Result<DisparitySummary, EquityError> {
    let lookup = tract_lookup(tracts);
    if lookup.len() != result.exposures.len() {
        return Err(EquityError::TractSetMismatch(format!(
            "{} tracts but {} exposures",
            lookup.len(),
            result.exposures.len()
        )));
    }
    // Pair exposures with tracts in geoid order for a deterministic mean.
    let pairs = result
        .exposures
        .iter()
        .map(|e| {
            lookup
                .get(e.geoid.as_str())
                .map(|t| (*t, e))
                .ok_or_else(|| {
                    EquityError::TractSetMismatch(format!("tract {} has no attributes", e.geoid))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weight = |t: &Tract| match weighting {
        Weighting::Unweighted => 1.0,
        Weighting::Population => t.total_pop,
    };
    let mut columns = vec![DisparityColumn {
        label: "ALL".into(),
        radius: None,
        members: pairs.len(),
        means: mean_vector(pairs.iter().map(|(t, _)| (*t, weight(t)))),
    }];
    for (k, &radius) in result.radii.iter().enumerate() {
        let members: Vec<&Tract> = pairs
            .iter()
            .filter(|(_, e)| e.area_share(k) > threshold)
            .map(|(t, _)| *t)
            .collect();
        columns.push(DisparityColumn {
            label: radius_label(radius),
            radius: Some(radius),
            members: members.len(),
            means: mean_vector(members.iter().map(|t| (*t, weight(t)))),
        });
    }
    Ok(DisparitySummary {
        threshold,
        weighting,
        columns,
    })
}

/// Min-max scaling to [0, 1]; a constant input maps to 0.5 everywhere.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarSeries {
    pub indicator: String,
    /// One value per column of [`RadarTable::columns`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarTable {
    pub columns: Vec<String>,
    pub series: Vec<RadarSeries>,
}

/// Per indicator, min-max normalization across the populated columns.
pub fn radar_normalize(summary: &DisparitySummary) -> Result<RadarTable, EquityError> {
    let present: Vec<(&str, [f64; 5])> = summary
        .columns
        .iter()
        .filter_map(|c| c.means.map(|m| (c.label.as_str(), m.to_array())))
        .collect();
    if present.len() < 2 {
        return Err(EquityError::TooFewColumns(present.len()));
    }
    let series = IndicatorVector::NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| RadarSeries {
            indicator: name.to_string(),
            values: min_max_normalize(&present.iter().map(|(_, v)| v[k]).collect::<Vec<_>>()),
        })
        .collect();
    Ok(RadarTable {
        columns: present.iter().map(|(l, _)| l.to_string()).collect(),
        series,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusDelta {
    pub radius: f64,
    /// Future minus current threatened population.
    pub increase: f64,
    /// `increase / total_pop`; 0 for an unpopulated tract.
    pub increase_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractDelta {
    pub geoid: String,
    pub total_pop: f64,
    pub per_radius: Vec<RadiusDelta>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTotal {
    pub radius: f64,
    pub current: f64,
    pub future: f64,
    pub increase: f64,
    /// `100 * increase / current`, absent when nothing is threatened now.
    pub percent_increase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDelta {
    pub current_label: String,
    pub future_label: String,
    pub radii: Vec<f64>,
    /// Sorted by geoid.
    pub tracts: Vec<TractDelta>,
    pub totals: Vec<DeltaTotal>,
}

pub fn scenario_delta(
    current: &ScenarioResult,
    future: &ScenarioResult,
) -> Result<ScenarioDelta, EquityError> {
    if current.radii != future.radii {
        return Err(EquityError::TractSetMismatch(format!(
            "radii {:?} vs {:?}",
            current.radii, future.radii
        )));
    }
    if current.exposures.len() != future.exposures.len()
        || current
            .exposures
            .iter()
            .zip(&future.exposures)
            .any(|(a, b)| a.geoid != b.geoid)
    {
        return Err(EquityError::TractSetMismatch("tract ids differ".into()));
    }
    let tracts = current
        .exposures
        .iter()
        .zip(&future.exposures)
        .map(|(c, f)| TractDelta {
            geoid: c.geoid.clone(),
            total_pop: c.total_pop,
            per_radius: c
                .per_radius
                .iter()
                .zip(&f.per_radius)
                .map(|(rc, rf)| {
                    let increase = rf.threatened_pop - rc.threatened_pop;
                    let increase_ratio = if c.total_pop > 0.0 {
                        increase / c.total_pop
                    } else {
                        0.0
                    };
                    RadiusDelta {
                        radius: rc.radius,
                        increase,
                        increase_ratio,
                    }
                })
                .collect(),
        })
        .collect();
    let totals = current
        .radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| {
            let (c, f) = (current.total_threatened(k), future.total_threatened(k));
            let increase = f - c;
            DeltaTotal {
                radius,
                current: c,
                future: f,
                increase,
                percent_increase: (c > 0.0).then(|| 100.0 * increase / c),
            }
        })
        .collect();
    Ok(ScenarioDelta {
        current_label: current.label.clone(),
        future_label: future.label.clone(),
        radii: current.radii.clone(),
        tracts,
        totals,
    })
}

/// Unweighted indicator means over tracts whose threatened population grew
/// at radius index `k`.
pub fn increase_profile(
    tracts: &[Tract],
    delta: &ScenarioDelta,
    k: usize,
) -> Result<IndicatorVector, EquityError> {
    let lookup = tract_lookup(tracts);
    let radius = delta.radii.get(k).copied().unwrap_or(f64::NAN);
    let selected = delta
        .tracts
        .iter()
        .filter(|d| d.per_radius.get(k).is_some_and(|r| r.increase > 0.0))
        .map(|d| {
            lookup
                .get(d.geoid.as_str())
                .map(|t| (*t, 1.0))
                .ok_or_else(|| {
                    EquityError::TractSetMismatch(format!("tract {} has no attributes", d.geoid))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    mean_vector(selected).ok_or(EquityError::EmptySelection { radius })
}
