//! Deterministic synthetic workloads shared by the benchmarks.

use flood_exposure::geometry::{buffer_disc, DiscSpec, Polygon};
use flood_exposure::ingest::{Facility, FacilityKind, FloodPoint, FloodScenario, Tract};
use flood_exposure::projection::{GeoMultiPolygon, GeoPoint, GeoPolygon, PlanePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` discs of 1 to 5 km radius scattered over a `span` meter square.
pub fn scattered_discs(seed: u64, n: usize, span: f64) -> Vec<Polygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c = PlanePoint::new(rng.gen_range(0.0..span), rng.gen_range(0.0..span));
            buffer_disc(c, rng.gen_range(1000.0..5000.0), &DiscSpec::default()).unwrap()
        })
        .collect()
}

/// A synthetic coastal study near Houston.
pub struct Workload {
    pub tracts: Vec<Tract>,
    pub facilities: Vec<Facility>,
    pub flood: FloodScenario,
}

/// `rows x cols` grid of 0.02 degree tracts with `flooded` facilities
/// sitting on flood points and as many dry ones.
pub fn workload(seed: u64, rows: usize, cols: usize, flooded: usize) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lon0, lat0, cell) = (-95.4, 29.3, 0.02);
    let p = |lon: f64, lat: f64| GeoPoint { lon, lat };
    let mut tracts = Vec::with_capacity(rows * cols);
    for i in 0..cols {
        for j in 0..rows {
            let (x, y) = (lon0 + i as f64 * cell, lat0 + j as f64 * cell);
            tracts.push(Tract {
                geoid: format!("48201{:06}", i * 1000 + j),
                geometry: GeoMultiPolygon {
                    parts: vec![GeoPolygon {
                        exterior: vec![
                            p(x, y),
                            p(x + cell, y),
                            p(x + cell, y + cell),
                            p(x, y + cell),
                        ],
                        holes: vec![],
                    }],
                },
                total_pop: rng.gen_range(500..8000) as f64,
                per_capita_income: rng.gen_range(15_000.0..60_000.0),
                p_minority: rng.gen_range(0.0..1.0),
                p_poverty: rng.gen_range(0.0..0.5),
                p_unemployed: rng.gen_range(0.0..0.1),
                p_no_diploma: rng.gen_range(0.0..0.4),
            });
        }
    }
    let (w, h) = (cols as f64 * cell, rows as f64 * cell);
    let kinds = [
        FacilityKind::Tri,
        FacilityKind::Npl,
        FacilityKind::Industrial,
    ];
    let facilities: Vec<Facility> = (0..2 * flooded)
        .map(|k| Facility {
            id: format!("F{k:05}"),
            name: format!("Facility {k}"),
            kind: kinds[k % 3],
            location: p(lon0 + rng.gen_range(0.0..w), lat0 + rng.gen_range(0.0..h)),
        })
        .collect();
    let points = facilities
        .iter()
        .take(flooded)
        .map(|f| FloodPoint {
            location: f.location,
            depth_m: 1.0,
        })
        .collect();
    Workload {
        tracts,
        facilities,
        flood: FloodScenario {
            label: "bench".into(),
            points,
        },
    }
}
