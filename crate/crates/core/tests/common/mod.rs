//! Test-only generators and independent oracles.
//!
//! Nothing here calls into the overlay code: the oracles work on the raw
//! `f64` vertex lists of the inputs.

#![allow(dead_code)]

use std::f64::consts::PI;

use flood_exposure::geometry::{buffer_disc, DiscSpec, MultiPolygon, Polygon, Ring};
use flood_exposure::projection::{GeoPoint, PlanePoint, ProjectionSpec, AUTHALIC_RADIUS_M};
use rand::Rng;

pub type Edge = ((f64, f64), (f64, f64));

/// Random star-shaped simple polygon around `(cx, cy)`.
pub fn star_polygon<R: Rng>(
    rng: &mut R,
    cx: f64,
    cy: f64,
    r_min: f64,
    r_max: f64,
    with_hole: bool,
) -> Polygon {
    let n = rng.gen_range(5..24);
    // Evenly spread angles with jitter keeps every angular gap below pi/2.
    let step = 2.0 * PI / n as f64;
    let mut inner = f64::INFINITY;
    let vertices: Vec<PlanePoint> = (0..n)
        .map(|k| {
            let a = (k as f64 + rng.gen_range(0.0..0.8)) * step;
            let r = rng.gen_range(r_min..r_max);
            inner = inner.min(r);
            PlanePoint::new(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    let mut holes = Vec::new();
    if with_hole {
        let m = rng.gen_range(3..10);
        let hstep = 2.0 * PI / m as f64;
        let hmax = 0.4 * inner;
        let hv: Vec<PlanePoint> = (0..m)
            .rev()
            .map(|k| {
                let a = (k as f64 + rng.gen_range(0.0..0.8)) * hstep;
                let r = rng.gen_range(0.3 * hmax..hmax);
                PlanePoint::new(cx + r * a.cos(), cy + r * a.sin())
            })
            .collect();
        holes.push(Ring::new(hv));
    }
    Polygon::new(Ring::new(vertices), holes)
}

pub fn edges_of(m: &MultiPolygon) -> Vec<Edge> {
    m.parts
        .iter()
        .flat_map(|p| p.rings())
        .flat_map(|r| r.edges())
        .map(|(a, b)| ((a.x, a.y), (b.x, b.y)))
        .collect()
}

/// Even-odd ray cast with on-edge points reported inside. Plain `f64`.
pub fn ray_cast_inside(edges: &[Edge], x: f64, y: f64) -> bool {
    let mut inside = false;
    for &((ax, ay), (bx, by)) in edges {
        let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if cross == 0.0 && x >= ax.min(bx) && x <= ax.max(bx) && y >= ay.min(by) && y <= ay.max(by)
        {
            return true;
        }
        if (ay > y) != (by > y) {
            let xi = ax + (y - ay) / (by - ay) * (bx - ax);
            if xi > x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Even-odd point location accelerated by horizontal slabs.
pub struct SlabLocator {
    edges: Vec<Edge>,
    y0: f64,
    dy: f64,
    slabs: Vec<Vec<usize>>,
}

impl SlabLocator {
    pub fn new(m: &MultiPolygon, y0: f64, y1: f64, n_slabs: usize) -> Self {
        let edges = edges_of(m);
        let dy = (y1 - y0) / n_slabs as f64;
        let mut slabs = vec![Vec::new(); n_slabs];
        for (i, &((_, ay), (_, by))) in edges.iter().enumerate() {
            let lo = (((ay.min(by) - y0) / dy).floor().max(0.0) as usize).min(n_slabs - 1);
            let hi = (((ay.max(by) - y0) / dy).floor().max(0.0) as usize).min(n_slabs - 1);
            for s in &mut slabs[lo..=hi] {
                s.push(i);
            }
        }
        SlabLocator {
            edges,
            y0,
            dy,
            slabs,
        }
    }

    pub fn inside(&self, x: f64, y: f64) -> bool {
        let s = (((y - self.y0) / self.dy).floor().max(0.0) as usize).min(self.slabs.len() - 1);
        let mut inside = false;
        for &i in &self.slabs[s] {
            let ((ax, ay), (bx, by)) = self.edges[i];
            if (ay > y) != (by > y) {
                let xi = ax + (y - ay) / (by - ay) * (bx - ax);
                if xi > x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Monte Carlo areas of `a ∩ b`, `a ∪ b` and `a \ b` with one jittered
/// sample per cell of a `k x k` stratification of the joint bounding box.
/// Also returns the plain-MC standard error for each estimate.
pub struct McAreas {
    pub intersection: f64,
    pub union: f64,
    pub difference: f64,
    pub a: f64,
    pub b: f64,
    pub sigma_intersection: f64,
    pub sigma_union: f64,
    pub sigma_difference: f64,
}

pub fn mc_areas<R: Rng>(rng: &mut R, a: &MultiPolygon, b: &MultiPolygon, k: usize) -> McAreas {
    let edges_all: Vec<Edge> = edges_of(a).into_iter().chain(edges_of(b)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for ((ax, ay), _) in &edges_all {
        x0 = x0.min(*ax);
        y0 = y0.min(*ay);
        x1 = x1.max(*ax);
        y1 = y1.max(*ay);
    }
    let la = SlabLocator::new(a, y0, y1, 512);
    let lb = SlabLocator::new(b, y0, y1, 512);
    let (cw, ch) = ((x1 - x0) / k as f64, (y1 - y0) / k as f64);
    let (mut ni, mut nu, mut nd, mut na, mut nb) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for i in 0..k {
        for j in 0..k {
            let x = x0 + (i as f64 + rng.gen::<f64>()) * cw;
            let y = y0 + (j as f64 + rng.gen::<f64>()) * ch;
            let (ia, ib) = (la.inside(x, y), lb.inside(x, y));
            na += ia as u64;
            nb += ib as u64;
            ni += (ia && ib) as u64;
            nu += (ia || ib) as u64;
            nd += (ia && !ib) as u64;
        }
    }
    let n = (k * k) as f64;
    let box_area = (x1 - x0) * (y1 - y0);
    let est = |c: u64| box_area * c as f64 / n;
    let sigma = |c: u64| {
        let p = c as f64 / n;
        box_area * (p * (1.0 - p) / n).sqrt()
    };
    McAreas {
        intersection: est(ni),
        union: est(nu),
        difference: est(nd),
        a: est(na),
        b: est(nb),
        sigma_intersection: sigma(ni),
        sigma_union: sigma(nu),
        sigma_difference: sigma(nd),
    }
}

/// Vertices of the disc polygon, built here independently of the library.
pub fn disc_vertices(cx: f64, cy: f64, radius: f64, segments: usize) -> Vec<(f64, f64)> {
    let n = segments as f64;
    let factor = n / (2.0 * PI) * (2.0 * PI / n).sin();
    let rv = radius / factor.sqrt();
    (0..segments)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n;
            (cx + rv * t.cos(), cy + rv * t.sin())
        })
        .collect()
}

/// x-intervals where the horizontal line at `y` is inside the even-odd
/// region bounded by `edges`.
pub fn spans(edges: &[Edge], y: f64) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = edges
        .iter()
        .filter(|((_, ay), (_, by))| (*ay > y) != (*by > y))
        .map(|&((ax, ay), (bx, by))| ax + (y - ay) / (by - ay) * (bx - ax))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn union_spans(mut s: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in s {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect_len(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Raster oracle: rows every `cell` meters (sampled at row centers); along
/// each row the covered length is exact. Returns `(tract_area, area inside
/// the tract and inside any disc)`.
pub fn raster_apportion(tract: &MultiPolygon, discs: &[Vec<(f64, f64)>], cell: f64) -> (f64, f64) {
    let tract_edges = edges_of(tract);
    let disc_edges: Vec<Vec<Edge>> = discs
        .iter()
        .map(|d| (0..d.len()).map(|i| (d[i], d[(i + 1) % d.len()])).collect())
        .collect();
    let y_lo = tract_edges
        .iter()
        .map(|e| e.0 .1)
        .fold(f64::INFINITY, f64::min);
    let y_hi = tract_edges
        .iter()
        .map(|e| e.0 .1)
        .fold(f64::NEG_INFINITY, f64::max);
    let row0 = (y_lo / cell).floor() as i64;
    let row1 = (y_hi / cell).ceil() as i64;
    let (mut total, mut covered) = (0.0, 0.0);
    for row in row0..row1 {
        let y = (row as f64 + 0.5) * cell;
        let t = spans(&tract_edges, y);
        if t.is_empty() {
            continue;
        }
        total += t.iter().map(|(a, b)| b - a).sum::<f64>() * cell;
        let z = union_spans(disc_edges.iter().flat_map(|e| spans(e, y)).collect());
        covered += intersect_len(&t, &z) * cell;
    }
    (total, covered)
}

/// Rounds every vertex to the millimeter grid.
pub fn snapped_mm(m: &MultiPolygon) -> MultiPolygon {
    let r = |ring: &Ring| {
        Ring::new(
            ring.vertices
                .iter()
                .map(|v| {
                    PlanePoint::new(
                        (v.x * 1000.0).round() / 1000.0,
                        (v.y * 1000.0).round() / 1000.0,
                    )
                })
                .collect(),
        )
    };
    MultiPolygon {
        parts: m
            .parts
            .iter()
            .map(|p| Polygon::new(r(&p.exterior), p.holes.iter().map(r).collect()))
            .collect(),
    }
}

/// A small synthetic study near the Texas coast: a jittered grid of
/// tracts, facilities scattered over it and flood points, some of them
/// close to facilities.
pub struct GeoCase {
    pub tracts: Vec<flood_exposure::ingest::Tract>,
    pub facilities: Vec<flood_exposure::ingest::Facility>,
    pub flood: flood_exposure::ingest::FloodScenario,
}

pub fn geo_case<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GeoCase {
    use flood_exposure::ingest::{Facility, FacilityKind, FloodPoint, FloodScenario, Tract};
    use flood_exposure::projection::{GeoMultiPolygon, GeoPoint, GeoPolygon};

    let (lon0, lat0) = (
        -95.2 + rng.gen_range(-0.2..0.2),
        29.4 + rng.gen_range(-0.2..0.2),
    );
    let cell = rng.gen_range(0.02..0.05);
    // Shared jittered grid nodes keep neighbouring tracts edge-matched.
    let node = |i: usize, j: usize, rng: &mut R| {
        let jitter = if i == 0 || j == 0 || i == cols || j == rows {
            0.0
        } else {
            0.3 * cell
        };
        (
            lon0 + i as f64 * cell + rng.gen_range(-jitter..=jitter),
            lat0 + j as f64 * cell + rng.gen_range(-jitter..=jitter),
        )
    };
    let mut nodes = vec![vec![(0.0, 0.0); rows + 1]; cols + 1];
    for (i, col) in nodes.iter_mut().enumerate() {
        for (j, n) in col.iter_mut().enumerate() {
            *n = node(i, j, rng);
        }
    }
    let g = |p: (f64, f64)| GeoPoint { lon: p.0, lat: p.1 };
    let mut tracts = Vec::new();
    for i in 0..cols {
        for j in 0..rows {
            let exterior = vec![
                g(nodes[i][j]),
                g(nodes[i + 1][j]),
                g(nodes[i + 1][j + 1]),
                g(nodes[i][j + 1]),
            ];
            tracts.push(Tract {
                geoid: format!("48{:03}{:06}", rng.gen_range(1..500), i * 100 + j),
                geometry: GeoMultiPolygon {
                    parts: vec![GeoPolygon {
                        exterior,
                        holes: vec![],
                    }],
                },
                total_pop: rng.gen_range(0..8000) as f64,
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
    let facilities: Vec<Facility> = (0..rng.gen_range(1..7))
        .map(|k| Facility {
            id: format!("F{k:03}"),
            name: format!("Facility {k}"),
            kind: kinds[rng.gen_range(0..3)],
            location: g((
                lon0 + rng.gen_range(-0.1 * w..1.1 * w),
                lat0 + rng.gen_range(-0.1 * h..1.1 * h),
            )),
        })
        .collect();
    let mut points = Vec::new();
    for f in &facilities {
        if rng.gen_bool(0.6) {
            // Within about 0.1 mile in most draws.
            let d = rng.gen_range(0.0..0.0018);
            let a = rng.gen_range(0.0..2.0 * PI);
            points.push(g((
                f.location.lon + d * a.cos(),
                f.location.lat + d * a.sin(),
            )));
        }
    }
    for _ in 0..rng.gen_range(0..40) {
        points.push(g((
            lon0 + rng.gen_range(-0.2 * w..1.2 * w),
            lat0 + rng.gen_range(-0.3 * h..0.0),
        )));
    }
    let flood = FloodScenario {
        label: "case".into(),
        points: points
            .into_iter()
            .map(|location| FloodPoint {
                location,
                depth_m: 1.0,
            })
            .collect(),
    };
    GeoCase {
        tracts,
        facilities,
        flood,
    }
}

/// Relative difference with a floor of one unit for near-zero values.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Random disc or star polygon (possibly holed) within a few km of the origin.
pub fn random_shape<R: Rng>(rng: &mut R) -> MultiPolygon {
    let cx = rng.gen_range(-3000.0..3000.0);
    let cy = rng.gen_range(-3000.0..3000.0);
    if rng.gen_bool(0.4) {
        let r = rng.gen_range(300.0..4000.0);
        MultiPolygon::from(buffer_disc(PlanePoint::new(cx, cy), r, &DiscSpec::default()).unwrap())
    } else {
        let r_max = rng.gen_range(500.0..5000.0);
        let hole = rng.gen_bool(0.3);
        MultiPolygon::from(star_polygon(rng, cx, cy, 0.3 * r_max, r_max, hole))
    }
}

/// Area on the sphere of a polygon whose edges are straight in lon/lat,
/// from the exact line integral `-R^2 * closed-integral of sin(phi) dlambda`.
pub fn band_integral_area(ring: &[(f64, f64)]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let (l0, p0) = (ring[i].0.to_radians(), ring[i].1.to_radians());
        let (l1, p1) = (
            ring[(i + 1) % n].0.to_radians(),
            ring[(i + 1) % n].1.to_radians(),
        );
        let dl = l1 - l0;
        if dl == 0.0 {
            continue;
        }
        if p1 == p0 {
            s += p0.sin() * dl;
        } else {
            let k = (p1 - p0) / dl;
            s += (p0.cos() - p1.cos()) / k;
        }
    }
    -AUTHALIC_RADIUS_M * AUTHALIC_RADIUS_M * s
}

/// Projects the ring with every edge densified along its lon/lat line.
pub fn projected_shoelace(spec: &ProjectionSpec, ring: &[(f64, f64)], steps: usize) -> f64 {
    let n = ring.len();
    let mut pts: Vec<PlanePoint> = Vec::with_capacity(n * steps);
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for k in 0..steps {
            let t = k as f64 / steps as f64;
            pts.push(
                spec.project(GeoPoint {
                    lon: a.0 + t * (b.0 - a.0),
                    lat: a.1 + t * (b.1 - a.1),
                })
                .unwrap(),
            );
        }
    }
    let m = pts.len();
    let mut s = 0.0;
    for i in 0..m {
        let (p, q) = (pts[i], pts[(i + 1) % m]);
        s += (p.x - pts[0].x) * (q.y - pts[0].y) - (q.x - pts[0].x) * (p.y - pts[0].y);
    }
    s / 2.0
}
