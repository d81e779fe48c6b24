use super::snap::{on_segment, orient, proper_crossing, ring_area2, GridPoint};
use super::{GeometryError, MultiPolygon, SnapGrid};
use crate::spatial_index::{RTree, Rect};

fn invalid(msg: String) -> GeometryError {
    GeometryError::InvalidTopology(msg)
}

/// Parity test for a doubled-coordinate probe that is off every edge.
fn probe_inside(ring: &[GridPoint], p: GridPoint) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = GridPoint::new(2 * ring[i].x, 2 * ring[i].y);
        let b = GridPoint::new(2 * ring[(i + 1) % n].x, 2 * ring[(i + 1) % n].y);
        if (a.y > p.y) != (b.y > p.y) && (orient(a, b, p) > 0) == (b.y > a.y) {
            inside = !inside;
        }
    }
    inside
}

fn probe(ring: &[GridPoint]) -> GridPoint {
    GridPoint::new(ring[0].x + ring[1].x, ring[0].y + ring[1].y)
}

/// Checks ring simplicity and orientation (exteriors counterclockwise,
/// holes clockwise), that no two edges cross or overlap, that holes lie
/// inside their exterior and that parts do not nest.
pub fn validate_multipolygon(m: &MultiPolygon, grid: SnapGrid) -> Result<(), GeometryError> {
    let g = grid.snap_multi(m)?;
    // (part, ring, a, b)
    let mut edges: Vec<(usize, usize, GridPoint, GridPoint)> = Vec::new();
    for (pi, poly) in g.iter().enumerate() {
        for (ri, ring) in poly.rings.iter().enumerate() {
            let mut sorted = ring.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() < 3 {
                return Err(GeometryError::DegenerateRing {
                    distinct: sorted.len(),
                });
            }
            if sorted.len() != ring.len() {
                return Err(invalid(format!("part {pi} ring {ri} repeats a vertex")));
            }
            let area = ring_area2(ring);
            if ri == 0 && area <= 0 {
                return Err(invalid(format!(
                    "part {pi} exterior is not counterclockwise"
                )));
            }
            if ri > 0 && area >= 0 {
                return Err(invalid(format!("part {pi} hole {ri} is not clockwise")));
            }
            let n = ring.len();
            edges.extend((0..n).map(|i| (pi, ri, ring[i], ring[(i + 1) % n])));
        }
    }

    let rect =
        |a: GridPoint, b: GridPoint| Rect::new(a.x as f64, a.y as f64, b.x as f64, b.y as f64);
    let index = RTree::bulk_build(
        edges
            .iter()
            .enumerate()
            .map(|(i, e)| (rect(e.2, e.3), i))
            .collect(),
    );
    for (i, &(pi, ri, a, b)) in edges.iter().enumerate() {
        for j in index.query_range(&rect(a, b)) {
            if j <= i {
                continue;
            }
            let (pj, rj, c, d) = edges[j];
            if proper_crossing(a, b, c, d).is_some() {
                return Err(invalid(format!("edges cross near {a:?}")));
            }
            let same_ring = pi == pj && ri == rj;
            for (s, t, p) in [(a, b, c), (a, b, d), (c, d, a), (c, d, b)] {
                if p != s && p != t && on_segment(s, t, p) {
                    // A vertex on another ring's edge is a point touch; on its own ring it is a self-touch.
                    let shares = [a, b].contains(&c) || [a, b].contains(&d);
                    if same_ring || shares {
                        return Err(invalid(format!("edges overlap or self-touch at {p:?}")));
                    }
                }
            }
        }
    }

    for (pi, poly) in g.iter().enumerate() {
        for hole in &poly.rings[1..] {
            if !probe_inside(&poly.rings[0], probe(hole)) {
                return Err(invalid(format!(
                    "part {pi} has a hole outside its exterior"
                )));
            }
        }
        for (pj, other) in g.iter().enumerate() {
            if pi == pj {
                continue;
            }
            let q = probe(&poly.rings[0]);
            if probe_inside(&other.rings[0], q)
                && !other.rings[1..].iter().any(|h| probe_inside(h, q))
            {
                return Err(invalid(format!("part {pi} lies inside part {pj}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Polygon, Ring};

    fn poly(coords: &[(f64, f64)]) -> Polygon {
        Polygon::new(Ring::from_coords(coords), vec![])
    }

    #[test]
    fn accepts_square_with_hole() {
        let p = Polygon::new(
            Ring::from_coords(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![Ring::from_coords(&[
                (1.0, 1.0),
                (1.0, 3.0),
                (3.0, 3.0),
                (3.0, 1.0),
            ])],
        );
        validate_multipolygon(&p.into(), SnapGrid::default()).unwrap();
    }

    #[test]
    fn rejects_bow_tie() {
        let m = poly(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)]).into();
        assert!(validate_multipolygon(&m, SnapGrid::default()).is_err());
    }

    #[test]
    fn rejects_clockwise_exterior() {
        let m = poly(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).into();
        assert!(validate_multipolygon(&m, SnapGrid::default()).is_err());
    }

    #[test]
    fn rejects_nested_parts() {
        let m = MultiPolygon::new(vec![
            poly(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            poly(&[(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)]),
        ]);
        assert!(validate_multipolygon(&m, SnapGrid::default()).is_err());
    }

    #[test]
    fn accepts_corner_touching_parts() {
        let m = MultiPolygon::new(vec![
            poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
            poly(&[(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)]),
        ]);
        validate_multipolygon(&m, SnapGrid::default()).unwrap();
    }
}
