//! Point-in-polygon on the snap grid. Points on a boundary count as inside.

use super::snap::{on_segment, orient, ring_area2, GridMulti, GridPoint};
use super::{MultiPolygon, SnapGrid};
use crate::projection::PlanePoint;

fn snapped(m: &MultiPolygon, p: PlanePoint, grid: SnapGrid) -> Option<(GridMulti, GridPoint)> {
    Some((grid.snap_multi(m).ok()?, grid.snap(p).ok()?))
}

fn ring_edges(ring: &[GridPoint]) -> impl Iterator<Item = (GridPoint, GridPoint)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
}

fn on_boundary(m: &GridMulti, q: GridPoint) -> bool {
    m.iter()
        .flat_map(|p| p.rings.iter())
        .flat_map(|r| ring_edges(r))
        .any(|(a, b)| on_segment(a, b, q))
}

/// Crossing of the rightward horizontal ray from `q` with edge `ab`, using
/// the half-open rule on `y`. Returns +1 for an upward edge, -1 for a
/// downward one, 0 when the ray misses.
fn crossing(a: GridPoint, b: GridPoint, q: GridPoint) -> i32 {
    if (a.y > q.y) == (b.y > q.y) {
        return 0;
    }
    let o = orient(a, b, q);
    if b.y > a.y && o > 0 {
        1
    } else if b.y < a.y && o < 0 {
        -1
    } else {
        0
    }
}

fn even_odd(m: &GridMulti, q: GridPoint) -> bool {
    let crossings = m
        .iter()
        .flat_map(|p| p.rings.iter())
        .flat_map(|r| ring_edges(r))
        .filter(|(a, b)| crossing(*a, *b, q) != 0);
    crossings.count() % 2 == 1
}

fn winding(m: &GridMulti, q: GridPoint) -> i32 {
    let mut total = 0;
    for poly in m {
        for (k, ring) in poly.rings.iter().enumerate() {
            // Exterior counted counterclockwise, holes clockwise.
            let sign = if (ring_area2(ring) > 0) == (k == 0) {
                1
            } else {
                -1
            };
            total += sign
                * ring_edges(ring)
                    .map(|(a, b)| crossing(a, b, q))
                    .sum::<i32>();
        }
    }
    total
}

pub fn contains_even_odd(m: &MultiPolygon, p: PlanePoint, grid: SnapGrid) -> bool {
    let Some((g, q)) = snapped(m, p, grid) else {
        return false;
    };
    on_boundary(&g, q) || even_odd(&g, q)
}

pub fn contains_winding(m: &MultiPolygon, p: PlanePoint, grid: SnapGrid) -> bool {
    let Some((g, q)) = snapped(m, p, grid) else {
        return false;
    };
    on_boundary(&g, q) || winding(&g, q) != 0
}

pub fn contains_on_grid(m: &MultiPolygon, p: PlanePoint, grid: SnapGrid) -> bool {
    contains_winding(m, p, grid)
}

/// Point-in-polygon at the default 1 mm grid.
pub fn contains(m: &MultiPolygon, p: PlanePoint) -> bool {
    contains_on_grid(m, p, SnapGrid::default())
}
