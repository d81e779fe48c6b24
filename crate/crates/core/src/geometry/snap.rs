//! Integer grid coordinates and exact predicates.
//!
//! Grid coordinates are bounded by [`MAX_GRID_COORD`] so that every
//! predicate below fits in `i128` without overflow, including the rational
//! intersection rounding.

use std::cmp::Ordering;

use super::{GeometryError, MultiPolygon, PlanePoint, SnapGrid};

/// |coordinate| bound in grid units (about 1.1e9 m at 1 mm resolution).
pub(crate) const MAX_GRID_COORD: i64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }
}

/// One ring-structured polygon on the grid: `rings[0]` is the exterior.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct GridPolygon {
    pub rings: Vec<Vec<GridPoint>>,
}

pub(crate) type GridMulti = Vec<GridPolygon>;

impl SnapGrid {
    fn snap_coord(&self, v: f64) -> Result<i64, GeometryError> {
        let q = (v / self.resolution).round();
        if !q.is_finite() || q.abs() > MAX_GRID_COORD as f64 {
            return Err(GeometryError::CoordinateOutOfRange(v));
        }
        Ok(q as i64)
    }

    pub(crate) fn snap(&self, p: PlanePoint) -> Result<GridPoint, GeometryError> {
        Ok(GridPoint {
            x: self.snap_coord(p.x)?,
            y: self.snap_coord(p.y)?,
        })
    }

    pub(crate) fn to_plane(&self, g: GridPoint) -> PlanePoint {
        // Division by the exact scale keeps `snap(to_plane(g)) == g`.
        let scale = 1.0 / self.resolution;
        PlanePoint::new(g.x as f64 / scale, g.y as f64 / scale)
    }

    pub(crate) fn snap_multi(&self, m: &MultiPolygon) -> Result<GridMulti, GeometryError> {
        m.parts
            .iter()
            .map(|p| {
                let rings = p
                    .rings()
                    .map(|r| {
                        r.vertices
                            .iter()
                            .map(|&v| self.snap(v))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(GridPolygon { rings })
            })
            .collect()
    }

    pub(crate) fn unsnap_multi(&self, m: &GridMulti) -> MultiPolygon {
        use super::{Polygon, Ring};
        let ring = |r: &Vec<GridPoint>| Ring {
            vertices: r.iter().map(|&g| self.to_plane(g)).collect(),
        };
        MultiPolygon {
            parts: m
                .iter()
                .map(|p| Polygon {
                    exterior: ring(&p.rings[0]),
                    holes: p.rings[1..].iter().map(ring).collect(),
                })
                .collect(),
        }
    }
}

/// Twice the signed area of triangle `abc`; positive when `c` is left of `a -> b`.
#[inline]
pub(crate) fn orient(a: GridPoint, b: GridPoint, c: GridPoint) -> i128 {
    let (abx, aby) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
    let (acx, acy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
    abx * acy - aby * acx
}

#[inline]
pub(crate) fn dot(a: GridPoint, b: GridPoint, c: GridPoint) -> i128 {
    ((b.x - a.x) as i128) * ((c.x - a.x) as i128) + ((b.y - a.y) as i128) * ((c.y - a.y) as i128)
}

/// Twice the signed ring area, exact.
pub(crate) fn ring_area2(r: &[GridPoint]) -> i128 {
    let n = r.len();
    if n < 3 {
        return 0;
    }
    let o = r[0];
    (1..n - 1).map(|i| orient(o, r[i], r[i + 1])).sum()
}

/// True when `p` lies on the closed segment `ab`.
#[inline]
pub(crate) fn on_segment(a: GridPoint, b: GridPoint, p: GridPoint) -> bool {
    orient(a, b, p) == 0
        && a.x.min(b.x) <= p.x
        && p.x <= a.x.max(b.x)
        && a.y.min(b.y) <= p.y
        && p.y <= a.y.max(b.y)
}

/// Rounds `num / den` to the nearest integer (ties toward +inf); `den != 0`.
#[inline]
fn round_div(num: i128, den: i128) -> i128 {
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    (2 * num + den).div_euclid(2 * den)
}

/// If segments `ab` and `cd` cross at a single point interior to both,
/// returns that point rounded to the grid.
pub(crate) fn proper_crossing(
    a: GridPoint,
    b: GridPoint,
    c: GridPoint,
    d: GridPoint,
) -> Option<GridPoint> {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    if d1 == 0 || d2 == 0 || (d1 > 0) == (d2 > 0) {
        return None;
    }
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if d3 == 0 || d4 == 0 || (d3 > 0) == (d4 > 0) {
        return None;
    }
    // a + (b - a) * d1 / (d1 - d2)
    let den = d1 - d2;
    let x = round_div(a.x as i128 * den + (b.x - a.x) as i128 * d1, den);
    let y = round_div(a.y as i128 * den + (b.y - a.y) as i128 * d1, den);
    Some(GridPoint::new(x as i64, y as i64))
}

/// Whether segment `ab` meets the closed unit pixel centered on `c`.
pub(crate) fn segment_hits_pixel(a: GridPoint, b: GridPoint, c: GridPoint) -> bool {
    // Doubled coordinates make the pixel corners integral.
    let (ax, ay, bx, by) = (
        2 * a.x as i128,
        2 * a.y as i128,
        2 * b.x as i128,
        2 * b.y as i128,
    );
    let (lo_x, hi_x, lo_y, hi_y) = (
        2 * c.x as i128 - 1,
        2 * c.x as i128 + 1,
        2 * c.y as i128 - 1,
        2 * c.y as i128 + 1,
    );
    if ax.max(bx) < lo_x || ax.min(bx) > hi_x || ay.max(by) < lo_y || ay.min(by) > hi_y {
        return false;
    }
    let (dx, dy) = (bx - ax, by - ay);
    let side = |px: i128, py: i128| (dx * (py - ay) - dy * (px - ax)).signum();
    let s = [
        side(lo_x, lo_y),
        side(hi_x, lo_y),
        side(hi_x, hi_y),
        side(lo_x, hi_y),
    ];
    !(s.iter().all(|&v| v > 0) || s.iter().all(|&v| v < 0))
}

/// Counterclockwise angular order of direction vectors starting at +x.
pub(crate) fn angle_cmp(u: (i64, i64), v: (i64, i64)) -> Ordering {
    let half = |(x, y): (i64, i64)| if y > 0 || (y == 0 && x > 0) { 0 } else { 1 };
    half(u).cmp(&half(v)).then_with(|| {
        let cross = (u.0 as i128) * (v.1 as i128) - (u.1 as i128) * (v.0 as i128);
        0.cmp(&cross)
    })
}
