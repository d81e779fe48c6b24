use super::{GeometryError, MultiPolygon, Polygon, Ring};

fn distinct_vertices(r: &Ring) -> usize {
    let mut pts: Vec<(u64, u64)> = r
        .vertices
        .iter()
        .map(|p| (p.x.to_bits(), p.y.to_bits()))
        .collect();
    pts.sort_unstable();
    pts.dedup();
    pts.len()
}

/// Signed shoelace area; positive for counterclockwise rings.
pub fn ring_area(r: &Ring) -> Result<f64, GeometryError> {
    let distinct = distinct_vertices(r);
    if distinct < 3 {
        return Err(GeometryError::DegenerateRing { distinct });
    }
    // Relative to the first vertex so large projected offsets don't cancel.
    let o = r.vertices[0];
    let twice: f64 = r
        .edges()
        .map(|(a, b)| (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y))
        .sum();
    Ok(twice / 2.0)
}

/// Exterior area minus hole areas, independent of ring orientation.
pub fn polygon_area(p: &Polygon) -> Result<f64, GeometryError> {
    let outer = ring_area(&p.exterior)?.abs();
    let mut holes = 0.0;
    for h in &p.holes {
        holes += ring_area(h)?.abs();
    }
    let area = outer - holes;
    if area < 0.0 {
        return Err(GeometryError::InvalidTopology(format!(
            "holes ({holes}) exceed exterior area ({outer})"
        )));
    }
    Ok(area)
}

pub fn multipolygon_area(m: &MultiPolygon) -> Result<f64, GeometryError> {
    m.parts.iter().map(polygon_area).sum()
}
