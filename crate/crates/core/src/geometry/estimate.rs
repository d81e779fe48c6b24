//! Deterministic adaptive-quadtree area estimate, independent of the
//! overlay code path. Cells crossed by no edge are classified whole by
//! their center; crossed cells are subdivided until they fall below the
//! minimum cell area.

use super::MultiPolygon;
use crate::projection::PlanePoint;
use crate::spatial_index::Rect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadtreeEstimate {
    /// Area of cells found entirely inside.
    pub inside: f64,
    /// Area of minimum-size cells still crossed by an edge.
    pub boundary: f64,
    /// `inside` plus the boundary cells whose center is inside.
    pub estimate: f64,
}

impl QuadtreeEstimate {
    pub fn lower(&self) -> f64 {
        self.inside
    }

    pub fn upper(&self) -> f64 {
        self.inside + self.boundary
    }
}

type Edge = (PlanePoint, PlanePoint);

fn segment_meets_rect(a: PlanePoint, b: PlanePoint, r: &Rect) -> bool {
    if a.x.max(b.x) < r.min_x
        || a.x.min(b.x) > r.max_x
        || a.y.max(b.y) < r.min_y
        || a.y.min(b.y) > r.max_y
    {
        return false;
    }
    let side = |x: f64, y: f64| ((b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x)).signum();
    let s = [
        side(r.min_x, r.min_y),
        side(r.max_x, r.min_y),
        side(r.max_x, r.max_y),
        side(r.min_x, r.max_y),
    ];
    !(s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0))
}

fn parity_inside(edges: &[Edge], p: PlanePoint) -> bool {
    let mut inside = false;
    for (a, b) in edges {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn quadtree_area(m: &MultiPolygon, min_cell_area: f64) -> QuadtreeEstimate {
    let mut est = QuadtreeEstimate {
        inside: 0.0,
        boundary: 0.0,
        estimate: 0.0,
    };
    let Some(bbox) = m.bbox() else { return est };
    let edges: Vec<Edge> = m
        .parts
        .iter()
        .flat_map(|p| p.rings())
        .flat_map(|r| r.edges())
        .collect();
    // Square root cell so every level stays square.
    let side = (bbox.max_x - bbox.min_x).max(bbox.max_y - bbox.min_y);
    let root = Rect::new(bbox.min_x, bbox.min_y, bbox.min_x + side, bbox.min_y + side);
    let all: Vec<usize> = (0..edges.len()).collect();
    let mut stack = vec![(root, all)];
    while let Some((cell, candidates)) = stack.pop() {
        let crossing: Vec<usize> = candidates
            .into_iter()
            .filter(|&i| segment_meets_rect(edges[i].0, edges[i].1, &cell))
            .collect();
        let area = (cell.max_x - cell.min_x) * (cell.max_y - cell.min_y);
        let center = PlanePoint::new(
            (cell.min_x + cell.max_x) / 2.0,
            (cell.min_y + cell.max_y) / 2.0,
        );
        if crossing.is_empty() {
            if parity_inside(&edges, center) {
                est.inside += area;
                est.estimate += area;
            }
            continue;
        }
        if area <= min_cell_area {
            est.boundary += area;
            if parity_inside(&edges, center) {
                est.estimate += area;
            }
            continue;
        }
        let (mx, my) = (center.x, center.y);
        for q in [
            Rect::new(cell.min_x, cell.min_y, mx, my),
            Rect::new(mx, cell.min_y, cell.max_x, my),
            Rect::new(cell.min_x, my, mx, cell.max_y),
            Rect::new(mx, my, cell.max_x, cell.max_y),
        ] {
            stack.push((q, crossing.clone()));
        }
    }
    est
}
