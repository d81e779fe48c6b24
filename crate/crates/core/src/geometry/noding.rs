//! Turns the boundary segments of the overlay operands into a planar
//! arrangement: after noding, two edges meet only at shared endpoints.
//!
//! Proper crossings are resolved by hot-pixel snap rounding: every segment
//! is rerouted through the centers of all hot pixels it touches, where the
//! hot pixels are the segment endpoints plus the rounded crossing points.
//! The result is checked again and the procedure repeats on the fragments
//! until no crossing is left. Remaining T-junctions and collinear overlaps
//! are then split exactly at existing vertices.

use std::collections::{BTreeMap, BTreeSet};

use super::snap::{dot, on_segment, proper_crossing, segment_hits_pixel, GridPoint};
use super::GeometryError;
use crate::spatial_index::{RTree, Rect};

const MAX_ROUNDS: usize = 32;

/// Directed boundary segment belonging to operand 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Segment {
    pub a: GridPoint,
    pub b: GridPoint,
    pub operand: usize,
}

/// Undirected edge `(lo, hi)` with `lo < hi`, mapped to the net number of
/// boundary copies per operand running from `lo` to `hi`.
pub(crate) type EdgeMap = BTreeMap<(GridPoint, GridPoint), [i32; 2]>;

fn seg_rect(a: GridPoint, b: GridPoint) -> Rect {
    Rect::new(a.x as f64, a.y as f64, b.x as f64, b.y as f64)
}

fn segment_index(segs: &[Segment]) -> RTree {
    RTree::bulk_build(
        segs.iter()
            .enumerate()
            .map(|(i, s)| (seg_rect(s.a, s.b), i))
            .collect(),
    )
}

pub(crate) fn node(segments: Vec<Segment>) -> Result<EdgeMap, GeometryError> {
    let mut segs: Vec<Segment> = segments.into_iter().filter(|s| s.a != s.b).collect();
    segs.sort_unstable();
    for _ in 0..MAX_ROUNDS {
        let crossings = find_crossings(&segs);
        if crossings.is_empty() {
            return Ok(merge(split_at_vertices(&segs)));
        }
        let mut hot = crossings;
        for s in &segs {
            hot.insert(s.a);
            hot.insert(s.b);
        }
        segs = snap_round(&segs, &hot);
    }
    Err(GeometryError::Topology(
        "snap rounding did not converge".into(),
    ))
}

fn find_crossings(segs: &[Segment]) -> BTreeSet<GridPoint> {
    let index = segment_index(segs);
    let mut out = BTreeSet::new();
    for (i, s) in segs.iter().enumerate() {
        for j in index.query_range(&seg_rect(s.a, s.b)) {
            if j <= i {
                continue;
            }
            let t = &segs[j];
            if let Some(p) = proper_crossing(s.a, s.b, t.a, t.b) {
                out.insert(p);
            }
        }
    }
    out
}

fn snap_round(segs: &[Segment], hot: &BTreeSet<GridPoint>) -> Vec<Segment> {
    let pixels: Vec<GridPoint> = hot.iter().copied().collect();
    let index = RTree::bulk_build(
        pixels
            .iter()
            .enumerate()
            .map(|(i, p)| (seg_rect(*p, *p), i))
            .collect(),
    );
    let mut out = Vec::with_capacity(segs.len());
    for s in segs {
        let window = seg_rect(s.a, s.b).expanded(0.5);
        let mut via: Vec<GridPoint> = index
            .query_range(&window)
            .into_iter()
            .map(|i| pixels[i])
            .filter(|&c| c != s.a && c != s.b && segment_hits_pixel(s.a, s.b, c))
            .collect();
        via.sort_by_key(|&c| (dot(s.a, s.b, c), c));
        let mut prev = s.a;
        for p in via.into_iter().chain(std::iter::once(s.b)) {
            if p != prev {
                out.push(Segment {
                    a: prev,
                    b: p,
                    operand: s.operand,
                });
                prev = p;
            }
        }
    }
    out.sort_unstable();
    out
}

/// Splits every segment at the vertices lying in its relative interior.
/// Assumes there are no proper crossings.
fn split_at_vertices(segs: &[Segment]) -> Vec<Segment> {
    let index = segment_index(segs);
    let mut cuts: Vec<Vec<GridPoint>> = vec![Vec::new(); segs.len()];
    for (i, s) in segs.iter().enumerate() {
        for j in index.query_range(&seg_rect(s.a, s.b)) {
            if j == i {
                continue;
            }
            let t = &segs[j];
            for p in [t.a, t.b] {
                if p != s.a && p != s.b && on_segment(s.a, s.b, p) {
                    cuts[i].push(p);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(segs.len());
    for (s, mut c) in segs.iter().zip(cuts) {
        c.sort_by_key(|&p| dot(s.a, s.b, p));
        c.dedup();
        let mut prev = s.a;
        for p in c.into_iter().chain(std::iter::once(s.b)) {
            out.push(Segment {
                a: prev,
                b: p,
                operand: s.operand,
            });
            prev = p;
        }
    }
    out
}

fn merge(segs: Vec<Segment>) -> EdgeMap {
    let mut edges = EdgeMap::new();
    for s in segs {
        let (key, sign) = if s.a < s.b {
            ((s.a, s.b), 1)
        } else {
            ((s.b, s.a), -1)
        };
        edges.entry(key).or_insert([0, 0])[s.operand] += sign;
    }
    edges.retain(|_, w| *w != [0, 0]);
    edges
}
