//! Boolean operations on snapped polygons.
//!
//! The noded arrangement is turned into a half-edge structure. Every
//! half-edge is labeled with the winding numbers of both operands for the
//! face on its left: labels are equal along a face cycle and change by the
//! edge's boundary multiplicity when crossing to the twin. One label per
//! connected component is seeded by an exact vertical ray cast, which also
//! places nested components (holes, islands) correctly.
//!
//! A face belongs to an operand when its winding number is non-zero. Result
//! boundary half-edges (result face on the left, non-result on the right)
//! are chained by taking the first boundary half-edge clockwise from the
//! reversed incoming direction, which keeps regions touching at a vertex
//! apart. Closed walks that revisit a vertex are split there, so every
//! output ring is simple.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use super::noding::{self, EdgeMap, Segment};
use super::snap::{angle_cmp, orient, ring_area2, GridMulti, GridPoint, GridPolygon};
use super::{BooleanOp, GeometryError, MultiPolygon, Polygon, SnapGrid};

pub fn boolean_op(
    a: &MultiPolygon,
    b: &MultiPolygon,
    op: BooleanOp,
    grid: SnapGrid,
) -> Result<MultiPolygon, GeometryError> {
    let ga = grid.snap_multi(a)?;
    let gb = grid.snap_multi(b)?;
    Ok(grid.unsnap_multi(&overlay(&ga, &gb, op)?))
}

/// Union of many polygons by a balanced tree of pairwise unions.
///
/// Inputs are put in a canonical order first, so any permutation of the
/// same discs produces the same output. A single valid input is returned
/// as is, re-wound but not snapped.
pub fn union_all(discs: &[Polygon], grid: SnapGrid) -> Result<MultiPolygon, GeometryError> {
    let mut level: Vec<GridMulti> = discs
        .iter()
        .map(|p| grid.snap_multi(&MultiPolygon::from(p.clone())))
        .collect::<Result<_, _>>()?;
    if let [single] = discs {
        // Nothing to merge: a valid input is its own union, unsnapped.
        let m = MultiPolygon::from(single.oriented());
        if super::validate_multipolygon(&m, grid).is_ok() {
            return Ok(m);
        }
    }
    level.sort();
    if level.len() == 1 {
        level[0] = overlay(&level[0], &Vec::new(), BooleanOp::Union)?;
    }
    while level.len() > 1 {
        level = level
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => overlay(a, b, BooleanOp::Union),
                [a] => Ok(a.clone()),
                _ => unreachable!(),
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(grid.unsnap_multi(&level.pop().unwrap_or_default()))
}

fn grid_bbox(m: &GridMulti) -> Option<(GridPoint, GridPoint)> {
    let mut it = m.iter().flat_map(|p| p.rings[0].iter());
    let first = *it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (
            GridPoint::new(lo.x.min(p.x), lo.y.min(p.y)),
            GridPoint::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

fn boxes_overlap(a: (GridPoint, GridPoint), b: (GridPoint, GridPoint)) -> bool {
    a.0.x <= b.1.x && b.0.x <= a.1.x && a.0.y <= b.1.y && b.0.y <= a.1.y
}

/// Keeps only the polygons of `m` whose bounding box meets `window`.
fn near(m: &GridMulti, window: Option<(GridPoint, GridPoint)>) -> GridMulti {
    let Some(w) = window else { return Vec::new() };
    m.iter()
        .filter(|p| grid_bbox(&vec![(*p).clone()]).is_some_and(|b| boxes_overlap(b, w)))
        .cloned()
        .collect()
}

pub(crate) fn overlay(
    a: &GridMulti,
    b: &GridMulti,
    op: BooleanOp,
) -> Result<GridMulti, GeometryError> {
    let (a, b) = match op {
        BooleanOp::Intersection => (near(a, grid_bbox(b)), near(b, grid_bbox(a))),
        BooleanOp::Difference => (a.clone(), near(b, grid_bbox(a))),
        BooleanOp::Union => (a.clone(), b.clone()),
    };
    let mut segments = Vec::new();
    push_segments(&a, 0, &mut segments);
    push_segments(&b, 1, &mut segments);
    let edges = noding::node(segments)?;
    let member = move |w: [i32; 2]| match op {
        BooleanOp::Union => w[0] != 0 || w[1] != 0,
        BooleanOp::Intersection => w[0] != 0 && w[1] != 0,
        BooleanOp::Difference => w[0] != 0 && w[1] == 0,
    };
    extract(&edges, member)
}

/// Emits ring edges with exteriors counterclockwise and holes clockwise.
fn push_segments(m: &GridMulti, operand: usize, out: &mut Vec<Segment>) {
    for poly in m {
        for (k, ring) in poly.rings.iter().enumerate() {
            let area = ring_area2(ring);
            if area == 0 {
                continue;
            }
            let reverse = (area > 0) != (k == 0);
            let n = ring.len();
            for i in 0..n {
                let (p, q) = (ring[i], ring[(i + 1) % n]);
                let (a, b) = if reverse { (q, p) } else { (p, q) };
                out.push(Segment { a, b, operand });
            }
        }
    }
}

struct Arrangement {
    verts: Vec<GridPoint>,
    /// `(lo, hi)` vertex ids and winding multiplicities per undirected edge.
    edges: Vec<(usize, usize, [i32; 2])>,
    /// Outgoing half-edges per vertex in counterclockwise order.
    outgoing: Vec<Vec<usize>>,
    /// Position of each half-edge in its origin's `outgoing` list.
    pos: Vec<usize>,
}

impl Arrangement {
    fn build(map: &EdgeMap) -> Self {
        let mut verts: Vec<GridPoint> = map.keys().flat_map(|(a, b)| [*a, *b]).collect();
        verts.sort_unstable();
        verts.dedup();
        let vid: HashMap<GridPoint, usize> =
            verts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let edges: Vec<_> = map.iter().map(|((a, b), w)| (vid[a], vid[b], *w)).collect();
        let mut outgoing = vec![Vec::new(); verts.len()];
        for (k, (u, v, _)) in edges.iter().enumerate() {
            outgoing[*u].push(2 * k);
            outgoing[*v].push(2 * k + 1);
        }
        let mut arr = Arrangement {
            verts,
            edges,
            outgoing,
            pos: Vec::new(),
        };
        let mut outgoing = std::mem::take(&mut arr.outgoing);
        for list in &mut outgoing {
            list.sort_by(|&h, &g| angle_cmp(arr.direction(h), arr.direction(g)));
        }
        let mut pos = vec![0; 2 * arr.edges.len()];
        for list in &outgoing {
            for (i, &h) in list.iter().enumerate() {
                pos[h] = i;
            }
        }
        arr.outgoing = outgoing;
        arr.pos = pos;
        arr
    }

    fn origin(&self, h: usize) -> usize {
        let (u, v, _) = self.edges[h / 2];
        if h % 2 == 0 {
            u
        } else {
            v
        }
    }

    fn target(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    fn direction(&self, h: usize) -> (i64, i64) {
        let (a, b) = (self.verts[self.origin(h)], self.verts[self.target(h)]);
        (b.x - a.x, b.y - a.y)
    }

    /// Boundary multiplicity along `h`; crossing from its left to its right
    /// subtracts this from the winding numbers.
    fn multiplicity(&self, h: usize) -> [i32; 2] {
        let w = self.edges[h / 2].2;
        if h % 2 == 0 {
            w
        } else {
            [-w[0], -w[1]]
        }
    }

    /// Next half-edge on the face left of `h`.
    fn next(&self, h: usize) -> usize {
        let list = &self.outgoing[self.target(h)];
        list[(self.pos[h ^ 1] + list.len() - 1) % list.len()]
    }

    /// Winding numbers just right of edge `k` (below it, or east of it when
    /// vertical), from a vertical ray cast down from its midpoint.
    fn winding_right_of(&self, k: usize) -> [i32; 2] {
        let (u, v, _) = self.edges[k];
        let (pu, pv) = (self.verts[u], self.verts[v]);
        let m = GridPoint::new(pu.x + pv.x, pu.y + pv.y);
        let mut w = [0, 0];
        for (j, &(a, b, mult)) in self.edges.iter().enumerate() {
            if j == k {
                continue;
            }
            let (pa, pb) = (self.verts[a], self.verts[b]);
            let (ax2, bx2) = (2 * pa.x, 2 * pb.x);
            if !(ax2 <= m.x && m.x < bx2) {
                continue;
            }
            let a2 = GridPoint::new(ax2, 2 * pa.y);
            let b2 = GridPoint::new(bx2, 2 * pb.y);
            if orient(a2, b2, m) > 0 {
                w[0] += mult[0];
                w[1] += mult[1];
            }
        }
        w
    }

    fn label(&self) -> Result<Vec<[i32; 2]>, GeometryError> {
        let n = 2 * self.edges.len();
        let mut labels: Vec<Option<[i32; 2]>> = vec![None; n];
        let mut queue = VecDeque::new();
        for k in 0..self.edges.len() {
            if labels[2 * k].is_some() {
                continue;
            }
            let right = self.winding_right_of(k);
            let w = self.edges[k].2;
            labels[2 * k + 1] = Some(right);
            labels[2 * k] = Some([right[0] + w[0], right[1] + w[1]]);
            queue.extend([2 * k, 2 * k + 1]);
            while let Some(h) = queue.pop_front() {
                let l = labels[h].expect("queued half-edges are labeled");
                let m = self.multiplicity(h);
                for (g, lg) in [(self.next(h), l), (h ^ 1, [l[0] - m[0], l[1] - m[1]])] {
                    match labels[g] {
                        None => {
                            labels[g] = Some(lg);
                            queue.push_back(g);
                        }
                        Some(existing) if existing != lg => {
                            return Err(GeometryError::Topology(format!(
                                "inconsistent winding at {:?}",
                                self.verts[self.origin(g)]
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(labels.into_iter().map(|l| l.unwrap_or([0, 0])).collect())
    }
}

fn extract<F: Fn([i32; 2]) -> bool>(map: &EdgeMap, member: F) -> Result<GridMulti, GeometryError> {
    if map.is_empty() {
        return Ok(Vec::new());
    }
    let arr = Arrangement::build(map);
    let labels = arr.label()?;
    let boundary: Vec<bool> = (0..labels.len())
        .map(|h| member(labels[h]) && !member(labels[h ^ 1]))
        .collect();

    let next_boundary = |h: usize| -> Result<usize, GeometryError> {
        let list = &arr.outgoing[arr.target(h)];
        let start = arr.pos[h ^ 1];
        (1..=list.len())
            .map(|step| list[(start + list.len() - step) % list.len()])
            .find(|&g| boundary[g])
            .ok_or_else(|| GeometryError::Topology("open result boundary".into()))
    };

    let mut used = vec![false; labels.len()];
    let mut shells = Vec::new();
    let mut holes = Vec::new();
    for h0 in 0..labels.len() {
        if !boundary[h0] || used[h0] {
            continue;
        }
        let mut walk = Vec::new();
        let mut h = h0;
        loop {
            if used[h] {
                return Err(GeometryError::Topology(
                    "result boundary walk revisited an edge".into(),
                ));
            }
            used[h] = true;
            walk.push(arr.verts[arr.origin(h)]);
            h = next_boundary(h)?;
            if h == h0 {
                break;
            }
        }
        for ring in split_simple(walk) {
            let area = ring_area2(&ring);
            match area.signum() {
                1 => shells.push((area, canonical_ring(ring))),
                -1 => holes.push(canonical_ring(ring)),
                _ => {}
            }
        }
    }
    assemble(shells, holes)
}

/// Splits a closed vertex walk into simple loops at repeated vertices.
fn split_simple(walk: Vec<GridPoint>) -> Vec<Vec<GridPoint>> {
    let mut loops = Vec::new();
    let mut stack: Vec<GridPoint> = Vec::with_capacity(walk.len());
    let mut seen: HashMap<GridPoint, usize> = HashMap::new();
    for p in walk {
        if let Some(&i) = seen.get(&p) {
            let lp: Vec<GridPoint> = stack.drain(i + 1..).collect();
            for q in &lp {
                seen.remove(q);
            }
            let mut ring = vec![p];
            ring.extend(lp);
            loops.push(ring);
        } else {
            seen.insert(p, stack.len());
            stack.push(p);
        }
    }
    loops.push(stack);
    loops.retain(|r| r.len() >= 3);
    loops
}

/// Drops collinear vertices and rotates the ring to start at its smallest
/// vertex.
fn canonical_ring(ring: Vec<GridPoint>) -> Vec<GridPoint> {
    let mut ring = ring;
    loop {
        let n = ring.len();
        if n <= 3 {
            break;
        }
        let keep: Vec<bool> = (0..n)
            .map(|i| orient(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]) != 0)
            .collect();
        if keep.iter().all(|&k| k) {
            break;
        }
        ring = ring
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(p, _)| p)
            .collect();
    }
    let start = ring
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| **p)
        .map_or(0, |(i, _)| i);
    ring.rotate_left(start);
    ring
}

/// Strict point-in-ring test for a point given in doubled coordinates that
/// does not lie on the ring.
fn inside_doubled(ring: &[GridPoint], p: GridPoint) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = GridPoint::new(2 * ring[i].x, 2 * ring[i].y);
        let b = GridPoint::new(2 * ring[(i + 1) % n].x, 2 * ring[(i + 1) % n].y);
        if (a.y > p.y) != (b.y > p.y) {
            let o = orient(a, b, p);
            if (o > 0) == (b.y > a.y) {
                inside = !inside;
            }
        }
    }
    inside
}

fn assemble(
    mut shells: Vec<(i128, Vec<GridPoint>)>,
    holes: Vec<Vec<GridPoint>>,
) -> Result<GridMulti, GeometryError> {
    let bbox = |r: &[GridPoint]| {
        grid_bbox(&vec![GridPolygon {
            rings: vec![r.to_vec()],
        }])
        .expect("non-empty ring")
    };
    let shell_boxes: Vec<_> = shells.iter().map(|(_, r)| bbox(r)).collect();
    let mut owned: Vec<Vec<Vec<GridPoint>>> = vec![Vec::new(); shells.len()];
    for hole in holes {
        let hb = bbox(&hole);
        let probe = GridPoint::new(hole[0].x + hole[1].x, hole[0].y + hole[1].y);
        let owner = shells
            .iter()
            .enumerate()
            .filter(|(i, (_, ring))| {
                let sb = shell_boxes[*i];
                sb.0.x <= hb.0.x
                    && sb.0.y <= hb.0.y
                    && sb.1.x >= hb.1.x
                    && sb.1.y >= hb.1.y
                    && inside_doubled(ring, probe)
            })
            .min_by_key(|(_, (area, _))| *area)
            .map(|(i, _)| i)
            .ok_or_else(|| GeometryError::Topology("hole without enclosing shell".into()))?;
        owned[owner].push(hole);
    }
    let mut out: GridMulti = shells
        .drain(..)
        .zip(owned)
        .map(|((_, shell), mut hs)| {
            hs.sort();
            let mut rings = vec![shell];
            rings.extend(hs);
            GridPolygon { rings }
        })
        .collect();
    out.sort();
    Ok(out)
}
