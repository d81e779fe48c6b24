//! Static R-tree packed with Sort-Tile-Recursive bulk loading.
//!
//! The tree is built once from `(Rect, id)` pairs and is read-only
//! afterwards. All queries use closed intersection (touching counts) and
//! return ids in ascending order.

use crate::projection::PlanePoint;

pub const DEFAULT_FANOUT: usize = 16;

/// Axis-aligned rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    /// Builds a rectangle from two corners in any order.
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect {
            min_x: x0.min(x1),
            min_y: y0.min(y1),
            max_x: x0.max(x1),
            max_y: y0.max(y1),
        }
    }

    pub fn from_point(p: PlanePoint) -> Self {
        Rect {
            min_x: p.x,
            min_y: p.y,
            max_x: p.x,
            max_y: p.y,
        }
    }

    /// Bounding box of a point set, `None` when empty.
    pub fn bounding<'a, I: IntoIterator<Item = &'a PlanePoint>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = Rect::from_point(*it.next()?);
        Some(it.fold(first, |r, p| r.union(&Rect::from_point(*p))))
    }

    pub fn is_finite(&self) -> bool {
        self.min_x.is_finite()
            && self.min_y.is_finite()
            && self.max_x.is_finite()
            && self.max_y.is_finite()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_y <= other.max_y
            && other.min_y <= self.max_y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.min_x <= other.min_x
            && self.min_y <= other.min_y
            && self.max_x >= other.max_x
            && self.max_y >= other.max_y
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    pub fn expanded(&self, d: f64) -> Rect {
        Rect {
            min_x: self.min_x - d,
            min_y: self.min_y - d,
            max_x: self.max_x + d,
            max_y: self.max_y + d,
        }
    }

    /// Euclidean distance from `p` to the closest point of the rectangle.
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        let dx = (self.min_x - p.x).max(0.0).max(p.x - self.max_x);
        let dy = (self.min_y - p.y).max(0.0).max(p.y - self.max_y);
        dx.hypot(dy)
    }

    fn center(&self) -> (f64, f64) {
        (
            (self.min_x + self.max_x) / 2.0,
            (self.min_y + self.max_y) / 2.0,
        )
    }
}

#[derive(Debug, Clone)]
struct Node {
    rect: Rect,
    /// Range into the level below (or into `entries` for leaves).
    start: usize,
    end: usize,
}

/// Immutable STR-packed R-tree over `(Rect, id)` entries.
#[derive(Debug, Clone)]
pub struct RTree {
    fanout: usize,
    entries: Vec<(Rect, usize)>,
    /// `levels[0]` holds the leaves; the last level holds the single root.
    levels: Vec<Vec<Node>>,
}

impl RTree {
    pub fn bulk_build(items: Vec<(Rect, usize)>) -> Self {
        Self::bulk_build_with_fanout(items, DEFAULT_FANOUT)
    }

    pub fn bulk_build_with_fanout(mut items: Vec<(Rect, usize)>, fanout: usize) -> Self {
        let fanout = fanout.max(2);
        if items.is_empty() {
            return RTree {
                fanout,
                entries: items,
                levels: Vec::new(),
            };
        }
        str_order(&mut items, fanout, |(r, _)| *r);
        let mut levels = Vec::new();
        let mut level: Vec<Node> = items
            .chunks(fanout)
            .enumerate()
            .map(|(i, chunk)| Node {
                rect: chunk
                    .iter()
                    .skip(1)
                    .fold(chunk[0].0, |acc, (r, _)| acc.union(r)),
                start: i * fanout,
                end: i * fanout + chunk.len(),
            })
            .collect();
        while level.len() > 1 {
            str_order(&mut level, fanout, |n| n.rect);
            let parents = level
                .chunks(fanout)
                .enumerate()
                .map(|(i, chunk)| Node {
                    rect: chunk
                        .iter()
                        .skip(1)
                        .fold(chunk[0].rect, |acc, n| acc.union(&n.rect)),
                    start: i * fanout,
                    end: i * fanout + chunk.len(),
                })
                .collect();
            levels.push(level);
            level = parents;
        }
        levels.push(level);
        RTree {
            fanout,
            entries: items,
            levels,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    /// Number of node levels; 0 for an empty tree, 1 when the root is a leaf.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Ids whose rectangles intersect `query`, ascending.
    pub fn query_range(&self, query: &Rect) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(query, |_, id| out.push(id));
        out.sort_unstable();
        out
    }

    /// Ids within planar distance `d` (inclusive) of `p`, ascending.
    pub fn within_distance(&self, p: PlanePoint, d: f64) -> Vec<usize> {
        if !(d >= 0.0) {
            return Vec::new();
        }
        // Loose prefilter; the exact test below decides.
        let slack = 1e-9 * (p.x.abs() + p.y.abs() + d + 1.0);
        let window = Rect::from_point(p).expanded(d + slack);
        let mut out = Vec::new();
        self.visit(&window, |r, id| {
            if r.distance_to(p) <= d {
                out.push(id);
            }
        });
        out.sort_unstable();
        out
    }

    fn visit<F: FnMut(&Rect, usize)>(&self, query: &Rect, mut f: F) {
        let Some(top) = self.levels.len().checked_sub(1) else {
            return;
        };
        let mut stack: Vec<(usize, usize)> = vec![(top, 0)];
        while let Some((level, idx)) = stack.pop() {
            let node = &self.levels[level][idx];
            if !node.rect.intersects(query) {
                continue;
            }
            if level == 0 {
                for (r, id) in &self.entries[node.start..node.end] {
                    if r.intersects(query) {
                        f(r, *id);
                    }
                }
            } else {
                stack.extend((node.start..node.end).map(|child| (level - 1, child)));
            }
        }
    }

    /// Checks the structural invariants: every child rectangle lies inside
    /// its parent and every entry is reachable from exactly one leaf.
    pub fn is_well_formed(&self) -> bool {
        if self.levels.is_empty() {
            return self.entries.is_empty();
        }
        if self.levels.last().map(Vec::len) != Some(1) {
            return false;
        }
        let partitions = |ranges: Vec<(usize, usize)>, total: usize| {
            let mut ranges = ranges;
            ranges.sort_unstable();
            let mut covered = 0;
            for (start, end) in ranges {
                if start != covered || end - start > self.fanout || end == start {
                    return false;
                }
                covered = end;
            }
            covered == total
        };
        let leaves = &self.levels[0];
        if !partitions(
            leaves.iter().map(|n| (n.start, n.end)).collect(),
            self.entries.len(),
        ) {
            return false;
        }
        if !leaves.iter().all(|leaf| {
            self.entries[leaf.start..leaf.end]
                .iter()
                .all(|(r, _)| leaf.rect.contains_rect(r))
        }) {
            return false;
        }
        for pair in self.levels.windows(2) {
            let (lower, upper) = (&pair[0], &pair[1]);
            if !partitions(
                upper.iter().map(|n| (n.start, n.end)).collect(),
                lower.len(),
            ) {
                return false;
            }
            if !upper.iter().all(|n| {
                lower[n.start..n.end]
                    .iter()
                    .all(|c| n.rect.contains_rect(&c.rect))
            }) {
                return false;
            }
        }
        true
    }
}

/// Reorders `items` in place into STR tile order for the given node capacity.
fn str_order<T, F: Fn(&T) -> Rect>(items: &mut [T], capacity: usize, rect_of: F) {
    let n = items.len();
    let leaves = n.div_ceil(capacity);
    let slices = (leaves as f64).sqrt().ceil() as usize;
    let slice_len = slices.max(1) * capacity;
    let key = |r: Rect, axis: usize| {
        let (cx, cy) = r.center();
        if axis == 0 {
            cx
        } else {
            cy
        }
    };
    items.sort_by(|a, b| key(rect_of(a), 0).total_cmp(&key(rect_of(b), 0)));
    for slice in items.chunks_mut(slice_len) {
        slice.sort_by(|a, b| key(rect_of(a), 1).total_cmp(&key(rect_of(b), 1)));
    }
}
