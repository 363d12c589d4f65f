//! Square-lattice primitives: sites, anchored edges, rectangular regions, and
//! the block geometry used for coarse-graining walks into animals.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * lexicographic order on sites compares `x` first, then `y`;
//! * an edge is stored by its lexicographically smaller endpoint (`anchor`)
//!   plus a direction (`East` = +x, `North` = +y);
//! * the side-`n0` block of an edge is the block containing its anchor, with
//!   coordinates obtained by floor division (toward minus infinity);
//! * neighbor steps are always tried in the order E, N, W, S.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coordinates are confined well inside `i64` so that steps, midpoints, and
/// block arithmetic can never overflow.
pub const COORD_LIMIT: i64 = 1 << 40;

/// Largest region side (in sites) accepted at construction.
pub const MAX_REGION_SIDE: i64 = 1 << 25;

/// Neighbor offsets in the fixed enumeration order East, North, West, South.
pub const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// A lattice site. `Ord` is the crate-wide lexicographic order (x, then y).
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    pub const fn origin() -> Self {
        Site { x: 0, y: 0 }
    }

    #[inline]
    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Site {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// The four nearest neighbors in E, N, W, S order.
    pub fn neighbors(self) -> [Site; 4] {
        STEPS.map(|(dx, dy)| self.offset(dx, dy))
    }

    #[inline]
    pub fn linf_norm(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    #[inline]
    pub fn l1_distance(self, other: Site) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    #[inline]
    pub fn linf_distance(self, other: Site) -> i64 {
        (self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))) as i64
    }

    /// Squared Euclidean norm as a double (exact for walk-scale coordinates).
    #[inline]
    pub fn square_euclid(self) -> f64 {
        let (x, y) = (self.x as f64, self.y as f64);
        x * x + y * y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    East,
    North,
}

impl Direction {
    #[inline]
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::East => (1, 0),
            Direction::North => (0, 1),
        }
    }

    #[inline]
    pub(crate) fn tag(self) -> u64 {
        match self {
            Direction::East => 0,
            Direction::North => 1,
        }
    }
}

/// An undirected nearest-neighbor edge in canonical (anchored) form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub anchor: Site,
    pub dir: Direction,
}

impl Edge {
    pub fn endpoints(self) -> (Site, Site) {
        let (dx, dy) = self.dir.delta();
        (self.anchor, self.anchor.offset(dx, dy))
    }

    /// Midpoint of the unit segment, used for Euclidean edge distances.
    pub fn midpoint(self) -> (f64, f64) {
        let (x, y) = (self.anchor.x as f64, self.anchor.y as f64);
        match self.dir {
            Direction::East => (x + 0.5, y),
            Direction::North => (x, y + 0.5),
        }
    }
}

/// Canonical form of the edge joining two nearest-neighbor sites: the anchor
/// is the lexicographically smaller endpoint. Symmetric in its arguments.
pub fn canonical_edge(a: Site, b: Site) -> Result<Edge> {
    let dx = b.x as i128 - a.x as i128;
    let dy = b.y as i128 - a.y as i128;
    let dir = match (dx, dy) {
        (1 | -1, 0) => Direction::East,
        (0, 1 | -1) => Direction::North,
        _ => return Err(Error::NotAdjacent(a, b)),
    };
    Ok(Edge {
        anchor: a.min(b),
        dir,
    })
}

/// Euclidean distance between edge midpoints; undefined for identical edges.
pub fn edge_distance(e: Edge, f: Edge) -> Result<f64> {
    if e == f {
        return Err(Error::IdenticalEdges);
    }
    let (ex, ey) = e.midpoint();
    let (fx, fy) = f.midpoint();
    Ok((ex - fx).hypot(ey - fy))
}

/// A closed rectangle of sites, `min ≤ s ≤ max` coordinate-wise. Its edge set
/// is every lattice edge with both endpoints inside, indexed row-major with
/// all East edges before all North edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    min: Site,
    max: Site,
}

impl Region {
    pub fn new(min: Site, max: Site) -> Result<Self> {
        if min.x > max.x || min.y > max.y {
            return Err(Error::RegionBounds(format!(
                "min ({},{}) exceeds max ({},{})",
                min.x, min.y, max.x, max.y
            )));
        }
        for s in [min, max] {
            if s.x.abs() > COORD_LIMIT || s.y.abs() > COORD_LIMIT {
                return Err(Error::RegionBounds(format!(
                    "coordinate ({},{}) outside ±{COORD_LIMIT}",
                    s.x, s.y
                )));
            }
        }
        let r = Region { min, max };
        if r.width() > MAX_REGION_SIDE || r.height() > MAX_REGION_SIDE {
            return Err(Error::ResourceBound {
                what: "region side",
                requested: r.width().max(r.height()) as u64,
                bound: MAX_REGION_SIDE as u64,
                guidance: "use a smaller region",
            });
        }
        Ok(r)
    }

    /// Square region `[c - radius, c + radius]^2`.
    pub fn centered(center: Site, radius: i64) -> Result<Self> {
        if radius < 0 {
            return Err(Error::parameter("radius", "must be nonnegative"));
        }
        Region::new(
            center.offset(-radius, -radius),
            center.offset(radius, radius),
        )
    }

    pub fn min(&self) -> Site {
        self.min
    }

    pub fn max(&self) -> Site {
        self.max
    }

    /// Number of site columns.
    pub fn width(&self) -> i64 {
        self.max.x - self.min.x + 1
    }

    /// Number of site rows.
    pub fn height(&self) -> i64 {
        self.max.y - self.min.y + 1
    }

    pub fn site_count(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    fn east_count(&self) -> u64 {
        (self.width() as u64 - 1) * self.height() as u64
    }

    pub fn edge_count(&self) -> u64 {
        self.east_count() + self.width() as u64 * (self.height() as u64 - 1)
    }

    #[inline]
    pub fn contains_site(&self, s: Site) -> bool {
        s.x >= self.min.x && s.x <= self.max.x && s.y >= self.min.y && s.y <= self.max.y
    }

    #[inline]
    pub fn contains_edge(&self, e: Edge) -> bool {
        let (a, b) = e.endpoints();
        self.contains_site(a) && self.contains_site(b)
    }

    /// Does the region contain the closed l∞ ball of the given radius?
    pub fn contains_ball(&self, center: Site, radius: i64) -> bool {
        radius >= 0
            && self.contains_site(center.offset(-radius, -radius))
            && self.contains_site(center.offset(radius, radius))
    }

    pub fn is_boundary_site(&self, s: Site) -> bool {
        self.contains_site(s)
            && (s.x == self.min.x || s.x == self.max.x || s.y == self.min.y || s.y == self.max.y)
    }

    /// Row-major site index (x fastest within a row).
    #[inline]
    pub fn site_index(&self, s: Site) -> Option<usize> {
        if !self.contains_site(s) {
            return None;
        }
        let w = self.width() as u64;
        Some(((s.y - self.min.y) as u64 * w + (s.x - self.min.x) as u64) as usize)
    }

    pub fn site_at(&self, idx: usize) -> Site {
        let w = self.width() as u64;
        let idx = idx as u64;
        debug_assert!(idx < self.site_count());
        Site::new(self.min.x + (idx % w) as i64, self.min.y + (idx / w) as i64)
    }

    /// Dense edge index: East edges row-major, then North edges row-major.
    #[inline]
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        if !self.contains_edge(e) {
            return None;
        }
        let (w, a) = (self.width() as u64, e.anchor);
        let (col, row) = ((a.x - self.min.x) as u64, (a.y - self.min.y) as u64);
        let idx = match e.dir {
            Direction::East => row * (w - 1) + col,
            Direction::North => self.east_count() + row * w + col,
        };
        Some(idx as usize)
    }

    pub fn edge_at(&self, idx: usize) -> Edge {
        let idx = idx as u64;
        debug_assert!(idx < self.edge_count());
        let w = self.width() as u64;
        if idx < self.east_count() {
            let (row, col) = (idx / (w - 1), idx % (w - 1));
            Edge {
                anchor: Site::new(self.min.x + col as i64, self.min.y + row as i64),
                dir: Direction::East,
            }
        } else {
            let idx = idx - self.east_count();
            let (row, col) = (idx / w, idx % w);
            Edge {
                anchor: Site::new(self.min.x + col as i64, self.min.y + row as i64),
                dir: Direction::North,
            }
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count() as usize).map(|i| self.edge_at(i))
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.site_count() as usize).map(|i| self.site_at(i))
    }
}

/// A block of the rescaled lattice: side `n0`, covering sites (and edge
/// anchors) in `[n0*bx, n0*bx + n0) x [n0*by, n0*by + n0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockCoord {
    pub bx: i64,
    pub by: i64,
    pub n0: i64,
}

impl BlockCoord {
    pub fn new(bx: i64, by: i64, n0: i64) -> Result<Self> {
        if n0 < 1 {
            return Err(Error::parameter("n0", "block side must be at least 1"));
        }
        let far = |b: i64| (b.saturating_abs()).saturating_add(2).saturating_mul(n0);
        if far(bx) > COORD_LIMIT || far(by) > COORD_LIMIT {
            return Err(Error::parameter(
                "block",
                "block too far from the origin for this side length",
            ));
        }
        Ok(BlockCoord { bx, by, n0 })
    }

    /// Lowest-left site of the block.
    pub fn anchor_site(&self) -> Site {
        Site::new(self.bx * self.n0, self.by * self.n0)
    }

    pub fn is_origin_block(&self) -> bool {
        self.bx == 0 && self.by == 0
    }

    /// Does the block square contain this site (equivalently: this anchor)?
    #[inline]
    pub fn contains_anchor(&self, s: Site) -> bool {
        s.x.div_euclid(self.n0) == self.bx && s.y.div_euclid(self.n0) == self.by
    }

    /// Is the anchor inside the 3x3 neighborhood of blocks centered here?
    #[inline]
    pub fn neighborhood_contains_anchor(&self, s: Site) -> bool {
        let (cx, cy) = (s.x.div_euclid(self.n0), s.y.div_euclid(self.n0));
        (cx - self.bx).abs() <= 1 && (cy - self.by).abs() <= 1
    }
}

/// Block containing an edge: floor division of its anchor coordinates.
pub fn block_of_edge(e: Edge, n0: i64) -> Result<BlockCoord> {
    if n0 < 1 {
        return Err(Error::parameter("n0", "block side must be at least 1"));
    }
    Ok(BlockCoord {
        bx: e.anchor.x.div_euclid(n0),
        by: e.anchor.y.div_euclid(n0),
        n0,
    })
}

fn anchored_edges_in_square(x0: i64, y0: i64, side: i64, mut push: impl FnMut(Edge)) {
    for y in y0..y0 + side {
        for x in x0..x0 + side {
            let anchor = Site::new(x, y);
            push(Edge {
                anchor,
                dir: Direction::East,
            });
            push(Edge {
                anchor,
                dir: Direction::North,
            });
        }
    }
}

/// Edges anchored in block `x`, clipped to the region (2·n0² when interior).
pub fn block_edges(x: BlockCoord, region: &Region) -> Vec<Edge> {
    let a = x.anchor_site();
    let mut out = Vec::new();
    anchored_edges_in_square(a.x, a.y, x.n0, |e| {
        if region.contains_edge(e) {
            out.push(e);
        }
    });
    out
}

/// Edges anchored in the 3x3 block neighborhood of `x`, clipped to the
/// region (18·n0² when interior).
pub fn enlarged_block_edges(x: BlockCoord, region: &Region) -> Vec<Edge> {
    let a = x.anchor_site();
    let mut out = Vec::new();
    anchored_edges_in_square(a.x - x.n0, a.y - x.n0, 3 * x.n0, |e| {
        if region.contains_edge(e) {
            out.push(e);
        }
    });
    out
}

/// The full, unclipped 3x3 neighborhood edge set (always 18·n0² edges).
pub fn neighborhood_edges(x: BlockCoord) -> Vec<Edge> {
    let a = x.anchor_site();
    let mut out = Vec::with_capacity(18 * (x.n0 * x.n0) as usize);
    anchored_edges_in_square(a.x - x.n0, a.y - x.n0, 3 * x.n0, |e| out.push(e));
    out
}

/// Sites of the block square (n0² sites), row-major.
pub fn block_sites(x: BlockCoord) -> Vec<Site> {
    let a = x.anchor_site();
    let mut out = Vec::with_capacity((x.n0 * x.n0) as usize);
    for y in a.y..a.y + x.n0 {
        for xx in a.x..a.x + x.n0 {
            out.push(Site::new(xx, y));
        }
    }
    out
}

/// Sites of the 3x3 block neighborhood (9·n0² sites), row-major.
pub fn neighborhood_sites(x: BlockCoord) -> Vec<Site> {
    let a = x.anchor_site();
    let mut out = Vec::with_capacity(9 * (x.n0 * x.n0) as usize);
    for y in a.y - x.n0..a.y + 2 * x.n0 {
        for xx in a.x - x.n0..a.x + 2 * x.n0 {
            out.push(Site::new(xx, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_edge_is_symmetric_and_anchored_low() {
        let a = Site::new(0, 0);
        for b in a.neighbors() {
            let e = canonical_edge(a, b).unwrap();
            let f = canonical_edge(b, a).unwrap();
            assert_eq!(e, f);
            let (lo, hi) = e.endpoints();
            assert!(lo < hi);
        }
        let e = canonical_edge(Site::new(2, 3), Site::new(1, 3)).unwrap();
        assert_eq!(e.anchor, Site::new(1, 3));
        assert_eq!(e.dir, Direction::East);
    }

    #[test]
    fn canonical_edge_rejects_non_neighbors() {
        assert!(canonical_edge(Site::new(0, 0), Site::new(1, 1)).is_err());
        assert!(canonical_edge(Site::new(0, 0), Site::new(0, 0)).is_err());
        assert!(canonical_edge(Site::new(0, 0), Site::new(3, 0)).is_err());
    }

    #[test]
    fn lex_order_compares_x_first() {
        assert!(Site::new(0, 9) < Site::new(1, 0));
        assert!(Site::new(1, 0) < Site::new(1, 1));
    }

    #[test]
    fn block_uses_floor_division() {
        let e = canonical_edge(Site::new(-1, 0), Site::new(0, 0)).unwrap();
        let b = block_of_edge(e, 4).unwrap();
        assert_eq!((b.bx, b.by), (-1, 0));

        let e = canonical_edge(Site::new(3, 3), Site::new(3, 4)).unwrap();
        let b = block_of_edge(e, 4).unwrap();
        assert_eq!((b.bx, b.by), (0, 0));

        let e = canonical_edge(Site::new(4, 0), Site::new(5, 0)).unwrap();
        let b = block_of_edge(e, 4).unwrap();
        assert_eq!((b.bx, b.by), (1, 0));
    }

    #[test]
    fn perpendicular_edges_at_shared_site_are_distance_sqrt_half() {
        let e = canonical_edge(Site::new(0, 0), Site::new(1, 0)).unwrap();
        let f = canonical_edge(Site::new(0, 0), Site::new(0, 1)).unwrap();
        let d = edge_distance(e, f).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(edge_distance(e, e).is_err());
    }

    #[test]
    fn parallel_neighboring_edges_are_distance_one() {
        let e = canonical_edge(Site::new(0, 0), Site::new(1, 0)).unwrap();
        let f = canonical_edge(Site::new(1, 0), Site::new(2, 0)).unwrap();
        assert!((edge_distance(e, f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edge_and_site_indexing_round_trip() {
        let r = Region::new(Site::new(-2, -1), Site::new(3, 4)).unwrap();
        assert_eq!(r.width(), 6);
        assert_eq!(r.height(), 6);
        assert_eq!(r.edge_count(), 5 * 6 + 6 * 5);
        for i in 0..r.edge_count() as usize {
            let e = r.edge_at(i);
            assert_eq!(r.edge_index(e), Some(i));
        }
        for i in 0..r.site_count() as usize {
            assert_eq!(r.site_index(r.site_at(i)), Some(i));
        }
        let outside = canonical_edge(Site::new(3, 4), Site::new(4, 4)).unwrap();
        assert_eq!(r.edge_index(outside), None);
    }

    #[test]
    fn region_validation() {
        assert!(Region::new(Site::new(1, 0), Site::new(0, 0)).is_err());
        assert!(Region::centered(Site::origin(), -1).is_err());
        let r = Region::centered(Site::origin(), 3).unwrap();
        assert!(r.contains_ball(Site::origin(), 3));
        assert!(!r.contains_ball(Site::new(1, 0), 3));
        assert!(r.is_boundary_site(Site::new(3, 0)));
        assert!(!r.is_boundary_site(Site::new(0, 0)));
    }

    #[test]
    fn enlarged_neighborhood_counts_and_clipping() {
        let big = Region::centered(Site::origin(), 20).unwrap();
        let x = BlockCoord::new(0, 0, 2).unwrap();
        assert_eq!(enlarged_block_edges(x, &big).len(), 72);
        assert_eq!(block_edges(x, &big).len(), 8);
        assert_eq!(neighborhood_edges(x).len(), 72);

        // Clipping: a region that cuts off the western neighbor column.
        let clipped = Region::new(Site::new(-1, -20), Site::new(20, 20)).unwrap();
        assert!(enlarged_block_edges(x, &clipped).len() < 72);
    }

    #[test]
    fn neighborhood_diameter_stays_below_five_blocks() {
        for n0 in [2i64, 3, 5] {
            let x = BlockCoord::new(0, 0, n0).unwrap();
            let edges = neighborhood_edges(x);
            let mut max_d = 0.0f64;
            // Spot-check extremes plus a coarse subsample of pairs.
            for (i, &e) in edges.iter().enumerate().step_by(7) {
                for &f in edges.iter().skip(i + 1).step_by(5) {
                    max_d = max_d.max(edge_distance(e, f).unwrap());
                }
            }
            let first = edges[0];
            let last = edges[edges.len() - 1];
            max_d = max_d.max(edge_distance(first, last).unwrap());
            assert!(max_d < 5.0 * n0 as f64, "n0={n0} max_d={max_d}");
        }
    }

    #[test]
    fn block_site_squares() {
        let x = BlockCoord::new(-1, 0, 3).unwrap();
        let sites = block_sites(x);
        assert_eq!(sites.len(), 9);
        assert!(sites.contains(&Site::new(-3, 0)));
        assert!(sites.contains(&Site::new(-1, 2)));
        assert!(!sites.contains(&Site::new(0, 0)));
        assert_eq!(neighborhood_sites(x).len(), 81);
    }
}
