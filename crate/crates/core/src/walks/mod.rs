//! Depth-first enumeration of self-avoiding walks from a fixed start site,
//! and everything counted through it: walk counts by length, open-walk counts
//! in an environment, geometry-restricted counts, end-to-end statistics, the
//! open-subgraph comparison inequality, lattice-tree counts, and partition
//! functions in a random site potential.
//!
//! The recursion always tries steps in E, N, W, S order; enumeration order is
//! therefore fixed and reproducible. Counting runs split the walk tree at
//! depth-2 prefixes and count sub-trees independently (in parallel when the
//! `parallel` feature is on); integer merges make the result identical either
//! way.

mod saw;
mod trees;
mod weighted;

use std::collections::HashSet;
use std::ops::ControlFlow;

pub use saw::{
    count_open_restricted_saws, count_open_saws, count_restricted_saws, count_saws,
    end_to_end_stats, enumerate_open_saws, enumerate_saws, hammersley_check, hammersley_terms,
    open_saw_series, restricted_radius, saw_series, CountSeries, EndToEndStats,
};
pub use trees::{count_lattice_trees, count_open_trees, MAX_TREE_SITES};
pub use weighted::{log_partition_function, partition_function};

use crate::lattice::{Direction, Edge, Site, STEPS};
use crate::{Error, Result};

/// Hard ceiling on walk lengths for exact enumeration. The walk tree has
/// roughly 2.64^n nodes; beyond this bound a single count is no longer a
/// desk-scale computation.
pub const MAX_WALK_STEPS: u32 = 24;

pub(crate) fn check_steps(n: u32) -> Result<()> {
    if n > MAX_WALK_STEPS {
        return Err(Error::ResourceBound {
            what: "walk length",
            requested: n as u64,
            bound: MAX_WALK_STEPS as u64,
            guidance: "reduce the number of steps or switch to sampling",
        });
    }
    Ok(())
}

/// Canonical edge of a single step between adjacent sites (no validation).
#[inline]
pub(crate) fn step_edge(a: Site, b: Site) -> Edge {
    if b.x > a.x {
        Edge {
            anchor: a,
            dir: Direction::East,
        }
    } else if b.x < a.x {
        Edge {
            anchor: b,
            dir: Direction::East,
        }
    } else if b.y > a.y {
        Edge {
            anchor: a,
            dir: Direction::North,
        }
    } else {
        Edge {
            anchor: b,
            dir: Direction::North,
        }
    }
}

/// A self-avoiding lattice path (at least one site; consecutive sites
/// adjacent; no repeated site).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    sites: Vec<Site>,
}

impl Path {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::parameter("path", "needs at least one site"));
        }
        for w in sites.windows(2) {
            if w[0].l1_distance(w[1]) != 1 {
                return Err(Error::NotAdjacent(w[0], w[1]));
            }
        }
        let distinct: HashSet<Site> = sites.iter().copied().collect();
        if distinct.len() != sites.len() {
            return Err(Error::parameter("path", "revisits a site"));
        }
        Ok(Path { sites })
    }

    /// Trusted constructor for paths produced by the enumerator itself.
    pub(crate) fn from_trusted(sites: Vec<Site>) -> Self {
        Path { sites }
    }

    /// Path from a start site and a list of (dx, dy) unit steps.
    pub fn from_steps(start: Site, steps: &[(i64, i64)]) -> Result<Self> {
        let mut sites = Vec::with_capacity(steps.len() + 1);
        sites.push(start);
        let mut cur = start;
        for &(dx, dy) in steps {
            cur = cur.offset(dx, dy);
            sites.push(cur);
        }
        Path::new(sites)
    }

    /// Straight walk of `n` east steps (a ballistic segment).
    pub fn straight_east(start: Site, n: u32) -> Self {
        let sites = (0..=n as i64).map(|k| start.offset(k, 0)).collect();
        Path { sites }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// Number of steps (edges); one less than the number of sites.
    pub fn len(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Site {
        self.sites[0]
    }

    pub fn end(&self) -> Site {
        *self.sites.last().unwrap()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.sites.windows(2).map(|w| step_edge(w[0], w[1]))
    }
}

/// Visited flags on a `(2n+1)^2` grid of displacements around the start.
pub(crate) struct VisitGrid {
    start: Site,
    reach: i64,
    side: i64,
    visited: Vec<bool>,
}

impl VisitGrid {
    pub(crate) fn new(start: Site, n: u32) -> Self {
        let reach = n as i64;
        let side = 2 * reach + 1;
        let mut g = VisitGrid {
            start,
            reach,
            side,
            visited: vec![false; (side * side) as usize],
        };
        g.set(start, true);
        g
    }

    #[inline]
    fn index(&self, s: Site) -> usize {
        let dx = s.x - self.start.x + self.reach;
        let dy = s.y - self.start.y + self.reach;
        debug_assert!(dx >= 0 && dx < self.side && dy >= 0 && dy < self.side);
        (dy * self.side + dx) as usize
    }

    #[inline]
    pub(crate) fn visited(&self, s: Site) -> bool {
        self.visited[self.index(s)]
    }

    #[inline]
    pub(crate) fn set(&mut self, s: Site, v: bool) {
        let i = self.index(s);
        self.visited[i] = v;
    }
}

fn dfs_count(
    grid: &mut VisitGrid,
    counts: &mut [u64],
    s: Site,
    depth: usize,
    allowed: &mut impl FnMut(Site, Site) -> bool,
) {
    counts[depth] += 1;
    if depth + 1 == counts.len() {
        return;
    }
    for (dx, dy) in STEPS {
        let t = s.offset(dx, dy);
        if !grid.visited(t) && allowed(s, t) {
            grid.set(t, true);
            dfs_count(grid, counts, t, depth + 1, allowed);
            grid.set(t, false);
        }
    }
}

/// Walks of every length `0..=n` from `start` through allowed steps, counted
/// in one traversal: `counts[k]` = number of length-`k` self-avoiding walks.
pub(crate) fn count_per_depth(
    start: Site,
    n: u32,
    mut allowed: impl FnMut(Site, Site) -> bool,
) -> Vec<u64> {
    let mut counts = vec![0u64; n as usize + 1];
    let mut grid = VisitGrid::new(start, n);
    dfs_count(&mut grid, &mut counts, start, 0, &mut allowed);
    counts
}

/// Same counts, splitting the walk tree at depth-2 prefixes so sub-trees can
/// be counted on separate workers. Integer sums make the merge exact.
pub(crate) fn count_per_depth_split(
    start: Site,
    n: u32,
    allowed: impl Fn(Site, Site) -> bool + Sync + Send,
) -> Vec<u64> {
    if n < 3 {
        return count_per_depth(start, n, allowed);
    }
    let mut prefixes: Vec<(Site, Site)> = Vec::with_capacity(12);
    let mut first_steps = 0u64;
    for (dx1, dy1) in STEPS {
        let a = start.offset(dx1, dy1);
        if !allowed(start, a) {
            continue;
        }
        first_steps += 1;
        for (dx2, dy2) in STEPS {
            let b = a.offset(dx2, dy2);
            if b != start && allowed(a, b) {
                prefixes.push((a, b));
            }
        }
    }
    let tails = crate::exec::map_indexed(prefixes.len(), |i| {
        let (a, b) = prefixes[i];
        let mut grid = VisitGrid::new(start, n);
        grid.set(a, true);
        grid.set(b, true);
        let mut counts = vec![0u64; n as usize + 1];
        let mut allowed = |s: Site, t: Site| allowed(s, t);
        dfs_count(&mut grid, &mut counts, b, 2, &mut allowed);
        counts
    });
    let mut counts = vec![0u64; n as usize + 1];
    counts[0] = 1;
    counts[1] = first_steps;
    for tail in tails {
        for (c, v) in counts.iter_mut().zip(tail) {
            *c += v;
        }
    }
    counts
}

fn dfs_enumerate(
    grid: &mut VisitGrid,
    path: &mut Vec<Site>,
    target: usize,
    allowed: &mut impl FnMut(Site, Site) -> bool,
    visit: &mut impl FnMut(&[Site]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if path.len() == target + 1 {
        return visit(path);
    }
    let s = *path.last().unwrap();
    for (dx, dy) in STEPS {
        let t = s.offset(dx, dy);
        if !grid.visited(t) && allowed(s, t) {
            grid.set(t, true);
            path.push(t);
            let r = dfs_enumerate(grid, path, target, allowed, visit);
            path.pop();
            grid.set(t, false);
            r?;
        }
    }
    ControlFlow::Continue(())
}

/// Visit every allowed length-`n` walk from `start` exactly once, in the
/// fixed E/N/W/S enumeration order. The visitor sees the full site sequence
/// and may abort the traversal.
pub(crate) fn enumerate_paths(
    start: Site,
    n: u32,
    mut allowed: impl FnMut(Site, Site) -> bool,
    mut visit: impl FnMut(&[Site]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut grid = VisitGrid::new(start, n);
    let mut path = Vec::with_capacity(n as usize + 1);
    path.push(start);
    dfs_enumerate(&mut grid, &mut path, n as usize, &mut allowed, &mut visit)
}
