//! Coarse-graining of walks into block animals: the lattice is tiled by
//! `n0 x n0` blocks, a path is summarized by the set of blocks owning its
//! edges, and open-walk counts split exactly into per-animal contributions.
//! Also hosts the enumeration of origin-containing animals and the greedy
//! well-separated subset used by the change-of-measure estimators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::environment::EdgeEnvironment;
use crate::lattice::{block_of_edge, BlockCoord, Site};
use crate::rng::Stream;
use crate::walks::{enumerate_open_saws, Path};
use crate::{Error, Result};

/// Ceiling for streaming animal enumeration (counts grow ~4x per cell).
pub const MAX_ANIMAL_CELLS: u32 = 12;
/// Ceiling for materializing the full animal list in memory.
pub const MAX_COLLECTED_CELLS: u32 = 10;
/// Ceiling for randomly grown animals.
pub const MAX_RANDOM_CELLS: u32 = 1 << 12;

/// A finite set of block cells, canonicalized as a lexicographically sorted
/// list, so equality, ordering, and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Animal {
    cells: Vec<(i64, i64)>,
}

impl Animal {
    pub fn from_cells(cells: Vec<(i64, i64)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::parameter("cells", "an animal has at least one cell"));
        }
        let mut cells = cells;
        cells.sort_unstable();
        cells.dedup();
        Ok(Animal { cells })
    }

    /// Cells in lexicographic order.
    pub fn cells(&self) -> &[(i64, i64)] {
        &self.cells
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn contains(&self, cell: (i64, i64)) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn contains_origin(&self) -> bool {
        self.contains((0, 0))
    }

    /// Connectivity through edge-sharing (4-neighbor) moves only.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(i) = stack.pop() {
            let (x, y) = self.cells[i];
            for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                if let Ok(j) = self.cells.binary_search(&(x + dx, y + dy)) {
                    if !seen[j] {
                        seen[j] = true;
                        reached += 1;
                        stack.push(j);
                    }
                }
            }
        }
        reached == self.cells.len()
    }

    /// The cells as blocks of side `n0`.
    pub fn block_coords(&self, n0: i64) -> Result<Vec<BlockCoord>> {
        self.cells
            .iter()
            .map(|&(bx, by)| BlockCoord::new(bx, by, n0))
            .collect()
    }
}

impl fmt::Display for Animal {
    /// One line, cells in sorted order: `(0,0) (1,0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, y)) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({x},{y})")?;
        }
        Ok(())
    }
}

impl FromStr for Animal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for tok in s.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Format(format!("bad animal cell `{tok}`")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad animal cell `{tok}`")))?;
            let x = a
                .parse::<i64>()
                .map_err(|e| Error::Format(format!("bad animal cell `{tok}`: {e}")))?;
            let y = b
                .parse::<i64>()
                .map_err(|e| Error::Format(format!("bad animal cell `{tok}`: {e}")))?;
            cells.push((x, y));
        }
        Animal::from_cells(cells).map_err(|_| Error::Format("empty animal line".into()))
    }
}

/// The animal of a path: blocks owning at least one path edge (each edge
/// belongs to the block of its lower-left endpoint).
pub fn animal_of_path(path: &Path, n0: i64) -> Result<Animal> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut cells = Vec::with_capacity(path.len());
    for e in path.edges() {
        let b = block_of_edge(e, n0)?;
        cells.push((b.bx, b.by));
    }
    Animal::from_cells(cells)
}

/// The size range `⌈n/(2n0²)⌉ ..= 9⌈n/n0⌉` within which the animal of an
/// `n`-step walk falls. A block owns exactly `2n0²` edges, so a walk of `n`
/// distinct edges must touch at least `n/(2n0²)` blocks; and within `n0`
/// consecutive steps a walk can only reach edges owned by the starting
/// block's 3×3 neighborhood, giving the upper bound.
pub fn animal_size_bounds(n: u32, n0: i64) -> (u64, u64) {
    let n = n as u64;
    let n0 = n0.max(1) as u64;
    (n.div_ceil(2 * n0 * n0), 9 * n.div_ceil(n0))
}

/// Split the open-walk count from `x` by animal: for each open `n`-step
/// self-avoiding walk the animal of its blocks is recorded, and the values
/// sum exactly to the total open-walk count.
pub fn decompose(
    env: &EdgeEnvironment,
    x: Site,
    n: u32,
    n0: i64,
) -> Result<BTreeMap<Animal, BigUint>> {
    if n == 0 {
        return Err(Error::parameter("n", "need at least one step"));
    }
    if n0 < 1 {
        return Err(Error::parameter("n0", "block side must be at least 1"));
    }
    let mut counts: BTreeMap<Animal, u64> = BTreeMap::new();
    let mut cells: Vec<(i64, i64)> = Vec::with_capacity(n as usize);
    let _ = enumerate_open_saws(env, x, n, |sites| {
        cells.clear();
        for w in sites.windows(2) {
            let e = crate::walks::step_edge(w[0], w[1]);
            let b = e.anchor;
            cells.push((b.x.div_euclid(n0), b.y.div_euclid(n0)));
        }
        cells.sort_unstable();
        cells.dedup();
        *counts
            .entry(Animal {
                cells: cells.clone(),
            })
            .or_insert(0) += 1;
        std::ops::ControlFlow::<()>::Continue(())
    })?;
    Ok(counts
        .into_iter()
        .map(|(a, c)| (a, BigUint::from(c)))
        .collect())
}

/// Visit every connected cell set of size `m` containing the origin exactly
/// once. Cells arrive in discovery order (not sorted). The enumeration adds
/// cells from an ordered frontier and forbids a used candidate for all later
/// branches at the same depth, which makes each set appear once.
pub(crate) fn for_each_connected_set(m: usize, mut visit: impl FnMut(&[(i64, i64)])) {
    debug_assert!(m >= 1);
    if m == 1 {
        visit(&[(0, 0)]);
        return;
    }
    let side = 2 * m + 1;
    let mut state = GrowState {
        m,
        side,
        reached: vec![false; side * side],
        set: Vec::with_capacity(m),
    };
    state.mark((0, 0));
    state.set.push((0, 0));
    let first: Vec<(i64, i64)> = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        .iter()
        .map(|&(dx, dy)| {
            state.mark((dx, dy));
            (dx, dy)
        })
        .collect();
    state.grow(&first, &mut visit);
}

struct GrowState {
    m: usize,
    side: usize,
    reached: Vec<bool>,
    set: Vec<(i64, i64)>,
}

impl GrowState {
    fn idx(&self, c: (i64, i64)) -> usize {
        let h = self.m as i64;
        (c.0 + h) as usize * self.side + (c.1 + h) as usize
    }

    fn mark(&mut self, c: (i64, i64)) {
        let i = self.idx(c);
        self.reached[i] = true;
    }

    fn unmark(&mut self, c: (i64, i64)) {
        let i = self.idx(c);
        self.reached[i] = false;
    }

    fn grow(&mut self, avail: &[(i64, i64)], visit: &mut impl FnMut(&[(i64, i64)])) {
        for (i, &c) in avail.iter().enumerate() {
            self.set.push(c);
            if self.set.len() == self.m {
                visit(&self.set);
            } else {
                let mut child: Vec<(i64, i64)> = avail[i + 1..].to_vec();
                let base = child.len();
                for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                    let nb = (c.0 + dx, c.1 + dy);
                    if !self.reached[self.idx(nb)] {
                        self.mark(nb);
                        child.push(nb);
                    }
                }
                self.grow(&child, visit);
                for &nb in &child[base..] {
                    self.unmark(nb);
                }
            }
            self.set.pop();
            // c stays marked: later branches at this depth must not re-add it.
        }
    }
}

fn check_cells(m: u32, bound: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::parameter("m", "an animal has at least one cell"));
    }
    if m > bound {
        return Err(Error::ResourceBound {
            what: "animal cells",
            requested: m as u64,
            bound: bound as u64,
            guidance: "reduce the animal size",
        });
    }
    Ok(())
}

/// Stream all origin-containing animals of size `m` without materializing
/// the list.
pub fn for_each_animal(m: u32, mut visit: impl FnMut(&Animal)) -> Result<()> {
    check_cells(m, MAX_ANIMAL_CELLS)?;
    for_each_connected_set(m as usize, |cells| {
        let mut sorted = cells.to_vec();
        sorted.sort_unstable();
        visit(&Animal { cells: sorted });
    });
    Ok(())
}

/// All origin-containing animals of size `m`, sorted.
pub fn enumerate_animals(m: u32) -> Result<Vec<Animal>> {
    check_cells(m, MAX_COLLECTED_CELLS)?;
    let mut out = Vec::new();
    for_each_animal(m, |a| out.push(a.clone()))?;
    out.sort_unstable();
    Ok(out)
}

/// A well-separated subset of an animal: pairwise l∞ distance at least 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedSet {
    cells: Vec<(i64, i64)>,
}

impl SeparatedSet {
    /// Cells in lexicographic (pick) order.
    pub fn cells(&self) -> &[(i64, i64)] {
        &self.cells
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn block_coords(&self, n0: i64) -> Result<Vec<BlockCoord>> {
        self.cells
            .iter()
            .map(|&(bx, by)| BlockCoord::new(bx, by, n0))
            .collect()
    }
}

fn linf(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Greedy well-separated subset: repeatedly take the lexicographically
/// smallest remaining cell and discard every cell within l∞ distance 2 of
/// it. Each pick discards at most 13 cells that were still available (those
/// not lexicographically smaller), so the result has at least `⌈m/13⌉`
/// cells, and by construction pairwise l∞ distance ≥ 3.
pub fn extract_separated(a: &Animal) -> SeparatedSet {
    let cells = a.cells();
    let mut banned = vec![false; cells.len()];
    let mut picks = Vec::new();
    for i in 0..cells.len() {
        if banned[i] {
            continue;
        }
        picks.push(cells[i]);
        for j in i + 1..cells.len() {
            if !banned[j] && linf(cells[i], cells[j]) <= 2 {
                banned[j] = true;
            }
        }
    }
    SeparatedSet { cells: picks }
}

/// Randomly grown origin-containing animal of size `m` (Eden growth: each
/// step adds a uniformly chosen boundary cell). Deterministic in `seed`.
pub fn random_animal(m: u32, seed: u64) -> Result<Animal> {
    check_cells(m, MAX_RANDOM_CELLS)?;
    let mut stream = Stream::new(seed);
    let mut cells: Vec<(i64, i64)> = vec![(0, 0)];
    let mut frontier: Vec<(i64, i64)> = vec![(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut member: std::collections::HashSet<(i64, i64)> =
        [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
            .into_iter()
            .collect();
    while cells.len() < m as usize {
        let pick = stream.next_below(frontier.len() as u64) as usize;
        let c = frontier.swap_remove(pick);
        cells.push(c);
        for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
            let nb = (c.0 + dx, c.1 + dy);
            if member.insert(nb) {
                frontier.push(nb);
            }
        }
    }
    Animal::from_cells(cells)
}
