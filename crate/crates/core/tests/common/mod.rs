//! Independent reference implementations used to cross-check the optimized
//! counters. Everything here favors obviousness over speed: vector-scan
//! walks, breadth-first polyomino growth with explicit normalization, and
//! edge-subset enumeration for trees.

// Shared by several test binaries; each uses only a subset.
#![allow(dead_code)]

use std::collections::HashSet;

use sawlab_core::environment::EdgeEnvironment;
use sawlab_core::lattice::{canonical_edge, Site};

fn extend_walk(path: &mut Vec<Site>, left: u32, total: &mut u64) {
    if left == 0 {
        *total += 1;
        return;
    }
    let here = *path.last().unwrap();
    for next in here.neighbors() {
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        extend_walk(path, left - 1, total);
        path.pop();
    }
}

/// Self-avoiding walks of length `n` from the origin, by plain recursion
/// over a site list.
pub fn naive_saw_count(n: u32) -> u64 {
    let mut total = 0;
    extend_walk(&mut vec![Site::origin()], n, &mut total);
    total
}

fn extend_open_walk(env: &EdgeEnvironment, path: &mut Vec<Site>, left: u32, total: &mut u64) {
    if left == 0 {
        *total += 1;
        return;
    }
    let here = *path.last().unwrap();
    for next in here.neighbors() {
        if path.contains(&next) {
            continue;
        }
        if !env.is_open(canonical_edge(here, next).unwrap()) {
            continue;
        }
        path.push(next);
        extend_open_walk(env, path, left - 1, total);
        path.pop();
    }
}

/// Open self-avoiding walks of length `n` from `start`, same recursion with
/// an edge filter.
pub fn naive_open_saw_count(env: &EdgeEnvironment, start: Site, n: u32) -> u64 {
    let mut total = 0;
    extend_open_walk(env, &mut vec![start], n, &mut total);
    total
}

fn normalize(cells: &mut Vec<(i64, i64)>) {
    let min_x = cells.iter().map(|c| c.0).min().unwrap();
    let min_y = cells.iter().map(|c| c.1).min().unwrap();
    for c in cells.iter_mut() {
        c.0 -= min_x;
        c.1 -= min_y;
    }
    cells.sort_unstable();
}

/// All fixed polyominoes of `m` cells up to translation, each normalized so
/// the minimal x and y coordinates are zero, grown one cell at a time with
/// set-based deduplication.
pub fn fixed_polyomino_classes(m: u32) -> Vec<Vec<(i64, i64)>> {
    assert!(m >= 1);
    let mut current: HashSet<Vec<(i64, i64)>> = HashSet::new();
    current.insert(vec![(0, 0)]);
    for _ in 1..m {
        let mut next = HashSet::new();
        for shape in &current {
            for &(x, y) in shape {
                for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                    if shape.contains(&(nx, ny)) {
                        continue;
                    }
                    let mut grown = shape.clone();
                    grown.push((nx, ny));
                    normalize(&mut grown);
                    next.insert(grown);
                }
            }
        }
        current = next;
    }
    current.into_iter().collect()
}

/// Origin-containing animals of `m` cells: each translation class of `m`
/// cells has exactly `m` translates placing a cell at the origin.
pub fn oracle_animal_count(m: u32) -> u64 {
    fixed_polyomino_classes(m).len() as u64 * m as u64
}

/// All origin-containing connected cell sets of `m` cells, as sorted cell
/// lists.
pub fn origin_cell_sets(m: u32) -> Vec<Vec<(i64, i64)>> {
    let mut out = HashSet::new();
    for class in fixed_polyomino_classes(m) {
        for &(cx, cy) in &class {
            let mut shifted: Vec<(i64, i64)> =
                class.iter().map(|&(x, y)| (x - cx, y - cy)).collect();
            shifted.sort_unstable();
            out.insert(shifted);
        }
    }
    out.into_iter().collect()
}

fn connected_by(cells: &[(i64, i64)], edges: &[((i64, i64), (i64, i64))]) -> bool {
    let mut reached: HashSet<(i64, i64)> = HashSet::new();
    let mut stack = vec![cells[0]];
    reached.insert(cells[0]);
    while let Some(c) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == c {
                b
            } else if b == c {
                a
            } else {
                continue;
            };
            if reached.insert(other) {
                stack.push(other);
            }
        }
    }
    reached.len() == cells.len()
}

/// Lattice trees with `n` sites containing the origin: for every
/// origin-containing site set, count the (n-1)-edge subsets of its induced
/// edges that connect all sites. With n-1 edges on n sites, connected is
/// equivalent to acyclic, so these are exactly the spanning trees.
pub fn oracle_tree_count(n: u32) -> u64 {
    let mut total = 0u64;
    for cells in origin_cell_sets(n) {
        let mut induced = Vec::new();
        for (i, &a) in cells.iter().enumerate() {
            for &b in &cells[i + 1..] {
                if (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1 {
                    induced.push((a, b));
                }
            }
        }
        let want = (n - 1) as usize;
        let e = induced.len();
        if e < want {
            continue;
        }
        for mask in 0u32..(1 << e) {
            if mask.count_ones() as usize != want {
                continue;
            }
            let chosen: Vec<_> = (0..e)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| induced[i])
                .collect();
            if connected_by(&cells, &chosen) {
                total += 1;
            }
        }
    }
    total
}
