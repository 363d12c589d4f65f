//! Lattice trees counted as subgraphs: a tree of size `n` is a set of `n`
//! vertices containing the root together with `n-1` edges forming a spanning
//! tree of that set. Counting runs over connected vertex sets (animals) and
//! multiplies in the number of spanning trees via the matrix-tree theorem,
//! evaluated exactly with a fraction-free integer determinant.

use num_bigint::BigUint;

use crate::environment::EdgeEnvironment;
use crate::lattice::Site;
use crate::{Error, Result};

use super::step_edge;

/// Ceiling for exact tree counts; the animal stream grows by a factor ≈ 4
/// per site.
pub const MAX_TREE_SITES: u32 = 12;

fn check_sites(n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::parameter("n", "trees have at least one vertex"));
    }
    if n > MAX_TREE_SITES {
        return Err(Error::ResourceBound {
            what: "tree size",
            requested: n as u64,
            bound: MAX_TREE_SITES as u64,
            guidance: "reduce the number of vertices",
        });
    }
    Ok(n)
}

/// Exact integer determinant by Bareiss' fraction-free elimination.
/// `a` is row-major `n x n`; intermediate values stay integral.
fn bareiss_det(mut a: Vec<i128>, n: usize) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let pivot = (k + 1..n).find(|&r| a[r * n + k] != 0);
            match pivot {
                None => return 0,
                Some(r) => {
                    for j in 0..n {
                        a.swap(k * n + j, r * n + j);
                    }
                    sign = -sign;
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
            a[i * n + k] = 0;
        }
        prev = a[k * n + k];
    }
    sign * a[n * n - 1]
}

/// Number of spanning trees of the graph on `cells` whose edges are the
/// adjacent pairs accepted by `edge_open` (0 if that graph is disconnected).
pub(crate) fn spanning_trees(
    cells: &[(i64, i64)],
    mut edge_open: impl FnMut(Site, Site) -> bool,
) -> u64 {
    let k = cells.len();
    if k == 1 {
        return 1;
    }
    // Laplacian minor with the last vertex's row and column removed.
    let d = k - 1;
    let mut m = vec![0i128; d * d];
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (cells[i], cells[j]);
            if (a.0 - b.0).abs() + (a.1 - b.1).abs() != 1 {
                continue;
            }
            if !edge_open(Site::new(a.0, a.1), Site::new(b.0, b.1)) {
                continue;
            }
            if i < d {
                m[i * d + i] += 1;
            }
            if j < d {
                m[j * d + j] += 1;
            }
            if i < d && j < d {
                m[i * d + j] -= 1;
                m[j * d + i] -= 1;
            }
        }
    }
    let det = bareiss_det(m, d);
    debug_assert!(det >= 0);
    det as u64
}

/// Number of lattice trees with `n` vertices containing the origin.
pub fn count_lattice_trees(n: u32) -> Result<BigUint> {
    let n = check_sites(n)?;
    let mut total = 0u64;
    crate::coarsegrain::for_each_connected_set(n as usize, |cells| {
        total += spanning_trees(cells, |_, _| true);
    });
    Ok(BigUint::from(total))
}

/// Number of open lattice trees with `n` vertices containing `x`: all tree
/// edges must be open. The region must cover the radius-`n-1` ball of `x`.
pub fn count_open_trees(env: &EdgeEnvironment, x: Site, n: u32) -> Result<BigUint> {
    let n = check_sites(n)?;
    if !env.region().contains_ball(x, n as i64 - 1) {
        return Err(Error::RegionCoverage(format!(
            "the radius-{} ball around ({},{})",
            n - 1,
            x.x,
            x.y
        )));
    }
    let mut total = 0u64;
    crate::coarsegrain::for_each_connected_set(n as usize, |cells| {
        let shifted: Vec<(i64, i64)> = cells.iter().map(|&(a, b)| (a + x.x, b + x.y)).collect();
        total += spanning_trees(&shifted, |a, b| env.is_open(step_edge(a, b)));
    });
    Ok(BigUint::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Region;

    #[test]
    fn determinant_basics() {
        assert_eq!(bareiss_det(vec![], 0), 1);
        assert_eq!(bareiss_det(vec![7], 1), 7);
        assert_eq!(bareiss_det(vec![1, 2, 3, 4], 2), -2);
        // Singular matrix.
        assert_eq!(bareiss_det(vec![1, 2, 2, 4], 2), 0);
        // Needs a row swap.
        assert_eq!(bareiss_det(vec![0, 1, 1, 0], 2), -1);
    }

    #[test]
    fn spanning_tree_counts_of_small_graphs() {
        // A path has exactly one spanning tree.
        assert_eq!(spanning_trees(&[(0, 0), (1, 0), (2, 0)], |_, _| true), 1);
        // The unit square (a 4-cycle) has 4.
        assert_eq!(
            spanning_trees(&[(0, 0), (1, 0), (0, 1), (1, 1)], |_, _| true),
            4
        );
        // The 2x3 grid graph has 15.
        assert_eq!(
            spanning_trees(&[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)], |_, _| {
                true
            }),
            15
        );
        // Disconnected vertex set: zero.
        assert_eq!(spanning_trees(&[(0, 0), (2, 0)], |_, _| true), 0);
    }

    #[test]
    fn small_tree_counts() {
        assert_eq!(count_lattice_trees(1).unwrap(), BigUint::from(1u32));
        assert_eq!(count_lattice_trees(2).unwrap(), BigUint::from(4u32));
        assert_eq!(count_lattice_trees(3).unwrap(), BigUint::from(18u32));
        // 76 four-site animals, of which the 4 unit squares contribute 4
        // spanning trees each: 72 + 16 = 88.
        assert_eq!(count_lattice_trees(4).unwrap(), BigUint::from(88u32));
        assert!(count_lattice_trees(0).is_err());
        assert!(count_lattice_trees(MAX_TREE_SITES + 1).is_err());
    }

    #[test]
    fn open_trees_on_extremes() {
        let r = Region::centered(Site::origin(), 4).unwrap();
        let full = EdgeEnvironment::all_open(r).unwrap();
        assert_eq!(
            count_open_trees(&full, Site::origin(), 3).unwrap(),
            BigUint::from(18u32)
        );
        let shifted = count_open_trees(&full, Site::new(1, -1), 3).unwrap();
        assert_eq!(shifted, BigUint::from(18u32));
        let empty = EdgeEnvironment::all_closed(r).unwrap();
        assert_eq!(
            count_open_trees(&empty, Site::origin(), 3).unwrap(),
            BigUint::from(0u32)
        );
        assert_eq!(
            count_open_trees(&empty, Site::origin(), 1).unwrap(),
            BigUint::from(1u32)
        );
        assert!(count_open_trees(&full, Site::new(3, 0), 3).is_err());
    }
}
