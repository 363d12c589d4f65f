//! The neighborhood quadratic form: centered edge occupations over the 3x3
//! block neighborhood, weighted by inverse midpoint distance, normalized so
//! its variance stays bounded as the block side grows. A threshold indicator
//! of this form drives the large-animal change of measure.

use std::collections::HashMap;

use crate::coarsegrain::SeparatedSet;
use crate::environment::EdgeEnvironment;
use crate::lattice::{neighborhood_edges, BlockCoord, Edge, Site};
use crate::walks::Path;
use crate::{Error, Result};

/// Default indicator threshold constant; the source analysis only requires
/// it "large enough", so it is a knob.
pub const DEFAULT_K: f64 = 3.0;

/// Largest observed analytic variance over the tested grid
/// p in {0.5, 0.6, 0.75} x n0 in {2, 4, 8}, rounded up; the per-spec value
/// is always available from [`QFormSpec::variance_analytic`].
pub const EMPIRICAL_C1: f64 = 563.0;

/// Kernel size guard: the pair-weight matrix is quadratic in the edge count.
pub const MAX_QFORM_EDGES: usize = 2048;

/// `1 / ((1-p) n0 sqrt(ln n0))`.
pub fn qform_normalization(p: f64, n0: i64) -> Result<f64> {
    check_parameters(p, n0)?;
    Ok(1.0 / ((1.0 - p) * n0 as f64 * (n0 as f64).ln().sqrt()))
}

fn check_parameters(p: f64, n0: i64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter("p", "must lie strictly in (0, 1)"));
    }
    if n0 < 2 {
        return Err(Error::parameter(
            "n0",
            "block side must be at least 2 so ln(n0) is positive",
        ));
    }
    Ok(())
}

/// Sum over ordered pairs of distinct points of `v_i v_j / dist(i, j)`.
/// Points must be pairwise distinct.
pub fn weighted_pair_sum(points: &[((f64, f64), f64)]) -> f64 {
    let mut s = 0.0;
    for (i, &((xi, yi), vi)) in points.iter().enumerate() {
        for &((xj, yj), vj) in &points[i + 1..] {
            s += vi * vj / (xi - xj).hypot(yi - yj);
        }
    }
    2.0 * s
}

/// The quadratic form attached to one block: its edge set is the full 3x3
/// block neighborhood, and all pair weights are precomputed.
pub struct QFormSpec {
    block: BlockCoord,
    p: f64,
    k: f64,
    edges: Vec<Edge>,
    index_of: HashMap<Edge, usize>,
    weights: Vec<f64>,
    row_sums: Vec<f64>,
    total_pair_sum: f64,
    pair_square_sum: f64,
    row_square_sums: Vec<f64>,
}

impl QFormSpec {
    pub fn new(block: BlockCoord, p: f64) -> Result<Self> {
        Self::with_threshold(block, p, DEFAULT_K)
    }

    pub fn with_threshold(block: BlockCoord, p: f64, k: f64) -> Result<Self> {
        check_parameters(p, block.n0)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::parameter("K", "must be a positive finite constant"));
        }
        let edges = neighborhood_edges(block);
        let n = edges.len();
        if n > MAX_QFORM_EDGES {
            return Err(Error::ResourceBound {
                what: "quadratic-form edges",
                requested: n as u64,
                bound: MAX_QFORM_EDGES as u64,
                guidance: "reduce the block side",
            });
        }
        let mids: Vec<(f64, f64)> = edges.iter().map(|e| e.midpoint()).collect();
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let w = 1.0 / (mids[i].0 - mids[j].0).hypot(mids[i].1 - mids[j].1);
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        let row_sums: Vec<f64> = (0..n)
            .map(|i| weights[i * n..(i + 1) * n].iter().sum())
            .collect();
        let row_square_sums: Vec<f64> = (0..n)
            .map(|i| weights[i * n..(i + 1) * n].iter().map(|w| w * w).sum())
            .collect();
        let index_of = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(QFormSpec {
            block,
            p,
            k,
            edges,
            index_of,
            total_pair_sum: row_sums.iter().sum(),
            pair_square_sum: row_square_sums.iter().sum(),
            weights,
            row_sums,
            row_square_sums,
        })
    }

    pub fn block(&self) -> BlockCoord {
        self.block
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n0(&self) -> i64 {
        self.block.n0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Indicator threshold `exp(K^2)`.
    pub fn indicator_threshold(&self) -> f64 {
        (self.k * self.k).exp()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `1 / ((1-p) n0 sqrt(ln n0))`.
    pub fn normalization(&self) -> f64 {
        qform_normalization(self.p, self.block.n0).expect("validated at construction")
    }

    fn require_cover(&self, env: &EdgeEnvironment) -> Result<()> {
        let n0 = self.block.n0;
        let lo = Site::new(n0 * (self.block.bx - 1), n0 * (self.block.by - 1));
        let hi = Site::new(n0 * (self.block.bx + 2), n0 * (self.block.by + 2));
        if env.region().contains_site(lo) && env.region().contains_site(hi) {
            Ok(())
        } else {
            Err(Error::RegionCoverage(format!(
                "the 3x3 neighborhood of block ({},{}) at side {n0}",
                self.block.bx, self.block.by
            )))
        }
    }

    /// Value of the quadratic form on one environment: the normalized sum
    /// over ordered pairs of distinct neighborhood edges of
    /// `(w(e)-p)(w(e')-p)/d(e,e')`.
    pub fn quadratic_form(&self, env: &EdgeEnvironment) -> Result<f64> {
        self.require_cover(env)?;
        let n = self.edges.len();
        let mut open: Vec<usize> = Vec::with_capacity(n);
        for (i, &e) in self.edges.iter().enumerate() {
            if env.is_open(e) {
                open.push(i);
            }
        }
        let mut open_pairs = 0.0;
        for (a, &i) in open.iter().enumerate() {
            let row = &self.weights[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for &j in &open[a + 1..] {
                acc += row[j];
            }
            open_pairs += acc;
        }
        let open_row: f64 = open.iter().map(|&i| self.row_sums[i]).sum();
        let centered =
            2.0 * open_pairs - 2.0 * self.p * open_row + self.p * self.p * self.total_pair_sum;
        Ok(self.normalization() * centered)
    }

    /// Exact variance of the form under the unconditioned edge law:
    /// `2 c^2 (p(1-p))^2 * sum over ordered pairs of 1/d^2`.
    pub fn variance_analytic(&self) -> f64 {
        let c = self.normalization();
        let pq = self.p * (1.0 - self.p);
        2.0 * c * c * pq * pq * self.pair_square_sum
    }

    /// The indicator density: `exp(-K)` when the form reaches `exp(K^2)`,
    /// otherwise 1.
    pub fn fx(&self, env: &EdgeEnvironment) -> Result<f64> {
        let q = self.quadratic_form(env)?;
        Ok(if q >= self.indicator_threshold() {
            (-self.k).exp()
        } else {
            1.0
        })
    }

    fn forced_indices(&self, forced: &[Edge]) -> Vec<usize> {
        let mut idx: Vec<usize> = forced
            .iter()
            .filter_map(|e| self.index_of.get(e).copied())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Mean of the form when the edges of `forced` are conditioned open:
    /// `((1-p) / (n0 sqrt(ln n0))) * sum over ordered pairs of forced
    /// neighborhood edges of 1/d`.
    pub fn mean_under_forced(&self, forced: &[Edge]) -> f64 {
        let n = self.edges.len();
        let s = self.forced_indices(forced);
        let mut pairs = 0.0;
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                pairs += self.weights[i * n + j];
            }
        }
        let q = 1.0 - self.p;
        self.normalization() * q * q * 2.0 * pairs
    }

    /// Mean of the form conditioned on a path being open.
    pub fn mean_under_path(&self, s: &Path) -> f64 {
        let edges: Vec<Edge> = s.edges().collect();
        self.mean_under_forced(&edges)
    }

    /// Exact variance when the edges of `forced` are conditioned open: the
    /// free-pair term plus the path-interaction term.
    pub fn variance_under_forced(&self, forced: &[Edge]) -> f64 {
        let n = self.edges.len();
        let s = self.forced_indices(forced);
        let in_s = {
            let mut f = vec![false; n];
            for &i in &s {
                f[i] = true;
            }
            f
        };
        // Ordered sum of 1/d^2 over pairs with both edges free.
        let mut sq_forced_rows = 0.0;
        for &i in &s {
            sq_forced_rows += self.row_square_sums[i];
        }
        let mut sq_both_forced = 0.0;
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                let w = self.weights[i * n + j];
                sq_both_forced += w * w;
            }
        }
        let free_pairs_sq = self.pair_square_sum - 2.0 * sq_forced_rows + 2.0 * sq_both_forced;
        // Interaction: free edges against the harmonic weight of the forced set.
        let mut interaction = 0.0;
        for i in 0..n {
            if in_s[i] {
                continue;
            }
            let mut r = 0.0;
            for &j in &s {
                r += self.weights[i * n + j];
            }
            interaction += r * r;
        }
        let c = self.normalization();
        let p = self.p;
        let q = 1.0 - p;
        c * c * (2.0 * (p * q).powi(2) * free_pairs_sq + 4.0 * p * q.powi(3) * interaction)
    }

    /// Lower bound on the conditional mean when the forcing path crosses the
    /// neighborhood ballistically: `(1-p) sqrt(ln n0)`.
    pub fn entry_mean_lower_bound(&self) -> f64 {
        (1.0 - self.p) * (self.block.n0 as f64).ln().sqrt()
    }
}

/// Product of indicator densities over the blocks of a well-separated set.
pub fn separated_density(
    sep: &SeparatedSet,
    n0: i64,
    p: f64,
    k: f64,
    env: &EdgeEnvironment,
) -> Result<f64> {
    let mut f = 1.0;
    for b in sep.block_coords(n0)? {
        let spec = QFormSpec::with_threshold(b, p, k)?;
        f *= spec.fx(env)?;
    }
    Ok(f)
}

/// Minimum, over the edges of a straight `n0`-step segment, of the harmonic
/// sum of inverse distances to the other segment edges. Always at least
/// `ln n0`, which is what makes ballistic entries expensive for the form.
pub fn ballistic_per_edge_minimum(n0: i64) -> Result<f64> {
    if n0 < 2 {
        return Err(Error::parameter("n0", "segment needs at least 2 edges"));
    }
    let harmonic = |m: i64| (1..=m).map(|j| 1.0 / j as f64).sum::<f64>();
    let mut min = f64::INFINITY;
    for k in 0..n0 {
        let v = harmonic(k) + harmonic(n0 - 1 - k);
        if v < min {
            min = v;
        }
    }
    Ok(min)
}

/// The block side the asymptotic argument would demand, `exp(c2/(1-p)^2)` —
/// astronomically large for any p near 1; provided for documentation and
/// bound calculators, not for building kernels.
pub fn asymptotic_block_side(c2: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter("p", "must lie strictly in (0, 1)"));
    }
    if !(c2.is_finite() && c2 > 0.0) {
        return Err(Error::parameter("c2", "must be a positive finite constant"));
    }
    Ok((c2 / ((1.0 - p) * (1.0 - p))).exp())
}
