//! Random environments on a region: a coupling field of per-edge uniforms, the
//! Bernoulli bond environments obtained by thresholding it, cluster labeling
//! of the open subgraph, and i.i.d. site potentials.
//!
//! All randomness is a pure function of `(coordinates, seed)`, so environments
//! thresholded from the same field at increasing `p` are monotone coupled by
//! construction, and resampling any sub-region reproduces the same values.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::lattice::{Edge, Region, Site};
use crate::rng;
use crate::{Error, Result};

/// Cap on materialized per-edge values (8 bytes each).
pub const MAX_FIELD_EDGES: u64 = 1 << 24;
/// Cap on bit-packed environments.
pub const MAX_ENV_EDGES: u64 = 1 << 27;

fn check_cap(what: &'static str, requested: u64, bound: u64) -> Result<()> {
    if requested > bound {
        return Err(Error::ResourceBound {
            what,
            requested,
            bound,
            guidance: "sample a smaller region",
        });
    }
    Ok(())
}

#[inline]
fn edge_unit(seed: u64, e: Edge) -> f64 {
    rng::unit_f64(rng::keyed(
        seed,
        rng::DOMAIN_EDGE,
        &[e.anchor.x as u64, e.anchor.y as u64, e.dir.tag()],
    ))
}

/// Per-edge i.i.d. uniforms on `[0,1)` over a region: the common source that
/// couples all Bernoulli environments across densities.
#[derive(Clone, Debug)]
pub struct CouplingField {
    region: Region,
    seed: u64,
    values: Vec<f64>,
}

/// Materialize the coupling field on `region` from `seed`. Values depend only
/// on absolute edge coordinates and the seed, not on the region shape.
pub fn sample_coupling_field(region: Region, seed: u64) -> Result<CouplingField> {
    check_cap("coupling field edges", region.edge_count(), MAX_FIELD_EDGES)?;
    let values = (0..region.edge_count() as usize)
        .map(|i| edge_unit(seed, region.edge_at(i)))
        .collect();
    Ok(CouplingField {
        region,
        seed,
        values,
    })
}

impl CouplingField {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, e: Edge) -> Option<f64> {
        self.region.edge_index(e).map(|i| self.values[i])
    }

    /// Bernoulli environment: an edge is open iff its uniform is ≤ p. For
    /// p ≤ p' the p-environment is a subset of the p'-environment edge-wise.
    pub fn threshold(&self, p: f64) -> Result<EdgeEnvironment> {
        validate_probability("p", p)?;
        let mut open = BitSet::zeros(self.values.len());
        for (i, &v) in self.values.iter().enumerate() {
            if v <= p {
                open.set(i, true);
            }
        }
        Ok(EdgeEnvironment {
            region: self.region,
            p,
            seed: Some(self.seed),
            open,
        })
    }
}

fn validate_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::parameter(name, format!("{p} is not in [0, 1]")));
    }
    Ok(())
}

/// Plain u64-word bitset with O(1) lookup; backs the packed environments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn zeros(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub(crate) fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            use std::fmt::Write as _;
            write!(s, "{w:016x}").unwrap();
        }
        s
    }

    fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let n_words = len.div_ceil(64);
        if hex.len() != n_words * 16 {
            return Err(Error::Format(format!(
                "occupancy hex length {} does not match {} edges",
                hex.len(),
                len
            )));
        }
        let mut words = Vec::with_capacity(n_words);
        for chunk in hex.as_bytes().chunks(16) {
            let s = std::str::from_utf8(chunk)
                .map_err(|_| Error::Format("occupancy hex is not ASCII".into()))?;
            let w = u64::from_str_radix(s, 16)
                .map_err(|_| Error::Format(format!("bad occupancy word `{s}`")))?;
            words.push(w);
        }
        if len % 64 != 0 {
            let tail_bits = len % 64;
            if words[n_words - 1] >> tail_bits != 0 {
                return Err(Error::Format("occupancy bits set beyond edge count".into()));
            }
        }
        Ok(BitSet { len, words })
    }
}

/// A fixed configuration of open/closed edges on a region, bit-packed.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEnvironment {
    region: Region,
    p: f64,
    /// Seed of the generating coupling field, when the environment was
    /// sampled rather than constructed explicitly.
    seed: Option<u64>,
    open: BitSet,
}

/// Sample a Bernoulli(p) bond environment. Identical, bit for bit, to
/// `sample_coupling_field(region, seed)?.threshold(p)`.
pub fn sample_environment(region: Region, p: f64, seed: u64) -> Result<EdgeEnvironment> {
    validate_probability("p", p)?;
    check_cap("environment edges", region.edge_count(), MAX_ENV_EDGES)?;
    let n = region.edge_count() as usize;
    let mut open = BitSet::zeros(n);
    for i in 0..n {
        if edge_unit(seed, region.edge_at(i)) <= p {
            open.set(i, true);
        }
    }
    Ok(EdgeEnvironment {
        region,
        p,
        seed: Some(seed),
        open,
    })
}

impl EdgeEnvironment {
    /// Environment with an explicit open set (engineered configurations).
    /// `p` is carried as metadata for downstream formulas.
    pub fn from_fn(region: Region, p: f64, mut is_open: impl FnMut(Edge) -> bool) -> Result<Self> {
        validate_probability("p", p)?;
        check_cap("environment edges", region.edge_count(), MAX_ENV_EDGES)?;
        let n = region.edge_count() as usize;
        let mut open = BitSet::zeros(n);
        for i in 0..n {
            if is_open(region.edge_at(i)) {
                open.set(i, true);
            }
        }
        Ok(EdgeEnvironment {
            region,
            p,
            seed: None,
            open,
        })
    }

    pub fn all_open(region: Region) -> Result<Self> {
        Self::from_fn(region, 1.0, |_| true)
    }

    pub fn all_closed(region: Region) -> Result<Self> {
        Self::from_fn(region, 0.0, |_| false)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Open status; edges outside the region are not open.
    #[inline]
    pub fn is_open(&self, e: Edge) -> bool {
        match self.region.edge_index(e) {
            Some(i) => self.open.get(i),
            None => false,
        }
    }

    /// Open status addressed by dense edge index (hot loops).
    #[inline]
    pub fn is_open_index(&self, idx: usize) -> bool {
        self.open.get(idx)
    }

    pub fn open_count(&self) -> u64 {
        self.open.count_ones()
    }

    pub fn open_fraction(&self) -> f64 {
        self.open_count() as f64 / self.region.edge_count() as f64
    }

    /// Force a single edge's status (used for conditional environments and
    /// engineered test configurations). The edge must lie in the region.
    pub fn set_edge(&mut self, e: Edge, open: bool) -> Result<()> {
        let idx = self.region.edge_index(e).ok_or_else(|| {
            Error::RegionCoverage(format!("edge anchored ({},{})", e.anchor.x, e.anchor.y))
        })?;
        self.open.set(idx, open);
        self.seed = None;
        Ok(())
    }
}

/// Union-find with path halving and union by size; ties broken toward the
/// smaller root index so labels are deterministic.
struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let gp = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = gp;
            i = gp;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = match self.size[ra as usize].cmp(&self.size[rb as usize]) {
            std::cmp::Ordering::Greater => (ra, rb),
            std::cmp::Ordering::Less => (rb, ra),
            std::cmp::Ordering::Equal => (ra.min(rb), ra.max(rb)),
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }
}

/// Connected components of the open subgraph. Cluster ids are dense, ordered
/// by the smallest site index they contain.
#[derive(Clone, Debug)]
pub struct ClusterLabeling {
    region: Region,
    label: Vec<u32>,
    sizes: Vec<u64>,
    touches_boundary: Vec<bool>,
}

pub fn clusters(env: &EdgeEnvironment) -> ClusterLabeling {
    let region = *env.region();
    let n = region.site_count() as usize;
    let mut uf = UnionFind::new(n);
    for i in 0..region.edge_count() as usize {
        if env.is_open_index(i) {
            let (a, b) = region.edge_at(i).endpoints();
            let (ia, ib) = (
                region.site_index(a).unwrap() as u32,
                region.site_index(b).unwrap() as u32,
            );
            uf.union(ia, ib);
        }
    }
    // Dense ids in order of first appearance over the row-major site scan.
    let mut id_of_root: HashMap<u32, u32> = HashMap::new();
    let mut label = vec![0u32; n];
    let mut sizes = Vec::new();
    let mut touches = Vec::new();
    for i in 0..n {
        let root = uf.find(i as u32);
        let next = id_of_root.len() as u32;
        let id = *id_of_root.entry(root).or_insert(next);
        if id as usize == sizes.len() {
            sizes.push(0);
            touches.push(false);
        }
        label[i] = id;
        sizes[id as usize] += 1;
        if region.is_boundary_site(region.site_at(i)) {
            touches[id as usize] = true;
        }
    }
    ClusterLabeling {
        region,
        label,
        sizes,
        touches_boundary: touches,
    }
}

impl ClusterLabeling {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn cluster_of(&self, s: Site) -> Option<usize> {
        self.region.site_index(s).map(|i| self.label[i] as usize)
    }

    pub fn size_of(&self, id: usize) -> u64 {
        self.sizes[id]
    }

    pub fn touches_boundary(&self, id: usize) -> bool {
        self.touches_boundary[id]
    }

    pub fn largest_size(&self) -> u64 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }
}

/// Finite-window stand-in for "the origin lies in the infinite cluster": the
/// origin's open cluster reaches the region boundary. On windows much larger
/// than the walk scale the discrepancy is a boundary effect.
pub fn origin_in_giant(env: &EdgeEnvironment) -> Result<bool> {
    if !env.region().contains_site(Site::origin()) {
        return Err(Error::RegionCoverage("the origin".into()));
    }
    let lab = clusters(env);
    let id = lab.cluster_of(Site::origin()).unwrap();
    Ok(lab.touches_boundary(id))
}

/// Mean-zero, variance-one site potential laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DistributionSpec {
    Gaussian,
    Rademacher,
    /// Standardized Bernoulli(p): takes value `(1-p)/s` with probability `p`
    /// and `-p/s` with probability `1-p`, where `s = sqrt(p(1-p))`.
    CenteredBernoulli {
        p: f64,
    },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        if let DistributionSpec::CenteredBernoulli { p } = self {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::parameter(
                    "law",
                    format!("bernoulli p {p} not in (0,1)"),
                ));
            }
        }
        Ok(())
    }

    /// Log moment generating function `log E[exp(beta * X)]`; finite for all
    /// real `beta` for every supported law.
    pub fn log_mgf(&self, beta: f64) -> f64 {
        match self {
            DistributionSpec::Gaussian => 0.5 * beta * beta,
            DistributionSpec::Rademacher => {
                // log cosh, stable for large |beta|.
                let b = beta.abs();
                b + (-2.0 * b).exp().ln_1p() - std::f64::consts::LN_2
            }
            DistributionSpec::CenteredBernoulli { p } => {
                let s = (p * (1.0 - p)).sqrt();
                let t = beta / s;
                // log(1 - p + p e^t) - t p, computed around the larger term.
                let m = if t > 0.0 {
                    t + (p + (1.0 - p) * (-t).exp()).ln()
                } else {
                    ((1.0 - p) + p * t.exp()).ln()
                };
                m - t * p
            }
        }
    }

    fn draw(&self, seed: u64, s: Site) -> f64 {
        let w1 = rng::keyed(seed, rng::DOMAIN_SITE, &[s.x as u64, s.y as u64, 0]);
        match self {
            DistributionSpec::Gaussian => {
                let w2 = rng::keyed(seed, rng::DOMAIN_SITE, &[s.x as u64, s.y as u64, 1]);
                rng::gaussian(w1, w2)
            }
            DistributionSpec::Rademacher => {
                if w1 & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            DistributionSpec::CenteredBernoulli { p } => {
                let s0 = (p * (1.0 - p)).sqrt();
                if rng::unit_f64(w1) < *p {
                    (1.0 - p) / s0
                } else {
                    -p / s0
                }
            }
        }
    }
}

/// An i.i.d. site potential over a region, materialized per site.
#[derive(Clone, Debug)]
pub struct SitePotential {
    region: Region,
    law: DistributionSpec,
    seed: u64,
    values: Vec<f64>,
}

pub fn sample_potential(region: Region, law: DistributionSpec, seed: u64) -> Result<SitePotential> {
    law.validate()?;
    check_cap("potential sites", region.site_count(), MAX_FIELD_EDGES)?;
    let values = (0..region.site_count() as usize)
        .map(|i| law.draw(seed, region.site_at(i)))
        .collect();
    Ok(SitePotential {
        region,
        law,
        seed,
        values,
    })
}

impl SitePotential {
    /// Potential with explicit values (engineered configurations).
    pub fn from_fn(
        region: Region,
        law: DistributionSpec,
        mut value: impl FnMut(Site) -> f64,
    ) -> Result<Self> {
        check_cap("potential sites", region.site_count(), MAX_FIELD_EDGES)?;
        let values = (0..region.site_count() as usize)
            .map(|i| value(region.site_at(i)))
            .collect();
        Ok(SitePotential {
            region,
            law,
            seed: 0,
            values,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn law(&self) -> DistributionSpec {
        self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, s: Site) -> Option<f64> {
        self.region.site_index(s).map(|i| self.values[i])
    }

    #[inline]
    pub fn value_at_index(&self, i: usize) -> f64 {
        self.values[i]
    }
}

#[derive(Serialize, Deserialize)]
struct EnvironmentFile {
    format: String,
    version: u32,
    min: (i64, i64),
    max: (i64, i64),
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<u64>,
    edges: u64,
    open_hex: String,
}

const ENV_FORMAT: &str = "sawlab-edge-environment";

/// Serialize an environment (self-describing JSON with hex-packed bits).
/// `load_environment` restores it bit-exactly.
pub fn dump_environment(env: &EdgeEnvironment, mut w: impl Write) -> Result<()> {
    let file = EnvironmentFile {
        format: ENV_FORMAT.into(),
        version: 1,
        min: (env.region.min().x, env.region.min().y),
        max: (env.region.max().x, env.region.max().y),
        p: env.p,
        seed: env.seed,
        edges: env.region.edge_count(),
        open_hex: env.open.to_hex(),
    };
    serde_json::to_writer(&mut w, &file).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn load_environment(r: impl Read) -> Result<EdgeEnvironment> {
    let file: EnvironmentFile =
        serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))?;
    if file.format != ENV_FORMAT {
        return Err(Error::Format(format!("unknown format `{}`", file.format)));
    }
    if file.version != 1 {
        return Err(Error::Format(format!(
            "unsupported version {}",
            file.version
        )));
    }
    let region = Region::new(
        Site::new(file.min.0, file.min.1),
        Site::new(file.max.0, file.max.1),
    )?;
    if region.edge_count() != file.edges {
        return Err(Error::Format(format!(
            "edge count {} does not match region ({} expected)",
            file.edges,
            region.edge_count()
        )));
    }
    validate_probability("p", file.p)?;
    let open = BitSet::from_hex(file.edges as usize, &file.open_hex)?;
    Ok(EdgeEnvironment {
        region,
        p: file.p,
        seed: file.seed,
        open,
    })
}
