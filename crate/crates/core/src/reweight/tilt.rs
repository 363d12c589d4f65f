//! Exponential tilt of the edge law on the blocks of a small animal: each
//! block-owned edge's open weight is multiplied by `lambda < 1`, making
//! sparse environments likelier while keeping the density normalized.

use crate::coarsegrain::Animal;
use crate::environment::{sample_coupling_field, EdgeEnvironment};
use crate::lattice::{block_sites, Direction, Edge, Region};
use crate::{Error, Result};

/// Tilt strength solving `(1-lambda) * sqrt(1-p) * n0 = 1`.
pub fn tilt_lambda(p: f64, n0: i64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || !p.is_finite() {
        return Err(Error::parameter("p", "must lie in [0, 1)"));
    }
    if n0 < 1 {
        return Err(Error::parameter("n0", "block side must be at least 1"));
    }
    let root = (1.0 - p).sqrt() * n0 as f64;
    if root <= 1.0 {
        return Err(Error::parameter(
            "n0",
            format!("sqrt(1-p) * n0 = {root} must exceed 1 for a positive tilt"),
        ));
    }
    Ok(1.0 - 1.0 / root)
}

/// Parameters of the block tilt; `lambda` is derived, not chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltSpec {
    p: f64,
    n0: i64,
    m: u32,
    lambda: f64,
}

impl TiltSpec {
    pub fn new(p: f64, n0: i64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::parameter("m", "an animal has at least one cell"));
        }
        let lambda = tilt_lambda(p, n0)?;
        Ok(TiltSpec { p, n0, m, lambda })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of edges owned by the animal's blocks: `2 m n0^2`.
    pub fn tilted_edge_count(&self) -> u64 {
        2 * self.m as u64 * (self.n0 * self.n0) as u64
    }

    /// Per-edge open probability under the tilted law:
    /// `lambda p / (1 - p (1 - lambda))`.
    pub fn tilted_open_probability(&self) -> f64 {
        self.lambda * self.p / (1.0 - self.p * (1.0 - self.lambda))
    }
}

/// All edges owned by the animal's blocks (east and north edges anchored at
/// each block site), in deterministic order.
pub fn animal_block_edges(animal: &Animal, n0: i64) -> Result<Vec<Edge>> {
    let mut edges = Vec::with_capacity(2 * animal.size() * (n0 * n0) as usize);
    for b in animal.block_coords(n0)? {
        for s in block_sites(b) {
            edges.push(Edge {
                anchor: s,
                dir: Direction::East,
            });
            edges.push(Edge {
                anchor: s,
                dir: Direction::North,
            });
        }
    }
    Ok(edges)
}

fn require_cover(env_region: &Region, edges: &[Edge]) -> Result<()> {
    for e in edges {
        if !env_region.contains_edge(*e) {
            return Err(Error::RegionCoverage(format!(
                "the tilted edge anchored at ({},{})",
                e.anchor.x, e.anchor.y
            )));
        }
    }
    Ok(())
}

/// Density of the tilted law against the sampling law:
/// `lambda^(open edges in the animal's blocks) / (1 - p(1-lambda))^(2 m n0^2)`.
/// Its mean over environments is exactly 1.
pub fn small_tilt_density(spec: &TiltSpec, env: &EdgeEnvironment, animal: &Animal) -> Result<f64> {
    if animal.size() != spec.m as usize {
        return Err(Error::parameter(
            "animal",
            format!(
                "has {} cells but the tilt was built for m={}",
                animal.size(),
                spec.m
            ),
        ));
    }
    let edges = animal_block_edges(animal, spec.n0)?;
    require_cover(env.region(), &edges)?;
    let open = edges.iter().filter(|&&e| env.is_open(e)).count() as i32;
    let per_edge_norm = 1.0 - spec.p * (1.0 - spec.lambda);
    Ok(spec.lambda.powi(open) / per_edge_norm.powi(edges.len() as i32))
}

/// Exact inverse moment of the tilt density with the bound it must satisfy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseMoment {
    pub value: f64,
    pub bound: f64,
}

/// `E[1/f_A] = [(1 + (p/lambda)(1-lambda)) (1 - p(1-lambda))]^(2 m n0^2)`,
/// together with the cruder bound `exp(2 p m / lambda)` it stays below.
pub fn inverse_moment_small(spec: &TiltSpec) -> InverseMoment {
    let (p, l) = (spec.p, spec.lambda);
    let per_edge = (1.0 + (p / l) * (1.0 - l)) * (1.0 - p * (1.0 - l));
    let value = per_edge.powi(spec.tilted_edge_count() as i32);
    let bound = (2.0 * p * spec.m as f64 / l).exp();
    InverseMoment { value, bound }
}

/// Draw an environment from the tilted law: edges owned by the animal's
/// blocks open with the tilted probability, all others with `p`.
pub fn sample_tilted(
    spec: &TiltSpec,
    animal: &Animal,
    region: Region,
    seed: u64,
) -> Result<EdgeEnvironment> {
    if animal.size() != spec.m as usize {
        return Err(Error::parameter(
            "animal",
            format!(
                "has {} cells but the tilt was built for m={}",
                animal.size(),
                spec.m
            ),
        ));
    }
    let edges = animal_block_edges(animal, spec.n0)?;
    require_cover(&region, &edges)?;
    let tilted: std::collections::HashSet<Edge> = edges.into_iter().collect();
    let p_tilt = spec.tilted_open_probability();
    let field = sample_coupling_field(region, seed)?;
    EdgeEnvironment::from_fn(region, spec.p, |e| {
        let v = field.value(e).expect("field covers its own region");
        v <= if tilted.contains(&e) { p_tilt } else { spec.p }
    })
}
