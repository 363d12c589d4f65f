//! Full-scale verification gate. Each test pins one family of identities or
//! inequalities at its production scale and tolerance, prints a single PASS
//! line on success, and uses a fixed seed so the outcome is reproducible
//! bit for bit.

mod common;

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use sawlab_core::coarsegrain::{
    animal_size_bounds, decompose, extract_separated, for_each_animal, random_animal, Animal,
};
use sawlab_core::environment::{
    sample_environment, sample_potential, DistributionSpec, EdgeEnvironment,
};
use sawlab_core::estimators::{
    beta_monotonicity, coupling_experiment, exhaustive_coupling_check, fractional_moment,
    quenched_growth, Conditioning,
};
use sawlab_core::exec::{map_indexed, moments, with_threads};
use sawlab_core::lattice::{BlockCoord, Region, Site};
use sawlab_core::reweight::{
    ballistic_per_edge_minimum, inverse_moment_small, potential_tilt_density, sample_tilted,
    small_tilt_density, FredoSpec, QFormSpec, TiltSpec,
};
use sawlab_core::rng::derive_seed;
use sawlab_core::walks::{
    count_open_saws, hammersley_check, open_saw_series, partition_function, saw_series, Path,
};

const GATE_SEED: u64 = 0x5A31AB;

fn big_f64(x: &BigUint) -> f64 {
    x.to_f64().expect("count fits in f64")
}

#[test]
fn criterion_01_oracle_equivalence() {
    let series = saw_series(12).unwrap();
    for n in 0..=12u32 {
        assert_eq!(
            series.count(n),
            &BigUint::from(common::naive_saw_count(n)),
            "walk count mismatch at length {n}"
        );
    }
    for (n, frozen) in [(1u32, 4u64), (2, 12), (3, 36), (4, 100)] {
        assert_eq!(series.count(n), &BigUint::from(frozen));
    }

    for m in 1..=8u32 {
        let mut fast = 0u64;
        for_each_animal(m, |_| fast += 1).unwrap();
        assert_eq!(
            fast,
            common::oracle_animal_count(m),
            "animal mismatch at size {m}"
        );
    }
    let frozen_animals = [1u64, 4, 18, 76];
    for (i, want) in frozen_animals.iter().enumerate() {
        assert_eq!(common::oracle_animal_count(i as u32 + 1), *want);
    }

    for n in 1..=6u32 {
        assert_eq!(
            sawlab_core::walks::count_lattice_trees(n).unwrap(),
            BigUint::from(common::oracle_tree_count(n)),
            "tree mismatch at size {n}"
        );
    }
    for (n, frozen) in [(1u32, 1u64), (2, 4), (3, 18)] {
        assert_eq!(common::oracle_tree_count(n), frozen);
    }
    println!("acceptance criterion 01 (oracle equivalence): PASS");
}

#[test]
fn criterion_02_annealed_identity() {
    let seed = derive_seed(GATE_SEED, 2);
    let report = fractional_moment(0.7, 1.0, 8, 100_000, seed).unwrap();
    let target = 0.7f64.powi(8) * 5916.0;
    assert!((report.annealed_mean - target).abs() <= 1e-9 * target);
    let dev = (report.estimate.mean - target).abs();
    assert!(
        dev <= 3.0 * report.estimate.std_error,
        "mean {} vs target {target}: off by {dev}, 3 SE = {}",
        report.estimate.mean,
        3.0 * report.estimate.std_error
    );
    println!("acceptance criterion 02 (annealed identity): PASS");
}

#[test]
fn criterion_03_partition_identity_and_size_bounds() {
    let region = Region::centered(Site::origin(), 10).unwrap();
    let densities = [0.55, 0.6, 0.7, 0.8, 0.9];
    for env_idx in 0..100u64 {
        let p = densities[(env_idx % 5) as usize];
        let env = sample_environment(region, p, derive_seed(GATE_SEED, 300 + env_idx)).unwrap();
        let direct = open_saw_series(&env, Site::origin(), 10).unwrap();
        for n0 in [2i64, 3, 4] {
            for n in 1..=10u32 {
                let parts = decompose(&env, Site::origin(), n, n0).unwrap();
                let total: BigUint = parts.values().sum();
                assert_eq!(
                    &total,
                    direct.count(n),
                    "partition broken at env {env_idx}, n0={n0}, n={n}"
                );
                let (lo, hi) = animal_size_bounds(n, n0);
                for animal in parts.keys() {
                    let size = animal.size() as u64;
                    assert!(
                        (lo..=hi).contains(&size),
                        "animal size {size} outside [{lo}, {hi}] at n={n}, n0={n0}"
                    );
                }
            }
        }
    }
    println!("acceptance criterion 03 (partition identity and size bounds): PASS");
}

#[test]
fn criterion_04_coupling() {
    let mono = coupling_experiment(0.5, 0.8, 6, 10_000, derive_seed(GATE_SEED, 4)).unwrap();
    assert_eq!(
        mono.monotonicity_violations, 0,
        "coupled samples decreased the count at the higher density"
    );

    let exact = exhaustive_coupling_check(0.3, 0.6, 1).unwrap();
    assert_eq!(exact.edge_count, 12);
    assert_eq!(exact.configurations, 4096);
    assert!(
        exact.max_abs_error <= 1e-12,
        "exact integration error {}",
        exact.max_abs_error
    );

    let nested = coupling_experiment(0.5, 0.8, 4, 10_000, derive_seed(GATE_SEED, 44)).unwrap();
    assert_eq!(nested.identity.len(), 4);
    for check in &nested.identity {
        assert!(
            check.z_score.abs() <= 3.0,
            "identity off by {} standard errors (target {})",
            check.z_score,
            check.target
        );
    }
    println!("acceptance criterion 04 (coupling): PASS");
}

#[test]
fn criterion_05_separated_sets() {
    fn check(animal: &Animal) {
        let m = animal.size() as u64;
        let sep = extract_separated(animal);
        assert!(
            sep.size() as u64 >= m.div_ceil(13),
            "too few separated cells for m={m}"
        );
        for (i, &a) in sep.cells().iter().enumerate() {
            assert!(animal.cells().contains(&a));
            for &b in &sep.cells()[i + 1..] {
                assert!(
                    (a.0 - b.0).abs().max((a.1 - b.1).abs()) >= 3,
                    "cells {a:?}, {b:?} closer than 3 in a size-{m} animal"
                );
            }
        }
    }

    for m in 1..=10u32 {
        for_each_animal(m, check).unwrap();
    }
    for i in 0..1000u64 {
        let m = (i % 40) as u32 + 1;
        let animal = random_animal(m, derive_seed(GATE_SEED, 500 + i)).unwrap();
        check(&animal);
    }
    println!("acceptance criterion 05 (separated sets): PASS");
}

#[test]
fn criterion_06_quadratic_form_statistics() {
    let samples = 100_000usize;
    for (ci, &p) in [0.5f64, 0.6, 0.75].iter().enumerate() {
        for (cj, &n0) in [2i64, 4, 8].iter().enumerate() {
            let block = BlockCoord::new(0, 0, n0).unwrap();
            let spec = QFormSpec::new(block, p).unwrap();
            let region = Region::new(Site::new(-n0, -n0), Site::new(2 * n0, 2 * n0)).unwrap();
            let combo_seed = derive_seed(GATE_SEED, 600 + (ci * 3 + cj) as u64);
            let qs = map_indexed(samples, |i| {
                let env = sample_environment(region, p, derive_seed(combo_seed, i as u64)).unwrap();
                spec.quadratic_form(&env).unwrap()
            });
            let stats = moments(&qs);
            assert!(
                stats.mean.abs() <= 3.0 * stats.se_mean,
                "mean {} not centered at (p={p}, n0={n0}); 3 SE = {}",
                stats.mean,
                3.0 * stats.se_mean
            );
            let target = spec.variance_analytic();
            assert!(
                (stats.variance - target).abs() <= 3.0 * stats.se_variance,
                "variance {} vs analytic {target} at (p={p}, n0={n0}); 3 SE = {}",
                stats.variance,
                3.0 * stats.se_variance
            );
        }
    }

    // Conditional mean given an open straight segment, at one grid point.
    let (p, n0) = (0.6, 4i64);
    let block = BlockCoord::new(0, 0, n0).unwrap();
    let spec = QFormSpec::new(block, p).unwrap();
    let region = Region::new(Site::new(-n0, -n0), Site::new(2 * n0, 2 * n0)).unwrap();
    let path = Path::straight_east(Site::origin(), n0 as u32);
    let forced: HashSet<_> = path.edges().collect();
    let target = spec.mean_under_path(&path);
    let cond_seed = derive_seed(GATE_SEED, 66);
    let qs = map_indexed(samples, |i| {
        let base = sample_environment(region, p, derive_seed(cond_seed, i as u64)).unwrap();
        let env = EdgeEnvironment::from_fn(region, p, |e| base.is_open(e) || forced.contains(&e))
            .unwrap();
        spec.quadratic_form(&env).unwrap()
    });
    let stats = moments(&qs);
    assert!(
        (stats.mean - target).abs() <= 3.0 * stats.se_mean,
        "conditional mean {} vs closed form {target}; 3 SE = {}",
        stats.mean,
        3.0 * stats.se_mean
    );

    for n0 in [2i64, 4, 8, 16] {
        let per_edge = ballistic_per_edge_minimum(n0).unwrap();
        assert!(
            per_edge >= (n0 as f64).ln(),
            "harmonic minimum {per_edge} below ln({n0})"
        );
    }
    println!("acceptance criterion 06 (quadratic form statistics): PASS");
}

#[test]
fn criterion_07_small_animal_tilt() {
    let (p, n0) = (0.75, 8i64);
    let animals = [
        Animal::from_cells(vec![(0, 0)]).unwrap(),
        Animal::from_cells(vec![(0, 0), (1, 0)]).unwrap(),
    ];
    for (ai, animal) in animals.iter().enumerate() {
        let m = animal.size() as u32;
        let spec = TiltSpec::new(p, n0, m).unwrap();
        let max_x = n0 * animal.cells().iter().map(|c| c.0 + 1).max().unwrap();
        let region = Region::new(Site::new(0, 0), Site::new(max_x, n0)).unwrap();
        let seed = derive_seed(GATE_SEED, 700 + ai as u64);

        let densities = map_indexed(20_000, |i| {
            let env = sample_environment(region, p, derive_seed(seed, i as u64)).unwrap();
            small_tilt_density(&spec, &env, animal).unwrap()
        });
        let stats = moments(&densities);
        assert!(
            (stats.mean - 1.0).abs() <= 3.0 * stats.se_mean,
            "tilt density mean {} at m={m}; 3 SE = {}",
            stats.mean,
            3.0 * stats.se_mean
        );

        let inverses: Vec<f64> = densities.iter().map(|f| 1.0 / f).collect();
        let inv_stats = moments(&inverses);
        let inv = inverse_moment_small(&spec);
        assert!(
            (inv_stats.mean - inv.value).abs() <= 3.0 * inv_stats.se_mean,
            "inverse moment {} vs closed form {} at m={m}",
            inv_stats.mean,
            inv.value
        );
        assert!(
            inv.value <= inv.bound,
            "closed form exceeds its bound at m={m}"
        );
    }

    // Open-path probability under the tilted law, animal of one block.
    let spec = TiltSpec::new(p, n0, 1).unwrap();
    let animal = &animals[0];
    let region = Region::new(Site::new(0, 0), Site::new(n0, n0)).unwrap();
    let path = Path::straight_east(Site::origin(), 4);
    let path_edges: Vec<_> = path.edges().collect();
    let seed = derive_seed(GATE_SEED, 77);
    let hits = map_indexed(30_000, |i| {
        let env = sample_tilted(&spec, animal, region, derive_seed(seed, i as u64)).unwrap();
        if path_edges.iter().all(|e| env.is_open(*e)) {
            1.0
        } else {
            0.0
        }
    });
    let stats = moments(&hits);
    let target = spec.tilted_open_probability().powi(4);
    assert!(
        (stats.mean - target).abs() <= 3.0 * stats.se_mean,
        "tilted path probability {} vs {target}; 3 SE = {}",
        stats.mean,
        3.0 * stats.se_mean
    );
    println!("acceptance criterion 07 (small-animal tilt): PASS");
}

#[test]
fn criterion_08_confined_box_chain() {
    let spec = FredoSpec::new(0.6, 16, 0.75, 2).unwrap();
    let b = spec.bundle();
    assert!((b.p_prime - 0.525).abs() <= 1e-12);
    assert!((b.tilt_factor - (-2.0f64).exp()).abs() <= 1e-12);
    assert_eq!(b.box_edge_count, 544);
    let per_edge: f64 = 0.36 / 0.525 + 0.16 / 0.475;
    assert!((b.density_cost_exact - per_edge.powi(544)).abs() <= 1e-9 * b.density_cost_exact);
    assert!((b.density_cost_bound - 48.0f64.exp()).abs() <= 1e-6 * b.density_cost_bound);

    let box_region = Region::centered(Site::origin(), spec.radius()).unwrap();
    let walk_region = Region::centered(Site::origin(), 16).unwrap();
    let seed = derive_seed(GATE_SEED, 8);

    // Mean square-root of the box-confined count under the original density,
    // bounded by the thinned mean times the density cost (Cauchy-Schwarz
    // across the two measures).
    let roots = map_indexed(5_000, |i| {
        let inner = sample_environment(box_region, spec.p(), derive_seed(seed, i as u64)).unwrap();
        let env = EdgeEnvironment::from_fn(walk_region, spec.p(), |e| {
            box_region.contains_edge(e) && inner.is_open(e)
        })
        .unwrap();
        big_f64(&count_open_saws(&env, Site::origin(), 16).unwrap()).sqrt()
    });
    let stats = moments(&roots);
    let s16 = big_f64(saw_series(16).unwrap().count(16));
    let rhs = (b.p_prime.powi(16) * s16).sqrt() * b.density_cost_exact.sqrt();
    let upper = stats.mean + 3.0 * stats.se_mean;
    assert!(
        upper <= rhs,
        "square-root moment CI edge {upper} above the analytic product {rhs}"
    );

    // The sampled density ratio matches its closed-form product. On the full
    // 544-edge box the plain ratio mean is too heavy-tailed for naive MC
    // (its true relative SE at this sample count is ~190%), so the full box
    // is checked through the log of the ratio, a bounded-increment sum with
    // an exact mean, and the product form itself is checked on a 12-edge box
    // where the same estimator is well conditioned.
    let ratio_open = spec.p() / b.p_prime;
    let ratio_closed = (1.0 - spec.p()) / (1.0 - b.p_prime);
    let dseed = derive_seed(GATE_SEED, 88);
    let logs = map_indexed(20_000, |i| {
        let env = sample_environment(box_region, spec.p(), derive_seed(dseed, i as u64)).unwrap();
        let mut sum = 0.0f64;
        for idx in 0..box_region.edge_count() as usize {
            sum += if env.is_open_index(idx) {
                ratio_open.ln()
            } else {
                ratio_closed.ln()
            };
        }
        sum
    });
    let lstats = moments(&logs);
    let ltarget = b.box_edge_count as f64
        * (spec.p() * ratio_open.ln() + (1.0 - spec.p()) * ratio_closed.ln());
    assert!(
        (lstats.mean - ltarget).abs() <= 3.0 * lstats.se_mean,
        "log density ratio {} vs exact {ltarget}; 3 SE = {}",
        lstats.mean,
        3.0 * lstats.se_mean
    );

    let small = Region::centered(Site::origin(), 1).unwrap();
    let small_edges = small.edge_count() as usize;
    assert_eq!(small_edges, 12);
    let per_edge_mean = spec.p() * ratio_open + (1.0 - spec.p()) * ratio_closed;
    let pseed = derive_seed(GATE_SEED, 89);
    let prods = map_indexed(20_000, |i| {
        let env = sample_environment(small, spec.p(), derive_seed(pseed, i as u64)).unwrap();
        let mut product = 1.0f64;
        for idx in 0..small_edges {
            product *= if env.is_open_index(idx) {
                ratio_open
            } else {
                ratio_closed
            };
        }
        product
    });
    let pstats = moments(&prods);
    let ptarget = per_edge_mean.powi(12);
    assert!(
        (pstats.mean - ptarget).abs() <= 3.0 * pstats.se_mean,
        "density product {} vs exact {ptarget}; 3 SE = {}",
        pstats.mean,
        3.0 * pstats.se_mean
    );
    assert!((per_edge_mean - per_edge).abs() <= 1e-12);
    println!("acceptance criterion 08 (confined box chain): PASS");
}

#[test]
fn criterion_09_quenched_annealed_trend() {
    let lengths = [4u32, 6, 8, 10];
    let dilute = quenched_growth(
        0.6,
        10,
        14_000,
        derive_seed(GATE_SEED, 9),
        Conditioning::PositiveZ,
    )
    .unwrap();
    let dense = quenched_growth(
        0.9,
        10,
        12_000,
        derive_seed(GATE_SEED, 99),
        Conditioning::PositiveZ,
    )
    .unwrap();

    for &n in &lengths {
        let row = dilute.row(n).unwrap();
        assert!(
            row.retained.unwrap() >= 10_000,
            "only {} retained samples at N={n}",
            row.retained.unwrap()
        );
        let gap = row.gap.unwrap();
        let se = row.quenched_se.unwrap();
        assert!(
            gap >= 3.0 * se,
            "gap {gap} not positive by 3 SE ({se}) at N={n}"
        );
    }

    for pair in lengths.windows(2) {
        let a = dilute.row(pair[0]).unwrap();
        let b = dilute.row(pair[1]).unwrap();
        let joint = (a.quenched_se.unwrap().powi(2) + b.quenched_se.unwrap().powi(2)).sqrt();
        assert!(
            b.gap.unwrap() >= a.gap.unwrap() - 3.0 * joint,
            "gap decreased from N={} ({}) to N={} ({})",
            pair[0],
            a.gap.unwrap(),
            pair[1],
            b.gap.unwrap()
        );
    }

    for &n in &lengths {
        let lo = dense.row(n).unwrap();
        let hi = dilute.row(n).unwrap();
        let joint = (lo.quenched_se.unwrap().powi(2) + hi.quenched_se.unwrap().powi(2)).sqrt();
        assert!(
            lo.gap.unwrap() + 3.0 * joint <= hi.gap.unwrap(),
            "gap at p=0.9 ({}) not below gap at p=0.6 ({}) at N={n}",
            lo.gap.unwrap(),
            hi.gap.unwrap()
        );
    }
    println!("acceptance criterion 09 (quenched-annealed trend): PASS");
}

#[test]
fn criterion_10_comparison_inequality() {
    let region = Region::centered(Site::origin(), 12).unwrap();
    let densities = [0.55, 0.65, 0.8];
    for env_idx in 0..100u64 {
        let p = densities[(env_idx % 3) as usize];
        let env = sample_environment(region, p, derive_seed(GATE_SEED, 1000 + env_idx)).unwrap();
        let pairs: Vec<_> = region
            .edges()
            .filter(|e| {
                let (a, b) = e.endpoints();
                a.linf_norm() <= 2 && b.linf_norm() <= 2 && env.is_open(*e)
            })
            .take(5)
            .collect();
        assert_eq!(
            pairs.len(),
            5,
            "not enough open central edges in env {env_idx}"
        );
        for e in pairs {
            let (x, x2) = e.endpoints();
            for n in 1..=8u32 {
                assert!(
                    hammersley_check(&env, x, x2, n).unwrap(),
                    "inequality failed at env {env_idx}, pair {x:?}-{x2:?}, n={n}"
                );
            }
        }
    }
    println!("acceptance criterion 10 (comparison inequality): PASS");
}

#[test]
fn criterion_11_potential_model() {
    let region = Region::centered(Site::origin(), 6).unwrap();
    let pot = sample_potential(
        region,
        DistributionSpec::Gaussian,
        derive_seed(GATE_SEED, 11),
    )
    .unwrap();
    let series = saw_series(6).unwrap();
    for n in 1..=6u32 {
        let z = partition_function(&pot, 0.0, n).unwrap();
        assert_eq!(
            z,
            big_f64(series.count(n)),
            "zero-temperature mismatch at n={n}"
        );
    }

    for beta in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let lam = DistributionSpec::Gaussian.log_mgf(beta);
        assert!(
            (lam - beta * beta / 2.0).abs() <= 1e-15 * (1.0 + beta * beta),
            "Gaussian cumulant {lam} differs from beta^2/2 at beta={beta}"
        );
    }

    let report = beta_monotonicity(
        DistributionSpec::Gaussian,
        &[0.0, 0.5, 1.0],
        6,
        10_000,
        derive_seed(GATE_SEED, 111),
    )
    .unwrap();
    let first = report.estimates[0].mean;
    let sqrt_s6 = big_f64(series.count(6)).sqrt();
    assert!((first - sqrt_s6).abs() <= 1e-9 * sqrt_s6);
    assert!(
        report.non_increasing_within_ci,
        "square-root moment increased along the beta grid"
    );

    // Site-tilt normalization: the density averages to one.
    let n0 = 4i64;
    let animal = Animal::from_cells(vec![(0, 0)]).unwrap();
    let delta = 0.25;
    let tilt_region = Region::centered(Site::origin(), n0).unwrap();
    let seed = derive_seed(GATE_SEED, 112);
    let densities = map_indexed(20_000, |i| {
        let pot_i = sample_potential(
            tilt_region,
            DistributionSpec::Gaussian,
            derive_seed(seed, i as u64),
        )
        .unwrap();
        potential_tilt_density(&pot_i, &animal, n0, delta).unwrap()
    });
    let stats = moments(&densities);
    assert!(
        (stats.mean - 1.0).abs() <= 3.0 * stats.se_mean,
        "site-tilt density mean {}; 3 SE = {}",
        stats.mean,
        3.0 * stats.se_mean
    );
    println!("acceptance criterion 11 (potential model): PASS");
}

#[test]
fn criterion_12_determinism_across_thread_counts() {
    let run = || {
        let fractional = fractional_moment(0.7, 0.5, 6, 500, derive_seed(GATE_SEED, 120)).unwrap();
        let growth = quenched_growth(
            0.6,
            5,
            300,
            derive_seed(GATE_SEED, 121),
            Conditioning::PositiveZ,
        )
        .unwrap();
        let coupling = coupling_experiment(0.5, 0.8, 3, 400, derive_seed(GATE_SEED, 122)).unwrap();
        let beta = beta_monotonicity(
            DistributionSpec::Gaussian,
            &[0.0, 0.5],
            4,
            300,
            derive_seed(GATE_SEED, 123),
        )
        .unwrap();
        let spec = QFormSpec::new(BlockCoord::new(0, 0, 2).unwrap(), 0.6).unwrap();
        let region = Region::new(Site::new(-2, -2), Site::new(4, 4)).unwrap();
        let qseed = derive_seed(GATE_SEED, 124);
        let qs = map_indexed(500, |i| {
            let env = sample_environment(region, 0.6, derive_seed(qseed, i as u64)).unwrap();
            spec.quadratic_form(&env).unwrap()
        });
        serde_json::to_string(&serde_json::json!({
            "fractional": fractional,
            "growth": growth,
            "coupling": coupling,
            "beta": beta,
            "qform": qs,
        }))
        .unwrap()
    };
    let single = with_threads(Some(1), run);
    let multi = with_threads(Some(3), run);
    assert_eq!(single, multi, "reports changed with the thread count");
    println!("acceptance criterion 12 (determinism across thread counts): PASS");
}
