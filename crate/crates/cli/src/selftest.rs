//! Fast invariant suite behind `sawlab selftest`.
//!
//! Each check pins an identity that has an independent derivation: reference
//! count series, exact conditional-mean integration, and cross-checks
//! between modules that compute the same number two different ways.

use serde_json::json;

use num_bigint::BigUint;
use sawlab_core::coarsegrain::{decompose, for_each_animal};
use sawlab_core::environment::{sample_environment, sample_potential, DistributionSpec};
use sawlab_core::estimators::exhaustive_coupling_check;
use sawlab_core::lattice::{Region, Site};
use sawlab_core::walks::{
    count_lattice_trees, count_open_saws, count_saws, partition_function, saw_series,
};

use crate::commands::CommandOutput;
use crate::errors::CliResult;

struct Check {
    name: &'static str,
    outcome: Result<(), String>,
}

fn walk_series_check() -> Result<(), String> {
    let expected: [u64; 10] = [4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100];
    let series = saw_series(10).map_err(|e| e.to_string())?;
    for (i, want) in expected.iter().enumerate() {
        let n = (i + 1) as u32;
        if series.count(n) != &BigUint::from(*want) {
            return Err(format!("length {n}: got {}, want {want}", series.count(n)));
        }
    }
    Ok(())
}

fn animal_series_check() -> Result<(), String> {
    let expected: [u64; 6] = [1, 4, 18, 76, 315, 1296];
    for (i, want) in expected.iter().enumerate() {
        let m = (i + 1) as u32;
        let mut count = 0u64;
        for_each_animal(m, |_| count += 1).map_err(|e| e.to_string())?;
        if count != *want {
            return Err(format!("size {m}: got {count}, want {want}"));
        }
    }
    Ok(())
}

fn tree_series_check() -> Result<(), String> {
    let expected: [u64; 4] = [1, 4, 18, 88];
    for (i, want) in expected.iter().enumerate() {
        let n = (i + 1) as u32;
        let got = count_lattice_trees(n).map_err(|e| e.to_string())?;
        if got != BigUint::from(*want) {
            return Err(format!("size {n}: got {got}, want {want}"));
        }
    }
    Ok(())
}

fn decomposition_check() -> Result<(), String> {
    let region = Region::centered(Site::origin(), 6).map_err(|e| e.to_string())?;
    for seed in 0..3u64 {
        let env = sample_environment(region, 0.6, seed).map_err(|e| e.to_string())?;
        let direct = count_open_saws(&env, Site::origin(), 6).map_err(|e| e.to_string())?;
        for n0 in [2i64, 3] {
            let parts = decompose(&env, Site::origin(), 6, n0).map_err(|e| e.to_string())?;
            let total: BigUint = parts.values().sum();
            if total != direct {
                return Err(format!(
                    "seed {seed}, block side {n0}: decomposition sums to {total}, \
                     direct count is {direct}"
                ));
            }
        }
    }
    Ok(())
}

fn coupling_identity_check() -> Result<(), String> {
    let check = exhaustive_coupling_check(0.3, 0.6, 1).map_err(|e| e.to_string())?;
    if check.max_abs_error > 1e-9 {
        return Err(format!(
            "exact integration misses the identity by {}",
            check.max_abs_error
        ));
    }
    Ok(())
}

fn partition_identity_check() -> Result<(), String> {
    let region = Region::centered(Site::origin(), 5).map_err(|e| e.to_string())?;
    let pot = sample_potential(region, DistributionSpec::Gaussian, 7).map_err(|e| e.to_string())?;
    let z = partition_function(&pot, 0.0, 5).map_err(|e| e.to_string())?;
    let s5 = count_saws(5).map_err(|e| e.to_string())?;
    let want = 284.0;
    if s5 != BigUint::from(284u32) {
        return Err(format!("reference count drifted: {s5}"));
    }
    if z != want {
        return Err(format!(
            "zero-temperature partition function {z}, want {want}"
        ));
    }
    Ok(())
}

fn coupling_monotone_check() -> Result<(), String> {
    use sawlab_core::environment::sample_coupling_field;
    let region = Region::centered(Site::origin(), 4).map_err(|e| e.to_string())?;
    for seed in 0..100u64 {
        let field = sample_coupling_field(region, seed).map_err(|e| e.to_string())?;
        let sparse = field.threshold(0.5).map_err(|e| e.to_string())?;
        let dense = field.threshold(0.8).map_err(|e| e.to_string())?;
        let z1 = count_open_saws(&sparse, Site::origin(), 4).map_err(|e| e.to_string())?;
        let z2 = count_open_saws(&dense, Site::origin(), 4).map_err(|e| e.to_string())?;
        if z1 > z2 {
            return Err(format!(
                "seed {seed}: {z1} open walks at p=0.5 but {z2} at p=0.8"
            ));
        }
    }
    Ok(())
}

pub fn run() -> CliResult<CommandOutput> {
    let checks = vec![
        Check {
            name: "walk counts match the reference series",
            outcome: walk_series_check(),
        },
        Check {
            name: "animal counts match the reference series",
            outcome: animal_series_check(),
        },
        Check {
            name: "tree counts match the reference values",
            outcome: tree_series_check(),
        },
        Check {
            name: "animal decomposition preserves the open-walk count",
            outcome: decomposition_check(),
        },
        Check {
            name: "coupled thinning has the exact conditional mean",
            outcome: coupling_identity_check(),
        },
        Check {
            name: "zero-temperature partition function equals the walk count",
            outcome: partition_identity_check(),
        },
        Check {
            name: "coupled environments are monotone in density",
            outcome: coupling_monotone_check(),
        },
    ];

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut first_failure = None;
    for check in &checks {
        let status = match &check.outcome {
            Ok(()) => "PASS".to_string(),
            Err(detail) => {
                if first_failure.is_none() {
                    first_failure = Some(format!("{}: {detail}", check.name));
                }
                format!("FAIL: {detail}")
            }
        };
        rows.push(vec![check.name.to_string(), status.clone()]);
        entries.push(json!({ "invariant": check.name, "status": status }));
    }

    let mut out = CommandOutput::table(
        "selftest",
        json!({ "checks": checks.len() }),
        &["invariant", "status"],
        rows,
        json!({ "checks": entries }),
    );
    out.invariant_failure = first_failure;
    Ok(out)
}
