//! Subcommand definitions and handlers.
//!
//! Every numeric flag is optional at parse time so a config file can supply
//! it; resolution (flag over file) happens here, before any work starts.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sawlab_core::coarsegrain::{
    animal_size_bounds, decompose, extract_separated, for_each_animal, random_animal, Animal,
};
use sawlab_core::environment::{
    clusters, dump_environment, origin_in_giant, sample_environment, sample_potential,
    DistributionSpec,
};
use sawlab_core::estimators::{
    annealed_growth, beta_monotonicity, coupling_experiment, exhaustive_coupling_check,
    fractional_moment, quenched_growth, Conditioning,
};
use sawlab_core::lattice::{BlockCoord, Region, Site};
use sawlab_core::reweight::{
    default_site_delta, inverse_moment_small, potential_inverse_moment, potential_qform,
    potential_qform_variance, FredoSpec, QFormSpec, TiltSpec, DEFAULT_K, EMPIRICAL_C1,
};
use sawlab_core::walks::{
    count_lattice_trees, count_open_restricted_saws, count_open_saws, count_open_trees,
    count_restricted_saws, restricted_radius, saw_series,
};

use crate::config::{parse_f64_list, FileConfig};
use crate::errors::{CliError, CliResult};
use crate::output::{csv_table, fmt_f64};

#[derive(Parser)]
#[command(
    name = "sawlab",
    version,
    about = "Self-avoiding walks, lattice animals, and change-of-measure experiments \
             on diluted square lattices",
    after_help = "Configuration: flags override --config file values (flat key=value or \
                  JSON; keys match long flag names). The SAWLAB_SEED environment variable \
                  overrides the seed only (flags still win). Reports: CSV on stdout; \
                  --output FILE additionally writes a JSON report with the resolved \
                  config, version, and timing.\n\
                  Exit codes: 0 ok, 2 config error, 3 resource bound, 4 invariant failure."
)]
pub struct Cli {
    /// Config file (flat key=value or JSON object).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base seed for all sampled randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker-thread cap; results are identical for any value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write a JSON report here in addition to CSV on stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Exact walk and tree counting.
    #[command(subcommand)]
    Saw(SawCmd),
    /// Bond-environment sampling and cluster statistics.
    #[command(subcommand)]
    Perc(PercCmd),
    /// Block-animal enumeration and walk decomposition.
    #[command(subcommand)]
    Animal(AnimalCmd),
    /// Change-of-measure building blocks.
    #[command(subcommand)]
    Com(ComCmd),
    /// Monte Carlo estimators with confidence intervals.
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// Run the oracle-equivalence suite and report every invariant checked.
    Selftest,
}

#[derive(Subcommand)]
pub enum SawCmd {
    /// Count self-avoiding walks per length up to n.
    Count(CountArgs),
    /// Count open self-avoiding walks in one sampled environment.
    OpenCount(OpenCountArgs),
    /// Count walks confined to the ball of radius floor(n^alpha).
    Restricted(RestrictedArgs),
    /// Count lattice trees through the origin.
    Trees(TreesArgs),
}

#[derive(Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args)]
pub struct OpenCountArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Environment region radius (default: n).
    #[arg(long)]
    pub radius: Option<i64>,
}

#[derive(Args)]
pub struct RestrictedArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// When set, count only open walks in an environment of this density.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args)]
pub struct TreesArgs {
    /// Tree size in sites.
    #[arg(long)]
    pub n: Option<u32>,
    /// When set, count only fully open trees in an environment of this density.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Subcommand)]
pub enum PercCmd {
    /// Sample an environment and summarize its density.
    Sample(PercArgs),
    /// Label open clusters and report their statistics.
    Clusters(PercArgs),
    /// Emit the portable text dump of a sampled environment.
    Dump(PercArgs),
}

#[derive(Args)]
pub struct PercArgs {
    #[arg(long)]
    pub radius: Option<i64>,
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Subcommand)]
pub enum AnimalCmd {
    /// Count origin-containing animals per size up to m.
    Enum(AnimalEnumArgs),
    /// Decompose the open-walk count by traversed block animal.
    Decompose(DecomposeArgs),
    /// Extract a well-separated sub-animal.
    Separate(SeparateArgs),
}

#[derive(Args)]
pub struct AnimalEnumArgs {
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub n0: Option<i64>,
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args)]
pub struct SeparateArgs {
    /// Random-animal size (grown from the seed) when --animal is absent.
    #[arg(long)]
    pub m: Option<u32>,
    /// Explicit animal, e.g. "(0,0) (1,0) (1,1)".
    #[arg(long)]
    pub animal: Option<String>,
}

#[derive(Subcommand)]
pub enum ComCmd {
    /// Neighborhood quadratic form of one sampled environment.
    Qform(QformArgs),
    /// Small-animal exponential tilt diagnostics.
    Tilt(TiltArgs),
    /// Percolation-parameter comparison bundle.
    Fredo(FredoArgs),
    /// Site-potential tilt and quadratic form diagnostics.
    Potential(PotentialArgs),
}

#[derive(Args)]
pub struct QformArgs {
    #[arg(long)]
    pub n0: Option<i64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Indicator threshold constant (default 3).
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Args)]
pub struct TiltArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n0: Option<i64>,
    /// Animal size in blocks.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args)]
pub struct FredoArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension (default 2; only the box-edge count is dimension-specific).
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Args)]
pub struct PotentialArgs {
    #[arg(long)]
    pub n0: Option<i64>,
    /// Site law: gaussian, rademacher, or bernoulli=P.
    #[arg(long)]
    pub law: Option<String>,
    /// Tilt size (default 1/n0).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Animal size in blocks for the inverse moment (default 1).
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Subcommand)]
pub enum EstimateCmd {
    /// Exact annealed per-step growth series.
    Annealed(AnnealedArgs),
    /// Monte Carlo quenched growth with retention and gap columns.
    Quenched(QuenchedArgs),
    /// Monte Carlo fractional moment with the empirical contraction factor.
    Fractional(FractionalArgs),
    /// Coupled-environment monotonicity and conditional-mean identity.
    Coupling(CouplingArgs),
    /// Square-root-moment monotonicity in the inverse temperature.
    Beta(BetaArgs),
}

#[derive(Args)]
pub struct AnnealedArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args)]
pub struct QuenchedArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Retention rule: none, positive_z, or origin_in_giant.
    #[arg(long)]
    pub conditioning: Option<String>,
}

#[derive(Args)]
pub struct FractionalArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Args)]
pub struct CouplingArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Integrate the identity exactly over a small region instead of by
    /// Monte Carlo.
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Args)]
pub struct BetaArgs {
    /// Site law: gaussian, rademacher, or bernoulli=P.
    #[arg(long)]
    pub law: Option<String>,
    /// Ascending comma-separated grid, e.g. 0,0.5,1.
    #[arg(long)]
    pub betas: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
}

/// Everything a handler produces; the driver decides where it goes.
pub struct CommandOutput {
    pub command: &'static str,
    pub config_echo: Value,
    pub stdout_text: String,
    pub result: Value,
    /// Raw text (environment dumps), not CSV: skip the JSON report and, with
    /// --output, write the text itself to the file.
    pub raw: bool,
    /// A checked invariant failed; emit everything, then exit 4.
    pub invariant_failure: Option<String>,
}

impl CommandOutput {
    pub(crate) fn table(
        command: &'static str,
        config_echo: Value,
        headers: &[&str],
        rows: Vec<Vec<String>>,
        result: Value,
    ) -> Self {
        CommandOutput {
            command,
            config_echo,
            stdout_text: csv_table(headers, &rows),
            result,
            raw: false,
            invariant_failure: None,
        }
    }
}

fn parse_law(s: &str) -> CliResult<DistributionSpec> {
    let lower = s.trim().to_ascii_lowercase();
    if lower == "gaussian" {
        return Ok(DistributionSpec::Gaussian);
    }
    if lower == "rademacher" {
        return Ok(DistributionSpec::Rademacher);
    }
    if let Some(rest) = lower
        .strip_prefix("bernoulli=")
        .or_else(|| lower.strip_prefix("bernoulli:"))
    {
        let p: f64 = rest
            .parse()
            .map_err(|_| CliError::Config(format!("law: cannot parse `{rest}` as a number")))?;
        return Ok(DistributionSpec::CenteredBernoulli { p });
    }
    Err(CliError::Config(format!(
        "unknown law `{s}` (expected gaussian, rademacher, or bernoulli=P)"
    )))
}

fn law_name(law: DistributionSpec) -> String {
    match law {
        DistributionSpec::Gaussian => "gaussian".into(),
        DistributionSpec::Rademacher => "rademacher".into(),
        DistributionSpec::CenteredBernoulli { p } => format!("bernoulli={p}"),
    }
}

fn parse_conditioning(s: &str) -> CliResult<Conditioning> {
    match s.trim().to_ascii_lowercase().as_str() {
        "none" => Ok(Conditioning::None),
        "positive_z" => Ok(Conditioning::PositiveZ),
        "origin_in_giant" => Ok(Conditioning::OriginInGiant),
        other => Err(CliError::Config(format!(
            "unknown conditioning `{other}` (expected none, positive_z, or origin_in_giant)"
        ))),
    }
}

pub fn dispatch(command: &Command, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    match command {
        Command::Saw(SawCmd::Count(a)) => saw_count(a, file),
        Command::Saw(SawCmd::OpenCount(a)) => saw_open_count(a, file, seed),
        Command::Saw(SawCmd::Restricted(a)) => saw_restricted(a, file, seed),
        Command::Saw(SawCmd::Trees(a)) => saw_trees(a, file, seed),
        Command::Perc(PercCmd::Sample(a)) => perc_sample(a, file, seed),
        Command::Perc(PercCmd::Clusters(a)) => perc_clusters(a, file, seed),
        Command::Perc(PercCmd::Dump(a)) => perc_dump(a, file, seed),
        Command::Animal(AnimalCmd::Enum(a)) => animal_enum(a, file),
        Command::Animal(AnimalCmd::Decompose(a)) => animal_decompose(a, file, seed),
        Command::Animal(AnimalCmd::Separate(a)) => animal_separate(a, file, seed),
        Command::Com(ComCmd::Qform(a)) => com_qform(a, file, seed),
        Command::Com(ComCmd::Tilt(a)) => com_tilt(a, file),
        Command::Com(ComCmd::Fredo(a)) => com_fredo(a, file),
        Command::Com(ComCmd::Potential(a)) => com_potential(a, file, seed),
        Command::Estimate(EstimateCmd::Annealed(a)) => estimate_annealed(a, file),
        Command::Estimate(EstimateCmd::Quenched(a)) => estimate_quenched(a, file, seed),
        Command::Estimate(EstimateCmd::Fractional(a)) => estimate_fractional(a, file, seed),
        Command::Estimate(EstimateCmd::Coupling(a)) => estimate_coupling(a, file, seed),
        Command::Estimate(EstimateCmd::Beta(a)) => estimate_beta(a, file, seed),
        Command::Selftest => crate::selftest::run(),
    }
}

fn saw_count(a: &CountArgs, file: &FileConfig) -> CliResult<CommandOutput> {
    let n = file.require(a.n, "n")?;
    let series = saw_series(n)?;
    let rows: Vec<Vec<String>> = (1..=n)
        .map(|k| vec![k.to_string(), series.count(k).to_string()])
        .collect();
    let result = json!({
        "counts": (1..=n).map(|k| json!({"n": k, "count": series.count(k).to_string()}))
            .collect::<Vec<_>>(),
    });
    Ok(CommandOutput::table(
        "saw count",
        json!({ "n": n }),
        &["n", "count"],
        rows,
        result,
    ))
}

fn saw_open_count(a: &OpenCountArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n = file.require(a.n, "n")?;
    let p = file.require(a.p, "p")?;
    let radius = file.resolve(a.radius, "radius")?.unwrap_or(n as i64);
    let region = Region::centered(Site::origin(), radius)?;
    let env = sample_environment(region, p, seed)?;
    let z = count_open_saws(&env, Site::origin(), n)?;
    let rows = vec![vec![
        n.to_string(),
        fmt_f64(p),
        seed.to_string(),
        z.to_string(),
    ]];
    Ok(CommandOutput::table(
        "saw open-count",
        json!({ "n": n, "p": p, "radius": radius }),
        &["n", "p", "seed", "count"],
        rows,
        json!({ "n": n, "count": z.to_string() }),
    ))
}

fn saw_restricted(a: &RestrictedArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n = file.require(a.n, "n")?;
    let alpha = file.require(a.alpha, "alpha")?;
    let p = file.resolve(a.p, "p")?;
    let radius = restricted_radius(n, alpha)?;
    let count = match p {
        None => count_restricted_saws(n, alpha)?,
        Some(p) => {
            let region = Region::centered(Site::origin(), n as i64)?;
            let env = sample_environment(region, p, seed)?;
            count_open_restricted_saws(&env, Site::origin(), n, alpha)?
        }
    };
    let rows = vec![vec![
        n.to_string(),
        fmt_f64(alpha),
        radius.to_string(),
        count.to_string(),
    ]];
    Ok(CommandOutput::table(
        "saw restricted",
        json!({ "n": n, "alpha": alpha, "p": p }),
        &["n", "alpha", "radius", "count"],
        rows,
        json!({ "n": n, "alpha": alpha, "radius": radius, "count": count.to_string() }),
    ))
}

fn saw_trees(a: &TreesArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n = file.require(a.n, "n")?;
    let p = file.resolve(a.p, "p")?;
    let count = match p {
        None => count_lattice_trees(n)?,
        Some(p) => {
            let region = Region::centered(Site::origin(), n.max(1) as i64)?;
            let env = sample_environment(region, p, seed)?;
            count_open_trees(&env, Site::origin(), n)?
        }
    };
    let rows = vec![vec![n.to_string(), count.to_string()]];
    Ok(CommandOutput::table(
        "saw trees",
        json!({ "n": n, "p": p }),
        &["n", "count"],
        rows,
        json!({ "n": n, "count": count.to_string() }),
    ))
}

fn perc_env(
    a: &PercArgs,
    file: &FileConfig,
    seed: u64,
) -> CliResult<(i64, f64, sawlab_core::environment::EdgeEnvironment)> {
    let radius = file.require(a.radius, "radius")?;
    let p = file.require(a.p, "p")?;
    let region = Region::centered(Site::origin(), radius)?;
    let env = sample_environment(region, p, seed)?;
    Ok((radius, p, env))
}

fn perc_sample(a: &PercArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let (radius, p, env) = perc_env(a, file, seed)?;
    let edges = env.region().edge_count();
    let rows = vec![vec![
        radius.to_string(),
        fmt_f64(p),
        seed.to_string(),
        edges.to_string(),
        env.open_count().to_string(),
        fmt_f64(env.open_fraction()),
    ]];
    Ok(CommandOutput::table(
        "perc sample",
        json!({ "radius": radius, "p": p }),
        &[
            "radius",
            "p",
            "seed",
            "edges",
            "open_edges",
            "open_fraction",
        ],
        rows,
        json!({
            "edges": edges,
            "open_edges": env.open_count(),
            "open_fraction": env.open_fraction(),
        }),
    ))
}

fn perc_clusters(a: &PercArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let (radius, p, env) = perc_env(a, file, seed)?;
    let labeling = clusters(&env);
    let giant = origin_in_giant(&env)?;
    let rows = vec![vec![
        radius.to_string(),
        fmt_f64(p),
        seed.to_string(),
        labeling.cluster_count().to_string(),
        labeling.largest_size().to_string(),
        giant.to_string(),
    ]];
    Ok(CommandOutput::table(
        "perc clusters",
        json!({ "radius": radius, "p": p }),
        &[
            "radius",
            "p",
            "seed",
            "clusters",
            "largest",
            "origin_in_giant",
        ],
        rows,
        json!({
            "clusters": labeling.cluster_count(),
            "largest": labeling.largest_size(),
            "origin_in_giant": giant,
        }),
    ))
}

fn perc_dump(a: &PercArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let (radius, p, env) = perc_env(a, file, seed)?;
    let mut buf = Vec::new();
    dump_environment(&env, &mut buf)?;
    let text = String::from_utf8(buf).expect("dump format is ASCII");
    Ok(CommandOutput {
        command: "perc dump",
        config_echo: json!({ "radius": radius, "p": p }),
        stdout_text: text,
        result: Value::Null,
        raw: true,
        invariant_failure: None,
    })
}

fn animal_enum(a: &AnimalEnumArgs, file: &FileConfig) -> CliResult<CommandOutput> {
    let m = file.require(a.m, "m")?;
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for size in 1..=m {
        let mut count: u64 = 0;
        for_each_animal(size, |_| count += 1)?;
        rows.push(vec![size.to_string(), count.to_string()]);
        counts.push(json!({ "m": size, "count": count }));
    }
    Ok(CommandOutput::table(
        "animal enum",
        json!({ "m": m }),
        &["m", "count"],
        rows,
        json!({ "counts": counts }),
    ))
}

fn animal_decompose(a: &DecomposeArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n = file.require(a.n, "n")?;
    let n0 = file.require(a.n0, "n0")?;
    let p = file.require(a.p, "p")?;
    let region = Region::centered(Site::origin(), n as i64)?;
    let env = sample_environment(region, p, seed)?;
    let parts = decompose(&env, Site::origin(), n, n0)?;
    let z = count_open_saws(&env, Site::origin(), n)?;
    let total: num_bigint::BigUint = parts.values().sum();

    let (lo, hi) = animal_size_bounds(n, n0);
    let mut rows = Vec::new();
    let mut animals = Vec::new();
    for (animal, count) in &parts {
        rows.push(vec![animal.to_string(), count.to_string()]);
        animals.push(json!({ "animal": animal.to_string(), "count": count.to_string() }));
    }
    let invariant_failure = (total != z).then(|| {
        format!("animal decomposition total {total} does not reproduce the open-walk count {z}")
    });
    let mut out = CommandOutput::table(
        "animal decompose",
        json!({ "n": n, "n0": n0, "p": p, "size_bounds": [lo, hi] }),
        &["animal", "count"],
        rows,
        json!({
            "open_count": z.to_string(),
            "total": total.to_string(),
            "animals": animals,
        }),
    );
    out.invariant_failure = invariant_failure;
    Ok(out)
}

fn animal_separate(a: &SeparateArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let animal_text = match &a.animal {
        Some(t) => Some(t.clone()),
        None => file.raw("animal").map(str::to_string),
    };
    let animal = match animal_text {
        Some(text) => text
            .parse::<Animal>()
            .map_err(|e| CliError::Config(format!("--animal: {e}")))?,
        None => {
            let m = file.require(a.m, "m")?;
            random_animal(m, seed)?
        }
    };
    let separated = extract_separated(&animal);
    let m = animal.size() as u64;
    let rows = vec![vec![
        m.to_string(),
        separated.cells().len().to_string(),
        m.div_ceil(13).to_string(),
        separated
            .cells()
            .iter()
            .map(|(x, y)| format!("({x},{y})"))
            .collect::<Vec<_>>()
            .join(" "),
    ]];
    Ok(CommandOutput::table(
        "animal separate",
        json!({ "m": m, "animal": animal.to_string() }),
        &["m", "separated", "guarantee", "cells"],
        rows,
        json!({
            "m": m,
            "separated": separated.cells().len(),
            "cells": separated.cells().iter().map(|(x, y)| format!("({x},{y})"))
                .collect::<Vec<_>>(),
        }),
    ))
}

fn com_qform(a: &QformArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n0 = file.require(a.n0, "n0")?;
    let p = file.require(a.p, "p")?;
    let k = file.resolve(a.k, "k")?.unwrap_or(DEFAULT_K);
    let block = BlockCoord::new(0, 0, n0)?;
    let spec = QFormSpec::with_threshold(block, p, k)?;
    let region = Region::centered(Site::origin(), 2 * n0)?;
    let env = sample_environment(region, p, seed)?;
    let q = spec.quadratic_form(&env)?;
    let rows = vec![vec![
        n0.to_string(),
        fmt_f64(p),
        fmt_f64(k),
        fmt_f64(q),
        fmt_f64(spec.indicator_threshold()),
        fmt_f64(spec.fx(&env)?),
        fmt_f64(spec.variance_analytic()),
    ]];
    Ok(CommandOutput::table(
        "com qform",
        json!({ "n0": n0, "p": p, "k": k, "empirical_c1": EMPIRICAL_C1 }),
        &[
            "n0",
            "p",
            "k",
            "q",
            "indicator_threshold",
            "fx",
            "variance_analytic",
        ],
        rows,
        json!({
            "q": q,
            "indicator_threshold": spec.indicator_threshold(),
            "fx": spec.fx(&env)?,
            "variance_analytic": spec.variance_analytic(),
        }),
    ))
}

fn com_tilt(a: &TiltArgs, file: &FileConfig) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let n0 = file.require(a.n0, "n0")?;
    let m = file.require(a.m, "m")?;
    let spec = TiltSpec::new(p, n0, m)?;
    let inv = inverse_moment_small(&spec);
    let rows = vec![vec![
        fmt_f64(p),
        n0.to_string(),
        m.to_string(),
        fmt_f64(spec.lambda()),
        fmt_f64(spec.tilted_open_probability()),
        fmt_f64(inv.value),
        fmt_f64(inv.bound),
    ]];
    Ok(CommandOutput::table(
        "com tilt",
        json!({ "p": p, "n0": n0, "m": m }),
        &[
            "p",
            "n0",
            "m",
            "lambda",
            "tilted_open_probability",
            "inverse_moment",
            "inverse_moment_bound",
        ],
        rows,
        json!({
            "lambda": spec.lambda(),
            "tilted_open_probability": spec.tilted_open_probability(),
            "inverse_moment": inv.value,
            "inverse_moment_bound": inv.bound,
        }),
    ))
}

fn com_fredo(a: &FredoArgs, file: &FileConfig) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let n = file.require(a.n, "n")?;
    let alpha = file.require(a.alpha, "alpha")?;
    let d = file.resolve(a.d, "d")?.unwrap_or(2);
    let spec = FredoSpec::new(p, n, alpha, d)?;
    let b = spec.bundle();
    let rows = vec![vec![
        d.to_string(),
        fmt_f64(alpha),
        n.to_string(),
        fmt_f64(p),
        fmt_f64(b.p_prime),
        fmt_f64(b.tilt_factor),
        b.box_edge_count.to_string(),
        fmt_f64(b.density_cost_exact),
        fmt_f64(b.density_cost_bound),
    ]];
    Ok(CommandOutput::table(
        "com fredo",
        json!({ "p": p, "n": n, "alpha": alpha, "d": d }),
        &[
            "d",
            "alpha",
            "n",
            "p",
            "p_prime",
            "tilt_factor",
            "box_edges",
            "density_cost_exact",
            "density_cost_bound",
        ],
        rows,
        json!({
            "p_prime": b.p_prime,
            "tilt_factor": b.tilt_factor,
            "box_edge_count": b.box_edge_count,
            "density_cost_exact": b.density_cost_exact,
            "density_cost_bound": b.density_cost_bound,
        }),
    ))
}

fn com_potential(a: &PotentialArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let n0 = file.require(a.n0, "n0")?;
    let law = match file.resolve(a.law.clone(), "law")? {
        Some(text) => parse_law(&text)?,
        None => DistributionSpec::Gaussian,
    };
    let delta = match file.resolve(a.delta, "delta")? {
        Some(d) => d,
        None => default_site_delta(n0)?,
    };
    let m = file.resolve(a.m, "m")?.unwrap_or(1);
    let inv = potential_inverse_moment(law, m, n0, delta)?;
    let block = BlockCoord::new(0, 0, n0)?;
    let region = Region::centered(Site::origin(), 2 * n0)?;
    let pot = sample_potential(region, law, seed)?;
    let q = potential_qform(&pot, block)?;
    let var = potential_qform_variance(block)?;
    let rows = vec![vec![
        law_name(law),
        n0.to_string(),
        m.to_string(),
        fmt_f64(delta),
        fmt_f64(inv),
        fmt_f64(q),
        fmt_f64(var),
    ]];
    Ok(CommandOutput::table(
        "com potential",
        json!({ "law": law_name(law), "n0": n0, "m": m, "delta": delta }),
        &[
            "law",
            "n0",
            "m",
            "delta",
            "inverse_moment",
            "qform",
            "qform_variance_analytic",
        ],
        rows,
        json!({ "inverse_moment": inv, "qform": q, "qform_variance_analytic": var }),
    ))
}

fn estimate_annealed(a: &AnnealedArgs, file: &FileConfig) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let n = file.require(a.n, "n")?;
    let series = annealed_growth(p, n)?;
    let rows: Vec<Vec<String>> = series
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_f64(r.annealed)])
        .collect();
    Ok(CommandOutput::table(
        "estimate annealed",
        json!({ "p": p, "n": n }),
        &["n", "annealed"],
        rows,
        serde_json::to_value(&series).expect("serializable series"),
    ))
}

fn estimate_quenched(a: &QuenchedArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let n = file.require(a.n, "n")?;
    let samples = file.require(a.samples, "samples")?;
    let conditioning = match file.resolve(a.conditioning.clone(), "conditioning")? {
        Some(text) => parse_conditioning(&text)?,
        None => Conditioning::PositiveZ,
    };
    let series = quenched_growth(p, n, samples, seed, conditioning)?;
    let rows: Vec<Vec<String>> = series
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.annealed),
                fmt_f64(r.quenched_mean.unwrap()),
                fmt_f64(r.quenched_se.unwrap()),
                fmt_f64(r.gap.unwrap()),
                fmt_f64(r.retention.unwrap()),
            ]
        })
        .collect();
    Ok(CommandOutput::table(
        "estimate quenched",
        json!({
            "p": p, "n": n, "samples": samples,
            "conditioning": conditioning.to_string(),
        }),
        &[
            "n",
            "annealed",
            "quenched_mean",
            "quenched_se",
            "gap",
            "retention",
        ],
        rows,
        serde_json::to_value(&series).expect("serializable series"),
    ))
}

fn estimate_fractional(
    a: &FractionalArgs,
    file: &FileConfig,
    seed: u64,
) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let theta = file.require(a.theta, "theta")?;
    let n = file.require(a.n, "n")?;
    let samples = file.require(a.samples, "samples")?;
    let report = fractional_moment(p, theta, n, samples, seed)?;
    let rows = vec![vec![
        fmt_f64(p),
        fmt_f64(theta),
        n.to_string(),
        samples.to_string(),
        fmt_f64(report.estimate.mean),
        fmt_f64(report.estimate.std_error),
        fmt_f64(report.annealed_mean),
        fmt_f64(report.jensen_bound),
        fmt_f64(report.empirical_b),
    ]];
    Ok(CommandOutput::table(
        "estimate fractional",
        json!({ "p": p, "theta": theta, "n": n, "samples": samples }),
        &[
            "p",
            "theta",
            "n",
            "samples",
            "mean",
            "std_error",
            "annealed_mean",
            "jensen_bound",
            "empirical_b",
        ],
        rows,
        serde_json::to_value(&report).expect("serializable report"),
    ))
}

fn estimate_coupling(a: &CouplingArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let p = file.require(a.p, "p")?;
    let p2 = file.require(a.p2, "p2")?;
    let n = file.require(a.n, "n")?;
    let exhaustive = a.exhaustive || file.raw("exhaustive") == Some("true");
    if exhaustive {
        let check = exhaustive_coupling_check(p, p2, n)?;
        let rows = vec![vec![
            fmt_f64(p),
            fmt_f64(p2),
            n.to_string(),
            check.edge_count.to_string(),
            check.configurations.to_string(),
            fmt_f64(check.max_abs_error),
        ]];
        let invariant_failure = (check.max_abs_error > 1e-9).then(|| {
            format!(
                "conditional-mean identity violated by {} on exact integration",
                check.max_abs_error
            )
        });
        let mut out = CommandOutput::table(
            "estimate coupling",
            json!({ "p": p, "p2": p2, "n": n, "exhaustive": true }),
            &[
                "p",
                "p2",
                "n",
                "edge_count",
                "configurations",
                "max_abs_error",
            ],
            rows,
            serde_json::to_value(check).expect("serializable check"),
        );
        out.invariant_failure = invariant_failure;
        return Ok(out);
    }
    let samples = file.require(a.samples, "samples")?;
    let report = coupling_experiment(p, p2, n, samples, seed)?;
    let rows = vec![vec![
        fmt_f64(p),
        fmt_f64(p2),
        n.to_string(),
        samples.to_string(),
        report.monotonicity_violations.to_string(),
        fmt_f64(report.max_abs_z),
    ]];
    let invariant_failure = (report.monotonicity_violations > 0).then(|| {
        format!(
            "{} coupled samples decreased the walk count at the higher density",
            report.monotonicity_violations
        )
    });
    let mut out = CommandOutput::table(
        "estimate coupling",
        json!({ "p": p, "p2": p2, "n": n, "samples": samples, "exhaustive": false }),
        &[
            "p",
            "p2",
            "n",
            "samples",
            "monotonicity_violations",
            "max_abs_z",
        ],
        rows,
        serde_json::to_value(&report).expect("serializable report"),
    );
    out.invariant_failure = invariant_failure;
    Ok(out)
}

fn estimate_beta(a: &BetaArgs, file: &FileConfig, seed: u64) -> CliResult<CommandOutput> {
    let law = match file.resolve(a.law.clone(), "law")? {
        Some(text) => parse_law(&text)?,
        None => DistributionSpec::Gaussian,
    };
    let betas_text = file.require(a.betas.clone(), "betas")?;
    let betas = parse_f64_list(&betas_text).map_err(CliError::Config)?;
    let n = file.require(a.n, "n")?;
    let samples = file.require(a.samples, "samples")?;
    let report = beta_monotonicity(law, &betas, n, samples, seed)?;
    let mut rows = Vec::new();
    for (k, est) in report.estimates.iter().enumerate() {
        let (dm, ds) = if k == 0 {
            (String::new(), String::new())
        } else {
            let d = &report.consecutive_drops[k - 1];
            (fmt_f64(d.mean), fmt_f64(d.std_error))
        };
        rows.push(vec![
            fmt_f64(report.betas[k]),
            fmt_f64(est.mean),
            fmt_f64(est.std_error),
            dm,
            ds,
        ]);
    }
    let invariant_failure = (!report.non_increasing_within_ci)
        .then(|| "square-root moment increased along the beta grid beyond noise".to_string());
    let mut out = CommandOutput::table(
        "estimate beta",
        json!({
            "law": law_name(law), "betas": betas, "n": n, "samples": samples,
        }),
        &[
            "beta",
            "mean",
            "std_error",
            "drop_from_prev_mean",
            "drop_from_prev_se",
        ],
        rows,
        serde_json::to_value(&report).expect("serializable report"),
    );
    out.invariant_failure = invariant_failure;
    Ok(out)
}
