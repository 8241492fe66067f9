//! Experiment executors. Each returns its rows in a fixed order: parameter
//! points in the order given, statistics in a fixed order per point.

use crate::rows::{params_object, ResultRow};
use crate::{
    BucketsArgs, CliError, CommonArgs, MinwiseArgs, MomentsArgs, QuicksortArgs, ScalingArgs,
    VerifyArgs,
};
use kindep::adversary::{derive_bucket_params, derive_mix_params};
use kindep::buckets::{max_load_samples, verify_moment_identity};
use kindep::error::Error;
use kindep::estimators::estimate_minwise;
use kindep::families::{IndexFamilySpec, UnitFamilySpec};
use kindep::quicksort::{estimate_comparisons, PivotSource};
use kindep::stats::{fit_scaling, Estimate, ScalingModel};
use kindep::SeedLineage;
use serde_json::{json, Value};
use std::time::Instant;

fn unit_family(name: &str, n: u64, k: u32) -> Result<UnitFamilySpec, CliError> {
    match name {
        "full-random" => Ok(UnitFamilySpec::FullRandom),
        "poly" => Ok(UnitFamilySpec::Poly { k }),
        "adv-minwise2" => match derive_mix_params(n) {
            Ok(p) => Ok(UnitFamilySpec::MinwiseMix(p)),
            Err(Error::UnsupportedN { n }) => Err(CliError::Config(format!(
                "--family adv-minwise2 requires --n of the form 100*s^2 (got {n})"
            ))),
            Err(e) => Err(e.into()),
        },
        other => Err(CliError::Config(format!(
            "--family {other} is not a unit-valued family (use full-random, poly, or adv-minwise2)"
        ))),
    }
}

fn index_family(name: &str, n: u64, m: Option<u64>, k: u32) -> Result<IndexFamilySpec, CliError> {
    match name {
        "full-random" => Ok(IndexFamilySpec::FullRandom),
        "poly" => Ok(IndexFamilySpec::Poly { k }),
        "adv-bucket" => {
            let m = m.ok_or_else(|| {
                CliError::Config("--family adv-bucket requires --m".to_string())
            })?;
            Ok(IndexFamilySpec::BucketAdversary(derive_bucket_params(
                n, m, k,
            )?))
        }
        other => Err(CliError::Config(format!(
            "--family {other} is not an index family (use full-random, poly, or adv-bucket)"
        ))),
    }
}

fn stamp(rows: &mut [ResultRow], common: &CommonArgs, started: Instant) {
    if common.timing {
        let ms = started.elapsed().as_millis() as u64;
        for r in rows.iter_mut() {
            r.millis = ms;
        }
    }
}

pub fn minwise(args: &MinwiseArgs) -> Result<Vec<ResultRow>, CliError> {
    if args.target > args.n {
        return Err(CliError::Config(format!(
            "--target {} exceeds --n {}",
            args.target, args.n
        )));
    }
    let started = Instant::now();
    let seed = args.common.seed();
    let family = unit_family(&args.family, args.n, args.k)?;
    let params = params_object(&[
        ("family", json!(args.family)),
        ("k", json!(args.k)),
        ("n", json!(args.n)),
        ("target", json!(args.target)),
    ]);
    let lineage = SeedLineage::new(
        seed,
        &format!("minwise/{}/n={}/k={}/target={}", args.family, args.n, args.k, args.target),
    );
    let report = estimate_minwise(args.n, args.target, &family, args.common.trials, lineage)?;
    let tie_est = Estimate::from_indicator(report.ties, args.common.trials, lineage);
    let mut rows = vec![
        ResultRow::from_estimate("minwise", &params, "pr_min", &report.estimate, seed),
        ResultRow::from_estimate("minwise", &params, "tie_rate", &tie_est, seed),
        ResultRow::scalar(
            "minwise",
            &params,
            "full_random_reference",
            1.0 / (args.n as f64 + 1.0),
            args.common.trials,
            seed,
        ),
    ];
    stamp(&mut rows, &args.common, started);
    Ok(rows)
}

pub fn quicksort(args: &QuicksortArgs) -> Result<Vec<ResultRow>, CliError> {
    let started = Instant::now();
    let seed = args.common.seed();
    let source = match args.setting {
        1 => PivotSource::Setting1(index_family(&args.family, args.n, args.m, args.k)?),
        2 => PivotSource::Setting2(unit_family(&args.family, args.n, args.k)?),
        s => {
            return Err(CliError::Config(format!(
                "--setting must be 1 or 2 (got {s})"
            )))
        }
    };
    let params = params_object(&[
        ("family", json!(args.family)),
        ("k", json!(args.k)),
        ("n", json!(args.n)),
        ("setting", json!(args.setting)),
    ]);
    let lineage = SeedLineage::new(
        seed,
        &format!(
            "quicksort/s{}/{}/n={}/k={}",
            args.setting, args.family, args.n, args.k
        ),
    );
    let est = estimate_comparisons(args.n as usize, &source, args.common.trials, lineage)?;
    let mut rows = vec![
        ResultRow::from_estimate("quicksort", &params, "total_comparisons", &est.total_comparisons, seed),
        ResultRow::from_estimate("quicksort", &params, "partition_comparisons", &est.partition_comparisons, seed),
        ResultRow::from_estimate("quicksort", &params, "cleanup_comparisons", &est.cleanup_comparisons, seed),
        ResultRow::from_estimate("quicksort", &params, "max_per_element", &est.max_per_element, seed),
        ResultRow::from_estimate("quicksort", &params, "pivots_skipped", &est.pivots_skipped, seed),
        ResultRow::from_estimate("quicksort", &params, "redraws", &est.mean_redraws, seed),
        ResultRow::scalar(
            "quicksort",
            &params,
            "n_log2_n",
            args.n as f64 * (args.n as f64).log2(),
            args.common.trials,
            seed,
        ),
    ];
    stamp(&mut rows, &args.common, started);
    Ok(rows)
}

pub fn buckets(args: &BucketsArgs) -> Result<Vec<ResultRow>, CliError> {
    let started = Instant::now();
    let seed = args.common.seed();
    let family = index_family(&args.family, args.n, args.m, args.k)?;
    let params = params_object(&[
        ("family", json!(args.family)),
        ("k", json!(args.k)),
        ("m", args.m.map_or(Value::Null, |m| json!(m))),
        ("n", json!(args.n)),
    ]);
    let lineage = SeedLineage::new(
        seed,
        &format!("buckets/{}/n={}/k={}/m={:?}", args.family, args.n, args.k, args.m),
    );
    let trials = args.common.trials;
    let samples = max_load_samples(args.n, args.n, &family, trials, lineage)?;

    let mean_est = Estimate::from_samples(
        &samples.iter().map(|&s| s as f64).collect::<Vec<_>>(),
        lineage,
    );
    let mut rows = vec![ResultRow::from_estimate(
        "buckets", &params, "mean_max_load", &mean_est, seed,
    )];

    if let Some(m) = args.m {
        let threshold = m + u64::from(args.k);
        let hits = samples.iter().filter(|&&s| s >= threshold).count() as u64;
        let emp = Estimate::from_indicator(hits, trials, lineage);
        let bound = args.n as f64 / (m as f64).powi(args.k as i32);
        rows.push(ResultRow::from_estimate(
            "buckets",
            &params,
            &format!("pr_max_ge_{threshold}"),
            &emp,
            seed,
        ));
        rows.push(ResultRow::scalar(
            "buckets", &params, "tail_bound_n_over_mk", bound, trials, seed,
        ));
    }

    if let IndexFamilySpec::BucketAdversary(ref p) = family {
        let threshold = p.half_p_threshold();
        let hits = samples.iter().filter(|&&s| s >= threshold).count() as u64;
        let emp = Estimate::from_indicator(hits, trials, lineage);
        rows.push(ResultRow::from_estimate(
            "buckets",
            &params,
            &format!("pr_max_ge_half_p_{threshold}"),
            &emp,
            seed,
        ));
        rows.push(ResultRow::scalar(
            "buckets",
            &params,
            "prob_scale_n_over_mk",
            p.probability_scale(),
            trials,
            seed,
        ));
    }

    // the max-load distribution itself, one row per observed value
    let max_seen = samples.iter().copied().max().unwrap_or(0);
    let min_seen = samples.iter().copied().min().unwrap_or(0);
    for v in min_seen..=max_seen {
        let hits = samples.iter().filter(|&&s| s == v).count() as u64;
        if hits == 0 {
            continue;
        }
        let est = Estimate::from_indicator(hits, trials, lineage);
        rows.push(ResultRow::from_estimate(
            "buckets",
            &params,
            &format!("max_load_hist_{v}"),
            &est,
            seed,
        ));
    }
    stamp(&mut rows, &args.common, started);
    Ok(rows)
}

pub fn verify_independence(args: &VerifyArgs) -> Result<Vec<ResultRow>, CliError> {
    use kindep::field::{verify_exact_independence, FieldPrime, PolyHashFamily};
    let started = Instant::now();
    let seed = args.common.seed();
    let prime = FieldPrime::new(args.p)
        .map_err(|_| CliError::Config(format!("--p {} is not prime", args.p)))?;
    let family = PolyHashFamily::new(prime, args.k)
        .map_err(|e| CliError::Config(format!("--k: {e}")))?;
    let points: Vec<u64> = args
        .points
        .clone()
        .unwrap_or_else(|| (0..u64::from(args.k)).collect());
    let params = params_object(&[
        ("k", json!(args.k)),
        ("p", json!(args.p)),
        ("points", json!(points)),
    ]);
    let dev = verify_exact_independence(&family, &points)?;
    let enumerated = (args.p as f64).powi(args.k as i32);
    let mut rows = vec![
        ResultRow::scalar(
            "verify-independence",
            &params,
            "max_deviation",
            *dev.numer() as f64 / *dev.denom() as f64,
            enumerated as u64,
            seed,
        ),
        ResultRow::scalar(
            "verify-independence",
            &params,
            "enumerated_draws",
            enumerated,
            enumerated as u64,
            seed,
        ),
    ];
    stamp(&mut rows, &args.common, started);
    Ok(rows)
}

pub fn moments(args: &MomentsArgs) -> Result<Vec<ResultRow>, CliError> {
    let started = Instant::now();
    let seed = args.common.seed();
    if args.family == "adv-bucket" {
        return Err(CliError::Config(
            "moments compares against the k-independent identity; use full-random or poly".into(),
        ));
    }
    let family = index_family(&args.family, args.n, None, args.k)?;
    let params = params_object(&[
        ("family", json!(args.family)),
        ("k", json!(args.k)),
        ("n", json!(args.n)),
    ]);
    let lineage = SeedLineage::new(
        seed,
        &format!("moments/{}/n={}/k={}", args.family, args.n, args.k),
    );
    let id = verify_moment_identity(args.n, args.k, &family, args.common.trials, lineage)?;
    let z = (id.estimate.mean - id.expected) / id.estimate.std_error();
    let mut rows = vec![
        ResultRow::from_estimate("moments", &params, "falling_factorial_moment", &id.estimate, seed),
        ResultRow::scalar("moments", &params, "expected_moment", id.expected, args.common.trials, seed),
        ResultRow::scalar("moments", &params, "z_score", z, args.common.trials, seed),
    ];
    stamp(&mut rows, &args.common, started);
    Ok(rows)
}

pub fn scaling(args: &ScalingArgs) -> Result<Vec<ResultRow>, CliError> {
    if args.n_list.len() < 4 {
        return Err(CliError::Config(
            "--n-list needs at least 4 values spanning 3 doublings".into(),
        ));
    }
    let model = match args.model.as_str() {
        "pow" => ScalingModel::Pow,
        "nlog" => ScalingModel::NLog,
        other => {
            return Err(CliError::Config(format!(
                "--model must be pow or nlog (got {other})"
            )))
        }
    };

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &n in &args.n_list {
        let started = Instant::now();
        let mut point_rows = match args.experiment.as_str() {
            "minwise" => minwise(&MinwiseArgs {
                n,
                k: args.k,
                family: args.family.clone(),
                target: args.target,
                common: args.common.clone(),
            })?,
            "quicksort" => quicksort(&QuicksortArgs {
                setting: args.setting,
                n,
                k: args.k,
                family: args.family.clone(),
                m: args.m,
                common: args.common.clone(),
            })?,
            "buckets" => buckets(&BucketsArgs {
                n,
                k: args.k,
                family: args.family.clone(),
                m: args.m,
                common: args.common.clone(),
            })?,
            other => {
                return Err(CliError::Config(format!(
                    "--experiment {other} cannot be swept (use minwise, quicksort, or buckets)"
                )))
            }
        };
        let primary = match args.experiment.as_str() {
            "minwise" => "pr_min",
            "quicksort" => "total_comparisons",
            _ => "mean_max_load",
        };
        let mean = point_rows
            .iter()
            .find(|r| r.statistic == primary)
            .expect("primary statistic present")
            .mean;
        points.push((n, mean));
        stamp(&mut point_rows, &args.common, started);
        rows.extend(point_rows);
    }

    let seed = args.common.seed();
    let fit = fit_scaling(&points, model)?;
    let fit_params = params_object(&[
        ("experiment", json!(args.experiment)),
        ("family", json!(args.family)),
        ("k", json!(args.k)),
        ("model", json!(args.model)),
        ("n_list", json!(args.n_list)),
    ]);
    let trials = args.common.trials;
    rows.push(ResultRow::scalar(
        "scaling", &fit_params, "fit_amplitude", fit.amplitude, trials, seed,
    ));
    rows.push(ResultRow::scalar(
        "scaling", &fit_params, "fit_exponent", fit.exponent, trials, seed,
    ));
    rows.push(ResultRow::scalar(
        "scaling", &fit_params, "fit_residual", fit.residual, trials, seed,
    ));
    for (n, v) in &fit.normalized {
        rows.push(ResultRow::scalar(
            "scaling",
            &fit_params,
            &format!("normalized_{n}"),
            *v,
            trials,
            seed,
        ));
    }
    Ok(rows)
}
