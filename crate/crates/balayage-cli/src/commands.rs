//! The subcommands: each turns a configuration into a deterministic CSV
//! or JSON document.

use balayage::cleaning_ops::{IDENTITY_NAMES, INEQUALITY_NAMES};
use balayage::cloud_algebra::CLOUD_IDENTITY_NAMES;
use balayage::examples_gallery::{self, Params};
use balayage::random::{
    block_radius, random_cleanable_subset, sample_cloud_identity, sample_identity_check, sample_inequality_check,
};
use balayage::{
    balayage, block_repeat, check_fh, classify, converse_battery, is_subinvariant, round_robin, run_schedule, verify_cloud_identity,
    verify_identity, verify_inequality, ConverseOptions, Dyadic, Instance, Profile, Schedule, SiteSet,
    WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::failure::Failure;

/// Default schedule length for `clean`.
const DEFAULT_CLEAN_STEPS: usize = 100;
/// Default series length for `battery`.
const DEFAULT_SERIES_TERMS: usize = 200;

/// Wraps a JSON result with the configuration, its digest and the seed.
pub fn wrap_json(config: &ExperimentConfig, result: Value) -> String {
    let doc = json!({
        "config_digest": config.digest(),
        "seed": config.seed,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Loads the instance named by the configuration and applies `--lambda`.
fn load_instance(config: &ExperimentConfig) -> Result<Instance, Failure> {
    let mut inst = match (&config.instance, &config.gallery) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::contract(format!("cannot read {}: {e}", path.display())))?;
            Instance::from_json(&text)?
        }
        (None, Some(name)) => examples_gallery::build(name, Params::parse(&config.params)?)?.instance,
        (None, None) => return Err(Failure::contract("give either --instance or --gallery")),
        (Some(_), Some(_)) => return Err(Failure::contract("give only one of --instance and --gallery")),
    };
    if config.instance.is_some() && !config.params.is_empty() {
        return Err(Failure::contract("--param only applies to --gallery instances"));
    }
    if let Some(names) = &config.lambda {
        inst.lambda = Some(SiteSet::from_names(inst.space(), names)?);
    }
    Ok(inst)
}

/// Parses `round_robin[:eps]`, `full[:eps]` or `profiles`.
fn parse_schedule(spec: &str, inst: &Instance, lambda: &SiteSet) -> Result<Schedule, Failure> {
    let (kind, eps) = match spec.split_once(':') {
        Some((k, e)) => {
            let eps: f64 =
                e.parse().map_err(|_| Failure::contract(format!("schedule strength `{e}` is not a number")))?;
            (k, eps)
        }
        None => (spec, 1.0),
    };
    Ok(match kind {
        "round_robin" => round_robin(lambda, eps)?,
        "full" => {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Failure::contract("sweep strength must lie in (0, 1]"));
            }
            block_repeat(lambda, vec![Profile::scaled_indicator(lambda, eps)], None)?
        }
        "profiles" if spec == "profiles" => {
            if inst.profiles.is_empty() {
                return Err(Failure::contract("the instance has no profiles"));
            }
            Schedule::cyclic(lambda, inst.profiles.clone())?
        }
        _ => {
            return Err(Failure::contract(format!(
                "unknown schedule `{spec}` (expected round_robin[:eps], full[:eps] or profiles)"
            )))
        }
    })
}

/// Runs a cleaning schedule and emits its convergence trace as CSV.
///
/// When the balayage cannot be certified the trace is still emitted,
/// without the deviation column, and a comment line says why.
pub fn cmd_clean(config: &ExperimentConfig) -> Result<String, Failure> {
    let inst = load_instance(config)?;
    let lambda = inst.require_lambda("clean")?;
    let c = inst.require_c("clean")?;
    let w = inst.weight_or_ones();
    let schedule = parse_schedule(&config.schedule, &inst, lambda)?;
    let steps = config.steps.unwrap_or(DEFAULT_CLEAN_STEPS);
    let mut header = vec![format!("config_digest={}", config.digest()), format!("seed={}", config.seed)];
    let pi = match balayage(&inst.kernel, lambda, &w, config.tol, config.max_terms) {
        Ok(b) => {
            header.push(format!("balayage_tail_bound={:e}", b.tail_bound));
            Some(b)
        }
        Err(e) if e.is_non_convergence() => {
            header.push(format!("balayage not certified, deviation omitted: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let trace = run_schedule(c, &schedule, &inst.kernel, &w, steps, pi.as_ref())?;
    Ok(trace.to_csv(&header))
}

/// Computes the truncated balayage `Π_Λ^(n)` with its tail bound.
pub fn cmd_balayage(config: &ExperimentConfig) -> Result<String, Failure> {
    let inst = load_instance(config)?;
    let lambda = inst.require_lambda("balayage")?;
    let w = inst.weight_or_ones();
    let b = balayage(&inst.kernel, lambda, &w, config.tol, config.max_terms)?;
    let space = inst.space();
    let entries: Vec<(String, String, f64)> =
        b.matrix.entries().map(|(i, j, v)| (space.name(i).to_string(), space.name(j).to_string(), v)).collect();
    let result = json!({
        "lambda": lambda.names(),
        "sites": space.sites(),
        "entries": entries,
        "terms_used": b.terms_used,
        "tail_bound": b.tail_bound,
        "certificate": format!("{:?}", b.certificate),
    });
    Ok(wrap_json(config, result))
}

/// Which verifier families a selection string picks.
fn selected<'a>(selection: &str, names: &[&'a str]) -> Vec<&'a str> {
    if selection == "all" {
        return names.to_vec();
    }
    let wanted: Vec<&str> = selection.split(',').map(str::trim).collect();
    names.iter().copied().filter(|n| wanted.contains(n)).collect()
}

/// Runs the verifier suites on random inputs over the instance's kernel.
///
/// `Λ` is the instance region when it makes `I_Λ α I_Λ` a contraction,
/// otherwise a seeded random region that does.  The weight for the
/// inequalities is the instance's when it is subinvariant, else an FH
/// witness.
pub fn cmd_verify(config: &ExperimentConfig) -> Result<String, Failure> {
    let inst = load_instance(config)?;
    let alpha = &inst.kernel;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ids = selected(&config.name, &IDENTITY_NAMES);
    let ineqs = selected(&config.name, &INEQUALITY_NAMES);
    let clouds = selected(&config.name, &CLOUD_IDENTITY_NAMES);
    if ids.is_empty() && ineqs.is_empty() && clouds.is_empty() {
        return Err(Failure::contract(format!("no verifier is named `{}`", config.name)));
    }
    let lambda = match &inst.lambda {
        Some(l) if l.is_empty() || block_radius(alpha, l)? < 1.0 - 1e-6 => l.clone(),
        _ => random_cleanable_subset(&mut rng, alpha)?,
    };
    let w: Option<WeightVector> = match &inst.w {
        Some(w) if is_subinvariant(alpha, w, 1e-12)? => Some(w.clone()),
        _ if !ineqs.is_empty() => check_fh(alpha)?.witness,
        _ => None,
    };
    let mut identities = Vec::new();
    let mut inequalities = Vec::new();
    let mut cloud_reports = Vec::new();
    for _ in 0..config.samples {
        for name in &ids {
            let check = sample_identity_check(&mut rng, alpha, &lambda, name)?;
            identities.push(to_value(&verify_identity(alpha, &check)?));
        }
        for name in &ineqs {
            let check = sample_inequality_check(&mut rng, alpha, &lambda, name)?;
            if check.needs_subinvariant_weight() && w.is_none() {
                return Err(Failure::contract(format!(
                    "`{name}` needs a subinvariant weight and the kernel has none"
                )));
            }
            inequalities.push(to_value(&verify_inequality(alpha, w.as_ref(), &check)?));
        }
        for name in &clouds {
            let check = sample_cloud_identity::<Dyadic, _>(&mut rng, inst.space(), name)?;
            cloud_reports.push(to_value(&verify_cloud_identity(&check, config.level_cap)?));
        }
    }
    let all_pass = [&identities, &inequalities, &cloud_reports]
        .iter()
        .flat_map(|v| v.iter())
        .all(|r| r["pass"] == Value::Bool(true));
    let result = json!({
        "lambda": lambda.names(),
        "identities": identities,
        "inequalities": inequalities,
        "cloud_identities": cloud_reports,
        "all_pass": all_pass,
    });
    Ok(wrap_json(config, result))
}

/// Classifies the instance's cloud, relative to `Λ` when one is given.
pub fn cmd_classify(config: &ExperimentConfig) -> Result<String, Failure> {
    let inst = load_instance(config)?;
    let cloud = inst.cloud.as_ref().ok_or_else(|| Failure::contract("the instance has no cloud"))?;
    let report = classify(cloud, inst.lambda.as_ref())?;
    Ok(wrap_json(config, to_value(&report)))
}

/// Evaluates the seven converse conditions on the instance.
pub fn cmd_battery(config: &ExperimentConfig) -> Result<String, Failure> {
    let inst = load_instance(config)?;
    let lambda = inst.require_lambda("battery")?;
    let c = inst.require_c("battery")?;
    let w = inst.weight_or_ones();
    let opts = ConverseOptions {
        series_terms: config.steps.unwrap_or(DEFAULT_SERIES_TERMS),
        seed: config.seed,
        ..ConverseOptions::default()
    };
    let report = converse_battery(&inst.kernel, lambda, c, &w, &opts)?;
    Ok(wrap_json(config, to_value(&report)))
}

/// Lists the gallery families.
pub fn cmd_examples_list(config: &ExperimentConfig) -> Result<String, Failure> {
    Ok(wrap_json(config, to_value(&examples_gallery::list())))
}

/// Builds one gallery instance as an instance document; the digest and
/// seed go into its `notes`.
pub fn cmd_examples_build(config: &ExperimentConfig) -> Result<String, Failure> {
    let name = config.gallery.as_deref().ok_or_else(|| Failure::contract("no family named"))?;
    let g = examples_gallery::build(name, Params::parse(&config.params)?)?;
    let mut doc = g.to_doc()?;
    doc.notes = Some(format!(
        "config_digest={} seed={}; {}",
        config.digest(),
        config.seed,
        doc.notes.unwrap_or_default()
    ));
    let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
    s.push('\n');
    Ok(s)
}
