use std::fmt::Write as _;

use loewner_core::verifier::{
    search_counterexample, CampaignOptions, ParamTemplate, SearchConfig, SearchOutcome,
    TupleSource, DEFAULT_MAX_POINTS,
};
use loewner_core::{ChainShape, TolerancePolicy};
use num_complex::Complex64;

use crate::config::{DimRange, FieldArg, LabConfig, TupleKind, WeightSpec};
use crate::{report, LabError, Outcome, EXIT_OK, EXIT_VIOLATION};

pub fn resolve(cfg: LabConfig) -> Result<LabConfig, LabError> {
    let base = SearchConfig::default();
    let k = match cfg.k.as_deref() {
        None => base.k,
        Some(&[k]) => k,
        Some(_) => return Err(LabError::Config("search takes a single --k".into())),
    };
    let out = LabConfig {
        k: Some(vec![k]),
        dim: Some(cfg.dim.unwrap_or(DimRange {
            lo: base.dims.0,
            hi: base.dims.1,
        })),
        seed: Some(cfg.seed.unwrap_or(base.master_seed)),
        budget: Some(cfg.budget.unwrap_or(base.budget)),
        t: cfg.t,
        r: cfg.r,
        p_grid: Some(cfg.p_grid.unwrap_or(base.grid.values)),
        escalation: Some(cfg.escalation.unwrap_or(base.grid.escalation)),
        grid_cap: Some(cfg.grid_cap.unwrap_or(base.grid.cap)),
        max_points: Some(cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS)),
        tol_rel: Some(cfg.tol_rel.unwrap_or(TolerancePolicy::default().tol_rel)),
        eps_pd_rel: Some(cfg.eps_pd_rel.unwrap_or(TolerancePolicy::default().eps_pd_rel)),
        weights: Some(cfg.weights.unwrap_or(WeightSpec(base.weights))),
        tuples: Some(cfg.tuples.unwrap_or(TupleKind::Random)),
        findings: cfg.findings,
        emit_stats: Some(cfg.emit_stats.unwrap_or(false)),
        jobs: cfg.jobs,
        field: Some(cfg.field.unwrap_or(FieldArg::Real)),
        ..LabConfig::default()
    };
    search_config(&out)?;
    Ok(out)
}

/// The core search configuration described by a resolved lab config.
pub fn search_config(cfg: &LabConfig) -> Result<SearchConfig, LabError> {
    let base = SearchConfig::default();
    let k = cfg.k.as_ref().and_then(|k| k.first().copied()).unwrap_or(base.k);
    let shape = ChainShape::from_k(k)?;
    let template = match (&cfg.t, cfg.r) {
        (Some(t), Some(r)) => Some(ParamTemplate::new(t.clone(), r)?),
        (Some(_), None) => return Err(LabError::Config("--t needs --r".into())),
        (None, _) => None,
    };
    if let Some(t) = &template {
        if t.n() != shape.n {
            return Err(LabError::Config(format!("k = {k} needs {} exponents t, got {}", shape.n, t.n())));
        }
    }
    let dims = cfg.dim.unwrap_or(DimRange {
        lo: base.dims.0,
        hi: base.dims.1,
    });
    Ok(SearchConfig {
        k,
        source: cfg.tuples.map_or(TupleSource::Random, TupleSource::from),
        dims: (dims.lo, dims.hi),
        master_seed: cfg.seed.unwrap_or(base.master_seed),
        grid: cfg.grid()?,
        weights: cfg.weights.clone().map_or(base.weights, |w| w.0),
        budget: cfg.budget.unwrap_or(base.budget),
        template,
        options: CampaignOptions {
            policy: cfg.policy()?,
            max_points: cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS),
            seed: cfg.seed.unwrap_or(base.master_seed),
            ..base.options
        },
    })
}

pub fn run_search(cfg: &LabConfig) -> Result<SearchOutcome, LabError> {
    let config = search_config(cfg)?;
    Ok(match cfg.field.unwrap_or(FieldArg::Real) {
        FieldArg::Real => search_counterexample::<f64>(&config)?,
        FieldArg::Complex => search_counterexample::<Complex64>(&config)?,
    })
}

/// The findings document: the lab config, the findings and, with
/// `--emit-stats`, the statistics.
pub fn findings_json(cfg: &LabConfig, outcome: &SearchOutcome) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "config": cfg,
        "findings": outcome.findings,
    });
    if cfg.emit_stats == Some(true) {
        doc["stats"] = serde_json::to_value(&outcome.stats).expect("stats serialize");
    }
    doc
}

pub fn cmd_search(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let outcome = run_search(cfg)?;
    let doc = findings_json(cfg, &outcome);
    let s = &outcome.stats;
    let mut out = String::new();
    match &cfg.findings {
        Some(path) => report::write_json(path, &doc)?,
        None => writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).unwrap(),
    }
    writeln!(
        out,
        "search: {} instances, {} failed on base grid, {} failed on escalation, {} errored, {} passed and ordered, {} findings",
        s.instances, s.failed_on_base_grid, s.failed_on_escalation, s.errored, s.passed_and_ordered, s.findings
    )
    .unwrap();
    if cfg.emit_stats == Some(true) && cfg.findings.is_some() {
        writeln!(out, "{}", serde_json::to_string_pretty(&outcome.stats).expect("json")).unwrap();
    }
    let code = if outcome.findings.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome::with_code(code, out))
}
