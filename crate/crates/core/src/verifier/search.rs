use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tuple::TupleFile;
use super::{
    check_conclusion, check_hypotheses, gen_ordered_tuple, gen_random_tuple, instance_seed, CampaignOptions,
    CampaignReport, PGrid, ParamTemplate, RowVerdict, VerifierError, WeightPolicy,
};
use crate::chain::ChainShape;
use crate::spectral::{Scalar, Verdict};

/// Where search tuples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleSource {
    /// Independent strictly positive members.
    Random,
    /// Ordered chains; never a counterexample.
    Ordered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k: usize,
    pub source: TupleSource,
    /// Inclusive range of dimensions.
    pub dims: (usize, usize),
    pub master_seed: u64,
    pub grid: PGrid,
    pub weights: WeightPolicy,
    pub budget: usize,
    /// Shared `t` and `r`; sampled per instance when `None`.
    pub template: Option<ParamTemplate>,
    pub options: CampaignOptions,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k: 3,
            source: TupleSource::Random,
            dims: (2, 6),
            master_seed: 0,
            grid: PGrid::default(),
            weights: WeightPolicy::Sampled { lo: 0.05, hi: 1.0 },
            budget: 200,
            template: None,
            options: CampaignOptions {
                short_circuit: true,
                ..CampaignOptions::default()
            },
        }
    }
}

/// A tuple whose hypotheses held on the escalated grid while the conclusion
/// failed, with everything needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub instance_id: u64,
    pub seed: u64,
    pub dim: usize,
    pub template: ParamTemplate,
    pub weights: WeightPolicy,
    pub tuple: TupleFile,
    pub conclusion: Vec<Verdict>,
    pub worst_hypothesis_margin: Option<f64>,
}

/// Deterministic summary of a search; contains no timings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub instances: usize,
    /// Some hypothesis failed on the base grid.
    pub failed_on_base_grid: usize,
    /// Passed the base grid, failed once widened.
    pub failed_on_escalation: usize,
    /// Evaluation errors before any failure.
    pub errored: usize,
    /// Passed every hypothesis and the tuple is ordered.
    pub passed_and_ordered: usize,
    pub findings: usize,
    /// First failing member (`asc1`, `desc2`, ...) and how often.
    pub first_failure: BTreeMap<String, usize>,
    /// Relative margins of the first failing rows: min, median, max.
    pub failure_margin_quantiles: Option<[f64; 3]>,
    /// Counts of first-failure relative margins by decade of magnitude,
    /// keyed `1e{k}` for margins in `-[10^k, 10^{k+1})`.
    pub failure_margin_histogram: BTreeMap<String, usize>,
}

fn decade(margin: f64) -> String {
    let m = margin.abs();
    if m == 0.0 || !m.is_finite() {
        return if m == 0.0 { "0".into() } else { "inf".into() };
    }
    format!("1e{}", m.log10().floor() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    pub findings: Vec<Finding>,
    pub stats: SearchStats,
}

enum Fate {
    Base(String, f64),
    Escalated(String, f64),
    Errored,
    Ordered,
    Found(Box<Finding>),
}

fn first_failure(report: &CampaignReport) -> Option<(String, f64, bool)> {
    report.rows.iter().find(|r| r.verdict != RowVerdict::Pass).map(|r| {
        (
            format!("{}{}", r.family.as_str(), r.member),
            r.relative_margin(),
            r.verdict == RowVerdict::Error,
        )
    })
}

fn run_instance<T: Scalar>(config: &SearchConfig, index: u64) -> Result<Fate, VerifierError> {
    let shape = ChainShape::from_k(config.k)?;
    let seed = instance_seed(config.master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(config.dims.0..=config.dims.1);
    let template = match &config.template {
        Some(t) => t.clone(),
        None => ParamTemplate::sample(shape.n, &mut rng),
    };
    let weights = config.weights.resolve(shape.members(), &mut rng);
    let tuple_seed = rng.random();
    let tuple = match config.source {
        TupleSource::Random => gen_random_tuple::<T>(config.k, dim, tuple_seed)?,
        TupleSource::Ordered => gen_ordered_tuple::<T>(config.k, dim, tuple_seed, 0.0)?,
    };

    let mut options = config.options.clone();
    options.short_circuit = true;
    for (stage, grid) in [(0, config.grid.clone()), (1, config.grid.escalated())] {
        let report = check_hypotheses(index, &tuple, &template, &grid, &weights, &options)?;
        if let Some((member, margin, errored)) = first_failure(&report) {
            return Ok(if errored {
                Fate::Errored
            } else if stage == 0 {
                Fate::Base(member, margin)
            } else {
                Fate::Escalated(member, margin)
            });
        }
        if grid.escalate().is_none() {
            break;
        }
    }
    let conclusion = check_conclusion(&tuple, &options.policy)?;
    if conclusion.iter().all(Verdict::is_ge) {
        return Ok(Fate::Ordered);
    }
    let report = check_hypotheses(index, &tuple, &template, &config.grid.escalated(), &weights, &options)?;
    Ok(Fate::Found(Box::new(Finding {
        instance_id: index,
        seed,
        dim,
        template,
        weights,
        tuple: tuple.to_file(),
        conclusion,
        worst_hypothesis_margin: report.worst_margin(),
    })))
}

/// Random strictly positive tuples, each checked against every hypothesis on
/// the base grid, then on the escalated grid, then against the conclusion.
/// Instances run in parallel; the outcome depends only on the configuration.
pub fn search_counterexample<T: Scalar>(config: &SearchConfig) -> Result<SearchOutcome, VerifierError> {
    if config.dims.0 < 1 || config.dims.0 > config.dims.1 {
        return Err(VerifierError::InvalidArgument(format!(
            "bad dimension range {}..={}",
            config.dims.0, config.dims.1
        )));
    }
    ChainShape::from_k(config.k)?;
    let fates = (0..config.budget as u64)
        .into_par_iter()
        .map(|i| run_instance::<T>(config, i))
        .collect::<Result<Vec<_>, _>>()?;

    let mut stats = SearchStats {
        instances: fates.len(),
        ..SearchStats::default()
    };
    let mut findings = Vec::new();
    let mut margins = Vec::new();
    for fate in fates {
        match &fate {
            Fate::Base(member, margin) | Fate::Escalated(member, margin) => {
                *stats.first_failure.entry(member.clone()).or_default() += 1;
                *stats.failure_margin_histogram.entry(decade(*margin)).or_default() += 1;
                margins.push(*margin);
            }
            _ => {}
        }
        match fate {
            Fate::Base(..) => stats.failed_on_base_grid += 1,
            Fate::Escalated(..) => stats.failed_on_escalation += 1,
            Fate::Errored => stats.errored += 1,
            Fate::Ordered => stats.passed_and_ordered += 1,
            Fate::Found(f) => findings.push(*f),
        }
    }
    stats.findings = findings.len();
    if !margins.is_empty() {
        margins.sort_by(f64::total_cmp);
        stats.failure_margin_quantiles =
            Some([margins[0], margins[margins.len() / 2], margins[margins.len() - 1]]);
    }
    Ok(SearchOutcome {
        config: config.clone(),
        findings,
        stats,
    })
}
