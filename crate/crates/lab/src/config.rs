use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use loewner_core::verifier::{PGrid, TupleSource, WeightPolicy};
use loewner_core::TolerancePolicy;
use serde::{Deserialize, Serialize};

use crate::LabError;

/// Settings shared by every command. Each field mirrors a flag; the JSON
/// form uses the flag names with `-` replaced by `_`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<DimRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escalation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_pd_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuples: Option<TupleKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub findings: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub golden: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emit_stats: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldArg>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        LabConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl LabConfig {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(self, top: LabConfig) -> LabConfig {
        let base = self;
        overlay!(base, top;
            mode, k, dim, seed, instances, budget, t, p, r, p_grid, s_grid, escalation,
            grid_cap, max_points, tol_rel, eps_pd_rel, weights, family, member, source,
            tuples, tuple, gap, report, findings, golden, emit_stats, jobs, field,
        )
    }

    pub fn policy(&self) -> Result<TolerancePolicy, LabError> {
        let mut policy = TolerancePolicy::default();
        if let Some(tol) = self.tol_rel {
            policy.tol_rel = positive("tol-rel", tol)?;
        }
        if let Some(eps) = self.eps_pd_rel {
            policy.eps_pd_rel = positive("eps-pd-rel", eps)?;
        }
        Ok(policy)
    }

    pub fn grid(&self) -> Result<PGrid, LabError> {
        let base = PGrid::default();
        let values = self.p_grid.clone().unwrap_or(base.values);
        Ok(PGrid::new(
            values,
            self.escalation.unwrap_or(base.escalation),
            self.grid_cap.unwrap_or(base.cap),
        )?)
    }

    pub fn s_grid(&self) -> Result<PGrid, LabError> {
        let base = PGrid::default();
        let values = self.s_grid.clone().unwrap_or(base.values);
        Ok(PGrid::new(
            values,
            self.escalation.unwrap_or(base.escalation),
            self.grid_cap.unwrap_or(base.cap),
        )?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn positive(flag: &str, x: f64) -> Result<f64, LabError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(LabError::Config(format!("--{flag} must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Necessity,
    Contrapositive,
    ProofSteps,
    Limit,
    /// Löwner–Heinz and single-operator probes.
    Probes,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Necessity => "necessity",
            Mode::Contrapositive => "contrapositive",
            Mode::ProofSteps => "proof-steps",
            Mode::Limit => "limit",
            Mode::Probes => "probes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Asc,
    Desc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

/// Tuples for `check --mode contrapositive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// The scalar tuple `(2I, I, 3I)`.
    Fixture,
    /// Generated tuples with at least one adjacent pair out of order.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TupleKind {
    Random,
    Ordered,
}

impl From<TupleKind> for TupleSource {
    fn from(kind: TupleKind) -> Self {
        match kind {
            TupleKind::Random => TupleSource::Random,
            TupleKind::Ordered => TupleSource::Ordered,
        }
    }
}

/// Inclusive dimension range written `N` or `LO-HI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl DimRange {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    /// Cycles through the range.
    pub fn nth(&self, i: usize) -> usize {
        self.lo + i % self.len()
    }
}

impl FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad dimension `{x}`"))
        };
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        };
        if lo == 0 || lo > hi {
            return Err(format!("bad dimension range `{s}`"));
        }
        Ok(Self { lo, hi })
    }
}

impl TryFrom<String> for DimRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<DimRange> for String {
    fn from(d: DimRange) -> String {
        d.to_string()
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

/// `fixed:<csv>`, `necessity` or `sampled:<lo>,<hi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WeightSpec(pub WeightPolicy);

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "necessity" {
            return Ok(Self(WeightPolicy::Necessity));
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let w = parse_f64_list(rest)?;
            if let Some(bad) = w.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                return Err(format!("weight {bad} is outside [0, 1]"));
            }
            return Ok(Self(WeightPolicy::Fixed(w)));
        }
        if let Some(rest) = s.strip_prefix("sampled:") {
            match parse_f64_list(rest)?.as_slice() {
                &[lo, hi] if 0.0 <= lo && lo <= hi && hi <= 1.0 => {
                    return Ok(Self(WeightPolicy::Sampled { lo, hi }))
                }
                _ => return Err(format!("bad sampled range `{rest}`")),
            }
        }
        Err(format!(
            "unknown weight policy `{s}`; expected fixed:<csv>, necessity or sampled:<lo>,<hi>"
        ))
    }
}

impl TryFrom<String> for WeightSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<WeightSpec> for String {
    fn from(w: WeightSpec) -> String {
        w.0.to_string()
    }
}

/// A comma-separated flag value such as `0.5,1,2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv<T>(pub Vec<T>);

impl FromStr for Csv<f64> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_f64_list(s).map(Csv)
    }
}

impl FromStr for Csv<usize> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_usize_list(s).map(Csv)
    }
}

/// Comma-separated finite floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|x| {
            let x = x.trim();
            match x.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("`{x}` is not a finite number")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(values)
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<usize>()
                .map_err(|_| format!("`{x}` is not a non-negative integer"))
        })
        .collect()
}
