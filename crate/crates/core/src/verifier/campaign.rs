use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{OperatorTuple, PGrid, VerifierError, DEFAULT_MAX_POINTS};
use crate::chain::{
    hypothesis_set, necessity_weight_for, ChainInequality, ChainShape, Direction, Family, ParamSet,
};
use crate::dsl::{evaluate, Environment};
use crate::spectral::{
    loewner_compare, operator_norm, HermitianMatrix, Relation, Scalar, SpectralError,
    TolerancePolicy, Verdict,
};

/// Löwner comparison at the policy tolerance `tol_rel · max(1, ‖P‖, ‖Q‖)`.
pub fn compare<T: Scalar>(
    p: &HermitianMatrix<T>,
    q: &HermitianMatrix<T>,
    policy: &TolerancePolicy,
) -> Result<Verdict, SpectralError> {
    let tol = policy.comparison_tol(&[operator_norm(p)?, operator_norm(q)?]);
    loewner_compare(p, q, tol)
}

/// How the weights `w_1..w_{k-1}` are chosen for each p-vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightPolicy {
    /// The same weights for every `p`. A single value applies to every member.
    Fixed(Vec<f64>),
    /// Every weight equal to the necessity weight `(r - t_n)/(ψ - t_n + r)`.
    Necessity,
    /// Fixed weights drawn once per instance, uniformly from `[lo, hi]`.
    Sampled { lo: f64, hi: f64 },
}

impl fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightPolicy::Fixed(w) => {
                let parts: Vec<String> = w.iter().map(f64::to_string).collect();
                write!(f, "fixed:{}", parts.join(","))
            }
            WeightPolicy::Necessity => f.write_str("necessity"),
            WeightPolicy::Sampled { lo, hi } => write!(f, "sampled:{lo},{hi}"),
        }
    }
}

impl WeightPolicy {
    /// Replaces a sampled policy by the fixed weights it draws.
    pub fn resolve(&self, members: usize, rng: &mut impl Rng) -> WeightPolicy {
        match *self {
            WeightPolicy::Sampled { lo, hi } => {
                WeightPolicy::Fixed((0..members).map(|_| rng.random_range(lo..=hi)).collect())
            }
            ref other => other.clone(),
        }
    }

    fn weights(&self, members: usize, t: &[f64], p: &[f64], r: f64) -> Result<Vec<f64>, VerifierError> {
        match self {
            WeightPolicy::Fixed(w) if w.len() == 1 => Ok(vec![w[0]; members]),
            WeightPolicy::Fixed(w) if w.len() == members => Ok(w.clone()),
            WeightPolicy::Fixed(w) => Err(VerifierError::InvalidArgument(format!(
                "expected 1 or {members} fixed weights, got {}",
                w.len()
            ))),
            WeightPolicy::Necessity => Ok(vec![necessity_weight_for(t, p, r)?; members]),
            WeightPolicy::Sampled { .. } => Err(VerifierError::InvalidArgument(
                "sampled weights must be drawn before a campaign".into(),
            )),
        }
    }
}

/// The p-independent scalars of an instance: `t_1..t_n` and `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTemplate {
    pub t: Vec<f64>,
    pub r: f64,
}

impl ParamTemplate {
    pub fn new(t: Vec<f64>, r: f64) -> Result<Self, VerifierError> {
        let template = Self { t, r };
        template.validate()?;
        Ok(template)
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn validate(&self) -> Result<(), VerifierError> {
        if self.t.is_empty() {
            return Err(VerifierError::InvalidArgument("t must have at least one entry".into()));
        }
        if let Some(bad) = self.t.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(VerifierError::InvalidArgument(format!("t = {bad} is outside [0, 1]")));
        }
        let t_n = self.t[self.n() - 1];
        if !(self.r > t_n) || !self.r.is_finite() {
            return Err(VerifierError::InvalidArgument(format!(
                "r = {} must exceed t_n = {t_n}",
                self.r
            )));
        }
        Ok(())
    }

    /// `t_i ~ U[0.05, 0.95]`, `r = t_n + U(0.1, 2)`.
    pub fn sample(n: usize, rng: &mut impl Rng) -> Self {
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=0.95)).collect();
        let r = t[n - 1] + rng.random_range(0.1..2.0);
        Self { t, r }
    }

    pub fn params(&self, k: usize, p: Vec<f64>, w: Vec<f64>) -> Result<ParamSet, VerifierError> {
        Ok(ParamSet::new(self.n(), k, self.t.clone(), p, self.r, w)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowVerdict {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowVerdict::Pass => "pass",
            RowVerdict::Fail => "fail",
            RowVerdict::Error => "error",
        })
    }
}

/// One hypothesis evaluated at one p-vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance_id: u64,
    pub k: usize,
    pub dim: usize,
    pub family: Family,
    pub member: usize,
    pub p: Vec<f64>,
    pub w: f64,
    pub relation: Option<Relation>,
    /// `λ_min(lhs - rhs)` for `>=` members, `λ_min(rhs - lhs)` for `<=`.
    pub margin: f64,
    /// `max(1, ‖lhs‖, ‖rhs‖)`
    pub scale: f64,
    pub verdict: RowVerdict,
    pub seconds: f64,
    pub error: Option<String>,
}

impl Row {
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Rows of a campaign plus the configuration that reproduces them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub rows: Vec<Row>,
    pub config: serde_json::Value,
}

pub const CSV_COLUMNS: [&str; 11] = [
    "instance_id",
    "k",
    "dim",
    "family",
    "member",
    "p_vector",
    "w",
    "relation",
    "margin",
    "verdict",
    "seconds",
];

impl CampaignReport {
    pub fn count(&self, verdict: RowVerdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == RowVerdict::Pass)
    }

    /// Smallest margin over the evaluated rows.
    pub fn worst_margin(&self) -> Option<f64> {
        self.evaluated().map(|r| r.margin).min_by(f64::total_cmp)
    }

    /// Smallest `margin / scale` over the evaluated rows.
    pub fn worst_relative_margin(&self) -> Option<f64> {
        self.evaluated().map(Row::relative_margin).min_by(f64::total_cmp)
    }

    fn evaluated(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.verdict != RowVerdict::Error)
    }

    pub fn extend(&mut self, other: CampaignReport) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            let p: Vec<String> = r.p.iter().map(f64::to_string).collect();
            w.write_record([
                r.instance_id.to_string(),
                r.k.to_string(),
                r.dim.to_string(),
                r.family.as_str().to_string(),
                r.member.to_string(),
                p.join(";"),
                r.w.to_string(),
                r.relation.map_or("", |x| x.as_str()).to_string(),
                r.margin.to_string(),
                r.verdict.to_string(),
                r.seconds.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Configuration and aggregate counts, for the JSON sidecar.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "rows": self.rows.len(),
            "pass": self.count(RowVerdict::Pass),
            "fail": self.count(RowVerdict::Fail),
            "error": self.count(RowVerdict::Error),
            "worst_margin": self.worst_margin(),
            "worst_relative_margin": self.worst_relative_margin(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOptions {
    pub policy: TolerancePolicy,
    pub max_points: usize,
    /// Seeds the Latin-hypercube subsampling of large grids.
    pub seed: u64,
    /// Stop after the first hypothesis with a failing or erroring row.
    pub short_circuit: bool,
    /// Restricts the campaign to these members; all when `None`.
    pub members: Option<Vec<(Family, usize)>>,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self {
            policy: TolerancePolicy::default(),
            max_points: DEFAULT_MAX_POINTS,
            seed: 0,
            short_circuit: false,
            members: None,
        }
    }
}

/// Evaluates every hypothesis of the tuple's chain at every p-vector of the
/// grid. Evaluation failures become `error` rows.
pub fn check_hypotheses<T: Scalar>(
    instance_id: u64,
    tuple: &OperatorTuple<T>,
    template: &ParamTemplate,
    grid: &PGrid,
    weights: &WeightPolicy,
    options: &CampaignOptions,
) -> Result<CampaignReport, VerifierError> {
    template.validate()?;
    let shape = ChainShape::from_k(tuple.k())?;
    if template.n() != shape.n {
        return Err(VerifierError::InvalidArgument(format!(
            "k = {} needs n = {} exponents t, got {}",
            shape.k,
            shape.n,
            template.n()
        )));
    }
    if let WeightPolicy::Sampled { .. } = weights {
        return Err(VerifierError::InvalidArgument(
            "sampled weights must be drawn before a campaign".into(),
        ));
    }
    let env = Environment::from_tuple(tuple.matrices(), None, options.policy)?;
    let vectors = grid.vectors(2 * shape.n, options.max_points, options.seed ^ instance_id);
    let hypotheses: Vec<ChainInequality> = hypothesis_set(shape)
        .into_iter()
        .filter(|h| match &options.members {
            Some(list) => list.contains(&(h.family, h.member)),
            None => true,
        })
        .collect();
    let mut rows = Vec::with_capacity(hypotheses.len() * vectors.len());
    for h in &hypotheses {
        let chunk: Vec<Row> = vectors
            .par_iter()
            .map(|p| evaluate_row(instance_id, tuple, h, template, p, weights, &env, &options.policy))
            .collect();
        let failed = chunk.iter().any(|r| r.verdict != RowVerdict::Pass);
        rows.extend(chunk);
        if failed && options.short_circuit {
            break;
        }
    }
    Ok(CampaignReport {
        rows,
        config: serde_json::json!({
            "instance_id": instance_id,
            "k": shape.k,
            "dim": tuple.dim(),
            "t": template.t,
            "r": template.r,
            "grid": grid,
            "weights": weights.to_string(),
            "options": options,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_row<T: Scalar>(
    instance_id: u64,
    tuple: &OperatorTuple<T>,
    hypothesis: &ChainInequality,
    template: &ParamTemplate,
    p: &[f64],
    weights: &WeightPolicy,
    env: &Environment<T>,
    policy: &TolerancePolicy,
) -> Row {
    let start = Instant::now();
    let mut row = Row {
        instance_id,
        k: tuple.k(),
        dim: tuple.dim(),
        family: hypothesis.family,
        member: hypothesis.member,
        p: p.to_vec(),
        w: f64::NAN,
        relation: None,
        margin: f64::NAN,
        scale: f64::NAN,
        verdict: RowVerdict::Error,
        seconds: 0.0,
        error: None,
    };
    let outcome = (|| -> Result<(f64, Verdict, f64), VerifierError> {
        let w = weights.weights(hypothesis.shape.members(), &template.t, p, template.r)?;
        let w_m = w[hypothesis.weight_index() - 1];
        let params = template.params(tuple.k(), p.to_vec(), w)?;
        let mut env = env.clone();
        env.bind_params(&params);
        let lhs = evaluate(&hypothesis.lhs, &env)?;
        let rhs = evaluate(&hypothesis.rhs, &env)?;
        let norms = [operator_norm(&lhs)?, operator_norm(&rhs)?];
        let scale = TolerancePolicy::scale(&norms);
        Ok((w_m, loewner_compare(&lhs, &rhs, policy.tol_rel * scale)?, scale))
    })();
    match outcome {
        Ok((w, verdict, scale)) => {
            row.w = w;
            row.relation = Some(verdict.relation);
            row.margin = match hypothesis.direction {
                Direction::Ge => verdict.ge_margin,
                Direction::Le => verdict.le_margin,
            };
            row.scale = scale;
            row.verdict = if row.margin >= -verdict.tol {
                RowVerdict::Pass
            } else {
                RowVerdict::Fail
            };
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// `A_{i+1}` against `A_i` for `i = 1..k-1`.
pub fn check_conclusion<T: Scalar>(
    tuple: &OperatorTuple<T>,
    policy: &TolerancePolicy,
) -> Result<Vec<Verdict>, VerifierError> {
    (1..tuple.k())
        .map(|i| Ok(compare(tuple.get(i + 1), tuple.get(i), policy)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::gen_ordered_tuple;

    fn scalar_tuple(values: &[f64]) -> OperatorTuple {
        let policy = TolerancePolicy::default();
        OperatorTuple::new(
            values.iter().map(|&v| HermitianMatrix::scaled_identity(2, v)).collect(),
            &policy,
        )
        .unwrap()
    }

    fn single(grid: &[f64]) -> PGrid {
        PGrid::from_values(grid.to_vec()).unwrap()
    }

    #[test]
    fn identity_tuple_is_eq() {
        let t = scalar_tuple(&[1.0, 1.0, 1.0]);
        let template = ParamTemplate::new(vec![0.5], 1.5).unwrap();
        let rep = check_hypotheses(
            0,
            &t,
            &template,
            &PGrid::default(),
            &WeightPolicy::Fixed(vec![0.7]),
            &CampaignOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.rows.len(), 2 * 25);
        assert!(rep.all_pass());
        assert!(rep.rows.iter().all(|r| r.relation == Some(Relation::Eq)));
    }

    #[test]
    fn ordered_scalars_necessity() {
        // (I.1) with t1 = 1, r = 2, p = (1, 1): w = 1/2 and the scalar form
        // 3^{r-t1} >= (3^{r/2} 2^{-t1/2} 1 2^{-t1/2} 3^{r/2})^{w} reads 3 >= 4.5^{1/2}.
        let t = scalar_tuple(&[1.0, 2.0, 3.0]);
        let template = ParamTemplate::new(vec![1.0], 2.0).unwrap();
        let rep = check_hypotheses(
            0,
            &t,
            &template,
            &single(&[1.0]),
            &WeightPolicy::Necessity,
            &CampaignOptions::default(),
        )
        .unwrap();
        let first = &rep.rows[0];
        assert_eq!(first.w, 0.5);
        let expected = 3.0 - (9.0f64 * 0.5).sqrt();
        assert!((first.margin - expected).abs() < 1e-12, "{} vs {expected}", first.margin);
        assert_eq!(first.verdict, RowVerdict::Pass);
    }

    #[test]
    fn unordered_scalars_fail() {
        let t = scalar_tuple(&[2.0, 1.0, 3.0]);
        let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
        let rep = check_hypotheses(
            0,
            &t,
            &template,
            &single(&[1.0]),
            &WeightPolicy::Fixed(vec![0.5]),
            &CampaignOptions::default(),
        )
        .unwrap();
        let first = &rep.rows[0];
        let expected = 3f64.sqrt() - 6f64.sqrt();
        assert!((first.margin - expected).abs() < 1e-12);
        assert_eq!(first.verdict, RowVerdict::Fail);
    }

    #[test]
    fn short_circuit_stops_early() {
        let t = scalar_tuple(&[2.0, 1.0, 3.0]);
        let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
        let options = CampaignOptions {
            short_circuit: true,
            ..Default::default()
        };
        let rep = check_hypotheses(0, &t, &template, &single(&[1.0, 2.0]), &WeightPolicy::Fixed(vec![0.5]), &options)
            .unwrap();
        assert_eq!(rep.rows.len(), 4);
    }

    #[test]
    fn bad_weights_become_error_rows() {
        let t = scalar_tuple(&[1.0, 2.0, 3.0]);
        let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
        let rep = check_hypotheses(
            0,
            &t,
            &template,
            &single(&[1.0]),
            &WeightPolicy::Fixed(vec![1.5]),
            &CampaignOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.count(RowVerdict::Error), 2);
        assert!(rep.rows[0].margin.is_nan());
        assert!(rep.worst_margin().is_none());
    }

    #[test]
    fn template_must_match_k() {
        let t = scalar_tuple(&[1.0, 2.0, 3.0, 4.0]);
        let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
        assert!(check_hypotheses(
            0,
            &t,
            &template,
            &PGrid::default(),
            &WeightPolicy::Necessity,
            &CampaignOptions::default()
        )
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let t = scalar_tuple(&[1.0, 2.0, 3.0]);
        let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
        let rep = check_hypotheses(
            7,
            &t,
            &template,
            &single(&[1.0, 2.0]),
            &WeightPolicy::Necessity,
            &CampaignOptions::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&first[..6], &["7", "3", "2", "asc", "1", "1;1"]);
        assert_eq!(first[9], "pass");
        assert_eq!(text.lines().count(), 1 + 2 * 4);
    }

    #[test]
    fn conclusion_on_generated_and_scalar_tuples() {
        let policy = TolerancePolicy::default();
        let ordered = gen_ordered_tuple::<f64>(4, 3, 11, 0.0).unwrap();
        assert!(check_conclusion(&ordered, &policy).unwrap().iter().all(Verdict::is_ge));
        let v = check_conclusion(&scalar_tuple(&[2.0, 1.0]), &policy).unwrap();
        assert!(!v[0].is_ge());
        let v = check_conclusion(&scalar_tuple(&[1.5, 1.5, 1.5]), &policy).unwrap();
        assert!(v.iter().all(|v| v.relation == Relation::Eq));
    }
}
