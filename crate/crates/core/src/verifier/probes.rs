use serde::{Deserialize, Serialize};

use super::{compare, PGrid, VerifierError};
use crate::spectral::{
    positivity_margin, psd_power, spectral_decompose, HermitianMatrix, LogSpectral, Scalar,
    TolerancePolicy, Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeinzRow {
    pub alpha: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeinzReport {
    /// `P` against `Q`.
    pub input: Verdict,
    pub rows: Vec<HeinzRow>,
}

impl HeinzReport {
    /// Every sampled `α ∈ [0, 1]` gave `P^α ≥ Q^α`.
    pub fn holds_on_unit_interval(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| (0.0..=1.0).contains(&r.alpha))
            .all(|r| r.verdict.is_ge())
    }

    /// Exponents at which `P^α ≥ Q^α` failed.
    pub fn failures(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| !r.verdict.is_ge())
            .map(|r| r.alpha)
            .collect()
    }
}

/// Compares `P^α` with `Q^α` for every `α`, after checking `P ≥ Q ≥ 0`.
pub fn probe_loewner_heinz<T: Scalar>(
    p: &HermitianMatrix<T>,
    q: &HermitianMatrix<T>,
    alphas: &[f64],
    policy: &TolerancePolicy,
) -> Result<HeinzReport, VerifierError> {
    if let Some(bad) = alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return Err(VerifierError::InvalidArgument(format!("α = {bad} must be finite and ≥ 0")));
    }
    let input = compare(p, q, policy)?;
    if !input.is_ge() {
        return Err(VerifierError::Precondition(format!(
            "P ≥ Q fails (margin {:e})",
            input.ge_margin
        )));
    }
    let q_min = positivity_margin(q)?;
    let q_norm = spectral_decompose(q)?.spectral_norm();
    if q_min < -policy.eps_pd(q_norm) {
        return Err(VerifierError::Precondition(format!(
            "Q ≥ 0 fails (λ_min = {q_min:e})"
        )));
    }
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let pa = psd_power(p, alpha, policy)?;
            let qa = psd_power(q, alpha, policy)?;
            Ok(HeinzRow {
                alpha,
                verdict: compare(&pa, &qa, policy)?,
            })
        })
        .collect::<Result<Vec<_>, VerifierError>>()?;
    Ok(HeinzReport { input, rows })
}

/// Which side of the identity the probe concludes `Q` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideOfOne {
    /// Hypothesis `P^{r+δ} ≥ (P^{r/2} Q^s P^{r/2})^w`, conclusion `Q ≤ I`.
    Below,
    /// Hypothesis `P^{r+δ} ≤ (P^{r/2} Q^s P^{r/2})^w`, conclusion `Q ≥ I`.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImplicationStatus {
    /// The hypothesis held at every sampled `s` and so does the conclusion.
    Confirmed,
    /// The hypothesis failed at some sampled `s`; nothing to check.
    Vacuous,
    /// The hypothesis held on the escalated grid yet the conclusion fails.
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem12Row {
    pub s: f64,
    pub verdict: Verdict,
    /// Directional margin of the hypothesis.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem12Report {
    pub side: SideOfOne,
    pub rows: Vec<Theorem12Row>,
    pub first_failure: Option<f64>,
    /// `λ_max(Q)` for [`SideOfOne::Below`], `λ_min(Q)` for
    /// [`SideOfOne::Above`].
    pub q_extreme: f64,
    pub conclusion_holds: bool,
    pub status: ImplicationStatus,
}

/// Slack on the eigenvalues of `Q` when judging `Q ≤ I` or `Q ≥ I`.
const SIDE_SLACK: f64 = 1e-6;

/// Evaluates `P^{r+δ}` against `(P^{r/2} Q^s P^{r/2})^w` over the s-grid,
/// widening it geometrically while the hypothesis keeps holding, and checks
/// the implied side of `Q` relative to `I`.
#[allow(clippy::too_many_arguments)]
pub fn probe_theorem_1_2<T: Scalar>(
    p: &HermitianMatrix<T>,
    q: &HermitianMatrix<T>,
    r: f64,
    delta: f64,
    w: f64,
    s_grid: &PGrid,
    side: SideOfOne,
    policy: &TolerancePolicy,
) -> Result<Theorem12Report, VerifierError> {
    if w == 0.0 {
        return Err(VerifierError::InvalidArgument(
            "w = 0 makes the hypothesis independent of Q; probes need w in (0, 1]".into(),
        ));
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(VerifierError::InvalidArgument(format!("w = {w} is outside (0, 1]")));
    }
    if !(r > 0.0) || !(r + delta > 0.0) {
        return Err(VerifierError::InvalidArgument(format!(
            "need r > 0 and r + δ > 0, got r = {r}, δ = {delta}"
        )));
    }
    if let Some(bad) = s_grid.values.iter().find(|s| !(**s > 1.0)) {
        return Err(VerifierError::InvalidArgument(format!("s = {bad} must exceed 1")));
    }
    let lp = LogSpectral::from_hermitian(p, policy)
        .map_err(|e| VerifierError::Precondition(format!("P is not strictly positive: {e}")))?;
    let lq = LogSpectral::from_hermitian(q, policy)
        .map_err(|e| VerifierError::Precondition(format!("Q is not strictly positive: {e}")))?;
    let lhs = lp.powf(r + delta).to_hermitian()?;
    let outer = lp.powf(r / 2.0);

    let row = |s: f64| -> Result<Theorem12Row, VerifierError> {
        let rhs = lq.powf(s).congruence(&outer)?.powf(w).to_hermitian()?;
        let verdict = compare(&lhs, &rhs, policy)?;
        let margin = match side {
            SideOfOne::Below => verdict.ge_margin,
            SideOfOne::Above => verdict.le_margin,
        };
        Ok(Theorem12Row {
            s,
            verdict,
            margin,
            holds: margin >= -verdict.tol,
        })
    };

    let mut rows = s_grid
        .values
        .iter()
        .map(|&s| row(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut grid = s_grid.clone();
    while rows.iter().all(|r| r.holds) {
        match grid.escalate() {
            Some(next) => {
                rows.push(row(next.max())?);
                grid = next;
            }
            None => break,
        }
    }

    let (q_extreme, conclusion_holds) = match side {
        SideOfOne::Below => {
            let m = lq.max_log().exp();
            (m, m <= 1.0 + SIDE_SLACK)
        }
        SideOfOne::Above => {
            let m = lq.min_log().exp();
            (m, m >= 1.0 - SIDE_SLACK)
        }
    };
    let first_failure = rows.iter().find(|r| !r.holds).map(|r| r.s);
    let status = match (first_failure, conclusion_holds) {
        (Some(_), _) => ImplicationStatus::Vacuous,
        (None, true) => ImplicationStatus::Confirmed,
        (None, false) => ImplicationStatus::Violated,
    };
    Ok(Theorem12Report {
        side,
        rows,
        first_failure,
        q_extreme,
        conclusion_holds,
        status,
    })
}
