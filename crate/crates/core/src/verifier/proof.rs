use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compare, CampaignOptions, OperatorTuple, PGrid, ParamTemplate, VerifierError};
use crate::chain::{ascending_index, build_chain, layer_exponent, ChainShape, Family, ParamSet};
use crate::dsl::{evaluate, Environment};
use crate::spectral::{
    operator_norm, HermitianMatrix, LogSpectral, Scalar, TolerancePolicy,
};

/// The sub-checks of one p-sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofRow {
    pub p: Vec<f64>,
    /// Directional margin of the first ascending hypothesis.
    pub premise_margin: f64,
    pub premise_holds: bool,
    /// `λ_min(I - W)`, `W` the core of the first ascending hypothesis.
    pub a_margin: f64,
    /// `λ_min(B - X)` for `X = A_2^{-t_1/2} A_1^{p_1} A_2^{-t_1/2}` and the
    /// operator bound `B`.
    pub b_margin: f64,
    /// `c - λ_max(X)` for the scalar bound `c`.
    pub c_margin: f64,
    /// `λ_min(c I - B)`: the scalar bound dominates the operator bound.
    pub bc_margin: f64,
    /// Scalar bound `c`, already raised to `1/p_2`.
    pub c_bound: f64,
    pub scale: f64,
    /// Premise held but a sub-check failed.
    pub red_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub w: f64,
    pub rows: Vec<ProofRow>,
}

impl ProofReport {
    pub fn premise_failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.premise_holds).count()
    }

    pub fn red_flags(&self) -> usize {
        self.rows.iter().filter(|r| r.red_flag).count()
    }

    /// Smallest of the three sub-check margins relative to scale, over rows
    /// whose premise held.
    pub fn worst_relative_margin(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.premise_holds)
            .map(|r| r.a_margin.min(r.b_margin).min(r.c_margin) / r.scale)
            .min_by(f64::total_cmp)
    }
}

fn layer_power(params: &ParamSet, j: usize) -> Result<(usize, f64), VerifierError> {
    let shape = params.shape();
    let index = ascending_index(1, j, shape)?;
    let e = layer_exponent(j, shape)?
        .eval(|n| params.lookup(n))
        .map_err(|n| VerifierError::InvalidArgument(format!("unbound {n}")))?;
    Ok((index, e))
}

/// Operator bound `B` on `X`: `U_{2n-1} = I`,
/// `U_{j-1} = A_{j+1}^{-e_j} U_j^{1/p_{j+1}} A_{j+1}^{-e_j}` down to `j = 2`,
/// then `B = U_1^{1/p_2}`.
fn operator_bound<T: Scalar>(
    logs: &[LogSpectral<T>],
    params: &ParamSet,
) -> Result<LogSpectral<T>, VerifierError> {
    let shape = params.shape();
    let mut u = LogSpectral::identity(logs[0].dim());
    for j in (2..=shape.layers()).rev() {
        let (index, e) = layer_power(params, j)?;
        u = u
            .powf(1.0 / params.p[j])
            .congruence(&logs[index - 1].powf(-e))?;
    }
    Ok(u.powf(1.0 / params.p[1]))
}

/// Scalar bound before the final `1/p_2` power: `c_{2n-1} = 1`,
/// `c_{j-1} = c_j^{1/p_{j+1}} · max spec(A_{j+1}^{-2e_j})`, which is
/// `‖A_{j+1}‖^{t}` on odd layers and `δ_{j+1}^{t}` on even ones.
fn interior_scalar_bound<T: Scalar>(
    tuple: &OperatorTuple<T>,
    params: &ParamSet,
) -> Result<f64, VerifierError> {
    let shape = params.shape();
    let mut c = 1.0f64;
    for j in (2..=shape.layers()).rev() {
        let (index, e) = layer_power(params, j)?;
        let power = -2.0 * e;
        let factor = if power >= 0.0 {
            tuple.norm(index).powf(power)
        } else {
            tuple.lambda_min(index).powf(power)
        };
        c = c.powf(1.0 / params.p[j]) * factor;
    }
    Ok(c)
}

fn inner_left_word<T: Scalar>(logs: &[LogSpectral<T>], t1: f64, p1: f64) -> Result<LogSpectral<T>, VerifierError> {
    Ok(logs[0].powf(p1).congruence(&logs[1].powf(-t1 / 2.0))?)
}

fn log_forms<T: Scalar>(
    tuple: &OperatorTuple<T>,
    policy: &TolerancePolicy,
) -> Result<Vec<LogSpectral<T>>, VerifierError> {
    tuple
        .matrices()
        .iter()
        .map(|m| Ok(LogSpectral::from_hermitian(m, policy)?))
        .collect()
}

/// Checks, at every p-vector of the grid, the first ascending hypothesis
/// under the fixed weight `w` and the three consequences drawn from it: the
/// core `W ≤ I`, `X ≤ B` for the nested operator bound `B`, and
/// `X ≤ c I` for the scalar bound `c`.
pub fn replicate_proof_steps<T: Scalar>(
    tuple: &OperatorTuple<T>,
    template: &ParamTemplate,
    w: f64,
    grid: &PGrid,
    options: &CampaignOptions,
) -> Result<ProofReport, VerifierError> {
    let shape = ChainShape::from_k(tuple.k())?;
    if template.n() != shape.n {
        return Err(VerifierError::InvalidArgument(format!(
            "k = {} needs n = {} exponents t, got {}",
            shape.k,
            shape.n,
            template.n()
        )));
    }
    let policy = options.policy;
    let first = build_chain(Family::Ascending, 1, shape)?;
    let base = Environment::from_tuple(tuple.matrices(), None, policy)?;
    let logs = log_forms(tuple, &policy)?;
    let identity = HermitianMatrix::<T>::identity(tuple.dim());
    let vectors = grid.vectors(2 * shape.n, options.max_points, options.seed);

    let rows = vectors
        .par_iter()
        .map(|p| -> Result<ProofRow, VerifierError> {
            let params = template.params(shape.k, p.clone(), vec![w; shape.members()])?;
            let mut env = base.clone();
            env.bind_params(&params);

            let lhs = evaluate(&first.lhs, &env)?;
            let rhs = evaluate(&first.rhs, &env)?;
            let premise = compare(&lhs, &rhs, &policy)?;
            let premise_holds = premise.ge_margin >= -premise.tol;

            let core = evaluate(first.core(), &env)?;
            let a = compare(&core, &identity, &policy)?;

            let x = inner_left_word(&logs, params.t[0], params.p[0])?.to_hermitian()?;
            let bound = operator_bound(&logs, &params)?.to_hermitian()?;
            let b = compare(&x, &bound, &policy)?;

            let c = interior_scalar_bound(tuple, &params)?.powf(1.0 / params.p[1]);
            let x_max = operator_norm(&x)?;
            let c_margin = c - x_max;
            let bc = compare(&bound, &HermitianMatrix::scaled_identity(tuple.dim(), c), &policy)?;

            let scale = TolerancePolicy::scale(&[operator_norm(&core)?, x_max, operator_norm(&bound)?, c]);
            let tol = policy.tol_rel * scale;
            let red_flag =
                premise_holds && (a.le_margin < -tol || b.le_margin < -tol || c_margin < -tol);
            Ok(ProofRow {
                p: p.clone(),
                premise_margin: premise.ge_margin,
                premise_holds,
                a_margin: a.le_margin,
                b_margin: b.le_margin,
                c_margin,
                bc_margin: bc.le_margin,
                c_bound: c,
                scale,
                red_flag,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofReport { w, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// Factor applied to the tuple so that its largest norm is 1.
    pub normalization: f64,
    /// Bound before the `1/p_2` power, computed with `t_1 = p_1 = 1`.
    pub c: f64,
    /// `(p_2, c^{1/p_2})` on the reported sequence.
    pub sequence: Vec<(f64, f64)>,
    /// Further `(p_2, c^{1/p_2})` pairs used to reach `1 + 1e-6`.
    pub escalation: Vec<(f64, f64)>,
    /// `|c^{1/p_2} - 1|` never increases along the samples.
    pub monotone: bool,
    pub infimum: f64,
    /// `λ_max(A_2^{-1/2} A_1 A_2^{-1/2})`
    pub lambda_max: f64,
    /// `λ_max` stayed below `c^{1/p_2}` at every sample.
    pub bound_respected: bool,
    /// `A_2 ≥ A_1` inferred from the samples.
    pub declared_ge: bool,
}

/// Sampled `p_2` values of the limit probe.
pub const LIMIT_SEQUENCE: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
const LIMIT_TARGET: f64 = 1e-6;
const LIMIT_CAP: f64 = 1e15;

/// Lets `p_2 → ∞` in the scalar bound with `t_1 = p_1 = 1`: the bound
/// `c^{1/p_2}` on `A_2^{-1/2} A_1 A_2^{-1/2}` tends to 1, giving `A_1 ≤ A_2`.
/// `p_rest` holds `p_3..p_{2n}`; the remaining exponents come from `template`.
/// The tuple is first scaled to largest norm 1, where the bound applies; the
/// inferred order is unaffected by scaling.
pub fn limit_probe<T: Scalar>(
    tuple: &OperatorTuple<T>,
    template: &ParamTemplate,
    p_rest: &[f64],
    policy: &TolerancePolicy,
) -> Result<LimitReport, VerifierError> {
    let shape = ChainShape::from_k(tuple.k())?;
    let top = (1..=tuple.k()).map(|i| tuple.norm(i)).fold(0.0, f64::max);
    let tuple = &tuple.scaled(1.0 / top);
    let mut t = template.t.clone();
    t[0] = 1.0;
    let mut p = vec![1.0, 1.0];
    p.extend_from_slice(p_rest);
    let params = ParamSet::new(shape.n, shape.k, t, p, template.r.max(1.0 + 1e-9), vec![1.0; shape.members()])?;
    let logs = log_forms(tuple, policy)?;
    let c = interior_scalar_bound(tuple, &params)?;
    let lambda_max = inner_left_word(&logs, 1.0, 1.0)?.max_log().exp();

    let sequence: Vec<(f64, f64)> = LIMIT_SEQUENCE.iter().map(|&p2| (p2, c.powf(1.0 / p2))).collect();
    let mut escalation = Vec::new();
    let mut p2 = *LIMIT_SEQUENCE.last().unwrap();
    let mut last = sequence.last().unwrap().1;
    while last > 1.0 + LIMIT_TARGET && p2 < LIMIT_CAP {
        p2 *= 10.0;
        last = c.powf(1.0 / p2);
        escalation.push((p2, last));
    }
    let all: Vec<(f64, f64)> = sequence.iter().chain(&escalation).copied().collect();
    let monotone = all.windows(2).all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
    let infimum = all.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let slack = 1.0 + policy.tol_rel;
    let bound_respected = all.iter().all(|&(_, b)| lambda_max <= b * slack);
    let declared_ge = bound_respected && infimum <= 1.0 + LIMIT_TARGET;
    Ok(LimitReport {
        normalization: 1.0 / top,
        c,
        sequence,
        escalation,
        monotone,
        infimum,
        lambda_max,
        bound_respected,
        declared_ge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{check_conclusion, gen_ordered_tuple};

    fn scalar_tuple(values: &[f64]) -> OperatorTuple {
        OperatorTuple::new(
            values.iter().map(|&v| HermitianMatrix::scaled_identity(2, v)).collect(),
            &TolerancePolicy::default(),
        )
        .unwrap()
    }

    /// Scalar re-derivation of the bounds for diagonal tuples.
    fn scalar_bounds(a: &[f64], t: &[f64], p: &[f64]) -> (f64, f64, f64) {
        let n = t.len();
        let e = |j: usize| if j % 2 == 1 { -t[(j + 1) / 2 - 1] / 2.0 } else { t[j / 2 - 1] / 2.0 };
        let mut u = 1.0f64;
        for j in (2..2 * n).rev() {
            u = u.powf(1.0 / p[j]) * a[j].powf(-2.0 * e(j));
        }
        let x = a[1].powf(-t[0]) * a[0].powf(p[0]);
        let mut z = a[0].powf(p[0]);
        for j in 1..2 * n {
            z = (a[j].powf(2.0 * e(j)) * z).powf(p[j]);
        }
        (x, u.powf(1.0 / p[1]), z)
    }

    #[test]
    fn identity_tuple_is_tight() {
        let t = scalar_tuple(&[1.0; 5]);
        let template = ParamTemplate::new(vec![0.5, 0.5], 1.0).unwrap();
        let rep = replicate_proof_steps(&t, &template, 1.0, &PGrid::default(), &CampaignOptions::default()).unwrap();
        assert_eq!(rep.red_flags(), 0);
        for r in &rep.rows {
            assert!(r.premise_holds);
            assert!(r.a_margin.abs() < 1e-12 && r.b_margin.abs() < 1e-12 && r.c_margin.abs() < 1e-12);
            assert!((r.c_bound - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_oracle_agrees() {
        let a = [0.3, 0.45, 0.6, 0.8, 0.95];
        let t = scalar_tuple(&a);
        let template = ParamTemplate::new(vec![0.4, 0.7], 1.3).unwrap();
        let grid = PGrid::from_values(vec![1.0, 2.5]).unwrap();
        let rep = replicate_proof_steps(&t, &template, 1.0, &grid, &CampaignOptions::default()).unwrap();
        for r in &rep.rows {
            let (x, u, w) = scalar_bounds(&a, &template.t, &r.p);
            assert!(((1.0 - w) - r.a_margin).abs() < 1e-12 * w.max(1.0));
            assert!(((u - x) - r.b_margin).abs() < 1e-12 * u.max(1.0), "{r:?}");
            // for commuting tuples the scalar bound is the operator bound
            assert!((r.c_bound - u).abs() < 1e-12 * u.max(1.0));
            assert!(r.premise_holds && !r.red_flag);
        }
    }

    #[test]
    fn normalized_ordered_tuples_hold() {
        let template = ParamTemplate::new(vec![0.3, 0.8], 1.2).unwrap();
        for seed in 0..4 {
            let t = gen_ordered_tuple::<f64>(5, 3, seed, 0.0).unwrap().normalized(0.99);
            let rep = replicate_proof_steps(&t, &template, 1.0, &PGrid::default(), &CampaignOptions::default())
                .unwrap();
            assert_eq!(rep.premise_failures(), 0, "seed {seed}");
            assert_eq!(rep.red_flags(), 0, "seed {seed}");
            assert!(rep.worst_relative_margin().unwrap() > -1e-9);
        }
    }

    #[test]
    fn limit_sequence_for_c_four() {
        // n = 2 with t = (1, 1), p3 = p4 = 1 on (1, 1, 1/4, 1) gives c = δ_3 = 4.
        let t = scalar_tuple(&[0.25, 0.25, 0.25, 1.0]);
        let template = ParamTemplate::new(vec![1.0, 1.0], 2.0).unwrap();
        let rep = limit_probe(&t, &template, &[1.0, 1.0], &TolerancePolicy::default()).unwrap();
        assert!((rep.c - 4.0).abs() < 1e-12);
        let expected = [4.0, 1.148_698_354_997_035, 1.013_959_479_790_029, 1.001_387_255_711_334_6, 1.000_138_639_045_616_4];
        for ((_, got), want) in rep.sequence.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(rep.monotone);
        assert!(rep.infimum <= 1.0 + 1e-6);
        assert!(rep.declared_ge);
    }

    #[test]
    fn limit_declaration_matches_conclusion() {
        let policy = TolerancePolicy::default();
        let template = ParamTemplate::new(vec![0.5, 0.5], 1.5).unwrap();
        for seed in 0..5 {
            let t = gen_ordered_tuple::<f64>(4, 3, seed, 0.0).unwrap();
            let rep = limit_probe(&t, &template, &[2.0, 2.0], &policy).unwrap();
            let ge = check_conclusion(&t, &policy).unwrap()[0].is_ge();
            assert_eq!(rep.declared_ge, ge);
        }
        let swapped = scalar_tuple(&[2.0, 1.0, 3.0, 4.0]);
        let rep = limit_probe(&swapped, &template, &[2.0, 2.0], &policy).unwrap();
        assert!(!rep.declared_ge);
        let equal = scalar_tuple(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(limit_probe(&equal, &template, &[1.0, 1.0], &policy).unwrap().c, 1.0);
    }
}
