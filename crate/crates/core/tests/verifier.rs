//! Campaign-level checks of the verifier on generated and scalar tuples.

use std::f64::consts::E;

use loewner_core::chain::{hypothesis_set, ChainShape, Direction};
use loewner_core::spectral::{HermitianMatrix, TolerancePolicy};
use loewner_core::verifier::{
    check_conclusion, check_hypotheses, gen_ordered_tuple, probe_loewner_heinz, CampaignOptions,
    OperatorTuple, PGrid, ParamTemplate, RowVerdict, WeightPolicy,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn diagonal_tuple(diags: &[Vec<f64>]) -> OperatorTuple {
    OperatorTuple::new(
        diags.iter().map(|d| HermitianMatrix::from_diagonal(d)).collect(),
        &TolerancePolicy::default(),
    )
    .unwrap()
}

#[test]
fn ordered_tuples_pass_under_necessity_weights() {
    let grid = PGrid::from_values(vec![1.0, 2.0, 4.0]).unwrap();
    for (seed, k) in (0..12).zip([3, 4, 5].iter().cycle()) {
        let tuple = gen_ordered_tuple::<f64>(*k, 2 + seed as usize % 3, seed, 0.0).unwrap();
        let n = k / 2;
        let template = ParamTemplate::new((1..=n).map(|i| 0.2 * i as f64).collect(), 1.0).unwrap();
        let report =
            check_hypotheses(seed, &tuple, &template, &grid, &WeightPolicy::Necessity, &CampaignOptions::default())
                .unwrap();
        assert!(report.all_pass(), "seed {seed}: worst {:?}", report.worst_relative_margin());
    }
}

#[test]
fn complex_tuples_pass_under_necessity_weights() {
    let grid = PGrid::from_values(vec![1.0, 3.0]).unwrap();
    let template = ParamTemplate::new(vec![0.4, 0.6], 1.1).unwrap();
    for seed in 0..4 {
        let tuple = gen_ordered_tuple::<Complex64>(5, 3, seed, 0.0).unwrap();
        let report =
            check_hypotheses(seed, &tuple, &template, &grid, &WeightPolicy::Necessity, &CampaignOptions::default())
                .unwrap();
        assert!(report.all_pass());
    }
}

/// Per-eigenvalue scalar version of every hypothesis.
fn scalar_margin(a: &[f64], t: &[f64], p: &[f64], r: f64, w: f64, k: usize, family_asc: bool, member: usize) -> f64 {
    let n = t.len();
    let idx = |j: usize| -> usize {
        if family_asc {
            (member + j).min(k)
        } else {
            (n + 1 + member).saturating_sub(j).max(1)
        }
    };
    let e = |j: usize| if j % 2 == 1 { -t[(j + 1) / 2 - 1] / 2.0 } else { t[j / 2 - 1] / 2.0 };
    let mut core = a[idx(0) - 1].powf(p[0]);
    for j in 1..2 * n {
        core = (a[idx(j) - 1].powf(2.0 * e(j)) * core).powf(p[j]);
    }
    let c = if family_asc { k } else { 1 };
    let lhs = a[c - 1].powf(r - t[n - 1]);
    let rhs = (a[c - 1].powf(r) * core).powf(w);
    if family_asc {
        lhs - rhs
    } else {
        rhs - lhs
    }
}

#[test]
fn diagonal_campaign_matches_scalar_reimplementation() {
    let diags = vec![
        vec![0.7, 1.3, 2.1],
        vec![1.1, 0.9, 2.5],
        vec![1.6, 1.2, 0.8],
        vec![2.0, 1.4, 1.9],
        vec![0.5, 1.7, 1.1],
    ];
    let grid = PGrid::from_values(vec![1.0, 1.5, 3.0]).unwrap();
    for k in [2, 3, 4, 5] {
        let tuple = diagonal_tuple(&diags[..k]);
        let shape = ChainShape::from_k(k).unwrap();
        let t: Vec<f64> = (1..=shape.n).map(|i| 0.3 + 0.2 * i as f64).collect();
        let template = ParamTemplate::new(t.clone(), 1.4).unwrap();
        let weights = WeightPolicy::Fixed(vec![0.6]);
        let report = check_hypotheses(0, &tuple, &template, &grid, &weights, &CampaignOptions::default()).unwrap();
        assert_eq!(report.rows.len(), hypothesis_set(shape).len() * 3usize.pow(2 * shape.n as u32));
        for row in &report.rows {
            let asc = row.family.as_str() == "asc";
            let expected = (0..3)
                .map(|j| {
                    let a: Vec<f64> = diags[..k].iter().map(|d| d[j]).collect();
                    scalar_margin(&a, &t, &row.p, 1.4, 0.6, k, asc, row.member)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(
                (row.margin - expected).abs() <= 1e-10 * row.scale,
                "k={k} {row:?} expected {expected}"
            );
        }
    }
}

#[test]
fn necessity_weights_do_not_force_order_for_t_below_one() {
    // (e, 1, e²): every hypothesis holds at every p with w = (r - t)/(ψ - t + r),
    // yet A2 ≥ A1 fails.
    let policy = TolerancePolicy::default();
    let tuple = OperatorTuple::<f64>::new(
        vec![
            HermitianMatrix::scaled_identity(2, E),
            HermitianMatrix::identity(2),
            HermitianMatrix::scaled_identity(2, E * E),
        ],
        &policy,
    )
    .unwrap();
    let template = ParamTemplate::new(vec![0.5], 1.0).unwrap();
    let report = check_hypotheses(
        0,
        &tuple,
        &template,
        &PGrid::default().escalated(),
        &WeightPolicy::Necessity,
        &CampaignOptions::default(),
    )
    .unwrap();
    assert!(report.all_pass());
    assert!(!check_conclusion(&tuple, &policy).unwrap()[0].is_ge());

    // with the weight held fixed the first hypothesis fails once p grows
    let fixed = check_hypotheses(
        0,
        &tuple,
        &template,
        &PGrid::default().escalated(),
        &WeightPolicy::Fixed(vec![0.5]),
        &CampaignOptions::default(),
    )
    .unwrap();
    assert!(fixed.rows.iter().any(|r| r.verdict == RowVerdict::Fail));
}

#[test]
fn every_chain_direction_matches_its_family() {
    for k in 2..8 {
        for h in hypothesis_set(ChainShape::from_k(k).unwrap()) {
            let expected = if h.family.as_str() == "asc" { Direction::Ge } else { Direction::Le };
            assert_eq!(h.direction, expected);
        }
    }
}

#[test]
fn regression_fixture_k3_dim2_seed42() {
    let tuple = gen_ordered_tuple::<f64>(3, 2, 42, 0.0).unwrap();
    let text = include_str!("fixtures/ordered_k3_dim2_seed42.json");
    let expected: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_value(tuple.to_file()).unwrap(), expected);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heinz_holds_on_generated_pairs(seed in any::<u64>(), dim in 1usize..=5) {
        let policy = TolerancePolicy::default();
        let t = gen_ordered_tuple::<f64>(2, dim, seed, 0.0).unwrap();
        let rep = probe_loewner_heinz(t.get(2), t.get(1), &[0.0, 0.25, 0.5, 0.75, 1.0], &policy).unwrap();
        prop_assert!(rep.holds_on_unit_interval());
    }
}
