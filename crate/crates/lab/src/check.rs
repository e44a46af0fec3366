//! `check --mode ...`: the verification suites.

use std::fmt::Write as _;
use std::path::Path;

use loewner_core::verifier::{
    check_conclusion, check_hypotheses, compare, gen_ordered_tuple, gen_unordered_tuple,
    instance_seed, limit_probe, probe_loewner_heinz, probe_theorem_1_2, replicate_proof_steps,
    CampaignOptions, CampaignReport, ImplicationStatus, OperatorTuple, PGrid, ParamTemplate, Row,
    RowVerdict, SideOfOne, TupleFile, WeightPolicy, DEFAULT_MAX_POINTS, LIMIT_SEQUENCE,
};
use loewner_core::{ChainShape, Family, HermitianMatrix, Scalar, TolerancePolicy};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{DimRange, FamilyArg, FieldArg, LabConfig, Mode, Source, WeightSpec};
use crate::report::{self, join, sidecar_path};
use crate::{LabError, Outcome, EXIT_OK, EXIT_VIOLATION};

/// Exponents of the Löwner–Heinz probe.
pub const HEINZ_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Pair with `P ≥ Q ≥ 0` but not `P² ≥ Q²`.
pub const HEINZ_WITNESS: ([f64; 4], [f64; 4]) = ([2.0, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0]);
const UNORDERED_BUDGET: usize = 1000;

/// Fills every setting the chosen mode reads with its default and checks it.
pub fn resolve(cfg: LabConfig) -> Result<LabConfig, LabError> {
    let mode = cfg.mode.unwrap_or(Mode::Necessity);
    let base = PGrid::default();
    let fixture = mode == Mode::Contrapositive
        && cfg.tuple.is_none()
        && cfg.source.unwrap_or(Source::Fixture) == Source::Fixture;
    let single = fixture || cfg.tuple.is_some();

    let mut out = LabConfig {
        mode: Some(mode),
        seed: Some(cfg.seed.unwrap_or(0)),
        instances: Some(if single { 1 } else { cfg.instances.unwrap_or(10) }),
        tol_rel: Some(cfg.tol_rel.unwrap_or(TolerancePolicy::default().tol_rel)),
        eps_pd_rel: Some(cfg.eps_pd_rel.unwrap_or(TolerancePolicy::default().eps_pd_rel)),
        escalation: Some(cfg.escalation.unwrap_or(base.escalation)),
        grid_cap: Some(cfg.grid_cap.unwrap_or(base.cap)),
        field: Some(cfg.field.unwrap_or(FieldArg::Real)),
        jobs: cfg.jobs,
        report: cfg.report,
        tuple: cfg.tuple,
        ..LabConfig::default()
    };
    if out.tuple.is_none() && !fixture {
        out.k = Some(cfg.k.unwrap_or_else(|| vec![3]));
        out.dim = Some(cfg.dim.unwrap_or(DimRange {
            lo: 2,
            hi: if mode == Mode::Probes { 6 } else { 4 },
        }));
        out.gap = Some(cfg.gap.unwrap_or(0.0));
    }
    if fixture {
        out.dim = Some(cfg.dim.unwrap_or(DimRange { lo: 2, hi: 2 }));
    }
    let fixed = |w: f64| Some(WeightSpec(WeightPolicy::Fixed(vec![w])));
    match mode {
        Mode::Necessity => {
            out.weights = cfg.weights.or(Some(WeightSpec(WeightPolicy::Necessity)));
            out.family = cfg.family;
            out.member = cfg.member;
        }
        Mode::Contrapositive => {
            out.source = Some(if fixture { Source::Fixture } else { cfg.source.unwrap_or(Source::Fixture) });
            out.weights = cfg.weights.or(fixed(0.5));
        }
        Mode::ProofSteps => out.weights = cfg.weights.or(fixed(1.0)),
        Mode::Limit => out.p = cfg.p,
        Mode::Probes => {
            out.weights = cfg.weights.or(fixed(0.5));
            out.s_grid = Some(cfg.s_grid.unwrap_or_else(|| vec![1.5, 2.0, 4.0, 8.0]));
            out.r = Some(cfg.r.unwrap_or(1.0));
        }
    }
    if mode != Mode::Probes {
        out.p_grid = Some(cfg.p_grid.unwrap_or(base.values));
        out.max_points = Some(cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS));
        out.t = cfg.t;
        out.r = cfg.r;
        if fixture && out.t.is_none() {
            out.t = Some(vec![0.5]);
            out.r = Some(out.r.unwrap_or(1.0));
        }
    }
    validate(&out)?;
    Ok(out)
}

fn validate(cfg: &LabConfig) -> Result<(), LabError> {
    let mode = cfg.mode.unwrap_or(Mode::Necessity);
    cfg.policy()?;
    if mode == Mode::Probes {
        cfg.s_grid()?;
    } else {
        cfg.grid()?;
    }
    if cfg.member.is_some() && cfg.family.is_none() {
        return Err(LabError::Config("--member needs --family".into()));
    }
    if cfg.t.is_some() && cfg.r.is_none() {
        return Err(LabError::Config("--t needs --r".into()));
    }
    if let Some(t) = &cfg.t {
        ParamTemplate::new(t.clone(), cfg.r.unwrap_or(f64::NAN))?;
    }
    if mode == Mode::ProofSteps || mode == Mode::Probes {
        match cfg.weights.as_ref().map(|w| &w.0) {
            Some(WeightPolicy::Fixed(w)) if w.len() == 1 => {}
            _ => {
                return Err(LabError::Config(format!(
                    "{mode} takes a single fixed weight, e.g. --weights fixed:1"
                )))
            }
        }
    }
    for &k in cfg.k.iter().flatten() {
        let shape = ChainShape::from_k(k)?;
        if let Some(t) = &cfg.t {
            if t.len() != shape.n {
                return Err(LabError::Config(format!(
                    "k = {k} needs {} exponents t, got {}",
                    shape.n,
                    t.len()
                )));
            }
        }
        if let Some(WeightSpec(WeightPolicy::Fixed(w))) = &cfg.weights {
            if w.len() != 1 && w.len() != shape.members() {
                return Err(LabError::Config(format!(
                    "k = {k} needs 1 or {} fixed weights, got {}",
                    shape.members(),
                    w.len()
                )));
            }
        }
        if let (Mode::Limit, Some(p)) = (mode, &cfg.p) {
            if p.len() != 2 * shape.n - 2 {
                return Err(LabError::Config(format!(
                    "k = {k} needs {} trailing exponents p_3..p_2n, got {}",
                    2 * shape.n - 2,
                    p.len()
                )));
            }
        }
        if let (Some(f), Some(m)) = (cfg.family, cfg.member) {
            let count = match f {
                FamilyArg::Asc => shape.ascending_members(),
                FamilyArg::Desc => shape.descending_members(),
            };
            if !(1..=count).contains(&m) {
                return Err(LabError::Config(format!("member {m} is outside 1..={count} for k = {k}")));
            }
        }
    }
    Ok(())
}

pub fn cmd_check(cfg: &LabConfig) -> Result<Outcome, LabError> {
    match cfg.field.unwrap_or(FieldArg::Real) {
        FieldArg::Real => run::<f64>(cfg),
        FieldArg::Complex => run::<Complex64>(cfg),
    }
}

fn run<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    match cfg.mode.unwrap_or(Mode::Necessity) {
        Mode::Necessity => necessity::<T>(cfg),
        Mode::Contrapositive => contrapositive::<T>(cfg),
        Mode::ProofSteps => proof_steps::<T>(cfg),
        Mode::Limit => limit::<T>(cfg),
        Mode::Probes => probes::<T>(cfg),
    }
}

/// One generated or loaded tuple with its scalar parameters.
pub struct Instance<T: Scalar> {
    pub id: u64,
    pub tuple: OperatorTuple<T>,
    pub template: ParamTemplate,
    pub weights: WeightPolicy,
}

/// Builds the instances of a suite. `generate(k, dim, seed)` makes a tuple
/// unless one was loaded from `--tuple`.
fn instances<T: Scalar>(
    cfg: &LabConfig,
    generate: impl Fn(usize, usize, u64) -> Result<OperatorTuple<T>, LabError>,
) -> Result<Vec<Instance<T>>, LabError> {
    let policy = cfg.policy()?;
    let seed = cfg.seed.unwrap_or(0);
    let count = cfg.instances.unwrap_or(1);
    let ks = cfg.k.clone().unwrap_or_else(|| vec![3]);
    let dims = cfg.dim.unwrap_or(DimRange { lo: 2, hi: 2 });
    let loaded = match &cfg.tuple {
        Some(path) => Some(load_tuple::<T>(path, &policy)?),
        None => None,
    };
    (0..count)
        .map(|i| {
            let instance = instance_seed(seed, i as u64);
            let tuple = match &loaded {
                Some(t) => t.clone(),
                None => generate(ks[i % ks.len()], dims.nth(i / ks.len()), instance)?,
            };
            let shape = ChainShape::from_k(tuple.k())?;
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(instance, 1));
            let template = match &cfg.t {
                Some(t) => ParamTemplate::new(t.clone(), cfg.r.unwrap_or(f64::NAN))?,
                None => ParamTemplate::sample(shape.n, &mut rng),
            };
            let weights = cfg
                .weights
                .as_ref()
                .map_or(WeightPolicy::Necessity, |w| w.0.clone())
                .resolve(shape.members(), &mut rng);
            Ok(Instance {
                id: i as u64,
                tuple,
                template,
                weights,
            })
        })
        .collect()
}

fn load_tuple<T: Scalar>(path: &Path, policy: &TolerancePolicy) -> Result<OperatorTuple<T>, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let file: TupleFile =
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    Ok(OperatorTuple::from_file(&file, policy)?)
}

fn ordered<T: Scalar>(cfg: &LabConfig) -> Result<Vec<Instance<T>>, LabError> {
    let gap = cfg.gap.unwrap_or(0.0);
    instances(cfg, |k, dim, seed| Ok(gen_ordered_tuple::<T>(k, dim, seed, gap)?))
}

fn options(cfg: &LabConfig, shape: ChainShape) -> Result<CampaignOptions, LabError> {
    let members = cfg.family.map(|f| {
        let (family, count) = match f {
            FamilyArg::Asc => (Family::Ascending, shape.ascending_members()),
            FamilyArg::Desc => (Family::Descending, shape.descending_members()),
        };
        match cfg.member {
            Some(m) => vec![(family, m)],
            None => (1..=count).map(|m| (family, m)).collect(),
        }
    });
    Ok(CampaignOptions {
        policy: cfg.policy()?,
        max_points: cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS),
        seed: cfg.seed.unwrap_or(0),
        short_circuit: false,
        members,
    })
}

fn config_json(cfg: &LabConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn finish(out: &mut String, mode: Mode, violated: bool) -> i32 {
    if violated {
        writeln!(out, "{mode}: expectations violated").unwrap();
        EXIT_VIOLATION
    } else {
        writeln!(out, "{mode}: expectations met").unwrap();
        EXIT_OK
    }
}

fn fmt_margin(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |m| format!("{m:.3e}"))
}

fn write_campaign(cfg: &LabConfig, report: &CampaignReport, extra: serde_json::Value) -> Result<(), LabError> {
    let Some(path) = &cfg.report else {
        return Ok(());
    };
    report
        .write_csv(report::create(path)?)
        .map_err(|e| LabError::io(path, e))?;
    let mut side = report.sidecar();
    side["config"] = config_json(cfg);
    side["summary"] = extra;
    report::write_json(&sidecar_path(path), &side)
}

/// Ordered tuples under the chosen weights: every hypothesis row must pass
/// and every tuple must satisfy the conclusion.
fn necessity<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid()?;
    let policy = cfg.policy()?;
    let runs = ordered::<T>(cfg)?
        .par_iter()
        .map(|inst| {
            let shape = ChainShape::from_k(inst.tuple.k())?;
            let report = check_hypotheses(
                inst.id,
                &inst.tuple,
                &inst.template,
                &grid,
                &inst.weights,
                &options(cfg, shape)?,
            )?;
            let conclusion = check_conclusion(&inst.tuple, &policy)?;
            Ok((inst.id, inst.tuple.k(), inst.tuple.dim(), report, conclusion))
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut out = String::new();
    let mut all = CampaignReport::default();
    let mut violated = false;
    for (id, k, dim, report, conclusion) in runs {
        let ordered = conclusion.iter().all(|v| v.is_ge());
        let (fail, error) = (report.count(RowVerdict::Fail), report.count(RowVerdict::Error));
        violated |= fail > 0 || error > 0 || !ordered;
        writeln!(
            out,
            "instance {id}: k={k} dim={dim} rows={} pass={} fail={fail} error={error} worst_rel_margin={} conclusion={}",
            report.rows.len(),
            report.count(RowVerdict::Pass),
            fmt_margin(report.worst_relative_margin()),
            if ordered { "ordered" } else { "unordered" },
        )
        .unwrap();
        for row in report.rows.iter().filter(|r| r.verdict != RowVerdict::Pass) {
            writeln!(out, "  {}", describe_row(row)).unwrap();
        }
        all.extend(report);
    }
    writeln!(
        out,
        "necessity: {} rows, {} fail, {} error, worst_rel_margin={}",
        all.rows.len(),
        all.count(RowVerdict::Fail),
        all.count(RowVerdict::Error),
        fmt_margin(all.worst_relative_margin()),
    )
    .unwrap();
    write_campaign(cfg, &all, serde_json::json!({ "violated": violated }))?;
    let code = finish(&mut out, Mode::Necessity, violated);
    Ok(Outcome::with_code(code, out))
}

fn describe_row(row: &Row) -> String {
    match &row.error {
        Some(e) => format!(
            "instance={} {}{} p=({}) error: {e}",
            row.instance_id,
            row.family.as_str(),
            row.member,
            join(&row.p).replace(';', ","),
        ),
        None => format!(
            "instance={} {}{} p=({}) w={} margin={} relative={:.3e}",
            row.instance_id,
            row.family.as_str(),
            row.member,
            join(&row.p).replace(';', ","),
            row.w,
            row.margin,
            row.relative_margin(),
        ),
    }
}

/// The scalar tuple `(2I, I, 3I)` in dimension `dim`.
pub fn contrapositive_fixture<T: Scalar>(dim: usize, policy: &TolerancePolicy) -> Result<OperatorTuple<T>, LabError> {
    let m = [2.0, 1.0, 3.0].map(|c| HermitianMatrix::<T>::scaled_identity(dim, c));
    Ok(OperatorTuple::new(m.to_vec(), policy)?)
}

/// Unordered tuples: some hypothesis must fail. A tuple whose hypotheses hold
/// on the widened grid is a potential counterexample.
fn contrapositive<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let policy = cfg.policy()?;
    let base = cfg.grid()?;
    let insts = match (cfg.source, &cfg.tuple) {
        (_, Some(_)) | (Some(Source::Random), None) => instances(cfg, |k, dim, seed| {
            Ok(gen_unordered_tuple::<T>(k, dim, seed, UNORDERED_BUDGET)?.0)
        })?,
        _ => {
            let dim = cfg.dim.map_or(2, |d| d.lo);
            let fixture = contrapositive_fixture::<T>(dim, &policy)?;
            let mut list = instances(cfg, |_, _, _| Ok(fixture.clone()))?;
            list.truncate(1);
            list
        }
    };
    let runs = insts
        .par_iter()
        .map(|inst| -> Result<_, LabError> {
            let conclusion = check_conclusion(&inst.tuple, &policy)?;
            if conclusion.iter().all(|v| v.is_ge()) {
                return Ok((inst, conclusion, None));
            }
            let shape = ChainShape::from_k(inst.tuple.k())?;
            let opts = options(cfg, shape)?;
            let mut grid = base.clone();
            let mut report = CampaignReport::default();
            loop {
                report.extend(check_hypotheses(inst.id, &inst.tuple, &inst.template, &grid, &inst.weights, &opts)?);
                if report.rows.iter().any(|r| r.verdict == RowVerdict::Fail) {
                    break;
                }
                match grid.escalate() {
                    Some(next) => grid = next,
                    None => break,
                }
            }
            Ok((inst, conclusion, Some(report)))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = String::new();
    let mut all = CampaignReport::default();
    let mut violated = false;
    let mut refuted = 0;
    for (inst, conclusion, report) in runs {
        let Some(report) = report else {
            writeln!(out, "instance {}: tuple is ordered; nothing to refute", inst.id).unwrap();
            continue;
        };
        for (i, v) in conclusion.iter().enumerate().filter(|(_, v)| !v.is_ge()) {
            writeln!(
                out,
                "instance {}: A{} >= A{} fails (margin {})",
                inst.id,
                i + 2,
                i + 1,
                v.ge_margin
            )
            .unwrap();
        }
        let failures: Vec<&Row> = report.rows.iter().filter(|r| r.verdict == RowVerdict::Fail).collect();
        if failures.is_empty() {
            violated = true;
            writeln!(
                out,
                "instance {}: potential counterexample: every hypothesis holds on the widened grid",
                inst.id
            )
            .unwrap();
        } else {
            refuted += 1;
            for row in &failures {
                writeln!(out, "hypothesis-failure found: {}", describe_row(row)).unwrap();
            }
        }
        all.extend(report);
    }
    writeln!(out, "contrapositive: {refuted} unordered tuples with a failing hypothesis").unwrap();
    write_campaign(cfg, &all, serde_json::json!({ "refuted": refuted, "violated": violated }))?;
    let code = finish(&mut out, Mode::Contrapositive, violated);
    Ok(Outcome::with_code(code, out))
}

const PROOF_COLUMNS: [&str; 13] = [
    "instance_id",
    "k",
    "dim",
    "p_vector",
    "premise_margin",
    "premise_holds",
    "a_margin",
    "b_margin",
    "c_margin",
    "bc_margin",
    "c_bound",
    "scale",
    "red_flag",
];

/// Ordered tuples scaled to largest norm 1 with a fixed weight: whenever the
/// first ascending hypothesis holds, so must the three derived bounds.
fn proof_steps<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid()?;
    let w = match cfg.weights.as_ref().map(|w| &w.0) {
        Some(WeightPolicy::Fixed(w)) => w[0],
        _ => 1.0,
    };
    let opts = CampaignOptions {
        policy: cfg.policy()?,
        max_points: cfg.max_points.unwrap_or(DEFAULT_MAX_POINTS),
        seed: cfg.seed.unwrap_or(0),
        ..CampaignOptions::default()
    };
    let runs = ordered::<T>(cfg)?
        .into_par_iter()
        .map(|inst| {
            let tuple = inst.tuple.normalized(1.0);
            let report = replicate_proof_steps(&tuple, &inst.template, w, &grid, &opts)?;
            Ok((inst, report))
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut out = String::new();
    let mut csv_rows = Vec::new();
    let mut red = 0;
    for (inst, report) in &runs {
        red += report.red_flags();
        writeln!(
            out,
            "instance {}: k={} dim={} rows={} premise_failures={} red_flags={} worst_rel_margin={}",
            inst.id,
            inst.tuple.k(),
            inst.tuple.dim(),
            report.rows.len(),
            report.premise_failures(),
            report.red_flags(),
            fmt_margin(report.worst_relative_margin()),
        )
        .unwrap();
        for r in &report.rows {
            csv_rows.push(vec![
                inst.id.to_string(),
                inst.tuple.k().to_string(),
                inst.tuple.dim().to_string(),
                join(&r.p),
                r.premise_margin.to_string(),
                r.premise_holds.to_string(),
                r.a_margin.to_string(),
                r.b_margin.to_string(),
                r.c_margin.to_string(),
                r.bc_margin.to_string(),
                r.c_bound.to_string(),
                r.scale.to_string(),
                r.red_flag.to_string(),
            ]);
        }
    }
    writeln!(out, "proof-steps: w={w}, {red} red flags").unwrap();
    if let Some(path) = &cfg.report {
        report::write_csv(path, &PROOF_COLUMNS, &csv_rows)?;
        report::write_json(
            &sidecar_path(path),
            &serde_json::json!({
                "config": config_json(cfg),
                "rows": csv_rows.len(),
                "red_flags": red,
            }),
        )?;
    }
    let code = finish(&mut out, Mode::ProofSteps, red > 0);
    Ok(Outcome::with_code(code, out))
}

/// `p_2 → ∞` in the scalar bound: the inferred `A_2 ≥ A_1` must match a
/// direct comparison, and the bound must approach 1 monotonically.
fn limit<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let policy = cfg.policy()?;
    let runs = ordered::<T>(cfg)?
        .into_par_iter()
        .map(|inst| {
            let shape = ChainShape::from_k(inst.tuple.k())?;
            let p_rest = cfg.p.clone().unwrap_or_else(|| vec![1.0; 2 * shape.n - 2]);
            let report = limit_probe(&inst.tuple, &inst.template, &p_rest, &policy)?;
            let direct = compare(inst.tuple.get(2), inst.tuple.get(1), &policy)?.is_ge();
            Ok((inst, report, direct))
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut out = String::new();
    let mut csv_rows = Vec::new();
    let mut violated = false;
    for (inst, rep, direct) in &runs {
        let bad = !rep.monotone || rep.declared_ge != *direct;
        violated |= bad;
        let at_last = rep.sequence.last().map_or(f64::NAN, |s| s.1);
        writeln!(
            out,
            "instance {}: k={} dim={} c={:.6e} bound_at_{:e}={:.9} infimum={:.9} lambda_max={:.9} monotone={} declared_ge={} direct_ge={}{}",
            inst.id,
            inst.tuple.k(),
            inst.tuple.dim(),
            rep.c,
            LIMIT_SEQUENCE[LIMIT_SEQUENCE.len() - 1],
            at_last,
            rep.infimum,
            rep.lambda_max,
            rep.monotone,
            rep.declared_ge,
            direct,
            if bad { " MISMATCH" } else { "" },
        )
        .unwrap();
        for &(p2, b) in rep.sequence.iter().chain(&rep.escalation) {
            csv_rows.push(vec![
                inst.id.to_string(),
                inst.tuple.k().to_string(),
                inst.tuple.dim().to_string(),
                p2.to_string(),
                b.to_string(),
                rep.lambda_max.to_string(),
            ]);
        }
    }
    if let Some(path) = &cfg.report {
        report::write_csv(path, &["instance_id", "k", "dim", "p2", "bound", "lambda_max"], &csv_rows)?;
        report::write_json(
            &sidecar_path(path),
            &serde_json::json!({ "config": config_json(cfg), "violated": violated }),
        )?;
    }
    let code = finish(&mut out, Mode::Limit, violated);
    Ok(Outcome::with_code(code, out))
}

/// Löwner–Heinz on ordered pairs plus its `α = 2` witness, and the
/// single-operator implication on `Q = 2I` and `Q = I/2` over the s-grid.
fn probes<T: Scalar>(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let policy = cfg.policy()?;
    let s_grid = cfg.s_grid()?;
    let seed = cfg.seed.unwrap_or(0);
    let dims = cfg.dim.unwrap_or(DimRange { lo: 2, hi: 6 });
    let gap = cfg.gap.unwrap_or(0.0);
    let count = cfg.instances.unwrap_or(10);
    let heinz = (0..count)
        .into_par_iter()
        .map(|i| {
            let pair = gen_ordered_tuple::<T>(2, dims.nth(i), instance_seed(seed, i as u64), gap)?;
            Ok(probe_loewner_heinz(pair.get(2), pair.get(1), &HEINZ_ALPHAS, &policy)?)
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut out = String::new();
    let mut violated = false;
    let mut csv_rows = Vec::new();
    let held = heinz.iter().filter(|r| r.holds_on_unit_interval()).count();
    violated |= held != heinz.len();
    for (i, rep) in heinz.iter().enumerate() {
        for row in &rep.rows {
            csv_rows.push(vec![
                "heinz".into(),
                i.to_string(),
                row.alpha.to_string(),
                row.verdict.relation.to_string(),
                row.verdict.ge_margin.to_string(),
            ]);
        }
    }
    writeln!(out, "heinz: {held}/{} pairs hold for alpha in [0, 1]", heinz.len()).unwrap();

    let (wp, wq) = HEINZ_WITNESS;
    let wp = HermitianMatrix::<f64>::from_row_slice(2, &wp)?;
    let wq = HermitianMatrix::<f64>::from_row_slice(2, &wq)?;
    let witness = probe_loewner_heinz(&wp, &wq, &[1.0, 2.0], &policy)?;
    let fails_at_two = witness.failures() == vec![2.0];
    violated |= !fails_at_two;
    writeln!(
        out,
        "heinz witness: alpha=2 {} (margin {})",
        if fails_at_two { "fails as expected" } else { "UNEXPECTEDLY HOLDS" },
        witness.rows[1].verdict.ge_margin,
    )
    .unwrap();

    let w = match cfg.weights.as_ref().map(|w| &w.0) {
        Some(WeightPolicy::Fixed(w)) => w[0],
        _ => 0.5,
    };
    let r = cfg.r.unwrap_or(1.0);
    let dim = dims.lo;
    let p = HermitianMatrix::<T>::identity(dim);
    for (label, c, expect_failure) in [("2I", 2.0, true), ("I/2", 0.5, false)] {
        let q = HermitianMatrix::<T>::scaled_identity(dim, c);
        let rep = probe_theorem_1_2(&p, &q, r, 0.0, w, &s_grid, SideOfOne::Below, &policy)?;
        let ok = rep.status != ImplicationStatus::Violated
            && rep.first_failure.is_some() == expect_failure
            && (expect_failure || rep.status == ImplicationStatus::Confirmed);
        violated |= !ok;
        let last = rep.rows.last().map_or(f64::NAN, |row| row.s);
        writeln!(
            out,
            "single-operator Q={label}: status={:?} first_failure={} s_max={last} q_extreme={}{}",
            rep.status,
            rep.first_failure.map_or_else(|| "none".into(), |s| s.to_string()),
            rep.q_extreme,
            if ok { "" } else { " UNEXPECTED" },
        )
        .unwrap();
        for row in &rep.rows {
            csv_rows.push(vec![
                format!("single:{label}"),
                "0".into(),
                row.s.to_string(),
                row.verdict.relation.to_string(),
                row.margin.to_string(),
            ]);
        }
    }
    if let Some(path) = &cfg.report {
        report::write_csv(path, &["probe", "instance_id", "exponent", "relation", "margin"], &csv_rows)?;
        report::write_json(
            &sidecar_path(path),
            &serde_json::json!({ "config": config_json(cfg), "violated": violated }),
        )?;
    }
    let code = finish(&mut out, Mode::Probes, violated);
    Ok(Outcome::with_code(code, out))
}
