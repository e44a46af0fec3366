use std::fmt::Write as _;

use loewner_core::chain::{necessity_weight_for, psi_exponent};
use loewner_core::dsl::{golden_lines, normalize_whitespace};
use loewner_core::{build_chain, hypothesis_set, ChainShape, Family};

use crate::config::{FamilyArg, LabConfig};
use crate::{LabError, Outcome, EXIT_VIOLATION};

pub fn resolve_psi(cfg: LabConfig) -> Result<LabConfig, LabError> {
    if cfg.t.is_none() || cfg.p.is_none() {
        return Err(LabError::Config("psi needs --t and --p".into()));
    }
    Ok(LabConfig {
        t: cfg.t,
        p: cfg.p,
        r: cfg.r,
        ..LabConfig::default()
    })
}

/// Prints `psi = ψ` and, with `r`, the necessity weight `w`.
pub fn cmd_psi(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let t = cfg.t.as_deref().unwrap_or_default();
    let p = cfg.p.as_deref().unwrap_or_default();
    let psi = psi_exponent(t, p)?;
    let mut out = format!("psi = {psi}\n");
    if let Some(r) = cfg.r {
        let w = necessity_weight_for(t, p, r)?;
        writeln!(out, "w = {w}").unwrap();
    }
    Ok(Outcome::ok(out))
}

pub fn resolve_print_chain(cfg: LabConfig) -> Result<LabConfig, LabError> {
    let k = match cfg.k.as_deref() {
        Some(&[k]) => k,
        Some(_) => return Err(LabError::Config("print-chain takes a single --k".into())),
        None => return Err(LabError::Config("print-chain needs --k".into())),
    };
    if cfg.member.is_some() && cfg.family.is_none() {
        return Err(LabError::Config("--member needs --family".into()));
    }
    Ok(LabConfig {
        k: Some(vec![k]),
        family: cfg.family,
        member: cfg.member,
        golden: cfg.golden,
        ..LabConfig::default()
    })
}

/// Canonical text of the selected chain members, one per line.
pub fn chain_lines(k: usize, family: Option<FamilyArg>, member: Option<usize>) -> Result<Vec<String>, LabError> {
    let shape = ChainShape::from_k(k)?;
    let family = family.map(|f| match f {
        FamilyArg::Asc => Family::Ascending,
        FamilyArg::Desc => Family::Descending,
    });
    let chains = match (family, member) {
        (Some(f), Some(m)) => vec![build_chain(f, m, shape)?],
        (Some(f), None) => hypothesis_set(shape)
            .into_iter()
            .filter(|c| c.family == f)
            .collect(),
        (None, _) => hypothesis_set(shape),
    };
    Ok(chains.iter().map(|c| c.to_string()).collect())
}

pub fn cmd_print_chain(cfg: &LabConfig) -> Result<Outcome, LabError> {
    let k = cfg.k.as_ref().and_then(|k| k.first().copied()).unwrap_or(0);
    let lines = chain_lines(k, cfg.family, cfg.member)?;
    let mut out = String::new();
    for line in &lines {
        writeln!(out, "{line}").unwrap();
    }
    let Some(path) = &cfg.golden else {
        return Ok(Outcome::ok(out));
    };
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let expected = golden_lines(&text);
    let mut mismatches = 0;
    let mut notes = String::new();
    for i in 0..lines.len().max(expected.len()) {
        let got = lines.get(i).map(|l| normalize_whitespace(l));
        let want = expected.get(i);
        if got.as_ref() != want {
            mismatches += 1;
            writeln!(notes, "line {}:", i + 1).unwrap();
            writeln!(notes, "  expected: {}", want.map_or("<none>", |s| s.as_str())).unwrap();
            writeln!(notes, "  got:      {}", got.as_deref().unwrap_or("<none>")).unwrap();
        }
    }
    if mismatches == 0 {
        writeln!(out, "golden {}: {} lines match", path.display(), lines.len()).unwrap();
        Ok(Outcome::ok(out))
    } else {
        write!(out, "{notes}").unwrap();
        writeln!(out, "golden {}: {mismatches} mismatches", path.display()).unwrap();
        Ok(Outcome::with_code(EXIT_VIOLATION, out))
    }
}
