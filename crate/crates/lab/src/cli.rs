use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    Csv, DimRange, FamilyArg, FieldArg, LabConfig, Mode, Source,
    TupleKind, WeightSpec,
};
use crate::{chains, check, search, LabError, Outcome, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "loewner-lab", version, about = "Numerical checks of Löwner-order chain inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print ψ for the given t and p, and the necessity weight when --r is set.
    Psi(PsiArgs),
    /// Print chain inequalities in canonical DSL form.
    PrintChain(PrintChainArgs),
    /// Run a verification suite.
    Check(CheckArgs),
    /// Search random tuples for a counterexample to the chain theorem.
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config; flags given on the command line override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Worker threads for campaigns.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,
    /// Relative Löwner comparison tolerance.
    #[arg(long, value_name = "X")]
    pub tol_rel: Option<f64>,
    /// Relative positivity threshold for negative and fractional powers.
    #[arg(long, value_name = "X")]
    pub eps_pd_rel: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    #[arg(long, value_name = "CSV")]
    pub t: Option<Csv<f64>>,
    #[arg(long, value_name = "CSV")]
    pub p: Option<Csv<f64>>,
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PrintChainArgs {
    #[arg(long)]
    pub k: Option<usize>,
    /// Restrict to one family; both when omitted.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Member index within the family; all members when omitted.
    #[arg(long)]
    pub member: Option<usize>,
    /// Compare the output against a golden file, one inequality per line.
    #[arg(long, value_name = "PATH")]
    pub golden: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Campaign {
    /// Chain length, or a comma list cycled over instances.
    #[arg(long, value_name = "K[,K..]")]
    pub k: Option<Csv<usize>>,
    /// Dimension `N` or inclusive range `LO-HI`.
    #[arg(long, value_name = "N|LO-HI")]
    pub dim: Option<DimRange>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shared exponents t_1..t_n; sampled per instance when omitted.
    #[arg(long, value_name = "CSV")]
    pub t: Option<Csv<f64>>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Base values of the p-grid.
    #[arg(long, value_name = "CSV")]
    pub p_grid: Option<Csv<f64>>,
    /// Geometric growth factor when a grid is widened.
    #[arg(long)]
    pub escalation: Option<f64>,
    /// Largest value a widened grid may reach.
    #[arg(long)]
    pub grid_cap: Option<f64>,
    /// Latin-hypercube subsampling threshold for large grids.
    #[arg(long)]
    pub max_points: Option<usize>,
    /// fixed:<csv> | necessity | sampled:<lo>,<hi>
    #[arg(long, value_name = "POLICY")]
    pub weights: Option<WeightSpec>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub campaign: Campaign,
    #[arg(long)]
    pub instances: Option<usize>,
    /// Trailing exponents p_3..p_2n for the limit probe.
    #[arg(long, value_name = "CSV")]
    pub p: Option<Csv<f64>>,
    /// s-grid of the single-operator probe.
    #[arg(long, value_name = "CSV")]
    pub s_grid: Option<Csv<f64>>,
    /// Restrict the necessity suite to one family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub member: Option<usize>,
    /// Tuples for the contrapositive suite.
    #[arg(long, value_enum)]
    pub source: Option<Source>,
    /// Run on a tuple stored as JSON instead of generated ones.
    #[arg(long, value_name = "PATH")]
    pub tuple: Option<PathBuf>,
    /// Extra multiple of I added between consecutive ordered members.
    #[arg(long)]
    pub gap: Option<f64>,
    /// CSV report; a JSON sidecar is written next to it.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub campaign: Campaign,
    /// Number of tuples to try.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum)]
    pub tuples: Option<TupleKind>,
    /// Findings JSON; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub findings: Option<PathBuf>,
    /// Include failure statistics and margin histograms in the output.
    #[arg(long)]
    pub emit_stats: bool,
    #[command(flatten)]
    pub common: Common,
}

impl Common {
    fn apply(&self, cfg: LabConfig) -> LabConfig {
        LabConfig {
            jobs: self.jobs.or(cfg.jobs),
            field: self.field.or(cfg.field),
            tol_rel: self.tol_rel.or(cfg.tol_rel),
            eps_pd_rel: self.eps_pd_rel.or(cfg.eps_pd_rel),
            ..cfg
        }
    }
}

impl Campaign {
    fn apply(&self, cfg: LabConfig) -> LabConfig {
        LabConfig {
            k: self.k.clone().map(|c| c.0).or(cfg.k),
            dim: self.dim.or(cfg.dim),
            seed: self.seed.or(cfg.seed),
            t: self.t.clone().map(|c| c.0).or(cfg.t),
            r: self.r.or(cfg.r),
            p_grid: self.p_grid.clone().map(|c| c.0).or(cfg.p_grid),
            escalation: self.escalation.or(cfg.escalation),
            grid_cap: self.grid_cap.or(cfg.grid_cap),
            max_points: self.max_points.or(cfg.max_points),
            weights: self.weights.clone().or(cfg.weights),
            ..cfg
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Psi(a) => &a.common,
            Command::PrintChain(a) => &a.common,
            Command::Check(a) => &a.common,
            Command::Search(a) => &a.common,
        }
    }

    /// The flags given on the command line as a config layer.
    fn flags(&self) -> LabConfig {
        let cfg = self.common().apply(LabConfig::default());
        match self {
            Command::Psi(a) => LabConfig {
                t: a.t.clone().map(|c| c.0),
                p: a.p.clone().map(|c| c.0),
                r: a.r,
                ..cfg
            },
            Command::PrintChain(a) => LabConfig {
                k: a.k.map(|k| vec![k]),
                family: a.family,
                member: a.member,
                golden: a.golden.clone(),
                ..cfg
            },
            Command::Check(a) => {
                let cfg = a.campaign.apply(cfg);
                LabConfig {
                    mode: a.mode,
                    instances: a.instances,
                    p: a.p.clone().map(|c| c.0),
                    s_grid: a.s_grid.clone().map(|c| c.0),
                    family: a.family,
                    member: a.member,
                    source: a.source,
                    tuple: a.tuple.clone(),
                    gap: a.gap,
                    report: a.report.clone(),
                    ..cfg
                }
            }
            Command::Search(a) => {
                let cfg = a.campaign.apply(cfg);
                LabConfig {
                    budget: a.budget,
                    tuples: a.tuples,
                    findings: a.findings.clone(),
                    emit_stats: a.emit_stats.then_some(true),
                    ..cfg
                }
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => outcome,
        Err(e) => e.into(),
    }
}

fn execute(command: &Command) -> Result<Outcome, LabError> {
    let common = command.common();
    let file = match &common.config {
        Some(path) => LabConfig::load(path)?,
        None => LabConfig::default(),
    };
    let merged = file.overlay(command.flags());
    let resolved = match command {
        Command::Psi(_) => chains::resolve_psi(merged)?,
        Command::PrintChain(_) => chains::resolve_print_chain(merged)?,
        Command::Check(_) => check::resolve(merged)?,
        Command::Search(_) => search::resolve(merged)?,
    };
    if common.dump_config {
        return Ok(Outcome::ok(resolved.to_json() + "\n"));
    }
    let work = || match command {
        Command::Psi(_) => chains::cmd_psi(&resolved),
        Command::PrintChain(_) => chains::cmd_print_chain(&resolved),
        Command::Check(_) => check::cmd_check(&resolved),
        Command::Search(_) => search::cmd_search(&resolved),
    };
    match resolved.jobs {
        Some(0) => Err(LabError::Config("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Exit code of an outcome as a process status.
pub fn exit_status(outcome: &Outcome) -> std::process::ExitCode {
    match u8::try_from(outcome.code) {
        Ok(code) if outcome.code != EXIT_OK => std::process::ExitCode::from(code),
        _ => std::process::ExitCode::SUCCESS,
    }
}
