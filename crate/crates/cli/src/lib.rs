//! Command implementations behind the `netform` binary.
//!
//! Every command returns its report text and an exit code; errors carry
//! their own code (2 parse, 3 semantic, 4 cap).

pub mod files;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use netform::equilibrium::{enumerate_equilibria, ENUMERATION_CAP};
use netform::payoff::social_welfare;
use netform::properties::{equilibrium_status, run_suite, CheckResult, EquilibriumStatus, Outcome};
use netform::rational::{frac, int, to_decimal};
use netform::scenarios::{make_bad_nash, make_empty, make_fig1_fixture, random_profile};
use netform::adversary::attack_distribution;
use netform::game::induce_network;
use netform::{AgentOrder, AttackerSpec, DeviationClass, FTable, GameInstance, SolverConfig, StrategyProfile};
use serde::Serialize;

use files::{load_instance, load_profile, to_json, AgentEntry, InstanceFile, ProfileFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Semantic(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Semantic(_) | CliError::Io(_) => 3,
            CliError::Cap(_) => 4,
        }
    }
}

impl From<netform::Error> for CliError {
    fn from(e: netform::Error) -> Self {
        match e {
            netform::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Semantic(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

const DECIMAL_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Exact,
    Local1,
}

impl From<ClassArg> for DeviationClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Exact => DeviationClass::Exact,
            ClassArg::Local1 => DeviationClass::Local1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    RoundRobin,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    #[value(alias = "bad_nash")]
    BadNash,
    Fig1,
    Empty,
}

#[derive(Debug, Parser)]
#[command(name = "netform", version, about = "Network formation games with attack and immunization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attack distribution, utilities and welfare of a profile.
    Evaluate { instance: PathBuf, profile: PathBuf },
    /// Certify a profile as a Nash equilibrium (exit 1 if it is not).
    VerifyNash {
        instance: PathBuf,
        profile: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        class: ClassArg,
        #[arg(long, default_value_t = netform::equilibrium::DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Welfare and equilibrium status of a scenario over a range of n (CSV).
    Sweep {
        #[arg(long, value_enum, default_value = "bad-nash")]
        scenario: ScenarioArg,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural checks of a profile, or of every non-trivial equilibrium
    /// of the instance when `--enumerate` is given.
    Properties {
        instance: PathBuf,
        profile: Option<PathBuf>,
        #[arg(long)]
        enumerate: Option<usize>,
        #[arg(long)]
        assume_equilibrium: bool,
    },
    /// Best-response dynamics from a given or seeded random start.
    Dynamics {
        instance: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        class: ClassArg,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        #[arg(long, value_enum, default_value = "random")]
        order: OrderArg,
        #[arg(long, default_value_t = netform::equilibrium::DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Write a scenario's instance and profile files into a directory.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

pub fn execute(cli: Cli) -> Result<CommandOutput, CliError> {
    match cli.command {
        Command::Evaluate { instance, profile } => cmd_evaluate(&instance, &profile),
        Command::VerifyNash {
            instance,
            profile,
            class,
            cap,
        } => cmd_verify_nash(&instance, &profile, class.into(), cap),
        Command::Sweep {
            scenario,
            n_from,
            n_to,
            out,
        } => {
            let csv = cmd_sweep(scenario, n_from, n_to)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &csv)?;
                    Ok(CommandOutput::ok(String::new()))
                }
                None => Ok(CommandOutput::ok(csv)),
            }
        }
        Command::Properties {
            instance,
            profile,
            enumerate,
            assume_equilibrium,
        } => cmd_properties(&instance, profile.as_deref(), enumerate, assume_equilibrium),
        Command::Dynamics {
            instance,
            profile,
            seed,
            class,
            max_rounds,
            order,
            cap,
        } => cmd_dynamics(
            &instance,
            &DynamicsOptions {
                profile,
                seed,
                class: class.into(),
                max_rounds,
                order,
                cap,
            },
        ),
        Command::Scenario { name, n, out_dir } => cmd_scenario(name, n, &out_dir),
    }
}

/// Reads `NETFORM_THREADS` and sizes the global pool; unset means all cores.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NETFORM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| CliError::Parse(format!("NETFORM_THREADS={value:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Semantic(e.to_string()))
}

#[derive(Serialize)]
struct AttackEntry {
    region: Vec<usize>,
    probability: String,
}

#[derive(Serialize)]
struct AgentReport {
    agent: usize,
    expected_connectivity: String,
    cost: String,
    utility: String,
}

#[derive(Serialize)]
struct EvaluateReport {
    n: usize,
    attack: Vec<AttackEntry>,
    agents: Vec<AgentReport>,
    welfare: String,
    welfare_decimal: String,
}

fn attack_entries(instance: &GameInstance, profile: &StrategyProfile) -> Result<Vec<AttackEntry>, CliError> {
    let net = induce_network(instance, profile)?;
    let dist = attack_distribution(instance.attacker(), &net);
    Ok(dist
        .entries()
        .into_iter()
        .map(|(r, p)| AttackEntry {
            region: net.vulnerable_regions()[r].clone(),
            probability: p.to_string(),
        })
        .collect())
}

pub fn cmd_evaluate(instance: &Path, profile: &Path) -> Result<CommandOutput, CliError> {
    let instance = load_instance(instance)?;
    let profile = load_profile(profile, &instance)?;
    let welfare = social_welfare(&instance, &profile)?;
    let report = EvaluateReport {
        n: instance.n(),
        attack: attack_entries(&instance, &profile)?,
        agents: welfare
            .per_agent
            .iter()
            .map(|u| AgentReport {
                agent: u.agent,
                expected_connectivity: u.expected_connectivity.to_string(),
                cost: u.cost.to_string(),
                utility: u.utility.to_string(),
            })
            .collect(),
        welfare_decimal: to_decimal(&welfare.total, DECIMAL_DIGITS),
        welfare: welfare.total.to_string(),
    };
    Ok(CommandOutput::ok(to_json(&report)))
}

#[derive(Serialize)]
struct CertificateAgent {
    agent: usize,
    utility: String,
    gap: String,
    witness: Option<AgentEntry>,
}

#[derive(Serialize)]
struct CertificateReport {
    class: &'static str,
    is_nash: bool,
    agents: Vec<CertificateAgent>,
}

pub fn cmd_verify_nash(
    instance: &Path,
    profile: &Path,
    class: DeviationClass,
    cap: usize,
) -> Result<CommandOutput, CliError> {
    let instance = load_instance(instance)?;
    let profile = load_profile(profile, &instance)?;
    verify_nash(&instance, &profile, class, cap)
}

pub fn verify_nash(
    instance: &GameInstance,
    profile: &StrategyProfile,
    class: DeviationClass,
    cap: usize,
) -> Result<CommandOutput, CliError> {
    let cert = SolverConfig { exact_cap: cap }.is_nash(instance, profile, class)?;
    let report = CertificateReport {
        class: class.name(),
        is_nash: cert.is_nash,
        agents: (0..instance.n())
            .map(|i| CertificateAgent {
                agent: i,
                utility: cert.current_utilities[i].to_string(),
                gap: cert.per_agent_gap[i].to_string(),
                witness: cert.witnesses[i].as_ref().map(AgentEntry::from_strategy),
            })
            .collect(),
    };
    Ok(CommandOutput {
        stdout: to_json(&report),
        code: if cert.is_nash { 0 } else { 1 },
    })
}

pub const SWEEP_HEADER: &str = "n,welfare_exact,welfare_decimal,is_nash,n_squared_minus_welfare";

pub fn cmd_sweep(scenario: ScenarioArg, n_from: usize, n_to: usize) -> Result<String, CliError> {
    if scenario != ScenarioArg::BadNash {
        return Err(CliError::Semantic("only the bad-nash scenario can be swept".into()));
    }
    if n_from < 10 || n_from > n_to {
        return Err(CliError::Semantic(format!("invalid range {n_from}..={n_to} (needs 10 <= from <= to)")));
    }
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for n in n_from..=n_to {
        let bundle = make_bad_nash(n)?;
        let welfare = social_welfare(&bundle.instance, &bundle.profile)?.total;
        let nash = SolverConfig::default()
            .is_nash(&bundle.instance, &bundle.profile, DeviationClass::Exact)?
            .is_nash;
        let gap = int((n * n) as i64) - &welfare;
        writeln!(csv, "{n},{welfare},{},{nash},{gap}", to_decimal(&welfare, DECIMAL_DIGITS)).expect("string write");
    }
    Ok(csv)
}

#[derive(Serialize)]
struct WitnessReport {
    description: String,
    nodes: Vec<usize>,
}

#[derive(Serialize)]
struct CheckReport {
    name: &'static str,
    applicable: bool,
    passed: Option<bool>,
    reason: Option<String>,
    witness: Option<WitnessReport>,
}

impl From<&CheckResult> for CheckReport {
    fn from(r: &CheckResult) -> Self {
        let (reason, witness) = match &r.outcome {
            Outcome::Inapplicable(reason) => (Some(reason.clone()), None),
            Outcome::Pass => (None, None),
            Outcome::Fail(w) => (
                None,
                Some(WitnessReport {
                    description: w.description.clone(),
                    nodes: w.nodes.clone(),
                }),
            ),
        };
        Self {
            name: r.name,
            applicable: r.is_applicable(),
            passed: r.passed(),
            reason,
            witness,
        }
    }
}

#[derive(Serialize)]
struct ProfileChecks {
    status: &'static str,
    profile: ProfileFile,
    checks: Vec<CheckReport>,
}

#[derive(Serialize)]
struct PropertiesReport {
    profiles: Vec<ProfileChecks>,
    failures: usize,
}

pub fn cmd_properties(
    instance: &Path,
    profile: Option<&Path>,
    enumerate: Option<usize>,
    assume_equilibrium: bool,
) -> Result<CommandOutput, CliError> {
    let instance = load_instance(instance)?;
    let mut checked = Vec::new();
    match (profile, enumerate) {
        (Some(path), None) => {
            let profile = load_profile(path, &instance)?;
            let status = if assume_equilibrium {
                EquilibriumStatus::Assumed
            } else {
                equilibrium_status(&SolverConfig::default(), &instance, &profile)?
            };
            checked.push((status, profile));
        }
        (None, Some(n)) => {
            if n > ENUMERATION_CAP {
                return Err(CliError::Cap(format!("enumeration is capped at n = {ENUMERATION_CAP}, got {n}")));
            }
            if n != instance.n() {
                return Err(CliError::Semantic(format!("--enumerate {n} but the instance has n = {}", instance.n())));
            }
            for p in enumerate_equilibria(&instance, DeviationClass::Exact, true)? {
                checked.push((EquilibriumStatus::Verified, p));
            }
        }
        _ => return Err(CliError::Semantic("give exactly one of a profile or --enumerate".into())),
    }
    let mut profiles = Vec::new();
    let mut failures = 0;
    for (status, profile) in checked {
        let results = run_suite(&instance, &profile, status)?;
        failures += results.iter().filter(|r| r.is_failure()).count();
        profiles.push(ProfileChecks {
            status: status.name(),
            profile: ProfileFile::from_profile(&profile),
            checks: results.iter().map(CheckReport::from).collect(),
        });
    }
    let report = PropertiesReport { profiles, failures };
    Ok(CommandOutput {
        stdout: to_json(&report),
        code: if failures == 0 { 0 } else { 1 },
    })
}

#[derive(Debug, Clone)]
pub struct DynamicsOptions {
    pub profile: Option<PathBuf>,
    pub seed: u64,
    pub class: DeviationClass,
    pub max_rounds: usize,
    pub order: OrderArg,
    pub cap: usize,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            profile: None,
            seed: 0,
            class: DeviationClass::Exact,
            max_rounds: 100,
            order: OrderArg::Random,
            cap: netform::equilibrium::DEFAULT_EXACT_CAP,
        }
    }
}

/// Edge and immunization probabilities of the seeded random start.
pub const RANDOM_START: (f64, f64) = (0.3, 0.5);

#[derive(Serialize)]
struct MoveReport {
    agent: usize,
    old: AgentEntry,
    new: AgentEntry,
    gain: String,
}

#[derive(Serialize)]
struct DynamicsReport {
    class: &'static str,
    order: &'static str,
    seed: u64,
    max_rounds: usize,
    passes: usize,
    converged: bool,
    initial_profile: ProfileFile,
    moves: Vec<MoveReport>,
    final_profile: ProfileFile,
    final_welfare: String,
    final_welfare_decimal: String,
}

pub fn cmd_dynamics(instance: &Path, options: &DynamicsOptions) -> Result<CommandOutput, CliError> {
    let instance = load_instance(instance)?;
    let initial = match &options.profile {
        Some(path) => load_profile(path, &instance)?,
        None => random_profile(instance.n(), RANDOM_START.0, RANDOM_START.1, options.seed)?,
    };
    dynamics(&instance, &initial, options)
}

pub fn dynamics(
    instance: &GameInstance,
    initial: &StrategyProfile,
    options: &DynamicsOptions,
) -> Result<CommandOutput, CliError> {
    let (order, order_name) = match options.order {
        OrderArg::RoundRobin => (AgentOrder::RoundRobin, "round-robin"),
        OrderArg::Random => (AgentOrder::SeededRandom(options.seed), "random"),
    };
    let trace = SolverConfig { exact_cap: options.cap }.br_dynamics(
        instance,
        initial,
        options.class,
        order,
        options.max_rounds,
    )?;
    let welfare = social_welfare(instance, &trace.final_profile)?.total;
    let report = DynamicsReport {
        class: options.class.name(),
        order: order_name,
        seed: options.seed,
        max_rounds: options.max_rounds,
        passes: trace.passes,
        converged: trace.converged,
        initial_profile: ProfileFile::from_profile(initial),
        moves: trace
            .moves
            .iter()
            .map(|m| MoveReport {
                agent: m.agent,
                old: AgentEntry::from_strategy(&m.old),
                new: AgentEntry::from_strategy(&m.new),
                gain: m.gain.to_string(),
            })
            .collect(),
        final_profile: ProfileFile::from_profile(&trace.final_profile),
        final_welfare_decimal: to_decimal(&welfare, DECIMAL_DIGITS),
        final_welfare: welfare.to_string(),
    };
    Ok(CommandOutput::ok(to_json(&report)))
}

#[derive(Serialize)]
struct ScenarioReport {
    name: String,
    files: Vec<String>,
    expected_facts: BTreeMap<String, String>,
}

/// Files written by `scenario`; the fixture also gets the profile with the
/// extra edge.
pub fn cmd_scenario(name: ScenarioArg, n: usize, out_dir: &Path) -> Result<CommandOutput, CliError> {
    let (bundle, extra) = match name {
        ScenarioArg::BadNash => (make_bad_nash(n)?, None),
        ScenarioArg::Fig1 => {
            let fx = make_fig1_fixture()?;
            (fx.bundle, Some(fx.with_edge))
        }
        ScenarioArg::Empty => {
            let carnage = AttackerSpec::FOpponent(FTable::monomial(1, n)?);
            (make_empty(n, int(2), frac(3, 2), carnage)?, None)
        }
    };
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut write = |file: &str, text: String| -> Result<(), CliError> {
        std::fs::write(out_dir.join(file), text)?;
        written.push(file.to_string());
        Ok(())
    };
    write("instance.json", to_json(&InstanceFile::from_instance(&bundle.instance)))?;
    write("profile.json", to_json(&ProfileFile::from_profile(&bundle.profile)))?;
    if let Some(p) = extra {
        write("profile_with_edge.json", to_json(&ProfileFile::from_profile(&p)))?;
    }
    let report = ScenarioReport {
        name: bundle.name,
        files: written,
        expected_facts: bundle
            .expected_facts
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
    };
    Ok(CommandOutput::ok(to_json(&report)))
}
