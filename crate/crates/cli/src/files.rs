//! JSON instance and profile files.
//!
//! Rationals are written as `"p/q"` (or `"p"`) strings so that files stay
//! exact.

use std::path::Path;

use netform::rational::parse;
use netform::{AttackerSpec, FTable, GameInstance, Rational, Strategy, StrategyProfile};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub edge_cost: String,
    pub immunization_cost: String,
    pub attacker: AttackerFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackerFile {
    Random,
    FOpponent { f: Vec<String> },
    Named { name: NamedAttacker },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedAttacker {
    MaxCarnage,
    MaxDisruption,
    Tailored,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub agents: Vec<AgentEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub buys: Vec<usize>,
    pub immunized: bool,
}

fn rational(field: &str, text: &str) -> Result<Rational, CliError> {
    parse(text).ok_or_else(|| CliError::Parse(format!("{field}: {text:?} is not a rational")))
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<GameInstance, CliError> {
        let n = self.n;
        let attacker = match &self.attacker {
            AttackerFile::Random => AttackerSpec::Random,
            AttackerFile::FOpponent { f } => {
                let values = f
                    .iter()
                    .enumerate()
                    .map(|(x, v)| rational(&format!("f[{x}]"), v))
                    .collect::<Result<_, _>>()?;
                AttackerSpec::FOpponent(FTable::new(values)?)
            }
            AttackerFile::Named { name } => AttackerSpec::FOpponent(match name {
                NamedAttacker::MaxCarnage => FTable::monomial(1, n)?,
                NamedAttacker::MaxDisruption => FTable::monomial(2, n)?,
                NamedAttacker::Tailored => FTable::tailored(n)?,
            }),
        };
        Ok(GameInstance::new(
            n,
            rational("edge_cost", &self.edge_cost)?,
            rational("immunization_cost", &self.immunization_cost)?,
            attacker,
        )?)
    }

    /// File form of an instance; known tables are written by name.
    pub fn from_instance(instance: &GameInstance) -> Self {
        let n = instance.n();
        let attacker = match instance.attacker() {
            AttackerSpec::Random => AttackerFile::Random,
            AttackerSpec::FOpponent(f) => {
                let named = [
                    (NamedAttacker::MaxCarnage, FTable::monomial(1, n).ok()),
                    (NamedAttacker::MaxDisruption, FTable::monomial(2, n).ok()),
                    (NamedAttacker::Tailored, FTable::tailored(n).ok()),
                ]
                .into_iter()
                .find(|(_, table)| table.as_ref() == Some(f));
                match named {
                    Some((name, _)) => AttackerFile::Named { name },
                    None => AttackerFile::FOpponent {
                        f: f.values().iter().map(ToString::to_string).collect(),
                    },
                }
            }
        };
        Self {
            n,
            edge_cost: instance.edge_cost().to_string(),
            immunization_cost: instance.immunization_cost().to_string(),
            attacker,
        }
    }
}

impl ProfileFile {
    pub fn to_profile(&self) -> StrategyProfile {
        StrategyProfile::new(
            self.agents
                .iter()
                .map(|a| Strategy::new(a.buys.iter().copied(), a.immunized))
                .collect(),
        )
    }

    pub fn from_profile(profile: &StrategyProfile) -> Self {
        Self {
            agents: profile.strategies().iter().map(AgentEntry::from_strategy).collect(),
        }
    }
}

impl AgentEntry {
    pub fn from_strategy(s: &Strategy) -> Self {
        Self {
            buys: s.buys.iter().copied().collect(),
            immunized: s.immunized,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn load_instance(path: &Path) -> Result<GameInstance, CliError> {
    parse_json::<InstanceFile>(&read(path)?, &path.display().to_string())?.to_instance()
}

/// Loads a profile and checks it against the instance size.
pub fn load_profile(path: &Path, instance: &GameInstance) -> Result<StrategyProfile, CliError> {
    let profile = parse_json::<ProfileFile>(&read(path)?, &path.display().to_string())?.to_profile();
    profile.validate(instance.n())?;
    Ok(profile)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("plain data serializes");
    out.push('\n');
    out
}
