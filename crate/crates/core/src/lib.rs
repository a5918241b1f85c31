//! Exact simulation and verification engine for the strategic network
//! formation game with attack and immunization.
//!
//! Agents buy edges (cost `C_E` each) and immunization (cost `C_I`). An
//! attacker then destroys one vulnerable region of the induced network, and
//! each agent's utility is the expected size of its surviving component minus
//! its costs. All arithmetic is exact ([`Rational`]).
//!
//! Module map:
//! - [`graph`]: components, cut-vertices, block-cut trees, centroids.
//! - [`game`]: instances, strategies, profile-to-network induction, costs.
//! - [`adversary`]: f-tables, `U_f`, targeted regions, attack distributions.
//! - [`payoff`]: post-attack connectivity, utilities and social welfare.
//! - [`equilibrium`]: best responses, Nash certificates, enumeration, dynamics.
//! - [`scenarios`]: the tailored bad equilibrium, the disruption fixture and
//!   random generators.
//! - [`properties`]: checkers for the structural lemmas with witnesses.

pub mod adversary;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod graph;
pub mod payoff;
pub mod properties;
pub mod rational;
pub mod scenarios;

pub use adversary::{AttackDistribution, AttackerSpec, FTable, SqdReport};
pub use equilibrium::{
    AgentOrder, BestResponse, DeviationClass, DynamicsTrace, EquilibriumCertificate, SolverConfig,
};
pub use error::{Error, Result};
pub use game::{GameInstance, InducedNetwork, Strategy, StrategyProfile};
pub use graph::{BlockCutTree, ComponentPartition, Graph, NodeId, NodeSet};
pub use payoff::{UtilityReport, WelfareReport};
pub use rational::Rational;
pub use scenarios::ScenarioBundle;
