//! Scenario files: TOML with a `schema = 1` header.
//!
//! ```toml
//! schema = 1
//! seed = 7
//! protocols = ["alpha", "alpha_ext"]
//! ells = [100000, 1000000]
//!
//! [channel]
//! p_m = 0.01
//! p_w = 0.2
//!
//! [requirements]
//! i_adm = 1e-30
//! ```
//!
//! The channel may instead be given as a source model `pi_a`, `pi_b`,
//! `pi_e`. Missing requirement values take the defaults `I = 1e-30` and
//! `1e-5` for every probability.

use kdp::engine::{AdversaryMode, ToyAudit};
use kdp::entropy::reduce_source_model;
use kdp::{ChannelParams, ProtocolKind, Requirements};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Bsc { p_m: f64, p_w: f64 },
    Source { pi_a: f64, pi_b: f64, pi_e: f64 },
}

impl ChannelSpec {
    pub fn params(&self) -> Result<ChannelParams, CliError> {
        let ch = match *self {
            ChannelSpec::Bsc { p_m, p_w } => ChannelParams::new(p_m, p_w),
            ChannelSpec::Source { pi_a, pi_b, pi_e } => reduce_source_model(pi_a, pi_b, pi_e),
        };
        ch.map_err(|e| CliError::Scenario(e.to_string()))
    }
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec::Bsc { p_m: 0.01, p_w: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequirementSpec {
    pub i_adm: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_risk: f64,
}

impl Default for RequirementSpec {
    fn default() -> Self {
        RequirementSpec {
            i_adm: 1e-30,
            p_e: 1e-5,
            p_f: 1e-5,
            p_d: 1e-5,
            p_risk: 1e-5,
        }
    }
}

impl RequirementSpec {
    pub fn for_ell(&self, ell: u64) -> Result<Requirements, CliError> {
        Requirements::new(ell, self.i_adm, self.p_e, self.p_f, self.p_d, self.p_risk)
            .map_err(|e| CliError::Scenario(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    pub channel: ChannelSpec,
    pub requirements: RequirementSpec,
    pub ell: u64,
    pub trials: u64,
    pub policies: Vec<AdversaryMode>,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            channel: ChannelSpec::Bsc { p_m: 0.002, p_w: 0.49 },
            requirements: RequirementSpec {
                i_adm: 1.0,
                p_e: 0.1,
                p_f: 0.05,
                p_d: 0.1,
                p_risk: 0.25,
            },
            ell: 1,
            trials: 1000,
            policies: AdversaryMode::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSpec {
    pub instances: Vec<ToyAudit>,
}

/// A one-bit key from six bits at `p_w = 0.25`, a two-bit key from eight
/// bits with two public checks, and the seed-from-strings variant.
pub fn default_audits() -> Vec<ToyAudit> {
    vec![
        ToyAudit {
            protocol: ProtocolKind::AlphaExt,
            k: 6,
            ell: 1,
            eps: 0.25,
            c: std::f64::consts::E,
            p_w: 0.25,
            checks: 0,
            seed: 1,
        },
        ToyAudit {
            protocol: ProtocolKind::AlphaExt,
            k: 8,
            ell: 2,
            eps: 0.25,
            c: std::f64::consts::E,
            p_w: 0.2,
            checks: 2,
            seed: 2,
        },
        ToyAudit {
            protocol: ProtocolKind::BetaExt,
            k: 6,
            ell: 1,
            eps: 0.25,
            c: 4.0,
            p_w: 0.3,
            checks: 1,
            seed: 3,
        },
    ]
}

impl Default for AuditSpec {
    fn default() -> Self {
        AuditSpec {
            instances: default_audits(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub seed: u64,
    pub protocols: Vec<ProtocolKind>,
    pub ells: Vec<u64>,
    pub channel: ChannelSpec,
    pub requirements: RequirementSpec,
    pub simulation: SimulationSpec,
    pub audit: AuditSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            schema: SCHEMA,
            seed: 0,
            protocols: ProtocolKind::ALL.to_vec(),
            ells: vec![1_000, 10_000, 100_000, 1_000_000],
            channel: ChannelSpec::default(),
            requirements: RequirementSpec::default(),
            simulation: SimulationSpec::default(),
            audit: AuditSpec::default(),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Header {
            schema: Option<u32>,
        }
        let head: Header = toml::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))?;
        if head.schema.is_none() {
            return Err(CliError::Scenario("missing `schema` key".into()));
        }
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Scenario(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        self.channel.params()?;
        self.simulation.channel.params()?;
        if self.ells.contains(&0) {
            return Err(CliError::Scenario("key lengths must be positive".into()));
        }
        for ell in self.ells.iter().copied().chain([1]) {
            self.requirements.for_ell(ell)?;
        }
        self.simulation.requirements.for_ell(self.simulation.ell.max(1))?;
        if self.simulation.ell == 0 {
            return Err(CliError::Scenario("simulation key length must be positive".into()));
        }
        Ok(())
    }
}
