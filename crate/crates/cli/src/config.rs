//! Scenario configuration: TOML with flat sections.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyClass {
    Bst,
    TreeNetwork,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgName {
    #[serde(rename = "OBL")]
    Obl,
    #[serde(rename = "STAT")]
    Stat,
    #[serde(rename = "GEN")]
    Gen,
    #[serde(rename = "ON")]
    On,
    #[serde(rename = "OFF")]
    Off,
}

impl AlgName {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgName::Obl => "OBL",
            AlgName::Stat => "STAT",
            AlgName::Gen => "GEN",
            AlgName::On => "ON",
            AlgName::Off => "OFF",
        }
    }
}

impl fmt::Display for AlgName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkloadKind {
    /// Repeated-leaf BST searches; needs `k`, `r`.
    Tau,
    /// i.i.d. Zipf requests; needs `n`, `m`, `exponent`.
    Zipf,
    /// Grid communication pattern; needs `rows`, `cols`.
    Grid,
    /// Trace file; needs `path`.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialNetwork {
    Balanced,
    NearBalanced,
    Expander,
    Grid,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Embedding {
    #[default]
    Identity,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub id: String,
    pub topology: TopologyClass,
    pub algorithms: Vec<AlgName>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSection {
    pub kind: WorkloadKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialNetwork>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default)]
    pub embedding: Embedding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ego_degree_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSection {
    pub kind: String,
    pub online: AlgName,
    pub baseline: AlgName,
    pub instances: usize,
    /// Monte-Carlo seeds per generator for learning ratios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_seeds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub workload: WorkloadSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSection>,
}

/// Bundled scenarios, by id.
pub const BUNDLED: &[(&str, &str)] = &[
    ("tau-bst", include_str!("../scenarios/tau-bst.toml")),
    ("grid-vs-expander", include_str!("../scenarios/grid-vs-expander.toml")),
    ("iid-splay-static", include_str!("../scenarios/iid-splay-static.toml")),
    ("splaynet-entropy", include_str!("../scenarios/splaynet-entropy.toml")),
    ("small-dynamic", include_str!("../scenarios/small-dynamic.toml")),
    ("iid-learning", include_str!("../scenarios/iid-learning.toml")),
];

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ScenarioConfig {
    /// Parses and validates; relative trace paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if let (Some(p), Some(base)) = (cfg.workload.path.as_ref(), base) {
            let p = PathBuf::from(p);
            if p.is_relative() {
                cfg.workload.path = Some(base.join(p).to_string_lossy().into_owned());
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    pub fn bundled(id: &str) -> Result<Self, CliError> {
        let (_, text) = BUNDLED.iter().find(|(name, _)| *name == id).ok_or_else(|| {
            let names: Vec<&str> = BUNDLED.iter().map(|b| b.0).collect();
            config_err(format!("unknown scenario `{id}` (bundled: {})", names.join(", ")))
        })?;
        Self::parse(text, None)
    }

    /// Canonical TOML of the effective configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.scenario;
        if s.id.is_empty() || s.id.contains(['/', '\\', ',']) {
            return Err(config_err("scenario.id must be non-empty without `/`, `\\` or `,`"));
        }
        if s.algorithms.is_empty() {
            return Err(config_err("scenario.algorithms is empty"));
        }
        if s.seeds.is_empty() {
            return Err(config_err("scenario.seeds is empty"));
        }
        let w = &self.workload;
        fn need<T>(v: Option<T>, kind: WorkloadKind, name: &str) -> Result<(), CliError> {
            v.map(|_| ())
                .ok_or_else(|| config_err(format!("workload kind {kind:?} needs `{name}`")))
        }
        match w.kind {
            WorkloadKind::Tau => {
                need(w.k, w.kind, "k")?;
                need(w.r, w.kind, "r")?;
                if s.topology != TopologyClass::Bst {
                    return Err(config_err("tau workload runs on the bst topology"));
                }
            }
            WorkloadKind::Zipf => {
                need(w.n, w.kind, "n")?;
                need(w.m, w.kind, "m")?;
                need(w.exponent, w.kind, "exponent")?;
            }
            WorkloadKind::Grid => {
                need(w.rows, w.kind, "rows")?;
                need(w.cols, w.kind, "cols")?;
                if s.topology == TopologyClass::Bst {
                    return Err(config_err("grid workload needs a pair-addressed topology"));
                }
            }
            WorkloadKind::Trace => {
                need(w.path.as_ref(), w.kind, "path")?;
                let p = Path::new(w.path.as_ref().unwrap());
                if !p.is_file() {
                    return Err(config_err(format!("trace file {} does not exist", p.display())));
                }
            }
        }
        if s.algorithms.contains(&AlgName::Gen) && w.kind != WorkloadKind::Zipf {
            return Err(config_err("GEN needs a generator (zipf) workload"));
        }
        if let Some(init) = self.network.initial {
            let ok = match s.topology {
                TopologyClass::Bst | TopologyClass::TreeNetwork => {
                    matches!(init, InitialNetwork::Balanced | InitialNetwork::NearBalanced)
                }
                TopologyClass::Graph => matches!(
                    init,
                    InitialNetwork::Expander | InitialNetwork::Grid | InitialNetwork::Path
                ),
            };
            if !ok {
                return Err(config_err(format!(
                    "network.initial {init:?} does not fit topology {:?}",
                    s.topology
                )));
            }
        }
        if let Some(r) = &self.ratio {
            let kind: san_core::costmodel::RatioKind =
                r.kind.parse().map_err(|e: san_core::Error| config_err(e.to_string()))?;
            if r.instances == 0 {
                return Err(config_err("ratio.instances must be positive"));
            }
            if kind == san_core::costmodel::RatioKind::Learning {
                if w.kind != WorkloadKind::Zipf {
                    return Err(config_err("learning ratios need a zipf workload"));
                }
                if r.baseline != AlgName::Gen {
                    return Err(config_err("learning ratios use GEN as the baseline"));
                }
            }
        }
        Ok(())
    }
}
