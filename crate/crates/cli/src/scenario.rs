//! Turns a configuration and a seed into a trace plus an initial topology.

use san_core::bst::{build_balanced, build_near_balanced};
use san_core::costmodel::{Algorithm, Topology};
use san_core::demand::{
    make_tau_workload, Addressing, CommRequest, DemandGraph, DemandSequence, Generator,
};
use san_core::io::read_trace;
use san_core::topo::{build_random_regular, random_permutation, Network};

use crate::config::{
    AlgName, Embedding, InitialNetwork, ScenarioConfig, TopologyClass, WorkloadKind,
};
use crate::CliError;

const DEFAULT_DEGREE: usize = 3;

/// Everything one (seed) needs to run any algorithm of the scenario.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub seq: DemandSequence,
    pub topology: Topology,
    pub generator: Option<Generator>,
}

impl Instance {
    pub fn algorithm(&self, name: AlgName) -> Result<Algorithm, CliError> {
        Ok(match name {
            AlgName::Obl => Algorithm::Oblivious,
            AlgName::Stat => Algorithm::Static,
            AlgName::On => Algorithm::Online,
            AlgName::Off => Algorithm::Offline,
            AlgName::Gen => Algorithm::Generator(
                self.generator
                    .clone()
                    .ok_or_else(|| CliError::Config("GEN needs a generator workload".into()))?,
            ),
        })
    }
}

fn addressing(cfg: &ScenarioConfig) -> Addressing {
    match cfg.scenario.topology {
        TopologyClass::Bst => Addressing::Search,
        _ => Addressing::Pairs,
    }
}

/// Zipf generator of the workload; `shape_offset` shifts the popularity
/// shuffle (used to make distinct generators for learning ratios).
pub fn generator(cfg: &ScenarioConfig, shape_offset: u64, seed: u64) -> Result<Generator, CliError> {
    let w = &cfg.workload;
    if w.kind != WorkloadKind::Zipf {
        return Err(CliError::Config("workload is not a generator".into()));
    }
    let (n, e) = (w.n.unwrap(), w.exponent.unwrap());
    let shape = w.shape_seed.unwrap_or(0).wrapping_add(shape_offset);
    Ok(match addressing(cfg) {
        Addressing::Search => Generator::zipf_searches(n, e, shape, seed)?,
        Addressing::Pairs => Generator::zipf_pairs(n, e, shape, seed)?,
    })
}

fn embed(seq: &DemandSequence, seed: u64) -> Result<DemandSequence, CliError> {
    let perm = random_permutation(seq.n(), seed);
    let requests = seq
        .requests()
        .iter()
        .map(|r| CommRequest::new(perm[r.src], perm[r.dst]))
        .collect();
    Ok(DemandSequence::new(seq.n(), seq.addressing(), requests)?)
}

pub fn trace(cfg: &ScenarioConfig, seed: u64) -> Result<(DemandSequence, Option<Generator>), CliError> {
    let w = &cfg.workload;
    let (seq, gen) = match w.kind {
        WorkloadKind::Tau => (make_tau_workload(w.k.unwrap(), w.r.unwrap())?, None),
        WorkloadKind::Zipf => {
            let g = generator(cfg, 0, seed)?;
            (g.sample(w.m.unwrap())?, Some(g))
        }
        WorkloadKind::Grid => {
            let g = DemandGraph::grid(w.rows.unwrap(), w.cols.unwrap(), 1)?;
            (g.to_trace(w.passes.unwrap_or(1))?, None)
        }
        WorkloadKind::Trace => {
            let path = w.path.as_ref().unwrap();
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
            let seq = read_trace(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
            (seq, None)
        }
    };
    if seq.addressing() != addressing(cfg) {
        return Err(CliError::Config(format!(
            "{:?} trace does not fit topology {:?}",
            seq.addressing(),
            cfg.scenario.topology
        )));
    }
    let seq = match (cfg.network.embedding, seq.addressing()) {
        (Embedding::Random, Addressing::Pairs) => embed(&seq, seed)?,
        (Embedding::Random, Addressing::Search) => {
            return Err(CliError::Config("random embedding needs pair-addressed traces".into()))
        }
        _ => seq,
    };
    Ok((seq, gen))
}

pub fn topology(cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<Topology, CliError> {
    let net = &cfg.network;
    Ok(match cfg.scenario.topology {
        TopologyClass::Bst | TopologyClass::TreeNetwork => {
            let tree = match net.initial.unwrap_or(InitialNetwork::NearBalanced) {
                InitialNetwork::Balanced => build_balanced(n)?,
                _ => build_near_balanced(n),
            };
            if cfg.scenario.topology == TopologyClass::Bst {
                Topology::Bst(tree)
            } else {
                Topology::TreeNetwork(tree)
            }
        }
        TopologyClass::Graph => Topology::Graph(match net.initial.unwrap_or(InitialNetwork::Expander) {
            InitialNetwork::Expander => {
                build_random_regular(n, net.degree.unwrap_or(DEFAULT_DEGREE), seed)?
            }
            InitialNetwork::Grid => {
                let w = &cfg.workload;
                match (w.rows, w.cols) {
                    (Some(r), Some(c)) => Network::grid(r, c)?,
                    _ => return Err(CliError::Config("grid network needs workload rows/cols".into())),
                }
            }
            _ => Network::path(n)?,
        }),
    })
}

pub fn instance(cfg: &ScenarioConfig, seed: u64) -> Result<Instance, CliError> {
    let (seq, generator) = trace(cfg, seed)?;
    let topology = topology(cfg, seq.n(), seed)?;
    Ok(Instance {
        seed,
        seq,
        topology,
        generator,
    })
}
