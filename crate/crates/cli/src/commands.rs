use std::path::{Path, PathBuf};

use rayon::prelude::*;

use san_core::bst::{build_optimal, KeyWeights};
use san_core::costmodel::{
    evaluate_learning, evaluate_ratio, run_algorithm, Algorithm, CostLedger, RatioKind,
    RatioReport, Topology, LEARNING_MIN_SEEDS,
};
use san_core::demand::{build_demand_graph, DemandSequence};
use san_core::entropy::{graph_entropies, sequence_entropies, EntropyReport};
use san_core::io::{is_trace, read_graph, read_trace, write_graph, write_network, write_trace};
use san_core::topo::{build_ego_tree_network, Network};

use crate::config::{AlgName, RatioSection, ScenarioConfig};
use crate::output::{metadata, write_atomic};
use crate::scenario::{self, Instance};
use crate::{CliError, VERSION};

pub const WORKERS_ENV: &str = "SAN_WORKBENCH_WORKERS";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            out_dir: out_dir.into(),
            workers: None,
        }
    }

    /// `--out-dir` wins, then `scenario.out_dir`, then `out/<scenario id>`.
    pub fn resolve(out_dir: Option<PathBuf>, workers: Option<usize>, cfg: &ScenarioConfig) -> Self {
        let out_dir = out_dir
            .or_else(|| cfg.scenario.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| Path::new("out").join(&cfg.scenario.id));
        RunOptions { out_dir, workers }
    }
}

/// The environment variable, when set, overrides the flag.
pub fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => match flag {
            Some(0) => Err(CliError::Config("--workers must be positive".into())),
            other => Ok(other),
        },
    }
}

fn in_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(f),
    }
}

/// Replaces the seed list with a single seed.
pub fn with_seed(cfg: &ScenarioConfig, seed: Option<u64>) -> ScenarioConfig {
    let mut cfg = cfg.clone();
    if let Some(s) = seed {
        cfg.scenario.seeds = vec![s];
    }
    cfg
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: AlgName,
    pub seed: u64,
    pub m: usize,
    pub service: u64,
    pub adjust: u64,
    pub total: u64,
    pub amortized: f64,
    pub entropy: EntropyReport,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str = "scenario,algorithm,seed,n,m,service,adjust,total,amortized,H_pair,H_src,H_dst,H_dst_given_src,H_src_given_dst";

    fn csv_row(&self, scenario: &str) -> String {
        let e = &self.entropy;
        format!(
            "{scenario},{},{},{},{},{},{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            self.algorithm,
            self.seed,
            e.n,
            self.m,
            self.service,
            self.adjust,
            self.total,
            self.amortized,
            e.entropy_bits,
            e.source_entropy_bits,
            e.dest_entropy_bits,
            e.conditional_yx_bits,
            e.conditional_xy_bits
        )
    }
}

fn check_ledger(alg: &Algorithm, seq: &DemandSequence, l: &CostLedger) -> Result<(), CliError> {
    if l.len() != seq.len() {
        return Err(CliError::Invariant(format!(
            "{} ledger has {} entries for {} requests",
            alg.label(),
            l.len(),
            seq.len()
        )));
    }
    if l.total() != l.service_total() + l.adjust_total() {
        return Err(CliError::Invariant(format!("{} ledger totals do not add up", alg.label())));
    }
    let fixed = matches!(alg, Algorithm::Oblivious | Algorithm::Static | Algorithm::Generator(_));
    if fixed && l.adjust_total() != 0 {
        return Err(CliError::Invariant(format!("{} recorded adjustment cost", alg.label())));
    }
    Ok(())
}

fn instances(cfg: &ScenarioConfig) -> Result<Vec<Instance>, CliError> {
    cfg.scenario
        .seeds
        .par_iter()
        .map(|&s| scenario::instance(cfg, s))
        .collect()
}

/// Runs every (algorithm, seed) pair: one ledger CSV each plus
/// `summary.csv`. Rows come back seed-major in configuration order.
pub fn cmd_run(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<SummaryRow>, CliError> {
    in_pool(opts.workers, || {
        let insts = instances(cfg)?;
        let jobs: Vec<(&Instance, AlgName)> = insts
            .iter()
            .flat_map(|i| cfg.scenario.algorithms.iter().map(move |&a| (i, a)))
            .collect();
        let entropies = insts
            .par_iter()
            .map(|i| sequence_entropies(&i.seq).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = jobs
            .par_iter()
            .map(|&(inst, name)| {
                let alg = inst.algorithm(name)?;
                let ledger = run_algorithm(&alg, &inst.topology, &inst.seq)?;
                check_ledger(&alg, &inst.seq, &ledger)?;
                let path = opts.out_dir.join(format!("ledger_{name}_seed{}.csv", inst.seed));
                let text = format!(
                    "{}# algorithm={name}\n{}",
                    metadata(cfg, Some(inst.seed)),
                    ledger.to_csv()
                );
                write_atomic(&path, &text)?;
                let k = insts.iter().position(|i| i.seed == inst.seed).unwrap();
                Ok(SummaryRow {
                    algorithm: name,
                    seed: inst.seed,
                    m: inst.seq.len(),
                    service: ledger.service_total(),
                    adjust: ledger.adjust_total(),
                    total: ledger.total(),
                    amortized: ledger.average(),
                    entropy: entropies[k],
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut text = metadata(cfg, None);
        text.push_str(SummaryRow::CSV_HEADER);
        text.push('\n');
        for r in &rows {
            text.push_str(&r.csv_row(&cfg.scenario.id));
            text.push('\n');
        }
        write_atomic(&opts.out_dir.join("summary.csv"), &text)?;
        Ok(rows)
    })
}

fn default_ratio(kind: RatioKind, cfg: &ScenarioConfig) -> RatioSection {
    RatioSection {
        kind: kind.as_str().into(),
        online: AlgName::On,
        baseline: match kind {
            RatioKind::Static => AlgName::Stat,
            RatioKind::Dynamic => AlgName::Off,
            RatioKind::Learning => AlgName::Gen,
        },
        instances: cfg.scenario.seeds.len(),
        mc_seeds: None,
    }
}

/// Evaluates the ratio named by `kind` (or by the `[ratio]` section) and
/// writes `ratio_<kind>.csv`. Instance `i` uses seed `seeds[0] + i`.
pub fn cmd_ratio(
    cfg: &ScenarioConfig,
    kind: Option<RatioKind>,
    opts: &RunOptions,
) -> Result<RatioReport, CliError> {
    let mut cfg = cfg.clone();
    let kind = match (kind, cfg.ratio.clone()) {
        (Some(k), Some(r)) if r.kind != k.as_str() => {
            cfg.ratio = Some(RatioSection {
                instances: r.instances,
                mc_seeds: r.mc_seeds,
                ..default_ratio(k, &cfg)
            });
            k
        }
        (Some(k), Some(_)) => k,
        (Some(k), None) => {
            cfg.ratio = Some(default_ratio(k, &cfg));
            k
        }
        (None, Some(r)) => r.kind.parse()?,
        (None, None) => {
            return Err(CliError::Config("no ratio kind given and no [ratio] section".into()))
        }
    };
    cfg.validate()?;
    let cfg = cfg;
    let r = cfg.ratio.clone().unwrap();
    let base = cfg.scenario.seeds[0];
    let report = in_pool(opts.workers, || {
        let probe = scenario::instance(&cfg, base)?;
        let online = probe.algorithm(r.online)?;
        if kind == RatioKind::Learning {
            let gens = (0..r.instances as u64)
                .map(|i| scenario::generator(&cfg, i, base))
                .collect::<Result<Vec<_>, _>>()?;
            let mc = r.mc_seeds.unwrap_or(LEARNING_MIN_SEEDS);
            let seeds: Vec<u64> = (0..mc as u64).map(|i| base.wrapping_add(i)).collect();
            let m = cfg.workload.m.unwrap();
            return Ok(evaluate_learning(&online, &probe.topology, &gens, m, &seeds, &cfg.scenario.id, base)?);
        }
        if r.baseline == AlgName::Gen {
            return Err(CliError::Config("GEN baselines belong to learning ratios".into()));
        }
        let traces = (0..r.instances as u64)
            .into_par_iter()
            .map(|i| Ok(scenario::trace(&cfg, base.wrapping_add(i))?.0))
            .collect::<Result<Vec<_>, CliError>>()?;
        let baseline = probe.algorithm(r.baseline)?;
        Ok(evaluate_ratio(kind, &online, &baseline, &probe.topology, &traces, &cfg.scenario.id, base)?)
    })?;
    let mut text = metadata(&cfg, Some(base));
    text.push_str(&format!("# online={} baseline={}\n", r.online, r.baseline));
    text.push_str(RatioReport::CSV_HEADER);
    text.push('\n');
    for row in report.csv_rows() {
        text.push_str(&row);
        text.push('\n');
    }
    write_atomic(&opts.out_dir.join(format!("ratio_{}.csv", kind.as_str())), &text)?;
    Ok(report)
}

/// Entropy report of a trace or demand-graph file. The CSV goes to
/// `out` when given; the text is returned either way.
pub fn cmd_entropy(path: &Path, out: Option<&Path>) -> Result<(EntropyReport, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let parse = |e: san_core::Error| CliError::Config(format!("{}: {e}", path.display()));
    let report = if is_trace(&text) {
        sequence_entropies(&read_trace(&text).map_err(parse)?).map_err(parse)?
    } else {
        graph_entropies(&read_graph(&text).map_err(parse)?).map_err(parse)?
    };
    let csv = format!(
        "# san-workbench {VERSION}\n# source={}\n{}\n{}\n",
        path.display(),
        EntropyReport::CSV_HEADER,
        report.csv_row()
    );
    if let Some(dir) = out {
        write_atomic(&dir.join("entropy.csv"), &csv)?;
    }
    Ok((report, csv))
}

/// Writes `trace_seed<s>.txt` and its demand graph `graph_seed<s>.txt`.
pub fn cmd_gen_trace(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    in_pool(opts.workers, || {
        let files = cfg
            .scenario
            .seeds
            .par_iter()
            .map(|&s| {
                let (seq, _) = scenario::trace(cfg, s)?;
                let head = metadata(cfg, Some(s));
                let g = build_demand_graph(&seq)?;
                Ok(vec![
                    write_atomic(
                        &opts.out_dir.join(format!("trace_seed{s}.txt")),
                        &format!("{head}{}", write_trace(&seq)),
                    )?,
                    write_atomic(
                        &opts.out_dir.join(format!("graph_seed{s}.txt")),
                        &format!("{head}{}", write_graph(&g)),
                    )?,
                ])
            })
            .collect::<Result<Vec<Vec<PathBuf>>, CliError>>()?;
        Ok(files.concat())
    })
}

/// Writes the initial network of each seed, its tree dump for tree
/// classes, and the demand-aware counterpart: the optimal BST for search
/// traces, the ego-tree network for general graphs.
pub fn cmd_export_net(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    in_pool(opts.workers, || {
        let files = cfg
            .scenario
            .seeds
            .par_iter()
            .map(|&s| {
                let inst = scenario::instance(cfg, s)?;
                let head = metadata(cfg, Some(s));
                let file = |name: &str, body: String| {
                    write_atomic(&opts.out_dir.join(format!("{name}_seed{s}.txt")), &format!("{head}{body}"))
                };
                let mut out = Vec::new();
                match &inst.topology {
                    Topology::Bst(t) | Topology::TreeNetwork(t) => {
                        out.push(file("network", write_network(&Network::from_tree(t)))?);
                        out.push(file("tree", t.dump())?);
                        if matches!(inst.topology, Topology::Bst(_)) {
                            let opt = build_optimal(&KeyWeights::from_sequence(&inst.seq)?);
                            out.push(file("tree_static", opt.dump())?);
                        }
                    }
                    Topology::Graph(net) => {
                        out.push(file("network", write_network(net))?);
                        let g = build_demand_graph(&inst.seq)?;
                        let ego = build_ego_tree_network(&g, cfg.network.ego_degree_cap)?;
                        out.push(file("ego", write_network(&ego.network))?);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<Vec<PathBuf>>, CliError>>()?;
        Ok(files.concat())
    })
}
