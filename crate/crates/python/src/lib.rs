//! Python bindings: traces, generators, entropy, BSTs, networks, oracles,
//! ratios and the scenario runner.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use san_core::bst::{
    build_balanced, build_near_balanced, build_optimal, build_weight_balanced, serve_sequence,
    splay_access, BstTree, KeyWeights, Policy,
};
use san_core::costmodel::{
    evaluate_ratio, off_oracle, run_algorithm, stat_oracle, Algorithm, CostLedger, RatioKind,
    RatioReport, StaticClass, Topology,
};
use san_core::demand::{make_tau_workload, Addressing, CommRequest, DemandGraph, DemandSequence, Generator};
use san_core::entropy::{conditional_entropy, graph_entropies, sequence_entropies, EntropyReport};
use san_core::io;
use san_core::topo::{
    avg_route_length, build_ego_tree_network, build_random_regular, random_permutation, Network,
    SelfAdjustingTree,
};
use san_workbench::{CliError, RunOptions, ScenarioConfig};

fn err(e: san_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "DemandSequence", module = "san_workbench_py", frozen, from_py_object)]
#[derive(Clone)]
struct PySequence(DemandSequence);

#[pymethods]
impl PySequence {
    #[staticmethod]
    fn pairs(n: usize, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        DemandSequence::pairs(n, pairs).map(Self).map_err(err)
    }

    /// Root-originated searches for keys `1..=n`.
    #[staticmethod]
    fn searches(n: usize, keys: Vec<usize>) -> PyResult<Self> {
        DemandSequence::searches(n, keys).map(Self).map_err(err)
    }

    #[staticmethod]
    fn tau(k: u32, r: usize) -> PyResult<Self> {
        make_tau_workload(k, r).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        io::read_trace(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        io::write_trace(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn is_search(&self) -> bool {
        self.0.addressing() == Addressing::Search
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn requests(&self) -> Vec<(usize, usize)> {
        self.0.requests().iter().map(|r| (r.src, r.dst)).collect()
    }

    /// Demand graph as `{(src, dst): count}`.
    fn demand_graph(&self) -> PyResult<BTreeMap<(usize, usize), f64>> {
        let g = DemandGraph::from_sequence(&self.0).map_err(err)?;
        Ok(g.edges().map(|(s, d, w)| ((s, d), w)).collect())
    }

    fn __repr__(&self) -> String {
        format!("DemandSequence(n={}, m={}, search={})", self.0.n(), self.0.len(), self.is_search())
    }
}

#[pyclass(name = "Generator", module = "san_workbench_py", frozen)]
struct PyGenerator(Generator);

#[pymethods]
impl PyGenerator {
    #[staticmethod]
    #[pyo3(signature = (n, exponent, shape_seed=0, seed=0))]
    fn zipf_searches(n: usize, exponent: f64, shape_seed: u64, seed: u64) -> PyResult<Self> {
        Generator::zipf_searches(n, exponent, shape_seed, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, exponent, shape_seed=0, seed=0))]
    fn zipf_pairs(n: usize, exponent: f64, shape_seed: u64, seed: u64) -> PyResult<Self> {
        Generator::zipf_pairs(n, exponent, shape_seed, seed).map(Self).map_err(err)
    }

    /// Markov chain over source/destination pairs.
    #[staticmethod]
    #[pyo3(signature = (n, states, initial, transition, seed=0))]
    fn markov(
        n: usize,
        states: Vec<(usize, usize)>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        seed: u64,
    ) -> PyResult<Self> {
        let states = states.into_iter().map(|(s, d)| CommRequest::new(s, d)).collect();
        Generator::markov(n, Addressing::Pairs, states, initial, transition, seed)
            .map(Self)
            .map_err(err)
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self(self.0.with_seed(seed))
    }

    fn sample(&self, m: usize) -> PyResult<PySequence> {
        self.0.sample(m).map(PySequence).map_err(err)
    }

    fn distribution(&self) -> Vec<((usize, usize), f64)> {
        self.0
            .request_distribution()
            .into_iter()
            .map(|(r, p)| ((r.src, r.dst), p))
            .collect()
    }
}

fn report_dict(r: &EntropyReport) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("n", r.n as f64),
        ("m", r.m),
        ("H_pair", r.entropy_bits),
        ("H_src", r.source_entropy_bits),
        ("H_dst", r.dest_entropy_bits),
        ("H_dst_given_src", r.conditional_yx_bits),
        ("H_src_given_dst", r.conditional_xy_bits),
    ])
}

fn graph_from(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<DemandGraph> {
    let mut g = DemandGraph::empty(n);
    for (s, d, w) in edges {
        g.add(s, d, w).map_err(err)?;
    }
    Ok(g)
}

#[pyfunction]
fn entropy(seq: &PySequence) -> PyResult<BTreeMap<&'static str, f64>> {
    sequence_entropies(&seq.0).map(|r| report_dict(&r)).map_err(err)
}

#[pyfunction]
fn graph_entropy(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<BTreeMap<&'static str, f64>> {
    graph_entropies(&graph_from(n, edges)?).map(|r| report_dict(&r)).map_err(err)
}

/// H(Y|X) of the `side x side` grid pattern.
#[pyfunction]
fn grid_conditional_entropy(side: usize) -> PyResult<f64> {
    let g = DemandGraph::grid(side, side, 1).map_err(err)?;
    conditional_entropy(&g).map_err(err)
}

#[pyclass(name = "CostLedger", module = "san_workbench_py", frozen)]
struct PyLedger(CostLedger);

#[pymethods]
impl PyLedger {
    #[getter]
    fn service(&self) -> Vec<u64> {
        self.0.charges().iter().map(|c| c.service).collect()
    }

    #[getter]
    fn adjust(&self) -> Vec<u64> {
        self.0.charges().iter().map(|c| c.adjust).collect()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.0.total()
    }

    #[getter]
    fn average(&self) -> f64 {
        self.0.average()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

fn weights(w: Vec<f64>) -> PyResult<KeyWeights> {
    let n = w.len();
    let pairs: Vec<(usize, f64)> = w.into_iter().enumerate().filter(|p| p.1 > 0.0).map(|(i, x)| (i + 1, x)).collect();
    KeyWeights::new(n, pairs).map_err(err)
}

#[pyclass(name = "BstTree", module = "san_workbench_py", skip_from_py_object)]
#[derive(Clone)]
struct PyTree(BstTree);

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn balanced(n: usize) -> PyResult<Self> {
        build_balanced(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn near_balanced(n: usize) -> Self {
        Self(build_near_balanced(n))
    }

    /// Optimal tree for access weights of keys `1..=len(w)`.
    #[staticmethod]
    fn optimal(w: Vec<f64>) -> PyResult<Self> {
        Ok(Self(build_optimal(&weights(w)?)))
    }

    #[staticmethod]
    fn weight_balanced(w: Vec<f64>) -> PyResult<Self> {
        Ok(Self(build_weight_balanced(&weights(w)?)))
    }

    #[staticmethod]
    fn from_dump(text: &str) -> PyResult<Self> {
        BstTree::from_dump(text).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn root(&self) -> usize {
        self.0.root()
    }

    fn depth(&self, key: usize) -> PyResult<usize> {
        self.0.depth(key).map_err(err)
    }

    fn distance(&self, a: usize, b: usize) -> PyResult<usize> {
        self.0.distance(a, b).map_err(err)
    }

    fn in_order(&self) -> Vec<usize> {
        self.0.in_order()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges()
    }

    fn expected_cost(&self, w: Vec<f64>) -> PyResult<f64> {
        self.0.expected_cost(&weights(w)?).map_err(err)
    }

    /// Splays `key` to the root; returns `(service, rotations)`.
    fn splay(&mut self, key: usize) -> PyResult<(u64, u64)> {
        let a = splay_access(&mut self.0, key).map_err(err)?;
        Ok((a.service_cost, a.rotations))
    }

    /// Serves `keys` in place, splaying when `splay` is true.
    #[pyo3(signature = (keys, splay=true))]
    fn serve(&mut self, keys: Vec<usize>, splay: bool) -> PyResult<PyLedger> {
        let policy = if splay { Policy::Splay } else { Policy::Fixed };
        serve_sequence(&mut self.0, policy, &keys).map(PyLedger).map_err(err)
    }

    fn dump(&self) -> String {
        self.0.dump()
    }

    fn __repr__(&self) -> String {
        format!("BstTree(n={}, root={})", self.0.n(), self.0.root())
    }
}

#[pyclass(name = "Network", module = "san_workbench_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork(Network);

#[pymethods]
impl PyNetwork {
    #[staticmethod]
    #[pyo3(signature = (n, degree=3, seed=0))]
    fn random_regular(n: usize, degree: usize, seed: u64) -> PyResult<Self> {
        build_random_regular(n, degree, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    fn grid(rows: usize, cols: usize) -> PyResult<Self> {
        Network::grid(rows, cols).map(Self).map_err(err)
    }

    /// Tree network of a BST: key `k` becomes node `k - 1`.
    #[staticmethod]
    fn from_tree(tree: &PyTree) -> Self {
        Self(Network::from_tree(&tree.0))
    }

    /// Union of per-source ego-trees for the demand `edges`.
    #[staticmethod]
    #[pyo3(signature = (n, edges, degree_cap=None))]
    fn ego_tree(n: usize, edges: Vec<(usize, usize, f64)>, degree_cap: Option<usize>) -> PyResult<Self> {
        let ego = build_ego_tree_network(&graph_from(n, edges)?, degree_cap).map_err(err)?;
        Ok(Self(ego.network))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges()
    }

    fn max_degree(&self) -> usize {
        self.0.max_degree()
    }

    fn diameter(&self) -> usize {
        self.0.diameter()
    }

    /// Demand-weighted mean shortest-path length.
    fn avg_route_length(&self, edges: Vec<(usize, usize, f64)>) -> PyResult<f64> {
        avg_route_length(&self.0, &graph_from(self.0.n(), edges)?).map_err(err)
    }

    fn to_text(&self) -> String {
        io::write_network(&self.0)
    }
}

#[pyclass(name = "SelfAdjustingTree", module = "san_workbench_py")]
struct PySat(SelfAdjustingTree);

#[pymethods]
impl PySat {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        SelfAdjustingTree::new(n).map(Self).map_err(err)
    }

    /// Routes `src -> dst` and adjusts; returns `(hops, rotations)`.
    fn route(&mut self, src: usize, dst: usize) -> PyResult<(u64, u64)> {
        let a = self.0.route_and_adjust(CommRequest::new(src, dst)).map_err(err)?;
        Ok((a.service_cost, a.rotations))
    }

    fn tree(&self) -> PyTree {
        PyTree(self.0.tree().clone())
    }
}

#[pyfunction]
fn random_embedding(n: usize, seed: u64) -> Vec<usize> {
    random_permutation(n, seed)
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    Ok(match name {
        "OBL" => Algorithm::Oblivious,
        "STAT" => Algorithm::Static,
        "ON" => Algorithm::Online,
        "OFF" => Algorithm::Offline,
        other => return Err(PyValueError::new_err(format!("unknown algorithm `{other}`"))),
    })
}

/// Initial topology: a tree (searches, or pairs with `tree_network`) or a
/// general network.
fn topology(tree: Option<&PyTree>, network: Option<&PyNetwork>, tree_network: bool) -> PyResult<Topology> {
    match (tree, network) {
        (Some(t), None) if tree_network => Ok(Topology::TreeNetwork(t.0.clone())),
        (Some(t), None) => Ok(Topology::Bst(t.0.clone())),
        (None, Some(n)) => Ok(Topology::Graph(n.0.clone())),
        _ => Err(PyValueError::new_err("pass exactly one of tree= or network=")),
    }
}

#[pyfunction]
#[pyo3(signature = (alg, seq, tree=None, network=None, tree_network=false))]
fn run(
    alg: &str,
    seq: &PySequence,
    tree: Option<PyRef<'_, PyTree>>,
    network: Option<PyRef<'_, PyNetwork>>,
    tree_network: bool,
) -> PyResult<PyLedger> {
    let n0 = topology(tree.as_deref(), network.as_deref(), tree_network)?;
    run_algorithm(&algorithm(alg)?, &n0, &seq.0).map(PyLedger).map_err(err)
}

/// Best fixed tree; returns `(cost, tree)`.
#[pyfunction]
#[pyo3(signature = (seq, tree_network=false))]
fn static_optimum(seq: &PySequence, tree_network: bool) -> PyResult<(u64, PyTree)> {
    let class = if tree_network { StaticClass::TreeNetwork } else { StaticClass::Bst };
    let o = stat_oracle(&seq.0, class).map_err(err)?;
    Ok((o.cost, PyTree(o.tree)))
}

/// Optimal offline schedule cost; `start=None` lets it choose the first tree.
#[pyfunction]
#[pyo3(signature = (seq, start=None))]
fn offline_optimum(seq: &PySequence, start: Option<PyRef<'_, PyTree>>) -> PyResult<u64> {
    off_oracle(&seq.0, start.as_deref().map(|t| &t.0)).map(|o| o.cost).map_err(err)
}

fn ratio_dict(r: &RatioReport) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("rho", r.rho),
        ("beta", r.beta),
        ("numerator", r.numerator_cost),
        ("denominator", r.denominator_cost),
        ("m", r.m as f64),
        ("n", r.n as f64),
    ])
}

/// Worst-case ratio of `online` against `baseline` over `instances`.
#[pyfunction]
#[pyo3(signature = (kind, online, baseline, instances, tree=None, network=None, tree_network=false))]
fn ratio(
    kind: &str,
    online: &str,
    baseline: &str,
    instances: Vec<PySequence>,
    tree: Option<PyRef<'_, PyTree>>,
    network: Option<PyRef<'_, PyNetwork>>,
    tree_network: bool,
) -> PyResult<BTreeMap<&'static str, f64>> {
    let kind: RatioKind = kind.parse().map_err(err)?;
    let n0 = topology(tree.as_deref(), network.as_deref(), tree_network)?;
    let seqs: Vec<DemandSequence> = instances.into_iter().map(|s| s.0).collect();
    let r = evaluate_ratio(kind, &algorithm(online)?, &algorithm(baseline)?, &n0, &seqs, "python", 0)
        .map_err(err)?;
    Ok(ratio_dict(&r))
}

#[pyfunction]
fn bundled_scenarios() -> Vec<&'static str> {
    san_workbench::config::BUNDLED.iter().map(|b| b.0).collect()
}

/// Runs a bundled scenario (or a TOML file when `config` is a path) and
/// returns one `(algorithm, seed, amortized)` row per ledger.
#[pyfunction]
#[pyo3(signature = (scenario, out_dir, seed=None, workers=None))]
fn run_scenario(
    scenario: &str,
    out_dir: PathBuf,
    seed: Option<u64>,
    workers: Option<usize>,
) -> PyResult<Vec<(String, u64, f64)>> {
    let path = PathBuf::from(scenario);
    let cfg = if path.is_file() {
        ScenarioConfig::load(&path)
    } else {
        ScenarioConfig::bundled(scenario)
    }
    .map_err(cli_err)?;
    let cfg = san_workbench::commands::with_seed(&cfg, seed);
    let opts = RunOptions { out_dir, workers };
    let rows = san_workbench::cmd_run(&cfg, &opts).map_err(cli_err)?;
    Ok(rows.into_iter().map(|r| (r.algorithm.to_string(), r.seed, r.amortized)).collect())
}

#[pymodule]
fn san_workbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyGenerator>()?;
    m.add_class::<PyLedger>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PySat>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(graph_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(grid_conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(random_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(static_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(offline_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
