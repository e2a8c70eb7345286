use std::path::Path;
use std::process::{Command, Output};

use san_core::bst::BstTree;
use san_core::demand::{make_grid_demand, make_star_demand};
use san_core::io::{read_graph, read_network, read_trace, write_graph};
use san_core::topo::Family;
use san_workbench::{CliError, EXIT_CONFIG, EXIT_INVARIANT};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_san-workbench"));
    c.env_remove("SAN_WORKBENCH_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value of `column` in the first data row of a CSV with `#` metadata.
fn csv_field(text: &str, column: &str) -> String {
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let row: Vec<&str> = rows.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn entropy_of_single_pair_trace_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.txt", "n=4 m=3\n0 1\n0 1\n0 1\n");
    let o = run(&["entropy", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    for col in ["H_pair", "H_src", "H_dst", "H_dst_given_src", "H_src_given_dst"] {
        assert_eq!(csv_field(&stdout(&o), col).parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn entropy_of_grid_and_star_files() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.txt", &write_graph(&make_grid_demand(4, 1).unwrap()));
    let o = run(&["entropy", &grid, "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let h: f64 = csv_field(&stdout(&o), "H_dst_given_src").parse().unwrap();
    assert!((h - 1.625815).abs() < 1e-6);
    assert!(dir.path().join("entropy.csv").is_file());

    let star = write(dir.path(), "star.txt", &write_graph(&make_star_demand(9, &[1.0; 8]).unwrap()));
    let o = run(&["entropy", &star]);
    let h: f64 = csv_field(&stdout(&o), "H_dst").parse().unwrap();
    assert!((h - 3.0).abs() < 1e-12);
}

#[test]
fn malformed_input_reports_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.txt", "n=4 m=2\n0 1\n0 x\n");
    let o = run(&["entropy", &p]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let g = write(dir.path(), "bad_graph.txt", "n=3\n0 1 1\n1 2\n");
    let o = run(&["entropy", &g]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn config_errors_exit_2() {
    let o = run(&["run", "--scenario", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("tau-bst"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[scenario]\nid = \"x\"\ntopology = \"bst\"\nalgorithms = [\"ON\"]\nseeds = [0]\n\n[workload]\nkind = \"tau\"\nk = 3\n");
    let o = run(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("`r`"));

    let cfg = write(dir.path(), "d.toml", "[scenario]\nid = \"x\"\nbogus = 1\n");
    assert_eq!(run(&["run", "--config", &cfg]).status.code(), Some(EXIT_CONFIG));

    assert_eq!(run(&["run"]).status.code(), Some(EXIT_CONFIG));
}

#[test]
fn invariant_breaches_map_to_exit_3() {
    let e: CliError = san_core::Error::ConstraintBreach("degree".into()).into();
    assert_eq!(e.exit_code(), EXIT_INVARIANT);
    let e: CliError = san_core::Error::Disconnected { src: 0, dst: 1 }.into();
    assert_eq!(e.exit_code(), EXIT_INVARIANT);
    let e: CliError = san_core::Error::EmptyDemand.into();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
}

#[test]
fn run_writes_ledgers_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["run", "--scenario", "tau-bst", "--out-dir", out, "--workers", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("# san-workbench "));
    assert!(summary.contains("# prng=chacha8/rand_chacha-0.3"));
    assert!(summary.contains("# config:"));
    assert!(summary.contains(",OBL,0,1023,10000,100000,0,100000,10.000000000,"));
    for alg in ["OBL", "STAT", "ON"] {
        let l = std::fs::read_to_string(dir.path().join(format!("ledger_{alg}_seed0.csv"))).unwrap();
        assert!(l.contains("# seed=0"));
        assert!(l.contains("request_index,service,adjust,cumulative"));
        assert_eq!(l.lines().filter(|x| !x.starts_with('#')).count(), 10_001);
    }
}

#[test]
fn seed_flag_replaces_seed_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["run", "--scenario", "small-dynamic", "--seed", "9", "--out-dir", out]);
    assert!(o.status.success());
    assert!(dir.path().join("ledger_OFF_seed9.csv").is_file());
    assert!(!dir.path().join("ledger_OFF_seed0.csv").exists());
}

#[test]
fn workers_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = bin()
        .env("SAN_WORKBENCH_WORKERS", "1")
        .args(["run", "--scenario", "small-dynamic", "--workers", "0", "--out-dir", out])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", stderr(&ok));
    let bad = bin()
        .env("SAN_WORKBENCH_WORKERS", "many")
        .args(["run", "--scenario", "small-dynamic", "--workers", "2", "--out-dir", out])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&bad).contains("SAN_WORKBENCH_WORKERS"));
}

#[test]
fn ratio_of_algorithm_against_itself_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "self.toml",
        "[scenario]\nid = \"self\"\ntopology = \"bst\"\nalgorithms = [\"ON\"]\nseeds = [3]\n\n\
         [workload]\nkind = \"zipf\"\nn = 20\nm = 2000\nexponent = 1.0\n\n\
         [ratio]\nkind = \"static\"\nonline = \"ON\"\nbaseline = \"ON\"\ninstances = 5\n",
    );
    let out = dir.path().join("o");
    let o = run(&["ratio", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("ratio_static.csv")).unwrap();
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("static,self,1.000000000,0.000000000,"), "{summary}");
}

#[test]
fn ratio_kinds_and_incompatibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["ratio", "dynamic", "--scenario", "small-dynamic", "--out-dir", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("ratio_dynamic.csv")).unwrap();
    let rho: f64 = text.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(rho.is_finite() && rho >= 1.0);

    let o = run(&["ratio", "static", "--scenario", "iid-splay-static", "--out-dir", out]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("ratio_static.csv")).unwrap();
    let rho: f64 = text.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(rho <= 3.0, "{rho}");

    let o = run(&["ratio", "learning", "--scenario", "iid-learning", "--out-dir", out]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ci95"));

    // The offline oracle is limited to five keys.
    let o = run(&["ratio", "dynamic", "--scenario", "iid-splay-static", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    let o = run(&["ratio", "dynamic", "--scenario", "grid-vs-expander", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    let o = run(&["ratio", "sideways", "--scenario", "tau-bst", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn gen_trace_and_export_net_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["gen-trace", "--scenario", "iid-splay-static", "--seed", "4", "--out-dir", out]);
    assert!(o.status.success());
    let trace = read_trace(&std::fs::read_to_string(dir.path().join("trace_seed4.txt")).unwrap()).unwrap();
    assert_eq!((trace.n(), trace.len()), (64, 10_000));
    let g = read_graph(&std::fs::read_to_string(dir.path().join("graph_seed4.txt")).unwrap()).unwrap();
    assert_eq!(g.total_weight(), 10_000.0);

    let o = run(&["export-net", "--scenario", "iid-splay-static", "--seed", "4", "--out-dir", out]);
    assert!(o.status.success());
    for f in ["tree_seed4.txt", "tree_static_seed4.txt"] {
        let t = BstTree::from_dump(&std::fs::read_to_string(dir.path().join(f)).unwrap()).unwrap();
        assert_eq!(t.n(), 64);
    }
    let net = read_network(&std::fs::read_to_string(dir.path().join("network_seed4.txt")).unwrap(), Family::Tree).unwrap();
    assert_eq!(net.edge_count(), 63);

    let o = run(&["export-net", "--scenario", "grid-vs-expander", "--seed", "1", "--out-dir", out]);
    assert!(o.status.success());
    let exp = read_network(
        &std::fs::read_to_string(dir.path().join("network_seed1.txt")).unwrap(),
        Family::BoundedDegree(3),
    )
    .unwrap();
    assert_eq!(exp.edge_count(), 384);
    let ego = read_network(&std::fs::read_to_string(dir.path().join("ego_seed1.txt")).unwrap(), Family::Unconstrained).unwrap();
    assert!(ego.is_connected());
}

#[test]
fn trace_workload_resolves_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "in.txt", "n=3 m=4 mode=search\n0 1\n0 1\n0 3\n0 1\n");
    let cfg = write(
        dir.path(),
        "t.toml",
        "[scenario]\nid = \"file\"\ntopology = \"bst\"\nalgorithms = [\"OBL\", \"OFF\"]\nseeds = [0]\n\n\
         [workload]\nkind = \"trace\"\npath = \"in.txt\"\n",
    );
    let out = dir.path().join("o");
    let o = run(&["run", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    // Midpoint tree over 3 keys: 1 and 3 at depth 2.
    assert!(s.contains("file,OBL,0,3,4,8,0,8,"), "{s}");

    let missing = write(dir.path(), "m.toml", &std::fs::read_to_string(&cfg).unwrap().replace("in.txt", "nope.txt"));
    assert_eq!(run(&["run", "--config", &missing]).status.code(), Some(EXIT_CONFIG));
}
