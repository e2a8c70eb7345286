use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{run_algorithm, Algorithm, CostLedger, Topology};
use crate::demand::{DemandSequence, Generator};
use crate::error::{invalid, Error, Result};

/// Prefix lengths at which cumulative costs feed the additive-term fit.
const CHECKPOINTS: [usize; 3] = [100, 1_000, 10_000];
/// Minimum Monte-Carlo seeds per generator for learning ratios.
pub const LEARNING_MIN_SEEDS: usize = 30;
const BOOTSTRAP_ROUNDS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatioKind {
    /// Online against the best fixed configuration in hindsight.
    Static,
    /// Online against the optimal offline schedule.
    Dynamic,
    /// Online against the best fixed configuration for a known generator.
    Learning,
}

impl RatioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioKind::Static => "static",
            RatioKind::Dynamic => "dynamic",
            RatioKind::Learning => "learning",
        }
    }
}

impl std::str::FromStr for RatioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(RatioKind::Static),
            "dynamic" => Ok(RatioKind::Dynamic),
            "learning" => Ok(RatioKind::Learning),
            other => Err(invalid(format!("unknown ratio kind `{other}`"))),
        }
    }
}

/// Costs of one instance (one trace, or one generator averaged over seeds).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRatio {
    pub id: usize,
    pub m: usize,
    pub n: usize,
    pub numerator: f64,
    pub denominator: f64,
    /// `numerator / denominator`.
    pub raw: f64,
    /// `(numerator - beta) / denominator`.
    pub adjusted: f64,
    /// 95% bootstrap interval of the raw ratio (learning ratios only).
    pub ci95: Option<(f64, f64)>,
}

/// Worst-case ratio over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub kind: RatioKind,
    pub scenario: String,
    /// Maximum adjusted ratio over the instances.
    pub rho: f64,
    /// Additive term: intercept of online cost regressed on baseline cost
    /// over the prefix checkpoints of every instance (0 without data).
    pub beta: f64,
    /// Costs of the instance attaining `rho`.
    pub numerator_cost: f64,
    pub denominator_cost: f64,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub instances: Vec<InstanceRatio>,
}

impl RatioReport {
    pub const CSV_HEADER: &'static str = "kind,scenario,rho,beta,numerator,denominator,m,n,seed";

    /// One row per instance (`scenario/<id>`, `rho` holding the instance's
    /// adjusted ratio) followed by the summary row.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows: Vec<String> = self
            .instances
            .iter()
            .map(|i| {
                format!(
                    "{},{}/{},{:.9},{:.9},{},{},{},{},{}",
                    self.kind.as_str(),
                    self.scenario,
                    i.id,
                    i.adjusted,
                    self.beta,
                    i.numerator,
                    i.denominator,
                    i.m,
                    i.n,
                    self.seed
                )
            })
            .collect();
        rows.push(format!(
            "{},{},{:.9},{:.9},{},{},{},{},{}",
            self.kind.as_str(),
            self.scenario,
            self.rho,
            self.beta,
            self.numerator_cost,
            self.denominator_cost,
            self.m,
            self.n,
            self.seed
        ));
        rows
    }
}

struct Measured {
    m: usize,
    n: usize,
    on: f64,
    base: f64,
    // (baseline prefix cost, online prefix cost)
    points: Vec<(f64, f64)>,
    ci95: Option<(f64, f64)>,
}

fn checkpoints(on: &CostLedger, base: &CostLedger) -> Vec<(f64, f64)> {
    CHECKPOINTS
        .iter()
        .filter(|&&c| c <= on.len())
        .map(|&c| (base.prefix_total(c) as f64, on.prefix_total(c) as f64))
        .collect()
}

/// Least-squares intercept of y on x.
fn fit_intercept(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    my - (sxy / sxx) * mx
}

fn summarize(kind: RatioKind, scenario: &str, seed: u64, measured: Vec<Measured>) -> Result<RatioReport> {
    if measured.is_empty() {
        return Err(invalid("ratio needs at least one instance"));
    }
    let pooled: Vec<(f64, f64)> = measured.iter().flat_map(|x| x.points.iter().copied()).collect();
    let beta = fit_intercept(&pooled);
    let mut instances = Vec::with_capacity(measured.len());
    for (id, x) in measured.into_iter().enumerate() {
        if x.base == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        instances.push(InstanceRatio {
            id,
            m: x.m,
            n: x.n,
            numerator: x.on,
            denominator: x.base,
            raw: x.on / x.base,
            adjusted: (x.on - beta) / x.base,
            ci95: x.ci95,
        });
    }
    let worst = instances
        .iter()
        .max_by(|a, b| a.adjusted.total_cmp(&b.adjusted).then(b.id.cmp(&a.id)))
        .expect("nonempty")
        .clone();
    Ok(RatioReport {
        kind,
        scenario: scenario.to_string(),
        rho: worst.adjusted,
        beta,
        numerator_cost: worst.numerator,
        denominator_cost: worst.denominator,
        m: worst.m,
        n: worst.n,
        seed,
        instances,
    })
}

/// Ratio of `on` against `baseline` over a corpus of traces, each served
/// from `n0`. Instances are evaluated in parallel; the report lists them in
/// input order.
pub fn evaluate_ratio(
    kind: RatioKind,
    on: &Algorithm,
    baseline: &Algorithm,
    n0: &Topology,
    instances: &[DemandSequence],
    scenario: &str,
    seed: u64,
) -> Result<RatioReport> {
    match kind {
        RatioKind::Learning => {
            return Err(Error::Incompatible(
                "learning ratios are evaluated over generators".into(),
            ))
        }
        RatioKind::Dynamic if !matches!(n0, Topology::Bst(_)) => {
            return Err(Error::Incompatible(
                "dynamic ratios need the BST class (offline oracle)".into(),
            ))
        }
        _ => {}
    }
    let measured = instances
        .par_iter()
        .map(|seq| {
            let a = run_algorithm(on, n0, seq)?;
            let b = if baseline == on {
                a.clone()
            } else {
                run_algorithm(baseline, n0, seq)?
            };
            Ok(Measured {
                m: seq.len(),
                n: seq.n(),
                on: a.total() as f64,
                base: b.total() as f64,
                points: checkpoints(&a, &b),
                ci95: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(kind, scenario, seed, measured)
}

/// Learning ratio: for each generator, expected online cost over `seeds`
/// against the expected cost of the GEN baseline that knows the generator.
/// `seed` drives the bootstrap resampling of the 95% intervals.
pub fn evaluate_learning(
    on: &Algorithm,
    n0: &Topology,
    generators: &[Generator],
    m: usize,
    seeds: &[u64],
    scenario: &str,
    seed: u64,
) -> Result<RatioReport> {
    if seeds.len() < LEARNING_MIN_SEEDS {
        return Err(invalid(format!(
            "learning ratios need at least {LEARNING_MIN_SEEDS} seeds, got {}",
            seeds.len()
        )));
    }
    let measured = generators
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let gen_alg = Algorithm::Generator(g.clone());
            let runs = seeds
                .iter()
                .map(|&s| {
                    let seq = g.with_seed(s).sample(m)?;
                    Ok((run_algorithm(on, n0, &seq)?, run_algorithm(&gen_alg, n0, &seq)?))
                })
                .collect::<Result<Vec<(CostLedger, CostLedger)>>>()?;
            let k = runs.len() as f64;
            let on_costs: Vec<f64> = runs.iter().map(|r| r.0.total() as f64).collect();
            let gen_costs: Vec<f64> = runs.iter().map(|r| r.1.total() as f64).collect();
            let mut points = Vec::new();
            for &c in CHECKPOINTS.iter().filter(|&&c| c <= m) {
                let x = runs.iter().map(|r| r.1.prefix_total(c) as f64).sum::<f64>() / k;
                let y = runs.iter().map(|r| r.0.prefix_total(c) as f64).sum::<f64>() / k;
                points.push((x, y));
            }
            let ci95 = bootstrap_ratio(&on_costs, &gen_costs, seed ^ (gi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            Ok(Measured {
                m,
                n: g.n(),
                on: on_costs.iter().sum::<f64>() / k,
                base: gen_costs.iter().sum::<f64>() / k,
                points,
                ci95: Some(ci95),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(RatioKind::Learning, scenario, seed, measured)
}

/// Percentile bootstrap of a ratio of means.
fn bootstrap_ratio(num: &[f64], den: &[f64], seed: u64) -> (f64, f64) {
    let k = num.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: Vec<f64> = (0..BOOTSTRAP_ROUNDS)
        .map(|_| {
            let (mut a, mut b) = (0.0, 0.0);
            for _ in 0..k {
                let i = rng.gen_range(0..k);
                a += num[i];
                b += den[i];
            }
            a / b
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let at = |q: f64| stats[((q * (BOOTSTRAP_ROUNDS - 1) as f64).round()) as usize];
    (at(0.025), at(0.975))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bst::build_near_balanced;

    fn corpus(n: usize, m: usize, count: u64) -> Vec<DemandSequence> {
        (0..count)
            .map(|i| Generator::zipf_searches(n, 1.0, i, 100 + i).unwrap().sample(m).unwrap())
            .collect()
    }

    #[test]
    fn self_ratio_is_exactly_one() {
        let n0 = Topology::Bst(build_near_balanced(16));
        let r = evaluate_ratio(
            RatioKind::Static,
            &Algorithm::Online,
            &Algorithm::Online,
            &n0,
            &corpus(16, 2_000, 4),
            "self",
            0,
        )
        .unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.beta, 0.0);
    }

    #[test]
    fn intercept_fit() {
        assert_eq!(fit_intercept(&[(1.0, 5.0), (2.0, 7.0), (4.0, 11.0)]), 3.0);
        assert_eq!(fit_intercept(&[(1.0, 5.0)]), 0.0);
        assert_eq!(fit_intercept(&[(1.0, 5.0), (1.0, 6.0)]), 0.0);
    }

    #[test]
    fn dynamic_ratio_is_at_least_one() {
        let n0 = Topology::Bst(build_near_balanced(4));
        let r = evaluate_ratio(
            RatioKind::Dynamic,
            &Algorithm::Online,
            &Algorithm::Offline,
            &n0,
            &corpus(4, 10, 8),
            "dyn",
            0,
        )
        .unwrap();
        assert!(r.rho.is_finite());
        assert!(r.instances.iter().all(|i| i.raw >= 1.0));
    }

    #[test]
    fn learning_needs_enough_seeds() {
        let g = Generator::zipf_searches(8, 1.0, 0, 0).unwrap();
        let n0 = Topology::Bst(build_near_balanced(8));
        let few: Vec<u64> = (0..5).collect();
        assert!(evaluate_learning(&Algorithm::Online, &n0, std::slice::from_ref(&g), 200, &few, "l", 0).is_err());
        let seeds: Vec<u64> = (0..30).collect();
        let r = evaluate_learning(&Algorithm::Online, &n0, &[g], 200, &seeds, "l", 0).unwrap();
        let (lo, hi) = r.instances[0].ci95.unwrap();
        assert!(lo <= r.instances[0].raw && r.instances[0].raw <= hi);
    }

    #[test]
    fn kind_checks() {
        let net = Topology::TreeNetwork(build_near_balanced(4));
        let s = vec![DemandSequence::pairs(4, [(0, 1)]).unwrap()];
        assert!(matches!(
            evaluate_ratio(RatioKind::Dynamic, &Algorithm::Online, &Algorithm::Offline, &net, &s, "x", 0),
            Err(Error::Incompatible(_))
        ));
        assert!(evaluate_ratio(RatioKind::Learning, &Algorithm::Online, &Algorithm::Static, &net, &s, "x", 0).is_err());
        assert!("bogus".parse::<RatioKind>().is_err());
    }
}
