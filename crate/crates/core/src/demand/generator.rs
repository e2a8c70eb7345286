use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Addressing, CommRequest, DemandSequence, ROOT};
use crate::error::{Error, Result};

/// Identifier of the pseudo-random generator behind every seeded draw.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.3";

const STOCHASTIC_TOL: f64 = 1e-9;

/// Parameters of a request generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Requests drawn independently from a fixed distribution.
    Iid {
        outcomes: Vec<CommRequest>,
        probs: Vec<f64>,
    },
    /// Markov chain whose states are requests; row `i` of `transition` is the
    /// distribution of the successor of `states[i]`.
    Markov {
        states: Vec<CommRequest>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    },
}

/// A seeded generative model of demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    n: usize,
    addressing: Addressing,
    model: Model,
    seed: u64,
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {s}, not 1"
        )));
    }
    Ok(())
}

impl Generator {
    pub fn new(n: usize, addressing: Addressing, model: Model, seed: u64) -> Result<Self> {
        match &model {
            Model::Iid { outcomes, probs } => {
                if outcomes.len() != probs.len() {
                    return Err(Error::InvalidDistribution(
                        "outcome and probability counts differ".into(),
                    ));
                }
                check_distribution(probs, "iid distribution")?;
                for &o in outcomes {
                    addressing.check(n, o)?;
                }
            }
            Model::Markov {
                states,
                initial,
                transition,
            } => {
                if initial.len() != states.len() || transition.len() != states.len() {
                    return Err(Error::InvalidDistribution(
                        "markov chain dimensions disagree".into(),
                    ));
                }
                check_distribution(initial, "initial distribution")?;
                for (i, row) in transition.iter().enumerate() {
                    if row.len() != states.len() {
                        return Err(Error::InvalidDistribution(format!(
                            "transition row {i} has wrong length"
                        )));
                    }
                    check_distribution(row, &format!("transition row {i}"))?;
                }
                for &s in states {
                    addressing.check(n, s)?;
                }
            }
        }
        Ok(Generator {
            n,
            addressing,
            model,
            seed,
        })
    }

    pub fn iid(
        n: usize,
        addressing: Addressing,
        outcomes: Vec<CommRequest>,
        probs: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        Self::new(n, addressing, Model::Iid { outcomes, probs }, seed)
    }

    pub fn markov(
        n: usize,
        addressing: Addressing,
        states: Vec<CommRequest>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        Self::new(
            n,
            addressing,
            Model::Markov {
                states,
                initial,
                transition,
            },
            seed,
        )
    }

    /// i.i.d. searches over keys `1..=n` with Zipf(`exponent`) popularity;
    /// the popularity ranks are shuffled over the keys by `shape_seed`.
    pub fn zipf_searches(n: usize, exponent: f64, shape_seed: u64, seed: u64) -> Result<Self> {
        let outcomes = (1..=n).map(|k| CommRequest::new(ROOT, k)).collect();
        Self::iid(
            n,
            Addressing::Search,
            outcomes,
            shuffled_zipf(n, exponent, shape_seed),
            seed,
        )
    }

    /// i.i.d. pairs over all ordered pairs of `n` nodes with Zipf(`exponent`)
    /// popularity, ranks shuffled by `shape_seed`.
    pub fn zipf_pairs(n: usize, exponent: f64, shape_seed: u64, seed: u64) -> Result<Self> {
        let outcomes: Vec<CommRequest> = (0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| CommRequest::new(s, d)))
            .collect();
        let probs = shuffled_zipf(outcomes.len(), exponent, shape_seed);
        Self::iid(n, Addressing::Pairs, outcomes, probs, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn addressing(&self) -> Addressing {
        self.addressing
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Generator {
        Generator {
            seed,
            ..self.clone()
        }
    }

    /// Draws `m` requests. Identical (model, seed, m) give identical traces.
    pub fn sample(&self, m: usize) -> Result<DemandSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let requests = match &self.model {
            Model::Iid { outcomes, probs } => {
                let dist = weighted(probs)?;
                (0..m).map(|_| outcomes[dist.sample(&mut rng)]).collect()
            }
            Model::Markov {
                states,
                initial,
                transition,
            } => {
                let start = weighted(initial)?;
                let rows = transition
                    .iter()
                    .map(|r| weighted(r))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Vec::with_capacity(m);
                if m > 0 {
                    let mut state = start.sample(&mut rng);
                    out.push(states[state]);
                    for _ in 1..m {
                        state = rows[state].sample(&mut rng);
                        out.push(states[state]);
                    }
                }
                out
            }
        };
        DemandSequence::new(self.n, self.addressing, requests)
    }

    /// Long-run frequency of each distinct request: the distribution itself
    /// for i.i.d. models, the stationary distribution for Markov chains.
    pub fn request_distribution(&self) -> Vec<(CommRequest, f64)> {
        let (states, p) = match &self.model {
            Model::Iid { outcomes, probs } => (outcomes, probs.clone()),
            Model::Markov {
                states,
                initial,
                transition,
            } => (states, stationary(initial, transition)),
        };
        let mut acc: std::collections::BTreeMap<CommRequest, f64> = Default::default();
        for (&s, &x) in states.iter().zip(&p) {
            *acc.entry(s).or_insert(0.0) += x;
        }
        acc.into_iter().filter(|&(_, x)| x > 0.0).collect()
    }
}

fn weighted(p: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(p).map_err(|e| Error::InvalidDistribution(e.to_string()))
}

fn shuffled_zipf(len: usize, exponent: f64, shape_seed: u64) -> Vec<f64> {
    let mut w: Vec<f64> = (1..=len).map(|r| (r as f64).powf(-exponent)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(shape_seed);
    for i in (1..len).rev() {
        let j = rng.gen_range(0..=i);
        w.swap(i, j);
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Power iteration from `initial`, averaged over the final window so that
/// periodic chains still converge to their stationary distribution.
fn stationary(initial: &[f64], transition: &[Vec<f64>]) -> Vec<f64> {
    // Lazy chain (P + I) / 2: same stationary law, no periodicity.
    let k = initial.len();
    let mut cur = initial.to_vec();
    for _ in 0..20_000 {
        let mut next: Vec<f64> = cur.iter().map(|&p| p / 2.0).collect();
        for (i, &pi) in cur.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &t) in transition[i].iter().enumerate() {
                next[j] += pi * t / 2.0;
            }
        }
        let delta: f64 = next.iter().zip(&cur).map(|(a, b)| (a - b).abs()).sum();
        cur = next;
        if delta < 1e-15 * k as f64 {
            break;
        }
    }
    cur
}
