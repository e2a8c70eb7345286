use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Family, Network};
use crate::error::{invalid, Error, Result};

const MAX_ATTEMPTS: usize = 100_000;

/// Uniformly random simple connected `d`-regular graph via the pairing
/// model: shuffle `n * d` half-edges, pair neighbours, reject and redraw
/// until the result is simple and connected.
pub fn build_random_regular(n: usize, d: usize, seed: u64) -> Result<Network> {
    if d < 3 {
        return Err(invalid(format!("expander degree must be >= 3, got {d}")));
    }
    if n <= d {
        return Err(invalid(format!("need n > d, got n = {n}, d = {d}")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(invalid(format!("n * d = {} is odd", n * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut adj = vec![Vec::with_capacity(d); n];
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u].contains(&v) {
                continue 'attempt;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let edges = points
            .chunks_exact(2)
            .map(|p| (p[0], p[1]))
            .collect::<Vec<_>>();
        match Network::new(n, edges, Family::BoundedDegree(d)) {
            Ok(net) => return Ok(net),
            Err(Error::ConstraintBreach(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(invalid(format!(
        "no simple connected {d}-regular graph on {n} nodes after {MAX_ATTEMPTS} draws"
    )))
}

/// Seeded uniformly random bijection of `0..n`, used as an oblivious
/// placement of demand nodes onto network nodes.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}
