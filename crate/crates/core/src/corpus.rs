//! Seeded corpora for the randomized suites: digraphs, exhaustive small
//! enumerations and synthetic ρ matrices. Everything is reproducible from
//! the seed.

use crate::digraph::Digraph;
use crate::extnat::{ExtNat, Fin, Inf};
use crate::rho::RhoMatrix;
use crate::scalar::{Decay, Scalar};
use crate::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random digraphs with n in [2, n_max]: Bernoulli edges over all ordered
/// pairs (loops included), plus an occasional duplicated edge so parallel
/// edges stay exercised.
pub fn seeded_digraphs(seed: u64, count: usize, n_max: usize) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let densities = [0.15, 0.3, 0.5];
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=n_max);
            let p = densities[i % densities.len()];
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            if !edges.is_empty() && rng.gen_bool(0.2) {
                let dup = edges[rng.gen_range(0..edges.len())];
                edges.push(dup);
            }
            Digraph::new(n, edges)
        })
        .collect()
}

/// Every simple digraph (loops allowed, no parallel edges) on at most
/// `n_max` vertices. n_max = 3 gives 2 + 16 + 512 digraphs.
pub fn all_digraphs_up_to(n_max: usize) -> Vec<Digraph> {
    assert!(n_max <= 3, "exhaustive enumeration is for tiny n only");
    let mut out = Vec::new();
    for n in 1..=n_max {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << slots.len()) {
            let edges = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            out.push(Digraph::new(n, edges));
        }
    }
    out
}

/// Synthetic ρ matrices satisfying the dilation hypothesis by construction:
/// integer depths closed under ρ(i,j) ≤ min(ρ(i,k), ρ(k,j)) + 2, pushed
/// through an exact decay base b with ε′ = b² sampled inside (1.01, 1.41).
pub fn seeded_rho_matrices(seed: u64, count: usize, max_size: usize) -> Vec<RhoMatrix<Exact>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=max_size);
            let mut rho = vec![vec![Inf; k]; k];
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    rho[i][j] = if rng.gen_bool(0.15) {
                        Inf
                    } else {
                        Fin(rng.gen_range(0..=12u64))
                    };
                }
            }
            // closure under the relaxed ultrametric inequality (slack 2c, c = 1)
            loop {
                let mut changed = false;
                for via in 0..k {
                    for i in 0..k {
                        for j in 0..k {
                            let bound = rho[i][via].min(rho[via][j]) + Fin(2);
                            if rho[i][j] > bound {
                                rho[i][j] = bound;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            // base 1 + t/200 with t in [2, 37]: epsilon' = base^2 in (1.01, 1.41)
            let t = rng.gen_range(2..=37i64);
            let decay: Decay<Exact> = Decay::new(Exact::from_ratio(200 + t, 200));
            let epsilon_prime = decay.pow(2);
            let points = (0..k).map(|i| format!("p{i}")).collect();
            let stable = vec![vec![true; k]; k];
            RhoMatrix::from_rho(points, rho, &decay, epsilon_prime, (0, 0), stable)
        })
        .collect()
}

/// Seeded pick of quasi-geodesic parameters used in spot checks.
pub fn seeded_gamma_c(seed: u64, count: usize) -> Vec<(crate::Rational, crate::Rational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let gamma = crate::Rational::new(rng.gen_range(1..=4), rng.gen_range(1..=2))
                .max(crate::Rational::from_integer(1));
            let c = crate::Rational::new(rng.gen_range(0..=4), 1);
            (gamma, c)
        })
        .collect()
}

/// The construction invariant the generator promises.
pub fn rho_hypothesis_holds(m: &RhoMatrix<Exact>) -> bool {
    let rho = m.rho.as_ref().expect("generator keeps rho");
    let k = m.size();
    for i in 0..k {
        for j in 0..k {
            for via in 0..k {
                let bound = rho[i][via].min(rho[via][j]) + ExtNat::Fin(2);
                if rho[i][j] > bound {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_seed_stable() {
        let a = seeded_digraphs(7, 20, 6);
        let b = seeded_digraphs(7, 20, 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.vertex_count(), y.vertex_count());
            assert_eq!(x.edges(), y.edges());
        }
        let c = seeded_digraphs(8, 20, 6);
        assert!(a.iter().zip(&c).any(|(x, y)| x.edges() != y.edges()));
    }

    #[test]
    fn exhaustive_small_counts() {
        assert_eq!(all_digraphs_up_to(2).len(), 2 + 16);
        assert_eq!(all_digraphs_up_to(3).len(), 2 + 16 + 512);
    }

    #[test]
    fn rho_generator_upholds_hypothesis() {
        for m in seeded_rho_matrices(11, 25, 8) {
            assert!(rho_hypothesis_holds(&m));
        }
    }
}
