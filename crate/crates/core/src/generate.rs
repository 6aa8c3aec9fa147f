//! Seeded random digraphs for sweeps and property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::digraph::Digraph;
use crate::distance::{BfsScratch, Direction, UNREACHABLE};

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect()
}

/// Each ordered pair becomes an arc with probability `p`.
pub fn random_digraph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let arcs: Vec<(usize, usize)> = all_pairs(n)
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Digraph::from_arcs(n, arcs).expect("pairs are distinct and loop-free")
}

/// Random digraph with `min out-degree + min in-degree >= n`.
///
/// Starts from a random arc set and adds missing arcs at a vertex of least
/// out- or in-degree until the condition holds.
pub fn random_dense<R: Rng>(n: usize, rng: &mut R) -> Digraph {
    assert!(n >= 2, "need at least two vertices");
    let p = rng.gen_range(0.45..0.85);
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in all_pairs(n) {
        adj[u][v] = rng.gen_bool(p);
    }
    loop {
        let out: Vec<usize> = (0..n)
            .map(|u| adj[u].iter().filter(|&&b| b).count())
            .collect();
        let inn: Vec<usize> = (0..n)
            .map(|v| (0..n).filter(|&u| adj[u][v]).count())
            .collect();
        let (min_out, min_in) = (*out.iter().min().unwrap(), *inn.iter().min().unwrap());
        if min_out + min_in >= n {
            break;
        }
        if min_out <= min_in {
            let u = (0..n).find(|&u| out[u] == min_out).unwrap();
            let missing: Vec<usize> = (0..n).filter(|&v| v != u && !adj[u][v]).collect();
            adj[u][*missing.choose(rng).unwrap()] = true;
        } else {
            let v = (0..n).find(|&v| inn[v] == min_in).unwrap();
            let missing: Vec<usize> = (0..n).filter(|&u| u != v && !adj[u][v]).collect();
            adj[*missing.choose(rng).unwrap()][v] = true;
        }
    }
    let arcs = all_pairs(n).into_iter().filter(|&(u, v)| adj[u][v]);
    Digraph::from_arcs(n, arcs).expect("pairs are distinct and loop-free")
}

/// Random strongly connected digraph of diameter at most 2.
///
/// Each source in turn gets a direct arc to every vertex still farther than 2.
/// Adding arcs never lengthens a distance, so one pass suffices.
pub fn random_diameter_two<R: Rng>(n: usize, rng: &mut R) -> Digraph {
    assert!(n >= 2, "need at least two vertices");
    let p = rng.gen_range(0.15..0.5);
    let mut arcs: Vec<(usize, usize)> = all_pairs(n)
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    let mut scratch = BfsScratch::new(n);
    for u in 0..n {
        let d = Digraph::from_arcs(n, arcs.iter().copied()).expect("valid arcs");
        scratch.run(&d, u, None, Direction::Forward);
        let far: Vec<usize> = (0..n)
            .filter(|&v| v != u && (scratch.dist()[v] == UNREACHABLE || scratch.dist()[v] > 2))
            .collect();
        arcs.extend(far.into_iter().map(|v| (u, v)));
    }
    Digraph::from_arcs(n, arcs).expect("valid arcs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::degree_stats;
    use crate::distance::diameter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_meets_degree_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..14 {
            let d = random_dense(n, &mut rng);
            let s = degree_stats(&d);
            assert!(s.min_out + s.min_in >= n);
        }
    }

    #[test]
    fn diameter_two_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..12 {
            assert!(diameter(&random_diameter_two(n, &mut rng)).unwrap() <= 2);
        }
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let a = random_digraph(9, 0.4, &mut ChaCha8Rng::seed_from_u64(11));
        let b = random_digraph(9, 0.4, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a.arcs(), b.arcs());
    }
}
