//! Colour refinement (directed 1-WL) and underlying-graph bipartiteness.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::Digraph;

/// Stable partition of the present vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementPartition {
    /// Classes ordered by canonical colour, each sorted by label.
    pub classes: Vec<Vec<usize>>,
    /// Rounds that split at least one class.
    pub rounds: usize,
    pub discrete: bool,
}

impl RefinementPartition {
    /// Class size -> number of classes of that size.
    pub fn size_multiset(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for c in &self.classes {
            *m.entry(c.len()).or_insert(0) += 1;
        }
        m
    }
}

/// Replaces each signature by its rank among the distinct signatures.
/// Ranking by value (not by first occurrence) keeps colours isomorphism-invariant.
fn canonical_colours<S: Ord + Clone + std::hash::Hash + Eq>(sigs: &[S]) -> (Vec<u32>, usize) {
    let mut distinct: Vec<S> = sigs.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let rank: HashMap<&S, u32> = distinct
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();
    (sigs.iter().map(|s| rank[s]).collect(), distinct.len())
}

/// Refines vertex classes by (colour, multiset of out-neighbour colours,
/// multiset of in-neighbour colours) until no class splits. The initial
/// colouring is (out-degree, in-degree).
pub fn color_refinement(d: &Digraph) -> RefinementPartition {
    let verts: Vec<usize> = d.vertices().collect();
    let mut index = vec![usize::MAX; d.n()];
    for (i, &v) in verts.iter().enumerate() {
        index[v] = i;
    }
    let initial: Vec<(usize, usize)> = verts
        .iter()
        .map(|&v| (d.out_iter(v).count(), d.in_iter(v).count()))
        .collect();
    let (mut colour, mut count) = canonical_colours(&initial);
    let mut rounds = 0;
    loop {
        let sigs: Vec<Vec<u32>> = verts
            .par_iter()
            .map(|&v| {
                let mut outs: Vec<u32> = d.out_iter(v).map(|w| colour[index[w]]).collect();
                let mut ins: Vec<u32> = d.in_iter(v).map(|w| colour[index[w]]).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                let mut sig = Vec::with_capacity(outs.len() + ins.len() + 2);
                sig.push(colour[index[v]]);
                sig.push(outs.len() as u32);
                sig.extend(outs);
                sig.extend(ins);
                sig
            })
            .collect();
        let (next, next_count) = canonical_colours(&sigs);
        if next_count == count {
            break;
        }
        colour = next;
        count = next_count;
        rounds += 1;
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &v) in verts.iter().enumerate() {
        classes[colour[i] as usize].push(v);
    }
    RefinementPartition {
        discrete: classes.iter().all(|c| c.len() == 1),
        classes,
        rounds,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrivialityVerdict {
    TrivialCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialityReport {
    pub verdict: TrivialityVerdict,
    pub partition: RefinementPartition,
}

/// Automorphisms preserve the stable colouring, so a discrete partition
/// forces every automorphism to fix every vertex. Anything else is inconclusive.
pub fn automorphism_triviality(d: &Digraph) -> TrivialityReport {
    let partition = color_refinement(d);
    TrivialityReport {
        verdict: if partition.discrete {
            TrivialityVerdict::TrivialCertified
        } else {
            TrivialityVerdict::Inconclusive
        },
        partition,
    }
}

/// Number of stable classes; a lower bound on the number of vertex orbits.
pub fn class_count(d: &Digraph) -> usize {
    color_refinement(d).classes.len()
}

/// 2-colouring of the underlying undirected graph.
pub fn is_bipartite_underlying(d: &Digraph) -> bool {
    let mut side = vec![u8::MAX; d.n()];
    let mut queue = Vec::with_capacity(d.n());
    for root in d.vertices() {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        queue.clear();
        queue.push(root);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for w in d.out_iter(u).chain(d.in_iter(u)) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[u];
                    queue.push(w);
                } else if side[w] == side[u] {
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
    use crate::digraph::{
        build_circulant, build_rule_digraph, CirculantSpec, Rule, RuleSpec, Selector,
    };

    fn circ(n: usize, s: &[usize]) -> Digraph {
        build_circulant(&CirculantSpec::new(n, s.iter().copied()).unwrap())
    }

    #[test]
    fn circulants_form_one_class() {
        for (n, s) in [(11, vec![1]), (85, vec![4]), (20, vec![3, 7])] {
            let p = color_refinement(&circ(n, &s));
            assert_eq!(p.classes.len(), 1);
            assert_eq!(p.rounds, 0);
            assert_eq!(class_count(&circ(n, &s)), 1);
        }
        let r = automorphism_triviality(&circ(11, &[1]));
        assert_eq!(r.verdict, TrivialityVerdict::Inconclusive);
    }

    #[test]
    fn directed_path_is_discrete() {
        let path = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        let r = automorphism_triviality(&path);
        assert_eq!(r.verdict, TrivialityVerdict::TrivialCertified);
        assert_eq!(r.partition.classes.len(), 3);
    }

    #[test]
    fn residue_rules_split_classes() {
        let spec = RuleSpec::new(
            12,
            vec![
                Rule {
                    selector: Selector::residue(2, 0),
                    s: vec![2],
                },
                Rule {
                    selector: Selector::residue(2, 1),
                    s: vec![3],
                },
            ],
            true,
        )
        .unwrap();
        assert!(class_count(&build_rule_digraph(&spec)) >= 2);
    }

    #[test]
    fn bipartite_examples() {
        assert!(is_bipartite_underlying(&circ(4, &[1])));
        assert!(!is_bipartite_underlying(&circ(5, &[1])));
        assert!(!is_bipartite_underlying(&circ(85, &[4])));
        assert!(is_bipartite_underlying(&circ(10, &[3])));
    }
}
