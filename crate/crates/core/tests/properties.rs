use proptest::prelude::*;

use soltes::deletion::deletion_totals;
use soltes::distance::{transmissions, wiener};
use soltes::formulas::{transmission_formula, ParamTriple};
use soltes::io::{parse_edge_list, parse_json_spec, write_edge_list, write_json};
use soltes::soltes::{
    circulant_delta, delta, delta_profile, is_z_soltes_with, DeltaValue, Verification,
};
use soltes::structure::color_refinement;
use soltes::{build_circulant, delete_vertex, CirculantSpec, Digraph};

/// A Hamiltonian cycle plus random extra arcs: always strongly connected.
fn strong_digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (3..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let mut arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            for u in 0..n {
                for v in 0..n {
                    if u != v && v != (u + 1) % n && bits[u * n + v] {
                        arcs.push((u, v));
                    }
                }
            }
            Digraph::from_arcs(n, arcs).unwrap()
        })
    })
}

fn any_digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::weighted(0.3), n * n).prop_map(move |bits| {
            let arcs = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && bits[u * n + v]);
            Digraph::from_arcs(n, arcs).unwrap()
        })
    })
}

fn circulant() -> impl Strategy<Value = CirculantSpec> {
    (5usize..48).prop_flat_map(|n| {
        prop::collection::btree_set(1..=n - 2, 1..4)
            .prop_map(move |s| CirculantSpec::new(n, s).unwrap())
    })
}

fn relabel(d: &Digraph, perm: &[usize]) -> Digraph {
    Digraph::from_arcs(d.n(), d.arcs().into_iter().map(|(u, v)| (perm[u], perm[v]))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn deletion_engine_matches_brute_force(d in strong_digraph(9)) {
        let profile = delta_profile(&d).unwrap();
        for e in &profile.per_vertex {
            prop_assert_eq!(e.delta, delta(&d, e.v).unwrap());
        }
    }

    #[test]
    fn wiener_is_both_transmission_sums(d in strong_digraph(10)) {
        let w = wiener(&d).unwrap();
        let (mut out, mut inn) = (0, 0);
        for v in d.vertices() {
            let t = transmissions(&d, v, None).unwrap();
            out += t.sigma_out.unwrap();
            inn += t.sigma_in.unwrap();
        }
        prop_assert_eq!(w, out);
        prop_assert_eq!(w, inn);
        let totals = deletion_totals(&d, None).unwrap();
        prop_assert_eq!(totals.wiener, w);
    }

    #[test]
    fn transpose_keeps_every_delta(d in strong_digraph(9)) {
        let a = delta_profile(&d).unwrap();
        let b = delta_profile(&d.transpose()).unwrap();
        prop_assert_eq!(a.wiener_total, b.wiener_total);
        for (x, y) in a.per_vertex.iter().zip(&b.per_vertex) {
            prop_assert_eq!(x.delta, y.delta);
        }
    }

    #[test]
    fn circulant_profile_is_translation_invariant(spec in circulant()) {
        let d = build_circulant(&spec);
        let sym = circulant_delta(&spec).unwrap();
        let profile = delta_profile(&d).unwrap();
        prop_assert!(profile.per_vertex.iter().all(|e| e.delta == sym));
        let z = sym.finite().unwrap_or(0);
        let exhaustive = is_z_soltes_with(&d, z, Verification::Exhaustive, None).unwrap();
        let sampled = is_z_soltes_with(&d, z, Verification::Sample(3), None).unwrap();
        prop_assert_eq!(exhaustive.holds, sym == DeltaValue::Finite(z));
        prop_assert_eq!(sampled.holds, exhaustive.holds);
    }

    #[test]
    fn edge_list_round_trip_is_byte_exact(d in any_digraph(12)) {
        let text = write_edge_list(&d);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(back.arcs(), d.arcs());
        prop_assert_eq!(back.n(), d.n());
        prop_assert_eq!(write_edge_list(&back), text);
        let json = write_json(&d);
        let back = parse_json_spec(&json).unwrap();
        prop_assert_eq!(write_json(&back), json);
    }

    #[test]
    fn circulant_json_round_trip(spec in circulant()) {
        let d = build_circulant(&spec);
        let json = write_json(&d);
        let back = parse_json_spec(&json).unwrap();
        prop_assert_eq!(back.arcs(), d.arcs());
        prop_assert_eq!(write_json(&back), json);
    }

    #[test]
    fn refinement_is_relabelling_invariant(
        d in any_digraph(10),
        seed in any::<u64>(),
    ) {
        let n = d.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let a = color_refinement(&d);
        let b = color_refinement(&relabel(&d, &perm));
        prop_assert_eq!(a.size_multiset(), b.size_multiset());
        prop_assert_eq!(a.discrete, b.discrete);
        // colour classes map onto each other under the relabelling
        for (ca, cb) in a.classes.iter().zip(&b.classes) {
            let mut mapped: Vec<usize> = ca.iter().map(|&v| perm[v]).collect();
            mapped.sort();
            prop_assert_eq!(&mapped, cb);
        }
    }

    #[test]
    fn deleted_view_matches_compacted_copy(d in strong_digraph(9), pick in any::<prop::sample::Index>()) {
        let v = pick.index(d.n());
        let view = delete_vertex(&d, v).unwrap();
        let (compact, labels) = view.compact();
        prop_assert_eq!(labels.len(), d.n() - 1);
        prop_assert_eq!(wiener(&view).ok(), wiener(&compact).ok());
    }

    #[test]
    fn transmission_formula_matches_bfs(m in 1u64..7, a in 2u64..12, r_frac in 0.0f64..=1.0) {
        let r = (r_frac * m as f64).floor() as u64;
        let p = ParamTriple::new(m, a, r).unwrap();
        let d = build_circulant(&p.spec().unwrap());
        let t = transmissions(&d, 0, None).unwrap();
        prop_assert_eq!(t.sigma_out, Some(transmission_formula(p)));
        prop_assert_eq!(t.sigma_in, Some(transmission_formula(p)));
    }
}
