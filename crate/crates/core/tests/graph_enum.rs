use std::collections::BTreeSet;
use std::sync::OnceLock;

use biquant_core::graph::{enumerate, parse_graphs, Clause};
use biquant_core::{AdmissibleGraph, Edge, Vertex};
use proptest::prelude::*;

fn pool_2227() -> &'static [AdmissibleGraph] {
    static P: OnceLock<Vec<AdmissibleGraph>> = OnceLock::new();
    P.get_or_init(|| enumerate(2, 2, 2, 7))
}

fn pool_2126() -> &'static [AdmissibleGraph] {
    static P: OnceLock<Vec<AdmissibleGraph>> = OnceLock::new();
    P.get_or_init(|| enumerate(2, 1, 2, 6))
}

fn fact(n: usize) -> usize {
    (1..=n).product()
}

/// Number of labeled graphs of type `(m,n;s)` with the given weighted edge
/// count, from an odometer over edge multiplicities and the orbit formula
/// `Π #Star! #End! / Π r!` for `r` identical parallel edges.
fn count_oracle(m: usize, n: usize, s: usize, budget: usize) -> usize {
    if 3 * s + m + n < 3 {
        return 0;
    }
    // (src, dst, weight, cap) with inner vertices 0..s, lower s.., upper after
    let mut kinds: Vec<(usize, usize, usize, usize)> = Vec::new();
    for a in 0..s {
        for b in 0..s {
            if a != b {
                kinds.push((a, b, 2, budget / 2));
            }
        }
        for j in 0..m {
            kinds.push((a, s + j, 1, 1));
        }
        for j in 0..n {
            kinds.push((s + m + j, a, 1, 1));
        }
    }
    let mut mult = vec![0usize; kinds.len()];
    let mut total = 0;
    loop {
        let w: usize = mult.iter().zip(&kinds).map(|(c, k)| c * k.2).sum();
        if w == budget {
            let mut out_deg = vec![0usize; s];
            let mut in_deg = vec![0usize; s];
            let mut denom = 1;
            for (c, &(src, dst, _, _)) in mult.iter().zip(&kinds) {
                if src < s {
                    out_deg[src] += c;
                }
                if dst < s {
                    in_deg[dst] += c;
                }
                denom *= fact(*c);
            }
            let num: usize = (0..s).map(|k| fact(out_deg[k]) * fact(in_deg[k])).product();
            total += num / denom;
        }
        let mut i = 0;
        loop {
            if i == kinds.len() {
                return total;
            }
            mult[i] += 1;
            if mult[i] <= kinds[i].3 {
                break;
            }
            mult[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn two_labeled_graphs_for_the_bracket_corolla() {
    let gs = enumerate(2, 1, 1, 3);
    assert_eq!(gs.len(), 2);
    for g in &gs {
        assert_eq!(g.edges.len(), 3);
        assert_eq!(g.star[0].len(), 2);
        assert_eq!(g.end[0].len(), 1);
    }
    assert_eq!(gs[0].label_sign() * gs[1].label_sign(), -1);
}

#[test]
fn enumeration_counts_match_the_orbit_formula() {
    for s in 0..=2 {
        for m in 0..=2 {
            for n in 0..=2 {
                for budget in 0..=4 {
                    let got = enumerate(m, n, s, budget);
                    assert_eq!(got.len(), count_oracle(m, n, s, budget), "(m,n,s,budget) = ({m},{n},{s},{budget})");
                    let keys: BTreeSet<String> = got.iter().map(AdmissibleGraph::canonical_key).collect();
                    assert_eq!(keys.len(), got.len());
                    for g in &got {
                        assert!(g.validate().is_ok());
                        assert_eq!(g.weighted_edge_count(), budget);
                    }
                }
            }
        }
    }
}

#[test]
fn top_degree_counts_at_one_and_two_inner_vertices() {
    assert_eq!(enumerate(2, 1, 1, 3).len(), count_oracle(2, 1, 1, 3));
    assert_eq!(enumerate(1, 2, 1, 3).len(), 2);
    assert_eq!(enumerate(2, 1, 2, 6).len(), count_oracle(2, 1, 2, 6));
    assert_eq!(enumerate(2, 2, 2, 7).len(), count_oracle(2, 2, 2, 7));
}

#[test]
fn text_format_round_trips() {
    for g in enumerate(2, 1, 2, 6).iter().step_by(17) {
        let back = AdmissibleGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(back.canonical_key(), g.canonical_key());
    }
    let many: String = enumerate(1, 2, 1, 3).iter().map(|g| g.to_text() + "---\n").collect();
    assert_eq!(parse_graphs(&many).unwrap().len(), 2);
}

#[test]
fn missing_label_blocks_default_to_edge_order() {
    let g = AdmissibleGraph::from_text("1 2 1\ni1 d2\ni1 d1\nu1 i1\n").unwrap();
    assert_eq!(g.star[0], vec![0, 1]);
    assert_eq!(g.label_sign(), -1);
}

#[test]
fn violations_name_their_clause() {
    let bad = |text: &str| AdmissibleGraph::from_text(text).unwrap().validate().unwrap_err().clause;
    assert_eq!(bad("0 1 1\n"), Clause::Item1);
    assert_eq!(bad("1 2 1\ni2 d1\n"), Clause::Item1);
    assert_eq!(bad("1 2 1\nd1 i1\n"), Clause::Item2);
    assert_eq!(bad("1 2 1\nu1 d1\n"), Clause::Item2);
    assert_eq!(bad("1 2 1\ni1 d1\ni1 d1\n"), Clause::Item3);
    assert_eq!(bad("2 1 1\ni1 i1\n"), Clause::Item3);
    assert_eq!(bad("1 2 1\ni1 d1\ni1 d2\nstar i1: e1 e1\n"), Clause::Item4);
    assert!(AdmissibleGraph::from_text("1 2 1\nx1 d1\n").is_err());
    assert!(AdmissibleGraph::from_text("1 2 1\ni1 d1\nstar i1: e5\n").is_err());
}

#[test]
fn parallel_inner_edges_are_allowed() {
    let g = AdmissibleGraph::from_text("2 1 1\ni1 i2\ni1 i2\ni2 d1\nu1 i1\n").unwrap();
    assert!(g.validate().is_ok());
    // swapping the two identical edges gives the same key
    let mut h = g.clone();
    h.star[0].swap(0, 1);
    h.end[1].swap(0, 1);
    assert_eq!(g.canonical_key(), h.canonical_key());
}

proptest! {
    #[test]
    fn key_ignores_edge_list_order(pick in 0usize..1000, seed in any::<u64>()) {
        let all = pool_2227();
        let g = &all[pick % all.len()];
        // permute the edge list and carry the labels along
        let k = g.edges.len();
        let mut order: Vec<usize> = (0..k).collect();
        let mut x = seed;
        for i in (1..k).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let mut new_of_old = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let edges: Vec<Edge> = order.iter().map(|&old| g.edges[old]).collect();
        let remap = |v: &Vec<usize>| v.iter().map(|&i| new_of_old[i]).collect::<Vec<_>>();
        let h = AdmissibleGraph {
            s: g.s, m: g.m, n: g.n, edges,
            star: g.star.iter().map(remap).collect(),
            end: g.end.iter().map(remap).collect(),
        };
        prop_assert_eq!(h.canonical_key(), g.canonical_key());
        prop_assert_eq!(h.label_sign(), g.label_sign());
    }

    #[test]
    fn transposing_a_label_block_flips_the_sign(pick in 0usize..1000) {
        let all = pool_2126();
        let g = &all[pick % all.len()];
        if let Some(k) = (0..g.s).find(|&k| g.star[k].len() >= 2 && g.edges[g.star[k][0]] != g.edges[g.star[k][1]]) {
            let mut h = g.clone();
            h.star[k].swap(0, 1);
            prop_assert_eq!(h.label_sign(), -g.label_sign());
            prop_assert!(h.canonical_key() != g.canonical_key());
        }
    }

    #[test]
    fn renaming_inner_vertices_keeps_the_shape(pick in 0usize..1000) {
        let all = pool_2126();
        let g = &all[pick % all.len()];
        let h = g.relabel_inner(&[1, 0]);
        prop_assert!(h.validate().is_ok());
        let back = h.relabel_inner(&[1, 0]);
        prop_assert_eq!(back.canonical_key(), g.canonical_key());
        let valences = |x: &AdmissibleGraph| { let mut v: Vec<usize> = (1..=x.s).map(|k| x.valence(k)).collect(); v.sort(); v };
        prop_assert_eq!(valences(&h), valences(g));
        prop_assert!(h.edges.iter().all(|e| matches!(e.src, Vertex::Inner(_) | Vertex::Upper(_))));
    }
}
