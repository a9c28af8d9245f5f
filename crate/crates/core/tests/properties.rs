use proptest::prelude::*;

use ustree_core::gen::{generate, random_partition, random_subset, GenKind, Weights};
use ustree_core::general::{build_hierarchy, GeneralParams};
use ustree_core::graph::quotient;
use ustree_core::io::{self, GraphMeta};
use ustree_core::partition::validate_hierarchy;
use ustree_core::splitjoin::{build_forest, build_ust};
use ustree_core::steiner::{opt_steiner, projection_cost};
use ustree_core::{Graph, Partition};

const KINDS: [GenKind; 5] = [GenKind::Ring, GenKind::Path, GenKind::RandomTree, GenKind::Gnp, GenKind::Geometric];

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..KINDS.len(), 1..=max_n, any::<u64>(), 1u64..=9).prop_map(|(k, n, seed, w)| {
        generate(KINDS[k], n, seed, Weights { min: 1, max: w }).expect("generator")
    })
}

fn graph_with_zeros(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..KINDS.len(), 1..=max_n, any::<u64>(), 0u64..=3).prop_map(|(k, n, seed, w)| {
        generate(KINDS[k], n, seed, Weights { min: 0, max: w }).expect("generator")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_obey_the_triangle_inequality(g in graph_with_zeros(14)) {
        let d = g.all_pairs();
        let n = g.n();
        for a in 0..n {
            prop_assert_eq!(d[a][a], Some(0));
            for b in 0..n {
                prop_assert_eq!(d[a][b], d[b][a]);
                for c in 0..n {
                    let (ab, bc, ac) = (d[a][b].unwrap(), d[b][c].unwrap(), d[a][c].unwrap());
                    prop_assert!(ac <= ab + bc);
                }
            }
        }
    }

    #[test]
    fn balls_grow_with_the_radius(g in graph(20), v in any::<prop::sample::Index>(), r1 in 0u64..12, extra in 0u64..12) {
        let v = v.index(g.n());
        let small = g.ball(v, r1);
        let large = g.ball(v, r1 + extra);
        prop_assert!(small.contains(&v));
        prop_assert!(small.iter().all(|x| large.contains(x)));
        for &x in &large {
            prop_assert!(g.dist(v, x).unwrap() <= r1 + extra);
        }
    }

    #[test]
    fn strong_diameter_dominates_weak(g in graph(16), seed in any::<u64>(), size in 1usize..8) {
        let c = random_subset(g.n(), size, seed);
        let weak = g.weak_diameter(&c).unwrap();
        if let Some(strong) = g.strong_diameter(&c).finite() {
            prop_assert!(strong >= weak);
        }
    }

    #[test]
    fn shortest_path_forest_paths_have_their_length(g in graph_with_zeros(20), seed in any::<u64>(), k in 1usize..4) {
        let sources = random_subset(g.n(), k, seed);
        let spf = g.shortest_path_forest(&sources);
        for v in 0..g.n() {
            let path = spf.path_to_root(v).unwrap();
            let owner = *path.last().unwrap();
            prop_assert_eq!(Some(owner), spf.owner[v]);
            prop_assert!(sources.contains(&owner));
            let len: u64 = path.windows(2).map(|w| g.weight(w[0], w[1]).unwrap()).sum();
            prop_assert_eq!(Some(len), spf.dist[v]);
            let best = sources.iter().map(|&s| g.dist(s, v).unwrap()).min().unwrap();
            prop_assert_eq!(len, best);
        }
    }

    #[test]
    fn quotient_edges_are_lightest_crossings(g in graph(20), seed in any::<u64>(), cap in 1usize..6) {
        let p = random_partition(&g, cap, seed);
        let q = quotient(&g, &p);
        for x in 0..p.len() {
            for y in x + 1..p.len() {
                let lightest = g
                    .edges()
                    .iter()
                    .filter(|e| {
                        let (a, b) = (p.cluster_of(e.u).unwrap(), p.cluster_of(e.v).unwrap());
                        (a.min(b), a.max(b)) == (x, y)
                    })
                    .map(|e| e.w)
                    .min();
                let got = q.edge(x, y);
                prop_assert_eq!(got.map(|e| e.w), lightest);
                if let Some(e) = got {
                    prop_assert_eq!(g.weight(e.witness.u, e.witness.v), Some(e.w));
                    prop_assert_eq!(p.cluster_of(e.endpoint_in(&p, x)), Some(x));
                    prop_assert_eq!(p.cluster_of(e.endpoint_in(&p, y)), Some(y));
                }
            }
        }
    }

    #[test]
    fn restriction_keeps_only_the_subset(g in graph(20), seed in any::<u64>(), cap in 1usize..6, size in 0usize..20) {
        let p = random_partition(&g, cap, seed);
        let x = random_subset(g.n(), size, seed ^ 1);
        let r = p.restrict(&x);
        prop_assert_eq!(r.ground(), x.clone());
        for c in r.clusters() {
            let home = p.cluster_of(c[0]);
            prop_assert!(c.iter().all(|&v| p.cluster_of(v) == home));
        }
        let mut union: Vec<usize> = r.clusters().iter().flatten().copied().collect();
        union.sort_unstable();
        prop_assert_eq!(union, x);
        prop_assert!(p.coarsens(&Partition::singletons(0..g.n())));
    }

    #[test]
    fn hierarchies_validate(g in graph(24), root in any::<prop::sample::Index>(), k in 1u32..4) {
        let root = root.index(g.n());
        let params = GeneralParams { k: Some(k), ..GeneralParams::default() };
        let gh = build_hierarchy(&g, root, params).unwrap();
        let report = validate_hierarchy(&g, &gh.hierarchy);
        prop_assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn optimum_is_at_most_the_projection(g in graph_with_zeros(10), seed in any::<u64>(), size in 1usize..6) {
        let gh = build_hierarchy(&g, 0, GeneralParams::default()).unwrap();
        let t = build_ust(&g, &gh.hierarchy).unwrap().forest;
        let x = random_subset(g.n(), size, seed);
        let mut with_root = x.clone();
        with_root.push(0);
        let opt = opt_steiner(&g, &with_root).unwrap().cost;
        prop_assert!(opt <= projection_cost(&g, &t, 0, &x).unwrap());
    }

    #[test]
    fn optimum_is_monotone(g in graph(10), seed in any::<u64>(), size in 1usize..8, drop in 0usize..8) {
        let big = random_subset(g.n(), size, seed);
        let small: Vec<usize> = big.iter().copied().take(big.len().saturating_sub(drop).max(1)).collect();
        prop_assert!(opt_steiner(&g, &small).unwrap().cost <= opt_steiner(&g, &big).unwrap().cost);
    }

    #[test]
    fn forests_hold_one_portal_per_component(g in graph(24), seed in any::<u64>(), k in 1usize..5) {
        let gh = build_hierarchy(&g, 0, GeneralParams::default()).unwrap();
        let s = random_subset(g.n(), k, seed);
        let run = build_forest(&g, &s, &gh.hierarchy.levels).unwrap();
        let f = run.forest.validate(&g).unwrap();
        prop_assert_eq!(f.components(), s.len());
    }

    #[test]
    fn files_round_trip(g in graph_with_zeros(20), seed in any::<u64>(), cap in 1usize..6) {
        let text = io::write_graph(&g, &GraphMeta::default());
        let (back, _) = io::read_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(io::write_graph(&back, &GraphMeta::default()), text);

        let p = random_partition(&g, cap, seed);
        let pt = io::write_partition(&p);
        prop_assert_eq!(io::write_partition(&io::read_partition(&pt).unwrap()), pt);

        let gh = build_hierarchy(&g, 0, GeneralParams::default()).unwrap();
        let ht = io::write_hierarchy(&gh.hierarchy, g.n());
        let (h2, n) = io::read_hierarchy(&ht).unwrap();
        prop_assert_eq!(n, g.n());
        prop_assert_eq!(&h2, &gh.hierarchy);
        prop_assert_eq!(io::write_hierarchy(&h2, n), ht);

        let t = build_ust(&g, &gh.hierarchy).unwrap().forest;
        let tt = io::write_tree(&t);
        let t2 = io::read_tree(&tt).unwrap();
        prop_assert_eq!(&t2, &t);
        prop_assert_eq!(io::write_tree(&t2), tt);
    }
}
