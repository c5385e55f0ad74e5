use proptest::prelude::*;

use rainbow_ham::gen::{build_b2, build_extremal, random_instance, BuilderKind, GenSpec, Model};
use rainbow_ham::model::{rainbow_assignment, sigma2_of, validate_cycle_certificate, validate_path_certificate};
use rainbow_ham::oracle::{exact_rainbow_ham_cycle, Decision, OracleOptions};
use rainbow_ham::solver::{exhaustive_rainbow_path, li2_dispatch, solve, Li2Outcome, SolverConfig, SolverOutcome};
use rainbow_ham::structures::{cycle_from_extremal, detect_identical_split, verify_certificate};
use rainbow_ham::{Edge, Graph, GraphCollection, Instance, RainbowLinearForest, Sigma2};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    Graph::from_edges(n, pairs(n).into_iter().zip(bits).filter(|(_, &b)| b).map(|(p, _)| p)).unwrap()
}

fn arb_graph(n: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| graph_from_bits(n, &bits))
}

fn arb_collection(n: usize, m: usize) -> impl Strategy<Value = GraphCollection> {
    proptest::collection::vec(arb_graph(n), m).prop_map(move |gs| GraphCollection::new(n, gs).unwrap())
}

fn brute_sigma2(g: &Graph) -> Sigma2 {
    let n = g.vertex_count();
    let mut best = None::<usize>;
    for a in 0..n {
        for b in 0..n {
            if a != b && !g.has_edge(a, b) {
                let da = (0..n).filter(|&z| g.has_edge(a, z)).count();
                let db = (0..n).filter(|&z| g.has_edge(b, z)).count();
                best = Some(best.map_or(da + db, |s| s.min(da + db)));
            }
        }
    }
    best.map_or(Sigma2::Infinite, Sigma2::Finite)
}

fn brute_injection(c: &GraphCollection, edges: &[Edge], used: &mut Vec<bool>, i: usize) -> bool {
    if i == edges.len() {
        return true;
    }
    for col in 0..c.color_count() {
        if !used[col] && c.has_edge(col, edges[i].lo(), edges[i].hi()) {
            used[col] = true;
            let ok = brute_injection(c, edges, used, i + 1);
            used[col] = false;
            if ok {
                return true;
            }
        }
    }
    false
}

fn brute_split(g: &Graph) -> bool {
    let n = g.vertex_count();
    (1u32..(1 << n) - 1).any(|mask| {
        let x: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let y: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        g.is_clique(&x) && g.is_clique(&y) && x.iter().all(|&a| y.iter().all(|&b| !g.has_edge(a, b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sigma2_matches_pairwise_scan(g in (2usize..10).prop_flat_map(arb_graph)) {
        prop_assert_eq!(sigma2_of(&g), brute_sigma2(&g));
    }

    #[test]
    fn rainbow_assignment_matches_injection_search(
        (c, picks) in (3usize..7).prop_flat_map(|n| (
            arb_collection(n, 6),
            proptest::sample::subsequence(pairs(n), 0..=8.min(n * (n - 1) / 2)),
        ))
    ) {
        let edges: Vec<Edge> = picks.iter().map(|&(a, b)| Edge::new(a, b)).collect();
        let got = rainbow_assignment(&c, &edges, &[]).unwrap();
        let want = brute_injection(&c, &edges, &mut vec![false; c.color_count()], 0);
        prop_assert_eq!(got.is_some(), want);
        if let Some(a) = got {
            prop_assert!(a.is_injective());
            prop_assert!(a.is_rainbow_in(&c));
            prop_assert_eq!(a.0.len(), edges.len());
        }
    }

    #[test]
    fn identical_split_detection_matches_bipartition_scan(
        (g, m) in (2usize..8).prop_flat_map(|n| (arb_graph(n), 1usize..4))
    ) {
        let n = g.vertex_count();
        let c = GraphCollection::identical(g.clone(), m);
        let got = detect_identical_split(&c);
        prop_assert_eq!(got.is_some(), brute_split(&g));
        if let Some((l, x, y)) = got {
            prop_assert_eq!(l, x.len());
            prop_assert_eq!(x.len() + y.len(), n);
        }
    }

    #[test]
    fn instance_json_round_trips(seed in any::<u64>(), n in 5usize..11, p in 0.2f64..0.9) {
        let k = (n - 4) / 3;
        let inst = random_instance(&GenSpec { n, k, model: Model::UniformSupergraph { p }, seed }).unwrap();
        let text = inst.to_json_string();
        let back = Instance::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn generated_instances_satisfy_their_contract(seed in any::<u64>(), n in 5usize..14, p in 0.1f64..0.9) {
        let k = (n - 4) / 3;
        let inst = random_instance(&GenSpec { n, k, model: Model::UniformSupergraph { p }, seed }).unwrap();
        prop_assert!(inst.collection.check_hypothesis(k).unwrap());
        prop_assert_eq!(inst.forest.edge_count(), k);
        prop_assert!(inst.forest.is_h_compatible(inst.u, inst.v));
        inst.forest.validate_against(&inst.collection).unwrap();
    }

    #[test]
    fn solver_certificates_validate(seed in any::<u64>(), n in 5usize..15, p in 0.1f64..0.8) {
        let k = (n - 4) / 3;
        let inst = random_instance(&GenSpec { n, k, model: Model::UniformSupergraph { p }, seed }).unwrap();
        let sol = solve(&inst.collection, &inst.forest, inst.u, inst.v, k).unwrap();
        match &sol.outcome {
            SolverOutcome::Path(cert) => prop_assert!(validate_path_certificate(&inst.collection, cert, Some(&inst.forest))),
            SolverOutcome::Extremal(cert) => prop_assert!(verify_certificate(&inst.collection, &inst.forest, cert).unwrap()),
        }
        prop_assert!(sol.trace.iter().all(|r| r.holds()));
    }

    #[test]
    fn dispatch_paths_are_rainbow_and_hamiltonian(seed in any::<u64>(), n in 3usize..10, p in 0.2f64..0.9) {
        let inst = random_instance(&GenSpec { n, k: 0, model: Model::UniformSupergraph { p }, seed }).unwrap();
        // drop one color so the dispatch sees n - 1 colors
        let graphs = inst.collection.graphs()[..n - 1].to_vec();
        let c = GraphCollection::new(n, graphs).unwrap();
        let cfg = SolverConfig { seed, ..SolverConfig::default() };
        match li2_dispatch(&c, &cfg).unwrap() {
            Li2Outcome::A1 { order, colors } => {
                let mut seen = order.clone();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
                let mut cs = colors.clone();
                cs.sort_unstable();
                cs.dedup();
                prop_assert_eq!(cs.len(), n - 1);
                for (w, &col) in order.windows(2).zip(&colors) {
                    prop_assert!(c.has_edge(col, w[0], w[1]));
                }
            }
            other => {
                prop_assert!(exhaustive_rainbow_path(&c, 10_000_000).unwrap().is_none(), "{:?}", other.label());
            }
        }
    }
}

#[test]
fn canonical_builds_verify() {
    let builds = [
        (BuilderKind::B3, 4, 0),
        (BuilderKind::B3, 6, 0),
        (BuilderKind::B3, 8, 0),
        (BuilderKind::C2, 7, 1),
        (BuilderKind::C2, 13, 3),
        (BuilderKind::C3, 7, 1),
        (BuilderKind::C3, 12, 2),
    ];
    for (kind, n, k) in builds {
        let b = build_extremal(kind, n, k).unwrap();
        assert!(
            verify_certificate(&b.instance.collection, &b.instance.forest, b.certificate.as_ref().unwrap()).unwrap(),
            "{kind:?} {n} {k}"
        );
    }
    for n in 4..=9 {
        let b = build_extremal(BuilderKind::B2, n, 0).unwrap();
        assert!(verify_certificate(&b.instance.collection, &RainbowLinearForest::empty(), b.certificate.as_ref().unwrap()).unwrap());
        for a in 1..n - 2 {
            let b = build_b2(n, a).unwrap();
            assert!(verify_certificate(&b.instance.collection, &RainbowLinearForest::empty(), b.certificate.as_ref().unwrap()).unwrap());
        }
    }
}

#[test]
fn extremal_cycles_are_valid_and_found_by_oracle() {
    let mut builds: Vec<_> = [4, 6, 8].iter().map(|&n| build_extremal(BuilderKind::B3, n, 0).unwrap()).collect();
    for n in 4..=8 {
        builds.push(build_extremal(BuilderKind::B2, n, 0).unwrap());
    }
    for b in builds {
        let c = &b.instance.collection;
        let cycle = cycle_from_extremal(c, b.certificate.as_ref().unwrap()).unwrap();
        assert!(validate_cycle_certificate(c, &cycle));
        let (d, _) = exact_rainbow_ham_cycle(c, &OracleOptions::default()).unwrap();
        assert!(matches!(d, Decision::Found(_)));
    }
}
