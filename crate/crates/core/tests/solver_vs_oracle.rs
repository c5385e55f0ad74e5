use rainbow_ham::gen::{build_extremal, case2_probe, case3_probe, random_instance, Base, BuilderKind, GenSpec, Model};
use rainbow_ham::model::validate_path_certificate;
use rainbow_ham::oracle::{exact_rainbow_ham_path, Decision, OracleOptions};
use rainbow_ham::solver::{max_forest_edges, solve, SolverOutcome, Stage};
use rainbow_ham::structures::verify_certificate;
use rainbow_ham::{ExtremalKind, Instance};

fn models() -> Vec<Model> {
    vec![
        Model::UniformSupergraph { p: 0.3 },
        Model::UniformSupergraph { p: 0.6 },
        Model::Identical {
            base: Base::Random { p: 0.4 },
        },
        Model::Identical { base: Base::Complete },
    ]
}

fn check(inst: &Instance, with_oracle: bool) -> SolverOutcome {
    let sol = solve(&inst.collection, &inst.forest, inst.u, inst.v, inst.k)
        .unwrap_or_else(|e| panic!("{e}\n{}", inst.to_json_string()));
    match &sol.outcome {
        SolverOutcome::Path(p) => assert!(validate_path_certificate(&inst.collection, p, Some(&inst.forest))),
        SolverOutcome::Extremal(c) => assert!(verify_certificate(&inst.collection, &inst.forest, c).unwrap()),
    }
    assert!(sol.trace.iter().all(|r| r.holds()), "{:?}", sol.trace);
    if with_oracle {
        let (d, _) =
            exact_rainbow_ham_path(&inst.collection, inst.u, inst.v, &inst.forest, &OracleOptions::default()).unwrap();
        match d {
            Decision::Found(_) => assert!(sol.outcome.is_path(), "oracle found a path the solver missed"),
            Decision::NotFound => assert!(!sol.outcome.is_path()),
            Decision::Unknown => panic!("oracle budget exhausted"),
        }
    }
    sol.outcome
}

#[test]
fn random_instances_agree_with_oracle() {
    let mut seed = 0;
    for n in 5..=8 {
        for k in 0..=max_forest_edges(n).unwrap().min(1) {
            for model in models() {
                for _ in 0..6 {
                    seed += 1;
                    let inst = random_instance(&GenSpec { n, k, model, seed }).unwrap();
                    check(&inst, true);
                }
            }
        }
    }
}

#[test]
fn larger_forests_validate() {
    for (n, k) in [(10, 2), (13, 3), (16, 4), (19, 5)] {
        for (i, model) in models().into_iter().enumerate() {
            for s in 0..3 {
                let inst = random_instance(&GenSpec {
                    n,
                    k,
                    model,
                    seed: 100 * i as u64 + s,
                })
                .unwrap();
                check(&inst, false);
            }
        }
    }
}

#[test]
fn forest_extremal_builds_are_reported() {
    for (kind, n, k, want) in [
        (BuilderKind::C2, 7, 1, ExtremalKind::C2),
        (BuilderKind::C2, 10, 2, ExtremalKind::C2),
        (BuilderKind::C3, 7, 1, ExtremalKind::C3),
        (BuilderKind::C3, 10, 2, ExtremalKind::C3),
    ] {
        let inst = build_extremal(kind, n, k).unwrap().instance;
        match check(&inst, n <= 8) {
            SolverOutcome::Extremal(c) => assert_eq!(c.kind, want),
            other => panic!("{kind:?}: {other:?}"),
        }
    }
}

#[test]
fn clique_split_probes_detour_through_the_forest() {
    for (n, k, a, q, in_y) in [
        (7, 1, 2, 1, 0),
        (7, 1, 2, 1, 1),
        (7, 1, 1, 1, 0),
        (10, 2, 3, 2, 0),
        (10, 2, 3, 2, 1),
        (10, 2, 1, 2, 1),
        (10, 2, 5, 2, 0),
        (13, 3, 2, 3, 2),
        (13, 3, 4, 2, 1),
    ] {
        let inst = case2_probe(n, k, a, q, in_y).unwrap();
        assert!(inst.collection.check_hypothesis(k).unwrap());
        let sol = solve(&inst.collection, &inst.forest, inst.u, inst.v, k).unwrap();
        assert!(sol.outcome.is_path(), "{n} {k} {a} {q} {in_y}: {:?}", sol.outcome);
        assert!(sol.trace.iter().any(|r| r.stage == Stage::Case2));
        check(&inst, n <= 10);
    }
}

#[test]
fn heavy_side_probes_route_through_the_split() {
    for (n, k, q, in_y, sparse) in [
        (7, 1, 1, 1, false),
        (10, 2, 1, 1, true),
        (10, 2, 2, 1, false),
        (10, 2, 2, 1, true),
        (10, 2, 2, 2, true),
        (13, 3, 3, 1, true),
        (13, 3, 3, 2, false),
        (16, 4, 4, 1, true),
        (16, 4, 3, 3, true),
    ] {
        let inst = case3_probe(n, k, q, in_y, sparse).unwrap();
        let sol = solve(&inst.collection, &inst.forest, inst.u, inst.v, k).unwrap();
        assert!(sol.outcome.is_path(), "{n} {k} {q} {in_y}: {:?}", sol.outcome);
        assert!(sol.trace.iter().any(|r| r.stage == Stage::Case3));
        check(&inst, n <= 10);
    }
}
