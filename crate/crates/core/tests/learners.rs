mod common;

use std::collections::BTreeSet;

use bnsl::constraint::{learn_markov_blanket, neighbourhood_from_mb, orient_vstructures, symmetry_correction, NodeSets};
use bnsl::graph::{cpdag, format_modelstring, parse_modelstring, Graph};
use bnsl::reference::{learning_test, LEARNING_TEST_MODEL};
use bnsl::*;
use common::*;

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn skeleton(g: &Graph) -> BTreeSet<(String, String)> {
    g.arc_list().into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect()
}

#[test]
fn blankets_of_the_reference_network() {
    let d = learning_test(5000, 1).unwrap();
    for algo in [Algorithm::Gs, Algorithm::Iamb, Algorithm::FastIamb, Algorithm::InterIamb] {
        let cfg = LearnConfig::new(algo, TestKind::Mi);
        let mut mb = learn_markov_blanket("B", &d, &cfg, &[], &[]).unwrap();
        mb.sort();
        assert_eq!(mb, strings(&["A", "E", "F"]), "{algo}");
    }
    let pc = learn_markov_blanket("B", &d, &LearnConfig::new(Algorithm::Mmpc, TestKind::Mi), &[], &[]).unwrap();
    assert_eq!(BTreeSet::from_iter(pc), BTreeSet::from_iter(strings(&["A", "E"])));
}

#[test]
fn known_good_nodes_stay_and_known_bad_are_skipped() {
    let d = learning_test(2000, 2).unwrap();
    let cfg = LearnConfig::new(Algorithm::Gs, TestKind::Mi);
    let mb = learn_markov_blanket("B", &d, &cfg, &strings(&["C"]), &strings(&["A"])).unwrap();
    assert!(mb.contains(&"C".to_string()));
    assert!(!mb.contains(&"A".to_string()));
    assert!(learn_markov_blanket("B", &d, &cfg, &strings(&["A"]), &strings(&["A"])).is_err());
}

#[test]
fn stepwise_pipeline_matches_the_full_run() {
    let d = learning_test(5000, 1).unwrap();
    let cfg = LearnConfig::new(Algorithm::Gs, TestKind::Mi);
    let mut blankets = NodeSets::new();
    for x in d.names() {
        blankets.insert(x.clone(), learn_markov_blanket(x, &d, &cfg, &[], &[]).unwrap());
    }
    let blankets = symmetry_correction(&blankets);
    let mut skel = Graph::new(d.names().iter()).unwrap();
    let mut seps = bnsl::constraint::SeparatingSets::new();
    for x in d.names() {
        let (nbrs, dsep) = neighbourhood_from_mb(x, &blankets, &d, &cfg).unwrap();
        for y in nbrs {
            let rows = [skel.arc_list(), vec![(x.clone(), y.clone()), (y.clone(), x.clone())]].concat();
            skel = Graph::from_arc_list(d.names(), &rows).unwrap();
        }
        for (y, s) in dsep {
            seps.insert((x.clone(), y), s);
        }
    }
    let oriented = orient_vstructures(&skel, &seps, &d, &cfg).unwrap();
    let full = constraint_learn(&d, &cfg).unwrap().0;
    assert_eq!(bnsl::graph::extend_pdag(&oriented), full);
}

#[test]
fn trace_replays_through_the_public_test_api() {
    let d = learning_test(1500, 3).unwrap();
    for (test, b) in [(TestKind::Mi, 0), (TestKind::McX2, 199)] {
        let mut cfg = LearnConfig::new(Algorithm::Iamb, test);
        cfg.replicates = b;
        cfg.seed = 17;
        let (_, trace) = constraint_learn(&d, &cfg).unwrap();
        let mut replayed = 0;
        for e in trace.test_events() {
            if let TraceEvent::Test { x, y, z, statistic, p_value } = e {
                let r = ci_test(&d, x, y, z, test, b, cfg.seed).unwrap();
                assert_eq!(r.p_value, *p_value, "{x} vs {y} given {z:?}");
                assert_eq!(r.statistic, *statistic);
                replayed += 1;
            }
        }
        assert_eq!(replayed, trace.tests);
        assert!(replayed > 0);
    }
}

#[test]
fn parallel_blankets_give_the_sequential_graph() {
    let d = learning_test(3000, 4).unwrap();
    for algo in [Algorithm::Gs, Algorithm::FastIamb, Algorithm::Mmpc] {
        let mut cfg = LearnConfig::new(algo, TestKind::Mi);
        cfg.optimized = false;
        let (seq, _) = constraint_learn(&d, &cfg).unwrap();
        cfg.parallelism = 3;
        let (par, _) = constraint_learn(&d, &cfg).unwrap();
        assert_eq!(seq, par, "{algo}");
    }
}

#[test]
fn mmpc_recovers_the_skeleton_without_orienting() {
    let d = learning_test(5000, 1).unwrap();
    let truth = skeleton(&parse_modelstring(LEARNING_TEST_MODEL, None).unwrap());
    let (g, _) = constraint_learn(&d, &LearnConfig::new(Algorithm::Mmpc, TestKind::Mi)).unwrap();
    assert_eq!(skeleton(&g), truth);
    assert_eq!(g.n_directed(), 0);
}

#[test]
fn gaussian_chain_collider() {
    // X -> Z <- Y, Z -> W
    let g = parse_modelstring("[X][Y][Z|X:Y][W|Z]", None).unwrap();
    let locals = vec![
        bnsl::data::Local::Gaussian { parents: vec![], intercept: 0.0, coefficients: vec![], sd: 1.0 },
        bnsl::data::Local::Gaussian { parents: vec![], intercept: 1.0, coefficients: vec![], sd: 1.0 },
        bnsl::data::Local::Gaussian { parents: strings(&["X", "Y"]), intercept: 0.0, coefficients: vec![0.8, -0.7], sd: 1.0 },
        bnsl::data::Local::Gaussian { parents: strings(&["Z"]), intercept: 0.5, coefficients: vec![0.9], sd: 1.0 },
    ];
    let net = bnsl::data::FittedNetwork::new(g.clone(), locals).unwrap();
    let d = bnsl::data::forward_sample(&net, 2000, 8).unwrap();
    for test in [TestKind::Cor, TestKind::Zf, TestKind::MiG] {
        let (learned, _) = constraint_learn(&d, &LearnConfig::new(Algorithm::Gs, test)).unwrap();
        assert_eq!(learned, g, "{test}");
    }
    // the true network is a local optimum of the Gaussian score
    let mut cfg = HillClimbConfig::new(ScoreSpec::new(ScoreKind::Bge));
    cfg.start = Some(g.clone());
    assert_eq!(hill_climb(&d, &cfg).unwrap().0, g);
}

#[test]
fn gaussian_chain_from_empty_graph() {
    let g = parse_modelstring("[X][Y|X][Z|Y][W]", None).unwrap();
    let local = |parents: &[&str], coefficients: Vec<f64>| bnsl::data::Local::Gaussian {
        parents: strings(parents),
        intercept: 0.0,
        coefficients,
        sd: 1.0,
    };
    let locals = vec![local(&[], vec![]), local(&["X"], vec![0.9]), local(&["Y"], vec![-0.8]), local(&[], vec![])];
    let net = bnsl::data::FittedNetwork::new(g.clone(), locals).unwrap();
    let d = bnsl::data::forward_sample(&net, 2000, 3).unwrap();
    for kind in [ScoreKind::Bge, ScoreKind::Bic, ScoreKind::Loglik] {
        let (hc, _) = hill_climb(&d, &HillClimbConfig::new(ScoreSpec::new(kind))).unwrap();
        // this sample has W and Y mildly correlated given X (p = 0.005),
        // enough for a penalised likelihood to keep an extra arc
        assert!(skeleton(&hc).is_superset(&skeleton(&g)), "{kind}");
        if kind == ScoreKind::Bge {
            assert_eq!(cpdag(&hc).unwrap(), cpdag(&g).unwrap());
        }
    }
}

#[test]
fn restarts_never_lose_score() {
    let d = random_discrete_data(31, 6, 400);
    let spec = ScoreSpec::new(ScoreKind::Bic);
    let (plain, _) = hill_climb(&d, &HillClimbConfig::new(spec)).unwrap();
    let mut cfg = HillClimbConfig::new(spec);
    cfg.restarts = 5;
    cfg.perturb = 3;
    cfg.seed = 9;
    let (restarted, trace) = hill_climb(&d, &cfg).unwrap();
    let s0 = network_score(&plain, &d, &spec).unwrap();
    let s1 = network_score(&restarted, &d, &spec).unwrap();
    assert!(s1 >= s0 - 1e-9 * s0.abs());
    let restarts = trace.events.iter().filter(|e| matches!(e, TraceEvent::Phase(p) if p.starts_with("restart"))).count();
    assert_eq!(restarts, 5);
    assert_eq!(hill_climb(&d, &cfg).unwrap().0, restarted);
}

#[test]
fn fully_blacklisted_search_returns_the_start_graph() {
    let d = learning_test(500, 1).unwrap();
    let names = d.names();
    let mut blacklist = Vec::new();
    for a in names {
        for b in names {
            if a != b {
                blacklist.push((a.clone(), b.clone()));
            }
        }
    }
    let mut cfg = HillClimbConfig::new(ScoreSpec::new(ScoreKind::Bic));
    cfg.priors = PriorKnowledge::new(vec![], blacklist);
    let (g, trace) = hill_climb(&d, &cfg).unwrap();
    assert_eq!(g.n_arcs(), 0);
    assert!(!trace.events.iter().any(|e| matches!(e, TraceEvent::Step { .. })));
}

#[test]
fn start_graph_is_respected() {
    let d = learning_test(5000, 1).unwrap();
    let start = parse_modelstring(LEARNING_TEST_MODEL, None).unwrap();
    let mut cfg = HillClimbConfig::new(ScoreSpec::new(ScoreKind::Bic));
    cfg.start = Some(start.clone());
    let (g, _) = hill_climb(&d, &cfg).unwrap();
    assert_eq!(g, start);

    cfg.priors = PriorKnowledge::new(vec![], strings(&["A", "B"]).chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect());
    assert!(matches!(hill_climb(&d, &cfg), Err(Error::PriorConflict(_))));
}

// Greedy search is expected to miss the optimum sometimes; this reports how
// often it reaches the best class on exhaustively searchable problems.
#[test]
fn three_node_climbs_against_brute_force() {
    let names = ["X", "Y", "Z"];
    let dags = all_dags(&names);
    let spec = ScoreSpec::new(ScoreKind::Bic);
    let mut hits = 0;
    let runs = 40;
    for seed in 0..runs {
        let raw = random_discrete_data(700 + seed, 3, 300);
        let cols = (0..3).map(|i| raw.column(i).clone()).collect();
        let d = Dataset::new(strings(&names), cols).unwrap();
        let best = dags
            .iter()
            .map(|g| (network_score(g, &d, &spec).unwrap(), g))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        let (hc, _) = hill_climb(&d, &HillClimbConfig::new(spec)).unwrap();
        let s = network_score(&hc, &d, &spec).unwrap();
        assert!(s <= best.0 + 1e-9 * best.0.abs());
        if cpdag(&hc).unwrap() == cpdag(best.1).unwrap() {
            hits += 1;
        }
    }
    println!("hill climbing reached the optimal class in {hits}/{runs} three-node problems");
    assert!(hits > 0);
}

#[test]
fn debug_output_lists_every_phase() {
    let d = learning_test(1000, 1).unwrap();
    let (_, trace) = constraint_learn(&d, &LearnConfig::new(Algorithm::Gs, TestKind::Mi)).unwrap();
    let text = trace.to_string();
    for x in d.names() {
        assert!(text.contains(&format!("* learning markov blanket of {x} .")), "{x}");
    }
    assert!(text.contains("> testing"));
    let (g, _) = hill_climb(&d, &HillClimbConfig::new(ScoreSpec::new(ScoreKind::Bic))).unwrap();
    assert_eq!(g.provenance.algorithm.as_deref(), Some("Hill-Climbing"));
    assert!(format_modelstring(&g).is_ok());
}
