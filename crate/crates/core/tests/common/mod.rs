#![allow(dead_code)]

use bnsl::data::{forward_sample, Column, FittedNetwork, Local};
use bnsl::graph::Graph;
use bnsl::hc::enumerate_moves;
use bnsl::{normalize_priors, network_score, Dataset, PriorKnowledge, ScoreSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("N{i}")).collect()
}

/// DAG on `n` nodes: a random topological order, each forward pair joined
/// with probability `p`.
pub fn random_dag(r: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let names = labels(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(p) {
                arcs.push((names[order[i]].as_str(), names[order[j]].as_str()));
            }
        }
    }
    let nodes: Vec<&str> = names.iter().map(String::as_str).collect();
    Graph::from_arcs(&nodes, &arcs, &[]).unwrap()
}

/// Discrete data from a random DAG with Dirichlet CPTs.
pub fn random_discrete_data(seed: u64, nodes: usize, rows: usize) -> Dataset {
    let mut r = rng(seed);
    let g = random_dag(&mut r, nodes, 0.4);
    let levels: Vec<usize> = (0..nodes).map(|_| r.random_range(2..=4)).collect();
    let net = FittedNetwork::random_discrete(&g, &levels, 1.0, 0.02, seed).unwrap();
    forward_sample(&net, rows, seed).unwrap()
}

/// Gaussian data from a random DAG with coefficients in ±[0.5, 1.5].
pub fn random_gaussian_data(seed: u64, nodes: usize, rows: usize) -> Dataset {
    let mut r = rng(seed);
    let g = random_dag(&mut r, nodes, 0.5);
    let locals = (0..nodes)
        .map(|i| {
            let parents: Vec<String> = g.parents_of(i).iter().map(|&p| g.label(p).to_string()).collect();
            let coefficients = parents
                .iter()
                .map(|_| r.random_range(0.5..1.5) * if r.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            Local::Gaussian { parents, intercept: r.random_range(-1.0..1.0), coefficients, sd: 1.0 }
        })
        .collect();
    forward_sample(&FittedNetwork::new(g, locals).unwrap(), rows, seed).unwrap()
}

/// Independent categorical columns with the given level counts.
pub fn independent_discrete(r: &mut ChaCha8Rng, levels: &[usize], rows: usize) -> Dataset {
    let names = labels(levels.len());
    let columns = levels
        .iter()
        .map(|&k| Column::Categorical {
            levels: (0..k).map(|l| format!("l{l}")).collect(),
            codes: (0..rows).map(|_| r.random_range(0..k as u32)).collect(),
        })
        .collect();
    Dataset::new(names, columns).unwrap()
}

/// Every DAG on the given nodes, by brute force over arc states.
pub fn all_dags(names: &[&str]) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> =
        (0..names.len()).flat_map(|i| (i + 1..names.len()).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut c = code;
        let mut arcs = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => arcs.push((names[i], names[j])),
                2 => arcs.push((names[j], names[i])),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(g) = Graph::from_arcs(names, &arcs, &[]) {
            if g.is_acyclic() {
                out.push(g);
            }
        }
    }
    out
}

/// Hill climbing that rescores the whole network for every candidate move.
/// Returns the description of each step taken.
pub fn full_rescore_climb(d: &Dataset, spec: &ScoreSpec) -> Vec<String> {
    let cons = normalize_priors(&PriorKnowledge::default(), d.names()).unwrap();
    let mut g = Graph::new(d.names().iter()).unwrap();
    let mut score = network_score(&g, d, spec).unwrap();
    let mut steps = Vec::new();
    loop {
        let moves = enumerate_moves(&g, &cons);
        let deltas: Vec<f64> = moves
            .iter()
            .map(|mv| network_score(&mv.apply(&g).unwrap(), d, spec).unwrap() - score)
            .collect();
        let Some(best) = deltas.iter().copied().reduce(f64::max) else { break };
        if best <= 1e-10 * (1.0 + score.abs()) {
            break;
        }
        let cut = best - 1e-9 * (1.0 + score.abs());
        let pick = deltas.iter().position(|&x| x >= cut).unwrap();
        steps.push(moves[pick].describe(&g));
        g = moves[pick].apply(&g).unwrap();
        score = network_score(&g, d, spec).unwrap();
    }
    steps
}
