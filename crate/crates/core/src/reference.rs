//! Reference networks for examples, tests and benchmarks.

use crate::data::{forward_sample, Dataset, FittedNetwork};
use crate::error::Result;
use crate::graph::parse_modelstring;

/// Six-node discrete network with two v-structures and one reversible arc.
pub const LEARNING_TEST_MODEL: &str = "[A][C][F][B|A][D|A:C][E|B:F]";

const LEARNING_TEST_JSON: &str = include_str!("../data/learning_test.json");

/// The learning-test network with its fixed, strongly informative CPTs.
pub fn learning_test_network() -> FittedNetwork {
    FittedNetwork::from_json(LEARNING_TEST_JSON).expect("bundled network is valid")
}

/// `n` rows sampled from the learning-test network.
pub fn learning_test(n: usize, seed: u64) -> Result<Dataset> {
    forward_sample(&learning_test_network(), n, seed)
}

/// The 37-node ALARM monitoring network.
pub const ALARM_MODEL: &str = concat!(
    "[HIST|LVF][CVP|LVV][PCWP|LVV][HYP][LVV|HYP:LVF][LVF][STKV|HYP:LVF][ERLO]",
    "[HRBP|ERLO:HR][HREK|ERCA:HR][ERCA][HRSA|ERCA:HR][ANES][APL][TPR|APL]",
    "[ECO2|ACO2:VLNG][KINK][MINV|INT:VLNG][FIO2][PVS|FIO2:VALV][SAO2|PVS:SHNT]",
    "[PAP|PMB][PMB][SHNT|INT:PMB][INT][PRSS|INT:KINK:VTUB][DISC][MVS][VMCH|MVS]",
    "[VTUB|DISC:VMCH][VLNG|INT:KINK:VTUB][VALV|INT:VLNG][ACO2|VALV]",
    "[CCHL|ACO2:ANES:SAO2:TPR][HR|CCHL][CO|HR:STKV][BP|CO:TPR]"
);

/// Number of levels of each ALARM variable.
pub const ALARM_LEVELS: [(&str, usize); 37] = [
    ("HIST", 2),
    ("CVP", 3),
    ("PCWP", 3),
    ("HYP", 2),
    ("LVV", 3),
    ("LVF", 2),
    ("STKV", 3),
    ("ERLO", 2),
    ("HRBP", 3),
    ("HREK", 3),
    ("ERCA", 2),
    ("HRSA", 3),
    ("ANES", 2),
    ("APL", 2),
    ("TPR", 3),
    ("ECO2", 3),
    ("KINK", 2),
    ("MINV", 4),
    ("FIO2", 2),
    ("PVS", 3),
    ("SAO2", 3),
    ("PAP", 3),
    ("PMB", 2),
    ("SHNT", 2),
    ("INT", 3),
    ("PRSS", 4),
    ("DISC", 2),
    ("MVS", 3),
    ("VMCH", 4),
    ("VTUB", 4),
    ("VLNG", 4),
    ("VALV", 4),
    ("ACO2", 3),
    ("CCHL", 2),
    ("HR", 3),
    ("CO", 3),
    ("BP", 3),
];

/// ALARM with random CPTs: Dirichlet(0.5) rows with every cell at least
/// 0.05.
pub fn alarm_network(seed: u64) -> Result<FittedNetwork> {
    let g = parse_modelstring(ALARM_MODEL, None)?;
    let levels: Vec<usize> = g
        .nodes()
        .iter()
        .map(|n| ALARM_LEVELS.iter().find(|(l, _)| l == n).map(|(_, k)| *k).expect("every node has levels"))
        .collect();
    FittedNetwork::random_discrete(&g, &levels, 0.5, 0.05, seed)
}

/// `n` rows sampled from [`alarm_network`] with the same seed.
pub fn alarm(n: usize, seed: u64) -> Result<Dataset> {
    forward_sample(&alarm_network(seed)?, n, seed)
}
