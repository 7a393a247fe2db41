//! Shared generators for integration tests and the acceptance harness.
#![allow(dead_code)]

use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use vqe_partition::baranyai::Schedule;
use vqe_partition::flow::{FlowNetwork, ScaledFlow};
use vqe_partition::partition::parse_schedule_text;

pub fn reference_schedule_fixture() -> Schedule {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_schedule_n8.txt");
    let text = std::fs::read_to_string(path).expect("fixture readable");
    parse_schedule_text(8, &text).expect("fixture parses")
}

/// A two-layer network with a fractional feasible flow of denominator `d`
/// whose terminal edges are integral.
pub struct RoundingCase {
    pub network: FlowNetwork,
    pub flow: ScaledFlow,
    pub value: u64,
}

/// Random integral transportation plan with the given margins.
fn random_plan(rng: &mut StdRng, supply: &[u64], demand: &[u64]) -> Vec<Vec<u64>> {
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let mut cells: Vec<(usize, usize)> = (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |k| (i, k)))
        .collect();
    cells.shuffle(rng);
    let mut plan = vec![vec![0; b.len()]; a.len()];
    for (i, k) in cells {
        let t = a[i].min(b[k]);
        plan[i][k] += t;
        a[i] -= t;
        b[k] -= t;
    }
    plan
}

/// Averages `d` random plans sharing integral margins, so every interior
/// edge carries a multiple of `1/d` and the margins stay whole.
pub fn random_rounding_case(seed: u64, max_d: u64) -> RoundingCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let d = rng.gen_range(1..=max_d);
    let left = rng.gen_range(1..=6);
    let right = rng.gen_range(1..=6);
    let supply: Vec<u64> = (0..left).map(|_| rng.gen_range(0..=4)).collect();
    let total: u64 = supply.iter().sum();
    let mut demand = vec![0u64; right];
    for _ in 0..total {
        demand[rng.gen_range(0..right)] += 1;
    }
    let mut sum = vec![vec![0u64; right]; left];
    let mut peak = vec![vec![0u64; right]; left];
    for _ in 0..d {
        let plan = random_plan(&mut rng, &supply, &demand);
        for i in 0..left {
            for k in 0..right {
                sum[i][k] += plan[i][k];
                peak[i][k] = peak[i][k].max(plan[i][k]);
            }
        }
    }
    let source = 0;
    let sink = left + right + 1;
    let mut network = FlowNetwork::new(left + right + 2, source, sink).unwrap();
    let mut numerators = Vec::new();
    for (i, &s) in supply.iter().enumerate() {
        network
            .add_edge(source, 1 + i, s + rng.gen_range(0..=1))
            .unwrap();
        numerators.push(s * d);
    }
    for i in 0..left {
        for k in 0..right {
            if peak[i][k] == 0 && rng.gen_bool(0.5) {
                continue;
            }
            network
                .add_edge(1 + i, 1 + left + k, peak[i][k] + rng.gen_range(0..=1))
                .unwrap();
            numerators.push(sum[i][k]);
        }
    }
    for (k, &b) in demand.iter().enumerate() {
        network.add_edge(1 + left + k, sink, b).unwrap();
        numerators.push(b * d);
    }
    RoundingCase {
        network,
        flow: ScaledFlow {
            denominator: d,
            numerators,
        },
        value: total,
    }
}

/// Checks the rounding contract; `Err` names the first broken clause.
pub fn check_rounding(case: &RoundingCase) -> Result<(), String> {
    case.flow
        .check_feasible(&case.network)
        .map_err(|e| format!("generated seed infeasible: {e}"))?;
    let rounded =
        vqe_partition::flow::round_flow(&case.network, &case.flow).map_err(|e| e.to_string())?;
    if !rounded.is_integral() {
        return Err("output not integral".into());
    }
    rounded
        .check_feasible(&case.network)
        .map_err(|e| format!("output infeasible: {e}"))?;
    if rounded.integral_value(&case.network) != Some(case.value) {
        return Err(format!(
            "value {:?} != {}",
            rounded.integral_value(&case.network),
            case.value
        ));
    }
    let d = case.flow.denominator;
    let r = rounded.denominator;
    for (e, (&x, &y)) in case
        .flow
        .numerators
        .iter()
        .zip(&rounded.numerators)
        .enumerate()
    {
        let whole = y / r;
        if whole != x / d && whole != x.div_ceil(d) {
            return Err(format!(
                "edge {e} moved beyond floor/ceil: {x}/{d} -> {whole}"
            ));
        }
    }
    Ok(())
}
