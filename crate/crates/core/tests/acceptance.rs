//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use vqe_partition::baranyai::{
    advance, binomial, build_schedule, build_schedule_with, build_step_network, pad_and_build,
    FlowEngine, PartialState, Schedule,
};
use vqe_partition::flow::{max_flow_integral, round_flow};
use vqe_partition::oracles::{
    all_subsets4, validate_families, validate_schedule, verify_anticommuting_chain,
    verify_disjoint_commutation, verify_jw_against_matrices,
};
use vqe_partition::partition::commuting_families;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Exact cover of all 4-subsets with rounds of `n / 4` disjoint subsets.
fn check_n8_structure(s: &Schedule) -> Result<(), String> {
    let report = validate_schedule(s);
    ensure(report.passed, || {
        format!("validation failed: {:?}", report.first_violation)
    })?;
    ensure(s.rounds.len() == 35, || {
        format!("{} rounds", s.rounds.len())
    })?;
    ensure(s.rounds.iter().all(|r| r.subsets.len() == 2), || {
        "round size != 2".into()
    })?;
    ensure(s.subset_count() == 70, || {
        format!("{} subsets", s.subset_count())
    })
}

fn table_scale() -> Outcome {
    let start = Instant::now();
    let ours = build_schedule(8).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check_n8_structure(&ours)?;
    check_n8_structure(&common::reference_schedule_fixture())
        .map_err(|e| format!("table fixture: {e}"))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "35 rounds x 2 disjoint subsets, 70 covered once; fixture valid; {elapsed:.2?}"
    ))
}

fn interleavings() -> Outcome {
    let start = Instant::now();
    let r = verify_disjoint_commutation();
    let elapsed = start.elapsed();
    ensure(r.passed, || "some cross pair anticommutes".into())?;
    ensure(r.case_count == 70, || format!("{} cases", r.case_count))?;
    ensure(r.pairs_checked == 70 * 256, || {
        format!("{} pairs", r.pairs_checked)
    })?;
    let all_even = r
        .cases
        .iter()
        .all(|c| c.anticommuting_counts.iter().all(|k| k % 2 == 0));
    ensure(all_even, || "odd anticommuting count".into())?;
    let attains = |k| r.cases.iter().any(|c| c.anticommuting_counts.contains(&k));
    ensure(attains(0) && attains(6), || "0 or 6 not attained".into())?;
    ensure(r.max_count == 6, || format!("max count {}", r.max_count))?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "70 cases x 256 pairs commute; counts even in [{}, {}]; {elapsed:.2?}",
        r.min_count, r.max_count
    ))
}

fn jw_correctness() -> Outcome {
    let mut parts = Vec::new();
    for n in [4, 5] {
        let r = verify_jw_against_matrices(n);
        ensure(r.passed, || format!("n={n}: {:?}", r.failures.first()))?;
        ensure(r.max_abs_diff == 0.0, || {
            format!("n={n}: diff {}", r.max_abs_diff)
        })?;
        ensure(
            r.distinct_excitations == binomial(n as u64, 4) as usize * 6,
            || format!("n={n}: {} distinct excitations", r.distinct_excitations),
        )?;
        parts.push(format!(
            "n={n}: {} one-body, {} two-body exact",
            r.one_body_terms, r.two_body_terms
        ));
    }
    Ok(parts.join("; "))
}

fn family_certification() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for n in [4usize, 8, 12] {
        let schedule = build_schedule(n).map_err(|e| e.to_string())?;
        let families = commuting_families(&schedule).map_err(|e| e.to_string())?;
        let report = validate_families(&families);
        ensure(report.passed, || {
            format!("n={n}: {:?}", report.first_violation)
        })?;
        let want = 2 * binomial(n as u64 - 1, 3) as usize;
        ensure(families.len() == want, || {
            format!("n={n}: {} families, want {want}", families.len())
        })?;
        ensure(families.iter().all(|f| f.len() == 2 * n), || {
            format!("n={n}: family size != {}", 2 * n)
        })?;
        parts.push(format!("N={n}: {} families of {}", families.len(), 2 * n));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{}; {elapsed:.2?}", parts.join(", ")))
}

fn scaling_counts() -> Outcome {
    let mut parts = Vec::new();
    for n in [8usize, 12, 16, 20] {
        let schedule = build_schedule(n).map_err(|e| e.to_string())?;
        let families = commuting_families(&schedule).map_err(|e| e.to_string())?;
        let rounds = binomial(n as u64 - 1, 3) as usize;
        ensure(families.len() == 2 * rounds, || {
            format!("N={n}: {} families", families.len())
        })?;
        let strings: usize = families.iter().map(|f| f.len()).sum();
        ensure(strings == 16 * binomial(n as u64, 4) as usize, || {
            format!("N={n}: {strings} strings")
        })?;
        ensure(strings == 2 * n * families.len(), || {
            format!("N={n}: strings/family != 2N")
        })?;
        parts.push(format!(
            "N={n}: {}/{}",
            strings / families.len(),
            families.len() / rounds
        ));
    }
    Ok(format!(
        "strings-per-family/families-per-round {}",
        parts.join(" ")
    ))
}

fn engine_equivalence() -> Outcome {
    let mut state = PartialState::initial(8).map_err(|e| e.to_string())?;
    let mut values = Vec::new();
    for _ in 0..8 {
        let step = build_step_network(&state).map_err(|e| e.to_string())?;
        let rounded = round_flow(&step.network, &step.seed).map_err(|e| e.to_string())?;
        let baseline = max_flow_integral(&step.network);
        let a = rounded.integral_value(&step.network);
        let b = baseline.integral_value(&step.network);
        ensure(a == Some(35) && b == Some(35), || {
            format!("step {}: {a:?} vs {b:?}", step.element)
        })?;
        values.push(35);
        state = advance(&state, FlowEngine::Rounding).map_err(|e| e.to_string())?;
    }
    for engine in [FlowEngine::Rounding, FlowEngine::Baseline] {
        let s = build_schedule_with(8, engine).map_err(|e| e.to_string())?;
        check_n8_structure(&s).map_err(|e| format!("{engine:?}: {e}"))?;
    }
    Ok(format!(
        "{} steps at value 35 for both engines; both schedules valid",
        values.len()
    ))
}

fn rounding_contract() -> Outcome {
    let mut fractional = 0;
    for seed in 0..1000u64 {
        let case = common::random_rounding_case(seed, 32);
        if !case.flow.is_integral() {
            fractional += 1;
        }
        common::check_rounding(&case).map_err(|e| format!("case {seed}: {e}"))?;
    }
    Ok(format!(
        "1000 cases, {fractional} with fractional seeds, zero failures"
    ))
}

fn chain_fixture() -> Outcome {
    for n in 1..=8 {
        let r = verify_anticommuting_chain(n);
        ensure(r.passed, || {
            format!("n={n}: {} commuting pairs", r.commuting_pairs)
        })?;
    }
    Ok("n=1..8: no distinct pair commutes".into())
}

fn padding() -> Outcome {
    for n in [5usize, 6, 7, 9] {
        let s = pad_and_build(n).map_err(|e| e.to_string())?;
        let report = validate_schedule(&s);
        ensure(report.passed, || {
            format!("n={n}: {:?}", report.first_violation)
        })?;
        ensure(s.subset_count() == all_subsets4(n).len(), || {
            format!("n={n}: count")
        })?;
    }
    Ok("n=5,6,7,9 exact cover with disjoint rounds".into())
}

fn min_build_time(n: usize, reps: usize) -> Result<f64, String> {
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let start = Instant::now();
        let s = build_schedule(n).map_err(|e| e.to_string())?;
        best = best.min(start.elapsed().as_secs_f64());
        std::hint::black_box(s);
    }
    Ok(best)
}

fn runtime_scaling() -> Outcome {
    let model = |n: f64| n.powi(5) * n.ln();
    let t8 = min_build_time(8, 30)?;
    let t16 = min_build_time(16, 10)?;
    let t24 = min_build_time(24, 5)?;
    let mut parts = Vec::new();
    for (lo, hi, tlo, thi) in [(8.0, 16.0, t8, t16), (16.0, 24.0, t16, t24)] {
        let observed = thi / tlo;
        let expected = model(hi) / model(lo);
        ensure(
            observed >= expected / 4.0 && observed <= expected * 4.0,
            || format!("{lo}->{hi}: observed {observed:.1}, expected {expected:.1}"),
        )?;
        parts.push(format!("{lo}->{hi}: {observed:.1} (model {expected:.1})"));
    }
    Ok(parts.join(", "))
}

fn main() -> ExitCode {
    // Build once so the first timed run does not pay for thread-pool setup.
    let _ = build_schedule(8).map(|s| commuting_families(&s));
    let criteria: [Criterion; 10] = [
        ("1 table-scale schedule", table_scale),
        ("2 exhaustive interleavings", interleavings),
        ("3 jordan-wigner vs dense matrices", jw_correctness),
        ("4 family certification", family_certification),
        ("5 family scaling", scaling_counts),
        ("6 flow-engine equivalence", engine_equivalence),
        ("7 rounding contract", rounding_contract),
        ("8 anticommuting chain", chain_fixture),
        ("9 padding", padding),
        ("10 runtime scaling", runtime_scaling),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
