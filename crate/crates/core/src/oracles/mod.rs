//! Brute-force checks that do not share code paths with what they check.
//!
//! Commutation here is counted on the text form of the strings, schedules
//! are recounted from scratch, and Jordan-Wigner images are compared with
//! dense matrices built from 2×2 constants and occupation-number rules.

pub mod dense;

use std::collections::HashMap;

use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::baranyai::{binomial, Schedule};
use crate::fermion::{jw_excitation, jw_term, FermionicTerm, JwPattern};
use crate::partition::CommutingFamily;
use crate::pauli::{norm_sqr, PauliOp, PauliString};

use self::dense::{term_matrix, weighted_sum_matrix};

/// Positions where both characters are non-identity and differ.
fn text_anticommuting_count(a: &[u8], b: &[u8]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|&(&x, &y)| x != b'I' && y != b'I' && x != y)
        .count()
}

/// Independent pattern check on text: `X|Y` at endpoints, `Z` strictly
/// between the top two and between the bottom two, `I` elsewhere.
fn text_matches_pattern(s: &[u8], endpoints: [usize; 4]) -> bool {
    let mut e = endpoints;
    e.sort_unstable();
    let [s0, r0, q0, p0] = e;
    s.iter().enumerate().all(|(t, &ch)| {
        if e.contains(&t) {
            ch == b'X' || ch == b'Y'
        } else if (q0 < t && t < p0) || (s0 < t && t < r0) {
            ch == b'Z'
        } else {
            ch == b'I'
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InterleavingCase {
    pub first: [usize; 4],
    pub second: [usize; 4],
    /// Distinct anticommuting-index counts seen over the 256 cross pairs.
    pub anticommuting_counts: Vec<usize>,
    pub pairs_checked: usize,
    pub all_commute: bool,
    pub expansions_match_pattern: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointCommutationReport {
    pub passed: bool,
    pub case_count: usize,
    pub pairs_checked: usize,
    pub min_count: usize,
    pub max_count: usize,
    pub cases: Vec<InterleavingCase>,
}

/// Every way of splitting eight modes into two descending quadruples, each
/// side expanded to its 16 strings and all 256 cross pairs checked.
pub fn verify_disjoint_commutation() -> DisjointCommutationReport {
    const N: usize = 8;
    let mut cases = Vec::new();
    for mask in 0u32..(1 << N) {
        if mask.count_ones() != 4 {
            continue;
        }
        let mut first: Vec<usize> = (0..N).filter(|&t| mask >> t & 1 == 1).collect();
        let mut second: Vec<usize> = (0..N).filter(|&t| mask >> t & 1 == 0).collect();
        first.reverse();
        second.reverse();
        let first = [first[0], first[1], first[2], first[3]];
        let second = [second[0], second[1], second[2], second[3]];
        cases.push(check_disjoint_pair(N, first, second));
    }
    let pairs_checked = cases.iter().map(|c| c.pairs_checked).sum();
    let all_counts = cases
        .iter()
        .flat_map(|c| c.anticommuting_counts.iter().copied());
    let min_count = all_counts.clone().min().unwrap_or(0);
    let max_count = all_counts.max().unwrap_or(0);
    let passed = cases.len() == 70
        && cases
            .iter()
            .all(|c| c.all_commute && c.expansions_match_pattern && c.pairs_checked == 256);
    DisjointCommutationReport {
        passed,
        case_count: cases.len(),
        pairs_checked,
        min_count,
        max_count,
        cases,
    }
}

fn expand_text(n: usize, idx: [usize; 4]) -> Vec<Vec<u8>> {
    let term = FermionicTerm::two_body(idx[0], idx[1], idx[2], idx[3], n)
        .expect("descending distinct indices");
    jw_excitation(&term)
        .expect("distinct excitation")
        .into_iter()
        .map(|w| w.string.to_string().into_bytes())
        .collect()
}

/// Checks the 256 cross pairs between two index-disjoint excitations.
pub fn check_disjoint_pair(n: usize, first: [usize; 4], second: [usize; 4]) -> InterleavingCase {
    let a = expand_text(n, first);
    let b = expand_text(n, second);
    let expansions_match_pattern = a.len() == 16
        && b.len() == 16
        && a.iter().all(|s| text_matches_pattern(s, first))
        && b.iter().all(|s| text_matches_pattern(s, second));
    let mut counts = Vec::new();
    let mut pairs_checked = 0;
    let mut all_commute = true;
    for x in &a {
        for y in &b {
            let k = text_anticommuting_count(x, y);
            all_commute &= k.is_multiple_of(2);
            if !counts.contains(&k) {
                counts.push(k);
            }
            pairs_checked += 1;
        }
    }
    counts.sort_unstable();
    InterleavingCase {
        first,
        second,
        anticommuting_counts: counts,
        pairs_checked,
        all_commute,
        expansions_match_pattern,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JwMatrixReport {
    pub n: usize,
    pub passed: bool,
    pub one_body_terms: usize,
    pub two_body_terms: usize,
    pub distinct_excitations: usize,
    /// Largest elementwise deviation, exact arithmetic so 0.0 on success.
    pub max_abs_diff: f64,
    pub failures: Vec<String>,
}

/// Every one-body term and every two-body term with descending index pairs.
pub fn all_terms(n: usize) -> Vec<FermionicTerm> {
    let mut terms = Vec::new();
    for p in 0..n {
        for q in 0..n {
            terms.push(FermionicTerm::one_body(p, q, n).expect("in range"));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (0..p).map(move |q| (p, q))).collect();
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            terms.push(FermionicTerm::two_body(p, q, r, s, n).expect("in range"));
        }
    }
    terms
}

pub fn verify_jw_against_matrices(n: usize) -> JwMatrixReport {
    let mut failures = Vec::new();
    let mut max_abs_diff = 0.0f64;
    let (mut one_body, mut two_body, mut distinct) = (0, 0, 0);
    let sixteenth_sq = Rational64::new(1, 256);
    for term in all_terms(n) {
        if term.is_one_body() {
            one_body += 1;
        } else {
            two_body += 1;
        }
        let strings = match jw_term(&term) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("{term}: {e}"));
                continue;
            }
        };
        let expected = term_matrix(&term);
        let got = weighted_sum_matrix(n, &strings);
        let diff = expected.max_abs_diff(&got);
        max_abs_diff = max_abs_diff.max(diff);
        if expected != got {
            failures.push(format!("{term}: matrix mismatch (max deviation {diff})"));
        }
        if term.is_one_body() && term.creates() != term.annihilates() && strings.len() != 4 {
            failures.push(format!("{term}: expected 4 strings, got {}", strings.len()));
        }
        let pair_sum = expected.add(&term_matrix(&term.conjugate()));
        if !pair_sum.is_hermitian() {
            failures.push(format!("{term}: term plus conjugate is not Hermitian"));
        }
        if term.is_distinct_excitation() {
            distinct += 1;
            let idx = term.indices();
            let endpoints = [idx[0], idx[1], idx[2], idx[3]];
            match jw_excitation(&term) {
                Ok(ex) => {
                    let shaped = ex.len() == 16
                        && ex.iter().all(|w| {
                            norm_sqr(&w.coefficient) == sixteenth_sq
                                && text_matches_pattern(w.string.to_string().as_bytes(), endpoints)
                        });
                    if !shaped {
                        failures.push(format!(
                            "{term}: excitation not 16 strings of |c| = 1/16 on pattern"
                        ));
                    }
                }
                Err(e) => failures.push(format!("{term}: {e}")),
            }
        }
    }
    JwMatrixReport {
        n,
        passed: failures.is_empty(),
        one_body_terms: one_body,
        two_body_terms: two_body,
        distinct_excitations: distinct,
        max_abs_diff,
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleViolation {
    ElementOutOfRange {
        round: usize,
        subset: [usize; 4],
    },
    Overlap {
        round: usize,
        first: [usize; 4],
        second: [usize; 4],
    },
    Duplicate {
        subset: [usize; 4],
        rounds: [usize; 2],
    },
    Missing {
        subset: [usize; 4],
    },
    IncompleteRound {
        round: usize,
        covered: usize,
    },
    RoundCount {
        expected: u64,
        got: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub n: usize,
    pub passed: bool,
    pub rounds: usize,
    pub subsets: usize,
    pub expected_subsets: u64,
    pub violation_count: usize,
    pub first_violation: Option<ScheduleViolation>,
}

/// Exact cover and per-round disjointness; for `4 | n` also full rounds and
/// the `C(n-1, 3)` round count.
pub fn validate_schedule(schedule: &Schedule) -> ScheduleReport {
    let n = schedule.n;
    let complete = n >= 4 && n.is_multiple_of(4);
    let mut violations = Vec::new();
    let mut seen: HashMap<[usize; 4], usize> = HashMap::new();
    for (r, round) in schedule.rounds.iter().enumerate() {
        let mut used: Vec<Option<[usize; 4]>> = vec![None; n];
        let mut covered = 0;
        for subset in &round.subsets {
            let el = subset.elements();
            if el.iter().any(|&e| e >= n) {
                violations.push(ScheduleViolation::ElementOutOfRange {
                    round: r,
                    subset: el,
                });
                continue;
            }
            for &e in &el {
                match used[e] {
                    Some(prev) => violations.push(ScheduleViolation::Overlap {
                        round: r,
                        first: prev,
                        second: el,
                    }),
                    None => {
                        used[e] = Some(el);
                        covered += 1;
                    }
                }
            }
            if let Some(prev) = seen.insert(el, r) {
                violations.push(ScheduleViolation::Duplicate {
                    subset: el,
                    rounds: [prev, r],
                });
            }
        }
        if complete && covered != n {
            violations.push(ScheduleViolation::IncompleteRound { round: r, covered });
        }
    }
    for subset in all_subsets4(n) {
        if !seen.contains_key(&subset) {
            violations.push(ScheduleViolation::Missing { subset });
        }
    }
    if complete {
        let expected = binomial(n as u64 - 1, 3);
        if schedule.rounds.len() as u64 != expected {
            violations.push(ScheduleViolation::RoundCount {
                expected,
                got: schedule.rounds.len(),
            });
        }
    }
    ScheduleReport {
        n,
        passed: violations.is_empty(),
        rounds: schedule.rounds.len(),
        subsets: schedule.subset_count(),
        expected_subsets: binomial(n as u64, 4),
        violation_count: violations.len(),
        first_violation: violations.into_iter().next(),
    }
}

/// All 4-subsets of `0..n`, descending inside each.
pub fn all_subsets4(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..p {
            for r in 0..q {
                for s in 0..r {
                    out.push([p, q, r, s]);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCounterexample {
    pub family: usize,
    pub first: String,
    pub second: String,
    pub anticommuting_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub passed: bool,
    pub families: usize,
    pub strings: usize,
    pub pairs_checked: u64,
    pub max_family_size: usize,
    pub first_violation: Option<FamilyCounterexample>,
}

pub fn validate_families(families: &[CommutingFamily]) -> FamilyReport {
    let mut pairs_checked = 0u64;
    let mut first_violation = None;
    for (k, family) in families.iter().enumerate() {
        let texts: Vec<Vec<u8>> = family
            .strings
            .iter()
            .map(|w| w.string.to_string().into_bytes())
            .collect();
        'pairs: for i in 0..texts.len() {
            for j in i + 1..texts.len() {
                pairs_checked += 1;
                let c = text_anticommuting_count(&texts[i], &texts[j]);
                if c % 2 == 1 {
                    first_violation = Some(FamilyCounterexample {
                        family: k,
                        first: String::from_utf8_lossy(&texts[i]).into_owned(),
                        second: String::from_utf8_lossy(&texts[j]).into_owned(),
                        anticommuting_count: c,
                    });
                    break 'pairs;
                }
            }
        }
        if first_violation.is_some() {
            break;
        }
    }
    FamilyReport {
        passed: first_violation.is_none(),
        families: families.len(),
        strings: families.iter().map(|f| f.strings.len()).sum(),
        pairs_checked,
        max_family_size: families.iter().map(|f| f.strings.len()).max().unwrap_or(0),
        first_violation,
    }
}

/// The `2n` strings `Z…Z (X|Y) I…I`; no two distinct ones commute.
pub fn anticommuting_chain_fixture(n: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for op in [PauliOp::X, PauliOp::Y] {
            let mut s = PauliString::identity(n);
            for t in 0..k {
                s.set(t, PauliOp::Z);
            }
            s.set(k, op);
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub strings: usize,
    pub distinct_pairs: usize,
    pub commuting_pairs: usize,
    pub passed: bool,
}

pub fn verify_anticommuting_chain(n: usize) -> ChainReport {
    let texts: Vec<Vec<u8>> = anticommuting_chain_fixture(n)
        .iter()
        .map(|s| s.to_string().into_bytes())
        .collect();
    let mut distinct_pairs = 0;
    let mut commuting_pairs = 0;
    for i in 0..texts.len() {
        for j in i + 1..texts.len() {
            distinct_pairs += 1;
            if text_anticommuting_count(&texts[i], &texts[j]).is_multiple_of(2) {
                commuting_pairs += 1;
            }
        }
    }
    ChainReport {
        n,
        strings: texts.len(),
        distinct_pairs,
        commuting_pairs,
        passed: commuting_pairs == 0 && texts.len() == 2 * n,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlidingReport {
    pub samples: usize,
    pub slides: usize,
    pub parity_changes: usize,
    pub passed: bool,
}

/// Random disjoint excitation pairs on up to `max_n` modes; one endpoint of
/// the first term slides to every free position in its gap between
/// neighbouring endpoints, and the cross-pair parity must not move.
pub fn verify_sliding_invariance(max_n: usize, samples: usize, seed: u64) -> SlidingReport {
    assert!(max_n >= 8);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut slides = 0;
    let mut parity_changes = 0;
    for _ in 0..samples {
        let n = rng.gen_range(8..=max_n);
        let mut modes: Vec<usize> = (0..n).collect();
        modes.shuffle(&mut rng);
        let mut a: Vec<usize> = modes[..4].to_vec();
        let mut b: Vec<usize> = modes[4..8].to_vec();
        a.sort_unstable_by(|x, y| y.cmp(x));
        b.sort_unstable_by(|x, y| y.cmp(x));
        let a4 = [a[0], a[1], a[2], a[3]];
        let b4 = [b[0], b[1], b[2], b[3]];
        let base = cross_parity(n, a4, b4);
        let k = rng.gen_range(0..4);
        let occupied: Vec<usize> = a.iter().chain(&b).copied().collect();
        let lo = occupied.iter().copied().filter(|&m| m < a4[k]).max();
        let hi = occupied
            .iter()
            .copied()
            .filter(|&m| m > a4[k])
            .min()
            .unwrap_or(n);
        let lo = lo.map_or(0, |m| m + 1);
        for pos in lo..hi {
            if pos == a4[k] {
                continue;
            }
            let mut moved = a4;
            moved[k] = pos;
            slides += 1;
            if cross_parity(n, moved, b4) != base {
                parity_changes += 1;
            }
        }
    }
    SlidingReport {
        samples,
        slides,
        parity_changes,
        passed: parity_changes == 0,
    }
}

/// Parities of every cross pair, in expansion order.
fn cross_parity(n: usize, a: [usize; 4], b: [usize; 4]) -> Vec<bool> {
    let ea = expand_text(n, a);
    let eb = expand_text(n, b);
    let mut out = Vec::with_capacity(256);
    for x in &ea {
        for y in &eb {
            out.push(text_anticommuting_count(x, y) % 2 == 1);
        }
    }
    out
}

/// Builds the pattern strings of a 4-set directly, without multiplication.
pub fn pattern_strings(n: usize, endpoints: [usize; 4]) -> Vec<PauliString> {
    let pat = JwPattern::from_endpoints(endpoints);
    let mut base = PauliString::identity(n);
    for t in pat.z_positions() {
        base.set(t, PauliOp::Z);
    }
    (0..16u32)
        .map(|bits| {
            let mut s = base.clone();
            for (j, &e) in pat.endpoints.iter().enumerate() {
                s.set(
                    e,
                    if bits >> j & 1 == 1 {
                        PauliOp::Y
                    } else {
                        PauliOp::X
                    },
                );
            }
            s
        })
        .collect()
}
