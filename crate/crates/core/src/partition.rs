//! Turns a schedule into certified commuting families, handles the
//! lower-order residual terms, and reads/writes the on-disk formats.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baranyai::{
    binomial, pad_and_build_with, FlowEngine, Round, Schedule, ScheduleError, Subset4,
};
use crate::fermion::{jw_excitation, jw_term, y_count_at, EncodingError, FermionicTerm};
use crate::oracles::validate_schedule;
use crate::pauli::{coefficient_to_f64, WeightedPauliString};

/// Residual family count stays below `RESIDUAL_FAMILY_CONSTANT * n^3`.
pub const RESIDUAL_FAMILY_CONSTANT: u64 = 3;

pub const RESIDUAL_GROUPING_NOTE: &str = "residual terms: one family per term split first-fit into commuting groups; all-diagonal terms merged into one Z family";

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("file is for {found} modes, expected {expected}")]
    ModeMismatch { expected: usize, found: usize },
    #[error("schedule failed validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("family {family} is not pairwise commuting: {first} vs {second}")]
    Certification {
        family: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyOrigin {
    Dominant,
    Residual,
}

/// Pauli strings certified pairwise-commuting, with the terms they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingFamily {
    pub origin: FamilyOrigin,
    /// Schedule round, for dominant families.
    pub round: Option<usize>,
    pub strings: Vec<WeightedPauliString>,
    /// For each string, an index into `provenance`.
    pub sources: Vec<usize>,
    pub provenance: Vec<FermionicTerm>,
    /// Hamiltonian-weighted coefficient per string, when coefficients were supplied.
    pub weights: Option<Vec<[f64; 2]>>,
}

impl CommutingFamily {
    fn certified(self, label: impl FnOnce() -> String) -> Result<Self, PartitionError> {
        for (i, a) in self.strings.iter().enumerate() {
            for b in &self.strings[i + 1..] {
                if !a
                    .string
                    .commutes(&b.string)
                    .expect("family strings share a length")
                {
                    return Err(PartitionError::Certification {
                        family: label(),
                        first: a.string.to_string(),
                        second: b.string.to_string(),
                    });
                }
            }
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

/// `h_pq` and `h_pqrs` as listed in a coefficients file; absent entries are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HamiltonianCoefficients {
    pub n: usize,
    pub one_body: BTreeMap<(usize, usize), f64>,
    pub two_body: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl HamiltonianCoefficients {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    /// Folds every entry onto its descending-pair term, with the reordering
    /// sign. Entries with a repeated creation or annihilation index are the
    /// zero operator and contribute nothing.
    pub fn canonical_terms(&self) -> Result<BTreeMap<FermionicTerm, f64>, PartitionError> {
        let mut out: BTreeMap<FermionicTerm, f64> = BTreeMap::new();
        for (&(p, q), &v) in &self.one_body {
            *out.entry(FermionicTerm::one_body(p, q, self.n)?)
                .or_default() += v;
        }
        for (&(p, q, r, s), &v) in &self.two_body {
            if p == q || r == s {
                continue;
            }
            let mut sign = 1.0;
            let (p, q) = if p > q {
                (p, q)
            } else {
                sign = -sign;
                (q, p)
            };
            let (r, s) = if r > s {
                (r, s)
            } else {
                sign = -sign;
                (s, r)
            };
            *out.entry(FermionicTerm::two_body(p, q, r, s, self.n)?)
                .or_default() += sign * v;
        }
        out.retain(|_, v| *v != 0.0);
        Ok(out)
    }
}

/// Splits one round into its even-`Y` and odd-`Y` families.
fn round_families(
    round_index: usize,
    round: &Round,
    n: usize,
    weights: Option<&WeightTable>,
) -> Result<Vec<CommutingFamily>, PartitionError> {
    let mut halves: [CommutingFamily; 2] = std::array::from_fn(|_| CommutingFamily {
        origin: FamilyOrigin::Dominant,
        round: Some(round_index),
        strings: Vec::new(),
        sources: Vec::new(),
        provenance: Vec::new(),
        weights: weights.map(|_| Vec::new()),
    });
    for subset in &round.subsets {
        let [p, q, r, s] = subset.elements();
        if weights.is_some_and(|w| !w.by_subset.contains_key(subset)) {
            continue;
        }
        let term = FermionicTerm::two_body(p, q, r, s, n)?;
        let strings = jw_excitation(&term)?;
        let subset_weights = weights.map(|w| w.dominant_weights(subset)).transpose()?;
        for half in &mut halves {
            half.provenance.push(term.clone());
        }
        let source = halves[0].provenance.len() - 1;
        let endpoints = [p, q, r, s];
        for w in strings {
            let half = &mut halves[y_count_at(&w.string, &endpoints) % 2];
            if let (Some(list), Some(table)) = (half.weights.as_mut(), subset_weights.as_ref()) {
                list.push(
                    table
                        .get(&w.string.to_string())
                        .copied()
                        .unwrap_or([0.0, 0.0]),
                );
            }
            half.strings.push(w);
            half.sources.push(source);
        }
    }
    halves
        .into_iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .map(|(parity, f)| f.certified(|| format!("round {round_index} parity {parity}")))
        .collect()
}

/// Exactly two families per round of a full schedule: the even-`Y` and
/// odd-`Y` strings (counting `Y` at each term's four endpoints).
pub fn commuting_families(schedule: &Schedule) -> Result<Vec<CommutingFamily>, PartitionError> {
    dominant_families(schedule, None)
}

fn dominant_families(
    schedule: &Schedule,
    weights: Option<&WeightTable>,
) -> Result<Vec<CommutingFamily>, PartitionError> {
    let per_round: Vec<Vec<CommutingFamily>> = schedule
        .rounds
        .par_iter()
        .enumerate()
        .map(|(k, round)| round_families(k, round, schedule.n, weights))
        .collect::<Result<_, _>>()?;
    Ok(per_round.into_iter().flatten().collect())
}

/// Nonzero canonical coefficients, grouped for lookup.
struct WeightTable {
    by_subset: BTreeMap<Subset4, Vec<(FermionicTerm, f64)>>,
    residual: BTreeMap<FermionicTerm, f64>,
}

impl WeightTable {
    fn new(coeffs: &HamiltonianCoefficients) -> Result<Self, PartitionError> {
        let mut by_subset: BTreeMap<Subset4, Vec<(FermionicTerm, f64)>> = BTreeMap::new();
        let mut residual = BTreeMap::new();
        for (term, value) in coeffs.canonical_terms()? {
            if term.is_distinct_excitation() {
                let i = term.indices();
                let key = Subset4::new([i[0], i[1], i[2], i[3]])?;
                by_subset.entry(key).or_default().push((term, value));
            } else {
                residual.insert(term, value);
            }
        }
        Ok(Self {
            by_subset,
            residual,
        })
    }

    /// `Σ h_t · c_t(string)` over the canonical terms sharing this index set.
    fn dominant_weights(
        &self,
        subset: &Subset4,
    ) -> Result<HashMap<String, [f64; 2]>, PartitionError> {
        let mut out: HashMap<String, [f64; 2]> = HashMap::new();
        for (term, h) in self.by_subset.get(subset).into_iter().flatten() {
            for w in jw_excitation(term)? {
                let [re, im] = w.coefficient_f64();
                let e = out.entry(w.string.to_string()).or_insert([0.0, 0.0]);
                e[0] += h * re;
                e[1] += h * im;
            }
        }
        Ok(out)
    }
}

/// One-body terms `a†_p a_q` (all `p, q`) and two-body terms with
/// descending pairs that share at least one index.
pub fn residual_terms(n: usize) -> Vec<FermionicTerm> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            out.push(FermionicTerm::one_body(p, q, n).expect("in range"));
        }
    }
    for p in 0..n {
        for q in 0..p {
            for r in 0..n {
                for s in 0..r {
                    if p == r || p == s || q == r || q == s {
                        out.push(FermionicTerm::two_body(p, q, r, s, n).expect("in range"));
                    }
                }
            }
        }
    }
    out
}

/// Families for everything that is not a four-distinct-index excitation.
pub fn residual_families(
    n: usize,
    coeffs: Option<&HamiltonianCoefficients>,
) -> Result<Vec<CommutingFamily>, PartitionError> {
    let table = coeffs.map(WeightTable::new).transpose()?;
    let terms: Vec<(FermionicTerm, Option<f64>)> = match &table {
        None => residual_terms(n).into_iter().map(|t| (t, None)).collect(),
        Some(t) => t
            .residual
            .iter()
            .map(|(k, &v)| (k.clone(), Some(v)))
            .collect(),
    };
    let weighted = table.is_some();
    let mut diagonal = CommutingFamily {
        origin: FamilyOrigin::Residual,
        round: None,
        strings: Vec::new(),
        sources: Vec::new(),
        provenance: Vec::new(),
        weights: weighted.then(Vec::new),
    };
    let mut families = Vec::new();
    for (term, h) in terms {
        let strings = jw_term(&term)?;
        let weigh = |w: &WeightedPauliString| {
            let [re, im] = w.coefficient_f64();
            let h = h.unwrap_or(1.0);
            [h * re, h * im]
        };
        if strings.iter().all(|w| w.string.is_diagonal()) {
            diagonal.provenance.push(term);
            let source = diagonal.provenance.len() - 1;
            for w in strings {
                if let Some(list) = diagonal.weights.as_mut() {
                    list.push(weigh(&w));
                }
                diagonal.strings.push(w);
                diagonal.sources.push(source);
            }
            continue;
        }
        let mut groups: Vec<CommutingFamily> = Vec::new();
        for w in strings {
            let slot = groups.iter().position(|g| {
                g.strings
                    .iter()
                    .all(|x| x.string.commutes(&w.string).expect("same length"))
            });
            let g = match slot {
                Some(i) => &mut groups[i],
                None => {
                    groups.push(CommutingFamily {
                        origin: FamilyOrigin::Residual,
                        round: None,
                        strings: Vec::new(),
                        sources: Vec::new(),
                        provenance: vec![term.clone()],
                        weights: weighted.then(Vec::new),
                    });
                    groups.last_mut().expect("just pushed")
                }
            };
            if let Some(list) = g.weights.as_mut() {
                list.push(weigh(&w));
            }
            g.strings.push(w);
            g.sources.push(0);
        }
        for g in groups {
            families.push(g.certified(|| format!("residual {term}"))?);
        }
    }
    if !diagonal.is_empty() {
        families.push(diagonal.certified(|| "residual diagonal".to_string())?);
    }
    Ok(families)
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSummary {
    pub n: usize,
    pub rounds: usize,
    pub family_count: usize,
    pub dominant_family_count: usize,
    pub residual_family_count: usize,
    pub dominant_string_count: usize,
    pub residual_string_count: usize,
    pub max_family_size: usize,
    pub max_dominant_family_size: usize,
    /// Dominant families per `C(n-1, 3)`.
    pub family_ratio: f64,
    pub coefficient_filter: bool,
    pub residual_grouping: &'static str,
}

#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub summary: PartitionSummary,
    pub families: Vec<CommutingFamily>,
}

/// Dominant families from the schedule followed by residual families.
pub fn partition(
    schedule: &Schedule,
    coeffs: Option<&HamiltonianCoefficients>,
) -> Result<PartitionReport, PartitionError> {
    let n = schedule.n;
    if let Some(c) = coeffs {
        if c.n != n {
            return Err(PartitionError::ModeMismatch {
                expected: n,
                found: c.n,
            });
        }
    }
    let table = coeffs.map(WeightTable::new).transpose()?;
    let dominant = dominant_families(schedule, table.as_ref())?;
    let residual = residual_families(n, coeffs)?;
    let dominant_string_count = dominant.iter().map(CommutingFamily::len).sum();
    let residual_string_count = residual.iter().map(CommutingFamily::len).sum();
    let max_dominant_family_size = dominant.iter().map(CommutingFamily::len).max().unwrap_or(0);
    let max_family_size = residual
        .iter()
        .map(CommutingFamily::len)
        .max()
        .unwrap_or(0)
        .max(max_dominant_family_size);
    let summary = PartitionSummary {
        n,
        rounds: schedule.rounds.len(),
        family_count: dominant.len() + residual.len(),
        dominant_family_count: dominant.len(),
        residual_family_count: residual.len(),
        dominant_string_count,
        residual_string_count,
        max_family_size,
        max_dominant_family_size,
        family_ratio: dominant.len() as f64 / binomial(n as u64 - 1, 3).max(1) as f64,
        coefficient_filter: coeffs.is_some(),
        residual_grouping: RESIDUAL_GROUPING_NOTE,
    };
    let mut families = dominant;
    families.extend(residual);
    Ok(PartitionReport { summary, families })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PartitionError + '_ {
    move |source| PartitionError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> PartitionError + '_ {
    move |source| PartitionError::Json {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsFile {
    n: usize,
    #[serde(default)]
    one_body: Vec<OneBodyEntry>,
    #[serde(default)]
    two_body: Vec<TwoBodyEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OneBodyEntry {
    pq: [usize; 2],
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoBodyEntry {
    pqrs: [usize; 4],
    value: f64,
}

pub fn parse_coefficients(text: &str) -> Result<HamiltonianCoefficients, String> {
    let file: CoefficientsFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let n = file.n;
    let mut out = HamiltonianCoefficients::new(n);
    for e in file.one_body {
        if let Some(&m) = e.pq.iter().find(|&&m| m >= n) {
            return Err(format!("one_body index {m} out of range for {n} modes"));
        }
        if out.one_body.insert((e.pq[0], e.pq[1]), e.value).is_some() {
            return Err(format!("duplicate one_body entry {:?}", e.pq));
        }
    }
    for e in file.two_body {
        if let Some(&m) = e.pqrs.iter().find(|&&m| m >= n) {
            return Err(format!("two_body index {m} out of range for {n} modes"));
        }
        let [p, q, r, s] = e.pqrs;
        if out.two_body.insert((p, q, r, s), e.value).is_some() {
            return Err(format!("duplicate two_body entry {:?}", e.pqrs));
        }
    }
    Ok(out)
}

pub fn load_coefficients(path: &Path) -> Result<HamiltonianCoefficients, PartitionError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_coefficients(&text)
        .map_err(|msg| PartitionError::Format(format!("{}: {msg}", path.display())))
}

/// Canonical cache form: `{"n": 8, "rounds": [[[7,5,3,0],[6,4,2,1]], ...]}`.
pub fn schedule_to_json(schedule: &Schedule) -> String {
    let mut out = String::new();
    write!(out, "{{\"n\": {}, \"rounds\": [", schedule.n).expect("write to String");
    for (k, round) in schedule.rounds.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for (j, subset) in round.subsets.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let [p, q, r, s] = subset.elements();
            write!(out, "[{p},{q},{r},{s}]").expect("write to String");
        }
        out.push(']');
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    n: usize,
    rounds: Vec<Vec<[usize; 4]>>,
}

/// Parses a schedule file into canonical order without validating coverage.
pub fn parse_schedule_json(text: &str) -> Result<Schedule, String> {
    let file: ScheduleFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let rounds = file
        .rounds
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|s| Subset4::new(s).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
                .map(Round::new)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Schedule::new(file.n, rounds))
}

/// Parses the text layout, one round per line of `a+p a+q a-r a-s` groups.
pub fn parse_schedule_text(n: usize, text: &str) -> Result<Schedule, String> {
    let mut rounds = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !tokens.len().is_multiple_of(4) {
            return Err(format!(
                "line {}: expected groups of four operators",
                line_no + 1
            ));
        }
        let mut subsets = Vec::new();
        for group in tokens.chunks(4) {
            let mut el = [0usize; 4];
            for (j, tok) in group.iter().enumerate() {
                let prefix = if j < 2 { "a+" } else { "a-" };
                el[j] = tok
                    .strip_prefix(prefix)
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| format!("line {}: bad operator {tok:?}", line_no + 1))?;
            }
            subsets.push(Subset4::new(el).map_err(|e| format!("line {}: {e}", line_no + 1))?);
        }
        rounds.push(Round::new(subsets));
    }
    Ok(Schedule::new(n, rounds))
}

pub fn save_schedule(schedule: &Schedule, path: &Path) -> Result<(), PartitionError> {
    fs::write(path, schedule_to_json(schedule)).map_err(io_err(path))
}

/// Reads a schedule file without checking coverage or disjointness.
pub fn read_schedule_unchecked(path: &Path) -> Result<Schedule, PartitionError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if let Err(e) = serde_json::from_str::<serde_json::Value>(&text) {
        return Err(json_err(path)(e));
    }
    parse_schedule_json(&text)
        .map_err(|msg| PartitionError::Format(format!("{}: {msg}", path.display())))
}

/// Reads and re-validates a schedule file.
pub fn load_schedule(path: &Path, expected_n: Option<usize>) -> Result<Schedule, PartitionError> {
    let schedule = read_schedule_unchecked(path)?;
    if let Some(expected) = expected_n {
        if schedule.n != expected {
            return Err(PartitionError::ModeMismatch {
                expected,
                found: schedule.n,
            });
        }
    }
    let report = validate_schedule(&schedule);
    if !report.passed {
        let detail = report
            .first_violation
            .map(|v| serde_json::to_string(&v).expect("violation serializes"))
            .unwrap_or_default();
        return Err(PartitionError::Validation(detail));
    }
    Ok(schedule)
}

/// Schedules keyed by mode count; built once, optionally persisted to a directory.
pub struct ScheduleCache {
    dir: Option<PathBuf>,
    engine: FlowEngine,
    memory: Mutex<HashMap<usize, Arc<Schedule>>>,
}

impl ScheduleCache {
    pub fn in_memory(engine: FlowEngine) -> Self {
        Self {
            dir: None,
            engine,
            memory: Mutex::new(HashMap::new()),
        }
    }

    pub fn on_disk(dir: impl Into<PathBuf>, engine: FlowEngine) -> Self {
        Self {
            dir: Some(dir.into()),
            engine,
            memory: Mutex::new(HashMap::new()),
        }
    }

    pub fn path_for(&self, n: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("schedule-n{n}.json")))
    }

    pub fn get(&self, n: usize) -> Result<Arc<Schedule>, PartitionError> {
        let mut memory = self.memory.lock().expect("cache lock poisoned");
        if let Some(s) = memory.get(&n) {
            return Ok(Arc::clone(s));
        }
        let schedule = match self.path_for(n) {
            Some(path) if path.exists() => load_schedule(&path, Some(n))?,
            Some(path) => {
                let s = pad_and_build_with(n, self.engine)?;
                save_schedule(&s, &path)?;
                s
            }
            None => pad_and_build_with(n, self.engine)?,
        };
        let schedule = Arc::new(schedule);
        memory.insert(n, Arc::clone(&schedule));
        Ok(schedule)
    }
}

#[derive(Serialize)]
struct StringRecord {
    pauli: String,
    coefficient: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<[f64; 2]>,
    term: Vec<usize>,
}

#[derive(Serialize)]
struct FamilyRecord {
    origin: FamilyOrigin,
    #[serde(skip_serializing_if = "Option::is_none")]
    round: Option<usize>,
    strings: Vec<StringRecord>,
    provenance: Vec<Vec<usize>>,
}

/// JSON array of families; terms are written as their index lists,
/// `[p, q]` for `a†_p a_q` and `[p, q, r, s]` for `a†_p a†_q a_r a_s`.
pub fn families_to_json(families: &[CommutingFamily]) -> String {
    let records: Vec<FamilyRecord> = families
        .iter()
        .map(|f| FamilyRecord {
            origin: f.origin,
            round: f.round,
            strings: f
                .strings
                .iter()
                .enumerate()
                .map(|(k, w)| StringRecord {
                    pauli: w.string.to_string(),
                    coefficient: coefficient_to_f64(&w.coefficient),
                    weight: f.weights.as_ref().map(|list| list[k]),
                    term: f.provenance[f.sources[k]].indices(),
                })
                .collect(),
            provenance: f.provenance.iter().map(FermionicTerm::indices).collect(),
        })
        .collect();
    let mut text = serde_json::to_string(&records).expect("families serialize");
    text.push('\n');
    text
}

pub fn save_families(families: &[CommutingFamily], path: &Path) -> Result<(), PartitionError> {
    fs::write(path, families_to_json(families)).map_err(io_err(path))
}
