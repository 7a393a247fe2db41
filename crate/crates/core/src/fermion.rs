//! Fermionic ladder-operator terms and their Jordan-Wigner images.
//!
//! `a_m -> (X_m + iY_m)/2 · Z_{m-1} … Z_0` and
//! `a†_m -> (X_m - iY_m)/2 · Z_{m-1} … Z_0`. Signs of the expanded strings
//! always come from symbolic multiplication, never from a table.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Coefficient, PauliOp, PauliString, WeightedPauliString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("mode {mode} out of range for {n} modes")]
    ModeOutOfRange { mode: usize, n: usize },
    #[error("{which} indices must be strictly descending, got {indices:?}")]
    NotDescending {
        which: &'static str,
        indices: Vec<usize>,
    },
    #[error("unsupported term shape: {creates} creation and {annihilates} annihilation operators")]
    UnsupportedShape { creates: usize, annihilates: usize },
    #[error("term {0} repeats a mode index; only four distinct indices form an excitation")]
    RepeatedIndex(FermionicTerm),
}

/// `a†_{c0} a†_{c1} … a_{a0} a_{a1} …` over `n` modes, both index lists
/// strictly descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FermionicTerm {
    creates: Vec<usize>,
    annihilates: Vec<usize>,
    n: usize,
}

impl FermionicTerm {
    pub fn new(
        creates: Vec<usize>,
        annihilates: Vec<usize>,
        n: usize,
    ) -> Result<Self, EncodingError> {
        let shape_ok = matches!((creates.len(), annihilates.len()), (1, 1) | (2, 2));
        if !shape_ok {
            return Err(EncodingError::UnsupportedShape {
                creates: creates.len(),
                annihilates: annihilates.len(),
            });
        }
        for (which, list) in [("creation", &creates), ("annihilation", &annihilates)] {
            if let Some(&mode) = list.iter().find(|&&m| m >= n) {
                return Err(EncodingError::ModeOutOfRange { mode, n });
            }
            if list.windows(2).any(|w| w[0] <= w[1]) {
                return Err(EncodingError::NotDescending {
                    which,
                    indices: list.clone(),
                });
            }
        }
        Ok(Self {
            creates,
            annihilates,
            n,
        })
    }

    /// `a†_p a_q`.
    pub fn one_body(p: usize, q: usize, n: usize) -> Result<Self, EncodingError> {
        Self::new(vec![p], vec![q], n)
    }

    /// `a†_p a†_q a_r a_s` with `p > q` and `r > s`.
    pub fn two_body(
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        n: usize,
    ) -> Result<Self, EncodingError> {
        Self::new(vec![p, q], vec![r, s], n)
    }

    pub fn creates(&self) -> &[usize] {
        &self.creates
    }

    pub fn annihilates(&self) -> &[usize] {
        &self.annihilates
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_one_body(&self) -> bool {
        self.creates.len() == 1
    }

    /// Mode indices in operator order, creation first: `[p, q]` or `[p, q, r, s]`.
    pub fn indices(&self) -> Vec<usize> {
        self.creates
            .iter()
            .chain(&self.annihilates)
            .copied()
            .collect()
    }

    /// Two-body term whose four indices are all distinct.
    pub fn is_distinct_excitation(&self) -> bool {
        if self.creates.len() != 2 {
            return false;
        }
        let mut idx = self.indices();
        idx.sort_unstable();
        idx.windows(2).all(|w| w[0] != w[1])
    }

    /// Hermitian conjugate. For one- and two-body terms the reordering
    /// signs cancel, so the conjugate is exactly the term with the lists swapped.
    pub fn conjugate(&self) -> Self {
        Self {
            creates: self.annihilates.clone(),
            annihilates: self.creates.clone(),
            n: self.n,
        }
    }

    fn ladder_sequence(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.creates
            .iter()
            .map(|&m| (m, true))
            .chain(self.annihilates.iter().map(|&m| (m, false)))
    }
}

impl fmt::Display for FermionicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .creates
            .iter()
            .map(|m| format!("a+{m}"))
            .chain(self.annihilates.iter().map(|m| format!("a-{m}")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// The two weighted strings of a single ladder operator.
pub fn jw_ladder(
    mode: usize,
    dagger: bool,
    n: usize,
) -> Result<[WeightedPauliString; 2], EncodingError> {
    if mode >= n {
        return Err(EncodingError::ModeOutOfRange { mode, n });
    }
    let mut x = PauliString::identity(n);
    for t in 0..mode {
        x.set(t, PauliOp::Z);
    }
    let mut y = x.clone();
    x.set(mode, PauliOp::X);
    y.set(mode, PauliOp::Y);
    let y_im = if dagger { -half() } else { half() };
    Ok([
        WeightedPauliString {
            coefficient: Complex::new(half(), Rational64::zero()),
            string: x,
        },
        WeightedPauliString {
            coefficient: Complex::new(Rational64::zero(), y_im),
            string: y,
        },
    ])
}

/// Expands any supported term into weighted Pauli strings, collecting like
/// strings and dropping those whose coefficients cancel. Output is sorted by string.
pub fn jw_term(term: &FermionicTerm) -> Result<Vec<WeightedPauliString>, EncodingError> {
    let mut acc: Vec<WeightedPauliString> =
        vec![WeightedPauliString::unit(PauliString::identity(term.n))];
    for (mode, dagger) in term.ladder_sequence() {
        let ladder = jw_ladder(mode, dagger, term.n)?;
        let mut next: BTreeMap<PauliString, Coefficient> = BTreeMap::new();
        for a in &acc {
            for b in &ladder {
                let prod = a * b;
                *next.entry(prod.string).or_insert_with(Coefficient::zero) += prod.coefficient;
            }
        }
        acc = next
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(string, coefficient)| WeightedPauliString {
                coefficient,
                string,
            })
            .collect();
    }
    Ok(acc)
}

/// The 16 strings of a two-body term with four distinct indices.
pub fn jw_excitation(term: &FermionicTerm) -> Result<Vec<WeightedPauliString>, EncodingError> {
    if term.creates.len() != 2 {
        return Err(EncodingError::UnsupportedShape {
            creates: term.creates.len(),
            annihilates: term.annihilates.len(),
        });
    }
    if !term.is_distinct_excitation() {
        return Err(EncodingError::RepeatedIndex(term.clone()));
    }
    let strings = jw_term(term)?;
    debug_assert_eq!(strings.len(), 16);
    Ok(strings)
}

/// Shape of the 16 strings of an excitation: `X|Y` at the four endpoints,
/// `Z` strictly inside `(e1, e0)` and `(e3, e2)`, `I` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JwPattern {
    /// Endpoints sorted descending.
    pub endpoints: [usize; 4],
    /// Open intervals `(lo, hi)` that carry `Z`.
    pub z_segments: [(usize, usize); 2],
}

impl JwPattern {
    pub fn from_endpoints(mut endpoints: [usize; 4]) -> Self {
        endpoints.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            endpoints,
            z_segments: [(endpoints[1], endpoints[0]), (endpoints[3], endpoints[2])],
        }
    }

    pub fn z_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.z_segments.iter().flat_map(|&(lo, hi)| lo + 1..hi)
    }

    fn expected(&self, t: usize) -> Expected {
        if self.endpoints.contains(&t) {
            Expected::XOrY
        } else if self.z_segments.iter().any(|&(lo, hi)| lo < t && t < hi) {
            Expected::Z
        } else {
            Expected::I
        }
    }

    pub fn matches(&self, s: &PauliString) -> bool {
        if s.len() <= self.endpoints[0] {
            return false;
        }
        (0..s.len()).all(|t| {
            matches!(
                (self.expected(t), s.get(t)),
                (Expected::XOrY, PauliOp::X | PauliOp::Y)
                    | (Expected::Z, PauliOp::Z)
                    | (Expected::I, PauliOp::I)
            )
        })
    }
}

enum Expected {
    XOrY,
    Z,
    I,
}

pub fn pattern_of(term: &FermionicTerm) -> Result<JwPattern, EncodingError> {
    if term.creates.len() != 2 {
        return Err(EncodingError::UnsupportedShape {
            creates: term.creates.len(),
            annihilates: term.annihilates.len(),
        });
    }
    if !term.is_distinct_excitation() {
        return Err(EncodingError::RepeatedIndex(term.clone()));
    }
    let i = term.indices();
    Ok(JwPattern::from_endpoints([i[0], i[1], i[2], i[3]]))
}

/// Number of `Y` among the given positions of `s`.
pub fn y_count_at(s: &PauliString, positions: &[usize]) -> usize {
    positions
        .iter()
        .filter(|&&t| s.get(t) == PauliOp::Y)
        .count()
}
