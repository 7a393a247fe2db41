//! N-qubit Pauli strings in symplectic (x, z) bit form.
//!
//! Text form reads qubit 0 as the leftmost character, so `"ZZX"` is
//! `Z` on qubits 0 and 1 and `X` on qubit 2.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact complex coefficient. Jordan-Wigner expansions only ever produce
/// dyadic rationals times a power of `i`.
pub type Coefficient = Complex<Rational64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid character {found:?} at position {position}")]
    InvalidChar { found: char, position: usize },
    #[error("zero coefficient")]
    ZeroCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliOp::I,
            (true, false) => PauliOp::X,
            (true, true) => PauliOp::Y,
            (false, true) => PauliOp::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            PauliOp::I => (false, false),
            PauliOp::X => (true, false),
            PauliOp::Y => (true, true),
            PauliOp::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A length-`n` tensor product of single-qubit Paulis, without phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    pub fn from_ops(ops: &[PauliOp]) -> Self {
        let mut p = Self::identity(ops.len());
        for (t, &op) in ops.iter().enumerate() {
            p.set(t, op);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, t: usize) -> PauliOp {
        assert!(t < self.n, "qubit {t} out of range for {} qubits", self.n);
        let (w, b) = (t / WORD, t % WORD);
        PauliOp::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, t: usize, op: PauliOp) {
        assert!(t < self.n, "qubit {t} out of range for {} qubits", self.n);
        let (w, b) = (t / WORD, t % WORD);
        let (x, z) = op.bits();
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | if x { mask } else { 0 };
        self.z[w] = (self.z[w] & !mask) | if z { mask } else { 0 };
    }

    pub fn ops(&self) -> impl Iterator<Item = PauliOp> + '_ {
        (0..self.n).map(|t| self.get(t))
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when the string contains only `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    fn check_len(&self, other: &Self) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Number of qubits where both strings are non-identity and differ.
    pub fn anticommuting_index_count(&self, other: &Self) -> Result<usize, PauliError> {
        self.check_len(other)?;
        Ok(self.symplectic_count(other))
    }

    fn symplectic_count(&self, other: &Self) -> usize {
        (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() as usize)
            .sum()
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_len(other)?;
        Ok(self.symplectic_count(other).is_multiple_of(2))
    }

    /// Product `self * other` as `i^k * string`, returning `(k mod 4, string)`.
    pub fn product(&self, other: &Self) -> Result<(u8, PauliString), PauliError> {
        self.check_len(other)?;
        let mut plus = 0u32;
        let mut minus = 0u32;
        let mut out = PauliString::identity(self.n);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x_only1, z_only1, y1) = (x1 & !z1, z1 & !x1, x1 & z1);
            let (x_only2, z_only2, y2) = (x2 & !z2, z2 & !x2, x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
            plus += ((x_only1 & y2) | (y1 & z_only2) | (z_only1 & x_only2)).count_ones();
            minus += ((y1 & x_only2) | (z_only1 & y2) | (x_only1 & z_only2)).count_ones();
            out.x[w] = x1 ^ x2;
            out.z[w] = z1 ^ z2;
        }
        let k = (plus as i64 - minus as i64).rem_euclid(4) as u8;
        Ok((k, out))
    }
}

/// Strings order position-wise from qubit 0 with `I < X < Y < Z`.
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ops()
            .cmp(other.ops())
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in self.ops() {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pauli(s)
    }
}

pub fn parse_pauli(text: &str) -> Result<PauliString, PauliError> {
    if text.is_empty() {
        return Err(PauliError::Empty);
    }
    let ops = text
        .chars()
        .enumerate()
        .map(|(position, c)| {
            PauliOp::from_char(c).ok_or(PauliError::InvalidChar { found: c, position })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PauliString::from_ops(&ops))
}

pub fn format_pauli(p: &PauliString) -> String {
    p.to_string()
}

/// `i^k` as an exact coefficient.
pub fn phase(k: u8) -> Coefficient {
    let (one, zero) = (Rational64::one(), Rational64::zero());
    match k % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, -one),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedPauliString {
    pub coefficient: Coefficient,
    pub string: PauliString,
}

impl WeightedPauliString {
    pub fn new(coefficient: Coefficient, string: PauliString) -> Result<Self, PauliError> {
        if coefficient.is_zero() {
            return Err(PauliError::ZeroCoefficient);
        }
        Ok(Self {
            coefficient,
            string,
        })
    }

    pub fn unit(string: PauliString) -> Self {
        Self {
            coefficient: Coefficient::one(),
            string,
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        let (k, string) = self.string.product(&other.string)?;
        Ok(Self {
            coefficient: self.coefficient * other.coefficient * phase(k),
            string,
        })
    }

    /// Coefficient as `[re, im]` in floating point.
    pub fn coefficient_f64(&self) -> [f64; 2] {
        coefficient_to_f64(&self.coefficient)
    }
}

impl Mul for &WeightedPauliString {
    type Output = WeightedPauliString;

    /// Panics on length mismatch; use [`WeightedPauliString::multiply`] to handle it.
    fn mul(self, rhs: Self) -> WeightedPauliString {
        self.multiply(rhs)
            .expect("multiplying Pauli strings of different lengths")
    }
}

impl fmt::Display for WeightedPauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}i)*{}",
            self.coefficient.re, self.coefficient.im, self.string
        )
    }
}

pub fn coefficient_to_f64(c: &Coefficient) -> [f64; 2] {
    let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
    [f(&c.re), f(&c.im)]
}

/// Modulus squared, exact.
pub fn norm_sqr(c: &Coefficient) -> Rational64 {
    c.re * c.re + c.im * c.im
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn counts_from_chain_example() {
        assert_eq!(p("XII").anticommuting_index_count(&p("YII")).unwrap(), 1);
        assert!(!p("ZXI").commutes(&p("ZYI")).unwrap());
        assert!(p("XXII").commutes(&p("YYII")).unwrap());
        assert_eq!(p("XXII").anticommuting_index_count(&p("YYII")).unwrap(), 2);
    }

    #[test]
    fn identity_commutes_with_everything() {
        for s in ["XYZ", "ZZZ", "YIX", "III"] {
            assert!(p(s).commutes(&PauliString::identity(3)).unwrap());
            assert_eq!(p(s).anticommuting_index_count(&p(s)).unwrap(), 0);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert_eq!(
            p("XX").commutes(&p("XXX")),
            Err(PauliError::DimensionMismatch { left: 2, right: 3 })
        );
        let a = WeightedPauliString::unit(p("X"));
        let b = WeightedPauliString::unit(p("XY"));
        assert!(a.multiply(&b).is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x = WeightedPauliString::unit(p("X"));
        let y = WeightedPauliString::unit(p("Y"));
        let z = WeightedPauliString::unit(p("Z"));
        let xy = &x * &y;
        assert_eq!(xy.string, p("Z"));
        assert_eq!(xy.coefficient, phase(1));
        let zz = &z * &z;
        assert_eq!(zz.string, p("I"));
        assert_eq!(zz.coefficient, phase(0));
        assert_eq!((&y * &x).coefficient, phase(3));
        assert_eq!((&z * &x).coefficient, phase(1));
        assert_eq!((&y * &z).coefficient, phase(1));
    }

    #[test]
    fn weighted_product_carries_coefficients() {
        let a = WeightedPauliString::new(Complex::new(r(1, 2), r(0, 1)), p("XZ")).unwrap();
        let b = WeightedPauliString::new(Complex::new(r(0, 1), r(-1, 2)), p("YZ")).unwrap();
        let c = a.multiply(&b).unwrap();
        // (1/2)(-i/2) * (XY ⊗ ZZ) = (-i/4)(iZ ⊗ I) = (1/4) ZI
        assert_eq!(c.string, p("ZI"));
        assert_eq!(c.coefficient, Complex::new(r(1, 4), r(0, 1)));
    }

    #[test]
    fn parse_and_format() {
        let s = p("ZZX");
        assert_eq!(s.get(0), PauliOp::Z);
        assert_eq!(s.get(1), PauliOp::Z);
        assert_eq!(s.get(2), PauliOp::X);
        assert_eq!(parse_pauli(""), Err(PauliError::Empty));
        assert_eq!(
            parse_pauli("XQ"),
            Err(PauliError::InvalidChar {
                found: 'Q',
                position: 1
            })
        );
        assert_eq!(format_pauli(&p("XIYZ")), "XIYZ");
    }

    #[test]
    fn long_strings_span_words() {
        let mut a = PauliString::identity(130);
        let mut b = PauliString::identity(130);
        a.set(3, PauliOp::X);
        a.set(100, PauliOp::Y);
        a.set(129, PauliOp::Z);
        b.set(3, PauliOp::Z);
        b.set(100, PauliOp::X);
        b.set(129, PauliOp::Z);
        assert_eq!(a.anticommuting_index_count(&b).unwrap(), 2);
        assert_eq!(a.weight(), 3);
        let (k, prod) = a.product(&b).unwrap();
        assert_eq!(prod.get(3), PauliOp::Y);
        assert_eq!(prod.get(100), PauliOp::Z);
        assert_eq!(prod.get(129), PauliOp::I);
        // XZ = -iY, YX = -iZ
        assert_eq!(k, 2);
    }

    #[test]
    fn zero_coefficient_rejected() {
        assert_eq!(
            WeightedPauliString::new(Coefficient::zero(), p("X")),
            Err(PauliError::ZeroCoefficient)
        );
    }

    #[test]
    fn ordering_is_positional() {
        let mut v = [p("ZI"), p("XY"), p("IZ"), p("XX")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["IZ", "XX", "XY", "ZI"]);
    }
}
