//! Exact dense matrices for small registers, built from 2×2 constants and
//! from the occupation-number action of ladder operators. Nothing here goes
//! through the symplectic Pauli representation.

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::fermion::FermionicTerm;
use crate::pauli::{Coefficient, PauliString, WeightedPauliString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Coefficient>,
}

fn c(re: i64, im: i64) -> Coefficient {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Coefficient::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Coefficient::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[Coefficient]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            m.data[i * dim..(i + 1) * dim].clone_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Coefficient {
        self.data[i * self.dim + j]
    }

    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut m = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m.data[(i * other.dim + k) * dim + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[k * n + j];
                    if !b.is_zero() {
                        m.data[i * n + j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Coefficient) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conj_transpose()
    }

    /// Largest elementwise modulus of `self - other`, in floating point.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = a - b;
                f(&d.re).hypot(f(&d.im))
            })
            .fold(0.0, f64::max)
    }
}

pub fn single_qubit(symbol: char) -> DenseMatrix {
    match symbol {
        'I' => DenseMatrix::from_rows(&[&[c(1, 0), c(0, 0)], &[c(0, 0), c(1, 0)]]),
        'X' => DenseMatrix::from_rows(&[&[c(0, 0), c(1, 0)], &[c(1, 0), c(0, 0)]]),
        'Y' => DenseMatrix::from_rows(&[&[c(0, 0), c(0, -1)], &[c(0, 1), c(0, 0)]]),
        'Z' => DenseMatrix::from_rows(&[&[c(1, 0), c(0, 0)], &[c(0, 0), c(-1, 0)]]),
        other => panic!("not a Pauli symbol: {other:?}"),
    }
}

/// Kronecker product of the string's characters, qubit 0 as the leftmost
/// (most significant) factor.
pub fn pauli_matrix(p: &PauliString) -> DenseMatrix {
    p.to_string()
        .chars()
        .fold(DenseMatrix::identity(1), |acc, ch| {
            acc.kron(&single_qubit(ch))
        })
}

pub fn weighted_sum_matrix(n: usize, strings: &[WeightedPauliString]) -> DenseMatrix {
    strings.iter().fold(DenseMatrix::zeros(1 << n), |acc, w| {
        acc.add(&pauli_matrix(&w.string).scale(w.coefficient))
    })
}

/// Ladder operator in the occupation-number basis. Basis index bit
/// `n-1-k` is the occupation of mode `k`; the sign is `(-1)` to the number
/// of occupied modes below `mode`.
pub fn ladder_matrix(mode: usize, dagger: bool, n: usize) -> DenseMatrix {
    assert!(mode < n);
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim);
    let bit = 1usize << (n - 1 - mode);
    for col in 0..dim {
        let occupied = col & bit != 0;
        if occupied == dagger {
            continue;
        }
        let below = (0..mode).filter(|&k| col & (1 << (n - 1 - k)) != 0).count();
        let sign = if below % 2 == 0 { 1 } else { -1 };
        m.data[(col ^ bit) * dim + col] = c(sign, 0);
    }
    m
}

pub fn term_matrix(term: &FermionicTerm) -> DenseMatrix {
    let n = term.n();
    let ops = term
        .creates()
        .iter()
        .map(|&m| (m, true))
        .chain(term.annihilates().iter().map(|&m| (m, false)));
    ops.fold(DenseMatrix::identity(1 << n), |acc, (m, dagger)| {
        acc.matmul(&ladder_matrix(m, dagger, n))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra_constants() {
        let x = single_qubit('X');
        let y = single_qubit('Y');
        let z = single_qubit('Z');
        assert_eq!(x.matmul(&y), z.scale(c(0, 1)));
        assert_eq!(z.matmul(&z), DenseMatrix::identity(2));
    }

    #[test]
    fn canonical_anticommutation() {
        let n = 3;
        for p in 0..n {
            for q in 0..n {
                let ap = ladder_matrix(p, false, n);
                let aqd = ladder_matrix(q, true, n);
                let anti = ap.matmul(&aqd).add(&aqd.matmul(&ap));
                let want = if p == q {
                    DenseMatrix::identity(1 << n)
                } else {
                    DenseMatrix::zeros(1 << n)
                };
                assert_eq!(anti, want, "p={p} q={q}");
                let aq = ladder_matrix(q, false, n);
                assert!(ap.matmul(&aq).add(&aq.matmul(&ap)).is_zero());
            }
        }
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let m = pauli_matrix(&"XI".parse().unwrap());
        // X on qubit 0 flips the high bit: |00> -> |10>.
        assert_eq!(m.get(2, 0), c(1, 0));
    }
}
