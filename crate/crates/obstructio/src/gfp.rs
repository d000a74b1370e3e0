//! Arithmetic over GF(p) for odd primes p >= 7, plus exact dense linear
//! algebra (rank, kernel, solve, inverse) with deterministic pivoting.
//!
//! Elements are canonical residues in [0, p). All matrix routines are
//! fraction-free Gaussian elimination over the field; there is no floating
//! point anywhere downstream of this module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too small: characteristics 2, 3, 5 are excluded")]
    TooSmall(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
}

/// Canonical residue in [0, p). Operations live on [`PrimeField`].
pub type Fe = u32;

/// Deterministic primality test for u64 (trial division up to sqrt; the
/// moduli used here are far below any range where this is slow).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = 17u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u32,
}

impl PrimeField {
    /// Accepts odd primes >= 7. Characteristics 2, 3 and 5 break the quadric
    /// normal form and the Clifford constants used upstream, so they are
    /// rejected here once and for all.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 7 || p == 2 || p == 3 || p == 5 {
            return Err(FieldError::TooSmall(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > u32::MAX as u64 {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> Fe {
        let p = self.p as i64;
        (v.rem_euclid(p)) as Fe
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        if s >= p {
            (s - p) as Fe
        } else {
            s as Fe
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        ((a as u64 * b as u64) % self.p as u64) as Fe
    }

    pub fn pow(&self, mut base: Fe, mut exp: u64) -> Fe {
        let mut acc: Fe = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat (p is prime, a != 0).
    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a % self.p == 0 {
            return Err(FieldError::DivisionByZero(self.p as u64));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// Dense matrix over GF(p), row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGF {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Fe>,
}

impl MatrixGF {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixGF {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        MatrixGF {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatrixGF {
        let mut t = MatrixGF::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixGF, f: &PrimeField) -> MatrixGF {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = MatrixGF::zeros(self.rows, other.cols);
        let p = f.p as u64;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j) as u64;
                    out.set(i, j, ((cur + a * other.get(k, j) as u64) % p) as Fe);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Fe], f: &PrimeField) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        let p = f.p as u64;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += *a as u64 * *b as u64;
                    if acc >= 1 << 62 {
                        acc %= p;
                    }
                }
                (acc % p) as Fe
            })
            .collect()
    }

    /// Reduced row echelon form. Pivoting is deterministic: for each column,
    /// the first row with a nonzero entry is chosen. Returns the echelon
    /// matrix and the pivot column indices (one per pivot row).
    pub fn rref(&self, f: &PrimeField) -> (MatrixGF, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for pc in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let mut sel = None;
            for r in pr..m.rows {
                if m.get(r, pc) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            if sel != pr {
                for c in 0..m.cols {
                    let a = m.get(pr, c);
                    let b = m.get(sel, c);
                    m.set(pr, c, b);
                    m.set(sel, c, a);
                }
            }
            let inv = f.inv(m.get(pr, pc)).expect("pivot nonzero");
            for c in pc..m.cols {
                m.set(pr, c, f.mul(m.get(pr, c), inv));
            }
            for r in 0..m.rows {
                if r == pr {
                    continue;
                }
                let factor = m.get(r, pc);
                if factor == 0 {
                    continue;
                }
                for c in pc..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(pr, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the right kernel {x : A x = 0}, one vector per free column,
    /// in ascending free-column order.
    pub fn kernel_basis(&self, f: &PrimeField) -> Vec<Vec<Fe>> {
        let (e, pivots) = self.rref(f);
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![0 as Fe; self.cols];
            vec[free] = 1;
            for (col, slot) in pivot_set.iter().enumerate() {
                if let Some(row) = slot {
                    vec[col] = f.neg(e.get(*row, free));
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// One solution of A x = b, if consistent.
    pub fn solve(&self, b: &[Fe], f: &PrimeField) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = MatrixGF::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let (e, pivots) = aug.rref(f);
        if pivots.contains(&self.cols) {
            return None; // pivot in augmented column: inconsistent
        }
        let mut x = vec![0 as Fe; self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = e.get(row, self.cols);
        }
        Some(x)
    }

    pub fn inverse(&self, f: &PrimeField) -> Option<MatrixGF> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = MatrixGF::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (e, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = MatrixGF::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, e.get(r, n + c));
            }
        }
        Some(inv)
    }
}
