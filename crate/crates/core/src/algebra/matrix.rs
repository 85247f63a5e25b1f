use std::fmt;

use super::poly::BinaryPoly;
use super::rational::Rational;
use super::AlgebraError;

/// Largest size for which `det` prefers the expansion route on polynomial
/// entries.
const EXPAND_LIMIT: usize = 6;

/// Dense row-major matrix over F₂(z).
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_polys(rows: Vec<Vec<BinaryPoly>>) -> Result<Self, AlgebraError> {
        Self::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(Rational::from_poly).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    let (a, b) = (self.get(r, k), other.get(k, c));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    fn all_polynomial(&self) -> bool {
        self.entries.iter().all(Rational::is_polynomial)
    }

    fn any_sparse(&self) -> bool {
        self.entries.iter().any(|e| e.num().is_sparse() || e.den().is_sparse())
    }

    fn require_square(&self) -> Result<(), AlgebraError> {
        if self.rows == self.cols {
            Ok(())
        } else {
            Err(AlgebraError::NotSquare(self.rows, self.cols))
        }
    }

    /// Rank over F₂(z).
    ///
    /// Gaussian elimination on the rational entries, pivoting on the first
    /// nonzero entry in column order. Matrices with sparse entries go through
    /// a minor search instead, which never needs a gcd.
    pub fn rank(&self) -> usize {
        if self.any_sparse() {
            return self.rank_by_minors();
        }
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, rank);
            let inv = m.get(rank, c).inv().expect("pivot nonzero");
            for r in rank + 1..m.rows {
                let f = m.get(r, c).mul(&inv);
                if !f.is_zero() {
                    m.add_scaled_row(r, rank, &f, c);
                }
            }
            rank += 1;
        }
        rank
    }

    fn rank_by_minors(&self) -> usize {
        let cleared = self.clear_row_denominators();
        for k in (1..=self.rows.min(self.cols)).rev() {
            for rs in subsets(self.rows, k) {
                for cs in subsets(self.cols, k) {
                    let sub = cleared.submatrix(&rs, &cs);
                    if !sub.det_expand().is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    /// Multiplies each row by the product of its denominators, which leaves
    /// the rank unchanged and makes every entry a polynomial.
    fn clear_row_denominators(&self) -> Self {
        let mut m = self.clone();
        for r in 0..m.rows {
            let mut scale = BinaryPoly::one();
            for e in m.row(r) {
                if !e.den().is_one() {
                    scale = scale.mul(e.den());
                }
            }
            if !scale.is_one() {
                let s = Rational::from_poly(scale);
                for c in 0..m.cols {
                    let v = m.get(r, c).mul(&s);
                    m.set(r, c, v);
                }
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `row[dst] += f · row[src]` for columns `from..`.
    fn add_scaled_row(&mut self, dst: usize, src: usize, f: &Rational, from: usize) {
        for c in from..self.cols {
            let s = self.get(src, c);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, c).add(&f.mul(s));
            self.set(dst, c, v);
        }
    }

    /// Determinant, choosing between expansion and elimination.
    pub fn det(&self) -> Result<Rational, AlgebraError> {
        self.require_square()?;
        if self.any_sparse() || (self.rows <= EXPAND_LIMIT && self.all_polynomial()) {
            Ok(self.det_expand())
        } else {
            self.det_gauss()
        }
    }

    /// Determinant by Gaussian elimination on rational entries.
    pub fn det_gauss(&self) -> Result<Rational, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return Ok(Rational::zero());
            };
            m.swap_rows(p, c);
            let pivot = m.get(c, c).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv()?;
            for r in c + 1..n {
                let f = m.get(r, c).mul(&inv);
                if !f.is_zero() {
                    m.add_scaled_row(r, c, &f, c);
                }
            }
        }
        Ok(det)
    }

    /// Division-free determinant: sum over permutations, accumulated by a
    /// dynamic program over the set of used columns. Signs vanish in
    /// characteristic 2. Cost O(n·2ⁿ) products.
    pub fn det_expand(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "det_expand needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let mut layer: Vec<Option<Rational>> = vec![None; 1 << n];
        layer[0] = Some(Rational::one());
        for r in 0..n {
            let mut next: Vec<Option<Rational>> = vec![None; 1 << n];
            for mask in 0..1usize << n {
                let Some(acc) = &layer[mask] else { continue };
                if mask.count_ones() as usize != r || acc.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let e = self.get(r, c);
                    if mask >> c & 1 == 1 || e.is_zero() {
                        continue;
                    }
                    let term = acc.mul(e);
                    let slot = &mut next[mask | 1 << c];
                    *slot = Some(match slot.take() {
                        None => term,
                        Some(prev) => prev.add(&term),
                    });
                }
            }
            layer = next;
        }
        layer[(1 << n) - 1].take().unwrap_or_else(Rational::zero)
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero()).ok_or(AlgebraError::Singular)?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pinv = a.get(c, c).inv()?;
            for k in 0..n {
                let v = a.get(c, k).mul(&pinv);
                a.set(c, k, v);
                let v = inv.get(c, k).mul(&pinv);
                inv.set(c, k, v);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.get(r, c).clone();
                if !f.is_zero() {
                    a.add_scaled_row(r, c, &f, 0);
                    inv.add_scaled_row(r, c, &f, 0);
                }
            }
        }
        Ok(inv)
    }

    /// Adjugate (transposed cofactor matrix), computed division-free.
    /// Satisfies `m · adj(m) = det(m) · I`.
    pub fn adjugate(&self) -> Result<Self, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut adj = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let rs: Vec<usize> = (0..n).filter(|&i| i != r).collect();
                let cs: Vec<usize> = (0..n).filter(|&j| j != c).collect();
                adj.set(c, r, self.submatrix(&rs, &cs).det_expand());
            }
        }
        Ok(adj)
    }
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&Rational>> = (0..self.rows).map(|r| self.row(r).iter().collect()).collect();
        write!(f, "{rows:?}")
    }
}
