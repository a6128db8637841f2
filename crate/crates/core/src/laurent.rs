//! Laurent polynomials and Laurent polynomial matrices over `C64`.
//!
//! Coefficients whose modulus falls below `PRUNE_REL` times the largest
//! coefficient of the operand are dropped after every operation, so that
//! floating point noise does not grow the supports.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{CMatrix, C64};
use crate::DEFAULT_TOL;

/// Relative pruning threshold applied after arithmetic.
pub const PRUNE_REL: f64 = 1e-13;

/// `Σ_i coeffs[i] z^{lo+i}`. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    pub fn new(lo: i64, coeffs: Vec<C64>) -> Self {
        let scale = max_abs(&coeffs);
        Self::pruned(lo, coeffs, scale)
    }

    /// Builds a polynomial, pruning against an external scale.
    fn pruned(lo: i64, mut coeffs: Vec<C64>, scale: f64) -> Self {
        let cut = PRUNE_REL * scale;
        for c in &mut coeffs {
            if c.norm() <= cut {
                *c = C64::zero();
            }
        }
        let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
            return Self::zero();
        };
        let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(first);
        coeffs.truncate(last + 1);
        coeffs.drain(..first);
        Self {
            lo: lo + first as i64,
            coeffs,
        }
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(C64::one())
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · z^k`.
    pub fn monomial(c: C64, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    /// `z^{-1} + a`, the building block of every annihilator symbol.
    pub fn inv_z_plus(a: C64) -> Self {
        Self::new(-1, vec![C64::one(), a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent, `None` for the zero polynomial.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero outside the support).
    pub fn coeff(&self, k: i64) -> C64 {
        let i = k - self.lo;
        if i < 0 {
            return C64::zero();
        }
        self.coeffs
            .get(i as usize)
            .copied()
            .unwrap_or_else(C64::zero)
    }

    pub fn max_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if self.is_zero() {
            return Ok(C64::zero());
        }
        let horner = self
            .coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * z + c);
        Ok(horner * z.powi(self.lo as i32))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `P(z) ↦ P(z²)`.
    pub fn subst_z2(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C64::zero(); 2 * self.coeffs.len() - 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[2 * i] = c;
        }
        Self::new(2 * self.lo, out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Largest coefficientwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.max_exp().max(other.max_exp()).unwrap_or(lo);
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    fn add_scaled(&self, other: &Self, sign: f64) -> Self {
        if self.is_zero() {
            return other.scale(C64::new(sign, 0.0));
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.max_exp().max(other.max_exp()).unwrap_or(lo);
        let coeffs: Vec<C64> = (lo..=hi)
            .map(|k| self.coeff(k) + other.coeff(k) * sign)
            .collect();
        let scale = self.max_coeff().max(other.max_coeff());
        Self::pruned(lo, coeffs, scale)
    }

    fn raw_mul(&self, other: &Self) -> (i64, Vec<C64>) {
        if self.is_zero() || other.is_zero() {
            return (0, Vec::new());
        }
        let mut out = vec![C64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        (self.lo + other.lo, out)
    }
}

fn max_abs(c: &[C64]) -> f64 {
    c.iter().fold(0.0, |m, x| m.max(x.norm()))
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (lo, c) = self.raw_mul(rhs);
        LaurentPoly::new(lo, c)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

fn fmt_c64(c: C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else {
        write!(f, "({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            fmt_c64(c, f)?;
            match self.lo + i as i64 {
                0 => {}
                1 => f.write_str("·z")?,
                k => write!(f, "·z^{k}")?,
            }
        }
        Ok(())
    }
}

/// A rectangular matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

/// Result of [`LaurentMatrix::solve_right_factor`].
#[derive(Debug, Clone, PartialEq)]
pub struct RightQuotient {
    pub b: LaurentMatrix,
    /// `max coeff(B·H − C) / max coeff(C)`.
    pub residual: f64,
    /// Exponent interval searched for `B`.
    pub support: (i64, i64),
}

impl LaurentMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<LaurentPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "Laurent matrix construction",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        }
        .normalized())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
        .normalized()
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| LaurentPoly::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                LaurentPoly::one()
            } else {
                LaurentPoly::zero()
            }
        })
    }

    pub fn scalar(p: LaurentPoly) -> Self {
        Self {
            rows: 1,
            cols: 1,
            entries: vec![p],
        }
    }

    pub fn constant(m: &CMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| LaurentPoly::constant(m[(i, j)]))
    }

    /// `Σ_k taps[k] z^{lo+k}`; all taps must share one shape.
    pub fn from_taps(lo: i64, taps: &[CMatrix]) -> Result<Self> {
        let Some(first) = taps.first() else {
            return Err(Error::Unsupported("empty tap list has no shape"));
        };
        let (rows, cols) = (first.rows(), first.cols());
        for t in taps {
            if (t.rows(), t.cols()) != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    op: "taps to symbol",
                    expected: rows * cols,
                    found: t.rows() * t.cols(),
                });
            }
        }
        Ok(Self::from_fn(rows, cols, |i, j| {
            LaurentPoly::new(lo, taps.iter().map(|t| t[(i, j)]).collect())
        }))
    }

    /// Coefficient matrices `(lo, taps)` covering the whole support; the
    /// zero matrix yields no taps.
    pub fn to_taps(&self) -> (i64, Vec<CMatrix>) {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return (0, Vec::new());
        };
        let taps = (lo..=hi)
            .map(|k| CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(k)))
            .collect();
        (lo, taps)
    }

    /// Coefficient matrix of `z^k`.
    pub fn coeff(&self, k: i64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(k))
    }

    fn normalized(self) -> Self {
        let scale = self.max_coeff();
        let entries = self
            .entries
            .into_iter()
            .map(|p| LaurentPoly::pruned(p.lo, p.coeffs, scale))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.entries.iter().filter_map(LaurentPoly::min_exp).min()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.entries.iter().filter_map(LaurentPoly::max_exp).max()
    }

    pub fn max_coeff(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, p| m.max(p.max_coeff()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        if z.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).eval(z)?;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).scale(s))
    }

    pub fn subst_z2(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).subst_z2())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "Laurent matrix sum")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "Laurent matrix difference")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "Laurent matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        // Accumulate unpruned, prune once against the product's own scale.
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                let mut terms = Vec::new();
                for k in 0..self.cols {
                    let (l, c) = self.get(i, k).raw_mul(other.get(k, j));
                    if c.is_empty() {
                        continue;
                    }
                    lo = lo.min(l);
                    hi = hi.max(l + c.len() as i64 - 1);
                    terms.push((l, c));
                }
                if terms.is_empty() {
                    entries.push(LaurentPoly::zero());
                    continue;
                }
                let mut acc = vec![C64::zero(); (hi - lo + 1) as usize];
                for (l, c) in terms {
                    for (t, v) in c.into_iter().enumerate() {
                        acc[(l - lo) as usize + t] += v;
                    }
                }
                entries.push(LaurentPoly { lo, coeffs: acc });
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries,
        }
        .normalized())
    }

    /// Determinant by cofactor expansion over column subsets (exact in the
    /// ring, no division). Intended for the small sizes used here.
    pub fn det(&self) -> Result<LaurentPoly> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                op: "Laurent determinant",
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(LaurentPoly::one());
        }
        if n > 16 {
            return Err(Error::Unsupported("Laurent determinant beyond 16x16"));
        }
        // f[S] = det of rows 0..|S| restricted to the columns in S.
        let mut f = vec![LaurentPoly::zero(); 1usize << n];
        f[0] = LaurentPoly::one();
        for s in 1usize..(1 << n) {
            let row = s.count_ones() as usize - 1;
            let mut acc = LaurentPoly::zero();
            for j in 0..n {
                if s & (1 << j) == 0 {
                    continue;
                }
                let rest = s & !(1 << j);
                if f[rest].is_zero() || self.get(row, j).is_zero() {
                    continue;
                }
                let above = (s >> (j + 1)).count_ones();
                let term = self.get(row, j) * &f[rest];
                acc = if above % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            f[s] = acc;
        }
        Ok(f[(1 << n) - 1].clone())
    }

    /// Finds `B` with `B · H = C` by least squares on B's coefficients.
    ///
    /// `support` is the exponent interval allowed for `B`; by default the
    /// exponent range of `C` minus that of `H`, widened by 2 on both sides.
    pub fn solve_right_factor(
        c: &Self,
        h: &Self,
        support: Option<(i64, i64)>,
    ) -> Result<RightQuotient> {
        Self::solve_right_factor_tol(c, h, support, DEFAULT_TOL)
    }

    pub fn solve_right_factor_tol(
        c: &Self,
        h: &Self,
        support: Option<(i64, i64)>,
        tol: f64,
    ) -> Result<RightQuotient> {
        if h.rows != h.cols {
            return Err(Error::NotSquare {
                op: "right division",
                rows: h.rows,
                cols: h.cols,
            });
        }
        if c.cols != h.rows {
            return Err(Error::DimensionMismatch {
                op: "right division",
                expected: h.rows,
                found: c.cols,
            });
        }
        let (Some(h_lo), Some(h_hi)) = (h.min_exp(), h.max_exp()) else {
            return Err(Error::Singular("right division by the zero matrix"));
        };
        let (Some(c_lo), Some(c_hi)) = (c.min_exp(), c.max_exp()) else {
            let s = support.unwrap_or((0, 0));
            return Ok(RightQuotient {
                b: Self::zeros(c.rows, h.rows),
                residual: 0.0,
                support: s,
            });
        };
        let (s_lo, s_hi) = support.unwrap_or((c_lo - h_lo - 2, c_hi - h_hi + 2));
        if s_lo > s_hi {
            return Err(Error::NotDivisible {
                residual: f64::INFINITY,
            });
        }
        let m = h.rows;
        let nb = (s_hi - s_lo + 1) as usize;
        let g_lo = c_lo.min(s_lo + h_lo);
        let g_hi = c_hi.max(s_hi + h_hi);
        let ng = (g_hi - g_lo + 1) as usize;

        // Unknown (β, i) ↦ column β·m + i; equation (γ, col) ↦ row γ·m + col.
        let mut sys = CMatrix::zeros(ng * m, nb * m);
        for bi in 0..nb {
            let beta = s_lo + bi as i64;
            for e in h_lo..=h_hi {
                let gi = (beta + e - g_lo) as usize;
                for i in 0..m {
                    for col in 0..m {
                        sys[(gi * m + col, bi * m + i)] = h.get(i, col).coeff(e);
                    }
                }
            }
        }
        let mut rhs = CMatrix::zeros(ng * m, c.rows);
        for gi in 0..ng {
            let gamma = g_lo + gi as i64;
            for col in 0..m {
                for r in 0..c.rows {
                    rhs[(gi * m + col, r)] = c.get(r, col).coeff(gamma);
                }
            }
        }
        let x = sys.lstsq(&rhs)?;
        let b = Self::from_fn(c.rows, m, |r, i| {
            LaurentPoly::new(s_lo, (0..nb).map(|bi| x[(bi * m + i, r)]).collect())
        });
        let diff = b.mul(h)?.sub(c)?;
        let residual = diff.max_coeff() / c.max_coeff();
        if residual.is_nan() || residual > tol {
            return Err(Error::NotDivisible { residual });
        }
        Ok(RightQuotient {
            b,
            residual,
            support: (s_lo, s_hi),
        })
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

/// Entrywise distance of two evaluated symbols relative to the larger of
/// their magnitudes.
pub fn relative_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE);
    a.max_abs_diff(b) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn taylor1() -> LaurentMatrix {
        let d = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        LaurentMatrix::new(
            2,
            2,
            vec![
                d.clone(),
                LaurentPoly::from_real(0, &[-1.0]),
                LaurentPoly::zero(),
                d,
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_taylor_symbol_at_one() {
        let v = taylor1().eval(c(1.0)).unwrap();
        let want = CMatrix::from_real_rows(&[&[0.0, -1.0], &[0.0, 0.0]]);
        assert!(v.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn eval_rejects_zero() {
        assert_eq!(taylor1().eval(c(0.0)), Err(Error::ZeroArgument));
        assert_eq!(LaurentPoly::one().eval(c(0.0)), Err(Error::ZeroArgument));
    }

    #[test]
    fn square_of_backward_difference() {
        let d = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        let sq = &d * &d;
        assert_eq!(sq, LaurentPoly::from_real(-2, &[1.0, -2.0, 1.0]));
        assert!((sq.eval(c(2.0)).unwrap() - c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn difference_of_squares() {
        let a = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        let b = LaurentPoly::from_real(-1, &[1.0, 1.0]);
        assert_eq!(&a * &b, LaurentPoly::from_real(-2, &[1.0, 0.0, -1.0]));
    }

    #[test]
    fn taylor_square_by_hand() {
        let t = taylor1();
        let sq = t.mul(&t).unwrap();
        let d = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        let want = LaurentMatrix::new(
            2,
            2,
            vec![&d * &d, d.scale(c(-2.0)), LaurentPoly::zero(), &d * &d],
        )
        .unwrap();
        assert!(sq.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn subst_doubles_exponents() {
        let p = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        assert_eq!(p.subst_z2(), LaurentPoly::from_real(-2, &[1.0, 0.0, -1.0]));
        let k = LaurentMatrix::constant(&CMatrix::identity(2));
        assert_eq!(k.subst_z2(), k);
    }

    #[test]
    fn determinants() {
        assert_eq!(
            LaurentMatrix::identity(3).det().unwrap(),
            LaurentPoly::one()
        );
        let d = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        let t2 = LaurentMatrix::from_fn(3, 3, |i, j| match j.cmp(&i) {
            core::cmp::Ordering::Equal => d.clone(),
            core::cmp::Ordering::Greater => LaurentPoly::from_real(0, &[-1.0 / (j - i) as f64]),
            core::cmp::Ordering::Less => LaurentPoly::zero(),
        });
        assert!(t2.det().unwrap().max_abs_diff(&d.pow(3)) < 1e-15);
        let m = LaurentMatrix::new(2, 3, vec![LaurentPoly::one(); 6]).unwrap();
        assert!(matches!(m.det(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn det_matches_pointwise_det_on_dense_matrix() {
        let m = LaurentMatrix::from_fn(4, 4, |i, j| {
            LaurentPoly::new(
                -(i as i64),
                vec![
                    C64::new(1.0 + i as f64, j as f64),
                    C64::new((i * j) as f64 - 2.0, 0.5),
                ],
            )
        });
        let det = m.det().unwrap();
        for z in [C64::new(0.7, 0.2), c(-1.3), C64::new(0.0, 2.0)] {
            let lhs = det.eval(z).unwrap();
            let rhs = m.eval(z).unwrap().det().unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn right_division_examples() {
        let h = LaurentMatrix::scalar(LaurentPoly::from_real(-1, &[1.0, -1.0]));
        let q = LaurentMatrix::solve_right_factor(&h, &h, None).unwrap();
        assert!(q.b.max_abs_diff(&LaurentMatrix::identity(1)) < 1e-12);

        let g = LaurentMatrix::scalar(LaurentPoly::from_real(-1, &[1.0, 1.0]));
        let c = g.mul(&h).unwrap();
        let q = LaurentMatrix::solve_right_factor(&c, &h, None).unwrap();
        assert!(q.b.max_abs_diff(&g) < 1e-12);
        assert!(q.residual < 1e-12);
    }

    #[test]
    fn right_division_reports_indivisible() {
        let h = LaurentMatrix::scalar(LaurentPoly::from_real(-1, &[1.0, -1.0]));
        let c = LaurentMatrix::scalar(LaurentPoly::from_real(-1, &[1.0, 1.0]));
        match LaurentMatrix::solve_right_factor(&c, &h, None) {
            Err(Error::NotDivisible { residual }) => assert!(residual > 1e-3),
            other => panic!("expected NotDivisible, got {other:?}"),
        }
    }

    #[test]
    fn normalization_prunes_relative_noise() {
        let p = LaurentPoly::new(-2, vec![c(1e-20), c(1.0), c(0.0), c(2.0), c(1e-15)]);
        assert_eq!(p.min_exp(), Some(-1));
        assert_eq!(p.max_exp(), Some(1));
        let again = LaurentPoly::new(p.min_exp().unwrap(), p.coeffs().to_vec());
        assert_eq!(p, again);
    }

    #[test]
    fn taps_round_trip() {
        let t = taylor1();
        let (lo, taps) = t.to_taps();
        assert_eq!(lo, -1);
        assert_eq!(LaurentMatrix::from_taps(lo, &taps).unwrap(), t);
    }

    #[test]
    fn display_is_readable() {
        let p = LaurentPoly::from_real(-1, &[1.0, -1.0]);
        assert_eq!(alloc::format!("{p}"), "1·z^-1 + -1");
    }
}
