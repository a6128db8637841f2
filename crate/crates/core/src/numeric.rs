//! Small dense complex linear algebra and the power series used by the
//! annihilator and scheme constructions.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Largest entrywise distance to `other` (same shape assumed).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Matrix 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matrix product",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn lu(&self) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op: "LU factorization",
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Ok(Lu {
            a,
            perm,
            sign,
            singular,
        })
    }

    pub fn det(&self) -> Result<C64> {
        let lu = self.lu()?;
        if lu.singular {
            return Ok(C64::zero());
        }
        let n = self.rows;
        let mut d = C64::new(lu.sign, 0.0);
        for i in 0..n {
            d *= lu.a[(i, i)];
        }
        Ok(d)
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch {
                op: "linear solve",
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let lu = self.lu()?;
        if lu.singular {
            return Err(Error::Singular("linear solve"));
        }
        Ok(lu.solve(rhs))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    /// 1-norm condition number, computed from the explicit inverse.
    /// Returns `f64::INFINITY` for exactly singular input.
    pub fn condition(&self) -> Result<f64> {
        match self.inverse() {
            Ok(inv) => Ok(self.norm1() * inv.norm1()),
            Err(Error::Singular(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// Least-squares solution of `self · X ≈ rhs` (rows ≥ cols) by
    /// Householder QR. Fails if the matrix is numerically rank deficient.
    pub fn lstsq(&self, rhs: &Self) -> Result<Self> {
        let (m, n) = (self.rows, self.cols);
        if rhs.rows != m {
            return Err(Error::DimensionMismatch {
                op: "least squares",
                expected: m,
                found: rhs.rows,
            });
        }
        if m < n {
            return Err(Error::Singular(
                "least squares: fewer equations than unknowns",
            ));
        }
        let k = rhs.cols;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = a.max_abs();
        for j in 0..n {
            let norm: f64 = (j..m).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = a[(j, j)];
            let phase = if x0.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            let mut v: Vec<C64> = (j..m).map(|i| a[(i, j)]).collect();
            v[0] -= alpha;
            let vnorm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for x in &mut v {
                *x /= vnorm;
            }
            // H = I - 2 v v^H applied to the trailing block and to b.
            for c in j..n {
                let dot: C64 = (j..m).map(|i| v[i - j].conj() * a[(i, c)]).sum();
                for i in j..m {
                    let t = v[i - j] * dot * 2.0;
                    a[(i, c)] -= t;
                }
            }
            for c in 0..k {
                let dot: C64 = (j..m).map(|i| v[i - j].conj() * b[(i, c)]).sum();
                for i in j..m {
                    let t = v[i - j] * dot * 2.0;
                    b[(i, c)] -= t;
                }
            }
        }
        let rank_tol = scale * 1e-14 * (m.max(n) as f64);
        let mut x = Self::zeros(n, k);
        for c in 0..k {
            for i in (0..n).rev() {
                let mut s = b[(i, c)];
                for j in i + 1..n {
                    s -= a[(i, j)] * x[(j, c)];
                }
                let r = a[(i, i)];
                if r.norm() <= rank_tol {
                    return Err(Error::Singular("least squares: rank deficient"));
                }
                x[(i, c)] = s / r;
            }
        }
        Ok(x)
    }

    /// Evaluates `Σ_i coef(i) · self^i`, stopping once the terms are
    /// negligible. `coef` must decay at least factorially.
    pub fn power_series(&self, coef: impl Fn(usize) -> f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op: "matrix power series",
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut power = Self::identity(n);
        let mut sum = Self::zeros(n, n);
        let mut small_run = 0;
        for i in 0..600 {
            let c = coef(i);
            let term = power.scale(C64::new(c, 0.0));
            let tmax = term.max_abs();
            sum = &sum + &term;
            if tmax <= 1e-18 * sum.max_abs().max(f64::MIN_POSITIVE) {
                small_run += 1;
                if small_run >= 3 && i > n {
                    break;
                }
            } else {
                small_run = 0;
            }
            power = power.matmul(self)?;
        }
        Ok(sum)
    }

    /// Matrix exponential by scaling and squaring of the Taylor series.
    pub fn exp(&self) -> Result<Self> {
        let norm = self.norm1();
        let mut squarings = 0u32;
        let mut scaled = self.clone();
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
            scaled = self.scale(C64::new(Float::powi(0.5, squarings as i32), 0.0));
        }
        let mut e = scaled.power_series(|i| 1.0 / factorial(i))?;
        for _ in 0..squarings {
            e = e.matmul(&e)?;
        }
        Ok(e)
    }
}

struct Lu {
    a: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    fn solve(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.a.rows;
        let k = rhs.cols;
        let mut x = CMatrix::from_fn(n, k, |i, j| rhs[(self.perm[i], j)]);
        for c in 0..k {
            for i in 0..n {
                let mut s = x[(i, c)];
                for j in 0..i {
                    s -= self.a[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for j in i + 1..n {
                    s -= self.a[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / self.a[(i, i)];
            }
        }
        x
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product dimensions")
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Σ_{i ≥ 0} x^{step·i} / (offset + step·i)!` summed until the terms stop
/// contributing. With `step = 1, offset = q + 1` this is
/// `(e^x - t_q[e^x]) / x^{q+1}`, free of cancellation for small `x`.
pub(crate) fn shifted_exp_series(x: C64, offset: usize, step: usize) -> C64 {
    let xs = match step {
        1 => x,
        2 => x * x,
        _ => x.powi(step as i32),
    };
    let mut term = real(1.0 / factorial(offset));
    let mut sum = term;
    let mut k = offset;
    for _ in 0..400 {
        let mut denom = 1.0;
        for _ in 0..step {
            k += 1;
            denom *= k as f64;
        }
        term = term * xs / denom;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k > offset + 4 {
            break;
        }
    }
    sum
}

/// `sinh(x) / x`, continuous at 0.
pub(crate) fn sinhc(x: C64) -> C64 {
    if x.norm() < 0.5 {
        shifted_exp_series(x, 1, 2)
    } else {
        x.sinh() / x
    }
}

/// `(cosh(x) - 1) / x^2`, continuous at 0.
pub(crate) fn coshm1_over_sq(x: C64) -> C64 {
    if x.norm() < 0.5 {
        shifted_exp_series(x, 2, 2)
    } else {
        (x.cosh() - 1.0) / (x * x)
    }
}

/// `(sinh(x) - x) / x^3`, continuous at 0.
pub(crate) fn sinh_minus_id_over_cube(x: C64) -> C64 {
    if x.norm() < 1.0 {
        shifted_exp_series(x, 3, 2)
    } else {
        (x.sinh() - x) / (x * x * x)
    }
}
