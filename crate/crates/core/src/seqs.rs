//! Matrix masks, vector sequences on integer windows, convolution, the
//! subdivision operator and the `D`-rescaling of masks.
//!
//! A [`VectorSeq`] is either *compact* (zero outside the stored range) or
//! *windowed* (unknown outside). Operators on windowed data only return the
//! indices whose every contributing input is known.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, PRUNE_REL};
use crate::numeric::{CMatrix, C64};

/// Finitely supported `m×m` matrix sequence; tap `i` is `A(lo + i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMask {
    dim: usize,
    lo: i64,
    taps: Vec<CMatrix>,
}

impl MatrixMask {
    pub fn new(dim: usize, lo: i64, taps: Vec<CMatrix>) -> Result<Self> {
        for t in &taps {
            if t.rows() != dim || t.cols() != dim {
                return Err(Error::DimensionMismatch {
                    op: "mask tap",
                    expected: dim,
                    found: if t.rows() != dim { t.rows() } else { t.cols() },
                });
            }
        }
        Ok(Self::normalized(dim, lo, taps))
    }

    fn normalized(dim: usize, lo: i64, mut taps: Vec<CMatrix>) -> Self {
        let scale = taps.iter().fold(0.0, |m, t| m.max(t.max_abs()));
        let cut = PRUNE_REL * scale;
        for t in &mut taps {
            for i in 0..dim {
                for j in 0..dim {
                    if t[(i, j)].norm() <= cut {
                        t[(i, j)] = C64::zero();
                    }
                }
            }
        }
        let Some(first) = taps.iter().position(|t| !t.is_zero()) else {
            return Self::zero(dim);
        };
        let last = taps.iter().rposition(|t| !t.is_zero()).unwrap_or(first);
        taps.truncate(last + 1);
        taps.drain(..first);
        Self {
            dim,
            lo: lo + first as i64,
            taps,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            lo: 0,
            taps: Vec::new(),
        }
    }

    /// Single identity tap at 0.
    pub fn delta(dim: usize) -> Self {
        Self::single(0, CMatrix::identity(dim))
    }

    /// Single tap `m` at index `at`.
    pub fn single(at: i64, m: CMatrix) -> Self {
        let dim = m.rows();
        Self::normalized(dim, at, vec![m])
    }

    /// 1×1 mask from scalar taps.
    pub fn scalar(lo: i64, taps: &[C64]) -> Self {
        Self::normalized(
            1,
            lo,
            taps.iter().map(|&t| CMatrix::diagonal(&[t])).collect(),
        )
    }

    pub fn from_symbol(sym: &LaurentMatrix) -> Result<Self> {
        if sym.rows() != sym.cols() {
            return Err(Error::NotSquare {
                op: "mask from symbol",
                rows: sym.rows(),
                cols: sym.cols(),
            });
        }
        let (lo, taps) = sym.to_taps();
        Ok(Self::normalized(sym.rows(), lo, taps))
    }

    pub fn symbol(&self) -> LaurentMatrix {
        if self.taps.is_empty() {
            return LaurentMatrix::zeros(self.dim, self.dim);
        }
        LaurentMatrix::from_taps(self.lo, &self.taps).expect("taps share the mask shape")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.taps.len() as i64 - 1
    }

    pub fn taps(&self) -> &[CMatrix] {
        &self.taps
    }

    pub fn is_zero(&self) -> bool {
        self.taps.is_empty()
    }

    /// `[L, U]`, or `None` for the zero mask.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.lo, self.hi()))
    }

    /// `max(|L|, |U|)`.
    pub fn radius(&self) -> usize {
        self.support()
            .map_or(0, |(l, u)| l.unsigned_abs().max(u.unsigned_abs()) as usize)
    }

    /// `A(α)`, zero outside the support.
    pub fn tap(&self, alpha: i64) -> CMatrix {
        let i = alpha - self.lo;
        if i < 0 || i as usize >= self.taps.len() {
            return CMatrix::zeros(self.dim, self.dim);
        }
        self.taps[i as usize].clone()
    }

    pub fn max_abs(&self) -> f64 {
        self.taps.iter().fold(0.0, |m, t| m.max(t.max_abs()))
    }

    /// Largest entrywise distance over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return 0.0,
            (Some(s), None) | (None, Some(s)) => s,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        (lo..=hi)
            .map(|k| self.tap(k).max_abs_diff(&other.tap(k)))
            .fold(0.0, f64::max)
    }

    /// Tapwise `left · A(α) · right`.
    pub fn conjugate(&self, left: &CMatrix, right: &CMatrix) -> Self {
        let taps = self.taps.iter().map(|t| &(left * t) * right).collect();
        Self::normalized(self.dim, self.lo, taps)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::normalized(
            self.dim,
            self.lo,
            self.taps.iter().map(|t| t.scale(s)).collect(),
        )
    }

    /// Tapwise difference `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim, "mask difference")?;
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return Ok(Self::zero(self.dim)),
            (Some(s), None) | (None, Some(s)) => s,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        let taps = (lo..=hi).map(|k| &self.tap(k) - &other.tap(k)).collect();
        Ok(Self::normalized(self.dim, lo, taps))
    }

    /// Returns a copy with `A(α)(i, j)` replaced by `value`.
    pub fn with_entry(&self, alpha: i64, i: usize, j: usize, value: C64) -> Self {
        let (lo, hi) = match self.support() {
            None => (alpha, alpha),
            Some((l, u)) => (l.min(alpha), u.max(alpha)),
        };
        let mut taps: Vec<CMatrix> = (lo..=hi).map(|k| self.tap(k)).collect();
        taps[(alpha - lo) as usize][(i, j)] = value;
        Self::normalized(self.dim, lo, taps)
    }

    fn check_dim(&self, dim: usize, op: &'static str) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }
}

/// `D = diag(2^{-j})`, `j = 0..=d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleMatrix {
    d: usize,
}

impl ScaleMatrix {
    pub fn new(d: usize) -> Self {
        Self { d }
    }

    /// The scale matrix acting on `dim`-vectors.
    pub fn for_dim(dim: usize) -> Self {
        Self::new(dim.saturating_sub(1))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `D^n = diag(2^{-nj})`; negative `n` gives the inverse powers.
    pub fn pow(&self, n: i64) -> CMatrix {
        let entries: Vec<C64> = (0..=self.d)
            .map(|j| C64::new(Float::powi(2.0f64, -(n as i32) * j as i32), 0.0))
            .collect();
        CMatrix::diagonal(&entries)
    }

    pub fn apply(&self, n: i64, v: &[C64]) -> Vec<C64> {
        v.iter()
            .enumerate()
            .map(|(j, &x)| x * Float::powi(2.0f64, -(n as i32) * j as i32))
            .collect()
    }
}

/// Vector sequence `α ↦ values[α − lo]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSeq {
    dim: usize,
    lo: i64,
    values: Vec<Vec<C64>>,
    compact: bool,
}

impl VectorSeq {
    fn build(dim: usize, lo: i64, values: Vec<Vec<C64>>, compact: bool) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                op: "vector sequence entry",
                expected: dim,
                found: v.len(),
            });
        }
        Ok(Self {
            dim,
            lo,
            values,
            compact,
        })
    }

    /// Samples known on `[lo, lo + len)`, unknown elsewhere.
    pub fn windowed(dim: usize, lo: i64, values: Vec<Vec<C64>>) -> Result<Self> {
        Self::build(dim, lo, values, false)
    }

    /// Finitely supported data, zero outside the stored range.
    pub fn compact(dim: usize, lo: i64, values: Vec<Vec<C64>>) -> Result<Self> {
        Self::build(dim, lo, values, true)
    }

    /// Compact sequence with `e_column` at α = 0.
    pub fn delta(dim: usize, column: usize) -> Self {
        let mut v = vec![C64::zero(); dim];
        if column < dim {
            v[column] = C64::new(1.0, 0.0);
        }
        Self {
            dim,
            lo: 0,
            values: vec![v],
            compact: true,
        }
    }

    /// Windowed sequence sampled from `f` on `[a, b]`.
    pub fn from_fn(dim: usize, a: i64, b: i64, mut f: impl FnMut(i64) -> Vec<C64>) -> Result<Self> {
        let values = if a <= b {
            (a..=b).map(&mut f).collect()
        } else {
            Vec::new()
        };
        Self::windowed(dim, a, values)
    }

    fn empty(dim: usize, lo: i64) -> Self {
        Self {
            dim,
            lo,
            values: Vec::new(),
            compact: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stored index interval `[a, b]`; `None` when nothing is stored.
    pub fn window(&self) -> Option<(i64, i64)> {
        (!self.values.is_empty()).then(|| (self.lo, self.lo + self.values.len() as i64 - 1))
    }

    pub fn values(&self) -> &[Vec<C64>] {
        &self.values
    }

    /// Stored value at α.
    pub fn get(&self, alpha: i64) -> Option<&[C64]> {
        let i = alpha - self.lo;
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).map(Vec::as_slice)
    }

    /// Value at α: stored, zero outside for compact data, `None` if unknown.
    pub fn value(&self, alpha: i64) -> Option<Vec<C64>> {
        match self.get(alpha) {
            Some(v) => Some(v.to_vec()),
            None if self.compact => Some(vec![C64::zero(); self.dim]),
            None => None,
        }
    }

    /// Iterator over `(α, value)` pairs of stored entries.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &[C64])> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.lo + i as i64, v.as_slice()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Windowed restriction to `[a, b] ∩ window`.
    pub fn restrict(&self, a: i64, b: i64) -> Self {
        let Some((lo, hi)) = self.window() else {
            return Self::empty(self.dim, a);
        };
        let (a2, b2) = (a.max(lo), b.min(hi));
        if a2 > b2 {
            return Self::empty(self.dim, a);
        }
        let values = self.values[(a2 - lo) as usize..=(b2 - lo) as usize].to_vec();
        Self {
            dim: self.dim,
            lo: a2,
            values,
            compact: false,
        }
    }

    /// Applies a fixed matrix to every entry.
    pub fn map_matrix(&self, m: &CMatrix) -> Self {
        Self {
            dim: m.rows(),
            lo: self.lo,
            values: self.values.iter().map(|v| m.matvec(v)).collect(),
            compact: self.compact,
        }
    }

    /// Column symbol `Σ c(α) z^α` of compact data.
    pub fn symbol(&self) -> Result<LaurentMatrix> {
        if !self.compact {
            return Err(Error::Unsupported("symbol of windowed (non-compact) data"));
        }
        if self.values.is_empty() {
            return Ok(LaurentMatrix::zeros(self.dim, 1));
        }
        let taps: Vec<CMatrix> = self
            .values
            .iter()
            .map(|v| CMatrix::from_fn(self.dim, 1, |i, _| v[i]))
            .collect();
        LaurentMatrix::from_taps(self.lo, &taps)
    }

    /// Largest distance to `other` over the common stored window.
    pub fn max_abs_diff_on(&self, other: &Self, a: i64, b: i64) -> Option<f64> {
        let mut m = 0.0f64;
        for alpha in a..=b {
            let x = self.value(alpha)?;
            let y = other.value(alpha)?;
            for (u, v) in x.iter().zip(&y) {
                m = m.max((u - v).norm());
            }
        }
        Some(m)
    }
}

fn check_dims(mask: &MatrixMask, dim: usize, op: &'static str) -> Result<()> {
    if mask.dim != dim {
        return Err(Error::DimensionMismatch {
            op,
            expected: mask.dim,
            found: dim,
        });
    }
    Ok(())
}

/// `C(α) = Σ_β A(β) B(α − β)`.
pub fn convolve(a: &MatrixMask, b: &MatrixMask) -> Result<MatrixMask> {
    check_dims(a, b.dim, "convolution")?;
    let (Some((la, ua)), Some((lb, ub))) = (a.support(), b.support()) else {
        return Ok(MatrixMask::zero(a.dim));
    };
    let mut taps = vec![CMatrix::zeros(a.dim, a.dim); (ua - la + ub - lb + 1) as usize];
    for (i, ta) in a.taps.iter().enumerate() {
        for (j, tb) in b.taps.iter().enumerate() {
            let prod = ta * tb;
            taps[i + j] = &taps[i + j] + &prod;
        }
    }
    Ok(MatrixMask::normalized(a.dim, la + lb, taps))
}

/// `(S_A c)(α) = Σ_β A(α − 2β) c(β)`.
///
/// With mask support `[L, U]` the output covers `[2a+L, 2b+U]` for compact
/// input on `[a, b]` and `[2a+U−1, 2b+L+1]` for windowed input: exactly the
/// indices whose contributing `β` all lie in `[a, b]`.
pub fn subdivide(mask: &MatrixMask, c: &VectorSeq) -> Result<VectorSeq> {
    check_dims(mask, c.dim, "subdivision")?;
    let Some((a, b)) = c.window() else {
        return Ok(VectorSeq {
            compact: c.compact,
            ..VectorSeq::empty(c.dim, 0)
        });
    };
    let (l, u) = mask.support().unwrap_or((0, 0));
    let (lo, hi) = if c.compact {
        (2 * a + l, 2 * b + u)
    } else {
        (2 * a + u - 1, 2 * b + l + 1)
    };
    if lo > hi {
        return Ok(VectorSeq::empty(c.dim, lo));
    }
    let m = c.dim;
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    for alpha in lo..=hi {
        let mut out = vec![C64::zero(); m];
        // α − 2β ∈ [L, U]  ⇔  β ∈ [⌈(α−U)/2⌉, ⌊(α−L)/2⌋]
        let b0 = (alpha - u).div_euclid(2) + i64::from((alpha - u).rem_euclid(2) != 0);
        let b1 = (alpha - l).div_euclid(2);
        for beta in b0.max(a)..=b1.min(b) {
            // The zero mask has no taps; its output is identically zero.
            let Some(t) = mask.taps.get((alpha - 2 * beta - mask.lo) as usize) else {
                continue;
            };
            let v = &c.values[(beta - a) as usize];
            for (i, o) in out.iter_mut().enumerate() {
                for (k, x) in v.iter().enumerate() {
                    *o += t[(i, k)] * x;
                }
            }
        }
        values.push(out);
    }
    Ok(VectorSeq {
        dim: m,
        lo,
        values,
        compact: c.compact,
    })
}

/// `(H c)(α) = Σ_β H(α − β) c(β)`; windowed output `[a+U, b+L]`,
/// compact output `[a+L, b+U]`.
pub fn conv_apply(mask: &MatrixMask, c: &VectorSeq) -> Result<VectorSeq> {
    check_dims(mask, c.dim, "convolution operator")?;
    let Some((a, b)) = c.window() else {
        return Ok(VectorSeq {
            compact: c.compact,
            ..VectorSeq::empty(c.dim, 0)
        });
    };
    let (l, u) = mask.support().unwrap_or((0, 0));
    let (lo, hi) = if c.compact {
        (a + l, b + u)
    } else {
        (a + u, b + l)
    };
    if lo > hi {
        return Ok(VectorSeq::empty(c.dim, lo));
    }
    let m = c.dim;
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    for alpha in lo..=hi {
        let mut out = vec![C64::zero(); m];
        for beta in (alpha - u).max(a)..=(alpha - l).min(b) {
            // The zero mask has no taps; its output is identically zero.
            let Some(t) = mask.taps.get((alpha - beta - mask.lo) as usize) else {
                continue;
            };
            let v = &c.values[(beta - a) as usize];
            for (i, o) in out.iter_mut().enumerate() {
                for (k, x) in v.iter().enumerate() {
                    *o += t[(i, k)] * x;
                }
            }
        }
        values.push(out);
    }
    Ok(VectorSeq {
        dim: m,
        lo,
        values,
        compact: c.compact,
    })
}

/// `Ã = D^{-(n+1)} A D^n`, the mask acting on un-normalised derivative data.
pub fn rescale_mask(a: &MatrixMask, n: i64) -> MatrixMask {
    let d = ScaleMatrix::for_dim(a.dim);
    a.conjugate(&d.pow(-(n + 1)), &d.pow(n))
}

/// Inverse of [`rescale_mask`]: `A = D^{n+1} Ã D^{-n}`.
pub fn unrescale_mask(a: &MatrixMask, n: i64) -> MatrixMask {
    let d = ScaleMatrix::for_dim(a.dim);
    a.conjugate(&d.pow(n + 1), &d.pow(-n))
}
