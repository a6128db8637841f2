//! Taylor operators and cancellation operators (minimal annihilators) of
//! `V_{d,Λ}`.
//!
//! Every cancellation operator has the two taps `H(−1) = I` and
//!
//! ```text
//! H(0) = [ −I − U_p   Q       ]
//!        [ 0          −exp(K) ]
//! ```
//!
//! where `U_p(j,k) = 1/(k−j)!` above the diagonal, `K` is the companion
//! matrix of `Π_j (x² − λ_j²)` and row `k` of `Q` is the first row of
//! `−Σ_i K^i/(p−k+1+i)!`. With nodes `μ = ±λ_j` and `V = [μ^i]` one has
//! `K V = V diag(μ)`, which turns the cancellation condition
//! `H*(e^{−μ}) [μ^i]_i = 0` into these matrix functions. They stay well
//! conditioned as `λ → 0`, where `H` tends to the Taylor operator.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::numeric::{factorial, real, shifted_exp_series, sinhc, CMatrix, C64};
use crate::seqs::MatrixMask;
use crate::space::{ExpPolySpace, Frequency};

/// The `(p+1)×(p+1)` block `−I − U_p` of the Taylor tap at 0.
fn taylor_block(p: usize) -> CMatrix {
    CMatrix::from_fn(p + 1, p + 1, |j, k| match k.cmp(&j) {
        core::cmp::Ordering::Less => C64::zero(),
        core::cmp::Ordering::Equal => real(-1.0),
        core::cmp::Ordering::Greater => real(-1.0 / factorial(k - j)),
    })
}

/// Taylor operator `T_d`: `(T_d c)_j(α) = c_j(α+1) − Σ_{k≥j} c_k(α)/(k−j)!`.
pub fn taylor_mask(d: usize) -> MatrixMask {
    MatrixMask::new(d + 1, -1, vec![CMatrix::identity(d + 1), taylor_block(d)])
        .expect("square taps")
}

/// `t_k[e^{λ·}](1) = Σ_{j=0}^{k} λ^j / j!`.
pub fn truncated_exp(k: usize, lambda: C64) -> C64 {
    let mut term = C64::one();
    let mut sum = term;
    for j in 1..=k {
        term = term * lambda / j as f64;
        sum += term;
    }
    sum
}

/// `Σ_{i≥0} λ^i/(q+1+i)!`, i.e. `(e^λ − t_q[e^{λ·}](1)) / λ^{q+1}` without
/// cancellation.
pub fn exp_remainder_scaled(q: usize, lambda: C64) -> C64 {
    shifted_exp_series(lambda, q + 1, 1)
}

/// `−Σ_{i even} λ^i/(q+1+i)!`: the entry `h_{k,d−1}` of the single-frequency
/// operator with `q = d − 2 − k` (and `h_{k,d}` with `q + 1`).
fn even_remainder(q: usize, lambda: C64) -> C64 {
    -shifted_exp_series(lambda, q + 1, 2)
}

/// Entry `h_{k,col}` of `Q` in `H_{d,λ}`, `col ∈ {d−1, d}`, `k ≤ d−2`.
pub fn h_entry(d: usize, k: usize, col: usize, lambda: C64) -> Result<C64> {
    if d < 2 || k > d - 2 || !(col == d - 1 || col == d) {
        return Err(Error::Unsupported("h entry outside the Q block"));
    }
    let q = d - 2 - k + (col - (d - 1));
    Ok(even_remainder(q, lambda))
}

/// Index layout of a cancellation operator's block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    /// Size `p + 1` of the Taylor block (rows/cols `0..p+1`).
    pub taylor: usize,
    /// Size `2r` of the exponential block (rows/cols `p+1..=d`).
    pub exponential: usize,
}

/// A cancellation operator with its construction data.
#[derive(Debug, Clone, PartialEq)]
pub struct CancelOp {
    mask: MatrixMask,
    space: ExpPolySpace,
    level: u32,
    blocks: BlockLayout,
}

impl CancelOp {
    pub fn mask(&self) -> &MatrixMask {
        &self.mask
    }

    pub fn into_mask(self) -> MatrixMask {
        self.mask
    }

    /// The (level-0) space annihilated at `level`.
    pub fn space(&self) -> &ExpPolySpace {
        &self.space
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn blocks(&self) -> BlockLayout {
        self.blocks
    }

    pub fn symbol(&self) -> LaurentMatrix {
        self.mask.symbol()
    }

    /// Constant `(p+1)×2r` block `Q`.
    pub fn q_block(&self) -> CMatrix {
        let t = self.mask.tap(0);
        let off = self.blocks.taylor;
        CMatrix::from_fn(off, self.blocks.exponential, |i, j| t[(i, off + j)])
    }

    /// `R*(z) = z^{-1} I − exp(K)`.
    pub fn r_symbol(&self) -> LaurentMatrix {
        let off = self.blocks.taylor;
        let n = self.blocks.exponential;
        let taps: Vec<CMatrix> = [-1, 0]
            .iter()
            .map(|&a| {
                let t = self.mask.tap(a);
                CMatrix::from_fn(n, n, |i, j| t[(off + i, off + j)])
            })
            .collect();
        LaurentMatrix::from_taps(-1, &taps).expect("square blocks")
    }
}

fn assemble(p: i32, q: &CMatrix, exp_k: &CMatrix) -> MatrixMask {
    let t = (p + 1) as usize;
    let e = exp_k.rows();
    let dim = t + e;
    let tb = taylor_block(t.saturating_sub(1));
    let tap0 = CMatrix::from_fn(dim, dim, |i, j| {
        if i < t && j < t {
            tb[(i, j)]
        } else if i < t {
            q[(i, j - t)]
        } else if j < t {
            C64::zero()
        } else {
            -exp_k[(i - t, j - t)]
        }
    });
    MatrixMask::new(dim, -1, vec![CMatrix::identity(dim), tap0]).expect("square taps")
}

/// Single-frequency operator `H_{d,λ}` from the closed-form entries.
pub fn cancel_single(d: usize, lambda: Frequency) -> Result<CancelOp> {
    if d < 2 {
        return Err(Error::Unsupported("single-frequency operator needs d >= 2"));
    }
    let p = d - 2;
    let l = lambda.value();
    let q = CMatrix::from_fn(p + 1, 2, |k, c| even_remainder(p - k + c, l));
    let ch = l.cosh();
    let sc = sinhc(l);
    let exp_k = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => sc,
        (1, 0) => real(lambda.square()) * sc,
        _ => ch,
    });
    Ok(CancelOp {
        mask: assemble(p as i32, &q, &exp_k),
        space: ExpPolySpace::single(p as i32, lambda)?,
        level: 0,
        blocks: BlockLayout {
            taylor: p + 1,
            exponential: 2,
        },
    })
}

/// Companion matrix of `Π_j (x² − λ_j²)` (rows `e_{i+1}`, last row minus
/// the low-order coefficients).
pub fn companion(freqs: &[Frequency]) -> CMatrix {
    // coefficients of Π (y − λ_j²) in y = x², lowest first
    let mut c = vec![1.0f64];
    for f in freqs {
        let s = f.square();
        let mut next = vec![0.0; c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= s * a;
        }
        c = next;
    }
    let n = 2 * freqs.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i + 1 < n {
            if j == i + 1 {
                real(1.0)
            } else {
                C64::zero()
            }
        } else if j % 2 == 0 {
            real(-c[j / 2])
        } else {
            C64::zero()
        }
    })
}

/// Multi-frequency operator `H_{d,Λ}` with `d = p + 2r`.
pub fn cancel_multi(p: i32, freqs: &[Frequency]) -> Result<CancelOp> {
    let space = ExpPolySpace::new(p, freqs.to_vec())?;
    let t = (p + 1) as usize;
    let e = 2 * freqs.len();
    let (q, exp_k) = if e == 0 {
        (CMatrix::zeros(t, 0), CMatrix::zeros(0, 0))
    } else {
        let k = companion(freqs);
        let mut q = CMatrix::zeros(t, e);
        for row in 0..t {
            let qq = t - 1 - row;
            let f = k.power_series(|i| -1.0 / factorial(qq + 1 + i))?;
            for j in 0..e {
                q[(row, j)] = f[(0, j)];
            }
        }
        (q, k.exp()?)
    };
    Ok(CancelOp {
        mask: assemble(p, &q, &exp_k),
        space,
        level: 0,
        blocks: BlockLayout {
            taylor: t,
            exponential: e,
        },
    })
}

/// Level-`n` operator `H^{[n]} = H_{d,2^{-n}Λ}`, annihilating level-`n`
/// samples of `space`.
pub fn cancel_level(space: &ExpPolySpace, n: u32) -> Result<CancelOp> {
    let scaled = space.at_level(n);
    let op = cancel_multi(space.p(), scaled.freqs())?;
    Ok(CancelOp {
        space: space.clone(),
        level: n,
        ..op
    })
}

/// `h*(z) = (z^{-1}−1)^{p+1} Π_j (z^{-1}−e^{λ_j})(z^{-1}−e^{−λ_j})`.
pub fn scalar_annihilator(p: i32, freqs: &[Frequency]) -> Result<LaurentPoly> {
    let space = ExpPolySpace::new(p, freqs.to_vec())?;
    let diff = LaurentPoly::inv_z_plus(real(-1.0));
    let mut h = diff.pow((space.p() + 1) as u32);
    for f in space.freqs() {
        // (z^{-1} − e^λ)(z^{-1} − e^{−λ}) = z^{-2} − 2 cosh λ · z^{-1} + 1
        let pair = LaurentPoly::new(-2, vec![real(1.0), f.value().cosh() * -2.0, real(1.0)]);
        h = &h * &pair;
    }
    Ok(h)
}

/// The explicit Vandermonde construction of `Q` and `R*`, kept as an
/// independent reference for the matrix-function route.
#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeData {
    p: i32,
    /// Nodes `λ_1, −λ_1, λ_2, −λ_2, …`.
    nodes: Vec<C64>,
    /// `L_Λ = [λ_j^{2ℓ}]`, `r×r`.
    pub l_lambda: CMatrix,
    /// `L_{d,Λ} = [(±λ_j)^{p+1+i}]`, `2r×2r`, columns ordered as `nodes`.
    pub l_d_lambda: CMatrix,
    pub w_plus: Vec<C64>,
    pub w_minus: Vec<C64>,
}

impl VandermondeData {
    pub fn new(p: i32, freqs: &[Frequency]) -> Result<Self> {
        if p < -1 {
            return Err(Error::InvalidSpace(
                "polynomial degree p must be at least -1",
            ));
        }
        for (i, a) in freqs.iter().enumerate() {
            if freqs[..i].iter().any(|b| b == a) {
                return Err(Error::Singular(
                    "Vandermonde matrix with repeated frequency",
                ));
            }
        }
        let r = freqs.len();
        let lams: Vec<C64> = freqs.iter().map(Frequency::value).collect();
        let nodes: Vec<C64> = lams.iter().flat_map(|&l| [l, -l]).collect();
        let l_lambda = CMatrix::from_fn(r, r, |j, l| lams[j].powi(2 * l as i32));
        let l_d_lambda = CMatrix::from_fn(2 * r, 2 * r, |i, c| nodes[c].powi(p + 1 + i as i32));
        let e0 = if p % 2 == 0 { p + 2 } else { p + 1 };
        let o0 = if p % 2 == 0 { p + 1 } else { p + 2 };
        let w_plus = lams
            .iter()
            .map(|&l| {
                let head: C64 = (0..=p)
                    .filter(|m| m % 2 == 0)
                    .map(|m| l.powi(m) / factorial(m as usize))
                    .sum();
                -(l.cosh() - head) / l.powi(e0)
            })
            .collect();
        let w_minus = lams
            .iter()
            .map(|&l| {
                let head: C64 = (0..=p)
                    .filter(|m| m % 2 == 1)
                    .map(|m| l.powi(m) / factorial(m as usize))
                    .sum();
                -(l.sinh() - head) / l.powi(o0)
            })
            .collect();
        Ok(Self {
            p,
            nodes,
            l_lambda,
            l_d_lambda,
            w_plus,
            w_minus,
        })
    }

    /// Row 0 of `Q` from the two `r×r` systems `L_Λ x = w_±`.
    pub fn q_row0(&self) -> Result<Vec<C64>> {
        if self.p < 0 {
            return Err(Error::Unsupported("no Taylor rows for p = -1"));
        }
        let r = self.w_plus.len();
        let col = |w: &[C64]| CMatrix::from_fn(r, 1, |i, _| w[i]);
        let xp = self.l_lambda.solve(&col(&self.w_plus))?;
        let xm = self.l_lambda.solve(&col(&self.w_minus))?;
        // even p: odd unknowns pair with w_+; odd p: even unknowns do
        let (even, odd) = if self.p % 2 == 0 { (xm, xp) } else { (xp, xm) };
        Ok((0..2 * r)
            .map(|i| {
                if i % 2 == 0 {
                    even[(i / 2, 0)]
                } else {
                    odd[(i / 2, 0)]
                }
            })
            .collect())
    }

    /// Row `k` of `Q` from the `2r×2r` system
    /// `Σ_i x_i μ^{p+1+i−k} = −(e^μ − t_{p−k}[e^{μ·}](1))` over all nodes.
    pub fn q_row(&self, k: usize) -> Result<Vec<C64>> {
        if self.p < 0 || k as i32 > self.p {
            return Err(Error::Unsupported("row index outside the Taylor block"));
        }
        let n = self.nodes.len();
        let shift = self.p + 1 - k as i32;
        let m = CMatrix::from_fn(n, n, |c, i| self.nodes[c].powi(shift + i as i32));
        let q = (self.p as usize) - k;
        let rhs = CMatrix::from_fn(n, 1, |c, _| {
            let mu = self.nodes[c];
            -(mu.exp() - truncated_exp(q, mu))
        });
        let x = m.solve(&rhs)?;
        Ok((0..n).map(|i| x[(i, 0)]).collect())
    }

    /// `Q` assembled row by row.
    pub fn q_matrix(&self) -> Result<CMatrix> {
        let t = (self.p + 1) as usize;
        let mut q = CMatrix::zeros(t, self.nodes.len());
        for k in 0..t {
            for (j, v) in self.q_row(k)?.into_iter().enumerate() {
                q[(k, j)] = v;
            }
        }
        Ok(q)
    }

    /// `R*(z) = L_{d,Λ} diag(z^{-1} − e^{μ_c}) L_{d,Λ}^{-1}`.
    pub fn r_eval(&self, z: C64) -> Result<CMatrix> {
        if z.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let delta: Vec<C64> = self.nodes.iter().map(|mu| z.inv() - mu.exp()).collect();
        let inv = self.l_d_lambda.inverse()?;
        Ok(&(&self.l_d_lambda * &CMatrix::diagonal(&delta)) * &inv)
    }

    /// Eigenvalues `z^{-1} − e^{μ_c}` of `R*(z)` in node order.
    pub fn r_eigenvalues(&self, z: C64) -> Vec<C64> {
        self.nodes.iter().map(|mu| z.inv() - mu.exp()).collect()
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }
}

/// `H*(e^{−μ}) [μ^i]_{i=0..d}` for every node `μ = ±λ_j`; zero exactly when
/// the cancellation condition holds.
pub fn cancellation_defects(mask: &MatrixMask, freqs: &[Frequency]) -> Result<Vec<f64>> {
    let sym = mask.symbol();
    let dim = mask.dim();
    let mut out = Vec::new();
    for f in freqs {
        for mu in [f.value(), -f.value()] {
            let h = sym.eval((-mu).exp())?;
            let v: Vec<C64> = (0..dim).map(|i| mu.powi(i as i32)).collect();
            let r = h.matvec(&v);
            let scale = v.iter().fold(1.0f64, |m, x| m.max(x.norm()));
            out.push(r.iter().fold(0.0f64, |m, x| m.max(x.norm())) / scale);
        }
    }
    Ok(out)
}

/// Max-entry distance between two masks, used for limit studies.
pub fn mask_distance(a: &MatrixMask, b: &MatrixMask) -> f64 {
    a.max_abs_diff(b)
}
