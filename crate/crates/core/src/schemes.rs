//! The interpolatory Hermite schemes reproducing `V_{d,λ}`, `d ∈ {2, 3}`:
//! construction by local Hermite interpolation, closed-form symbols of the
//! scheme and of its factor, determinant identities, the `n → ∞` limit and
//! the iteration itself.
//!
//! All closed forms are written in `μ = λ_n = 2^{-n}λ`. With
//! `c = cosh(μ/2)`, `σ = sinh(μ/2)/μ`, `κ = (c−1)/μ²`, `ρ = μ sinh(μ/2)` and
//! `g = (2 sinh(μ/2) − μ)/μ³`, the `d = 2` scheme has symbol `P(z)/(16z)`:
//!
//! ```text
//! [ 8(z+1)²   8σ(z²−1)    8κ(z²+1) ]
//! [ 0         4cz²+8z+4c  4σ(z²−1) ]
//! [ 0         2ρ(z²−1)    2cz²+4z+2c ]
//! ```
//!
//! and the `d = 3` scheme has symbol `P(z)/(32z)` with first row
//! `16(z+1)², 8(z²−1), 16κ(z²+1), 8g(z²−1)` and the `d = 2` numerators as
//! its lower-right block. The factors are `B(z)/16`, `B(z)/32` with the
//! analogous entries (see [`closed_form_b`]).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    coshm1_over_sq, factorial, real, sinh_minus_id_over_cube, sinhc, CMatrix, C64,
};
use crate::seqs::{rescale_mask, subdivide, MatrixMask, ScaleMatrix, VectorSeq};
use crate::space::{ExpPolySpace, Frequency};

/// Condition estimate above which the collocation matrix is rejected.
pub const MAX_COLLOCATION_CONDITION: f64 = 1e12;

/// `|λu|` up to which the exponential basis is summed as a series.
const SERIES_RADIUS: f64 = 2.0;

/// `t`-th derivative at `u` of the normalised remainder
/// `Σ_{m ≡ parity, m > p} λ^{m−m0} u^m / m!`, `m0` its lowest index.
fn remainder_derivative(p: i32, parity: i32, lambda: C64, t: usize, u: f64) -> C64 {
    let m0 = if (p + 1).rem_euclid(2) == parity {
        p + 1
    } else {
        p + 2
    };
    let ti = t as i32;
    if (lambda * u).norm() <= SERIES_RADIUS {
        let mut m = m0;
        while m < ti {
            m += 2;
        }
        let k = (m - ti) as usize;
        let mut term = lambda.powi(m - m0) * Float::powi(u, k as i32) / factorial(k);
        let mut sum = term;
        let l2u2 = lambda * lambda * (u * u);
        let mut k = k;
        for _ in 0..200 {
            term = term * l2u2 / ((k + 1) * (k + 2)) as f64;
            k += 2;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let x = lambda * u;
        // d^t/du^t of cosh(λu) (parity 0) or sinh(λu) (parity 1)
        let full = lambda.powi(ti)
            * if (ti + parity) % 2 == 0 {
                x.cosh()
            } else {
                x.sinh()
            };
        let head: C64 = (0..=p)
            .filter(|m| m % 2 == parity && *m >= ti)
            .map(|m| lambda.powi(m) * Float::powi(u, m - ti) / factorial((m - ti) as usize))
            .sum();
        (full - head) / lambda.powi(m0)
    }
}

/// Derivative table `[b^{(t)}(u)]_{t, b}` of the centred basis
/// `u^k/k! (k ≤ p)`, then per frequency the even and odd remainders.
fn basis_derivatives(space: &ExpPolySpace, u: f64) -> CMatrix {
    let dim = space.dim();
    let p = space.p();
    let t_count = (p + 1) as usize;
    CMatrix::from_fn(dim, dim, |t, b| {
        if b < t_count {
            if t > b {
                C64::zero()
            } else {
                real(Float::powi(u, (b - t) as i32) / factorial(b - t))
            }
        } else {
            let j = (b - t_count) / 2;
            let parity = ((b - t_count) % 2) as i32;
            remainder_derivative(p, parity, space.freqs()[j].value(), t, u)
        }
    })
}

/// Element of `V` fitted to Hermite data `[g^{(j)}(node)]_{j=0..d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    space: ExpPolySpace,
    node: f64,
    coeffs: Vec<C64>,
}

impl Interpolant {
    pub fn new(space: &ExpPolySpace, node: f64, data: &[C64]) -> Result<Self> {
        let dim = space.dim();
        if data.len() != dim {
            return Err(Error::DimensionMismatch {
                op: "Hermite interpolation data",
                expected: dim,
                found: data.len(),
            });
        }
        let g = basis_derivatives(space, 0.0);
        let cond = g.condition()?;
        if cond.is_nan() || cond > MAX_COLLOCATION_CONDITION {
            return Err(Error::IllConditioned {
                what: "Hermite collocation matrix",
                condition: cond,
            });
        }
        let rhs = CMatrix::from_fn(dim, 1, |i, _| data[i]);
        let c = g.solve(&rhs)?;
        Ok(Self {
            space: space.clone(),
            node,
            coeffs: (0..dim).map(|i| c[(i, 0)]).collect(),
        })
    }

    /// Coefficients in the centred basis (see [`hermite_interpolant`]).
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn node(&self) -> f64 {
        self.node
    }

    /// `[g^{(j)}(x)]_{j=0..d}`.
    pub fn derivatives(&self, x: f64) -> Vec<C64> {
        basis_derivatives(&self.space, x - self.node).matvec(&self.coeffs)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.derivatives(x)[0]
    }
}

/// Hermite interpolant from `V_{d,λ}` (`p = d − 2`) at `node`.
///
/// The basis, centred at the node with `u = x − node`, is
/// `u^k/k!` for `k ≤ d−2` followed by the normalised even and odd
/// remainders of `cosh(λu)` and `sinh(λu)`; its collocation matrix at the
/// node is the identity.
pub fn hermite_interpolant(
    d: usize,
    lambda: Frequency,
    node: f64,
    data: &[C64],
) -> Result<Interpolant> {
    let space = example_space(d, lambda)?;
    Interpolant::new(&space, node, data)
}

/// `V_{d,λ}` for the example schemes.
pub fn example_space(d: usize, lambda: Frequency) -> Result<ExpPolySpace> {
    if d < 2 {
        return Err(Error::Unsupported("example schemes need d >= 2"));
    }
    ExpPolySpace::single(d as i32 - 2, lambda)
}

/// Map from Hermite data at a node to the data of its interpolant at
/// `node + h`.
pub fn transfer_matrix(space: &ExpPolySpace, h: f64) -> Result<CMatrix> {
    let g = basis_derivatives(space, 0.0);
    let b = basis_derivatives(space, h);
    let cond = g.condition()?;
    if cond.is_nan() || cond > MAX_COLLOCATION_CONDITION {
        return Err(Error::IllConditioned {
            what: "Hermite collocation matrix",
            condition: cond,
        });
    }
    Ok(&b * &g.inverse()?)
}

/// Level-`n` mask of the interpolatory scheme for `space`: even rule copies,
/// odd rule averages the two neighbouring interpolants' data at the
/// midpoint, all in `D^n`-normalised form.
pub fn interpolatory_mask(space: &ExpPolySpace, n: u32) -> Result<MatrixMask> {
    let h = Float::powi(0.5f64, n as i32 + 1);
    let d = ScaleMatrix::for_dim(space.dim());
    let left = d.pow(n as i64 + 1).scale(real(0.5));
    let right = d.pow(-(n as i64));
    let fwd = &(&left * &transfer_matrix(space, h)?) * &right;
    let bwd = &(&left * &transfer_matrix(space, -h)?) * &right;
    MatrixMask::new(space.dim(), -1, vec![bwd, d.pow(1), fwd])
}

/// `A^{[n]}` built from the interpolation rules.
pub fn build_example_mask(d: usize, lambda: Frequency, n: u32) -> Result<MatrixMask> {
    interpolatory_mask(&example_space(d, lambda)?, n)
}

fn check_d(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "closed forms exist for d = 2 and d = 3 only",
        ))
    }
}

struct Hyperbolic {
    c: C64,
    sigma: C64,
    kappa: C64,
    rho: C64,
    g: C64,
}

impl Hyperbolic {
    fn new(lambda: Frequency, n: u32) -> Self {
        let mu = lambda.at_level(n).value();
        let x = mu * 0.5;
        Self {
            c: x.cosh(),
            sigma: sinhc(x) * 0.5,
            kappa: coshm1_over_sq(x) * 0.25,
            rho: mu * mu * sinhc(x) * 0.5,
            g: sinh_minus_id_over_cube(x) * 0.25,
        }
    }
}

type Numerators = Vec<Vec<[C64; 3]>>;

/// `d = 2` numerators `[z^0, z^1, z^2]`.
fn numerators_2(h: &Hyperbolic) -> Numerators {
    let z = C64::zero();
    let r = real;
    vec![
        vec![
            [r(8.0), r(16.0), r(8.0)],
            [-h.sigma * 8.0, z, h.sigma * 8.0],
            [h.kappa * 8.0, z, h.kappa * 8.0],
        ],
        vec![
            [z, z, z],
            [h.c * 4.0, r(8.0), h.c * 4.0],
            [-h.sigma * 4.0, z, h.sigma * 4.0],
        ],
        vec![
            [z, z, z],
            [-h.rho * 2.0, z, h.rho * 2.0],
            [h.c * 2.0, r(4.0), h.c * 2.0],
        ],
    ]
}

fn numerators_3(h: &Hyperbolic) -> Numerators {
    let z = C64::zero();
    let r = real;
    let low = numerators_2(h);
    let mut rows = vec![vec![
        [r(16.0), r(32.0), r(16.0)],
        [r(-8.0), z, r(8.0)],
        [h.kappa * 16.0, z, h.kappa * 16.0],
        [-h.g * 8.0, z, h.g * 8.0],
    ]];
    for row in low {
        let mut v = vec![[z, z, z]];
        v.extend(row);
        rows.push(v);
    }
    rows
}

fn mask_from_numerators(num: &Numerators, den: f64, lo: i64, taps: usize) -> MatrixMask {
    let dim = num.len();
    let t = (0..taps)
        .map(|k| CMatrix::from_fn(dim, dim, |i, j| num[i][j][k] / den))
        .collect();
    MatrixMask::new(dim, lo, t).expect("square numerators")
}

/// `A^{[n]}` from the closed-form symbol.
pub fn closed_form_a(d: usize, lambda: Frequency, n: u32) -> Result<MatrixMask> {
    check_d(d)?;
    let h = Hyperbolic::new(lambda, n);
    Ok(match d {
        2 => mask_from_numerators(&numerators_2(&h), 16.0, -1, 3),
        _ => mask_from_numerators(&numerators_3(&h), 32.0, -1, 3),
    })
}

/// Factor `B^{[n]}` with `H^{[n+1]}(z) A^{[n]}(z) = B^{[n]}(z) H^{[n]}(z²)`,
/// symbol `[const, z]` numerators over 16 (`d = 2`) or 32 (`d = 3`).
pub fn closed_form_b(d: usize, lambda: Frequency, n: u32) -> Result<MatrixMask> {
    check_d(d)?;
    let h = Hyperbolic::new(lambda, n);
    let z = C64::zero();
    let r = real;
    let b2 = |h: &Hyperbolic| -> Numerators {
        vec![
            vec![
                [r(8.0), r(8.0), z],
                [-h.sigma * 8.0, z, z],
                [h.kappa * 8.0, z, z],
            ],
            vec![[z, z, z], [h.c * 4.0, r(4.0), z], [-h.sigma * 4.0, z, z]],
            vec![[z, z, z], [-h.rho * 2.0, z, z], [h.c * 2.0, r(2.0), z]],
        ]
    };
    Ok(match d {
        2 => mask_from_numerators(&b2(&h), 16.0, 0, 2),
        _ => {
            let mut rows = vec![vec![
                [r(16.0), r(16.0), z],
                [r(-8.0), z, z],
                [h.kappa * 16.0, z, z],
                [-h.g * 8.0, z, z],
            ]];
            for row in b2(&h) {
                let mut v = vec![[z, z, z]];
                v.extend(row);
                rows.push(v);
            }
            mask_from_numerators(&rows, 32.0, 0, 2)
        }
    })
}

/// `lim_{n→∞} A^{[n]}`: the polynomial Hermite schemes of degree `d`.
pub fn limit_symbol(d: usize) -> Result<MatrixMask> {
    check_d(d)?;
    let r = |a: f64, b: f64, c: f64| [real(a), real(b), real(c)];
    let zero = r(0.0, 0.0, 0.0);
    let num: Numerators = if d == 2 {
        vec![
            vec![r(8.0, 16.0, 8.0), r(-4.0, 0.0, 4.0), r(1.0, 0.0, 1.0)],
            vec![zero, r(4.0, 8.0, 4.0), r(-2.0, 0.0, 2.0)],
            vec![zero, zero, r(2.0, 4.0, 2.0)],
        ]
    } else {
        vec![
            vec![
                r(48.0, 96.0, 48.0),
                r(-24.0, 0.0, 24.0),
                r(6.0, 0.0, 6.0),
                r(-1.0, 0.0, 1.0),
            ],
            vec![
                zero,
                r(24.0, 48.0, 24.0),
                r(-12.0, 0.0, 12.0),
                r(3.0, 0.0, 3.0),
            ],
            vec![zero, zero, r(12.0, 24.0, 12.0), r(-6.0, 0.0, 6.0)],
            vec![zero, zero, zero, r(6.0, 12.0, 6.0)],
        ]
    };
    Ok(mask_from_numerators(
        &num,
        if d == 2 { 16.0 } else { 96.0 },
        -1,
        3,
    ))
}

/// Closed-form determinant of `A^{[n]*}(z)`:
/// `(z+1)^{2(d−1)} e^{−μ} (e^{μ/2}+z)² (z e^{μ/2}+1)² / (64 z³)` for `d = 2`
/// and `… / (1024 z⁴)` for `d = 3`.
pub fn det_closed_form(d: usize, lambda: Frequency, n: u32, z: C64) -> Result<C64> {
    check_d(d)?;
    if z.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let mu = lambda.at_level(n).value();
    let e = (mu * 0.5).exp();
    let common = (-mu).exp() * (e + z).powi(2) * (z * e + 1.0).powi(2);
    Ok(if d == 2 {
        (z + 1.0).powi(2) * common / (z.powi(3) * 64.0)
    } else {
        (z + 1.0).powi(4) * common / (z.powi(4) * 1024.0)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetSample {
    pub z: C64,
    pub lhs: C64,
    pub rhs: C64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetReport {
    pub d: usize,
    pub level: u32,
    pub samples: Vec<DetSample>,
}

impl DetReport {
    pub fn max_relative(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.relative))
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_relative() <= tol
    }
}

/// Twelve fixed sample points on three circles, away from the roots.
pub fn default_det_samples() -> Vec<C64> {
    let radii = [0.6, 1.3, 2.1];
    (0..12)
        .map(|k| C64::from_polar(radii[k % 3], 2.0 * PI * (k as f64 + 0.37) / 12.0))
        .collect()
}

/// Compares `det A^{[n]*}` from the closed-form mask with
/// [`det_closed_form`] at the default sample points.
pub fn det_identity(d: usize, lambda: Frequency, n: u32) -> Result<DetReport> {
    det_identity_at(d, lambda, n, &default_det_samples())
}

pub fn det_identity_at(d: usize, lambda: Frequency, n: u32, zs: &[C64]) -> Result<DetReport> {
    let det = closed_form_a(d, lambda, n)?.symbol().det()?;
    let samples = zs
        .iter()
        .map(|&z| {
            let lhs = det.eval(z)?;
            let rhs = det_closed_form(d, lambda, n, z)?;
            let relative = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
            Ok(DetSample {
                z,
                lhs,
                rhs,
                relative,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetReport {
        d,
        level: n,
        samples,
    })
}

/// Which family of masks a scheme draws from.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    /// `A^{[n]}` from the closed-form symbol.
    ClosedForm,
    /// `A^{[n]}` from the interpolation rules.
    Interpolatory,
    /// The factor scheme `B^{[n]}`, iterated on normalised data.
    Factor,
    /// The polynomial limit scheme (level independent).
    Limit,
    /// A user-supplied stationary mask.
    Fixed(MatrixMask),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub d: usize,
    pub lambda: Frequency,
    pub kind: SchemeKind,
}

impl SchemeSpec {
    pub fn new(d: usize, lambda: Frequency, kind: SchemeKind) -> Self {
        Self { d, lambda, kind }
    }

    /// Mask used at level `n`.
    pub fn mask(&self, n: u32) -> Result<MatrixMask> {
        match &self.kind {
            SchemeKind::ClosedForm => closed_form_a(self.d, self.lambda, n),
            SchemeKind::Interpolatory => build_example_mask(self.d, self.lambda, n),
            SchemeKind::Factor => closed_form_b(self.d, self.lambda, n),
            SchemeKind::Limit => limit_symbol(self.d),
            SchemeKind::Fixed(m) => Ok(m.clone()),
        }
    }

    /// Whether iterates are raw derivative data (masks rescaled by `D`).
    pub fn rescaled(&self) -> bool {
        !matches!(self.kind, SchemeKind::Factor)
    }

    /// Data dimension `d + 1`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            SchemeKind::Fixed(m) => m.dim(),
            _ => self.d + 1,
        }
    }

    /// Space reproduced by the scheme.
    pub fn space(&self) -> Result<ExpPolySpace> {
        match self.kind {
            SchemeKind::Limit => Ok(ExpPolySpace::polynomial(self.d)),
            _ => example_space(self.d, self.lambda),
        }
    }
}

/// All levels `c^{[0]}, …, c^{[N]}` of a run; level `n` lives on `2^{-n}ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateStack {
    pub levels: Vec<(u32, VectorSeq)>,
    /// Raw derivative data (`true`) or `D^n`-normalised data.
    pub rescaled: bool,
}

impl IterateStack {
    pub fn last(&self) -> &VectorSeq {
        &self.levels.last().expect("a run keeps at least c^{[0]}").1
    }

    pub fn level(&self, n: u32) -> Option<&VectorSeq> {
        self.levels.iter().find(|(k, _)| *k == n).map(|(_, s)| s)
    }

    /// `D^n c^{[n]}` for raw data, the stored data otherwise.
    pub fn normalized(&self, n: u32) -> Option<VectorSeq> {
        let s = self.level(n)?;
        if !self.rescaled {
            return Some(s.clone());
        }
        Some(s.map_matrix(&ScaleMatrix::for_dim(s.dim()).pow(n as i64)))
    }

    /// Sup-norm of each level.
    pub fn sup_norms(&self) -> Vec<f64> {
        self.levels.iter().map(|(_, s)| s.max_abs()).collect()
    }
}

/// Runs `iterations` refinement steps. For rescaled schemes
/// `c^{[n+1]} = S_{Ã^{[n]}} c^{[n]}` with `Ã^{[n]} = D^{-(n+1)} A^{[n]} D^n`,
/// otherwise `c^{[n+1]} = S_{A^{[n]}} c^{[n]}`.
pub fn run_scheme(spec: &SchemeSpec, c0: &VectorSeq, iterations: u32) -> Result<IterateStack> {
    if c0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            op: "scheme initial data",
            expected: spec.dim(),
            found: c0.dim(),
        });
    }
    let rescaled = spec.rescaled();
    let mut levels = vec![(0u32, c0.clone())];
    for n in 0..iterations {
        let a = spec.mask(n)?;
        let a = if rescaled {
            rescale_mask(&a, n as i64)
        } else {
            a
        };
        let cur = &levels.last().expect("non-empty").1;
        let next = subdivide(&a, cur)?;
        if next.is_empty() {
            let (l, u) = a.support().unwrap_or((0, 0));
            let need = (u - l + 1).div_euclid(2);
            let deficit = (need - cur.len() as i64).max(1) as usize;
            return Err(Error::WindowExhausted {
                level: n + 1,
                deficit,
            });
        }
        levels.push((n + 1, next));
    }
    Ok(IterateStack { levels, rescaled })
}
