//! Factorization of annihilating masks through the cancellation operator.
//!
//! * convolution: `C*(z) = B*(z) H*(z)` when `C` annihilates `V`;
//! * subdivision: `C*(z) = B*(z) H^{[n]*}(z²)` when `S_C` annihilates the
//!   level-`n` samples of `V`;
//! * schemes: `H^{[n+1]*}(z) A*(z) = B*(z) H^{[n]*}(z²)` when `A` satisfies
//!   the level-`n` spectral condition.
//!
//! Every variant reduces to exact right division of symbols.

use crate::annihilator::cancel_level;
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::numeric::real;
use crate::seqs::{convolve, rescale_mask, MatrixMask, ScaleMatrix};
use crate::space::{
    check_annihilation_with, check_spectral_with, check_subdivision_kernel_with, CheckOptions,
    ExpPolySpace,
};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorResult {
    pub b: MatrixMask,
    /// Relative coefficient residual of the symbol identity.
    pub residual: f64,
    /// Exponent interval searched for `B`.
    pub support_used: (i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Tolerance for both the precondition check and the division.
    pub tol: f64,
    /// Exponent interval for `B`; the division default when `None`.
    pub support: Option<(i64, i64)>,
    /// Skip the precondition check and go straight to the division.
    pub skip_precheck: bool,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            support: None,
            skip_precheck: false,
        }
    }
}

impl FactorOptions {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            tol: self.tol,
            half_width: None,
        }
    }
}

fn divide(c: &LaurentMatrix, h: &LaurentMatrix, opts: &FactorOptions) -> Result<FactorResult> {
    let q = LaurentMatrix::solve_right_factor_tol(c, h, opts.support, opts.tol)?;
    Ok(FactorResult {
        b: MatrixMask::from_symbol(&q.b)?,
        residual: q.residual,
        support_used: q.support,
    })
}

/// `C = B * H_{d,Λ}` for a mask `C` annihilating `V_{d,Λ}`.
pub fn factor_convolution(c: &MatrixMask, space: &ExpPolySpace) -> Result<FactorResult> {
    factor_convolution_with(c, space, &FactorOptions::default())
}

pub fn factor_convolution_with(
    c: &MatrixMask,
    space: &ExpPolySpace,
    opts: &FactorOptions,
) -> Result<FactorResult> {
    if !opts.skip_precheck {
        let rep = check_annihilation_with(c, space, 0, &opts.check_options())?;
        if !rep.passed() {
            return Err(Error::NotAnnihilator {
                residual: rep.max_relative(),
            });
        }
    }
    let h = cancel_level(space, 0)?.symbol();
    divide(&c.symbol(), &h, opts)
}

/// `S_C = S_B ∘ H^{[n]}`, i.e. `C*(z) = B*(z) H^{[n]*}(z²)`.
pub fn factor_subdivision(c: &MatrixMask, space: &ExpPolySpace, n: u32) -> Result<FactorResult> {
    factor_subdivision_with(c, space, n, &FactorOptions::default())
}

pub fn factor_subdivision_with(
    c: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &FactorOptions,
) -> Result<FactorResult> {
    if !opts.skip_precheck {
        let rep = check_subdivision_kernel_with(c, space, n, &opts.check_options())?;
        if !rep.passed() {
            return Err(Error::NotAnnihilator {
                residual: rep.max_relative(),
            });
        }
    }
    let h = cancel_level(space, n)?.symbol().subst_z2();
    divide(&c.symbol(), &h, opts)
}

/// Composition mask `H^{[n+1]} * A` of the cancellation operator applied
/// after one subdivision step.
pub fn composition_mask(a: &MatrixMask, space: &ExpPolySpace, n: u32) -> Result<MatrixMask> {
    let h = cancel_level(space, n + 1)?;
    convolve(h.mask(), a)
}

/// `B^{[n]}` with `H^{[n+1]} S_{A} = S_{B} H^{[n]}`.
pub fn factor_scheme(a: &MatrixMask, space: &ExpPolySpace, n: u32) -> Result<FactorResult> {
    factor_scheme_with(a, space, n, &FactorOptions::default())
}

pub fn factor_scheme_with(
    a: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &FactorOptions,
) -> Result<FactorResult> {
    if !opts.skip_precheck {
        let rep = check_spectral_with(a, space, n, &opts.check_options())?;
        if !rep.passed() {
            return Err(Error::SpectralConditionFailed {
                residual: rep.max_relative(),
            });
        }
    }
    let c = composition_mask(a, space, n)?;
    let h = cancel_level(space, n)?.symbol().subst_z2();
    divide(&c.symbol(), &h, opts)
}

/// Scalar quotient `b` with `a*(z) = b*(z) g*(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFactorResult {
    pub b: LaurentPoly,
    pub residual: f64,
    pub support_used: (i64, i64),
}

/// `g*(z) = (z^{-1}+1)^{p+1} Π_j (z^{-1}+e^{λ_j/2})(z^{-1}+e^{−λ_j/2})`.
pub fn scalar_divisor(space: &ExpPolySpace) -> LaurentPoly {
    let mut g = LaurentPoly::inv_z_plus(real(1.0)).pow((space.p() + 1) as u32);
    for f in space.freqs() {
        let c = (f.value() * 0.5).cosh() * 2.0;
        g = &g * &LaurentPoly::new(-2, alloc::vec![real(1.0), c, real(1.0)]);
    }
    g
}

/// Divides a scalar mask symbol by [`scalar_divisor`].
pub fn scalar_factor_check(a: &LaurentPoly, space: &ExpPolySpace) -> Result<ScalarFactorResult> {
    let g = LaurentMatrix::scalar(scalar_divisor(space));
    let q = LaurentMatrix::solve_right_factor(&LaurentMatrix::scalar(a.clone()), &g, None)?;
    Ok(ScalarFactorResult {
        b: q.b.get(0, 0).clone(),
        residual: q.residual,
        support_used: q.support,
    })
}

/// `H̃^{[n]} = D^{-n} H^{[n]} D^{n}`, the cancellation mask acting on
/// un-normalised data.
pub fn tilde_cancel(h: &MatrixMask, n: u32) -> MatrixMask {
    let d = ScaleMatrix::for_dim(h.dim());
    h.conjugate(&d.pow(-(n as i64)), &d.pow(n as i64))
}

/// `B̃^{[n]} = D^{-(n+1)} B^{[n]} D^{n}`.
pub fn tilde_factor(b: &MatrixMask, n: u32) -> MatrixMask {
    rescale_mask(b, n as i64)
}
