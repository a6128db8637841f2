//! The spaces `V_{d,Λ} = span{1, x, …, x^p, e^{±λ_1 x}, …, e^{±λ_r x}}`
//! with `d = p + 2r`, their Hermite samples and residual checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::numeric::{factorial, C64};
use crate::seqs::{conv_apply, subdivide, MatrixMask, VectorSeq};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyKind {
    Real,
    Imaginary,
}

/// `λ = magnitude` or `λ = i·magnitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    kind: FrequencyKind,
    magnitude: f64,
}

impl Frequency {
    pub fn new(kind: FrequencyKind, magnitude: f64) -> Result<Self> {
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(Error::InvalidSpace(
                "frequency magnitude must be positive and finite",
            ));
        }
        Ok(Self { kind, magnitude })
    }

    pub fn real(magnitude: f64) -> Result<Self> {
        Self::new(FrequencyKind::Real, magnitude)
    }

    pub fn imaginary(magnitude: f64) -> Result<Self> {
        Self::new(FrequencyKind::Imaginary, magnitude)
    }

    pub fn kind(&self) -> FrequencyKind {
        self.kind
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn value(&self) -> C64 {
        match self.kind {
            FrequencyKind::Real => C64::new(self.magnitude, 0.0),
            FrequencyKind::Imaginary => C64::new(0.0, self.magnitude),
        }
    }

    /// `λ²`, always real.
    pub fn square(&self) -> f64 {
        match self.kind {
            FrequencyKind::Real => self.magnitude * self.magnitude,
            FrequencyKind::Imaginary => -self.magnitude * self.magnitude,
        }
    }

    /// `factor · λ` for a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kind: self.kind,
            magnitude: self.magnitude * factor,
        }
    }

    /// `2^{-n} λ`.
    pub fn at_level(&self, n: u32) -> Self {
        self.scaled(Float::powi(0.5f64, n as i32))
    }
}

/// One basis function of `V_{d,Λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFn {
    /// `x^k`.
    Monomial(u32),
    /// `e^{μx}`.
    Exp(C64),
}

impl BasisFn {
    /// `f^{(j)}(x)`.
    pub fn derivative(&self, j: usize, x: f64) -> C64 {
        match *self {
            BasisFn::Monomial(k) => {
                let k = k as usize;
                if j > k {
                    return C64::new(0.0, 0.0);
                }
                let c = factorial(k) / factorial(k - j);
                C64::new(c * Float::powi(x, (k - j) as i32), 0.0)
            }
            BasisFn::Exp(mu) => mu.powi(j as i32) * (mu * x).exp(),
        }
    }

    /// `D^n [f^{(j)}(2^{-n} α)]_{j=0..d}`.
    pub fn hermite_sample(&self, d: usize, n: u32, alpha: i64) -> Vec<C64> {
        let h = Float::powi(0.5f64, n as i32);
        let x = alpha as f64 * h;
        match *self {
            BasisFn::Exp(mu) => {
                // (μ h)^j e^{μx}: avoids forming large powers separately.
                let e = (mu * x).exp();
                let mh = mu * h;
                let mut out = Vec::with_capacity(d + 1);
                let mut pw = C64::new(1.0, 0.0);
                for _ in 0..=d {
                    out.push(pw * e);
                    pw *= mh;
                }
                out
            }
            BasisFn::Monomial(_) => (0..=d)
                .map(|j| self.derivative(j, x) * Float::powi(h, j as i32))
                .collect(),
        }
    }
}

/// `V_{d,Λ}` with polynomial degree `p ≥ −1` and `r` frequency pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolySpace {
    p: i32,
    freqs: Vec<Frequency>,
}

impl ExpPolySpace {
    pub fn new(p: i32, freqs: Vec<Frequency>) -> Result<Self> {
        if p < -1 {
            return Err(Error::InvalidSpace(
                "polynomial degree p must be at least -1",
            ));
        }
        if p == -1 && freqs.is_empty() {
            return Err(Error::InvalidSpace("p = -1 needs at least one frequency"));
        }
        for (i, a) in freqs.iter().enumerate() {
            for b in &freqs[..i] {
                let close =
                    (a.magnitude - b.magnitude).abs() <= 1e-12 * a.magnitude.max(b.magnitude);
                if a.kind == b.kind && close {
                    return Err(Error::DuplicateFrequency(a.magnitude));
                }
            }
        }
        Ok(Self { p, freqs })
    }

    /// `Π_d`.
    pub fn polynomial(d: usize) -> Self {
        Self {
            p: d as i32,
            freqs: Vec::new(),
        }
    }

    /// `V_{p+2, {λ}}`.
    pub fn single(p: i32, lambda: Frequency) -> Result<Self> {
        Self::new(p, alloc::vec![lambda])
    }

    pub fn p(&self) -> i32 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.freqs.len()
    }

    pub fn d(&self) -> usize {
        (self.p + 2 * self.freqs.len() as i32) as usize
    }

    /// `dim V = d + 1`, also the Hermite data length.
    pub fn dim(&self) -> usize {
        self.d() + 1
    }

    pub fn freqs(&self) -> &[Frequency] {
        &self.freqs
    }

    /// The same space with every frequency scaled by `2^{-n}`.
    pub fn at_level(&self, n: u32) -> Self {
        Self {
            p: self.p,
            freqs: self.freqs.iter().map(|f| f.at_level(n)).collect(),
        }
    }

    /// `1, x, …, x^p, e^{λ_1 x}, e^{−λ_1 x}, …`.
    pub fn basis(&self) -> Vec<BasisFn> {
        let mut out: Vec<BasisFn> = (0..=self.p).map(|k| BasisFn::Monomial(k as u32)).collect();
        for f in &self.freqs {
            out.push(BasisFn::Exp(f.value()));
            out.push(BasisFn::Exp(-f.value()));
        }
        out
    }

    /// Human-readable labels in basis order.
    pub fn basis_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..=self.p)
            .map(|k| match k {
                0 => String::from("1"),
                1 => String::from("x"),
                k => format!("x^{k}"),
            })
            .collect();
        for (j, f) in self.freqs.iter().enumerate() {
            let unit = match f.kind {
                FrequencyKind::Real => "",
                FrequencyKind::Imaginary => "i",
            };
            for sign in ['+', '-'] {
                out.push(format!("exp({sign}{unit}{}x) [λ{}]", f.magnitude, j + 1));
            }
        }
        out
    }

    /// Level-`n` Hermite samples of every basis function on `[a, b]`.
    pub fn sample_basis(&self, n: u32, a: i64, b: i64) -> Vec<VectorSeq> {
        let d = self.d();
        self.basis()
            .into_iter()
            .map(|f| {
                VectorSeq::from_fn(d + 1, a, b, |alpha| f.hermite_sample(d, n, alpha))
                    .expect("samples have length d+1")
            })
            .collect()
    }
}

/// Residual of one basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub label: String,
    /// Raw `max |residual|` over the checked window.
    pub max_abs: f64,
    /// `max_abs / (1 + max sample magnitude)`.
    pub relative: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub level: u32,
    /// Residuals are compared on `[-half_width, half_width]`.
    pub half_width: usize,
    pub tol: f64,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn max_relative(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.relative))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    /// Overrides the default half-width of the comparison window.
    pub half_width: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            half_width: None,
        }
    }
}

/// Smallest accepted half-width: mask radius plus `dim V`.
pub fn required_half_width(mask: &MatrixMask, space: &ExpPolySpace) -> usize {
    mask.radius() + space.dim()
}

/// Default half-width `radius + (d+1) + 2r + 2`.
pub fn default_half_width(mask: &MatrixMask, space: &ExpPolySpace) -> usize {
    required_half_width(mask, space) + 2 * space.r() + 2
}

#[derive(Clone, Copy)]
enum Check {
    Spectral,
    Annihilation,
    SubdivisionKernel,
}

fn run_check(
    mask: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &CheckOptions,
    kind: Check,
) -> Result<ResidualReport> {
    if mask.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            op: "residual check",
            expected: space.dim(),
            found: mask.dim(),
        });
    }
    let required = required_half_width(mask, space);
    let half = opts
        .half_width
        .unwrap_or_else(|| default_half_width(mask, space));
    if half < required {
        return Err(Error::WindowTooSmall {
            given: half,
            required,
        });
    }
    let (nw, rad) = (half as i64, mask.radius() as i64);
    let inputs = space.sample_basis(n, -nw - rad, nw + rad);
    let targets = match kind {
        Check::Spectral => Some(space.sample_basis(n + 1, -nw, nw)),
        _ => None,
    };
    let mut entries = Vec::with_capacity(inputs.len());
    for (idx, (input, label)) in inputs.iter().zip(space.basis_labels()).enumerate() {
        let out = match kind {
            Check::Annihilation => conv_apply(mask, input)?,
            Check::Spectral | Check::SubdivisionKernel => subdivide(mask, input)?,
        };
        let mut scale = input.max_abs();
        let mut max_abs = 0.0f64;
        for alpha in -nw..=nw {
            let got = out
                .get(alpha)
                .expect("window sized to cover the comparison range");
            match &targets {
                Some(t) => {
                    let want = t[idx].get(alpha).expect("target sampled on the range");
                    for (g, w) in got.iter().zip(want) {
                        max_abs = max_abs.max((g - w).norm());
                        scale = scale.max(w.norm());
                    }
                }
                None => {
                    for g in got {
                        max_abs = max_abs.max(g.norm());
                    }
                }
            }
        }
        let relative = max_abs / (1.0 + scale);
        entries.push(ResidualEntry {
            label,
            max_abs,
            relative,
            pass: relative <= opts.tol,
        });
    }
    Ok(ResidualReport {
        level: n,
        half_width: half,
        tol: opts.tol,
        entries,
    })
}

/// Checks `S_A v_{f,n} = v_{f,n+1}` for every basis function.
pub fn check_spectral(mask: &MatrixMask, space: &ExpPolySpace, n: u32) -> Result<ResidualReport> {
    check_spectral_with(mask, space, n, &CheckOptions::default())
}

pub fn check_spectral_with(
    mask: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &CheckOptions,
) -> Result<ResidualReport> {
    run_check(mask, space, n, opts, Check::Spectral)
}

/// Checks `H v_{f,n} = 0` for every basis function.
pub fn check_annihilation(
    mask: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
) -> Result<ResidualReport> {
    check_annihilation_with(mask, space, n, &CheckOptions::default())
}

pub fn check_annihilation_with(
    mask: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &CheckOptions,
) -> Result<ResidualReport> {
    run_check(mask, space, n, opts, Check::Annihilation)
}

/// Checks `S_C v_{f,n} = 0` for every basis function.
pub fn check_subdivision_kernel_with(
    mask: &MatrixMask,
    space: &ExpPolySpace,
    n: u32,
    opts: &CheckOptions,
) -> Result<ResidualReport> {
    run_check(mask, space, n, opts, Check::SubdivisionKernel)
}
