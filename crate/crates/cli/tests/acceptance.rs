//! Acceptance suite. Prints one line per criterion and exits non-zero if a
//! hard criterion fails. Every threshold is pinned in the constants below.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hermite_core::annihilator::{cancel_level, cancel_single, taylor_mask};
use hermite_core::factor::{
    factor_convolution, factor_convolution_with, factor_scheme, FactorOptions,
};
use hermite_core::schemes::{
    build_example_mask, closed_form_a, closed_form_b, det_identity, example_space, limit_symbol,
    run_scheme, SchemeKind, SchemeSpec,
};
use hermite_core::seqs::{convolve, MatrixMask};
use hermite_core::space::{check_annihilation, check_spectral, ExpPolySpace, Frequency};
use hermite_core::{CMatrix, Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const ANNIHILATION_TOL: f64 = 1e-10;
const ANNIHILATION_BUDGET: Duration = Duration::from_secs(1);
const DISPLAY_TOL: f64 = 1e-12;
const TAYLOR_SLOPE: (f64, f64) = (1.9, 2.1);
const COLUMN_SHIFT_TOL: f64 = 1e-14;
const SPECTRAL_TOL: f64 = 1e-9;
const CROSS_TOL: f64 = 1e-10;
const FACTOR_TOL: f64 = 1e-9;
const SYMBOL_TOL: f64 = 1e-10;
const DET_TOL: f64 = 1e-10;
const LIMIT_RATIO: (f64, f64) = (0.25, 0.02);
const DIVISION_TOL: f64 = 1e-9;
const REPRODUCTION_TOL: f64 = 1e-9;
const RUN_BUDGET: Duration = Duration::from_secs(10);
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    /// Soft criteria downgrade failure to a warning.
    soft: bool,
    detail: String,
}

impl Outcome {
    fn hard(pass: bool, detail: String) -> Self {
        Self {
            pass,
            soft: false,
            detail,
        }
    }
}

fn lam(x: f64) -> Frequency {
    Frequency::real(x).unwrap()
}

fn im(x: f64) -> Frequency {
    Frequency::imaginary(x).unwrap()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn annihilation() -> Outcome {
    let start = Instant::now();
    let mut spaces = vec![
        ExpPolySpace::new(0, vec![lam(1.0)]).unwrap(),
        ExpPolySpace::new(1, vec![lam(1.0)]).unwrap(),
        ExpPolySpace::new(0, vec![lam(1.0), lam(2.0)]).unwrap(),
        ExpPolySpace::new(2, vec![lam(0.5), im(1.0)]).unwrap(),
    ];
    spaces.extend((0..=6).map(ExpPolySpace::polynomial));
    let mut worst = 0.0f64;
    for s in &spaces {
        for n in 0..=3 {
            let h = cancel_level(s, n).unwrap();
            worst = worst.max(check_annihilation(h.mask(), s, n).unwrap().max_relative());
        }
    }
    let t = start.elapsed();
    Outcome::hard(
        worst <= ANNIHILATION_TOL && t < ANNIHILATION_BUDGET,
        format!(
            "{} spaces x 4 levels, max residual {worst:.2e}, {t:.2?}",
            spaces.len()
        ),
    )
}

/// The H_2/H_3 displays written with plain exponentials.
fn explicit_operators() -> Outcome {
    let l = 1.0f64;
    let (ep, em) = (l.exp(), (-l).exp());
    let h2 = [
        [
            -1.0,
            (em - ep) / (2.0 * l),
            -(em + ep - 2.0) / (2.0 * l * l),
        ],
        [0.0, -(em + ep) / 2.0, (em - ep) / (2.0 * l)],
        [0.0, l * (em - ep) / 2.0, -(em + ep) / 2.0],
    ];
    let mut h3 = [[0.0; 4]; 4];
    h3[0] = [
        -1.0,
        -1.0,
        (2.0 - em - ep) / (2.0 * l * l),
        (2.0 * l + em - ep) / (2.0 * l.powi(3)),
    ];
    for i in 0..3 {
        h3[i + 1][1..].copy_from_slice(&h2[i]);
    }
    let mut worst = 0.0f64;
    for (d, want) in [
        (2usize, h2.iter().map(|r| r.to_vec()).collect::<Vec<_>>()),
        (3, h3.iter().map(|r| r.to_vec()).collect()),
    ] {
        let m = cancel_single(d, lam(l)).unwrap().into_mask();
        let want0 = CMatrix::from_fn(d + 1, d + 1, |i, j| re(want[i][j]));
        let want = MatrixMask::new(d + 1, -1, vec![CMatrix::identity(d + 1), want0]).unwrap();
        worst = worst.max(m.max_abs_diff(&want));
    }
    Outcome::hard(
        worst <= DISPLAY_TOL,
        format!("max entry deviation {worst:.2e}"),
    )
}

fn taylor_limit() -> Outcome {
    let mut slopes = Vec::new();
    for d in [2, 3, 4] {
        let pts: Vec<(f64, f64)> = (1..=4)
            .map(|k| {
                let l = 10f64.powi(-k);
                let e = cancel_single(d, lam(l))
                    .unwrap()
                    .mask()
                    .max_abs_diff(&taylor_mask(d));
                (l.ln(), e.ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slopes.push(sxy / sxx);
    }
    let pass = slopes
        .iter()
        .all(|s| (TAYLOR_SLOPE.0..=TAYLOR_SLOPE.1).contains(s));
    Outcome::hard(pass, format!("fitted slopes {slopes:.4?}"))
}

fn column_shift() -> Outcome {
    let mut worst = 0.0f64;
    for f in [lam(0.3), lam(1.0), lam(2.0), im(1.0)] {
        for d in 3..=8 {
            let h = cancel_single(d, f).unwrap().mask().tap(0);
            for k in 1..=d - 2 {
                worst = worst.max((h[(k - 1, d - 1)] - h[(k, d)]).norm());
            }
        }
    }
    Outcome::hard(
        worst <= COLUMN_SHIFT_TOL,
        format!("max |h(k-1,d-1) - h(k,d)| = {worst:.2e}"),
    )
}

fn spectral() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let space = example_space(d, lam(1.0)).unwrap();
        for n in 0..=5 {
            let a = closed_form_a(d, lam(1.0), n).unwrap();
            worst = worst.max(check_spectral(&a, &space, n).unwrap().max_relative());
        }
    }
    Outcome::hard(
        worst <= SPECTRAL_TOL,
        format!("d in {{2,3}}, n = 0..5, max residual {worst:.2e}"),
    )
}

fn cross_construction() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        for f in [lam(0.25), lam(1.0), im(1.0)] {
            for n in 0..=4 {
                let built = build_example_mask(d, f, n).unwrap();
                worst = worst.max(built.max_abs_diff(&closed_form_a(d, f, n).unwrap()));
            }
        }
    }
    Outcome::hard(
        worst <= CROSS_TOL,
        format!("max entry deviation {worst:.2e}"),
    )
}

fn factorization() -> Outcome {
    let zs: Vec<C64> = (0..10)
        .map(|k| C64::from_polar(0.55 + 0.17 * k as f64, 0.63 * k as f64 + 0.3))
        .collect();
    let (mut coeff, mut sym) = (0.0f64, 0.0f64);
    for d in [2, 3] {
        let space = example_space(d, lam(1.0)).unwrap();
        for n in 0..=4 {
            let a = closed_form_a(d, lam(1.0), n).unwrap();
            let b = closed_form_b(d, lam(1.0), n).unwrap();
            let got = match factor_scheme(&a, &space, n) {
                Ok(r) => r.b,
                Err(e) => return Outcome::hard(false, format!("d={d} n={n}: {e}")),
            };
            coeff = coeff.max(got.max_abs_diff(&b));
            let h1 = cancel_level(&space, n + 1).unwrap().symbol();
            let h0 = cancel_level(&space, n).unwrap().symbol();
            for &z in &zs {
                let lhs = &h1.eval(z).unwrap() * &a.symbol().eval(z).unwrap();
                let rhs = &got.symbol().eval(z).unwrap() * &h0.eval(z * z).unwrap();
                sym = sym.max(lhs.max_abs_diff(&rhs) / lhs.max_abs().max(1.0));
            }
        }
    }
    Outcome::hard(
        coeff <= FACTOR_TOL && sym <= SYMBOL_TOL,
        format!("|B - B_closed| {coeff:.2e}, symbol identity {sym:.2e}"),
    )
}

fn determinants() -> Outcome {
    let mut worst = 0.0f64;
    let mut samples = 0;
    for d in [2, 3] {
        for n in 0..=4 {
            let rep = det_identity(d, lam(1.0), n).unwrap();
            samples = rep.samples.len();
            worst = worst.max(rep.max_relative());
        }
    }
    Outcome::hard(
        worst <= DET_TOL && samples == 12,
        format!("{samples} points per level, max relative {worst:.2e}"),
    )
}

fn limit_symbols() -> Outcome {
    let mut ratios = Vec::new();
    for d in [2, 3] {
        let lim = limit_symbol(d).unwrap();
        let errs: Vec<f64> = (8..=11)
            .map(|n| closed_form_a(d, lam(1.0), n).unwrap().max_abs_diff(&lim))
            .collect();
        ratios.extend(errs.windows(2).map(|w| w[1] / w[0]));
    }
    let pass = ratios
        .iter()
        .all(|r| (r - LIMIT_RATIO.0).abs() <= LIMIT_RATIO.1);
    Outcome::hard(pass, format!("consecutive ratios {ratios:.4?}"))
}

fn minimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let spaces = [
        ExpPolySpace::new(0, vec![lam(1.0)]).unwrap(),
        ExpPolySpace::new(1, vec![lam(0.5), im(2.0)]).unwrap(),
    ];
    let (mut residual, mut recovery) = (0.0f64, 0.0f64);
    for space in &spaces {
        let h = cancel_level(space, 0).unwrap();
        for _ in 0..20 {
            let dim = space.dim();
            let taps = (0..3)
                .map(|_| CMatrix::from_fn(dim, dim, |_, _| re(rng.gen_range(-1.0..1.0))))
                .collect();
            let b0 = MatrixMask::new(dim, -1, taps).unwrap();
            let c = convolve(&b0, h.mask()).unwrap();
            match factor_convolution(&c, space) {
                Ok(r) => {
                    residual = residual.max(r.residual);
                    recovery = recovery.max(r.b.max_abs_diff(&b0));
                }
                Err(e) => return Outcome::hard(false, format!("product failed to factor: {e}")),
            }
        }
    }
    let space = &spaces[0];
    let c = convolve(
        &MatrixMask::delta(3),
        cancel_level(space, 0).unwrap().mask(),
    )
    .unwrap();
    let corrupted = c.with_entry(0, 1, 2, c.tap(0)[(1, 2)] + re(1e-3));
    let opts = FactorOptions {
        skip_precheck: true,
        ..FactorOptions::default()
    };
    let rejected = matches!(
        factor_convolution_with(&corrupted, space, &opts),
        Err(Error::NotDivisible { .. })
    );
    Outcome::hard(
        residual <= DIVISION_TOL && recovery <= DIVISION_TOL && rejected,
        format!("40 products, max residual {residual:.2e}, max |B - B0| {recovery:.2e}, corrupted rejected: {rejected}"),
    )
}

fn reproduction() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        for f in [lam(1.0), im(1.0)] {
            let space = example_space(d, f).unwrap();
            let spec = SchemeSpec::new(d, f, SchemeKind::ClosedForm);
            for (b, c0) in space.basis().iter().zip(space.sample_basis(0, -10, 10)) {
                let stack = run_scheme(&spec, &c0, 4).unwrap();
                for n in 0..=4 {
                    let got = stack.normalized(n).unwrap();
                    let scale = 1.0 + got.max_abs();
                    for (alpha, v) in got.iter() {
                        for (x, y) in v.iter().zip(b.hermite_sample(d, n, alpha)) {
                            worst = worst.max((x - y).norm() / scale);
                        }
                    }
                }
            }
        }
    }
    Outcome::hard(
        worst <= REPRODUCTION_TOL,
        format!("4 iterations, max scaled deviation {worst:.2e}"),
    )
}

fn hermite(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_hermite"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn sup_norms(json: &str) -> Vec<f64> {
    let v: Value = serde_json::from_str(json).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .map(|l| l["sup_norm"].as_f64().unwrap())
        .collect()
}

fn figures() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    for scheme in ["example2", "example3"] {
        let csv = dir.path().join(format!("{scheme}.csv"));
        let svg = dir.path().join(format!("{scheme}.svg"));
        let start = Instant::now();
        let out = hermite(&[
            "--json",
            "run",
            "--scheme",
            scheme,
            "--init",
            "delta",
            "--iterations",
            "12",
            "--csv",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        let t = start.elapsed();
        let artifacts = fs::metadata(&csv).is_ok_and(|m| m.len() > 0)
            && fs::metadata(&svg).is_ok_and(|m| m.len() > 0);
        match out {
            Ok(_) if t < RUN_BUDGET && artifacts => notes.push(format!("{scheme} {t:.2?}")),
            Ok(_) => {
                return Outcome::hard(
                    false,
                    format!("{scheme}: {t:.2?}, artifacts written: {artifacts}"),
                )
            }
            Err(e) => return Outcome::hard(false, format!("{scheme}: {}", e.trim())),
        }
    }
    let mut contracts = true;
    for scheme in ["b2", "b3"] {
        let csv = dir.path().join(format!("{scheme}.csv"));
        match hermite(&[
            "--json",
            "run",
            "--scheme",
            scheme,
            "--iterations",
            "12",
            "--csv",
            csv.to_str().unwrap(),
        ]) {
            Ok(json) => {
                let s = sup_norms(&json);
                let ok = s[3..].windows(2).all(|w| w[1] <= w[0]);
                contracts &= ok;
                notes.push(format!("{scheme} sup {:.1e} -> {:.1e}", s[3], s[12]));
            }
            Err(e) => return Outcome::hard(false, format!("{scheme}: {}", e.trim())),
        }
    }
    if contracts {
        Outcome::hard(true, notes.join(", "))
    } else {
        Outcome {
            pass: false,
            soft: true,
            detail: format!(
                "B-scheme sup-norm not monotone from level 3; {}",
                notes.join(", ")
            ),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("annihilation of test spaces", annihilation),
        ("explicit H_2 / H_3", explicit_operators),
        ("Taylor limit O(lambda^2)", taylor_limit),
        ("column-shift identity", column_shift),
        ("spectral condition", spectral),
        ("cross-construction", cross_construction),
        ("factorization reproduces B", factorization),
        ("determinant identities", determinants),
        ("limit symbols", limit_symbols),
        ("minimality as divisibility", minimality),
        ("reproduction through iteration", reproduction),
        ("figures at desk scale", figures),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = match (o.pass, o.soft) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => {
                failed += 1;
                "FAIL"
            }
        };
        println!("[{tag}] {:>2}. {name}: {}", k + 1, o.detail);
    }
    println!("acceptance: {} of 12 hard criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
