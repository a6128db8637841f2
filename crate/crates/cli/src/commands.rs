//! Command implementations. Each returns the exit status of a completed run;
//! errors carry their own exit code (see [`CliError::exit`]).

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hermite_core::annihilator::cancel_level;
use hermite_core::factor::{
    factor_convolution_with, factor_scheme_with, factor_subdivision_with, FactorOptions,
    FactorResult,
};
use hermite_core::schemes::{
    closed_form_a, closed_form_b, default_det_samples, det_identity_at, example_space,
    limit_symbol, run_scheme, SchemeKind, SchemeSpec,
};
use hermite_core::seqs::{MatrixMask, VectorSeq};
use hermite_core::space::{
    check_annihilation_with, check_spectral_with, check_subdivision_kernel_with, BasisFn,
    CheckOptions, ExpPolySpace, Frequency, ResidualReport,
};
use hermite_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{
    CheckMode, Cli, Command, FactorMode, FreqArgs, Init, LevelRange, MaskSource, SchemeName,
};
use crate::error::{CliError, CliResult, Exit};
use crate::maskfile::{read_mask, write_mask, MaskFile};
use crate::output::{svg_polyline, write_csv};

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<Exit> {
    let ctx = Ctx {
        json: cli.json,
        tol: cli.tol,
        seed: cli.seed,
    };
    if !(ctx.tol > 0.0 && ctx.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            ctx.tol
        )));
    }
    match &cli.command {
        Command::Annihilator {
            p,
            freqs,
            level,
            out: path,
        } => annihilator(&ctx, *p, freqs, *level, path.as_deref(), out),
        Command::Check {
            source,
            freqs,
            p,
            levels,
            mode,
            half_width,
        } => check(&ctx, source, freqs, *p, *levels, *mode, *half_width, out),
        Command::Factorize {
            source,
            freqs,
            p,
            level,
            mode,
            support,
            skip_precheck,
            out: path,
        } => {
            let opts = FactorOptions {
                tol: ctx.tol,
                support: support.map(|s| (s.0, s.1)),
                skip_precheck: *skip_precheck,
            };
            factorize(
                &ctx,
                source,
                freqs,
                *p,
                *level,
                *mode,
                &opts,
                path.as_deref(),
                out,
            )
        }
        Command::Run {
            source,
            freqs,
            iterations,
            init,
            column,
            window,
            csv,
            svg,
        } => {
            let cfg = RunConfig {
                iterations: *iterations,
                init: *init,
                column: *column,
                window: *window,
                csv: csv.as_deref(),
                svg: svg.as_deref(),
            };
            run(&ctx, source, freqs, &cfg, out)
        }
        Command::Det {
            d,
            freqs,
            levels,
            random,
        } => det(&ctx, *d, freqs, *levels, *random, out),
    }
}

struct Ctx {
    json: bool,
    tol: f64,
    seed: u64,
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out).map_err(write_err("stdout"))
}

fn write_err(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_string(),
        source,
    }
}

/// The single frequency of a named scheme (1 by default).
fn scheme_lambda(freqs: &FreqArgs) -> CliResult<Frequency> {
    match freqs.frequencies()?.as_slice() {
        [] => Ok(Frequency::real(1.0)?),
        [f] => Ok(*f),
        _ => Err(CliError::Usage(
            "named schemes take a single --lambda".into(),
        )),
    }
}

fn scheme_mask(name: SchemeName, lambda: Frequency, n: u32) -> CliResult<MatrixMask> {
    let d = name.d();
    Ok(match name {
        SchemeName::Example2 | SchemeName::Example3 => closed_form_a(d, lambda, n)?,
        SchemeName::Limit2 | SchemeName::Limit3 => limit_symbol(d)?,
        SchemeName::B2 | SchemeName::B3 => closed_form_b(d, lambda, n)?,
    })
}

fn scheme_space(name: SchemeName, lambda: Frequency) -> CliResult<ExpPolySpace> {
    Ok(match name {
        SchemeName::Limit2 | SchemeName::Limit3 => ExpPolySpace::polynomial(name.d()),
        _ => example_space(name.d(), lambda)?,
    })
}

/// Space of dimension `dim` with the given frequencies; `p` defaults to
/// `dim − 1 − 2r`.
fn file_space(dim: usize, freqs: &FreqArgs, p: Option<i32>) -> CliResult<ExpPolySpace> {
    let f = freqs.frequencies()?;
    let p = p.unwrap_or(dim as i32 - 1 - 2 * f.len() as i32);
    let space = ExpPolySpace::new(p, f)?;
    if space.dim() != dim {
        return Err(CliError::Usage(format!(
            "space of dimension {} does not fit a {dim}x{dim} mask",
            space.dim()
        )));
    }
    Ok(space)
}

/// Level-dependent mask and the space it is checked against.
enum Source {
    Scheme(SchemeName, Frequency),
    File(MatrixMask),
}

impl Source {
    fn resolve(src: &MaskSource, freqs: &FreqArgs) -> CliResult<Self> {
        match (src.scheme, &src.mask) {
            (Some(name), None) => Ok(Source::Scheme(name, scheme_lambda(freqs)?)),
            (None, Some(path)) => Ok(Source::File(read_mask(path)?)),
            _ => Err(CliError::Usage(
                "give exactly one of --scheme or --mask".into(),
            )),
        }
    }

    fn mask(&self, n: u32) -> CliResult<MatrixMask> {
        match self {
            Source::Scheme(name, l) => scheme_mask(*name, *l, n),
            Source::File(m) => Ok(m.clone()),
        }
    }

    fn space(&self, freqs: &FreqArgs, p: Option<i32>) -> CliResult<ExpPolySpace> {
        match self {
            Source::Scheme(name, l) => scheme_space(*name, *l),
            Source::File(m) => file_space(m.dim(), freqs, p),
        }
    }
}

fn annihilator(
    ctx: &Ctx,
    p: i32,
    freqs: &FreqArgs,
    level: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let space = ExpPolySpace::new(p, freqs.frequencies()?)?;
    let op = cancel_level(&space, level)?;
    if let Some(path) = path {
        write_mask(path, op.mask())?;
    }
    if ctx.json {
        let text = MaskFile::from_mask(op.mask()).to_json()?;
        out.write_all(text.as_bytes())
            .map_err(write_err("stdout"))?;
    } else {
        writeln!(out, "H*(z) at level {level}, dimension {}:", space.dim())
            .map_err(write_err("stdout"))?;
        writeln!(out, "{}", op.symbol()).map_err(write_err("stdout"))?;
    }
    Ok(Exit::Pass)
}

#[derive(Serialize)]
struct LevelReport {
    level: u32,
    half_width: usize,
    max_relative: f64,
    max_abs: f64,
    passed: bool,
    entries: Vec<EntryReport>,
}

#[derive(Serialize)]
struct EntryReport {
    label: String,
    max_abs: f64,
    relative: f64,
    pass: bool,
}

impl From<&ResidualReport> for LevelReport {
    fn from(r: &ResidualReport) -> Self {
        Self {
            level: r.level,
            half_width: r.half_width,
            max_relative: r.max_relative(),
            max_abs: r.max_abs(),
            passed: r.passed(),
            entries: r
                .entries
                .iter()
                .map(|e| EntryReport {
                    label: e.label.clone(),
                    max_abs: e.max_abs,
                    relative: e.relative,
                    pass: e.pass,
                })
                .collect(),
        }
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

#[allow(clippy::too_many_arguments)]
fn check(
    ctx: &Ctx,
    source: &MaskSource,
    freqs: &FreqArgs,
    p: Option<i32>,
    levels: LevelRange,
    mode: CheckMode,
    half_width: Option<usize>,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let src = Source::resolve(source, freqs)?;
    if let Source::Scheme(SchemeName::B2 | SchemeName::B3, _) = src {
        return Err(CliError::Usage(
            "b2/b3 act on difference data; check example2/example3 or use factorize".into(),
        ));
    }
    let space = src.space(freqs, p)?;
    let opts = CheckOptions {
        tol: ctx.tol,
        half_width,
    };
    let mut reports = Vec::new();
    for n in levels.iter() {
        let mask = src.mask(n)?;
        let rep = match mode {
            CheckMode::Spectral => check_spectral_with(&mask, &space, n, &opts)?,
            CheckMode::Annihilation => check_annihilation_with(&mask, &space, n, &opts)?,
            CheckMode::Kernel => check_subdivision_kernel_with(&mask, &space, n, &opts)?,
        };
        reports.push(LevelReport::from(&rep));
    }
    let all = reports.iter().all(|r| r.passed);
    if ctx.json {
        #[derive(Serialize)]
        struct Out<'a> {
            mode: &'a str,
            tol: f64,
            passed: bool,
            levels: &'a [LevelReport],
        }
        let mode = match mode {
            CheckMode::Spectral => "spectral",
            CheckMode::Annihilation => "annihilation",
            CheckMode::Kernel => "kernel",
        };
        emit_json(
            out,
            &Out {
                mode,
                tol: ctx.tol,
                passed: all,
                levels: &reports,
            },
        )?;
    } else {
        let w = write_err("stdout");
        writeln!(
            out,
            "{:>5}  {:>4}  {:>12}  {:>12}  result",
            "level", "N", "scaled", "raw"
        )
        .map_err(&w)?;
        for r in &reports {
            writeln!(
                out,
                "{:>5}  {:>4}  {:>12.3e}  {:>12.3e}  {}",
                r.level,
                r.half_width,
                r.max_relative,
                r.max_abs,
                pass_word(r.passed)
            )
            .map_err(&w)?;
        }
        writeln!(
            out,
            "{}",
            if all {
                "all levels pass"
            } else {
                "check failed"
            }
        )
        .map_err(&w)?;
    }
    Ok(if all { Exit::Pass } else { Exit::Failure })
}

#[derive(Serialize)]
struct FactorOut {
    mask: MaskFile,
    residual: f64,
    support: [i64; 2],
}

impl From<&FactorResult> for FactorOut {
    fn from(r: &FactorResult) -> Self {
        Self {
            mask: MaskFile::from_mask(&r.b),
            residual: r.residual,
            support: [r.support_used.0, r.support_used.1],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn factorize(
    ctx: &Ctx,
    source: &MaskSource,
    freqs: &FreqArgs,
    p: Option<i32>,
    level: u32,
    mode: FactorMode,
    opts: &FactorOptions,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let src = Source::resolve(source, freqs)?;
    let space = src.space(freqs, p)?;
    let mask = src.mask(level)?;
    let res = match mode {
        FactorMode::Scheme => factor_scheme_with(&mask, &space, level, opts)?,
        FactorMode::Convolution => factor_convolution_with(&mask, &space, opts)?,
        FactorMode::Subdivision => factor_subdivision_with(&mask, &space, level, opts)?,
    };
    let report = FactorOut::from(&res);
    if let Some(path) = path {
        write_mask(path, &res.b)?;
    }
    if ctx.json {
        emit_json(out, &report)?;
    } else {
        let w = write_err("stdout");
        writeln!(
            out,
            "residual {:.3e}, support [{}, {}]",
            res.residual, res.support_used.0, res.support_used.1
        )
        .map_err(&w)?;
        writeln!(out, "B*(z):\n{}", res.b.symbol()).map_err(&w)?;
    }
    Ok(Exit::Pass)
}

struct RunConfig<'a> {
    iterations: u32,
    init: Init,
    column: usize,
    window: i64,
    csv: Option<&'a Path>,
    svg: Option<&'a Path>,
}

fn run(
    ctx: &Ctx,
    source: &MaskSource,
    freqs: &FreqArgs,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let src = Source::resolve(source, freqs)?;
    let spec = match &src {
        Source::Scheme(name, l) => {
            let kind = match name {
                SchemeName::Example2 | SchemeName::Example3 => SchemeKind::ClosedForm,
                SchemeName::Limit2 | SchemeName::Limit3 => SchemeKind::Limit,
                SchemeName::B2 | SchemeName::B3 => SchemeKind::Factor,
            };
            SchemeSpec::new(name.d(), *l, kind)
        }
        Source::File(m) => {
            let l = freqs
                .frequencies()?
                .first()
                .copied()
                .unwrap_or(Frequency::real(1.0)?);
            SchemeSpec::new(m.dim().saturating_sub(1), l, SchemeKind::Fixed(m.clone()))
        }
    };
    let dim = spec.dim();
    if cfg.window < 0 {
        return Err(CliError::Usage("--window must be non-negative".into()));
    }
    let sample = |f: BasisFn| {
        VectorSeq::from_fn(dim, -cfg.window, cfg.window, |a| {
            f.hermite_sample(dim - 1, 0, a)
        })
    };
    let c0 = match cfg.init {
        Init::Delta => {
            if cfg.column >= dim {
                return Err(CliError::Usage(format!("--column must be below {dim}")));
            }
            VectorSeq::delta(dim, cfg.column)
        }
        Init::ExpPlus => sample(BasisFn::Exp(spec.lambda.value()))?,
        Init::ExpMinus => sample(BasisFn::Exp(-spec.lambda.value()))?,
        Init::Poly(k) => sample(BasisFn::Monomial(k))?,
    };
    let stack = run_scheme(&spec, &c0, cfg.iterations)?;

    match cfg.csv {
        Some(path) => {
            let file = File::create(path).map_err(write_err(&path.display().to_string()))?;
            write_csv(BufWriter::new(file), &stack)?;
        }
        None => write_csv(&mut *out, &stack)?,
    }
    if let Some(path) = cfg.svg {
        let svg = svg_polyline(stack.last(), cfg.iterations);
        fs::write(path, svg).map_err(write_err(&path.display().to_string()))?;
    }
    if cfg.csv.is_some() {
        let norms = stack.sup_norms();
        if ctx.json {
            #[derive(Serialize)]
            struct Level {
                level: u32,
                window: Option<[i64; 2]>,
                sup_norm: f64,
            }
            let levels: Vec<Level> = stack
                .levels
                .iter()
                .zip(&norms)
                .map(|((n, s), &sup_norm)| Level {
                    level: *n,
                    window: s.window().map(|(a, b)| [a, b]),
                    sup_norm,
                })
                .collect();
            emit_json(out, &levels)?;
        } else {
            let w = write_err("stdout");
            writeln!(out, "{:>5}  {:>16}  {:>12}", "level", "window", "sup").map_err(&w)?;
            for ((n, s), sup) in stack.levels.iter().zip(&norms) {
                let win = s
                    .window()
                    .map_or("empty".to_string(), |(a, b)| format!("[{a}, {b}]"));
                writeln!(out, "{n:>5}  {win:>16}  {sup:>12.6}").map_err(&w)?;
            }
        }
    }
    Ok(Exit::Pass)
}

fn random_samples(seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

fn det(
    ctx: &Ctx,
    d: usize,
    freqs: &FreqArgs,
    levels: LevelRange,
    random: Option<usize>,
    out: &mut dyn Write,
) -> CliResult<Exit> {
    let lambda = scheme_lambda(freqs)?;
    let zs = match random {
        Some(k) => random_samples(ctx.seed, k),
        None => default_det_samples(),
    };
    #[derive(Serialize)]
    struct Level {
        level: u32,
        samples: usize,
        max_relative: f64,
        passed: bool,
    }
    let mut rows = Vec::new();
    for n in levels.iter() {
        let rep = det_identity_at(d, lambda, n, &zs)?;
        rows.push(Level {
            level: n,
            samples: rep.samples.len(),
            max_relative: rep.max_relative(),
            passed: rep.passed(ctx.tol),
        });
    }
    let all = rows.iter().all(|r| r.passed);
    if ctx.json {
        emit_json(out, &rows)?;
    } else {
        let w = write_err("stdout");
        writeln!(
            out,
            "{:>5}  {:>7}  {:>12}  result",
            "level", "samples", "relative"
        )
        .map_err(&w)?;
        for r in &rows {
            writeln!(
                out,
                "{:>5}  {:>7}  {:>12.3e}  {}",
                r.level,
                r.samples,
                r.max_relative,
                pass_word(r.passed)
            )
            .map_err(&w)?;
        }
    }
    Ok(if all { Exit::Pass } else { Exit::Failure })
}
