//! `cgpr`: phantoms, measurements, and HIO/CGPR reconstructions from the shell.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cgpr_core::io::{export_grayscale, format_f64, read_field, trace_to_csv, write_field, write_trace_csv, Channel};
use cgpr_core::{
    apply_poisson, complexity_fourier, complexity_image, constant_init, forward_magnitude, make_phantom,
    random_phase_init, random_phase_init_on, run_cgpr, run_hio, ComplexField, Error, HioVariant,
    IterationTrace, MagnitudeData, NoiseSpec, Pattern, PhantomSpec, Registration, RunConfig, Smoothing, StepNorm,
    SupportMask,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "cgpr", version, about = "Complexity-guided phase retrieval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a binary-phase test object and its support mask.
    Phantom(PhantomArgs),
    /// Compute Fourier magnitudes of an object, optionally with shot noise.
    Measure(MeasureArgs),
    /// Print the complexity ζ estimated from a magnitude file.
    Zeta(ZetaArgs),
    /// Run plain HIO.
    Hio(SolveArgs),
    /// Run complexity-guided phase retrieval.
    Cgpr(SolveArgs),
    /// Run HIO and CGPR from identical random starts over several seeds.
    Compare(CompareArgs),
}

#[derive(Args)]
struct PhantomArgs {
    /// Window size, `N` or `ROWSxCOLS` (reference value: 600).
    #[arg(long, default_value = "600", value_parser = parse_dims)]
    window: (usize, usize),
    /// Support extent, `N` or `ROWSxCOLS` (reference value: 280).
    #[arg(long, default_value = "280", value_parser = parse_dims)]
    support: (usize, usize),
    /// Phase of the raised pixels in radians (reference value: 2π/3).
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI / 3.0)]
    phase_step: f64,
    /// `glyph:TEXT`, `checker:BLOCK` or `disk:FRACTION` (reference value: glyph:PHASE).
    #[arg(long, default_value = "glyph:PHASE", value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "object.fld")]
    out: PathBuf,
    #[arg(long, default_value = "mask.fld")]
    mask_out: PathBuf,
    /// Also write the phase as an 8-bit PGM.
    #[arg(long)]
    phase_pgm: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    /// Complex object file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "magnitude.fld")]
    out: PathBuf,
    /// Mean photons per detector pixel; omit for noiseless data (reference values: 1e4, 1e6).
    #[arg(long)]
    photons: Option<f64>,
    /// Noise seed, used with --photons.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ZetaArgs {
    /// Magnitude file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Debug)]
enum InitArg {
    Random,
    Constant,
    File(PathBuf),
}

#[derive(Clone, Copy, ValueEnum)]
enum InitScope {
    /// Random phases inside the support, zeros outside.
    Support,
    /// Random phases over the whole window.
    Window,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// g − β·g′ outside the support.
    FienupClassic,
    /// g′ − β·g outside the support.
    PaperExact,
}

#[derive(Clone, Copy, ValueEnum)]
enum StepNormArg {
    /// Step length from the support pixels.
    Support,
    /// Step length from the whole window.
    Window,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegistrationArg {
    Shift,
    None,
}

#[derive(Args)]
struct EngineArgs {
    /// Magnitude file.
    #[arg(long)]
    magnitude: PathBuf,
    /// Support mask file.
    #[arg(long)]
    mask: PathBuf,
    /// Ground-truth object; enables the error column.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// HIO feedback β (reference value: 0.9).
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// TV step scale t (reference value: 0.005).
    #[arg(long, default_value_t = 0.005)]
    t: f64,
    /// Relative ζ band half-width (reference value: 0.005).
    #[arg(long, default_value_t = 0.005)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_tv_subiters: usize,
    /// TV smoothing ε relative to the largest gradient magnitude.
    #[arg(long, default_value_t = 1e-8)]
    eps_rel: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::FienupClassic)]
    hio_variant: VariantArg,
    #[arg(long, value_enum, default_value_t = RegistrationArg::Shift)]
    registration: RegistrationArg,
    /// Pixels whose norm sets the TV step length t·‖f‖.
    #[arg(long, value_enum, default_value_t = StepNormArg::Support)]
    step_norm: StepNormArg,
    /// Where the random start phases live.
    #[arg(long, value_enum, default_value_t = InitScope::Support)]
    init_scope: InitScope,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Outer iterations (reference values: 500 for HIO, 200 for CGPR).
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `random`, `constant` or `file:PATH`.
    #[arg(long, default_value = "random", value_parser = parse_init)]
    init: InitArg,
    #[arg(long, default_value = "recon.fld")]
    out: PathBuf,
    #[arg(long, default_value = "trace.csv")]
    trace: PathBuf,
    /// Also write the reconstructed phase as an 8-bit PGM.
    #[arg(long)]
    phase_pgm: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Reference value: 20.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// First seed; trial k uses seed-base + k.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Reference value: 500.
    #[arg(long, default_value_t = 500)]
    hio_iters: usize,
    /// Reference value: 200.
    #[arg(long, default_value_t = 200)]
    cgpr_iters: usize,
    #[arg(long, default_value = "compare")]
    out_dir: PathBuf,
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let parse = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
    match s.split_once(['x', 'X']) {
        Some((r, c)) => Ok((parse(r)?, parse(c)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    let (kind, arg) = s.split_once(':').ok_or("expected KIND:VALUE")?;
    match kind {
        "glyph" => Ok(Pattern::GlyphText(arg.to_string())),
        "checker" => arg.parse().map(Pattern::Checker).map_err(|e| format!("checker block: {e}")),
        "disk" => arg.parse().map(Pattern::Disk).map_err(|e| format!("disk fraction: {e}")),
        _ => Err(format!("unknown pattern `{kind}`; use glyph, checker or disk")),
    }
}

fn parse_init(s: &str) -> Result<InitArg, String> {
    match s {
        "random" => Ok(InitArg::Random),
        "constant" => Ok(InitArg::Constant),
        _ => match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(InitArg::File(PathBuf::from(p))),
            _ => Err("expected random, constant or file:PATH".into()),
        },
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidShape { .. } => 10,
        Error::SampleCount { .. } => 11,
        Error::InvalidSpacing { .. } => 12,
        Error::DimensionMismatch { .. } => 13,
        Error::InvalidParameter { .. } => 14,
        Error::ZeroGradient => 15,
        Error::ZeroTruth => 16,
        Error::AllZeroInput => 17,
        Error::NyquistViolation { .. } => 18,
        Error::BadMagic => 19,
        Error::TruncatedPayload { .. } => 20,
        Error::UnknownKind(_) => 21,
        Error::InvalidMaskByte(_) => 22,
        Error::WrongKind { .. } => 23,
        Error::MalformedTrace(_) => 24,
        Error::Io(_) => 25,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Phantom(a) => cmd_phantom(a),
        Command::Measure(a) => cmd_measure(a),
        Command::Zeta(a) => cmd_zeta(a),
        Command::Hio(a) => cmd_solve(a, false),
        Command::Cgpr(a) => cmd_solve(a, true),
        Command::Compare(a) => cmd_compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn cmd_phantom(a: PhantomArgs) -> cgpr_core::Result<()> {
    let spec = PhantomSpec {
        window: a.window,
        support_extent: a.support,
        phase_step: a.phase_step,
        pattern: a.pattern,
        seed: a.seed,
    };
    let (object, mask) = make_phantom(&spec)?;
    write_field(&a.out, &object.clone().into())?;
    write_field(&a.mask_out, &mask.into())?;
    if let Some(p) = &a.phase_pgm {
        export_grayscale(&object, Channel::Phase, p)?;
    }
    println!("zeta {}", format_f64(complexity_image(&object)));
    Ok(())
}

fn cmd_measure(a: MeasureArgs) -> cgpr_core::Result<()> {
    let object = read_field(&a.input)?.into_complex()?;
    let mut m = forward_magnitude(&object);
    if let Some(photons) = a.photons {
        m = apply_poisson(&m, &NoiseSpec::new(photons, a.seed)?)?;
    }
    write_field(&a.out, &m.into())
}

fn cmd_zeta(a: ZetaArgs) -> cgpr_core::Result<()> {
    let m = read_field(&a.input)?.into_magnitude()?;
    println!("{}", format_f64(complexity_fourier(&m)));
    Ok(())
}

struct Inputs {
    magnitude: MagnitudeData,
    mask: SupportMask,
    truth: Option<ComplexField>,
}

fn load_inputs(e: &EngineArgs) -> cgpr_core::Result<Inputs> {
    let magnitude = read_field(&e.magnitude)?.into_magnitude()?;
    let mask = read_field(&e.mask)?.into_mask()?;
    let truth = e
        .truth
        .as_ref()
        .map(|p| read_field(p).and_then(|f| f.into_complex()))
        .transpose()?;
    Ok(Inputs { magnitude, mask, truth })
}

fn run_config(e: &EngineArgs, iters: usize, seed: u64) -> cgpr_core::Result<RunConfig> {
    let cfg = RunConfig {
        beta: e.beta,
        t: e.t,
        zeta_rel_tol: e.tol,
        max_outer_iters: iters,
        max_tv_subiters: e.max_tv_subiters,
        seed,
        hio_variant: match e.hio_variant {
            VariantArg::FienupClassic => HioVariant::FienupClassic,
            VariantArg::PaperExact => HioVariant::PaperExact,
        },
        registration: match e.registration {
            RegistrationArg::Shift => Registration::CircularShift,
            RegistrationArg::None => Registration::None,
        },
        smoothing: Smoothing::Relative(e.eps_rel),
        step_norm: match e.step_norm {
            StepNormArg::Support => StepNorm::Support,
            StepNormArg::Window => StepNorm::Window,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn random_init(scope: InitScope, mask: &SupportMask, seed: u64) -> cgpr_core::Result<ComplexField> {
    match scope {
        InitScope::Support => random_phase_init_on(mask, seed),
        InitScope::Window => random_phase_init(mask.rows(), mask.cols(), seed),
    }
}

fn solve(inputs: &Inputs, cfg: &RunConfig, init: &ComplexField, guided: bool) -> cgpr_core::Result<(ComplexField, IterationTrace)> {
    let engine = if guided { run_cgpr } else { run_hio };
    engine(&inputs.magnitude, &inputs.mask, cfg, init, inputs.truth.as_ref())
}

fn cmd_solve(a: SolveArgs, guided: bool) -> cgpr_core::Result<()> {
    let inputs = load_inputs(&a.engine)?;
    let iters = a.iters.unwrap_or(if guided { 200 } else { 500 });
    let cfg = run_config(&a.engine, iters, a.seed)?;
    let (rows, cols) = inputs.magnitude.shape();
    let init = match &a.init {
        InitArg::Random => random_init(a.engine.init_scope, &inputs.mask, a.seed)?,
        InitArg::Constant => constant_init(rows, cols)?,
        InitArg::File(p) => read_field(p)?.into_complex()?,
    };
    let (recon, trace) = solve(&inputs, &cfg, &init, guided)?;
    write_field(&a.out, &recon.clone().into())?;
    write_trace_csv(&trace, &a.trace)?;
    if let Some(p) = &a.phase_pgm {
        export_grayscale(&inputs.mask.restrict(&recon)?, Channel::Phase, p)?;
    }
    let last = trace.last().expect("at least one iteration");
    let mut line = format!("iters {} zeta {}", last.iter, format_f64(last.zeta));
    if let Some(target) = trace.zeta_target {
        write!(line, " zeta_target {}", format_f64(target)).unwrap();
    }
    if let Some(e) = last.error_sq {
        write!(line, " error_sq {}", format_f64(e)).unwrap();
    }
    println!("{line}");
    Ok(())
}

struct TrialRun {
    seed: u64,
    engine: &'static str,
    trace: IterationTrace,
    wall_ms: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn cmd_compare(a: CompareArgs) -> cgpr_core::Result<()> {
    let inputs = load_inputs(&a.engine)?;
    let hio_cfg = run_config(&a.engine, a.hio_iters, a.seed_base)?;
    let cgpr_cfg = run_config(&a.engine, a.cgpr_iters, a.seed_base)?;
    let seeds: Vec<u64> = (0..a.trials).map(|k| a.seed_base + k).collect();

    let runs: Vec<TrialRun> = seeds
        .par_iter()
        .map(|&seed| -> cgpr_core::Result<Vec<TrialRun>> {
            let init = random_init(a.engine.init_scope, &inputs.mask, seed)?;
            let mut out = Vec::with_capacity(2);
            for (engine, cfg, guided) in [("hio", &hio_cfg, false), ("cgpr", &cgpr_cfg, true)] {
                let cfg = RunConfig { seed, ..cfg.clone() };
                let start = Instant::now();
                let (_, trace) = solve(&inputs, &cfg, &init, guided)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                out.push(TrialRun { seed, engine, trace, wall_ms });
            }
            Ok(out)
        })
        .collect::<cgpr_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let traces_dir = a.out_dir.join("traces");
    fs::create_dir_all(&traces_dir)?;
    let with_truth = inputs.truth.is_some();

    let mut trials = String::from("seed,engine,iters,final_zeta,final_error_sq,tv_substeps\n");
    let mut timings = String::from("seed,engine,wall_ms\n");
    for r in &runs {
        let last = r.trace.last().expect("at least one iteration");
        let substeps: usize = r.trace.records.iter().map(|x| x.tv_substeps).sum();
        let err = last.error_sq.map(format_f64).unwrap_or_default();
        writeln!(trials, "{},{},{},{},{},{}", r.seed, r.engine, last.iter, format_f64(last.zeta), err, substeps).unwrap();
        writeln!(timings, "{},{},{:.3}", r.seed, r.engine, r.wall_ms).unwrap();
        fs::write(traces_dir.join(format!("seed{}_{}.csv", r.seed, r.engine)), trace_to_csv(&r.trace))?;
    }
    fs::write(a.out_dir.join("trials.csv"), trials)?;
    fs::write(a.out_dir.join("timings.csv"), timings)?;

    let mut summary = String::from("engine,trials,median_final_zeta");
    if with_truth {
        summary.push_str(",median_error_sq,min_error_sq,max_error_sq");
    }
    summary.push('\n');
    for engine in ["hio", "cgpr"] {
        let of = |f: &dyn Fn(&TrialRun) -> Option<f64>| {
            let mut v: Vec<f64> = runs.iter().filter(|r| r.engine == engine).filter_map(f).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let zetas = of(&|r| r.trace.last().map(|x| x.zeta));
        write!(summary, "{engine},{},{}", zetas.len(), format_f64(median(&zetas))).unwrap();
        if with_truth {
            let errs = of(&|r| r.trace.final_error_sq());
            write!(
                summary,
                ",{},{},{}",
                format_f64(median(&errs)),
                format_f64(errs[0]),
                format_f64(errs[errs.len() - 1])
            )
            .unwrap();
        }
        summary.push('\n');
    }
    fs::write(a.out_dir.join("summary.csv"), &summary)?;
    print!("{summary}");
    for engine in ["hio", "cgpr"] {
        let ms: f64 = runs.iter().filter(|r| r.engine == engine).map(|r| r.wall_ms).sum();
        println!("{engine} mean wall time {:.1} ms", ms / a.trials as f64);
    }
    Ok(())
}
