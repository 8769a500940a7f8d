mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{emit, to_value, write_atomic, CliError, CliResult, Envelope, Input};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use symdyn::chaos::{density_report, scheduled_horizons, scramble};
use symdyn::decomposition::decomposition_report;
use symdyn::inverse_systems::{check_mlc, InverseSequenceSpec, SequenceJson};
use symdyn::scalar::pow2_neg;
use symdyn::selftest::{self, Suite};
use symdyn::shadow_lab::{
    brute_shadowing_check, build_example62, default_scales, sigma_infinity, truncate_shift,
    CheckMode, FiniteSystem, FiniteSystemJson,
};
use symdyn::shift_core::SftJson;
use symdyn::towers::{enumerate_towers, find_entropic_component, select_max_tower, TowerKind};
use symdyn::{Dyadic, Rational, SftGraph};

#[derive(Parser)]
#[command(
    name = "symdyn",
    version,
    about = "Symbolic dynamics analyses on JSON fixtures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run the built-in fixture suite for this subcommand instead.
    #[arg(long)]
    selftest: bool,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArg {
    /// Input JSON file.
    #[arg(long = "in", value_name = "PATH", required_unless_present = "selftest")]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Component,
    Cyclic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Components, period, classes and entropy of a shift.
    Analyze {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: Common,
    },
    /// One-step and eventual stabilization of the images of a sequence.
    Mlc {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 16)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Towers of components or cyclic classes, optionally with selection.
    Towers {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Kind::Component)]
        kind: Kind,
        /// Run the maximal-image selection from this level for every tower.
        #[arg(long)]
        select: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Tower with stabilizing images and positive entropy.
    Entropic {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: Common,
    },
    /// Scrambled tuple on a mixing shift and its density report.
    Scramble {
        #[command(flatten)]
        input: InputArg,
        #[arg(short = 'n', long = "points", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        horizon: usize,
        /// Closeness threshold 2^-E.
        #[arg(long, default_value_t = 5)]
        epsilon_exponent: u32,
        #[arg(long, default_value_t = 8)]
        max_period: usize,
        #[arg(long, default_value_t = 8)]
        first_block: usize,
        /// Density table path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Pseudo-orbit shadowing check on a finite system or a truncated shift.
    Shadow {
        /// Finite system or shift JSON.
        #[arg(long = "in", value_name = "PATH", required_unless_present_any = ["selftest", "sigma_inf"])]
        input: Option<PathBuf>,
        /// Use the truncated non-shadowing system on `M + 2` points instead.
        #[arg(long, value_name = "M", conflicts_with = "input")]
        sigma_inf: Option<usize>,
        /// Truncation depth when the input is a shift.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 1)]
        epsilon_exponent: u32,
        #[arg(long, default_value_t = 2)]
        delta_exponent: u32,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Census and fiber checks of the finite-depth interval model.
    Example62 {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Deepest endpoint level carrying a gap-shift fiber; defaults to the depth.
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn read_input(path: &Option<PathBuf>) -> CliResult<Input> {
    let p = path
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing --in".into()))?;
    Input::read(p)
}

fn shift(input: &Input) -> CliResult<SftGraph> {
    Ok(input.parse::<SftJson>()?.to_graph()?)
}

fn sequence(input: &Input) -> CliResult<InverseSequenceSpec> {
    Ok(input.parse::<SequenceJson>()?.to_spec()?)
}

fn run_selftest(suite: Suite, out: Option<&Path>) -> CliResult<ExitCode> {
    let r = selftest::run(suite);
    emit(&r, out)?;
    eprintln!(
        "selftest {:?}: {} passed, {} failed",
        suite, r.passed, r.failed
    );
    Ok(if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn finish(env: Envelope<'_>, out: Option<&Path>) -> CliResult<ExitCode> {
    emit(&env, out)?;
    Ok(ExitCode::SUCCESS)
}

fn analyze(input: &InputArg, common: &Common) -> CliResult<ExitCode> {
    let inp = read_input(&input.input)?;
    let g = shift(&inp)?;
    let mut env = Envelope::new("analyze", &[&inp], json!({}));
    env.result = to_value(&decomposition_report(&g)?);
    finish(env, common.out.as_deref())
}

fn mlc(input: &InputArg, cap: usize, common: &Common) -> CliResult<ExitCode> {
    let inp = read_input(&input.input)?;
    let seq = sequence(&inp)?;
    let verdict = check_mlc(&seq, cap)?;
    let mut env = Envelope::new("mlc", &[&inp], json!({ "cap": cap }));
    let witnesses: Vec<Option<usize>> = (1..=seq.listed_levels())
        .map(|n| verdict.witness(n))
        .collect();
    env.result = json!({
        "mlc1_everywhere": verdict.mlc1_everywhere(),
        "witnesses": witnesses,
        "verdict": to_value(&verdict.to_json()),
    });
    finish(env, common.out.as_deref())
}

fn towers(
    input: &InputArg,
    depth: usize,
    kind: Kind,
    select: Option<usize>,
    common: &Common,
) -> CliResult<ExitCode> {
    let inp = read_input(&input.input)?;
    let seq = sequence(&inp)?;
    let kind = match kind {
        Kind::Component => TowerKind::Component,
        Kind::Cyclic => TowerKind::Cyclic,
    };
    let list = enumerate_towers(&seq, kind, depth)?;
    let mut env = Envelope::new(
        "towers",
        &[&inp],
        json!({ "depth": depth, "kind": to_value(&kind), "select": select }),
    );
    let selections = match select {
        Some(n) => Some(
            list.iter()
                .map(|t| select_max_tower(&seq, t, n))
                .collect::<symdyn::Result<Vec<_>>>()?,
        ),
        None => None,
    };
    env.result = json!({ "towers": to_value(&list), "selections": to_value(&selections) });
    finish(env, common.out.as_deref())
}

fn entropic(input: &InputArg, common: &Common) -> CliResult<ExitCode> {
    let inp = read_input(&input.input)?;
    let seq = sequence(&inp)?;
    let mut env = Envelope::new("entropic", &[&inp], json!({}));
    env.result = to_value(&find_entropic_component(&seq)?);
    finish(env, common.out.as_deref())
}

struct ScrambleArgs<'a> {
    input: &'a InputArg,
    n: usize,
    horizon: usize,
    epsilon_exponent: u32,
    max_period: usize,
    first_block: usize,
    csv: Option<&'a Path>,
}

fn write_csv(path: &Path, report: &symdyn::chaos::DensityReport) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let flag = |f: Option<bool>| f.map_or(String::new(), |b| b.to_string());
    let io = |e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    w.write_record([
        "horizon",
        "frac_close",
        "frac_far",
        "pass_close",
        "pass_far",
    ])
    .map_err(io)?;
    for r in &report.rows {
        w.write_record([
            r.horizon.to_string(),
            format!("{:.9}", r.frac_close()),
            format!("{:.9}", r.frac_far()),
            flag(r.pass_close),
            flag(r.pass_far),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    write_atomic(path, &bytes)
}

fn scramble_cmd(a: ScrambleArgs<'_>, common: &Common) -> CliResult<ExitCode> {
    let inp = read_input(&a.input.input)?;
    let g = shift(&inp)?;
    let eps = Dyadic::Pow(a.epsilon_exponent);
    let (tuple, delta) = scramble(&g, a.n, a.max_period, eps, a.first_block)?;
    let blocks = tuple.schedule().blocks_within(a.horizon);
    let hs = scheduled_horizons(tuple.schedule(), 3, blocks);
    let streams = (0..a.n).map(|i| tuple.stream(i)).collect();
    let report = density_report(streams, eps, delta, &hs)?;
    if let Some(p) = a.csv {
        write_csv(p, &report)?;
    }
    let mut env = Envelope::new(
        "scramble",
        &[&inp],
        json!({
            "n": a.n,
            "horizon": a.horizon,
            "epsilon_exponent": a.epsilon_exponent,
            "max_period": a.max_period,
            "first_block": a.first_block,
        }),
    );
    env.result = json!({
        "distal": to_value(tuple.distal()),
        "schedule": to_value(tuple.schedule()),
        "delta": to_value(&delta),
        "all_pass": report.all_pass(),
        "density": to_value(&report),
    });
    finish(env, common.out.as_deref())
}

struct ShadowArgs<'a> {
    input: &'a Option<PathBuf>,
    sigma_inf: Option<usize>,
    depth: Option<usize>,
    epsilon_exponent: u32,
    delta_exponent: u32,
    horizon: usize,
    mode: Mode,
    seed: u64,
    samples: usize,
}

fn shadow(a: ShadowArgs<'_>, common: &Common) -> CliResult<ExitCode> {
    let mut inputs = Vec::new();
    let sys: FiniteSystem<Rational> = match a.sigma_inf {
        Some(m) => sigma_infinity(m)?,
        None => {
            let inp = read_input(a.input)?;
            let finite = inp.parse::<serde_json::Value>()?.get("points").is_some();
            let sys = match finite {
                true => FiniteSystem::from_json(&inp.parse::<FiniteSystemJson>()?)?,
                false => {
                    let g = shift(&inp)?;
                    let depth = a
                        .depth
                        .ok_or_else(|| CliError::Usage("a shift input needs --depth".into()))?;
                    truncate_shift(&g, depth)?.0
                }
            };
            inputs.push(inp);
            sys
        }
    };
    let mode = match a.mode {
        Mode::Exhaustive => CheckMode::Exhaustive,
        Mode::Sampled => CheckMode::Sampled {
            seed: a.seed,
            count: a.samples,
        },
    };
    let eps: Rational = pow2_neg(a.epsilon_exponent);
    let delta: Rational = pow2_neg(a.delta_exponent);
    let verdict = brute_shadowing_check(&sys, &eps, &delta, a.horizon, mode)?;
    let refs: Vec<&Input> = inputs.iter().collect();
    let mut env = Envelope::new(
        "shadow",
        &refs,
        json!({
            "sigma_inf": a.sigma_inf,
            "depth": a.depth,
            "epsilon_exponent": a.epsilon_exponent,
            "delta_exponent": a.delta_exponent,
            "horizon": a.horizon,
            "points": sys.len(),
        }),
    );
    if let CheckMode::Sampled { seed, .. } = mode {
        env.seed = Some(seed);
    }
    env.result =
        json!({ "verdict": to_value(&verdict.to_json(&sys)), "replayed": verdict.replay(&sys) });
    finish(env, common.out.as_deref())
}

fn example62(
    depth: usize,
    k_max: Option<usize>,
    horizon: usize,
    common: &Common,
) -> CliResult<ExitCode> {
    let c = default_scales::<Rational>(depth).c;
    let k_max = k_max.unwrap_or(depth);
    let ex = build_example62(depth, &c, k_max, horizon)?;
    let checks = ex.verify_fibers()?;
    let mut env = Envelope::new(
        "example62",
        &[],
        json!({ "depth": depth, "k_max": k_max, "horizon": horizon }),
    );
    env.result = json!({ "census": to_value(&ex.census), "fiber_checks": to_value(&checks) });
    finish(env, common.out.as_deref())
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Analyze { input, common } => {
            if common.selftest {
                return run_selftest(Suite::Analyze, common.out.as_deref());
            }
            analyze(input, common)
        }
        Command::Mlc { input, cap, common } => {
            if common.selftest {
                return run_selftest(Suite::Mlc, common.out.as_deref());
            }
            mlc(input, *cap, common)
        }
        Command::Towers {
            input,
            depth,
            kind,
            select,
            common,
        } => {
            if common.selftest {
                return run_selftest(Suite::Towers, common.out.as_deref());
            }
            towers(input, *depth, *kind, *select, common)
        }
        Command::Entropic { input, common } => {
            if common.selftest {
                return run_selftest(Suite::Entropic, common.out.as_deref());
            }
            entropic(input, common)
        }
        Command::Scramble {
            input,
            n,
            horizon,
            epsilon_exponent,
            max_period,
            first_block,
            csv,
            common,
        } => {
            if common.selftest {
                return run_selftest(Suite::Scramble, common.out.as_deref());
            }
            let args = ScrambleArgs {
                input,
                n: *n,
                horizon: *horizon,
                epsilon_exponent: *epsilon_exponent,
                max_period: *max_period,
                first_block: *first_block,
                csv: csv.as_deref(),
            };
            scramble_cmd(args, common)
        }
        Command::Shadow {
            input,
            sigma_inf,
            depth,
            epsilon_exponent,
            delta_exponent,
            horizon,
            mode,
            seed,
            samples,
            common,
        } => {
            if common.selftest {
                return run_selftest(Suite::Shadow, common.out.as_deref());
            }
            let args = ShadowArgs {
                input,
                sigma_inf: *sigma_inf,
                depth: *depth,
                epsilon_exponent: *epsilon_exponent,
                delta_exponent: *delta_exponent,
                horizon: *horizon,
                mode: *mode,
                seed: *seed,
                samples: *samples,
            };
            shadow(args, common)
        }
        Command::Example62 {
            depth,
            k_max,
            horizon,
            common,
        } => {
            if common.selftest {
                return run_selftest(Suite::Example62, common.out.as_deref());
            }
            example62(*depth, *k_max, *horizon, common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
