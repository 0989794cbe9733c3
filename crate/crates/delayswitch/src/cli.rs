//! Command-line front end: JSON config in, CSV/JSON artifacts out.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::charpoly::{from_companion, QuasiPolynomial};
use crate::criteria;
use crate::ddesim::{self, Classification, DelaySystem, HistoryFunction};
use crate::error::Error;
use crate::mikhailov;
use crate::switches;

/// A JSON number that may arrive as a decimal string (to avoid silent
/// precision loss in hand-written fixtures).
#[derive(Debug, Clone, Copy)]
struct Num(f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Num, D::Error> {
        struct NumVisitor;
        impl<'de> de::Visitor<'de> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number or a decimal string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                v.trim().parse::<f64>().map(Num).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsSpec {
    a0: Num,
    a1: Num,
    a2: Num,
    b0: Num,
    #[serde(default)]
    b1: Option<Num>,
    #[serde(default)]
    b2: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatricesSpec {
    a: [[Num; 3]; 3],
    b: [[Num; 3]; 3],
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum HistorySpec {
    Constant { value: [Num; 3] },
    Quadratic,
    Tabulated { samples: Vec<[Num; 4]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisConfig {
    #[serde(default)]
    coefficients: Option<CoefficientsSpec>,
    #[serde(default)]
    matrices: Option<MatricesSpec>,
    #[serde(default)]
    appeal: Option<[Num; 3]>,
    #[serde(default)]
    tau: Option<Num>,
    #[serde(default)]
    tau_max: Option<Num>,
    #[serde(default)]
    history: Option<HistorySpec>,
    output_dir: PathBuf,
    #[serde(default)]
    format: OutputFormat,
}

#[derive(Parser)]
#[command(
    name = "delayswitch",
    about = "Stability-switch analysis of three-variable linear delay systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude cubic, discriminant and crossing frequencies.
    Analyze { config: PathBuf },
    /// Critical-delay events and stable windows up to --tau-max.
    Switches {
        config: PathBuf,
        #[arg(long)]
        tau_max: Option<f64>,
    },
    /// Mikhailov hodograph trace and stability verdict at --tau.
    Hodograph {
        config: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Sufficient-condition reports (theorem at --tau-bar, corollary, remark).
    Check {
        config: PathBuf,
        #[arg(long)]
        tau_bar: Option<f64>,
    },
    /// Method-of-steps simulation and empirical classification.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 400.0)]
        t_end: f64,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Right-half-plane root count over a range of delays.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        tau_from: f64,
        #[arg(long)]
        tau_to: f64,
        #[arg(long)]
        points: usize,
    },
}

enum CliError {
    /// Exit code 2: bad invocation or config.
    Usage(String),
    /// Exit code 1: analysis failure, reported verbatim.
    Analysis(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Analysis(e)
    }
}

/// Run the CLI on the given argv; returns the process exit code
/// (0 ok, 1 analysis error, 2 usage error).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version "errors" are successful exits.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Analysis(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { config } => cmd_analyze(&load(&config)?),
        Command::Switches { config, tau_max } => {
            let ctx = load(&config)?;
            let tau_max = tau_max
                .or(ctx.config.tau_max.map(|n| n.0))
                .ok_or_else(|| CliError::Usage("--tau-max (or config tau_max) required".into()))?;
            cmd_switches(&ctx, tau_max)
        }
        Command::Hodograph { config, tau } => {
            let ctx = load(&config)?;
            let tau = tau
                .or(ctx.config.tau.map(|n| n.0))
                .ok_or_else(|| CliError::Usage("--tau (or config tau) required".into()))?;
            cmd_hodograph(&ctx, tau)
        }
        Command::Check { config, tau_bar } => cmd_check(&load(&config)?, tau_bar),
        Command::Simulate {
            config,
            tau,
            t_end,
            step,
        } => {
            let ctx = load(&config)?;
            let tau = tau
                .or(ctx.config.tau.map(|n| n.0))
                .ok_or_else(|| CliError::Usage("--tau (or config tau) required".into()))?;
            cmd_simulate(&ctx, tau, t_end, step)
        }
        Command::Sweep {
            config,
            tau_from,
            tau_to,
            points,
        } => cmd_sweep(&load(&config)?, tau_from, tau_to, points),
    }
}

struct Context {
    config: AnalysisConfig,
    qp: QuasiPolynomial,
}

fn load(path: &Path) -> Result<Context, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let config: AnalysisConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let qp = match (&config.coefficients, &config.matrices) {
        (Some(c), None) => QuasiPolynomial::new(
            c.a0.0,
            c.a1.0,
            c.a2.0,
            c.b0.0,
            c.b1.map_or(0.0, |n| n.0),
            c.b2.map_or(0.0, |n| n.0),
        )?,
        (None, Some(m)) => {
            let a = m.a.map(|row| row.map(|n| n.0));
            let b = m.b.map(|row| row.map(|n| n.0));
            from_companion(&a, &b)?
        }
        _ => {
            return Err(CliError::Usage(
                "config must contain exactly one of `coefficients` or `matrices`".into(),
            ))
        }
    };
    fs::create_dir_all(&config.output_dir).map_err(|e| {
        CliError::Usage(format!(
            "cannot create output_dir {}: {e}",
            config.output_dir.display()
        ))
    })?;
    Ok(Context { config, qp })
}

/// 17 significant digits: lossless f64 round trip for plot tools.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_artifact(ctx: &Context, name: &str, contents: &str) -> Result<(), CliError> {
    let path = ctx.config.output_dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn emit(ctx: &Context, json: &str, csv: Option<&str>) {
    match (ctx.config.format, csv) {
        (OutputFormat::Csv, Some(csv)) => print!("{csv}"),
        _ => println!("{json}"),
    }
}

fn cmd_analyze(ctx: &Context) -> Result<(), CliError> {
    let f = switches::amplitude_polynomial(&ctx.qp);
    let crossings = switches::crossing_frequencies(&f)?;

    #[derive(Serialize)]
    struct AnalyzeOutput<'a> {
        amplitude_cubic: &'a switches::AmplitudeCubic,
        crossings: &'a [switches::CrossingFrequency],
    }
    let json = serde_json::to_string_pretty(&AnalyzeOutput {
        amplitude_cubic: &f,
        crossings: &crossings,
    })
    .expect("serializable");
    write_artifact(ctx, "analyze.json", &json)?;
    emit(ctx, &json, None);
    Ok(())
}

fn cmd_switches(ctx: &Context, tau_max: f64) -> Result<(), CliError> {
    let schedule = switches::schedule(&ctx.qp, tau_max)?;

    let mut csv = String::from("tau,delta,source_j,n\n");
    for e in &schedule.events {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(e.tau),
            e.delta,
            e.source,
            e.n
        ));
    }
    write_artifact(ctx, "switches.csv", &csv)?;

    let json = serde_json::to_string_pretty(&schedule).expect("serializable");
    write_artifact(ctx, "switches.json", &json)?;
    emit(ctx, &json, Some(&csv));
    Ok(())
}

fn cmd_hodograph(ctx: &Context, tau: f64) -> Result<(), CliError> {
    let trace = mikhailov::trace(&ctx.qp, tau)?;
    let verdict = mikhailov::verdict(&trace)?;

    let mut csv = String::from("omega,w_r,w_i,arg\n");
    for s in &trace.samples {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(s.omega),
            fmt_f(s.w_r),
            fmt_f(s.w_i),
            fmt_f(s.arg)
        ));
    }
    write_artifact(ctx, "hodograph.csv", &csv)?;

    #[derive(Serialize)]
    struct HodographOutput<'a> {
        tau: f64,
        omega_cut: f64,
        tail_bound: f64,
        min_abs_w: f64,
        verdict: &'a mikhailov::StabilityVerdict,
    }
    let json = serde_json::to_string_pretty(&HodographOutput {
        tau,
        omega_cut: trace.omega_cut,
        tail_bound: trace.tail_bound,
        min_abs_w: trace.min_abs_w,
        verdict: &verdict,
    })
    .expect("serializable");
    write_artifact(ctx, "hodograph.json", &json)?;
    emit(ctx, &json, Some(&csv));
    Ok(())
}

fn cmd_check(ctx: &Context, tau_bar: Option<f64>) -> Result<(), CliError> {
    let theorem = match tau_bar {
        Some(t) => Some(criteria::check_theorem(&ctx.qp, t)?),
        None => None,
    };
    let (corollary_passed, interval) = criteria::check_corollary(&ctx.qp)?;
    let g = criteria::corollary_g(&ctx.qp).ok();
    let remark = criteria::remark_lower_bound(&ctx.qp)?;

    #[derive(Serialize)]
    struct CheckOutput {
        theorem: Option<criteria::TheoremReport>,
        corollary_passed: bool,
        corollary_g: Option<criteria::CorollaryCubic>,
        stable_tau_interval: Option<(f64, f64)>,
        remark_lower_bound: f64,
    }
    let json = serde_json::to_string_pretty(&CheckOutput {
        theorem,
        corollary_passed,
        corollary_g: g,
        stable_tau_interval: interval,
        remark_lower_bound: remark,
    })
    .expect("serializable");
    write_artifact(ctx, "check.json", &json)?;
    emit(ctx, &json, None);
    Ok(())
}

fn cmd_simulate(ctx: &Context, tau: f64, t_end: f64, step: Option<f64>) -> Result<(), CliError> {
    let appeal = ctx.config.appeal.map_or([0.0; 3], |a| a.map(|n| n.0));
    let sys = DelaySystem::from_quasi_polynomial(&ctx.qp, appeal, tau)?;
    let hist = match &ctx.config.history {
        None | Some(HistorySpec::Quadratic) => HistoryFunction::Quadratic,
        Some(HistorySpec::Constant { value }) => HistoryFunction::Constant(value.map(|n| n.0)),
        Some(HistorySpec::Tabulated { samples }) => HistoryFunction::Tabulated(
            samples
                .iter()
                .map(|s| (s[0].0, [s[1].0, s[2].0, s[3].0]))
                .collect(),
        ),
    };
    let h = step.unwrap_or_else(|| ddesim::default_step(tau));
    let v_star = ddesim::steady_state(&sys)?;
    let traj = ddesim::integrate(&sys, &hist, t_end, h)?;
    let classification = ddesim::classify(&traj, &v_star)?;

    let mut csv = String::from("t,x,y,z\n");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(*t),
            fmt_f(s[0]),
            fmt_f(s[1]),
            fmt_f(s[2])
        ));
    }
    write_artifact(ctx, "trajectory.csv", &csv)?;

    #[derive(Serialize)]
    struct SimulateOutput {
        tau: f64,
        step: f64,
        t_end: f64,
        steady_state: [f64; 3],
        diverged: bool,
        classification: Classification,
    }
    let json = serde_json::to_string_pretty(&SimulateOutput {
        tau,
        step: h,
        t_end,
        steady_state: v_star,
        diverged: traj.diverged,
        classification,
    })
    .expect("serializable");
    write_artifact(ctx, "simulate.json", &json)?;
    emit(ctx, &json, Some(&csv));
    Ok(())
}

fn sweep_threads() -> usize {
    std::env::var("DELAYSWITCH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cmd_sweep(ctx: &Context, tau_from: f64, tau_to: f64, points: usize) -> Result<(), CliError> {
    if points < 2
        || !tau_from.is_finite()
        || !tau_to.is_finite()
        || tau_to <= tau_from
        || tau_from < 0.0
    {
        return Err(CliError::Usage(
            "sweep needs tau_from >= 0, tau_to > tau_from and points >= 2".into(),
        ));
    }
    let taus: Vec<f64> = (0..points)
        .map(|k| tau_from + (tau_to - tau_from) * k as f64 / (points - 1) as f64)
        .collect();

    // Fan out over a bounded worker pool; slots are indexed by tau so the
    // output order never depends on scheduling.
    let threads = sweep_threads().min(points);
    let qp = ctx.qp;
    let mut results: Vec<Option<crate::error::Result<usize>>> = vec![None; points];
    std::thread::scope(|scope| {
        let chunk = points.div_ceil(threads);
        for (worker, slots) in results.chunks_mut(chunk).enumerate() {
            let taus = &taus;
            scope.spawn(move || {
                for (off, slot) in slots.iter_mut().enumerate() {
                    let tau = taus[worker * chunk + off];
                    *slot = Some(mikhailov::rhp_count(&qp, tau));
                }
            });
        }
    });

    let mut csv = String::from("tau,n_rhp\n");
    let mut rows = Vec::with_capacity(points);
    for (tau, res) in taus.iter().zip(results) {
        let n = res.expect("worker filled slot")?;
        csv.push_str(&format!("{},{}\n", fmt_f(*tau), n));
        rows.push((*tau, n));
    }
    write_artifact(ctx, "sweep.csv", &csv)?;

    #[derive(Serialize)]
    struct SweepOutput {
        tau_from: f64,
        tau_to: f64,
        points: usize,
        counts: Vec<(f64, usize)>,
    }
    let json = serde_json::to_string_pretty(&SweepOutput {
        tau_from,
        tau_to,
        points,
        counts: rows,
    })
    .expect("serializable");
    write_artifact(ctx, "sweep.json", &json)?;
    emit(ctx, &json, Some(&csv));
    Ok(())
}
