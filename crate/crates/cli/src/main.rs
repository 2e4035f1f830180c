//! `qreact`: command-line runner for reactivity experiments.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or invalid input,
//! 3 I/O failure, 4 degenerate math (vanishing volume, infinite divergence).

mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use output::{emit, num, Cell, Format, RunManifest, Table};
use qreact::avg::{reactivity, reactivity_bipartite, Geometry, Sampler};
use qreact::corrmeasures::{
    concurrence, fidelity_from_bits, global_quantum_discord, relative_entropy, DiscordSearchConfig,
};
use qreact::infogeom::info_distance;
use qreact::measure::{joint_distribution, DetectorSetting};
use qreact::props::{run_check, Check};
use qreact::states::{parse_state_spec, werner};
use qreact::{AveragingMode, MeanEstimate};

#[derive(Parser)]
#[command(
    name = "qreact",
    version,
    about = "Information-geometric reactivity of qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data file; a `<out>.manifest.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeKind {
    Planar,
    Sphere,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerKind {
    Grid,
    Fibonacci,
    MonteCarlo,
}

#[derive(Args)]
struct ModeArgs {
    /// Direction family averaged over.
    #[arg(long, value_enum, default_value = "sphere")]
    mode: ModeKind,
    /// Defaults to grid for planar; Fibonacci (≤ 3 parties) or Monte Carlo for sphere.
    #[arg(long, value_enum)]
    sampler: Option<SamplerKind>,
    /// Grid points per party.
    #[arg(long, default_value_t = 64)]
    grid_n: usize,
    /// Point budget for Fibonacci (default 8192) or Monte Carlo (default 20000).
    #[arg(long)]
    samples: Option<usize>,
    /// Half-width above which an estimate is flagged as not converged.
    #[arg(long)]
    tolerance: Option<f64>,
}

impl ModeArgs {
    fn resolve(&self, parties: usize, seed: u64) -> Result<AveragingMode, Failure> {
        let geometry = match self.mode {
            ModeKind::Planar => Geometry::Planar,
            ModeKind::Sphere => Geometry::Sphere,
        };
        let kind = self.sampler.unwrap_or(match geometry {
            Geometry::Planar => SamplerKind::Grid,
            Geometry::Sphere => match AveragingMode::default_for(parties, seed).sampler {
                Sampler::MonteCarlo { .. } => SamplerKind::MonteCarlo,
                _ => SamplerKind::Fibonacci,
            },
        });
        let sampler = match kind {
            SamplerKind::Grid => Sampler::Grid {
                per_party: self.grid_n,
            },
            SamplerKind::Fibonacci => Sampler::Fibonacci {
                points: self.samples.unwrap_or(8192),
            },
            SamplerKind::MonteCarlo => Sampler::MonteCarlo {
                samples: self.samples.unwrap_or(20_000),
                seed,
            },
        };
        let mode = AveragingMode {
            geometry,
            sampler,
            tolerance: self.tolerance,
        };
        mode.validate(parties)?;
        Ok(mode)
    }
}

fn mode_params(mode: &AveragingMode) -> Value {
    match mode.sampler {
        Sampler::Grid { per_party } => json!({"mode": mode.label(), "grid_n": per_party}),
        Sampler::Fibonacci { points } => json!({"mode": mode.label(), "samples": points}),
        Sampler::MonteCarlo { samples, seed } => {
            json!({"mode": mode.label(), "samples": samples, "seed": seed})
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Four pairwise distances of the two-detector trapezoid and its verdict.
    Trapezoid {
        #[arg(long)]
        state: String,
        /// α1,β1,α2,β2 in radians; `pi` fractions such as `3pi/8` are accepted.
        #[arg(long, default_value = "0,pi/8,pi/4,3pi/8")]
        angles: String,
        #[command(flatten)]
        common: Common,
    },
    /// Mean distance, reactivity, concurrence and discord across Werner states.
    WernerSweep {
        /// Comma-separated λ values; overrides --steps.
        #[arg(long)]
        lambdas: Option<String>,
        /// Evenly spaced λ values on [0, 1].
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Averaged boundary content, volume and reactivity of one state.
    Reactivity {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded property battery; exits 1 if it fails.
    Props {
        #[arg(long, value_parser = parse_check)]
        check: Check,
        /// Trials for `metric` (default 200) and `lu` (default 50).
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Distinguishing fidelity 1 − e^(−n·S·ln 2) against measurement count, S in bits.
    Sanov {
        #[arg(long)]
        state: String,
        #[arg(long)]
        state2: String,
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_check(s: &str) -> Result<Check, String> {
    Check::parse(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<qreact::Error> for Failure {
    fn from(e: qreact::Error) -> Self {
        let code = match e {
            qreact::Error::Degenerate(_) | qreact::Error::SupportViolation(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: format!("{e} [{}]", e.code()),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

fn io_failure(path: Option<&Path>, e: std::io::Error) -> Failure {
    let target = path.map_or("stdout".to_string(), |p| p.display().to_string());
    Failure {
        code: 3,
        message: format!("cannot write {target}: {e}"),
    }
}

fn parse_angle(token: &str) -> Result<f64, Failure> {
    let t: String = token
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .collect();
    let bad = || usage(format!("cannot parse angle `{token}`"));
    let value = match t.split_once("pi") {
        None => t.parse::<f64>().map_err(|_| bad())?,
        Some((coef, rest)) => {
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let d = match rest {
                "" => 1.0,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| *d != 0.0)
                    .ok_or_else(bad)?,
            };
            c * PI / d
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, Failure>) -> Result<Vec<T>, Failure> {
    text.split(',').map(item).collect()
}

fn params(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn estimate_json(m: &MeanEstimate) -> Value {
    json!({
        "mean": num(m.mean),
        "half_width": num(m.half_width),
        "samples": m.samples,
        "converged": m.converged,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    match cli.command {
        Command::Trapezoid {
            state,
            angles,
            common,
        } => {
            let rho = parse_state_spec::<f64>(&state)?;
            let a = parse_list(&angles, parse_angle)?;
            let [a1, b1, a2, b2] = a[..] else {
                return Err(usage(format!("expected 4 angles, got {}", a.len())));
            };
            let d = |x: f64, y: f64| -> Result<f64, Failure> {
                let dist = joint_distribution(&rho, &DetectorSetting::planar(&[x, y]))?;
                Ok(info_distance(&dist, 0, 1)?)
            };
            let (d11, d21, d22, d12) = (d(a1, b1)?, d(a2, b1)?, d(a2, b2)?, d(a1, b2)?);
            let short = d11 + d21 + d22;
            let verdict = if d12 > short { "VIOLATED" } else { "SATISFIED" };
            let mut table = Table::new(&[
                "d_a1b1",
                "d_a2b1",
                "d_a2b2",
                "d_a1b2",
                "short_sum",
                "verdict",
            ]);
            table.push(vec![
                Cell::Num(d11),
                Cell::Num(d21),
                Cell::Num(d22),
                Cell::Num(d12),
                Cell::Num(short),
                Cell::Text(verdict.into()),
            ]);
            let data = table.render(common.format.unwrap_or(Format::Csv));
            let p = params(
                json!({"state": state, "angles": a.iter().map(|x| num(*x)).collect::<Vec<_>>()}),
            );
            finish(&common, "trapezoid", p, &data, start)
        }
        Command::WernerSweep {
            lambdas,
            steps,
            mode,
            common,
        } => {
            let grid: Vec<f64> = match &lambdas {
                Some(text) => parse_list(text, |t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| usage(format!("cannot parse λ `{t}`")))
                })?,
                None => {
                    if steps < 2 {
                        return Err(usage("--steps must be at least 2".into()));
                    }
                    (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect()
                }
            };
            let avg = mode.resolve(2, common.seed)?;
            let cfg = DiscordSearchConfig::default();
            let mut table = Table::new(&[
                "lambda",
                "mean_distance",
                "reactivity",
                "concurrence",
                "gqd",
                "mode",
                "seed",
                "half_width",
            ]);
            for &l in &grid {
                let rho = werner(l)?;
                let r = reactivity_bipartite(&rho, &avg)?;
                let d = r.volume_mean;
                table.push(vec![
                    Cell::Num(l),
                    Cell::Num(d.mean),
                    Cell::Num(r.reactivity),
                    Cell::Num(concurrence(&rho)?),
                    Cell::Num(global_quantum_discord(&rho, &cfg)?.value),
                    Cell::Text(avg.label().into()),
                    Cell::Int(common.seed),
                    Cell::Num(d.half_width),
                ]);
            }
            let data = table.render(common.format.unwrap_or(Format::Csv));
            let mut p = params(mode_params(&avg));
            p.insert(
                "lambdas".into(),
                Value::Array(grid.iter().map(|x| num(*x)).collect()),
            );
            finish(&common, "werner-sweep", p, &data, start)
        }
        Command::Reactivity {
            state,
            mode,
            common,
        } => {
            let rho = parse_state_spec::<f64>(&state)?;
            let avg = mode.resolve(rho.parties(), common.seed)?;
            if rho.parties() < 2 {
                return Err(usage(format!(
                    "reactivity needs 2 to 6 parties, `{state}` has 1"
                )));
            }
            let r = reactivity(&rho, &avg)?;
            let mut p = params(mode_params(&avg));
            p.insert("state".into(), Value::from(state.clone()));
            let data = match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let manifest = RunManifest::new("reactivity", p.clone(), common.seed);
                    let doc = json!({
                        "state": state,
                        "parties": rho.parties(),
                        "mode": avg.label(),
                        "area_mean": estimate_json(&r.area_mean),
                        "volume_mean": estimate_json(&r.volume_mean),
                        "reactivity": num(r.reactivity),
                        "half_width": num(r.half_width()),
                        "manifest": manifest,
                    });
                    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut table = Table::new(&[
                        "area_mean",
                        "area_half_width",
                        "volume_mean",
                        "volume_half_width",
                        "reactivity",
                        "half_width",
                        "mode",
                        "seed",
                    ]);
                    table.push(vec![
                        Cell::Num(r.area_mean.mean),
                        Cell::Num(r.area_mean.half_width),
                        Cell::Num(r.volume_mean.mean),
                        Cell::Num(r.volume_mean.half_width),
                        Cell::Num(r.reactivity),
                        Cell::Num(r.half_width()),
                        Cell::Text(avg.label().into()),
                        Cell::Int(common.seed),
                    ]);
                    table.render(Format::Csv)
                }
            };
            finish(&common, "reactivity", p, &data, start)
        }
        Command::Props {
            check,
            trials,
            common,
        } => {
            let trials = trials.unwrap_or(match check {
                Check::Metric => 200,
                _ => 50,
            });
            let report = run_check(check, trials, common.seed)?;
            let mut log = String::new();
            for t in &report.trials {
                let verdict = if t.passed { "PASS" } else { "FAIL" };
                log.push_str(&format!(
                    "trial {} seed {} {verdict} {}\n",
                    t.index, t.seed, t.detail
                ));
            }
            log.push_str(&format!(
                "{check}: {}/{} passed, {} required\n",
                report.passes(),
                report.trials.len(),
                report.required_passes
            ));
            let p = params(json!({"check": check.as_str(), "trials": trials}));
            finish(&common, "props", p, &log, start)?;
            if report.passed() {
                Ok(0)
            } else {
                for t in report.failures() {
                    eprintln!(
                        "qreact: {check} failed at trial {} (seed {}): {}",
                        t.index, t.seed, t.detail
                    );
                }
                Ok(1)
            }
        }
        Command::Sanov {
            state,
            state2,
            n_max,
            common,
        } => {
            let r1 = parse_state_spec::<f64>(&state)?;
            let r2 = parse_state_spec::<f64>(&state2)?;
            let s = relative_entropy(&r1, &r2)?;
            let mut table = Table::new(&["n", "fidelity"]);
            for n in 0..=n_max {
                table.push(vec![Cell::Int(n), Cell::Num(fidelity_from_bits(s, n))]);
            }
            let data = table.render(common.format.unwrap_or(Format::Csv));
            let p = params(json!({"state": state, "state2": state2, "n_max": n_max}));
            finish(&common, "sanov", p, &data, start)
        }
    }
}

fn finish(
    common: &Common,
    command: &str,
    params: Map<String, Value>,
    data: &str,
    start: Instant,
) -> Result<u8, Failure> {
    let manifest = RunManifest::new(command, params, common.seed);
    emit(
        common.out.as_deref(),
        data,
        manifest,
        start.elapsed().as_millis(),
    )
    .map_err(|e| io_failure(common.out.as_deref(), e))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qreact: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
