use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kpp_core::coefficients::{validate_hypotheses, HypothesisReport};
use kpp_core::io;
use kpp_core::propagation::{
    compare_with_front, measure_speed, pulsating_residual_k, simulate, CompareSettings,
    InitialCondition, SimulationConfig, SnapshotPlan,
};
use kpp_core::speed::{homogenized_speed, minimal_speed, speed_lower_bound, speed_sweep};
use kpp_core::steady::{
    default_half_width, homogenized_front, stationary_sweep, DEFAULT_LINE_POINTS,
};
use kpp_core::{Error, MeanSet, PeriodicGrid, Preset};

#[derive(Parser, Debug)]
#[command(
    name = "kpp",
    version,
    about = "Pulsating KPP fronts in periodic media and their homogenized limit"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Built-in preset name or path to a preset TOML file
    #[arg(long, global = true, default_value = "fisher-const")]
    preset: String,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Homogenized means, p0 and c*_hom; writes means.csv
    Means,
    /// c*_L over a list of periods; writes speed_sweep.csv
    SpeedSweep(SweepArgs),
    /// Stationary states p_L over a list of periods; writes steady_sweep.csv
    SteadySweep(SweepArgs),
    /// Front simulation at one period; writes trace.csv, space_time.* and simulate.csv
    Simulate(SimulateArgs),
    /// Simulated fronts against the homogenized front; writes convergence.csv and profile.csv
    Compare(CompareArgs),
}

fn parse_period(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("L must lie in (0, 1], got {v}"))
    }
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    /// Period L in (0, 1]; repeatable (default 1/4, 1/8, ..., 1/128)
    #[arg(long = "L", value_parser = parse_period)]
    ls: Vec<f64>,
    /// Grid points per period for the cell problems
    #[arg(long, default_value_t = 256)]
    grid_n: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum DumpFormat {
    Csv,
    Binary,
    None,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    /// Period L in (0, 1]
    #[arg(long = "L", value_parser = parse_period, default_value = "0.0625")]
    l: f64,
    /// Grid points per period (also used for p_L and c*_L)
    #[arg(long, default_value_t = 32)]
    grid_n: usize,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long = "T", default_value_t = 40.0)]
    t_final: f64,
    /// Tracked level, as a fraction of p0
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Domain half-width X (a multiple of L)
    #[arg(long = "X", default_value_t = 40.0)]
    half_width: f64,
    /// Step position; p_L to its right, zero to its left (default X - 1)
    #[arg(long)]
    start: Option<f64>,
    /// Store every n-th step
    #[arg(long, default_value_t = 100)]
    snapshot_every: usize,
    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    format: DumpFormat,
    /// Align snapshots with L/c*_L and report the pulsating residual over the last 8 time units
    #[arg(long)]
    pulsating: bool,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    /// Period L in (0, 1]; repeatable (default 1/8, 1/16, 1/32)
    #[arg(long = "L", value_parser = parse_period)]
    ls: Vec<f64>,
    /// Grid points per period
    #[arg(long, default_value_t = 16)]
    grid_n: usize,
    #[arg(long, default_value_t = 0.002)]
    dt: f64,
    #[arg(long = "T", default_value_t = 10.0)]
    t_final: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    preset: &'a str,
    subcommand: &'a Command,
    out: String,
    deterministic: bool,
    preset_spec: &'a kpp_core::preset::PresetSpec,
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
    Hypotheses(HypothesisReport),
    Rows(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn create(dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn check(report: HypothesisReport, fronts: bool) -> Result<(), Failure> {
    let ok = if fronts {
        report.all_passed()
    } else {
        report.stationary_passed()
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::Hypotheses(report))
    }
}

fn default_ls(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|k| 1.0 / f64::from(1u32 << k)).collect()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let preset = Preset::load(&cli.common.preset)?;
    let (a, r) = (preset.diffusion(), preset.reaction());
    let out = &cli.common.out;
    fs::create_dir_all(out)?;
    let manifest = Manifest {
        preset: &cli.common.preset,
        subcommand: &cli.command,
        out: out.display().to_string(),
        deterministic: true,
        preset_spec: preset.spec(),
    };
    let text = toml::to_string(&manifest).map_err(|e| std::io::Error::other(e.to_string()))?;
    fs::write(out.join("manifest.toml"), text)?;

    let report = validate_hypotheses(a, r);
    match &cli.command {
        Command::Means => {
            check(report, false)?;
            let m = MeanSet::compute(a, r)?;
            println!("<a>_A    = {}", m.a_arith);
            println!("<a>_H    = {}", m.a_harm);
            println!("<mu>_A   = {}", m.mu_arith);
            println!("p0       = {}", m.p0);
            println!("c*_hom   = {}", m.c_star_hom);
            let mut w = create(out, "means.csv")?;
            io::write_means(&mut w, &m)?;
            w.flush()?;
        }
        Command::SpeedSweep(args) => {
            check(report, true)?;
            let ls = if args.ls.is_empty() {
                default_ls(2, 7)
            } else {
                args.ls.clone()
            };
            let grid = PeriodicGrid::new(args.grid_n)?;
            let m = MeanSet::compute(a, r)?;
            let c_hom = homogenized_speed(&m);
            let lower = speed_lower_bound(a, &m);
            let rows = speed_sweep(a, r, &ls, grid);
            let mut w = create(out, "speed_sweep.csv")?;
            io::write_speed_sweep(&mut w, &rows, c_hom)?;
            w.flush()?;
            let mut failed = 0;
            for row in &rows {
                match &row.result {
                    Ok(s) => println!(
                        "L = {:<12} c* = {:<20} lambda* = {:<20} gap = {}{}",
                        row.l,
                        s.c_star,
                        s.lambda_star,
                        s.c_star - c_hom,
                        if s.c_star < lower - 1e-6 {
                            "  (below lower bound)"
                        } else {
                            ""
                        }
                    ),
                    Err(e) => {
                        failed += 1;
                        eprintln!("L = {}: {e}", row.l);
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Rows(failed));
            }
        }
        Command::SteadySweep(args) => {
            check(report, false)?;
            let ls = if args.ls.is_empty() {
                default_ls(3, 7)
            } else {
                args.ls.clone()
            };
            let grid = PeriodicGrid::new(args.grid_n)?;
            let m = MeanSet::compute(a, r)?;
            let rows = stationary_sweep(a, r, &ls, grid);
            let mut w = create(out, "steady_sweep.csv")?;
            io::write_steady_sweep(&mut w, &rows, m.p0)?;
            w.flush()?;
            let mut failed = 0;
            for row in &rows {
                match &row.result {
                    Ok(s) => println!(
                        "L = {:<12} min p = {:<20} max p = {:<20} |p - p0| = {}",
                        row.l,
                        s.min(),
                        s.max(),
                        s.sup_gap(m.p0)
                    ),
                    Err(e) => {
                        failed += 1;
                        eprintln!("L = {}: {e}", row.l);
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Rows(failed));
            }
        }
        Command::Simulate(args) => {
            check(report, true)?;
            let grid = PeriodicGrid::new(args.grid_n)?;
            let c_star = minimal_speed(a, r, args.l, grid)?.c_star;
            let mut cfg = SimulationConfig::new(args.l, args.half_width, args.t_final);
            cfg.cell_points = args.grid_n;
            cfg.dt = args.dt;
            cfg.theta = args.theta;
            cfg.initial = InitialCondition::Step {
                position: args.start.unwrap_or(args.half_width - 1.0),
            };
            cfg.snapshots = SnapshotPlan {
                every: args.snapshot_every,
                start: 0.0,
                region: None,
            };
            let window = (args.t_final - 8.0, args.t_final - 1.0);
            if args.pulsating {
                cfg.pulsating_speed = Some(c_star);
                cfg.snapshots = SnapshotPlan {
                    every: 1,
                    start: window.0.max(0.0),
                    region: Some((-0.5 * args.half_width, 0.5 * args.half_width + args.l)),
                };
            }
            let field = simulate(a, r, &cfg)?;
            let mut w = create(out, "trace.csv")?;
            io::write_trace(&mut w, &field)?;
            w.flush()?;
            match args.format {
                DumpFormat::Csv => {
                    let mut w = create(out, "space_time.csv")?;
                    io::write_space_time(&mut w, &field)?;
                    w.flush()?;
                }
                DumpFormat::Binary => {
                    let mut w = create(out, "space_time.bin")?;
                    io::write_grid_binary(&mut w, &field)?;
                    w.flush()?;
                }
                DumpFormat::None => {}
            }
            let est = measure_speed(&field)?;
            let rel = (est.c_measured - c_star) / c_star;
            let residual = if args.pulsating {
                Some(pulsating_residual_k(
                    &field,
                    args.l,
                    c_star,
                    1,
                    Some(window),
                )?)
            } else {
                None
            };
            println!("c*_L          = {c_star}");
            println!(
                "measured      = {} (fit on [{}, {}])",
                est.c_measured, est.fit_window.0, est.fit_window.1
            );
            println!("relative gap  = {rel}");
            if let Some(res) = residual {
                println!(
                    "pulsating residual over t in [{}, {}] = {res}",
                    window.0, window.1
                );
            }
            println!("monotone in t = {}", field.monotone_in_t);
            let mut w = create(out, "simulate.csv")?;
            writeln!(
                w,
                "L,c_star,c_measured,rel_gap,pulsating_residual,monotone_in_t"
            )?;
            writeln!(
                w,
                "{},{},{},{},{},{}",
                args.l,
                c_star,
                est.c_measured,
                rel,
                residual.map_or("NaN".to_string(), |v| v.to_string()),
                field.monotone_in_t
            )?;
            w.flush()?;
        }
        Command::Compare(args) => {
            check(report, true)?;
            let ls = if args.ls.is_empty() {
                default_ls(3, 5)
            } else {
                args.ls.clone()
            };
            let m = MeanSet::compute(a, r)?;
            let c = homogenized_speed(&m);
            let front = Arc::new(homogenized_front(
                &m,
                r,
                c,
                default_half_width(&m, r),
                DEFAULT_LINE_POINTS,
            )?);
            let mut w = create(out, "profile.csv")?;
            io::write_profile(&mut w, &front)?;
            w.flush()?;
            let settings = CompareSettings {
                cell_points: args.grid_n,
                dt: args.dt,
                t_final: args.t_final,
                theta: args.theta,
                ..CompareSettings::default()
            };
            let rows = {
                use rayon::prelude::*;
                ls.par_iter()
                    .map(|&l| compare_with_front(a, r, l, &front, &settings))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let mut w = create(out, "convergence.csv")?;
            io::write_convergence(&mut w, &rows)?;
            w.flush()?;
            for row in &rows {
                println!(
                    "L = {:<12} c = {:<20} s* = {:<20} distance = {}",
                    row.l, row.c_measured, row.phase_shift, row.distance
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Hypotheses(report)) => {
            eprintln!("error: preset violates the model hypotheses\n{report}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Rows(n)) => {
            eprintln!("error: {n} row(s) failed");
            ExitCode::from(1)
        }
    }
}
