use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use reactive_squeeze::sweep::config::{PhysicalSection, RunConfig};
use reactive_squeeze::sweep::output::{format_f64, write_rows, write_table_2d, Format};
use reactive_squeeze::sweep::{
    self, find_minimum, run_sweep, run_sweep_2d, Axis, OuterAxis, Quantity, SweepRow, SweepSpec,
};
use reactive_squeeze::{
    build_drift_matrix, derive_params, is_stable, momentum_variance, position_variance, solve_steady_state,
    PhysicalParams, QuadratureConfig, SqueezedBath, ThermalBath, VarianceBreakdown,
};

#[derive(Parser)]
#[command(version, about = "Momentum squeezing of a reactively coupled nano waveguide")]
struct Cli {
    /// TOML file with [physical], [quadrature] and [sweep] sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (directory for figure1/figure2); stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// ω-integral cutoff in units of ω_m
    #[arg(long, global = true, allow_negative_numbers = true)]
    cutoff: Option<f64>,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Physical overrides in figure units.
#[derive(Args)]
struct Overrides {
    /// Pump power in μW
    #[arg(long, global = true, allow_negative_numbers = true)]
    power: Option<f64>,
    /// Detuning in 2π × MHz
    #[arg(long, global = true, allow_negative_numbers = true)]
    detuning: Option<f64>,
    /// Bath temperature in mK
    #[arg(long, global = true, allow_negative_numbers = true)]
    temperature: Option<f64>,
    /// Squeezing parameter r
    #[arg(long = "squeeze-r", global = true, allow_negative_numbers = true)]
    squeeze_r: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    quantity: Option<Quantity>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the steady state for one configuration
    Steady,
    /// Print the variance breakdown for one configuration
    Variance {
        /// Position instead of momentum
        #[arg(long)]
        position: bool,
    },
    /// Sweep one parameter, optionally nested inside a second one
    Sweep {
        #[command(flatten)]
        args: SweepArgs,
        /// Outer axis as AXIS:START:STOP:POINTS, e.g. temperature:1:100:4
        #[arg(long, value_parser = parse_outer)]
        outer: Option<OuterAxis>,
    },
    /// Locate the minimum momentum variance along one axis
    Minimize(SweepArgs),
    /// Detuning curves at 1, 10, 50, 100 mK (20 μW, r = 1)
    Figure1 {
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Pump-power curves at 1 and 20 mK (Δ = ω_m, r = 1)
    Figure2 {
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
}

enum Outcome {
    Clean,
    RowFailures,
}

fn main() -> ExitCode {
    // usage errors share the validation exit code; 2 is reserved for flagged rows
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::RowFailures) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cli.cutoff {
        cfg.quadrature.cutoff_factor = c;
    }
    if let Some(t) = cli.rel_tol {
        cfg.quadrature.rel_tol = t;
    }
    cfg.quadrature.validate()?;
    let params = apply_overrides(&cfg.physical, &cli.overrides);
    params.validate()?;

    match &cli.command {
        Command::Steady => steady(cli, &params),
        Command::Variance { position } => variance(cli, &params, &cfg.quadrature, *position),
        Command::Sweep { args, outer: None } => {
            let spec = sweep_spec(&cfg, args, &params)?;
            let rows = run_sweep(&spec, &cfg.quadrature)?;
            emit_rows(cli, &rows)?;
            Ok(outcome(&rows))
        }
        Command::Sweep {
            args,
            outer: Some(outer),
        } => {
            let spec = sweep_spec(&cfg, args, &params)?;
            let table = run_sweep_2d(outer, &spec, &cfg.quadrature)?;
            let mut w = writer(cli.out.as_deref())?;
            write_table_2d(&table, cli.format, &mut w)?;
            w.flush()?;
            let rows: Vec<SweepRow> = table.into_iter().flat_map(|(_, r)| r).collect();
            Ok(outcome(&rows))
        }
        Command::Minimize(args) => {
            let spec = sweep_spec(&cfg, args, &params)?;
            let m = find_minimum(&spec, &cfg.quadrature)?;
            let record = json!({
                "axis": spec.axis,
                "axis_unit": spec.axis.unit(),
                "axis_value": m.axis_value,
                "breakdown": m.breakdown,
            });
            emit_record(
                cli,
                &record,
                &breakdown_csv(Some(("axis_value", m.axis_value)), &m.breakdown),
            )?;
            Ok(Outcome::Clean)
        }
        Command::Figure1 { points } => figure(cli, sweep::figure1_specs(&params, *points), &cfg.quadrature),
        Command::Figure2 { points } => figure(cli, sweep::figure2_specs(&params, *points), &cfg.quadrature),
    }
}

fn parse_outer(text: &str) -> Result<OuterAxis, String> {
    use clap::ValueEnum;
    let parts: Vec<&str> = text.split(':').collect();
    let [axis, start, stop, points] = parts[..] else {
        return Err("expected AXIS:START:STOP:POINTS".into());
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok(OuterAxis {
        axis: Axis::from_str(axis, true)?,
        start: num(start)?,
        stop: num(stop)?,
        points: points.parse().map_err(|e| format!("{points:?}: {e}"))?,
    })
}

fn apply_overrides(section: &PhysicalSection, o: &Overrides) -> PhysicalParams {
    let mut p = section.to_params();
    for (axis, value) in [
        (Axis::Power, o.power),
        (Axis::Detuning, o.detuning),
        (Axis::Temperature, o.temperature),
        (Axis::SqueezeR, o.squeeze_r),
    ] {
        if let Some(v) = value {
            axis.apply(&mut p, v);
        }
    }
    p
}

fn sweep_spec(cfg: &RunConfig, args: &SweepArgs, params: &PhysicalParams) -> Result<SweepSpec> {
    let base = cfg.sweep.as_ref();
    let axis = args
        .axis
        .or(base.map(|s| s.axis))
        .context("no sweep axis: pass --axis or add a [sweep] section")?;
    let spec = SweepSpec {
        axis,
        start: args.start.or(base.map(|s| s.start)).context("missing --start")?,
        stop: args.stop.or(base.map(|s| s.stop)).context("missing --stop")?,
        points: args.points.or(base.map(|s| s.points)).context("missing --points")?,
        fixed: *params,
        quantity: args
            .quantity
            .or(base.map(|s| s.quantity))
            .unwrap_or(Quantity::MomentumVariance),
    };
    spec.validate()?;
    Ok(spec)
}

fn outcome(rows: &[SweepRow]) -> Outcome {
    if rows.iter().any(SweepRow::failed) {
        Outcome::RowFailures
    } else {
        Outcome::Clean
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_rows(cli: &Cli, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(cli.out.as_deref())?;
    write_rows(rows, cli.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn emit_record(cli: &Cli, record: &serde_json::Value, csv_lines: &str) -> Result<()> {
    let mut w = writer(cli.out.as_deref())?;
    match cli.format {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(record)?)?,
        Format::Csv => write!(w, "{csv_lines}")?,
    }
    w.flush()?;
    Ok(())
}

fn breakdown_csv(lead: Option<(&str, f64)>, v: &VarianceBreakdown) -> String {
    let mut header = Vec::new();
    let mut values = Vec::new();
    if let Some((k, x)) = lead {
        header.push(k.to_owned());
        values.push(format_f64(x));
    }
    for (k, x) in [
        ("total", v.total),
        ("thermal_term", v.thermal_term),
        ("m_term", v.m_term),
        ("n_term", v.n_term),
        ("vacuum_term", v.vacuum_term),
        ("squeezing_percent", v.squeezing_percent),
        ("quad_error", v.estimated_quadrature_error),
    ] {
        header.push(k.to_owned());
        values.push(format_f64(x));
    }
    header.push("tolerance_met".into());
    values.push(v.tolerance_met.to_string());
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn steady(cli: &Cli, p: &PhysicalParams) -> Result<Outcome> {
    let d = derive_params(p)?;
    let ss = solve_steady_state(&d, p.detuning)?;
    let stable = is_stable(&build_drift_matrix(&d, &ss, p.detuning));
    let record = json!({
        "q_s": ss.q_s,
        "p_s": ss.p_s,
        "c_s_re": ss.c_s.re,
        "c_s_im": ss.c_s.im,
        "abs_c_s": ss.c_s.norm(),
        "all_real_roots": ss.all_real_roots,
        "multistable": ss.multistable,
        "linearization_valid": ss.linearization_valid,
        "stable": stable,
    });
    let roots: Vec<String> = ss.all_real_roots.iter().map(|&r| format_f64(r)).collect();
    let csv_lines = format!(
        "q_s,p_s,c_s_re,c_s_im,abs_c_s,all_real_roots,multistable,linearization_valid,stable\n{},{},{},{},{},{},{},{},{}\n",
        format_f64(ss.q_s),
        format_f64(ss.p_s),
        format_f64(ss.c_s.re),
        format_f64(ss.c_s.im),
        format_f64(ss.c_s.norm()),
        roots.join(";"),
        ss.multistable,
        ss.linearization_valid,
        stable
    );
    emit_record(cli, &record, &csv_lines)?;
    Ok(Outcome::Clean)
}

fn variance(cli: &Cli, p: &PhysicalParams, cfg: &QuadratureConfig, position: bool) -> Result<Outcome> {
    let d = derive_params(p)?;
    let ss = solve_steady_state(&d, p.detuning)?;
    let baths = (ThermalBath::from_params(&d), SqueezedBath::from_params(&d));
    let v = if position {
        position_variance(&d, &ss, p.detuning, (&baths.0, &baths.1), cfg)?
    } else {
        momentum_variance(&d, &ss, p.detuning, (&baths.0, &baths.1), cfg)?
    };
    emit_record(cli, &serde_json::to_value(v)?, &breakdown_csv(None, &v))?;
    Ok(if v.tolerance_met {
        Outcome::Clean
    } else {
        Outcome::RowFailures
    })
}

fn figure(cli: &Cli, specs: Vec<(String, SweepSpec)>, cfg: &QuadratureConfig) -> Result<Outcome> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut result = Outcome::Clean;
    for (name, spec) in specs {
        let rows = run_sweep(&spec, cfg)?;
        let path = dir.join(format!("{name}.{ext}"));
        let mut w = writer(Some(&path))?;
        write_rows(&rows, cli.format, &mut w)?;
        w.flush()?;
        let best = rows
            .iter()
            .filter_map(|r| r.total.map(|t| (r.axis_value, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((x, t)) => eprintln!("{}: min <dP^2> = {t:.4} at {x:.4} {}", path.display(), spec.axis.unit()),
            None => eprintln!("{}: no stable points", path.display()),
        }
        if matches!(outcome(&rows), Outcome::RowFailures) {
            result = Outcome::RowFailures;
        }
    }
    Ok(result)
}
