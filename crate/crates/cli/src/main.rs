mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sinmin_core::catalog::{default_family, parse_subject, FamilyDescriptor, SolutionFamily};
use sinmin_core::exec::Execution;
use sinmin_core::export::{to_csv, to_obj};
use sinmin_core::ode::{closed_form_for, compare, rk4_integrate, EquationId, ReducedOde};
use sinmin_core::verify::{run_suite, select, GridSpec, RunSettings, Summary};

const ROUND_TRIP_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "sinmin",
    version,
    about = "Verify minimal graph surfaces under semi-symmetric connections"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and write one JSON report per subject plus summary.json.
    Verify(VerifyArgs),
    /// Sample a catalog family on a grid and write an OBJ mesh or CSV table.
    Sample(SampleArgs),
    /// Integrate a reduced ODE with RK4 and compare with its closed form.
    Ode(OdeArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite names or subject globs, comma separated (all, thm1..thm6, prop1, prop2, scherk, oracle, ode, ...).
    #[arg(long)]
    suite: Vec<String>,
    /// Grid resolution NxM for family sweeps.
    #[arg(long)]
    grid: Option<String>,
    /// Chart box s0,s1,t0,t1 replacing every family's default box.
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    /// Tolerance override for every residual check.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (falls back to the config file, then SINMIN_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; only json is produced.
    #[arg(long)]
    format: Option<String>,
    /// TOML config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall-clock durations in the reports.
    #[arg(long)]
    timing: bool,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Obj,
    Csv,
}

#[derive(Args)]
struct SampleArgs {
    /// Catalog subject such as thm1/case1.
    subject: Option<String>,
    /// Family descriptor JSON instead of a catalog subject.
    #[arg(long)]
    descriptor: Option<PathBuf>,
    #[arg(long, default_value = "30x30")]
    grid: String,
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long, value_enum, default_value = "obj")]
    format: SampleFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OdeArgs {
    /// Equation id, e.g. E31.
    equation: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    /// Integration constant of the first-order forms E22 and E44.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Initial state x0,u0,w0.
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    #[arg(long, allow_hyphen_values = true)]
    end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Fail {
    Config(String),
    Run(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Sample(a) => cmd_sample(a),
        Cmd::Ode(a) => cmd_ode(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
    }
}

fn file_stem(subject: &str) -> String {
    subject
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Fail> {
    fs::create_dir_all(dir).map_err(|e| Fail::Run(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Fail::Run(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Fail> {
    let file = match &a.config {
        Some(p) => config::load(p).map_err(Fail::Config)?,
        None => config::FileConfig::default(),
    };
    let suites: Vec<String> = if !a.suite.is_empty() {
        a.suite.iter().flat_map(|s| config::split_list(s)).collect()
    } else {
        file.suite
            .map(|s| s.into_vec())
            .unwrap_or_else(|| vec!["all".to_string()])
    };
    let grid = match a.grid.as_deref().or(file.grid.as_deref()) {
        Some(g) => Some(config::parse_grid(g).map_err(Fail::Config)?),
        None => None,
    };
    let bbox = match a.bbox.as_deref() {
        Some(b) => Some(config::parse_box(b).map_err(Fail::Config)?),
        None => file.bbox,
    };
    if let Some(b) = bbox {
        GridSpec::new(b, 2, 2, 0.0).map_err(|e| Fail::Config(e.to_string()))?;
    }
    let tol = a.tol.or(file.tol);
    if tol.is_some_and(|t| t.is_nan() || t < 0.0) {
        return Err(Fail::Config("tolerance must be non-negative".into()));
    }
    let format = a.format.or(file.format).unwrap_or_else(|| "json".into());
    if format != "json" {
        return Err(Fail::Config(format!(
            "verify writes json reports; format '{format}' is not supported"
        )));
    }
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let out = config::output_dir(a.out, file.out);
    let items = select(&suites).map_err(|e| Fail::Config(e.to_string()))?;
    let settings = RunSettings {
        resolution: grid,
        bbox,
        tol,
        seed,
        exec: if a.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
        timing: a.timing || file.timing.unwrap_or(false),
        ..RunSettings::default()
    };

    let reports = run_suite(&items, &settings);
    for r in &reports {
        write(&out, &format!("{}.json", file_stem(&r.subject)), &(r.to_json() + "\n"))?;
        let failed = |gating: bool| -> Vec<&str> {
            r.checks
                .iter()
                .filter(|c| !c.pass && c.gating == gating)
                .map(|c| c.name.as_str())
                .collect()
        };
        let mut line = format!(
            "{} {} max={:e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.subject,
            r.max_residual
        );
        if !failed(true).is_empty() {
            line += &format!(" failed: {}", failed(true).join(", "));
        }
        if !failed(false).is_empty() {
            line += &format!(" advisory: {}", failed(false).join(", "));
        }
        println!("{line}");
    }
    let summary = Summary::from_reports(&reports, seed);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write(&out, "summary.json", &(text + "\n"))?;
    println!(
        "{} passed, {} failed; reports in {}",
        summary.passed,
        summary.failed,
        out.display()
    );
    Ok(summary.pass)
}

fn cmd_sample(a: SampleArgs) -> Result<bool, Fail> {
    let fam: SolutionFamily = match (&a.subject, &a.descriptor) {
        (Some(s), None) => {
            let (t, c) = parse_subject(s).map_err(|e| Fail::Config(e.to_string()))?;
            default_family(t, c).map_err(|e| Fail::Run(e.to_string()))?
        }
        (None, Some(p)) => {
            let text = fs::read_to_string(p).map_err(|e| Fail::Config(format!("cannot read {}: {e}", p.display())))?;
            let d: FamilyDescriptor =
                serde_json::from_str(&text).map_err(|e| Fail::Config(format!("{}: {e}", p.display())))?;
            SolutionFamily::from_descriptor(&d).map_err(|e| Fail::Run(e.to_string()))?
        }
        _ => return Err(Fail::Config("give either a subject or --descriptor".into())),
    };
    let fam = match a.bbox.as_deref() {
        Some(b) => fam
            .with_box(config::parse_box(b).map_err(Fail::Config)?)
            .map_err(|e| Fail::Config(e.to_string()))?,
        None => fam,
    };
    let (n, m) = config::parse_grid(&a.grid).map_err(Fail::Config)?;
    let grid = GridSpec::new(fam.bbox, n, m, 0.0).map_err(|e| Fail::Config(e.to_string()))?;
    let (export, ext) = match a.format {
        SampleFormat::Obj => (to_obj(&fam, &grid), "obj"),
        SampleFormat::Csv => (to_csv(&fam, &grid), "csv"),
    };
    let export = export.map_err(|e| Fail::Run(e.to_string()))?;
    let out = config::output_dir(a.out, None);
    let path = write(&out, &format!("{}.{ext}", file_stem(&fam.subject())), &export.text)?;
    let unit = if ext == "obj" { "cells" } else { "points" };
    eprintln!(
        "{}: {} vertices, {} faces, {} skipped {unit}",
        path.display(),
        export.vertices,
        export.faces,
        export.skipped
    );
    Ok(true)
}

fn cmd_ode(a: OdeArgs) -> Result<bool, Fail> {
    let id: EquationId = a
        .equation
        .parse()
        .map_err(|e: sinmin_core::Error| Fail::Config(e.to_string()))?;
    let ode = ReducedOde::new(id, a.a, a.b, a.c)
        .map_err(|e| Fail::Config(e.to_string()))?
        .with_lambda(a.lambda);
    let [x0, u0, w0] = config::parse_floats::<3>(&a.init, "init").map_err(Fail::Config)?;
    let init = (x0, u0, w0);
    let out = config::output_dir(a.out, None);
    let csv_name = format!("{id}.csv");
    let traj = match rk4_integrate(&ode, init, a.end, a.step) {
        Ok(t) => t,
        Err(f) => {
            let path = write(&out, &csv_name, &f.partial.to_csv())?;
            eprintln!("partial trajectory written to {}", path.display());
            return Err(Fail::Run(f.to_string()));
        }
    };
    let path = write(&out, &csv_name, &traj.to_csv())?;
    println!("{} samples written to {}", traj.samples.len(), path.display());
    match closed_form_for(&ode, init).map_err(|e| Fail::Run(e.to_string()))? {
        Some(cf) => {
            let rt = compare(&traj, &cf);
            let text = serde_json::to_string_pretty(&rt).expect("round trip serializes");
            write(&out, &format!("{id}-roundtrip.json"), &(text + "\n"))?;
            println!(
                "closed form {}: endpoint error {:e}, max error {:e}",
                rt.closed_form, rt.endpoint_error, rt.max_error
            );
            Ok(rt.endpoint_error <= ROUND_TRIP_TOL)
        }
        None => {
            println!("no paired closed form through this initial state");
            Ok(true)
        }
    }
}
