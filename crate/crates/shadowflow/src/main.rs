//! `shadowflow`: simulate and verify the reduced bubble-concentration flows.

use clap::{Args, Parser, Subcommand};
use shadowflow::config::{RunConfig, Scenario};
use shadowflow::report::{write_trajectory_csv, ScenarioReport};
use shadowflow::scenarios::{run_scenario, verify_batteries};
use shadowflow_core::coeffs::{
    bubble_constant_with_error, make_coefficients, CoefficientOverrides, ConstantKind,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "shadowflow",
    version,
    about = "Reduced bubble-flow simulator and verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a canned scenario and write its trajectory and verdicts.
    Run(RunArgs),
    /// Randomized inequality batteries (and optional Monte-Carlo integrals).
    Verify(VerifyArgs),
    /// Print the bubble constants with quadrature error estimates.
    Constants,
    /// Run a scenario over a one-parameter grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// divergence | compactified | mixed | off_max | tower
    scenario: String,
    /// Configuration file (scenario defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the compactified field (equivalent to the compactified scenario
    /// for escape initial data).
    #[arg(long)]
    modified: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for trajectory CSVs and the summary JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also run the Monte-Carlo interaction and constant estimates.
    #[arg(long)]
    interactions: bool,
    /// Sample count for the Monte-Carlo estimates.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Parameter to vary, written section.key (e.g. coefficients.gamma4).
    #[arg(long)]
    param: String,
    /// Grid spec: lin:lo:hi:n or log:lo:hi:n.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario when no config file names one.
    #[arg(long, default_value = "divergence")]
    scenario: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<bool, String> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Constants => cmd_constants(),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn load_config(path: &Option<PathBuf>, scenario: Option<Scenario>) -> Result<RunConfig, String> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            RunConfig::parse(&text, scenario).map_err(|e| e.to_string())
        }
        None => {
            let sc = scenario.ok_or("no scenario given")?;
            Ok(RunConfig::default_for(sc))
        }
    }
}

fn write_report(report: &ScenarioReport, out: &Option<PathBuf>, stem: &str) -> Result<(), String> {
    print!("{}", report.render_lines());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        let path = dir.join(format!("{stem}_summary.json"));
        std::fs::write(&path, report.to_json()).map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<bool, String> {
    let mut scenario = Scenario::parse(&args.scenario).map_err(|e| e.to_string())?;
    if args.modified && scenario == Scenario::Divergence {
        scenario = Scenario::Compactified;
    }
    let mut cfg = load_config(&args.config, Some(scenario))?;
    cfg.scenario.scenario = scenario;
    if args.modified {
        cfg.scenario.modified = true;
    }
    if let Some(seed) = args.seed {
        cfg.scenario.seed = seed;
    }
    let mut run = run_scenario(&cfg).map_err(|e| e.to_string())?;
    if !run.report.self_validate() {
        return Err("internal: report failed self-validation (unnamed check)".to_string());
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        let traj_path = dir.join(format!("{}_trajectory.csv", scenario.name()));
        write_trajectory_csv(&run.trajectory, cfg.field.n, &traj_path)
            .map_err(|e| e.to_string())?;
        run.report
            .trajectory_files
            .push(traj_path.display().to_string());
        if let Some(twin) = &run.twin {
            let twin_path = dir.join("unmodified_twin_trajectory.csv");
            write_trajectory_csv(twin, cfg.field.n, &twin_path).map_err(|e| e.to_string())?;
            run.report
                .trajectory_files
                .push(twin_path.display().to_string());
        }
    }
    write_report(&run.report, &args.out, scenario.name())?;
    Ok(run.report.all_pass())
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, String> {
    let mut cfg = RunConfig::default_for(Scenario::Divergence);
    cfg.scenario.seed = args.seed;
    let mut report = verify_batteries(&cfg, args.trials).map_err(|e| e.to_string())?;
    if args.interactions {
        run_mc_checks(&mut report, args.samples, args.seed)?;
    }
    if !report.self_validate() {
        return Err("internal: report failed self-validation".to_string());
    }
    write_report(&report, &args.out, "verify")?;
    Ok(report.all_pass())
}

fn run_mc_checks(report: &mut ScenarioReport, samples: usize, seed: u64) -> Result<(), String> {
    use shadowflow::quadverify::{
        constant_consistency, verify_constant, verify_interaction, BubbleSpec,
    };
    for kind in [
        ConstantKind::C1,
        ConstantKind::C2,
        ConstantKind::C3,
        ConstantKind::B1,
    ] {
        let est = verify_constant(kind, 5, samples, seed).map_err(|e| e.to_string())?;
        let (sigmas, quad) = constant_consistency(kind, 5, &est);
        report.push(shadowflow::Check::new(
            &format!("mc_constant_{}", kind.name()),
            &format!(
                "Monte-Carlo estimate {:.6} +- {:.1e} agrees with quadrature {:.6} within 3 \
                 standard errors (5 flags an implementation inconsistency)",
                est.value, est.std_err, quad
            ),
            sigmas <= 3.0,
            sigmas,
            3.0,
        ));
    }
    // Interaction estimate at eps = 0.01 (equal scales, separated centers).
    let base: f64 = 0.01f64.powf(-2.0 / 3.0);
    let d = ((base - 2.0).sqrt()) / 100.0;
    let i = BubbleSpec {
        center: shadowflow_core::chart::from_coords(&[0.5 * d]),
        lambda: 100.0,
    };
    let j = BubbleSpec {
        center: shadowflow_core::chart::from_coords(&[-0.5 * d]),
        lambda: 100.0,
    };
    let (est, ratio) = verify_interaction(&i, &j, 5, samples, seed).map_err(|e| e.to_string())?;
    report.push(shadowflow::Check::new(
        "mc_interaction_ratio",
        &format!(
            "importance-sampled interaction integral ({:.4e} +- {:.1e}) over b1*eps stays \
             within [0.9, 1.1]",
            est.value, est.std_err
        ),
        (0.9..=1.1).contains(&ratio),
        ratio,
        1.1,
    ));
    Ok(())
}

fn cmd_constants() -> Result<bool, String> {
    println!("constant  n  value               quad_err   ");
    for n in [3usize, 4, 5] {
        for kind in [
            ConstantKind::C1,
            ConstantKind::C2,
            ConstantKind::C3,
            ConstantKind::B1,
        ] {
            let (v, err) = bubble_constant_with_error(kind, n, 1e-12).map_err(|e| e.to_string())?;
            println!("{:<9} {}  {:<18.12}  {:.2e}", kind.name(), n, v, err);
        }
        let coeffs =
            make_coefficients(n, &CoefficientOverrides::default()).map_err(|e| e.to_string())?;
        println!(
            "kappa     {}  {:<18.12}  (4n(n-1) c1^(2/n))",
            n, coeffs.kappa
        );
    }
    Ok(true)
}

fn cmd_sweep(args: SweepArgs) -> Result<bool, String> {
    let grid = parse_grid(&args.grid)?;
    let scenario = Scenario::parse(&args.scenario).map_err(|e| e.to_string())?;
    let base = load_config(&args.config, Some(scenario))?;
    let mut results: Vec<Option<(f64, ScenarioReport, bool)>> = vec![None; grid.len()];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (idx, &value) in grid.iter().enumerate() {
            let mut cfg = base.clone();
            let param = args.param.clone();
            handles.push((
                idx,
                scope.spawn(move || -> Result<(f64, ScenarioReport, bool), String> {
                    cfg.set(&param, &format!("{value}"))
                        .map_err(|e| e.to_string())?;
                    let run = run_scenario(&cfg).map_err(|e| e.to_string())?;
                    let pass = run.report.all_pass();
                    Ok((value, run.report, pass))
                }),
            ));
        }
        for (idx, h) in handles {
            match h.join() {
                Ok(Ok(r)) => results[idx] = Some(r),
                Ok(Err(e)) => eprintln!("grid point {idx}: {e}"),
                Err(_) => eprintln!("grid point {idx}: worker panicked"),
            }
        }
    });
    let mut all_pass = true;
    let mut summary = Vec::new();
    for r in results.into_iter().flatten() {
        let (value, report, pass) = r;
        println!(
            "--- {} = {value} => {}",
            args.param,
            if pass { "PASS" } else { "FAIL" }
        );
        print!("{}", report.render_lines());
        all_pass &= pass;
        summary.push(serde_json::json!({
            "param": args.param,
            "value": value,
            "pass": pass,
            "report": serde_json::from_str::<serde_json::Value>(&report.to_json()).unwrap(),
        }));
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        let path: &Path = &dir.join("sweep_summary.json");
        std::fs::write(path, serde_json::to_string_pretty(&summary).unwrap())
            .map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    Ok(all_pass)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err("grid spec must be lin:lo:hi:n or log:lo:hi:n".to_string());
    }
    let lo: f64 = parts[1].parse().map_err(|_| "bad grid lower bound")?;
    let hi: f64 = parts[2].parse().map_err(|_| "bad grid upper bound")?;
    let count: usize = parts[3].parse().map_err(|_| "bad grid count")?;
    if count < 1 {
        return Err("grid needs at least one point".to_string());
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let t = if count == 1 {
            0.0
        } else {
            k as f64 / (count - 1) as f64
        };
        let v = match parts[0] {
            "lin" => lo + t * (hi - lo),
            "log" => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
            _ => return Err("grid spec must start with lin or log".to_string()),
        };
        out.push(v);
    }
    Ok(out)
}
