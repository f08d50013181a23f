//! Command-line surface. Every subcommand reads one configuration file and
//! writes a self-describing run directory (`config.echo`, `summary.txt`,
//! CSV logs, exported fields).
//!
//! Exit codes: 0 on success, 1 when a verification criterion is not met,
//! 2 on configuration/validation errors, 3 on solver divergence or
//! stagnation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use crate::assimilation::{
    default_admissible_radius, AdmissibleSet, Assimilator, OptimizerParams, StateModel,
};
use crate::config::{echo_config, parse_config, ExperimentConfig, ProfileSpec, RhoSpec};
use crate::cost::CostConfig;
use crate::error::{Error, Result};
use crate::force::BodyForce;
use crate::mesh::{build_channel_mesh, load_mesh, save_mesh, validate_mesh, Mesh};
use crate::navier::{
    contraction_amplitude_sweep, solve_navier_stokes_with, PicardParams, PicardReport,
};
use crate::report::{fmt, fmt_opt, RunDir};
use crate::space::{build_taylor_hood, ControlProfile, FESpace};
use crate::stokes::{solve_stokes, stokes_residual, verify_stokes_estimate, EstimateCase};
use crate::synthetic::{
    generate_measurements, make_profile, random_force, random_profile, InletComponents,
};

#[derive(Parser, Debug)]
#[command(name = "inflow", version, about = "Steady channel flow solver and inlet-profile estimation")]
pub struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output run directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress progress output.
    #[arg(long, global = true, default_value_t = false)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate or validate a channel mesh.
    Mesh {
        #[arg(value_enum)]
        action: MeshAction,
    },
    /// Solve the flow for the configured inlet profile.
    Solve {
        #[arg(value_enum)]
        model: SolveModel,
    },
    /// Recover the inlet profile from measurements (twin experiment when no
    /// measurement file is configured).
    Assimilate,
    /// Run a verification check and report pass/fail.
    Verify {
        #[arg(value_enum)]
        check: VerifyCheck,
    },
    /// Solve over an amplitude x viscosity grid.
    Sweep {
        /// Concurrent workers.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MeshAction {
    Generate,
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SolveModel {
    Stokes,
    Ns,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum VerifyCheck {
    Estimates,
    Contraction,
    Gradient,
    Convexity,
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            let (prefix, code) = classify(&e);
            eprintln!("error[{prefix}]: {e}");
            code
        }
    }
}

fn classify(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Divergence { .. } | Error::Stagnation { .. } | Error::Singular(_) => ("solver", 3),
        Error::Io(_) => ("io", 2),
        _ => ("config", 2),
    }
}

struct Context {
    cfg: ExperimentConfig,
    run: RunDir,
    quiet: bool,
}

impl Context {
    fn status(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }

    fn mesh(&self) -> Result<Mesh> {
        match &self.cfg.mesh.path {
            Some(path) => load_mesh(path),
            None => build_channel_mesh(
                self.cfg.mesh.length,
                self.cfg.mesh.height,
                self.cfg.mesh.nx,
                self.cfg.mesh.ny,
                self.cfg.mesh.stenosis,
            ),
        }
    }

    fn profile(&self, space: &FESpace, spec: &ProfileSpec) -> Result<ControlProfile> {
        match spec.kind {
            None => Ok(ControlProfile::zero(space)),
            Some(kind) => {
                let comps = if spec.tangential == 0.0 {
                    InletComponents::Normal
                } else {
                    InletComponents::Tilted {
                        tangential: spec.tangential,
                    }
                };
                make_profile(space, kind, spec.amplitude, comps)
            }
        }
    }

    fn picard(&self) -> PicardParams {
        PicardParams {
            tolerance: self.cfg.solver.tolerance,
            max_iterations: self.cfg.solver.max_iterations,
            damping: self.cfg.solver.damping,
            ..PicardParams::default()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config_path = cli.config.as_ref().ok_or_else(|| Error::Config {
        key: "--config".into(),
        line: None,
        message: "missing required flag".into(),
    })?;
    let out = cli.out.as_ref().ok_or_else(|| Error::Config {
        key: "--out".into(),
        line: None,
        message: "missing required flag".into(),
    })?;
    let mut cfg = parse_config(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let run = RunDir::create(out)?;
    run.write_text("config.echo", &echo_config(&cfg))?;
    let ctx = Context {
        cfg,
        run,
        quiet: cli.quiet,
    };

    match &cli.command {
        Command::Mesh { action } => cmd_mesh(&ctx, *action),
        Command::Solve { model } => cmd_solve(&ctx, *model),
        Command::Assimilate => cmd_assimilate(&ctx),
        Command::Verify { check } => cmd_verify(&ctx, *check),
        Command::Sweep { workers } => cmd_sweep(&ctx, *workers),
    }
}

fn picard_summary(summary: &mut BTreeMap<String, String>, report: &PicardReport) {
    summary.insert(
        "picard_iterations".into(),
        report.iterations.len().to_string(),
    );
    summary.insert("converged".into(), report.converged.to_string());
    summary.insert("ns_residual".into(), fmt(report.final_residual));
    summary.insert(
        "max_contraction_ratio".into(),
        fmt_opt(report.max_ratio()),
    );
}

fn picard_csv(run: &RunDir, report: &PicardReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .iterations
        .iter()
        .enumerate()
        .map(|(k, it)| {
            vec![
                (k + 1).to_string(),
                fmt(it.update_h1),
                fmt(it.update_l32),
                fmt_opt(it.ratio),
                fmt(it.residual),
            ]
        })
        .collect();
    run.write_csv(
        "iterations.csv",
        &[
            "iteration",
            "update_h1",
            "update_l32",
            "contraction_ratio",
            "ns_residual",
        ],
        &rows,
    )
}

fn cmd_mesh(ctx: &Context, action: MeshAction) -> Result<i32> {
    let mesh = match action {
        MeshAction::Generate => ctx.mesh()?,
        MeshAction::Validate => {
            let path = ctx.cfg.mesh.path.as_ref().ok_or_else(|| Error::Config {
                key: "mesh.path".into(),
                line: None,
                message: "mesh validation needs a mesh file path".into(),
            })?;
            load_mesh(path)?
        }
    };
    let report = validate_mesh(&mesh);
    save_mesh(&mesh, ctx.run.file("mesh.txt"))?;

    let mut summary = BTreeMap::new();
    summary.insert("nodes".into(), mesh.num_nodes().to_string());
    summary.insert("triangles".into(), mesh.num_triangles().to_string());
    summary.insert("edges".into(), mesh.unique_edges().len().to_string());
    summary.insert("area".into(), fmt(mesh.total_area()));
    for (tag, name) in [
        (crate::mesh::BoundaryTag::In, "inlet_edges"),
        (crate::mesh::BoundaryTag::Wall, "wall_edges"),
        (crate::mesh::BoundaryTag::Out, "outlet_edges"),
    ] {
        summary.insert(name.into(), mesh.count_tags(tag).to_string());
    }
    summary.insert("valid".into(), report.is_valid().to_string());
    summary.insert("findings".into(), report.findings.len().to_string());
    ctx.run.write_summary(&summary)?;
    if !report.findings.is_empty() {
        let text: String = report
            .findings
            .iter()
            .map(|f| format!("{f}\n"))
            .collect();
        ctx.run.write_text("findings.txt", &text)?;
    }
    ctx.status(&format!(
        "mesh: {} nodes, {} triangles, {} finding(s)",
        mesh.num_nodes(),
        mesh.num_triangles(),
        report.findings.len()
    ));
    Ok(0)
}

fn cmd_solve(ctx: &Context, model: SolveModel) -> Result<i32> {
    let mesh = ctx.mesh()?;
    let space = build_taylor_hood(&mesh)?;
    let inlet = ctx.profile(&space, &ctx.cfg.inlet)?;
    let force = ctx.cfg.force.instantiate();
    save_mesh(&mesh, ctx.run.file("mesh.txt"))?;

    let mut summary = BTreeMap::new();
    summary.insert("model".into(), format!("{model:?}").to_lowercase());
    summary.insert("viscosity".into(), fmt(ctx.cfg.viscosity));

    match model {
        SolveModel::Stokes => {
            let field = solve_stokes(&space, ctx.cfg.viscosity, &inlet, force.as_ref())?;
            let residual =
                stokes_residual(&space, ctx.cfg.viscosity, &field, &inlet, force.as_ref())?;
            summary.insert("stokes_residual".into(), fmt(residual));
            summary.insert(
                "weak_divergence_max".into(),
                fmt(space.weak_divergence_max(&field.u)),
            );
            summary.insert("velocity_h1".into(), fmt(space.h1_norm_sq(&field.u).sqrt()));
            crate::vtk::export_field(&space, &field, ctx.run.file("field.vtk"))?;
            ctx.run.write_summary(&summary)?;
            ctx.status(&format!("stokes solve done, residual {residual:.3e}"));
            Ok(0)
        }
        SolveModel::Ns => {
            let params = ctx.picard();
            let op = crate::stokes::StokesOperator::new(&space, ctx.cfg.viscosity)?;
            match solve_navier_stokes_with(&op, &inlet, force.as_ref(), &params) {
                Ok((field, report)) => {
                    picard_summary(&mut summary, &report);
                    summary.insert(
                        "weak_divergence_max".into(),
                        fmt(space.weak_divergence_max(&field.u)),
                    );
                    summary.insert("velocity_h1".into(), fmt(space.h1_norm_sq(&field.u).sqrt()));
                    picard_csv(&ctx.run, &report)?;
                    crate::vtk::export_field(&space, &field, ctx.run.file("field.vtk"))?;
                    ctx.run.write_summary(&summary)?;
                    ctx.status(&format!(
                        "navier-stokes solve converged in {} sweeps",
                        report.iterations.len()
                    ));
                    Ok(0)
                }
                Err(Error::Divergence { report }) => {
                    picard_summary(&mut summary, &report);
                    picard_csv(&ctx.run, &report)?;
                    ctx.run.write_summary(&summary)?;
                    Err(Error::Divergence { report })
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn resolve_ball(ctx: &Context, space: &FESpace, force: &dyn BodyForce) -> Result<AdmissibleSet> {
    let radius = match ctx.cfg.rho {
        RhoSpec::Fixed(r) => r,
        RhoSpec::Auto => {
            let r = default_admissible_radius(space, ctx.cfg.viscosity, force, ctx.cfg.seed)?;
            ctx.status(&format!("calibrated admissible radius: {r:.4}"));
            r
        }
    };
    AdmissibleSet::new(radius)
}

fn cmd_assimilate(ctx: &Context) -> Result<i32> {
    let mesh = ctx.mesh()?;
    let space = build_taylor_hood(&mesh)?;
    let force = ctx.cfg.force.instantiate();
    save_mesh(&mesh, ctx.run.file("mesh.txt"))?;
    let omega = ctx.cfg.cost.omega_part.resolve(&mesh)?;

    let data = match &ctx.cfg.measurements_path {
        Some(path) => crate::cost::load_measurements(path)?,
        None => {
            // twin experiment: synthesize measurements from the configured
            // ground truth
            let gstar = ctx.profile(&space, &ctx.cfg.twin)?;
            let set = generate_measurements(
                &space,
                ctx.cfg.viscosity,
                &gstar,
                force.as_ref(),
                &omega,
                ctx.cfg.noise_sigma,
                ctx.cfg.seed,
                &ctx.picard(),
            )?;
            crate::cost::save_measurements(&set, ctx.run.file("measurements.txt"))?;
            set
        }
    };

    let cost_config = CostConfig {
        beta1: ctx.cfg.cost.beta1,
        beta2: ctx.cfg.cost.beta2,
        beta3: ctx.cfg.cost.beta3,
        omega_part: omega,
    };
    let ball = resolve_ball(ctx, &space, force.as_ref())?;
    let assimilator = Assimilator::new(
        &space,
        ctx.cfg.viscosity,
        force.as_ref(),
        cost_config,
        &data,
        ball,
    )?;
    let g0 = ctx.profile(&space, &ctx.cfg.init)?;
    if !ball.contains(&g0) {
        return Err(Error::InvalidParameter(format!(
            "initial control is infeasible: norm {} exceeds the admissible radius {}",
            g0.h01_norm_sq().sqrt(),
            ball.radius
        )));
    }
    let params = OptimizerParams {
        max_iterations: ctx.cfg.optimizer.max_iterations,
        gradient_tolerance: ctx.cfg.optimizer.gradient_tolerance,
        armijo_sigma: ctx.cfg.optimizer.armijo_sigma,
        step_shrink: ctx.cfg.optimizer.step_shrink,
        initial_step: ctx.cfg.optimizer.initial_step,
        state: StateModel::NavierStokes,
        picard: ctx.picard(),
        max_halvings: 30,
    };

    let write_outputs = |report: &crate::assimilation::AssimilationReport| -> Result<()> {
        let rows: Vec<Vec<String>> = report
            .iterations
            .iter()
            .enumerate()
            .map(|(k, it)| {
                vec![
                    (k + 1).to_string(),
                    fmt(it.cost),
                    fmt(it.misfit),
                    fmt(it.control_l2),
                    fmt(it.control_h1),
                    fmt(it.gradient_norm),
                    fmt(it.step),
                    it.projection_active.to_string(),
                ]
            })
            .collect();
        ctx.run.write_csv(
            "iterations.csv",
            &[
                "iteration",
                "cost",
                "misfit",
                "control_l2",
                "control_h1",
                "gradient_norm",
                "step",
                "projection_active",
            ],
            &rows,
        )?;
        let g = &report.final_control;
        let mut control = String::new();
        for k in 0..g.len() {
            control.push_str(&format!(
                "{} {} {}\n",
                g.params()[k],
                g.x_values()[k],
                g.y_values()[k]
            ));
        }
        ctx.run.write_text("control.txt", &control)?;

        let mut summary = BTreeMap::new();
        summary.insert("initial_cost".into(), fmt(report.initial_cost));
        summary.insert(
            "final_cost".into(),
            fmt(report
                .iterations
                .last()
                .map_or(report.initial_cost, |it| it.cost)),
        );
        summary.insert("iterations".into(), report.iterations.len().to_string());
        summary.insert("converged".into(), report.converged.to_string());
        summary.insert("admissible_radius".into(), fmt(ball.radius));
        summary.insert(
            "final_control_norm".into(),
            fmt(report.final_control.h01_norm_sq().sqrt()),
        );
        if let Some(rec) = &report.recovery {
            summary.insert("recovery_error_rel".into(), fmt(rec.control_error_rel));
            summary.insert("cost_reduction".into(), fmt(rec.cost_reduction));
        }
        summary.insert(
            "divergence_encountered".into(),
            report.divergence_encountered.to_string(),
        );
        if report.divergence_encountered {
            eprintln!(
                "warning: the admissible radius {} admits controls outside the \
                 convergent regime of the state solver",
                ball.radius
            );
        }
        ctx.run.write_summary(&summary)?;
        Ok(())
    };

    match assimilator.assimilate(&g0, &params) {
        Ok(report) => {
            write_outputs(&report)?;
            let (_, field, _) = assimilator.reduced_cost(
                &report.final_control,
                &params.picard,
                params.state,
            )?;
            crate::vtk::export_field(&space, &field, ctx.run.file("field.vtk"))?;
            ctx.status(&format!(
                "assimilation finished after {} iterations",
                report.iterations.len()
            ));
            Ok(0)
        }
        Err(Error::Stagnation { message, report }) => {
            write_outputs(&report)?;
            Err(Error::Stagnation { message, report })
        }
        Err(e) => Err(e),
    }
}

fn cmd_verify(ctx: &Context, check: VerifyCheck) -> Result<i32> {
    let mesh = ctx.mesh()?;
    let space = build_taylor_hood(&mesh)?;
    let force = ctx.cfg.force.instantiate();
    let mut summary = BTreeMap::new();
    let pass = match check {
        VerifyCheck::Estimates => verify_estimates(ctx, &space, &mut summary)?,
        VerifyCheck::Contraction => verify_contraction(ctx, &space, force.as_ref(), &mut summary)?,
        VerifyCheck::Gradient => verify_gradient(ctx, &space, force.as_ref(), &mut summary)?,
        VerifyCheck::Convexity => verify_convexity(ctx, &space, force.as_ref(), &mut summary)?,
    };
    summary.insert("pass".into(), pass.to_string());
    ctx.run.write_summary(&summary)?;
    ctx.status(&format!(
        "verify {:?}: {}",
        check,
        if pass { "pass" } else { "FAIL" }
    ));
    Ok(if pass { 0 } else { 1 })
}

fn verify_estimates(
    ctx: &Context,
    space: &FESpace,
    summary: &mut BTreeMap<String, String>,
) -> Result<bool> {
    let n = ctx.cfg.verify_cases;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let forces: Vec<crate::synthetic::TrigForce> = (0..n)
        .map(|_| {
            random_force(
                &mut rng,
                0.5,
                ctx.cfg.mesh.length,
                ctx.cfg.mesh.height,
                3,
            )
        })
        .collect();
    let profiles: Vec<ControlProfile> = (0..n)
        .map(|_| random_profile(space, &mut rng, 0.8))
        .collect();

    let stokes_cases: Vec<EstimateCase> = profiles
        .iter()
        .zip(&forces)
        .map(|(p, f)| EstimateCase {
            inlet: p.clone(),
            force: f as &dyn BodyForce,
        })
        .collect();
    let stokes_report = verify_stokes_estimate(space, ctx.cfg.viscosity, &stokes_cases)?;

    let ns_cases: Vec<crate::navier::NsEstimateCase> = profiles
        .iter()
        .zip(&forces)
        .map(|(p, f)| crate::navier::NsEstimateCase {
            inlet: p.clone(),
            force: f as &dyn BodyForce,
        })
        .collect();
    let ns_report =
        crate::navier::verify_ns_estimate(space, ctx.cfg.viscosity, &ns_cases, &ctx.picard())?;

    let rows: Vec<Vec<String>> = stokes_report
        .ratios
        .iter()
        .map(|r| vec!["stokes".to_string(), fmt(*r)])
        .chain(ns_report.ratios.iter().map(|r| vec!["ns".to_string(), fmt(*r)]))
        .collect();
    ctx.run.write_csv("estimates.csv", &["system", "ratio"], &rows)?;

    summary.insert("stokes_fitted_constant".into(), fmt(stokes_report.fitted_constant));
    summary.insert("stokes_violations".into(), stokes_report.violations.to_string());
    summary.insert("stokes_margin".into(), fmt(stokes_report.margin));
    summary.insert("ns_fitted_constant".into(), fmt(ns_report.fitted_constant));
    summary.insert("ns_violations".into(), ns_report.violations.to_string());
    summary.insert("ns_margin".into(), fmt(ns_report.margin));
    summary.insert("ns_excluded".into(), ns_report.excluded.to_string());
    Ok(stokes_report.violations == 0
        && ns_report.violations == 0
        && !stokes_report.degenerate
        && !ns_report.degenerate)
}

fn verify_contraction(
    ctx: &Context,
    space: &FESpace,
    force: &dyn BodyForce,
    summary: &mut BTreeMap<String, String>,
) -> Result<bool> {
    let profiles: Vec<(f64, ControlProfile)> = ctx
        .cfg
        .sweep
        .amplitudes
        .iter()
        .map(|&a| {
            ctx.profile(
                space,
                &ProfileSpec {
                    kind: ctx.cfg.inlet.kind,
                    amplitude: a,
                    tangential: ctx.cfg.inlet.tangential,
                },
            )
            .map(|p| (a, p))
        })
        .collect::<Result<_>>()?;
    let report = contraction_amplitude_sweep(
        space,
        ctx.cfg.viscosity,
        force,
        &profiles,
        &ctx.picard(),
        ctx.cfg.seed,
    )?;
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| {
            vec![
                fmt(s.amplitude),
                fmt(s.contraction),
                s.converged.to_string(),
                s.iterations.to_string(),
                fmt_opt(s.max_picard_ratio),
            ]
        })
        .collect();
    ctx.run.write_csv(
        "contraction.csv",
        &["amplitude", "cbar", "converged", "iterations", "max_picard_ratio"],
        &rows,
    )?;
    match report.crossing {
        Some((lo, hi)) => {
            summary.insert("crossing_low".into(), fmt(lo));
            summary.insert("crossing_high".into(), fmt(hi));
        }
        None => {
            summary.insert("crossing_low".into(), String::new());
            summary.insert("crossing_high".into(), String::new());
        }
    }
    summary.insert(
        "max_cbar".into(),
        fmt(report
            .samples
            .iter()
            .map(|s| s.contraction)
            .fold(0.0, f64::max)),
    );
    Ok(true)
}

fn verify_gradient(
    ctx: &Context,
    space: &FESpace,
    force: &dyn BodyForce,
    summary: &mut BTreeMap<String, String>,
) -> Result<bool> {
    let omega = ctx.cfg.cost.omega_part.resolve(space.mesh())?;
    let gstar = ctx.profile(space, &ctx.cfg.twin)?;
    let picard = PicardParams {
        tolerance: (ctx.cfg.solver.tolerance * 1e-2).max(1e-12),
        max_iterations: 4 * ctx.cfg.solver.max_iterations,
        damping: ctx.cfg.solver.damping,
        ..PicardParams::default()
    };
    let data = generate_measurements(
        space,
        ctx.cfg.viscosity,
        &gstar,
        force,
        &omega,
        0.0,
        ctx.cfg.seed,
        &picard,
    )?;
    let cost_config = CostConfig {
        beta1: ctx.cfg.cost.beta1,
        beta2: ctx.cfg.cost.beta2,
        beta3: ctx.cfg.cost.beta3,
        omega_part: omega,
    };
    let ball = AdmissibleSet::new(f64::MAX)?;
    let assim = Assimilator::new(space, ctx.cfg.viscosity, force, cost_config, &data, ball)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.cfg.seed ^ 0x5eed);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..5 {
        let g = random_profile(space, &mut rng, 0.4);
        let adjoint = assim.gradient_adjoint(&g, &picard)?;
        let mut best = f64::INFINITY;
        for delta in [1e-3, 1e-4, 1e-5] {
            let fd = assim.gradient_fd(&g, delta, &picard, StateModel::NavierStokes)?;
            if !fd.failed.is_empty() {
                continue;
            }
            let num: f64 = adjoint
                .iter()
                .zip(&fd.values)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = fd.values.iter().map(|v| v * v).sum::<f64>().sqrt();
            best = best.min(num / den.max(1e-300));
        }
        rows.push(vec![case.to_string(), fmt(best)]);
        worst = worst.max(best);
    }
    ctx.run
        .write_csv("gradient.csv", &["case", "relative_error"], &rows)?;
    summary.insert("max_relative_error".into(), fmt(worst));
    ctx.status(&format!("max relative adjoint-vs-FD error: {worst:.3e}"));
    Ok(worst <= 1e-4)
}

fn verify_convexity(
    ctx: &Context,
    space: &FESpace,
    force: &dyn BodyForce,
    summary: &mut BTreeMap<String, String>,
) -> Result<bool> {
    let omega = ctx.cfg.cost.omega_part.resolve(space.mesh())?;
    let gstar = ctx.profile(space, &ctx.cfg.twin)?;
    let data = generate_measurements(
        space,
        ctx.cfg.viscosity,
        &gstar,
        force,
        &omega,
        0.0,
        ctx.cfg.seed,
        &ctx.picard(),
    )?;
    let cost_config = CostConfig {
        beta1: ctx.cfg.cost.beta1,
        beta2: ctx.cfg.cost.beta2,
        beta3: ctx.cfg.cost.beta3,
        omega_part: omega,
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut min_slack = f64::INFINITY;
    let mut all_pass = true;
    for _ in 0..100 {
        let u1 = crate::space::FlowField {
            u: crate::synthetic::random_smooth_velocity(space, &mut rng, 1.0),
            p: vec![0.0; space.num_pressure_dofs()],
        };
        let u2 = crate::space::FlowField {
            u: crate::synthetic::random_smooth_velocity(space, &mut rng, 1.0),
            p: vec![0.0; space.num_pressure_dofs()],
        };
        let check = crate::cost::midpoint_convexity_check(space, &u1, &u2, &cost_config, &data)?;
        min_slack = min_slack.min(check.slack);
        all_pass &= check.pass;
    }
    summary.insert("pairs".into(), "100".into());
    summary.insert("min_slack".into(), fmt(min_slack));
    Ok(all_pass)
}

fn cmd_sweep(ctx: &Context, workers: usize) -> Result<i32> {
    let mesh = ctx.mesh()?;
    let space = build_taylor_hood(&mesh)?;
    let force = ctx.cfg.force.instantiate();
    let params = ctx.picard();

    let mut cases = Vec::new();
    for &nu in &ctx.cfg.sweep.viscosities {
        for &amp in &ctx.cfg.sweep.amplitudes {
            cases.push((nu, amp));
        }
    }
    let n_cases = cases.len();
    let workers = workers.max(1).min(n_cases.max(1));

    struct CaseResult {
        viscosity: f64,
        amplitude: f64,
        converged: bool,
        iterations: usize,
        max_ratio: Option<f64>,
        residual: f64,
    }

    let mut results: Vec<Option<CaseResult>> = Vec::new();
    results.resize_with(n_cases, || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(&mut results);

    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for _ in 0..workers {
            let cases = &cases;
            let next = &next;
            let results = &results;
            let space = &space;
            let force = force.as_ref();
            let params = &params;
            let ctx = &ctx;
            handles.push(scope.spawn(move || -> Result<()> {
                loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if idx >= cases.len() {
                        return Ok(());
                    }
                    let (nu, amp) = cases[idx];
                    let inlet = ctx.profile(
                        space,
                        &ProfileSpec {
                            kind: ctx.cfg.inlet.kind,
                            amplitude: amp,
                            tangential: ctx.cfg.inlet.tangential,
                        },
                    )?;
                    let outcome = crate::navier::solve_navier_stokes(
                        space, nu, &inlet, force, params,
                    );
                    let result = match outcome {
                        Ok((_, report)) => CaseResult {
                            viscosity: nu,
                            amplitude: amp,
                            converged: true,
                            iterations: report.iterations.len(),
                            max_ratio: report.max_ratio(),
                            residual: report.final_residual,
                        },
                        Err(Error::Divergence { report }) => CaseResult {
                            viscosity: nu,
                            amplitude: amp,
                            converged: false,
                            iterations: report.iterations.len(),
                            max_ratio: report.max_ratio(),
                            residual: report.final_residual,
                        },
                        Err(e) => return Err(e),
                    };
                    results.lock().unwrap()[idx] = Some(result);
                }
            }));
        }
        for h in handles {
            h.join().expect("sweep worker panicked")?;
        }
        Ok(())
    })?;

    let results = results.into_inner().unwrap();
    let mut rows = Vec::with_capacity(n_cases);
    let mut converged_count = 0usize;
    for r in results.iter() {
        let r = r.as_ref().expect("all cases processed");
        converged_count += r.converged as usize;
        rows.push(vec![
            fmt(r.amplitude),
            fmt(r.viscosity),
            r.converged.to_string(),
            r.iterations.to_string(),
            fmt_opt(r.max_ratio),
            fmt(r.residual),
        ]);
    }
    ctx.run.write_csv(
        "sweep.csv",
        &[
            "amplitude",
            "viscosity",
            "converged",
            "iterations",
            "max_ratio",
            "final_residual",
        ],
        &rows,
    )?;
    let mut summary = BTreeMap::new();
    summary.insert("cases".into(), n_cases.to_string());
    summary.insert("converged".into(), converged_count.to_string());
    ctx.run.write_summary(&summary)?;
    ctx.status(&format!("sweep: {converged_count}/{n_cases} cases converged"));
    Ok(0)
}
