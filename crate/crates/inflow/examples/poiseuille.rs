//! Poiseuille flow in a straight channel: the parabolic inlet profile is an
//! exact solution of both the Stokes and the Navier-Stokes systems with the
//! do-nothing outflow, so the solvers reproduce it to solver precision and
//! the fixed-point iteration stops after a single sweep.
//!
//! Run with: `cargo run --release --example poiseuille`

use inflow::force::ZeroForce;
use inflow::mesh::build_channel_mesh;
use inflow::navier::{solve_navier_stokes, PicardParams};
use inflow::space::build_taylor_hood;
use inflow::stokes::{solve_stokes, stokes_residual};
use inflow::synthetic::{make_profile, InletComponents, ProfileKind};

fn main() -> inflow::Result<()> {
    let mesh = build_channel_mesh(5.0, 1.0, 10, 4, None)?;
    let space = build_taylor_hood(&mesh)?;
    let inlet = make_profile(&space, ProfileKind::Parabolic, 1.0, InletComponents::Normal)?;

    let exact_u = space.interpolate_velocity(|_, y| [4.0 * y * (1.0 - y), 0.0]);
    let exact_p = space.interpolate_pressure(|x, _| 8.0 * (5.0 - x));
    let max_err = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };

    let stokes = solve_stokes(&space, 1.0, &inlet, &ZeroForce)?;
    println!("stokes solve:");
    println!("  max velocity error   {:.3e}", max_err(&stokes.u, &exact_u));
    println!("  max pressure error   {:.3e}", max_err(&stokes.p, &exact_p));
    println!(
        "  weak divergence      {:.3e}",
        space.weak_divergence_max(&stokes.u)
    );
    println!(
        "  momentum residual    {:.3e}",
        stokes_residual(&space, 1.0, &stokes, &inlet, &ZeroForce)?
    );

    let (ns, report) = solve_navier_stokes(&space, 1.0, &inlet, &ZeroForce, &PicardParams::default())?;
    println!("navier-stokes solve:");
    println!("  max velocity error   {:.3e}", max_err(&ns.u, &exact_u));
    println!("  max pressure error   {:.3e}", max_err(&ns.p, &exact_p));
    println!("  picard sweeps        {}", report.iterations.len());
    println!("  final residual       {:.3e}", report.final_residual);

    let out = std::env::temp_dir().join("poiseuille.vtk");
    inflow::vtk::export_field(&space, &ns, &out)?;
    println!("field written to {}", out.display());
    Ok(())
}
