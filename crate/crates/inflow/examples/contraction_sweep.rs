//! Maps the empirical contraction constant of the fixed-point map over an
//! inlet-amplitude sweep at low viscosity: below the crossing the iteration
//! contracts, beyond it the solver reports divergence. This traces the
//! "small data" boundary of the solvable regime empirically.
//!
//! Run with: `cargo run --release --example contraction_sweep`

use inflow::force::ZeroForce;
use inflow::mesh::{build_channel_mesh, StenosisSpec};
use inflow::navier::{contraction_amplitude_sweep, PicardParams};
use inflow::space::{build_taylor_hood, ControlProfile};
use inflow::synthetic::{make_profile, InletComponents, ProfileKind};

fn main() -> inflow::Result<()> {
    let mesh = build_channel_mesh(
        5.0,
        1.0,
        40,
        8,
        Some(StenosisSpec {
            amplitude: 0.3,
            center: 2.5,
            width: 1.0,
        }),
    )?;
    let space = build_taylor_hood(&mesh)?;

    let amplitudes = [0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    let profiles: Vec<(f64, ControlProfile)> = amplitudes
        .iter()
        .map(|&a| {
            make_profile(&space, ProfileKind::Parabolic, a, InletComponents::Normal)
                .map(|p| (a, p))
        })
        .collect::<inflow::Result<_>>()?;

    println!("viscosity 0.05, stenosed channel:");
    println!("amplitude   cbar    converged  sweeps");
    let report = contraction_amplitude_sweep(
        &space,
        0.05,
        &ZeroForce,
        &profiles,
        &PicardParams::default(),
        42,
    )?;
    for s in &report.samples {
        println!(
            "{:>8.2}  {:>6.3}  {:>9}  {:>6}",
            s.amplitude, s.contraction, s.converged, s.iterations
        );
    }
    match report.crossing {
        Some((lo, hi)) => println!("contraction constant crosses 1 between amplitudes {lo} and {hi}"),
        None => println!("no crossing inside the sweep range"),
    }
    Ok(())
}
