//! Checks the solution-operator stability estimates over random data: the
//! linear bound `||u||^2 <= c (||g||^2 + ||h||^2)` and the nonlinear bound
//! `||u||^2 <= c (s^2 + s) + ||f||^2` with `s = ||g||^2`. One constant is
//! fitted on a calibration half of the cases and validated on the rest.
//!
//! Run with: `cargo run --release --example apriori_estimates`

use inflow::force::BodyForce;
use inflow::mesh::build_channel_mesh;
use inflow::navier::{verify_ns_estimate, NsEstimateCase, PicardParams};
use inflow::space::{build_taylor_hood, ControlProfile};
use inflow::stokes::{verify_stokes_estimate, EstimateCase};
use inflow::synthetic::{random_force, random_profile, TrigForce};
use rand::SeedableRng;

fn main() -> inflow::Result<()> {
    let mesh = build_channel_mesh(5.0, 1.0, 20, 8, None)?;
    let space = build_taylor_hood(&mesh)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let forces: Vec<TrigForce> = (0..40)
        .map(|_| random_force(&mut rng, 0.6, 5.0, 1.0, 3))
        .collect();
    let profiles: Vec<ControlProfile> = (0..40)
        .map(|_| random_profile(&space, &mut rng, 0.8))
        .collect();

    let cases: Vec<EstimateCase> = profiles
        .iter()
        .zip(&forces)
        .map(|(p, f)| EstimateCase {
            inlet: p.clone(),
            force: f as &dyn BodyForce,
        })
        .collect();
    let report = verify_stokes_estimate(&space, 0.5, &cases)?;
    println!("stokes estimate over {} cases:", report.ratios.len());
    println!("  fitted constant   {:.4}", report.fitted_constant);
    println!("  held-out max      {:.4}", report.holdout_max);
    println!("  violations        {}", report.violations);
    println!("  margin            {:.4}", report.margin);

    let cases: Vec<NsEstimateCase> = profiles
        .iter()
        .zip(&forces)
        .map(|(p, f)| NsEstimateCase {
            inlet: p.clone(),
            force: f as &dyn BodyForce,
        })
        .collect();
    let report = verify_ns_estimate(&space, 0.3, &cases, &PicardParams::default())?;
    println!(
        "nonlinear estimate over {} converged cases ({} excluded):",
        report.ratios.len(),
        report.excluded
    );
    println!("  fitted constant   {:.4}", report.fitted_constant);
    println!("  held-out max      {:.4}", report.holdout_max);
    println!("  violations        {}", report.violations);
    println!("  margin            {:.4}", report.margin);
    Ok(())
}
