//! Verifies the discrete-adjoint gradient of the reduced cost against
//! central finite differences over the control dofs, for each observation
//! variant and a sweep of difference steps.
//!
//! Run with: `cargo run --release --example gradient_check`

use inflow::assimilation::{AdmissibleSet, Assimilator, StateModel};
use inflow::cost::{CostConfig, OmegaPartSpec};
use inflow::force::ZeroForce;
use inflow::mesh::build_channel_mesh;
use inflow::navier::PicardParams;
use inflow::space::build_taylor_hood;
use inflow::synthetic::{
    generate_measurements, make_profile, random_profile, InletComponents, ProfileKind,
};
use rand::SeedableRng;

fn main() -> inflow::Result<()> {
    let mesh = build_channel_mesh(5.0, 1.0, 12, 6, None)?;
    let space = build_taylor_hood(&mesh)?;
    let ground_truth = make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)?;
    let picard = PicardParams {
        tolerance: 1e-11,
        max_iterations: 100,
        ..PicardParams::default()
    };

    let variants: Vec<(&str, OmegaPartSpec)> = vec![
        ("full domain", OmegaPartSpec::FullDomain),
        (
            "cross-sections",
            OmegaPartSpec::CrossSections(vec![1.5, 2.5, 3.5]),
        ),
        (
            "subdomains",
            OmegaPartSpec::Subdomains(vec![(0..30).collect(), (80..110).collect()]),
        ),
    ];

    println!("variant          case   best rel. error  (FD steps 1e-3, 1e-4, 1e-5)");
    for (name, spec) in variants {
        let data = generate_measurements(
            &space,
            0.15,
            &ground_truth,
            &ZeroForce,
            &spec,
            0.0,
            3,
            &picard,
        )?;
        let config = CostConfig {
            beta1: 1.0,
            beta2: 1e-6,
            beta3: 1e-6,
            omega_part: spec,
        };
        let assimilator = Assimilator::new(
            &space,
            0.15,
            &ZeroForce,
            config,
            &data,
            AdmissibleSet::new(10.0)?,
        )?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for case in 0..3 {
            let g = random_profile(&space, &mut rng, 0.4);
            let adjoint = assimilator.gradient_adjoint(&g, &picard)?;
            let mut best = f64::INFINITY;
            for delta in [1e-3, 1e-4, 1e-5] {
                let fd = assimilator.gradient_fd(&g, delta, &picard, StateModel::NavierStokes)?;
                let num: f64 = adjoint
                    .iter()
                    .zip(&fd.values)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let den: f64 = fd.values.iter().map(|v| v * v).sum::<f64>().sqrt();
                best = best.min(num / den.max(1e-300));
            }
            println!("{name:<15}  {case:>4}   {best:>14.3e}");
        }
    }
    Ok(())
}
