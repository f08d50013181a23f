//! Inlet recovery from partial observations: velocity traces on a few
//! vertical cross-sections, or velocity data on two disjoint element
//! patches. Cross-sections far from the inlet mostly see developed flow, so
//! a taller channel (slower profile development) is used for that variant;
//! a patch adjacent to the inlet makes the subdomain variant easy.
//!
//! Run with: `cargo run --release --example partial_observations`

use inflow::assimilation::{AdmissibleSet, Assimilator, OptimizerParams};
use inflow::cost::{CostConfig, OmegaPartSpec};
use inflow::force::ZeroForce;
use inflow::mesh::build_channel_mesh;
use inflow::navier::PicardParams;
use inflow::space::{build_taylor_hood, ControlProfile};
use inflow::synthetic::{generate_measurements, make_profile, InletComponents, ProfileKind};

fn main() -> inflow::Result<()> {
    // cross-sections at x = 1.5, 2.5, 3.5 in a tall channel
    {
        let mesh = build_channel_mesh(5.0, 4.0, 20, 12, None)?;
        let space = build_taylor_hood(&mesh)?;
        let ground_truth =
            make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)?;
        let picard = PicardParams {
            damping: 0.55,
            tolerance: 1e-9,
            max_iterations: 400,
            ..PicardParams::default()
        };
        let spec = OmegaPartSpec::CrossSections(vec![1.5, 2.5, 3.5]);
        let data =
            generate_measurements(&space, 0.1, &ground_truth, &ZeroForce, &spec, 0.0, 5, &picard)?;
        let config = CostConfig {
            beta1: 1.0,
            beta2: 1e-6,
            beta3: 1e-6,
            omega_part: spec,
        };
        let assimilator = Assimilator::new(
            &space,
            0.1,
            &ZeroForce,
            config,
            &data,
            AdmissibleSet::new(5.0)?,
        )?;
        let params = OptimizerParams {
            max_iterations: 300,
            gradient_tolerance: 1e-12,
            picard,
            ..OptimizerParams::default()
        };
        let report = match assimilator.assimilate(&ControlProfile::zero(&space), &params) {
            Ok(r) => r,
            Err(inflow::Error::Stagnation { report, .. }) => *report,
            Err(e) => return Err(e),
        };
        let recovery = report.recovery.unwrap();
        println!(
            "cross-sections: {} iterations, recovery error {:.2}%",
            report.iterations.len(),
            100.0 * recovery.control_error_rel
        );
    }

    // two disjoint element patches, one next to the inlet
    {
        let mesh = build_channel_mesh(5.0, 1.0, 20, 8, None)?;
        let space = build_taylor_hood(&mesh)?;
        let ground_truth =
            make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)?;
        let mut near = Vec::new();
        let mut far = Vec::new();
        for t in 0..space.mesh().num_triangles() {
            let tri = space.mesh().triangles[t];
            let cx = tri.iter().map(|&n| space.mesh().nodes[n][0]).sum::<f64>() / 3.0;
            if cx < 0.5 {
                near.push(t);
            } else if (3.0..3.5).contains(&cx) {
                far.push(t);
            }
        }
        println!(
            "subdomain patches: {} elements near the inlet, {} downstream",
            near.len(),
            far.len()
        );
        let spec = OmegaPartSpec::Subdomains(vec![near, far]);
        let data = generate_measurements(
            &space,
            0.1,
            &ground_truth,
            &ZeroForce,
            &spec,
            0.0,
            5,
            &PicardParams::default(),
        )?;
        let config = CostConfig {
            beta1: 1.0,
            beta2: 1e-6,
            beta3: 1e-6,
            omega_part: spec,
        };
        let assimilator = Assimilator::new(
            &space,
            0.1,
            &ZeroForce,
            config,
            &data,
            AdmissibleSet::new(3.0)?,
        )?;
        let params = OptimizerParams {
            max_iterations: 200,
            gradient_tolerance: 1e-10,
            ..OptimizerParams::default()
        };
        let report = match assimilator.assimilate(&ControlProfile::zero(&space), &params) {
            Ok(r) => r,
            Err(inflow::Error::Stagnation { report, .. }) => *report,
            Err(e) => return Err(e),
        };
        let recovery = report.recovery.unwrap();
        println!(
            "subdomains: {} iterations, recovery error {:.2}%",
            report.iterations.len(),
            100.0 * recovery.control_error_rel
        );
    }
    Ok(())
}
