//! Convergence study with a manufactured solution: a divergence-free
//! velocity built from a stream function that vanishes on the walls and
//! satisfies the do-nothing outflow exactly, with the matching body force
//! derived from the strong momentum equation. The quadratic/linear element
//! pair converges at second order in the velocity H1 and pressure L2 norms.
//!
//! Run with: `cargo run --release --example mms_convergence`

use std::f64::consts::PI;

use inflow::force::AnalyticForce;
use inflow::mesh::build_channel_mesh;
use inflow::navier::{solve_navier_stokes, PicardParams};
use inflow::quadrature::duffy_rule;
use inflow::space::{build_taylor_hood, ControlProfile, FESpace, FlowField};

const NU: f64 = 1.0;

fn u_exact(x: f64, y: f64) -> [f64; 2] {
    let s = (1.0 - x).powi(3);
    let sp = -3.0 * (1.0 - x).powi(2);
    [PI * (2.0 * PI * y).sin() * s, -(PI * y).sin().powi(2) * sp]
}

fn grad_u_exact(x: f64, y: f64) -> [[f64; 2]; 2] {
    let s = (1.0 - x).powi(3);
    let sp = -3.0 * (1.0 - x).powi(2);
    let spp = 6.0 * (1.0 - x);
    [
        [
            PI * (2.0 * PI * y).sin() * sp,
            2.0 * PI * PI * (2.0 * PI * y).cos() * s,
        ],
        [
            -(PI * y).sin().powi(2) * spp,
            -PI * (2.0 * PI * y).sin() * sp,
        ],
    ]
}

fn p_exact(x: f64, y: f64) -> f64 {
    (1.0 - x).powi(2) * (PI * y).cos()
}

fn forcing(x: f64, y: f64) -> [f64; 2] {
    let s = (1.0 - x).powi(3);
    let sp = -3.0 * (1.0 - x).powi(2);
    let spp = 6.0 * (1.0 - x);
    let sppp = -6.0;
    let sin2 = (2.0 * PI * y).sin();
    let cos2 = (2.0 * PI * y).cos();
    let sins = (PI * y).sin().powi(2);
    let u = u_exact(x, y);
    let g = grad_u_exact(x, y);
    let lap_u1 = PI * sin2 * spp - 4.0 * PI.powi(3) * sin2 * s;
    let lap_u2 = -sins * sppp - 2.0 * PI * PI * cos2 * sp;
    [
        -NU * lap_u1 + u[0] * g[0][0] + u[1] * g[0][1] - 2.0 * (1.0 - x) * (PI * y).cos(),
        -NU * lap_u2 + u[0] * g[1][0] + u[1] * g[1][1] - PI * (1.0 - x).powi(2) * (PI * y).sin(),
    ]
}

fn errors(space: &FESpace, field: &FlowField) -> (f64, f64) {
    let rule = duffy_rule(6);
    let mut h1 = 0.0;
    let mut l2p = 0.0;
    for t in 0..space.mesh().num_triangles() {
        let area = space.mesh().triangle_area(t);
        let tri = space.mesh().triangles[t];
        for q in &rule {
            let l = q.lambda;
            let x: f64 = (0..3).map(|k| l[k] * space.mesh().nodes[tri[k]][0]).sum();
            let y: f64 = (0..3).map(|k| l[k] * space.mesh().nodes[tri[k]][1]).sum();
            let uh = space.velocity_at(&field.u, t, l);
            let gh = space.velocity_gradient_at(&field.u, t, l);
            let ue = u_exact(x, y);
            let ge = grad_u_exact(x, y);
            let mut dens = (uh[0] - ue[0]).powi(2) + (uh[1] - ue[1]).powi(2);
            for i in 0..2 {
                for j in 0..2 {
                    dens += (gh[i][j] - ge[i][j]).powi(2);
                }
            }
            h1 += q.weight * area * dens;
            let ph = space.pressure_at(&field.p, t, l);
            l2p += q.weight * area * (ph - p_exact(x, y)).powi(2);
        }
    }
    (h1.sqrt(), l2p.sqrt())
}

fn main() -> inflow::Result<()> {
    println!("  n        h     H1(u) error  order   L2(p) error  order");
    let mut prev: Option<(f64, f64)> = None;
    for n in [8usize, 16, 32, 64] {
        let mesh = build_channel_mesh(1.0, 1.0, n, n, None)?;
        let space = build_taylor_hood(&mesh)?;
        let inlet = ControlProfile::from_fn(&space, |y| u_exact(0.0, y));
        let force = AnalyticForce(|x, y| forcing(x, y));
        let params = PicardParams {
            tolerance: 1e-9,
            max_iterations: 100,
            ..PicardParams::default()
        };
        let (field, _) = solve_navier_stokes(&space, NU, &inlet, &force, &params)?;
        let (eu, ep) = errors(&space, &field);
        match prev {
            Some((pu, pp)) => println!(
                "{n:>3}  {:>7.4}  {eu:>11.4e}  {:>5.2}  {ep:>11.4e}  {:>5.2}",
                1.0 / n as f64,
                (pu / eu).log2(),
                (pp / ep).log2()
            ),
            None => println!("{n:>3}  {:>7.4}  {eu:>11.4e}      -  {ep:>11.4e}      -", 1.0 / n as f64),
        }
        prev = Some((eu, ep));
    }
    Ok(())
}
