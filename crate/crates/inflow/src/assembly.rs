//! Sparse operator assembly for the mixed weak forms: viscous block,
//! divergence coupling, convection and its linearization, loads, and
//! Dirichlet constraint bookkeeping.
//!
//! Conventions: the viscous block `A` contains the viscosity factor; the
//! divergence block `B` represents `(q, div u)` with pressure rows and
//! velocity columns. Assembly traverses elements in index order with a fixed
//! reduction order, so repeated assembly is bit-identical.

use crate::error::{Error, Result};
use crate::force::BodyForce;
use crate::quadrature::{TRI_DEGREE_4, TRI_DEGREE_5};
use crate::space::{ControlProfile, FESpace};
use crate::sparse::{SparseMatrix, Triplets};

/// Mixed saddle system: viscous block, divergence coupling, load, and the
/// Dirichlet constraints once applied.
pub struct SaddleSystem {
    pub viscosity: f64,
    /// `a[i][j] = viscosity * int grad phi_i : grad phi_j`
    pub a: SparseMatrix,
    /// `b[k][j] = int psi_k (div phi_j)`
    pub b: SparseMatrix,
    pub load: Vec<f64>,
    pub constraints: Option<DirichletConstraints>,
}

/// Constrained velocity dofs with their prescribed values.
#[derive(Debug, Clone)]
pub struct DirichletConstraints {
    pub mask: Vec<bool>,
    pub values: Vec<f64>,
}

/// Assembles the unconstrained Stokes blocks (A and B; zero load).
pub fn assemble_stokes(space: &FESpace, viscosity: f64) -> Result<SaddleSystem> {
    if !(viscosity > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "viscosity must be positive, got {viscosity}"
        )));
    }
    let a = assemble_viscous(space, viscosity);
    let b = assemble_divergence(space);
    Ok(SaddleSystem {
        viscosity,
        a,
        b,
        load: vec![0.0; space.num_velocity_dofs()],
        constraints: None,
    })
}

fn assemble_viscous(space: &FESpace, viscosity: f64) -> SparseMatrix {
    let n = space.num_velocity_dofs();
    let mut trips = Triplets::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        let mut local = [[0.0; 6]; 6];
        for q in &TRI_DEGREE_4 {
            let dphi = FESpace::p2_gradients(&geom, q.lambda);
            let w = q.weight * geom.area;
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += w * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                let v = viscosity * local[i][j];
                for c in 0..2 {
                    trips.push(space.dof(locs[i], c), space.dof(locs[j], c), v);
                }
            }
        }
    }
    trips.to_csr()
}

/// `(q, div u)` coupling with pressure rows.
pub fn assemble_divergence(space: &FESpace) -> SparseMatrix {
    let np = space.num_pressure_dofs();
    let nv = space.num_velocity_dofs();
    let mut trips = Triplets::new(np, nv);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        let tri = space.mesh().triangles[t];
        for q in &TRI_DEGREE_4 {
            let dphi = FESpace::p2_gradients(&geom, q.lambda);
            let w = q.weight * geom.area;
            for (k, &node) in tri.iter().enumerate() {
                let psi = q.lambda[k];
                for j in 0..6 {
                    for c in 0..2 {
                        trips.push(node, space.dof(locs[j], c), w * psi * dphi[j][c]);
                    }
                }
            }
        }
    }
    trips.to_csr()
}

/// Convection matrix `N(w)[i][j] = int (w . grad phi_j) . phi_i` with the
/// transporting field frozen at `w`.
pub fn assemble_convection(space: &FESpace, w: &[f64]) -> Result<SparseMatrix> {
    let n = space.num_velocity_dofs();
    if w.len() != n {
        return Err(Error::SpaceMismatch(format!(
            "transport field has {} entries, space has {n} velocity dofs",
            w.len()
        )));
    }
    let mut trips = Triplets::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        let mut local = [[0.0; 6]; 6];
        for q in &TRI_DEGREE_5 {
            let phi = FESpace::p2_values(q.lambda);
            let dphi = FESpace::p2_gradients(&geom, q.lambda);
            let wv = space.velocity_at(w, t, q.lambda);
            let wq = q.weight * geom.area;
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += wq * phi[i] * (wv[0] * dphi[j][0] + wv[1] * dphi[j][1]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    trips.push(space.dof(locs[i], c), space.dof(locs[j], c), local[i][j]);
                }
            }
        }
    }
    Ok(trips.to_csr())
}

/// Reaction-type linearization `N'(w)[i][j] = int (phi_j . grad w) . phi_i`,
/// the second Jacobian term of the convective form; used by the adjoint.
pub fn assemble_convection_linearized(space: &FESpace, w: &[f64]) -> Result<SparseMatrix> {
    let n = space.num_velocity_dofs();
    if w.len() != n {
        return Err(Error::SpaceMismatch(format!(
            "transport field has {} entries, space has {n} velocity dofs",
            w.len()
        )));
    }
    let mut trips = Triplets::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        // grad_w[alpha][beta] = d w_alpha / d x_beta at each quad point
        for q in &TRI_DEGREE_5 {
            let phi = FESpace::p2_values(q.lambda);
            let grad_w = space.velocity_gradient_at(w, t, q.lambda);
            let wq = q.weight * geom.area;
            for i in 0..6 {
                for j in 0..6 {
                    let m = wq * phi[i] * phi[j];
                    for alpha in 0..2 {
                        for beta in 0..2 {
                            trips.push(
                                space.dof(locs[i], alpha),
                                space.dof(locs[j], beta),
                                m * grad_w[alpha][beta],
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(trips.to_csr())
}

/// Consistent load vector `int f . phi_i` by the degree-4 rule.
pub fn assemble_load(space: &FESpace, f: &dyn BodyForce) -> Vec<f64> {
    let mut load = vec![0.0; space.num_velocity_dofs()];
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        for q in &TRI_DEGREE_4 {
            let phi = FESpace::p2_values(q.lambda);
            let (x, y) = space.quad_point(&geom, q.lambda);
            let fv = f.eval(t, x, y);
            let wq = q.weight * geom.area;
            for i in 0..6 {
                for c in 0..2 {
                    load[space.dof(locs[i], c)] += wq * phi[i] * fv[c];
                }
            }
        }
    }
    load
}

/// Load of the convective term, `int ((w . grad) w) . phi_i`, with the
/// degree-5 rule; identical to `N(w) w` up to roundoff.
pub fn convective_load(space: &FESpace, w: &[f64]) -> Vec<f64> {
    let mut load = vec![0.0; space.num_velocity_dofs()];
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        for q in &TRI_DEGREE_5 {
            let phi = FESpace::p2_values(q.lambda);
            let wv = space.velocity_at(w, t, q.lambda);
            let gv = space.velocity_gradient_at(w, t, q.lambda);
            let conv = [
                wv[0] * gv[0][0] + wv[1] * gv[0][1],
                wv[0] * gv[1][0] + wv[1] * gv[1][1],
            ];
            let wq = q.weight * geom.area;
            for i in 0..6 {
                for c in 0..2 {
                    load[space.dof(locs[i], c)] += wq * phi[i] * conv[c];
                }
            }
        }
    }
    load
}

/// Velocity H1 Gram matrix (mass plus stiffness, unit coefficients).
pub fn assemble_velocity_h1_gram(space: &FESpace) -> SparseMatrix {
    let n = space.num_velocity_dofs();
    let mut trips = Triplets::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let locs = space.tri_locations(t);
        let mut local = [[0.0; 6]; 6];
        for q in &TRI_DEGREE_4 {
            let phi = FESpace::p2_values(q.lambda);
            let dphi = FESpace::p2_gradients(&geom, q.lambda);
            let w = q.weight * geom.area;
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += w
                        * (phi[i] * phi[j] + dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    trips.push(space.dof(locs[i], c), space.dof(locs[j], c), local[i][j]);
                }
            }
        }
    }
    trips.to_csr()
}

/// Linear-pressure mass matrix.
pub fn assemble_pressure_mass(space: &FESpace) -> SparseMatrix {
    let np = space.num_pressure_dofs();
    let mut trips = Triplets::new(np, np);
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let tri = space.mesh().triangles[t];
        for q in &TRI_DEGREE_4 {
            let w = q.weight * geom.area;
            for i in 0..3 {
                for j in 0..3 {
                    trips.push(tri[i], tri[j], w * q.lambda[i] * q.lambda[j]);
                }
            }
        }
    }
    trips.to_csr()
}

/// Attaches the Dirichlet data: wall dofs pinned to zero, inlet-interior dofs
/// to the profile values. The outlet keeps its natural (do-nothing) rows.
pub fn apply_dirichlet(
    mut system: SaddleSystem,
    space: &FESpace,
    inlet: &ControlProfile,
) -> Result<SaddleSystem> {
    let mut values = vec![0.0; space.num_velocity_dofs()];
    for (dof, value) in inlet.inlet_dof_values(space)? {
        values[dof] = value;
    }
    system.constraints = Some(DirichletConstraints {
        mask: space.constrained_mask().to_vec(),
        values,
    });
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force::{AnalyticForce, ConstantForce, ZeroForce};
    use crate::mesh::build_channel_mesh;
    use crate::quadrature::duffy_rule;
    use crate::space::build_taylor_hood;
    use rand::Rng;
    use rand::SeedableRng;

    fn unit_square(n: usize) -> crate::space::FESpace {
        let mesh = build_channel_mesh(1.0, 1.0, n, n, None).unwrap();
        build_taylor_hood(&mesh).unwrap()
    }

    #[test]
    fn viscous_block_is_exactly_symmetric() {
        let space = unit_square(4);
        let sys = assemble_stokes(&space, 0.7).unwrap();
        assert_eq!(sys.a.max_abs_asymmetry(), 0.0);
    }

    #[test]
    fn viscous_block_scales_linearly_in_viscosity() {
        let space = unit_square(3);
        let s1 = assemble_stokes(&space, 1.0).unwrap();
        let s2 = assemble_stokes(&space, 2.0).unwrap();
        for ((r1, c1, v1), (r2, c2, v2)) in s1.a.entries().zip(s2.a.entries()) {
            assert_eq!((r1, c1), (r2, c2));
            assert!((v2 - 2.0 * v1).abs() <= 1e-15 * v1.abs().max(1.0));
        }
        for ((r1, c1, v1), (r2, c2, v2)) in s1.b.entries().zip(s2.b.entries()) {
            assert_eq!((r1, c1), (r2, c2));
            assert_eq!(v1, v2);
        }
    }

    #[test]
    fn constant_fields_are_in_the_viscous_nullspace() {
        let space = unit_square(4);
        let sys = assemble_stokes(&space, 1.0).unwrap();
        let u = space.interpolate_velocity(|_, _| [1.0, 0.0]);
        let y = sys.a.matvec(&u);
        let worst = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-13, "max |A u| = {worst}");
    }

    #[test]
    fn convection_of_zero_field_is_zero() {
        let space = unit_square(3);
        let w = vec![0.0; space.num_velocity_dofs()];
        let n = assemble_convection(&space, &w).unwrap();
        assert!(n.entries().all(|(_, _, v)| v == 0.0));
    }

    #[test]
    fn convection_is_linear_in_the_transport_field() {
        let space = unit_square(3);
        let w = space.interpolate_velocity(|x, y| [y - x, x * y]);
        let w3: Vec<f64> = w.iter().map(|v| 3.0 * v).collect();
        let n1 = assemble_convection(&space, &w).unwrap();
        let n3 = assemble_convection(&space, &w3).unwrap();
        for ((r1, c1, v1), (r3, c3, v3)) in n1.entries().zip(n3.entries()) {
            assert_eq!((r1, c1), (r3, c3));
            assert!((v3 - 3.0 * v1).abs() <= 1e-13 * v1.abs().max(1.0));
        }
    }

    #[test]
    fn convection_matrix_matches_direct_quadrature() {
        let space = unit_square(2);
        let w = space.interpolate_velocity(|x, y| [x + 0.2 * y, -y + 0.1]);
        let u = space.interpolate_velocity(|x, y| [x * y, x - y]);
        let n = assemble_convection(&space, &w).unwrap();
        let via_matrix = n.matvec(&u);
        let via_load = {
            // same trilinear form with the transported field replaced by u
            let mut load = vec![0.0; space.num_velocity_dofs()];
            for t in 0..space.mesh().num_triangles() {
                let geom = space.geometry(t);
                let locs = space.tri_locations(t);
                for q in &TRI_DEGREE_5 {
                    let phi = crate::space::FESpace::p2_values(q.lambda);
                    let wv = space.velocity_at(&w, t, q.lambda);
                    let gu = space.velocity_gradient_at(&u, t, q.lambda);
                    let conv = [
                        wv[0] * gu[0][0] + wv[1] * gu[0][1],
                        wv[0] * gu[1][0] + wv[1] * gu[1][1],
                    ];
                    let wq = q.weight * geom.area;
                    for i in 0..6 {
                        for c in 0..2 {
                            load[space.dof(locs[i], c)] += wq * phi[i] * conv[c];
                        }
                    }
                }
            }
            load
        };
        for (a, b) in via_matrix.iter().zip(&via_load) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn convective_load_equals_matrix_product() {
        let space = unit_square(3);
        let w = space.interpolate_velocity(|x, y| [0.5 - y * y, x * (1.0 - x)]);
        let n = assemble_convection(&space, &w).unwrap();
        let via_matrix = n.matvec(&w);
        let direct = convective_load(&space, &w);
        for (a, b) in via_matrix.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn trilinear_form_is_skew_for_divergence_free_transport() {
        // integration-by-parts identity checked by brute-force high-order
        // quadrature: w = curl psi with psi = [x(1-x)y(1-y)]^2 vanishes on the
        // whole boundary and is exactly divergence free, so int (w.grad v).v
        // must vanish for any v vanishing on the boundary.
        let space = unit_square(4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let w_analytic = |x: f64, y: f64| -> [f64; 2] {
            let gx = x * (1.0 - x);
            let gy = y * (1.0 - y);
            let dgx = 1.0 - 2.0 * x;
            let dgy = 1.0 - 2.0 * y;
            // psi = gx^2 gy^2; w = (d psi/dy, -d psi/dx)
            [2.0 * gx * gx * gy * dgy, -2.0 * gx * dgx * gy * gy]
        };
        let rule = duffy_rule(8);
        for _ in 0..5 {
            let mut v = space.interpolate_velocity(|x, y| {
                let sx = (3.1 * x + 0.4).sin();
                let sy = (2.3 * y).cos();
                [sx * sy, x * y * (1.0 - x)]
            });
            for (d, v_d) in v.iter_mut().enumerate() {
                *v_d *= rng.random_range(0.5..1.5);
                let loc = d / 2;
                let xy = space.location_coords(loc);
                // zero out every boundary location
                if xy[0] == 0.0 || xy[0] == 1.0 || xy[1] == 0.0 || xy[1] == 1.0 {
                    *v_d = 0.0;
                }
            }
            let mut total = 0.0;
            for t in 0..space.mesh().num_triangles() {
                let geom = space.geometry(t);
                for q in &rule {
                    let (x, y) = space.quad_point(&geom, q.lambda);
                    let wv = w_analytic(x, y);
                    let vv = space.velocity_at(&v, t, q.lambda);
                    let gv = space.velocity_gradient_at(&v, t, q.lambda);
                    let conv = [
                        wv[0] * gv[0][0] + wv[1] * gv[0][1],
                        wv[0] * gv[1][0] + wv[1] * gv[1][1],
                    ];
                    total += q.weight * geom.area * (conv[0] * vv[0] + conv[1] * vv[1]);
                }
            }
            assert!(total.abs() < 1e-10, "trilinear defect {total}");
        }
    }

    #[test]
    fn load_vector_examples() {
        let space = unit_square(3);
        let zero = assemble_load(&space, &ZeroForce);
        assert!(zero.iter().all(|&v| v == 0.0));

        // partition of unity: the x-components of the load of f = (1, 0)
        // sum to the domain area
        let load = assemble_load(&space, &ConstantForce([1.0, 0.0]));
        let sum_x: f64 = load.iter().step_by(2).sum();
        let sum_y: f64 = load.iter().skip(1).step_by(2).sum();
        assert!((sum_x - 1.0).abs() < 1e-13);
        assert!(sum_y.abs() < 1e-14);

        let anal = assemble_load(&space, &AnalyticForce(|x, _| [x, 0.0]));
        let sum_x: f64 = anal.iter().step_by(2).sum();
        assert!((sum_x - 0.5).abs() < 1e-13);
    }

    #[test]
    fn assembly_is_deterministic() {
        let space = unit_square(3);
        let s1 = assemble_stokes(&space, 0.3).unwrap();
        let s2 = assemble_stokes(&space, 0.3).unwrap();
        for ((r1, c1, v1), (r2, c2, v2)) in s1.a.entries().zip(s2.a.entries()) {
            assert_eq!((r1, c1), (r2, c2));
            assert_eq!(v1.to_bits(), v2.to_bits());
        }
    }
}
