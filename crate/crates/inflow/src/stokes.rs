//! Discrete solution operator for the Stokes system with inlet Dirichlet
//! data, wall no-slip, and the natural do-nothing outflow, plus the stability
//! estimate check.

use crate::assembly::{self, apply_dirichlet, assemble_stokes};
use crate::error::{Error, Result};
use crate::force::BodyForce;
use crate::space::{boundary_h01_norm_sq, ControlProfile, FESpace, FlowField};
use crate::sparse::{DirectSolver, SparseMatrix, Triplets};

/// Factorized Stokes operator for one space/viscosity pair. The constrained
/// sparsity pattern depends only on the boundary dof sets, so a single
/// factorization serves every right-hand side and every inlet profile; the
/// profile enters through the lifting contribution on the right side only.
pub struct StokesOperator<'a> {
    space: &'a FESpace,
    viscosity: f64,
    a: SparseMatrix,
    b: SparseMatrix,
    solver: DirectSolver,
}

/// Composes `[A, -B^T; -B, 0]` with symmetric elimination of constrained
/// rows/columns; the continuity rows are negated so the composed matrix
/// stays symmetric. Constrained dofs get identity rows.
fn compose_constrained(a: &SparseMatrix, b: &SparseMatrix, mask: &[bool]) -> Triplets {
    let nv = a.nrows;
    let np = b.nrows;
    let mut trips = Triplets::new(nv + np, nv + np);
    for (i, j, v) in a.entries() {
        if !mask[i] && !mask[j] {
            trips.push(i, j, v);
        }
    }
    for (k, j, v) in b.entries() {
        if !mask[j] {
            trips.push(j, nv + k, -v);
            trips.push(nv + k, j, -v);
        }
    }
    for (d, &fixed) in mask.iter().enumerate() {
        if fixed {
            trips.push(d, d, 1.0);
        }
    }
    trips
}

impl<'a> StokesOperator<'a> {
    pub fn new(space: &'a FESpace, viscosity: f64) -> Result<Self> {
        let system = assemble_stokes(space, viscosity)?;
        let trips = compose_constrained(&system.a, &system.b, space.constrained_mask());
        let solver = DirectSolver::new(&trips)?;
        Ok(StokesOperator {
            space,
            viscosity,
            a: system.a,
            b: system.b,
            solver,
        })
    }

    pub fn space(&self) -> &'a FESpace {
        self.space
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn viscous_block(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn divergence_block(&self) -> &SparseMatrix {
        &self.b
    }

    /// Nodal lifting of the inlet data: the full-length velocity vector that
    /// is `g` on the inlet-interior dofs and zero elsewhere.
    pub fn lifting(&self, inlet: &ControlProfile) -> Result<Vec<f64>> {
        let mut lift = vec![0.0; self.space.num_velocity_dofs()];
        for (dof, value) in inlet.inlet_dof_values(self.space)? {
            lift[dof] = value;
        }
        Ok(lift)
    }

    /// Solves the constrained saddle system for an assembled load vector.
    pub fn solve_with_load(&self, inlet: &ControlProfile, load: &[f64]) -> Result<FlowField> {
        let nv = self.space.num_velocity_dofs();
        let np = self.space.num_pressure_dofs();
        if load.len() != nv {
            return Err(Error::SpaceMismatch(format!(
                "load vector has {} entries, expected {nv}",
                load.len()
            )));
        }
        let lift = self.lifting(inlet)?;
        let a_lift = self.a.matvec(&lift);
        let b_lift = self.b.matvec(&lift);
        let mask = self.space.constrained_mask();

        let mut rhs = vec![0.0; nv + np];
        for i in 0..nv {
            rhs[i] = if mask[i] { lift[i] } else { load[i] - a_lift[i] };
        }
        for k in 0..np {
            rhs[nv + k] = b_lift[k];
        }

        let sol = self.solver.solve(&rhs);
        let mut u = sol[..nv].to_vec();
        // exact trace equality at constrained dofs
        for (i, &fixed) in mask.iter().enumerate() {
            if fixed {
                u[i] = lift[i];
            }
        }
        let p = sol[nv..].to_vec();
        Ok(FlowField { u, p })
    }

    /// Solves with a body force right-hand side.
    pub fn solve(&self, inlet: &ControlProfile, force: &dyn BodyForce) -> Result<FlowField> {
        let load = assembly::assemble_load(self.space, force);
        self.solve_with_load(inlet, &load)
    }
}

/// Solves a constrained saddle system directly (factorization discarded).
/// The system must carry Dirichlet constraints; see
/// [`crate::assembly::apply_dirichlet`].
pub fn solve_saddle(space: &FESpace, system: &crate::assembly::SaddleSystem) -> Result<FlowField> {
    let constraints = system.constraints.as_ref().ok_or_else(|| {
        Error::InvalidParameter("saddle system has no Dirichlet constraints applied".into())
    })?;
    let nv = space.num_velocity_dofs();
    let np = space.num_pressure_dofs();
    let mask = &constraints.mask;
    let lift = &constraints.values;

    let trips = compose_constrained(&system.a, &system.b, mask);
    let solver = DirectSolver::new(&trips)?;

    let a_lift = system.a.matvec(lift);
    let b_lift = system.b.matvec(lift);
    let mut rhs = vec![0.0; nv + np];
    for i in 0..nv {
        rhs[i] = if mask[i] {
            lift[i]
        } else {
            system.load[i] - a_lift[i]
        };
    }
    for k in 0..np {
        rhs[nv + k] = b_lift[k];
    }
    let sol = solver.solve(&rhs);
    let mut u = sol[..nv].to_vec();
    for (i, &fixed) in mask.iter().enumerate() {
        if fixed {
            u[i] = lift[i];
        }
    }
    Ok(FlowField {
        u,
        p: sol[nv..].to_vec(),
    })
}

/// One-shot Stokes solve: assemble, constrain, factorize, solve.
pub fn solve_stokes(
    space: &FESpace,
    viscosity: f64,
    inlet: &ControlProfile,
    force: &dyn BodyForce,
) -> Result<FlowField> {
    let mut system = assemble_stokes(space, viscosity)?;
    system.load = assembly::assemble_load(space, force);
    let system = apply_dirichlet(system, space, inlet)?;
    solve_saddle(space, &system)
}

/// Dual norm (over the homogeneous-Dirichlet velocity test space) of the
/// momentum defect `nu (grad u, grad v) - (p, div v) - (h, v)`.
pub fn stokes_residual(
    space: &FESpace,
    viscosity: f64,
    field: &FlowField,
    inlet: &ControlProfile,
    force: &dyn BodyForce,
) -> Result<f64> {
    if !field.matches(space) {
        return Err(Error::SpaceMismatch("field does not match space".into()));
    }
    if !inlet.matches_inlet(space) {
        return Err(Error::SpaceMismatch(
            "profile does not match the space inlet".into(),
        ));
    }
    let system = assemble_stokes(space, viscosity)?;
    let load = assembly::assemble_load(space, force);
    let au = system.a.matvec(&field.u);
    let btp = system.b.matvec_transpose(&field.p);
    let r: Vec<f64> = (0..au.len())
        .map(|i| au[i] - btp[i] - load[i])
        .collect();
    Ok(space.h1_dual_norm(&r))
}

/// One inlet/force pair for the estimate checks.
pub struct EstimateCase<'a> {
    pub inlet: ControlProfile,
    pub force: &'a dyn BodyForce,
}

/// Result of fitting a single stability constant on a calibration half and
/// validating it on the held-out half.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub fitted_constant: f64,
    /// Per included case, in input order.
    pub ratios: Vec<f64>,
    pub holdout_max: f64,
    pub violations: usize,
    /// fitted constant over the held-out maximum (>= 1 expected).
    pub margin: f64,
    pub degenerate: bool,
    /// Cases left out (zero denominator, or non-converged for the nonlinear
    /// variant).
    pub excluded: usize,
}

/// Splits ratios into calibration/held-out halves by interleaving the sorted
/// sequence, so the calibration half carries the extreme ratios and the
/// held-out half probes the interior of the same family.
pub(crate) fn fit_constant(ratios: &[f64], excluded: usize) -> EstimateReport {
    if ratios.is_empty() {
        return EstimateReport {
            fitted_constant: 0.0,
            ratios: Vec::new(),
            holdout_max: 0.0,
            violations: 0,
            margin: f64::INFINITY,
            degenerate: true,
            excluded,
        };
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let calibration: Vec<f64> = sorted.iter().copied().step_by(2).collect();
    let holdout: Vec<f64> = sorted.iter().copied().skip(1).step_by(2).collect();
    let fitted = calibration.iter().copied().fold(0.0f64, f64::max);
    let holdout_max = holdout.iter().copied().fold(0.0f64, f64::max);
    let violations = holdout
        .iter()
        .filter(|&&r| r > fitted * (1.0 + 1e-12))
        .count();
    EstimateReport {
        fitted_constant: fitted,
        ratios: ratios.to_vec(),
        holdout_max,
        violations,
        margin: if holdout_max > 0.0 {
            fitted / holdout_max
        } else {
            f64::INFINITY
        },
        degenerate: false,
        excluded,
    }
}

/// Checks the linear stability estimate
/// `||S(g, h)||^2_{H1} <= c (||g||^2 + ||h||^2_{L^{3/2}})`
/// over a case list, fitting the single constant on a calibration half.
pub fn verify_stokes_estimate(
    space: &FESpace,
    viscosity: f64,
    cases: &[EstimateCase<'_>],
) -> Result<EstimateReport> {
    if cases.len() < 10 {
        return Err(Error::InvalidParameter(format!(
            "estimate verification needs at least 10 cases, got {}",
            cases.len()
        )));
    }
    let op = StokesOperator::new(space, viscosity)?;
    let mut ratios = Vec::new();
    let mut excluded = 0;
    for case in cases {
        let g_sq = boundary_h01_norm_sq(&case.inlet)?;
        let h_norm = space.l32_force_norm(case.force);
        let den = g_sq + h_norm * h_norm;
        let field = op.solve(&case.inlet, case.force)?;
        let num = space.h1_norm_sq(&field.u);
        if den < 1e-14 {
            excluded += 1;
            continue;
        }
        ratios.push(num / den);
    }
    Ok(fit_constant(&ratios, excluded))
}
