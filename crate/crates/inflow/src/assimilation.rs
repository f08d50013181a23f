//! Recovery of the inlet profile from partial velocity measurements:
//! projected gradient descent on the reduced cost over the control ball
//! `||g|| <= rho`, with a discrete-adjoint gradient checked against central
//! finite differences.
//!
//! The descent direction is the Riesz representative of the coordinate
//! gradient in the inlet trace metric (boundary mass plus tangential
//! stiffness), which keeps the iteration mesh-independent.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;

use crate::assembly::{
    assemble_convection, assemble_convection_linearized, assemble_load,
};
use crate::cost::{evaluate_cost, misfit_gradient, CostBreakdown, CostConfig, MeasurementSet};
use crate::error::{Error, Result};
use crate::force::BodyForce;
use crate::navier::{solve_navier_stokes_with, InitialGuess, PicardParams, PicardReport};
use crate::space::{inlet_gram_matrices, ControlProfile, FESpace, FlowField};
use crate::sparse::{DirectSolver, Triplets};
use crate::stokes::StokesOperator;

/// Control ball `{ ||g||_{H^1_0(inlet)} <= radius }`.
#[derive(Debug, Clone, Copy)]
pub struct AdmissibleSet {
    pub radius: f64,
}

impl AdmissibleSet {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "admissible radius must be positive, got {radius}"
            )));
        }
        Ok(AdmissibleSet { radius })
    }

    pub fn contains(&self, g: &ControlProfile) -> bool {
        g.h01_norm_sq().sqrt() <= self.radius * (1.0 + 1e-12)
    }
}

/// Calibrates a default admissible radius from an amplitude sweep: the
/// control norm of the largest parabolic profile whose empirical contraction
/// constant stays at or below 0.8.
pub fn default_admissible_radius(
    space: &FESpace,
    viscosity: f64,
    force: &dyn BodyForce,
    seed: u64,
) -> Result<f64> {
    let amplitudes = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
    let profiles: Vec<(f64, ControlProfile)> = amplitudes
        .iter()
        .map(|&a| {
            crate::synthetic::make_profile(
                space,
                crate::synthetic::ProfileKind::Parabolic,
                a,
                crate::synthetic::InletComponents::Normal,
            )
            .map(|p| (a, p))
        })
        .collect::<Result<_>>()?;
    let params = PicardParams {
        max_iterations: 1,
        tolerance: f64::INFINITY,
        ..PicardParams::default()
    };
    let sweep = crate::navier::contraction_amplitude_sweep(
        space, viscosity, force, &profiles, &params, seed,
    )?;
    let mut radius = None;
    for (sample, (_, profile)) in sweep.samples.iter().zip(&profiles) {
        if sample.contraction <= 0.8 {
            radius = Some(profile.h01_norm_sq().sqrt());
        }
    }
    radius.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no amplitude in the sweep stayed within the contraction regime at viscosity {viscosity}"
        ))
    })
}

/// Radial projection onto the control ball in the inlet trace norm.
pub fn project_to_ball(g: &ControlProfile, ball: &AdmissibleSet) -> ControlProfile {
    let norm = g.h01_norm_sq().sqrt();
    if norm <= ball.radius {
        g.clone()
    } else {
        g.scaled(ball.radius / norm)
    }
}

/// Which state model the reduced cost propagates through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StateModel {
    #[default]
    NavierStokes,
    /// Linear state; turns the reduced cost into an exact quadratic.
    Stokes,
}

#[derive(Debug, Clone)]
pub struct OptimizerParams {
    pub max_iterations: usize,
    /// Stop when the projected-gradient norm falls below this.
    pub gradient_tolerance: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_sigma: f64,
    /// Multiplicative backtracking factor in (0, 1).
    pub step_shrink: f64,
    pub max_halvings: usize,
    pub initial_step: f64,
    pub state: StateModel,
    pub picard: PicardParams,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            max_iterations: 200,
            gradient_tolerance: 1e-6,
            armijo_sigma: 1e-4,
            step_shrink: 0.5,
            max_halvings: 30,
            initial_step: 1.0,
            state: StateModel::NavierStokes,
            picard: PicardParams::default(),
        }
    }
}

/// One accepted optimizer iterate.
#[derive(Debug, Clone)]
pub struct AssimilationIteration {
    pub cost: f64,
    pub misfit: f64,
    pub control_l2: f64,
    pub control_h1: f64,
    /// Projected-gradient norm in the control metric at the pre-step point.
    pub gradient_norm: f64,
    pub step: f64,
    pub projection_active: bool,
}

/// Recovery quality against a known ground truth.
#[derive(Debug, Clone, Copy)]
pub struct RecoveryMetrics {
    /// `||g - g*|| / ||g*||` in the control norm.
    pub control_error_rel: f64,
    /// `J(g0) / J(g_final)`.
    pub cost_reduction: f64,
}

#[derive(Debug, Clone)]
pub struct AssimilationReport {
    pub initial_cost: f64,
    pub iterations: Vec<AssimilationIteration>,
    pub final_control: ControlProfile,
    pub converged: bool,
    pub recovery: Option<RecoveryMetrics>,
    /// A line-search trial left the convergent regime of the state solver;
    /// hints that the admissible radius admits non-solvable controls.
    pub divergence_encountered: bool,
}

/// Central finite-difference gradient; entries whose probes failed to
/// converge are listed in `failed`.
#[derive(Debug, Clone)]
pub struct FdGradient {
    pub values: Vec<f64>,
    pub failed: Vec<usize>,
}

/// Assimilation session: one space, viscosity, force, cost configuration and
/// measurement set, with the Stokes factorization and control-metric solver
/// cached across evaluations.
pub struct Assimilator<'a> {
    space: &'a FESpace,
    force: &'a dyn BodyForce,
    config: CostConfig,
    data: &'a MeasurementSet,
    ball: AdmissibleSet,
    op: StokesOperator<'a>,
    base_load: Vec<f64>,
    /// Boundary mass and stiffness over the full parameter list.
    inlet_mass: Vec<Vec<f64>>,
    inlet_stiffness: Vec<Vec<f64>>,
    /// Factorized interior control metric (mass + stiffness).
    metric_lu: PartialPivLu<f64>,
    n_interior: usize,
}

impl<'a> Assimilator<'a> {
    pub fn new(
        space: &'a FESpace,
        viscosity: f64,
        force: &'a dyn BodyForce,
        config: CostConfig,
        data: &'a MeasurementSet,
        ball: AdmissibleSet,
    ) -> Result<Self> {
        config.validate(space)?;
        let op = StokesOperator::new(space, viscosity)?;
        let base_load = assemble_load(space, force);
        let (inlet_mass, inlet_stiffness) = inlet_gram_matrices(space);
        let n = inlet_mass.len();
        let n_interior = n - 2;
        let metric = Mat::from_fn(n_interior, n_interior, |i, j| {
            inlet_mass[i + 1][j + 1] + inlet_stiffness[i + 1][j + 1]
        });
        let metric_lu = metric.partial_piv_lu();
        Ok(Assimilator {
            space,
            force,
            config,
            data,
            ball,
            op,
            base_load,
            inlet_mass,
            inlet_stiffness,
            metric_lu,
            n_interior,
        })
    }

    pub fn space(&self) -> &'a FESpace {
        self.space
    }

    pub fn ball(&self) -> AdmissibleSet {
        self.ball
    }

    pub fn config(&self) -> &CostConfig {
        &self.config
    }

    fn solve_state(
        &self,
        g: &ControlProfile,
        picard: &PicardParams,
        state: StateModel,
    ) -> Result<(FlowField, Option<PicardReport>)> {
        match state {
            StateModel::Stokes => {
                let field = self.op.solve_with_load(g, &self.base_load)?;
                Ok((field, None))
            }
            StateModel::NavierStokes => {
                let (field, report) =
                    solve_navier_stokes_with(&self.op, g, self.force, picard)?;
                Ok((field, Some(report)))
            }
        }
    }

    /// Cost along the control-to-state map, together with the state.
    pub fn reduced_cost(
        &self,
        g: &ControlProfile,
        picard: &PicardParams,
        state: StateModel,
    ) -> Result<(CostBreakdown, FlowField, Option<PicardReport>)> {
        let (field, report) = self.solve_state(g, picard, state)?;
        let cost = evaluate_cost(self.space, &field, g, &self.config, self.data)?;
        Ok((cost, field, report))
    }

    /// [`Self::reduced_cost`] warm-started from a nearby state; the
    /// fixed-point limit does not depend on the initial iterate inside the
    /// contraction regime.
    fn reduced_cost_warm(
        &self,
        g: &ControlProfile,
        picard: &PicardParams,
        state: StateModel,
        warm: Option<&FlowField>,
    ) -> Result<(CostBreakdown, FlowField, Option<PicardReport>)> {
        let mut params = picard.clone();
        if let Some(field) = warm {
            params.initial = InitialGuess::Field(field.clone());
        }
        self.reduced_cost(g, &params, state)
    }

    /// Regularization part of the coordinate gradient,
    /// `2 beta2 M g + 2 beta3 K g` restricted to interior parameters.
    fn regularization_gradient(&self, g: &ControlProfile) -> Vec<f64> {
        let n = self.inlet_mass.len();
        let mut grad = vec![0.0; 2 * self.n_interior];
        for (comp, values) in [g.x_values(), g.y_values()].into_iter().enumerate() {
            for i in 1..n - 1 {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += (self.config.beta2 * self.inlet_mass[i][j]
                        + self.config.beta3 * self.inlet_stiffness[i][j])
                        * values[j];
                }
                grad[comp * self.n_interior + (i - 1)] = 2.0 * acc;
            }
        }
        grad
    }

    /// Discrete-adjoint gradient of the reduced cost at `g`.
    ///
    /// Solves the state, then the transposed linearized saddle system with
    /// the misfit derivative as right-hand side, and assembles the chain-rule
    /// pairing on the inlet control dofs.
    pub fn gradient_adjoint(&self, g: &ControlProfile, picard: &PicardParams) -> Result<Vec<f64>> {
        let (field, _) = self.solve_state(g, picard, StateModel::NavierStokes)?;
        self.gradient_adjoint_at(g, &field, StateModel::NavierStokes)
    }

    /// Adjoint gradient reusing an already-converged state. For the linear
    /// state model the convective Jacobian blocks are absent.
    pub fn gradient_adjoint_at(
        &self,
        g: &ControlProfile,
        field: &FlowField,
        state: StateModel,
    ) -> Result<Vec<f64>> {
        let space = self.space;
        let nv = space.num_velocity_dofs();
        let np = space.num_pressure_dofs();
        let mask = space.constrained_mask();

        // dJ/du, scaled misfit derivative
        let mut w = misfit_gradient(space, &field.u, &self.data.data)?;
        for v in &mut w {
            *v *= self.config.beta1;
        }

        let a = self.op.viscous_block();
        let b = self.op.divergence_block();
        let convective = match state {
            StateModel::NavierStokes => Some((
                assemble_convection(space, &field.u)?,
                assemble_convection_linearized(space, &field.u)?,
            )),
            StateModel::Stokes => None,
        };

        // transposed constrained Jacobian: rows are columns of the forward
        // linearization; adjoint velocity is pinned to zero on the Dirichlet
        // boundary
        let mut trips = Triplets::new(nv + np, nv + np);
        let mut push_transposed = |m: &crate::sparse::SparseMatrix| {
            for (r, c, v) in m.entries() {
                if !mask[r] && !mask[c] {
                    trips.push(c, r, v);
                }
            }
        };
        push_transposed(a);
        if let Some((n_conv, n_lin)) = &convective {
            push_transposed(n_conv);
            push_transposed(n_lin);
        }
        for (k, j, v) in b.entries() {
            if !mask[j] {
                // forward continuity row k couples to u_j: transposed into
                // velocity row j; forward momentum row j couples to p_k with
                // -B^T: transposed into pressure row k
                trips.push(j, nv + k, v);
                trips.push(nv + k, j, -v);
            }
        }
        for (d, &fixed) in mask.iter().enumerate() {
            if fixed {
                trips.push(d, d, 1.0);
            }
        }
        let solver = DirectSolver::new(&trips)?;

        let mut rhs = vec![0.0; nv + np];
        for i in 0..nv {
            rhs[i] = if mask[i] { 0.0 } else { w[i] };
        }
        let sol = solver.solve(&rhs);
        let lambda = &sol[..nv];
        let mu = &sol[nv..];

        // chain rule through the constrained columns: s = J^T lambda + D^T mu
        let mut s = a.matvec_transpose(lambda);
        if let Some((n_conv, n_lin)) = &convective {
            for (sv, nv1) in s.iter_mut().zip(n_conv.matvec_transpose(lambda)) {
                *sv += nv1;
            }
            for (sv, nv2) in s.iter_mut().zip(n_lin.matvec_transpose(lambda)) {
                *sv += nv2;
            }
        }
        for (sv, bt) in s.iter_mut().zip(b.matvec_transpose(mu)) {
            *sv += bt;
        }

        let mut grad = self.regularization_gradient(g);
        let interior = self.control_dofs(g)?;
        for (k, dof) in interior.into_iter().enumerate() {
            grad[k] += w[dof] - s[dof];
        }
        Ok(grad)
    }

    /// Velocity dofs addressed by the flat control vector, in its order.
    fn control_dofs(&self, template: &ControlProfile) -> Result<Vec<usize>> {
        let pairs = template.inlet_dof_values(self.space)?;
        // pairs iterate interior locations in parameter order as (x, y) dof
        // tuples; the control vector is [gx..., gy...]
        let m = pairs.len() / 2;
        debug_assert_eq!(m, self.n_interior);
        let mut dofs = vec![0usize; 2 * m];
        for (k, (dof, _)) in pairs.into_iter().enumerate() {
            let location_idx = k / 2;
            let comp = k % 2;
            dofs[comp * m + location_idx] = dof;
        }
        Ok(dofs)
    }

    /// Central-difference gradient of the reduced cost, probing each control
    /// dof with a warm-started state solve.
    pub fn gradient_fd(
        &self,
        g: &ControlProfile,
        delta: f64,
        picard: &PicardParams,
        state: StateModel,
    ) -> Result<FdGradient> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step must be positive, got {delta}"
            )));
        }
        let base = self.solve_state(g, picard, state);
        let warm = match &base {
            Ok((field, _)) => Some(field.clone()),
            Err(_) => None,
        };
        let x0 = g.interior_values();
        let mut values = vec![0.0; x0.len()];
        let mut failed = Vec::new();
        for i in 0..x0.len() {
            let probe = |sign: f64| -> Result<f64> {
                let mut x = x0.clone();
                x[i] += sign * delta;
                let gp = g.with_interior_values(&x)?;
                let mut params = picard.clone();
                if let Some(field) = &warm {
                    params.initial = InitialGuess::Field(field.clone());
                }
                let (cost, _, _) = self.reduced_cost(&gp, &params, state)?;
                Ok(cost.total)
            };
            match (probe(1.0), probe(-1.0)) {
                (Ok(jp), Ok(jm)) => values[i] = (jp - jm) / (2.0 * delta),
                _ => failed.push(i),
            }
        }
        Ok(FdGradient { values, failed })
    }

    /// Riesz representative of a coordinate gradient in the control metric.
    fn riesz_direction(&self, grad: &[f64]) -> Vec<f64> {
        let m = self.n_interior;
        let mut out = vec![0.0; 2 * m];
        for comp in 0..2 {
            let rhs = Mat::from_fn(m, 1, |i, _| grad[comp * m + i]);
            let sol = self.metric_lu.solve(&rhs);
            for i in 0..m {
                out[comp * m + i] = sol[(i, 0)];
            }
        }
        out
    }

    /// `a^T G b` in the interior control metric (both components).
    fn metric_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let m = self.n_interior;
        let mut total = 0.0;
        for comp in 0..2 {
            for i in 0..m {
                let mut row = 0.0;
                for j in 0..m {
                    row += (self.inlet_mass[i + 1][j + 1] + self.inlet_stiffness[i + 1][j + 1])
                        * b[comp * m + j];
                }
                total += a[comp * m + i] * row;
            }
        }
        total
    }

    fn projected_gradient_norm(
        &self,
        g: &ControlProfile,
        direction: &[f64],
    ) -> Result<f64> {
        let x = g.interior_values();
        let trial: Vec<f64> = x.iter().zip(direction).map(|(a, d)| a - d).collect();
        let trial = project_to_ball(&g.with_interior_values(&trial)?, &self.ball);
        let diff = g.add_scaled(&trial, -1.0)?;
        Ok(diff.h01_norm_sq().sqrt())
    }

    /// Projected gradient descent with Armijo backtracking.
    pub fn assimilate(
        &self,
        g0: &ControlProfile,
        params: &OptimizerParams,
    ) -> Result<AssimilationReport> {
        if !self.ball.contains(g0) {
            return Err(Error::InvalidParameter(format!(
                "initial control norm {} exceeds the admissible radius {}",
                g0.h01_norm_sq().sqrt(),
                self.ball.radius
            )));
        }
        let (mut cost, mut state_field, _) =
            self.reduced_cost(g0, &params.picard, params.state)?;
        let initial_cost = cost.total;
        let mut g = g0.clone();
        let mut iterations: Vec<AssimilationIteration> = Vec::new();
        let mut converged = false;
        let mut divergence_encountered = false;
        let mut step = params.initial_step;
        let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;

        for _ in 0..params.max_iterations {
            let grad = self.gradient_adjoint_at(&g, &state_field, params.state)?;
            let direction = self.riesz_direction(&grad);
            let pg = self.projected_gradient_norm(&g, &direction)?;

            if pg <= params.gradient_tolerance {
                converged = true;
                break;
            }

            let x = g.interior_values();
            // Barzilai-Borwein trial step from the last secant pair; the
            // Armijo test below safeguards it
            step = match &previous {
                Some((x_prev, grad_prev)) => {
                    let s: Vec<f64> = x.iter().zip(x_prev).map(|(a, b)| a - b).collect();
                    let y: Vec<f64> = grad.iter().zip(grad_prev).map(|(a, b)| a - b).collect();
                    let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
                    let s_metric = self.metric_dot(&s, &s);
                    if sy > 0.0 && s_metric.is_finite() {
                        (s_metric / sy).clamp(1e-12, 1e8)
                    } else {
                        (step * 2.0).min(1e6)
                    }
                }
                None => step,
            };
            previous = Some((x.clone(), grad.clone()));
            let mut accepted = false;
            for _ in 0..=params.max_halvings {
                let trial_x: Vec<f64> = x
                    .iter()
                    .zip(&direction)
                    .map(|(a, d)| a - step * d)
                    .collect();
                let raw = g.with_interior_values(&trial_x)?;
                let projection_active = !self.ball.contains(&raw);
                let trial = project_to_ball(&raw, &self.ball);
                let expected: f64 = grad
                    .iter()
                    .zip(x.iter().zip(trial.interior_values().iter()))
                    .map(|(gr, (a, b))| gr * (a - b))
                    .sum();
                match self.reduced_cost_warm(
                    &trial,
                    &params.picard,
                    params.state,
                    Some(&state_field),
                ) {
                    Ok((trial_cost, trial_field, _))
                        if trial_cost.total
                            <= cost.total - params.armijo_sigma * expected.max(0.0) =>
                    {
                        g = trial;
                        cost = trial_cost;
                        state_field = trial_field;
                        iterations.push(AssimilationIteration {
                            cost: cost.total,
                            misfit: cost.misfit,
                            control_l2: cost.control_l2,
                            control_h1: cost.control_h1,
                            gradient_norm: pg,
                            step,
                            projection_active,
                        });
                        accepted = true;
                        break;
                    }
                    Ok(_) => {
                        step *= params.step_shrink;
                    }
                    Err(Error::Divergence { .. }) => {
                        divergence_encountered = true;
                        step *= params.step_shrink;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !accepted {
                let report = AssimilationReport {
                    initial_cost,
                    iterations,
                    final_control: g.clone(),
                    converged: false,
                    recovery: self.recovery_metrics(&g, initial_cost, cost.total),
                    divergence_encountered,
                };
                return Err(Error::Stagnation {
                    message: format!(
                        "no Armijo decrease after {} halvings (step {step:.3e})",
                        params.max_halvings
                    ),
                    report: Box::new(report),
                });
            }
        }

        let recovery = self.recovery_metrics(&g, initial_cost, cost.total);
        Ok(AssimilationReport {
            initial_cost,
            iterations,
            final_control: g,
            converged,
            recovery,
            divergence_encountered,
        })
    }

    fn recovery_metrics(
        &self,
        g: &ControlProfile,
        initial_cost: f64,
        final_cost: f64,
    ) -> Option<RecoveryMetrics> {
        let truth = self.data.ground_truth.as_ref()?;
        let diff = g.add_scaled(truth, -1.0).ok()?;
        let rel = diff.h01_norm_sq().sqrt() / truth.h01_norm_sq().sqrt().max(f64::MIN_POSITIVE);
        Some(RecoveryMetrics {
            control_error_rel: rel,
            cost_reduction: initial_cost / final_cost.max(f64::MIN_POSITIVE),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{MeasurementData, OmegaPartSpec};
    use crate::force::ZeroForce;
    use crate::mesh::build_channel_mesh;
    use crate::space::build_taylor_hood;
    use crate::synthetic::{self, InletComponents, ProfileKind};

    fn channel(nx: usize, ny: usize) -> FESpace {
        let mesh = build_channel_mesh(5.0, 1.0, nx, ny, None).unwrap();
        build_taylor_hood(&mesh).unwrap()
    }

    fn full_config() -> CostConfig {
        CostConfig {
            beta1: 1.0,
            beta2: 1e-6,
            beta3: 1e-6,
            omega_part: OmegaPartSpec::FullDomain,
        }
    }

    #[test]
    fn projection_examples() {
        let space = channel(6, 4);
        let ball = AdmissibleSet::new(1.0).unwrap();
        let g = synthetic::make_profile(&space, ProfileKind::Sine, 0.2, InletComponents::Normal)
            .unwrap();
        let norm = g.h01_norm_sq().sqrt();
        assert!(norm < 1.0);
        assert_eq!(project_to_ball(&g, &ball), g);

        let big = g.scaled(5.0 / norm);
        let projected = project_to_ball(&big, &ball);
        assert!((projected.h01_norm_sq().sqrt() - 1.0).abs() < 1e-12);

        let zero = ControlProfile::zero(&space);
        assert_eq!(project_to_ball(&zero, &ball), zero);
    }

    #[test]
    fn regularization_gradient_is_exact_for_boundary_only_cost() {
        // beta1 = 0 turns the reduced cost into the quadratic boundary form;
        // FD must match 2 beta2 M g + 2 beta3 K g to tight tolerance
        let space = channel(8, 4);
        let data = MeasurementSet {
            data: MeasurementData::Full {
                field: vec![0.0; space.num_velocity_dofs()],
            },
            noise: None,
            ground_truth: None,
        };
        let config = CostConfig {
            beta1: 0.0,
            beta2: 0.8,
            beta3: 0.5,
            omega_part: OmegaPartSpec::FullDomain,
        };
        let ball = AdmissibleSet::new(10.0).unwrap();
        let assim =
            Assimilator::new(&space, 1.0, &ZeroForce, config, &data, ball).unwrap();
        let g = synthetic::make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)
            .unwrap();
        let analytic = assim.regularization_gradient(&g);
        let fd = assim
            .gradient_fd(&g, 1e-5, &PicardParams::default(), StateModel::Stokes)
            .unwrap();
        assert!(fd.failed.is_empty());
        let scale = analytic
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-12);
        for (a, b) in analytic.iter().zip(&fd.values) {
            assert!((a - b).abs() < 1e-8 * scale.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn fd_gradient_matches_the_quadratic_form_for_a_linear_state() {
        // with the Stokes state model the reduced cost is an exact quadratic
        // in g; its gradient follows from unit-control solves by linearity
        let space = channel(8, 4);
        let nu = 0.7;
        let ud = space.interpolate_velocity(|x, y| [y * (1.0 - y) * (0.4 * x).cos(), 0.02 * x]);
        let data = MeasurementSet {
            data: MeasurementData::Full { field: ud },
            noise: None,
            ground_truth: None,
        };
        let config = CostConfig {
            beta1: 1.0,
            beta2: 0.0,
            beta3: 0.0,
            omega_part: OmegaPartSpec::FullDomain,
        };
        let ball = AdmissibleSet::new(100.0).unwrap();
        let assim =
            Assimilator::new(&space, nu, &ZeroForce, config, &data, ball).unwrap();
        let g = synthetic::make_profile(&space, ProfileKind::Sine, 0.6, InletComponents::Normal)
            .unwrap();

        // unit-control responses
        let op = crate::stokes::StokesOperator::new(&space, nu).unwrap();
        let zero_load = vec![0.0; space.num_velocity_dofs()];
        let m = g.interior_values().len();
        let mut responses = Vec::with_capacity(m);
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            let gi = g.with_interior_values(&e).unwrap();
            responses.push(op.solve_with_load(&gi, &zero_load).unwrap());
        }
        let state = op.solve_with_load(&g, &zero_load).unwrap();
        let dmisfit = crate::cost::misfit_gradient(&space, &state.u, &data.data).unwrap();
        let analytic: Vec<f64> = responses
            .iter()
            .map(|r| dmisfit.iter().zip(&r.u).map(|(a, b)| a * b).sum())
            .collect();

        let fd = assim
            .gradient_fd(&g, 1e-5, &PicardParams::default(), StateModel::Stokes)
            .unwrap();
        assert!(fd.failed.is_empty());
        let scale = analytic.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in analytic.iter().zip(&fd.values) {
            assert!(
                (a - b).abs() <= 1e-8 * scale.max(1.0),
                "analytic {a} vs fd {b}"
            );
        }
    }

    #[test]
    fn adjoint_gradient_matches_fd_on_full_domain() {
        let space = channel(12, 6);
        let gstar =
            synthetic::make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)
                .unwrap();
        let data = synthetic::generate_measurements(
            &space,
            0.2,
            &gstar,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            3,
            &PicardParams::default(),
        )
        .unwrap();
        let ball = AdmissibleSet::new(5.0).unwrap();
        let assim =
            Assimilator::new(&space, 0.2, &ZeroForce, full_config(), &data, ball).unwrap();

        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(31);
        let g = synthetic::random_profile(&space, &mut rng, 0.4);
        let tight = PicardParams {
            tolerance: 1e-11,
            ..PicardParams::default()
        };
        let adjoint = assim.gradient_adjoint(&g, &tight).unwrap();
        let mut best = f64::INFINITY;
        for delta in [1e-3, 1e-4, 1e-5] {
            let fd = assim
                .gradient_fd(&g, delta, &tight, StateModel::NavierStokes)
                .unwrap();
            assert!(fd.failed.is_empty());
            let num: f64 = adjoint
                .iter()
                .zip(&fd.values)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = fd.values.iter().map(|v| v * v).sum::<f64>().sqrt();
            best = best.min(num / den.max(1e-300));
        }
        assert!(best <= 1e-4, "adjoint-vs-FD relative error {best}");
    }

    #[test]
    fn gradient_vanishes_at_perfect_data_without_regularization() {
        let space = channel(8, 4);
        let gstar =
            synthetic::make_profile(&space, ProfileKind::Parabolic, 0.4, InletComponents::Normal)
                .unwrap();
        let data = synthetic::generate_measurements(
            &space,
            0.5,
            &gstar,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            1,
            &PicardParams {
                tolerance: 1e-12,
                ..PicardParams::default()
            },
        )
        .unwrap();
        let config = CostConfig {
            beta1: 1.0,
            beta2: 0.0,
            beta3: 0.0,
            omega_part: OmegaPartSpec::FullDomain,
        };
        let ball = AdmissibleSet::new(5.0).unwrap();
        let assim = Assimilator::new(&space, 0.5, &ZeroForce, config, &data, ball).unwrap();
        let grad = assim
            .gradient_adjoint(
                &gstar,
                &PicardParams {
                    tolerance: 1e-12,
                    ..PicardParams::default()
                },
            )
            .unwrap();
        let norm: f64 = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "gradient norm {norm}");
    }

    #[test]
    fn twin_experiment_recovers_the_profile() {
        let space = channel(16, 8);
        let gstar =
            synthetic::make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal)
                .unwrap();
        let data = synthetic::generate_measurements(
            &space,
            0.1,
            &gstar,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            5,
            &PicardParams::default(),
        )
        .unwrap();
        let ball = AdmissibleSet::new(3.0).unwrap();
        let assim =
            Assimilator::new(&space, 0.1, &ZeroForce, full_config(), &data, ball).unwrap();
        let report = assim
            .assimilate(&ControlProfile::zero(&space), &OptimizerParams::default())
            .unwrap();
        let recovery = report.recovery.unwrap();
        assert!(
            recovery.control_error_rel <= 0.05,
            "recovery error {}",
            recovery.control_error_rel
        );
        assert!(
            recovery.cost_reduction >= 1e3,
            "cost reduction {}",
            recovery.cost_reduction
        );
        // monotone decrease along accepted iterates
        let mut prev = report.initial_cost;
        for it in &report.iterations {
            assert!(it.cost <= prev * (1.0 + 1e-12));
            prev = it.cost;
        }
    }

    #[test]
    fn starting_at_the_truth_terminates_quickly() {
        let space = channel(12, 6);
        let gstar =
            synthetic::make_profile(&space, ProfileKind::Sine, 0.4, InletComponents::Normal)
                .unwrap();
        let data = synthetic::generate_measurements(
            &space,
            0.2,
            &gstar,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            9,
            &PicardParams::default(),
        )
        .unwrap();
        let ball = AdmissibleSet::new(3.0).unwrap();
        let assim =
            Assimilator::new(&space, 0.2, &ZeroForce, full_config(), &data, ball).unwrap();
        let params = OptimizerParams {
            gradient_tolerance: 1e-5,
            ..OptimizerParams::default()
        };
        let report = assim.assimilate(&gstar, &params).unwrap();
        assert!(report.converged);
        assert!(report.iterations.len() <= 2, "{} iterations", report.iterations.len());
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let space = channel(8, 4);
        let data = MeasurementSet {
            data: MeasurementData::Full {
                field: vec![0.0; space.num_velocity_dofs()],
            },
            noise: None,
            ground_truth: None,
        };
        let ball = AdmissibleSet::new(0.1).unwrap();
        let assim =
            Assimilator::new(&space, 1.0, &ZeroForce, full_config(), &data, ball).unwrap();
        let big =
            synthetic::make_profile(&space, ProfileKind::Sine, 5.0, InletComponents::Normal)
                .unwrap();
        assert!(matches!(
            assim.assimilate(&big, &OptimizerParams::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn iterates_stay_feasible_and_degenerate_weights_run() {
        let space = channel(12, 6);
        let gstar =
            synthetic::make_profile(&space, ProfileKind::Sine, 0.8, InletComponents::Normal)
                .unwrap();
        let data = synthetic::generate_measurements(
            &space,
            0.2,
            &gstar,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            11,
            &PicardParams::default(),
        )
        .unwrap();
        // tight ball forces the projection to engage
        let ball = AdmissibleSet::new(0.8 * gstar.h01_norm_sq().sqrt()).unwrap();
        for (beta2, beta3) in [(0.0, 1e-6), (1e-6, 0.0)] {
            let config = CostConfig {
                beta1: 1.0,
                beta2,
                beta3,
                omega_part: OmegaPartSpec::FullDomain,
            };
            let assim =
                Assimilator::new(&space, 0.2, &ZeroForce, config, &data, ball).unwrap();
            let params = OptimizerParams {
                max_iterations: 40,
                ..OptimizerParams::default()
            };
            let report = match assim.assimilate(&ControlProfile::zero(&space), &params) {
                Ok(r) => r,
                Err(Error::Stagnation { report, .. }) => *report,
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(assim.ball.contains(&report.final_control));
            assert!(report
                .iterations
                .iter()
                .any(|it| it.projection_active));
        }
    }
}
