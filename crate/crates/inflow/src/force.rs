//! Body forces evaluated at quadrature points.
//!
//! Forces carry the index of the element being integrated so that
//! finite-element fields can serve as forces without global point location.

use crate::space::FESpace;

/// A vector-valued right-hand side `h` evaluable at quadrature points.
pub trait BodyForce: Send + Sync {
    /// Value at point `(x, y)` inside element `element`.
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2];
}

/// The zero force.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForce;

impl BodyForce for ZeroForce {
    fn eval(&self, _element: usize, _x: f64, _y: f64) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// Spatially constant force.
#[derive(Debug, Clone, Copy)]
pub struct ConstantForce(pub [f64; 2]);

impl BodyForce for ConstantForce {
    fn eval(&self, _element: usize, _x: f64, _y: f64) -> [f64; 2] {
        self.0
    }
}

/// Force given by a closure of the coordinates.
pub struct AnalyticForce<F: Fn(f64, f64) -> [f64; 2] + Send + Sync>(pub F);

impl<F: Fn(f64, f64) -> [f64; 2] + Send + Sync> BodyForce for AnalyticForce<F> {
    fn eval(&self, _element: usize, x: f64, y: f64) -> [f64; 2] {
        (self.0)(x, y)
    }
}

/// A quadratic velocity field interpreted as a force.
pub struct FieldForce<'a> {
    pub space: &'a FESpace,
    pub coefficients: &'a [f64],
}

impl BodyForce for FieldForce<'_> {
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2] {
        let lambda = self.space.barycentric(element, x, y);
        self.space.velocity_at(self.coefficients, element, lambda)
    }
}

/// Difference of two forces, `left - right`.
pub struct ForceDifference<'a> {
    pub left: &'a dyn BodyForce,
    pub right: &'a dyn BodyForce,
}

impl BodyForce for ForceDifference<'_> {
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2] {
        let a = self.left.eval(element, x, y);
        let b = self.right.eval(element, x, y);
        [a[0] - b[0], a[1] - b[1]]
    }
}

/// A force scaled by a constant factor.
pub struct ScaledForce<'a> {
    pub inner: &'a dyn BodyForce,
    pub factor: f64,
}

impl BodyForce for ScaledForce<'_> {
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2] {
        let v = self.inner.eval(element, x, y);
        [self.factor * v[0], self.factor * v[1]]
    }
}

/// Sum of two forces.
pub struct ForceSum<'a> {
    pub left: &'a dyn BodyForce,
    pub right: &'a dyn BodyForce,
}

impl BodyForce for ForceSum<'_> {
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2] {
        let a = self.left.eval(element, x, y);
        let b = self.right.eval(element, x, y);
        [a[0] + b[0], a[1] + b[1]]
    }
}

/// The convective field `(w . grad) w` of a velocity `w`; the Picard
/// right-hand side is the given force minus this quantity.
pub struct ConvectiveField<'a> {
    pub space: &'a FESpace,
    pub velocity: &'a [f64],
}

impl BodyForce for ConvectiveField<'_> {
    fn eval(&self, element: usize, x: f64, y: f64) -> [f64; 2] {
        let lambda = self.space.barycentric(element, x, y);
        let w = self.space.velocity_at(self.velocity, element, lambda);
        let g = self.space.velocity_gradient_at(self.velocity, element, lambda);
        [
            w[0] * g[0][0] + w[1] * g[0][1],
            w[0] * g[1][0] + w[1] * g[1][1],
        ]
    }
}
