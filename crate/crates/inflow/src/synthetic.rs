//! Twin-experiment factory: ground-truth inlet profiles, forward solves into
//! measurement sets for every observation variant, and seeded noise.
//!
//! All randomness flows through a ChaCha8 stream seeded with 64 bits; the
//! generator identifier `chacha8` is recorded in measurement metadata so
//! files are reproducible across runs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cost::{
    MeasurementData, MeasurementSet, NoiseMeta, OmegaPartSpec, SectionMeasurement, SectionSample,
};
use crate::error::{Error, Result};
use crate::force::BodyForce;
use crate::navier::{solve_navier_stokes, PicardParams};
use crate::space::{ControlProfile, FESpace};

/// Identifier of the measurement-noise generator recorded in metadata.
pub const RNG_ID: &str = "chacha8";

/// Analytic inlet profile families, normalized to peak one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `4 t (1 - t)`
    Parabolic,
    /// `sin(pi t)`
    Sine,
    /// Compactly supported mollifier bump.
    Bump,
}

impl ProfileKind {
    pub fn shape(self, t: f64) -> f64 {
        match self {
            ProfileKind::Parabolic => 4.0 * t * (1.0 - t),
            ProfileKind::Sine => (std::f64::consts::PI * t).sin(),
            ProfileKind::Bump => {
                let s = 2.0 * t - 1.0;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "parabolic" => Some(ProfileKind::Parabolic),
            "sine" => Some(ProfileKind::Sine),
            "bump" => Some(ProfileKind::Bump),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Parabolic => "parabolic",
            ProfileKind::Sine => "sine",
            ProfileKind::Bump => "bump",
        }
    }
}

/// Which velocity components the synthetic profile drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InletComponents {
    /// Normal (x) component only.
    Normal,
    /// Normal component plus a tangential component scaled by the ratio.
    Tilted { tangential: f64 },
}

/// Samples a named profile shape on the inlet of `space`.
pub fn make_profile(
    space: &FESpace,
    kind: ProfileKind,
    amplitude: f64,
    components: InletComponents,
) -> Result<ControlProfile> {
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "profile amplitude must be finite, got {amplitude}"
        )));
    }
    let params = space.inlet_parameters();
    let (lo, hi) = (params[0], params[params.len() - 1]);
    let span = hi - lo;
    Ok(ControlProfile::from_fn(space, |y| {
        let t = (y - lo) / span;
        let v = amplitude * kind.shape(t);
        match components {
            InletComponents::Normal => [v, 0.0],
            InletComponents::Tilted { tangential } => [v, tangential * v],
        }
    }))
}

/// Random endpoint-zero profile: a short sine series with seeded
/// coefficients, scaled so the peak magnitude is about `amplitude`.
pub fn random_profile(space: &FESpace, rng: &mut impl Rng, amplitude: f64) -> ControlProfile {
    let coeffs: [[f64; 2]; 4] =
        std::array::from_fn(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
    let params = space.inlet_parameters();
    let (lo, hi) = (params[0], params[params.len() - 1]);
    let span = hi - lo;
    ControlProfile::from_fn(space, |y| {
        let t = (y - lo) / span;
        let mut v = [0.0; 2];
        for (k, c) in coeffs.iter().enumerate() {
            let mode = ((k + 1) as f64 * std::f64::consts::PI * t).sin();
            let decay = 1.0 / (k + 1) as f64;
            v[0] += amplitude * decay * c[0] * mode;
            v[1] += 0.3 * amplitude * decay * c[1] * mode;
        }
        v
    })
}

/// Smooth trigonometric body force with a handful of random modes.
#[derive(Debug, Clone)]
pub struct TrigForce {
    // (ax, ay, kx, ky, phase) per mode
    modes: Vec<(f64, f64, f64, f64, f64)>,
}

impl BodyForce for TrigForce {
    fn eval(&self, _element: usize, x: f64, y: f64) -> [f64; 2] {
        let mut v = [0.0; 2];
        for &(ax, ay, kx, ky, phase) in &self.modes {
            let s = (kx * x + ky * y + phase).sin();
            v[0] += ax * s;
            v[1] += ay * s;
        }
        v
    }
}

/// Draws a random smooth force with wavelengths on the scale of the domain
/// `(lx, ly)` and coefficients of size about `scale`.
pub fn random_force(
    rng: &mut impl Rng,
    scale: f64,
    lx: f64,
    ly: f64,
    n_modes: usize,
) -> TrigForce {
    let modes = (0..n_modes)
        .map(|_| {
            (
                scale * rng.random_range(-1.0..1.0),
                scale * rng.random_range(-1.0..1.0),
                rng.random_range(0.5..3.0) * std::f64::consts::PI / lx,
                rng.random_range(0.5..3.0) * std::f64::consts::PI / ly,
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    TrigForce { modes }
}

/// Random smooth velocity coefficient field (interpolated trigonometric
/// polynomial); used by property checks that need comparable fields across
/// meshes.
pub fn random_smooth_velocity(space: &FESpace, rng: &mut impl Rng, scale: f64) -> Vec<f64> {
    let a: [f64; 8] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    space.interpolate_velocity(|x, y| {
        [
            scale * (a[0] + a[1] * x + a[2] * (0.9 * x).sin() * (1.7 * y).cos() + a[3] * y * y),
            scale * (a[4] + a[5] * y + a[6] * (1.3 * y).sin() + a[7] * x * y),
        ]
    })
}

/// Forward-solves the flow at the ground-truth control and samples it on the
/// support of the observation variant, adding seeded Gaussian noise per
/// sampled component when `sigma > 0`.
pub fn generate_measurements(
    space: &FESpace,
    viscosity: f64,
    ground_truth: &ControlProfile,
    force: &dyn BodyForce,
    spec: &OmegaPartSpec,
    sigma: f64,
    seed: u64,
    params: &PicardParams,
) -> Result<MeasurementSet> {
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {sigma}"
        )));
    }
    spec.validate(space)?;
    let (field, _) = solve_navier_stokes(space, viscosity, ground_truth, force, params)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
    let mut perturb = |v: f64| {
        if sigma > 0.0 {
            v + normal.sample(&mut rng)
        } else {
            v
        }
    };

    // sampling order is canonical: dof order for fields, section order then
    // increasing y for traces
    let data = match spec {
        OmegaPartSpec::FullDomain => MeasurementData::Full {
            field: field.u.iter().map(|&v| perturb(v)).collect(),
        },
        OmegaPartSpec::Subdomains(sets) => MeasurementData::Subdomains {
            elements: sets.clone(),
            field: field.u.iter().map(|&v| perturb(v)).collect(),
        },
        OmegaPartSpec::CrossSections(positions) => {
            let mut sections = Vec::with_capacity(positions.len());
            for &x in positions {
                let trace = space.trace_on_section(&field.u, x)?;
                let samples = trace
                    .samples
                    .iter()
                    .map(|s| SectionSample {
                        y: s.y,
                        velocity: [perturb(s.velocity[0]), perturb(s.velocity[1])],
                    })
                    .collect();
                sections.push(SectionMeasurement { x, samples });
            }
            MeasurementData::Sections { sections }
        }
    };

    Ok(MeasurementSet {
        data,
        noise: Some(NoiseMeta {
            sigma,
            seed,
            rng: RNG_ID.to_string(),
        }),
        ground_truth: Some(ground_truth.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force::ZeroForce;
    use crate::mesh::build_channel_mesh;
    use crate::space::build_taylor_hood;

    fn channel(nx: usize, ny: usize) -> FESpace {
        let mesh = build_channel_mesh(5.0, 1.0, nx, ny, None).unwrap();
        build_taylor_hood(&mesh).unwrap()
    }

    #[test]
    fn parabolic_profile_matches_formula() {
        let space = channel(6, 4);
        let g = make_profile(&space, ProfileKind::Parabolic, 1.0, InletComponents::Normal)
            .unwrap();
        let params = space.inlet_parameters();
        for (k, &y) in params.iter().enumerate() {
            assert!((g.x_values()[k] - 4.0 * y * (1.0 - y)).abs() < 1e-15);
            assert_eq!(g.y_values()[k], 0.0);
        }
        // peak value at the center parameter
        let mid = params.len() / 2;
        assert!((g.x_values()[mid] - 1.0).abs() < 1e-15);
        assert_eq!(g.x_values()[0], 0.0);
        assert_eq!(*g.x_values().last().unwrap(), 0.0);
    }

    #[test]
    fn sine_profile_norm_is_analytic() {
        let space = channel(3, 16);
        let a = 0.7;
        let g = make_profile(&space, ProfileKind::Sine, a, InletComponents::Normal).unwrap();
        let exact = a * a * (0.5 + std::f64::consts::PI.powi(2) / 2.0);
        let got = g.h01_norm_sq();
        assert!((got - exact).abs() < 0.01 * exact, "got {got} want {exact}");
    }

    #[test]
    fn zero_amplitude_gives_zero_profile() {
        let space = channel(4, 4);
        let g = make_profile(&space, ProfileKind::Bump, 0.0, InletComponents::Normal).unwrap();
        assert!(g.x_values().iter().all(|&v| v == 0.0));
        assert!(g.y_values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn noiseless_measurements_replicate_the_solution() {
        let space = channel(8, 4);
        let g = make_profile(&space, ProfileKind::Parabolic, 0.5, InletComponents::Normal)
            .unwrap();
        let set = generate_measurements(
            &space,
            0.5,
            &g,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            0.0,
            7,
            &PicardParams::default(),
        )
        .unwrap();
        let (field, _) =
            solve_navier_stokes(&space, 0.5, &g, &ZeroForce, &PicardParams::default()).unwrap();
        match &set.data {
            MeasurementData::Full { field: stored } => {
                assert_eq!(stored, &field.u);
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn fixed_seed_reproduces_noise_exactly() {
        let space = channel(8, 4);
        let g = make_profile(&space, ProfileKind::Sine, 0.5, InletComponents::Normal).unwrap();
        let make = || {
            generate_measurements(
                &space,
                0.5,
                &g,
                &ZeroForce,
                &OmegaPartSpec::FullDomain,
                0.01,
                99,
                &PicardParams::default(),
            )
            .unwrap()
        };
        let a = make();
        let b = make();
        match (&a.data, &b.data) {
            (MeasurementData::Full { field: fa }, MeasurementData::Full { field: fb }) => {
                assert_eq!(fa, fb);
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn noise_standard_deviation_matches_sigma() {
        // >= 10^4 samples; the empirical std of (noisy - clean) must sit
        // within 10% of sigma
        let mesh = build_channel_mesh(5.0, 1.0, 50, 50, None).unwrap();
        let space = build_taylor_hood(&mesh).unwrap();
        let g = make_profile(&space, ProfileKind::Parabolic, 0.5, InletComponents::Normal)
            .unwrap();
        let sigma = 0.01;
        let set = generate_measurements(
            &space,
            1.0,
            &g,
            &ZeroForce,
            &OmegaPartSpec::FullDomain,
            sigma,
            1234,
            &PicardParams::default(),
        )
        .unwrap();
        let (field, _) =
            solve_navier_stokes(&space, 1.0, &g, &ZeroForce, &PicardParams::default()).unwrap();
        let stored = match &set.data {
            MeasurementData::Full { field } => field,
            _ => panic!("wrong variant"),
        };
        assert!(stored.len() >= 10_000, "{} samples", stored.len());
        let diffs: Vec<f64> = stored.iter().zip(&field.u).map(|(a, b)| a - b).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var =
            diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64;
        let std = var.sqrt();
        assert!(
            (std - sigma).abs() < 0.1 * sigma,
            "empirical std {std}, sigma {sigma}"
        );
    }
}
