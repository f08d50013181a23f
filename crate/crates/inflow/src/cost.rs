//! The tracking cost `beta1 * misfit + beta2 * |g|^2 + beta3 * |grad_s g|^2`
//! with three observation variants for the misfit region: the full domain, a
//! family of vertical cross-sections (line integrals of the trace misfit), or
//! disjoint element patches. Also hosts the measurement container and its
//! plain-text file format.
//!
//! ## Measurement file format
//!
//! Whitespace separated, `#` comments allowed:
//!
//! ```text
//! measurements 1
//! variant full | sections | subdomains
//! noise <sigma> <seed> <rng>              # optional
//! gstar <n>                               # optional ground truth
//! <s> <gx> <gy>                           # n lines
//! -- variant full:
//! field <n>
//! <ux> <uy>                               # n lines, dof-location order
//! -- variant sections:
//! sections <m>
//! section <x> <k>                         # repeated m times
//! <y> <ux> <uy>                           # k lines, increasing y
//! -- variant subdomains:
//! subdomains <m>
//! elements <k> <id...>                    # m lines
//! field <n>
//! <ux> <uy>
//! ```

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::TRI_DEGREE_4;
use crate::space::{ControlProfile, FESpace, FlowField};

/// Observation region of the misfit term.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaPartSpec {
    FullDomain,
    /// Vertical sections `x = a_i`, strictly increasing, interior.
    CrossSections(Vec<f64>),
    /// Pairwise disjoint element index sets.
    Subdomains(Vec<Vec<usize>>),
}

impl OmegaPartSpec {
    pub fn validate(&self, space: &FESpace) -> Result<()> {
        match self {
            OmegaPartSpec::FullDomain => Ok(()),
            OmegaPartSpec::CrossSections(xs) => {
                if xs.is_empty() {
                    return Err(Error::InvalidParameter(
                        "cross-section variant needs at least one position".into(),
                    ));
                }
                let (lo, hi) = space.mesh().bounding_box();
                for w in xs.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(Error::InvalidParameter(format!(
                            "section positions must be strictly increasing, got {} then {}",
                            w[0], w[1]
                        )));
                    }
                }
                for &x in xs {
                    if !(x > lo[0] && x < hi[0]) {
                        return Err(Error::InvalidParameter(format!(
                            "section x = {x} must lie strictly inside ({}, {})",
                            lo[0], hi[0]
                        )));
                    }
                }
                Ok(())
            }
            OmegaPartSpec::Subdomains(sets) => {
                if sets.is_empty() {
                    return Err(Error::InvalidParameter(
                        "subdomain variant needs at least one element set".into(),
                    ));
                }
                let n = space.mesh().num_triangles();
                let mut seen = BTreeSet::new();
                for set in sets {
                    if set.is_empty() {
                        return Err(Error::InvalidParameter(
                            "subdomain element sets must be nonempty".into(),
                        ));
                    }
                    for &e in set {
                        if e >= n {
                            return Err(Error::InvalidParameter(format!(
                                "subdomain element {e} out of range ({n} elements)"
                            )));
                        }
                        if !seen.insert(e) {
                            return Err(Error::InvalidParameter(format!(
                                "subdomain element {e} appears in more than one set"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            OmegaPartSpec::FullDomain => "full",
            OmegaPartSpec::CrossSections(_) => "sections",
            OmegaPartSpec::Subdomains(_) => "subdomains",
        }
    }
}

/// Weights of the three cost terms plus the observation region.
#[derive(Debug, Clone, PartialEq)]
pub struct CostConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub omega_part: OmegaPartSpec,
}

impl CostConfig {
    pub fn validate(&self, space: &FESpace) -> Result<()> {
        for (name, v) in [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
        ] {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        self.omega_part.validate(space)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMeta {
    pub sigma: f64,
    pub seed: u64,
    /// Generator identifier, e.g. `chacha8`.
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSample {
    pub y: f64,
    pub velocity: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionMeasurement {
    pub x: f64,
    /// Samples at the section quadrature points, increasing y.
    pub samples: Vec<SectionSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementData {
    /// Reference velocity coefficients over the whole space.
    Full { field: Vec<f64> },
    Sections { sections: Vec<SectionMeasurement> },
    /// Reference field restricted (in evaluation) to the element sets.
    Subdomains {
        elements: Vec<Vec<usize>>,
        field: Vec<f64>,
    },
}

impl MeasurementData {
    pub fn variant_name(&self) -> &'static str {
        match self {
            MeasurementData::Full { .. } => "full",
            MeasurementData::Sections { .. } => "sections",
            MeasurementData::Subdomains { .. } => "subdomains",
        }
    }
}

/// Measured data plus provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub data: MeasurementData,
    pub noise: Option<NoiseMeta>,
    pub ground_truth: Option<ControlProfile>,
}

/// The evaluated cost and its unweighted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `beta1 * misfit + beta2 * control_l2 + beta3 * control_h1`
    pub total: f64,
    /// `int_{Omega_part} |u - u_d|^2` (volume or line measure).
    pub misfit: f64,
    /// `int_Gamma |g|^2 ds`
    pub control_l2: f64,
    /// `int_Gamma |grad_s g|^2 ds`
    pub control_h1: f64,
}

fn check_consistency(space: &FESpace, cfg: &CostConfig, data: &MeasurementSet) -> Result<()> {
    cfg.validate(space)?;
    if cfg.omega_part.variant_name() != data.data.variant_name() {
        return Err(Error::DataMismatch(format!(
            "cost configured for `{}` but measurements carry `{}`",
            cfg.omega_part.variant_name(),
            data.data.variant_name()
        )));
    }
    match (&cfg.omega_part, &data.data) {
        (OmegaPartSpec::FullDomain, MeasurementData::Full { field }) => {
            if field.len() != space.num_velocity_dofs() {
                return Err(Error::DataMismatch(format!(
                    "measured field has {} entries, space has {}",
                    field.len(),
                    space.num_velocity_dofs()
                )));
            }
        }
        (OmegaPartSpec::CrossSections(xs), MeasurementData::Sections { sections }) => {
            if xs.len() != sections.len() {
                return Err(Error::DataMismatch(format!(
                    "{} configured sections but {} measured",
                    xs.len(),
                    sections.len()
                )));
            }
            for (&x, sec) in xs.iter().zip(sections) {
                if (x - sec.x).abs() > 1e-12 {
                    return Err(Error::DataMismatch(format!(
                        "section position mismatch: configured {x}, measured {}",
                        sec.x
                    )));
                }
                let quad = space.section_quadrature(x)?;
                if quad.len() != sec.samples.len() {
                    return Err(Error::DataMismatch(format!(
                        "section {x} has {} quadrature points, data carries {}",
                        quad.len(),
                        sec.samples.len()
                    )));
                }
                for (q, s) in quad.iter().zip(&sec.samples) {
                    if (q.y - s.y).abs() > 1e-10 {
                        return Err(Error::DataMismatch(format!(
                            "section {x}: sample at y = {} does not match quadrature y = {}",
                            s.y, q.y
                        )));
                    }
                }
            }
        }
        (OmegaPartSpec::Subdomains(cfg_sets), MeasurementData::Subdomains { elements, field }) => {
            if cfg_sets != elements {
                return Err(Error::DataMismatch(
                    "subdomain element sets differ between config and measurements".into(),
                ));
            }
            if field.len() != space.num_velocity_dofs() {
                return Err(Error::DataMismatch(format!(
                    "measured field has {} entries, space has {}",
                    field.len(),
                    space.num_velocity_dofs()
                )));
            }
        }
        _ => unreachable!("variant names already matched"),
    }
    Ok(())
}

fn misfit_over_elements<'a>(
    space: &FESpace,
    u: &[f64],
    ud: &[f64],
    elements: impl Iterator<Item = usize> + 'a,
) -> f64 {
    let mut total = 0.0;
    for t in elements {
        let geom = space.geometry(t);
        for q in &TRI_DEGREE_4 {
            let a = space.velocity_at(u, t, q.lambda);
            let b = space.velocity_at(ud, t, q.lambda);
            let dx = a[0] - b[0];
            let dy = a[1] - b[1];
            total += q.weight * geom.area * (dx * dx + dy * dy);
        }
    }
    total
}

fn misfit_term(space: &FESpace, u: &[f64], data: &MeasurementData) -> Result<f64> {
    match data {
        MeasurementData::Full { field } => Ok(misfit_over_elements(
            space,
            u,
            field,
            0..space.mesh().num_triangles(),
        )),
        MeasurementData::Subdomains { elements, field } => Ok(misfit_over_elements(
            space,
            u,
            field,
            elements.iter().flatten().copied(),
        )),
        MeasurementData::Sections { sections } => {
            let mut total = 0.0;
            for sec in sections {
                let quad = space.section_quadrature(sec.x)?;
                for (q, s) in quad.iter().zip(&sec.samples) {
                    let lambda = space.barycentric(q.element, sec.x, q.y);
                    let v = space.velocity_at(u, q.element, lambda);
                    let dx = v[0] - s.velocity[0];
                    let dy = v[1] - s.velocity[1];
                    total += q.weight * (dx * dx + dy * dy);
                }
            }
            Ok(total)
        }
    }
}

/// Evaluates the cost of a state/control pair against measured data.
pub fn evaluate_cost(
    space: &FESpace,
    field: &FlowField,
    inlet: &ControlProfile,
    cfg: &CostConfig,
    data: &MeasurementSet,
) -> Result<CostBreakdown> {
    if !field.matches(space) {
        return Err(Error::SpaceMismatch("field does not match space".into()));
    }
    check_consistency(space, cfg, data)?;
    let misfit = misfit_term(space, &field.u, &data.data)?;
    let control_l2 = inlet.l2_norm_sq();
    let control_h1 = inlet.h1_semi_norm_sq();
    Ok(CostBreakdown {
        total: cfg.beta1 * misfit + cfg.beta2 * control_l2 + cfg.beta3 * control_h1,
        misfit,
        control_l2,
        control_h1,
    })
}

/// Derivative of the raw misfit term with respect to the velocity
/// coefficients (no `beta1` factor).
pub(crate) fn misfit_gradient(
    space: &FESpace,
    u: &[f64],
    data: &MeasurementData,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; space.num_velocity_dofs()];
    match data {
        MeasurementData::Full { field } | MeasurementData::Subdomains { field, .. } => {
            let elements: Vec<usize> = match data {
                MeasurementData::Full { .. } => (0..space.mesh().num_triangles()).collect(),
                MeasurementData::Subdomains { elements, .. } => {
                    elements.iter().flatten().copied().collect()
                }
                _ => unreachable!(),
            };
            for t in elements {
                let geom = space.geometry(t);
                let locs = space.tri_locations(t);
                for q in &TRI_DEGREE_4 {
                    let phi = FESpace::p2_values(q.lambda);
                    let a = space.velocity_at(u, t, q.lambda);
                    let b = space.velocity_at(field, t, q.lambda);
                    let d = [a[0] - b[0], a[1] - b[1]];
                    let wq = q.weight * geom.area;
                    for i in 0..6 {
                        for c in 0..2 {
                            grad[space.dof(locs[i], c)] += 2.0 * wq * phi[i] * d[c];
                        }
                    }
                }
            }
        }
        MeasurementData::Sections { sections } => {
            for sec in sections {
                let quad = space.section_quadrature(sec.x)?;
                for (q, s) in quad.iter().zip(&sec.samples) {
                    let lambda = space.barycentric(q.element, sec.x, q.y);
                    let phi = FESpace::p2_values(lambda);
                    let locs = space.tri_locations(q.element);
                    let v = space.velocity_at(u, q.element, lambda);
                    let d = [v[0] - s.velocity[0], v[1] - s.velocity[1]];
                    for i in 0..6 {
                        for c in 0..2 {
                            grad[space.dof(locs[i], c)] += 2.0 * q.weight * phi[i] * d[c];
                        }
                    }
                }
            }
        }
    }
    Ok(grad)
}

/// Midpoint convexity of the misfit term.
#[derive(Debug, Clone, Copy)]
pub struct ConvexityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, nonnegative up to roundoff when convex.
    pub slack: f64,
    pub pass: bool,
}

/// Verifies `misfit((u1+u2)/2) <= (misfit(u1) + misfit(u2)) / 2`.
pub fn midpoint_convexity_check(
    space: &FESpace,
    u1: &FlowField,
    u2: &FlowField,
    cfg: &CostConfig,
    data: &MeasurementSet,
) -> Result<ConvexityCheck> {
    if !u1.matches(space) || !u2.matches(space) {
        return Err(Error::SpaceMismatch("fields do not match space".into()));
    }
    check_consistency(space, cfg, data)?;
    let mid: Vec<f64> = u1
        .u
        .iter()
        .zip(&u2.u)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let lhs = misfit_term(space, &mid, &data.data)?;
    let m1 = misfit_term(space, &u1.u, &data.data)?;
    let m2 = misfit_term(space, &u2.u, &data.data)?;
    let rhs = 0.5 * m1 + 0.5 * m2;
    let slack = rhs - lhs;
    Ok(ConvexityCheck {
        lhs,
        rhs,
        slack,
        pass: slack >= -1e-12 * rhs.abs().max(1.0),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ContinuityRow {
    pub epsilon: f64,
    pub delta_h1: f64,
    pub difference: f64,
}

/// Misfit differences under shrinking perturbations of the state.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub rows: Vec<ContinuityRow>,
    /// Largest `difference / delta_h1` over the table.
    pub max_ratio: f64,
}

/// Tabulates `|misfit(u + eps d) - misfit(u)|` against `||eps d||_{H1}` for a
/// decreasing sequence of perturbation sizes.
pub fn continuity_modulus_check(
    space: &FESpace,
    field: &FlowField,
    direction: &[f64],
    epsilons: &[f64],
    cfg: &CostConfig,
    data: &MeasurementSet,
) -> Result<ContinuityReport> {
    if direction.len() != space.num_velocity_dofs() {
        return Err(Error::SpaceMismatch(
            "perturbation direction does not match space".into(),
        ));
    }
    for w in epsilons.windows(2) {
        if !(w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "perturbation sizes must be strictly decreasing".into(),
            ));
        }
    }
    check_consistency(space, cfg, data)?;
    let base = misfit_term(space, &field.u, &data.data)?;
    let dir_h1 = space.h1_norm_sq(direction).sqrt();
    let mut rows = Vec::with_capacity(epsilons.len());
    let mut max_ratio = 0.0f64;
    for &eps in epsilons {
        let perturbed: Vec<f64> = field
            .u
            .iter()
            .zip(direction)
            .map(|(a, d)| a + eps * d)
            .collect();
        let value = misfit_term(space, &perturbed, &data.data)?;
        let difference = (value - base).abs();
        let delta_h1 = eps * dir_h1;
        if delta_h1 > 0.0 {
            max_ratio = max_ratio.max(difference / delta_h1);
        }
        rows.push(ContinuityRow {
            epsilon: eps,
            delta_h1,
            difference,
        });
    }
    Ok(ContinuityReport { rows, max_ratio })
}

/// Writes a measurement set in the format described in the module docs.
pub fn save_measurements(set: &MeasurementSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str("measurements 1\n");
    out.push_str(&format!("variant {}\n", set.data.variant_name()));
    if let Some(noise) = &set.noise {
        out.push_str(&format!("noise {} {} {}\n", noise.sigma, noise.seed, noise.rng));
    }
    if let Some(g) = &set.ground_truth {
        out.push_str(&format!("gstar {}\n", g.len()));
        for k in 0..g.len() {
            out.push_str(&format!(
                "{} {} {}\n",
                g.params()[k],
                g.x_values()[k],
                g.y_values()[k]
            ));
        }
    }
    match &set.data {
        MeasurementData::Full { field } => write_field(&mut out, field),
        MeasurementData::Sections { sections } => {
            out.push_str(&format!("sections {}\n", sections.len()));
            for sec in sections {
                out.push_str(&format!("section {} {}\n", sec.x, sec.samples.len()));
                for s in &sec.samples {
                    out.push_str(&format!("{} {} {}\n", s.y, s.velocity[0], s.velocity[1]));
                }
            }
        }
        MeasurementData::Subdomains { elements, field } => {
            out.push_str(&format!("subdomains {}\n", elements.len()));
            for set in elements {
                out.push_str(&format!("elements {}", set.len()));
                for e in set {
                    out.push_str(&format!(" {e}"));
                }
                out.push('\n');
            }
            write_field(&mut out, field);
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

fn write_field(out: &mut String, field: &[f64]) {
    out.push_str(&format!("field {}\n", field.len() / 2));
    for pair in field.chunks(2) {
        out.push_str(&format!("{} {}\n", pair[0], pair[1]));
    }
}

/// Reads a measurement file written by [`save_measurements`].
pub fn load_measurements(path: impl AsRef<Path>) -> Result<MeasurementSet> {
    let text = std::fs::read_to_string(path)?;
    parse_measurements(&text)
}

pub fn parse_measurements(text: &str) -> Result<MeasurementSet> {
    let mut lines: Vec<(usize, Vec<&str>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let significant = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = significant.split_whitespace().collect();
        if !tokens.is_empty() {
            lines.push((idx + 1, tokens));
        }
    }
    let mut cursor = 0usize;
    let mut next = |expect: &str| -> Result<(usize, Vec<&str>)> {
        let item = lines.get(cursor).cloned().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of file, expected {expect}"),
        })?;
        cursor += 1;
        Ok(item)
    };
    let num = |tok: &str, line: usize, what: &str| -> Result<f64> {
        tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid {what}: `{tok}`"),
        })
    };

    let (line, header) = next("`measurements 1` header")?;
    if header != ["measurements", "1"] {
        return Err(Error::Parse {
            line,
            message: "expected header `measurements 1`".into(),
        });
    }
    let (line, toks) = next("`variant` line")?;
    if toks.len() != 2 || toks[0] != "variant" {
        return Err(Error::Parse {
            line,
            message: "expected `variant full|sections|subdomains`".into(),
        });
    }
    let variant = toks[1].to_string();
    if !["full", "sections", "subdomains"].contains(&variant.as_str()) {
        return Err(Error::Parse {
            line,
            message: format!("unknown variant `{variant}`"),
        });
    }

    let mut noise = None;
    let mut ground_truth = None;
    let (mut line, mut toks) = next("measurement body")?;
    if toks[0] == "noise" {
        if toks.len() != 4 {
            return Err(Error::Parse {
                line,
                message: "expected `noise <sigma> <seed> <rng>`".into(),
            });
        }
        noise = Some(NoiseMeta {
            sigma: num(toks[1], line, "sigma")?,
            seed: toks[2].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid seed `{}`", toks[2]),
            })?,
            rng: toks[3].to_string(),
        });
        let n = next("measurement body")?;
        line = n.0;
        toks = n.1;
    }
    if toks[0] == "gstar" {
        if toks.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected `gstar <count>`".into(),
            });
        }
        let count: usize = toks[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid count `{}`", toks[1]),
        })?;
        let mut params = Vec::with_capacity(count);
        let mut gx = Vec::with_capacity(count);
        let mut gy = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, t) = next("ground-truth sample")?;
            if t.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: "expected `<s> <gx> <gy>`".into(),
                });
            }
            params.push(num(t[0], line, "parameter")?);
            gx.push(num(t[1], line, "value")?);
            gy.push(num(t[2], line, "value")?);
        }
        ground_truth = Some(ControlProfile::new(params, gx, gy)?);
        let n = next("measurement body")?;
        line = n.0;
        toks = n.1;
    }

    let read_field = |cursor: &mut usize, line: usize, toks: &[&str]| -> Result<Vec<f64>> {
        if toks.len() != 2 || toks[0] != "field" {
            return Err(Error::Parse {
                line,
                message: "expected `field <count>`".into(),
            });
        }
        let count: usize = toks[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid count `{}`", toks[1]),
        })?;
        let mut field = Vec::with_capacity(2 * count);
        for _ in 0..count {
            let item = lines.get(*cursor).cloned().ok_or_else(|| Error::Parse {
                line: 0,
                message: "unexpected end of file in field block".into(),
            })?;
            *cursor += 1;
            let (line, t) = item;
            if t.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: "expected `<ux> <uy>`".into(),
                });
            }
            field.push(num(t[0], line, "velocity")?);
            field.push(num(t[1], line, "velocity")?);
        }
        Ok(field)
    };

    let data = match variant.as_str() {
        "full" => MeasurementData::Full {
            field: read_field(&mut cursor, line, &toks)?,
        },
        "sections" => {
            if toks.len() != 2 || toks[0] != "sections" {
                return Err(Error::Parse {
                    line,
                    message: "expected `sections <count>`".into(),
                });
            }
            let count: usize = toks[1].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid count `{}`", toks[1]),
            })?;
            let mut sections = Vec::with_capacity(count);
            for _ in 0..count {
                let (line, t) = next("`section` line")?;
                if t.len() != 3 || t[0] != "section" {
                    return Err(Error::Parse {
                        line,
                        message: "expected `section <x> <count>`".into(),
                    });
                }
                let x = num(t[1], line, "section position")?;
                let k: usize = t[2].parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid count `{}`", t[2]),
                })?;
                let mut samples = Vec::with_capacity(k);
                for _ in 0..k {
                    let (line, s) = next("section sample")?;
                    if s.len() != 3 {
                        return Err(Error::Parse {
                            line,
                            message: "expected `<y> <ux> <uy>`".into(),
                        });
                    }
                    samples.push(SectionSample {
                        y: num(s[0], line, "sample position")?,
                        velocity: [num(s[1], line, "velocity")?, num(s[2], line, "velocity")?],
                    });
                }
                sections.push(SectionMeasurement { x, samples });
            }
            MeasurementData::Sections { sections }
        }
        "subdomains" => {
            if toks.len() != 2 || toks[0] != "subdomains" {
                return Err(Error::Parse {
                    line,
                    message: "expected `subdomains <count>`".into(),
                });
            }
            let count: usize = toks[1].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid count `{}`", toks[1]),
            })?;
            let mut elements = Vec::with_capacity(count);
            for _ in 0..count {
                let (line, t) = next("`elements` line")?;
                if t.len() < 2 || t[0] != "elements" {
                    return Err(Error::Parse {
                        line,
                        message: "expected `elements <count> <ids...>`".into(),
                    });
                }
                let k: usize = t[1].parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid count `{}`", t[1]),
                })?;
                if t.len() != 2 + k {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected {k} element ids, got {}", t.len() - 2),
                    });
                }
                let ids: Result<Vec<usize>> = t[2..]
                    .iter()
                    .map(|tok| {
                        tok.parse().map_err(|_| Error::Parse {
                            line,
                            message: format!("invalid element id `{tok}`"),
                        })
                    })
                    .collect();
                elements.push(ids?);
            }
            let (line, toks) = next("`field` block")?;
            MeasurementData::Subdomains {
                elements,
                field: read_field(&mut cursor, line, &toks)?,
            }
        }
        _ => unreachable!(),
    };

    if cursor < lines.len() {
        return Err(Error::Parse {
            line: lines[cursor].0,
            message: "trailing content after measurement data".into(),
        });
    }

    Ok(MeasurementSet {
        data,
        noise,
        ground_truth,
    })
}
