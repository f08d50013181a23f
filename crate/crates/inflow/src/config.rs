//! Flat `key = value` experiment configuration with dotted sections.
//!
//! Lines are `key = value`, `#` starts a comment, blank lines are ignored.
//! Unknown and duplicate keys are rejected with the offending line. Every
//! run directory receives an echo of the fully resolved configuration
//! (defaults filled in), and re-parsing the echo yields the same
//! configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::force::{BodyForce, ConstantForce, ZeroForce};
use crate::mesh::StenosisSpec;
use crate::synthetic::ProfileKind;

/// Body-force specification: `none` or `constant <fx> <fy>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceSpec {
    None,
    Constant([f64; 2]),
}

impl ForceSpec {
    pub fn instantiate(&self) -> Box<dyn BodyForce> {
        match self {
            ForceSpec::None => Box::new(ZeroForce),
            ForceSpec::Constant(v) => Box::new(ConstantForce(*v)),
        }
    }

    fn to_value(self) -> String {
        match self {
            ForceSpec::None => "none".into(),
            ForceSpec::Constant([x, y]) => format!("constant {x} {y}"),
        }
    }
}

/// Inlet profile specification (`zero` kind allowed for initial guesses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    pub kind: Option<ProfileKind>,
    pub amplitude: f64,
    /// Ratio of the tangential to the normal component.
    pub tangential: f64,
}

impl ProfileSpec {
    fn kind_value(&self) -> String {
        self.kind.map_or("zero".into(), |k| k.as_str().into())
    }
}

/// Observation-region specification before mesh resolution. Subdomains are
/// given as x-ranges `lo:hi`; elements whose centroid falls in a range form
/// one patch.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaPartConfig {
    Full,
    Sections(Vec<f64>),
    SubdomainBands(Vec<(f64, f64)>),
}

impl OmegaPartConfig {
    fn to_value(&self) -> String {
        match self {
            OmegaPartConfig::Full => "full".into(),
            OmegaPartConfig::Sections(xs) => {
                let mut s = "sections".to_string();
                for x in xs {
                    s.push_str(&format!(" {x}"));
                }
                s
            }
            OmegaPartConfig::SubdomainBands(bands) => {
                let mut s = "subdomains".to_string();
                for (lo, hi) in bands {
                    s.push_str(&format!(" {lo}:{hi}"));
                }
                s
            }
        }
    }

    /// Resolves band specifications to element index sets over a mesh.
    pub fn resolve(&self, mesh: &crate::mesh::Mesh) -> Result<crate::cost::OmegaPartSpec> {
        match self {
            OmegaPartConfig::Full => Ok(crate::cost::OmegaPartSpec::FullDomain),
            OmegaPartConfig::Sections(xs) => {
                Ok(crate::cost::OmegaPartSpec::CrossSections(xs.clone()))
            }
            OmegaPartConfig::SubdomainBands(bands) => {
                let mut sets = Vec::with_capacity(bands.len());
                for &(lo, hi) in bands {
                    let mut set = Vec::new();
                    for (t, tri) in mesh.triangles.iter().enumerate() {
                        let cx = tri.iter().map(|&n| mesh.nodes[n][0]).sum::<f64>() / 3.0;
                        if cx >= lo && cx < hi {
                            set.push(t);
                        }
                    }
                    if set.is_empty() {
                        return Err(Error::InvalidParameter(format!(
                            "subdomain band {lo}:{hi} captures no elements"
                        )));
                    }
                    sets.push(set);
                }
                Ok(crate::cost::OmegaPartSpec::Subdomains(sets))
            }
        }
    }
}

/// Admissible-radius policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoSpec {
    /// Calibrate per mesh from a contraction sweep.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub length: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub stenosis: Option<StenosisSpec>,
    /// When set, subcommands load this mesh instead of generating one.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub armijo_sigma: f64,
    pub step_shrink: f64,
    pub initial_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostConfigSpec {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub omega_part: OmegaPartConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub amplitudes: Vec<f64>,
    pub viscosities: Vec<f64>,
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub mesh: MeshConfig,
    pub viscosity: f64,
    pub force: ForceSpec,
    pub inlet: ProfileSpec,
    pub cost: CostConfigSpec,
    pub rho: RhoSpec,
    pub measurements_path: Option<PathBuf>,
    pub twin: ProfileSpec,
    pub noise_sigma: f64,
    pub solver: SolverConfig,
    pub optimizer: OptimizerConfig,
    pub init: ProfileSpec,
    pub sweep: SweepConfig,
    pub verify_cases: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            mesh: MeshConfig {
                length: 5.0,
                height: 1.0,
                nx: 40,
                ny: 8,
                stenosis: None,
                path: None,
            },
            viscosity: 0.1,
            force: ForceSpec::None,
            inlet: ProfileSpec {
                kind: Some(ProfileKind::Parabolic),
                amplitude: 1.0,
                tangential: 0.0,
            },
            cost: CostConfigSpec {
                beta1: 1.0,
                beta2: 1e-6,
                beta3: 1e-6,
                omega_part: OmegaPartConfig::Full,
            },
            rho: RhoSpec::Auto,
            measurements_path: None,
            twin: ProfileSpec {
                kind: Some(ProfileKind::Sine),
                amplitude: 0.5,
                tangential: 0.0,
            },
            noise_sigma: 0.0,
            solver: SolverConfig {
                tolerance: 1e-8,
                max_iterations: 50,
                damping: 1.0,
            },
            optimizer: OptimizerConfig {
                max_iterations: 200,
                gradient_tolerance: 1e-6,
                armijo_sigma: 1e-4,
                step_shrink: 0.5,
                initial_step: 1.0,
            },
            init: ProfileSpec {
                kind: None,
                amplitude: 0.0,
                tangential: 0.0,
            },
            sweep: SweepConfig {
                amplitudes: vec![0.1, 0.5, 1.0, 2.0, 4.0],
                viscosities: vec![0.05],
            },
            verify_cases: 30,
        }
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text)
}

struct RawEntry {
    line: usize,
    value: String,
}

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "mesh.length",
    "mesh.height",
    "mesh.nx",
    "mesh.ny",
    "mesh.stenosis.amplitude",
    "mesh.stenosis.center",
    "mesh.stenosis.width",
    "mesh.path",
    "flow.viscosity",
    "flow.force",
    "inlet.kind",
    "inlet.amplitude",
    "inlet.tangential",
    "cost.beta1",
    "cost.beta2",
    "cost.beta3",
    "cost.omega_part",
    "admissible.rho",
    "measurements.path",
    "twin.kind",
    "twin.amplitude",
    "twin.tangential",
    "noise.sigma",
    "solver.tolerance",
    "solver.max_iterations",
    "solver.damping",
    "optimizer.max_iterations",
    "optimizer.gradient_tolerance",
    "optimizer.armijo_sigma",
    "optimizer.step_shrink",
    "optimizer.initial_step",
    "init.kind",
    "init.amplitude",
    "init.tangential",
    "sweep.amplitudes",
    "sweep.viscosities",
    "verify.cases",
];

pub fn parse_config_text(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<String, RawEntry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let significant = raw.split('#').next().unwrap_or("").trim();
        if significant.is_empty() {
            continue;
        }
        let Some((key, value)) = significant.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, got `{significant}`"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config {
                key,
                line: Some(line),
                message: "unknown key".into(),
            });
        }
        if entries.contains_key(&key) {
            return Err(Error::Config {
                key,
                line: Some(line),
                message: "duplicate key".into(),
            });
        }
        entries.insert(key, RawEntry { line, value });
    }
    build_config(&entries)
}

fn cfg_err(key: &str, entry: Option<&RawEntry>, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        line: entry.map(|e| e.line),
        message: message.into(),
    }
}

fn build_config(entries: &BTreeMap<String, RawEntry>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();

    let get = |key: &str| entries.get(key);
    let parse_f64 = |key: &str| -> Result<Option<f64>> {
        match get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| cfg_err(key, Some(e), format!("invalid number `{}`", e.value))),
        }
    };
    let parse_usize = |key: &str| -> Result<Option<usize>> {
        match get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| cfg_err(key, Some(e), format!("invalid integer `{}`", e.value))),
        }
    };
    let parse_kind = |key: &str| -> Result<Option<Option<ProfileKind>>> {
        match get(key) {
            None => Ok(None),
            Some(e) => {
                if e.value == "zero" {
                    Ok(Some(None))
                } else {
                    ProfileKind::parse(&e.value)
                        .map(|k| Some(Some(k)))
                        .ok_or_else(|| {
                            cfg_err(
                                key,
                                Some(e),
                                format!(
                                    "unknown profile kind `{}` (zero|parabolic|sine|bump)",
                                    e.value
                                ),
                            )
                        })
                }
            }
        }
    };
    let parse_floats = |key: &str| -> Result<Option<Vec<f64>>> {
        match get(key) {
            None => Ok(None),
            Some(e) => {
                let values: std::result::Result<Vec<f64>, _> =
                    e.value.split_whitespace().map(str::parse).collect();
                values.map(Some).map_err(|_| {
                    cfg_err(key, Some(e), format!("invalid number list `{}`", e.value))
                })
            }
        }
    };

    if let Some(e) = get("seed") {
        cfg.seed = e
            .value
            .parse()
            .map_err(|_| cfg_err("seed", Some(e), format!("invalid seed `{}`", e.value)))?;
    }
    if let Some(v) = parse_f64("mesh.length")? {
        cfg.mesh.length = v;
    }
    if let Some(v) = parse_f64("mesh.height")? {
        cfg.mesh.height = v;
    }
    if let Some(v) = parse_usize("mesh.nx")? {
        cfg.mesh.nx = v;
    }
    if let Some(v) = parse_usize("mesh.ny")? {
        cfg.mesh.ny = v;
    }
    if !(cfg.mesh.length > 0.0) || !(cfg.mesh.height > 0.0) {
        return Err(cfg_err(
            "mesh.length",
            get("mesh.length"),
            "channel dimensions must be positive",
        ));
    }
    let sten_amp = parse_f64("mesh.stenosis.amplitude")?.unwrap_or(0.0);
    if sten_amp < 0.0 {
        return Err(cfg_err(
            "mesh.stenosis.amplitude",
            get("mesh.stenosis.amplitude"),
            "stenosis amplitude must be nonnegative",
        ));
    }
    if sten_amp > 0.0 {
        cfg.mesh.stenosis = Some(StenosisSpec {
            amplitude: sten_amp,
            center: parse_f64("mesh.stenosis.center")?.unwrap_or(cfg.mesh.length / 2.0),
            width: parse_f64("mesh.stenosis.width")?.unwrap_or(1.0),
        });
    }
    if let Some(e) = get("mesh.path") {
        if !e.value.is_empty() {
            cfg.mesh.path = Some(PathBuf::from(&e.value));
        }
    }
    if let Some(v) = parse_f64("flow.viscosity")? {
        cfg.viscosity = v;
    }
    if !(cfg.viscosity > 0.0) {
        return Err(cfg_err(
            "flow.viscosity",
            get("flow.viscosity"),
            "viscosity must be positive",
        ));
    }
    if let Some(e) = get("flow.force") {
        let toks: Vec<&str> = e.value.split_whitespace().collect();
        cfg.force = match toks.as_slice() {
            ["none"] => ForceSpec::None,
            ["constant", fx, fy] => {
                let fx = fx.parse().map_err(|_| {
                    cfg_err("flow.force", Some(e), format!("invalid component `{fx}`"))
                })?;
                let fy = fy.parse().map_err(|_| {
                    cfg_err("flow.force", Some(e), format!("invalid component `{fy}`"))
                })?;
                ForceSpec::Constant([fx, fy])
            }
            _ => {
                return Err(cfg_err(
                    "flow.force",
                    Some(e),
                    format!("expected `none` or `constant <fx> <fy>`, got `{}`", e.value),
                ))
            }
        };
    }

    for slot in 0..3usize {
        let (kind_key, amp_key, tan_key) = match slot {
            0 => ("inlet.kind", "inlet.amplitude", "inlet.tangential"),
            1 => ("twin.kind", "twin.amplitude", "twin.tangential"),
            _ => ("init.kind", "init.amplitude", "init.tangential"),
        };
        let kind = parse_kind(kind_key)?;
        let amp = parse_f64(amp_key)?;
        let tan = parse_f64(tan_key)?;
        let spec = match slot {
            0 => &mut cfg.inlet,
            1 => &mut cfg.twin,
            _ => &mut cfg.init,
        };
        if let Some(kind) = kind {
            spec.kind = kind;
        }
        if let Some(v) = amp {
            spec.amplitude = v;
        }
        if let Some(v) = tan {
            spec.tangential = v;
        }
        if !spec.amplitude.is_finite() {
            return Err(cfg_err(amp_key, get(amp_key), "amplitude must be finite"));
        }
    }

    if let Some(v) = parse_f64("cost.beta1")? {
        cfg.cost.beta1 = v;
    }
    if !(cfg.cost.beta1 > 0.0) {
        return Err(cfg_err(
            "cost.beta1",
            get("cost.beta1"),
            "beta1 must be positive",
        ));
    }
    if let Some(v) = parse_f64("cost.beta2")? {
        cfg.cost.beta2 = v;
    }
    if let Some(v) = parse_f64("cost.beta3")? {
        cfg.cost.beta3 = v;
    }
    if !(cfg.cost.beta2 >= 0.0) {
        return Err(cfg_err(
            "cost.beta2",
            get("cost.beta2"),
            "weights must be nonnegative",
        ));
    }
    if !(cfg.cost.beta3 >= 0.0) {
        return Err(cfg_err(
            "cost.beta3",
            get("cost.beta3"),
            "weights must be nonnegative",
        ));
    }

    if let Some(e) = get("cost.omega_part") {
        let toks: Vec<&str> = e.value.split_whitespace().collect();
        cfg.cost.omega_part = match toks.split_first() {
            Some((&"full", [])) => OmegaPartConfig::Full,
            Some((&"sections", rest)) if !rest.is_empty() => {
                let xs: std::result::Result<Vec<f64>, _> =
                    rest.iter().map(|t| t.parse()).collect();
                let xs = xs.map_err(|_| {
                    cfg_err("cost.omega_part", Some(e), "invalid section position")
                })?;
                for w in xs.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(cfg_err(
                            "cost.omega_part",
                            Some(e),
                            format!(
                                "section positions must be strictly increasing, got {} then {}",
                                w[0], w[1]
                            ),
                        ));
                    }
                }
                OmegaPartConfig::Sections(xs)
            }
            Some((&"subdomains", rest)) if !rest.is_empty() => {
                let mut bands: Vec<(f64, f64)> = Vec::with_capacity(rest.len());
                for tok in rest {
                    let Some((lo, hi)) = tok.split_once(':') else {
                        return Err(cfg_err(
                            "cost.omega_part",
                            Some(e),
                            format!("expected `lo:hi` band, got `{tok}`"),
                        ));
                    };
                    let lo: f64 = lo.parse().map_err(|_| {
                        cfg_err(
                            "cost.omega_part",
                            Some(e),
                            format!("invalid band bound `{lo}`"),
                        )
                    })?;
                    let hi: f64 = hi.parse().map_err(|_| {
                        cfg_err(
                            "cost.omega_part",
                            Some(e),
                            format!("invalid band bound `{hi}`"),
                        )
                    })?;
                    if !(lo < hi) {
                        return Err(cfg_err(
                            "cost.omega_part",
                            Some(e),
                            format!("band `{tok}` must satisfy lo < hi"),
                        ));
                    }
                    if let Some(&(_, prev_hi)) = bands.last() {
                        if lo < prev_hi {
                            return Err(cfg_err(
                                "cost.omega_part",
                                Some(e),
                                "subdomain bands must be disjoint and increasing",
                            ));
                        }
                    }
                    bands.push((lo, hi));
                }
                OmegaPartConfig::SubdomainBands(bands)
            }
            _ => {
                return Err(cfg_err(
                    "cost.omega_part",
                    Some(e),
                    format!(
                        "expected `full`, `sections <x...>` or `subdomains <lo:hi...>`, got `{}`",
                        e.value
                    ),
                ))
            }
        };
    }

    if let Some(e) = get("admissible.rho") {
        cfg.rho = if e.value == "auto" {
            RhoSpec::Auto
        } else {
            let v: f64 = e.value.parse().map_err(|_| {
                cfg_err(
                    "admissible.rho",
                    Some(e),
                    format!("invalid radius `{}`", e.value),
                )
            })?;
            if !(v > 0.0) {
                return Err(cfg_err(
                    "admissible.rho",
                    Some(e),
                    "radius must be positive",
                ));
            }
            RhoSpec::Fixed(v)
        };
    }
    if let Some(e) = get("measurements.path") {
        if !e.value.is_empty() {
            cfg.measurements_path = Some(PathBuf::from(&e.value));
        }
    }
    if let Some(v) = parse_f64("noise.sigma")? {
        if v < 0.0 {
            return Err(cfg_err(
                "noise.sigma",
                get("noise.sigma"),
                "noise level must be nonnegative",
            ));
        }
        cfg.noise_sigma = v;
    }
    if let Some(v) = parse_f64("solver.tolerance")? {
        cfg.solver.tolerance = v;
    }
    if let Some(v) = parse_usize("solver.max_iterations")? {
        cfg.solver.max_iterations = v;
    }
    if let Some(v) = parse_f64("solver.damping")? {
        cfg.solver.damping = v;
    }
    if !(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0) {
        return Err(cfg_err(
            "solver.damping",
            get("solver.damping"),
            "damping must lie in (0, 1]",
        ));
    }
    if let Some(v) = parse_usize("optimizer.max_iterations")? {
        cfg.optimizer.max_iterations = v;
    }
    if let Some(v) = parse_f64("optimizer.gradient_tolerance")? {
        cfg.optimizer.gradient_tolerance = v;
    }
    if let Some(v) = parse_f64("optimizer.armijo_sigma")? {
        cfg.optimizer.armijo_sigma = v;
    }
    if let Some(v) = parse_f64("optimizer.step_shrink")? {
        cfg.optimizer.step_shrink = v;
    }
    if let Some(v) = parse_f64("optimizer.initial_step")? {
        cfg.optimizer.initial_step = v;
    }
    if let Some(v) = parse_floats("sweep.amplitudes")? {
        if v.is_empty() {
            return Err(cfg_err(
                "sweep.amplitudes",
                get("sweep.amplitudes"),
                "need at least one amplitude",
            ));
        }
        cfg.sweep.amplitudes = v;
    }
    if let Some(v) = parse_floats("sweep.viscosities")? {
        if v.is_empty() || v.iter().any(|&nu| nu <= 0.0) {
            return Err(cfg_err(
                "sweep.viscosities",
                get("sweep.viscosities"),
                "viscosities must be positive",
            ));
        }
        cfg.sweep.viscosities = v;
    }
    if let Some(v) = parse_usize("verify.cases")? {
        if v < 10 {
            return Err(cfg_err(
                "verify.cases",
                get("verify.cases"),
                "estimate verification needs at least 10 cases",
            ));
        }
        cfg.verify_cases = v;
    }
    Ok(cfg)
}

/// Canonical echo of a configuration: all keys, sorted, defaults filled.
pub fn echo_config(cfg: &ExperimentConfig) -> String {
    let mut lines: BTreeMap<String, String> = BTreeMap::new();
    let mut set = |k: &str, v: String| {
        lines.insert(k.to_string(), v);
    };
    set("seed", cfg.seed.to_string());
    set("mesh.length", cfg.mesh.length.to_string());
    set("mesh.height", cfg.mesh.height.to_string());
    set("mesh.nx", cfg.mesh.nx.to_string());
    set("mesh.ny", cfg.mesh.ny.to_string());
    if let Some(s) = &cfg.mesh.stenosis {
        set("mesh.stenosis.amplitude", s.amplitude.to_string());
        set("mesh.stenosis.center", s.center.to_string());
        set("mesh.stenosis.width", s.width.to_string());
    } else {
        set("mesh.stenosis.amplitude", "0".into());
    }
    if let Some(p) = &cfg.mesh.path {
        set("mesh.path", p.display().to_string());
    }
    set("flow.viscosity", cfg.viscosity.to_string());
    set("flow.force", cfg.force.to_value());
    set("inlet.kind", cfg.inlet.kind_value());
    set("inlet.amplitude", cfg.inlet.amplitude.to_string());
    set("inlet.tangential", cfg.inlet.tangential.to_string());
    set("cost.beta1", cfg.cost.beta1.to_string());
    set("cost.beta2", cfg.cost.beta2.to_string());
    set("cost.beta3", cfg.cost.beta3.to_string());
    set("cost.omega_part", cfg.cost.omega_part.to_value());
    set(
        "admissible.rho",
        match cfg.rho {
            RhoSpec::Auto => "auto".into(),
            RhoSpec::Fixed(v) => v.to_string(),
        },
    );
    if let Some(p) = &cfg.measurements_path {
        set("measurements.path", p.display().to_string());
    }
    set("twin.kind", cfg.twin.kind_value());
    set("twin.amplitude", cfg.twin.amplitude.to_string());
    set("twin.tangential", cfg.twin.tangential.to_string());
    set("noise.sigma", cfg.noise_sigma.to_string());
    set("solver.tolerance", cfg.solver.tolerance.to_string());
    set(
        "solver.max_iterations",
        cfg.solver.max_iterations.to_string(),
    );
    set("solver.damping", cfg.solver.damping.to_string());
    set(
        "optimizer.max_iterations",
        cfg.optimizer.max_iterations.to_string(),
    );
    set(
        "optimizer.gradient_tolerance",
        cfg.optimizer.gradient_tolerance.to_string(),
    );
    set(
        "optimizer.armijo_sigma",
        cfg.optimizer.armijo_sigma.to_string(),
    );
    set("optimizer.step_shrink", cfg.optimizer.step_shrink.to_string());
    set(
        "optimizer.initial_step",
        cfg.optimizer.initial_step.to_string(),
    );
    set("init.kind", cfg.init.kind_value());
    set("init.amplitude", cfg.init.amplitude.to_string());
    set("init.tangential", cfg.init.tangential.to_string());
    set(
        "sweep.amplitudes",
        cfg.sweep
            .amplitudes
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    set(
        "sweep.viscosities",
        cfg.sweep
            .viscosities
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    set("verify.cases", cfg.verify_cases.to_string());

    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}
