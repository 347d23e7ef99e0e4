//! Flat TOML experiment recipes.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use splitdg_core::timeint::InitialCondition;
use splitdg_core::{
    BoundaryCondition, EquationForm, FluxKind, Mesh, NodeFamily, OverIntegrationSpeed, Speed, SplitConfig,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Spectrum,
    March,
    Sweep,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GaussLobatto,
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flux {
    Central,
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bc {
    Periodic,
    InflowOutflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedKind {
    Bump,
    Constant,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OiSpeed {
    Exact,
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    Gaussian,
    Sine,
    Constant,
    Random,
}

/// A scalar or a list in the file; lists expand into a sweep.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn one<T>(v: T) -> OneOrMany<T> {
    OneOrMany::One(v)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_n")]
    pub n: OneOrMany<usize>,
    #[serde(default = "default_k")]
    pub k: OneOrMany<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: OneOrMany<f64>,
    #[serde(default = "default_theta")]
    pub theta: OneOrMany<u8>,
    #[serde(default = "default_family")]
    pub family: OneOrMany<Family>,
    #[serde(default = "default_flux")]
    pub flux: Flux,
    #[serde(default = "default_bc")]
    pub bc: Bc,
    /// `g_L(t) = inflow_amplitude · cos(inflow_frequency · t)`.
    #[serde(default)]
    pub inflow_amplitude: f64,
    #[serde(default)]
    pub inflow_frequency: f64,
    pub q_over: Option<usize>,
    #[serde(default = "default_oi_speed")]
    pub oi_speed: OiSpeed,
    #[serde(default = "default_speed")]
    pub speed: SpeedKind,
    pub speed_value: Option<f64>,
    pub speed_coeffs: Option<Vec<f64>>,
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub force: bool,
    #[serde(default = "default_initial")]
    pub initial: Initial,
    #[serde(default = "default_initial_mode")]
    pub initial_mode: u32,
    #[serde(default = "default_initial_value")]
    pub initial_value: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_svg")]
    pub svg: bool,
    /// Number of eigenpairs whose residual is checked; 0 skips the check.
    #[serde(default)]
    pub residual_samples: usize,
}

fn default_mode() -> Mode {
    Mode::Spectrum
}
fn default_n() -> OneOrMany<usize> {
    one(5)
}
fn default_k() -> OneOrMany<usize> {
    one(20)
}
fn default_alpha() -> OneOrMany<f64> {
    one(1.0)
}
fn default_theta() -> OneOrMany<u8> {
    one(0)
}
fn default_family() -> OneOrMany<Family> {
    one(Family::GaussLobatto)
}
fn default_flux() -> Flux {
    Flux::Central
}
fn default_bc() -> Bc {
    Bc::Periodic
}
fn default_oi_speed() -> OiSpeed {
    OiSpeed::Exact
}
fn default_speed() -> SpeedKind {
    SpeedKind::Bump
}
fn default_domain() -> [f64; 2] {
    [-1.0, 1.0]
}
fn default_cfl() -> f64 {
    splitdg_core::timeint::DEFAULT_CFL
}
fn default_t_final() -> f64 {
    1.0
}
fn default_sample_every() -> usize {
    splitdg_core::timeint::DEFAULT_SAMPLE_EVERY
}
fn default_initial() -> Initial {
    Initial::Gaussian
}
fn default_initial_mode() -> u32 {
    1
}
fn default_initial_value() -> f64 {
    1.0
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_svg() -> bool {
    true
}

/// One fully resolved point of the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub family: NodeFamily,
    pub n: usize,
    pub k: usize,
    pub theta: u8,
    pub alpha: f64,
}

impl Case {
    pub fn split_config(&self, cfg: &ExperimentConfig) -> SplitConfig {
        let form = if self.theta == 0 {
            EquationForm::Conservative
        } else {
            EquationForm::NonConservative
        };
        let split = SplitConfig::new(self.alpha, form, self.family, self.n);
        match cfg.q_over {
            Some(q) => split.with_over_integration(
                q,
                match cfg.oi_speed {
                    OiSpeed::Exact => OverIntegrationSpeed::Exact,
                    OiSpeed::Interpolated => OverIntegrationSpeed::Interpolated,
                },
            ),
            None => split,
        }
    }

    pub fn family_tag(&self) -> &'static str {
        match self.family {
            NodeFamily::GaussLobatto => "gl",
            NodeFamily::Gauss => "gauss",
        }
    }

    /// File-name label listing only the parameters that vary in `cfg`.
    pub fn label(&self, cfg: &ExperimentConfig) -> String {
        let mut parts = Vec::new();
        if cfg.family.values().len() > 1 {
            parts.push(self.family_tag().to_string());
        }
        if cfg.n.values().len() > 1 {
            parts.push(format!("n{}", self.n));
        }
        if cfg.k.values().len() > 1 {
            parts.push(format!("k{}", self.k));
        }
        if cfg.theta.values().len() > 1 {
            parts.push(format!("theta{}", self.theta));
        }
        if cfg.alpha.values().len() > 1 {
            parts.push(format!("alpha{}", self.alpha));
        }
        parts.join("_")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("field `{field}`: {msg}"))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (field, empty) in [
            ("n", self.n.values().is_empty()),
            ("k", self.k.values().is_empty()),
            ("alpha", self.alpha.values().is_empty()),
            ("theta", self.theta.values().is_empty()),
            ("family", self.family.values().is_empty()),
        ] {
            if empty {
                return Err(Self::invalid(field, "empty list"));
            }
        }
        if let Some(&a) = self.alpha.values().iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Self::invalid("alpha", format!("{a} is outside [0, 1]")));
        }
        if let Some(&t) = self.theta.values().iter().find(|&&t| t > 1) {
            return Err(Self::invalid("theta", format!("{t} is neither 0 nor 1")));
        }
        if self.k.values().contains(&0) {
            return Err(Self::invalid("k", "needs at least one element"));
        }
        if !(self.domain[0] < self.domain[1]) {
            return Err(Self::invalid("domain", "needs x_min < x_max"));
        }
        if !(self.cfl > 0.0) {
            return Err(Self::invalid("cfl", "must be positive"));
        }
        if !(self.t_final > 0.0) {
            return Err(Self::invalid("t_final", "must be positive"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Self::invalid("dt", "must be positive"));
            }
        }
        if self.sample_every == 0 {
            return Err(Self::invalid("sample_every", "must be positive"));
        }
        match self.speed {
            SpeedKind::Constant => match self.speed_value {
                Some(c) if c > 0.0 => {}
                Some(c) => return Err(Self::invalid("speed_value", format!("{c} must be positive"))),
                None => return Err(Self::invalid("speed_value", "required for speed = \"constant\"")),
            },
            SpeedKind::Poly => match &self.speed_coeffs {
                Some(c) if !c.is_empty() => {
                    let speed = Speed::Poly(c.clone());
                    let (x0, x1) = (self.domain[0], self.domain[1]);
                    for i in 0..=1000 {
                        let x = x0 + (x1 - x0) * i as f64 / 1000.0;
                        let a = splitdg_core::AdvectionSpeed::value(&speed, x);
                        if !(a > 0.0) {
                            return Err(Self::invalid("speed_coeffs", format!("a({x}) = {a} is not positive")));
                        }
                    }
                }
                _ => return Err(Self::invalid("speed_coeffs", "required for speed = \"poly\"")),
            },
            SpeedKind::Bump => {
                if self.domain != [-1.0, 1.0] {
                    return Err(Self::invalid("domain", "the bump speed is defined on [-1, 1]"));
                }
            }
        }
        for case in self.cases() {
            case.split_config(self)
                .validate()
                .map_err(|e| CliError::Config(format!("case {:?}: {e}", case)))?;
        }
        Ok(())
    }

    /// Cross product of all list-valued parameters, in file order.
    pub fn cases(&self) -> Vec<Case> {
        let mut out = Vec::new();
        for family in self.family.values() {
            for n in self.n.values() {
                for k in self.k.values() {
                    for theta in self.theta.values() {
                        for alpha in self.alpha.values() {
                            out.push(Case {
                                family: match family {
                                    Family::GaussLobatto => NodeFamily::GaussLobatto,
                                    Family::Gauss => NodeFamily::Gauss,
                                },
                                n,
                                k,
                                theta,
                                alpha,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn speed(&self) -> Speed {
        match self.speed {
            SpeedKind::Bump => Speed::Bump,
            SpeedKind::Constant => Speed::Constant(self.speed_value.unwrap_or(1.0)),
            SpeedKind::Poly => Speed::Poly(self.speed_coeffs.clone().unwrap_or_default()),
        }
    }

    pub fn flux(&self) -> FluxKind {
        match self.flux {
            Flux::Central => FluxKind::Central,
            Flux::Upwind => FluxKind::Upwind,
        }
    }

    pub fn boundary(&self) -> BoundaryCondition {
        match self.bc {
            Bc::Periodic => BoundaryCondition::Periodic,
            Bc::InflowOutflow => {
                let (amp, freq) = (self.inflow_amplitude, self.inflow_frequency);
                BoundaryCondition::inflow(move |t| amp * (freq * t).cos())
            }
        }
    }

    pub fn mesh(&self, k: usize) -> Result<Mesh, CliError> {
        Ok(Mesh::uniform(self.domain[0], self.domain[1], k)?)
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self.initial {
            Initial::Gaussian => InitialCondition::Gaussian,
            Initial::Sine => InitialCondition::Sine(self.initial_mode),
            Initial::Constant => InitialCondition::Constant(self.initial_value),
            Initial::Random => InitialCondition::Random(self.seed),
        }
    }
}
