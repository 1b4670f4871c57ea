//! Declarative scenario files: JSON, complex entries as `[re, im]` pairs.
//!
//! The schema is documented in `docs/scenario.schema.json`. Parsing goes
//! through `serde_path_to_error`, so failures name the offending field.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use symcond::jc::{self, JcModelSpec, PointerCell, QubitCoherentState};
use symcond::{
    ComplexMatrix, ConservedQuantity, DensityState, MeasurementModel, ObservableOp, Outcome, PointerObservable, C64,
};

use crate::error::{from_core, CliError};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub system_state: StateConfig,
    pub observable: ObservableConfig,
    pub conserved: ConservedConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelConfig {
    JaynesCummings(JcConfig),
    Explicit(ExplicitConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcConfig {
    pub dim_system: usize,
    pub dim_apparatus: usize,
    pub theta: Angle,
    pub apparatus_state: StateConfig,
    /// Defaults to one outcome per apparatus number state.
    #[serde(default)]
    pub pointer: Option<Vec<LevelCell>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelCell {
    pub label: String,
    #[serde(default)]
    pub value: Option<f64>,
    pub levels: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitConfig {
    pub dim_system: usize,
    pub apparatus_state: StateConfig,
    pub unitary: MatrixConfig,
    pub pointer: Vec<ProjectorCell>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorCell {
    pub label: String,
    #[serde(default)]
    pub value: Option<f64>,
    pub projector: MatrixConfig,
}

/// A real number, or `{"pi": x, "over": d}` meaning `x·π/d` (`over` defaults to 1).
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Pi {
        pi: f64,
        #[serde(default)]
        over: Option<f64>,
    },
}

impl Angle {
    pub fn radians(self) -> f64 {
        match self {
            Angle::Radians(r) => r,
            Angle::Pi { pi, over } => pi * PI / over.unwrap_or(1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(r) => C64::new(r, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixConfig = Vec<Vec<Entry>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩`, qubits only.
    Coherent {
        polar: Angle,
        phase: Angle,
    },
    Matrix(MatrixConfig),
    /// Amplitudes, normalized on load.
    Pure(Vec<Entry>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableConfig {
    SigmaZ,
    SigmaX,
    SigmaY,
    Identity,
    Number,
    ExcitationSign,
    Matrix(MatrixConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservedConfig {
    Number,
    Pair {
        system: MatrixConfig,
        apparatus: MatrixConfig,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Phase,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub from: Angle,
    pub to: Angle,
    pub steps: usize,
}

/// Evenly spaced phases, both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(from: f64, to: f64, steps: usize) -> Result<Self, String> {
        if steps == 0 {
            return Err("sweep needs at least one step".into());
        }
        if !(from.is_finite() && to.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        Ok(Self { from, to, steps })
    }

    pub fn point(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.from
        } else {
            self.from + (self.to - self.from) * k as f64 / (self.steps - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.point(k)).collect()
    }
}

#[derive(Clone, Debug)]
pub enum SystemState {
    Fixed(DensityState),
    Coherent { polar: f64, phase: f64 },
}

/// A scenario resolved into validated domain objects.
#[derive(Clone, Debug)]
pub struct Experiment {
    /// Name used in error messages and reports.
    pub source: String,
    pub model: MeasurementModel,
    pub system: SystemState,
    pub observable: ObservableOp,
    pub conserved: ConservedQuantity,
    pub sweep: Option<Grid>,
    pub tolerance: f64,
}

impl Experiment {
    pub fn state(&self) -> Result<DensityState, CliError> {
        match &self.system {
            SystemState::Fixed(rho) => Ok(rho.clone()),
            SystemState::Coherent { polar, phase } => self.coherent(*polar, *phase),
        }
    }

    pub fn is_sweepable(&self) -> bool {
        matches!(self.system, SystemState::Coherent { .. })
    }

    /// System state with its phase replaced by `phase`.
    pub fn state_at_phase(&self, phase: f64) -> Result<DensityState, CliError> {
        match &self.system {
            SystemState::Coherent { polar, .. } => self.coherent(*polar, phase),
            SystemState::Fixed(_) => Err(CliError::Parse {
                path: self.source.clone(),
                message: "system_state has no sweepable phase; use a coherent state".into(),
            }),
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Result<Self, CliError> {
        match &mut self.system {
            SystemState::Coherent { phase: p, .. } => *p = phase,
            SystemState::Fixed(_) => {
                return Err(CliError::Parse {
                    path: self.source.clone(),
                    message: "system_state has no phase to override".into(),
                })
            }
        }
        Ok(self)
    }

    fn coherent(&self, polar: f64, phase: f64) -> Result<DensityState, CliError> {
        jc::qubit_coherent_state(QubitCoherentState { polar, phase }).map_err(|e| from_core(&self.source, e))
    }

    /// The built-in qubit-qubit sweep setup with the default 201-point grid.
    pub fn fig1() -> Self {
        let setup = jc::build_fig1_model().expect("built-in setup is valid");
        Self {
            source: "fig1".into(),
            model: setup.model,
            system: SystemState::Coherent {
                polar: setup.system_polar,
                phase: 0.0,
            },
            observable: setup.observable,
            conserved: setup.conserved,
            sweep: Some(Grid {
                from: 0.0,
                to: 2.0 * PI,
                steps: 201,
            }),
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

pub fn parse_scenario(text: &str, source: &str) -> Result<ScenarioConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let message = if path == "." || path.is_empty() {
            inner.to_string()
        } else {
            format!("field `{path}`: {inner}")
        };
        CliError::Parse {
            path: source.to_string(),
            message,
        }
    })
}

pub fn load_scenario(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let source = path.display().to_string();
    let config = parse_scenario(&text, &source)?;
    build(&config, &source)
}

fn parse_error(source: &str, field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Parse {
        path: source.to_string(),
        message: format!("field `{field}`: {message}"),
    }
}

fn matrix(m: &MatrixConfig, source: &str, field: &str) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| parse_error(source, field, e))
}

fn invariant(err: impl std::fmt::Display) -> CliError {
    CliError::Invariant(err.to_string())
}

fn state(config: &StateConfig, dim: usize, source: &str, field: &str) -> Result<SystemState, CliError> {
    let rho = match config {
        StateConfig::Coherent { polar, phase } => {
            if dim != 2 {
                return Err(parse_error(
                    source,
                    field,
                    format!("coherent states need dimension 2, model has {dim}"),
                ));
            }
            return Ok(SystemState::Coherent {
                polar: polar.radians(),
                phase: phase.radians(),
            });
        }
        StateConfig::Matrix(m) => DensityState::new(matrix(m, source, field)?).map_err(invariant)?,
        StateConfig::Pure(amps) => {
            let amps: Vec<C64> = amps.iter().map(|e| e.value()).collect();
            DensityState::pure(&amps).map_err(invariant)?
        }
    };
    if rho.dim() != dim {
        return Err(parse_error(
            source,
            field,
            format!("state has dimension {}, expected {dim}", rho.dim()),
        ));
    }
    Ok(SystemState::Fixed(rho))
}

fn resolved_state(config: &StateConfig, dim: usize, source: &str, field: &str) -> Result<DensityState, CliError> {
    match state(config, dim, source, field)? {
        SystemState::Fixed(rho) => Ok(rho),
        SystemState::Coherent { polar, phase } => {
            jc::qubit_coherent_state(QubitCoherentState { polar, phase }).map_err(|e| from_core(source, e))
        }
    }
}

fn observable(config: &ObservableConfig, dim: usize, source: &str) -> Result<ObservableOp, CliError> {
    let field = "observable";
    let pauli = |rows: [[C64; 2]; 2]| -> Result<ObservableOp, CliError> {
        if dim != 2 {
            return Err(parse_error(
                source,
                field,
                format!("Pauli observables need dimension 2, system has {dim}"),
            ));
        }
        let m = ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2");
        ObservableOp::new(m).map_err(invariant)
    };
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let op = match config {
        ObservableConfig::SigmaZ => pauli([[l, o], [o, -l]])?,
        ObservableConfig::SigmaX => pauli([[o, l], [l, o]])?,
        ObservableConfig::SigmaY => pauli([[o, -i], [i, o]])?,
        ObservableConfig::ExcitationSign => {
            if dim != 2 {
                return Err(parse_error(
                    source,
                    field,
                    format!("excitation_sign needs dimension 2, system has {dim}"),
                ));
            }
            jc::excitation_sign()
        }
        ObservableConfig::Identity => ObservableOp::identity(dim),
        ObservableConfig::Number => jc::number_operator(dim),
        ObservableConfig::Matrix(m) => ObservableOp::new(matrix(m, source, field)?).map_err(invariant)?,
    };
    if op.dim() != dim {
        return Err(parse_error(
            source,
            field,
            format!("observable has dimension {}, expected {dim}", op.dim()),
        ));
    }
    Ok(op)
}

fn conserved(config: &ConservedConfig, ds: usize, da: usize, source: &str) -> Result<ConservedQuantity, CliError> {
    let q = match config {
        ConservedConfig::Number => jc::number_conservation(ds, da).map_err(|e| from_core(source, e))?,
        ConservedConfig::Pair { system, apparatus } => {
            let ls = ObservableOp::new(matrix(system, source, "conserved.pair.system")?).map_err(invariant)?;
            let la = ObservableOp::new(matrix(apparatus, source, "conserved.pair.apparatus")?).map_err(invariant)?;
            if ls.dim() != ds || la.dim() != da {
                return Err(parse_error(
                    source,
                    "conserved.pair",
                    format!(
                        "expected {ds}x{ds} and {da}x{da}, found {}x{} and {}x{}",
                        ls.dim(),
                        ls.dim(),
                        la.dim(),
                        la.dim()
                    ),
                ));
            }
            ConservedQuantity::new(ls, la).map_err(|e| from_core(source, e))?
        }
    };
    Ok(q)
}

fn model(config: &ModelConfig, source: &str) -> Result<MeasurementModel, CliError> {
    match config {
        ModelConfig::JaynesCummings(jc) => {
            let mut spec = JcModelSpec::new(jc.dim_system, jc.dim_apparatus, jc.theta.radians());
            if let Some(cells) = &jc.pointer {
                spec = spec.with_pointer(
                    cells
                        .iter()
                        .map(|c| PointerCell {
                            outcome: Outcome::new(c.label.clone(), c.value),
                            levels: c.levels.clone(),
                        })
                        .collect(),
                );
            }
            spec.validate().map_err(|e| from_core(source, e))?;
            let apparatus = resolved_state(
                &jc.apparatus_state,
                jc.dim_apparatus,
                source,
                "model.jaynes-cummings.apparatus_state",
            )?;
            spec.build(apparatus).map_err(|e| from_core(source, e))
        }
        ModelConfig::Explicit(ex) => {
            let u = matrix(&ex.unitary, source, "model.explicit.unitary")?;
            if ex.dim_system == 0 || u.rows() % ex.dim_system != 0 {
                return Err(parse_error(
                    source,
                    "model.explicit.dim_system",
                    format!("{} does not divide the unitary dimension {}", ex.dim_system, u.rows()),
                ));
            }
            let da = u.rows() / ex.dim_system;
            let apparatus = resolved_state(&ex.apparatus_state, da, source, "model.explicit.apparatus_state")?;
            let outcomes = ex
                .pointer
                .iter()
                .map(|c| Outcome::new(c.label.clone(), c.value))
                .collect();
            let projectors = ex
                .pointer
                .iter()
                .enumerate()
                .map(|(k, c)| matrix(&c.projector, source, &format!("model.explicit.pointer[{k}].projector")))
                .collect::<Result<Vec<_>, _>>()?;
            let pointer = PointerObservable::new(outcomes, projectors).map_err(invariant)?;
            MeasurementModel::new(ex.dim_system, apparatus, u, pointer).map_err(invariant)
        }
    }
}

/// Builds validated objects from a parsed scenario.
pub fn build(config: &ScenarioConfig, source: &str) -> Result<Experiment, CliError> {
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(parse_error(source, "tolerance", "must be a positive number"));
    }
    let model = model(&config.model, source)?;
    let (ds, da) = (model.dim_system(), model.dim_apparatus());
    let system = state(&config.system_state, ds, source, "system_state")?;
    let observable = observable(&config.observable, ds, source)?;
    let conserved = conserved(&config.conserved, ds, da, source)?;
    let sweep = match &config.sweep {
        None => None,
        Some(s) => {
            Some(Grid::new(s.from.radians(), s.to.radians(), s.steps).map_err(|m| parse_error(source, "sweep", m))?)
        }
    };
    Ok(Experiment {
        source: source.to_string(),
        model,
        system,
        observable,
        conserved,
        sweep,
        tolerance: config.tolerance,
    })
}
