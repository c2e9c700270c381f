use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lindblad::SolverOptions;
use crate::model::{mhz, ModelParams, TruncationSpec};

/// Parameters as written in a config file: frequencies are `ν = ω/2π` in MHz.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub nu_m: f64,
    pub g: f64,
    pub eps_c: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    /// Kelvin.
    pub temperature: f64,
    pub delta: f64,
    #[serde(default)]
    pub delta_units: DeltaUnits,
    #[serde(default)]
    pub nu_0: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DeltaUnits {
    /// Multiples of Δ₀ = G²/ω_m, recomputed whenever G changes.
    #[default]
    Delta0,
    Mhz,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    pub n_cav: usize,
    pub n_mech: usize,
    #[serde(default = "default_true")]
    pub auto_converge: bool,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default)]
    pub krylov_threshold: Option<usize>,
}

fn default_true() -> bool {
    true
}

fn default_rel_tol() -> f64 {
    1e-3
}

fn default_max_dim() -> usize {
    400
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    Delta,
    G,
    Temperature,
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisName::Delta => "delta",
            AxisName::G => "g",
            AxisName::Temperature => "temperature",
        })
    }
}

/// Units of a sweep coordinate.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AxisUnits {
    /// Δ/Δ₀
    Delta0,
    /// G/ω_m
    OmegaM,
    /// ν in MHz
    Mhz,
    Kelvin,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub axis: AxisName,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub units: Option<AxisUnits>,
}

impl AxisSpec {
    pub fn units(&self) -> AxisUnits {
        self.units.unwrap_or(match self.axis {
            AxisName::Delta => AxisUnits::Delta0,
            AxisName::G => AxisUnits::OmegaM,
            AxisName::Temperature => AxisUnits::Kelvin,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("{} axis needs at least 2 points", self.axis)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::Config(format!(
                "{} axis requires start < stop (got {} and {})",
                self.axis, self.start, self.stop
            )));
        }
        let allowed = match self.axis {
            AxisName::Delta => matches!(self.units(), AxisUnits::Delta0 | AxisUnits::Mhz),
            AxisName::G => matches!(self.units(), AxisUnits::OmegaM | AxisUnits::Mhz),
            AxisName::Temperature => self.units() == AxisUnits::Kelvin,
        };
        if !allowed {
            return Err(Error::Config(format!("units {:?} do not apply to the {} axis", self.units(), self.axis)));
        }
        if self.axis == AxisName::Temperature && self.start < 0.0 {
            return Err(Error::Config("negative temperature".into()));
        }
        Ok(())
    }

    /// Evenly spaced grid including both endpoints.
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + span * i as f64 / last })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    MeanN,
    G2,
    G3,
    G32,
    C2,
    PN,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::MeanN,
        Observable::G2,
        Observable::G3,
        Observable::G32,
        Observable::C2,
        Observable::PN,
    ];
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Relative paths resolve against the config file's directory; standard
    /// output when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_format() -> String {
    "csv".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: None,
            format: default_format(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "all_observables")]
    pub observables: Vec<Observable>,
    pub params: ParamsSection,
    pub truncation: TruncationSection,
    pub sweep: AxisSpec,
    /// Inner axis of a two-dimensional scan.
    #[serde(default)]
    pub heatmap: Option<AxisSpec>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn all_observables() -> Vec<Observable> {
    Observable::ALL.to_vec()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.observables.sort();
        cfg.observables.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if let Some(inner) = &self.heatmap {
            inner.validate()?;
            if inner.axis == self.sweep.axis {
                return Err(Error::Config(format!("both axes sweep {}", inner.axis)));
            }
        }
        if self.output.format != "csv" {
            return Err(Error::Config(format!("unsupported output format {:?}", self.output.format)));
        }
        self.base_params().validate()?;
        self.truncation().validate()?;
        if self.truncation().joint_dim() > self.truncation.max_dim {
            return Err(Error::DimensionOverflow {
                dim: self.truncation().joint_dim(),
                max_dim: self.truncation.max_dim,
            });
        }
        for coords in self.grid() {
            self.params_at(&coords).validate()?;
        }
        Ok(())
    }

    pub fn truncation(&self) -> TruncationSpec {
        let t = &self.truncation;
        TruncationSpec {
            n_cav: t.n_cav,
            n_mech: t.n_mech,
            auto_converge: t.auto_converge,
            rel_tol: t.rel_tol,
            max_dim: t.max_dim,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(k) = self.truncation.krylov_threshold {
            opts.krylov_threshold = k;
        }
        opts
    }

    /// Model parameters with every sweep coordinate at its file value.
    pub fn base_params(&self) -> ModelParams {
        self.params_at(&[])
    }

    /// Model parameters at the given axis coordinates. `G` is applied first
    /// so a detuning in units of Δ₀ follows the current coupling.
    pub fn params_at(&self, coords: &[(AxisSpec, f64)]) -> ModelParams {
        let p = &self.params;
        let mut out = ModelParams {
            omega_m: mhz(p.nu_m),
            g: mhz(p.g),
            eps_c: mhz(p.eps_c),
            gamma: mhz(p.gamma),
            gamma_m: mhz(p.gamma_m),
            delta: 0.0,
            temperature: p.temperature,
            omega_0: p.nu_0.map(mhz),
        };
        let find = |name: AxisName| coords.iter().find(|(a, _)| a.axis == name);
        if let Some((spec, v)) = find(AxisName::G) {
            out.g = match spec.units() {
                AxisUnits::OmegaM => v * out.omega_m,
                _ => mhz(*v),
            };
        }
        if let Some((_, v)) = find(AxisName::Temperature) {
            out.temperature = *v;
        }
        out.delta = match find(AxisName::Delta) {
            Some((spec, v)) => match spec.units() {
                AxisUnits::Delta0 => v * out.delta0(),
                _ => mhz(*v),
            },
            None => match p.delta_units {
                DeltaUnits::Delta0 => p.delta * out.delta0(),
                DeltaUnits::Mhz => mhz(p.delta),
            },
        };
        out
    }

    /// Axis coordinates of every point, outer axis first, in output order.
    pub fn grid(&self) -> Vec<Vec<(AxisSpec, f64)>> {
        let outer = self.sweep.values();
        match &self.heatmap {
            None => outer.into_iter().map(|v| vec![(self.sweep.clone(), v)]).collect(),
            Some(inner) => {
                let inner_values = inner.values();
                outer
                    .iter()
                    .flat_map(|&v| {
                        inner_values
                            .iter()
                            .map(move |&w| vec![(self.sweep.clone(), v), (inner.clone(), w)])
                    })
                    .collect()
            }
        }
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.path.as_ref().map(|p| match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    }
}
