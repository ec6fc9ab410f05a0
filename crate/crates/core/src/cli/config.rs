//! JSON scenario files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{linear_grid, Kernel, PropagatorOptions};
use crate::model::{CouplingVector, LadderModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub include_propagator: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// A simulation scenario as read from disk.
///
/// Level energies can be given directly (`energies`, drives then sit on
/// resonance), or as a ground energy `E0` plus drive frequencies `omegas`
/// (energies are then accumulated from the drives). Giving `energies` and
/// `omegas` together uses the drives verbatim, which is how a detuned
/// scenario is expressed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(rename = "E0", default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phis: Option<Vec<f64>>,
    pub couplings: Vec<f64>,
    #[serde(default)]
    pub initial_level: usize,
    pub time: TimeGrid,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default)]
    pub normalize_initial: bool,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::InvalidArgument(format!(
                "config parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn field_len(&self, field: &str, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            return Err(Error::InvalidArgument(format!(
                "field '{field}': expected {expected} entries for n = {}, got {len}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "field 'n': need at least 2 levels, got {}",
                self.n
            )));
        }
        match (&self.energies, self.e0, &self.omegas) {
            (Some(_), Some(_), _) => {
                return Err(Error::InvalidArgument(
                    "fields 'energies' and 'E0' are mutually exclusive".into(),
                ));
            }
            (None, _, None) => {
                return Err(Error::InvalidArgument(
                    "one of 'energies' or 'omegas' is required".into(),
                ));
            }
            _ => {}
        }
        if let Some(e) = &self.energies {
            self.field_len("energies", e.len(), self.n)?;
        }
        if let Some(w) = &self.omegas {
            self.field_len("omegas", w.len(), self.n - 1)?;
        }
        if let Some(p) = &self.phis {
            self.field_len("phis", p.len(), self.n - 1)?;
        }
        self.field_len("couplings", self.couplings.len(), self.n - 1)?;
        if self.initial_level >= self.n {
            return Err(Error::InvalidArgument(format!(
                "field 'initial_level': {} is out of range for n = {}",
                self.initial_level, self.n
            )));
        }
        let TimeGrid { start, stop, steps } = self.time;
        if steps < 1 {
            return Err(Error::InvalidArgument(
                "field 'time.steps' must be at least 1".into(),
            ));
        }
        if !(start >= 0.0 && stop >= start && stop.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "field 'time': need 0 <= start <= stop, got start = {start}, stop = {stop}"
            )));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<LadderModel> {
        let g = CouplingVector::new(self.couplings.clone())
            .map_err(|e| Error::InvalidArgument(format!("field 'couplings': {e}")))?;
        let phis = self.phis.clone().unwrap_or_else(|| vec![0.0; self.n - 1]);
        match (&self.energies, &self.omegas) {
            (Some(e), None) => LadderModel::resonant(e.clone(), phis, g),
            (Some(e), Some(w)) => LadderModel::new(e.clone(), w.clone(), phis, g),
            (None, Some(w)) => {
                let mut energies = vec![self.e0.unwrap_or(0.0)];
                for om in w {
                    let last = *energies.last().unwrap();
                    energies.push(last + om);
                }
                LadderModel::new(energies, w.clone(), phis, g)
            }
            (None, None) => unreachable!("validated"),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        linear_grid(self.time.start, self.time.stop, self.time.steps)
    }

    pub fn propagator_options(&self) -> PropagatorOptions {
        PropagatorOptions {
            kernel: self.kernel,
            normalize_initial: self.normalize_initial,
            resonance_tol: None,
        }
    }
}
