//! Scenario configuration: the structured description of one experiment,
//! parsed from TOML and validated exhaustively before any compute runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{validate_distinct_foci, Profile, QuadraticDatum};
use crate::error::{Error, Result};
use crate::params::{Params, Potential};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: ParamsSection,
    #[serde(default)]
    pub grid: GridSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub data: Vec<DataSpec>,
    #[serde(default)]
    pub remainder: RemainderSpec,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsSection {
    pub n: usize,
    pub sigma: f64,
    #[serde(default)]
    pub potential: Potential,
    pub t_final: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub length: f64,
    /// Per-axis point count; omitted = auto from the resolution rule at the
    /// smallest epsilon of the sweep.
    pub points: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { length: 32.0, points: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    /// Strictly decreasing, length >= 3 for trend tests.
    pub eps: Vec<f64>,
}

/// One initial-data component.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    /// Plain decaying profile (no oscillation): f(x).
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default)]
        momentum: Vec<f64>,
    },
    /// Quadratic-phase datum focusing at (t_focus, x_focus).
    Quadratic {
        t_focus: f64,
        x_focus: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// Profile loaded from a field snapshot file.
    Snapshot { path: String },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemainderSpec {
    #[default]
    Zero,
    /// A fixed non-oscillating decaying profile.
    Schwartz {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "two")]
        width: f64,
    },
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Scattering horizon for caustic/scattering runs.
    #[serde(default)]
    pub horizon: Option<f64>,
    /// Cache directory for crossing profiles.
    #[serde(default)]
    pub cache_dir: Option<String>,
}

fn default_seed() -> u64 {
    20240811
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Simulate,
    Linearizability,
    Superposition,
    Caustic,
    WignerScreen,
    Scattering,
    Harmonic,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Linearizability => "linearizability",
            ExperimentKind::Superposition => "superposition",
            ExperimentKind::Caustic => "caustic",
            ExperimentKind::WignerScreen => "wigner_screen",
            ExperimentKind::Scattering => "scattering",
            ExperimentKind::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed relative size of the single trend violation.
    pub trend_violation: f64,
    /// Doubling tolerance of the scattering horizon test.
    pub scattering: f64,
    /// Linear-run conservation drift bound.
    pub conservation_linear: f64,
    /// Nonlinear-run energy drift bound.
    pub conservation_energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trend_violation: 0.05,
            scattering: 1e-4,
            conservation_linear: 1e-10,
            conservation_energy: 1e-6,
        }
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        Ok(s)
    }

    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Template parameters at a given epsilon.
    pub fn params_at(&self, eps: f64) -> Result<Params> {
        Params::new(
            self.params.n,
            self.params.sigma,
            eps,
            self.params.potential,
            self.params.t_final,
        )
    }

    /// Collect every validation failure before any compute.
    pub fn validate(&self) -> Result<()> {
        let mut errors: Vec<String> = Vec::new();
        let n = self.params.n;

        if n == 0 || n > 2 {
            errors.push(format!("params.n must be 1 or 2, got {n}"));
        } else if !(self.params.sigma > 2.0 / n as f64) {
            errors.push(format!(
                "params.sigma = {} violates sigma > 2/n = {}",
                self.params.sigma,
                2.0 / n as f64
            ));
        }
        if !(self.params.t_final > 0.0) {
            errors.push("params.t_final must be positive".into());
        }
        if self.grid.length <= 0.0 {
            errors.push("grid.length must be positive".into());
        }
        if let Some(p) = self.grid.points {
            if p < 8 || !p.is_power_of_two() {
                errors.push(format!("grid.points must be a power of two >= 8, got {p}"));
            }
        }

        if self.sweep.eps.is_empty() {
            errors.push("sweep.eps must not be empty".into());
        }
        for &e in &self.sweep.eps {
            if !(e > 0.0 && e <= 1.0) {
                errors.push(format!("sweep epsilon {e} outside (0, 1]"));
            }
        }
        if !self.sweep.eps.windows(2).all(|w| w[1] < w[0]) {
            errors.push("sweep.eps must be strictly decreasing".into());
        }
        let needs_trend = matches!(
            self.experiment.kind,
            ExperimentKind::Linearizability
                | ExperimentKind::Superposition
                | ExperimentKind::Caustic
                | ExperimentKind::Harmonic
        );
        if needs_trend && self.sweep.eps.len() < 3 {
            errors.push(format!(
                "experiment '{}' needs a sweep of length >= 3 for trend tests",
                self.experiment.kind.as_str()
            ));
        }

        match self.quadratic_data() {
            Ok(data) => {
                if let Err(e) = validate_distinct_foci(&data) {
                    errors.push(e.to_string());
                }
                if self.params.potential == Potential::Harmonic {
                    for d in &data {
                        if !(d.t_focus > 0.0 && d.t_focus < std::f64::consts::PI) {
                            errors.push(format!(
                                "harmonic focus time {} outside (0, pi)",
                                d.t_focus
                            ));
                        }
                    }
                }
                for d in &data {
                    if d.t_focus > self.params.t_final {
                        // allowed, but the experiment will not see the focus
                        eprintln!(
                            "warning: focus at t = {} lies beyond t_final = {}",
                            d.t_focus, self.params.t_final
                        );
                    }
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
        if matches!(
            self.experiment.kind,
            ExperimentKind::Superposition | ExperimentKind::Caustic
        ) && self.data.iter().all(|d| !matches!(d, DataSpec::Quadratic { .. }))
        {
            errors.push(format!(
                "experiment '{}' needs at least one quadratic datum",
                self.experiment.kind.as_str()
            ));
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(errors))
        }
    }

    /// Profiles of the non-oscillating data components.
    pub fn plain_profiles(&self) -> Result<Vec<Profile>> {
        let mut out = Vec::new();
        for d in &self.data {
            match d {
                DataSpec::Gaussian { amplitude, width, center, momentum } => {
                    let mut c = center.clone();
                    let mut m = momentum.clone();
                    c.resize(self.params.n, 0.0);
                    m.resize(self.params.n, 0.0);
                    out.push(Profile::gaussian(*amplitude, *width, c, m));
                }
                DataSpec::Snapshot { path } => {
                    let (f, _, _) = crate::snapshot::read_field(Path::new(path))?;
                    out.push(Profile::from_field(&f)?);
                }
                DataSpec::Quadratic { .. } => {}
            }
        }
        Ok(out)
    }

    /// The quadratic data components.
    pub fn quadratic_data(&self) -> Result<Vec<QuadraticDatum>> {
        let mut out = Vec::new();
        for d in &self.data {
            if let DataSpec::Quadratic { t_focus, x_focus, amplitude, width } = d {
                let n = self.params.n;
                let scale = *amplitude
                    * (std::f64::consts::PI * width * width).powf(-(n as f64) / 4.0);
                let profile =
                    Profile::gaussian(scale, *width, vec![0.0; n], vec![0.0; n]);
                let mut x = x_focus.clone();
                x.resize(n, 0.0);
                out.push(QuadraticDatum::new(profile, *t_focus, x)?);
            }
        }
        Ok(out)
    }

    pub fn remainder_profile(&self) -> Option<Profile> {
        match &self.remainder {
            RemainderSpec::Zero => None,
            RemainderSpec::Schwartz { amplitude, width } => {
                let n = self.params.n;
                Some(Profile::gaussian(
                    *amplitude * (std::f64::consts::PI * width * width).powf(-(n as f64) / 4.0),
                    *width,
                    vec![0.0; n],
                    vec![0.0; n],
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
name = "demo"

[params]
n = 1
sigma = 3.0
potential = "none"
t_final = 1.5

[grid]
length = 32.0

[sweep]
eps = [0.08, 0.04, 0.02]

[[data]]
kind = "quadratic"
t_focus = 1.0
x_focus = [0.0]

[experiment]
kind = "linearizability"
"#;

    #[test]
    fn parses_and_validates() {
        let s = Scenario::from_toml_str(GOOD).unwrap();
        s.validate().unwrap();
        assert_eq!(s.quadratic_data().unwrap().len(), 1);
        // amplitude defaults to the unit-mass normalization
        let d = &s.quadratic_data().unwrap()[0];
        assert!((d.profile.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sweep_rejected() {
        let bad = GOOD.replace("eps = [0.08, 0.04, 0.02]", "eps = []");
        let s = Scenario::from_toml_str(&bad).unwrap();
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("sweep"));
    }

    #[test]
    fn increasing_sweep_rejected() {
        let bad = GOOD.replace("[0.08, 0.04, 0.02]", "[0.02, 0.04, 0.08]");
        let s = Scenario::from_toml_str(&bad).unwrap();
        assert!(s.validate().is_err());
    }

    #[test]
    fn duplicate_foci_listed_in_errors() {
        let bad = format!(
            "{GOOD}\n[[data]]\nkind = \"quadratic\"\nt_focus = 1.0\nx_focus = [0.0]\n"
        );
        let s = Scenario::from_toml_str(&bad).unwrap();
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("duplicate focus"), "{err}");
    }

    #[test]
    fn malformed_toml_reports_position() {
        let err = Scenario::from_toml_str("params = {").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") || msg.contains("expected"), "{msg}");
    }

    #[test]
    fn harmonic_focus_range_checked() {
        let bad = GOOD
            .replace("potential = \"none\"", "potential = \"harmonic\"")
            .replace("t_focus = 1.0", "t_focus = 3.5");
        let s = Scenario::from_toml_str(&bad).unwrap();
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("(0, pi)"), "{err}");
    }
}
