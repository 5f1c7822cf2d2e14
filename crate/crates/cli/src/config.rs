//! Run configuration: a flat TOML table.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sqlaser::{band_edge_profile, derive_dressed, CouplingMode, DressedParams, ReservoirProfile, SystemParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    #[default]
    Both,
    Nonsecular,
    Secular,
}

impl ModeSelection {
    pub fn modes(self) -> &'static [CouplingMode] {
        match self {
            Self::Both => &[CouplingMode::NonSecular, CouplingMode::Secular],
            Self::Nonsecular => &[CouplingMode::NonSecular],
            Self::Secular => &[CouplingMode::Secular],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceAxis {
    #[default]
    Theta,
    DriveRatio,
}

fn one() -> f64 {
    1.0
}

fn default_points() -> usize {
    2001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub gamma_p: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub g: f64,
    /// Drive Rabi frequency; exclusive with `omega`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Generalized Rabi frequency; `epsilon` follows from `delta_a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default)]
    pub delta_a: f64,
    #[serde(default)]
    pub delta_c: f64,

    /// Band edge relative to the laser frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_edge: Option<f64>,
    /// `[central, upper, lower]` transmissions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_minus: Option<f64>,

    #[serde(default)]
    pub mode: ModeSelection,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default)]
    pub variance_axis: VarianceAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<f64>,
    #[serde(default = "default_points")]
    pub grid_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_c_list: Option<Vec<f64>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_moments: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_spectrum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_closure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).context("parsing configuration")?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn check(&self) -> Result<()> {
        let forms = [self.band_edge.is_some(), self.d2.is_some(), self.gamma_plus.is_some() || self.gamma_minus.is_some()];
        ensure!(
            forms.iter().filter(|f| **f).count() == 1,
            "exactly one reservoir form is required: `band_edge`, `d2`, or `gamma_plus` with `gamma_minus`"
        );
        ensure!(
            self.gamma_plus.is_some() == self.gamma_minus.is_some(),
            "`gamma_plus` and `gamma_minus` must be given together"
        );
        ensure!(!(self.epsilon.is_some() && self.omega.is_some()), "give `epsilon` or `omega`, not both");
        if let (Some(lo), Some(hi)) = (self.grid_min, self.grid_max) {
            ensure!(lo < hi, "grid must be strictly increasing: grid_min = {lo}, grid_max = {hi}");
        }
        ensure!(self.grid_points >= 2, "grid_points must be >= 2");
        for (name, list) in [("delta_c_list", &self.delta_c_list), ("omegas", &self.omegas)] {
            if let Some(l) = list {
                ensure!(!l.is_empty(), "`{name}` is empty");
            }
        }
        if let Some(o) = &self.omegas {
            ensure!(o.windows(2).all(|w| w[0] < w[1]), "`omegas` must be strictly increasing");
        }
        self.system_params()?.validate()?;
        Ok(())
    }

    /// Physical parameters, with `epsilon` derived from `omega` if needed.
    pub fn system_params(&self) -> Result<SystemParams> {
        let epsilon = match (self.epsilon, self.omega) {
            (Some(e), None) => e,
            (None, Some(w)) => drive_for(w, self.delta_a)?,
            (None, None) => bail!("one of `epsilon` or `omega` is required"),
            (Some(_), Some(_)) => bail!("give `epsilon` or `omega`, not both"),
        };
        Ok(SystemParams {
            gamma: self.gamma,
            gamma_p: self.gamma_p,
            kappa: self.kappa,
            g: self.g,
            epsilon,
            delta_a: self.delta_a,
            delta_c: self.delta_c,
        })
    }

    pub fn dressed(&self, params: &SystemParams, mode: CouplingMode) -> Result<DressedParams> {
        let omega = params.rabi_frequency();
        let d = match (self.band_edge, self.d2, self.gamma_plus, self.gamma_minus) {
            (Some(edge), ..) => derive_dressed(params, &band_edge_profile(edge, omega), mode)?,
            (_, Some([c, u, l]), ..) => derive_dressed(params, &ReservoirProfile::new(c, u, l)?, mode)?,
            (_, _, Some(gp), Some(gm)) => {
                derive_dressed(params, &ReservoirProfile::transparent(), mode)?.with_sideband_rates(gp, gm)?
            }
            _ => bail!("no reservoir form given"),
        };
        Ok(d)
    }

    pub fn grid(&self, default_min: f64, default_max: f64) -> Vec<f64> {
        sqlaser::numerics::uniform_grid(
            self.grid_min.unwrap_or(default_min),
            self.grid_max.unwrap_or(default_max),
            self.grid_points,
        )
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.delta_c_list.clone().unwrap_or_else(|| vec![self.delta_c])
    }

    pub fn require_theta(&self) -> Result<f64> {
        self.theta.context("`theta` is required for this command")
    }
}

/// `epsilon` giving Rabi frequency `omega` at detuning `delta_a`.
pub fn drive_for(omega: f64, delta_a: f64) -> Result<f64> {
    ensure!(omega > delta_a.abs(), "omega = {omega} must exceed |delta_a| = {}", delta_a.abs());
    Ok((omega * omega - delta_a * delta_a).sqrt() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "g = 10.0\nomega = 100.0\ngamma_plus = 10.0\ngamma_minus = 0.0\n";

    #[test]
    fn minimal_config_resolves() {
        let c = RunConfig::parse(BASE).unwrap();
        let p = c.system_params().unwrap();
        assert_eq!(p.epsilon, 50.0);
        assert_eq!(p.rabi_frequency(), 100.0);
        let d = c.dressed(&p, CouplingMode::NonSecular).unwrap();
        assert_eq!((d.gamma_plus, d.gamma_minus), (10.0, 0.0));
        assert_eq!(c.mode, ModeSelection::Both);
        assert_eq!(c.detunings(), vec![0.0]);
    }

    #[test]
    fn round_trips_through_toml() {
        let text = format!("{BASE}theta = 0.8\ndelta_c_list = [0.0, -0.16]\nmode = \"secular\"\nvariance_axis = \"drive_ratio\"\n");
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::parse(&format!("{BASE}kapa = 1.0\n")).unwrap_err();
        assert!(format!("{err:#}").contains("kapa"));
    }

    #[test]
    fn reservoir_forms_exclusive() {
        assert!(RunConfig::parse("g = 1.0\nomega = 10.0\n").is_err());
        assert!(RunConfig::parse(&format!("{BASE}band_edge = -1.0\n")).is_err());
        assert!(RunConfig::parse("g = 1.0\nomega = 10.0\ngamma_plus = 1.0\n").is_err());
        let c = RunConfig::parse("g = 1.0\nomega = 10.0\nband_edge = -1.0\n").unwrap();
        let d = c.dressed(&c.system_params().unwrap(), CouplingMode::Secular).unwrap();
        assert_eq!(d.gamma_minus, 0.0);
        assert!(d.gamma_plus > 0.0);
        assert!(RunConfig::parse("g = 1.0\nomega = 10.0\nd2 = [1.0, 1.0, 0.5]\n").is_ok());
    }

    #[test]
    fn grids_and_drive_checked() {
        assert!(RunConfig::parse(&format!("{BASE}grid_min = 1.0\ngrid_max = -1.0\n")).is_err());
        assert!(RunConfig::parse(&format!("{BASE}grid_points = 1\n")).is_err());
        assert!(RunConfig::parse(&format!("{BASE}epsilon = 3.0\n")).is_err());
        assert!(RunConfig::parse("g = 1.0\ngamma_plus = 1.0\ngamma_minus = 0.0\nomega = 1.0\ndelta_a = 2.0\n").is_err());
        assert!(RunConfig::parse(&format!("{BASE}omegas = [50.0, 25.0]\n")).is_err());
    }
}
