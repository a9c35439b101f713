use std::path::{Path, PathBuf};

use pbg_fluorescence::first_order::ThetaConvention;
use pbg_fluorescence::spectrum::{GridSpec, KnotKind, PeakOptions, SpectralDensity};
use pbg_fluorescence::{PhysicalParams, Reservoir};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which spectral density `spectrum` evaluates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Closed form of the configured reservoir.
    #[default]
    Auto,
    MollowLimit,
    FirstOrder,
}

/// Frequency grid of the `kernel` dump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelGrid {
    /// Defaults to the edge ± 10 omega_c (band edge) or ± 10 gamma.
    pub range: Option<(f64, f64)>,
    pub points: usize,
}

impl Default for KernelGrid {
    fn default() -> Self {
        KernelGrid {
            range: None,
            points: 4001,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysicalParams,
    #[serde(default)]
    pub model: Model,
    #[serde(default)]
    pub theta: ThetaConvention,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub peaks: PeakOptions,
    #[serde(default)]
    pub kernel: KernelGrid,
    /// omega_a - omega_c for each `scan` point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<f64>,
    /// Rabi frequencies for `order-check`; defaults to the configured one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rabis: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    /// JSON if the extension says so, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: RunConfig = if json {
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        };
        cfg.grid.validate()?;
        if cfg.kernel.points < 2 {
            return Err(CliError::Config("kernel.points must be at least 2".into()));
        }
        if let Some((lo, hi)) = cfg.kernel.range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CliError::Config("kernel.range must be finite with lo < hi".into()));
            }
        }
        Ok(cfg)
    }

    pub fn kernel_range(&self) -> (f64, f64) {
        if let Some(r) = self.kernel.range {
            return r;
        }
        match self.params.reservoir() {
            Reservoir::FreeSpace { gamma } => (-10.0 * gamma, 10.0 * gamma),
            Reservoir::BandEdge { omega_c, .. } => {
                let edge = omega_c - self.params.omega_a();
                (edge - 10.0 * omega_c, edge + 10.0 * omega_c)
            }
        }
    }
}

/// An explicit grid range must hold every expected peak with ten
/// linewidths to spare (below the support edge there is nothing to hold).
pub fn check_range(grid: &GridSpec, density: &dyn SpectralDensity) -> Result<(), CliError> {
    let Some((lo, hi)) = grid.range else {
        return Ok(());
    };
    let features = density.features();
    for knot in &features.knots {
        let KnotKind::Peak { width } = knot.kind else {
            continue;
        };
        let mut need = (knot.at - 10.0 * width, knot.at + 10.0 * width);
        if let Some(s) = features.support_start {
            need.0 = need.0.max(s);
        }
        if need.1 <= need.0 {
            continue;
        }
        if need.0 < lo || need.1 > hi {
            return Err(CliError::Config(format!(
                "grid.range [{lo}, {hi}] does not cover the peak at {} with ten linewidths ({}, {})",
                knot.at, need.0, need.1
            )));
        }
    }
    Ok(())
}
