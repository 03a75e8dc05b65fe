//! Settings shared by the subcommands: a TOML or JSON file overridden by flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use reebdist::{BijectionObjective, DistanceConfig, FragmentMode, LaplaceOptions, Weights};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub slabs: Vec<usize>,
    pub weights: Weights,
    pub bijection: BijectionObjective,
    pub fragment_mode: FragmentMode,
    /// Eigenfunction count E for shape comparison.
    pub eigenfunctions: usize,
    pub clamp_negative_weights: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = DistanceConfig::default();
        Self {
            slabs: d.slabs,
            weights: d.weights,
            bijection: d.bijection,
            fragment_mode: d.fragment_mode,
            eigenfunctions: 12,
            clamp_negative_weights: false,
        }
    }
}

impl RunConfig {
    pub fn distance(&self) -> DistanceConfig {
        DistanceConfig {
            slabs: self.slabs.clone(),
            weights: self.weights,
            bijection: self.bijection,
            fragment_mode: self.fragment_mode,
        }
    }

    pub fn laplace(&self) -> LaplaceOptions {
        LaplaceOptions {
            clamp_negative_weights: self.clamp_negative_weights,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Objective {
    Minimax,
    Hungarian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Fragments {
    Clip,
    Barycenter,
}

#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// Settings file (.toml or .json); flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Slab count per field, comma separated; the last value repeats.
    #[arg(short = 'q', long, value_delimiter = ',')]
    pub slabs: Option<Vec<usize>>,
    /// Weights of PD0, PD0 of the negated field and ExDg1.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub weights: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub bijection: Option<Objective>,
    #[arg(long, value_enum)]
    pub fragment_mode: Option<Fragments>,
    /// Number of eigenfunctions E.
    #[arg(short = 'E', long)]
    pub eigenfunctions: Option<usize>,
    /// Zero out negative cotangent weights.
    #[arg(long)]
    pub clamp_negative_weights: bool,
}

fn read_file(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => read_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.slabs {
            c.slabs = s.clone();
        }
        if let Some(w) = &self.weights {
            let w: [f64; 3] = w
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Usage(format!("--weights needs three values, got {}", w.len())))?;
            c.weights = Weights::new(w)?;
        }
        if let Some(b) = self.bijection {
            c.bijection = match b {
                Objective::Minimax => BijectionObjective::Minimax,
                Objective::Hungarian => BijectionObjective::Hungarian,
            };
        }
        if let Some(m) = self.fragment_mode {
            c.fragment_mode = match m {
                Fragments::Clip => FragmentMode::Clip,
                Fragments::Barycenter => FragmentMode::Barycenter,
            };
        }
        if let Some(e) = self.eigenfunctions {
            c.eigenfunctions = e;
        }
        c.clamp_negative_weights |= self.clamp_negative_weights;
        c.distance().validate()?;
        Ok(c)
    }
}
