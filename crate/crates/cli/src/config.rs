use std::path::PathBuf;

use clap::ValueEnum;
use phiform_core::{ChargeFamily, ChargeSpec, FormParams, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Thresholds,
    Symbol,
    Form,
    Collapse,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Momentum,
    Position,
    Diagonalized,
}

impl Representation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Representation::Momentum => "momentum",
            Representation::Position => "position",
            Representation::Diagonalized => "diagonalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    #[default]
    Fast,
    Full,
}

/// Sampling of the symbol `S` on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolGrid {
    pub x_max: f64,
    pub samples: usize,
}

impl Default for SymbolGrid {
    fn default() -> Self {
        Self {
            x_max: 20.0,
            samples: 201,
        }
    }
}

/// Scale indices of a collapse sweep: `1..=n_max`, or powers of two up to
/// `n_max` when `geometric` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapsePlan {
    pub n_max: u32,
    #[serde(default)]
    pub geometric: bool,
}

impl Default for CollapsePlan {
    fn default() -> Self {
        Self {
            n_max: 32,
            geometric: false,
        }
    }
}

impl CollapsePlan {
    pub fn n_list(&self) -> Vec<u32> {
        if self.geometric {
            (0..32).map(|k| 1u32 << k).take_while(|&n| n <= self.n_max).collect()
        } else {
            (1..=self.n_max).collect()
        }
    }
}

/// Everything a run needs. Serialized as TOML by `--dump-config` and read
/// back by `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "charge")]
    pub charge_spec: String,
    #[serde(default = "default_representation")]
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_format: Option<OutputFormat>,
    #[serde(default)]
    pub verify_level: VerifyLevel,
    #[serde(rename = "form", default)]
    pub form_params: FormParams,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub symbol: SymbolGrid,
    #[serde(default)]
    pub collapse: CollapsePlan,
}

fn default_representation() -> Representation {
    Representation::Momentum
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Thresholds,
            charge_spec: "gaussian:1".into(),
            representation: Representation::Momentum,
            output_path: None,
            output_format: None,
            verify_level: VerifyLevel::Fast,
            form_params: FormParams::default(),
            quadrature: QuadratureSpec::default(),
            symbol: SymbolGrid::default(),
            collapse: CollapsePlan::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config is always representable as TOML")
    }

    pub fn charge(&self) -> CliResult<ChargeSpec> {
        self.charge_spec
            .parse()
            .map_err(|e: phiform_core::Error| CliError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> CliResult<()> {
        let usage = |e: phiform_core::Error| CliError::Usage(e.to_string());
        self.charge()?;
        self.form_params.validate().map_err(usage)?;
        self.quadrature.validate().map_err(usage)?;
        match self.command {
            Command::Symbol => {
                if self.symbol.samples < 2 {
                    return Err(CliError::Usage(format!(
                        "symbol needs at least 2 samples, got {}",
                        self.symbol.samples
                    )));
                }
                if !(self.symbol.x_max.is_finite() && self.symbol.x_max > 0.0) {
                    return Err(CliError::Usage(format!("x_max must be positive, got {}", self.symbol.x_max)));
                }
            }
            Command::Collapse => {
                if self.collapse.n_max < 4 {
                    return Err(CliError::Usage(format!("n_max must be at least 4, got {}", self.collapse.n_max)));
                }
                let charge = self.charge()?.build().map_err(usage)?;
                if !matches!(charge.family(), ChargeFamily::FBeta { .. }) {
                    return Err(CliError::Usage("collapse needs a trial charge fbeta:<beta>".into()));
                }
                if self.collapse.n_list().len() < 4 {
                    return Err(CliError::Usage("collapse sweep needs at least 4 scale indices".into()));
                }
            }
            Command::Form => {
                if self.representation == Representation::Diagonalized && self.form_params.lambda != 0.0 {
                    return Err(CliError::Usage("the diagonalized representation needs lambda = 0".into()));
                }
                if self.representation == Representation::Position && self.form_params.lambda <= 0.0 {
                    return Err(CliError::Usage("the position representation needs lambda > 0".into()));
                }
            }
            Command::Thresholds | Command::Verify => {}
        }
        Ok(())
    }

    pub fn format(&self) -> OutputFormat {
        self.output_format.unwrap_or(match self.command {
            Command::Symbol | Command::Collapse => OutputFormat::Csv,
            _ => OutputFormat::Json,
        })
    }
}
