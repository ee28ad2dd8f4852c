//! Portfolio configuration files.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;
use stablecap::{ParetoFactor, PortfolioLine, PortfolioModel};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParetoSpec {
    pub right_constant: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineConfig {
    pub name: String,
    pub a_exposure: f64,
    pub b_exposure: f64,
    pub mean: f64,
    pub pareto: ParetoSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub pareto: ParetoSpec,
    #[serde(default)]
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioConfig {
    pub alpha: f64,
    pub lines: Vec<LineConfig>,
    pub market: MarketConfig,
    pub policies_per_line: u64,
}

impl PortfolioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: PortfolioConfig = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        let mut seen = HashSet::new();
        for l in &cfg.lines {
            if !seen.insert(l.name.as_str()) {
                return Err(CliError::Input(format!("duplicate line name {:?}", l.name)));
            }
        }
        Ok(cfg)
    }

    pub fn names(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.name.clone()).collect()
    }

    pub fn model(&self) -> Result<PortfolioModel, CliError> {
        let factor = |field: &str, p: &ParetoSpec, mean: Option<f64>| {
            ParetoFactor::with_right_constant(self.alpha, p.scale, p.right_constant, mean)
                .map_err(|e| CliError::Input(format!("{field}: {e}")))
        };
        let lines = self
            .lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Ok(PortfolioLine {
                    a_exposure: l.a_exposure,
                    b_exposure: l.b_exposure,
                    idiosyncratic: factor(&format!("lines[{i}].pareto"), &l.pareto, Some(l.mean))?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let market = factor("market.pareto", &self.market.pareto, self.market.mean)?;
        PortfolioModel::new(lines, market, self.policies_per_line).map_err(|e| CliError::Input(e.to_string()))
    }
}
