//! Expected-value table shipped in `data/expected.toml`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EXPECTED_TOML: &str = include_str!("../data/expected.toml");

/// Alpha pins match within this distance.
const ALPHA_PIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Reference,
    Analytic,
    Regression,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub scenario: String,
    pub quantity: String,
    pub value: f64,
    #[serde(default)]
    pub per_alpha: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    pub tolerance: f64,
    pub origin: Origin,
}

impl Entry {
    pub fn applies(&self, scenario: &str, alpha: Option<f64>) -> bool {
        if self.scenario != scenario {
            return false;
        }
        match (self.alpha, alpha) {
            (None, _) => true,
            (Some(pin), Some(a)) => (pin - a).abs() <= ALPHA_PIN_TOL,
            (Some(_), None) => false,
        }
    }

    /// Expected value at `alpha`, scaled by `eps` for energies.
    pub fn expected(&self, alpha: Option<f64>, eps: f64) -> f64 {
        let v = self.value + self.per_alpha * alpha.unwrap_or(0.0);
        if is_energy(&self.quantity) {
            v * eps
        } else {
            v
        }
    }
}

pub fn is_energy(quantity: &str) -> bool {
    quantity.starts_with("E_") || quantity.starts_with("w_")
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedTable {
    pub version: u32,
    #[serde(rename = "entry")]
    pub entries: Vec<Entry>,
}

impl ExpectedTable {
    pub fn parse(text: &str) -> Result<Self> {
        let table: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if table.version != 1 {
            return Err(Error::Parse(format!(
                "unsupported expected-value version {}",
                table.version
            )));
        }
        if let Some(e) = table
            .entries
            .iter()
            .find(|e| e.tolerance.is_nan() || e.tolerance <= 0.0)
        {
            return Err(Error::Parse(format!(
                "entry {}/{} needs a positive tolerance",
                e.scenario, e.quantity
            )));
        }
        Ok(table)
    }

    pub fn builtin() -> Self {
        Self::parse(EXPECTED_TOML).expect("bundled expected-value table is valid")
    }

    pub fn for_scenario<'a>(&'a self, scenario: &'a str, alpha: Option<f64>) -> impl Iterator<Item = &'a Entry> {
        self.entries.iter().filter(move |e| e.applies(scenario, alpha))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub quantity: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub origin: Origin,
    pub passed: bool,
}
