use serde::{Deserialize, Serialize};

/// Extremes and mean of a set of ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl Bracket {
    pub fn from_values(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = if values.is_empty() { f64::NAN } else { values.iter().sum::<f64>() / values.len() as f64 };
        Self { min, max, mean, count: values.len() }
    }

    /// `max / min`.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.min >= lo && self.max <= hi
    }
}

/// Parameters describing one cell of a verification grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub d: usize,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// Ratio statistics of one quantity in one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub quantity: String,
    pub params: CellParams,
    pub ratios: Bracket,
    /// Headline estimate for the cell (for example a maximum over trials).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
}

/// Results of one verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inequality: String,
    pub cells: Vec<CellStats>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(inequality: &str, trials: usize, seed: u64) -> Self {
        Self {
            inequality: inequality.into(),
            cells: Vec::new(),
            trials,
            seed,
            notes: Vec::new(),
            runtime_seconds: None,
        }
    }

    /// True when every recorded ratio and estimate is finite and
    /// nonnegative.
    pub fn all_finite(&self) -> bool {
        self.cells.iter().all(|c| {
            let r = &c.ratios;
            [r.min, r.max, r.mean].iter().chain(c.estimate.iter()).all(|v| v.is_finite() && *v >= 0.0)
        })
    }
}
