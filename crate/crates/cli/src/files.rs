//! On-disk formats: node and rule files, verification reports, CSV export.

use std::fs;
use std::io::Write;
use std::path::Path;

use capquad_core::cubature::{CubatureRule, SolverMeta};
use capquad_core::geometry::DomainSpec;
use capquad_core::mz::{CellStats, DoublingWeight, VerificationReport};
use capquad_core::point_sets::NodeSet;
use capquad_core::{Domain, SpherePoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const RULE_VERSION: &str = "capquad-rule/1";
pub const REPORT_VERSION: &str = "capquad-report/1";

pub const ALGORITHM: &str = "greedy-fps";
pub const SOLVER: &str = "moment-dual-newton";

/// Provenance of a node set and, once solved, of its weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub seed: u64,
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default)]
    pub back_offs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pruned: Option<usize>,
}

/// A node set, optionally with cubature weights.
///
/// A file without `weights` is a plain node file as written by `points`;
/// `solve` fills in `weights`, `residual` and the solver fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleFileV1 {
    pub version: String,
    pub d: usize,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar_beta: Option<f64>,
    pub center: Vec<f64>,
    pub degree: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub nodes: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub generator: Generator,
}

fn coords(p: &SpherePoint) -> Vec<f64> {
    p.coords().to_vec()
}

fn point(c: &[f64], what: &str) -> Result<SpherePoint, CliError> {
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(CliError::Input(format!("{what} is not a unit vector (norm {norm})")));
    }
    SpherePoint::new(c).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

impl RuleFileV1 {
    pub fn from_nodes(nodes: &NodeSet) -> Self {
        let spec = nodes.domain.spec();
        Self {
            version: RULE_VERSION.into(),
            d: nodes.domain.dim(),
            alpha: spec.alpha,
            collar_beta: spec.beta,
            center: coords(&spec.center),
            degree: nodes.degree,
            delta: nodes.delta,
            epsilon: nodes.epsilon,
            nodes: nodes.points.iter().map(coords).collect(),
            weights: None,
            residual: None,
            generator: Generator {
                seed: nodes.seed,
                algorithm: ALGORITHM.into(),
                solver: None,
                back_offs: 0,
                iterations: None,
                pruned: None,
            },
        }
    }

    pub fn from_rule(rule: &CubatureRule) -> Self {
        let mut f = Self::from_nodes(&rule.nodes);
        f.degree = rule.degree;
        f.weights = Some(rule.weights.clone());
        f.residual = Some(rule.residual);
        f.generator.solver = Some(SOLVER.into());
        f.generator.back_offs = rule.meta.backoffs;
        f.generator.iterations = Some(rule.meta.iterations);
        f.generator.pruned = Some(rule.meta.pruned);
        f
    }

    /// Checks the structural invariants of the format.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != RULE_VERSION {
            return Err(CliError::Input(format!("unsupported rule file version {:?}", self.version)));
        }
        if self.center.len() != self.d + 1 {
            return Err(CliError::Input(format!(
                "center has {} coordinates, expected {}",
                self.center.len(),
                self.d + 1
            )));
        }
        if let Some(i) = self.nodes.iter().position(|n| n.len() != self.d + 1) {
            return Err(CliError::Input(format!("node {i} has the wrong number of coordinates")));
        }
        if self.nodes.is_empty() {
            return Err(CliError::Input("rule file has no nodes".into()));
        }
        if !(self.delta > 0.0 && self.epsilon > 0.0) {
            return Err(CliError::Input("delta and epsilon must be positive".into()));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.nodes.len() {
                return Err(CliError::Input(format!("{} weights for {} nodes", w.len(), self.nodes.len())));
            }
            if let Some(i) = w.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(CliError::Input(format!("weight {i} is not positive")));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        let spec = DomainSpec { center: point(&self.center, "center")?, alpha: self.alpha, beta: self.collar_beta };
        Domain::from_spec(&spec).map_err(|e| CliError::Input(format!("domain: {e}")))
    }

    pub fn node_set(&self) -> Result<NodeSet, CliError> {
        let domain = self.domain()?;
        let points = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, c)| point(c, &format!("node {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(i) = points.iter().position(|p| !domain.contains(p)) {
            return Err(CliError::Input(format!("node {i} lies outside the domain")));
        }
        Ok(NodeSet {
            domain,
            points,
            epsilon: self.epsilon,
            degree: self.degree,
            delta: self.delta,
            seed: self.generator.seed,
        })
    }

    pub fn rule(&self) -> Result<CubatureRule, CliError> {
        let weights = self.weights.clone().ok_or_else(|| CliError::Input("file carries no weights".into()))?;
        Ok(CubatureRule {
            nodes: self.node_set()?,
            weights,
            degree: self.degree,
            residual: self.residual.unwrap_or(0.0),
            meta: SolverMeta {
                iterations: self.generator.iterations.unwrap_or(0),
                backoffs: self.generator.back_offs,
                seed: self.generator.seed,
                pruned: self.generator.pruned.unwrap_or(0),
            },
        })
    }
}

/// Parameters a report was produced with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar_beta: Option<f64>,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<DoublingWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFileV1 {
    pub version: String,
    pub inequality: String,
    pub grid: GridSpec,
    pub cells: Vec<CellStats>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl ReportFileV1 {
    pub fn new(report: VerificationReport, grid: GridSpec) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            inequality: report.inequality,
            grid,
            cells: report.cells,
            trials: report.trials,
            seed: report.seed,
            notes: report.notes,
            wall_time_seconds: report.runtime_seconds,
        }
    }
}

/// Pretty JSON with sorted keys, shortest round-trip floats and a trailing
/// newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_rule_file(path: &Path) -> Result<RuleFileV1, CliError> {
    let f: RuleFileV1 = read_json(path)?;
    f.validate()?;
    Ok(f)
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    quantity: &'a str,
    d: usize,
    alpha: f64,
    collar_beta: Option<f64>,
    n: Option<usize>,
    delta: Option<f64>,
    p: Option<f64>,
    beta: Option<f64>,
    min: f64,
    max: f64,
    mean: f64,
    count: usize,
    estimate: Option<f64>,
}

/// One CSV row per report cell.
pub fn cells_to_csv(cells: &[CellStats]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in cells {
        let p = &c.params;
        w.serialize(CsvRow {
            quantity: &c.quantity,
            d: p.d,
            alpha: p.alpha,
            collar_beta: p.collar_beta,
            n: p.n,
            delta: p.delta,
            p: p.p,
            beta: p.beta,
            min: c.ratios.min,
            max: c.ratios.max,
            mean: c.ratios.mean,
            count: c.ratios.count,
            estimate: c.estimate,
        })
        .map_err(|e| CliError::Input(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use capquad_core::point_sets::maximal_set_for;

    fn sample() -> RuleFileV1 {
        let domain: Domain = capquad_core::Cap::north(2, 1.0).unwrap().into();
        let nodes = maximal_set_for(&domain, 4, 0.5, 3).unwrap();
        RuleFileV1::from_nodes(&nodes)
    }

    #[test]
    fn canonical_json_round_trips() {
        let f = sample();
        let a = to_canonical_json(&f).unwrap();
        let back: RuleFileV1 = serde_json::from_str(&a).unwrap();
        assert_eq!(back, f);
        assert_eq!(to_canonical_json(&back).unwrap(), a);
        assert!(a.ends_with("}\n"));
    }

    #[test]
    fn keys_are_sorted() {
        let a = to_canonical_json(&sample()).unwrap();
        let top: Vec<&str> =
            a.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn validation_rejects_bad_files() {
        let mut f = sample();
        f.version = "capquad-rule/2".into();
        assert!(f.validate().is_err());
        let mut f = sample();
        f.weights = Some(vec![1.0; f.nodes.len() - 1]);
        assert!(f.validate().is_err());
        let mut f = sample();
        let mut w = vec![1.0; f.nodes.len()];
        w[0] = 0.0;
        f.weights = Some(w);
        assert!(f.validate().is_err());
        let mut f = sample();
        f.nodes[0] = vec![2.0, 0.0, 0.0];
        assert!(f.validate().is_ok());
        assert!(f.node_set().is_err());
    }

    #[test]
    fn node_file_loads_back() {
        let f = sample();
        let nodes = f.node_set().unwrap();
        assert_eq!(nodes.len(), f.nodes.len());
        assert_eq!(nodes.epsilon, 0.5 / 4.0);
        assert!(f.rule().is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cell = CellStats {
            quantity: "mz".into(),
            params: Default::default(),
            ratios: capquad_core::mz::Bracket::from_values(&[1.0, 2.0]),
            estimate: Some(2.0),
        };
        let s = cells_to_csv(&[cell.clone(), cell]).unwrap();
        assert_eq!(s.lines().count(), 3);
        assert!(s.starts_with("quantity,d,alpha,"));
    }
}
