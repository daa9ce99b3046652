use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::types::Scenario;

/// `counts[i][j]` = number of samples with true label `i` predicted as `j`.
pub type Confusion = [[usize; 2]; 2];

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<Confusion> {
    if y_true.len() != y_pred.len() {
        return Err(Error::arg(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut c = [[0; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::arg(format!("labels must be 0 or 1, got ({t}, {p})")));
        }
        c[t as usize][p as usize] += 1;
    }
    Ok(c)
}

/// Fraction on the diagonal; 0 for an empty matrix.
pub fn accuracy(c: &Confusion) -> f64 {
    let total: usize = c.iter().flatten().sum();
    if total == 0 {
        0.0
    } else {
        (c[0][0] + c[1][1]) as f64 / total as f64
    }
}

/// Outcome of one train/evaluate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub case: u8,
    /// `None` when the evaluated experiments mix scenarios.
    pub scenario: Option<Scenario>,
    pub model: ModelKind,
    /// 1-based antenna indices, `None` for the full array.
    pub antennas: Option<Vec<usize>>,
    /// RF chains fed to the feature extractor.
    pub rf_chains: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub confusion: Confusion,
    pub accuracy: f64,
}

/// Mean and population standard deviation of accuracy over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub case: u8,
    pub model: ModelKind,
    pub rf_chains: usize,
    pub seeds: Vec<u64>,
    pub mean: f64,
    pub std: f64,
}

impl AccuracySummary {
    /// Summarize runs that share case, model and array size.
    pub fn from_runs(runs: &[&RunReport]) -> Result<Self> {
        let first = runs
            .first()
            .ok_or_else(|| Error::arg("cannot summarize zero runs"))?;
        if runs.iter().any(|r| {
            r.case != first.case || r.model != first.model || r.rf_chains != first.rf_chains
        }) {
            return Err(Error::arg(
                "summarized runs must share case, model and array size",
            ));
        }
        let n = runs.len() as f64;
        let mean = runs.iter().map(|r| r.accuracy).sum::<f64>() / n;
        let var = runs
            .iter()
            .map(|r| (r.accuracy - mean).powi(2))
            .sum::<f64>()
            / n;
        Ok(Self {
            case: first.case,
            model: first.model,
            rf_chains: first.rf_chains,
            seeds: runs.iter().map(|r| r.seed).collect(),
            mean,
            std: var.sqrt(),
        })
    }
}

/// Every run of one invocation, grouped summaries last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub runs: Vec<RunReport>,
    pub summaries: Vec<AccuracySummary>,
}

impl Report {
    /// Build a report, summarizing runs by (model, array size) in first-seen order.
    pub fn new(runs: Vec<RunReport>) -> Result<Self> {
        let mut keys: Vec<(ModelKind, usize)> = Vec::new();
        for r in &runs {
            if !keys.contains(&(r.model, r.rf_chains)) {
                keys.push((r.model, r.rf_chains));
            }
        }
        let summaries = keys
            .iter()
            .map(|&(m, k)| {
                let group: Vec<&RunReport> = runs
                    .iter()
                    .filter(|r| r.model == m && r.rf_chains == k)
                    .collect();
                AccuracySummary::from_runs(&group)
            })
            .collect::<Result<_>>()?;
        Ok(Self { runs, summaries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl ReportFormat {
    /// `json` for `*.json`, text otherwise.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Text,
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::arg(format!(
                "unknown report format '{s}', expected text or json"
            ))),
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

impl RunReport {
    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => json(self),
            ReportFormat::Text => Ok(self.to_text()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn to_text(&self) -> String {
        let scenario = self.scenario.map_or("mixed".to_string(), |s| s.to_string());
        let antennas = match &self.antennas {
            None => "all".to_string(),
            Some(a) => a.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        };
        let c = &self.confusion;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "case {} | {} | {} | M = {} (antennas {}) | seed {}",
            self.case, scenario, self.model, self.rf_chains, antennas, self.seed
        );
        let _ = writeln!(s, "train {} / test {}", self.train_size, self.test_size);
        let _ = writeln!(s, "{:>10}{:>8}{:>8}", "", "pred 0", "pred 1");
        let _ = writeln!(s, "{:>10}{:>8}{:>8}", "true 0", c[0][0], c[0][1]);
        let _ = writeln!(s, "{:>10}{:>8}{:>8}", "true 1", c[1][0], c[1][1]);
        let _ = writeln!(s, "accuracy {:.4}", self.accuracy);
        s
    }
}

impl Report {
    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => json(self),
            ReportFormat::Text => {
                let mut s = String::new();
                for r in &self.runs {
                    s.push_str(&r.to_text());
                    s.push('\n');
                }
                for m in &self.summaries {
                    let _ = writeln!(
                        s,
                        "case {} {} M = {}: accuracy {:.4} +/- {:.4} over {} seed(s)",
                        m.case,
                        m.model,
                        m.rf_chains,
                        m.mean,
                        m.std,
                        m.seeds.len()
                    );
                }
                Ok(s)
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
