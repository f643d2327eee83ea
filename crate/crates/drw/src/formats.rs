//! JSON documents for ensembles, filter banks, verification reports, single
//! runs and batches.

use std::collections::BTreeMap;

use drw_core::ensemble::{ConsistentEnsemble, MatrixEnsemble};
use drw_core::filters::FilterBank;
use drw_core::grid::Grid;
use drw_core::solver::{BatchSummary, MeanMax, Residuals, RunResult, SolverConfig};
use drw_core::verify::VerificationReport;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub index: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// The independent `Q_{M/2}^n` block of a consistent ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub block: Vec<EnsembleEntry>,
}

impl EnsembleJson {
    pub fn from_ensemble(u: &ConsistentEnsemble) -> Self {
        let block = u.block();
        let dim = u.dim();
        let grid = block.grid();
        let entries = (0..block.len())
            .map(|j| {
                let e = block.entry(j);
                let part = |f: fn(&Complex64) -> f64| {
                    (0..dim)
                        .map(|r| (0..dim).map(|c| f(&e[r * dim + c])).collect())
                        .collect()
                };
                EnsembleEntry {
                    index: grid.coords(j),
                    re: part(|z| z.re),
                    im: part(|z| z.im),
                }
            })
            .collect();
        Self {
            n: u.n(),
            m: u.m(),
            block: entries,
        }
    }

    pub fn to_ensemble(&self) -> Result<ConsistentEnsemble> {
        let n = self.n;
        if n == 0 || n > 8 {
            return Err(Error::Format(format!("unsupported dimension n = {n}")));
        }
        if self.m < 4 || !self.m.is_multiple_of(2) {
            return Err(drw_core::Error::InvalidGridSize(self.m).into());
        }
        let dim = 1usize << n;
        let grid = Grid::new(n, self.m / 2);
        let mut block = MatrixEnsemble::zeros(n, self.m / 2);
        let mut seen = vec![false; grid.len()];
        for entry in &self.block {
            if entry.index.len() != n || entry.index.iter().any(|&c| c >= self.m / 2) {
                return Err(Error::Format(format!(
                    "block index {:?} out of range",
                    entry.index
                )));
            }
            let j = grid.linear(&entry.index);
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::Format(format!("duplicate block index {:?}", entry.index)));
            }
            let shape_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
            if !shape_ok(&entry.re) || !shape_ok(&entry.im) {
                return Err(Error::Format(format!(
                    "entry {:?} is not a {dim}×{dim} matrix",
                    entry.index
                )));
            }
            let out = block.entry_mut(j);
            for r in 0..dim {
                for c in 0..dim {
                    out[r * dim + c] = Complex64::new(entry.re[r][c], entry.im[r][c]);
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Format(format!(
                "block entry {:?} missing",
                grid.coords(missing)
            )));
        }
        Ok(ConsistentEnsemble::new(self.m, block)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub k: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterJson {
    pub epsilon: usize,
    pub coeffs: Vec<CoeffJson>,
}

/// Filter coefficients `g^ε_k`; coefficients not listed are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBankJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub filters: Vec<FilterJson>,
}

impl FilterBankJson {
    pub fn from_bank(f: &FilterBank) -> Self {
        let grid = f.grid();
        let filters = (0..f.dim())
            .map(|eps| FilterJson {
                epsilon: eps,
                coeffs: f
                    .filter(eps)
                    .iter()
                    .enumerate()
                    .map(|(lin, z)| CoeffJson {
                        k: grid.coords(lin),
                        re: z.re,
                        im: z.im,
                    })
                    .collect(),
            })
            .collect();
        Self {
            n: f.n(),
            m: f.m(),
            filters,
        }
    }

    /// Coefficients per `ε` present in the document, dense in linear order.
    pub fn dense_filters(&self) -> Result<BTreeMap<usize, Vec<Complex64>>> {
        let n = self.n;
        if n == 0 || n > 8 {
            return Err(Error::Format(format!("unsupported dimension n = {n}")));
        }
        if self.m < 2 {
            return Err(drw_core::Error::InvalidGridSize(self.m).into());
        }
        let dim = 1usize << n;
        let grid = Grid::new(n, self.m);
        let mut out = BTreeMap::new();
        for f in &self.filters {
            if f.epsilon >= dim {
                return Err(Error::Format(format!(
                    "epsilon {} out of range (n = {n})",
                    f.epsilon
                )));
            }
            let mut dense = vec![Complex64::new(0.0, 0.0); grid.len()];
            let mut seen = vec![false; grid.len()];
            for c in &f.coeffs {
                if c.k.len() != n || c.k.iter().any(|&x| x >= self.m) {
                    return Err(Error::Format(format!("coefficient index {:?} out of range", c.k)));
                }
                let lin = grid.linear(&c.k);
                if std::mem::replace(&mut seen[lin], true) {
                    return Err(Error::Format(format!(
                        "duplicate coefficient {:?} for epsilon {}",
                        c.k, f.epsilon
                    )));
                }
                dense[lin] = Complex64::new(c.re, c.im);
            }
            if out.insert(f.epsilon, dense).is_some() {
                return Err(Error::Format(format!("epsilon {} listed twice", f.epsilon)));
            }
        }
        Ok(out)
    }

    /// The scaling filter `g^0` alone.
    pub fn scaling_filter(&self) -> Result<Vec<Complex64>> {
        self.dense_filters()?
            .remove(&0)
            .ok_or_else(|| Error::Format("no epsilon = 0 filter".into()))
    }

    /// A full bank. A 1D document holding only `g^0` is completed with
    /// `g^1_k = (−1)^k conj(g^0_{M−1−k})`.
    pub fn to_bank(&self) -> Result<FilterBank> {
        let mut dense = self.dense_filters()?;
        let dim = 1usize << self.n;
        if self.n == 1 && dense.len() == 1 && dense.contains_key(&0) {
            return Ok(FilterBank::complete_1d(&dense.remove(&0).unwrap())?);
        }
        if dense.len() != dim {
            return Err(Error::Format(format!(
                "expected all {dim} filters, found {}",
                dense.len()
            )));
        }
        Ok(FilterBank::new(self.n, self.m, dense.into_values().collect())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    pub eps_stop: f64,
    pub max_iter: u64,
    pub seed: u64,
    pub bownik_min: f64,
    pub bownik_grid: usize,
    pub include_zero_moment: bool,
}

impl From<&SolverConfig> for ConfigJson {
    fn from(c: &SolverConfig) -> Self {
        Self {
            n: c.n,
            m: c.m,
            d: c.d,
            eps_stop: c.eps_stop,
            max_iter: c.max_iter,
            seed: c.seed,
            bownik_min: c.bownik_min,
            bownik_grid: c.bownik_grid,
            include_zero_moment: c.include_zero_moment,
        }
    }
}

impl From<&ConfigJson> for SolverConfig {
    fn from(c: &ConfigJson) -> Self {
        Self {
            n: c.n,
            m: c.m,
            d: c.d,
            eps_stop: c.eps_stop,
            max_iter: c.max_iter,
            seed: c.seed,
            bownik_min: c.bownik_min,
            bownik_grid: c.bownik_grid,
            include_zero_moment: c.include_zero_moment,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentResidual {
    pub alpha: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub qmf_residual: f64,
    pub cross_qmf_residual: f64,
    pub completeness_residual: f64,
    pub regularity_residuals: Vec<MomentResidual>,
    pub bownik_min_abs: f64,
    pub bownik_pass: bool,
    pub separability: Option<f64>,
    pub grid_resolution: usize,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            qmf_residual: r.qmf_residual,
            cross_qmf_residual: r.cross_qmf_residual,
            completeness_residual: r.completeness_residual,
            regularity_residuals: r
                .regularity_residuals
                .iter()
                .map(|(alpha, residual)| MomentResidual {
                    alpha: alpha.clone(),
                    residual: *residual,
                })
                .collect(),
            bownik_min_abs: r.bownik_min_abs,
            bownik_pass: r.bownik_pass,
            separability: r.separability,
            grid_resolution: r.grid_resolution,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub unitarity: f64,
    pub consistency: f64,
    pub regularity: f64,
    pub qmf_grid: f64,
}

impl From<&Residuals> for ResidualsJson {
    fn from(r: &Residuals) -> Self {
        Self {
            unitarity: r.unitarity,
            consistency: r.consistency,
            regularity: r.regularity,
            qmf_grid: r.qmf_grid,
        }
    }
}

/// Values that differ between otherwise identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub wall_time: f64,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResultJson {
    pub config: ConfigJson,
    pub converged: bool,
    pub iterations: u64,
    pub final_step_norm: Option<f64>,
    pub residuals: ResidualsJson,
    pub bownik_pass: bool,
    pub bownik_min_abs: f64,
    pub separability: Option<f64>,
    pub seed: u64,
    pub report: ReportJson,
    pub filters: FilterBankJson,
    pub solution: EnsembleJson,
    pub metadata: RunMetadata,
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl RunResultJson {
    pub fn from_run(r: &RunResult, timestamp: &str) -> Self {
        Self {
            config: (&r.config).into(),
            converged: r.converged,
            iterations: r.iterations,
            final_step_norm: r.final_step_norm.is_finite().then_some(r.final_step_norm),
            residuals: (&r.residuals).into(),
            bownik_pass: r.bownik_pass,
            bownik_min_abs: r.bownik_min_abs,
            separability: r.separability,
            seed: r.seed,
            report: (&r.report).into(),
            filters: FilterBankJson::from_bank(&r.filters),
            solution: EnsembleJson::from_ensemble(&r.solution),
            metadata: RunMetadata {
                wall_time: r.wall_time,
                timestamp: timestamp.to_string(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanMaxJson {
    pub mean: f64,
    pub max: f64,
}

impl From<MeanMax> for MeanMaxJson {
    fn from(m: MeanMax) -> Self {
        Self {
            mean: m.mean,
            max: m.max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchMetadata {
    pub wall_time: Option<MeanMaxJson>,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchJson {
    pub config: ConfigJson,
    pub replications: usize,
    pub solved: usize,
    pub solved_bownik: usize,
    pub iterations: Option<MeanMaxJson>,
    pub separability: Option<MeanMaxJson>,
    pub runs: Vec<RunResultJson>,
    pub metadata: BatchMetadata,
}

impl BatchJson {
    pub fn from_summary(config: &SolverConfig, s: &BatchSummary, timestamp: &str) -> Self {
        Self {
            config: config.into(),
            replications: s.replications,
            solved: s.solved,
            solved_bownik: s.solved_bownik,
            iterations: s.iterations.map(Into::into),
            separability: s.separability.map(Into::into),
            runs: s
                .runs
                .iter()
                .map(|r| RunResultJson::from_run(r, timestamp))
                .collect(),
            metadata: BatchMetadata {
                wall_time: s.wall_time.map(Into::into),
                timestamp: timestamp.to_string(),
            },
        }
    }
}

/// A document accepted by `verify` and `render`.
#[derive(Clone, Debug, PartialEq)]
pub enum FiltersInput {
    Run(Box<RunResultJson>),
    Filters(FilterBankJson),
}

impl FiltersInput {
    /// A document with a `config` key is read as a run, anything else as a
    /// filter bank.
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("config").is_some() {
            Ok(Self::Run(Box::new(serde_json::from_value(value)?)))
        } else {
            Ok(Self::Filters(serde_json::from_value(value)?))
        }
    }

    pub fn bank(&self) -> Result<FilterBank> {
        match self {
            Self::Run(r) => r.filters.to_bank(),
            Self::Filters(f) => f.to_bank(),
        }
    }

    /// Regularity order recorded in a run, if any.
    pub fn order(&self) -> Option<usize> {
        match self {
            Self::Run(r) => Some(r.config.d),
            Self::Filters(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use drw_core::solver::{solve, SolverConfig};

    #[test]
    fn filter_bank_roundtrip_is_bit_exact() {
        let run = solve(&SolverConfig {
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        let text = serde_json::to_string(&FilterBankJson::from_bank(&run.filters)).unwrap();
        let back: FilterBankJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_bank().unwrap(), run.filters);
    }

    #[test]
    fn ensemble_roundtrip() {
        let run = solve(&SolverConfig {
            n: 2,
            max_iter: 5,
            ..Default::default()
        })
        .unwrap();
        let json = EnsembleJson::from_ensemble(&run.solution);
        assert_eq!(json.block.len(), 4);
        assert_eq!(json.block[1].index, vec![1, 0]);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"M\":4"));
        let back: EnsembleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_ensemble().unwrap(), run.solution);
    }

    #[test]
    fn ensemble_rejects_bad_documents() {
        let mut json = EnsembleJson::from_ensemble(
            &drw_core::filters::FilterBank::haar(1, 4)
                .unwrap()
                .to_consistent()
                .unwrap(),
        );
        json.block.pop();
        assert!(json.to_ensemble().is_err());
        json.m = 5;
        assert!(json.to_ensemble().is_err());
    }

    #[test]
    fn scaling_only_1d_is_completed() {
        let doc = r#"{"n":1,"M":4,"filters":[{"epsilon":0,"coeffs":[
            {"k":[0],"re":0.5,"im":0.0},{"k":[1],"re":0.5,"im":0.0}]}]}"#;
        let f: FilterBankJson = serde_json::from_str(doc).unwrap();
        let bank = f.to_bank().unwrap();
        let g1: Vec<f64> = bank.filter(1).iter().map(|z| z.re).collect();
        assert_eq!(g1, [0.0, 0.0, 0.5, -0.5]);
    }

    #[test]
    fn filter_documents_are_validated() {
        let dup = r#"{"n":1,"M":4,"filters":[{"epsilon":0,"coeffs":[
            {"k":[0],"re":0.5,"im":0.0},{"k":[0],"re":0.5,"im":0.0}]}]}"#;
        let f: FilterBankJson = serde_json::from_str(dup).unwrap();
        assert!(f.to_bank().is_err());
        let partial_2d = r#"{"n":2,"M":4,"filters":[{"epsilon":0,"coeffs":[]}]}"#;
        let f: FilterBankJson = serde_json::from_str(partial_2d).unwrap();
        assert!(f.to_bank().is_err());
        assert_eq!(f.scaling_filter().unwrap().len(), 16);
        assert!(FiltersInput::parse("{not json").is_err());
    }

    #[test]
    fn run_document_parses_as_input() {
        let run = solve(&SolverConfig {
            seed: 2,
            d: 1,
            ..Default::default()
        })
        .unwrap();
        let text = serde_json::to_string(&RunResultJson::from_run(&run, "t")).unwrap();
        let input = FiltersInput::parse(&text).unwrap();
        assert!(matches!(input, FiltersInput::Run(_)));
        assert_eq!(input.order(), Some(1));
        assert_eq!(input.bank().unwrap(), run.filters);
    }
}
