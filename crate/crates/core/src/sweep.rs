//! α / x sweeps over the `ρ(α, x)` family with CSV and JSON output.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsim::{run_protocol, NoiseModel, PurityPanel, SETTINGS};
use crate::mub::construct_mubs;
use crate::relations::relation_report;
use crate::states::{rho_family, WernerFamilyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Alpha,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Value of the parameter that is not swept.
    pub fixed_other: f64,
    pub d: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub noise_p: f64,
    pub simulate: bool,
    pub format: OutputFormat,
}

impl SweepConfig {
    /// The five-point grids α ∈ {0, π/8, …, π/2} at x = 1 and
    /// x ∈ {0, 0.25, …, 1} at α = π/2.
    pub fn default_for(param: SweepParam) -> Self {
        let (from, to, fixed_other) = match param {
            SweepParam::Alpha => (0.0, FRAC_PI_2, 1.0),
            SweepParam::X => (0.0, 1.0, FRAC_PI_2),
        };
        Self {
            param,
            from,
            to,
            steps: 5,
            fixed_other,
            d: 2,
            m: 3,
            seed: 0,
            noise_p: 0.0,
            simulate: false,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::ParameterRange(format!("steps = {} < 2", self.steps)));
        }
        if !(self.from < self.to) {
            return Err(Error::ParameterRange(format!(
                "from = {} must be below to = {}",
                self.from, self.to
            )));
        }
        if self.d != 2 {
            return Err(Error::ParameterRange(format!(
                "the rho(alpha, x) family is two-qubit; d = {} unsupported",
                self.d
            )));
        }
        if !(2..=3).contains(&self.m) {
            return Err(Error::BasisCount { d: 2, m: self.m, max: 3 });
        }
        for (a, x) in [self.point(self.from), self.point(self.to)] {
            WernerFamilyParams::new(a, x)?;
        }
        NoiseModel::depolarizing(self.noise_p)?;
        Ok(())
    }

    fn point(&self, value: f64) -> (f64, f64) {
        match self.param {
            SweepParam::Alpha => (value, self.fixed_other),
            SweepParam::X => (self.fixed_other, value),
        }
    }

    /// `(α, x)` for every grid point, endpoints included.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let step = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let v = if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + step * i as f64
                };
                self.point(v)
            })
            .collect()
    }
}

/// Analytic relation values for one point, plus the simulated panel when
/// requested. Axis columns follow the qubit MUB order z, x, y.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct SweepRow {
    pub alpha: f64,
    pub x: f64,
    pub d: usize,
    pub M: usize,
    pub purity_AB: f64,
    pub purity_B: f64,
    pub purity_xB: Option<f64>,
    pub purity_yB: Option<f64>,
    pub purity_zB: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulated: Option<PurityPanel>,
}

pub fn evaluate_point(alpha: f64, x: f64, m: usize, noise_p: f64, simulate: bool) -> Result<SweepRow> {
    let rho = rho_family(WernerFamilyParams::new(alpha, x)?);
    let mubs = construct_mubs(2, m)?;
    let report = relation_report(&rho, &mubs)?;
    let axis = |theta: usize| report.purity_thetaB.get(theta - 1).copied();
    let simulated = if simulate {
        Some(run_protocol(alpha, x, NoiseModel::depolarizing(noise_p)?)?)
    } else {
        None
    };
    Ok(SweepRow {
        alpha,
        x,
        d: 2,
        M: m,
        purity_AB: report.purity_AB,
        purity_B: report.purity_B,
        purity_zB: axis(1),
        purity_xB: axis(2),
        purity_yB: axis(3),
        lhs: report.lhs,
        rhs: report.rhs,
        gap: report.gap,
        simulated,
    })
}

/// Points are evaluated in parallel; rows come back in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    config
        .grid()
        .par_iter()
        .map(|&(alpha, x)| evaluate_point(alpha, x, config.m, config.noise_p, config.simulate))
        .collect()
}

pub const CSV_COLUMNS: [&str; 12] = [
    "alpha", "x", "d", "M", "purity_AB", "purity_B", "purity_xB", "purity_yB", "purity_zB", "lhs",
    "rhs", "gap",
];

fn csv_header(simulate: bool) -> Vec<String> {
    let mut h: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    if simulate {
        for prefix in ["raw", "rescaled"] {
            h.extend(SETTINGS.iter().map(|s| format!("{prefix}_{}", s.name)));
            h.push(format!("{prefix}_gap"));
        }
    }
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[SweepRow], simulate: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(csv_header(simulate)).map_err(write_err)?;
    for r in rows {
        let mut rec = vec![
            r.alpha.to_string(),
            r.x.to_string(),
            r.d.to_string(),
            r.M.to_string(),
            r.purity_AB.to_string(),
            r.purity_B.to_string(),
            opt(r.purity_xB),
            opt(r.purity_yB),
            opt(r.purity_zB),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.gap.to_string(),
        ];
        if simulate {
            let panel = r
                .simulated
                .as_ref()
                .ok_or_else(|| Error::ParameterRange("row lacks simulated panel".into()))?;
            for p in [&panel.raw, &panel.rescaled] {
                rec.extend(p.to_array().iter().map(f64::to_string));
                rec.push(p.gap().to_string());
            }
        }
        w.write_record(&rec).map_err(write_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}

#[derive(Serialize)]
struct SweepJson<'a> {
    config: &'a SweepConfig,
    rows: &'a [SweepRow],
}

pub fn rows_to_json(config: &SweepConfig, rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(&SweepJson { config, rows }).expect("sweep JSON") + "\n"
}
