//! Closed-form and simulated tradeoff curves on a `p` grid.

use std::io::Write;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use qseal::attack::{build_attack, evaluate, mutual_information, nu};
use qseal::discrimination::Povm;
use qseal::seal::canonical_scheme;
use qseal::theory::{canonical_joint_distribution, minmax_avg_fidelity, minmax_cond_fidelity_bound};

use crate::{fmt_real, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Metric {
    AvgFidelity,
    CondFidelityBound,
    MutualInformation,
    SimulatedAvgFidelity,
    SimulatedCondFidelity,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::AvgFidelity,
        Metric::CondFidelityBound,
        Metric::MutualInformation,
        Metric::SimulatedAvgFidelity,
        Metric::SimulatedCondFidelity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AvgFidelity => "avg_fidelity",
            Metric::CondFidelityBound => "cond_fidelity_bound",
            Metric::MutualInformation => "mutual_information",
            Metric::SimulatedAvgFidelity => "simulated_avg_fidelity",
            Metric::SimulatedCondFidelity => "simulated_cond_fidelity",
        }
    }

    fn simulated(self) -> bool {
        matches!(self, Metric::SimulatedAvgFidelity | Metric::SimulatedCondFidelity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n: usize,
    pub p_max: Vec<f64>,
    pub points: usize,
    pub metrics: Vec<Metric>,
}

impl SweepSpec {
    /// Sorts and deduplicates `p_max` and `metrics`, then checks ranges.
    pub fn new(n: usize, mut p_max: Vec<f64>, points: usize, mut metrics: Vec<Metric>) -> CliResult<Self> {
        if n < 2 {
            return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
        }
        if points < 2 {
            return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
        }
        if p_max.is_empty() {
            return Err(CliError::Usage("at least one --pmax is required".into()));
        }
        let lo = 1.0 / n as f64;
        if let Some(&bad) = p_max.iter().find(|&&x| !(x > lo + 1e-12 && x <= 1.0)) {
            return Err(CliError::Usage(format!(
                "--pmax {bad} outside (1/N, 1] = ({lo}, 1]"
            )));
        }
        p_max.sort_by(f64::total_cmp);
        p_max.dedup();
        if metrics.is_empty() {
            metrics = vec![Metric::AvgFidelity, Metric::CondFidelityBound];
        }
        metrics.sort_by_key(|m| m.name());
        metrics.dedup();
        Ok(SweepSpec { n, p_max, points, metrics })
    }

    /// `points` values from `1/N` to `p_max`, both endpoints exact.
    pub fn p_grid(&self, p_max: f64) -> Vec<f64> {
        let lo = 1.0 / self.n as f64;
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == last {
                    p_max
                } else {
                    lo + (p_max - lo) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub n: usize,
    pub p_max: f64,
    pub p: f64,
    pub nu: f64,
    pub metric: Metric,
    pub value: f64,
}

fn point_rows(spec: &SweepSpec, p_max: f64, p: f64) -> CliResult<Vec<Row>> {
    let n = spec.n;
    let nu_ = nu(p, p_max, n)?;
    let simulated = if spec.metrics.iter().any(|m| m.simulated()) {
        let scheme = canonical_scheme(n, p_max)?;
        let channel = build_attack(&Povm::computational_basis(n), nu_)?;
        Some(evaluate(&scheme, &channel)?)
    } else {
        None
    };
    spec.metrics
        .iter()
        .map(|&metric| {
            let value = match metric {
                Metric::AvgFidelity => minmax_avg_fidelity(p, p_max, n)?,
                Metric::CondFidelityBound => minmax_cond_fidelity_bound(p, p_max, n)?,
                Metric::MutualInformation => {
                    let joint = canonical_joint_distribution(p, p_max, n)?;
                    mutual_information(&joint, &vec![1.0 / n as f64; n])?
                }
                Metric::SimulatedAvgFidelity => simulated.as_ref().map(|r| r.avg_fidelity).unwrap_or_default(),
                Metric::SimulatedCondFidelity => simulated.as_ref().map(|r| r.cond_fidelity).unwrap_or_default(),
            };
            Ok(Row { n, p_max, p, nu: nu_, metric, value })
        })
        .collect()
}

/// Every row of the sweep in output order. Grid points are evaluated in
/// parallel; `collect` on an indexed iterator keeps them in order.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<Row>> {
    let points: Vec<(f64, f64)> = spec
        .p_max
        .iter()
        .flat_map(|&pm| spec.p_grid(pm).into_iter().map(move |p| (pm, p)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(pm, p)| point_rows(spec, pm, p))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[Row], writer: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "p_max", "p", "nu", "metric", "value"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            fmt_real(r.p_max),
            fmt_real(r.p),
            fmt_real(r.nu),
            r.metric.name().to_string(),
            fmt_real(r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_full_strength() {
        let spec = SweepSpec::new(2, vec![0.9], 2, vec![Metric::AvgFidelity]).unwrap();
        let rows = run_sweep(&spec).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.p, 0.9);
        assert!((last.value - 0.82).abs() < 1e-12);
        let mut buf = Vec::new();
        write_csv(&rows[1..], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,p_max,p,nu,metric,value\n2,9.00000000000e-1,9.00000000000e-1,1.00000000000e0,avg_fidelity,8.20000000000e-1\n"
        );
    }

    #[test]
    fn row_order() {
        let spec = SweepSpec::new(
            3,
            vec![0.9, 0.5],
            4,
            vec![Metric::SimulatedAvgFidelity, Metric::AvgFidelity],
        )
        .unwrap();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2 * 4 * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.p_max, r.p, r.metric.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| {
            a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(b.2))
        });
        assert_eq!(keys, sorted);
        assert_eq!(rows[0].p, 1.0 / 3.0);
        assert_eq!(rows[0].nu, 0.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(SweepSpec::new(1, vec![0.9], 10, vec![]).is_err());
        assert!(SweepSpec::new(2, vec![0.9], 1, vec![]).is_err());
        assert!(SweepSpec::new(2, vec![0.5], 10, vec![]).is_err());
        assert!(SweepSpec::new(2, vec![1.1], 10, vec![]).is_err());
        assert!(SweepSpec::new(2, vec![], 10, vec![]).is_err());
    }

    #[test]
    fn simulated_matches_closed_form() {
        let spec = SweepSpec::new(4, vec![0.6, 1.0], 9, Metric::ALL.to_vec()).unwrap();
        let rows = run_sweep(&spec).unwrap();
        for chunk in rows.chunks(5) {
            assert!((chunk[0].value - chunk[3].value).abs() <= 1e-9);
            assert!((chunk[1].value - chunk[4].value).abs() <= 1e-9);
        }
    }
}
