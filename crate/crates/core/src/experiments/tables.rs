use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::passive::Algorithm;

/// Mean, sample standard deviation and standard error of a set of values,
/// accumulated in the given order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        if count == 0 {
            return Summary {
                mean: f64::NAN,
                std: 0.0,
                stderr: 0.0,
                count,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary {
            mean,
            std,
            stderr: std / (count as f64).sqrt(),
            count,
        }
    }
}

/// Achievable rate of one algorithm at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub sweep_value: usize,
    pub algorithm: Algorithm,
    pub rate: Summary,
    pub mean_wall_s: f64,
}

/// Gaps between the capacity and its single-mode lower / Jensen upper
/// approximations with the precoder fixed at its initial value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub algorithm: Algorithm,
    pub capacity: Summary,
    pub lower: Summary,
    pub upper: Summary,
    /// `C − lower`.
    pub gap_lower: Summary,
    /// `upper − C`.
    pub gap_upper: Summary,
}

/// How often blind CSM reproduces the CSI linear-search phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchRow {
    /// `None` for the infinite-sample (closed-form) limit.
    pub samples: Option<usize>,
    pub mode: String,
    pub exact_match: Summary,
    pub element_match: Summary,
    /// Channel draws rejected as non-identifiable before the study channel.
    pub excluded_channels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub n: usize,
    pub algorithm: Algorithm,
    pub median_s: f64,
    /// Median time relative to the first grid point for the same algorithm.
    pub ratio_to_first: f64,
    pub runs: usize,
    pub reps_per_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "rows", rename_all = "snake_case")]
pub enum ResultTable {
    Rate { sweep: String, rows: Vec<RateRow> },
    Gap(Vec<GapRow>),
    Match(Vec<MatchRow>),
    Timing(Vec<TimingRow>),
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

impl ResultTable {
    pub fn rate_rows(&self) -> &[RateRow] {
        match self {
            ResultTable::Rate { rows, .. } => rows,
            _ => &[],
        }
    }

    pub fn gap_rows(&self) -> &[GapRow] {
        match self {
            ResultTable::Gap(rows) => rows,
            _ => &[],
        }
    }

    pub fn match_rows(&self) -> &[MatchRow] {
        match self {
            ResultTable::Match(rows) => rows,
            _ => &[],
        }
    }

    pub fn timing_rows(&self) -> &[TimingRow] {
        match self {
            ResultTable::Timing(rows) => rows,
            _ => &[],
        }
    }

    /// Rate row for `(sweep_value, algorithm)`.
    pub fn rate(&self, value: usize, algorithm: Algorithm) -> Option<&RateRow> {
        self.rate_rows()
            .iter()
            .find(|r| r.sweep_value == value && r.algorithm == algorithm)
    }

    /// Writes the table's deterministic columns.
    ///
    /// Wall-clock times of rate studies go to
    /// [`write_walltime_csv`](Self::write_walltime_csv) instead.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match self {
            ResultTable::Rate { sweep, rows } => {
                w.write_record([
                    sweep.as_str(),
                    "algorithm",
                    "mean_rate",
                    "std_rate",
                    "stderr_rate",
                    "trials",
                ])?;
                for r in rows {
                    w.write_record(&[
                        r.sweep_value.to_string(),
                        r.algorithm.to_string(),
                        num(r.rate.mean),
                        num(r.rate.std),
                        num(r.rate.stderr),
                        r.rate.count.to_string(),
                    ])?;
                }
            }
            ResultTable::Gap(rows) => {
                w.write_record([
                    "n",
                    "algorithm",
                    "capacity",
                    "lower",
                    "upper",
                    "gap_lower",
                    "gap_lower_stderr",
                    "gap_upper",
                    "gap_upper_stderr",
                    "trials",
                ])?;
                for r in rows {
                    w.write_record(&[
                        r.n.to_string(),
                        r.algorithm.to_string(),
                        num(r.capacity.mean),
                        num(r.lower.mean),
                        num(r.upper.mean),
                        num(r.gap_lower.mean),
                        num(r.gap_lower.stderr),
                        num(r.gap_upper.mean),
                        num(r.gap_upper.stderr),
                        r.capacity.count.to_string(),
                    ])?;
                }
            }
            ResultTable::Match(rows) => {
                w.write_record([
                    "t",
                    "mode",
                    "exact_match",
                    "exact_match_stderr",
                    "element_match",
                    "trials",
                    "excluded_channels",
                ])?;
                for r in rows {
                    w.write_record(&[
                        r.samples.map_or_else(|| "inf".to_string(), |t| t.to_string()),
                        r.mode.clone(),
                        num(r.exact_match.mean),
                        num(r.exact_match.stderr),
                        num(r.element_match.mean),
                        r.exact_match.count.to_string(),
                        r.excluded_channels.to_string(),
                    ])?;
                }
            }
            ResultTable::Timing(rows) => {
                w.write_record(["n", "algorithm", "median_s", "ratio_to_first", "runs", "reps_per_run"])?;
                for r in rows {
                    w.write_record(&[
                        r.n.to_string(),
                        r.algorithm.to_string(),
                        num(r.median_s),
                        format!("{:.4}", r.ratio_to_first),
                        r.runs.to_string(),
                        r.reps_per_run.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Mean wall-clock seconds per algorithm run; `None` for tables without them.
    pub fn write_walltime_csv<W: Write>(&self, out: W) -> Result<Option<()>> {
        let ResultTable::Rate { sweep, rows } = self else {
            return Ok(None);
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record([sweep.as_str(), "algorithm", "mean_wall_s"])?;
        for r in rows {
            w.write_record(&[r.sweep_value.to_string(), r.algorithm.to_string(), num(r.mean_wall_s)])?;
        }
        w.flush()?;
        Ok(Some(()))
    }
}
