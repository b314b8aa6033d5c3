//! Recovery of the systematic factor from realized credit losses.
//!
//! The reading at quarter `t` pairs the snapshot reported `input_lead`
//! quarters earlier (two by default, the midpoint of the one-year horizon)
//! with credit losses incurred over the four quarters `s-1..=s+2`, where
//! `s = t + lag` allows for delayed recognition of bad debts.

use std::fmt;
use std::str::FromStr;

use crate::engine::{LossCurve, LossMode, SolverOptions};
use crate::error::{AsrfError, Result};
use crate::math;
use crate::par::{self, Execution};
use crate::portfolio::{CoverageGap, Quarter, QuarterSeries};

/// How total credit losses are attributed to the IRB portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossAllocation {
    /// Scale by IRB credit RWA over total credit RWA at the input quarter.
    ProportionalRwa,
    /// Attribute every loss to IRB exposures; gives a lower bound on the factor.
    AllToIrb,
}

impl LossAllocation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ProportionalRwa => "proportional_rwa",
            Self::AllToIrb => "all_to_irb",
        }
    }
}

impl fmt::Display for LossAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossAllocation {
    type Err = AsrfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proportional_rwa" | "proportional" => Ok(Self::ProportionalRwa),
            "all_to_irb" | "all-to-irb" => Ok(Self::AllToIrb),
            _ => Err(AsrfError::Domain(format!("unknown loss allocation `{s}`"))),
        }
    }
}

pub const MAX_LAG: u8 = 2;
pub const DEFAULT_INPUT_LEAD: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Bad-debt recognition delay in quarters, 0..=2.
    pub lag: u8,
    pub allocation: LossAllocation,
    /// Quarters between the input snapshot and the reading.
    pub input_lead: u8,
    pub solver: SolverOptions,
    pub execution: Execution,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            lag: 0,
            allocation: LossAllocation::ProportionalRwa,
            input_lead: DEFAULT_INPUT_LEAD,
            solver: SolverOptions::default(),
            execution: Execution::default(),
        }
    }
}

impl FactorOptions {
    pub fn with_lag(mut self, lag: u8) -> Self {
        self.lag = lag;
        self
    }

    pub fn with_allocation(mut self, allocation: LossAllocation) -> Self {
        self.allocation = allocation;
        self
    }

    fn check(&self) -> Result<()> {
        if self.lag > MAX_LAG {
            return Err(AsrfError::Domain(format!(
                "lag must be 0..={MAX_LAG}, got {}",
                self.lag
            )));
        }
        Ok(())
    }
}

/// A recovered realisation of the systematic factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorReading {
    pub quarter: Quarter,
    pub y: f64,
    /// 1 − Φ(y): share of economic scenarios no better than this one.
    pub alpha: f64,
    pub lag: u8,
    pub allocation: LossAllocation,
    /// Four-quarter losses attributed to the IRB portfolio.
    pub window_losses: f64,
}

/// Confidence level matching a factor realisation, 1 − Φ(y).
pub fn confidence_of(y: f64) -> f64 {
    math::norm_cdf(-y)
}

fn coverage(series: &QuarterSeries, t: Quarter, lag: u8, input_lead: u8) -> Result<()> {
    match series.factor_coverage_gap(t, lag, input_lead) {
        None => Ok(()),
        Some(reason) => Err(AsrfError::Coverage { quarter: t, reason }),
    }
}

/// Four-quarter credit losses attributed to the IRB portfolio for a reading at `t`.
pub fn allocate_losses(
    series: &QuarterSeries,
    t: Quarter,
    lag: u8,
    allocation: LossAllocation,
    input_lead: u8,
) -> Result<f64> {
    if lag > MAX_LAG {
        return Err(AsrfError::Domain(format!("lag must be 0..={MAX_LAG}, got {lag}")));
    }
    coverage(series, t, lag, input_lead)?;
    let input = t.offset(-i64::from(input_lead));
    let accounts = series.accounts(input).expect("coverage checked");
    let ratio = match allocation {
        LossAllocation::ProportionalRwa => accounts.rwa_irb / accounts.rwa_credit,
        LossAllocation::AllToIrb => 1.0,
    };
    let s = t.offset(i64::from(lag));
    let window: f64 = (-1..=2)
        .map(|k| series.loss(s.offset(k)).expect("coverage checked"))
        .sum();
    Ok(ratio * window)
}

/// Solves for the factor realisation whose conditional expected loss on
/// the input snapshot equals the allocated window losses.
pub fn recover_factor(series: &QuarterSeries, t: Quarter, opts: &FactorOptions) -> Result<FactorReading> {
    opts.check()?;
    let window_losses = allocate_losses(series, t, opts.lag, opts.allocation, opts.input_lead)?;
    let snapshot = series
        .snapshot(t.offset(-i64::from(opts.input_lead)))
        .expect("coverage checked");
    let curve = LossCurve::new(snapshot, LossMode::Regulatory)?;
    let y = curve.solve(window_losses, Some(t), opts.solver)?;
    Ok(FactorReading {
        quarter: t,
        y,
        alpha: confidence_of(y),
        lag: opts.lag,
        allocation: opts.allocation,
        window_losses,
    })
}

/// Readings for every computable quarter, with the rest in a gap report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorSeries {
    pub readings: Vec<FactorReading>,
    pub gaps: Vec<CoverageGap>,
}

/// Factor readings for every quarter that has an input snapshot `input_lead`
/// quarters earlier. Quarters without coverage, or whose losses fall outside
/// the attainable range, are skipped and reported.
pub fn factor_series(series: &QuarterSeries, opts: &FactorOptions) -> Result<FactorSeries> {
    opts.check()?;
    let candidates = series.factor_candidates(opts.input_lead);
    let results = par::map_items(opts.execution, &candidates, |&t| (t, recover_factor(series, t, opts)));
    let mut out = FactorSeries::default();
    for (t, r) in results {
        match r {
            Ok(reading) => out.readings.push(reading),
            Err(AsrfError::Coverage { reason, .. }) => out.gaps.push(CoverageGap { quarter: t, reason }),
            Err(e) => out.gaps.push(CoverageGap {
                quarter: t,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}
