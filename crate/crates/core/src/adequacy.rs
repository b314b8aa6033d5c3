//! Distance to default, capital ratios and reverse stress tests.
//!
//! Provisions and capital are reported for the whole bank; the IRB share
//! of each is estimated before being set against the IRB conditional loss
//! curve. Provisions are split by one-year expected loss, capital by RWA.

use crate::engine::{LossCurve, LossMode, SolverOptions};
use crate::error::{AsrfError, Result};
use crate::factor::{self, FactorOptions};
use crate::math;
use crate::par::{self, Execution};
use crate::portfolio::{CapitalAccounts, CoverageGap, PortfolioSnapshot, Quarter, QuarterSeries};

/// Capital-ratio floors used when none are given.
pub const DEFAULT_FLOORS: [f64; 2] = [0.04, 0.08];

/// Solvency position of the IRB portfolio at a quarter end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvencyReading {
    pub quarter: Quarter,
    pub provisions_irb: f64,
    pub capital_irb: f64,
    pub capital_ratio: f64,
    /// Factor shock, in standard deviations, that exhausts IRB provisions and capital.
    pub dtd: f64,
    pub dtd_alpha: f64,
    /// IRB provisions fall short of IRB expected loss. The shortfall is not
    /// deducted from capital here.
    pub provision_shortfall: bool,
}

/// Weakest factor realisation that breaches a capital-ratio floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressReading {
    pub quarter: Quarter,
    pub floor: f64,
    pub y_hat: f64,
    pub alpha_hat: f64,
    pub loss_threshold: f64,
}

/// IRB fraction of one-year expected loss.
pub fn provision_share(irb_expected_loss: f64, non_irb_expected_loss: f64) -> Result<f64> {
    let total = irb_expected_loss + non_irb_expected_loss;
    if !(irb_expected_loss >= 0.0 && non_irb_expected_loss >= 0.0 && total > 0.0) {
        return Err(AsrfError::Domain(format!(
            "expected losses must be non-negative with a positive sum, got IRB {irb_expected_loss} and non-IRB {non_irb_expected_loss}"
        )));
    }
    Ok(irb_expected_loss / total)
}

fn inputs(series: &QuarterSeries, t: Quarter) -> Result<(&PortfolioSnapshot, &CapitalAccounts)> {
    let missing = |what: &str| AsrfError::Coverage {
        quarter: t,
        reason: format!("no {what} at {t}"),
    };
    let snapshot = series.snapshot(t).ok_or_else(|| missing("snapshot"))?;
    let accounts = series.accounts(t).ok_or_else(|| missing("accounts"))?;
    Ok((snapshot, accounts))
}

fn provisions_from_curve(curve: &LossCurve, accounts: &CapitalAccounts) -> Result<f64> {
    if accounts.provisions == 0.0 {
        return Ok(0.0);
    }
    let share = provision_share(curve.expected_loss(), accounts.non_irb_expected_loss)?;
    Ok(share * accounts.provisions)
}

/// IRB share of reported provisions at `t`.
pub fn allocate_provisions(series: &QuarterSeries, t: Quarter) -> Result<f64> {
    let (snapshot, accounts) = inputs(series, t)?;
    let curve = LossCurve::new(snapshot, LossMode::Regulatory)?;
    provisions_from_curve(&curve, accounts)
}

/// IRB share of the capital base, in proportion to RWA.
pub fn allocate_capital(accounts: &CapitalAccounts) -> f64 {
    accounts.rwa_irb / accounts.rwa_total * accounts.capital_base
}

/// Capital base over total RWA.
pub fn capital_ratio(accounts: &CapitalAccounts) -> f64 {
    accounts.capital_base / accounts.rwa_total
}

struct Position {
    curve: LossCurve,
    provisions_irb: f64,
    capital_irb: f64,
    rwa_irb: f64,
    capital_ratio: f64,
}

impl Position {
    fn at(series: &QuarterSeries, t: Quarter) -> Result<Self> {
        let (snapshot, accounts) = inputs(series, t)?;
        let curve = LossCurve::new(snapshot, LossMode::Regulatory)?;
        let provisions_irb = provisions_from_curve(&curve, accounts)?;
        Ok(Self {
            curve,
            provisions_irb,
            capital_irb: allocate_capital(accounts),
            rwa_irb: accounts.rwa_irb,
            capital_ratio: capital_ratio(accounts),
        })
    }

    fn solvency(&self, t: Quarter, solver: SolverOptions) -> Result<SolvencyReading> {
        let resources = self.provisions_irb + self.capital_irb;
        let y = self.curve.solve(resources, Some(t), solver)?;
        let dtd = -y;
        Ok(SolvencyReading {
            quarter: t,
            provisions_irb: self.provisions_irb,
            capital_irb: self.capital_irb,
            capital_ratio: self.capital_ratio,
            dtd,
            dtd_alpha: math::norm_cdf(dtd),
            provision_shortfall: self.provisions_irb < self.curve.expected_loss(),
        })
    }

    fn stress(&self, t: Quarter, floor: f64, solver: SolverOptions) -> Result<StressReading> {
        if !(floor >= 0.0 && floor.is_finite()) {
            return Err(AsrfError::Domain(format!(
                "capital-ratio floor must be finite and >= 0, got {floor}"
            )));
        }
        let loss_threshold = self.provisions_irb + self.capital_irb - floor * self.rwa_irb;
        if loss_threshold <= 0.0 {
            let (min, max) = self.curve.attainable(solver.bracket);
            return Err(AsrfError::Infeasible {
                quarter: Some(t),
                target: loss_threshold,
                min,
                max,
            });
        }
        let y_hat = self.curve.solve(loss_threshold, Some(t), solver)?;
        Ok(StressReading {
            quarter: t,
            floor,
            y_hat,
            alpha_hat: factor::confidence_of(y_hat),
            loss_threshold,
        })
    }
}

/// Distance to default of the IRB portfolio at `t`.
pub fn distance_to_default(series: &QuarterSeries, t: Quarter, solver: SolverOptions) -> Result<SolvencyReading> {
    Position::at(series, t)?.solvency(t, solver)
}

/// Weakest shock that breaches the capital-ratio `floor` at `t`.
pub fn reverse_stress(series: &QuarterSeries, t: Quarter, floor: f64, solver: SolverOptions) -> Result<StressReading> {
    Position::at(series, t)?.stress(t, floor, solver)
}

/// One row of the solvency table. Stress cells and the factor reading are
/// empty when infeasible or uncomputable.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvencyRow {
    pub solvency: SolvencyReading,
    pub stress: Vec<Option<StressReading>>,
    pub factor: Option<factor::FactorReading>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolvencyReport {
    pub floors: Vec<f64>,
    pub rows: Vec<SolvencyRow>,
    /// Quarters dropped from the table, or cells left empty, with reasons.
    pub gaps: Vec<CoverageGap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub floors: Vec<f64>,
    pub factor: FactorOptions,
    pub solver: SolverOptions,
    pub execution: Execution,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            floors: DEFAULT_FLOORS.to_vec(),
            factor: FactorOptions::default(),
            solver: SolverOptions::default(),
            execution: Execution::default(),
        }
    }
}

/// Solvency, stress and factor readings for every snapshot quarter.
pub fn solvency_report(series: &QuarterSeries, opts: &ReportOptions) -> Result<SolvencyReport> {
    let quarters: Vec<Quarter> = series.snapshot_quarters().collect();
    let factors = factor::factor_series(series, &opts.factor)?;
    let rows = par::map_items(
        opts.execution,
        &quarters,
        |&t| -> Result<(SolvencyRow, Vec<CoverageGap>)> {
            let position = Position::at(series, t)?;
            let solvency = position.solvency(t, opts.solver)?;
            let mut gaps = Vec::new();
            let mut stress = Vec::with_capacity(opts.floors.len());
            for &floor in &opts.floors {
                match position.stress(t, floor, opts.solver) {
                    Ok(r) => stress.push(Some(r)),
                    Err(e @ AsrfError::Infeasible { .. }) => {
                        gaps.push(CoverageGap {
                            quarter: t,
                            reason: format!("floor {floor}: {e}"),
                        });
                        stress.push(None);
                    }
                    Err(e) => return Err(e),
                }
            }
            let factor = factors.readings.iter().find(|r| r.quarter == t).copied();
            Ok((
                SolvencyRow {
                    solvency,
                    stress,
                    factor,
                },
                gaps,
            ))
        },
    );
    let mut report = SolvencyReport {
        floors: opts.floors.clone(),
        ..Default::default()
    };
    for (t, row) in quarters.into_iter().zip(rows) {
        match row {
            Ok((row, gaps)) => {
                report.rows.push(row);
                report.gaps.extend(gaps);
            }
            Err(e @ (AsrfError::Infeasible { .. } | AsrfError::Coverage { .. })) => {
                report.gaps.push(CoverageGap {
                    quarter: t,
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::conditional_expected_loss;
    use crate::portfolio::fixtures::{accounts, q, retail_grade, series};
    use proptest::prelude::*;

    fn one_quarter(capital_base: f64, provisions: f64) -> QuarterSeries {
        let t = q(2008, 4);
        let mut s = QuarterSeries::new();
        s.insert_snapshot(PortfolioSnapshot::new(
            t,
            vec![
                retail_grade("a", 100.0, 0.45, 0.01, 0.15),
                retail_grade("b", 80.0, 0.25, 0.04, 0.05),
            ],
        ));
        s.insert_accounts(CapitalAccounts {
            capital_base,
            provisions,
            ..accounts(t)
        });
        s
    }

    #[test]
    fn provision_split() {
        assert!((provision_share(60.0, 40.0).unwrap() * 10.0 - 6.0).abs() < 1e-12);
        assert_eq!(provision_share(5.0, 0.0).unwrap(), 1.0);
        assert!(provision_share(0.0, 0.0).is_err());
    }

    #[test]
    fn zero_provisions_allocate_zero() {
        let s = one_quarter(13.0, 0.0);
        assert_eq!(allocate_provisions(&s, q(2008, 4)).unwrap(), 0.0);
    }

    #[test]
    fn provisions_need_coverage() {
        let s = one_quarter(13.0, 2.0);
        assert!(matches!(
            allocate_provisions(&s, q(2009, 1)),
            Err(AsrfError::Coverage { .. })
        ));
    }

    #[test]
    fn capital_split() {
        let a = CapitalAccounts {
            rwa_irb: 60.0,
            rwa_total: 100.0,
            capital_base: 50.0,
            ..accounts(q(2008, 4))
        };
        assert!((allocate_capital(&a) - 30.0).abs() < 1e-12);
        let a = CapitalAccounts {
            capital_base: 11.51,
            ..a
        };
        let k = allocate_capital(&a);
        assert!((k - 6.906).abs() < 1e-12);
        assert!((k / a.rwa_irb - 0.1151).abs() < 1e-12);
        let full = CapitalAccounts { rwa_irb: 100.0, ..a };
        assert_eq!(allocate_capital(&full), 11.51);
    }

    #[test]
    fn distance_to_default_round_trip() {
        let mut s = one_quarter(0.0, 0.0);
        let t = q(2008, 4);
        let target = conditional_expected_loss(s.snapshot(t).unwrap(), -3.5, LossMode::Regulatory).unwrap();
        // capital only; IRB share of capital is 70/120
        let base = target * 120.0 / 70.0;
        s.insert_accounts(CapitalAccounts {
            capital_base: base,
            provisions: 0.0,
            ..accounts(t)
        });
        let r = distance_to_default(&s, t, SolverOptions::default()).unwrap();
        assert!((r.dtd - 3.5).abs() < 1e-9, "{}", r.dtd);
        assert!((r.dtd_alpha - math::norm_cdf(r.dtd)).abs() < 1e-15);
        assert!(r.provision_shortfall);
        assert!((r.capital_ratio - base / 120.0).abs() < 1e-15);
    }

    #[test]
    fn excessive_resources_are_infeasible() {
        let s = one_quarter(1e6, 0.0);
        let err = distance_to_default(&s, q(2008, 4), SolverOptions::default()).unwrap_err();
        assert!(matches!(err, AsrfError::Infeasible { quarter: Some(_), .. }), "{err}");
    }

    #[test]
    fn floor_zero_matches_distance_to_default() {
        let s = one_quarter(13.0, 2.0);
        let t = q(2008, 4);
        let d = distance_to_default(&s, t, SolverOptions::default()).unwrap();
        let r = reverse_stress(&s, t, 0.0, SolverOptions::default()).unwrap();
        assert_eq!(r.y_hat, -d.dtd);
        assert!((r.alpha_hat - d.dtd_alpha).abs() < 1e-12);
    }

    #[test]
    fn floor_above_resources_is_infeasible() {
        let s = one_quarter(13.0, 2.0);
        // threshold = Qn + 13·70/120 − 0.5·70 < 0
        let err = reverse_stress(&s, q(2008, 4), 0.5, SolverOptions::default()).unwrap_err();
        assert!(matches!(err, AsrfError::Infeasible { target, .. } if target < 0.0));
        assert!(reverse_stress(&s, q(2008, 4), -0.01, SolverOptions::default()).is_err());
    }

    #[test]
    fn mapping_anchors() {
        let round = |x: f64, d: i32| (x * 10f64.powi(d)).round() / 10f64.powi(d);
        assert_eq!(round(math::norm_cdf(3.588), 5), 0.99983);
        assert_eq!(round(math::norm_cdf(3.504), 5), 0.99977);
        assert_eq!(round(factor::confidence_of(-3.044), 5), 0.99883);
        assert!((factor::confidence_of(-2.17) - 0.9849).abs() <= 3e-4);
    }

    #[test]
    fn report_covers_each_snapshot() {
        let s = series(8, 0);
        let report = solvency_report(&s, &ReportOptions::default()).unwrap();
        assert_eq!(report.rows.len(), 8);
        for row in &report.rows {
            assert_eq!(row.stress.len(), 2);
            let (lo, hi) = (row.stress[0].unwrap(), row.stress[1].unwrap());
            assert!(hi.y_hat > lo.y_hat);
        }
        let with_factor = report.rows.iter().filter(|r| r.factor.is_some()).count();
        assert_eq!(with_factor, 4);
        let seq = solvency_report(
            &s,
            &ReportOptions {
                execution: Execution::Sequential,
                ..Default::default()
            },
        );
        assert_eq!(seq.unwrap(), report);
    }

    proptest! {
        #[test]
        fn kappa_identity(irb in 1.0..1e6f64, extra in 0.0..1e6f64, ratio in 0.001..0.5f64) {
            let rwa_total = irb + extra;
            let a = CapitalAccounts {
                rwa_irb: irb, rwa_credit: rwa_total, rwa_total, capital_base: ratio * rwa_total,
                ..accounts(q(2008, 4))
            };
            let lhs = allocate_capital(&a) / a.rwa_irb;
            prop_assert!((lhs - capital_ratio(&a)).abs() <= 1e-12 * capital_ratio(&a));
        }

        #[test]
        fn stress_factor_increases_with_floor(f1 in 0.0..0.15f64, df in 1e-3..0.05f64) {
            let s = one_quarter(13.0, 2.0);
            let t = q(2008, 4);
            let a = reverse_stress(&s, t, f1, SolverOptions::default());
            let b = reverse_stress(&s, t, f1 + df, SolverOptions::default());
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(b.y_hat > a.y_hat + 1e-12);
                prop_assert!((a.alpha_hat - (1.0 - math::norm_cdf(a.y_hat))).abs() < 1e-10);
            }
        }
    }
}
