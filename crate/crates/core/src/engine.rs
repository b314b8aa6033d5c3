//! Conditional default probabilities, expected and conditional expected
//! loss, and capital under the asymptotic single risk factor model.

use crate::error::{AsrfError, Result};
use crate::math::{self, CompensatedSum};
use crate::par::{self, Execution};
use crate::params::{asset_correlation, SupervisoryParams};
use crate::portfolio::{ObligorGrade, PortfolioSnapshot, Quarter};

/// Grades per work unit when summing over large books.
const CHUNK: usize = 2048;

/// Regulatory confidence level.
pub const REGULATORY_CONFIDENCE: f64 = 0.999;

/// Whether maturity adjustments weight each grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossMode {
    /// Every grade weighted by EAD times LGD.
    Raw,
    /// EAD times LGD times the supervisory maturity adjustment.
    Regulatory,
}

/// Bracket and tolerance for the factor solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub bracket: (f64, f64),
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            bracket: math::DEFAULT_BRACKET,
            tol: math::DEFAULT_TOL,
        }
    }
}

/// Conditional probability of default given a realisation `y` of the
/// systematic factor: Φ((Φ⁻¹(pd) − √ρ·y)/√(1−ρ)).
pub fn conditional_pd(pd: f64, rho: f64, y: f64) -> Result<f64> {
    if !(pd > 0.0 && pd < 1.0) {
        return Err(AsrfError::Domain(format!("pd must lie in (0, 1), got {pd}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(AsrfError::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !y.is_finite() {
        return Err(AsrfError::Domain(format!("factor realisation must be finite, got {y}")));
    }
    Ok(math::norm_cdf(
        (math::norm_quantile(pd) - rho.sqrt() * y) / (1.0 - rho).sqrt(),
    ))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub(crate) weight: f64,
    pub(crate) pd: f64,
    pub(crate) threshold: f64,
    pub(crate) sqrt_rho: f64,
    pub(crate) sqrt_idio: f64,
}

impl Term {
    #[inline]
    pub(crate) fn conditional_pd(&self, y: f64) -> f64 {
        math::norm_cdf((self.threshold - self.sqrt_rho * y) / self.sqrt_idio)
    }
}

/// Conditional expected loss of a snapshot as a function of the factor.
///
/// Strictly decreasing in `y`, tending to the sum of weights as `y → −∞`
/// and to zero as `y → +∞`. Sums are compensated and taken over fixed
/// chunks in grade order, so parallel and sequential evaluation agree bit
/// for bit.
#[derive(Debug, Clone)]
pub struct LossCurve {
    terms: Vec<Term>,
    mode: LossMode,
    execution: Execution,
}

fn grade_weight_and_rho(grade: &ObligorGrade, mode: LossMode) -> Result<(f64, f64)> {
    match mode {
        LossMode::Regulatory => {
            let p = SupervisoryParams::resolve(grade)?;
            Ok((grade.ead * grade.lgd * p.maturity_adjustment, p.rho))
        }
        LossMode::Raw => {
            let rho = match grade.rho_override {
                Some(rho) => rho,
                None => asset_correlation(grade.asset_class, grade.pd, grade.firm_size)?,
            };
            Ok((grade.ead * grade.lgd, rho))
        }
    }
}

impl LossCurve {
    pub fn new(snapshot: &PortfolioSnapshot, mode: LossMode) -> Result<Self> {
        snapshot.validate()?;
        let terms = snapshot
            .grades
            .iter()
            .map(|g| {
                let (weight, rho) = grade_weight_and_rho(g, mode)?;
                Ok(Term {
                    weight,
                    pd: g.pd,
                    threshold: math::norm_quantile(g.pd),
                    sqrt_rho: rho.sqrt(),
                    sqrt_idio: (1.0 - rho).sqrt(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            terms,
            mode,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn mode(&self) -> LossMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn sum_terms<F>(&self, f: F) -> f64
    where
        F: Fn(&Term) -> f64 + Sync + Send,
    {
        let partials = par::map_chunks(self.execution, &self.terms, CHUNK, |chunk| {
            chunk.iter().map(&f).collect::<CompensatedSum>()
        });
        let mut total = CompensatedSum::new();
        for p in partials {
            total.add(p.total());
        }
        total.total()
    }

    /// Conditional expected loss at factor realisation `y`.
    pub fn eval(&self, y: f64) -> f64 {
        self.sum_terms(|t| t.weight * t.conditional_pd(y))
    }

    /// Conditional expected loss at the α tail point, written with
    /// +√ρ·Φ⁻¹(α) in place of −√ρ·Φ⁻¹(1−α).
    pub fn eval_tail(&self, alpha: f64) -> f64 {
        let z = math::norm_quantile(alpha);
        self.sum_terms(|t| t.weight * math::norm_cdf((t.threshold + t.sqrt_rho * z) / t.sqrt_idio))
    }

    /// Weighted unconditional expected loss.
    pub fn expected_loss(&self) -> f64 {
        self.sum_terms(|t| t.weight * t.pd)
    }

    /// Limit of the curve as `y → −∞`.
    pub fn ceiling(&self) -> f64 {
        self.sum_terms(|t| t.weight)
    }

    /// Attainable conditional loss over a bracket, as (min, max).
    pub fn attainable(&self, bracket: (f64, f64)) -> (f64, f64) {
        (self.eval(bracket.1), self.eval(bracket.0))
    }

    /// Factor realisation at which the conditional expected loss equals `target`.
    pub fn solve(&self, target: f64, quarter: Option<Quarter>, opts: SolverOptions) -> Result<f64> {
        let (lo, hi) = opts.bracket;
        let (min, max) = self.attainable(opts.bracket);
        if !(target.is_finite() && target >= min && target <= max) || min == max {
            return Err(AsrfError::Infeasible {
                quarter,
                target,
                min,
                max,
            });
        }
        math::find_root_monotone(|y| self.eval(y) - target, lo, hi, opts.tol)
    }
}

/// Expected loss, conditional loss and capital at one confidence level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossDecomposition {
    pub expected_loss: f64,
    pub conditional_loss: f64,
    pub capital: f64,
    pub confidence: f64,
    pub factor_point: f64,
}

/// Conditional expected portfolio loss at factor realisation `y`.
pub fn conditional_expected_loss(snapshot: &PortfolioSnapshot, y: f64, mode: LossMode) -> Result<f64> {
    if !y.is_finite() {
        return Err(AsrfError::Domain(format!("factor realisation must be finite, got {y}")));
    }
    Ok(LossCurve::new(snapshot, mode)?.eval(y))
}

/// Expected portfolio loss.
pub fn expected_loss(snapshot: &PortfolioSnapshot, mode: LossMode) -> Result<f64> {
    Ok(LossCurve::new(snapshot, mode)?.expected_loss())
}

impl LossCurve {
    /// Capital against unexpected loss at confidence `alpha`.
    pub fn capital(&self, alpha: f64) -> Result<LossDecomposition> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(AsrfError::Domain(format!("confidence must lie in (0, 1), got {alpha}")));
        }
        let expected_loss = self.expected_loss();
        let conditional_loss = self.eval_tail(alpha);
        Ok(LossDecomposition {
            expected_loss,
            conditional_loss,
            capital: conditional_loss - expected_loss,
            confidence: alpha,
            factor_point: math::norm_quantile(1.0 - alpha),
        })
    }
}

/// Capital against unexpected loss at confidence `alpha`.
pub fn capital(snapshot: &PortfolioSnapshot, alpha: f64, mode: LossMode) -> Result<LossDecomposition> {
    LossCurve::new(snapshot, mode)?.capital(alpha)
}

/// Regulatory capital: 99.9% confidence with maturity adjustments.
pub fn regulatory_capital(snapshot: &PortfolioSnapshot) -> Result<LossDecomposition> {
    capital(snapshot, REGULATORY_CONFIDENCE, LossMode::Regulatory)
}
