//! One-factor Gaussian copula loss simulation.
//!
//! Each pooled grade is split into `obligors_per_grade` equal obligors.
//! Obligor `j` defaults when `√ρ·Y + √(1−ρ)·εⱼ < Φ⁻¹(p)`. Every scenario
//! draws from its own ChaCha stream keyed by (seed, scenario index), so the
//! output does not depend on how scenarios are scheduled.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::engine::{LossCurve, LossMode, Term};
use crate::error::{AsrfError, Result};
use crate::math::{self, CompensatedSum};
use crate::par::{self, Execution};
use crate::portfolio::{ObligorGrade, PortfolioSnapshot, Quarter};

/// Fewest batches accepted for batch standard errors.
pub const MIN_BATCHES: usize = 30;
pub const DEFAULT_BATCHES: usize = 50;

/// How defaults within a grade are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Idiosyncratic normal per obligor compared to the default threshold.
    #[default]
    AssetValue,
    /// Default count per grade drawn from Bin(n, p(y)). Same distribution,
    /// cost independent of `obligors_per_grade`.
    Binomial,
}

impl Sampler {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AssetValue => "asset_value",
            Self::Binomial => "binomial",
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sampler {
    type Err = AsrfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asset_value" | "asset-value" => Ok(Self::AssetValue),
            "binomial" => Ok(Self::Binomial),
            _ => Err(AsrfError::Domain(format!("unknown sampler `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub scenarios: usize,
    pub seed: u64,
    pub obligors_per_grade: u64,
    /// Fix the systematic factor instead of drawing it.
    pub conditional_y: Option<f64>,
    pub sampler: Sampler,
    pub mode: LossMode,
    pub batches: usize,
    pub execution: Execution,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scenarios: 100_000,
            seed: 0,
            obligors_per_grade: 100,
            conditional_y: None,
            sampler: Sampler::default(),
            mode: LossMode::Raw,
            batches: DEFAULT_BATCHES,
            execution: Execution::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.scenarios == 0 {
            problems.push("scenarios must be at least 1".to_string());
        }
        if self.obligors_per_grade == 0 {
            problems.push("obligors_per_grade must be at least 1".to_string());
        }
        if let Some(y) = self.conditional_y {
            if !y.is_finite() {
                problems.push(format!("conditional_y must be finite, got {y}"));
            }
        }
        if self.batches < MIN_BATCHES {
            problems.push(format!("batches must be at least {MIN_BATCHES}, got {}", self.batches));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(AsrfError::Validation(problems))
        }
    }
}

/// Simulated portfolio losses, one per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDistribution {
    by_scenario: Vec<f64>,
    sorted: Vec<f64>,
    mean: f64,
    std_error: f64,
    batches: usize,
}

impl LossDistribution {
    pub fn from_losses(losses: Vec<f64>) -> Result<Self> {
        Self::with_batches(losses, DEFAULT_BATCHES)
    }

    fn with_batches(by_scenario: Vec<f64>, batches: usize) -> Result<Self> {
        if by_scenario.is_empty() {
            return Err(AsrfError::Domain("loss distribution needs at least one entry".into()));
        }
        if let Some(x) = by_scenario.iter().find(|x| !x.is_finite()) {
            return Err(AsrfError::Domain(format!("non-finite loss {x}")));
        }
        let n = by_scenario.len() as f64;
        let mean = by_scenario.iter().copied().collect::<CompensatedSum>().total() / n;
        let ss = by_scenario
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .collect::<CompensatedSum>()
            .total();
        let std_error = if by_scenario.len() > 1 {
            (ss / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        let mut sorted = by_scenario.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            by_scenario,
            sorted,
            mean,
            std_error,
            batches,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Losses in ascending order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Losses in scenario order.
    pub fn by_scenario(&self) -> &[f64] {
        &self.by_scenario
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std_error
    }

    /// Lower α-quantile: the ⌈αN⌉-th order statistic.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        order_statistic(&self.sorted, alpha)
    }

    /// Standard error of the α-quantile from contiguous scenario batches.
    pub fn quantile_std_error(&self, alpha: f64) -> Result<f64> {
        let b = self.batches;
        if self.len() < b {
            return Err(AsrfError::Domain(format!(
                "{} scenarios cannot fill {b} batches",
                self.len()
            )));
        }
        let size = self.len() / b;
        let mut estimates = Vec::with_capacity(b);
        for chunk in self.by_scenario.chunks_exact(size).take(b) {
            let mut batch = chunk.to_vec();
            batch.sort_by(f64::total_cmp);
            estimates.push(order_statistic(&batch, alpha)?);
        }
        let m = estimates.iter().sum::<f64>() / b as f64;
        let var = estimates.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b as f64 - 1.0);
        // a batch quantile has the spread of an estimate from N/b scenarios
        Ok((var / b as f64).sqrt())
    }
}

fn order_statistic(sorted: &[f64], alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(AsrfError::Domain(format!(
            "quantile level must lie in [0, 1], got {alpha}"
        )));
    }
    let n = sorted.len();
    let x = alpha * n as f64;
    let r = x.round();
    // αN that should be an integer but picked up rounding error
    let k = if (x - r).abs() <= 4.0 * f64::EPSILON * x.max(1.0) {
        r
    } else {
        x.ceil()
    };
    let k = (k as usize).clamp(1, n);
    Ok(sorted[k - 1])
}

/// Empirical credit VaR at confidence `alpha`.
pub fn empirical_var(dist: &LossDistribution, alpha: f64) -> Result<f64> {
    dist.quantile(alpha)
}

fn scenario_rng(seed: u64, scenario: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scenario as u64);
    rng
}

fn scenario_loss(terms: &[Term], config: &SimConfig, scenario: usize) -> f64 {
    let mut rng = scenario_rng(config.seed, scenario);
    let y = match config.conditional_y {
        Some(y) => y,
        None => rng.sample(StandardNormal),
    };
    let n = config.obligors_per_grade;
    let mut loss = CompensatedSum::new();
    for t in terms {
        let defaults = match config.sampler {
            Sampler::AssetValue => {
                let systematic = t.sqrt_rho * y;
                let mut k = 0u64;
                for _ in 0..n {
                    let eps: f64 = rng.sample(StandardNormal);
                    if systematic + t.sqrt_idio * eps < t.threshold {
                        k += 1;
                    }
                }
                k
            }
            Sampler::Binomial => {
                let p = t.conditional_pd(y);
                Binomial::new(n, p)
                    .expect("conditional pd lies in [0, 1]")
                    .sample(&mut rng)
            }
        };
        if defaults > 0 {
            loss.add(t.weight * defaults as f64 / n as f64);
        }
    }
    loss.total()
}

/// Simulates the portfolio loss distribution of `snapshot`.
pub fn simulate(snapshot: &PortfolioSnapshot, config: &SimConfig) -> Result<LossDistribution> {
    config.validate()?;
    let curve = LossCurve::new(snapshot, config.mode)?;
    simulate_curve(&curve, config)
}

fn simulate_curve(curve: &LossCurve, config: &SimConfig) -> Result<LossDistribution> {
    let terms = curve.terms();
    let losses = par::map_indices(config.execution, config.scenarios, |i| scenario_loss(terms, config, i));
    LossDistribution::with_batches(losses, config.batches)
}

/// Simulated VaR against the asymptotic value for one granularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub obligors: u64,
    pub mc_var: f64,
    pub mc_var_se: f64,
    pub asrf_value: f64,
    /// |mc_var − asrf_value| / asrf_value.
    pub relative_gap: f64,
    pub gap_se: f64,
}

/// Compares simulated VaR at `alpha` for each clone count with the
/// conditional expected loss at Φ⁻¹(1−α) for a single-grade book.
pub fn convergence_study(
    template: &ObligorGrade,
    clone_counts: &[u64],
    alpha: f64,
    config: &SimConfig,
) -> Result<Vec<ConvergenceRow>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AsrfError::Domain(format!("confidence must lie in (0, 1), got {alpha}")));
    }
    if clone_counts.is_empty() || clone_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AsrfError::Domain(
            "clone counts must be non-empty and strictly increasing".into(),
        ));
    }
    let snapshot = PortfolioSnapshot::new(Quarter::new(2000, 1)?, vec![template.clone()]);
    let curve = LossCurve::new(&snapshot, config.mode)?;
    let asrf_value = curve.eval(math::norm_quantile(1.0 - alpha));
    clone_counts
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                obligors_per_grade: n,
                conditional_y: None,
                ..*config
            };
            cfg.validate()?;
            let dist = simulate_curve(&curve, &cfg)?;
            let mc_var = dist.quantile(alpha)?;
            let mc_var_se = dist.quantile_std_error(alpha)?;
            Ok(ConvergenceRow {
                obligors: n,
                mc_var,
                mc_var_se,
                asrf_value,
                relative_gap: (mc_var - asrf_value).abs() / asrf_value,
                gap_se: mc_var_se / asrf_value,
            })
        })
        .collect()
}
