//! Synthetic quarterly series shaped like prudential reporting data.
//!
//! A book of graded exposures is drawn once per seed across every asset
//! class, with grades spread over PD bands and exposure-weighted toward the
//! safer bands. Exposure grows slowly; PDs stay fixed. Accounts are derived
//! from the regulatory capital of each snapshot, and quarterly credit losses
//! are chosen so that the allocated four-quarter window at `t` equals the
//! conditional expected loss of the `t-2` snapshot at the path value `y(t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::engine::{conditional_pd, regulatory_capital, LossCurve, LossMode};
use crate::error::{AsrfError, Result};
use crate::factor::DEFAULT_INPUT_LEAD;
use crate::params::SupervisoryParams;
use crate::portfolio::{
    AssetClass, CapitalAccounts, LossRecord, ObligorGrade, PortfolioSnapshot, Quarter, QuarterSeries,
};

/// Share of IRB exposure and LGD for each class.
pub const CLASS_MIX: [(AssetClass, f64, f64); 7] = [
    (AssetClass::ResidentialMortgage, 0.50, 0.20),
    (AssetClass::Corporate, 0.16, 0.45),
    (AssetClass::Sme, 0.08, 0.40),
    (AssetClass::Bank, 0.08, 0.45),
    (AssetClass::Sovereign, 0.06, 0.45),
    (AssetClass::QualifiedRevolving, 0.04, 0.75),
    (AssetClass::OtherRetail, 0.08, 0.55),
];

pub const DEFAULT_PD_BAND_EDGES: [f64; 8] = [0.0003, 0.001, 0.0025, 0.005, 0.01, 0.02, 0.05, 0.15];

/// IRB share of credit RWA.
pub const IRB_CREDIT_SHARE: f64 = 0.75;
/// Credit share of total RWA.
pub const CREDIT_TOTAL_SHARE: f64 = 0.88;
pub const CAPITAL_RATIO: f64 = 0.11;
/// Provisions as a multiple of total expected loss.
pub const PROVISION_COVER: f64 = 1.1;
/// Non-IRB expected loss as a multiple of IRB expected loss.
pub const NON_IRB_EL_RATIO: f64 = 0.25;
/// Quarterly exposure growth.
pub const EAD_GROWTH: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub start: Quarter,
    pub quarters: usize,
    pub grades_per_class: usize,
    pub pd_band_edges: Vec<f64>,
    /// Factor realisation for each quarter from `start`.
    pub base_y_path: Vec<f64>,
    pub seed: u64,
    /// Total IRB exposure at the first quarter.
    pub ead_scale: f64,
    /// Sample window losses from this many obligors per grade instead of
    /// using the conditional expectation.
    pub noisy: Option<u64>,
}

/// A slow cycle around a mildly adverse mean.
pub fn default_path(quarters: usize) -> Vec<f64> {
    (0..quarters)
        .map(|i| -0.3 + 0.6 * (std::f64::consts::TAU * i as f64 / 16.0).cos())
        .collect()
}

impl SynthSpec {
    pub fn new(quarters: usize, seed: u64) -> Self {
        Self {
            start: Quarter::new(2006, 1).expect("valid quarter"),
            quarters,
            grades_per_class: 6,
            pd_band_edges: DEFAULT_PD_BAND_EDGES.to_vec(),
            base_y_path: default_path(quarters),
            seed,
            ead_scale: 100_000.0,
            noisy: None,
        }
    }

    pub fn with_path(mut self, path: Vec<f64>) -> Self {
        self.quarters = path.len();
        self.base_y_path = path;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.quarters == 0 {
            problems.push("quarters must be at least 1".to_string());
        }
        if self.grades_per_class == 0 {
            problems.push("grades_per_class must be at least 1".to_string());
        }
        let edges = &self.pd_band_edges;
        if edges.len() < 2 {
            problems.push("pd_band_edges needs at least two edges".to_string());
        }
        if !edges.iter().all(|&p| p > 0.0 && p < 1.0) || edges.windows(2).any(|w| w[0] >= w[1]) {
            problems.push("pd_band_edges must be strictly ascending inside (0, 1)".to_string());
        }
        if self.base_y_path.len() != self.quarters {
            problems.push(format!(
                "base_y_path has {} values for {} quarters",
                self.base_y_path.len(),
                self.quarters
            ));
        }
        if self.base_y_path.iter().any(|y| !y.is_finite()) {
            problems.push("base_y_path must be finite".to_string());
        }
        if !(self.ead_scale.is_finite() && self.ead_scale > 0.0) {
            problems.push(format!("ead_scale must be > 0, got {}", self.ead_scale));
        }
        if self.noisy == Some(0) {
            problems.push("noisy obligor count must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(AsrfError::Validation(problems))
        }
    }
}

fn initial_book(spec: &SynthSpec) -> Vec<ObligorGrade> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = &spec.pd_band_edges;
    let bands = edges.len() - 1;
    let mut book = Vec::new();
    for (class, share, lgd) in CLASS_MIX {
        let start = book.len();
        let mut weights = Vec::with_capacity(spec.grades_per_class);
        for g in 0..spec.grades_per_class {
            let band = g % bands;
            let (lo, hi) = (edges[band].ln(), edges[band + 1].ln());
            let pd = rng.random_range(lo..hi).exp();
            weights.push(rng.random_range(0.5..1.5) * (bands - band) as f64);
            book.push(ObligorGrade {
                id: format!("{}-{:02}", class.as_str(), g + 1),
                asset_class: class,
                ead: 0.0,
                lgd: lgd * rng.random_range(0.9..1.1),
                pd,
                maturity_years: class.has_maturity().then(|| rng.random_range(1.0..5.0)),
                firm_size: (class == AssetClass::Sme).then(|| rng.random_range(5.0..50.0)),
                rho_override: None,
            });
        }
        let total: f64 = weights.iter().sum();
        for (grade, w) in book[start..].iter_mut().zip(weights) {
            grade.ead = spec.ead_scale * share * w / total;
        }
    }
    book
}

fn snapshot_at(spec: &SynthSpec, book: &[ObligorGrade], i: usize) -> PortfolioSnapshot {
    let growth = (1.0 + EAD_GROWTH).powi(i as i32);
    let grades = book
        .iter()
        .map(|g| ObligorGrade {
            ead: g.ead * growth,
            ..g.clone()
        })
        .collect();
    PortfolioSnapshot::new(spec.start.offset(i as i64), grades)
}

/// Accounts consistent with a snapshot's regulatory capital and expected loss.
pub fn accounts_for(snapshot: &PortfolioSnapshot) -> Result<CapitalAccounts> {
    let reg = regulatory_capital(snapshot)?;
    let rwa_irb = 12.5 * reg.capital;
    let rwa_credit = rwa_irb / IRB_CREDIT_SHARE;
    let rwa_total = rwa_credit / CREDIT_TOTAL_SHARE;
    let non_irb_expected_loss = NON_IRB_EL_RATIO * reg.expected_loss;
    Ok(CapitalAccounts {
        as_of: snapshot.as_of,
        rwa_irb,
        rwa_credit,
        rwa_total,
        provisions: PROVISION_COVER * (reg.expected_loss + non_irb_expected_loss),
        capital_base: CAPITAL_RATIO * rwa_total,
        non_irb_expected_loss,
    })
}

/// Window loss sampled from `n` obligors per grade at factor `y`.
fn sampled_window(snapshot: &PortfolioSnapshot, y: f64, n: u64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut total = 0.0;
    for g in &snapshot.grades {
        let p = SupervisoryParams::resolve(g)?;
        let cpd = conditional_pd(g.pd, p.rho, y)?;
        let k = Binomial::new(n, cpd)
            .map_err(|e| AsrfError::Domain(e.to_string()))?
            .sample(rng);
        total += g.ead * g.lgd * p.maturity_adjustment * k as f64 / n as f64;
    }
    Ok(total)
}

/// Generates a validated series from `spec`.
pub fn synthesize(spec: &SynthSpec) -> Result<QuarterSeries> {
    spec.validate()?;
    let book = initial_book(spec);
    let n = spec.quarters;
    let lead = usize::from(DEFAULT_INPUT_LEAD);
    let mut series = QuarterSeries::new();
    let mut snapshots = Vec::with_capacity(n);
    for i in 0..n {
        let s = snapshot_at(spec, &book, i);
        series.insert_accounts(accounts_for(&s)?);
        snapshots.push(s);
    }

    // total window losses W(i) for every quarter whose window fits
    let mut windows = Vec::new();
    for i in lead..n.saturating_sub(2) {
        let input = &snapshots[i - lead];
        let y = spec.base_y_path[i];
        let allocated = match spec.noisy {
            None => LossCurve::new(input, LossMode::Regulatory)?.eval(y),
            Some(obligors) => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(1 + i as u64);
                sampled_window(input, y, obligors, &mut rng)?
            }
        };
        let accounts = series.accounts(input.as_of).expect("inserted above");
        windows.push(allocated * accounts.rwa_credit / accounts.rwa_irb);
    }

    let mut losses = vec![0.0; n];
    if windows.is_empty() {
        for (i, s) in snapshots.iter().enumerate() {
            let curve = LossCurve::new(s, LossMode::Regulatory)?;
            losses[i] = curve.eval(spec.base_y_path[i]) / (4.0 * IRB_CREDIT_SHARE);
        }
    } else {
        // window at quarter i covers losses i-1..=i+2
        let first = lead;
        let even = windows[0] / 4.0;
        losses[..first + 3].fill(even);
        for (k, w) in windows.iter().enumerate().skip(1) {
            let i = first + k;
            losses[i + 2] = w - losses[i - 1] - losses[i] - losses[i + 1];
        }
        if let Some((i, l)) = losses.iter().enumerate().find(|(_, l)| **l < 0.0) {
            return Err(AsrfError::Parameter(format!(
                "base_y_path moves too fast: loss at {} would be {l}",
                spec.start.offset(i as i64)
            )));
        }
    }

    for s in snapshots {
        series.insert_snapshot(s);
    }
    for (i, l) in losses.into_iter().enumerate() {
        series.insert_loss(LossRecord {
            quarter: spec.start.offset(i as i64),
            credit_loss: l,
        });
    }
    Ok(series)
}
