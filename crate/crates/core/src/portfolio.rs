//! Obligor grades, quarterly snapshots, capital accounts and the aligned
//! quarterly series built from them. Currency amounts are millions.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};

use crate::error::{AsrfError, Result};

/// A calendar quarter, displayed and parsed as its ISO quarter-end date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quarter {
    year: i32,
    /// 1..=4
    q: u8,
}

impl Quarter {
    pub fn new(year: i32, q: u8) -> Result<Self> {
        if (1..=4).contains(&q) {
            Ok(Self { year, q })
        } else {
            Err(AsrfError::Domain(format!("quarter number must be 1..=4, got {q}")))
        }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn number(self) -> u8 {
        self.q
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * 4 + i64::from(self.q - 1)
    }

    fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(4) as i32;
        let q = ordinal.rem_euclid(4) as u8 + 1;
        Self { year, q }
    }

    /// Moves `k` whole quarters (negative moves back).
    pub fn offset(self, k: i64) -> Self {
        Self::from_ordinal(self.ordinal() + k)
    }

    pub fn next(self) -> Self {
        self.offset(1)
    }

    /// Number of quarters from `self` to `other`.
    pub fn quarters_until(self, other: Quarter) -> i64 {
        other.ordinal() - self.ordinal()
    }

    pub fn end_date(self) -> NaiveDate {
        let (month, day) = match self.q {
            1 => (3, 31),
            2 => (6, 30),
            3 => (9, 30),
            _ => (12, 31),
        };
        NaiveDate::from_ymd_opt(self.year, month, day).expect("quarter end is a valid date")
    }

    pub fn from_date(date: NaiveDate) -> Result<Self> {
        let q = Self::new(date.year(), ((date.month() - 1) / 3 + 1) as u8)?;
        if q.end_date() == date {
            Ok(q)
        } else {
            Err(AsrfError::Domain(format!("{date} is not a calendar quarter end")))
        }
    }

    /// Inclusive range of quarters.
    pub fn range(first: Quarter, last: Quarter) -> impl Iterator<Item = Quarter> {
        (first.ordinal()..=last.ordinal()).map(Quarter::from_ordinal)
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.end_date().format("%Y-%m-%d"))
    }
}

impl FromStr for Quarter {
    type Err = AsrfError;

    fn from_str(s: &str) -> Result<Self> {
        let date = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map_err(|e| AsrfError::Domain(format!("`{s}` is not an ISO date: {e}")))?;
        Self::from_date(date)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssetClass {
    Corporate,
    Sme,
    Bank,
    Sovereign,
    ResidentialMortgage,
    QualifiedRevolving,
    OtherRetail,
}

impl AssetClass {
    pub const ALL: [AssetClass; 7] = [
        AssetClass::Corporate,
        AssetClass::Sme,
        AssetClass::Bank,
        AssetClass::Sovereign,
        AssetClass::ResidentialMortgage,
        AssetClass::QualifiedRevolving,
        AssetClass::OtherRetail,
    ];

    /// Business and government classes carry a maturity adjustment.
    pub fn has_maturity(self) -> bool {
        matches!(self, Self::Corporate | Self::Sme | Self::Bank | Self::Sovereign)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Corporate => "corporate",
            Self::Sme => "sme",
            Self::Bank => "bank",
            Self::Sovereign => "sovereign",
            Self::ResidentialMortgage => "residential_mortgage",
            Self::QualifiedRevolving => "qualified_revolving",
            Self::OtherRetail => "other_retail",
        }
    }
}

impl fmt::Display for AssetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssetClass {
    type Err = AsrfError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| AsrfError::Domain(format!("unknown asset class `{s}`")))
    }
}

/// One pooled credit of the commingled portfolio.
#[derive(Debug, Clone, PartialEq)]
pub struct ObligorGrade {
    pub id: String,
    pub asset_class: AssetClass,
    /// Exposure at default.
    pub ead: f64,
    /// Loss given default.
    pub lgd: f64,
    /// One-year unconditional probability of default.
    pub pd: f64,
    /// Effective maturity in years; business and government classes only.
    pub maturity_years: Option<f64>,
    /// Annual turnover in millions; SME only.
    pub firm_size: Option<f64>,
    /// Asset correlation supplied directly instead of derived from the class.
    pub rho_override: Option<f64>,
}

impl ObligorGrade {
    /// Invariant violations for this grade, as messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.ead.is_finite() && self.ead >= 0.0) {
            out.push(format!("ead must be finite and >= 0, got {}", self.ead));
        }
        if !(0.0..=1.0).contains(&self.lgd) {
            out.push(format!("lgd must lie in [0, 1], got {}", self.lgd));
        }
        if !(self.pd > 0.0 && self.pd < 1.0) {
            out.push(format!("pd must lie in (0, 1), got {}", self.pd));
        }
        if let Some(rho) = self.rho_override {
            if !(rho > 0.0 && rho < 1.0) {
                out.push(format!("rho_override must lie in (0, 1), got {rho}"));
            }
        }
        match (self.asset_class.has_maturity(), self.maturity_years) {
            (true, None) => out.push(format!("{} grade needs maturity_years", self.asset_class)),
            (true, Some(m)) if !(m.is_finite() && m > 0.0) => out.push(format!("maturity_years must be > 0, got {m}")),
            (false, Some(_)) => out.push(format!("{} grade must not carry maturity_years", self.asset_class)),
            _ => {}
        }
        match (self.asset_class == AssetClass::Sme, self.firm_size) {
            (true, None) => out.push("sme grade needs firm_size".to_string()),
            (true, Some(s)) if !(s.is_finite() && s > 0.0) => out.push(format!("firm_size must be > 0, got {s}")),
            (false, Some(_)) => out.push(format!("{} grade must not carry firm_size", self.asset_class)),
            _ => {}
        }
        out
    }
}

/// All obligor grades reported as at one quarter end.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSnapshot {
    pub as_of: Quarter,
    pub grades: Vec<ObligorGrade>,
}

impl PortfolioSnapshot {
    pub fn new(as_of: Quarter, grades: Vec<ObligorGrade>) -> Self {
        Self { as_of, grades }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.grades.is_empty() {
            out.push(Violation::at(self.as_of, "snapshot has no grades"));
        }
        let mut seen = HashSet::new();
        for g in &self.grades {
            if !seen.insert(g.id.as_str()) {
                out.push(Violation::grade(self.as_of, &g.id, "duplicate grade id"));
            }
            for msg in g.violations() {
                out.push(Violation::grade(self.as_of, &g.id, msg));
            }
        }
        out
    }

    /// Fails with the full list of violations if the snapshot is invalid.
    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(AsrfError::Validation(v.iter().map(ToString::to_string).collect()))
        }
    }

    pub fn total_ead(&self) -> f64 {
        self.grades.iter().map(|g| g.ead).sum()
    }
}

/// Risk-weighted assets, provisions and capital reported as at a quarter end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapitalAccounts {
    pub as_of: Quarter,
    /// RWA for IRB credit exposures.
    pub rwa_irb: f64,
    /// RWA for credit risk.
    pub rwa_credit: f64,
    /// Total RWA.
    pub rwa_total: f64,
    /// Provisions for expected credit losses.
    pub provisions: f64,
    pub capital_base: f64,
    /// Projected one-year expected loss on non-IRB credit exposures.
    pub non_irb_expected_loss: f64,
}

impl CapitalAccounts {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let finite = [
            self.rwa_irb,
            self.rwa_credit,
            self.rwa_total,
            self.provisions,
            self.capital_base,
            self.non_irb_expected_loss,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            out.push(Violation::at(self.as_of, "accounts contain a non-finite amount"));
            return out;
        }
        if !(0.0 < self.rwa_irb && self.rwa_irb <= self.rwa_credit && self.rwa_credit <= self.rwa_total) {
            out.push(Violation::at(
                self.as_of,
                format!(
                    "need 0 < rwa_irb <= rwa_credit <= rwa_total, got {} / {} / {}",
                    self.rwa_irb, self.rwa_credit, self.rwa_total
                ),
            ));
        }
        if self.provisions < 0.0 {
            out.push(Violation::at(self.as_of, "provisions must be >= 0"));
        }
        if self.capital_base <= 0.0 {
            out.push(Violation::at(self.as_of, "capital_base must be > 0"));
        }
        if self.non_irb_expected_loss < 0.0 {
            out.push(Violation::at(self.as_of, "non_irb_expected_loss must be >= 0"));
        }
        out
    }
}

/// Credit losses (charges for bad and doubtful debts) incurred in a quarter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub quarter: Quarter,
    pub credit_loss: f64,
}

/// Snapshots, accounts and losses keyed by quarter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuarterSeries {
    snapshots: BTreeMap<Quarter, PortfolioSnapshot>,
    accounts: BTreeMap<Quarter, CapitalAccounts>,
    losses: BTreeMap<Quarter, LossRecord>,
}

impl QuarterSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the snapshot for its quarter.
    pub fn insert_snapshot(&mut self, snapshot: PortfolioSnapshot) {
        self.snapshots.insert(snapshot.as_of, snapshot);
    }

    pub fn insert_accounts(&mut self, accounts: CapitalAccounts) {
        self.accounts.insert(accounts.as_of, accounts);
    }

    pub fn insert_loss(&mut self, loss: LossRecord) {
        self.losses.insert(loss.quarter, loss);
    }

    pub fn snapshot(&self, q: Quarter) -> Option<&PortfolioSnapshot> {
        self.snapshots.get(&q)
    }

    pub fn accounts(&self, q: Quarter) -> Option<&CapitalAccounts> {
        self.accounts.get(&q)
    }

    pub fn loss(&self, q: Quarter) -> Option<f64> {
        self.losses.get(&q).map(|l| l.credit_loss)
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &PortfolioSnapshot> {
        self.snapshots.values()
    }

    pub fn all_accounts(&self) -> impl Iterator<Item = &CapitalAccounts> {
        self.accounts.values()
    }

    pub fn losses(&self) -> impl Iterator<Item = &LossRecord> {
        self.losses.values()
    }

    pub fn snapshot_quarters(&self) -> impl Iterator<Item = Quarter> + '_ {
        self.snapshots.keys().copied()
    }

    /// Why a factor reading at `t` cannot be computed, if it cannot.
    ///
    /// A reading at `t` uses the snapshot and accounts at `t - input_lead`
    /// and losses over `s-1..=s+2` with `s = t + lag`.
    pub fn factor_coverage_gap(&self, t: Quarter, lag: u8, input_lead: u8) -> Option<String> {
        let input = t.offset(-i64::from(input_lead));
        let mut reasons = Vec::new();
        if !self.snapshots.contains_key(&input) {
            reasons.push(format!("no snapshot at {input}"));
        }
        if !self.accounts.contains_key(&input) {
            reasons.push(format!("no accounts at {input}"));
        }
        let s = t.offset(i64::from(lag));
        let missing: Vec<String> = (-1..=2)
            .map(|k| s.offset(k))
            .filter(|q| !self.losses.contains_key(q))
            .map(|q| q.to_string())
            .collect();
        if !missing.is_empty() {
            reasons.push(format!("no losses at {}", missing.join(", ")));
        }
        if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        }
    }

    /// Quarters at which a factor reading is attempted: every snapshot
    /// quarter shifted forward by the input lead.
    pub fn factor_candidates(&self, input_lead: u8) -> Vec<Quarter> {
        self.snapshots.keys().map(|q| q.offset(i64::from(input_lead))).collect()
    }
}

/// A single invariant violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub quarter: Option<Quarter>,
    pub grade_id: Option<String>,
    pub message: String,
}

impl Violation {
    fn at(quarter: Quarter, message: impl Into<String>) -> Self {
        Self {
            quarter: Some(quarter),
            grade_id: None,
            message: message.into(),
        }
    }

    fn grade(quarter: Quarter, id: &str, message: impl Into<String>) -> Self {
        Self {
            quarter: Some(quarter),
            grade_id: Some(id.to_string()),
            message: message.into(),
        }
    }

    fn series(message: impl Into<String>) -> Self {
        Self {
            quarter: None,
            grade_id: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.quarter {
            write!(f, "{q}: ")?;
        }
        if let Some(id) = &self.grade_id {
            write!(f, "grade `{id}`: ")?;
        }
        f.write_str(&self.message)
    }
}

/// A quarter whose factor reading cannot be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGap {
    pub quarter: Quarter,
    pub reason: String,
}

impl fmt::Display for CoverageGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: uncomputable ({})", self.quarter, self.reason)
    }
}

/// Hard invariant violations and soft coverage gaps found in a series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub coverage_gaps: Vec<CoverageGap>,
}

impl ValidationReport {
    /// True when there are no hard violations. Coverage gaps are warnings.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty() && self.coverage_gaps.is_empty()
    }
}

fn contiguity_violation<'a>(label: &str, mut keys: impl Iterator<Item = &'a Quarter>) -> Option<Violation> {
    let mut prev = *keys.next()?;
    for &q in keys {
        if q != prev.next() {
            return Some(Violation::series(format!(
                "{label} quarters are not contiguous: {prev} is followed by {q}"
            )));
        }
        prev = q;
    }
    None
}

/// Checks every type invariant and the default factor-reading coverage rule
/// (snapshot at `t-2`, losses at `t-1..=t+2`).
pub fn validate_series(series: &QuarterSeries) -> ValidationReport {
    let mut report = ValidationReport::default();

    if series.snapshots.is_empty() {
        report.violations.push(Violation::series("series has no snapshots"));
    }
    for snapshot in series.snapshots.values() {
        report.violations.extend(snapshot.violations());
        if !series.accounts.contains_key(&snapshot.as_of) {
            report
                .violations
                .push(Violation::at(snapshot.as_of, "snapshot has no matching accounts"));
        }
    }
    for accounts in series.accounts.values() {
        report.violations.extend(accounts.violations());
    }
    for loss in series.losses.values() {
        if !(loss.credit_loss.is_finite() && loss.credit_loss >= 0.0) {
            report.violations.push(Violation::at(
                loss.quarter,
                format!("credit_loss must be >= 0, got {}", loss.credit_loss),
            ));
        }
    }
    report
        .violations
        .extend(contiguity_violation("snapshot", series.snapshots.keys()));
    report
        .violations
        .extend(contiguity_violation("accounts", series.accounts.keys()));
    report
        .violations
        .extend(contiguity_violation("loss", series.losses.keys()));

    for t in series.factor_candidates(2) {
        if let Some(reason) = series.factor_coverage_gap(t, 0, 2) {
            report.coverage_gaps.push(CoverageGap { quarter: t, reason });
        }
    }
    report
}
