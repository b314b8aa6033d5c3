//! Supervisory asset correlation and maturity adjustment.
//!
//! These are the Basel II IRB supervisory formulas. The 1.06 scaling factor
//! on corporate RWA is not applied.

use crate::error::{AsrfError, Result};
use crate::portfolio::{AssetClass, ObligorGrade};

/// Correlation bounds and PD decay for the PD-dependent classes.
pub const CORPORATE_RHO: (f64, f64) = (0.12, 0.24);
pub const CORPORATE_DECAY: f64 = 50.0;
pub const OTHER_RETAIL_RHO: (f64, f64) = (0.03, 0.16);
pub const OTHER_RETAIL_DECAY: f64 = 35.0;
pub const RESIDENTIAL_MORTGAGE_RHO: f64 = 0.15;
pub const QUALIFIED_REVOLVING_RHO: f64 = 0.04;
/// Maximum SME reduction and the turnover band (millions) it is phased over.
pub const SME_ADJUSTMENT: f64 = 0.04;
pub const SME_TURNOVER: (f64, f64) = (5.0, 50.0);
/// Maturity slope b(pd) = (intercept - slope * ln pd)^2.
pub const MATURITY_SLOPE: (f64, f64) = (0.11852, 0.05478);
pub const MATURITY_BOUNDS: (f64, f64) = (1.0, 5.0);
pub const MATURITY_PIVOT: f64 = 2.5;

/// Asset correlation and maturity adjustment resolved for one grade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupervisoryParams {
    pub rho: f64,
    pub maturity_adjustment: f64,
}

impl SupervisoryParams {
    /// Resolves parameters for a grade; `rho_override` wins over the class formula.
    pub fn resolve(grade: &ObligorGrade) -> Result<Self> {
        let rho = match grade.rho_override {
            Some(rho) if rho > 0.0 && rho < 1.0 => rho,
            Some(rho) => {
                return Err(AsrfError::Parameter(format!(
                    "grade `{}`: rho_override {rho} is outside (0, 1)",
                    grade.id
                )))
            }
            None => asset_correlation(grade.asset_class, grade.pd, grade.firm_size)?,
        };
        let maturity_adjustment = maturity_adjustment(grade.asset_class, grade.pd, grade.maturity_years)
            .map_err(|e| AsrfError::Parameter(format!("grade `{}`: {e}", grade.id)))?;
        Ok(Self {
            rho,
            maturity_adjustment,
        })
    }
}

fn check_pd(pd: f64) -> Result<()> {
    if pd > 0.0 && pd < 1.0 {
        Ok(())
    } else {
        Err(AsrfError::Domain(format!("pd must lie in (0, 1), got {pd}")))
    }
}

/// Exponential PD weight (1 - e^(-k pd)) / (1 - e^(-k)).
fn pd_weight(pd: f64, decay: f64) -> f64 {
    (-(decay * pd)).exp_m1() / (-decay).exp_m1()
}

fn interpolated(pd: f64, (low, high): (f64, f64), decay: f64) -> f64 {
    let w = pd_weight(pd, decay);
    low * w + high * (1.0 - w)
}

/// Supervisory asset correlation for a class at a given PD.
pub fn asset_correlation(asset_class: AssetClass, pd: f64, firm_size: Option<f64>) -> Result<f64> {
    check_pd(pd)?;
    if asset_class != AssetClass::Sme && firm_size.is_some() {
        return Err(AsrfError::Parameter(format!(
            "firm size is only meaningful for sme, not {asset_class}"
        )));
    }
    let rho = match asset_class {
        AssetClass::ResidentialMortgage => RESIDENTIAL_MORTGAGE_RHO,
        AssetClass::QualifiedRevolving => QUALIFIED_REVOLVING_RHO,
        AssetClass::Corporate | AssetClass::Bank | AssetClass::Sovereign => {
            interpolated(pd, CORPORATE_RHO, CORPORATE_DECAY)
        }
        AssetClass::OtherRetail => interpolated(pd, OTHER_RETAIL_RHO, OTHER_RETAIL_DECAY),
        AssetClass::Sme => {
            let size = firm_size.ok_or_else(|| AsrfError::Parameter("sme correlation needs firm size".into()))?;
            if !(size.is_finite() && size > 0.0) {
                return Err(AsrfError::Parameter(format!("firm size must be positive, got {size}")));
            }
            let (lo, hi) = SME_TURNOVER;
            let s = size.clamp(lo, hi);
            interpolated(pd, CORPORATE_RHO, CORPORATE_DECAY) - SME_ADJUSTMENT * (1.0 - (s - lo) / (hi - lo))
        }
    };
    Ok(rho)
}

/// Maturity slope b(pd).
pub fn maturity_slope(pd: f64) -> f64 {
    let (intercept, slope) = MATURITY_SLOPE;
    (intercept - slope * pd.ln()).powi(2)
}

/// Maturity adjustment (1 + (M - 2.5) b) / (1 - 1.5 b) for business and
/// government classes, with M clamped to [1, 5]. Retail classes return 1.
pub fn maturity_adjustment(asset_class: AssetClass, pd: f64, maturity_years: Option<f64>) -> Result<f64> {
    check_pd(pd)?;
    if !asset_class.has_maturity() {
        return match maturity_years {
            None => Ok(1.0),
            Some(_) => Err(AsrfError::Parameter(format!(
                "{asset_class} exposures carry no maturity adjustment"
            ))),
        };
    }
    let m = maturity_years.ok_or_else(|| AsrfError::Parameter(format!("{asset_class} exposure needs a maturity")))?;
    if !m.is_finite() {
        return Err(AsrfError::Parameter(format!("maturity must be finite, got {m}")));
    }
    let m = m.clamp(MATURITY_BOUNDS.0, MATURITY_BOUNDS.1);
    let b = maturity_slope(pd);
    // Below pd ~ 2.9e-6 the slope exceeds 2/3 and the adjustment is undefined.
    if 1.0 - 1.5 * b <= 0.0 {
        return Err(AsrfError::Parameter(format!(
            "maturity adjustment undefined at pd {pd}"
        )));
    }
    Ok((1.0 + (m - MATURITY_PIVOT) * b) / (1.0 - 1.5 * b))
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub asset_class: AssetClass,
    pub formula: &'static str,
    pub constants: String,
}

/// All supervisory constants, one row per class and formula.
pub fn constants_table() -> Vec<ConstantRow> {
    let corp = format!(
        "rho_low={};rho_high={};decay={}",
        CORPORATE_RHO.0, CORPORATE_RHO.1, CORPORATE_DECAY
    );
    let maturity = format!(
        "b_intercept={};b_slope={};m_min={};m_max={};m_pivot={}",
        MATURITY_SLOPE.0, MATURITY_SLOPE.1, MATURITY_BOUNDS.0, MATURITY_BOUNDS.1, MATURITY_PIVOT
    );
    let mut rows = Vec::new();
    for class in AssetClass::ALL {
        let (formula, constants) = match class {
            AssetClass::Corporate | AssetClass::Bank | AssetClass::Sovereign => ("rho_pd_exponential", corp.clone()),
            AssetClass::Sme => (
                "rho_pd_exponential_sme",
                format!(
                    "{corp};size_adjustment={};size_min={};size_max={}",
                    SME_ADJUSTMENT, SME_TURNOVER.0, SME_TURNOVER.1
                ),
            ),
            AssetClass::OtherRetail => (
                "rho_pd_exponential",
                format!(
                    "rho_low={};rho_high={};decay={}",
                    OTHER_RETAIL_RHO.0, OTHER_RETAIL_RHO.1, OTHER_RETAIL_DECAY
                ),
            ),
            AssetClass::ResidentialMortgage => ("rho_constant", format!("rho={RESIDENTIAL_MORTGAGE_RHO}")),
            AssetClass::QualifiedRevolving => ("rho_constant", format!("rho={QUALIFIED_REVOLVING_RHO}")),
        };
        rows.push(ConstantRow {
            asset_class: class,
            formula,
            constants,
        });
        let (formula, constants) = if class.has_maturity() {
            ("maturity_adjustment", maturity.clone())
        } else {
            ("maturity_none", "nu=1".to_string())
        };
        rows.push(ConstantRow {
            asset_class: class,
            formula,
            constants,
        });
    }
    rows
}
