//! CSV ingestion and emission.
//!
//! Three input files, one per form family, each with an exact header:
//!
//! * `grades.csv`: quarter,grade_id,asset_class,ead,lgd,pd,maturity_years,firm_size,rho_override
//! * `accounts.csv`: quarter,rwa_irb,rwa_credit,rwa_total,provisions,capital_base,non_irb_expected_loss
//! * `losses.csv`: quarter,credit_loss
//!
//! Quarters are ISO quarter-end dates. Optional cells are left empty.
//! Emission is canonical: rows ordered by quarter, grades in snapshot
//! order, numbers in shortest round-trip form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::adequacy::{SolvencyReading, SolvencyReport, StressReading};
use crate::engine::LossDecomposition;
use crate::error::{AsrfError, Result};
use crate::factor::FactorReading;
use crate::mc::{ConvergenceRow, LossDistribution};
use crate::params::ConstantRow;
use crate::portfolio::{
    validate_series, AssetClass, CapitalAccounts, LossRecord, ObligorGrade, PortfolioSnapshot, Quarter, QuarterSeries,
    ValidationReport,
};

pub const GRADES_HEADER: [&str; 9] = [
    "quarter",
    "grade_id",
    "asset_class",
    "ead",
    "lgd",
    "pd",
    "maturity_years",
    "firm_size",
    "rho_override",
];
pub const ACCOUNTS_HEADER: [&str; 7] = [
    "quarter",
    "rwa_irb",
    "rwa_credit",
    "rwa_total",
    "provisions",
    "capital_base",
    "non_irb_expected_loss",
];
pub const LOSSES_HEADER: [&str; 2] = ["quarter", "credit_loss"];

pub const GRADES_FILE: &str = "grades.csv";
pub const ACCOUNTS_FILE: &str = "accounts.csv";
pub const LOSSES_FILE: &str = "losses.csv";

/// Locations of the three input files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputPaths {
    pub grades: PathBuf,
    pub accounts: PathBuf,
    pub losses: PathBuf,
}

impl InputPaths {
    /// The standard file names inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            grades: dir.join(GRADES_FILE),
            accounts: dir.join(ACCOUNTS_FILE),
            losses: dir.join(LOSSES_FILE),
        }
    }
}

/// Formats a number so that parsing it gives back the same `f64`.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-6..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

struct Cells<'a> {
    file: &'a str,
    line: u64,
    header: &'a [&'a str],
    record: csv::StringRecord,
}

impl Cells<'_> {
    fn err(&self, col: usize, message: impl Into<String>) -> AsrfError {
        AsrfError::Parse {
            file: self.file.to_string(),
            line: self.line,
            column: self.header[col].to_string(),
            message: message.into(),
        }
    }

    fn raw(&self, col: usize) -> &str {
        self.record.get(col).unwrap_or("")
    }

    fn text(&self, col: usize) -> Result<String> {
        let s = self.raw(col);
        if s.is_empty() {
            return Err(self.err(col, "value is required"));
        }
        Ok(s.to_string())
    }

    fn quarter(&self, col: usize) -> Result<Quarter> {
        self.raw(col)
            .parse()
            .map_err(|e: AsrfError| self.err(col, e.to_string()))
    }

    fn num(&self, col: usize) -> Result<f64> {
        match self.opt_num(col)? {
            Some(v) => Ok(v),
            None => Err(self.err(col, "value is required")),
        }
    }

    fn opt_num(&self, col: usize) -> Result<Option<f64>> {
        let s = self.raw(col);
        if s.is_empty() {
            return Ok(None);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(self.err(col, format!("`{s}` is not a finite number"))),
        }
    }

    fn asset_class(&self, col: usize) -> Result<AssetClass> {
        self.raw(col)
            .parse()
            .map_err(|e: AsrfError| self.err(col, e.to_string()))
    }
}

fn read_records<R: Read>(
    reader: R,
    file: &str,
    header: &'static [&'static str],
    mut row: impl FnMut(Cells<'_>) -> Result<()>,
) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let found = rdr.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(AsrfError::Parse {
            file: file.to_string(),
            line: 1,
            column: String::new(),
            message: format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(AsrfError::Parse {
                file: file.to_string(),
                line,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        row(Cells {
            file,
            line,
            header,
            record,
        })?;
    }
    Ok(())
}

fn duplicate(file: &str, line: u64, q: Quarter) -> AsrfError {
    AsrfError::Parse {
        file: file.to_string(),
        line,
        column: "quarter".into(),
        message: format!("quarter {q} appears more than once"),
    }
}

/// Parses `grades.csv` into snapshots, keeping row order within each quarter.
pub fn parse_grades<R: Read>(reader: R, file: &str) -> Result<Vec<PortfolioSnapshot>> {
    let mut by_quarter: BTreeMap<Quarter, Vec<ObligorGrade>> = BTreeMap::new();
    read_records(reader, file, &GRADES_HEADER, |c| {
        let quarter = c.quarter(0)?;
        let grade = ObligorGrade {
            id: c.text(1)?,
            asset_class: c.asset_class(2)?,
            ead: c.num(3)?,
            lgd: c.num(4)?,
            pd: c.num(5)?,
            maturity_years: c.opt_num(6)?,
            firm_size: c.opt_num(7)?,
            rho_override: c.opt_num(8)?,
        };
        by_quarter.entry(quarter).or_default().push(grade);
        Ok(())
    })?;
    Ok(by_quarter
        .into_iter()
        .map(|(q, g)| PortfolioSnapshot::new(q, g))
        .collect())
}

pub fn parse_accounts<R: Read>(reader: R, file: &str) -> Result<Vec<CapitalAccounts>> {
    let mut out: BTreeMap<Quarter, CapitalAccounts> = BTreeMap::new();
    read_records(reader, file, &ACCOUNTS_HEADER, |c| {
        let as_of = c.quarter(0)?;
        let a = CapitalAccounts {
            as_of,
            rwa_irb: c.num(1)?,
            rwa_credit: c.num(2)?,
            rwa_total: c.num(3)?,
            provisions: c.num(4)?,
            capital_base: c.num(5)?,
            non_irb_expected_loss: c.num(6)?,
        };
        if out.insert(as_of, a).is_some() {
            return Err(duplicate(c.file, c.line, as_of));
        }
        Ok(())
    })?;
    Ok(out.into_values().collect())
}

pub fn parse_losses<R: Read>(reader: R, file: &str) -> Result<Vec<LossRecord>> {
    let mut out: BTreeMap<Quarter, LossRecord> = BTreeMap::new();
    read_records(reader, file, &LOSSES_HEADER, |c| {
        let quarter = c.quarter(0)?;
        if out
            .insert(
                quarter,
                LossRecord {
                    quarter,
                    credit_loss: c.num(1)?,
                },
            )
            .is_some()
        {
            return Err(duplicate(c.file, c.line, quarter));
        }
        Ok(())
    })?;
    Ok(out.into_values().collect())
}

fn open(path: &Path) -> Result<(File, String)> {
    let label = path.display().to_string();
    let file = File::open(path).map_err(|e| AsrfError::Io(std::io::Error::new(e.kind(), format!("{label}: {e}"))))?;
    Ok((file, label))
}

/// Reads the three input files without validating the result.
pub fn read_series(paths: &InputPaths) -> Result<QuarterSeries> {
    let mut series = QuarterSeries::new();
    let (f, label) = open(&paths.grades)?;
    for s in parse_grades(f, &label)? {
        series.insert_snapshot(s);
    }
    let (f, label) = open(&paths.accounts)?;
    for a in parse_accounts(f, &label)? {
        series.insert_accounts(a);
    }
    let (f, label) = open(&paths.losses)?;
    for l in parse_losses(f, &label)? {
        series.insert_loss(l);
    }
    Ok(series)
}

/// Reads and validates a series. Invariant violations are an error;
/// coverage gaps come back in the report as warnings.
pub fn ingest(paths: &InputPaths) -> Result<(QuarterSeries, ValidationReport)> {
    let series = read_series(paths)?;
    let report = validate_series(&series);
    if !report.is_valid() {
        return Err(AsrfError::Validation(
            report.violations.iter().map(ToString::to_string).collect(),
        ));
    }
    Ok((series, report))
}

pub fn write_grades<W: Write>(series: &QuarterSeries, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(GRADES_HEADER)?;
    for s in series.snapshots() {
        for g in &s.grades {
            out.write_record([
                s.as_of.to_string(),
                g.id.clone(),
                g.asset_class.to_string(),
                fmt_num(g.ead),
                fmt_num(g.lgd),
                fmt_num(g.pd),
                fmt_opt(g.maturity_years),
                fmt_opt(g.firm_size),
                fmt_opt(g.rho_override),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_accounts<W: Write>(series: &QuarterSeries, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ACCOUNTS_HEADER)?;
    for a in series.all_accounts() {
        out.write_record([
            a.as_of.to_string(),
            fmt_num(a.rwa_irb),
            fmt_num(a.rwa_credit),
            fmt_num(a.rwa_total),
            fmt_num(a.provisions),
            fmt_num(a.capital_base),
            fmt_num(a.non_irb_expected_loss),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_losses<W: Write>(series: &QuarterSeries, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(LOSSES_HEADER)?;
    for l in series.losses() {
        out.write_record([l.quarter.to_string(), fmt_num(l.credit_loss)])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the three input files in canonical form.
pub fn write_series(series: &QuarterSeries, paths: &InputPaths) -> Result<()> {
    write_grades(series, File::create(&paths.grades)?)?;
    write_accounts(series, File::create(&paths.accounts)?)?;
    write_losses(series, File::create(&paths.losses)?)?;
    Ok(())
}

/// A rectangular report, written as CSV or as an aligned text table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Right-aligned columns separated by two spaces.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (width, cell) in widths.iter_mut().zip(r) {
                *width = (*width).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &n)| format!("{c:>n$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(w, "{}", line(&self.header))?;
        for r in &self.rows {
            writeln!(w, "{}", line(r))?;
        }
        Ok(())
    }
}

/// Per-snapshot regulatory capital.
pub fn capital_table(rows: &[(Quarter, f64, LossDecomposition)]) -> Table {
    let mut t = Table::new([
        "quarter",
        "total_ead",
        "expected_loss",
        "conditional_loss",
        "capital",
        "confidence",
    ]);
    for (q, ead, d) in rows {
        t.push(vec![
            q.to_string(),
            fmt_num(*ead),
            fmt_num(d.expected_loss),
            fmt_num(d.conditional_loss),
            fmt_num(d.capital),
            fmt_num(d.confidence),
        ]);
    }
    t
}

pub fn factor_table(readings: &[FactorReading]) -> Table {
    let mut t = Table::new(["quarter", "y", "alpha", "lag", "allocation", "window_losses"]);
    for r in readings {
        t.push(vec![
            r.quarter.to_string(),
            fmt_num(r.y),
            fmt_num(r.alpha),
            r.lag.to_string(),
            r.allocation.to_string(),
            fmt_num(r.window_losses),
        ]);
    }
    t
}

pub fn solvency_table(readings: &[SolvencyReading]) -> Table {
    let mut t = Table::new([
        "quarter",
        "provisions_irb",
        "capital_irb",
        "capital_ratio",
        "dtd",
        "dtd_alpha",
        "provision_shortfall",
    ]);
    for r in readings {
        t.push(vec![
            r.quarter.to_string(),
            fmt_num(r.provisions_irb),
            fmt_num(r.capital_irb),
            fmt_num(r.capital_ratio),
            fmt_num(r.dtd),
            fmt_num(r.dtd_alpha),
            r.provision_shortfall.to_string(),
        ]);
    }
    t
}

pub fn stress_table(readings: &[StressReading]) -> Table {
    let mut t = Table::new(["quarter", "floor", "y_hat", "alpha_hat", "loss_threshold"]);
    for r in readings {
        t.push(vec![
            r.quarter.to_string(),
            fmt_num(r.floor),
            fmt_num(r.y_hat),
            fmt_num(r.alpha_hat),
            fmt_num(r.loss_threshold),
        ]);
    }
    t
}

/// Capital ratio, distance to default, stress readings per floor and the
/// recovered factor, one row per quarter. Uncomputable cells are empty.
pub fn solvency_report_table(report: &SolvencyReport) -> Table {
    let mut header = vec!["quarter".to_string(), "kappa".into(), "dtd".into(), "dtd_alpha".into()];
    for f in &report.floors {
        let f = fmt_num(*f);
        header.push(format!("y_hat_{f}"));
        header.push(format!("alpha_hat_{f}"));
    }
    header.push("y".into());
    header.push("alpha".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for row in &report.rows {
        let s = &row.solvency;
        let mut cells = vec![
            s.quarter.to_string(),
            fmt_num(s.capital_ratio),
            fmt_num(s.dtd),
            fmt_num(s.dtd_alpha),
        ];
        for r in &row.stress {
            cells.push(fmt_opt(r.map(|r| r.y_hat)));
            cells.push(fmt_opt(r.map(|r| r.alpha_hat)));
        }
        cells.push(fmt_opt(row.factor.map(|f| f.y)));
        cells.push(fmt_opt(row.factor.map(|f| f.alpha)));
        t.push(cells);
    }
    t
}

/// Summary of a simulated loss distribution at the given confidence levels.
pub fn simulation_table(dist: &LossDistribution, alphas: &[f64]) -> Result<Table> {
    let mut t = Table::new(["statistic", "alpha", "value", "std_error"]);
    t.push(vec![
        "scenarios".into(),
        String::new(),
        dist.len().to_string(),
        String::new(),
    ]);
    t.push(vec![
        "mean".into(),
        String::new(),
        fmt_num(dist.mean()),
        fmt_num(dist.std_error()),
    ]);
    for &a in alphas {
        t.push(vec![
            "var".into(),
            fmt_num(a),
            fmt_num(dist.quantile(a)?),
            fmt_num(dist.quantile_std_error(a)?),
        ]);
    }
    Ok(t)
}

/// Scenario losses in scenario order.
pub fn scenario_table(dist: &LossDistribution) -> Table {
    let mut t = Table::new(["scenario", "loss"]);
    for (i, l) in dist.by_scenario().iter().enumerate() {
        t.push(vec![i.to_string(), fmt_num(*l)]);
    }
    t
}

pub fn convergence_table(rows: &[ConvergenceRow]) -> Table {
    let mut t = Table::new([
        "obligors",
        "mc_var",
        "mc_var_se",
        "asrf_value",
        "relative_gap",
        "gap_se",
    ]);
    for r in rows {
        t.push(vec![
            r.obligors.to_string(),
            fmt_num(r.mc_var),
            fmt_num(r.mc_var_se),
            fmt_num(r.asrf_value),
            fmt_num(r.relative_gap),
            fmt_num(r.gap_se),
        ]);
    }
    t
}

pub fn params_table(rows: &[ConstantRow]) -> Table {
    let mut t = Table::new(["asset_class", "formula", "constants"]);
    for r in rows {
        t.push(vec![
            r.asset_class.to_string(),
            r.formula.to_string(),
            r.constants.clone(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::fixtures::{q, series};

    const GRADES: &str = "\
quarter,grade_id,asset_class,ead,lgd,pd,maturity_years,firm_size,rho_override
2008-03-31,c1,corporate,120.5,0.45,0.012,2.5,,
2008-03-31,s1,sme,30,0.4,0.03,1,12.5,
2008-03-31,r1,other_retail,55,0.3,0.02,,,0.1
2008-06-30,c1,corporate,118,0.45,0.013,2.5,,
";
    const ACCOUNTS: &str = "\
quarter,rwa_irb,rwa_credit,rwa_total,provisions,capital_base,non_irb_expected_loss
2008-03-31,150,200,230,3.1,25,0.4
2008-06-30,149,199,229,3.2,24.5,0.41
";
    const LOSSES: &str = "\
quarter,credit_loss
2008-03-31,0.4
2008-06-30,0.45
";

    fn write(dir: &Path, grades: &str, accounts: &str, losses: &str) -> InputPaths {
        let paths = InputPaths::in_dir(dir);
        std::fs::write(&paths.grades, grades).unwrap();
        std::fs::write(&paths.accounts, accounts).unwrap();
        std::fs::write(&paths.losses, losses).unwrap();
        paths
    }

    #[test]
    fn parses_fixture() {
        let snaps = parse_grades(GRADES.as_bytes(), "grades.csv").unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[0].grades.len(), 3);
        let sme = &snaps[0].grades[1];
        assert_eq!(sme.asset_class, AssetClass::Sme);
        assert_eq!(sme.firm_size, Some(12.5));
        assert_eq!(sme.rho_override, None);
        assert_eq!(snaps[0].grades[2].rho_override, Some(0.1));
    }

    #[test]
    fn minimal_fixture_ingests_with_gaps_only() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write(
            dir.path(),
            "quarter,grade_id,asset_class,ead,lgd,pd,maturity_years,firm_size,rho_override\n2008-03-31,a,other_retail,1,0.5,0.01,,,\n",
            "quarter,rwa_irb,rwa_credit,rwa_total,provisions,capital_base,non_irb_expected_loss\n2008-03-31,1,1,1,0,0.1,0\n",
            "quarter,credit_loss\n2008-03-31,0\n",
        );
        let (series, report) = ingest(&paths).unwrap();
        assert_eq!(series.snapshots().count(), 1);
        assert!(report.is_valid());
        assert_eq!(report.coverage_gaps.len(), 1);
    }

    #[test]
    fn duplicate_grade_id_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let dup = GRADES.replace("s1,sme", "c1,sme");
        let paths = write(dir.path(), &dup, ACCOUNTS, LOSSES);
        let err = ingest(&paths).unwrap_err().to_string();
        assert!(err.contains("c1") && err.contains("duplicate"), "{err}");
    }

    #[test]
    fn parse_errors_locate_the_cell() {
        let bad = GRADES.replace("0.3,0.02", "0.3,abc");
        let err = parse_grades(bad.as_bytes(), "grades.csv").unwrap_err();
        match err {
            AsrfError::Parse { file, line, column, .. } => {
                assert_eq!(file, "grades.csv");
                assert_eq!(line, 4);
                assert_eq!(column, "pd");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_accounts(ACCOUNTS.replace("2008-06-30", "2008-06-31").as_bytes(), "a.csv").unwrap_err();
        assert!(
            matches!(err, AsrfError::Parse { line: 3, ref column, .. } if column == "quarter"),
            "{err}"
        );
        let err = parse_losses("quarter,loss\n".as_bytes(), "l.csv").unwrap_err();
        assert!(err.to_string().contains("expected header"));
        let err = parse_losses("quarter,credit_loss\n2008-03-31,1\n2008-03-31,2\n".as_bytes(), "l.csv").unwrap_err();
        assert!(err.to_string().contains("more than once"));
        let err = parse_losses("quarter,credit_loss\n2008-03-31\n".as_bytes(), "l.csv").unwrap_err();
        assert!(matches!(err, AsrfError::Parse { line: 2, .. }));
        let err = parse_grades(GRADES.replace("c1,corporate", "c1,retail").as_bytes(), "g").unwrap_err();
        assert!(matches!(err, AsrfError::Parse { ref column, .. } if column == "asset_class"));
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write(dir.path(), GRADES, ACCOUNTS, LOSSES);
        let series = read_series(&paths).unwrap();
        let mut g = Vec::new();
        write_grades(&series, &mut g).unwrap();
        assert_eq!(String::from_utf8(g).unwrap(), GRADES);
        let mut a = Vec::new();
        write_accounts(&series, &mut a).unwrap();
        assert_eq!(String::from_utf8(a).unwrap(), ACCOUNTS);
        let mut l = Vec::new();
        write_losses(&series, &mut l).unwrap();
        assert_eq!(String::from_utf8(l).unwrap(), LOSSES);

        let out = tempfile::tempdir().unwrap();
        let out_paths = InputPaths::in_dir(out.path());
        write_series(&series, &out_paths).unwrap();
        assert_eq!(read_series(&out_paths).unwrap(), series);
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, 0.1, 1e-300, 2.5e-7, 123456.789, 1e20, 0.1 + 0.2, -3.09] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_num(1e-300), "1e-300");
        assert_eq!(fmt_num(0.001), "0.001");
    }

    #[test]
    fn text_table_aligns() {
        let mut t = Table::new(["a", "long_name"]);
        t.push(vec!["12345".into(), "x".into()]);
        let mut out = Vec::new();
        t.write_text(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "    a  long_name\n12345          x\n");
    }

    #[test]
    fn report_table_shape() {
        let s = series(8, 0);
        let report = crate::adequacy::solvency_report(&s, &Default::default()).unwrap();
        let t = solvency_report_table(&report);
        assert_eq!(
            t.header,
            [
                "quarter",
                "kappa",
                "dtd",
                "dtd_alpha",
                "y_hat_0.04",
                "alpha_hat_0.04",
                "y_hat_0.08",
                "alpha_hat_0.08",
                "y",
                "alpha"
            ]
        );
        assert_eq!(t.rows.len(), 8);
        assert_eq!(t.rows[0][0], q(2008, 1).to_string());
        assert_eq!(t.rows[0][8], "");
        assert_ne!(t.rows[2][8], "");
    }
}
