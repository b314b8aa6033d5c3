//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.
//!
//! Set `ASRF_UPDATE_GOLDEN=1` to rewrite the pipeline golden file.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use asrf_core::adequacy::{self, ReportOptions};
use asrf_core::engine::{LossCurve, LossMode, SolverOptions};
use asrf_core::factor::{self, FactorOptions, LossAllocation};
use asrf_core::io;
use asrf_core::math::{norm_quantile, std_normal_cdf, std_normal_quantile};
use asrf_core::mc::{self, Sampler, SimConfig};
use asrf_core::portfolio::{
    AssetClass, CapitalAccounts, LossRecord, ObligorGrade, PortfolioSnapshot, Quarter, QuarterSeries,
};
use asrf_core::synth::{self, SynthSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn round(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn quarter(y: i32, n: u8) -> Quarter {
    Quarter::new(y, n).unwrap()
}

/// A random book mixing every asset class.
fn random_book(rng: &mut ChaCha8Rng, grades: usize) -> PortfolioSnapshot {
    let grades = (0..grades)
        .map(|i| {
            let class = AssetClass::ALL[rng.random_range(0..AssetClass::ALL.len())];
            ObligorGrade {
                id: format!("g{i}"),
                asset_class: class,
                ead: rng.random_range(100.0..5_000.0),
                lgd: rng.random_range(0.1..0.9),
                pd: rng.random_range(-7.0f64..-1.5).exp(),
                maturity_years: class.has_maturity().then(|| rng.random_range(1.0..5.0)),
                firm_size: (class == AssetClass::Sme).then(|| rng.random_range(5.0..50.0)),
                rho_override: None,
            }
        })
        .collect();
    PortfolioSnapshot::new(quarter(2008, 1), grades)
}

fn criterion_1() -> Outcome {
    let q999 = std_normal_quantile(0.999).map_err(|e| e.to_string())?;
    let cdf = |x| std_normal_cdf(x).unwrap();
    let pairs = [
        ("quantile(0.999)", round(q999, 3), 3.090),
        ("1-cdf(-0.81)", round(1.0 - cdf(-0.81), 3), 0.791),
        ("cdf(3.588)", round(cdf(3.588), 5), 0.99983),
        ("cdf(3.504)", round(cdf(3.504), 5), 0.99977),
        ("1-cdf(-3.044)", round(1.0 - cdf(-3.044), 5), 0.99883),
    ];
    for (name, got, want) in pairs {
        check(got == want, format!("{name} = {got}, expected {want}"))?;
    }
    let a = 1.0 - cdf(-2.17);
    check((a - 0.9849).abs() <= 3e-4, format!("1-cdf(-2.17) = {a}"))?;
    Ok(format!("quantile(0.999) = {q999:.6}, 1-cdf(-2.17) = {a:.5}"))
}

fn criterion_2() -> Outcome {
    let grade = ObligorGrade {
        id: "homogeneous".into(),
        asset_class: AssetClass::OtherRetail,
        ead: 1.0,
        lgd: 1.0,
        pd: 0.01,
        maturity_years: None,
        firm_size: None,
        rho_override: Some(0.2),
    };
    let config = SimConfig {
        scenarios: 2_000_000,
        seed: 20_100_630,
        sampler: Sampler::Binomial,
        ..SimConfig::default()
    };
    let rows = mc::convergence_study(&grade, &[10, 100, 1_000, 10_000], 0.999, &config).map_err(|e| e.to_string())?;
    let table = rows
        .iter()
        .map(|r| format!("n={} gap={:.4}±{:.4}", r.obligors, r.relative_gap, r.gap_se))
        .collect::<Vec<_>>()
        .join(", ");
    let r100 = rows[1];
    let r10k = rows[3];
    check(r10k.relative_gap <= 0.05, format!("gap at n=10000 exceeds 5%: {table}"))?;
    let margin = 3.0 * (r100.gap_se.powi(2) + r10k.gap_se.powi(2)).sqrt();
    check(
        r100.relative_gap - r10k.relative_gap > margin,
        format!("gap(10000) not below gap(100) by 3 SE ({margin:.4}): {table}"),
    )?;
    Ok(table)
}

/// Snapshot and accounts at 2008Q1 with window losses for a reading at 2008Q3.
fn single_reading_series(snapshot: &PortfolioSnapshot, window: f64, capital_base: Option<f64>) -> QuarterSeries {
    let mut s = QuarterSeries::new();
    let t0 = snapshot.as_of;
    let mut accounts: CapitalAccounts = synth::accounts_for(snapshot).unwrap();
    if let Some(base) = capital_base {
        accounts.capital_base = base;
        accounts.provisions = 0.0;
    }
    s.insert_snapshot(snapshot.clone());
    s.insert_accounts(accounts);
    let per_quarter = window * accounts.rwa_credit / accounts.rwa_irb / 4.0;
    for k in 1..=4 {
        s.insert_loss(LossRecord {
            quarter: t0.offset(k),
            credit_loss: per_quarter,
        });
    }
    s
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut books = vec![random_book(&mut rng, 12), random_book(&mut rng, 40)];
    for (seed, grades) in [(1, 2), (2, 5)] {
        let spec = SynthSpec {
            grades_per_class: grades,
            ..SynthSpec::new(1, seed)
        };
        books.push(synth::synthesize(&spec).unwrap().snapshots().next().unwrap().clone());
    }
    let grid: Vec<f64> = (0..=40).map(|i| -4.0 + 0.2 * f64::from(i)).collect();
    let solver = SolverOptions::default();
    let (mut worst_factor, mut worst_dtd, mut worst_stress) = (0f64, 0f64, 0f64);
    for book in &books {
        let curve = LossCurve::new(book, LossMode::Regulatory).unwrap();
        let t0 = book.as_of;
        for &y in &grid {
            let target = curve.eval(y);
            let s = single_reading_series(book, target, None);
            let r = factor::recover_factor(&s, t0.offset(2), &FactorOptions::default()).map_err(|e| e.to_string())?;
            worst_factor = worst_factor.max((r.y - y).abs());

            let accounts = synth::accounts_for(book).unwrap();
            let base = target * accounts.rwa_total / accounts.rwa_irb;
            let s = single_reading_series(book, target, Some(base));
            let d = adequacy::distance_to_default(&s, t0, solver).map_err(|e| e.to_string())?;
            worst_dtd = worst_dtd.max((d.dtd + y).abs());
            let st = adequacy::reverse_stress(&s, t0, 0.0, solver).map_err(|e| e.to_string())?;
            worst_stress = worst_stress.max((st.y_hat + d.dtd).abs());
        }
    }
    check(
        worst_factor <= 1e-9,
        format!("factor round trip error {worst_factor:e}"),
    )?;
    check(
        worst_dtd <= 1e-9,
        format!("distance-to-default round trip error {worst_dtd:e}"),
    )?;
    check(
        worst_stress <= solver.tol,
        format!("floor-0 stress differs from -dtd by {worst_stress:e}"),
    )?;
    Ok(format!(
        "{} books x {} points: max errors factor {worst_factor:.1e}, dtd {worst_dtd:.1e}, stress {worst_stress:.1e}",
        books.len(),
        grid.len()
    ))
}

fn criterion_4() -> Outcome {
    const MARGIN: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid: Vec<f64> = (0..100).map(|i| -4.0 + 8.0 * f64::from(i) / 99.0).collect();
    let alphas: Vec<f64> = (0..50).map(|i| 0.5 + 0.4999 * f64::from(i) / 49.0).collect();
    for b in 0..10 {
        let book = random_book(&mut rng, 5 + 3 * b);
        for mode in [LossMode::Raw, LossMode::Regulatory] {
            let curve = LossCurve::new(&book, mode).unwrap();
            let values: Vec<f64> = grid.iter().map(|&y| curve.eval(y)).collect();
            if let Some(w) = values.windows(2).find(|w| w[0] - w[1] <= MARGIN) {
                return Err(format!(
                    "book {b}: conditional loss not strictly decreasing: {} then {}",
                    w[0], w[1]
                ));
            }
            let capital: Vec<f64> = alphas.iter().map(|&a| curve.capital(a).unwrap().capital).collect();
            if let Some(w) = capital.windows(2).find(|w| w[1] - w[0] <= MARGIN) {
                return Err(format!(
                    "book {b}: capital not strictly increasing: {} then {}",
                    w[0], w[1]
                ));
            }
        }
    }

    let series = synth::synthesize(&SynthSpec::new(16, 4)).unwrap();
    let solver = SolverOptions::default();
    let mut stress_pairs = 0;
    for t in series.snapshot_quarters() {
        let ys: Vec<f64> = (0..=30)
            .filter_map(|i| adequacy::reverse_stress(&series, t, 0.005 * f64::from(i), solver).ok())
            .map(|r| r.y_hat)
            .collect();
        if let Some(w) = ys.windows(2).find(|w| w[1] - w[0] <= MARGIN) {
            return Err(format!(
                "{t}: stress factor not increasing in floor: {} then {}",
                w[0], w[1]
            ));
        }
        stress_pairs += ys.len().saturating_sub(1);
    }

    let prop = factor::factor_series(&series, &FactorOptions::default()).unwrap();
    let all = factor::factor_series(
        &series,
        &FactorOptions::default().with_allocation(LossAllocation::AllToIrb),
    )
    .unwrap();
    check(
        !prop.readings.is_empty() && prop.readings.len() == all.readings.len(),
        "factor series lengths differ",
    )?;
    for (a, p) in all.readings.iter().zip(&prop.readings) {
        check(
            a.y < p.y - MARGIN,
            format!("{}: all-to-IRB {} not below proportional {}", a.quarter, a.y, p.y),
        )?;
    }
    Ok(format!(
        "10 books x 100 points, 50 confidence levels, {stress_pairs} floor pairs, {} allocation pairs",
        prop.readings.len()
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut details = Vec::new();
    for i in 0..5u64 {
        let book = random_book(&mut rng, 3 + i as usize);
        let y = rng.random_range(-3.0..1.0);
        let config = SimConfig {
            scenarios: 20_000,
            seed: 500 + i,
            obligors_per_grade: 100,
            ..SimConfig::default()
        };

        let cond = mc::simulate(
            &book,
            &SimConfig {
                conditional_y: Some(y),
                ..config
            },
        )
        .map_err(|e| e.to_string())?;
        let want = asrf_core::conditional_expected_loss(&book, y, LossMode::Raw).unwrap();
        let z = (cond.mean() - want) / cond.std_error();
        check(
            z.abs() < 3.0,
            format!("pair {i}: conditional mean off by {z:.2} SE at y = {y:.3}"),
        )?;

        let uncond = mc::simulate(&book, &config).map_err(|e| e.to_string())?;
        let el = asrf_core::expected_loss(&book, LossMode::Raw).unwrap();
        let zu = (uncond.mean() - el) / uncond.std_error();
        check(
            zu.abs() < 3.0,
            format!("book {i}: unconditional mean off by {zu:.2} SE"),
        )?;
        details.push(format!("z={z:+.2}/{zu:+.2}"));
    }
    Ok(format!("conditional/unconditional z-scores {}", details.join(" ")))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0f64;
    for i in 0..100_000 {
        let p = rng.random_range(-9.0f64..-0.7).exp();
        let rho = rng.random_range(0.001..0.6);
        let alpha = rng.random_range(0.001..0.99999);
        let grade = ObligorGrade {
            id: format!("g{i}"),
            asset_class: AssetClass::OtherRetail,
            ead: 1.0,
            lgd: 1.0,
            pd: p,
            maturity_years: None,
            firm_size: None,
            rho_override: Some(rho),
        };
        let curve = LossCurve::new(&PortfolioSnapshot::new(quarter(2008, 1), vec![grade]), LossMode::Raw).unwrap();
        let symmetric = curve.eval_tail(alpha);
        let direct = curve.eval(norm_quantile(1.0 - alpha));
        let rel = (symmetric - direct).abs() / direct.abs();
        worst = worst.max(rel);
        check(
            rel <= 1e-12,
            format!("p={p}, rho={rho}, alpha={alpha}: relative difference {rel:e}"),
        )?;
    }
    Ok(format!("100000 triples, max relative difference {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let spec = SynthSpec::new(8, 2024);
    let series = synth::synthesize(&spec).unwrap();
    let t = spec.start;
    let snapshot = series.snapshot(t).unwrap();
    let provisions = adequacy::allocate_provisions(&series, t).map_err(|e| e.to_string())?;
    let capital = asrf_core::regulatory_capital(snapshot).unwrap().capital;
    let share = (provisions + capital) / snapshot.total_ead();
    check(
        (0.01..=0.05).contains(&share),
        format!("provisions + capital = {:.2}% of EAD", 100.0 * share),
    )?;
    Ok(format!(
        "provisions {:.2}% + capital {:.2}% = {:.2}% of EAD",
        100.0 * provisions / snapshot.total_ead(),
        100.0 * capital / snapshot.total_ead(),
        100.0 * share
    ))
}

fn pipeline_output() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let paths = io::InputPaths::in_dir(dir.path());
    let series = synth::synthesize(&SynthSpec::new(12, 8)).map_err(|e| e.to_string())?;
    io::write_series(&series, &paths).map_err(|e| e.to_string())?;
    let (series, _) = io::ingest(&paths).map_err(|e| e.to_string())?;
    let solver = SolverOptions::default();

    let mut out = Vec::new();
    let mut section = |name: &str, table: io::Table| -> Result<(), String> {
        out.extend_from_slice(format!("# {name}\n").as_bytes());
        table.write_csv(&mut out).map_err(|e| e.to_string())
    };
    let fs = factor::factor_series(&series, &FactorOptions::default()).map_err(|e| e.to_string())?;
    section("invert-factor", io::factor_table(&fs.readings))?;
    let quarters: Vec<Quarter> = series.snapshot_quarters().collect();
    let dtd = quarters
        .iter()
        .map(|&t| adequacy::distance_to_default(&series, t, solver))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    section("dtd", io::solvency_table(&dtd))?;
    let mut stress = Vec::new();
    for &t in &quarters {
        for floor in adequacy::DEFAULT_FLOORS {
            stress.push(adequacy::reverse_stress(&series, t, floor, solver).map_err(|e| e.to_string())?);
        }
    }
    section("reverse-stress", io::stress_table(&stress))?;
    let report = adequacy::solvency_report(&series, &ReportOptions::default()).map_err(|e| e.to_string())?;
    section("report", io::solvency_report_table(&report))?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let first = pipeline_output()?;
    let second = pipeline_output()?;
    check(first == second, "pipeline output differs between runs")?;
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/synth_pipeline.csv");
    if std::env::var_os("ASRF_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&golden, &first).map_err(|e| e.to_string())?;
    }
    let expected = std::fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    check(
        first == expected,
        format!("pipeline output differs from {}", golden.display()),
    )?;
    Ok(format!(
        "synth -> invert-factor -> dtd -> reverse-stress byte-stable, {} bytes match golden; \
         confidential-data results are out of scope",
        first.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("quantile anchors", criterion_1),
        ("large-portfolio convergence", criterion_2),
        ("inversion round trips", criterion_3),
        ("monotonicity", criterion_4),
        ("Monte Carlo agreement", criterion_5),
        ("symmetric tail identity", criterion_6),
        ("sanity band", criterion_7),
        ("pipeline golden file", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
