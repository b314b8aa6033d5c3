use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use asrf_core::adequacy::{self, ReportOptions};
use asrf_core::engine::{self, LossMode, SolverOptions};
use asrf_core::factor::{self, FactorOptions, LossAllocation};
use asrf_core::io::{self as csvio, InputPaths, Table};
use asrf_core::mc::{self, Sampler, SimConfig};
use asrf_core::params;
use asrf_core::portfolio::{AssetClass, ObligorGrade, Quarter, QuarterSeries, ValidationReport};
use asrf_core::synth::{self, SynthSpec};
use asrf_core::{AsrfError, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Credit capital analytics under the asymptotic single risk factor model
#[derive(Parser)]
#[command(name = "asrf", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run every loop on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Regulatory capital per snapshot
    Capital {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = engine::REGULATORY_CONFIDENCE)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Mode::Regulatory)]
        mode: Mode,
        #[command(flatten)]
        output: Output,
    },
    /// Systematic factor recovered from realized losses
    InvertFactor {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        factor: FactorArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Distance to default per snapshot
    Dtd {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Weakest shock that breaches each capital-ratio floor
    ReverseStress {
        #[command(flatten)]
        input: Input,
        /// Capital-ratio floor; repeat for several
        #[arg(long = "floor", default_values_t = adequacy::DEFAULT_FLOORS)]
        floors: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Capital ratio, distance to default, stress readings and factor per quarter
    Report {
        #[command(flatten)]
        input: Input,
        #[arg(long = "floor", default_values_t = adequacy::DEFAULT_FLOORS)]
        floors: Vec<f64>,
        #[command(flatten)]
        factor: FactorArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Validate input files and list coverage gaps
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Monte Carlo loss distribution of one snapshot
    Simulate {
        #[command(flatten)]
        input: Input,
        /// Snapshot quarter end; defaults to the latest
        #[arg(long)]
        quarter: Option<Quarter>,
        #[command(flatten)]
        sim: SimArgs,
        /// Fix the systematic factor at this value
        #[arg(long, allow_hyphen_values = true)]
        conditional_y: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Raw)]
        mode: Mode,
        /// Confidence levels to report; repeat for several
        #[arg(long = "alpha", default_values_t = [0.99, engine::REGULATORY_CONFIDENCE])]
        alphas: Vec<f64>,
        /// Also write per-scenario losses here
        #[arg(long)]
        losses_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Simulated VaR against the asymptotic value as the book is split finer
    ConvergenceStudy {
        #[arg(long, default_value_t = 0.01)]
        pd: f64,
        #[arg(long, default_value_t = 0.2)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        lgd: f64,
        #[arg(long, default_value_t = 1.0)]
        ead: f64,
        #[arg(long, default_value_t = engine::REGULATORY_CONFIDENCE)]
        alpha: f64,
        /// Obligor counts, increasing
        #[arg(long = "n", value_delimiter = ',', default_values_t = [10, 100, 1_000, 10_000])]
        counts: Vec<u64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Write a synthetic series of grades, accounts and losses
    Synth {
        /// Directory for grades.csv, accounts.csv and losses.csv
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        quarters: usize,
        #[arg(long, default_value_t = 6)]
        grades_per_class: usize,
        #[arg(long, env = "ASRF_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000.0)]
        ead_scale: f64,
        /// First quarter end
        #[arg(long, default_value = "2006-03-31")]
        start: Quarter,
        /// Ascending PD band edges
        #[arg(long, value_delimiter = ',')]
        pd_edges: Option<Vec<f64>>,
        /// Factor value per quarter; defaults to a slow cycle
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y_path: Option<Vec<f64>>,
        /// Sample window losses from this many obligors per grade
        #[arg(long)]
        noisy: Option<u64>,
    },
    /// Supervisory parameters
    Params {
        /// Print the constants table
        #[arg(long, required = true)]
        dump: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Input {
    /// Directory holding grades.csv, accounts.csv and losses.csv
    #[arg(long, default_value = ".")]
    data: PathBuf,
    #[arg(long)]
    grades: Option<PathBuf>,
    #[arg(long)]
    accounts: Option<PathBuf>,
    #[arg(long)]
    losses: Option<PathBuf>,
}

impl Input {
    fn load(&self) -> Result<QuarterSeries, AsrfError> {
        Ok(self.load_with_report()?.0)
    }

    fn load_with_report(&self) -> Result<(QuarterSeries, ValidationReport), AsrfError> {
        let mut paths = InputPaths::in_dir(&self.data);
        if let Some(p) = &self.grades {
            paths.grades = p.clone();
        }
        if let Some(p) = &self.accounts {
            paths.accounts = p.clone();
        }
        if let Some(p) = &self.losses {
            paths.losses = p.clone();
        }
        csvio::ingest(&paths)
    }
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Aligned text table instead of CSV
    #[arg(long)]
    text: bool,
}

impl Output {
    fn emit(&self, table: &Table) -> Result<(), AsrfError> {
        let sink: Box<dyn Write> = match &self.output {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        };
        let mut w = BufWriter::new(sink);
        if self.text {
            table.write_text(&mut w)?;
        } else {
            table.write_csv(&mut w)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Args)]
struct FactorArgs {
    /// Quarters of delay in recognising bad debts, 0 to 2
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    lag: u8,
    #[arg(long, value_enum, default_value_t = Allocation::ProportionalRwa)]
    allocation: Allocation,
    /// Quarters between the input snapshot and the reading
    #[arg(long, default_value_t = factor::DEFAULT_INPUT_LEAD)]
    input_lead: u8,
}

impl FactorArgs {
    fn options(&self, execution: Execution) -> FactorOptions {
        FactorOptions {
            lag: self.lag,
            allocation: self.allocation.into(),
            input_lead: self.input_lead,
            execution,
            ..FactorOptions::default()
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 100_000)]
    scenarios: usize,
    #[arg(long, env = "ASRF_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    obligors: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::AssetValue)]
    sampler: SamplerArg,
    /// Batches for quantile standard errors, at least 30
    #[arg(long, default_value_t = mc::DEFAULT_BATCHES)]
    batches: usize,
}

impl SimArgs {
    fn config(&self, mode: LossMode, execution: Execution) -> SimConfig {
        SimConfig {
            scenarios: self.scenarios,
            seed: self.seed,
            obligors_per_grade: self.obligors,
            conditional_y: None,
            sampler: self.sampler.into(),
            mode,
            batches: self.batches,
            execution,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Raw,
    Regulatory,
}

impl From<Mode> for LossMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Raw => LossMode::Raw,
            Mode::Regulatory => LossMode::Regulatory,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Allocation {
    ProportionalRwa,
    AllToIrb,
}

impl From<Allocation> for LossAllocation {
    fn from(a: Allocation) -> Self {
        match a {
            Allocation::ProportionalRwa => LossAllocation::ProportionalRwa,
            Allocation::AllToIrb => LossAllocation::AllToIrb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    AssetValue,
    Binomial,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::AssetValue => Sampler::AssetValue,
            SamplerArg::Binomial => Sampler::Binomial,
        }
    }
}

fn skip(err: AsrfError) -> Result<(), AsrfError> {
    match err {
        AsrfError::Infeasible { .. } | AsrfError::Coverage { .. } => {
            eprintln!("warning: {err}");
            Ok(())
        }
        other => Err(other),
    }
}

fn run(cli: Cli) -> Result<(), AsrfError> {
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let solver = SolverOptions::default();
    match cli.command {
        Command::Capital {
            input,
            alpha,
            mode,
            output,
        } => {
            let series = input.load()?;
            let mut rows = Vec::new();
            for s in series.snapshots() {
                let d = engine::capital(s, alpha, mode.into())?;
                rows.push((s.as_of, s.total_ead(), d));
            }
            output.emit(&csvio::capital_table(&rows))
        }
        Command::InvertFactor { input, factor, output } => {
            let series = input.load()?;
            let fs = factor::factor_series(&series, &factor.options(execution))?;
            for gap in &fs.gaps {
                eprintln!("warning: {gap}");
            }
            output.emit(&csvio::factor_table(&fs.readings))
        }
        Command::Dtd { input, output } => {
            let series = input.load()?;
            let mut rows = Vec::new();
            for t in series.snapshot_quarters() {
                match adequacy::distance_to_default(&series, t, solver) {
                    Ok(r) => {
                        if r.provision_shortfall {
                            eprintln!("warning: {t}: IRB provisions fall short of expected loss");
                        }
                        rows.push(r);
                    }
                    Err(e) => skip(e)?,
                }
            }
            output.emit(&csvio::solvency_table(&rows))
        }
        Command::ReverseStress { input, floors, output } => {
            let series = input.load()?;
            let mut rows = Vec::new();
            for t in series.snapshot_quarters() {
                for &floor in &floors {
                    match adequacy::reverse_stress(&series, t, floor, solver) {
                        Ok(r) => rows.push(r),
                        Err(e) => skip(e)?,
                    }
                }
            }
            output.emit(&csvio::stress_table(&rows))
        }
        Command::Report {
            input,
            floors,
            factor,
            output,
        } => {
            let series = input.load()?;
            let opts = ReportOptions {
                floors,
                factor: factor.options(execution),
                solver,
                execution,
            };
            let report = adequacy::solvency_report(&series, &opts)?;
            for gap in &report.gaps {
                eprintln!("warning: {gap}");
            }
            output.emit(&csvio::solvency_report_table(&report))
        }
        Command::Validate { input } => {
            let (series, report) = input.load_with_report()?;
            for gap in &report.coverage_gaps {
                eprintln!("warning: {gap}");
            }
            eprintln!(
                "ok: {} snapshots, {} account quarters, {} loss quarters",
                series.snapshots().count(),
                series.all_accounts().count(),
                series.losses().count()
            );
            Ok(())
        }
        Command::Simulate {
            input,
            quarter,
            sim,
            conditional_y,
            mode,
            alphas,
            losses_out,
            output,
        } => {
            let series = input.load()?;
            let snapshot = match quarter {
                Some(q) => series.snapshot(q).ok_or_else(|| AsrfError::Coverage {
                    quarter: q,
                    reason: format!("no snapshot at {q}"),
                })?,
                None => series.snapshots().last().expect("validated series has a snapshot"),
            };
            let config = SimConfig {
                conditional_y,
                ..sim.config(mode.into(), execution)
            };
            let dist = mc::simulate(snapshot, &config)?;
            if let Some(path) = losses_out {
                csvio::scenario_table(&dist).write_csv(BufWriter::new(File::create(path)?))?;
            }
            output.emit(&csvio::simulation_table(&dist, &alphas)?)
        }
        Command::ConvergenceStudy {
            pd,
            rho,
            lgd,
            ead,
            alpha,
            counts,
            sim,
            output,
        } => {
            let grade = ObligorGrade {
                id: "template".into(),
                asset_class: AssetClass::OtherRetail,
                ead,
                lgd,
                pd,
                maturity_years: None,
                firm_size: None,
                rho_override: Some(rho),
            };
            let violations = grade.violations();
            if !violations.is_empty() {
                return Err(AsrfError::Validation(violations));
            }
            let rows = mc::convergence_study(&grade, &counts, alpha, &sim.config(LossMode::Raw, execution))?;
            output.emit(&csvio::convergence_table(&rows))
        }
        Command::Synth {
            out,
            quarters,
            grades_per_class,
            seed,
            ead_scale,
            start,
            pd_edges,
            y_path,
            noisy,
        } => {
            let mut spec = SynthSpec {
                start,
                grades_per_class,
                ead_scale,
                noisy,
                ..SynthSpec::new(quarters, seed)
            };
            if let Some(edges) = pd_edges {
                spec.pd_band_edges = edges;
            }
            if let Some(path) = y_path {
                spec = spec.with_path(path);
            }
            let series = synth::synthesize(&spec)?;
            std::fs::create_dir_all(&out)?;
            csvio::write_series(&series, &InputPaths::in_dir(&out))?;
            eprintln!("wrote {} quarters to {}", spec.quarters, out.display());
            Ok(())
        }
        Command::Params { dump: _, output } => output.emit(&csvio::params_table(&params::constants_table())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
