//! Command-line front end. Exit codes: 0 pass, 1 a check or hypothesis
//! fails, 2 malformed input or usage.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pqnb_core::expr::SamplingPolicy;
use pqnb_core::gauge::{
    compose_gauges, conformal_change, conformal_gauge_variants, gauge_gc, gauge_of_poisson, gauge_transform,
    structure_difference, GaugeError, Verification,
};
use pqnb_core::reduction::{gauge_reduce_commute, reduce, reduce_gc, ReductionError};
use pqnb_core::structures::{
    check_gc_background, check_pn, check_poisson, check_pqn, check_pqnb, PqnbStructure, VerificationReport,
};
use pqnb_core::tensor::Form;

use crate::format::{parse_file, Kind, LoadError, StructureFile};
use crate::report::{render_text, report_json};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pqnb", version, about = "Verify, gauge and reduce Poisson quasi-Nijenhuis structures with background")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Structure kind to check; defaults to the file's `kind` line or the tensors present
    #[arg(long, global = true, value_enum)]
    pub kind: Option<Kind>,
    /// Write a JSON report to this path
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Skip re-verification of inputs and outputs
    #[arg(long, global = true)]
    pub trust: bool,
    /// Override the sampling seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structure in FILE
    Check { file: PathBuf },
    /// Apply a gauge block to the structure
    Gauge {
        file: PathBuf,
        /// Name of the gauge block (default: the first)
        #[arg(long)]
        form: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply all gauge blocks in order and compare with the gauge by their sum
    Compose {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rescale P by exp(f) for a Casimir f, optionally followed by a gauge variant
    Conformal {
        file: PathBuf,
        /// The Casimir function, in the file's coordinates
        #[arg(long)]
        casimir: String,
        /// 1: (e^f P, C, e^-f(-dB_C + df^B_C), e^-f(dB - df^B)); 2: (e^f P, e^f C, e^f(-dB_C - df^B_C), dB)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        variant: Option<u8>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce along the file's reduction block
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare gauge-then-reduce with reduce-then-gauge
    Commute { file: PathBuf },
}

/// What a command produced: text for stdout, reports, an optional output
/// structure and the exit code.
#[derive(Debug, Default)]
pub struct Run {
    pub text: String,
    pub reports: Vec<VerificationReport>,
    pub structure: Option<StructureFile>,
    pub code: i32,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: crate::format::FormatError },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
}

fn load(path: &Path) -> Result<StructureFile, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_file(&src).map_err(|source| CliError::Format { path: path.into(), source })
}

fn code(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn check(file: &StructureFile, kind: Kind, policy: &SamplingPolicy) -> Result<VerificationReport, CliError> {
    let ch = &file.chart;
    Ok(match kind {
        Kind::Gc => check_gc_background(&file.gc()?, policy),
        _ => {
            let s = file.pqnb()?;
            match kind {
                Kind::Poisson => check_poisson(ch, &s.p, policy),
                Kind::Pn => check_pn(ch, &s.p, &s.a, policy),
                Kind::Pqn => check_pqn(ch, &s.p, &s.a, &s.phi, policy),
                _ => check_pqnb(&s, policy),
            }
        }
    })
}

fn failure(run: &mut Run, r: VerificationReport) {
    run.code = EXIT_FAIL;
    if let Some(l) = r.first_failure() {
        let _ = writeln!(run.text, "failed: {l}");
    }
    run.reports.push(r);
}

fn gauge_failure(run: &mut Run, e: GaugeError, coords: &[String]) -> Result<(), CliError> {
    match e {
        GaugeError::InputRejected(r) | GaugeError::OutputRejected(r) | GaugeError::NotPoisson(r) => {
            failure(run, *r);
            Ok(())
        }
        GaugeError::NotCasimir { direction, .. } => {
            let name = coords.get(direction).map(String::as_str).unwrap_or("?");
            let _ = writeln!(run.text, "not a Casimir: P#(df) has a nonzero {name} component");
            run.code = EXIT_FAIL;
            Ok(())
        }
        GaugeError::Degenerate | GaugeError::NotAntisymmetric { .. } => {
            let _ = writeln!(run.text, "{e}");
            run.code = EXIT_FAIL;
            Ok(())
        }
        other => Err(CliError::Usage(other.to_string())),
    }
}

fn reduction_failure(run: &mut Run, e: ReductionError) -> Result<(), CliError> {
    match e {
        ReductionError::HypothesisFailed(r) | ReductionError::OutputRejected(r) => {
            failure(run, *r);
            Ok(())
        }
        e @ (ReductionError::ResidualDependence { .. } | ReductionError::ZeroTest(_)) => {
            let _ = writeln!(run.text, "{e}");
            run.code = EXIT_FAIL;
            Ok(())
        }
        other => Err(CliError::Usage(other.to_string())),
    }
}

/// Runs one command without touching stdout or the report path.
pub fn execute(command: &Command, g: &GlobalOpts) -> Result<Run, CliError> {
    let file_of = |c: &Command| -> PathBuf {
        match c {
            Command::Check { file }
            | Command::Gauge { file, .. }
            | Command::Compose { file, .. }
            | Command::Conformal { file, .. }
            | Command::Reduce { file, .. }
            | Command::Commute { file } => file.clone(),
        }
    };
    let file = load(&file_of(command))?;
    let mut policy = file.policy.clone();
    if let Some(s) = g.seed {
        policy.seed = s;
    }
    let kind = g.kind.unwrap_or_else(|| file.inferred_kind());
    let mode = if g.trust { Verification::Trust } else { Verification::Verify };
    let mut run = Run::default();

    match command {
        Command::Check { .. } => {
            let r = check(&file, kind, &policy)?;
            run.code = code(r.passed());
            run.reports.push(r);
        }
        Command::Gauge { form, .. } => {
            let b = file.gauge(form.as_deref())?;
            if kind == Kind::Gc {
                let j = gauge_gc(b, &file.gc()?).map_err(|e| CliError::Usage(e.to_string()))?;
                if mode == Verification::Verify {
                    let r = check_gc_background(&j, &policy);
                    run.code = code(r.passed());
                    run.reports.push(r);
                }
                run.structure = Some(StructureFile::from_gc(&j, &policy));
            } else {
                let s = file.pqnb()?;
                let out = if kind == Kind::Poisson {
                    gauge_of_poisson(&file.chart, &s.p, b, &policy)
                } else {
                    gauge_transform(b, &s, &policy, mode)
                };
                match out {
                    Ok(t) => {
                        if mode == Verification::Verify {
                            run.reports.push(check_pqnb(&t, &policy));
                        }
                        run.structure = Some(StructureFile::from_pqnb(&t, Kind::Pqnb, &policy));
                    }
                    Err(e) => gauge_failure(&mut run, e, file.chart.coords())?,
                }
            }
        }
        Command::Compose { .. } => {
            if file.gauges.len() < 2 {
                return Err(CliError::Usage("compose needs at least two gauge blocks".into()));
            }
            let s = file.pqnb()?;
            let mut seq = s.clone();
            let mut total = Form::zero(file.chart.dim(), 2);
            for (_, b) in &file.gauges {
                seq = apply(b, &seq, &policy, mode, &mut run)?;
                total = compose_gauges(&total, b);
                if run.code != EXIT_PASS {
                    return Ok(run);
                }
            }
            let once = apply(&total, &s, &policy, mode, &mut run)?;
            if run.code != EXIT_PASS {
                return Ok(run);
            }
            let mut r = VerificationReport::new("compose", &policy);
            let diff = structure_difference(&seq, &once);
            r.push(
                "composition",
                "gauge(B_n) o ... o gauge(B_1) = gauge(B_1 + ... + B_n)",
                pqnb_core::expr::all_zero(&diff, &policy, file.chart.nonvanishing()),
            );
            run.code = code(r.passed());
            run.reports.push(r);
            let mut outf = StructureFile::from_pqnb(&once, Kind::Pqnb, &policy);
            outf.gauges.push(("B".into(), total));
            run.structure = Some(outf);
        }
        Command::Conformal { casimir, variant, .. } => {
            let f = file
                .chart
                .scalar(casimir)
                .map_err(|e| CliError::Usage(format!("--casimir \"{casimir}\": {e}")))?;
            let s = file.pqnb()?;
            match variant {
                None => match conformal_change(&file.chart, &s.p, &f, &policy) {
                    Ok(q) => {
                        let t = PqnbStructure::from_poisson(file.chart.clone(), q);
                        run.reports.push(check_poisson(&t.chart, &t.p, &policy));
                        run.structure = Some(StructureFile::from_pqnb(&t, Kind::Poisson, &policy));
                    }
                    Err(e) => gauge_failure(&mut run, e, file.chart.coords())?,
                },
                Some(v) => {
                    let b = file.gauge(None)?;
                    match conformal_gauge_variants(&file.chart, &s.p, &f, b, &policy) {
                        Ok((first, second)) => {
                            let t = if *v == 1 { first } else { second };
                            let r = check_pqnb(&t, &policy);
                            run.code = code(r.passed());
                            run.reports.push(r);
                            run.structure = Some(StructureFile::from_pqnb(&t, Kind::Pqnb, &policy));
                        }
                        Err(e) => gauge_failure(&mut run, e, file.chart.coords())?,
                    }
                }
            }
        }
        Command::Reduce { .. } => {
            let setup = file.reduction_setup()?;
            if kind == Kind::Gc {
                match reduce_gc(&setup, &file.gc()?, &policy) {
                    Ok(red) => {
                        run.reports.push(red.hypotheses);
                        run.reports.push(red.certificate);
                        run.structure = Some(StructureFile::from_gc(&red.structure, &policy));
                    }
                    Err(e) => reduction_failure(&mut run, e)?,
                }
            } else {
                match reduce(&setup, &file.pqnb()?, &policy) {
                    Ok(red) => {
                        run.reports.push(red.hypotheses);
                        run.reports.push(red.certificate);
                        run.structure = Some(StructureFile::from_pqnb(&red.structure, Kind::Pqnb, &policy));
                    }
                    Err(e) => reduction_failure(&mut run, e)?,
                }
            }
        }
        Command::Commute { .. } => {
            let setup = file.reduction_setup()?;
            let b = file.gauge(None)?;
            match gauge_reduce_commute(&setup, &file.pqnb()?, b, &policy) {
                Ok(out) => {
                    let r = out.report;
                    if !r.passed() {
                        failure(&mut run, r);
                    } else {
                        run.reports.push(r);
                    }
                }
                Err(e) => reduction_failure(&mut run, e)?,
            }
        }
    }
    Ok(run)
}

fn apply(
    b: &Form,
    s: &PqnbStructure,
    policy: &SamplingPolicy,
    mode: Verification,
    run: &mut Run,
) -> Result<PqnbStructure, CliError> {
    match gauge_transform(b, s, policy, mode) {
        Ok(t) => Ok(t),
        Err(e) => {
            gauge_failure(run, e, &s.chart.coords().to_vec())?;
            Ok(s.clone())
        }
    }
}

fn output_of(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Gauge { output, .. }
        | Command::Compose { output, .. }
        | Command::Conformal { output, .. }
        | Command::Reduce { output, .. } => output.as_ref(),
        _ => None,
    }
}

/// Parses arguments, runs, writes outputs and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match finish(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn finish(cli: &Cli) -> Result<i32, CliError> {
    let run = execute(&cli.command, &cli.global)?;
    let names = witness_names(&cli.command);
    let mut text = String::new();
    for r in &run.reports {
        text.push_str(&render_text(r, &names));
    }
    text.push_str(&run.text);
    if let Some(path) = &cli.global.report {
        let v: Vec<_> = run.reports.iter().map(|r| report_json(r, &names)).collect();
        let body = serde_json::to_string_pretty(&serde_json::json!({ "exit_code": run.code, "reports": v }))
            .expect("json values serialise");
        std::fs::write(path, body + "\n").map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    match (&run.structure, output_of(&cli.command)) {
        (Some(s), Some(path)) => {
            print!("{text}");
            std::fs::write(path, s.to_string()).map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        (Some(s), None) => {
            for line in text.lines() {
                println!("# {line}");
            }
            print!("{s}");
        }
        (None, _) => print!("{text}"),
    }
    Ok(run.code)
}

// Witness points live on the input chart for every command.
fn witness_names(c: &Command) -> Vec<String> {
    let file = match c {
        Command::Check { file }
        | Command::Gauge { file, .. }
        | Command::Compose { file, .. }
        | Command::Conformal { file, .. }
        | Command::Reduce { file, .. }
        | Command::Commute { file } => file,
    };
    load(file).map(|f| f.chart.coords().to_vec()).unwrap_or_default()
}
