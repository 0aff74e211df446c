//! Command-line front end: run protocols, sweep θ, average, certify, and
//! dump branches or threshold tables as JSON, CSV or a terminal table.
//!
//! Angles are radians throughout. Averages always integrate θ over `[0, π)`;
//! other commands accept any radian value.

pub mod config;
pub mod emit;
pub mod records;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qtp_core::certify::{self, Adversary, AdversaryModel, ComputeSettings, Criterion, ThresholdSource};
use qtp_core::fidelity::{self, linspace, McEstimate, DEF_POSTSELECTED, DEF_THETA_AVERAGE, DEF_THRESHOLD};
use qtp_core::{Error, InputFamily, Params, ProtocolId};

use config::{config_error, resolve_seed, AverageKind, ConfigError, FileConfig, Format, Mode, QuadratureSpec};
use records::{
    AverageRow, BranchDump, BranchRecord, CertifyRecord, RunRecord, SweepRow, ThresholdRecord,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;

/// Environment variable holding the default Monte Carlo seed.
pub const SEED_ENV: &str = "QTP_SEED";

#[derive(Debug, Parser)]
#[command(name = "qtp", version, about = "Simulate and certify honest and cheating teleportation protocols")]
pub struct Cli {
    /// TOML file whose keys mirror the long flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output format [default: json].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold fidelity of one protocol run, with per-branch detail.
    Run(RunArgs),
    /// Threshold fidelity over an equally spaced θ grid.
    Sweep(SweepArgs),
    /// θ average, or Bloch-sphere averages for single-qubit pb and pab.
    Average(AverageArgs),
    /// Issue or deny a certificate for an observed or simulated fidelity.
    Certify(CertifyArgs),
    /// Every announcement branch with its output density matrix.
    Enumerate(InputArgs),
    /// Every applicable threshold for (m, family).
    Thresholds(ThresholdsArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// p0, pa1, pa2, pb or pab [default: p0].
    #[arg(long)]
    pub protocol: Option<ProtocolId>,
    /// Number of qubits C teleports [default: 1].
    #[arg(long)]
    pub m: Option<usize>,
    /// trivial, ghz or bloch [default: ghz].
    #[arg(long)]
    pub family: Option<InputFamily>,
    /// Polar angle in radians [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Azimuth in radians, bloch family only [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SamplingArgs {
    /// exact or monte_carlo [default: exact].
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Monte Carlo trajectories, at least 100; ignored in exact mode.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Monte Carlo master seed; falls back to the config file, then QTP_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Grid size [default: 9].
    #[arg(long)]
    pub points: Option<usize>,
    /// First grid angle in radians [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    /// Last grid angle in radians [default: π].
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AverageArgs {
    /// Protocol to average [default: p0].
    #[arg(long)]
    pub protocol: Option<ProtocolId>,
    /// Number of qubits for the θ average [default: 1].
    #[arg(long)]
    pub m: Option<usize>,
    /// theta or bloch [default: theta].
    #[arg(long, value_enum)]
    pub kind: Option<AverageKind>,
    /// θ rule, gauss:N or grid:N [default: gauss:64].
    #[arg(long)]
    pub quadrature: Option<QuadratureSpec>,
    /// Gauss nodes in cos θ (and azimuths) for sphere averages [default: 32].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Also report the mean fidelity conditioned on a = BIT.
    #[arg(long, value_name = "BIT")]
    pub postselect: Option<u8>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    /// honest, cheating_a, cheating_b or cheating_ab; with --self defaults to
    /// the model matching --protocol.
    #[arg(long)]
    pub model: Option<Adversary>,
    /// pointwise, theta_average or bloch_postselected; required for ghz
    /// inputs with m >= 2.
    #[arg(long)]
    pub criterion: Option<Criterion>,
    /// paper_constant or computed_from_simulation [default: paper_constant,
    /// or computed_from_simulation with --self].
    #[arg(long)]
    pub threshold_source: Option<ThresholdSource>,
    /// Measured fidelity in [0, 1].
    #[arg(long, conflicts_with = "self_")]
    pub observed: Option<f64>,
    /// Certify the simulator's own value for --protocol instead.
    #[arg(long = "self")]
    pub self_: bool,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// θ rule for theta_average, gauss:N or grid:N [default: gauss:64].
    #[arg(long)]
    pub quadrature: Option<QuadratureSpec>,
    /// Sphere nodes for bloch_postselected [default: 32].
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdsArgs {
    /// Number of qubits [default: 1].
    #[arg(long)]
    pub m: Option<usize>,
    /// trivial, ghz or bloch [default: ghz].
    #[arg(long)]
    pub family: Option<InputFamily>,
    /// paper_constant or computed_from_simulation [default: paper_constant].
    #[arg(long)]
    pub threshold_source: Option<ThresholdSource>,
}

/// Process exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Capacity { .. } => EXIT_CAPACITY,
                Error::InvalidParams(_)
                | Error::QuadratureResolution(_)
                | Error::TooFewShots { .. }
                | Error::ObservedOutOfRange(_)
                | Error::NotApplicable { .. }
                | Error::Unknown { .. } => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}

/// Runs `cli` and returns the rendered output. `env_seed` is the value of
/// [`SEED_ENV`], passed in so callers control the environment.
pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<String> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let format = cli.format.or(file.format).unwrap_or_default();
    match &cli.command {
        Command::Run(args) => {
            let record = cmd_run(args, &file, env_seed)?;
            match format {
                Format::Json => emit::json(&record),
                Format::Csv => emit::csv(&record.rows()),
                Format::Table => emit::table(&record.rows(), &["announcement", "probability", "fidelity"]),
            }
        }
        Command::Sweep(args) => render(format, &cmd_sweep(args, &file, env_seed)?, &["theta", "f_th"]),
        Command::Average(args) => render(format, &cmd_average(args, &file)?, &["label", "key", "value"]),
        Command::Certify(args) => {
            let record = cmd_certify(args, &file, env_seed)?;
            match format {
                Format::Json => emit::json(&record),
                _ => render(format, std::slice::from_ref(&record), &[]),
            }
        }
        Command::Enumerate(args) => {
            let dumps = cmd_enumerate(args, &file)?;
            match format {
                Format::Json => emit::json(&dumps),
                _ => render(
                    format,
                    &dumps.iter().flat_map(BranchDump::rows).collect::<Vec<_>>(),
                    &["announcement", "row", "col", "re", "im"],
                ),
            }
        }
        Command::Thresholds(args) => render(format, &cmd_thresholds(args, &file)?, &["adversary", "criterion", "threshold"]),
    }
}

fn render<T: Serialize>(format: Format, rows: &[T], body: &[&str]) -> Result<String> {
    match format {
        Format::Json => emit::json(rows),
        Format::Csv => emit::csv(rows),
        Format::Table => emit::table(rows, body),
    }
}

fn resolve_input(args: &InputArgs, file: &FileConfig) -> Result<(ProtocolId, Params)> {
    let protocol = args.protocol.or(file.protocol).unwrap_or(ProtocolId::P0);
    let params = Params {
        m: args.m.or(file.m).unwrap_or(1),
        theta: args.theta.or(file.theta).unwrap_or(0.0),
        phi: args.phi.or(file.phi).unwrap_or(0.0),
        family: args.family.or(file.family).unwrap_or(InputFamily::Ghz),
    };
    params.validate()?;
    Ok((protocol, params))
}

enum Sampling {
    Exact,
    MonteCarlo {
        shots: usize,
        seed: u64,
        threads: Option<usize>,
    },
}

fn resolve_sampling(args: &SamplingArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<Sampling> {
    match args.mode.or(file.mode).unwrap_or_default() {
        Mode::Exact => Ok(Sampling::Exact),
        Mode::MonteCarlo => {
            let shots = args
                .shots
                .or(file.shots)
                .ok_or_else(|| config_error("monte_carlo mode needs --shots"))?;
            if shots < fidelity::MIN_SHOTS {
                return Err(config_error(format!(
                    "monte_carlo mode needs at least {} shots, got {shots}",
                    fidelity::MIN_SHOTS
                )));
            }
            let seed = resolve_seed(args.seed, file.seed, env_seed)?
                .ok_or_else(|| config_error(format!("monte_carlo mode needs --seed, a `seed` key or {SEED_ENV}")))?;
            let threads = args.threads.or(file.threads);
            if threads == Some(0) {
                return Err(config_error("--threads must be at least 1"));
            }
            Ok(Sampling::MonteCarlo { shots, seed, threads })
        }
    }
}

fn monte_carlo(protocol: ProtocolId, params: &Params, shots: usize, seed: u64, threads: Option<usize>) -> Result<McEstimate<f64>> {
    Ok(match threads {
        Some(n) => fidelity::monte_carlo_threshold_on(protocol, params, shots, seed, n)?,
        None => fidelity::monte_carlo_threshold(protocol, params, shots, seed)?,
    })
}

pub fn cmd_run(args: &RunArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<RunRecord> {
    let (protocol, params) = resolve_input(&args.input, file)?;
    let base = |mode, f_th, branches| RunRecord {
        protocol,
        m: params.m,
        family: params.family,
        theta: params.theta,
        phi: params.phi,
        mode,
        label: "f_th".into(),
        definition: DEF_THRESHOLD.into(),
        f_th,
        stderr: None,
        shots: None,
        seed: None,
        rng: None,
        branches,
    };
    match resolve_sampling(&args.sampling, file, env_seed)? {
        Sampling::Exact => {
            let report = fidelity::exact_report(protocol, &params)?;
            let branches = report
                .per_branch
                .iter()
                .map(|b| BranchRecord {
                    announcement: b.announcement.to_string(),
                    probability: b.probability,
                    fidelity: b.fidelity,
                })
                .collect();
            Ok(base(Mode::Exact, report.f_th, branches))
        }
        Sampling::MonteCarlo { shots, seed, threads } => {
            let mc = monte_carlo(protocol, &params, shots, seed, threads)?;
            let branches = mc
                .counts
                .keys()
                .map(|ann| BranchRecord {
                    announcement: ann.to_string(),
                    probability: mc.frequency(ann),
                    fidelity: None,
                })
                .collect();
            Ok(RunRecord {
                stderr: Some(mc.stderr),
                shots: Some(shots),
                seed: Some(seed),
                rng: Some(mc.rng.to_string()),
                ..base(Mode::MonteCarlo, mc.estimate, branches)
            })
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<Vec<SweepRow>> {
    let (protocol, params) = resolve_input(&args.input, file)?;
    let sampling = resolve_sampling(&args.sampling, file, env_seed)?;
    let points = args.points.or(file.points).unwrap_or(9);
    let lo = args.theta_min.or(file.theta_min).unwrap_or(0.0);
    let hi = args.theta_max.or(file.theta_max).unwrap_or(std::f64::consts::PI);
    if points == 0 {
        return Err(config_error("--points must be at least 1"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(config_error(format!("θ grid [{lo}, {hi}] is not increasing")));
    }
    linspace(lo, hi, points)
        .into_iter()
        .map(|theta| {
            let p = Params { theta, ..params };
            let (mode, f_th, stderr, shots, seed) = match sampling {
                Sampling::Exact => (Mode::Exact, fidelity::exact_threshold(protocol, &p)?, None, None, None),
                Sampling::MonteCarlo { shots, seed, threads } => {
                    let mc = monte_carlo(protocol, &p, shots, seed, threads)?;
                    (Mode::MonteCarlo, mc.estimate, Some(mc.stderr), Some(shots), Some(seed))
                }
            };
            Ok(SweepRow {
                protocol,
                m: p.m,
                family: p.family,
                phi: p.phi,
                theta,
                mode,
                label: "f_th".into(),
                definition: DEF_THRESHOLD.into(),
                f_th,
                stderr,
                shots,
                seed,
            })
        })
        .collect()
}

pub fn cmd_average(args: &AverageArgs, file: &FileConfig) -> Result<Vec<AverageRow>> {
    let protocol = args.protocol.or(file.protocol).unwrap_or(ProtocolId::P0);
    match args.kind.or(file.kind).unwrap_or_default() {
        AverageKind::Theta => {
            let m = args.m.or(file.m).unwrap_or(1);
            Params::ghz(m, 0.0).validate()?;
            let quadrature = args.quadrature.or(file.quadrature).unwrap_or_default();
            let value: f64 = fidelity::theta_average(protocol, m, quadrature.0)?;
            Ok(vec![AverageRow {
                protocol,
                m,
                label: "theta_average".into(),
                key: String::new(),
                value,
                definition: DEF_THETA_AVERAGE.into(),
                normalization: None,
                quadrature: quadrature.to_string(),
            }])
        }
        AverageKind::Bloch => {
            if let Some(m) = args.m.or(file.m).filter(|&m| m != 1) {
                return Err(config_error(format!("bloch averages need m = 1, got m = {m}")));
            }
            let nodes = args.nodes.or(file.nodes).unwrap_or(ComputeSettings::default().sphere_nodes);
            let postselect = args.postselect.or(file.postselect);
            let avg = fidelity::bloch_average::<f64>(protocol, postselect, nodes)?;
            let quadrature = format!("sphere:{nodes}");
            let row = |label: &str, key: String, value, definition: &str, normalization: Option<String>| AverageRow {
                protocol,
                m: 1,
                label: label.into(),
                key,
                value,
                definition: definition.into(),
                normalization,
                quadrature: quadrature.clone(),
            };
            let mut rows: Vec<AverageRow> = avg
                .per_announcement
                .iter()
                .map(|(ann, v)| row("bloch_squared", ann.to_string(), *v, avg.squared_definition, Some(avg.normalization.clone())))
                .collect();
            if protocol.announces_b() {
                for (a, v) in avg.per_a.iter().enumerate() {
                    rows.push(row("bloch_squared_per_a", format!("a={a}"), *v, avg.squared_definition, Some(avg.normalization.clone())));
                }
            }
            if let (Some(bit), Some(v)) = (avg.postselect, avg.postselected) {
                rows.push(row("postselected", format!("a={bit}"), v, avg.postselected_definition, None));
            }
            Ok(rows)
        }
    }
}

pub fn cmd_certify(args: &CertifyArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<CertifyRecord> {
    let (protocol, params) = resolve_input(&args.input, file)?;
    let observed_flag = args.observed.or(file.observed);
    if args.self_ && observed_flag.is_some() {
        return Err(config_error("give either --observed or --self, not both"));
    }
    let criterion = match args.criterion.or(file.criterion) {
        Some(c) => c,
        None if params.family == InputFamily::Ghz && params.m >= 2 => {
            return Err(config_error(
                "entangled inputs (ghz, m >= 2) need an explicit --criterion: pointwise or theta_average",
            ))
        }
        None => Criterion::Pointwise,
    };
    let adversary = match args.model.or(file.model) {
        Some(a) => a,
        None if args.self_ => Adversary::for_protocol(protocol),
        None => return Err(config_error("--model is required unless --self is given")),
    };
    let source = args.threshold_source.or(file.threshold_source).unwrap_or(if args.self_ {
        ThresholdSource::ComputedFromSimulation
    } else {
        ThresholdSource::PaperConstant
    });
    let quadrature = args.quadrature.or(file.quadrature).unwrap_or_default();
    let nodes = args.nodes.or(file.nodes).unwrap_or(ComputeSettings::default().sphere_nodes);
    let settings = ComputeSettings {
        quadrature: quadrature.0,
        sphere_nodes: nodes,
        ..ComputeSettings::default()
    };
    let model = AdversaryModel::new(adversary, criterion, source);
    // Applicability first, so an unusable criterion fails before any simulation.
    let threshold = certify::threshold_with(&model, params.m, params.family, &settings)?;

    let (observed, label, definition, observed_protocol) = if args.self_ {
        let (value, label, definition) = match criterion {
            Criterion::Pointwise => {
                let value = match resolve_sampling(&args.sampling, file, env_seed)? {
                    Sampling::Exact => fidelity::exact_threshold(protocol, &params)?,
                    Sampling::MonteCarlo { shots, seed, threads } => {
                        monte_carlo(protocol, &params, shots, seed, threads)?.estimate
                    }
                };
                (value, "f_th", DEF_THRESHOLD)
            }
            Criterion::ThetaAverage => (
                fidelity::theta_average(protocol, params.m, quadrature.0)?,
                "theta_average",
                DEF_THETA_AVERAGE,
            ),
            Criterion::BlochPostselected => {
                let avg = fidelity::bloch_average::<f64>(protocol, Some(1), nodes)?;
                (avg.postselected.unwrap_or(f64::NAN), "postselected", DEF_POSTSELECTED)
            }
        };
        (value.clamp(0.0, 1.0), label, definition, Some(protocol))
    } else {
        let value = observed_flag.ok_or_else(|| config_error("give --observed VALUE or --self"))?;
        let label = match criterion {
            Criterion::Pointwise => "f_th",
            Criterion::ThetaAverage => "theta_average",
            Criterion::BlochPostselected => "postselected",
        };
        (value, label, "measured by the caller", None)
    };

    let d = certify::decide_against(observed, &model, params.m, params.family, &threshold)?;
    Ok(CertifyRecord {
        certificate: d.certificate,
        claim: d.claim.into(),
        adversary: d.adversary,
        criterion: d.criterion,
        m: d.m,
        family: d.family,
        observed_protocol,
        observed_label: label.into(),
        observed_definition: definition.into(),
        observed: d.observed,
        threshold: d.threshold,
        threshold_source: d.source,
        provenance: d.provenance,
        comparison: d.comparison,
        tolerance: d.tolerance,
        verdict: d.verdict,
    })
}

pub fn cmd_enumerate(args: &InputArgs, file: &FileConfig) -> Result<Vec<BranchDump>> {
    let (protocol, params) = resolve_input(args, file)?;
    let run = qtp_core::run_exact(protocol, &params)?;
    let target = qtp_core::build_target(&params)?;
    run.branches
        .iter()
        .map(|b| {
            let fidelity = b.output.as_ref().map(|rho| rho.expectation(&target.psi)).transpose()?;
            let output = b.output.as_ref().map(|rho| {
                let dim = rho.dim();
                rho.matrix()
                    .data()
                    .chunks(dim)
                    .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            });
            Ok(BranchDump {
                protocol,
                m: params.m,
                family: params.family,
                theta: params.theta,
                phi: params.phi,
                announcement: b.announcement.to_string(),
                probability: b.probability,
                fidelity,
                output,
            })
        })
        .collect()
}

pub fn cmd_thresholds(args: &ThresholdsArgs, file: &FileConfig) -> Result<Vec<ThresholdRecord>> {
    let m = args.m.or(file.m).unwrap_or(1);
    let family = args.family.or(file.family).unwrap_or(InputFamily::Ghz);
    Params { m, theta: 0.0, phi: 0.0, family }.validate()?;
    let source = args.threshold_source.or(file.threshold_source).unwrap_or_default();
    Ok(certify::threshold_table(m, family, source)?
        .into_iter()
        .map(|row| ThresholdRecord {
            m,
            family,
            adversary: row.adversary,
            certificate: row.certificate,
            criterion: row.criterion,
            label: row.criterion.name().into(),
            threshold: row.threshold.value,
            threshold_source: row.threshold.source,
            provenance: row.threshold.provenance,
        })
        .collect())
}
