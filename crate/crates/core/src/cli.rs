//! `isa-sim` command line: protocol runs, sweeps and tomography demos.
//!
//! Exit codes: 0 on success (including `decision=EveDetected`), 1 on a
//! domain error, 2 on invalid flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::polarization::{
    eigendecompose, ensemble_density, purity, PhotonEnsemble, PolarizationAngle,
};
use crate::protocol::{run_protocol, Bit, EveConfig, Mode, ProtocolConfig, OUTCOME_CSV_HEADER};
use crate::rng::RNG_ALGORITHM;
use crate::sweep::{
    default_fraction_grid, records_to_csv, sweep_delta_family, sweep_siphon, write_text,
    SweepRecord, SweepSpec, DEFAULT_DELTAS, DEFAULT_PHOTONS_PER_BASIS, DELTA_FAMILY_PHOTONS,
    DELTA_FAMILY_THETA,
};
use crate::tomography::{reconstruct, simulate_counts, stokes_estimate, TomographyConfig};

/// Revision of the output formats written by this tool.
pub const FORMAT_REVISION: &str = "1";

#[derive(Debug, Parser)]
#[command(
    name = "isa-sim",
    version,
    about = "Intensity-and-state-aware quantum cryptography simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol transmission and print Alice's decision.
    Protocol(ProtocolArgs),
    /// Sweep peak intensity and angle against photons manipulated by Eve.
    Sweep(SweepArgs),
    /// Simulate tomography of a polarization ensemble.
    Tomography(TomographyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Sampled => Mode::Sampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
    DeltaFamily,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
            Preset::Fig12 => "fig12",
            Preset::Fig13 => "fig13",
            Preset::DeltaFamily => "delta-family",
        }
    }
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Alice's polarization angle in degrees.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: PolarizationAngle,
    /// Bob's bit: 0 (no rotation) or 1 (90° rotation).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub bit: u8,
    /// Number of photons Alice sends.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub photons: u64,
    /// Photons Eve siphons on the Alice→Bob leg (defaults to --eve-siphon2).
    #[arg(long, requires = "eve_angle")]
    pub eve_siphon1: Option<u64>,
    /// Photons Eve siphons on the Bob→Alice leg (defaults to --eve-siphon1).
    #[arg(long, requires = "eve_angle")]
    pub eve_siphon2: Option<u64>,
    /// Polarization of Eve's injected photons in degrees.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub eve_angle: Option<PolarizationAngle>,
    /// Eve siphons without putting photons back.
    #[arg(long, requires = "eve_angle")]
    pub eve_no_reinject: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tomography photons per basis (sampled mode).
    #[arg(long, default_value_t = DEFAULT_PHOTONS_PER_BASIS, value_parser = clap::value_parser!(u64).range(1..))]
    pub photons_per_basis: u64,
    /// Write the outcome CSV row here, plus a `.manifest` file alongside.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "theta"])))]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Alice's angle in degrees (explicit sweep).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, requires_all = ["phi", "totals"])]
    pub theta: Option<PolarizationAngle>,
    /// Eve's injection angle in degrees (explicit sweep).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, requires = "theta")]
    pub phi: Option<PolarizationAngle>,
    /// Comma-separated even siphon totals (explicit sweep).
    #[arg(long, value_delimiter = ',', requires = "theta")]
    pub totals: Option<Vec<u64>>,
    /// Photons per transmission (explicit sweep).
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "preset")]
    pub photons: u64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1), conflicts_with = "preset")]
    pub bit: u8,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PHOTONS_PER_BASIS, value_parser = clap::value_parser!(u64).range(1..))]
    pub photons_per_basis: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("state").required(true).args(["theta", "mix"])))]
pub struct TomographyArgs {
    /// Pure linear polarization in degrees.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<PolarizationAngle>,
    /// Mixture as `count@deg,count@deg,...`.
    #[arg(long, value_parser = parse_mix)]
    pub mix: Option<Mixture>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub photons_per_basis: u64,
    #[arg(long)]
    pub seed: u64,
    /// Write the counts CSV here, plus a `.manifest` file alongside.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixture(pub Vec<(u64, PolarizationAngle)>);

fn parse_angle(s: &str) -> std::result::Result<PolarizationAngle, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    PolarizationAngle::new(v).map_err(|e| e.to_string())
}

fn parse_mix(s: &str) -> std::result::Result<Mixture, String> {
    let parts = s
        .split(',')
        .map(|item| {
            let (count, angle) = item
                .split_once('@')
                .ok_or_else(|| format!("`{item}` is not of the form count@deg"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| format!("`{count}` is not a photon count"))?;
            Ok((count, parse_angle(angle)?))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    if parts.iter().map(|p| p.0).sum::<u64>() == 0 {
        return Err("mixture has no photons".into());
    }
    Ok(Mixture(parts))
}

/// Record of one CLI invocation, written as flat `key=value` text.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub params: Vec<(String, String)>,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_revision={FORMAT_REVISION}");
        let _ = writeln!(out, "tool=isa-sim {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "subcommand={}", self.subcommand);
        for (k, v) in &self.params {
            let _ = writeln!(out, "param.{k}={v}");
        }
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "rng={RNG_ALGORITHM}");
        for (i, p) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "output.{i}={}", p.display());
        }
        let _ = writeln!(out, "wall_clock_seconds={:.6}", self.wall_clock_seconds);
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Protocol(a) => cmd_protocol(&a, stdout),
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Tomography(a) => cmd_tomography(&a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

pub fn cmd_protocol(a: &ProtocolArgs, stdout: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let bit = Bit::try_from(a.bit)?;
    let mode = Mode::from(a.mode);
    let mut config = match mode {
        Mode::Exact => ProtocolConfig::exact(a.photons, a.theta, bit),
        Mode::Sampled => ProtocolConfig::sampled(
            a.photons,
            a.theta,
            bit,
            TomographyConfig::new(a.photons_per_basis, a.seed)?,
        ),
    };
    if let Some(angle) = a.eve_angle {
        let s1 = a.eve_siphon1.or(a.eve_siphon2).unwrap_or(0);
        let s2 = a.eve_siphon2.or(a.eve_siphon1).unwrap_or(0);
        let mut eve = EveConfig::replace(s1, s2, angle);
        eve.reinject = !a.eve_no_reinject;
        config = config.with_eve(eve);
    }
    let outcome = run_protocol(&config)?;
    emit(stdout, &outcome.to_key_value())?;

    if let Some(path) = &a.out {
        write_text(
            path,
            &format!("{OUTCOME_CSV_HEADER}\n{}\n", outcome.to_csv_row()),
        )?;
        let eve = &config.eve;
        let mut params = vec![
            ("theta_deg".to_string(), a.theta.degrees().to_string()),
            ("bit".into(), a.bit.to_string()),
            ("photons".into(), a.photons.to_string()),
            ("mode".into(), mode.to_string()),
            ("eve_enabled".into(), eve.enabled.to_string()),
        ];
        if eve.enabled {
            params.push(("eve_siphon1".into(), eve.siphon_stage1.to_string()));
            params.push(("eve_siphon2".into(), eve.siphon_stage2.to_string()));
            params.push((
                "eve_angle_deg".into(),
                eve.injection_angle.degrees().to_string(),
            ));
            params.push(("eve_reinject".into(), eve.reinject.to_string()));
        }
        if mode == Mode::Sampled {
            params.push(("photons_per_basis".into(), a.photons_per_basis.to_string()));
        }
        RunManifest {
            subcommand: "protocol",
            params,
            seed: a.seed,
            outputs: vec![path.clone()],
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        }
        .write(&manifest_path(path))?;
    }
    Ok(())
}

fn summarize(label: &str, records: &[SweepRecord], file: &Path) -> String {
    let first = records.first().map(|r| r.lambda_max).unwrap_or(f64::NAN);
    let last = records.last().map(|r| r.lambda_max).unwrap_or(f64::NAN);
    format!(
        "{label}: points={} lambda_max {first:.6} -> {last:.6} file={}\n",
        records.len(),
        file.display()
    )
}

pub fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    fs::create_dir_all(&a.out).map_err(|source| Error::Io {
        path: a.out.clone(),
        source,
    })?;
    let mode = Mode::from(a.mode);
    let mut outputs = Vec::new();
    let mut params = vec![("mode".to_string(), mode.to_string())];

    // (file stem, spec) pairs to run through sweep_siphon
    let mut sweeps: Vec<(String, SweepSpec)> = Vec::new();

    match a.preset {
        Some(p @ (Preset::Fig12 | Preset::Fig13 | Preset::DeltaFamily)) => {
            params.push(("preset".into(), p.name().into()));
            let theta = PolarizationAngle::new(DELTA_FAMILY_THETA)?;
            let deltas = DEFAULT_DELTAS
                .iter()
                .map(|&d| PolarizationAngle::new(d))
                .collect::<Result<Vec<_>>>()?;
            if mode == Mode::Exact {
                let points = sweep_delta_family(
                    &deltas,
                    theta,
                    &default_fraction_grid(),
                    DELTA_FAMILY_PHOTONS,
                )?;
                for delta in &deltas {
                    let records: Vec<SweepRecord> = points
                        .iter()
                        .filter(|p| p.delta == *delta)
                        .map(|p| p.record)
                        .collect();
                    let stem = format!("{}-delta-{}", p.name(), delta.degrees());
                    let spec = SweepSpec {
                        seed: a.seed,
                        ..SweepSpec::exact(
                            theta,
                            theta.rotated(*delta),
                            DELTA_FAMILY_PHOTONS,
                            records.iter().map(|r| r.siphon_total).collect(),
                        )
                    };
                    write_sweep(&a.out, &stem, &spec, &records, stdout, &mut outputs)?;
                }
            } else {
                for delta in &deltas {
                    let totals = default_fraction_grid()
                        .iter()
                        .map(|f| (f * DELTA_FAMILY_PHOTONS as f64).round() as u64)
                        .collect();
                    let spec = SweepSpec {
                        mode,
                        seed: a.seed,
                        photons_per_basis: a.photons_per_basis,
                        ..SweepSpec::exact(
                            theta,
                            theta.rotated(*delta),
                            DELTA_FAMILY_PHOTONS,
                            totals,
                        )
                    };
                    sweeps.push((format!("{}-delta-{}", p.name(), delta.degrees()), spec));
                }
            }
        }
        Some(p) => {
            params.push(("preset".into(), p.name().into()));
            let base = SweepSpec::figure_preset(p.name())
                .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {}", p.name())))?;
            sweeps.push((
                p.name().to_string(),
                SweepSpec {
                    mode,
                    seed: a.seed,
                    photons_per_basis: a.photons_per_basis,
                    ..base
                },
            ));
        }
        None => {
            let (Some(theta), Some(phi), Some(totals)) = (a.theta, a.phi, a.totals.clone()) else {
                return Err(Error::InvalidConfig(
                    "--theta, --phi and --totals are required together".into(),
                ));
            };
            let spec = SweepSpec {
                bob_bit: Bit::try_from(a.bit)?,
                mode,
                seed: a.seed,
                photons_per_basis: a.photons_per_basis,
                ..SweepSpec::exact(theta, phi, a.photons, totals)
            };
            sweeps.push(("sweep".to_string(), spec));
        }
    }

    for (stem, spec) in &sweeps {
        let records = sweep_siphon(spec)?;
        write_sweep(&a.out, stem, spec, &records, stdout, &mut outputs)?;
    }

    if let (Some(theta), Some(phi)) = (a.theta, a.phi) {
        params.push(("theta_deg".into(), theta.degrees().to_string()));
        params.push(("phi_deg".into(), phi.degrees().to_string()));
        params.push(("photons".into(), a.photons.to_string()));
        params.push(("bit".into(), a.bit.to_string()));
    }
    if let Some(totals) = &a.totals {
        let t: Vec<String> = totals.iter().map(u64::to_string).collect();
        params.push(("totals".into(), t.join(",")));
    }
    if mode == Mode::Sampled {
        params.push(("photons_per_basis".into(), a.photons_per_basis.to_string()));
    }
    RunManifest {
        subcommand: "sweep",
        params,
        seed: a.seed,
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    }
    .write(&a.out.join("manifest.txt"))
}

fn write_sweep(
    dir: &Path,
    stem: &str,
    spec: &SweepSpec,
    records: &[SweepRecord],
    stdout: &mut dyn Write,
    outputs: &mut Vec<PathBuf>,
) -> Result<()> {
    let csv = dir.join(format!("{stem}.csv"));
    let meta = dir.join(format!("{stem}.meta"));
    write_text(&csv, &records_to_csv(records))?;
    write_text(&meta, &spec.metadata())?;
    emit(stdout, &summarize(stem, records, &csv))?;
    outputs.push(csv);
    outputs.push(meta);
    Ok(())
}

pub fn cmd_tomography(a: &TomographyArgs, stdout: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let ensemble: PhotonEnsemble = match (&a.mix, a.theta) {
        (Some(Mixture(parts)), _) => parts.iter().copied().collect(),
        (None, Some(theta)) => PhotonEnsemble::single(1, theta),
        (None, None) => return Err(Error::InvalidConfig("--theta or --mix is required".into())),
    };
    let rho_true = ensemble_density(&ensemble)?;
    let config = TomographyConfig::new(a.photons_per_basis, a.seed)?;
    let counts = simulate_counts(&rho_true, &config);
    let stokes = stokes_estimate(&counts)?;
    let rho = reconstruct(&counts)?;
    let spectrum = eigendecompose(&rho);

    let mut out = String::new();
    let _ = writeln!(out, "n_h={}", counts.n_h);
    let _ = writeln!(out, "n_v={}", counts.n_v);
    let _ = writeln!(out, "n_d={}", counts.n_d);
    let _ = writeln!(out, "n_a={}", counts.n_a);
    let _ = writeln!(out, "n_r={}", counts.n_r);
    let _ = writeln!(out, "n_l={}", counts.n_l);
    let _ = writeln!(
        out,
        "stokes={:.6},{:.6},{:.6},{:.6}",
        stokes.s0, stokes.s1, stokes.s2, stokes.s3
    );
    let _ = writeln!(out, "rho={rho}");
    let _ = writeln!(out, "purity={:.6}", purity(&rho));
    let _ = writeln!(out, "lambda_max={:.6}", spectrum.lambda_max);
    let _ = writeln!(out, "lambda_min={:.6}", spectrum.lambda_min);
    let _ = writeln!(
        out,
        "principal_angle_deg={}",
        crate::protocol::angle_field(spectrum.principal_angle)
    );
    let _ = writeln!(out, "rng={RNG_ALGORITHM}");
    emit(stdout, &out)?;

    if let Some(path) = &a.out {
        counts.write_csv(path)?;
        let state = match (&a.mix, a.theta) {
            (Some(Mixture(parts)), _) => parts
                .iter()
                .map(|(n, ang)| format!("{n}@{}", ang.degrees()))
                .collect::<Vec<_>>()
                .join(","),
            (None, Some(theta)) => format!("1@{}", theta.degrees()),
            _ => String::new(),
        };
        RunManifest {
            subcommand: "tomography",
            params: vec![
                ("mix".into(), state),
                ("photons_per_basis".into(), a.photons_per_basis.to_string()),
            ],
            seed: a.seed,
            outputs: vec![path.clone()],
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        }
        .write(&manifest_path(path))?;
    }
    Ok(())
}
