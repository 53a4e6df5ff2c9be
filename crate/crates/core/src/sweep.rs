//! Peak-intensity and peak-angle sweeps over the number of photons Eve
//! manipulates.
//!
//! A sweep runs the protocol once per siphon total (split evenly across the
//! two legs) and records the larger eigenvalue of the received state and the
//! angle of its eigenvector. The delta family repeats this for several gaps
//! between Alice's and Eve's polarizations.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polarization::PolarizationAngle;
use crate::protocol::{angle_field, run_protocol, Bit, Decision, EveConfig, Mode, ProtocolConfig};
use crate::rng::{derive_seed, RNG_ALGORITHM};
use crate::tomography::TomographyConfig;

pub const SWEEP_CSV_HEADER: &str = "siphon_total,lambda_max,peak_angle_deg,purity,detected";

/// Gaps between Alice's and Eve's angles used for the combined figures.
pub const DEFAULT_DELTAS: [f64; 4] = [7.5, 15.0, 30.0, 60.0];

/// (preset, θ, φ) for the single-pair figures. Even figures plot intensity,
/// odd figures the angle; both come from the same sweep.
pub const FIGURE_PRESETS: [(&str, f64, f64); 8] = [
    ("fig4", 22.5, 30.0),
    ("fig5", 22.5, 30.0),
    ("fig6", 45.0, 60.0),
    ("fig7", 45.0, 60.0),
    ("fig8", 30.0, 60.0),
    ("fig9", 30.0, 60.0),
    ("fig10", 30.0, 90.0),
    ("fig11", 30.0, 90.0),
];

pub const PRESET_PHOTONS: u64 = 100;
pub const DELTA_FAMILY_THETA: f64 = 30.0;
pub const DELTA_FAMILY_PHOTONS: u64 = 200;
pub const DEFAULT_PHOTONS_PER_BASIS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub theta: PolarizationAngle,
    pub phi: PolarizationAngle,
    pub bob_bit: Bit,
    pub n_photons: u64,
    /// Total photons Eve manipulates, half on each leg.
    pub siphon_totals: Vec<u64>,
    pub mode: Mode,
    pub seed: u64,
    /// Tomography sample size per basis; sampled mode only.
    pub photons_per_basis: u64,
}

impl SweepSpec {
    pub fn exact(
        theta: PolarizationAngle,
        phi: PolarizationAngle,
        n_photons: u64,
        siphon_totals: Vec<u64>,
    ) -> Self {
        Self {
            theta,
            phi,
            bob_bit: Bit::Zero,
            n_photons,
            siphon_totals,
            mode: Mode::Exact,
            seed: 0,
            photons_per_basis: DEFAULT_PHOTONS_PER_BASIS,
        }
    }

    /// Shipped preset for one of the single-pair figures; `None` for unknown names.
    ///
    /// Totals run from 0 to `n/2` in steps of 2, covering Eve fractions up to one half.
    pub fn figure_preset(name: &str) -> Option<Self> {
        let &(_, theta, phi) = FIGURE_PRESETS.iter().find(|(n, _, _)| *n == name)?;
        Some(Self::exact(
            PolarizationAngle::new(theta).ok()?,
            PolarizationAngle::new(phi).ok()?,
            PRESET_PHOTONS,
            (0..=PRESET_PHOTONS / 2).step_by(2).collect(),
        ))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_photons == 0 {
            return Err(Error::InvalidConfig("n_photons must be positive".into()));
        }
        if let Some(&t) = self.siphon_totals.iter().find(|&&t| t % 2 != 0) {
            return Err(Error::InvalidConfig(format!(
                "siphon total {t} is odd; totals are split evenly across both stages"
            )));
        }
        if let Some(&t) = self.siphon_totals.iter().find(|&&t| t > self.n_photons) {
            return Err(Error::InvalidConfig(format!(
                "siphon total {t} exceeds {} photons",
                self.n_photons
            )));
        }
        if self.siphon_totals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "siphon totals must be strictly increasing".into(),
            ));
        }
        if self.mode == Mode::Sampled && self.photons_per_basis == 0 {
            return Err(Error::InvalidConfig(
                "photons_per_basis must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn point_config(&self, total: u64) -> ProtocolConfig {
        let base = match self.mode {
            Mode::Exact => ProtocolConfig::exact(self.n_photons, self.theta, self.bob_bit),
            Mode::Sampled => ProtocolConfig::sampled(
                self.n_photons,
                self.theta,
                self.bob_bit,
                TomographyConfig {
                    photons_per_basis: self.photons_per_basis,
                    seed: derive_seed(self.seed, total),
                    projection_mode: Default::default(),
                },
            ),
        };
        base.with_eve(EveConfig::replace(total / 2, total / 2, self.phi))
    }

    /// `key=value` sidecar describing the sweep.
    pub fn metadata(&self) -> String {
        let mut out = String::new();
        let totals: Vec<String> = self.siphon_totals.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "theta_deg={}", self.theta.degrees());
        let _ = writeln!(out, "phi_deg={}", self.phi.degrees());
        let _ = writeln!(out, "bob_bit={}", self.bob_bit.as_u8());
        let _ = writeln!(out, "n_photons={}", self.n_photons);
        let _ = writeln!(out, "siphon_totals={}", totals.join(","));
        let _ = writeln!(out, "siphon_split=total/2 at stage 1, total/2 at stage 2");
        let _ = writeln!(out, "mode={}", self.mode);
        let _ = writeln!(out, "seed={}", self.seed);
        if self.mode == Mode::Sampled {
            let _ = writeln!(out, "photons_per_basis={}", self.photons_per_basis);
        }
        let _ = writeln!(out, "rng={RNG_ALGORITHM}");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub siphon_total: u64,
    pub lambda_max: f64,
    pub peak_angle: Option<PolarizationAngle>,
    pub purity: f64,
    pub detected: bool,
}

impl SweepRecord {
    fn from_run(siphon_total: u64, config: &ProtocolConfig) -> Result<Self> {
        let out = run_protocol(config)?;
        Ok(Self {
            siphon_total,
            lambda_max: out.spectrum.lambda_max,
            peak_angle: out.spectrum.principal_angle,
            purity: out.purity_received,
            detected: out.decision == Decision::EveDetected,
        })
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.6},{},{:.6},{}",
            self.siphon_total,
            self.lambda_max,
            angle_field(self.peak_angle),
            self.purity,
            self.detected
        )
    }
}

/// One protocol run per siphon total, in `siphon_total` order.
pub fn sweep_siphon(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    spec.siphon_totals
        .par_iter()
        .map(|&total| SweepRecord::from_run(total, &spec.point_config(total)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaFamilyPoint {
    pub delta: PolarizationAngle,
    pub fraction: f64,
    pub record: SweepRecord,
}

/// Exact-mode table keyed by (delta, fraction), with `φ = θ + Δ`.
///
/// Each fraction must correspond to a whole number of photons out of
/// `n_photons`; Eve's share is split as evenly as possible across the legs.
pub fn sweep_delta_family(
    deltas: &[PolarizationAngle],
    base_theta: PolarizationAngle,
    fraction_grid: &[f64],
    n_photons: u64,
) -> Result<Vec<DeltaFamilyPoint>> {
    if deltas.is_empty() {
        return Err(Error::InvalidConfig("delta list is empty".into()));
    }
    let totals = fraction_grid
        .iter()
        .map(|&f| {
            if !(0.0..=0.5).contains(&f) {
                return Err(Error::InvalidConfig(format!(
                    "fraction {f} outside [0, 0.5]"
                )));
            }
            let exact = f * n_photons as f64;
            let total = exact.round();
            if (exact - total).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "fraction {f} is not a whole number of photons out of {n_photons}"
                )));
            }
            Ok((f, total as u64))
        })
        .collect::<Result<Vec<_>>>()?;

    let grid: Vec<(PolarizationAngle, f64, u64)> = deltas
        .iter()
        .flat_map(|&d| totals.iter().map(move |&(f, t)| (d, f, t)))
        .collect();
    grid.into_par_iter()
        .map(|(delta, fraction, total)| {
            let stage1 = total - total / 2;
            let config = ProtocolConfig::exact(n_photons, base_theta, Bit::Zero).with_eve(
                EveConfig::replace(stage1, total / 2, base_theta.rotated(delta)),
            );
            Ok(DeltaFamilyPoint {
                delta,
                fraction,
                record: SweepRecord::from_run(total, &config)?,
            })
        })
        .collect()
}

/// Fractions 0, 0.05, …, 0.5.
pub fn default_fraction_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 20.0).collect()
}

/// `½(1 + √(1 − 4f(1−f)·sin²Δ))`: the larger eigenvalue of a two-angle
/// mixture with weight `f` on the second angle.
pub fn closed_form_lambda_max(fraction: f64, delta: PolarizationAngle) -> f64 {
    let s = delta.radians().sin();
    let disc = (1.0 - 4.0 * fraction * (1.0 - fraction) * s * s).max(0.0);
    0.5 * (1.0 + disc.sqrt())
}

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    write_text(path, &records_to_csv(records))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
