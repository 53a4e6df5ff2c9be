//! One transmission of the intensity-and-state-aware ping-pong protocol.
//!
//! Alice sends `n` photons polarized at `θ`. Bob encodes his bit by rotating
//! the returning stream by 0° or 90°. Eve may siphon photons on either leg
//! and replace them with photons polarized at `φ`, which keeps the photon
//! count constant. Alice tracks the count at every stage and reconstructs the
//! received state, then compares it against her two hypotheses.

use std::fmt::{self, Write as _};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::polarization::{
    density_at, eigendecompose, ensemble_density, matrix_distance, purity, rotate_ensemble,
    DensityMatrix, PhotonEnsemble, PolarizationAngle, Spectrum,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::tomography::{reconstruct, simulate_counts_with, TomographyConfig};

pub const EXACT_EPSILON_DISTANCE: f64 = 1e-9;
pub const EXACT_EPSILON_PURITY: f64 = 1e-6;

pub const OUTCOME_CSV_HEADER: &str =
    "decision,purity,dist_h0,dist_h90,lambda_max,principal_angle_deg,sent,after_stage1,after_stage2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// Bob's rotation for this bit: 0° or 90°.
    pub fn rotation(self) -> PolarizationAngle {
        match self {
            Bit::Zero => PolarizationAngle::ZERO,
            Bit::One => PolarizationAngle::RIGHT,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::InvalidConfig(format!("bit must be 0 or 1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Proportional bookkeeping and noiseless state reconstruction.
    #[default]
    Exact,
    /// Random siphon selection and sampled tomography.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

/// Eve's siphon-and-inject attack.
///
/// On each leg Eve removes photons that still carry Alice's preparation and,
/// when `reinject` is set, puts back the same number polarized at
/// `injection_angle`. Her stage-1 injections travel on to Bob and are rotated
/// with everything else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveConfig {
    pub enabled: bool,
    pub siphon_stage1: u64,
    pub siphon_stage2: u64,
    pub injection_angle: PolarizationAngle,
    pub reinject: bool,
}

impl EveConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            siphon_stage1: 0,
            siphon_stage2: 0,
            injection_angle: PolarizationAngle::ZERO,
            reinject: true,
        }
    }

    pub fn replace(
        siphon_stage1: u64,
        siphon_stage2: u64,
        injection_angle: PolarizationAngle,
    ) -> Self {
        Self {
            enabled: true,
            siphon_stage1,
            siphon_stage2,
            injection_angle,
            reinject: true,
        }
    }

    /// Siphon without reinjection; visible to intensity tracking alone.
    pub fn siphon_only(siphon_stage1: u64, siphon_stage2: u64) -> Self {
        Self {
            reinject: false,
            ..Self::replace(siphon_stage1, siphon_stage2, PolarizationAngle::ZERO)
        }
    }
}

impl Default for EveConfig {
    fn default() -> Self {
        Self::disabled()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub n_photons: u64,
    pub alice_angle: PolarizationAngle,
    pub bob_bit: Bit,
    pub eve: EveConfig,
    pub mode: Mode,
    pub tomography: TomographyConfig,
    pub epsilon_distance: f64,
    pub epsilon_purity: f64,
}

/// Noise-floor threshold for sampled tomography: `max(floor, 6/√N)`.
pub fn sampled_threshold(photons_per_basis: u64, floor: f64) -> f64 {
    floor.max(6.0 / (photons_per_basis as f64).sqrt())
}

impl ProtocolConfig {
    pub fn exact(n_photons: u64, alice_angle: PolarizationAngle, bob_bit: Bit) -> Self {
        Self {
            n_photons,
            alice_angle,
            bob_bit,
            eve: EveConfig::disabled(),
            mode: Mode::Exact,
            tomography: TomographyConfig {
                photons_per_basis: 1,
                seed: 0,
                projection_mode: Default::default(),
            },
            epsilon_distance: EXACT_EPSILON_DISTANCE,
            epsilon_purity: EXACT_EPSILON_PURITY,
        }
    }

    pub fn sampled(
        n_photons: u64,
        alice_angle: PolarizationAngle,
        bob_bit: Bit,
        tomography: TomographyConfig,
    ) -> Self {
        let n = tomography.photons_per_basis;
        Self {
            mode: Mode::Sampled,
            tomography,
            epsilon_distance: sampled_threshold(n, 1e-9),
            epsilon_purity: sampled_threshold(n, 1e-6),
            ..Self::exact(n_photons, alice_angle, bob_bit)
        }
    }

    pub fn with_eve(mut self, eve: EveConfig) -> Self {
        self.eve = eve;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_photons == 0 {
            return Err(Error::InvalidConfig("n_photons must be positive".into()));
        }
        if self.epsilon_distance.is_nan() || self.epsilon_distance <= 0.0 {
            return Err(Error::InvalidConfig(
                "epsilon_distance must be positive".into(),
            ));
        }
        if !(self.epsilon_purity > 0.0 && self.epsilon_purity < 1.0) {
            return Err(Error::InvalidConfig(
                "epsilon_purity must lie in (0, 1)".into(),
            ));
        }
        if self.mode == Mode::Sampled {
            self.tomography.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Bit0,
    Bit1,
    EveDetected,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Bit0 => "Bit0",
            Decision::Bit1 => "Bit1",
            Decision::EveDetected => "EveDetected",
        })
    }
}

/// Photon counts Alice observes at each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageIntensities {
    pub sent: u64,
    pub after_stage1: u64,
    pub after_stage2: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub decision: Decision,
    pub rho_hypothesis_0: DensityMatrix,
    pub rho_hypothesis_90: DensityMatrix,
    pub rho_received: DensityMatrix,
    pub purity_received: f64,
    pub dist_to_h0: f64,
    pub dist_to_h90: f64,
    pub spectrum: Spectrum,
    pub stage_intensities: StageIntensities,
}

impl ProtocolOutcome {
    pub fn intensity_ok(&self) -> bool {
        intensity_check(&self.stage_intensities)
    }

    /// `key=value` lines, one field per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let i = &self.stage_intensities;
        let _ = writeln!(out, "decision={}", self.decision);
        let _ = writeln!(out, "purity={:.6}", self.purity_received);
        let _ = writeln!(out, "dist_h0={:.6}", self.dist_to_h0);
        let _ = writeln!(out, "dist_h90={:.6}", self.dist_to_h90);
        let _ = writeln!(out, "lambda_max={:.6}", self.spectrum.lambda_max);
        let _ = writeln!(out, "lambda_min={:.6}", self.spectrum.lambda_min);
        let _ = writeln!(
            out,
            "principal_angle_deg={}",
            angle_field(self.spectrum.principal_angle)
        );
        let _ = writeln!(out, "intensity_sent={}", i.sent);
        let _ = writeln!(out, "intensity_after_stage1={}", i.after_stage1);
        let _ = writeln!(out, "intensity_after_stage2={}", i.after_stage2);
        let _ = writeln!(out, "intensity_check={}", self.intensity_ok());
        let _ = writeln!(out, "rho_received={}", self.rho_received);
        let _ = writeln!(out, "rho_h0={}", self.rho_hypothesis_0);
        let _ = writeln!(out, "rho_h90={}", self.rho_hypothesis_90);
        out
    }

    pub fn to_csv_row(&self) -> String {
        let i = &self.stage_intensities;
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
            self.decision,
            self.purity_received,
            self.dist_to_h0,
            self.dist_to_h90,
            self.spectrum.lambda_max,
            angle_field(self.spectrum.principal_angle),
            i.sent,
            i.after_stage1,
            i.after_stage2
        )
    }
}

/// Empty string for an undefined angle, six decimals otherwise.
pub(crate) fn angle_field(angle: Option<PolarizationAngle>) -> String {
    angle
        .map(|a| format!("{:.6}", a.degrees()))
        .unwrap_or_default()
}

/// True iff every recorded stage count equals the number sent.
pub fn intensity_check(stages: &StageIntensities) -> bool {
    stages.sent == stages.after_stage1 && stages.after_stage1 == stages.after_stage2
}

/// Alice's decision from the state check alone.
pub fn decide(
    rho_received: &DensityMatrix,
    rho_h0: &DensityMatrix,
    rho_h90: &DensityMatrix,
    eps_dist: f64,
    eps_purity: f64,
) -> Decision {
    let d0 = matrix_distance(rho_received, rho_h0);
    let d90 = matrix_distance(rho_received, rho_h90);
    if purity(rho_received) < 1.0 - eps_purity || d0.min(d90) > eps_dist {
        Decision::EveDetected
    } else if d0 <= d90 {
        Decision::Bit0
    } else {
        Decision::Bit1
    }
}

/// Photon stream split by origin. Eve only siphons Alice-origin photons.
struct Stream {
    alice: PhotonEnsemble,
    injected: PhotonEnsemble,
}

impl Stream {
    fn total(&self) -> u64 {
        self.alice.total() + self.injected.total()
    }

    fn rotate(&mut self, delta: PolarizationAngle) {
        self.alice = rotate_ensemble(&self.alice, delta);
        self.injected = rotate_ensemble(&self.injected, delta);
    }

    fn combined(&self) -> PhotonEnsemble {
        self.alice
            .components()
            .iter()
            .chain(self.injected.components())
            .map(|c| (c.count, c.angle))
            .collect()
    }

    fn attack(
        &mut self,
        stage: u8,
        count: u64,
        eve: &EveConfig,
        rng: Option<&mut SimRng>,
    ) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let available = self.alice.total();
        if count > available {
            return Err(Error::SiphonExceedsAvailable {
                stage,
                requested: count,
                available,
            });
        }
        let removed = match rng {
            None => proportional_removal(&self.alice, count),
            Some(rng) => uniform_removal(&self.alice, count, rng),
        };
        self.alice = self
            .alice
            .components()
            .iter()
            .zip(removed)
            .map(|(c, r)| (c.count - r, c.angle))
            .collect();
        if eve.reinject {
            self.injected.push(count, eve.injection_angle);
        }
        Ok(())
    }
}

/// Largest-remainder split of `count` across components by weight.
fn proportional_removal(ensemble: &PhotonEnsemble, count: u64) -> Vec<u64> {
    let total = ensemble.total();
    let comps = ensemble.components();
    let mut taken: Vec<u64> = comps
        .iter()
        .map(|c| (c.count as u128 * count as u128 / total as u128) as u64)
        .collect();
    let mut remainders: Vec<(u128, usize)> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.count as u128 * count as u128) % total as u128, i))
        .collect();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = count - taken.iter().sum::<u64>();
    for (_, i) in remainders {
        if left == 0 {
            break;
        }
        if taken[i] < comps[i].count {
            taken[i] += 1;
            left -= 1;
        }
    }
    taken
}

/// Picks `count` photons uniformly without replacement; returns per-component tallies.
fn uniform_removal(ensemble: &PhotonEnsemble, count: u64, rng: &mut SimRng) -> Vec<u64> {
    let comps = ensemble.components();
    let bounds: Vec<u64> = comps
        .iter()
        .scan(0u64, |acc, c| {
            *acc += c.count;
            Some(*acc)
        })
        .collect();
    let mut taken = vec![0u64; comps.len()];
    for photon in index::sample(rng, ensemble.total() as usize, count as usize) {
        let slot = bounds.partition_point(|&b| b <= photon as u64);
        taken[slot] += 1;
    }
    taken
}

/// Runs one transmission and returns Alice's decision with diagnostics.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolOutcome> {
    config.validate()?;

    let rho_h0 = density_at(config.alice_angle);
    let rho_h90 = density_at(config.alice_angle.rotated(PolarizationAngle::RIGHT));

    let mut siphon_rng = match config.mode {
        Mode::Exact => None,
        Mode::Sampled => Some(rng_from_seed(derive_seed(config.tomography.seed, 1))),
    };

    let mut stream = Stream {
        alice: PhotonEnsemble::single(config.n_photons, config.alice_angle),
        injected: PhotonEnsemble::default(),
    };
    let sent = stream.total();
    let eve = &config.eve;

    if eve.enabled {
        stream.attack(1, eve.siphon_stage1, eve, siphon_rng.as_mut())?;
    }
    let after_stage1 = stream.total();

    stream.rotate(config.bob_bit.rotation());

    if eve.enabled {
        stream.attack(2, eve.siphon_stage2, eve, siphon_rng.as_mut())?;
    }
    let after_stage2 = stream.total();

    let true_state = ensemble_density(&stream.combined())?;
    let rho_received = match config.mode {
        Mode::Exact => true_state,
        Mode::Sampled => {
            let mut rng = rng_from_seed(derive_seed(config.tomography.seed, 2));
            let counts =
                simulate_counts_with(&true_state, config.tomography.photons_per_basis, &mut rng);
            reconstruct(&counts)?
        }
    };

    let stage_intensities = StageIntensities {
        sent,
        after_stage1,
        after_stage2,
    };
    let state_decision = decide(
        &rho_received,
        &rho_h0,
        &rho_h90,
        config.epsilon_distance,
        config.epsilon_purity,
    );
    let decision = if intensity_check(&stage_intensities) {
        state_decision
    } else {
        Decision::EveDetected
    };

    Ok(ProtocolOutcome {
        decision,
        rho_hypothesis_0: rho_h0,
        rho_hypothesis_90: rho_h90,
        purity_received: purity(&rho_received),
        dist_to_h0: matrix_distance(&rho_received, &rho_h0),
        dist_to_h90: matrix_distance(&rho_received, &rho_h90),
        spectrum: eigendecompose(&rho_received),
        rho_received,
        stage_intensities,
    })
}
