use num_complex::Complex64;

use super::angle::PolarizationAngle;
use super::density::DensityMatrix;
use crate::error::{Error, Result};

/// A group of identically polarized photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub count: u64,
    pub angle: PolarizationAngle,
}

/// Weighted collection of linear-polarization components.
///
/// Weights are `count / total`; components are kept in insertion order and
/// never merged, so the ensemble doubles as a record of who injected what.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonEnsemble {
    components: Vec<Component>,
}

impl PhotonEnsemble {
    pub fn new(components: Vec<Component>) -> Self {
        Self { components }
    }

    pub fn single(count: u64, angle: PolarizationAngle) -> Self {
        Self::new(vec![Component { count, angle }])
    }

    pub fn push(&mut self, count: u64, angle: PolarizationAngle) {
        self.components.push(Component { count, angle });
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn total(&self) -> u64 {
        self.components.iter().map(|c| c.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }
}

impl FromIterator<(u64, PolarizationAngle)> for PhotonEnsemble {
    fn from_iter<I: IntoIterator<Item = (u64, PolarizationAngle)>>(iter: I) -> Self {
        Self::new(
            iter.into_iter()
                .map(|(count, angle)| Component { count, angle })
                .collect(),
        )
    }
}

/// `ρ = Σᵢ pᵢ |ψᵢ⟩⟨ψᵢ|` with `pᵢ = countᵢ / total`.
pub fn ensemble_density(ensemble: &PhotonEnsemble) -> Result<DensityMatrix> {
    let total = ensemble.total();
    if total == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
    for c in ensemble.components.iter().filter(|c| c.count > 0) {
        let (s, co) = c.angle.radians().sin_cos();
        let n = c.count as f64;
        a += n * co * co;
        b += n * co * s;
        d += n * s * s;
    }
    let t = total as f64;
    let (a, b, d) = (a / t, b / t, d / t);
    // cos² + sin² rounding can leave the trace off by an ulp or two
    let tr = a + d;
    DensityMatrix::new([
        [Complex64::new(a / tr, 0.0), Complex64::new(b / tr, 0.0)],
        [Complex64::new(b / tr, 0.0), Complex64::new(d / tr, 0.0)],
    ])
}

/// Rotates every component by `delta`; counts are unchanged.
pub fn rotate_ensemble(ensemble: &PhotonEnsemble, delta: PolarizationAngle) -> PhotonEnsemble {
    ensemble
        .components
        .iter()
        .map(|c| (c.count, c.angle.rotated(delta)))
        .collect()
}
