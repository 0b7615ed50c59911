use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::CfGrid;
use crate::error::{Error, Result};
use crate::support::{Location, SupportSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTolerances {
    /// Allowed `||g| - |f||`, relative to `max |f|`.
    pub modulus: f64,
    /// Allowed `max |g/f - lambda_j|` on a component.
    pub residual: f64,
    /// Samples with `|f| <= zero_rel·max|f|` are ignored.
    pub zero_rel: f64,
}

impl Default for PhaseTolerances {
    fn default() -> Self {
        PhaseTolerances {
            modulus: 1e-9,
            residual: 1e-8,
            zero_rel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentPhase {
    /// Component index in `-k..=k`.
    pub index: i32,
    /// Unit constant with `g = lambda·f` on the component, as `[re, im]`.
    pub lambda: Complex64,
    pub residual: f64,
    pub samples: usize,
}

/// Per-component unimodular constants relating two characteristic functions
/// with equal modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub components: Vec<ComponentPhase>,
    /// `|lambda_0 - 1|`.
    pub lambda0_deviation: f64,
    /// `max_j |lambda_{-j} - conj(lambda_j)|`.
    pub conjugate_deviation: f64,
}

impl PhaseProfile {
    pub fn k(&self) -> usize {
        self.components.len() / 2
    }

    pub fn lambda(&self, j: i32) -> Complex64 {
        self.components[(j + self.k() as i32) as usize].lambda
    }

    pub fn max_residual(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    /// `m_j` with `lambda_j = e^{2πi m_j/n}` for `j = 1..=k`, if every
    /// constant is within `tol` of an `n`-th root of unity.
    pub fn roots(&self, n: u32, tol: f64) -> Option<Vec<u32>> {
        (1..=self.k() as i32)
            .map(|j| {
                let lambda = self.lambda(j);
                let turns = lambda.arg() * n as f64 / (2.0 * PI);
                let m = (turns.round() as i64).rem_euclid(n as i64) as u32;
                let root = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
                ((lambda - root).norm() <= tol).then_some(m)
            })
            .collect()
    }
}

/// Extracts `lambda_j = g/f` per component as the circular mean of the unit
/// ratios, with the maximum deviation from it as residual.
pub fn phase_profile(
    f: &CfGrid,
    g: &CfGrid,
    spec: &SupportSpec,
    tol: &PhaseTolerances,
) -> Result<PhaseProfile> {
    if !f.same_abscissas(g) {
        return Err(Error::GridMismatch);
    }
    let scale = f.max_modulus();
    let zero = tol.zero_rel * scale;
    let k = spec.k() as i32;
    let slots = (2 * k + 1) as usize;
    let mut sums = vec![Complex64::new(0.0, 0.0); slots];
    let mut members: Vec<Vec<Complex64>> = vec![Vec::new(); slots];

    for ((x, fv), gv) in f.iter().zip(g.values()) {
        let Location::Component(j) = spec.locate(x) else {
            continue;
        };
        let deviation = (gv.norm() - fv.norm()).abs();
        if deviation > tol.modulus * scale {
            return Err(Error::ModulusMismatch { x, deviation });
        }
        if fv.norm() <= zero {
            continue;
        }
        let h = gv / fv;
        let slot = (j + k) as usize;
        sums[slot] += h / h.norm();
        members[slot].push(h);
    }

    let mut components = Vec::with_capacity(slots);
    for (slot, (sum, ratios)) in sums.iter().zip(&members).enumerate() {
        let index = slot as i32 - k;
        if ratios.is_empty() {
            return Err(Error::ResolutionTooCoarse(format!(
                "no sample with f != 0 in component {index}"
            )));
        }
        let lambda = sum / sum.norm();
        let residual = ratios
            .iter()
            .map(|h| (h - lambda).norm())
            .fold(0.0, f64::max);
        if residual > tol.residual {
            return Err(Error::NonConstantRatio {
                component: index,
                residual,
            });
        }
        components.push(ComponentPhase {
            index,
            lambda,
            residual,
            samples: ratios.len(),
        });
    }
    let lambda = |j: i32| components[(j + k) as usize].lambda;
    let lambda0_deviation = (lambda(0) - 1.0).norm();
    let conjugate_deviation = (1..=k)
        .map(|j| (lambda(-j) - lambda(j).conj()).norm())
        .fold(0.0, f64::max);
    Ok(PhaseProfile {
        components,
        lambda0_deviation,
        conjugate_deviation,
    })
}
