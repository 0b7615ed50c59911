//! The `n^k` members of a root family: enumeration, equivalence of phase
//! vectors, distinctness certificates and recovery of `ω` from samples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::Blueprint;
use crate::error::{Error, Result};

/// Default upper limit on `n^k` for enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Tolerance on `|g/f - e^{2πim/n}|` accepted by [`identify`].
pub const IDENTIFY_TOL: f64 = 1e-6;

/// `ω ∈ {0, …, n-1}^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhaseVector {
    entries: Vec<u32>,
    n: u32,
}

impl PhaseVector {
    pub fn new(entries: Vec<u32>, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(Error::PhaseOutOfRange {
                index,
                value: value as i64,
                n,
            });
        }
        Ok(PhaseVector { entries, n })
    }

    pub fn zero(k: usize, n: u32) -> Result<Self> {
        Self::new(vec![0; k], n)
    }

    /// Reduces an arbitrary integer vector modulo `n`.
    pub fn reduce(raw: &[i64], n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        let entries = raw.iter().map(|&v| v.rem_euclid(n as i64) as u32).collect();
        Ok(PhaseVector { entries, n })
    }

    /// Parses a comma-separated list such as `"1,2"`; the empty string is the
    /// `k = 0` vector.
    pub fn parse(text: &str, n: u32) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Self::new(Vec::new(), n);
        }
        let entries = text
            .split(',')
            .enumerate()
            .map(|(index, s)| {
                let s = s.trim();
                s.parse::<i64>()
                    .map_err(|_| {
                        Error::Parse(format!("phase entry {index}: {s:?} is not an integer"))
                    })
                    .and_then(|v| {
                        u32::try_from(v).map_err(|_| Error::PhaseOutOfRange { index, value: v, n })
                    })
            })
            .collect::<Result<Vec<u32>>>()?;
        Self::new(entries, n)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// Componentwise `n - ω_j mod n`.
    pub fn negate(&self) -> PhaseVector {
        PhaseVector {
            entries: self
                .entries
                .iter()
                .map(|&v| (self.n - v) % self.n)
                .collect(),
            n: self.n,
        }
    }

    /// Short tag for file names, e.g. `w1-2`.
    pub fn tag(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(u32::to_string).collect();
        format!("w{}", parts.join("-"))
    }
}

impl std::fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `n^k`, or an error when it exceeds `cap`.
pub fn family_size(n: u32, k: usize, cap: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    u32::try_from(k)
        .ok()
        .and_then(|k| (n as u64).checked_pow(k))
        .filter(|&size| size <= cap)
        .ok_or(Error::EnumerationOverflow { n, k, cap })
}

/// Lexicographic stream of all phase vectors in `{0..n-1}^k`.
#[derive(Debug, Clone)]
pub struct Enumeration {
    next: Option<Vec<u32>>,
    n: u32,
    remaining: u64,
}

impl Iterator for Enumeration {
    type Item = PhaseVector;

    fn next(&mut self) -> Option<PhaseVector> {
        let current = self.next.take()?;
        self.remaining -= 1;
        let mut succ = current.clone();
        let mut carried = true;
        for slot in succ.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(PhaseVector {
            entries: current,
            n: self.n,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Enumeration {}

pub fn enumerate(n: u32, k: usize, cap: u64) -> Result<Enumeration> {
    let size = family_size(n, k, cap)?;
    Ok(Enumeration {
        next: Some(vec![0; k]),
        n,
        remaining: size,
    })
}

/// Whether `omega - theta ∈ n·Z^k`.
pub fn equivalent(omega: &[i64], theta: &[i64], n: u32) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if omega.len() != theta.len() {
        return Err(Error::DimensionMismatch {
            expected: omega.len(),
            got: theta.len(),
        });
    }
    let n = n as i64;
    Ok(omega
        .iter()
        .zip(theta)
        .all(|(a, b)| a.rem_euclid(n) == b.rem_euclid(n)))
}

/// Probe abscissas for components `1..=k`: midpoints of finite components,
/// `a_k + 2·rho` for a half-infinite one.
pub fn probes(bp: &Blueprint) -> Vec<f64> {
    bp.spec()
        .positives()
        .iter()
        .map(|e| {
            if e.is_finite() {
                e.midpoint()
            } else {
                e.lo() + 2.0 * bp.rho()
            }
        })
        .collect()
}

fn lookup(samples: &[(f64, Complex64)], x: f64) -> Option<Complex64> {
    let tol = 1e-9 * x.abs().max(1.0);
    samples
        .iter()
        .find(|(px, _)| (px - x).abs() <= tol)
        .map(|&(_, v)| v)
}

/// Recovers `ω` from values of a family member at the probe points.
pub fn identify(bp: &Blueprint, n: u32, samples: &[(f64, Complex64)]) -> Result<PhaseVector> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let mut entries = Vec::with_capacity(bp.k());
    for x in probes(bp) {
        let g = lookup(samples, x).ok_or(Error::MissingProbe(x))?;
        let f = bp.eval_f(x);
        if !(f.norm() > 0.0) {
            return Err(Error::ProbeAtZero(x));
        }
        let ratio = g / f;
        let turns = ratio.arg() * n as f64 / (2.0 * PI);
        let m = (turns.round() as i64).rem_euclid(n as i64) as u32;
        let root = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        if !((ratio - root).norm() <= IDENTIFY_TOL) {
            return Err(Error::NotARoot {
                x,
                ratio: format!("{ratio}"),
                n,
                tol: IDENTIFY_TOL,
            });
        }
        entries.push(m);
    }
    PhaseVector::new(entries, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub omega: PhaseVector,
    /// `g_ω` at each probe, as `[re, im]`.
    pub probe_values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctnessCertificate {
    pub pairs_checked: u64,
    /// Minimum over pairs of the maximum probe difference.
    pub min_separation: f64,
    /// `min_j |f(probe_j)| · |1 - e^{2πi/n}|`.
    pub lower_bound: f64,
    pub all_distinct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub n: u32,
    pub k: usize,
    pub probes: Vec<f64>,
    pub members: Vec<MemberRecord>,
    pub certificate: DistinctnessCertificate,
}

/// Evaluates every member at the probes and checks all pairs for distinctness.
pub fn manifest(bp: &Blueprint, n: u32, cap: u64) -> Result<FamilyManifest> {
    let probes = probes(bp);
    let omegas: Vec<PhaseVector> = enumerate(n, bp.k(), cap)?.collect();
    let members = omegas
        .par_iter()
        .map(|omega| {
            let g = bp.member(omega)?;
            Ok(MemberRecord {
                omega: omega.clone(),
                probe_values: probes.iter().map(|&x| g.eval(x)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let count = members.len();
    let min_separation = (0..count)
        .into_par_iter()
        .map(|a| {
            let mut best = f64::INFINITY;
            for b in a + 1..count {
                let sep = members[a]
                    .probe_values
                    .iter()
                    .zip(&members[b].probe_values)
                    .map(|(u, v)| (u - v).norm())
                    .fold(0.0, f64::max);
                best = best.min(sep);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    let gap = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI / n as f64)).norm();
    let lower_bound = probes
        .iter()
        .map(|&x| bp.eval_f(x).norm() * gap)
        .fold(f64::INFINITY, f64::min);
    let pairs_checked = (count as u64) * (count as u64).saturating_sub(1) / 2;
    Ok(FamilyManifest {
        n,
        k: bp.k(),
        probes,
        members,
        certificate: DistinctnessCertificate {
            pairs_checked,
            min_separation,
            lower_bound,
            all_distinct: pairs_checked == 0 || min_separation > 0.0,
        },
    })
}
