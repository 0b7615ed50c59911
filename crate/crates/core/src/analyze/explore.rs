use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{check_positive_definite, CfGrid, PdMethod, PdParams, PdTarget};
use crate::error::Result;
use crate::family::{enumerate, PhaseVector};
use crate::support::{Location, SupportSpec};

/// `n^k` for a support with `2k + 1` components.
pub fn cn_upper_bound(spec: &SupportSpec, n: u32) -> Result<u64> {
    crate::family::family_size(n, spec.k(), u64::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// `m_j` for components `1..=k`.
    pub roots: PhaseVector,
    pub min_inverse: f64,
    pub max_imag: f64,
    pub pd_pass: bool,
}

/// Every way of rotating `f` by an `n`-th root of unity on each positive
/// component (conjugate on its mirror), filtered by the quadrature
/// positive-definiteness check. The passing candidates are the members of
/// `C_n(f)` that keep the support's component structure.
pub fn explore_cn(
    f: &CfGrid,
    spec: &SupportSpec,
    n: u32,
    params: &PdParams,
    cap: u64,
) -> Result<Vec<Candidate>> {
    let locations: Vec<Location> = f.abscissas().iter().map(|&x| spec.locate(x)).collect();
    let omegas: Vec<PhaseVector> = enumerate(n, spec.k(), cap)?.collect();
    omegas
        .into_par_iter()
        .map(|roots| {
            let phasors: Vec<Complex64> = roots
                .entries()
                .iter()
                .map(|&m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
                .collect();
            let values = f
                .values()
                .iter()
                .zip(&locations)
                .map(|(&v, loc)| match *loc {
                    Location::Component(j) if j > 0 => v * phasors[(j - 1) as usize],
                    Location::Component(j) if j < 0 => v * phasors[(-j - 1) as usize].conj(),
                    _ => v,
                })
                .collect();
            let candidate = CfGrid::new(f.abscissas().to_vec(), values)?;
            let report =
                check_positive_definite(PdTarget::Grid(&candidate), PdMethod::Quadrature, params)?;
            Ok(Candidate {
                roots,
                min_inverse: report.measured["min_inverse"],
                max_imag: report.measured["max_imag"],
                pd_pass: report.passed,
            })
        })
        .collect()
}
