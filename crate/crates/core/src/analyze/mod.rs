//! Numerical verification of the characteristic-function properties, plus
//! per-component phase extraction and exploration of `C_n(f)`.

mod classic;
mod explore;
mod phase;

pub use classic::{classic_atoms, classic_pair, Atom, ClassicWhich};
pub use explore::{cn_upper_bound, explore_cn, Candidate};
pub use phase::{phase_profile, ComponentPhase, PhaseProfile, PhaseTolerances};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::Member;
use crate::error::{Error, Result};
use crate::quadrature::filon_inverse;
use crate::support::{Location, SupportSpec};

/// Default tolerance for the closed-form positive-definiteness check.
pub const PD_CLOSED_FORM_TOL: f64 = 1e-9;
/// Default tolerance for the quadrature positive-definiteness check.
pub const PD_QUADRATURE_TOL: f64 = 1e-6;
/// Support detection threshold relative to `max |f|`.
pub const ZERO_TOL_REL: f64 = 1e-9;
/// Minimum number of grid samples across the narrowest gap.
pub const MIN_GAP_SAMPLES: f64 = 8.0;

/// A sampled characteristic function on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CfGrid {
    abscissas: Vec<f64>,
    values: Vec<Complex64>,
}

impl CfGrid {
    pub fn new(abscissas: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if abscissas.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} abscissas but {} values",
                abscissas.len(),
                values.len()
            )));
        }
        if abscissas.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if abscissas.iter().any(|x| !x.is_finite())
            || values
                .iter()
                .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidGrid("non-finite entry".into()));
        }
        if abscissas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid(
                "abscissas must be strictly ascending".into(),
            ));
        }
        Ok(CfGrid { abscissas, values })
    }

    /// Samples `f` at `i·step` for `|i·step| <= halfwidth`; the grid is
    /// exactly symmetric.
    pub fn sample<F>(halfwidth: f64, step: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        if !(step > 0.0 && halfwidth >= 0.0 && step.is_finite() && halfwidth.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "step {step} and halfwidth {halfwidth} must be positive"
            )));
        }
        let m = (halfwidth / step + 1e-9).floor() as i64;
        if m > 50_000_000 {
            return Err(Error::InvalidGrid(format!(
                "{} points is too many",
                2 * m + 1
            )));
        }
        let abscissas: Vec<f64> = (-m..=m).map(|i| i as f64 * step).collect();
        let values = abscissas.par_iter().map(|&x| f(x)).collect();
        Self::new(abscissas, values)
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.abscissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.abscissas
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Same abscissas, new values.
    pub fn map_values<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> CfGrid {
        CfGrid {
            abscissas: self.abscissas.clone(),
            values: self.iter().map(|(x, v)| f(x, v)).collect(),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest spacing between consecutive abscissas.
    pub fn max_step(&self) -> f64 {
        self.abscissas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.abscissas.len();
        let scale = self.abscissas[n - 1]
            .abs()
            .max(self.abscissas[0].abs())
            .max(1.0);
        (0..n).all(|i| (self.abscissas[i] + self.abscissas[n - 1 - i]).abs() <= 1e-12 * scale)
    }

    fn same_abscissas(&self, other: &CfGrid) -> bool {
        self.len() == other.len()
            && self
                .abscissas
                .iter()
                .zip(&other.abscissas)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    /// `x,re,im` CSV with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 48);
        out.push_str("x,re,im\n");
        for (x, v) in self.iter() {
            let _ = writeln!(out, "{},{},{}", x, v.re, v.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "re", "im"] {
            return Err(Error::Parse(format!(
                "expected header x,re,im, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (row, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let field = |i: usize| -> Result<f64> {
                let s = rec.get(i).unwrap_or("");
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {line}: {s:?} is not a number")))
            };
            if rec.len() != 3 {
                return Err(Error::Parse(format!("line {line}: expected 3 fields")));
            }
            xs.push(field(0)?);
            vs.push(Complex64::new(field(1)?, field(2)?));
        }
        Self::new(xs, vs)
    }
}

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    pub measured: BTreeMap<String, f64>,
}

impl CheckReport {
    fn new(name: impl Into<String>, passed: bool, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            passed,
            tolerance,
            measured: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }
}

/// A batch of checks; passes iff every check passes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

impl VerificationReport {
    pub fn push(&mut self, check: CheckReport) {
        self.checks.push(check);
        self.all_passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
    }
}

/// `max |f(-x) - conj(f(x))| <= tol`.
pub fn check_hermitian(grid: &CfGrid, tol: f64) -> Result<CheckReport> {
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let n = grid.len();
    let worst = (0..n)
        .map(|i| (grid.values[n - 1 - i] - grid.values[i].conj()).norm())
        .fold(0.0, f64::max);
    Ok(CheckReport::new("hermitian", worst <= tol, tol).with("max_deviation", worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdMethod {
    /// Bracket trig polynomial times the kernel's inverse transform.
    ClosedForm,
    /// Linear-Filon quadrature of the sampled function.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdParams {
    /// The inverse transform is checked on `[-t_domain, t_domain]`.
    pub t_domain: f64,
    pub t_step: f64,
    /// Sampling step when a blueprint member is checked by quadrature.
    pub x_step: f64,
    /// Overrides the per-method default.
    pub tol: Option<f64>,
}

impl Default for PdParams {
    fn default() -> Self {
        PdParams {
            t_domain: 50.0,
            t_step: 0.05,
            x_step: 1e-3,
            tol: None,
        }
    }
}

impl PdParams {
    fn tol_for(&self, method: PdMethod) -> f64 {
        self.tol.unwrap_or(match method {
            PdMethod::ClosedForm => PD_CLOSED_FORM_TOL,
            PdMethod::Quadrature => PD_QUADRATURE_TOL,
        })
    }

    fn t_grid(&self) -> Result<Vec<f64>> {
        if !(self.t_step > 0.0 && self.t_domain >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_step {} and t_domain {} must be positive",
                self.t_step, self.t_domain
            )));
        }
        let m = (self.t_domain / self.t_step + 1e-9).floor() as i64;
        if m > 10_000_000 {
            return Err(Error::InvalidGrid("t grid too large".into()));
        }
        Ok((-m..=m).map(|i| i as f64 * self.t_step).collect())
    }
}

/// What to check for positive definiteness.
#[derive(Debug, Clone, Copy)]
pub enum PdTarget<'a, 'b> {
    Member(&'b Member<'a>),
    Grid(&'b CfGrid),
}

/// Inverse transform of the samples at `t`, using the linear-Filon rule.
pub fn quadrature_inverse(grid: &CfGrid, t: f64) -> Complex64 {
    filon_inverse(&grid.abscissas, &grid.values, t)
}

/// Minimum of the inverse transform over the t-grid; passes iff it is `>= -tol`
/// and the imaginary part stays within `tol`.
pub fn check_positive_definite(
    target: PdTarget<'_, '_>,
    method: PdMethod,
    params: &PdParams,
) -> Result<CheckReport> {
    let tol = params.tol_for(method);
    let ts = params.t_grid()?;
    let (min, argmin, max_imag) = match (target, method) {
        (PdTarget::Member(g), PdMethod::ClosedForm) => {
            let norm = g.blueprint().normalizer();
            let (m, at) = ts
                .par_iter()
                .map(|&t| (g.inverse_unnormalized(t) / norm, t))
                .reduce(|| (f64::INFINITY, 0.0), min_pair);
            (m, at, 0.0)
        }
        (PdTarget::Grid(_), PdMethod::ClosedForm) => {
            return Err(Error::InvalidGrid(
                "the closed-form check needs a blueprint member".into(),
            ))
        }
        (PdTarget::Member(g), PdMethod::Quadrature) => {
            let spec = g.blueprint().spec();
            if spec.has_half_infinite() {
                return Err(Error::UnboundedSupport);
            }
            let grid = CfGrid::sample(spec.finite_extent() + 1.0, params.x_step, |x| g.eval(x))?;
            quadrature_min(&grid, &ts)?
        }
        (PdTarget::Grid(grid), PdMethod::Quadrature) => quadrature_min(grid, &ts)?,
    };
    let name = match method {
        PdMethod::ClosedForm => "positive_definite_closed_form",
        PdMethod::Quadrature => "positive_definite_quadrature",
    };
    // A positive measure has a real inverse transform, so a non-negligible
    // imaginary part fails as well.
    let passed = min >= -tol && max_imag <= tol;
    Ok(CheckReport::new(name, passed, tol)
        .with("min_inverse", min)
        .with("argmin_t", argmin)
        .with("max_imag", max_imag))
}

fn min_pair(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if b.0 < a.0 {
        b
    } else {
        a
    }
}

fn quadrature_min(grid: &CfGrid, ts: &[f64]) -> Result<(f64, f64, f64)> {
    let scale = grid.max_modulus();
    let edge = grid.values[0]
        .norm()
        .max(grid.values[grid.len() - 1].norm());
    if edge > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::UnboundedSupport);
    }
    let (m, at, imag) = ts
        .par_iter()
        .map(|&t| {
            let v = quadrature_inverse(grid, t);
            (v.re, t, v.im.abs())
        })
        .reduce(
            || (f64::INFINITY, 0.0, 0.0),
            |a, b| {
                let (m, at) = min_pair((a.0, a.1), (b.0, b.1));
                (m, at, a.2.max(b.2))
            },
        );
    Ok((m, at, imag))
}

/// `max |g(x)^n - f(x)^n| <= tol`.
pub fn check_power_identity(f: &CfGrid, g: &CfGrid, n: u32, tol: f64) -> Result<CheckReport> {
    if !f.same_abscissas(g) {
        return Err(Error::GridMismatch);
    }
    let worst = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (b.powu(n) - a.powu(n)).norm())
        .fold(0.0, f64::max);
    Ok(CheckReport::new("power_identity", worst <= tol, tol)
        .with("n", n as f64)
        .with("max_deviation", worst))
}

/// Nonzero on the interior of every component, zero in every gap and beyond
/// the last component. `zero_tol` defaults to `1e-9·max|f|`.
pub fn check_support(
    grid: &CfGrid,
    spec: &SupportSpec,
    zero_tol: Option<f64>,
) -> Result<CheckReport> {
    let step = grid.max_step();
    let narrowest_gap = spec
        .gaps()
        .iter()
        .map(|g| g.len())
        .fold(f64::INFINITY, f64::min);
    if narrowest_gap.is_finite() && narrowest_gap < MIN_GAP_SAMPLES * step {
        return Err(Error::ResolutionTooCoarse(format!(
            "narrowest gap {narrowest_gap} needs a step of at most {}",
            narrowest_gap / MIN_GAP_SAMPLES
        )));
    }
    let zero_tol = zero_tol.unwrap_or(ZERO_TOL_REL * grid.max_modulus());
    let components = spec.components();
    let k = spec.k() as i32;
    let mut seen = vec![0usize; components.len()];
    let mut min_inside = f64::INFINITY;
    let mut max_outside = 0.0_f64;
    for (x, v) in grid.iter() {
        // Skip samples within half a step of an endpoint.
        let near_end = components
            .iter()
            .any(|e| (x - e.lo()).abs() < 0.5 * step || (x - e.hi()).abs() < 0.5 * step);
        if near_end {
            continue;
        }
        match spec.locate(x) {
            Location::Component(j) => {
                seen[(j + k) as usize] += 1;
                min_inside = min_inside.min(v.norm());
            }
            Location::Outside => max_outside = max_outside.max(v.norm()),
        }
    }
    if let Some(i) = seen.iter().position(|&c| c == 0) {
        return Err(Error::ResolutionTooCoarse(format!(
            "no interior sample in component {}",
            i as i32 - k
        )));
    }
    let passed = min_inside > zero_tol && max_outside <= zero_tol;
    Ok(CheckReport::new("support", passed, zero_tol)
        .with("min_inside", min_inside)
        .with("max_outside", max_outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::Blueprint;
    use crate::family::PhaseVector;

    fn two_bump() -> Blueprint {
        Blueprint::from_spec(&SupportSpec::validate(1.0, &[(2.0, 4.0)]).unwrap())
    }

    #[test]
    fn grid_construction_errors() {
        assert!(CfGrid::new(vec![0.0, 0.0], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(CfGrid::new(vec![0.0], vec![]).is_err());
        assert!(CfGrid::new(vec![], vec![]).is_err());
        assert!(CfGrid::new(vec![f64::NAN], vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(CfGrid::sample(1.0, 0.0, |_| Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let bp = two_bump();
        let g = bp.member(&PhaseVector::new(vec![1], 3).unwrap()).unwrap();
        let grid = CfGrid::sample(5.0, 0.01, |x| g.eval(x)).unwrap();
        let back = CfGrid::from_csv(&grid.to_csv()).unwrap();
        assert_eq!(back, grid);
    }

    #[test]
    fn csv_errors() {
        assert!(CfGrid::from_csv("x,y,z\n0,1,0\n").is_err());
        assert!(CfGrid::from_csv("x,re,im\n0,1\n").is_err());
        assert!(CfGrid::from_csv("x,re,im\n0,one,0\n").is_err());
        assert!(CfGrid::from_csv("x,re,im\n").is_err());
        assert!(CfGrid::from_csv("x,re,im\n1,0,0\n0,1,0\n").is_err());
    }

    #[test]
    fn hermitian_examples() {
        let bp = two_bump();
        let f = CfGrid::sample(5.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        assert!(check_hermitian(&f, 1e-12).unwrap().passed);

        let bad = CfGrid::new(
            vec![-1.0, 0.0, 1.0],
            vec![Complex64::i(), Complex64::new(1.0, 0.0), Complex64::i()],
        )
        .unwrap();
        assert!(!check_hermitian(&bad, 1e-12).unwrap().passed);

        let even = CfGrid::sample(3.0, 0.1, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert!(check_hermitian(&even, 0.0).unwrap().passed);

        let lopsided =
            CfGrid::new(vec![-1.0, 0.0, 2.0], vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        assert_eq!(check_hermitian(&lopsided, 1.0), Err(Error::AsymmetricGrid));
    }

    #[test]
    fn power_identity_examples() {
        let bp = two_bump();
        let f = CfGrid::sample(5.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        let g1 = bp.member(&PhaseVector::new(vec![1], 3).unwrap()).unwrap();
        let g = CfGrid::sample(5.0, 1e-3, |x| g1.eval(x)).unwrap();
        assert!(check_power_identity(&f, &g, 3, 1e-10).unwrap().passed);
        assert!(!check_power_identity(&f, &g, 2, 1e-10).unwrap().passed);
        assert!(!check_power_identity(&f, &g, 4, 1e-10).unwrap().passed);
        for n in 2..7 {
            assert!(check_power_identity(&f, &f, n, 0.0).unwrap().passed);
        }
        let short = CfGrid::sample(4.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        assert_eq!(
            check_power_identity(&f, &short, 3, 1.0),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn support_examples() {
        let s = SupportSpec::validate(1.0, &[(2.0, 4.0)]).unwrap();
        let bp = Blueprint::from_spec(&s);
        let f = CfGrid::sample(7.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        assert!(check_support(&f, &s, None).unwrap().passed);

        let fake = SupportSpec::validate(1.0, &[(2.0, 4.0), (5.0, 6.0)]).unwrap();
        assert!(!check_support(&f, &fake, None).unwrap().passed);

        let zero = f.map_values(|_, _| Complex64::new(0.0, 0.0));
        assert!(!check_support(&zero, &s, None).unwrap().passed);

        let coarse = CfGrid::sample(7.0, 0.2, |x| bp.eval_f(x)).unwrap();
        assert!(matches!(
            check_support(&coarse, &s, None),
            Err(Error::ResolutionTooCoarse(_))
        ));
        let narrow = CfGrid::sample(3.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        assert!(matches!(
            check_support(&narrow, &fake, None),
            Err(Error::ResolutionTooCoarse(_))
        ));
    }

    #[test]
    fn pd_closed_form_and_quadrature() {
        let bp = two_bump();
        let params = PdParams::default();
        for w in 0..3 {
            let g = bp.member(&PhaseVector::new(vec![w], 3).unwrap()).unwrap();
            let cf = check_positive_definite(PdTarget::Member(&g), PdMethod::ClosedForm, &params)
                .unwrap();
            assert!(cf.passed, "{cf:?}");
            assert!(cf.measured["min_inverse"] >= -1e-12);
            let q = check_positive_definite(PdTarget::Member(&g), PdMethod::Quadrature, &params)
                .unwrap();
            assert!(q.passed, "{q:?}");
        }
        let grid = CfGrid::sample(5.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        assert!(
            check_positive_definite(PdTarget::Grid(&grid), PdMethod::ClosedForm, &params).is_err()
        );
    }

    #[test]
    fn pd_rejects_broken_symmetry() {
        // rotate E_1 only, leave E_{-1} alone: no longer Hermitian
        let s = SupportSpec::validate(1.0, &[(2.0, 4.0)]).unwrap();
        let bp = Blueprint::from_spec(&s);
        let f = CfGrid::sample(5.0, 1e-3, |x| bp.eval_f(x)).unwrap();
        let rot = Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        let bad = f.map_values(|x, v| {
            if s.locate(x) == Location::Component(1) {
                v * rot
            } else {
                v
            }
        });
        let r = check_positive_definite(
            PdTarget::Grid(&bad),
            PdMethod::Quadrature,
            &PdParams::default(),
        )
        .unwrap();
        assert!(!r.passed, "{r:?}");
        // the real part stays positive here; the inverse transform is not real
        assert!(r.measured["min_inverse"] > 0.0);
        assert!(r.measured["max_imag"] > 1e-3);
    }

    #[test]
    fn pd_quadrature_needs_compact_samples() {
        let grid = CfGrid::sample(3.0, 1e-2, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert_eq!(
            check_positive_definite(
                PdTarget::Grid(&grid),
                PdMethod::Quadrature,
                &PdParams::default()
            ),
            Err(Error::UnboundedSupport)
        );
    }
}
