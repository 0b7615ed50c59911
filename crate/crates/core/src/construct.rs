//! The explicit construction: translates of the seed kernel fill every
//! support component, weighted so the inverse transform is a nonnegative
//! trigonometric polynomial times the kernel's inverse transform.
//!
//! With knots `τ_{j,p}` and weights `w_{j,p}` per positive-side component
//! `j = 0..=k`, the base function is
//!
//! ```text
//! F(x) = φ(x) + Σ_j α_j (F_j(x) + F_j(-x)),    F_j(x) = Σ_p w_{j,p} φ(x - τ_{j,p})
//! ```
//!
//! and each twisted member multiplies the `F_j(x)` term by `e^{iθ_j}` and the
//! `F_j(-x)` term by `e^{-iθ_j}`, `θ_j = 2π ω_j / n` (`θ_0 = 0`). On every
//! component the twisted function is a unimodular constant times `F`, so all
//! members share `F^n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::PhaseVector;
use crate::kernel::{Kernel, KernelShape, SeedKernel};
use crate::support::SupportSpec;

/// Upper limit on the total number of finite knots a plan may hold.
pub const MAX_KNOTS: usize = 10_000_000;

/// Absolute error budget for the truncated geometric series in the inverse
/// transform of a half-infinite component.
pub const SERIES_TOL: f64 = 1e-12;

/// Knots of one positive-side component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComponentKnots {
    /// Unit-weight knots, ascending.
    Finite { knots: Vec<f64> },
    /// Knots `origin + l·step` with weights `ratio^l`, `l = 1, 2, …`.
    Geometric { origin: f64, step: f64, ratio: f64 },
}

impl ComponentKnots {
    /// `m(j)`, or `None` for the half-infinite component.
    pub fn count(&self) -> Option<usize> {
        match self {
            ComponentKnots::Finite { knots } => Some(knots.len()),
            ComponentKnots::Geometric { .. } => None,
        }
    }

    /// `Σ_p w_{j,p}`.
    pub fn weight_sum(&self) -> f64 {
        match self {
            ComponentKnots::Finite { knots } => knots.len() as f64,
            ComponentKnots::Geometric { ratio, .. } => ratio / (1.0 - ratio),
        }
    }

    /// Knot `l >= 1` of a geometric component and its weight.
    fn geometric_term(origin: f64, step: f64, ratio: f64, l: u32) -> (f64, f64) {
        (origin + l as f64 * step, ratio.powi(l as i32))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotPlan {
    rho: f64,
    components: Vec<ComponentKnots>,
}

impl KnotPlan {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Indexed by `j = 0..=k`.
    pub fn components(&self) -> &[ComponentKnots] {
        &self.components
    }
}

/// Uniform knots from `a_j + rho` to `b_j - rho` with spacing at most `rho`;
/// lazy knots `a_k + l·rho` with weights `2^{-l}` for a half-infinite component.
pub fn place_knots(spec: &SupportSpec, rho: f64) -> Result<KnotPlan> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::NonPositiveRho(rho));
    }
    let mut components = Vec::with_capacity(spec.k() + 1);
    let mut total = 0usize;
    for j in 0..=spec.k() {
        let e = spec.positive_component(j);
        if !e.is_finite() {
            components.push(ComponentKnots::Geometric {
                origin: e.lo(),
                step: rho,
                ratio: 0.5,
            });
            continue;
        }
        let (first, last) = (e.lo() + rho, e.hi() - rho);
        let span = (e.len() - 2.0 * rho).max(0.0);
        let m = if span == 0.0 {
            1.0
        } else {
            (span / rho).ceil() + 1.0
        };
        if !(m <= MAX_KNOTS as f64) || total + m as usize > MAX_KNOTS {
            return Err(Error::InvalidBlueprint(format!(
                "component {j} needs {m} knots; the limit is {MAX_KNOTS}"
            )));
        }
        let m = m as usize;
        total += m;
        let knots = if m == 1 {
            vec![e.midpoint()]
        } else if j == 0 {
            symmetric_knots(last, m)
        } else {
            (0..m)
                .map(|p| {
                    if p + 1 == m {
                        last
                    } else {
                        first + (last - first) * p as f64 / (m - 1) as f64
                    }
                })
                .collect()
        };
        components.push(ComponentKnots::Finite { knots });
    }
    Ok(KnotPlan { rho, components })
}

/// `m` knots uniformly spaced on `[-half, half]`, mirrored exactly.
fn symmetric_knots(half: f64, m: usize) -> Vec<f64> {
    let mut knots = vec![0.0; m];
    for p in 0..m / 2 {
        let v = -half + 2.0 * half * p as f64 / (m - 1) as f64;
        knots[p] = v;
        knots[m - 1 - p] = -v;
    }
    knots
}

/// The resolved construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Blueprint {
    spec: SupportSpec,
    kernel: Kernel,
    plan: KnotPlan,
    alphas: Vec<f64>,
    normalizer: f64,
    series_terms: u32,
}

/// `α_j` at its bound: `1/(2·m(j)·(k+1))`, or `1/(2(k+1))` for a geometric
/// component whose weights sum to 1.
fn alpha_bound(c: &ComponentKnots, k: usize) -> f64 {
    let kk = (k + 1) as f64;
    match c.count() {
        Some(m) => 1.0 / (2.0 * m as f64 * kk),
        None => 1.0 / (2.0 * kk),
    }
}

impl Blueprint {
    /// Sets every `α_j` exactly at its bound and computes `F(0)`.
    pub fn new(spec: &SupportSpec, kernel: Kernel, plan: KnotPlan) -> Self {
        let alphas = plan
            .components
            .iter()
            .map(|c| alpha_bound(c, spec.k()))
            .collect();
        Self::assemble(spec.clone(), kernel, plan, alphas)
    }

    /// Triangle kernel with `rho = spec.rho()`.
    pub fn from_spec(spec: &SupportSpec) -> Self {
        Self::try_from_spec(spec).expect("knot count within MAX_KNOTS")
    }

    pub fn try_from_spec(spec: &SupportSpec) -> Result<Self> {
        let rho = spec.rho();
        let kernel = Kernel::make_triangle(rho)?;
        let plan = place_knots(spec, rho)?;
        Ok(Self::new(spec, kernel, plan))
    }

    fn assemble(spec: SupportSpec, kernel: Kernel, plan: KnotPlan, alphas: Vec<f64>) -> Self {
        let series_terms = match plan.components.last() {
            Some(ComponentKnots::Geometric { ratio, .. }) => {
                let alpha = *alphas.last().unwrap();
                series_terms(alpha, *ratio)
            }
            _ => 0,
        };
        let mut bp = Blueprint {
            spec,
            kernel,
            plan,
            alphas,
            normalizer: 1.0,
            series_terms,
        };
        bp.normalizer = bp.eval_unnormalized(0.0);
        bp
    }

    pub fn spec(&self) -> &SupportSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn plan(&self) -> &KnotPlan {
        &self.plan
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn rho(&self) -> f64 {
        self.plan.rho
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    /// `F(0)`; shared by every member.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Number of geometric-series terms kept in inverse transforms (0 when
    /// every component is finite).
    pub fn series_terms(&self) -> u32 {
        self.series_terms
    }

    /// `Σ_j α_j Σ_p w_{j,p}`; the bracket lies in `[1 - 2s, 1 + 2s]`.
    pub fn weighted_alpha_sum(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.plan.components)
            .map(|(a, c)| a * c.weight_sum())
            .sum()
    }

    /// Largest value the bracket trig polynomial can take.
    pub fn bracket_sup(&self) -> f64 {
        1.0 + 2.0 * self.weighted_alpha_sum()
    }

    /// `F_j(x)`.
    pub fn bump(&self, j: usize, x: f64) -> f64 {
        let rho = self.plan.rho;
        match &self.plan.components[j] {
            ComponentKnots::Finite { knots } => {
                let lo = knots.partition_point(|&t| t <= x - rho);
                knots[lo..]
                    .iter()
                    .take_while(|&&t| t < x + rho)
                    .map(|&t| self.kernel.eval(x - t))
                    .sum()
            }
            &ComponentKnots::Geometric {
                origin,
                step,
                ratio,
            } => {
                let u = (x - origin) / step;
                if !(u > 0.0) || !u.is_finite() {
                    return 0.0;
                }
                let centre = u.round().max(1.0);
                let mut acc = 0.0;
                for l in [centre - 1.0, centre, centre + 1.0] {
                    if l < 1.0 || l > i32::MAX as f64 {
                        continue;
                    }
                    let (tau, w) = ComponentKnots::geometric_term(origin, step, ratio, l as u32);
                    acc += w * self.kernel.eval(x - tau);
                }
                acc
            }
        }
    }

    /// `F(x)`, real and nonnegative.
    pub fn eval_unnormalized(&self, x: f64) -> f64 {
        let mut acc = self.kernel.eval(x);
        for (j, &a) in self.alphas.iter().enumerate() {
            acc += a * (self.bump(j, x) + self.bump(j, -x));
        }
        acc
    }

    /// `f(x) = F(x)/F(0)`.
    pub fn eval_f(&self, x: f64) -> Complex64 {
        Complex64::new(self.eval_unnormalized(x) / self.normalizer, 0.0)
    }

    /// `F̌(t) = φ̌(t)·(1 + 2 Σ_j α_j Σ_p w_{j,p} cos(τ_{j,p} t))`.
    pub fn inverse_unnormalized(&self, t: f64) -> f64 {
        self.kernel.inverse_eval(t) * self.bracket_with(&[], t)
    }

    /// Bracket with phase angles `θ_1..θ_k` (missing entries are 0).
    fn bracket_with(&self, angles: &[f64], t: f64) -> f64 {
        let mut acc = 0.0;
        for (j, (c, &a)) in self.plan.components.iter().zip(&self.alphas).enumerate() {
            let theta = if j == 0 {
                0.0
            } else {
                angles.get(j - 1).copied().unwrap_or(0.0)
            };
            let s = match c {
                ComponentKnots::Finite { knots } => knots
                    .iter()
                    .map(|&tau| (theta + tau * t).cos())
                    .sum::<f64>(),
                &ComponentKnots::Geometric {
                    origin,
                    step,
                    ratio,
                } => (1..=self.series_terms)
                    .map(|l| {
                        let (tau, w) = ComponentKnots::geometric_term(origin, step, ratio, l);
                        w * (theta + tau * t).cos()
                    })
                    .sum(),
            };
            acc += a * s;
        }
        1.0 + 2.0 * acc
    }

    /// Sorted breakpoints of the piecewise-linear `F` on `[0, limit]`.
    pub fn breakpoints(&self, limit: f64) -> Vec<f64> {
        let rho = self.plan.rho;
        let mut pts = vec![0.0, rho];
        let mut push_knot = |tau: f64| {
            for p in [tau - rho, tau, tau + rho, -tau - rho, -tau, -tau + rho] {
                if p >= 0.0 && p <= limit {
                    pts.push(p);
                }
            }
        };
        for c in &self.plan.components {
            match c {
                ComponentKnots::Finite { knots } => knots.iter().for_each(|&t| push_knot(t)),
                &ComponentKnots::Geometric {
                    origin,
                    step,
                    ratio,
                } => {
                    let mut l = 1u32;
                    loop {
                        let (tau, _) = ComponentKnots::geometric_term(origin, step, ratio, l);
                        if tau - rho > limit {
                            break;
                        }
                        push_knot(tau);
                        l += 1;
                    }
                }
            }
        }
        pts.push(limit);
        pts.retain(|p| *p <= limit);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// The member `g_ω`. `ω` must have `k` entries.
    pub fn member(&self, omega: &PhaseVector) -> Result<Member<'_>> {
        if omega.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: omega.k(),
            });
        }
        let angles: Vec<f64> = omega
            .entries()
            .iter()
            .map(|&w| 2.0 * PI * w as f64 / omega.n() as f64)
            .collect();
        let phasors = angles
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect();
        Ok(Member {
            bp: self,
            omega: omega.clone(),
            angles,
            phasors,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BlueprintFile::from(self)).expect("blueprint serializes")
    }

    /// Loads an exported blueprint, checking it against the construction's
    /// invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: BlueprintFile = serde_json::from_str(text)?;
        file.into_blueprint()
    }
}

/// Smallest `L` with `2·alpha·(tail of Σ ratio^l beyond L) < SERIES_TOL`.
fn series_terms(alpha: f64, ratio: f64) -> u32 {
    let mut tail = ratio / (1.0 - ratio);
    let mut l = 0u32;
    while 2.0 * alpha * tail >= SERIES_TOL && l < 1000 {
        l += 1;
        tail *= ratio;
    }
    l
}

/// One member `g_ω` of the root family.
#[derive(Debug, Clone)]
pub struct Member<'a> {
    bp: &'a Blueprint,
    omega: PhaseVector,
    angles: Vec<f64>,
    phasors: Vec<Complex64>,
}

impl<'a> Member<'a> {
    pub fn blueprint(&self) -> &'a Blueprint {
        self.bp
    }

    pub fn omega(&self) -> &PhaseVector {
        &self.omega
    }

    /// `e^{iθ_j}` for `j = 1..=k`.
    pub fn phasors(&self) -> &[Complex64] {
        &self.phasors
    }

    /// `G_ω(x)`.
    pub fn eval_unnormalized(&self, x: f64) -> Complex64 {
        let bp = self.bp;
        let mut re = bp.kernel.eval(x);
        let mut im = 0.0;
        for (j, &a) in bp.alphas.iter().enumerate() {
            let (fwd, back) = (bp.bump(j, x), bp.bump(j, -x));
            if j == 0 {
                re += a * (fwd + back);
            } else {
                // e^{iθ}·fwd + e^{-iθ}·back, kept symmetric in (fwd, back)
                // so that G(-x) is the exact conjugate of G(x).
                let p = self.phasors[j - 1];
                re += a * (p.re * fwd + p.re * back);
                im += a * (p.im * fwd - p.im * back);
            }
        }
        Complex64::new(re, im)
    }

    /// `g_ω(x) = G_ω(x)/G_ω(0)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_unnormalized(x) / self.bp.normalizer
    }

    /// `1 + 2 Σ_j α_j Σ_p w_{j,p} cos(θ_j + τ_{j,p} t)`.
    pub fn bracket(&self, t: f64) -> f64 {
        self.bp.bracket_with(&self.angles, t)
    }

    /// `Ǧ_ω(t) = φ̌(t)·bracket(t)`.
    pub fn inverse_unnormalized(&self, t: f64) -> f64 {
        self.bp.kernel.inverse_eval(t) * self.bracket(t)
    }
}

/// Wire form of a blueprint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlueprintFile {
    pub spec: SupportSpec,
    pub kernel: KernelShape,
    pub rho: f64,
    pub components: Vec<ComponentKnots>,
    pub alphas: Vec<f64>,
    pub normalizer: f64,
}

impl From<&Blueprint> for BlueprintFile {
    fn from(bp: &Blueprint) -> Self {
        BlueprintFile {
            spec: bp.spec.clone(),
            kernel: bp.kernel.shape(),
            rho: bp.plan.rho,
            components: bp.plan.components.clone(),
            alphas: bp.alphas.clone(),
            normalizer: bp.normalizer,
        }
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

impl BlueprintFile {
    pub fn into_blueprint(self) -> Result<Blueprint> {
        let bad = |msg: String| Err(Error::InvalidBlueprint(msg));
        let spec = self.spec;
        let k = spec.k();
        let rho = self.rho;
        if !close(rho, spec.rho(), 1e-12) {
            return bad(format!(
                "rho {rho} does not match the spec's {}",
                spec.rho()
            ));
        }
        let kernel = Kernel::new(self.kernel, rho)?;
        if self.components.len() != k + 1 {
            return bad(format!(
                "expected {} components, got {}",
                k + 1,
                self.components.len()
            ));
        }
        if self.alphas.len() != k + 1 {
            return bad(format!(
                "expected {} alphas, got {}",
                k + 1,
                self.alphas.len()
            ));
        }
        let mut total = 0usize;
        for (j, c) in self.components.iter().enumerate() {
            let e = spec.positive_component(j);
            match c {
                ComponentKnots::Finite { knots } => {
                    if !e.is_finite() {
                        return bad(format!(
                            "component {j} is half-infinite but has finite knots"
                        ));
                    }
                    total += knots.len();
                    if knots.is_empty() || total > MAX_KNOTS {
                        return bad(format!("component {j} has {} knots", knots.len()));
                    }
                    let tol = 1e-12 * e.lo().abs().max(e.hi().abs()).max(1.0);
                    if knots.iter().any(|t| !t.is_finite())
                        || knots.windows(2).any(|w| !(w[0] < w[1]))
                    {
                        return bad(format!("component {j} knots are not strictly ascending"));
                    }
                    let (first, last) = (knots[0], knots[knots.len() - 1]);
                    let spans = (first - (e.lo() + rho)).abs() <= tol
                        && (last - (e.hi() - rho)).abs() <= tol;
                    let centred = knots.len() == 1 && (first - e.midpoint()).abs() <= tol;
                    if !spans && !centred {
                        return bad(format!("component {j} knots do not span [a+rho, b-rho]"));
                    }
                    if knots.windows(2).any(|w| w[1] - w[0] > rho + tol) {
                        return bad(format!("component {j} has a knot gap wider than rho"));
                    }
                }
                &ComponentKnots::Geometric {
                    origin,
                    step,
                    ratio,
                } => {
                    if e.is_finite() {
                        return bad(format!("component {j} is finite but has geometric knots"));
                    }
                    if origin != e.lo() || !close(step, rho, 1e-12) || ratio != 0.5 {
                        return bad(format!(
                            "component {j} geometric knots must start at {} with step rho and ratio 1/2",
                            e.lo()
                        ));
                    }
                }
            }
            let a = self.alphas[j];
            let bound = alpha_bound(c, k);
            if !(a > 0.0 && a <= bound * (1.0 + 1e-12)) {
                return bad(format!("alpha_{j} = {a} outside (0, {bound}]"));
            }
        }
        let bp = Blueprint::assemble(
            spec,
            kernel,
            KnotPlan {
                rho,
                components: self.components,
            },
            self.alphas,
        );
        if !close(bp.normalizer, self.normalizer, 1e-12) {
            return bad(format!(
                "normalizer {} does not match the recomputed F(0) = {}",
                self.normalizer, bp.normalizer
            ));
        }
        Ok(bp)
    }
}
