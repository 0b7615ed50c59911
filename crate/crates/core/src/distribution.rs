//! Each family member as a probability law on the line.
//!
//! The law of `g_ω` is the measure `μ` with `g_ω(x) = ∫ e^{ixt} dμ(t)`. Its
//! density is the inverse transform of `G_ω` reflected, `Ǧ_ω(-t)/G_ω(0)`,
//! which is a Fejér density times a bounded nonnegative trig polynomial.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyze::CfGrid;
use crate::construct::{Blueprint, Member};
use crate::error::{Error, Result};
use crate::family::PhaseVector;
use crate::kernel::SeedKernel;
use crate::quadrature::GaussLegendre;

/// Default largest quadrature window for [`DensityView::cdf`].
pub const DEFAULT_MAX_WINDOW: f64 = 1e8;

/// A family member viewed through its density.
#[derive(Debug, Clone)]
pub struct DensityView<'a> {
    member: Member<'a>,
    max_window: f64,
}

impl<'a> DensityView<'a> {
    pub fn new(member: Member<'a>) -> Self {
        DensityView {
            member,
            max_window: DEFAULT_MAX_WINDOW,
        }
    }

    pub fn with_max_window(mut self, max_window: f64) -> Self {
        self.max_window = max_window;
        self
    }

    pub fn member(&self) -> &Member<'a> {
        &self.member
    }

    pub fn blueprint(&self) -> &'a Blueprint {
        self.member.blueprint()
    }

    pub fn omega(&self) -> &PhaseVector {
        self.member.omega()
    }

    /// `G_ω(0)`, the same for every member.
    pub fn normalizer(&self) -> f64 {
        self.blueprint().normalizer()
    }

    /// The characteristic function of the law, `g_ω`.
    pub fn cf(&self, x: f64) -> Complex64 {
        self.member.eval(x)
    }

    pub fn density(&self, t: f64) -> f64 {
        let v = self.member.inverse_unnormalized(-t) / self.normalizer();
        debug_assert!(v >= -1e-12, "density {v} at {t}");
        v.max(0.0)
    }

    /// `sup density / φ̌`, used both for tail bounds and as the rejection
    /// envelope constant.
    fn envelope(&self) -> f64 {
        self.blueprint().bracket_sup() / self.normalizer()
    }

    /// Upper bound on the mass of `(-∞, -w) ∪ (w, ∞)`.
    pub fn tail_bound(&self, w: f64) -> f64 {
        self.envelope() * self.blueprint().kernel().inverse_tail_bound(w)
    }

    /// `∫_{-w}^{w} density` by composite Gauss–Legendre, and the bound on the
    /// mass outside the window.
    pub fn window_mass(&self, w: f64) -> (f64, f64) {
        let gl = GaussLegendre::new(10);
        let panel = 2.0 / self.max_frequency();
        let panels = ((2.0 * w / panel).ceil() as usize).max(1);
        let chunk = 1024;
        let h = 2.0 * w / panels as f64;
        let mass = (0..panels.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let first = c * chunk;
                let last = ((c + 1) * chunk).min(panels);
                (first..last)
                    .map(|p| {
                        let lo = -w + p as f64 * h;
                        gl.integrate(lo, lo + h, |t| self.density(t))
                    })
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        (mass, self.tail_bound(w))
    }

    /// Largest angular frequency present in the density.
    fn max_frequency(&self) -> f64 {
        let bp = self.blueprint();
        let rho = bp.rho();
        let tau = bp
            .breakpoints(self.support_limit(1e-15))
            .last()
            .copied()
            .unwrap_or(rho);
        tau + rho
    }

    /// Where `g` ends (finite case) or where its remaining contribution to the
    /// inversion integral falls below `budget` (half-infinite case).
    fn support_limit(&self, budget: f64) -> f64 {
        let bp = self.blueprint();
        let spec = bp.spec();
        if !spec.has_half_infinite() {
            return spec.finite_extent();
        }
        let rho = bp.rho();
        let a_k = spec.finite_extent();
        let alpha = *bp.alphas().last().unwrap();
        // ∫_{a_k+(L-1)ρ}^∞ |g(x)|/x dx ≤ alpha·2^{1-L}·ρ / (N·(a_k+(L-1)ρ))
        let mut l = 1.0_f64;
        loop {
            let x = a_k + (l - 1.0) * rho;
            let tail = alpha * 2f64.powf(1.0 - l) * rho / (self.normalizer() * x) / PI;
            if tail <= budget || l > 1100.0 {
                return x;
            }
            l += 1.0;
        }
    }

    /// `P(T <= t)` within `abs_tol`, by Gil-Pelaez inversion of `g` over its
    /// support. Beyond the window where the tail mass is below `abs_tol/2`
    /// the answer is 0 or 1.
    pub fn cdf(&self, t: f64, abs_tol: f64) -> Result<f64> {
        let abs_tol = abs_tol.max(1e-6);
        let rho = self.blueprint().rho();
        // one-sided tail beyond w is ≤ envelope·2/(πρw)
        let window = 4.0 * self.envelope() / (PI * rho * abs_tol);
        if !(window <= self.max_window) {
            return Err(Error::ToleranceUnreachable {
                abs_tol,
                window,
                max: self.max_window,
            });
        }
        if t <= -window {
            return Ok(0.0);
        }
        if t >= window {
            return Ok(1.0);
        }
        let limit = self.support_limit(abs_tol / 4.0);
        let pts = self.blueprint().breakpoints(limit);
        let gl = GaussLegendre::new(12);
        let integrand = |x: f64| {
            let v = Complex64::from_polar(1.0, -x * t) * self.member.eval(x);
            v.im / x
        };
        let mut integral = 0.0;
        for w in pts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let panels = ((t.abs() * (hi - lo) / 3.0).ceil() as usize).max(1);
            integral += gl.integrate_panels(lo, hi, panels, integrand);
        }
        Ok((0.5 - integral / PI).clamp(0.0, 1.0))
    }

    /// Rejection sampling: Fejér proposal, accepted with probability
    /// `bracket(-t)/bracket_sup`.
    pub fn sample(&self, count: usize, seed: u64) -> SampleBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = self.blueprint().rho();
        let sup = self.blueprint().bracket_sup();
        let mut draws = Vec::with_capacity(count);
        while draws.len() < count {
            let t = sample_fejer(&mut rng, rho);
            let accept = self.member.bracket(-t) / sup;
            if rng.random::<f64>() < accept {
                draws.push(t);
            }
        }
        SampleBatch {
            seed,
            count,
            omega: self.omega().clone(),
            draws,
        }
    }

    /// Kolmogorov–Smirnov distance between the batch and [`Self::cdf`].
    pub fn ks_statistic(&self, batch: &SampleBatch, abs_tol: f64) -> Result<f64> {
        let mut sorted = batch.draws.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let cdfs = sorted
            .par_iter()
            .map(|&t| self.cdf(t, abs_tol))
            .collect::<Result<Vec<f64>>>()?;
        Ok(cdfs
            .iter()
            .enumerate()
            .map(|(i, &c)| ((i + 1) as f64 / n - c).max(c - i as f64 / n))
            .fold(0.0, f64::max))
    }

    /// `t,density` CSV on `i·step`, `|t| <= halfwidth`.
    pub fn density_csv(&self, halfwidth: f64, step: f64) -> Result<String> {
        if !(step > 0.0 && halfwidth >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "step {step} and halfwidth {halfwidth} must be positive"
            )));
        }
        let m = (halfwidth / step + 1e-9).floor() as i64;
        let mut out = String::from("t,density\n");
        for i in -m..=m {
            let t = i as f64 * step;
            let _ = writeln!(out, "{},{}", t, self.density(t));
        }
        Ok(out)
    }
}

/// One draw from `(rho/2π)·sinc²(rho·t/2)`, via `u = rho·t/2` with density
/// `sinc²(u)/π`, proposed from `∝ min(1, 1/u²)`.
fn sample_fejer<R: Rng>(rng: &mut R, rho: f64) -> f64 {
    loop {
        let (u, accept) = if rng.random::<bool>() {
            let u: f64 = rng.random_range(-1.0..1.0);
            let s = if u == 0.0 { 1.0 } else { u.sin() / u };
            (u, s * s)
        } else {
            let v = 1.0 - rng.random::<f64>();
            let u = if rng.random::<bool>() {
                1.0 / v
            } else {
                -1.0 / v
            };
            let s = u.sin();
            (u, s * s)
        };
        if rng.random::<f64>() < accept {
            return 2.0 * u / rho;
        }
    }
}

/// Draws from one member's law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub count: usize,
    pub omega: PhaseVector,
    pub draws: Vec<f64>,
}

impl SampleBatch {
    pub fn to_csv(&self) -> String {
        let entries: Vec<String> = self.omega.entries().iter().map(u32::to_string).collect();
        let mut out = format!(
            "# seed={} count={} n={} omega={}\nt\n",
            self.seed,
            self.count,
            self.omega.n(),
            entries.join(",")
        );
        for t in &self.draws {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}

/// `(1/N)·Σ e^{i x t_i}` on the given abscissas (ascending). Values at
/// negative abscissas are conjugates of the values at `|x|`.
pub fn empirical_cf(batch: &SampleBatch, xs: &[f64]) -> Result<CfGrid> {
    if batch.draws.is_empty() {
        return Err(Error::InvalidGrid("empty sample batch".into()));
    }
    let n = batch.draws.len() as f64;
    let values = xs
        .par_iter()
        .map(|&x| {
            let ax = x.abs();
            let (mut re, mut im) = (0.0, 0.0);
            for &t in &batch.draws {
                let (s, c) = (ax * t).sin_cos();
                re += c;
                im += s;
            }
            let v = Complex64::new(re / n, im / n);
            if x < 0.0 {
                v.conj()
            } else {
                v
            }
        })
        .collect();
    CfGrid::new(xs.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::SupportSpec;

    fn bp(b0: f64, p: &[(f64, f64)]) -> Blueprint {
        Blueprint::from_spec(&SupportSpec::validate(b0, p).unwrap())
    }

    #[test]
    fn single_component_density_is_fejer() {
        let b = bp(1.0, &[]);
        let view = DensityView::new(b.member(&PhaseVector::zero(0, 2).unwrap()).unwrap());
        for i in -100..=100 {
            let t = 0.37 * i as f64;
            let fejer = b.kernel().inverse_eval(t);
            assert!((view.density(t) - fejer).abs() < 1e-15, "t = {t}");
        }
    }

    #[test]
    fn density_at_zero() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::zero(1, 3).unwrap()).unwrap());
        assert!((view.density(0.0) - 2.0 / (3.0 * PI)).abs() < 1e-15);
        for i in 0..100 {
            let t = 0.173 * i as f64;
            assert_eq!(view.density(t), view.density(-t));
        }
    }

    #[test]
    fn density_reflects_under_negated_omega() {
        let b = bp(1.0, &[(2.0, 4.0), (5.0, 9.0)]);
        let w = PhaseVector::new(vec![1, 2], 3).unwrap();
        let a = DensityView::new(b.member(&w).unwrap());
        let r = DensityView::new(b.member(&w.negate()).unwrap());
        for i in -200..=200 {
            let t = 0.05 * i as f64;
            assert!((a.density(t) - r.density(-t)).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_limits_and_symmetry() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::zero(1, 3).unwrap()).unwrap());
        let tol = 1e-6;
        assert!((view.cdf(0.0, tol).unwrap() - 0.5).abs() <= tol);
        assert!((view.cdf(1e12, tol).unwrap() - 1.0).abs() <= tol);
        assert!(view.cdf(-1e12, tol).unwrap().abs() <= tol);
        let mut prev = 0.0;
        for i in -400..=400 {
            let c = view.cdf(0.05 * i as f64, tol).unwrap();
            assert!(c >= prev - 1e-12, "cdf decreased at {}", 0.05 * i as f64);
            prev = c;
        }
    }

    #[test]
    fn cdf_matches_integrated_density() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::new(vec![1], 3).unwrap()).unwrap());
        let gl = GaussLegendre::new(10);
        let c0 = view.cdf(-2.0, 1e-6).unwrap();
        for t in [-1.0, 0.0, 0.7, 3.0] {
            let direct = gl.integrate_panels(-2.0, t, 400, |s| view.density(s));
            let got = view.cdf(t, 1e-6).unwrap() - c0;
            assert!((got - direct).abs() < 1e-9, "t = {t}: {got} vs {direct}");
        }
    }

    #[test]
    fn cdf_tolerance_unreachable() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::zero(1, 3).unwrap()).unwrap())
            .with_max_window(1e3);
        assert!(matches!(
            view.cdf(0.0, 1e-6),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn sampling_is_reproducible() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::new(vec![1], 3).unwrap()).unwrap());
        let a = view.sample(10, 7);
        let c = view.sample(10, 7);
        assert_eq!(a, c);
        assert_ne!(a, view.sample(10, 8));
        assert_eq!(a.draws.len(), 10);
    }

    #[test]
    fn fejer_sampler_matches_its_cdf() {
        // k = 0 blueprint: density is exactly the Fejér density
        let b = bp(1.0, &[]);
        let view = DensityView::new(b.member(&PhaseVector::zero(0, 2).unwrap()).unwrap());
        let batch = view.sample(20_000, 3);
        let d = view.ks_statistic(&batch, 1e-6).unwrap();
        assert!(d <= 1.95 / (20_000f64).sqrt(), "KS = {d}");
    }

    #[test]
    fn empirical_cf_exact_properties() {
        let b = bp(1.0, &[(2.0, 4.0)]);
        let view = DensityView::new(b.member(&PhaseVector::new(vec![1], 3).unwrap()).unwrap());
        let batch = view.sample(500, 11);
        let xs: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.1).collect();
        let grid = empirical_cf(&batch, &xs).unwrap();
        assert_eq!(grid.values()[50], Complex64::new(1.0, 0.0));
        for i in 0..xs.len() {
            assert_eq!(grid.values()[i], grid.values()[xs.len() - 1 - i].conj());
        }
    }

    #[test]
    fn sample_csv_header() {
        let b = bp(1.0, &[(2.0, 4.0), (5.0, 9.0)]);
        let view = DensityView::new(b.member(&PhaseVector::new(vec![1, 2], 3).unwrap()).unwrap());
        let csv = view.sample(3, 1).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# seed=1 count=3 n=3 omega=1,2"));
        assert_eq!(lines.next(), Some("t"));
        assert_eq!(lines.count(), 3);
    }
}
