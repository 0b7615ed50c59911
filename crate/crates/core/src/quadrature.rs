//! Quadrature rules shared by the verification and distribution code.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `∫_a^b f` split into `panels` equal pieces.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + p as f64 * h;
                let hi = if p + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Weights of the linear Filon rule: for `s = t·h`,
/// `∫_0^1 e^{isu}(1-u) du` and `∫_0^1 e^{isu} u du`.
pub fn filon_weights(s: f64) -> (Complex64, Complex64) {
    if s.abs() < 0.25 {
        // Σ (is)^m / m! · {1/((m+1)(m+2)), 1/(m+2)}
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for m in 0..24 {
            let mf = m as f64;
            a += term / ((mf + 1.0) * (mf + 2.0));
            b += term / (mf + 2.0);
            term *= Complex64::new(0.0, s) / (mf + 1.0);
        }
        (a, b)
    } else {
        let is = Complex64::new(0.0, s);
        let e = Complex64::from_polar(1.0, s);
        let full = (e - 1.0) / is;
        let b = e / is - (e - 1.0) / (is * is);
        (full - b, b)
    }
}

/// `(1/2π) ∫ e^{itx} v(x) dx` where `v` is the piecewise-linear interpolant of
/// the samples. Exact for piecewise-linear data with kinks on the grid.
pub fn filon_inverse(xs: &[f64], vs: &[Complex64], t: f64) -> Complex64 {
    debug_assert_eq!(xs.len(), vs.len());
    if xs.len() < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let uniform = uniform_step(xs);
    if let Some(h) = uniform {
        let (wa, wb) = filon_weights(t * h);
        let step = Complex64::from_polar(1.0, t * h);
        let mut phase = Complex64::from_polar(1.0, t * xs[0]);
        // Re-anchor the running phase periodically to bound drift.
        for i in 0..xs.len() - 1 {
            if i % 256 == 0 {
                phase = Complex64::from_polar(1.0, t * xs[i]);
            }
            let (v0, v1) = (vs[i], vs[i + 1]);
            if v0 != Complex64::new(0.0, 0.0) || v1 != Complex64::new(0.0, 0.0) {
                acc += phase * (v0 * wa + v1 * wb);
            }
            phase *= step;
        }
        acc *= h;
    } else {
        for i in 0..xs.len() - 1 {
            let (v0, v1) = (vs[i], vs[i + 1]);
            if v0 == Complex64::new(0.0, 0.0) && v1 == Complex64::new(0.0, 0.0) {
                continue;
            }
            let h = xs[i + 1] - xs[i];
            let (wa, wb) = filon_weights(t * h);
            acc += Complex64::from_polar(h, t * xs[i]) * (v0 * wa + v1 * wb);
        }
    }
    acc / (2.0 * PI)
}

fn uniform_step(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let tol = 1e-9 * h;
    xs.iter()
        .enumerate()
        .all(|(i, &x)| (x - (xs[0] + i as f64 * h)).abs() <= tol.max(1e-12 * x.abs()))
        .then_some(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is exact for 8 nodes
        let v = gl.integrate(-1.0, 2.0, |x| x.powi(15) + 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs(), "{v} vs {exact}");
        let w: f64 = GaussLegendre::new(16).weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn filon_series_matches_closed_form_near_switch() {
        for s in [0.2499, 0.25, 0.26, -0.25] {
            let (a, b) = filon_weights(s);
            let is = Complex64::new(0.0, s);
            let e = Complex64::from_polar(1.0, s);
            let bb = e / is - (e - 1.0) / (is * is);
            let aa = (e - 1.0) / is - bb;
            assert!((a - aa).norm() < 1e-13 && (b - bb).norm() < 1e-13);
        }
    }

    #[test]
    fn filon_is_exact_for_linear_hat() {
        // hat of half-width 1: transform (1/2π) sinc²(t/2)
        let xs: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.5).collect();
        let vs: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new((1.0 - x.abs()).max(0.0), 0.0))
            .collect();
        for t in [0.0, 0.3, 1.0, 7.5, 40.0] {
            let got = filon_inverse(&xs, &vs, t);
            let half: f64 = t / 2.0;
            let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
            let want = sinc * sinc / (2.0 * PI);
            assert!(
                (got.re - want).abs() < 1e-13 && got.im.abs() < 1e-13,
                "t={t}"
            );
        }
    }
}
