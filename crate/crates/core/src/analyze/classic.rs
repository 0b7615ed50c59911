//! The even-order example: two periodic triangle waves with equal modulus.
//!
//! `f` has period 2 and equals `1 - |x|` on `[-1, 1]`; `g` has period 4 and
//! equals `1 - |x|` on `[-2, 2]`. Both are characteristic functions of
//! lattice laws, `|f| = |g|` everywhere, yet `f != g`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicWhich {
    F,
    G,
}

/// A point mass of the underlying lattice law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

fn triangle_wave(x: f64, half_period: f64) -> f64 {
    let period = 2.0 * half_period;
    let r = x - period * (x / period).round();
    1.0 - r.abs()
}

/// `(f(x), g(x))`.
pub fn classic_pair(x: f64) -> (f64, f64) {
    (triangle_wave(x, 1.0), triangle_wave(x, 2.0))
}

/// Fourier-series atoms truncated at `|m| <= max_harmonic`.
///
/// `f`: `1/2` at 0 and `2/(π²m²)` at `±πm` for odd `m`.
/// `g`: `4/(π²m²)` at `±πm/2` for odd `m`.
pub fn classic_atoms(which: ClassicWhich, max_harmonic: u32) -> Vec<Atom> {
    let mut atoms = Vec::new();
    if which == ClassicWhich::F {
        atoms.push(Atom {
            location: 0.0,
            weight: 0.5,
        });
    }
    let (freq, scale) = match which {
        ClassicWhich::F => (PI, 2.0),
        ClassicWhich::G => (0.5 * PI, 4.0),
    };
    for m in (1..=max_harmonic.max(1)).step_by(2) {
        let mf = m as f64;
        let weight = scale / (PI * PI * mf * mf);
        atoms.push(Atom {
            location: -freq * mf,
            weight,
        });
        atoms.push(Atom {
            location: freq * mf,
            weight,
        });
    }
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    atoms
}
