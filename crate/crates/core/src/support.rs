//! Essential-support geometry: a symmetric union of `2k + 1` open intervals
//!
//! ```text
//! (-b_k, -a_k) ∪ … ∪ (-b_1, -a_1) ∪ (-b0, b0) ∪ (a_1, b_1) ∪ … ∪ (a_k, b_k)
//! ```
//!
//! with `0 < b0 < a_1 < b_1 < … < a_k < b_k`, where only `b_k` may be `+∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open interval `(lo, hi)`; `lo` is finite, `hi` may be `+∞` (or `lo`
/// may be `-∞` for the mirror image of a half-infinite component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() {
            return Err(Error::OrderingViolation(format!(
                "interval lower end must be finite, got {lo}"
            )));
        }
        if !(lo < hi) {
            return Err(Error::OrderingViolation(format!(
                "interval ({lo}, {hi}) is empty"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Open-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Midpoint for finite intervals.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn reflect(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

/// Where an abscissa falls relative to the components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Component index in `-k..=k`.
    Component(i32),
    Outside,
}

impl Location {
    pub fn negate(self) -> Location {
        match self {
            Location::Component(j) => Location::Component(-j),
            Location::Outside => Location::Outside,
        }
    }
}

/// A validated essential support. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSpec {
    b0: f64,
    positives: Vec<Interval>,
}

impl SupportSpec {
    /// Checks the ordering `0 < b0 < a_1 < b_1 < … < a_k < b_k` with strict
    /// comparisons on the endpoints exactly as given.
    pub fn validate(b0: f64, positives: &[(f64, f64)]) -> Result<Self> {
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::NonPositiveB0(b0));
        }
        let last = positives.len().saturating_sub(1);
        let mut prev = b0;
        let mut intervals = Vec::with_capacity(positives.len());
        for (i, &(lo, hi)) in positives.iter().enumerate() {
            let j = i + 1;
            if hi == f64::INFINITY && i != last {
                return Err(Error::InfiniteNonLast { index: j });
            }
            if !(lo > prev) {
                let prev_name = if i == 0 {
                    "b0".to_string()
                } else {
                    format!("b_{}", j - 1)
                };
                return Err(Error::OrderingViolation(format!(
                    "a_{j} = {lo} must exceed {prev_name} = {prev}"
                )));
            }
            if !(hi > lo) {
                return Err(Error::OrderingViolation(format!(
                    "b_{j} = {hi} must exceed a_{j} = {lo}"
                )));
            }
            intervals.push(Interval::new(lo, hi)?);
            prev = hi;
        }
        Ok(SupportSpec {
            b0,
            positives: intervals,
        })
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// The positive-side components `(a_1, b_1), …, (a_k, b_k)`.
    pub fn positives(&self) -> &[Interval] {
        &self.positives
    }

    pub fn k(&self) -> usize {
        self.positives.len()
    }

    /// Number of connected components, `2k + 1`.
    pub fn comp(&self) -> usize {
        2 * self.k() + 1
    }

    pub fn has_half_infinite(&self) -> bool {
        self.positives.last().is_some_and(|e| !e.is_finite())
    }

    /// Component `j` for `j` in `0..=k`; component 0 is `(-b0, b0)`.
    pub fn positive_component(&self, j: usize) -> Interval {
        if j == 0 {
            Interval {
                lo: -self.b0,
                hi: self.b0,
            }
        } else {
            self.positives[j - 1]
        }
    }

    /// Kernel half-width: half the length of the shortest finite component.
    pub fn rho(&self) -> f64 {
        let shortest = self
            .positives
            .iter()
            .filter(|e| e.is_finite())
            .map(Interval::len)
            .fold(2.0 * self.b0, f64::min);
        0.5 * shortest
    }

    /// All `2k + 1` components ordered left to right, so index `i` holds
    /// component `j = i - k`.
    pub fn components(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.comp());
        out.extend(self.positives.iter().rev().map(Interval::reflect));
        out.push(self.positive_component(0));
        out.extend(self.positives.iter().copied());
        out
    }

    pub fn locate(&self, x: f64) -> Location {
        let ax = x.abs();
        if ax < self.b0 {
            return Location::Component(0);
        }
        // Components are sorted and disjoint; binary search on the lower ends.
        let idx = self.positives.partition_point(|e| e.lo < ax);
        if idx == 0 {
            return Location::Outside;
        }
        let e = &self.positives[idx - 1];
        if e.contains(ax) {
            let j = idx as i32;
            Location::Component(if x > 0.0 { j } else { -j })
        } else {
            Location::Outside
        }
    }

    /// Largest finite endpoint: `b_k`, or `a_k` when the last component is
    /// half-infinite (`b0` when `k = 0`).
    pub fn finite_extent(&self) -> f64 {
        match self.positives.last() {
            None => self.b0,
            Some(e) if e.is_finite() => e.hi,
            Some(e) => e.lo,
        }
    }

    /// Gaps between consecutive positive-side components, as open intervals.
    pub fn gaps(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.k());
        let mut prev = self.b0;
        for e in &self.positives {
            out.push(Interval { lo: prev, hi: e.lo });
            prev = e.hi;
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawSpec::from(self)).expect("spec serializes")
    }
}

/// Wire form of a support: `{"b0": 1, "positives": [[2, 4], [5, "inf"]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub b0: f64,
    #[serde(default)]
    pub positives: Vec<(f64, Endpoint)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Finite(f64),
    Infinite(InfMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InfMarker {
    #[serde(rename = "inf")]
    Inf,
}

impl Endpoint {
    pub fn value(self) -> f64 {
        match self {
            Endpoint::Finite(v) => v,
            Endpoint::Infinite(_) => f64::INFINITY,
        }
    }
}

impl RawSpec {
    pub fn into_spec(self) -> Result<SupportSpec> {
        let pairs: Vec<(f64, f64)> = self
            .positives
            .iter()
            .map(|&(lo, hi)| (lo, hi.value()))
            .collect();
        SupportSpec::validate(self.b0, &pairs)
    }
}

impl From<&SupportSpec> for RawSpec {
    fn from(spec: &SupportSpec) -> Self {
        RawSpec {
            b0: spec.b0,
            positives: spec
                .positives
                .iter()
                .map(|e| {
                    let hi = if e.hi.is_finite() {
                        Endpoint::Finite(e.hi)
                    } else {
                        Endpoint::Infinite(InfMarker::Inf)
                    };
                    (e.lo, hi)
                })
                .collect(),
        }
    }
}

impl Serialize for SupportSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SupportSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RawSpec::deserialize(d)?
            .into_spec()
            .map_err(serde::de::Error::custom)
    }
}
