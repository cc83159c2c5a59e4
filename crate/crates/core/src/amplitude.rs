//! Complex amplitudes kept in logarithmic polar form.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

/// Reduce an angle to the half-open interval (−π, π].
pub fn wrap_phase(phase: f64) -> f64 {
    if !phase.is_finite() {
        return phase;
    }
    let mut p = phase.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

/// Signed distance between two phases, reduced to (−π, π].
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b)
}

/// A complex number stored as `(ln|z|, arg z)`.
///
/// Determinants of large action matrices overflow `f64` long before their
/// logarithms do, so every amplitude in the crate travels in this form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub log_magnitude: f64,
    /// Radians in (−π, π].
    pub phase: f64,
}

impl Amplitude {
    pub const ONE: Amplitude = Amplitude {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        Self {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    /// Zero maps to `log_magnitude = -inf`, phase 0.
    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return Self {
                log_magnitude: f64::NEG_INFINITY,
                phase: 0.0,
            };
        }
        Self::new(z.norm().ln(), z.arg())
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn magnitude(self) -> f64 {
        self.log_magnitude.exp()
    }

    /// Born-rule weight |z|².
    pub fn intensity(self) -> f64 {
        (2.0 * self.log_magnitude).exp()
    }

    pub fn inv(self) -> Self {
        Self::new(-self.log_magnitude, -self.phase)
    }

    /// |a − b| / |b|, evaluated on the complex values.
    pub fn relative_difference(self, reference: Amplitude) -> f64 {
        // Scale out the reference magnitude first so huge log-magnitudes stay finite.
        let shifted = Amplitude::new(self.log_magnitude - reference.log_magnitude, self.phase);
        let unit = Amplitude::new(0.0, reference.phase);
        (shifted.to_complex() - unit.to_complex()).norm()
    }
}

impl Mul for Amplitude {
    type Output = Amplitude;

    fn mul(self, rhs: Amplitude) -> Amplitude {
        Amplitude::new(
            self.log_magnitude + rhs.log_magnitude,
            self.phase + rhs.phase,
        )
    }
}

impl std::iter::Product for Amplitude {
    fn product<I: Iterator<Item = Amplitude>>(iter: I) -> Self {
        iter.fold(Amplitude::ONE, |acc, a| acc * a)
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({} + {}i)", self.log_magnitude, self.phase)
    }
}

/// A finite sum of phasors `Σ r_j e^{iφ_j}`, the shape of every
/// interference amplitude in the twin-slit pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasorSum {
    terms: Vec<(f64, f64)>,
}

impl PhasorSum {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    /// Sum of unit-modulus phasors with the given phases.
    pub fn unit(phases: &[f64]) -> Self {
        Self {
            terms: phases.iter().map(|&p| (1.0, p)).collect(),
        }
    }

    pub fn push(&mut self, magnitude: f64, phase: f64) {
        self.terms.push((magnitude, phase));
    }

    /// `(magnitude, phase)` pairs in insertion order.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn phases(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.1)
    }

    pub fn value(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|&(r, p)| Complex64::from_polar(r, p))
            .sum()
    }

    pub fn amplitude(&self) -> Amplitude {
        Amplitude::from_complex(self.value())
    }

    /// |Σ r_j e^{iφ_j}|² via the pairwise expansion `Σ_jk r_j r_k cos(φ_j − φ_k)`.
    ///
    /// For two unit phasors this is exactly `2 + 2cos Δ`, so the result never
    /// leaves [0, 4] through rounding.
    pub fn intensity(&self) -> f64 {
        let mut total = 0.0;
        for (j, &(rj, pj)) in self.terms.iter().enumerate() {
            total += rj * rj;
            for &(rk, pk) in &self.terms[j + 1..] {
                total += 2.0 * rj * rk * (pj - pk).cos();
            }
        }
        total.max(0.0)
    }
}

impl Default for PhasorSum {
    fn default() -> Self {
        Self::new()
    }
}

/// Born-rule intensity of an interference sum.
pub fn intensity(psi: &PhasorSum) -> f64 {
    psi.intensity()
}
