//! Four-source twin-slit amplitude and the distances it implies.
//!
//! Sources are numbered as in the usual layout: `1` emits, `2` and `4` are
//! the slits, `3` is the detector. Only the chains `1 ↔ 2 ↔ 3` and
//! `1 ↔ 4 ↔ 3` are kept; every other pairing of the four sources is
//! dropped. Each link `i ↔ m` contributes the phase
//! `Γ_i d_im j_m / (2πħ)` with
//!
//! ```text
//! d_im = k_im / (k_im² − (ω₀²m − k)²)
//! ```
//!
//! Matching each slit→detector phase against the free-particle phase
//! `p x / 2ħ` assigns the pair a separation `x_im`.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::amplitude::{phase_distance, Amplitude, PhasorSum};
use crate::network::{require_finite, require_positive, ValidationError};

pub const RESONANCE_TOLERANCE: f64 = 1e-12;
pub const EQUIDISTANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwinSlitError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("resonant coupling k = {k_im}: k² equals (ω0²m − k)²")]
    ResonantCoupling { k_im: f64 },
    #[error("source is not equidistant from the slits: Γ1·d12·j2 = {via_2}, Γ1·d14·j4 = {via_4}")]
    EquidistanceViolated { via_2: f64, via_4: f64 },
    #[error("exchange momentum is zero (x12 = 0)")]
    ZeroMomentum,
}

/// Intrinsic dynamics shared by every source: oscillator mass, stiffness
/// and the line frequency `ω₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceDynamics {
    pub mass: f64,
    pub spring: f64,
    pub omega0: f64,
}

impl SourceDynamics {
    pub fn new(mass: f64, spring: f64, omega0: f64) -> Result<Self, ValidationError> {
        require_positive("mass", mass)?;
        require_finite("spring", spring)?;
        if spring < 0.0 {
            return Err(ValidationError::new("spring", "must be non-negative"));
        }
        require_positive("omega0", omega0)?;
        Ok(Self {
            mass,
            spring,
            omega0,
        })
    }

    /// `ω₀²m − k`.
    pub fn detuning(&self) -> f64 {
        self.omega0 * self.omega0 * self.mass - self.spring
    }
}

/// `d_im = k_im / (k_im² − (ω₀²m − k)²)`.
pub fn coupling_coefficient(k_im: f64, dynamics: &SourceDynamics) -> Result<f64, TwinSlitError> {
    let c = dynamics.detuning();
    let den = k_im * k_im - c * c;
    let scale = k_im * k_im + c * c;
    if scale == 0.0 || den.abs() <= RESONANCE_TOLERANCE * scale {
        return Err(TwinSlitError::ResonantCoupling { k_im });
    }
    Ok(k_im / den)
}

/// The coupling `k` with `coupling_coefficient(k) = d` on the branch through
/// `k = 0`, i.e. `|k| < |ω₀²m − k|`. `None` at exact resonance (`ω₀²m = k`),
/// where `d = 1/k` has no such branch.
pub fn coupling_for_coefficient(d: f64, dynamics: &SourceDynamics) -> Option<f64> {
    let c = dynamics.detuning();
    if d == 0.0 {
        return Some(0.0);
    }
    if c == 0.0 {
        return None;
    }
    // d k² − k − d c² = 0, smaller root in cancellation-free form
    Some(-2.0 * d * c * c / (1.0 + (1.0 + 4.0 * d * d * c * c).sqrt()))
}

/// The four-source configuration. Couplings `k12, k14` link the emitter to
/// the slits, `k23, k43` the slits to the detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwinSlitScenario {
    pub dynamics: SourceDynamics,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
    pub k12: f64,
    pub k14: f64,
    pub k23: f64,
    pub k43: f64,
    pub hbar: f64,
}

impl TwinSlitScenario {
    pub fn validate(&self) -> Result<(), ValidationError> {
        SourceDynamics::new(
            self.dynamics.mass,
            self.dynamics.spring,
            self.dynamics.omega0,
        )?;
        for (name, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma4", self.gamma4),
            ("j2", self.j2),
            ("j3", self.j3),
            ("j4", self.j4),
            ("k12", self.k12),
            ("k14", self.k14),
            ("k23", self.k23),
            ("k43", self.k43),
        ] {
            require_finite(name, v)?;
        }
        require_positive("hbar", self.hbar)
    }

    /// Same scenario with the slit→detector couplings replaced.
    pub fn with_detector_couplings(&self, k23: f64, k43: f64) -> Self {
        Self { k23, k43, ..*self }
    }

    /// Relabels slit 2 as slit 4 and vice versa.
    pub fn exchange_slits(&self) -> Self {
        Self {
            gamma2: self.gamma4,
            gamma4: self.gamma2,
            j2: self.j4,
            j4: self.j2,
            k12: self.k14,
            k14: self.k12,
            k23: self.k43,
            k43: self.k23,
            ..*self
        }
    }

    fn link_phase(&self, gamma: f64, d: f64, j: f64) -> f64 {
        gamma * d * j / (2.0 * PI * self.hbar)
    }

    fn d(&self, k: f64) -> Result<f64, TwinSlitError> {
        coupling_coefficient(k, &self.dynamics)
    }
}

/// `e^{iφ_a} + e^{iφ_b}`, unnormalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPath {
    pub phase_a: f64,
    pub phase_b: f64,
}

impl TwoPath {
    pub fn sum(&self) -> PhasorSum {
        PhasorSum::unit(&[self.phase_a, self.phase_b])
    }

    pub fn value(&self) -> Complex64 {
        self.sum().value()
    }

    pub fn amplitude(&self) -> Amplitude {
        self.sum().amplitude()
    }

    pub fn intensity(&self) -> f64 {
        self.sum().intensity()
    }

    /// `φ_a − φ_b`, not reduced.
    pub fn phase_difference(&self) -> f64 {
        self.phase_a - self.phase_b
    }
}

/// `ψ ∝ exp[i(Γ₁d₁₂j₂ + Γ₂d₂₃j₃)/2πħ] + exp[i(Γ₁d₁₄j₄ + Γ₄d₄₃j₃)/2πħ]`.
pub fn four_source_amplitude(sc: &TwinSlitScenario) -> Result<TwoPath, TwinSlitError> {
    sc.validate()?;
    let a = sc.link_phase(sc.gamma1, sc.d(sc.k12)?, sc.j2)
        + sc.link_phase(sc.gamma2, sc.d(sc.k23)?, sc.j3);
    let b = sc.link_phase(sc.gamma1, sc.d(sc.k14)?, sc.j4)
        + sc.link_phase(sc.gamma4, sc.d(sc.k43)?, sc.j3);
    Ok(TwoPath {
        phase_a: a,
        phase_b: b,
    })
}

/// Slit→detector legs only, valid when the emitter phase is the same
/// through either slit: `ψ ∝ exp[iΓ₂d₂₃j₃/2πħ] + exp[iΓ₄d₄₃j₃/2πħ]`.
pub fn equidistant_amplitude(sc: &TwinSlitScenario) -> Result<TwoPath, TwinSlitError> {
    sc.validate()?;
    let via_2 = sc.gamma1 * sc.d(sc.k12)? * sc.j2;
    let via_4 = sc.gamma1 * sc.d(sc.k14)? * sc.j4;
    let scale = via_2.abs().max(via_4.abs());
    if (via_2 - via_4).abs() > EQUIDISTANCE_TOLERANCE * scale {
        return Err(TwinSlitError::EquidistanceViolated { via_2, via_4 });
    }
    Ok(TwoPath {
        phase_a: sc.link_phase(sc.gamma2, sc.d(sc.k23)?, sc.j3),
        phase_b: sc.link_phase(sc.gamma4, sc.d(sc.k43)?, sc.j3),
    })
}

/// Free-particle side of the comparison. `exchange_mass` belongs to the
/// propagating particle and is unrelated to the oscillator mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerSide {
    pub exchange_mass: f64,
    pub interaction_time: f64,
    pub x12: f64,
    pub x23: f64,
    pub x43: f64,
    pub alpha: Complex64,
}

impl SchrodingerSide {
    pub fn validate(&self) -> Result<(), ValidationError> {
        require_positive("exchange_mass", self.exchange_mass)?;
        require_positive("interaction_time", self.interaction_time)?;
        require_finite("x12", self.x12)?;
        require_finite("x23", self.x23)?;
        require_finite("x43", self.x43)?;
        require_finite("alpha", self.alpha.re)?;
        require_finite("alpha", self.alpha.im)
    }

    /// `p = m x₁₂ / t`.
    pub fn momentum(&self) -> f64 {
        self.exchange_mass * self.x12 / self.interaction_time
    }

    /// `p x / 2ħ`.
    pub fn phase_for_distance(&self, x: f64, hbar: f64) -> f64 {
        self.momentum() * x / (2.0 * hbar)
    }

    /// `α U(x, t; 0, 0)`: the amplitude at separation `x` from a point
    /// source `α δ(x′)`.
    pub fn point_source_amplitude(&self, x: f64, hbar: f64) -> Result<Complex64, TwinSlitError> {
        Ok(self.alpha * schrodinger_propagator(x, 0.0, self.interaction_time, self, hbar)?)
    }
}

/// `U(x₂, t; x₁, 0) = √(m / 2πħit) · exp[im(x₂ − x₁)² / 2ħt]`, principal root.
pub fn schrodinger_propagator(
    x2: f64,
    x1: f64,
    t: f64,
    side: &SchrodingerSide,
    hbar: f64,
) -> Result<Complex64, TwinSlitError> {
    require_positive("interaction_time", t)?;
    require_positive("exchange_mass", side.exchange_mass)?;
    require_positive("hbar", hbar)?;
    let m = side.exchange_mass;
    let prefactor = (Complex64::new(m, 0.0) / Complex64::new(0.0, 2.0 * PI * hbar * t)).sqrt();
    let dx = x2 - x1;
    Ok(prefactor * Complex64::from_polar(1.0, m * dx * dx / (2.0 * hbar * t)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerTwoPath {
    pub paths: TwoPath,
    /// Both slit→detector distances exceed `ħ/p`.
    pub large_distance: bool,
}

/// `ψ₂₃ + ψ₄₃ ∝ exp[ipx₂₃/2ħ] + exp[ipx₄₃/2ħ]`, with `p = m x₁₂ / t`.
///
/// The common factor `α √(m/2πħit)` is dropped. A violated large-distance
/// condition is logged, not rejected.
pub fn schrodinger_two_path(
    side: &SchrodingerSide,
    hbar: f64,
) -> Result<SchrodingerTwoPath, TwinSlitError> {
    let r = two_path_quietly(side, hbar)?;
    if !r.large_distance {
        warn!(
            "slit-detector distances ({}, {}) are not large compared to ħ/p = {}",
            side.x23,
            side.x43,
            hbar / side.momentum().abs()
        );
    }
    Ok(r)
}

fn two_path_quietly(
    side: &SchrodingerSide,
    hbar: f64,
) -> Result<SchrodingerTwoPath, TwinSlitError> {
    side.validate()?;
    require_positive("hbar", hbar)?;
    let p = side.momentum();
    let reach = if p == 0.0 {
        f64::INFINITY
    } else {
        hbar / p.abs()
    };
    Ok(SchrodingerTwoPath {
        paths: TwoPath {
            phase_a: side.phase_for_distance(side.x23, hbar),
            phase_b: side.phase_for_distance(side.x43, hbar),
        },
        large_distance: side.x23.abs() > reach && side.x43.abs() > reach,
    })
}

/// How the impulse `j_k` of the receiving source is fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ImpulseModel {
    Explicit(f64),
    /// `j_k = c·p`, with `c` a unit-conversion constant.
    ProportionalToMomentum(f64),
}

impl ImpulseModel {
    pub fn impulse(&self, momentum: f64) -> f64 {
        match *self {
            ImpulseModel::Explicit(j) => j,
            ImpulseModel::ProportionalToMomentum(c) => c * momentum,
        }
    }
}

/// `x_im = scale · Γ_i · d_im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceResult {
    pub x_im: f64,
    pub scale: f64,
    pub d_im: f64,
}

impl DistanceResult {
    /// `Γ_i d_im` recovered from the distance.
    pub fn strength(&self) -> f64 {
        self.x_im / self.scale
    }
}

/// Solves `(p/2ħ) x_ik = Γ_i d_ik j_k / (2πħ)` for `x_ik`. `ħ` cancels.
pub fn infer_distance(
    gamma_i: f64,
    k_im: f64,
    impulse: ImpulseModel,
    dynamics: &SourceDynamics,
    side: &SchrodingerSide,
) -> Result<DistanceResult, TwinSlitError> {
    require_finite("gamma", gamma_i)?;
    require_finite("k_im", k_im)?;
    side.validate()?;
    let d_im = coupling_coefficient(k_im, dynamics)?;
    let p = side.momentum();
    if p == 0.0 {
        return Err(TwinSlitError::ZeroMomentum);
    }
    let scale = match impulse {
        ImpulseModel::Explicit(j) => j / (PI * p),
        ImpulseModel::ProportionalToMomentum(c) => c / PI,
    };
    Ok(DistanceResult {
        x_im: scale * gamma_i * d_im,
        scale,
        d_im,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternRow {
    pub index: usize,
    pub k23: f64,
    pub k43: f64,
    pub d23: f64,
    pub d43: f64,
    /// Slit→detector phases of the equidistant amplitude.
    pub discrete_phase_23: f64,
    pub discrete_phase_43: f64,
    pub phase_difference: f64,
    pub x23: f64,
    pub x43: f64,
    /// `p x / 2ħ` at the inferred distances.
    pub schrodinger_phase_23: f64,
    pub schrodinger_phase_43: f64,
    pub discrete_intensity: f64,
    pub four_source_intensity: f64,
    pub schrodinger_intensity: f64,
    /// Both inferred distances exceed `ħ/p`.
    pub large_distance: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternScan {
    pub rows: Vec<PatternRow>,
    /// `(index, k23, k43)` of schedule points on a resonance.
    pub skipped: Vec<(usize, f64, f64)>,
}

/// Sweeps the slit→detector couplings. For every pair the slit distances
/// are inferred with `j₃` as the impulse and fed back through the
/// Schrödinger two-path amplitude.
///
/// Resonant schedule points are skipped. A resonant emitter leg or an
/// emitter that is not equidistant from the slits fails the whole scan.
pub fn pattern_scan(
    sc: &TwinSlitScenario,
    side: &SchrodingerSide,
    schedule: &[(f64, f64)],
) -> Result<PatternScan, TwinSlitError> {
    sc.validate()?;
    side.validate()?;
    equidistant_amplitude(&sc.with_detector_couplings(0.0, 0.0))?;
    if side.momentum() == 0.0 {
        return Err(TwinSlitError::ZeroMomentum);
    }

    let results: Vec<Result<PatternRow, TwinSlitError>> = schedule
        .par_iter()
        .enumerate()
        .map(|(index, &(k23, k43))| scan_point(sc, side, index, k23, k43))
        .collect();

    let mut scan = PatternScan {
        rows: Vec::with_capacity(schedule.len()),
        skipped: Vec::new(),
    };
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(row) => scan.rows.push(row),
            Err(TwinSlitError::ResonantCoupling { .. }) => {
                let (k23, k43) = schedule[index];
                warn!("schedule point {index} (k23 = {k23}, k43 = {k43}) is resonant; skipped");
                scan.skipped.push((index, k23, k43));
            }
            Err(e) => return Err(e),
        }
    }
    let short = scan.rows.iter().filter(|r| !r.large_distance).count();
    if short > 0 {
        warn!(
            "{short} of {} rows have an inferred distance not large compared to ħ/p = {}",
            scan.rows.len(),
            sc.hbar / side.momentum().abs()
        );
    }
    Ok(scan)
}

fn scan_point(
    sc: &TwinSlitScenario,
    side: &SchrodingerSide,
    index: usize,
    k23: f64,
    k43: f64,
) -> Result<PatternRow, TwinSlitError> {
    let point = sc.with_detector_couplings(k23, k43);
    let discrete = equidistant_amplitude(&point)?;
    let four = four_source_amplitude(&point)?;
    let impulse = ImpulseModel::Explicit(sc.j3);
    let x23 = infer_distance(sc.gamma2, k23, impulse, &sc.dynamics, side)?;
    let x43 = infer_distance(sc.gamma4, k43, impulse, &sc.dynamics, side)?;
    let SchrodingerTwoPath {
        paths: schrodinger,
        large_distance,
    } = two_path_quietly(
        &SchrodingerSide {
            x23: x23.x_im,
            x43: x43.x_im,
            ..*side
        },
        sc.hbar,
    )?;
    Ok(PatternRow {
        index,
        k23,
        k43,
        d23: x23.d_im,
        d43: x43.d_im,
        discrete_phase_23: discrete.phase_a,
        discrete_phase_43: discrete.phase_b,
        phase_difference: discrete.phase_difference(),
        x23: x23.x_im,
        x43: x43.x_im,
        schrodinger_phase_23: schrodinger.phase_a,
        schrodinger_phase_43: schrodinger.phase_b,
        discrete_intensity: discrete.intensity(),
        four_source_intensity: four.intensity(),
        schrodinger_intensity: schrodinger.intensity(),
        large_distance,
    })
}

impl PatternScan {
    /// `(I_max − I_min)/(I_max + I_min)` of the discrete intensity column.
    pub fn visibility(&self) -> Option<f64> {
        let (lo, hi) = self
            .rows
            .iter()
            .map(|r| r.discrete_intensity)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        (hi + lo > 0.0).then(|| (hi - lo) / (hi + lo))
    }

    /// Largest `|φ_discrete − φ_schrodinger|` over all rows and both legs,
    /// compared modulo 2π.
    pub fn max_phase_mismatch(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| {
                [
                    phase_distance(r.discrete_phase_23, r.schrodinger_phase_23).abs(),
                    phase_distance(r.discrete_phase_43, r.schrodinger_phase_43).abs(),
                ]
            })
            .fold(0.0, f64::max)
    }
}

/// A schedule of `points` coupling pairs whose slit→detector phase
/// difference steps evenly through `[0, 2π]`. `k43` stays at the scenario's
/// value and each `k23` is solved from the target phase, so the end points
/// and (for odd `points`) the midpoint `π` are hit to rounding.
pub fn phase_sweep(sc: &TwinSlitScenario, points: usize) -> Result<Vec<(f64, f64)>, TwinSlitError> {
    sc.validate()?;
    if points < 2 {
        return Err(ValidationError::new("points", "need at least 2 schedule points").into());
    }
    if sc.gamma2 == 0.0 || sc.j3 == 0.0 {
        return Err(ValidationError::new(
            "gamma2",
            "phase of the 2→3 leg cannot vary when Γ₂·j₃ = 0",
        )
        .into());
    }
    let base = sc.link_phase(sc.gamma4, sc.d(sc.k43)?, sc.j3);
    (0..points)
        .map(|i| {
            let target = base + 2.0 * PI * i as f64 / (points - 1) as f64;
            let d = target * 2.0 * PI * sc.hbar / (sc.gamma2 * sc.j3);
            let k23 = coupling_for_coefficient(d, &sc.dynamics).ok_or_else(|| {
                ValidationError::new("omega0", "ω₀²m = k leaves no coupling branch through k = 0")
            })?;
            Ok((k23, sc.k43))
        })
        .collect()
}
