//! Continuum Green's function of two coupled oscillators.
//!
//! In the continuum limit the action operator is
//! `−[[m∂² + k, k₁₂], [k₁₂, m∂² + k]]`, and its inverse is
//!
//! ```text
//! D(τ) = −∫ dω/2π [[A(ω), B(ω)], [B(ω), A(ω)]] e^{iωτ}
//! A(ω) = (ω²m − k) / (k₁₂² − (ω²m − k)²)
//! B(ω) = k₁₂ / (k₁₂² − (ω²m − k)²)
//! ```
//!
//! Both kernels split into simple poles at the normal-mode frequencies
//! `ω±² = (k ± k₁₂)/m`. The ω-integral is closed with the Feynman
//! prescription, under which every mode contributes
//! `∫ dω/2π e^{iωτ}/(ω² − ω₀² + iε) = −i e^{−iω₀|τ|}/(2ω₀)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::network::{require_finite, require_positive, OscillatorNetwork, ValidationError};

/// Relative size below which a kernel denominator counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("continuum Green's function needs exactly two oscillators, got {0}")]
    NotAPair(usize),
    #[error("ω = {omega} sits on a pole of the frequency kernels")]
    PoleAtEvaluation { omega: f64 },
    #[error("unstable normal mode: |k12| = {k12} must be below k = {spring}")]
    UnstableMode { k12: f64, spring: f64 },
    #[error("resonant coupling: k12² = (ω0²m − k)² at ω0 = {omega0}")]
    ResonantCoupling { omega0: f64 },
}

/// A monochromatic line `j₁(ω)* = Γ δ(ω − ω₀)` together with the partner's
/// impulse `j₂(ω₀)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSource {
    pub gamma: f64,
    pub omega0: f64,
    pub j_value: f64,
}

impl SpectralSource {
    pub fn new(gamma: f64, omega0: f64, j_value: f64) -> Result<Self, ValidationError> {
        require_finite("gamma", gamma)?;
        require_positive("omega0", omega0)?;
        require_finite("j_value", j_value)?;
        Ok(Self {
            gamma,
            omega0,
            j_value,
        })
    }
}

/// `A(ω)` and `B(ω)` of a two-oscillator network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenKernels {
    mass: f64,
    spring: f64,
    k12: f64,
}

pub fn freq_kernels(net: &OscillatorNetwork) -> Result<GreenKernels, GreenError> {
    let k12 = net.k12().ok_or(GreenError::NotAPair(net.num_sources()))?;
    Ok(GreenKernels {
        mass: net.mass(),
        spring: net.spring(),
        k12,
    })
}

impl GreenKernels {
    pub fn k12(&self) -> f64 {
        self.k12
    }

    /// `B ≡ 0`: the oscillators decouple and `D` is diagonal.
    pub fn is_degenerate(&self) -> bool {
        self.k12 == 0.0
    }

    /// `ω²m − k`, the detuning from the uncoupled resonance.
    pub fn detuning(&self, omega: f64) -> f64 {
        omega * omega * self.mass - self.spring
    }

    pub fn denominator(&self, omega: f64) -> Result<f64, GreenError> {
        let det = self.detuning(omega);
        let den = self.k12 * self.k12 - det * det;
        let scale = self.k12 * self.k12 + det * det;
        if scale == 0.0 || den.abs() <= POLE_TOLERANCE * scale {
            return Err(GreenError::PoleAtEvaluation { omega });
        }
        Ok(den)
    }

    pub fn a(&self, omega: f64) -> Result<f64, GreenError> {
        Ok(self.detuning(omega) / self.denominator(omega)?)
    }

    pub fn b(&self, omega: f64) -> Result<f64, GreenError> {
        Ok(self.k12 / self.denominator(omega)?)
    }

    /// Positive-frequency poles `(ω₊, ω₋)`; `None` when a mode is not
    /// oscillatory.
    pub fn poles(&self) -> Option<(f64, f64)> {
        let plus = (self.spring + self.k12) / self.mass;
        let minus = (self.spring - self.k12) / self.mass;
        (plus > 0.0 && minus > 0.0).then(|| (plus.sqrt(), minus.sqrt()))
    }
}

/// `D(τ)`. The off-diagonal element is stored once, so `D₁₂ = D₂₁` holds by
/// construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenMatrix {
    pub diagonal: Complex64,
    pub off_diagonal: Complex64,
}

impl GreenMatrix {
    pub fn entry(&self, i: usize, m: usize) -> Complex64 {
        if i == m {
            self.diagonal
        } else {
            self.off_diagonal
        }
    }

    pub fn to_array(self) -> [[Complex64; 2]; 2] {
        [
            [self.diagonal, self.off_diagonal],
            [self.off_diagonal, self.diagonal],
        ]
    }
}

/// Time-ordered single-mode propagator `−i e^{−iω₀|τ|}/(2ω₀)`.
fn mode_propagator(omega0: f64, tau: f64) -> Complex64 {
    Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -omega0 * tau.abs()) / (2.0 * omega0)
}

/// `D_im(τ)` by residues.
pub fn time_domain_green(net: &OscillatorNetwork, tau: f64) -> Result<GreenMatrix, GreenError> {
    let kernels = freq_kernels(net)?;
    let (plus, minus) = kernels.poles().ok_or(GreenError::UnstableMode {
        k12: kernels.k12,
        spring: kernels.spring,
    })?;
    Ok(green_from_modes(net.mass(), plus, minus, tau))
}

fn green_from_modes(mass: f64, plus: f64, minus: f64, tau: f64) -> GreenMatrix {
    let gp = mode_propagator(plus, tau);
    let gm = mode_propagator(minus, tau);
    GreenMatrix {
        diagonal: (gp + gm) / (2.0 * mass),
        off_diagonal: (gp - gm) / (2.0 * mass),
    }
}

/// Sampling and quadrature layout for [`green_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualGrid {
    /// The source is integrated over `[−support, support]`.
    pub support: f64,
    /// The residual is sampled on `[−sample_half_span, sample_half_span]`.
    pub sample_half_span: f64,
    pub samples: usize,
    /// Target Simpson step of the convolution integral.
    pub quad_step: f64,
    /// Step of the central second difference for `q̈`.
    pub diff_step: f64,
}

/// Sized for the reference pulse `f₁(t) = exp(−t²/2σ²)`, `σ = 0.25`, on
/// oscillator 1 and nothing on oscillator 2.
impl Default for ResidualGrid {
    fn default() -> Self {
        Self {
            support: 6.0,
            sample_half_span: 3.0,
            samples: 61,
            quad_step: 1e-3,
            diff_step: 1e-2,
        }
    }
}

/// Composite Simpson on `[a, b]` with at least `ceil((b−a)/h)` intervals.
fn simpson<F: Fn(f64) -> Complex64>(a: f64, b: f64, h: f64, f: F) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let mut n = ((b - a) / h).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let step = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * step) * w;
    }
    acc * (step / 3.0)
}

/// `q_i(t) = Σ_m ∫ D_im(t − t′) f_m(t′) dt′`, split at the kink `t′ = t`.
fn response<F>(
    mass: f64,
    modes: (f64, f64),
    source: &F,
    grid: &ResidualGrid,
    t: f64,
) -> [Complex64; 2]
where
    F: Fn(usize, f64) -> f64,
{
    let lo = -grid.support;
    let hi = grid.support;
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let integrand = |tp: f64| {
            let d = green_from_modes(mass, modes.0, modes.1, t - tp);
            d.entry(i, 0) * source(0, tp) + d.entry(i, 1) * source(1, tp)
        };
        let split = t.clamp(lo, hi);
        *slot = simpson(lo, split, grid.quad_step, integrand)
            + simpson(split, hi, grid.quad_step, integrand);
    }
    out
}

/// RMS over sample points and both oscillators of
/// `−(m q̈_i + k q_i + k₁₂ q_other) − f_i`, where `q = D * f`.
///
/// `source(i, t)` is the drive on oscillator `i`; it must be smooth and
/// negligible outside `[−grid.support, grid.support]`.
pub fn green_residual<F>(
    net: &OscillatorNetwork,
    source: F,
    grid: &ResidualGrid,
) -> Result<f64, GreenError>
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    let kernels = freq_kernels(net)?;
    let modes = kernels.poles().ok_or(GreenError::UnstableMode {
        k12: kernels.k12,
        spring: kernels.spring,
    })?;
    if grid.samples < 1 {
        return Err(ValidationError::new("samples", "need at least one sample").into());
    }
    require_positive("quad_step", grid.quad_step)?;
    require_positive("diff_step", grid.diff_step)?;

    let mass = net.mass();
    let spring = net.spring();
    let k12 = kernels.k12;
    let h = grid.diff_step;
    let times: Vec<f64> = (0..grid.samples)
        .map(|s| {
            if grid.samples == 1 {
                0.0
            } else {
                -grid.sample_half_span
                    + 2.0 * grid.sample_half_span * s as f64 / (grid.samples - 1) as f64
            }
        })
        .collect();

    let squares: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let q = response(mass, modes, &source, grid, t);
            let qp = response(mass, modes, &source, grid, t + h);
            let qm = response(mass, modes, &source, grid, t - h);
            let mut sq = 0.0;
            for i in 0..2 {
                let qdd = (qp[i] - q[i] * 2.0 + qm[i]) / (h * h);
                let r = -(qdd * mass + q[i] * spring + q[1 - i] * k12) - source(i, t);
                sq += r.norm_sqr();
            }
            sq
        })
        .collect();
    let mean = squares.iter().sum::<f64>() / (2 * times.len()) as f64;
    Ok(mean.sqrt())
}

/// Phase of `Z ∝ exp[i·phase]` between two monochromatically linked
/// sources: `Γ₁ k₁₂ j₂(ω₀) / (2πħ (k₁₂² − (ω₀²m − k)²))`.
pub fn pairwise_phase(
    source: &SpectralSource,
    net: &OscillatorNetwork,
    hbar: f64,
) -> Result<f64, GreenError> {
    require_positive("hbar", hbar)?;
    let kernels = freq_kernels(net)?;
    let b = kernels
        .b(source.omega0)
        .map_err(|_| GreenError::ResonantCoupling {
            omega0: source.omega0,
        })?;
    Ok(source.gamma * b * source.j_value / (2.0 * PI * hbar))
}

/// The `J₁D₁₁J₁ + J₂D₂₂J₂` phase that [`pairwise_phase`] drops, with both
/// lines taken at unit spectral weight: `(Γ₁² + j₂²) A(ω₀) / (4πħ)`.
pub fn self_interaction_phase(
    source: &SpectralSource,
    net: &OscillatorNetwork,
    hbar: f64,
) -> Result<f64, GreenError> {
    require_positive("hbar", hbar)?;
    let kernels = freq_kernels(net)?;
    let a = kernels
        .a(source.omega0)
        .map_err(|_| GreenError::ResonantCoupling {
            omega0: source.omega0,
        })?;
    let weight = source.gamma * source.gamma + source.j_value * source.j_value;
    Ok(weight * a / (4.0 * PI * hbar))
}
