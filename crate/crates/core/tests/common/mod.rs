//! Reference computations shared by the integration tests. Nothing here
//! calls into the code paths it is used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use pathamp_core::{Amplitude, OscillatorNetwork};

/// Determinant by dense Gaussian elimination with partial pivoting.
pub fn dense_det(rows: &[Vec<Complex64>]) -> Complex64 {
    let mut a = rows.to_vec();
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i][k].norm() > a[p][k].norm() {
                p = i;
            }
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k];
        det *= pivot;
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        for i in k + 1..n {
            let l = a[i][k] / pivot;
            for j in k..n {
                let u = a[k][j];
                a[i][j] -= l * u;
            }
        }
    }
    det
}

/// Phase difference reduced to (−π, π].
pub fn phase_gap(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

pub fn amplitudes_close(a: Amplitude, b: Amplitude, tol: f64) -> bool {
    (a.log_magnitude - b.log_magnitude).abs() <= tol && phase_gap(a.phase, b.phase).abs() <= tol
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Panel breakpoints on [0, cutoff]: uniform panels, refined geometrically
/// towards each near-real pole.
pub fn graded_breakpoints(cutoff: f64, panel: f64, poles: &[(f64, f64)]) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=((cutoff / panel).round() as usize))
        .map(|i| (i as f64 * panel).min(cutoff))
        .collect();
    for &(center, width) in poles {
        pts.push(center);
        for j in -4..=16 {
            let r = width * 2f64.powi(j);
            pts.push(center - r);
            pts.push(center + r);
        }
    }
    pts.retain(|&x| (0.0..=cutoff).contains(&x));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

/// `D_im(τ)` by direct quadrature of the damped ω-integral
/// `−∫_{|ω|≤Λ} dω/2π K(ω) e^{iωτ}`, with `ω² → ω² + iε` in the kernels.
///
/// The `−1/(mω²)` tail of `A(ω)` is handled by subtracting
/// `−1/(m(ω² + 1))` under the integral and adding back its exact transform
/// `−e^{−|τ|}/(2m)`.
pub struct DampedGreenQuadrature {
    mass: f64,
    spring: f64,
    k12: f64,
    epsilon: f64,
    nodes: Vec<(f64, f64)>,
}

impl DampedGreenQuadrature {
    pub fn new(net: &OscillatorNetwork, epsilon: f64, cutoff: f64) -> Self {
        let mass = net.mass();
        let spring = net.spring();
        let k12 = net.coupling(0, 1);
        let poles: Vec<(f64, f64)> = [spring + k12, spring - k12]
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| {
                let w = (s / mass).sqrt();
                (w, epsilon / (2.0 * w * mass))
            })
            .collect();
        let bp = graded_breakpoints(cutoff, 0.05, &poles);
        let gl = gauss_legendre(10);
        let mut nodes = Vec::new();
        for win in bp.windows(2) {
            let (a, b) = (win[0], win[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, w) in &gl {
                nodes.push((mid + half * x, half * w));
            }
        }
        Self {
            mass,
            spring,
            k12,
            epsilon,
            nodes,
        }
    }

    fn kernels(&self, omega: f64) -> (Complex64, Complex64) {
        let w2 = Complex64::new(omega * omega, self.epsilon);
        let det = w2 * self.mass - self.spring;
        let den = self.k12 * self.k12 - det * det;
        (det / den, self.k12 / den)
    }

    /// `(D₁₁, D₁₂)` at `τ`.
    pub fn green(&self, tau: f64) -> (Complex64, Complex64) {
        let mut a_int = Complex64::new(0.0, 0.0);
        let mut b_int = Complex64::new(0.0, 0.0);
        for &(w, wt) in &self.nodes {
            let (a, b) = self.kernels(w);
            let asym = -1.0 / (self.mass * (w * w + 1.0));
            let c = (w * tau).cos() * wt;
            a_int += (a - asym) * c;
            b_int += b * c;
        }
        // even integrand: ∫_{−Λ}^{Λ} dω/2π = (1/π) ∫_0^Λ
        let a_full = a_int / PI - (-tau.abs()).exp() / (2.0 * self.mass);
        let b_full = b_int / PI;
        (-a_full, -b_full)
    }
}

/// Stencil moments `Σ_s w_s s^p` of a symmetric lattice row, for the
/// Taylor expansion of the applied stencil.
pub fn stencil_moments(weights: &[(i64, f64)], max_power: u32) -> Vec<f64> {
    (0..=max_power)
        .map(|p| {
            weights
                .iter()
                .map(|&(s, w)| w * (s as f64).powi(p as i32))
                .sum()
        })
        .collect()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Derivatives `q^(p)(t)` of a polynomial with increasing-power coefficients.
pub fn poly_derivative(coef: &[f64], order: u32, t: f64) -> f64 {
    let mut c: Vec<f64> = coef.to_vec();
    for _ in 0..order {
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, &v)| p as f64 * v)
            .collect();
    }
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}
