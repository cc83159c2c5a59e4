//! Independent checks of the closed-form Gaussian integral and of the
//! lattice stencil.
//!
//! [`brute_force_amplitude`] integrates `exp[i(½ Q·(A+iεI)·Q + J·Q)]` on a
//! tensor trapezoid grid, which is only affordable up to three dimensions.
//! The oscillatory integral is conditionally convergent, so the damping `ε`
//! is mandatory and the closed form must be evaluated with the same `A + iεI`
//! for a like-for-like comparison. No extrapolation to `ε → 0` is attempted.
//!
//! [`continuum_convergence_report`] applies interior rows of the symmetrized
//! action matrix to exact solutions of the continuum equations of motion and
//! tracks how the residual falls with `Δt`.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::action::{
    build_action_matrix, symmetrize, transition_amplitude, ActionError, ActionMatrix,
};
use crate::amplitude::Amplitude;
use crate::network::{require_positive, OscillatorNetwork, ValidationError};

pub const MAX_BRUTE_FORCE_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("brute-force quadrature supports at most {MAX_BRUTE_FORCE_DIM} dimensions, got {dim}")]
    DimensionTooLarge { dim: usize },
    #[error("quadrature not converged: doubling the grid changed the result by {change:e} (limit {limit:e})")]
    NonConvergent { change: f64, limit: f64 },
    #[error("normal mode unavailable: {0}")]
    ModeUnavailable(String),
}

/// Tensor trapezoid grid on `[−L, L]^d` with damping `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub half_width: f64,
    /// Odd, so the origin is a node.
    pub points_per_axis: usize,
    pub epsilon: f64,
    /// Relative accuracy the result is reported at. Doubling the grid may
    /// move the result by at most ten times this.
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub const DEFAULT_TOLERANCE: f64 = 1e-2;

    pub fn new(
        half_width: f64,
        points_per_axis: usize,
        epsilon: f64,
        tolerance: f64,
    ) -> Result<Self, ValidationError> {
        require_positive("half_width", half_width)?;
        require_positive("epsilon", epsilon)?;
        require_positive("tolerance", tolerance)?;
        if points_per_axis < 3 || points_per_axis.is_multiple_of(2) {
            return Err(ValidationError::new(
                "points_per_axis",
                format!("must be odd and at least 3, got {points_per_axis}"),
            ));
        }
        Ok(Self {
            half_width,
            points_per_axis,
            epsilon,
            tolerance,
        })
    }

    /// Box `L = 8/√ε`, where the damping envelope has fallen to `e⁻³²`.
    pub fn for_epsilon(epsilon: f64, points_per_axis: usize) -> Result<Self, ValidationError> {
        require_positive("epsilon", epsilon)?;
        Self::new(
            8.0 / epsilon.sqrt(),
            points_per_axis,
            epsilon,
            Self::DEFAULT_TOLERANCE,
        )
    }

    fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.carry.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.carry.im);
    }

    fn total(self) -> Complex64 {
        self.sum + self.carry
    }
}

fn neumaier(sum: f64, x: f64, carry: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}

/// Fixed-shape binary reduction, independent of thread count.
fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Brute-force value of `∫ dQ exp[i(½ Q·(A+iεI)·Q + J·Q)]` for `dim A ≤ 3`.
///
/// The grid is evaluated at twice the requested resolution in one pass; the
/// requested grid is the subset of even nodes. The returned value is the
/// requested-resolution sum, and the refined sum guards it.
pub fn brute_force_amplitude(
    a: &ActionMatrix,
    source: &[f64],
    spec: &QuadratureSpec,
) -> Result<Amplitude, OracleError> {
    let (coarse, fine) = trapezoid_pair(a, source, spec)?;
    let change = (coarse - fine).norm() / fine.norm();
    let limit = 10.0 * spec.tolerance;
    if change.is_nan() || change > limit {
        return Err(OracleError::NonConvergent { change, limit });
    }
    Ok(Amplitude::from_complex(coarse))
}

fn trapezoid_pair(
    a: &ActionMatrix,
    source: &[f64],
    spec: &QuadratureSpec,
) -> Result<(Complex64, Complex64), OracleError> {
    let dim = a.dim();
    if dim > MAX_BRUTE_FORCE_DIM {
        return Err(OracleError::DimensionTooLarge { dim });
    }
    if source.len() != dim {
        return Err(ActionError::DimensionMismatch {
            expected: dim,
            actual: source.len(),
        }
        .into());
    }
    let damped = symmetrize(a).regularized(spec.epsilon);

    // pad to three axes; unused axes have a single node at the origin
    let mut mat = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut j = [0.0; 3];
    for r in 0..dim {
        for c in 0..dim {
            mat[r][c] = damped.get(r, c);
        }
        j[r] = source[r];
    }

    let fine_points = 2 * spec.points_per_axis - 1;
    let h = 0.5 * spec.step();
    let axis_len = |axis: usize| if axis < dim { fine_points } else { 1 };
    let node = |axis: usize, idx: usize| {
        if axis < dim {
            -spec.half_width + idx as f64 * h
        } else {
            0.0
        }
    };
    let weight = |axis: usize, idx: usize, coarse: bool| {
        if axis >= dim {
            return 1.0;
        }
        let last = fine_points - 1;
        let base = if coarse { 2.0 * h } else { h };
        if idx == 0 || idx == last {
            0.5 * base
        } else {
            base
        }
    };

    let i = Complex64::new(0.0, 1.0);
    let (nx, ny, nz) = (axis_len(0), axis_len(1), axis_len(2));

    let planes: Vec<(Complex64, Complex64)> = (0..nx)
        .into_par_iter()
        .map(|ix| {
            let x = node(0, ix);
            let mut fine = CompensatedSum::default();
            let mut coarse = CompensatedSum::default();
            for iy in 0..ny {
                let y = node(1, iy);
                // exponent along z is c0 + c1 z + c2 z²; step it by recurrence
                let c2 = i * 0.5 * mat[2][2];
                let c1 = i
                    * ((mat[0][2] + mat[2][0]) * 0.5 * x
                        + (mat[1][2] + mat[2][1]) * 0.5 * y
                        + j[2]);
                let c0 = i
                    * (0.5
                        * (mat[0][0] * x * x
                            + (mat[0][1] + mat[1][0]) * x * y
                            + mat[1][1] * y * y)
                        + j[0] * x
                        + j[1] * y);
                let z0 = node(2, 0);
                let mut value = (c0 + c1 * z0 + c2 * z0 * z0).exp();
                let mut ratio = (c1 * h + c2 * (2.0 * z0 * h + h * h)).exp();
                let ratio_step = (c2 * 2.0 * h * h).exp();
                let wxy_f = weight(0, ix, false) * weight(1, iy, false);
                let xy_even = (dim < 1 || ix % 2 == 0) && (dim < 2 || iy % 2 == 0);
                let wxy_c = weight(0, ix, true) * weight(1, iy, true);
                for iz in 0..nz {
                    fine.add(value * (wxy_f * weight(2, iz, false)));
                    if xy_even && (dim < 3 || iz % 2 == 0) {
                        coarse.add(value * (wxy_c * weight(2, iz, true)));
                    }
                    value *= ratio;
                    ratio *= ratio_step;
                }
            }
            (coarse.total(), fine.total())
        })
        .collect();

    let coarse: Vec<Complex64> = planes.iter().map(|p| p.0).collect();
    let fine: Vec<Complex64> = planes.iter().map(|p| p.1).collect();
    Ok((pairwise_sum(&coarse), pairwise_sum(&fine)))
}

/// Closed form and quadrature side by side, both on `A + iεI`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    pub epsilon: f64,
    pub closed_form: Amplitude,
    pub quadrature: Amplitude,
    pub relative_difference: f64,
}

pub fn compare_with_oracle(
    a: &ActionMatrix,
    source: &[f64],
    spec: &QuadratureSpec,
) -> Result<OracleComparison, OracleError> {
    let quadrature = brute_force_amplitude(a, source, spec)?;
    let closed_form = transition_amplitude(&symmetrize(a).regularized(spec.epsilon), source)?;
    Ok(OracleComparison {
        epsilon: spec.epsilon,
        closed_form,
        quadrature,
        relative_difference: quadrature.relative_difference(closed_form),
    })
}

/// Lattice test functions for the stencil convergence check. The same
/// profile is applied to every oscillator unless stated otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `q_a = cos(ω₊ t)` on every oscillator, `ω₊² = (k + k₁₂)/m`.
    /// For a single oscillator, `ω² = k/m`.
    SymmetricMode,
    /// `q₁ = cos(ω₋ t)`, `q₂ = −cos(ω₋ t)`, `ω₋² = (k − k₁₂)/m`. Pairs only.
    AntisymmetricMode,
    Constant(f64),
    /// Coefficients in increasing powers of `t`.
    Polynomial(Vec<f64>),
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::SymmetricMode => "symmetric_mode",
            TestFunction::AntisymmetricMode => "antisymmetric_mode",
            TestFunction::Constant(_) => "constant",
            TestFunction::Polynomial(_) => "polynomial",
        }
    }
}

/// `(q, q̈)` per oscillator at time `t`.
struct Profile {
    omega: f64,
    signs: Vec<f64>,
    kind: TestFunction,
}

impl Profile {
    fn new(net: &OscillatorNetwork, f: &TestFunction) -> Result<Self, OracleError> {
        let m = net.num_sources();
        let plain = |omega| Profile {
            omega,
            signs: vec![1.0; m],
            kind: f.clone(),
        };
        match f {
            TestFunction::SymmetricMode | TestFunction::AntisymmetricMode => {
                let (k12, sign) = match (m, f) {
                    (1, TestFunction::SymmetricMode) => (0.0, 1.0),
                    (2, TestFunction::SymmetricMode) => (net.coupling(0, 1), 1.0),
                    (2, TestFunction::AntisymmetricMode) => (net.coupling(0, 1), -1.0),
                    _ => {
                        return Err(OracleError::ModeUnavailable(format!(
                            "{} needs a {} network, got {m} oscillators",
                            f.name(),
                            if matches!(f, TestFunction::SymmetricMode) {
                                "one- or two-oscillator"
                            } else {
                                "two-oscillator"
                            }
                        )))
                    }
                };
                let omega_sq = (net.spring() + sign * k12) / net.mass();
                if omega_sq < 0.0 {
                    return Err(OracleError::ModeUnavailable(format!(
                        "mode frequency squared is negative ({omega_sq})"
                    )));
                }
                let mut p = plain(omega_sq.sqrt());
                if sign < 0.0 {
                    p.signs[1] = -1.0;
                }
                Ok(p)
            }
            _ => Ok(plain(0.0)),
        }
    }

    fn eval(&self, source: usize, t: f64) -> (f64, f64) {
        let s = self.signs[source];
        match &self.kind {
            TestFunction::SymmetricMode | TestFunction::AntisymmetricMode => {
                let c = (self.omega * t).cos();
                (s * c, -s * self.omega * self.omega * c)
            }
            TestFunction::Constant(c) => (*c, 0.0),
            TestFunction::Polynomial(coef) => {
                let q = coef.iter().rev().fold(0.0, |acc, &c| acc * t + c);
                let qdd = coef
                    .iter()
                    .enumerate()
                    .skip(2)
                    .rev()
                    .fold(0.0, |acc, (p, &c)| acc * t + (p * (p - 1)) as f64 * c);
                (q, qdd)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub steps: usize,
    /// Max over interior rows and oscillators of
    /// `|(A q)_i / Δt + (m q̈ + k q + Σ k_ab q_b)(t_i)|`.
    pub max_residual: f64,
    /// `log(r_prev / r) / log(Δt_prev / Δt)`; absent on the first row and
    /// when a residual vanishes.
    pub observed_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub test_function: TestFunction,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub const ORDER_RANGE: (f64, f64) = (1.6, 2.4);

    pub fn orders(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(|r| r.observed_order)
    }
}

/// Residual of the discrete equations of motion against the continuum
/// operator, for each `Δt` in `dt_list`.
///
/// The time window `[0, (N−1)Δt]` of `net` is held fixed; each refinement
/// uses as many lattice points as fit in it. Rows within two points of
/// either end are skipped, since the truncated stencil there is a boundary
/// condition rather than an approximation of `q̈`.
pub fn continuum_convergence_report(
    net: &OscillatorNetwork,
    dt_list: &[f64],
    test_function: &TestFunction,
) -> Result<ConvergenceReport, OracleError> {
    if dt_list.is_empty() {
        return Err(ValidationError::new("dt_list", "must not be empty").into());
    }
    for (idx, &dt) in dt_list.iter().enumerate() {
        require_positive("dt_list", dt)?;
        if idx > 0 && dt >= dt_list[idx - 1] {
            return Err(ValidationError::new("dt_list", "must be strictly decreasing").into());
        }
    }
    let profile = Profile::new(net, test_function)?;
    let span = (net.steps() - 1) as f64 * net.dt();

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let steps = (span / dt).round() as usize + 1;
        if steps < 5 {
            return Err(ValidationError::new(
                "dt_list",
                format!("Δt = {dt} leaves fewer than 5 lattice points in the window {span}"),
            )
            .into());
        }
        let lattice = net.with_lattice(dt, steps)?;
        let max_residual = max_stencil_residual(&lattice, &profile);
        let observed_order = rows.last().and_then(|prev| {
            let ratio = prev.max_residual / max_residual;
            (prev.max_residual > 0.0 && max_residual > 0.0)
                .then(|| ratio.ln() / (prev.dt / dt).ln())
        });
        rows.push(ConvergenceRow {
            dt,
            steps,
            max_residual,
            observed_order,
        });
    }
    Ok(ConvergenceReport {
        test_function: test_function.clone(),
        rows,
    })
}

fn max_stencil_residual(net: &OscillatorNetwork, profile: &Profile) -> f64 {
    let a = build_action_matrix(net);
    let n = net.steps();
    let m = net.num_sources();
    let dt = net.dt();
    let t = |step: usize| step as f64 * dt;

    let mut worst: f64 = 0.0;
    for src in 0..m {
        for step in 2..n - 2 {
            let row = net.index(src, step);
            let applied: f64 = a
                .row(row)
                .map(|(col, v)| v.re * profile.eval(col / n, t(col % n)).0)
                .sum();
            let (q, qdd) = profile.eval(src, t(step));
            let coupled: f64 = (0..m)
                .filter(|&b| b != src)
                .map(|b| net.coupling(src, b) * profile.eval(b, t(step)).0)
                .sum();
            let continuum = net.mass() * qdd + net.spring() * q + coupled;
            worst = worst.max((applied / dt + continuum).abs());
        }
    }
    worst
}
