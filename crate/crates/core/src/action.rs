//! The discrete action `½ Q·A·Q + J·Q` and its Gaussian integral.
//!
//! Lattice vectors are oscillator-major: all `N` samples of `q₁`, then all of
//! `q₂`, and so on. Within one oscillator block a row carries the stencil
//!
//! ```text
//! A[i][i]   = -(m/Δt + kΔt)
//! A[i][i+1] = +2m/Δt
//! A[i][i+2] = -m/Δt
//! ```
//!
//! and `-k_ab Δt` couples `q_a(t_i)` to `q_b(t_i)`. Samples outside the
//! lattice are pinned to zero, so the last two rows of each block are
//! truncated. Only the symmetric part of `A` enters `Q·A·Q`, and every
//! determinant and solve is carried out on that part.
//!
//! Storage is time-major (`step·M + source`), where the coupling terms sit
//! within `2M` of the diagonal. In oscillator-major order they would sit `N`
//! away and the band would be as wide as the lattice is long. All public
//! indices are oscillator-major.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use log::warn;
use num_complex::Complex64;
use thiserror::Error;

use crate::amplitude::{wrap_phase, Amplitude};
use crate::band::{BandError, BandLu, BandMatrix, LogDet};
use crate::network::{OscillatorNetwork, ValidationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("dimension mismatch: action has dimension {expected}, vector has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("action matrix is singular (pivot {pivot:e} at row {row})")]
    SingularAction { row: usize, pivot: f64 },
}

impl From<BandError> for ActionError {
    fn from(e: BandError) -> Self {
        match e {
            BandError::DimensionMismatch { expected, actual } => {
                ActionError::DimensionMismatch { expected, actual }
            }
            BandError::ZeroPivot { row } => ActionError::SingularAction { row, pivot: 0.0 },
        }
    }
}

/// The matrix `A` of the discrete action.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix {
    /// Time-major.
    band: BandMatrix,
    num_sources: usize,
    steps: usize,
    symmetrized: bool,
}

impl ActionMatrix {
    /// Wraps an arbitrary square matrix as a single-block action.
    pub fn from_dense(rows: &[Vec<Complex64>]) -> Result<Self, ActionError> {
        let band = BandMatrix::from_dense(rows)?;
        if band.dim() == 0 {
            return Err(ValidationError::new("action", "empty matrix").into());
        }
        let symmetrized = is_symmetric(&band);
        let steps = band.dim();
        Ok(Self {
            band,
            num_sources: 1,
            steps,
            symmetrized,
        })
    }

    pub fn from_real_dense(rows: &[Vec<f64>]) -> Result<Self, ActionError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_dense(&rows)
    }

    pub fn dim(&self) -> usize {
        self.band.dim()
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// The stored band, rows and columns in time-major order
    /// (`step·M + source`). Determinants are unaffected by the reordering.
    pub fn band(&self) -> &BandMatrix {
        &self.band
    }

    /// Storage position of oscillator-major index `i`.
    fn slot(&self, i: usize) -> usize {
        (i % self.steps) * self.num_sources + i / self.steps
    }

    /// Oscillator-major index of storage position `p`.
    fn index_of(&self, p: usize) -> usize {
        (p % self.num_sources) * self.steps + p / self.num_sources
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.band.get(self.slot(i), self.slot(j))
    }

    /// Entries of row `i` within the stored band, as `(column, value)`.
    /// Columns come in time-major order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.band
            .row(self.slot(i))
            .map(|(p, v)| (self.index_of(p), v))
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    /// `A + iεI`.
    pub fn regularized(&self, epsilon: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.dim() {
            out.band.add(i, i, Complex64::new(0.0, epsilon));
        }
        out
    }

    fn check_len(&self, len: usize) -> Result<(), ActionError> {
        if len != self.dim() {
            return Err(ActionError::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }
}

fn is_symmetric(band: &BandMatrix) -> bool {
    (0..band.dim()).all(|i| band.row(i).all(|(j, v)| band.get(j, i) == v))
}

/// The action matrix exactly as the lattice stencil prints it, before
/// symmetrization.
pub fn raw_action_matrix(net: &OscillatorNetwork) -> ActionMatrix {
    let m = net.num_sources();
    let n = net.steps();
    let dt = net.dt();
    let mass = net.mass();

    // time-major: the stencil reaches two steps, i.e. 2M slots; couplings
    // at the same step reach at most M − 1
    let reach = 2 * m;
    let slot = |a: usize, i: usize| i * m + a;
    let mut band = BandMatrix::zeros(net.dim(), reach, reach);

    let diag = -(mass / dt + net.spring() * dt);
    let first = 2.0 * mass / dt;
    let second = -mass / dt;
    for a in 0..m {
        for i in 0..n {
            let row = slot(a, i);
            band.set(row, row, Complex64::new(diag, 0.0));
            if i + 1 < n {
                band.set(row, slot(a, i + 1), Complex64::new(first, 0.0));
            }
            if i + 2 < n {
                band.set(row, slot(a, i + 2), Complex64::new(second, 0.0));
            }
            for b in 0..m {
                let kab = net.coupling(a, b);
                if b != a && kab != 0.0 {
                    band.set(row, slot(b, i), Complex64::new(-kab * dt, 0.0));
                }
            }
        }
    }

    ActionMatrix {
        band,
        num_sources: m,
        steps: n,
        symmetrized: false,
    }
}

/// Builds the symmetrized action matrix of `net`.
pub fn build_action_matrix(net: &OscillatorNetwork) -> ActionMatrix {
    symmetrize(&raw_action_matrix(net))
}

/// `(A + Aᵀ)/2`. Works on the stored band directly: symmetrizing commutes
/// with a symmetric reordering.
pub fn symmetrize(a: &ActionMatrix) -> ActionMatrix {
    let w = a.band.lower_bandwidth().max(a.band.upper_bandwidth());
    let n = a.dim();
    let mut band = BandMatrix::zeros(n, w, w);
    for i in 0..n {
        let (lo, hi) = band.row_span(i);
        for j in lo..hi {
            let v = (a.band.get(i, j) + a.band.get(j, i)) * 0.5;
            band.set(i, j, v);
        }
    }
    ActionMatrix {
        band,
        num_sources: a.num_sources,
        steps: a.steps,
        symmetrized: true,
    }
}

/// `½ Qᵀ A Q`, plus `J·Q` when a source is given.
pub fn quadratic_form(
    a: &ActionMatrix,
    q: &[f64],
    source: Option<&[f64]>,
) -> Result<Complex64, ActionError> {
    a.check_len(q.len())?;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &qi) in q.iter().enumerate() {
        let row: Complex64 = a.row(i).map(|(j, v)| v * q[j]).sum();
        total += row * qi;
    }
    total *= 0.5;
    if let Some(j) = source {
        a.check_len(j.len())?;
        total += j.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
    }
    Ok(total)
}

/// How the square root of `(2πi)^n / det A` was resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootBranch {
    /// The branch continuous in `A` over `Im A ⪰ 0`, equal to the value of
    /// the damped Gaussian integral: `π/4` per positive eigenvalue of a real
    /// symmetric `A`, `−π/4` per negative one.
    Continuous,
    /// Principal root of the full ratio. Used only when natural-order
    /// elimination breaks down and the continuous branch cannot be tracked.
    Principal,
}

/// Every intermediate of the closed-form Gaussian integral.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianEvaluation {
    pub amplitude: Amplitude,
    /// `((2πi)^n / det A)^{1/2}`.
    pub prefactor: Amplitude,
    /// `exp(−(i/2) J·A⁻¹·J)`.
    pub exp_factor: Amplitude,
    pub log_det: LogDet,
    /// `J·A⁻¹·J`.
    pub source_form: Complex64,
    pub branch: RootBranch,
}

/// `Z = ((2πi)^n / det A)^{1/2} · exp(−(i/2) J·A⁻¹·J)` with `n = dim A`.
pub fn transition_amplitude(a: &ActionMatrix, source: &[f64]) -> Result<Amplitude, ActionError> {
    gaussian_evaluation(a, source).map(|g| g.amplitude)
}

pub fn gaussian_evaluation(
    a: &ActionMatrix,
    source: &[f64],
) -> Result<GaussianEvaluation, ActionError> {
    a.check_len(source.len())?;
    let sym;
    let a = if a.symmetrized {
        a
    } else {
        sym = symmetrize(a);
        &sym
    };
    let n = a.dim();

    let lu = a.band.factor(true)?;
    check_pivots(&lu, a.band.max_abs()).map_err(|e| match e {
        ActionError::SingularAction { row, pivot } => ActionError::SingularAction {
            row: a.index_of(row),
            pivot,
        },
        e => e,
    })?;
    let log_det = lu.log_det();

    let (phase_of_minus_i_det, branch) = continuous_det_phase(a, log_det.phase);

    // (2πi)^n / det A = (2π)^n / det(−iA)
    let prefactor = Amplitude::new(
        0.5 * (n as f64 * TAU.ln() - log_det.log_magnitude),
        -0.5 * phase_of_minus_i_det,
    );

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (i, &x) in source.iter().enumerate() {
        rhs[a.slot(i)] = Complex64::new(x, 0.0);
    }
    let solved = lu.solve(&rhs)?;
    let source_form: Complex64 = rhs.iter().zip(&solved).map(|(j, y)| y * j.re).sum();
    // −(i/2)·c = Im(c)/2 − i Re(c)/2
    let exp_factor = Amplitude::new(0.5 * source_form.im, -0.5 * source_form.re);

    Ok(GaussianEvaluation {
        amplitude: prefactor * exp_factor,
        prefactor,
        exp_factor,
        log_det,
        source_form,
        branch,
    })
}

fn check_pivots(lu: &BandLu, scale: f64) -> Result<(), ActionError> {
    let tol = lu.dim() as f64 * f64::EPSILON * scale;
    for (row, p) in lu.pivots().enumerate() {
        // NaN pivots count as singular
        if p.norm().is_nan() || p.norm() <= tol {
            return Err(ActionError::SingularAction {
                row,
                pivot: p.norm(),
            });
        }
    }
    Ok(())
}

/// `arg det(−iA)` on the continuous branch, unwrapped.
///
/// For `Im A ⪰ 0` the Hermitian part of `−iA` is positive semidefinite, so the
/// natural-order pivots of `−iA` stay in the closed right half-plane and
/// `Σ arg(pivot)` is the continuous phase. The pivoted factorization fixes
/// the phase modulo 2π; the natural-order sum only selects the sheet.
fn continuous_det_phase(a: &ActionMatrix, det_phase: f64) -> (f64, RootBranch) {
    let n = a.dim();
    let wrapped = wrap_phase(det_phase - n as f64 * FRAC_PI_2);

    let natural = match a.band.factor(false) {
        Ok(lu) => lu,
        Err(_) => return (wrapped, principal_fallback()),
    };
    let mut reference = 0.0;
    for p in natural.pivots() {
        let arg = wrap_phase(p.arg() - FRAC_PI_2);
        // pivots of −iA with clearly negative real part: Im A is not
        // semidefinite or the elimination went unstable
        if arg.abs() > FRAC_PI_2 + 1e-6 {
            return (wrapped, principal_fallback());
        }
        reference += arg;
    }
    let turns = ((reference - wrapped) / TAU).round();
    let phase = wrapped + turns * TAU;
    if (phase - reference).abs() > 0.5 * PI {
        return (wrapped, principal_fallback());
    }
    (phase, RootBranch::Continuous)
}

fn principal_fallback() -> RootBranch {
    warn!("natural-order elimination failed; using principal square-root branch");
    RootBranch::Principal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(z: Complex64) -> f64 {
        assert_eq!(z.im, 0.0);
        z.re
    }

    #[test]
    fn printed_stencil_values() {
        let net = OscillatorNetwork::pair(1.0, 1.0, 0.1, 0.1, 5).unwrap();
        let raw = raw_action_matrix(&net);
        assert!((re(raw.get(1, 1)) + 10.1).abs() < 1e-12);
        assert!((re(raw.get(1, 2)) - 20.0).abs() < 1e-12);
        assert!((re(raw.get(1, 3)) + 10.0).abs() < 1e-12);
        assert!((re(raw.get(1, 6)) + 0.01).abs() < 1e-15);
        assert!((re(raw.get(6, 1)) + 0.01).abs() < 1e-15);
        assert_eq!(raw.get(1, 0), Complex64::new(0.0, 0.0));
        // Dirichlet truncation at the end of each block
        assert_eq!(raw.get(3, 5), Complex64::new(0.0, 0.0));
        assert_eq!(raw.get(4, 5), Complex64::new(0.0, 0.0));
        assert!(!raw.is_symmetrized());
    }

    #[test]
    fn symmetrized_entries() {
        let net = OscillatorNetwork::pair(1.0, 1.0, 0.1, 0.1, 5).unwrap();
        let a = build_action_matrix(&net);
        assert!(a.is_symmetrized());
        assert!((re(a.get(2, 1)) - 10.0).abs() < 1e-12);
        assert!((re(a.get(2, 0)) + 5.0).abs() < 1e-12);
        assert!((re(a.get(2, 7)) + 0.01).abs() < 1e-15);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(a.get(i, j), a.get(j, i));
            }
        }
    }

    #[test]
    fn single_oscillator_has_no_coupling_band() {
        let net = OscillatorNetwork::single(1.0, 1.0, 0.1, 6).unwrap();
        let a = build_action_matrix(&net);
        assert_eq!(a.band().lower_bandwidth(), 2);
        assert_eq!(a.dim(), 6);
    }

    #[test]
    fn coupled_band_does_not_grow_with_steps() {
        let coupling = vec![
            vec![0.0, 0.1, 0.2],
            vec![0.1, 0.0, 0.0],
            vec![0.2, 0.0, 0.0],
        ];
        let net = OscillatorNetwork::new(1.0, 1.0, coupling, 0.1, 500).unwrap();
        let a = build_action_matrix(&net);
        assert_eq!(a.band().lower_bandwidth(), 6);
        assert_eq!(a.band().upper_bandwidth(), 6);
        assert!((re(a.get(net.index(0, 7), net.index(2, 7))) + 0.02).abs() < 1e-15);
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let net = OscillatorNetwork::pair(1.0, 1.0, 0.0, 0.1, 5).unwrap();
        let a = build_action_matrix(&net);
        for i in 0..5 {
            for j in 5..10 {
                assert_eq!(a.get(i, j), Complex64::new(0.0, 0.0));
                assert_eq!(a.get(j, i), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn symmetrize_examples() {
        let sym = ActionMatrix::from_real_dense(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert!(sym.is_symmetrized());
        assert_eq!(symmetrize(&sym).to_dense(), sym.to_dense());
        let anti = ActionMatrix::from_real_dense(&[
            vec![0.0, 2.0, -1.0],
            vec![-2.0, 0.0, 4.0],
            vec![1.0, -4.0, 0.0],
        ])
        .unwrap();
        for row in symmetrize(&anti).to_dense() {
            for v in row {
                assert_eq!(v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let eye = ActionMatrix::from_real_dense(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(
            quadratic_form(&eye, &[0.0; 3], None).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            quadratic_form(&eye, &[1.0; 3], None).unwrap(),
            Complex64::new(1.5, 0.0)
        );
        assert_eq!(
            quadratic_form(&eye, &[1.0; 3], Some(&[1.0, 2.0, 3.0])).unwrap(),
            Complex64::new(7.5, 0.0)
        );
        assert_eq!(
            quadratic_form(&eye, &[1.0; 2], None).unwrap_err(),
            ActionError::DimensionMismatch {
                expected: 3,
                actual: 2
            }
        );
    }

    #[test]
    fn zero_source_gives_bare_prefactor() {
        let net = OscillatorNetwork::pair(1.0, 1.0, 0.1, 0.1, 5).unwrap();
        let a = build_action_matrix(&net);
        let g = gaussian_evaluation(&a, &[0.0; 10]).unwrap();
        assert_eq!(g.exp_factor, Amplitude::ONE);
        assert_eq!(g.amplitude, g.prefactor);
        assert_eq!(g.branch, RootBranch::Continuous);
    }

    #[test]
    fn one_dimensional_branches() {
        // ∫ exp(i a x²/2) dx = sqrt(2π/|a|) e^{±iπ/4}
        for (a, phase) in [(2.0, PI / 4.0), (-2.0, -PI / 4.0)] {
            let m = ActionMatrix::from_real_dense(&[vec![a]]).unwrap();
            let z = transition_amplitude(&m, &[0.0]).unwrap();
            assert!((z.phase - phase).abs() < 1e-15);
            assert!((z.log_magnitude - 0.5 * (TAU / 2.0).ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_definite_three_dim_branch() {
        // three negative eigenvalues: phase −3π/4, where the principal root
        // of the full ratio would give +π/4
        let m = ActionMatrix::from_real_dense(&[
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -2.0, 0.0],
            vec![0.0, 0.0, -0.5],
        ])
        .unwrap();
        let z = transition_amplitude(&m, &[0.0; 3]).unwrap();
        assert!((z.phase + 0.75 * PI).abs() < 1e-14);
    }

    #[test]
    fn singular_action_rejected() {
        let m = ActionMatrix::from_real_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            transition_amplitude(&m, &[0.0, 0.0]),
            Err(ActionError::SingularAction { .. })
        ));
    }

    #[test]
    fn source_term_matches_one_dim_formula() {
        // exp(−i j²/(2a))
        let m = ActionMatrix::from_real_dense(&[vec![3.0]]).unwrap();
        let g = gaussian_evaluation(&m, &[1.5]).unwrap();
        assert!((g.source_form.re - 0.75).abs() < 1e-15);
        assert!((g.exp_factor.phase + 0.375).abs() < 1e-15);
        assert_eq!(g.exp_factor.log_magnitude, 0.0);
    }
}
