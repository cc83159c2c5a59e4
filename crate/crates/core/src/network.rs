//! Coupled harmonic-oscillator networks on a uniform time lattice.

use thiserror::Error;

/// A parameter that failed validation, named by field.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid `{field}`: {reason}")]
pub struct ValidationError {
    pub field: String,
    pub reason: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn require_finite(field: &str, value: f64) -> Result<(), ValidationError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::new(
            field,
            format!("must be finite, got {value}"),
        ))
    }
}

pub(crate) fn require_positive(field: &str, value: f64) -> Result<(), ValidationError> {
    require_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(
            field,
            format!("must be positive, got {value}"),
        ))
    }
}

/// `M` identical oscillators of mass `m` and stiffness `k`, linked pairwise by
/// `k_ab q_a q_b`, sampled at `N` lattice points spaced `Δt` apart.
///
/// The potential is `V = ½ k Σ q_a² + Σ_{a<b} k_ab q_a q_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorNetwork {
    mass: f64,
    spring: f64,
    coupling: Vec<Vec<f64>>,
    dt: f64,
    steps: usize,
}

impl OscillatorNetwork {
    pub fn new(
        mass: f64,
        spring: f64,
        coupling: Vec<Vec<f64>>,
        dt: f64,
        steps: usize,
    ) -> Result<Self, ValidationError> {
        let m = coupling.len();
        if m < 1 {
            return Err(ValidationError::new(
                "num_sources",
                "need at least one oscillator",
            ));
        }
        require_positive("mass", mass)?;
        require_finite("spring", spring)?;
        if spring < 0.0 {
            return Err(ValidationError::new(
                "spring",
                format!("must be non-negative, got {spring}"),
            ));
        }
        require_positive("dt", dt)?;
        if steps < 2 {
            return Err(ValidationError::new(
                "steps",
                format!("need at least 2 lattice points, got {steps}"),
            ));
        }
        for (a, row) in coupling.iter().enumerate() {
            if row.len() != m {
                return Err(ValidationError::new(
                    "coupling",
                    format!("row {a} has {} entries, expected {m}", row.len()),
                ));
            }
            for (b, &v) in row.iter().enumerate() {
                require_finite("coupling", v)?;
                if a == b && v != 0.0 {
                    return Err(ValidationError::new(
                        "coupling",
                        format!("diagonal entry ({a}, {a}) must be zero, got {v}"),
                    ));
                }
                if v != coupling[b][a] {
                    return Err(ValidationError::new(
                        "coupling",
                        format!("not symmetric at ({a}, {b})"),
                    ));
                }
            }
        }
        Ok(Self {
            mass,
            spring,
            coupling,
            dt,
            steps,
        })
    }

    pub fn single(mass: f64, spring: f64, dt: f64, steps: usize) -> Result<Self, ValidationError> {
        Self::new(mass, spring, vec![vec![0.0]], dt, steps)
    }

    /// Two oscillators with coupling `k12`.
    pub fn pair(
        mass: f64,
        spring: f64,
        k12: f64,
        dt: f64,
        steps: usize,
    ) -> Result<Self, ValidationError> {
        Self::new(
            mass,
            spring,
            vec![vec![0.0, k12], vec![k12, 0.0]],
            dt,
            steps,
        )
    }

    pub fn num_sources(&self) -> usize {
        self.coupling.len()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spring(&self) -> f64 {
        self.spring
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.coupling[a][b]
    }

    pub fn coupling_matrix(&self) -> &[Vec<f64>] {
        &self.coupling
    }

    /// `k₁₂` of a two-oscillator network.
    pub fn k12(&self) -> Option<f64> {
        (self.num_sources() == 2).then(|| self.coupling[0][1])
    }

    /// Total lattice dimension `M·N`.
    pub fn dim(&self) -> usize {
        self.num_sources() * self.steps
    }

    /// Index of `q_a(t_i)` in the oscillator-major lattice vector.
    pub fn index(&self, source: usize, step: usize) -> usize {
        source * self.steps + step
    }

    pub fn with_lattice(&self, dt: f64, steps: usize) -> Result<Self, ValidationError> {
        Self::new(self.mass, self.spring, self.coupling.clone(), dt, steps)
    }

    pub fn with_coupling(&self, coupling: Vec<Vec<f64>>) -> Result<Self, ValidationError> {
        Self::new(self.mass, self.spring, coupling, self.dt, self.steps)
    }

    /// The network restricted to one oscillator, couplings dropped.
    pub fn isolated(&self) -> Self {
        Self {
            mass: self.mass,
            spring: self.spring,
            coupling: vec![vec![0.0]],
            dt: self.dt,
            steps: self.steps,
        }
    }

    /// Normal-mode frequencies `(ω₊, ω₋)` of a pair, `ω±² = (k ± k₁₂)/m`.
    /// `None` unless both squares are positive.
    pub fn normal_modes(&self) -> Option<(f64, f64)> {
        let k12 = self.k12()?;
        let plus = (self.spring + k12) / self.mass;
        let minus = (self.spring - k12) / self.mass;
        (plus > 0.0 && minus > 0.0).then(|| (plus.sqrt(), minus.sqrt()))
    }
}
