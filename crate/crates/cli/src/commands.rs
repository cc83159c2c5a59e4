use log::{info, warn};
use pathamp_core::{
    build_action_matrix, compare_with_oracle, continuum_convergence_report, coupling_coefficient,
    gaussian_evaluation, infer_distance, pairwise_phase, pattern_scan, phase_sweep,
    self_interaction_phase, symmetrize, ConvergenceReport, GaussianEvaluation, OscillatorNetwork,
    RootBranch, SpectralSource, TwinSlitError, ValidationError, MAX_BRUTE_FORCE_DIM,
};

use crate::config::{LinkConfig, ScenarioConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

pub const AMPLITUDE_COLUMNS: &[&str] = &[
    "epsilon",
    "log_magnitude",
    "phase",
    "det_log_magnitude",
    "det_phase",
    "source_form_re",
    "source_form_im",
    "exp_log_magnitude",
    "exp_phase",
    "branch",
    "oracle_log_magnitude",
    "oracle_phase",
    "relative_difference",
];

pub const TWINSLIT_COLUMNS: &[&str] = &[
    "index",
    "k23",
    "k43",
    "d23",
    "d43",
    "discrete_phase_23",
    "discrete_phase_43",
    "phase_difference",
    "x23",
    "x43",
    "schrodinger_phase_23",
    "schrodinger_phase_43",
    "discrete_intensity",
    "four_source_intensity",
    "schrodinger_intensity",
    "large_distance",
];

pub const CONVERGE_COLUMNS: &[&str] = &[
    "dt",
    "steps",
    "max_residual",
    "observed_order",
    "order_flag",
];

pub const METRIC_COLUMNS: &[&str] = &[
    "gamma",
    "k_im",
    "status",
    "d_im",
    "scale",
    "x_im",
    "pairwise_phase",
    "self_phase",
    "schrodinger_phase",
];

fn branch_name(b: RootBranch) -> &'static str {
    match b {
        RootBranch::Continuous => "continuous",
        RootBranch::Principal => "principal",
    }
}

fn evaluation_row(eps: f64, g: &GaussianEvaluation) -> Vec<Cell> {
    vec![
        eps.into(),
        g.amplitude.log_magnitude.into(),
        g.amplitude.phase.into(),
        g.log_det.log_magnitude.into(),
        g.log_det.phase.into(),
        g.source_form.re.into(),
        g.source_form.im.into(),
        g.exp_factor.log_magnitude.into(),
        g.exp_factor.phase.into(),
        Cell::Text(branch_name(g.branch)),
    ]
}

pub fn amplitude(cfg: &ScenarioConfig, oracle: bool) -> Result<String, CliError> {
    let net = cfg.network()?;
    let j = cfg.source(net.dim())?;
    let a = build_action_matrix(&net);
    let g = gaussian_evaluation(&a, &j)?;
    if g.branch == RootBranch::Principal {
        warn!("square-root branch fell back to the principal root");
    }

    let mut table = Table::new(AMPLITUDE_COLUMNS);
    let mut row = evaluation_row(0.0, &g);
    row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
    table.push(row);

    if oracle {
        if net.dim() > MAX_BRUTE_FORCE_DIM {
            return Err(CliError::Validation(format!(
                "--oracle needs sources × steps ≤ {MAX_BRUTE_FORCE_DIM}, got {}",
                net.dim()
            )));
        }
        let tolerance_exceeded = cfg.quadrature()?.into_iter().try_fold(false, |bad, spec| {
            let cmp = compare_with_oracle(&a, &j, &spec)?;
            let g = gaussian_evaluation(&symmetrize(&a).regularized(spec.epsilon), &j)?;
            let mut row = evaluation_row(spec.epsilon, &g);
            row.extend([
                cmp.quadrature.log_magnitude.into(),
                cmp.quadrature.phase.into(),
                cmp.relative_difference.into(),
            ]);
            table.push(row);
            let over = cmp.relative_difference > spec.tolerance;
            if over {
                warn!(
                    "ε = {}: closed form and quadrature differ by {:e} (tolerance {:e})",
                    spec.epsilon, cmp.relative_difference, spec.tolerance
                );
            }
            Ok::<_, CliError>(bad || over)
        })?;
        if !tolerance_exceeded {
            info!("closed form agrees with quadrature at every ε");
        }
    }
    Ok(table.into_string())
}

pub fn twinslit(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let (sc, t) = cfg.twinslit()?;
    let side = cfg.schrodinger()?;
    let schedule: Vec<(f64, f64)> = match (&t.schedule, t.sweep_points) {
        (Some(s), None) => s.iter().map(|&[a, b]| (a, b)).collect(),
        (None, Some(points)) => phase_sweep(&sc, points)?,
        _ => {
            return Err(ValidationError::new(
                "twinslit.schedule",
                "give exactly one of schedule or sweep_points",
            )
            .into())
        }
    };
    if schedule.is_empty() {
        return Err(ValidationError::new("twinslit.schedule", "must not be empty").into());
    }
    let scan = pattern_scan(&sc, &side, &schedule)?;
    if scan.rows.is_empty() {
        return Err(CliError::Resonance(format!(
            "every one of the {} schedule points is resonant",
            scan.skipped.len()
        )));
    }
    if let Some(v) = scan.visibility() {
        info!(
            "visibility {v}, max phase mismatch {:e}",
            scan.max_phase_mismatch()
        );
    }

    let mut table = Table::new(TWINSLIT_COLUMNS);
    for r in &scan.rows {
        table.push(vec![
            r.index.into(),
            r.k23.into(),
            r.k43.into(),
            r.d23.into(),
            r.d43.into(),
            r.discrete_phase_23.into(),
            r.discrete_phase_43.into(),
            r.phase_difference.into(),
            r.x23.into(),
            r.x43.into(),
            r.schrodinger_phase_23.into(),
            r.schrodinger_phase_43.into(),
            r.discrete_intensity.into(),
            r.four_source_intensity.into(),
            r.schrodinger_intensity.into(),
            usize::from(r.large_distance).into(),
        ]);
    }
    Ok(table.into_string())
}

pub fn converge(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let net = cfg.network()?;
    let (dt_list, f) = cfg.converge()?;
    let report = continuum_convergence_report(&net, &dt_list, &f)?;
    let (lo, hi) = ConvergenceReport::ORDER_RANGE;
    let mut table = Table::new(CONVERGE_COLUMNS);
    for r in &report.rows {
        let flag = match r.observed_order {
            None => Cell::Empty,
            Some(p) if (lo..=hi).contains(&p) => Cell::Text("ok"),
            Some(p) => {
                warn!("Δt = {}: observed order {p} outside [{lo}, {hi}]", r.dt);
                Cell::Text("out_of_range")
            }
        };
        table.push(vec![
            r.dt.into(),
            r.steps.into(),
            r.max_residual.into(),
            r.observed_order.into(),
            flag,
        ]);
    }
    Ok(table.into_string())
}

pub fn metric(
    cfg: &ScenarioConfig,
    self_terms: bool,
    round_trip: bool,
) -> Result<String, CliError> {
    let (m, dynamics, impulse) = cfg.metric()?;
    let side = cfg.schrodinger()?;
    let hbar = cfg.hbar;
    let j = impulse.impulse(side.momentum());

    let mut links: Vec<(LinkConfig, &'static str)> = m.links.iter().map(|&l| (l, "ok")).collect();
    if m.sentinel {
        let gamma = m.links.first().map_or(1.0, |l| l.gamma);
        links.push((LinkConfig { gamma, k_im: 0.0 }, "sentinel"));
    }

    let mut table = Table::new(METRIC_COLUMNS);
    for (link, status) in links {
        let d = match coupling_coefficient(link.k_im, &dynamics) {
            Ok(d) => d,
            Err(TwinSlitError::ResonantCoupling { .. }) => {
                warn!(
                    "link Γ = {}, k = {} is resonant; row flagged",
                    link.gamma, link.k_im
                );
                let mut row = vec![link.gamma.into(), link.k_im.into(), Cell::Text("resonant")];
                row.resize(METRIC_COLUMNS.len(), Cell::Empty);
                table.push(row);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let dist = infer_distance(link.gamma, link.k_im, impulse, &dynamics, &side)?;
        debug_assert_eq!(dist.d_im, d);
        let pair = OscillatorNetwork::pair(dynamics.mass, dynamics.spring, link.k_im, 1.0, 2)?;
        let source = SpectralSource::new(link.gamma, dynamics.omega0, j)?;
        let phase =
            pairwise_phase(&source, &pair, hbar).map_err(|e| CliError::Resonance(e.to_string()))?;
        let self_phase = if self_terms {
            match self_interaction_phase(&source, &pair, hbar) {
                Ok(p) => Cell::Real(p),
                Err(e) => {
                    warn!("self-interaction phase unavailable: {e}");
                    Cell::Empty
                }
            }
        } else {
            Cell::Empty
        };
        let reconstructed = if round_trip {
            Cell::Real(side.phase_for_distance(dist.x_im, hbar))
        } else {
            Cell::Empty
        };
        table.push(vec![
            link.gamma.into(),
            link.k_im.into(),
            Cell::Text(status),
            dist.d_im.into(),
            dist.scale.into(),
            dist.x_im.into(),
            phase.into(),
            self_phase,
            reconstructed,
        ]);
    }
    Ok(table.into_string())
}
