use std::f64::consts::PI;

use num_complex::Complex64;
use pathamp_core::{
    coupling_coefficient, coupling_for_coefficient, equidistant_amplitude, four_source_amplitude,
    infer_distance, pattern_scan, phase_sweep, ImpulseModel, SchrodingerSide, SourceDynamics,
    TwinSlitScenario,
};
use proptest::prelude::*;

fn scenario(hbar: f64) -> TwinSlitScenario {
    TwinSlitScenario {
        dynamics: SourceDynamics::new(1.0, 2.0, 1.0).unwrap(),
        gamma1: 1.0,
        gamma2: 1.3,
        gamma4: 0.7,
        j2: 0.9,
        j3: 2.0,
        j4: 0.9,
        k12: 0.3,
        k14: 0.3,
        k23: 0.4,
        k43: 0.25,
        hbar,
    }
}

fn side() -> SchrodingerSide {
    SchrodingerSide {
        exchange_mass: 1.0,
        interaction_time: 2.0,
        x12: 10.0,
        x23: 5.0,
        x43: 6.0,
        alpha: Complex64::new(1.0, 0.0),
    }
}

/// `k / (k² − (ω₀²m − k)²)` written out again.
fn d_by_hand(k: f64, m: f64, spring: f64, w0: f64) -> f64 {
    let c = w0 * w0 * m - spring;
    k / (k * k - c * c)
}

#[test]
fn sweep_intensity_is_two_plus_two_cos() {
    let sc = scenario(1.0);
    let schedule = phase_sweep(&sc, 201).unwrap();
    let scan = pattern_scan(&sc, &side(), &schedule).unwrap();
    assert_eq!(scan.rows.len(), 201);
    assert!(scan.skipped.is_empty());
    for (i, row) in scan.rows.iter().enumerate() {
        let p23 = sc.gamma2 * d_by_hand(row.k23, 1.0, 2.0, 1.0) * sc.j3 / (2.0 * PI);
        let p43 = sc.gamma4 * d_by_hand(row.k43, 1.0, 2.0, 1.0) * sc.j3 / (2.0 * PI);
        let expected = 2.0 + 2.0 * (p23 - p43).cos();
        assert!(
            (row.discrete_intensity - expected).abs() <= 1e-12,
            "row {i}"
        );
        let target = 2.0 * PI * i as f64 / 200.0;
        assert!(
            (p23 - p43 - target).abs() <= 1e-12,
            "row {i}: {} vs {target}",
            p23 - p43
        );
        assert!((0.0..=4.0).contains(&row.discrete_intensity));
        assert!((0.0..=4.0).contains(&row.four_source_intensity));
        assert!((0.0..=4.0).contains(&row.schrodinger_intensity));
    }
    let visibility = scan.visibility().unwrap();
    assert!((visibility - 1.0).abs() <= 1e-9, "visibility {visibility}");
    assert!(scan.rows[100].discrete_intensity <= 1e-20);
}

#[test]
fn symmetric_single_point_is_a_maximum() {
    let mut sc = scenario(1.0);
    sc.gamma4 = sc.gamma2;
    let scan = pattern_scan(&sc, &side(), &[(0.2, 0.2)]).unwrap();
    assert_eq!(scan.rows.len(), 1);
    assert_eq!(scan.rows[0].discrete_intensity, 4.0);
}

#[test]
fn resonant_points_are_skipped_not_fatal() {
    let sc = scenario(1.0);
    // detuning is −1, so |k| = 1 sits on the pole
    let scan = pattern_scan(&sc, &side(), &[(0.2, 0.1), (1.0, 0.1), (0.3, -1.0)]).unwrap();
    assert_eq!(scan.rows.len(), 1);
    assert_eq!(
        scan.skipped.iter().map(|s| s.0).collect::<Vec<_>>(),
        vec![1, 2]
    );
}

#[test]
fn round_trip_holds_for_several_hbar() {
    for hbar in [1.0, 0.37, 2.5] {
        let sc = scenario(hbar);
        let schedule = phase_sweep(&sc, 201).unwrap();
        let scan = pattern_scan(&sc, &side(), &schedule).unwrap();
        let mismatch = scan.max_phase_mismatch();
        assert!(mismatch <= 1e-12, "ħ={hbar}: {mismatch}");
    }
}

#[test]
fn proportional_impulse_drops_momentum() {
    let dyn_ = SourceDynamics::new(1.0, 2.0, 1.0).unwrap();
    let a = infer_distance(
        1.2,
        0.4,
        ImpulseModel::ProportionalToMomentum(0.8),
        &dyn_,
        &side(),
    )
    .unwrap();
    let faster = SchrodingerSide {
        x12: 25.0,
        ..side()
    };
    let b = infer_distance(
        1.2,
        0.4,
        ImpulseModel::ProportionalToMomentum(0.8),
        &dyn_,
        &faster,
    )
    .unwrap();
    assert_eq!(a.x_im, b.x_im);
    let expected = 0.8 * 1.2 * d_by_hand(0.4, 1.0, 2.0, 1.0) / PI;
    assert!((a.x_im - expected).abs() <= 1e-15 * expected.abs());
}

fn any_scenario() -> impl Strategy<Value = TwinSlitScenario> {
    (
        (0.5f64..2.0, 0.5f64..3.0, 0.2f64..2.0),
        prop::array::uniform3(-2.0f64..2.0),
        prop::array::uniform3(-2.0f64..2.0),
        prop::array::uniform4(-0.9f64..0.9),
        0.3f64..3.0,
    )
        .prop_map(|((m, k, w0), g, j, kk, hbar)| TwinSlitScenario {
            dynamics: SourceDynamics::new(m, k, w0).unwrap(),
            gamma1: g[0],
            gamma2: g[1],
            gamma4: g[2],
            j2: j[0],
            j3: j[1],
            j4: j[2],
            k12: kk[0],
            k14: kk[1],
            k23: kk[2],
            k43: kk[3],
            hbar,
        })
}

proptest! {
    #[test]
    fn exchange_leaves_intensity_unchanged(sc in any_scenario()) {
        if let Ok(a) = four_source_amplitude(&sc) {
            let b = four_source_amplitude(&sc.exchange_slits()).unwrap();
            prop_assert!((a.intensity() - b.intensity()).abs() <= 1e-12);
            prop_assert!((0.0..=4.0).contains(&a.intensity()));
        }
    }

    #[test]
    fn equidistant_agrees_with_four_source(sc in any_scenario()) {
        let eq = TwinSlitScenario { k14: sc.k12, j4: sc.j2, ..sc };
        if let (Ok(a), Ok(b)) = (equidistant_amplitude(&eq), four_source_amplitude(&eq)) {
            prop_assert!((a.intensity() - b.intensity()).abs() <= 1e-12);
        }
    }

    #[test]
    fn coefficient_inverse_round_trips(
        m in 0.5f64..2.0, k in 0.5f64..3.0, w0 in 0.2f64..2.0, frac in -0.95f64..0.95,
    ) {
        let dyn_ = SourceDynamics::new(m, k, w0).unwrap();
        let c = dyn_.detuning();
        prop_assume!(c.abs() > 1e-6);
        let kim = frac * c.abs();
        let d = coupling_coefficient(kim, &dyn_).unwrap();
        let back = coupling_for_coefficient(d, &dyn_).unwrap();
        prop_assert!((back - kim).abs() <= 1e-12 * c.abs().max(1.0));
    }
}
