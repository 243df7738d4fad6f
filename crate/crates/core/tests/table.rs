use trendcycle_core::bandwidth::{optimize, Criterion};

fn close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

#[test]
fn nine_term_gain_row() {
    close(
        &optimize(4, Criterion::GainDistance).unwrap().values,
        &[8.00, 5.67, 4.87, 4.90],
        0.05,
    );
}

#[test]
fn nine_term_total_row() {
    close(
        &optimize(4, Criterion::TotalDistance).unwrap().values,
        &[6.47, 5.21, 4.90, 4.92],
        0.05,
    );
}

#[test]
fn thirteen_term_total_row() {
    close(
        &optimize(6, Criterion::TotalDistance).unwrap().values,
        &[9.54, 7.88, 7.07, 6.88, 6.87, 6.94],
        0.05,
    );
}

#[test]
fn thirteen_term_phase_row() {
    close(
        &optimize(6, Criterion::PhaseDelay).unwrap().values,
        &[6.01, 6.01, 7.12, 8.44, 9.46, 10.39],
        0.10,
    );
}

#[test]
fn twenty_three_term_rows() {
    let gain = optimize(11, Criterion::GainDistance).unwrap();
    assert!((gain.values[0] - 21.18).abs() <= 0.1);
    let phase = optimize(11, Criterion::PhaseDelay).unwrap();
    close(&phase.values[..4], &[11.01; 4], 0.10);
}
