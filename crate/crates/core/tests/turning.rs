use trendcycle_core::analysis::{detection_lag, final_turning_points, TurnKind};
use trendcycle_core::bandwidth::{builtin_table, Criterion};
use trendcycle_core::filters::default_musgrave_ic;
use trendcycle_core::series::FilterBank;

/// Steady rise of 0.5 a month, then a fall of 1 a month from month 30.
fn deep_peak() -> Vec<f64> {
    (0..60)
        .map(|t| {
            let t = t as f64;
            if t <= 30.0 {
                100.0 + 0.5 * t
            } else {
                115.0 - (t - 30.0)
            }
        })
        .collect()
}

#[test]
fn deep_downturn_kernel_one_month_musgrave_three() {
    let y = deep_peak();
    let kernel = FilterBank::rkhs(builtin_table(6, Criterion::GainDistance).unwrap()).unwrap();
    let henderson = FilterBank::musgrave(6, default_musgrave_ic(6)).unwrap();
    for bank in [&kernel, &henderson] {
        let tps = final_turning_points(&y, bank).unwrap();
        assert_eq!(tps.len(), 1);
        assert_eq!(tps[0].index, 30);
        assert_eq!(tps[0].kind, TurnKind::Downturn);
    }
    assert_eq!(detection_lag(&y, &kernel, 30).unwrap(), Some(1));
    assert_eq!(detection_lag(&y, &henderson, 30).unwrap(), Some(3));
}

#[test]
fn lag_is_bounded_once_the_turn_is_interior() {
    let y = deep_peak();
    for m in [4usize, 6, 11] {
        let bank = FilterBank::musgrave(m, default_musgrave_ic(m)).unwrap();
        for tp in final_turning_points(&y, &bank).unwrap() {
            let lag = detection_lag(&y, &bank, tp.index).unwrap().unwrap();
            assert!((1..=m + 1).contains(&lag), "m={m} lag={lag}");
        }
    }
}
