//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use trendcycle::simulate::CycleConfig;
use trendcycle::study::{lag_trials, mean_lag, median, revision_trials};
use trendcycle_core::bandwidth::{builtin_table, optimize, Criterion};
use trendcycle_core::filters::{
    henderson_exact, musgrave, rkhs_asymmetric, rkhs_symmetric, rkhs_symmetric_matrix,
    slope_noise_ratio, FilterWeights,
};
use trendcycle_core::spectral::{revision_distance, Band};

const TABLE_GAIN_TOTAL_TOL: f64 = 0.05;
const TABLE_PHASE_TOL: f64 = 0.10;
const TABLE_RUNTIME: Duration = Duration::from_secs(60);
const EQUIVALENCE_TOL: f64 = 1e-12;
const HENDERSON_MOMENT_TOL: f64 = 1e-9;
const KERNEL_HENDERSON_MAX_DEV: f64 = 0.015;
const FROZEN_KERNEL_HENDERSON_DEV: f64 = 0.005767072407444368;
const MUSGRAVE_TOL: f64 = 1e-8;
const COSINE_LAW_TOL: f64 = 1e-8;
const REVISION_SERIES: usize = 50;
const REVISION_SEED: u64 = 20_240_601;
const GAIN_RATIO_LIMIT: f64 = 0.75;
const TOTAL_RATIO_LIMIT: f64 = 0.9;
const REVISION_RUNTIME: Duration = Duration::from_secs(120);
const LAG_SERIES: usize = 50;
const LAG_SEED: u64 = 19_920_401;
const GAIN_LAG_LIMIT: f64 = 2.0;

fn report(n: u32, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_1_bandwidth_table() {
    let start = Instant::now();
    let mut worst = [0.0f64; 3];
    for m in [4usize, 6, 11] {
        for (k, c) in [
            Criterion::TotalDistance,
            Criterion::GainDistance,
            Criterion::PhaseDelay,
        ]
        .into_iter()
        .enumerate()
        {
            let got = optimize(m, c).unwrap();
            let want = builtin_table(m, c).unwrap();
            worst[k] = worst[k].max(max_abs_diff(&got.values, &want.values));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst[0] <= TABLE_GAIN_TOTAL_TOL
        && worst[1] <= TABLE_GAIN_TOTAL_TOL
        && worst[2] <= TABLE_PHASE_TOL
        && elapsed < TABLE_RUNTIME;
    report(
        1,
        ok,
        &format!(
            "max deviation total {:.4}, gain {:.4}, phase {:.4}; {:.1}s",
            worst[0],
            worst[1],
            worst[2],
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_matrix_scalar_equivalence() {
    let mut worst = 0.0f64;
    for m in [2usize, 4, 6, 11] {
        let mf = m as f64;
        for b in [mf + 0.5, mf + 1.0, 2.0 * mf] {
            let a = rkhs_symmetric(m, b).unwrap();
            let c = rkhs_symmetric_matrix(m, b).unwrap();
            worst = worst.max(max_abs_diff(a.weights(), c.weights()));
        }
    }
    report(
        2,
        worst < EQUIVALENCE_TOL,
        &format!("max deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_3_cut_and_normalize() {
    let mut worst = 0.0f64;
    for m in [2usize, 4, 6, 11] {
        let mf = m as f64;
        for b in [mf + 0.5, mf + 1.0, 2.0 * mf, 3.0 * mf + 3.0] {
            let sym = rkhs_symmetric(m, b).unwrap();
            for q in 0..m {
                let kept = &sym.weights()[..m + q + 1];
                let mass: f64 = kept.iter().sum();
                let cut: Vec<f64> = kept.iter().map(|w| w / mass).collect();
                let asym = rkhs_asymmetric(m, q, b).unwrap();
                worst = worst.max(max_abs_diff(asym.weights(), &cut));
            }
        }
    }
    report(
        3,
        worst < EQUIVALENCE_TOL,
        &format!("max deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_4_henderson_oracle() {
    let h = henderson_exact(6).unwrap();
    let moments = (1..=3).map(|r| h.moment(r).abs()).fold(0.0, f64::max);
    let y: Vec<f64> = (0..40).map(|t| (t as f64).powi(3)).collect();
    let cubic = (6..34)
        .map(|t| (h.apply_at(&y, t).unwrap() - y[t]).abs() / y[t].max(1.0))
        .fold(0.0, f64::max);
    let k = rkhs_symmetric(6, 7.0).unwrap();
    let dev = max_abs_diff(h.weights(), k.weights());
    let ok = moments < HENDERSON_MOMENT_TOL
        && cubic < HENDERSON_MOMENT_TOL
        && dev < KERNEL_HENDERSON_MAX_DEV
        && (dev - FROZEN_KERNEL_HENDERSON_DEV).abs() < EQUIVALENCE_TOL;
    report(
        4,
        ok,
        &format!("moments {moments:.1e}, cubic rel err {cubic:.1e}, kernel deviation {dev:.6}"),
    );
}

#[allow(clippy::needless_range_loop)]
fn dense_solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / a[row][row];
    }
    x
}

/// Minimizer of `sum (v_j - w_j)^2 + D (sum j (v_j - w_j))^2`, `v` on
/// `-m..=q`, `sum v = 1`.
fn musgrave_by_kkt(h: &FilterWeights, q: usize, ic: f64) -> Vec<f64> {
    let m = h.m();
    let d = slope_noise_ratio(ic);
    let n = m + q + 1;
    let js: Vec<f64> = (0..n).map(|k| k as f64 - m as f64).collect();
    let tail_mass: f64 = (q + 1..=m).map(|j| h.weight(j as isize)).sum();
    let tail_tilt: f64 = (q + 1..=m).map(|j| j as f64 * h.weight(j as isize)).sum();
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for i in 0..n {
        for k in 0..n {
            a[i][k] = 2.0 * d * js[i] * js[k] + if i == k { 2.0 } else { 0.0 };
        }
        a[i][n] = 1.0;
        a[n][i] = 1.0;
        rhs[i] = 2.0 * d * tail_tilt * js[i];
    }
    rhs[n] = tail_mass;
    let delta = dense_solve(a, rhs);
    (0..n)
        .map(|k| h.weight(js[k] as isize) + delta[k])
        .collect()
}

#[test]
fn criterion_5_musgrave_oracle() {
    let mut worst = 0.0f64;
    for m in [4usize, 6, 11] {
        let h = henderson_exact(m).unwrap();
        for q in 0..m {
            for ic in [0.5, 1.0, 3.5] {
                let closed = musgrave(m, q, ic).unwrap();
                worst = worst.max(max_abs_diff(closed.weights(), &musgrave_by_kkt(&h, q, ic)));
            }
        }
    }
    report(
        5,
        worst < MUSGRAVE_TOL,
        &format!("max deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_6_law_of_cosines() {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for m in [4usize, 6, 11] {
        let mut pairs: Vec<(FilterWeights, FilterWeights)> = Vec::new();
        let kernel_sym = rkhs_symmetric(m, m as f64 + 1.0).unwrap();
        for c in [
            Criterion::TotalDistance,
            Criterion::GainDistance,
            Criterion::PhaseDelay,
        ] {
            let set = builtin_table(m, c).unwrap();
            for q in 0..m {
                pairs.push((
                    rkhs_asymmetric(m, q, set.values[q]).unwrap(),
                    kernel_sym.clone(),
                ));
            }
        }
        let h = henderson_exact(m).unwrap();
        for q in 0..m {
            for ic in [0.5, 1.0, 3.5] {
                pairs.push((musgrave(m, q, ic).unwrap(), h.clone()));
            }
        }
        for (a, s) in &pairs {
            let r = revision_distance(a, s, Band::Full).unwrap();
            worst = worst.max((r.total * r.total - r.gain_part - r.phase_part).abs());
            cases += 1;
        }
    }
    report(
        6,
        worst < COSINE_LAW_TOL,
        &format!("{cases} filter pairs, max |total^2 - gain - phase| {worst:.2e}"),
    );
}

#[test]
fn criterion_7_revision_reduction() {
    let start = Instant::now();
    let trials = revision_trials(REVISION_SEED, REVISION_SERIES, (0.2, 2.0)).unwrap();
    let elapsed = start.elapsed();
    let gain = median(&mut trials.iter().map(|t| t.gain_ratio()).collect::<Vec<_>>());
    let total = median(&mut trials.iter().map(|t| t.total_ratio()).collect::<Vec<_>>());
    let ok = gain < GAIN_RATIO_LIMIT && total < TOTAL_RATIO_LIMIT && elapsed < REVISION_RUNTIME;
    report(
        7,
        ok,
        &format!(
            "median MSPE ratio gain/Musgrave {gain:.3} (< {GAIN_RATIO_LIMIT}), total/Musgrave {total:.3} (< {TOTAL_RATIO_LIMIT}); {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_detection_lag() {
    let trials = lag_trials(LAG_SEED, LAG_SERIES, &CycleConfig::default()).unwrap();
    let gain = mean_lag(trials.iter().map(|t| (t.m, t.lag_gain)));
    let mus = mean_lag(trials.iter().map(|t| (t.m, t.lag_musgrave)));
    let missed = trials
        .iter()
        .filter(|t| t.lag_gain.is_none() || t.lag_musgrave.is_none())
        .count();
    let ok = gain <= mus && gain <= GAIN_LAG_LIMIT;
    report(
        8,
        ok,
        &format!("mean lag kernel-gain {gain:.2}, Musgrave {mus:.2}; {missed} undetected"),
    );
}

fn write_inputs(dir: &Path) {
    let bin = env!("CARGO_BIN_EXE_trendcycle");
    for (seed, ic) in [(1, "0.4"), (2, "1.5")] {
        let out = Command::new(bin)
            .args([
                "simulate",
                "--seed",
                &seed.to_string(),
                "--length",
                "96",
                "--target-ic",
                ic,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::write(dir.join(format!("s{seed}.csv")), out.stdout).unwrap();
    }
}

/// Every command of the CLI matrix, in both formats.
fn run_matrix(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_trendcycle");
    let input = dir.join("s1.csv");
    let input = input.to_str().unwrap();
    let dir_arg = dir.to_str().unwrap();
    let matrix: Vec<Vec<&str>> = vec![
        vec![
            "weights",
            "--m",
            "6",
            "--family",
            "rkhs",
            "--criterion",
            "gain",
        ],
        vec!["weights", "--m", "6", "--family", "musgrave", "--ic", "3.5"],
        vec![
            "weights",
            "--m",
            "4",
            "--family",
            "rkhs",
            "--criterion",
            "total",
        ],
        vec!["bandwidth", "--m", "4", "--use-builtin"],
        vec!["bandwidth", "--m", "2", "--criterion", "gain"],
        vec!["smooth", "--input", input],
        vec![
            "smooth", "--input", input, "--family", "musgrave", "--m", "6",
        ],
        vec!["revisions", "--input", input],
        vec![
            "revisions",
            "--input",
            input,
            "--detail",
            "--criterion",
            "total",
        ],
        vec!["turning", "--input", input],
        vec![
            "porcupine",
            "--input",
            input,
            "--target",
            "2004-01",
            "--horizon",
            "8",
        ],
        vec![
            "spectrum",
            "--m",
            "6",
            "--family",
            "rkhs",
            "--criterion",
            "gain",
            "--q",
            "0",
        ],
        vec!["simulate", "--seed", "9", "--count", "2", "--length", "40"],
        vec!["revisions", "--input-dir", dir_arg],
    ];
    let mut outputs = Vec::new();
    for args in &matrix {
        for format in ["csv", "json"] {
            let out = Command::new(bin)
                .args(args)
                .args(["--format", format])
                .env_remove("TRENDCYCLE_OUT_DIR")
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            outputs.push((format!("{} --format {format}", args.join(" ")), out.stdout));
        }
    }
    outputs
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let first = run_matrix(dir.path());
    let second = run_matrix(dir.path());
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a.1 != b.1)
        .map(|(a, _)| a.0.as_str())
        .collect();
    report(
        9,
        differing.is_empty(),
        &format!("{} runs compared, differing: {differing:?}", first.len()),
    );
}
