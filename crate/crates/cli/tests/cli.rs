//! End-to-end runs of the `qinterf` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use qinterf::convergence::{fit_exponential_rate, hellinger_sq_to_law, DistanceCurve};
use qinterf::interference::{analytic_cdf_n2, CircularEnsemble};
use qinterf::spectral::Histogram;
use qinterf_cli::exit;

fn qinterf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinterf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qinterf(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qinterf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn moments_table() {
    let cue = data_rows(&stdout(&["moments", "--ensemble", "cue", "--dim", "2"]));
    let mean: f64 = cue[0][2].parse().unwrap();
    let std: f64 = cue[0][4].parse().unwrap();
    assert!((mean - 2.0 / 3.0).abs() < 1e-12);
    assert!((std - (2.0 / 3.0) * (0.2f64).sqrt()).abs() < 1e-12);
    assert_eq!(format!("{mean:.6} {std:.6}"), "0.666667 0.298142");

    let hoe = data_rows(&stdout(&["moments", "--ensemble", "hoe", "--dim", "2"]));
    assert_eq!(hoe[0][2], "0.5");
    assert_eq!(hoe[0][3], "0.125");

    let big = data_rows(&stdout(&[
        "moments",
        "--ensemble",
        "cue",
        "--dim",
        "1000000",
    ]));
    let mean: f64 = big[0][2].parse().unwrap();
    assert!((mean - (1e6 - 2.0)).abs() < 1e-5);
}

#[test]
fn moments_rejects_bad_input() {
    assert_eq!(
        qinterf(&["moments", "--ensemble", "cue", "--dim", "1"])
            .status
            .code(),
        Some(exit::CONFIG)
    );
    assert_eq!(
        qinterf(&["moments", "--ensemble", "uce", "--dim", "4"])
            .status
            .code(),
        Some(exit::CONFIG)
    );
}

#[test]
fn structural_samples_are_zero() {
    let empty = stdout(&[
        "sample",
        "--ensemble",
        "uce",
        "--qubits",
        "4",
        "--gates",
        "0",
        "--prob",
        "0.5",
        "--realizations",
        "50",
        "--seed",
        "3",
    ]);
    let toffoli_only = stdout(&[
        "sample",
        "--ensemble",
        "oce",
        "--qubits",
        "4",
        "--gates",
        "100",
        "--prob",
        "0",
        "--realizations",
        "50",
        "--seed",
        "3",
    ]);
    for text in [empty, toffoli_only] {
        let rows = data_rows(&text);
        assert_eq!(rows.len(), 50);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[0], i.to_string());
            assert_eq!(row[1], "0");
        }
    }
}

#[test]
fn sample_configuration_errors() {
    let cases: &[&[&str]] = &[
        &[
            "sample",
            "--ensemble",
            "uce",
            "--qubits",
            "13",
            "--gates",
            "1",
            "--prob",
            "0.5",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
        &[
            "sample",
            "--ensemble",
            "oce",
            "--qubits",
            "2",
            "--gates",
            "1",
            "--prob",
            "0.5",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
        &[
            "sample",
            "--ensemble",
            "uce",
            "--dim",
            "4",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
        &[
            "sample",
            "--ensemble",
            "cue",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
        &[
            "sample",
            "--ensemble",
            "uce",
            "--qubits",
            "3",
            "--gates",
            "1,2",
            "--prob",
            "0.5",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
        &[
            "sample",
            "--ensemble",
            "uce",
            "--qubits",
            "3",
            "--gates",
            "1",
            "--prob",
            "1.5",
            "--realizations",
            "1",
            "--seed",
            "1",
        ],
    ];
    for args in cases {
        let out = qinterf(args);
        assert_eq!(out.status.code(), Some(exit::CONFIG), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn spacing_mode_emits_every_spacing() {
    let rows = data_rows(&stdout(&[
        "sample",
        "--ensemble",
        "cue",
        "--dim",
        "8",
        "--realizations",
        "5",
        "--seed",
        "1",
        "--observable",
        "spacings",
    ]));
    assert_eq!(rows.len(), 40);
    for i in 0..5 {
        let sum: f64 = rows[8 * i..8 * (i + 1)]
            .iter()
            .map(|r| {
                assert_eq!(r[0], i.to_string());
                r[1].parse::<f64>().unwrap()
            })
            .sum();
        assert!((sum - 8.0).abs() < 1e-9);
    }
}

#[test]
fn hist_of_repeated_value() {
    let input = scratch("repeated.csv");
    std::fs::write(&input, "value\n0.25\n0.25\n0.25\n").unwrap();
    let text = stdout(&["hist", "--input", input.to_str().unwrap(), "--bins", "7"]);
    let (h, meta) = Histogram::from_csv(&text).unwrap();
    assert_eq!(h.total(), 3);
    assert_eq!(h.counts().iter().filter(|&&c| c == 3).count(), 1);
    assert_eq!(meta.get("command"), Some("hist"));
}

#[test]
fn hist_of_uniform_data() {
    let input = scratch("uniform.csv");
    let mut s = qinterf::RandomStream::new(11, 0);
    let mut text = String::from("# origin=test\nindex,u\n");
    for i in 0..1_000_000 {
        text.push_str(&format!("{i},{}\n", s.uniform()));
    }
    std::fs::write(&input, text).unwrap();
    let out = stdout(&[
        "hist",
        "--input",
        input.to_str().unwrap(),
        "--bins",
        "10",
        "--lower",
        "0",
        "--upper",
        "1",
    ]);
    assert!(out.contains("# source.origin=test"));
    let (h, _) = Histogram::from_csv(&out).unwrap();
    let n: f64 = 1e6;
    let sigma = (n * 0.1 * 0.9).sqrt();
    for (k, (&c, d)) in h.counts().iter().zip(h.density().unwrap()).enumerate() {
        assert!((c as f64 - n * 0.1).abs() <= 3.0 * sigma, "bin {k}: {c}");
        assert!((d - 1.0).abs() <= 3.0 * sigma / (n * 0.1));
    }
    let integral: f64 = h.density().unwrap().iter().map(|d| d * h.bin_width()).sum();
    assert!((integral - 1.0).abs() < 1e-12);
}

#[test]
fn hist_of_cue2_sample_against_law() {
    let sample = scratch("cue2.csv");
    let hist = scratch("cue2-hist.csv");
    let out = qinterf(&[
        "sample",
        "--ensemble",
        "cue",
        "--dim",
        "2",
        "--realizations",
        "100000",
        "--seed",
        "5",
        "--out",
        sample.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    stdout(&[
        "hist",
        "--input",
        sample.to_str().unwrap(),
        "--bins",
        "50",
        "--lower",
        "0",
        "--upper",
        "1",
        "--out",
        hist.to_str().unwrap(),
    ]);
    let (h, _) = Histogram::from_csv(&std::fs::read_to_string(&hist).unwrap()).unwrap();
    let f = hellinger_sq_to_law(&h, |x| analytic_cdf_n2(CircularEnsemble::Cue, x)).unwrap();
    assert!(f < 0.01, "{f}");
    let reported = data_rows(&stdout(&[
        "distance",
        "--input",
        hist.to_str().unwrap(),
        "--law",
        "cue2",
    ]));
    assert_eq!(reported[0][0].parse::<f64>().unwrap(), f);
    let against_self = data_rows(&stdout(&[
        "distance",
        "--input",
        hist.to_str().unwrap(),
        "--reference",
        hist.to_str().unwrap(),
    ]));
    assert!(against_self[0][0].parse::<f64>().unwrap() <= 1e-12);
}

#[test]
fn hist_reports_bad_rows_with_line_numbers() {
    let input = scratch("bad.csv");
    std::fs::write(&input, "# c=1\nindex,value\n0,1.5\n1,oops\n").unwrap();
    let out = qinterf(&["hist", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::CONFIG));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");

    let empty = scratch("empty.csv");
    std::fs::write(&empty, "# nothing\nvalue\n").unwrap();
    assert_eq!(
        qinterf(&["hist", "--input", empty.to_str().unwrap()])
            .status
            .code(),
        Some(exit::CONFIG)
    );
}

#[test]
fn missing_files_are_io_errors() {
    let out = qinterf(&["hist", "--input", "/nonexistent/qinterf/input.csv"]);
    assert_eq!(out.status.code(), Some(exit::IO));
    let out = qinterf(&[
        "moments",
        "--ensemble",
        "cue",
        "--dim",
        "4",
        "--out",
        "/nonexistent/qinterf/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(exit::IO));
}

#[test]
fn distance_binning_mismatch() {
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    std::fs::write(
        &a,
        Histogram::from_values(0.0, 1.0, 4, &[0.5])
            .unwrap()
            .to_csv(&Default::default()),
    )
    .unwrap();
    std::fs::write(
        &b,
        Histogram::from_values(0.0, 1.0, 5, &[0.5])
            .unwrap()
            .to_csv(&Default::default()),
    )
    .unwrap();
    let out = qinterf(&[
        "distance",
        "--input",
        a.to_str().unwrap(),
        "--reference",
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(exit::CONFIG));
}

#[test]
fn converge_writes_curve_and_fit() {
    let curve = scratch("curve.csv");
    let out = qinterf(&[
        "converge",
        "--ensemble",
        "uce",
        "--qubits",
        "3",
        "--gates",
        "2,4,6,8,12",
        "--prob",
        "0.5",
        "--realizations",
        "500",
        "--seed",
        "9",
        "--observable",
        "spacings",
        "--threads",
        "2",
        "--out",
        curve.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let curve_text = std::fs::read_to_string(&curve).unwrap();
    let fit_text = std::fs::read_to_string(scratch("curve.fit.csv")).unwrap();
    assert!(curve_text.contains("n_g,F,stderr"));
    let rows = data_rows(&curve_text);
    assert_eq!(rows.len(), 5);
    let fit = data_rows(&fit_text);
    assert_eq!(fit[0][0], "exponential");
    assert!(fit[0][1].parse::<f64>().unwrap() > 0.0);

    // Replaying the header reproduces the curve byte for byte.
    let replay = scratch("curve-replay.csv");
    let out = qinterf(&[
        "rerun",
        "--from",
        curve.to_str().unwrap(),
        "--threads",
        "1",
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read_to_string(&replay).unwrap(), curve_text);
}

#[test]
fn converge_flags_unfittable_curves() {
    // p = 0 circuits are permutations with I = 0; against a reference built
    // from the same law every F is 0, so no point lands in the fit window.
    let reference = scratch("ref.csv");
    let sample = scratch("p0.csv");
    stdout(&[
        "sample",
        "--ensemble",
        "uce",
        "--qubits",
        "3",
        "--gates",
        "1",
        "--prob",
        "0",
        "--realizations",
        "10",
        "--seed",
        "1",
        "--out",
        sample.to_str().unwrap(),
    ]);
    stdout(&[
        "hist",
        "--input",
        sample.to_str().unwrap(),
        "--bins",
        "20",
        "--lower",
        "0",
        "--upper",
        "7",
        "--out",
        reference.to_str().unwrap(),
    ]);
    let out = qinterf(&[
        "converge",
        "--ensemble",
        "uce",
        "--qubits",
        "3",
        "--gates",
        "1,2",
        "--prob",
        "0",
        "--realizations",
        "200",
        "--seed",
        "1",
        "--observable",
        "interference",
        "--bins",
        "20",
        "--reference",
        reference.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# fit_status=failed"), "{text}");
    assert!(text.contains("gaussian,NaN,NaN,NaN,0,2,0.01,NaN"));
    assert!(!out.stderr.is_empty());
}

#[test]
fn injected_exponential_curve() {
    let pairs: Vec<(usize, f64)> = (0..30)
        .map(|g| (g, 2.0 * (-0.1 * g as f64).exp()))
        .collect();
    let curve = DistanceCurve::from_pairs(&pairs).unwrap();
    let fit =
        qinterf_cli::engine::fit_curve(&curve, qinterf_cli::engine::Observable::Spacings).unwrap();
    assert!((fit.rate - 0.1).abs() < 1e-10);
    assert_eq!(fit.rate, fit_exponential_rate(&curve).unwrap().rate);
}

#[test]
fn pscan_rejects_boundary_probabilities() {
    let out = qinterf(&[
        "pscan",
        "--ensemble",
        "uce",
        "--qubits",
        "3",
        "--gates",
        "2,4",
        "--prob",
        "0,0.5",
        "--realizations",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(exit::CONFIG));
}

#[test]
fn pscan_rows() {
    let text = stdout(&[
        "pscan",
        "--ensemble",
        "uce",
        "--qubits",
        "3",
        "--gates",
        "2,4,6,8",
        "--prob",
        "0.3,0.6",
        "--realizations",
        "300",
        "--seed",
        "1",
        "--threads",
        "3",
    ]);
    assert!(text.contains("# prob=0.3,0.6"));
    let rows = data_rows(&text);
    assert_eq!(
        rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(),
        ["0.3", "0.6"]
    );
    for r in rows {
        assert!(r[1].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn reference_cache_round_trip() {
    let dir = scratch("cache");
    let args = [
        "converge",
        "--ensemble",
        "oce",
        "--qubits",
        "3",
        "--gates",
        "5,10,20",
        "--prob",
        "0.5",
        "--realizations",
        "300",
        "--seed",
        "4",
        "--observable",
        "interference",
        "--cache-dir",
        dir.to_str().unwrap(),
    ];
    let first = stdout(&args);
    let cached: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let second = stdout(&args);
    assert_eq!(first, second);
}
