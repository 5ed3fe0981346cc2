//! End-to-end tests of the `dtqc` binary: file schemas, round trips, exit
//! codes, and worker-count determinism of sweep output.

use std::path::{Path, PathBuf};
use std::process::Command;

use dtqc_core::{
    detect_peaks, fourier_spectrum, label_peaks, run, ChainParameters, ObservableSet, WindowKind,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dtqc"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dtqc-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn evolve_then_spectrum_round_trips_exactly() {
    let dir = scratch_dir("roundtrip");
    let csv = dir.join("run.csv");
    let status = bin()
        .args([
            "evolve",
            "--n-sites",
            "8",
            "--period-left",
            "4.74",
            "--t-max",
            "80",
            "--out",
        ])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin()
        .args([
            "spectrum",
            "--column",
            "m",
            "--period-left",
            "4.74",
            "--input",
        ])
        .arg(&csv)
        .arg("--out-dir")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());

    // the same pipeline in-process must agree bin by bin: the CSV carries
    // full-precision floats
    let params = ChainParameters::golden(8, 4.74);
    let trajectory = run(&params, 80.0, 0.05, &ObservableSet::default()).unwrap();
    let spectrum = fourier_spectrum(
        &trajectory.times,
        trajectory.magnetization.as_ref().unwrap(),
        WindowKind::Rectangular,
    )
    .unwrap();

    let text = read(&dir.join("run_spectrum.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,amplitude"));
    let mut count = 0;
    for (line, (w, a)) in lines.zip(
        spectrum
            .angular_frequencies
            .iter()
            .zip(&spectrum.amplitudes),
    ) {
        let (fw, fa) = line.split_once(',').unwrap();
        assert_eq!(fw.parse::<f64>().unwrap(), *w);
        assert_eq!(fa.parse::<f64>().unwrap(), *a);
        count += 1;
    }
    assert_eq!(count, spectrum.amplitudes.len());

    // the peaks JSON carries the same labels as the in-process pipeline
    let peaks = detect_peaks(&spectrum, 5.0);
    let labeled = label_peaks(
        &peaks,
        params.f_left(),
        params.f_right(),
        4,
        spectrum.resolution,
    );
    let json = read(&dir.join("run_peaks.json"));
    assert!(json.trim_start().starts_with('['));
    let object_count = json.matches("\"omega\"").count();
    assert_eq!(object_count, labeled.len());
}

#[test]
fn phasediag_is_bit_identical_across_worker_counts() {
    let dir = scratch_dir("workers");
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.join(format!("cells_w{workers}.csv"));
        let status = bin()
            .args([
                "phasediag",
                "--theta-values",
                "2.8,3.141592653589793",
                "--f-left-values",
                "1.0,1.33",
                "--n-sites",
                "8",
                "--t-max",
                "300",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(read(&out));
    }
    assert_eq!(
        outputs[0], outputs[1],
        "sweep output depends on worker count"
    );
    assert!(outputs[0].starts_with("theta,f_L,A_mm,tau_mm,A_pp,tau_pp,is_dtqc,error\n"));
    assert_eq!(outputs[0].lines().count(), 5); // header + 4 row-major cells
}

#[test]
fn heatmap_rows_stay_normalized_and_start_at_z2() {
    let dir = scratch_dir("heatmap");
    let csv = dir.join("traj.csv");
    let status = bin()
        .args(["heatmap", "--preset", "fig1d", "--t-max", "8", "--out"])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());

    let text = read(&csv);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let columns: Vec<&str> = header.split(',').collect();
    assert_eq!(columns.len(), 1 + 89);
    assert_eq!(columns[1], "101010101"); // Z2 pattern leads
    assert_eq!(columns[89], "010101010"); // Z2' pattern closes

    for (i, line) in lines.enumerate() {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let norm_sq: f64 = fields[1..].iter().map(|v| v * v).sum();
        assert!((norm_sq - 1.0).abs() < 1e-9, "row {i}: {norm_sq}");
        if i == 0 {
            assert!((fields[1] - 1.0).abs() < 1e-9, "t=0 concentrated on Z2");
            assert!(fields[2..].iter().all(|&v| v < 1e-9));
        }
    }

    let json = read(&dir.join("traj_columns.json"));
    assert!(json.contains("\"n_states\": 89"));
    assert!(json.contains("\"pattern\": \"101010101\""));
}

#[test]
fn exit_codes_distinguish_error_classes() {
    // validation
    let out = bin()
        .args(["evolve", "--n-sites", "6", "--n-left", "9", "--t-max", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // i/o
    let out = bin()
        .args([
            "spectrum",
            "--input",
            "/nonexistent/of/course.csv",
            "--column",
            "m",
            "--f-left",
            "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // unknown preset is a validation error
    let out = bin()
        .args(["evolve", "--preset", "fig99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // empty grid is a validation error
    let out = bin()
        .args([
            "phasediag",
            "--theta-values",
            "2.8",
            "--f-left-values",
            "-1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_drives_a_run() {
    let dir = scratch_dir("config");
    let config = dir.join("run.conf");
    let out = dir.join("series.csv");
    std::fs::write(
        &config,
        format!(
            "[chain]\nn_sites = 6\ninitial_state = z3\n[drive]\nperiod_left = 4.74\ntheta = 3.0\n\
             [run]\nt_max = 5\nsample_dt = 0.5\n[output]\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let status = bin()
        .args(["evolve", "--config"])
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    assert_eq!(text.lines().count(), 12); // header + 11 samples
    assert!(text.starts_with("t,m,fidelity,entropy\n"));
}

#[test]
fn fidelity_spectrum_leads_with_the_individual_subharmonics() {
    let dir = scratch_dir("fidelity");
    let csv = dir.join("f.csv");
    let status = bin()
        .args([
            "evolve",
            "--n-sites",
            "8",
            "--period-left",
            "2.32",
            "--t-max",
            "500",
            "--out",
        ])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .args([
            "spectrum",
            "--column",
            "fidelity",
            "--period-left",
            "2.32",
            "--input",
        ])
        .arg(&csv)
        .arg("--out-dir")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let json = read(&dir.join("f_peaks.json"));
    let leading = json.split('}').take(4).collect::<String>();
    assert!(
        leading.contains("\"k1\": 1, \"k2\": 0") && leading.contains("\"k1\": 0, \"k2\": 1"),
        "individual subharmonics missing from the strongest fidelity peaks: {leading}"
    );
}

#[test]
fn spectrum_preset_runs_in_process_and_writes_svg() {
    let dir = scratch_dir("svg");
    // shrink the preset horizon via flags to keep the test fast
    let status = bin()
        .args([
            "spectrum",
            "--preset",
            "fig1c",
            "--n-sites",
            "8",
            "--svg",
            "--out-dir",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let svg = read(&dir.join("fig1c.svg"));
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));
    assert!(svg.contains("(1/2, 1/2)"), "mixed peak marker missing");
    assert!(read(&dir.join("fig1c_spectrum.csv")).starts_with("omega,amplitude\n"));
}
