use std::fs;
use std::path::Path;
use std::process::Command;

use ctphase_cli::commands::{bench_scans, cmd_anonymize, read_predictions};
use ctphase_core::dicom::{parse_dicom, tags, write_fixture, DicomElement, Vr};
use ctphase_core::model::LinearModelParams;
use ctphase_core::preprocess::{FeatureConfig, PreprocessConfig};
use ctphase_core::synth::{generate_dataset, slice_dataset, PhantomConfig};

fn ctphase(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ctphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ctphase(args);
    assert!(
        out.status.success(),
        "ctphase {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tiny_phantom() -> PhantomConfig {
    PhantomConfig {
        rows: 16,
        cols: 16,
        min_slices: 2,
        max_slices: 3,
        ..PhantomConfig::default()
    }
}

/// Ten slices carrying identifying attributes, spread over two folders.
fn write_phi_tree(root: &Path) {
    let scans = generate_dataset(&tiny_phantom(), 2, 3).unwrap();
    let mut written = 0;
    'outer: for ls in &scans {
        for slice in &ls.scan.slices {
            let ds = slice_dataset(&ls.scan, slice)
                .with(DicomElement::text(tags::PATIENT_NAME, Vr::PN, "DOE^JANE"))
                .with(DicomElement::text(tags::PATIENT_ID, Vr::LO, "MRN-0042"))
                .with(DicomElement::text(tags::INSTITUTION_NAME, Vr::LO, "General Hospital"))
                .with(DicomElement::text(tags::STUDY_DATE, Vr::DA, "20200131"));
            let dir = root.join(format!("patient{}", written % 2));
            fs::create_dir_all(&dir).unwrap();
            fs::write(dir.join(format!("{written}.dcm")), write_fixture(&ds).unwrap()).unwrap();
            written += 1;
            if written == 10 {
                break 'outer;
            }
        }
    }
    assert_eq!(written, 10);
}

#[test]
fn anonymize_strips_identifiers_from_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    let (input, output) = (tmp.path().join("in"), tmp.path().join("out"));
    write_phi_tree(&input);
    fs::write(input.join("README.txt"), "not an image").unwrap();

    let summary = cmd_anonymize(&input, &output, None).unwrap();
    assert_eq!(summary.processed, 10);
    assert_eq!(summary.skipped, 1);
    assert_eq!(summary.tags_stripped, 40);

    let mut count = 0;
    for dir in fs::read_dir(&output).unwrap() {
        for f in fs::read_dir(dir.unwrap().path()).unwrap() {
            let ds = parse_dicom(&fs::read(f.unwrap().path()).unwrap()).unwrap();
            assert!(!ds.contains(tags::PATIENT_NAME));
            assert!(!ds.contains(tags::PATIENT_ID));
            assert!(ds.contains(tags::PIXEL_DATA));
            count += 1;
        }
    }
    assert_eq!(count, 10);
}

#[test]
fn custom_whitelist_replaces_default() {
    let tmp = tempfile::tempdir().unwrap();
    let (input, output) = (tmp.path().join("in"), tmp.path().join("out"));
    write_phi_tree(&input);
    let wl = tmp.path().join("keep.txt");
    fs::write(&wl, "# only identifiers of the series\n(0020,000E)\n0008,0060\n").unwrap();
    ok(&["anonymize", s(&input), s(&output), "--whitelist", s(&wl)]);
    let file = output.join("patient0").join("0.dcm");
    let ds = parse_dicom(&fs::read(file).unwrap()).unwrap();
    let kept: Vec<_> = ds.tags().collect();
    assert_eq!(kept, vec![tags::MODALITY, tags::SERIES_INSTANCE_UID]);
}

#[test]
fn anonymize_without_dicom_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert!(cmd_anonymize(&empty, &tmp.path().join("out"), None).is_err());
    let out = ctphase(&["anonymize", s(&empty), s(&tmp.path().join("out"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no parseable DICOM"));
}

#[test]
fn end_to_end_on_default_phantom() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name);
    let data = p("data");
    ok(&["synth", s(&data), "--seed", "3"]);
    ok(&["train", s(&data), s(&data.join("train_labels.csv")), s(&p("model.bin")), "--seed", "3"]);
    let test_labels = data.join("test_labels.csv");
    for out in ["pred_a.csv", "pred_b.csv"] {
        ok(&["predict", s(&data), s(&p("model.bin")), s(&p(out)), "--labels", s(&test_labels), "--seed", "9"]);
    }
    let a = fs::read(p("pred_a.csv")).unwrap();
    assert_eq!(a, fs::read(p("pred_b.csv")).unwrap());
    let rows = read_predictions(&p("pred_a.csv")).unwrap();
    assert!(rows.iter().all(|r| r.seed == 9));

    ok(&[
        "evaluate",
        s(&test_labels),
        s(&p("pred_a.csv")),
        s(&p("report.json")),
        "--data",
        s(&data),
        "--model",
        s(&p("model.bin")),
        "--resamples",
        "500",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(p("report.json")).unwrap()).unwrap();
    let f1 = report["scan_level"]["metrics"]["macro_f1"].as_f64().unwrap();
    assert!(f1 >= 0.95, "scan-level macro F1 {f1}");
    let slice_acc = report["slice_level"]["metrics"]["accuracy"].as_f64().unwrap();
    assert!(slice_acc >= 0.95, "slice accuracy {slice_acc}");
    assert_eq!(report["scan_level"]["intervals"].as_array().unwrap().len(), 4);

    ok(&["sweep", s(&data), s(&test_labels), s(&p("model.bin")), s(&p("sweep.csv")), "--seeds", "10"]);
    let sweep = fs::read_to_string(p("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 14);
    assert!(sweep.starts_with("r_percent,seeds,mean_macro_f1,ci_lower,ci_upper"));

    let bench = ok(&["bench", s(&data), s(&p("model.bin")), "--r-values", "10,30,100"]);
    assert_eq!(bench.lines().count(), 4);
}

#[test]
fn evaluate_reports_row_of_bad_prediction() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = tmp.path().join("labels.csv");
    fs::write(&labels, "series_uid,study_uid,phase\n1.1,1,venous\n").unwrap();
    let preds = tmp.path().join("pred.csv");
    fs::write(
        &preds,
        "series_uid,study_uid,predicted_phase,votes_nc,votes_art,votes_ven,votes_other,k_sampled,seed\n\
         1.1,1,venous,0,0,3,0,3,0\n\
         1.2,1,portal,0,0,3,0,3,0\n",
    )
    .unwrap();
    let out = ctphase(&["evaluate", s(&labels), s(&preds), s(&tmp.path().join("r.json"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pred.csv row 3"), "{err}");
}

#[test]
fn bench_counts_calls_exactly() {
    let cfg = PhantomConfig {
        min_slices: 200,
        max_slices: 200,
        ..tiny_phantom()
    };
    let scans: Vec<_> = generate_dataset(&cfg, 2, 5).unwrap().into_iter().map(|l| l.scan).collect();
    let features = FeatureConfig::new(8, 1).unwrap();
    let pre = PreprocessConfig {
        resolution: 16,
        features,
        ..PreprocessConfig::default()
    };
    let model = LinearModelParams::zeros(features).unwrap();
    let rows = bench_scans(&scans, &model, &pre, &[1.0, 30.0, 100.0], 4).unwrap();
    let calls: Vec<f64> = rows.iter().map(|r| r.calls_per_scan).collect();
    assert_eq!(calls, vec![2.0, 60.0, 200.0]);
    assert!(rows.iter().all(|r| r.scans == 10 && r.mean_seconds_per_scan > 0.0));
}
