mod common;

use gazeforge::detect::{parse_cascade, HaarCascade};
use gazeforge::gazefeat::{synth_dataset, FeatureConfig, GazeDataset};
use gazeforge::imaging::{save_pgm, GrayFrame};
use gazeforge::intent::*;
use gazeforge::learn::train_svm_linear;
use gazeforge::pupiltrack::GazeTrace;
use gazeforge::Label;

fn cascade(name: &str) -> HaarCascade {
    parse_cascade(&std::fs::read_to_string(common::data_path(&format!("cascades/{name}"))).unwrap()).unwrap()
}

fn cascades(with_eyes: bool) -> Cascades {
    Cascades {
        face: cascade("haarcascade_frontalface_default.xml"),
        right_eye: with_eyes.then(|| cascade("haarcascade_righteye_2splits.xml")),
        left_eye: with_eyes.then(|| cascade("haarcascade_lefteye_2splits.xml")),
    }
}

fn rmse(trace: &GazeTrace, truth: &[(f64, f64)]) -> f64 {
    let se: f64 = trace.samples.iter().zip(truth).map(|(s, t)| (s.x - t.0).powi(2) + (s.y - t.1).powi(2)).sum();
    (se / truth.len() as f64).sqrt()
}

#[test]
fn pipeline_recovers_the_scripted_pupils() {
    let spec = FaceSceneSpec::default();
    let scene = render_face_scene(&spec);
    assert!(scene.blink.iter().any(|&b| b));
    let dir = tempfile::tempdir().unwrap();
    write_frames(&scene.frames, dir.path()).unwrap();
    let out = run_pipeline(dir.path(), &cascades(true), &PipelineConfig::default()).unwrap();
    assert_eq!(out.right.len(), spec.frames);
    assert_eq!(out.observations.len(), 2 * spec.frames);
    assert!(out.frames.iter().all(|f| f.face_detected));
    let r = rmse(&out.right, &scene.truth_right);
    let l = rmse(&out.left, &scene.truth_left);
    assert!(r <= 3.0 && l <= 3.0, "rmse right {r:.3} left {l:.3}");
    // Closed eyes yield no pupil.
    for (i, &closed) in scene.blink.iter().enumerate() {
        if closed {
            assert!(!out.observations[2 * i].valid && !out.observations[2 * i + 1].valid, "frame {i}");
        }
    }
}

#[test]
fn pipeline_is_deterministic_and_dumps() {
    let spec = FaceSceneSpec { frames: 40, seed: 3, ..Default::default() };
    let scene = render_face_scene(&spec);
    let frames = tempfile::tempdir().unwrap();
    write_frames(&scene.frames, frames.path()).unwrap();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let run = |dump: &std::path::Path| {
        let cfg = PipelineConfig { dump_dir: Some(dump.to_path_buf()), ..Default::default() };
        run_pipeline(frames.path(), &cascades(false), &cfg).unwrap()
    };
    let a = run(d1.path());
    let b = run(d2.path());
    assert_eq!(a, b);
    for name in ["faces.csv", "observations.csv", "trace_right.csv", "trace_left.csv"] {
        let x = std::fs::read(d1.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(d2.path().join(name)).unwrap(), "{name}");
    }
    let faces = std::fs::read_to_string(d1.path().join("faces.csv")).unwrap();
    assert_eq!(faces.lines().count(), 41);
    assert!(faces.lines().nth(1).unwrap().ends_with(",estimated"));
}

#[test]
fn faceless_frames_fail_calibration() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..5 {
        save_pgm(&GrayFrame::filled(160, 120, 90), dir.path().join(format!("f{i}.pgm"))).unwrap();
    }
    let err = run_pipeline(dir.path(), &cascades(false), &PipelineConfig::default()).unwrap_err();
    assert!(matches!(err, IntentError::NoFaceInCalibration(5)), "{err}");
}

#[test]
fn late_face_fails_calibration() {
    let spec = FaceSceneSpec { frames: 6, ..Default::default() };
    let scene = render_face_scene(&spec);
    let dir = tempfile::tempdir().unwrap();
    for i in 0..4 {
        save_pgm(&GrayFrame::filled(320, 240, 90), dir.path().join(format!("a{i}.pgm"))).unwrap();
    }
    for (i, f) in scene.frames.iter().enumerate() {
        save_pgm(f, dir.path().join(format!("b{i}.pgm"))).unwrap();
    }
    let strict = PipelineConfig { calibration_frames: 3, ..Default::default() };
    assert!(matches!(run_pipeline(dir.path(), &cascades(false), &strict), Err(IntentError::NoFaceInCalibration(3))));
    let out = run_pipeline(dir.path(), &cascades(false), &PipelineConfig::default()).unwrap();
    // The leading faceless frames borrow the first detected face.
    assert!(!out.frames[0].face_detected);
    assert_eq!(out.frames[0].face, out.frames[4].face);
}

#[test]
fn bad_frame_directories() {
    let empty = tempfile::tempdir().unwrap();
    assert!(matches!(run_pipeline(empty.path(), &cascades(false), &PipelineConfig::default()), Err(IntentError::NoFrames(_))));
    std::fs::write(empty.path().join("x.pgm"), b"P5 garbage").unwrap();
    assert!(matches!(run_pipeline(empty.path(), &cascades(false), &PipelineConfig::default()), Err(IntentError::Imaging(_))));
}

#[test]
fn frames_are_listed_by_name() {
    let dir = tempfile::tempdir().unwrap();
    for n in ["b.pgm", "a.PNG", "c.txt", "a.pgm"] {
        std::fs::write(dir.path().join(n), b"").unwrap();
    }
    let names: Vec<String> =
        list_frames(dir.path()).unwrap().iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names, vec!["a.PNG", "a.pgm", "b.pgm"]);
}

#[test]
fn held_out_reference_row_is_text() {
    let ds = GazeDataset::new(common::sample10_rows());
    let rows = ds.features();
    let labels = ds.labels().unwrap();
    let m = train_svm_linear(&rows[1..], &labels[1..], 1.0, 1e-3, 1_000_000).unwrap();
    let a = infer(&m, &ds.rows[0], "row1", None).unwrap();
    assert_eq!(a.label, Label::Text);
    assert!(a.score > 0.0);
    assert_eq!(a, infer(&m, &ds.rows[0], "row1", None).unwrap());
}

#[test]
fn inference_latency_is_small() {
    let ds = GazeDataset::new(common::sample10_rows());
    let m = train_svm_linear(&ds.features(), &ds.labels().unwrap(), 1.0, 1e-3, 1_000_000).unwrap();
    let mut total = std::time::Duration::ZERO;
    for i in 0..10_000 {
        total += infer_timed(&m, &ds.rows[i % 10], "x", None).unwrap().1;
    }
    assert!(total.as_secs_f64() * 1e3 / 10_000.0 <= 2.0);
}

#[test]
fn synthetic_movement_ratio_bands() {
    let ds = synth_dataset(40, 60.0, 30.0, 17, &FeatureConfig::default()).unwrap();
    let hist = feature_histograms(&ds, 20).unwrap();
    for h in &hist {
        assert_eq!(h.counts.iter().sum::<usize>(), 40);
    }
    for feature in ["MR_R", "MR_L"] {
        let j = if feature == "MR_R" { 6 } else { 7 };
        for (class, lo, hi) in [(Label::Text, 1.0, 5.0), (Label::Image, 0.0, 1.2)] {
            let vals: Vec<f64> = ds.rows.iter().filter(|r| r.label == Some(class)).map(|r| r.values()[j]).collect();
            let inside = vals.iter().filter(|v| (lo..=hi).contains(*v)).count() as f64 / vals.len() as f64;
            assert!(inside >= 0.8, "{feature} {class}: {inside}");
        }
    }
}
