//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are written independently of the library code.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use ctphase_cli::commands::{bench_scans, slice_dataset};
use ctphase_core::dicom::{
    anonymize, parse_dicom, tags, write_fixture, DicomDataset, DicomElement, DicomTag, Vr, Whitelist,
};
use ctphase_core::eval::{auc_from_scores, bootstrap_ci, confusion, macro_metrics, study_split, Metric};
use ctphase_core::model::{
    bce_logit_gradient, compound_scale, lr_at_step, predict_slice, train, LinearModelParams, ModelError,
    ScalingConfig, TrainConfig,
};
use ctphase_core::pipeline::{
    predict_scan, r_sweep, sample_indices, score_all_slices, SamplerConfig, ScoredScan, DEFAULT_R_GRID,
};
use ctphase_core::preprocess::{FeatureConfig, FeatureVector, PreprocessConfig, WindowSpec};
use ctphase_core::rng::SeededRng;
use ctphase_core::synth::{generate_dataset, LabeledScan, PhantomConfig};
use ctphase_core::PhaseLabel;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_labels(rng: &mut SeededRng, n: usize) -> Vec<PhaseLabel> {
    (0..n).map(|_| PhaseLabel::ALL[rng.below_usize(4)]).collect()
}

// 1 ------------------------------------------------------------------------

fn brute_force_metrics(truth: &[PhaseLabel], pred: &[PhaseLabel]) -> [f64; 4] {
    let mut sums = [0.0; 3];
    for class in PhaseLabel::ALL {
        let tp = truth.iter().zip(pred).filter(|(t, p)| **t == class && **p == class).count() as f64;
        let fp = truth.iter().zip(pred).filter(|(t, p)| **t != class && **p == class).count() as f64;
        let fn_ = truth.iter().zip(pred).filter(|(t, p)| **t == class && **p != class).count() as f64;
        let prec = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let rec = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
        let f1 = if prec + rec == 0.0 { 0.0 } else { 2.0 * prec * rec / (prec + rec) };
        sums[0] += prec;
        sums[1] += rec;
        sums[2] += f1;
    }
    let acc = truth.iter().zip(pred).filter(|(t, p)| t == p).count() as f64 / truth.len() as f64;
    [acc, sums[0] / 4.0, sums[1] / 4.0, sums[2] / 4.0]
}

fn metric_oracle() -> Outcome {
    let mut rng = SeededRng::new(101);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 1 + rng.below_usize(300);
        let truth = random_labels(&mut rng, n);
        let pred: Vec<_> = if i % 4 == 0 {
            random_labels(&mut rng, n)
        } else {
            truth.iter().map(|&t| if rng.bernoulli(0.75) { t } else { PhaseLabel::ALL[rng.below_usize(3)] }).collect()
        };
        let m = macro_metrics(&confusion(&truth, &pred).map_err(|e| e.to_string())?);
        let got = [m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1];
        for (g, w) in got.iter().zip(brute_force_metrics(&truth, &pred)) {
            worst = worst.max((g - w).abs());
        }
    }
    check(worst <= 1e-12, format!("max |delta| = {worst:.2e} over 1000 vector pairs"))
}

// 2 ------------------------------------------------------------------------

fn windowing() -> Outcome {
    let w = WindowSpec::new(50.0, 400.0).map_err(|e| e.to_string())?;
    let got = [-150.0, 50.0, 250.0].map(|hu| w.normalize(hu));
    check(got == [0.0, 0.5, 1.0], format!("{{-150, 50, 250}} HU -> {got:?}"))
}

// 3 ------------------------------------------------------------------------

fn random_text(rng: &mut SeededRng, alphabet: &[u8], max: usize) -> String {
    let len = rng.below_usize(max + 1);
    (0..len).map(|_| alphabet[rng.below_usize(alphabet.len())] as char).collect()
}

fn random_uid(rng: &mut SeededRng) -> String {
    let parts = 2 + rng.below_usize(6);
    (0..parts).map(|i| (rng.below(100_000) + u64::from(i == 0)).to_string()).collect::<Vec<_>>().join(".")
}

fn random_fixture(rng: &mut SeededRng) -> DicomDataset {
    let name_chars = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ^ 0123456789";
    let mut ds = DicomDataset::empty()
        .with(DicomElement::text(tags::SOP_CLASS_UID, Vr::UI, "1.2.840.10008.5.1.4.1.1.2"))
        .with(DicomElement::text(tags::SOP_INSTANCE_UID, Vr::UI, &random_uid(rng)))
        .with(DicomElement::text(tags::STUDY_INSTANCE_UID, Vr::UI, &random_uid(rng)))
        .with(DicomElement::text(tags::SERIES_INSTANCE_UID, Vr::UI, &random_uid(rng)))
        .with(DicomElement::text(tags::MODALITY, Vr::CS, "CT"))
        .with(DicomElement::integer(tags::INSTANCE_NUMBER, rng.below(5000) as i64 - 10));
    let phi = [
        (tags::PATIENT_NAME, Vr::PN),
        (tags::PATIENT_ID, Vr::LO),
        (tags::INSTITUTION_NAME, Vr::LO),
        (tags::REFERRING_PHYSICIAN_NAME, Vr::PN),
        (tags::ACCESSION_NUMBER, Vr::SH),
    ];
    for (tag, vr) in phi {
        if rng.bernoulli(0.7) {
            ds.insert(DicomElement::text(tag, vr, &random_text(rng, name_chars, 30)));
        }
    }
    if rng.bernoulli(0.5) {
        ds.insert(DicomElement::text(tags::PATIENT_BIRTH_DATE, Vr::DA, "19700101"));
    }
    for _ in 0..rng.below_usize(4) {
        let group = 0x0009 + 2 * rng.below(0x100) as u16;
        let len = rng.below_usize(40);
        let bytes: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
        ds.insert(DicomElement::new(DicomTag::new(group, 0x1000 + rng.below(16) as u16), Vr::OB, bytes));
    }
    for tag in [tags::SLICE_THICKNESS, tags::WINDOW_CENTER, tags::RESCALE_INTERCEPT] {
        if rng.bernoulli(0.6) {
            ds.insert(DicomElement::decimal(tag, (rng.uniform() - 0.5) * 4000.0));
        }
    }
    if rng.bernoulli(0.8) {
        let rows = 1 + rng.below(16) as u16;
        let cols = 1 + rng.below(16) as u16;
        let bits = [8u16, 16, 32][rng.below_usize(3)];
        let n = usize::from(rows) * usize::from(cols) * usize::from(bits / 8);
        let raw: Vec<u8> = (0..n).map(|_| rng.next_u64() as u8).collect();
        ds.insert(DicomElement::u16(tags::ROWS, rows));
        ds.insert(DicomElement::u16(tags::COLUMNS, cols));
        ds.insert(DicomElement::u16(tags::BITS_ALLOCATED, bits));
        ds.insert(DicomElement::u16(tags::PIXEL_REPRESENTATION, rng.below(2) as u16));
        ds.insert(DicomElement::new(tags::PIXEL_DATA, if bits == 8 { Vr::OB } else { Vr::OW }, raw));
    }
    ds
}

/// Every tag in an explicit-VR little-endian byte stream, read without the
/// library parser.
fn scan_tags(bytes: &[u8]) -> Result<Vec<DicomTag>, String> {
    if bytes.len() < 132 || &bytes[128..132] != b"DICM" {
        return Err("missing DICM marker".into());
    }
    let mut pos = 132;
    let mut found = Vec::new();
    let u16_at = |p: usize| u16::from_le_bytes([bytes[p], bytes[p + 1]]);
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(format!("truncated header at {pos}"));
        }
        found.push(DicomTag::new(u16_at(pos), u16_at(pos + 2)));
        let vr = &bytes[pos + 4..pos + 6];
        let long = matches!(vr, b"OB" | b"OD" | b"OF" | b"OL" | b"OV" | b"OW" | b"SQ" | b"UC" | b"UN" | b"UR" | b"UT" | b"SV" | b"UV");
        let (len, header) = if long {
            let l = u32::from_le_bytes(bytes[pos + 8..pos + 12].try_into().unwrap()) as usize;
            (l, 12)
        } else {
            (usize::from(u16_at(pos + 6)), 8)
        };
        pos += header + len;
    }
    if pos != bytes.len() {
        return Err("element overruns the stream".into());
    }
    Ok(found)
}

fn dicom_round_trip() -> Outcome {
    let mut rng = SeededRng::new(303);
    let wl = Whitelist::default_ct();
    let mut stripped = 0;
    for i in 0..500 {
        let ds = random_fixture(&mut rng);
        let bytes = write_fixture(&ds).map_err(|e| format!("fixture {i}: {e}"))?;
        let back = parse_dicom(&bytes).map_err(|e| format!("fixture {i}: {e}"))?;
        if back != ds {
            return Err(format!("fixture {i} did not round-trip"));
        }
        let clean = anonymize(&back, &wl);
        stripped += ds.len() - clean.len();
        let clean_bytes = write_fixture(&clean).map_err(|e| e.to_string())?;
        for tag in scan_tags(&clean_bytes)? {
            if !wl.contains(tag) {
                return Err(format!("fixture {i}: {tag} survived anonymization"));
            }
        }
        if scan_tags(&bytes)? != ds.tags().collect::<Vec<_>>() {
            return Err(format!("fixture {i}: byte-level tag scan disagrees with dataset"));
        }
    }
    Ok(format!("500/500 fixtures round-trip; {stripped} non-whitelisted attributes stripped, none survive"))
}

// 4 ------------------------------------------------------------------------

fn sampler_law() -> Outcome {
    let ns: Vec<usize> = (1..=50).chain([100, 281, 2350]).collect();
    let rs: Vec<f64> = std::iter::once(1.0).chain((1..=20).map(|i| 5.0 * i as f64)).collect();
    let mut cells = 0;
    for &n in &ns {
        for &r in &rs {
            let want = ((n as f64 * r / 100.0).ceil() as usize).max(1);
            for seed in 0..3 {
                let idx = sample_indices(n, &SamplerConfig::new(r, seed).map_err(|e| e.to_string())?);
                let distinct: HashSet<_> = idx.iter().collect();
                if idx.len() != want || distinct.len() != want || idx.iter().any(|&i| i >= n) {
                    return Err(format!("n={n} R={r} seed={seed}: got {} indices, want {want}", idx.len()));
                }
            }
            cells += 1;
        }
    }
    let mut counts = [0usize; 10];
    for seed in 0..10_000 {
        for i in sample_indices(10, &SamplerConfig::new(10.0, seed).unwrap()) {
            counts[i] += 1;
        }
    }
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / 10_000.0).collect();
    let worst = freqs.iter().map(|f| (f - 0.1).abs()).fold(0.0, f64::max);
    check(
        worst <= 0.01,
        format!("{cells} (n, R) cells exact; n=10 R=10 index frequencies within {worst:.4} of 0.1"),
    )
}

// 5, 6, 7 share one trained model on a noisy phantom -----------------------

struct NoisyBench {
    test: Vec<LabeledScan>,
    scored: Vec<ScoredScan>,
    model: LinearModelParams,
    pre: PreprocessConfig,
}

const LABEL_NOISE: f64 = 0.15;

fn noisy_bench() -> Result<NoisyBench, String> {
    let cfg = PhantomConfig {
        slice_label_noise: LABEL_NOISE,
        seed: 505,
        ..PhantomConfig::default()
    };
    let scans = generate_dataset(&cfg, 40, 3).map_err(|e| e.to_string())?;
    let studies: Vec<&str> = scans.iter().map(|s| s.study_uid()).collect();
    let split = study_split(&studies, 0.7, 505).map_err(|e| e.to_string())?;
    let pre = PreprocessConfig::default();
    let train_scans: Vec<_> = split.train.iter().map(|&i| scans[i].scan.clone()).collect();
    let data = slice_dataset(&train_scans, &pre).map_err(|e| e.to_string())?;
    let model = train(&data, pre.features, &TrainConfig::default())
        .map_err(|e| e.to_string())?
        .params;
    let test: Vec<LabeledScan> = split.test.iter().map(|&i| scans[i].clone()).collect();
    let scored = test
        .iter()
        .map(|ls| {
            Ok(ScoredScan {
                series_uid: ls.scan.series_uid.clone(),
                label: ls.phase,
                probs: score_all_slices(&ls.scan, &model, &pre).map_err(|e| e.to_string())?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(NoisyBench { test, scored, model, pre })
}

fn macro_f1(truth: &[PhaseLabel], pred: &[PhaseLabel]) -> f64 {
    brute_force_metrics(truth, pred)[3]
}

fn voting_benefit(b: &NoisyBench) -> Outcome {
    let mut slice_truth = Vec::new();
    let mut slice_pred = Vec::new();
    for s in &b.scored {
        for p in &s.probs {
            slice_truth.push(s.label);
            slice_pred.push(p.argmax());
        }
    }
    let slice_f1 = macro_f1(&slice_truth, &slice_pred);

    let truth: Vec<_> = b.scored.iter().map(|s| s.label).collect();
    let seeds = 50;
    let mut total = 0.0;
    for seed in 0..seeds {
        let pred = b
            .scored
            .iter()
            .map(|s| s.predict(30.0, seed).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        total += macro_f1(&truth, &pred);
    }
    let scan_f1 = total / seeds as f64;

    // The cached-score path must agree with the full pipeline.
    let sampler = SamplerConfig::new(30.0, 7).unwrap();
    for (ls, s) in b.test.iter().zip(&b.scored) {
        let full = predict_scan(&ls.scan, &b.model, &sampler, &b.pre).map_err(|e| e.to_string())?;
        if full.phase != s.predict(30.0, 7).map_err(|e| e.to_string())? {
            return Err(format!("cached and full predictions differ on {}", ls.scan.series_uid));
        }
    }

    let gain = scan_f1 - slice_f1;
    check(
        (0.80..=0.90).contains(&slice_f1) && gain >= 0.02,
        format!(
            "label noise {LABEL_NOISE}: slice macro F1 {slice_f1:.4} (target 0.80-0.90), \
             scan macro F1 at R=30 {scan_f1:.4} over {seeds} seeds, gain {:.2} points",
            100.0 * gain
        ),
    )
}

fn plateau(b: &NoisyBench) -> Outcome {
    let rows = r_sweep(&b.scored, &DEFAULT_R_GRID, 100, 0).map_err(|e| e.to_string())?;
    let curve: Vec<(f64, f64)> = rows.iter().map(|r| (r.r_percent, r.mean_macro_f1)).collect();
    let early: Vec<f64> = curve.iter().filter(|(r, _)| *r <= 30.0).map(|c| c.1).collect();
    let worst_drop = early.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    let late: Vec<f64> = curve.iter().filter(|(r, _)| *r >= 30.0).map(|c| c.1).collect();
    let spread = late.iter().cloned().fold(f64::MIN, f64::max) - late.iter().cloned().fold(f64::MAX, f64::min);
    let shape: Vec<String> = curve.iter().map(|(r, f)| format!("{r}:{f:.3}")).collect();
    check(
        worst_drop <= 0.005 && spread < 0.01,
        format!(
            "largest drop R<=30 {:.2} points, spread R>=30 {:.2} points [{}]",
            100.0 * worst_drop,
            100.0 * spread,
            shape.join(" ")
        ),
    )
}

fn latency(b: &NoisyBench) -> Outcome {
    let cfg = PhantomConfig {
        min_slices: 300,
        max_slices: 300,
        seed: 707,
        ..PhantomConfig::default()
    };
    let scans: Vec<_> = generate_dataset(&cfg, 10, 5)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|l| l.scan)
        .collect();
    let rows = bench_scans(&scans, &b.model, &b.pre, &[30.0, 100.0], 0).map_err(|e| e.to_string())?;
    let (r30, r100) = (&rows[0], &rows[1]);
    let speedup = r100.mean_seconds_per_scan / r30.mean_seconds_per_scan;
    check(
        r30.calls_per_scan == 90.0 && r100.calls_per_scan == 300.0 && speedup >= 2.0,
        format!(
            "{} scans x 300 slices: calls/scan {} vs {}, {:.2} ms vs {:.2} ms per scan, speedup {speedup:.2}x",
            r30.scans,
            r30.calls_per_scan,
            r100.calls_per_scan,
            1e3 * r30.mean_seconds_per_scan,
            1e3 * r100.mean_seconds_per_scan
        ),
    )
}

// 8 ------------------------------------------------------------------------

fn training_recipe() -> Outcome {
    // Each class lights up its own block of a 16-bin histogram.
    let features = FeatureConfig::new(16, 1).unwrap();
    let mut rng = SeededRng::new(808);
    let mut data = Vec::new();
    for _ in 0..500 {
        for label in PhaseLabel::ALL {
            let mut x = vec![0.0; 16];
            let mut mass = 0.0;
            for j in 0..4 {
                let v = 0.5 + rng.uniform();
                x[4 * label.ordinal() + j] = v;
                mass += v;
            }
            x.iter_mut().for_each(|v| *v /= mass);
            data.push((FeatureVector(x), label));
        }
    }
    let out = train(&data, features, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let (first, last) = (out.loss_trace[0], out.loss_trace[out.loss_trace.len() - 1]);

    let (base, warmup, total) = (1e-2, 25usize, 500usize);
    let mut lr_err = 0.0f64;
    for i in 0..20 {
        let step = i * 25 + i % 7;
        let closed = if step < warmup {
            base * (step + 1) as f64 / warmup as f64
        } else {
            0.5 * base * (1.0 + (std::f64::consts::PI * (step - warmup) as f64 / (total - warmup) as f64).cos())
        };
        lr_err = lr_err.max((lr_at_step(base, warmup, step, total) - closed).abs());
    }

    let grad_err = gradient_check()?;
    check(
        out.loss_trace.len() == 15 && last < 0.5 * first && lr_err <= 1e-12 && grad_err <= 1e-4,
        format!(
            "loss {first:.4} -> {last:.4} ({:.1}%) in 15 epochs; lr max error {lr_err:.1e}; \
             gradient max relative error {grad_err:.1e}",
            100.0 * last / first
        ),
    )
}

fn explicit_loss(params: &LinearModelParams, x: &[f64], y: PhaseLabel) -> f64 {
    (0..4)
        .map(|c| {
            let z: f64 = params.weight_row(c).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + params.biases()[c];
            let p = (1.0 / (1.0 + (-z).exp())).clamp(1e-7, 1.0 - 1e-7);
            if c == y.ordinal() {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / 4.0
}

fn gradient_check() -> Result<f64, String> {
    let features = FeatureConfig::new(8, 2).unwrap();
    let dim = features.dim();
    let mut rng = SeededRng::new(809);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let w: Vec<f64> = (0..4 * dim).map(|_| 0.3 * rng.normal()).collect();
        let b = [rng.normal(), rng.normal(), rng.normal(), rng.normal()];
        let params = LinearModelParams::new(features, w, b).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..dim).map(|_| rng.uniform()).collect();
        let y = PhaseLabel::ALL[trial % 4];
        let probs = predict_slice(&params, &FeatureVector(x.clone())).map_err(|e| e.to_string())?;
        let gz = bce_logit_gradient(&probs, y);
        for c in 0..4 {
            for j in 0..dim {
                let idx = c * dim + j;
                let mut plus = params.clone();
                let mut minus = params.clone();
                plus.weights_mut()[idx] += h;
                minus.weights_mut()[idx] -= h;
                let numeric = (explicit_loss(&plus, &x, y) - explicit_loss(&minus, &x, y)) / (2.0 * h);
                let analytic = gz[c] * x[j];
                worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8));
            }
        }
    }
    Ok(worst)
}

// 9 ------------------------------------------------------------------------

fn bootstrap() -> Outcome {
    let mut rng = SeededRng::new(909);
    for i in 0..20 {
        let n = 80 + rng.below_usize(400);
        let acc = 0.6 + 0.35 * rng.uniform();
        let items: Vec<_> = (0..n)
            .map(|_| {
                let t = PhaseLabel::ALL[rng.below_usize(4)];
                (t, if rng.bernoulli(acc) { t } else { PhaseLabel::ALL[rng.below_usize(4)] })
            })
            .collect();
        let metric = Metric::ALL[i % 4];
        let a = bootstrap_ci(&items, metric, 5000, 0.95, i as u64).map_err(|e| e.to_string())?;
        let b = bootstrap_ci(&items, metric, 5000, 0.95, i as u64).map_err(|e| e.to_string())?;
        if !(a.lower <= a.point && a.point <= a.upper) {
            return Err(format!("evaluation {i}: {a:?} excludes its point estimate"));
        }
        if a != b {
            return Err(format!("evaluation {i}: same seed gave different intervals"));
        }
    }
    let n = 1000;
    let items: Vec<_> = (0..n)
        .map(|_| {
            let t = PhaseLabel::ALL[rng.below_usize(4)];
            (t, if rng.bernoulli(0.9) { t } else { PhaseLabel::ALL[(t.ordinal() + 2) % 4] })
        })
        .collect();
    let ci = bootstrap_ci(&items, Metric::Accuracy, 5000, 0.95, 1).map_err(|e| e.to_string())?;
    let p = ci.point;
    let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n as f64).sqrt();
    let (dl, du) = ((ci.lower - (p - half)).abs(), (ci.upper - (p + half)).abs());
    check(
        dl <= 0.015 && du <= 0.015,
        format!(
            "20/20 intervals contain the point and repeat exactly; Bernoulli(0.9): bootstrap [{:.4}, {:.4}] \
             vs normal [{:.4}, {:.4}]",
            ci.lower,
            ci.upper,
            p - half,
            p + half
        ),
    )
}

// 10 -----------------------------------------------------------------------

fn auc_oracle() -> Outcome {
    let mut rng = SeededRng::new(1010);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut tie_heavy = 0;
    while done < 200 {
        let n = 2 + rng.below_usize(150);
        let levels = if done % 2 == 0 { 2 + rng.below_usize(5) } else { 1 << 30 };
        let scores: Vec<f64> = (0..n).map(|_| rng.below_usize(levels) as f64).collect();
        let p_pos = 0.3 + 0.4 * rng.uniform();
        let pos: Vec<bool> = (0..n).map(|_| rng.bernoulli(p_pos)).collect();
        let Some(curve) = auc_from_scores(&scores, &pos) else { continue };
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if pos[i] && !pos[j] {
                    pairs += 1.0;
                    wins += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        worst = worst.max((curve.auc - wins / pairs).abs());
        tie_heavy += usize::from(levels < 10);
        done += 1;
    }
    check(worst <= 1e-9, format!("200 score sets ({tie_heavy} tie-heavy), max |delta| = {worst:.2e}"))
}

// 11 -----------------------------------------------------------------------

fn split_hygiene() -> Outcome {
    let mut rng = SeededRng::new(1111);
    let study_of_scan: Vec<String> = (0..265)
        .flat_map(|s| std::iter::repeat_n(format!("2.25.{s}"), 1 + rng.below_usize(9)))
        .collect();
    for seed in 0..1000 {
        let split = study_split(&study_of_scan, 0.7, seed).map_err(|e| e.to_string())?;
        let train: HashSet<&String> = split.train.iter().map(|&i| &study_of_scan[i]).collect();
        if split.test.iter().any(|&i| train.contains(&study_of_scan[i])) {
            return Err(format!("seed {seed}: a study appears on both sides"));
        }
        if split.train.len() + split.test.len() != study_of_scan.len() {
            return Err(format!("seed {seed}: scans lost"));
        }
    }
    Ok(format!("1000 seeds over {} scans / 265 studies, no study on both sides", study_of_scan.len()))
}

// 12 -----------------------------------------------------------------------

fn compound_scaling() -> Outcome {
    let cfg = |alpha, beta, gamma, phi, validate| ScalingConfig { alpha, beta, gamma, phi, validate };
    let zero = compound_scale(&cfg(1.2, 1.1, 1.15, 0.0, true)).map_err(|e| e.to_string())?;
    let cubed = compound_scale(&cfg(2.0, 1.0, 1.0, 3.0, false)).map_err(|e| e.to_string())?;
    let rejected = matches!(
        compound_scale(&cfg(1.0, 1.0, 1.0, 1.0, true)),
        Err(ModelError::ConstraintViolated { .. })
    );
    check(
        zero == (1.0, 1.0, 1.0) && cubed == (8.0, 1.0, 1.0) && rejected,
        format!("phi=0 -> {zero:?}; (2,1,1,3) -> {cubed:?}; product 1 rejected: {rejected}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let noisy = noisy_bench();
    let with_bench = |f: fn(&NoisyBench) -> Outcome| match &noisy {
        Ok(b) => f(b),
        Err(e) => Err(format!("could not build the noisy phantom benchmark: {e}")),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("metric oracle equivalence", metric_oracle()),
        ("windowing exactness", windowing()),
        ("DICOM round trip and anonymization", dicom_round_trip()),
        ("sampler law", sampler_law()),
        ("voting benefit", with_bench(voting_benefit)),
        ("plateau shape", with_bench(plateau)),
        ("latency", with_bench(latency)),
        ("training recipe", training_recipe()),
        ("bootstrap", bootstrap()),
        ("AUC oracle", auc_oracle()),
        ("split hygiene", split_hygiene()),
        ("compound scaling", compound_scaling()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
