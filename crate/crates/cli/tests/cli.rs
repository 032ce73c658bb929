use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use paco::media::{self, Audio};
use paco::{maskgen, Mask, Signal};

fn paco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paco"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn smooth_image(h: usize, w: usize) -> Signal {
    let s = (0..h * w)
        .map(|k| {
            let (y, x) = ((k / w) as f64 / h as f64, (k % w) as f64 / w as f64);
            (128.0 + 60.0 * (TAU * x).cos() + 30.0 * (TAU * y).sin()).round()
        })
        .collect();
    Signal::new(vec![h, w], s, 255.0).unwrap()
}

fn hole_mask(h: usize, w: usize) -> Mask {
    maskgen::rectangle([h, w], h / 2 - 2, w / 2 - 2, 4, 4).unwrap()
}

#[test]
fn empty_mask_gives_identical_image() {
    let dir = tempfile::tempdir().unwrap();
    let (input, mask, out) = (dir.path().join("in.pgm"), dir.path().join("m.pgm"), dir.path().join("out.pgm"));
    media::save_image(&[smooth_image(24, 24)], &input).unwrap();
    media::save_mask(&Mask::all_known(vec![24, 24]).unwrap(), &mask).unwrap();
    let o = paco(&["inpaint-image", "-i", p(&input), "-m", p(&mask), "-o", p(&out), "--patch", "8", "--stride", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&input).unwrap(), fs::read(&out).unwrap());
}

#[test]
fn metrics_of_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pgm");
    media::save_image(&[smooth_image(16, 16)], &a).unwrap();
    let o = paco(&["metrics", p(&a), p(&a)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0,inf,0,0,1.0");
}

#[test]
fn image_inpainting_with_trace_and_reference() {
    let dir = tempfile::tempdir().unwrap();
    let truth = smooth_image(32, 32);
    let mask = hole_mask(32, 32);
    let mut degraded = truth.clone();
    for i in mask.missing_indices() {
        degraded.samples_mut()[i] = 0.0;
    }
    let (input, m, out, truth_p, trace) = (
        dir.path().join("in.pgm"),
        dir.path().join("m.pgm"),
        dir.path().join("out.pgm"),
        dir.path().join("truth.pgm"),
        dir.path().join("trace.csv"),
    );
    media::save_image(&[degraded], &input).unwrap();
    media::save_image(std::slice::from_ref(&truth), &truth_p).unwrap();
    media::save_mask(&mask, &m).unwrap();
    let o = paco(&[
        "inpaint-image", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--patch", "8,8", "--stride", "2",
        "--max-iter", "30", "--clip", "0,255", "--trace", p(&trace), "--ref", p(&truth_p),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,lambda,cost,constraint_violation,cost_change,arg_change,rmse,mad,bias,psnr,ssim"
    );
    assert_eq!(lines.count(), 30);
    let restored = &media::load_image(&out).unwrap()[0];
    for i in mask.known_indices() {
        assert_eq!(restored.samples()[i], truth.samples()[i]);
    }
}

#[test]
fn color_image_runs_per_channel() {
    let dir = tempfile::tempdir().unwrap();
    let g = smooth_image(24, 24);
    let channels = vec![g.clone(), g.with_samples(g.samples().iter().map(|v| 255.0 - v).collect()).unwrap(), g];
    let (input, m, out, trace) = (
        dir.path().join("in.ppm"),
        dir.path().join("m.pgm"),
        dir.path().join("out.ppm"),
        dir.path().join("t.csv"),
    );
    media::save_image(&channels, &input).unwrap();
    media::save_mask(&hole_mask(24, 24), &m).unwrap();
    let o = paco(&[
        "inpaint-image", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--patch", "8", "--stride", "2",
        "--max-iter", "5", "--trace", p(&trace),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(media::load_image(&out).unwrap().len(), 3);
    assert_eq!(fs::read_to_string(&trace).unwrap().lines().count(), 6);
}

#[test]
fn audio_trace_converges() {
    let dir = tempfile::tempdir().unwrap();
    let fs_hz = 11025.0;
    let n = 2 * 11025;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs_hz;
            (6000.0 * (TAU * 220.0 * t).sin() + 3000.0 * (TAU * 440.0 * t).sin() + 1500.0 * (TAU * 660.0 * t).sin())
                .round()
        })
        .collect();
    let signal = Signal::new(vec![n], x, 32768.0).unwrap();
    let mask = Mask::new(vec![n], (0..n).map(|i| !(9000..9400).contains(&i)).collect()).unwrap();
    let (input, m, out, trace) = (
        dir.path().join("in.wav"),
        dir.path().join("m.raw"),
        dir.path().join("out.wav"),
        dir.path().join("t.csv"),
    );
    media::save_audio(&Audio { signal, sample_rate: 11025 }, &input).unwrap();
    media::save_mask(&mask, &m).unwrap();
    let o = paco(&["inpaint-audio", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--trace", p(&trace)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(media::load_audio(&out).unwrap().sample_rate, 11025);

    // rows are scaled by 1/(n·p·α); patches touching the gap: 1 window of 4096
    let csv = fs::read_to_string(&trace).unwrap();
    let last = csv.lines().last().unwrap();
    let scaled_violation: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    let (np, alpha) = (4096.0_f64, 32768.0);
    let raw = scaled_violation * np * alpha;
    assert!(raw < 1e-8 * np.sqrt() * alpha, "violation {raw}");
}

#[test]
fn mask_gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.raw"), dir.path().join("b.raw"));
    for path in [&a, &b] {
        let o = paco(&["mask-gen", "--kind", "audio", "--shape", "200000", "--seed", "5", "-o", p(path)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let r = dir.path().join("r.pgm");
    let o = paco(&["mask-gen", "--kind", "rectangle", "--shape", "64,64", "--rect", "4,4,8,8", "-o", p(&r)]);
    assert!(o.status.success());
    assert_eq!(media::load_mask(&r, &[64, 64]).unwrap().missing_count(), 64);

    let v = dir.path().join("v");
    let o = paco(&["mask-gen", "--kind", "video-scratches", "--shape", "3,16,16", "--width", "1", "-o", p(&v)]);
    assert!(o.status.success());
    assert!(media::load_mask(&v, &[3, 16, 16]).unwrap().missing_count() > 0);
}

#[test]
fn video_inpainting_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (t, h, w) = (4, 16, 16);
    let frames: Vec<f64> = (0..t * h * w).map(|k| ((k % w) * 8 + (k / (h * w)) * 3) as f64).collect();
    let video = Signal::new(vec![t, h, w], frames, 255.0).unwrap();
    let mask = maskgen::video_scratches([t, h, w], 1, 1, 2).unwrap();
    let (input, m, out) = (dir.path().join("in"), dir.path().join("m"), dir.path().join("out"));
    media::save_frames(&[video], &input, "f").unwrap();
    media::save_mask(&mask, &m).unwrap();
    let o = paco(&["inpaint-video", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--patch", "2,4,4", "--max-iter", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(media::load_frames(&out).unwrap()[0].shape(), &[t, h, w]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(paco(&["inpaint-image"]).status.code(), Some(2));
    assert_eq!(paco(&["frobnicate"]).status.code(), Some(2));

    let missing = dir.path().join("nope.pgm");
    let o = paco(&["inpaint-image", "-i", p(&missing), "-m", p(&missing), "-o", p(&missing)]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("paco: media:") && err.lines().count() == 1, "{err}");

    // every patch touches the hole: weights cannot be estimated
    let (input, m, out) = (dir.path().join("in.pgm"), dir.path().join("m.pgm"), dir.path().join("o.pgm"));
    media::save_image(&[smooth_image(8, 8)], &input).unwrap();
    media::save_mask(&hole_mask(8, 8), &m).unwrap();
    let o = paco(&["inpaint-image", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--patch", "8"]);
    assert_eq!(o.status.code(), Some(4));

    let o = paco(&["inpaint-image", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--patch", "4,4,4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = paco(&["inpaint-image", "-i", p(&input), "-m", p(&m), "-o", p(&out), "--clip", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
