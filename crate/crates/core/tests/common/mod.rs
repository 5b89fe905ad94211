//! Shared fixtures and brute-force oracles for the integration suites.
#![allow(dead_code)]

use gazeforge::detect::{Child, HaarCascade, HaarFeature, Rect, Stage, TreeNode, WeakClassifier, WeightedRect};
use gazeforge::imaging::GrayFrame;
use gazeforge::rng::{domain, SeedStream};

/// Random upright stub cascade: 1 to 3 stages of stumps and depth-2 trees
/// over 2- and 3-rect features.
pub fn random_stub_cascade(seed: u64) -> HaarCascade {
    let mut rng = SeedStream::new(seed, domain::TEST_DATA, 100);
    let (bw, bh) = (6 + rng.index(7), 6 + rng.index(7));
    let n_features = 2 + rng.index(4);
    let features = (0..n_features)
        .map(|_| {
            let n_rects = 2 + rng.index(2);
            let rects = (0..n_rects)
                .map(|i| {
                    let w = 1 + rng.index(bw);
                    let h = 1 + rng.index(bh);
                    let x = rng.index(bw - w + 1);
                    let y = rng.index(bh - h + 1);
                    let weight = if i == 0 { -1.0 } else { rng.uniform_range(0.5, 3.0) };
                    WeightedRect::new(x, y, w, h, weight)
                })
                .collect();
            HaarFeature { rects, tilted: false }
        })
        .collect::<Vec<_>>();
    let n_stages = 1 + rng.index(3);
    let stages = (0..n_stages)
        .map(|_| {
            let n_weak = 1 + rng.index(3);
            let classifiers = (0..n_weak)
                .map(|_| {
                    let node = |rng: &mut SeedStream, left, right| TreeNode {
                        feature: rng.index(n_features),
                        threshold: rng.uniform_range(-0.6, 0.6),
                        left,
                        right,
                    };
                    if rng.uniform() < 0.5 {
                        let n = node(&mut rng, Child::Leaf(0), Child::Leaf(1));
                        WeakClassifier { nodes: vec![n], leaves: vec![rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)] }
                    } else {
                        let root = node(&mut rng, Child::Node(1), Child::Leaf(2));
                        let inner = node(&mut rng, Child::Leaf(0), Child::Leaf(1));
                        let leaves = (0..3).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
                        WeakClassifier { nodes: vec![root, inner], leaves }
                    }
                })
                .collect::<Vec<_>>();
            Stage { threshold: rng.uniform_range(-1.2, 0.3) * n_weak as f64 * 0.5, classifiers }
        })
        .collect();
    let c = HaarCascade { window_width: bw, window_height: bh, stages, features };
    c.validate().expect("stub cascade is valid");
    c
}

/// Noisy frame with a few dark and bright blocks.
pub fn random_scene(seed: u64, width: usize, height: usize) -> GrayFrame {
    let mut rng = SeedStream::new(seed, domain::TEST_DATA, 200);
    let base = 60 + rng.index(120) as i32;
    let blocks: Vec<(usize, usize, usize, usize, i32)> = (0..4)
        .map(|_| {
            let w = 4 + rng.index(width / 3);
            let h = 4 + rng.index(height / 3);
            (rng.index(width - w), rng.index(height - h), w, h, rng.index(256) as i32)
        })
        .collect();
    let noise: Vec<i32> = (0..width * height).map(|_| rng.index(41) as i32 - 20).collect();
    GrayFrame::from_fn(width, height, |x, y| {
        let mut v = base;
        for &(bx, by, bw, bh, bv) in &blocks {
            if x >= bx && x < bx + bw && y >= by && y < by + bh {
                v = bv;
            }
        }
        (v + noise[y * width + x]).clamp(0, 255) as u8
    })
}

fn pixel_sum(f: &GrayFrame, x: usize, y: usize, w: usize, h: usize) -> (u64, u64) {
    let (mut s, mut sq) = (0u64, 0u64);
    for yy in y..y + h {
        for xx in x..x + w {
            let p = f.get(xx, yy) as u64;
            s += p;
            sq += p * p;
        }
    }
    (s, sq)
}

/// Upright rect of the base window scaled into a `ww × wh` window:
/// rounded origin and extent, at least 1 px, clipped to the window.
fn scale_rect(r: &WeightedRect, sx: f64, sy: f64, ww: usize, wh: usize) -> (usize, usize, usize, usize) {
    let x = ((r.x as f64 * sx).round() as usize).min(ww - 1);
    let y = ((r.y as f64 * sy).round() as usize).min(wh - 1);
    let w = ((r.width as f64 * sx).round() as usize).max(1).min(ww - x);
    let h = ((r.height as f64 * sy).round() as usize).max(1).min(wh - y);
    (x, y, w, h)
}

/// Direct per-pixel evaluation of an upright cascade on one window.
pub fn oracle_window(c: &HaarCascade, f: &GrayFrame, win: &Rect) -> bool {
    let (sx, sy) = (win.width as f64 / c.window_width as f64, win.height as f64 / c.window_height as f64);
    let area = (win.width * win.height) as f64;
    let (s, sq) = pixel_sum(f, win.x, win.y, win.width, win.height);
    let mean = s as f64 / area;
    let var = (sq as f64 / area - mean * mean).max(1.0);
    let norm = area * var.sqrt();
    let value = |fi: usize| {
        let mut v = 0.0;
        for r in &c.features[fi].rects {
            let (x, y, w, h) = scale_rect(r, sx, sy, win.width, win.height);
            v += r.weight * pixel_sum(f, win.x + x, win.y + y, w, h).0 as f64;
        }
        v / norm
    };
    c.stages.iter().all(|stage| {
        let total: f64 = stage
            .classifiers
            .iter()
            .map(|weak| {
                let mut i = 0;
                loop {
                    let n = &weak.nodes[i];
                    let next = if value(n.feature) < n.threshold { n.left } else { n.right };
                    match next {
                        Child::Node(j) => i = j,
                        Child::Leaf(l) => break weak.leaves[l],
                    }
                }
            })
            .sum();
        total >= stage.threshold
    })
}

/// Every window the scanner should visit, as listed in its contract.
pub fn oracle_windows(c: &HaarCascade, fw: usize, fh: usize, scale_factor: f64, min_size: usize, max_size: usize) -> Vec<Rect> {
    let mut out = Vec::new();
    for k in 0.. {
        let scale = scale_factor.powi(k);
        let ww = (c.window_width as f64 * scale).round() as usize;
        let wh = (c.window_height as f64 * scale).round() as usize;
        if ww > fw || wh > fh || ww > max_size || wh > max_size {
            break;
        }
        if ww >= min_size && wh >= min_size {
            let stride = (scale.round() as usize).max(1);
            let mut y = 0;
            while y + wh <= fh {
                let mut x = 0;
                while x + ww <= fw {
                    out.push(Rect::new(x, y, ww, wh));
                    x += stride;
                }
                y += stride;
            }
        }
    }
    out
}

pub fn oracle_detections(c: &HaarCascade, f: &GrayFrame, scale_factor: f64, min_size: usize, max_size: usize) -> Vec<Rect> {
    oracle_windows(c, f.width(), f.height(), scale_factor, min_size, max_size)
        .into_iter()
        .filter(|w| oracle_window(c, f, w))
        .collect()
}

/// Seeded synthetic eye for the Hough accuracy sweep: 64×64, radius in
/// [6, 20], centre anywhere the disc fits with a 2 px margin, noise σ ≤ 8.
pub fn hough_case(i: u64) -> gazeforge::imaging::SyntheticEyeSpec {
    let mut rng = SeedStream::new(i, domain::TEST_DATA, 300);
    let radius = rng.uniform_range(6.0, 20.0);
    let lo = radius + 2.0;
    let hi = 64.0 - radius - 2.0;
    gazeforge::imaging::SyntheticEyeSpec {
        width: 64,
        height: 64,
        center: (rng.uniform_range(lo, hi), rng.uniform_range(lo, hi)),
        radius,
        sclera: 200 + rng.index(40) as u8,
        iris: 20 + rng.index(50) as u8,
        noise_sigma: rng.uniform_range(0.0, 8.0),
        occlusion: 0.0,
        seed: i,
    }
}

/// The ten reference rows, as they appear in `data/sample10.csv`.
pub const SAMPLE10: [([f64; 8], &str); 10] = [
    ([37.0, 45.0, 2.0, 1.0, 3.115, 2.272, 2.385, 2.04], "TEXT"),
    ([363.0, 392.0, 7.0, 3.0, 11.274, 8.318, 0.227, 0.374], "IMAGE"),
    ([119.0, 113.0, 5.0, 6.0, 23.462, 26.857, 1.066, 0.758], "IMAGE"),
    ([17.0, 30.0, 2.0, 2.0, 2.175, 2.635, 1.894, 2.147], "TEXT"),
    ([13.0, 29.0, 2.0, 1.0, 2.102, 1.937, 1.68, 2.157], "TEXT"),
    ([478.0, 485.0, 9.0, 12.0, 10.23, 15.69, 0.221, 0.361], "IMAGE"),
    ([111.0, 107.0, 1.0, 1.0, 9.781, 8.271, 0.993, 0.887], "IMAGE"),
    ([413.0, 421.0, 4.0, 4.0, 12.974, 11.883, 0.653, 0.652], "IMAGE"),
    ([221.0, 241.0, 4.0, 2.0, 5.456, 5.287, 1.112, 1.037], "TEXT"),
    ([521.0, 518.0, 15.0, 13.0, 18.641, 14.391, 0.576, 0.489], "IMAGE"),
];

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn sample10_rows() -> Vec<gazeforge::gazefeat::FeatureVector> {
    SAMPLE10
        .iter()
        .map(|(v, l)| gazeforge::gazefeat::FeatureVector {
            max_fc_r: v[0] as u32,
            max_fc_l: v[1] as u32,
            min_fc_r: v[2] as u32,
            min_fc_l: v[3] as u32,
            avg_fc_r: v[4],
            avg_fc_l: v[5],
            mr_r: v[6],
            mr_l: v[7],
            label: Some(l.parse().unwrap()),
        })
        .collect()
}
