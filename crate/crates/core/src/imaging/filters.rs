use super::{GrayFrame, ImagingError};

/// Global histogram equalization:
/// `out(v) = round((cdf(v) − cdf_min) / (N − cdf_min) · 255)`.
/// A constant frame comes back unchanged.
pub fn equalize_histogram(frame: &GrayFrame) -> GrayFrame {
    let mut hist = [0usize; 256];
    for &p in frame.pixels() {
        hist[p as usize] += 1;
    }
    let n = frame.pixels().len();
    let mut cdf = [0usize; 256];
    let mut acc = 0;
    for (v, &count) in hist.iter().enumerate() {
        acc += count;
        cdf[v] = acc;
    }
    let cdf_min = hist
        .iter()
        .position(|&c| c > 0)
        .map(|v| cdf[v])
        .unwrap_or(n);
    if cdf_min == n {
        return frame.clone();
    }
    let denom = (n - cdf_min) as f64;
    let mut lut = [0u8; 256];
    for v in 0..256 {
        if hist[v] > 0 {
            lut[v] = (((cdf[v] - cdf_min) as f64 / denom) * 255.0).round() as u8;
        }
    }
    map_pixels(frame, |p| lut[p as usize])
}

/// Inverts then binarizes: `255` where `255 − p ≥ t`, else `0`.
pub fn threshold_invert(frame: &GrayFrame, t: u8) -> GrayFrame {
    map_pixels(frame, |p| if 255 - p >= t { 255 } else { 0 })
}

fn map_pixels(frame: &GrayFrame, f: impl Fn(u8) -> u8) -> GrayFrame {
    let pixels = frame.pixels().iter().map(|&p| f(p)).collect();
    GrayFrame::new(frame.width(), frame.height(), pixels).expect("same dimensions")
}

/// Mirror index without repeating the edge sample (`dcb|abcd|cba`).
fn reflect101(i: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as i64 - 1);
    let m = i.rem_euclid(period);
    (if m < n as i64 { m } else { period - m }) as usize
}

const PYR_KERNEL: [u32; 5] = [1, 4, 6, 4, 1];

/// One Gaussian-pyramid reduction: separable `[1 4 6 4 1]/16` blur with
/// reflected borders, then every second row and column starting at 0.
/// Output is `⌈w/2⌉ × ⌈h/2⌉`.
pub fn pyramid_down(frame: &GrayFrame) -> Result<GrayFrame, ImagingError> {
    let (w, h) = (frame.width(), frame.height());
    if w < 2 || h < 2 {
        return Err(ImagingError::TooSmall { width: w, height: h });
    }
    let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));
    // Horizontal pass for the kept columns, all rows.
    let mut tmp = vec![0u32; ow * h];
    for y in 0..h {
        for xo in 0..ow {
            let cx = 2 * xo as i64;
            let mut acc = 0;
            for (k, &c) in PYR_KERNEL.iter().enumerate() {
                acc += c * frame.get(reflect101(cx + k as i64 - 2, w), y) as u32;
            }
            tmp[y * ow + xo] = acc;
        }
    }
    let mut out = Vec::with_capacity(ow * oh);
    for yo in 0..oh {
        let cy = 2 * yo as i64;
        for xo in 0..ow {
            let mut acc = 0;
            for (k, &c) in PYR_KERNEL.iter().enumerate() {
                acc += c * tmp[reflect101(cy + k as i64 - 2, h) * ow + xo];
            }
            out.push(((acc + 128) >> 8) as u8);
        }
    }
    GrayFrame::new(ow, oh, out)
}

/// L2 magnitude of the 3×3 Sobel gradient. Border pixels are 0.
pub fn sobel_magnitude(frame: &GrayFrame) -> Vec<f32> {
    let (w, h) = (frame.width(), frame.height());
    let mut mag = vec![0f32; w * h];
    if w < 3 || h < 3 {
        return mag;
    }
    let p = |x: usize, y: usize| frame.get(x, y) as i32;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let gx = (p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2 * p(x - 1, y) + p(x - 1, y + 1));
            let gy = (p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2 * p(x, y - 1) + p(x + 1, y - 1));
            mag[y * w + x] = ((gx * gx + gy * gy) as f32).sqrt();
        }
    }
    mag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domain, SeedStream};
    use proptest::prelude::*;

    fn random_frame(w: usize, h: usize, seed: u64) -> GrayFrame {
        let mut rng = SeedStream::new(seed, domain::TEST_DATA, 2);
        GrayFrame::new(w, h, (0..w * h).map(|_| rng.index(256) as u8).collect()).unwrap()
    }

    #[test]
    fn equalize_constant_is_identity() {
        let f = GrayFrame::filled(5, 3, 77);
        assert_eq!(equalize_histogram(&f), f);
    }

    #[test]
    fn equalize_two_level_frame_unchanged() {
        let f = GrayFrame::from_fn(4, 4, |x, _| if x < 2 { 0 } else { 255 });
        assert_eq!(equalize_histogram(&f), f);
    }

    #[test]
    fn equalize_four_levels() {
        let f = GrayFrame::new(4, 1, vec![50, 100, 150, 200]).unwrap();
        assert_eq!(equalize_histogram(&f).pixels(), &[0, 85, 170, 255]);
    }

    #[test]
    fn threshold_examples() {
        let f = GrayFrame::new(2, 1, vec![10, 250]).unwrap();
        assert_eq!(threshold_invert(&f, 128).pixels(), &[255, 0]);
        assert!(threshold_invert(&f, 0).pixels().iter().all(|&p| p == 255));
        let white = GrayFrame::filled(3, 3, 255);
        assert!(threshold_invert(&white, 1).pixels().iter().all(|&p| p == 0));
    }

    #[test]
    fn pyramid_sizes_and_dc() {
        let f = GrayFrame::filled(8, 8, 93);
        let p = pyramid_down(&f).unwrap();
        assert_eq!((p.width(), p.height()), (4, 4));
        assert!(p.pixels().iter().all(|&v| v == 93));
        let odd = pyramid_down(&GrayFrame::filled(7, 5, 1)).unwrap();
        assert_eq!((odd.width(), odd.height()), (4, 3));
        assert!(pyramid_down(&GrayFrame::filled(1, 5, 0)).is_err());
        let two = pyramid_down(&GrayFrame::filled(2, 2, 200)).unwrap();
        assert_eq!(two.pixels(), &[200]);
    }

    #[test]
    fn pyramid_impulse_response() {
        let mut f = GrayFrame::filled(33, 33, 0);
        f.set(16, 16, 255);
        let p = pyramid_down(&f).unwrap();
        // center tap of the 2-D kernel is 6·6/256
        assert_eq!(p.get(8, 8), 36);
        // neighbouring kept sample sits two pixels away: tap 1·6/256
        assert_eq!(p.get(9, 8), ((255 * 6 + 128) >> 8) as u8);
    }

    #[test]
    fn reflect_is_in_range() {
        for n in 1..6 {
            for i in -12..12 {
                assert!(reflect101(i, n) < n);
            }
        }
        assert_eq!(reflect101(-1, 4), 1);
        assert_eq!(reflect101(4, 4), 2);
        assert_eq!(reflect101(-2, 2), 0);
    }

    #[test]
    fn sobel_on_step_edge() {
        let f = GrayFrame::from_fn(6, 6, |x, _| if x < 3 { 0 } else { 100 });
        let m = sobel_magnitude(&f);
        assert_eq!(m[2 * 6 + 2], 400.0);
        assert_eq!(m[2 * 6 + 3], 400.0);
        assert_eq!(m[2 * 6 + 1], 0.0);
    }

    proptest! {
        #[test]
        fn equalize_idempotent_within_one(w in 1usize..24, h in 1usize..24, seed in 0u64..500) {
            let f = random_frame(w, h, seed);
            let once = equalize_histogram(&f);
            let twice = equalize_histogram(&once);
            for (a, b) in once.pixels().iter().zip(twice.pixels()) {
                prop_assert!((*a as i32 - *b as i32).abs() <= 1);
            }
        }

        #[test]
        fn threshold_is_binary(w in 1usize..16, h in 1usize..16, seed in 0u64..500, t in 0u8..=255) {
            let out = threshold_invert(&random_frame(w, h, seed), t);
            prop_assert!(out.pixels().iter().all(|&p| p == 0 || p == 255));
        }

        #[test]
        fn pyramid_constant(w in 2usize..40, h in 2usize..40, c in 0u8..=255) {
            let p = pyramid_down(&GrayFrame::filled(w, h, c)).unwrap();
            prop_assert_eq!((p.width(), p.height()), (w.div_ceil(2), h.div_ceil(2)));
            prop_assert!(p.pixels().iter().all(|&v| v == c));
        }

        #[test]
        fn filters_are_pure(w in 2usize..16, h in 2usize..16, seed in 0u64..100) {
            let f = random_frame(w, h, seed);
            prop_assert_eq!(equalize_histogram(&f), equalize_histogram(&f));
            prop_assert_eq!(pyramid_down(&f).unwrap(), pyramid_down(&f).unwrap());
        }
    }
}
