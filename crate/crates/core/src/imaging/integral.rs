use super::GrayFrame;

/// Summed-area tables over a frame.
///
/// `sum(x, y)` is the sum of pixels in `[0, x) × [0, y)`; row 0 and column 0
/// are zero. The squared-sum grid backs window variance. The optional tilted
/// grid holds sums over 45°-rotated triangles,
/// `tilted(X, Y) = Σ { I(x, y) : y < Y, |x − X + 1| ≤ Y − y − 1 }`,
/// needed by cascades with rotated features.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<u64>,
    squares: Vec<u64>,
    tilted: Option<Vec<i64>>,
}

impl IntegralImage {
    pub fn new(frame: &GrayFrame) -> Self {
        let (w, h) = (frame.width(), frame.height());
        let stride = w + 1;
        let mut sums = vec![0u64; stride * (h + 1)];
        let mut squares = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            let mut row_sq = 0u64;
            for x in 0..w {
                let v = frame.get(x, y) as u64;
                row_sum += v;
                row_sq += v * v;
                let idx = (y + 1) * stride + x + 1;
                sums[idx] = sums[idx - stride] + row_sum;
                squares[idx] = squares[idx - stride] + row_sq;
            }
        }
        Self { width: w, height: h, sums, squares, tilted: None }
    }

    /// Same as [`IntegralImage::new`] plus the rotated-triangle grid.
    pub fn with_tilted(frame: &GrayFrame) -> Self {
        let mut ii = Self::new(frame);
        ii.tilted = Some(tilted_grid(frame));
        ii
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn has_tilted(&self) -> bool {
        self.tilted.is_some()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u64 {
        self.sums[y * (self.width + 1) + x]
    }

    #[inline]
    pub fn square_at(&self, x: usize, y: usize) -> u64 {
        self.squares[y * (self.width + 1) + x]
    }

    /// Sum over the `w × h` rectangle with top-left corner `(x, y)`.
    #[inline]
    pub fn sum(&self, x: usize, y: usize, w: usize, h: usize) -> u64 {
        debug_assert!(x + w <= self.width && y + h <= self.height);
        self.at(x + w, y + h) + self.at(x, y) - self.at(x + w, y) - self.at(x, y + h)
    }

    #[inline]
    pub fn square_sum(&self, x: usize, y: usize, w: usize, h: usize) -> u64 {
        debug_assert!(x + w <= self.width && y + h <= self.height);
        self.square_at(x + w, y + h) + self.square_at(x, y)
            - self.square_at(x + w, y)
            - self.square_at(x, y + h)
    }

    /// Entry `(x, y)` of the tilted grid, `x ∈ [0, width]`, `y ∈ [0, height]`.
    pub fn tilted_at(&self, x: usize, y: usize) -> i64 {
        let t = self.tilted.as_ref().expect("tilted grid not computed");
        t[y * (self.width + 1) + x]
    }

    /// Sum over a 45°-rotated rectangle anchored at `(x, y)`: the rectangle
    /// extends `w` steps down-right and `h` steps down-left from the anchor.
    /// Requires `x ≥ h`, `x + w ≤ width`, `y + w + h ≤ height`.
    pub fn tilted_sum(&self, x: usize, y: usize, w: usize, h: usize) -> i64 {
        self.tilted_at(x, y) - self.tilted_at(x - h, y + h) - self.tilted_at(x + w, y + w)
            + self.tilted_at(x + w - h, y + w + h)
    }
}

/// Tilted grid via the cone recurrence
/// `T(X,Y) = T(X−1,Y−1) + T(X+1,Y−1) − T(X,Y−2) + I(X−1,Y−1) + I(X−1,Y−2)`,
/// evaluated on a grid widened by `height + 1` columns each side so the
/// recurrence never reads outside its storage.
fn tilted_grid(frame: &GrayFrame) -> Vec<i64> {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let pad = h + 1;
    let ext_w = (w + 1 + 2 * pad) as usize;
    let rows = (h + 1) as usize;
    let mut ext = vec![0i64; ext_w * rows];
    let pix = |x: i64, y: i64| -> i64 {
        if x >= 0 && x < w && y >= 0 && y < h {
            frame.get(x as usize, y as usize) as i64
        } else {
            0
        }
    };
    let at = |ext: &Vec<i64>, xi: i64, yi: i64| -> i64 {
        if yi < 0 || xi < 0 || xi >= ext_w as i64 {
            0
        } else {
            ext[yi as usize * ext_w + xi as usize]
        }
    };
    for yy in 1..=h {
        for xi in 0..ext_w as i64 {
            let xx = xi - pad;
            let v = at(&ext, xi - 1, yy - 1) + at(&ext, xi + 1, yy - 1) - at(&ext, xi, yy - 2)
                + pix(xx - 1, yy - 1)
                + pix(xx - 1, yy - 2);
            ext[yy as usize * ext_w + xi as usize] = v;
        }
    }
    let stride = (w + 1) as usize;
    let mut out = vec![0i64; stride * rows];
    for y in 0..rows {
        for x in 0..stride {
            out[y * stride + x] = ext[y * ext_w + x + pad as usize];
        }
    }
    out
}
