use serde::{Deserialize, Serialize};

use super::Rect;

/// Eye-region placement as fractions of the face rectangle. The left
/// region's top-left corner sits at `(x, y)·(w, h)` and it spans
/// `(width, height)·(w, h)`; the right region is its mirror image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeRegionLayout {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Default for EyeRegionLayout {
    fn default() -> Self {
        Self { x: 0.13, y: 0.25, width: 0.35, height: 0.30 }
    }
}

/// Left (image-left) and right eye search regions inside a face.
pub fn estimate_eye_regions(face: &Rect, layout: &EyeRegionLayout) -> (Rect, Rect) {
    let (w, h) = (face.width as f64, face.height as f64);
    let dx = ((layout.x * w).round() as usize).min(face.width.saturating_sub(1));
    let dy = ((layout.y * h).round() as usize).min(face.height.saturating_sub(1));
    // never wider than half the space between the side margins, so the
    // mirrored regions stay disjoint
    let rw = ((layout.width * w).round() as usize).clamp(1, ((face.width - 2 * dx.min(face.width / 2)) / 2).max(1));
    let rh = ((layout.height * h).round() as usize).clamp(1, face.height - dy);
    let left = Rect::new(face.x + dx, face.y + dy, rw, rh);
    let right_x = face.right() - dx - rw;
    let right = Rect::new(right_x, face.y + dy, rw, rh);
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_face() {
        let (l, r) = estimate_eye_regions(&Rect::new(0, 0, 100, 100), &EyeRegionLayout::default());
        assert_eq!(l, Rect::new(13, 25, 35, 30));
        assert_eq!(r, Rect::new(52, 25, 35, 30));
    }

    #[test]
    fn wide_face_contained() {
        let face = Rect::new(10, 20, 200, 100);
        let (l, r) = estimate_eye_regions(&face, &EyeRegionLayout::default());
        assert!(face.contains_rect(&l) && face.contains_rect(&r));
        assert_eq!(l, Rect::new(36, 45, 70, 30));
        assert_eq!(r, Rect::new(114, 45, 70, 30));
    }

    proptest! {
        #[test]
        fn mirrored_disjoint_contained(x in 0usize..500, y in 0usize..500, w in 10usize..400, h in 10usize..400) {
            let face = Rect::new(x, y, w, h);
            let (l, r) = estimate_eye_regions(&face, &EyeRegionLayout::default());
            prop_assert!(face.contains_rect(&l));
            prop_assert!(face.contains_rect(&r));
            prop_assert!(!l.intersects(&r));
            // mirror about the vertical midline: equal margins to the face sides
            prop_assert_eq!(l.x - face.x, face.right() - r.right());
            prop_assert_eq!((l.y, l.width, l.height), (r.y, r.width, r.height));
        }
    }
}
