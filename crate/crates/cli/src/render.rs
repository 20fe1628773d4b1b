use image::{Rgb, RgbImage};
use trajseg::{BinaryMask, ContourSet};

pub const FILL: [u8; 3] = [255, 64, 32];
pub const MARKER: [u8; 3] = [255, 230, 0];
const ALPHA: u16 = 128;

/// Blends the mask in `FILL` at half opacity and marks every vertex with a
/// 3×3 square.
pub fn overlay(base: &mut RgbImage, mask: &BinaryMask, contours: &ContourSet) {
    for (x, y) in mask.foreground() {
        if x < base.width() && y < base.height() {
            let px = base.get_pixel_mut(x, y);
            for c in 0..3 {
                let v = (px[c] as u16 * (256 - ALPHA) + FILL[c] as u16 * ALPHA) >> 8;
                px[c] = v as u8;
            }
        }
    }
    for p in contours.rings().iter().flat_map(|r| &r.vertices) {
        let (cx, cy) = (p.x.round() as i64, p.y.round() as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (x, y) = (cx + dx, cy + dy);
                if x >= 0 && y >= 0 && (x as u32) < base.width() && (y as u32) < base.height() {
                    base.put_pixel(x as u32, y as u32, Rgb(MARKER));
                }
            }
        }
    }
}
