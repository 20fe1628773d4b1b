//! Scanline even-odd rasterization sampled at pixel centers.
//!
//! A pixel belongs to a ring when its center is strictly inside the ring
//! (even-odd rule) or lies exactly on one of its edges. A pixel is foreground
//! when it belongs to an odd number of rings. Edge/center sign tests use exact
//! adaptive predicates, so boundary hits are decided without rounding error.

use robust::{orient2d, Coord};

use crate::geometry::{BinaryMask, ImageSize, PixelPolygon, Point};

#[inline]
fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Rasterizes any number of rings with the even-odd-over-rings rule.
pub fn rasterize<'a>(
    rings: impl IntoIterator<Item = &'a PixelPolygon>,
    size: ImageSize,
) -> BinaryMask {
    let mut out = BinaryMask::empty(size);
    let mut scratch = RingScratch::new(size);
    for ring in rings {
        scratch.fill_ring(ring);
        scratch.xor_into(&mut out);
    }
    out
}

pub fn rasterize_polygon(poly: &PixelPolygon, size: ImageSize) -> BinaryMask {
    rasterize(std::iter::once(poly), size)
}

/// Per-ring membership buffer, reused across rings.
struct RingScratch {
    w: usize,
    h: usize,
    member: Vec<bool>,
    rows: Option<(usize, usize)>,
    flips: Vec<bool>,
}

impl RingScratch {
    fn new(size: ImageSize) -> Self {
        let (w, h) = (size.width as usize, size.height as usize);
        RingScratch {
            w,
            h,
            member: vec![false; w * h],
            rows: None,
            flips: vec![false; w + 1],
        }
    }

    fn clear(&mut self) {
        if let Some((r0, r1)) = self.rows.take() {
            self.member[r0 * self.w..(r1 + 1) * self.w].fill(false);
        }
    }

    fn fill_ring(&mut self, ring: &PixelPolygon) {
        self.clear();
        let v = &ring.vertices;
        if v.is_empty() || v.iter().any(|p| !p.is_finite()) {
            return;
        }
        let (min_y, max_y) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.y), hi.max(p.y))
            });
        let r0 = min_y.ceil().max(0.0);
        let r1 = max_y.floor().min(self.h as f64 - 1.0);
        if r0 > r1 {
            return;
        }
        let (r0, r1) = (r0 as usize, r1 as usize);
        self.rows = Some((r0, r1));

        for py in r0..=r1 {
            self.fill_interior_row(ring, py);
        }
        for (a, b) in ring.edges() {
            self.mark_edge(a, b, r0, r1);
        }
    }

    /// Parity of edge crossings to the right of each pixel center in row `py`.
    fn fill_interior_row(&mut self, ring: &PixelPolygon, py: usize) {
        let w = self.w;
        let yc = py as f64;
        self.flips.fill(false);
        let mut any = false;
        for (a, b) in ring.edges() {
            // Half-open rule: an edge crosses the scanline when exactly one
            // endpoint lies strictly below it.
            if (a.y > yc) == (b.y > yc) {
                continue;
            }
            let (lo, hi) = if a.y < b.y { (a, b) } else { (b, a) };
            // Largest px with crossing_x > px, clipped to [-1, w-1].
            let k = last_pixel_left_of_crossing(lo, hi, yc, w);
            self.flips[(k + 1) as usize] ^= true;
            any = true;
        }
        if !any {
            return;
        }
        let row = &mut self.member[py * w..(py + 1) * w];
        let mut parity = false;
        for px in (0..w).rev() {
            parity ^= self.flips[px + 1];
            row[px] = parity;
        }
    }

    fn mark_edge(&mut self, a: Point, b: Point, r0: usize, r1: usize) {
        let w = self.w;
        let on_segment = |px: f64, py: f64| {
            px >= a.x.min(b.x)
                && px <= a.x.max(b.x)
                && py >= a.y.min(b.y)
                && py <= a.y.max(b.y)
                && orient2d(coord(a), coord(b), Coord { x: px, y: py }) == 0.0
        };
        if a.y == b.y {
            let yc = a.y;
            if yc.fract() != 0.0 || yc < r0 as f64 || yc > r1 as f64 {
                return;
            }
            let x0 = a.x.min(b.x).ceil().max(0.0);
            let x1 = a.x.max(b.x).floor().min(w as f64 - 1.0);
            if x0 > x1 {
                return;
            }
            let row = yc as usize * w;
            self.member[row + x0 as usize..=row + x1 as usize].fill(true);
            return;
        }
        let y0 = a.y.min(b.y).ceil().max(r0 as f64);
        let y1 = a.y.max(b.y).floor().min(r1 as f64);
        if y0 > y1 {
            return;
        }
        for py in y0 as usize..=y1 as usize {
            let yc = py as f64;
            let xc = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
            let guess = xc.round();
            if !(guess >= -1.0 && guess <= w as f64) {
                continue;
            }
            let guess = guess as i64;
            for px in (guess - 1).max(0)..=(guess + 1).min(w as i64 - 1) {
                if on_segment(px as f64, yc) {
                    self.member[py * w + px as usize] = true;
                }
            }
        }
    }

    fn xor_into(&self, out: &mut BinaryMask) {
        if let Some((r0, r1)) = self.rows {
            let range = r0 * self.w..(r1 + 1) * self.w;
            for (o, &m) in out.bits_mut()[range.clone()]
                .iter_mut()
                .zip(&self.member[range])
            {
                *o ^= m;
            }
        }
    }
}

/// For an edge with `lo.y <= yc < hi.y`, the largest integer `px` in
/// `[-1, w-1]` whose center lies strictly left of the crossing.
fn last_pixel_left_of_crossing(lo: Point, hi: Point, yc: f64, w: usize) -> i64 {
    // orient2d(lo, hi, p) > 0  <=>  crossing_x > p.x  (since hi.y > lo.y)
    let left_of = |px: i64| {
        orient2d(
            coord(lo),
            coord(hi),
            Coord {
                x: px as f64,
                y: yc,
            },
        ) > 0.0
    };
    let xc = lo.x + (yc - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
    let upper = w as i64 - 1;
    let mut k = if xc.is_nan() {
        0
    } else {
        (xc.ceil() - 1.0).clamp(-1.0, upper as f64) as i64
    };
    while k < upper && left_of(k + 1) {
        k += 1;
    }
    while k >= 0 && !left_of(k) {
        k -= 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(w: u32, h: u32) -> ImageSize {
        ImageSize::new(w, h).unwrap()
    }

    #[test]
    fn orient2d_sign_matches_crossing_side() {
        let lo = Point::new(0., 0.);
        let hi = Point::new(4., 4.);
        // crossing at y=2 is x=2
        assert!(orient2d(coord(lo), coord(hi), Coord { x: 1., y: 2. }) > 0.0);
        assert!(orient2d(coord(lo), coord(hi), Coord { x: 3., y: 2. }) < 0.0);
        assert_eq!(last_pixel_left_of_crossing(lo, hi, 2.0, 10), 1);
        assert_eq!(last_pixel_left_of_crossing(lo, hi, 2.0, 2), 1);
        assert_eq!(last_pixel_left_of_crossing(lo, hi, 0.0, 10), -1);
    }

    #[test]
    fn square_fills_block_inclusive() {
        let sq = PixelPolygon::from_coords(&[(1., 1.), (3., 1.), (3., 3.), (1., 3.)]);
        let m = rasterize_polygon(&sq, size(5, 5));
        let expect =
            BinaryMask::from_ascii(&[".....", ".###.", ".###.", ".###.", "....."]).unwrap();
        assert_eq!(m, expect);
    }

    #[test]
    fn outside_ring_is_clipped_away() {
        let sq = PixelPolygon::from_coords(&[(10., 10.), (20., 10.), (20., 20.)]);
        assert!(rasterize_polygon(&sq, size(5, 5)).is_empty());
        let neg = PixelPolygon::from_coords(&[(-10., -10.), (-2., -10.), (-2., -2.)]);
        assert!(rasterize_polygon(&neg, size(5, 5)).is_empty());
    }

    #[test]
    fn covering_ring_fills_everything() {
        let big = PixelPolygon::from_coords(&[(-5., -5.), (50., -5.), (50., 50.), (-5., 50.)]);
        assert_eq!(rasterize_polygon(&big, size(4, 3)).count(), 12);
    }

    #[test]
    fn degenerate_rings_keep_boundary_pixels() {
        let dot = PixelPolygon::from_coords(&[(2., 1.)]);
        let m = rasterize_polygon(&dot, size(4, 4));
        assert_eq!(m.foreground().collect::<Vec<_>>(), vec![(2, 1)]);
        let off = PixelPolygon::from_coords(&[(2.5, 1.)]);
        assert!(rasterize_polygon(&off, size(4, 4)).is_empty());
        let seg = PixelPolygon::from_coords(&[(0., 0.), (2., 2.)]);
        let m = rasterize_polygon(&seg, size(4, 4));
        assert_eq!(
            m.foreground().collect::<Vec<_>>(),
            vec![(0, 0), (1, 1), (2, 2)]
        );
    }

    #[test]
    fn nested_rings_alternate() {
        let outer = PixelPolygon::from_coords(&[(0., 0.), (6., 0.), (6., 6.), (0., 6.)]);
        let inner = PixelPolygon::from_coords(&[(2., 2.), (4., 2.), (4., 4.), (2., 4.)]);
        let m = rasterize([&outer, &inner], size(7, 7));
        assert!(m.get(1, 1));
        assert!(!m.get(3, 3));
        // on the inner boundary and strictly inside the outer: two rings
        assert!(!m.get(2, 2));
        assert_eq!(m.count(), 49 - 9);
    }

    #[test]
    fn bowtie_uses_even_odd() {
        let bow = PixelPolygon::from_coords(&[(0., 0.), (4., 4.), (4., 0.), (0., 4.)]);
        let m = rasterize_polygon(&bow, size(5, 5));
        let expect =
            BinaryMask::from_ascii(&["#...#", "##.##", "#####", "##.##", "#...#"]).unwrap();
        assert_eq!(m, expect);
    }
}
