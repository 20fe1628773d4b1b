//! Independent oracles and fixture generators shared by the integration and
//! acceptance tests. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajseg::{BinaryMask, ImageSize, PixelPolygon, Point};

/// Fixed-point scale for oracle polygons: coordinates are multiples of 1/16,
/// so every oracle predicate is exact in integer arithmetic.
pub const GRID: i64 = 16;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random ring with 3..=16 vertices on the 1/16 grid spanning slightly past a
/// `w` x `h` image. About a third of the vertices land on pixel centers so
/// edges regularly pass exactly through centers and run along scanlines.
pub fn random_grid_ring(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Vec<(i64, i64)> {
    let n = rng.random_range(3..=16usize);
    let margin = 8 * GRID;
    (0..n)
        .map(|_| {
            if rng.random_bool(0.35) {
                let x = rng.random_range(-2..=(w as i64 + 1));
                let y = rng.random_range(-2..=(h as i64 + 1));
                (x * GRID, y * GRID)
            } else {
                (
                    rng.random_range(-margin..=(w as i64 * GRID + margin)),
                    rng.random_range(-margin..=(h as i64 * GRID + margin)),
                )
            }
        })
        .collect()
}

pub fn grid_ring_to_polygon(ring: &[(i64, i64)]) -> PixelPolygon {
    PixelPolygon::new(
        ring.iter()
            .map(|&(x, y)| Point::new(x as f64 / GRID as f64, y as f64 / GRID as f64))
            .collect(),
    )
}

fn on_segment(p: (i64, i64), a: (i64, i64), b: (i64, i64)) -> bool {
    let cross =
        (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
    cross == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Classic crossing-number test, exact in integers.
fn strictly_inside_parity(p: (i64, i64), ring: &[(i64, i64)]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.1 > p.1) != (b.1 > p.1) {
            // p.x < x-intercept  <=>  (p.x - a.x)(b.y - a.y) < (p.y - a.y)(b.x - a.x) for b.y > a.y
            let lhs = (p.0 - a.0) as i128 * (b.1 - a.1) as i128;
            let rhs = (p.1 - a.1) as i128 * (b.0 - a.0) as i128;
            let left = if b.1 > a.1 { lhs < rhs } else { lhs > rhs };
            if left {
                inside = !inside;
            }
        }
    }
    inside
}

/// Per-pixel even-odd membership over rings, boundary-inclusive.
pub fn brute_force_raster(rings: &[Vec<(i64, i64)>], w: u32, h: u32) -> Vec<bool> {
    let mut out = vec![false; (w * h) as usize];
    for py in 0..h {
        for px in 0..w {
            let p = (px as i64 * GRID, py as i64 * GRID);
            let mut count = 0;
            for ring in rings {
                let n = ring.len();
                let boundary = (0..n).any(|i| on_segment(p, ring[i], ring[(i + 1) % n]));
                if boundary || strictly_inside_parity(p, ring) {
                    count += 1;
                }
            }
            out[(py * w + px) as usize] = count % 2 == 1;
        }
    }
    out
}

/// Random mask of a few overlapping discs and random-walk strokes.
pub fn random_blob_mask(rng: &mut ChaCha8Rng, w: u32, h: u32) -> BinaryMask {
    let size = ImageSize::new(w, h).unwrap();
    let mut bits = vec![false; (w * h) as usize];
    let blobs = rng.random_range(1..=4);
    for _ in 0..blobs {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = rng.random_range(1.0..(w.min(h) as f64 / 3.0).max(1.5));
        for y in 0..h {
            for x in 0..w {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                if dx * dx + dy * dy <= r * r {
                    bits[(y * w + x) as usize] = true;
                }
            }
        }
    }
    let strokes = rng.random_range(0..=3);
    for _ in 0..strokes {
        let (mut x, mut y) = (rng.random_range(0..w) as i64, rng.random_range(0..h) as i64);
        for _ in 0..rng.random_range(5..40) {
            bits[(y as u32 * w + x as u32) as usize] = true;
            x = (x + rng.random_range(-1..=1)).clamp(0, w as i64 - 1);
            y = (y + rng.random_range(-1..=1)).clamp(0, h as i64 - 1);
        }
    }
    // Salt: isolated specks and pits exercise degenerate borders.
    for _ in 0..rng.random_range(0..6) {
        let i = rng.random_range(0..(w * h) as usize);
        bits[i] = !bits[i];
    }
    BinaryMask::from_bits(size, bits).unwrap()
}

/// Fills background regions not 4-connected to the frame.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut outside = vec![false; (w * h) as usize];
    let mut q = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !mask.get(x as u32, y as u32) {
                outside[(y * w + x) as usize] = true;
                q.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = q.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                let i = (ny * w + nx) as usize;
                if !outside[i] && !mask.get(nx as u32, ny as u32) {
                    outside[i] = true;
                    q.push_back((nx, ny));
                }
            }
        }
    }
    BinaryMask::from_fn(mask.size(), |x, y| {
        !outside[(y as i64 * w + x as i64) as usize]
    })
}

/// 8-connected components as pixel lists, in raster discovery order.
pub fn components8(mask: &BinaryMask) -> Vec<Vec<(u32, u32)>> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut seen = vec![false; (w * h) as usize];
    let mut comps = Vec::new();
    for y0 in 0..h {
        for x0 in 0..w {
            let i0 = (y0 * w + x0) as usize;
            if seen[i0] || !mask.get(x0 as u32, y0 as u32) {
                continue;
            }
            let mut comp = Vec::new();
            let mut q = VecDeque::from([(x0, y0)]);
            seen[i0] = true;
            while let Some((x, y)) = q.pop_front() {
                comp.push((x as u32, y as u32));
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx >= 0 && ny >= 0 && nx < w && ny < h {
                            let i = (ny * w + nx) as usize;
                            if !seen[i] && mask.get(nx as u32, ny as u32) {
                                seen[i] = true;
                                q.push_back((nx, ny));
                            }
                        }
                    }
                }
            }
            comps.push(comp);
        }
    }
    comps
}

/// Hole-free single 8-connected component: blobs, holes filled, largest kept.
pub fn random_hole_free_mask(rng: &mut ChaCha8Rng, w: u32, h: u32) -> BinaryMask {
    loop {
        let filled = fill_holes(&random_blob_mask(rng, w, h));
        let comps = components8(&filled);
        let Some(largest) = comps.iter().max_by_key(|c| c.len()) else {
            continue;
        };
        let mut m = BinaryMask::empty(filled.size());
        for &(x, y) in largest {
            m.set(x, y, true);
        }
        return m;
    }
}

/// Random convex polygon mask: rasterized by the oracle from a convex hull of
/// random points, so it does not depend on the rasterizer under test.
pub fn random_convex_mask(rng: &mut ChaCha8Rng, w: u32, h: u32) -> BinaryMask {
    loop {
        let n = rng.random_range(3..=10);
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| {
                (
                    rng.random_range(GRID..(w as i64 - 1) * GRID),
                    rng.random_range(GRID..(h as i64 - 1) * GRID),
                )
            })
            .collect();
        let hull = convex_hull(pts);
        if hull.len() < 3 {
            continue;
        }
        let bits = brute_force_raster(&[hull], w, h);
        let m = BinaryMask::from_bits(ImageSize::new(w, h).unwrap(), bits).unwrap();
        if m.count() >= 4 {
            return m;
        }
    }
}

/// Monotone-chain convex hull.
pub fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Random mask of independent pixels with the given fill probability.
pub fn random_noise_mask(rng: &mut ChaCha8Rng, w: u32, h: u32, p: f64) -> BinaryMask {
    BinaryMask::from_fn(ImageSize::new(w, h).unwrap(), |_, _| rng.random_bool(p))
}

/// (intersection, union) by direct pixel counting.
pub fn count_iou(a: &BinaryMask, b: &BinaryMask) -> (u64, u64) {
    let mut inter = 0;
    let mut union = 0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            let (pa, pb) = (a.get(x, y), b.get(x, y));
            inter += (pa && pb) as u64;
            union += (pa || pb) as u64;
        }
    }
    (inter, union)
}

/// Inclusive min/max box by scanning pixels.
pub fn scan_box(m: &BinaryMask) -> Option<(u32, u32, u32, u32)> {
    let mut b: Option<(u32, u32, u32, u32)> = None;
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) {
                b = Some(match b {
                    None => (x, y, x, y),
                    Some((x1, y1, x2, y2)) => (x1.min(x), y1.min(y), x2.max(x), y2.max(y)),
                });
            }
        }
    }
    b
}

pub fn box_iou_counts(a: (u32, u32, u32, u32), b: (u32, u32, u32, u32)) -> f64 {
    // count pixels in both boxes directly
    let mut inter = 0u64;
    let mut union = 0u64;
    let x_hi = a.2.max(b.2);
    let y_hi = a.3.max(b.3);
    for y in a.1.min(b.1)..=y_hi {
        for x in a.0.min(b.0)..=x_hi {
            let ia = x >= a.0 && x <= a.2 && y >= a.1 && y <= a.3;
            let ib = x >= b.0 && x <= b.2 && y >= b.1 && y <= b.3;
            inter += (ia && ib) as u64;
            union += (ia || ib) as u64;
        }
    }
    inter as f64 / union as f64
}

/// Column-major runs by direct scan, background first.
pub fn naive_rle(m: &BinaryMask) -> Vec<u32> {
    let (w, h) = (m.width(), m.height());
    let mut runs = vec![0u32];
    let mut cur = false;
    for idx in 0..w * h {
        let v = m.get(idx / h, idx % h);
        if v != cur {
            runs.push(0);
            cur = v;
        }
        *runs.last_mut().unwrap() += 1;
    }
    runs
}

/// Two-pass population-std normalization.
pub fn advantages_oracle(r: &[f64]) -> Vec<f64> {
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let std = (r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    if std < 1e-8 {
        return vec![0.0; r.len()];
    }
    r.iter().map(|x| (x - mean) / std).collect()
}

/// Malformed model outputs with the error kind and byte offset each must
/// produce. `mask` marks cases parsed with a mask expectation.
pub const MALFORMED_CORPUS: [(&str, bool, &str, usize); 20] = [
    ("", false, "malformed", 0),
    ("[[0.1, 0.2], [0.3]]", false, "odd_tuple", 13),
    ("[[0.1, 0.2], [0.3", false, "malformed", 17),
    ("[0.5, 1.5]", false, "out_of_range", 6),
    ("[0.5, 0.5] x", false, "trailing_garbage", 11),
    ("[[0.1, 0.2], [0.3, 0.4]]", false, "too_few_vertices", 0),
    ("[0.1, -0.2]", false, "malformed", 6),
    ("[1e-1, 0.2]", false, "malformed", 2),
    ("[0.1, 0.2, 0.3]", false, "malformed", 0),
    ("[]", false, "malformed", 0),
    ("[0.4, 0.2, 0.3, 0.5]", false, "malformed", 0),
    ("[0.1, [0.2, 0.3]]", false, "malformed", 6),
    ("[0.200, 0.200, 0.600, 0.600]", true, "wrong_shape", 0),
    ("[0.1, 0.2,]", false, "malformed", 10),
    ("[0., 0.2]", false, "malformed", 3),
    (
        "[[0.1, 0.2, 0.3], [0.4, 0.5], [0.6, 0.7]]",
        false,
        "odd_tuple",
        1,
    ),
    (
        "[[0.1, 0.2], [0.3, 0.4], [0.5, 2]]",
        false,
        "out_of_range",
        31,
    ),
    (
        "[[[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]], [[0.1, 0.2]]]",
        false,
        "too_few_vertices",
        39,
    ),
    ("[0.1 0.2]", false, "malformed", 5),
    (
        "[[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]]]",
        false,
        "trailing_garbage",
        36,
    ),
];
