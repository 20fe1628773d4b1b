//! Outer-border following on 8-connected foreground (Suzuki–Abe).
//!
//! Only extreme outer borders are produced: components sitting inside a hole
//! of another component are subsumed by that component's filled ring, and
//! hole borders are never traced.

use std::collections::VecDeque;

use crate::geometry::{signed_area, BinaryMask, PixelPolygon, Point};

use super::ContourSet;

/// Neighbour offsets indexed so that `d + 1` is one step clockwise on screen
/// (y axis down): E, SE, S, SW, W, NW, N, NE.
const DIRS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const WEST: usize = 4;

fn dir_between(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    DIRS.iter()
        .position(|&o| o == d)
        .expect("border following only steps between 8-neighbours")
}

/// Traces the outer border of every external 8-connected component.
///
/// Rings hold border-pixel centers, are clockwise (zero-area rings such as
/// single pixels or one-pixel-wide lines keep their traced order), start at
/// the component's top-most then left-most pixel, and are sorted by
/// descending absolute area with discovery order breaking ties.
pub fn trace_contours(mask: &BinaryMask) -> ContourSet {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let bits = mask.bits();

    let exterior = exterior_background(mask);
    let mut labelled = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut rings = Vec::new();

    for start in 0..w * h {
        if !bits[start] || labelled[start] {
            continue;
        }
        // Flood the component so later raster hits on it are skipped.
        labelled[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for (dx, dy) in DIRS {
                let (nx, ny) = (x + dx, y + dy);
                if mask.get_signed(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if !labelled[j] {
                        labelled[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }

        let (sx, sy) = (start % w, start / w);
        // The raster-first pixel always has background (or the frame) on its
        // left; the component is external iff that background reaches the frame.
        let external = sx == 0 || exterior[start - 1];
        if !external {
            continue;
        }
        rings.push(follow_border(mask, (sx as i64, sy as i64)));
    }

    let mut keyed: Vec<(f64, usize, PixelPolygon)> = rings
        .into_iter()
        .enumerate()
        .map(|(i, r)| (signed_area(&r).map(f64::abs).unwrap_or(0.0), i, r))
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ContourSet::from_rings_unchecked(keyed.into_iter().map(|(_, _, r)| r).collect())
}

/// Background pixels 4-connected to the image frame.
fn exterior_background(mask: &BinaryMask) -> Vec<bool> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let bits = mask.bits();
    let mut ext = vec![false; w * h];
    let mut queue = VecDeque::new();
    let seed = |i: usize, ext: &mut Vec<bool>, q: &mut VecDeque<usize>| {
        if !bits[i] && !ext[i] {
            ext[i] = true;
            q.push_back(i);
        }
    };
    for x in 0..w {
        seed(x, &mut ext, &mut queue);
        seed((h - 1) * w + x, &mut ext, &mut queue);
    }
    for y in 0..h {
        seed(y * w, &mut ext, &mut queue);
        seed(y * w + w - 1, &mut ext, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if !bits[j] && !ext[j] {
                ext[j] = true;
                queue.push_back(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }
    ext
}

fn follow_border(mask: &BinaryMask, start: (i64, i64)) -> PixelPolygon {
    let fg = |p: (i64, i64)| mask.get_signed(p.0, p.1);
    let step = |p: (i64, i64), d: usize| (p.0 + DIRS[d].0, p.1 + DIRS[d].1);
    let to_point = |p: (i64, i64)| Point::new(p.0 as f64, p.1 as f64);

    // Clockwise search from the western (background) neighbour.
    let first = (0..8)
        .map(|k| (WEST + k) % 8)
        .map(|d| step(start, d))
        .find(|&p| fg(p));
    let Some(first) = first else {
        return PixelPolygon::new(vec![to_point(start)]);
    };

    let mut vertices = Vec::new();
    let mut prev = first;
    let mut cur = start;
    loop {
        vertices.push(to_point(cur));
        let back = dir_between(cur, prev);
        // Counter-clockwise search starting just after the previous pixel.
        let next = (1..=8)
            .map(|k| step(cur, (back + 8 - k) % 8))
            .find(|&p| fg(p))
            .expect("the previous pixel is foreground");
        if next == start && cur == first {
            break;
        }
        prev = cur;
        cur = next;
    }

    let ring = PixelPolygon::new(vertices);
    match signed_area(&ring) {
        Ok(a) if a < 0.0 => ring.reversed_keep_start(),
        _ => ring,
    }
}
