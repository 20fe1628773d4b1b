//! Closed-ring Douglas–Peucker sparsification.

use crate::geometry::{signed_area, PixelPolygon, Point};

use super::SimplifyTolerance;

/// Distance from `p` to the closed segment `a`-`b`.
fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (p.x - a.x).hypot(p.y - a.y);
    }
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    if t <= 0.0 {
        (p.x - a.x).hypot(p.y - a.y)
    } else if t >= 1.0 {
        (p.x - b.x).hypot(p.y - b.y)
    } else {
        ((p.x - a.x) * dy - (p.y - a.y) * dx).abs() / len2.sqrt()
    }
}

/// Indices `(i, j)`, `i < j`, of the two most mutually distant vertices;
/// lowest index pair on ties.
fn diameter(v: &[Point]) -> (usize, usize) {
    let mut best = (0, 1, f64::NEG_INFINITY);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = (v[i].x - v[j].x).powi(2) + (v[i].y - v[j].y).powi(2);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Marks the vertices kept on the open chain `first..=last` (indices taken
/// modulo the ring length). Points are kept when strictly farther than `tol`
/// from the current chord.
fn simplify_chain(v: &[Point], first: usize, last: usize, tol: f64, keep: &mut [bool]) {
    let n = v.len();
    let mut stack = vec![(first, last)];
    while let Some((i, j)) = stack.pop() {
        if j <= i + 1 {
            continue;
        }
        let (a, b) = (v[i % n], v[j % n]);
        let mut far = (0, f64::NEG_INFINITY);
        for k in i + 1..j {
            let d = segment_distance(v[k % n], a, b);
            if d > far.1 {
                far = (k, d);
            }
        }
        if far.1 > tol {
            keep[far.0 % n] = true;
            stack.push((far.0, j));
            stack.push((i, far.0));
        }
    }
}

/// Sparsifies a closed ring with tolerance `epsilon_rel * perimeter`.
///
/// The ring is split at its two most distant vertices, each open chain is
/// simplified, and the halves are rejoined. The output is an ordered subset of
/// the input with the same orientation and at least three vertices. It starts
/// at the input's first vertex when that survives, otherwise at the top-most,
/// then left-most kept vertex. Degenerate rings are returned unchanged.
pub fn simplify(poly: &PixelPolygon, tol: SimplifyTolerance) -> PixelPolygon {
    let area = match signed_area(poly) {
        Ok(a) if a != 0.0 => a,
        _ => return poly.clone(),
    };
    let v = &poly.vertices;
    let n = v.len();
    let abs_tol = tol.epsilon_rel() * poly.perimeter();

    let (a, b) = diameter(v);
    let mut keep = vec![false; n];
    keep[a] = true;
    keep[b] = true;
    simplify_chain(v, a, b, abs_tol, &mut keep);
    simplify_chain(v, b, a + n, abs_tol, &mut keep);

    let line_distance = |p: Point| {
        let (pa, pb) = (v[a], v[b]);
        ((p.x - pa.x) * (pb.y - pa.y) - (p.y - pa.y) * (pb.x - pa.x)).abs()
    };
    let collect = |keep: &[bool]| -> Vec<usize> { (0..n).filter(|&i| keep[i]).collect() };
    let mut kept = collect(&keep);
    let kept_area = |idx: &[usize]| {
        if idx.len() < 3 {
            return 0.0;
        }
        signed_area(&PixelPolygon::new(idx.iter().map(|&i| v[i]).collect())).unwrap_or(0.0)
    };
    if kept.len() < 3 || kept_area(&kept) == 0.0 {
        // Top up with the vertex farthest from the diameter line.
        let extra = (0..n)
            .filter(|&i| !keep[i])
            .fold(None::<(usize, f64)>, |best, i| {
                let d = line_distance(v[i]);
                match best {
                    Some((_, bd)) if bd >= d => best,
                    _ => Some((i, d)),
                }
            });
        if let Some((i, _)) = extra {
            keep[i] = true;
            kept = collect(&keep);
        }
    }

    let start = if keep[0] {
        0
    } else {
        kept.iter()
            .copied()
            .min_by(|&i, &j| v[i].y.total_cmp(&v[j].y).then(v[i].x.total_cmp(&v[j].x)))
            .unwrap_or(0)
    };
    let pos = kept.iter().position(|&i| i == start).unwrap_or(0);
    kept.rotate_left(pos);
    let out = PixelPolygon::new(kept.iter().map(|&i| v[i]).collect());

    match signed_area(&out) {
        Ok(s) if s != 0.0 && (s > 0.0) != (area > 0.0) => out.reversed_keep_start(),
        _ => out,
    }
}
