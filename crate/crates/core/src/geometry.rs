//! Core geometric types and exact primitives shared across the toolkit.
//!
//! Coordinates are continuous pixel coordinates with the y axis pointing down.
//! Pixel `(px, py)` has its center at the integer point `(px, py)`.
//! Orientation convention: a ring is clockwise iff its shoelace signed area
//! is positive in these y-down coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn translate(self, dx: f64, dy: f64) -> Self {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// An implicitly closed ring of vertices. Rings with fewer than three
/// vertices, or with zero signed area, are degenerate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelPolygon {
    pub vertices: Vec<Point>,
}

impl PixelPolygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        PixelPolygon { vertices }
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Self {
        PixelPolygon::new(coords.iter().copied().map(Point::from).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates the closing edges `(v[i], v[i+1 mod n])`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Same ring traversed in the opposite direction, keeping the first vertex.
    pub fn reversed_keep_start(&self) -> PixelPolygon {
        let mut v = Vec::with_capacity(self.vertices.len());
        if let Some(&first) = self.vertices.first() {
            v.push(first);
            v.extend(self.vertices[1..].iter().rev().copied());
        }
        PixelPolygon::new(v)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> PixelPolygon {
        PixelPolygon::new(self.vertices.iter().map(|p| p.translate(dx, dy)).collect())
    }

    /// Closed-ring perimeter (sum of edge lengths including the closing edge).
    pub fn perimeter(&self) -> f64 {
        self.edges()
            .map(|(a, b)| (b.x - a.x).hypot(b.y - a.y))
            .sum()
    }

    /// True when the ring has fewer than three vertices or zero area.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3 || signed_area(self).map(|a| a == 0.0).unwrap_or(true)
    }
}

/// Axis-aligned box; for boxes derived from masks the corners are pixel
/// centers and the extent is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(x1 <= x2 && y1 <= y2) {
            return Err(Error::Domain(format!(
                "inverted box ({x1}, {y1}, {x2}, {y2})"
            )));
        }
        Ok(BBox { x1, y1, x2, y2 })
    }

    /// Inclusive pixel area: `(x2 - x1 + 1) * (y2 - y1 + 1)`.
    pub fn pixel_area(&self) -> f64 {
        (self.x2 - self.x1 + 1.0) * (self.y2 - self.y1 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl ImageSize {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSize { width, height });
        }
        Ok(ImageSize { width, height })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Row-major W x H bit grid.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMask {
    size: ImageSize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.size.width, self.size.height)?;
        for row in self.bits.chunks(self.size.width as usize) {
            let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl BinaryMask {
    pub fn empty(size: ImageSize) -> Self {
        BinaryMask {
            size,
            bits: vec![false; size.pixel_count()],
        }
    }

    pub fn from_bits(size: ImageSize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != size.pixel_count() {
            return Err(Error::Domain(format!(
                "bit count {} does not match {}x{}",
                bits.len(),
                size.width,
                size.height
            )));
        }
        Ok(BinaryMask { size, bits })
    }

    pub fn from_fn(size: ImageSize, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(size.pixel_count());
        for y in 0..size.height {
            for x in 0..size.width {
                bits.push(f(x, y));
            }
        }
        BinaryMask { size, bits }
    }

    /// Builds a mask from rows of `#`/`.` characters; handy for fixtures.
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        let size = ImageSize::new(width, height)?;
        let mut bits = Vec::with_capacity(size.pixel_count());
        for row in rows {
            if row.len() as u32 != width {
                return Err(Error::Domain("ragged ascii mask".into()));
            }
            bits.extend(row.bytes().map(|b| b == b'#' || b == b'1'));
        }
        BinaryMask::from_bits(size, bits)
    }

    pub fn size(&self) -> ImageSize {
        self.size
    }

    pub fn width(&self) -> u32 {
        self.size.width
    }

    pub fn height(&self) -> u32 {
        self.size.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.size.width as usize + x as usize]
    }

    /// Bounds-checked lookup with signed coordinates; outside is background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as u64) < self.size.width as u64
            && (y as u64) < self.size.height as u64
            && self.get(x as u32, y as u32)
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.size.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.size.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    /// In-place XOR with another mask of the same size.
    pub fn xor_assign(&mut self, other: &BinaryMask) {
        debug_assert_eq!(self.size, other.size);
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    pub fn or_assign(&mut self, other: &BinaryMask) {
        debug_assert_eq!(self.size, other.size);
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }
}

fn require_ring(poly: &PixelPolygon) -> Result<()> {
    if poly.vertices.len() < 3 {
        return Err(Error::DegeneratePolygon(poly.vertices.len()));
    }
    Ok(())
}

/// Shoelace signed area; positive means clockwise in y-down coordinates.
pub fn signed_area(poly: &PixelPolygon) -> Result<f64> {
    require_ring(poly)?;
    // Accumulate relative to the first vertex to keep translated rings exact.
    let o = poly.vertices[0];
    let twice: f64 = poly
        .edges()
        .map(|(a, b)| (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y))
        .sum();
    Ok(0.5 * twice)
}

pub fn is_clockwise(poly: &PixelPolygon) -> Result<bool> {
    Ok(signed_area(poly)? > 0.0)
}

/// Area-weighted centroid. Fails for zero-area rings; see
/// [`polygon_centroid_or_mean`] for the total variant.
pub fn polygon_centroid(poly: &PixelPolygon) -> Result<Point> {
    let area = signed_area(poly)?;
    if area == 0.0 {
        return Err(Error::ZeroArea);
    }
    let o = poly.vertices[0];
    let (mut cx, mut cy) = (0.0, 0.0);
    for (a, b) in poly.edges() {
        let (ax, ay) = (a.x - o.x, a.y - o.y);
        let (bx, by) = (b.x - o.x, b.y - o.y);
        let cross = ax * by - bx * ay;
        cx += (ax + bx) * cross;
        cy += (ay + by) * cross;
    }
    let k = 1.0 / (6.0 * area);
    Ok(Point::new(o.x + cx * k, o.y + cy * k))
}

/// Area centroid, falling back to the vertex mean for degenerate rings.
pub fn polygon_centroid_or_mean(poly: &PixelPolygon) -> Option<Point> {
    if let Ok(c) = polygon_centroid(poly) {
        return Some(c);
    }
    let n = poly.vertices.len();
    if n == 0 {
        return None;
    }
    let (sx, sy) = poly
        .vertices
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Some(Point::new(sx / n as f64, sy / n as f64))
}

/// Tightest inclusive pixel box over the foreground.
pub fn mask_bbox(mask: &BinaryMask) -> Result<BBox> {
    let mut it = mask.foreground();
    let (x0, y0) = it.next().ok_or(Error::EmptyTarget)?;
    // Row-major order: the first foreground pixel has the smallest y and
    // the last one the largest.
    let (mut x1, y1, mut x2, mut y2) = (x0, y0, x0, y0);
    for (x, y) in it {
        x1 = x1.min(x);
        x2 = x2.max(x);
        y2 = y;
    }
    Ok(BBox {
        x1: x1 as f64,
        y1: y1 as f64,
        x2: x2 as f64,
        y2: y2 as f64,
    })
}

/// Unsnapped mean of foreground pixel centers.
pub fn mask_mean(mask: &BinaryMask) -> Result<Point> {
    let (mut sx, mut sy, mut n) = (0u64, 0u64, 0u64);
    for (x, y) in mask.foreground() {
        sx += x as u64;
        sy += y as u64;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyTarget);
    }
    Ok(Point::new(sx as f64 / n as f64, sy as f64 / n as f64))
}

/// Mean of foreground pixel centers, snapped onto the nearest foreground pixel
/// center when the mean falls on background (ties: smaller y, then smaller x).
pub fn mask_centroid(mask: &BinaryMask) -> Result<Point> {
    let mean = mask_mean(mask)?;
    let px = (mean.x + 0.5).floor() as i64;
    let py = (mean.y + 0.5).floor() as i64;
    if mask.get_signed(px, py) {
        return Ok(mean);
    }
    let mut best: Option<(f64, u32, u32)> = None;
    for (x, y) in mask.foreground() {
        let d = (x as f64 - mean.x).powi(2) + (y as f64 - mean.y).powi(2);
        // Row-major iteration already orders ties by (y, x); keep the first.
        if best.is_none_or(|(bd, _, _)| d < bd) {
            best = Some((d, x, y));
        }
    }
    let (_, x, y) = best.ok_or(Error::EmptyTarget)?;
    Ok(Point::new(x as f64, y as f64))
}

/// IoU of two boxes with inclusive pixel extents.
pub fn box_iou(a: &BBox, b: &BBox) -> f64 {
    let iw = a.x2.min(b.x2) - a.x1.max(b.x1) + 1.0;
    let ih = a.y2.min(b.y2) - a.y1.max(b.y1) + 1.0;
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.pixel_area() + b.pixel_area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}
