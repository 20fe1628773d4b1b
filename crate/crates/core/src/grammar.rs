//! Normalized coordinate text grammar.
//!
//! ```text
//! point    = "[" num "," num "]"
//! bbox     = "[" num "," num "," num "," num "]"
//! polygon  = "[" pair ("," pair){2,} "]"        pair = "[" num "," num "]"
//! multi    = "[" polygon ("," polygon)* "]"
//! num      = digits ("." digits)? | "." digits  (value in [0, 1])
//! ```
//!
//! Whitespace is allowed between any two tokens. Serialization is canonical:
//! fixed decimals, `, ` separators, no other whitespace. Parsed coordinates
//! keep their literal spelling so re-serialization of parsed text only
//! canonicalizes whitespace.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codec::ContourSet;
use crate::error::{Error, Result};
use crate::geometry::{BBox, ImageSize, PixelPolygon, Point};

pub const DEFAULT_DECIMALS: u8 = 3;
pub const MAX_DECIMALS: u8 = 6;

// Literals longer than this cannot be held exactly in a u64 mantissa.
const MAX_DIGITS: usize = 18;
const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Malformed,
    OddTuple,
    OutOfRange,
    TooFewVertices,
    TrailingGarbage,
    WrongShape,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Malformed => "malformed",
            ParseErrorKind::OddTuple => "odd_tuple",
            ParseErrorKind::OutOfRange => "out_of_range",
            ParseErrorKind::TooFewVertices => "too_few_vertices",
            ParseErrorKind::TrailingGarbage => "trailing_garbage",
            ParseErrorKind::WrongShape => "wrong_shape",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{kind} at byte {byte_offset}: {detail}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub byte_offset: usize,
    pub detail: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, byte_offset: usize, detail: impl Into<String>) -> Self {
        ParseError {
            kind,
            byte_offset,
            detail: detail.into(),
        }
    }

    fn malformed(at: usize, detail: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Malformed, at, detail)
    }
}

/// A coordinate in `[0, 1]` held as an exact decimal `units / 10^scale`.
///
/// `int_width` records how many integer digits were written (0 for `.5`),
/// so a parsed literal is reproduced byte-for-byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormCoord {
    units: u64,
    scale: u8,
    int_width: u8,
}

impl NormCoord {
    pub const ZERO: NormCoord = NormCoord {
        units: 0,
        scale: 0,
        int_width: 1,
    };

    /// `units / 10^decimals`, rejecting values above 1.
    pub fn from_units(units: u64, decimals: u8) -> Result<Self> {
        check_decimals(decimals)?;
        if units > pow10(decimals) {
            return Err(Error::Domain(format!(
                "{units}e-{decimals} is outside [0, 1]"
            )));
        }
        Ok(NormCoord {
            units,
            scale: decimals,
            int_width: 1,
        })
    }

    /// Rounds `v` half away from zero to `decimals` places, clamped to [0, 1].
    pub fn quantize(v: f64, decimals: u8) -> Result<Self> {
        check_decimals(decimals)?;
        let full = pow10(decimals);
        let units = if v.is_nan() {
            0
        } else {
            (v * full as f64).round().clamp(0.0, full as f64) as u64
        };
        Ok(NormCoord {
            units,
            scale: decimals,
            int_width: 1,
        })
    }

    pub fn units(&self) -> u64 {
        self.units
    }

    pub fn scale(&self) -> u8 {
        self.scale
    }

    pub fn value(&self) -> f64 {
        self.units as f64 / pow10(self.scale) as f64
    }

    /// `value · dim` in pixels, correctly rounded from the exact product.
    pub fn denormalize(&self, dim: u32) -> f64 {
        let num = self.units as u128 * dim as u128;
        let den = pow10(self.scale) as u128;
        if num.is_multiple_of(den) {
            (num / den) as f64
        } else {
            num as f64 / den as f64
        }
    }
}

impl fmt::Display for NormCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = pow10(self.scale);
        let int = self.units / den;
        let frac = self.units % den;
        if self.int_width > 0 {
            write!(f, "{:0w$}", int, w = self.int_width as usize)?;
        }
        if self.scale > 0 {
            write!(f, ".{:0s$}", frac, s = self.scale as usize)?;
        }
        Ok(())
    }
}

fn pow10(d: u8) -> u64 {
    10u64.pow(d as u32)
}

fn check_decimals(decimals: u8) -> Result<()> {
    if decimals == 0 || decimals > MAX_DECIMALS {
        return Err(Error::Config(format!(
            "decimals must be in 1..={MAX_DECIMALS}, got {decimals}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormPoint {
    pub x: NormCoord,
    pub y: NormCoord,
}

impl NormPoint {
    pub fn denormalize(&self, size: ImageSize) -> Point {
        Point::new(
            self.x.denormalize(size.width),
            self.y.denormalize(size.height),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormBox {
    pub x1: NormCoord,
    pub y1: NormCoord,
    pub x2: NormCoord,
    pub y2: NormCoord,
}

/// Shape a caller expects from model text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Point,
    BBox,
    /// A single polygon or a list of polygons.
    Mask,
}

impl ShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Point => "point",
            ShapeKind::BBox => "bbox",
            ShapeKind::Mask => "mask",
        }
    }
}

/// A parsed target in normalized coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetText {
    Point(NormPoint),
    BBox(NormBox),
    Polygon(Vec<NormPoint>),
    MultiPolygon(Vec<Vec<NormPoint>>),
}

impl TargetText {
    pub fn shape_kind(&self) -> ShapeKind {
        match self {
            TargetText::Point(_) => ShapeKind::Point,
            TargetText::BBox(_) => ShapeKind::BBox,
            TargetText::Polygon(_) | TargetText::MultiPolygon(_) => ShapeKind::Mask,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            TargetText::Point(_) => 1,
            TargetText::BBox(_) => 2,
            TargetText::Polygon(p) => p.len(),
            TargetText::MultiPolygon(rings) => rings.iter().map(Vec::len).sum(),
        }
    }

    /// Canonical text; coordinates keep the spelling they were parsed with.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            TargetText::Point(p) => write_pair(&mut out, p),
            TargetText::BBox(b) => write_flat(&mut out, &[b.x1, b.y1, b.x2, b.y2]),
            TargetText::Polygon(ring) => write_ring(&mut out, ring),
            TargetText::MultiPolygon(rings) => {
                out.push('[');
                for (i, ring) in rings.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_ring(&mut out, ring);
                }
                out.push(']');
            }
        }
        out
    }

    pub fn denormalize(&self, size: ImageSize) -> Denormalized {
        let ring =
            |r: &[NormPoint]| PixelPolygon::new(r.iter().map(|p| p.denormalize(size)).collect());
        match self {
            TargetText::Point(p) => Denormalized::Point(p.denormalize(size)),
            TargetText::BBox(b) => Denormalized::BBox(BBox {
                x1: b.x1.denormalize(size.width),
                y1: b.y1.denormalize(size.height),
                x2: b.x2.denormalize(size.width),
                y2: b.y2.denormalize(size.height),
            }),
            TargetText::Polygon(r) => Denormalized::Polygon(ring(r)),
            TargetText::MultiPolygon(rs) => {
                Denormalized::Contours(ContourSet::from_rings(rs.iter().map(|r| ring(r)).collect()))
            }
        }
    }
}

impl fmt::Display for TargetText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Pixel-space counterpart of a [`TargetText`].
#[derive(Debug, Clone, PartialEq)]
pub enum Denormalized {
    Point(Point),
    BBox(BBox),
    Polygon(PixelPolygon),
    Contours(ContourSet),
}

impl Denormalized {
    /// Rings to rasterize; `None` for points and boxes.
    pub fn into_contours(self) -> Option<ContourSet> {
        match self {
            Denormalized::Polygon(p) => Some(ContourSet::from_rings(vec![p])),
            Denormalized::Contours(c) => Some(c),
            _ => None,
        }
    }
}

pub fn denormalize(t: &TargetText, size: ImageSize) -> Denormalized {
    t.denormalize(size)
}

fn write_flat(out: &mut String, coords: &[NormCoord]) {
    use std::fmt::Write;
    out.push('[');
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{c}").unwrap();
    }
    out.push(']');
}

fn write_pair(out: &mut String, p: &NormPoint) {
    write_flat(out, &[p.x, p.y]);
}

fn write_ring(out: &mut String, ring: &[NormPoint]) {
    out.push('[');
    for (i, p) in ring.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_pair(out, p);
    }
    out.push(']');
}

// ---------------------------------------------------------------------------
// Serialization

/// Geometry accepted by [`serialize`].
#[derive(Debug, Clone, Copy)]
pub enum Geometry<'a> {
    Point(Point),
    BBox(BBox),
    Polygon(&'a PixelPolygon),
    Contours(&'a ContourSet),
}

impl From<Point> for Geometry<'_> {
    fn from(p: Point) -> Self {
        Geometry::Point(p)
    }
}

impl From<BBox> for Geometry<'_> {
    fn from(b: BBox) -> Self {
        Geometry::BBox(b)
    }
}

impl<'a> From<&'a PixelPolygon> for Geometry<'a> {
    fn from(p: &'a PixelPolygon) -> Self {
        Geometry::Polygon(p)
    }
}

impl<'a> From<&'a ContourSet> for Geometry<'a> {
    fn from(c: &'a ContourSet) -> Self {
        Geometry::Contours(c)
    }
}

/// Normalizes one pixel coordinate by `dim`, rounding half away from zero.
pub fn normalize_coord(v: f64, dim: u32, decimals: u8) -> Result<NormCoord> {
    check_decimals(decimals)?;
    let full = pow10(decimals);
    // Integral pixel coordinates take an exact integer path so that ties
    // round the same way on every platform.
    if v.is_finite() && v.fract() == 0.0 && v.abs() < (1u64 << 53) as f64 {
        let n = v as i128 * full as i128;
        let units = if n <= 0 {
            0
        } else {
            let d = dim as i128;
            let (q, r) = (n / d, n % d);
            let q = if 2 * r >= d { q + 1 } else { q };
            q.min(full as i128) as u64
        };
        return NormCoord::from_units(units, decimals);
    }
    NormCoord::quantize(v / dim as f64, decimals)
}

fn normalize_point(p: Point, size: ImageSize, decimals: u8) -> Result<NormPoint> {
    Ok(NormPoint {
        x: normalize_coord(p.x, size.width, decimals)?,
        y: normalize_coord(p.y, size.height, decimals)?,
    })
}

fn normalize_ring(ring: &PixelPolygon, size: ImageSize, decimals: u8) -> Result<Vec<NormPoint>> {
    let v = &ring.vertices;
    if v.is_empty() {
        return Err(Error::EmptyTarget);
    }
    // Degenerate rings (specks, 2-pixel slivers) are padded cyclically so the
    // text stays a valid polygon; the padded ring rasterizes identically.
    let n = v.len().max(3);
    (0..n)
        .map(|i| normalize_point(v[i % v.len()], size, decimals))
        .collect()
}

/// Normalizes geometry into a [`TargetText`] quantized at `decimals` places.
pub fn normalize(geom: Geometry<'_>, size: ImageSize, decimals: u8) -> Result<TargetText> {
    check_decimals(decimals)?;
    Ok(match geom {
        Geometry::Point(p) => TargetText::Point(normalize_point(p, size, decimals)?),
        Geometry::BBox(b) => TargetText::BBox(NormBox {
            x1: normalize_coord(b.x1, size.width, decimals)?,
            y1: normalize_coord(b.y1, size.height, decimals)?,
            x2: normalize_coord(b.x2, size.width, decimals)?,
            y2: normalize_coord(b.y2, size.height, decimals)?,
        }),
        Geometry::Polygon(p) => TargetText::Polygon(normalize_ring(p, size, decimals)?),
        Geometry::Contours(c) => match c.rings() {
            [] => return Err(Error::EmptyTarget),
            [one] => TargetText::Polygon(normalize_ring(one, size, decimals)?),
            rings => TargetText::MultiPolygon(
                rings
                    .iter()
                    .map(|r| normalize_ring(r, size, decimals))
                    .collect::<Result<_>>()?,
            ),
        },
    })
}

/// Canonical grammar text for `geom`.
pub fn serialize<'a>(
    geom: impl Into<Geometry<'a>>,
    size: ImageSize,
    decimals: u8,
) -> Result<String> {
    Ok(normalize(geom.into(), size, decimals)?.to_text())
}

// ---------------------------------------------------------------------------
// Parsing

enum Node {
    Num { start: usize, lit: Literal },
    List { start: usize, items: Vec<Node> },
}

impl Node {
    fn start(&self) -> usize {
        match self {
            Node::Num { start, .. } | Node::List { start, .. } => *start,
        }
    }
}

enum Literal {
    Ok(NormCoord),
    OutOfRange,
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

struct Lexer<'a> {
    b: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.b.len() && is_ws(self.b[self.pos]) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.b.get(self.pos).copied()
    }

    fn unexpected(&self, what: &str) -> ParseError {
        match self.peek() {
            None => ParseError::malformed(
                self.pos,
                format!("unexpected end of input, expected {what}"),
            ),
            Some(c) if c.is_ascii_graphic() => ParseError::malformed(
                self.pos,
                format!("unexpected '{}', expected {what}", c as char),
            ),
            Some(c) => ParseError::malformed(
                self.pos,
                format!("unexpected byte 0x{c:02x}, expected {what}"),
            ),
        }
    }

    fn value(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'[') => self.list(depth),
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            _ => Err(self.unexpected("'[' or a number")),
        }
    }

    fn list(&mut self, depth: usize) -> Result<Node, ParseError> {
        let start = self.pos;
        if depth >= MAX_DEPTH {
            return Err(ParseError::malformed(start, "lists nested too deeply"));
        }
        self.pos += 1;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Node::List { start, items });
        }
        loop {
            items.push(self.value(depth + 1)?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(Node::List { start, items });
                }
                _ => return Err(self.unexpected("',' or ']'")),
            }
        }
    }

    fn digits(&mut self) -> std::ops::Range<usize> {
        let s = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        s..self.pos
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let int = &self.b[self.digits()];
        let frac: &[u8] = if self.peek() == Some(b'.') {
            self.pos += 1;
            let f = self.digits();
            if f.is_empty() {
                return Err(self.unexpected("a digit after '.'"));
            }
            &self.b[f]
        } else {
            &[]
        };
        // Exact range check on the digits themselves.
        let int_value = int.iter().skip_while(|&&c| c == b'0').collect::<Vec<_>>();
        let frac_zero = frac.iter().all(|&c| c == b'0');
        let in_range = match int_value.as_slice() {
            [] => true,
            [b'1'] => frac_zero,
            _ => false,
        };
        if !in_range {
            return Ok(Node::Num {
                start,
                lit: Literal::OutOfRange,
            });
        }
        if int.len() > MAX_DIGITS || frac.len() > MAX_DIGITS {
            return Err(ParseError::malformed(start, "numeric literal too long"));
        }
        let frac_units = frac
            .iter()
            .fold(0u64, |acc, &c| acc * 10 + (c - b'0') as u64);
        let scale = frac.len() as u8;
        let units = if int_value.is_empty() {
            frac_units
        } else {
            pow10(scale)
        };
        Ok(Node::Num {
            start,
            lit: Literal::Ok(NormCoord {
                units,
                scale,
                int_width: int.len() as u8,
            }),
        })
    }
}

/// Structural class of the top-level value, decided from nesting alone.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Level {
    Number,
    Flat,
    Pairs,
    Rings,
}

fn level_of(node: &Node) -> Result<Level, ParseError> {
    let Node::List { items, .. } = node else {
        return Ok(Level::Number);
    };
    let Some(first) = items.first() else {
        return Ok(Level::Flat);
    };
    let first_level = level_of(first)?;
    for item in &items[1..] {
        if level_of(item)? != first_level {
            return Err(ParseError::malformed(item.start(), "mixed nesting depth"));
        }
    }
    Ok(match first_level {
        Level::Number => Level::Flat,
        Level::Flat => Level::Pairs,
        Level::Pairs => Level::Rings,
        Level::Rings => {
            return Err(ParseError::malformed(
                node.start(),
                "lists nested too deeply",
            ))
        }
    })
}

fn coord(node: &Node) -> Result<NormCoord, ParseError> {
    match node {
        Node::Num {
            lit: Literal::Ok(c),
            ..
        } => Ok(*c),
        Node::Num { start, .. } => Err(ParseError::new(
            ParseErrorKind::OutOfRange,
            *start,
            "coordinate outside [0, 1]",
        )),
        Node::List { start, .. } => Err(ParseError::malformed(*start, "expected a number")),
    }
}

fn items(node: &Node) -> &[Node] {
    match node {
        Node::List { items, .. } => items,
        Node::Num { .. } => &[],
    }
}

fn pair(node: &Node) -> Result<NormPoint, ParseError> {
    let xs = items(node);
    if xs.len() != 2 {
        return Err(ParseError::new(
            ParseErrorKind::OddTuple,
            node.start(),
            format!("coordinate pair has {} numbers", xs.len()),
        ));
    }
    Ok(NormPoint {
        x: coord(&xs[0])?,
        y: coord(&xs[1])?,
    })
}

fn ring(node: &Node) -> Result<Vec<NormPoint>, ParseError> {
    let pts = items(node)
        .iter()
        .map(pair)
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() < 3 {
        return Err(ParseError::new(
            ParseErrorKind::TooFewVertices,
            node.start(),
            format!("polygon has {} vertices, need at least 3", pts.len()),
        ));
    }
    Ok(pts)
}

/// Strict parse. With `expected`, a well-nested value of another shape is a
/// `WrongShape` error at the value's first byte.
pub fn parse(text: &str, expected: Option<ShapeKind>) -> Result<TargetText, ParseError> {
    let mut lx = Lexer {
        b: text.as_bytes(),
        pos: 0,
    };
    let root = lx.value(0)?;
    lx.skip_ws();
    if lx.pos < text.len() {
        return Err(ParseError::new(
            ParseErrorKind::TrailingGarbage,
            lx.pos,
            "unexpected input after the closing bracket",
        ));
    }

    let start = root.start();
    let level = level_of(&root)?;
    let n = items(&root).len();
    let inferred = match level {
        Level::Number => return Err(ParseError::malformed(start, "expected '['")),
        Level::Flat if n == 2 => Some(ShapeKind::Point),
        Level::Flat if n == 4 => Some(ShapeKind::BBox),
        Level::Flat => None,
        Level::Pairs | Level::Rings => Some(ShapeKind::Mask),
    };
    if let Some(want) = expected {
        let mismatch = match inferred {
            Some(got) => got != want,
            // A flat list of the wrong length is still flat.
            None => want == ShapeKind::Mask,
        };
        if mismatch {
            let got = match level {
                Level::Flat => inferred.map_or("flat list", ShapeKind::as_str),
                _ => "mask",
            };
            return Err(ParseError::new(
                ParseErrorKind::WrongShape,
                start,
                format!("expected {}, found {got}", want.as_str()),
            ));
        }
    }

    let xs = items(&root);
    match level {
        Level::Flat if n == 2 => Ok(TargetText::Point(pair(&root)?)),
        Level::Flat if n == 4 => {
            let c = xs.iter().map(coord).collect::<Result<Vec<_>, _>>()?;
            if c[0].value() > c[2].value() || c[1].value() > c[3].value() {
                return Err(ParseError::malformed(start, "box corners are inverted"));
            }
            Ok(TargetText::BBox(NormBox {
                x1: c[0],
                y1: c[1],
                x2: c[2],
                y2: c[3],
            }))
        }
        Level::Flat => Err(ParseError::malformed(
            start,
            format!("flat list of {n} numbers is neither a point nor a box"),
        )),
        Level::Pairs => Ok(TargetText::Polygon(ring(&root)?)),
        Level::Rings => Ok(TargetText::MultiPolygon(
            xs.iter().map(ring).collect::<Result<_, _>>()?,
        )),
        Level::Number => unreachable!(),
    }
}

/// Parse expecting a mask (polygon or multipolygon) and return pixel rings.
pub fn parse_mask_rings(text: &str, size: ImageSize) -> Result<ContourSet, ParseError> {
    let t = parse(text, Some(ShapeKind::Mask))?;
    Ok(t.denormalize(size)
        .into_contours()
        .expect("mask shapes denormalize to rings"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(w: u32, h: u32) -> ImageSize {
        ImageSize::new(w, h).unwrap()
    }

    fn kind(text: &str, expected: Option<ShapeKind>) -> (ParseErrorKind, usize) {
        let e = parse(text, expected).unwrap_err();
        (e.kind, e.byte_offset)
    }

    #[test]
    fn serialize_examples() {
        let s = size(5, 5);
        assert_eq!(
            serialize(Point::new(1., 1.), s, 3).unwrap(),
            "[0.200, 0.200]"
        );
        let b = BBox::new(1., 1., 3., 3.).unwrap();
        assert_eq!(serialize(b, s, 3).unwrap(), "[0.200, 0.200, 0.600, 0.600]");
        let sq = PixelPolygon::from_coords(&[(1., 1.), (3., 1.), (3., 3.), (1., 3.)]);
        assert_eq!(
            serialize(&sq, s, 3).unwrap(),
            "[[0.200, 0.200], [0.600, 0.200], [0.600, 0.600], [0.200, 0.600]]"
        );
        assert!(matches!(serialize(&sq, s, 0), Err(Error::Config(_))));
        assert!(matches!(serialize(&sq, s, 7), Err(Error::Config(_))));
    }

    #[test]
    fn rounding_is_half_away_from_zero_and_clamped() {
        // 1/8 = 0.125 -> 0.13 at two decimals
        assert_eq!(normalize_coord(1.0, 8, 2).unwrap().to_string(), "0.13");
        assert_eq!(normalize_coord(0.125, 1, 2).unwrap().to_string(), "0.13");
        assert_eq!(normalize_coord(-3.0, 8, 2).unwrap().to_string(), "0.00");
        assert_eq!(normalize_coord(9.0, 8, 2).unwrap().to_string(), "1.00");
        assert_eq!(normalize_coord(2.0, 3, 3).unwrap().to_string(), "0.667");
    }

    #[test]
    fn contour_sets_nest_only_when_multi() {
        let a = PixelPolygon::from_coords(&[(0., 0.), (2., 0.), (2., 2.)]);
        let b = PixelPolygon::from_coords(&[(5., 5.)]);
        let s = size(10, 10);
        let one = ContourSet::from_rings(vec![a.clone()]);
        assert_eq!(
            serialize(&one, s, 1).unwrap(),
            "[[0.0, 0.0], [0.2, 0.0], [0.2, 0.2]]"
        );
        let two = ContourSet::from_rings(vec![a, b]);
        assert_eq!(
            serialize(&two, s, 1).unwrap(),
            "[[[0.0, 0.0], [0.2, 0.0], [0.2, 0.2]], [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]]"
        );
        assert!(matches!(
            serialize(&ContourSet::default(), s, 3),
            Err(Error::EmptyTarget)
        ));
    }

    #[test]
    fn parse_examples() {
        let t = parse("[[0.2, 0.2], [0.6, 0.2], [0.6, 0.6]]", None).unwrap();
        assert!(matches!(&t, TargetText::Polygon(v) if v.len() == 3));
        assert_eq!(
            kind("[[0.1, 0.2], [0.3]]", None),
            (ParseErrorKind::OddTuple, 13)
        );
        assert_eq!(
            kind("[0.200, 0.200, 0.600, 0.600]", Some(ShapeKind::Mask)),
            (ParseErrorKind::WrongShape, 0)
        );
    }

    #[test]
    fn shape_inference() {
        assert_eq!(
            parse("[0.5, 1]", None).unwrap().shape_kind(),
            ShapeKind::Point
        );
        assert!(matches!(
            parse("[0, 0, 1, 1]", None).unwrap(),
            TargetText::BBox(_)
        ));
        let m = parse("[[[0,0],[1,0],[1,1]], [[0,0],[0,1],[1,1]]]", None).unwrap();
        assert!(matches!(&m, TargetText::MultiPolygon(r) if r.len() == 2));
        assert_eq!(m.vertex_count(), 6);
    }

    #[test]
    fn error_kinds_and_offsets() {
        use ParseErrorKind::*;
        let cases: &[(&str, ParseErrorKind, usize)] = &[
            ("", Malformed, 0),
            ("   ", Malformed, 3),
            ("[[0.1, 0.2], [0.3", Malformed, 17),
            ("[0.5, 1.5]", OutOfRange, 6),
            ("[0.5, 0.5] x", TrailingGarbage, 11),
            ("[[0.1, 0.2], [0.3, 0.4]]", TooFewVertices, 0),
            ("[0.1, -0.2]", Malformed, 6),
            ("[1e-1, 0.2]", Malformed, 2),
            ("[0.1, 0.2, 0.3]", Malformed, 0),
            ("[]", Malformed, 0),
            ("[0.4, 0.2, 0.3, 0.5]", Malformed, 0),
            ("[0.1, [0.2, 0.3]]", Malformed, 6),
            ("[0.1,, 0.2]", Malformed, 5),
            ("[0.1, 0.2,]", Malformed, 10),
            ("[0., 0.2]", Malformed, 3),
            ("0.5", Malformed, 0),
            ("[[[[0.1, 0.2]]]]", Malformed, 3),
            ("[1.0001, 0]", OutOfRange, 1),
        ];
        for &(text, k, off) in cases {
            assert_eq!(kind(text, None), (k, off), "{text:?}");
        }
    }

    #[test]
    fn exact_range_check() {
        assert!(parse("[1.000000, 0]", None).is_ok());
        assert!(parse("[001, .5]", None).is_ok());
        assert_eq!(
            kind("[0, 1.0000000000000000000001]", None).0,
            ParseErrorKind::OutOfRange
        );
        assert_eq!(kind("[0, 10]", None).0, ParseErrorKind::OutOfRange);
    }

    #[test]
    fn wrong_shape_for_each_expectation() {
        assert_eq!(
            kind("[0.1, 0.2]", Some(ShapeKind::BBox)).0,
            ParseErrorKind::WrongShape
        );
        assert_eq!(
            kind("[[0,0],[1,0],[1,1]]", Some(ShapeKind::Point)).0,
            ParseErrorKind::WrongShape
        );
        assert_eq!(
            kind("  [0.1, 0.2, 0.3]", Some(ShapeKind::Mask)),
            (ParseErrorKind::WrongShape, 2)
        );
        assert_eq!(
            kind("[0.1, 0.2, 0.3]", Some(ShapeKind::Point)).0,
            ParseErrorKind::Malformed
        );
    }

    #[test]
    fn reserialization_only_canonicalizes_whitespace() {
        let text = "[ [0.2,0.20] ,\n[.6 , 1],[0.600,\t0.6]]";
        let t = parse(text, Some(ShapeKind::Mask)).unwrap();
        assert_eq!(t.to_text(), "[[0.2, 0.20], [.6, 1], [0.600, 0.6]]");
    }

    #[test]
    fn denormalize_is_exact() {
        let s = size(5, 5);
        let t = parse("[0.200, 0.200]", None).unwrap();
        assert_eq!(t.denormalize(s), Denormalized::Point(Point::new(1.0, 1.0)));
        let t = parse("[0.7, 0.0]", None).unwrap();
        assert_eq!(
            t.denormalize(size(10, 3)),
            Denormalized::Point(Point::new(7.0, 0.0))
        );
    }
}
