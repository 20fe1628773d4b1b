//! Mask <-> point-trajectory conversion.
//!
//! Contours are rings of border-pixel centers and the rasterizer is
//! boundary-inclusive at pixel centers; together they make the zero-tolerance
//! round trip exact for hole-free components. Holes are not represented.

mod raster;
mod simplify;
mod trace;

use serde::{Deserialize, Serialize};

pub use raster::{rasterize, rasterize_polygon};
pub use simplify::simplify;
pub use trace::trace_contours;

use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, PixelPolygon};

/// Sparsification tolerance relative to the contour perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SimplifyTolerance(f64);

impl SimplifyTolerance {
    pub const EXACT: SimplifyTolerance = SimplifyTolerance(0.0);

    pub fn new(epsilon_rel: f64) -> Result<Self> {
        if !(epsilon_rel.is_finite() && epsilon_rel >= 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be finite and >= 0, got {epsilon_rel}"
            )));
        }
        Ok(SimplifyTolerance(epsilon_rel))
    }

    pub fn epsilon_rel(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SimplifyTolerance {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        SimplifyTolerance::new(value)
    }
}

impl From<SimplifyTolerance> for f64 {
    fn from(t: SimplifyTolerance) -> f64 {
        t.0
    }
}

/// Outer rings of a mask, largest first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContourSet {
    rings: Vec<PixelPolygon>,
}

impl ContourSet {
    pub(crate) fn from_rings_unchecked(rings: Vec<PixelPolygon>) -> Self {
        ContourSet { rings }
    }

    /// Wraps rings as given; no reordering or orientation fix-up is applied.
    pub fn from_rings(rings: Vec<PixelPolygon>) -> Self {
        ContourSet { rings }
    }

    pub fn rings(&self) -> &[PixelPolygon] {
        &self.rings
    }

    pub fn into_rings(self) -> Vec<PixelPolygon> {
        self.rings
    }

    pub fn len(&self) -> usize {
        self.rings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.rings.iter().map(PixelPolygon::len).sum()
    }

    /// Simplifies every ring independently; ring order is unchanged.
    pub fn simplified(&self, tol: SimplifyTolerance) -> ContourSet {
        ContourSet {
            rings: self.rings.iter().map(|r| simplify(r, tol)).collect(),
        }
    }
}

impl<'a> IntoIterator for &'a ContourSet {
    type Item = &'a PixelPolygon;
    type IntoIter = std::slice::Iter<'a, PixelPolygon>;

    fn into_iter(self) -> Self::IntoIter {
        self.rings.iter()
    }
}

/// Trace, simplify and rasterize back onto the same grid.
pub fn roundtrip(mask: &BinaryMask, tol: SimplifyTolerance) -> BinaryMask {
    let contours = trace_contours(mask).simplified(tol);
    rasterize(&contours, mask.size())
}
