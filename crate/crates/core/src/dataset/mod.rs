//! Instance ingestion, weak-label derivation and query-pair generation.

mod coco;
mod rle;
mod templates;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use coco::{load_coco, parse_coco};
pub use rle::{compress_counts, decode_rle, decompress_counts, encode_rle, RleCounts};
pub use templates::TemplateSet;

use crate::codec::{rasterize, trace_contours, ContourSet, SimplifyTolerance};
use crate::error::{Error, Result};
use crate::geometry::{mask_bbox, mask_centroid, BBox, BinaryMask, ImageSize, PixelPolygon, Point};
use crate::grammar::serialize;

/// Where an instance's mask comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskSource {
    /// Rings in pixel-center coordinates, unioned.
    Polygons(Vec<PixelPolygon>),
    Rle(RleCounts),
    MaskImage(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub image_ref: String,
    pub size: ImageSize,
    pub mask_source: MaskSource,
    pub caption: Option<String>,
}

impl Instance {
    /// An instance whose mask is already in memory.
    pub fn from_mask(
        id: impl Into<String>,
        image_ref: impl Into<String>,
        mask: &BinaryMask,
    ) -> Self {
        Instance {
            id: id.into(),
            image_ref: image_ref.into(),
            size: mask.size(),
            mask_source: MaskSource::Rle(encode_rle(mask)),
            caption: None,
        }
    }

    pub fn with_caption(mut self, caption: impl Into<String>) -> Self {
        self.caption = Some(caption.into());
        self
    }

    pub fn materialize(&self) -> Result<BinaryMask> {
        match &self.mask_source {
            MaskSource::Polygons(rings) => {
                let mut out = BinaryMask::empty(self.size);
                for ring in rings {
                    out.or_assign(&rasterize(std::iter::once(ring), self.size));
                }
                Ok(out)
            }
            MaskSource::Rle(r) => decode_rle(r, self.size),
            MaskSource::MaskImage(path) => {
                let m = load_png_mask(path)?;
                if m.size() != self.size {
                    return Err(Error::SizeMismatch {
                        left_w: m.width(),
                        left_h: m.height(),
                        right_w: self.size.width,
                        right_h: self.size.height,
                    });
                }
                Ok(m)
            }
        }
    }
}

/// Reads a mask PNG; any channel layout is reduced to luma, `>= 128` is
/// foreground.
pub fn load_png_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::image(path, other),
    })?;
    let luma = img.to_luma8();
    let size = ImageSize::new(luma.width(), luma.height())?;
    let bits = luma.as_raw().iter().map(|&v| v >= 128).collect();
    BinaryMask::from_bits(size, bits)
}

/// Encodes a mask as an 8-bit grayscale PNG with values 0/255.
pub fn encode_png_mask(mask: &BinaryMask) -> Vec<u8> {
    let raw: Vec<u8> = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let img = image::GrayImage::from_raw(mask.width(), mask.height(), raw)
        .expect("buffer matches mask dimensions");
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    out.into_inner()
}

pub fn save_png_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png_mask(mask)).map_err(|e| Error::io(path, e))
}

/// Query/answer element of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Text,
    Point,
    BBox,
    Mask,
}

impl Element {
    pub fn as_str(self) -> &'static str {
        match self {
            Element::Text => "text",
            Element::Point => "point",
            Element::BBox => "bbox",
            Element::Mask => "mask",
        }
    }
}

/// An ordered (input, output) pair; text is never an output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    #[serde(rename = "text->point")]
    TextToPoint,
    #[serde(rename = "text->bbox")]
    TextToBBox,
    #[serde(rename = "text->mask")]
    TextToMask,
    #[serde(rename = "point->bbox")]
    PointToBBox,
    #[serde(rename = "point->mask")]
    PointToMask,
    #[serde(rename = "bbox->point")]
    BBoxToPoint,
    #[serde(rename = "bbox->mask")]
    BBoxToMask,
    #[serde(rename = "mask->point")]
    MaskToPoint,
    #[serde(rename = "mask->bbox")]
    MaskToBBox,
}

impl TaskKind {
    pub const ALL: [TaskKind; 9] = [
        TaskKind::TextToPoint,
        TaskKind::TextToBBox,
        TaskKind::TextToMask,
        TaskKind::PointToBBox,
        TaskKind::PointToMask,
        TaskKind::BBoxToPoint,
        TaskKind::BBoxToMask,
        TaskKind::MaskToPoint,
        TaskKind::MaskToBBox,
    ];

    pub fn elements(self) -> (Element, Element) {
        use Element::*;
        match self {
            TaskKind::TextToPoint => (Text, Point),
            TaskKind::TextToBBox => (Text, BBox),
            TaskKind::TextToMask => (Text, Mask),
            TaskKind::PointToBBox => (Point, BBox),
            TaskKind::PointToMask => (Point, Mask),
            TaskKind::BBoxToPoint => (BBox, Point),
            TaskKind::BBoxToMask => (BBox, Mask),
            TaskKind::MaskToPoint => (Mask, Point),
            TaskKind::MaskToBBox => (Mask, BBox),
        }
    }

    pub fn input(self) -> Element {
        self.elements().0
    }

    pub fn output(self) -> Element {
        self.elements().1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::TextToPoint => "text->point",
            TaskKind::TextToBBox => "text->bbox",
            TaskKind::TextToMask => "text->mask",
            TaskKind::PointToBBox => "point->bbox",
            TaskKind::PointToMask => "point->mask",
            TaskKind::BBoxToPoint => "bbox->point",
            TaskKind::BBoxToMask => "bbox->mask",
            TaskKind::MaskToPoint => "mask->point",
            TaskKind::MaskToBBox => "mask->bbox",
        }
    }

    /// Shape the response must parse as.
    pub fn expected_shape(self) -> crate::grammar::ShapeKind {
        use crate::grammar::ShapeKind;
        match self.output() {
            Element::Point => ShapeKind::Point,
            Element::BBox => ShapeKind::BBox,
            _ => ShapeKind::Mask,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown task kind `{s}`")))
    }
}

/// Weak labels and serialized targets derived from one instance mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Targets {
    pub text: Option<String>,
    pub point: Point,
    pub bbox: BBox,
    pub contours: ContourSet,
    pub point_text: String,
    pub bbox_text: String,
    pub mask_text: String,
}

impl Targets {
    /// Serialized form of `e`; `None` for text without a caption.
    pub fn render(&self, e: Element) -> Option<&str> {
        match e {
            Element::Text => self.text.as_deref(),
            Element::Point => Some(&self.point_text),
            Element::BBox => Some(&self.bbox_text),
            Element::Mask => Some(&self.mask_text),
        }
    }
}

/// Derives point, box and polygon targets. `Ok(None)` when the mask is
/// empty: such instances are skipped, not errors.
pub fn derive_targets(
    inst: &Instance,
    tol: SimplifyTolerance,
    decimals: u8,
) -> Result<Option<Targets>> {
    let mask = inst.materialize()?;
    derive_targets_from_mask(&mask, inst.caption.clone(), tol, decimals)
}

pub fn derive_targets_from_mask(
    mask: &BinaryMask,
    caption: Option<String>,
    tol: SimplifyTolerance,
    decimals: u8,
) -> Result<Option<Targets>> {
    if mask.is_empty() {
        return Ok(None);
    }
    let size = mask.size();
    let point = mask_centroid(mask)?;
    let bbox = mask_bbox(mask)?;
    let contours = trace_contours(mask).simplified(tol);
    Ok(Some(Targets {
        text: caption,
        point_text: serialize(point, size, decimals)?,
        bbox_text: serialize(bbox, size, decimals)?,
        mask_text: serialize(&contours, size, decimals)?,
        point,
        bbox,
        contours,
    }))
}

/// One instruction sample, serialized as a JSONL line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPair {
    #[serde(rename = "id")]
    pub instance_id: String,
    pub image: String,
    pub task: TaskKind,
    pub prompt: String,
    pub response: String,
}

impl QueryPair {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("query pairs always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedTask {
    pub id: String,
    pub task: TaskKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairBatch {
    pub pairs: Vec<QueryPair>,
    pub skipped: Vec<SkippedTask>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    pub tol: SimplifyTolerance,
    pub decimals: u8,
    pub seed: u64,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            tol: SimplifyTolerance::EXACT,
            decimals: crate::grammar::DEFAULT_DECIMALS,
            seed: 0,
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Deterministic template index for (seed, instance, task).
fn pick_template(seed: u64, id: &str, task: TaskKind, n: usize) -> usize {
    let key = seed ^ fnv1a(id) ^ fnv1a(task.as_str()).rotate_left(29);
    ChaCha8Rng::seed_from_u64(key).random_range(0..n)
}

/// One query pair per satisfiable task, in canonical task order.
pub fn generate_pairs(
    inst: &Instance,
    tasks: &[TaskKind],
    templates: &TemplateSet,
    opts: &PairOptions,
) -> Result<PairBatch> {
    if tasks.is_empty() {
        return Ok(PairBatch::default());
    }
    let targets = derive_targets(inst, opts.tol, opts.decimals)?;
    Ok(pairs_from_targets(
        inst,
        targets.as_ref(),
        tasks,
        templates,
        opts.seed,
    ))
}

/// Pair generation over already-derived targets (`None` = empty mask).
pub fn pairs_from_targets(
    inst: &Instance,
    targets: Option<&Targets>,
    tasks: &[TaskKind],
    templates: &TemplateSet,
    seed: u64,
) -> PairBatch {
    let mut batch = PairBatch::default();
    for task in TaskKind::ALL.into_iter().filter(|t| tasks.contains(t)) {
        let skip = |reason: &str| SkippedTask {
            id: inst.id.clone(),
            task,
            reason: reason.to_string(),
        };
        let Some(t) = targets else {
            batch.skipped.push(skip("empty mask"));
            continue;
        };
        let Some(input) = t.render(task.input()) else {
            batch.skipped.push(skip("no caption"));
            continue;
        };
        let choices = templates.get(task);
        if choices.is_empty() {
            batch.skipped.push(skip("no template"));
            continue;
        }
        let template = &choices[pick_template(seed, &inst.id, task, choices.len())];
        batch.pairs.push(QueryPair {
            instance_id: inst.id.clone(),
            image: inst.image_ref.clone(),
            task,
            prompt: template.replace(templates::PLACEHOLDER, input),
            response: t
                .render(task.output())
                .expect("outputs are never text")
                .to_string(),
        });
    }
    batch
}
