//! COCO-style annotation files.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::{Instance, MaskSource, RleCounts};
use crate::error::{Error, Result};
use crate::geometry::{ImageSize, PixelPolygon, Point};

#[derive(Deserialize)]
struct CocoFile {
    images: Vec<CocoImage>,
    annotations: Vec<CocoAnnotation>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Id {
    Num(u64),
    Str(String),
}

impl Id {
    fn key(&self) -> String {
        match self {
            Id::Num(n) => n.to_string(),
            Id::Str(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct CocoImage {
    id: Id,
    file_name: String,
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct CocoAnnotation {
    id: Id,
    image_id: Id,
    segmentation: Segmentation,
    #[serde(default)]
    caption: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Segmentation {
    Polygons(Vec<Vec<f64>>),
    Rle { size: [u32; 2], counts: RleCounts },
}

/// Parses COCO JSON into instances, one per annotation, in file order.
///
/// Polygon coordinates follow the COCO convention where pixel `i` spans
/// `[i, i + 1)`; they are shifted by −0.5 onto pixel centers. Multi-part
/// polygons are unioned.
pub fn parse_coco(json: &str) -> Result<Vec<Instance>> {
    let file: CocoFile = serde_json::from_str(json)?;
    let mut images = HashMap::new();
    for img in &file.images {
        let size = ImageSize::new(img.width, img.height)?;
        images.insert(img.id.key(), (img.file_name.clone(), size));
    }
    let mut seen = std::collections::HashSet::new();
    file.annotations
        .into_iter()
        .map(|ann| {
            let id = ann.id.key();
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            let (file_name, size) = images.get(&ann.image_id.key()).cloned().ok_or_else(|| {
                Error::Format(format!(
                    "annotation {id} refers to unknown image {}",
                    ann.image_id.key()
                ))
            })?;
            let mask_source = match ann.segmentation {
                Segmentation::Polygons(parts) => {
                    let rings = parts
                        .iter()
                        .map(|flat| {
                            if flat.len() % 2 != 0 {
                                return Err(Error::Format(format!(
                                    "annotation {id}: polygon has an odd number of coordinates"
                                )));
                            }
                            Ok(PixelPolygon::new(
                                flat.chunks_exact(2)
                                    .map(|c| Point::new(c[0] - 0.5, c[1] - 0.5))
                                    .collect(),
                            ))
                        })
                        .collect::<Result<_>>()?;
                    MaskSource::Polygons(rings)
                }
                Segmentation::Rle {
                    size: [h, w],
                    counts,
                } => {
                    if (w, h) != (size.width, size.height) {
                        return Err(Error::SizeMismatch {
                            left_w: w,
                            left_h: h,
                            right_w: size.width,
                            right_h: size.height,
                        });
                    }
                    MaskSource::Rle(counts)
                }
            };
            Ok(Instance {
                id,
                image_ref: file_name,
                size,
                mask_source,
                caption: ann.caption,
            })
        })
        .collect()
}

pub fn load_coco(path: impl AsRef<Path>) -> Result<Vec<Instance>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coco(&text)
}
