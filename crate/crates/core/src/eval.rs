//! Scoring prediction files against ground truth, and the ε density sweep.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{rasterize, trace_contours, SimplifyTolerance};
use crate::dataset::Instance;
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, ImageSize};
use crate::grammar::{parse_mask_rings, serialize};
use crate::metrics::{overlap, CorpusScores, SampleScore, Tally, ACC_IOU_THRESHOLD};
use crate::par::try_map_ordered;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub acc_iou_threshold: f64,
    /// Worker count; not part of the report since it cannot change results.
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            acc_iou_threshold: ACC_IOU_THRESHOLD,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub id: String,
    pub iou: f64,
    pub box_iou: f64,
    pub parse_ok: bool,
    pub intersection: u64,
    pub union: u64,
}

impl SampleRow {
    fn score(&self) -> SampleScore {
        SampleScore {
            intersection: self.intersection,
            union: self.union,
            iou: self.iou,
            box_iou: self.box_iou,
            parse_ok: self.parse_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub corpus: CorpusScores,
    pub per_sample: Vec<SampleRow>,
    /// Predictions whose id matches no ground-truth instance.
    pub unmatched_predictions: u64,
    pub config: EvalConfig,
}

impl EvalReport {
    /// Corpus scores rebuilt from the per-sample rows.
    pub fn recompute_corpus(&self) -> Result<CorpusScores> {
        self.per_sample
            .iter()
            .map(SampleRow::score)
            .collect::<Vec<_>>()
            .iter()
            .collect::<Tally>()
            .finish()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn score_text(text: Option<&str>, gt: &BinaryMask) -> Result<SampleScore> {
    let Some(rings) = text.and_then(|t| parse_mask_rings(t, gt.size()).ok()) else {
        return Ok(SampleScore::parse_failure(gt));
    };
    SampleScore::from_masks(&rasterize(&rings, gt.size()), gt)
}

/// Scores predictions against every ground-truth instance, in GT order.
/// Missing predictions count as parse failures; duplicate ids on either
/// side are errors.
pub fn evaluate(
    preds: &[PredictionRecord],
    gts: &[Instance],
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let mut gt_ids = HashSet::new();
    for g in gts {
        if !gt_ids.insert(g.id.as_str()) {
            return Err(Error::DuplicateId(g.id.clone()));
        }
    }
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    for p in preds {
        if by_id.insert(p.id.as_str(), p.text.as_str()).is_some() {
            return Err(Error::DuplicateId(p.id.clone()));
        }
    }
    let unmatched = by_id.keys().filter(|id| !gt_ids.contains(*id)).count() as u64;

    let per_sample = try_map_ordered(gts, cfg.jobs, |g| -> Result<SampleRow> {
        let mask = g.materialize()?;
        let s = score_text(by_id.get(g.id.as_str()).copied(), &mask)?;
        Ok(SampleRow {
            id: g.id.clone(),
            iou: s.iou,
            box_iou: s.box_iou,
            parse_ok: s.parse_ok,
            intersection: s.intersection,
            union: s.union,
        })
    })?;
    let corpus = per_sample
        .iter()
        .map(SampleRow::score)
        .collect::<Vec<_>>()
        .iter()
        .collect::<Tally>()
        .finish()?;
    Ok(EvalReport {
        corpus,
        per_sample,
        unmatched_predictions: unmatched,
        config: *cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon_rel: f64,
    pub mean_vertices: f64,
    pub mean_chars: f64,
    pub mean_roundtrip_iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub n_instances: u64,
    pub n_skipped: u64,
}

pub const SWEEP_CSV_HEADER: &str = "epsilon,mean_vertices,mean_chars,mean_roundtrip_iou";

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(SWEEP_CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{},{:.6},{:.6},{:.6}",
                r.epsilon_rel, r.mean_vertices, r.mean_chars, r.mean_roundtrip_iou
            )
            .unwrap();
        }
        s
    }
}

/// Per-ε measurements of one mask.
#[derive(Debug, Clone, Copy)]
struct SweepCell {
    vertices: u64,
    chars: u64,
    iou: f64,
}

fn sweep_mask(
    mask: &BinaryMask,
    tols: &[SimplifyTolerance],
    decimals: u8,
) -> Result<Vec<SweepCell>> {
    let traced = trace_contours(mask);
    tols.iter()
        .map(|&tol| {
            let c = traced.simplified(tol);
            let text = serialize(&c, mask.size(), decimals)?;
            let (inter, union) = overlap(&rasterize(&c, mask.size()), mask)?;
            Ok(SweepCell {
                vertices: c.vertex_count() as u64,
                chars: text.len() as u64,
                iou: if union == 0 {
                    1.0
                } else {
                    inter as f64 / union as f64
                },
            })
        })
        .collect()
}

/// Vertex count, character count and round-trip IoU at each tolerance,
/// averaged over non-empty instances. Round-trip IoU is measured in pixel
/// space on the simplified rings, independent of text quantization.
pub fn epsilon_sweep(
    gts: &[Instance],
    eps_list: &[f64],
    decimals: u8,
    jobs: usize,
) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(Error::Config("epsilon list is empty".into()));
    }
    if eps_list
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::Config(
            "epsilon list must be strictly ascending".into(),
        ));
    }
    let tols = eps_list
        .iter()
        .map(|&e| SimplifyTolerance::new(e))
        .collect::<Result<Vec<_>>>()?;
    crate::grammar::normalize_coord(0.0, 1, decimals)?;

    let cells = try_map_ordered(gts, jobs, |g| -> Result<Option<Vec<SweepCell>>> {
        let mask = g.materialize()?;
        if mask.is_empty() {
            return Ok(None);
        }
        sweep_mask(&mask, &tols, decimals).map(Some)
    })?;
    Ok(summarize(&cells, eps_list))
}

fn summarize(cells: &[Option<Vec<SweepCell>>], eps_list: &[f64]) -> SweepReport {
    let used: Vec<&Vec<SweepCell>> = cells.iter().flatten().collect();
    let n = used.len() as u64;
    let rows = eps_list
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let (mut v, mut c, mut iou) = (0u64, 0u64, 0f64);
            for cell in used.iter().map(|row| row[k]) {
                v += cell.vertices;
                c += cell.chars;
                iou += cell.iou;
            }
            let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
            SweepRow {
                epsilon_rel: e,
                mean_vertices: mean(v as f64),
                mean_chars: mean(c as f64),
                mean_roundtrip_iou: mean(iou),
            }
        })
        .collect();
    SweepReport {
        rows,
        n_instances: n,
        n_skipped: cells.len() as u64 - n,
    }
}

/// Deterministic blob mask: a union of a few random discs and ellipses.
/// Each index seeds its own generator, so any subset can be built in any
/// order and still match.
pub fn synthetic_mask(seed: u64, index: u64, size: ImageSize) -> BinaryMask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let (w, h) = (size.width as f64, size.height as f64);
    let n = rng.random_range(1..=4);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            let cx = rng.random_range(0.2..0.8) * w;
            let cy = rng.random_range(0.2..0.8) * h;
            let rx = rng.random_range(0.08..0.3) * w;
            let ry = rng.random_range(0.08..0.3) * h;
            (cx, cy, rx, ry)
        })
        .collect();
    BinaryMask::from_fn(size, |x, y| {
        blobs.iter().any(|&(cx, cy, rx, ry)| {
            let dx = (x as f64 - cx) / rx;
            let dy = (y as f64 - cy) / ry;
            dx * dx + dy * dy <= 1.0
        })
    })
}

pub fn synthetic_instances(n: usize, size: ImageSize, seed: u64) -> Vec<Instance> {
    (0..n as u64)
        .map(|i| {
            Instance::from_mask(
                format!("syn{i:06}"),
                format!("synthetic/{i:06}.png"),
                &synthetic_mask(seed, i, size),
            )
        })
        .collect()
}
