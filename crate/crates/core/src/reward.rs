//! Rule-based rollout rewards and group-relative advantages.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codec::rasterize;
use crate::error::{Error, Result};
use crate::geometry::{mask_mean, BinaryMask, ImageSize, Point};
use crate::grammar::{parse, parse_mask_rings, ParseError, ShapeKind};
use crate::metrics::{centroid_sq_dist, mask_iou, DistanceMode};

/// IoU reward scale printed as the literal reward range in some write-ups.
pub const SCALE_PRESET_TENTH: f64 = 0.1;

const DEGENERATE_STD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthPenalty {
    pub lambda: f64,
    /// Characters allowed before the penalty starts.
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub tau: f64,
    pub scale: f64,
    pub w_iou: f64,
    pub w_dist: f64,
    pub length_penalty: Option<LengthPenalty>,
    pub group_size: usize,
    pub distance: DistanceMode,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            tau: 0.5,
            scale: 1.0,
            w_iou: 1.0,
            w_dist: 1.0,
            length_penalty: None,
            group_size: 8,
            distance: DistanceMode::Mean,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad("tau must be in [0, 1]");
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad("scale must be > 0");
        }
        if !(self.w_iou.is_finite() && self.w_iou >= 0.0) {
            return bad("w_iou must be >= 0");
        }
        if !(self.w_dist.is_finite() && self.w_dist >= 0.0) {
            return bad("w_dist must be >= 0");
        }
        if let Some(lp) = self.length_penalty {
            if !(lp.lambda.is_finite() && lp.lambda >= 0.0) {
                return bad("length_penalty_lambda must be >= 0");
            }
        }
        if self.group_size < 2 {
            return bad("group_size must be >= 2");
        }
        Ok(())
    }

    /// Parses flat `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults. The length penalty is enabled by giving both
    /// `length_penalty_lambda` and `length_penalty_budget`.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = RewardConfig::default();
        let (mut lambda, mut budget) = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{key}` needs a number, got `{value}`")))
            };
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{key}` needs an integer, got `{value}`")))
            };
            match key {
                "tau" => cfg.tau = float()?,
                "scale" => cfg.scale = float()?,
                "w_iou" => cfg.w_iou = float()?,
                "w_dist" => cfg.w_dist = float()?,
                "group_size" => cfg.group_size = int()?,
                "length_penalty_lambda" => lambda = Some(float()?),
                "length_penalty_budget" => budget = Some(int()?),
                "distance" => {
                    cfg.distance = match value {
                        "mean" => DistanceMode::Mean,
                        "squared_euclidean" => DistanceMode::SquaredEuclidean,
                        _ => return Err(err(format!("unknown distance mode `{value}`"))),
                    }
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.length_penalty = match (lambda, budget) {
            (Some(lambda), Some(budget)) => Some(LengthPenalty { lambda, budget }),
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "length_penalty_lambda and length_penalty_budget must be set together".into(),
                ))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "tau = {}", self.tau).unwrap();
        writeln!(s, "scale = {}", self.scale).unwrap();
        writeln!(s, "w_iou = {}", self.w_iou).unwrap();
        writeln!(s, "w_dist = {}", self.w_dist).unwrap();
        writeln!(s, "group_size = {}", self.group_size).unwrap();
        let mode = match self.distance {
            DistanceMode::Mean => "mean",
            DistanceMode::SquaredEuclidean => "squared_euclidean",
        };
        writeln!(s, "distance = {mode}").unwrap();
        if let Some(lp) = self.length_penalty {
            writeln!(s, "length_penalty_lambda = {}", lp.lambda).unwrap();
            writeln!(s, "length_penalty_budget = {}", lp.budget).unwrap();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format_ok: bool,
    pub r_iou: f64,
    pub r_dist: f64,
    pub r_len: f64,
    pub total: f64,
    pub iou_value: f64,
}

/// Passes iff the text parses as the expected shape.
pub fn format_reward(text: &str, expected: ShapeKind) -> Result<(), ParseError> {
    parse(text, Some(expected)).map(|_| ())
}

fn normalized_mean(mask: &BinaryMask) -> Option<Point> {
    let m = mask_mean(mask).ok()?;
    Some(Point::new(
        m.x / mask.width() as f64,
        m.y / mask.height() as f64,
    ))
}

/// Scores one response against a ground-truth mask.
pub fn total_reward(
    text: &str,
    gt: &BinaryMask,
    size: ImageSize,
    cfg: &RewardConfig,
) -> Result<RewardBreakdown> {
    if gt.size() != size {
        return Err(Error::SizeMismatch {
            left_w: gt.width(),
            left_h: gt.height(),
            right_w: size.width,
            right_h: size.height,
        });
    }
    let gt_center = normalized_mean(gt).ok_or(Error::EmptyTarget)?;
    let Ok(rings) = parse_mask_rings(text, size) else {
        return Ok(RewardBreakdown::default());
    };
    let pred = rasterize(&rings, size);
    let iou_value = mask_iou(&pred, gt)?;
    let r_iou = if iou_value >= cfg.tau {
        cfg.scale * iou_value
    } else {
        0.0
    };
    let r_dist = match normalized_mean(&pred) {
        Some(c) => 0.0 - centroid_sq_dist(c, gt_center, cfg.distance),
        None => -1.0,
    };
    let r_len = match cfg.length_penalty {
        Some(lp) => {
            let over = text.chars().count().saturating_sub(lp.budget);
            0.0 - lp.lambda * over as f64
        }
        None => 0.0,
    };
    Ok(RewardBreakdown {
        format_ok: true,
        r_iou,
        r_dist,
        r_len,
        total: cfg.w_iou * r_iou + cfg.w_dist * r_dist + r_len,
        iou_value,
    })
}

/// `(r - mean) / std` with the population std; all zeros when the group
/// has (numerically) no spread.
pub fn group_advantages(rewards: &[f64]) -> Result<Vec<f64>> {
    if rewards.len() < 2 {
        return Err(Error::Domain(format!(
            "group needs at least 2 rewards, got {}",
            rewards.len()
        )));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::Domain("rewards must be finite".into()));
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < DEGENERATE_STD {
        return Ok(vec![0.0; rewards.len()]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}
