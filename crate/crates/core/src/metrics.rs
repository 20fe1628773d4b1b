//! Segmentation metrics: per-mask IoU, corpus cIoU/gIoU, Acc@0.5 on
//! min/max-derived boxes, and normalized centroid distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_iou, mask_bbox, BinaryMask, Point};

/// Box IoU threshold for a detection hit.
pub const ACC_IOU_THRESHOLD: f64 = 0.5;

/// A prediction/ground-truth mask pair on the same grid.
#[derive(Debug, Clone, Copy)]
pub struct SamplePair<'a> {
    pub pred: &'a BinaryMask,
    pub gt: &'a BinaryMask,
}

impl<'a> SamplePair<'a> {
    pub fn new(pred: &'a BinaryMask, gt: &'a BinaryMask) -> Result<Self> {
        check_sizes(pred, gt)?;
        Ok(SamplePair { pred, gt })
    }
}

fn check_sizes(a: &BinaryMask, b: &BinaryMask) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::SizeMismatch {
            left_w: a.width(),
            left_h: a.height(),
            right_w: b.width(),
            right_h: b.height(),
        });
    }
    Ok(())
}

/// `(|pred ∧ gt|, |pred ∨ gt|)`.
pub fn overlap(pred: &BinaryMask, gt: &BinaryMask) -> Result<(u64, u64)> {
    check_sizes(pred, gt)?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        inter += (p & g) as u64;
        union += (p | g) as u64;
    }
    Ok((inter, union))
}

fn ratio(inter: u64, union: u64) -> f64 {
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mask IoU; two empty masks score 1.0.
pub fn mask_iou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    let (i, u) = overlap(pred, gt)?;
    Ok(ratio(i, u))
}

/// IoU of the min/max boxes of two masks; 0.0 when either mask is empty.
pub fn mask_box_iou(pred: &BinaryMask, gt: &BinaryMask) -> f64 {
    match (mask_bbox(pred), mask_bbox(gt)) {
        (Ok(a), Ok(b)) => box_iou(&a, &b),
        _ => 0.0,
    }
}

/// Everything a corpus aggregate needs from one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub intersection: u64,
    pub union: u64,
    pub iou: f64,
    pub box_iou: f64,
    pub parse_ok: bool,
}

impl SampleScore {
    pub fn from_masks(pred: &BinaryMask, gt: &BinaryMask) -> Result<Self> {
        let (intersection, union) = overlap(pred, gt)?;
        Ok(SampleScore {
            intersection,
            union,
            iou: ratio(intersection, union),
            box_iou: mask_box_iou(pred, gt),
            parse_ok: true,
        })
    }

    /// A prediction that could not be parsed: nothing predicted, every GT
    /// pixel missed.
    pub fn parse_failure(gt: &BinaryMask) -> Self {
        let union = gt.count() as u64;
        SampleScore {
            intersection: 0,
            union,
            iou: if union == 0 { 1.0 } else { 0.0 },
            box_iou: 0.0,
            parse_ok: false,
        }
    }

    pub fn hit(&self) -> bool {
        self.box_iou >= ACC_IOU_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusScores {
    pub ciou: f64,
    pub giou: f64,
    pub acc_at_05: f64,
    pub n_samples: u64,
    pub n_parse_failures: u64,
}

/// Mergeable partial sums. Integer fields merge exactly; the IoU sum is an
/// f64, so shards must be merged in sample order to reproduce a sequential
/// fold bit-for-bit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub intersection: u64,
    pub union: u64,
    pub iou_sum: f64,
    pub hits: u64,
    pub n: u64,
    pub parse_failures: u64,
}

impl Tally {
    pub fn push(&mut self, s: &SampleScore) {
        self.intersection += s.intersection;
        self.union += s.union;
        self.iou_sum += s.iou;
        self.hits += s.hit() as u64;
        self.n += 1;
        self.parse_failures += (!s.parse_ok) as u64;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.intersection += other.intersection;
        self.union += other.union;
        self.iou_sum += other.iou_sum;
        self.hits += other.hits;
        self.n += other.n;
        self.parse_failures += other.parse_failures;
    }

    pub fn finish(&self) -> Result<CorpusScores> {
        if self.n == 0 {
            return Err(Error::Domain("cannot aggregate an empty corpus".into()));
        }
        let n = self.n as f64;
        Ok(CorpusScores {
            ciou: ratio(self.intersection, self.union),
            giou: self.iou_sum / n,
            acc_at_05: self.hits as f64 / n,
            n_samples: self.n,
            n_parse_failures: self.parse_failures,
        })
    }
}

impl<'a> FromIterator<&'a SampleScore> for Tally {
    fn from_iter<I: IntoIterator<Item = &'a SampleScore>>(iter: I) -> Self {
        let mut t = Tally::default();
        for s in iter {
            t.push(s);
        }
        t
    }
}

/// Corpus cIoU, gIoU and Acc@0.5 over mask pairs.
pub fn aggregate(pairs: &[SamplePair<'_>]) -> Result<CorpusScores> {
    let mut tally = Tally::default();
    for p in pairs {
        tally.push(&SampleScore::from_masks(p.pred, p.gt)?);
    }
    tally.finish()
}

/// How the squared centroid offset is reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Mean of the two squared coordinate deltas.
    #[default]
    Mean,
    /// Plain squared Euclidean distance.
    SquaredEuclidean,
}

/// Squared distance between two centroids given in normalized coordinates.
pub fn centroid_sq_dist(pred: Point, gt: Point, mode: DistanceMode) -> f64 {
    let sq = (pred.x - gt.x).powi(2) + (pred.y - gt.y).powi(2);
    match mode {
        DistanceMode::Mean => sq / 2.0,
        DistanceMode::SquaredEuclidean => sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ImageSize;

    fn mask(rows: &[&str]) -> BinaryMask {
        BinaryMask::from_ascii(rows).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = mask(&["##.", "##.", "..."]);
        let b = mask(&["...", ".##", ".##"]);
        assert_eq!(mask_iou(&a, &a).unwrap(), 1.0);
        assert!((mask_iou(&a, &b).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        let c = mask(&["...", "...", "#.."]);
        assert_eq!(mask_iou(&c, &b).unwrap(), 0.0);
        let e = mask(&["...", "...", "..."]);
        assert_eq!(mask_iou(&e, &e).unwrap(), 1.0);
        assert_eq!(mask_iou(&e, &a).unwrap(), 0.0);
        let other = BinaryMask::empty(ImageSize::new(2, 2).unwrap());
        assert!(matches!(
            mask_iou(&a, &other),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn worked_two_sample_corpus() {
        // (inter, union) = (1, 2) and (3, 4)
        let p1 = mask(&["##"]);
        let g1 = mask(&["#."]);
        let p2 = mask(&["####"]);
        let g2 = mask(&["###."]);
        let pairs = [
            SamplePair::new(&p1, &g1).unwrap(),
            SamplePair::new(&p2, &g2).unwrap(),
        ];
        let s = aggregate(&pairs).unwrap();
        assert!((s.giou - 0.625).abs() < 1e-12);
        assert!((s.ciou - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.n_samples, 2);
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let g = mask(&[".##", ".##"]);
        let e = mask(&["...", "..."]);
        let perfect = aggregate(&[SamplePair::new(&g, &g).unwrap()]).unwrap();
        assert_eq!(
            (perfect.ciou, perfect.giou, perfect.acc_at_05),
            (1.0, 1.0, 1.0)
        );
        let miss = aggregate(&[SamplePair::new(&e, &g).unwrap(); 3]).unwrap();
        assert_eq!((miss.ciou, miss.giou, miss.acc_at_05), (0.0, 0.0, 0.0));
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn tally_merge_matches_sequential() {
        let a = SampleScore::from_masks(&mask(&["##"]), &mask(&["#."])).unwrap();
        let b = SampleScore::from_masks(&mask(&["#."]), &mask(&["##"])).unwrap();
        let seq: Tally = [a, b, a].iter().collect();
        let mut left: Tally = [a].iter().collect();
        left.merge(&[b, a].iter().collect());
        assert_eq!(seq.finish().unwrap().ciou, left.finish().unwrap().ciou);
        assert_eq!(seq.hits, left.hits);
    }

    #[test]
    fn centroid_distance() {
        let d = centroid_sq_dist(
            Point::new(0.6, 0.5),
            Point::new(0.5, 0.5),
            DistanceMode::Mean,
        );
        assert!((d - 0.005).abs() < 1e-15);
        let p = Point::new(0.3, 0.7);
        assert_eq!(centroid_sq_dist(p, p, DistanceMode::Mean), 0.0);
        let far = centroid_sq_dist(Point::new(0., 0.), Point::new(1., 1.), DistanceMode::Mean);
        assert_eq!(far, 1.0);
        let sq = centroid_sq_dist(
            Point::new(0., 0.),
            Point::new(1., 1.),
            DistanceMode::SquaredEuclidean,
        );
        assert_eq!(sq, 2.0);
    }

    #[test]
    fn parse_failure_counts_as_miss() {
        let g = mask(&["##"]);
        let mut t = Tally::default();
        t.push(&SampleScore::parse_failure(&g));
        let s = t.finish().unwrap();
        assert_eq!((s.giou, s.acc_at_05, s.n_parse_failures), (0.0, 0.0, 1));
    }
}
