mod common;

use common::*;
use proptest::prelude::*;
use trajseg::metrics::{
    aggregate, centroid_sq_dist, mask_box_iou, mask_iou, DistanceMode, SamplePair,
};
use trajseg::{BinaryMask, Point};

fn random_pair(seed: u64) -> (BinaryMask, BinaryMask) {
    let mut r = rng(seed);
    let (w, h) = (16, 12);
    let p = 0.05 + (seed % 7) as f64 * 0.1;
    (
        random_noise_mask(&mut r, w, h, p),
        random_noise_mask(&mut r, w, h, p),
    )
}

fn oracle_iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (i, u) = count_iou(a, b);
    if u == 0 {
        1.0
    } else {
        i as f64 / u as f64
    }
}

proptest! {
    #[test]
    fn iou_matches_pixel_count_and_is_symmetric(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        prop_assert_eq!(mask_iou(&a, &b).unwrap(), oracle_iou(&a, &b));
        prop_assert_eq!(mask_iou(&a, &b).unwrap(), mask_iou(&b, &a).unwrap());
    }

    #[test]
    fn duplication_leaves_aggregates_unchanged(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = random_pair(seed);
        let one = aggregate(&[SamplePair::new(&a, &b).unwrap()]).unwrap();
        let many = aggregate(&vec![SamplePair::new(&a, &b).unwrap(); n]).unwrap();
        prop_assert!((one.giou - many.giou).abs() < 1e-12);
        prop_assert_eq!(one.ciou, many.ciou);
        prop_assert_eq!(one.giou, mask_iou(&a, &b).unwrap());
    }

    #[test]
    fn ciou_lies_between_sample_extremes(seed in any::<u64>(), n in 1usize..8) {
        let pairs: Vec<_> = (0..n as u64).map(|i| random_pair(seed.wrapping_add(i))).collect();
        let sp: Vec<_> = pairs.iter().map(|(a, b)| SamplePair::new(a, b).unwrap()).collect();
        let s = aggregate(&sp).unwrap();
        let ious: Vec<f64> = pairs.iter().map(|(a, b)| oracle_iou(a, b)).collect();
        let lo = ious.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ious.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // pairs with an empty union contribute nothing to the cIoU sums
        if pairs.iter().all(|(a, b)| count_iou(a, b).1 > 0) {
            prop_assert!(s.ciou >= lo - 1e-12 && s.ciou <= hi + 1e-12);
        }
    }

    #[test]
    fn centroid_distance_range(ax in 0.0..=1.0f64, ay in 0.0..=1.0f64, bx in 0.0..=1.0f64, by in 0.0..=1.0f64) {
        let d = centroid_sq_dist(Point::new(ax, ay), Point::new(bx, by), DistanceMode::Mean);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d == 0.0, ax == bx && ay == by);
    }
}

#[test]
fn aggregates_match_pixel_counting_oracle() {
    let pairs: Vec<_> = (0..200).map(random_pair).collect();
    let sp: Vec<_> = pairs
        .iter()
        .map(|(a, b)| SamplePair::new(a, b).unwrap())
        .collect();
    let s = aggregate(&sp).unwrap();

    let (mut si, mut su, mut giou, mut hits) = (0u64, 0u64, 0.0, 0u64);
    for (a, b) in &pairs {
        let (i, u) = count_iou(a, b);
        si += i;
        su += u;
        giou += oracle_iou(a, b);
        let hit = match (scan_box(a), scan_box(b)) {
            (Some(pa), Some(gb)) => box_iou_counts(pa, gb) >= 0.5,
            _ => false,
        };
        hits += hit as u64;
        assert_eq!(
            mask_box_iou(a, b),
            match (scan_box(a), scan_box(b)) {
                (Some(pa), Some(gb)) => box_iou_counts(pa, gb),
                _ => 0.0,
            }
        );
    }
    assert_eq!(s.ciou, si as f64 / su as f64);
    assert_eq!(s.giou, giou / 200.0);
    assert_eq!(s.acc_at_05, hits as f64 / 200.0);
}
