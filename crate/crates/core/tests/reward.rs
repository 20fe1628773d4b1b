mod common;

use common::*;
use proptest::prelude::*;
use trajseg::grammar::serialize;
use trajseg::reward::{group_advantages, total_reward, RewardConfig};
use trajseg::rollout::{perturb, PerturbKind, PerturbSpec};
use trajseg::{BinaryMask, ImageSize, PixelPolygon};

fn square(lo: f64, hi: f64) -> PixelPolygon {
    PixelPolygon::from_coords(&[(lo, lo), (hi, lo), (hi, hi), (lo, hi)])
}

#[test]
fn format_failures_are_exactly_zero_under_any_config() {
    let size = ImageSize::new(100, 100).unwrap();
    let gt = BinaryMask::from_fn(size, |x, y| {
        (20..=70).contains(&x) && (30..=60).contains(&y)
    });
    let text = serialize(&square(20.0, 70.0), size, 3).unwrap();
    let configs = [
        RewardConfig::default(),
        RewardConfig {
            tau: 0.0,
            scale: 0.1,
            w_dist: 3.0,
            ..RewardConfig::default()
        },
    ];
    for seed in 0..50 {
        for kind in [
            PerturbKind::CorruptFormat,
            PerturbKind::Truncate { fraction: 0.7 },
        ] {
            let bad = perturb(&text, &PerturbSpec::new(kind, seed)).unwrap();
            for cfg in &configs {
                let b = total_reward(&bad, &gt, size, cfg).unwrap();
                assert!(!b.format_ok);
                assert_eq!(b.total, 0.0);
            }
        }
    }
}

#[test]
fn total_is_nondecreasing_in_iou_with_fixed_centroid() {
    // Concentric squares about (50, 50): centroids coincide, IoU grows with size.
    let size = ImageSize::new(100, 100).unwrap();
    let gt = BinaryMask::from_fn(size, |x, y| {
        (30..=70).contains(&x) && (30..=70).contains(&y)
    });
    let cfg = RewardConfig::default();
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for half in 1..=20 {
        let h = half as f64;
        let text = serialize(&square(50.0 - h, 50.0 + h), size, 3).unwrap();
        let b = total_reward(&text, &gt, size, &cfg).unwrap();
        assert_eq!(b.r_dist, 0.0);
        assert!(b.iou_value > prev.0);
        if b.iou_value >= cfg.tau {
            assert!(b.total >= prev.1);
        } else {
            assert_eq!(b.r_iou, 0.0);
        }
        prev = (b.iou_value, b.total);
    }
}

proptest! {
    #[test]
    fn advantages_are_standardized(rewards in prop::collection::vec(-5.0..5.0f64, 2..32)) {
        let a = group_advantages(&rewards).unwrap();
        let oracle = advantages_oracle(&rewards);
        for (x, o) in a.iter().zip(&oracle) {
            prop_assert!((x - o).abs() < 1e-9);
        }
        let n = a.len() as f64;
        let mean = a.iter().sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        if a.iter().any(|&x| x != 0.0) {
            let std = (a.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
            prop_assert!((std - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn advantages_shift_invariant_and_sign_equivariant(
        rewards in prop::collection::vec(0.0..1.0f64, 2..16),
        c in -10.0..10.0f64,
    ) {
        let base = group_advantages(&rewards).unwrap();
        let shifted: Vec<f64> = rewards.iter().map(|r| r + c).collect();
        let negated: Vec<f64> = rewards.iter().map(|r| -r).collect();
        for (a, b) in base.iter().zip(group_advantages(&shifted).unwrap()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        for (a, b) in base.iter().zip(group_advantages(&negated).unwrap()) {
            prop_assert!((a + b).abs() < 1e-9);
        }
    }
}
