use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use trajseg::dataset::{
    generate_pairs, load_png_mask, save_png_mask, PairBatch, PairOptions, TaskKind, TemplateSet,
};
use trajseg::eval::{epsilon_sweep, evaluate, synthetic_instances, EvalConfig, PredictionRecord};
use trajseg::grammar::{parse_mask_rings, serialize};
use trajseg::par::try_map_ordered;
use trajseg::reward::{total_reward, RewardBreakdown, RewardConfig};
use trajseg::rollout::{gen_group, PerturbKind, PerturbSpec};
use trajseg::{rasterize, trace_contours, ImageSize, SimplifyTolerance};

use crate::args::*;
use crate::failure::{CliResult, Failure};
use crate::io::{gt_path, open_lines, read_text_file, sink, text_arg, GtSource};
use crate::render;

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Reward(a) => reward(a),
        Command::Convert(a) => convert(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Simulate(a) => simulate(a),
        Command::Render(a) => render_cmd(a),
    }
}

fn tolerance(eps: f64) -> CliResult<SimplifyTolerance> {
    SimplifyTolerance::new(eps).map_err(|e| Failure::usage(format!("--epsilon: {e}")))
}

fn load_config(path: Option<&std::path::Path>) -> CliResult<RewardConfig> {
    let Some(p) = path else {
        return Ok(RewardConfig::default());
    };
    let text =
        std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
    RewardConfig::from_kv_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
}

fn encode(a: EncodeArgs) -> CliResult {
    let tol = tolerance(a.epsilon)?;
    let mask = load_png_mask(&a.mask)?;
    if mask.is_empty() {
        return Err(Failure::input("empty mask"));
    }
    let traced = trace_contours(&mask);
    if rasterize(&traced, mask.size()) != mask {
        eprintln!(
            "warning: holes and components inside holes are not representable and were dropped"
        );
    }
    let text = serialize(&traced.simplified(tol), mask.size(), a.decimals)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

fn decode(a: DecodeArgs) -> CliResult {
    let size = ImageSize::new(a.width, a.height)?;
    let text = text_arg(&a.text)?;
    let rings =
        parse_mask_rings(&text, size).map_err(|e| Failure::input(format!("parse error: {e}")))?;
    save_png_mask(&rasterize(&rings, size), &a.out).map_err(|e| Failure::Internal(e.to_string()))
}

#[derive(Deserialize)]
struct TextRecord {
    id: String,
    text: String,
}

#[derive(Serialize)]
struct RewardLine<'a> {
    id: &'a str,
    #[serde(flatten)]
    breakdown: RewardBreakdown,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    id: &'a str,
    error: &'a str,
}

fn reward(a: RewardArgs) -> CliResult {
    let cfg = load_config(a.config.as_deref())?;
    let mut out = io::stdout().lock();
    for (n, line) in io::stdin().lock().lines().enumerate() {
        let line = line.map_err(|e| Failure::input(format!("stdin: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TextRecord = serde_json::from_str(&line)
            .map_err(|e| Failure::input(format!("stdin line {}: {e}", n + 1)))?;
        let json = match gt_path(&a.gt_dir, &rec.id).filter(|p| p.is_file()) {
            None => serde_json::to_string(&ErrorLine {
                id: &rec.id,
                error: "unknown-id",
            }),
            Some(path) => {
                let gt = load_png_mask(&path)?;
                match total_reward(&rec.text, &gt, gt.size(), &cfg) {
                    Ok(breakdown) => serde_json::to_string(&RewardLine {
                        id: &rec.id,
                        breakdown,
                    }),
                    Err(trajseg::Error::EmptyTarget) => serde_json::to_string(&ErrorLine {
                        id: &rec.id,
                        error: "empty-target",
                    }),
                    Err(e) => return Err(e.into()),
                }
            }
        };
        writeln!(
            out,
            "{}",
            json.map_err(|e| Failure::Internal(e.to_string()))?
        )?;
        out.flush()?;
    }
    Ok(())
}

fn convert(a: ConvertArgs) -> CliResult {
    let tasks = if a.tasks.is_empty() {
        TaskKind::ALL.to_vec()
    } else {
        a.tasks
            .iter()
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|e: trajseg::Error| Failure::usage(e))
            })
            .collect::<CliResult<Vec<TaskKind>>>()?
    };
    let templates = match &a.templates {
        Some(p) => TemplateSet::parse(&read_text_file(p)?).map_err(Failure::usage)?,
        None => TemplateSet::builtin(),
    };
    let opts = PairOptions {
        tol: tolerance(a.epsilon)?,
        decimals: a.decimals,
        seed: a.seed,
    };
    let instances = GtSource::open(&a.source)?.load_all()?;
    let batches: Vec<PairBatch> = try_map_ordered(&instances, a.jobs.jobs as usize, |inst| {
        generate_pairs(inst, &tasks, &templates, &opts)
    })?;
    let mut out = sink(a.out.as_deref())?;
    let mut skipped = 0usize;
    for b in &batches {
        for p in &b.pairs {
            writeln!(out, "{}", p.to_json_line())?;
        }
        for s in &b.skipped {
            eprintln!("skipped {} {}: {}", s.id, s.task, s.reason);
        }
        skipped += b.skipped.len();
    }
    out.flush()?;
    if skipped > 0 {
        eprintln!("{skipped} task(s) skipped");
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult {
    let gts = GtSource::open(&a.source)?.load_all()?;
    let mut preds = Vec::new();
    for (n, line) in open_lines(&a.preds)?.enumerate() {
        let line = line.map_err(|e| Failure::input(format!("{}: {e}", a.preds.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord = serde_json::from_str(&line)
            .map_err(|e| Failure::input(format!("{} line {}: {e}", a.preds.display(), n + 1)))?;
        preds.push(rec);
    }
    let cfg = EvalConfig {
        acc_iou_threshold: a.acc_threshold,
        jobs: a.jobs.jobs as usize,
    };
    let report = evaluate(&preds, &gts, &cfg)?;
    if report.unmatched_predictions > 0 {
        eprintln!(
            "{} prediction(s) had no ground truth",
            report.unmatched_predictions
        );
    }
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "{}", report.to_json())?;
    out.flush()?;
    Ok(())
}

fn sweep(a: SweepArgs) -> CliResult {
    let gts = match (a.synthetic, &a.coco, &a.gt_dir) {
        (Some(n), _, _) => synthetic_instances(n, ImageSize::new(a.size, a.size)?, a.seed),
        (None, coco, dir) if coco.is_some() || dir.is_some() => GtSource::open(&GtSourceArgs {
            coco: coco.clone(),
            gt_dir: dir.clone(),
        })?
        .load_all()?,
        _ => {
            return Err(Failure::usage(
                "one of --coco, --gt-dir or --synthetic is required",
            ))
        }
    };
    let report = epsilon_sweep(&gts, &a.epsilons, a.decimals, a.jobs.jobs as usize)?;
    if report.n_skipped > 0 {
        eprintln!("{} empty mask(s) skipped", report.n_skipped);
    }
    let mut out = sink(a.out.as_deref())?;
    out.write_all(report.to_csv().as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Default group: an exact copy, a jitter ladder, and one of each
/// structural failure.
const DEFAULT_LADDER: [&str; 8] = [
    "jitter=0",
    "jitter=0.005",
    "jitter=0.01",
    "jitter=0.02",
    "dropout=0.3",
    "shuffle",
    "truncate=0.5",
    "corrupt",
];

/// Per-member seed, stable across platforms.
fn member_seed(seed: u64, id: &str, k: usize) -> u64 {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    // splitmix64 finalizer
    let mut z = seed ^ h ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn simulate(a: SimulateArgs) -> CliResult {
    let cfg = load_config(a.config.as_deref())?;
    let tol = tolerance(a.epsilon)?;
    let kinds: Vec<PerturbKind> = if a.perturb.is_empty() {
        DEFAULT_LADDER
            .iter()
            .cycle()
            .take(cfg.group_size)
            .map(|s| s.parse().unwrap())
            .collect()
    } else {
        a.perturb
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e: trajseg::Error| Failure::usage(format!("--perturb {s}: {e}")))
            })
            .collect::<CliResult<_>>()?
    };
    if kinds.len() != cfg.group_size {
        return Err(Failure::usage(format!(
            "{} --perturb values given for group_size {}",
            kinds.len(),
            cfg.group_size
        )));
    }
    let source = GtSource::open(&a.source)?;
    let mut out = io::stdout().lock();
    for i in 0..source.len() {
        let inst = source.load(i)?;
        let specs: Vec<PerturbSpec> = kinds
            .iter()
            .enumerate()
            .map(|(k, &kind)| PerturbSpec::new(kind, member_seed(a.seed, &inst.id, k)))
            .collect();
        match gen_group(&inst, &specs, &cfg, tol) {
            Ok(group) => {
                let line =
                    serde_json::to_string(&group).map_err(|e| Failure::Internal(e.to_string()))?;
                writeln!(out, "{line}")?;
                out.flush()?;
            }
            Err(trajseg::Error::EmptyTarget) => eprintln!("skipped {}: empty mask", inst.id),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn render_cmd(a: RenderArgs) -> CliResult {
    let tol = tolerance(a.epsilon)?;
    let base = match &a.image {
        Some(p) => Some(
            image::open(p)
                .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?
                .to_rgb8(),
        ),
        None => None,
    };
    let (mask, contours) = if let Some(p) = &a.mask {
        let mask = load_png_mask(p)?;
        let contours = trace_contours(&mask).simplified(tol);
        (mask, contours)
    } else {
        let text = text_arg(a.text.as_deref().unwrap_or("-"))?;
        let size = match (&base, a.width, a.height) {
            (_, Some(w), Some(h)) => ImageSize::new(w, h)?,
            (Some(img), _, _) => ImageSize::new(img.width(), img.height())?,
            _ => return Err(Failure::usage("--text needs --image or --width/--height")),
        };
        let rings = parse_mask_rings(&text, size)
            .map_err(|e| Failure::input(format!("parse error: {e}")))?;
        (rasterize(&rings, size), rings)
    };
    let mut canvas = match base {
        Some(img) => {
            if (img.width(), img.height()) != (mask.width(), mask.height()) {
                return Err(trajseg::Error::SizeMismatch {
                    left_w: img.width(),
                    left_h: img.height(),
                    right_w: mask.width(),
                    right_h: mask.height(),
                }
                .into());
            }
            img
        }
        None => image::RgbImage::new(mask.width(), mask.height()),
    };
    render::overlay(&mut canvas, &mask, &contours);
    canvas
        .save_with_format(&a.out, image::ImageFormat::Png)
        .map_err(|e| Failure::Internal(format!("{}: {e}", a.out.display())))
}
