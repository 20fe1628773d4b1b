//! Model-free rollouts: seeded perturbations of a ground-truth polygon text,
//! scored and normalized like a sampled response group.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{trace_contours, SimplifyTolerance};
use crate::dataset::Instance;
use crate::error::{Error, Result};
use crate::grammar::{
    parse, serialize, NormCoord, NormPoint, ShapeKind, TargetText, DEFAULT_DECIMALS,
};
use crate::reward::{group_advantages, total_reward, RewardConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbKind {
    /// Gaussian noise with this std, in normalized units, on every coordinate.
    Jitter { sigma: f64 },
    /// Drops each vertex with probability `p`, keeping at least 3 per ring.
    VertexDropout { p: f64 },
    /// Repeats each vertex in place with probability `p`.
    DuplicateVertices { p: f64 },
    /// Random permutation of each ring's vertices.
    ShuffleOrder,
    /// Keeps the leading `fraction` of the characters.
    Truncate { fraction: f64 },
    /// Deletes one bracket.
    CorruptFormat,
}

impl PerturbKind {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PerturbKind::Jitter { sigma } => sigma.is_finite() && sigma >= 0.0,
            PerturbKind::VertexDropout { p } | PerturbKind::DuplicateVertices { p } => {
                (0.0..=1.0).contains(&p)
            }
            PerturbKind::Truncate { fraction } => fraction > 0.0 && fraction <= 1.0,
            PerturbKind::ShuffleOrder | PerturbKind::CorruptFormat => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid perturbation {self}")))
        }
    }

    /// True for kinds that always break the grammar.
    pub fn breaks_format(&self) -> bool {
        matches!(self, PerturbKind::CorruptFormat)
            || matches!(self, PerturbKind::Truncate { fraction } if *fraction < 1.0)
    }
}

impl fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbKind::Jitter { sigma } => write!(f, "jitter={sigma}"),
            PerturbKind::VertexDropout { p } => write!(f, "dropout={p}"),
            PerturbKind::DuplicateVertices { p } => write!(f, "duplicate={p}"),
            PerturbKind::ShuffleOrder => f.write_str("shuffle"),
            PerturbKind::Truncate { fraction } => write!(f, "truncate={fraction}"),
            PerturbKind::CorruptFormat => f.write_str("corrupt"),
        }
    }
}

/// Parses `jitter=0.02`, `dropout=0.3`, `duplicate=0.1`, `shuffle`,
/// `truncate=0.5` or `corrupt`.
impl FromStr for PerturbKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once('=') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = || -> Result<f64> {
            arg.ok_or_else(|| Error::Config(format!("`{name}` needs a value")))?
                .parse()
                .map_err(|_| Error::Config(format!("bad value in `{s}`")))
        };
        let k = match (name, arg.is_some()) {
            ("jitter", _) => PerturbKind::Jitter { sigma: num()? },
            ("dropout", _) => PerturbKind::VertexDropout { p: num()? },
            ("duplicate", _) => PerturbKind::DuplicateVertices { p: num()? },
            ("truncate", _) => PerturbKind::Truncate { fraction: num()? },
            ("shuffle", false) => PerturbKind::ShuffleOrder,
            ("corrupt", false) => PerturbKind::CorruptFormat,
            _ => return Err(Error::Config(format!("unknown perturbation `{s}`"))),
        };
        k.validate()?;
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbSpec {
    #[serde(flatten)]
    pub kind: PerturbKind,
    pub seed: u64,
}

impl PerturbSpec {
    pub fn new(kind: PerturbKind, seed: u64) -> Self {
        PerturbSpec { kind, seed }
    }
}

/// Standard normal draw via Box–Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn rings_of(t: TargetText) -> (Vec<Vec<NormPoint>>, bool) {
    match t {
        TargetText::Polygon(r) => (vec![r], false),
        TargetText::MultiPolygon(rs) => (rs, true),
        _ => unreachable!("parsed with ShapeKind::Mask"),
    }
}

fn rebuild(rings: Vec<Vec<NormPoint>>, multi: bool) -> TargetText {
    if multi {
        TargetText::MultiPolygon(rings)
    } else {
        TargetText::Polygon(rings.into_iter().next().expect("one ring"))
    }
}

/// Applies one seeded perturbation to polygon text.
pub fn perturb(gt_text: &str, spec: &PerturbSpec) -> Result<String> {
    spec.kind.validate()?;
    let parsed = parse(gt_text, Some(ShapeKind::Mask))
        .map_err(|e| Error::Domain(format!("ground-truth text does not parse: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut rings, multi) = rings_of(parsed);

    match spec.kind {
        PerturbKind::Jitter { sigma } => {
            let decimals = rings
                .iter()
                .flatten()
                .flat_map(|p| [p.x.scale(), p.y.scale()])
                .max()
                .unwrap_or(DEFAULT_DECIMALS)
                .clamp(1, crate::grammar::MAX_DECIMALS);
            let mut jitter = |c: NormCoord| {
                NormCoord::quantize(c.value() + sigma * gaussian(&mut rng), decimals)
            };
            for p in rings.iter_mut().flatten() {
                *p = NormPoint {
                    x: jitter(p.x)?,
                    y: jitter(p.y)?,
                };
            }
        }
        PerturbKind::VertexDropout { p } => {
            for ring in &mut rings {
                let draws: Vec<f64> = ring.iter().map(|_| rng.random::<f64>()).collect();
                let mut keep: Vec<bool> = draws.iter().map(|&d| d >= p).collect();
                if keep.iter().filter(|&&k| k).count() < 3 && ring.len() >= 3 {
                    let mut order: Vec<usize> = (0..ring.len()).collect();
                    order.sort_by(|&a, &b| draws[b].total_cmp(&draws[a]).then(a.cmp(&b)));
                    keep = vec![false; ring.len()];
                    for &i in &order[..3] {
                        keep[i] = true;
                    }
                }
                let mut i = 0;
                ring.retain(|_| {
                    i += 1;
                    keep[i - 1]
                });
            }
        }
        PerturbKind::DuplicateVertices { p } => {
            for ring in &mut rings {
                *ring = ring
                    .iter()
                    .flat_map(|&v| {
                        let n = if rng.random::<f64>() < p { 2 } else { 1 };
                        std::iter::repeat_n(v, n)
                    })
                    .collect();
            }
        }
        PerturbKind::ShuffleOrder => {
            for ring in &mut rings {
                ring.shuffle(&mut rng);
            }
        }
        PerturbKind::Truncate { fraction } => {
            let n = (gt_text.len() as f64 * fraction).floor() as usize;
            return Ok(gt_text[..n.min(gt_text.len())].to_string());
        }
        PerturbKind::CorruptFormat => {
            let brackets: Vec<usize> = gt_text
                .bytes()
                .enumerate()
                .filter(|(_, b)| matches!(b, b'[' | b']'))
                .map(|(i, _)| i)
                .collect();
            let at = brackets[rng.random_range(0..brackets.len())];
            let mut s = gt_text.to_string();
            s.remove(at);
            return Ok(s);
        }
    }
    Ok(rebuild(rings, multi).to_text())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    #[serde(rename = "id")]
    pub instance_id: String,
    pub responses: Vec<String>,
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
}

/// Perturbs the instance's ground-truth polygon once per spec, then scores
/// and normalizes the group.
pub fn gen_group(
    inst: &Instance,
    specs: &[PerturbSpec],
    cfg: &RewardConfig,
    tol: SimplifyTolerance,
) -> Result<RolloutGroup> {
    if specs.len() != cfg.group_size {
        return Err(Error::Config(format!(
            "group needs {} specs, got {}",
            cfg.group_size,
            specs.len()
        )));
    }
    let mask = inst.materialize()?;
    if mask.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let gt_text = serialize(
        &trace_contours(&mask).simplified(tol),
        mask.size(),
        DEFAULT_DECIMALS,
    )?;
    let responses = specs
        .iter()
        .map(|s| perturb(&gt_text, s))
        .collect::<Result<Vec<_>>>()?;
    let rewards = responses
        .iter()
        .map(|r| total_reward(r, &mask, mask.size(), cfg).map(|b| b.total))
        .collect::<Result<Vec<_>>>()?;
    let advantages = group_advantages(&rewards)?;
    Ok(RolloutGroup {
        instance_id: inst.id.clone(),
        responses,
        rewards,
        advantages,
    })
}
