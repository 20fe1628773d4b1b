//! COCO run-length encoding.
//!
//! Runs scan the mask column-major (index = x·height + y) and alternate
//! background/foreground, starting with background. The compressed string
//! form packs each count into 6-bit chars offset by 48: 5 payload bits per
//! char, 0x20 marks continuation, 0x10 in the last char is the sign bit.
//! Counts after the third are stored as deltas from the count two back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, ImageSize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RleCounts {
    Runs(Vec<u32>),
    Compressed(String),
}

fn rle_err(offset: usize, detail: impl Into<String>) -> Error {
    Error::Rle {
        offset,
        detail: detail.into(),
    }
}

/// Expands the compressed string form into run lengths.
pub fn decompress_counts(s: &str) -> Result<Vec<u32>> {
    let b = s.as_bytes();
    let mut counts: Vec<i64> = Vec::new();
    let mut p = 0;
    while p < b.len() {
        let start = p;
        let (mut x, mut k) = (0i64, 0u32);
        loop {
            let Some(&ch) = b.get(p) else {
                return Err(rle_err(p, "count ends inside a continuation"));
            };
            if !(48..48 + 64).contains(&ch) {
                return Err(rle_err(
                    p,
                    format!("byte 0x{ch:02x} outside the RLE alphabet"),
                ));
            }
            if k >= 12 {
                return Err(rle_err(start, "count too long"));
            }
            let c = (ch - 48) as i64;
            x |= (c & 0x1f) << (5 * k);
            p += 1;
            k += 1;
            if c & 0x20 == 0 {
                if c & 0x10 != 0 {
                    x |= -1i64 << (5 * k);
                }
                break;
            }
        }
        let m = counts.len();
        if m > 2 {
            x += counts[m - 2];
        }
        if !(0..=u32::MAX as i64).contains(&x) {
            return Err(rle_err(start, format!("run length {x} out of range")));
        }
        counts.push(x);
    }
    Ok(counts.into_iter().map(|c| c as u32).collect())
}

/// Packs run lengths into the compressed string form.
pub fn compress_counts(counts: &[u32]) -> String {
    let mut out = String::new();
    for (i, &c) in counts.iter().enumerate() {
        let mut x = c as i64;
        if i > 2 {
            x -= counts[i - 2] as i64;
        }
        loop {
            let mut ch = x & 0x1f;
            x >>= 5;
            let more = if ch & 0x10 != 0 { x != -1 } else { x != 0 };
            if more {
                ch |= 0x20;
            }
            out.push((ch as u8 + 48) as char);
            if !more {
                break;
            }
        }
    }
    out
}

impl RleCounts {
    pub fn runs(&self) -> Result<Vec<u32>> {
        match self {
            RleCounts::Runs(r) => Ok(r.clone()),
            RleCounts::Compressed(s) => decompress_counts(s),
        }
    }
}

pub fn decode_rle(r: &RleCounts, size: ImageSize) -> Result<BinaryMask> {
    let runs = r.runs()?;
    let (w, h) = (size.width as usize, size.height as usize);
    let total = w * h;
    let mut bits = vec![false; total];
    let mut pos = 0usize;
    for (i, &run) in runs.iter().enumerate() {
        let end = pos + run as usize;
        if end > total {
            return Err(rle_err(i, format!("runs exceed {total} pixels")));
        }
        if i % 2 == 1 {
            for idx in pos..end {
                // column-major index -> row-major
                let (x, y) = (idx / h, idx % h);
                bits[y * w + x] = true;
            }
        }
        pos = end;
    }
    if pos != total {
        return Err(rle_err(
            runs.len(),
            format!("runs cover {pos} of {total} pixels"),
        ));
    }
    BinaryMask::from_bits(size, bits)
}

/// Canonical uncompressed runs: a leading background run (possibly 0), no
/// other zero-length runs.
pub fn encode_rle(mask: &BinaryMask) -> RleCounts {
    let (w, h) = (mask.width(), mask.height());
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u32;
    for x in 0..w {
        for y in 0..h {
            let v = mask.get(x, y);
            if v != current {
                runs.push(len);
                current = v;
                len = 0;
            }
            len += 1;
        }
    }
    runs.push(len);
    RleCounts::Runs(runs)
}
