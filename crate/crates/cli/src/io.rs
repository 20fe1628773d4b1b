use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use trajseg::dataset::{load_coco, load_png_mask, Instance};

use crate::args::GtSourceArgs;
use crate::failure::{CliResult, Failure};

/// Ground truth either parsed up front (COCO) or as a list of PNG paths
/// read one at a time.
pub enum GtSource {
    Coco(Vec<Instance>),
    Dir(Vec<(String, PathBuf)>),
}

impl GtSource {
    pub fn open(args: &GtSourceArgs) -> CliResult<Self> {
        match (&args.coco, &args.gt_dir) {
            (Some(p), _) => Ok(GtSource::Coco(load_coco(p)?)),
            (None, Some(d)) => Ok(GtSource::Dir(list_png_dir(d)?)),
            (None, None) => Err(Failure::usage("one of --coco or --gt-dir is required")),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GtSource::Coco(v) => v.len(),
            GtSource::Dir(v) => v.len(),
        }
    }

    pub fn load(&self, i: usize) -> CliResult<Instance> {
        match self {
            GtSource::Coco(v) => Ok(v[i].clone()),
            GtSource::Dir(v) => {
                let (id, path) = &v[i];
                let mask = load_png_mask(path)?;
                Ok(Instance::from_mask(
                    id.clone(),
                    path.display().to_string(),
                    &mask,
                ))
            }
        }
    }

    pub fn load_all(&self) -> CliResult<Vec<Instance>> {
        match self {
            GtSource::Coco(v) => Ok(v.clone()),
            GtSource::Dir(_) => (0..self.len()).map(|i| self.load(i)).collect(),
        }
    }
}

/// `*.png` files of a directory sorted by name; the id is the file stem.
pub fn list_png_dir(dir: &Path) -> CliResult<Vec<(String, PathBuf)>> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push((stem.to_string(), path.clone()));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Path of the GT mask for `id`, or `None` if the id cannot name a file
/// inside `dir`.
pub fn gt_path(dir: &Path, id: &str) -> Option<PathBuf> {
    let plain = !id.is_empty() && id != "." && id != ".." && !id.contains(['/', '\\', '\0']);
    plain.then(|| dir.join(format!("{id}.png")))
}

/// Literal text, or all of stdin for `-`.
pub fn text_arg(arg: &str) -> CliResult<String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        // a trailing newline from `echo` is not part of the text
        let trimmed = s.trim_end_matches(['\n', '\r']).len();
        s.truncate(trimmed);
        Ok(s)
    } else {
        Ok(arg.to_string())
    }
}

pub fn read_text_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn open_lines(path: &Path) -> CliResult<impl Iterator<Item = io::Result<String>>> {
    let f = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(f).lines())
}

/// Stdout or a file.
pub fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Failure::Internal(format!("{}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
