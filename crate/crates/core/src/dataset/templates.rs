use std::collections::BTreeMap;
use std::path::Path;

use super::TaskKind;
use crate::error::{Error, Result};

pub(crate) const PLACEHOLDER: &str = "{target}";

/// Prompt templates grouped by task kind.
///
/// File format: UTF-8 lines; `[point->mask]` opens a section, every other
/// non-blank line is one template for the current section and must contain
/// `{target}`. Lines starting with `#` are comments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateSet {
    by_task: BTreeMap<TaskKind, Vec<String>>,
}

const BUILTIN: &str = "\
[text->point]
Point to {target}. Answer with [x, y].
Where is {target}? Give one point inside it.
[text->bbox]
What is the bounding box of {target}?
Give the box of {target} as [x1, y1, x2, y2].
[text->mask]
Give the polygon of {target}.
Outline {target} with a polygon.
[point->bbox]
What is the bounding box of the object at {target}?
[point->mask]
Give the polygon of the object at {target}.
Segment the object containing the point {target}.
[bbox->point]
Give a point on the object inside the box {target}.
[bbox->mask]
Give the polygon of the object in the box {target}.
[mask->point]
Give a point on the object outlined by {target}.
[mask->bbox]
What is the bounding box of the region {target}?
";

impl TemplateSet {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin templates are valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut set = TemplateSet::default();
        let mut current: Option<TaskKind> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::Config(format!("templates line {}: {m}", i + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let task: TaskKind = name
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("unknown task `{name}`")))?;
                set.by_task.entry(task).or_default();
                current = Some(task);
                continue;
            }
            let task = current.ok_or_else(|| err("template before any [task] header".into()))?;
            if !line.contains(PLACEHOLDER) {
                return Err(err(format!("template lacks {PLACEHOLDER}")));
            }
            set.by_task.entry(task).or_default().push(line.to_string());
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, task: TaskKind) -> &[String] {
        self.by_task.get(&task).map_or(&[], Vec::as_slice)
    }
}
