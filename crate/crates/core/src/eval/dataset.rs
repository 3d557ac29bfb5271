use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EvalError, Result};
use crate::textsim::{normalize, NormalizedText};

pub const REQUIRED_COLUMNS: [&str; 6] = ["id", "source", "reference", "hypothesis", "semantic", "fluency"];
pub const OPTIONAL_COLUMNS: [&str; 1] = ["overall"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Dev,
    Test,
}

impl Split {
    /// Row count of the shared-task splits; other sizes load with a warning.
    pub fn expected_rows(self) -> usize {
        match self {
            Split::Dev => 100,
            Split::Test => 200,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedRow {
    pub id: String,
    pub source: String,
    pub reference: NormalizedText,
    pub hypothesis: NormalizedText,
    pub semantic: Option<f64>,
    pub fluency: Option<f64>,
    pub overall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDataset {
    pub language: String,
    pub rows: Vec<AnnotatedRow>,
    pub warnings: Vec<String>,
}

impl AnnotatedDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pairs(&self) -> Vec<(NormalizedText, NormalizedText)> {
        self.rows
            .iter()
            .map(|r| (r.reference.clone(), r.hypothesis.clone()))
            .collect()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|r| r.id.as_str())
    }

    pub fn has_overall(&self) -> bool {
        self.rows.iter().any(|r| r.overall.is_some())
    }

    /// Semantic and fluency targets, failing on the first unannotated row.
    pub fn training_targets(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut sem = Vec::with_capacity(self.rows.len());
        let mut flu = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            match (row.semantic, row.fluency) {
                (Some(s), Some(f)) => {
                    sem.push(s);
                    flu.push(f);
                }
                _ => {
                    return Err(EvalError::Data(format!(
                        "segment `{}` lacks a semantic or fluency score needed for training",
                        row.id
                    )))
                }
            }
        }
        Ok((sem, flu))
    }
}

fn parse_score(cell: &str) -> std::result::Result<Option<f64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("unparsable score `{cell}`")),
    }
}

/// Parses the annotated TSV format. Columns may come in any order; the
/// `overall` column is optional and empty score cells mean "not annotated".
pub fn parse_dataset(content: &str, origin: &str, language: &str, split: Option<Split>) -> Result<AnnotatedDataset> {
    let err = |line: usize, message: String| EvalError::Dataset {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut lines = content.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| err(1, "missing header row".into()))?;
    let header = header.strip_prefix('\u{feff}').unwrap_or(header);
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let position = |name: &str| columns.iter().position(|c| *c == name);
    let mut seen = HashSet::new();
    for c in &columns {
        if !REQUIRED_COLUMNS.contains(c) && !OPTIONAL_COLUMNS.contains(c) {
            return Err(err(1, format!("unknown column `{c}`")));
        }
        if !seen.insert(*c) {
            return Err(err(1, format!("duplicate column `{c}`")));
        }
    }
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = position(name).ok_or_else(|| err(1, format!("missing column `{name}`")))?;
    }
    let overall_idx = position("overall");

    let mut rows: Vec<AnnotatedRow> = Vec::new();
    let mut ids = HashSet::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != columns.len() {
            return Err(err(
                line_no,
                format!("expected {} tab-separated fields, found {}", columns.len(), cells.len()),
            ));
        }
        let id = cells[idx[0]].trim();
        if id.is_empty() {
            return Err(err(line_no, "empty segment id".into()));
        }
        if !ids.insert(id.to_owned()) {
            return Err(err(line_no, format!("duplicate segment id `{id}`")));
        }
        let score = |i: usize| parse_score(cells[i]).map_err(|m| err(line_no, m));
        rows.push(AnnotatedRow {
            id: id.to_owned(),
            source: cells[idx[1]].to_owned(),
            reference: normalize(cells[idx[2]]),
            hypothesis: normalize(cells[idx[3]]),
            semantic: score(idx[4])?,
            fluency: score(idx[5])?,
            overall: overall_idx.map(score).transpose()?.flatten(),
        });
    }

    let mut warnings = Vec::new();
    if let Some(split) = split {
        if rows.len() != split.expected_rows() {
            let w = format!(
                "{origin}: {} {split} rows, expected {}",
                rows.len(),
                split.expected_rows()
            );
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    Ok(AnnotatedDataset {
        language: language.to_owned(),
        rows,
        warnings,
    })
}

pub fn load_dataset(path: &Path, language: &str, split: Option<Split>) -> Result<AnnotatedDataset> {
    let content = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&content, &path.display().to_string(), language, split)
}

/// Renders a dataset back into the TSV format (with `overall` only when any
/// row carries it).
pub fn dataset_to_tsv(data: &AnnotatedDataset) -> String {
    let with_overall = data.has_overall();
    let mut out = REQUIRED_COLUMNS.join("\t");
    if with_overall {
        out.push_str("\toverall");
    }
    out.push('\n');
    let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in &data.rows {
        let mut fields = vec![
            r.id.clone(),
            r.source.clone(),
            r.reference.to_string(),
            r.hypothesis.to_string(),
            cell(r.semantic),
            cell(r.fluency),
        ];
        if with_overall {
            fields.push(cell(r.overall));
        }
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}
