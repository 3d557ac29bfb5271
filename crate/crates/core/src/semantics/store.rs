//! Precomputed embedding store.
//!
//! File format (UTF-8):
//!
//! ```text
//! #dim=<d> source=<tag>
//! <normalized text>\t<d space-separated decimal floats>
//! ...
//! ```
//!
//! Records are keyed by exact normalized text. A completely empty file is an
//! empty store whose dimension is fixed by the first insert; `#dim=0` in a
//! header means the same thing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::{EmbeddingVector, Result, SemanticsError};
use crate::textsim::{normalize, NormalizedText};

#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dim: Option<usize>,
    source_tag: String,
    entries: BTreeMap<NormalizedText, Arc<EmbeddingVector>>,
}

impl EmbeddingStore {
    pub fn new(source_tag: impl Into<String>) -> Self {
        Self {
            dim: None,
            source_tag: source_tag.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, text: &NormalizedText) -> Option<&Arc<EmbeddingVector>> {
        self.entries.get(text)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NormalizedText, &EmbeddingVector)> {
        self.entries.iter().map(|(k, v)| (k, v.as_ref()))
    }

    /// Adds or replaces a vector; its dimension must match the store's.
    pub fn insert(&mut self, text: NormalizedText, vector: EmbeddingVector) -> Result<()> {
        match self.dim {
            Some(dim) if dim != vector.dim() => {
                return Err(SemanticsError::DimensionMismatch {
                    left: dim,
                    right: vector.dim(),
                })
            }
            Some(_) => {}
            None => self.dim = Some(vector.dim()),
        }
        self.entries.insert(text, Arc::new(vector));
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("#dim={} source={}\n", self.dim.unwrap_or(0), self.source_tag);
        for (text, vector) in &self.entries {
            out.push_str(text);
            out.push('\t');
            for (i, v) in vector.values().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").expect("write to String");
            }
            out.push('\n');
        }
        out
    }

    /// Writes the store through a temporary file renamed into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io_err = |source| SemanticsError::Io {
            path: path.to_path_buf(),
            source,
        };
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        tmp.write_all(self.to_file_string().as_bytes()).map_err(io_err)?;
        tmp.persist(path).map_err(|e| io_err(e.error))?;
        Ok(())
    }

    pub fn parse(content: &str, origin: &str) -> Result<Self> {
        let malformed = |line: usize, message: String| SemanticsError::Malformed {
            path: origin.to_owned(),
            line,
            message,
        };
        let mut lines = content.lines().enumerate().map(|(i, l)| (i + 1, l));
        let Some((_, header)) = lines.next() else {
            return Ok(Self::new(""));
        };
        let (dim, source_tag) = parse_header(header).map_err(|m| malformed(1, m))?;
        let mut store = Self::new(source_tag);
        store.dim = dim;
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (text, floats) = line
                .split_once('\t')
                .ok_or_else(|| malformed(lineno, "expected <text><TAB><floats>".into()))?;
            let key = normalize(text);
            if key.as_str() != text {
                return Err(malformed(lineno, format!("text {text:?} is not normalized")));
            }
            let values = floats
                .split(' ')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| malformed(lineno, format!("bad float: {e}")))?;
            let vector = EmbeddingVector::new(values).map_err(|e| malformed(lineno, e.to_string()))?;
            if store.entries.contains_key(&key) {
                return Err(malformed(lineno, format!("duplicate text {text:?}")));
            }
            store
                .insert(key, vector)
                .map_err(|e| malformed(lineno, e.to_string()))?;
        }
        Ok(store)
    }
}

fn parse_header(header: &str) -> std::result::Result<(Option<usize>, String), String> {
    let rest = header
        .strip_prefix("#dim=")
        .ok_or_else(|| format!("expected `#dim=<d> source=<tag>` header, got {header:?}"))?;
    let (dim, tag) = rest
        .split_once(" source=")
        .ok_or_else(|| "header is missing ` source=`".to_owned())?;
    let dim: usize = dim.parse().map_err(|e| format!("bad dim {dim:?}: {e}"))?;
    Ok(((dim > 0).then_some(dim), tag.to_owned()))
}

pub fn load_store(path: &Path) -> Result<EmbeddingStore> {
    let content = std::fs::read_to_string(path).map_err(|source| SemanticsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    EmbeddingStore::parse(&content, &path.display().to_string())
}
