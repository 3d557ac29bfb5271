//! Client for a remote sentence encoder.
//!
//! Protocol: `POST <endpoint>` with a `text/plain` body holding one text per
//! line; the response body holds one line of space-separated floats per input
//! line, in the same order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use super::{EmbeddingVector, Result, SemanticsError};
use crate::textsim::NormalizedText;

const MAX_RESPONSE_BYTES: u64 = 512 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
    pub batch_size: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(30),
            retries: 2,
            batch_size: 64,
        }
    }
}

pub struct RemoteEncoder {
    config: RemoteConfig,
    agent: ureq::Agent,
    cache: Mutex<Cache>,
}

#[derive(Default)]
struct Cache {
    dim: Option<usize>,
    vectors: HashMap<NormalizedText, Arc<EmbeddingVector>>,
}

impl std::fmt::Debug for RemoteEncoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteEncoder")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl RemoteEncoder {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            config,
            agent,
            cache: Mutex::new(Cache::default()),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.config.endpoint
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").vectors.len()
    }

    pub fn embed(&self, text: &NormalizedText) -> Result<Arc<EmbeddingVector>> {
        if text.is_empty() {
            return Err(SemanticsError::EmptyText);
        }
        if let Some(v) = self.cache.lock().expect("cache lock").vectors.get(text) {
            return Ok(v.clone());
        }
        self.fetch(&[text])?;
        self.cache
            .lock()
            .expect("cache lock")
            .vectors
            .get(text)
            .cloned()
            .ok_or_else(|| SemanticsError::Miss {
                text: text.to_string(),
            })
    }

    /// Fetches every uncached text, `batch_size` texts per request, and
    /// returns the vectors in input order.
    pub fn fetch(&self, texts: &[&NormalizedText]) -> Result<Vec<Arc<EmbeddingVector>>> {
        let missing: Vec<&NormalizedText> = {
            let cache = self.cache.lock().expect("cache lock");
            let mut seen = std::collections::HashSet::new();
            texts
                .iter()
                .copied()
                .filter(|t| !cache.vectors.contains_key(*t) && seen.insert(*t))
                .collect()
        };
        if missing.iter().any(|t| t.is_empty()) {
            return Err(SemanticsError::EmptyText);
        }
        for batch in missing.chunks(self.config.batch_size.max(1)) {
            let vectors = self.request_with_retries(batch)?;
            let mut cache = self.cache.lock().expect("cache lock");
            for (text, vector) in batch.iter().zip(vectors) {
                match cache.dim {
                    Some(dim) if dim != vector.dim() => {
                        return Err(SemanticsError::DimensionMismatch {
                            left: dim,
                            right: vector.dim(),
                        })
                    }
                    Some(_) => {}
                    None => cache.dim = Some(vector.dim()),
                }
                cache.vectors.insert((*text).clone(), Arc::new(vector));
            }
        }
        let cache = self.cache.lock().expect("cache lock");
        texts
            .iter()
            .map(|t| {
                cache.vectors.get(*t).cloned().ok_or_else(|| SemanticsError::Miss {
                    text: t.to_string(),
                })
            })
            .collect()
    }

    fn request_with_retries(&self, batch: &[&NormalizedText]) -> Result<Vec<EmbeddingVector>> {
        let mut attempt = 0;
        loop {
            match self.request(batch) {
                Ok(vectors) => return Ok(vectors),
                Err(err) if attempt < self.config.retries && is_retriable(&err) => {
                    attempt += 1;
                    log::warn!("remote encoder attempt {attempt} failed: {err}; retrying");
                    std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
                }
                Err(err) => return Err(err),
            }
        }
    }

    fn request(&self, batch: &[&NormalizedText]) -> Result<Vec<EmbeddingVector>> {
        let mut body = String::new();
        for text in batch {
            body.push_str(text);
            body.push('\n');
        }
        let mut response = self
            .agent
            .post(&self.config.endpoint)
            .header("Content-Type", "text/plain; charset=utf-8")
            .send(body.as_str())
            .map_err(|e| SemanticsError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(SemanticsError::RemoteStatus {
                status,
                retriable: status == 429 || status >= 500,
            });
        }
        let text = response
            .body_mut()
            .with_config()
            .limit(MAX_RESPONSE_BYTES)
            .read_to_string()
            .map_err(|e| SemanticsError::Transport(e.to_string()))?;
        parse_response(&text, batch.len())
    }
}

fn is_retriable(err: &SemanticsError) -> bool {
    match err {
        SemanticsError::Transport(_) => true,
        SemanticsError::RemoteStatus { retriable, .. } => *retriable,
        _ => false,
    }
}

fn parse_response(body: &str, expected: usize) -> Result<Vec<EmbeddingVector>> {
    let lines: Vec<&str> = body.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != expected {
        return Err(SemanticsError::BadResponse(format!(
            "expected {expected} vectors, got {}",
            lines.len()
        )));
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let values = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| SemanticsError::BadResponse(format!("line {}: {e}", i + 1)))?;
            EmbeddingVector::new(values)
                .map_err(|e| SemanticsError::BadResponse(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_parsing() {
        let vs = parse_response("1 0\n0.5 0.5\n", 2).unwrap();
        assert_eq!(vs[1].values(), &[0.5, 0.5]);
        assert!(matches!(parse_response("1 0\n", 2), Err(SemanticsError::BadResponse(_))));
        assert!(matches!(parse_response("1 x\n", 1), Err(SemanticsError::BadResponse(_))));
    }

    #[test]
    fn unreachable_endpoint_is_transport_error() {
        let mut config = RemoteConfig::new("http://127.0.0.1:9/encode");
        config.retries = 0;
        config.timeout = Duration::from_secs(2);
        let encoder = RemoteEncoder::new(config);
        let err = encoder.embed(&NormalizedText::new("hola")).unwrap_err();
        assert!(matches!(err, SemanticsError::Transport(_)), "{err}");
    }
}
