use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{
    evaluate, load_dataset, AnnotatedDataset, Correlation, EvalError, EvalReport, PipelineConfig,
    ReportEntry, Result, Split,
};
use crate::metrics::{
    extract_batch, format_scores, trained_score, train_on_features, Approach, Scorer, TrainingExample,
};
use crate::mlcore::{save_model, FeatureVector, ScoreModel};
use crate::semantics::EmbeddingProvider;

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: EvalReport,
    /// Human-readable correlation table.
    pub table: String,
    /// Every file written, relative to the output directory, in write order.
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct LanguageData {
    name: String,
    sets: Vec<(Split, AnnotatedDataset)>,
}

struct Staging {
    dir: tempfile::TempDir,
    written: Vec<PathBuf>,
}

impl Staging {
    fn path(&self, rel: &Path) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn prepare(&mut self, rel: PathBuf) -> Result<PathBuf> {
        let full = self.path(&rel);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent).map_err(|source| EvalError::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
        self.written.push(rel);
        Ok(full)
    }

    fn write(&mut self, rel: PathBuf, content: &str) -> Result<()> {
        let full = self.prepare(rel)?;
        std::fs::write(&full, content).map_err(|source| EvalError::Io {
            path: full.display().to_string(),
            source,
        })
    }

    fn commit(self, out: &Path) -> Result<Vec<PathBuf>> {
        for rel in &self.written {
            let target = out.join(rel);
            let io = |source| EvalError::Io {
                path: target.display().to_string(),
                source,
            };
            if let Some(parent) = target.parent() {
                std::fs::create_dir_all(parent).map_err(io)?;
            }
            std::fs::rename(self.path(rel), &target).map_err(io)?;
        }
        Ok(self.written)
    }
}

/// Runs every configured approach and baseline over every language and
/// split, then correlates the scores with the human annotations.
///
/// Outputs land in `output_dir` only once all stages have succeeded:
/// `scores/<lang>.<split>.<system>.tsv`, `models/<lang>.approach<k>.json`,
/// `report.tsv` and `report.txt`. On failure nothing is left behind.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome> {
    let mut warnings = Vec::new();
    let mut languages = Vec::new();
    for lang in &config.languages {
        let mut sets = Vec::new();
        let splits = [(Split::Dev, Some(&lang.dev)), (Split::Test, lang.test.as_ref())];
        for (split, path) in splits {
            let Some(path) = path else { continue };
            let data = load_dataset(&config.resolve(path), &lang.name, Some(split))
                .map_err(|e| e.in_stage(format!("load {} {split}", lang.name)))?;
            warnings.extend(data.warnings.iter().cloned());
            sets.push((split, data));
        }
        languages.push(LanguageData {
            name: lang.name.clone(),
            sets,
        });
    }
    let provider = config
        .provider
        .build(&config.base_dir)
        .map_err(|e| e.in_stage("build embedding provider"))?;

    let out = config.resolve(&config.output_dir);
    let created = !out.exists();
    std::fs::create_dir_all(&out).map_err(|source| EvalError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let result = run_stages(config, &languages, &provider, &out, &mut warnings);
    match result {
        Ok((staging, report)) => {
            let outputs = staging.commit(&out).map_err(|e| e.in_stage("write outputs"))?;
            Ok(PipelineOutcome {
                table: report.render_table(),
                report,
                outputs,
                warnings,
            })
        }
        Err(e) => {
            if created {
                let _ = std::fs::remove_dir_all(&out);
            }
            Err(e)
        }
    }
}

fn run_stages(
    config: &PipelineConfig,
    languages: &[LanguageData],
    provider: &EmbeddingProvider,
    out: &Path,
    warnings: &mut Vec<String>,
) -> Result<(Staging, EvalReport)> {
    let dir = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(out)
        .map_err(|source| EvalError::Io {
            path: out.display().to_string(),
            source,
        })?;
    let mut staging = Staging {
        dir,
        written: Vec::new(),
    };
    let mut report = EvalReport::default();

    provider
        .prefetch(
            languages
                .iter()
                .flat_map(|l| &l.sets)
                .flat_map(|(_, d)| &d.rows)
                .flat_map(|r| [&r.reference, &r.hypothesis]),
        )
        .map_err(|e| EvalError::from(e).in_stage("fetch embeddings"))?;

    let mut features: HashMap<(usize, Split), Vec<FeatureVector>> = HashMap::new();
    let mut pooled_model: HashMap<Approach, ScoreModel> = HashMap::new();

    for &approach in &config.approaches {
        let label = format!("Approach {approach}");
        if !approach.is_trained() {
            let mut scorer = Scorer::fixed(approach)?;
            if let (Scorer::Fixed { weights, .. }, Some(w)) = (&mut scorer, config.weights.get(approach)) {
                *weights = w;
            }
            for lang in languages {
                for (split, data) in &lang.sets {
                    let stage = format!("approach {approach} score {} {split}", lang.name);
                    let scores = scorer
                        .score_batch(&data.pairs(), provider)
                        .map_err(|e| EvalError::from(e).in_stage(&stage))?;
                    let name = format!("approach{approach}");
                    emit(config, &mut staging, &mut report, warnings, (lang, *split, data), &name, &label, &scores)?;
                }
            }
            continue;
        }

        if config.pooled {
            let stage = format!("approach {approach} train pooled");
            let model = train(config, approach, languages, None, provider, &mut features)
                .map_err(|e| e.in_stage(&stage))?;
            let rel = PathBuf::from(format!("models/pooled.approach{approach}.json"));
            let path = staging.prepare(rel)?;
            save_model(&model, &path).map_err(|e| EvalError::from(e).in_stage(&stage))?;
            pooled_model.insert(approach, model);
        }
        for (li, lang) in languages.iter().enumerate() {
            let model = match pooled_model.get(&approach) {
                Some(m) => m.clone(),
                None => {
                    let stage = format!("approach {approach} train {}", lang.name);
                    let model = train(config, approach, languages, Some(li), provider, &mut features)
                        .map_err(|e| e.in_stage(&stage))?;
                    let rel = PathBuf::from(format!("models/{}.approach{approach}.json", lang.name));
                    let path = staging.prepare(rel)?;
                    save_model(&model, &path).map_err(|e| EvalError::from(e).in_stage(&stage))?;
                    model
                }
            };
            for (split, data) in &lang.sets {
                let stage = format!("approach {approach} score {} {split}", lang.name);
                let x = features_for(&mut features, li, *split, data, provider).map_err(|e| e.in_stage(&stage))?;
                let scores: Vec<f64> = data
                    .rows
                    .iter()
                    .zip(x)
                    .map(|(row, x)| trained_score(&model, &row.reference, &row.hypothesis, x))
                    .collect();
                let name = format!("approach{approach}");
                emit(config, &mut staging, &mut report, warnings, (lang, *split, data), &name, &label, &scores)?;
            }
        }
    }

    for &baseline in &config.baselines {
        for lang in languages {
            for (split, data) in &lang.sets {
                let scores = baseline.score_batch(&data.pairs());
                emit(config, &mut staging, &mut report, warnings, (lang, *split, data), baseline.tag(), baseline.name(), &scores)?;
            }
        }
    }

    staging.write(PathBuf::from("report.tsv"), &report.to_tsv())?;
    staging.write(PathBuf::from("report.txt"), &report.render_table())?;
    Ok((staging, report))
}

fn features_for<'a>(
    cache: &'a mut HashMap<(usize, Split), Vec<FeatureVector>>,
    language: usize,
    split: Split,
    data: &AnnotatedDataset,
    provider: &EmbeddingProvider,
) -> Result<&'a [FeatureVector]> {
    match cache.entry((language, split)) {
        Entry::Occupied(e) => Ok(e.into_mut()),
        // approaches 4 to 6 share one phonetic scheme
        Entry::Vacant(e) => Ok(e.insert(extract_batch(&data.pairs(), provider, Approach::LinearPair.scheme())?)),
    }
}

/// Trains on one language's dev set, or on all of them when `only` is `None`.
fn train(
    config: &PipelineConfig,
    approach: Approach,
    languages: &[LanguageData],
    only: Option<usize>,
    provider: &EmbeddingProvider,
    cache: &mut HashMap<(usize, Split), Vec<FeatureVector>>,
) -> Result<ScoreModel> {
    let mut examples = Vec::new();
    for (li, lang) in languages.iter().enumerate() {
        if only.is_some_and(|o| o != li) {
            continue;
        }
        let Some((_, dev)) = lang.sets.iter().find(|(s, _)| *s == Split::Dev) else {
            continue;
        };
        let (sem, flu) = dev.training_targets()?;
        let x = features_for(cache, li, Split::Dev, dev, provider)?;
        examples.extend(x.iter().zip(sem.iter().zip(&flu)).map(|(f, (&semantic, &fluency))| TrainingExample {
            features: *f,
            semantic,
            fluency,
        }));
    }
    let language = only.map_or("pooled", |li| languages[li].name.as_str());
    Ok(train_on_features(
        approach,
        &examples,
        &config.training,
        language,
        &provider.source_tag(),
    )?)
}

/// Writes one score file and adds its correlations to the report.
#[allow(clippy::too_many_arguments)]
fn emit(
    config: &PipelineConfig,
    staging: &mut Staging,
    report: &mut EvalReport,
    warnings: &mut Vec<String>,
    (lang, split, data): (&LanguageData, Split, &AnnotatedDataset),
    file_tag: &str,
    label: &str,
    scores: &[f64],
) -> Result<()> {
    let rel = PathBuf::from(format!("scores/{}.{split}.{file_tag}.tsv", lang.name));
    staging.write(rel, &format_scores(data.ids().zip(scores.iter().copied())))?;

    let has_overall = data.has_overall();
    for &dim in &config.dimensions {
        let predictions: Vec<(String, f64)> = data
            .rows
            .iter()
            .zip(scores)
            .filter(|(row, _)| dim.human(row, has_overall).is_some())
            .map(|(row, &s)| (row.id.clone(), s))
            .collect();
        if predictions.is_empty() {
            continue;
        }
        if predictions.len() < data.len() {
            warnings.push(format!(
                "{} {split}: {} of {} segments lack a {dim} annotation and are not correlated",
                lang.name,
                data.len() - predictions.len(),
                data.len()
            ));
        }
        let n = predictions.len();
        let corr: Option<Correlation> = match evaluate(&predictions, data, dim) {
            Ok(c) => Some(c),
            Err(EvalError::Correlation(e)) => {
                warnings.push(format!("{label} on {} {split} ({dim}): {e}", lang.name));
                None
            }
            Err(e) => return Err(e.in_stage(format!("evaluate {label} {} {split}", lang.name))),
        };
        report.push(ReportEntry::new(split, &lang.name, label, dim, corr, n));
    }
    Ok(())
}
