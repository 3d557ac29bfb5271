use std::path::Path;
use std::time::Instant;

use fusemt::eval::synthetic::{split_dataset, synthetic_dataset, FluencyShape, SyntheticSpec};
use fusemt::eval::{
    dataset_to_tsv, evaluate, parse_dataset, run_pipeline, AnnotatedDataset, Dimension, EvalError, PipelineConfig,
};
use fusemt::metrics::{train_approach, Approach, Scorer, TrainParams};
use fusemt::semantics::EmbeddingProvider;
use proptest::prelude::*;

fn provider() -> EmbeddingProvider {
    EmbeddingProvider::hashed(512, 3).unwrap()
}

fn held_out_pearson(approach: Approach, dev: &AnnotatedDataset, test: &AnnotatedDataset, dim: Dimension) -> f64 {
    let p = provider();
    let (sem, flu) = dev.training_targets().unwrap();
    let model = train_approach(approach, &dev.pairs(), &sem, &flu, &p, &TrainParams::default(), "syn").unwrap();
    let scores = Scorer::Trained(model).score_batch(&test.pairs(), &p).unwrap();
    let preds: Vec<(String, f64)> = test.ids().map(str::to_owned).zip(scores).collect();
    evaluate(&preds, test, dim).unwrap().pearson
}

#[test]
fn synthetic_recovery() {
    let start = Instant::now();
    let p = provider();
    let linear = synthetic_dataset(&SyntheticSpec::default(), &p, "syn").unwrap();
    let (dev, test) = split_dataset(linear, 100);
    let a4 = held_out_pearson(Approach::LinearPair, &dev, &test, Dimension::Overall);
    println!("linear target: approach 4 held-out pearson {a4:.4}");
    assert!(a4 >= 0.99, "{a4}");

    let spec = SyntheticSpec {
        fluency: FluencyShape::Parabolic,
        ..SyntheticSpec::default()
    };
    let (dev, test) = split_dataset(synthetic_dataset(&spec, &p, "syn").unwrap(), 100);
    let a4 = held_out_pearson(Approach::LinearPair, &dev, &test, Dimension::Overall);
    let a5 = held_out_pearson(Approach::RidgeForest, &dev, &test, Dimension::Overall);
    let a6 = held_out_pearson(Approach::RidgeBoosting, &dev, &test, Dimension::Overall);
    println!("non-linear fluency: approach 4 {a4:.4}, approach 5 {a5:.4}, approach 6 {a6:.4}");
    assert!(a5 > a4);
    assert!(start.elapsed().as_secs() < 60);
}

fn write_language(dir: &Path, name: &str, seed: u64) {
    let spec = SyntheticSpec {
        seed,
        fluency: FluencyShape::Parabolic,
        ..SyntheticSpec::default()
    };
    let (dev, test) = split_dataset(synthetic_dataset(&spec, &provider(), name).unwrap(), 100);
    std::fs::write(dir.join(format!("{name}.dev.tsv")), dataset_to_tsv(&dev)).unwrap();
    std::fs::write(dir.join(format!("{name}.test.tsv")), dataset_to_tsv(&test)).unwrap();
}

fn config(dir: &Path, out: &str, body: &str) -> PipelineConfig {
    let text = format!(
        "output_dir = \"{out}\"\n{body}\n[provider]\nbackend = \"hashed\"\ndim = 512\n\n\
         [training.random_forest]\nn_trees = 30\n\n\
         [[languages]]\nname = \"alpha\"\ndev = \"alpha.dev.tsv\"\ntest = \"alpha.test.tsv\"\n\n\
         [[languages]]\nname = \"beta\"\ndev = \"beta.dev.tsv\"\ntest = \"beta.test.tsv\"\n"
    );
    let path = dir.join(format!("{out}.toml"));
    std::fs::write(&path, &text).unwrap();
    PipelineConfig::load(&path).unwrap()
}

fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn smoke_run_with_one_approach() {
    let dir = tempfile::tempdir().unwrap();
    write_language(dir.path(), "alpha", 1);
    write_language(dir.path(), "beta", 2);
    let cfg = config(dir.path(), "out", "approaches = [1]");
    let outcome = run_pipeline(&cfg).unwrap();
    let files: Vec<String> = snapshot(&dir.path().join("out")).into_iter().map(|f| f.0).collect();
    assert_eq!(
        files,
        [
            "report.tsv",
            "report.txt",
            "scores/alpha.dev.approach1.tsv",
            "scores/alpha.test.approach1.tsv",
            "scores/beta.dev.approach1.tsv",
            "scores/beta.test.approach1.tsv",
        ]
    );
    assert!(outcome.warnings.is_empty(), "{:?}", outcome.warnings);
    let scores = std::fs::read_to_string(dir.path().join("out/scores/alpha.test.approach1.tsv")).unwrap();
    assert_eq!(scores.lines().count(), 200);
    assert!(scores.lines().all(|l| l.split('\t').nth(1).unwrap().split('.').nth(1).unwrap().len() == 4));
    assert!(outcome.table.contains("Approach 1") && outcome.table.contains("Average"));
}

#[test]
fn full_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_language(dir.path(), "alpha", 1);
    write_language(dir.path(), "beta", 2);
    let body = "baselines = [\"bleu\", \"chrf\", \"chrfpp\"]\ndimensions = [\"semantic\", \"fluency\", \"overall\"]";
    let first = run_pipeline(&config(dir.path(), "run1", body)).unwrap();
    let second = run_pipeline(&config(dir.path(), "run2", body)).unwrap();
    let (a, b) = (snapshot(&dir.path().join("run1")), snapshot(&dir.path().join("run2")));
    assert_eq!(a.len(), 2 + 2 * 2 * 9 + 2 * 3);
    assert_eq!(a, b);
    assert_eq!(first.report, second.report);
    // rerunning into an existing directory overwrites with identical bytes
    run_pipeline(&config(dir.path(), "run1", body)).unwrap();
    assert_eq!(snapshot(&dir.path().join("run1")), b);
    assert!(first.outputs.iter().any(|p| p.ends_with("models/beta.approach6.json")));
}

#[test]
fn pooled_training_writes_one_model_per_approach() {
    let dir = tempfile::tempdir().unwrap();
    write_language(dir.path(), "alpha", 1);
    write_language(dir.path(), "beta", 2);
    let outcome = run_pipeline(&config(dir.path(), "pooled", "approaches = [4, 5]\npooled = true")).unwrap();
    let models: Vec<_> = outcome.outputs.iter().filter(|p| p.starts_with("models")).collect();
    assert_eq!(models.len(), 2);
    let model = fusemt::mlcore::load_model(&dir.path().join("pooled/models/pooled.approach5.json")).unwrap();
    assert_eq!(model.language, "pooled");
}

#[test]
fn missing_dataset_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write_language(dir.path(), "alpha", 1);
    let cfg = config(dir.path(), "out", "approaches = [1, 5]");
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(&err, EvalError::Stage { stage, .. } if stage == "load beta dev"), "{err}");
    assert_eq!(err.exit_code(), 2);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn training_failure_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    write_language(dir.path(), "alpha", 1);
    write_language(dir.path(), "beta", 2);
    // strip beta's fluency annotations so training cannot proceed
    let path = dir.path().join("beta.dev.tsv");
    let text = std::fs::read_to_string(&path).unwrap();
    let stripped: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let mut f: Vec<&str> = l.split('\t').collect();
            if i > 0 {
                f[5] = "";
            }
            f.join("\t") + "\n"
        })
        .collect();
    std::fs::write(&path, stripped).unwrap();
    let err = run_pipeline(&config(dir.path(), "out", "approaches = [1, 4]")).unwrap_err();
    assert!(err.to_string().starts_with("approach 4 train beta"), "{err}");
    assert!(!dir.path().join("out").exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evaluate_ignores_row_order(seed in any::<u64>(), shift in 0usize..40) {
        let text = {
            let mut t = String::from("id\tsource\treference\thypothesis\tsemantic\tfluency\n");
            for i in 0..40u64 {
                let v = (seed.wrapping_mul(i + 1) % 97) as f64;
                t.push_str(&format!("s{i}\tx\tr\th\t{v}\t{}\n", (i * 7 % 13) as f64));
            }
            t
        };
        let data = parse_dataset(&text, "d", "x", None).unwrap();
        let preds: Vec<(String, f64)> = data.rows.iter().enumerate()
            .map(|(i, r)| (r.id.clone(), ((i * 31) % 17) as f64 + 0.5 * i as f64))
            .collect();
        let mut rotated = preds.clone();
        rotated.rotate_left(shift);
        let mut shuffled_rows = data.clone();
        shuffled_rows.rows.reverse();
        for dim in [Dimension::Semantic, Dimension::Fluency, Dimension::Overall] {
            let a = evaluate(&preds, &data, dim);
            let b = evaluate(&rotated, &shuffled_rows, dim);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "outcome depends on order"),
            }
        }
    }
}
