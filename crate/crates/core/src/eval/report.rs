use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Correlation, Dimension, Split};

/// One correlation cell; `None` marks an undefined correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub split: Split,
    pub language: String,
    pub system: String,
    pub dimension: Dimension,
    pub n: usize,
    pub spearman: Option<f64>,
    pub pearson: Option<f64>,
}

impl ReportEntry {
    pub fn new(split: Split, language: &str, system: &str, dimension: Dimension, c: Option<Correlation>, n: usize) -> Self {
        Self {
            split,
            language: language.to_owned(),
            system: system.to_owned(),
            dimension,
            n,
            spearman: c.map(|c| c.spearman),
            pearson: c.map(|c| c.pearson),
        }
    }
}

/// Correlations per split, language, system and dimension, in insertion
/// order for languages and systems.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub entries: Vec<ReportEntry>,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |v| format!("{v:.4}"))
}

fn mean(values: &[Option<f64>]) -> Option<f64> {
    let all: Option<Vec<f64>> = values.iter().copied().collect();
    all.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

fn ordered_unique<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeSet::new();
    items.filter(|s| seen.insert(*s)).collect()
}

impl EvalReport {
    pub fn push(&mut self, entry: ReportEntry) {
        self.entries.push(entry);
    }

    fn blocks(&self) -> Vec<(Split, Dimension)> {
        let set: BTreeSet<(Split, Dimension)> = self.entries.iter().map(|e| (e.split, e.dimension)).collect();
        set.into_iter().collect()
    }

    fn find(&self, split: Split, dim: Dimension, system: &str, language: &str) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.split == split && e.dimension == dim && e.system == system && e.language == language)
    }

    /// Mean Spearman and Pearson across languages; undefined when any
    /// language is undefined or missing.
    pub fn average(&self, split: Split, dim: Dimension, system: &str) -> (Option<f64>, Option<f64>) {
        let languages = ordered_unique(self.entries.iter().map(|e| e.language.as_str()));
        let cells: Vec<Option<&ReportEntry>> = languages.iter().map(|l| self.find(split, dim, system, l)).collect();
        let sp: Vec<Option<f64>> = cells.iter().map(|c| c.and_then(|e| e.spearman)).collect();
        let pe: Vec<Option<f64>> = cells.iter().map(|c| c.and_then(|e| e.pearson)).collect();
        (mean(&sp), mean(&pe))
    }

    /// Machine-readable form, including one `average` row per system.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("split\tdimension\tsystem\tlanguage\tn\tspearman\tpearson\n");
        for (split, dim) in self.blocks() {
            let block: Vec<&ReportEntry> = self.entries.iter().filter(|e| e.split == split && e.dimension == dim).collect();
            for system in ordered_unique(block.iter().map(|e| e.system.as_str())) {
                let mut total = 0;
                for e in block.iter().filter(|e| e.system == system) {
                    total += e.n;
                    let _ = writeln!(
                        out,
                        "{split}\t{dim}\t{system}\t{}\t{}\t{}\t{}",
                        e.language,
                        e.n,
                        cell(e.spearman),
                        cell(e.pearson)
                    );
                }
                let (sp, pe) = self.average(split, dim, system);
                let _ = writeln!(out, "{split}\t{dim}\t{system}\taverage\t{total}\t{}\t{}", cell(sp), cell(pe));
            }
        }
        out
    }

    /// Human-readable table: one row per system, Spearman and Pearson per
    /// language, then the cross-language averages.
    pub fn render_table(&self) -> String {
        let languages = ordered_unique(self.entries.iter().map(|e| e.language.as_str()));
        let mut out = String::new();
        for (split, dim) in self.blocks() {
            let systems = ordered_unique(
                self.entries
                    .iter()
                    .filter(|e| e.split == split && e.dimension == dim)
                    .map(|e| e.system.as_str()),
            );
            let width = systems.iter().map(|s| s.len()).max().unwrap_or(6).max(6);
            let groups: Vec<&str> = languages.iter().copied().chain(std::iter::once("Average")).collect();
            let _ = writeln!(out, "{split} set, {dim} (Spearman / Pearson)");
            let mut head1 = format!("{:width$}", "System");
            let mut head2 = format!("{:width$}", "");
            for g in &groups {
                let _ = write!(head1, " | {g:^17}");
                let _ = write!(head2, " | {:>8} {:>8}", "Spearman", "Pearson");
            }
            let _ = writeln!(out, "{head1}\n{head2}");
            let _ = writeln!(out, "{}", "-".repeat(head2.chars().count()));
            for system in systems {
                let mut line = format!("{system:width$}");
                for l in &languages {
                    let e = self.find(split, dim, system, l);
                    let (sp, pe) = (e.and_then(|e| e.spearman), e.and_then(|e| e.pearson));
                    let _ = write!(line, " | {:>8} {:>8}", cell(sp), cell(pe));
                }
                let (sp, pe) = self.average(split, dim, system);
                let _ = write!(line, " | {:>8} {:>8}", cell(sp), cell(pe));
                let _ = writeln!(out, "{line}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: f64, p: f64) -> Option<Correlation> {
        Some(Correlation {
            spearman: s,
            pearson: p,
            n: 10,
        })
    }

    #[test]
    fn averages_and_layout() {
        let mut r = EvalReport::default();
        r.push(ReportEntry::new(Split::Dev, "guarani", "Approach 5", Dimension::Overall, c(0.7544, 0.8653), 100));
        r.push(ReportEntry::new(Split::Dev, "bribri", "Approach 5", Dimension::Overall, c(0.8283, 0.8446), 100));
        r.push(ReportEntry::new(Split::Dev, "nahuatl", "Approach 5", Dimension::Overall, c(0.8177, 0.8266), 100));
        r.push(ReportEntry::new(Split::Dev, "guarani", "BLEU", Dimension::Overall, None, 100));
        let (sp, pe) = r.average(Split::Dev, Dimension::Overall, "Approach 5");
        assert_eq!(format!("{:.4} {:.4}", sp.unwrap(), pe.unwrap()), "0.8001 0.8455");
        assert_eq!(r.average(Split::Dev, Dimension::Overall, "BLEU"), (None, None));
        let tsv = r.to_tsv();
        assert!(tsv.contains("dev\toverall\tApproach 5\taverage\t300\t0.8001\t0.8455\n"), "{tsv}");
        assert!(tsv.contains("dev\toverall\tBLEU\tguarani\t100\tNA\tNA\n"));
        let table = r.render_table();
        assert!(table.contains("guarani") && table.contains("Average"));
        let row = table.lines().find(|l| l.starts_with("Approach 5")).unwrap();
        assert!(row.ends_with("0.8001   0.8455"), "{row}");
    }
}
