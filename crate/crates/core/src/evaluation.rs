//! Agreement between automatic and human encodings, measured on preferred
//! terms and broken down by description length.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Coder;
use crate::error::{Error, Result};
use crate::selection::EncodingResult;
use crate::terminology::Terminology;

/// One description with the terms a human coder chose for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldCase {
    #[serde(rename = "id", alias = "case_id")]
    pub case_id: String,
    pub text: String,
    pub gold_llt_ids: Vec<String>,
}

pub const LENGTH_CLASSES: [(u8, &str); 5] = [
    (1, "0-20"),
    (2, "21-40"),
    (3, "41-100"),
    (4, "101-255"),
    (5, ">255"),
];

/// Length class 1..=5 by character count.
pub fn length_class(text: &str) -> u8 {
    match text.chars().count() {
        0..=20 => 1,
        21..=40 => 2,
        41..=100 => 3,
        101..=255 => 4,
        _ => 5,
    }
}

/// PT-level comparison of one case.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaseComparison {
    pub true_positive: BTreeSet<String>,
    pub false_positive: BTreeSet<String>,
    pub false_negative: BTreeSet<String>,
}

fn pt_set<'a>(
    terminology: &Terminology,
    llt_ids: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeSet<String>> {
    llt_ids
        .into_iter()
        .map(|id| {
            terminology
                .get(id)
                .filter(|e| !e.is_pseudo())
                .map(|e| e.pt_id.clone())
                .ok_or_else(|| Error::UnknownTerm(id.to_string()))
        })
        .collect()
}

/// Projects both encodings to preferred terms and splits them into
/// agreements, automatic-only and gold-only sets.
pub fn compare_case(
    gold: &GoldCase,
    auto: &EncodingResult,
    terminology: &Terminology,
) -> Result<CaseComparison> {
    let gold = pt_set(terminology, gold.gold_llt_ids.iter().map(String::as_str))?;
    let auto = pt_set(terminology, auto.llt_ids())?;
    Ok(CaseComparison {
        true_positive: gold.intersection(&auto).cloned().collect(),
        false_positive: auto.difference(&gold).cloned().collect(),
        false_negative: gold.difference(&auto).cloned().collect(),
    })
}

/// Pooled counts and the metrics derived from them.
///
/// The three percentages share the denominator TP + FP + FN, so they sum
/// to 100 whenever any PT was involved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub label: String,
    pub reports: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub common_pt_pct: Option<f64>,
    pub fn_pct: Option<f64>,
    pub fp_pct: Option<f64>,
    pub recall_pct: Option<f64>,
    pub precision_pct: Option<f64>,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

impl ClassRow {
    fn new(class: impl Into<String>, label: impl Into<String>) -> Self {
        ClassRow {
            class: class.into(),
            label: label.into(),
            reports: 0,
            tp: 0,
            fp: 0,
            fn_: 0,
            common_pt_pct: None,
            fn_pct: None,
            fp_pct: None,
            recall_pct: None,
            precision_pct: None,
        }
    }

    fn add(&mut self, c: &CaseComparison) {
        self.reports += 1;
        self.tp += c.true_positive.len();
        self.fp += c.false_positive.len();
        self.fn_ += c.false_negative.len();
    }

    fn finish(&mut self) {
        let union = self.tp + self.fp + self.fn_;
        self.common_pt_pct = pct(self.tp, union);
        self.fn_pct = pct(self.fn_, union);
        self.fp_pct = pct(self.fp, union);
        self.recall_pct = pct(self.tp, self.tp + self.fn_);
        self.precision_pct = pct(self.tp, self.tp + self.fp);
    }

    /// Recall as a fraction.
    pub fn recall(&self) -> Option<f64> {
        self.recall_pct.map(|p| p / 100.0)
    }

    /// Precision as a fraction.
    pub fn precision(&self) -> Option<f64> {
        self.precision_pct.map(|p| p / 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseError {
    pub case_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Always five rows, one per length class.
    pub classes: Vec<ClassRow>,
    pub overall: ClassRow,
    /// Cases left out because the engine had more candidates than allowed.
    pub excluded: Vec<String>,
    pub errors: Vec<CaseError>,
}

enum Outcome {
    Compared(u8, CaseComparison),
    Excluded,
    Failed(String),
}

/// Encodes every case, skips those with more candidates than the engine's
/// `max_terms`, and pools PT counts per length class.
pub fn run_benchmark(corpus: &[GoldCase], coder: &Coder) -> Result<EvalReport> {
    if corpus.is_empty() {
        return Err(Error::Config("benchmark corpus is empty".into()));
    }
    let max_terms = coder.config().max_terms;
    let outcomes: Vec<Outcome> = corpus
        .par_iter()
        .map(|case| {
            let auto = coder.encode(&case.text);
            if auto.candidate_count > max_terms {
                return Outcome::Excluded;
            }
            match compare_case(case, &auto, coder.terminology()) {
                Ok(c) => Outcome::Compared(length_class(&case.text), c),
                Err(e) => Outcome::Failed(e.to_string()),
            }
        })
        .collect();

    let mut classes: Vec<ClassRow> = LENGTH_CLASSES
        .iter()
        .map(|(c, label)| ClassRow::new(c.to_string(), *label))
        .collect();
    let mut overall = ClassRow::new("all", "all");
    let mut excluded = Vec::new();
    let mut errors = Vec::new();
    for (case, outcome) in corpus.iter().zip(outcomes) {
        match outcome {
            Outcome::Compared(class, c) => {
                classes[class as usize - 1].add(&c);
                overall.add(&c);
            }
            Outcome::Excluded => excluded.push(case.case_id.clone()),
            Outcome::Failed(message) => errors.push(CaseError {
                case_id: case.case_id.clone(),
                message,
            }),
        }
    }
    classes.iter_mut().for_each(ClassRow::finish);
    overall.finish();
    Ok(EvalReport {
        classes,
        overall,
        excluded,
        errors,
    })
}

impl EvalReport {
    /// One row per class plus the overall row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for row in self.classes.iter().chain(std::iter::once(&self.overall)) {
            csv.serialize(row)
                .map_err(|e| Error::Config(format!("writing report: {e}")))?;
        }
        csv.flush()
            .map_err(|e| Error::io(Path::new("<report.csv>"), e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `report.csv` and `report.json` into `dir`, creating it.
    pub fn write_files(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("report.csv");
        let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        self.write_csv(file)?;
        let json_path = dir.join("report.json");
        std::fs::write(&json_path, self.to_json()).map_err(|e| Error::io(&json_path, e))
    }
}

/// Reads one JSON object per line; blank lines are skipped.
pub fn parse_corpus<R: BufRead>(reader: R, origin: &Path) -> Result<Vec<GoldCase>> {
    let mut cases = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let case = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        cases.push(case);
    }
    Ok(cases)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<GoldCase>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(std::io::BufReader::new(file), path)
}
