//! Result persistence: line-delimited, self-describing records with a
//! schema version, append-safe and diff-friendly. Timings live in the
//! designated volatile block so that re-runs on identical inputs produce
//! byte-identical records once that block is zeroed.

use std::fs::OpenOptions;
use std::io::Write as IoWrite;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beauville::{BeauvilleReport, Decision, FastReport};
use crate::maxclass::MaxClassSummary;
use crate::pc::PcPresentation;

pub const SCHEMA_VERSION: u32 = 1;

/// Identity of a corpus group: content hash of the canonical presentation
/// text, stable across reformatting of the source file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusRecord {
    pub id: String,
    pub source: String,
    pub p: u32,
    pub n: usize,
}

impl CorpusRecord {
    pub fn of(pres: &PcPresentation, source: &str) -> CorpusRecord {
        CorpusRecord {
            id: pres.content_id(),
            source: source.to_string(),
            p: pres.prime(),
            n: pres.length(),
        }
    }
}

/// Cross-checks between the classifier, the criterion predicate, and the
/// oracle, including both published readings of the wild case.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Comparisons {
    pub good_power_value: Option<bool>,
    pub good_power_agemo_order: Option<u64>,
    pub classifier_x_form: Option<String>,
    pub classifier_mu_form: Option<String>,
    pub classifier_agreed: Option<String>,
    pub oracle_decision: Option<String>,
    pub classifier_matches_oracle: Option<bool>,
    pub forms_disagree_oracle_adjudicated: Option<String>,
}

/// Volatile fields: excluded when comparing records across runs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Volatile {
    pub elapsed_ms: u64,
    pub timestamp_ms: u64,
}

/// One analysis result, serialized as a single JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub group: CorpusRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<MaxClassSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beauville: Option<BeauvilleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparisons: Option<Comparisons>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub volatile: Volatile,
}

impl ResultRecord {
    pub fn new(command: &str, group: CorpusRecord) -> ResultRecord {
        ResultRecord {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            group,
            profile: None,
            beauville: None,
            comparisons: None,
            note: None,
            volatile: Volatile::default(),
        }
    }

    /// Serialize with the volatile block zeroed; used to compare records
    /// across runs.
    pub fn stable_json(&self) -> String {
        let mut clone = self.clone();
        clone.volatile = Volatile::default();
        if let Some(b) = &mut clone.beauville {
            b.elapsed_ms = 0;
        }
        serde_json::to_string(&clone).expect("record serializes")
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Append one record per line; the line is written in full.
pub fn append_record(path: &Path, record: &ResultRecord) -> std::io::Result<()> {
    let mut line = record.json_line();
    line.push('\n');
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(line.as_bytes())?;
    file.flush()
}

pub fn decision_name(d: Decision) -> &'static str {
    match d {
        Decision::NotTwoGenerated => "not-2-generated",
        Decision::NotBeauville => "not-beauville",
        Decision::Beauville => "beauville",
        Decision::BeauvilleTame => "beauville-tame",
        Decision::BeauvilleWild => "beauville-wild",
    }
}

pub fn form_name(v: crate::beauville::FormVerdict) -> &'static str {
    match v {
        crate::beauville::FormVerdict::NotBeauville => "not-beauville",
        crate::beauville::FormVerdict::BeauvilleTame => "beauville-tame",
        crate::beauville::FormVerdict::BeauvilleWild => "beauville-wild",
    }
}

/// Classifier fields of a comparison block.
pub fn comparisons_from_fast(fast: &FastReport) -> Comparisons {
    Comparisons {
        classifier_x_form: Some(form_name(fast.x_form).to_string()),
        classifier_mu_form: Some(form_name(fast.mu_form).to_string()),
        classifier_agreed: fast.agreed.map(|d| decision_name(d).to_string()),
        ..Comparisons::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::parse_presentation;

    #[test]
    fn record_roundtrip_and_stability() {
        let pres = parse_presentation("p 5\nn 2\n").unwrap();
        let mut r = ResultRecord::new("analyze", CorpusRecord::of(&pres, "test"));
        r.volatile.elapsed_ms = 123;
        r.volatile.timestamp_ms = 456;
        let mut r2 = r.clone();
        r2.volatile.elapsed_ms = 999;
        assert_ne!(r.json_line(), r2.json_line());
        assert_eq!(r.stable_json(), r2.stable_json());
        let parsed: ResultRecord = serde_json::from_str(&r.json_line()).unwrap();
        assert_eq!(parsed.group, r.group);
    }

    #[test]
    fn content_id_ignores_formatting() {
        let a = parse_presentation("p 5\nn 3\ncomm 2 1 : 3^1\n").unwrap();
        let b = parse_presentation("# c\n p 5\n\nn 3\ncomm 2 1 : 3^1 # z\n").unwrap();
        assert_eq!(CorpusRecord::of(&a, "x").id, CorpusRecord::of(&b, "y").id);
    }

    #[test]
    fn append_is_line_delimited() {
        let dir = std::env::temp_dir().join(format!("bvrec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("results.jsonl");
        let pres = parse_presentation("p 5\nn 2\n").unwrap();
        let r = ResultRecord::new("check", CorpusRecord::of(&pres, "t"));
        append_record(&path, &r).unwrap();
        append_record(&path, &r).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let _: ResultRecord = serde_json::from_str(line).unwrap();
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
