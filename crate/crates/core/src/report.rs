//! Report records emitted by the verification driver.
//!
//! One record per check, serialized as one JSON object per line so a run can
//! be streamed, grepped, and diffed. Field order is fixed by declaration
//! order, which keeps byte-identical output for a fixed seed.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not be given a meaning, e.g. because a prerequisite
    /// check already failed for this instance.
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Undecided => "undecided",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub check: String,
    pub instance: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub samples: usize,
    pub seed: u64,
    /// Wall-clock duration; populated only when timings were requested, so
    /// default output stays deterministic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl ReportRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report records always serialize")
    }

    /// Plain-text rendering for terminal use.
    pub fn to_text_line(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undecided => "UNDECIDED",
        };
        let mut line = format!(
            "{verdict:<9} {:<28} [{}] samples={}",
            self.check, self.instance, self.samples
        );
        if let Some(ms) = self.wall_ms {
            line.push_str(&format!(" wall_ms={ms}"));
        }
        if let Some(w) = &self.witness {
            line.push_str(&format!("\n          {w}"));
        }
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_omit_missing_fields_and_keep_field_order() {
        let rec = ReportRecord {
            check: "t-group".into(),
            instance: "gaussian/inert-p3/s=1".into(),
            verdict: Verdict::Pass,
            witness: None,
            samples: 50,
            seed: 7,
            wall_ms: None,
        };
        assert_eq!(
            rec.to_json_line(),
            r#"{"check":"t-group","instance":"gaussian/inert-p3/s=1","verdict":"pass","samples":50,"seed":7}"#
        );

        let rec = ReportRecord {
            witness: Some("residual = i".into()),
            wall_ms: Some(3),
            verdict: Verdict::Fail,
            ..rec
        };
        assert_eq!(
            rec.to_json_line(),
            r#"{"check":"t-group","instance":"gaussian/inert-p3/s=1","verdict":"fail","witness":"residual = i","samples":50,"seed":7,"wall_ms":3}"#
        );
    }

    #[test]
    fn text_lines_carry_the_witness_on_a_continuation_line() {
        let rec = ReportRecord {
            check: "twisted-stability".into(),
            instance: "gaussian/split-p5/s=1".into(),
            verdict: Verdict::Fail,
            witness: Some("unit (3+4i)/5 escapes".into()),
            samples: 12,
            seed: 1,
            wall_ms: None,
        };
        let text = rec.to_text_line();
        assert!(text.starts_with("FAIL"));
        assert!(text.contains("\n          unit (3+4i)/5 escapes"));
    }
}
