//! Characters-per-line, characters-per-second and lines-per-block conformity.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::subtitle::{char_count, SubtitleDocument};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConformityError {
    #[error("document has no blocks")]
    EmptyDocument,
    #[error("thresholds must be positive")]
    InvalidThresholds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformityThresholds {
    pub max_cpl: usize,
    pub max_cps: f64,
    pub max_lines_per_block: usize,
}

impl ConformityThresholds {
    pub const DEFAULT_MAX_CPL: usize = 42;
    pub const DEFAULT_MAX_CPS: f64 = 21.0;
    pub const DEFAULT_MAX_LINES: usize = 2;

    pub fn new(
        max_cpl: usize,
        max_cps: f64,
        max_lines_per_block: usize,
    ) -> Result<Self, ConformityError> {
        if max_cpl == 0 || max_lines_per_block == 0 || !(max_cps.is_finite() && max_cps > 0.0) {
            return Err(ConformityError::InvalidThresholds);
        }
        Ok(ConformityThresholds {
            max_cpl,
            max_cps,
            max_lines_per_block,
        })
    }
}

impl Default for ConformityThresholds {
    fn default() -> Self {
        ConformityThresholds {
            max_cpl: Self::DEFAULT_MAX_CPL,
            max_cps: Self::DEFAULT_MAX_CPS,
            max_lines_per_block: Self::DEFAULT_MAX_LINES,
        }
    }
}

/// A unit that breaks a guideline, with the measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Violation {
    Cpl {
        block: u32,
        line: usize,
        chars: usize,
    },
    Cps {
        block: u32,
        chars: usize,
        duration_ms: u64,
        /// `None` for blocks with no duration (infinite reading speed).
        cps: Option<f64>,
    },
    Lines {
        block: u32,
        lines: usize,
    },
}

/// Outcome of one check: how many units conform out of how many.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckResult {
    pub conforming: u64,
    pub total: u64,
    pub violations: Vec<Violation>,
}

impl CheckResult {
    /// Exact percentage.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.conforming * 100, self.total.max(1))
    }

    /// Percentage rounded half up to one decimal.
    pub fn pct(&self) -> f64 {
        let total = self.total.max(1);
        let tenths = (2 * 1000 * self.conforming + total) / (2 * total);
        tenths as f64 / 10.0
    }

    fn merge(mut self, other: CheckResult) -> CheckResult {
        self.conforming += other.conforming;
        self.total += other.total;
        self.violations.extend(other.violations);
        self
    }
}

fn non_empty(doc: &SubtitleDocument) -> Result<(), ConformityError> {
    if doc.is_empty() {
        Err(ConformityError::EmptyDocument)
    } else {
        Ok(())
    }
}

/// Per line: conforming iff its characters (spaces included) are at most `max_cpl`.
pub fn cpl_check(
    doc: &SubtitleDocument,
    t: &ConformityThresholds,
) -> Result<CheckResult, ConformityError> {
    non_empty(doc)?;
    let mut r = CheckResult::default();
    for block in doc.blocks() {
        for (l, line) in block.lines.iter().enumerate() {
            let chars = char_count(line);
            r.total += 1;
            if chars <= t.max_cpl {
                r.conforming += 1;
            } else {
                r.violations.push(Violation::Cpl {
                    block: block.index,
                    line: l + 1,
                    chars,
                });
            }
        }
    }
    Ok(r)
}

/// Per block: conforming iff characters / seconds is at most `max_cps`.
/// Blocks without duration never conform.
pub fn cps_check(
    doc: &SubtitleDocument,
    t: &ConformityThresholds,
) -> Result<CheckResult, ConformityError> {
    non_empty(doc)?;
    let mut r = CheckResult::default();
    for block in doc.blocks() {
        let chars = block.char_count();
        let duration_ms = block.duration_ms();
        r.total += 1;
        if duration_ms > 0 && chars as f64 * 1000.0 <= t.max_cps * duration_ms as f64 {
            r.conforming += 1;
        } else {
            r.violations.push(Violation::Cps {
                block: block.index,
                chars,
                duration_ms,
                cps: (duration_ms > 0).then(|| chars as f64 * 1000.0 / duration_ms as f64),
            });
        }
    }
    Ok(r)
}

/// Per block: conforming iff it has at most `max_lines_per_block` lines.
pub fn lines_check(
    doc: &SubtitleDocument,
    t: &ConformityThresholds,
) -> Result<CheckResult, ConformityError> {
    non_empty(doc)?;
    let mut r = CheckResult::default();
    for block in doc.blocks() {
        r.total += 1;
        if block.lines.len() <= t.max_lines_per_block {
            r.conforming += 1;
        } else {
            r.violations.push(Violation::Lines {
                block: block.index,
                lines: block.lines.len(),
            });
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformityReport {
    pub thresholds: ConformityThresholds,
    pub cpl: CheckResult,
    pub cps: CheckResult,
    pub lines: CheckResult,
}

pub fn report(
    doc: &SubtitleDocument,
    t: &ConformityThresholds,
) -> Result<ConformityReport, ConformityError> {
    Ok(ConformityReport {
        thresholds: *t,
        cpl: cpl_check(doc, t)?,
        cps: cps_check(doc, t)?,
        lines: lines_check(doc, t)?,
    })
}

impl ConformityReport {
    pub fn cpl_pct(&self) -> f64 {
        self.cpl.pct()
    }

    pub fn cps_pct(&self) -> f64 {
        self.cps.pct()
    }

    pub fn lines_pct(&self) -> f64 {
        self.lines.pct()
    }

    pub fn is_conforming(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.cpl
            .violations
            .iter()
            .chain(&self.cps.violations)
            .chain(&self.lines.violations)
    }

    /// Combines reports of consecutive documents.
    pub fn merge(self, other: ConformityReport) -> ConformityReport {
        ConformityReport {
            thresholds: self.thresholds,
            cpl: self.cpl.merge(other.cpl),
            cps: self.cps.merge(other.cps),
            lines: self.lines.merge(other.lines),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Aligned plain-text table, one row per check followed by the violations.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>10} {:>8} {:>7}",
            "check", "threshold", "units", "pct"
        );
        let rows = [
            ("cpl", self.thresholds.max_cpl.to_string(), &self.cpl),
            ("cps", format!("{}", self.thresholds.max_cps), &self.cps),
            (
                "lines",
                self.thresholds.max_lines_per_block.to_string(),
                &self.lines,
            ),
        ];
        for (name, threshold, r) in rows {
            let _ = writeln!(
                out,
                "{:<8} {:>10} {:>8} {:>7.1}",
                name,
                threshold,
                format!("{}/{}", r.conforming, r.total),
                r.pct()
            );
        }
        for v in self.violations() {
            let _ = match v {
                Violation::Cpl { block, line, chars } => {
                    writeln!(out, "cpl   block {block} line {line}: {chars} chars")
                }
                Violation::Cps {
                    block,
                    chars,
                    duration_ms,
                    cps,
                } => match cps {
                    Some(cps) => writeln!(
                        out,
                        "cps   block {block}: {cps:.2} cps ({chars} chars in {duration_ms} ms)"
                    ),
                    None => writeln!(out, "cps   block {block}: inf cps ({chars} chars in 0 ms)"),
                },
                Violation::Lines { block, lines } => {
                    writeln!(out, "lines block {block}: {lines} lines")
                }
            };
        }
        out
    }
}

impl Serialize for ConformityReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConformityReport", 4)?;
        st.serialize_field("cpl_pct", &self.cpl_pct())?;
        st.serialize_field("cps_pct", &self.cps_pct())?;
        st.serialize_field("lines_pct", &self.lines_pct())?;
        st.serialize_field("violations", &self.violations().collect::<Vec<_>>())?;
        st.end()
    }
}
