use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    Explicit,
    UnitConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    RatioOnly,
    VacuousPass,
    /// The inputs do not satisfy the hypotheses; no verdict on the inequality itself.
    Precondition,
}

/// Outcome of evaluating one inequality `lhs <= rhs` (or `>=` for lower bounds, stored
/// so that `ratio = lhs / rhs <= 1` is the favourable direction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: String,
    /// Case label, eigen index or time at which the check ran.
    #[serde(default)]
    pub case: String,
    #[serde(deserialize_with = "crate::output::f64_or_nan")]
    pub lhs: f64,
    #[serde(deserialize_with = "crate::output::f64_or_nan")]
    pub rhs: f64,
    #[serde(deserialize_with = "crate::output::f64_or_nan")]
    pub ratio: f64,
    pub constant_mode: ConstantMode,
    pub verdict: Verdict,
    /// Multiplicative slack allowed on the favourable side.
    pub slack: f64,
    pub inputs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    /// Explicit check of `lhs <= rhs * slack`.
    pub fn explicit(id: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let ok = lhs.is_finite() && rhs.is_finite() && lhs <= rhs * slack;
        BoundReport {
            id: id.into(),
            case: String::new(),
            lhs,
            rhs,
            ratio: lhs / rhs,
            constant_mode: ConstantMode::Explicit,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            slack,
            inputs: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Ratio `lhs / rhs` of a bound whose constant is set to one.
    pub fn ratio_only(id: &str, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            id: id.into(),
            case: String::new(),
            lhs,
            rhs,
            ratio: lhs / rhs,
            constant_mode: ConstantMode::UnitConstant,
            verdict: Verdict::RatioOnly,
            slack: 1.0,
            inputs: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn vacuous(id: &str, note: &str) -> Self {
        let mut r = BoundReport::explicit(id, 0.0, 0.0, 1.0);
        r.ratio = 0.0;
        r.verdict = Verdict::VacuousPass;
        r.notes.push(note.into());
        r
    }

    pub fn precondition(id: &str, note: &str) -> Self {
        let mut r = BoundReport::explicit(id, f64::NAN, f64::NAN, 1.0);
        r.verdict = Verdict::Precondition;
        r.notes.push(note.into());
        r
    }

    pub fn with_case(mut self, case: impl Into<String>) -> Self {
        self.case = case.into();
        self
    }

    pub fn with_input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.into(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Whether this report should make a verification run fail.
    pub fn is_failure(&self) -> bool {
        self.constant_mode == ConstantMode::Explicit
            && matches!(self.verdict, Verdict::Fail | Verdict::Precondition)
    }

    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::VacuousPass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(BoundReport::explicit("x", 1.0, 1.0, 1.0).verdict, Verdict::Pass);
        assert_eq!(BoundReport::explicit("x", 1.01, 1.0, 1.0).verdict, Verdict::Fail);
        assert_eq!(BoundReport::explicit("x", 1.01, 1.0, 1.02).verdict, Verdict::Pass);
        assert_eq!(BoundReport::explicit("x", f64::NAN, 1.0, 1.0).verdict, Verdict::Fail);
        let r = BoundReport::ratio_only("x", 3.0, 1.5);
        assert_eq!(r.ratio, 2.0);
        assert!(!r.is_failure());
        assert!(BoundReport::precondition("x", "bad").is_failure());
        assert!(BoundReport::vacuous("x", "empty").passed());
    }
}
