use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::Valuation;

/// A valuation as displayed: exact below the cap, `≥M` at or above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Value", try_from = "Value")]
pub enum Delta {
    Value(i64),
    AtLeast(i64),
}

impl Delta {
    /// Caps a valuation at `cap`; infinite and O(p^a) with a >= cap become `≥cap`.
    pub fn capped(v: Valuation, cap: i64) -> Delta {
        match v {
            Valuation::Exact(x) if x < cap => Delta::Value(x),
            Valuation::AtLeast(x) if x < cap => Delta::AtLeast(x),
            _ => Delta::AtLeast(cap),
        }
    }

    pub fn is_capped(&self) -> bool {
        matches!(self, Delta::AtLeast(_))
    }

    pub fn bound(&self) -> i64 {
        match *self {
            Delta::Value(v) | Delta::AtLeast(v) => v,
        }
    }
}

impl std::fmt::Display for Delta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Delta::Value(v) => write!(f, "{v}"),
            Delta::AtLeast(v) => write!(f, "≥{v}"),
        }
    }
}

impl From<Delta> for Value {
    fn from(d: Delta) -> Value {
        match d {
            Delta::Value(v) => Value::from(v),
            Delta::AtLeast(v) => Value::from(format!("≥{v}")),
        }
    }
}

impl TryFrom<Value> for Delta {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match &v {
            Value::Number(n) => n.as_i64().map(Delta::Value).ok_or_else(|| format!("bad valuation {v}")),
            Value::String(s) => s
                .strip_prefix('≥')
                .and_then(|x| x.parse().ok())
                .map(Delta::AtLeast)
                .ok_or_else(|| format!("bad valuation {v}")),
            _ => Err(format!("bad valuation {v}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub index: Vec<i64>,
    pub valuation: Delta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub m: u32,
    pub k_m: u64,
    pub min_val: Delta,
    pub argmin: Option<Vec<i64>>,
    pub table: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightInX>,
}

/// k_m as a point of Z_p × Z/(p-1)Z, next to the expected limit (0, class).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightInX {
    /// k_m mod p^M, as a decimal string.
    pub s_residue: String,
    pub s_valuation: u32,
    pub class: u64,
    pub limit: (u64, u64),
}

impl Stage {
    /// Builds a stage from its table; the argmin is the first index attaining the minimum.
    pub fn from_table(m: u32, k_m: u64, table: Vec<TableEntry>, cap: i64) -> Stage {
        let mut min_val = Delta::AtLeast(cap);
        let mut argmin = None;
        for e in &table {
            if stage_order(e.valuation) < stage_order(min_val) {
                min_val = e.valuation;
                argmin = Some(e.index.clone());
            }
        }
        Stage {
            m,
            k_m,
            min_val,
            argmin,
            table,
            weight: None,
        }
    }
}

fn stage_order(d: Delta) -> (i64, u8) {
    match d {
        Delta::Value(v) => (v, 0),
        Delta::AtLeast(v) => (v, 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    PrecisionInsufficient,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
            Outcome::PrecisionInsufficient => 3,
        }
    }
}

/// Common shape of every lab report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub config: Value,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub checks: Vec<Check>,
    pub pass: bool,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

impl Report {
    pub fn new(kind: &str, config: Value, stages: Vec<Stage>, checks: Vec<Check>, outcome: Outcome) -> Self {
        Self {
            kind: kind.into(),
            config,
            stages,
            checks,
            pass: outcome == Outcome::Pass,
            outcome,
            label: String::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verdict for a sequence of stage minima that must increase strictly.
pub fn monotone_outcome(mins: &[Delta]) -> Outcome {
    let mut outcome = Outcome::Pass;
    for w in mins.windows(2) {
        match (w[0], w[1]) {
            (Delta::Value(a), Delta::Value(b)) if b > a => {}
            (Delta::Value(a), Delta::AtLeast(b)) if b > a => {}
            (Delta::Value(a), Delta::Value(b)) if b < a => return Outcome::Fail,
            (Delta::Value(_), Delta::Value(_)) => outcome = worst(outcome, Outcome::Fail),
            _ => outcome = worst(outcome, Outcome::PrecisionInsufficient),
        }
    }
    outcome
}

fn worst(a: Outcome, b: Outcome) -> Outcome {
    let rank = |o: Outcome| match o {
        Outcome::Pass => 0,
        Outcome::PrecisionInsufficient => 1,
        Outcome::Fail => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_encoding() {
        assert_eq!(Value::from(Delta::AtLeast(10)), Value::from("≥10"));
        assert_eq!(Delta::try_from(Value::from("≥7")).unwrap(), Delta::AtLeast(7));
        assert_eq!(Delta::try_from(Value::from(3)).unwrap(), Delta::Value(3));
        assert!(Delta::try_from(Value::from("7")).is_err());
        assert_eq!(Delta::capped(Valuation::Exact(12), 10), Delta::AtLeast(10));
        assert_eq!(Delta::capped(Valuation::Infinite, 10), Delta::AtLeast(10));
        assert_eq!(Delta::capped(Valuation::Exact(-2), 10), Delta::Value(-2));
    }

    #[test]
    fn verdicts() {
        use Delta::*;
        assert_eq!(monotone_outcome(&[Value(1), Value(2), Value(3)]), Outcome::Pass);
        assert_eq!(monotone_outcome(&[Value(1), Value(2), AtLeast(10)]), Outcome::Pass);
        assert_eq!(monotone_outcome(&[Value(2), Value(2), Value(3)]), Outcome::Fail);
        assert_eq!(monotone_outcome(&[Value(3), Value(2)]), Outcome::Fail);
        assert_eq!(monotone_outcome(&[Value(1), AtLeast(1)]), Outcome::PrecisionInsufficient);
        assert_eq!(monotone_outcome(&[AtLeast(10), AtLeast(10)]), Outcome::PrecisionInsufficient);
    }

    #[test]
    fn stage_minimum() {
        let t = |i: i64, d: Delta| TableEntry {
            index: vec![i, 0, 0],
            valuation: d,
        };
        let s = Stage::from_table(1, 15, vec![t(0, Delta::AtLeast(10)), t(1, Delta::Value(2)), t(2, Delta::Value(1))], 10);
        assert_eq!(s.min_val, Delta::Value(1));
        assert_eq!(s.argmin, Some(vec![2, 0, 0]));
        let empty = Stage::from_table(1, 15, vec![], 10);
        assert_eq!(empty.min_val, Delta::AtLeast(10));
        assert_eq!(empty.argmin, None);
    }
}
