use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One failed comparison: at index or prime `p`, `expected` differed from `got`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub p: u64,
    pub expected: String,
    pub got: String,
}

/// Outcome of one verification run. `passed` is true exactly when
/// `violations` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law_id: String,
    pub prime_range: (u64, u64),
    pub checked: u64,
    pub violations: Vec<Violation>,
    pub passed: bool,
    pub summary: BTreeMap<String, Value>,
}

impl LawReport {
    pub fn new(law_id: impl Into<String>, lo: u64, hi: u64) -> Self {
        LawReport {
            law_id: law_id.into(),
            prime_range: (lo, hi),
            checked: 0,
            violations: Vec::new(),
            passed: true,
            summary: BTreeMap::new(),
        }
    }

    /// Count one comparison; record a violation if the two sides differ.
    pub fn check<T: PartialEq + Display + ?Sized>(&mut self, p: u64, expected: &T, got: &T) -> bool {
        self.checked += 1;
        if expected == got {
            true
        } else {
            self.violations.push(Violation {
                p,
                expected: expected.to_string(),
                got: got.to_string(),
            });
            self.passed = false;
            false
        }
    }

    /// Count one comparison that failed.
    pub fn violate(&mut self, p: u64, expected: impl Display, got: impl Display) {
        self.checked += 1;
        self.violations.push(Violation {
            p,
            expected: expected.to_string(),
            got: got.to_string(),
        });
        self.passed = false;
    }

    /// Count one comparison that succeeded.
    pub fn pass_one(&mut self) {
        self.checked += 1;
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.violations.is_empty();
        self
    }

    /// Fold another report's counts and violations into this one, prefixing
    /// its summary keys with its law id.
    pub fn absorb(&mut self, other: LawReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        for (k, v) in other.summary {
            self.summary.insert(format!("{}.{k}", other.law_id), v);
        }
        self.summary
            .insert(format!("{}.passed", other.law_id), Value::Bool(other.passed));
        self.passed = self.violations.is_empty();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "law {:<24} {}  primes [{}, {}]  checked {}  violations {}",
            self.law_id,
            if self.passed { "PASS" } else { "FAIL" },
            self.prime_range.0,
            self.prime_range.1,
            self.checked,
            self.violations.len()
        );
        for (k, v) in &self.summary {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let text = if text.len() > 200 {
                format!("{}...", &text[..200])
            } else {
                text
            };
            let _ = writeln!(s, "  {k:<32} {text}");
        }
        for v in self.violations.iter().take(20) {
            let _ = writeln!(s, "  violation at {:>8}: expected {}, got {}", v.p, v.expected, v.got);
        }
        if self.violations.len() > 20 {
            let _ = writeln!(s, "  ... {} more", self.violations.len() - 20);
        }
        s
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}
