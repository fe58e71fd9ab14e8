//! Verdict summaries: the human one-liner and the JSON schema.

use alcd_core::elimination::Stats;
use alcd_core::Verdict;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonStats {
    pub closure: u64,
    pub nt: u64,
    pub types: u64,
    pub augmented: u64,
    pub survivors: u64,
    pub iterations: u64,
    pub csp_calls: u64,
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonVerdict {
    pub consistent: bool,
    pub stats: JsonStats,
}

impl JsonVerdict {
    pub fn new(v: &Verdict, ms: u64) -> Self {
        let s = &v.stats;
        JsonVerdict {
            consistent: v.consistent,
            stats: JsonStats {
                closure: s.closure as u64,
                nt: s.nt.into(),
                types: s.types as u64,
                augmented: s.augmented,
                survivors: s.survivors as u64,
                iterations: s.iterations.into(),
                csp_calls: s.csp_calls,
                ms,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

pub fn verdict_word(consistent: bool) -> &'static str {
    if consistent {
        "consistent"
    } else {
        "inconsistent"
    }
}

/// Statistics without timing, so that the line is reproducible.
pub fn stats_line(s: &Stats) -> String {
    format!(
        "closure={} nt={} types={} augmented={} survivors={} iterations={} csp_calls={}",
        s.closure, s.nt, s.types, s.augmented, s.survivors, s.iterations, s.csp_calls
    )
}
