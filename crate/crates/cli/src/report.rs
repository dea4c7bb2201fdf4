use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT_VERSION: u32 = 1;

/// Machine-readable record of one command run. Everything except
/// `timings_ms` is a deterministic function of `config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Report text with the timing field removed.
    pub fn payload(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("timings_ms");
        }
        serde_json::to_string(&v).expect("value serializes")
    }
}

/// Wall-clock phase timings.
#[derive(Debug, Default)]
pub struct Timings(BTreeMap<String, f64>);

impl Timings {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.0.entry(phase.to_string()).or_default() += t.elapsed().as_secs_f64() * 1e3;
        out
    }

    pub fn into_inner(self) -> BTreeMap<String, f64> {
        self.0
    }
}
