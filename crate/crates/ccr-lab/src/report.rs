//! Check records and report rendering.
//!
//! Two outputs share the same records: a human-readable table on stdout and
//! an optional machine-readable JSONL file.  The JSONL form is strictly
//! deterministic — identical (config, seed) pairs produce byte-identical
//! files — so wall-clock times appear only in the human table.  Numbers in
//! machine output carry 17 significant digits, enough to round-trip an
//! `f64` exactly.

/// One named check: a measured value against a threshold.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: String,
    /// Measured value (usually a defect norm; sometimes a count).
    pub value: f64,
    /// Pass iff `value <= threshold` (NaN always fails).
    pub threshold: f64,
    pub pass: bool,
    /// Short human context; deterministic, so it may appear in JSONL.
    pub note: String,
    /// Marginal wall time of this check, milliseconds.  Human table only.
    pub wall_ms: f64,
}

impl CheckRecord {
    /// A record that passes iff `value <= threshold`.
    pub fn measure(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
            note: String::new(),
            wall_ms: 0.0,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_time(mut self, wall_ms: f64) -> Self {
        self.wall_ms = wall_ms;
        self
    }
}

/// All records from one suite run, plus identification.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub config_hash: String,
    pub records: Vec<CheckRecord>,
    /// Shared setup time (functional/GNS builds), seconds.  Human table only.
    pub setup_s: f64,
}

/// Format a float with 17 significant digits in scientific notation —
/// exact round-trip for `f64`, and byte-stable across runs.
pub fn machine_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // Not valid JSON numbers; only reachable from failed checks.
        "null".to_string()
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// One JSON object per check, then one summary line.  Deterministic.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{{\"check\":\"{}\",\"suite\":\"{}\",\"config\":\"{}\",\"value\":{},\"threshold\":{},\"pass\":{},\"note\":\"{}\"}}\n",
                escape_json(&r.name),
                escape_json(&self.suite),
                self.config_hash,
                machine_float(r.value),
                machine_float(r.threshold),
                r.pass,
                escape_json(&r.note),
            ));
        }
        out.push_str(&format!(
            "{{\"summary\":\"{}\",\"config\":\"{}\",\"total\":{},\"passed\":{},\"failed\":{},\"pass\":{}}}\n",
            escape_json(&self.suite),
            self.config_hash,
            self.records.len(),
            self.passed(),
            self.failed(),
            self.all_passed(),
        ));
        out
    }

    /// Aligned table for stdout, wall times included.
    pub fn human_table(&self) -> String {
        let name_w = self
            .records
            .iter()
            .map(|r| r.name.len())
            .chain(std::iter::once("check".len()))
            .max()
            .unwrap_or(5)
            .min(48);
        let mut out = String::new();
        out.push_str(&format!(
            "suite {} · config {}\n",
            self.suite, self.config_hash
        ));
        out.push_str(&format!(
            "{:<name_w$}  {:>13}  {:>13}  {:>6}  {:>9}  note\n",
            "check", "value", "threshold", "status", "time"
        ));
        for r in &self.records {
            out.push_str(&format!(
                "{:<name_w$}  {:>13.4e}  {:>13.4e}  {:>6}  {:>7.1}ms  {}\n",
                r.name,
                r.value,
                r.threshold,
                if r.pass { "pass" } else { "FAIL" },
                r.wall_ms,
                r.note,
            ));
        }
        let checks_s: f64 = self.records.iter().map(|r| r.wall_ms).sum::<f64>() / 1e3;
        out.push_str(&format!(
            "{}/{} checks passed · setup {:.2}s · checks {:.2}s\n",
            self.passed(),
            self.records.len(),
            self.setup_s,
            checks_s,
        ));
        out
    }
}
