//! Verification reports: labeled residuals compared against thresholds.

/// One residual check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// A named bundle of checks, with the seed that produced the sampled data.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        VerificationReport {
            name: name.into(),
            seed,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record `value` against `threshold`; the check passes iff value <= threshold.
    pub fn add_check(&mut self, label: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(CheckResult {
            label: label.into(),
            value,
            threshold,
            pass: value <= threshold,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable one-line-per-check summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: {:.3e} (threshold {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.label,
                c.value,
                c.threshold
            ));
        }
        out
    }
}
