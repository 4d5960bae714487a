//! PASS/FAIL bookkeeping for the acceptance run.

use std::time::Instant;

#[derive(Default)]
pub struct Report {
    failed: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs one criterion; `body` records sub-checks and returns a summary.
    pub fn criterion(&mut self, id: &str, body: impl FnOnce(&mut Checks) -> String) {
        let start = Instant::now();
        let mut checks = Checks::default();
        let summary = body(&mut checks);
        let secs = start.elapsed().as_secs_f64();
        let failures = checks.0;
        if failures.is_empty() {
            println!("{id} PASS: {summary} ({secs:.2} s)");
        } else {
            println!("{id} FAIL: {}; {summary} ({secs:.2} s)", failures.join("; "));
            self.failed.push(id.to_owned());
        }
    }

    pub fn failed(&self) -> &[String] {
        &self.failed
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failed.is_empty())
    }
}

/// Collects failed sub-checks.
#[derive(Default)]
pub struct Checks(pub Vec<String>);

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.0.push(what.into());
        }
    }
}
