//! Machine-readable verification reports.
//!
//! A report is an ordered list of named checks, each carrying its degree
//! window and, on failure, a witness. The JSON form is stable-keyed and
//! deterministic for fixed inputs; the exit-code contract is 0 when every
//! check passes, 1 on a verification failure, 2 on input or usage errors.

use serde::Serialize;

use crate::tower::StepReport;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub window: String,
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl Check {
    pub fn pass(
        name: impl Into<String>,
        window: impl Into<String>,
        details: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            window: window.into(),
            details: details.into(),
            witness: None,
            data: None,
        }
    }

    /// Failures always carry a witness.
    pub fn fail(
        name: impl Into<String>,
        window: impl Into<String>,
        details: impl Into<String>,
        witness: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            window: window.into(),
            details: details.into(),
            witness: Some(witness.into()),
            data: None,
        }
    }

    pub fn skipped(name: impl Into<String>, window: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            window: window.into(),
            details: "skipped after an earlier failure".into(),
            witness: None,
            data: None,
        }
    }

    pub fn with_data(mut self, data: serde_json::Value) -> Self {
        self.data = Some(data);
        self
    }

    /// Collapses a multi-part step into one check line.
    pub fn from_step(
        name: impl Into<String>,
        window: impl Into<String>,
        step: &StepReport,
    ) -> Self {
        let name = name.into();
        let window = window.into();
        if step.pass() {
            let details = step
                .items
                .iter()
                .map(|i| format!("{}: {}", i.label, i.detail))
                .collect::<Vec<_>>()
                .join("; ");
            Check::pass(name, window, details)
        } else {
            let bad = step.first_failure().expect("a failing item exists");
            Check::fail(
                name,
                window,
                format!("{}: {}", bad.label, bad.detail),
                bad.witness.clone().unwrap_or_else(|| bad.detail.clone()),
            )
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    pub overall: Status,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Report {
            tool: "primtower".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            warnings: Vec::new(),
            checks: Vec::new(),
            overall: Status::Pass,
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn push(&mut self, check: Check) {
        if check.status == Status::Fail {
            self.overall = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn has_failure(&self) -> bool {
        self.overall == Status::Fail
    }

    /// 0 when everything passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.has_failure() {
            1
        } else {
            0
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                out.push_str(&format!(
                    "{} {} :: {}\n",
                    self.tool, self.version, self.command
                ));
                out.push_str(&format!("config: {}\n", self.config));
                for w in &self.warnings {
                    out.push_str(&format!("warning: {w}\n"));
                }
                for c in &self.checks {
                    let tag = match c.status {
                        Status::Pass => "pass",
                        Status::Fail => "FAIL",
                        Status::Skipped => "skip",
                    };
                    out.push_str(&format!(
                        "[{tag}] {} ({}): {}\n",
                        c.name, c.window, c.details
                    ));
                    if let Some(w) = &c.witness {
                        out.push_str(&format!("       witness: {w}\n"));
                    }
                }
                let overall = match self.overall {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                out.push_str(&format!("overall: {overall}\n"));
                out
            }
        }
    }
}
