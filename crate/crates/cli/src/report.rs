use std::collections::BTreeMap;
use std::fmt::Write as _;

use regfman::regend::CLUSTER_TOL;
use regfman::report::Residual;
use serde::Serialize;
use serde_json::Value;

use crate::doc::{Settings, Task, SCHEMA_VERSION};

/// One residual against its threshold. A NaN value serializes as `null`
/// and never passes.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub order: usize,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub settings: Settings,
    pub cluster_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub task: Task,
    pub pass: bool,
    pub failed: Vec<String>,
    /// Set when the computation stopped with a verdict-level failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(task: Task, settings: &Settings) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            task,
            pass: true,
            failed: Vec::new(),
            error: None,
            checks: Vec::new(),
            data: BTreeMap::new(),
            provenance: Provenance {
                tool: format!("regfman {}", env!("CARGO_PKG_VERSION")),
                settings: settings.clone(),
                cluster_tol: CLUSTER_TOL,
                probe: None,
                notes: Vec::new(),
            },
        }
    }

    fn tol(&self) -> f64 {
        self.provenance.settings.tol
    }

    pub fn check_with(
        &mut self,
        name: impl Into<String>,
        value: f64,
        order: usize,
        threshold: f64,
    ) {
        let name = name.into();
        let pass = value <= threshold;
        if !pass {
            self.pass = false;
            self.failed.push(name.clone());
        }
        self.checks.push(Check {
            name,
            value,
            order,
            threshold,
            pass,
        });
    }

    pub fn residual(&mut self, prefix: &str, r: &Residual) {
        let name = if prefix.is_empty() {
            r.name.clone()
        } else {
            format!("{prefix}.{}", r.name)
        };
        self.check_with(name, r.value, r.order, self.tol());
    }

    pub fn residuals(&mut self, prefix: &str, rs: impl IntoIterator<Item = Residual>) {
        for r in rs {
            self.residual(prefix, &r);
        }
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        self.data.insert(key.to_string(), v);
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.pass = false;
        self.error = Some(message.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.provenance.notes.push(note.into());
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: {} (tol {:.1e}, order {})",
            self.task,
            if self.pass { "PASS" } else { "FAIL" },
            self.tol(),
            self.provenance.settings.order
        );
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  error: {e}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {} {:<44} {:>10.3e}  (order {}, threshold {:.1e})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.value,
                c.order,
                c.threshold
            );
        }
        s
    }
}
