//! Line-oriented reports: `check=<name> status=<pass|fail|skip> residual=<value>`
//! plus `# key=value` information lines.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn info(&mut self, key: &str, value: impl fmt::Display) {
        self.lines.push(format!("# {key}={value}"));
    }

    /// Passes when `residual < tol`; a NaN residual fails.
    pub fn check(&mut self, name: &str, residual: f64, tol: f64) -> Status {
        let status = if residual < tol { Status::Pass } else { Status::Fail };
        self.push(name, status, residual);
        status
    }

    /// A boolean outcome with the residual reported alongside.
    pub fn check_that(&mut self, name: &str, ok: bool, residual: f64) -> Status {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(name, status, residual);
        status
    }

    pub fn skip(&mut self, name: &str, reason: &str) {
        self.push(name, Status::Skip, f64::NAN);
        self.info(&format!("{name}.skipped"), reason);
    }

    fn push(&mut self, name: &str, status: Status, residual: f64) {
        if status == Status::Fail {
            self.failures += 1;
        }
        self.lines
            .push(format!("check={name} status={status} residual={residual:.6e}"));
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn extend(&mut self, other: Report) {
        self.failures += other.failures;
        self.lines.extend(other.lines);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
