use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

/// Summary of one CLI run, printed to standard output.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub wall_time: Duration,
    /// Named numeric results such as residuals and fitted slopes.
    pub values: Vec<(String, f64)>,
    /// Free-form result lines (check outcomes, counterexamples).
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    /// Set when the run finished but its numerical acceptance test failed.
    pub failure: Option<String>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        RunReport {
            command,
            wall_time: Duration::ZERO,
            values: Vec::new(),
            lines: Vec::new(),
            warnings: Vec::new(),
            files: Vec::new(),
            failure: None,
        }
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.push((name.into(), v));
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failure = Some(msg.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.failure.is_some() {
            3
        } else {
            0
        }
    }
}

fn number(v: f64) -> String {
    let a = v.abs();
    if v.fract() == 0.0 && a < 1e15 {
        format!("{v:.0}")
    } else if (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command: {}", self.command)?;
        writeln!(f, "wall_time_s: {:.3}", self.wall_time.as_secs_f64())?;
        for (name, v) in &self.values {
            writeln!(f, "{name}: {}", number(*v))?;
        }
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        writeln!(f, "files:")?;
        for p in &self.files {
            writeln!(f, "  {}", p.display())?;
        }
        match &self.failure {
            Some(msg) => write!(f, "status: FAILED ({msg})"),
            None => write!(f, "status: ok"),
        }
    }
}
