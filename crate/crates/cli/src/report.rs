use std::fmt::Write as _;

/// One verified quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    /// What the check certifies, or "plumbing".
    pub anchor: String,
    pub grid: usize,
    pub value: f64,
    pub tolerance: f64,
    /// `value < tolerance` unless the check is inverted (a lower bound).
    pub lower_bound: bool,
    pub order: Option<f64>,
    pub passed: bool,
    pub note: String,
}

impl CheckRecord {
    pub fn below(name: &str, anchor: &str, grid: usize, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            grid,
            value,
            tolerance,
            lower_bound: false,
            order: None,
            passed: value.is_finite() && value < tolerance,
            note: String::new(),
        }
    }

    pub fn above(name: &str, anchor: &str, grid: usize, value: f64, tolerance: f64) -> Self {
        Self { lower_bound: true, passed: value.is_finite() && value > tolerance, ..Self::below(name, anchor, grid, value, tolerance) }
    }

    /// Failure carrying only a message, for computations that errored.
    pub fn errored(name: &str, anchor: &str, grid: usize, err: impl std::fmt::Display) -> Self {
        Self { passed: false, note: err.to_string(), ..Self::below(name, anchor, grid, f64::NAN, f64::NAN) }
    }

    pub fn with_order(mut self, order: f64, min_order: f64) -> Self {
        self.order = Some(order);
        self.passed &= order >= min_order;
        if order < min_order {
            self.note = format!("order {order:.3} below {min_order}");
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Checks plus the flags they were run under.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub flags: Vec<(String, String)>,
    pub records: Vec<CheckRecord>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn flag(&mut self, key: &str, value: impl ToString) {
        self.flags.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// `key = value` header, then one `|`-separated line per record.
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "command = {}", self.command).unwrap();
        for (k, v) in &self.flags {
            writeln!(s, "{k} = {v}").unwrap();
        }
        writeln!(s, "status | name | anchor | grid | value | tolerance | order | note").unwrap();
        for r in &self.records {
            let cmp = if r.lower_bound { ">" } else { "<" };
            let order = r.order.map_or("-".to_string(), |o| format!("{o:.3}"));
            let tolerance = if r.tolerance.is_nan() { "-".to_string() } else { format!("{cmp} {:.1e}", r.tolerance) };
            writeln!(
                s,
                "{} | {} | {} | {} | {:.6e} | {} | {} | {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.anchor,
                r.grid,
                r.value,
                tolerance,
                order,
                r.note
            )
            .unwrap();
        }
        let failed = self.failures().count();
        writeln!(s, "summary: {} checks, {} failed", self.records.len(), failed).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_order() {
        assert!(CheckRecord::below("x", "plumbing", 1, 1e-9, 1e-6).passed);
        assert!(!CheckRecord::below("x", "plumbing", 1, f64::NAN, 1e-6).passed);
        assert!(CheckRecord::above("x", "plumbing", 1, 2.0, 1.0).passed);
        assert!(!CheckRecord::below("x", "plumbing", 1, 1e-9, 1e-6).with_order(1.5, 1.9).passed);
    }

    #[test]
    fn render_lists_every_record() {
        let mut r = RunReport::new("verify");
        r.flag("negative_control", false);
        r.push(CheckRecord::below("a", "plumbing", 8, 0.0, 1.0));
        r.push(CheckRecord::errored("b", "plumbing", 8, "boom"));
        let text = r.render();
        assert!(text.contains("PASS | a") && text.contains("FAIL | b") && text.contains("1 failed"));
        assert!(!r.passed());
    }
}
