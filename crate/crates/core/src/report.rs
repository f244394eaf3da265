//! Verification reports: one row per checked quantity.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        })
    }
}

/// Where the expected value of a row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// A published reference value.
    Reference,
    /// Recomputed independently inside the verifier.
    Derived,
    /// Solved from other checked values rather than measured.
    Calibrated,
    /// A structural identity that must hold exactly.
    Structural,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub genus: Option<u32>,
    pub quantity: String,
    pub source: String,
    pub basis: Basis,
    pub expected: String,
    pub computed: String,
    pub status: Status,
    /// Wall time of the enclosing scenario; excluded from comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub suite: String,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Adds a row comparing two displayable values.
    pub fn check<T: fmt::Display + PartialEq>(
        &mut self,
        genus: Option<u32>,
        quantity: impl Into<String>,
        source: impl Into<String>,
        basis: Basis,
        expected: T,
        computed: T,
    ) -> bool {
        let ok = expected == computed;
        self.rows.push(Row {
            genus,
            quantity: quantity.into(),
            source: source.into(),
            basis,
            expected: expected.to_string(),
            computed: computed.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            millis: None,
        });
        ok
    }

    /// A row recording a value that is reported but not judged.
    pub fn note(&mut self, genus: Option<u32>, quantity: impl Into<String>, source: impl Into<String>, computed: impl fmt::Display) {
        self.rows.push(Row {
            genus,
            quantity: quantity.into(),
            source: source.into(),
            basis: Basis::Derived,
            expected: "-".into(),
            computed: computed.to_string(),
            status: Status::Pass,
            millis: None,
        });
    }

    pub fn inconclusive(&mut self, genus: Option<u32>, quantity: impl Into<String>, source: impl Into<String>, detail: impl fmt::Display) {
        self.rows.push(Row {
            genus,
            quantity: quantity.into(),
            source: source.into(),
            basis: Basis::Structural,
            expected: "-".into(),
            computed: detail.to_string(),
            status: Status::Inconclusive,
            millis: None,
        });
    }

    pub fn fail(&mut self, genus: Option<u32>, quantity: impl Into<String>, source: impl Into<String>, detail: impl fmt::Display) {
        self.rows.push(Row {
            genus,
            quantity: quantity.into(),
            source: source.into(),
            basis: Basis::Structural,
            expected: "-".into(),
            computed: detail.to_string(),
            status: Status::Fail,
            millis: None,
        });
    }

    /// Sets the timing of every row.
    pub fn stamp(&mut self, millis: u64) {
        for r in &mut self.rows {
            r.millis = Some(millis);
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    /// Worst status over all rows; an empty report is inconclusive.
    pub fn status(&self) -> Status {
        self.rows.iter().map(|r| r.status).max().unwrap_or(Status::Inconclusive)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            suite: &'a str,
            #[serde(flatten)]
            row: &'a Row,
        }
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(&Line { suite: &self.suite, row }).expect("rows serialize"));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.suite)?;
        for r in &self.rows {
            let g = r.genus.map_or_else(|| "  ".to_string(), |g| format!("{g:>2}"));
            writeln!(
                f,
                "{:<12} g={} {:<44} expected {:>8}  computed {:>8}  [{:?}; {}]",
                r.status.to_string(),
                g,
                r.quantity,
                r.expected,
                r.computed,
                r.basis,
                r.source
            )?;
        }
        writeln!(f, "-- {}: {}", self.suite, self.status())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_wins() {
        let mut r = Report::new("t");
        assert_eq!(r.status(), Status::Inconclusive);
        r.check(Some(7), "a", "s", Basis::Derived, 1, 1);
        assert!(r.passed());
        r.inconclusive(None, "b", "s", "bound 8");
        assert_eq!(r.status(), Status::Inconclusive);
        r.check(None, "c", "s", Basis::Reference, 2, 3);
        assert_eq!(r.status(), Status::Fail);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn jsonl_has_one_line_per_row() {
        let mut r = Report::new("chow");
        r.check(Some(9), "E^4", "blowup", Basis::Reference, -1, -1);
        r.check(Some(9), "D^4", "blowup", Basis::Reference, 3, 3);
        let s = r.to_jsonl();
        assert_eq!(s.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(s.lines().next().unwrap()).unwrap();
        assert_eq!(v["suite"], "chow");
        assert_eq!(v["status"], "pass");
        assert_eq!(v["genus"], 9);
    }
}
