//! Check records shared by every verifier and the CLI.

use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check (e.g. an empty generator list for an ideal).
    Vacuous,
}

/// Normal forms of the two sides of a failed (or reported) identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub subject: String,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    pub fn new(subject: impl ToString, lhs: impl ToString, rhs: impl ToString) -> Self {
        Witness { subject: subject.to_string(), lhs: lhs.to_string(), rhs: rhs.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Identifier of the identity being checked, stable across runs.
    pub anchor: String,
    pub status: Status,
    pub detail: String,
    pub witness: Option<Witness>,
    pub elapsed_us: u64,
}

/// Result of a single check before it is wrapped into a record.
#[derive(Clone, Debug)]
pub enum Outcome {
    Pass(String),
    Fail(Witness, String),
    Vacuous(String),
}

impl Outcome {
    /// Pass unless `witness` is present.
    pub fn from_witness(witness: Option<Witness>, pass: impl ToString, fail: impl ToString) -> Self {
        match witness {
            None => Outcome::Pass(pass.to_string()),
            Some(w) => Outcome::Fail(w, fail.to_string()),
        }
    }
}

/// Runs `f`, timing it.
pub fn check(name: impl ToString, anchor: &str, f: impl FnOnce() -> Outcome) -> CheckRecord {
    let start = Instant::now();
    let outcome = f();
    let elapsed_us = start.elapsed().as_micros() as u64;
    let (status, detail, witness) = match outcome {
        Outcome::Pass(d) => (Status::Pass, d, None),
        Outcome::Fail(w, d) => (Status::Fail, d, Some(w)),
        Outcome::Vacuous(d) => (Status::Vacuous, d, None),
    };
    CheckRecord { name: name.to_string(), anchor: anchor.to_string(), status, detail, witness, elapsed_us }
}

/// First item for which `f` produces a witness.
pub fn first_witness<T>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Option<Witness>) -> Option<Witness> {
    items.into_iter().find_map(|t| f(t))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub notes: Vec<String>,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn note(&mut self, text: &str) {
        if !self.notes.iter().any(|n| n == text) {
            self.notes.push(text.to_string());
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: Report) {
        for n in other.notes {
            self.note(&n);
        }
        self.records.extend(other.records);
    }

    /// True when no record failed. Vacuous records do not count as failures.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn zero_timings(&mut self) {
        for r in &mut self.records {
            r.elapsed_us = 0;
        }
    }
}

/// Note attached to every report that involves chart changes.
pub const NOTE_CHART_CHANGE: &str =
    "reconstructed chart-change convention: phi_ij(b (x) h) = sum b tau_ij(h_1) (x) h_2";
/// Note attached to every report that involves curvature.
pub const NOTE_CURVATURE: &str =
    "local curvature reconstruction: F = dA + A*A (left), F = dA - A(h_2)A(h_1) (right)";
/// Note attached to every report.
pub const NOTE_DEGREE: &str =
    "degree-bounded semantics: a pass asserts the identity on normal monomials up to the stated degree only";
/// Note attached to reports that convert between left and right transformations.
pub const NOTE_LEFT_RIGHT: &str = "right transformations are obtained as g_right = g_left o S^-1";
