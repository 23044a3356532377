//! Sample-based property certificates with witnesses.

use std::fmt;

use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// No sample could be evaluated (all skipped).
    Inconclusive,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::NotApplicable => "n/a",
        })
    }
}

/// A counterexample: the sampled inputs and the two sides that disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub inputs: Vec<(String, Series)>,
    pub sides: Vec<(String, Series)>,
    pub note: Option<String>,
}

impl Witness {
    pub fn new(inputs: Vec<(&str, Series)>, sides: Vec<(&str, Series)>) -> Self {
        Witness {
            inputs: inputs.into_iter().map(|(k, s)| (k.to_string(), s)).collect(),
            sides: sides.into_iter().map(|(k, s)| (k.to_string(), s)).collect(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub status: Status,
    pub evaluated: usize,
    pub skipped: usize,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl Default for Check {
    fn default() -> Self {
        Check {
            status: Status::Inconclusive,
            evaluated: 0,
            skipped: 0,
            witness: None,
            note: None,
        }
    }
}

impl Check {
    pub fn not_applicable(note: impl Into<String>) -> Self {
        Check {
            status: Status::NotApplicable,
            note: Some(note.into()),
            ..Check::default()
        }
    }

    pub(crate) fn pass(&mut self) {
        self.evaluated += 1;
        if self.status == Status::Inconclusive {
            self.status = Status::Pass;
        }
    }

    /// Records a failure; the first witness is kept.
    pub(crate) fn fail(&mut self, witness: Witness) {
        self.evaluated += 1;
        if self.status != Status::Fail {
            self.status = Status::Fail;
            self.witness = Some(witness);
        }
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        if ok {
            self.pass();
        } else {
            self.fail(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
