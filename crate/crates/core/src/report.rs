//! Itemized outcomes of exhaustive law checks.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The law's hypothesis does not hold for this input, so nothing was concluded.
    HypothesisUnmet,
}

/// A concrete counterexample: the elements involved and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub elements: Vec<String>,
    pub detail: String,
}

/// Outcome of checking one named law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub verdict: Verdict,
    /// Number of cases whose hypotheses held and were evaluated.
    pub checked: usize,
    /// Cases that held only up to information equivalence, not on the nose.
    pub up_to_equiv: usize,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LawCheck {
    pub fn new(law: impl Into<String>) -> Self {
        LawCheck {
            law: law.into(),
            verdict: Verdict::Pass,
            checked: 0,
            up_to_equiv: 0,
            witnesses: Vec::new(),
            note: None,
        }
    }

    /// A law that was not evaluated because its hypothesis failed.
    pub fn unmet(law: impl Into<String>, note: impl Into<String>) -> Self {
        let mut check = LawCheck::new(law);
        check.verdict = Verdict::HypothesisUnmet;
        check.note = Some(note.into());
        check
    }

    pub fn case(&mut self) {
        self.checked += 1;
    }

    pub fn equiv_only(&mut self) {
        self.up_to_equiv += 1;
    }

    pub fn fail<S: ToString>(
        &mut self,
        elements: impl IntoIterator<Item = S>,
        detail: impl Into<String>,
    ) {
        self.witnesses.push(Witness {
            elements: elements.into_iter().map(|s| s.to_string()).collect(),
            detail: detail.into(),
        });
        self.verdict = Verdict::Fail;
    }

    /// Record a boolean case outcome.
    pub fn expect<S: ToString>(
        &mut self,
        ok: bool,
        elements: impl IntoIterator<Item = S>,
        detail: impl FnOnce() -> String,
    ) {
        self.case();
        if !ok {
            self.fail(elements, detail());
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A list of law checks about one subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub subject: String,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new(subject: impl Into<String>) -> Self {
        LawReport {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: LawCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: LawReport) {
        self.checks.extend(other.checks);
    }

    /// True iff no law failed. Unmet hypotheses do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }

    pub fn get(&self, law: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }

    pub fn verdict(&self, law: &str) -> Option<Verdict> {
        self.get(law).map(|c| c.verdict)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&str, &Witness)> {
        self.checks
            .iter()
            .flat_map(|c| c.witnesses.iter().map(move |w| (c.law.as_str(), w)))
    }

    pub fn witness_count(&self) -> usize {
        self.checks.iter().map(|c| c.witnesses.len()).sum()
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        let width = self
            .checks
            .iter()
            .map(|c| c.law.chars().count())
            .max()
            .unwrap_or(0);
        for check in &self.checks {
            let verdict = match check.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::HypothesisUnmet => "hypothesis unmet",
            };
            write!(
                f,
                "  {:<width$}  {:<16} {} cases",
                check.law, verdict, check.checked
            )?;
            if check.up_to_equiv > 0 {
                write!(f, ", {} up to equivalence", check.up_to_equiv)?;
            }
            writeln!(f)?;
            if let Some(note) = &check.note {
                writeln!(f, "      note: {note}")?;
            }
            for w in &check.witnesses {
                writeln!(f, "      witness ({}): {}", w.elements.join(", "), w.detail)?;
            }
        }
        let status = if self.passed() {
            "all laws hold"
        } else {
            "law violations found"
        };
        write!(f, "  => {status}")
    }
}
