//! Named pass/fail checks shared by the verification suites.

use crate::graded_algebra::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Canonical rendering of the first nonzero residual, if any.
    pub residual: Option<String>,
    /// Number of terms in that residual.
    pub residual_terms: usize,
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            holds,
            residual: None,
            residual_terms: 0,
            detail: None,
        }
    }

    pub fn residual(name: impl Into<String>, r: &Poly) -> Self {
        Check {
            name: name.into(),
            holds: r.is_zero(),
            residual: (!r.is_zero()).then(|| r.to_string()),
            residual_terms: r.len(),
            detail: None,
        }
    }

    /// Passes when all residuals vanish; keeps the first nonzero one.
    pub fn residuals<'a>(name: impl Into<String>, rs: impl IntoIterator<Item = &'a Poly>) -> Self {
        let mut c = Check::flag(name, true);
        for r in rs {
            if !r.is_zero() {
                c.holds = false;
                c.residual = Some(r.to_string());
                c.residual_terms = r.len();
                break;
            }
        }
        c
    }

    /// Equality check rendered as a residual `left − right`.
    pub fn equal(name: impl Into<String>, left: &Poly, right: &Poly) -> Self {
        Check::residual(name, &(left - right))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }
}
