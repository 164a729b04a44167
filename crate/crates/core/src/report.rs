//! Residual reports shared by every verifier.
//!
//! A check carries the raw residual; `pass` is derived from a tolerance and
//! can be recomputed with [`Report::retol`]. NaN never passes.

use serde::{Deserialize, Serialize};

use crate::linop::TOL;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub axiom: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Observation {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub title: String,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
}

fn passes(residual: f64, tol: f64) -> bool {
    residual.is_finite() && residual < tol
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), tol: TOL, checks: Vec::new(), observations: Vec::new() }
    }

    pub fn check(&mut self, axiom: impl Into<String>, residual: f64) {
        let pass = passes(residual, self.tol);
        self.checks.push(Check { axiom: axiom.into(), residual, pass });
    }

    /// A yes/no assertion, recorded with residual 0 or 1.
    pub fn assert(&mut self, axiom: impl Into<String>, ok: bool) {
        self.check(axiom, if ok { 0.0 } else { 1.0 });
    }

    pub fn observe(&mut self, name: impl Into<String>, value: impl ToString) {
        self.observations.push(Observation { name: name.into(), value: value.to_string() });
    }

    /// Appends another report's entries under `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            self.check(format!("{prefix}.{}", c.axiom), c.residual);
        }
        for o in other.observations {
            self.observe(format!("{prefix}.{}", o.name), o.value);
        }
    }

    pub fn retol(&mut self, tol: f64) {
        self.tol = tol;
        for c in &mut self.checks {
            c.pass = passes(c.residual, tol);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
    }

    pub fn get(&self, axiom: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn residual(&self, axiom: &str) -> f64 {
        self.get(axiom).map_or(f64::NAN, |c| c.residual)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// Sorts checks and observations by name for reproducible output.
    pub fn sorted(mut self) -> Self {
        self.checks.sort_by(|a, b| a.axiom.cmp(&b.axiom));
        self.observations.sort_by(|a, b| a.name.cmp(&b.name));
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("  {tag}  {:<48} {:.3e}\n", c.axiom, c.residual));
        }
        for o in &self.observations {
            out.push_str(&format!("  note  {:<48} {}\n", o.name, o.value));
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} (max residual {:.3e}, tol {:.1e})\n", self.max_residual(), self.tol));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_and_retol() {
        let mut r = Report::new("t");
        r.check("b", 1e-6);
        r.check("a", f64::NAN);
        assert!(!r.passed());
        assert!(r.max_residual().is_nan());
        let mut r = Report::new("t");
        r.check("b", 1e-6);
        assert!(!r.passed());
        r.retol(1e-5);
        assert!(r.passed());
        r.assert("c", true);
        let r = r.sorted();
        assert_eq!(r.checks[0].axiom, "b");
    }
}
