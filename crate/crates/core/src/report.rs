//! Verdicts emitted by the verification sweeps.

use serde::Serialize;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub struct Coverage {
    #[serde(rename = "R")]
    pub radius: u32,
    #[serde(rename = "R_t")]
    pub translate_radius: u32,
    #[serde(rename = "W")]
    pub window: u32,
}

/// Outcome of one exhaustive check.
///
/// `anchor` names the identity being verified, e.g.
/// `"alpha(gh,x) = alpha(g,hx) alpha(h,x)"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub anchor: String,
    pub pass: bool,
    pub checked: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
}

impl Verdict {
    pub fn new(check: &str, anchor: &str) -> Verdict {
        Verdict {
            check: check.into(),
            anchor: anchor.into(),
            pass: true,
            checked: 0,
            failures: 0,
            witnesses: Vec::new(),
            coverage: None,
        }
    }

    pub fn with_coverage(mut self, coverage: Coverage) -> Verdict {
        self.coverage = Some(coverage);
        self
    }

    /// Counts one instance; on failure keeps the witness (up to a cap).
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.pass = false;
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// Records a failure that is not tied to a counted instance.
    pub fn fail(&mut self, witness: String) {
        self.pass = false;
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn first_witness(&self) -> Option<&str> {
        self.witnesses.first().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_are_capped() {
        let mut v = Verdict::new("demo", "x = x");
        for k in 0..20 {
            v.record(k % 2 == 0, || format!("case {k}"));
        }
        assert!(!v.pass);
        assert_eq!((v.checked, v.failures), (20, 10));
        assert_eq!(v.witnesses.len(), MAX_WITNESSES);
        assert_eq!(v.first_witness(), Some("case 1"));
    }
}
