//! Fixed table of runnable checks.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CheckName {
    PhiBounds,
    Forward,
    Dyadic,
    ConverseHypotheses,
    Converse,
    Lipcor,
    Besov,
    Holder,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::PhiBounds,
        CheckName::Forward,
        CheckName::Dyadic,
        CheckName::ConverseHypotheses,
        CheckName::Converse,
        CheckName::Lipcor,
        CheckName::Besov,
        CheckName::Holder,
    ];

    /// Stable name used in reports and output file names.
    pub fn canonical(self) -> &'static str {
        match self {
            CheckName::PhiBounds => "lemma-phi-bounds",
            CheckName::Forward => "thm-forward",
            CheckName::Dyadic => "lem-dyadic",
            CheckName::ConverseHypotheses => "converse-hypotheses",
            CheckName::Converse => "thm-converse",
            CheckName::Lipcor => "cor-lipcor",
            CheckName::Besov => "thm-besov",
            CheckName::Holder => "thm-holder",
        }
    }

    /// Name of the library function behind the check.
    pub fn function(self) -> &'static str {
        match self {
            CheckName::PhiBounds => "phi_bounds_audit",
            CheckName::Forward => "forward_titchmarsh",
            CheckName::Dyadic => "dyadic_shell_equiv",
            CheckName::ConverseHypotheses => "converse_hypotheses",
            CheckName::Converse => "converse_titchmarsh",
            CheckName::Lipcor => "lipcor_two_sided",
            CheckName::Besov => "besov_check",
            CheckName::Holder => "holder_integrability",
        }
    }

    /// Accepts either the canonical or the function name.
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.canonical() == s || c.function() == s)
    }

    pub fn known() -> Vec<&'static str> {
        Self::ALL.iter().map(|c| c.canonical()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(CheckName::parse(c.canonical()), Some(c));
            assert_eq!(CheckName::parse(c.function()), Some(c));
        }
        assert_eq!(CheckName::parse("thm-foo"), None);
    }
}
