//! Audit reports and their text serializations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::params::DrParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }
}

/// A named premise of a check with the constant it was measured at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub pass: bool,
    pub constant: f64,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, pass: bool, constant: f64) -> Self {
        Self {
            name: name.into(),
            pass,
            constant,
        }
    }
}

/// The space a report was produced on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub m: u32,
    pub k: u32,
    pub q: f64,
    pub d: u32,
}

/// Outcome of one audit: per-grid-point sides of an inequality plus the
/// constants it implies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: SpaceSummary,
    pub grid: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub ratio_sup: f64,
    pub ratio_inf: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub verdict: Verdict,
    pub tolerances: BTreeMap<String, f64>,
    /// Named constants measured along the way.
    pub summary: BTreeMap<String, f64>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

impl CheckReport {
    pub fn new(name: &str, params: &DrParams) -> Self {
        Self {
            check_name: name.to_string(),
            params: SpaceSummary {
                m: params.m(),
                k: params.k(),
                q: params.q(),
                d: params.d(),
            },
            grid: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            ratio_sup: 0.0,
            ratio_inf: 0.0,
            hypotheses: Vec::new(),
            verdict: Verdict::Inconclusive,
            tolerances: BTreeMap::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, grid: f64, lhs: f64, rhs: f64) {
        self.grid.push(grid);
        self.lhs.push(lhs);
        self.rhs.push(rhs);
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.lhs.iter().zip(&self.rhs).map(|(&l, &r)| ratio(l, r))
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.pass)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    /// Fixes the ratio extrema and the verdict. A `Pass` from `decide` is
    /// downgraded to `Fail` unless every hypothesis holds and `ratio_sup` is finite.
    pub fn finish<F: FnOnce(&CheckReport) -> Verdict>(&mut self, decide: F) {
        let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
        for r in self.ratios() {
            sup = sup.max(r);
            inf = inf.min(r);
        }
        if self.grid.is_empty() {
            sup = 0.0;
            inf = 0.0;
        }
        self.ratio_sup = sup;
        self.ratio_inf = inf;
        let v = decide(self);
        self.verdict = if v == Verdict::Pass && !(self.hypotheses_hold() && sup.is_finite()) {
            Verdict::Fail
        } else {
            v
        };
    }

    /// `grid,lhs,rhs,ratio` CSV with full-precision scientific notation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("grid,lhs,rhs,ratio\n");
        for ((g, l), r) in self.grid.iter().zip(&self.lhs).zip(&self.rhs) {
            let _ = writeln!(s, "{g:.16e},{l:.16e},{r:.16e},{:.16e}", ratio(*l, *r));
        }
        s
    }

    /// Fixed-width table followed by a `key = value` summary block.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# check {} on (m, k) = ({}, {}), Q = {}, d = {}",
            self.check_name, self.params.m, self.params.k, self.params.q, self.params.d
        );
        let _ = writeln!(s, "{:>25} {:>25} {:>25} {:>25}", "grid", "lhs", "rhs", "ratio");
        for ((g, l), r) in self.grid.iter().zip(&self.lhs).zip(&self.rhs) {
            let _ = writeln!(
                s,
                "{g:>25.16e} {l:>25.16e} {r:>25.16e} {:>25.16e}",
                ratio(*l, *r)
            );
        }
        let _ = writeln!(s, "# summary");
        let _ = writeln!(s, "verdict = {}", self.verdict.as_str());
        let _ = writeln!(s, "ratio_sup = {:.16e}", self.ratio_sup);
        let _ = writeln!(s, "ratio_inf = {:.16e}", self.ratio_inf);
        for h in &self.hypotheses {
            let _ = writeln!(
                s,
                "hypothesis.{} = {} ({:.16e})",
                h.name,
                if h.pass { "pass" } else { "fail" },
                h.constant
            );
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k} = {v:.16e}");
        }
        for (k, v) in &self.tolerances {
            let _ = writeln!(s, "tolerance.{k} = {v:.16e}");
        }
        s
    }
}
