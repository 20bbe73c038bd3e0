//! Verdicts, witnesses and search budgets shared by every checker.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Three-valued outcome of an empirical check.
///
/// `Pass` means witnesses were found for every probed value and no
/// counterexample exists within the budget; it is never a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// The worse of two verdicts (fail > inconclusive > pass).
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        })
    }
}

/// Structural axioms a premetric may claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Nonnegative,
    Symmetric,
    Triangle,
    /// `p(x,y) <= p(x,z) + r(z,y)`
    MixedLeft,
    /// `p(x,y) <= r(x,z) + p(z,y)`
    MixedRight,
    /// Triangle inequality of the companion `r`.
    CompanionTriangle,
}

/// Regularity properties a gauge may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regularity {
    Nondecreasing,
    RightContinuous,
    Continuous,
    PositiveOnPositive,
    ZeroAtZero,
    StrictlyBelowIdentity,
    UpperSemicontinuous,
    RightUpperSemicontinuous,
}

impl Regularity {
    pub const ALL: [Regularity; 8] = [
        Regularity::Nondecreasing,
        Regularity::RightContinuous,
        Regularity::Continuous,
        Regularity::PositiveOnPositive,
        Regularity::ZeroAtZero,
        Regularity::StrictlyBelowIdentity,
        Regularity::UpperSemicontinuous,
        Regularity::RightUpperSemicontinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regularity::Nondecreasing => "nondecreasing",
            Regularity::RightContinuous => "right_continuous",
            Regularity::Continuous => "continuous",
            Regularity::PositiveOnPositive => "positive_on_positive",
            Regularity::ZeroAtZero => "zero_at_zero",
            Regularity::StrictlyBelowIdentity => "strictly_below_identity",
            Regularity::UpperSemicontinuous => "upper_semicontinuous",
            Regularity::RightUpperSemicontinuous => "right_upper_semicontinuous",
        }
    }

    pub fn from_name(name: &str) -> Option<Regularity> {
        Regularity::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identifies the condition a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    D1,
    D2,
    D3,
    D4,
    E1,
    E2,
    /// (F, psi)-contraction inequality.
    Fpsi,
    /// Cyclic structure `T(A) ⊂ B`, `T(B) ⊂ A`.
    Cyc,
    /// Vanishing p-gaps force vanishing d-gaps.
    Pcd,
    Axiom(Axiom),
    Regularity(Regularity),
    /// Step inequality `F(p(x_{n+1}, x_n)) <= psi(F(p(x_n, x_{n-1})))` along a trace.
    StepContraction,
    PointStep,
    /// Uniform contraction factor below one.
    BanachRate,
    /// Tail supremum diagnostic `sup_{m>n} p(x_n, x_m)`.
    Cauchy,
    /// Separated index triples refuting the Cauchy property.
    NonCauchy,
    /// Consecutive gaps tend to the set gap and even steps collapse.
    EvenCollapse,
    /// Consecutive gaps of a companion premetric tend to zero.
    GapDecay,
    FixedPoint,
    BestProximity,
    CommonFixedPoint,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionId::Axiom(a) => {
                let s = match a {
                    Axiom::Nonnegative => "AX-NONNEGATIVE",
                    Axiom::Symmetric => "AX-SYMMETRIC",
                    Axiom::Triangle => "AX-TRIANGLE",
                    Axiom::MixedLeft => "AX-MIXED-LEFT",
                    Axiom::MixedRight => "AX-MIXED-RIGHT",
                    Axiom::CompanionTriangle => "AX-COMPANION-TRIANGLE",
                };
                f.write_str(s)
            }
            ConditionId::Regularity(r) => write!(f, "REG-{}", r.name().to_ascii_uppercase()),
            other => f.write_str(match other {
                ConditionId::C1 => "C1",
                ConditionId::C2 => "C2",
                ConditionId::C3 => "C3",
                ConditionId::C4 => "C4",
                ConditionId::C5 => "C5",
                ConditionId::C6 => "C6",
                ConditionId::C7 => "C7",
                ConditionId::C8 => "C8",
                ConditionId::C9 => "C9",
                ConditionId::D1 => "D1",
                ConditionId::D2 => "D2",
                ConditionId::D3 => "D3",
                ConditionId::D4 => "D4",
                ConditionId::E1 => "E1",
                ConditionId::E2 => "E2",
                ConditionId::Fpsi => "FPSI",
                ConditionId::Cyc => "CYC",
                ConditionId::Pcd => "PCD",
                ConditionId::StepContraction => "FPSI-STEP",
                ConditionId::PointStep => "FPSI-POINT",
                ConditionId::BanachRate => "BANACH-RATE",
                ConditionId::Cauchy => "CAUCHY",
                ConditionId::NonCauchy => "NON-CAUCHY",
                ConditionId::EvenCollapse => "EVEN-COLLAPSE",
                ConditionId::GapDecay => "GAP-DECAY",
                ConditionId::FixedPoint => "FIXED-POINT",
                ConditionId::BestProximity => "BEST-PROXIMITY",
                ConditionId::CommonFixedPoint => "COMMON-FIXED-POINT",
                ConditionId::Axiom(_) | ConditionId::Regularity(_) => unreachable!(),
            }),
        }
    }
}

impl Serialize for ConditionId {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Numeric evidence attached to a verdict.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn nu(mut self, nu: usize) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn indices(mut self, indices: &[usize]) -> Self {
        self.indices = indices.to_vec();
        self
    }

    pub fn values(mut self, values: &[f64]) -> Self {
        self.values = values.to_vec();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Quantifier ranges for the epsilon/delta/nu searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchBudget {
    pub eps_grid: Vec<f64>,
    pub delta_candidates: Vec<f64>,
    pub nu_horizon: usize,
    pub index_horizon: usize,
    pub pair_samples: usize,
    pub slack: f64,
    /// Extra epsilon probes placed just below observed gap values.
    pub probes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            eps_grid: alloc::vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            delta_candidates: (0..=20).map(|k| libm::ldexp(1.0, -k)).collect(),
            nu_horizon: 64,
            index_horizon: 256,
            pair_samples: 200,
            slack: 1e-9,
            probes: 8,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::Config(
                "eps_grid must be non-empty and positive".into(),
            ));
        }
        if self.delta_candidates.is_empty()
            || self
                .delta_candidates
                .iter()
                .any(|d| !(*d > 0.0 && d.is_finite()))
        {
            return Err(Error::Config(
                "delta_candidates must be non-empty and positive".into(),
            ));
        }
        if self.delta_candidates.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(
                "delta_candidates must be strictly decreasing".into(),
            ));
        }
        if self.nu_horizon == 0 || self.index_horizon == 0 || self.pair_samples == 0 {
            return Err(Error::Config(
                "horizons and sample counts must be positive".into(),
            ));
        }
        if !(self.slack > 0.0 && self.slack.is_finite()) {
            return Err(Error::Config("slack must be positive".into()));
        }
        Ok(())
    }

    /// Scales horizons and sample counts by `factor` (at least 1 each).
    pub fn scaled(&self, factor: f64) -> SearchBudget {
        let scale = |v: usize| (libm::round(v as f64 * factor) as usize).max(1);
        SearchBudget {
            nu_horizon: scale(self.nu_horizon),
            index_horizon: scale(self.index_horizon),
            pair_samples: scale(self.pair_samples),
            ..self.clone()
        }
    }

    /// Minimum trace length for trace-level checks.
    pub fn required_len(&self) -> usize {
        self.index_horizon + self.nu_horizon + 1
    }

    pub fn smallest_delta(&self) -> f64 {
        *self.delta_candidates.last().unwrap_or(&1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub condition_id: ConditionId,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    #[serde(rename = "budget_used", skip_serializing_if = "Option::is_none")]
    pub budget: Option<SearchBudget>,
    pub resolution_note: String,
}

impl CertificateReport {
    pub fn new(condition_id: ConditionId, verdict: Verdict, note: impl Into<String>) -> Self {
        CertificateReport {
            condition_id,
            verdict,
            witnesses: Vec::new(),
            budget: None,
            resolution_note: note.into(),
        }
    }

    pub fn with_budget(mut self, budget: &SearchBudget) -> Self {
        self.budget = Some(budget.clone());
        self
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn with_witnesses(mut self, ws: Vec<Witness>) -> Self {
        self.witnesses.extend(ws);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Worst verdict among `reports` (pass when empty).
pub fn overall(reports: &[CertificateReport]) -> Verdict {
    reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budget_matches_documented_values() {
        let b = SearchBudget::default();
        assert_eq!(b.eps_grid.len(), 7);
        assert_eq!(b.eps_grid[0], 1.0);
        assert!((b.eps_grid[6] - 1e-6).abs() < 1e-20);
        assert_eq!(b.delta_candidates.len(), 21);
        assert_eq!(b.smallest_delta(), 1.0 / 1048576.0);
        assert_eq!((b.nu_horizon, b.index_horizon), (64, 256));
        b.validate().unwrap();
    }

    #[test]
    fn budget_validation() {
        let mut b = SearchBudget::default();
        b.delta_candidates = alloc::vec![0.5, 1.0];
        assert!(b.validate().is_err());
        let mut b = SearchBudget::default();
        b.eps_grid.push(-1.0);
        assert!(b.validate().is_err());
        assert_eq!(SearchBudget::default().scaled(0.5).nu_horizon, 32);
    }

    #[test]
    fn verdict_order() {
        assert_eq!(
            Verdict::Pass.and(Verdict::Inconclusive),
            Verdict::Inconclusive
        );
        assert_eq!(Verdict::Fail.and(Verdict::Inconclusive), Verdict::Fail);
    }

    #[test]
    fn condition_names() {
        use alloc::string::ToString;
        assert_eq!(ConditionId::Fpsi.to_string(), "FPSI");
        assert_eq!(
            ConditionId::Regularity(Regularity::RightContinuous).to_string(),
            "REG-RIGHT_CONTINUOUS"
        );
        assert_eq!(
            ConditionId::Axiom(Axiom::MixedLeft).to_string(),
            "AX-MIXED-LEFT"
        );
    }
}
