//! Exact correlation record shared by the enumeration and closed-form routes.

use crate::dyadic::{DyadicProb, Sign, SignedDyadic};

/// Exact probabilities of `C = {a -> s}`, `D = {s -> b}`, `C ∩ D` and the
/// covariance `P(C ∩ D) - P(C) P(D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleCorrelation {
    pub p_c: DyadicProb,
    pub p_d: DyadicProb,
    pub p_cd: DyadicProb,
    pub cov: SignedDyadic,
}

impl TripleCorrelation {
    pub fn from_probabilities(p_c: DyadicProb, p_d: DyadicProb, p_cd: DyadicProb) -> Self {
        let cov = p_cd.minus(&p_c.mul(&p_d));
        TripleCorrelation { p_c, p_d, p_cd, cov }
    }

    pub fn sign(&self) -> Sign {
        self.cov.sign()
    }

    /// `P(A)` for the complement `A = {a -/-> s}`.
    pub fn p_a(&self) -> DyadicProb {
        self.p_c.complement()
    }

    pub fn p_b(&self) -> DyadicProb {
        self.p_d.complement()
    }

    /// `P(A ∩ B) = 1 - P(C) - P(D) + P(C ∩ D)`.
    pub fn p_ab(&self) -> DyadicProb {
        let v = SignedDyadic::from(DyadicProb::one())
            .sub(&SignedDyadic::from(&self.p_c))
            .sub(&SignedDyadic::from(&self.p_d))
            .add(&SignedDyadic::from(&self.p_cd));
        v.magnitude().clone()
    }
}
