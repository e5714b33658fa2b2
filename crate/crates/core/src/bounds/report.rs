//! Report types shared by the sandwich checks, the CLI and the suite.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::Theorem;
use crate::psi::PsiFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Full parameter echo of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub psi: PsiFunction,
    pub beta: f64,
    /// Class exponent `p` (1 for the `L^ψ_{β,1}` classes).
    pub p: f64,
    /// Error metric exponent `s` (`null` in JSON for the uniform metric).
    #[serde(with = "infinite_as_null")]
    pub s: f64,
    pub n: u64,
    /// Dual-functional parameter actually used.
    pub l: Option<u64>,
}

/// Error accounting per stage, all as absolute quantities unless named `_rel`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Budgets {
    /// Verdict tolerance (relative).
    pub tol: f64,
    /// Relative half-width of the certified tail-sum bracket.
    pub tail_sum_rel: f64,
    /// Series mass dropped by truncating the extremal function, relative to `T_n`.
    pub truncation_rel: f64,
    /// Sup-norm bound on the dropped part of the extremal function.
    pub truncation_sup: f64,
    /// Bernstein gap between the attained and the certified sup-norm.
    pub sup_gap: f64,
    /// Relative safety margin added to the numerically integrated dual norm.
    pub dual_norm_rel: f64,
    /// Norm of the (ψ,β)-derivative of the extremal function.
    pub membership_norm: f64,
}

/// Result of one sandwich verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub theorem: Theorem,
    pub params: Params,
    /// Theorem lower bound for the class.
    pub lower: f64,
    /// Theorem upper bound for the class.
    pub upper: f64,
    /// Certified interval for `e⊥_{2n}` of the extremal function.
    pub measured: [f64; 2],
    /// Analytic dual lower bound at the `l` used.
    pub dual_lower: f64,
    pub verdict: Verdict,
    pub budgets: Budgets,
    pub notes: Vec<String>,
}

impl BoundsReport {
    /// A report for a run that could not be carried out.
    pub fn failed(theorem: Theorem, params: Params, reason: String) -> Self {
        BoundsReport {
            theorem,
            params,
            lower: f64::NAN,
            upper: f64::NAN,
            measured: [f64::NAN, f64::NAN],
            dual_lower: f64::NAN,
            verdict: Verdict::Fail,
            budgets: Budgets::default(),
            notes: vec![reason],
        }
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_keys() {
        let params = Params {
            psi: PsiFunction::power(2.0).unwrap(),
            beta: 1.0,
            p: 1.0,
            s: f64::INFINITY,
            n: 2,
            l: None,
        };
        let r = BoundsReport::failed(Theorem::T4, params.clone(), "x".into());
        let v = serde_json::to_value(&r).unwrap();
        for key in ["theorem", "params", "lower", "upper", "measured", "verdict"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["verdict"], "Fail");
        assert_eq!(v["theorem"], "T4");
        assert!(v["params"]["s"].is_null());
        let back: Params = serde_json::from_value(v["params"].clone()).unwrap();
        assert_eq!(back, params);
    }
}
