//! Pearson correlations and the sign rules that tie them to attribute gaps.
//!
//! Each attribute gap has an associated correlation whose sign it shares:
//! LAFP ↔ r(d, a), SAFP ↔ r(δ, a), LWAFP ↔ r(w, a), SWAFP ↔ r(γ, a).
//! The gap and correlation numerators are the same centered cross sum, so the
//! sign match is an identity rather than an approximation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeQuantities;
use crate::metrics::{GapReport, Paradox};
use crate::stats::{centered_cross_sum, is_constant};

/// A defined correlation with |r| at or below this counts as exactly zero.
pub const EPS_CORR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndefinedReason {
    ConstantFirst,
    ConstantSecond,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Correlation {
    Defined(f64),
    Undefined(UndefinedReason),
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Correlation::Defined(_))
    }

    /// -1, 0 or 1 with |r| ≤ [`EPS_CORR`] mapped to 0; `None` when undefined.
    pub fn sign(&self) -> Option<i8> {
        self.value().map(|r| {
            if r.abs() <= EPS_CORR {
                0
            } else if r < 0.0 {
                -1
            } else {
                1
            }
        })
    }
}

/// Two-pass Pearson correlation.
///
/// Undefined when either sequence has zero variance; sequences shorter than
/// two elements are treated as constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch(x.len(), y.len()));
    }
    let sxx = centered_cross_sum(x, x);
    let syy = centered_cross_sum(y, y);
    let flat_x = x.len() < 2 || is_constant(x) || sxx == 0.0;
    let flat_y = y.len() < 2 || is_constant(y) || syy == 0.0;
    match (flat_x, flat_y) {
        (true, true) => return Ok(Correlation::Undefined(UndefinedReason::Both)),
        (true, false) => return Ok(Correlation::Undefined(UndefinedReason::ConstantFirst)),
        (false, true) => return Ok(Correlation::Undefined(UndefinedReason::ConstantSecond)),
        (false, false) => {}
    }
    let product = sxx * syy;
    let norm = if product.is_finite() && product > 0.0 {
        product.sqrt()
    } else {
        sxx.sqrt() * syy.sqrt()
    };
    let r = centered_cross_sum(x, y) / norm;
    Ok(Correlation::Defined(r.clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    PredictHolds,
    PredictFails,
    PredictZeroGap,
}

impl Prediction {
    pub fn from_correlation(c: &Correlation) -> Self {
        match c.sign() {
            None | Some(1) => Prediction::PredictHolds,
            Some(0) => Prediction::PredictZeroGap,
            Some(_) => Prediction::PredictFails,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub lafp: Prediction,
    pub safp: Prediction,
    pub lwafp: Prediction,
    pub swafp: Prediction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub r_da: Correlation,
    pub r_delta_a: Correlation,
    pub r_wa: Correlation,
    pub r_gamma_a: Correlation,
    pub r_d_delta: Correlation,
    pub r_w_gamma: Correlation,
    pub r_dw: Correlation,
    pub predictions: Predictions,
}

impl CorrelationReport {
    /// Correlation whose sign determines the sign of the given attribute gap.
    pub fn associated(&self, p: Paradox) -> Option<&Correlation> {
        match p {
            Paradox::Lafp => Some(&self.r_da),
            Paradox::Safp => Some(&self.r_delta_a),
            Paradox::Lwafp => Some(&self.r_wa),
            Paradox::Swafp => Some(&self.r_gamma_a),
            _ => None,
        }
    }

    pub fn prediction(&self, p: Paradox) -> Option<Prediction> {
        match p {
            Paradox::Lafp => Some(self.predictions.lafp),
            Paradox::Safp => Some(self.predictions.safp),
            Paradox::Lwafp => Some(self.predictions.lwafp),
            Paradox::Swafp => Some(self.predictions.swafp),
            _ => None,
        }
    }
}

/// The four sign-rule correlations, three topology correlations and the
/// resulting predictions.
///
/// With no attributes each version falls back to its own first-order
/// quantity: a := d for the unweighted pair and a := w for the weighted pair,
/// giving r(d,d), r(δ,d), r(w,w) and r(γ,w).
pub fn sign_rule_report(
    q: &NodeQuantities,
    a: Option<&[f64]>,
) -> Result<CorrelationReport, CorrelationError> {
    let d = q.degree_f64();
    let w = &q.weighted_degree;
    let (a_unweighted, a_weighted) = match a {
        Some(a) => (a, a),
        None => (d.as_slice(), w.as_slice()),
    };
    let r_da = pearson(&d, a_unweighted)?;
    let r_delta_a = pearson(&q.delta, a_unweighted)?;
    let r_wa = pearson(w, a_weighted)?;
    let r_gamma_a = pearson(&q.gamma, a_weighted)?;
    Ok(CorrelationReport {
        r_da,
        r_delta_a,
        r_wa,
        r_gamma_a,
        r_d_delta: pearson(&d, &q.delta)?,
        r_w_gamma: pearson(w, &q.gamma)?,
        r_dw: pearson(&d, w)?,
        predictions: Predictions {
            lafp: Prediction::from_correlation(&r_da),
            safp: Prediction::from_correlation(&r_delta_a),
            lwafp: Prediction::from_correlation(&r_wa),
            swafp: Prediction::from_correlation(&r_gamma_a),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConsistency {
    pub paradox: Paradox,
    pub consistent: bool,
    pub gap: f64,
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignConsistency {
    pub ok: bool,
    pub details: Vec<PairConsistency>,
}

impl SignConsistency {
    pub fn violations(&self) -> impl Iterator<Item = &PairConsistency> + '_ {
        self.details.iter().filter(|d| !d.consistent)
    }
}

/// Checks every attribute gap against its associated correlation.
///
/// An undefined correlation requires a zero gap. A defined one requires the
/// same sign class; when exactly one side sits inside its zero band the raw
/// signs must still agree.
pub fn check_sign_consistency(gaps: &GapReport, corrs: &CorrelationReport) -> SignConsistency {
    let details: Vec<PairConsistency> = Paradox::ATTRIBUTE
        .into_iter()
        .map(|p| {
            let gap = gaps.get(p);
            let corr = corrs.associated(p).expect("attribute paradox");
            let consistent = match corr.sign() {
                None => gap.zero,
                Some(sign) => {
                    let gap_sign = gap.sign();
                    if gap_sign == sign {
                        true
                    } else if gap_sign == 0 || sign == 0 {
                        let r = corr.value().unwrap_or(0.0);
                        raw_sign(gap.value) == raw_sign(r)
                            || gap.value == 0.0
                            || r == 0.0
                    } else {
                        false
                    }
                }
            };
            PairConsistency {
                paradox: p,
                consistent,
                gap: gap.value,
                correlation: corr.value(),
            }
        })
        .collect();
    SignConsistency {
        ok: details.iter().all(|d| d.consistent),
        details,
    }
}

fn raw_sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Graph;
    use crate::metrics::full_report;

    #[test]
    fn pearson_basics() {
        assert_eq!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            Correlation::Defined(1.0)
        );
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[0.0, 5.0, 9.0]).unwrap(),
            Correlation::Undefined(UndefinedReason::ConstantFirst)
        );
        assert_eq!(
            pearson(&[0.0, 5.0, 9.0], &[2.0, 2.0, 2.0]).unwrap(),
            Correlation::Undefined(UndefinedReason::ConstantSecond)
        );
        assert_eq!(
            pearson(&[2.0, 2.0], &[2.0, 2.0]).unwrap(),
            Correlation::Undefined(UndefinedReason::Both)
        );
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(CorrelationError::LengthMismatch(2, 1))
        );
        let r = pearson(&[1.0, 2.0, 1.0], &[2.0, 0.0, 1.0]).unwrap().value().unwrap();
        assert!((r + 0.866).abs() < 1e-3);
        assert!((r + 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn example_path_sign_rule_report() {
        let g = example_path();
        let q = g.node_quantities().unwrap();
        let c = sign_rule_report(&q, g.attributes()).unwrap();
        assert!((c.r_wa.value().unwrap() + 1.0).abs() <= 1e-12);
        assert!((c.r_gamma_a.value().unwrap() + 0.944).abs() < 1e-3);
        assert!((c.r_da.value().unwrap() + 0.866).abs() < 1e-3);
        assert!((c.r_delta_a.value().unwrap() + 0.866).abs() < 1e-3);
        for p in Paradox::ATTRIBUTE {
            assert_eq!(c.prediction(p), Some(Prediction::PredictFails), "{p}");
        }
        let unit = g.unit_weights();
        let cu = sign_rule_report(&unit.node_quantities().unwrap(), unit.attributes()).unwrap();
        assert!((cu.r_da.value().unwrap() + 0.866).abs() < 1e-3);
        assert!((cu.r_delta_a.value().unwrap() + 0.866).abs() < 1e-3);
    }

    #[test]
    fn unset_attributes_self_correlate() {
        let g = Graph::build(
            4,
            &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 5.0), (1, 3, 1.0)],
            None,
        )
        .unwrap();
        let c = sign_rule_report(&g.node_quantities().unwrap(), None).unwrap();
        assert_eq!(c.r_wa, Correlation::Defined(1.0));
        assert_eq!(c.r_da, Correlation::Defined(1.0));
        assert_eq!(c.predictions.lwafp, Prediction::PredictHolds);
        assert!(c.r_w_gamma.value().unwrap() > 0.0);
        assert!(c.r_d_delta.value().unwrap() > 0.0);
    }

    #[test]
    fn consistency_on_example_and_constant_attributes() {
        let g = example_path();
        let q = g.node_quantities().unwrap();
        let gaps = full_report(&g).unwrap();
        let corrs = sign_rule_report(&q, g.attributes()).unwrap();
        assert!(check_sign_consistency(&gaps, &corrs).ok);

        let flat = example_path().with_attributes(vec![5.0; 3]).unwrap();
        let gaps = full_report(&flat).unwrap();
        let corrs = sign_rule_report(&q, flat.attributes()).unwrap();
        assert!(!corrs.r_wa.is_defined());
        assert_eq!(corrs.predictions.lwafp, Prediction::PredictHolds);
        for p in Paradox::ATTRIBUTE {
            assert!(gaps.get(p).zero);
        }
        assert!(check_sign_consistency(&gaps, &corrs).ok);
    }

    #[test]
    fn mismatched_inputs_are_flagged() {
        let a = example_path();
        let b = example_path().with_attributes(vec![0.0, 3.0, 1.0]).unwrap();
        let gaps_a = full_report(&a).unwrap();
        let corrs_b = sign_rule_report(&b.node_quantities().unwrap(), b.attributes()).unwrap();
        let check = check_sign_consistency(&gaps_a, &corrs_b);
        assert!(!check.ok);
        assert!(check.violations().count() > 0);
    }

    #[test]
    fn zero_correlation_predicts_zero_gap() {
        assert_eq!(
            Prediction::from_correlation(&Correlation::Defined(1e-13)),
            Prediction::PredictZeroGap
        );
        assert_eq!(
            Prediction::from_correlation(&Correlation::Undefined(UndefinedReason::Both)),
            Prediction::PredictHolds
        );
    }
}
