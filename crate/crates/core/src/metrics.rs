//! The eight Friendship Paradox gaps.
//!
//! Every gap is "mean second-order value minus mean first-order value". The
//! list versions pool all nodes' friend lists before averaging; the singular
//! versions average per node first. Gaps are computed from closed forms over
//! [`NodeQuantities`]:
//!
//! | gap    | closed form                                   |
//! |--------|-----------------------------------------------|
//! | LFP    | (n Σd² − (Σd)²) / (n Σd)                      |
//! | SFP    | (1/n) Σ_{edges xy} (d_x − d_y)² / (d_x d_y)   |
//! | LWFP   | Σ (w_i − w̄)² / Σw                             |
//! | SWFP   | (1/n) Σ_{edges xy} e_xy (w_x − w_y)² / (w_x w_y) |
//! | LEFP   | Σ (w_i − w̄)(a_i − ā) / Σw                     |
//! | SEFP   | (1/n) Σ (γ_i − γ̄)(a_i − ā)                    |
//!
//! The attribute-free gaps are written as sums of non-negative terms so that
//! their sign survives rounding. LAFP and SAFP are LEFP and SEFP on the
//! unit-weight graph (w = d, γ = δ).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeQuantities};
use crate::stats::{centered_cross_sum, mean};

/// Relative threshold below which a gap counts as zero.
pub const EPS_ZERO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected {expected} attribute values, got {got}")]
    AttributeLengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Paradox {
    Lfp,
    Sfp,
    Lwfp,
    Swfp,
    Lafp,
    Safp,
    Lwafp,
    Swafp,
}

impl Paradox {
    pub const ALL: [Paradox; 8] = [
        Paradox::Lfp,
        Paradox::Sfp,
        Paradox::Lwfp,
        Paradox::Swfp,
        Paradox::Lafp,
        Paradox::Safp,
        Paradox::Lwafp,
        Paradox::Swafp,
    ];

    /// The four versions that can fail.
    pub const ATTRIBUTE: [Paradox; 4] =
        [Paradox::Lafp, Paradox::Safp, Paradox::Lwafp, Paradox::Swafp];

    /// The four versions that always hold.
    pub const STRUCTURAL: [Paradox; 4] =
        [Paradox::Lfp, Paradox::Sfp, Paradox::Lwfp, Paradox::Swfp];

    pub fn key(self) -> &'static str {
        match self {
            Paradox::Lfp => "lfp",
            Paradox::Sfp => "sfp",
            Paradox::Lwfp => "lwfp",
            Paradox::Swfp => "swfp",
            Paradox::Lafp => "lafp",
            Paradox::Safp => "safp",
            Paradox::Lwafp => "lwafp",
            Paradox::Swafp => "swafp",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Paradox::Lfp => "LFP",
            Paradox::Sfp => "SFP",
            Paradox::Lwfp => "LWFP",
            Paradox::Swfp => "SWFP",
            Paradox::Lafp => "LAFP",
            Paradox::Safp => "SAFP",
            Paradox::Lwafp => "LWAFP",
            Paradox::Swafp => "SWAFP",
        }
    }

    pub fn is_attribute(self) -> bool {
        Paradox::ATTRIBUTE.contains(&self)
    }

    pub fn is_list(self) -> bool {
        matches!(
            self,
            Paradox::Lfp | Paradox::Lwfp | Paradox::Lafp | Paradox::Lwafp
        )
    }

    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            Paradox::Lwfp | Paradox::Swfp | Paradox::Lwafp | Paradox::Swafp
        )
    }
}

impl std::fmt::Display for Paradox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapValue {
    pub value: f64,
    pub verdict: Verdict,
    pub zero: bool,
}

impl GapValue {
    /// Classifies `value` against `EPS_ZERO · scale`, where `scale` is the mean
    /// absolute first-order value (1 when that mean is zero).
    pub fn classify(value: f64, scale: f64) -> Self {
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        let zero = value.abs() <= EPS_ZERO * scale;
        let verdict = if !zero && value < 0.0 {
            Verdict::Fails
        } else {
            Verdict::Holds
        };
        Self {
            value,
            verdict,
            zero,
        }
    }

    /// -1, 0 or 1, with zero-flagged values mapped to 0.
    pub fn sign(&self) -> i8 {
        if self.zero {
            0
        } else if self.value < 0.0 {
            -1
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lfp: GapValue,
    pub sfp: GapValue,
    pub lwfp: GapValue,
    pub swfp: GapValue,
    pub lafp: GapValue,
    pub safp: GapValue,
    pub lwafp: GapValue,
    pub swafp: GapValue,
}

impl GapReport {
    pub fn get(&self, p: Paradox) -> &GapValue {
        match p {
            Paradox::Lfp => &self.lfp,
            Paradox::Sfp => &self.sfp,
            Paradox::Lwfp => &self.lwfp,
            Paradox::Swfp => &self.swfp,
            Paradox::Lafp => &self.lafp,
            Paradox::Safp => &self.safp,
            Paradox::Lwafp => &self.lwafp,
            Paradox::Swafp => &self.swafp,
        }
    }

    pub fn get_mut(&mut self, p: Paradox) -> &mut GapValue {
        match p {
            Paradox::Lfp => &mut self.lfp,
            Paradox::Sfp => &mut self.sfp,
            Paradox::Lwfp => &mut self.lwfp,
            Paradox::Swfp => &mut self.swfp,
            Paradox::Lafp => &mut self.lafp,
            Paradox::Safp => &mut self.safp,
            Paradox::Lwafp => &mut self.lwafp,
            Paradox::Swafp => &mut self.swafp,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Paradox, &GapValue)> + '_ {
        Paradox::ALL.into_iter().map(move |p| (p, self.get(p)))
    }
}

fn check_len(q: &NodeQuantities, a: &[f64]) -> Result<(), MetricsError> {
    if a.len() != q.len() {
        return Err(MetricsError::AttributeLengthMismatch {
            expected: q.len(),
            got: a.len(),
        });
    }
    Ok(())
}

fn mean_abs(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.abs()).sum::<f64>() / xs.len() as f64
}

/// List Friendship Paradox gap, exact in integer arithmetic up to the final division.
pub fn gap_lfp(q: &NodeQuantities) -> f64 {
    let n = q.len() as u128;
    let s1: u128 = q.degree.iter().map(|&d| d as u128).sum();
    let s2: u128 = q.degree.iter().map(|&d| (d as u128) * (d as u128)).sum();
    if s1 == 0 {
        return 0.0;
    }
    // n Σd² ≥ (Σd)² by Cauchy-Schwarz, so this never underflows.
    let numerator = n * s2 - s1 * s1;
    numerator as f64 / (n * s1) as f64
}

/// Singular Friendship Paradox gap via the per-edge form.
pub fn gap_sfp(g: &Graph, q: &NodeQuantities) -> f64 {
    let total: f64 = g
        .edges()
        .map(|(x, y, _)| {
            let (dx, dy) = (q.degree[x] as f64, q.degree[y] as f64);
            (dx - dy) * (dx - dy) / (dx * dy)
        })
        .sum();
    total / q.len() as f64
}

/// List Weighted Friendship Paradox gap.
pub fn gap_lwfp(q: &NodeQuantities) -> f64 {
    let w = &q.weighted_degree;
    centered_cross_sum(w, w) / w.iter().sum::<f64>()
}

/// Singular Weighted Friendship Paradox gap via the per-edge form.
pub fn gap_swfp(g: &Graph, q: &NodeQuantities) -> f64 {
    let w = &q.weighted_degree;
    let total: f64 = g
        .edges()
        .map(|(x, y, e)| e * (w[x] - w[y]) * (w[x] - w[y]) / (w[x] * w[y]))
        .sum();
    total / q.len() as f64
}

/// List Extended Friendship Paradox gap for attribute vector `a`.
///
/// On unit-weight quantities ([`NodeQuantities::unweighted`]) this is the
/// attribute-only list gap.
pub fn gap_lefp(q: &NodeQuantities, a: &[f64]) -> Result<f64, MetricsError> {
    check_len(q, a)?;
    let w = &q.weighted_degree;
    Ok(centered_cross_sum(w, a) / w.iter().sum::<f64>())
}

/// Singular Extended Friendship Paradox gap for attribute vector `a`.
pub fn gap_sefp(q: &NodeQuantities, a: &[f64]) -> Result<f64, MetricsError> {
    check_len(q, a)?;
    Ok(centered_cross_sum(&q.gamma, a) / q.len() as f64)
}

/// All eight gaps of a graph without isolates.
///
/// Attribute versions use the graph's attributes; when none are set each
/// attribute gap reduces to its attribute-free counterpart (a := w on the
/// weighted graph, a := d on the unit-weight graph).
pub fn full_report(g: &Graph) -> Result<GapReport, MetricsError> {
    let q = g.node_quantities()?;
    full_report_with(g, &q, g.attributes())
}

/// Mean absolute first-order value behind each gap, in [`Paradox::ALL`] order.
/// Gaps are called zero, and compared across methods, relative to these.
pub fn gap_scales(q: &NodeQuantities, attributes: Option<&[f64]>) -> Result<[f64; 8], MetricsError> {
    let d = mean_abs(&q.degree_f64());
    let w = mean_abs(&q.weighted_degree);
    let (a_unit, a_weighted) = match attributes {
        Some(a) => {
            check_len(q, a)?;
            let s = mean_abs(a);
            (s, s)
        }
        None => (d, w),
    };
    Ok([d, d, w, w, a_unit, a_unit, a_weighted, a_weighted])
}

/// [`full_report`] with precomputed quantities and an explicit attribute choice.
pub fn full_report_with(
    g: &Graph,
    q: &NodeQuantities,
    attributes: Option<&[f64]>,
) -> Result<GapReport, MetricsError> {
    let unit = q.unweighted();
    let [d_scale, _, w_scale, _, a_scale, ..] = gap_scales(q, attributes)?;

    let lfp = GapValue::classify(gap_lfp(q), d_scale);
    let sfp = GapValue::classify(gap_sfp(g, q), d_scale);
    let lwfp = GapValue::classify(gap_lwfp(q), w_scale);
    let swfp = GapValue::classify(gap_swfp(g, q), w_scale);

    let (lafp, safp, lwafp, swafp) = match attributes {
        Some(a) => {
            (
                GapValue::classify(gap_lefp(&unit, a)?, a_scale),
                GapValue::classify(gap_sefp(&unit, a)?, a_scale),
                GapValue::classify(gap_lefp(q, a)?, a_scale),
                GapValue::classify(gap_sefp(q, a)?, a_scale),
            )
        }
        None => (lfp, sfp, lwfp, swfp),
    };

    Ok(GapReport {
        lfp,
        sfp,
        lwfp,
        swfp,
        lafp,
        safp,
        lwafp,
        swafp,
    })
}

/// Seed-sum form of the singular gap: per-node weighted mean of friends'
/// attributes, averaged over nodes. Kept as a second route for tests.
pub fn gap_sefp_seed_form(g: &Graph, q: &NodeQuantities, a: &[f64]) -> Result<f64, MetricsError> {
    check_len(q, a)?;
    let n = q.len() as f64;
    let second: f64 = (0..q.len())
        .map(|i| {
            g.neighbors(i).iter().map(|&(j, e)| e * a[j]).sum::<f64>() / q.weighted_degree[i]
        })
        .sum::<f64>()
        / n;
    Ok(second - mean(a))
}

/// Friend-count form of the list gap: Σ_i Σ_{j∈N(i)} e_ij a_j / Σw − ā.
pub fn gap_lefp_friend_form(g: &Graph, q: &NodeQuantities, a: &[f64]) -> Result<f64, MetricsError> {
    check_len(q, a)?;
    let numerator: f64 = (0..q.len())
        .map(|i| g.neighbors(i).iter().map(|&(j, e)| e * a[j]).sum::<f64>())
        .sum();
    Ok(numerator / q.weighted_degree.iter().sum::<f64>() - mean(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn example_path_gaps() {
        let r = full_report(&example_path()).unwrap();
        let expected = [
            (Paradox::Lfp, 1.0 / 6.0),
            (Paradox::Sfp, 1.0 / 3.0),
            (Paradox::Lwfp, 1.0 / 3.0),
            (Paradox::Swfp, 5.0 / 9.0),
            (Paradox::Lafp, -1.0 / 4.0),
            (Paradox::Safp, -1.0 / 2.0),
            (Paradox::Lwafp, -1.0 / 3.0),
            (Paradox::Swafp, -5.0 / 9.0),
        ];
        for (p, v) in expected {
            let gap = r.get(p);
            assert!(close(gap.value, v), "{p}: {} vs {v}", gap.value);
            let want = if p.is_attribute() {
                Verdict::Fails
            } else {
                Verdict::Holds
            };
            assert_eq!(gap.verdict, want, "{p}");
            assert!(!gap.zero);
        }
    }

    #[test]
    fn unset_attributes_reduce_to_weighted_gaps() {
        let mut g = example_path();
        g.set_attributes(None).unwrap();
        let r = full_report(&g).unwrap();
        assert_eq!(r.lwafp, r.lwfp);
        assert_eq!(r.swafp, r.swfp);
        assert_eq!(r.lafp, r.lfp);
        assert_eq!(r.safp, r.sfp);
        assert!(close(r.lwafp.value, 1.0 / 3.0));
        assert!(close(r.swafp.value, 5.0 / 9.0));
        assert!(r.iter().all(|(_, v)| v.verdict == Verdict::Holds));
    }

    #[test]
    fn regular_graphs_have_zero_gaps() {
        let r = full_report(&cycle(4, &[1.0])).unwrap();
        for (p, v) in r.iter() {
            assert_eq!(v.value, 0.0, "{p}");
            assert!(v.zero);
            assert_eq!(v.verdict, Verdict::Holds);
        }
        // weighted-regular: weights alternate 1, 3
        let g = cycle(4, &[1.0, 3.0]);
        let q = g.node_quantities().unwrap();
        assert_eq!(gap_lwfp(&q), 0.0);
        assert_eq!(gap_swfp(&g, &q), 0.0);
        assert!(gap_sefp(&q, &[0.3, -2.0, 7.0, 1.5]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn star_gaps() {
        let g = star(3);
        let q = g.node_quantities().unwrap();
        assert_eq!(gap_lfp(&q), 0.5);
        assert!(close(gap_sfp(&g, &q), 1.0));
    }

    #[test]
    fn lefp_with_weights_as_attributes_equals_lwfp() {
        let g = example_path();
        let q = g.node_quantities().unwrap();
        let w = q.weighted_degree.clone();
        assert_eq!(gap_lefp(&q, &w).unwrap(), gap_lwfp(&q));
        assert!(close(gap_sefp(&q, &w).unwrap(), gap_swfp(&g, &q)));
    }

    #[test]
    fn forced_unit_weights_give_attribute_only_gaps() {
        let g = example_path();
        let unit = g.unit_weights();
        let q = unit.node_quantities().unwrap();
        let a = [2.0, 0.0, 1.0];
        assert!(close(gap_lefp(&q, &a).unwrap(), -0.25));
        assert!(close(gap_sefp(&q, &a).unwrap(), -0.5));
    }

    #[test]
    fn constant_attributes_give_zero() {
        let g = example_path();
        let q = g.node_quantities().unwrap();
        assert_eq!(gap_lefp(&q, &[5.0; 3]).unwrap(), 0.0);
        assert_eq!(gap_sefp(&q, &[5.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn attribute_length_is_checked() {
        let q = example_path().node_quantities().unwrap();
        assert_eq!(
            gap_lefp(&q, &[1.0]),
            Err(MetricsError::AttributeLengthMismatch {
                expected: 3,
                got: 1
            })
        );
        assert!(gap_sefp(&q, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn alternative_forms_agree_on_example() {
        let g = example_path();
        let q = g.node_quantities().unwrap();
        let a = [2.0, 0.0, 1.0];
        assert!(close(
            gap_sefp_seed_form(&g, &q, &a).unwrap(),
            gap_sefp(&q, &a).unwrap()
        ));
        assert!(close(
            gap_lefp_friend_form(&g, &q, &a).unwrap(),
            gap_lefp(&q, &a).unwrap()
        ));
    }

    #[test]
    fn zero_threshold_is_relative() {
        assert!(GapValue::classify(-1e-7, 1000.0).zero);
        assert!(!GapValue::classify(-1e-7, 1.0).zero);
        assert_eq!(GapValue::classify(-1e-7, 1.0).verdict, Verdict::Fails);
        assert_eq!(GapValue::classify(0.0, 0.0).verdict, Verdict::Holds);
    }
}
