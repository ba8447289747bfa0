//! Brute-force gap evaluation by literal list semantics.
//!
//! Every node builds the list of its friends' attribute values (friend `j`
//! repeated `e_ij` times in the weighted versions). List gaps concatenate all
//! lists and take one mean; singular gaps average each list first. Nothing
//! here uses [`crate::graph::NodeQuantities`] or the closed forms in
//! [`crate::metrics`], so agreement between the two is a real cross-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::Graph;
use crate::metrics::Paradox;

/// Largest graph the floating-point oracle accepts.
pub const MAX_ORACLE_NODES: usize = 10_000;
/// Largest graph the exact oracle accepts.
pub const MAX_EXACT_NODES: usize = 100;
/// Cap on the length of a materialized concatenated list.
const MAX_LIST_LEN: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("graph has {n} nodes, oracle limit is {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("node {0} has no friends")]
    IsolatePresent(usize),
    #[error("edge {{{0}, {1}}} has non-integer weight {2}")]
    NonIntegerWeight(usize, usize, f64),
    #[error("expected {expected} attribute values, got {got}")]
    AttributeLengthMismatch { expected: usize, got: usize },
}

fn check(g: &Graph, a: &[f64], limit: usize) -> Result<(), OracleError> {
    let n = g.node_count();
    if n > limit {
        return Err(OracleError::SizeLimitExceeded { n, limit });
    }
    if a.len() != n {
        return Err(OracleError::AttributeLengthMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if let Some(i) = (0..n).find(|&i| g.neighbors(i).is_empty()) {
        return Err(OracleError::IsolatePresent(i));
    }
    Ok(())
}

fn integer_weight(w: f64) -> Option<usize> {
    (w.fract() == 0.0 && w >= 1.0 && w <= u32::MAX as f64).then_some(w as usize)
}

/// Node `i`'s second-order list, or `None` when weights are not integers.
fn friend_list(g: &Graph, a: &[f64], i: usize, weighted: bool) -> Option<Vec<f64>> {
    let mut list = Vec::new();
    for &(j, e) in g.neighbors(i) {
        let copies = if weighted { integer_weight(e)? } else { 1 };
        list.extend(std::iter::repeat_n(a[j], copies));
    }
    Some(list)
}

/// Weighted mean of friends' attributes, used when weights are not integers.
fn friend_weighted_sum(g: &Graph, a: &[f64], i: usize) -> (f64, f64) {
    g.neighbors(i)
        .iter()
        .fold((0.0, 0.0), |(s, t), &(j, e)| (s + e * a[j], t + e))
}

fn plain_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn list_length(g: &Graph, weighted: bool) -> Option<usize> {
    let mut total = 0usize;
    for (_, _, w) in g.edges() {
        total += 2 * if weighted { integer_weight(w)? } else { 1 };
    }
    Some(total)
}

/// List gap: mean of all friend lists concatenated, minus mean(a).
pub fn oracle_list_gap(g: &Graph, a: &[f64], weighted: bool) -> Result<f64, OracleError> {
    check(g, a, MAX_ORACLE_NODES)?;
    let n = g.node_count();
    let materialize = matches!(list_length(g, weighted), Some(len) if len <= MAX_LIST_LEN);
    let second = if materialize {
        let mut all = Vec::new();
        for i in 0..n {
            all.extend(friend_list(g, a, i, weighted).expect("integer weights"));
        }
        plain_mean(&all)
    } else {
        let (s, t) = (0..n)
            .map(|i| {
                if weighted {
                    friend_weighted_sum(g, a, i)
                } else {
                    let list = friend_list(g, a, i, false).expect("unweighted");
                    (list.iter().sum(), list.len() as f64)
                }
            })
            .fold((0.0, 0.0), |(s, t), (x, y)| (s + x, t + y));
        s / t
    };
    Ok(second - plain_mean(a))
}

/// Singular gap: each node's mean friend value, averaged over nodes, minus mean(a).
pub fn oracle_singular_gap(g: &Graph, a: &[f64], weighted: bool) -> Result<f64, OracleError> {
    check(g, a, MAX_ORACLE_NODES)?;
    let n = g.node_count();
    let per_node: Vec<f64> = (0..n)
        .map(|i| match friend_list(g, a, i, weighted) {
            Some(list) => plain_mean(&list),
            None => {
                let (s, t) = friend_weighted_sum(g, a, i);
                s / t
            }
        })
        .collect();
    Ok(plain_mean(&per_node) - plain_mean(a))
}

fn oracle_degrees(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let d = (0..n).map(|i| g.neighbors(i).len() as f64).collect();
    let w = (0..n)
        .map(|i| g.neighbors(i).iter().map(|&(_, e)| e).sum())
        .collect();
    (d, w)
}

/// All eight gaps by list semantics, in [`Paradox::ALL`] order.
///
/// Without attributes the attribute versions use a := d (unweighted) and
/// a := w (weighted).
pub fn oracle_all(g: &Graph) -> Result<[f64; 8], OracleError> {
    let (d, w) = oracle_degrees(g);
    let (a_u, a_w) = match g.attributes() {
        Some(a) => (a.to_vec(), a.to_vec()),
        None => (d.clone(), w.clone()),
    };
    Ok([
        oracle_list_gap(g, &d, false)?,
        oracle_singular_gap(g, &d, false)?,
        oracle_list_gap(g, &w, true)?,
        oracle_singular_gap(g, &w, true)?,
        oracle_list_gap(g, &a_u, false)?,
        oracle_singular_gap(g, &a_u, false)?,
        oracle_list_gap(g, &a_w, true)?,
        oracle_singular_gap(g, &a_w, true)?,
    ])
}

/// |computed - reference| relative to the larger of |reference| and `scale`
/// (the mean first-order magnitude from [`crate::metrics::gap_scales`]).
pub fn relative_error(computed: f64, reference: f64, scale: f64) -> f64 {
    let denom = reference.abs().max(scale);
    if denom > 0.0 {
        (computed - reference).abs() / denom
    } else {
        (computed - reference).abs()
    }
}

/// Exact rational gaps, indexed like [`Paradox::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactGaps(pub [BigRational; 8]);

impl ExactGaps {
    pub fn get(&self, p: Paradox) -> &BigRational {
        let idx = Paradox::ALL.iter().position(|&q| q == p).unwrap();
        &self.0[idx]
    }

    pub fn to_f64(&self) -> [f64; 8] {
        std::array::from_fn(|i| self.0[i].to_f64().unwrap_or(f64::NAN))
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn exact_mean(xs: &[BigRational]) -> BigRational {
    let total: BigRational = xs.iter().cloned().sum();
    total / BigRational::from_integer(BigInt::from(xs.len()))
}

/// Exact list and singular gaps for rational attributes and integer weights.
fn exact_pair(
    g: &Graph,
    a: &[BigRational],
    weights: &[Vec<(usize, usize)>],
) -> (BigRational, BigRational) {
    let n = g.node_count();
    let mut all_sum = BigRational::zero();
    let mut all_len = 0usize;
    let mut singular = Vec::with_capacity(n);
    for friends in weights {
        let mut sum = BigRational::zero();
        let mut len = 0usize;
        for &(j, copies) in friends {
            for _ in 0..copies {
                sum += &a[j];
                len += 1;
            }
        }
        all_sum += &sum;
        all_len += len;
        singular.push(sum / BigRational::from_integer(BigInt::from(len)));
    }
    let mean_a = exact_mean(a);
    let list = all_sum / BigRational::from_integer(BigInt::from(all_len)) - &mean_a;
    let singular = exact_mean(&singular) - &mean_a;
    (list, singular)
}

/// All eight gaps as exact rationals.
///
/// Requires integer weights; attributes are taken as the exact binary value
/// of each `f64`.
pub fn oracle_exact(g: &Graph) -> Result<ExactGaps, OracleError> {
    let n = g.node_count();
    if n > MAX_EXACT_NODES {
        return Err(OracleError::SizeLimitExceeded {
            n,
            limit: MAX_EXACT_NODES,
        });
    }
    if let Some(i) = (0..n).find(|&i| g.neighbors(i).is_empty()) {
        return Err(OracleError::IsolatePresent(i));
    }
    let mut weighted = vec![Vec::new(); n];
    let mut unweighted = vec![Vec::new(); n];
    for i in 0..n {
        for &(j, e) in g.neighbors(i) {
            let copies = integer_weight(e).ok_or(OracleError::NonIntegerWeight(i, j, e))?;
            weighted[i].push((j, copies));
            unweighted[i].push((j, 1));
        }
    }
    let d: Vec<BigRational> = (0..n)
        .map(|i| ratio(unweighted[i].len() as i64, 1))
        .collect();
    let w: Vec<BigRational> = (0..n)
        .map(|i| ratio(weighted[i].iter().map(|&(_, c)| c as i64).sum(), 1))
        .collect();
    let (a_u, a_w) = match g.attributes() {
        Some(a) => {
            let exact: Vec<BigRational> = a
                .iter()
                .map(|&x| BigRational::from_float(x).expect("finite attribute"))
                .collect();
            (exact.clone(), exact)
        }
        None => (d.clone(), w.clone()),
    };
    let (lfp, sfp) = exact_pair(g, &d, &unweighted);
    let (lwfp, swfp) = exact_pair(g, &w, &weighted);
    let (lafp, safp) = exact_pair(g, &a_u, &unweighted);
    let (lwafp, swafp) = exact_pair(g, &a_w, &weighted);
    Ok(ExactGaps([lfp, sfp, lwfp, swfp, lafp, safp, lwafp, swafp]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn example_path_lists_by_hand() {
        let g = example_path();
        let w = [1.0, 3.0, 2.0];
        // concatenated list [3, 1, 2, 2, 3, 3]: mean 7/3 minus 2
        assert!((oracle_list_gap(&g, &w, true).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // [0, 2, 1, 1, 0, 0]: mean 2/3 minus 1
        let a = [2.0, 0.0, 1.0];
        assert!((oracle_list_gap(&g, &a, true).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        // node means [3, 5/3, 3] averaged to 23/9, minus 2
        assert!((oracle_singular_gap(&g, &w, true).unwrap() - 5.0 / 9.0).abs() < 1e-15);
        // unit weights: node means [0, 3/2, 0] averaged to 1/2, minus 1
        assert!((oracle_singular_gap(&g, &a, false).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_example_path() {
        let exact = oracle_exact(&example_path()).unwrap();
        let expected = [
            ratio(1, 6),
            ratio(1, 3),
            ratio(1, 3),
            ratio(5, 9),
            ratio(-1, 4),
            ratio(-1, 2),
            ratio(-1, 3),
            ratio(-5, 9),
        ];
        assert_eq!(exact.0, expected);
        assert_eq!(exact.get(Paradox::Swafp), &ratio(-5, 9));
    }

    #[test]
    fn exact_regular_and_star() {
        let exact = oracle_exact(&cycle(4, &[1.0])).unwrap();
        assert!(exact.0.iter().all(Zero::is_zero));
        let exact = oracle_exact(&star(3)).unwrap();
        assert_eq!(exact.get(Paradox::Lfp), &ratio(1, 2));
        assert_eq!(exact.get(Paradox::Sfp), &ratio(1, 1));
    }

    #[test]
    fn regular_graph_with_degree_attribute_is_zero() {
        let g = cycle(5, &[1.0]);
        let d = [2.0; 5];
        assert_eq!(oracle_list_gap(&g, &d, false).unwrap(), 0.0);
        let two = Graph::build(2, &[(0, 1, 4.0)], None).unwrap();
        assert_eq!(oracle_singular_gap(&two, &[7.0, 7.0], true).unwrap(), 0.0);
    }

    #[test]
    fn real_weights_use_weighted_means() {
        let g = Graph::build(3, &[(0, 1, 0.5), (1, 2, 1.5)], None).unwrap();
        let a = [1.0, 2.0, 4.0];
        // second-order weighted sum: node0 0.5*2, node1 0.5*1+1.5*4, node2 1.5*2
        let list = (1.0 + 6.5 + 3.0) / 4.0 - 7.0 / 3.0;
        assert!((oracle_list_gap(&g, &a, true).unwrap() - list).abs() < 1e-15);
        assert!(matches!(
            oracle_exact(&g),
            Err(OracleError::NonIntegerWeight(..))
        ));
    }

    #[test]
    fn limits_and_isolates() {
        let big = Graph::build(MAX_EXACT_NODES + 1, &[(0, 1, 1.0)], None).unwrap();
        assert!(matches!(
            oracle_exact(&big),
            Err(OracleError::SizeLimitExceeded { .. })
        ));
        let iso = Graph::build(3, &[(0, 1, 1.0)], None).unwrap();
        assert_eq!(
            oracle_list_gap(&iso, &[0.0; 3], false),
            Err(OracleError::IsolatePresent(2))
        );
    }
}
