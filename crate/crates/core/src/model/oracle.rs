//! Brute-force marginals by enumerating every joint state.
//!
//! This is the reference every engine is checked against. It walks the
//! variables in topological order so partial products can be shared and
//! zero branches cut, but it is still exponential in network size.

use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::{Findings, Instantiation, Network, SupportVector, VarId};

/// Joint-state limit for enumeration.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// `Pr(x ∧ e)` for every value `x` of `target`.
pub fn oracle_marginal<T: Prob>(net: &Network<T>, evidence: &Instantiation, target: VarId) -> Result<SupportVector<T>> {
    let findings = Findings::from_evidence(net, evidence)?;
    let all = oracle_marginals(net, &findings)?;
    Ok(all.into_iter().nth(target).expect("target in range"))
}

/// `Pr(x ∧ f)` for every variable, where `f` is the event that every
/// variable takes an allowed value.
pub fn oracle_marginals<T: Prob>(net: &Network<T>, findings: &Findings) -> Result<Vec<SupportVector<T>>> {
    let states = net.state_count();
    if states > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    let order = net.topological_order();
    let mut acc: Vec<Vec<T>> = net
        .variables()
        .iter()
        .map(|v| vec![T::zero(); v.cardinality()])
        .collect();
    let mut values = vec![0usize; net.len()];
    let mut scratch = Vec::new();
    walk(net, findings, &order, 0, T::one(), &mut values, &mut scratch, &mut acc);
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(v, vals)| SupportVector::new(v, vals))
        .collect())
}

/// `Pr(f)`: the total mass of worlds consistent with `findings`.
pub fn oracle_mass<T: Prob>(net: &Network<T>, findings: &Findings) -> Result<T> {
    if net.is_empty() {
        return Ok(T::one());
    }
    Ok(oracle_marginals(net, findings)?[0].total())
}

#[allow(clippy::too_many_arguments)]
fn walk<T: Prob>(
    net: &Network<T>,
    findings: &Findings,
    order: &[VarId],
    depth: usize,
    weight: T,
    values: &mut [usize],
    scratch: &mut Vec<usize>,
    acc: &mut [Vec<T>],
) {
    if depth == order.len() {
        for (v, &x) in values.iter().enumerate() {
            acc[v][x] = acc[v][x] + weight;
        }
        return;
    }
    let v = order[depth];
    let cpt = net.cpt(v);
    scratch.clear();
    scratch.extend(cpt.parents().iter().map(|&u| values[u]));
    let row = cpt.row(cpt.row_index(scratch));
    for (x, &p) in row.iter().enumerate() {
        if !findings.allows(v, x) || p == T::zero() {
            continue;
        }
        values[v] = x;
        walk(net, findings, order, depth + 1, weight * p, values, scratch, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: &SupportVector, b: &[f64]) -> bool {
        a.values.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn net_a_marginal() {
        let net = fixtures::net_a();
        let b = oracle_marginal(&net, &Instantiation::new(), 1).unwrap();
        assert!(close(&b, &[0.41, 0.59]));
    }

    #[test]
    fn net_d_marginal() {
        let net = fixtures::net_d();
        let d = oracle_marginal(&net, &Instantiation::new(), 3).unwrap();
        assert!(close(&d, &[0.7145, 0.2855]));
    }

    #[test]
    fn observed_query_is_indicator_weighted() {
        let net = fixtures::net_a();
        let e = Instantiation::from_pairs([(1, 0)]);
        let b = oracle_marginal(&net, &e, 1).unwrap();
        assert!(close(&b, &[0.41, 0.0]));
        let a = oracle_marginal(&net, &e, 0).unwrap();
        assert!(close(&a, &[0.27, 0.14]));
    }

    #[test]
    fn guard_trips() {
        let mut b = crate::model::NetworkBuilder::<f64>::new();
        for i in 0..25 {
            let v = b.add_indexed_variable(format!("V{i}"), 2);
            b.set_cpt(v, vec![], vec![0.5, 0.5]);
        }
        let net = b.build().unwrap();
        assert!(matches!(
            oracle_marginal(&net, &Instantiation::new(), 0),
            Err(Error::EnumerationGuard { .. })
        ));
    }
}
