//! Seeded network generators: the diamond ladder, cascaded adders and
//! random loopy networks.
//!
//! Every generator draws from its own ChaCha8 stream, so a seed fixes the
//! network byte for byte across platforms.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{graph, Network, NetworkBuilder, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    DiamondLadder,
    Adder,
    Random,
}

/// Everything needed to regenerate a network.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Rungs, adder bits or variable count.
    pub size: usize,
    pub seed: u64,
    /// Adder output flip probability.
    pub noise: f64,
    pub max_parents: usize,
    pub extra_edges: usize,
    pub cardinality: RangeInclusive<usize>,
    /// Chance that a random cpt entry is forced to zero.
    pub zero_entry_rate: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, size: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            size,
            seed,
            noise: 0.01,
            max_parents: 3,
            extra_edges: 2,
            cardinality: 2..=2,
            zero_entry_rate: 0.0,
        }
    }

    pub fn generate(&self) -> Result<Network> {
        match self.family {
            Family::DiamondLadder => {
                if self.size == 0 {
                    return Err(Error::Infeasible("a ladder needs at least one rung".into()));
                }
                Ok(diamond_ladder(self.size, self.seed))
            }
            Family::Adder => {
                if self.size == 0 || !(0.0..0.5).contains(&self.noise) {
                    return Err(Error::Infeasible(format!(
                        "adder needs n >= 1 and noise in [0, 0.5), got n={} noise={}",
                        self.size, self.noise
                    )));
                }
                Ok(n_bit_adder(self.size, self.noise, self.seed))
            }
            Family::Random => random_network(
                self.size,
                self.seed,
                &RandomOptions {
                    max_parents: self.max_parents,
                    extra_edges: self.extra_edges,
                    cardinality: self.cardinality.clone(),
                    zero_entry_rate: self.zero_entry_rate,
                },
            ),
        }
    }
}

fn binary_row(rng: &mut ChaCha8Rng) -> [f64; 2] {
    let p = rng.gen_range(0.05..=0.95);
    [p, 1.0 - p]
}

/// Spine `A0..Ak`; rung `i` adds `A(i-1) -> Bi`, `A(i-1) -> Ci` and
/// `{Bi, Ci} -> Ai`. Binary, entries in `[0.05, 0.95]`.
pub fn diamond_ladder(k: usize, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkBuilder::new();
    let mut prev = b.add_indexed_variable("A0", 2);
    b.set_cpt(prev, vec![], binary_row(&mut rng).to_vec());
    for i in 1..=k {
        let bi = b.add_indexed_variable(format!("B{i}"), 2);
        let ci = b.add_indexed_variable(format!("C{i}"), 2);
        let ai = b.add_indexed_variable(format!("A{i}"), 2);
        for v in [bi, ci] {
            let table = (0..2).flat_map(|_| binary_row(&mut rng)).collect();
            b.set_cpt(v, vec![prev], table);
        }
        let table = (0..4).flat_map(|_| binary_row(&mut rng)).collect();
        b.set_cpt(ai, vec![bi, ci], table);
        prev = ai;
    }
    b.build().expect("ladder is well formed")
}

/// The rung tops `A0..A(k-1)`: a loop cutset of size `k`.
pub fn ladder_cutset(k: usize) -> Vec<VarId> {
    (0..k).map(|i| 3 * i).collect()
}

/// Cascaded full adders. Bit `i` has roots `In1_i`, `In2_i` and outputs
/// `Sum_i`, `Carry_i` over `{In1_i, In2_i, Carry_(i-1)}`; each output takes
/// the wrong value with probability `noise`.
pub fn n_bit_adder(n: usize, noise: f64, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkBuilder::new();
    let mut carry: Option<VarId> = None;
    for i in 0..n {
        let in1 = b.add_indexed_variable(format!("In1_{i}"), 2);
        let in2 = b.add_indexed_variable(format!("In2_{i}"), 2);
        let sum = b.add_indexed_variable(format!("Sum_{i}"), 2);
        let out = b.add_indexed_variable(format!("Carry_{i}"), 2);
        b.set_cpt(in1, vec![], binary_row(&mut rng).to_vec());
        b.set_cpt(in2, vec![], binary_row(&mut rng).to_vec());
        let mut parents = vec![in1, in2];
        parents.extend(carry);
        let rows = 1usize << parents.len();
        let mut sum_table = Vec::with_capacity(2 * rows);
        let mut carry_table = Vec::with_capacity(2 * rows);
        for r in 0..rows {
            // Last parent varies fastest, matching cpt row order.
            let bits: Vec<usize> = (0..parents.len()).map(|j| (r >> (parents.len() - 1 - j)) & 1).collect();
            let ones: usize = bits.iter().sum();
            for (table, value) in [(&mut sum_table, ones % 2), (&mut carry_table, usize::from(ones >= 2))] {
                table.extend(if value == 0 {
                    [1.0 - noise, noise]
                } else {
                    [noise, 1.0 - noise]
                });
            }
        }
        b.set_cpt(sum, parents.clone(), sum_table);
        b.set_cpt(out, parents, carry_table);
        carry = Some(out);
    }
    b.build().expect("adder is well formed")
}

/// Replaces the priors of the given roots by indicators of the chosen
/// values: setting inputs by intervention rather than observation.
pub fn clamp_roots(net: &Network, settings: &[(VarId, usize)]) -> Result<Network> {
    let mut out = net.clone();
    for &(v, x) in settings {
        if !net.parents(v).is_empty() {
            return Err(Error::InvalidInstantiation(format!("`{}` is not a root", net.name(v))));
        }
        let card = net.cardinality(v);
        if x >= card {
            return Err(Error::InvalidInstantiation(format!(
                "value {x} out of range for `{}`",
                net.name(v)
            )));
        }
        out = out.with_cpt_table(v, (0..card).map(|i| if i == x { 1.0 } else { 0.0 }).collect())?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomOptions {
    pub max_parents: usize,
    /// Arcs added on top of the spanning tree; each closes an undirected cycle.
    pub extra_edges: usize,
    pub cardinality: RangeInclusive<usize>,
    pub zero_entry_rate: f64,
}

impl Default for RandomOptions {
    fn default() -> Self {
        RandomOptions {
            max_parents: 3,
            extra_edges: 0,
            cardinality: 2..=2,
            zero_entry_rate: 0.0,
        }
    }
}

/// Binary random network: a randomly oriented spanning tree plus
/// `n_extra_edges` arcs.
pub fn random_loopy(n_vars: usize, max_parents: usize, n_extra_edges: usize, seed: u64) -> Result<Network> {
    random_network(
        n_vars,
        seed,
        &RandomOptions {
            max_parents,
            extra_edges: n_extra_edges,
            ..RandomOptions::default()
        },
    )
}

/// Random network over `n_vars` variables named `V0..`, values `s0..`.
///
/// Cpt rows are `0.02 + (1 - 0.02 c) * w` for normalized uniform weights
/// `w`, so entries stay within `[0.02, 0.98]` unless zero entries are
/// requested.
pub fn random_network(n_vars: usize, seed: u64, opts: &RandomOptions) -> Result<Network> {
    let (lo, hi) = (*opts.cardinality.start(), *opts.cardinality.end());
    if n_vars == 0 || lo < 2 || lo > hi || hi > 50 {
        return Err(Error::Infeasible(format!(
            "need n_vars >= 1 and a cardinality range within 2..=50, got {n_vars} and {lo}..={hi}"
        )));
    }
    if n_vars > 1 && opts.max_parents == 0 {
        return Err(Error::Infeasible("a connected network needs max_parents >= 1".into()));
    }
    if !(0.0..1.0).contains(&opts.zero_entry_rate) {
        return Err(Error::Infeasible(format!(
            "zero entry rate {} not in [0, 1)",
            opts.zero_entry_rate
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parents: Vec<Vec<VarId>> = vec![Vec::new(); n_vars];
    // Spanning tree: each new node attaches to an earlier one, the arc
    // pointing whichever way the parent bound allows.
    for v in 1..n_vars {
        let u = rng.gen_range(0..v);
        let down = rng.gen_bool(0.5);
        let (p, c) = if (down && parents[v].len() < opts.max_parents) || parents[u].len() >= opts.max_parents {
            (u, v)
        } else {
            (v, u)
        };
        parents[c].push(p);
    }
    let edges: Vec<(VarId, VarId)> = (0..n_vars)
        .flat_map(|c| parents[c].iter().map(move |&p| (p, c)))
        .collect();
    let order = graph::topological_order(n_vars, &edges).expect("orientations of a tree are acyclic");
    let mut position = vec![0; n_vars];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut candidates: Vec<(VarId, VarId)> = (0..n_vars)
        .flat_map(|a| (0..n_vars).map(move |b| (a, b)))
        .filter(|&(a, b)| position[a] < position[b] && !parents[b].contains(&a))
        .collect();
    candidates.shuffle(&mut rng);
    let mut added = 0;
    for (a, b) in candidates {
        if added == opts.extra_edges {
            break;
        }
        if parents[b].len() < opts.max_parents {
            parents[b].push(a);
            added += 1;
        }
    }
    if added < opts.extra_edges {
        return Err(Error::Infeasible(format!(
            "only {added} of {} extra edges fit under max_parents={}",
            opts.extra_edges, opts.max_parents
        )));
    }
    let mut b = NetworkBuilder::new();
    for v in 0..n_vars {
        let card = rng.gen_range(lo..=hi);
        b.add_variable(format!("V{v}"), (0..card).map(|i| format!("s{i}")).collect());
    }
    for (v, ps) in parents.into_iter().enumerate() {
        let mut ps = ps;
        ps.sort_unstable();
        let card = b.cardinality(v);
        let rows: usize = ps.iter().map(|&p| b.cardinality(p)).product();
        let mut table = Vec::with_capacity(rows * card);
        for _ in 0..rows {
            table.extend(random_row(&mut rng, card, opts.zero_entry_rate));
        }
        b.set_cpt(v, ps, table);
    }
    b.build()
}

fn random_row(rng: &mut ChaCha8Rng, card: usize, zero_rate: f64) -> Vec<f64> {
    let floor = 0.02;
    let w: Vec<f64> = (0..card).map(|_| rng.gen_range(0.0..1.0f64)).collect();
    let total: f64 = w.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mut row: Vec<f64> = w
        .iter()
        .map(|x| floor + (1.0 - floor * card as f64) * x / total)
        .collect();
    if zero_rate > 0.0 {
        let keep = rng.gen_range(0..card);
        for (i, x) in row.iter_mut().enumerate() {
            if i != keep && rng.gen_bool(zero_rate) {
                *x = 0.0;
            }
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutset::is_loop_cutset;
    use crate::model::format::serialize_network;
    use crate::model::oracle::oracle_marginal;
    use crate::model::Instantiation;

    #[test]
    fn single_rung_is_a_diamond() {
        let net = diamond_ladder(1, 7);
        assert_eq!(net.len(), 4);
        assert_eq!(net.edge_count(), 4);
        assert!(!net.is_singly_connected());
        assert_eq!(net.parents(3), &[1, 2]);
    }

    #[test]
    fn ladder_entries_in_range() {
        let net = diamond_ladder(5, 3);
        assert_eq!(net.len(), 16);
        for cpt in net.cpts() {
            assert!(cpt.table().iter().all(|&p| (0.05..=0.95).contains(&p)));
        }
    }

    #[test]
    fn ladder_minimum_cutset_is_k() {
        for k in 1..=3 {
            assert_eq!(minimum_cutset_size(&diamond_ladder(k, 11)), k);
        }
        for k in [1, 4, 9, 20] {
            assert!(is_loop_cutset(&diamond_ladder(k, 0), &ladder_cutset(k)));
        }
    }

    fn minimum_cutset_size(net: &Network) -> usize {
        let n = net.len();
        (0u32..1 << n)
            .filter(|mask| {
                let vars: Vec<VarId> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
                is_loop_cutset(net, &vars)
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn adder_cutsets_need_two_per_carried_bit() {
        for n in 1..=3 {
            let net = n_bit_adder(n, 0.01, 0);
            assert_eq!(minimum_cutset_size(&net), 2 * n - 1);
        }
    }

    #[test]
    fn noiseless_adder_is_a_truth_table() {
        let net = n_bit_adder(1, 0.0, 5);
        let sum = net.var_id("Sum_0").unwrap();
        let carry = net.var_id("Carry_0").unwrap();
        assert_eq!(net.cpt(sum).table(), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(net.cpt(carry).table(), &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn adder_wiring() {
        let net = n_bit_adder(3, 0.01, 1);
        assert_eq!(net.len(), 12);
        let s2 = net.var_id("Sum_2").unwrap();
        let names: Vec<&str> = net.parents(s2).iter().map(|&p| net.name(p)).collect();
        assert_eq!(names, ["In1_2", "In2_2", "Carry_1"]);
        let e = net.instantiation(&[("Sum_0", "1")]).unwrap();
        let p = oracle_marginal(&net, &e, net.var_id("Carry_2").unwrap()).unwrap();
        assert!(p.total() > 0.0);
    }

    #[test]
    fn clamping_sets_root_priors() {
        let net = n_bit_adder(1, 0.0, 2);
        let clamped = clamp_roots(&net, &[(0, 1), (1, 1)]).unwrap();
        let carry = clamped.var_id("Carry_0").unwrap();
        let bel = oracle_marginal(&clamped, &Instantiation::new(), carry).unwrap();
        assert_eq!(bel.values, vec![0.0, 1.0]);
        assert!(clamp_roots(&net, &[(carry, 0)]).is_err());
    }

    #[test]
    fn random_tree_is_polytree() {
        for seed in 0..20 {
            let net = random_loopy(10, 3, 0, seed).unwrap();
            assert!(net.is_singly_connected());
            assert_eq!(net.edge_count(), 9);
        }
    }

    #[test]
    fn extra_edges_make_loops() {
        for seed in 0..20 {
            let net = random_loopy(12, 3, 3, seed).unwrap();
            assert!(!net.is_singly_connected());
            assert_eq!(net.edge_count(), 14);
            assert!(net.cpts().iter().all(|c| c.parents().len() <= 3));
            assert!(net
                .cpts()
                .iter()
                .all(|c| c.table().iter().all(|&p| (0.02..=0.98).contains(&p))));
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = GeneratorSpec {
            cardinality: 2..=4,
            ..GeneratorSpec::new(Family::Random, 9, 42)
        };
        let a = serialize_network(&spec.generate().unwrap());
        let b = serialize_network(&spec.generate().unwrap());
        assert_eq!(a, b);
        let c = serialize_network(&GeneratorSpec { seed: 43, ..spec }.generate().unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn zero_entries_on_request() {
        let opts = RandomOptions {
            extra_edges: 2,
            zero_entry_rate: 0.5,
            ..RandomOptions::default()
        };
        let net = random_network(8, 3, &opts).unwrap();
        assert!(net.cpts().iter().any(|c| c.table().contains(&0.0)));
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(random_loopy(3, 2, 10, 0), Err(Error::Infeasible(_))));
        assert!(matches!(random_loopy(4, 0, 0, 0), Err(Error::Infeasible(_))));
        assert!(GeneratorSpec {
            noise: 0.5,
            ..GeneratorSpec::new(Family::Adder, 2, 0)
        }
        .generate()
        .is_err());
    }
}
