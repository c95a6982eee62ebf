#![allow(dead_code)]

use dyncond::netgen::{random_network, RandomOptions};
use dyncond::{Instantiation, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Joint-state ceiling for corpus networks, keeping the oracle fast.
pub const CORPUS_STATE_LIMIT: u128 = 1 << 18;

/// Corpus network `index`: 4 to 12 variables, cardinalities 2 to 4,
/// 0 to 3 extra edges. Draws are redone from the same stream until the
/// joint state space fits under [`CORPUS_STATE_LIMIT`].
pub fn corpus_network(index: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ index);
    loop {
        let n = rng.gen_range(4..=12);
        let opts = RandomOptions {
            max_parents: 3,
            extra_edges: rng.gen_range(0..=3),
            cardinality: 2..=rng.gen_range(2..=4),
            zero_entry_rate: 0.0,
        };
        if let Ok(net) = random_network(n, rng.gen(), &opts) {
            if net.state_count() <= CORPUS_STATE_LIMIT {
                return net;
            }
        }
    }
}

/// Up to three observed variables with values drawn uniformly.
pub fn random_evidence(net: &Network, rng: &mut impl Rng) -> Instantiation {
    let mut e = Instantiation::new();
    for _ in 0..rng.gen_range(0..=3) {
        let v = rng.gen_range(0..net.len());
        e.insert(v, rng.gen_range(0..net.cardinality(v)));
    }
    e
}

/// Three evidence patterns per network: none, one observation, and a
/// random pattern.
pub fn evidence_patterns(net: &Network, index: u64) -> Vec<Instantiation> {
    let mut rng = ChaCha8Rng::seed_from_u64(index.wrapping_mul(0x9E37_79B9));
    let v = rng.gen_range(0..net.len());
    let single = Instantiation::from_pairs([(v, rng.gen_range(0..net.cardinality(v)))]);
    vec![Instantiation::new(), single, random_evidence(net, &mut rng)]
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

use dyncond::cutset::cutset_instantiations;
use dyncond::{CutsetAnalysis, Findings, PolytreeState, VarId};

/// A quantity whose value should depend on the cutset only through its
/// relevant set.
#[derive(Clone, Copy, Debug)]
pub enum Probe {
    Pi(VarId),
    Lambda(VarId),
    PiMessage(VarId, VarId),
    LambdaMessage(VarId, VarId),
}

pub fn probes(analysis: &CutsetAnalysis, n: usize) -> Vec<Probe> {
    let s = &analysis.structure;
    let mut out = Vec::new();
    for x in 0..n {
        out.push(Probe::Pi(x));
        out.push(Probe::Lambda(x));
        for &y in s.children(x) {
            out.push(Probe::PiMessage(x, y));
            out.push(Probe::LambdaMessage(y, x));
        }
    }
    out
}

fn relevant(analysis: &CutsetAnalysis, p: Probe) -> Vec<VarId> {
    let r = &analysis.relevant;
    match p {
        Probe::Pi(x) => r.pi_support(x).to_vec(),
        Probe::Lambda(x) => r.lambda_support(x).to_vec(),
        Probe::PiMessage(u, x) => r.pi_message(u, x).to_vec(),
        Probe::LambdaMessage(y, x) => r.lambda_message(x, y).to_vec(),
    }
}

fn evaluate(net: &Network, analysis: &CutsetAnalysis, findings: &Findings, c: &Instantiation, p: Probe) -> Vec<f64> {
    let cn = analysis.structure.instantiate(net, c, findings).unwrap();
    let mut state = PolytreeState::new(&cn).unwrap();
    match p {
        Probe::Pi(x) => state.compute_pi(x),
        Probe::Lambda(x) => state.compute_lambda(x),
        Probe::PiMessage(u, x) => state.pi_message(u, x),
        Probe::LambdaMessage(y, x) => state.lambda_message(y, x),
    }
    .unwrap()
    .values
}

/// Runs `count` probes: a random quantity under two full cutset
/// instantiations that agree on its relevant set. Returns the largest
/// disagreement seen.
pub fn relevance_probes(net: &Network, findings: &Findings, count: usize, rng: &mut impl Rng) -> f64 {
    let analysis = CutsetAnalysis::new(net, dyncond::find_loop_cutset(net));
    let all = probes(&analysis, net.len());
    let cutset = analysis.cutset.vars().to_vec();
    let cases: Vec<Instantiation> = cutset_instantiations(net, &cutset).collect();
    let mut worst = 0.0f64;
    for _ in 0..count {
        let p = all[rng.gen_range(0..all.len())];
        let r = relevant(&analysis, p);
        let c1 = &cases[rng.gen_range(0..cases.len())];
        let mut c2 = Instantiation::new();
        for &v in &cutset {
            let x = if r.contains(&v) {
                c1.get(v).unwrap()
            } else {
                rng.gen_range(0..net.cardinality(v))
            };
            c2.insert(v, x);
        }
        let a = evaluate(net, &analysis, findings, c1, p);
        let b = evaluate(net, &analysis, findings, &c2, p);
        worst = worst.max(max_diff(&a, &b));
    }
    worst
}
