//! Acceptance criteria 1 to 10. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

mod common;

use std::io::Write;
use std::time::Instant;

use common::{corpus_network, evidence_patterns, max_diff, relevance_probes};
use dyncond::bcond::{Method, SweepTable};
use dyncond::cutset::{cutset_conditioning_belief, cutset_conditioning_beliefs, ConditionedNetwork};
use dyncond::netgen::{diamond_ladder, n_bit_adder, random_network, RandomOptions};
use dyncond::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: u64 = 200;
const BOUND_CORPUS: u64 = 100;
const EPSILONS: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.01];

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line survives output capture.
    let _ = writeln!(std::io::stderr(), "acceptance {n:>2} {verdict} {name}: {}", o.detail);
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut runs, mut polytree_runs) = (0.0f64, 0, 0);
    for i in 0..CORPUS {
        let net = corpus_network(i);
        for e in evidence_patterns(&net, i) {
            let f = Findings::from_evidence(&net, &e).unwrap();
            let oracle = oracle_marginals(&net, &f).unwrap();
            let (cutset, _) = cutset_conditioning_beliefs(&net, &f, None, None).unwrap();
            let (dynamic, _) = dc_belief_all(&net, &e).unwrap();
            let polytree: Option<Vec<SupportVector>> = net.is_singly_connected().then(|| {
                polytree_runs += 1;
                let cn = ConditionedNetwork::unconditioned(&net, &f);
                let mut state = PolytreeState::new(&cn).unwrap();
                (0..net.len()).map(|v| state.belief(v).unwrap()).collect()
            });
            for (v, o) in oracle.iter().enumerate() {
                worst = worst.max(max_diff(&o.values, &cutset[v].values));
                worst = worst.max(max_diff(&o.values, &dynamic[v].values));
                if let Some(p) = &polytree {
                    worst = worst.max(max_diff(&o.values, &p[v].values));
                }
            }
            runs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-9 && secs < 60.0,
        detail: format!("{runs} runs ({polytree_runs} with polytree), max deviation {worst:.2e}, {secs:.1}s"),
    }
}

fn local_cutset_verification() -> Outcome {
    let (mut checked, mut failures) = (0, 0);
    for i in 0..CORPUS {
        let net = corpus_network(i);
        let analysis = CutsetAnalysis::new(&net, find_loop_cutset(&net));
        for x in 0..net.len() {
            checked += 3;
            failures += analysis.verify(&net, x).iter().filter(|ok| !**ok).count();
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{checked} local cutsets checked, {failures} failures"),
    }
}

fn relevant_cutset_soundness() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..CORPUS {
        let net = corpus_network(i);
        let e = evidence_patterns(&net, i).pop().unwrap();
        let f = Findings::from_evidence(&net, &e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        worst = worst.max(relevance_probes(&net, &f, 200, &mut rng));
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("{} probes, max deviation {worst:.2e}", CORPUS * 200),
    }
}

fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

fn ladder_linearity() -> Outcome {
    let (mut ks, mut counts, mut max_arc) = (Vec::new(), Vec::new(), 0);
    let mut cases_ok = true;
    let mut at_ten = 0;
    for k in 2..=20usize {
        let net = diamond_ladder(k, k as u64);
        let sink = net.len() - 1;
        let (_, stats) = dc_belief(&net, sink, &Instantiation::new()).unwrap();
        max_arc = max_arc.max(stats.max_per_arc());
        ks.push(k as f64);
        counts.push(stats.messages_computed as f64);
        if k <= 12 {
            let run = cutset_conditioning_belief(&net, sink, &Instantiation::new(), None).unwrap();
            cases_ok &= run.cases == 1u128 << k;
            if k == 10 {
                at_ten = run.cases;
            }
        }
    }
    let r2 = r_squared(&ks, &counts);
    Outcome {
        pass: max_arc <= 2 && r2 >= 0.99 && cases_ok && at_ten == 1024,
        detail: format!(
            "max per-arc {max_arc}, messages {}..{} with R^2 {r2:.6}, cutset cases 2^k through k=12 {}, k=10 -> {at_ten}",
            counts[0],
            counts[counts.len() - 1],
            if cases_ok { "yes" } else { "no" }
        ),
    }
}

fn adder_linearity() -> Outcome {
    let count = |n: usize| {
        let net = n_bit_adder(n, 0.01, 7);
        let t = net.var_id(&format!("Carry_{}", n - 1)).unwrap();
        dc_belief(&net, t, &Instantiation::new()).unwrap().1.messages_computed as f64
    };
    let ratios: Vec<f64> = [4, 8].iter().map(|&n| count(2 * n) / count(n)).collect();
    let mut cases = Vec::new();
    let mut product_ok = true;
    for n in 1..=6 {
        let net = n_bit_adder(n, 0.01, 7);
        let cutset = find_loop_cutset(&net);
        let t = net.var_id(&format!("Carry_{}", n - 1)).unwrap();
        let run = cutset_conditioning_belief(&net, t, &Instantiation::new(), Some(&cutset)).unwrap();
        product_ok &= run.cases == cutset.case_count(&net);
        cases.push(run.cases);
    }
    let growing = cases.windows(2).all(|w| w[1] >= 2 * w[0]);
    Outcome {
        pass: ratios.iter().all(|&r| r <= 2.3) && product_ok && growing,
        detail: format!("message ratios {ratios:.3?} for n=4,8; cutset cases n=1..6 {cases:?}"),
    }
}

fn cache_effectiveness() -> Outcome {
    let opts = RandomOptions {
        extra_edges: 8,
        ..RandomOptions::default()
    };
    let net = random_network(20, 0, &opts).unwrap();
    let analysis = CutsetAnalysis::new(&net, find_loop_cutset(&net));
    let full = analysis.cutset.case_count(&net);
    let (mut equal, mut strict, mut proper) = (true, true, 0);
    for x in 0..net.len() {
        let mut engine = DynamicEngine::with_analysis(&net, Findings::none(&net), analysis.clone());
        engine.belief(x).unwrap();
        let stats = engine.stats();
        equal &= stats.lambda_support_evaluations[x] == stats.lambda_support_keys[x];
        if analysis.relevant.lambda_support(x).len() < analysis.cutset.len() {
            proper += 1;
            strict &= (stats.lambda_support_evaluations[x] as u128) < full;
        }
    }
    let cached = DynamicEngine::new(&net, Findings::none(&net)).belief_all().unwrap();
    let uncached = DynamicEngine::new(&net, Findings::none(&net))
        .without_cache()
        .belief_all()
        .unwrap();
    let bitwise = cached
        .iter()
        .zip(&uncached)
        .all(|(a, b)| a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    Outcome {
        pass: equal && strict && proper > 0 && bitwise,
        detail: format!(
            "cutset size {} ({full} cases), evaluations = distinct keys: {equal}, below {full} for all {proper} vars with smaller relevant set: {strict}, cache on/off bitwise equal: {bitwise}",
            analysis.cutset.len()
        ),
    }
}

struct BoundRuns {
    checks: usize,
    violations: usize,
    inconsistent: usize,
    nesting_failures: usize,
    lost_mass_failures: usize,
}

fn bound_corpus() -> BoundRuns {
    let mut r = BoundRuns {
        checks: 0,
        violations: 0,
        inconsistent: 0,
        nesting_failures: 0,
        lost_mass_failures: 0,
    };
    for i in 0..BOUND_CORPUS {
        let net = corpus_network(i);
        let mut rng = ChaCha8Rng::seed_from_u64(i ^ 0xB0B);
        let mut e = Instantiation::new();
        let roots: Vec<VarId> = (0..net.len()).filter(|&v| net.parents(v).is_empty()).collect();
        if i % 2 == 1 {
            let v = roots[rng.gen_range(0..roots.len())];
            e.insert(v, rng.gen_range(0..net.cardinality(v)));
        }
        let exact = oracle_marginals(&net, &Findings::from_evidence(&net, &e).unwrap()).unwrap();
        for (x, o) in exact.iter().enumerate() {
            let mut previous: Option<(AssumptionSet, f64)> = None;
            for &eps in &EPSILONS {
                let b = match bounded_belief(&net, x, &e, eps, Method::Dynamic) {
                    Ok(b) => b,
                    Err(Error::AbstractionInconsistent(_)) => {
                        r.inconsistent += 1;
                        continue;
                    }
                    Err(err) => panic!("{err}"),
                };
                for (v, &p) in o.values.iter().enumerate() {
                    r.checks += 1;
                    if !b.bounds.contains(v, p, 1e-9) {
                        r.violations += 1;
                    }
                }
                if let Some((a, lost)) = &previous {
                    r.nesting_failures += usize::from(!b.assumptions.is_subset(a));
                    r.lost_mass_failures += usize::from(b.bounds.lost_mass > lost + 1e-12);
                }
                previous = Some((b.assumptions, b.bounds.lost_mass));
            }
        }
    }
    r
}

fn bound_validity(runs: &BoundRuns) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut adversarial_violations = 0;
    for k in 0..50u64 {
        let net = corpus_network(k * 2);
        let mut a = AssumptionSet::empty(&net);
        for _ in 0..rng.gen_range(1..=4) {
            let v = rng.gen_range(0..net.len());
            let _ = a.assume_not(v, rng.gen_range(0..net.cardinality(v)));
        }
        let exact = oracle_marginals(&net, &Findings::none(&net)).unwrap();
        for (x, o) in exact.iter().enumerate() {
            let (lower, _) = pruned_belief(&net, x, &Instantiation::new(), &a, Method::Dynamic).unwrap();
            let b = Bounds::from_lower(lower);
            adversarial_violations += o
                .values
                .iter()
                .enumerate()
                .filter(|&(v, &p)| !b.contains(v, p, 1e-9))
                .count();
        }
    }
    let mut zero_worst = 0.0f64;
    for i in 0..BOUND_CORPUS {
        let net = corpus_network(i);
        let exact = oracle_marginals(&net, &Findings::none(&net)).unwrap();
        for (x, o) in exact.iter().enumerate() {
            let b = bounded_belief(&net, x, &Instantiation::new(), 0.0, Method::Dynamic).unwrap();
            zero_worst = zero_worst
                .max(max_diff(&o.values, &b.bounds.lower))
                .max(max_diff(&o.values, &b.bounds.upper));
        }
    }
    Outcome {
        pass: runs.violations == 0 && adversarial_violations == 0 && zero_worst <= 1e-9,
        detail: format!(
            "{} bound checks, {} violations ({} epsilon/variable pairs abstraction-inconsistent); 50 adversarial sets, {adversarial_violations} violations; epsilon=0 max gap {zero_worst:.2e}",
            runs.checks, runs.violations, runs.inconsistent
        ),
    }
}

fn epsilon_monotonicity(runs: &BoundRuns) -> Outcome {
    Outcome {
        pass: runs.nesting_failures == 0 && runs.lost_mass_failures == 0,
        detail: format!(
            "non-nested steps {}, lost_mass increases {}",
            runs.nesting_failures, runs.lost_mass_failures
        ),
    }
}

fn table_shape() -> Outcome {
    let (mut shape_ok, mut worst) = (true, 0.0f64);
    let mut rows_seen = 0;
    for seed in 0..10 {
        let opts = RandomOptions {
            extra_edges: 3,
            cardinality: 2..=3,
            ..RandomOptions::default()
        };
        let net = random_network(14, seed, &opts).unwrap();
        let target = net.len() - 1;
        let rows = match epsilon_sweep(
            &net,
            target,
            &Instantiation::new(),
            &[0.2, 0.1, 0.05, 0.02],
            Method::Dynamic,
        ) {
            Ok(rows) => rows,
            Err(Error::AbstractionInconsistent(_)) => {
                epsilon_sweep(&net, target, &Instantiation::new(), &[0.1, 0.05, 0.02], Method::Dynamic).unwrap()
            }
            Err(e) => panic!("{e}"),
        };
        let table = SweepTable { net: &net, rows: &rows };
        let header = table.header();
        let card = net.cardinality(target);
        shape_ok &= header.len() == 2 * card + 4
            && header[0] == "epsilon"
            && header[1] == "assumptions"
            && header[2].starts_with("lower(")
            && header[header.len() - 2] == "lost_mass"
            && header[header.len() - 1] == "messages";
        shape_ok &= table
            .to_string()
            .lines()
            .skip(1)
            .all(|l| l.split('\t').count() == header.len());
        for row in &rows {
            rows_seen += 1;
            let sum: f64 = row.bounds.lower.iter().sum();
            worst = worst.max((row.bounds.lost_mass - (1.0 - sum)).abs());
            for (l, u) in row.bounds.lower.iter().zip(&row.bounds.upper) {
                worst = worst.max((u - l - row.bounds.lost_mass).abs());
            }
        }
    }
    Outcome {
        pass: shape_ok && worst <= 1e-12,
        detail: format!(
            "{rows_seen} sweep rows, column layout ok: {shape_ok}, lost_mass identity max error {worst:.2e}"
        ),
    }
}

fn round_trip() -> Outcome {
    let mut nets: Vec<Network> = vec![fixtures::net_a(), fixtures::net_d(), fixtures::net_d_rare_a()];
    nets.extend((0..CORPUS).map(corpus_network));
    nets.extend((1..=8).map(|k| diamond_ladder(k, k as u64)));
    nets.extend((1..=4).map(|n| n_bit_adder(n, 0.01, n as u64)));
    nets.push(n_bit_adder(2, 0.0, 0));
    let failures = nets
        .iter()
        .filter(|net| {
            let text = serialize_network(*net);
            match parse_network::<f64>(&text) {
                Ok(back) => &back != *net || serialize_network(&back) != text,
                Err(_) => true,
            }
        })
        .count();
    Outcome {
        pass: failures == 0,
        detail: format!("{} networks, {failures} failures", nets.len()),
    }
}

#[test]
fn acceptance() {
    let runs = bound_corpus();
    let outcomes = [
        ("oracle equivalence", oracle_equivalence()),
        ("local cutset verification", local_cutset_verification()),
        ("relevant cutset soundness", relevant_cutset_soundness()),
        ("diamond ladder linearity", ladder_linearity()),
        ("adder linearity", adder_linearity()),
        ("cache effectiveness", cache_effectiveness()),
        ("bound validity", bound_validity(&runs)),
        ("epsilon monotonicity", epsilon_monotonicity(&runs)),
        ("sweep table shape", table_shape()),
        ("format round trip", round_trip()),
    ];
    for (i, (name, o)) in outcomes.iter().enumerate() {
        report(i + 1, name, o);
    }
    let failed: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (_, o))| !o.pass)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
