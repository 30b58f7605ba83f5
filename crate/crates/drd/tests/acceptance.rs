//! Acceptance gate: ten end-to-end checks, printed one verdict line each.
//!
//! Each criterion pins its own scale and tolerances in code; the wall-clock
//! budgets are for a desktop-class single core. A FAIL on any line fails the
//! whole target.

use std::io::Write as _;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use drd::weights::embedded_priors;
use drd::{
    apply_test, check_adaptive_properties, check_theorem1, check_theorem3,
    check_weight_equivalence, consistent_hypotheses, expected_cost, generate_clustered,
    is_solved, make_baseline, make_baseline_with_index, marginal_gain, random_instance,
    run_policy, save_instance, select_test_greedy, ClusteredParams, CoverageMode,
    DocumentMetadata, Evidence, HypothesisId, InstanceDocument, InstanceParts, PolicyKind,
    PolicyTrace, ProblemInstance, RegionId, SubregionIndex, TestId,
};

type Check = fn() -> Result<String, String>;

#[test]
fn acceptance() {
    let criteria: [(&str, Option<u64>, Check); 10] = [
        ("weight oracle equivalence", Some(60), c1_weight_oracle),
        ("solved iff every edge cut", Some(60), c2_solved_iff_cut),
        ("adaptive monotone submodular", Some(120), c3_adaptive),
        ("greedy within the cost bound", Some(300), c4_cost_bound),
        ("partition and singleton reductions", None, c5_reductions),
        ("zero-cost extreme", None, c6_zero_cost),
        ("clustered trend", Some(600), c7_trend),
        ("greedy step latency", None, c8_latency),
        ("byte-identical reruns", None, c9_determinism),
        ("interactive fidelity", None, c10_interactive),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let within = budget.map_or(true, |b| elapsed <= Duration::from_secs(b));
        let ok = result.is_ok() && within;
        let mut line = format!(
            "criterion {:>2} ({name}): {} [{elapsed:.1?}] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            match &result {
                Ok(detail) => detail,
                Err(detail) => detail,
            }
        );
        if !within {
            line.push_str(&format!(" — exceeded the {}s budget", budget.unwrap()));
        }
        println!("{line}");
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

/// Fast weight computation equals the brute-force multiset enumeration on 500
/// instances per arithmetic: within 1e-9 for floats, exactly for rationals.
fn c1_weight_oracle() -> Result<String, String> {
    let float = check_weight_equivalence::<f64>(0..500, 2);
    if !float.ok() {
        return Err(format!("float mode: {}", float.counterexamples[0]));
    }
    if float.max_deviation > 1e-9 {
        return Err(format!(
            "float deviation {:.3e} above 1e-9",
            float.max_deviation
        ));
    }
    let exact = check_weight_equivalence::<BigRational>(0..500, 2);
    if !exact.ok() {
        return Err(format!("rational mode: {}", exact.counterexamples[0]));
    }
    if exact.max_deviation != 0.0 {
        return Err(format!(
            "rational deviation {:.3e} nonzero",
            exact.max_deviation
        ));
    }
    Ok(format!("float {float}; rational {exact}"))
}

/// Decidability equals hyperedge emptiness at every state of every walk.
fn c2_solved_iff_cut() -> Result<String, String> {
    let report = check_theorem1(0..100, 20);
    if !report.ok() {
        return Err(report.counterexamples[0].to_string());
    }
    Ok(format!("{report} over 100 instances x 20 walks"))
}

/// The objective never decreases along truthful chains and marginal gains
/// never grow with more evidence — within 1e-9 in float mode, exactly in
/// rational mode, 100 instances x 50 chains each.
fn c3_adaptive() -> Result<String, String> {
    let float = check_adaptive_properties::<f64>(0..100, 50);
    if !float.ok() {
        return Err(format!("float mode: {}", float.counterexamples[0]));
    }
    let exact = check_adaptive_properties::<BigRational>(0..100, 50);
    if !exact.ok() {
        return Err(format!("rational mode: {}", exact.counterexamples[0]));
    }
    if exact.max_deviation != 0.0 {
        return Err(format!(
            "rational mode saw drift {:.3e}",
            exact.max_deviation
        ));
    }
    Ok(format!("float {float}; rational {exact}"))
}

/// Greedy expected cost stays within (k·ln(1/p_min) + 1) of the exhaustive
/// optimum on 200 tiny decidable instances.
fn c4_cost_bound() -> Result<String, String> {
    let report = check_theorem3(0..200);
    if !report.ok() {
        return Err(report.counterexamples[0].to_string());
    }
    Ok(format!(
        "{report}; worst greedy/optimal ratio {:.3}",
        report.max_deviation
    ))
}

fn case_rng(seed: u64, salt: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
}

/// Disjoint regions: every hypothesis in exactly one class.
fn partition_instance(seed: u64) -> ProblemInstance {
    let mut rng = case_rng(seed, 1);
    let n_h = rng.gen_range(5..=9usize);
    let n_t = rng.gen_range(4..=8usize);
    let n_r = rng.gen_range(2..=4usize);
    let weights: Vec<f64> = (0..n_h).map(|_| rng.gen_range(1..=9) as f64).collect();
    let arities: Vec<u32> = (0..n_t).map(|_| rng.gen_range(2..=3)).collect();
    let outcomes: Vec<Vec<u32>> = (0..n_h)
        .map(|_| arities.iter().map(|&a| rng.gen_range(0..a)).collect())
        .collect();
    let mut regions: Vec<Vec<u32>> = vec![Vec::new(); n_r];
    for h in 0..n_h {
        let r = if h < n_r { h } else { rng.gen_range(0..n_r) };
        regions[r].push(h as u32);
    }
    let parts = InstanceParts {
        weights,
        arities,
        outcomes,
        regions,
    };
    ProblemInstance::from_parts(parts, CoverageMode::Strict)
        .expect("partition instance is valid")
        .0
}

/// Uniform prior, binary tests, one singleton region per hypothesis.
fn singleton_instance(seed: u64) -> ProblemInstance {
    let mut rng = case_rng(seed, 2);
    let n_h = rng.gen_range(4..=9usize);
    let n_t = rng.gen_range(4..=8usize);
    let outcomes: Vec<Vec<u32>> = (0..n_h)
        .map(|_| (0..n_t).map(|_| rng.gen_range(0..2u32)).collect())
        .collect();
    let parts = InstanceParts {
        weights: vec![1.0; n_h],
        arities: vec![2; n_t],
        outcomes,
        regions: (0..n_h).map(|h| vec![h as u32]).collect(),
    };
    ProblemInstance::from_parts(parts, CoverageMode::Strict)
        .expect("singleton instance is valid")
        .0
}

/// Σ over surviving cross-class hypothesis pairs of the product of priors —
/// the pairwise objective computed without subregions or polynomials.
fn pairwise_cross_mass(
    ids: &[HypothesisId],
    class_of: &[usize],
    priors: &[BigRational],
) -> BigRational {
    let mut w = BigRational::zero();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if class_of[ids[i].index()] != class_of[ids[j].index()] {
                w += &priors[ids[i].index()] * &priors[ids[j].index()];
            }
        }
    }
    w
}

fn pairwise_gain(
    instance: &ProblemInstance,
    evidence: &Evidence,
    test: TestId,
    class_of: &[usize],
    priors: &[BigRational],
) -> Result<BigRational, String> {
    let ids = consistent_hypotheses(instance, evidence)
        .map_err(|e| e.to_string())?
        .ids();
    let w_cur = pairwise_cross_mass(&ids, class_of, priors);
    let mut per: Vec<Vec<HypothesisId>> = vec![Vec::new(); instance.arity(test) as usize];
    for &h in &ids {
        per[instance.outcome(h, test).index()].push(h);
    }
    let total: BigRational = ids
        .iter()
        .fold(BigRational::zero(), |acc, h| acc + &priors[h.index()]);
    let mut expected = BigRational::zero();
    for group in &per {
        if group.is_empty() {
            continue;
        }
        let mass: BigRational = group
            .iter()
            .fold(BigRational::zero(), |acc, h| acc + &priors[h.index()]);
        expected += mass / &total * pairwise_cross_mass(group, class_of, priors);
    }
    Ok(w_cur - expected)
}

/// On partitions the edge-mass gain must equal the pairwise cross-class gain
/// test-for-test (so the argmax sets coincide); on uniform singleton binary
/// instances the greedy choice must maximize expected eliminated mass.
fn c5_reductions() -> Result<String, String> {
    // Partition reduction, exact arithmetic throughout.
    let mut instances = 0usize;
    let mut steps = 0usize;
    let mut seed = 0u64;
    while instances < 50 {
        if seed > 500 {
            return Err("could not assemble 50 informative partition cases".into());
        }
        let instance = Arc::new(partition_instance(seed));
        seed += 1;
        let index = SubregionIndex::build(&instance);
        if index.k() != 2 {
            return Err(format!("partition produced k = {}", index.k()));
        }
        let priors = embedded_priors::<BigRational>(&instance).map_err(|e| e.to_string())?;
        let class_of: Vec<usize> = (0..instance.num_hypotheses())
            .map(|h| instance.regions_of(HypothesisId(h as u32))[0].index())
            .collect();
        let truth = HypothesisId((seed % instance.num_hypotheses() as u64) as u32);
        let mut evidence = Evidence::empty();
        let mut informative = 0usize;
        loop {
            if is_solved(&instance, &evidence)
                .map_err(|e| e.to_string())?
                .is_some()
            {
                break;
            }
            let unanswered: Vec<TestId> = (0..instance.num_tests() as u32)
                .map(TestId)
                .filter(|&t| !evidence.contains_test(t))
                .collect();
            if unanswered.is_empty() {
                break;
            }
            let mut fast: Vec<(TestId, BigRational)> = Vec::new();
            let mut oracle: Vec<(TestId, BigRational)> = Vec::new();
            for &t in &unanswered {
                fast.push((
                    t,
                    marginal_gain::<BigRational>(&instance, &evidence, t, &index)
                        .map_err(|e| e.to_string())?,
                ));
                oracle.push((
                    t,
                    pairwise_gain(&instance, &evidence, t, &class_of, &priors)?,
                ));
            }
            for ((t, a), (_, b)) in fast.iter().zip(&oracle) {
                if a != b {
                    return Err(format!(
                        "seed {}: edge gain and pairwise gain differ on test {t}",
                        seed - 1
                    ));
                }
            }
            let best = fast.iter().map(|(_, g)| g.clone()).max().expect("nonempty");
            let set_fast: Vec<TestId> = fast
                .iter()
                .filter(|(_, g)| *g == best)
                .map(|&(t, _)| t)
                .collect();
            let set_oracle: Vec<TestId> = oracle
                .iter()
                .filter(|(_, g)| *g == best)
                .map(|&(t, _)| t)
                .collect();
            if set_fast != set_oracle {
                return Err(format!(
                    "seed {}: argmax sets differ ({set_fast:?} vs {set_oracle:?})",
                    seed - 1
                ));
            }
            if best.is_zero() {
                break;
            }
            steps += 1;
            informative += 1;
            let pick = set_fast[0];
            evidence = apply_test(&instance, &evidence, pick, instance.outcome(truth, pick))
                .map_err(|e| e.to_string())?;
        }
        if informative > 0 {
            instances += 1;
        }
    }
    let partition_steps = steps;

    // Singleton reduction: the greedy pick maximizes expected eliminated mass.
    let mut gbs_instances = 0usize;
    let mut gbs_steps = 0usize;
    seed = 0;
    while gbs_instances < 50 {
        if seed > 500 {
            return Err("could not assemble 50 informative singleton cases".into());
        }
        let instance = Arc::new(singleton_instance(seed));
        seed += 1;
        let index = SubregionIndex::build(&instance);
        let priors = embedded_priors::<BigRational>(&instance).map_err(|e| e.to_string())?;
        let truth = HypothesisId((seed % instance.num_hypotheses() as u64) as u32);
        let mut evidence = Evidence::empty();
        let mut informative = 0usize;
        loop {
            if is_solved(&instance, &evidence)
                .map_err(|e| e.to_string())?
                .is_some()
            {
                break;
            }
            let unanswered: Vec<TestId> = (0..instance.num_tests() as u32)
                .map(TestId)
                .filter(|&t| !evidence.contains_test(t))
                .collect();
            if unanswered.is_empty() {
                break;
            }
            let mut pick: Option<(TestId, BigRational)> = None;
            for &t in &unanswered {
                let gain = marginal_gain::<BigRational>(&instance, &evidence, t, &index)
                    .map_err(|e| e.to_string())?;
                if pick.as_ref().map_or(true, |(_, g)| gain > *g) {
                    pick = Some((t, gain));
                }
            }
            let (pick, best_gain) = pick.expect("nonempty");
            if best_gain.is_zero() {
                break;
            }
            let survivors = consistent_hypotheses(&instance, &evidence)
                .map_err(|e| e.to_string())?
                .ids();
            let eliminated = |t: TestId| -> BigRational {
                let total: BigRational = survivors
                    .iter()
                    .fold(BigRational::zero(), |acc, h| acc + &priors[h.index()]);
                let mut per = vec![BigRational::zero(); instance.arity(t) as usize];
                for &h in &survivors {
                    per[instance.outcome(h, t).index()] += &priors[h.index()];
                }
                per.iter()
                    .fold(BigRational::zero(), |acc, m| acc + m / &total * (&total - m))
            };
            let best_elimination = unanswered
                .iter()
                .map(|&t| eliminated(t))
                .max()
                .expect("nonempty");
            if eliminated(pick) != best_elimination {
                return Err(format!(
                    "seed {}: pick {pick} does not maximize expected eliminated mass",
                    seed - 1
                ));
            }
            gbs_steps += 1;
            informative += 1;
            evidence = apply_test(&instance, &evidence, pick, instance.outcome(truth, pick))
                .map_err(|e| e.to_string())?;
        }
        if informative > 0 {
            gbs_instances += 1;
        }
    }
    Ok(format!(
        "50 partition instances ({partition_steps} steps, exact gain equality); \
         50 singleton instances ({gbs_steps} steps, eliminated-mass maxima)"
    ))
}

/// Hypotheses that all lie in every region cost zero queries.
fn c6_zero_cost() -> Result<String, String> {
    let parts = InstanceParts {
        weights: vec![1.0; 4],
        arities: vec![2, 2],
        outcomes: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        regions: vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]],
    };
    let (instance, _) = ProblemInstance::from_parts(parts, CoverageMode::Strict)
        .map_err(|e| e.to_string())?;
    let instance = Arc::new(instance);
    for kind in [PolicyKind::Hec, PolicyKind::GbsHec, PolicyKind::Ec2Hec] {
        let prepared = make_baseline(kind, &instance, 0).map_err(|e| e.to_string())?;
        let eval = expected_cost::<f64>(&prepared).map_err(|e| e.to_string())?;
        if eval.expected_cost != 0.0 || eval.max_cost != 0 {
            return Err(format!(
                "{kind}: expected cost {} (max {})",
                eval.expected_cost, eval.max_cost
            ));
        }
    }
    Ok("hec, gbs-hec, ec2-hec decide with exactly zero queries".into())
}

/// On one clustered geometry (200 points, 12 clusters), sweeping the region
/// overlap α = 1..=4 gives k = 2..=5; the greedy policy's expected cost over
/// all 200 truths must not increase with α and must stay within half a query
/// of every baseline.
fn c7_trend() -> Result<String, String> {
    const GEOMETRY_SEED: u64 = 2;
    const SLACK: f64 = 0.5;
    let baselines = [PolicyKind::Ec2Hec, PolicyKind::GbsHec, PolicyKind::Voi];
    let mut hec_means: Vec<f64> = Vec::new();
    let mut detail = String::new();
    for alpha in 1..=4usize {
        let doc = generate_clustered(&ClusteredParams {
            num_points: 200,
            dim: 8,
            num_clusters: 12,
            assign_alpha: alpha,
            num_tests: Some(66),
            seed: GEOMETRY_SEED,
        })
        .map_err(|e| e.to_string())?;
        let (instance, _) = doc
            .instantiate(CoverageMode::Strict)
            .map_err(|e| e.to_string())?;
        let instance = Arc::new(instance);
        let index = Arc::new(SubregionIndex::build(&instance));
        if index.k() != alpha + 1 {
            return Err(format!("alpha {alpha} produced k = {}", index.k()));
        }
        let hec = make_baseline_with_index(PolicyKind::Hec, &instance, 0, index.clone())
            .map_err(|e| e.to_string())?;
        let hec_cost = expected_cost::<f64>(&hec)
            .map_err(|e| e.to_string())?
            .expected_cost;
        for kind in baselines {
            let prepared = make_baseline_with_index(kind, &instance, 0, index.clone())
                .map_err(|e| e.to_string())?;
            let cost = expected_cost::<f64>(&prepared)
                .map_err(|e| e.to_string())?
                .expected_cost;
            if hec_cost > cost + SLACK {
                return Err(format!(
                    "alpha {alpha}: hec {hec_cost:.3} exceeds {kind} {cost:.3} + {SLACK}"
                ));
            }
        }
        detail.push_str(&format!("k{}:{hec_cost:.2} ", alpha + 1));
        hec_means.push(hec_cost);
    }
    for pair in hec_means.windows(2) {
        if pair[1] > pair[0] + 1e-9 {
            return Err(format!("hec means increase with alpha: {hec_means:?}"));
        }
    }
    Ok(format!(
        "hec mean queries {}over 200 truths each, within 0.5 of all baselines",
        detail
    ))
}

/// One greedy step (index build plus root selection) on a 47-subregion
/// clustered instance: under a second through k = 4, under two minutes at
/// k = 5.
fn c8_latency() -> Result<String, String> {
    let mut detail = String::new();
    for alpha in 1..=4usize {
        let doc = generate_clustered(&ClusteredParams {
            num_points: 200,
            dim: 8,
            num_clusters: 12,
            assign_alpha: alpha,
            num_tests: Some(66),
            seed: 42,
        })
        .map_err(|e| e.to_string())?;
        let (instance, _) = doc
            .instantiate(CoverageMode::Strict)
            .map_err(|e| e.to_string())?;
        let start = Instant::now();
        let index = SubregionIndex::build(&instance);
        let picked = select_test_greedy::<f64>(&instance, &Evidence::empty(), &index, None)
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        if index.num_subregions() > 50 {
            return Err(format!(
                "alpha {alpha}: {} subregions is outside the measured case",
                index.num_subregions()
            ));
        }
        let k = index.k();
        let budget = if k <= 4 {
            Duration::from_secs(1)
        } else {
            Duration::from_secs(120)
        };
        if elapsed > budget {
            return Err(format!("k = {k}: step took {elapsed:.1?} (budget {budget:?})"));
        }
        if picked.is_none() {
            return Err(format!("k = {k}: no test selected at the root"));
        }
        detail.push_str(&format!("k{k}:{elapsed:.1?} ", ));
    }
    Ok(format!("{detail}on 12..=47 subregions"))
}

/// The same seeds and flags must reproduce the results CSV byte for byte.
fn c9_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_drd");
    let inst = dir.path().join("inst.json");
    let generated = Command::new(bin)
        .args(["generate", "clustered", "--points", "50", "--clusters", "8"])
        .args(["--alpha", "2", "--seed", "9", "-o"])
        .arg(&inst)
        .output()
        .map_err(|e| e.to_string())?;
    if !generated.status.success() {
        return Err(format!(
            "generate failed: {}",
            String::from_utf8_lossy(&generated.stderr)
        ));
    }
    let mut outputs = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("out{run}.csv"));
        let ran = Command::new(bin)
            .arg("run")
            .arg(&inst)
            .args(["--policies", "hec,ec2-hec,voi", "--trials", "25", "--seed", "4", "-o"])
            .arg(&csv)
            .output()
            .map_err(|e| e.to_string())?;
        if !ran.status.success() {
            return Err(format!(
                "run failed: {}",
                String::from_utf8_lossy(&ran.stderr)
            ));
        }
        outputs.push(std::fs::read(&csv).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("results differ between identical invocations".into());
    }
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    Ok(format!(
        "{} bytes ({rows} rows) identical across reruns",
        outputs[0].len()
    ))
}

fn parts_of(instance: &ProblemInstance) -> InstanceParts {
    InstanceParts {
        weights: instance.priors().to_vec(),
        arities: (0..instance.num_tests())
            .map(|t| instance.arity(TestId(t as u32)))
            .collect(),
        outcomes: (0..instance.num_hypotheses())
            .map(|h| instance.answer_row(HypothesisId(h as u32)).to_vec())
            .collect(),
        regions: (0..instance.num_regions())
            .map(|r| {
                instance
                    .region_members(RegionId(r as u32))
                    .iter()
                    .map(|h| h.0)
                    .collect()
            })
            .collect(),
    }
}

/// A scripted terminal session answering as a fixed hypothesis must ask
/// exactly the questions the batch runner's trace contains, then announce the
/// same region after the same count.
fn c10_interactive() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_drd");
    let mut cases = 0usize;
    let mut questions = 0usize;
    let mut seed = 0u64;
    while cases < 20 {
        if seed > 500 {
            return Err("could not assemble 20 decidable cases".into());
        }
        let generated = random_instance(seed);
        let path = dir.path().join(format!("case{seed}.json"));
        let doc = InstanceDocument::from_parts(&parts_of(&generated), DocumentMetadata::default());
        save_instance(&doc, &path).map_err(|e| e.to_string())?;
        seed += 1;

        // Both sides work from the loaded file so they see bit-identical
        // priors.
        let (instance, _) = drd::load_instance(&path)
            .and_then(|d| d.instantiate(CoverageMode::Strict))
            .map_err(|e| e.to_string())?;
        let instance = Arc::new(instance);
        let prepared = match make_baseline(PolicyKind::Hec, &instance, 0) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let mut trace: Option<PolicyTrace> = None;
        for h in 0..instance.num_hypotheses() {
            if let Ok(t) = run_policy::<f64>(&prepared, HypothesisId(h as u32)) {
                trace = Some(t);
                break;
            }
        }
        let Some(trace) = trace else { continue };

        let mut child = Command::new(bin)
            .arg("interactive")
            .arg(&path)
            .arg("--quiet")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?;
        let script: String = trace
            .steps
            .iter()
            .map(|s| format!("{}\n", s.outcome))
            .collect();
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(script.as_bytes())
            .map_err(|e| e.to_string())?;
        let output = child.wait_with_output().map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(format!("seed {}: interactive exited nonzero", seed - 1));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        let asked: Vec<u32> = stdout
            .lines()
            .filter_map(|l| l.strip_prefix("Q: test "))
            .filter_map(|rest| rest.split_whitespace().next())
            .filter_map(|id| id.parse().ok())
            .collect();
        let expected: Vec<u32> = trace.steps.iter().map(|s| s.test.0).collect();
        if asked != expected {
            return Err(format!(
                "seed {}: session asked {asked:?}, trace ran {expected:?}",
                seed - 1
            ));
        }
        let wanted = format!(
            "SOLVED: region {} after {} question(s)",
            trace.terminal_region.expect("solved trace"),
            trace.cost()
        );
        if !stdout.lines().any(|l| l == wanted) {
            return Err(format!("seed {}: missing announcement {wanted:?}", seed - 1));
        }
        questions += trace.cost();
        cases += 1;
    }
    Ok(format!(
        "20 scripted sessions match their traces ({questions} questions asked)"
    ))
}
