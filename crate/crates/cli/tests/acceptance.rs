//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use markov_hull::axioms::{strictly_above, CandidateOSet, Verdict, DEFAULT_GEN_BOUND};
use markov_hull::explorer::{conjecture_scan, entropy_gap_pairs, scan_matrices, search_osets, ScanBounds};
use markov_hull::semilattice::{classify, enumerate_idempotents, Position};
use markov_hull::{catalog, Hull, Word};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn bin(args: &[&str]) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_markov-hull"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
    )
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:.2?}, limit {limit:?}"))
}

fn entropy_reproduction() -> Outcome {
    let mut values = Vec::new();
    for (file, expected, tol) in [("t1.json", 2.0, 1e-6), ("t2.json", 2.206, 1e-3)] {
        let start = Instant::now();
        let (code, out) = bin(&["entropy", &fixture(file)]);
        within(start, Duration::from_secs(1))?;
        ensure(code == 0, || format!("{file}: exit {code}"))?;
        let value: f64 = out.trim().parse().map_err(|e| format!("{file}: {e}"))?;
        ensure((value - expected).abs() <= tol, || format!("{file}: {value}"))?;
        values.push(out.trim().to_string());
    }
    Ok(format!("T1 {}, T2 {}", values[0], values[1]))
}

fn application_end_to_end() -> Outcome {
    let start = Instant::now();
    let (code, out) = bin(&["check", &fixture("t1.json"), &fixture("o2.json"), "--format", "json"]);
    within(start, Duration::from_secs(5))?;
    ensure(code == 0, || format!("exit {code}"))?;
    let cert: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(cert["verdict"] == "VALID", || format!("verdict {}", cert["verdict"]))?;
    let alphabet: Vec<&str> = cert["alphabet"]
        .as_array()
        .ok_or("no alphabet")?
        .iter()
        .filter_map(|a| a["element"].as_str())
        .collect();
    // θ_a, θ_cb, θ_c⁻¹
    ensure(alphabet == ["a|a,b,c|-", "cb|a,c|-", "-|b|c"], || format!("alphabet {alphabet:?}"))?;
    let induced = &cert["induced_matrix"]["matrix"];
    let t2 = serde_json::json!([[1, 1, 1], [1, 1, 0], [0, 1, 0]]);
    let expected = serde_json::to_value(catalog::t2().to_file().matrix).unwrap();
    ensure(expected == t2 && *induced == t2, || format!("induced {induced}"))?;
    let witnesses = cert["witnesses"].as_array().ok_or("no witnesses")?;
    let theta_b = witnesses
        .iter()
        .find(|w| w["generator"] == "b")
        .ok_or("no witness for b")?;
    ensure(theta_b["target"] == "b|a,c|-" && theta_b["expression"] == "x3 * x2", || {
        format!("witness {theta_b}")
    })?;
    Ok("VALID, alphabet {θ_a, θ_cb, θ_c^-1}, induced T2, θ_b = x3 * x2".into())
}

fn entropy_gap() -> Outcome {
    let t1 = catalog::t1();
    let hull = Hull::new(t1.clone());
    let certs = search_osets(&hull, 2, 10, DEFAULT_GEN_BOUND).map_err(|e| e.to_string())?;
    for c in &certs {
        let back = markov_hull::axioms::Certificate::from_json(&c.to_json()).map_err(|e| e.to_string())?;
        ensure(back.replay().map_err(|e| e.to_string())? == Verdict::Valid, || "replay failed".into())?;
    }
    let pairs = entropy_gap_pairs(&t1, &certs, 0.2).map_err(|e| e.to_string())?;
    let o2: Vec<String> = ["a|a,b,c|a", "cb|a,c|cb", "-|b|-"].map(String::from).to_vec();
    let pair = pairs
        .iter()
        .find(|p| {
            let lits: BTreeSet<String> = p
                .oset
                .iter()
                .map(|e| hull.format(&hull.idempotent(word(&hull, &e.s), set(&hull, &e.x)).unwrap()))
                .collect();
            lits == o2.iter().cloned().collect()
        })
        .ok_or_else(|| format!("no gap pair for O2 among {} pairs", pairs.len()))?;
    ensure(pair.gap > 0.2, || format!("gap {}", pair.gap))?;
    Ok(format!(
        "{} certificates replay VALID, gap {:.6} ({:.6} vs {:.6})",
        certs.len(),
        pair.gap,
        pair.entropy_original,
        pair.entropy_induced
    ))
}

fn word(hull: &Hull, s: &str) -> Word {
    let t = hull.matrix();
    Word::from_letters(
        s.chars()
            .map(|c| t.letter_index(&c.to_string()).unwrap())
            .collect(),
    )
}

fn set(hull: &Hull, names: &[String]) -> markov_hull::LetterSet {
    let mut x = markov_hull::LetterSet::EMPTY;
    for n in names {
        x.insert(hull.matrix().letter_index(n).unwrap());
    }
    x
}

fn conjugate_pair() -> Outcome {
    let start = Instant::now();
    let (code, out) = bin(&["compare", &fixture("conjugate_left.json"), &fixture("full_two_shift.json")]);
    within(start, Duration::from_secs(5))?;
    ensure(code == 0, || format!("exit {code}"))?;
    ensure(out.starts_with("SEPARATED at k=2: 3 vs 4"), || out.clone())?;
    Ok(out.trim().to_string())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (code, out) = bin(&[
        "verify",
        &fixture("t1.json"),
        "--depth",
        "10",
        "--seed",
        "42",
        "--pairs",
        "1000",
        "--max-word-len",
        "3",
        "--format",
        "json",
    ]);
    within(start, Duration::from_secs(30))?;
    ensure(code == 0, || format!("exit {code}"))?;
    let r: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(r["random_pairs"] == 1000 && r["random_agreements"] == 1000, || format!("random {r}"))?;
    ensure(r["generator_pairs"] == r["generator_agreements"], || format!("generator products {r}"))?;
    let cases: Vec<u64> = r["generator_case_counts"]
        .as_array()
        .ok_or("no case counts")?
        .iter()
        .filter_map(|c| c.as_u64())
        .collect();
    ensure(cases.len() == 4 && cases.iter().all(|&c| c > 0), || format!("cases {cases:?}"))?;
    ensure(r["disagreements"].as_array().is_some_and(|d| d.is_empty()), || "disagreements".into())?;
    Ok(format!(
        "random 1000/1000, generator products {}/{} with cases {cases:?}, {:.2?}",
        r["generator_agreements"], r["generator_pairs"], start.elapsed()
    ))
}

fn combinatorial() -> Outcome {
    let start = Instant::now();
    let hull = Hull::new(catalog::t1());
    let pool = hull.elements_up_to(2);
    let mut checked = 0;
    for g in &pool {
        if g.is_zero() {
            continue;
        }
        if g.source().unwrap() == g.range().unwrap() {
            ensure(g.is_idempotent(), || format!("{} has equal source and range", hull.format(g)))?;
            checked += 1;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} elements, {checked} with source = range, all idempotent", pool.len()))
}

fn d_class_uniqueness() -> Outcome {
    let hull = Hull::new(catalog::t1());
    let o = CandidateOSet::standard(&hull);
    let above = strictly_above(&hull, &o);
    let mut counts = Vec::new();
    for a in hull.matrix().letters() {
        let range = hull.generator(Word::letter(a)).unwrap().range().unwrap();
        let n = above
            .iter()
            .filter(|f| hull.d_related(&range, f).unwrap())
            .count();
        ensure(n == 1, || format!("letter {}: {n} related elements", hull.matrix().name(a)))?;
        counts.push(n);
    }
    Ok(format!("{} letters, one related element each among {}", counts.len(), above.len()))
}

fn semilattice_diagram() -> Outcome {
    let (code, dot) = bin(&["semilattice", &fixture("t1.json"), "--depth", "1"]);
    ensure(code == 0, || format!("exit {code}"))?;
    let mut labels = std::collections::BTreeMap::new();
    let mut edges = BTreeSet::new();
    for line in dot.lines().map(str::trim) {
        if let Some((lo, hi)) = line.strip_suffix(';').and_then(|l| l.split_once(" -> ")) {
            edges.insert((lo.to_string(), hi.to_string()));
        } else if let Some((id, rest)) = line.split_once(" [label=\"") {
            let label = rest.split('"').next().unwrap_or_default();
            labels.insert(id.to_string(), label.to_string());
        }
    }
    let nodes: BTreeSet<&str> = labels.values().map(String::as_str).collect();
    let expected_nodes: BTreeSet<&str> = [
        "-|a,b,c|-", "-|a,c|-", "-|b|-", "a|a,b,c|a", "a|a,c|a", "a|b|a", "b|a,c|b", "c|b|c",
    ]
    .into();
    ensure(nodes == expected_nodes, || format!("nodes {nodes:?}"))?;
    let named: BTreeSet<(&str, &str)> = edges
        .iter()
        .map(|(lo, hi)| (labels[lo].as_str(), labels[hi].as_str()))
        .collect();
    let expected_edges: BTreeSet<(&str, &str)> = [
        ("-|b|-", "-|a,b,c|-"),
        ("-|a,c|-", "-|a,b,c|-"),
        ("a|a,b,c|a", "-|a,c|-"),
        ("c|b|c", "-|a,c|-"),
        ("b|a,c|b", "-|b|-"),
        ("a|a,c|a", "a|a,b,c|a"),
        ("a|b|a", "a|a,b,c|a"),
    ]
    .into();
    ensure(named == expected_edges, || format!("edges {named:?}"))?;

    let t = catalog::t1();
    let hull = Hull::new(t.clone());
    let o = CandidateOSet::standard(&hull);
    let pool = enumerate_idempotents(&t, 3);
    for e in &pool {
        let s_empty = e.as_triple().unwrap().range_word().is_empty();
        let expected = match (o.contains(e), s_empty) {
            (true, _) => Position::InO,
            (false, true) => Position::AboveO,
            (false, false) => Position::BelowO,
        };
        let got = classify(e, o.elements()).map_err(|err| err.to_string())?;
        ensure(got == expected, || format!("{} classified {got:?}", hull.format(e)))?;
    }
    Ok(format!("8 nodes, 7 cover edges; partition holds on {} idempotents", pool.len()))
}

fn conjecture() -> Outcome {
    let start = Instant::now();
    let bounds = ScanBounds::new(2, DEFAULT_GEN_BOUND);
    let small = conjecture_scan(2, &bounds).map_err(|e| e.to_string())?;
    let t1 = scan_matrices(&[catalog::t1()], &bounds).map_err(|e| e.to_string())?;
    let three = conjecture_scan(3, &bounds).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(600))?;
    let mut parts = Vec::new();
    for (name, r) in [("max_n=2", &small), ("T1", &t1), ("max_n=3", &three)] {
        ensure(r.complete, || format!("{name}: incomplete"))?;
        ensure(r.counterexamples.is_empty(), || format!("{name}: {} counterexamples", r.counterexamples.len()))?;
        let inconclusive: usize = r.census.iter().map(|c| c.inconclusive).sum();
        ensure(inconclusive == r.near_misses.len(), || format!("{name}: inconclusive count mismatch"))?;
        parts.push(format!(
            "{name}: {} matrices, {} candidates, {} valid, 0 counterexamples, {inconclusive} inconclusive",
            r.matrices_scanned,
            r.candidates_checked,
            r.certificates.iter().filter(|c| c.verdict == Verdict::Valid).count()
        ));
    }
    Ok(parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 entropy reproduction", entropy_reproduction),
        ("2 T1/O2 application end to end", application_end_to_end),
        ("3 entropy gap with replayed certificates", entropy_gap),
        ("4 conjugate pair separated by semilattices", conjugate_pair),
        ("5 symbolic product matches truncated maps", oracle_equivalence),
        ("6 hull is combinatorial", combinatorial),
        ("7 D-class uniqueness", d_class_uniqueness),
        ("8 depth-one diagram and partition", semilattice_diagram),
        ("9 alphabet-size conjecture scan", conjecture),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {name} ({:.2?}): {detail}", start.elapsed()),
            Err(detail) => {
                println!("FAIL criterion {name} ({:.2?}): {detail}", start.elapsed());
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        println!("{} of 9 criteria failed", failed.len());
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
