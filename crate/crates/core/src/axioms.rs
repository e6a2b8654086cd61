//! Orthogonal generating sets of idempotents and the certificates built
//! from them.
//!
//! A candidate `O` is a finite set of nonzero idempotents. Its up-closure
//! `O↑` is finite, because everything above `(s, X, s)` has a prefix of `s`
//! as its word. The five conditions checked here, when they hold and the
//! extracted alphabet generates the hull, present the same hull as the
//! inverse hull of the shift with the induced transition matrix.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};
use crate::hull::{idempotent_leq, Element, Hull};
use crate::matrix::{MatrixFile, TransitionMatrix};
use crate::semilattice::{enumerate_idempotents, strict_upset};
use crate::word::Word;

pub const DEFAULT_GEN_BOUND: usize = 4;

/// Reports keep at most this many violations; the count is always exact.
const MAX_LISTED_VIOLATIONS: usize = 50;

/// One idempotent `(s, X, s)` in an O-set file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OSetEntry {
    pub s: String,
    #[serde(rename = "X")]
    pub x: Vec<String>,
}

/// A finite set of distinct nonzero idempotents of one hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOSet {
    elements: Vec<Element>,
}

impl CandidateOSet {
    pub fn new(hull: &Hull, elements: Vec<Element>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &elements {
            hull.check(e)?;
            if e.is_zero() {
                return Err(HullError::Input("O-sets contain nonzero idempotents only".into()));
            }
            if !e.is_idempotent() {
                return Err(HullError::Input(format!("{} is not idempotent", hull.format(e))));
            }
            if !seen.insert(e.clone()) {
                return Err(HullError::Input(format!("{} is listed twice", hull.format(e))));
            }
        }
        Ok(CandidateOSet { elements })
    }

    /// `{θ_aθ_a⁻¹ : a ∈ A}`, in alphabet order.
    pub fn standard(hull: &Hull) -> Self {
        let elements = hull
            .letter_generators()
            .iter()
            .map(|g| g.range().expect("generators are nonzero"))
            .collect();
        CandidateOSet { elements }
    }

    pub fn from_entries(hull: &Hull, entries: &[OSetEntry]) -> Result<Self> {
        let t = hull.matrix();
        let elements = entries
            .iter()
            .map(|entry| {
                let s = t.parse_word(&entry.s)?;
                let x = t.parse_letter_set(&entry.x)?;
                hull.idempotent(s, x)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(hull, elements)
    }

    pub fn from_json(hull: &Hull, text: &str) -> Result<Self> {
        let entries: Vec<OSetEntry> = serde_json::from_str(text)
            .map_err(|e| HullError::Input(format!("malformed O-set JSON: {e}")))?;
        Self::from_entries(hull, &entries)
    }

    pub fn to_entries(&self, hull: &Hull) -> Vec<OSetEntry> {
        let t = hull.matrix();
        self.elements
            .iter()
            .map(|e| {
                let tr = e.as_triple().expect("nonzero");
                OSetEntry {
                    s: t.format_word(tr.range_word()),
                    x: tr.middle().iter().map(|a| t.name(a).to_string()).collect(),
                }
            })
            .collect()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.contains(e)
    }

    /// Longest word among the members.
    pub fn max_word_len(&self) -> usize {
        self.elements.iter().map(Element::word_length).max().unwrap_or(0)
    }
}

fn word_and_middle(e: &Element) -> (&Word, crate::letters::LetterSet) {
    let tr = e.as_triple().expect("nonzero idempotent");
    (tr.range_word(), tr.middle())
}

fn leq(e: &Element, f: &Element) -> bool {
    let (s, x) = word_and_middle(e);
    let (t, y) = word_and_middle(f);
    idempotent_leq(s, x, t, y)
}

/// `O↑`: the members of `O` and everything above them, sorted.
pub fn up_closure(hull: &Hull, o: &CandidateOSet) -> Vec<Element> {
    let mut up: BTreeSet<Element> = o.elements.iter().cloned().collect();
    for e in &o.elements {
        up.extend(strict_upset(hull.matrix(), e).expect("members are nonzero idempotents"));
    }
    up.into_iter().collect()
}

/// `O↑ − O`, sorted.
pub fn strictly_above(hull: &Hull, o: &CandidateOSet) -> Vec<Element> {
    up_closure(hull, o)
        .into_iter()
        .filter(|e| !o.contains(e))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub passed: bool,
    pub violation_count: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    fn from_violations(axiom: &str, violations: Vec<String>) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            passed: violations.is_empty(),
            violation_count: violations.len(),
            violations: violations.into_iter().take(MAX_LISTED_VIOLATIONS).collect(),
        }
    }
}

/// Distinct members multiply to zero.
pub fn check_o1(hull: &Hull, o: &CandidateOSet) -> AxiomReport {
    let mut violations = Vec::new();
    for (i, e) in o.elements.iter().enumerate() {
        for f in &o.elements[i + 1..] {
            if !hull.multiply(e, f).is_zero() {
                violations.push(format!("{} * {} != 0", hull.format(e), hull.format(f)));
            }
        }
    }
    AxiomReport::from_violations("O1", violations)
}

/// Every idempotent of the hull is comparable to a member.
///
/// Only idempotents with `|s| <= M + 1` are examined, `M` being the longest
/// member word. That suffices: take `e = (s, X, s)` with `|s| > M + 1` and
/// `p` its prefix of length `M + 1`.
///
/// - `o ≤ e` for a member `o = (t, Y, t)` needs `s` to be a prefix of `t`,
///   impossible as `|t| <= M < |s|`. The same holds for `(p, Z, p)`.
/// - `e ≤ o` needs `t` to be a proper prefix of `s` with `s[|t|] ∈ Y`. As
///   `|t| <= M`, both conditions only read the first `M + 1` letters, so
///   `e ≤ o` iff `(p, Z, p) ≤ o` for any admissible `Z`.
///
/// So `e` is comparable to a member iff `(p, Z, p)` is, and `(p, Z, p)` is
/// among the examined idempotents.
pub fn check_o2(hull: &Hull, o: &CandidateOSet) -> AxiomReport {
    let bound = o.max_word_len() + 1;
    let violations = enumerate_idempotents(hull.matrix(), bound)
        .into_iter()
        .filter(|e| !o.elements.iter().any(|f| leq(e, f) || leq(f, e)))
        .map(|e| format!("{} is comparable to no member", hull.format(&e)))
        .collect();
    AxiomReport::from_violations("O2", violations)
}

/// `O↑ ∪ {0}` and `(O↑ − O) ∪ {0}` are closed under multiplication.
pub fn check_o3(hull: &Hull, o: &CandidateOSet) -> AxiomReport {
    let up = up_closure(hull, o);
    let in_up: BTreeSet<&Element> = up.iter().collect();
    let mut violations = Vec::new();
    for (i, e) in up.iter().enumerate() {
        for f in &up[i + 1..] {
            let p = hull.multiply(e, f);
            if p.is_zero() {
                continue;
            }
            if !in_up.contains(&p) {
                violations.push(format!(
                    "{} * {} = {} leaves the up-closure",
                    hull.format(e),
                    hull.format(f),
                    hull.format(&p)
                ));
            } else if !o.contains(e) && !o.contains(f) && o.contains(&p) {
                violations.push(format!(
                    "{} * {} = {} lands in O",
                    hull.format(e),
                    hull.format(f),
                    hull.format(&p)
                ));
            }
        }
    }
    AxiomReport::from_violations("O3", violations)
}

/// Members below each element of `O↑ − O`, as indices into `O`.
fn members_below(o: &CandidateOSet, e: &Element) -> Vec<usize> {
    (0..o.elements.len())
        .filter(|&i| leq(&o.elements[i], e))
        .collect()
}

/// Elements of `O↑ − O` are told apart by the members below them.
pub fn check_o4(hull: &Hull, o: &CandidateOSet) -> AxiomReport {
    let mut first: HashMap<Vec<usize>, Element> = HashMap::new();
    let mut violations = Vec::new();
    for e in strictly_above(hull, o) {
        let below = members_below(o, &e);
        if let Some(prev) = first.get(&below) {
            violations.push(format!(
                "{} and {} lie above the same members",
                hull.format(prev),
                hull.format(&e)
            ));
        } else {
            first.insert(below, e);
        }
    }
    AxiomReport::from_violations("O4", violations)
}

/// The 𝒟-class of each member meets `O↑ − O` at most once. Idempotents are
/// 𝒟-related exactly when their middle sets agree.
pub fn check_o5(hull: &Hull, o: &CandidateOSet) -> AxiomReport {
    let above = strictly_above(hull, o);
    let mut classes: Vec<crate::letters::LetterSet> = o
        .elements
        .iter()
        .map(|e| word_and_middle(e).1)
        .collect();
    classes.sort();
    classes.dedup();
    let mut violations = Vec::new();
    for x in classes {
        let hits: Vec<String> = above
            .iter()
            .filter(|e| word_and_middle(e).1 == x)
            .map(|e| hull.format(e))
            .collect();
        if hits.len() > 1 {
            violations.push(format!(
                "the class with middle {{{}}} contains {}",
                hull.matrix().format_letter_set(x),
                hits.join(" and ")
            ));
        }
    }
    AxiomReport::from_violations("O5", violations)
}

/// All five reports in order.
pub fn check_all(hull: &Hull, o: &CandidateOSet) -> Vec<AxiomReport> {
    let checks: [fn(&Hull, &CandidateOSet) -> AxiomReport; 5] =
        [check_o1, check_o2, check_o3, check_o4, check_o5];
    checks.par_iter().map(|check| check(hull, o)).collect()
}

/// Elements `(u, X, v)` with `(u, X, u) ∈ O` and `(v, X, v) ∈ O↑ − O`, in
/// member order. Refuses when an axiom fails.
pub fn extract_alphabet(hull: &Hull, o: &CandidateOSet) -> Result<Vec<Element>> {
    if let Some(failed) = check_all(hull, o).into_iter().find(|r| !r.passed) {
        return Err(HullError::AxiomFailure(failed.axiom));
    }
    Ok(alphabet_of(hull, o))
}

fn alphabet_of(hull: &Hull, o: &CandidateOSet) -> Vec<Element> {
    let above = strictly_above(hull, o);
    let mut out = Vec::new();
    for e in &o.elements {
        let (u, x) = word_and_middle(e);
        for f in &above {
            let (v, y) = word_and_middle(f);
            if x == y {
                out.push(
                    hull.element(u.clone(), x, v.clone())
                        .expect("both words admit the shared middle set"),
                );
            }
        }
    }
    out
}

/// Letter names of an induced matrix: `x1`, `x2`, ...
pub fn induced_letter_name(i: usize) -> String {
    format!("x{}", i + 1)
}

/// `T'(α, β) = 1` iff `αβ ≠ 0`.
pub fn induced_matrix(hull: &Hull, alphabet: &[Element]) -> Result<TransitionMatrix> {
    let entries = alphabet
        .iter()
        .map(|a| {
            alphabet
                .iter()
                .map(|b| u8::from(!hull.multiply(a, b).is_zero()))
                .collect()
        })
        .collect();
    let names = (0..alphabet.len()).map(induced_letter_name).collect();
    TransitionMatrix::new(names, entries)
}

/// A letter of the extracted alphabet or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub letter: usize,
    pub inverse: bool,
}

/// A product over the extracted alphabet equal to `θ_a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Name of the letter `a` of the original matrix.
    pub generator: String,
    /// `θ_a` as an element literal.
    pub target: String,
    pub factors: Vec<Factor>,
    pub expression: String,
}

pub fn format_factors(factors: &[Factor]) -> String {
    factors
        .iter()
        .map(|f| {
            let name = induced_letter_name(f.letter);
            if f.inverse {
                format!("{name}^-1")
            } else {
                name
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

/// Multiplies out a factor list, left to right.
pub fn evaluate(hull: &Hull, alphabet: &[Element], factors: &[Factor]) -> Result<Element> {
    let values = factors
        .iter()
        .map(|f| {
            let a = alphabet.get(f.letter).ok_or_else(|| {
                HullError::Input(format!("factor refers to missing letter {}", f.letter))
            })?;
            Ok(if f.inverse { a.inverse() } else { a.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(HullError::Input("empty product".into()));
    }
    hull.product(values.iter())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationOutcome {
    /// One witness per letter of the matrix, or `None` if some letter was
    /// not reached within the bound.
    pub witnesses: Option<Vec<Witness>>,
    /// Distinct nonzero elements reached.
    pub closure_size: usize,
}

/// Breadth-first closure of the alphabet and its inverses under
/// multiplication, keeping products whose words have length at most
/// `bound`. Stops once every `θ_a` has been reached.
pub fn generation_search(hull: &Hull, alphabet: &[Element], bound: usize) -> GenerationOutcome {
    let t = hull.matrix();
    let fits = |e: &Element| {
        e.as_triple()
            .map(|tr| tr.range_word().len() <= bound && tr.domain_word().len() <= bound)
            .unwrap_or(false)
    };
    let mut gens: Vec<(Element, Factor)> = Vec::new();
    for (i, a) in alphabet.iter().enumerate() {
        for inverse in [false, true] {
            let value = if inverse { a.inverse() } else { a.clone() };
            if !gens.iter().any(|(g, _)| *g == value) {
                gens.push((value, Factor { letter: i, inverse }));
            }
        }
    }
    let targets: Vec<Element> = hull.letter_generators();

    let mut found: Vec<Element> = Vec::new();
    let mut parent: Vec<(Option<usize>, Factor)> = Vec::new();
    let mut index: HashMap<Element, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for (g, f) in &gens {
        if fits(g) && !index.contains_key(g) {
            index.insert(g.clone(), found.len());
            found.push(g.clone());
            parent.push((None, *f));
            queue.push_back(found.len() - 1);
        }
    }
    let all_found = |index: &HashMap<Element, usize>| targets.iter().all(|x| index.contains_key(x));
    while !all_found(&index) {
        let Some(i) = queue.pop_front() else { break };
        for (g, f) in &gens {
            let p = hull.multiply(&found[i], g);
            if fits(&p) && !index.contains_key(&p) {
                index.insert(p.clone(), found.len());
                found.push(p);
                parent.push((Some(i), *f));
                queue.push_back(found.len() - 1);
            }
        }
    }

    let witnesses = if all_found(&index) {
        Some(
            targets
                .iter()
                .enumerate()
                .map(|(a, target)| {
                    let mut factors = Vec::new();
                    let mut at = Some(index[target]);
                    while let Some(i) = at {
                        factors.push(parent[i].1);
                        at = parent[i].0;
                    }
                    factors.reverse();
                    Witness {
                        generator: t.name(a as u8).to_string(),
                        target: hull.format(target),
                        expression: format_factors(&factors),
                        factors,
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    GenerationOutcome {
        witnesses,
        closure_size: found.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Valid,
    Invalid,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetLetter {
    pub name: String,
    pub element: String,
}

/// Full transcript of checking one candidate against one matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub matrix: MatrixFile,
    pub oset: Vec<OSetEntry>,
    pub gen_bound: usize,
    pub checks: Vec<AxiomReport>,
    pub verdict: Verdict,
    pub failed_at: Option<String>,
    pub alphabet: Vec<AlphabetLetter>,
    pub induced_matrix: Option<MatrixFile>,
    pub witnesses: Vec<Witness>,
    pub closure_size: usize,
}

/// Runs every check, extracts the alphabet and searches for generation
/// witnesses. Each witness is multiplied out again before the certificate
/// is returned; a mismatch is an internal error.
pub fn build_certificate(hull: &Hull, o: &CandidateOSet, gen_bound: usize) -> Result<Certificate> {
    let checks = check_all(hull, o);
    let mut cert = Certificate {
        matrix: hull.matrix().to_file(),
        oset: o.to_entries(hull),
        gen_bound,
        failed_at: checks.iter().find(|r| !r.passed).map(|r| r.axiom.clone()),
        checks,
        verdict: Verdict::Invalid,
        alphabet: Vec::new(),
        induced_matrix: None,
        witnesses: Vec::new(),
        closure_size: 0,
    };
    if cert.failed_at.is_some() {
        return Ok(cert);
    }
    let alphabet = alphabet_of(hull, o);
    cert.alphabet = alphabet
        .iter()
        .enumerate()
        .map(|(i, a)| AlphabetLetter {
            name: induced_letter_name(i),
            element: hull.format(a),
        })
        .collect();
    // an empty alphabet or a zero row leaves no transition matrix; such an
    // alphabet cannot generate the hull
    cert.induced_matrix = induced_matrix(hull, &alphabet).ok().map(|m| m.to_file());
    let outcome = generation_search(hull, &alphabet, gen_bound);
    cert.closure_size = outcome.closure_size;
    match outcome.witnesses {
        Some(_) if cert.induced_matrix.is_none() => {
            return Err(HullError::Internal(
                "alphabet generates the hull but induces no transition matrix".into(),
            ));
        }
        Some(witnesses) => {
            replay_witnesses(hull, &alphabet, &witnesses)?;
            cert.witnesses = witnesses;
            cert.verdict = Verdict::Valid;
        }
        None => cert.verdict = Verdict::Inconclusive,
    }
    Ok(cert)
}

fn replay_witnesses(hull: &Hull, alphabet: &[Element], witnesses: &[Witness]) -> Result<()> {
    for w in witnesses {
        let target = hull.parse(&w.target)?;
        let value = evaluate(hull, alphabet, &w.factors)?;
        if value != target {
            return Err(HullError::Internal(format!(
                "witness {} for {} evaluates to {}",
                w.expression,
                w.target,
                hull.format(&value)
            )));
        }
    }
    Ok(())
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| HullError::Input(format!("malformed certificate JSON: {e}")))
    }

    /// Rebuilds the certificate from its matrix, O-set and bound, checks the
    /// stored transcript matches and multiplies out every stored witness.
    pub fn replay(&self) -> Result<Verdict> {
        let t = TransitionMatrix::from_file(&self.matrix)?;
        let hull = Hull::new(t);
        let o = CandidateOSet::from_entries(&hull, &self.oset)?;
        let alphabet = self
            .alphabet
            .iter()
            .map(|a| hull.parse(&a.element))
            .collect::<Result<Vec<_>>>()?;
        replay_witnesses(&hull, &alphabet, &self.witnesses)?;
        let fresh = build_certificate(&hull, &o, self.gen_bound)?;
        if &fresh != self {
            return Err(HullError::Internal(
                "stored certificate differs from a fresh run".into(),
            ));
        }
        Ok(self.verdict)
    }
}
