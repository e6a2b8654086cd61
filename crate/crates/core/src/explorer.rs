//! Batch experiments over small transition matrices.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axioms::{build_certificate, CandidateOSet, Certificate, OSetEntry, Verdict};
use crate::entropy::{entropy, DEFAULT_TOLERANCE};
use crate::error::{HullError, Result};
use crate::hull::{Element, Hull};
use crate::matrix::{MatrixFile, TransitionMatrix};
use crate::semilattice::{enumerate_idempotents, fingerprint};

pub const GAP_TOLERANCE: f64 = 1e-6;
pub const MAX_ENUMERATED_SIZE: usize = 4;
pub const DEFAULT_FINGERPRINT_DEPTH: usize = 4;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Row-major bits, first entry most significant, so numeric order is
/// lexicographic order of the entries.
fn encode(entries: &[Vec<u8>]) -> u32 {
    entries
        .iter()
        .flatten()
        .fold(0, |acc, &v| (acc << 1) | u32::from(v))
}

fn decode(code: u32, n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ((code >> (n * n - 1 - (i * n + j))) & 1) as u8)
                .collect()
        })
        .collect()
}

fn canonical_code(entries: &[Vec<u8>], perms: &[Vec<usize>]) -> u32 {
    let n = entries.len();
    perms
        .iter()
        .map(|p| {
            let mut permuted = vec![vec![0u8; n]; n];
            for i in 0..n {
                for j in 0..n {
                    permuted[p[i]][p[j]] = entries[i][j];
                }
            }
            encode(&permuted)
        })
        .min()
        .expect("at least one permutation")
}

/// Every `n × n` 0/1 matrix without zero rows, in lexicographic order of
/// entries. With `up_to_permutation`, only the lexicographically least
/// member of each orbit under simultaneous row/column permutation is kept.
pub fn enumerate_matrices(n: usize, up_to_permutation: bool) -> Result<Vec<TransitionMatrix>> {
    if n == 0 || n > MAX_ENUMERATED_SIZE {
        return Err(HullError::Usage(format!(
            "matrix size must lie in 1..={MAX_ENUMERATED_SIZE}, got {n}"
        )));
    }
    let perms = permutations(n);
    let mut out = Vec::new();
    for code in 0..(1u32 << (n * n)) {
        let entries = decode(code, n);
        if entries.iter().any(|row| row.iter().all(|&v| v == 0)) {
            continue;
        }
        if up_to_permutation && canonical_code(&entries, &perms) != code {
            continue;
        }
        out.push(TransitionMatrix::from_rows(entries)?);
    }
    Ok(out)
}

/// Maximal sets of pairwise orthogonal idempotents with words of length at
/// most `max_word_len`, the standard set first.
///
/// Only maximal sets can satisfy the comparability axiom: an idempotent
/// orthogonal to every member is comparable to none of them.
pub fn candidate_osets(hull: &Hull, max_word_len: usize) -> Vec<CandidateOSet> {
    let nodes = enumerate_idempotents(hull.matrix(), max_word_len);
    let n = nodes.len();
    let adjacent: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && hull.multiply(&nodes[i], &nodes[j]).is_zero())
                .collect()
        })
        .collect();
    let mut cliques = Vec::new();
    bron_kerbosch(&adjacent, Vec::new(), (0..n).collect(), Vec::new(), &mut cliques);
    cliques.sort();

    let standard = CandidateOSet::standard(hull);
    let mut out = Vec::new();
    if standard.max_word_len() <= max_word_len {
        out.push(standard.clone());
    }
    for clique in cliques {
        let elements: Vec<Element> = clique.iter().map(|&i| nodes[i].clone()).collect();
        let candidate = CandidateOSet::new(hull, elements).expect("enumerated idempotents");
        if candidate != standard {
            out.push(candidate);
        }
    }
    out
}

fn bron_kerbosch(
    adjacent: &[Vec<bool>],
    r: Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        let mut clique = r;
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adjacent[u][v]).count())
        .expect("p or x is nonempty");
    let mut p = p;
    let mut x = x;
    let branch: Vec<usize> = p.iter().copied().filter(|&v| !adjacent[pivot][v]).collect();
    for v in branch {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adjacent[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adjacent[v][u]).collect();
        bron_kerbosch(adjacent, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Certificates for every candidate, in candidate order.
pub fn certify_all(
    hull: &Hull,
    candidates: &[CandidateOSet],
    gen_bound: usize,
) -> Result<Vec<Certificate>> {
    candidates
        .par_iter()
        .map(|o| build_certificate(hull, o, gen_bound))
        .collect()
}

/// Up to `limit` valid certificates, the standard one first when it is valid.
pub fn search_osets(
    hull: &Hull,
    max_word_len: usize,
    limit: usize,
    gen_bound: usize,
) -> Result<Vec<Certificate>> {
    let candidates = candidate_osets(hull, max_word_len);
    let mut out = Vec::new();
    // certify in chunks so small limits stop early
    for chunk in candidates.chunks(rayon::current_num_threads().max(1) * 4) {
        for cert in certify_all(hull, chunk, gen_bound)? {
            if out.len() < limit && cert.verdict == Verdict::Valid {
                out.push(cert);
            }
        }
        if out.len() >= limit {
            break;
        }
    }
    Ok(out)
}

/// A shift and an induced shift whose hulls are isomorphic but whose
/// entropies differ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPair {
    pub original: MatrixFile,
    pub induced: MatrixFile,
    pub oset: Vec<OSetEntry>,
    pub entropy_original: f64,
    pub entropy_induced: f64,
    pub gap: f64,
}

/// Valid certificates whose induced matrix has a different entropy. Each
/// certificate is replayed first; a replay failure is an error.
pub fn entropy_gap_pairs(
    t: &TransitionMatrix,
    certificates: &[Certificate],
    tolerance: f64,
) -> Result<Vec<GapPair>> {
    let base = entropy(t, DEFAULT_TOLERANCE)?;
    let mut out = Vec::new();
    for cert in certificates {
        if cert.verdict != Verdict::Valid {
            continue;
        }
        if cert.replay()? != Verdict::Valid {
            return Err(HullError::Internal("certificate does not replay as valid".into()));
        }
        let induced_file = cert.induced_matrix.clone().expect("valid certificates carry a matrix");
        let induced = TransitionMatrix::from_file(&induced_file)?;
        let h = entropy(&induced, DEFAULT_TOLERANCE)?;
        let gap = (base - h).abs();
        if gap > tolerance {
            out.push(GapPair {
                original: t.to_file(),
                induced: induced_file,
                oset: cert.oset.clone(),
                entropy_original: base,
                entropy_induced: h,
                gap,
            });
        }
    }
    Ok(out)
}

/// Outcome of comparing two fingerprints. Indistinguishable fingerprints
/// say nothing about isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Separation {
    Separated { k: usize, counts: (usize, usize) },
    Indistinguishable { max_k: usize },
}

pub fn separate_hulls(t: &TransitionMatrix, u: &TransitionMatrix, max_k: usize) -> Separation {
    let (a, b) = rayon::join(|| fingerprint(t, max_k), || fingerprint(u, max_k));
    for k in 1..=max_k {
        if a[&k] != b[&k] {
            return Separation::Separated {
                k,
                counts: (a[&k], b[&k]),
            };
        }
    }
    Separation::Indistinguishable { max_k }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanBounds {
    pub max_n: Option<usize>,
    pub max_word_len: usize,
    pub gen_bound: usize,
    pub fingerprint_depth: usize,
    pub gap_tolerance: f64,
    pub max_candidates: Option<usize>,
}

impl ScanBounds {
    pub fn new(max_word_len: usize, gen_bound: usize) -> Self {
        ScanBounds {
            max_n: None,
            max_word_len,
            gen_bound,
            fingerprint_depth: 3,
            gap_tolerance: GAP_TOLERANCE,
            max_candidates: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixCensus {
    pub matrix: MatrixFile,
    pub entropy: f64,
    pub candidates: usize,
    pub valid: usize,
    pub inconclusive: usize,
    /// Alphabet sizes of the valid certificates, in candidate order.
    pub alphabet_sizes: Vec<usize>,
}

/// A candidate passing every axiom whose generation search ran out of bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearMiss {
    pub matrix: MatrixFile,
    pub oset: Vec<OSetEntry>,
    pub alphabet_size: usize,
    pub closure_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRecord {
    pub original: MatrixFile,
    pub induced: MatrixFile,
    pub outcome: Separation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub bounds: ScanBounds,
    /// False when `max_candidates` stopped the scan early.
    pub complete: bool,
    pub matrices_scanned: usize,
    pub candidates_checked: usize,
    pub census: Vec<MatrixCensus>,
    pub certificates: Vec<Certificate>,
    pub gap_pairs: Vec<GapPair>,
    /// Valid certificates whose alphabet size differs from the matrix size.
    pub counterexamples: Vec<Certificate>,
    pub near_misses: Vec<NearMiss>,
    /// Fingerprint comparison of each gap pair; the hulls are isomorphic,
    /// so anything but indistinguishable points at a bug.
    pub separations: Vec<SeparationRecord>,
}

/// Every matrix up to size `max_n` (one per permutation class).
pub fn conjecture_scan(max_n: usize, bounds: &ScanBounds) -> Result<ScanResult> {
    let mut matrices = Vec::new();
    for n in 1..=max_n {
        matrices.extend(enumerate_matrices(n, true)?);
    }
    let mut bounds = bounds.clone();
    bounds.max_n = Some(max_n);
    scan_matrices(&matrices, &bounds)
}

/// Searches each matrix for valid certificates and compares alphabet sizes.
pub fn scan_matrices(matrices: &[TransitionMatrix], bounds: &ScanBounds) -> Result<ScanResult> {
    let mut result = ScanResult {
        bounds: bounds.clone(),
        complete: true,
        matrices_scanned: 0,
        candidates_checked: 0,
        census: Vec::new(),
        certificates: Vec::new(),
        gap_pairs: Vec::new(),
        counterexamples: Vec::new(),
        near_misses: Vec::new(),
        separations: Vec::new(),
    };
    for t in matrices {
        let hull = Hull::new(t.clone());
        let mut candidates = candidate_osets(&hull, bounds.max_word_len);
        if let Some(cap) = bounds.max_candidates {
            let room = cap.saturating_sub(result.candidates_checked);
            if candidates.len() > room {
                candidates.truncate(room);
                result.complete = false;
            }
        }
        let certs = certify_all(&hull, &candidates, bounds.gen_bound)?;
        result.candidates_checked += certs.len();
        result.matrices_scanned += 1;

        let valid: Vec<Certificate> = certs
            .iter()
            .filter(|c| c.verdict == Verdict::Valid)
            .cloned()
            .collect();
        for c in certs.iter().filter(|c| c.verdict == Verdict::Inconclusive) {
            result.near_misses.push(NearMiss {
                matrix: t.to_file(),
                oset: c.oset.clone(),
                alphabet_size: c.alphabet.len(),
                closure_size: c.closure_size,
            });
        }
        for c in &valid {
            if c.alphabet.len() != t.size() {
                result.counterexamples.push(c.clone());
            }
        }
        let gaps = entropy_gap_pairs(t, &valid, bounds.gap_tolerance)?;
        for g in &gaps {
            let induced = TransitionMatrix::from_file(&g.induced)?;
            result.separations.push(SeparationRecord {
                original: t.to_file(),
                induced: g.induced.clone(),
                outcome: separate_hulls(t, &induced, bounds.fingerprint_depth),
            });
        }
        result.census.push(MatrixCensus {
            matrix: t.to_file(),
            entropy: entropy(t, DEFAULT_TOLERANCE)?,
            candidates: certs.len(),
            valid: valid.len(),
            inconclusive: certs.iter().filter(|c| c.verdict == Verdict::Inconclusive).count(),
            alphabet_sizes: valid.iter().map(|c| c.alphabet.len()).collect(),
        });
        result.gap_pairs.extend(gaps);
        result.certificates.extend(valid);
        if !result.complete {
            break;
        }
    }
    Ok(result)
}

impl ScanResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan result serializes")
    }

    /// One line per matrix, then totals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<28} {:>8} {:>10} {:>6} {:>6}  sizes", "matrix", "entropy", "candidates", "valid", "incl.");
        for c in &self.census {
            let rows: Vec<String> = c
                .matrix
                .matrix
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect();
            let _ = writeln!(
                out,
                "{:<28} {:>8.6} {:>10} {:>6} {:>6}  {:?}",
                rows.join("/"),
                c.entropy,
                c.candidates,
                c.valid,
                c.inconclusive,
                c.alphabet_sizes
            );
        }
        let _ = writeln!(
            out,
            "matrices {}, candidates {}, valid {}, entropy gaps {}, counterexamples {}, inconclusive {}{}",
            self.matrices_scanned,
            self.candidates_checked,
            self.certificates.len(),
            self.gap_pairs.len(),
            self.counterexamples.len(),
            self.near_misses.len(),
            if self.complete { "" } else { " (stopped at candidate limit)" }
        );
        let _ = writeln!(
            out,
            "bounds: word length {}, generation bound {}",
            self.bounds.max_word_len, self.bounds.gen_bound
        );
        out
    }
}
