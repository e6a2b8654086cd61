//! The semilattice of idempotents `(s, X, s)`.
//!
//! Everything above a nonzero idempotent is explicit: `(t, Y, t) ≥ (s, X, s)`
//! needs `t` to be a prefix of `s`, so a strict up-set is a finite list of
//! prefixes paired with constructible sets. Covers are the minimal elements
//! of that list, which makes them exact in the whole semilattice and not
//! just among the enumerated nodes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HullError, Result};
use crate::hull::{idempotent_leq, idempotent_unchecked, Element, Hull};
use crate::letters::LetterSet;
use crate::matrix::TransitionMatrix;
use crate::word::Word;

/// Every idempotent `(s, X, s)` with `|s| <= n`, ordered by `|s|`, then `s`,
/// then the bitmask of `X`.
pub fn enumerate_idempotents(t: &TransitionMatrix, n: usize) -> Vec<Element> {
    let mut out = Vec::new();
    for s in t.words_up_to(n) {
        let allowed = t.follows_word(&s);
        for &x in t.constructible_family() {
            if x.is_subset(allowed) {
                out.push(idempotent_unchecked(s.clone(), x));
            }
        }
    }
    out.sort();
    out
}

fn parts(e: &Element) -> Result<(&Word, LetterSet)> {
    match e.as_triple() {
        Some(tr) if e.is_idempotent() => Ok((tr.range_word(), tr.middle())),
        Some(_) => Err(HullError::Usage(format!("{e:?} is not idempotent"))),
        None => Err(HullError::Usage(
            "the zero idempotent lies below everything; its up-set is infinite".into(),
        )),
    }
}

/// All idempotents strictly above `e`.
pub fn strict_upset(t: &TransitionMatrix, e: &Element) -> Result<Vec<Element>> {
    let (s, x) = parts(e)?;
    let mut out = Vec::new();
    for i in 0..s.len() {
        let prefix = s.prefix(i);
        let next = s.letters()[i];
        let allowed = t.follows_word(&prefix);
        for &y in t.constructible_family() {
            if y.contains(next) && y.is_subset(allowed) {
                out.push(idempotent_unchecked(prefix.clone(), y));
            }
        }
    }
    let allowed = t.follows_word(s);
    for &y in t.constructible_family() {
        if x.is_proper_subset(y) && y.is_subset(allowed) {
            out.push(idempotent_unchecked(s.clone(), y));
        }
    }
    out.sort();
    Ok(out)
}

/// The idempotents covering `e`: minimal elements of its strict up-set.
pub fn upper_covers(t: &TransitionMatrix, e: &Element) -> Result<Vec<Element>> {
    let up = strict_upset(t, e)?;
    Ok(up
        .iter()
        .filter(|f| !up.iter().any(|g| g != *f && leq_nonzero(g, f)))
        .cloned()
        .collect())
}

fn leq_nonzero(e: &Element, f: &Element) -> bool {
    match (e.as_triple(), f.as_triple()) {
        (Some(a), Some(b)) => idempotent_leq(a.range_word(), a.middle(), b.range_word(), b.middle()),
        _ => false,
    }
}

/// Idempotents up to a word-length bound together with their cover relation.
#[derive(Clone, Debug)]
pub struct IdempotentIndex {
    depth: usize,
    nodes: Vec<Element>,
    /// `covers[i]` lists the indices of the nodes covering node `i`.
    covers: Vec<Vec<usize>>,
}

impl IdempotentIndex {
    pub fn build(t: &TransitionMatrix, depth: usize) -> Self {
        let nodes = enumerate_idempotents(t, depth);
        let position: HashMap<&Element, usize> =
            nodes.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let covers = nodes
            .par_iter()
            .map(|e| {
                // upper covers have words no longer than e's, so they are indexed
                upper_covers(t, e)
                    .expect("enumerated nodes are nonzero idempotents")
                    .iter()
                    .map(|f| position[f])
                    .collect()
            })
            .collect();
        IdempotentIndex {
            depth,
            nodes,
            covers,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[Element] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, e: &Element) -> Option<usize> {
        self.nodes.binary_search(e).ok()
    }

    pub fn upper_covers_of(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    /// Indices of the indexed nodes that `i` covers.
    pub fn lower_covers_of(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&j| self.covers[j].contains(&i))
            .collect()
    }

    /// Cover pairs `(lower, upper)` in node order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, ups) in self.covers.iter().enumerate() {
            for &j in ups {
                out.push((i, j));
            }
        }
        out
    }
}

/// Where an idempotent sits relative to a set of idempotents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Position {
    InO,
    AboveO,
    BelowO,
    Incomparable,
}

/// Membership wins over being above, which wins over being below.
pub fn classify(e: &Element, o: &[Element]) -> Result<Position> {
    parts(e)?;
    for f in o {
        parts(f)?;
    }
    Ok(if o.contains(e) {
        Position::InO
    } else if o.iter().any(|f| leq_nonzero(f, e)) {
        Position::AboveO
    } else if o.iter().any(|f| leq_nonzero(e, f)) {
        Position::BelowO
    } else {
        Position::Incomparable
    })
}

/// For `k = 1..=max_k`, the number of idempotents with exactly `k` strict
/// upper bounds.
///
/// Every proper nonempty prefix `t` of `s` contributes at least `(t, row)`
/// above `(s, X, s)`, so the up-set has at least `|s| - 1` elements and
/// words up to length `max_k + 1` account for every count.
pub fn fingerprint(t: &TransitionMatrix, max_k: usize) -> BTreeMap<usize, usize> {
    let sizes: Vec<usize> = enumerate_idempotents(t, max_k + 1)
        .par_iter()
        .map(|e| strict_upset(t, e).expect("enumerated nodes are nonzero idempotents").len())
        .collect();
    (1..=max_k)
        .map(|k| (k, sizes.iter().filter(|&&n| n == k).count()))
        .collect()
}

/// `{"1": n1, "2": n2, …}` with keys in numeric order.
pub fn fingerprint_json(fp: &BTreeMap<usize, usize>) -> String {
    let body: Vec<String> = fp.iter().map(|(k, n)| format!("\"{k}\": {n}")).collect();
    format!("{{{}}}", body.join(", "))
}

/// DOT text for the cover relation, drawn bottom-up. Members of `o` are
/// filled.
pub fn export_dot(hull: &Hull, index: &IdempotentIndex, o: &[Element]) -> String {
    let mut out = String::from("digraph semilattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, e) in index.nodes().iter().enumerate() {
        let style = if o.contains(e) {
            ", style=filled, fillcolor=orange"
        } else {
            ""
        };
        let _ = writeln!(out, "  n{i} [label=\"{}\"{style}];", hull.format(e));
    }
    for (lo, hi) in index.edges() {
        let _ = writeln!(out, "  n{lo} -> n{hi};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn lits(h: &Hull, items: &[&str]) -> Vec<Element> {
        let mut v: Vec<Element> = items.iter().map(|s| h.parse(s).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_idempotents(&catalog::t1(), 1).len(), 8);
        assert_eq!(enumerate_idempotents(&catalog::full_two_shift(), 1).len(), 3);
        let t = catalog::t1();
        let base = enumerate_idempotents(&t, 0);
        assert_eq!(base.len(), t.constructible_family().len());
        assert!(base.iter().all(|e| e.as_triple().unwrap().range_word().is_empty()));
    }

    #[test]
    fn upsets() {
        let h = Hull::new(catalog::t1());
        let t = h.matrix();
        let up = strict_upset(t, &h.parse("b|a,c|b").unwrap()).unwrap();
        assert_eq!(up, lits(&h, &["-|a,b,c|-", "-|b|-"]));
        assert!(strict_upset(t, &h.parse("-|a,b,c|-").unwrap()).unwrap().is_empty());
        let up = strict_upset(t, &h.parse("-|a,c|-").unwrap()).unwrap();
        assert_eq!(up, lits(&h, &["-|a,b,c|-"]));
        assert!(strict_upset(t, &Element::Zero).is_err());
        assert!(strict_upset(t, &h.parse("a|a,c|-").unwrap()).is_err());
    }

    #[test]
    fn covers_match_depth_one_diagram() {
        let h = Hull::new(catalog::t1());
        let t = h.matrix();
        let c = |lit: &str| upper_covers(t, &h.parse(lit).unwrap()).unwrap();
        assert_eq!(c("-|a,c|-"), lits(&h, &["-|a,b,c|-"]));
        assert_eq!(c("-|b|-"), lits(&h, &["-|a,b,c|-"]));
        assert_eq!(c("a|a,c|a"), lits(&h, &["a|a,b,c|a"]));
        assert_eq!(c("a|b|a"), lits(&h, &["a|a,b,c|a"]));
        assert_eq!(c("a|a,b,c|a"), lits(&h, &["-|a,c|-"]));

        let index = IdempotentIndex::build(t, 1);
        assert_eq!(index.len(), 8);
        let named: Vec<(String, String)> = index
            .edges()
            .into_iter()
            .map(|(lo, hi)| (h.format(&index.nodes()[lo]), h.format(&index.nodes()[hi])))
            .collect();
        let mut expected = vec![
            ("-|a,c|-", "-|a,b,c|-"),
            ("-|b|-", "-|a,b,c|-"),
            ("a|a,b,c|a", "-|a,c|-"),
            ("c|b|c", "-|a,c|-"),
            ("b|a,c|b", "-|b|-"),
            ("a|a,c|a", "a|a,b,c|a"),
            ("a|b|a", "a|a,b,c|a"),
        ];
        expected.sort();
        let mut got: Vec<(&str, &str)> = named.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn two_shift_covers() {
        let two = catalog::full_two_shift();
        let h = Hull::new(two.clone());
        let index = IdempotentIndex::build(&two, 2);
        let x = index.position(&h.parse("x|x,y|x").unwrap()).unwrap();
        let below: Vec<String> = index
            .lower_covers_of(x)
            .into_iter()
            .map(|i| h.format(&index.nodes()[i]))
            .collect();
        assert_eq!(below, vec!["xx|x,y|xx", "xy|x,y|xy"]);
    }

    #[test]
    fn classification() {
        let h = Hull::new(catalog::t1());
        let standard = lits(&h, &["a|a,b,c|a", "b|a,c|b", "c|b|c"]);
        let p = |lit: &str, o: &[Element]| classify(&h.parse(lit).unwrap(), o).unwrap();
        assert_eq!(p("-|a,c|-", &standard), Position::AboveO);
        assert_eq!(p("ab|a,c|ab", &standard), Position::BelowO);
        assert_eq!(p("b|a,c|b", &standard), Position::InO);
        let two = lits(&h, &["a|a,b,c|a", "b|a,c|b"]);
        assert_eq!(p("c|b|c", &two), Position::Incomparable);
    }

    #[test]
    fn fingerprints() {
        assert_eq!(fingerprint(&catalog::conjugate_left(), 2)[&2], 3);
        assert_eq!(fingerprint(&catalog::full_two_shift(), 2)[&2], 4);
        assert_eq!(fingerprint(&catalog::full_two_shift(), 2)[&1], 2);
        assert_eq!(fingerprint(&catalog::single_loop(), 1)[&1], 1);
        let fp = fingerprint(&catalog::full_two_shift(), 2);
        assert_eq!(fingerprint_json(&fp), "{\"1\": 2, \"2\": 4}");
    }

    #[test]
    fn dot_output() {
        let t = catalog::t1();
        let h = Hull::new(t.clone());
        let index = IdempotentIndex::build(&t, 1);
        let plain = export_dot(&h, &index, &[]);
        assert!(!plain.contains("filled"));
        assert_eq!(plain.matches(" -> ").count(), 7);
        assert!(plain.starts_with("digraph semilattice {\n  rankdir=BT;"));
        let o = lits(&h, &["a|a,b,c|a"]);
        let styled = export_dot(&h, &index, &o);
        assert_eq!(styled.matches("filled").count(), 1);
        assert_eq!(export_dot(&h, &index, &[]), plain);
    }
}
