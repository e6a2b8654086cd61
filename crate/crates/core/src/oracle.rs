//! Brute-force partial bijections on a truncated language.
//!
//! Maps here are explicit tables of word pairs `u ↦ v` with both words legal
//! and no longer than the depth `N`. They are built straight from the
//! definition of `θ_w` (prepend `w`) and composed as partial functions, so
//! they share nothing with the case analysis in [`crate::hull`] beyond
//! legality of words.
//!
//! Truncation clips maps that lengthen words. When comparing or composing,
//! only domain words inside a *safe window* are consulted: a window of
//! length `W` is safe for a chain of maps if every intermediate and final
//! image of a word of length `W` still fits in `N`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HullError, Result};
use crate::hull::{Element, Hull};
use crate::letters::Letter;
use crate::matrix::TransitionMatrix;
use crate::word::Word;

pub const DEFAULT_DEPTH: usize = 10;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedMap {
    depth: usize,
    pairs: BTreeMap<Word, Word>,
}

impl TruncatedMap {
    pub fn empty(depth: usize) -> Self {
        TruncatedMap {
            depth,
            pairs: BTreeMap::new(),
        }
    }

    pub fn from_pairs(depth: usize, pairs: impl IntoIterator<Item = (Word, Word)>) -> Result<Self> {
        let mut map = TruncatedMap::empty(depth);
        for (u, v) in pairs {
            if u.len() > depth || v.len() > depth || u.is_empty() || v.is_empty() {
                return Err(HullError::Input(format!(
                    "pair {u:?} -> {v:?} lies outside depth {depth}"
                )));
            }
            map.pairs.insert(u, v);
        }
        if !map.is_injective() {
            return Err(HullError::Input("map is not injective".into()));
        }
        Ok(map)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, u: &Word) -> Option<&Word> {
        self.pairs.get(u)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Word, &Word)> {
        self.pairs.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Word> {
        self.pairs.keys()
    }

    pub fn is_injective(&self) -> bool {
        let mut images: Vec<&Word> = self.pairs.values().collect();
        images.sort();
        images.windows(2).all(|p| p[0] != p[1])
    }

    /// `self ∘ inner`: apply `inner` first, on the largest domain where the
    /// composite is defined.
    pub fn compose(&self, inner: &TruncatedMap) -> Result<TruncatedMap> {
        if self.depth != inner.depth {
            return Err(HullError::Usage(format!(
                "cannot compose maps of depth {} and {}",
                self.depth, inner.depth
            )));
        }
        let pairs = inner
            .pairs
            .iter()
            .filter_map(|(u, v)| self.pairs.get(v).map(|img| (u.clone(), img.clone())))
            .collect();
        Ok(TruncatedMap {
            depth: self.depth,
            pairs,
        })
    }

    pub fn invert(&self) -> TruncatedMap {
        TruncatedMap {
            depth: self.depth,
            pairs: self.pairs.iter().map(|(u, v)| (v.clone(), u.clone())).collect(),
        }
    }

    /// Keeps the pairs whose domain word has length at most `max_len`.
    pub fn restrict(&self, max_len: usize) -> TruncatedMap {
        TruncatedMap {
            depth: self.depth,
            pairs: self
                .pairs
                .iter()
                .filter(|(u, _)| u.len() <= max_len)
                .map(|(u, v)| (u.clone(), v.clone()))
                .collect(),
        }
    }

    /// Sorted `u -> v` lines, one per pair.
    pub fn dump(&self, t: &TransitionMatrix) -> String {
        let mut out = String::new();
        for (u, v) in &self.pairs {
            out.push_str(&t.format_word(u));
            out.push_str(" -> ");
            out.push_str(&t.format_word(v));
            out.push('\n');
        }
        out
    }
}

/// Largest domain-word length for which a chain of maps with the given
/// length shifts (innermost first) never leaves depth `depth`.
pub fn safe_window(depth: usize, shifts: &[isize]) -> usize {
    let mut running = 0isize;
    let mut peak = 0isize;
    for &d in shifts {
        running += d;
        peak = peak.max(running);
    }
    depth.saturating_sub(peak as usize)
}

/// `θ_w` truncated at `depth`: `u ↦ w·u` for legal nonempty `u` with `w·u`
/// legal and `|w·u| <= depth`. The empty word gives the identity.
pub fn realize_generator(t: &TransitionMatrix, w: &Word, depth: usize) -> Result<TruncatedMap> {
    if w.len() >= depth {
        return Err(HullError::Depth {
            depth,
            reason: format!("generator word of length {} needs depth > {}", w.len(), w.len()),
        });
    }
    if !t.is_legal(w) {
        return Err(HullError::Input(format!("{w:?} is not a legal word")));
    }
    let mut map = TruncatedMap::empty(depth);
    for u in t.enumerate_language(depth - w.len()) {
        let wu = w.concat(&u);
        if t.is_legal(&wu) {
            map.pairs.insert(u, wu);
        }
    }
    Ok(map)
}

/// The partial bijection of a canonical element, truncated at `depth`:
/// `w·a·u ↦ s·a·u` for `a ∈ X`, both sides legal and within the depth.
pub fn realize(hull: &Hull, g: &Element, depth: usize) -> Result<TruncatedMap> {
    let Some(tr) = g.as_triple() else {
        return Ok(TruncatedMap::empty(depth));
    };
    let (s, w) = (tr.range_word(), tr.domain_word());
    if w.len() + 1 > depth {
        return Err(HullError::Depth {
            depth,
            reason: format!("domain word of length {} needs depth >= {}", w.len(), w.len() + 1),
        });
    }
    let t = hull.matrix();
    let tail_len = depth - s.len().min(w.len());
    let mut map = TruncatedMap::empty(depth);
    for a in tr.middle().iter() {
        for y in words_starting_with(t, a, tail_len) {
            let dom = w.concat(&y);
            let img = s.concat(&y);
            if dom.len() <= depth && img.len() <= depth && t.is_legal(&dom) && t.is_legal(&img) {
                map.pairs.insert(dom, img);
            }
        }
    }
    Ok(map)
}

fn words_starting_with(t: &TransitionMatrix, a: Letter, max_len: usize) -> Vec<Word> {
    if max_len == 0 {
        return Vec::new();
    }
    let mut out = vec![Word::letter(a)];
    let mut i = 0;
    while i < out.len() {
        if out[i].len() < max_len {
            let w = out[i].clone();
            for b in t.follows_word(&w).iter() {
                out.push(w.pushed(b));
            }
        }
        i += 1;
    }
    out
}

/// The map of `θ_s · θ_{x₁}⁻¹θ_{x₁} ⋯ · θ_w⁻¹` built by composing generator
/// tables, compared on a window where no intermediate word is clipped.
/// Returns the composite and the window length.
pub fn realize_word_product(
    t: &TransitionMatrix,
    s: &Word,
    middles: &[Letter],
    w: &Word,
    depth: usize,
) -> Result<(TruncatedMap, usize)> {
    let identity = || -> Result<TruncatedMap> { realize_generator(t, &Word::empty(), depth) };
    let gen = |v: &Word| -> Result<TruncatedMap> {
        if v.is_empty() {
            identity()
        } else {
            realize_generator(t, v, depth)
        }
    };
    let mut map = gen(w)?.invert();
    for &x in middles {
        let gx = realize_generator(t, &Word::letter(x), depth)?;
        map = gx.invert().compose(&gx.compose(&map)?)?;
    }
    map = gen(s)?.compose(&map)?;
    // inner to outer: -|w|, then +1/-1 per middle, then +|s|
    let mut shifts = vec![-(w.len() as isize)];
    for _ in middles {
        shifts.push(1);
        shifts.push(-1);
    }
    shifts.push(s.len() as isize);
    let window = safe_window(depth, &shifts);
    Ok((map.restrict(window), window))
}

/// Decides equality of two elements by comparing their tables.
///
/// On a window that still contains the shortest domain words `w·a` of both
/// elements, agreement of the tables is equivalent to equality of the
/// elements. Too small a depth is an error rather than a silent `false`.
pub fn equal_as_elements(hull: &Hull, g: &Element, h: &Element, depth: usize) -> Result<bool> {
    let wlen = |e: &Element| e.as_triple().map(|t| t.domain_word().len()).unwrap_or(0);
    let shift = |e: &Element| e.as_triple().map(|t| t.shift()).unwrap_or(0);
    let need = wlen(g).max(wlen(h));
    if depth < need + 2 {
        return Err(HullError::Depth {
            depth,
            reason: format!("comparison needs depth >= {}", need + 2),
        });
    }
    let window = depth.saturating_sub(shift(g).max(shift(h)).max(0) as usize);
    if window < need + 1 {
        return Err(HullError::Depth {
            depth,
            reason: format!(
                "safe window {window} does not reach the shortest domain words (length {})",
                need + 1
            ),
        });
    }
    let mg = realize(hull, g, depth)?.restrict(window);
    let mh = realize(hull, h, depth)?.restrict(window);
    Ok(mg == mh)
}

/// Domain inclusion for idempotents, read off the tables. Depth
/// `max(|s|, |t|) + 1` already exhibits any non-inclusion.
pub fn domain_included(hull: &Hull, e: &Element, f: &Element) -> Result<bool> {
    let depth = e.word_length().max(f.word_length()) + 2;
    let me = realize(hull, e, depth)?;
    let mf = realize(hull, f, depth)?;
    let included = me.domain().all(|u| mf.get(u).is_some());
    Ok(included)
}

/// Outcome of the cross-validation suite run by `verify`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerifyReport {
    pub depth: usize,
    pub seed: u64,
    pub max_word_len: usize,
    pub random_pairs: usize,
    pub random_agreements: usize,
    /// Pairs whose product is nonzero and visible inside the safe window.
    pub random_informative: usize,
    pub generator_pairs: usize,
    pub generator_agreements: usize,
    /// Counts for `θ_u⁻¹θ_v` = `θ_{v'}`, `θ_{u'}⁻¹`, `θ_u⁻¹θ_u`, `0`.
    pub generator_case_counts: [usize; 4],
    pub normal_form_checks: usize,
    pub normal_form_agreements: usize,
    pub disagreements: Vec<String>,
}

impl VerifyReport {
    pub fn all_agree(&self) -> bool {
        self.random_agreements == self.random_pairs
            && self.generator_agreements == self.generator_pairs
            && self.normal_form_agreements == self.normal_form_checks
    }
}

/// Cross-checks the symbolic algebra against composed tables:
///
/// 1. `pairs` random products `gh` with `|s|, |w| <= max_word_len`;
/// 2. every `θ_uθ_v` and `θ_u⁻¹θ_v` with `1 <= |u|, |v| <= max_word_len`,
///    checked against both the table and the four-way case split;
/// 3. every canonical form of a generator word with `|s|, |w| <= 2` and up
///    to two middle letters, against the composed generator tables.
pub fn verify_suite(
    hull: &Hull,
    depth: usize,
    seed: u64,
    pairs: usize,
    max_word_len: usize,
) -> Result<VerifyReport> {
    let t = hull.matrix();
    let mut report = VerifyReport {
        depth,
        seed,
        max_word_len,
        random_pairs: 0,
        random_agreements: 0,
        random_informative: 0,
        generator_pairs: 0,
        generator_agreements: 0,
        generator_case_counts: [0; 4],
        normal_form_checks: 0,
        normal_form_agreements: 0,
        disagreements: Vec::new(),
    };
    let note = |report: &mut VerifyReport, msg: String| {
        if report.disagreements.len() < 20 {
            report.disagreements.push(msg);
        }
    };

    let pool = hull.elements_up_to(max_word_len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let g = &pool[rng.gen_range(0..pool.len())];
        let h = &pool[rng.gen_range(0..pool.len())];
        let product = hull.multiply(g, h);
        let dg = g.as_triple().map(|x| x.shift()).unwrap_or(0);
        let dh = h.as_triple().map(|x| x.shift()).unwrap_or(0);
        let window = safe_window(depth, &[dh, dg]);
        let composed = realize(hull, g, depth)?
            .compose(&realize(hull, h, depth)?)?
            .restrict(window);
        let symbolic = realize(hull, &product, depth)?.restrict(window);
        report.random_pairs += 1;
        if composed == symbolic {
            report.random_agreements += 1;
        } else {
            note(&mut report, format!("{} * {}", hull.format(g), hull.format(h)));
        }
        if let Some(p) = product.as_triple() {
            if p.domain_word().len() < window {
                report.random_informative += 1;
            }
        }
    }

    let words = t.enumerate_language(max_word_len);
    let tables = words
        .iter()
        .map(|w| realize_generator(t, w, depth))
        .collect::<Result<Vec<_>>>()?;
    for (u, gu) in words.iter().zip(&tables) {
        let theta_u = hull.generator(u.clone())?;
        let gu_inverse = gu.invert();
        for (v, gv) in words.iter().zip(&tables) {
            let theta_v = hull.generator(v.clone())?;

            // θ_u θ_v = θ_{uv} or 0
            let uv = u.concat(v);
            let expected = if t.is_legal(&uv) {
                hull.generator(uv)?
            } else {
                Element::Zero
            };
            let window = safe_window(depth, &[v.len() as isize, u.len() as isize]);
            let table = gu.compose(gv)?.restrict(window);
            let ok = hull.multiply(&theta_u, &theta_v) == expected
                && realize(hull, &expected, depth)?.restrict(window) == table;
            report.generator_pairs += 1;
            if ok {
                report.generator_agreements += 1;
            } else {
                note(&mut report, format!("θ_u θ_v with u={u:?} v={v:?}"));
            }

            // θ_u⁻¹ θ_v by the four-way split
            let (case, expected) = if let Some(rest) = v.strip_prefix(u).filter(|r| !r.is_empty()) {
                (0, hull.generator(rest)?)
            } else if let Some(rest) = u.strip_prefix(v).filter(|r| !r.is_empty()) {
                (1, hull.generator(rest)?.inverse())
            } else if u == v {
                (2, theta_u.source()?)
            } else {
                (3, Element::Zero)
            };
            let window = safe_window(depth, &[v.len() as isize, -(u.len() as isize)]);
            let table = gu_inverse.compose(gv)?.restrict(window);
            let ok = hull.multiply(&theta_u.inverse(), &theta_v) == expected
                && realize(hull, &expected, depth)?.restrict(window) == table;
            report.generator_pairs += 1;
            report.generator_case_counts[case] += 1;
            if ok {
                report.generator_agreements += 1;
            } else {
                note(&mut report, format!("θ_u⁻¹ θ_v with u={u:?} v={v:?}"));
            }
        }
    }

    let short = t.words_up_to(2.min(max_word_len));
    let letters: Vec<Letter> = t.letters().collect();
    let mut middle_lists: Vec<Vec<Letter>> = vec![vec![]];
    middle_lists.extend(letters.iter().map(|&a| vec![a]));
    for &a in &letters {
        for &b in &letters {
            if a < b {
                middle_lists.push(vec![a, b]);
            }
        }
    }
    for s in &short {
        for w in &short {
            for middles in &middle_lists {
                let element = match hull.canonicalize(s.clone(), middles, w.clone()) {
                    Ok(e) => e,
                    // the bare identity is outside the hull for some matrices
                    Err(_) if s.is_empty() && w.is_empty() && middles.is_empty() => continue,
                    Err(e) => return Err(e),
                };
                let (table, window) = realize_word_product(t, s, middles, w, depth)?;
                report.normal_form_checks += 1;
                if realize(hull, &element, depth)?.restrict(window) == table {
                    report.normal_form_agreements += 1;
                } else {
                    note(
                        &mut report,
                        format!("normal form of s={s:?} middles={middles:?} w={w:?}"),
                    );
                }
            }
        }
    }
    Ok(report)
}
