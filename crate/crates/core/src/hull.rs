//! Exact arithmetic in the inverse hull of a Markov shift.
//!
//! Every nonzero element is a unique triple `(s, X, w)`: the partial
//! bijection with domain `⋃_{a ∈ X} w·a·L¹` sending `w·a·u ↦ s·a·u`. In
//! generator notation it is `θ_s · e_X · θ_w⁻¹`, where `e_X` is a product of
//! idempotents `θ_x⁻¹θ_x` whose follow-sets intersect to `X`. The triple is
//! well formed when `s` and `w` are legal, `X` is a nonempty intersection of
//! rows, and `X` is allowed after the last letters of both `s` and `w`.
//!
//! Two well-formed triples are equal as maps iff they are equal as triples:
//! the shortest domain words `w·a` recover `w` and `X`, and their images
//! `s·a` recover `s`.

use std::fmt;

use crate::error::{HullError, Result};
use crate::letters::{Letter, LetterSet};
use crate::matrix::TransitionMatrix;
use crate::word::Word;

/// A nonzero hull element `θ_s · e_X · θ_w⁻¹`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    range_word: Word,
    middle: LetterSet,
    domain_word: Word,
}

impl Triple {
    /// The word `s` that images start with.
    pub fn range_word(&self) -> &Word {
        &self.range_word
    }

    pub fn middle(&self) -> LetterSet {
        self.middle
    }

    /// The word `w` that domain words start with.
    pub fn domain_word(&self) -> &Word {
        &self.domain_word
    }

    /// Length change `|s| - |w|` applied to every word in the domain.
    pub fn shift(&self) -> isize {
        self.range_word.len() as isize - self.domain_word.len() as isize
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {:?}, {:?})",
            self.range_word, self.middle, self.domain_word
        )
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Element {
    Zero,
    Triple(Triple),
}

impl Element {
    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Zero)
    }

    pub fn as_triple(&self) -> Option<&Triple> {
        match self {
            Element::Zero => None,
            Element::Triple(t) => Some(t),
        }
    }

    /// Zero, or `s = w`.
    pub fn is_idempotent(&self) -> bool {
        match self {
            Element::Zero => true,
            Element::Triple(t) => t.range_word == t.domain_word,
        }
    }

    pub fn inverse(&self) -> Element {
        match self {
            Element::Zero => Element::Zero,
            Element::Triple(t) => Element::Triple(Triple {
                range_word: t.domain_word.clone(),
                middle: t.middle,
                domain_word: t.range_word.clone(),
            }),
        }
    }

    /// `g⁻¹g = (w, X, w)`.
    pub fn source(&self) -> Result<Element> {
        let t = self.as_triple().ok_or(HullError::ZeroElement)?;
        Ok(Element::Triple(Triple {
            range_word: t.domain_word.clone(),
            middle: t.middle,
            domain_word: t.domain_word.clone(),
        }))
    }

    /// `gg⁻¹ = (s, X, s)`.
    pub fn range(&self) -> Result<Element> {
        let t = self.as_triple().ok_or(HullError::ZeroElement)?;
        Ok(Element::Triple(Triple {
            range_word: t.range_word.clone(),
            middle: t.middle,
            domain_word: t.range_word.clone(),
        }))
    }

    /// Largest of `|s|`, `|w|`; zero for the zero element.
    pub fn word_length(&self) -> usize {
        self.as_triple()
            .map(|t| t.range_word.len().max(t.domain_word.len()))
            .unwrap_or(0)
    }
}

/// The inverse hull of one transition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hull {
    matrix: TransitionMatrix,
}

impl Hull {
    pub fn new(matrix: TransitionMatrix) -> Self {
        Hull { matrix }
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    /// Builds `(s, X, w)`, rejecting anything that is not the graph of a hull element.
    pub fn element(&self, s: Word, middle: LetterSet, w: Word) -> Result<Element> {
        let t = &self.matrix;
        if !t.is_legal(&s) {
            return Err(HullError::Input(format!("range word {s:?} is not legal")));
        }
        if !t.is_legal(&w) {
            return Err(HullError::Input(format!("domain word {w:?} is not legal")));
        }
        if middle.is_empty() {
            return Err(HullError::Input(
                "empty middle set; use the zero element instead".into(),
            ));
        }
        if !t.is_constructible(middle) {
            return Err(HullError::Input(format!(
                "middle set {{{}}} is not an intersection of rows",
                t.format_letter_set(middle)
            )));
        }
        if !middle.is_subset(t.follows_word(&s)) || !middle.is_subset(t.follows_word(&w)) {
            return Err(HullError::Input(format!(
                "middle set {{{}}} must follow the last letters of both words",
                t.format_letter_set(middle)
            )));
        }
        Ok(Element::Triple(Triple {
            range_word: s,
            middle,
            domain_word: w,
        }))
    }

    pub fn idempotent(&self, s: Word, middle: LetterSet) -> Result<Element> {
        self.element(s.clone(), middle, s)
    }

    /// `θ_w` for a nonempty legal word.
    pub fn generator(&self, w: Word) -> Result<Element> {
        let last = w
            .last()
            .ok_or_else(|| HullError::Input("generators are indexed by nonempty words".into()))?;
        let x = self.matrix.follows(last);
        self.element(w, x, Word::empty())
    }

    /// `θ_a` for each letter, in alphabet order.
    pub fn letter_generators(&self) -> Vec<Element> {
        self.matrix
            .letters()
            .map(|a| self.generator(Word::letter(a)).expect("letters are legal"))
            .collect()
    }

    /// The idempotent `e_X`, identity on `⋃_{a ∈ X} a·L¹`.
    pub fn middle_idempotent(&self, middle: LetterSet) -> Result<Element> {
        self.idempotent(Word::empty(), middle)
    }

    /// Normal form of `θ_s · θ_{x₁}⁻¹θ_{x₁} ⋯ θ_{xₙ}⁻¹θ_{xₙ} · θ_w⁻¹`.
    ///
    /// The empty word contributes no constraint. With no middles and both
    /// words empty the result is the identity map, which belongs to the
    /// hull only when the whole alphabet is constructible.
    pub fn canonicalize(&self, s: Word, middles: &[Letter], w: Word) -> Result<Element> {
        let t = &self.matrix;
        for (name, word) in [("range", &s), ("domain", &w)] {
            if !t.is_legal(word) {
                return Err(HullError::Input(format!("{name} word {word:?} is not legal")));
            }
        }
        let mut x = t.follows_word(&s).intersection(t.follows_word(&w));
        for &m in middles {
            if m as usize >= t.size() {
                return Err(HullError::UnknownLetter(format!("#{m}")));
            }
            x = x.intersection(t.follows(m));
        }
        if x.is_empty() {
            return Ok(Element::Zero);
        }
        if !t.is_constructible(x) {
            return Err(HullError::Input(
                "the identity map is not a hull element for this matrix".into(),
            ));
        }
        Ok(Element::Triple(Triple {
            range_word: s,
            middle: x,
            domain_word: w,
        }))
    }

    /// Checks that `g` is a well-formed element of this hull.
    pub fn check(&self, g: &Element) -> Result<()> {
        match g {
            Element::Zero => Ok(()),
            Element::Triple(t) => self
                .element(t.range_word.clone(), t.middle, t.domain_word.clone())
                .map(|_| ())
                .map_err(|e| HullError::Usage(format!("element does not belong to this hull: {e}"))),
        }
    }

    /// The product `gh` (apply `h`, then `g`).
    ///
    /// With `g = (s₁, X₁, w₁)` and `h = (s₂, X₂, w₂)` the cases are tried in
    /// this order:
    /// - A: `w₁ = s₂` gives `(s₁, X₁ ∩ X₂, w₂)`, zero if the meet is empty;
    /// - B: `w₁ = s₂·u` gives `(s₁, X₁, w₂·u)` when `first(u) ∈ X₂`, else zero;
    /// - C: `s₂ = w₁·u` gives `(s₁·u, X₂, w₂)` when `first(u) ∈ X₁`, else zero;
    /// - D: otherwise zero.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        let (Element::Triple(a), Element::Triple(b)) = (g, h) else {
            return Element::Zero;
        };
        let product = if a.domain_word == b.range_word {
            let meet = a.middle.intersection(b.middle);
            if meet.is_empty() {
                Element::Zero
            } else {
                Element::Triple(Triple {
                    range_word: a.range_word.clone(),
                    middle: meet,
                    domain_word: b.domain_word.clone(),
                })
            }
        } else if let Some(u) = a.domain_word.strip_prefix(&b.range_word) {
            if b.middle.contains(u.first().expect("proper prefix")) {
                Element::Triple(Triple {
                    range_word: a.range_word.clone(),
                    middle: a.middle,
                    domain_word: b.domain_word.concat(&u),
                })
            } else {
                Element::Zero
            }
        } else if let Some(u) = b.range_word.strip_prefix(&a.domain_word) {
            if a.middle.contains(u.first().expect("proper prefix")) {
                Element::Triple(Triple {
                    range_word: a.range_word.concat(&u),
                    middle: b.middle,
                    domain_word: b.domain_word.clone(),
                })
            } else {
                Element::Zero
            }
        } else {
            Element::Zero
        };
        debug_assert!(
            self.check(&product).is_ok(),
            "product left the hull: {g:?} * {h:?} = {product:?}"
        );
        product
    }

    /// [`multiply`](Self::multiply) after checking both factors belong to this hull.
    pub fn try_multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.multiply(g, h))
    }

    /// Left-to-right product of `factors`; the empty product is an error
    /// because the hull has no identity in general.
    pub fn product<'a, I>(&self, factors: I) -> Result<Element>
    where
        I: IntoIterator<Item = &'a Element>,
    {
        let mut iter = factors.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| HullError::Usage("empty product".into()))?
            .clone();
        Ok(iter.fold(first, |acc, g| self.multiply(&acc, g)))
    }

    /// Natural partial order on idempotents, i.e. inclusion of domains.
    ///
    /// `(s, X, s) ≤ (t, Y, t)` iff `s = t` and `X ⊆ Y`, or `t` is a proper
    /// prefix of `s` whose next letter in `s` lies in `Y`.
    pub fn leq(&self, e: &Element, f: &Element) -> Result<bool> {
        require_idempotent(e)?;
        require_idempotent(f)?;
        Ok(match (e, f) {
            (Element::Zero, _) => true,
            (_, Element::Zero) => false,
            (Element::Triple(e), Element::Triple(f)) => idempotent_leq(
                &e.domain_word,
                e.middle,
                &f.domain_word,
                f.middle,
            ),
        })
    }

    /// `e 𝒟 f` for idempotents: equal middle sets. The witness for nonzero
    /// `e = (s, X, s)`, `f = (t, X, t)` is `(t, X, s)`.
    pub fn d_related(&self, e: &Element, f: &Element) -> Result<bool> {
        require_idempotent(e)?;
        require_idempotent(f)?;
        Ok(match (e, f) {
            (Element::Zero, Element::Zero) => true,
            (Element::Triple(e), Element::Triple(f)) => e.middle == f.middle,
            _ => false,
        })
    }

    /// An element `a` with `a⁻¹a = e` and `aa⁻¹ = f`, when one exists.
    pub fn d_witness(&self, e: &Element, f: &Element) -> Result<Option<Element>> {
        if !self.d_related(e, f)? {
            return Ok(None);
        }
        Ok(Some(match (e, f) {
            (Element::Triple(e), Element::Triple(f)) => Element::Triple(Triple {
                range_word: f.domain_word.clone(),
                middle: e.middle,
                domain_word: e.domain_word.clone(),
            }),
            _ => Element::Zero,
        }))
    }

    pub fn l_related(&self, g: &Element, h: &Element) -> bool {
        source_or_zero(g) == source_or_zero(h)
    }

    pub fn r_related(&self, g: &Element, h: &Element) -> bool {
        range_or_zero(g) == range_or_zero(h)
    }

    pub fn h_related(&self, g: &Element, h: &Element) -> bool {
        self.l_related(g, h) && self.r_related(g, h)
    }

    /// Every nonzero element with `|s|, |w| <= max_len`, in a fixed order.
    pub fn elements_up_to(&self, max_len: usize) -> Vec<Element> {
        let t = &self.matrix;
        let words = t.words_up_to(max_len);
        let mut out = Vec::new();
        for s in &words {
            for w in &words {
                let allowed = t.follows_word(s).intersection(t.follows_word(w));
                for &x in t.constructible_family() {
                    if x.is_subset(allowed) {
                        out.push(Element::Triple(Triple {
                            range_word: s.clone(),
                            middle: x,
                            domain_word: w.clone(),
                        }));
                    }
                }
            }
        }
        out
    }

    /// Renders `s|x1,x2|w`, with `-` for the empty word and `0` for zero.
    pub fn format(&self, g: &Element) -> String {
        match g {
            Element::Zero => "0".to_string(),
            Element::Triple(t) => format!(
                "{}|{}|{}",
                self.format_word_or_unit(&t.range_word),
                self.matrix.format_letter_set(t.middle),
                self.format_word_or_unit(&t.domain_word)
            ),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Element> {
        let text = text.trim();
        if text == "0" {
            return Ok(Element::Zero);
        }
        let parts: Vec<&str> = text.split('|').collect();
        let [s, x, w] = parts.as_slice() else {
            return Err(HullError::Input(format!(
                "element literal `{text}` must look like `s|x1,x2|w` or `0`"
            )));
        };
        let names: Vec<String> = x
            .split(',')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(String::from)
            .collect();
        let middle = self.matrix.parse_letter_set(&names)?;
        self.element(self.parse_word_or_unit(s)?, middle, self.parse_word_or_unit(w)?)
    }

    fn format_word_or_unit(&self, w: &Word) -> String {
        if w.is_empty() {
            "-".to_string()
        } else {
            self.matrix.format_word(w)
        }
    }

    fn parse_word_or_unit(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "-" {
            Ok(Word::empty())
        } else {
            self.matrix.parse_word(text)
        }
    }
}

/// `(s, X, s)` without validation, for callers that enumerate well-formed data.
pub(crate) fn idempotent_unchecked(s: Word, middle: LetterSet) -> Element {
    Element::Triple(Triple {
        range_word: s.clone(),
        middle,
        domain_word: s,
    })
}

pub(crate) fn idempotent_leq(s: &Word, x: LetterSet, t: &Word, y: LetterSet) -> bool {
    if s == t {
        return x.is_subset(y);
    }
    if s.len() > t.len() && t.is_prefix_of(s) {
        return y.contains(s.letters()[t.len()]);
    }
    false
}

fn require_idempotent(e: &Element) -> Result<()> {
    if e.is_idempotent() {
        Ok(())
    } else {
        Err(HullError::Usage(format!("{e:?} is not idempotent")))
    }
}

fn source_or_zero(g: &Element) -> Element {
    g.source().unwrap_or(Element::Zero)
}

fn range_or_zero(g: &Element) -> Element {
    g.range().unwrap_or(Element::Zero)
}
