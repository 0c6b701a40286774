//! Words, the truncated tensor algebra `T^{<=d}(Q^t)` and the expansion of
//! free-group words in it.
//!
//! A generator `x_i` of the tensor algebra stands for the class of
//! `[a_i] - [e]` in the group ring, so `T^{<=d}(Q^t)` is the quotient of the
//! group ring of the free group on `t` letters by the `(d+1)`-st power of
//! its augmentation ideal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::qlinalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeAlgError {
    #[error("degree caps differ: {0} vs {1}")]
    CapMismatch(usize, usize),
    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("letter {letter} outside alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("constant coefficient is {0}, expected {1}")]
    BadConstant(Rational, Rational),
    #[error("requested degree {requested} exceeds cap {cap}")]
    DegreeAboveCap { requested: usize, cap: usize },
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A word over the alphabet `{1..t}`; the empty word is the unit.
///
/// Words are ordered graded length-lexicographically: shorter words first,
/// then lexicographically by letter.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u8])
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| l as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    pub fn letter_at(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }

    /// Applies a letter substitution.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Word {
        Word(self.0.iter().map(|&l| f(l as usize) as u8).collect())
    }

    /// Compact rendering with letters `a, b, c, ...`.
    pub fn to_alpha(&self) -> String {
        self.0.iter().map(|&l| (b'a' + l - 1) as char).collect()
    }

    /// Lexicographic comparison (no length grading).
    pub fn lex_cmp(&self, other: &Word) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| format!("x{l}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Word {
    type Err = FreeAlgError;

    /// Parses `"x1 x2 x1"`; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let n = tok
                .strip_prefix('x')
                .and_then(|n| n.parse::<u8>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| FreeAlgError::Parse(s.to_string()))?;
            letters.push(n);
        }
        Ok(Word(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Element of `T^{<=d}(Q^t)`: a finitely supported combination of words of
/// length at most `d`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncTensorElement {
    cap: usize,
    alphabet: usize,
    coeffs: BTreeMap<Word, Rational>,
}

impl TruncTensorElement {
    pub fn zero(cap: usize, alphabet: usize) -> Self {
        TruncTensorElement { cap, alphabet, coeffs: BTreeMap::new() }
    }

    pub fn unit(cap: usize, alphabet: usize) -> Self {
        Self::monomial(cap, alphabet, Word::empty(), Rational::one())
    }

    /// `c * w`, or zero when `w` is longer than the cap.
    pub fn monomial(cap: usize, alphabet: usize, w: Word, c: Rational) -> Self {
        assert!(w.max_letter() <= alphabet, "letter outside alphabet");
        let mut e = Self::zero(cap, alphabet);
        if w.len() <= cap && !c.is_zero() {
            e.coeffs.insert(w, c);
        }
        e
    }

    pub fn generator(cap: usize, alphabet: usize, i: usize) -> Self {
        Self::monomial(cap, alphabet, Word::letter(i), Rational::one())
    }

    /// Builds an element from `(word, coefficient)` pairs, dropping words over
    /// the cap and zero sums.
    pub fn from_terms(
        cap: usize,
        alphabet: usize,
        terms: impl IntoIterator<Item = (Word, Rational)>,
    ) -> Self {
        let mut e = Self::zero(cap, alphabet);
        for (w, c) in terms {
            e.add_term(w, &c);
        }
        e
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.coeffs.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant(&self) -> Rational {
        self.coeff(&Word::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.coeffs.iter()
    }

    /// Lowest word length in the support, `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.keys().next().map(Word::len)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: &Rational) {
        assert!(w.max_letter() <= self.alphabet, "letter outside alphabet");
        if w.len() > self.cap || c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.coeffs.remove(&w);
                }
            }
            None => {
                self.coeffs.insert(w, c.clone());
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FreeAlgError> {
        if self.cap != other.cap {
            return Err(FreeAlgError::CapMismatch(self.cap, other.cap));
        }
        if self.alphabet != other.alphabet {
            return Err(FreeAlgError::AlphabetMismatch(self.alphabet, other.alphabet));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FreeAlgError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FreeAlgError> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.cap, self.alphabet);
        }
        TruncTensorElement {
            cap: self.cap,
            alphabet: self.alphabet,
            coeffs: self.coeffs.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// Concatenation product, discarding words longer than the cap.
    pub fn mul(&self, other: &Self) -> Result<Self, FreeAlgError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.cap, self.alphabet);
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                if u.len() + v.len() > self.cap {
                    // `other` iterates by length, so the rest is longer still
                    break;
                }
                out.add_term(u.concat(v), &(a * b));
            }
        }
        out
    }

    /// `uv - vu`.
    pub fn commutator(&self, other: &Self) -> Result<Self, FreeAlgError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Drops all words longer than `new_cap`, giving an element of
    /// `T^{<=new_cap}`.
    pub fn reduce_degree(&self, new_cap: usize) -> Result<Self, FreeAlgError> {
        if new_cap > self.cap {
            return Err(FreeAlgError::DegreeAboveCap { requested: new_cap, cap: self.cap });
        }
        Ok(TruncTensorElement {
            cap: new_cap,
            alphabet: self.alphabet,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= new_cap)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        })
    }

    /// Reinterprets the element in a larger alphabet or with a larger cap.
    pub fn embed(&self, cap: usize, alphabet: usize) -> Self {
        assert!(alphabet >= self.alphabet);
        TruncTensorElement::from_terms(cap, alphabet, self.coeffs.clone())
    }

    /// Homogeneous component of length `k`.
    pub fn homogeneous(&self, k: usize) -> Self {
        TruncTensorElement {
            cap: self.cap,
            alphabet: self.alphabet,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() == k)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies the algebra map sending `x_i` to `images[i-1]`.
    pub fn substitute(&self, images: &[TruncTensorElement]) -> Result<Self, FreeAlgError> {
        let (cap, alphabet) = match images.first() {
            Some(e) => (e.cap, e.alphabet),
            None => (self.cap, 0),
        };
        for e in images {
            if e.cap != cap {
                return Err(FreeAlgError::CapMismatch(cap, e.cap));
            }
            if e.alphabet != alphabet {
                return Err(FreeAlgError::AlphabetMismatch(alphabet, e.alphabet));
            }
        }
        let mut out = Self::zero(cap, alphabet);
        for (w, c) in &self.coeffs {
            let mut term = Self::unit(cap, alphabet).scale(c);
            for l in w.letters() {
                let img = images.get(l - 1).ok_or(FreeAlgError::LetterOutOfRange {
                    letter: l,
                    alphabet: images.len(),
                })?;
                term = term.mul_unchecked(img);
                if term.is_zero() {
                    break;
                }
            }
            for (v, x) in term.coeffs {
                out.add_term(v, &x);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TruncTensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.coeffs {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (w.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{w}")?,
                (false, false) => write!(f, "{mag} {w}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncTensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T<={}({}): {}", self.cap, self.alphabet, self)
    }
}

/// Concatenation product in `T^{<=d}`.
pub fn tt_mul(
    a: &TruncTensorElement,
    b: &TruncTensorElement,
) -> Result<TruncTensorElement, FreeAlgError> {
    a.mul(b)
}

/// Truncated logarithm `sum_{s>=1} (-1)^{s+1} (u-1)^s / s`; requires constant
/// coefficient one.
pub fn tt_log(u: &TruncTensorElement) -> Result<TruncTensorElement, FreeAlgError> {
    let c = u.constant();
    if !c.is_one() {
        return Err(FreeAlgError::BadConstant(c, Rational::one()));
    }
    let x = u.sub(&TruncTensorElement::unit(u.cap, u.alphabet))?;
    let mut out = TruncTensorElement::zero(u.cap, u.alphabet);
    let mut power = x.clone();
    for s in 1..=u.cap {
        if power.is_zero() {
            break;
        }
        let sign = if s % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale(&Rational::new(sign, s as i64)))?;
        power = power.mul_unchecked(&x);
    }
    Ok(out)
}

/// Truncated exponential `sum_{s>=0} x^s / s!`; requires constant
/// coefficient zero.
pub fn tt_exp(x: &TruncTensorElement) -> Result<TruncTensorElement, FreeAlgError> {
    let c = x.constant();
    if !c.is_zero() {
        return Err(FreeAlgError::BadConstant(c, Rational::zero()));
    }
    let mut out = TruncTensorElement::unit(x.cap, x.alphabet);
    let mut term = TruncTensorElement::unit(x.cap, x.alphabet);
    for s in 1..=x.cap {
        term = term.mul_unchecked(x).scale(&Rational::new(1, s as i64));
        if term.is_zero() {
            break;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Restriction to words of length at most `new_cap`.
pub fn tt_reduce_degree(
    u: &TruncTensorElement,
    new_cap: usize,
) -> Result<TruncTensorElement, FreeAlgError> {
    u.reduce_degree(new_cap)
}

/// One letter of a group word: generator `letter` (1-based) or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub letter: usize,
    pub inverse: bool,
}

impl Syllable {
    pub fn new(letter: usize, inverse: bool) -> Self {
        Syllable { letter, inverse }
    }

    pub fn inv(self) -> Self {
        Syllable { letter: self.letter, inverse: !self.inverse }
    }
}

/// A freely reduced word in the free group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord {
    syllables: Vec<Syllable>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(letter: usize) -> Self {
        GroupWord { syllables: vec![Syllable::new(letter, false)] }
    }

    /// Freely reduces the given syllables.
    pub fn new(syllables: impl IntoIterator<Item = Syllable>) -> Self {
        let mut out: Vec<Syllable> = Vec::new();
        for s in syllables {
            if out.last() == Some(&s.inv()) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        GroupWord { syllables: out }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn max_letter(&self) -> usize {
        self.syllables.iter().map(|s| s.letter).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        GroupWord::new(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { syllables: self.syllables.iter().rev().map(|s| s.inv()).collect() }
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Commutator `u v u^{-1} v^{-1}`.
    pub fn commutator(u: &GroupWord, v: &GroupWord) -> GroupWord {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Substitutes `images[i-1]` for generator `i`.
    pub fn substitute(&self, images: &[GroupWord]) -> Option<GroupWord> {
        let mut out = GroupWord::identity();
        for s in &self.syllables {
            let img = images.get(s.letter.checked_sub(1)?)?;
            out = out.mul(&if s.inverse { img.inverse() } else { img.clone() });
        }
        Some(out)
    }

    /// Exponent sum of each generator `1..=t`.
    pub fn exponent_sums(&self, t: usize) -> Vec<i64> {
        let mut v = vec![0; t];
        for s in &self.syllables {
            v[s.letter - 1] += if s.inverse { -1 } else { 1 };
        }
        v
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for s in &self.syllables {
            let c = (b'a' + (s.letter - 1) as u8) as char;
            write!(f, "{}", if s.inverse { c.to_ascii_uppercase() } else { c })?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupWord({self})")
    }
}

impl FromStr for GroupWord {
    type Err = FreeAlgError;

    /// Letters `a..z` are generators, capitals their inverses; whitespace is
    /// ignored and `"1"` or `""` is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut syl = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                'a'..='z' => syl.push(Syllable::new((c as u8 - b'a' + 1) as usize, false)),
                'A'..='Z' => syl.push(Syllable::new((c as u8 - b'A' + 1) as usize, true)),
                '1' => {}
                _ => return Err(FreeAlgError::Parse(s.to_string())),
            }
        }
        Ok(GroupWord::new(syl))
    }
}

/// Class of `[w]` in `T^{<=d}(Q^t)`: a generator maps to `1 + x`, its inverse
/// to `1 + sum_{s=1}^d (-1)^s x^s`, and products to products.
pub fn expand_group_word(
    w: &GroupWord,
    d: usize,
    t: usize,
) -> Result<TruncTensorElement, FreeAlgError> {
    let mut out = TruncTensorElement::unit(d, t);
    for s in w.syllables() {
        out = out.mul_unchecked(&expand_syllable(*s, d, t)?);
    }
    Ok(out)
}

fn expand_syllable(s: Syllable, d: usize, t: usize) -> Result<TruncTensorElement, FreeAlgError> {
    if s.letter == 0 || s.letter > t {
        return Err(FreeAlgError::LetterOutOfRange { letter: s.letter, alphabet: t });
    }
    let mut e = TruncTensorElement::unit(d, t);
    if !s.inverse {
        e.add_term(Word::letter(s.letter), &Rational::one());
    } else {
        for k in 1..=d {
            let sign = if k % 2 == 1 { -1 } else { 1 };
            e.add_term(Word::from_letters(&vec![s.letter; k]), &Rational::from(sign));
        }
    }
    Ok(e)
}

/// All words of length at most `d` over `t` letters, in graded
/// length-lexicographic order.
pub fn words_up_to(t: usize, d: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(layer.len() * t);
        for w in &layer {
            for l in 1..=t {
                next.push(w.concat(&Word::letter(l)));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Position of `w` in the graded length-lex enumeration of words over `t`
/// letters, as produced by [`words_up_to`].
pub fn graded_index(w: &Word, t: usize) -> usize {
    let mut offset = 0;
    let mut p = 1;
    for _ in 0..w.len() {
        offset += p;
        p *= t;
    }
    let mut r = 0;
    for l in w.letters() {
        r = r * t + (l - 1);
    }
    offset + r
}
