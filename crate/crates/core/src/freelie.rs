//! Truncated free Lie algebras `Lie_{<=d}(Q^t)` in the Lyndon basis.
//!
//! Every Lyndon word `w` carries its standard bracketing `P_w`, built from
//! the right standard factorization `w = uv` with `v` the longest proper
//! Lyndon suffix. The expansion of `P_w` in the tensor algebra is `w` plus
//! words of the same length that are lexicographically larger, which makes
//! `from_tensor` a triangular solve.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::freealg::{tt_exp, tt_log, FreeAlgError, TruncTensorElement, Word};
use crate::qlinalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeLieError {
    #[error("element is not in the Lie subspace; residual {residual}")]
    NotLie { residual: TruncTensorElement },
    #[error("Lie elements live in different bases: {0:?} vs {1:?}")]
    BasisMismatch((usize, usize), (usize, usize)),
    #[error("{0:?} is not a Lyndon word of the basis")]
    NotInBasis(Word),
    #[error(transparent)]
    Alg(#[from] FreeAlgError),
}

/// `true` if `w` is strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &Word) -> bool {
    let n = w.len();
    n > 0 && (1..n).all(|i| w.lex_cmp(&w.slice(i, n)).is_lt())
}

/// Lyndon words over `{1..t}` of length `1..=d` in graded length-lex order.
pub fn lyndon_words(t: usize, d: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if t == 0 || d == 0 {
        return out;
    }
    // Duval's generation in lexicographic order, letters 0-based.
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(Word::from_letters(&w.iter().map(|l| l + 1).collect::<Vec<_>>()));
        let m = w.len();
        while w.len() < d {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(t - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(l) => *l += 1,
            None => break,
        }
    }
    out.sort();
    out
}

/// Right standard factorization `(u, v)` of a Lyndon word of length at
/// least two.
pub fn standard_factorization(w: &Word) -> (Word, Word) {
    let n = w.len();
    assert!(n >= 2 && is_lyndon(w), "standard factorization of non-Lyndon {w:?}");
    let i = (1..n).find(|&i| is_lyndon(&w.slice(i, n))).expect("last letter is Lyndon");
    (w.slice(0, i), w.slice(i, n))
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`k` part of the free Lie algebra on `t`
/// generators, `(1/k) sum_{m | k} mu(k/m) t^m`.
pub fn witt_dim(t: usize, k: usize) -> u64 {
    assert!(k >= 1, "witt_dim needs k >= 1");
    let mut acc: i128 = 0;
    for m in 1..=k {
        if k % m == 0 {
            acc += mobius((k / m) as u64) as i128 * (t as i128).pow(m as u32);
        }
    }
    (acc / k as i128) as u64
}

/// Lyndon basis of `Lie_{<=d}(Q^t)` with tensor expansions.
pub struct LyndonBasis {
    alphabet: usize,
    cap: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    expansions: Vec<TruncTensorElement>,
    factors: Vec<Option<(usize, usize)>>,
}

impl LyndonBasis {
    pub fn new(t: usize, d: usize) -> Self {
        let words = lyndon_words(t, d);
        let index: HashMap<Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut expansions: Vec<TruncTensorElement> = Vec::with_capacity(words.len());
        let mut factors = Vec::with_capacity(words.len());
        for w in &words {
            if w.len() == 1 {
                expansions.push(TruncTensorElement::generator(d, t, w.letter_at(0)));
                factors.push(None);
            } else {
                // factors are shorter, so already expanded
                let (u, v) = standard_factorization(w);
                let (iu, iv) = (index[&u], index[&v]);
                let e = expansions[iu].commutator(&expansions[iv]).expect("same context");
                expansions.push(e);
                factors.push(Some((iu, iv)));
            }
        }
        LyndonBasis { alphabet: t, cap: d, words, index, expansions, factors }
    }

    /// Process-wide shared basis for `(t, d)`.
    pub fn shared(t: usize, d: usize) -> Arc<LyndonBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<LyndonBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().expect("basis cache").get(&(t, d)) {
            return b.clone();
        }
        let b = Arc::new(LyndonBasis::new(t, d));
        cache.lock().expect("basis cache").entry((t, d)).or_insert(b).clone()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn expansion(&self, i: usize) -> &TruncTensorElement {
        &self.expansions[i]
    }

    /// Indices of the standard factors of basis element `i`, `None` for a
    /// letter.
    pub fn factors(&self, i: usize) -> Option<(usize, usize)> {
        self.factors[i]
    }

    /// Standard bracketing of basis element `i`, e.g. `[a,[a,b]]`.
    pub fn bracketing(&self, i: usize) -> String {
        match self.factors[i] {
            None => self.words[i].to_alpha(),
            Some((u, v)) => format!("[{},{}]", self.bracketing(u), self.bracketing(v)),
        }
    }
}

impl fmt::Debug for LyndonBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LyndonBasis(t={}, d={}, {} words)", self.alphabet, self.cap, self.words.len())
    }
}

/// Element of `Lie_{<=d}(Q^t)` in Lyndon coordinates.
#[derive(Clone)]
pub struct LieElement {
    basis: Arc<LyndonBasis>,
    coords: BTreeMap<Word, Rational>,
}

impl PartialEq for LieElement {
    fn eq(&self, other: &Self) -> bool {
        self.context() == other.context() && self.coords == other.coords
    }
}

impl Eq for LieElement {}

impl LieElement {
    pub fn zero(basis: &Arc<LyndonBasis>) -> Self {
        LieElement { basis: basis.clone(), coords: BTreeMap::new() }
    }

    /// The generator `x_i`; zero when the cap is zero.
    pub fn generator(basis: &Arc<LyndonBasis>, i: usize) -> Self {
        Self::basis_element(basis, &Word::letter(i)).unwrap_or_else(|_| Self::zero(basis))
    }

    pub fn basis_element(basis: &Arc<LyndonBasis>, w: &Word) -> Result<Self, FreeLieError> {
        if basis.position(w).is_none() {
            return Err(FreeLieError::NotInBasis(w.clone()));
        }
        let mut coords = BTreeMap::new();
        coords.insert(w.clone(), Rational::one());
        Ok(LieElement { basis: basis.clone(), coords })
    }

    pub fn from_coords(
        basis: &Arc<LyndonBasis>,
        coords: impl IntoIterator<Item = (Word, Rational)>,
    ) -> Result<Self, FreeLieError> {
        let mut e = Self::zero(basis);
        for (w, c) in coords {
            if basis.position(&w).is_none() {
                return Err(FreeLieError::NotInBasis(w));
            }
            e.add_term(w, &c);
        }
        Ok(e)
    }

    pub fn basis(&self) -> &Arc<LyndonBasis> {
        &self.basis
    }

    /// `(alphabet, cap)`.
    pub fn context(&self) -> (usize, usize) {
        (self.basis.alphabet, self.basis.cap)
    }

    pub fn coords(&self) -> &BTreeMap<Word, Rational> {
        &self.coords
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.coords.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn add_term(&mut self, w: Word, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let x = self.coords.entry(w.clone()).or_insert_with(Rational::zero);
        *x += c;
        if x.is_zero() {
            self.coords.remove(&w);
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), FreeLieError> {
        if self.context() != other.context() {
            return Err(FreeLieError::BasisMismatch(self.context(), other.context()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FreeLieError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coords {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FreeLieError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.basis);
        for (w, x) in &self.coords {
            out.add_term(w.clone(), &(x * c));
        }
        out
    }

    /// Degree-`k` component.
    pub fn homogeneous(&self, k: usize) -> Self {
        LieElement {
            basis: self.basis.clone(),
            coords: self
                .coords
                .iter()
                .filter(|(w, _)| w.len() == k)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coordinates as a sparse vector indexed by basis position.
    pub fn to_sparse(&self) -> BTreeMap<usize, Rational> {
        self.coords
            .iter()
            .map(|(w, c)| (self.basis.position(w).expect("basis word"), c.clone()))
            .collect()
    }

    /// Inverse of [`LieElement::to_sparse`].
    pub fn from_sparse(basis: &Arc<LyndonBasis>, v: &BTreeMap<usize, Rational>) -> Self {
        let mut e = Self::zero(basis);
        for (&i, c) in v {
            e.add_term(basis.words[i].clone(), c);
        }
        e
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(w, c)| {
                let i = self.basis.position(w).expect("basis word");
                format!("{c}*{}", self.basis.bracketing(i))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lie<={}({}): {}", self.basis.cap, self.basis.alphabet, self)
    }
}

impl Serialize for LieElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coords.len()))?;
        for (w, c) in &self.coords {
            map.serialize_entry(w, c)?;
        }
        map.end()
    }
}

/// Expansion of a Lie element in `T^{<=d}(Q^t)`.
pub fn to_tensor(u: &LieElement) -> TruncTensorElement {
    let b = &u.basis;
    let mut out = TruncTensorElement::zero(b.cap, b.alphabet);
    for (w, c) in &u.coords {
        let e = b.expansion(b.position(w).expect("basis word"));
        out = out.add(&e.scale(c)).expect("same context");
    }
    out
}

/// Lyndon coordinates of a tensor lying in the Lie subspace.
pub fn from_tensor(
    basis: &Arc<LyndonBasis>,
    x: &TruncTensorElement,
) -> Result<LieElement, FreeLieError> {
    if (x.cap(), x.alphabet()) != (basis.cap, basis.alphabet) {
        return Err(FreeLieError::BasisMismatch(
            (x.alphabet(), x.cap()),
            (basis.alphabet, basis.cap),
        ));
    }
    let mut residual = x.clone();
    let mut out = LieElement::zero(basis);
    loop {
        let Some((w, c)) = residual.terms().next().map(|(w, c)| (w.clone(), c.clone())) else {
            break;
        };
        let Some(i) = basis.position(&w) else {
            return Err(FreeLieError::NotLie { residual });
        };
        residual = residual.sub(&basis.expansion(i).scale(&c))?;
        out.add_term(w, &c);
    }
    Ok(out)
}

/// `[u, v]`, computed as `uv - vu` in the tensor algebra.
pub fn bracket(u: &LieElement, v: &LieElement) -> Result<LieElement, FreeLieError> {
    u.check_same(v)?;
    let x = to_tensor(u).commutator(&to_tensor(v))?;
    from_tensor(&u.basis, &x)
}

/// Truncated Baker-Campbell-Hausdorff product `log(exp u exp v)`.
pub fn bch(u: &LieElement, v: &LieElement) -> Result<LieElement, FreeLieError> {
    u.check_same(v)?;
    let p = tt_exp(&to_tensor(u))?.mul(&tt_exp(&to_tensor(v))?)?;
    from_tensor(&u.basis, &tt_log(&p)?)
}

/// Image of `u` under the Lie morphism sending `x_i` to `images[i-1]`; the
/// images share one target basis.
pub fn lie_substitute(
    u: &LieElement,
    images: &[LieElement],
    target: &Arc<LyndonBasis>,
) -> Result<LieElement, FreeLieError> {
    let mut memo: HashMap<usize, LieElement> = HashMap::new();
    let mut out = LieElement::zero(target);
    for (w, c) in &u.coords {
        let i = u.basis.position(w).expect("basis word");
        let img = substitute_basis(&u.basis, i, images, target, &mut memo)?;
        out = out.add(&img.scale(c))?;
    }
    Ok(out)
}

/// Image of basis element `i` of `source` under the generator assignment,
/// memoized per basis index.
pub fn substitute_basis(
    source: &LyndonBasis,
    i: usize,
    images: &[LieElement],
    target: &Arc<LyndonBasis>,
    memo: &mut HashMap<usize, LieElement>,
) -> Result<LieElement, FreeLieError> {
    if let Some(e) = memo.get(&i) {
        return Ok(e.clone());
    }
    let e = match source.factors(i) {
        None => {
            let l = source.words()[i].letter_at(0);
            let img = images.get(l - 1).ok_or(FreeAlgError::LetterOutOfRange {
                letter: l,
                alphabet: images.len(),
            })?;
            if img.context() != (target.alphabet, target.cap) {
                return Err(FreeLieError::BasisMismatch(
                    img.context(),
                    (target.alphabet, target.cap),
                ));
            }
            img.clone()
        }
        Some((a, b)) => {
            let ea = substitute_basis(source, a, images, target, memo)?;
            let eb = substitute_basis(source, b, images, target, memo)?;
            bracket(&ea, &eb)?
        }
    };
    memo.insert(i, e.clone());
    Ok(e)
}

/// Images of the generators under the Lie-to-Passi embedding: `x_i` goes to
/// `log(1 + x_i)`.
fn log_generators(cap: usize, t: usize) -> Vec<TruncTensorElement> {
    (1..=t)
        .map(|i| {
            let g = TruncTensorElement::unit(cap, t)
                .add(&TruncTensorElement::generator(cap, t, i))
                .expect("same context");
            tt_log(&g).expect("constant one")
        })
        .collect()
}

/// Embedding of `Lie_{<=d}(Q^t)` into `T^{<=d}(Q^t)` in augmentation
/// coordinates, where `x_i` stands for `[a_i] - [e]`: the Lie morphism
/// sending the generator `x_i` to `log(1 + x_i)`.
pub fn to_passi_tensor(u: &LieElement) -> TruncTensorElement {
    let (t, d) = u.context();
    let x = to_tensor(u);
    if t == 0 {
        return x;
    }
    x.substitute(&log_generators(d, t)).expect("letters in range")
}

/// Inverse of [`to_passi_tensor`] on its image.
pub fn from_passi_tensor(
    basis: &Arc<LyndonBasis>,
    x: &TruncTensorElement,
) -> Result<LieElement, FreeLieError> {
    let (t, d) = (basis.alphabet, basis.cap);
    if t == 0 {
        return from_tensor(basis, x);
    }
    let images: Vec<TruncTensorElement> = (1..=t)
        .map(|i| {
            let e = tt_exp(&TruncTensorElement::generator(d, t, i)).expect("constant zero");
            e.sub(&TruncTensorElement::unit(d, t)).expect("same context")
        })
        .collect();
    from_tensor(basis, &x.substitute(&images)?)
}

/// `sum_{k=1}^d witt_dim(t, k)`.
pub fn lie_dim(t: usize, d: usize) -> u64 {
    (1..=d).map(|k| witt_dim(t, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn w(s: &str) -> Word {
        Word::from_letters(&s.bytes().map(|c| (c - b'a' + 1) as usize).collect::<Vec<_>>())
    }

    /// Rotation-minimal aperiodic words by brute force.
    fn lyndon_brute(t: usize, d: usize) -> Vec<Word> {
        let mut out: Vec<Word> = crate::freealg::words_up_to(t, d)
            .into_iter()
            .filter(|x| {
                let n = x.len();
                n > 0
                    && (1..n).all(|r| {
                        let rot = x.slice(r, n).concat(&x.slice(0, r));
                        x.lex_cmp(&rot).is_lt()
                    })
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn lyndon_examples() {
        assert_eq!(lyndon_words(2, 2), vec![w("a"), w("b"), w("ab")]);
        assert_eq!(lyndon_words(1, 3), vec![w("a")]);
        let counts: Vec<usize> =
            (1..=4).map(|k| lyndon_words(2, 4).iter().filter(|x| x.len() == k).count()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3]);
        for t in 0..=3 {
            for d in 0..=5 {
                assert_eq!(lyndon_words(t, d), lyndon_brute(t, d), "t={t} d={d}");
            }
        }
    }

    #[test]
    fn witt_examples() {
        assert_eq!(witt_dim(2, 1), 2);
        assert_eq!(witt_dim(2, 2), 1);
        assert_eq!(witt_dim(3, 3), 8);
        for t in 0..=3 {
            for d in 1..=6 {
                assert_eq!(lyndon_words(t, d).len() as u64, lie_dim(t, d));
            }
        }
    }

    #[test]
    fn factorization_and_triangularity() {
        assert_eq!(standard_factorization(&w("aab")), (w("a"), w("ab")));
        assert_eq!(standard_factorization(&w("abb")), (w("ab"), w("b")));
        assert_eq!(standard_factorization(&w("aabab")), (w("aab"), w("ab")));
        let b = LyndonBasis::new(3, 5);
        for (i, word) in b.words().iter().enumerate() {
            let e = b.expansion(i);
            assert!(e.coeff(word).is_one());
            for (v, _) in e.terms() {
                assert_eq!(v.len(), word.len());
                assert!(word.lex_cmp(v).is_le());
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let b = LyndonBasis::shared(2, 2);
        let ab = LieElement::basis_element(&b, &w("ab")).unwrap();
        let expected = TruncTensorElement::from_terms(
            2,
            2,
            [(w("ab"), q(1, 1)), (w("ba"), q(-1, 1))],
        );
        assert_eq!(to_tensor(&ab), expected);
        let bad = TruncTensorElement::monomial(2, 2, w("ab"), q(1, 1));
        match from_tensor(&b, &bad) {
            Err(FreeLieError::NotLie { residual }) => assert!(!residual.is_zero()),
            other => panic!("expected NotLie, got {other:?}"),
        }
        assert!(from_tensor(&b, &TruncTensorElement::zero(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn bracket_examples() {
        let b = LyndonBasis::shared(3, 3);
        let [x, y, z] = [1, 2, 3].map(|i| LieElement::generator(&b, i));
        assert!(bracket(&x, &x).unwrap().is_zero());
        assert_eq!(bracket(&x, &y).unwrap(), LieElement::basis_element(&b, &w("ab")).unwrap());
        let j = bracket(&bracket(&x, &y).unwrap(), &z)
            .unwrap()
            .add(&bracket(&bracket(&y, &z).unwrap(), &x).unwrap())
            .unwrap()
            .add(&bracket(&bracket(&z, &x).unwrap(), &y).unwrap())
            .unwrap();
        assert!(j.is_zero());
    }

    #[test]
    fn bch_examples() {
        let b1 = LyndonBasis::shared(2, 1);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b1, i));
        assert_eq!(bch(&x, &y).unwrap(), x.add(&y).unwrap());

        let b2 = LyndonBasis::shared(2, 2);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b2, i));
        let half_xy = bracket(&x, &y).unwrap().scale(&q(1, 2));
        assert_eq!(bch(&x, &y).unwrap(), x.add(&y).unwrap().add(&half_xy).unwrap());
        assert_eq!(bch(&x, &LieElement::zero(&b2)).unwrap(), x);
    }

    #[test]
    fn bch_degree_three_coefficients() {
        // log(e^x e^y) = x + y + [x,y]/2 + [x,[x,y]]/12 + [y,[y,x]]/12
        let b = LyndonBasis::shared(2, 3);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b, i));
        let xy = bracket(&x, &y).unwrap();
        let expected = x
            .add(&y)
            .unwrap()
            .add(&xy.scale(&q(1, 2)))
            .unwrap()
            .add(&bracket(&x, &xy).unwrap().scale(&q(1, 12)))
            .unwrap()
            .add(&bracket(&y, &xy.neg()).unwrap().scale(&q(1, 12)))
            .unwrap();
        assert_eq!(bch(&x, &y).unwrap(), expected);
    }

    #[test]
    fn passi_embedding_round_trips() {
        let b = LyndonBasis::shared(2, 4);
        for i in 0..b.len() {
            let e = LieElement::from_sparse(&b, &[(i, q(3, 2))].into_iter().collect());
            let x = to_passi_tensor(&e);
            assert_eq!(from_passi_tensor(&b, &x).unwrap(), e);
        }
    }

    #[test]
    fn json_form() {
        let b = LyndonBasis::shared(2, 2);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b, i));
        let s = serde_json::to_string(&bch(&x, &y).unwrap()).unwrap();
        assert_eq!(s, r#"{"x1":"1","x2":"1","x1 x2":"1/2"}"#);
    }
}
