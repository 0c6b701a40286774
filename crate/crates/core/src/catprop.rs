//! The PROP `Cat Lie` and dimension counts for `Cat Ass^u`.
//!
//! A basis element of `Cat Lie(s, t)` is a surjection `f: {1..s} -> {1..t}`
//! together with, for each target `i`, a multilinear Lyndon word on the
//! letters of the fiber `f^{-1}(i)` (global letter numbering). A multilinear
//! word is Lyndon iff it starts with its least letter, so a fiber of size `k`
//! contributes `(k-1)!` brackets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::freealg::{TruncTensorElement, Word};
use crate::freelie::{is_lyndon, standard_factorization};
use crate::grfun::{cross_effect, FunctorInstance, FunctorKind, GrError};
use crate::qlinalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatPropError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid basis element: {0}")]
    Invalid(String),
    #[error(transparent)]
    Gr(#[from] GrError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CatLieBasisElement {
    /// `map[i-1] = f(i)`, 1-based.
    pub map: Vec<usize>,
    /// One Lyndon word per target, over the global letters of its fiber.
    pub brackets: Vec<Word>,
}

impl CatLieBasisElement {
    pub fn new(map: Vec<usize>, brackets: Vec<Word>) -> Result<Self, CatPropError> {
        let t = brackets.len();
        for i in 1..=t {
            let mut fiber: Vec<usize> =
                (1..=map.len()).filter(|&j| map[j - 1] == i).collect();
            let mut letters: Vec<usize> = brackets[i - 1].letters().collect();
            letters.sort_unstable();
            fiber.sort_unstable();
            if fiber.is_empty() || fiber != letters || !is_lyndon(&brackets[i - 1]) {
                return Err(CatPropError::Invalid(format!(
                    "fiber {i} is {fiber:?} but bracket is {:?}",
                    brackets[i - 1]
                )));
            }
        }
        if map.iter().any(|&m| m == 0 || m > t) {
            return Err(CatPropError::Invalid(format!("map {map:?} leaves 1..{t}")));
        }
        Ok(CatLieBasisElement { map, brackets })
    }

    /// The permutation `i -> perm[i-1]` (1-based) in `Cat Lie(n, n)`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut brackets = vec![Word::empty(); n];
        for (i, &p) in perm.iter().enumerate() {
            brackets[p - 1] = Word::letter(i + 1);
        }
        CatLieBasisElement { map: perm.to_vec(), brackets }
    }

    pub fn identity(n: usize) -> Self {
        Self::permutation(&(1..=n).collect::<Vec<_>>())
    }

    /// The bracket `[x1, x2]` in `Cat Lie(2, 1)`.
    pub fn bracket() -> Self {
        CatLieBasisElement { map: vec![1, 1], brackets: vec![Word::from_letters(&[1, 2])] }
    }

    pub fn source(&self) -> usize {
        self.map.len()
    }

    pub fn target(&self) -> usize {
        self.brackets.len()
    }
}

impl fmt::Debug for CatLieBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let br: Vec<String> = self.brackets.iter().map(|w| format!("({w})")).collect();
        write!(f, "{:?}{}", self.map, br.join(""))
    }
}

/// Multilinear Lyndon words on the given sorted letters.
fn multilinear_lyndon(letters: &[usize]) -> Vec<Word> {
    let Some((&first, rest)) = letters.split_first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    permutations(rest, &mut |p| {
        let mut v = vec![first];
        v.extend_from_slice(p);
        out.push(Word::from_letters(&v));
    });
    out.sort();
    out
}

/// Calls `f` on every permutation of `items`, in lexicographic order of
/// positions.
pub(crate) fn permutations(items: &[usize], f: &mut impl FnMut(&[usize])) {
    fn go(items: &[usize], used: &mut Vec<bool>, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == items.len() {
            f(cur);
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                cur.push(items[i]);
                go(items, used, cur, f);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(items, &mut vec![false; items.len()], &mut Vec::new(), f);
}

/// All maps `{1..s} -> {1..t}` as 1-based vectors, lexicographically.
pub(crate) fn all_maps(s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        let mut next = Vec::with_capacity(out.len() * t);
        for m in &out {
            for v in 1..=t {
                let mut m2 = m.clone();
                m2.push(v);
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

fn fibers(map: &[usize], t: usize) -> Vec<Vec<usize>> {
    let mut fib = vec![Vec::new(); t];
    for (i, &m) in map.iter().enumerate() {
        fib[m - 1].push(i + 1);
    }
    fib
}

fn enumerate_basis(s: usize, t: usize) -> Vec<CatLieBasisElement> {
    let mut out = Vec::new();
    for map in all_maps(s, t) {
        let fib = fibers(&map, t);
        if fib.iter().any(Vec::is_empty) {
            continue;
        }
        let choices: Vec<Vec<Word>> = fib.iter().map(|f| multilinear_lyndon(f)).collect();
        let mut brackets: Vec<Vec<Word>> = vec![Vec::new()];
        for c in &choices {
            brackets = brackets
                .into_iter()
                .flat_map(|b| {
                    c.iter().map(move |w| {
                        let mut b2 = b.clone();
                        b2.push(w.clone());
                        b2
                    })
                })
                .collect();
        }
        for b in brackets {
            out.push(CatLieBasisElement { map: map.clone(), brackets: b });
        }
    }
    out.sort();
    out
}

/// Basis of `Cat Lie(s, t)`, cached per `(s, t)`.
pub fn catlie_basis(s: usize, t: usize) -> Arc<Vec<CatLieBasisElement>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<CatLieBasisElement>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().expect("catlie cache").get(&(s, t)) {
        return b.clone();
    }
    let b = Arc::new(enumerate_basis(s, t));
    cache.lock().expect("catlie cache").entry((s, t)).or_insert(b).clone()
}

/// `dim Cat Lie(s, t)`, by basis enumeration.
pub fn catlie_dim(s: usize, t: usize) -> usize {
    catlie_basis(s, t).len()
}

/// `t! * c(s, t)` with `c` the unsigned Stirling numbers of the first kind:
/// a surjection with a cyclic order on each fiber is a permutation with `t`
/// labelled cycles.
pub fn catlie_dim_formula(s: usize, t: usize) -> u128 {
    let mut c = vec![vec![0u128; s + 1]; s + 1];
    c[0][0] = 1;
    for n in 1..=s {
        for k in 1..=n {
            c[n][k] = c[n - 1][k - 1] + (n as u128 - 1) * c[n - 1][k];
        }
    }
    if t > s {
        return 0;
    }
    (1..=t as u128).product::<u128>() * c[s][t]
}

/// A linear combination of basis elements of `Cat Lie(s, t)`.
#[derive(Clone, PartialEq, Eq)]
pub struct CatLieElement {
    s: usize,
    t: usize,
    coeffs: BTreeMap<CatLieBasisElement, Rational>,
}

impl CatLieElement {
    pub fn zero(s: usize, t: usize) -> Self {
        CatLieElement { s, t, coeffs: BTreeMap::new() }
    }

    pub fn basis(b: CatLieBasisElement) -> Self {
        let (s, t) = (b.source(), b.target());
        let mut coeffs = BTreeMap::new();
        coeffs.insert(b, Rational::one());
        CatLieElement { s, t, coeffs }
    }

    pub fn source(&self) -> usize {
        self.s
    }

    pub fn target(&self) -> usize {
        self.t
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<CatLieBasisElement, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, b: &CatLieBasisElement) -> Rational {
        self.coeffs.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, b: CatLieBasisElement, c: &Rational) {
        debug_assert_eq!((b.source(), b.target()), (self.s, self.t));
        if c.is_zero() {
            return;
        }
        let x = self.coeffs.entry(b.clone()).or_insert_with(Rational::zero);
        *x += c;
        if x.is_zero() {
            self.coeffs.remove(&b);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CatPropError> {
        if (self.s, self.t) != (other.s, other.t) {
            return Err(CatPropError::ArityMismatch { expected: self.s, found: other.s });
        }
        let mut out = self.clone();
        for (b, c) in &other.coeffs {
            out.add_term(b.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.s, self.t);
        for (b, x) in &self.coeffs {
            out.add_term(b.clone(), &(x * c));
        }
        out
    }
}

impl fmt::Debug for CatLieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CatLie({},{})[", self.s, self.t)?;
        for (i, (b, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{b:?}")?;
        }
        write!(f, "]")
    }
}

/// Tensor expansions of Lyndon brackets with memoization.
struct Expander {
    cap: usize,
    alphabet: usize,
    memo: HashMap<Word, TruncTensorElement>,
}

impl Expander {
    fn new(cap: usize, alphabet: usize) -> Self {
        Expander { cap, alphabet, memo: HashMap::new() }
    }

    fn expand(&mut self, w: &Word) -> TruncTensorElement {
        if let Some(e) = self.memo.get(w) {
            return e.clone();
        }
        let e = if w.len() == 1 {
            TruncTensorElement::generator(self.cap, self.alphabet, w.letter_at(0))
        } else {
            let (u, v) = standard_factorization(w);
            let (eu, ev) = (self.expand(&u), self.expand(&v));
            eu.commutator(&ev).expect("same context")
        };
        self.memo.insert(w.clone(), e.clone());
        e
    }

    /// Lyndon coordinates of a tensor in the Lie span; triangular.
    fn decompose(&mut self, x: &TruncTensorElement) -> Vec<(Word, Rational)> {
        let mut residual = x.clone();
        let mut out = Vec::new();
        loop {
            let Some((w, c)) = residual.terms().next().map(|(w, c)| (w.clone(), c.clone())) else {
                break;
            };
            assert!(is_lyndon(&w), "substituted bracket left the Lie span at {w:?}");
            residual = residual.sub(&self.expand(&w).scale(&c)).expect("same context");
            out.push((w, c));
        }
        out
    }
}

/// Composite of basis elements `g . f`.
fn compose_basis(
    g: &CatLieBasisElement,
    f: &CatLieBasisElement,
    ex: &mut Expander,
) -> CatLieElement {
    let (s, u) = (f.source(), g.target());
    let map: Vec<usize> = f.map.iter().map(|&j| g.map[j - 1]).collect();
    let images: Vec<TruncTensorElement> = f.brackets.iter().map(|b| ex.expand(b)).collect();
    // per target: list of (Lyndon word, coefficient)
    let mut per_target: Vec<Vec<(Word, Rational)>> = Vec::with_capacity(u);
    for gb in &g.brackets {
        let gt = Expander::new(gb.len(), f.target()).expand(gb);
        let sub = gt.embed(s, f.target()).substitute(&images).expect("letters in range");
        per_target.push(ex.decompose(&sub));
    }
    let mut out = CatLieElement::zero(s, u);
    let mut acc: Vec<(Vec<Word>, Rational)> = vec![(Vec::new(), Rational::one())];
    for terms in per_target {
        let mut next = Vec::new();
        for (prefix, c) in &acc {
            for (w, x) in &terms {
                let mut p = prefix.clone();
                p.push(w.clone());
                next.push((p, c * x));
            }
        }
        acc = next;
    }
    for (brackets, c) in acc {
        out.add_term(CatLieBasisElement { map: map.clone(), brackets }, &c);
    }
    out
}

/// Composite `g . f` of `f in Cat Lie(s, t)` and `g in Cat Lie(t, u)`.
pub fn catlie_compose(g: &CatLieElement, f: &CatLieElement) -> Result<CatLieElement, CatPropError> {
    if g.s != f.t {
        return Err(CatPropError::ArityMismatch { expected: f.t, found: g.s });
    }
    let mut ex = Expander::new(f.s, f.s);
    let mut out = CatLieElement::zero(f.s, g.t);
    for (gb, gc) in &g.coeffs {
        for (fb, fc) in &f.coeffs {
            let c = gc * fc;
            for (b, x) in compose_basis(gb, fb, &mut ex).coeffs {
                out.add_term(b, &(&x * &c));
            }
        }
    }
    Ok(out)
}

/// Image in `Cat^{<=d} Lie`: unchanged when `s <= d`, zero otherwise.
pub fn catlie_truncate(x: &CatLieElement, d: usize) -> CatLieElement {
    if x.s <= d {
        x.clone()
    } else {
        CatLieElement::zero(x.s, x.t)
    }
}

/// `dim Cat Ass^u(s, t)` by enumerating maps with a linear order on each
/// fiber.
pub fn catass_dim(s: usize, t: usize) -> u128 {
    all_maps(s, t)
        .iter()
        .map(|m| {
            fibers(m, t)
                .iter()
                .map(|f| (1..=f.len() as u128).product::<u128>())
                .product::<u128>()
        })
        .sum()
}

/// Rising factorial `t (t+1) ... (t+s-1)`.
pub fn catass_dim_formula(s: usize, t: usize) -> u128 {
    (0..s as u128).map(|i| t as u128 + i).product()
}

/// `dim cr_s` of `Malcev(d)^{(x)t}` truncated at total degree `s`,
/// evaluated at `Free(s)`; `0` when `d < s`.
pub fn hom_via_cross_effect(s: usize, t: usize, d: usize) -> Result<usize, CatPropError> {
    if d < s {
        log::warn!("hom_via_cross_effect: level {d} is below arity {s}; returning 0");
        return Ok(0);
    }
    let f = FunctorInstance::new(FunctorKind::power(FunctorKind::Malcev(d), t, s));
    Ok(cross_effect(&f, s)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn w(s: &str) -> Word {
        Word::from_letters(&s.bytes().map(|c| (c - b'0') as usize).collect::<Vec<_>>())
    }

    #[test]
    fn dim_examples() {
        assert_eq!(catlie_dim(1, 1), 1);
        assert_eq!(catlie_dim(2, 3), 0);
        assert_eq!(catlie_dim(3, 2), 6);
        for s in 0..=5 {
            for t in 0..=5 {
                assert_eq!(catlie_dim(s, t) as u128, catlie_dim_formula(s, t), "({s},{t})");
            }
            if s >= 1 {
                assert_eq!(catlie_dim(s, 1) as u128, (1..s as u128).product::<u128>());
            }
        }
        assert_eq!(catlie_dim(0, 0), 1);
    }

    #[test]
    fn catass_examples() {
        assert_eq!(catass_dim(1, 4), 4);
        assert_eq!(catass_dim(2, 2), 6);
        assert_eq!(catass_dim(3, 2), 24);
        for s in 0..=5 {
            for t in 0..=5 {
                assert_eq!(catass_dim(s, t), catass_dim_formula(s, t));
            }
        }
    }

    #[test]
    fn bracket_composition_is_jacobi_expanded() {
        let beta = CatLieElement::basis(CatLieBasisElement::bracket());
        let beta_id = CatLieElement::basis(
            CatLieBasisElement::new(vec![1, 1, 2], vec![w("12"), w("3")]).unwrap(),
        );
        let got = catlie_compose(&beta, &beta_id).unwrap();
        // [[1,2],3] = P_123 + P_132 with P_123 = [1,[2,3]], P_132 = [[1,3],2]
        let mut expected = CatLieElement::zero(3, 1);
        expected.add_term(CatLieBasisElement::new(vec![1, 1, 1], vec![w("123")]).unwrap(), &q(1, 1));
        expected.add_term(CatLieBasisElement::new(vec![1, 1, 1], vec![w("132")]).unwrap(), &q(1, 1));
        assert_eq!(got, expected);
    }

    #[test]
    fn permutations_compose_as_permutations() {
        let mut perms = Vec::new();
        permutations(&[1, 2, 3], &mut |p| perms.push(p.to_vec()));
        for a in &perms {
            for b in &perms {
                let pa = CatLieElement::basis(CatLieBasisElement::permutation(a));
                let pb = CatLieElement::basis(CatLieBasisElement::permutation(b));
                let ab: Vec<usize> = b.iter().map(|&i| a[i - 1]).collect();
                assert_eq!(
                    catlie_compose(&pa, &pb).unwrap(),
                    CatLieElement::basis(CatLieBasisElement::permutation(&ab))
                );
            }
        }
    }

    #[test]
    fn unit_laws() {
        for (s, t) in [(3, 2), (4, 2), (3, 1), (4, 3)] {
            for b in catlie_basis(s, t).iter() {
                let x = CatLieElement::basis(b.clone());
                let l = CatLieElement::basis(CatLieBasisElement::identity(t));
                let r = CatLieElement::basis(CatLieBasisElement::identity(s));
                assert_eq!(catlie_compose(&l, &x).unwrap(), x);
                assert_eq!(catlie_compose(&x, &r).unwrap(), x);
            }
        }
    }

    #[test]
    fn truncation_examples() {
        let b = CatLieElement::basis(catlie_basis(3, 2)[0].clone());
        assert_eq!(catlie_truncate(&b, 3), b);
        assert!(catlie_truncate(&b, 2).is_zero());
        let g = CatLieElement::basis(CatLieBasisElement::bracket());
        for d in 0..=4 {
            let lhs = catlie_truncate(&catlie_compose(&g, &b).unwrap(), d);
            let rhs = catlie_compose(&catlie_truncate(&g, d), &catlie_truncate(&b, d)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn hom_via_cross_effect_examples() {
        assert_eq!(hom_via_cross_effect(1, 1, 1).unwrap(), 1);
        assert_eq!(hom_via_cross_effect(2, 1, 2).unwrap(), 1);
        assert_eq!(hom_via_cross_effect(3, 2, 3).unwrap(), 6);
        assert_eq!(hom_via_cross_effect(3, 2, 2).unwrap(), 0);
    }

    #[test]
    fn json_form() {
        let b = CatLieBasisElement::new(vec![1, 1, 2], vec![w("12"), w("3")]).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"map":[1,1,2],"brackets":["x1 x2","x3"]}"#);
        let back: CatLieBasisElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn invalid_elements_rejected() {
        assert!(CatLieBasisElement::new(vec![1, 1], vec![w("21")]).is_err());
        assert!(CatLieBasisElement::new(vec![1, 1], vec![w("1")]).is_err());
        assert!(CatLieBasisElement::new(vec![1, 3], vec![w("1"), w("2")]).is_err());
    }
}
