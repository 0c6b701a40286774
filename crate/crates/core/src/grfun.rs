//! The category `gr` of finitely generated free groups and the functors on
//! it that the rest of the crate evaluates: Passi quotients, Mal'cev Lie
//! algebras, abelianization and total-degree-truncated tensor powers.
//!
//! Action matrices have one row per target basis element and one column per
//! source basis element, so `action(g . f) = action(g) * action(f)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::freealg::{
    expand_group_word, graded_index, tt_exp, words_up_to, FreeAlgError, GroupWord, Syllable,
    TruncTensorElement, Word,
};
use crate::freelie::{bch, lyndon_words, substitute_basis, FreeLieError, LieElement, LyndonBasis};
use crate::qlinalg::{
    joint_kernel_dim, IndexedBasis, LinalgError, Rational, SparseMatrix, SparseVec, Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("letter {letter} outside target rank {rank}")]
    LetterOutOfRange { letter: usize, rank: usize },
    #[error("cannot parse morphism {0:?}")]
    Parse(String),
    #[error(transparent)]
    Lie(#[from] FreeLieError),
    #[error(transparent)]
    Alg(#[from] FreeAlgError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Morphism `Free(s) -> Free(t)` given by the images of the generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrMorphism {
    source: usize,
    target: usize,
    images: Vec<GroupWord>,
}

impl GrMorphism {
    pub fn new(target: usize, images: Vec<GroupWord>) -> Result<Self, GrError> {
        for w in &images {
            if w.max_letter() > target {
                return Err(GrError::LetterOutOfRange { letter: w.max_letter(), rank: target });
            }
        }
        Ok(GrMorphism { source: images.len(), target, images })
    }

    pub fn identity(n: usize) -> Self {
        GrMorphism { source: n, target: n, images: (1..=n).map(GroupWord::generator).collect() }
    }

    /// `a -> a^{-1}` on `Free(1)`.
    pub fn inversion() -> Self {
        GrMorphism { source: 1, target: 1, images: vec![GroupWord::generator(1).inverse()] }
    }

    /// `a -> a_1 a_2`, from `Free(1)` to `Free(2)`.
    pub fn codiagonal() -> Self {
        GrMorphism {
            source: 1,
            target: 2,
            images: vec![GroupWord::generator(1).mul(&GroupWord::generator(2))],
        }
    }

    /// Every generator to the identity.
    pub fn trivial(s: usize, t: usize) -> Self {
        GrMorphism { source: s, target: t, images: vec![GroupWord::identity(); s] }
    }

    /// `Free(n) -> Free(n-1)` killing generator `i` (1-based) and
    /// renumbering the later ones.
    pub fn kill_generator(n: usize, i: usize) -> Self {
        assert!(1 <= i && i <= n);
        let images = (1..=n)
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => GroupWord::generator(j),
                std::cmp::Ordering::Equal => GroupWord::identity(),
                std::cmp::Ordering::Greater => GroupWord::generator(j - 1),
            })
            .collect();
        GrMorphism { source: n, target: n - 1, images }
    }

    /// Generator `i+1` goes to generator `perm[i]+1`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        GrMorphism {
            source: n,
            target: n,
            images: perm.iter().map(|&p| GroupWord::generator(p + 1)).collect(),
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    /// Parses `"a->ab; b->B"` with the target rank taken as the largest
    /// letter used, or `target` when given.
    pub fn parse(s: &str, target: Option<usize>) -> Result<Self, GrError> {
        let err = || GrError::Parse(s.to_string());
        let mut images = Vec::new();
        for (k, clause) in s.split(';').map(str::trim).filter(|c| !c.is_empty()).enumerate() {
            let (lhs, rhs) = clause.split_once("->").ok_or_else(err)?;
            let lhs = lhs.trim();
            let expected = (b'a' + k as u8) as char;
            if lhs.len() != 1 || !lhs.starts_with(expected) {
                return Err(err());
            }
            images.push(rhs.parse::<GroupWord>().map_err(|_| err())?);
        }
        let used = images.iter().map(GroupWord::max_letter).max().unwrap_or(0);
        GrMorphism::new(target.unwrap_or(used), images)
    }
}

impl fmt::Display for GrMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", (b'a' + i as u8) as char, w))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for GrMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Free({}) -> Free({}): {}", self.source, self.target, self)
    }
}

impl FromStr for GrMorphism {
    type Err = GrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GrMorphism::parse(s, None)
    }
}

/// `g . f`: substitutes the images of `g` into those of `f`.
pub fn compose_gr(g: &GrMorphism, f: &GrMorphism) -> Result<GrMorphism, GrError> {
    if g.source != f.target {
        return Err(GrError::RankMismatch { expected: f.target, found: g.source });
    }
    let images =
        f.images.iter().map(|w| w.substitute(&g.images).expect("letters in range")).collect();
    Ok(GrMorphism { source: f.source, target: g.target, images })
}

/// Logarithm of a group word in `Lie_{<=d}(Q^t)`, by iterated BCH over its
/// syllables.
pub fn word_log(w: &GroupWord, d: usize, t: usize) -> Result<LieElement, GrError> {
    let basis = LyndonBasis::shared(t, d);
    let mut acc = LieElement::zero(&basis);
    for s in w.syllables() {
        if s.letter == 0 || s.letter > t {
            return Err(GrError::LetterOutOfRange { letter: s.letter, rank: t });
        }
        let x = LieElement::generator(&basis, s.letter);
        acc = bch(&acc, &if s.inverse { x.neg() } else { x })?;
    }
    Ok(acc)
}

/// Expansion of a group word in exponential coordinates: a generator goes
/// to `exp(x)` and its inverse to `exp(-x)`.
pub fn exp_expand_group_word(
    w: &GroupWord,
    d: usize,
    t: usize,
) -> Result<TruncTensorElement, GrError> {
    let mut out = TruncTensorElement::unit(d, t);
    for &Syllable { letter, inverse } in w.syllables() {
        if letter == 0 || letter > t {
            return Err(GrError::LetterOutOfRange { letter, rank: t });
        }
        let x = TruncTensorElement::generator(d, t, letter);
        let x = if inverse { x.scale(&Rational::from(-1)) } else { x };
        out = out.mul(&tt_exp(&x)?)?;
    }
    Ok(out)
}

/// The built-in functors on `gr`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctorKind {
    /// `Q[G] / I^{d+1}`, modeled on free groups by `T^{<=d}`.
    Passi(usize),
    /// Primitives of the Passi quotient, modeled by `Lie_{<=d}`.
    Malcev(usize),
    /// `G_ab (x) Q`.
    Abelianization,
    /// Tensor product of the factors, truncated to total degree `<= cap`.
    TruncTensorPower { factors: Vec<FunctorKind>, cap: usize },
}

impl FunctorKind {
    /// The constant functor `Q`.
    pub fn constant() -> Self {
        FunctorKind::Passi(0)
    }

    pub fn power(factor: FunctorKind, copies: usize, cap: usize) -> Self {
        FunctorKind::TruncTensorPower { factors: vec![factor; copies], cap }
    }
}

impl fmt::Display for FunctorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorKind::Passi(d) => write!(f, "Passi({d})"),
            FunctorKind::Malcev(d) => write!(f, "Malcev({d})"),
            FunctorKind::Abelianization => write!(f, "Abelianization"),
            FunctorKind::TruncTensorPower { factors, cap } => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "({})<={cap}", parts.join(" (x) "))
            }
        }
    }
}

/// Basis of a functor value at `Free(n)`.
///
/// Keys are concatenations of the factor keys; each basis element has a
/// degree on the word filtration.
#[derive(Debug, Clone)]
pub struct ValueBasis {
    keys: IndexedBasis<Vec<Word>>,
    degrees: Vec<usize>,
    tuples: Vec<Vec<usize>>,
    tuple_index: HashMap<Vec<usize>, usize>,
}

impl ValueBasis {
    fn atomic(keys: Vec<Vec<Word>>, degrees: Vec<usize>) -> Self {
        ValueBasis {
            keys: IndexedBasis::new(keys).expect("distinct keys"),
            degrees,
            tuples: Vec::new(),
            tuple_index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &IndexedBasis<Vec<Word>> {
        &self.keys
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// For a tensor power: the factor basis indices of element `i`.
    pub fn tuple(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }

    /// Inverse of [`ValueBasis::tuple`].
    pub fn tuple_position(&self, tuple: &[usize]) -> Option<usize> {
        self.tuple_index.get(tuple).copied()
    }
}

/// A functor together with a cache of its value bases.
pub struct FunctorInstance {
    kind: FunctorKind,
    bases: Mutex<HashMap<usize, Arc<ValueBasis>>>,
    factors: Vec<FunctorInstance>,
}

impl fmt::Debug for FunctorInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctorInstance({})", self.kind)
    }
}

impl FunctorInstance {
    pub fn new(kind: FunctorKind) -> Self {
        let factors = match &kind {
            FunctorKind::TruncTensorPower { factors, .. } => {
                factors.iter().cloned().map(FunctorInstance::new).collect()
            }
            _ => Vec::new(),
        };
        FunctorInstance { kind, bases: Mutex::new(HashMap::new()), factors }
    }

    pub fn kind(&self) -> &FunctorKind {
        &self.kind
    }

    pub fn dim(&self, n: usize) -> usize {
        self.value_basis(n).len()
    }

    /// Basis of the value at `Free(n)`.
    pub fn value_basis(&self, n: usize) -> Arc<ValueBasis> {
        if let Some(b) = self.bases.lock().expect("basis cache").get(&n) {
            return b.clone();
        }
        let b = Arc::new(self.build_basis(n));
        self.bases.lock().expect("basis cache").entry(n).or_insert(b).clone()
    }

    fn build_basis(&self, n: usize) -> ValueBasis {
        match &self.kind {
            FunctorKind::Passi(d) => {
                let ws = words_up_to(n, *d);
                let degrees = ws.iter().map(Word::len).collect();
                ValueBasis::atomic(ws.into_iter().map(|w| vec![w]).collect(), degrees)
            }
            FunctorKind::Malcev(d) => {
                let ws = lyndon_words(n, *d);
                let degrees = ws.iter().map(Word::len).collect();
                ValueBasis::atomic(ws.into_iter().map(|w| vec![w]).collect(), degrees)
            }
            FunctorKind::Abelianization => ValueBasis::atomic(
                (1..=n).map(|i| vec![Word::letter(i)]).collect(),
                vec![1; n],
            ),
            FunctorKind::TruncTensorPower { cap, .. } => {
                let fbs: Vec<Arc<ValueBasis>> =
                    self.factors.iter().map(|f| f.value_basis(n)).collect();
                let mut tuples = Vec::new();
                power_tuples(&fbs, *cap, &mut Vec::new(), 0, &mut tuples);
                let keys: Vec<Vec<Word>> = tuples
                    .iter()
                    .map(|tu| {
                        tu.iter()
                            .zip(&fbs)
                            .flat_map(|(&i, b)| b.keys.key(i).iter().cloned())
                            .collect()
                    })
                    .collect();
                let degrees = tuples
                    .iter()
                    .map(|tu| tu.iter().zip(&fbs).map(|(&i, b)| b.degrees[i]).sum())
                    .collect();
                let tuple_index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
                ValueBasis {
                    keys: IndexedBasis::new(keys).expect("distinct keys"),
                    degrees,
                    tuples,
                    tuple_index,
                }
            }
        }
    }

    /// Matrix of `F(f)`.
    pub fn action(&self, f: &GrMorphism) -> Result<SparseMatrix, GrError> {
        match &self.kind {
            FunctorKind::Passi(d) => Ok(passi_action(f, *d)),
            FunctorKind::Malcev(d) => malcev_action(f, *d),
            FunctorKind::Abelianization => Ok(abelianization_action(f)),
            FunctorKind::TruncTensorPower { cap, .. } => self.power_action(f, *cap),
        }
    }

    fn power_action(&self, f: &GrMorphism, cap: usize) -> Result<SparseMatrix, GrError> {
        let src = self.value_basis(f.source);
        let tgt = self.value_basis(f.target);
        let mut factor_cols: Vec<Vec<SparseVec>> = Vec::new();
        let mut factor_tgt: Vec<Arc<ValueBasis>> = Vec::new();
        for fac in &self.factors {
            let m = fac.action(f)?;
            factor_cols.push((0..m.cols()).map(|j| m.column(j)).collect());
            factor_tgt.push(fac.value_basis(f.target));
        }
        let mut columns = Vec::with_capacity(src.len());
        for (j, tu) in src.tuples.iter().enumerate() {
            let mut acc: Vec<(Vec<usize>, usize, Rational)> = vec![(Vec::new(), 0, Rational::one())];
            for (k, &i) in tu.iter().enumerate() {
                let mut next = Vec::new();
                for (prefix, deg, c) in &acc {
                    for (&r, x) in &factor_cols[k][i] {
                        let nd = deg + factor_tgt[k].degrees[r];
                        if nd > cap {
                            continue;
                        }
                        let mut p = prefix.clone();
                        p.push(r);
                        next.push((p, nd, c * x));
                    }
                }
                acc = next;
            }
            let mut col = SparseVec::new();
            for (tuple, deg, c) in acc {
                debug_assert!(deg >= src.degrees[j], "action lowered the filtration degree");
                let row = tgt.tuple_index[&tuple];
                let e = col.entry(row).or_insert_with(Rational::zero);
                *e += &c;
            }
            col.retain(|_, x| !x.is_zero());
            columns.push(col);
        }
        Ok(SparseMatrix::from_columns(tgt.len(), &columns))
    }

    /// Matrix on the value at `Free(n)` permuting tensor slots: slot `k` of
    /// the source goes to slot `perm[k]`. Factors are assumed identical.
    pub fn slot_permutation(&self, n: usize, perm: &[usize]) -> SparseMatrix {
        let b = self.value_basis(n);
        assert_eq!(perm.len(), self.factors.len(), "one entry per slot");
        let columns: Vec<SparseVec> = b
            .tuples
            .iter()
            .map(|tu| {
                let mut image = vec![0; tu.len()];
                for (k, &i) in tu.iter().enumerate() {
                    image[perm[k]] = i;
                }
                let mut col = SparseVec::new();
                col.insert(b.tuple_index[&image], Rational::one());
                col
            })
            .collect();
        SparseMatrix::from_columns(b.len(), &columns)
    }
}

fn power_tuples(
    fbs: &[Arc<ValueBasis>],
    cap: usize,
    prefix: &mut Vec<usize>,
    deg: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let k = prefix.len();
    if k == fbs.len() {
        out.push(prefix.clone());
        return;
    }
    for i in 0..fbs[k].len() {
        let nd = deg + fbs[k].degrees[i];
        if nd <= cap {
            prefix.push(i);
            power_tuples(fbs, cap, prefix, nd, out);
            prefix.pop();
        }
    }
}

fn tensor_to_sparse(x: &TruncTensorElement) -> SparseVec {
    let t = x.alphabet();
    x.terms().map(|(w, c)| (graded_index(w, t), c.clone())).collect()
}

/// Matrix of the Passi quotient on `f`: the word `x_{i1}...x_{ik}` goes to
/// the truncated product of the `expand(images[i_j]) - 1`.
pub fn passi_action(f: &GrMorphism, d: usize) -> SparseMatrix {
    let (s, t) = (f.source, f.target);
    let one = TruncTensorElement::unit(d, t);
    let ys: Vec<TruncTensorElement> = f
        .images
        .iter()
        .map(|w| expand_group_word(w, d, t).expect("letters in range").sub(&one).expect("ctx"))
        .collect();
    let words = words_up_to(s, d);
    let mut images: Vec<TruncTensorElement> = Vec::with_capacity(words.len());
    for w in &words {
        let img = if w.is_empty() {
            one.clone()
        } else {
            let prefix = w.slice(0, w.len() - 1);
            let last = w.letter_at(w.len() - 1);
            images[graded_index(&prefix, s)].mul(&ys[last - 1]).expect("ctx")
        };
        images.push(img);
    }
    let columns: Vec<SparseVec> = images.iter().map(tensor_to_sparse).collect();
    let rows: usize = (0..=d).map(|k| t.pow(k as u32)).sum();
    SparseMatrix::from_columns(rows, &columns)
}

/// Matrix of the Mal'cev functor on `f`: generators go to the logarithms of
/// their images and brackets to brackets of images.
pub fn malcev_action(f: &GrMorphism, d: usize) -> Result<SparseMatrix, GrError> {
    let src = LyndonBasis::shared(f.source, d);
    let tgt = LyndonBasis::shared(f.target, d);
    let gens: Vec<LieElement> =
        f.images.iter().map(|w| word_log(w, d, f.target)).collect::<Result<_, _>>()?;
    let mut memo = HashMap::new();
    let mut columns = Vec::with_capacity(src.len());
    for i in 0..src.len() {
        let e = substitute_basis(&src, i, &gens, &tgt, &mut memo)?;
        columns.push(e.to_sparse());
    }
    Ok(SparseMatrix::from_columns(tgt.len(), &columns))
}

/// Exponent-sum matrix.
pub fn abelianization_action(f: &GrMorphism) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(f.target, f.source);
    for (j, w) in f.images.iter().enumerate() {
        for (i, e) in w.exponent_sums(f.target).into_iter().enumerate() {
            m.set(i, j, Rational::from(e));
        }
    }
    m
}

/// Adjacent transpositions `(k, k+1)` of `{1..s}` as permutations.
fn adjacent_transpositions(s: usize) -> Vec<Vec<usize>> {
    (0..s.saturating_sub(1))
        .map(|k| {
            let mut p: Vec<usize> = (0..s).collect();
            p.swap(k, k + 1);
            p
        })
        .collect()
}

/// `cr_s F` as a subspace of `F(Free(s))` with the symmetric group action.
#[derive(Debug, Clone)]
pub struct CrossEffect {
    pub s: usize,
    pub subspace: Subspace,
    /// Restrictions of the adjacent transpositions `(k, k+1)`.
    pub transpositions: Vec<SparseMatrix>,
}

impl CrossEffect {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Joint kernel of the generator-killing maps `F(Free(s)) -> F(Free(s-1))`,
/// with the permutation action induced by generator permutations.
pub fn cross_effect(functor: &FunctorInstance, s: usize) -> Result<CrossEffect, GrError> {
    let kills: Vec<SparseMatrix> = (1..=s)
        .map(|i| functor.action(&GrMorphism::kill_generator(s, i)))
        .collect::<Result<_, _>>()?;
    let subspace = Subspace::joint_kernel(functor.dim(s), &kills)?;
    let transpositions = adjacent_transpositions(s)
        .iter()
        .map(|p| Ok(subspace.restrict(&functor.action(&GrMorphism::permutation(p))?)))
        .collect::<Result<_, GrError>>()?;
    Ok(CrossEffect { s, subspace, transpositions })
}

/// Dimension of the joint kernel at `Free(r + k)` of the maps killing each
/// of the last `k` generators: the value of the `k`-fold difference functor
/// at `Free(r)`.
pub fn difference_dim(functor: &FunctorInstance, r: usize, k: usize) -> Result<usize, GrError> {
    let n = r + k;
    let kills: Vec<SparseMatrix> = (r + 1..=n)
        .map(|i| functor.action(&GrMorphism::kill_generator(n, i)))
        .collect::<Result<_, _>>()?;
    Ok(joint_kernel_dim(functor.dim(n), &kills)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyDegree {
    Degree(usize),
    AboveCap,
}

/// Least `d <= cap` whose `(d+1)`-fold difference vanishes at ranks
/// `0..=cap`. Exact for the built-in kinds, a semi-decision in general.
pub fn poly_degree(functor: &FunctorInstance, cap: usize) -> Result<PolyDegree, GrError> {
    'degree: for d in 0..=cap {
        for r in 0..=cap {
            if difference_dim(functor, r, d + 1)? != 0 {
                continue 'degree;
            }
        }
        return Ok(PolyDegree::Degree(d));
    }
    Ok(PolyDegree::AboveCap)
}

/// Dimension of the kernel of `T^{<=k}(Q^t) -> T^{<=k-1}(Q^t)`.
pub fn qhat_dim(d: usize, k: usize, t: usize) -> Result<usize, GrError> {
    if k > d {
        return Err(FreeAlgError::DegreeAboveCap { requested: k, cap: d }.into());
    }
    let src = words_up_to(t, k);
    if k == 0 {
        return Ok(src.len());
    }
    let rows = words_up_to(t, k - 1).len();
    let columns: Vec<SparseVec> = src
        .iter()
        .map(|w| {
            let mut v = BTreeMap::new();
            if w.len() < k {
                v.insert(graded_index(w, t), Rational::one());
            }
            v
        })
        .collect();
    let m = SparseMatrix::from_columns(rows, &columns);
    Ok(src.len() - m.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::{bracket, to_tensor};
    use crate::qlinalg::q;

    fn gw(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        Word::from_letters(&s.bytes().map(|c| (c - b'a' + 1) as usize).collect::<Vec<_>>())
    }

    #[test]
    fn compose_examples() {
        let f: GrMorphism = "a->ab".parse().unwrap();
        let g = GrMorphism::parse("a->A; b->b", Some(2)).unwrap();
        assert_eq!(compose_gr(&g, &f).unwrap().to_string(), "a->Ab");
        assert_eq!(compose_gr(&f, &GrMorphism::identity(1)).unwrap(), f);
        assert_eq!(compose_gr(&GrMorphism::identity(2), &f).unwrap(), f);
        // (p * id) after the codiagonal is the identity
        let p_id = GrMorphism::parse("a->1; b->a", Some(1)).unwrap();
        assert_eq!(
            compose_gr(&p_id, &GrMorphism::codiagonal()).unwrap(),
            GrMorphism::identity(1)
        );
        assert!(matches!(compose_gr(&f, &f), Err(GrError::RankMismatch { .. })));
    }

    #[test]
    fn parse_round_trip() {
        let f: GrMorphism = "a->ab; b->B".parse().unwrap();
        assert_eq!((f.source(), f.target()), (2, 2));
        assert_eq!(f.to_string().parse::<GrMorphism>().unwrap(), f);
        assert!("b->a".parse::<GrMorphism>().is_err());
        assert!(GrMorphism::parse("a->c", Some(2)).is_err());
    }

    #[test]
    fn passi_action_examples() {
        // inversion at d = 2: x -> -x + x^2
        let m = passi_action(&GrMorphism::inversion(), 2);
        let x = graded_index(&w("a"), 1);
        let xx = graded_index(&w("aa"), 1);
        assert_eq!(m.get(x, x), q(-1, 1));
        assert_eq!(m.get(xx, x), q(1, 1));
        // codiagonal: x -> x1 + x2 + x1 x2
        let m = passi_action(&GrMorphism::codiagonal(), 3);
        let col = m.column(graded_index(&w("a"), 1));
        let expected: SparseVec = [w("a"), w("b"), w("ab")]
            .iter()
            .map(|v| (graded_index(v, 2), q(1, 1)))
            .collect();
        assert_eq!(col, expected);
        // trivial map: x -> 0
        let m = passi_action(&GrMorphism::trivial(1, 0), 2);
        assert!(m.column(1).is_empty());
        assert_eq!(m.column(0).len(), 1);
    }

    #[test]
    fn word_log_examples() {
        let b = LyndonBasis::shared(2, 2);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b, i));
        assert_eq!(word_log(&gw("a"), 2, 2).unwrap(), x);
        let xy = bracket(&x, &y).unwrap();
        let expected = x.add(&y).unwrap().add(&xy.scale(&q(1, 2))).unwrap();
        assert_eq!(word_log(&gw("ab"), 2, 2).unwrap(), expected);
        assert_eq!(word_log(&gw("abAB"), 2, 2).unwrap(), xy);
    }

    #[test]
    fn malcev_action_examples() {
        let m = malcev_action(&GrMorphism::inversion(), 4).unwrap();
        assert_eq!(m, SparseMatrix::from_i64(&[&[-1]]));
        let m = malcev_action(&GrMorphism::codiagonal(), 2).unwrap();
        let b = LyndonBasis::shared(2, 2);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b, i));
        let expected =
            x.add(&y).unwrap().add(&bracket(&x, &y).unwrap().scale(&q(1, 2))).unwrap();
        assert_eq!(m.column(0), expected.to_sparse());
        assert!(malcev_action(&GrMorphism::identity(3), 3).unwrap().is_identity());
    }

    #[test]
    fn malcev_agrees_with_tensor_transport() {
        // the Lie image of a bracket equals log-transport of its expansion
        let f: GrMorphism = "a->abA; b->bb".parse().unwrap();
        let d = 4;
        let m = malcev_action(&f, d).unwrap();
        let src = LyndonBasis::shared(2, d);
        let tgt = LyndonBasis::shared(2, d);
        let gens: Vec<TruncTensorElement> =
            f.images().iter().map(|g| to_tensor(&word_log(g, d, 2).unwrap())).collect();
        for i in 0..src.len() {
            let transported = src.expansion(i).substitute(&gens).unwrap();
            let col = LieElement::from_sparse(&tgt, &m.column(i));
            assert_eq!(to_tensor(&col), transported);
        }
    }

    #[test]
    fn cross_effect_examples() {
        let passi2 = FunctorInstance::new(FunctorKind::Passi(2));
        assert_eq!(passi2.dim(2), 7);
        assert_eq!(cross_effect(&passi2, 2).unwrap().dim(), 2);
        assert_eq!(cross_effect(&passi2, 3).unwrap().dim(), 0);
        let ab = FunctorInstance::new(FunctorKind::Abelianization);
        assert_eq!(cross_effect(&ab, 1).unwrap().dim(), 1);
        let mal = FunctorInstance::new(FunctorKind::Malcev(3));
        assert_eq!(cross_effect(&mal, 1).unwrap().dim(), 1);
        // the transposition swaps x1x2 and x2x1
        let ce = cross_effect(&passi2, 2).unwrap();
        let tau = &ce.transpositions[0];
        assert!(tau.mul(tau).unwrap().is_identity());
        assert!(!tau.is_identity());
    }

    #[test]
    fn poly_degree_examples() {
        let ab = FunctorInstance::new(FunctorKind::Abelianization);
        assert_eq!(poly_degree(&ab, 3).unwrap(), PolyDegree::Degree(1));
        let c = FunctorInstance::new(FunctorKind::constant());
        assert_eq!(poly_degree(&c, 2).unwrap(), PolyDegree::Degree(0));
        for d in 0..=3 {
            let p = FunctorInstance::new(FunctorKind::Passi(d));
            assert_eq!(poly_degree(&p, d + 1).unwrap(), PolyDegree::Degree(d));
        }
        let p = FunctorInstance::new(FunctorKind::Passi(3));
        assert_eq!(poly_degree(&p, 2).unwrap(), PolyDegree::AboveCap);
    }

    #[test]
    fn qhat_examples() {
        assert_eq!(qhat_dim(3, 2, 2).unwrap(), 4);
        assert_eq!(qhat_dim(3, 0, 5).unwrap(), 1);
        assert_eq!(qhat_dim(3, 3, 1).unwrap(), 1);
        assert!(qhat_dim(2, 3, 1).is_err());
    }

    #[test]
    fn truncated_power_dims() {
        for s in 1..=3usize {
            for t in 0..=3usize {
                for d in 0..=3usize {
                    let f = FunctorInstance::new(FunctorKind::power(FunctorKind::Passi(d), s, d));
                    let expected: usize =
                        (0..=d).map(|k| binom(k + s - 1, s - 1) * t.pow(k as u32)).sum();
                    assert_eq!(f.dim(t), expected, "s={s} t={t} d={d}");
                }
            }
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
}
