//! The categories `q_d Q gr`: hom spaces of the linearized category of free
//! groups, truncated by the degree-`d` polynomial filtration.
//!
//! A morphism `Free(s) -> Free(t)` is stored as a normal form in the
//! `s`-fold tensor power of `T^{<=d}(Q^t)` truncated at total degree `d`,
//! together with group-level representatives. Composition composes
//! representatives in `gr` and projects again.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::freealg::{expand_group_word, graded_index, GroupWord, Syllable};
use crate::freelie::witt_dim;
use crate::grfun::{compose_gr, FunctorInstance, FunctorKind, GrError, GrMorphism};
use crate::qlinalg::{Rational, RowSpace, SparseVec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("levels differ: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("a morphism needs at least one representative")]
    NoRepresentative,
    #[error(transparent)]
    Gr(#[from] GrError),
}

fn hom_space(s: usize, d: usize) -> Arc<FunctorInstance> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<FunctorInstance>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("hom space cache");
    guard
        .entry((s, d))
        .or_insert_with(|| Arc::new(FunctorInstance::new(FunctorKind::power(FunctorKind::Passi(d), s, d))))
        .clone()
}

/// A morphism of `q_d Q gr`.
#[derive(Clone)]
pub struct TowerMorphism {
    d: usize,
    s: usize,
    t: usize,
    normal_form: SparseVec,
    reps: Vec<(Rational, GrMorphism)>,
}

impl PartialEq for TowerMorphism {
    fn eq(&self, other: &Self) -> bool {
        (self.d, self.s, self.t) == (other.d, other.s, other.t)
            && self.normal_form == other.normal_form
    }
}

impl Eq for TowerMorphism {}

impl TowerMorphism {
    /// `sum c_i [f_i]` projected to level `d`.
    pub fn from_combination(
        d: usize,
        reps: Vec<(Rational, GrMorphism)>,
    ) -> Result<Self, TowerError> {
        let (s, t) = match reps.first() {
            Some((_, f)) => (f.source(), f.target()),
            None => return Err(TowerError::NoRepresentative),
        };
        let mut normal_form = SparseVec::new();
        for (c, f) in &reps {
            if f.source() != s {
                return Err(TowerError::RankMismatch { expected: s, found: f.source() });
            }
            if f.target() != t {
                return Err(TowerError::RankMismatch { expected: t, found: f.target() });
            }
            for (i, x) in project_vector(f, d) {
                let e = normal_form.entry(i).or_insert_with(Rational::zero);
                *e += &(&x * c);
            }
        }
        normal_form.retain(|_, x| !x.is_zero());
        Ok(TowerMorphism { d, s, t, normal_form, reps })
    }

    pub fn level(&self) -> usize {
        self.d
    }

    pub fn source(&self) -> usize {
        self.s
    }

    pub fn target(&self) -> usize {
        self.t
    }

    /// Coordinates in the basis of `s`-tuples of words over `t` letters with
    /// total length `<= d`.
    pub fn normal_form(&self) -> &SparseVec {
        &self.normal_form
    }

    pub fn representatives(&self) -> &[(Rational, GrMorphism)] {
        &self.reps
    }

    /// Normal form keyed by the word tuples, for display; the empty word
    /// shows as `1`.
    pub fn normal_form_terms(&self) -> Vec<(Vec<String>, Rational)> {
        let basis = hom_space(self.s, self.d).value_basis(self.t);
        self.normal_form
            .iter()
            .map(|(&i, c)| {
                let key = basis
                    .keys()
                    .key(i)
                    .iter()
                    .map(|w| if w.is_empty() { "1".to_string() } else { w.to_string() })
                    .collect();
                (key, c.clone())
            })
            .collect()
    }
}

impl fmt::Debug for TowerMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q_{}(Free({}), Free({})): ", self.d, self.s, self.t)?;
        let terms: Vec<String> = self
            .normal_form_terms()
            .into_iter()
            .map(|(k, c)| format!("{c}*({})", k.join(" | ")))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Tensor product of the expansions of the images, truncated at total
/// degree `d`.
fn project_vector(f: &GrMorphism, d: usize) -> SparseVec {
    let (s, t) = (f.source(), f.target());
    let space = hom_space(s, d);
    let basis = space.value_basis(t);
    let expansions: Vec<Vec<(usize, usize, Rational)>> = f
        .images()
        .iter()
        .map(|w| {
            expand_group_word(w, d, t)
                .expect("letters in range")
                .terms()
                .map(|(v, c)| (graded_index(v, t), v.len(), c.clone()))
                .collect()
        })
        .collect();
    let mut acc: Vec<(Vec<usize>, usize, Rational)> = vec![(Vec::new(), 0, Rational::one())];
    for e in &expansions {
        let mut next = Vec::new();
        for (prefix, deg, c) in &acc {
            for (i, len, x) in e {
                if deg + len <= d {
                    let mut p = prefix.clone();
                    p.push(*i);
                    next.push((p, deg + len, c * x));
                }
            }
        }
        acc = next;
    }
    let mut out = SparseVec::new();
    for (tuple, _, c) in acc {
        let idx = basis.tuple_position(&tuple).expect("tuple in basis");
        let e = out.entry(idx).or_insert_with(Rational::zero);
        *e += &c;
    }
    out.retain(|_, x| !x.is_zero());
    out
}

/// Image of a group homomorphism in `q_d Q gr`.
pub fn project_hom(f: &GrMorphism, d: usize) -> TowerMorphism {
    TowerMorphism::from_combination(d, vec![(Rational::one(), f.clone())])
        .expect("one representative")
}

/// Composite `g . f` via representatives.
pub fn tower_compose(g: &TowerMorphism, f: &TowerMorphism) -> Result<TowerMorphism, TowerError> {
    if g.d != f.d {
        return Err(TowerError::LevelMismatch(g.d, f.d));
    }
    if g.s != f.t {
        return Err(TowerError::RankMismatch { expected: f.t, found: g.s });
    }
    let mut reps = Vec::with_capacity(g.reps.len() * f.reps.len());
    for (cg, rg) in &g.reps {
        for (cf, rf) in &f.reps {
            reps.push((cg * cf, compose_gr(rg, rf)?));
        }
    }
    TowerMorphism::from_combination(f.d, reps)
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `sum_{k=0}^d C(k+s-1, s-1) t^k`.
pub fn tower_hom_dim(s: usize, t: usize, d: usize) -> u128 {
    if s == 0 {
        return 1;
    }
    (0..=d as u128)
        .map(|k| binom(k + s as u128 - 1, s as u128 - 1) * (t as u128).pow(k as u32))
        .sum()
}

/// Freely reduced group words over `t` letters of length `<= len`.
pub fn reduced_words(t: usize, len: usize) -> Vec<GroupWord> {
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for l in 1..=t {
                for inverse in [false, true] {
                    let s = Syllable::new(l, inverse);
                    if w.syllables().last() != Some(&s.inv()) {
                        next.push(GroupWord::new(w.syllables().iter().copied().chain([s])));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Rank of the span of the projections of all homs `Free(s) -> Free(t)`
/// whose images have length `<= max_len`; stops early at `target_rank`.
pub fn tower_hom_rank(s: usize, t: usize, d: usize, max_len: usize, target_rank: usize) -> usize {
    let words = reduced_words(t, max_len);
    let mut space = RowSpace::new();
    let mut idx = vec![0usize; s];
    loop {
        let images = idx.iter().map(|&i| words[i].clone()).collect();
        let f = GrMorphism::new(t, images).expect("letters in range");
        space.insert(&project_vector(&f, d));
        if space.rank() >= target_rank {
            break;
        }
        // odometer over s-tuples
        let mut k = 0;
        loop {
            if k == s {
                return space.rank();
            }
            idx[k] += 1;
            if idx[k] < words.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    space.rank()
}

/// An iterated commutator lying in the `depth`-th term of the lower
/// central series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaWord {
    pub depth: usize,
    pub word: GroupWord,
}

/// Random iterated commutator `[u, v]` with `u` of depth `k-1` and `v` a
/// generator; nontrivial whenever `t >= 2` or `k == 1`.
pub fn gamma_sample_rng(k: usize, t: usize, rng: &mut impl Rng) -> GammaWord {
    assert!(k >= 1 && t >= 1, "gamma_sample needs k >= 1 and t >= 1");
    let gen = |rng: &mut dyn rand::RngCore, avoid: Option<usize>| -> GroupWord {
        let choices: Vec<usize> = (1..=t).filter(|&l| Some(l) != avoid).collect();
        let l = if choices.is_empty() { 1 } else { choices[rng.gen_range(0..choices.len())] };
        let g = GroupWord::generator(l);
        if rng.gen_bool(0.5) {
            g.inverse()
        } else {
            g
        }
    };
    let mut word = gen(rng, None);
    for depth in 2..=k {
        // at depth 2 the second letter must differ for the commutator to survive
        let avoid = (depth == 2).then(|| word.syllables()[0].letter);
        let v = gen(rng, avoid);
        word = if rng.gen_bool(0.5) {
            GroupWord::commutator(&word, &v)
        } else {
            GroupWord::commutator(&v, &word)
        };
    }
    GammaWord { depth: k, word }
}

/// Seeded [`gamma_sample_rng`].
pub fn gamma_sample(k: usize, t: usize, seed: u64) -> GammaWord {
    gamma_sample_rng(k, t, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `table[n][k] = dim S^n(L)_k` for `k <= d`, where `L` is graded with
/// `dim L_k = witt_dim(t, k)`, from the expansion of
/// `prod_k (1 - y q^k)^{-witt_dim(t, k)}`.
pub fn pbw_table(t: usize, d: usize) -> Vec<Vec<u128>> {
    // series[n][k]
    let mut series = vec![vec![0u128; d + 1]; d + 1];
    series[0][0] = 1;
    for k in 1..=d {
        let m = witt_dim(t, k) as u128;
        // multiply by sum_j C(m+j-1, j) y^j q^{kj}
        let mut next = vec![vec![0u128; d + 1]; d + 1];
        for n in 0..=d {
            for deg in 0..=d {
                let c = series[n][deg];
                if c == 0 {
                    continue;
                }
                let mut j = 0;
                while n + j <= d && deg + k * j <= d {
                    let coeff = match (m, j) {
                        (_, 0) => 1,
                        (0, _) => 0,
                        _ => binom(m + j as u128 - 1, j as u128),
                    };
                    next[n + j][deg + k * j] += c * coeff;
                    j += 1;
                }
            }
        }
        series = next;
    }
    series
}

/// `sum_n dim S^n(L)_k` for each `k <= d`; the identity predicts `t^k`.
pub fn pbw_graded_dims(t: usize, d: usize) -> Vec<u128> {
    let table = pbw_table(t, d);
    (0..=d).map(|k| table.iter().map(|row| row[k]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn hom(s: &str, t: usize) -> GrMorphism {
        GrMorphism::parse(s, Some(t)).unwrap()
    }

    #[test]
    fn project_examples() {
        let id = project_hom(&GrMorphism::identity(1), 2);
        assert_eq!(id.normal_form().len(), 2);
        let perturbed = project_hom(&hom("a->abcBC", 3), 1);
        assert_eq!(perturbed, project_hom(&hom("a->a", 3), 1));
        assert_ne!(project_hom(&hom("a->abcBC", 3), 2), project_hom(&hom("a->a", 3), 2));
        let triv = project_hom(&GrMorphism::trivial(2, 2), 3);
        assert_eq!(triv.normal_form().len(), 1);
        assert_eq!(triv.normal_form().values().next(), Some(&q(1, 1)));
    }

    #[test]
    fn compose_examples() {
        let sq = project_hom(&hom("a->aa", 1), 2);
        let inv = project_hom(&GrMorphism::inversion(), 2);
        assert_eq!(tower_compose(&sq, &inv).unwrap(), project_hom(&hom("a->AA", 1), 2));
        let f = project_hom(&hom("a->ab; b->Ba", 2), 3);
        let id = project_hom(&GrMorphism::identity(2), 3);
        assert_eq!(tower_compose(&id, &f).unwrap(), f);
        assert_eq!(tower_compose(&f, &id).unwrap(), f);
        let to0 = project_hom(&GrMorphism::trivial(2, 0), 3);
        assert_eq!(tower_compose(&to0, &f).unwrap(), project_hom(&GrMorphism::trivial(2, 0), 3));
    }

    #[test]
    fn dim_examples() {
        assert_eq!(tower_hom_dim(1, 3, 2), 13);
        assert_eq!(tower_hom_dim(2, 1, 2), 6);
        assert_eq!(tower_hom_dim(3, 2, 0), 1);
        for s in 0..=3 {
            for t in 0..=3 {
                for d in 0..=3 {
                    let space = FunctorInstance::new(FunctorKind::power(FunctorKind::Passi(d), s, d));
                    assert_eq!(space.dim(t) as u128, tower_hom_dim(s, t, d));
                }
            }
        }
    }

    #[test]
    fn projection_is_surjective() {
        for s in 1..=2 {
            for t in 0..=2 {
                for d in 0..=3 {
                    let dim = tower_hom_dim(s, t, d) as usize;
                    assert_eq!(tower_hom_rank(s, t, d, d, dim), dim, "s={s} t={t} d={d}");
                }
            }
        }
    }

    #[test]
    fn gamma_words_vanish_in_passi() {
        for seed in 0..20 {
            for k in 1..=4 {
                let g = gamma_sample(k, 2, seed);
                assert!(!g.word.is_identity());
                let e = expand_group_word(&g.word, k, 2).unwrap();
                assert!(!e.homogeneous(k).is_zero(), "depth {k} word {:?}", g.word);
                let below = expand_group_word(&g.word, k - 1, 2).unwrap();
                assert!(below.sub(&crate::freealg::TruncTensorElement::unit(k - 1, 2)).unwrap().is_zero());
            }
        }
        assert_eq!(gamma_sample(2, 2, 7), gamma_sample(2, 2, 7));
    }

    #[test]
    fn pbw_identity() {
        for t in 0..=3usize {
            let dims = pbw_graded_dims(t, 6);
            let expected: Vec<u128> = (0..=6).map(|k| (t as u128).pow(k)).collect();
            assert_eq!(dims, expected, "t={t}");
        }
        // S^1(L) is L itself
        let table = pbw_table(2, 4);
        for k in 1..=4 {
            assert_eq!(table[1][k], witt_dim(2, k) as u128);
        }
    }
}
