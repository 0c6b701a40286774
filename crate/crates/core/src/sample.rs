//! Seeded random inputs for property checks.

use std::sync::Arc;

use rand::Rng;

use crate::catprop::{catlie_basis, CatLieBasisElement};
use crate::freealg::{GroupWord, Syllable};
use crate::freelie::{LieElement, LyndonBasis};
use crate::grfun::GrMorphism;
use crate::qlinalg::Rational;

/// Freely reduced word of length at most `max_len` over `t` letters.
pub fn group_word(rng: &mut impl Rng, t: usize, max_len: usize) -> GroupWord {
    if t == 0 {
        return GroupWord::identity();
    }
    let len = rng.gen_range(0..=max_len);
    GroupWord::new((0..len).map(|_| Syllable::new(rng.gen_range(1..=t), rng.gen_bool(0.5))))
}

/// Homomorphism `Free(s) -> Free(t)` with images of length at most
/// `max_len`.
pub fn gr_morphism(rng: &mut impl Rng, s: usize, t: usize, max_len: usize) -> GrMorphism {
    let images = (0..s).map(|_| group_word(rng, t, max_len)).collect();
    GrMorphism::new(t, images).expect("letters in range")
}

/// Element with up to `terms` small integer Lyndon coordinates.
pub fn lie_element(rng: &mut impl Rng, basis: &Arc<LyndonBasis>, terms: usize) -> LieElement {
    let coords: Vec<_> = (0..terms)
        .filter(|_| !basis.is_empty())
        .map(|_| {
            let w = basis.words()[rng.gen_range(0..basis.len())].clone();
            (w, Rational::from(rng.gen_range(-3i64..=3)))
        })
        .collect();
    LieElement::from_coords(basis, coords).expect("basis words")
}

/// Uniform basis element of `Cat Lie(s, t)`, if the space is nonzero.
pub fn catlie_basis_element(rng: &mut impl Rng, s: usize, t: usize) -> Option<CatLieBasisElement> {
    let basis = catlie_basis(s, t);
    (!basis.is_empty()).then(|| basis[rng.gen_range(0..basis.len())].clone())
}

/// Uniform permutation of `0..n`.
pub fn permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
