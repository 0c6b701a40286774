//! Computed dimensions frozen from independent routes: the partition formula
//! and direct enumeration modulo AS and IHX must both reproduce them.
//! Connected dimensions are pinned by enumeration and the tree-level count.

use grcalc::jacobi::{mlie_dim, prop_dim, prop_dim_enumerated};

// (legs, degree, dim) of connected uni-trivalent diagrams
const MLIE: &[(usize, usize, usize)] = &[
    (1, 1, 0),
    (1, 2, 0),
    (2, 1, 1),
    (2, 2, 1),
    (2, 3, 1),
    (2, 4, 1),
    (3, 2, 1),
    (3, 3, 1),
    (3, 4, 1),
    (4, 3, 2),
    (4, 4, 3),
    (5, 4, 6),
];

// (n, s, t, dim) of Jacobi diagram hom spaces
const PROP: &[(usize, usize, usize, usize)] = &[
    (1, 1, 1, 1),
    (1, 1, 2, 1),
    (1, 1, 3, 3),
    (1, 2, 1, 1),
    (1, 2, 2, 6),
    (1, 2, 3, 9),
    (1, 3, 1, 3),
    (1, 3, 2, 18),
    (1, 3, 3, 51),
    (2, 0, 2, 1),
    (2, 0, 3, 1),
    (2, 1, 3, 8),
    (2, 2, 2, 9),
    (2, 2, 3, 24),
    (2, 3, 1, 5),
    (2, 3, 2, 30),
    (3, 1, 2, 1),
];

#[test]
fn mlie_dims_match_frozen_values() {
    for &(legs, degree, dim) in MLIE {
        assert_eq!(mlie_dim(legs, degree), dim, "mlie({legs},{degree})");
    }
}

#[test]
fn tree_level_mlie_is_factorial() {
    // trees on l legs span the multilinear part of the free Lie algebra
    for legs in 2..=6usize {
        let want: usize = (1..=legs - 2).product();
        assert_eq!(mlie_dim(legs, legs - 1), want, "tree level, {legs} legs");
    }
}

#[test]
fn prop_dims_match_frozen_values() {
    for &(n, s, t, dim) in PROP {
        assert_eq!(prop_dim(n, s, t), dim, "formula P_{n}({s},{t})");
        if 2 * n + s + t <= 8 {
            assert_eq!(prop_dim_enumerated(n, s, t), dim, "enumerated P_{n}({s},{t})");
        }
    }
}
