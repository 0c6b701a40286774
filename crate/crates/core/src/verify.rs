//! Seeded property suites, one per module, with machine-readable reports.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catprop::{
    catass_dim, catass_dim_formula, catlie_basis, catlie_compose, catlie_dim, catlie_dim_formula,
    hom_via_cross_effect, CatLieBasisElement, CatLieElement,
};
use crate::freealg::{
    expand_group_word, tt_exp, tt_log, words_up_to, TruncTensorElement, Word,
};
use crate::freelie::{
    bch, bracket, from_tensor, lie_dim, lyndon_words, to_passi_tensor, to_tensor, witt_dim,
    LieElement, LyndonBasis,
};
use crate::grfun::{
    compose_gr, cross_effect, exp_expand_group_word, malcev_action, passi_action, poly_degree,
    word_log, FunctorInstance, FunctorKind, GrMorphism, PolyDegree,
};
use crate::jacobi::{
    catlie_diagram, catlie_to_prop, chord_basis, chord_count, chord_generation_check, glue,
    mlie_dim, oriented_diagrams, prop_compose, prop_dim, prop_dim_enumerated, prop_space,
    CanonicalForm, ComponentRule, DiagramSpace, JacobiDiagram, PropElement,
};
use crate::qlinalg::{kernel_basis, q, rank, rank_of, Rational, SparseMatrix, SparseVec};
use crate::sample;
use crate::tower::{
    gamma_sample_rng, pbw_graded_dims, project_hom, tower_compose, tower_hom_dim, tower_hom_rank,
    TowerMorphism,
};

pub const SUITES: [&str; 5] = ["freelie", "grfun", "catprop", "tower", "jacobi"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}; expected one of freelie, grfun, catprop, tower, jacobi, all")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifySuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }
}

/// Runs one suite, or all of them for `"all"`.
pub fn run(suite: &str, seed: u64) -> Result<Vec<VerifySuiteReport>, VerifyError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(VerifyError::UnknownSuite(s.to_string())),
    };
    Ok(names.into_iter().map(|n| run_one(n, seed)).collect())
}

/// The jacobi suite plus a comparison of the component decomposition with
/// full enumeration in every grading up to `max_degree`.
pub fn run_jacobi(seed: u64, max_degree: usize) -> VerifySuiteReport {
    let mut report = run_one("jacobi", seed);
    let mut r = Runner { seed, stream: report.checks.len() as u64, checks: Vec::new() };
    r.check("decomposition-by-grading", "dims from connected components agree with the full enumeration in each grading", |_| {
        for n in 0..=max_degree {
            for s in 0..=2usize {
                for t in 0..=2usize {
                    if s + t > 3 {
                        continue;
                    }
                    let (a, b) = (prop_dim(n, s, t), prop_dim_enumerated(n, s, t));
                    ensure(a == b, || format!("({n},{s},{t}): {a} vs {b}"))?;
                }
            }
        }
        Ok(())
    });
    report.checks.extend(r.checks);
    report
}

fn run_one(name: &str, seed: u64) -> VerifySuiteReport {
    let mut r = Runner { seed, stream: 0, checks: Vec::new() };
    match name {
        "freelie" => freelie_suite(&mut r),
        "grfun" => grfun_suite(&mut r),
        "catprop" => catprop_suite(&mut r),
        "tower" => tower_suite(&mut r),
        "jacobi" => jacobi_suite(&mut r),
        _ => unreachable!("suite names are validated"),
    }
    VerifySuiteReport { suite: name.to_string(), seed, checks: r.checks }
}

type Outcome = Result<(), String>;

struct Runner {
    seed: u64,
    stream: u64,
    checks: Vec<CheckResult>,
}

impl Runner {
    /// Each check draws from its own ChaCha stream, so reports do not depend
    /// on which other checks ran.
    fn check(&mut self, id: &str, anchor: &str, f: impl FnOnce(&mut ChaCha8Rng) -> Outcome) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        self.stream += 1;
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut rng))).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        self.checks.push(CheckResult {
            id: id.to_string(),
            anchor: anchor.to_string(),
            status,
            witness,
        });
    }
}

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> SparseMatrix {
    let dense: Vec<Vec<Rational>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(0.4) { q(rng.gen_range(-4..=4), rng.gen_range(1..=3)) } else { Rational::zero() })
                .collect()
        })
        .collect();
    SparseMatrix::from_dense(&dense)
}

fn random_tensor(rng: &mut impl Rng, d: usize, t: usize, constant: i64) -> TruncTensorElement {
    let words = words_up_to(t, d);
    let mut terms: Vec<(Word, Rational)> = (0..4)
        .map(|_| {
            let w = words[rng.gen_range(1..words.len())].clone();
            (w, q(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
        })
        .collect();
    terms.push((Word::empty(), Rational::from(constant)));
    TruncTensorElement::from_terms(d, t, terms)
}

pub(crate) fn geometric_dim(t: usize, d: usize) -> usize {
    (0..=d).map(|k| t.pow(k as u32)).sum()
}

fn freelie_suite(r: &mut Runner) {
    r.check("rank-nullity", "rank + nullity = number of columns, invariant under row and column operations", |rng| {
        for _ in 0..40 {
            let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let m = random_matrix(rng, rows, cols);
            let rk = rank(&m);
            ensure(rk + kernel_basis(&m).len() == cols, || format!("{m:?}"))?;
            let rp = sample::permutation(rng, rows);
            let cp = sample::permutation(rng, cols);
            let mut p = SparseMatrix::zeros(rows, cols);
            for (i, j, x) in m.entries() {
                p.set(rp[i], cp[j], x * q(rng.gen_range(1..=5), 1));
            }
            ensure(rank(&p) == rk, || format!("permuted/scaled rank differs for {m:?}"))?;
        }
        Ok(())
    });
    r.check("exact-arithmetic", "(a/b)(b/a) = 1 exactly", |rng| {
        for _ in 0..200 {
            let a = q(rng.gen_range(1..=1_000_000), rng.gen_range(1..=1_000_000));
            ensure((&a * a.recip().expect("nonzero")).is_one(), || a.to_string())?;
        }
        Ok(())
    });
    r.check("free-reduction", "expand(w w^-1) = 1", |rng| {
        for _ in 0..50 {
            let w = sample::group_word(rng, 3, 8);
            let e = expand_group_word(&w.mul(&w.inverse()), 4, 3).map_err(err)?;
            ensure(e == TruncTensorElement::unit(4, 3), || w.to_string())?;
        }
        Ok(())
    });
    r.check("expansion-homomorphism", "expand(uv) = expand(u) expand(v)", |rng| {
        for _ in 0..50 {
            let (u, v) = (sample::group_word(rng, 3, 6), sample::group_word(rng, 3, 6));
            let lhs = expand_group_word(&u.mul(&v), 4, 3).map_err(err)?;
            let rhs = expand_group_word(&u, 4, 3)
                .and_then(|a| a.mul(&expand_group_word(&v, 4, 3)?))
                .map_err(err)?;
            ensure(lhs == rhs, || format!("u={u} v={v}"))?;
        }
        Ok(())
    });
    r.check("tensor-dims", "dim T^{<=d}(Q^t) = sum_{k<=d} t^k", |_| {
        for t in 0..=3 {
            for d in 0..=5 {
                let n = words_up_to(t, d).len();
                ensure(n == geometric_dim(t, d), || format!("t={t} d={d}: {n}"))?;
            }
        }
        Ok(())
    });
    r.check("log-exp-inverse", "log and exp are inverse bijections", |rng| {
        for _ in 0..30 {
            let d = rng.gen_range(1..=5);
            let x = random_tensor(rng, d, 2, 0);
            ensure(tt_log(&tt_exp(&x).map_err(err)?).map_err(err)? == x, || x.to_string())?;
            let u = random_tensor(rng, d, 2, 1);
            ensure(tt_exp(&tt_log(&u).map_err(err)?).map_err(err)? == u, || u.to_string())?;
        }
        Ok(())
    });
    r.check("bch-associative", "bch(bch(x,y),z) = bch(x,bch(y,z)) in Lie_{<=d}(Q^3)", |rng| {
        for d in 1..=5 {
            let b = LyndonBasis::shared(3, d);
            let [x, y, z] = [1, 2, 3].map(|i| LieElement::generator(&b, i));
            let lhs = bch(&bch(&x, &y).map_err(err)?, &z).map_err(err)?;
            let rhs = bch(&x, &bch(&y, &z).map_err(err)?).map_err(err)?;
            ensure(lhs == rhs, || format!("generators, d={d}"))?;
        }
        let b = LyndonBasis::shared(3, 4);
        for _ in 0..5 {
            let [x, y, z] = [0; 3].map(|_| sample::lie_element(rng, &b, 3));
            let lhs = bch(&bch(&x, &y).map_err(err)?, &z).map_err(err)?;
            let rhs = bch(&x, &bch(&y, &z).map_err(err)?).map_err(err)?;
            ensure(lhs == rhs, || "random elements, d=4".into())?;
        }
        Ok(())
    });
    r.check("bch-inverse-unit", "bch(u,-u) = 0 and bch(0,u) = u", |rng| {
        for _ in 0..20 {
            let b = LyndonBasis::shared(2, rng.gen_range(1..=5));
            let u = sample::lie_element(rng, &b, 4);
            ensure(bch(&u, &u.neg()).map_err(err)?.is_zero(), || "bch(u,-u)".into())?;
            ensure(bch(&LieElement::zero(&b), &u).map_err(err)? == u, || "bch(0,u)".into())?;
        }
        Ok(())
    });
    r.check("bch-degree-three", "bch_3 = x + y + 1/2 [x,y] + 1/12 [x,[x,y]] + 1/12 [[x,y],y]", |_| {
        let b = LyndonBasis::shared(2, 3);
        let [x, y] = [1, 2].map(|i| LieElement::generator(&b, i));
        let z = bch(&x, &y).map_err(err)?;
        let w = |l: &[usize]| Word::from_letters(l);
        let got = [z.coeff(&w(&[1])), z.coeff(&w(&[2])), z.coeff(&w(&[1, 2])), z.coeff(&w(&[1, 1, 2])), z.coeff(&w(&[1, 2, 2]))];
        let want = [q(1, 1), q(1, 1), q(1, 2), q(1, 12), q(1, 12)];
        ensure(got == want, || format!("{got:?}"))
    });
    r.check("lie-dims", "dim Lie_{<=d}(Q^t) = sum of Witt numbers", |_| {
        for t in 1..=3 {
            for d in 1..=6 {
                let words = lyndon_words(t, d).len() as u64;
                let witt: u64 = (1..=d).map(|k| witt_dim(t, k)).sum();
                ensure(words == witt && lie_dim(t, d) == witt, || format!("t={t} d={d}"))?;
            }
        }
        Ok(())
    });
    r.check("lie-closure", "brackets and bch stay in the Lie subspace", |rng| {
        for _ in 0..20 {
            let b = LyndonBasis::shared(3, rng.gen_range(2..=4));
            let (u, v) = (sample::lie_element(rng, &b, 3), sample::lie_element(rng, &b, 3));
            for z in [bracket(&u, &v).map_err(err)?, bch(&u, &v).map_err(err)?] {
                from_tensor(&b, &to_tensor(&z)).map_err(err)?;
            }
        }
        Ok(())
    });
}

fn functor_kinds(d: usize) -> Vec<(String, FunctorKind)> {
    vec![
        (format!("passi{d}"), FunctorKind::Passi(d)),
        (format!("malcev{d}"), FunctorKind::Malcev(d)),
        ("abelianization".into(), FunctorKind::Abelianization),
        (format!("passi{}-squared", d.min(2)), FunctorKind::power(FunctorKind::Passi(d.min(2)), 2, d.min(2))),
    ]
}

fn grfun_suite(r: &mut Runner) {
    r.check("passi-dims", "dim of the Passi quotient at Free(t) is sum_{k<=d} t^k", |_| {
        for d in 0..=5 {
            let f = FunctorInstance::new(FunctorKind::Passi(d));
            for t in 0..=3 {
                ensure(f.dim(t) == geometric_dim(t, d), || format!("t={t} d={d}"))?;
            }
        }
        Ok(())
    });
    r.check("passi-explicit-actions", "inversion acts by x -> sum_{s>=1} (-x)^s, the codiagonal by x -> x1 + x2 + x1 x2", |_| {
        for d in 1..=4 {
            let inv = passi_action(&GrMorphism::inversion(), d);
            let x = TruncTensorElement::generator(d, 1, 1);
            let mut expected = TruncTensorElement::zero(d, 1);
            let mut pow = TruncTensorElement::unit(d, 1);
            for _ in 1..=d {
                pow = pow.mul(&x.scale(&q(-1, 1))).map_err(err)?;
                expected = expected.add(&pow).map_err(err)?;
            }
            ensure(inv.column(1) == tensor_vec(&expected), || format!("inversion, d={d}"))?;
            let nabla = passi_action(&GrMorphism::codiagonal(), d);
            let (x1, x2) = (TruncTensorElement::generator(d, 2, 1), TruncTensorElement::generator(d, 2, 2));
            let expected = x1.add(&x2).and_then(|a| a.add(&x1.mul(&x2)?)).map_err(err)?;
            ensure(nabla.column(1) == tensor_vec(&expected), || format!("codiagonal, d={d}"))?;
        }
        Ok(())
    });
    r.check("malcev-explicit-actions", "inversion acts by x -> -x, the codiagonal by x -> bch_d(x1, x2)", |_| {
        for d in 1..=4 {
            let m = malcev_action(&GrMorphism::inversion(), d).map_err(err)?;
            ensure(m == SparseMatrix::from_i64(&[&[-1]]), || format!("inversion, d={d}"))?;
            let m = malcev_action(&GrMorphism::codiagonal(), d).map_err(err)?;
            let b = LyndonBasis::shared(2, d);
            let z = bch(&LieElement::generator(&b, 1), &LieElement::generator(&b, 2)).map_err(err)?;
            ensure(m.column(0) == z.to_sparse(), || format!("codiagonal, d={d}"))?;
        }
        Ok(())
    });
    r.check("log-naturality", "the Lie embedding intertwines word_log with the logarithm of the expansion", |rng| {
        for i in 0..100 {
            let d = 1 + i % 4;
            let t = rng.gen_range(1..=3);
            let w = sample::group_word(rng, t, 7);
            let lw = word_log(&w, d, t).map_err(err)?;
            let passi = tt_log(&expand_group_word(&w, d, t).map_err(err)?).map_err(err)?;
            ensure(to_passi_tensor(&lw) == passi, || format!("{w} at d={d}"))?;
            let expo = tt_log(&exp_expand_group_word(&w, d, t).map_err(err)?).map_err(err)?;
            ensure(to_tensor(&lw) == expo, || format!("{w} at d={d}, exponential coordinates"))?;
        }
        Ok(())
    });
    r.check("functoriality", "action(g f) = action(g) action(f) for every functor kind", |rng| {
        for d in 1..=4 {
            for (name, kind) in functor_kinds(d) {
                let fi = FunctorInstance::new(kind);
                let pairs = if d == 4 { 50 } else { 15 };
                for _ in 0..pairs {
                    let (a, b, c) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
                    let f = sample::gr_morphism(rng, a, b, 4);
                    let g = sample::gr_morphism(rng, b, c, 4);
                    let gf = compose_gr(&g, &f).map_err(err)?;
                    let lhs = fi.action(&gf).map_err(err)?;
                    let rhs = fi.action(&g).and_then(|m| Ok(m.mul(&fi.action(&f)?)?)).map_err(err)?;
                    ensure(lhs == rhs, || format!("{name}: f={f} g={g}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("retraction", "Malcev(d) has a one-dimensional first cross-effect and maps onto the degree-1 part", |_| {
        for d in 1..=4 {
            let m = FunctorInstance::new(FunctorKind::Malcev(d));
            let ce = cross_effect(&m, 1).map_err(err)?.dim();
            ensure(ce == 1, || format!("cr_1 has dim {ce} at d={d}"))?;
            for t in 1..=3 {
                let b = LyndonBasis::shared(t, d);
                let images: Vec<SparseVec> = (0..b.len())
                    .map(|i| {
                        let x = to_passi_tensor(&LieElement::from_sparse(&b, &[(i, Rational::one())].into()));
                        tensor_vec(&x.homogeneous(1))
                    })
                    .collect();
                ensure(rank_of(&images) == t, || format!("t={t} d={d}"))?;
            }
        }
        Ok(())
    });
    r.check("equivariance", "cross-effects are stable under permutations and carry a symmetric group action", |rng| {
        for kind in [FunctorKind::Passi(2), FunctorKind::Passi(3), FunctorKind::Malcev(3)] {
            let fi = FunctorInstance::new(kind.clone());
            for s in 2..=3 {
                let ce = cross_effect(&fi, s).map_err(err)?;
                for tau in &ce.transpositions {
                    ensure(tau.mul(tau).map_err(err)?.is_identity(), || format!("{kind:?} s={s}: involution"))?;
                }
                if s == 3 && ce.dim() > 0 {
                    let (a, b) = (&ce.transpositions[0], &ce.transpositions[1]);
                    let aba = a.mul(b).and_then(|x| x.mul(a)).map_err(err)?;
                    let bab = b.mul(a).and_then(|x| x.mul(b)).map_err(err)?;
                    ensure(aba == bab, || format!("{kind:?}: braid relation"))?;
                }
                for _ in 0..5 {
                    let f = sample::gr_morphism(rng, s, s, 3);
                    let (sigma, tau) = (GrMorphism::permutation(&sample::permutation(rng, s)), GrMorphism::permutation(&sample::permutation(rng, s)));
                    let whole = compose_gr(&sigma, &compose_gr(&f, &tau).map_err(err)?).map_err(err)?;
                    let lhs = fi.action(&whole).map_err(err)?;
                    let rhs = fi.action(&sigma).and_then(|m| Ok(m.mul(&fi.action(&f)?)?.mul(&fi.action(&tau)?)?)).map_err(err)?;
                    ensure(lhs == rhs, || format!("{kind:?}: f={f}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("truncated-power", "the total-degree truncation of the s-th tensor power has dim sum_k C(k+s-1,s-1) t^k and commuting slot permutations", |rng| {
        for s in 1..=3usize {
            for d in 0..=3usize {
                let fi = FunctorInstance::new(FunctorKind::power(FunctorKind::Passi(d), s, d));
                for t in 0..=3usize {
                    let want: u128 = tower_hom_dim(s, t, d);
                    ensure(fi.dim(t) as u128 == want, || format!("s={s} t={t} d={d}"))?;
                }
                for _ in 0..3 {
                    let (a, b) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
                    let f = sample::gr_morphism(rng, a, b, 3);
                    let perm = sample::permutation(rng, s);
                    let lhs = fi.slot_permutation(b, &perm).mul(&fi.action(&f).map_err(err)?).map_err(err)?;
                    let rhs = fi.action(&f).map_err(err)?.mul(&fi.slot_permutation(a, &perm)).map_err(err)?;
                    ensure(lhs == rhs, || format!("s={s} d={d} f={f} perm={perm:?}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("polynomial-degree", "the Passi quotient at level d is polynomial of degree exactly d", |_| {
        for d in 0..=3 {
            let p = poly_degree(&FunctorInstance::new(FunctorKind::Passi(d)), d + 1).map_err(err)?;
            ensure(p == PolyDegree::Degree(d), || format!("d={d}: {p:?}"))?;
        }
        let p = poly_degree(&FunctorInstance::new(FunctorKind::Abelianization), 3).map_err(err)?;
        ensure(p == PolyDegree::Degree(1), || format!("abelianization: {p:?}"))
    });
}

fn tensor_vec(x: &TruncTensorElement) -> SparseVec {
    let t = x.alphabet();
    x.terms().map(|(w, c)| (crate::freealg::graded_index(w, t), c.clone())).collect()
}

fn catlie_triple(rng: &mut impl Rng) -> (CatLieBasisElement, CatLieBasisElement, CatLieBasisElement) {
    let s = rng.gen_range(1..=4);
    let a = rng.gen_range(1..=s);
    let b = rng.gen_range(1..=a);
    let c = rng.gen_range(1..=b);
    (
        sample::catlie_basis_element(rng, s, a).expect("a <= s"),
        sample::catlie_basis_element(rng, a, b).expect("b <= a"),
        sample::catlie_basis_element(rng, b, c).expect("c <= b"),
    )
}

fn catprop_suite(r: &mut Runner) {
    r.check("associativity", "(h g) f = h (g f) in Cat Lie", |rng| {
        for _ in 0..60 {
            let (f, g, h) = catlie_triple(rng);
            let [f, g, h] = [f, g, h].map(CatLieElement::basis);
            let lhs = catlie_compose(&catlie_compose(&h, &g).map_err(err)?, &f).map_err(err)?;
            let rhs = catlie_compose(&h, &catlie_compose(&g, &f).map_err(err)?).map_err(err)?;
            ensure(lhs == rhs, || format!("{:?} {:?} {:?}", f.coeffs().keys().next(), g.coeffs().keys().next(), h.coeffs().keys().next()))?;
        }
        Ok(())
    });
    r.check("units", "identity permutations are two-sided units", |rng| {
        for _ in 0..30 {
            let s = rng.gen_range(1..=4);
            let t = rng.gen_range(1..=s);
            let f = CatLieElement::basis(sample::catlie_basis_element(rng, s, t).expect("t <= s"));
            let l = catlie_compose(&CatLieElement::basis(CatLieBasisElement::identity(t)), &f).map_err(err)?;
            let rr = catlie_compose(&f, &CatLieElement::basis(CatLieBasisElement::identity(s))).map_err(err)?;
            ensure(l == f && rr == f, || format!("({s},{t})"))?;
        }
        Ok(())
    });
    r.check("dims", "dim Cat Lie(s,t) = t! c(s,t); zero for t > s; (n,n) has dim n!; (s,1) has dim (s-1)!", |_| {
        for s in 0..=5usize {
            for t in 0..=5usize {
                let d = catlie_dim(s, t);
                ensure(d as u128 == catlie_dim_formula(s, t), || format!("({s},{t}): {d}"))?;
                if t > s {
                    ensure(d == 0, || format!("({s},{t}) nonzero"))?;
                }
            }
            let fact = |n: usize| (1..=n).product::<usize>();
            ensure(catlie_dim(s, s) == fact(s), || format!("({s},{s})"))?;
            if s >= 1 {
                ensure(catlie_dim(s, 1) == fact(s - 1), || format!("({s},1)"))?;
            }
        }
        Ok(())
    });
    r.check("basis-census", "the basis counts surjections weighted by (|fiber|-1)!", |_| {
        for s in 1..=5usize {
            for t in 1..=s {
                let mut count = 0usize;
                for map in crate::catprop::all_maps(s, t) {
                    let mut sizes = vec![0usize; t];
                    map.iter().for_each(|&i| sizes[i - 1] += 1);
                    if sizes.iter().all(|&k| k > 0) {
                        count += sizes.iter().map(|&k| (1..k).product::<usize>()).product::<usize>();
                    }
                }
                ensure(count == catlie_basis(s, t).len(), || format!("({s},{t})"))?;
            }
        }
        Ok(())
    });
    r.check("catass", "dim Cat Ass(s,t) = t(t+1)...(t+s-1)", |_| {
        for s in 0..=5 {
            for t in 0..=5 {
                ensure(catass_dim(s, t) == catass_dim_formula(s, t), || format!("({s},{t})"))?;
            }
        }
        Ok(())
    });
    r.check("cross-effect-homs", "cross-effects of tensor powers of Malcev functors recover Cat Lie", |_| {
        for s in 1..=3 {
            for t in 1..=3 {
                for d in s..=4 {
                    let h = hom_via_cross_effect(s, t, d).map_err(err)?;
                    ensure(h == catlie_dim(s, t), || format!("({s},{t},{d}): {h}"))?;
                }
            }
        }
        Ok(())
    });
}

fn perturb(rng: &mut impl Rng, f: &GrMorphism, d: usize) -> GrMorphism {
    let t = f.target();
    let images = f
        .images()
        .iter()
        .map(|w| {
            let g = gamma_sample_rng(d + 1, t, rng).word;
            if rng.gen_bool(0.5) {
                w.mul(&g)
            } else {
                g.mul(w)
            }
        })
        .collect();
    GrMorphism::new(t, images).expect("same target")
}

fn tower_suite(r: &mut Runner) {
    r.check("gamma-vanishing", "depth d+1 commutators expand to 1 at level d", |rng| {
        for _ in 0..40 {
            let (d, t) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
            let g = gamma_sample_rng(d + 1, t, rng);
            let e = expand_group_word(&g.word, d, t).map_err(err)?;
            ensure(e == TruncTensorElement::unit(d, t), || format!("{} at d={d}", g.word))?;
        }
        Ok(())
    });
    r.check("projection-well-defined", "perturbing images by depth d+1 commutators does not change the projection", |rng| {
        for _ in 0..25 {
            let (s, t, d) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=3));
            let f = sample::gr_morphism(rng, s, t, 4);
            let f2 = perturb(rng, &f, d);
            ensure(project_hom(&f, d) == project_hom(&f2, d), || format!("f={f} f'={f2} d={d}"))?;
        }
        Ok(())
    });
    r.check("composition-well-defined", "composites do not depend on the chosen representatives", |rng| {
        for _ in 0..25 {
            let (s, t, u, d) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=3));
            let f = sample::gr_morphism(rng, s, t, 3);
            let g = sample::gr_morphism(rng, t, u, 3);
            let (f2, g2) = (perturb(rng, &f, d), perturb(rng, &g, d));
            let a = tower_compose(&project_hom(&g, d), &project_hom(&f, d)).map_err(err)?;
            let b = tower_compose(&project_hom(&g2, d), &project_hom(&f2, d)).map_err(err)?;
            ensure(a == b, || format!("f={f} g={g} d={d}"))?;
            ensure(a == project_hom(&compose_gr(&g, &f).map_err(err)?, d), || format!("projection is a functor: f={f} g={g}"))?;
        }
        Ok(())
    });
    r.check("associativity-units", "tower composition is associative and unital", |rng| {
        for _ in 0..20 {
            let d = rng.gen_range(1..=3);
            let ranks: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=2)).collect();
            let pick = |a: usize, b: usize, rng: &mut ChaCha8Rng| -> Result<TowerMorphism, String> {
                let n = rng.gen_range(1..=2);
                let reps = (0..n).map(|_| (q(rng.gen_range(-2..=2), 1), sample::gr_morphism(rng, a, b, 3))).collect();
                TowerMorphism::from_combination(d, reps).map_err(err)
            };
            let f = pick(ranks[0], ranks[1], rng)?;
            let g = pick(ranks[1], ranks[2], rng)?;
            let h = pick(ranks[2], ranks[3], rng)?;
            let lhs = tower_compose(&tower_compose(&h, &g).map_err(err)?, &f).map_err(err)?;
            let rhs = tower_compose(&h, &tower_compose(&g, &f).map_err(err)?).map_err(err)?;
            ensure(lhs == rhs, || format!("d={d} ranks={ranks:?}"))?;
            let id_s = project_hom(&GrMorphism::identity(ranks[0]), d);
            let id_t = project_hom(&GrMorphism::identity(ranks[1]), d);
            ensure(tower_compose(&f, &id_s).map_err(err)? == f && tower_compose(&id_t, &f).map_err(err)? == f, || "unit".into())?;
        }
        Ok(())
    });
    r.check("surjectivity", "projections of homomorphisms span the truncated hom-spaces", |_| {
        for s in 1..=2 {
            for t in 1..=2 {
                for d in 1..=3 {
                    let want = tower_hom_dim(s, t, d) as usize;
                    let got = tower_hom_rank(s, t, d, d, want);
                    ensure(got == want, || format!("({s},{t},{d}): {got} of {want}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("pbw", "graded dims of the symmetric algebra on the free Lie algebra match the tensor algebra", |_| {
        for t in 1..=3 {
            for d in 0..=6 {
                let total: u128 = pbw_graded_dims(t, d).iter().sum();
                ensure(total == geometric_dim(t, d) as u128, || format!("t={t} d={d}: {total}"))?;
            }
        }
        Ok(())
    });
}

fn random_open_diagram(rng: &mut impl Rng, s: usize, t: usize) -> Option<JacobiDiagram> {
    let m = rng.gen_range(0..=2usize);
    let ds: Vec<JacobiDiagram> =
        oriented_diagrams(s, t, m).into_iter().filter(JacobiDiagram::components_have_exits).collect();
    (!ds.is_empty()).then(|| ds[rng.gen_range(0..ds.len())].clone())
}

fn jacobi_suite(r: &mut Runner) {
    r.check("canonical-examples", "struts are canonical; a transposition at a vertex flips the sign", |_| {
        for d in [JacobiDiagram::iota(), JacobiDiagram::casimir()] {
            ensure(d.canonical_form() == CanonicalForm::Diagram { key: d.clone(), sign: 1 }, || format!("{d:?}"))?;
        }
        let tripod = |order: [usize; 3]| {
            let mut p = vec![0; 6];
            for (k, &leg) in order.iter().enumerate() {
                p[leg] = 3 + k;
                p[3 + k] = leg;
            }
            JacobiDiagram::new(0, 3, 1, p).expect("valid").canonical_form()
        };
        match (tripod([0, 1, 2]), tripod([1, 0, 2])) {
            (CanonicalForm::Diagram { key: a, sign: sa }, CanonicalForm::Diagram { key: b, sign: sb }) => {
                ensure(a == b && sa == -sb, || "tripod orientations".into())
            }
            other => Err(format!("{other:?}")),
        }
    });
    r.check("mlie-small", "MLie has dims 1, 1, 0, 0 on (legs, degree) = (2,1), (3,2), (1,1), (0,1) and Lie(l-1) on trees", |_| {
        let got = [mlie_dim(2, 1), mlie_dim(3, 2), mlie_dim(1, 1), mlie_dim(0, 1)];
        ensure(got == [1, 1, 0, 0], || format!("{got:?}"))?;
        for l in 2..=5usize {
            let tree = mlie_dim(l, l - 1);
            ensure(tree == (1..=l - 2).product::<usize>(), || format!("l={l}: {tree}"))?;
        }
        Ok(())
    });
    r.check("grading", "generators have nonnegative grading; iota has grading 0 and the Casimir grading 1", |_| {
        ensure(JacobiDiagram::iota().grading() == 0 && JacobiDiagram::casimir().grading() == 1, || "struts".into())?;
        for n in 0..=2usize {
            for s in 0..=2usize {
                for t in 0..=2usize {
                    let Some(m) = (2 * n + s).checked_sub(t) else { continue };
                    for d in oriented_diagrams(s, t, m) {
                        ensure(d.grading() == n as isize, || format!("{d:?}"))?;
                    }
                }
            }
        }
        Ok(())
    });
    r.check("prop-dims", "P_1(0,2) is one-dimensional and P_0 has the dims of Cat Lie", |_| {
        ensure(prop_dim(1, 0, 2) == 1 && prop_dim_enumerated(1, 0, 2) == 1, || "P_1(0,2)".into())?;
        for s in 0..=3 {
            for t in 0..=3 {
                let (a, b) = (prop_dim(0, s, t), prop_dim_enumerated(0, s, t));
                ensure(a == catlie_dim(s, t) && b == a, || format!("({s},{t}): {a} {b}"))?;
            }
        }
        Ok(())
    });
    r.check("finiteness", "P_n(s,t) vanishes for t = 0 < s and for t > 2n + s", |_| {
        for n in 0..=2usize {
            for s in 0..=3usize {
                for t in 0..=(2 * n + s + 2) {
                    if (t == 0 && s > 0) || t > 2 * n + s {
                        ensure(prop_dim(n, s, t) == 0, || format!("({n},{s},{t})"))?;
                        if t <= 3 {
                            ensure(prop_dim_enumerated(n, s, t) == 0, || format!("({n},{s},{t}) enumerated"))?;
                        }
                    }
                }
            }
        }
        Ok(())
    });
    r.check("decomposition", "dims from connected components agree with the full enumeration", |_| {
        for (n, smax, tmax) in [(1usize, 3usize, 3usize), (2, 2, 2)] {
            for s in 0..=smax {
                for t in 0..=tmax {
                    let (a, b) = (prop_dim(n, s, t), prop_dim_enumerated(n, s, t));
                    ensure(a == b, || format!("({n},{s},{t}): {a} vs {b}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("chord-counts", "|Chord_n(s, 2n+s)| = (2n+s)!/(2n)! (2n-1)!!", |_| {
        for n in 0..=2 {
            for s in 0..=3 {
                let got = chord_basis(n, s).len() as u128;
                ensure(got == chord_count(n, s), || format!("({n},{s}): {got}"))?;
            }
        }
        Ok(())
    });
    r.check("chord-generation", "Cat Lie composites of chord diagrams span P_n(s,t)", |_| {
        for n in 0..=1 {
            for s in 0..=2 {
                for t in 0..=2 {
                    let c = chord_generation_check(n, s, t);
                    ensure(c.equal && c.dim == prop_dim(n, s, t), || format!("({n},{s},{t}): {c:?}"))?;
                }
            }
        }
        Ok(())
    });
    r.check("reordering", "quotient dims do not depend on the enumeration order", |rng| {
        for (s, t, m) in [(0, 4, 4), (1, 2, 3), (2, 2, 2), (0, 2, 4), (1, 3, 2)] {
            let base = DiagramSpace::build(s, t, m, ComponentRule::ExitInEveryComponent, None).dim();
            for _ in 0..3 {
                let sh = DiagramSpace::build(s, t, m, ComponentRule::ExitInEveryComponent, Some(rng.gen())).dim();
                ensure(sh == base, || format!("({s},{t},{m}): {sh} vs {base}"))?;
            }
        }
        Ok(())
    });
    r.check("presentation", "canonical forms ignore vertex numbering and rotations and track flips in the sign", |rng| {
        for (s, t, m) in [(0, 4, 2), (1, 3, 2), (0, 3, 3), (2, 2, 2)] {
            for d in oriented_diagrams(s, t, m) {
                let mut order: Vec<usize> = sample::permutation(rng, m);
                let rot: Vec<usize> = (0..m).map(|_| rng.gen_range(0..3)).collect();
                let mut x = d.clone();
                let mut sign = 1i8;
                for v in 0..m {
                    if rng.gen_bool(0.5) {
                        x = x.flip(v);
                        sign = -sign;
                    }
                }
                x = x.permute_vertices(&order, &rot);
                order.clear();
                let ok = match (d.canonical_form(), x.canonical_form()) {
                    (CanonicalForm::Zero, CanonicalForm::Zero) => true,
                    (CanonicalForm::Diagram { key: a, sign: sa }, CanonicalForm::Diagram { key: b, sign: sb }) => a == b && sa == sb * sign,
                    _ => false,
                };
                ensure(ok, || format!("{d:?}"))?;
            }
        }
        Ok(())
    });
    r.check("leg-permutation", "relabelling legs is an automorphism of MLie", |rng| {
        for (l, k) in [(2usize, 2usize), (2, 3), (3, 3), (4, 3), (4, 4), (3, 4)] {
            let space = DiagramSpace::mlie(l, k).expect("feasible");
            let perm = sample::permutation(rng, l);
            let images: Vec<PropElement> =
                space.basis().iter().map(|d| PropElement::diagram(&d.permute_legs(&[], &perm))).collect();
            let rk = space.quotient_rank(&images);
            ensure(rk == space.dim() && space.dim() == mlie_dim(l, k), || format!("({l},{k}) perm={perm:?}: {rk}"))?;
        }
        Ok(())
    });
    r.check("composition", "gluing is associative and additive in the grading", |rng| {
        let mut done = 0;
        while done < 30 {
            let (a, b, c, e) = (rng.gen_range(0..=2), rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
            let (Some(x), Some(y), Some(z)) = (random_open_diagram(rng, a, b), random_open_diagram(rng, b, c), random_open_diagram(rng, c, e)) else {
                continue;
            };
            done += 1;
            let [px, py, pz] = [&x, &y, &z].map(PropElement::diagram);
            let lhs = prop_compose(&pz, &prop_compose(&py, &px).map_err(err)?).map_err(err)?;
            let rhs = prop_compose(&prop_compose(&pz, &py).map_err(err)?, &px).map_err(err)?;
            ensure(lhs == rhs, || format!("{x:?} {y:?} {z:?}"))?;
            if let Some(g) = glue(&y, &x).map_err(err)? {
                ensure(g.grading() == x.grading() + y.grading(), || format!("{x:?} {y:?}"))?;
            }
        }
        Ok(())
    });
    r.check("tree-embedding", "Cat Lie embeds in P_0 compatibly with composition", |rng| {
        for s in 1..=4 {
            for t in 1..=s.min(3) {
                let space = prop_space(0, s, t).expect("feasible");
                let xs: Vec<PropElement> = catlie_basis(s, t).iter().map(|b| PropElement::diagram(&catlie_diagram(b))).collect();
                ensure(space.quotient_rank(&xs) == catlie_dim(s, t), || format!("injectivity at ({s},{t})"))?;
            }
        }
        for _ in 0..30 {
            let (f, g, _) = catlie_triple(rng);
            let (fe, ge) = (CatLieElement::basis(f.clone()), CatLieElement::basis(g.clone()));
            let lhs = catlie_to_prop(&catlie_compose(&ge, &fe).map_err(err)?);
            let rhs = prop_compose(&catlie_to_prop(&ge), &catlie_to_prop(&fe)).map_err(err)?;
            let space = prop_space(0, f.source(), g.target()).expect("feasible");
            ensure(space.is_zero(&lhs.add(&rhs.scale(&q(-1, 1)))), || format!("{f:?} then {g:?}"))?;
        }
        Ok(())
    });
    r.check("closed-components", "closed components are zero", |_| {
        let cup = JacobiDiagram::new(2, 0, 0, vec![1, 0]).map_err(err)?;
        ensure(glue(&cup, &JacobiDiagram::casimir()).map_err(err)?.is_none(), || "circle".into())?;
        let beta = PropElement::diagram(&catlie_diagram(&CatLieBasisElement::bracket()));
        let x = prop_compose(&beta, &PropElement::diagram(&JacobiDiagram::casimir())).map_err(err)?;
        ensure(x.is_zero() && prop_dim(1, 0, 1) == 0, || format!("{x:?}"))
    });
}
