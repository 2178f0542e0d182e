use elimkit::field::{Field, FiniteField, SquareClass};
use elimkit::forms::{bilinear, membership, similitude, standard_form, wall_gram, GroupKind};
use elimkit::gauss::decompose;
use elimkit::generators::{all_tokens, elementary, Token};
use elimkit::linalg::Matrix;
use elimkit::polyclass::{dual, is_self_u_reciprocal, u_reciprocal, Poly, PolyError};
use elimkit::sample::Sampler;
use elimkit::spinor::spinor_elimination;
use elimkit::zbrute::{build_group, class_centralizers, conjugacy_classes, z_classes, DEEP_CAP, DEFAULT_CAP};
use elimkit::zcount::{series, z_closed, SeriesKind};
use proptest::prelude::*;

fn gf(q: u64) -> FiniteField {
    FiniteField::gf(q).unwrap()
}

fn random_matrix(f: &FiniteField, s: &mut Sampler, n: usize) -> Matrix<FiniteField> {
    let rows = (0..n).map(|_| (0..n).map(|_| s.element(f)).collect()).collect();
    Matrix::from_rows(f, rows).unwrap()
}

fn random_vec(f: &FiniteField, s: &mut Sampler, n: usize) -> Vec<u32> {
    (0..n).map(|_| s.element(f)).collect()
}

#[test]
fn square_class_matches_sqrt_exhaustively() {
    for q in [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49] {
        let f = gf(q);
        for a in f.elements().unwrap().into_iter().filter(|a| *a != 0) {
            let has_root = f.elements().unwrap().iter().any(|r| f.mul(r, r) == a);
            let trivial = f.square_class(&a).unwrap() == SquareClass::Trivial;
            assert_eq!(has_root, trivial, "GF({q}) a={a}");
            assert_eq!(f.sqrt(&a).unwrap().is_some(), has_root);
        }
    }
}

#[test]
fn frobenius_is_a_ring_automorphism() {
    for q in [9, 25] {
        let f = gf(q);
        let all = f.elements().unwrap();
        for a in &all {
            let fa = f.frobenius(a).unwrap();
            assert_eq!(f.frobenius(&fa).unwrap(), *a);
            for b in &all {
                let fb = f.frobenius(b).unwrap();
                assert_eq!(f.frobenius(&f.mul(a, b)).unwrap(), f.mul(&fa, &fb));
                assert_eq!(f.frobenius(&f.add(a, b)).unwrap(), f.add(&fa, &fb));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(qi in 0usize..6, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = gf([2, 7, 8, 9, 25, 121][qi]);
        let (a, b, c) = (f.element_from_bits(a), f.element_from_bits(b), f.element_from_bits(c));
        prop_assert_eq!(f.add(&a, &b), f.add(&b, &a));
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
        if a != 0 {
            prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
    }

    #[test]
    fn linalg_invariants(seed in any::<u64>(), n in 1usize..6) {
        let f = gf(9);
        let mut s = Sampler::new(seed);
        let (a, b, c) = (random_matrix(&f, &mut s, n), random_matrix(&f, &mut s, n), random_matrix(&f, &mut s, n));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().det().unwrap(), f.mul(&a.det().unwrap(), &b.det().unwrap()));
        prop_assert_eq!(a.rank(), a.column_basis().len());
        let y = random_vec(&f, &mut s, n);
        let ay = a.apply(&y).unwrap();
        let x = a.solve_preimage(&ay).unwrap().expect("image vector has a preimage");
        prop_assert_eq!(a.apply(&x).unwrap(), ay);
        if a.det().unwrap() != 0 {
            prop_assert!(a.mul(&a.inverse().unwrap()).unwrap().is_identity());
        }
    }

    #[test]
    fn similitude_is_multiplicative(seed in any::<u64>(), qi in 0usize..4, ki in 0usize..2) {
        let f = gf([3, 5, 7, 9][qi]);
        let kind = [GroupKind::GSp(2), GroupKind::GOEven(2)][ki];
        let mut s = Sampler::new(seed);
        let g = s.element_of(kind, &f).unwrap();
        let h = s.element_of(kind, &f).unwrap();
        let mu = |m: &Matrix<FiniteField>| similitude(m, kind).unwrap().unwrap();
        prop_assert_eq!(mu(&g.mul(&h).unwrap()), f.mul(&mu(&g), &mu(&h)));
        let d = decompose(&g, kind).unwrap();
        prop_assert_eq!(d.mu, mu(&g));
    }

    #[test]
    fn isometries_decompose_to_special_diagonals(seed in any::<u64>(), qi in 0usize..4) {
        let f = gf([3, 5, 7, 9][qi]);
        let mut s = Sampler::new(seed);
        let g = s.element_of(GroupKind::Sp(2), &f).unwrap();
        let d = decompose(&g, GroupKind::GSp(2)).unwrap();
        prop_assert!(d.diagonal.is_identity());
        let g = s.element_of(GroupKind::GSp(3), &f).unwrap();
        let d = decompose(&g, GroupKind::GSp(3)).unwrap();
        prop_assert_eq!(g.det().unwrap(), d.diagonal.det().unwrap());
    }

    #[test]
    fn wall_form_relations(seed in any::<u64>(), qi in 0usize..4) {
        let f = gf([3, 5, 7, 9][qi]);
        let kind = GroupKind::OEven(2);
        let beta = standard_form(kind, &f).unwrap();
        let mut s = Sampler::new(seed);
        let g = s.element_of(kind, &f).unwrap();
        let one_minus_g = Matrix::identity(&f, 4).sub(&g).unwrap();
        let (y1, y2) = (random_vec(&f, &mut s, 4), random_vec(&f, &mut s, 4));
        let u = one_minus_g.apply(&y1).unwrap();
        let v = one_minus_g.apply(&y2).unwrap();
        // [u, v]_g = B(u, y2) and [v, gu]_g = B(v, g y1) since (1 - g)(g y1) = g u.
        let uv = bilinear(&u, &y2, &beta).unwrap();
        let v_gu = bilinear(&v, &g.apply(&y1).unwrap(), &beta).unwrap();
        prop_assert_eq!(uv, f.neg(&v_gu));
        // Independence of the preimage.
        let y2b = one_minus_g.solve_preimage(&v).unwrap().unwrap();
        prop_assert_eq!(bilinear(&u, &y2b, &beta).unwrap(), uv);
        prop_assert!(wall_gram(&g, &beta).is_ok());
    }

    #[test]
    fn token_one_parameter_law(qi in 0usize..3, a in any::<u64>(), b in any::<u64>()) {
        let f = gf([5, 7, 9][qi]);
        let (a, b) = (f.element_from_bits(a), f.element_from_bits(b));
        for kind in [GroupKind::GSp(2), GroupKind::GOEven(3), GroupKind::GOOdd(2)] {
            for tok in all_tokens(kind, &f, &a) {
                let Token::X { row, col, .. } = tok else { continue };
                let x = |t: u32| elementary(kind, &f, &Token::x(row, col, t)).unwrap();
                prop_assert_eq!(x(a).mul(&x(b)).unwrap(), x(f.add(&a, &b)));
                prop_assert!(x(a).mul(&x(f.neg(&a))).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn spinor_norm_is_a_homomorphism(seed in any::<u64>(), qi in 0usize..4) {
        let f = gf([3, 5, 7, 9][qi]);
        let kind = GroupKind::OOdd(2);
        let mut s = Sampler::new(seed);
        let g = s.element_of(kind, &f).unwrap();
        let h = s.element_of(kind, &f).unwrap();
        let th = |m: &Matrix<FiniteField>| spinor_elimination(m, kind).unwrap();
        prop_assert_eq!(th(&g.mul(&h).unwrap()), th(&g).mul(&th(&h)));
    }

    #[test]
    fn polynomial_involutions(seed in any::<u64>(), deg in 1usize..6) {
        let f = gf(9);
        let mut s = Sampler::new(seed);
        let mut c: Vec<u32> = (0..deg).map(|_| s.element(&f)).collect();
        c.push(f.one());
        c[0] = s.nonzero(&f);
        let p = Poly::new(&f, c);
        let pu = u_reciprocal(&p).unwrap();
        prop_assert_eq!(u_reciprocal(&pu).unwrap(), p.clone());
        prop_assert_eq!(is_self_u_reciprocal(&p).unwrap(), pu == p);
        match dual(&p) {
            Ok(d) => prop_assert_eq!(dual(&d).unwrap(), p),
            Err(e) => prop_assert_eq!(e, PolyError::ForbiddenRoot),
        }
    }
}

#[test]
fn generators_are_isometries_exhaustively() {
    for q in [3, 5, 7, 9] {
        let f = gf(q);
        for kind in [GroupKind::Sp(3), GroupKind::OEven(3), GroupKind::OOdd(3)] {
            for t in f.elements().unwrap() {
                for tok in all_tokens(kind, &f, &t) {
                    let m = elementary(kind, &f, &tok).unwrap();
                    assert!(membership(&m, kind).unwrap().is_some(), "{kind} q={q} {tok:?}");
                }
            }
            if kind.is_orthogonal() && !kind.is_odd_orthogonal() {
                let w = elementary(kind, &f, &Token::W { index: 3 }).unwrap();
                assert!(w.mul(&w).unwrap().is_identity());
            }
        }
    }
}

#[test]
fn closed_series_identities() {
    let closed = series(SeriesKind::Closed, 20).unwrap();
    for n in 1..=20 {
        assert_eq!(closed.coeffs[n], z_closed(n));
    }
    let real = series(SeriesKind::Real, 20).unwrap();
    assert_eq!(real, closed.mul(&closed.substitute_power(2)));
}

#[test]
fn brute_force_class_invariants() {
    for (kind, q) in [(GroupKind::Gl(2), 3), (GroupKind::U(3), 2), (GroupKind::Sp(2), 3), (GroupKind::Gl(3), 3)] {
        let g = build_group(kind, q, DEFAULT_CAP).unwrap();
        assert!(g.check_closure(5000), "{kind}");
        let cl = conjugacy_classes(&g);
        assert_eq!(cl.sizes.iter().sum::<u64>(), g.order() as u64);
        let cents = class_centralizers(&g, &cl);
        for (size, z) in cl.sizes.iter().zip(&cents) {
            assert_eq!(size * z.len() as u64, g.order() as u64);
        }
        let rep = z_classes(&g, &cl, &cents);
        let mut seen: Vec<usize> = rep.clusters.iter().flat_map(|c| c.classes.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..cl.len()).collect::<Vec<_>>());
        for c in &rep.clusters {
            assert!(c.classes.iter().all(|&k| cents[k].len() as u64 == c.centralizer_order));
        }
    }
}

#[test]
fn gl_z_count_matches_series_for_large_q() {
    let fq = series(SeriesKind::FiniteLargeQ, 3).unwrap();
    for (n, q) in [(2usize, 3u64), (2, 5), (3, 4), (3, 5)] {
        let g = build_group(GroupKind::Gl(n), q, DEEP_CAP).unwrap();
        let cl = conjugacy_classes(&g);
        let cents = class_centralizers(&g, &cl);
        let z = z_classes(&g, &cl, &cents).z_count();
        assert_eq!(num_bigint::BigInt::from(z), fq.coeffs[n], "GL({n},{q})");
    }
}
