use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use elimkit::field::{Field, FiniteField, SquareClass};
use elimkit::forms::{similitude, standard_form, GroupKind};
use elimkit::gauss::{canonical_diagonal, decompose, verify};
use elimkit::generators::{all_tokens, elementary, eval_word, w_pair, w_pair_closed_form, Token};
use elimkit::linalg::Matrix;
use elimkit::polyclass::enumerate_self_u_irreducibles;
use elimkit::sample::Sampler;
use elimkit::spinor::spinor_all;
use elimkit::zbrute::{analyze, build_group, DEFAULT_CAP};
use elimkit::zcount::{series, SeriesKind};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn z_count(kind: GroupKind, q: u64) -> Result<usize, String> {
    analyze(kind, q, DEFAULT_CAP).map(|(_, _, r)| r.z_count()).map_err(|e| format!("{kind} q={q}: {e}"))
}

fn table_rows() -> Outcome {
    let rows = [
        (SeriesKind::Closed, [1, 3, 6, 14, 27, 58, 111, 223, 424, 817]),
        (SeriesKind::Real, [1, 4, 7, 20, 36, 87, 162, 355, 666, 1367]),
        (SeriesKind::FiniteLargeQ, [1, 4, 8, 22, 42, 103, 199, 441, 859, 1784]),
    ];
    for (kind, want) in rows {
        let s = series(kind, 10).map_err(|e| e.to_string())?;
        let got: Vec<i64> = s.coeffs[1..].iter().map(|c| i64::try_from(c).unwrap()).collect();
        ensure(got == want, || format!("{kind:?}: got {got:?}"))?;
    }
    Ok(())
}

fn brute_force_tables() -> Outcome {
    let mut cases = Vec::new();
    for (q, z) in [(2, 3), (3, 4), (4, 4), (5, 4)] {
        cases.push((GroupKind::Gl(2), q, z));
        cases.push((GroupKind::U(2), q, z));
    }
    cases.extend([
        (GroupKind::Gl(3), 2, 5),
        (GroupKind::U(3), 2, 7),
        (GroupKind::Gl(4), 2, 11),
        (GroupKind::U(4), 2, 15),
    ]);
    for (kind, q, want) in cases {
        let got = z_count(kind, q)?;
        ensure(got == want, || format!("{kind} q={q}: {got} z-classes, expected {want}"))?;
    }
    Ok(())
}

fn decomposition_roundtrip() -> Outcome {
    let kinds = [
        GroupKind::GSp(2),
        GroupKind::GSp(3),
        GroupKind::GOEven(2),
        GroupKind::GOEven(3),
        GroupKind::GOOdd(2),
        GroupKind::GOOdd(3),
    ];
    let mut sampler = Sampler::new(20240601);
    for q in [3, 5, 7, 9] {
        let f = FiniteField::gf(q).unwrap();
        for kind in kinds {
            for trial in 0..1000 {
                let g = sampler.element_of(kind, &f).map_err(|e| e.to_string())?;
                let d = decompose(&g, kind).map_err(|e| format!("{kind} q={q} #{trial}: {e}"))?;
                ensure(verify(&d, &g), || format!("{kind} q={q} #{trial}: verify failed"))?;
                let canon = canonical_diagonal(kind, &f, &d.mu, &d.lambda, d.alpha.as_ref()).unwrap();
                ensure(canon == d.diagonal, || format!("{kind} q={q} #{trial}: diagonal not canonical"))?;
            }
        }
    }
    Ok(())
}

fn check_spinor(g: &Matrix<FiniteField>, kind: GroupKind, what: &str) -> Result<SquareClass, String> {
    let r = spinor_all(g, kind).map_err(|e| format!("{what}: {e}"))?;
    ensure(r.agree(), || format!("{what}: methods disagree {r:?}"))?;
    ensure(r.reflection_count <= kind.dim(), || format!("{what}: {} reflections", r.reflection_count))?;
    Ok(r.elimination)
}

fn spinor_agreement() -> Outcome {
    let mut sampler = Sampler::new(77);
    for q in [3, 5, 7, 9] {
        let f = FiniteField::gf(q).unwrap();
        let o2 = build_group(GroupKind::OEven(1), q, DEFAULT_CAP).map_err(|e| e.to_string())?;
        for i in 0..o2.order() as u32 {
            check_spinor(&o2.matrix(i), GroupKind::OEven(1), &format!("O(2,{q}) #{i}"))?;
        }
        for kind in [GroupKind::OEven(2), GroupKind::OOdd(2), GroupKind::OEven(3)] {
            for trial in 0..1000 {
                let g = sampler.element_of(kind, &f).map_err(|e| e.to_string())?;
                check_spinor(&g, kind, &format!("{kind} q={q} #{trial}"))?;
            }
            for trial in 0..1000 {
                let g = sampler.element_of(kind, &f).map_err(|e| e.to_string())?;
                let h = sampler.element_of(kind, &f).map_err(|e| e.to_string())?;
                let what = format!("{kind} q={q} pair #{trial}");
                let tg = check_spinor(&g, kind, &what)?;
                let th = check_spinor(&h, kind, &what)?;
                let tgh = check_spinor(&g.mul(&h).unwrap(), kind, &what)?;
                ensure(tgh == tg.mul(&th), || format!("{what}: not multiplicative"))?;
            }
        }
    }
    Ok(())
}

fn spinor_spot_values() -> Outcome {
    for q in [3, 5, 7, 9] {
        let f = FiniteField::gf(q).unwrap();
        let elems = f.elements().unwrap();
        for kind in [GroupKind::OEven(1), GroupKind::OEven(2), GroupKind::OEven(3), GroupKind::OOdd(1), GroupKind::OOdd(2)] {
            for t in &elems {
                for tok in all_tokens(kind, &f, t) {
                    if matches!(tok, Token::W { .. }) {
                        continue;
                    }
                    let m = elementary(kind, &f, &tok).unwrap();
                    let c = check_spinor(&m, kind, &format!("{kind} q={q} {tok:?}"))?;
                    ensure(c.is_trivial(), || format!("{kind} q={q} {tok:?}: {c}"))?;
                }
            }
            if !kind.is_odd_orthogonal() {
                let w = elementary(kind, &f, &Token::W { index: kind.size() }).unwrap();
                let c = check_spinor(&w, kind, &format!("{kind} q={q} w_l"))?;
                ensure(c.is_trivial(), || format!("{kind} q={q} w_l: {c}"))?;
            }
            let lay = kind.layout().unwrap();
            let l = kind.size() as i32;
            for lam in elems.iter().filter(|x| !f.is_zero(x)) {
                let mut d = vec![f.one(); kind.dim()];
                d[lay.pos(l)] = *lam;
                d[lay.pos(-l)] = f.inv(lam).unwrap();
                let m = Matrix::diagonal(&f, &d);
                let c = check_spinor(&m, kind, &format!("{kind} q={q} h({lam})"))?;
                let want = f.square_class(lam).unwrap();
                ensure(c == want, || format!("{kind} q={q} h({lam}): {c} vs {want}"))?;
            }
        }
    }
    Ok(())
}

fn cross_module() -> Outcome {
    let fq = series(SeriesKind::FiniteLargeQ, 4).map_err(|e| e.to_string())?;
    for (n, q) in [(2, 3), (2, 4), (2, 5), (3, 4)] {
        let gl = z_count(GroupKind::Gl(n), q)?;
        let u = z_count(GroupKind::U(n), q)?;
        let s = usize::try_from(&fq.coeffs[n]).unwrap();
        ensure(gl == s && u == s, || format!("(n,q)=({n},{q}): GL {gl}, U {u}, series {s}"))?;
    }
    for (n, want_gl, want_u) in [(3, 5, 7), (4, 11, 15)] {
        let gl = z_count(GroupKind::Gl(n), 2)?;
        let u = z_count(GroupKind::U(n), 2)?;
        ensure((gl, u) == (want_gl, want_u), || format!("n={n}, q=2: GL {gl}, U {u}"))?;
    }
    Ok(())
}

fn ennola() -> Outcome {
    for (q, q2) in [(2u64, 4u64), (3, 9), (5, 25)] {
        let f = FiniteField::gf(q2).unwrap();
        let polys = enumerate_self_u_irreducibles(&f, 4).map_err(|e| e.to_string())?;
        for p in &polys {
            let d = p.degree().unwrap();
            ensure(d % 2 == 1, || format!("GF({q2}): even degree {}", p.format()))?;
        }
        let linear = polys.iter().filter(|p| p.degree() == Some(1)).count() as u64;
        ensure(linear == q + 1, || format!("GF({q2}): {linear} linear, expected {}", q + 1))?;
    }
    Ok(())
}

fn generator_sanity() -> Outcome {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = FiniteField::gf(q).unwrap();
        let mut kinds = vec![GroupKind::GSp(2), GroupKind::GSp(3)];
        if q % 2 == 1 {
            kinds.extend((1..=3).map(GroupKind::GOEven));
            kinds.extend((1..=3).map(GroupKind::GOOdd));
        }
        for kind in kinds {
            for t in f.elements().unwrap() {
                for tok in all_tokens(kind, &f, &t) {
                    let m = elementary(kind, &f, &tok).unwrap();
                    let mu = similitude(&m, kind).map_err(|e| e.to_string())?;
                    ensure(mu == Some(f.one()), || format!("{kind} q={q} {tok:?}: mu {mu:?}"))?;
                }
            }
            for i in 1..=kind.size() {
                let w = eval_word(&f, &w_pair(kind, &f, i).unwrap()).unwrap();
                ensure(w == w_pair_closed_form(kind, &f, i).unwrap(), || format!("{kind} q={q}: w_pair({i})"))?;
            }
            ensure(standard_form(kind, &f).is_ok(), || format!("{kind}: no form"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 z-count table rows", table_rows),
        ("2 brute-force z-class tables", brute_force_tables),
        ("3 decomposition roundtrip", decomposition_roundtrip),
        ("4 spinor norm triple agreement", spinor_agreement),
        ("5 spinor norm spot values", spinor_spot_values),
        ("6 GL/U/series cross-check", cross_module),
        ("7 self-U-reciprocal irreducibles have odd degree", ennola),
        ("8 generator sanity", generator_sanity),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
