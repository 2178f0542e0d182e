//! Reflections and the spinor norm, computed three ways: from the
//! elimination diagonal, from the discriminant of Wall's form, and from an
//! explicit factorization into reflections.

use thiserror::Error;

use crate::field::{Field, FieldError, SquareClass};
use crate::forms::{
    bilinear, discriminant, is_isometry, quadratic, standard_form, wall_gram, Discriminant, FormError, GroupKind,
};
use crate::gauss::{decompose, GaussError};
use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinorError {
    #[error("matrix is not an isometry of the form")]
    NotIsometry,
    #[error("reflection vector is isotropic")]
    Isotropic,
    #[error("spinor norms need an orthogonal group, got {0}")]
    WrongKind(GroupKind),
    #[error("Wall form is degenerate")]
    Degenerate,
    #[error("spinor norm computation failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `sigma_u(v) = v - (2 B(u,v) / B(u,u)) u`.
pub fn reflection<F: Field>(u: &[F::Elem], beta: &Matrix<F>) -> Result<Matrix<F>, SpinorError> {
    let f = beta.field();
    if f.characteristic() == 2 {
        return Err(FieldError::EvenCharacteristic.into());
    }
    let buu = bilinear(u, u, beta)?;
    if f.is_zero(&buu) {
        return Err(SpinorError::Isotropic);
    }
    let coef = f.div(&f.from_i64(2), &buu)?;
    let n = u.len();
    let row = beta.transpose().apply(u)?; // u^T beta as a column
    let mut m = Matrix::identity(f, n);
    for i in 0..n {
        for j in 0..n {
            let d = f.mul(&coef, &f.mul(&u[i], &row[j]));
            let v = f.sub(m.get(i, j), &d);
            m.set(i, j, v);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionFactorization<F: Field> {
    /// `g = sigma_{u_1} ... sigma_{u_m}`.
    pub vectors: Vec<Vec<F::Elem>>,
    pub verified: bool,
}

impl<F: Field> ReflectionFactorization<F> {
    /// `prod Q(u_i)` modulo squares.
    pub fn spinor_norm(&self, beta: &Matrix<F>) -> Result<SquareClass, SpinorError> {
        let f = beta.field();
        let mut acc = f.one();
        for u in &self.vectors {
            acc = f.mul(&acc, &quadratic(u, beta)?);
        }
        Ok(f.square_class(&acc)?)
    }
}

fn residual<F: Field>(h: &Matrix<F>) -> Result<Matrix<F>, LinalgError> {
    h.sub(&Matrix::identity(h.field(), h.rows()))
}

fn totally_isotropic<F: Field>(basis: &[Vec<F::Elem>], beta: &Matrix<F>) -> Result<bool, SpinorError> {
    let f = beta.field();
    for a in basis {
        for b in basis {
            if !f.is_zero(&bilinear(a, b, beta)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Nonzero linear combinations `sum c_i b_i`, coefficient vectors in
/// counting order over a small scalar set (all of GF(q) for q <= 9,
/// otherwise -2..=2), at most `limit` of them.
fn combinations<'a, F: Field>(
    f: &'a F,
    basis: &'a [Vec<F::Elem>],
    limit: usize,
) -> impl Iterator<Item = Vec<F::Elem>> + 'a {
    let scalars: Vec<F::Elem> = match f.elements() {
        Some(all) if all.len() <= 9 => all,
        _ => (-2..=2).map(|k| f.from_i64(k)).collect(),
    };
    let d = basis.len();
    let n = basis.first().map_or(0, Vec::len);
    let s = scalars.len() as u64;
    let total = s.checked_pow(d as u32).unwrap_or(u64::MAX);
    (1..total).take(limit).map(move |idx| {
        let mut k = idx;
        let mut v = vec![f.zero(); n];
        for b in basis {
            let c = &scalars[(k % s) as usize];
            k /= s;
            if f.is_zero(c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x = f.add(x, &f.mul(c, y));
            }
        }
        v
    })
}

/// Factors an isometry into at most `n` reflections.
///
/// Each step multiplies the remainder `h` on the left by a reflection
/// `sigma_u` with `u` in the residual space of `h`, choosing `u` so that the
/// residual space shrinks by one dimension and does not become totally
/// isotropic. If the residual space of `h` is already totally isotropic a
/// reflection outside it is applied first.
pub fn reflection_factor<F: Field>(g: &Matrix<F>, beta: &Matrix<F>) -> Result<ReflectionFactorization<F>, SpinorError> {
    let f = beta.field();
    if f.characteristic() == 2 {
        return Err(FieldError::EvenCharacteristic.into());
    }
    if !is_isometry(g, beta)? {
        return Err(SpinorError::NotIsometry);
    }
    let n = g.rows();
    let mut h = g.clone();
    let mut vectors = Vec::new();
    let anisotropic = |v: &Vec<F::Elem>| -> Result<bool, SpinorError> { Ok(!f.is_zero(&bilinear(v, v, beta)?)) };
    let steps_cap = 2 * n + 4;
    while !h.is_identity() {
        if vectors.len() > steps_cap {
            return Err(SpinorError::Internal("reflection factorization did not terminate".into()));
        }
        let res = residual(&h)?;
        let basis = res.column_basis();
        let d = basis.len();
        let mut chosen: Option<(Vec<F::Elem>, Matrix<F>)> = None;
        if totally_isotropic(&basis, beta)? {
            let units: Vec<Vec<F::Elem>> = (0..n)
                .map(|k| {
                    let mut e = vec![f.zero(); n];
                    e[k] = f.one();
                    e
                })
                .collect();
            for w in units.iter().cloned().chain(combinations(f, &units, 20_000)) {
                if !anisotropic(&w)? {
                    continue;
                }
                let next = reflection(&w, beta)?.mul(&h)?;
                let nb = residual(&next)?.column_basis();
                if !totally_isotropic(&nb, beta)? {
                    chosen = Some((w, next));
                    break;
                }
            }
        } else {
            let mut fallback = None;
            for u in (0..n).map(|k| res.col(k)).chain(combinations(f, &basis, 20_000)) {
                if u.iter().all(|x| f.is_zero(x)) || !anisotropic(&u)? {
                    continue;
                }
                let next = reflection(&u, beta)?.mul(&h)?;
                let nres = residual(&next)?;
                let nb = nres.column_basis();
                if nb.len() + 1 != d {
                    continue;
                }
                if nb.is_empty() || !totally_isotropic(&nb, beta)? {
                    chosen = Some((u, next));
                    break;
                }
                if fallback.is_none() {
                    fallback = Some((u, next));
                }
            }
            if chosen.is_none() {
                chosen = fallback;
            }
        }
        let (u, next) = chosen.ok_or_else(|| SpinorError::Internal("no usable reflection found".into()))?;
        vectors.push(u);
        h = next;
    }
    let mut prod = Matrix::identity(f, n);
    for u in &vectors {
        prod = prod.mul(&reflection(u, beta)?)?;
    }
    let verified = prod == *g;
    if !verified {
        return Err(SpinorError::Internal("reflection product does not reproduce g".into()));
    }
    Ok(ReflectionFactorization { vectors, verified })
}

fn orthogonal_kind(kind: GroupKind) -> Result<GroupKind, SpinorError> {
    if !kind.is_orthogonal() {
        return Err(SpinorError::WrongKind(kind));
    }
    Ok(kind.isometry_kind())
}

/// Square class of the `lambda` of the elimination diagonal.
pub fn spinor_elimination<F: Field>(g: &Matrix<F>, kind: GroupKind) -> Result<SquareClass, SpinorError> {
    let kind = orthogonal_kind(kind)?;
    let d = decompose(g, kind)?;
    Ok(g.field().square_class(&d.lambda)?)
}

/// Discriminant of Wall's form on the residual space.
pub fn spinor_wall<F: Field>(g: &Matrix<F>, beta: &Matrix<F>) -> Result<SquareClass, SpinorError> {
    let m = match wall_gram(g, beta) {
        Err(FormError::NotIsometry) => return Err(SpinorError::NotIsometry),
        other => other?,
    };
    let class = match discriminant(&m)? {
        Discriminant::Degenerate => return Err(SpinorError::Degenerate),
        Discriminant::Class(c) => c,
    };
    if let Some(alt) = spinor_wall_regular(g, beta)? {
        if alt != class {
            return Err(SpinorError::Internal("regular-element formula disagrees with Wall form".into()));
        }
    }
    Ok(class)
}

/// For `g` with non-degenerate residual space: the class of
/// `det((1 - g)|V_g) * disc(V_g, B)`. `None` when `V_g` is degenerate.
pub fn spinor_wall_regular<F: Field>(g: &Matrix<F>, beta: &Matrix<F>) -> Result<Option<SquareClass>, SpinorError> {
    let f = beta.field();
    let n = g.rows();
    let one_minus_g = Matrix::identity(f, n).sub(g)?;
    let basis = one_minus_g.column_basis();
    let r = basis.len();
    if r == 0 {
        return Ok(Some(SquareClass::Trivial));
    }
    let mut gram = Matrix::zero(f, r, r);
    for i in 0..r {
        for j in 0..r {
            gram.set(i, j, bilinear(&basis[i], &basis[j], beta)?);
        }
    }
    let det_n = gram.det()?;
    if f.is_zero(&det_n) {
        return Ok(None);
    }
    let u = Matrix::from_columns(f, n, &basis);
    let mut t = Matrix::zero(f, r, r);
    for (j, b) in basis.iter().enumerate() {
        let image = one_minus_g.apply(b)?;
        let coords = u
            .solve_preimage(&image)?
            .ok_or_else(|| SpinorError::Internal("residual space is not stable".into()))?;
        for (i, c) in coords.into_iter().enumerate() {
            t.set(i, j, c);
        }
    }
    let det_t = t.det()?;
    Ok(Some(f.square_class(&f.mul(&det_t, &det_n))?))
}

/// Spinor norm by all three methods, for an orthogonal `kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinorReport {
    pub elimination: SquareClass,
    pub wall: SquareClass,
    pub reflections: SquareClass,
    pub reflection_count: usize,
}

impl SpinorReport {
    pub fn agree(&self) -> bool {
        self.elimination == self.wall && self.wall == self.reflections
    }
}

pub fn spinor_all<F: Field>(g: &Matrix<F>, kind: GroupKind) -> Result<SpinorReport, SpinorError> {
    let kind = orthogonal_kind(kind)?;
    let beta = standard_form(kind, g.field())?;
    let fac = reflection_factor(g, &beta)?;
    Ok(SpinorReport {
        elimination: spinor_elimination(g, kind)?,
        wall: spinor_wall(g, &beta)?,
        reflections: fac.spinor_norm(&beta)?,
        reflection_count: fac.vectors.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::generators::{elementary, Token};

    fn setup() -> (FiniteField, Matrix<FiniteField>) {
        let f = FiniteField::prime(7).unwrap();
        let beta = standard_form(GroupKind::OEven(2), &f).unwrap();
        (f, beta)
    }

    #[test]
    fn reflection_basics() {
        let (f, beta) = setup();
        let u = vec![1, 2, 3, 0];
        let s = reflection(&u, &beta).unwrap();
        let neg: Vec<u32> = u.iter().map(|x| f.neg(x)).collect();
        assert_eq!(s.apply(&u).unwrap(), neg);
        assert!(s.mul(&s).unwrap().is_identity());
        assert_eq!(reflection(&[1, 0, 0, 0], &beta), Err(SpinorError::Isotropic));
    }

    #[test]
    fn w_l_is_a_reflection() {
        let (f, beta) = setup();
        let w = elementary(GroupKind::OEven(2), &f, &Token::W { index: 2 }).unwrap();
        assert_eq!(reflection(&[0, 1, 0, 1], &beta).unwrap(), w);
    }

    #[test]
    fn factor_identity_and_reflection() {
        let (f, beta) = setup();
        let id = Matrix::identity(&f, 4);
        assert!(reflection_factor(&id, &beta).unwrap().vectors.is_empty());
        let s = reflection(&[1, 1, 2, 0], &beta).unwrap();
        let fac = reflection_factor(&s, &beta).unwrap();
        assert_eq!(fac.vectors.len(), 1);
        assert!(fac.verified);
    }

    #[test]
    fn wall_of_reflection_is_q() {
        let (f, beta) = setup();
        let u = vec![1, 0, 3, 0];
        let q = quadratic(&u, &beta).unwrap();
        let s = reflection(&u, &beta).unwrap();
        assert_eq!(spinor_wall(&s, &beta).unwrap(), f.square_class(&q).unwrap());
    }

    #[test]
    fn wall_of_minus_identity() {
        let (f, beta) = setup();
        let minus = Matrix::identity(&f, 4).scale(&f.neg(&1));
        let expect = f.square_class(&f.mul(&f.pow(&2, 4), &beta.det().unwrap())).unwrap();
        assert_eq!(spinor_wall(&minus, &beta).unwrap(), expect);
    }

    #[test]
    fn torus_class() {
        let (f, _) = setup();
        let g = Matrix::diagonal(&f, &[1, 3, 1, 5]);
        let r = spinor_all(&g, GroupKind::OEven(2)).unwrap();
        assert_eq!(r.elimination, SquareClass::NonResidue);
        assert!(r.agree());
    }
}
