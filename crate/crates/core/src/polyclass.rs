//! U-reciprocal and dual polynomials.
//!
//! For `f` of degree `n` with `f(0) != 0`:
//!
//! - `f~(x) = conj(f(0))^-1 x^n conj(f)(1/x)` (over GF(q^2), `conj` the
//!   Frobenius `a -> a^q`);
//! - `f*(x) = f(0)^-1 x^n f(1/x)`.

use thiserror::Error;

use crate::field::{Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("polynomial has a root in {{0, 1, -1}}")]
    ForbiddenRoot,
    #[error("the zero polynomial is not allowed here")]
    Zero,
    #[error("degree bound {0} is out of range")]
    DegreeTooLarge(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A polynomial with coefficients listed constant term first; trailing zeros
/// are trimmed, so the last coefficient is the nonzero leading one.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// `x - a`.
    pub fn linear(field: &F, a: &F::Elem) -> Self {
        Poly::new(field, vec![field.neg(a), field.one()])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn constant_term(&self) -> F::Elem {
        self.coeffs.first().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn mul(&self, other: &Poly<F>) -> Poly<F> {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::new(f, Vec::new());
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, divisor: &Poly<F>) -> Result<Poly<F>, PolyError> {
        let f = &self.field;
        let dd = divisor.degree().ok_or(PolyError::Zero)?;
        let lead_inv = f.inv(divisor.coeffs.last().unwrap()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let factor = f.mul(&r[top], &lead_inv);
            let shift = top - dd;
            for (k, c) in divisor.coeffs.iter().enumerate() {
                r[shift + k] = f.sub(&r[shift + k], &f.mul(&factor, c));
            }
            r.pop();
            while r.last().is_some_and(|c| f.is_zero(c)) {
                r.pop();
            }
        }
        Ok(Poly::new(f, r))
    }

    /// Reversal `x^n f(1/x)` with each coefficient mapped by `op`, scaled so
    /// that the constant term of `f` maps to 1.
    fn reversed(&self, op: impl Fn(&F::Elem) -> Result<F::Elem, FieldError>) -> Result<Poly<F>, PolyError> {
        let f = &self.field;
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        let c0 = op(&self.constant_term())?;
        let scale = f.inv(&c0).ok_or(PolyError::ZeroConstantTerm)?;
        let coeffs = self
            .coeffs
            .iter()
            .rev()
            .map(|c| Ok(f.mul(&scale, &op(c)?)))
            .collect::<Result<Vec<_>, FieldError>>()?;
        Ok(Poly::new(f, coeffs))
    }

    /// `1 + x + x^2` style text, highest degree first.
    pub fn format(&self) -> String {
        let f = &self.field;
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let coef = if f.is_one(c) && k > 0 { String::new() } else { f.format(c) };
            let mono = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            let sep = if !coef.is_empty() && !mono.is_empty() { "*" } else { "" };
            terms.push(format!("{coef}{sep}{mono}"));
        }
        terms.join(" + ")
    }
}

pub fn u_reciprocal<F: Field>(p: &Poly<F>) -> Result<Poly<F>, PolyError> {
    let f = p.field().clone();
    p.reversed(|c| f.frobenius(c))
}

pub fn is_self_u_reciprocal<F: Field>(p: &Poly<F>) -> Result<bool, PolyError> {
    Ok(u_reciprocal(p)? == *p)
}

fn check_dual_domain<F: Field>(p: &Poly<F>) -> Result<(), PolyError> {
    let f = p.field();
    if p.is_zero() {
        return Err(PolyError::Zero);
    }
    for x in [f.zero(), f.one(), f.neg(&f.one())] {
        if f.is_zero(&p.eval(&x)) {
            return Err(PolyError::ForbiddenRoot);
        }
    }
    Ok(())
}

pub fn dual<F: Field>(p: &Poly<F>) -> Result<Poly<F>, PolyError> {
    check_dual_domain(p)?;
    p.reversed(|c| Ok(c.clone()))
}

pub fn is_self_dual<F: Field>(p: &Poly<F>) -> Result<bool, PolyError> {
    Ok(dual(p)? == *p)
}

/// Monic polynomials of degree `d`, constant term most significant in the
/// enumeration order.
fn monic_of_degree<'a, F: Field + 'a>(field: &F, elems: &'a [F::Elem], d: usize) -> impl Iterator<Item = Poly<F>> + 'a {
    let q = elems.len() as u64;
    let field = field.clone();
    (0..q.pow(d as u32)).map(move |mut idx| {
        let mut c = vec![field.zero(); d + 1];
        c[d] = field.one();
        for k in (0..d).rev() {
            c[k] = elems[(idx % q) as usize].clone();
            idx /= q;
        }
        Poly::new(&field, c)
    })
}

/// Irreducibility over a finite field by trial division with every monic
/// polynomial of degree at most half the degree.
pub fn is_irreducible<F: Field>(p: &Poly<F>) -> Result<bool, PolyError> {
    let f = p.field();
    let n = p.degree().ok_or(PolyError::Zero)?;
    if n == 0 {
        return Ok(false);
    }
    let elems = f.elements().ok_or_else(|| FieldError::Spec("irreducibility needs a finite field".into()))?;
    for d in 1..=n / 2 {
        for g in monic_of_degree(f, &elems, d) {
            if p.rem(&g)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All monic irreducible self-U-reciprocal polynomials over `field = GF(q^2)`
/// of degree `1..=dmax`, grouped by degree.
pub fn enumerate_self_u_irreducibles<F: Field>(field: &F, dmax: usize) -> Result<Vec<Poly<F>>, PolyError> {
    if dmax > 5 {
        return Err(PolyError::DegreeTooLarge(dmax));
    }
    let elems = field.elements().ok_or_else(|| FieldError::Spec("enumeration needs a finite field".into()))?;
    field.frobenius(&field.one())?;
    // A self-U-reciprocal f has a_0 * conj(a_0) = 1 and
    // a_{n-j} = conj(a_j) / conj(a_0); it is fixed by a_0 and a_1..a_{n/2}.
    let norm_one: Vec<F::Elem> = elems
        .iter()
        .filter(|a| !field.is_zero(a) && field.is_one(&field.mul(a, &field.frobenius(a).unwrap())))
        .cloned()
        .collect();
    let q = elems.len() as u64;
    let mut out = Vec::new();
    for n in 1..=dmax {
        let free = n / 2;
        let mut found = Vec::new();
        for a0 in &norm_one {
            let inv_conj_a0 = field.inv(&field.frobenius(a0)?).expect("nonzero");
            for mut idx in 0..q.pow(free as u32) {
                let mut c = vec![field.zero(); n + 1];
                c[0] = a0.clone();
                c[n] = field.one();
                for j in 1..=free {
                    c[j] = elems[(idx % q) as usize].clone();
                    idx /= q;
                }
                for j in 1..=free {
                    if n - j != j {
                        c[n - j] = field.mul(&field.frobenius(&c[j])?, &inv_conj_a0);
                    }
                }
                let p = Poly::new(field, c);
                if is_self_u_reciprocal(&p)? && is_irreducible(&p)? {
                    found.push(p);
                }
            }
        }
        out.extend(found);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    #[test]
    fn x_minus_one_is_self_u_reciprocal() {
        let f = FiniteField::new(2, 2).unwrap();
        let p = Poly::linear(&f, &1);
        assert_eq!(u_reciprocal(&p).unwrap(), p);
        assert!(is_self_u_reciprocal(&p).unwrap());
    }

    #[test]
    fn linear_u_reciprocal_formula() {
        let f = FiniteField::new(2, 2).unwrap();
        for lam in 1..4u32 {
            let expect = f.inv(&f.frobenius(&lam).unwrap()).unwrap();
            assert_eq!(u_reciprocal(&Poly::linear(&f, &lam)).unwrap(), Poly::linear(&f, &expect));
        }
    }

    #[test]
    fn generator_of_gf9_is_not_self_u() {
        let f = FiniteField::new(3, 2).unwrap();
        let g = f.primitive_element();
        assert!(!is_self_u_reciprocal(&Poly::linear(&f, &g)).unwrap());
        let p = Poly::linear(&f, &g);
        let prod = p.mul(&u_reciprocal(&p).unwrap());
        assert!(is_self_u_reciprocal(&prod).unwrap());
    }

    #[test]
    fn dual_examples() {
        let f = FiniteField::prime(7).unwrap();
        let p = Poly::new(&f, vec![1, 0, 1]);
        assert!(is_self_dual(&p).unwrap());
        assert_eq!(dual(&Poly::linear(&f, &2)).unwrap(), Poly::linear(&f, &4));
        assert_eq!(dual(&Poly::linear(&f, &1)), Err(PolyError::ForbiddenRoot));
        assert_eq!(dual(&Poly::linear(&f, &6)), Err(PolyError::ForbiddenRoot));
    }

    #[test]
    fn zero_constant_rejected() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(u_reciprocal(&Poly::new(&f, vec![0, 1])), Err(PolyError::ZeroConstantTerm));
    }

    #[test]
    fn enumeration_small_cases() {
        let f4 = FiniteField::new(2, 2).unwrap();
        let list = enumerate_self_u_irreducibles(&f4, 2).unwrap();
        assert_eq!(list.len(), 3);
        assert!(list.iter().all(|p| p.degree() == Some(1)));
        let f9 = FiniteField::new(3, 2).unwrap();
        let deg1 = enumerate_self_u_irreducibles(&f9, 1).unwrap();
        assert_eq!(deg1.len(), 4);
    }

    #[test]
    fn irreducibility() {
        let f = FiniteField::prime(3).unwrap();
        assert!(is_irreducible(&Poly::new(&f, vec![1, 0, 1])).unwrap());
        assert!(!is_irreducible(&Poly::new(&f, vec![2, 0, 1])).unwrap());
    }

    #[test]
    fn formatting() {
        let f = FiniteField::prime(5).unwrap();
        assert_eq!(Poly::new(&f, vec![2, 0, 1]).format(), "x^2 + 2");
        assert_eq!(Poly::new(&f, vec![1, 3]).format(), "3*x + 1");
    }
}
