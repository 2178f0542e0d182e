//! Group families, their split forms, the similitude character, the quadratic
//! form, Wall's residual form and discriminants.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{Field, FieldError, SquareClass};
use crate::linalg::{Layout, LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("{0} preserves no form")]
    NoForm(GroupKind),
    #[error("invalid group: {0}")]
    InvalidKind(String),
    #[error("matrix is not an isometry of the form")]
    NotIsometry,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    WrongSize { expected: usize, rows: usize, cols: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A classical group family with its rank parameter.
///
/// `GSp`, `Sp`, `GOEven`, `OEven` carry `l` (dimension `2l`); `GOOdd`, `OOdd`
/// carry `l` (dimension `2l + 1`); `Gl`, `Sl`, `U` carry the dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Gl(usize),
    Sl(usize),
    GSp(usize),
    Sp(usize),
    GOEven(usize),
    OEven(usize),
    GOOdd(usize),
    OOdd(usize),
    U(usize),
}

impl GroupKind {
    /// Builds a kind from its command-line token and size parameter (`l` for
    /// the form groups, `n` for `gl`, `sl`, `u`).
    pub fn from_token(token: &str, size: usize) -> Result<GroupKind, FormError> {
        Ok(match token {
            "gl" => GroupKind::Gl(size),
            "sl" => GroupKind::Sl(size),
            "gsp" => GroupKind::GSp(size),
            "sp" => GroupKind::Sp(size),
            "go-even" => GroupKind::GOEven(size),
            "o-even" => GroupKind::OEven(size),
            "go-odd" => GroupKind::GOOdd(size),
            "o-odd" => GroupKind::OOdd(size),
            "u" => GroupKind::U(size),
            other => return Err(FormError::InvalidKind(format!("unknown group `{other}`"))),
        })
    }

    pub fn token(&self) -> &'static str {
        match self {
            GroupKind::Gl(_) => "gl",
            GroupKind::Sl(_) => "sl",
            GroupKind::GSp(_) => "gsp",
            GroupKind::Sp(_) => "sp",
            GroupKind::GOEven(_) => "go-even",
            GroupKind::OEven(_) => "o-even",
            GroupKind::GOOdd(_) => "go-odd",
            GroupKind::OOdd(_) => "o-odd",
            GroupKind::U(_) => "u",
        }
    }

    /// The `l` or `n` parameter.
    pub fn size(&self) -> usize {
        match *self {
            GroupKind::Gl(n)
            | GroupKind::Sl(n)
            | GroupKind::GSp(n)
            | GroupKind::Sp(n)
            | GroupKind::GOEven(n)
            | GroupKind::OEven(n)
            | GroupKind::GOOdd(n)
            | GroupKind::OOdd(n)
            | GroupKind::U(n) => n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            GroupKind::Gl(n) | GroupKind::Sl(n) | GroupKind::U(n) => n,
            GroupKind::GSp(l) | GroupKind::Sp(l) | GroupKind::GOEven(l) | GroupKind::OEven(l) => 2 * l,
            GroupKind::GOOdd(l) | GroupKind::OOdd(l) => 2 * l + 1,
        }
    }

    pub fn layout(&self) -> Option<Layout> {
        match *self {
            GroupKind::GSp(l) | GroupKind::Sp(l) | GroupKind::GOEven(l) | GroupKind::OEven(l) => Some(Layout::even(l)),
            GroupKind::GOOdd(l) | GroupKind::OOdd(l) => Some(Layout::odd(l)),
            _ => None,
        }
    }

    pub fn is_symplectic(&self) -> bool {
        matches!(self, GroupKind::GSp(_) | GroupKind::Sp(_))
    }

    pub fn is_orthogonal(&self) -> bool {
        matches!(self, GroupKind::GOEven(_) | GroupKind::OEven(_) | GroupKind::GOOdd(_) | GroupKind::OOdd(_))
    }

    pub fn is_odd_orthogonal(&self) -> bool {
        matches!(self, GroupKind::GOOdd(_) | GroupKind::OOdd(_))
    }

    /// Sp and O: the kernel of the similitude character.
    pub fn is_isometry_group(&self) -> bool {
        matches!(self, GroupKind::Sp(_) | GroupKind::OEven(_) | GroupKind::OOdd(_))
    }

    /// The similitude group containing this isometry group (identity on the
    /// other kinds).
    pub fn similitude_kind(&self) -> GroupKind {
        match *self {
            GroupKind::Sp(l) => GroupKind::GSp(l),
            GroupKind::OEven(l) => GroupKind::GOEven(l),
            GroupKind::OOdd(l) => GroupKind::GOOdd(l),
            k => k,
        }
    }

    pub fn isometry_kind(&self) -> GroupKind {
        match *self {
            GroupKind::GSp(l) => GroupKind::Sp(l),
            GroupKind::GOEven(l) => GroupKind::OEven(l),
            GroupKind::GOOdd(l) => GroupKind::OOdd(l),
            k => k,
        }
    }

    /// Checks the size and field constraints of the family.
    pub fn validate<F: Field>(&self, field: &F) -> Result<(), FormError> {
        let bad = |msg: String| Err(FormError::InvalidKind(msg));
        let size = self.size();
        if size == 0 {
            return bad(format!("{self} needs a positive size"));
        }
        if self.is_symplectic() && size < 2 {
            return bad(format!("{self}: symplectic groups need l >= 2"));
        }
        if self.is_orthogonal() && field.characteristic() == 2 {
            return bad(format!("{self}: orthogonal groups need odd characteristic"));
        }
        if let GroupKind::U(_) = self {
            let ok = field.order().is_some() && field.frobenius(&field.one()).is_ok();
            if !ok {
                return bad(format!("{self}: unitary groups need a field GF(q^2)"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GroupKind::Gl(_) => "GL",
            GroupKind::Sl(_) => "SL",
            GroupKind::GSp(_) => "GSp",
            GroupKind::Sp(_) => "Sp",
            GroupKind::GOEven(_) | GroupKind::GOOdd(_) => "GO",
            GroupKind::OEven(_) | GroupKind::OOdd(_) => "O",
            GroupKind::U(_) => "U",
        };
        write!(f, "{name}({})", self.dim())
    }
}

impl FromStr for GroupKind {
    type Err = FormError;

    /// `token:size`, e.g. `go-odd:2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tok, size) = s
            .split_once(':')
            .ok_or_else(|| FormError::InvalidKind(format!("expected `kind:size`, got `{s}`")))?;
        let size = size
            .parse()
            .map_err(|_| FormError::InvalidKind(format!("bad size in `{s}`")))?;
        GroupKind::from_token(tok, size)
    }
}

/// The Gram matrix of the split form preserved by `kind`.
pub fn standard_form<F: Field>(kind: GroupKind, field: &F) -> Result<Matrix<F>, FormError> {
    let n = kind.dim();
    let mut beta = Matrix::zero(field, n, n);
    match kind {
        GroupKind::Gl(_) | GroupKind::Sl(_) => return Err(FormError::NoForm(kind)),
        GroupKind::U(_) => return Ok(Matrix::identity(field, n)),
        GroupKind::GSp(l) | GroupKind::Sp(l) => {
            for i in 0..l {
                beta.set(i, l + i, field.one());
                beta.set(l + i, i, field.neg(&field.one()));
            }
        }
        GroupKind::GOEven(l) | GroupKind::OEven(l) => {
            for i in 0..l {
                beta.set(i, l + i, field.one());
                beta.set(l + i, i, field.one());
            }
        }
        GroupKind::GOOdd(l) | GroupKind::OOdd(l) => {
            beta.set(0, 0, field.from_i64(2));
            for i in 1..=l {
                beta.set(i, l + i, field.one());
                beta.set(l + i, i, field.one());
            }
        }
    }
    Ok(beta)
}

fn check_size<F: Field>(g: &Matrix<F>, n: usize) -> Result<(), FormError> {
    if g.rows() != n || g.cols() != n {
        return Err(FormError::WrongSize { expected: n, rows: g.rows(), cols: g.cols() });
    }
    Ok(())
}

/// Conjugate transpose with respect to the Frobenius involution.
pub fn conjugate_transpose<F: Field>(g: &Matrix<F>) -> Result<Matrix<F>, FieldError> {
    let f = g.field();
    let mut out = g.transpose();
    for r in 0..out.rows() {
        for c in 0..out.cols() {
            let v = f.frobenius(out.get(r, c))?;
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// The scalar `mu` with `g^T beta g = mu beta` (conjugate transpose for U),
/// or `None` when no such nonzero scalar exists.
///
/// For GL and SL there is no form; the result is `Some(det g)` for invertible
/// `g` and `None` otherwise.
pub fn similitude<F: Field>(g: &Matrix<F>, kind: GroupKind) -> Result<Option<F::Elem>, FormError> {
    let f = g.field();
    check_size(g, kind.dim())?;
    if matches!(kind, GroupKind::Gl(_) | GroupKind::Sl(_)) {
        let d = g.det()?;
        return Ok((!f.is_zero(&d)).then_some(d));
    }
    let beta = standard_form(kind, f)?;
    let gt = if let GroupKind::U(_) = kind { conjugate_transpose(g)? } else { g.transpose() };
    let m = gt.mul(&beta)?.mul(g)?;
    let (r, c) = (0..beta.rows())
        .flat_map(|r| (0..beta.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| !f.is_zero(beta.get(r, c)))
        .expect("forms are nonzero");
    let mu = f.div(m.get(r, c), beta.get(r, c))?;
    if f.is_zero(&mu) || m != beta.scale(&mu) {
        return Ok(None);
    }
    Ok(Some(mu))
}

/// Group membership. Returns the similitude character of `g` when `g` lies
/// in `kind` (for GL and SL the determinant).
pub fn membership<F: Field>(g: &Matrix<F>, kind: GroupKind) -> Result<Option<F::Elem>, FormError> {
    let f = g.field();
    let Some(mu) = similitude(g, kind)? else { return Ok(None) };
    let ok = match kind {
        GroupKind::Sl(_) | GroupKind::Sp(_) | GroupKind::OEven(_) | GroupKind::OOdd(_) => f.is_one(&mu),
        GroupKind::U(_) => f.is_one(&mu),
        _ => true,
    };
    Ok(ok.then_some(mu))
}

/// `B(u, v) = u^T beta v`.
pub fn bilinear<F: Field>(u: &[F::Elem], v: &[F::Elem], beta: &Matrix<F>) -> Result<F::Elem, FormError> {
    let f = beta.field();
    let bv = beta.apply(v)?;
    if u.len() != bv.len() {
        return Err(LinalgError::DimensionMismatch("vector length".into()).into());
    }
    Ok(u.iter().zip(&bv).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))))
}

/// `Q(v) = B(v, v) / 2`.
pub fn quadratic<F: Field>(v: &[F::Elem], beta: &Matrix<F>) -> Result<F::Elem, FormError> {
    let f = beta.field();
    if f.characteristic() == 2 {
        return Err(FieldError::EvenCharacteristic.into());
    }
    Ok(f.div(&bilinear(v, v, beta)?, &f.from_i64(2))?)
}

pub fn is_isometry<F: Field>(g: &Matrix<F>, beta: &Matrix<F>) -> Result<bool, FormError> {
    check_size(g, beta.rows())?;
    Ok(g.transpose().mul(beta)?.mul(g)? == *beta)
}

/// Gram matrix of Wall's form on the residual space `V_g = Im(I - g)`.
///
/// The basis is the pivot-column basis `u_1..u_r` of `I - g`; entry `(i, j)`
/// is `B(u_i, y_j)` where `(I - g) y_j = u_j`.
pub fn wall_gram<F: Field>(g: &Matrix<F>, beta: &Matrix<F>) -> Result<Matrix<F>, FormError> {
    if !is_isometry(g, beta)? {
        return Err(FormError::NotIsometry);
    }
    let f = g.field();
    let one_minus_g = Matrix::identity(f, g.rows()).sub(g)?;
    let us = one_minus_g.column_basis();
    let ys = us
        .iter()
        .map(|u| {
            one_minus_g
                .solve_preimage(u)?
                .ok_or_else(|| LinalgError::DimensionMismatch("basis vector outside the image".into()))
        })
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let r = us.len();
    let mut m = Matrix::zero(f, r, r);
    for i in 0..r {
        for j in 0..r {
            m.set(i, j, bilinear(&us[i], &ys[j], beta)?);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discriminant {
    /// The form is degenerate (`det = 0`).
    Degenerate,
    Class(SquareClass),
}

/// Square class of `det m`; the empty matrix has trivial discriminant.
pub fn discriminant<F: Field>(m: &Matrix<F>) -> Result<Discriminant, FormError> {
    if m.rows() == 0 && m.cols() == 0 {
        return Ok(Discriminant::Class(SquareClass::Trivial));
    }
    let d = m.det()?;
    if m.field().is_zero(&d) {
        return Ok(Discriminant::Degenerate);
    }
    Ok(Discriminant::Class(m.field().square_class(&d)?))
}
