//! Gaussian elimination in GL, GSp and the split orthogonal similitude
//! groups.
//!
//! [`decompose`] writes `g = eval(left) * diagonal * eval(right)` where the
//! words consist of elementary generators and the diagonal has the shape
//!
//! - GSp(2l): `diag(1,...,1, mu,...,mu)`;
//! - GO(2l): `diag(1,...,1,lambda, mu,...,mu,mu/lambda)`;
//! - GO(2l+1): `diag(alpha, 1,...,1,lambda, mu,...,mu,mu/lambda)`, `alpha^2 = mu`,
//!   with `alpha` the root returned by [`Field::sqrt`].
//!
//! Row operations are left multiplications, column operations right
//! multiplications; the inverse of each applied generator is recorded.

use serde_json::Value;
use thiserror::Error;

use crate::field::{Field, FieldError, FieldSpec};
use crate::forms::{membership, FormError, GroupKind};
use crate::generators::{
    apply_left, apply_right, eval_word, format_word, inverse_token, parse_word, torus_h, w_pair, GenError, Token,
    Word,
};
use crate::linalg::{spec_matches, LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("matrix is not an element of {0}")]
    NotMember(GroupKind),
    #[error("elimination is not available for {0}")]
    Unsupported(GroupKind),
    #[error("the multiplier of an odd orthogonal similitude must be a square")]
    NonSquareMultiplier,
    #[error("elimination invariant violated: {0}")]
    Internal(String),
    #[error("malformed decomposition: {0}")]
    Format(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<F: Field> {
    pub kind: GroupKind,
    pub left: Word<F::Elem>,
    pub right: Word<F::Elem>,
    pub diagonal: Matrix<F>,
    pub mu: F::Elem,
    /// Always 1 for the symplectic kinds.
    pub lambda: F::Elem,
    /// Present for odd orthogonal kinds.
    pub alpha: Option<F::Elem>,
}

impl<F: Field> Decomposition<F> {
    pub fn word_length(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// `eval(left) * diagonal * eval(right)`.
    pub fn reconstruct(&self) -> Result<Matrix<F>, GaussError> {
        let f = self.diagonal.field();
        Ok(eval_word(f, &self.left)?.mul(&self.diagonal)?.mul(&eval_word(f, &self.right)?)?)
    }

    /// Line-oriented `key: value` text.
    pub fn to_text(&self) -> String {
        let f = self.diagonal.field();
        let mut out = String::new();
        out.push_str(&format!("kind: {}:{}\n", self.kind.token(), self.kind.size()));
        out.push_str(&format!("field: {}\n", f.spec().to_json()));
        out.push_str(&format!("left: {}\n", format_word(f, &self.left)));
        out.push_str(&format!("right: {}\n", format_word(f, &self.right)));
        out.push_str(&format!("diagonal: {}\n", self.diagonal.to_json()));
        out.push_str(&format!("mu: {}\n", f.format(&self.mu)));
        out.push_str(&format!("lambda: {}\n", f.format(&self.lambda)));
        if let Some(a) = &self.alpha {
            out.push_str(&format!("alpha: {}\n", f.format(a)));
        }
        out
    }

    /// Parses [`Decomposition::to_text`] output over `field`.
    pub fn from_text(field: &F, text: &str) -> Result<Self, GaussError> {
        let mut get = std::collections::HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| GaussError::Format(format!("expected `key: value`, got `{line}`")))?;
            get.insert(k.trim().to_string(), v.trim().to_string());
        }
        let need = |k: &str| get.get(k).cloned().ok_or_else(|| GaussError::Format(format!("missing `{k}`")));
        let kind: GroupKind = need("kind")?.parse()?;
        let spec_json: Value =
            serde_json::from_str(&need("field")?).map_err(|e| GaussError::Format(format!("field: {e}")))?;
        if !spec_matches(&FieldSpec::from_json(&spec_json)?, &field.spec()) {
            return Err(GaussError::Format("field does not match".into()));
        }
        let left = parse_word(kind, field, &need("left")?)?;
        let right = parse_word(kind, field, &need("right")?)?;
        let diag_json: Value =
            serde_json::from_str(&need("diagonal")?).map_err(|e| GaussError::Format(format!("diagonal: {e}")))?;
        let diagonal = Matrix::from_json(field, &diag_json)?;
        let mu = field.parse(&need("mu")?)?;
        let lambda = field.parse(&need("lambda")?)?;
        let alpha = get.get("alpha").map(|a| field.parse(a)).transpose()?;
        Ok(Decomposition { kind, left, right, diagonal, mu, lambda, alpha })
    }
}

/// `a = eval(left) * diag * eval(right)` for a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GlElimination<F: Field> {
    pub left: Word<F::Elem>,
    pub diag: Matrix<F>,
    pub right: Word<F::Elem>,
}

struct Elim<F: Field> {
    kind: GroupKind,
    f: F,
    m: Matrix<F>,
    left: Vec<Token<F::Elem>>,
    right_rev: Vec<Token<F::Elem>>,
}

impl<F: Field> Elim<F> {
    fn new(kind: GroupKind, g: &Matrix<F>) -> Self {
        Elim { kind, f: g.field().clone(), m: g.clone(), left: Vec::new(), right_rev: Vec::new() }
    }

    fn pos(&self, label: i32) -> usize {
        match self.kind.layout() {
            Some(lay) => lay.pos(label),
            None => (label - 1) as usize,
        }
    }

    fn at(&self, r: i32, c: i32) -> F::Elem {
        self.m.get(self.pos(r), self.pos(c)).clone()
    }

    fn row(&mut self, tok: Token<F::Elem>) {
        apply_left(self.kind, &mut self.m, &tok);
        self.left.push(inverse_token(&self.f, &tok));
    }

    fn col(&mut self, tok: Token<F::Elem>) {
        apply_right(self.kind, &mut self.m, &tok);
        self.right_rev.push(inverse_token(&self.f, &tok));
    }

    /// `m <- eval(word) * m`.
    fn row_word(&mut self, word: &Word<F::Elem>) {
        for tok in word.tokens.iter().rev() {
            self.row(tok.clone());
        }
    }

    fn finish(self) -> (Word<F::Elem>, Matrix<F>, Word<F::Elem>) {
        let mut right = self.right_rev;
        right.reverse();
        (Word::new(self.kind, self.left), self.m, Word::new(self.kind, right))
    }

    /// Classical elimination on the block with labels `1..=k`, using
    /// `row_i += t row_j` and `col_j += t col_i`. Leaves
    /// `diag(1,...,1,d)` or `diag(1,...,1,0,...,0)`; returns the rank.
    fn diagonalize(&mut self, k: usize) -> usize {
        let f = self.f.clone();
        let k = k as i32;
        for c in 1..=k {
            let found = (c..=k).find(|&r| !f.is_zero(&self.at(r, c)));
            let r = match found {
                Some(r) => r,
                None => {
                    let donor = (c + 1..=k).find(|&j| (c..=k).any(|r| !f.is_zero(&self.at(r, j))));
                    let Some(j) = donor else { return (c - 1) as usize };
                    self.col(Token::x(j, c, f.one()));
                    (c..=k).find(|&r| !f.is_zero(&self.at(r, c))).expect("column just filled")
                }
            };
            if r != c {
                let t = f.div(&f.sub(&f.one(), &self.at(c, c)), &self.at(r, c)).expect("nonzero");
                self.row(Token::x(c, r, t));
            } else if c < k && !f.is_one(&self.at(c, c)) {
                let p = self.at(c, c);
                let t = f.div(&f.sub(&f.sub(&f.one(), &p), &self.at(c + 1, c)), &p).expect("nonzero");
                if !f.is_zero(&t) {
                    self.row(Token::x(c + 1, c, t));
                }
                self.row(Token::x(c, c + 1, f.one()));
            }
            let pivot = self.at(c, c);
            for r in (1..=k).filter(|&r| r != c) {
                let v = self.at(r, c);
                if !f.is_zero(&v) {
                    let t = f.neg(&f.div(&v, &pivot).expect("nonzero"));
                    self.row(Token::x(r, c, t));
                }
            }
            for j in c + 1..=k {
                let v = self.at(c, j);
                if !f.is_zero(&v) {
                    let t = f.neg(&f.div(&v, &pivot).expect("nonzero"));
                    self.col(Token::x(c, j, t));
                }
            }
        }
        k as usize
    }

    /// Left-multiplies by the lower (`upper = false`) or upper unipotent
    /// block matrix with off-diagonal block `r`, given on labels `1..=n`.
    /// `r` must be symmetric (symplectic) or skew-symmetric (orthogonal).
    fn block_rows(&mut self, r: &[Vec<F::Elem>], upper: bool) {
        let f = self.f.clone();
        let sym = self.kind.is_symplectic();
        let n = r.len();
        for i in 0..n {
            let start = if sym { i } else { i + 1 };
            for j in start..n {
                let t = r[i][j].clone();
                if f.is_zero(&t) {
                    continue;
                }
                let (a, b) = ((i + 1) as i32, (j + 1) as i32);
                let tok = if upper { Token::x(a, -b, t) } else { Token::x(-a, b, t) };
                self.row(tok);
            }
        }
    }

    fn diag_a(&self, l: usize) -> Vec<F::Elem> {
        (1..=l as i32).map(|i| self.at(i, i)).collect()
    }

    /// `C <- C + R A` with `R = -C A^{-1}` restricted to labels `1..=m`.
    fn clear_c(&mut self, m: usize) -> Result<(), GaussError> {
        let f = self.f.clone();
        let d = self.diag_a(m);
        let r: Vec<Vec<F::Elem>> = (1..=m as i32)
            .map(|i| {
                (1..=m as i32)
                    .map(|j| f.neg(&f.div(&self.at(-i, j), &d[(j - 1) as usize]).expect("nonzero diagonal")))
                    .collect()
            })
            .collect();
        self.block_rows(&r, false);
        for i in 1..=m as i32 {
            for j in 1..=m as i32 {
                if !f.is_zero(&self.at(-i, j)) {
                    return Err(GaussError::Internal(format!("C entry ({},{j}) survived", -i)));
                }
            }
        }
        Ok(())
    }

    /// `B <- B + R D` with `R = -B D^{-1}`.
    fn clear_b(&mut self, l: usize) -> Result<(), GaussError> {
        let f = self.f.clone();
        let l = l as i32;
        let r: Vec<Vec<F::Elem>> = (1..=l)
            .map(|i| {
                (1..=l)
                    .map(|j| {
                        let dj = self.at(-j, -j);
                        f.div(&self.at(i, -j), &dj).map(|x| f.neg(&x))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()
            .map_err(|_| GaussError::Internal("D is not invertible".into()))?;
        self.block_rows(&r, true);
        Ok(())
    }

    /// Odd case: clears `X_i` and `E_i` wherever `A_ii != 0`.
    fn clear_xe(&mut self, l: usize) {
        let f = self.f.clone();
        for i in 1..=l as i32 {
            let d = self.at(i, i);
            let x = self.at(0, i);
            if !f.is_zero(&d) && !f.is_zero(&x) {
                self.row(Token::x(0, i, f.neg(&f.div(&x, &d).expect("nonzero"))));
            }
        }
        for i in 1..=l as i32 {
            let d = self.at(i, i);
            let e = self.at(i, 0);
            if !f.is_zero(&d) && !f.is_zero(&e) {
                let two_d = f.add(&d, &d);
                self.col(Token::x(i, 0, f.neg(&f.div(&e, &two_d).expect("nonzero"))));
            }
        }
    }

    /// Rank-deficient branch: clear `C11`, then swap `i <-> -i` for `i > m`.
    /// Afterwards `C = 0`, so `A` is invertible; re-diagonalizes.
    fn fix_rank(&mut self, l: usize, mut m: usize) -> Result<(), GaussError> {
        let mut passes = 0;
        while m < l {
            if passes == l {
                return Err(GaussError::Internal("rank of A did not reach l".into()));
            }
            passes += 1;
            self.clear_c(m)?;
            for i in m + 1..=l {
                let w = w_pair(self.kind, &self.f, i)?;
                self.row_word(&w);
            }
            m = self.diagonalize(l);
            if self.kind.is_odd_orthogonal() {
                self.clear_xe(l);
            }
        }
        Ok(())
    }
}

/// Elimination of a square matrix by transvections and one diagonal.
pub fn gl_eliminate<F: Field>(a: &Matrix<F>) -> Result<GlElimination<F>, GaussError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare.into());
    }
    let kind = GroupKind::Gl(a.rows());
    let mut e = Elim::new(kind, a);
    e.diagonalize(a.rows());
    let (left, diag, right) = e.finish();
    Ok(GlElimination { left, diag, right })
}

/// Writes `g` as a product of elementary generators and a diagonal matrix.
pub fn decompose<F: Field>(g: &Matrix<F>, kind: GroupKind) -> Result<Decomposition<F>, GaussError> {
    let f = g.field().clone();
    if !(kind.is_symplectic() || kind.is_orthogonal()) {
        return Err(GaussError::Unsupported(kind));
    }
    kind.validate(&f)?;
    let mu = match membership(g, kind) {
        Ok(Some(mu)) => mu,
        Ok(None) | Err(FormError::WrongSize { .. }) => return Err(GaussError::NotMember(kind)),
        Err(e) => return Err(e.into()),
    };
    let l = kind.size();
    let odd = kind.is_odd_orthogonal();
    let mut e = Elim::new(kind, g);

    let m = e.diagonalize(l);
    if odd {
        e.clear_xe(l);
    }
    if m < l {
        e.fix_rank(l, m)?;
    }
    e.clear_c(l)?;
    if odd {
        let zero_fy = (1..=l as i32).all(|i| f.is_zero(&e.at(-i, 0)) && f.is_zero(&e.at(0, -i)));
        let zero_xe = (1..=l as i32).all(|i| f.is_zero(&e.at(i, 0)) && f.is_zero(&e.at(0, i)));
        if !(zero_fy && zero_xe) {
            return Err(GaussError::Internal("X, Y, E, F not cleared".into()));
        }
    }
    e.clear_b(l)?;
    if !e.m.is_diagonal() {
        return Err(GaussError::Internal("result is not diagonal".into()));
    }

    let ll = l as i32;
    let mut lambda = e.at(ll, ll);
    if kind.is_symplectic() {
        if !f.is_one(&lambda) {
            let inv = f.inv(&lambda).ok_or_else(|| GaussError::Internal("lambda = 0".into()))?;
            let h = torus_h(kind, &f, l, &inv)?;
            e.row_word(&h);
        }
        lambda = f.one();
    }
    let mut alpha = None;
    if odd {
        let root = f.sqrt(&mu)?.ok_or(GaussError::NonSquareMultiplier)?;
        if e.m.get(0, 0) != &root {
            let mut flip = w_pair(kind, &f, l)?;
            flip.tokens.push(Token::W { index: l });
            e.row_word(&flip);
        }
        if e.m.get(0, 0) != &root {
            return Err(GaussError::Internal("alpha is not a square root of mu".into()));
        }
        alpha = Some(root);
    }
    let (left, diagonal, right) = e.finish();
    let d = Decomposition { kind, left, right, diagonal, mu, lambda, alpha };
    if !shape_ok(&d) {
        return Err(GaussError::Internal("diagonal has the wrong shape".into()));
    }
    Ok(d)
}

/// The canonical diagonal for the stated parameters.
pub fn canonical_diagonal<F: Field>(
    kind: GroupKind,
    field: &F,
    mu: &F::Elem,
    lambda: &F::Elem,
    alpha: Option<&F::Elem>,
) -> Result<Matrix<F>, GaussError> {
    let l = kind.size();
    let mut entries = Vec::with_capacity(kind.dim());
    if kind.is_odd_orthogonal() {
        entries.push(alpha.ok_or_else(|| GaussError::Format("missing alpha".into()))?.clone());
    }
    let lam_inv = field.inv(lambda).ok_or(FieldError::DivisionByZero)?;
    for i in 1..=l {
        entries.push(if i == l { lambda.clone() } else { field.one() });
    }
    for i in 1..=l {
        entries.push(if i == l { field.mul(mu, &lam_inv) } else { mu.clone() });
    }
    Ok(Matrix::diagonal(field, &entries))
}

fn shape_ok<F: Field>(d: &Decomposition<F>) -> bool {
    let f = d.diagonal.field();
    let kind = d.kind;
    if kind.is_symplectic() && !f.is_one(&d.lambda) {
        return false;
    }
    if kind.is_isometry_group() && !f.is_one(&d.mu) {
        return false;
    }
    if kind.is_odd_orthogonal() {
        match &d.alpha {
            Some(a) if f.mul(a, a) == d.mu => {}
            _ => return false,
        }
    } else if d.alpha.is_some() {
        return false;
    }
    match canonical_diagonal(kind, f, &d.mu, &d.lambda, d.alpha.as_ref()) {
        Ok(expect) => expect == d.diagonal,
        Err(_) => false,
    }
}

/// Whether `d` reconstructs `g` exactly and its diagonal has the canonical
/// shape for `d.kind`.
pub fn verify<F: Field>(d: &Decomposition<F>, g: &Matrix<F>) -> bool {
    if d.left.kind != d.kind || d.right.kind != d.kind || d.diagonal.field() != g.field() {
        return false;
    }
    if !shape_ok(d) {
        return false;
    }
    matches!(d.reconstruct(), Ok(m) if m == *g)
}
