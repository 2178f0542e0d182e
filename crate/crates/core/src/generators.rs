//! Elementary generators, words in them, and the derived words `w_{i,-i}`
//! and `h_l(lambda)`.
//!
//! Indices are signed labels (see [`crate::linalg::Layout`]). For `gl`/`sl`
//! the token `x[i,j](t)` with `1 <= i != j <= n` is the transvection
//! `I + t e_{i,j}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::forms::GroupKind;
use crate::linalg::{Layout, LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("token {token} is not a generator of {kind}")]
    IllegalToken { token: String, kind: GroupKind },
    #[error("index {index} out of range for {kind}")]
    IndexOutOfRange { index: usize, kind: GroupKind },
    #[error("{0} has no such derived word")]
    Unsupported(GroupKind),
    #[error("cannot parse token `{0}`")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token<E> {
    /// `x[row,col](t)`.
    X { row: i32, col: i32, t: E },
    /// `w[l]`.
    W { index: usize },
    /// `h[i](lambda)`, shorthand for the word of [`torus_h`].
    H { index: usize, lambda: E },
}

impl<E: Clone> Token<E> {
    pub fn x(row: i32, col: i32, t: E) -> Self {
        Token::X { row, col, t }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word<E> {
    pub kind: GroupKind,
    pub tokens: Vec<Token<E>>,
}

impl<E: Clone> Word<E> {
    pub fn empty(kind: GroupKind) -> Self {
        Word { kind, tokens: Vec::new() }
    }

    pub fn new(kind: GroupKind, tokens: Vec<Token<E>>) -> Self {
        Word { kind, tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn concat(&self, other: &Word<E>) -> Word<E> {
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().cloned());
        Word { kind: self.kind, tokens }
    }
}

/// Checks the index constraints of `tok` for `kind` and that its parameter
/// is a field element.
pub fn check_token<F: Field>(kind: GroupKind, field: &F, tok: &Token<F::Elem>) -> Result<(), GenError> {
    let illegal = || GenError::IllegalToken { token: format_token(field, tok), kind };
    match tok {
        Token::X { row, col, t } => {
            if !field.contains(t) {
                return Err(FieldError::NotInField(format!("{t:?}")).into());
            }
            let (r, c) = (*row, *col);
            let ok = match kind {
                GroupKind::Gl(n) | GroupKind::Sl(n) => {
                    let n = n as i32;
                    r != c && (1..=n).contains(&r) && (1..=n).contains(&c)
                }
                GroupKind::U(_) => false,
                _ => {
                    let l = kind.size() as i32;
                    let in_range = r.abs() <= l && c.abs() <= l;
                    let sym = kind.is_symplectic();
                    let odd = kind.is_odd_orthogonal();
                    in_range
                        && match (r.signum(), c.signum()) {
                            (1, 1) => r != c,
                            (1, -1) => if sym { r <= -c } else { r < -c },
                            (-1, 1) => if sym { -r <= c } else { -r < c },
                            (1, 0) | (0, 1) => odd,
                            _ => false,
                        }
                }
            };
            if ok {
                Ok(())
            } else {
                Err(illegal())
            }
        }
        Token::W { index } => {
            if kind.is_orthogonal() && *index == kind.size() {
                Ok(())
            } else {
                Err(illegal())
            }
        }
        Token::H { index, lambda } => {
            if !field.contains(lambda) || field.is_zero(lambda) {
                return Err(illegal());
            }
            if kind.is_symplectic() && (1..=kind.size()).contains(index) {
                Ok(())
            } else {
                Err(illegal())
            }
        }
    }
}

/// Nonzero entries of `T - I` for an `X` or `W` token, in machine positions.
fn offsets<F: Field>(kind: GroupKind, field: &F, tok: &Token<F::Elem>) -> Vec<(usize, usize, F::Elem)> {
    match tok {
        Token::X { row, col, t } => {
            let (i, j) = (*row, *col);
            let Some(lay) = kind.layout() else {
                return vec![((i - 1) as usize, (j - 1) as usize, t.clone())];
            };
            let p = |a: i32| lay.pos(a);
            let neg_t = field.neg(t);
            if i != 0 && j != 0 && i.signum() == j.signum() {
                return vec![(p(i), p(j), t.clone()), (p(-j), p(-i), neg_t)];
            }
            if i > 0 && j < 0 {
                let jj = -j;
                if i == jj {
                    return vec![(p(i), p(-i), t.clone())];
                }
                let second = if kind.is_symplectic() { t.clone() } else { neg_t };
                return vec![(p(i), p(j), t.clone()), (p(jj), p(-i), second)];
            }
            if i < 0 && j > 0 {
                let ii = -i;
                if ii == j {
                    return vec![(p(i), p(j), t.clone())];
                }
                let second = if kind.is_symplectic() { t.clone() } else { neg_t };
                return vec![(p(i), p(j), t.clone()), (p(-j), p(ii), second)];
            }
            let two_t = field.add(t, t);
            let neg_t2 = field.neg(&field.mul(t, t));
            if j == 0 {
                vec![(p(i), 0, two_t), (0, p(-i), neg_t), (p(i), p(-i), neg_t2)]
            } else {
                vec![(p(-j), 0, field.neg(&two_t)), (0, p(j), t.clone()), (p(-j), p(j), neg_t2)]
            }
        }
        Token::W { index } => {
            let lay = kind.layout().expect("w only occurs in orthogonal groups");
            let m1 = field.neg(&field.one());
            let (a, b) = (lay.pos(*index as i32), lay.pos(-(*index as i32)));
            vec![(a, a, m1.clone()), (b, b, m1.clone()), (a, b, m1.clone()), (b, a, m1)]
        }
        Token::H { .. } => unreachable!("h tokens are expanded before use"),
    }
}

/// Expands `h` tokens; other tokens are returned unchanged.
fn primitive_tokens<F: Field>(kind: GroupKind, field: &F, tok: &Token<F::Elem>) -> Vec<Token<F::Elem>> {
    match tok {
        Token::H { index, lambda } => h_tokens(field, *index, lambda),
        t => vec![t.clone()],
    }
    .into_iter()
    .inspect(|t| debug_assert!(check_token(kind, field, t).is_ok()))
    .collect()
}

/// `m <- T m`.
pub fn apply_left<F: Field>(kind: GroupKind, m: &mut Matrix<F>, tok: &Token<F::Elem>) {
    let field = m.field().clone();
    for t in primitive_tokens(kind, &field, tok).into_iter().rev() {
        let offs = offsets(kind, &field, &t);
        let mut delta: Vec<(usize, usize, F::Elem)> = Vec::new();
        for (r, c, v) in &offs {
            for j in 0..m.cols() {
                let x = m.get(*c, j);
                if !field.is_zero(x) {
                    delta.push((*r, j, field.mul(v, x)));
                }
            }
        }
        for (r, j, d) in delta {
            let v = field.add(m.get(r, j), &d);
            m.set(r, j, v);
        }
    }
}

/// `m <- m T`.
pub fn apply_right<F: Field>(kind: GroupKind, m: &mut Matrix<F>, tok: &Token<F::Elem>) {
    let field = m.field().clone();
    for t in primitive_tokens(kind, &field, tok) {
        let offs = offsets(kind, &field, &t);
        let mut delta: Vec<(usize, usize, F::Elem)> = Vec::new();
        for (r, c, v) in &offs {
            for i in 0..m.rows() {
                let x = m.get(i, *r);
                if !field.is_zero(x) {
                    delta.push((i, *c, field.mul(x, v)));
                }
            }
        }
        for (i, c, d) in delta {
            let v = field.add(m.get(i, c), &d);
            m.set(i, c, v);
        }
    }
}

/// The matrix of a single generator.
pub fn elementary<F: Field>(kind: GroupKind, field: &F, tok: &Token<F::Elem>) -> Result<Matrix<F>, GenError> {
    check_token(kind, field, tok)?;
    let mut m = Matrix::identity(field, kind.dim());
    apply_right(kind, &mut m, tok);
    Ok(m)
}

/// Left-to-right product of the token matrices.
pub fn eval_word<F: Field>(field: &F, word: &Word<F::Elem>) -> Result<Matrix<F>, GenError> {
    for t in &word.tokens {
        check_token(word.kind, field, t)?;
    }
    let mut m = Matrix::identity(field, word.kind.dim());
    for t in &word.tokens {
        apply_right(word.kind, &mut m, t);
    }
    Ok(m)
}

pub fn inverse_token<F: Field>(field: &F, tok: &Token<F::Elem>) -> Token<F::Elem> {
    match tok {
        Token::X { row, col, t } => Token::X { row: *row, col: *col, t: field.neg(t) },
        Token::W { index } => Token::W { index: *index },
        Token::H { index, lambda } => Token::H {
            index: *index,
            lambda: field.inv(lambda).expect("h parameters are nonzero"),
        },
    }
}

pub fn inverse_word<F: Field>(field: &F, word: &Word<F::Elem>) -> Word<F::Elem> {
    Word { kind: word.kind, tokens: word.tokens.iter().rev().map(|t| inverse_token(field, t)).collect() }
}

type Shape = Vec<Token<i64>>;

fn w_pair_memo() -> &'static Mutex<HashMap<(usize, usize), Shape>> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, usize), Shape>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `x_{a,b}(1) x_{b,a}(-1) x_{a,b}(1)` written with legal orthogonal tokens.
fn w_root(a: i32, b: i32) -> Shape {
    if a > 0 && b < 0 && a > -b {
        let (i, j) = (-b, a);
        return vec![Token::x(i, -j, -1), Token::x(-i, j, -1), Token::x(i, -j, -1)];
    }
    vec![Token::x(a, b, 1), Token::x(b, a, -1), Token::x(a, b, 1)]
}

fn w_pair_even_shape(l: usize, i: usize) -> Shape {
    if i == l {
        return vec![Token::W { index: l }];
    }
    if let Some(s) = w_pair_memo().lock().unwrap().get(&(l, i)) {
        return s.clone();
    }
    let (a, b) = ((i + 1) as i32, i as i32);
    let mut shape = w_pair_even_shape(l, i + 1);
    shape.extend(w_root(a, b));
    shape.extend(w_root(a, -b));
    w_pair_memo().lock().unwrap().insert((l, i), shape.clone());
    shape
}

/// A word for the signed permutation matrix swapping `e_i` and `e_{-i}`:
///
/// - symplectic: `I + e_{i,-i} - e_{-i,i} - e_{i,i} - e_{-i,-i}`;
/// - even orthogonal: `I - e_{i,-i} - e_{-i,i} - e_{i,i} - e_{-i,-i}`;
/// - odd orthogonal: the same with `-2 e_{0,0}` added.
pub fn w_pair<F: Field>(kind: GroupKind, field: &F, i: usize) -> Result<Word<F::Elem>, GenError> {
    let l = kind.size();
    if i == 0 || i > l {
        return Err(GenError::IndexOutOfRange { index: i, kind });
    }
    let ii = i as i32;
    let one = field.one();
    let m1 = field.neg(&one);
    let tokens = match kind {
        GroupKind::GSp(_) | GroupKind::Sp(_) => {
            vec![Token::x(ii, -ii, one.clone()), Token::x(-ii, ii, m1), Token::x(ii, -ii, one)]
        }
        GroupKind::GOOdd(_) | GroupKind::OOdd(_) => {
            vec![Token::x(0, ii, m1.clone()), Token::x(ii, 0, one), Token::x(0, ii, m1)]
        }
        GroupKind::GOEven(_) | GroupKind::OEven(_) => w_pair_even_shape(l, i)
            .into_iter()
            .map(|t| match t {
                Token::X { row, col, t } => Token::x(row, col, field.from_i64(t)),
                Token::W { index } => Token::W { index },
                Token::H { .. } => unreachable!(),
            })
            .collect(),
        _ => return Err(GenError::Unsupported(kind)),
    };
    Ok(Word::new(kind, tokens))
}

fn h_tokens<F: Field>(field: &F, i: usize, lambda: &F::Elem) -> Vec<Token<F::Elem>> {
    let ii = i as i32;
    let w = |t: F::Elem| {
        let minus_inv = field.neg(&field.inv(&t).expect("nonzero"));
        [Token::x(ii, -ii, t.clone()), Token::x(-ii, ii, minus_inv), Token::x(ii, -ii, t)]
    };
    let mut out = w(lambda.clone()).to_vec();
    out.extend(w(field.neg(&field.one())));
    out
}

/// The word `w(lambda) w(-1)` with `w(t) = x_{i,-i}(t) x_{-i,i}(-1/t) x_{i,-i}(t)`,
/// evaluating to the diagonal matrix with `lambda` at `i`, `1/lambda` at `-i`.
pub fn torus_h<F: Field>(kind: GroupKind, field: &F, i: usize, lambda: &F::Elem) -> Result<Word<F::Elem>, GenError> {
    if !kind.is_symplectic() {
        return Err(GenError::Unsupported(kind));
    }
    if i == 0 || i > kind.size() {
        return Err(GenError::IndexOutOfRange { index: i, kind });
    }
    if field.is_zero(lambda) {
        return Err(FieldError::DivisionByZero.into());
    }
    Ok(Word::new(kind, h_tokens(field, i, lambda)))
}

/// Every token of `kind` with parameter `t` (`w[l]` included for orthogonal
/// kinds).
pub fn all_tokens<F: Field>(kind: GroupKind, field: &F, t: &F::Elem) -> Vec<Token<F::Elem>> {
    let n = match kind.layout() {
        Some(_) => kind.size() as i32,
        None => kind.dim() as i32,
    };
    let labels: Vec<i32> = (-n..=n).collect();
    let mut out = Vec::new();
    for &r in &labels {
        for &c in &labels {
            let tok = Token::x(r, c, t.clone());
            if check_token(kind, field, &tok).is_ok() {
                out.push(tok);
            }
        }
    }
    if kind.is_orthogonal() {
        out.push(Token::W { index: kind.size() });
    }
    out
}

pub fn format_token<F: Field>(field: &F, tok: &Token<F::Elem>) -> String {
    match tok {
        Token::X { row, col, t } => format!("x[{row},{col}]({})", field.format(t)),
        Token::W { index } => format!("w[{index}]"),
        Token::H { index, lambda } => format!("h[{index}]({})", field.format(lambda)),
    }
}

pub fn format_word<F: Field>(field: &F, word: &Word<F::Elem>) -> String {
    word.tokens.iter().map(|t| format_token(field, t)).collect::<Vec<_>>().join(" ")
}

pub fn parse_token<F: Field>(field: &F, s: &str) -> Result<Token<F::Elem>, GenError> {
    let bad = || GenError::Parse(s.to_string());
    let s = s.trim();
    let head = s.chars().next().ok_or_else(bad)?;
    let rest = &s[1..];
    let rest = rest.strip_prefix('[').ok_or_else(bad)?;
    let close = rest.find(']').ok_or_else(bad)?;
    let idx: Vec<i32> = rest[..close]
        .split(',')
        .map(|x| x.trim().parse::<i32>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let tail = &rest[close + 1..];
    let param = if tail.is_empty() {
        None
    } else {
        let inner = tail.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        Some(field.parse(inner)?)
    };
    match (head, idx.as_slice(), param) {
        ('x', [r, c], Some(t)) => Ok(Token::X { row: *r, col: *c, t }),
        ('w', [i], None) if *i > 0 => Ok(Token::W { index: *i as usize }),
        ('h', [i], Some(lambda)) if *i > 0 => Ok(Token::H { index: *i as usize, lambda }),
        _ => Err(bad()),
    }
}

/// Splits on whitespace outside brackets and parentheses.
fn split_tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (k, ch) in s.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..k]);
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

pub fn parse_word<F: Field>(kind: GroupKind, field: &F, s: &str) -> Result<Word<F::Elem>, GenError> {
    let tokens = split_tokens(s)
        .into_iter()
        .map(|t| parse_token(field, t))
        .collect::<Result<Vec<_>, _>>()?;
    for t in &tokens {
        check_token(kind, field, t)?;
    }
    Ok(Word::new(kind, tokens))
}

impl fmt::Display for Token<i64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::X { row, col, t } => write!(f, "x[{row},{col}]({t})"),
            Token::W { index } => write!(f, "w[{index}]"),
            Token::H { index, lambda } => write!(f, "h[{index}]({lambda})"),
        }
    }
}

/// Expected matrix of `w_pair(kind, i)`, built entrywise.
pub fn w_pair_closed_form<F: Field>(kind: GroupKind, field: &F, i: usize) -> Result<Matrix<F>, GenError> {
    let lay: Layout = kind.layout().ok_or(GenError::Unsupported(kind))?;
    let n = kind.dim();
    let (a, b) = (lay.pos(i as i32), lay.pos(-(i as i32)));
    let mut m = Matrix::identity(field, n);
    let one = field.one();
    let m1 = field.neg(&one);
    m.set(a, a, field.zero());
    m.set(b, b, field.zero());
    if kind.is_symplectic() {
        m.set(a, b, one);
        m.set(b, a, m1);
    } else {
        m.set(a, b, m1.clone());
        m.set(b, a, m1.clone());
        if kind.is_odd_orthogonal() {
            m.set(0, 0, m1);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::forms::membership;

    fn gf(p: u32) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    #[test]
    fn gsp_long_root_token() {
        let f = gf(7);
        let kind = GroupKind::GSp(2);
        let m = elementary(kind, &f, &Token::x(1, -1, 3)).unwrap();
        let mut expect = Matrix::identity(&f, 4);
        expect.set(0, 2, 3);
        assert_eq!(m, expect);
    }

    #[test]
    fn w_l_matrix() {
        let f = gf(5);
        let kind = GroupKind::GOEven(2);
        let m = elementary(kind, &f, &Token::W { index: 2 }).unwrap();
        assert_eq!(m, w_pair_closed_form(kind, &f, 2).unwrap());
        assert!(m.mul(&m).unwrap().is_identity());
        assert!(elementary(kind, &f, &Token::W { index: 1 }).is_err());
    }

    #[test]
    fn odd_token_has_quadratic_entry() {
        let f = gf(7);
        let kind = GroupKind::GOOdd(2);
        let m = elementary(kind, &f, &Token::x(1, 0, 2)).unwrap();
        let lay = kind.layout().unwrap();
        assert_eq!(*m.get(lay.pos(1), lay.pos(-1)), f.from_i64(-4));
        assert_eq!(*m.get(lay.pos(1), 0), 4);
        assert_eq!(*m.get(0, lay.pos(-1)), f.from_i64(-2));
    }

    #[test]
    fn illegal_tokens_rejected() {
        let f = gf(7);
        assert!(check_token(GroupKind::GOEven(2), &f, &Token::x(1, -1, 1)).is_err());
        assert!(check_token(GroupKind::GSp(2), &f, &Token::x(1, 0, 1)).is_err());
        assert!(check_token(GroupKind::GSp(2), &f, &Token::x(2, -1, 1)).is_err());
        assert!(check_token(GroupKind::GOOdd(2), &f, &Token::x(-1, -2, 1)).is_err());
        assert!(check_token(GroupKind::GOOdd(2), &f, &Token::x(1, 3, 1)).is_err());
        assert!(check_token(GroupKind::GSp(2), &f, &Token::x(1, -2, 9)).is_err());
    }

    #[test]
    fn empty_and_inverse_pair() {
        let f = gf(5);
        let kind = GroupKind::GSp(2);
        assert!(eval_word(&f, &Word::empty(kind)).unwrap().is_identity());
        let w = Word::new(kind, vec![Token::x(1, 2, 3), Token::x(1, 2, 2)]);
        assert!(eval_word(&f, &w).unwrap().is_identity());
    }

    #[test]
    fn w_pairs_match_closed_forms() {
        let f = gf(7);
        for kind in [GroupKind::GSp(2), GroupKind::GSp(3), GroupKind::GOEven(3), GroupKind::GOEven(1), GroupKind::GOOdd(2)] {
            for i in 1..=kind.size() {
                let w = w_pair(kind, &f, i).unwrap();
                let m = eval_word(&f, &w).unwrap();
                assert_eq!(m, w_pair_closed_form(kind, &f, i).unwrap(), "{kind} i={i}");
                assert_eq!(membership(&m, kind.isometry_kind()).unwrap(), Some(1));
            }
        }
        assert!(w_pair(GroupKind::GSp(2), &f, 3).is_err());
    }

    #[test]
    fn torus_h_values() {
        let f = gf(7);
        let kind = GroupKind::GSp(2);
        let m = eval_word(&f, &torus_h(kind, &f, 2, &3).unwrap()).unwrap();
        assert_eq!(m, Matrix::diagonal(&f, &[1, 3, 1, 5]));
        assert!(eval_word(&f, &torus_h(kind, &f, 2, &1).unwrap()).unwrap().is_identity());
        let h = Word::new(kind, vec![Token::H { index: 2, lambda: 3 }, Token::H { index: 2, lambda: 5 }]);
        assert!(eval_word(&f, &h).unwrap().is_identity());
        assert!(torus_h(kind, &f, 2, &0).is_err());
    }

    #[test]
    fn word_text_roundtrip() {
        let f = FiniteField::new(3, 2).unwrap();
        let kind = GroupKind::GSp(2);
        let w = Word::new(kind, vec![Token::x(1, -2, 5), Token::H { index: 2, lambda: 7 }, Token::x(-1, 1, 0)]);
        let text = format_word(&f, &w);
        assert_eq!(text, "x[1,-2]([2,1]) h[2]([1,2]) x[-1,1]([0,0])");
        assert_eq!(parse_word(kind, &f, &text).unwrap(), w);
        let o = GroupKind::GOEven(2);
        let w2 = Word::new(o, vec![Token::W { index: 2 }, Token::x(2, 1, 1)]);
        assert_eq!(parse_word(o, &f, &format_word(&f, &w2)).unwrap(), w2);
        assert!(parse_word(kind, &f, "x[1,2](").is_err());
    }

    #[test]
    fn gl_transvection() {
        let f = gf(5);
        let m = elementary(GroupKind::Gl(3), &f, &Token::x(1, 3, 2)).unwrap();
        let mut expect = Matrix::identity(&f, 3);
        expect.set(0, 2, 2);
        assert_eq!(m, expect);
    }
}
