//! Brute-force matrix groups over small finite fields: element lists,
//! conjugacy classes, centralizers and z-classes.
//!
//! Elements are stored as canonical codes: the row-major entries read as
//! base-`Q` digits (entry `(0,0)` most significant), where `Q` is the order
//! of the ambient field. The element list is sorted by code, so indices,
//! class representatives and reports are deterministic.

use std::collections::VecDeque;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldError, FiniteField, Field};
use crate::forms::{standard_form, FormError, GroupKind};
use crate::generators::{all_tokens, elementary, GenError};
use crate::linalg::Matrix;
use crate::sample::Sampler;

/// Default bound on the group order.
pub const DEFAULT_CAP: u64 = 400_000;
/// Bound used with `--deep`.
pub const DEEP_CAP: u64 = 60_000_000;
/// Largest ambient matrix count enumerated directly.
pub const FILTER_LIMIT: u64 = 400_000;

const MAX_DIM: usize = 6;
const SEED: u64 = 0x5eed_2b1e;

#[derive(Debug, Error)]
pub enum BruteError {
    #[error("group order {order} exceeds the cap {cap}")]
    CapExceeded { order: u128, cap: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("element is not in the group")]
    NotMember,
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Mat = [u8; MAX_DIM * MAX_DIM];

/// Addition, multiplication and inverse tables for a field of order <= 256.
#[derive(Debug, Clone)]
struct Tables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    conj: Vec<u8>,
}

impl Tables {
    fn new(f: &FiniteField, unitary: bool) -> Result<Tables, BruteError> {
        let q = f.size() as usize;
        if q > 256 {
            return Err(BruteError::Unsupported(format!("ambient field of order {q} > 256")));
        }
        let mut t = Tables {
            q,
            add: vec![0; q * q],
            mul: vec![0; q * q],
            neg: vec![0; q],
            inv: vec![0; q],
            conj: (0..q as u8).collect(),
        };
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                t.add[a as usize * q + b as usize] = f.add(&a, &b) as u8;
                t.mul[a as usize * q + b as usize] = f.mul(&a, &b) as u8;
            }
            t.neg[a as usize] = f.neg(&a) as u8;
            t.inv[a as usize] = f.inv(&a).unwrap_or(0) as u8;
            if unitary {
                t.conj[a as usize] = f.frobenius(&a)? as u8;
            }
        }
        Ok(t)
    }

    #[inline]
    fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// An explicit finite matrix group.
#[derive(Debug, Clone)]
pub struct Group {
    kind: GroupKind,
    q: u64,
    field: FiniteField,
    dim: usize,
    tables: Tables,
    codes: Vec<u64>,
    mats: Vec<Mat>,
    generators: Vec<u32>,
}

/// Order of `kind` over GF(q) (`U(n)` over GF(q^2)), when it has a formula.
pub fn classical_order(kind: GroupKind, q: u64) -> u128 {
    let q = q as u128;
    let pw = |e: usize| q.pow(e as u32);
    let sp = |l: usize| pw(l * l) * (1..=l).map(|i| pw(2 * i) - 1).product::<u128>();
    let o_even = |l: usize| 2 * pw(l * (l - 1)) * (pw(l) - 1) * (1..l).map(|i| pw(2 * i) - 1).product::<u128>();
    match kind {
        GroupKind::Gl(n) => (0..n).map(|i| pw(n) - pw(i)).product(),
        GroupKind::Sl(n) => (0..n).map(|i| pw(n) - pw(i)).product::<u128>() / (q - 1),
        GroupKind::Sp(l) => sp(l),
        GroupKind::GSp(l) => sp(l) * (q - 1),
        GroupKind::OEven(l) => o_even(l),
        GroupKind::GOEven(l) => o_even(l) * (q - 1),
        GroupKind::OOdd(l) => 2 * sp(l),
        GroupKind::GOOdd(l) => sp(l) * (q - 1),
        GroupKind::U(n) => {
            pw(n * (n - 1) / 2)
                * (1..=n)
                    .map(|i| if i % 2 == 0 { pw(i) - 1 } else { pw(i) + 1 })
                    .product::<u128>()
        }
    }
}

/// Builds the element list of `kind` over GF(q) (for `U(n)`: the matrices
/// over GF(q^2) with `conj(g)^T g = I`).
pub fn build_group(kind: GroupKind, q: u64, cap: u64) -> Result<Group, BruteError> {
    let dim = kind.dim();
    if dim == 0 || dim > MAX_DIM {
        return Err(BruteError::Unsupported(format!("matrix dimension {dim}")));
    }
    let unitary = matches!(kind, GroupKind::U(_));
    let ambient_q = if unitary { q.checked_mul(q).ok_or_else(|| BruteError::Unsupported("q too large".into()))? } else { q };
    let field = FiniteField::gf(ambient_q)?;
    kind.validate(&field)?;
    let expected = classical_order(kind, q);
    if expected > cap as u128 {
        return Err(BruteError::CapExceeded { order: expected, cap });
    }
    let tables = Tables::new(&field, unitary)?;
    let ambient = (ambient_q as u128).checked_pow((dim * dim) as u32).filter(|&a| a <= u64::MAX as u128);
    let Some(ambient) = ambient else {
        return Err(BruteError::Unsupported(format!("{kind} over GF({ambient_q}) does not fit 64-bit codes")));
    };
    let mut g = Group { kind, q, field, dim, tables, codes: Vec::new(), mats: Vec::new(), generators: Vec::new() };
    let form = g.form_table()?;
    if ambient as u64 <= FILTER_LIMIT {
        g.codes = (0..ambient as u64)
            .into_par_iter()
            .filter(|&c| g.is_member(&g.decode(c), form.as_ref()))
            .collect();
    } else {
        let seeds = g.seeds(form.as_ref(), ambient as u64)?;
        g.codes = g.closure(&seeds, cap, expected)?;
    }
    if g.codes.len() as u128 != expected {
        return Err(BruteError::Internal(format!(
            "{kind} over GF({q}): built {} elements, expected {expected}",
            g.codes.len()
        )));
    }
    g.mats = g.codes.par_iter().map(|&c| g.decode(c)).collect();
    g.generators = g.find_generators();
    Ok(g)
}

impl Group {
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// The `q` of the family (the ambient field is GF(q^2) for `U`).
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    /// A generating set, as element indices.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn identity(&self) -> u32 {
        let mut id = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..self.dim {
            id[i * MAX_DIM + i] = 1;
        }
        self.index_of_mat(&id).expect("identity is a member")
    }

    pub fn index_of_code(&self, code: u64) -> Option<u32> {
        self.codes.binary_search(&code).ok().map(|i| i as u32)
    }

    /// Index of the element with these rows (field-element encodings).
    pub fn index_of_rows(&self, rows: &[Vec<u32>]) -> Option<u32> {
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return None;
        }
        let mut m = [0u8; MAX_DIM * MAX_DIM];
        for (i, row) in rows.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e as usize >= self.tables.q {
                    return None;
                }
                m[i * MAX_DIM + j] = e as u8;
            }
        }
        self.index_of_mat(&m)
    }

    pub fn rows(&self, i: u32) -> Vec<Vec<u32>> {
        let m = &self.mats[i as usize];
        (0..self.dim).map(|r| (0..self.dim).map(|c| m[r * MAX_DIM + c] as u32).collect()).collect()
    }

    pub fn matrix(&self, i: u32) -> Matrix<FiniteField> {
        Matrix::from_rows(&self.field, self.rows(i)).expect("square")
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.mat_mul(&self.mats[a as usize], &self.mats[b as usize]);
        self.index_of_mat(&p).expect("closed under products")
    }

    pub fn inverse(&self, a: u32) -> u32 {
        let inv = self.mat_inverse(&self.mats[a as usize]).expect("group elements are invertible");
        self.index_of_mat(&inv).expect("closed under inverses")
    }

    pub fn commute(&self, a: u32, b: u32) -> bool {
        let (x, y) = (&self.mats[a as usize], &self.mats[b as usize]);
        self.mat_mul(x, y) == self.mat_mul(y, x)
    }

    /// `h x h^-1`.
    pub fn conjugate(&self, x: u32, h: u32) -> u32 {
        let hm = &self.mats[h as usize];
        let hinv = self.mat_inverse(hm).expect("invertible");
        let p = self.mat_mul(&self.mat_mul(hm, &self.mats[x as usize]), &hinv);
        self.index_of_mat(&p).expect("closed under conjugation")
    }

    pub fn element_order(&self, a: u32) -> u32 {
        let x = &self.mats[a as usize];
        let mut id = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..self.dim {
            id[i * MAX_DIM + i] = 1;
        }
        let mut p = *x;
        let mut k = 1;
        while p != id {
            p = self.mat_mul(&p, x);
            k += 1;
        }
        k
    }

    /// Checks closure under products and inverses: on every pair when
    /// `|G| <= 10^4`, otherwise on `samples` random pairs.
    pub fn check_closure(&self, samples: usize) -> bool {
        let n = self.order() as u32;
        let ok = |a: u32, b: u32| {
            let p = self.mat_mul(&self.mats[a as usize], &self.mats[b as usize]);
            self.index_of_mat(&p).is_some()
        };
        let inverses = (0..n).into_par_iter().all(|a| {
            self.mat_inverse(&self.mats[a as usize]).and_then(|m| self.index_of_mat(&m)).is_some()
        });
        if !inverses {
            return false;
        }
        if n <= 10_000 {
            (0..n).into_par_iter().all(|a| (0..n).all(|b| ok(a, b)))
        } else {
            let mut s = Sampler::new(SEED);
            (0..samples).all(|_| {
                let (a, b) = (s.below(n as usize) as u32, s.below(n as usize) as u32);
                ok(a, b)
            })
        }
    }

    fn decode(&self, mut code: u64) -> Mat {
        let q = self.tables.q as u64;
        let mut m = [0u8; MAX_DIM * MAX_DIM];
        for k in (0..self.dim * self.dim).rev() {
            m[(k / self.dim) * MAX_DIM + k % self.dim] = (code % q) as u8;
            code /= q;
        }
        m
    }

    fn encode(&self, m: &Mat) -> u64 {
        let q = self.tables.q as u64;
        let mut code = 0u64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                code = code * q + m[r * MAX_DIM + c] as u64;
            }
        }
        code
    }

    fn index_of_mat(&self, m: &Mat) -> Option<u32> {
        self.index_of_code(self.encode(m))
    }

    fn mat_mul(&self, a: &Mat, b: &Mat) -> Mat {
        let t = &self.tables;
        let mut out = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = 0u8;
                for k in 0..self.dim {
                    acc = t.add(acc, t.mul(a[i * MAX_DIM + k], b[k * MAX_DIM + j]));
                }
                out[i * MAX_DIM + j] = acc;
            }
        }
        out
    }

    fn transpose(&self, a: &Mat, conj: bool) -> Mat {
        let mut out = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = a[j * MAX_DIM + i];
                out[i * MAX_DIM + j] = if conj { self.tables.conj[e as usize] } else { e };
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    fn mat_inverse(&self, a: &Mat) -> Option<Mat> {
        let t = &self.tables;
        let n = self.dim;
        let mut m = *a;
        let mut inv = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..n {
            inv[i * MAX_DIM + i] = 1;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * MAX_DIM + col] != 0)?;
            if piv != col {
                for c in 0..n {
                    m.swap(piv * MAX_DIM + c, col * MAX_DIM + c);
                    inv.swap(piv * MAX_DIM + c, col * MAX_DIM + c);
                }
            }
            let s = t.inv[m[col * MAX_DIM + col] as usize];
            for c in 0..n {
                m[col * MAX_DIM + c] = t.mul(s, m[col * MAX_DIM + c]);
                inv[col * MAX_DIM + c] = t.mul(s, inv[col * MAX_DIM + c]);
            }
            for r in 0..n {
                let e = m[r * MAX_DIM + col];
                if r == col || e == 0 {
                    continue;
                }
                let ne = t.neg[e as usize];
                for c in 0..n {
                    m[r * MAX_DIM + c] = t.add(m[r * MAX_DIM + c], t.mul(ne, m[col * MAX_DIM + c]));
                    inv[r * MAX_DIM + c] = t.add(inv[r * MAX_DIM + c], t.mul(ne, inv[col * MAX_DIM + c]));
                }
            }
        }
        Some(inv)
    }

    fn det(&self, a: &Mat) -> u8 {
        let t = &self.tables;
        let n = self.dim;
        let mut m = *a;
        let mut det = 1u8;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| m[r * MAX_DIM + col] != 0) else { return 0 };
            if piv != col {
                for c in 0..n {
                    m.swap(piv * MAX_DIM + c, col * MAX_DIM + c);
                }
                det = t.neg[det as usize];
            }
            let p = m[col * MAX_DIM + col];
            det = t.mul(det, p);
            let pinv = t.inv[p as usize];
            for r in col + 1..n {
                let e = m[r * MAX_DIM + col];
                if e == 0 {
                    continue;
                }
                let f = t.neg[t.mul(e, pinv) as usize];
                for c in col..n {
                    m[r * MAX_DIM + c] = t.add(m[r * MAX_DIM + c], t.mul(f, m[col * MAX_DIM + c]));
                }
            }
        }
        det
    }

    fn to_mat(&self, m: &Matrix<FiniteField>) -> Mat {
        let mut out = [0u8; MAX_DIM * MAX_DIM];
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[r * MAX_DIM + c] = *m.get(r, c) as u8;
            }
        }
        out
    }

    fn form_table(&self) -> Result<Option<Mat>, BruteError> {
        match self.kind {
            GroupKind::Gl(_) | GroupKind::Sl(_) => Ok(None),
            k => Ok(Some(self.to_mat(&standard_form(k, &self.field)?))),
        }
    }

    fn is_member(&self, g: &Mat, form: Option<&Mat>) -> bool {
        let Some(beta) = form else {
            let d = self.det(g);
            return match self.kind {
                GroupKind::Sl(_) => d == 1,
                _ => d != 0,
            };
        };
        let unitary = matches!(self.kind, GroupKind::U(_));
        let m = self.mat_mul(&self.mat_mul(&self.transpose(g, unitary), beta), g);
        let t = &self.tables;
        let pos = (0..self.dim * self.dim)
            .map(|k| (k / self.dim) * MAX_DIM + k % self.dim)
            .find(|&k| beta[k] != 0)
            .expect("forms are nonzero");
        let mu = t.mul(m[pos], t.inv[beta[pos] as usize]);
        if mu == 0 || (self.kind.is_isometry_group() || unitary) && mu != 1 {
            return false;
        }
        (0..self.dim * self.dim)
            .map(|k| (k / self.dim) * MAX_DIM + k % self.dim)
            .all(|k| m[k] == t.mul(mu, beta[k]))
    }

    /// Generating matrices for the closure path.
    fn seeds(&self, form: Option<&Mat>, ambient: u64) -> Result<Vec<Mat>, BruteError> {
        let f = &self.field;
        let z = f.primitive_element();
        let mut out = Vec::new();
        if let GroupKind::U(_) = self.kind {
            let mut s = Sampler::new(SEED);
            while out.len() < 3 {
                let m = self.decode(s.next_u64() % ambient);
                if self.is_member(&m, form) {
                    out.push(m);
                }
            }
            return Ok(out);
        }
        let params: Vec<u32> = (0..f.degree()).map(|k| f.pow(&z, k as u64)).collect();
        for t in &params {
            for tok in all_tokens(self.kind, f, t) {
                out.push(self.to_mat(&elementary(self.kind, f, &tok)?));
            }
        }
        let n = self.dim;
        let mut diag = vec![f.one(); n];
        let zi = f.inv(&z).expect("nonzero");
        match self.kind {
            GroupKind::Gl(_) => diag[0] = z,
            GroupKind::Sl(_) if n >= 2 => {
                diag[0] = z;
                diag[1] = zi;
            }
            GroupKind::Sl(_) => {}
            _ => {
                let layout = self.kind.layout().expect("form kinds have a layout");
                diag[layout.pos(1)] = z;
                diag[layout.pos(-1)] = zi;
                out.push(self.to_mat(&Matrix::diagonal(f, &diag)));
                diag = vec![f.one(); n];
                if self.kind.is_odd_orthogonal() {
                    let m1 = f.neg(&f.one());
                    diag = vec![m1; n];
                    out.push(self.to_mat(&Matrix::diagonal(f, &diag)));
                    diag = vec![f.one(); n];
                }
                match self.kind {
                    GroupKind::GSp(l) | GroupKind::GOEven(l) => {
                        for i in 1..=l {
                            diag[layout.pos(-(i as i32))] = z;
                        }
                    }
                    GroupKind::GOOdd(_) => diag = vec![z; n],
                    _ => {}
                }
            }
        }
        out.push(self.to_mat(&Matrix::diagonal(f, &diag)));
        out.retain(|m| self.is_member(m, form));
        Ok(out)
    }

    /// Breadth-first closure of `seeds` under right multiplication.
    fn closure(&self, seeds: &[Mat], cap: u64, expected: u128) -> Result<Vec<u64>, BruteError> {
        let mut id = [0u8; MAX_DIM * MAX_DIM];
        for i in 0..self.dim {
            id[i * MAX_DIM + i] = 1;
        }
        let mut seen = std::collections::HashSet::new();
        seen.insert(self.encode(&id));
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in seeds {
                let y = self.mat_mul(&x, s);
                if seen.insert(self.encode(&y)) {
                    if seen.len() as u128 > expected || seen.len() as u64 > cap {
                        return Err(BruteError::Internal(format!("closure of {} overflowed", self.kind)));
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut codes: Vec<u64> = seen.into_iter().collect();
        codes.sort_unstable();
        Ok(codes)
    }

    fn find_generators(&self) -> Vec<u32> {
        let all: Vec<u32> = (0..self.order() as u32).collect();
        self.subgroup_generators(&all)
    }

    /// A small generating set of the subgroup listed (sorted) in `members`.
    fn subgroup_generators(&self, members: &[u32]) -> Vec<u32> {
        let mut s = Sampler::new(SEED ^ members.len() as u64);
        let mut gens: Vec<u32> = Vec::new();
        let mut span = vec![self.identity()];
        while span.len() < members.len() {
            let pick = loop {
                let c = members[s.below(members.len())];
                if span.binary_search(&c).is_err() {
                    break c;
                }
            };
            gens.push(pick);
            span = self.span(&gens);
        }
        gens
    }

    /// Sorted element list of the subgroup generated by `gens`.
    pub fn span(&self, gens: &[u32]) -> Vec<u32> {
        let id = self.identity();
        let mut seen = std::collections::HashSet::from([id]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<u32> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

/// Conjugacy classes: representatives (smallest code in each orbit, in
/// increasing order), sizes, and the class index of every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classes {
    pub representatives: Vec<u32>,
    pub sizes: Vec<u64>,
    pub class_of: Vec<u32>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

pub fn conjugacy_classes(g: &Group) -> Classes {
    let n = g.order();
    let gens = g.generators();
    let gen_invs: Vec<u32> = gens.iter().map(|&s| g.inverse(s)).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    for x in 0..n as u32 {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let c = representatives.len() as u32;
        representatives.push(x);
        class_of[x as usize] = c;
        let mut queue = VecDeque::from([x]);
        let mut size = 1u64;
        while let Some(y) = queue.pop_front() {
            for (s, si) in gens.iter().zip(&gen_invs) {
                let z = g.mul(g.mul(*s, y), *si);
                if class_of[z as usize] == u32::MAX {
                    class_of[z as usize] = c;
                    size += 1;
                    queue.push_back(z);
                }
            }
        }
        sizes.push(size);
    }
    Classes { representatives, sizes, class_of }
}

/// `{h in G : hx = xh}`, sorted.
pub fn centralizer(g: &Group, x: u32) -> Vec<u32> {
    (0..g.order() as u32).filter(|&h| g.commute(h, x)).collect()
}

/// Centralizer of the element with the given rows.
pub fn centralizer_of_rows(g: &Group, rows: &[Vec<u32>]) -> Result<Vec<u32>, BruteError> {
    let x = g.index_of_rows(rows).ok_or(BruteError::NotMember)?;
    Ok(centralizer(g, x))
}

/// Centralizers of all class representatives, computed in parallel.
pub fn class_centralizers(g: &Group, classes: &Classes) -> Vec<Vec<u32>> {
    classes.representatives.par_iter().map(|&x| centralizer(g, x)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Representative of the first class in the cluster.
    pub representative: u32,
    pub centralizer_order: u64,
    /// Indices into the class list.
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZClassReport {
    pub group_order: u64,
    pub class_count: usize,
    pub clusters: Vec<Cluster>,
}

impl ZClassReport {
    pub fn z_count(&self) -> usize {
        self.clusters.len()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

fn report(g: &Group, classes: &Classes, cents: &[Vec<u32>], parent: &mut [usize]) -> ZClassReport {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; classes.len()];
    for c in 0..classes.len() {
        let r = find(parent, c);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(c);
    }
    let clusters = groups
        .into_iter()
        .map(|members| Cluster {
            representative: classes.representatives[members[0]],
            centralizer_order: cents[members[0]].len() as u64,
            classes: members,
        })
        .collect();
    ZClassReport { group_order: g.order() as u64, class_count: classes.len(), clusters }
}

/// Clusters classes whose centralizers are conjugate.
///
/// `Z(x)` is conjugate to `Z(y)` iff some conjugate `x'` of `x` has
/// `Z(x') = Z(y)`; such an `x'` commutes with all of `Z(y)`, so it lies in
/// the centre of `Z(y)`, and equality follows from `|Z(x')| = |Z(y)|`.
pub fn z_classes(g: &Group, classes: &Classes, cents: &[Vec<u32>]) -> ZClassReport {
    let unions: Vec<Vec<usize>> = (0..classes.len())
        .into_par_iter()
        .map(|y| {
            let zy = &cents[y];
            let gens = g.subgroup_generators(zy);
            zy.iter()
                .filter(|&&c| gens.iter().all(|&s| g.commute(c, s)))
                .map(|&c| classes.class_of[c as usize] as usize)
                .filter(|&x| cents[x].len() == zy.len())
                .collect()
        })
        .collect();
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    for (y, xs) in unions.iter().enumerate() {
        for &x in xs {
            union(&mut parent, x, y);
        }
    }
    report(g, classes, cents, &mut parent)
}

/// The same clustering by direct search for `h` with `h Z(x) h^-1 = Z(y)`,
/// pruned by centralizer order and the multiset of element orders.
pub fn z_classes_by_search(g: &Group, classes: &Classes, cents: &[Vec<u32>]) -> ZClassReport {
    let orders: Vec<u32> = (0..g.order() as u32).into_par_iter().map(|a| g.element_order(a)).collect();
    let profile: Vec<Vec<u32>> = cents
        .iter()
        .map(|z| {
            let mut v: Vec<u32> = z.iter().map(|&e| orders[e as usize]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    for y in 0..classes.len() {
        for x in 0..y {
            if find(&mut parent, x) == find(&mut parent, y) || profile[x] != profile[y] {
                continue;
            }
            let hit = (0..g.order() as u32)
                .into_par_iter()
                .any(|h| cents[x].iter().all(|&z| cents[y].binary_search(&g.conjugate(z, h)).is_ok()));
            if hit {
                union(&mut parent, x, y);
            }
        }
    }
    report(g, classes, cents, &mut parent)
}

/// Builds the group and runs the whole pipeline.
pub fn analyze(kind: GroupKind, q: u64, cap: u64) -> Result<(Group, Classes, ZClassReport), BruteError> {
    let g = build_group(kind, q, cap)?;
    let classes = conjugacy_classes(&g);
    let cents = class_centralizers(&g, &classes);
    let rep = z_classes(&g, &classes, &cents);
    Ok((g, classes, rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        assert_eq!(build_group(GroupKind::Gl(2), 2, DEFAULT_CAP).unwrap().order(), 6);
        assert_eq!(build_group(GroupKind::U(2), 2, DEFAULT_CAP).unwrap().order(), 18);
        assert_eq!(build_group(GroupKind::Gl(2), 3, DEFAULT_CAP).unwrap().order(), 48);
        assert_eq!(classical_order(GroupKind::U(3), 2), 648);
        assert_eq!(classical_order(GroupKind::U(4), 2), 77760);
    }

    #[test]
    fn closure_path_matches_formula() {
        for (kind, q) in [
            (GroupKind::Sp(2), 3),
            (GroupKind::OEven(2), 3),
            (GroupKind::OOdd(1), 5),
            (GroupKind::GOOdd(1), 3),
            (GroupKind::GSp(2), 3),
            (GroupKind::GOEven(2), 5),
            (GroupKind::Sl(3), 3),
        ] {
            let g = build_group(kind, q, DEFAULT_CAP).unwrap();
            assert_eq!(g.order() as u128, classical_order(kind, q), "{kind}");
            assert!(g.check_closure(2000));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            build_group(GroupKind::Gl(4), 3, DEFAULT_CAP),
            Err(BruteError::CapExceeded { .. })
        ));
    }

    #[test]
    fn gl22_classes() {
        let g = build_group(GroupKind::Gl(2), 2, DEFAULT_CAP).unwrap();
        let cl = conjugacy_classes(&g);
        let mut sizes = cl.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, [1, 2, 3]);
        let id = g.identity();
        assert_eq!(cl.sizes[cl.class_of[id as usize] as usize], 1);
    }

    #[test]
    fn centralizer_examples() {
        let g = build_group(GroupKind::Gl(2), 3, DEFAULT_CAP).unwrap();
        assert_eq!(centralizer(&g, g.identity()).len(), 48);
        assert_eq!(centralizer_of_rows(&g, &[vec![2, 0], vec![0, 2]]).unwrap().len(), 48);
        assert_eq!(centralizer_of_rows(&g, &[vec![1, 0], vec![0, 2]]).unwrap().len(), 4);
        assert!(matches!(centralizer_of_rows(&g, &[vec![1, 1], vec![1, 1]]), Err(BruteError::NotMember)));
        let cl = conjugacy_classes(&g);
        for (rep, size) in cl.representatives.iter().zip(&cl.sizes) {
            assert_eq!(centralizer(&g, *rep).len() as u64 * size, 48);
        }
    }

    #[test]
    fn small_z_counts_agree_with_search() {
        for (kind, q, z) in [(GroupKind::Gl(2), 2, 3), (GroupKind::Gl(2), 3, 4), (GroupKind::U(2), 3, 4), (GroupKind::Gl(3), 2, 5)] {
            let g = build_group(kind, q, DEFAULT_CAP).unwrap();
            let cl = conjugacy_classes(&g);
            let cents = class_centralizers(&g, &cl);
            let fast = z_classes(&g, &cl, &cents);
            assert_eq!(fast.z_count(), z, "{kind} q={q}");
            assert_eq!(fast, z_classes_by_search(&g, &cl, &cents));
        }
    }
}
