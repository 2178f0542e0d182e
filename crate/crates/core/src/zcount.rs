//! Closed-form z-class counts from partition generating functions.
//!
//! With `p(i)` the partition numbers:
//!
//! - `z(x) = prod_i (1 - x^i)^(-p(i))` (algebraically closed fields),
//! - `z_R(x) = z(x) z(x^2)` (the reals),
//! - `z_Fq(x) = prod_i z(x^i)` (GL(n, q) with `q > n`).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZCountError {
    #[error("truncation degree must lie in 1..=64, got {0}")]
    BadTruncation(usize),
    #[error("the Lorentzian counts need n >= 2, got {0}")]
    LorentzDomain(usize),
}

/// `1^k1 2^k2 ... n^kn`, stored as `multiplicities[i - 1] = k_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub multiplicities: Vec<u32>,
}

impl Partition {
    pub fn size(&self) -> usize {
        self.multiplicities.iter().enumerate().map(|(i, &k)| (i + 1) * k as usize).sum()
    }

    /// Parts in non-increasing order.
    pub fn parts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &k) in self.multiplicities.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i + 1, k as usize));
        }
        out
    }
}

/// All partitions of `n`, in reverse lexicographic order of their parts.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    go(n, n, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|parts| {
            let mut multiplicities = vec![0u32; n];
            for p in parts {
                multiplicities[p - 1] += 1;
            }
            Partition { multiplicities }
        })
        .collect()
}

/// `p(0), ..., p(n)` by Euler's recurrence over the parts.
pub fn partition_numbers(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for part in 1..=n {
        for m in part..=n {
            let add = p[m - part].clone();
            p[m] += add;
        }
    }
    p
}

pub fn p(n: usize) -> BigInt {
    partition_numbers(n).pop().expect("nonempty")
}

/// `C(a + k - 1, k)`, multisets of size `k` from `a` kinds.
fn multichoose(a: &BigInt, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 1..=k {
        acc = acc * (a + BigInt::from(j - 1)) / BigInt::from(j);
    }
    acc
}

/// `sum over partitions of n of prod_i C(p(i) + k_i - 1, k_i)`.
pub fn z_closed(n: usize) -> BigInt {
    let pn = partition_numbers(n);
    partitions(n)
        .iter()
        .map(|lam| {
            lam.multiplicities
                .iter()
                .enumerate()
                .map(|(i, &k)| multichoose(&pn[i + 1], k))
                .product::<BigInt>()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Closed,
    Real,
    FiniteLargeQ,
}

impl std::str::FromStr for SeriesKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(SeriesKind::Closed),
            "real" => Ok(SeriesKind::Real),
            "fq" | "finite_large_q" => Ok(SeriesKind::FiniteLargeQ),
            other => Err(format!("unknown series `{other}` (expected closed, real or fq)")),
        }
    }
}

/// Coefficients `c_0..=c_N` of a power series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub coeffs: Vec<BigInt>,
}

impl Series {
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.truncation().min(other.truncation());
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }

    /// `s(x^k)`, truncated at the same degree.
    pub fn substitute_power(&self, k: usize) -> Series {
        let n = self.truncation();
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * k > n {
                break;
            }
            out[i * k] = c.clone();
        }
        Series { coeffs: out }
    }
}

fn z_series(n: usize) -> Series {
    let pn = partition_numbers(n);
    let mut acc = Series { coeffs: std::iter::once(BigInt::one()).chain((0..n).map(|_| BigInt::zero())).collect() };
    for i in 1..=n {
        // (1 - x^i)^(-p(i)) = sum_j C(p(i) + j - 1, j) x^(ij)
        let mut factor = vec![BigInt::zero(); n + 1];
        for j in 0..=n / i {
            factor[i * j] = multichoose(&pn[i], j as u32);
        }
        acc = acc.mul(&Series { coeffs: factor });
    }
    acc
}

pub fn series(kind: SeriesKind, n: usize) -> Result<Series, ZCountError> {
    if !(1..=64).contains(&n) {
        return Err(ZCountError::BadTruncation(n));
    }
    let z = z_series(n);
    Ok(match kind {
        SeriesKind::Closed => z,
        SeriesKind::Real => z.mul(&z.substitute_power(2)),
        SeriesKind::FiniteLargeQ => (2..=n).fold(z.clone(), |acc, i| acc.mul(&z.substitute_power(i))),
    })
}

/// z-classes in the compact unitary group `U(n+1, 0)`: `p(n + 1)`.
pub fn u_compact(n: usize) -> BigInt {
    p(n + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LorentzCounts {
    pub hyperbolic: BigInt,
    pub elliptic: BigInt,
    pub parabolic: BigInt,
}

/// z-class counts of hyperbolic, elliptic and parabolic elements of
/// `U(n, 1)`.
pub fn u_lorentz(n: usize) -> Result<LorentzCounts, ZCountError> {
    if n < 2 {
        return Err(ZCountError::LorentzDomain(n));
    }
    let pn = partition_numbers(n + 1);
    Ok(LorentzCounts {
        hyperbolic: pn[n - 1].clone(),
        elliptic: (1..=n + 1).map(|m| pn[n + 1 - m].clone()).sum(),
        parabolic: BigInt::from(2) + &pn[n - 1] + &pn[n - 2],
    })
}
