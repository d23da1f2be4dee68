//! Real multivariate polynomials of bounded total degree.
//!
//! A [`MultiPoly`] stores one coefficient per multi-index `α` with
//! `|α| ≤ d`, in either the monomial basis `x^α` or the tensor Chebyshev
//! basis `T_α(x) = Π T_{α_i}(x_i)`. Both bases span the same space, so
//! every operation is defined by the monomial semantics `Σ c_α x^α` and the
//! basis is only a storage choice.

pub(crate) mod ball;
mod chebyshev;
mod roots;

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use ball::{max_abs_on_ball, maximize_over_ball, BallMaxResult, BallSearch};
pub use chebyshev::chebyshev_value;
pub use roots::{real_roots_in, univariate_max_abs};

pub type MultiIndex = Vec<u32>;

/// Basis in which coefficients are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

impl Basis {
    /// Monomials up to degree 6, tensor Chebyshev beyond.
    pub fn default_for_degree(d: usize) -> Basis {
        if d <= 6 {
            Basis::Monomial
        } else {
            Basis::Chebyshev
        }
    }
}

/// Dimension of the space of polynomials in `n` variables of degree `≤ d`,
/// i.e. `binomial(n + d, n)`.
pub fn monomial_count(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let k = n.min(d) as u128;
    let top = (n + d) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(top - i)
            .ok_or(Error::CountOverflow { n, d })?
            / (i + 1);
    }
    usize::try_from(acc).map_err(|_| Error::CountOverflow { n, d })
}

#[derive(Debug)]
pub(crate) struct IndexTable {
    pub(crate) indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl IndexTable {
    fn build(n: usize, d: usize) -> IndexTable {
        let mut indices = Vec::new();
        for total in 0..=d as u32 {
            let mut current = vec![0u32; n];
            compositions(total, 0, &mut current, &mut indices);
        }
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        IndexTable { indices, position }
    }

    pub(crate) fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.position.get(alpha).copied()
    }
}

// Lexicographically descending compositions of `remaining` into the slots
// `slot..`.
fn compositions(remaining: u32, slot: usize, current: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if slot + 1 == n {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[slot] = v;
        compositions(remaining - v, slot + 1, current, out);
    }
    current[slot] = 0;
}

pub(crate) fn index_table(n: usize, d: usize) -> Arc<IndexTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<IndexTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("index cache poisoned");
    guard
        .entry((n, d))
        .or_insert_with(|| Arc::new(IndexTable::build(n, d)))
        .clone()
}

/// All multi-indices of exactly total degree `l` in `n` variables.
pub fn multi_indices_of_order(n: usize, l: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    compositions(l as u32, 0, &mut current, &mut out);
    out
}

/// Evaluates every basis function of degree `≤ d` at `x`, in the canonical
/// multi-index order.
pub fn basis_values(d: usize, basis: Basis, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let table = index_table(n, d);
    let per_coord = univariate_values(d, basis, x);
    table
        .indices
        .iter()
        .map(|alpha| {
            alpha
                .iter()
                .enumerate()
                .map(|(i, &a)| per_coord[i * (d + 1) + a as usize])
                .product()
        })
        .collect()
}

// Row-major `n × (d+1)` table of `x_i^k` or `T_k(x_i)`.
fn univariate_values(d: usize, basis: Basis, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() * (d + 1)];
    for (i, &xi) in x.iter().enumerate() {
        let row = &mut out[i * (d + 1)..(i + 1) * (d + 1)];
        row[0] = 1.0;
        if d >= 1 {
            row[1] = xi;
        }
        for k in 2..=d {
            row[k] = match basis {
                Basis::Monomial => row[k - 1] * xi,
                Basis::Chebyshev => 2.0 * xi * row[k - 1] - row[k - 2],
            };
        }
    }
    out
}

/// `[k][j]`: coefficient of `x^j` in `T_k`.
fn chebyshev_to_monomial_table(d: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; d + 1]; d + 1];
    t[0][0] = 1.0;
    if d >= 1 {
        t[1][1] = 1.0;
    }
    for k in 2..=d {
        for j in 0..=k {
            let shifted = if j > 0 { 2.0 * t[k - 1][j - 1] } else { 0.0 };
            t[k][j] = shifted - t[k - 2][j];
        }
    }
    t
}

/// `[k][j]`: coefficient of `T_j` in `x^k`.
fn monomial_to_chebyshev_table(d: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; d + 1]; d + 1];
    t[0][0] = 1.0;
    for k in 1..=d {
        // x T_0 = T_1, x T_j = (T_{j+1} + T_{j-1}) / 2.
        for j in 0..k {
            let c = t[k - 1][j];
            if c == 0.0 {
                continue;
            }
            if j == 0 {
                t[k][1] += c;
            } else {
                t[k][j + 1] += 0.5 * c;
                t[k][j - 1] += 0.5 * c;
            }
        }
    }
    t
}

/// A real polynomial in `n` variables of total degree at most `d`.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    n: usize,
    d: usize,
    basis: Basis,
    coeffs: Vec<f64>,
    table: Arc<IndexTable>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.basis == other.basis && self.coeffs == other.coeffs
    }
}

impl MultiPoly {
    pub fn zero(n: usize, d: usize, basis: Basis) -> MultiPoly {
        let table = index_table(n, d);
        MultiPoly {
            n,
            d,
            basis,
            coeffs: vec![0.0; table.indices.len()],
            table,
        }
    }

    pub fn constant(n: usize, c: f64) -> MultiPoly {
        let mut p = MultiPoly::zero(n, 0, Basis::Monomial);
        p.coeffs[0] = c;
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn variable(n: usize, i: usize) -> MultiPoly {
        let mut alpha = vec![0; n];
        alpha[i] = 1;
        MultiPoly::from_terms(n, 1, &[(alpha, 1.0)]).expect("valid variable")
    }

    /// Builds a monomial-basis polynomial from `(α, c_α)` pairs. Repeated
    /// multi-indices are summed.
    pub fn from_terms(n: usize, d: usize, terms: &[(MultiIndex, f64)]) -> Result<MultiPoly> {
        MultiPoly::from_terms_in(n, d, Basis::Monomial, terms)
    }

    pub fn from_terms_in(n: usize, d: usize, basis: Basis, terms: &[(MultiIndex, f64)]) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(n, d, basis);
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: alpha.len() });
            }
            let pos = p.table.position(alpha).ok_or_else(|| {
                Error::InvalidArgument(format!("multi-index {:?} exceeds degree bound {}", alpha, d))
            })?;
            p.coeffs[pos] += c;
        }
        Ok(p)
    }

    /// Wraps a coefficient vector given in canonical multi-index order.
    pub fn from_coeffs(n: usize, d: usize, basis: Basis, coeffs: Vec<f64>) -> Result<MultiPoly> {
        let table = index_table(n, d);
        if coeffs.len() != table.indices.len() {
            return Err(Error::DimensionMismatch {
                expected: table.indices.len(),
                got: coeffs.len(),
            });
        }
        Ok(MultiPoly { n, d, basis, coeffs, table })
    }

    /// Univariate polynomial from ascending monomial coefficients.
    pub fn univariate(coeffs: &[f64]) -> MultiPoly {
        let d = coeffs.len().saturating_sub(1);
        let mut c = coeffs.to_vec();
        if c.is_empty() {
            c.push(0.0);
        }
        MultiPoly::from_coeffs(1, d, Basis::Monomial, c).expect("univariate layout")
    }

    /// `T_d(x_i)` as a polynomial in `n` variables.
    pub fn chebyshev_in(n: usize, d: usize, i: usize) -> MultiPoly {
        let mut alpha = vec![0; n];
        alpha[i] = d as u32;
        MultiPoly::from_terms_in(n, d, Basis::Chebyshev, &[(alpha, 1.0)])
            .expect("valid index")
            .to_monomial()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.table.indices
    }

    /// Coefficient of `α` in the stored basis.
    pub fn coeff(&self, alpha: &[u32]) -> f64 {
        self.table.position(alpha).map_or(0.0, |p| self.coeffs[p])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.table.indices.iter().zip(self.coeffs.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Largest `|α|` with a nonzero coefficient; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms()
            .filter(|(_, c)| *c != 0.0)
            .map(|(a, _)| a.iter().sum::<u32>() as usize)
            .max()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let d = self.d;
        let per_coord = univariate_values(d, self.basis, x);
        self.table
            .indices
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(alpha, c)| {
                let mut term = *c;
                for (i, &a) in alpha.iter().enumerate() {
                    term *= per_coord[i * (d + 1) + a as usize];
                }
                term
            })
            .sum()
    }

    pub fn to_basis(&self, basis: Basis) -> MultiPoly {
        if basis == self.basis {
            return self.clone();
        }
        let table = match basis {
            Basis::Monomial => chebyshev_to_monomial_table(self.d),
            Basis::Chebyshev => monomial_to_chebyshev_table(self.d),
        };
        let mut out = MultiPoly::zero(self.n, self.d, basis);
        for (alpha, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            // Expand Π_i Σ_j table[α_i][j] B_j(x_i) coordinate by coordinate.
            let mut partial: Vec<(MultiIndex, f64)> = vec![(Vec::with_capacity(self.n), c)];
            for &a in alpha {
                let row = &table[a as usize];
                let mut next = Vec::with_capacity(partial.len() * (a as usize + 1));
                for (beta, w) in &partial {
                    for (j, &t) in row.iter().enumerate().take(a as usize + 1) {
                        if t != 0.0 {
                            let mut b = beta.clone();
                            b.push(j as u32);
                            next.push((b, w * t));
                        }
                    }
                }
                partial = next;
            }
            for (beta, w) in partial {
                let pos = out.table.position(&beta).expect("conversion stays in degree");
                out.coeffs[pos] += w;
            }
        }
        out
    }

    pub fn to_monomial(&self) -> MultiPoly {
        self.to_basis(Basis::Monomial)
    }

    pub fn to_chebyshev(&self) -> MultiPoly {
        self.to_basis(Basis::Chebyshev)
    }

    /// Same polynomial with a larger degree bound.
    pub fn with_degree_bound(&self, d: usize) -> MultiPoly {
        assert!(d >= self.d, "degree bound can only grow");
        let mut out = MultiPoly::zero(self.n, d, self.basis);
        for (alpha, c) in self.terms() {
            let pos = out.table.position(alpha).expect("larger table");
            out.coeffs[pos] = c;
        }
        out
    }

    /// Exact `∂^α p`, returned in the monomial basis with degree bound
    /// `max(d − |α|, 0)`.
    pub fn partial_derivative(&self, alpha: &[u32]) -> MultiPoly {
        assert_eq!(alpha.len(), self.n, "multi-index dimension");
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        let mono = self.to_monomial();
        let mut out = MultiPoly::zero(self.n, self.d.saturating_sub(order), Basis::Monomial);
        if order > self.d {
            return out;
        }
        for (beta, c) in mono.terms() {
            if c == 0.0 || beta.iter().zip(alpha).any(|(b, a)| b < a) {
                continue;
            }
            let mut factor = c;
            let mut reduced = Vec::with_capacity(self.n);
            for (&b, &a) in beta.iter().zip(alpha) {
                for k in 0..a {
                    factor *= (b - k) as f64;
                }
                reduced.push(b - a);
            }
            let pos = out.table.position(&reduced).expect("derivative stays in degree");
            out.coeffs[pos] += factor;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> MultiPoly {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    fn combine(&self, other: &MultiPoly, sign: f64) -> MultiPoly {
        assert_eq!(self.n, other.n, "dimension mismatch in polynomial sum");
        let d = self.d.max(other.d);
        let basis = if self.basis == other.basis { self.basis } else { Basis::Monomial };
        let a = self.to_basis(basis).with_degree_bound(d);
        let b = other.to_basis(basis).with_degree_bound(d);
        let mut out = a;
        for (x, y) in out.coeffs.iter_mut().zip(&b.coeffs) {
            *x += sign * y;
        }
        out
    }

    fn product(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, other.n, "dimension mismatch in polynomial product");
        let a = self.to_monomial();
        let b = other.to_monomial();
        let mut out = MultiPoly::zero(self.n, self.d + other.d, Basis::Monomial);
        for (alpha, ca) in a.terms() {
            if ca == 0.0 {
                continue;
            }
            for (beta, cb) in b.terms() {
                if cb == 0.0 {
                    continue;
                }
                let gamma: MultiIndex = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
                let pos = out.table.position(&gamma).expect("product degree");
                out.coeffs[pos] += ca * cb;
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.n, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.product(rhs)
    }
}

impl Mul<f64> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: f64) -> MultiPoly {
        self.scaled(rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scaled(-1.0)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: MultiIndex,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    d: usize,
    coeffs: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mono = self.to_monomial();
        let coeffs = mono
            .terms()
            .filter(|(_, c)| *c != 0.0)
            .map(|(alpha, c)| TermJson { alpha: alpha.clone(), c })
            .collect();
        PolyJson { n: self.n, d: self.d, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(deserializer)?;
        if raw.n == 0 {
            return Err(D::Error::custom("polynomial dimension must be positive"));
        }
        let mut seen = std::collections::HashSet::new();
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for (i, t) in raw.coeffs.into_iter().enumerate() {
            if !seen.insert(t.alpha.clone()) {
                return Err(D::Error::custom(format!("coeffs[{}]: repeated multi-index {:?}", i, t.alpha)));
            }
            if t.alpha.len() != raw.n || t.alpha.iter().sum::<u32>() as usize > raw.d {
                return Err(D::Error::custom(format!(
                    "coeffs[{}]: multi-index {:?} invalid for n={}, d={}",
                    i, t.alpha, raw.n, raw.d
                )));
            }
            terms.push((t.alpha, t.c));
        }
        MultiPoly::from_terms(raw.n, raw.d, &terms).map_err(D::Error::custom)
    }
}
