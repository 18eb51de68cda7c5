//! Pencils, transform results, and dense assembly of the structured matrices.
//!
//! Sign conventions: `L_eps` carries `-eps_n e_n` below the diagonal,
//! `L_eps*` carries `+(1 - eps_n) e_n`, and the output factor `L_hat`
//! carries `+e_hat_n`. All three have a unit diagonal; every upper
//! bidiagonal factor has a unit superdiagonal.
//!
//! Dense matrices exist only for verification and display. The transforms
//! themselves work on the bidiagonal data directly.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Field, SignedField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PencilError {
    #[error("matrix order must be at least 1")]
    EmptyPencil,
    #[error("factor count M must be at least 1")]
    NoFactors,
    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("epsilon entries must be 0 or 1, found {0}")]
    BadEpsilon(u64),
}

/// The mask `eps` together with its prefix sums `eta`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Epsilon {
    bits: Vec<bool>,
    eta: Vec<usize>,
}

impl Epsilon {
    pub fn new(bits: Vec<bool>) -> Self {
        let mut eta = Vec::with_capacity(bits.len() + 1);
        eta.push(0);
        let mut acc = 0;
        for &b in &bits {
            acc += usize::from(b);
            eta.push(acc);
        }
        Epsilon { bits, eta }
    }

    /// From a 0/1 integer vector.
    pub fn from_ints(values: &[u64]) -> Result<Self, PencilError> {
        let bits = values
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(PencilError::BadEpsilon(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Epsilon::new(bits))
    }

    /// The mask for order `n` with every entry set: the bidiagonal pencil.
    pub fn all_ones(n: usize) -> Self {
        Epsilon::new(vec![true; n.saturating_sub(1)])
    }

    pub fn all_zeros(n: usize) -> Self {
        Epsilon::new(vec![false; n.saturating_sub(1)])
    }

    /// Matrix order this mask belongs to.
    pub fn order(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `eps_n`. Positions at or past `N - 1` read as unset.
    pub fn is_set(&self, n: usize) -> bool {
        self.bits.get(n).copied().unwrap_or(false)
    }

    /// `eta_n = eps_0 + ... + eps_{n-1}`, for `n < N`.
    pub fn eta(&self, n: usize) -> usize {
        self.eta[n]
    }

    /// `eta_{N-1}`.
    pub fn eta_last(&self) -> usize {
        self.eta[self.bits.len()]
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn is_all_zeros(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn to_ints(&self) -> Vec<u64> {
        self.bits.iter().map(|&b| u64::from(b)).collect()
    }
}

/// A Hessenberg-bidiagonal pencil `(L_eps* R^(M-1) ... R^(0), L_eps)`.
///
/// `q[k]` is the diagonal of `R^(k)`; `e` is the coupling data `e^(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilSpec<S> {
    pub n: usize,
    pub m: usize,
    pub epsilon: Epsilon,
    pub q: Vec<Vec<S>>,
    pub e: Vec<S>,
}

fn check_len(what: impl Into<String>, expected: usize, found: usize) -> Result<(), PencilError> {
    if expected == found {
        Ok(())
    } else {
        Err(PencilError::LengthMismatch {
            what: what.into(),
            expected,
            found,
        })
    }
}

impl<S: Field> PencilSpec<S> {
    pub fn new(q: Vec<Vec<S>>, e: Vec<S>, epsilon: Epsilon) -> Result<Self, PencilError> {
        let m = q.len();
        if m == 0 {
            return Err(PencilError::NoFactors);
        }
        let n = q[0].len();
        if n == 0 {
            return Err(PencilError::EmptyPencil);
        }
        for (k, row) in q.iter().enumerate() {
            check_len(format!("q[{k}]"), n, row.len())?;
        }
        check_len("e", n - 1, e.len())?;
        check_len("epsilon", n - 1, epsilon.bits().len())?;
        Ok(PencilSpec {
            n,
            m,
            epsilon,
            q,
            e,
        })
    }

    /// Single-factor pencil `(L_eps* R, L_eps)`.
    pub fn single(q: Vec<S>, e: Vec<S>, epsilon: Epsilon) -> Result<Self, PencilError> {
        PencilSpec::new(vec![q], e, epsilon)
    }

    pub fn is_positive(&self) -> bool {
        self.q.iter().flatten().chain(&self.e).all(Field::is_positive)
    }

    pub fn map<T: Field>(&self, f: impl Fn(&S) -> T) -> PencilSpec<T> {
        PencilSpec {
            n: self.n,
            m: self.m,
            epsilon: self.epsilon.clone(),
            q: self.q.iter().map(|row| row.iter().map(&f).collect()).collect(),
            e: self.e.iter().map(&f).collect(),
        }
    }
}

/// Factors of the isospectral matrix `H_hat = L_hat R_hat^(M-1) ... R_hat^(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult<S> {
    pub n: usize,
    pub m: usize,
    pub epsilon: Epsilon,
    pub q_hat: Vec<Vec<S>>,
    pub e_hat: Vec<S>,
}

impl<S: Field> TransformResult<S> {
    pub fn new(
        q_hat: Vec<Vec<S>>,
        e_hat: Vec<S>,
        epsilon: Epsilon,
    ) -> Result<Self, PencilError> {
        // Same shape rules as a pencil.
        let spec = PencilSpec::new(q_hat, e_hat, epsilon)?;
        Ok(TransformResult {
            n: spec.n,
            m: spec.m,
            epsilon: spec.epsilon,
            q_hat: spec.q,
            e_hat: spec.e,
        })
    }

    /// True when the result is a tridiagonal matrix (`M = 1`).
    pub fn is_tridiagonal(&self) -> bool {
        self.m == 1
    }

    pub fn is_positive(&self) -> bool {
        self.q_hat
            .iter()
            .flatten()
            .chain(&self.e_hat)
            .all(Field::is_positive)
    }

    pub fn map<T: Field>(&self, f: impl Fn(&S) -> T) -> TransformResult<T> {
        TransformResult {
            n: self.n,
            m: self.m,
            epsilon: self.epsilon.clone(),
            q_hat: self
                .q_hat
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
            e_hat: self.e_hat.iter().map(&f).collect(),
        }
    }
}

/// Square row-major matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<S> {
    order: usize,
    data: Vec<S>,
}

impl<S: Field> DenseMatrix<S> {
    pub fn zeros(order: usize) -> Self {
        DenseMatrix {
            order,
            data: vec![S::zero(); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let order = rows.len();
        assert!(rows.iter().all(|r| r.len() == order), "matrix must be square");
        DenseMatrix {
            order,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.order + j] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.order.max(1)).take(self.order)
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.rows().map(<[S]>::to_vec).collect()
    }

    /// Plain product; zero entries are skipped.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order, "order mismatch");
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let acc = out.get(i, j).clone() + &(a.clone() * b);
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.order, v.len(), "order mismatch");
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + &(a.clone() * b))
            })
            .collect()
    }

    /// Entries strictly below the first subdiagonal are all zero.
    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.order).all(|i| (0..i.saturating_sub(1)).all(|j| self.get(i, j).is_zero()))
    }

    /// Number of nonzero superdiagonals (upper bandwidth).
    pub fn upper_bandwidth(&self) -> usize {
        let mut width = 0;
        for i in 0..self.order {
            for j in i + 1..self.order {
                if !self.get(i, j).is_zero() {
                    width = width.max(j - i);
                }
            }
        }
        width
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.is_upper_hessenberg() && self.upper_bandwidth() <= 1
    }
}

impl<S: SignedField> DenseMatrix<S> {
    /// `self - lambda * other`.
    pub fn sub_scaled(&self, lambda: &S, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "order mismatch");
        DenseMatrix {
            order: self.order,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - &(lambda.clone() * b))
                .collect(),
        }
    }
}

impl<S: fmt::Display> fmt::Display for DenseMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.order.max(1)).take(self.order) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<S: fmt::Display> fmt::Debug for DenseMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Diagonal `q`, unit superdiagonal.
pub fn build_upper_bidiagonal<S: Field>(q: &[S]) -> DenseMatrix<S> {
    let n = q.len();
    let mut m = DenseMatrix::zeros(n);
    for (i, qi) in q.iter().enumerate() {
        m.set(i, i, qi.clone());
        if i + 1 < n {
            m.set(i, i + 1, S::one());
        }
    }
    m
}

/// `L_eps`: unit diagonal, `-eps_n e_n` at `(n+1, n)`.
pub fn build_l_epsilon<S: SignedField>(e: &[S], eps: &Epsilon) -> DenseMatrix<S> {
    let mut m = DenseMatrix::identity(e.len() + 1);
    for (i, ei) in e.iter().enumerate() {
        if eps.is_set(i) {
            m.set(i + 1, i, -ei.clone());
        }
    }
    m
}

/// `L_eps*`: unit diagonal, `(1 - eps_n) e_n` at `(n+1, n)`.
pub fn build_l_epsilon_star<S: Field>(e: &[S], eps: &Epsilon) -> DenseMatrix<S> {
    let mut m = DenseMatrix::identity(e.len() + 1);
    for (i, ei) in e.iter().enumerate() {
        if !eps.is_set(i) {
            m.set(i + 1, i, ei.clone());
        }
    }
    m
}

/// `L_hat`: unit diagonal, `+e_hat_n` at `(n+1, n)`.
pub fn build_l_hat<S: Field>(e_hat: &[S]) -> DenseMatrix<S> {
    let mut m = DenseMatrix::identity(e_hat.len() + 1);
    for (i, ei) in e_hat.iter().enumerate() {
        m.set(i + 1, i, ei.clone());
    }
    m
}

/// `L_eps* R^(M-1) ... R^(0)` from a list of diagonals `q[0..M]`.
fn chain_product<S: Field>(lower: DenseMatrix<S>, q: &[Vec<S>]) -> DenseMatrix<S> {
    q.iter()
        .rev()
        .fold(lower, |acc, row| acc.matmul(&build_upper_bidiagonal(row)))
}

/// `(A, B) = (L_eps* R^(M-1) ... R^(0), L_eps)`.
pub fn assemble_pencil<S: SignedField>(spec: &PencilSpec<S>) -> (DenseMatrix<S>, DenseMatrix<S>) {
    let a = chain_product(build_l_epsilon_star(&spec.e, &spec.epsilon), &spec.q);
    let b = build_l_epsilon(&spec.e, &spec.epsilon);
    (a, b)
}

/// `L_hat R_hat^(M-1) ... R_hat^(0)`: tridiagonal for `M = 1`, upper
/// Hessenberg with `M` superdiagonals otherwise.
pub fn assemble_result<S: Field>(result: &TransformResult<S>) -> DenseMatrix<S> {
    chain_product(build_l_hat(&result.e_hat), &result.q_hat)
}
