//! Exact polynomial families `p_n^{(k)}(x)` rebuilt from a trajectory, and
//! coefficientwise checks of the recurrence identities they must satisfy.
//!
//! This module is verification code and subtracts freely.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::pencil::{assemble_result, TransformResult};
use crate::scalar::{Field, Rational};
use crate::transform::{required_steps, Trajectory};

/// Dense polynomial with exact coefficients in ascending degree. Trailing
/// zeros are always trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == Rational::one())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `x * self`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rational::from(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let Some(top) = self.degree().filter(|&d| d >= dd) else {
            return (Polynomial::zero(), self.clone());
        };
        let mut quot = vec![Rational::zero(); top - dd + 1];
        for shift in (0..=top - dd).rev() {
            let c = &rem[shift + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = &rem[shift + i] - &(&c * dc);
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl<'a> Add<&'a Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        Polynomial::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let unit = mag == Rational::from(1);
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag} x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag} x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("the three-term construction needs M = 1, got M = {0}")]
    NotSingleFactor(usize),
    #[error("trajectory too short for p_{n}^{{({k})}}")]
    InsufficientTrajectory { k: usize, n: usize },
}

/// The table `p_n^{(k)}`, `0 <= n <= N`. Row `n` holds levels `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFamily {
    rows: Vec<Vec<Polynomial>>,
}

impl PolyFamily {
    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, k: usize, n: usize) -> Option<&Polynomial> {
        self.rows.get(n).and_then(|r| r.get(k))
    }

    pub fn try_get(&self, k: usize, n: usize) -> Result<&Polynomial, FamilyError> {
        self.get(k, n)
            .ok_or(FamilyError::InsufficientTrajectory { k, n })
    }

    /// Number of levels available for degree `n`.
    pub fn levels(&self, n: usize) -> usize {
        self.rows.get(n).map_or(0, Vec::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Polynomial)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(k, p)| (k, n, p)))
    }
}

/// Builds the family from the three-term recurrence at every level where the
/// trajectory has both `q^{(k)}` and `e^{(k)}`. Single-factor runs only.
pub fn build_family_m1(traj: &Trajectory<Rational>) -> Result<PolyFamily, FamilyError> {
    if traj.m != 1 {
        return Err(FamilyError::NotSingleFactor(traj.m));
    }
    let n_ord = traj.n;
    let eps = &traj.epsilon;
    let levels = traj.q.end().min(traj.e.end());
    let x = Polynomial::x();
    let mut rows: Vec<Vec<Polynomial>> = vec![Vec::with_capacity(levels); n_ord + 1];
    for k in 0..levels {
        let q = traj.q.row(k).expect("q level");
        let e = traj.e.row(k).expect("e level");
        let mut prev = Polynomial::zero();
        let mut cur = Polynomial::one();
        rows[0].push(cur.clone());
        for n in 0..n_ord {
            let next = if n == 0 {
                &cur.shift() - &cur.scale(&q[0])
            } else {
                let set = eps.is_set(n - 1);
                let e_prev = &e[n - 1];
                let mut diag = q[n].clone();
                if !set {
                    diag = diag + e_prev;
                }
                let lead = &(&cur.shift() - &cur.scale(&diag));
                let coupling = if set {
                    x.scale(e_prev)
                } else {
                    Polynomial::constant(&q[n - 1] * e_prev)
                };
                lead - &(&coupling * &prev)
            };
            rows[n + 1].push(next.clone());
            prev = cur;
            cur = next;
        }
    }
    Ok(PolyFamily { rows })
}

/// Builds the family by induction on `n` from `p_0^{(k)} = 1` and
/// `p_{n+1}^{(k)} = x p_n^{(k+1)} - q_n^{(k)} p_n^{(k)}`. Degree `n` is
/// available for levels `0..=K-n`, `K` being the last stored `q` level.
pub fn build_family_general(traj: &Trajectory<Rational>) -> PolyFamily {
    let last_q = traj.q.end() - 1;
    let mut rows: Vec<Vec<Polynomial>> = Vec::with_capacity(traj.n + 1);
    rows.push(vec![Polynomial::one(); last_q + 1]);
    for n in 0..traj.n {
        let prev = &rows[n];
        let next: Vec<Polynomial> = (0..prev.len().saturating_sub(1))
            .map(|k| {
                let q = traj.q.get(k, n).expect("q level");
                &prev[k + 1].shift() - &prev[k].scale(q)
            })
            .collect();
        rows.push(next);
    }
    PolyFamily { rows }
}

/// Step count for a trajectory long enough that every identity, including
/// the output-matrix relations at all `M` levels, has its operands.
pub fn verification_steps(traj_n: usize, m: usize, eps: &crate::pencil::Epsilon) -> usize {
    required_steps(eps, m) + traj_n + 1
}

/// Outcome of one identity over all `(k, n)` where its operands exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub checked: usize,
    pub first_failure: Option<(usize, usize)>,
}

impl IdentityCheck {
    fn new(name: &'static str) -> Self {
        IdentityCheck {
            name,
            checked: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, k: usize, n: usize, ok: bool) {
        self.checked += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some((k, n));
        }
    }

    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure {
            None => write!(f, "{}: pass ({} checks)", self.name, self.checked),
            Some((k, n)) => write!(
                f,
                "{}: FAIL at k={k}, n={n} ({} checks)",
                self.name, self.checked
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub const MONIC: &str = "monic";
pub const GEOMETRIC_SHIFT: &str = "p(k) = p(k+M) + e p(k+(1-eps)M)";
pub const CHRISTOFFEL_F: &str = "x p(k+1) = p(k+eps M) + f p(k)";
pub const CHRISTOFFEL_D: &str = "x p(k+1) = p(k+(eps-1)M) + d p(k)";
pub const PERIODICITY: &str = "p_N(k+M) = p_N(k)";
pub const MERGED_THREE_TERM: &str = "merged three-term (M=1)";
pub const TRIDIAGONAL_EVP: &str = "T_hat p_hat + p_N = x p_hat (M=1)";
pub const UPPER_FACTOR: &str = "x p_hat(k+1) = R_hat(k) p_hat(k) + p_N(k)";
pub const LOWER_FACTOR: &str = "p_hat(0) = L_hat p_hat(M)";

/// Verifies the recurrence identities coefficientwise.
///
/// `family` and `traj` must come from the same run; `result` is that run's
/// output. The family is usually built from a trajectory extended to
/// [`verification_steps`] so that every relation has its operands.
pub fn check_identities(
    family: &PolyFamily,
    traj: &Trajectory<Rational>,
    result: &TransformResult<Rational>,
) -> IdentityReport {
    let n_ord = traj.n;
    let m = traj.m;
    let eps = &traj.epsilon;
    let p = |k: usize, n: usize| family.get(k, n);
    let max_k = (0..=n_ord).map(|n| family.levels(n)).max().unwrap_or(0);
    let e_at = |k: usize, n: usize| traj.e.get(k, n);

    let mut monic = IdentityCheck::new(MONIC);
    for (k, n, poly) in family.iter() {
        monic.record(k, n, poly.is_monic() && poly.degree() == Some(n));
    }

    let mut shift = IdentityCheck::new(GEOMETRIC_SHIFT);
    for k in 0..max_k {
        for n in 1..n_ord {
            let lag = if eps.is_set(n - 1) { 0 } else { m };
            let (Some(lhs), Some(a), Some(b), Some(e)) =
                (p(k, n), p(k + m, n), p(k + lag, n - 1), e_at(k, n - 1))
            else {
                continue;
            };
            shift.record(k, n, *lhs == a + &b.scale(e));
        }
    }

    let mut christoffel_f = IdentityCheck::new(CHRISTOFFEL_F);
    for k in 0..max_k {
        for n in 0..n_ord {
            let lead = if eps.is_set(n) { m } else { 0 };
            let (Some(lhs), Some(a), Some(b), Some(f)) =
                (p(k + 1, n), p(k + lead, n + 1), p(k, n), traj.f.get(k, n))
            else {
                continue;
            };
            christoffel_f.record(k, n, lhs.shift() == a + &b.scale(f));
        }
    }

    let mut christoffel_d = IdentityCheck::new(CHRISTOFFEL_D);
    for k in 0..max_k {
        for n in 0..n_ord {
            // k + (eps_n - 1) M must be a valid level.
            let Some(target) = (if eps.is_set(n) { Some(k) } else { k.checked_sub(m) }) else {
                continue;
            };
            let (Some(lhs), Some(a), Some(b), Some(d)) =
                (p(k + 1, n), p(target, n + 1), p(k, n), traj.d.get(k, n))
            else {
                continue;
            };
            christoffel_d.record(k, n, lhs.shift() == a + &b.scale(d));
        }
    }

    let mut periodic = IdentityCheck::new(PERIODICITY);
    for k in 0..max_k {
        if let (Some(a), Some(b)) = (p(k, n_ord), p(k + m, n_ord)) {
            periodic.record(k, n_ord, a == b);
        }
    }

    let mut checks = vec![monic, shift, christoffel_f, christoffel_d, periodic];

    if m == 1 {
        let mut merged = IdentityCheck::new(MERGED_THREE_TERM);
        for k in 0..max_k {
            for n in 0..n_ord {
                let lead = usize::from(eps.is_set(n));
                let (Some(pk), Some(next), Some(f)) =
                    (p(k, n), p(k + lead, n + 1), traj.f.get(k, n))
                else {
                    continue;
                };
                let rhs = if n == 0 {
                    next + &pk.scale(f)
                } else {
                    let back = usize::from(eps.is_set(n - 1));
                    let Some(kb) = k.checked_sub(back) else { continue };
                    let (Some(e), Some(f_prev), Some(p_prev)) =
                        (e_at(k, n - 1), traj.f.get(kb, n - 1), p(kb, n - 1))
                    else {
                        continue;
                    };
                    &(next + &pk.scale(&(f.clone() + e))) + &p_prev.scale(&(f_prev * e))
                };
                merged.record(k, n, pk.shift() == rhs);
            }
        }
        checks.push(merged);

        // p_hat_N = p_N enters the last row only.
        let mut evp = IdentityCheck::new(TRIDIAGONAL_EVP);
        let t_hat = assemble_result(result);
        let p_hat: Option<Vec<&Polynomial>> = (0..=n_ord)
            .map(|n| p(if n < n_ord { eps.eta(n) } else { 0 }, n))
            .collect();
        if let Some(p_hat) = p_hat {
            for n in 0..n_ord {
                let mut rhs = if n + 1 == n_ord {
                    p_hat[n_ord].clone()
                } else {
                    Polynomial::zero()
                };
                for j in n.saturating_sub(1)..n_ord {
                    let t = t_hat.get(n, j);
                    if !t.is_zero() {
                        rhs = &rhs + &p_hat[j].scale(t);
                    }
                }
                evp.record(0, n, p_hat[n].shift() == rhs);
            }
        }
        checks.push(evp);
    }

    let p_hat = |k: usize, n: usize| {
        if n < n_ord {
            p(k + eps.eta(n) * m, n)
        } else {
            p(k, n)
        }
    };

    let mut upper = IdentityCheck::new(UPPER_FACTOR);
    for (k, q_hat) in result.q_hat.iter().enumerate() {
        for n in 0..n_ord {
            let (Some(lhs), Some(cur), Some(next)) = (p_hat(k + 1, n), p_hat(k, n), p_hat(k, n + 1))
            else {
                continue;
            };
            upper.record(k, n, lhs.shift() == next + &cur.scale(&q_hat[n]));
        }
    }
    checks.push(upper);

    let mut lower = IdentityCheck::new(LOWER_FACTOR);
    for n in 0..n_ord {
        let (Some(lhs), Some(cur)) = (p_hat(0, n), p_hat(m, n)) else {
            continue;
        };
        let rhs = if n == 0 {
            Some(cur.clone())
        } else {
            p_hat(m, n - 1).map(|prev| cur + &prev.scale(&result.e_hat[n - 1]))
        };
        if let Some(rhs) = rhs {
            lower.record(0, n, *lhs == rhs);
        }
    }
    checks.push(lower);

    IdentityReport { checks }
}
