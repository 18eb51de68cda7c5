//! Subtraction-free isospectral transformations.
//!
//! Three Toda-type evolutions turn a pencil into the factors of a
//! tridiagonal or upper Hessenberg matrix with the same spectrum:
//!
//! * [`relativistic_toda`]: bidiagonal-bidiagonal pencils (`M = 1`, all
//!   `eps_n = 1`), the discrete relativistic Toda lattice.
//! * [`elementary_toda`]: tridiagonal-bidiagonal pencils (`M = 1`, any mask),
//!   the discrete elementary Toda orbits.
//! * [`hungry_toda`]: Hessenberg-bidiagonal pencils (any `M`), the discrete
//!   hungry elementary Toda orbits. [`evolve`] is the underlying engine.
//!
//! Everything here is generic over [`Field`] only, which has no subtraction
//! or negation. For positive input data every quantity stays positive and
//! no digits are lost to cancellation.

use std::fmt;

use thiserror::Error;

use crate::pencil::{Epsilon, PencilError, PencilSpec, TransformResult};
use crate::scalar::Field;

/// The quantity that vanished in a Toda update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Divisor {
    /// `f_{n-1}^{(k)}` (the `eps_{n-1} = 1` branch, or the relativistic lattice).
    F,
    /// `q_{n-1}^{(k+M)}` (the `eps_{n-1} = 0` branch).
    Q,
    /// `q_n^{(k+M)} + eps_n e_{n-1}^{(k+1)}`.
    QPlusE,
}

impl Divisor {
    pub fn name(self) -> &'static str {
        match self {
            Divisor::F => "f",
            Divisor::Q => "q",
            Divisor::QPlusE => "q+eps*e",
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A zero divisor at step `k` while updating position `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
#[error("breakdown at k={k}, n={n}: divisor {divisor} vanished")]
pub struct Breakdown {
    pub k: usize,
    pub n: usize,
    pub divisor: Divisor,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Breakdown(#[from] Breakdown),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error("algorithm {algorithm} does not apply to a pencil with M={m} and this epsilon")]
    AlgorithmMismatch { algorithm: Algorithm, m: usize },
}

/// A table of rows indexed by time level, starting at `first`.
#[derive(Debug, Clone, PartialEq)]
pub struct Levels<S> {
    first: usize,
    rows: Vec<Vec<S>>,
}

impl<S> Levels<S> {
    fn starting_at(first: usize) -> Self {
        Levels {
            first,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<S>) {
        self.rows.push(row);
    }

    /// First stored level.
    pub fn first(&self) -> usize {
        self.first
    }

    /// One past the last stored level.
    pub fn end(&self) -> usize {
        self.first + self.rows.len()
    }

    pub fn row(&self, k: usize) -> Option<&[S]> {
        k.checked_sub(self.first)
            .and_then(|i| self.rows.get(i))
            .map(Vec::as_slice)
    }

    pub fn get(&self, k: usize, n: usize) -> Option<&S> {
        self.row(k).and_then(|r| r.get(n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[S])> {
        self.rows
            .iter()
            .enumerate()
            .map(move |(i, r)| (self.first + i, r.as_slice()))
    }
}

/// Every `(k, n)` value produced by a Toda evolution.
///
/// After `steps` steps the table holds `f` on levels `0..steps`, `q` on
/// `0..steps+M`, `e` on `0..=steps` and `d` on `M..steps+M`. The relativistic
/// lattice has no `d` variable, so its `d` table stays empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub n: usize,
    pub m: usize,
    pub epsilon: Epsilon,
    pub f: Levels<S>,
    pub d: Levels<S>,
    pub q: Levels<S>,
    pub e: Levels<S>,
}

impl<S: Field> Trajectory<S> {
    fn seed(spec: &PencilSpec<S>) -> Self {
        let mut q = Levels::starting_at(0);
        for row in &spec.q {
            q.push(row.clone());
        }
        let mut e = Levels::starting_at(0);
        e.push(spec.e.clone());
        Trajectory {
            n: spec.n,
            m: spec.m,
            epsilon: spec.epsilon.clone(),
            f: Levels::starting_at(0),
            d: Levels::starting_at(spec.m),
            q,
            e,
        }
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.f.end()
    }

    /// Last step index, `None` before the first step.
    pub fn k_max(&self) -> Option<usize> {
        self.steps().checked_sub(1)
    }

    /// Every stored value is positive (and finite, in float mode).
    pub fn all_positive(&self) -> bool {
        [&self.f, &self.d, &self.q, &self.e]
            .iter()
            .all(|t| t.rows.iter().flatten().all(Field::is_positive))
    }

    /// `f_{N-1}^{(k)} = q_{N-1}^{(k)}` at every computed level.
    pub fn boundary_holds(&self) -> bool {
        let last = self.n - 1;
        self.f
            .iter()
            .all(|(k, row)| self.q.get(k, last) == Some(&row[last]))
    }
}

/// A run stopped by a zero divisor, with every level completed before it.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialRun<S> {
    pub breakdown: Breakdown,
    pub trajectory: Trajectory<S>,
}

fn divide<S: Field>(
    numer: S,
    denom: &S,
    k: usize,
    n: usize,
    divisor: Divisor,
) -> Result<S, Breakdown> {
    numer
        .checked_div(denom)
        .ok_or(Breakdown { k, n, divisor })
}

fn check_single<S: Field>(q: &[S], e: &[S], eps: &Epsilon) -> Result<(), PencilError> {
    if q.is_empty() {
        return Err(PencilError::EmptyPencil);
    }
    for (what, len) in [("e", e.len()), ("epsilon", eps.bits().len())] {
        if len + 1 != q.len() {
            return Err(PencilError::LengthMismatch {
                what: what.into(),
                expected: q.len() - 1,
                found: len,
            });
        }
    }
    Ok(())
}

/// Bidiagonal-bidiagonal pencil `(R, L)` to a tridiagonal matrix.
///
/// Runs the discrete relativistic Toda lattice for `k = 0..N` and reads off
/// `q_hat_n = f_n^{(n)}`, `e_hat_n = e_n^{(n+1)}`.
pub fn relativistic_toda<S: Field>(
    q: &[S],
    e: &[S],
) -> Result<(TransformResult<S>, Trajectory<S>), TransformError> {
    let eps = Epsilon::all_ones(q.len());
    check_single(q, e, &eps)?;
    let spec = PencilSpec::single(q.to_vec(), e.to_vec(), eps)?;
    let n = spec.n;
    let mut traj = Trajectory::seed(&spec);
    traj.d = Levels::starting_at(1);

    for k in 0..n {
        let qk = traj.q.row(k).expect("q level present");
        let ek = traj.e.row(k).expect("e level present");
        let f: Vec<S> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    qk[i].clone() + &ek[i]
                } else {
                    qk[i].clone()
                }
            })
            .collect();
        let mut q_next = Vec::with_capacity(n);
        let mut e_next = Vec::with_capacity(n - 1);
        for i in 0..n {
            if i == 0 {
                q_next.push(f[0].clone());
            } else {
                q_next.push(divide(
                    qk[i - 1].clone() * &f[i],
                    &f[i - 1],
                    k,
                    i,
                    Divisor::F,
                )?);
            }
            if i + 1 < n {
                e_next.push(divide(ek[i].clone() * &f[i + 1], &f[i], k, i, Divisor::F)?);
            }
        }
        traj.f.push(f);
        traj.q.push(q_next);
        traj.e.push(e_next);
    }

    let q_hat = (0..n)
        .map(|i| traj.f.get(i, i).expect("f level").clone())
        .collect();
    let e_hat = (0..n - 1)
        .map(|i| traj.e.get(i + 1, i).expect("e level").clone())
        .collect();
    let result = TransformResult::new(vec![q_hat], e_hat, spec.epsilon)?;
    Ok((result, traj))
}

/// Tridiagonal-bidiagonal pencil `(L_eps* R, L_eps)` to a tridiagonal matrix.
///
/// Runs the discrete elementary Toda orbits for `k = 0..=eta_{N-1}` and reads
/// off `q_hat_n = f_n^{(eta_n)}`, `e_hat_n = e_n^{(eta_{n+1})}`.
pub fn elementary_toda<S: Field>(
    q: &[S],
    e: &[S],
    eps: &Epsilon,
) -> Result<(TransformResult<S>, Trajectory<S>), TransformError> {
    check_single(q, e, eps)?;
    let spec = PencilSpec::single(q.to_vec(), e.to_vec(), eps.clone())?;
    let n = spec.n;
    let mut traj = Trajectory::seed(&spec);

    for k in 0..=eps.eta_last() {
        let qk = traj.q.row(k).expect("q level present");
        let ek = traj.e.row(k).expect("e level present");
        let f: Vec<S> = (0..n)
            .map(|i| {
                if i + 1 < n && eps.is_set(i) {
                    qk[i].clone() + &ek[i]
                } else {
                    qk[i].clone()
                }
            })
            .collect();
        let mut d_next: Vec<S> = Vec::with_capacity(n);
        let mut q_next: Vec<S> = Vec::with_capacity(n);
        let mut e_next: Vec<S> = Vec::with_capacity(n - 1);
        for i in 0..n {
            let d = if i == 0 {
                f[0].clone()
            } else if eps.is_set(i - 1) {
                divide(qk[i - 1].clone() * &f[i], &f[i - 1], k, i, Divisor::F)?
            } else {
                divide(d_next[i - 1].clone() * &f[i], &q_next[i - 1], k, i, Divisor::Q)?
            };
            let qn = if i + 1 < n && !eps.is_set(i) {
                d.clone() + &ek[i]
            } else {
                d.clone()
            };
            if i + 1 < n {
                let denom = if i > 0 && eps.is_set(i) {
                    qn.clone() + &e_next[i - 1]
                } else {
                    qn.clone()
                };
                e_next.push(divide(ek[i].clone() * &f[i + 1], &denom, k, i, Divisor::QPlusE)?);
            }
            d_next.push(d);
            q_next.push(qn);
        }
        traj.f.push(f);
        traj.d.push(d_next);
        traj.q.push(q_next);
        traj.e.push(e_next);
    }

    let q_hat = (0..n)
        .map(|i| traj.f.get(eps.eta(i), i).expect("f level").clone())
        .collect();
    let e_hat = (0..n - 1)
        .map(|i| traj.e.get(eps.eta(i + 1), i).expect("e level").clone())
        .collect();
    let result = TransformResult::new(vec![q_hat], e_hat, eps.clone())?;
    Ok((result, traj))
}

/// One step of the hungry evolution from level `k`: returns
/// `(f^{(k)}, d^{(k+M)}, q^{(k+M)}, e^{(k+1)})`.
#[allow(clippy::type_complexity)]
fn hungry_step<S: Field>(
    traj: &Trajectory<S>,
    k: usize,
) -> Result<(Vec<S>, Vec<S>, Vec<S>, Vec<S>), Breakdown> {
    let n = traj.n;
    let eps = &traj.epsilon;
    let qk = traj.q.row(k).expect("q level present");
    let ek = traj.e.row(k).expect("e level present");

    let f: Vec<S> = (0..n)
        .map(|i| match ek.get(i) {
            Some(ei) if eps.is_set(i) => qk[i].clone() + ei,
            _ => qk[i].clone(),
        })
        .collect();

    let mut d: Vec<S> = Vec::with_capacity(n);
    let mut q: Vec<S> = Vec::with_capacity(n);
    let mut e: Vec<S> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let di = match i {
            0 => f[0].clone(),
            _ if eps.is_set(i - 1) => {
                divide(qk[i - 1].clone() * &f[i], &f[i - 1], k, i, Divisor::F)?
            }
            _ => divide(d[i - 1].clone() * &f[i], &q[i - 1], k, i, Divisor::Q)?,
        };
        let qi = match ek.get(i) {
            Some(ei) if !eps.is_set(i) => di.clone() + ei,
            _ => di.clone(),
        };
        if let Some(ei) = ek.get(i) {
            let denom = match e.last() {
                Some(prev) if eps.is_set(i) => qi.clone() + prev,
                _ => qi.clone(),
            };
            e.push(divide(ei.clone() * &f[i + 1], &denom, k, i, Divisor::QPlusE)?);
        }
        d.push(di);
        q.push(qi);
    }
    Ok((f, d, q, e))
}

/// Runs `steps` steps of the hungry evolution from `spec`.
///
/// On a zero divisor the returned [`PartialRun`] keeps every step that
/// completed before it.
pub fn evolve<S: Field>(spec: &PencilSpec<S>, steps: usize) -> Result<Trajectory<S>, PartialRun<S>> {
    let mut traj = Trajectory::seed(spec);
    for k in 0..steps {
        match hungry_step(&traj, k) {
            Ok((f, d, q, e)) => {
                traj.f.push(f);
                traj.d.push(d);
                traj.q.push(q);
                traj.e.push(e);
            }
            Err(breakdown) => {
                return Err(PartialRun {
                    breakdown,
                    trajectory: traj,
                })
            }
        }
    }
    Ok(traj)
}

/// Steps needed before the output can be read off: `(eta_{N-1} + 1) M`.
pub fn required_steps(epsilon: &Epsilon, m: usize) -> usize {
    (epsilon.eta_last() + 1) * m
}

/// Reads `q_hat_n^{(j)} = f_n^{(j + eta_n M)}` for `j < M` and
/// `e_hat_n = e_n^{(eta_{n+1} M)}` out of a long enough trajectory.
pub fn extract_result<S: Field>(traj: &Trajectory<S>) -> Option<TransformResult<S>> {
    let (n, m, eps) = (traj.n, traj.m, &traj.epsilon);
    let q_hat = (0..m)
        .map(|j| {
            (0..n)
                .map(|i| traj.f.get(j + eps.eta(i) * m, i).cloned())
                .collect::<Option<Vec<S>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    let e_hat = (0..n - 1)
        .map(|i| traj.e.get(eps.eta(i + 1) * m, i).cloned())
        .collect::<Option<Vec<S>>>()?;
    TransformResult::new(q_hat, e_hat, eps.clone()).ok()
}

/// Hessenberg-bidiagonal pencil `(L_eps* R^(M-1) ... R^(0), L_eps)` to an
/// upper Hessenberg matrix with `M` superdiagonals.
pub fn hungry_toda<S: Field>(
    spec: &PencilSpec<S>,
) -> Result<(TransformResult<S>, Trajectory<S>), TransformError> {
    let traj = evolve(spec, required_steps(&spec.epsilon, spec.m))
        .map_err(|p| TransformError::Breakdown(p.breakdown))?;
    let result = extract_result(&traj).expect("trajectory covers the output levels");
    Ok((result, traj))
}

/// Which evolution to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Algorithm {
    /// Pick from `(M, eps)`.
    #[default]
    Auto,
    Relativistic,
    Elementary,
    Hungry,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Auto => "auto",
            Algorithm::Relativistic => "relativistic",
            Algorithm::Elementary => "elementary",
            Algorithm::Hungry => "hungry",
        })
    }
}

impl Algorithm {
    /// The concrete algorithm `Auto` resolves to for `spec`.
    pub fn resolve<S>(self, spec: &PencilSpec<S>) -> Algorithm {
        match self {
            Algorithm::Auto if spec.m > 1 => Algorithm::Hungry,
            Algorithm::Auto if spec.epsilon.is_all_ones() => Algorithm::Relativistic,
            Algorithm::Auto => Algorithm::Elementary,
            other => other,
        }
    }
}

/// Transforms `spec` with the requested algorithm.
pub fn transform<S: Field>(
    spec: &PencilSpec<S>,
    algorithm: Algorithm,
) -> Result<(TransformResult<S>, Trajectory<S>), TransformError> {
    let algorithm = algorithm.resolve(spec);
    let mismatch = TransformError::AlgorithmMismatch {
        algorithm,
        m: spec.m,
    };
    match algorithm {
        Algorithm::Relativistic => {
            if spec.m != 1 || !spec.epsilon.is_all_ones() {
                return Err(mismatch);
            }
            relativistic_toda(&spec.q[0], &spec.e)
        }
        Algorithm::Elementary => {
            if spec.m != 1 {
                return Err(mismatch);
            }
            elementary_toda(&spec.q[0], &spec.e, &spec.epsilon)
        }
        _ => hungry_toda(spec),
    }
}
