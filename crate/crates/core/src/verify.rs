//! Independent exact oracles: characteristic polynomials of pencils and
//! matrices, moment/Hankel determinant formulas, and Sturm-sequence root
//! extraction.

use std::fmt;

use thiserror::Error;

use crate::par::Execution;
use crate::pencil::{assemble_pencil, assemble_result, DenseMatrix, PencilSpec, TransformResult};
use crate::polyseq::Polynomial;
use crate::scalar::{Field, Rational};

/// Exact determinant by Gaussian elimination with nonzero pivoting.
pub fn determinant(m: &DenseMatrix<Rational>) -> Rational {
    let n = m.order();
    let mut a = m.to_rows();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            let (upper, lower) = a.split_at_mut(r);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x = &*x - &(&factor * y);
            }
        }
    }
    det
}

/// Exact Lagrange interpolation through `(x_i, y_i)` with distinct nodes.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Polynomial {
    assert_eq!(xs.len(), ys.len(), "node/value count mismatch");
    let mut out = Polynomial::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Polynomial::one();
        let mut denom = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &Polynomial::new(vec![-xj, Rational::one()]);
            denom = denom * &(xi - xj);
        }
        out = &out + &basis.scale(&(yi / &denom));
    }
    out
}

/// Monic `det(A - lambda B)`, by exact evaluation at `lambda = 0..=N` and
/// interpolation. Returns the zero polynomial for a singular pencil.
pub fn charpoly(a: &DenseMatrix<Rational>, b: &DenseMatrix<Rational>) -> Polynomial {
    charpoly_with(a, b, Execution::default())
}

pub fn charpoly_with(
    a: &DenseMatrix<Rational>,
    b: &DenseMatrix<Rational>,
    exec: Execution,
) -> Polynomial {
    assert_eq!(a.order(), b.order(), "pencil order mismatch");
    let nodes: Vec<Rational> = (0..=a.order() as i64).map(Rational::from).collect();
    let values = exec.map(&nodes, |lambda| determinant(&a.sub_scaled(lambda, b)));
    interpolate(&nodes, &values).monic()
}

/// Monic characteristic polynomial of the pencil `(A, B)` of `spec`.
pub fn pencil_charpoly(spec: &PencilSpec<Rational>) -> Polynomial {
    let (a, b) = assemble_pencil(spec);
    charpoly(&a, &b)
}

/// Monic characteristic polynomial of the assembled output matrix.
pub fn result_charpoly(result: &TransformResult<Rational>) -> Polynomial {
    let h = assemble_result(result);
    charpoly(&h, &DenseMatrix::identity(h.order()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TauError {
    #[error("moment mu_{0} is not available")]
    MissingMoments(usize),
    #[error("Hankel determinant tau_{n}^{{({k})}} vanished")]
    TauBreakdown { n: usize, k: usize },
    #[error("moment formulas apply to tridiagonal results only (M = 1), got M = {0}")]
    NotTridiagonal(usize),
}

/// Moments `mu_m` for `m = start..start + mu.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    pub start: usize,
    pub mu: Vec<Rational>,
}

impl MomentSequence {
    pub fn get(&self, index: usize) -> Result<&Rational, TauError> {
        index
            .checked_sub(self.start)
            .and_then(|i| self.mu.get(i))
            .ok_or(TauError::MissingMoments(index))
    }
}

/// `mu_m = e_0^T T^m e_0` for `m = 0..count`.
pub fn moments_from_tridiagonal(t: &DenseMatrix<Rational>, count: usize) -> MomentSequence {
    let n = t.order();
    let mut v: Vec<Rational> = (0..n)
        .map(|i| if i == 0 { Rational::one() } else { Rational::zero() })
        .collect();
    let mut mu = Vec::with_capacity(count);
    for _ in 0..count {
        mu.push(v[0].clone());
        v = t.mat_vec(&v);
    }
    MomentSequence { start: 0, mu }
}

/// Block-Hankel determinant `tau_n^{(k)} = det[mu_{k + iM + j}]`, `i, j < n`.
/// `M = 1` gives the plain Hankel determinant; `tau_0 = 1`.
pub fn tau(mu: &MomentSequence, n: usize, k: usize, m: usize) -> Result<Rational, TauError> {
    if n == 0 {
        return Ok(Rational::one());
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| mu.get(k + i * m + j).cloned())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(determinant(&DenseMatrix::from_rows(rows)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauCheck {
    /// `"q_hat"` or `"e_hat"`.
    pub quantity: &'static str,
    pub n: usize,
    pub expected: Rational,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauReport {
    pub checks: Vec<TauCheck>,
}

impl TauReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for TauReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{}_{} = {}: {verdict}", c.quantity, c.n, c.expected)?;
        }
        Ok(())
    }
}

/// Checks `q_hat` and `e_hat` against the Hankel ratios
/// `q_hat_n = tau_n^(0) tau_{n+1}^(1) / (tau_n^(1) tau_{n+1}^(0))` and
/// `e_hat_n = tau_n^(1) tau_{n+2}^(0) / (tau_{n+1}^(0) tau_{n+1}^(1))`,
/// with moments read from the output tridiagonal itself. The ratios are
/// invariant under rescaling the moments, so the absolute time level of the
/// output does not matter.
pub fn check_tau_formulas(result: &TransformResult<Rational>) -> Result<TauReport, TauError> {
    if result.m != 1 {
        return Err(TauError::NotTridiagonal(result.m));
    }
    let n_ord = result.n;
    let t = assemble_result(result);
    let mu = moments_from_tridiagonal(&t, 2 * n_ord + 1);
    let taus = |k: usize| -> Result<Vec<Rational>, TauError> {
        (0..=n_ord).map(|n| tau(&mu, n, k, 1)).collect()
    };
    let (t0, t1) = (taus(0)?, taus(1)?);
    let ratio = |num: [&Rational; 2], den: [(&Rational, usize, usize); 2]| {
        let mut d = Rational::one();
        for (value, n, k) in den {
            if value.is_zero() {
                return Err(TauError::TauBreakdown { n, k });
            }
            d = d * value;
        }
        Ok(&(num[0] * num[1]) / &d)
    };

    let mut checks = Vec::with_capacity(2 * n_ord);
    for n in 0..n_ord {
        let expected = ratio([&t0[n], &t1[n + 1]], [(&t1[n], n, 1), (&t0[n + 1], n + 1, 0)])?;
        let passed = expected == result.q_hat[0][n];
        checks.push(TauCheck {
            quantity: "q_hat",
            n,
            expected,
            passed,
        });
    }
    for n in 0..n_ord.saturating_sub(1) {
        let expected = ratio(
            [&t1[n], &t0[n + 2]],
            [(&t0[n + 1], n + 1, 0), (&t1[n + 1], n + 1, 1)],
        )?;
        let passed = expected == result.e_hat[n];
        checks.push(TauCheck {
            quantity: "e_hat",
            n,
            expected,
            passed,
        });
    }
    Ok(TauReport { checks })
}

/// One distinct real root, bracketed by `(lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub lower: Rational,
    pub upper: Rational,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub degree: usize,
    /// Distinct real roots in ascending order.
    pub roots: Vec<RealRoot>,
    /// Roots not on the real line, counted with multiplicity.
    pub complex_count: usize,
}

impl RootReport {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// Degree minus the number of simple real roots: everything that is
    /// complex or repeated.
    pub fn non_isolated(&self) -> usize {
        self.degree - self.roots.iter().filter(|r| r.multiplicity == 1).count()
    }

    pub fn all_real_simple(&self) -> bool {
        self.non_isolated() == 0
    }
}

struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    /// Chain of a squarefree polynomial of positive degree.
    fn new(p: &Polynomial) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let len = chain.len();
            let (_, r) = chain[len - 2].div_rem(&chain[len - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = p.eval(x).signum();
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

fn squarefree(p: &Polynomial) -> Polynomial {
    let g = p.gcd(&p.derivative());
    p.div_rem(&g).0.monic()
}

/// Multiplicity of the single root of `p`'s squarefree part in `(a, b]`.
fn multiplicity(p: &Polynomial, a: &Rational, b: &Rational) -> usize {
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return 1;
    }
    let chain = SturmChain::new(&squarefree(&g));
    if chain.count(a, b) > 0 {
        1 + multiplicity(&g, a, b)
    } else {
        1
    }
}

/// Cauchy bound: every root lies strictly inside `(-B, B)`.
fn cauchy_bound(p: &Polynomial) -> Rational {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| &c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    max + &Rational::one()
}

/// Isolates every real root of `p` with a Sturm sequence on the Cauchy-bound
/// interval and refines each bracket by bisection to width `<= tol`.
pub fn real_roots(p: &Polynomial, tol: f64) -> RootReport {
    let degree = p.degree().unwrap_or(0);
    if degree == 0 {
        return RootReport {
            degree,
            roots: Vec::new(),
            complex_count: 0,
        };
    }
    let tol = Rational::from_f64(tol.abs())
        .filter(|t| !t.is_zero())
        .unwrap_or_else(|| Rational::new(1, 10_000_000_000i64).expect("nonzero"));
    let s = squarefree(p);
    let chain = SturmChain::new(&s);
    let bound = cauchy_bound(&s);
    let two = Rational::from(2);

    let mut isolated: Vec<(Rational, Rational)> = Vec::new();
    let mut stack = vec![(-&bound, bound.clone())];
    while let Some((a, b)) = stack.pop() {
        match chain.count(&a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = &(&a + &b) / &two;
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }

    let mut roots: Vec<RealRoot> = isolated
        .into_iter()
        .map(|(a, b)| {
            let mult = multiplicity(p, &a, &b);
            let (lower, upper) = bisect(&s, a, b, &tol);
            let value = ((&lower + &upper) / &two).to_f64();
            RealRoot {
                value,
                lower,
                upper,
                multiplicity: mult,
            }
        })
        .collect();
    roots.sort_by(|x, y| x.lower.cmp(&y.lower));
    let real: usize = roots.iter().map(|r| r.multiplicity).sum();
    RootReport {
        degree,
        roots,
        complex_count: degree - real,
    }
}

/// Shrinks `(a, b]`, which holds exactly one root of the squarefree `s`.
fn bisect(s: &Polynomial, mut a: Rational, mut b: Rational, tol: &Rational) -> (Rational, Rational) {
    let two = Rational::from(2);
    let sign_b = s.eval(&b).signum();
    if sign_b == 0 {
        return (b.clone(), b);
    }
    while &b - &a > *tol {
        let mid = &(&a + &b) / &two;
        match s.eval(&mid).signum() {
            0 => return (mid.clone(), mid),
            sm if sm == sign_b => b = mid,
            _ => a = mid,
        }
    }
    (a, b)
}

/// Exact isospectrality certificate for one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct IsospectralReport {
    pub pencil_charpoly: Polynomial,
    pub result_charpoly: Polynomial,
    pub equal: bool,
    pub roots: Option<RootReport>,
}

/// Compares the monic characteristic polynomials of the pencil and of the
/// assembled output. Roots are extracted only when `tol` is given.
pub fn isospectral_report(
    spec: &PencilSpec<Rational>,
    result: &TransformResult<Rational>,
    tol: Option<f64>,
) -> IsospectralReport {
    let pencil_charpoly = pencil_charpoly(spec);
    let result_charpoly = result_charpoly(result);
    let equal = !pencil_charpoly.is_zero() && pencil_charpoly == result_charpoly;
    let roots = tol.map(|t| real_roots(&pencil_charpoly, t));
    IsospectralReport {
        pencil_charpoly,
        result_charpoly,
        equal,
        roots,
    }
}
