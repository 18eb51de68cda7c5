//! Seeded random pencils and batch isospectrality sweeps.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::par::Execution;
use crate::pencil::{assemble_pencil, assemble_result, DenseMatrix, Epsilon, PencilSpec};
use crate::scalar::Rational;
use crate::transform::{transform, Algorithm, TransformError};
use crate::verify::charpoly_with;

/// Shape and value ranges for random pencils.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomPencils {
    pub orders: RangeInclusive<usize>,
    pub factors: RangeInclusive<usize>,
    /// Numerators and denominators are drawn from `1..=max_part`.
    pub max_part: i64,
    /// `None` draws every mask entry at random.
    pub epsilon: Option<bool>,
}

impl Default for RandomPencils {
    fn default() -> Self {
        RandomPencils {
            orders: 1..=8,
            factors: 1..=3,
            max_part: 20,
            epsilon: None,
        }
    }
}

impl RandomPencils {
    pub fn single_factor(orders: RangeInclusive<usize>) -> Self {
        RandomPencils {
            orders,
            factors: 1..=1,
            ..Default::default()
        }
    }

    pub fn with_epsilon(mut self, value: bool) -> Self {
        self.epsilon = Some(value);
        self
    }

    fn positive(&self, rng: &mut impl Rng) -> Rational {
        let num = rng.random_range(1..=self.max_part);
        let den = rng.random_range(1..=self.max_part);
        Rational::new(num, den).expect("positive denominator")
    }

    pub fn sample(&self, rng: &mut impl Rng) -> PencilSpec<Rational> {
        let n = rng.random_range(self.orders.clone());
        let m = rng.random_range(self.factors.clone());
        let bits = (0..n.saturating_sub(1))
            .map(|_| self.epsilon.unwrap_or_else(|| rng.random_bool(0.5)))
            .collect();
        let q = (0..m)
            .map(|_| (0..n).map(|_| self.positive(rng)).collect())
            .collect();
        let e = (0..n.saturating_sub(1)).map(|_| self.positive(rng)).collect();
        PencilSpec::new(q, e, Epsilon::new(bits)).expect("shapes agree by construction")
    }

    /// `count` pencils from a fixed seed; the same seed gives the same list.
    pub fn generate(&self, seed: u64, count: usize) -> Vec<PencilSpec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

/// Outcome of transforming and certifying one pencil.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepOutcome {
    Isospectral,
    Mismatch,
    Failed(TransformError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: usize,
    pub isospectral: usize,
    pub mismatches: usize,
    pub failures: usize,
}

impl SweepSummary {
    pub fn from_outcomes(outcomes: &[SweepOutcome]) -> Self {
        let mut s = SweepSummary {
            total: outcomes.len(),
            ..Default::default()
        };
        for o in outcomes {
            match o {
                SweepOutcome::Isospectral => s.isospectral += 1,
                SweepOutcome::Mismatch => s.mismatches += 1,
                SweepOutcome::Failed(_) => s.failures += 1,
            }
        }
        s
    }

    pub fn all_isospectral(&self) -> bool {
        self.isospectral == self.total
    }
}

/// Transforms one pencil and compares characteristic polynomials exactly.
pub fn certify(spec: &PencilSpec<Rational>) -> SweepOutcome {
    certify_with(spec, Execution::default())
}

/// As [`certify`], with `exec` governing the determinant evaluations.
pub fn certify_with(spec: &PencilSpec<Rational>, exec: Execution) -> SweepOutcome {
    match transform(spec, Algorithm::Auto) {
        Ok((result, _)) => {
            let (a, b) = assemble_pencil(spec);
            let before = charpoly_with(&a, &b, exec);
            let h = assemble_result(&result);
            let after = charpoly_with(&h, &DenseMatrix::identity(h.order()), exec);
            if !before.is_zero() && before == after {
                SweepOutcome::Isospectral
            } else {
                SweepOutcome::Mismatch
            }
        }
        Err(err) => SweepOutcome::Failed(err),
    }
}

/// Certifies every pencil. [`Execution::Sequential`] keeps everything on the
/// calling thread; [`Execution::Parallel`] spreads pencils over the pool.
pub fn isospectral_sweep(specs: &[PencilSpec<Rational>], exec: Execution) -> Vec<SweepOutcome> {
    exec.map(specs, |spec| certify_with(spec, exec))
}
