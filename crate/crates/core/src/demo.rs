//! Built-in example pencils with known exact outputs.

use crate::pencil::{Epsilon, PencilSpec};
use crate::scalar::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// Bidiagonal pencil of order 5: `q = 1..5`, `e = 6..9`.
    Bidiagonal,
    /// Tridiagonal-bidiagonal pencil of order 6, mask `(1, 1, 1, 0, 0)`.
    Tridiagonal,
    /// Hessenberg pencil of order 6 with three factors, mask `(1, 1, 1, 0, 0)`.
    Hessenberg,
}

impl Example {
    pub const ALL: [Example; 3] = [Example::Bidiagonal, Example::Tridiagonal, Example::Hessenberg];

    /// Selects an example by its CLI number `2`, `3` or `4`.
    pub fn from_number(n: u8) -> Option<Example> {
        match n {
            2 => Some(Example::Bidiagonal),
            3 => Some(Example::Tridiagonal),
            4 => Some(Example::Hessenberg),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Example::Bidiagonal => 2,
            Example::Tridiagonal => 3,
            Example::Hessenberg => 4,
        }
    }

    pub fn spec(self) -> PencilSpec<Rational> {
        let ints = |r: std::ops::RangeInclusive<i64>| r.map(Rational::from).collect::<Vec<_>>();
        let (q, e, eps) = match self {
            Example::Bidiagonal => (vec![ints(1..=5)], ints(6..=9), Epsilon::all_ones(5)),
            Example::Tridiagonal => (
                vec![ints(1..=6)],
                ints(7..=11),
                Epsilon::new(vec![true, true, true, false, false]),
            ),
            Example::Hessenberg => (
                vec![ints(1..=6), ints(2..=7), ints(3..=8)],
                ints(7..=11),
                Epsilon::new(vec![true, true, true, false, false]),
            ),
        };
        PencilSpec::new(q, e, eps).expect("built-in example is well formed")
    }
}
