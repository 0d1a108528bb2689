//! Exact arithmetic: rationals, sparse multivariate polynomials, normalized
//! rational functions, univariate views over coefficient fields, and linear
//! algebra over Q.

pub mod gcd;
pub mod linsolve;
pub mod poly;
pub mod ratfun;
pub mod upoly;

pub use gcd::{gcd, lcm, poly_gcd, squarefree_decomposition};
pub use linsolve::{constant_combination, LinearSystem};
pub use num_rational::BigRational as Rational;
pub use poly::{Exponents, Polynomial};
pub use ratfun::RationalFunction;
pub use upoly::UniPoly;

/// `split_proper_poly` as a free function.
pub fn split_proper_poly(f: &RationalFunction, var: usize) -> (RationalFunction, RationalFunction) {
    f.split_proper_poly(var)
}

/// Shorthand for building an integer rational.
pub fn int(k: i64) -> Rational {
    Rational::from_integer(k.into())
}

/// Shorthand for building the rational `a / b`.
pub fn frac(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}
